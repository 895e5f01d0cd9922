//! Linear programs behind the min-max solver.
//!
//! The primary program works in point coordinates: minimize `t` subject to
//! `|<y, u_j> - c_j| <= t h_j` for every pooled slab, equality for slabs no
//! wider than `tol_eq`, and the projection range of the data on
//! every pooled direction, with a tiny fixed linear term in `y` that breaks
//! ties between optimal points. A second small program recovers barycentric weights
//! for `y`; when `y` turns out to lie outside the hull, the same objective is
//! solved directly over the simplex of weights.

use microlp::{ComparisonOp, Error as LpError, OptimizationDirection, Problem, Solution, Variable};

use crate::error::{Error, Result};
use crate::geometry::{dot, PointSet};

/// One slab in working coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Cut {
    pub u: Vec<f64>,
    pub center: f64,
    pub halfwidth: f64,
}

fn map_err(e: LpError) -> Error {
    match e {
        LpError::Infeasible => Error::InfeasibleDegenerate,
        other => Error::Solver(other.to_string()),
    }
}

/// Weight of the tie-breaking term relative to the min-max objective.
const TIE_BREAK: f64 = 1e-7;

type Row = (Vec<(Variable, f64)>, ComparisonOp, f64);

/// Incrementally grown min-max program over `y` in `R^r`.
pub(crate) struct PointLp {
    problem: Problem,
    solution: Option<Solution>,
    pending: Vec<Row>,
    y: Vec<Variable>,
    t: Variable,
    tol_eq: f64,
}

impl PointLp {
    pub fn new(r: usize, tol_eq: f64) -> Self {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        // A tiny fixed tilt picks one vertex of a non-unique optimal face, so
        // the choice does not hinge on rounding.
        let y = (0..r)
            .map(|j| problem.add_var(TIE_BREAK / (j + 1) as f64, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let t = problem.add_var(1.0, (0.0, f64::INFINITY));
        Self {
            problem,
            solution: None,
            pending: Vec::new(),
            y,
            t,
            tol_eq,
        }
    }

    fn push(&mut self, terms: Vec<(Variable, f64)>, op: ComparisonOp, rhs: f64) {
        self.problem.add_constraint(terms.as_slice(), op, rhs);
        self.pending.push((terms, op, rhs));
    }

    fn terms(&self, u: &[f64], t_coeff: Option<f64>) -> Vec<(Variable, f64)> {
        let mut terms: Vec<(Variable, f64)> = self
            .y
            .iter()
            .zip(u)
            .filter(|(_, &c)| c != 0.0)
            .map(|(&v, &c)| (v, c))
            .collect();
        if let Some(c) = t_coeff {
            terms.push((self.t, c));
        }
        terms
    }

    pub fn add_cut(&mut self, cut: &Cut) {
        if cut.halfwidth > self.tol_eq {
            let lo = self.terms(&cut.u, Some(cut.halfwidth));
            let hi = self.terms(&cut.u, Some(-cut.halfwidth));
            self.push(lo, ComparisonOp::Ge, cut.center);
            self.push(hi, ComparisonOp::Le, cut.center);
        } else {
            let e = self.terms(&cut.u, None);
            self.push(e, ComparisonOp::Eq, cut.center);
        }
    }

    /// Restricts `<y, u>` to the data's projection range `[lo, hi]`.
    pub fn add_support(&mut self, u: &[f64], lo: f64, hi: f64) {
        let e = self.terms(u, None);
        self.push(e.clone(), ComparisonOp::Ge, lo - self.tol_eq);
        self.push(e, ComparisonOp::Le, hi + self.tol_eq);
    }

    /// Re-optimizes after the constraints added since the last call.
    pub fn solve(&mut self) -> Result<(Vec<f64>, f64)> {
        let pending = std::mem::take(&mut self.pending);
        let mut warm = self.solution.take();
        for (terms, op, rhs) in pending {
            warm = warm.and_then(|sol| {
                sol.add_constraint(terms.as_slice(), op, rhs)
                    .ok()
                    .and_then(|outcome| outcome.into_solution().ok())
            });
        }
        let sol = match warm {
            Some(s) => s,
            None => self
                .problem
                .solve()
                .map_err(map_err)?
                .into_solution()
                .map_err(|_| Error::Solver("interrupted".into()))?,
        };
        let y = self.y.iter().map(|&v| sol.var_value(v)).collect();
        let t = sol.var_value(self.t);
        self.solution = Some(sol);
        Ok((y, t))
    }
}

/// Barycentric weights `w >= 0`, `sum w = 1`, `sum w_i z_i = y`, or `None`
/// when `y` is outside the hull beyond `tol`.
pub(crate) fn hull_weights(z: &PointSet, y: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = z.n();
    let r = z.d();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<Variable> = (0..n).map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for k in 0..r {
        let terms: Vec<(Variable, f64)> = w
            .iter()
            .enumerate()
            .filter(|(i, _)| z.point(*i)[k] != 0.0)
            .map(|(i, &v)| (v, z.point(i)[k]))
            .collect();
        if terms.is_empty() {
            if y[k].abs() > tol {
                return None;
            }
            continue;
        }
        p.add_constraint(terms.as_slice(), ComparisonOp::Eq, y[k]);
    }
    let ones: Vec<(Variable, f64)> = w.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = p.solve().ok()?.into_solution().ok()?;
    let weights = clean_weights(w.iter().map(|&v| sol.var_value(v)).collect())?;
    let residual = combine(z, &weights)
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (residual <= tol).then_some(weights)
}

/// Clamps tiny negative weights and renormalizes to sum one.
pub(crate) fn clean_weights(mut w: Vec<f64>) -> Option<Vec<f64>> {
    w.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = w.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= s);
    Some(w)
}

pub(crate) fn combine(z: &PointSet, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; z.d()];
    for (p, &wi) in z.rows().zip(w) {
        if wi != 0.0 {
            for (o, v) in out.iter_mut().zip(p) {
                *o += wi * v;
            }
        }
    }
    out
}

/// The min-max program over hull weights directly (`n + 1` variables).
pub(crate) fn solve_weight_form(z: &PointSet, cuts: &[Cut], tol_eq: f64) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    let n = z.n();
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let w: Vec<Variable> = (0..n).map(|_| p.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let t = p.add_var(1.0, (0.0, f64::INFINITY));
    let ones: Vec<(Variable, f64)> = w.iter().map(|&v| (v, 1.0)).collect();
    p.add_constraint(ones.as_slice(), ComparisonOp::Eq, 1.0);
    for cut in cuts {
        let proj: Vec<(Variable, f64)> = z
            .rows()
            .zip(&w)
            .map(|(pt, &v)| (v, dot(pt, &cut.u)))
            .filter(|(_, c)| *c != 0.0)
            .collect();
        if cut.halfwidth > tol_eq {
            let mut lo = proj.clone();
            lo.push((t, cut.halfwidth));
            let mut hi = proj;
            hi.push((t, -cut.halfwidth));
            p.add_constraint(lo.as_slice(), ComparisonOp::Ge, cut.center);
            p.add_constraint(hi.as_slice(), ComparisonOp::Le, cut.center);
        } else {
            p.add_constraint(proj.as_slice(), ComparisonOp::Eq, cut.center);
        }
    }
    let sol = p
        .solve()
        .map_err(map_err)?
        .into_solution()
        .map_err(|_| Error::Solver("interrupted".into()))?;
    let weights = clean_weights(w.iter().map(|&v| sol.var_value(v)).collect())
        .ok_or_else(|| Error::Solver("degenerate weights".into()))?;
    let y = combine(z, &weights);
    let tval = sol.var_value(t);
    Ok((y, tval, weights))
}
