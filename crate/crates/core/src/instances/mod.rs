//! Seeded generators for the hard distributions and contamination models,
//! with exact first and second moments.

mod contamination;
mod families;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{PointSet, SpdMatrix};
use crate::rng;

pub use contamination::{contaminate, ContaminationSpec, Placement};
pub use families::{breakdown_family, quant_family, verify_mixture, HardFamily, MixtureWitness};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    /// Atoms `e_1..e_d, 0`; `e_1` carries `1/(d+1) + gamma`, the rest `1/(d+1) - gamma/d`.
    IntuitionGamma { gamma: f64 },
    /// Atoms `e_1..e_d, 0`; `e_j` carries `eps^2/d`, except `e_index` which carries `eps^2/d^2`.
    HeavytailedLb { index: usize, eps: f64 },
    /// Index 0: uniform on `e_1..e_d, 0`. Index `d+1`: uniform on `e_1..e_d`.
    /// Otherwise uniform on the same atoms without `e_index`. `r` sets the
    /// intended noise `1/(2 d r)`.
    BreakdownLb { index: usize, r: f64 },
    /// Atoms `e_1..e_d, 1/d`. Index 0: `eta` on each `e_j`. Otherwise `e_index`
    /// is dropped and the other `e_j` carry `d eta/(d-1)`. `1/d` keeps `1 - d eta`.
    QuantLb { index: usize, eta: f64 },
    /// Mean zero and identity covariance when omitted.
    Gaussian {
        #[serde(default)]
        mean: Option<Vec<f64>>,
        #[serde(default)]
        cov: Option<Vec<Vec<f64>>>,
    },
    CustomDiscrete { atoms: Vec<Vec<f64>>, probs: Vec<f64> },
}

/// A distribution in `R^d` plus optional independent noise uniform on
/// `{-noise, +noise}^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub d: usize,
    #[serde(default)]
    pub noise: f64,
    #[serde(flatten)]
    pub kind: DistributionKind,
}

#[derive(Debug, Clone)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub cov: SpdMatrix,
    pub nonsingular: bool,
}

/// An atom and its exact probability.
pub type Atom = (Vec<f64>, BigRational);

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| invalid(format!("non-finite parameter {x}")))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn basis(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// `r = sqrt(d eta / (1 - d eta)) / 2`.
pub fn quant_radius(d: usize, eta: f64) -> f64 {
    let de = d as f64 * eta;
    0.5 * (de / (1.0 - de)).sqrt()
}

/// `eps = sqrt(d ln(1/(d delta)) / (n ln d)) / 4`.
pub fn heavytailed_eps(n: usize, d: usize, delta: f64) -> Result<f64> {
    if d < 2 || n == 0 {
        return Err(invalid("heavy-tailed family needs d >= 2 and n >= 1"));
    }
    let dd = d as f64 * delta;
    if !(dd > 0.0 && dd < 1.0) {
        return Err(invalid(format!("d * delta must lie in (0, 1), got {dd}")));
    }
    Ok(0.25 * (d as f64 * (1.0 / dd).ln() / (n as f64 * (d as f64).ln())).sqrt())
}

impl DistributionSpec {
    pub fn new(d: usize, kind: DistributionKind) -> Result<Self> {
        let spec = Self { d, noise: 0.0, kind };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_noise(mut self, noise: f64) -> Result<Self> {
        self.noise = noise;
        self.validate()?;
        Ok(self)
    }

    pub fn intuition_gamma(d: usize, gamma: f64) -> Result<Self> {
        Self::new(d, DistributionKind::IntuitionGamma { gamma })
    }

    pub fn heavytailed(d: usize, index: usize, eps: f64) -> Result<Self> {
        Self::new(d, DistributionKind::HeavytailedLb { index, eps })
    }

    /// Member `index` of the breakdown family with its noise `1/(2 d r)`.
    pub fn breakdown(d: usize, index: usize, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("r must be positive, got {r}")));
        }
        Self::new(d, DistributionKind::BreakdownLb { index, r })?.with_noise(1.0 / (2.0 * d as f64 * r))
    }

    /// Member `index` of the quantitative family with its noise `eta/(4 r)`.
    pub fn quant(d: usize, index: usize, eta: f64) -> Result<Self> {
        if !(eta > 0.0) {
            return Err(invalid(format!("eta must be positive, got {eta}")));
        }
        let r = quant_radius(d, eta);
        Self::new(d, DistributionKind::QuantLb { index, eta })?.with_noise(eta / (4.0 * r))
    }

    pub fn gaussian(d: usize) -> Result<Self> {
        Self::new(d, DistributionKind::Gaussian { mean: None, cov: None })
    }

    pub fn point_mass(point: Vec<f64>) -> Result<Self> {
        Self::new(
            point.len(),
            DistributionKind::CustomDiscrete {
                atoms: vec![point],
                probs: vec![1.0],
            },
        )
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(invalid(format!("noise must be finite and >= 0, got {}", self.noise)));
        }
        match &self.kind {
            DistributionKind::HeavytailedLb { index, .. } if !(1..=d).contains(index) => {
                return Err(invalid(format!("index {index} outside 1..={d}")));
            }
            DistributionKind::BreakdownLb { index, .. } if *index > d + 1 => {
                return Err(invalid(format!("index {index} outside 0..={}", d + 1)));
            }
            DistributionKind::QuantLb { index, .. } if *index > d => {
                return Err(invalid(format!("index {index} outside 0..={d}")));
            }
            DistributionKind::QuantLb { index, .. } if *index > 0 && d < 2 => {
                return Err(invalid("quantitative family members need d >= 2"));
            }
            DistributionKind::Gaussian { mean, cov } => {
                if mean.as_ref().is_some_and(|m| m.len() != d || m.iter().any(|v| !v.is_finite())) {
                    return Err(invalid("gaussian mean must be a finite d-vector"));
                }
                if let Some(c) = cov {
                    if c.len() != d || c.iter().any(|row| row.len() != d) {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: c.len(),
                        });
                    }
                    SpdMatrix::new(DMatrix::from_fn(d, d, |i, j| c[i][j]))?;
                }
                return Ok(());
            }
            DistributionKind::CustomDiscrete { atoms, probs } => {
                if atoms.is_empty() || atoms.len() != probs.len() {
                    return Err(invalid("custom distribution needs one probability per atom"));
                }
                if let Some(a) = atoms.iter().find(|a| a.len() != d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: a.len(),
                    });
                }
                if atoms.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(invalid("atoms must be finite"));
                }
            }
            _ => {}
        }
        let atoms = self.exact_atoms()?.expect("discrete kind");
        if atoms.iter().any(|(_, p)| p.is_negative()) {
            return Err(invalid("probabilities must be nonnegative"));
        }
        let total: f64 = atoms.iter().map(|(_, p)| p.to_f64().unwrap_or(f64::NAN)).sum();
        if !((total - 1.0).abs() <= 1e-12) {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    /// Atoms in canonical order with exact probabilities, or `None` for the
    /// Gaussian kind. Zero-probability atoms of the fixed supports are kept.
    pub fn exact_atoms(&self) -> Result<Option<Vec<Atom>>> {
        let d = self.d;
        let di = d as i64;
        let axes = |mass: &dyn Fn(usize) -> BigRational| -> Vec<Atom> {
            (0..d).map(|j| (basis(d, j), mass(j))).collect()
        };
        let atoms = match &self.kind {
            DistributionKind::IntuitionGamma { gamma } => {
                let g = rational(*gamma)?;
                let base = ratio(1, di + 1);
                let rest = &base - &g / ratio(di, 1);
                let mut a = axes(&|j| if j == 0 { &base + &g } else { rest.clone() });
                a.push((vec![0.0; d], rest));
                a
            }
            DistributionKind::HeavytailedLb { index, eps } => {
                let e2 = rational(*eps)? * rational(*eps)?;
                let mut a = axes(&|j| {
                    if j + 1 == *index {
                        &e2 / ratio(di * di, 1)
                    } else {
                        &e2 / ratio(di, 1)
                    }
                });
                let used = a.iter().fold(BigRational::zero(), |s, (_, p)| s + p);
                a.push((vec![0.0; d], BigRational::one() - used));
                a
            }
            DistributionKind::BreakdownLb { index, .. } => {
                let (axis, origin) = if *index == 0 {
                    (ratio(1, di + 1), ratio(1, di + 1))
                } else if *index == d + 1 {
                    (ratio(1, di), BigRational::zero())
                } else {
                    (ratio(1, di), ratio(1, di))
                };
                let mut a = axes(&|j| {
                    if j + 1 == *index {
                        BigRational::zero()
                    } else {
                        axis.clone()
                    }
                });
                a.push((vec![0.0; d], origin));
                a
            }
            DistributionKind::QuantLb { index, eta } => {
                let e = rational(*eta)?;
                let centre = BigRational::one() - &e * ratio(di, 1);
                let axis = if *index == 0 {
                    e.clone()
                } else {
                    &e * ratio(di, di - 1)
                };
                let mut a = axes(&|j| {
                    if j + 1 == *index {
                        BigRational::zero()
                    } else {
                        axis.clone()
                    }
                });
                a.push((vec![1.0 / d as f64; d], centre));
                a
            }
            DistributionKind::CustomDiscrete { atoms, probs } => atoms
                .iter()
                .zip(probs)
                .map(|(a, &p)| Ok((a.clone(), rational(p)?)))
                .collect::<Result<Vec<_>>>()?,
            DistributionKind::Gaussian { .. } => return Ok(None),
        };
        Ok(Some(atoms))
    }

    /// Atoms with probabilities rounded to `f64`.
    pub fn atoms(&self) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
        let atoms = self.exact_atoms().ok()??;
        Some(
            atoms
                .into_iter()
                .map(|(a, p)| (a, p.to_f64().unwrap_or(0.0)))
                .unzip(),
        )
    }

    fn gaussian_params(&self) -> Option<(Vec<f64>, DMatrix<f64>)> {
        match &self.kind {
            DistributionKind::Gaussian { mean, cov } => {
                let d = self.d;
                let m = mean.clone().unwrap_or_else(|| vec![0.0; d]);
                let c = match cov {
                    Some(c) => DMatrix::from_fn(d, d, |i, j| c[i][j]),
                    None => DMatrix::identity(d, d),
                };
                Some((m, c))
            }
            _ => None,
        }
    }
}

/// `n` i.i.d. draws. Atoms are chosen by inverse CDF over the canonical order;
/// noise is added coordinate-wise after each draw.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<PointSet> {
    spec.validate()?;
    let d = spec.d;
    let mut rng = rng::rng(seed);
    let mut data = Vec::with_capacity(n * d);
    if let Some((atoms, probs)) = spec.atoms() {
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cum.push(acc);
        }
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for _ in 0..n {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cum.partition_point(|&c| c <= u).min(last);
            data.extend_from_slice(&atoms[k]);
            add_noise(&mut data, d, spec.noise, &mut rng);
        }
    } else {
        let (mean, cov) = spec.gaussian_params().expect("gaussian kind");
        let eig = SymmetricEigen::new(cov);
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
        for _ in 0..n {
            let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let x = &root * z;
            data.extend(mean.iter().zip(x.iter()).map(|(m, v)| m + v));
            add_noise(&mut data, d, spec.noise, &mut rng);
        }
    }
    PointSet::from_flat(n, d, data)
}

fn add_noise(data: &mut [f64], d: usize, noise: f64, rng: &mut impl Rng) {
    if noise > 0.0 {
        let start = data.len() - d;
        for v in &mut data[start..] {
            *v += if rng.random::<bool>() { noise } else { -noise };
        }
    }
}

/// Exact mean and covariance, including the `noise^2 I` term of the noise.
pub fn moments(spec: &DistributionSpec) -> Result<Moments> {
    spec.validate()?;
    let d = spec.d;
    let (mean, mut cov) = match spec.atoms() {
        Some((atoms, probs)) => {
            let mut mean = vec![0.0; d];
            for (a, p) in atoms.iter().zip(&probs) {
                for (m, v) in mean.iter_mut().zip(a) {
                    *m += p * v;
                }
            }
            let mut cov = DMatrix::zeros(d, d);
            for (a, &p) in atoms.iter().zip(&probs) {
                let c = DVector::from_iterator(d, a.iter().zip(&mean).map(|(v, m)| v - m));
                cov += &c * c.transpose() * p;
            }
            (mean, cov)
        }
        None => spec.gaussian_params().expect("gaussian kind"),
    };
    for i in 0..d {
        cov[(i, i)] += spec.noise * spec.noise;
    }
    let cov = SpdMatrix::new(cov)?;
    let nonsingular = cov.is_pd();
    Ok(Moments { mean, cov, nonsingular })
}

/// Diagonal bound `M` with `Sigma <= M` for a heavy-tailed member (noise excluded).
pub fn heavytailed_bound(spec: &DistributionSpec) -> Result<DMatrix<f64>> {
    match spec.kind {
        DistributionKind::HeavytailedLb { index, eps } => {
            let d = spec.d as f64;
            let e2 = eps * eps;
            Ok(DMatrix::from_fn(spec.d, spec.d, |j, k| match (j == k, j + 1 == index) {
                (false, _) => 0.0,
                (true, false) => e2 / d,
                (true, true) => e2 / (d * d),
            }))
        }
        _ => Err(invalid("bound only defined for the heavy-tailed family")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn intuition_atoms() {
        let s = DistributionSpec::intuition_gamma(3, 0.1).unwrap();
        let (atoms, probs) = s.atoms().unwrap();
        assert_eq!(atoms[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(atoms[3], vec![0.0; 3]);
        assert_relative_eq!(probs[0], 0.35, epsilon = 1e-15);
        for p in &probs[1..] {
            assert_relative_eq!(*p, 0.25 - 0.1 / 3.0, epsilon = 1e-15);
        }
        let uniform = DistributionSpec::intuition_gamma(4, 0.0).unwrap().atoms().unwrap().1;
        assert!(uniform.iter().all(|&p| p == 0.2));
        assert!(DistributionSpec::intuition_gamma(3, 1.0).is_err());
    }

    #[test]
    fn heavytailed_masses_are_exact() {
        let s = DistributionSpec::heavytailed(5, 2, 0.3).unwrap();
        let atoms = s.exact_atoms().unwrap().unwrap();
        let total = atoms.iter().fold(BigRational::zero(), |a, (_, p)| a + p);
        assert_eq!(total, BigRational::one());
        let e2 = rational(0.3).unwrap() * rational(0.3).unwrap();
        assert_eq!(atoms[1].1, &e2 / ratio(25, 1));
        assert_eq!(atoms[0].1, &e2 / ratio(5, 1));
    }

    #[test]
    fn heavytailed_eps_examples() {
        let e = heavytailed_eps(1000, 4, 0.001).unwrap();
        let direct = 0.25 * (4.0 * 250f64.ln() / (1000.0 * 4f64.ln())).sqrt();
        assert_relative_eq!(e, direct, max_relative = 1e-14);
        assert!((e - 0.0316).abs() < 5e-4);
        assert_relative_eq!(heavytailed_eps(4000, 4, 0.001).unwrap(), e / 2.0, max_relative = 1e-14);
        let delta = 0.5 / std::f64::consts::E;
        let n = 300;
        assert_relative_eq!(
            heavytailed_eps(n, 2, delta).unwrap(),
            0.25 * (2.0 / (n as f64 * 2f64.ln())).sqrt(),
            max_relative = 1e-14
        );
        assert!(heavytailed_eps(100, 4, 0.25).is_err());
        assert!(heavytailed_eps(100, 1, 0.01).is_err());
    }

    #[test]
    fn quant_parameters() {
        let s = DistributionSpec::quant(4, 0, 0.1).unwrap();
        assert_relative_eq!(quant_radius(4, 0.1), 0.5 * (0.4f64 / 0.6).sqrt());
        assert!((quant_radius(4, 0.1) - 0.4082).abs() < 1e-4);
        assert!((s.noise - 0.06124).abs() < 1e-5);
        let member = DistributionSpec::quant(4, 2, 0.1).unwrap().exact_atoms().unwrap().unwrap();
        assert_eq!(member[1].1, BigRational::zero());
        assert_eq!(member[0].1, rational(0.1).unwrap() * ratio(4, 3));
        let total = member.iter().fold(BigRational::zero(), |a, (_, p)| a + p);
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn point_mass_moments() {
        let m = moments(&DistributionSpec::point_mass(vec![1.0, -2.0]).unwrap()).unwrap();
        assert_eq!(m.mean, vec![1.0, -2.0]);
        assert_eq!(m.cov.matrix().abs().max(), 0.0);
        assert!(!m.nonsingular);
    }

    #[test]
    fn intuition_moments_closed_form() {
        let m = moments(&DistributionSpec::intuition_gamma(2, 0.0).unwrap()).unwrap();
        assert_relative_eq!(m.mean[0], 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(m.cov.matrix()[(0, 0)], 2.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(m.cov.matrix()[(0, 1)], -1.0 / 9.0, epsilon = 1e-15);
        assert!(m.nonsingular);
    }

    #[test]
    fn noise_lifts_covariance() {
        let s = DistributionSpec::breakdown(4, 0, 2.0).unwrap();
        assert_relative_eq!(s.noise, 1.0 / 16.0);
        let m = moments(&s).unwrap();
        let lo = m.cov.eigenvalues().min();
        assert!(lo >= s.noise * s.noise - 1e-12);
        assert!(m.nonsingular);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = DistributionSpec::intuition_gamma(3, 0.05).unwrap().with_noise(0.1).unwrap();
        assert_eq!(sample(&s, 50, 9).unwrap(), sample(&s, 50, 9).unwrap());
        assert_ne!(sample(&s, 50, 9).unwrap(), sample(&s, 50, 10).unwrap());
        let g = DistributionSpec::gaussian(3).unwrap();
        assert_eq!(sample(&g, 20, 1).unwrap(), sample(&g, 20, 1).unwrap());
    }

    #[test]
    fn zero_mass_atoms_are_never_drawn() {
        let s = DistributionSpec::breakdown(4, 3, 1.0).unwrap().with_noise(0.0).unwrap();
        let x = sample(&s, 2000, 3).unwrap();
        assert!(x.rows().all(|p| p[2] == 0.0));
    }
}
