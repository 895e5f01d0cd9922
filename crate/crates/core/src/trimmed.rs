//! One-dimensional trimmed statistics.
//!
//! For a sample `Y` of size `k` and a trimming level `nu`, the admissible
//! subsets are those with at least `ceil((1 - nu) k)` elements. Searches are
//! restricted to contiguous windows of the sorted sample; the exhaustive
//! [`brute_force_interval`] oracle checks that restriction in tests.

use crate::error::{invalid, Error, Result};

/// Mean and mean absolute deviation of a subset of a 1D sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedStats {
    /// Indices into the original sample, ascending.
    pub subset: Vec<usize>,
    pub mu: f64,
    pub sigma1: f64,
}

impl TrimmedStats {
    pub fn size(&self) -> usize {
        self.subset.len()
    }

    /// Recomputes the statistics of `subset` directly from `y`.
    pub fn from_subset(y: &[f64], mut subset: Vec<usize>) -> Self {
        subset.sort_unstable();
        let (mu, sigma1) = mean_abs_dev(subset.iter().map(|&i| y[i]));
        Self { subset, mu, sigma1 }
    }
}

fn mean_abs_dev(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (sum, count) = values.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    let mu = sum / count as f64;
    let dev = values.map(|v| (v - mu).abs()).sum::<f64>() / count as f64;
    (mu, dev)
}

/// Closed interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(c: f64) -> Self {
        Self { lo: c, hi: c }
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo <= self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// `[mu - 2 sigma1, mu + 2 sigma1]`.
pub fn slab_interval(stats: &TrimmedStats) -> Interval {
    Interval::new(stats.mu - 2.0 * stats.sigma1, stats.mu + 2.0 * stats.sigma1)
}

/// Smallest admissible subset size `ceil((1 - nu) k)`, at least 1.
///
/// The ceiling ignores a relative excess of `1e-9` so that products such as
/// `(1 - 1/3) * 3` are not rounded up past the exact integer.
pub fn admissible_size(k: usize, nu: f64) -> Result<usize> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(invalid(format!("nu must lie in (0, 1), got {nu}")));
    }
    if k == 0 {
        return Err(invalid("empty sample"));
    }
    Ok(ceil_tol((1.0 - nu) * k as f64).clamp(1, k))
}

/// `ceil(x)` that treats values within a relative `1e-9` above an integer as that integer.
pub fn ceil_tol(x: f64) -> usize {
    let c = (x - 1e-9 * x.abs().max(1.0)).ceil();
    if c <= 0.0 {
        0
    } else {
        c as usize
    }
}

/// `floor(x)` that treats values within a relative `1e-9` below an integer as that integer.
pub fn floor_tol(x: f64) -> usize {
    let f = (x + 1e-9 * x.abs().max(1.0)).floor();
    if f <= 0.0 {
        0
    } else {
        f as usize
    }
}

/// A contiguous window of the sorted sample with its statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
    pub mu: f64,
    pub sigma1: f64,
}

impl Window {
    pub fn lower(&self) -> f64 {
        self.mu - 2.0 * self.sigma1
    }

    pub fn upper(&self) -> f64 {
        self.mu + 2.0 * self.sigma1
    }

    /// `|p - mu| / max(2 sigma1, tol) - 1`: how far `p` lies outside the slab,
    /// relative to its half-width.
    pub fn excess(&self, p: f64, tol: f64) -> f64 {
        (p - self.mu).abs() / (2.0 * self.sigma1).max(tol) - 1.0
    }
}

/// A 1D sample sorted once, with prefix sums for O(1) window means.
#[derive(Debug, Clone)]
pub struct SortedSample {
    values: Vec<f64>,
    order: Vec<usize>,
    prefix: Vec<f64>,
    shift: f64,
}

impl SortedSample {
    pub fn new(y: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
        let values: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        // Sums are taken around the middle value to limit cancellation.
        let shift = values.get(values.len() / 2).copied().unwrap_or(0.0);
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &values {
            acc += v - shift;
            prefix.push(acc);
        }
        Self {
            values,
            order,
            prefix,
            shift,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Original index of the value at sorted position `pos`.
    pub fn original_index(&self, pos: usize) -> usize {
        self.order[pos]
    }

    /// Original indices of the points in a window.
    pub fn window_indices(&self, start: usize, len: usize) -> Vec<usize> {
        let mut idx = self.order[start..start + len].to_vec();
        idx.sort_unstable();
        idx
    }

    /// Window statistics, with the split index for the absolute deviation
    /// supplied by the caller (`values[j-1] < mu <= values[j]`).
    fn stats_at(&self, start: usize, len: usize, j: usize) -> (f64, f64) {
        let end = start + len;
        if self.values[start] == self.values[end - 1] {
            return (self.values[start], 0.0);
        }
        let p = &self.prefix;
        let m = (p[end] - p[start]) / len as f64;
        let below = m * (j - start) as f64 - (p[j] - p[start]);
        let above = (p[end] - p[j]) - m * (end - j) as f64;
        (m + self.shift, ((below + above) / len as f64).max(0.0))
    }

    fn split(&self, start: usize, len: usize, mu: f64) -> usize {
        start + self.values[start..start + len].partition_point(|&v| v < mu)
    }

    fn mean(&self, start: usize, len: usize) -> f64 {
        (self.prefix[start + len] - self.prefix[start]) / len as f64 + self.shift
    }

    pub fn window(&self, start: usize, len: usize) -> Window {
        let mu = self.mean(start, len);
        let (mu, sigma1) = self.stats_at(start, len, self.split(start, len, mu));
        Window {
            start,
            len,
            mu,
            sigma1,
        }
    }

    /// Visits every window of size `m..=k` in order of increasing size, then
    /// increasing start.
    pub fn for_each_window(&self, m: usize, mut f: impl FnMut(Window)) {
        let k = self.len();
        for len in m..=k {
            let mut j = 0;
            for start in 0..=k - len {
                let end = start + len;
                let mu = self.mean(start, len);
                // Window means are nondecreasing in `start`, so the split index is too.
                if start == 0 {
                    j = self.split(0, len, mu);
                } else {
                    j = j.max(start);
                    while j < end && self.values[j] < mu {
                        j += 1;
                    }
                }
                let (mu, sigma1) = self.stats_at(start, len, j);
                f(Window {
                    start,
                    len,
                    mu,
                    sigma1,
                });
            }
        }
    }

    /// One pass over all admissible windows.
    pub fn scan(&self, m: usize, query: Option<f64>, tol: f64) -> WindowScan {
        let first = self.window(0, m);
        let mut out = WindowScan {
            min_sigma: first,
            lower: first,
            upper: first,
            worst: query.map(|p| (first.excess(p, tol), first)),
        };
        self.for_each_window(m, |w| {
            if w.sigma1 < out.min_sigma.sigma1 {
                out.min_sigma = w;
            }
            if w.lower() > out.lower.lower() {
                out.lower = w;
            }
            if w.upper() < out.upper.upper() {
                out.upper = w;
            }
            if let (Some(p), Some((best, bw))) = (query, out.worst.as_mut()) {
                let e = w.excess(p, tol);
                if e > *best {
                    *best = e;
                    *bw = w;
                }
            }
        });
        out
    }

    /// Intersection of all admissible window slabs with `[min, max]`.
    pub fn feasible_interval(&self, m: usize) -> FeasibleInterval {
        let scan = self.scan(m, None, 0.0);
        scan.feasible_interval(self)
    }
}

/// Extremal windows found by [`SortedSample::scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScan {
    /// Smallest `sigma1`; ties go to the smaller, then leftmost, window.
    pub min_sigma: Window,
    /// Window with the largest lower slab endpoint.
    pub lower: Window,
    /// Window with the smallest upper slab endpoint.
    pub upper: Window,
    /// Largest [`Window::excess`] at the query point, when one was given.
    pub worst: Option<(f64, Window)>,
}

impl WindowScan {
    pub fn feasible_interval(&self, sample: &SortedSample) -> FeasibleInterval {
        let lo = self.lower.lower().max(sample.min());
        let hi = self.upper.upper().min(sample.max());
        let scale = sample.min().abs().max(sample.max().abs());
        let crossed = lo > hi + 1e-12 * scale.max(1.0);
        let interval = if lo > hi {
            Interval::point(0.5 * (lo + hi))
        } else {
            Interval::new(lo, hi)
        };
        FeasibleInterval {
            interval,
            lower: self.lower,
            upper: self.upper,
            crossed,
        }
    }
}

/// Result of [`directional_feasible_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    pub interval: Interval,
    /// Window whose slab gives the lower endpoint before clipping.
    pub lower: Window,
    /// Window whose slab gives the upper endpoint before clipping.
    pub upper: Window,
    /// Set when the bounds crossed by more than rounding error; the interval
    /// then collapses to the midpoint of the crossing bounds.
    pub crossed: bool,
}

/// Minimum-`sigma1` subset among contiguous sorted windows of size `m..=k`.
pub fn min_sigma_subset(y: &[f64], m: usize) -> Result<TrimmedStats> {
    if m == 0 || m > y.len() {
        return Err(invalid(format!(
            "subset size {m} outside 1..={}",
            y.len()
        )));
    }
    let sorted = SortedSample::new(y);
    let w = sorted.scan(m, None, 0.0).min_sigma;
    Ok(TrimmedStats::from_subset(y, sorted.window_indices(w.start, w.len)))
}

/// Intersection over all admissible window slabs, clipped to `[min Y, max Y]`.
pub fn directional_feasible_interval(y: &[f64], nu: f64) -> Result<FeasibleInterval> {
    let m = admissible_size(y.len(), nu)?;
    Ok(SortedSample::new(y).feasible_interval(m))
}

/// Largest sample size accepted by [`brute_force_interval`].
pub const BRUTE_FORCE_MAX: usize = 20;

/// Exact intersection over every subset of size at least `ceil((1 - nu) k)`.
pub fn brute_force_interval(y: &[f64], nu: f64) -> Result<Interval> {
    let k = y.len();
    if k > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            k,
            max: BRUTE_FORCE_MAX,
        });
    }
    let m = admissible_size(k, nu)?;
    let lo_y = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_y = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = Interval::new(lo_y, hi_y);
    for mask in 1u32..(1u32 << k) {
        if (mask.count_ones() as usize) < m {
            continue;
        }
        let members = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| y[i]);
        let (mu, s) = mean_abs_dev(members);
        out = out.intersect(&Interval::new(mu - 2.0 * s, mu + 2.0 * s));
    }
    Ok(out)
}

/// `|y - mu| / sigma1` for the minimum-`sigma1` subset.
///
/// A zero scale gives 0 when `y` matches the subset mean within `1e-12`
/// (relative to the magnitude of the mean) and infinity otherwise.
pub fn outlyingness_1d(y: f64, sample: &[f64], nu: f64) -> Result<f64> {
    let m = admissible_size(sample.len(), nu)?;
    let stats = min_sigma_subset(sample, m)?;
    let dev = (y - stats.mu).abs();
    if stats.sigma1 == 0.0 {
        return Ok(if dev <= 1e-12 * stats.mu.abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        });
    }
    Ok(dev / stats.sigma1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn min_sigma_examples() {
        let s = min_sigma_subset(&[0.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!((s.mu, s.sigma1), (0.0, 0.0));
        assert_eq!(s.size(), 3);

        let s = min_sigma_subset(&[1.0, 1.0, 1.0, 5.0], 3).unwrap();
        assert_eq!(s.subset, vec![0, 1, 2]);
        assert_eq!((s.mu, s.sigma1), (1.0, 0.0));

        let s = min_sigma_subset(&[0.0, 1.0, 2.0, 10.0], 3).unwrap();
        assert_eq!(s.subset, vec![0, 1, 2]);
        assert_relative_eq!(s.mu, 1.0);
        assert_relative_eq!(s.sigma1, 2.0 / 3.0);
    }

    #[test]
    fn min_sigma_tie_prefers_smaller_then_leftmost() {
        // Windows {0,1} and {1,2} and {2,3} all have sigma1 = 0.5.
        let s = min_sigma_subset(&[3.0, 2.0, 1.0, 0.0], 2).unwrap();
        assert_eq!(s.subset, vec![2, 3]);
        assert_relative_eq!(s.mu, 0.5);
    }

    #[test]
    fn slab_examples() {
        let stats = TrimmedStats {
            subset: vec![0, 1, 2],
            mu: 1.0,
            sigma1: 2.0 / 3.0,
        };
        let i = slab_interval(&stats);
        assert_relative_eq!(i.lo, -1.0 / 3.0);
        assert_relative_eq!(i.hi, 7.0 / 3.0);

        let stats = TrimmedStats::from_subset(&[0.0, 1.0, 2.0, 10.0], vec![1, 2, 3]);
        assert_relative_eq!(stats.mu, 13.0 / 3.0);
        assert_relative_eq!(stats.sigma1, 34.0 / 9.0, max_relative = 1e-12);
        let i = slab_interval(&stats);
        assert_relative_eq!(i.lo, -29.0 / 9.0, max_relative = 1e-12);
        assert_relative_eq!(i.hi, 107.0 / 9.0, max_relative = 1e-12);

        let stats = TrimmedStats::from_subset(&[2.5, 2.5], vec![0, 1]);
        assert_eq!(slab_interval(&stats), Interval::point(2.5));
    }

    #[test]
    fn feasible_interval_examples() {
        let f = directional_feasible_interval(&[4.0, 4.0, 4.0], 1.0 / 3.0).unwrap();
        assert_eq!(f.interval, Interval::point(4.0));

        let f = directional_feasible_interval(&[0.0, 1.0, 2.0, 10.0], 1.0 / 3.0).unwrap();
        assert_eq!(f.interval.lo, 0.0);
        assert_relative_eq!(f.interval.hi, 7.0 / 3.0, epsilon = 1e-14);
        assert!(!f.crossed);

        let f = directional_feasible_interval(&[0.0, 1.0], 1.0 / 3.0).unwrap();
        assert_eq!(f.interval, Interval::new(0.0, 1.0));
    }

    #[test]
    fn brute_force_examples() {
        let b = brute_force_interval(&[0.0, 1.0, 2.0, 10.0], 1.0 / 3.0).unwrap();
        assert_eq!(b.lo, 0.0);
        assert_relative_eq!(b.hi, 7.0 / 3.0, epsilon = 1e-14);
        assert_eq!(
            brute_force_interval(&[0.0; 5], 0.2).unwrap(),
            Interval::point(0.0)
        );
        // nu small enough that only the full set is admissible.
        let b = brute_force_interval(&[0.0, 1.0, 5.0], 0.1).unwrap();
        assert_relative_eq!(b.lo, 0.0);
        assert_relative_eq!(b.hi, 5.0);
        assert!(matches!(
            brute_force_interval(&[0.0; 21], 0.1),
            Err(Error::TooLarge { k: 21, .. })
        ));
    }

    #[test]
    fn outlyingness_examples() {
        let y = [0.0, 1.0, 2.0, 10.0];
        assert_eq!(outlyingness_1d(1.0, &y, 0.25).unwrap(), 0.0);
        assert_relative_eq!(outlyingness_1d(3.0, &y, 0.25).unwrap(), 3.0);
        assert_eq!(
            outlyingness_1d(5.0, &[1.0, 1.0, 1.0, 5.0], 0.25).unwrap(),
            f64::INFINITY
        );
        assert_eq!(outlyingness_1d(1.0, &[1.0, 1.0, 1.0, 5.0], 0.25).unwrap(), 0.0);
    }

    #[test]
    fn admissible_size_is_exact_on_representable_products() {
        assert_eq!(admissible_size(3, 1.0 / 3.0).unwrap(), 2);
        assert_eq!(admissible_size(4, 1.0 / 3.0).unwrap(), 3);
        assert_eq!(admissible_size(4, 0.25).unwrap(), 3);
        assert_eq!(admissible_size(300, 1.0 / 60.0).unwrap(), 295);
        assert!(admissible_size(4, 0.0).is_err());
        assert!(admissible_size(4, 1.0).is_err());
    }

    #[test]
    fn two_pointer_scan_matches_direct_windows() {
        let y = [3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, 6.0, 5.0, 3.0, 5.0];
        let s = SortedSample::new(&y);
        s.for_each_window(7, |w| {
            let direct = TrimmedStats::from_subset(&y, s.window_indices(w.start, w.len));
            assert_relative_eq!(w.mu, direct.mu, epsilon = 1e-12);
            assert_relative_eq!(w.sigma1, direct.sigma1, epsilon = 1e-12);
        });
    }
}
