//! Mergeable Monte Carlo accumulators.

use serde::Serialize;

/// Running first and second moments of a sampled functional.
///
/// Sums are kept with Neumaier compensation, so the order in which one
/// worker pushes samples barely matters and merges of partial accumulators
/// agree with a single pass to about machine precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    n: u64,
    sum: Compensated,
    sumsq: Compensated,
    max_sample: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        self.lo += if self.hi.abs() >= x.abs() {
            (self.hi - s) + x
        } else {
            (x - s) + self.hi
        };
        self.hi = s;
    }

    fn merge(self, other: Compensated) -> Compensated {
        let mut out = Compensated {
            hi: self.hi,
            lo: self.lo + other.lo,
        };
        out.add(other.hi);
        out
    }

    #[inline]
    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl Default for Estimate {
    fn default() -> Self {
        Estimate::new()
    }
}

impl Estimate {
    pub fn new() -> Self {
        Estimate {
            n: 0,
            sum: Compensated::default(),
            sumsq: Compensated::default(),
            max_sample: f64::NEG_INFINITY,
        }
    }

    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Self {
        let mut e = Estimate::new();
        for x in samples {
            e.push(x);
        }
        e
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sumsq.add(x * x);
        if x > self.max_sample {
            self.max_sample = x;
        }
    }

    pub fn merge(&self, other: &Estimate) -> Estimate {
        Estimate {
            n: self.n + other.n,
            sum: self.sum.merge(other.sum),
            sumsq: self.sumsq.merge(other.sumsq),
            max_sample: self.max_sample.max(other.max_sample),
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn sum(&self) -> f64 {
        self.sum.value()
    }

    pub fn sum_sq(&self) -> f64 {
        self.sumsq.value()
    }

    pub fn max_sample(&self) -> f64 {
        self.max_sample
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum() / self.n as f64
    }

    /// Unbiased sample variance, clamped at zero.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let s = self.sum();
        ((self.sum_sq() - s * s / n) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }

    pub fn log_mean(&self) -> f64 {
        self.mean().ln()
    }

    /// Delta-method standard error of `log(mean)`.
    pub fn log_mean_stderr(&self) -> f64 {
        self.stderr() / self.mean()
    }

    /// Set when a single sample carries more than half of the total.
    pub fn heavy_tail(&self) -> bool {
        self.n > 0 && self.max_sample > 0.5 * self.sum()
    }

    pub fn summary(&self) -> EstimateSummary {
        EstimateSummary {
            n: self.n,
            mean: self.mean(),
            stderr: self.stderr(),
            log_mean: self.log_mean(),
            log_mean_stderr: self.log_mean_stderr(),
            max_sample: self.max_sample,
            heavy_tail: self.heavy_tail(),
        }
    }
}

/// Plain-data view of an [`Estimate`] for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub n: u64,
    pub mean: f64,
    pub stderr: f64,
    pub log_mean: f64,
    pub log_mean_stderr: f64,
    pub max_sample: f64,
    pub heavy_tail: bool,
}

/// `sqrt(se_a^2 + se_b^2)`.
pub fn pooled_stderr(a: &Estimate, b: &Estimate) -> f64 {
    a.stderr().hypot(b.stderr())
}

/// Block jackknife of `log(mean)` over equally weighted blocks.
///
/// Returns `(bias-corrected value, stderr)`, or `None` with fewer than two blocks.
pub fn jackknife_log_mean(blocks: &[Estimate]) -> Option<(f64, f64)> {
    let k = blocks.len();
    if k < 2 {
        return None;
    }
    let total = blocks.iter().fold(Estimate::new(), |acc, b| acc.merge(b));
    let full = total.log_mean();
    let (s, n) = (total.sum(), total.count() as f64);
    let leave_out: Vec<f64> = blocks
        .iter()
        .map(|b| ((s - b.sum()) / (n - b.count() as f64)).ln())
        .collect();
    let kf = k as f64;
    let avg = leave_out.iter().sum::<f64>() / kf;
    let var = (kf - 1.0) / kf * leave_out.iter().map(|v| (v - avg).powi(2)).sum::<f64>();
    Some((kf * full - (kf - 1.0) * avg, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_is_identity() {
        let e = Estimate::from_samples([1.0, 2.0, 4.0]);
        assert_eq!(Estimate::new().merge(&e), e);
        assert_eq!(e.merge(&Estimate::new()), e);
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let e = Estimate::from_samples(std::iter::repeat_n(1.0, 1000));
        assert_eq!(e.mean(), 1.0);
        assert_eq!(e.stderr(), 0.0);
        assert_eq!(e.log_mean(), 0.0);
    }

    #[test]
    fn heavy_tail_flag() {
        assert!(Estimate::from_samples([0.1, 0.1, 5.0]).heavy_tail());
        assert!(!Estimate::from_samples([1.0, 1.0, 1.0]).heavy_tail());
    }

    #[test]
    fn jackknife_matches_delta_method_roughly() {
        let blocks: Vec<Estimate> = (0..20)
            .map(|b| Estimate::from_samples((0..50).map(|i| 1.0 + ((b * 50 + i) % 7) as f64)))
            .collect();
        let (v, se) = jackknife_log_mean(&blocks).unwrap();
        let total = blocks.iter().fold(Estimate::new(), |a, b| a.merge(b));
        assert!((v - total.log_mean()).abs() < 1e-3);
        assert!(se < 0.05);
    }

    proptest! {
        #[test]
        fn merge_matches_single_pass(xs in prop::collection::vec(-1e3f64..1e3, 1..200), split in 0usize..200) {
            let k = split.min(xs.len());
            let a = Estimate::from_samples(xs[..k].iter().copied());
            let b = Estimate::from_samples(xs[k..].iter().copied());
            let whole = Estimate::from_samples(xs.iter().copied());
            let ab = a.merge(&b);
            let ba = b.merge(&a);
            prop_assert_eq!(ab.count(), whole.count());
            prop_assert_eq!(ab.mean(), ba.mean());
            prop_assert_eq!(ab.stderr(), ba.stderr());
            let tol = 1e-12 * (1.0 + whole.sum().abs() + xs.iter().map(|x| x.abs()).sum::<f64>());
            prop_assert!((ab.sum() - whole.sum()).abs() <= tol);
            prop_assert!((ab.sum_sq() - whole.sum_sq()).abs() <= 1e-12 * (1.0 + whole.sum_sq()));
            prop_assert_eq!(ab.max_sample(), whole.max_sample());
        }

        #[test]
        fn merge_is_associative(xs in prop::collection::vec(0f64..1e3, 3..90)) {
            let n = xs.len() / 3;
            let a = Estimate::from_samples(xs[..n].iter().copied());
            let b = Estimate::from_samples(xs[n..2 * n].iter().copied());
            let c = Estimate::from_samples(xs[2 * n..].iter().copied());
            let left = a.merge(&b).merge(&c);
            let right = a.merge(&b.merge(&c));
            prop_assert!((left.mean() - right.mean()).abs() <= 1e-12 * left.mean().abs().max(1e-300));
            prop_assert_eq!(left.count(), right.count());
        }
    }
}
