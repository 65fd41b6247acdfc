//! Binomial summaries for Monte Carlo hit counts.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Hit count of a Bernoulli experiment with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpTableStats {
    pub trials: u64,
    pub hits: u64,
    pub rate: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
}

impl OpTableStats {
    pub fn new(trials: u64, hits: u64, seed: u64) -> Self {
        OpTableStats {
            trials,
            hits,
            rate: if trials == 0 {
                0.0
            } else {
                hits as f64 / trials as f64
            },
            ci95: wilson_interval(hits, trials, Z95),
            seed,
        }
    }

    /// Binomial standard error at the observed rate.
    pub fn std_error(&self) -> f64 {
        binomial_std_error(self.rate, self.trials)
    }
}

pub fn binomial_std_error(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 8 of 10: textbook Wilson interval (0.4902, 0.9433)
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!(
            (lo - 0.4902).abs() < 1e-4 && (hi - 0.9433).abs() < 1e-4,
            "{lo} {hi}"
        );
        let (lo, hi) = wilson_interval(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 50, Z95);
        assert!(lo > 0.9 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stats_rate() {
        let s = OpTableStats::new(200, 50, 3);
        assert_eq!(s.rate, 0.25);
        assert!(s.ci95.0 < 0.25 && 0.25 < s.ci95.1);
    }
}
