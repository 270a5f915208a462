use super::rng::STREAM_RULE;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).clamp(0.0, phat), (center + half).clamp(phat, 1.0))
}

/// A Monte Carlo proportion with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
    pub stream_rule: &'static str,
}

impl TrialEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, WILSON_Z);
        Self {
            estimate: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            successes,
            trials,
            seed,
            stream_rule: STREAM_RULE,
        }
    }

    /// Whether `x` lies in the closed interval.
    pub fn covers(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }
}
