//! Binomial comparisons of sample frequencies with exact density targets.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::sample::SampleStats;
use crate::error::Result;
use crate::starlight::{density_report, format_rational, DensityReport};

/// Band, in standard deviations, for hard statistical checks.
pub const HARD_SIGMAS: f64 = 3.0;
/// Band beyond which conjectural comparisons are flagged.
pub const SOFT_SIGMAS: f64 = 4.0;

#[derive(Clone, Debug, Serialize)]
pub struct BinomialCheck {
    pub label: String,
    pub successes: u64,
    pub trials: u64,
    /// Exact target as a reduced fraction.
    pub expected: String,
    pub expected_decimal: f64,
    pub frequency: f64,
    /// Standard deviation of the frequency under the target.
    pub sigma: f64,
    pub z: f64,
    /// Conjectural targets are reported, not enforced.
    pub soft: bool,
}

impl BinomialCheck {
    pub fn new(label: impl Into<String>, successes: u64, trials: u64, expected: &BigRational, soft: bool) -> Self {
        let q = expected.to_f64().expect("finite target");
        let n = trials as f64;
        let frequency = if trials == 0 { f64::NAN } else { successes as f64 / n };
        let sigma = (q * (1.0 - q) / n).sqrt();
        let z = (frequency - q) / sigma;
        BinomialCheck {
            label: label.into(),
            successes,
            trials,
            expected: format_rational(expected),
            expected_decimal: q,
            frequency,
            sigma,
            z,
            soft,
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.trials > 0 && self.z.abs() <= sigmas
    }

    /// Hard checks must sit in the 3 sigma band; soft ones never fail.
    pub fn passes(&self) -> bool {
        self.soft || self.within(HARD_SIGMAS)
    }

    pub fn flagged(&self) -> bool {
        self.soft && !self.within(SOFT_SIGMAS)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleSummary {
    pub stats: SampleStats,
    pub m_k: u64,
    pub checks: Vec<BinomialCheck>,
}

impl SampleSummary {
    pub fn check(&self, label: &str) -> Option<&BinomialCheck> {
        self.checks.iter().find(|c| c.label == label)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(BinomialCheck::passes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

fn frac(a: u64, b: u64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// Every frequency the census can be compared against, given `m_k` of the
/// field.
pub fn summarize(stats: &SampleStats, m_k: u64) -> Result<SampleSummary> {
    let n = stats.n;
    let dr: DensityReport = density_report(n, m_k)?;
    let mut checks = Vec::new();
    let uniform = frac(1, 1 << n);
    for (c, &k) in stats.class_counts.iter().enumerate() {
        let bits: String = (0..n).map(|i| if (c >> i) & 1 == 1 { '1' } else { '0' }).collect();
        checks.push(BinomialCheck::new(format!("class {bits}"), k, stats.split, &uniform, false));
    }
    let half = frac(1, 2);
    checks.push(BinomialCheck::new("star split", stats.star_split, stats.split, &dr.d_rs, false));
    checks.push(BinomialCheck::new("star inert", stats.star_inert, stats.inert, &half, false));
    checks.push(BinomialCheck::new("star all", stats.star_total(), stats.total(), &dr.d_k, false));
    checks.push(BinomialCheck::new("inert class(+1)", stats.inert_plus_one, stats.inert, &half, false));
    checks.push(BinomialCheck::new("all spins +1", stats.all_spins_positive, stats.split, &dr.c_ks, true));
    Ok(SampleSummary {
        stats: stats.clone(),
        m_k,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_scores() {
        let c = BinomialCheck::new("x", 530, 1000, &frac(1, 2), false);
        assert!((c.frequency - 0.53).abs() < 1e-12);
        assert!((c.sigma - (0.25f64 / 1000.0).sqrt()).abs() < 1e-12);
        assert!((c.z - 0.03 / c.sigma).abs() < 1e-9);
        assert!(c.within(3.0));
        let far = BinomialCheck::new("x", 600, 1000, &frac(1, 2), false);
        assert!(!far.passes());
        let soft = BinomialCheck::new("x", 600, 1000, &frac(1, 2), true);
        assert!(soft.passes() && soft.flagged());
        assert!(!BinomialCheck::new("x", 0, 0, &frac(1, 2), false).passes());
    }

    #[test]
    fn summary_targets() {
        let mut s = SampleStats::new(3, 7, 1, 100);
        s.split = 8;
        s.class_counts = vec![1; 8];
        s.inert = 10;
        s.star_split = 4;
        s.star_inert = 5;
        s.inert_plus_one = 5;
        s.all_spins_positive = 2;
        let sum = summarize(&s, 1).unwrap();
        assert_eq!(sum.checks.len(), 8 + 5);
        assert_eq!(sum.check("star split").unwrap().expected, "1/2");
        assert_eq!(sum.check("star all").unwrap().expected, "1/2");
        assert_eq!(sum.check("all spins +1").unwrap().expected, "1/4");
        assert_eq!(sum.check("class 100").unwrap().expected, "1/8");
        assert!(sum.all_pass());
        let json: serde_json::Value = serde_json::from_str(&sum.to_json()).unwrap();
        assert_eq!(json["m_k"], 1);
        assert_eq!(json["stats"]["split"], 8);
    }
}
