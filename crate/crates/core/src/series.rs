//! Heuristic convergence classification for nonnegative series known only
//! through finitely many terms.
//!
//! Policy on terms `t_0..t_R`:
//! * fit `ln t_r ≈ c + s·ln(r+1)` over the last half of the positive terms;
//! * measure the relative growth `g = (S_R − S_{R/2}) / S_{R/2}` of the
//!   partial sums over the last doubling;
//! * `diverges` if `s ≥ −1.05` and `g ≥ 1%`, `converges` if `s < −1.05` and
//!   `g < 1%`, otherwise `inconclusive`.
//!
//! For a convergent fit the integral-comparison tail bound
//! `e^c·R^{1+s}/(−1−s)` is reported as well.

use std::fmt::Write as _;

use crate::numeric::{fmt_sig, linear_fit, CompensatedSum};

/// Exponent separating summable from non-summable power decay.
pub const EXPONENT_CUTOFF: f64 = -1.05;
/// Relative growth of the partial sums over the last doubling.
pub const GROWTH_CUTOFF: f64 = 0.01;
/// Fewest terms for which a classification is attempted.
pub const MIN_TERMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesClass {
    Diverges,
    Converges,
    Inconclusive,
}

impl SeriesClass {
    pub fn label(self) -> &'static str {
        match self {
            SeriesClass::Diverges => "diverges",
            SeriesClass::Converges => "converges",
            SeriesClass::Inconclusive => "inconclusive",
        }
    }

    pub fn policy() -> String {
        format!(
            "heuristic: diverges if tail exponent >= {} and partial sums grow >= {}% over the last doubling; converges if exponent < {} and growth < {}%; otherwise inconclusive",
            fmt_sig(EXPONENT_CUTOFF),
            fmt_sig(GROWTH_CUTOFF * 100.0),
            fmt_sig(EXPONENT_CUTOFF),
            fmt_sig(GROWTH_CUTOFF * 100.0)
        )
    }
}

#[derive(Debug, Clone)]
pub struct SeriesReport {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Fitted tail exponent `s`; `-inf` when the tail underflowed to zero.
    pub exponent: f64,
    pub growth: f64,
    pub tail_bound: Option<f64>,
    pub class: SeriesClass,
}

impl SeriesReport {
    pub fn from_terms(terms: Vec<f64>) -> Self {
        let mut acc = CompensatedSum::new();
        let partial_sums: Vec<f64> = terms
            .iter()
            .map(|&t| {
                acc.add(t);
                acc.value()
            })
            .collect();
        let n = terms.len();
        if n < MIN_TERMS {
            return Self {
                terms,
                partial_sums,
                exponent: f64::NAN,
                growth: f64::NAN,
                tail_bound: None,
                class: SeriesClass::Inconclusive,
            };
        }
        let half = n / 2;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (half..n)
            .filter(|&r| terms[r] > 0.0 && terms[r].is_finite())
            .map(|r| (((r + 1) as f64).ln(), terms[r].ln()))
            .unzip();
        let fit = linear_fit(&xs, &ys);
        // fewer than two positive tail terms: the tail underflowed
        let exponent = fit.map_or(f64::NEG_INFINITY, |(s, _)| s);
        let s_half = partial_sums[half - 1];
        let s_last = partial_sums[n - 1];
        let growth = if s_last == s_half {
            0.0
        } else if s_half > 0.0 {
            (s_last - s_half) / s_half
        } else {
            f64::INFINITY
        };
        let tail_bound = match fit {
            Some((s, c)) if s < -1.0 => {
                Some(c.exp() * (n as f64).powf(1.0 + s) / (-1.0 - s))
            }
            _ if exponent == f64::NEG_INFINITY => Some(0.0),
            _ => None,
        };
        let class = if exponent >= EXPONENT_CUTOFF && growth >= GROWTH_CUTOFF {
            SeriesClass::Diverges
        } else if exponent < EXPONENT_CUTOFF && growth < GROWTH_CUTOFF {
            SeriesClass::Converges
        } else {
            SeriesClass::Inconclusive
        };
        Self {
            terms,
            partial_sums,
            exponent,
            growth,
            tail_bound,
            class,
        }
    }

    pub fn last_partial_sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// `key: value` lines for reports.
    pub fn summary(&self, prefix: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{prefix}.terms: {}", self.terms.len());
        let _ = writeln!(out, "{prefix}.partial_sum: {}", fmt_sig(self.last_partial_sum()));
        let _ = writeln!(out, "{prefix}.tail_exponent: {}", fmt_sig(self.exponent));
        let _ = writeln!(out, "{prefix}.last_doubling_growth: {}", fmt_sig(self.growth));
        match self.tail_bound {
            Some(b) => {
                let _ = writeln!(out, "{prefix}.tail_bound: {}", fmt_sig(b));
            }
            None => {
                let _ = writeln!(out, "{prefix}.tail_bound: none");
            }
        }
        let _ = writeln!(
            out,
            "{prefix}.classification: {} ({})",
            self.class.label(),
            SeriesClass::policy()
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classify(f: impl Fn(f64) -> f64, n: usize) -> SeriesReport {
        SeriesReport::from_terms((0..n).map(|r| f(r as f64)).collect())
    }

    #[test]
    fn power_series() {
        assert_eq!(classify(|_| 0.5, 1000).class, SeriesClass::Diverges);
        assert_eq!(classify(|r| 1.0 / (r + 1.0), 10_000).class, SeriesClass::Diverges);
        let p2 = classify(|r| (r + 1.0).powi(-2), 10_000);
        assert_eq!(p2.class, SeriesClass::Converges);
        assert!((p2.exponent + 2.0).abs() < 1e-6);
        // tail of Σ (r+1)^-2 beyond n is about 1/n
        let b = p2.tail_bound.unwrap();
        assert!((b * 10_000.0 - 1.0).abs() < 1e-3, "{b}");
        assert_eq!(classify(|r| (r + 1.0).powf(-1.5), 10_000).class, SeriesClass::Converges);
    }

    #[test]
    fn geometric_and_underflow() {
        let g = classify(|r| 0.5f64.powf(r), 2000);
        assert_eq!(g.class, SeriesClass::Converges);
        assert!(g.exponent < -100.0);
        let z = classify(|r| if r < 20.0 { 1.0 } else { 0.0 }, 100);
        assert_eq!(z.exponent, f64::NEG_INFINITY);
        assert_eq!(z.class, SeriesClass::Converges);
        assert!((g.last_partial_sum() - 2.0).abs() < 1e-15);
        assert_eq!(classify(|_| 0.0, 50).class, SeriesClass::Converges);
    }

    #[test]
    fn short_or_marginal() {
        assert_eq!(classify(|_| 1.0, 3).class, SeriesClass::Inconclusive);
        // Σ r^-1.1 converges, but far too slowly to be seen at this size
        assert_eq!(classify(|r| (r + 1.0).powf(-1.1), 10_000).class, SeriesClass::Inconclusive);
        assert!(SeriesClass::policy().contains("heuristic"));
    }
}
