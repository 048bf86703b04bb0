//! Average returns over several periods: terminal wealth, the geometric
//! average gross return, and the mean–variance (Markowitz) approximation
//! exp{r̄ − (r̄² + s²)/2}.
//!
//! Returns are fractions (0.05 is five percent).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    returns: Vec<f64>,
    w0: f64,
}

impl ReturnSeries {
    /// Every gross return 1 + rₜ must be positive and `w0` positive.
    pub fn new(returns: Vec<f64>, w0: f64) -> Result<Self> {
        if returns.is_empty() {
            return Err(Error::InvalidParameter("return series is empty".into()));
        }
        if !(w0 > 0.0 && w0.is_finite()) {
            return Err(Error::InvalidParameter(format!("initial wealth must be positive, got {w0}")));
        }
        if let Some(&r) = returns.iter().find(|r| !(r.is_finite() && **r > -1.0)) {
            return Err(Error::Domain {
                value: r,
                domain: "(-1, ∞) (gross return 1 + r must be positive)".into(),
            });
        }
        Ok(ReturnSeries { returns, w0 })
    }

    /// Reads percentages, e.g. 5 for five percent.
    pub fn from_percent(returns: &[f64], w0: f64) -> Result<Self> {
        Self::new(returns.iter().map(|r| r / 100.0).collect(), w0)
    }

    pub fn returns(&self) -> &[f64] {
        &self.returns
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    fn log_growth(&self) -> f64 {
        compensated_sum(self.returns.iter().map(|r| r.ln_1p()))
    }
}

/// Divisor of the sample variance s².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceDivisor {
    /// 1/n
    #[default]
    Population,
    /// 1/(n − 1)
    Unbiased,
}

/// Terminal wealth w₀·Π(1 + rₜ).
pub fn wealth_path(series: &ReturnSeries) -> f64 {
    series.w0 * series.log_growth().exp()
}

/// {Π(1 + rₜ)}^{1/n}, the geometric average gross return.
pub fn geometric_average_return(series: &ReturnSeries) -> f64 {
    (series.log_growth() / series.len() as f64).exp()
}

/// exp{r̄ − (r̄² + s²)/2} with sample mean r̄ and variance s².
pub fn markowitz_approximation(series: &ReturnSeries, divisor: VarianceDivisor) -> f64 {
    let r = &series.returns;
    let n = r.len() as f64;
    let mean = compensated_sum(r.iter().copied()) / n;
    let ss = compensated_sum(r.iter().map(|v| (v - mean) * (v - mean)));
    let s2 = match divisor {
        _ if r.len() == 1 => 0.0,
        VarianceDivisor::Population => ss / n,
        VarianceDivisor::Unbiased => ss / (n - 1.0),
    };
    (mean - 0.5 * (mean * mean + s2)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PortfolioSummary {
    pub periods: usize,
    pub w0: f64,
    pub wealth: f64,
    pub geometric_gross: f64,
    pub geometric_net: f64,
    pub markowitz: f64,
    /// markowitz − geometric_gross
    pub gap: f64,
    pub variance_divisor: VarianceDivisor,
}

pub fn summarize(series: &ReturnSeries, divisor: VarianceDivisor) -> PortfolioSummary {
    let geometric = geometric_average_return(series);
    let markowitz = markowitz_approximation(series, divisor);
    PortfolioSummary {
        periods: series.len(),
        w0: series.w0,
        wealth: wealth_path(series),
        geometric_gross: geometric,
        geometric_net: geometric - 1.0,
        markowitz,
        gap: markowitz - geometric,
        variance_divisor: divisor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(r: &[f64], w0: f64) -> ReturnSeries {
        ReturnSeries::new(r.to_vec(), w0).unwrap()
    }

    #[test]
    fn wealth_examples() {
        assert_eq!(wealth_path(&series(&[0.0, 0.0, 0.0], 3.0)), 3.0);
        assert!((wealth_path(&series(&[0.1, -0.1], 1.0)) - 0.99).abs() < 1e-15);
        assert!((wealth_path(&series(&[1.0], 100.0)) - 200.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_examples() {
        assert!((geometric_average_return(&series(&[0.03; 7], 1.0)) - 1.03).abs() < 1e-15);
        let g = geometric_average_return(&series(&[0.1, -0.1], 1.0));
        assert!((g - 0.99f64.sqrt()).abs() < 1e-15);
        assert!((g - 0.994_987_4).abs() < 1e-7);
        assert!((geometric_average_return(&series(&[0.25], 1.0)) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn markowitz_examples() {
        let p = VarianceDivisor::Population;
        assert_eq!(markowitz_approximation(&series(&[0.0, 0.0], 1.0), p), 1.0);
        let s = series(&[0.1, -0.1], 1.0);
        let m = markowitz_approximation(&s, p);
        assert!((m - (-0.005f64).exp()).abs() < 1e-16);
        assert!((m - 0.995_012).abs() < 1e-6);
        let gap = m - geometric_average_return(&s);
        assert!((gap - 2.5e-5).abs() < 1e-7);
        // n − 1 divisor: s² = 0.02
        let u = markowitz_approximation(&s, VarianceDivisor::Unbiased);
        assert!((u - (-0.01f64).exp()).abs() < 1e-16);
        // one period has no dispersion under either divisor
        assert_eq!(
            markowitz_approximation(&series(&[0.2], 1.0), VarianceDivisor::Unbiased),
            (0.2f64 - 0.02).exp()
        );
    }

    #[test]
    fn invalid_series() {
        assert!(matches!(ReturnSeries::new(vec![0.1, -1.0], 1.0), Err(Error::Domain { .. })));
        assert!(matches!(ReturnSeries::new(vec![-1.5], 1.0), Err(Error::Domain { .. })));
        assert!(ReturnSeries::new(vec![], 1.0).is_err());
        assert!(ReturnSeries::new(vec![0.1], 0.0).is_err());
        assert!(ReturnSeries::new(vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn percent_input() {
        let s = ReturnSeries::from_percent(&[10.0, -10.0], 1.0).unwrap();
        assert_eq!(s.returns(), &[0.1, -0.1]);
    }

    #[test]
    fn summary_fields() {
        let s = summarize(&series(&[0.1, -0.1], 2.0), VarianceDivisor::Population);
        assert!((s.wealth - 1.98).abs() < 1e-15);
        assert!((s.geometric_net - (0.99f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(s.gap, s.markowitz - s.geometric_gross);
    }
}
