//! Least-squares fits for scaling experiments.

use serde::Serialize;

/// `y = a + b x` by ordinary least squares. `None` with fewer than two
/// distinct `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Some((my - b * mx, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    /// Slope of `ln y` against `ln n`.
    pub slope: f64,
    /// AIC of `ln y = c + ln n`.
    pub aic_linear: f64,
    /// AIC of `ln y = c + ln(n ln n)`.
    pub aic_nlogn: f64,
}

impl ScalingFit {
    pub fn prefers_nlogn(&self) -> bool {
        self.aic_nlogn < self.aic_linear
    }
}

/// Fits `(n, y)` samples with `y > 0`. Both fixed-exponent models have one
/// free parameter, so their AIC difference is a log ratio of residuals.
pub fn scaling_fit(samples: &[(f64, f64)]) -> Option<ScalingFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|&&(n, y)| n > 1.0 && y > 0.0)
        .map(|&(n, y)| (n.ln(), y.ln()))
        .collect();
    let (_, slope) = linear_fit(&pts)?;
    let aic = |shape: &dyn Fn(f64) -> f64| {
        let k = pts.len() as f64;
        let c = pts.iter().map(|&(ln_n, ln_y)| ln_y - shape(ln_n)).sum::<f64>() / k;
        let rss: f64 = pts.iter().map(|&(ln_n, ln_y)| (ln_y - c - shape(ln_n)).powi(2)).sum();
        k * (rss.max(1e-300) / k).ln() + 2.0
    };
    Some(ScalingFit {
        slope,
        aic_linear: aic(&|ln_n| ln_n),
        aic_nlogn: aic(&|ln_n| ln_n + ln_n.ln()),
    })
}

pub fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    Some(if k % 2 == 1 { xs[k / 2] } else { (xs[k / 2 - 1] + xs[k / 2]) / 2.0 })
}
