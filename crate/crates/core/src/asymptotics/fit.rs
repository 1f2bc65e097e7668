use serde::Serialize;

use super::envelope::Scale;
use crate::error::{Error, Result};

/// One observation `(t, log value, stderr)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

/// Weighted least-squares line `value ~ slope * scale(t) + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleFit {
    pub scale: Scale,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// Weighted residual sum of squares.
    pub residual: f64,
    pub fitted: Vec<f64>,
}

impl ScaleFit {
    /// CSV rows `t,observed,fitted`.
    pub fn plot_csv(&self, series: &[SeriesPoint]) -> String {
        let mut s = String::from("t,observed,fitted\n");
        for (p, f) in series.iter().zip(&self.fitted) {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", p.t, p.value, f));
        }
        s
    }
}

/// Fits the series against `scale`. All stderrs zero means unweighted;
/// otherwise every stderr must be positive.
pub fn fit_scale(series: &[SeriesPoint], scale: Scale) -> Result<ScaleFit> {
    if series.len() < 4 {
        return Err(Error::arg(format!(
            "need at least 4 points, got {}",
            series.len()
        )));
    }
    if series.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::arg("t must be strictly increasing"));
    }
    let zeros = series.iter().filter(|p| p.stderr == 0.0).count();
    let weighted = zeros == 0;
    if !weighted && zeros != series.len() {
        return Err(Error::arg("stderr must be all zero or all positive"));
    }
    if series
        .iter()
        .any(|p| !(p.stderr >= 0.0 && p.value.is_finite()))
    {
        return Err(Error::arg("non-finite value or negative stderr"));
    }
    let xs: Vec<f64> = series.iter().map(|p| scale.eval(p.t)).collect();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::arg("scale undefined at some t"));
    }
    let ws: Vec<f64> = series
        .iter()
        .map(|p| if weighted { p.stderr.powi(-2) } else { 1.0 })
        .collect();
    let sw: f64 = ws.iter().sum();
    let mx = xs.iter().zip(&ws).map(|(x, w)| w * x).sum::<f64>() / sw;
    let my = series
        .iter()
        .zip(&ws)
        .map(|(p, w)| w * p.value)
        .sum::<f64>()
        / sw;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(series)
        .zip(&ws)
        .map(|((x, p), w)| w * (x - mx) * (p.value - my))
        .sum();
    let spread = xs.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if !(sxx > 1e-12 * sw * spread * spread) {
        return Err(Error::NonConvergence {
            method: "scale fit",
            detail: "singular design".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fitted: Vec<f64> = xs.iter().map(|x| slope * x + intercept).collect();
    let residual: f64 = series
        .iter()
        .zip(&fitted)
        .zip(&ws)
        .map(|((p, f), w)| w * (p.value - f).powi(2))
        .sum();
    let slope_stderr = if weighted {
        sxx.recip().sqrt()
    } else {
        (residual / (series.len() - 2) as f64 / sxx).sqrt()
    };
    Ok(ScaleFit {
        scale,
        slope,
        slope_stderr,
        intercept,
        residual,
        fitted,
    })
}
