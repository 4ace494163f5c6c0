use rayon::prelude::*;
use serde::Serialize;

use super::{doubling_classifier, BallTable, Classification, DoublingReport};
use crate::error::Result;
use crate::liealg::{quasi_norm, ConeVector};
use crate::nilgroup::{GroupGrowth, MalcevAlgebra};

/// Least-squares slope of `ln y` against `ln x`; `None` for fewer than two
/// distinct abscissae or nonpositive data.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Range of a family of positive ratios.
#[derive(Clone, Debug, Serialize)]
pub struct RatioWindow {
    pub min: f64,
    pub max: f64,
    /// `max / min`.
    pub spread: f64,
    /// Radii (inclusive) over which the window was taken.
    pub from: usize,
    pub to: usize,
}

impl RatioWindow {
    fn from_values(values: impl IntoIterator<Item = f64>, from: usize, to: usize) -> Self {
        let (min, max) =
            values.into_iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        RatioWindow { min, max, spread: max / min, from, to }
    }
}

/// Window of `|V^n| / n^d` over `n ∈ [ceil(R/3), R]`, `n >= 1`.
pub fn sandwich_window(sizes: &[usize], d: u64) -> RatioWindow {
    let r = sizes.len().saturating_sub(1);
    let from = r.div_ceil(3).max(1);
    RatioWindow::from_values(
        (from..=r).map(|n| sizes[n] as f64 / (n as f64).powi(d as i32)),
        from,
        r,
    )
}

/// Window of `τ(x) / φ(log x)` over the nonidentity elements of the table,
/// with `φ` the homogeneous quasi-norm of the LCS grading.
pub fn quasi_norm_window(t: &BallTable, a: &MalcevAlgebra) -> Result<RatioWindow> {
    let ratios: Vec<f64> = (1..t.len())
        .into_par_iter()
        .map(|i| {
            let log = a.log_coordinates(&t.matrix(i))?;
            let phi = quasi_norm(&ConeVector::Exact(log), &a.grading);
            Ok(t.entry(i).1 as f64 / phi)
        })
        .collect::<Result<_>>()?;
    Ok(RatioWindow::from_values(ratios, 1, t.max_radius()))
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub label: String,
    pub degree_algebraic: Option<u64>,
    pub rank: Option<usize>,
    pub lcs_dims: Option<Vec<usize>>,
    pub layer_ranks: Option<Vec<usize>>,
    pub sizes: Vec<usize>,
    /// Slope of `ln |V^n|` against `ln n` over `n ∈ [R/2, R]`.
    pub fitted_exponent: Option<f64>,
    pub classification: Classification,
    pub doubling: DoublingReport,
    pub sandwich: Option<RatioWindow>,
    pub notes: Vec<String>,
}

/// Growth report from a ball census, with the algebraic degree when known.
pub fn growth_report(t: &BallTable, algebraic: Option<&GroupGrowth>) -> GrowthReport {
    let sizes = t.sizes().to_vec();
    let r = t.max_radius();
    let lo = r.div_ceil(2).max(1);
    let points: Vec<(f64, f64)> = (lo..=r).map(|n| (n as f64, sizes[n] as f64)).collect();
    let fitted_exponent = if points.len() >= 2 { fit_loglog_slope(&points) } else { None };
    let doubling = doubling_classifier(&sizes);
    let mut notes = vec![
        "volume is cardinality of the ball".to_string(),
        "V is the symmetrized generating set with the identity".to_string(),
    ];
    if algebraic.is_none() {
        notes.push("algebraic degree unavailable for this descriptor".to_string());
    }
    if let (Some(g), Classification::Polynomial { degree }) = (algebraic, doubling.classification) {
        if u64::from(degree) != g.degree {
            notes.push(format!(
                "doubling estimate {degree} differs from algebraic degree {} at radius {r}",
                g.degree
            ));
        }
    }
    GrowthReport {
        label: t.label().to_string(),
        degree_algebraic: algebraic.map(|g| g.degree),
        rank: algebraic.map(|g| g.rank),
        lcs_dims: algebraic.map(|g| g.lcs_dims.clone()),
        layer_ranks: algebraic.map(|g| g.layer_ranks.clone()),
        sandwich: algebraic.filter(|_| r >= 3).map(|g| sandwich_window(&sizes, g.degree)),
        classification: doubling.classification,
        doubling,
        fitted_exponent,
        sizes,
        notes,
    }
}
