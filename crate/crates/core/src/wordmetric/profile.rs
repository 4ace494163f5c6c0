use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{fit_loglog_slope, BallTable};
use crate::error::{Error, Result};
use crate::linalg::rational::{to_f64, Rational};
use crate::nilgroup::MalcevAlgebra;

/// Slack allowed above the layer bound `i` on a fitted coordinate exponent.
pub const PROFILE_SLACK: f64 = 0.2;

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateSeries {
    pub label: String,
    /// 0-based LCS layer of the basis vector.
    pub layer: usize,
    /// `max |t_j(x)|` over `x ∈ V^k`, for `k = 0..=R`.
    pub max_abs: Vec<f64>,
    pub fitted_exponent: Option<f64>,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateProfile {
    pub label: String,
    pub max_radius: usize,
    pub series: Vec<CoordinateSeries>,
}

impl CoordinateProfile {
    pub fn all_within_bound(&self) -> bool {
        self.series.iter().all(|s| s.within_bound)
    }
}

/// Growth of the coordinates of the second kind over the balls: for each
/// adapted basis vector the running maximum of `|t_j|` on `V^k`, with the
/// log-log slope fitted over `k ∈ [R/2, R]`.
pub fn coordinate_growth_profile(t: &BallTable, a: &MalcevAlgebra) -> Result<CoordinateProfile> {
    if t.ambient_size() != a.ambient_size {
        return Err(Error::DimensionMismatch { expected: a.ambient_size, found: t.ambient_size() });
    }
    let coords: Vec<Vec<Rational>> = (0..t.len())
        .into_par_iter()
        .map(|i| {
            let x = t.matrix(i);
            let log = a.log_coordinates(&x)?;
            Ok(a.second_kind_from_log(&log)?.into_iter().map(|c| c.abs()).collect())
        })
        .collect::<Result<_>>()?;
    let r = t.max_radius();
    let m = a.dim();
    let mut running = vec![Rational::zero(); m];
    let mut table = vec![vec![0.0; r + 1]; m];
    let mut idx = 0;
    for k in 0..=r {
        let end = t.ball_range(k).end;
        while idx < end {
            for (best, c) in running.iter_mut().zip(&coords[idx]) {
                if c > best {
                    *best = c.clone();
                }
            }
            idx += 1;
        }
        for j in 0..m {
            table[j][k] = to_f64(&running[j]);
        }
    }
    let lo = r.div_ceil(2).max(1);
    let series = table
        .into_iter()
        .enumerate()
        .map(|(j, max_abs)| {
            let points: Vec<(f64, f64)> =
                (lo..=r).filter(|&k| max_abs[k] > 0.0).map(|k| (k as f64, max_abs[k])).collect();
            let fitted_exponent = if points.len() >= 2 { fit_loglog_slope(&points) } else { None };
            let layer = a.layer_of[j];
            let bound = (layer + 1) as f64 + PROFILE_SLACK;
            CoordinateSeries {
                label: a.labels()[j].clone(),
                layer,
                within_bound: fitted_exponent.map_or(true, |e| e <= bound),
                fitted_exponent,
                bound,
                max_abs,
            }
        })
        .collect();
    Ok(CoordinateProfile { label: t.label().to_string(), max_radius: r, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilgroup::{free_abelian, heisenberg, malcev_lie_algebra};
    use crate::wordmetric::balls;

    #[test]
    fn z2_linear() {
        let g = free_abelian(2);
        let a = malcev_lie_algebra(&g).unwrap();
        let p = coordinate_growth_profile(&balls(&g, 12).unwrap(), &a).unwrap();
        for s in &p.series {
            assert_eq!(s.max_abs[12], 12.0);
            assert!((s.fitted_exponent.unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(p.all_within_bound());
    }

    #[test]
    fn heisenberg_layers() {
        let g = heisenberg();
        let a = malcev_lie_algebra(&g).unwrap();
        let p = coordinate_growth_profile(&balls(&g, 12).unwrap(), &a).unwrap();
        for s in &p.series {
            let e = s.fitted_exponent.unwrap();
            let expected = (s.layer + 1) as f64;
            assert!((e - expected).abs() < 0.25, "{}: {e}", s.label);
        }
        assert!(p.all_within_bound());
    }
}
