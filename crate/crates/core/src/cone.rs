//! Asymptotic-cone experiments: rescaled powers, the graded group law as a
//! limit of dilated BCH products, and normalized ball clouds.
//!
//! Limits are taken along explicit increasing sequences of scales.

use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{bch, dilate, graded_algebra, quasi_norm, ConeVector, GradedDecomposition, LieAlgebraQ};
use crate::linalg::rational::{to_f64, Rational};
use crate::linalg::RationalMatrix;
use crate::nilgroup::MalcevAlgebra;
use crate::wordmetric::BallTable;

/// Default cap on the number of points kept in a cloud.
pub const CLOUD_CAP: usize = 50_000;
/// Relative increase tolerated between consecutive graded-limit errors.
pub const MONOTONE_SLACK: f64 = 0.10;

/// `δ_{1/n}(log(x^n))`, exact.
pub fn cone_point(x: &RationalMatrix, n: u64, a: &MalcevAlgebra, d: &GradedDecomposition) -> Result<ConeVector> {
    if n == 0 {
        return Err(Error::Domain("scale must be positive".into()));
    }
    let log = a.log_coordinates(&x.pow(n)?)?;
    dilate(&Rational::new(1.into(), n.into()), &ConeVector::Exact(log), d)
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedLimitReport {
    pub n_list: Vec<u64>,
    /// Exact errors, rendered as `p/q`.
    pub errors_exact: Vec<String>,
    pub errors: Vec<f64>,
    pub nonincreasing: bool,
    /// `errors.last() <= errors[0] / 4`; only required when the scales span a factor of 10.
    pub contracts: bool,
    pub passes: bool,
    pub slack: f64,
}

fn max_abs_diff(x: &[Rational], y: &[Rational]) -> Rational {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero)
}

/// Distance from `δ_{1/n} bch(δ_n X, δ_n Y)` to the graded product
/// `bch^∞(X, Y)` for each `n`, in the max-abs coefficient norm.
pub fn graded_limit_check(
    x: &[Rational],
    y: &[Rational],
    l: &LieAlgebraQ,
    d: &GradedDecomposition,
    n_list: &[u64],
) -> Result<GradedLimitReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::Domain("scales must be positive and strictly increasing".into()));
    }
    if x.len() != l.dim() || y.len() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: x.len().min(y.len()) });
    }
    let graded = graded_algebra(l, d)?;
    let target = bch(&graded, x, y)?;
    let cx = ConeVector::Exact(x.to_vec());
    let cy = ConeVector::Exact(y.to_vec());
    let mut exact = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let up = Rational::from_integer(n.into());
        let xs = dilate(&up, &cx, d)?;
        let ys = dilate(&up, &cy, d)?;
        let z = bch(l, xs.exact().expect("exact"), ys.exact().expect("exact"))?;
        let back = dilate(&up.recip(), &ConeVector::Exact(z), d)?;
        exact.push(max_abs_diff(back.exact().expect("exact"), &target));
    }
    let errors: Vec<f64> = exact.iter().map(to_f64).collect();
    let nonincreasing = errors.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
    let first = &exact[0];
    let last = exact.last().expect("nonempty");
    let contracts = if first.is_zero() { last.is_zero() } else { last * Rational::from_integer(4.into()) <= *first };
    let spans_decade = *n_list.last().expect("nonempty") >= 10 * n_list[0];
    Ok(GradedLimitReport {
        n_list: n_list.to_vec(),
        errors_exact: exact.iter().map(|q| q.to_string()).collect(),
        errors,
        nonincreasing,
        contracts,
        passes: nonincreasing && (!spans_decade || contracts),
        slack: MONOTONE_SLACK,
    })
}

/// `δ_{1/n}(log x)` for the elements `x` of a ball.
#[derive(Clone, Debug, Serialize)]
pub struct CloudSnapshot {
    pub radius: usize,
    pub labels: Vec<String>,
    pub points: Vec<Vec<f64>>,
    /// `|V^n|` before any subsampling.
    pub ball_size: usize,
    pub subsampled: bool,
    pub cap: usize,
    pub seed: u64,
    /// Largest `φ(log x) / τ(x)` over the ball.
    pub c2: f64,
    /// Largest quasi-norm of a cloud point.
    pub max_quasi_norm: f64,
}

impl CloudSnapshot {
    pub fn to_csv(&self) -> String {
        let mut out = self.labels.join(",");
        out.push('\n');
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|c| format!("{c:.9}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Normalized ball cloud `δ_{1/n}(log V^n)` with the default cap.
pub fn ball_cloud(t: &BallTable, n: usize, a: &MalcevAlgebra, seed: u64) -> Result<CloudSnapshot> {
    ball_cloud_capped(t, n, a, seed, CLOUD_CAP)
}

/// As [`ball_cloud`], keeping a uniform seeded subsample of at most `cap` points.
pub fn ball_cloud_capped(
    t: &BallTable,
    n: usize,
    a: &MalcevAlgebra,
    seed: u64,
    cap: usize,
) -> Result<CloudSnapshot> {
    if n == 0 || n > t.max_radius() {
        return Err(Error::Domain(format!("cloud radius {n} outside 1..={}", t.max_radius())));
    }
    if cap == 0 {
        return Err(Error::Domain("empty cloud".into()));
    }
    let size = t.ball_range(n).end;
    let mut chosen: Vec<usize> = (0..size).collect();
    let subsampled = size > cap;
    if subsampled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        chosen = sample(&mut rng, size, cap).into_vec();
        chosen.sort_unstable();
    }
    let scale = Rational::new(1.into(), (n as u64).into());
    let d = &a.grading;
    let rows: Vec<(Vec<f64>, f64, f64)> = chosen
        .par_iter()
        .map(|&i| {
            let log = ConeVector::Exact(a.log_coordinates(&t.matrix(i))?);
            let phi = quasi_norm(&log, d);
            let tau = t.entry(i).1;
            let point = dilate(&scale, &log, d)?;
            let ratio = if tau == 0 { 0.0 } else { phi / tau as f64 };
            Ok((point.to_f64(), ratio, quasi_norm(&point, d)))
        })
        .collect::<Result<_>>()?;
    let c2 = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_quasi_norm = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(CloudSnapshot {
        radius: n,
        labels: a.labels().to_vec(),
        points: rows.into_iter().map(|r| r.0).collect(),
        ball_size: size,
        subsampled,
        cap,
        seed,
        c2,
        max_quasi_norm,
    })
}

fn linf(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn directed(from: &[Vec<f64>], to: &[Vec<f64>]) -> f64 {
    from.par_iter()
        .map(|p| to.iter().map(|q| linf(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two clouds in the max-abs coordinate norm.
pub fn cloud_distance(s1: &CloudSnapshot, s2: &CloudSnapshot) -> Result<f64> {
    if s1.points.is_empty() || s2.points.is_empty() {
        return Err(Error::Domain("empty cloud".into()));
    }
    if s1.labels.len() != s2.labels.len() {
        return Err(Error::DimensionMismatch { expected: s1.labels.len(), found: s2.labels.len() });
    }
    Ok(directed(&s1.points, &s2.points).max(directed(&s2.points, &s1.points)))
}

/// Pairwise distances as CSV with a header row of radii.
pub fn distance_matrix_csv(clouds: &[CloudSnapshot]) -> Result<String> {
    let mut out = String::from("radius");
    for c in clouds {
        write!(out, ",{}", c.radius).expect("string write");
    }
    out.push('\n');
    for a in clouds {
        write!(out, "{}", a.radius).expect("string write");
        for b in clouds {
            write!(out, ",{:.9}", cloud_distance(a, b)?).expect("string write");
        }
        out.push('\n');
    }
    Ok(out)
}
