use std::collections::HashMap;

use serde::Serialize;

use super::{fit_loglog_slope, BallTable, Element, Tau};
use crate::error::{Error, Result};
use crate::linalg::{has_finite_order, RationalMatrix};

/// Distance allowed between a fitted exponent and `1/j` for a match.
pub const GAMMA_TOLERANCE: f64 = 0.15;
pub const MIN_K_MAX: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaVerdict {
    /// Slope fitted from exact word lengths.
    Estimated,
    /// `x` has finite order, so `τ(x^k)` is bounded and the exponent is 0.
    FiniteOrder,
    /// Some `τ(x^k)` in the fitting range could not be resolved.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaEstimate {
    pub verdict: GammaVerdict,
    pub exponent: Option<f64>,
    /// `j` with `|exponent - 1/j| <= tolerance`; `Some(0)` for exponent 0.
    pub matched_j: Option<u32>,
    pub k_min: u64,
    pub k_max: u64,
    /// `(k, τ(x^k))` over the fitting range.
    pub taus: Vec<(u64, Tau)>,
    pub tolerance: f64,
}

/// Nearest candidate in `{0} ∪ {1/j : 1 <= j <= 64}`, if within `tolerance`.
pub fn match_reciprocal(exponent: f64, tolerance: f64) -> Option<u32> {
    let candidate = |j: u32| if j == 0 { 0.0 } else { 1.0 / j as f64 };
    let best = (0..=64u32)
        .min_by(|&a, &b| {
            (exponent - candidate(a)).abs().total_cmp(&(exponent - candidate(b)).abs())
        })
        .expect("nonempty range");
    ((exponent - candidate(best)).abs() <= tolerance).then_some(best)
}

/// Local growth `lim log τ(x^k) / log k`, estimated by the least-squares slope
/// of `log τ(x^k)` against `log k` for `k` in `[k_max/2, k_max]`.
pub fn gamma_estimate(
    x: &RationalMatrix,
    t: &BallTable,
    k_max: u64,
    search_budget: usize,
) -> Result<GammaEstimate> {
    if k_max < MIN_K_MAX {
        return Err(Error::Domain(format!("k_max must be at least {MIN_K_MAX}, got {k_max}")));
    }
    let key = t
        .key(x)
        .ok_or_else(|| Error::Domain("element does not belong to the table's group".into()))?;
    let k_min = k_max / 2;
    let mut out = GammaEstimate {
        verdict: GammaVerdict::Inconclusive,
        exponent: None,
        matched_j: None,
        k_min,
        k_max,
        taus: Vec::new(),
        tolerance: GAMMA_TOLERANCE,
    };
    let finite = has_finite_order(x)?;
    let mut power = t
        .power(&key, k_min)
        .ok_or_else(|| Error::Capacity("overflow while forming powers".into()))?;
    let mut points = Vec::new();
    for k in k_min..=k_max {
        let tau = t.tau_search(&power, search_budget);
        out.taus.push((k, tau));
        if let Tau::Exact(v) = tau {
            points.push((k as f64, v as f64));
        }
        if k < k_max {
            power = t.mul(&power, &key).ok_or_else(|| Error::Capacity("overflow while forming powers".into()))?;
        }
    }
    if finite {
        // the powers cycle through finitely many elements, so τ(x^k) is bounded
        out.verdict = GammaVerdict::FiniteOrder;
        out.exponent = Some(0.0);
        out.matched_j = Some(0);
        return Ok(out);
    }
    if points.len() != out.taus.len() {
        return Ok(out);
    }
    let slope = fit_loglog_slope(&points)
        .ok_or_else(|| Error::Internal("degenerate fitting range".into()))?;
    out.verdict = GammaVerdict::Estimated;
    out.exponent = Some(slope);
    out.matched_j = match_reciprocal(slope, GAMMA_TOLERANCE);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConjGrowth {
    pub n: usize,
    /// `sup τ(y x y^{-1})` over `τ(y) <= n`; a lower bound when some conjugate
    /// could not be resolved.
    pub value: Tau,
    pub distinct_conjugates: usize,
}

/// `‖x‖_n` for `n = 0..=n_max`.
pub fn conj_growth_sequence(
    x: &RationalMatrix,
    n_max: usize,
    t: &BallTable,
    search_budget: usize,
) -> Result<Vec<ConjGrowth>> {
    if n_max > t.max_radius() {
        return Err(Error::Domain(format!(
            "conjugator radius {n_max} exceeds the table horizon {}",
            t.max_radius()
        )));
    }
    let key = t
        .key(x)
        .ok_or_else(|| Error::Domain("element does not belong to the table's group".into()))?;
    let mut memo: HashMap<Element, Tau> = HashMap::new();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut best: u32 = 0;
    let mut exact = true;
    let mut idx = 0;
    for n in 0..=n_max {
        let end = t.ball_range(n).end;
        while idx < end {
            let (y, _) = t.entry(idx);
            let yinv = t.inverse(y).ok_or_else(|| Error::Capacity("overflow inverting".into()))?;
            let c = t
                .mul(y, &key)
                .and_then(|yx| t.mul(&yx, &yinv))
                .ok_or_else(|| Error::Capacity("overflow conjugating".into()))?;
            let tau = *memo.entry(c).or_insert_with_key(|c| t.tau_search(c, search_budget));
            match tau {
                Tau::Exact(v) => best = best.max(v),
                Tau::AtLeast(v) => {
                    best = best.max(v);
                    exact = false;
                }
            }
            idx += 1;
        }
        out.push(ConjGrowth {
            n,
            value: if exact { Tau::Exact(best) } else { Tau::AtLeast(best) },
            distinct_conjugates: memo.len(),
        });
    }
    Ok(out)
}

/// Conjugacy operator growth `‖x‖_n = sup{τ(y x y^{-1}) : τ(y) <= n}`.
pub fn conj_growth(x: &RationalMatrix, n: usize, t: &BallTable, search_budget: usize) -> Result<ConjGrowth> {
    Ok(*conj_growth_sequence(x, n, t, search_budget)?.last().expect("nonempty sequence"))
}
