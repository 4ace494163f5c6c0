//! Weights on finitely generated groups, the GNR condition, condition (S)
//! and the finite test set `B` for nilpotent groups.
//!
//! Weights are handled through `ln ω`, so the k-th roots `ω(x^k)^{1/k}` are
//! `exp(ln ω(x^k) / k)` and never overflow. Word lengths beyond the ball
//! horizon are carried as intervals: the table gives a lower bound and
//! subadditivity along powers gives an upper bound. Verdicts use the interval
//! ends, so an unresolved sequence yields `inconclusive` rather than a guess.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::rational::{to_f64, Rational};
use crate::linalg::smith::smith_diagonal;
use crate::linalg::RationalMatrix;
use crate::nilgroup::{malcev_lie_algebra, MalcevAlgebra, MatrixGroupDescriptor};
use crate::wordmetric::{BallTable, Element};

/// Tail tolerance on k-th roots.
pub const GNR_TOLERANCE: f64 = 0.05;
/// Number of random pairs used to spot-check submultiplicativity.
pub const SUBMULT_PAIRS: usize = 1000;
const TREND_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    ConstantOne,
    /// `ω = (1 + τ)^s`.
    Polynomial { exponent: f64 },
    /// `ω = b^{|t_idx|}` with `t` the coordinates of the second kind.
    CoordinateExponential { base: f64, index: usize },
    /// Explicit values; elements not listed get `default`.
    Table {
        #[serde(skip)]
        entries: Vec<(RationalMatrix, f64)>,
        default: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    /// Use `max(ω(x), ω(x^{-1}))`.
    pub symmetrize: bool,
}

impl WeightSpec {
    pub fn constant() -> Self {
        Self { kind: WeightKind::ConstantOne, symmetrize: false }
    }

    pub fn polynomial(exponent: f64) -> Self {
        Self { kind: WeightKind::Polynomial { exponent }, symmetrize: false }
    }

    pub fn coordinate_exponential(base: f64, index: usize) -> Self {
        Self { kind: WeightKind::CoordinateExponential { base, index }, symmetrize: false }
    }

    /// Parameter checks independent of any group.
    pub fn check_parameters(&self) -> Result<()> {
        match &self.kind {
            WeightKind::ConstantOne => Ok(()),
            WeightKind::Polynomial { exponent } if exponent.is_finite() && *exponent >= 0.0 => Ok(()),
            WeightKind::Polynomial { exponent } => {
                Err(Error::Domain(format!("polynomial exponent must be >= 0, got {exponent}")))
            }
            WeightKind::CoordinateExponential { base, .. } if base.is_finite() && *base > 1.0 => Ok(()),
            WeightKind::CoordinateExponential { base, .. } => {
                Err(Error::Domain(format!("exponential base must be > 1, got {base}")))
            }
            WeightKind::Table { entries, default } => {
                if *default < 1.0 || entries.iter().any(|(_, v)| !(*v >= 1.0) || !v.is_finite()) {
                    Err(Error::Domain("table weights must be finite and >= 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn needs_tau(&self) -> bool {
        matches!(self.kind, WeightKind::Polynomial { .. })
    }
}

/// Interval `[lo, hi]` for `ln ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct LnBounds {
    lo: f64,
    hi: f64,
}

impl LnBounds {
    fn exact(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    fn max(self, other: Self) -> Self {
        Self { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }
}

/// Evaluation context: the ball table for word lengths and, for coordinate
/// weights, the Malcev algebra.
pub struct WeightContext<'a> {
    pub table: &'a BallTable,
    pub algebra: Option<&'a MalcevAlgebra>,
    table_keys: HashMap<Element, f64>,
}

impl<'a> WeightContext<'a> {
    pub fn new(table: &'a BallTable, algebra: Option<&'a MalcevAlgebra>, w: &WeightSpec) -> Result<Self> {
        w.check_parameters()?;
        let mut table_keys = HashMap::new();
        if let WeightKind::Table { entries, .. } = &w.kind {
            for (m, v) in entries {
                let key = table
                    .key(m)
                    .ok_or_else(|| Error::Domain("table weight entry is not a group element".into()))?;
                table_keys.insert(key, v.ln());
            }
        }
        if let WeightKind::CoordinateExponential { index, .. } = w.kind {
            let a = algebra.ok_or_else(|| {
                Error::Unsupported("coordinate weights need a unitriangular group".into())
            })?;
            if index >= a.dim() {
                return Err(Error::Domain(format!("coordinate index {index} out of range 0..{}", a.dim())));
            }
        }
        Ok(Self { table, algebra, table_keys })
    }

    fn tau_bounds(&self, x: &Element) -> (u32, Option<u32>) {
        match self.table.lookup(x) {
            Some(t) => (t, Some(t)),
            None => (self.table.max_radius() as u32 + 1, None),
        }
    }

    fn raw(&self, w: &WeightSpec, x: &Element, tau_hi: Option<u32>) -> Result<LnBounds> {
        Ok(match &w.kind {
            WeightKind::ConstantOne => LnBounds::exact(0.0),
            WeightKind::Polynomial { exponent } => {
                let (lo, hi) = self.tau_bounds(x);
                let hi = hi.or(tau_hi);
                LnBounds {
                    lo: exponent * (1.0 + lo as f64).ln(),
                    hi: hi.map_or(f64::INFINITY, |h| exponent * (1.0 + h as f64).ln()),
                }
            }
            WeightKind::CoordinateExponential { base, index } => {
                let a = self.algebra.expect("checked at construction");
                let m = x.to_matrix(self.table.ambient_size());
                let t = a.second_kind_from_log(&a.log_coordinates(&m)?)?;
                LnBounds::exact(to_f64(&t[*index].abs()) * base.ln())
            }
            WeightKind::Table { default, .. } => {
                LnBounds::exact(self.table_keys.get(x).copied().unwrap_or_else(|| default.ln()))
            }
        })
    }

    fn ln_weight(&self, w: &WeightSpec, x: &Element, tau_hi: Option<u32>) -> Result<LnBounds> {
        let v = self.raw(w, x, tau_hi)?;
        if !w.symmetrize {
            return Ok(v);
        }
        let inv = self
            .table
            .inverse(x)
            .ok_or_else(|| Error::Capacity("overflow inverting element".into()))?;
        Ok(v.max(self.raw(w, &inv, tau_hi)?))
    }

    /// `ω(x)`, or an error when the value is only bounded.
    pub fn weight(&self, w: &WeightSpec, x: &RationalMatrix) -> Result<f64> {
        let key = self.table.key(x).ok_or_else(|| Error::Domain("not a group element".into()))?;
        let b = self.ln_weight(w, &key, None)?;
        if b.lo == b.hi {
            Ok(b.lo.exp())
        } else {
            Err(Error::Domain("element lies beyond the ball horizon".into()))
        }
    }

    /// Checks `ω >= 1`, symmetry and submultiplicativity on random pairs from
    /// `V^{R/2}`, so that all products stay inside the table.
    pub fn validate(&self, w: &WeightSpec, seed: u64) -> Result<()> {
        let half = self.table.ball_range(self.table.max_radius() / 2).end;
        let all = self.table.len();
        for i in 0..all {
            let (x, _) = self.table.entry(i);
            let v = self.ln_weight(w, x, None)?;
            if v.lo < -1e-12 {
                return Err(Error::InvariantViolation(format!("weight below 1 at table position {i}")));
            }
            if i < half {
                let inv = self.table.inverse(x).ok_or_else(|| Error::Capacity("overflow".into()))?;
                let vi = self.ln_weight(w, &inv, None)?;
                if (v.lo - vi.lo).abs() > 1e-9 * (1.0 + v.lo.abs()) {
                    return Err(Error::InvariantViolation(format!(
                        "weight is not symmetric at table position {i}"
                    )));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SUBMULT_PAIRS {
            let (i, j) = (rng.gen_range(0..half), rng.gen_range(0..half));
            let (x, _) = self.table.entry(i);
            let (y, _) = self.table.entry(j);
            let xy = self.table.mul(x, y).ok_or_else(|| Error::Capacity("overflow".into()))?;
            let lhs = self.ln_weight(w, &xy, None)?.lo;
            let rhs = self.ln_weight(w, x, None)?.lo + self.ln_weight(w, y, None)?.lo;
            if lhs > rhs + 1e-9 * (1.0 + rhs.abs()) {
                return Err(Error::InvariantViolation(format!(
                    "weight is not submultiplicative on table positions ({i}, {j})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Passes,
    Fails,
    Inconclusive,
}

/// A sequence of k-th roots with certified lower and upper ends.
#[derive(Clone, Debug, Serialize)]
pub struct GnrVerdict {
    /// `k = 1, 2, ...`.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Least-squares slope of the upper (resp. lower) sequence over the tail.
    pub upper_trend: f64,
    pub lower_trend: f64,
    pub tail_from: usize,
    pub verdict: Verdict,
    pub tolerance: f64,
}

fn slope(ks: &[f64], vs: &[f64]) -> f64 {
    let n = ks.len() as f64;
    let mk = ks.iter().sum::<f64>() / n;
    let mv = vs.iter().sum::<f64>() / n;
    let skk: f64 = ks.iter().map(|k| (k - mk).powi(2)).sum();
    let skv: f64 = ks.iter().zip(vs).map(|(k, v)| (k - mk) * (v - mv)).sum();
    if skk == 0.0 || !skv.is_finite() {
        if vs.iter().all(|v| v.is_finite()) {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        skv / skk
    }
}

/// Verdict on a sequence `s_k`, `k = 1..=K`, given as `ln` bounds of `s_k^k`.
fn verdict_from(ln_bounds: &[LnBounds]) -> GnrVerdict {
    let lower: Vec<f64> = ln_bounds.iter().enumerate().map(|(i, b)| (b.lo / (i + 1) as f64).exp()).collect();
    let upper: Vec<f64> = ln_bounds.iter().enumerate().map(|(i, b)| (b.hi / (i + 1) as f64).exp()).collect();
    let k_max = ln_bounds.len();
    let tail_from = (k_max / 2).max(1);
    let ks: Vec<f64> = (tail_from..=k_max).map(|k| k as f64).collect();
    let upper_trend = slope(&ks, &upper[tail_from - 1..]);
    let lower_trend = slope(&ks, &lower[tail_from - 1..]);
    let cut = 1.0 + GNR_TOLERANCE;
    let verdict = if upper[k_max - 1] <= cut && upper_trend <= TREND_EPS {
        Verdict::Passes
    } else if lower[k_max - 1] > cut && lower_trend >= -TREND_EPS {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    GnrVerdict { lower, upper, upper_trend, lower_trend, tail_from, verdict, tolerance: GNR_TOLERANCE }
}

/// GNR condition at `x`: the trend of `ω(x^k)^{1/k}` for `k = 1..=k_max`.
pub fn gnr_at(x: &RationalMatrix, w: &WeightSpec, ctx: &WeightContext<'_>, k_max: usize) -> Result<GnrVerdict> {
    if k_max < 2 {
        return Err(Error::Domain("k_max must be at least 2".into()));
    }
    let t = ctx.table;
    let key = t.key(x).ok_or_else(|| Error::Domain("not a group element".into()))?;
    // upper[k]: certified upper bound for τ(x^k), by subadditivity
    let mut tau_hi: Vec<Option<u32>> = vec![Some(0)];
    let mut power = t.identity();
    let mut bounds = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        power = t.mul(&power, &key).ok_or_else(|| Error::Capacity("overflow forming powers".into()))?;
        let hi = if w.needs_tau() {
            let exact = t.lookup(&power);
            let split = (1..=k / 2)
                .filter_map(|j| Some(tau_hi[j]? + tau_hi[k - j]?))
                .min();
            match (exact, split) {
                (Some(e), _) => Some(e),
                (None, s) => s,
            }
        } else {
            None
        };
        tau_hi.push(hi);
        bounds.push(ctx.ln_weight(w, &power, hi)?);
    }
    Ok(verdict_from(&bounds))
}

/// Condition (S): the trend of `(max_{x ∈ V^k} ω(x))^{1/k}`. Inside the
/// horizon the maximum is read from the table. For polynomial weights on an
/// infinite group the spheres are nonempty, so the maximum is `(1 + k)^s`
/// exactly and the sequence is extended to `k_max` in closed form.
pub fn condition_s(w: &WeightSpec, ctx: &WeightContext<'_>, infinite: bool, k_max: usize) -> Result<GnrVerdict> {
    let t = ctx.table;
    let r = t.max_radius();
    if r < 2 {
        return Err(Error::Domain("condition (S) needs a ball table of radius at least 2".into()));
    }
    let mut running = LnBounds::exact(0.0);
    let mut bounds = Vec::new();
    let mut idx = t.ball_range(0).end;
    for k in 1..=r {
        let end = t.ball_range(k).end;
        while idx < end {
            running = running.max(ctx.ln_weight(w, t.entry(idx).0, None)?);
            idx += 1;
        }
        bounds.push(running);
    }
    if let (WeightKind::Polynomial { exponent }, true) = (&w.kind, infinite) {
        for k in r + 1..=k_max.max(r) {
            bounds.push(LnBounds::exact(exponent * (1.0 + k as f64).ln()));
        }
    }
    Ok(verdict_from(&bounds))
}

/// `B = B_0 ∪ B_1` for a unitriangular group, where both sets generate
/// `G / H_1`: a subset of the generators whose layer-0 images generate the
/// same lattice as all generators.
pub fn build_b(g: &MatrixGroupDescriptor, a: &MalcevAlgebra) -> Result<Vec<(String, RationalMatrix)>> {
    if !g.certified_unitriangular {
        return Err(Error::Unsupported(format!("group {:?} is not certified nilpotent", g.label)));
    }
    let layer0: Vec<usize> = (0..a.dim()).filter(|&i| a.layer_of[i] == 0).collect();
    let images: Vec<Vec<Rational>> = g
        .generators
        .iter()
        .map(|x| Ok(a.log_coordinates(x)?.into_iter().enumerate().filter(|(i, _)| layer0.contains(i)).map(|p| p.1).collect()))
        .collect::<Result<_>>()?;
    let full = lattice_invariant(&images, layer0.len());
    let mut kept: Vec<usize> = (0..images.len()).filter(|&i| images[i].iter().any(|c| !c.is_zero())).collect();
    let mut i = 0;
    while i < kept.len() {
        let trial: Vec<Vec<Rational>> =
            kept.iter().filter(|&&k| k != kept[i]).map(|&k| images[k].clone()).collect();
        if lattice_invariant(&trial, layer0.len()) == full {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(kept.into_iter().map(|k| (g.generator_labels[k].clone(), g.generators[k].clone())).collect())
}

/// Rank and covolume of the lattice spanned by rational vectors, which
/// together decide equality of nested lattices.
fn lattice_invariant(vectors: &[Vec<Rational>], dim: usize) -> (usize, Rational) {
    let denom = vectors
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|q| (q * Rational::from_integer(denom.clone())).to_integer()).collect())
        .collect();
    let diag = smith_diagonal(&rows, dim);
    let nonzero: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    let rank = nonzero.len();
    let covolume = nonzero.iter().fold(BigInt::one(), |acc, d| acc * d.abs());
    // undo the scaling by `denom`, which multiplied the covolume by denom^rank
    (rank, Rational::new(covolume, num_traits::pow(denom, rank)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub label: String,
    pub weight: WeightSpec,
    /// `build_b` for unitriangular groups, otherwise all generators.
    pub b_source: String,
    pub b: Vec<String>,
    pub gnr: Vec<GnrVerdict>,
    pub gnr_combined: Verdict,
    pub condition_s: GnrVerdict,
    pub agreement: Agreement,
    pub k_max: usize,
}

impl ConsistencyReport {
    pub fn agrees(&self) -> bool {
        self.agreement == Agreement::Agree
    }
}

fn combine(vs: &[Verdict]) -> Verdict {
    if vs.contains(&Verdict::Fails) {
        Verdict::Fails
    } else if vs.iter().all(|v| *v == Verdict::Passes) {
        Verdict::Passes
    } else {
        Verdict::Inconclusive
    }
}

/// GNR on `B` against condition (S); a conclusive mismatch is reported as
/// [`Agreement::Disagree`].
pub fn theorem_4_2_consistency(
    g: &MatrixGroupDescriptor,
    w: &WeightSpec,
    t: &BallTable,
    k_max: usize,
) -> Result<ConsistencyReport> {
    let algebra = if g.certified_unitriangular { Some(malcev_lie_algebra(g)?) } else { None };
    let ctx = WeightContext::new(t, algebra.as_ref(), w)?;
    let (b_source, b) = match &algebra {
        Some(a) => ("adapted".to_string(), build_b(g, a)?),
        None => (
            "generators".to_string(),
            g.generator_labels.iter().cloned().zip(g.generators.iter().cloned()).collect(),
        ),
    };
    let infinite = g.generators.iter().map(crate::linalg::has_finite_order).collect::<Result<Vec<_>>>()?.contains(&false);
    let gnr: Vec<GnrVerdict> = b.iter().map(|(_, x)| gnr_at(x, w, &ctx, k_max)).collect::<Result<_>>()?;
    let gnr_combined = combine(&gnr.iter().map(|v| v.verdict).collect::<Vec<_>>());
    let s = condition_s(w, &ctx, infinite, k_max)?;
    let agreement = match (gnr_combined, s.verdict) {
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Agreement::Inconclusive,
        (a, b) if a == b => Agreement::Agree,
        _ => Agreement::Disagree,
    };
    Ok(ConsistencyReport {
        label: g.label.clone(),
        weight: w.clone(),
        b_source,
        b: b.into_iter().map(|p| p.0).collect(),
        gnr,
        gnr_combined,
        condition_s: s,
        agreement,
        k_max,
    })
}
