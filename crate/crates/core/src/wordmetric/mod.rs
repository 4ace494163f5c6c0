//! Word metrics on finitely generated matrix groups: exact ball enumeration,
//! word length, local growth, conjugacy operator growth and growth
//! classification.
//!
//! The generating neighbourhood is `V = S ∪ S^{-1} ∪ {e}` for the
//! descriptor's generator list `S`, and the volume of a ball is its
//! cardinality.

mod classify;
mod element;
mod gamma;
mod profile;
mod report;

pub use classify::{doubling_classifier, Classification, DoublingReport};
pub use element::Element;
pub use gamma::{
    conj_growth, conj_growth_sequence, gamma_estimate, match_reciprocal, ConjGrowth, GammaEstimate, GammaVerdict,
    GAMMA_TOLERANCE, MIN_K_MAX,
};
pub use profile::{coordinate_growth_profile, CoordinateProfile, CoordinateSeries, PROFILE_SLACK};
pub use report::{
    fit_loglog_slope, growth_report, quasi_norm_window, sandwich_window, GrowthReport, RatioWindow,
};

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::nilgroup::MatrixGroupDescriptor;

/// Default cap on the number of stored ball elements.
pub const DEFAULT_BUDGET: usize = 20_000_000;
/// Default cap on the number of elements visited by one targeted word-length search.
pub const DEFAULT_SEARCH_BUDGET: usize = 2_000_000;

const CHUNK: usize = 1 << 15;

/// Word length, exact or a lower bound when the element lies beyond what the
/// table (and any extra search) could resolve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Tau {
    Exact(u32),
    AtLeast(u32),
}

impl Tau {
    pub fn exact(self) -> Option<u32> {
        match self {
            Tau::Exact(t) => Some(t),
            Tau::AtLeast(_) => None,
        }
    }

    /// Exact value or the lower bound.
    pub fn lower(self) -> u32 {
        match self {
            Tau::Exact(t) | Tau::AtLeast(t) => t,
        }
    }
}

/// Census of the balls `V^0 ⊆ V^1 ⊆ ... ⊆ V^R`. Elements are stored in BFS
/// order, so `V^r` is the prefix of length `sizes[r]`.
#[derive(Clone)]
pub struct BallTable {
    label: String,
    ambient_size: usize,
    integral: bool,
    generators: Vec<Element>,
    elements: IndexSet<Element>,
    tau: Vec<u32>,
    sizes: Vec<usize>,
}

impl fmt::Debug for BallTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BallTable")
            .field("label", &self.label)
            .field("max_radius", &self.max_radius())
            .field("sizes", &self.sizes)
            .finish()
    }
}

enum BuildError {
    Overflow,
    Budget(BallTable),
}

impl BallTable {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ambient_size(&self) -> usize {
        self.ambient_size
    }

    pub fn max_radius(&self) -> usize {
        self.sizes.len() - 1
    }

    /// `|V^0|, |V^1|, ..., |V^R|`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    /// The symmetrized generators as stored keys.
    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    /// Element and word length at BFS position `i`.
    pub fn entry(&self, i: usize) -> (&Element, u32) {
        (self.elements.get_index(i).expect("index in range"), self.tau[i])
    }

    pub fn matrix(&self, i: usize) -> RationalMatrix {
        self.entry(i).0.to_matrix(self.ambient_size)
    }

    /// BFS positions of the elements of `V^r`.
    pub fn ball_range(&self, r: usize) -> std::ops::Range<usize> {
        0..self.sizes[r.min(self.max_radius())]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, u32)> + '_ {
        self.elements.iter().zip(self.tau.iter().copied())
    }

    pub fn key(&self, x: &RationalMatrix) -> Option<Element> {
        if x.rows() != self.ambient_size || !x.is_square() {
            return None;
        }
        Element::from_matrix(x, self.integral)
    }

    pub fn lookup(&self, x: &Element) -> Option<u32> {
        self.elements.get_index_of(x).map(|i| self.tau[i])
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Option<Element> {
        x.mul(y, self.ambient_size)
    }

    pub fn inverse(&self, x: &Element) -> Option<Element> {
        let inv = x.to_matrix(self.ambient_size).inverse().ok()?;
        Element::from_matrix(&inv, self.integral)
    }

    pub fn identity(&self) -> Element {
        self.elements.get_index(0).expect("identity present").clone()
    }

    pub fn power(&self, x: &Element, k: u64) -> Option<Element> {
        let mut acc = self.identity();
        let mut base = x.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Some(acc)
    }

    /// Word length from a targeted search: the table answers for `τ ≤ R`;
    /// otherwise words `x s_1 ... s_m` are explored level by level until one
    /// lands in `V^R`, which happens first at `m = τ(x) - R`. Gives up after
    /// visiting `budget` elements.
    pub fn tau_search(&self, x: &Element, budget: usize) -> Tau {
        if let Some(t) = self.lookup(x) {
            return Tau::Exact(t);
        }
        let r = self.max_radius() as u32;
        let mut visited: HashSet<Element> = HashSet::new();
        visited.insert(x.clone());
        let mut frontier = vec![x.clone()];
        let mut m = 0u32;
        loop {
            m += 1;
            let mut next = Vec::new();
            for y in &frontier {
                for s in &self.generators {
                    let Some(z) = self.mul(y, s) else {
                        return Tau::AtLeast(r + m);
                    };
                    if visited.contains(&z) {
                        continue;
                    }
                    if self.elements.contains(&z) {
                        return Tau::Exact(r + m);
                    }
                    visited.insert(z.clone());
                    next.push(z);
                }
            }
            if next.is_empty() || visited.len() > budget {
                return Tau::AtLeast(r + m + 1);
            }
            frontier = next;
        }
    }
}

/// Word length read from the table; beyond the horizon only a lower bound.
pub fn tau(x: &RationalMatrix, t: &BallTable) -> Tau {
    match t.key(x).and_then(|k| t.lookup(&k)) {
        Some(v) => Tau::Exact(v),
        None => Tau::AtLeast(t.max_radius() as u32 + 1),
    }
}

pub fn balls(g: &MatrixGroupDescriptor, radius: usize) -> Result<BallTable> {
    balls_with_budget(g, radius, DEFAULT_BUDGET)
}

/// Enumerates `V^0, ..., V^radius`. When more than `budget` elements would be
/// stored, fails with [`Error::BudgetExceeded`] carrying the table for every
/// radius completed so far.
pub fn balls_with_budget(g: &MatrixGroupDescriptor, radius: usize, budget: usize) -> Result<BallTable> {
    let sym = g.symmetric_generators()?;
    let integral = sym.iter().all(RationalMatrix::is_integral);
    let attempt = |integral: bool| build(g, &sym, integral, radius, budget);
    let outcome = if integral {
        match attempt(true) {
            Err(BuildError::Overflow) => attempt(false),
            other => other,
        }
    } else {
        attempt(false)
    };
    match outcome {
        Ok(t) => Ok(t),
        Err(BuildError::Budget(partial)) => Err(Error::BudgetExceeded {
            budget,
            completed_radius: partial.max_radius(),
            partial: Box::new(partial),
        }),
        Err(BuildError::Overflow) => Err(Error::Internal("overflow in rational arithmetic".into())),
    }
}

fn build(
    g: &MatrixGroupDescriptor,
    sym: &[RationalMatrix],
    integral: bool,
    radius: usize,
    budget: usize,
) -> std::result::Result<BallTable, BuildError> {
    let n = g.ambient_size;
    let generators: Vec<Element> = sym
        .iter()
        .map(|m| Element::from_matrix(m, integral).ok_or(BuildError::Overflow))
        .collect::<std::result::Result<_, _>>()?;
    let id = Element::from_matrix(&RationalMatrix::identity(n), integral).ok_or(BuildError::Overflow)?;
    let mut elements = IndexSet::new();
    elements.insert(id);
    let mut table = BallTable {
        label: g.label.clone(),
        ambient_size: n,
        integral,
        generators,
        elements,
        tau: vec![0],
        sizes: vec![1],
    };
    for r in 1..=radius {
        let start = if r == 1 { 0 } else { table.sizes[r - 2] };
        let end = table.sizes[r - 1];
        let mut lo = start;
        while lo < end {
            let hi = (lo + CHUNK).min(end);
            let products: Vec<Option<Element>> = (lo..hi)
                .into_par_iter()
                .flat_map_iter(|i| {
                    let x = table.elements.get_index(i).expect("frontier index");
                    table.generators.iter().map(move |s| x.mul(s, n))
                })
                .collect();
            for p in products {
                let p = p.ok_or(BuildError::Overflow)?;
                if table.elements.insert(p) {
                    table.tau.push(r as u32);
                    if table.elements.len() > budget {
                        table.elements.truncate(end);
                        table.tau.truncate(end);
                        return Err(BuildError::Budget(table));
                    }
                }
            }
            lo = hi;
        }
        table.sizes.push(table.elements.len());
    }
    Ok(table)
}
