//! Smith normal form over the integers and the abelian group `Z^a / R`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z^ambient_rank` modulo a relation lattice, up to isomorphism:
/// `Z/d_1 + ... + Z/d_k + Z^free_rank` with `d_1 | d_2 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegerLatticeQuotient {
    pub ambient_rank: usize,
    /// Nonzero diagonal entries of the Smith form, units included.
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl IntegerLatticeQuotient {
    /// Orders of the nontrivial cyclic torsion summands.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Diagonal of the Smith normal form of `m` (rows x cols), nonzero entries only,
/// in divisibility order.
pub fn smith_diagonal(m: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            let p = a[t][t].clone();
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&p);
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // the pivot must divide the rest of the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_multiple_of(&p));
                match bad {
                    None => break,
                    Some((i, _)) => {
                        for j in t..cols {
                            let s = a[i][j].clone();
                            a[t][j] += s;
                        }
                        continue;
                    }
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            a.swap(t, best.0);
            for row in a.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    normalize_chain(&mut diag);
    diag
}

fn normalize_chain(d: &mut [BigInt]) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
}

/// Structure of `Z^ambient_rank / span(relations)`.
pub fn smith_quotient(relations: &[Vec<BigInt>], ambient_rank: usize) -> Result<IntegerLatticeQuotient> {
    if let Some(r) = relations.iter().find(|r| r.len() != ambient_rank) {
        return Err(Error::DimensionMismatch { expected: ambient_rank, found: r.len() });
    }
    let invariant_factors = smith_diagonal(relations, ambient_rank);
    let free_rank = ambient_rank - invariant_factors.len();
    Ok(IntegerLatticeQuotient { ambient_rank, invariant_factors, free_rank })
}
