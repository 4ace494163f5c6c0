//! Quasi-unipotence of integer matrices and the multiplicative Jordan-Chevalley
//! decomposition over the rationals.

use serde::Serialize;

use super::matrix::RationalMatrix;
use super::poly::{char_poly, cyclotomic, totient, Poly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CyclotomicWitness {
    pub char_poly: String,
    /// Indices `m` of the cyclotomic factors `Phi_m`, with multiplicity, ascending.
    pub cyclotomic_indices: Vec<u64>,
    /// What is left of the characteristic polynomial after every cyclotomic
    /// factor has been divided out. `None` when nothing is left.
    pub offending_factor: Option<String>,
    #[serde(skip)]
    pub offending_poly: Option<Poly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiUnipotentVerdict {
    pub quasi_unipotent: bool,
    pub witness: CyclotomicWitness,
}

impl QuasiUnipotentVerdict {
    /// Least common multiple of the cyclotomic indices: the order of the
    /// semisimple part when the verdict is positive.
    pub fn period(&self) -> u64 {
        self.witness.cyclotomic_indices.iter().fold(1, |acc, &m| num_integer::lcm(acc, m))
    }
}

/// Decides whether all eigenvalues of the integer matrix `a` are roots of unity.
pub fn quasi_unipotent_test(a: &RationalMatrix) -> Result<QuasiUnipotentVerdict> {
    if !a.is_square() {
        return Err(Error::Unsupported("quasi-unipotence needs a square matrix".into()));
    }
    if !a.is_integral() {
        return Err(Error::Unsupported(
            "quasi-unipotence test is only decided for integer matrices".into(),
        ));
    }
    let p = char_poly(a)?;
    let n = p.degree() as u64;
    let mut rest = p.clone();
    let mut indices = Vec::new();
    // phi(m) >= sqrt(m/2), so phi(m) <= n forces m <= 2 n^2
    for m in 1..=(2 * n * n).max(2) {
        if totient(m) > rest.degree() as u64 {
            continue;
        }
        let c = cyclotomic(m);
        loop {
            let (q, r) = rest.div_rem(&c);
            if !r.is_zero() {
                break;
            }
            rest = q;
            indices.push(m);
        }
        if rest.degree() == 0 {
            break;
        }
    }
    let done = rest.degree() == 0;
    Ok(QuasiUnipotentVerdict {
        quasi_unipotent: done,
        witness: CyclotomicWitness {
            char_poly: p.to_string(),
            cyclotomic_indices: indices,
            offending_factor: (!done).then(|| rest.monic().to_string()),
            offending_poly: (!done).then(|| rest.monic()),
        },
    })
}

/// Splits an invertible `a` as `a = s * u` with `s` semisimple, `u` unipotent
/// and `su = us`.
///
/// The semisimple part is the limit of Newton's iteration for the squarefree
/// part `q` of the characteristic polynomial, started at `a`; it reaches an
/// exact root of `q` after at most `log2(n) + 1` steps.
pub fn jordan_chevalley(a: &RationalMatrix) -> Result<(RationalMatrix, RationalMatrix)> {
    if !a.is_square() {
        return Err(Error::Unsupported("Jordan-Chevalley needs a square matrix".into()));
    }
    if a.determinant()? == num_traits::Zero::zero() {
        return Err(Error::Singular);
    }
    let q = char_poly(a)?.squarefree_part();
    let dq = q.derivative();
    let mut s = a.clone();
    for _ in 0..64 {
        let qs = q.eval_matrix(&s)?;
        if qs.is_zero() {
            let u = s.inverse()?.mul(a)?;
            return Ok((s, u));
        }
        let step = qs.mul(&dq.eval_matrix(&s)?.inverse()?)?;
        s = s.sub(&step)?;
    }
    Err(Error::Internal("Newton iteration for the semisimple part did not converge".into()))
}

/// Whether `g^m = I` for some `m >= 1`. A rational matrix of finite order has
/// order dividing `lcm{m : phi(m) <= n}`.
pub fn has_finite_order(g: &RationalMatrix) -> Result<bool> {
    let n = g.rows() as u64;
    let mut l = 1u64;
    for m in 1..=(2 * n * n).max(2) {
        if totient(m) <= n {
            l = num_integer::lcm(l, m);
        }
    }
    Ok(g.pow(l)?.is_identity())
}
