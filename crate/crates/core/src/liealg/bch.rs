//! Baker-Campbell-Hausdorff product in a nilpotent algebra.
//!
//! Uses Dynkin's expansion
//! `log(e^X e^Y) = sum_n (-1)^(n-1)/n sum [X^r1 Y^s1 ... X^rn Y^sn] / (N prod r_i! s_i!)`
//! where `[...]` is the right-nested bracket of the word and `N` its length.
//! Coefficients are collected per word once, so evaluation costs one bracket
//! per word suffix.

use std::sync::OnceLock;

use num_traits::{One, Zero};

use super::{LieAlgebraQ, Vector};
use crate::error::{Error, Result};
use crate::linalg::rational::{factorial, rat, Rational};

pub const DEFAULT_CLASS_CAP: usize = 8;

/// `coeffs[len][bits]`: coefficient of the word of length `len` whose letters
/// are the bits of `bits`, most significant first (0 = X, 1 = Y).
struct WordTable {
    coeffs: Vec<Vec<Rational>>,
}

fn letter(bits: usize, len: usize, pos: usize) -> usize {
    (bits >> (len - 1 - pos)) & 1
}

fn word_coefficient(bits: usize, len: usize) -> Rational {
    // ways[pos][n]: sum over splittings of the prefix of length pos into n
    // blocks X^r Y^s of prod 1/(r! s!)
    let mut ways = vec![vec![Rational::zero(); len + 1]; len + 1];
    ways[0][0] = Rational::one();
    for start in 0..len {
        if ways[start].iter().all(Zero::is_zero) {
            continue;
        }
        let (mut r, mut s) = (0, 0);
        for end in start + 1..=len {
            let l = letter(bits, len, end - 1);
            if l == 0 {
                if s > 0 {
                    break;
                }
                r += 1;
            } else {
                s += 1;
            }
            let w = (factorial(r) * factorial(s)).recip();
            for n in 0..len {
                if ways[start][n].is_zero() {
                    continue;
                }
                let add = &ways[start][n] * &w;
                ways[end][n + 1] += add;
            }
        }
    }
    let mut c = Rational::zero();
    for n in 1..=len {
        let sign = if n % 2 == 1 { rat(1) } else { rat(-1) };
        c += sign * &ways[len][n] / rat(n as i64);
    }
    c / rat(len as i64)
}

impl WordTable {
    fn new(max_len: usize) -> Self {
        let mut coeffs = vec![Vec::new()];
        for len in 1..=max_len {
            coeffs.push((0..1usize << len).map(|bits| word_coefficient(bits, len)).collect());
        }
        Self { coeffs }
    }
}

fn table() -> &'static WordTable {
    static TABLE: OnceLock<WordTable> = OnceLock::new();
    TABLE.get_or_init(|| WordTable::new(DEFAULT_CLASS_CAP))
}

/// Nonzero Dynkin word coefficients up to `max_len` (at most the class cap),
/// words written over `X`, `Y`. Words whose right-nested bracket vanishes
/// identically (ending in `XX` or `YY`) are included when their coefficient
/// is nonzero.
pub fn bch_word_coefficients(max_len: usize) -> Vec<(String, Rational)> {
    let t = table();
    let mut out = Vec::new();
    for len in 1..=max_len.min(DEFAULT_CLASS_CAP) {
        for (bits, c) in t.coeffs[len].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w: String =
                (0..len).map(|p| if letter(bits, len, p) == 0 { 'X' } else { 'Y' }).collect();
            out.push((w, c.clone()));
        }
    }
    out
}

/// `log(exp(x) exp(y))` in `l`, exactly.
pub fn bch(l: &LieAlgebraQ, x: &[Rational], y: &[Rational]) -> Result<Vector> {
    let class = l
        .nilpotency_class()
        .ok_or_else(|| Error::NotNilpotent("BCH product needs a nilpotent algebra".into()))?;
    if class > DEFAULT_CLASS_CAP {
        return Err(Error::Capacity(format!(
            "nilpotency class {class} exceeds the BCH cap {DEFAULT_CLASS_CAP}"
        )));
    }
    for v in [x, y] {
        if v.len() != l.dim() {
            return Err(Error::DimensionMismatch { expected: l.dim(), found: v.len() });
        }
    }
    let mut out: Vector = x.iter().zip(y).map(|(a, b)| a + b).collect();
    if class <= 1 {
        return Ok(out);
    }
    let t = table();
    let letters = [x.to_vec(), y.to_vec()];
    // values[bits] for the current length; None marks a zero bracket
    let mut prev: Vec<Option<Vector>> = letters.iter().cloned().map(Some).collect();
    for len in 2..=class {
        let mut cur: Vec<Option<Vector>> = Vec::with_capacity(1 << len);
        for bits in 0..1usize << len {
            let head = letter(bits, len, 0);
            let tail = bits & ((1 << (len - 1)) - 1);
            let v = prev[tail].as_ref().map(|inner| l.bracket(&letters[head], inner));
            let v = v.filter(|v| v.iter().any(|c| !c.is_zero()));
            if let Some(val) = &v {
                let c = &t.coeffs[len][bits];
                if !c.is_zero() {
                    for (o, a) in out.iter_mut().zip(val) {
                        if !a.is_zero() {
                            *o += c * a;
                        }
                    }
                }
            }
            cur.push(v);
        }
        prev = cur;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::fixtures::*;
    use crate::linalg::rational::frac;

    #[test]
    fn low_degree_coefficients() {
        let c = bch_word_coefficients(3);
        let get = |w: &str| c.iter().find(|(x, _)| x == w).map(|(_, q)| q.clone()).unwrap_or_else(Rational::zero);
        assert_eq!(get("X"), rat(1));
        assert_eq!(get("Y"), rat(1));
        // 1/4 [X,Y] - 1/4 [Y,X] = 1/2 [X,Y]
        assert_eq!(get("XY"), frac(1, 4));
        assert_eq!(get("YX"), frac(-1, 4));
    }

    #[test]
    fn abelian_is_sum() {
        let a = LieAlgebraQ::abelian(3);
        let x = vec![rat(1), frac(1, 2), rat(-3)];
        let y = vec![rat(2), rat(0), frac(5, 7)];
        let z = bch(&a, &x, &y).unwrap();
        assert_eq!(z, vec![rat(3), frac(1, 2), frac(-16, 7)]);
    }

    #[test]
    fn class_two_half_bracket() {
        let h = heisenberg();
        let x = vec![rat(2), rat(1), rat(0)];
        let y = vec![rat(-1), rat(3), rat(4)];
        let z = bch(&h, &x, &y).unwrap();
        // [x,y] = (2*3 - 1*(-1)) e3 = 7 e3
        assert_eq!(z, vec![rat(1), rat(4), rat(4) + frac(7, 2)]);
    }

    #[test]
    fn inverse_and_associativity_filiform() {
        let l = filiform4_tilted();
        let x = vec![rat(1), rat(2), rat(-1), frac(1, 3)];
        let y = vec![frac(-1, 2), rat(1), rat(0), rat(2)];
        let w = vec![rat(0), rat(-1), rat(3), rat(1)];
        let neg: Vec<Rational> = x.iter().map(|c| -c).collect();
        assert!(bch(&l, &x, &neg).unwrap().iter().all(Zero::is_zero));
        let left = bch(&l, &bch(&l, &x, &y).unwrap(), &w).unwrap();
        let right = bch(&l, &x, &bch(&l, &y, &w).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let l = LieAlgebraQ::from_brackets(2, &[spec(0, 1, &[(1, 1)])]).unwrap();
        assert!(matches!(bch(&l, &[rat(1), rat(0)], &[rat(0), rat(1)]), Err(Error::NotNilpotent(_))));
    }

    #[test]
    fn class_cap() {
        // standard filiform of dimension 10 has class 9
        let specs: Vec<_> = (1..9).map(|k| spec(0, k, &[(k + 1, 1)])).collect();
        let l = LieAlgebraQ::from_brackets(10, &specs).unwrap();
        assert_eq!(l.nilpotency_class(), Some(9));
        let x = l.basis_vector(0);
        assert!(matches!(bch(&l, &x, &x), Err(Error::Capacity(_))));
    }
}
