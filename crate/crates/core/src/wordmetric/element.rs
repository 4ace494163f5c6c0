use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::linalg::{RationalMatrix, Rational};

/// Exact canonical key of a group element. Integer matrices use machine
/// integers with overflow checks; anything else keeps reduced rationals.
/// A ball table never mixes the two representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Int(Box<[i64]>),
    Rat(Box<[Rational]>),
}

impl Element {
    pub fn from_matrix(m: &RationalMatrix, integral: bool) -> Option<Self> {
        if integral {
            m.as_flat()
                .iter()
                .map(|q| if q.denom() == &BigInt::from(1) { q.numer().to_i64() } else { None })
                .collect::<Option<Vec<i64>>>()
                .map(|v| Element::Int(v.into_boxed_slice()))
        } else {
            Some(Element::Rat(m.as_flat().to_vec().into_boxed_slice()))
        }
    }

    pub fn to_matrix(&self, n: usize) -> RationalMatrix {
        let data = match self {
            Element::Int(v) => v.iter().map(|&x| Rational::from_integer(x.into())).collect(),
            Element::Rat(v) => v.to_vec(),
        };
        RationalMatrix::from_flat(n, n, data).expect("square element")
    }

    /// Product, `None` on machine-integer overflow.
    pub fn mul(&self, other: &Self, n: usize) -> Option<Self> {
        match (self, other) {
            (Element::Int(a), Element::Int(b)) => {
                let mut out = vec![0i64; n * n];
                for i in 0..n {
                    for k in 0..n {
                        let x = a[i * n + k];
                        if x == 0 {
                            continue;
                        }
                        for j in 0..n {
                            let y = b[k * n + j];
                            if y != 0 {
                                let p = x.checked_mul(y)?;
                                out[i * n + j] = out[i * n + j].checked_add(p)?;
                            }
                        }
                    }
                }
                Some(Element::Int(out.into_boxed_slice()))
            }
            (Element::Rat(a), Element::Rat(b)) => {
                let mut out = vec![Rational::zero(); n * n];
                for i in 0..n {
                    for k in 0..n {
                        let x = &a[i * n + k];
                        if x.is_zero() {
                            continue;
                        }
                        for j in 0..n {
                            let y = &b[k * n + j];
                            if !y.is_zero() {
                                out[i * n + j] += x * y;
                            }
                        }
                    }
                }
                Some(Element::Rat(out.into_boxed_slice()))
            }
            _ => panic!("mixed element representations"),
        }
    }

    pub fn is_int(&self) -> bool {
        matches!(self, Element::Int(_))
    }
}
