//! Built-in example descriptors and their expected invariants.

use serde::Serialize;

use super::descriptor::Descriptor;
use crate::liealg::{BracketSpec, LieAlgebraQ};
use crate::linalg::rational::rat;
use crate::linalg::RationalMatrix;
use crate::nilgroup::{free_abelian, heisenberg, unitriangular, MatrixGroupDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub degree: Option<u64>,
    pub rank: Option<usize>,
    /// Expected verdict of the doubling classifier at the catalog radius.
    pub exponential: bool,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub descriptor: Descriptor,
    pub expected: Expected,
}

pub const NAMES: [&str; 11] = [
    "heisenberg",
    "z1",
    "z2",
    "z3",
    "z4",
    "ut4",
    "ex14a_rotation",
    "ex14a_shear",
    "ex14a_shadow",
    "ex14b_shadow",
    "free2",
];

fn bracket(i: usize, j: usize, k: usize) -> BracketSpec {
    BracketSpec { i, j, terms: vec![(k, rat(1))] }
}

fn algebra(labels: &[&str], brackets: &[BracketSpec]) -> LieAlgebraQ {
    LieAlgebraQ::new(labels.iter().map(|s| s.to_string()).collect(), brackets).expect("catalog algebra")
}

fn poly(degree: u64, rank: usize) -> Expected {
    Expected { degree: Some(degree), rank: Some(rank), exponential: false }
}

fn renamed(mut g: MatrixGroupDescriptor, name: &str) -> MatrixGroupDescriptor {
    g.label = name.to_string();
    g
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    let entry = |summary, descriptor, expected| {
        Some(CatalogEntry { name: NAMES.iter().find(|n| **n == name).copied()?, summary, descriptor, expected })
    };
    match name {
        "heisenberg" => entry(
            "discrete Heisenberg group in UT(3, Z)",
            Descriptor::MatrixGroup(heisenberg()),
            poly(4, 3),
        ),
        "z1" | "z2" | "z3" | "z4" => {
            let k: usize = name[1..].parse().expect("digit");
            entry("free abelian group", Descriptor::MatrixGroup(renamed(free_abelian(k), name)), poly(k as u64, k))
        }
        "ut4" => entry(
            "unitriangular integer group UT(4, Z)",
            Descriptor::MatrixGroup(renamed(unitriangular(4), name)),
            poly(10, 6),
        ),
        "ex14a_rotation" => entry(
            "Z^2 semidirect Z acting by a rotation of order 4",
            Descriptor::SemidirectZkZ {
                label: name.into(),
                action: RationalMatrix::from_i64(&[&[0, -1], &[1, 0]]),
            },
            poly(3, 3),
        ),
        "ex14a_shear" => entry(
            "Z^2 semidirect Z acting by a unipotent shear",
            Descriptor::SemidirectZkZ {
                label: name.into(),
                action: RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]),
            },
            poly(4, 3),
        ),
        "ex14a_shadow" => entry(
            "five-dimensional nil-shadow with [t, z_i] = w_i",
            Descriptor::LieAlgebra {
                label: name.into(),
                algebra: algebra(&["t", "z1", "z2", "w1", "w2"], &[bracket(0, 1, 3), bracket(0, 2, 4)]),
                grading: None,
            },
            poly(7, 5),
        ),
        "ex14b_shadow" => entry(
            "Heisenberg algebra plus a two-dimensional abelian factor",
            Descriptor::LieAlgebra {
                label: name.into(),
                algebra: algebra(&["x", "y", "z", "u", "v"], &[bracket(0, 1, 2)]),
                grading: None,
            },
            poly(6, 5),
        ),
        "free2" => entry(
            "free group of rank 2 in SL(2, Z)",
            Descriptor::MatrixGroup(
                MatrixGroupDescriptor::new(
                    name,
                    vec!["a".into(), "b".into()],
                    vec![
                        RationalMatrix::from_i64(&[&[1, 2], &[0, 1]]),
                        RationalMatrix::from_i64(&[&[1, 0], &[2, 1]]),
                    ],
                )
                .expect("catalog group"),
            ),
            Expected { degree: None, rank: None, exponential: true },
        ),
        _ => None,
    }
}

pub fn all() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| lookup(n).expect("catalog name")).collect()
}
