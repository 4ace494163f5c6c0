//! Independent reference implementations shared by the integration tests.
//! They deliberately avoid the library's linear algebra beyond plain
//! matrix products.

#![allow(dead_code)]

pub mod invariants;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nilgrowth::linalg::RationalMatrix;
use nilgrowth::nilgroup::MatrixGroupDescriptor;

pub type Q = BigRational;
pub type Dense = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn dense(m: &RationalMatrix) -> Dense {
    m.to_rows()
}

fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// `log M = sum_k (-1)^(k+1) (M - I)^k / k` by direct summation.
pub fn series_log(m: &Dense) -> Dense {
    let n = m.len();
    let mut nil = m.clone();
    for (i, row) in nil.iter_mut().enumerate() {
        row[i] -= Q::one();
    }
    let mut out = vec![vec![Q::zero(); n]; n];
    let mut power = nil.clone();
    for k in 1..=n {
        let c = Q::new(BigInt::from(if k % 2 == 1 { 1 } else { -1 }), BigInt::from(k));
        for i in 0..n {
            for j in 0..n {
                out[i][j] += &c * &power[i][j];
            }
        }
        power = dense_mul(&power, &nil);
    }
    out
}

/// Rank by Gaussian elimination on a private copy.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[r][c];
            for j in c..cols {
                let d = &f * &a[r][j];
                a[i][j] -= d;
            }
        }
        r += 1;
    }
    r
}

/// Fraction-free (Bareiss) rank of an integer matrix.
pub fn bareiss_rank(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|p| p.1.clone()).collect()).collect();
        let term = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors `d_k = D_k / D_{k-1}`, with
/// `D_k` the gcd of all `k x k` minors.
pub fn determinantal_invariants(m: &[Vec<i64>], cols: usize) -> Vec<BigInt> {
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=m.len().min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(m.len(), k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| big[i][j].clone()).collect()).collect();
                g = num_integer::Integer::gcd(&g, &det(&minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

/// Ball sizes by a second BFS over integer matrices, keyed by plain vectors.
pub fn bfs_sizes(gens: &[Vec<Vec<i64>>], radius: usize) -> Vec<usize> {
    let n = gens[0].len();
    let mul = |a: &Vec<i64>, b: &Vec<Vec<i64>>| -> Vec<i64> {
        let mut out = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i * n + j] += a[i * n + k] * b[k][j];
                }
            }
        }
        out
    };
    let mut id = vec![0; n * n];
    for i in 0..n {
        id[i * n + i] = 1;
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::from([id.clone()]);
    let mut frontier = vec![id];
    let mut sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = mul(x, g);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        sizes.push(seen.len());
        frontier = next;
    }
    sizes
}

pub fn int_rows(m: &RationalMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| i64::try_from(x.to_integer()).expect("small integer")).collect())
        .collect()
}

/// Symmetrized integer generators of a descriptor.
pub fn symmetric_int_gens(g: &MatrixGroupDescriptor) -> Vec<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<Vec<i64>>> = Vec::new();
    for m in &g.generators {
        for h in [m.clone(), m.inverse().unwrap()] {
            let r = int_rows(&h);
            if !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// Heisenberg elements as `(x, y, z)` with `(x,y,z)(x',y',z') = (x+x', y+y', z+z'+xy')`.
pub type H = (i64, i64, i64);

pub fn h_mul(p: H, r: H) -> H {
    (p.0 + r.0, p.1 + r.1, p.2 + r.2 + p.0 * r.1)
}

pub fn h_inv(p: H) -> H {
    (-p.0, -p.1, -p.2 + p.0 * p.1)
}

/// Word lengths in the Heisenberg group up to `radius`.
pub fn heisenberg_tau(radius: u32) -> std::collections::HashMap<H, u32> {
    let gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)];
    let mut tau = std::collections::HashMap::from([((0, 0, 0), 0)]);
    let mut frontier = vec![(0, 0, 0)];
    for r in 1..=radius {
        let mut next = Vec::new();
        for p in &frontier {
            for g in gens {
                let q = h_mul(*p, g);
                if !tau.contains_key(&q) {
                    tau.insert(q, r);
                    next.push(q);
                }
            }
        }
        frontier = next;
    }
    tau
}

/// Left-normed group commutator `[g1, ..., gw]` with `[g, h] = g h g^-1 h^-1`.
fn commutator(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    a.mul(b).unwrap().mul(&a.inverse().unwrap()).unwrap().mul(&b.inverse().unwrap()).unwrap()
}

/// `dim C_0, dim C_1, ..., 0` computed on the group side: `C_{w-1}` is the
/// span of the logarithms of all left-normed commutators of weight `>= w`.
pub fn group_side_lcs_dims(g: &MatrixGroupDescriptor) -> Vec<usize> {
    let n = g.ambient_size;
    let mut by_weight: Vec<Vec<RationalMatrix>> = vec![g.generators.clone()];
    for _ in 1..n {
        let prev = by_weight.last().unwrap();
        let next: Vec<RationalMatrix> = prev
            .iter()
            .flat_map(|c| g.generators.iter().map(move |x| commutator(c, x)))
            .filter(|c| !c.is_identity())
            .collect();
        by_weight.push(next);
    }
    let mut dims = Vec::new();
    for w in 0..by_weight.len() {
        let logs: Vec<Vec<Q>> = by_weight[w..]
            .iter()
            .flatten()
            .map(|c| series_log(&dense(c)).into_iter().flatten().collect())
            .collect();
        let d = if logs.is_empty() { 0 } else { rank(&logs) };
        dims.push(d);
        if d == 0 {
            break;
        }
    }
    if *dims.last().unwrap() != 0 {
        dims.push(0);
    }
    dims
}

pub fn degree_from_dims(dims: &[usize]) -> u64 {
    dims.windows(2).enumerate().map(|(i, w)| (i as u64 + 1) * (w[0] - w[1]) as u64).sum()
}

/// Random upper unitriangular integer matrix with entries in `[-bound, bound]`.
pub fn random_unitriangular(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> RationalMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        rows[i][i] = 1;
        for j in i + 1..n {
            rows[i][j] = rng.gen_range(-bound..=bound);
        }
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    RationalMatrix::from_i64(&refs)
}

/// `Z^2 ⋊ Z/4`: a rotation of order 4 and a unit translation, as affine 3x3 matrices.
pub fn z2_rot4() -> MatrixGroupDescriptor {
    MatrixGroupDescriptor::new(
        "z2_rot4",
        vec!["r".into(), "u".into()],
        vec![
            RationalMatrix::from_i64(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]),
            RationalMatrix::from_i64(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]),
        ],
    )
    .unwrap()
}

pub fn max_abs_dense(m: &Dense) -> Q {
    m.iter().flatten().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}
