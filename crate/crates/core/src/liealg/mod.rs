//! Finite-dimensional nilpotent Lie algebras over the rationals, given by
//! structure constants.

mod bch;
mod dilation;

pub use bch::{bch, bch_word_coefficients, DEFAULT_CLASS_CAP};
pub use dilation::{dilate, dilate_approx, quasi_norm, ConeVector};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{CoordinateSolver, Rational, Subspace};
use crate::error::{Error, Result};

pub type Vector = Vec<Rational>;

/// One nonzero structure constant: `[e_i, e_j]` has coefficient `value` on `e_k`,
/// stored for `i < j` only.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Term {
    i: usize,
    j: usize,
    k: usize,
    value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraQ {
    dim: usize,
    labels: Vec<String>,
    terms: Vec<Term>,
    class: Option<usize>,
}

/// Bracket `[e_i, e_j] = sum_k c_k e_k` as supplied by a caller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(usize, Rational)>,
}

impl LieAlgebraQ {
    /// Builds the algebra from brackets of basis pairs; unlisted pairs
    /// commute. `[e_j, e_i]` is filled in by antisymmetry, and a pair given
    /// in both orders must agree. The Jacobi identity is checked on all
    /// basis triples.
    pub fn new(labels: Vec<String>, brackets: &[BracketSpec]) -> Result<Self> {
        let dim = labels.len();
        let mut table: Vec<Vec<Rational>> = vec![vec![Rational::zero(); dim]; dim * dim];
        let mut seen = vec![false; dim * dim];
        for b in brackets {
            for &idx in [b.i, b.j].iter().chain(b.terms.iter().map(|(k, _)| k)) {
                if idx >= dim {
                    return Err(Error::Domain(format!(
                        "bracket index {idx} out of range for dimension {dim}"
                    )));
                }
            }
            let mut v = vec![Rational::zero(); dim];
            for (k, c) in &b.terms {
                v[*k] += c;
            }
            if b.i == b.j {
                if v.iter().any(|c| !c.is_zero()) {
                    return Err(Error::InvariantViolation(format!(
                        "[e{0}, e{0}] must vanish",
                        b.i
                    )));
                }
                continue;
            }
            let (lo, hi, v) = if b.i < b.j { (b.i, b.j, v) } else { (b.j, b.i, v.into_iter().map(|c| -c).collect()) };
            let slot = lo * dim + hi;
            if seen[slot] && table[slot] != v {
                return Err(Error::InvariantViolation(format!(
                    "bracket [e{lo}, e{hi}] given twice with different values"
                )));
            }
            seen[slot] = true;
            table[slot] = v;
        }
        let mut terms = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for (k, c) in table[i * dim + j].iter().enumerate() {
                    if !c.is_zero() {
                        terms.push(Term { i, j, k, value: c.clone() });
                    }
                }
            }
        }
        let mut alg = Self { dim, labels, terms, class: None };
        alg.check_jacobi()?;
        alg.class = alg.compute_class();
        Ok(alg)
    }

    /// Same as [`LieAlgebraQ::new`] with generated labels `e1, e2, ...`.
    pub fn from_brackets(dim: usize, brackets: &[BracketSpec]) -> Result<Self> {
        Self::new((1..=dim).map(|i| format!("e{i}")).collect(), brackets)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::from_brackets(dim, &[]).expect("abelian algebra is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Nilpotency class, `None` for non-nilpotent algebras. The zero algebra
    /// has class 0, nonzero abelian algebras class 1.
    pub fn nilpotency_class(&self) -> Option<usize> {
        self.class
    }

    pub fn is_abelian(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::from_integer(1.into());
        v
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn structure(&self, i: usize, j: usize) -> Vector {
        self.bracket(&self.basis_vector(i), &self.basis_vector(j))
    }

    /// Sparse bracket list, `i < j`, suitable for serialization.
    pub fn bracket_specs(&self) -> Vec<BracketSpec> {
        let mut out: Vec<BracketSpec> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some(b) if b.i == t.i && b.j == t.j => b.terms.push((t.k, t.value.clone())),
                _ => out.push(BracketSpec { i: t.i, j: t.j, terms: vec![(t.k, t.value.clone())] }),
            }
        }
        out
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = vec![Rational::zero(); self.dim];
        for t in &self.terms {
            let (xi, xj, yi, yj) = (&x[t.i], &x[t.j], &y[t.i], &y[t.j]);
            let a = if xi.is_zero() || yj.is_zero() { None } else { Some(xi * yj) };
            let b = if xj.is_zero() || yi.is_zero() { None } else { Some(xj * yi) };
            let coeff = match (a, b) {
                (None, None) => continue,
                (Some(a), None) => a,
                (None, Some(b)) => -b,
                (Some(a), Some(b)) => a - b,
            };
            if !coeff.is_zero() {
                out[t.k] += coeff * &t.value;
            }
        }
        out
    }

    /// Jacobi identity on all basis triples, exactly.
    pub fn check_jacobi(&self) -> Result<()> {
        let e: Vec<Vector> = (0..self.dim).map(|i| self.basis_vector(i)).collect();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let ij = self.bracket(&e[i], &e[j]);
                for k in j + 1..self.dim {
                    let jk = self.bracket(&e[j], &e[k]);
                    let ki = self.bracket(&e[k], &e[i]);
                    let s1 = self.bracket(&e[i], &jk);
                    let s2 = self.bracket(&e[j], &ki);
                    let s3 = self.bracket(&e[k], &ij);
                    if s1.iter().zip(&s2).zip(&s3).any(|((a, b), c)| !(a + b + c).is_zero()) {
                        return Err(Error::InvariantViolation(format!(
                            "Jacobi identity fails on basis triple ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_class(&self) -> Option<usize> {
        lcs_chain(self).ok().map(|chain| chain.len() - 1)
    }
}

/// Ideals `C_0 = L, C_{k+1} = [L, C_k]` down to and including the zero ideal.
fn lcs_chain(l: &LieAlgebraQ) -> Result<Vec<Subspace>> {
    let mut chain = vec![Subspace::full(l.dim)];
    let e: Vec<Vector> = (0..l.dim).map(|i| l.basis_vector(i)).collect();
    while chain.last().map_or(0, Subspace::dim) > 0 {
        let cur = chain.last().expect("nonempty chain");
        let mut next = Subspace::zero(l.dim);
        for x in &e {
            for y in cur.basis() {
                next.insert(&l.bracket(x, y))?;
            }
        }
        if next.dim() == cur.dim() {
            return Err(Error::NotNilpotent(format!(
                "lower central series stabilizes at dimension {}",
                next.dim()
            )));
        }
        chain.push(next);
    }
    Ok(chain)
}

#[derive(Clone, Debug)]
pub struct LowerCentralSeries {
    /// `C_0 ⊇ C_1 ⊇ ... ⊇ C_c = 0`, as echelon bases in the algebra's coordinates.
    pub ideals: Vec<Subspace>,
}

impl LowerCentralSeries {
    pub fn dims(&self) -> Vec<usize> {
        self.ideals.iter().map(Subspace::dim).collect()
    }
}

pub fn lcs_algebra(l: &LieAlgebraQ) -> Result<LowerCentralSeries> {
    Ok(LowerCentralSeries { ideals: lcs_chain(l)? })
}

/// `sum_{n>=1} n * (dims[n-1] - dims[n])` for a chain ending in 0.
pub fn growth_degree_from_dims(dims: &[usize]) -> u64 {
    dims.windows(2).enumerate().map(|(n, w)| (n as u64 + 1) * (w[0] - w[1]) as u64).sum()
}

pub fn growth_degree_algebra(l: &LieAlgebraQ) -> Result<u64> {
    Ok(growth_degree_from_dims(&lcs_algebra(l)?.dims()))
}

/// Complements of `C_{j+1}` in `C_j` chosen by echelon extension: the echelon
/// basis vectors of `C_j` whose pivots are not pivots of `C_{j+1}`. Returned
/// grouped by layer, each group in pivot order.
pub fn echelon_complements(chain: &[Subspace]) -> Vec<Vec<Vector>> {
    chain
        .windows(2)
        .map(|w| {
            let (outer, inner) = (&w[0], &w[1]);
            outer
                .basis()
                .iter()
                .zip(outer.pivots())
                .filter(|(_, p)| !inner.pivots().contains(p))
                .map(|(v, _)| v.clone())
                .collect()
        })
        .collect()
}

/// Rewrites `l` in a basis adapted to its lower central series: every `C_j`
/// becomes a span of basis vectors. Returns the new algebra and the new basis
/// vectors in old coordinates, ordered by layer, then pivot.
pub fn to_adapted_basis(l: &LieAlgebraQ) -> Result<(LieAlgebraQ, Vec<Vector>)> {
    let chain = lcs_chain(l)?;
    let new_basis: Vec<Vector> = echelon_complements(&chain).into_iter().flatten().collect();
    let solver = CoordinateSolver::new(new_basis.clone())?;
    let labels = new_basis
        .iter()
        .enumerate()
        .map(|(a, v)| {
            let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
            match nz.as_slice() {
                [i] if v[*i] == Rational::from_integer(1.into()) => l.labels[*i].clone(),
                _ => format!("u{}", a + 1),
            }
        })
        .collect();
    let mut specs = Vec::new();
    for a in 0..new_basis.len() {
        for b in a + 1..new_basis.len() {
            let br = l.bracket(&new_basis[a], &new_basis[b]);
            let coords = solver
                .solve(&br)
                .ok_or_else(|| Error::Internal("bracket left the algebra".into()))?;
            let terms: Vec<(usize, Rational)> =
                coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            if !terms.is_empty() {
                specs.push(BracketSpec { i: a, j: b, terms });
            }
        }
    }
    Ok((LieAlgebraQ::new(labels, &specs)?, new_basis))
}

/// A decomposition `L = w_1 + ... + w_r` into spans of basis vectors with
/// `w_j + ... + w_r = C_{j-1}`. `layers[0]` is `w_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedDecomposition {
    pub layers: Vec<Vec<usize>>,
}

impl GradedDecomposition {
    /// Weight (1-based layer) of every basis index.
    pub fn weights(&self, dim: usize) -> Vec<usize> {
        let mut w = vec![0; dim];
        for (j, layer) in self.layers.iter().enumerate() {
            for &i in layer {
                w[i] = j + 1;
            }
        }
        w
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Checks that the layers partition the basis and match the lower
    /// central series of `l`.
    pub fn validate(&self, l: &LieAlgebraQ) -> Result<()> {
        let mut seen = vec![false; l.dim()];
        for &i in self.layers.iter().flatten() {
            if i >= l.dim() || seen[i] {
                return Err(Error::Domain(format!("grading index {i} repeated or out of range")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("grading does not cover the basis".into()));
        }
        let chain = lcs_chain(l)?;
        if chain.len() != self.layers.len() + 1 {
            return Err(Error::Domain(format!(
                "grading has {} layers but the algebra has class {}",
                self.layers.len(),
                chain.len() - 1
            )));
        }
        for (j, ideal) in chain.iter().enumerate() {
            let vecs: Vec<Vector> =
                self.layers[j.min(self.layers.len())..].iter().flatten().map(|&i| l.basis_vector(i)).collect();
            let span = crate::linalg::span::rref_span_in(l.dim(), &vecs)?;
            if span != *ideal {
                return Err(Error::Domain(format!(
                    "layers {}.. do not span C_{j}",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}

/// Layers of an algebra whose basis is already adapted to the lower central
/// series. For other bases call [`to_adapted_basis`] first.
pub fn default_grading(l: &LieAlgebraQ) -> Result<GradedDecomposition> {
    let chain = lcs_chain(l)?;
    let mut layer_of = vec![0usize; l.dim()];
    for (j, ideal) in chain.iter().enumerate().skip(1) {
        for &p in ideal.pivots() {
            layer_of[p] = j;
        }
        let aligned = ideal.basis().iter().all(|row| row.iter().filter(|c| !c.is_zero()).count() == 1);
        if !aligned {
            return Err(Error::Unsupported(format!(
                "basis is not adapted to the lower central series (C_{j} is not a coordinate subspace)"
            )));
        }
    }
    let depth = chain.len() - 1;
    let mut layers = vec![Vec::new(); depth];
    for (i, &j) in layer_of.iter().enumerate() {
        layers[j].push(i);
    }
    Ok(GradedDecomposition { layers })
}

/// The graded associate: `[X, Y]^∞` is the projection of `[X, Y]` onto
/// `w_{i+j}` for `X ∈ w_i`, `Y ∈ w_j`.
pub fn graded_algebra(l: &LieAlgebraQ, d: &GradedDecomposition) -> Result<LieAlgebraQ> {
    d.validate(l)?;
    let weights = d.weights(l.dim());
    let mut specs = Vec::new();
    for a in 0..l.dim() {
        for b in a + 1..l.dim() {
            let target = weights[a] + weights[b];
            let terms: Vec<(usize, Rational)> = l
                .structure(a, b)
                .into_iter()
                .enumerate()
                .filter(|(k, c)| !c.is_zero() && weights[*k] == target)
                .collect();
            if !terms.is_empty() {
                specs.push(BracketSpec { i: a, j: b, terms });
            }
        }
    }
    LieAlgebraQ::new(l.labels.clone(), &specs).map_err(|e| match e {
        Error::InvariantViolation(m) => Error::Internal(format!("graded bracket: {m}")),
        other => other,
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::linalg::rat;

    pub fn spec(i: usize, j: usize, terms: &[(usize, i64)]) -> BracketSpec {
        BracketSpec { i, j, terms: terms.iter().map(|&(k, c)| (k, rat(c))).collect() }
    }

    pub fn heisenberg() -> LieAlgebraQ {
        LieAlgebraQ::from_brackets(3, &[spec(0, 1, &[(2, 1)])]).unwrap()
    }

    pub fn filiform4() -> LieAlgebraQ {
        LieAlgebraQ::from_brackets(4, &[spec(0, 1, &[(2, 1)]), spec(0, 2, &[(3, 1)])]).unwrap()
    }

    /// `[e1,e2] = e3 + e4`, `[e1,e3] = e4`.
    pub fn filiform4_tilted() -> LieAlgebraQ {
        LieAlgebraQ::from_brackets(4, &[spec(0, 1, &[(2, 1), (3, 1)]), spec(0, 2, &[(3, 1)])]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn lcs_examples() {
        assert_eq!(lcs_algebra(&LieAlgebraQ::abelian(3)).unwrap().dims(), vec![3, 0]);
        assert_eq!(lcs_algebra(&heisenberg()).unwrap().dims(), vec![3, 1, 0]);
        assert_eq!(lcs_algebra(&filiform4()).unwrap().dims(), vec![4, 2, 1, 0]);
    }

    #[test]
    fn non_nilpotent_reported() {
        // [h, x] = x: two-dimensional non-abelian, solvable but not nilpotent
        let l = LieAlgebraQ::from_brackets(2, &[spec(0, 1, &[(1, 1)])]).unwrap();
        assert!(l.nilpotency_class().is_none());
        assert!(matches!(lcs_algebra(&l), Err(Error::NotNilpotent(_))));
        assert!(growth_degree_algebra(&l).is_err());
    }

    #[test]
    fn jacobi_violation_rejected() {
        // [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e1 does not satisfy Jacobi
        let r = LieAlgebraQ::from_brackets(
            3,
            &[spec(0, 1, &[(2, 1)]), spec(1, 2, &[(0, 1)]), spec(2, 0, &[(0, 1)])],
        );
        assert!(matches!(r, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn out_of_range_index() {
        let r = LieAlgebraQ::from_brackets(2, &[spec(0, 2, &[(1, 1)])]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn antisymmetry_filled_in() {
        let h = heisenberg();
        assert_eq!(h.structure(1, 0), vec![rat(0), rat(0), rat(-1)]);
        assert_eq!(h.structure(0, 0), vec![rat(0); 3]);
    }

    #[test]
    fn growth_degrees() {
        assert_eq!(growth_degree_algebra(&LieAlgebraQ::abelian(5)).unwrap(), 5);
        assert_eq!(growth_degree_algebra(&heisenberg()).unwrap(), 4);
        assert_eq!(growth_degree_algebra(&filiform4()).unwrap(), 2 + 2 + 3);
    }

    #[test]
    fn default_gradings() {
        assert_eq!(default_grading(&heisenberg()).unwrap().layers, vec![vec![0, 1], vec![2]]);
        assert_eq!(default_grading(&LieAlgebraQ::abelian(3)).unwrap().layers, vec![vec![0, 1, 2]]);
        assert_eq!(
            default_grading(&filiform4()).unwrap().layers,
            vec![vec![0, 1], vec![2], vec![3]]
        );
    }

    #[test]
    fn unadapted_basis_is_reported_then_fixed() {
        // Heisenberg in disguise: [e1,e2] = [e1,e3] = e2 - e3, so C_1 = span(e2 - e3)
        let tilted = LieAlgebraQ::from_brackets(
            3,
            &[spec(0, 1, &[(1, 1), (2, -1)]), spec(0, 2, &[(1, 1), (2, -1)])],
        )
        .unwrap();
        assert_eq!(tilted.nilpotency_class(), Some(2));
        assert!(default_grading(&tilted).is_err());
        let (adapted, basis) = to_adapted_basis(&tilted).unwrap();
        assert_eq!(basis.len(), 3);
        let d = default_grading(&adapted).unwrap();
        d.validate(&adapted).unwrap();
        assert_eq!(lcs_algebra(&adapted).unwrap().dims(), lcs_algebra(&tilted).unwrap().dims());
    }

    #[test]
    fn graded_associate() {
        let h = heisenberg();
        let d = default_grading(&h).unwrap();
        assert_eq!(graded_algebra(&h, &d).unwrap(), h);

        let l = filiform4_tilted();
        let d = default_grading(&l).unwrap();
        assert_eq!(d.layers, vec![vec![0, 1], vec![2], vec![3]]);
        let g = graded_algebra(&l, &d).unwrap();
        assert_eq!(g.structure(0, 1), vec![rat(0), rat(0), rat(1), rat(0)]);
        assert_eq!(g.structure(0, 2), vec![rat(0), rat(0), rat(0), rat(1)]);
        assert_eq!(lcs_algebra(&g).unwrap().dims(), lcs_algebra(&l).unwrap().dims());

        let a = LieAlgebraQ::abelian(3);
        let d = default_grading(&a).unwrap();
        assert_eq!(graded_algebra(&a, &d).unwrap(), a);
    }

    #[test]
    fn bracket_specs_round_trip() {
        let l = filiform4_tilted();
        let back = LieAlgebraQ::new(l.labels().to_vec(), &l.bracket_specs()).unwrap();
        assert_eq!(back, l);
    }
}
