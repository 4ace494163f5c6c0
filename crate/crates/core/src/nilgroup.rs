//! Torsion-free nilpotent groups as groups of unitriangular rational matrices.
//!
//! The rational span of the generator logarithms, closed under the matrix
//! commutator, is the Lie algebra of the Malcev completion. Everything else
//! here (isolator layers, Hirsch rank, coordinates of the second kind) is
//! exact linear algebra inside that span.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{
    bch, echelon_complements, growth_degree_from_dims, BracketSpec, GradedDecomposition, LieAlgebraQ,
    Vector,
};
use crate::linalg::rational::{factorial, rat, Rational};
use crate::linalg::{jordan_chevalley, quasi_unipotent_test, CoordinateSolver, RationalMatrix, Subspace};

/// A group generated by finitely many invertible rational matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroupDescriptor {
    pub label: String,
    pub ambient_size: usize,
    pub generators: Vec<RationalMatrix>,
    pub generator_labels: Vec<String>,
    /// Every generator is upper unitriangular. Computed, never taken on trust.
    pub certified_unitriangular: bool,
}

impl MatrixGroupDescriptor {
    pub fn new(
        label: impl Into<String>,
        generator_labels: Vec<String>,
        generators: Vec<RationalMatrix>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Domain("a group needs at least one generator".into()));
        }
        if generator_labels.len() != generators.len() {
            return Err(Error::DimensionMismatch {
                expected: generators.len(),
                found: generator_labels.len(),
            });
        }
        let n = generators[0].rows();
        for g in &generators {
            if !g.is_square() || g.rows() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.rows().max(g.cols()) });
            }
            if g.determinant()?.is_zero() {
                return Err(Error::Singular);
            }
        }
        let certified_unitriangular = generators.iter().all(RationalMatrix::is_unitriangular);
        Ok(Self {
            label: label.into(),
            ambient_size: n,
            generators,
            generator_labels,
            certified_unitriangular,
        })
    }

    /// Generators with default labels `a, b, c, ...`.
    pub fn with_default_labels(label: impl Into<String>, generators: Vec<RationalMatrix>) -> Result<Self> {
        let labels = (0..generators.len()).map(default_label).collect();
        Self::new(label, labels, generators)
    }

    /// The symmetrized generating set `S ∪ S^{-1}` without the identity and
    /// without repeats, in generator order (each generator followed by its
    /// inverse).
    pub fn symmetric_generators(&self) -> Result<Vec<RationalMatrix>> {
        let mut out: Vec<RationalMatrix> = Vec::new();
        for g in &self.generators {
            for h in [g.clone(), g.inverse()?] {
                if !h.is_identity() && !out.contains(&h) {
                    out.push(h);
                }
            }
        }
        Ok(out)
    }

    pub fn identity(&self) -> RationalMatrix {
        RationalMatrix::identity(self.ambient_size)
    }

    pub fn generator(&self, label: &str) -> Option<&RationalMatrix> {
        self.generator_labels.iter().position(|l| l == label).map(|i| &self.generators[i])
    }

    /// Evaluates a word such as `"a b a^-1 b^-1"` or `"a^2 b^3"`. The empty
    /// word is the identity.
    pub fn evaluate_word(&self, word: &str) -> Result<RationalMatrix> {
        let mut acc = self.identity();
        for token in word.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Domain(format!("bad exponent in word token {token:?}")))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let g = self
                .generator(name)
                .ok_or_else(|| Error::Domain(format!("unknown generator {name:?} in word")))?;
            acc = acc.mul(&g.powi(exp)?)?;
        }
        Ok(acc)
    }
}

fn default_label(i: usize) -> String {
    let letters = "abcdefghijklmnopqrstuvwxyz";
    if i < letters.len() {
        letters[i..=i].to_string()
    } else {
        format!("g{}", i + 1)
    }
}

/// `log(M) = sum_{k>=1} (-1)^(k+1) (M - I)^k / k`, for unipotent `M`.
pub fn log_unipotent(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_square() {
        return Err(Error::Unsupported("logarithm of a non-square matrix".into()));
    }
    let n = m.rows();
    let x = m.sub(&RationalMatrix::identity(n))?;
    if !x.pow(n as u64)?.is_zero() {
        return Err(Error::Unsupported("logarithm needs a unipotent matrix".into()));
    }
    let mut acc = RationalMatrix::zeros(n, n);
    let mut power = x.clone();
    for k in 1..n.max(1) {
        if power.is_zero() {
            break;
        }
        let c = if k % 2 == 1 { rat(1) } else { rat(-1) } / rat(k as i64);
        acc = acc.add(&power.scale(&c))?;
        power = power.mul(&x)?;
    }
    Ok(acc)
}

pub fn log_unitriangular(m: &RationalMatrix) -> Result<RationalMatrix> {
    if !m.is_unitriangular() {
        return Err(Error::Unsupported("logarithm needs an upper unitriangular matrix".into()));
    }
    log_unipotent(m)
}

/// `exp(X) = sum_k X^k / k!`, for nilpotent `X`.
pub fn exp_nilpotent(x: &RationalMatrix) -> Result<RationalMatrix> {
    if !x.is_square() {
        return Err(Error::Unsupported("exponential of a non-square matrix".into()));
    }
    let n = x.rows();
    if !x.is_strictly_upper() && !x.pow(n as u64)?.is_zero() {
        return Err(Error::Unsupported("exponential needs a nilpotent matrix".into()));
    }
    let mut acc = RationalMatrix::identity(n);
    let mut power = x.clone();
    for k in 1..n.max(1) {
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(&factorial(k).recip()))?;
        power = power.mul(x)?;
    }
    Ok(acc)
}

/// Lie algebra of the Malcev completion of a unitriangular group, in a basis
/// adapted to its lower central series.
#[derive(Clone, Debug)]
pub struct MalcevAlgebra {
    pub ambient_size: usize,
    /// Echelon basis of the whole algebra as flattened matrices.
    pub echelon_basis: Subspace,
    /// Adapted basis: layer by layer, within a layer in echelon pivot order.
    pub basis: Vec<RationalMatrix>,
    /// LCS layer (0-based) of each adapted basis vector.
    pub layer_of: Vec<usize>,
    /// `dim C_0, dim C_1, ..., 0`.
    pub lcs_dims: Vec<usize>,
    /// Structure constants of the adapted basis.
    pub lie: LieAlgebraQ,
    pub grading: GradedDecomposition,
    solver: CoordinateSolver,
}

impl MalcevAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a matrix in the adapted basis, `None` if outside the algebra.
    pub fn coordinates(&self, x: &RationalMatrix) -> Option<Vector> {
        self.solver.solve(x.as_flat())
    }

    pub fn matrix(&self, coords: &[Rational]) -> RationalMatrix {
        let n = self.ambient_size;
        RationalMatrix::from_flat(n, n, self.solver.combine(coords)).expect("square shape")
    }

    /// Coordinates of `log x` for a group element `x`.
    pub fn log_coordinates(&self, x: &RationalMatrix) -> Result<Vector> {
        let l = log_unitriangular(x)?;
        self.coordinates(&l)
            .ok_or_else(|| Error::Domain("element is outside the Malcev completion".into()))
    }

    /// Coordinates of the second kind computed from the coordinates of `log x`:
    /// `x = exp(t_1 y_1) ... exp(t_m y_m)`.
    pub fn second_kind_from_log(&self, log_coords: &[Rational]) -> Result<Vector> {
        let mut rest = log_coords.to_vec();
        let mut t = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let ti = rest[i].clone();
            if !ti.is_zero() {
                let mut step = vec![Rational::zero(); self.dim()];
                step[i] = -ti.clone();
                rest = bch(&self.lie, &step, &rest)?;
            }
            t.push(ti);
        }
        debug_assert!(rest.iter().all(Zero::is_zero));
        Ok(t)
    }

    /// `exp(t_1 y_1) ... exp(t_m y_m)`.
    pub fn ordered_product(&self, t: &[Rational]) -> Result<RationalMatrix> {
        let mut acc = RationalMatrix::identity(self.ambient_size);
        for (ti, y) in t.iter().zip(&self.basis) {
            if !ti.is_zero() {
                acc = acc.mul(&exp_nilpotent(&y.scale(ti))?)?;
            }
        }
        Ok(acc)
    }

    pub fn labels(&self) -> &[String] {
        self.lie.labels()
    }
}

/// Smallest rational Lie algebra containing the logarithms of the generators.
pub fn malcev_lie_algebra(g: &MatrixGroupDescriptor) -> Result<MalcevAlgebra> {
    if !g.certified_unitriangular {
        return Err(Error::Unsupported(format!(
            "group {:?} is not certified unitriangular",
            g.label
        )));
    }
    let n = g.ambient_size;
    let flat = n * n;
    let bound = n * (n - 1) / 2;
    let mut span = Subspace::zero(flat);
    let mut elems: Vec<RationalMatrix> = Vec::new();
    let mut labels_by_elem: Vec<Option<String>> = Vec::new();
    for (gen, label) in g.generators.iter().zip(&g.generator_labels) {
        let l = log_unitriangular(gen)?;
        if span.insert(l.as_flat())? {
            elems.push(l);
            labels_by_elem.push(Some(label.clone()));
        }
    }
    // bracket closure
    let mut i = 0;
    while i < elems.len() {
        for j in 0..i {
            let b = elems[j].bracket(&elems[i])?;
            if span.insert(b.as_flat())? {
                elems.push(b);
                labels_by_elem.push(None);
                if span.dim() > bound {
                    return Err(Error::Internal("bracket closure exceeded the dimension bound".into()));
                }
            }
        }
        i += 1;
    }
    let mats: Vec<RationalMatrix> = span
        .basis()
        .iter()
        .map(|v| RationalMatrix::from_flat(n, n, v.clone()).expect("square"))
        .collect();

    // lower central series as subspaces of the flattened matrices
    let mut chain = vec![span.clone()];
    while chain.last().map_or(0, Subspace::dim) > 0 {
        let cur = chain.last().expect("nonempty");
        let mut next = Subspace::zero(flat);
        for x in &mats {
            for y in cur.basis() {
                let y = RationalMatrix::from_flat(n, n, y.clone())?;
                next.insert(x.bracket(&y)?.as_flat())?;
            }
        }
        if next.dim() >= cur.dim() {
            return Err(Error::Internal("lower central series of a unitriangular algebra did not descend".into()));
        }
        chain.push(next);
    }
    let lcs_dims: Vec<usize> = chain.iter().map(Subspace::dim).collect();

    let layers = echelon_complements(&chain);
    let mut columns = Vec::new();
    let mut layer_of = Vec::new();
    for (j, layer) in layers.iter().enumerate() {
        for v in layer {
            columns.push(v.clone());
            layer_of.push(j);
        }
    }
    let solver = CoordinateSolver::new(columns.clone())?;
    let basis: Vec<RationalMatrix> =
        columns.iter().map(|v| RationalMatrix::from_flat(n, n, v.clone()).expect("square")).collect();

    let gen_logs: Vec<(RationalMatrix, String)> = elems
        .iter()
        .zip(&labels_by_elem)
        .filter_map(|(m, l)| l.clone().map(|l| (m.clone(), l)))
        .collect();
    let labels: Vec<String> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| {
            gen_logs
                .iter()
                .find(|(m, _)| m == b)
                .map(|(_, l)| l.clone())
                .unwrap_or_else(|| format!("y{}", i + 1))
        })
        .collect();

    let mut specs = Vec::new();
    for a in 0..basis.len() {
        for b in a + 1..basis.len() {
            let br = basis[a].bracket(&basis[b])?;
            let coords = solver
                .solve(br.as_flat())
                .ok_or_else(|| Error::Internal("bracket closure incomplete".into()))?;
            let terms: Vec<(usize, Rational)> =
                coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            if !terms.is_empty() {
                specs.push(BracketSpec { i: a, j: b, terms });
            }
        }
    }
    let lie = LieAlgebraQ::new(labels, &specs)?;
    let mut grading_layers = vec![Vec::new(); layers.len()];
    for (i, &j) in layer_of.iter().enumerate() {
        grading_layers[j].push(i);
    }
    Ok(MalcevAlgebra {
        ambient_size: n,
        echelon_basis: span,
        basis,
        layer_of,
        lcs_dims,
        lie,
        grading: GradedDecomposition { layers: grading_layers },
        solver,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupGrowth {
    pub degree: u64,
    /// Hirsch rank, the dimension of the Malcev completion.
    pub rank: usize,
    pub lcs_dims: Vec<usize>,
    /// Ranks of the successive quotients `H_{n-1} / H_n`.
    pub layer_ranks: Vec<usize>,
}

impl GroupGrowth {
    pub fn from_lcs_dims(lcs_dims: Vec<usize>) -> Self {
        Self {
            degree: growth_degree_from_dims(&lcs_dims),
            rank: lcs_dims.first().copied().unwrap_or(0),
            layer_ranks: lcs_dims.windows(2).map(|w| w[0] - w[1]).collect(),
            lcs_dims,
        }
    }
}

/// Polynomial growth degree `d = sum_n n * rk(H_{n-1}/H_n)` of a unitriangular group.
pub fn growth_degree_group(g: &MatrixGroupDescriptor) -> Result<GroupGrowth> {
    let a = malcev_lie_algebra(g)?;
    Ok(GroupGrowth::from_lcs_dims(a.lcs_dims))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Identity,
    Index(usize),
}

/// Largest `n` with `x ∈ H_n`, i.e. `log x ∈ C_n`.
pub fn layer(x: &RationalMatrix, a: &MalcevAlgebra) -> Result<Layer> {
    let coords = a.log_coordinates(x)?;
    Ok(layer_of_coordinates(&coords, a))
}

pub fn layer_of_coordinates(coords: &[Rational], a: &MalcevAlgebra) -> Layer {
    coords
        .iter()
        .zip(&a.layer_of)
        .filter(|(c, _)| !c.is_zero())
        .map(|(_, &l)| l)
        .min()
        .map_or(Layer::Identity, Layer::Index)
}

/// Coordinates of the second kind over the adapted basis, verified by
/// rebuilding the ordered product.
pub fn malcev_coordinates(x: &RationalMatrix, a: &MalcevAlgebra) -> Result<Vector> {
    let t = a.second_kind_from_log(&a.log_coordinates(x)?)?;
    if a.ordered_product(&t)? != *x {
        return Err(Error::Internal("coordinates of the second kind failed to round-trip".into()));
    }
    Ok(t)
}

/// Lie algebra of the nil-shadow of `Z^k ⋊_A Z`: `Q^k ⋊ Q` where the extra
/// basis vector `t` acts by the logarithm of the unipotent part of `A`.
/// Basis order is `v1, ..., vk, t`.
pub fn semidirect_nilshadow(a: &RationalMatrix) -> Result<LieAlgebraQ> {
    let verdict = quasi_unipotent_test(a)?;
    if !verdict.quasi_unipotent {
        return Err(Error::NotPolynomialGrowth {
            factor: verdict.witness.offending_factor.unwrap_or_default(),
        });
    }
    let (_, u) = jordan_chevalley(a)?;
    let nlog = log_unipotent(&u)?;
    let k = a.rows();
    let mut labels: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    labels.push("t".into());
    let mut specs = Vec::new();
    for j in 0..k {
        let terms: Vec<(usize, Rational)> =
            (0..k).filter(|&i| !nlog[(i, j)].is_zero()).map(|i| (i, nlog[(i, j)].clone())).collect();
        if !terms.is_empty() {
            specs.push(BracketSpec { i: k, j, terms });
        }
    }
    LieAlgebraQ::new(labels, &specs)
}

/// Faithful matrix realization of `Z^k ⋊_A Z` for `A ∈ GL(k, Z)`:
/// `t = diag([[A, 0], [0, 1]], [[1, 1], [0, 1]])`, `v_i` the unit translations.
pub fn semidirect_group(label: impl Into<String>, a: &RationalMatrix) -> Result<MatrixGroupDescriptor> {
    let k = a.rows();
    if !a.is_square() {
        return Err(Error::Unsupported("semidirect action needs a square matrix".into()));
    }
    let det = a.determinant()?;
    if !a.is_integral() || !(det.is_one() || (-det).is_one()) {
        return Err(Error::Unsupported("semidirect action needs a matrix in GL(k, Z)".into()));
    }
    let mut affine_t = RationalMatrix::identity(k + 1);
    for i in 0..k {
        for j in 0..k {
            affine_t[(i, j)] = a[(i, j)].clone();
        }
    }
    let shear = RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]);
    let mut gens = vec![RationalMatrix::block_diag(&[&affine_t, &shear])];
    let mut labels = vec!["t".to_string()];
    for i in 0..k {
        let mut tr = RationalMatrix::identity(k + 1);
        tr[(i, k)] = Rational::one();
        gens.push(RationalMatrix::block_diag(&[&tr, &RationalMatrix::identity(2)]));
        labels.push(format!("v{}", i + 1));
    }
    MatrixGroupDescriptor::new(label, labels, gens)
}

/// Elementary unitriangular matrix `I + E_{ij}`.
pub fn elementary(n: usize, i: usize, j: usize) -> RationalMatrix {
    let mut m = RationalMatrix::identity(n);
    m[(i, j)] = Rational::one();
    m
}

/// Discrete Heisenberg group generated by `a = I + E_12`, `b = I + E_23`.
pub fn heisenberg() -> MatrixGroupDescriptor {
    MatrixGroupDescriptor::new("heisenberg", vec!["a".into(), "b".into()], vec![elementary(3, 0, 1), elementary(3, 1, 2)])
        .expect("valid generators")
}

/// Unitriangular integer group `UT(n, Z)` generated by the elementary
/// matrices on the first superdiagonal.
pub fn unitriangular(n: usize) -> MatrixGroupDescriptor {
    let gens = (0..n - 1).map(|i| elementary(n, i, i + 1)).collect();
    MatrixGroupDescriptor::with_default_labels(format!("ut{n}"), gens).expect("valid generators")
}

/// `Z^k` as diagonal blocks of 2x2 shears.
pub fn free_abelian(k: usize) -> MatrixGroupDescriptor {
    let n = 2 * k;
    let gens = (0..k).map(|i| elementary(n, 2 * i, 2 * i + 1)).collect();
    MatrixGroupDescriptor::with_default_labels(format!("z{k}"), gens).expect("valid generators")
}
