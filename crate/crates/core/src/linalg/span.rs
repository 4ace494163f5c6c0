//! Subspaces of `Q^n` kept in reduced row echelon form.

use num_traits::{One, Zero};

use super::rational::Rational;
use crate::error::{Error, Result};

/// A subspace given by its reduced echelon basis. Rows are sorted by pivot
/// column and every pivot column is zero outside its own row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let mut s = Self::zero(ambient);
        for i in 0..ambient {
            let mut e = vec![Rational::zero(); ambient];
            e[i] = Rational::one();
            s.basis.push(e);
            s.pivots.push(i);
        }
        s
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: v.len() });
        }
        Ok(())
    }

    /// Residual of `v` after clearing every pivot column.
    pub fn reduce(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        self.check(v)?;
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, b) in r.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        Ok(r)
    }

    pub fn contains(&self, v: &[Rational]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(Zero::is_zero))
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rational]) -> Result<bool> {
        let mut r = self.reduce(v)?;
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let lead = r[p].recip();
        for x in r.iter_mut() {
            *x *= &lead;
        }
        for row in self.basis.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, b) in row.iter_mut().zip(&r) {
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        Ok(true)
    }

    /// Coordinates of `v` against the echelon basis, or `None` when `v` is
    /// outside the span.
    pub fn coordinates(&self, v: &[Rational]) -> Result<Option<Vec<Rational>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Echelon basis and dimension of the span of `vectors`.
pub fn rref_span(vectors: &[Vec<Rational>]) -> Result<Subspace> {
    let ambient = vectors.first().map_or(0, Vec::len);
    rref_span_in(ambient, vectors)
}

pub fn rref_span_in(ambient: usize, vectors: &[Vec<Rational>]) -> Result<Subspace> {
    let mut s = Subspace::zero(ambient);
    for v in vectors {
        s.insert(v)?;
    }
    Ok(s)
}

/// Solves for `x` with `sum_i x_i * columns[i] = target`, if possible. The
/// columns must be linearly independent.
#[derive(Clone, Debug)]
pub struct CoordinateSolver {
    rows: Vec<usize>,
    inverse: Vec<Vec<Rational>>,
    columns: Vec<Vec<Rational>>,
}

impl CoordinateSolver {
    pub fn new(columns: Vec<Vec<Rational>>) -> Result<Self> {
        let m = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        // pick m rows where the columns are independent: pivot rows of the
        // transposed system
        let mut span = Subspace::zero(m);
        let mut rows = Vec::with_capacity(m);
        for r in 0..n {
            let row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            if span.insert(&row)? {
                rows.push(r);
            }
            if rows.len() == m {
                break;
            }
        }
        if rows.len() != m {
            return Err(Error::Internal("coordinate basis is linearly dependent".into()));
        }
        let square: Vec<Vec<Rational>> =
            rows.iter().map(|&r| columns.iter().map(|c| c[r].clone()).collect()).collect();
        let inv = super::matrix::RationalMatrix::from_rows(square)?.inverse()?;
        Ok(Self { rows, inverse: inv.to_rows(), columns })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Vec<Rational>] {
        &self.columns
    }

    /// Coordinates assuming `target` lies in the span (not verified).
    pub fn solve_unchecked(&self, target: &[Rational]) -> Vec<Rational> {
        self.inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.rows)
                    .filter(|(a, &r)| !a.is_zero() && !target[r].is_zero())
                    .map(|(a, &r)| a * &target[r])
                    .sum()
            })
            .collect()
    }

    pub fn combine(&self, coords: &[Rational]) -> Vec<Rational> {
        let n = self.columns.first().map_or(0, Vec::len);
        let mut out = vec![Rational::zero(); n];
        for (c, col) in coords.iter().zip(&self.columns) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(col) {
                if !x.is_zero() {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// Coordinates of `target`, or `None` when it is outside the span.
    pub fn solve(&self, target: &[Rational]) -> Option<Vec<Rational>> {
        let x = self.solve_unchecked(target);
        (self.combine(&x) == target).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::rat;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn identity_case() {
        let s = rref_span(&[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[v(&[1, 0]), v(&[0, 1])]);
    }

    #[test]
    fn dependent_rows() {
        let s = rref_span(&[v(&[2, 4]), v(&[1, 2])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), &[v(&[1, 2])]);
    }

    #[test]
    fn mismatched_dimension() {
        let err = rref_span(&[v(&[1, 0]), v(&[1, 0, 0])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn coordinate_solver() {
        let cols = vec![v(&[1, 1, 0]), v(&[0, 1, 1])];
        let s = CoordinateSolver::new(cols).unwrap();
        assert_eq!(s.solve(&v(&[2, 5, 3])), Some(v(&[2, 3])));
        assert_eq!(s.solve(&v(&[1, 0, 1])), None);
    }
}
