//! Seeded invariant checks shared by the acceptance suite and the property
//! tests. Each check draws one random instance and reports the first
//! violation it finds.

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nilgrowth::liealg::{dilate, graded_algebra, lcs_algebra, ConeVector};
use nilgrowth::linalg::{Rational, RationalMatrix};
use nilgrowth::nilgroup::{exp_nilpotent, log_unitriangular, malcev_lie_algebra, MalcevAlgebra, MatrixGroupDescriptor};
use nilgrowth::wordmetric::{BallTable, Tau};

use super::{dense, random_unitriangular, series_log};

pub type Check = Result<(), String>;

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-6..=6)), BigInt::from(rng.gen_range(1..=4)))
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| random_rational(rng)).collect()
}

/// Malcev algebra of a group generated by two or three random unitriangular
/// matrices of size 3 to 5.
pub fn random_algebra(rng: &mut ChaCha8Rng) -> MalcevAlgebra {
    let n = rng.gen_range(3..=5);
    let k = rng.gen_range(2..=3);
    let gens = (0..k).map(|_| random_unitriangular(rng, n, 2)).collect();
    let g = MatrixGroupDescriptor::with_default_labels("random", gens).expect("unitriangular generators");
    malcev_lie_algebra(&g).expect("Malcev algebra")
}

pub fn antisymmetry(rng: &mut ChaCha8Rng) -> Check {
    let a = random_algebra(rng);
    let x = random_vector(rng, a.dim());
    let y = random_vector(rng, a.dim());
    let xy = a.lie.bracket(&x, &y);
    let yx: Vec<Rational> = a.lie.bracket(&y, &x).into_iter().map(|c| -c).collect();
    if xy != yx {
        return Err(format!("[x,y] != -[y,x] for x={x:?}, y={y:?}"));
    }
    if a.lie.bracket(&x, &x).iter().any(|c| c != &Rational::from_integer(0.into())) {
        return Err("[x,x] != 0".into());
    }
    Ok(())
}

pub fn jacobi(rng: &mut ChaCha8Rng) -> Check {
    let a = random_algebra(rng);
    a.lie.check_jacobi().map_err(|e| e.to_string())?;
    let (x, y, z) = (random_vector(rng, a.dim()), random_vector(rng, a.dim()), random_vector(rng, a.dim()));
    let l = &a.lie;
    let terms = [
        l.bracket(&x, &l.bracket(&y, &z)),
        l.bracket(&y, &l.bracket(&z, &x)),
        l.bracket(&z, &l.bracket(&x, &y)),
    ];
    let sum: Vec<Rational> = (0..a.dim()).map(|i| terms.iter().map(|t| t[i].clone()).sum()).collect();
    if sum.iter().any(|c| *c != Rational::from_integer(0.into())) {
        return Err(format!("Jacobi sum {sum:?}"));
    }
    // the structure constants must also reproduce matrix commutators
    let (mx, my) = (a.matrix(&x), a.matrix(&y));
    let direct = mx.bracket(&my).map_err(|e| e.to_string())?;
    if a.matrix(&l.bracket(&x, &y)) != direct {
        return Err("structure constants disagree with matrix commutators".into());
    }
    Ok(())
}

pub fn lcs_preserved(rng: &mut ChaCha8Rng) -> Check {
    let a = random_algebra(rng);
    let graded = graded_algebra(&a.lie, &a.grading).map_err(|e| e.to_string())?;
    let dims = lcs_algebra(&graded).map_err(|e| e.to_string())?.dims();
    if dims != a.lcs_dims {
        return Err(format!("graded dims {dims:?} vs {:?}", a.lcs_dims));
    }
    a.grading.validate(&graded).map_err(|e| e.to_string())
}

pub fn dilation_automorphism(rng: &mut ChaCha8Rng) -> Check {
    let a = random_algebra(rng);
    let graded = graded_algebra(&a.lie, &a.grading).map_err(|e| e.to_string())?;
    let t = Rational::new(BigInt::from(rng.gen_range(1..=9)), BigInt::from(rng.gen_range(1..=4)));
    let x = random_vector(rng, a.dim());
    let y = random_vector(rng, a.dim());
    let d = |v: Vec<Rational>| -> Result<Vec<Rational>, String> {
        let out = dilate(&t, &ConeVector::Exact(v), &a.grading).map_err(|e| e.to_string())?;
        Ok(out.exact().expect("exact dilation").to_vec())
    };
    let lhs = d(graded.bracket(&x, &y))?;
    let rhs = graded.bracket(&d(x.clone())?, &d(y.clone())?);
    if lhs != rhs {
        return Err(format!("δ_t[x,y] != [δ_t x, δ_t y] for t={t}"));
    }
    Ok(())
}

pub fn exp_log_round_trip(rng: &mut ChaCha8Rng) -> Check {
    let n = rng.gen_range(2..=6);
    let m = random_unitriangular(rng, n, 3);
    let l = log_unitriangular(&m).map_err(|e| e.to_string())?;
    if dense(&l) != series_log(&dense(&m)) {
        return Err("log differs from the series oracle".into());
    }
    if exp_nilpotent(&l).map_err(|e| e.to_string())? != m {
        return Err("exp(log A) != A".into());
    }
    let mut x = RationalMatrix::zeros(n, n);
    let mut rows = x.to_rows();
    for (i, row) in rows.iter_mut().enumerate() {
        for c in row.iter_mut().skip(i + 1) {
            *c = random_rational(rng);
        }
    }
    x = RationalMatrix::from_rows(rows).expect("square");
    let e = exp_nilpotent(&x).map_err(|e| e.to_string())?;
    if log_unitriangular(&e).map_err(|e| e.to_string())? != x {
        return Err("log(exp X) != X".into());
    }
    Ok(())
}

/// `τ(xy) <= τ(x) + τ(y)` and `τ(x^-1) = τ(x)` for random `x, y` in `V^{R/2}`.
pub fn tau_subadditive(rng: &mut ChaCha8Rng, t: &BallTable) -> Check {
    let half = t.ball_range(t.max_radius() / 2).end;
    let (x, tx) = t.entry(rng.gen_range(0..half));
    let (y, ty) = t.entry(rng.gen_range(0..half));
    let xy = t.mul(x, y).ok_or("overflow")?;
    match t.lookup(&xy) {
        Some(v) if v <= tx + ty => {}
        other => return Err(format!("τ(xy) = {other:?} exceeds {} + {}", tx, ty)),
    }
    let inv = t.inverse(x).ok_or("overflow")?;
    if t.tau_search(&inv, 1 << 16) != Tau::Exact(tx) {
        return Err("τ(x^-1) != τ(x)".into());
    }
    Ok(())
}
