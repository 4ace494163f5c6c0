use num_traits::{Signed, Zero};
use serde::Serialize;

use super::GradedDecomposition;
use crate::error::{Error, Result};
use crate::linalg::rational::{to_f64, Rational};

/// Coefficients over an adapted basis, exact or floating.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "coefficients", rename_all = "snake_case")]
pub enum ConeVector {
    #[serde(serialize_with = "ser_exact")]
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

fn ser_exact<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for q in v {
        seq.serialize_element(&q.to_string())?;
    }
    seq.end()
}

impl ConeVector {
    pub fn len(&self) -> usize {
        match self {
            ConeVector::Exact(v) => v.len(),
            ConeVector::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ConeVector::Exact(_))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            ConeVector::Exact(v) => v.iter().map(to_f64).collect(),
            ConeVector::Approx(v) => v.clone(),
        }
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match self {
            ConeVector::Exact(v) => Some(v),
            ConeVector::Approx(_) => None,
        }
    }

    /// Largest absolute coefficient, per layer.
    pub fn layer_norms(&self, d: &GradedDecomposition) -> Vec<f64> {
        match self {
            ConeVector::Exact(v) => d
                .layers
                .iter()
                .map(|layer| {
                    layer.iter().map(|&i| v[i].abs()).max().map_or(0.0, |q| to_f64(&q))
                })
                .collect(),
            ConeVector::Approx(v) => d
                .layers
                .iter()
                .map(|layer| layer.iter().map(|&i| v[i].abs()).fold(0.0, f64::max))
                .collect(),
        }
    }
}

/// Homogeneous quasi-norm `max_j |X_j|^(1/j)` with the max-abs norm on each layer.
pub fn quasi_norm(x: &ConeVector, d: &GradedDecomposition) -> f64 {
    x.layer_norms(d)
        .into_iter()
        .enumerate()
        .map(|(j, n)| if n == 0.0 { 0.0 } else { n.powf(1.0 / (j as f64 + 1.0)) })
        .fold(0.0, f64::max)
}

/// `δ_t`: multiplies the layer-`j` part by `t^j`. Exact vectors stay exact.
pub fn dilate(t: &Rational, x: &ConeVector, d: &GradedDecomposition) -> Result<ConeVector> {
    if !t.is_positive() {
        return Err(Error::Domain(format!("dilation factor must be positive, got {t}")));
    }
    let weights = d.weights(x.len());
    match x {
        ConeVector::Exact(v) => {
            let mut powers = vec![Rational::from_integer(1.into())];
            for j in 1..=d.depth() {
                let next = &powers[j - 1] * t;
                powers.push(next);
            }
            Ok(ConeVector::Exact(
                v.iter()
                    .zip(&weights)
                    .map(|(c, &w)| if c.is_zero() { c.clone() } else { c * &powers[w] })
                    .collect(),
            ))
        }
        ConeVector::Approx(v) => {
            let tf = to_f64(t);
            Ok(ConeVector::Approx(v.iter().zip(&weights).map(|(c, &w)| c * tf.powi(w as i32)).collect()))
        }
    }
}

/// Floating dilation for irrational factors.
pub fn dilate_approx(t: f64, x: &ConeVector, d: &GradedDecomposition) -> Result<ConeVector> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("dilation factor must be positive, got {t}")));
    }
    let weights = d.weights(x.len());
    Ok(ConeVector::Approx(x.to_f64().iter().zip(&weights).map(|(c, &w)| c * t.powi(w as i32)).collect()))
}
