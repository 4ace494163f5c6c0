//! JSON descriptors for groups and Lie algebras. Rationals are strings
//! `"p"` or `"p/q"`; unknown fields are rejected.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{BracketSpec, GradedDecomposition, LieAlgebraQ};
use crate::linalg::rational::{format_rational, parse_rational, Rational};
use crate::linalg::RationalMatrix;
use crate::nilgroup::MatrixGroupDescriptor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    MalformedRational(String),
    NonSquareMatrix { rows: usize, cols: usize },
    BracketIndexOutOfRange { index: usize, dim: usize },
    SingularGenerator,
    Invalid(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::MalformedRational(s) => write!(f, "malformed rational {s:?}"),
            ParseErrorKind::NonSquareMatrix { rows, cols } => {
                write!(f, "non-square matrix ({rows} rows, row of length {cols})")
            }
            ParseErrorKind::BracketIndexOutOfRange { index, dim } => {
                write!(f, "bracket index {index} out of range for dimension {dim}")
            }
            ParseErrorKind::SingularGenerator => write!(f, "singular generator"),
            ParseErrorKind::Invalid(m) => write!(f, "invalid descriptor: {m}"),
        }
    }
}

/// Where a parse error occurred: a JSON path, plus line and column for
/// syntax errors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Location {
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}"),
            _ if self.path.is_empty() => write!(f, "top level"),
            _ => write!(f, "{}", self.path),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind} at {location}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub location: Location,
}

impl ParseError {
    fn at(kind: ParseErrorKind, path: impl Into<String>) -> Self {
        Self { kind, location: Location { path: path.into(), line: None, column: None } }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    label: String,
    matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct RawBracket {
    i: usize,
    j: usize,
    terms: Vec<(usize, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Raw {
    MatrixGroup {
        label: String,
        generators: Vec<RawGenerator>,
    },
    LieAlgebra {
        label: String,
        basis: Vec<String>,
        brackets: Vec<RawBracket>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grading: Option<Vec<Vec<usize>>>,
    },
    #[serde(rename = "semidirect_zkz")]
    SemidirectZkZ {
        label: String,
        action: Vec<Vec<String>>,
    },
}

/// A validated descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Descriptor {
    MatrixGroup(MatrixGroupDescriptor),
    LieAlgebra {
        label: String,
        algebra: LieAlgebraQ,
        grading: Option<GradedDecomposition>,
    },
    /// `Z^k ⋊_A Z` with `A ∈ GL(k, Z)`.
    SemidirectZkZ { label: String, action: RationalMatrix },
}

impl Descriptor {
    pub fn label(&self) -> &str {
        match self {
            Descriptor::MatrixGroup(g) => &g.label,
            Descriptor::LieAlgebra { label, .. } | Descriptor::SemidirectZkZ { label, .. } => label,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Descriptor::MatrixGroup(_) => "matrix_group",
            Descriptor::LieAlgebra { .. } => "lie_algebra",
            Descriptor::SemidirectZkZ { .. } => "semidirect_zkz",
        }
    }

    /// Canonical JSON text; parsing it gives back an equal descriptor.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("descriptor serializes")
    }

    fn to_raw(&self) -> Raw {
        let mat = |m: &RationalMatrix| -> Vec<Vec<String>> {
            m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
        };
        match self {
            Descriptor::MatrixGroup(g) => Raw::MatrixGroup {
                label: g.label.clone(),
                generators: g
                    .generator_labels
                    .iter()
                    .zip(&g.generators)
                    .map(|(l, m)| RawGenerator { label: l.clone(), matrix: mat(m) })
                    .collect(),
            },
            Descriptor::LieAlgebra { label, algebra, grading } => Raw::LieAlgebra {
                label: label.clone(),
                basis: algebra.labels().to_vec(),
                brackets: algebra
                    .bracket_specs()
                    .into_iter()
                    .map(|b| RawBracket {
                        i: b.i,
                        j: b.j,
                        terms: b.terms.iter().map(|(k, c)| (*k, format_rational(c))).collect(),
                    })
                    .collect(),
                grading: grading.as_ref().map(|g| g.layers.clone()),
            },
            Descriptor::SemidirectZkZ { label, action } => {
                Raw::SemidirectZkZ { label: label.clone(), action: mat(action) }
            }
        }
    }
}

fn rational(s: &str, path: &str) -> Result<Rational, ParseError> {
    parse_rational(s).ok_or_else(|| ParseError::at(ParseErrorKind::MalformedRational(s.to_string()), path))
}

fn matrix(rows: &[Vec<String>], path: &str) -> Result<RationalMatrix, ParseError> {
    let n = rows.len();
    if n == 0 {
        return Err(ParseError::at(ParseErrorKind::Invalid("empty matrix".into()), path));
    }
    let mut parsed = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(ParseError::at(
                ParseErrorKind::NonSquareMatrix { rows: n, cols: row.len() },
                format!("{path}[{i}]"),
            ));
        }
        parsed.push(
            row.iter()
                .enumerate()
                .map(|(j, s)| rational(s, &format!("{path}[{i}][{j}]")))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(RationalMatrix::from_rows(parsed).expect("square rows"))
}

fn invalid(msg: impl Into<String>, path: &str) -> ParseError {
    ParseError::at(ParseErrorKind::Invalid(msg.into()), path)
}

fn validate(raw: Raw) -> Result<Descriptor, ParseError> {
    match raw {
        Raw::MatrixGroup { label, generators } => {
            if generators.is_empty() {
                return Err(invalid("a group needs at least one generator", "generators"));
            }
            let mut labels = Vec::new();
            let mut mats = Vec::new();
            for (i, g) in generators.iter().enumerate() {
                let path = format!("generators[{i}]");
                if g.label.is_empty() || g.label.contains(char::is_whitespace) || g.label.contains('^') {
                    return Err(invalid(format!("bad generator label {:?}", g.label), &path));
                }
                if labels.contains(&g.label) {
                    return Err(invalid(format!("duplicate generator label {:?}", g.label), &path));
                }
                let m = matrix(&g.matrix, &format!("{path}.matrix"))?;
                if let Some(first) = mats.first() {
                    let first: &RationalMatrix = first;
                    if first.rows() != m.rows() {
                        return Err(invalid(
                            format!("generator has size {} but the first has size {}", m.rows(), first.rows()),
                            &path,
                        ));
                    }
                }
                if m.determinant().map_or(true, |d| num_traits::Zero::is_zero(&d)) {
                    return Err(ParseError::at(ParseErrorKind::SingularGenerator, path));
                }
                labels.push(g.label.clone());
                mats.push(m);
            }
            MatrixGroupDescriptor::new(label, labels, mats)
                .map(Descriptor::MatrixGroup)
                .map_err(|e| invalid(e.to_string(), "generators"))
        }
        Raw::LieAlgebra { label, basis, brackets, grading } => {
            let dim = basis.len();
            let mut specs = Vec::with_capacity(brackets.len());
            for (n, b) in brackets.iter().enumerate() {
                let path = format!("brackets[{n}]");
                for idx in [b.i, b.j] {
                    if idx >= dim {
                        return Err(ParseError::at(ParseErrorKind::BracketIndexOutOfRange { index: idx, dim }, &path));
                    }
                }
                let mut terms = Vec::with_capacity(b.terms.len());
                for (t, (k, c)) in b.terms.iter().enumerate() {
                    let tpath = format!("{path}.terms[{t}]");
                    if *k >= dim {
                        return Err(ParseError::at(ParseErrorKind::BracketIndexOutOfRange { index: *k, dim }, &tpath));
                    }
                    terms.push((*k, rational(c, &tpath)?));
                }
                specs.push(BracketSpec { i: b.i, j: b.j, terms });
            }
            let algebra = LieAlgebraQ::new(basis, &specs).map_err(|e| invalid(e.to_string(), "brackets"))?;
            let grading = match grading {
                Some(layers) => {
                    let g = GradedDecomposition { layers };
                    g.validate(&algebra).map_err(|e| invalid(e.to_string(), "grading"))?;
                    Some(g)
                }
                None => None,
            };
            Ok(Descriptor::LieAlgebra { label, algebra, grading })
        }
        Raw::SemidirectZkZ { label, action } => {
            let a = matrix(&action, "action")?;
            let det = a.determinant().map_err(|e| invalid(e.to_string(), "action"))?;
            if num_traits::Zero::is_zero(&det) {
                return Err(ParseError::at(ParseErrorKind::SingularGenerator, "action"));
            }
            if !a.is_integral() || !(num_traits::One::is_one(&det) || num_traits::One::is_one(&-det)) {
                return Err(invalid("action must lie in GL(k, Z)", "action"));
            }
            Ok(Descriptor::SemidirectZkZ { label, action: a })
        }
    }
}

pub fn parse_descriptor(text: &str) -> Result<Descriptor, ParseError> {
    let raw: Raw = serde_json::from_str(text).map_err(|e| ParseError {
        // the location is reported separately
        kind: ParseErrorKind::Syntax({
            let m = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            m.strip_suffix(&suffix).map_or(m.clone(), str::to_string)
        }),
        location: Location {
            path: String::new(),
            line: (e.line() > 0).then(|| e.line()),
            column: (e.line() > 0).then(|| e.column()),
        },
    })?;
    validate(raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::frac;

    const HEIS: &str = r#"{
        "kind": "matrix_group",
        "label": "heisenberg",
        "generators": [
            {"label": "a", "matrix": [["1","1","0"],["0","1","0"],["0","0","1"]]},
            {"label": "b", "matrix": [["1","0","0"],["0","1","1"],["0","0","1"]]}
        ]
    }"#;

    #[test]
    fn matrix_group() {
        match parse_descriptor(HEIS).unwrap() {
            Descriptor::MatrixGroup(g) => {
                assert_eq!(g.generators.len(), 2);
                assert_eq!(g.ambient_size, 3);
                assert!(g.certified_unitriangular);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_coefficient() {
        let text = r#"{"kind":"lie_algebra","label":"h","basis":["x","y","z"],
            "brackets":[{"i":0,"j":1,"terms":[[2,"1/2"]]}]}"#;
        let Descriptor::LieAlgebra { algebra, .. } = parse_descriptor(text).unwrap() else { panic!() };
        assert_eq!(algebra.structure(0, 1)[2], frac(1, 2));
    }

    #[test]
    fn distinct_errors() {
        let singular = r#"{"kind":"matrix_group","label":"s","generators":[{"label":"a","matrix":[["1","2"],["2","4"]]}]}"#;
        let e = parse_descriptor(singular).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::SingularGenerator);
        assert!(e.to_string().contains("singular generator"));

        let bad_q = r#"{"kind":"matrix_group","label":"s","generators":[{"label":"a","matrix":[["1","x/2"],["0","1"]]}]}"#;
        let e = parse_descriptor(bad_q).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MalformedRational("x/2".into()));
        assert_eq!(e.location.path, "generators[0].matrix[0][1]");

        let zero_den = r#"{"kind":"semidirect_zkz","label":"s","action":[["1","1/0"],["0","1"]]}"#;
        assert!(matches!(parse_descriptor(zero_den).unwrap_err().kind, ParseErrorKind::MalformedRational(_)));

        let ragged = r#"{"kind":"matrix_group","label":"s","generators":[{"label":"a","matrix":[["1","0"],["0"]]}]}"#;
        assert_eq!(
            parse_descriptor(ragged).unwrap_err().kind,
            ParseErrorKind::NonSquareMatrix { rows: 2, cols: 1 }
        );

        let range = r#"{"kind":"lie_algebra","label":"l","basis":["x","y"],"brackets":[{"i":0,"j":1,"terms":[[2,"1"]]}]}"#;
        assert_eq!(
            parse_descriptor(range).unwrap_err().kind,
            ParseErrorKind::BracketIndexOutOfRange { index: 2, dim: 2 }
        );

        let unknown = r#"{"kind":"matrix_group","label":"s","colour":"red","generators":[]}"#;
        let e = parse_descriptor(unknown).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(ref m) if m.contains("colour")));

        let truncated = "{\n  \"kind\": \"matrix_group\",\n  \"label\": ";
        let e = parse_descriptor(truncated).unwrap_err();
        assert_eq!(e.location.line, Some(3));
    }

    #[test]
    fn round_trip() {
        let d = parse_descriptor(HEIS).unwrap();
        assert_eq!(parse_descriptor(&d.to_json()).unwrap(), d);
        let text = r#"{"kind":"lie_algebra","label":"f","basis":["a","b","c","d"],
            "brackets":[{"i":0,"j":1,"terms":[[2,"1"],[3,"-2/3"]]},{"i":0,"j":2,"terms":[[3,"1"]]}],
            "grading":[[0,1],[2],[3]]}"#;
        let d = parse_descriptor(text).unwrap();
        assert_eq!(parse_descriptor(&d.to_json()).unwrap(), d);
        let s = parse_descriptor(r#"{"kind":"semidirect_zkz","label":"r","action":[["0","-1"],["1","0"]]}"#).unwrap();
        assert_eq!(parse_descriptor(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn semidirect_needs_gl_z() {
        let e = parse_descriptor(r#"{"kind":"semidirect_zkz","label":"r","action":[["2","0"],["0","1"]]}"#).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Invalid(_)));
    }
}
