//! Subcommand dispatch, report envelopes and exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::catalog;
use super::descriptor::{parse_descriptor, Descriptor};
use crate::cone::{ball_cloud, cloud_distance, cone_point, distance_matrix_csv, graded_limit_check, CLOUD_CAP, MONOTONE_SLACK};
use crate::error::{Error, Result};
use crate::liealg::{default_grading, lcs_algebra, to_adapted_basis, GradedDecomposition, LieAlgebraQ};
use crate::linalg::rational::{parse_rational, Rational};
use crate::nilgroup::{
    layer, malcev_lie_algebra, semidirect_group, semidirect_nilshadow, GroupGrowth, Layer, MalcevAlgebra,
    MatrixGroupDescriptor,
};
use crate::weights::{theorem_4_2_consistency, Agreement, WeightContext, WeightKind, WeightSpec, GNR_TOLERANCE};
use crate::wordmetric::{
    GammaVerdict, GAMMA_TOLERANCE, PROFILE_SLACK,
    balls_with_budget, conj_growth_sequence, coordinate_growth_profile, doubling_classifier, gamma_estimate,
    growth_report, BallTable, Classification, Tau, DEFAULT_BUDGET, DEFAULT_SEARCH_BUDGET,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Exponent tolerance between generating sets.
pub const ROBUSTNESS_TOLERANCE: f64 = 0.2;
/// Largest accepted `max/min` of `|V^n| / n^d`.
pub const SANDWICH_SPREAD: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Growth,
    Balls,
    Gamma,
    Conj,
    Layers,
    Coords,
    Cone,
    Clouds,
    Gnr,
    Classify,
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Growth => "growth",
            Command::Balls => "balls",
            Command::Gamma => "gamma",
            Command::Conj => "conj",
            Command::Layers => "layers",
            Command::Coords => "coords",
            Command::Cone => "cone",
            Command::Clouds => "clouds",
            Command::Gnr => "gnr",
            Command::Classify => "classify",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// Descriptor file path or `catalog:NAME`.
    pub input: Option<String>,
    pub radius: Option<usize>,
    pub k_max: Option<u64>,
    pub n_list: Option<Vec<u64>>,
    /// Element as a word in the generator labels.
    pub word: Option<String>,
    /// Weight shorthand (`constant`, `polynomial:S`, `exponential:B:IDX`) or a JSON file.
    pub weight: Option<String>,
    pub seed: u64,
    pub budget: usize,
    pub out: Option<PathBuf>,
    pub strict: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            radius: None,
            k_max: None,
            n_list: None,
            word: None,
            weight: None,
            seed: 0,
            budget: DEFAULT_BUDGET,
            out: None,
            strict: false,
        }
    }

    pub fn with_input(mut self, input: impl Into<String>) -> Self {
        self.input = Some(input.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Ok,
    Failure,
    ParseError,
    BudgetExceeded,
    InvariantViolation,
    Inconclusive,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::Failure => 1,
            ExitStatus::ParseError => 2,
            ExitStatus::BudgetExceeded => 3,
            ExitStatus::InvariantViolation => 4,
            ExitStatus::Inconclusive => 5,
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Parse(_) => ExitStatus::ParseError,
            Error::BudgetExceeded { .. } => ExitStatus::BudgetExceeded,
            Error::InvariantViolation(_) => ExitStatus::InvariantViolation,
            _ => ExitStatus::Failure,
        }
    }
}

/// Result of a run: the JSON report, CSV side files, and the exit status.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub report: Value,
    pub side_files: Vec<(String, String)>,
}

impl Outcome {
    pub fn report_text(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes") + "\n"
    }

    /// Writes `report.json` and the side files into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report_text())?;
        for (name, body) in &self.side_files {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

struct Loaded {
    source: String,
    descriptor: Descriptor,
}

fn load(input: Option<&str>) -> Result<Loaded> {
    let source = input.ok_or_else(|| Error::Domain("--input is required for this command".into()))?;
    let descriptor = match source.strip_prefix("catalog:") {
        Some(name) => {
            catalog::lookup(name)
                .ok_or_else(|| {
                    Error::Domain(format!("unknown catalog entry {name:?}; known: {}", catalog::NAMES.join(", ")))
                })?
                .descriptor
        }
        None => parse_descriptor(&fs::read_to_string(source)?)?,
    };
    Ok(Loaded { source: source.to_string(), descriptor })
}

fn digest(d: &Descriptor) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(d.to_json().as_bytes())))
}

/// The group on which words and balls live.
pub fn group_of(d: &Descriptor) -> Result<Option<MatrixGroupDescriptor>> {
    Ok(match d {
        Descriptor::MatrixGroup(g) => Some(g.clone()),
        Descriptor::SemidirectZkZ { label, action } => Some(semidirect_group(label.clone(), action)?),
        Descriptor::LieAlgebra { .. } => None,
    })
}

fn require_group(d: &Descriptor) -> Result<MatrixGroupDescriptor> {
    group_of(d)?.ok_or_else(|| Error::Unsupported(format!("{} descriptors have no word metric", d.kind())))
}

/// The Lie algebra whose lower central series carries the growth invariants.
pub fn algebra_of(d: &Descriptor) -> Result<Option<LieAlgebraQ>> {
    Ok(match d {
        Descriptor::MatrixGroup(g) if g.certified_unitriangular => Some(malcev_lie_algebra(g)?.lie),
        Descriptor::MatrixGroup(_) => None,
        Descriptor::SemidirectZkZ { action, .. } => Some(semidirect_nilshadow(action)?),
        Descriptor::LieAlgebra { algebra, .. } => Some(algebra.clone()),
    })
}

pub fn algebraic_growth(d: &Descriptor) -> Result<Option<GroupGrowth>> {
    match algebra_of(d)? {
        Some(l) => {
            let dims = lcs_algebra(&l)?.dims();
            Ok(Some(GroupGrowth::from_lcs_dims(dims)))
        }
        None => Ok(None),
    }
}

fn graded(l: &LieAlgebraQ, given: Option<&GradedDecomposition>) -> Result<(LieAlgebraQ, GradedDecomposition)> {
    if let Some(g) = given {
        return Ok((l.clone(), g.clone()));
    }
    match default_grading(l) {
        Ok(g) => Ok((l.clone(), g)),
        Err(Error::Unsupported(_)) => {
            let (adapted, _) = to_adapted_basis(l)?;
            let g = default_grading(&adapted)?;
            Ok((adapted, g))
        }
        Err(e) => Err(e),
    }
}

fn unitriangular(g: &MatrixGroupDescriptor) -> Result<MalcevAlgebra> {
    malcev_lie_algebra(g)
}

fn tolerances() -> Value {
    json!({
        "gamma_match": GAMMA_TOLERANCE,
        "exponent_robustness": ROBUSTNESS_TOLERANCE,
        "gnr_tail": GNR_TOLERANCE,
        "graded_limit_slack": MONOTONE_SLACK,
        "sandwich_spread": SANDWICH_SPREAD,
        "coordinate_exponent_slack": PROFILE_SLACK,
        "cloud_cap": CLOUD_CAP,
    })
}

/// Rounds every float to 9 significant decimals so reports print stably.
fn fix_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.9e}").parse().expect("float");
            *v = serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(fix_floats),
        Value::Object(map) => map.values_mut().for_each(fix_floats),
        _ => {}
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

struct Body {
    result: Value,
    inconclusive: bool,
    violation: Option<String>,
    side_files: Vec<(String, String)>,
}

impl Body {
    fn plain(result: Value) -> Self {
        Self { result, inconclusive: false, violation: None, side_files: Vec::new() }
    }
}

fn tables(g: &MatrixGroupDescriptor, radius: usize, budget: usize) -> Result<BallTable> {
    balls_with_budget(g, radius, budget)
}

fn words(cfg: &RunConfig, g: &MatrixGroupDescriptor) -> Vec<String> {
    match &cfg.word {
        Some(w) => vec![w.clone()],
        None => g.generator_labels.clone(),
    }
}

fn cmd_growth(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let algebraic = algebraic_growth(d)?;
    let Some(g) = group_of(d)? else {
        let gg = algebraic.expect("lie algebras always have an algebra");
        return Ok(Body::plain(json!({
            "algebraic": gg,
            "empirical": Value::Null,
            "agreement": Value::Null,
        })));
    };
    let t = tables(&g, cfg.radius.unwrap_or(8), cfg.budget)?;
    let rep = growth_report(&t, algebraic.as_ref());
    let agreement = match (rep.classification, &algebraic) {
        (Classification::Polynomial { degree }, Some(gg)) => Some((i64::from(degree) - gg.degree as i64).abs() <= 1),
        (Classification::Exponential, Some(_)) => Some(false),
        (Classification::Polynomial { .. }, None) => None,
        (Classification::Exponential, None) => Some(true),
        (Classification::Inconclusive, _) => None,
    };
    let inconclusive = agreement.is_none();
    let csv = sizes_csv(t.sizes());
    Ok(Body {
        result: json!({ "algebraic": algebraic, "empirical": rep, "agreement": agreement }),
        inconclusive,
        violation: None,
        side_files: vec![("balls.csv".into(), csv)],
    })
}

fn sizes_csv(sizes: &[usize]) -> String {
    let mut out = String::from("radius,size\n");
    for (r, s) in sizes.iter().enumerate() {
        out.push_str(&format!("{r},{s}\n"));
    }
    out
}

fn cmd_balls(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let t = tables(&g, cfg.radius.unwrap_or(8), cfg.budget)?;
    let mut body = Body::plain(json!({
        "max_radius": t.max_radius(),
        "sizes": t.sizes(),
        "integral_keys": t.is_integral(),
    }));
    body.side_files.push(("balls.csv".into(), sizes_csv(t.sizes())));
    Ok(body)
}

fn cmd_classify(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let t = tables(&g, cfg.radius.unwrap_or(10), cfg.budget)?;
    let rep = doubling_classifier(t.sizes());
    Ok(Body {
        inconclusive: rep.classification == Classification::Inconclusive,
        result: json!({ "sizes": t.sizes(), "doubling": rep }),
        violation: None,
        side_files: vec![("balls.csv".into(), sizes_csv(t.sizes()))],
    })
}

fn cmd_gamma(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let t = tables(&g, cfg.radius.unwrap_or(8), cfg.budget)?;
    let k_max = cfg.k_max.unwrap_or(32);
    let a = if g.certified_unitriangular { Some(unitriangular(&g)?) } else { None };
    let mut inconclusive = false;
    let mut violation = None;
    let mut rows = Vec::new();
    for w in words(cfg, &g) {
        let x = g.evaluate_word(&w)?;
        let est = gamma_estimate(&x, &t, k_max, DEFAULT_SEARCH_BUDGET)?;
        let lay = a.as_ref().map(|a| layer(&x, a)).transpose()?;
        let consistent = match (lay, est.matched_j, est.verdict) {
            (Some(Layer::Index(n)), Some(j), GammaVerdict::Estimated) => Some(j as usize == n + 1),
            _ => None,
        };
        if est.verdict == GammaVerdict::Inconclusive || (est.verdict == GammaVerdict::Estimated && est.matched_j.is_none()) {
            inconclusive = true;
        }
        if consistent == Some(false) {
            violation = Some(format!("matched j of {w:?} disagrees with its layer"));
        }
        rows.push(json!({ "word": w, "estimate": est, "layer": lay, "layer_consistent": consistent }));
    }
    Ok(Body { result: json!({ "horizon": t.max_radius(), "elements": rows }), inconclusive, violation, side_files: vec![] })
}

fn cmd_conj(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let n = cfg.radius.unwrap_or(8);
    let t = tables(&g, n, cfg.budget)?;
    let mut inconclusive = false;
    let mut rows = Vec::new();
    for w in words(cfg, &g) {
        let x = g.evaluate_word(&w)?;
        let seq = conj_growth_sequence(&x, n, &t, DEFAULT_SEARCH_BUDGET)?;
        inconclusive |= seq.iter().any(|c| matches!(c.value, Tau::AtLeast(_)));
        rows.push(json!({ "word": w, "sequence": seq }));
    }
    Ok(Body { result: json!({ "elements": rows }), inconclusive, violation: None, side_files: vec![] })
}

fn cmd_layers(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let mut result = json!({ "growth": algebraic_growth(d)? });
    if let Some(g) = group_of(d)?.filter(|g| g.certified_unitriangular) {
        let a = unitriangular(&g)?;
        let mut rows = Vec::new();
        for w in words(cfg, &g) {
            let x = g.evaluate_word(&w)?;
            rows.push(json!({ "word": w, "layer": layer(&x, &a)? }));
        }
        result["basis"] = to_value(&a.labels());
        result["layer_of"] = to_value(&a.layer_of);
        result["elements"] = Value::Array(rows);
    } else if let Some(l) = algebra_of(d)? {
        let given = match d {
            Descriptor::LieAlgebra { grading, .. } => grading.as_ref(),
            _ => None,
        };
        let (adapted, grading) = graded(&l, given)?;
        result["basis"] = to_value(&adapted.labels());
        result["grading"] = to_value(&grading);
    }
    Ok(Body::plain(result))
}

fn cmd_coords(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let a = unitriangular(&g)?;
    let t = tables(&g, cfg.radius.unwrap_or(8), cfg.budget)?;
    let p = coordinate_growth_profile(&t, &a)?;
    let violation = (!p.all_within_bound()).then(|| "a coordinate exponent exceeds its layer bound".to_string());
    Ok(Body { result: to_value(&p), inconclusive: false, violation, side_files: vec![] })
}

fn cmd_cone(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let n_list = cfg.n_list.clone().unwrap_or_else(|| vec![10, 20, 40, 80]);
    let given = match d {
        Descriptor::LieAlgebra { grading, .. } => grading.clone(),
        _ => None,
    };
    let l = algebra_of(d)?.ok_or_else(|| Error::Unsupported("no nilpotent Lie algebra for this descriptor".into()))?;
    let (l, grading) = graded(&l, given.as_ref())?;
    let layer0 = &grading.layers[0];
    let unit = |i: usize| {
        let mut v = vec![Rational::from_integer(0.into()); l.dim()];
        v[i] = Rational::from_integer(1.into());
        v
    };
    let x = unit(layer0[0]);
    let y = unit(*layer0.get(1).unwrap_or(&layer0[0]));
    let check = graded_limit_check(&x, &y, &l, &grading, &n_list)?;
    let mut result = json!({ "basis": l.labels(), "x": l.labels()[layer0[0]], "y": l.labels()[*layer0.get(1).unwrap_or(&layer0[0])], "graded_limit": check });
    if let Some(g) = group_of(d)?.filter(|g| g.certified_unitriangular) {
        let a = unitriangular(&g)?;
        let mut rows = Vec::new();
        for w in words(cfg, &g) {
            let xm = g.evaluate_word(&w)?;
            let pts: Vec<Value> = n_list
                .iter()
                .map(|&n| Ok(json!({ "n": n, "point": cone_point(&xm, n, &a, &a.grading)?.to_f64() })))
                .collect::<Result<_>>()?;
            rows.push(json!({ "word": w, "points": pts }));
        }
        result["cone_points"] = Value::Array(rows);
        result["cone_basis"] = to_value(&a.labels());
    }
    let violation = (!check.passes).then(|| "graded-limit errors do not contract".to_string());
    Ok(Body { result, inconclusive: false, violation, side_files: vec![] })
}

fn cmd_clouds(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let a = unitriangular(&g)?;
    let radius = cfg.radius.unwrap_or(8);
    let n_list: Vec<u64> = cfg
        .n_list
        .clone()
        .unwrap_or_else(|| (radius / 2..=radius).filter(|n| n % 2 == 0 && *n > 0).map(|n| n as u64).collect());
    let top = *n_list.iter().max().ok_or_else(|| Error::Domain("empty scale list".into()))? as usize;
    let t = tables(&g, top, cfg.budget)?;
    let clouds = n_list
        .iter()
        .map(|&n| ball_cloud(&t, n as usize, &a, cfg.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut consecutive = Vec::new();
    for w in clouds.windows(2) {
        consecutive.push(json!({ "from": w[0].radius, "to": w[1].radius, "distance": cloud_distance(&w[0], &w[1])? }));
    }
    let mut side_files: Vec<(String, String)> =
        clouds.iter().map(|c| (format!("cloud_n{}.csv", c.radius), c.to_csv())).collect();
    side_files.push(("distances.csv".into(), distance_matrix_csv(&clouds)?));
    let meta: Vec<Value> = clouds
        .iter()
        .map(|c| {
            json!({
                "radius": c.radius,
                "ball_size": c.ball_size,
                "points": c.points.len(),
                "subsampled": c.subsampled,
                "c2": c.c2,
                "max_quasi_norm": c.max_quasi_norm,
            })
        })
        .collect();
    Ok(Body {
        result: json!({ "basis": a.labels(), "clouds": meta, "consecutive_distances": consecutive }),
        inconclusive: false,
        violation: None,
        side_files,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTableEntry {
    word: String,
    value: f64,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawWeight {
    ConstantOne {
        #[serde(default)]
        symmetrize: bool,
    },
    Polynomial {
        exponent: String,
        #[serde(default)]
        symmetrize: bool,
    },
    CoordinateExponential {
        base: String,
        index: usize,
        #[serde(default)]
        symmetrize: bool,
    },
    Table {
        entries: Vec<RawTableEntry>,
        default: f64,
        #[serde(default)]
        symmetrize: bool,
    },
}

fn number(s: &str) -> Result<f64> {
    parse_rational(s)
        .map(|q| crate::linalg::rational::to_f64(&q))
        .ok_or_else(|| Error::Domain(format!("bad number {s:?} in weight spec")))
}

/// Parses a weight shorthand or a JSON weight file.
pub fn parse_weight(spec: &str, g: &MatrixGroupDescriptor) -> Result<WeightSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["constant"] => return Ok(WeightSpec::constant()),
        ["polynomial", s] => return Ok(WeightSpec::polynomial(number(s)?)),
        ["exponential", b, i] => {
            let index = i.parse().map_err(|_| Error::Domain(format!("bad coordinate index {i:?}")))?;
            return Ok(WeightSpec::coordinate_exponential(number(b)?, index));
        }
        _ => {}
    }
    let text = fs::read_to_string(spec)?;
    let raw: RawWeight =
        serde_json::from_str(&text).map_err(|e| Error::Domain(format!("weight file {spec:?}: {e}")))?;
    Ok(match raw {
        RawWeight::ConstantOne { symmetrize } => WeightSpec { kind: WeightKind::ConstantOne, symmetrize },
        RawWeight::Polynomial { exponent, symmetrize } => {
            WeightSpec { kind: WeightKind::Polynomial { exponent: number(&exponent)? }, symmetrize }
        }
        RawWeight::CoordinateExponential { base, index, symmetrize } => {
            WeightSpec { kind: WeightKind::CoordinateExponential { base: number(&base)?, index }, symmetrize }
        }
        RawWeight::Table { entries, default, symmetrize } => WeightSpec {
            kind: WeightKind::Table {
                entries: entries
                    .iter()
                    .map(|e| Ok((g.evaluate_word(&e.word)?, e.value)))
                    .collect::<Result<_>>()?,
                default,
            },
            symmetrize,
        },
    })
}

fn cmd_gnr(cfg: &RunConfig, d: &Descriptor) -> Result<Body> {
    let g = require_group(d)?;
    let w = parse_weight(cfg.weight.as_deref().unwrap_or("constant"), &g)?;
    let t = tables(&g, cfg.radius.unwrap_or(8), cfg.budget)?;
    let algebra = if g.certified_unitriangular { Some(malcev_lie_algebra(&g)?) } else { None };
    WeightContext::new(&t, algebra.as_ref(), &w)?.validate(&w, cfg.seed)?;
    let k_max = cfg.k_max.unwrap_or(1024) as usize;
    let rep = theorem_4_2_consistency(&g, &w, &t, k_max)?;
    Ok(Body {
        inconclusive: rep.agreement == Agreement::Inconclusive,
        violation: (rep.agreement == Agreement::Disagree)
            .then(|| "GNR on B and condition (S) disagree".to_string()),
        result: to_value(&rep),
        side_files: vec![],
    })
}

fn cmd_selftest(cfg: &RunConfig) -> Result<Body> {
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for e in catalog::all() {
        let gg = algebraic_growth(&e.descriptor)?;
        let mut ok = gg.as_ref().map(|g| g.degree) == e.expected.degree
            && gg.as_ref().map(|g| g.rank) == e.expected.rank;
        let mut classification = Value::Null;
        if e.expected.exponential {
            let g = require_group(&e.descriptor)?;
            let t = tables(&g, cfg.radius.unwrap_or(10), cfg.budget)?;
            let c = doubling_classifier(t.sizes()).classification;
            ok &= c == Classification::Exponential;
            classification = to_value(&c);
        }
        if !ok {
            failed.push(e.name);
        }
        rows.push(json!({
            "name": e.name,
            "summary": e.summary,
            "expected": e.expected,
            "growth": gg,
            "classification": classification,
            "ok": ok,
        }));
    }
    Ok(Body {
        violation: (!failed.is_empty()).then(|| format!("self-test failures: {}", failed.join(", "))),
        result: json!({ "entries": rows }),
        inconclusive: false,
        side_files: vec![],
    })
}

/// Runs one command. Errors are folded into the report and the exit status,
/// so a report is produced for every run.
pub fn run(cfg: &RunConfig) -> Outcome {
    let mut envelope = json!({
        "tool": "nilgrowth",
        "version": VERSION,
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "parameters": {
            "radius": cfg.radius,
            "k_max": cfg.k_max,
            "n_list": cfg.n_list,
            "word": cfg.word,
            "weight": cfg.weight,
            "budget": cfg.budget,
            "strict": cfg.strict,
        },
        "tolerances": tolerances(),
    });
    let body = (|| -> Result<Body> {
        if cfg.command == Command::Selftest {
            envelope["input"] = json!({ "source": "catalog", "digest": Value::Null });
            return cmd_selftest(cfg);
        }
        let loaded = load(cfg.input.as_deref())?;
        envelope["input"] = json!({
            "source": loaded.source,
            "kind": loaded.descriptor.kind(),
            "label": loaded.descriptor.label(),
            "digest": digest(&loaded.descriptor),
        });
        let d = &loaded.descriptor;
        match cfg.command {
            Command::Growth => cmd_growth(cfg, d),
            Command::Balls => cmd_balls(cfg, d),
            Command::Gamma => cmd_gamma(cfg, d),
            Command::Conj => cmd_conj(cfg, d),
            Command::Layers => cmd_layers(cfg, d),
            Command::Coords => cmd_coords(cfg, d),
            Command::Cone => cmd_cone(cfg, d),
            Command::Clouds => cmd_clouds(cfg, d),
            Command::Gnr => cmd_gnr(cfg, d),
            Command::Classify => cmd_classify(cfg, d),
            Command::Selftest => unreachable!("handled above"),
        }
    })();
    let (status, side_files) = match body {
        Ok(b) => {
            envelope["result"] = b.result;
            envelope["inconclusive"] = Value::Bool(b.inconclusive);
            let status = if let Some(v) = b.violation {
                envelope["violation"] = Value::String(v);
                ExitStatus::InvariantViolation
            } else if b.inconclusive && cfg.strict {
                ExitStatus::Inconclusive
            } else {
                ExitStatus::Ok
            };
            (status, b.side_files)
        }
        Err(e) => {
            let status = ExitStatus::of_error(&e);
            envelope["error"] = json!({ "kind": status, "message": e.to_string() });
            if let Error::BudgetExceeded { partial, completed_radius, .. } = &e {
                envelope["partial"] = json!({ "completed_radius": completed_radius, "sizes": partial.sizes() });
            }
            (status, Vec::new())
        }
    };
    envelope["status"] = to_value(&status);
    fix_floats(&mut envelope);
    Outcome { status, report: envelope, side_files }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command, input: &str) -> RunConfig {
        RunConfig::new(command).with_input(input)
    }

    #[test]
    fn growth_degrees_from_catalog() {
        let out = run(&RunConfig { radius: Some(6), ..cfg(Command::Growth, "catalog:heisenberg") });
        assert_eq!(out.status, ExitStatus::Ok);
        assert_eq!(out.report["result"]["algebraic"]["degree"], 4);
        let out = run(&cfg(Command::Growth, "catalog:ex14a_shadow"));
        assert_eq!(out.report["result"]["algebraic"]["degree"], 7);
    }

    #[test]
    fn reports_are_reproducible() {
        let c = RunConfig { radius: Some(5), ..cfg(Command::Growth, "catalog:z2") };
        assert_eq!(run(&c).report_text(), run(&c).report_text());
        let r = run(&c).report;
        assert!(r["input"]["digest"].as_str().unwrap().starts_with("sha256:"));
        assert_eq!(r["tolerances"]["gamma_match"], 0.15);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&cfg(Command::Growth, "catalog:missing")).status.code(), 1);
        let budget = RunConfig { radius: Some(10), budget: 50, ..cfg(Command::Balls, "catalog:heisenberg") };
        let out = run(&budget);
        assert_eq!(out.status.code(), 3);
        assert!(out.report["partial"]["sizes"].is_array());
        let strict = RunConfig { radius: Some(4), strict: true, ..cfg(Command::Classify, "catalog:z1") };
        assert_eq!(run(&strict).status.code(), 5);
    }

    #[test]
    fn weight_shorthands() {
        let g = crate::nilgroup::heisenberg();
        assert_eq!(parse_weight("constant", &g).unwrap(), WeightSpec::constant());
        assert_eq!(parse_weight("polynomial:3", &g).unwrap(), WeightSpec::polynomial(3.0));
        assert_eq!(parse_weight("exponential:2:0", &g).unwrap(), WeightSpec::coordinate_exponential(2.0, 0));
        assert!(parse_weight("nonsense-file.json", &g).is_err());
    }
}
