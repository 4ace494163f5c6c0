use serde::Serialize;

/// Fewest radii for which the classifier will commit to a verdict.
pub const MIN_RADII: usize = 8;
/// Tail slope of `log2(|V^n| / |V^{n/2}|)` above which growth is called exponential.
pub const EXPONENTIAL_SLOPE: f64 = 0.2;
/// Tail slope below which the doubling ratios are treated as stabilized.
pub const STABLE_SLOPE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Polynomial { degree: u32 },
    Exponential,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoublingReport {
    pub classification: Classification,
    /// `(n, |V^n| / |V^{floor(n/2)}|)` for `n >= 2`.
    pub ratios: Vec<(usize, f64)>,
    pub tail_start: usize,
    pub tail_slope: f64,
    pub tail_median_log2: f64,
    pub c0: f64,
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Classifies growth from ball sizes `|V^0|, ..., |V^R|` through the doubling
/// ratios `|V^n| / |V^{n/2}|` over the tail `n ∈ [R/2, R]`. Ratios whose
/// logarithm keeps climbing indicate exponential growth; ratios that settle
/// below `c0 · 2^{d+1}` indicate polynomial growth of degree `d`, read off as
/// the rounded median of the tail `log2` ratios.
pub fn doubling_classifier(sizes: &[usize]) -> DoublingReport {
    let c0 = 1.0;
    let r = sizes.len().saturating_sub(1);
    let ratios: Vec<(usize, f64)> =
        (2..=r).map(|n| (n, sizes[n] as f64 / sizes[n / 2] as f64)).collect();
    let tail_start = r.div_ceil(2).max(2);
    let mut report = DoublingReport {
        classification: Classification::Inconclusive,
        ratios,
        tail_start,
        tail_slope: f64::NAN,
        tail_median_log2: f64::NAN,
        c0,
    };
    if sizes.len() < MIN_RADII || sizes.iter().any(|&s| s == 0) {
        return report;
    }
    let tail: Vec<(f64, f64)> = report
        .ratios
        .iter()
        .filter(|(n, _)| *n >= tail_start)
        .map(|&(n, q)| (n as f64, q.log2()))
        .collect();
    let s = slope(&tail);
    let med = median(tail.iter().map(|p| p.1).collect());
    report.tail_slope = s;
    report.tail_median_log2 = med;
    let rise = tail.last().expect("nonempty tail").1 - tail[0].1;
    report.classification = if s > EXPONENTIAL_SLOPE && rise > 1.0 {
        Classification::Exponential
    } else if s <= STABLE_SLOPE {
        let d = med.round().max(0.0);
        let cap = (c0 * 2f64.powf(d + 1.0)).log2();
        if tail.iter().all(|p| p.1 < cap) {
            Classification::Polynomial { degree: d as u32 }
        } else {
            Classification::Inconclusive
        }
    } else {
        Classification::Inconclusive
    };
    report
}
