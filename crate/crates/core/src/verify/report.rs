use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Outcome of comparing an estimate with labelled theoretical candidates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "candidate", rename_all = "snake_case")]
pub enum Verdict {
    /// Exactly one class of coincident candidates lies within the acceptance radius.
    Matches(String),
    Inconclusive,
    Fail,
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail)
    }

    pub fn matched(&self) -> Option<&str> {
        match self {
            Verdict::Matches(s) => Some(s),
            _ => None,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Matches(s) => write!(f, "matches {s}"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
            Verdict::Fail => f.write_str("fail"),
        }
    }
}

fn null_as_infinity<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateValue {
    pub label: String,
    pub value: [f64; 2],
    /// |estimate - value| in units of the standard error (infinite, written as null, when
    /// SE = 0 and they differ).
    #[serde(deserialize_with = "null_as_infinity")]
    pub distance_in_se: f64,
    pub within_radius: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub label: String,
    pub estimate: [f64; 2],
    pub standard_error: f64,
    pub radius: f64,
    pub candidates: Vec<CandidateValue>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub inputs_digest: String,
    pub points: Vec<PointReport>,
    pub verdict: Verdict,
    #[serde(rename = "N")]
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

/// Hex SHA-256 of the canonical JSON of the inputs.
pub fn inputs_digest<T: Serialize>(params: &T) -> String {
    let json = serde_json::to_vec(params).unwrap_or_default();
    let d = Sha256::digest(&json);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Relative gap below which two candidates are treated as the same value.
pub(crate) const COINCIDE_REL: f64 = 1e-7;

fn coincide(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COINCIDE_REL * a.norm().max(b.norm()).max(1.0)
}

/// Acceptance radius for an MC estimate: 3 SE plus a rounding floor.
pub(crate) fn mc_radius(est: Complex64, se: f64) -> f64 {
    3.0 * se + 1e-10 * est.norm().max(1.0)
}

/// One estimate against its candidates.
pub(crate) fn point_report(
    label: impl Into<String>,
    est: Complex64,
    se: f64,
    radius: f64,
    candidates: &[(String, Complex64)],
) -> PointReport {
    let cands: Vec<CandidateValue> = candidates
        .iter()
        .map(|(l, v)| {
            let d = (est - v).norm();
            CandidateValue {
                label: l.clone(),
                value: c2(*v),
                distance_in_se: if se > 0.0 {
                    d / se
                } else if d == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                },
                within_radius: d <= radius,
            }
        })
        .collect();
    let mut pr = PointReport {
        label: label.into(),
        estimate: c2(est),
        standard_error: se,
        radius,
        candidates: cands,
        verdict: Verdict::Inconclusive,
    };
    pr.verdict = combine(std::slice::from_ref(&pr));
    pr
}

fn value(c: &CandidateValue) -> Complex64 {
    Complex64::new(c.value[0], c.value[1])
}

/// Verdict over several points: every point needs some candidate in range; the
/// candidates in range at every point must form a single coincidence class.
pub(crate) fn combine(points: &[PointReport]) -> Verdict {
    if points.is_empty() {
        return Verdict::Inconclusive;
    }
    if points
        .iter()
        .any(|p| !p.candidates.iter().any(|c| c.within_radius))
    {
        return Verdict::Fail;
    }
    let labels: Vec<&str> = points[0]
        .candidates
        .iter()
        .map(|c| c.label.as_str())
        .collect();
    let find = |p: &PointReport, l: &str| p.candidates.iter().find(|c| c.label == l).cloned();
    let survivors: Vec<&str> = labels
        .into_iter()
        .filter(|l| {
            points
                .iter()
                .all(|p| find(p, l).is_some_and(|c| c.within_radius))
        })
        .collect();
    let Some(first) = survivors.first() else {
        return Verdict::Inconclusive;
    };
    let same_class = survivors.iter().all(|l| {
        points.iter().all(|p| {
            let (a, b) = (find(p, first).unwrap(), find(p, l).unwrap());
            coincide(value(&a), value(&b))
        })
    });
    if same_class {
        Verdict::Matches(survivors.join(" = "))
    } else {
        Verdict::Inconclusive
    }
}

/// Assembles a report from its points.
pub(crate) fn finish(
    check: &str,
    digest: String,
    points: Vec<PointReport>,
    samples: usize,
    seed: u64,
    mut notes: Vec<String>,
) -> CheckReport {
    if points.iter().any(|p| {
        p.standard_error == 0.0 && samples > 0 && p.candidates.iter().any(|c| !c.within_radius)
    }) {
        notes.push("degenerate standard error: zero sample variance at some point".into());
    }
    let verdict = combine(&points);
    CheckReport {
        check: check.into(),
        inputs_digest: digest,
        points,
        verdict,
        samples,
        seed,
        notes,
        wall_time_s: None,
    }
}

/// A report for a check that could not run.
pub(crate) fn failed(
    check: &str,
    digest: String,
    samples: usize,
    seed: u64,
    err: &str,
) -> CheckReport {
    CheckReport {
        check: check.into(),
        inputs_digest: digest,
        points: Vec::new(),
        verdict: Verdict::Fail,
        samples,
        seed,
        notes: vec![format!("error: {err}")],
        wall_time_s: None,
    }
}
