use std::fmt::Write as _;

use serde::Serialize;

use super::report::CheckReport;
use super::suite::SuiteReport;
use crate::elliptical::GeneratorFamily;
use crate::matalg::HermitianMatrix;
use crate::quadform::{QuadFormModel, SplittingConvention};
use crate::special::AlgebraKind;

/// A place where a printed formula and the derived one part ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub id: &'static str,
    pub topic: &'static str,
    pub printed: String,
    pub derived: String,
    pub resolution: String,
    /// Verdict lines from a suite run, when one was supplied.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<String>,
}

fn item(
    id: &'static str,
    topic: &'static str,
    printed: &str,
    derived: &str,
    resolution: &str,
) -> Discrepancy {
    Discrepancy {
        id,
        topic,
        printed: printed.into(),
        derived: derived.into(),
        resolution: resolution.into(),
        evidence: Vec::new(),
    }
}

/// How a labelled candidate fared in one check.
fn candidate_fate(idx: usize, c: &CheckReport, label: &str) -> Option<String> {
    let hits: Vec<bool> = c
        .points
        .iter()
        .filter_map(|p| p.candidates.iter().find(|v| v.label == label))
        .map(|v| v.within_radius)
        .collect();
    if hits.is_empty() {
        return None;
    }
    let inside = hits.iter().filter(|&&h| h).count();
    let fate = if inside == hits.len() {
        "within 3 SE".to_string()
    } else {
        format!(
            "outside 3 SE at {} of {} points",
            hits.len() - inside,
            hits.len()
        )
    };
    Some(format!(
        "{} #{idx}: '{label}' {fate} (verdict: {})",
        c.check, c.verdict
    ))
}

fn evidence(suite: Option<&SuiteReport>, check: &str, labels: &[&str]) -> Vec<String> {
    let Some(s) = suite else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, c) in s
        .checks
        .iter()
        .enumerate()
        .filter(|(_, c)| c.check == check)
    {
        let lines: Vec<String> = labels
            .iter()
            .filter_map(|l| candidate_fate(i, c, l))
            .collect();
        if lines.is_empty() && !c.notes.iter().any(|n| n.starts_with("error")) {
            continue;
        }
        if lines.is_empty() {
            out.push(format!("{check} #{i}: {}", c.notes.join("; ")));
        }
        out.extend(lines);
    }
    out
}

fn raw_normalizations() -> String {
    let mut parts = Vec::new();
    for beta in [
        AlgebraKind::REAL,
        AlgebraKind::COMPLEX,
        AlgebraKind::QUATERNION,
    ] {
        let model = QuadFormModel::new(
            HermitianMatrix::identity(beta, 2),
            HermitianMatrix::identity(beta, 2),
            HermitianMatrix::identity(beta, 1),
            GeneratorFamily::Normal,
            SplittingConvention::RankR,
        );
        if let Ok(raw) = model.and_then(|m| m.spectra().cf_raw_normalization()) {
            parts.push(format!(
                "beta {beta}: {:.6} vs {:.6}",
                raw.calculus, raw.beta_shifted
            ));
        }
    }
    parts.join(", ")
}

/// Every logged divergence, with verdicts attached when a suite report is given.
pub fn discrepancies(suite: Option<&SuiteReport>) -> Vec<Discrepancy> {
    let mut v = vec![
        item(
            "radial-moment",
            "radial moment exponent",
            "2 (normal) or g (Pearson VII) raised to c + beta - 1",
            "2^c Gamma(c); g^c Gamma(c) Gamma(s - c) / Gamma(s), by direct integration",
            "derived form used; quadrature agrees with it; the printed power matches only at beta = 1",
        ),
        item(
            "cf-normalization",
            "characteristic function at S = 0",
            "constant chain with the beta-shifted radial moment",
            &format!(
                "neither reading gives 1 once beta > 1; normal, m = 1, n = 2, derived vs shifted moment: {}",
                raw_normalizations()
            ),
            "degree-0 layer evaluated exactly so psi(0) = 1 for every family and beta",
        ),
        item(
            "cf-argument",
            "characteristic function argument",
            "2 i beta Sigma S",
            "2 i Sigma S / beta for components of variance 1/beta",
            "printed argument implemented; equal at beta = 1; the rescaled candidate is carried by the empirical check",
        ),
        item(
            "closed-exponent",
            "closed form for idempotent A, Theta = I",
            "|I - 2i Sigma S|^(-n/2)",
            "|I - 2i Sigma S|^(-r/2), r = rank A",
            "exponent r; the full-n series reproduces it, the rank-r and full-m series reproduce exponent n",
        ),
        item(
            "orbital-denominator",
            "orbital integral over U(m)",
            "C(X1) C(X2) / C(I_r), r = rank X2",
            "C(X1) C(X2) / C(I_m)",
            "the two agree when r = m; the full-m denominator is the classical one",
        ),
        item(
            "stiefel-denominator",
            "average over n x m frames",
            "C(X1) C(X2) / C(I_r)",
            "C(X1) C(X2) / C(I_n)",
            "full-n convention added; default stays rank-r",
        ),
        item(
            "density-denominator",
            "density series denominator",
            "C(I_r)",
            "C(I_n) with the averaging over U(n) acting on A",
            "rank-r and full-n coincide for the density when r = n; full-m departs from both",
        ),
        item(
            "pearson-sign",
            "Pearson VII derivative sign",
            "(s)_k / g^k",
            "(-1)^k (s)_k / g^k",
            "analytic sign by default; --paper-printed-signs selects the printed one",
        ),
        item(
            "pearson-cf",
            "Pearson VII and t characteristic function",
            "moment series through (s - c0 - k)_k",
            "radial moments of order >= s diverge, so the CF is not analytic at S = 0",
            "formal series kept; poles are reported when s - c0 is a positive integer, e.g. t with even g",
        ),
        item(
            "laplace-exponent",
            "Laplace-type integral with a radial generator",
            "radial moment of order am - k - 1",
            "radial moment of order am + k - 1",
            "derived order used",
        ),
        item(
            "quaternion-trace",
            "etr(i W S) over the quaternions",
            "tr(W S) taken as real",
            "Im tr(W S) = sum over i < j of Im [W_ij, S_ji], not zero in general",
            "real part used throughout; empirical CF checks limited to beta in {1, 2}",
        ),
    ];
    let links: [(&str, &str, &[&str]); 7] = [
        (
            "cf-argument",
            "cf_empirical",
            &["series full-n, argument 2i/beta", "series full-n"],
        ),
        (
            "closed-exponent",
            "cf_empirical",
            &["closed exponent n", "closed exponent r"],
        ),
        ("orbital-denominator", "orbital", &["rank-r", "full-m"]),
        (
            "stiefel-denominator",
            "stiefel",
            &["rank-r", "full-m", "full-n"],
        ),
        (
            "density-denominator",
            "density_empirical",
            &["series rank-r", "series full-m", "series full-n"],
        ),
        (
            "pearson-sign",
            "density_empirical",
            &["series rank-r unsigned"],
        ),
        (
            "laplace-exponent",
            "laplace",
            &["moment exponent am-k-1", "moment exponent am+k-1"],
        ),
    ];
    for (id, check, labels) in links {
        if let Some(d) = v.iter_mut().find(|d| d.id == id) {
            d.evidence = evidence(suite, check, labels);
        }
    }
    v
}

/// Plain-text table.
pub fn render_table(items: &[Discrepancy]) -> String {
    let mut out = String::new();
    let w = items.iter().map(|d| d.id.len()).max().unwrap_or(2).max(2);
    let _ = writeln!(out, "{:<w$}  topic", "id");
    let _ = writeln!(out, "{}", "-".repeat(w + 40));
    for d in items {
        let _ = writeln!(out, "{:<w$}  {}", d.id, d.topic);
        let pad = " ".repeat(w + 2);
        let _ = writeln!(out, "{pad}printed:    {}", d.printed);
        let _ = writeln!(out, "{pad}derived:    {}", d.derived);
        let _ = writeln!(out, "{pad}resolution: {}", d.resolution);
        for e in &d.evidence {
            let _ = writeln!(out, "{pad}evidence:   {e}");
        }
        out.push('\n');
    }
    out
}
