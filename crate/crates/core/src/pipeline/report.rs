//! Text and JSON rendering of pair reports.

use std::fmt::Write as _;
use std::str::FromStr;

use super::analysis::{PairReport, SCHEMA_VERSION};
use crate::congruence::CongruenceVerdict;
use crate::error::{Error, Result};
use crate::euler::BoundedPPower;
use crate::padic::PPower;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown report format {other:?} (expected text or json)"))),
        }
    }
}

/// Deterministic serialization of a report.
pub fn emit_report(r: &PairReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(r)? + "\n"),
        ReportFormat::Text => Ok(render_text(r)),
    }
}

/// Reads a JSON report back, rejecting unknown schema versions.
pub fn parse_report(json: &str) -> Result<PairReport> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => {
            return Err(Error::Serde(format!("unsupported report schema version {other:?}, expected {SCHEMA_VERSION}")))
        }
    }
    Ok(serde_json::from_value(value)?)
}

fn bounded(b: &BoundedPPower, p: u64) -> String {
    if b.lower_bound {
        format!("≥ {}", b.value.render(p))
    } else {
        format!("= {}", b.value.render(p))
    }
}

fn pp(x: &PPower, p: u64) -> String {
    x.render(p)
}

fn render_text(r: &PairReport) -> String {
    let p = r.config.p;
    let [c1, c2] = &r.curves;
    let mut s = String::new();
    let _ = writeln!(s, "pair {} / {}  p = {}  field = {}", c1.label, c2.label, p, r.config.field);
    let _ = writeln!(
        s,
        "tool {}  schema {}  bound B = {}  precision N = {}  Λ-degree D = {}",
        r.tool_version, r.schema_version, r.config.bound, r.config.precision, r.config.lambda_degree
    );
    let _ = writeln!(s);
    match &r.residual.congruence {
        CongruenceVerdict::CongruentUpToBound { bound, primes_tested } => {
            let _ = writeln!(s, "congruence: {p}-congruent up to ℓ ≤ {bound} ({primes_tested} primes compared)");
        }
        CongruenceVerdict::NotCongruent { witness, reason } => {
            let _ = writeln!(s, "congruence: NOT {p}-congruent, witness ℓ = {witness}: {reason}");
        }
    }
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(", ");
    let sets = &r.residual.sets;
    let _ = writeln!(s, "Σ_ss: {{{}}} / {{{}}}", join(&mut r.residual.sigma_ss[0].iter().map(|x| x.to_string())), join(&mut r.residual.sigma_ss[1].iter().map(|x| x.to_string())));
    let _ = writeln!(s, "Σ₀ = {{{}}}", join(&mut sets.sigma0.iter().map(|x| x.to_string())));
    let _ = writeln!(s, "Σ₁ = {{{}}}", join(&mut sets.sigma1.iter().map(|x| x.to_string())));
    for ex in &sets.exclusions {
        let _ = writeln!(s, "  {} ∉ Σ₁({}): {}", ex.place, ex.curve, ex.reason);
    }
    for place in &sets.manual_review {
        let _ = writeln!(s, "  {place}: manual review");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "local factors Nv·L_v(E,1)^-1 = Nv + β_v − a_v at places of Σ₀");
    let _ = writeln!(s, "{:<8} {:<7} {:>8} {:<9} {:<6} {:>5} {:>10} {:>14} {:>8} Σ₁", "curve", "place", "Nv", "type", "kod", "a_v", "value", "L^-1", "|L|_p");
    for c in &r.curves {
        for row in &c.local_table {
            let _ = writeln!(
                s,
                "{:<8} {:<7} {:>8} {:<9} {:<6} {:>5} {:>10} {:>14} {:>8} {}",
                c.label,
                row.place.label,
                row.place.norm,
                row.kind.as_str(),
                row.kodaira.to_string(),
                row.a_v.map_or("-".into(), |a| a.to_string()),
                row.value,
                row.l_inverse,
                pp(&row.abs_value, p),
                if row.in_sigma1 { "yes" } else { "" }
            );
        }
    }
    let _ = writeln!(s);
    for c in &r.curves {
        let _ = writeln!(s, "{} [{}] ({} data)", c.label, c.model.join(","), c.provenance);
        for cl in &c.places_above_p {
            let _ = writeln!(s, "  at {}: {} a_v = {}", cl.place, cl.reduction.as_str(), cl.a_v.map_or("?".into(), |a| a.to_string()));
        }
        for h in &c.hypotheses {
            let mark = match h.holds {
                Some(true) => "ok",
                Some(false) => "FAILS",
                None => "unverified",
            };
            let _ = writeln!(s, "  hypothesis ({}): {mark} — {}", h.clause, h.detail);
        }
        let tam = if c.tamagawa_lower_bound { format!("≥ {}", c.tamagawa_product) } else { format!("= {}", c.tamagawa_product) };
        let _ = writeln!(s, "  ∏c_v {tam}");
        let _ = writeln!(
            s,
            "  r = {}  r‡ = {}  sp_E = {}",
            c.rank.map_or("?".into(), |x| x.to_string()),
            c.r_dag.map_or("?".into(), |x| x.to_string()),
            c.sp_e
        );
        let _ = writeln!(s, "  Φ_{{E,Σ₁}} {}", bounded(&c.phi, p));
        match &c.chi {
            Some(chi) => {
                let b = BoundedPPower { value: chi.exponent, lower_bound: chi.lower_bound };
                let _ = writeln!(s, "  χ {}  [{}]", bounded(&b, p), c.chi_formula);
            }
            None => {
                let _ = writeln!(s, "  χ unavailable  [{}]", c.chi_formula);
            }
        }
        if let Some(prod) = &c.product {
            let _ = writeln!(s, "  Φ·χ {}", bounded(prod, p));
        }
        if let Some(inv) = &c.invariants {
            let _ = writeln!(
                s,
                "  f‡: μ = {} λ = {} r = {} χ_t = {};  Σ₁-imprimitive: μ = {} λ = {} χ = {}  (Φ·χ_t identity {})",
                inv.mu,
                inv.lambda,
                inv.r,
                pp(&inv.chi_from_f, p),
                inv.mu_sigma1,
                inv.lambda_sigma1,
                pp(&inv.chi_sigma1, p),
                if inv.imprimitive_identity_holds { "holds" } else { "FAILS" }
            );
        }
    }
    let _ = writeln!(s);
    let v = &r.verdicts;
    let _ = writeln!(s, "verdict (Φ·χ relation, {} clause): {} — {}", v.congruence.clause, v.congruence.verdict, v.congruence.reason);
    if let Some(t) = v.invariant_transfer {
        let _ = writeln!(s, "verdict (μ/λ transfer): {t}");
    }
    for (i, c) in r.curves.iter().enumerate() {
        if let Some(b) = v.rank_bounds[i] {
            let _ = writeln!(s, "rank bound r ≤ r‡ ≤ r + sp_E for {}: {}", c.label, if b { "holds" } else { "FAILS" });
        }
        if let Some(a) = v.akashi[i] {
            let _ = writeln!(s, "Akashi consistency for {}: {a}", c.label);
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "assumptions:");
    for a in &r.assumptions {
        let _ = writeln!(s, "  - {a}");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "outcome: {:?} (exit {}) — {}", r.outcome, r.exit_code(), r.outcome_reason);
    s
}
