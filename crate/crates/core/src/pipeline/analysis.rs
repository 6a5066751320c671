//! End-to-end analysis of one curve pair.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::cache::{DiskCache, TOOL_VERSION};
use super::records::{find_record, CurveRecord, Provenance};
use crate::arith::{ensure_prime, primes_up_to, vp_int};
use crate::congruence::{
    check_hypotheses, irreducibility_heuristic, sigma1, test_p_congruence, HypothesisCheck, Irreducibility,
    ResidualPair, DEFAULT_BOUND,
};
use crate::curve::{
    bad_primes, local_data, torsion_p_part_bound, BaseField, CurveModel, Kodaira, LocalData, LocalDataMemo,
    PClassification, PReduction, Place, ReductionKind,
};
use crate::error::{Error, Result};
use crate::euler::{
    chi_pm_supersingular, chi_t_bsd, congruence_verdict_detail, invariant_transfer_check, l_invariant,
    local_abs_value, local_euler_numerator, local_polynomial, local_L_inverse, phi_factor, rank_bound_check,
    tate_parameter, BoundedPPower, ChiValue, EulerInputs, PlaceAtP, Verdict, VerdictDetail,
};
use crate::lambda::{
    akashi_euler_char, akashi_series, imprimitive_charpoly, twist_euler_factor, CharPolyData, LambdaElement,
    DEFAULT_DEGREE,
};
use crate::padic::{PPower, PadicNumber, DEFAULT_PRECISION};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Tunable parameters of an analysis.
#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub bound: u64,
    pub precision: u32,
    /// Treat irreducibility of `E[p]` as given instead of running the heuristic.
    pub assert_irreducible: bool,
    pub cache: DiskCache,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { bound: DEFAULT_BOUND, precision: DEFAULT_PRECISION, assert_irreducible: false, cache: DiskCache::disabled() }
    }
}

/// The configuration as echoed in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub p: u64,
    pub field: BaseField,
    pub bound: u64,
    pub precision: u32,
    pub lambda_degree: usize,
    pub irreducibility_asserted: bool,
}

/// One row of the local-factor table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRow {
    pub place: Place,
    pub kind: ReductionKind,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u32,
    pub ord_delta_min: u32,
    pub a_v: Option<i64>,
    /// `Nv · L_v(E,1)^{-1}`.
    pub value: String,
    /// `L_v(E,1)^{-1}` as a reduced fraction.
    pub l_inverse: String,
    /// `|L_v(E,1)|_p`.
    pub abs_value: PPower,
    pub in_sigma1: bool,
}

impl LocalRow {
    fn new(d: &LocalData, p: u64, in_sigma1: bool) -> Self {
        Self {
            place: d.place.clone(),
            kind: d.kind,
            kodaira: d.kodaira,
            conductor_exponent: d.conductor_exponent,
            tamagawa: d.tamagawa,
            ord_delta_min: d.ord_delta_min,
            a_v: d.a_v,
            value: local_euler_numerator(d).to_string(),
            l_inverse: local_L_inverse(d).to_string(),
            abs_value: local_abs_value(d, p),
            in_sigma1,
        }
    }
}

/// Invariants read off a supplied characteristic series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSummary {
    pub mu: u32,
    pub lambda: usize,
    pub r: usize,
    /// `|g(0)|_p^{-1}` for `f = T^r g`.
    pub chi_from_f: PPower,
    pub mu_sigma1: u32,
    pub lambda_sigma1: usize,
    /// `|g^{Σ₁}(0)|_p^{-1}`.
    pub chi_sigma1: PPower,
    /// `Φ · χ_t(f) = |g^{Σ₁}(0)|_p^{-1}`.
    pub imprimitive_identity_holds: bool,
    /// χ from the Akashi leading term, when `gamma_e` is supplied.
    pub akashi_chi: Option<PPower>,
}

/// Everything computed for one curve of the pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSection {
    pub label: String,
    pub model: [String; 5],
    pub provenance: Provenance,
    pub places_above_p: Vec<PClassification>,
    pub hypotheses: Vec<HypothesisCheck>,
    /// Local factors at the places of `Σ₀`.
    pub local_table: Vec<LocalRow>,
    pub tamagawa_product: u64,
    pub tamagawa_lower_bound: bool,
    pub phi: BoundedPPower,
    pub chi: Option<ChiValue>,
    pub chi_formula: String,
    pub rank: Option<u32>,
    pub r_dag: Option<u32>,
    pub sp_e: u32,
    /// `Φ·χ_t`.
    pub product: Option<BoundedPPower>,
    pub invariants: Option<InvariantSummary>,
}

/// Theorem checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Relation between `Φ·χ_t` of the two curves.
    pub congruence: VerdictDetail,
    /// Transfer of imprimitive μ/λ (only with characteristic series for both curves).
    pub invariant_transfer: Option<Verdict>,
    /// `r ≤ r‡ ≤ r + sp_E`, per curve.
    pub rank_bounds: [Option<bool>; 2],
    /// Akashi χ versus χ from `f`, per curve.
    pub akashi: [Option<Verdict>; 2],
}

/// Overall status, mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Consistent,
    Violation,
    HypothesisFailure,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Consistent => 0,
            Outcome::Violation => 2,
            Outcome::HypothesisFailure => 3,
            Outcome::Inconclusive => 4,
        }
    }
}

/// Full result of [`analyze_pair`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ConfigEcho,
    pub residual: ResidualPair,
    pub curves: [CurveSection; 2],
    pub verdicts: Verdicts,
    /// Unverified hypotheses and defaulted inputs.
    pub assumptions: Vec<String>,
    pub outcome: Outcome,
    pub outcome_reason: String,
}

impl PairReport {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }
}

/// Local data over Q at every prime `ℓ ≤ bound`, through the disk cache.
pub fn local_table(e: &CurveModel, bound: u64, cache: &DiskCache) -> Result<Vec<LocalData>> {
    let mut parts: Vec<String> = e.a.iter().map(|x| x.to_string()).collect();
    parts.push(bound.to_string());
    cache.get_or_compute("local-table", &parts, || primes_up_to(bound).into_iter().map(|l| local_data(e, l)).collect())
}

fn seed_memo(memo: &LocalDataMemo, e: &CurveModel, bound: u64, cache: &DiskCache) -> Result<()> {
    for d in local_table(e, bound, cache)? {
        memo.insert(&e.label, d);
    }
    Ok(())
}

fn vp_u64(n: u64, p: u64) -> u32 {
    vp_int(&BigInt::from(n), p).unwrap_or(0)
}

/// Local data of `e` at `place` (which lies over the rational prime `place.prime`).
fn data_at(memo: &LocalDataMemo, e: &CurveModel, place: &Place) -> Result<LocalData> {
    memo.places_over(e, place.prime)?
        .into_iter()
        .find(|d| d.place == *place)
        .ok_or_else(|| Error::InvalidInput(format!("no local data for place {place}")))
}

struct CurveWork<'a> {
    rec: &'a CurveRecord,
    e: CurveModel,
    cls: Vec<PClassification>,
    checks: Vec<HypothesisCheck>,
}

/// `∏ c_v` over all bad places of the curve's base field, and whether it is
/// only a lower bound (some place could not be handled).
fn tamagawa_product(memo: &LocalDataMemo, e: &CurveModel, notes: &mut Vec<String>) -> Result<(u64, bool)> {
    let mut prod = 1u64;
    let mut lower = false;
    for l in bad_primes(e)? {
        match memo.places_over(e, l) {
            Ok(ds) => prod *= ds.iter().map(|d| d.tamagawa as u64).product::<u64>(),
            Err(Error::ManualReview(msg)) => {
                lower = true;
                notes.push(format!("{}: Tamagawa number above {l} unknown ({msg}); ∏c_v is a lower bound", e.label));
            }
            Err(err) => return Err(err),
        }
    }
    Ok((prod, lower))
}

fn l_invariant_valuation(e: &CurveModel, p: u64, precision: u32) -> Result<i64> {
    let j = e.invariants()?.j;
    let q = tate_parameter(&PadicNumber::from_rational(&j, p, precision), precision)?;
    l_invariant(&q)?
        .valuation()
        .ok_or_else(|| Error::InsufficientPrecision("ℒ-invariant vanishes to working precision".into()))
}

#[allow(clippy::too_many_arguments)]
fn euler_characteristic(
    w: &CurveWork<'_>,
    field: BaseField,
    p: u64,
    precision: u32,
    rank: Option<u32>,
    r_dag: Option<u32>,
    sp_e: u32,
    tamagawa: (u64, bool),
    notes: &mut Vec<String>,
) -> (Option<ChiValue>, String) {
    let label = &w.rec.label;
    let supersingular = w.cls.iter().any(|c| c.reduction == PReduction::GoodSupersingular);
    let sha_exp = match w.rec.sha_over(field) {
        Some(s) => vp_u64(s, p),
        None => {
            notes.push(format!("{label}: #Ш[p^∞] over {field} not supplied; assumed trivial"));
            0
        }
    };
    if supersingular {
        let formula = "signed: #Sel_{p^∞} · ∏c_v".to_string();
        match rank {
            Some(0) => {}
            Some(r) => {
                notes.push(format!("{label}: rank {r} > 0 over {field}; the signed product formula needs rank 0"));
                return (None, formula);
            }
            None => {
                notes.push(format!("{label}: rank over {field} not supplied"));
                return (None, formula);
            }
        }
        // Rank 0: Sel_{p^∞} = Ш[p^∞].
        return match chi_pm_supersingular(sha_exp, tamagawa.0, p) {
            Ok(mut chi) => {
                chi.lower_bound = tamagawa.1;
                (Some(chi), formula)
            }
            Err(e) => {
                notes.push(format!("{label}: {e}"));
                (None, formula)
            }
        };
    }
    let formula = "p-adic BSD: ε_p · R_γ · #Ш · τ / #tors²".to_string();
    let (Some(rank), Some(r_dag)) = (rank, r_dag) else {
        notes.push(format!("{label}: rank over {field} not supplied"));
        return (None, formula);
    };
    let mut places = Vec::new();
    for c in &w.cls {
        let l_val = if c.reduction == PReduction::SplitMultiplicative {
            match l_invariant_valuation(&w.e, p, precision) {
                Ok(v) => Some(v),
                Err(e) => {
                    notes.push(format!("{label}: ℒ-invariant unavailable: {e}"));
                    return (None, formula);
                }
            }
        } else {
            None
        };
        places.push(PlaceAtP { reduction: c.reduction, a_v: c.a_v, l_invariant_valuation: l_val });
    }
    let regulator = match w.rec.regulator_valuation {
        Some(v) => v,
        None => {
            if rank > 0 {
                notes.push(format!("{label}: regulator valuation not supplied; assumed a unit"));
            }
            0
        }
    };
    let mut lower = tamagawa.1;
    let torsion = match w.rec.torsion_over(field) {
        Some(t) => vp_u64(t, p),
        None if field == BaseField::Q => match torsion_p_part_bound(&w.e, p) {
            Ok(b) => {
                let k = vp_u64(b, p);
                if k > 0 {
                    lower = true;
                    notes.push(format!("{label}: torsion p-part only bounded by p^{k}; χ_t is a lower bound"));
                }
                k
            }
            Err(_) => 0,
        },
        None => {
            notes.push(format!("{label}: torsion over {field} not supplied; p-part assumed trivial"));
            0
        }
    };
    let inputs = EulerInputs {
        reduction_at_p: places,
        rank,
        r_dag,
        sha_p_exponent: sha_exp,
        tamagawa_product: tamagawa.0,
        torsion_p_exponent: torsion,
        regulator_unit_valuation: regulator,
        sp_e,
        gamma_e: w.rec.gamma_e,
    };
    match chi_t_bsd(&inputs, p, precision) {
        Ok(mut chi) => {
            chi.lower_bound |= lower;
            for warn in &chi.warnings {
                notes.push(format!("{label}: {warn}"));
            }
            (Some(chi), formula)
        }
        Err(e) => {
            notes.push(format!("{label}: χ_t unavailable: {e}"));
            (None, formula)
        }
    }
}

fn charpoly_invariants(
    rec: &CurveRecord,
    sigma1_data: &[LocalData],
    phi: PPower,
    p: u64,
    precision: u32,
    notes: &mut Vec<String>,
) -> Option<InvariantSummary> {
    let coeffs = rec.charpoly.as_ref()?;
    if rec.charpoly_p != Some(p) {
        notes.push(format!("{}: characteristic series is for p = {:?}, not {p}; ignored", rec.label, rec.charpoly_p));
        return None;
    }
    let run = || -> Result<InvariantSummary> {
        let f = LambdaElement::from_poly_i64(p, coeffs, DEFAULT_DEGREE, precision)?;
        let base = CharPolyData::from_element(f.clone())?;
        let twists = sigma1_data
            .iter()
            .map(|d| twist_euler_factor(&local_polynomial(d), &BigInt::from(d.residue_norm), p, DEFAULT_DEGREE, precision))
            .collect::<Result<Vec<_>>>()?;
        let imp = CharPolyData::from_element(imprimitive_charpoly(&f, &twists)?)?;
        let akashi_chi = match rec.gamma_e {
            Some(g) => Some(akashi_euler_char(&akashi_series(&f, g as i64)?)?.2),
            None => None,
        };
        Ok(InvariantSummary {
            mu: base.mu,
            lambda: base.lambda,
            r: base.r,
            chi_from_f: base.chi_t(),
            mu_sigma1: imp.mu,
            lambda_sigma1: imp.lambda,
            chi_sigma1: imp.chi_t(),
            imprimitive_identity_holds: phi.times(&base.chi_t()) == imp.chi_t(),
            akashi_chi,
        })
    };
    match run() {
        Ok(s) => Some(s),
        Err(e) => {
            notes.push(format!("{}: characteristic series not usable: {e}", rec.label));
            None
        }
    }
}

/// Runs the whole pipeline on two labelled curves.
pub fn analyze_pair(
    records: &[CurveRecord],
    label1: &str,
    label2: &str,
    p: u64,
    field: BaseField,
    config: &AnalysisConfig,
) -> Result<PairReport> {
    ensure_prime(p)?;
    if p == 2 {
        return Err(Error::UnsupportedPrime { p, reason: "p must be odd".into() });
    }
    let recs = [find_record(records, label1)?, find_record(records, label2)?];
    let models = [recs[0].model()?, recs[1].model()?];
    let memo = LocalDataMemo::new();
    for e in &models {
        seed_memo(&memo, e, config.bound, &config.cache)?;
    }
    let mut notes = Vec::new();

    let congruence = test_p_congruence(&models[0], &models[1], p, config.bound, &memo)?;
    let mut irr = [Irreducibility::Asserted; 2];
    if !config.assert_irreducible {
        for (i, e) in models.iter().enumerate() {
            irr[i] = irreducibility_heuristic(e, p, config.bound, &memo)?;
        }
    }

    let mut works = Vec::new();
    for (i, rec) in recs.iter().enumerate() {
        let e = models[i].over(field);
        let (cls, checks) = check_hypotheses(&e, p, irr[i])?;
        works.push(CurveWork { rec, e, cls, checks });
    }
    let sigma_ss: [Vec<Place>; 2] = [0, 1].map(|i| {
        works[i].cls.iter().filter(|c| c.reduction == PReduction::GoodSupersingular).map(|c| c.place.clone()).collect()
    });
    let sets = sigma1(&works[0].e, &works[1].e, p, &memo)?;
    for place in &sets.manual_review {
        notes.push(format!(
            "place {place}: local data not derived by base change; excluded from Σ₁ pending manual review, Φ is a lower bound"
        ));
    }
    notes.push(format!("congruence E1[{p}] ≅ E2[{p}] established only up to the trace bound {}", config.bound));
    notes.push("cotorsion of the signed Selmer groups and their Λ-invariants are not verified".into());

    let primes0: BTreeSet<u64> = sets.sigma0.iter().map(|pl| pl.prime).collect();
    let mut sections = Vec::new();
    let mut sigma1_data = Vec::new();
    for w in &works {
        let mut table = Vec::new();
        for &l in &primes0 {
            match memo.places_over(&w.e, l) {
                Ok(ds) => {
                    for d in ds {
                        table.push(LocalRow::new(&d, p, sets.sigma1.contains(&d.place)));
                    }
                }
                Err(Error::ManualReview(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let s1: Vec<LocalData> = sets.sigma1.iter().map(|pl| data_at(&memo, &w.e, pl)).collect::<Result<_>>()?;
        let phi = BoundedPPower { value: phi_factor(&s1, p)?, lower_bound: !sets.manual_review.is_empty() };

        let tamagawa = tamagawa_product(&memo, &w.e, &mut notes)?;
        let rank = w.rec.rank_over(field);
        let sp_e = w.cls.iter().filter(|c| c.reduction == PReduction::SplitMultiplicative).count() as u32;
        let r_dag = match (w.rec.rank_dag, rank) {
            (Some(d), _) => Some(d),
            (None, Some(r)) => {
                if sp_e > 0 {
                    notes.push(format!("{}: r‡ not supplied with sp_E = {sp_e}; taken equal to r", w.rec.label));
                }
                Some(r)
            }
            (None, None) => None,
        };
        let (chi, chi_formula) = euler_characteristic(w, field, p, config.precision, rank, r_dag, sp_e, tamagawa, &mut notes);
        let product = chi.as_ref().map(|c| BoundedPPower {
            value: phi.value.times(&c.exponent),
            lower_bound: phi.lower_bound || c.lower_bound,
        });
        let invariants = charpoly_invariants(w.rec, &s1, phi.value, p, config.precision, &mut notes);
        sigma1_data.push(s1);
        sections.push(CurveSection {
            label: w.rec.label.clone(),
            model: w.e.a.clone().map(|x| x.to_string()),
            provenance: w.rec.provenance,
            places_above_p: w.cls.clone(),
            hypotheses: w.checks.clone(),
            local_table: table,
            tamagawa_product: tamagawa.0,
            tamagawa_lower_bound: tamagawa.1,
            phi,
            chi,
            chi_formula,
            rank,
            r_dag,
            sp_e,
            product,
            invariants,
        });
    }
    let curves: [CurveSection; 2] = sections.try_into().expect("two curves");

    let congruence_check = match (curves[0].r_dag, curves[1].r_dag) {
        (Some(r1), Some(r2)) => congruence_verdict_detail(r1, r2, curves[0].product, curves[1].product),
        _ => VerdictDetail {
            verdict: Verdict::Inconclusive,
            clause: "rank".into(),
            reason: "r‡ is unknown for at least one curve".into(),
        },
    };
    let invariant_transfer = match (&curves[0].invariants, &curves[1].invariants) {
        (Some(a), Some(b)) => Some(invariant_transfer_check(a.mu_sigma1, a.lambda_sigma1, b.mu_sigma1, b.lambda_sigma1)),
        _ => None,
    };
    let rank_bounds = [0, 1].map(|i| {
        let c = &curves[i];
        Some(rank_bound_check(c.rank?, c.r_dag?, c.sp_e))
    });
    let akashi = [0, 1].map(|i| {
        let inv = curves[i].invariants.as_ref()?;
        let ak = inv.akashi_chi?;
        Some(if ak == inv.chi_from_f { Verdict::Consistent } else { Verdict::Violation })
    });
    let verdicts = Verdicts { congruence: congruence_check, invariant_transfer, rank_bounds, akashi };

    let residual = ResidualPair {
        p,
        labels: [recs[0].label.clone(), recs[1].label.clone()],
        field,
        congruence,
        irreducibility: irr,
        sigma_ss,
        sets,
    };
    for (i, c) in curves.iter().enumerate() {
        if irr[i] == Irreducibility::Unknown {
            notes.push(format!("{}: irreducibility of E[{p}] not established (heuristic inconclusive)", c.label));
        }
    }
    let (outcome, outcome_reason) = decide(&residual, &curves, &verdicts);
    Ok(PairReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        config: ConfigEcho {
            p,
            field,
            bound: config.bound,
            precision: config.precision,
            lambda_degree: DEFAULT_DEGREE,
            irreducibility_asserted: config.assert_irreducible,
        },
        residual,
        curves,
        verdicts,
        assumptions: notes,
        outcome,
        outcome_reason,
    })
}

fn decide(residual: &ResidualPair, curves: &[CurveSection; 2], v: &Verdicts) -> (Outcome, String) {
    if let crate::congruence::CongruenceVerdict::NotCongruent { witness, reason } = &residual.congruence {
        return (Outcome::HypothesisFailure, format!("not {}-congruent: witness ℓ = {witness} ({reason})", residual.p));
    }
    for c in curves {
        if let Some(h) = c.hypotheses.iter().find(|h| h.holds == Some(false)) {
            return (Outcome::HypothesisFailure, format!("{}: hypothesis ({}) fails: {}", c.label, h.clause, h.detail));
        }
    }
    if !residual.sigma_ss_agree() {
        return (Outcome::HypothesisFailure, "supersingular sets differ although the curves look congruent".into());
    }
    for (i, c) in curves.iter().enumerate() {
        if v.rank_bounds[i] == Some(false) {
            return (Outcome::HypothesisFailure, format!("{}: r‡ violates r ≤ r‡ ≤ r + sp_E", c.label));
        }
    }
    let violations: Vec<&str> = [
        (v.congruence.verdict == Verdict::Violation, "Φ·χ_t relation"),
        (v.invariant_transfer == Some(Verdict::Violation), "μ/λ transfer"),
        (v.akashi.contains(&Some(Verdict::Violation)), "Akashi consistency"),
    ]
    .into_iter()
    .filter_map(|(bad, name)| bad.then_some(name))
    .collect();
    if !violations.is_empty() {
        return (
            Outcome::Violation,
            format!("{} violated ({}); a standing hypothesis or an input must be wrong", violations.join(", "), v.congruence.reason),
        );
    }
    match v.congruence.verdict {
        Verdict::Inconclusive => (Outcome::Inconclusive, v.congruence.reason.clone()),
        _ => (Outcome::Consistent, format!("{} clause: {}", v.congruence.clause, v.congruence.reason)),
    }
}
