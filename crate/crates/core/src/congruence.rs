//! Residual congruences between two curves and the imprimitive prime sets.
//!
//! Everything here is a *necessary-condition* computation: congruence is
//! only ever established "up to a bound", and irreducibility of `E[p]` is at
//! best heuristically checked.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{ensure_prime, primes_up_to};
use crate::curve::{
    bad_primes, classify_places_above_p, splitting_in_qi, BaseField, CurveModel, LocalData, LocalDataMemo,
    PClassification, PReduction, Place, ReductionKind,
};
use crate::error::{Error, Result};

/// Default bound `B` for the trace comparison.
pub const DEFAULT_BOUND: u64 = 1000;
/// Smallest accepted bound.
pub const MIN_BOUND: u64 = 50;

/// Outcome of the trace comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CongruenceVerdict {
    /// Every tested `ℓ ≤ bound` is compatible.
    CongruentUpToBound { bound: u64, primes_tested: usize },
    /// The first incompatible prime.
    NotCongruent { witness: u64, reason: String },
}

impl CongruenceVerdict {
    pub fn is_congruent(&self) -> bool {
        matches!(self, CongruenceVerdict::CongruentUpToBound { .. })
    }
}

/// Status of hypothesis (2), irreducibility of `E[p]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Irreducibility {
    /// Supplied by the user; not checked.
    Asserted,
    /// The heuristic found a prime ruling out the trivial-character isogeny pattern.
    HeuristicallyChecked,
    /// The heuristic could not rule out reducibility.
    Unknown,
}

/// Compatibility of the local data of two curves at one rational prime
/// `ℓ ≠ p`. `None` means the prime carries no information (additive or
/// uncounted).
fn compatible_at(d1: &LocalData, d2: &LocalData, p: u64) -> Option<std::result::Result<(), String>> {
    use ReductionKind::*;
    let pi = p as i64;
    let l = d1.prime as i64;
    let eq_mod = |a: i64, b: i64| (a - b).mod_floor(&pi) == 0;
    match (d1.kind, d2.kind) {
        (Additive, _) | (_, Additive) => None,
        (Good, Good) => {
            let (a1, a2) = (d1.a_v?, d2.a_v?);
            Some(if eq_mod(a1, a2) { Ok(()) } else { Err(format!("a_{l} = {a1} vs {a2} (mod {p})")) })
        }
        (Good, _) | (_, Good) => {
            let (good, mult) = if d1.kind == Good { (d1, d2) } else { (d2, d1) };
            let a = good.a_v?;
            let eps = mult.a_v?;
            Some(if eq_mod(a, eps * (1 + l)) {
                Ok(())
            } else {
                Err(format!("a_{l} = {a} is not ≡ {eps}·(1+{l}) (mod {p}) against multiplicative reduction"))
            })
        }
        _ => {
            let (e1, e2) = (d1.a_v?, d2.a_v?);
            Some(if e1 == e2 || eq_mod(l, -1) {
                Ok(())
            } else {
                Err(format!("multiplicative signs {e1} vs {e2} at {l} with {l} ≢ −1 (mod {p})"))
            })
        }
    }
}

fn check_bound(bound: u64) -> Result<()> {
    if bound < MIN_BOUND {
        return Err(Error::InvalidInput(format!("congruence bound {bound} is below the minimum {MIN_BOUND}")));
    }
    Ok(())
}

/// Compares the two curves at every prime `ℓ ≤ bound`, `ℓ ≠ p`, over Q:
/// traces mod p at common good primes, `a_ℓ ≡ ε(1+ℓ)` against a
/// multiplicative prime of sign `ε`, and equal signs (or `ℓ ≡ −1 mod p`) at
/// common multiplicative primes. Additive primes are skipped.
pub fn test_p_congruence(
    e1: &CurveModel,
    e2: &CurveModel,
    p: u64,
    bound: u64,
    memo: &LocalDataMemo,
) -> Result<CongruenceVerdict> {
    ensure_prime(p)?;
    check_bound(bound)?;
    let mut tested = 0;
    for l in primes_up_to(bound) {
        if l == p {
            continue;
        }
        let d1 = memo.get_or_compute(e1, l)?;
        let d2 = memo.get_or_compute(e2, l)?;
        match compatible_at(&d1, &d2, p) {
            None => {}
            Some(Ok(())) => tested += 1,
            Some(Err(reason)) => return Ok(CongruenceVerdict::NotCongruent { witness: l, reason }),
        }
    }
    Ok(CongruenceVerdict::CongruentUpToBound { bound, primes_tested: tested })
}

/// Same test driven by precomputed per-prime tables (each sorted by prime,
/// both covering the same primes).
pub fn test_p_congruence_tables(t1: &[LocalData], t2: &[LocalData], p: u64, bound: u64) -> Result<CongruenceVerdict> {
    check_bound(bound)?;
    let mut tested = 0;
    for (d1, d2) in t1.iter().zip(t2) {
        if d1.prime != d2.prime {
            return Err(Error::Incompatible("local tables cover different primes".into()));
        }
        if d1.prime == p || d1.prime > bound {
            continue;
        }
        match compatible_at(d1, d2, p) {
            None => {}
            Some(Ok(())) => tested += 1,
            Some(Err(reason)) => return Ok(CongruenceVerdict::NotCongruent { witness: d1.prime, reason }),
        }
    }
    Ok(CongruenceVerdict::CongruentUpToBound { bound, primes_tested: tested })
}

/// Irreducibility heuristic: a curve with a p-isogeny whose kernel has
/// trivial character satisfies `a_ℓ ≡ 1 + ℓ (mod p)` at every good `ℓ`.
/// One good prime breaking the pattern rules that case out. This is not a
/// proof of irreducibility.
pub fn irreducibility_heuristic(e: &CurveModel, p: u64, bound: u64, memo: &LocalDataMemo) -> Result<Irreducibility> {
    for l in primes_up_to(bound) {
        if l == p {
            continue;
        }
        let d = memo.get_or_compute(e, l)?;
        if let (ReductionKind::Good, Some(a)) = (d.kind, d.a_v) {
            if (a - 1 - l as i64).mod_floor(&(p as i64)) != 0 {
                return Ok(Irreducibility::HeuristicallyChecked);
            }
        }
    }
    Ok(Irreducibility::Unknown)
}

/// `Σ_ss(E)`: places above p of supersingular reduction.
///
/// Additive reduction above p violates hypothesis (1) and is an error.
pub fn supersingular_set(e: &CurveModel, p: u64) -> Result<Vec<Place>> {
    let cls = classify_places_above_p(e, p)?;
    if let Some(c) = cls.iter().find(|c| c.reduction == PReduction::Additive) {
        return Err(Error::HypothesisViolation { clause: 1, detail: format!("additive reduction at {}", c.place) });
    }
    Ok(cls.into_iter().filter(|c| c.reduction == PReduction::GoodSupersingular).map(|c| c.place).collect())
}

/// Whether the completion at a place of residue size `Nv` contains `μ_p`.
pub fn mu_p_in_completion(nv: u64, p: u64) -> bool {
    nv % p == 1
}

/// Bad places away from p, with the local data where it is available.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadPlaces {
    pub data: Vec<LocalData>,
    /// Places whose local data could not be derived (the ramified place of Q(i)).
    pub manual_review: Vec<Place>,
}

impl BadPlaces {
    pub fn places(&self) -> BTreeSet<Place> {
        self.data.iter().map(|d| d.place.clone()).chain(self.manual_review.iter().cloned()).collect()
    }
}

/// Local data at every bad place of `e` (over its base field) not above `p`.
pub fn bad_places_away_from_p(e: &CurveModel, p: u64, memo: &LocalDataMemo) -> Result<BadPlaces> {
    let mut out = BadPlaces::default();
    for l in bad_primes(e)? {
        if l == p {
            continue;
        }
        match memo.places_over(e, l) {
            Ok(ds) => out.data.extend(ds.into_iter().filter(|d| d.kind != ReductionKind::Good)),
            Err(Error::ManualReview(_)) => out.manual_review.extend(splitting_in_qi(l)?.places()),
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

/// `{v ∤ p : E multiplicative at v and p | ord_v(Δ_min)}` — the places where
/// the conductor of `E` exceeds the prime-to-p residual conductor.
///
/// Additive places are never included: for `p ≥ 5` the tame conductor
/// exponents of `E` and `E[p]` agree there.
pub fn residual_conductor_quotient_support(e: &CurveModel, p: u64, memo: &LocalDataMemo) -> Result<BadPlaces> {
    let bad = bad_places_away_from_p(e, p, memo)?;
    Ok(BadPlaces {
        data: bad
            .data
            .into_iter()
            .filter(|d| d.kind.is_multiplicative() && d.ord_delta_min as u64 % p == 0)
            .collect(),
        manual_review: bad.manual_review,
    })
}

/// A place of `Σ₀` left out of `Σ₁`, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub curve: String,
    pub place: Place,
    pub reason: String,
}

/// `Σ₀`, `Σ₁` and the bookkeeping behind them for one pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprimitiveSets {
    /// Bad places away from p of either curve.
    pub sigma0: BTreeSet<Place>,
    /// `Σ₁(E₁) ∪ Σ₁(E₂)`.
    pub sigma1: BTreeSet<Place>,
    pub sigma1_by_curve: [BTreeSet<Place>; 2],
    pub exclusions: Vec<Exclusion>,
    /// Places in `Σ₀` whose membership in `Σ₁` could not be decided.
    pub manual_review: BTreeSet<Place>,
}

fn sigma1_single(
    e: &CurveModel,
    p: u64,
    memo: &LocalDataMemo,
    exclusions: &mut Vec<Exclusion>,
) -> Result<(BTreeSet<Place>, BTreeSet<Place>, Vec<Place>)> {
    let bad = bad_places_away_from_p(e, p, memo)?;
    let mut sigma1 = BTreeSet::new();
    let mut exclude = |place: &Place, reason: String| {
        exclusions.push(Exclusion { curve: e.label.clone(), place: place.clone(), reason })
    };
    for d in &bad.data {
        let mut reasons = Vec::new();
        if !d.kind.is_multiplicative() {
            reasons.push("additive reduction: conductor exponent unchanged mod p".to_string());
        } else if d.ord_delta_min as u64 % p != 0 {
            reasons.push(format!("ord(Δ_min) = {} is prime to {p}: E[{p}] is ramified", d.ord_delta_min));
        }
        if p != 3
            && d.kind != ReductionKind::Additive
            && mu_p_in_completion(d.residue_norm, p)
            && d.kind != ReductionKind::SplitMultiplicative
        {
            reasons.push(format!("Nv = {} ≡ 1 (mod {p}) so μ_{p} ⊂ F_v, but the reduction is non-split", d.residue_norm));
        }
        if reasons.is_empty() {
            sigma1.insert(d.place.clone());
        } else {
            exclude(&d.place, reasons.join("; "));
        }
    }
    Ok((bad.places(), sigma1, bad.manual_review))
}

/// The optimal imprimitive set `Σ₁ = Σ₁(E₁) ∪ Σ₁(E₂)`, where `Σ₁(E)` keeps
/// the bad places `v ∤ p` with
/// (ii) multiplicative reduction and `p | ord_v(Δ_min)`, and
/// (iii) split reduction whenever `Nv ≡ 1 (mod p)` (dropped for `p = 3`).
///
/// Places whose local data is unavailable are reported in `manual_review`
/// and left out of `Σ₁`.
pub fn sigma1(e1: &CurveModel, e2: &CurveModel, p: u64, memo: &LocalDataMemo) -> Result<ImprimitiveSets> {
    ensure_prime(p)?;
    if p == 2 {
        return Err(Error::UnsupportedPrime { p, reason: "p must be odd".into() });
    }
    if e1.base_field != e2.base_field {
        return Err(Error::Incompatible("curves are over different fields".into()));
    }
    let mut exclusions = Vec::new();
    let (s0a, s1a, mra) = sigma1_single(e1, p, memo, &mut exclusions)?;
    let (s0b, s1b, mrb) = sigma1_single(e2, p, memo, &mut exclusions)?;
    Ok(ImprimitiveSets {
        sigma0: s0a.union(&s0b).cloned().collect(),
        sigma1: s1a.union(&s1b).cloned().collect(),
        sigma1_by_curve: [s1a, s1b],
        exclusions,
        manual_review: mra.into_iter().chain(mrb).collect(),
    })
}

/// One clause of the standing hypotheses, as checked for one curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub clause: u8,
    pub curve: String,
    pub holds: Option<bool>,
    pub detail: String,
}

/// Checks hypotheses (1) semistability above p, (3) `F_v = Q_p` at
/// supersingular places and (4) `a_v = 0` there; records (2) from `irr`.
pub fn check_hypotheses(e: &CurveModel, p: u64, irr: Irreducibility) -> Result<(Vec<PClassification>, Vec<HypothesisCheck>)> {
    let cls = classify_places_above_p(e, p)?;
    let mut checks = Vec::new();
    let label = e.label.clone();
    let failing = |clause: u8| cls.iter().filter_map(move |c| c.violation.as_ref().filter(|v| v.0 == clause));
    for clause in [1u8, 3, 4] {
        let bad: Vec<_> = failing(clause).map(|v| v.1.clone()).collect();
        let detail = if bad.is_empty() {
            match clause {
                1 => "no additive reduction above p".to_string(),
                3 => "every supersingular place above p has completion Q_p".to_string(),
                _ => "a_v = 0 at every supersingular place above p".to_string(),
            }
        } else {
            bad.join("; ")
        };
        checks.push(HypothesisCheck { clause, curve: label.clone(), holds: Some(bad.is_empty()), detail });
    }
    // Clause (4) can be masked by clause (3) in the per-place record.
    if let Some(c) = cls.iter().find(|c| c.reduction == PReduction::GoodSupersingular && c.a_v != Some(0)) {
        let check = checks.iter_mut().find(|c| c.clause == 4).expect("clause 4 present");
        if check.holds == Some(true) {
            check.holds = Some(false);
            check.detail = format!("supersingular at {} with a_v = {:?}", c.place, c.a_v);
        }
    }
    let (holds, detail) = match irr {
        Irreducibility::Asserted => (None, "E[p] irreducible: asserted by the user, not verified".to_string()),
        Irreducibility::HeuristicallyChecked => {
            (None, "E[p] irreducible: heuristic passed (not a proof)".to_string())
        }
        Irreducibility::Unknown => (None, "E[p] irreducible: heuristic inconclusive, possibly reducible".to_string()),
    };
    checks.push(HypothesisCheck { clause: 2, curve: label, holds, detail });
    checks.sort_by_key(|c| c.clause);
    Ok((cls, checks))
}

/// Everything known about the residual pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualPair {
    pub p: u64,
    pub labels: [String; 2],
    pub field: BaseField,
    pub congruence: CongruenceVerdict,
    pub irreducibility: [Irreducibility; 2],
    pub sigma_ss: [Vec<Place>; 2],
    pub sets: ImprimitiveSets,
}

impl ResidualPair {
    /// Whether the two supersingular sets agree, as they must for congruent curves.
    pub fn sigma_ss_agree(&self) -> bool {
        self.sigma_ss[0] == self.sigma_ss[1]
    }
}
