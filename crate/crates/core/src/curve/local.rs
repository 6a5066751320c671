//! Per-place local data, reduction at p, and the shared memo table.

use std::collections::HashMap;
use std::sync::RwLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::points::{count_points, POINT_COUNT_CAP};
use super::qi::{base_change_local_data, splitting_in_qi, Place};
use super::tate::{tate_algorithm, Kodaira, ReductionKind};
use super::{BaseField, CurveModel};
use crate::arith::{is_prime_u64, prime_factors};
use crate::error::{Error, Result};

/// Local data of a curve at one place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalData {
    pub place: Place,
    /// Residue characteristic `ℓ`.
    pub prime: u64,
    /// Residue field size `Nv`.
    pub residue_norm: u64,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u32,
    pub kind: ReductionKind,
    /// Trace of Frobenius: counted for good reduction, `±1` for
    /// multiplicative, 0 for additive. `None` only for good primes beyond
    /// the point-counting cap.
    pub a_v: Option<i64>,
    pub ord_delta_min: u32,
    /// Tamagawa number over the unramified quadratic extension.
    pub tamagawa_quadratic: u32,
}

/// Local data over `Q_ℓ`.
pub fn local_data(e: &CurveModel, l: u64) -> Result<LocalData> {
    let t = tate_algorithm(e, l)?;
    let a_v = match t.kind {
        ReductionKind::Good => {
            if l > POINT_COUNT_CAP {
                None
            } else {
                let minimal = CurveModel { label: e.label.clone(), a: t.minimal_model.clone(), base_field: BaseField::Q };
                Some(count_points(&minimal, l)?)
            }
        }
        ReductionKind::SplitMultiplicative => Some(1),
        ReductionKind::NonsplitMultiplicative => Some(-1),
        ReductionKind::Additive => Some(0),
    };
    Ok(LocalData {
        place: Place::rational(l),
        prime: l,
        residue_norm: l,
        kodaira: t.kodaira,
        conductor_exponent: t.conductor_exponent,
        tamagawa: t.tamagawa,
        kind: t.kind,
        a_v,
        ord_delta_min: t.ord_delta_min,
        tamagawa_quadratic: t.tamagawa_quadratic,
    })
}

/// Local data at every place above `ℓ` of the curve's base field.
pub fn local_data_over(e: &CurveModel, l: u64) -> Result<Vec<LocalData>> {
    let d = local_data(e, l)?;
    match e.base_field {
        BaseField::Q => Ok(vec![d]),
        BaseField::Qi => base_change_local_data(&d, &splitting_in_qi(l)?),
    }
}

/// Rational primes of bad reduction (after local minimalization).
pub fn bad_primes(e: &CurveModel) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for l in prime_factors(&e.discriminant())? {
        if tate_algorithm(e, l)?.kind != ReductionKind::Good {
            out.push(l);
        }
    }
    Ok(out)
}

/// Reduction type at a place above p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PReduction {
    GoodOrdinary,
    GoodSupersingular,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

impl PReduction {
    pub fn as_str(&self) -> &'static str {
        match self {
            PReduction::GoodOrdinary => "good-ordinary",
            PReduction::GoodSupersingular => "good-supersingular",
            PReduction::SplitMultiplicative => "split-mult",
            PReduction::NonsplitMultiplicative => "nonsplit-mult",
            PReduction::Additive => "additive",
        }
    }
}

/// Classification at one place above p, with any violation of the standing
/// hypotheses it exhibits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PClassification {
    pub place: Place,
    pub reduction: PReduction,
    pub a_v: Option<i64>,
    /// `(clause, explanation)` when the place breaks a standing hypothesis.
    pub violation: Option<(u8, String)>,
}

fn classify_one(d: &LocalData, p: u64) -> PClassification {
    let mut violation = None;
    let reduction = match d.kind {
        ReductionKind::Good => {
            let a = d.a_v.expect("places above p are within the point-counting cap");
            if a.mod_floor(&(p as i64)) == 0 {
                if a != 0 {
                    violation = Some((4, format!("supersingular at {} with a_v = {a} ≠ 0", d.place)));
                }
                if d.residue_norm != p {
                    violation = Some((
                        3,
                        format!("supersingular at {} whose completion is not Q_{p} (Nv = {})", d.place, d.residue_norm),
                    ));
                }
                PReduction::GoodSupersingular
            } else {
                PReduction::GoodOrdinary
            }
        }
        ReductionKind::SplitMultiplicative => PReduction::SplitMultiplicative,
        ReductionKind::NonsplitMultiplicative => PReduction::NonsplitMultiplicative,
        ReductionKind::Additive => {
            violation = Some((1, format!("additive reduction at {}", d.place)));
            PReduction::Additive
        }
    };
    PClassification { place: d.place.clone(), reduction, a_v: d.a_v, violation }
}

/// Reduction type of a model over Q at `p ≥ 5`.
pub fn classify_at_p(e: &CurveModel, p: u64) -> Result<PClassification> {
    check_p(p)?;
    Ok(classify_one(&local_data(e, p)?, p))
}

/// Classification at every place above `p` of the curve's base field.
pub fn classify_places_above_p(e: &CurveModel, p: u64) -> Result<Vec<PClassification>> {
    check_p(p)?;
    Ok(local_data_over(e, p)?.iter().map(|d| classify_one(d, p)).collect())
}

fn check_p(p: u64) -> Result<()> {
    if p < 5 || !is_prime_u64(p) {
        return Err(Error::UnsupportedPrime {
            p,
            reason: "supersingular classification needs a prime p ≥ 5".into(),
        });
    }
    Ok(())
}

/// Upper bound for the p-part of `#E(Q)_tors`: the p-part of
/// `gcd #Ẽ(F_ℓ)` over the first twelve primes `ℓ ∤ pΔ`.
pub fn torsion_p_part_bound(e: &CurveModel, p: u64) -> Result<u64> {
    if e.base_field != BaseField::Q {
        return Err(Error::InvalidInput("torsion bound is computed over Q only".into()));
    }
    let disc = e.discriminant();
    let mut g = 0i64;
    let mut used = 0;
    let mut l = 1u64;
    while used < 12 {
        l += 1;
        if !is_prime_u64(l) || l == p || (&disc % l) == num_bigint::BigInt::from(0) {
            continue;
        }
        let n = l as i64 + 1 - count_points(e, l)?;
        g = g.gcd(&n);
        used += 1;
    }
    let mut part = 1u64;
    while g != 0 && g % p as i64 == 0 {
        g /= p as i64;
        part *= p;
    }
    Ok(part)
}

/// Shared table of local data keyed by `(curve label, prime)`; concurrent
/// readers, serialized writers.
#[derive(Debug, Default)]
pub struct LocalDataMemo {
    table: RwLock<HashMap<(String, u64), LocalData>>,
}

impl LocalDataMemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Local data over Q at `ℓ`, computed at most once per key.
    pub fn get_or_compute(&self, e: &CurveModel, l: u64) -> Result<LocalData> {
        let key = (e.label.clone(), l);
        if let Some(d) = self.table.read().expect("memo lock").get(&key) {
            return Ok(d.clone());
        }
        let d = local_data(e, l)?;
        self.table.write().expect("memo lock").entry(key).or_insert_with(|| d.clone());
        Ok(d)
    }

    /// Seeds the table with data computed elsewhere (e.g. read from a cache).
    pub fn insert(&self, label: &str, d: LocalData) {
        self.table.write().expect("memo lock").entry((label.to_string(), d.prime)).or_insert(d);
    }

    /// Local data at all places above `ℓ` of the curve's base field.
    pub fn places_over(&self, e: &CurveModel, l: u64) -> Result<Vec<LocalData>> {
        let d = self.get_or_compute(e, l)?;
        match e.base_field {
            BaseField::Q => Ok(vec![d]),
            BaseField::Qi => base_change_local_data(&d, &splitting_in_qi(l)?),
        }
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
