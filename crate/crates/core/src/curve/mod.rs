//! Weierstrass models over Q and their local invariants.

mod local;
mod points;
mod qi;
mod tate;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use local::{
    bad_primes, classify_at_p, classify_places_above_p, local_data, local_data_over, torsion_p_part_bound,
    LocalData, LocalDataMemo, PClassification, PReduction,
};
pub use points::{count_points, count_points_scan, FieldSize, POINT_COUNT_CAP};
pub use qi::{base_change_local_data, splitting_in_qi, Place, Splitting};
pub use tate::{tate_algorithm, Kodaira, ReductionKind, TateOutput};

/// The field the curve is considered over: Q itself, or the base change of
/// the Q-model to Q(i).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseField {
    Q,
    Qi,
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseField::Q => "Q",
            BaseField::Qi => "Qi",
        })
    }
}

impl std::str::FromStr for BaseField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(BaseField::Q),
            "Qi" | "qi" | "Q(i)" => Ok(BaseField::Qi),
            other => Err(Error::InvalidInput(format!("unknown field {other:?} (expected Q or Qi)"))),
        }
    }
}

/// An integral Weierstrass model `y² + a1xy + a3y = x³ + a2x² + a4x + a6`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveModel {
    pub label: String,
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [BigInt; 5],
    pub base_field: BaseField,
}

/// Standard quantities attached to a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub discriminant: BigInt,
    pub j: BigRational,
}

impl CurveModel {
    /// A model over Q; fails on a singular model.
    pub fn new(label: impl Into<String>, a: [BigInt; 5]) -> Result<Self> {
        let label = label.into();
        let curve = Self { label: label.clone(), a, base_field: BaseField::Q };
        if curve.discriminant().is_zero() {
            return Err(Error::SingularModel { label: Some(label) });
        }
        Ok(curve)
    }

    pub fn from_i64(label: impl Into<String>, a: [i64; 5]) -> Result<Self> {
        Self::new(label, a.map(BigInt::from))
    }

    /// The same model, regarded over `field`.
    pub fn over(&self, field: BaseField) -> Self {
        Self { base_field: field, ..self.clone() }
    }

    pub fn discriminant(&self) -> BigInt {
        b_invariants(&self.a).4
    }

    pub fn invariants(&self) -> Result<Invariants> {
        curve_invariants(self)
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(f, "{} [{a1},{a2},{a3},{a4},{a6}]", self.label)?;
        if self.base_field == BaseField::Qi {
            write!(f, " over Q(i)")?;
        }
        Ok(())
    }
}

/// `(b2, b4, b6, b8, Δ)`.
pub(crate) fn b_invariants(a: &[BigInt; 5]) -> (BigInt, BigInt, BigInt, BigInt, BigInt) {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = a1 * a3 + 2 * a4;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let disc = -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
    (b2, b4, b6, b8, disc)
}

/// `b2, b4, b6, b8, c4, c6, Δ, j` of a model; fails on a singular model.
pub fn curve_invariants(e: &CurveModel) -> Result<Invariants> {
    let (b2, b4, b6, b8, discriminant) = b_invariants(&e.a);
    if discriminant.is_zero() {
        return Err(Error::SingularModel { label: Some(e.label.clone()) });
    }
    let c4 = &b2 * &b2 - 24 * &b4;
    let c6 = -&b2 * &b2 * &b2 + 36 * &b2 * &b4 - 216 * &b6;
    let j = BigRational::new(&c4 * &c4 * &c4, discriminant.clone());
    Ok(Invariants { b2, b4, b6, b8, c4, c6, discriminant, j })
}

/// Change of variables `x = x' + r`, `y = y' + s x' + t`.
pub(crate) fn rst_transform(a: &[BigInt; 5], r: &BigInt, s: &BigInt, t: &BigInt) -> [BigInt; 5] {
    let [a1, a2, a3, a4, a6] = a;
    [
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn invariants_of_x3_plus_1() {
        let e = CurveModel::from_i64("t", [0, 0, 0, 0, 1]).unwrap();
        let inv = e.invariants().unwrap();
        assert_eq!(inv.discriminant, BigInt::from(-432));
        assert!(inv.j.is_zero());
    }

    #[test]
    fn singular_model_is_rejected() {
        assert!(matches!(CurveModel::from_i64("s", [0, 0, 0, 0, 0]), Err(Error::SingularModel { .. })));
    }

    proptest! {
        #[test]
        fn c4_c6_identity(a in prop::array::uniform5(-50i64..50)) {
            let e = CurveModel { label: "r".into(), a: a.map(BigInt::from), base_field: BaseField::Q };
            let (b2, b4, b6, _, d) = b_invariants(&e.a);
            let c4 = &b2 * &b2 - 24 * &b4;
            let c6 = -&b2 * &b2 * &b2 + 36 * &b2 * &b4 - 216 * &b6;
            prop_assert_eq!(BigInt::from(1728) * d, &c4 * &c4 * &c4 - &c6 * &c6);
        }

        #[test]
        fn scaling_multiplies_disc_by_u12(a in prop::array::uniform5(-30i64..30), u in 1i64..6) {
            let base = a.map(BigInt::from);
            let d = b_invariants(&base).4;
            let scaled = [a[0] * u, a[1] * u.pow(2), a[2] * u.pow(3), a[3] * u.pow(4), a[4] * u.pow(6)].map(BigInt::from);
            prop_assert_eq!(b_invariants(&scaled).4, d * BigInt::from(u).pow(12));
        }

        #[test]
        fn rst_preserves_discriminant(a in prop::array::uniform5(-30i64..30), r in -5i64..5, s in -5i64..5, t in -5i64..5) {
            let base = a.map(BigInt::from);
            let moved = rst_transform(&base, &BigInt::from(r), &BigInt::from(s), &BigInt::from(t));
            prop_assert_eq!(b_invariants(&moved).4, b_invariants(&base).4);
        }
    }
}
