//! Primes of Q(i) and base change of local data from Q.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::local::LocalData;
use super::tate::ReductionKind;
use crate::arith::{ensure_prime, pow_mod_u64};
use crate::error::{Error, Result};

/// A finite place: the rational prime below it, a printable label and the
/// size of its residue field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Place {
    pub prime: u64,
    pub label: String,
    pub norm: u64,
}

impl Place {
    pub fn rational(prime: u64) -> Self {
        Self { prime, label: prime.to_string(), norm: prime }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Decomposition of a rational prime in Q(i).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// `ℓ ≡ 1 (mod 4)`: `ℓ = (a+bi)(a−bi)`, two places of norm `ℓ`.
    Split([Place; 2]),
    /// `ℓ ≡ 3 (mod 4)`: one place of norm `ℓ²`.
    Inert(Place),
    /// `ℓ = 2 = −i(1+i)²`: one place of norm 2.
    Ramified(Place),
}

impl Splitting {
    pub fn places(&self) -> Vec<Place> {
        match self {
            Splitting::Split(ps) => ps.to_vec(),
            Splitting::Inert(p) | Splitting::Ramified(p) => vec![p.clone()],
        }
    }
}

/// Writes `ℓ = a² + b²` with `a > b > 0` (Cornacchia).
fn two_squares(l: u64) -> (u64, u64) {
    let x = (2..l)
        .map(|c| pow_mod_u64(c, (l - 1) / 4, l))
        .find(|&x| (x as u128 * x as u128 % l as u128) as u64 == l - 1)
        .expect("−1 is a square modulo ℓ ≡ 1 mod 4");
    let (mut r0, mut r1) = (l, x);
    while (r1 as u128) * (r1 as u128) > l as u128 {
        let r2 = r0 % r1;
        r0 = r1;
        r1 = r2;
    }
    let a = r1;
    let b2 = l - a * a;
    let b = (b2 as f64).sqrt().round() as u64;
    debug_assert_eq!(a * a + b * b, l);
    (a.max(b), a.min(b))
}

fn gaussian_label(a: u64, b: u64, sign: char) -> String {
    if b == 1 {
        format!("{a}{sign}i")
    } else {
        format!("{a}{sign}{b}i")
    }
}

/// How the rational prime `ℓ` decomposes in Q(i).
pub fn splitting_in_qi(l: u64) -> Result<Splitting> {
    ensure_prime(l)?;
    if l == 2 {
        return Ok(Splitting::Ramified(Place { prime: 2, label: "1+i".into(), norm: 2 }));
    }
    if l % 4 == 3 {
        let norm = l.checked_mul(l).ok_or_else(|| Error::InvalidInput(format!("norm of {l} overflows")))?;
        return Ok(Splitting::Inert(Place { prime: l, label: l.to_string(), norm }));
    }
    let (a, b) = two_squares(l);
    Ok(Splitting::Split([
        Place { prime: l, label: gaussian_label(a, b, '+'), norm: l },
        Place { prime: l, label: gaussian_label(a, b, '-'), norm: l },
    ]))
}

/// Local data at the places of Q(i) above `ℓ`, from the data over `Q_ℓ`.
///
/// Split primes duplicate the data. At an inert prime the completion is the
/// unramified quadratic extension: the Kodaira type, conductor exponent and
/// `ord(Δ_min)` are unchanged, non-split multiplicative reduction becomes
/// split, and Tamagawa numbers are taken over the residue field `F_{ℓ²}`.
/// The ramified prime is not handled and is flagged for manual review.
pub fn base_change_local_data(d: &LocalData, splitting: &Splitting) -> Result<Vec<LocalData>> {
    match splitting {
        Splitting::Split(places) => Ok(places
            .iter()
            .map(|pl| LocalData { place: pl.clone(), ..d.clone() })
            .collect()),
        Splitting::Inert(pl) => {
            let l = d.prime as i64;
            let (kind, a_v) = match d.kind {
                ReductionKind::Good => (ReductionKind::Good, d.a_v.map(|a| a * a - 2 * l)),
                ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative => {
                    (ReductionKind::SplitMultiplicative, Some(1))
                }
                ReductionKind::Additive => (ReductionKind::Additive, Some(0)),
            };
            Ok(vec![LocalData {
                place: pl.clone(),
                residue_norm: pl.norm,
                kind,
                a_v,
                tamagawa: d.tamagawa_quadratic,
                ..d.clone()
            }])
        }
        Splitting::Ramified(pl) => Err(Error::ManualReview(format!(
            "local data at the ramified place {pl} of Q(i) is not computed by base change"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_examples() {
        match splitting_in_qi(5).unwrap() {
            Splitting::Split([a, b]) => {
                assert_eq!((a.label.as_str(), b.label.as_str()), ("2+i", "2-i"));
                assert_eq!(a.norm, 5);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            splitting_in_qi(19).unwrap(),
            Splitting::Inert(Place { prime: 19, label: "19".into(), norm: 361 })
        );
        assert!(matches!(splitting_in_qi(2).unwrap(), Splitting::Ramified(_)));
        assert!(splitting_in_qi(9).is_err());
    }

    #[test]
    fn two_squares_large() {
        for l in [13u64, 29, 1_000_000_009, 998_244_353] {
            let (a, b) = two_squares(l);
            assert_eq!(a * a + b * b, l);
        }
    }
}
