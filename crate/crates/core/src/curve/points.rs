//! Naive point counting over `F_ℓ` and `F_{ℓ²}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{b_invariants, CurveModel};
use crate::arith::{is_prime_u64, pow_mod_u64};
use crate::error::{Error, Result};

/// Largest residue field size accepted by [`count_points`].
pub const POINT_COUNT_CAP: u64 = 1_000_000;

/// A residue field size `q = ℓ^k`, `k ∈ {1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSize {
    pub char: u64,
    pub degree: u32,
}

impl FieldSize {
    pub fn parse(q: u64) -> Result<Self> {
        if is_prime_u64(q) {
            return Ok(Self { char: q, degree: 1 });
        }
        let r = (q as f64).sqrt().round() as u64;
        for l in [r.saturating_sub(1), r, r + 1] {
            if l * l == q && is_prime_u64(l) {
                return Ok(Self { char: l, degree: 2 });
            }
        }
        Err(Error::InvalidInput(format!("{q} is neither a prime nor the square of a prime")))
    }

    pub fn size(&self) -> u64 {
        self.char.pow(self.degree)
    }
}

/// `F_ℓ` or `F_ℓ[s]/(s² − αs − β)` with the modulus irreducible.
#[derive(Clone, Copy, Debug)]
struct Field {
    l: u64,
    deg: u32,
    alpha: u64,
    beta: u64,
}

type El = (u64, u64);

impl Field {
    fn new(size: FieldSize) -> Self {
        let l = size.char;
        if size.degree == 1 {
            return Self { l, deg: 1, alpha: 0, beta: 0 };
        }
        if l == 2 {
            // s² = s + 1
            return Self { l, deg: 2, alpha: 1, beta: 1 };
        }
        let beta = (2..l).find(|&n| pow_mod_u64(n, (l - 1) / 2, l) == l - 1).expect("non-residue exists");
        Self { l, deg: 2, alpha: 0, beta }
    }

    fn elements(&self) -> impl Iterator<Item = El> + '_ {
        let l = self.l;
        let hi = if self.deg == 2 { l } else { 1 };
        (0..hi).flat_map(move |b| (0..l).map(move |a| (a, b)))
    }

    fn embed(&self, x: &BigInt) -> El {
        (x.mod_floor(&BigInt::from(self.l)).to_u64().expect("reduced"), 0)
    }

    fn add(&self, x: El, y: El) -> El {
        ((x.0 + y.0) % self.l, (x.1 + y.1) % self.l)
    }

    fn mul(&self, x: El, y: El) -> El {
        let l = self.l as u128;
        let (a, b, c, d) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let bd = b * d % l;
        let re = (a * c + bd * self.beta as u128) % l;
        let im = (a * d + b * c + bd * self.alpha as u128) % l;
        (re as u64, im as u64)
    }

    /// Quadratic character for odd characteristic: `χ(z) = (N(z) / ℓ)`.
    fn chi(&self, z: El) -> i64 {
        let l = self.l;
        let n = if self.deg == 1 {
            z.0
        } else {
            let a2 = (z.0 as u128 * z.0 as u128 % l as u128) as u64;
            let b2 = (z.1 as u128 * z.1 as u128 % l as u128) as u64;
            let bb = (b2 as u128 * self.beta as u128 % l as u128) as u64;
            (a2 + l - bb) % l
        };
        if n == 0 {
            0
        } else if pow_mod_u64(n, (l - 1) / 2, l) == 1 {
            1
        } else {
            -1
        }
    }
}

fn check_request(e: &CurveModel, q: u64) -> Result<(FieldSize, Field)> {
    if q > POINT_COUNT_CAP {
        return Err(Error::FieldTooLarge { q, cap: POINT_COUNT_CAP });
    }
    let size = FieldSize::parse(q)?;
    let disc = b_invariants(&e.a).4;
    if (disc % BigInt::from(size.char)) == BigInt::from(0) {
        return Err(Error::BadReduction { prime: size.char });
    }
    Ok((size, Field::new(size)))
}

/// `a_q = q + 1 − #Ẽ(F_q)` for a model with good reduction at the prime under `q`.
///
/// Odd characteristic uses the character sum after completing the square;
/// characteristic 2 falls back to the full `(x, y)` scan.
pub fn count_points(e: &CurveModel, q: u64) -> Result<i64> {
    let (size, field) = check_request(e, q)?;
    let a = if size.char == 2 { scan(e, &field) } else { character_sum(e, &field) };
    let bound = 4 * q as i128;
    assert!((a as i128) * (a as i128) <= bound, "Hasse bound violated: a_{q} = {a}");
    Ok(a)
}

/// Same as [`count_points`] but always by the exhaustive `(x, y)` scan.
pub fn count_points_scan(e: &CurveModel, q: u64) -> Result<i64> {
    let (_, field) = check_request(e, q)?;
    Ok(scan(e, &field))
}

fn character_sum(e: &CurveModel, f: &Field) -> i64 {
    let (b2, b4, b6, _, _) = b_invariants(&e.a);
    // (2y + a1x + a3)² = 4x³ + b2x² + 2b4x + b6
    let c3 = f.embed(&BigInt::from(4));
    let c2 = f.embed(&b2);
    let c1 = f.embed(&(2 * b4));
    let c0 = f.embed(&b6);
    let mut sum = 0i64;
    for x in f.elements() {
        let v = f.add(f.mul(f.add(f.mul(f.add(f.mul(c3, x), c2), x), c1), x), c0);
        sum += f.chi(v);
    }
    -sum
}

fn scan(e: &CurveModel, f: &Field) -> i64 {
    let [a1, a2, a3, a4, a6] = e.a.clone().map(|x| f.embed(&x));
    let q = f.l.pow(f.deg) as i64;
    let neg = |z: El| ((f.l - z.0) % f.l, (f.l - z.1) % f.l);
    let mut count = 1i64;
    for x in f.elements() {
        let rhs = f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6);
        for y in f.elements() {
            let lhs = f.mul(y, f.add(f.add(y, f.mul(a1, x)), a3));
            if f.add(lhs, neg(rhs)) == (0, 0) {
                count += 1;
            }
        }
    }
    q + 1 - count
}
