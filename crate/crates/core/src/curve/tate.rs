//! Tate's algorithm at an arbitrary prime, including residue characteristic 2 and 3.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{b_invariants, rst_transform, CurveModel};
use crate::arith::{ensure_prime, inv_mod, is_square_mod, pow_u, vp_int};
use crate::error::{Error, Result};

/// Kodaira–Néron type of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Number of irreducible components of the special fibre.
    pub fn components(&self) -> u32 {
        match self {
            Kodaira::I0 | Kodaira::II => 1,
            Kodaira::In(n) => *n,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::I0Star => 5,
            Kodaira::InStar(m) => m + 5,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(m) => write!(f, "I{m}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl std::str::FromStr for Kodaira {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown Kodaira symbol {s:?}"));
        Ok(match s {
            "I0" => Kodaira::I0,
            "II" => Kodaira::II,
            "III" => Kodaira::III,
            "IV" => Kodaira::IV,
            "I0*" => Kodaira::I0Star,
            "IV*" => Kodaira::IVStar,
            "III*" => Kodaira::IIIStar,
            "II*" => Kodaira::IIStar,
            _ => {
                let rest = s.strip_prefix('I').ok_or_else(bad)?;
                if let Some(m) = rest.strip_suffix('*') {
                    Kodaira::InStar(m.parse().map_err(|_| bad())?)
                } else {
                    Kodaira::In(rest.parse().map_err(|_| bad())?)
                }
            }
        })
    }
}

/// Reduction type at a place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Good,
    #[serde(rename = "split")]
    SplitMultiplicative,
    #[serde(rename = "nonsplit")]
    NonsplitMultiplicative,
    Additive,
}

impl ReductionKind {
    pub fn is_multiplicative(&self) -> bool {
        matches!(self, ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ReductionKind::Good => "good",
            ReductionKind::SplitMultiplicative => "split",
            ReductionKind::NonsplitMultiplicative => "nonsplit",
            ReductionKind::Additive => "additive",
        }
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of Tate's algorithm at one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TateOutput {
    pub prime: u64,
    pub kodaira: Kodaira,
    pub conductor_exponent: u32,
    pub tamagawa: u32,
    /// Tamagawa number after base change to the unramified quadratic
    /// extension of `Q_ℓ` (same Kodaira type, residue field `F_{ℓ²}`).
    pub tamagawa_quadratic: u32,
    pub kind: ReductionKind,
    pub ord_delta_min: u32,
    /// A model minimal at this prime.
    pub minimal_model: [BigInt; 5],
}

struct Ctx {
    p: u64,
    pb: BigInt,
}

impl Ctx {
    fn v(&self, x: &BigInt) -> u32 {
        vp_int(x, self.p).unwrap_or(u32::MAX)
    }
    fn divides(&self, x: &BigInt) -> bool {
        (x % &self.pb).is_zero()
    }
    fn red(&self, x: &BigInt) -> BigInt {
        x.mod_floor(&self.pb)
    }
    fn inv(&self, x: &BigInt) -> BigInt {
        inv_mod(x, &self.pb).expect("invertible mod p")
    }
    fn pk(&self, k: u32) -> BigInt {
        pow_u(self.p, k)
    }
    /// Whether `aX² + bX + c` has a root in `F_p`.
    fn quad_has_root(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        if self.p <= 3 {
            return (0..self.p).any(|x| {
                let x = BigInt::from(x);
                self.divides(&(a * &x * &x + b * &x + c))
            });
        }
        if self.divides(a) {
            return !self.divides(b) || self.divides(c);
        }
        is_square_mod(&(b * b - 4 * a * c), self.p)
    }
    /// Number of distinct roots in `F_p` of `X³ + bX² + cX + d`.
    fn cubic_roots(&self, b: &BigInt, c: &BigInt, d: &BigInt) -> u32 {
        if self.p < 64 {
            return (0..self.p)
                .filter(|&x| {
                    let x = BigInt::from(x);
                    self.divides(&(&x * &x * &x + b * &x * &x + c * &x + d))
                })
                .count() as u32;
        }
        let f = [self.red(d), self.red(c), self.red(b), BigInt::one()];
        let xp = poly_pow_x_mod(&BigInt::from(self.p), &f, &self.pb);
        // gcd(X^p − X, f) has degree equal to the number of distinct roots.
        let mut h = xp;
        h[1] = (&h[1] - BigInt::one()).mod_floor(&self.pb);
        poly_gcd_degree(f.to_vec(), h, &self.pb) as u32
    }
}

/// `X^e mod f` for a monic cubic `f` over `F_p`.
fn poly_pow_x_mod(e: &BigInt, f: &[BigInt; 4], p: &BigInt) -> Vec<BigInt> {
    let mulmod = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut prod = vec![BigInt::zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] += &a[i] * &b[j];
            }
        }
        for k in (3..5).rev() {
            let c = prod[k].mod_floor(p);
            if c.is_zero() {
                continue;
            }
            for i in 0..3 {
                prod[k - 3 + i] -= &c * &f[i];
            }
            prod[k] = BigInt::zero();
        }
        prod.truncate(3);
        prod.iter().map(|x| x.mod_floor(p)).collect()
    };
    let mut result = vec![BigInt::one(), BigInt::zero(), BigInt::zero()];
    let mut base = vec![BigInt::zero(), BigInt::one(), BigInt::zero()];
    let mut e = e.clone();
    let two = BigInt::from(2);
    while !e.is_zero() {
        if e.is_odd() {
            result = mulmod(&result, &base);
        }
        base = mulmod(&base, &base);
        e /= &two;
    }
    result
}

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn poly_gcd_degree(a: Vec<BigInt>, b: Vec<BigInt>, p: &BigInt) -> usize {
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        let lead_inv = inv_mod(b.last().unwrap(), p).expect("field");
        while a.len() >= b.len() && !a.is_empty() {
            let coef = (a.last().unwrap() * &lead_inv).mod_floor(p);
            let shift = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                a[shift + i] = (&a[shift + i] - &coef * bc).mod_floor(p);
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Tate's algorithm for an integral model at the prime `ℓ`.
///
/// Splitting of multiplicative reduction is read off the tangent cone at the
/// node (`T² + a1T − a2` split over `F_ℓ`), which for `ℓ ≥ 3` is equivalent
/// to `−c6` being a square modulo `ℓ`.
pub fn tate_algorithm(e: &CurveModel, prime: u64) -> Result<TateOutput> {
    ensure_prime(prime)?;
    if e.discriminant().is_zero() {
        return Err(Error::SingularModel { label: Some(e.label.clone()) });
    }
    let cx = Ctx { p: prime, pb: BigInt::from(prime) };
    let p = prime;
    let pi = &cx.pb;
    let mut a = e.a.clone();
    loop {
        let (_, _, _, _, disc) = b_invariants(&a);
        let vd = cx.v(&disc);
        let out = |kodaira, f: u32, c: u32, cq: u32, kind, a: &[BigInt; 5]| TateOutput {
            prime,
            kodaira,
            conductor_exponent: f,
            tamagawa: c,
            tamagawa_quadratic: cq,
            kind,
            ord_delta_min: vd,
            minimal_model: a.clone(),
        };
        if vd == 0 {
            return Ok(out(Kodaira::I0, 0, 1, 1, ReductionKind::Good, &a));
        }
        // Move the singular point of the reduction to (0, 0).
        let (b2, b4, b6, _, _) = b_invariants(&a);
        let [a1, a2, a3, a4, a6] = a.clone();
        let (r, t) = if p == 2 {
            if cx.divides(&b2) {
                let r = cx.red(&a4);
                let t = cx.red(&(((&r + &a2) * &r + &a4) * &r + &a6));
                (r, t)
            } else {
                let r = cx.red(&a3);
                let t = cx.red(&(&a4 + &r * &r));
                (r, t)
            }
        } else if p == 3 {
            let r = if cx.divides(&b2) { cx.red(&-&b6) } else { cx.red(&(-cx.inv(&b2) * &b4)) };
            let t = cx.red(&(&a1 * &r + &a3));
            (r, t)
        } else {
            let c4 = &b2 * &b2 - 24 * &b4;
            let c6 = -&b2 * &b2 * &b2 + 36 * &b2 * &b4 - 216 * &b6;
            let r = if cx.divides(&c4) {
                cx.red(&(-cx.inv(&BigInt::from(12)) * &b2))
            } else {
                cx.red(&(-cx.inv(&(BigInt::from(12) * &c4)) * (&c6 + &b2 * &c4)))
            };
            let t = cx.red(&(-cx.inv(&BigInt::from(2)) * (&a1 * &r + &a3)));
            (r, t)
        };
        a = rst_transform(&a, &r, &BigInt::zero(), &t);
        let (b2, _, b6, b8, _) = b_invariants(&a);
        let [a1, a2, a3, _, a6] = a.clone();

        if !cx.divides(&b2) {
            let split = cx.quad_has_root(&BigInt::one(), &a1, &-&a2);
            let (kind, c) = if split {
                (ReductionKind::SplitMultiplicative, vd)
            } else {
                (ReductionKind::NonsplitMultiplicative, if vd % 2 == 0 { 2 } else { 1 })
            };
            return Ok(out(Kodaira::In(vd), 1, c, vd, kind, &a));
        }
        if cx.v(&a6) < 2 {
            return Ok(out(Kodaira::II, vd, 1, 1, ReductionKind::Additive, &a));
        }
        if cx.v(&b8) < 3 {
            return Ok(out(Kodaira::III, vd - 1, 2, 2, ReductionKind::Additive, &a));
        }
        if cx.v(&b6) < 3 {
            let a3t = &a3 / pi;
            let a6t = &a6 / cx.pk(2);
            let c = if cx.quad_has_root(&BigInt::one(), &a3t, &-a6t) { 3 } else { 1 };
            return Ok(out(Kodaira::IV, vd - 2, c, 3, ReductionKind::Additive, &a));
        }

        // Arrange p | a1, a2; p² | a3, a4; p³ | a6.
        let (s, t) = if p == 2 {
            (cx.red(&a2), pi * cx.red(&(&a6 / cx.pk(2))))
        } else if p == 3 {
            (a1.clone(), a3.clone())
        } else {
            let h = cx.inv(&BigInt::from(2));
            (-&a1 * &h, -&a3 * &h)
        };
        a = rst_transform(&a, &BigInt::zero(), &s, &t);
        let [_, a2, _, a4, a6] = a.clone();
        let b = &a2 / pi;
        let c = &a4 / cx.pk(2);
        let d = &a6 / cx.pk(3);
        let w = 27 * &d * &d - &b * &b * &c * &c + 4 * &b * &b * &b * &d - 18 * &b * &c * &d + 4 * &c * &c * &c;
        let x = 3 * &c - &b * &b;
        let sw = if cx.divides(&w) {
            if cx.divides(&x) {
                3
            } else {
                2
            }
        } else {
            1
        };

        if sw == 1 {
            let roots = cx.cubic_roots(&b, &c, &d);
            let cq = if roots == 0 { 1 } else { 4 };
            return Ok(out(Kodaira::I0Star, vd - 4, 1 + roots, cq, ReductionKind::Additive, &a));
        }

        if sw == 2 {
            // Move the double root to 0.
            let r0 = if p == 2 {
                cx.red(&c)
            } else if p == 3 {
                cx.red(&(&c * cx.inv(&b)))
            } else {
                cx.red(&((&b * &c - 9 * &d) * cx.inv(&(2 * &x))))
            };
            a = rst_transform(&a, &(pi * r0), &BigInt::zero(), &BigInt::zero());
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = cx.pk(2);
            let mut my = cx.pk(2);
            let tam;
            loop {
                let [_, a2, a3, _, a6] = a.clone();
                let a2t = &a2 / pi;
                let a3t = &a3 / &my;
                let a6t = &a6 / (&mx * &my);
                if cx.divides(&(&a3t * &a3t + 4 * &a6t)) {
                    let t = if p == 2 {
                        &my * cx.red(&a6t)
                    } else {
                        &my * cx.red(&(-&a3t * cx.inv(&BigInt::from(2))))
                    };
                    a = rst_transform(&a, &BigInt::zero(), &BigInt::zero(), &t);
                    my *= pi;
                    iy += 1;
                    let [_, a2, _, a4, a6] = a.clone();
                    let a2t = &a2 / pi;
                    let a4t = &a4 / (pi * &mx);
                    let a6t = &a6 / (&mx * &my);
                    if cx.divides(&(&a4t * &a4t - 4 * &a6t * &a2t)) {
                        let r = if p == 2 {
                            &mx * cx.red(&(&a6t * cx.inv(&a2t)))
                        } else {
                            &mx * cx.red(&(-&a4t * cx.inv(&(2 * &a2t))))
                        };
                        a = rst_transform(&a, &r, &BigInt::zero(), &BigInt::zero());
                        mx *= pi;
                        ix += 1;
                    } else {
                        tam = if cx.quad_has_root(&a2t, &a4t, &a6t) { 4 } else { 2 };
                        break;
                    }
                } else {
                    tam = if cx.quad_has_root(&BigInt::one(), &a3t, &-&a6t) { 4 } else { 2 };
                    let _ = a2t;
                    break;
                }
            }
            let m = ix + iy - 5;
            return Ok(out(Kodaira::InStar(m), vd - ix - iy + 1, tam, 4, ReductionKind::Additive, &a));
        }

        // Triple root: move it to 0.
        let r0 = if p == 2 {
            cx.red(&b)
        } else if p == 3 {
            cx.red(&-&d)
        } else {
            cx.red(&(-&b * cx.inv(&BigInt::from(3))))
        };
        a = rst_transform(&a, &(pi * r0), &BigInt::zero(), &BigInt::zero());
        let [_, _, a3, _, a6] = a.clone();
        let a3t = &a3 / cx.pk(2);
        let a6t = &a6 / cx.pk(4);
        if !cx.divides(&(&a3t * &a3t + 4 * &a6t)) {
            let c = if cx.quad_has_root(&BigInt::one(), &a3t, &-&a6t) { 3 } else { 1 };
            return Ok(out(Kodaira::IVStar, vd - 6, c, 3, ReductionKind::Additive, &a));
        }
        let t = if p == 2 {
            -cx.pk(2) * cx.red(&a6t)
        } else {
            cx.pk(2) * cx.red(&(-&a3t * cx.inv(&BigInt::from(2))))
        };
        a = rst_transform(&a, &BigInt::zero(), &BigInt::zero(), &t);
        let [a1, a2, a3, a4, a6] = a.clone();
        if cx.v(&a4) < 4 {
            return Ok(out(Kodaira::IIIStar, vd - 7, 2, 2, ReductionKind::Additive, &a));
        }
        if cx.v(&a6) < 6 {
            return Ok(out(Kodaira::IIStar, vd - 8, 1, 1, ReductionKind::Additive, &a));
        }
        // Non-minimal: scale by p and start over.
        a = [&a1 / pi, &a2 / cx.pk(2), &a3 / cx.pk(3), &a4 / cx.pk(4), &a6 / cx.pk(6)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(a: [i64; 5], p: u64) -> TateOutput {
        tate_algorithm(&CurveModel::from_i64("t", a).unwrap(), p).unwrap()
    }

    #[test]
    fn kodaira_round_trip() {
        for s in ["I0", "I7", "II", "III", "IV", "I0*", "I3*", "IV*", "III*", "II*"] {
            assert_eq!(s.parse::<Kodaira>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn y2_x3_plus_1_at_2_and_3() {
        // Conductor 36 = 2²·3²: additive at both primes.
        let t2 = run([0, 0, 0, 0, 1], 2);
        let t3 = run([0, 0, 0, 0, 1], 3);
        assert_eq!(t2.conductor_exponent, 2);
        assert_eq!(t3.conductor_exponent, 2);
        assert_eq!(t2.kind, ReductionKind::Additive);
    }

    #[test]
    fn scaled_model_is_minimalized() {
        // 11a1 scaled by u = 5: non-minimal at 5, good after minimalization.
        let a = [0i64, -1, 1, -10, -20];
        let u = 5i64;
        let scaled = [a[0] * u, a[1] * u.pow(2), a[2] * u.pow(3), a[3] * u.pow(4), a[4] * u.pow(6)];
        let out = run(scaled, 5);
        assert_eq!(out.kind, ReductionKind::Good);
        assert_eq!(out.ord_delta_min, 0);
        let out = run(a, 11);
        assert_eq!((out.kodaira, out.tamagawa, out.kind), (Kodaira::In(5), 5, ReductionKind::SplitMultiplicative));
    }
}
