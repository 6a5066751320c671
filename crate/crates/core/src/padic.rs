//! Fixed-precision arithmetic in `Q_p` for odd primes.
//!
//! A [`PadicNumber`] is either zero (exactly, or "zero to absolute precision
//! k") or `p^v · u` with `u` a unit known modulo `p^prec`. Arithmetic tracks
//! precision explicitly: every result carries the minimum precision its
//! operands justify.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, pow_u, split_p, vp_factorial};
use crate::error::{Error, Result};

/// Default number of significant p-adic digits.
pub const DEFAULT_PRECISION: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// Zero; `abs_precision = Some(k)` means "≡ 0 mod p^k", `None` an exact zero.
    Zero { abs_precision: Option<i64> },
    Nonzero { valuation: i64, unit: BigInt, precision: u32 },
}

/// An element of `Q_p` at fixed working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    repr: Repr,
}

impl PadicNumber {
    /// Builds `p^valuation · unit` with `precision` significant digits.
    pub fn new(p: u64, valuation: i64, unit: &BigInt, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InsufficientPrecision("zero significant digits".into()));
        }
        let m = pow_u(p, precision);
        let u = unit.mod_floor(&m);
        if (&u % p).is_zero() {
            return Err(Error::DivisibleByP { value: unit.to_string(), p });
        }
        Ok(Self { p, repr: Repr::Nonzero { valuation, unit: u, precision } })
    }

    /// The exact zero.
    pub fn zero(p: u64) -> Self {
        Self { p, repr: Repr::Zero { abs_precision: None } }
    }

    /// A value known only to be `≡ 0 (mod p^abs_precision)`.
    pub fn zero_to(p: u64, abs_precision: i64) -> Self {
        Self { p, repr: Repr::Zero { abs_precision: Some(abs_precision) } }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::from_int(&BigInt::one(), p, precision)
    }

    /// An integer with `precision` significant digits (zero maps to the exact zero).
    pub fn from_int(a: &BigInt, p: u64, precision: u32) -> Self {
        if a.is_zero() {
            return Self::zero(p);
        }
        let (v, u) = split_p(a, p);
        Self::new(p, v as i64, &u, precision.max(1)).expect("unit part is coprime to p")
    }

    pub fn from_i64(a: i64, p: u64, precision: u32) -> Self {
        Self::from_int(&BigInt::from(a), p, precision)
    }

    pub fn from_rational(x: &BigRational, p: u64, precision: u32) -> Self {
        if x.is_zero() {
            return Self::zero(p);
        }
        let (vn, un) = split_p(x.numer(), p);
        let (vd, ud) = split_p(x.denom(), p);
        let m = pow_u(p, precision.max(1));
        let inv = inv_mod(&ud, &m).expect("denominator unit part is invertible");
        Self::new(p, vn as i64 - vd as i64, &(un * inv), precision.max(1))
            .expect("unit part is coprime to p")
    }

    /// Interprets the integer `a` as known modulo `p^abs_precision`.
    pub fn from_int_abs(a: &BigInt, p: u64, abs_precision: i64) -> Self {
        if abs_precision <= 0 {
            return Self::zero_to(p, abs_precision);
        }
        let m = pow_u(p, abs_precision as u32);
        let r = a.mod_floor(&m);
        if r.is_zero() {
            return Self::zero_to(p, abs_precision);
        }
        let (v, u) = split_p(&r, p);
        Self::new(p, v as i64, &u, (abs_precision - v as i64) as u32).expect("coprime")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `None` encodes the `+∞` valuation of zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Nonzero { valuation, .. } => Some(*valuation),
        }
    }

    /// Unit part in `[1, p^precision)`; zero for zero.
    pub fn unit(&self) -> BigInt {
        match &self.repr {
            Repr::Zero { .. } => BigInt::zero(),
            Repr::Nonzero { unit, .. } => unit.clone(),
        }
    }

    /// Number of significant digits (zero for a zero value).
    pub fn precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Nonzero { precision, .. } => *precision,
        }
    }

    /// The `k` with the value known modulo `p^k`; `None` for an exact zero.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs_precision } => *abs_precision,
            Repr::Nonzero { valuation, precision, .. } => Some(valuation + *precision as i64),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs_precision: None })
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// `|x|_p^{-1}` as a power of p (`p^{v(x)}`); zero gives the infinite exponent.
    pub fn abs_inverse(&self) -> PPower {
        match self.valuation() {
            None => PPower::infinite(),
            Some(v) => PPower::new(v),
        }
    }

    /// `|x|_p = p^{-v(x)}`; zero gives the infinite exponent (the value 0).
    pub fn norm(&self) -> PPower {
        match self.valuation() {
            None => PPower::infinite(),
            Some(v) => PPower::new(-v),
        }
    }

    /// An integer `a` with `x ≡ a (mod p^k)`; requires `v(x) ≥ 0` and enough precision.
    pub fn residue(&self, k: u32) -> Result<BigInt> {
        let m = pow_u(self.p, k);
        match &self.repr {
            Repr::Zero { abs_precision } => {
                if abs_precision.map_or(true, |a| a >= k as i64) {
                    Ok(BigInt::zero())
                } else {
                    Err(Error::InsufficientPrecision(format!(
                        "zero known only modulo p^{}",
                        abs_precision.unwrap_or_default()
                    )))
                }
            }
            Repr::Nonzero { valuation, unit, precision } => {
                if *valuation < 0 {
                    return Err(Error::InvalidInput("negative valuation has no residue".into()));
                }
                if valuation + (*precision as i64) < k as i64 && *valuation < k as i64 {
                    return Err(Error::InsufficientPrecision(format!(
                        "value known modulo p^{}, residue mod p^{k} requested",
                        valuation + *precision as i64
                    )));
                }
                Ok((unit * pow_u(self.p, *valuation as u32)).mod_floor(&m))
            }
        }
    }

    /// Exact rational with the stored digits.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Nonzero { valuation, unit, .. } => {
                let pk = pow_u(self.p, valuation.unsigned_abs() as u32);
                if *valuation >= 0 {
                    BigRational::from_integer(unit * pk)
                } else {
                    BigRational::new(unit.clone(), pk)
                }
            }
        }
    }

    /// Equality to the common precision of both operands.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Reduce the number of significant digits to at most `precision`.
    pub fn with_precision(&self, precision: u32) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { valuation, unit, precision: old } => {
                let n = precision.min(*old).max(1);
                Self::new(self.p, *valuation, unit, n).expect("coprime")
            }
        }
    }

    /// Reduce absolute precision to at most `abs`.
    pub fn with_absolute_precision(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_precision } => {
                Self::zero_to(self.p, abs_precision.map_or(abs, |a| a.min(abs)))
            }
            Repr::Nonzero { valuation, unit, precision } => {
                if abs <= *valuation {
                    Self::zero_to(self.p, abs)
                } else {
                    let n = ((abs - valuation) as u32).min(*precision);
                    Self::new(self.p, *valuation, unit, n).expect("coprime")
                }
            }
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        match &self.repr {
            Repr::Zero { abs_precision } => {
                if e <= 0 {
                    return Err(Error::UndefinedValuation);
                }
                Ok(Self { p: self.p, repr: Repr::Zero { abs_precision: abs_precision.map(|a| a * e) } })
            }
            Repr::Nonzero { valuation, unit, precision } => {
                let m = pow_u(self.p, *precision);
                let base = if e < 0 { inv_mod(unit, &m).expect("unit") } else { unit.clone() };
                let u = base.modpow(&BigInt::from(e.unsigned_abs()), &m);
                Self::new(self.p, valuation * e, &u, *precision)
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.p, other.p, "mixed primes");
        let (vb, ub, pb) = match &other.repr {
            Repr::Zero { .. } => return Err(Error::UndefinedValuation),
            Repr::Nonzero { valuation, unit, precision } => (*valuation, unit, *precision),
        };
        match &self.repr {
            Repr::Zero { abs_precision } => Ok(Self {
                p: self.p,
                repr: Repr::Zero { abs_precision: abs_precision.map(|a| a - vb) },
            }),
            Repr::Nonzero { valuation, unit, precision } => {
                let n = (*precision).min(pb);
                let m = pow_u(self.p, n);
                let inv = inv_mod(ub, &m).expect("unit");
                Self::new(self.p, valuation - vb, &(unit * inv), n)
            }
        }
    }

    fn add_impl(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_precision: a }, Repr::Zero { abs_precision: b }) => {
                let abs = match (a, b) {
                    (None, x) | (x, None) => *x,
                    (Some(x), Some(y)) => Some(*x.min(y)),
                };
                Self { p, repr: Repr::Zero { abs_precision: abs } }
            }
            (Repr::Zero { abs_precision }, _) => match abs_precision {
                None => other.clone(),
                Some(a) => other.with_absolute_precision(*a),
            },
            (_, Repr::Zero { abs_precision }) => match abs_precision {
                None => self.clone(),
                Some(a) => self.with_absolute_precision(*a),
            },
            (
                Repr::Nonzero { valuation: va, unit: ua, precision: pa },
                Repr::Nonzero { valuation: vb, unit: ub, precision: pb },
            ) => {
                let abs = (va + *pa as i64).min(vb + *pb as i64);
                let v = *va.min(vb);
                let x = ua * pow_u(p, (va - v) as u32) + ub * pow_u(p, (vb - v) as u32);
                let rel = abs - v;
                if rel <= 0 {
                    return Self::zero_to(p, abs);
                }
                let r = Self::from_int_abs(&x, p, rel);
                r.shift(v)
            }
        }
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_precision } => {
                Self { p: self.p, repr: Repr::Zero { abs_precision: abs_precision.map(|a| a + k) } }
            }
            Repr::Nonzero { valuation, unit, precision } => Self {
                p: self.p,
                repr: Repr::Nonzero { valuation: valuation + k, unit: unit.clone(), precision: *precision },
            },
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs_precision: None }, _) | (_, Repr::Zero { abs_precision: None }) => Self::zero(p),
            (Repr::Zero { abs_precision: Some(a) }, Repr::Zero { abs_precision: Some(b) }) => {
                Self::zero_to(p, a + b)
            }
            (Repr::Zero { abs_precision: Some(a) }, Repr::Nonzero { valuation, .. })
            | (Repr::Nonzero { valuation, .. }, Repr::Zero { abs_precision: Some(a) }) => {
                Self::zero_to(p, a + valuation)
            }
            (
                Repr::Nonzero { valuation: va, unit: ua, precision: pa },
                Repr::Nonzero { valuation: vb, unit: ub, precision: pb },
            ) => {
                let n = (*pa).min(*pb);
                Self::new(p, va + vb, &(ua * ub), n).expect("product of units")
            }
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs_precision: None } => write!(f, "0"),
            Repr::Zero { abs_precision: Some(a) } => write!(f, "O({}^{})", self.p, a),
            Repr::Nonzero { valuation, unit, precision } => {
                write!(f, "{}^{}·{} + O({}^{})", self.p, valuation, unit, self.p, valuation + *precision as i64)
            }
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b PadicNumber> for &'a PadicNumber {
            type Output = PadicNumber;
            fn $m(self, rhs: &'b PadicNumber) -> PadicNumber {
                let f: fn(&PadicNumber, &PadicNumber) -> PadicNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $m(self, rhs: PadicNumber) -> PadicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b));
forward_binop!(Sub, sub, |a, b| a.add_impl(&-b));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a.checked_div(b).expect("division by p-adic zero"));

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { valuation, unit, precision } => {
                PadicNumber::new(self.p, *valuation, &-unit, *precision).expect("unit")
            }
        }
    }
}

impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        -&self
    }
}

/// A quantity known only as a power of p: `p^exponent`, where an infinite
/// exponent encodes the degenerate "local factor is zero" convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PPower {
    /// `None` is `+∞`.
    pub exponent: Option<i64>,
}

impl PPower {
    pub const ONE: PPower = PPower { exponent: Some(0) };

    pub fn new(exponent: i64) -> Self {
        Self { exponent: Some(exponent) }
    }

    pub fn infinite() -> Self {
        Self { exponent: None }
    }

    pub fn is_infinite(&self) -> bool {
        self.exponent.is_none()
    }

    pub fn is_one(&self) -> bool {
        self.exponent == Some(0)
    }

    /// Whether `p` divides the quantity (`+∞` counts as divisible).
    pub fn divisible_by_p(&self) -> bool {
        self.exponent.map_or(true, |e| e >= 1)
    }

    /// Product of p-powers: exponents add, `+∞` absorbs.
    pub fn times(&self, other: &PPower) -> PPower {
        match (self.exponent, other.exponent) {
            (Some(a), Some(b)) => PPower::new(a + b),
            _ => PPower::infinite(),
        }
    }

    /// Quotient; `+∞` absorbs (the numerator's convention wins).
    pub fn over(&self, other: &PPower) -> PPower {
        match (self.exponent, other.exponent) {
            (Some(a), Some(b)) => PPower::new(a - b),
            _ => PPower::infinite(),
        }
    }

    pub fn render(&self, p: u64) -> String {
        match self.exponent {
            None => format!("{p}^inf"),
            Some(0) => "1".to_string(),
            Some(1) => p.to_string(),
            Some(e) => format!("{p}^{e}"),
        }
    }
}

impl PartialOrd for PPower {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PPower {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.exponent, other.exponent) {
            (Some(a), Some(b)) => a.cmp(&b),
            (None, None) => Ordering::Equal,
            (None, _) => Ordering::Greater,
            (_, None) => Ordering::Less,
        }
    }
}

impl std::iter::Product for PPower {
    fn product<I: Iterator<Item = PPower>>(iter: I) -> PPower {
        iter.fold(PPower::ONE, |a, b| a.times(&b))
    }
}

/// `v_p(x)` for a non-zero rational.
pub fn valuation(x: &BigRational, p: u64) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let (vn, _) = split_p(x.numer(), p);
    let (vd, _) = split_p(x.denom(), p);
    Ok(vn as i64 - vd as i64)
}

/// Unit root of `X² − a_p X + p` by Newton iteration from `a_p mod p`.
pub fn hensel_unit_root(a_p: &BigInt, p: u64, precision: u32) -> Result<PadicNumber> {
    if precision == 0 {
        return Err(Error::InsufficientPrecision("precision must be at least 1".into()));
    }
    let pb = BigInt::from(p);
    if (a_p % &pb).is_zero() {
        return Err(Error::NonOrdinary { a_p: crate::arith::to_i64(a_p).unwrap_or(i64::MAX), p });
    }
    let m = pow_u(p, precision);
    let f = |x: &BigInt| (x * x - a_p * x + &pb).mod_floor(&m);
    let mut x = a_p.mod_floor(&pb);
    // Quadratic convergence: the number of correct digits doubles each step.
    while !f(&x).is_zero() {
        let d = (BigInt::from(2) * &x - a_p).mod_floor(&m);
        let dinv = inv_mod(&d, &m).expect("derivative is a unit at the unit root");
        x = (&x - f(&x) * dinv).mod_floor(&m);
    }
    PadicNumber::new(p, 0, &x, precision)
}

/// Teichmüller representative `ω(u)`: the `(p−1)`-st root of unity congruent to `u`.
pub fn teichmuller(u: &BigInt, p: u64, precision: u32) -> Result<PadicNumber> {
    if (u % BigInt::from(p)).is_zero() {
        return Err(Error::DivisibleByP { value: u.to_string(), p });
    }
    let m = pow_u(p, precision);
    let pe = BigInt::from(p);
    let mut x = u.mod_floor(&m);
    loop {
        let y = x.modpow(&pe, &m);
        if y == x {
            break;
        }
        x = y;
    }
    PadicNumber::new(p, 0, &x, precision)
}

/// Principal unit `⟨u⟩ = u / ω(u)`, which is `≡ 1 (mod p)`.
pub fn principal_unit(u: &BigInt, p: u64, precision: u32) -> Result<PadicNumber> {
    let w = teichmuller(u, p, precision)?;
    Ok(&PadicNumber::from_int(u, p, precision) / &w)
}

/// Iwasawa-branch logarithm: `log_p(p) = 0`, and `log_p` kills roots of unity,
/// so only the principal-unit part contributes.
pub fn padic_log(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.p();
    if x.is_zero() {
        return Err(Error::InsufficientPrecision("logarithm of a value indistinguishable from zero".into()));
    }
    let n = x.precision();
    let m = pow_u(p, n);
    // u^{p-1} is a principal unit; log(u) = log(u^{p-1}) / (p-1).
    let w = x.unit().modpow(&BigInt::from(p - 1), &m);
    let z = (w - BigInt::one()).mod_floor(&m);
    let series = log_one_plus(&z, p, n);
    let inv = inv_mod(&BigInt::from(p - 1), &m).expect("p-1 is a unit");
    Ok(PadicNumber::from_int_abs(&(series * inv), p, n as i64))
}

/// `log(1+z) mod p^n` for an integer `z ≡ 0 (mod p)`.
fn log_one_plus(z: &BigInt, p: u64, n: u32) -> BigInt {
    if z.is_zero() {
        return BigInt::zero();
    }
    let mut last = 1u64;
    while (last as i64) - ilog(last, p) as i64 <= n as i64 {
        last += 1;
    }
    let slack = ilog(last, p) + 1;
    let big_m = pow_u(p, n + slack);
    let target = pow_u(p, n);
    let mut acc = BigInt::zero();
    let mut zk = BigInt::one();
    for k in 1..=last {
        zk = (&zk * z).mod_floor(&big_m);
        let (a, kp) = split_p(&BigInt::from(k), p);
        let num = &zk / pow_u(p, a);
        let inv = inv_mod(&kp, &big_m).expect("unit");
        let term = num * inv;
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.mod_floor(&target)
}

fn ilog(k: u64, p: u64) -> u32 {
    let mut e = 0;
    let mut x = k;
    while x >= p {
        x /= p;
        e += 1;
    }
    e
}

/// `exp(x)` for `v(x) ≥ 1`, at the absolute precision of `x`.
pub fn padic_exp(x: &PadicNumber) -> Result<PadicNumber> {
    let p = x.p();
    let abs = match x.absolute_precision() {
        None => return Ok(PadicNumber::one(p, DEFAULT_PRECISION)),
        Some(a) => a,
    };
    if abs <= 0 {
        return Err(Error::InsufficientPrecision("argument has no significant digits".into()));
    }
    let v = x.valuation().unwrap_or(abs);
    if v < 1 {
        return Err(Error::InvalidInput("exp converges only on pZ_p for odd p".into()));
    }
    let n = abs as u32;
    let xi = x.residue(n)?;
    // Terms with k·v(x) − v_p(k!) ≥ n vanish modulo p^n. That quantity is not
    // monotone in k (it drops at powers of p), so stop on the monotone lower
    // bound k·v(x) − (k−1)/(p−1) instead.
    let mut last = 1u64;
    while (last as i64) * v - (((last - 1) / (p - 1)) as i64) < (n as i64) {
        last += 1;
    }
    let big_m = pow_u(p, n + vp_factorial(last, p) + 1);
    let mut acc = BigInt::one();
    let mut xk = BigInt::one();
    let mut fact_unit = BigInt::one();
    let mut fact_v = 0u32;
    for k in 1..=last {
        xk = (&xk * &xi).mod_floor(&big_m);
        let (a, kp) = split_p(&BigInt::from(k), p);
        fact_v += a;
        fact_unit = (&fact_unit * kp).mod_floor(&big_m);
        let num = &xk / pow_u(p, fact_v);
        acc += num * inv_mod(&fact_unit, &big_m).expect("unit");
    }
    Ok(PadicNumber::from_int_abs(&acc, p, n as i64))
}

/// Whether `x` is a positive-valuation element (the domain of `exp`).
pub fn in_exp_domain(x: &PadicNumber) -> bool {
    x.valuation().map_or(true, |v| v >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&q(360, 1), 5).unwrap(), 1);
        assert_eq!(valuation(&q(361, 360), 5).unwrap(), -1);
        assert_eq!(valuation(&q(7, 1), 5).unwrap(), 0);
        assert_eq!(valuation(&q(0, 1), 5), Err(Error::UndefinedValuation));
        // |361/360|_5 = 5
        let x = PadicNumber::from_rational(&q(361, 360), 5, 10);
        assert_eq!(x.norm(), PPower::new(1));
    }

    #[test]
    fn hensel_examples() {
        let a = hensel_unit_root(&BigInt::from(1), 5, 2).unwrap();
        assert_eq!(a.residue(2).unwrap(), BigInt::from(21));
        // f(21) = 425 ≡ 0 mod 25, computed directly.
        assert_eq!((21 * 21 - 21 + 5) % 25, 0);
        let b = hensel_unit_root(&BigInt::from(6), 5, 20).unwrap();
        assert_eq!(b.residue(20).unwrap(), BigInt::from(1));
        assert!(matches!(hensel_unit_root(&BigInt::from(5), 5, 10), Err(Error::NonOrdinary { .. })));
    }

    #[test]
    fn log_examples() {
        let one = PadicNumber::one(5, 10);
        assert!(padic_log(&one).unwrap().is_zero());
        let six = PadicNumber::from_i64(6, 5, 10);
        // 5 − 25/2 + 125/3 mod 125, evaluated by hand: 5 − 25·63 + 125·42 ≡ 55.
        let direct = (5 - 25 * 63 + 125 * 42i64).rem_euclid(125);
        assert_eq!(direct, 55);
        assert_eq!(padic_log(&six).unwrap().residue(3).unwrap(), BigInt::from(55));
        let five = PadicNumber::from_i64(5, 5, 10);
        assert!(padic_log(&five).unwrap().is_zero());
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(&BigInt::from(1), 5, 10).unwrap().residue(10).unwrap(), BigInt::from(1));
        let w = teichmuller(&BigInt::from(2), 5, 2).unwrap();
        assert_eq!(w.residue(2).unwrap(), BigInt::from(7));
        assert_eq!(7i64.pow(4) % 25, 1);
        assert!(teichmuller(&BigInt::from(10), 5, 4).is_err());
        let pu = principal_unit(&BigInt::from(3), 7, 12).unwrap();
        assert_eq!(pu.residue(1).unwrap(), BigInt::from(1));
    }

    #[test]
    fn zero_sentinel_is_distinct_from_underflow() {
        let exact = PadicNumber::zero(5);
        let under = &PadicNumber::from_i64(25, 5, 1) - &PadicNumber::from_i64(25, 5, 1);
        assert!(exact.is_exact_zero());
        assert!(under.is_zero() && !under.is_exact_zero());
        assert_eq!(under.absolute_precision(), Some(3));
    }

    #[test]
    fn precision_is_minimum_of_operands() {
        let a = PadicNumber::from_i64(3, 5, 4);
        let b = PadicNumber::from_i64(7, 5, 9);
        assert_eq!((&a * &b).precision(), 4);
        assert_eq!((&a + &b).absolute_precision(), Some(4));
    }

    #[test]
    fn rational_round_trip_and_division() {
        let x = PadicNumber::from_rational(&q(360, 361), 5, 12);
        let y = PadicNumber::from_rational(&q(361, 360), 5, 12);
        assert!((&x * &y).eq_to_precision(&PadicNumber::one(5, 12)));
        assert_eq!(x.to_rational().numer() % BigInt::from(5), BigInt::zero());
    }

    #[test]
    fn exp_keeps_terms_past_a_power_of_p() {
        // For p = 3, v(x) = 1 the k = 27 term still matters modulo 3^15 although
        // k = 26 does not; reference from the exact rational series.
        let x = PadicNumber::from_int(&BigInt::from(718_590), 3, 14);
        assert_eq!(padic_exp(&x).unwrap().residue(15).unwrap(), BigInt::from(259_168));
    }

    proptest! {
        #[test]
        fn ultrametric(a in -10_000i64..10_000, b in -10_000i64..10_000, p in prop::sample::select(vec![3u64, 5, 7, 11])) {
            prop_assume!(a != 0 && b != 0 && a + b != 0);
            let x = PadicNumber::from_i64(a, p, 20);
            let y = PadicNumber::from_i64(b, p, 20);
            let s = &x + &y;
            let (va, vb, vs) = (x.valuation().unwrap(), y.valuation().unwrap(), s.valuation().unwrap());
            prop_assert!(vs >= va.min(vb));
            if va != vb { prop_assert_eq!(vs, va.min(vb)); }
        }

        #[test]
        fn log_is_a_homomorphism(a in 1i64..5000, b in 1i64..5000) {
            let p = 7;
            prop_assume!(a % 7 != 0 && b % 7 != 0);
            let x = PadicNumber::from_i64(a, p, 15);
            let y = PadicNumber::from_i64(b, p, 15);
            let lhs = padic_log(&(&x * &y)).unwrap();
            let rhs = &padic_log(&x).unwrap() + &padic_log(&y).unwrap();
            prop_assert!(lhs.eq_to_precision(&rhs));
        }
    }
}
