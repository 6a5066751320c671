//! Small integer helpers shared by the p-adic, curve and congruence code.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `p^k` as a big integer.
pub fn pow_u(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Non-negative residue of `a` modulo `m`.
pub fn modp(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Exponent of `p` in the non-zero integer `a`, together with the cofactor.
pub fn split_p(a: &BigInt, p: u64) -> (u32, BigInt) {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut k = 0;
    let mut x = a.clone();
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return (k, x);
        }
        x = q;
        k += 1;
    }
}

/// `v_p(a)` for integers, `None` for zero.
pub fn vp_int(a: &BigInt, p: u64) -> Option<u32> {
    if a.is_zero() {
        None
    } else {
        Some(split_p(a, p).0)
    }
}

/// `v_p(k!)` by Legendre's formula.
pub fn vp_factorial(k: u64, p: u64) -> u32 {
    let mut s = 0;
    let mut q = k / p;
    while q > 0 {
        s += q as u32;
        q /= p;
    }
    s
}

pub fn is_prime_u64(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// Require `p` to be prime.
pub fn ensure_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Primes up to `bound` inclusive.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime_u64(n)).collect()
}

/// Prime factors of a non-zero integer (absolute value), ascending.
pub fn prime_factors(n: &BigInt) -> Result<Vec<u64>> {
    if n.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let m = n.abs().to_biguint().expect("absolute value");
    if m.is_one() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    if let Some(small) = m.to_u128() {
        for (q, _) in num_prime::nt_funcs::factorize128(small) {
            out.push(u64::try_from(q).map_err(|_| prime_too_large(&BigUint::from(q)))?);
        }
    } else {
        let factors: BTreeMap<BigUint, usize> = num_prime::nt_funcs::factorize(m);
        for (q, _) in factors {
            out.push(q.to_u64().ok_or_else(|| prime_too_large(&q))?);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn prime_too_large(q: &BigUint) -> Error {
    Error::InvalidInput(format!("prime factor {q} exceeds 64 bits"))
}

/// Modular exponentiation on `u64` via 128-bit intermediates.
pub fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Legendre symbol `(a/p)` for an odd prime `p`; returns -1, 0 or 1.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let e = BigInt::from((p - 1) / 2);
    if r.modpow(&e, &pb).is_one() {
        1
    } else {
        -1
    }
}

/// Whether `a` is a square modulo the prime `p` (zero counts as a square).
pub fn is_square_mod(a: &BigInt, p: u64) -> bool {
    if p == 2 {
        return true;
    }
    legendre(a, p) >= 0
}

/// Integer square root check for possibly negative integers.
pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn to_i64(a: &BigInt) -> Result<i64> {
    a.to_i64()
        .ok_or_else(|| Error::InvalidInput(format!("{a} does not fit in 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_and_large() {
        assert_eq!(prime_factors(&BigInt::from(-462)).unwrap(), vec![2, 3, 7, 11]);
        let big = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64) * BigInt::from(1u128 << 70);
        assert_eq!(prime_factors(&big).unwrap(), vec![2, 998_244_353, 1_000_000_007]);
        assert!(prime_factors(&BigInt::from(1)).unwrap().is_empty());
    }

    #[test]
    fn legendre_and_inverse() {
        assert_eq!(legendre(&BigInt::from(4), 7), 1);
        assert_eq!(legendre(&BigInt::from(3), 7), -1);
        assert_eq!(legendre(&BigInt::from(14), 7), 0);
        assert_eq!(inv_mod(&BigInt::from(3), &BigInt::from(25)), Some(BigInt::from(17)));
        assert_eq!(inv_mod(&BigInt::from(5), &BigInt::from(25)), None);
    }

    #[test]
    fn factorial_valuation() {
        assert_eq!(vp_factorial(25, 5), 6);
        assert_eq!(vp_factorial(4, 5), 0);
    }
}
