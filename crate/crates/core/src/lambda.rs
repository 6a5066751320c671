//! Truncated arithmetic in `Λ = Z_p[[T]]`.
//!
//! Elements are stored as integer coefficients modulo `p^N` up to T-degree
//! `D`, so every identity holds modulo `(p^N, T^{D+1})`. Elements built from
//! polynomials carry an `exact` flag: their coefficients past `D` are known to
//! vanish, which lets Weierstrass preparation pad them internally and return
//! factors that reproduce the input to the full degree `D`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{inv_mod, pow_u, vp_factorial, vp_int};
use crate::error::{Error, Result};
use crate::padic::{padic_log, PPower, PadicNumber};

/// Default T-adic truncation degree.
pub const DEFAULT_DEGREE: usize = 16;

/// Image of the fixed topological generator of Γ under the cyclotomic
/// character: `κ(γ) = 1 + p`.
pub fn kappa_gamma(p: u64) -> u64 {
    1 + p
}

/// An element `Σ c_i T^i` of `Λ` modulo `(p^N, T^{D+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaElement {
    p: u64,
    coeffs: Vec<BigInt>,
    degree: usize,
    precision: u32,
    exact: bool,
}

impl LambdaElement {
    /// Series known modulo `(p^precision, T^{degree+1})`; extra coefficients are dropped.
    pub fn new(p: u64, coeffs: &[BigInt], degree: usize, precision: u32) -> Self {
        Self::build(p, coeffs, degree, precision, false)
    }

    /// A polynomial: coefficients past `coeffs.len()` are exactly zero.
    pub fn from_poly(p: u64, coeffs: &[BigInt], degree: usize, precision: u32) -> Result<Self> {
        if let Some(last) = coeffs.iter().rposition(|c| !c.is_zero()) {
            if last > degree {
                return Err(Error::TruncationTooSmall { needed: last, available: degree });
            }
        }
        Ok(Self::build(p, coeffs, degree, precision, true))
    }

    pub fn from_poly_i64(p: u64, coeffs: &[i64], degree: usize, precision: u32) -> Result<Self> {
        let c: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_poly(p, &c, degree, precision)
    }

    fn build(p: u64, coeffs: &[BigInt], degree: usize, precision: u32, exact: bool) -> Self {
        let m = pow_u(p, precision);
        let mut c: Vec<BigInt> = coeffs.iter().take(degree + 1).map(|x| x.mod_floor(&m)).collect();
        c.resize(degree + 1, BigInt::zero());
        Self { p, coeffs: c, degree, precision, exact }
    }

    pub fn one(p: u64, degree: usize, precision: u32) -> Self {
        Self::build(p, &[BigInt::one()], degree, precision, true)
    }

    /// `T^k`.
    pub fn t_power(p: u64, k: usize, degree: usize, precision: u32) -> Result<Self> {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        Self::from_poly(p, &c, degree, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Integer residues of the coefficients, `c_0 … c_D`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient `c_i` as a p-adic number with absolute precision `N`.
    pub fn coefficient(&self, i: usize) -> PadicNumber {
        match self.coeffs.get(i) {
            Some(c) => PadicNumber::from_int_abs(c, self.p, self.precision as i64),
            None if self.exact => PadicNumber::zero(self.p),
            None => PadicNumber::zero_to(self.p, 0),
        }
    }

    /// Value at `T = 0`.
    pub fn constant_term(&self) -> PadicNumber {
        self.coefficient(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Highest index with a non-zero coefficient, if any.
    pub fn poly_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn modulus(&self) -> BigInt {
        pow_u(self.p, self.precision)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Incompatible(format!("primes {} and {}", self.p, other.p)));
        }
        Ok(())
    }

    /// Sum at the common precision.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (d, n) = self.common(other);
        let c: Vec<BigInt> = (0..=d).map(|i| self.get(i) + other.get(i)).collect();
        Ok(Self::build(self.p, &c, d, n, self.exact && other.exact))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (d, n) = self.common(other);
        let c: Vec<BigInt> = (0..=d).map(|i| self.get(i) - other.get(i)).collect();
        Ok(Self::build(self.p, &c, d, n, self.exact && other.exact))
    }

    /// Product at the common precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (d, n) = self.common(other);
        let m = pow_u(self.p, n);
        Ok(Self::build(self.p, &mul_trunc(&self.coeffs, &other.coeffs, d, &m), d, n, self.exact && other.exact))
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        let c: Vec<BigInt> = self.coeffs.iter().map(|x| x * s).collect();
        Self::build(self.p, &c, self.degree, self.precision, self.exact)
    }

    /// Multiply by `T^k`, widening the truncation degree by `k` so no
    /// known coefficient is lost.
    pub fn shift(&self, k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::build(self.p, &c, self.degree + k, self.precision, self.exact)
    }

    /// Re-truncate to a smaller degree and/or precision.
    pub fn truncate(&self, degree: usize, precision: u32) -> Self {
        let d = degree.min(self.degree);
        let n = precision.min(self.precision);
        let exact = self.exact && self.poly_degree().map_or(true, |pd| pd <= d);
        Self::build(self.p, &self.coeffs, d, n, exact)
    }

    /// Equality modulo the common `(p^N, T^{D+1})`.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.p == other.p && self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    fn common(&self, other: &Self) -> (usize, u32) {
        (self.degree.min(other.degree), self.precision.min(other.precision))
    }

    fn get(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Evaluate at `T = t` for `t` in `pZ_p` given as an integer mod `p^N`.
    pub fn eval_integer(&self, t: &BigInt) -> BigInt {
        let m = self.modulus();
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * t + c).mod_floor(&m);
        }
        acc
    }
}

impl fmt::Display for LambdaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·T")?,
                _ => write!(f, "{c}·T^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if !self.exact {
            write!(f, " + O(T^{})", self.degree + 1)?;
        }
        write!(f, " (mod {}^{})", self.p, self.precision)
    }
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], d: usize, m: &BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); d + 1];
    for (i, x) in a.iter().enumerate().take(d + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(d + 1 - i) {
            out[i + j] += x * y;
        }
    }
    for c in out.iter_mut() {
        *c = c.mod_floor(m);
    }
    out
}

/// Inverse of a power series with unit constant term, modulo `(m, T^{d+1})`.
fn inv_series(a: &[BigInt], d: usize, m: &BigInt) -> Result<Vec<BigInt>> {
    let a0 = a.first().cloned().unwrap_or_default();
    let inv0 = inv_mod(&a0, m).ok_or_else(|| Error::InvalidInput("constant term is not a unit".into()))?;
    let mut out = vec![BigInt::zero(); d + 1];
    out[0] = inv0.clone();
    for k in 1..=d {
        let mut s = BigInt::zero();
        for j in 1..=k.min(a.len().saturating_sub(1)) {
            s += &a[j] * &out[k - j];
        }
        out[k] = (-s * &inv0).mod_floor(m);
    }
    Ok(out)
}

/// Output of Weierstrass preparation: `f ≐ p^μ · distinguished · unit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preparation {
    pub mu: u32,
    pub lambda: usize,
    pub distinguished: LambdaElement,
    pub unit: LambdaElement,
}

impl Preparation {
    /// Expand `p^μ · distinguished · unit` back into one series.
    pub fn expand(&self) -> Result<LambdaElement> {
        let pm = pow_u(self.distinguished.p, self.mu);
        Ok(self.distinguished.mul(&self.unit)?.scale(&pm))
    }
}

/// Weierstrass preparation of a non-zero element.
///
/// With `g = f / p^μ = A + T^λ B` (`A` of degree `< λ`, `A ≡ 0 mod p`, `B` a
/// unit) the series `Q = qB` solves `Q = 1 − τ(Q B^{-1} A)`, where `τ` drops
/// the terms below `T^λ` and divides by `T^λ`. Then `q g` is the
/// distinguished polynomial and `q^{-1}` the unit.
///
/// On a truncated (non-exact) input the unit is determined only modulo
/// `T^{D−λ+1}`, so the returned unit has that truncation degree, and the
/// distinguished part needs `D ≥ 2λ − 1`.
pub fn weierstrass_prepare(f: &LambdaElement) -> Result<Preparation> {
    let p = f.p;
    let n = f.precision;
    let mu = f
        .coeffs
        .iter()
        .filter_map(|c| vp_int(c, p))
        .min()
        .ok_or_else(|| Error::InsufficientPrecision("series is zero modulo p^N".into()))?;
    let n_red = n - mu;
    let m = pow_u(p, n_red);
    let pm = pow_u(p, mu);
    let g_coeffs: Vec<BigInt> = f.coeffs.iter().map(|c| (c / &pm).mod_floor(&m)).collect();
    let lambda = g_coeffs
        .iter()
        .position(|c| !(c % p).is_zero())
        .expect("some coefficient is a unit after removing p^mu");

    // Working degree: exact inputs are zero-padded so the unit is known to degree D.
    let d_in = f.degree;
    let d_work = if f.exact { d_in + lambda } else { d_in };
    if d_work + 1 < 2 * lambda {
        return Err(Error::TruncationTooSmall { needed: (2 * lambda).saturating_sub(1), available: d_in });
    }
    let mut g = g_coeffs;
    g.resize(d_work + 1, BigInt::zero());
    let du = d_work - lambda; // truncation degree of q, Q and the unit

    let a: Vec<BigInt> = g[..lambda].to_vec();
    let b: Vec<BigInt> = g[lambda..].to_vec();
    // Coefficients past the working degree are taken as zero (the polynomial representative).
    let b_inv = inv_series(&b, du + lambda, &m)?;
    let b_inv_a = mul_trunc(&b_inv, &a, du + lambda, &m);

    let mut big_q = vec![BigInt::zero(); du + 1];
    big_q[0] = BigInt::one();
    // Each pass gains one p-adic digit, since A ≡ 0 (mod p).
    for _ in 0..=n_red + 1 {
        let prod = mul_trunc(&big_q, &b_inv_a, du + lambda, &m);
        let mut next = vec![BigInt::zero(); du + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            let t = prod.get(k + lambda).cloned().unwrap_or_default();
            *slot = if k == 0 { (BigInt::one() - t).mod_floor(&m) } else { (-t).mod_floor(&m) };
        }
        if next == big_q {
            break;
        }
        big_q = next;
    }
    let q = mul_trunc(&big_q, &b_inv, du, &m);
    let qg = mul_trunc(&q, &g, lambda, &m);
    let mut dist = qg[..lambda].to_vec();
    dist.push(BigInt::one());
    let unit_coeffs = inv_series(&q, du, &m)?;

    let unit_degree = if f.exact { d_in } else { du };
    let distinguished = LambdaElement::from_poly(p, &dist, d_in.max(lambda), n_red)?;
    let unit = LambdaElement::new(p, &unit_coeffs, unit_degree, n_red);
    Ok(Preparation { mu, lambda, distinguished, unit })
}

/// Order of vanishing at `T = 0` and the leading coefficient `g(0)` of `f = T^r g`.
pub fn vanishing_order(f: &LambdaElement) -> Result<(usize, PadicNumber)> {
    let r = f
        .coeffs
        .iter()
        .position(|c| !c.is_zero())
        .ok_or_else(|| Error::InsufficientPrecision("series is zero modulo p^N".into()))?;
    Ok((r, f.coefficient(r)))
}

/// Truncated Euler characteristic `χ_t = |g(0)|_p^{-1}` of a module with
/// characteristic element `f = T^r g`.
pub fn truncated_euler_char(f: &LambdaElement) -> Result<PPower> {
    let (_, g0) = vanishing_order(f)?;
    Ok(g0.abs_inverse())
}

/// Characteristic-element data derived from one series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPolyData {
    pub f: LambdaElement,
    pub mu: u32,
    pub lambda: usize,
    pub r: usize,
    pub g0: PadicNumber,
}

impl CharPolyData {
    pub fn from_element(f: LambdaElement) -> Result<Self> {
        let prep = weierstrass_prepare(&f)?;
        let (r, g0) = vanishing_order(&f)?;
        Ok(Self { f, mu: prep.mu, lambda: prep.lambda, r, g0 })
    }

    pub fn chi_t(&self) -> PPower {
        self.g0.abs_inverse()
    }
}

/// The two sides of the biconditional `χ_t = 1 ⇔ (μ = 0 and λ = r)`,
/// each computed independently.
pub fn chi_trivial_equivalence(d: &CharPolyData) -> (bool, bool) {
    let chi_is_one = d.g0.valuation() == Some(0);
    let structural = d.mu == 0 && d.lambda == d.r;
    (chi_is_one, structural)
}

/// Two elements are associate when their preparations share μ, λ and the
/// distinguished polynomial to precision.
pub fn is_associate(a: &LambdaElement, b: &LambdaElement) -> Result<bool> {
    let pa = weierstrass_prepare(a)?;
    let pb = weierstrass_prepare(b)?;
    Ok(pa.mu == pb.mu && pa.lambda == pb.lambda && pa.distinguished.eq_to_precision(&pb.distinguished))
}

/// `t_v = log_p⟨Nv⟩ / log_p κ(γ)`, so that `κ(γ)^{t_v} = ⟨Nv⟩`.
pub fn frobenius_exponent(nv: &BigInt, p: u64, precision: u32) -> Result<PadicNumber> {
    if (nv % BigInt::from(p)).is_zero() {
        return Err(Error::DivisibleByP { value: nv.to_string(), p });
    }
    // log_p κ(γ) has valuation 1, so one extra digit covers the division.
    let work = precision + 1;
    let num = padic_log(&PadicNumber::from_int(nv, p, work))?;
    let den = padic_log(&PadicNumber::from_int(&BigInt::from(kappa_gamma(p)), p, work))?;
    let t = num.checked_div(&den)?;
    Ok(t.with_absolute_precision(precision as i64))
}

/// `𝒫_v(T) = P_v(Nv^{-1}(1+T)^{t_v})` for the local polynomial `P_v(X) = Σ P_k X^k`,
/// expanded to T-degree `degree`.
///
/// The binomial coefficients of `(1+T)^{k t_v}` lose `v_p(j!)` digits at
/// degree `j`; `t_v` is therefore computed with that many extra digits so
/// every output coefficient is correct modulo `p^precision`.
pub fn twist_euler_factor(
    local_poly: &[BigInt],
    nv: &BigInt,
    p: u64,
    degree: usize,
    precision: u32,
) -> Result<LambdaElement> {
    if (nv % BigInt::from(p)).is_zero() {
        return Err(Error::DivisibleByP { value: nv.to_string(), p });
    }
    let extra = vp_factorial(degree as u64, p) + 1;
    let work = precision + extra;
    let mw = pow_u(p, work);
    let m = pow_u(p, precision);
    let t = frobenius_exponent(nv, p, work)?.residue(work)?;
    let nv_inv = inv_mod(nv, &mw).expect("Nv is a unit");

    let mut out = vec![BigInt::zero(); degree + 1];
    let mut nv_pow = BigInt::one();
    for (k, pk) in local_poly.iter().enumerate() {
        if k > 0 {
            nv_pow = (&nv_pow * &nv_inv).mod_floor(&mw);
        }
        if pk.is_zero() {
            continue;
        }
        let s = (BigInt::from(k as u64) * &t).mod_floor(&mw);
        let bin = binomial_series(&s, degree, p, work);
        let scale = (pk * &nv_pow).mod_floor(&mw);
        for (j, c) in bin.iter().enumerate() {
            out[j] += &scale * c;
        }
    }
    for c in out.iter_mut() {
        *c = c.mod_floor(&m);
    }
    Ok(LambdaElement::new(p, &out, degree, precision))
}

/// Coefficients `binom(s, j)`, `j = 0..=degree`, of `(1+T)^s` for a p-adic
/// integer `s` given by the non-negative representative `s` modulo `p^work`.
fn binomial_series(s: &BigInt, degree: usize, p: u64, work: u32) -> Vec<BigInt> {
    let mw = pow_u(p, work);
    let mut out = Vec::with_capacity(degree + 1);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    out.push(BigInt::one());
    for j in 1..=degree {
        num *= s - BigInt::from(j as u64 - 1);
        den *= BigInt::from(j as u64);
        out.push((&num / &den).mod_floor(&mw));
    }
    out
}

/// `f^{Σ}(T) = f(T) · ∏ h_v(T)`.
pub fn imprimitive_charpoly(f: &LambdaElement, twists: &[LambdaElement]) -> Result<LambdaElement> {
    let mut acc = f.clone();
    for h in twists {
        acc = acc.mul(h)?;
    }
    Ok(acc)
}

/// Akashi series `T^{γ_E} · f(T)`.
pub fn akashi_series(f: &LambdaElement, gamma_e: i64) -> Result<LambdaElement> {
    if gamma_e < 0 {
        return Err(Error::InvalidInput(format!("gamma_E must be non-negative, got {gamma_e}")));
    }
    Ok(f.shift(gamma_e as usize))
}

/// Leading term `(k, β)` of an Akashi series and the resulting `χ_t(G) = |β|_p^{-1}`.
pub fn akashi_euler_char(ak: &LambdaElement) -> Result<(usize, PadicNumber, PPower)> {
    let (k, beta) = vanishing_order(ak)?;
    let chi = beta.abs_inverse();
    Ok((k, beta, chi))
}
