//! Local L-factors, the correction factor Φ, truncated Euler characteristics
//! from the p-adic BSD-type formulas, and the theorem checks built on them.
//!
//! Every Euler characteristic is a power of p known only up to a p-adic
//! unit; nothing here claims unit parts.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::vp_int;
use crate::curve::{LocalData, PReduction, ReductionKind};
use crate::error::{Error, Result};
use crate::lambda::kappa_gamma;
use crate::padic::{hensel_unit_root, padic_log, valuation, PPower, PadicNumber};

/// `L_v(E,1)^{-1} = P_v(Nv^{-1})` at a place `v ∤ p`.
#[allow(non_snake_case)]
pub fn local_L_inverse(d: &LocalData) -> BigRational {
    BigRational::new(local_euler_numerator(d), BigInt::from(d.residue_norm))
}

/// `Nv · L_v(E,1)^{-1}`, i.e. `Nv + 1 − a_v` at good places, `Nv − 1` split,
/// `Nv + 1` non-split and `Nv` additive.
pub fn local_euler_numerator(d: &LocalData) -> BigInt {
    let nv = BigInt::from(d.residue_norm);
    match d.kind {
        ReductionKind::Good => {
            let a = d.a_v.expect("trace of Frobenius is needed at a good place");
            nv + 1 - a
        }
        ReductionKind::SplitMultiplicative => nv - 1,
        ReductionKind::NonsplitMultiplicative => nv + 1,
        ReductionKind::Additive => nv,
    }
}

/// Coefficients of the local polynomial `P_v(X)` with `L_v(E,s) = P_v(Nv^{-s})^{-1}`.
pub fn local_polynomial(d: &LocalData) -> Vec<BigInt> {
    match d.kind {
        ReductionKind::Good => {
            let a = d.a_v.expect("trace of Frobenius is needed at a good place");
            vec![BigInt::one(), BigInt::from(-a), BigInt::from(d.residue_norm)]
        }
        ReductionKind::SplitMultiplicative => vec![BigInt::one(), -BigInt::one()],
        ReductionKind::NonsplitMultiplicative => vec![BigInt::one(), BigInt::one()],
        ReductionKind::Additive => vec![BigInt::one()],
    }
}

/// `|L_v(E,1)|_p` as a power of p: `p^{v_p(L_v(E,1)^{-1})}`; `+∞` when the
/// local factor degenerates.
pub fn local_abs_value(d: &LocalData, p: u64) -> PPower {
    match valuation(&local_L_inverse(d), p) {
        Ok(v) => PPower::new(v),
        Err(_) => PPower::infinite(),
    }
}

/// `Φ_{E,Σ} = ∏_{v∈Σ} |L_v(E,1)|_p`.
pub fn phi_factor<'a>(places: impl IntoIterator<Item = &'a LocalData>, p: u64) -> Result<PPower> {
    let mut acc = PPower::ONE;
    for d in places {
        if d.prime == p {
            return Err(Error::InvalidInput(format!("place {} lies above p = {p}", d.place)));
        }
        acc = acc.times(&local_abs_value(d, p));
    }
    Ok(acc)
}

/// `ε_p(E) = (1 − 1/α)^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonFactor {
    pub value: PadicNumber,
    pub s: u32,
    /// `α ≡ 1 (mod p)`: the factor is not a unit and the formula is at its
    /// exceptional edge.
    pub exceptional: bool,
}

/// `ε_p` for good ordinary (`s = 2`, α the unit root of `X² − a_pX + p`) or
/// non-split multiplicative (`s = 1`, `α = a_p = −1`) reduction.
pub fn epsilon_p(a_p: i64, kind: PReduction, p: u64, precision: u32) -> Result<EpsilonFactor> {
    let (alpha, s) = match kind {
        PReduction::GoodOrdinary => (hensel_unit_root(&BigInt::from(a_p), p, precision)?, 2),
        PReduction::NonsplitMultiplicative => {
            if a_p != -1 {
                return Err(Error::InvalidInput(format!("non-split multiplicative reduction has a_p = −1, got {a_p}")));
            }
            (PadicNumber::from_i64(a_p, p, precision), 1)
        }
        other => {
            return Err(Error::WrongBranch(format!(
                "ε_p is defined for good-ordinary and non-split reduction, not {}",
                other.as_str()
            )))
        }
    };
    let one = PadicNumber::one(p, precision);
    let base = &one - &one.checked_div(&alpha)?;
    let value = base.pow(s as i64)?;
    let exceptional = base.valuation().map_or(true, |v| v > 0);
    Ok(EpsilonFactor { value, s, exceptional })
}

/// Coefficients `b_0..b_{terms-1}` of `q·j(q) = E_4(q)³ / ∏(1−qⁿ)²⁴`
/// (`b_0 = 1`, `b_1 = 744`, `b_2 = 196884`, …).
pub fn j_series_coefficients(terms: usize) -> Vec<BigInt> {
    let sigma3 = |n: usize| -> BigInt { (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d as u64).pow(3)).sum() };
    let mut e4 = vec![BigInt::zero(); terms];
    e4[0] = BigInt::one();
    for (n, c) in e4.iter_mut().enumerate().skip(1) {
        *c = 240 * sigma3(n);
    }
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); terms];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(terms - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let e4_cubed = mul(&mul(&e4, &e4), &e4);
    // ∏(1 − qⁿ)²⁴
    let mut eta = vec![BigInt::zero(); terms];
    eta[0] = BigInt::one();
    for n in 1..terms {
        for _ in 0..24 {
            for k in (n..terms).rev() {
                let sub = eta[k - n].clone();
                eta[k] -= sub;
            }
        }
    }
    // Power-series division by a series with constant term 1.
    let mut out = vec![BigInt::zero(); terms];
    for k in 0..terms {
        let mut acc = e4_cubed[k].clone();
        for i in 1..=k {
            acc -= &eta[i] * &out[k - i];
        }
        out[k] = acc;
    }
    out
}

/// The Tate parameter `q` with `j(q) = 1/q + 744 + 196884q + …`, by the
/// fixed-point iteration `q ← 1/(j − 744 − Σ_{n≥1} c_n qⁿ)`.
pub fn tate_parameter(j: &PadicNumber, precision: u32) -> Result<PadicNumber> {
    let p = j.p();
    let vj = j.valuation().ok_or(Error::NotPotentiallyMultiplicative(i64::MAX))?;
    if vj >= 0 {
        return Err(Error::NotPotentiallyMultiplicative(vj));
    }
    let k = (-vj) as u32;
    let target = precision.min(j.precision());
    // c_n qⁿ has valuation n·k; terms beyond n·k ≥ target + k never matter.
    let terms = (target / k) as usize + 3;
    let b = j_series_coefficients(terms + 1);
    let work = target + k + 2;
    let coeffs: Vec<PadicNumber> = b[2..].iter().map(|c| PadicNumber::from_int(c, p, work)).collect();
    let c744 = PadicNumber::from_int(&b[1], p, work);
    let one = PadicNumber::one(p, work);
    let base = j - &c744;
    let mut q = one.checked_div(j)?;
    for _ in 0..(target + 2) {
        let mut tail = PadicNumber::zero(p);
        for c in coeffs.iter().rev() {
            tail = &(&tail * &q) + c;
        }
        tail = &tail * &q;
        let next = one.checked_div(&(&base - &tail))?;
        let done = next.eq_to_precision(&q);
        q = next;
        if done {
            break;
        }
    }
    Ok(q.with_precision(target.min(q.precision())))
}

/// `ℒ_p = log_p(q) / ord_p(q)` on the Iwasawa branch.
pub fn l_invariant(q: &PadicNumber) -> Result<PadicNumber> {
    let v = q
        .valuation()
        .filter(|&v| v > 0)
        .ok_or_else(|| Error::InvalidInput("ℒ-invariant needs a Tate parameter of positive valuation".into()))?;
    let log = padic_log(q)?;
    log.checked_div(&PadicNumber::from_i64(v, q.p(), q.precision()))
}

/// `v_p(log_p κ(γ))`.
pub fn log_kappa_valuation(p: u64, precision: u32) -> Result<i64> {
    let log = padic_log(&PadicNumber::from_int(&BigInt::from(kappa_gamma(p)), p, precision))?;
    log.valuation().ok_or_else(|| Error::InsufficientPrecision("log_p κ(γ) vanished".into()))
}

/// Reduction data at one place above p, as consumed by the BSD-type formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceAtP {
    pub reduction: PReduction,
    pub a_v: Option<i64>,
    /// `v_p(ℒ_p)` for split multiplicative places.
    pub l_invariant_valuation: Option<i64>,
}

/// Arithmetic inputs to the Euler-characteristic formulas. Regulator and Ш
/// are user data; nothing here computes them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerInputs {
    pub reduction_at_p: Vec<PlaceAtP>,
    pub rank: u32,
    pub r_dag: u32,
    /// `v_p(#Ш[p^∞])`.
    pub sha_p_exponent: u32,
    pub tamagawa_product: u64,
    /// `v_p(#E_tors)`.
    pub torsion_p_exponent: u32,
    /// `v_p` of the (γ-normalized) regulator; 0 for a unit regulator.
    pub regulator_unit_valuation: i64,
    /// Number of split multiplicative places above p.
    pub sp_e: u32,
    pub gamma_e: Option<u32>,
}

impl EulerInputs {
    pub fn validate(&self) -> Result<()> {
        if !rank_bound_check(self.rank, self.r_dag, self.sp_e) {
            return Err(Error::InvalidInput(format!(
                "r‡ = {} violates r ≤ r‡ ≤ r + sp_E with r = {}, sp_E = {}",
                self.r_dag, self.rank, self.sp_e
            )));
        }
        Ok(())
    }
}

/// A p-power Euler characteristic, always "up to a p-adic unit".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiValue {
    pub exponent: PPower,
    pub up_to_unit: bool,
    /// The true value is `p^k` with `k ≥ exponent` (some input was only bounded).
    pub lower_bound: bool,
    pub warnings: Vec<String>,
}

impl ChiValue {
    pub fn exact(exponent: PPower) -> Self {
        Self { exponent, up_to_unit: true, lower_bound: false, warnings: Vec::new() }
    }
}

fn vp_u64(n: u64, p: u64) -> Result<i64> {
    vp_int(&BigInt::from(n), p)
        .map(i64::from)
        .ok_or_else(|| Error::InvalidInput("Tamagawa product is zero".into()))
}

/// `χ_t(Γ,E) ∼ ε_p · R_γ · #Ш[p^∞] · τ / #E_tors²` (ordinary and non-split
/// places), with `ℒ_p / log_p κ(γ)` in place of `ε_p` at split places.
pub fn chi_t_bsd(inputs: &EulerInputs, p: u64, precision: u32) -> Result<ChiValue> {
    inputs.validate()?;
    let mut warnings = Vec::new();
    let mut local = PPower::ONE;
    for pl in &inputs.reduction_at_p {
        let factor = match pl.reduction {
            PReduction::GoodOrdinary | PReduction::NonsplitMultiplicative => {
                let a = pl.a_v.ok_or_else(|| Error::InvalidInput("a_p missing at a place above p".into()))?;
                let eps = epsilon_p(a, pl.reduction, p, precision)?;
                if eps.exceptional {
                    warnings.push(format!("α ≡ 1 (mod {p}) for a_p = {a}: ε_p is not a unit (exceptional case)"));
                }
                eps.value.abs_inverse()
            }
            PReduction::SplitMultiplicative => {
                let vl = pl.l_invariant_valuation.ok_or_else(|| {
                    Error::InvalidInput("split multiplicative reduction needs the ℒ-invariant valuation".into())
                })?;
                PPower::new(vl - log_kappa_valuation(p, precision)?)
            }
            PReduction::GoodSupersingular => {
                return Err(Error::WrongBranch(
                    "supersingular reduction: use the signed (±) product formula".into(),
                ))
            }
            PReduction::Additive => {
                return Err(Error::HypothesisViolation { clause: 1, detail: "additive reduction above p".into() })
            }
        };
        local = local.times(&factor);
    }
    let rest = inputs.regulator_unit_valuation + inputs.sha_p_exponent as i64 + vp_u64(inputs.tamagawa_product, p)?
        - 2 * inputs.torsion_p_exponent as i64;
    let exponent = local.times(&PPower::new(rest));
    if exponent.exponent.is_some_and(|e| e < 0) {
        warnings.push("negative exponent: inputs are inconsistent with a defined Euler characteristic".into());
    }
    Ok(ChiValue { exponent, up_to_unit: true, lower_bound: false, warnings })
}

/// `χ^±(Γ,E) ∼ #Sel_{p^∞}(E) · ∏ c_v` in the rank-zero supersingular setting.
pub fn chi_pm_supersingular(sel_p_exponent: u32, tamagawa_product: u64, p: u64) -> Result<ChiValue> {
    Ok(ChiValue::exact(PPower::new(sel_p_exponent as i64 + vp_u64(tamagawa_product, p)?)))
}

/// Outcome of a theorem check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Consistent,
    Violation,
    /// The inputs do not determine the answer (bounds only, missing data).
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Violation => "VIOLATION",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// A verdict with the clause that decided it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDetail {
    pub verdict: Verdict,
    pub clause: String,
    pub reason: String,
}

/// A p-power that may only be known from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedPPower {
    pub value: PPower,
    pub lower_bound: bool,
}

impl BoundedPPower {
    pub fn exact(value: PPower) -> Self {
        Self { value, lower_bound: false }
    }

    /// `Some(true)` if the quantity is 1, `Some(false)` if it is divisible by
    /// p, `None` if a lower bound of 1 leaves it open.
    fn is_one(&self) -> Option<bool> {
        match self.value.exponent {
            Some(0) if self.lower_bound => None,
            Some(0) => Some(true),
            _ => Some(false),
        }
    }
}

/// The congruence theorem on `Φ·χ_t`:
/// equal `r‡` ⇒ (`prod₁ = 1 ⇔ prod₂ = 1`); `r‡₁ < r‡₂` ⇒ `p | prod₁`
/// (and symmetrically when `r‡₂ < r‡₁`).
pub fn congruence_verdict(r1: u32, r2: u32, prod1: PPower, prod2: PPower) -> Verdict {
    congruence_verdict_detail(r1, r2, Some(BoundedPPower::exact(prod1)), Some(BoundedPPower::exact(prod2))).verdict
}

/// [`congruence_verdict`] for products that may be missing or only bounded below.
pub fn congruence_verdict_detail(
    r1: u32,
    r2: u32,
    prod1: Option<BoundedPPower>,
    prod2: Option<BoundedPPower>,
) -> VerdictDetail {
    let detail = |verdict, clause: &str, reason: String| VerdictDetail { verdict, clause: clause.into(), reason };
    if r1 != r2 {
        let (lo, prod, name) = if r1 < r2 { (r1, prod1, "E1") } else { (r2, prod2, "E2") };
        let hi = r1.max(r2);
        return match prod {
            None => detail(
                Verdict::Inconclusive,
                "divisibility",
                format!("Φ·χ_t of {name} (r‡ = {lo} < {hi}) is unavailable"),
            ),
            Some(b) if b.value.divisible_by_p() => detail(
                Verdict::Consistent,
                "divisibility",
                format!("r‡ = {lo} < {hi} and p divides Φ·χ_t of {name} (≥ p^{})", b.value.exponent.map_or("∞".into(), |e| e.to_string())),
            ),
            Some(b) if b.lower_bound => detail(
                Verdict::Inconclusive,
                "divisibility",
                format!("r‡ = {lo} < {hi} but only a lower bound 1 is known for Φ·χ_t of {name}"),
            ),
            Some(_) => detail(
                Verdict::Violation,
                "divisibility",
                format!("r‡ = {lo} < {hi} yet Φ·χ_t of {name} is a unit: a hypothesis must fail"),
            ),
        };
    }
    let (Some(a), Some(b)) = (prod1, prod2) else {
        return detail(Verdict::Inconclusive, "equal-rank", "a product Φ·χ_t is unavailable".into());
    };
    match (a.is_one(), b.is_one()) {
        (Some(x), Some(y)) if x == y => detail(
            Verdict::Consistent,
            "equal-rank",
            format!("r‡ = {r1} for both; Φ·χ_t {} for both", if x { "= 1" } else { "divisible by p" }),
        ),
        (Some(x), Some(_)) => detail(
            Verdict::Violation,
            "equal-rank",
            format!("r‡ = {r1} for both, but Φ·χ_t is 1 for exactly one curve (E{})", if x { 1 } else { 2 }),
        ),
        _ => detail(Verdict::Inconclusive, "equal-rank", "a lower bound of 1 does not decide Φ·χ_t = 1".into()),
    }
}

/// Transfer of imprimitive invariants: `μ₁ = 0 ⇔ μ₂ = 0`, and `μ₁ = 0 ⇒ λ₁ = λ₂`.
pub fn invariant_transfer_check(mu1: u32, lambda1: usize, mu2: u32, lambda2: usize) -> Verdict {
    if (mu1 == 0) != (mu2 == 0) || (mu1 == 0 && lambda1 != lambda2) {
        Verdict::Violation
    } else {
        Verdict::Consistent
    }
}

/// `r ≤ r‡ ≤ r + sp_E`.
pub fn rank_bound_check(r: u32, r_dag: u32, sp_e: u32) -> bool {
    r <= r_dag && r_dag <= r + sp_e
}
