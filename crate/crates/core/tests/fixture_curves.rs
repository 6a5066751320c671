//! Local data of the bundled curves against frozen PARI/GP values, plus
//! structural checks (twists, torsion) with independent oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use eulercong_core::arith::legendre;
use eulercong_core::curve::{
    bad_primes, local_data, local_data_over, tate_algorithm, torsion_p_part_bound, BaseField, CurveModel, Kodaira,
    ReductionKind,
};
use eulercong_core::pipeline::{bundled_records, find_record};

const REFERENCE: &str = include_str!("data/fixture_local_reference.txt");

fn rows(tag: &'static str) -> impl Iterator<Item = Vec<&'static str>> {
    REFERENCE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(move |f| f[0] == tag)
}

fn model(label: &str) -> CurveModel {
    find_record(&bundled_records(), label).unwrap().model().unwrap()
}

fn kind(s: &str) -> ReductionKind {
    match s {
        "good" => ReductionKind::Good,
        "split" => ReductionKind::SplitMultiplicative,
        "nonsplit" => ReductionKind::NonsplitMultiplicative,
        _ => ReductionKind::Additive,
    }
}

#[test]
fn bad_primes_match_reference() {
    let mut n = 0;
    for f in rows("bad") {
        let e = model(f[1]);
        let l: u64 = f[2].parse().unwrap();
        let t = tate_algorithm(&e, l).unwrap();
        let want = (f[3].parse::<Kodaira>().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap(), kind(f[6]), f[7].parse().unwrap());
        assert_eq!((t.kodaira, t.conductor_exponent, t.tamagawa, t.kind, t.ord_delta_min), want, "{} at {l}", f[1]);
        n += 1;
    }
    assert_eq!(n, 3 + 4 + 2 + 3);
}

#[test]
fn conductor_and_tamagawa_product() {
    for f in rows("conductor") {
        let e = model(f[1]);
        let mut conductor = 1u64;
        let mut tamagawa = 1u64;
        for l in bad_primes(&e).unwrap() {
            let d = local_data(&e, l).unwrap();
            conductor *= l.pow(d.conductor_exponent);
            tamagawa *= d.tamagawa as u64;
        }
        assert_eq!(conductor.to_string(), f[2], "{}", f[1]);
        assert_eq!(tamagawa.to_string(), f[3], "{}", f[1]);
    }
}

#[test]
fn conductor_support_identifies_labels() {
    let want: [(&str, &[u64]); 4] =
        [("66a1", &[2, 3, 11]), ("462d1", &[2, 3, 7, 11]), ("38a1", &[2, 19]), ("114b1", &[2, 3, 19])];
    for (label, primes) in want {
        assert_eq!(bad_primes(&model(label)).unwrap(), primes, "{label}");
    }
}

#[test]
fn places_over_qi_match_reference() {
    let mut n = 0;
    for f in rows("qi") {
        let e = model(f[1]).over(BaseField::Qi);
        let l: u64 = f[2].parse().unwrap();
        let norm: u64 = f[3].parse().unwrap();
        let places = local_data_over(&e, l).unwrap();
        let d = places.iter().find(|d| d.residue_norm == norm).expect("place of the given norm");
        let want = (f[4].parse::<Kodaira>().unwrap(), f[5].parse().unwrap(), f[6].parse().unwrap(), kind(f[7]), f[8].parse::<i64>().unwrap());
        let got = (d.kodaira, d.conductor_exponent, d.tamagawa, d.kind, d.a_v.unwrap());
        assert_eq!(got, want, "{} above {l}", f[1]);
        n += 1;
    }
    assert!(n >= 24);
}

#[test]
fn traces_match_reference() {
    for f in rows("ap") {
        let e = model(f[1]);
        let l: u64 = f[2].parse().unwrap();
        assert_eq!(local_data(&e, l).unwrap().a_v.unwrap().to_string(), f[3], "{} at {l}", f[1]);
    }
}

/// Quadratic twist `y² = x³ − 27c4d²x − 54c6d³`.
fn twist(e: &CurveModel, d: i64) -> CurveModel {
    let inv = e.invariants().unwrap();
    let d = BigInt::from(d);
    let a4 = -BigInt::from(27) * &inv.c4 * &d * &d;
    let a6 = -BigInt::from(54) * &inv.c6 * &d * &d * &d;
    CurveModel::new("twist", [BigInt::zero(), BigInt::zero(), BigInt::zero(), a4, a6]).unwrap()
}

#[test]
fn twisting_flips_split_and_scales_traces() {
    let e = CurveModel::from_i64("11a1", [0, -1, 1, -10, -20]).unwrap();
    for d in [2i64, 3, -1, 7] {
        let et = twist(&e, d);
        let chi = legendre(&BigInt::from(d), 11) as i64;
        let (a, b) = (local_data(&e, 11).unwrap(), local_data(&et, 11).unwrap());
        assert_eq!(b.ord_delta_min, a.ord_delta_min);
        let flipped = if chi == -1 { ReductionKind::NonsplitMultiplicative } else { ReductionKind::SplitMultiplicative };
        assert_eq!(b.kind, flipped, "d = {d}");
        for l in [13u64, 17, 19, 23, 29, 31] {
            if (d.unsigned_abs()) % l == 0 {
                continue;
            }
            let s = legendre(&BigInt::from(d), l) as i64;
            assert_eq!(local_data(&et, l).unwrap().a_v.unwrap(), s * local_data(&e, l).unwrap().a_v.unwrap());
        }
    }
}

type Pt = Option<(BigRational, BigRational)>;

/// Chord-and-tangent addition on a general Weierstrass model.
fn add(a: &[BigRational; 5], p: &Pt, q: &Pt) -> Pt {
    let [a1, a2, a3, a4, _] = a;
    let (Some((x1, y1)), Some((x2, y2))) = (p, q) else {
        return p.clone().or_else(|| q.clone());
    };
    let lam = if x1 == x2 {
        let denom = BigRational::from_integer(2.into()) * y1 + a1 * x1 + a3;
        if denom.is_zero() {
            return None;
        }
        (BigRational::from_integer(3.into()) * x1 * x1 + BigRational::from_integer(2.into()) * a2 * x1 + a4 - a1 * y1) / denom
    } else {
        (y2 - y1) / (x2 - x1)
    };
    if x1 == x2 && y1 != y2 && (y1 + y2 + a1 * x1 + a3).is_zero() {
        return None;
    }
    let x3 = &lam * &lam + a1 * &lam - a2 - x1 - x2;
    let y3 = -(&lam + a1) * &x3 - (y1 - &lam * x1) - a3;
    Some((x3, y3))
}

#[test]
fn five_torsion_point_forces_torsion_bound() {
    // X1(5) family at t = 2: (0, 0) has exact order 5.
    let coeffs = [-1i64, -2, -2, 0, 0];
    let e = CurveModel::from_i64("x1-5", coeffs).unwrap();
    let a = coeffs.map(|c| BigRational::from_integer(c.into()));
    let p0: Pt = Some((BigRational::zero(), BigRational::zero()));
    let mut acc = p0.clone();
    for k in 2..=5 {
        acc = add(&a, &acc, &p0);
        assert_eq!(acc.is_none(), k == 5, "multiple {k}");
    }
    assert!(torsion_p_part_bound(&e, 5).unwrap() >= 5);
    assert_eq!(torsion_p_part_bound(&e, 7).unwrap(), 1);
}
