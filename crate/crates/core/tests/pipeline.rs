//! End-to-end behaviour of the pair analysis, scan, reports and cache.

use std::collections::BTreeSet;

use eulercong_core::congruence::CongruenceVerdict;
use eulercong_core::curve::Place;
use eulercong_core::euler::Verdict;
use eulercong_core::pipeline::*;
use eulercong_core::{BaseField, Error};

const EXTRA: &str = "\
label=11a1 a1=0 a2=-1 a3=1 a4=-10 a6=-20 rank=0 sha_order=1 torsion_order=5
label=11a2 a1=0 a2=-1 a3=1 a4=-7820 a6=-263580 rank=0 sha_order=1 torsion_order=1
label=11a3 a1=0 a2=-1 a3=1 a4=0 a6=0 rank=0 sha_order=1 torsion_order=5
label=19a1 a1=0 a2=1 a3=1 a4=-9 a6=-15 rank=0
";

fn all_records() -> Vec<CurveRecord> {
    let mut text = BUNDLED_CURVES.to_string();
    text.push_str(EXTRA);
    parse_curve_records_str(&text).unwrap()
}

fn places(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

fn labels(set: &BTreeSet<Place>) -> BTreeSet<String> {
    set.iter().map(|p| p.label.clone()).collect()
}

#[test]
fn first_pair_over_q() {
    let r = analyze_pair(&bundled_records(), "66a1", "462d1", 5, BaseField::Q, &AnalysisConfig::default()).unwrap();
    assert!(r.residual.congruence.is_congruent());
    assert_eq!(labels(&r.residual.sets.sigma0), places(&["2", "3", "7", "11"]));
    assert_eq!(labels(&r.residual.sets.sigma1), places(&["7"]));
    assert_eq!([r.curves[0].tamagawa_product, r.curves[1].tamagawa_product], [6, 16]);
    for c in &r.curves {
        assert!(c.phi.value.is_one() && !c.phi.lower_bound);
        assert!(c.chi.as_ref().unwrap().exponent.is_one());
    }
    assert_eq!(r.verdicts.congruence.verdict, Verdict::Consistent);
    assert_eq!((r.outcome, r.exit_code()), (Outcome::Consistent, 0));
}

#[test]
fn second_pair_over_qi() {
    let r = analyze_pair(&bundled_records(), "38a1", "114b1", 5, BaseField::Qi, &AnalysisConfig::default()).unwrap();
    assert_eq!(r.residual.sigma_ss[0].iter().map(|p| p.label.as_str()).collect::<Vec<_>>(), ["2+i", "2-i"]);
    assert!(r.residual.sigma_ss_agree());
    assert_eq!(labels(&r.residual.sets.manual_review), places(&["1+i"]));
    assert!(r.curves[0].phi.value.divisible_by_p());
    assert!(r.curves[0].phi.lower_bound);
    assert_eq!(r.verdicts.congruence.clause, "divisibility");
    assert_eq!(r.outcome, Outcome::Consistent);
    let row19 = r.curves[0].local_table.iter().find(|row| row.place.label == "19").unwrap();
    assert_eq!((row19.place.norm, row19.l_inverse.as_str()), (361, "360/361"));
}

#[test]
fn non_congruent_pair_exits_early_with_hypothesis_code() {
    let r = analyze_pair(&all_records(), "11a1", "19a1", 7, BaseField::Q, &AnalysisConfig::default()).unwrap();
    match &r.residual.congruence {
        CongruenceVerdict::NotCongruent { witness, .. } => assert_eq!(*witness, 2),
        other => panic!("{other:?}"),
    }
    assert_eq!((r.outcome, r.exit_code()), (Outcome::HypothesisFailure, 3));
}

#[test]
fn ordinary_pair_runs_the_bsd_branch() {
    // 11a1 and 11a3 are 5-isogenous; E[5] is reducible, which the heuristic reports.
    let r = analyze_pair(&all_records(), "11a1", "11a3", 5, BaseField::Q, &AnalysisConfig::default()).unwrap();
    assert!(r.residual.congruence.is_congruent());
    assert_eq!(labels(&r.residual.sets.sigma1), places(&["11"]));
    for c in &r.curves {
        assert!(c.chi_formula.starts_with("p-adic BSD"));
        assert!(c.chi.is_some());
        // |L_11|_5 = |10/11|_5^{-1}: Φ = 5.
        assert_eq!(c.phi.value.exponent, Some(1));
    }
    assert!(r.assumptions.iter().any(|a| a.contains("possibly reducible") || a.contains("not established")));
}

#[test]
fn unknown_label_and_even_prime() {
    let recs = bundled_records();
    let cfg = AnalysisConfig::default();
    assert_eq!(analyze_pair(&recs, "66a1", "nope", 5, BaseField::Q, &cfg).unwrap_err(), Error::UnknownLabel("nope".into()));
    assert!(analyze_pair(&recs, "66a1", "462d1", 2, BaseField::Q, &cfg).is_err());
    assert!(scan(&recs, 2, 100, &DiskCache::disabled()).is_err());
}

#[test]
fn json_roundtrip_and_determinism() {
    let recs = bundled_records();
    let cfg = AnalysisConfig::default();
    let a = analyze_pair(&recs, "38a1", "114b1", 5, BaseField::Qi, &cfg).unwrap();
    let b = analyze_pair(&recs, "38a1", "114b1", 5, BaseField::Qi, &cfg).unwrap();
    let ja = emit_report(&a, ReportFormat::Json).unwrap();
    assert_eq!(ja, emit_report(&b, ReportFormat::Json).unwrap());
    assert_eq!(emit_report(&a, ReportFormat::Text).unwrap(), emit_report(&b, ReportFormat::Text).unwrap());
    assert_eq!(parse_report(&ja).unwrap(), a);
    let bumped = ja.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(parse_report(&bumped).is_err());
}

#[test]
fn text_report_lists_local_values() {
    let r = analyze_pair(&bundled_records(), "66a1", "462d1", 5, BaseField::Q, &AnalysisConfig::default()).unwrap();
    let text = emit_report(&r, ReportFormat::Text).unwrap();
    assert!(text.contains("Σ₁ = {7}"));
    assert!(text.contains("outcome: Consistent (exit 0)"));
}

#[test]
fn warm_and_cold_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = AnalysisConfig { cache: DiskCache::at(dir.path()), bound: 200, ..AnalysisConfig::default() };
    let recs = bundled_records();
    let cold = analyze_pair(&recs, "66a1", "462d1", 5, BaseField::Q, &cfg).unwrap();
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 2);
    let warm = analyze_pair(&recs, "66a1", "462d1", 5, BaseField::Q, &cfg).unwrap();
    let none = analyze_pair(&recs, "66a1", "462d1", 5, BaseField::Q, &AnalysisConfig { cache: DiskCache::disabled(), ..cfg.clone() }).unwrap();
    let j = |r: &PairReport| emit_report(r, ReportFormat::Json).unwrap();
    assert_eq!(j(&cold), j(&warm));
    assert_eq!(j(&cold), j(&none));

    let s1 = scan(&recs, 5, 200, &cfg.cache).unwrap();
    let s2 = scan(&recs, 5, 200, &cfg.cache).unwrap();
    assert_eq!(s1, s2);
}

fn pair_set(c: &[ScanCandidate]) -> BTreeSet<[String; 2]> {
    c.iter().map(|c| c.labels.clone()).collect()
}

#[test]
fn scan_finds_the_fixture_pairs() {
    let found = scan(&bundled_records(), 5, 1000, &DiskCache::disabled()).unwrap();
    let set = pair_set(&found);
    assert!(set.contains(&["66a1".to_string(), "462d1".to_string()]));
    assert!(set.contains(&["38a1".to_string(), "114b1".to_string()]));
    assert!(found.windows(2).all(|w| w[0].sigma1.len() <= w[1].sigma1.len()));
    assert!(scan(&bundled_records()[..1], 5, 1000, &DiskCache::disabled()).unwrap().is_empty());
}

#[test]
fn scan_is_monotone_in_the_bound() {
    let recs = all_records();
    let cache = DiskCache::disabled();
    let mut previous: Option<BTreeSet<[String; 2]>> = None;
    for bound in [50, 100, 300, 1000] {
        let set = pair_set(&scan(&recs, 5, bound, &cache).unwrap());
        if let Some(prev) = &previous {
            assert!(set.is_subset(prev), "raising B to {bound} added pairs");
        }
        previous = Some(set);
    }
    let last = previous.unwrap();
    assert!(last.contains(&["11a1".to_string(), "11a3".to_string()]));
    assert!(!last.iter().any(|p| p.contains(&"19a1".to_string())));
}

#[test]
fn characteristic_series_feed_the_transfer_check() {
    let text = "\
label=66a1 a1=1 a2=0 a3=1 a4=-6 a6=4 rank=0 sha_order=1 charpoly=1 charpoly_p=5 gamma_e=1
label=462d1 a1=1 a2=0 a3=1 a4=-1676 a6=5058506 rank=0 sha_order=1 charpoly=5,1 charpoly_p=5 gamma_e=2
";
    let recs = parse_curve_records_str(text).unwrap();
    let r = analyze_pair(&recs, "66a1", "462d1", 5, BaseField::Q, &AnalysisConfig::default()).unwrap();
    let inv: Vec<_> = r.curves.iter().map(|c| c.invariants.clone().unwrap()).collect();
    assert_eq!((inv[0].mu, inv[0].lambda, inv[0].mu_sigma1, inv[0].lambda_sigma1), (0, 0, 0, 0));
    assert_eq!((inv[1].mu, inv[1].lambda, inv[1].mu_sigma1, inv[1].lambda_sigma1), (0, 1, 0, 1));
    assert!(inv.iter().all(|i| i.imprimitive_identity_holds));
    // λ^{Σ₁} differs (0 vs 1) with μ = 0: the transfer check flags it.
    assert_eq!(r.verdicts.invariant_transfer, Some(Verdict::Violation));
    assert_eq!(r.verdicts.akashi, [Some(Verdict::Consistent), Some(Verdict::Consistent)]);
    assert_eq!(r.outcome, Outcome::Violation);
}
