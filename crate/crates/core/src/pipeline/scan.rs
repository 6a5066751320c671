//! Database scan for p-congruent pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::analysis::local_table;
use super::cache::DiskCache;
use super::records::CurveRecord;
use crate::arith::ensure_prime;
use crate::congruence::{sigma1, test_p_congruence_tables, CongruenceVerdict};
use crate::curve::{LocalDataMemo, Place};
use crate::error::{Error, Result};

/// A pair passing the trace comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCandidate {
    pub labels: [String; 2],
    pub sigma1: Vec<Place>,
    pub primes_tested: usize,
}

/// All unordered pairs whose traces agree mod p at every compatible prime
/// `ℓ ≤ bound`, ranked by `|Σ₁|` (over Q) and then by label.
pub fn scan(records: &[CurveRecord], p: u64, bound: u64, cache: &DiskCache) -> Result<Vec<ScanCandidate>> {
    ensure_prime(p)?;
    if p == 2 {
        return Err(Error::UnsupportedPrime { p, reason: "p must be odd".into() });
    }
    let mut digest = Sha256::new();
    for r in records {
        digest.update(r.to_line().as_bytes());
        digest.update(b"\n");
    }
    let parts = vec![hex::encode(digest.finalize()), p.to_string(), bound.to_string()];
    cache.get_or_compute("scan", &parts, || scan_uncached(records, p, bound, cache))
}

fn scan_uncached(records: &[CurveRecord], p: u64, bound: u64, cache: &DiskCache) -> Result<Vec<ScanCandidate>> {
    let models = records.iter().map(|r| r.model()).collect::<Result<Vec<_>>>()?;
    let tables = models.par_iter().map(|e| local_table(e, bound, cache)).collect::<Result<Vec<_>>>()?;
    let memo = LocalDataMemo::new();
    for (e, t) in models.iter().zip(&tables) {
        for d in t {
            memo.insert(&e.label, d.clone());
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..models.len()).flat_map(|i| (i + 1..models.len()).map(move |j| (i, j))).collect();
    let mut out = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<ScanCandidate>> {
            let verdict = test_p_congruence_tables(&tables[i], &tables[j], p, bound)?;
            let CongruenceVerdict::CongruentUpToBound { primes_tested, .. } = verdict else {
                return Ok(None);
            };
            let sets = sigma1(&models[i], &models[j], p, &memo)?;
            Ok(Some(ScanCandidate {
                labels: [models[i].label.clone(), models[j].label.clone()],
                sigma1: sets.sigma1.into_iter().collect(),
                primes_tested,
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    out.sort_by(|a, b| a.sigma1.len().cmp(&b.sigma1.len()).then_with(|| a.labels.cmp(&b.labels)));
    Ok(out)
}
