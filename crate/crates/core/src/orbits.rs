//! Census of the equivalence orbits `A ~ S A T` of Z_h^{m x n}.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{space_size, Mat};
use crate::ring::Ring;
use crate::smith::{omega, InvariantFactorArray};

/// Default cap on the number of matrices a census may visit.
pub const CENSUS_BUDGET: u64 = 10_000_000;

/// Every nondecreasing vector of length `k` with entries in `[0, s]`, in
/// lexicographic order.
fn monotone_vectors(k: usize, s: u32) -> Vec<Vec<u32>> {
    fn go(k: usize, lo: u32, s: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for a in lo..=s {
            cur.push(a);
            go(k, a, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, 0, s, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All possible invariant-factor arrays for `m x n` matrices, sorted.
///
/// The labels have width `min(m, n)`; their number is
/// `prod_i C(s_i + min(m, n), min(m, n))`.
pub fn enumerate_orbit_labels(ring: &Ring, m: usize, n: usize) -> Vec<InvariantFactorArray> {
    let k = m.min(n);
    let mut labels = vec![Vec::<Vec<u32>>::new()];
    for pp in ring.components() {
        let choices = monotone_vectors(k, pp.s);
        labels = labels
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |v| {
                    let mut rows = prefix.clone();
                    rows.push(v.clone());
                    rows
                })
            })
            .collect();
    }
    labels
        .into_iter()
        .map(|rows| InvariantFactorArray { rows })
        .collect()
}

/// `prod_i C(s_i + k, k)` with `k = min(m, n)`.
pub fn expected_label_count(ring: &Ring, m: usize, n: usize) -> u64 {
    let k = m.min(n) as u64;
    ring.components()
        .iter()
        .map(|pp| {
            let s = pp.s as u64;
            (1..=k).fold(1u64, |acc, j| acc * (s + j) / j)
        })
        .product()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub label: InvariantFactorArray,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub h: u64,
    pub m: usize,
    pub n: usize,
    /// Sorted by label.
    pub entries: Vec<CensusEntry>,
    pub total: u64,
}

impl CensusReport {
    pub fn length_of(&self, label: &InvariantFactorArray) -> Option<u64> {
        self.entries
            .binary_search_by(|e| e.label.cmp(label))
            .ok()
            .map(|k| self.entries[k].length)
    }
}

/// Computes `Omega` for every matrix in index order and tallies the labels.
pub fn census_by_enumeration(ring: &Ring, m: usize, n: usize, budget: u64) -> Result<CensusReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameters("m and n must be positive".into()));
    }
    let size = space_size(ring.h(), m, n)
        .ok_or_else(|| Error::budget("census size", u128::MAX, budget as u128))?;
    if size > budget {
        return Err(Error::budget("census size", size as u128, budget as u128));
    }
    const CHUNK: u64 = 4096;
    let chunks = size.div_ceil(CHUNK);
    let tallies: Vec<BTreeMap<InvariantFactorArray, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = BTreeMap::new();
            for idx in c * CHUNK..((c + 1) * CHUNK).min(size) {
                let a = Mat::from_index(ring.h(), m, n, idx);
                let label = omega(ring, &a)?;
                *local.entry(label).or_insert(0) += 1;
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut merged: BTreeMap<InvariantFactorArray, u64> = BTreeMap::new();
    for t in tallies {
        for (label, count) in t {
            *merged.entry(label).or_insert(0) += count;
        }
    }
    let entries = merged
        .into_iter()
        .map(|(label, length)| CensusEntry { label, length })
        .collect();
    Ok(CensusReport {
        h: ring.h(),
        m,
        n,
        entries,
        total: size,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductRow {
    pub label: InvariantFactorArray,
    pub length: u64,
    pub local_lengths: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitProductReport {
    pub holds: bool,
    pub rows: Vec<ProductRow>,
    pub first_violation: Option<InvariantFactorArray>,
}

/// Compares every orbit length over Z_h with the product of the lengths of
/// its per-prime labels, each taken from a census over Z_{p_i^{s_i}}.
pub fn verify_orbit_product(ring: &Ring, m: usize, n: usize, budget: u64) -> Result<OrbitProductReport> {
    let full = census_by_enumeration(ring, m, n, budget)?;
    let locals: Vec<CensusReport> = (0..ring.t())
        .map(|i| census_by_enumeration(&ring.prime_power_ring(i)?, m, n, budget))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(full.entries.len());
    let mut first_violation = None;
    for e in &full.entries {
        let local_lengths: Vec<u64> = e
            .label
            .rows
            .iter()
            .zip(&locals)
            .map(|(row, census)| {
                census
                    .length_of(&InvariantFactorArray {
                        rows: vec![row.clone()],
                    })
                    .unwrap_or(0)
            })
            .collect();
        if local_lengths.iter().product::<u64>() != e.length && first_violation.is_none() {
            first_violation = Some(e.label.clone());
        }
        rows.push(ProductRow {
            label: e.label.clone(),
            length: e.length,
            local_lengths,
        });
    }
    Ok(OrbitProductReport {
        holds: first_violation.is_none(),
        rows,
        first_violation,
    })
}
