//! Exact maximum-clique search on packed adjacency rows.
//!
//! Branch and bound with a greedy coloring bound. Vertices are relabeled so
//! that position 0 has the largest degree (ties by smaller index); all search
//! happens in position space.

use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

pub type AdjRows = Vec<FixedBitSet>;

/// Complement graph: `u ~ v` iff `u != v` and they are not adjacent.
pub fn complement(adj: &[FixedBitSet]) -> AdjRows {
    let n = adj.len();
    adj.iter()
        .enumerate()
        .map(|(v, row)| {
            let mut c = row.clone();
            c.toggle_range(..);
            c.set(v, false);
            debug_assert_eq!(c.len(), n);
            c
        })
        .collect()
}

struct Search {
    order: Vec<usize>,
    adj: AdjRows,
}

enum Mode<'a> {
    Maximum(&'a AtomicUsize),
    First { target: usize, found: Option<Vec<usize>> },
    All { target: usize, found: Vec<Vec<usize>> },
}

impl Search {
    fn new(adj: &[FixedBitSet]) -> Self {
        let n = adj.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(adj[v].count_ones(..)), v));
        let mut pos = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let padj = order
            .iter()
            .map(|&v| {
                let mut row = FixedBitSet::with_capacity(n);
                for u in adj[v].ones() {
                    row.insert(pos[u]);
                }
                row
            })
            .collect();
        Search { order, adj: padj }
    }

    fn full(&self) -> FixedBitSet {
        let mut p = FixedBitSet::with_capacity(self.adj.len());
        p.insert_range(..);
        p
    }

    /// Greedy sequential coloring; vertices come out by increasing color.
    fn color_sort(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut verts = Vec::with_capacity(p.count_ones(..));
        let mut colors = Vec::with_capacity(verts.capacity());
        let mut uncolored = p.clone();
        let mut k = 0;
        while !uncolored.is_clear() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = q.minimum() {
                q.set(v, false);
                q.difference_with(&self.adj[v]);
                uncolored.set(v, false);
                verts.push(v);
                colors.push(k);
            }
        }
        (verts, colors)
    }

    fn done(mode: &Mode) -> bool {
        matches!(mode, Mode::First { found: Some(_), .. })
    }

    fn expand(&self, c: &mut Vec<usize>, mut p: FixedBitSet, mode: &mut Mode) {
        let (verts, colors) = self.color_sort(&p);
        for k in (0..verts.len()).rev() {
            let bound = c.len() + colors[k];
            let prune = match mode {
                Mode::Maximum(best) => bound <= best.load(Ordering::Relaxed),
                Mode::First { target, .. } | Mode::All { target, .. } => bound < *target,
            };
            if prune {
                return;
            }
            let v = verts[k];
            c.push(v);
            self.visit(c, &p, v, mode);
            c.pop();
            if Self::done(mode) {
                return;
            }
            p.set(v, false);
        }
    }

    fn visit(&self, c: &mut Vec<usize>, p: &FixedBitSet, v: usize, mode: &mut Mode) {
        let target_hit = match mode {
            Mode::First { target, found } if c.len() == *target => {
                *found = Some(c.clone());
                true
            }
            Mode::All { target, found } if c.len() == *target => {
                found.push(c.clone());
                true
            }
            _ => false,
        };
        if target_hit {
            return;
        }
        let mut np = p.clone();
        np.intersect_with(&self.adj[v]);
        if np.is_clear() {
            if let Mode::Maximum(best) = mode {
                best.fetch_max(c.len(), Ordering::Relaxed);
            }
        } else {
            self.expand(c, np, mode);
        }
    }

    /// Candidate set for the root at color-sorted position `k`.
    fn root_candidates(&self, verts: &[usize], k: usize) -> FixedBitSet {
        let mut p = FixedBitSet::with_capacity(self.adj.len());
        for &u in &verts[..k] {
            p.insert(u);
        }
        p.intersect_with(&self.adj[verts[k]]);
        p
    }

    fn to_vertices(&self, c: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = c.iter().map(|&k| self.order[k]).collect();
        out.sort_unstable();
        out
    }
}

/// Size of a maximum clique; root branches are searched in parallel.
pub fn clique_number(adj: &[FixedBitSet]) -> usize {
    if adj.is_empty() {
        return 0;
    }
    let search = Search::new(adj);
    let (verts, colors) = search.color_sort(&search.full());
    let best = AtomicUsize::new(0);
    (0..verts.len()).into_par_iter().rev().for_each(|k| {
        if colors[k] <= best.load(Ordering::Relaxed) {
            return;
        }
        let p = search.root_candidates(&verts, k);
        let mut c = vec![verts[k]];
        let mut mode = Mode::Maximum(&best);
        search.visit(&mut c, &p, verts[k], &mut mode);
    });
    best.into_inner()
}

/// First clique of size `target` in the deterministic search order, sorted.
pub fn find_clique(adj: &[FixedBitSet], target: usize) -> Option<Vec<usize>> {
    if target == 0 {
        return Some(Vec::new());
    }
    let search = Search::new(adj);
    let mut mode = Mode::First {
        target,
        found: None,
    };
    search.expand(&mut Vec::new(), search.full(), &mut mode);
    match mode {
        Mode::First { found, .. } => found.map(|c| search.to_vertices(&c)),
        _ => unreachable!(),
    }
}

/// A maximum clique, sorted. The size is found in parallel, the witness by a
/// sequential search so the result does not depend on scheduling.
pub fn max_clique(adj: &[FixedBitSet]) -> Vec<usize> {
    let omega = clique_number(adj);
    find_clique(adj, omega).expect("a clique of the computed size exists")
}

/// Every clique with exactly `target` vertices, each sorted, in search order.
/// A vertex is dropped from the candidates once its branch is done, so each
/// clique is reached along exactly one path.
pub fn cliques_of_size(adj: &[FixedBitSet], target: usize) -> Vec<Vec<usize>> {
    if target == 0 || adj.is_empty() {
        return Vec::new();
    }
    let search = Search::new(adj);
    let (verts, colors) = search.color_sort(&search.full());
    let per_root: Vec<Vec<Vec<usize>>> = (0..verts.len())
        .into_par_iter()
        .rev()
        .map(|k| {
            if colors[k] < target {
                return Vec::new();
            }
            let p = search.root_candidates(&verts, k);
            let mut mode = Mode::All {
                target,
                found: Vec::new(),
            };
            search.visit(&mut vec![verts[k]], &p, verts[k], &mut mode);
            match mode {
                Mode::All { found, .. } => found,
                _ => unreachable!(),
            }
        })
        .collect();
    per_root
        .into_iter()
        .flatten()
        .map(|c| search.to_vertices(&c))
        .collect()
}

/// Builds adjacency rows from a symmetric predicate.
pub fn rows_from_fn(n: usize, adjacent: impl Fn(usize, usize) -> bool + Sync) -> AdjRows {
    (0..n)
        .into_par_iter()
        .map(|u| {
            let mut row = FixedBitSet::with_capacity(n);
            for v in 0..n {
                if v != u && adjacent(u, v) {
                    row.insert(v);
                }
            }
            row
        })
        .collect()
}
