//! Brute-force oracles used to cross-check the main algorithms.
//!
//! Nothing here calls into `smith`, `graph` or `cliques`: invariant factors
//! come from integer minors, inner rank from exhaustive factorization search,
//! and graph optima from a separate sequential branch-and-bound.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{space_size, Mat};
use crate::ring::Ring;
use crate::smith::InvariantFactorArray;

/// Largest `min(m, n)` for which minors are enumerated.
pub const MINOR_BUDGET: usize = 4;

/// Exact integer determinant by Laplace expansion along the first row.
fn int_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * int_det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

fn big_valuation(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

/// Invariant-factor exponents from determinantal divisors.
///
/// For each prime `p^s` the canonical integer lift of `A` (taken `m <= n`,
/// transposing otherwise) is augmented to `B = [A | p^s I_m]`. The cokernel of
/// `B` over the integers localized at `p` is the cokernel of `A` over
/// Z_{p^s}, and `B` has full row rank, so the minimal valuation of its
/// `k x k` minors is exactly `alpha_1 + ... + alpha_k` with no truncation.
pub fn omega_via_minors(ring: &Ring, a: &Mat) -> Result<InvariantFactorArray> {
    if a.modulus() != ring.h() {
        return Err(Error::ModulusMismatch {
            expected: ring.h(),
            found: a.modulus(),
        });
    }
    let a = if a.rows() > a.cols() {
        a.transpose()
    } else {
        a.clone()
    };
    let (m, n) = (a.rows(), a.cols());
    if m > MINOR_BUDGET {
        return Err(Error::budget("minor enumeration size", m as u128, MINOR_BUDGET as u128));
    }
    let mut rows_out = Vec::with_capacity(ring.t());
    for pp in ring.components() {
        let q = BigInt::from(pp.q);
        let b: Vec<Vec<BigInt>> = (0..m)
            .map(|r| {
                (0..n)
                    .map(|c| BigInt::from(a.get(r, c)))
                    .chain((0..m).map(|c| if c == r { q.clone() } else { BigInt::zero() }))
                    .collect()
            })
            .collect();
        let mut prefix = Vec::with_capacity(m + 1);
        prefix.push(0u32);
        for k in 1..=m {
            let mut best: Option<u32> = None;
            for rs in (0..m).combinations(k) {
                for cs in (0..n + m).combinations(k) {
                    let sub: Vec<Vec<BigInt>> = rs
                        .iter()
                        .map(|&r| cs.iter().map(|&c| b[r][c].clone()).collect())
                        .collect();
                    let d = int_det(&sub);
                    if !d.is_zero() {
                        let v = big_valuation(&d, pp.p);
                        best = Some(best.map_or(v, |b: u32| b.min(v)));
                    }
                }
            }
            prefix.push(best.expect("[A | p^s I] has full row rank"));
        }
        rows_out.push(prefix.windows(2).map(|w| w[1] - w[0]).collect());
    }
    Ok(InvariantFactorArray { rows: rows_out })
}

/// Default cap on `h^{(m+n) r}` for the factorization search.
pub const FACTORIZATION_BUDGET: u128 = 1 << 24;

/// Least `r` with `A = B C`, `B` of size `m x r`, found by exhaustive search.
///
/// Ranks below `min(m, n)` are searched; if none works the answer is
/// `min(m, n)` (take `B = A`, `C = I` or the transpose).
pub fn inner_rank_by_factorization(a: &Mat, budget: u128) -> Result<usize> {
    if a.is_zero() {
        return Ok(0);
    }
    let h = a.modulus();
    let (m, n) = (a.rows(), a.cols());
    for r in 1..m.min(n) {
        let b_count = space_size(h, m, r);
        let c_count = space_size(h, r, n);
        let (Some(bc), Some(cc)) = (b_count, c_count) else {
            return Err(Error::budget("factorization search", u128::MAX, budget));
        };
        let needed = bc as u128 * cc as u128;
        if needed > budget {
            return Err(Error::budget("factorization search", needed, budget));
        }
        for bi in 0..bc {
            let b = Mat::from_index(h, m, r, bi);
            for ci in 0..cc {
                let c = Mat::from_index(h, r, n, ci);
                if b.mul(&c)? == *a {
                    return Ok(r);
                }
            }
        }
    }
    Ok(m.min(n))
}

/// Orbit of `A` under `(S, T) : A -> S A T`, by enumerating all of
/// `GL_m x GL_n`. Only usable for tiny rings.
pub fn orbit_by_group_action(a: &Mat, budget: u128) -> Result<BTreeSet<Mat>> {
    let h = a.modulus();
    let (m, n) = (a.rows(), a.cols());
    let gl = |k: usize| -> Result<Vec<Mat>> {
        let count = space_size(h, k, k)
            .ok_or_else(|| Error::budget("group enumeration", u128::MAX, budget))?;
        if count as u128 > budget {
            return Err(Error::budget("group enumeration", count as u128, budget));
        }
        let id = Mat::identity(h, k);
        let all: Vec<Mat> = (0..count).map(|i| Mat::from_index(h, k, k, i)).collect();
        // invertible iff some two-sided inverse exists among all matrices
        Ok(all
            .iter()
            .filter(|x| all.iter().any(|y| x.mul(y).unwrap() == id && y.mul(x).unwrap() == id))
            .cloned()
            .collect())
    };
    let left = gl(m)?;
    let right = gl(n)?;
    let mut orbit = BTreeSet::new();
    for s in &left {
        let sa = s.mul(a)?;
        for t in &right {
            orbit.insert(sa.mul(t)?);
        }
    }
    Ok(orbit)
}

/// Adjacency as explicit neighbor sets, kept separate from the packed
/// representation used by the main solver.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn from_fn(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
            }
        }
        SimpleGraph { adj }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.len(), |u, v| !self.adj[u].contains(&v))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .tuple_combinations()
            .all(|(&u, &v)| self.adj[u].contains(&v))
    }
}

/// Default vertex cap for the exact oracles.
pub const EXACT_VERTEX_BUDGET: usize = 256;

fn greedy_color_bound(g: &SimpleGraph, cand: &[usize]) -> usize {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in cand {
        match classes
            .iter_mut()
            .find(|cl| cl.iter().all(|u| !g.adj[v].contains(u)))
        {
            Some(cl) => cl.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes.len()
}

fn expand(g: &SimpleGraph, current: &mut Vec<usize>, cand: Vec<usize>, best: &mut Vec<usize>) {
    if cand.is_empty() {
        if current.len() > best.len() {
            *best = current.clone();
        }
        return;
    }
    if current.len() + greedy_color_bound(g, &cand) <= best.len() {
        return;
    }
    let mut cand = cand;
    while let Some(v) = cand.pop() {
        if current.len() + cand.len() < best.len() {
            return;
        }
        let next: Vec<usize> = cand.iter().copied().filter(|u| g.adj[v].contains(u)).collect();
        current.push(v);
        expand(g, current, next, best);
        current.pop();
    }
}

/// A maximum clique (sorted), by sequential branch and bound with a greedy
/// coloring bound.
pub fn exact_clique(g: &SimpleGraph, budget: usize) -> Result<Vec<usize>> {
    if g.len() > budget {
        return Err(Error::budget("exact clique search", g.len() as u128, budget as u128));
    }
    let mut best = Vec::new();
    expand(g, &mut Vec::new(), (0..g.len()).collect(), &mut best);
    best.sort_unstable();
    Ok(best)
}

/// A maximum independent set (sorted): a maximum clique of the complement.
pub fn exact_mis(g: &SimpleGraph, budget: usize) -> Result<Vec<usize>> {
    if g.len() > budget {
        return Err(Error::budget("exact independent set search", g.len() as u128, budget as u128));
    }
    exact_clique(&g.complement(), budget)
}
