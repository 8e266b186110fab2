//! The bilinear forms graph Bil_r(Z_h^{m x n}).
//!
//! Vertices are the matrices of Z_h^{m x n}, identified with their row-major
//! base-h index. `A ~ B` iff `A != B` and `rho(A - B) <= r`, so the graph is
//! the Cayley graph of the additive group with connection set the nonzero
//! matrices of inner rank at most `r`. A [`RankTable`] stores `rho` of every
//! matrix, after which adjacency is a table lookup on the index of `A - B`.

pub mod clique;

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{random_invertible_with, random_matrix, seeded_rng, space_size, Mat};
use crate::ring::Ring;
use crate::smith::inner_rank;

pub use clique::AdjRows;

/// Default cap on materialized adjacency.
pub const VERTEX_BUDGET: u64 = 10_000;
/// Default cap for exact clique and independence numbers.
pub const EXACT_BUDGET: u64 = 256;
/// Default cap on the size of a rank table.
pub const TABLE_BUDGET: u64 = 10_000_000;

/// Parameters of Bil_r(Z_h^{m x n}) with `1 <= r <= m <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    ring: Ring,
    m: usize,
    n: usize,
    r: usize,
}

impl GraphSpec {
    pub fn new(ring: Ring, m: usize, n: usize, r: usize) -> Result<Self> {
        if !(1 <= r && r <= m && m <= n) {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= r <= m <= n, got m={m} n={n} r={r}"
            )));
        }
        Ok(GraphSpec { ring, m, n, r })
    }

    pub fn from_h(h: u64, m: usize, n: usize, r: usize) -> Result<Self> {
        Self::new(Ring::new(h)?, m, n, r)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn h(&self) -> u64 {
        self.ring.h()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `h^{mn}`, or `None` on overflow.
    pub fn vertex_count(&self) -> Option<u64> {
        space_size(self.h(), self.m, self.n)
    }

    pub fn vertex(&self, index: u64) -> Mat {
        Mat::from_index(self.h(), self.m, self.n, index)
    }

    /// `h^{nr}`, the clique number.
    pub fn clique_size(&self) -> Option<u64> {
        space_size(self.h(), self.n, self.r)
    }

    /// `h^{n(m-r)}`, the independence number.
    pub fn independent_size(&self) -> Option<u64> {
        space_size(self.h(), self.n, self.m - self.r)
    }

    pub(crate) fn check_shape(&self, a: &Mat) -> Result<()> {
        if a.modulus() != self.h() {
            return Err(Error::ModulusMismatch {
                expected: self.h(),
                found: a.modulus(),
            });
        }
        if (a.rows(), a.cols()) != (self.m, self.n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{}, found {}x{}",
                self.m,
                self.n,
                a.rows(),
                a.cols()
            )));
        }
        Ok(())
    }

    /// `A != B` and `rho(A - B) <= r`.
    pub fn adjacent(&self, a: &Mat, b: &Mat) -> Result<bool> {
        self.check_shape(a)?;
        self.check_shape(b)?;
        if a == b {
            return Ok(false);
        }
        Ok(inner_rank(&self.ring, &a.sub(b)?)? <= self.r)
    }

    fn budgeted_count(&self, what: &'static str, budget: u64) -> Result<u64> {
        match self.vertex_count() {
            Some(v) if v <= budget => Ok(v),
            Some(v) => Err(Error::budget(what, v as u128, budget as u128)),
            None => Err(Error::budget(what, u128::MAX, budget as u128)),
        }
    }
}

/// Digit-wise arithmetic on vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexArith {
    h: u64,
    digits: usize,
}

impl IndexArith {
    pub fn new(h: u64, digits: usize) -> Self {
        IndexArith { h, digits }
    }

    fn combine(&self, mut u: u64, mut v: u64, f: impl Fn(u64, u64) -> u64) -> u64 {
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.digits {
            out += f(u % self.h, v % self.h) * place;
            place = place.wrapping_mul(self.h);
            u /= self.h;
            v /= self.h;
        }
        out
    }

    pub fn add(&self, u: u64, v: u64) -> u64 {
        let h = self.h;
        self.combine(u, v, |a, b| (a + b) % h)
    }

    pub fn sub(&self, u: u64, v: u64) -> u64 {
        let h = self.h;
        self.combine(u, v, |a, b| (a + h - b) % h)
    }
}

/// `rho` of every matrix in Z_h^{m x n}, indexed by vertex id.
#[derive(Debug, Clone)]
pub struct RankTable {
    spec: GraphSpec,
    ranks: Vec<u8>,
    arith: IndexArith,
}

impl RankTable {
    pub fn new(spec: &GraphSpec, budget: u64) -> Result<Self> {
        let count = spec.budgeted_count("rank table size", budget)?;
        let ranks = (0..count)
            .into_par_iter()
            .map(|i| inner_rank(&spec.ring, &spec.vertex(i)).map(|r| r as u8))
            .collect::<Result<_>>()?;
        Ok(RankTable {
            spec: spec.clone(),
            ranks,
            arith: IndexArith::new(spec.h(), spec.m * spec.n),
        })
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn rank(&self, index: u64) -> usize {
        self.ranks[index as usize] as usize
    }

    pub fn arith(&self) -> IndexArith {
        self.arith
    }

    pub fn adjacent(&self, u: u64, v: u64) -> bool {
        u != v && self.rank(self.arith.sub(u, v)) <= self.spec.r
    }

    /// Nonzero matrices of rank at most `r`, as indices.
    pub fn connection_set(&self) -> Vec<u64> {
        (1..self.ranks.len() as u64)
            .filter(|&i| self.rank(i) <= self.spec.r)
            .collect()
    }
}

/// Materialized Bil_r with packed adjacency rows.
#[derive(Debug, Clone)]
pub struct BilGraph {
    table: RankTable,
    rows: AdjRows,
}

impl BilGraph {
    pub fn table(&self) -> &RankTable {
        &self.table
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.table.spec
    }

    pub fn rows(&self) -> &[FixedBitSet] {
        &self.rows
    }

    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones(..)
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degree(0);
        (0..self.vertex_count()).all(|v| self.degree(v) == d)
    }

    pub fn complement_rows(&self) -> AdjRows {
        clique::complement(&self.rows)
    }
}

/// Adjacency as returned by [`build_graph`]: packed rows within the vertex
/// budget, rank computations on demand above it.
#[derive(Debug, Clone)]
pub enum Adjacency {
    Materialized(Box<BilGraph>),
    OnDemand(GraphSpec),
}

impl Adjacency {
    pub fn adjacent(&self, a: &Mat, b: &Mat) -> Result<bool> {
        match self {
            Adjacency::Materialized(g) => {
                g.spec().check_shape(a)?;
                g.spec().check_shape(b)?;
                let (u, v) = (a.index().unwrap(), b.index().unwrap());
                Ok(g.rows[u as usize].contains(v as usize))
            }
            Adjacency::OnDemand(spec) => spec.adjacent(a, b),
        }
    }
}

pub fn build_graph(spec: &GraphSpec, budget: u64) -> Result<Adjacency> {
    match materialize(spec, budget) {
        Ok(g) => Ok(Adjacency::Materialized(Box::new(g))),
        Err(Error::BudgetExceeded { .. }) => Ok(Adjacency::OnDemand(spec.clone())),
        Err(e) => Err(e),
    }
}

/// Packed adjacency rows; errors when `h^{mn}` exceeds `budget`.
pub fn materialize(spec: &GraphSpec, budget: u64) -> Result<BilGraph> {
    let count = spec.budgeted_count("materialized vertices", budget)?;
    let table = RankTable::new(spec, budget)?;
    let arith = table.arith();
    let conn = table.connection_set();
    let rows = (0..count)
        .into_par_iter()
        .map(|u| {
            let mut row = FixedBitSet::with_capacity(count as usize);
            for &g in &conn {
                row.insert(arith.add(u, g) as usize);
            }
            row
        })
        .collect();
    Ok(BilGraph { table, rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactNumbers {
    pub omega: usize,
    pub alpha: usize,
    pub max_clique: Vec<u64>,
    pub max_independent_set: Vec<u64>,
}

fn exact_graph(spec: &GraphSpec, budget: u64) -> Result<BilGraph> {
    spec.budgeted_count("exact search vertices", budget)?;
    materialize(spec, budget)
}

/// A maximum clique, as vertex indices.
pub fn exact_max_clique(spec: &GraphSpec, budget: u64) -> Result<Vec<u64>> {
    let g = exact_graph(spec, budget)?;
    Ok(clique::max_clique(&g.rows).into_iter().map(|v| v as u64).collect())
}

pub fn exact_clique_number(spec: &GraphSpec, budget: u64) -> Result<usize> {
    let g = exact_graph(spec, budget)?;
    Ok(clique::clique_number(&g.rows))
}

pub fn exact_independence_number(spec: &GraphSpec, budget: u64) -> Result<usize> {
    let g = exact_graph(spec, budget)?;
    Ok(clique::clique_number(&g.complement_rows()))
}

/// Both numbers with witnesses.
pub fn exact_numbers(spec: &GraphSpec, budget: u64) -> Result<ExactNumbers> {
    let g = exact_graph(spec, budget)?;
    let to_ids = |c: Vec<usize>| c.into_iter().map(|v| v as u64).collect::<Vec<_>>();
    let max_clique = to_ids(clique::max_clique(&g.rows));
    let max_independent_set = to_ids(clique::max_clique(&g.complement_rows()));
    Ok(ExactNumbers {
        omega: max_clique.len(),
        alpha: max_independent_set.len(),
        max_clique,
        max_independent_set,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    pub samples: usize,
    pub adjacent_pairs: usize,
    pub nonadjacent_pairs: usize,
    pub automorphisms_ok: bool,
    pub translations_ok: bool,
}

impl TransitivityReport {
    pub fn holds(&self) -> bool {
        self.automorphisms_ok && self.translations_ok
    }
}

/// Samples maps `X -> S^{-1} X T + A` and checks that adjacency and
/// non-adjacency are preserved on sampled pairs, half of which are built to be
/// adjacent. Also checks that `X -> X + (B - A)` sends `A` to `B`.
pub fn check_vertex_transitivity(spec: &GraphSpec, samples: usize, seed: u64) -> Result<TransitivityReport> {
    let ring = &spec.ring;
    let mut rng = seeded_rng(seed);
    let (mut adjacent_pairs, mut nonadjacent_pairs) = (0, 0);
    let mut automorphisms_ok = true;
    let mut translations_ok = true;
    for k in 0..samples {
        let s = random_invertible_with(ring, spec.m, &mut rng);
        let s_inv = crate::matrix::inverse(ring, &s)?.expect("sampled invertible");
        let t = random_invertible_with(ring, spec.n, &mut rng);
        let shift = random_matrix(ring, spec.m, spec.n, &mut rng);
        let x = random_matrix(ring, spec.m, spec.n, &mut rng);
        let y = if k % 2 == 0 {
            // x plus a product of an m x r and an r x n matrix
            let b = random_matrix(ring, spec.m, spec.r, &mut rng);
            let c = random_matrix(ring, spec.r, spec.n, &mut rng);
            x.add(&b.mul(&c)?)?
        } else {
            random_matrix(ring, spec.m, spec.n, &mut rng)
        };
        let image = |z: &Mat| -> Result<Mat> { s_inv.mul(z)?.mul(&t)?.add(&shift) };
        let before = spec.adjacent(&x, &y)?;
        let after = spec.adjacent(&image(&x)?, &image(&y)?)?;
        if before {
            adjacent_pairs += 1;
        } else {
            nonadjacent_pairs += 1;
        }
        automorphisms_ok &= before == after;

        let a = random_matrix(ring, spec.m, spec.n, &mut rng);
        let b = random_matrix(ring, spec.m, spec.n, &mut rng);
        let delta = b.sub(&a)?;
        translations_ok &= a.add(&delta)? == b
            && spec.adjacent(&x.add(&delta)?, &y.add(&delta)?)? == before;
    }
    Ok(TransitivityReport {
        samples,
        adjacent_pairs,
        nonadjacent_pairs,
        automorphisms_ok,
        translations_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub vertices: u64,
    pub reached: u64,
    pub connected: bool,
}

/// Breadth-first search from the zero matrix along the connection set.
pub fn check_connectivity(spec: &GraphSpec, budget: u64) -> Result<ConnectivityReport> {
    let table = RankTable::new(spec, budget)?;
    let arith = table.arith();
    let conn = table.connection_set();
    let count = table.len();
    let mut seen = FixedBitSet::with_capacity(count);
    let mut queue = VecDeque::from([0u64]);
    seen.insert(0);
    while let Some(u) = queue.pop_front() {
        for &g in &conn {
            let v = arith.add(u, g);
            if !seen.put(v as usize) {
                queue.push_back(v);
            }
        }
    }
    let reached = seen.count_ones(..) as u64;
    Ok(ConnectivityReport {
        vertices: count as u64,
        reached,
        connected: reached == count as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub vertices: u64,
    pub alpha: u64,
    pub omega: u64,
    /// `ceil(|V| / alpha)`, a lower bound for the chromatic number.
    pub chi_lower_bound: u64,
    pub holds: bool,
    pub equality: bool,
}

/// `chi >= |V| / alpha >= omega` from given values of `alpha` and `omega`.
pub fn sandwich_inequality(vertices: u64, alpha: u64, omega: u64) -> Result<SandwichReport> {
    if alpha == 0 || omega == 0 {
        return Err(Error::InvalidParameters("alpha and omega must be positive".into()));
    }
    let chi_lower_bound = vertices.div_ceil(alpha);
    Ok(SandwichReport {
        vertices,
        alpha,
        omega,
        chi_lower_bound,
        holds: vertices as u128 >= alpha as u128 * omega as u128,
        equality: vertices as u128 == alpha as u128 * omega as u128,
    })
}

/// Sandwich report with the values `h^{n(m-r)}` and `h^{nr}`.
pub fn sandwich_for(spec: &GraphSpec) -> Result<SandwichReport> {
    let overflow = || Error::budget("vertex count", u128::MAX, u64::MAX as u128);
    sandwich_inequality(
        spec.vertex_count().ok_or_else(overflow)?,
        spec.independent_size().ok_or_else(overflow)?,
        spec.clique_size().ok_or_else(overflow)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{exact_clique, exact_mis, SimpleGraph};

    fn spec(h: u64, m: usize, n: usize, r: usize) -> GraphSpec {
        GraphSpec::from_h(h, m, n, r).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GraphSpec::from_h(6, 2, 2, 0).is_err());
        assert!(GraphSpec::from_h(6, 3, 2, 1).is_err());
        assert!(GraphSpec::from_h(6, 2, 2, 3).is_err());
        assert!(GraphSpec::from_h(1, 2, 2, 1).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let s = spec(6, 2, 2, 1);
        let a = Mat::from_rows(6, &[[3, 1], [0, 5]]).unwrap();
        assert!(!s.adjacent(&a, &a).unwrap());
        let b = a.sub(&Mat::diag(6, 2, 2, &[2, 3])).unwrap();
        assert!(s.adjacent(&a, &b).unwrap());
        let c = a.sub(&Mat::identity(6, 2)).unwrap();
        assert!(!s.adjacent(&a, &c).unwrap());
        assert!(s.adjacent(&a, &Mat::zeros(6, 3, 2)).is_err());
    }

    #[test]
    fn index_arithmetic_matches_matrices() {
        let arith = IndexArith::new(6, 4);
        for (u, v) in [(0u64, 0u64), (5, 7), (1295, 1), (100, 900), (777, 777)] {
            let (a, b) = (Mat::from_index(6, 2, 2, u), Mat::from_index(6, 2, 2, v));
            assert_eq!(arith.add(u, v), a.add(&b).unwrap().index().unwrap());
            assert_eq!(arith.sub(u, v), a.sub(&b).unwrap().index().unwrap());
        }
    }

    #[test]
    fn graph_structure() {
        let g = materialize(&spec(2, 2, 2, 1), VERTEX_BUDGET).unwrap();
        assert_eq!(g.vertex_count(), 16);
        // 16 matrices, 6 invertible, one zero
        assert_eq!(g.degree(0), 9);
        assert!(g.is_regular());

        let g = materialize(&spec(3, 2, 2, 1), VERTEX_BUDGET).unwrap();
        assert_eq!(g.vertex_count(), 81);
        assert!(g.is_regular());

        let g = materialize(&spec(3, 2, 2, 2), VERTEX_BUDGET).unwrap();
        assert_eq!(g.degree(5), 80);

        assert!(matches!(
            build_graph(&spec(6, 2, 3, 1), VERTEX_BUDGET).unwrap(),
            Adjacency::OnDemand(_)
        ));
    }

    #[test]
    fn adjacency_is_symmetric_irreflexive_and_regular() {
        for (h, m, n, r) in [(2, 2, 2, 1), (4, 2, 2, 1), (6, 2, 2, 1), (2, 2, 3, 1), (12, 1, 2, 1)] {
            let s = spec(h, m, n, r);
            let g = materialize(&s, VERTEX_BUDGET).unwrap();
            for u in 0..g.vertex_count() {
                assert!(!g.rows()[u].contains(u));
                for v in g.rows()[u].ones() {
                    assert!(g.rows()[v].contains(u));
                }
            }
            assert!(g.is_regular());
            // spot-check against direct rank computations
            for u in (0..g.vertex_count()).step_by(37) {
                for v in (0..g.vertex_count()).step_by(11) {
                    let direct = s.adjacent(&s.vertex(u as u64), &s.vertex(v as u64)).unwrap();
                    assert_eq!(g.rows()[u].contains(v), direct);
                }
            }
        }
    }

    #[test]
    fn exact_numbers_match_formulas_and_oracle() {
        for (h, r) in [(2u64, 1usize), (3, 1), (2, 2)] {
            let s = spec(h, 2, 2, r);
            let ex = exact_numbers(&s, EXACT_BUDGET).unwrap();
            assert_eq!(ex.omega as u64, s.clique_size().unwrap());
            assert_eq!(ex.alpha as u64, s.independent_size().unwrap());
            let g = materialize(&s, VERTEX_BUDGET).unwrap();
            let simple = SimpleGraph::from_fn(g.vertex_count(), |u, v| g.rows()[u].contains(v));
            assert_eq!(exact_clique(&simple, 256).unwrap().len(), ex.omega);
            assert_eq!(exact_mis(&simple, 256).unwrap().len(), ex.alpha);
            for (i, &u) in ex.max_clique.iter().enumerate() {
                for &v in &ex.max_clique[i + 1..] {
                    assert!(g.table().adjacent(u, v));
                }
            }
        }
        assert!(exact_numbers(&spec(6, 2, 2, 1), EXACT_BUDGET).is_err());
    }

    #[test]
    fn connectivity() {
        for (h, r) in [(2u64, 1usize), (6, 1), (2, 2), (4, 1)] {
            let rep = check_connectivity(&spec(h, 2, 2, r), TABLE_BUDGET).unwrap();
            assert!(rep.connected, "h={h} r={r}");
            assert_eq!(rep.vertices, h.pow(4));
        }
    }

    #[test]
    fn transitivity_samples() {
        for h in [6u64, 12] {
            let rep = check_vertex_transitivity(&spec(h, 2, 2, 1), 300, 1).unwrap();
            assert!(rep.holds());
            assert!(rep.adjacent_pairs > 100 && rep.nonadjacent_pairs > 50);
        }
        let rep = check_vertex_transitivity(&spec(4, 2, 3, 1), 100, 2).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn sandwich_examples() {
        let r = sandwich_for(&spec(2, 2, 2, 1)).unwrap();
        assert_eq!((r.chi_lower_bound, r.omega), (4, 4));
        assert!(r.holds && r.equality);
        let r = sandwich_for(&spec(6, 2, 2, 1)).unwrap();
        assert_eq!(r.chi_lower_bound, 36);
        let r = sandwich_for(&spec(3, 2, 2, 2)).unwrap();
        assert_eq!((r.alpha, r.omega, r.chi_lower_bound), (1, 81, 81));
        assert!(!sandwich_inequality(10, 3, 4).unwrap().holds);
    }
}
