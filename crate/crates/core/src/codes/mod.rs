//! Rank-distance codes over Z_h and the colorings built from them.
//!
//! Over a prime field the code is a Gabidulin code. Over Z_{p^s} it is the
//! module spanned by the integer lifts of a Gabidulin basis, and over Z_h the
//! CRT product of one such code per prime. None of these distances is taken
//! on trust: every constructor runs [`verify_distance`] before returning.

pub mod field;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cliques::build_canonical_clique;
use crate::error::{Error, Result};
use crate::graph::{GraphSpec, RankTable};
use crate::matrix::{crt_lift_mat, Mat};
use crate::ring::Ring;
use crate::smith::inner_rank;

pub use field::FieldSpec;

/// Default cap on pairs (or nonzero members, for linear codes) checked by
/// [`verify_distance`].
pub const PAIR_BUDGET: u64 = 100_000;
/// Default cap on the size of a code spanned from a basis.
pub const SPAN_BUDGET: u64 = 1_000_000;

/// A set of `m x n` matrices over Z_h with a claimed minimum rank distance.
/// Linear codes keep a generating set; `members` is then the subgroup it
/// generates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCode {
    pub h: u64,
    pub m: usize,
    pub n: usize,
    pub basis: Option<Vec<Mat>>,
    /// Sorted.
    pub members: Vec<Mat>,
    pub claimed_min_distance: usize,
    pub linear: bool,
}

impl RankCode {
    /// A code given by explicit members.
    pub fn from_members(h: u64, m: usize, n: usize, members: Vec<Mat>, claimed: usize) -> Result<Self> {
        for x in &members {
            if (x.modulus(), x.rows(), x.cols()) != (h, m, n) {
                return Err(Error::DimensionMismatch(format!(
                    "member is {}x{} over Z_{}, expected {m}x{n} over Z_{h}",
                    x.rows(),
                    x.cols(),
                    x.modulus()
                )));
            }
        }
        Ok(RankCode {
            h,
            m,
            n,
            basis: None,
            members: crate::cliques::normalize_family(members),
            claimed_min_distance: claimed,
            linear: false,
        })
    }

    /// The additive subgroup generated by `basis`.
    pub fn from_basis(h: u64, m: usize, n: usize, basis: Vec<Mat>, claimed: usize, budget: u64) -> Result<Self> {
        let members = span(h, m, n, &basis, budget)?;
        Ok(RankCode {
            h,
            m,
            n,
            basis: Some(basis),
            members,
            claimed_min_distance: claimed,
            linear: true,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.members.binary_search(x).is_ok()
    }
}

/// Closure of `{0}` under adding generators, sorted.
fn span(h: u64, m: usize, n: usize, basis: &[Mat], budget: u64) -> Result<Vec<Mat>> {
    let zero = Mat::zeros(h, m, n);
    for b in basis {
        if (b.modulus(), b.rows(), b.cols()) != (h, m, n) {
            return Err(Error::DimensionMismatch("basis element has the wrong shape".into()));
        }
    }
    let mut seen: HashSet<Mat> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for b in basis {
            let y = x.add(b)?;
            if seen.insert(y.clone()) {
                if seen.len() as u64 > budget {
                    return Err(Error::budget("code span size", seen.len() as u128, budget as u128));
                }
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<Mat> = seen.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Gabidulin code over F_p with `m <= n = field.n` rows and minimum distance
/// `d`: the F_p-expansions of `(f(1), f(x), ..., f(x^{m-1}))` for linearized
/// `f = sum_{l < m-d+1} f_l z^{p^l}`.
pub fn gabidulin_code(field: &FieldSpec, m: usize, d: usize) -> Result<RankCode> {
    let n = field.n;
    if !(1 <= d && d <= m && m <= n) {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= d <= m <= n, got d={d} m={m} n={n}"
        )));
    }
    let k = m - d + 1;
    let points: Vec<Vec<u64>> = (0..m).map(|j| field.x_pow(j)).collect();
    let mut basis = Vec::with_capacity(n * k);
    for l in 0..k {
        let images: Vec<Vec<u64>> = points.iter().map(|g| field.frobenius(g, l)).collect();
        for e in 0..n {
            let beta = field.x_pow(e);
            let rows: Vec<Vec<u64>> = images.iter().map(|y| field.mul(&beta, y)).collect();
            basis.push(Mat::from_rows(field.p, &rows)?);
        }
    }
    let code = RankCode::from_basis(field.p, m, n, basis, d, SPAN_BUDGET)?;
    gate(&Ring::new(field.p)?, code)
}

/// Z_{p^s}-span of the integer lifts of a linear code over Z_p.
pub fn lift_code(code: &RankCode, s: u32) -> Result<RankCode> {
    let basis = code.basis.as_ref().filter(|_| code.linear).ok_or_else(|| {
        Error::InvalidParameters("only linear codes can be lifted".into())
    })?;
    if s == 0 {
        return Err(Error::InvalidParameters("s must be positive".into()));
    }
    let q = code
        .h
        .checked_pow(s)
        .ok_or_else(|| Error::InvalidParameters("p^s overflows".into()))?;
    let ring = Ring::new(q)?;
    if ring.t() != 1 {
        return Err(Error::InvalidParameters(format!("{} is not a prime", code.h)));
    }
    let lifted: Vec<Mat> = basis.iter().map(|b| b.lift_to(q)).collect();
    let out = RankCode::from_basis(q, code.m, code.n, lifted, code.claimed_min_distance, SPAN_BUDGET)?;
    gate(&ring, out)
}

/// CRT product of one code per prime-power component of `ring`.
pub fn crt_combine(ring: &Ring, codes: &[RankCode]) -> Result<RankCode> {
    if codes.len() != ring.t() {
        return Err(Error::InvalidParameters(format!(
            "{} codes for {} components",
            codes.len(),
            ring.t()
        )));
    }
    let (m, n, d) = (codes[0].m, codes[0].n, codes[0].claimed_min_distance);
    for (c, pp) in codes.iter().zip(ring.components()) {
        if (c.m, c.n, c.claimed_min_distance) != (m, n, d) {
            return Err(Error::InvalidParameters("codes differ in m, n or d".into()));
        }
        if c.h != pp.q {
            return Err(Error::ModulusMismatch {
                expected: pp.q,
                found: c.h,
            });
        }
    }
    let size: u64 = codes.iter().map(|c| c.len() as u64).product();
    if size > SPAN_BUDGET {
        return Err(Error::budget("code size", size as u128, SPAN_BUDGET as u128));
    }
    let zeros: Vec<Mat> = ring.components().iter().map(|pp| Mat::zeros(pp.q, m, n)).collect();
    let embed = |i: usize, x: &Mat| {
        let mut parts = zeros.clone();
        parts[i] = x.clone();
        crt_lift_mat(ring, &parts)
    };
    let linear = codes.iter().all(|c| c.linear && c.basis.is_some());
    let out = if linear {
        let mut basis = Vec::new();
        for (i, c) in codes.iter().enumerate() {
            for b in c.basis.as_ref().unwrap() {
                basis.push(embed(i, b)?);
            }
        }
        RankCode::from_basis(ring.h(), m, n, basis, d, SPAN_BUDGET)?
    } else {
        let mut members = vec![Mat::zeros(ring.h(), m, n)];
        for (i, c) in codes.iter().enumerate() {
            let mut next = Vec::with_capacity(members.len() * c.len());
            for x in &members {
                for y in &c.members {
                    next.push(x.add(&embed(i, y)?)?);
                }
            }
            members = next;
        }
        RankCode::from_members(ring.h(), m, n, members, d)?
    };
    gate(ring, out)
}

/// Checks that `members` is exactly the subgroup generated by `basis`.
fn check_linear(code: &RankCode) -> Result<()> {
    let basis = code
        .basis
        .as_ref()
        .ok_or_else(|| Error::VerificationFailed("linear code without a basis".into()))?;
    let zero = Mat::zeros(code.h, code.m, code.n);
    let closed = code.contains(&zero)
        && code
            .members
            .par_iter()
            .all(|x| basis.iter().all(|b| x.add(b).map(|y| code.contains(&y)).unwrap_or(false)));
    if !closed {
        return Err(Error::VerificationFailed(
            "members are not closed under adding basis elements".into(),
        ));
    }
    Ok(())
}

/// Exact minimum of `rho(A - B)` over distinct members; `None` when there
/// are no pairs. For linear codes the minimum is taken over nonzero members
/// after checking additive closure.
pub fn verify_distance(ring: &Ring, code: &RankCode, budget: u64) -> Result<Option<usize>> {
    if ring.h() != code.h {
        return Err(Error::ModulusMismatch {
            expected: ring.h(),
            found: code.h,
        });
    }
    let len = code.members.len() as u64;
    if code.linear {
        if len > budget {
            return Err(Error::budget("members to check", len as u128, budget as u128));
        }
        check_linear(code)?;
        let min = code
            .members
            .par_iter()
            .filter(|x| !x.is_zero())
            .map(|x| inner_rank(ring, x))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min();
        return Ok(min);
    }
    let pairs = len * len.saturating_sub(1) / 2;
    if pairs > budget {
        return Err(Error::budget("pairs to check", pairs as u128, budget as u128));
    }
    let members = &code.members;
    let per_row = (0..members.len())
        .into_par_iter()
        .map(|i| {
            members[i + 1..]
                .iter()
                .map(|b| inner_rank(ring, &members[i].sub(b)?))
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().min())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_row.into_iter().flatten().min())
}

/// Emits a code only if its verified distance meets the claim.
fn gate(ring: &Ring, code: RankCode) -> Result<RankCode> {
    match verify_distance(ring, &code, PAIR_BUDGET)? {
        Some(d) if d < code.claimed_min_distance => Err(Error::VerificationFailed(format!(
            "minimum distance {d} below the claimed {}",
            code.claimed_min_distance
        ))),
        _ => Ok(code),
    }
}

/// A linear code of distance `r + 1` and size `h^{n(m-r)}`, i.e. a largest
/// independent set of Bil_r. For `r = m` this is `{0}`.
pub fn independent_set_from_code(spec: &GraphSpec) -> Result<RankCode> {
    let ring = spec.ring();
    let (m, n, r) = (spec.m(), spec.n(), spec.r());
    if r == m {
        return RankCode::from_basis(ring.h(), m, n, Vec::new(), r + 1, 1);
    }
    let codes = ring
        .components()
        .iter()
        .map(|pp| {
            let field = FieldSpec::least_irreducible(pp.p, n)?;
            lift_code(&gabidulin_code(&field, m, r + 1)?, pp.s)
        })
        .collect::<Result<Vec<_>>>()?;
    let code = crt_combine(ring, &codes)?;
    let expected = spec.independent_size();
    if Some(code.len() as u64) != expected {
        return Err(Error::VerificationFailed(format!(
            "code has {} members, expected {expected:?}",
            code.len()
        )));
    }
    Ok(code)
}

fn code_indices(code: &RankCode) -> Vec<u64> {
    code.members.iter().map(|x| x.index().expect("within vertex budget")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    /// Color of each vertex, by vertex index.
    pub colors: Vec<u32>,
    pub color_count: usize,
    pub edges_checked: u64,
    pub proper: bool,
}

/// Colors each vertex by its coset of the code from
/// [`independent_set_from_code`], then checks every edge.
pub fn color_graph(spec: &GraphSpec, budget: u64) -> Result<Coloring> {
    let table = RankTable::new(spec, budget)?;
    let code = independent_set_from_code(spec)?;
    let offsets = code_indices(&code);
    let arith = table.arith();
    let count = table.len();
    let mut colors = vec![u32::MAX; count];
    let mut next = 0u32;
    for v in 0..count as u64 {
        if colors[v as usize] == u32::MAX {
            for &c in &offsets {
                colors[arith.add(v, c) as usize] = next;
            }
            next += 1;
        }
    }
    let conn = table.connection_set();
    let proper = (0..count as u64).into_par_iter().all(|u| {
        conn.iter()
            .all(|&g| colors[u as usize] != colors[arith.add(u, g) as usize])
    });
    Ok(Coloring {
        colors,
        color_count: next as usize,
        edges_checked: count as u64 * conn.len() as u64 / 2,
        proper,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueCover {
    /// Vertex indices of each part, sorted.
    pub parts: Vec<Vec<u64>>,
    pub disjoint: bool,
    pub covers: bool,
    pub parts_are_cliques: bool,
}

impl CliqueCover {
    pub fn holds(&self) -> bool {
        self.disjoint && self.covers && self.parts_are_cliques
    }
}

/// Translates `S_i + C_r(0)` over the code members `S_i`; a partition of the
/// vertices into maximum cliques and so a proper coloring of the complement.
pub fn clique_cover_complement(spec: &GraphSpec, budget: u64) -> Result<CliqueCover> {
    let table = RankTable::new(spec, budget)?;
    let code = independent_set_from_code(spec)?;
    let clique: Vec<u64> = build_canonical_clique(spec, &vec![0; spec.ring().t()])?
        .iter()
        .map(|x| x.index().expect("within vertex budget"))
        .collect();
    let arith = table.arith();
    let parts: Vec<Vec<u64>> = code_indices(&code)
        .into_iter()
        .map(|s| {
            let mut part: Vec<u64> = clique.iter().map(|&x| arith.add(s, x)).collect();
            part.sort_unstable();
            part
        })
        .collect();
    let mut hits = vec![0u32; table.len()];
    for part in &parts {
        for &v in part {
            hits[v as usize] += 1;
        }
    }
    let parts_are_cliques = parts.par_iter().all(|part| {
        part.iter()
            .enumerate()
            .all(|(i, &u)| part[i + 1..].iter().all(|&v| table.adjacent(u, v)))
    });
    Ok(CliqueCover {
        disjoint: hits.iter().all(|&h| h <= 1),
        covers: hits.iter().all(|&h| h >= 1),
        parts_are_cliques,
        parts,
    })
}

/// Code file format: metadata plus the member list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub h: u64,
    pub m: usize,
    pub n: usize,
    pub size: usize,
    pub verified_min_distance: Option<usize>,
    pub linear: bool,
    pub members: Vec<Mat>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{materialize, VERTEX_BUDGET};
    use crate::matrix::{seeded_rng, space_size};
    use rand::Rng;

    fn field(p: u64, n: usize) -> FieldSpec {
        FieldSpec::least_irreducible(p, n).unwrap()
    }

    fn z(h: u64) -> Ring {
        Ring::new(h).unwrap()
    }

    #[test]
    fn gabidulin_examples() {
        let c = gabidulin_code(&field(2, 2), 2, 2).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.contains(&Mat::identity(2, 2)));
        assert_eq!(verify_distance(&z(2), &c, PAIR_BUDGET).unwrap(), Some(2));
        assert!(c.members.iter().filter(|x| !x.is_zero()).all(|x| {
            crate::matrix::det(&z(2), x).unwrap() == 1
        }));

        let all = gabidulin_code(&field(3, 2), 2, 1).unwrap();
        assert_eq!(all.len(), 81);

        let c = gabidulin_code(&field(3, 2), 2, 2).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(verify_distance(&z(3), &c, PAIR_BUDGET).unwrap(), Some(2));

        assert!(gabidulin_code(&field(2, 2), 3, 2).is_err());
        assert!(gabidulin_code(&field(2, 2), 2, 3).is_err());
    }

    #[test]
    fn gabidulin_is_mrd_for_several_shapes() {
        for (p, n, m, d) in [(2u64, 3usize, 3usize, 2usize), (2, 3, 2, 2), (2, 3, 3, 3), (3, 3, 2, 2), (2, 4, 2, 2)] {
            let c = gabidulin_code(&field(p, n), m, d).unwrap();
            assert_eq!(c.len() as u64, p.pow((n * (m - d + 1)) as u32));
            assert_eq!(verify_distance(&z(p), &c, PAIR_BUDGET).unwrap(), Some(d));
        }
    }

    #[test]
    fn lifted_codes() {
        let base = gabidulin_code(&field(2, 2), 2, 2).unwrap();
        assert_eq!(lift_code(&base, 1).unwrap().members, base.members);
        let lifted = lift_code(&base, 2).unwrap();
        assert_eq!(lifted.len(), 16);
        // the linear shortcut agrees with the full pairwise minimum
        let plain = RankCode::from_members(4, 2, 2, lifted.members.clone(), 2).unwrap();
        assert_eq!(verify_distance(&z(4), &plain, PAIR_BUDGET).unwrap(), Some(2));

        let zero = RankCode::from_basis(2, 2, 2, Vec::new(), 2, 1).unwrap();
        let lifted_zero = lift_code(&zero, 3).unwrap();
        assert_eq!(lifted_zero.members, vec![Mat::zeros(8, 2, 2)]);

        let c = lift_code(&gabidulin_code(&field(3, 2), 2, 2).unwrap(), 2).unwrap();
        assert_eq!(c.len(), 81);
    }

    #[test]
    fn crt_products() {
        let ring = z(6);
        let c2 = gabidulin_code(&field(2, 2), 2, 2).unwrap();
        let c3 = gabidulin_code(&field(3, 2), 2, 2).unwrap();
        let c = crt_combine(&ring, &[c2.clone(), c3]).unwrap();
        assert_eq!(c.len(), 36);
        let plain = RankCode::from_members(6, 2, 2, c.members.clone(), 2).unwrap();
        assert_eq!(verify_distance(&ring, &plain, PAIR_BUDGET).unwrap(), Some(2));
        assert_eq!(crt_combine(&z(2), std::slice::from_ref(&c2)).unwrap().members, c2.members);
        assert!(crt_combine(&ring, &[c2]).is_err());
    }

    #[test]
    fn distance_edge_cases() {
        let single = RankCode::from_members(6, 2, 2, vec![Mat::identity(6, 2)], 2).unwrap();
        assert_eq!(verify_distance(&z(6), &single, PAIR_BUDGET).unwrap(), None);
        let all: Vec<Mat> = (0..16).map(|i| Mat::from_index(2, 2, 2, i)).collect();
        let everything = RankCode::from_members(2, 2, 2, all, 1).unwrap();
        assert_eq!(verify_distance(&z(2), &everything, PAIR_BUDGET).unwrap(), Some(1));
        assert!(verify_distance(&z(2), &everything, 10).is_err());
    }

    #[test]
    fn independent_sets() {
        for (h, m, n, r) in [(2u64, 2, 2, 1), (6, 2, 2, 1), (12, 2, 2, 1), (4, 2, 3, 1), (6, 2, 2, 2), (3, 3, 3, 1)] {
            let spec = GraphSpec::from_h(h, m, n, r).unwrap();
            let code = independent_set_from_code(&spec).unwrap();
            assert_eq!(code.len() as u64, spec.independent_size().unwrap());
            assert_eq!(
                code.len() as u64 * spec.clique_size().unwrap(),
                spec.vertex_count().unwrap()
            );
            let d = verify_distance(spec.ring(), &code, PAIR_BUDGET).unwrap();
            assert!(d.is_none_or(|d| d == r + 1));
        }
    }

    #[test]
    fn linearity_random_trials() {
        let spec = GraphSpec::from_h(12, 2, 2, 1).unwrap();
        let code = independent_set_from_code(&spec).unwrap();
        let mut rng = seeded_rng(5);
        for _ in 0..1000 {
            let a = &code.members[rng.random_range(0..code.len())];
            let b = &code.members[rng.random_range(0..code.len())];
            assert!(code.contains(&a.add(b).unwrap()));
            assert!(code.contains(&a.neg()));
        }
    }

    #[test]
    fn colorings_and_covers() {
        for (h, r) in [(2u64, 1usize), (6, 1), (3, 2)] {
            let spec = GraphSpec::from_h(h, 2, 2, r).unwrap();
            let col = color_graph(&spec, VERTEX_BUDGET).unwrap();
            assert!(col.proper);
            assert_eq!(col.color_count as u64, spec.clique_size().unwrap());
            let cover = clique_cover_complement(&spec, VERTEX_BUDGET).unwrap();
            assert!(cover.holds());
            assert_eq!(cover.parts.len() as u64, spec.independent_size().unwrap());
        }
        // the coloring is proper against the materialized graph as well
        let spec = GraphSpec::from_h(4, 2, 2, 1).unwrap();
        let col = color_graph(&spec, VERTEX_BUDGET).unwrap();
        let g = materialize(&spec, VERTEX_BUDGET).unwrap();
        for u in 0..g.vertex_count() {
            assert!(g.rows()[u].ones().all(|v| col.colors[u] != col.colors[v]));
        }
        assert_eq!(col.colors.len() as u64, space_size(4, 2, 2).unwrap());
    }
}
