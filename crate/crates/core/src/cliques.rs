//! Canonical maximum cliques of Bil_r, their classification, and the
//! r-intersecting family checks.
//!
//! The canonical family `C_r(alpha)` with `alpha_i in {0, s_i}` is
//!
//! ```text
//! [ X1  X2 ]    X1 free r x r,  X2 in J_alpha^{r x (n-r)},
//! [ X3  0  ]    X3 in J_{s-alpha}^{(m-r) x r}
//! ```
//!
//! Every maximum clique is `S C_r(alpha) T + B0`; `alpha = 0` is the row form
//! (`T = I`), `alpha = s` the column form (`S = I`, square only).

use std::collections::HashMap;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{clique::cliques_of_size, materialize, GraphSpec};
use crate::matrix::{crt_lift_mat, project_mat, random_invertible_with, random_matrix, Mat};
use crate::ring::{IdealLabel, Ring};
use crate::smith::{inner_rank, snf_prime_power};

/// Default cap on the size of a materialized family.
pub const FAMILY_BUDGET: u64 = 1_000_000;

/// Family file format: shape, modulus and member list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub h: u64,
    pub m: usize,
    pub n: usize,
    pub members: Vec<Mat>,
}

/// Sorted, deduplicated copy of a family.
pub fn normalize_family(family: impl IntoIterator<Item = Mat>) -> Vec<Mat> {
    let mut out: Vec<Mat> = family.into_iter().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn check_alpha(ring: &Ring, alpha: &[u32]) -> Result<()> {
    if alpha.len() != ring.t()
        || alpha
            .iter()
            .zip(ring.components())
            .any(|(&a, pp)| a != 0 && a != pp.s)
    {
        return Err(Error::InvalidParameters(format!(
            "alpha {alpha:?} must have one entry per prime, each 0 or s_i"
        )));
    }
    Ok(())
}

fn clique_size(spec: &GraphSpec) -> Result<u64> {
    spec.clique_size()
        .ok_or_else(|| Error::budget("clique size", u128::MAX, FAMILY_BUDGET as u128))
}

/// The set `C_r(alpha)`, sorted. Requires `alpha = 0` or `m = n`, since
/// otherwise the set is smaller than `h^{nr}`.
pub fn build_canonical_clique(spec: &GraphSpec, alpha: &[u32]) -> Result<Vec<Mat>> {
    let ring = spec.ring();
    check_alpha(ring, alpha)?;
    if alpha.iter().any(|&a| a != 0) && spec.m() != spec.n() {
        return Err(Error::InvalidParameters(
            "a nonzero alpha needs m = n".into(),
        ));
    }
    let size = clique_size(spec)?;
    if size > FAMILY_BUDGET {
        return Err(Error::budget("canonical clique size", size as u128, FAMILY_BUDGET as u128));
    }
    let (m, n, r) = (spec.m(), spec.n(), spec.r());
    let top = IdealLabel {
        exponents: alpha.to_vec(),
    }
    .members(ring);
    let complement: Vec<u32> = ring
        .components()
        .iter()
        .zip(alpha)
        .map(|(pp, &a)| pp.s - a)
        .collect();
    let bottom = IdealLabel {
        exponents: complement,
    }
    .members(ring);
    let free: Vec<u64> = (0..ring.h()).collect();
    let zero = vec![0u64];
    let slots: Vec<&Vec<u64>> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| match (i < r, j < r) {
            (true, true) => &free,
            (true, false) => &top,
            (false, true) => &bottom,
            (false, false) => &zero,
        })
        .collect();
    let members = slots
        .into_iter()
        .map(|v| v.iter().copied())
        .multi_cartesian_product()
        .map(|data| Mat::from_vec(ring.h(), m, n, data))
        .collect::<Result<Vec<_>>>()?;
    Ok(normalize_family(members))
}

/// Caches `rho <= r` by difference matrix; within structured families the
/// same differences recur many times.
struct PairChecker<'a> {
    spec: &'a GraphSpec,
    cache: HashMap<Mat, bool>,
}

impl<'a> PairChecker<'a> {
    fn new(spec: &'a GraphSpec) -> Self {
        PairChecker {
            spec,
            cache: HashMap::new(),
        }
    }

    fn close(&mut self, a: &Mat, b: &Mat) -> Result<bool> {
        let d = a.sub(b)?;
        if let Some(&hit) = self.cache.get(&d) {
            return Ok(hit);
        }
        let ok = inner_rank(self.spec.ring(), &d)? <= self.spec.r();
        self.cache.insert(d.neg(), ok);
        self.cache.insert(d, ok);
        Ok(ok)
    }
}

/// First pair (in family order) whose difference has inner rank above `r`.
pub fn non_adjacent_witness(spec: &GraphSpec, family: &[Mat]) -> Result<Option<(Mat, Mat)>> {
    for a in family {
        spec.check_shape(a)?;
    }
    let mut checker = PairChecker::new(spec);
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if !checker.close(a, b)? {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

/// All pairwise differences have inner rank at most `r`.
pub fn is_clique(spec: &GraphSpec, family: &[Mat]) -> Result<bool> {
    Ok(non_adjacent_witness(spec, family)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormTag {
    RowForm,
    ColForm,
    MixedForm,
}

/// `S C_r(alpha) T + B0`, with `S` absent in the column form and `T` absent in
/// the row form (both read as the identity).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueForm {
    pub tag: FormTag,
    pub s: Option<Mat>,
    pub t: Option<Mat>,
    pub alpha: Vec<u32>,
    pub b0: Mat,
}

/// The family described by a form, sorted.
pub fn rebuild(spec: &GraphSpec, form: &CliqueForm) -> Result<Vec<Mat>> {
    spec.check_shape(&form.b0)?;
    let base = build_canonical_clique(spec, &form.alpha)?;
    let members = base
        .into_iter()
        .map(|x| {
            let x = match &form.s {
                Some(s) => s.mul(&x)?,
                None => x,
            };
            let x = match &form.t {
                Some(t) => x.mul(t)?,
                None => x,
            };
            x.add(&form.b0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(normalize_family(members))
}

enum LocalType {
    Row(Mat),
    Col(Mat),
}

/// Decides whether a maximum clique through 0 over Z_{p^s} has all columns in a
/// free rank-r summand (row type, returns its basis completion) or all rows in
/// one (column type).
fn local_type(members: &[Mat], p: u64, s: u32, r: usize) -> Result<Option<LocalType>> {
    let (m, n) = (members[0].rows(), members[0].cols());
    let q = members[0].modulus();
    let summand = |exps: &[u32]| {
        exps.iter().take(r).all(|&e| e == 0) && exps.iter().skip(r).all(|&e| e == s) && exps.len() >= r
    };

    let mut wide = Mat::zeros(q, m, n * members.len());
    for (k, x) in members.iter().enumerate() {
        for i in 0..m {
            for j in 0..n {
                wide.set(i, k * n + j, x.get(i, j));
            }
        }
    }
    let f = snf_prime_power(&wide, p)?;
    if summand(&f.exponents) {
        return Ok(Some(LocalType::Row(f.u)));
    }

    let mut tall = Mat::zeros(q, m * members.len(), n);
    for (k, x) in members.iter().enumerate() {
        for i in 0..m {
            for j in 0..n {
                tall.set(k * m + i, j, x.get(i, j));
            }
        }
    }
    let f = snf_prime_power(&tall, p)?;
    if summand(&f.exponents) {
        return Ok(Some(LocalType::Col(f.v)));
    }
    Ok(None)
}

/// Writes a maximum clique as `S C_r(alpha) T + B0`.
///
/// `B0` is the smallest member. Each prime component of the translated family
/// is typed by the Smith form of its members placed side by side (row type)
/// or stacked (column type); row type wins when both hold. The result is
/// rebuilt and compared with the input, and a mismatch is reported as a
/// theorem violation.
pub fn classify_max_clique(spec: &GraphSpec, family: &[Mat]) -> Result<CliqueForm> {
    let ring = spec.ring();
    let family = normalize_family(family.iter().cloned());
    let size = clique_size(spec)?;
    if family.len() as u64 != size {
        return Err(Error::NotMaximumClique(format!(
            "{} members, a maximum clique has {size}",
            family.len()
        )));
    }
    if let Some((a, b)) = non_adjacent_witness(spec, &family)? {
        return Err(Error::NotMaximumClique(format!(
            "members {a:?} and {b:?} differ by inner rank above {}",
            spec.r()
        )));
    }
    let b0 = family[0].clone();
    let shifted: Vec<Mat> = family.iter().map(|x| x.sub(&b0)).collect::<Result<_>>()?;

    let mut types = Vec::with_capacity(ring.t());
    for (i, pp) in ring.components().iter().enumerate() {
        let local = normalize_family(
            shifted
                .iter()
                .map(|x| project_mat(ring, x, i))
                .collect::<Result<Vec<_>>>()?,
        );
        match local_type(&local, pp.p, pp.s, spec.r())? {
            Some(LocalType::Col(_)) if spec.m() != spec.n() => {
                return Err(Error::TheoremViolation(format!(
                    "component {i} is of column type with m < n"
                )))
            }
            Some(t) => types.push(t),
            None => {
                return Err(Error::TheoremViolation(format!(
                    "component {i} is neither of row nor of column type"
                )))
            }
        }
    }

    let all_row = types.iter().all(|t| matches!(t, LocalType::Row(_)));
    let all_col = types.iter().all(|t| matches!(t, LocalType::Col(_)));
    let mut lefts = Vec::with_capacity(ring.t());
    let mut rights = Vec::with_capacity(ring.t());
    let mut alpha = Vec::with_capacity(ring.t());
    for (t, pp) in types.into_iter().zip(ring.components()) {
        match t {
            LocalType::Row(u) => {
                lefts.push(u);
                rights.push(Mat::identity(pp.q, spec.n()));
                alpha.push(0);
            }
            LocalType::Col(v) => {
                lefts.push(Mat::identity(pp.q, spec.m()));
                rights.push(v);
                alpha.push(pp.s);
            }
        }
    }
    let s = crt_lift_mat(ring, &lefts)?;
    let t = crt_lift_mat(ring, &rights)?;
    let form = if all_row {
        CliqueForm {
            tag: FormTag::RowForm,
            s: Some(s),
            t: None,
            alpha,
            b0,
        }
    } else if all_col {
        CliqueForm {
            tag: FormTag::ColForm,
            s: None,
            t: Some(t),
            alpha,
            b0,
        }
    } else {
        CliqueForm {
            tag: FormTag::MixedForm,
            s: Some(s),
            t: Some(t),
            alpha,
            b0,
        }
    };
    if rebuild(spec, &form)? != family {
        return Err(Error::TheoremViolation(
            "rebuilding the classified form does not reproduce the family".into(),
        ));
    }
    Ok(form)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkrReport {
    pub size: u64,
    pub bound: u64,
    pub within_bound: bool,
    pub extremal: bool,
    pub form: Option<CliqueForm>,
}

/// Checks an r-intersecting family against the bound `h^{nr}` and classifies
/// it when the bound is attained.
pub fn verify_ekr(spec: &GraphSpec, family: &[Mat]) -> Result<EkrReport> {
    let family = normalize_family(family.iter().cloned());
    if !is_clique(spec, &family)? {
        return Err(Error::NotIntersecting(spec.r()));
    }
    let bound = clique_size(spec)?;
    let size = family.len() as u64;
    let extremal = size == bound;
    let form = if extremal {
        Some(classify_max_clique(spec, &family)?)
    } else {
        None
    };
    Ok(EkrReport {
        size,
        bound,
        within_bound: size <= bound,
        extremal,
        form,
    })
}

/// All maximum cliques by exhaustive search, each sorted.
pub fn enumerate_max_cliques(spec: &GraphSpec, budget: u64) -> Result<Vec<Vec<Mat>>> {
    let g = materialize(spec, budget)?;
    let target = clique_size(spec)? as usize;
    Ok(cliques_of_size(g.rows(), target)
        .into_iter()
        .map(|c| c.into_iter().map(|v| spec.vertex(v as u64)).collect())
        .collect())
}

/// `S C_r(alpha) T + B0` for random invertible `S`, `T` and random `B0`;
/// `S` is skipped for the column form and `T` for the row form.
pub fn random_clique<R: Rng>(spec: &GraphSpec, alpha: &[u32], rng: &mut R) -> Result<Vec<Mat>> {
    let ring = spec.ring();
    check_alpha(ring, alpha)?;
    let row = alpha.iter().all(|&a| a == 0);
    let col = alpha.iter().zip(ring.components()).all(|(&a, pp)| a == pp.s);
    let s = (!col).then(|| random_invertible_with(ring, spec.m(), rng));
    let t = (!row).then(|| random_invertible_with(ring, spec.n(), rng));
    let b0 = random_matrix(ring, spec.m(), spec.n(), rng);
    let form = CliqueForm {
        tag: if row {
            FormTag::RowForm
        } else if col {
            FormTag::ColForm
        } else {
            FormTag::MixedForm
        },
        s,
        t,
        alpha: alpha.to_vec(),
        b0,
    };
    rebuild(spec, &form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::seeded_rng;

    fn spec(h: u64, m: usize, n: usize, r: usize) -> GraphSpec {
        GraphSpec::from_h(h, m, n, r).unwrap()
    }

    #[test]
    fn canonical_examples() {
        let s = spec(6, 2, 3, 1);
        let c = build_canonical_clique(&s, &[0, 0]).unwrap();
        assert_eq!(c.len(), 216);
        assert!(c.iter().all(|x| x.row(1).iter().all(|&e| e == 0)));
        assert!(build_canonical_clique(&s, &[0, 1]).is_err());
        assert!(build_canonical_clique(&s, &[0, 2]).is_err());

        let s = spec(6, 2, 2, 1);
        let c = build_canonical_clique(&s, &[1, 1]).unwrap();
        assert_eq!(c.len(), 36);
        assert!(c.iter().all(|x| x.get(0, 1) == 0 && x.get(1, 1) == 0));
        let c = build_canonical_clique(&s, &[0, 1]).unwrap();
        assert_eq!(c.len(), 36);
        assert!(is_clique(&s, &c).unwrap());
    }

    #[test]
    fn canonical_sizes() {
        for h in [2u64, 3, 4, 6, 12] {
            let ring = Ring::new(h).unwrap();
            let t = ring.t();
            for alpha_bits in 0..1u32 << t {
                let alpha: Vec<u32> = ring
                    .components()
                    .iter()
                    .enumerate()
                    .map(|(i, pp)| if alpha_bits >> i & 1 == 1 { pp.s } else { 0 })
                    .collect();
                for (m, n, r) in [(2, 2, 1), (2, 2, 2), (3, 3, 1)] {
                    if h == 12 && m == 3 {
                        continue;
                    }
                    let s = spec(h, m, n, r);
                    let c = build_canonical_clique(&s, &alpha).unwrap();
                    assert_eq!(c.len() as u64, s.clique_size().unwrap());
                }
            }
        }
    }

    #[test]
    fn clique_checks() {
        let s = spec(12, 2, 2, 1);
        assert!(is_clique(&s, &[Mat::identity(12, 2)]).unwrap());
        let mut c = build_canonical_clique(&s, &[2, 0]).unwrap();
        assert!(is_clique(&s, &c).unwrap());
        c.push(Mat::diag(12, 2, 2, &[5, 7]));
        let (a, b) = non_adjacent_witness(&s, &c).unwrap().unwrap();
        assert_eq!(inner_rank(s.ring(), &a.sub(&b).unwrap()).unwrap(), 2);
    }

    #[test]
    fn classify_generated_forms() {
        let mut rng = seeded_rng(11);
        for (h, alphas) in [
            (6u64, vec![vec![0, 0], vec![1, 1], vec![0, 1], vec![1, 0]]),
            (12, vec![vec![0, 0], vec![2, 1], vec![2, 0], vec![0, 1]]),
            (4, vec![vec![0], vec![2]]),
        ] {
            let s = spec(h, 2, 2, 1);
            for alpha in alphas {
                for _ in 0..5 {
                    let c = random_clique(&s, &alpha, &mut rng).unwrap();
                    let form = classify_max_clique(&s, &c).unwrap();
                    assert_eq!(form.alpha, alpha);
                    assert_eq!(rebuild(&s, &form).unwrap(), c);
                    assert_eq!(form.b0, c[0]);
                }
            }
        }
        let s = spec(6, 2, 3, 1);
        for _ in 0..5 {
            let c = random_clique(&s, &[0, 0], &mut rng).unwrap();
            assert_eq!(classify_max_clique(&s, &c).unwrap().tag, FormTag::RowForm);
        }
    }

    #[test]
    fn degenerate_rank_reports_row_form() {
        let s = spec(6, 2, 2, 2);
        let all: Vec<Mat> = (0..1296).map(|i| s.vertex(i)).collect();
        let form = classify_max_clique(&s, &all).unwrap();
        assert_eq!(form.tag, FormTag::RowForm);
    }

    #[test]
    fn classification_rejects_non_cliques() {
        let s = spec(6, 2, 2, 1);
        let mut c = build_canonical_clique(&s, &[0, 0]).unwrap();
        c.pop();
        assert!(matches!(classify_max_clique(&s, &c), Err(Error::NotMaximumClique(_))));
        c.push(Mat::identity(6, 2));
        assert!(matches!(classify_max_clique(&s, &c), Err(Error::NotMaximumClique(_))));
    }

    #[test]
    fn ekr_examples() {
        let s = spec(6, 2, 2, 1);
        let c = build_canonical_clique(&s, &[0, 0]).unwrap();
        let rep = verify_ekr(&s, &c).unwrap();
        assert!(rep.within_bound && rep.extremal);
        assert_eq!(rep.form.unwrap().tag, FormTag::RowForm);

        let rep = verify_ekr(&s, &c[..20]).unwrap();
        assert!(rep.within_bound && !rep.extremal && rep.form.is_none());

        let mut bigger = c.clone();
        bigger.push(Mat::from_rows(6, &[[0, 0], [0, 1]]).unwrap());
        assert!(matches!(verify_ekr(&s, &bigger), Err(Error::NotIntersecting(1))));
    }

    #[test]
    fn all_max_cliques_over_z2_and_z3() {
        for (h, expected) in [(2u64, 24usize), (3, 72)] {
            let s = spec(h, 2, 2, 1);
            let cliques = enumerate_max_cliques(&s, 256).unwrap();
            assert_eq!(cliques.len(), expected);
            for c in &cliques {
                let form = classify_max_clique(&s, c).unwrap();
                assert_ne!(form.tag, FormTag::MixedForm);
            }
        }
        let s = spec(2, 2, 2, 2);
        assert_eq!(enumerate_max_cliques(&s, 256).unwrap().len(), 1);
    }
}
