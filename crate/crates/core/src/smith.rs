//! Smith normal form over Z_{p^s} and Z_h, invariant-factor arrays and inner
//! rank.
//!
//! The prime-power kernel diagonalizes by repeatedly moving an entry of
//! minimal p-adic valuation to the pivot position (ties broken by the
//! smallest `(row, col)`), then clearing its row and column. Every remaining
//! entry is divisible by the pivot, so only exact quotients are needed.
//!
//! Over Z_h the form is assembled from the per-component forms: the
//! component transforms are CRT-lifted, and the residual units on the lifted
//! diagonal are absorbed into the columns of `S` so that `D` carries exactly
//! `prod_i p_i^{alpha_{ic}}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{coproject_mat, crt_lift_mat, local_quotient, Mat};
use crate::ring::{inv_mod, pow_mod, sub_mod, valuation, Ring};

/// The `t x min(m, n)` exponent table `Omega`; row `i` is nondecreasing and
/// bounded by `s_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InvariantFactorArray {
    pub rows: Vec<Vec<u32>>,
}

impl InvariantFactorArray {
    /// Number of invariant factors per prime, `min(m, n)`.
    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Number of diagonal positions `c` whose exponent column is not
    /// `(s_1, ..., s_t)`, i.e. of nonzero invariant factors.
    pub fn inner_rank(&self, ring: &Ring) -> usize {
        (0..self.width())
            .filter(|&c| {
                self.rows
                    .iter()
                    .zip(ring.components())
                    .any(|(row, pp)| row[c] < pp.s)
            })
            .count()
    }

    pub fn is_valid(&self, ring: &Ring) -> bool {
        self.rows.len() == ring.t()
            && self
                .rows
                .iter()
                .zip(ring.components())
                .all(|(row, pp)| {
                    row.len() == self.width()
                        && row.windows(2).all(|w| w[0] <= w[1])
                        && row.iter().all(|&a| a <= pp.s)
                })
    }

    /// Diagonal entries `prod_i p_i^{alpha_{ic}}`.
    pub fn diagonal(&self, ring: &Ring) -> Vec<u64> {
        (0..self.width())
            .map(|c| {
                let col: Vec<u32> = self.rows.iter().map(|r| r[c]).collect();
                ring.exponent_product(&col)
            })
            .collect()
    }

    /// Compact label such as `0,1|0,1` (one `|`-separated group per prime).
    pub fn label(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// `A = u * diag(p^{exponents}) * v` over Z_{p^s}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSmith {
    pub u: Mat,
    pub exponents: Vec<u32>,
    pub v: Mat,
}

impl LocalSmith {
    pub fn diagonal(&self, p: u64) -> Mat {
        let q = self.u.modulus();
        let d: Vec<u64> = self
            .exponents
            .iter()
            .map(|&a| pow_mod(p, a as u64, q))
            .collect();
        Mat::diag(q, self.u.rows(), self.v.rows(), &d)
    }
}

/// `A = s * d * t` over Z_h with `d = diag(prod_i p_i^{alpha_{ic}})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub s: Mat,
    pub d: Mat,
    pub t: Mat,
    pub omega: InvariantFactorArray,
}

fn prime_exponent(p: u64, q: u64) -> Result<u32> {
    if p < 2 {
        return Err(Error::InvalidParameters(format!("{p} is not a prime")));
    }
    let mut s = 0;
    let mut x = q;
    while x.is_multiple_of(p) {
        x /= p;
        s += 1;
    }
    if x != 1 || s == 0 {
        return Err(Error::InvalidParameters(format!(
            "modulus {q} is not a power of {p}"
        )));
    }
    Ok(s)
}

/// Transforms tracked during local elimination, kept as the inverses of the
/// applied row/column operations so that `A = left * M * right` holds
/// throughout.
struct Transforms {
    left: Mat,
    right: Mat,
}

fn local_eliminate(a: &Mat, p: u64, s: u32, mut tr: Option<&mut Transforms>) -> (Vec<u32>, Mat) {
    let q = a.modulus();
    let (m, n) = (a.rows(), a.cols());
    let k_max = m.min(n);
    let mut w = a.clone();
    let mut exps = Vec::with_capacity(k_max);

    for k in 0..k_max {
        let mut best: Option<(u32, usize, usize)> = None;
        for r in k..m {
            for c in k..n {
                let x = w.get(r, c);
                if x != 0 {
                    let v = valuation(x, p);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, pr, pc)) = best else {
            exps.resize(k_max, s);
            break;
        };
        exps.push(v);

        w.swap_rows(k, pr);
        w.swap_cols(k, pc);
        if let Some(t) = tr.as_deref_mut() {
            t.left.swap_cols(k, pr);
            t.right.swap_rows(k, pc);
        }

        let pivot = w.get(k, k);
        for r in k + 1..m {
            let f = local_quotient(w.get(r, k), pivot, p, q);
            if f != 0 {
                w.row_axpy(r, k, f);
                if let Some(t) = tr.as_deref_mut() {
                    // left * E^{-1}: column k += f * column r
                    t.left.col_axpy(k, r, sub_mod(0, f, q));
                }
            }
        }
        for c in k + 1..n {
            let f = local_quotient(w.get(k, c), pivot, p, q);
            if f != 0 {
                w.col_axpy(c, k, f);
                if let Some(t) = tr.as_deref_mut() {
                    // F^{-1} * right: row k += f * row c
                    t.right.row_axpy(k, c, sub_mod(0, f, q));
                }
            }
        }
    }
    (exps, w)
}

/// Smith normal form over Z_{p^s}; `a.modulus()` must be a power of `p`.
pub fn snf_prime_power(a: &Mat, p: u64) -> Result<LocalSmith> {
    let q = a.modulus();
    let s = prime_exponent(p, q)?;
    let mut tr = Transforms {
        left: Mat::identity(q, a.rows()),
        right: Mat::identity(q, a.cols()),
    };
    let (exponents, w) = local_eliminate(a, p, s, Some(&mut tr));
    // Move each pivot's unit part into the left transform.
    for (c, &alpha) in exponents.iter().enumerate() {
        if alpha < s {
            let unit = (w.get(c, c) / p.pow(alpha)) % q;
            tr.left.scale_col(c, unit);
        }
    }
    Ok(LocalSmith {
        u: tr.left,
        exponents,
        v: tr.right,
    })
}

/// Invariant-factor exponents over Z_{p^s} without building transforms.
pub fn local_exponents(a: &Mat, p: u64) -> Result<Vec<u32>> {
    let s = prime_exponent(p, a.modulus())?;
    Ok(local_eliminate(a, p, s, None).0)
}

fn check_ring(ring: &Ring, a: &Mat) -> Result<()> {
    if a.modulus() != ring.h() {
        return Err(Error::ModulusMismatch {
            expected: ring.h(),
            found: a.modulus(),
        });
    }
    Ok(())
}

/// Smith normal form over Z_h.
pub fn snf(ring: &Ring, a: &Mat) -> Result<SmithForm> {
    check_ring(ring, a)?;
    let locals: Vec<LocalSmith> = ring
        .components()
        .par_iter()
        .map(|pp| snf_prime_power(&a.reduce_to(pp.q), pp.p))
        .collect::<Result<_>>()?;

    let lefts: Vec<Mat> = locals.iter().map(|l| l.u.clone()).collect();
    let rights: Vec<Mat> = locals.iter().map(|l| l.v.clone()).collect();
    let mut s = crt_lift_mat(ring, &lefts)?;
    let t = crt_lift_mat(ring, &rights)?;
    let omega = InvariantFactorArray {
        rows: locals.into_iter().map(|l| l.exponents).collect(),
    };

    // The lifted diagonal entry d_c satisfies pi_i(d_c) = p_i^{alpha_ic}; it is
    // x_c * prod p_i^{alpha_ic} for a unit x_c, which goes into column c of S.
    let diag = omega.diagonal(ring);
    let mut residues = vec![0u64; ring.t()];
    for (c, &g) in diag.iter().enumerate() {
        for (i, pp) in ring.components().iter().enumerate() {
            let alpha = omega.rows[i][c];
            residues[i] = if alpha >= pp.s {
                1 % pp.q
            } else {
                let cofactor = (g % pp.q) / pp.p.pow(alpha);
                inv_mod(cofactor % pp.q, pp.q).expect("cofactor is a unit")
            };
        }
        let x = ring.crt_lift_unchecked(&residues);
        s.scale_col(c, x);
    }
    let d = Mat::diag(ring.h(), a.rows(), a.cols(), &diag);
    Ok(SmithForm { s, d, t, omega })
}

/// The invariant-factor array of `A` (no transforms).
pub fn omega(ring: &Ring, a: &Mat) -> Result<InvariantFactorArray> {
    check_ring(ring, a)?;
    let rows = ring
        .components()
        .iter()
        .map(|pp| local_exponents(&a.reduce_to(pp.q), pp.p))
        .collect::<Result<_>>()?;
    Ok(InvariantFactorArray { rows })
}

/// Inner rank: the number of nonzero invariant factors.
pub fn inner_rank(ring: &Ring, a: &Mat) -> Result<usize> {
    check_ring(ring, a)?;
    if a.is_zero() {
        return Ok(0);
    }
    // the rank is the max over components of the local rank
    let mut best = 0;
    for pp in ring.components() {
        let exps = local_exponents(&a.reduce_to(pp.q), pp.p)?;
        best = best.max(exps.iter().filter(|&&e| e < pp.s).count());
    }
    Ok(best)
}

/// `(max_i rank(pi_i(A)), max_i rank(theta_i(A)))`; for `t = 1` the second
/// value repeats the first.
pub fn rank_via_projections(ring: &Ring, a: &Mat) -> Result<(usize, usize)> {
    check_ring(ring, a)?;
    let mut via_pi = 0;
    for i in 0..ring.t() {
        let sub = ring.prime_power_ring(i)?;
        via_pi = via_pi.max(inner_rank(&sub, &a.reduce_to(sub.h()))?);
    }
    if ring.t() == 1 {
        return Ok((via_pi, via_pi));
    }
    let mut via_theta = 0;
    for i in 0..ring.t() {
        let sub = Ring::new(ring.coprojection_modulus(i)?)?;
        via_theta = via_theta.max(inner_rank(&sub, &coproject_mat(ring, a, i)?)?);
    }
    Ok((via_pi, via_theta))
}

/// Checks `S * D * T = A` with `S`, `T` invertible and `D` in normal form.
pub fn verify_smith_form(ring: &Ring, a: &Mat, f: &SmithForm) -> Result<bool> {
    use crate::matrix::is_invertible;
    if !f.omega.is_valid(ring) {
        return Ok(false);
    }
    let expected_d = Mat::diag(ring.h(), a.rows(), a.cols(), &f.omega.diagonal(ring));
    Ok(f.d == expected_d
        && f.s.mul(&f.d)?.mul(&f.t)? == *a
        && is_invertible(ring, &f.s)?
        && is_invertible(ring, &f.t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{random_invertible_with, random_matrix, seeded_rng, space_size};

    fn z(h: u64) -> Ring {
        Ring::new(h).unwrap()
    }

    fn omega_of(rows: &[&[u32]]) -> InvariantFactorArray {
        InvariantFactorArray {
            rows: rows.iter().map(|r| r.to_vec()).collect(),
        }
    }

    #[test]
    fn local_examples() {
        let zero = snf_prime_power(&Mat::zeros(8, 2, 3), 2).unwrap();
        assert_eq!(zero.exponents, vec![3, 3]);
        let id = snf_prime_power(&Mat::identity(9, 3), 3).unwrap();
        assert_eq!(id.exponents, vec![0, 0, 0]);
        // det = 4 - 2 = 2, so the second invariant factor is 2, not 0
        let a = Mat::from_rows(4, &[[2, 1], [2, 2]]).unwrap();
        let f = snf_prime_power(&a, 2).unwrap();
        assert_eq!(f.exponents, vec![0, 1]);
        assert_eq!(f.u.mul(&f.diagonal(2)).unwrap().mul(&f.v).unwrap(), a);
        assert!(snf_prime_power(&a, 3).is_err());
        assert!(snf_prime_power(&Mat::zeros(12, 1, 1), 2).is_err());
    }

    #[test]
    fn zh_examples() {
        let r6 = z(6);
        let a = Mat::diag(6, 2, 2, &[2, 3]);
        let f = snf(&r6, &a).unwrap();
        assert_eq!(f.omega, omega_of(&[&[0, 1], &[0, 1]]));
        assert_eq!(f.d, Mat::diag(6, 2, 2, &[1, 0]));
        assert!(verify_smith_form(&r6, &a, &f).unwrap());

        let r12 = z(12);
        let f0 = snf(&r12, &Mat::zeros(12, 2, 2)).unwrap();
        assert_eq!(f0.omega, omega_of(&[&[2, 2], &[1, 1]]));
        assert!(f0.d.is_zero());
        let fi = snf(&r12, &Mat::identity(12, 2)).unwrap();
        assert_eq!(fi.omega, omega_of(&[&[0, 0], &[0, 0]]));
        assert_eq!(fi.d, Mat::identity(12, 2));
        assert!(snf(&r12, &Mat::identity(6, 2)).is_err());
    }

    #[test]
    fn rank_examples() {
        let r6 = z(6);
        assert_eq!(inner_rank(&r6, &Mat::zeros(6, 2, 3)).unwrap(), 0);
        assert_eq!(inner_rank(&r6, &Mat::identity(6, 3)).unwrap(), 3);
        assert_eq!(inner_rank(&r6, &Mat::diag(6, 2, 2, &[2, 3])).unwrap(), 1);
        assert_eq!(rank_via_projections(&r6, &Mat::diag(6, 2, 2, &[2, 3])).unwrap(), (1, 1));
        assert_eq!(rank_via_projections(&r6, &Mat::zeros(6, 2, 2)).unwrap(), (0, 0));
        let r12 = z(12);
        assert_eq!(rank_via_projections(&r12, &Mat::identity(12, 2)).unwrap(), (2, 2));
        let r8 = z(8);
        assert_eq!(rank_via_projections(&r8, &Mat::diag(8, 2, 2, &[2, 0])).unwrap(), (1, 1));
    }

    #[test]
    fn exhaustive_roundtrip_small_rings() {
        for (h, rows, cols) in [(4u64, 2usize, 2usize), (6, 2, 2), (8, 1, 3), (9, 2, 1)] {
            let r = z(h);
            for idx in 0..space_size(h, rows, cols).unwrap() {
                let a = Mat::from_index(h, rows, cols, idx);
                let f = snf(&r, &a).unwrap();
                assert!(verify_smith_form(&r, &a, &f).unwrap(), "{a:?}");
                assert_eq!(f.omega, omega(&r, &a).unwrap());
                assert_eq!(f.omega.inner_rank(&r), inner_rank(&r, &a).unwrap());
            }
        }
    }

    #[test]
    fn randomized_roundtrip_tall_and_wide() {
        let r = z(360);
        let mut rng = seeded_rng(11);
        for (rows, cols) in [(2, 3), (3, 3), (4, 2), (3, 5)] {
            for _ in 0..500 {
                let a = random_matrix(&r, rows, cols, &mut rng);
                let f = snf(&r, &a).unwrap();
                assert!(verify_smith_form(&r, &a, &f).unwrap(), "{a:?}");
            }
        }
    }

    #[test]
    fn omega_is_an_equivalence_invariant() {
        for h in [12u64, 36, 72] {
            let r = z(h);
            let mut rng = seeded_rng(h);
            for _ in 0..1000 {
                let a = random_matrix(&r, 3, 3, &mut rng);
                let p = random_invertible_with(&r, 3, &mut rng);
                let q = random_invertible_with(&r, 3, &mut rng);
                let b = p.mul(&a).unwrap().mul(&q).unwrap();
                assert_eq!(omega(&r, &a).unwrap(), omega(&r, &b).unwrap());
            }
        }
    }

    #[test]
    fn lemma_projection_ranks_exhaustive_z12() {
        let r = z(12);
        for idx in 0..space_size(12, 2, 2).unwrap() {
            let a = Mat::from_index(12, 2, 2, idx);
            let rank = inner_rank(&r, &a).unwrap();
            assert_eq!(rank_via_projections(&r, &a).unwrap(), (rank, rank), "{a:?}");
        }
    }

    #[test]
    fn rank_bounds() {
        let r = z(12);
        let mut rng = seeded_rng(5);
        for _ in 0..1000 {
            let a = random_matrix(&r, 2, 3, &mut rng);
            let b = random_matrix(&r, 3, 2, &mut rng);
            let ra = inner_rank(&r, &a).unwrap();
            let rb = inner_rank(&r, &b).unwrap();
            assert!(inner_rank(&r, &a.mul(&b).unwrap()).unwrap() <= ra.min(rb));
            assert!(ra <= 2);
            // block lower bound: any submatrix has rank at most that of A
            let block = a.submatrix(0, 1, 2, 2);
            assert!(inner_rank(&r, &block).unwrap() <= ra);
            let corner = a.submatrix(1, 0, 1, 3);
            assert!(inner_rank(&r, &corner).unwrap() <= ra);
        }
        for idx in 0..space_size(6, 2, 2).unwrap() {
            let r6 = z(6);
            let a = Mat::from_index(6, 2, 2, idx);
            let rank = inner_rank(&r6, &a).unwrap();
            assert!(rank <= 2);
            assert_eq!(rank == 0, a.is_zero());
        }
    }
}
