//! Dense matrices over Z_h (or over any prime-power component of it).
//!
//! A [`Mat`] only records its modulus; operations that need the prime
//! factorization (determinant, inverse, projections) take the [`Ring`]
//! explicitly. Component matrices produced by [`project_mat`] are plain
//! `Mat`s with modulus `p_i^{s_i}`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{add_mod, inv_mod, mul_mod, sub_mod, valuation, Ring};

/// Seedable generator used by every randomized operation: ChaCha with eight
/// rounds, seeded from a `u64` via `SeedableRng::seed_from_u64`.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An `rows x cols` matrix with canonical entries in `[0, modulus)`, stored
/// row-major. Ordering is lexicographic on the entries, which coincides with
/// the order of [`Mat::index`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct Mat {
    modulus: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat(mod {}) [", self.modulus)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Self {
        Mat {
            modulus,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        let mut m = Self::zeros(modulus, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    /// `rows x cols` matrix with `diag` on the main diagonal.
    pub fn diag(modulus: u64, rows: usize, cols: usize, diag: &[u64]) -> Self {
        let mut m = Self::zeros(modulus, rows, cols);
        for (i, &d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.data[i * cols + i] = d % modulus;
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry.
    pub fn from_vec(modulus: u64, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(0));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat {
            modulus,
            rows,
            cols,
            data: data.into_iter().map(|x| x % modulus).collect(),
        })
    }

    pub fn from_rows<R: AsRef<[u64]>>(modulus: u64, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_vec(modulus, rows.len(), cols, data)
    }

    /// Signed entries, reduced into `[0, modulus)`.
    pub fn from_signed_rows<R: AsRef<[i64]>>(modulus: u64, rows: &[R]) -> Result<Self> {
        let unsigned: Vec<Vec<u64>> = rows
            .iter()
            .map(|r| {
                r.as_ref()
                    .iter()
                    .map(|&x| (x as i128).rem_euclid(modulus as i128) as u64)
                    .collect()
            })
            .collect();
        Self::from_rows(modulus, &unsigned)
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.modulus, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_same_shape(&self, other: &Mat) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                expected: self.modulus,
                found: other.modulus,
            });
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let m = self.modulus;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| add_mod(a, b, m))
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat> {
        self.check_same_shape(other)?;
        let m = self.modulus;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| sub_mod(a, b, m))
            .collect();
        Ok(Mat { data, ..*self })
    }

    pub fn neg(&self) -> Mat {
        let m = self.modulus;
        Mat {
            data: self.data.iter().map(|&a| sub_mod(0, a, m)).collect(),
            ..*self
        }
    }

    pub fn scale(&self, c: u64) -> Mat {
        let m = self.modulus;
        Mat {
            data: self.data.iter().map(|&a| mul_mod(a, c % m, m)).collect(),
            ..*self
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                expected: self.modulus,
                found: other.modulus,
            });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let m = self.modulus as u128;
        let mut out = Mat::zeros(self.modulus, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: u128 = 0;
                for k in 0..self.cols {
                    acc = (acc + self.get(i, k) as u128 * other.get(k, j) as u128) % m;
                }
                out.data[i * other.cols + j] = acc as u64;
            }
        }
        Ok(out)
    }

    /// Entrywise reduction into a smaller modulus dividing this one.
    pub fn reduce_to(&self, modulus: u64) -> Mat {
        Mat {
            modulus,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x % modulus).collect(),
        }
    }

    /// Same entries, reinterpreted under a multiple of the modulus (the
    /// canonical integer lift).
    pub fn lift_to(&self, modulus: u64) -> Mat {
        debug_assert!(modulus.is_multiple_of(self.modulus));
        Mat {
            modulus,
            ..self.clone()
        }
    }

    /// Copy of the `rows x cols` block starting at `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut out = Mat::zeros(self.modulus, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.data[r * cols + c] = self.get(r0 + r, c0 + c);
            }
        }
        out
    }

    /// Row-major base-`modulus` index of the matrix: the first entry is the most
    /// significant digit. `None` if `modulus^(rows*cols)` overflows `u64`.
    pub fn index(&self) -> Option<u64> {
        space_size(self.modulus, self.rows, self.cols)?;
        Some(
            self.data
                .iter()
                .fold(0u64, |acc, &d| acc * self.modulus + d),
        )
    }

    /// Inverse of [`Mat::index`].
    pub fn from_index(modulus: u64, rows: usize, cols: usize, mut index: u64) -> Mat {
        let mut data = vec![0; rows * cols];
        for slot in data.iter_mut().rev() {
            *slot = index % modulus;
            index /= modulus;
        }
        Mat {
            modulus,
            rows,
            cols,
            data,
        }
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] -= factor * row[src]`
    pub(crate) fn row_axpy(&mut self, dst: usize, src: usize, factor: u64) {
        let m = self.modulus;
        for c in 0..self.cols {
            let v = mul_mod(factor, self.data[src * self.cols + c], m);
            let d = &mut self.data[dst * self.cols + c];
            *d = sub_mod(*d, v, m);
        }
    }

    /// `col[dst] -= factor * col[src]`
    pub(crate) fn col_axpy(&mut self, dst: usize, src: usize, factor: u64) {
        let m = self.modulus;
        for r in 0..self.rows {
            let v = mul_mod(factor, self.data[r * self.cols + src], m);
            let d = &mut self.data[r * self.cols + dst];
            *d = sub_mod(*d, v, m);
        }
    }

    pub(crate) fn scale_col(&mut self, c: usize, factor: u64) {
        let m = self.modulus;
        for r in 0..self.rows {
            let d = &mut self.data[r * self.cols + c];
            *d = mul_mod(*d, factor, m);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, factor: u64) {
        let m = self.modulus;
        for c in 0..self.cols {
            let d = &mut self.data[r * self.cols + c];
            *d = mul_mod(*d, factor, m);
        }
    }
}

/// `modulus^(rows*cols)`, the number of matrices of the given shape.
pub fn space_size(modulus: u64, rows: usize, cols: usize) -> Option<u64> {
    modulus.checked_pow(u32::try_from(rows * cols).ok()?)
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

/// `pi_i(A)`: entrywise reduction modulo `p_i^{s_i}` (0-based `i`).
pub fn project_mat(ring: &Ring, a: &Mat, i: usize) -> Result<Mat> {
    check_ring(ring, a)?;
    Ok(a.reduce_to(ring.component(i)?.q))
}

/// `theta_i(A)`: entrywise reduction modulo `h / p_i^{s_i}` (0-based `i`).
pub fn coproject_mat(ring: &Ring, a: &Mat, i: usize) -> Result<Mat> {
    check_ring(ring, a)?;
    Ok(a.reduce_to(ring.coprojection_modulus(i)?))
}

/// Entrywise CRT lift of one matrix per prime-power component.
pub fn crt_lift_mat(ring: &Ring, components: &[Mat]) -> Result<Mat> {
    if components.len() != ring.t() {
        return Err(Error::DimensionMismatch(format!(
            "{} component matrices for {} components",
            components.len(),
            ring.t()
        )));
    }
    let (rows, cols) = (components[0].rows(), components[0].cols());
    for (c, pp) in components.iter().zip(ring.components()) {
        if (c.rows(), c.cols()) != (rows, cols) {
            return Err(Error::DimensionMismatch(
                "component matrices differ in shape".into(),
            ));
        }
        if c.modulus() != pp.q {
            return Err(Error::ModulusMismatch {
                expected: pp.q,
                found: c.modulus(),
            });
        }
    }
    let mut residues = vec![0; ring.t()];
    let data = (0..rows * cols)
        .map(|k| {
            for (r, c) in residues.iter_mut().zip(components) {
                *r = c.data[k];
            }
            ring.crt_lift_unchecked(&residues)
        })
        .collect();
    Ok(Mat {
        modulus: ring.h(),
        rows,
        cols,
        data,
    })
}

/// Quotient `b / a` in Z_{p^s} when `v_p(a) <= v_p(b)`: the unique-up-to-
/// annihilator `c` with `c * a = b`. `a` must be nonzero.
pub(crate) fn local_quotient(b: u64, a: u64, p: u64, q: u64) -> u64 {
    if b == 0 {
        return 0;
    }
    let v = valuation(a, p);
    let pv = p.pow(v);
    let unit = inv_mod((a / pv) % q, q).expect("unit part is invertible");
    mul_mod((b / pv) % q, unit, q)
}

/// Determinant over Z_{p^s} by elimination with minimal-valuation pivots;
/// only exact divisions `b / a` with `v(a) <= v(b)` occur.
fn det_local(a: &Mat, p: u64) -> u64 {
    let q = a.modulus();
    let n = a.rows();
    let mut m = a.clone();
    let mut det = 1 % q;
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&r| m.get(r, k) != 0)
            .min_by_key(|&r| (valuation(m.get(r, k), p), r));
        let Some(pr) = pivot else {
            return 0;
        };
        if pr != k {
            m.swap_rows(pr, k);
            det = sub_mod(0, det, q);
        }
        let pv = m.get(k, k);
        det = mul_mod(det, pv, q);
        for r in k + 1..n {
            let f = local_quotient(m.get(r, k), pv, p, q);
            if f != 0 {
                m.row_axpy(r, k, f);
            }
        }
    }
    det
}

/// Inverse over Z_{p^s} by Gauss-Jordan; `None` when some column has no
/// unit pivot.
fn inverse_local(a: &Mat, p: u64) -> Option<Mat> {
    let q = a.modulus();
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = Mat::identity(q, n);
    for k in 0..n {
        let pr = (k..n).find(|&r| !m.get(r, k).is_multiple_of(p))?;
        m.swap_rows(pr, k);
        inv.swap_rows(pr, k);
        let u = inv_mod(m.get(k, k), q)?;
        m.scale_row(k, u);
        inv.scale_row(k, u);
        for r in 0..n {
            if r != k {
                let f = m.get(r, k);
                if f != 0 {
                    m.row_axpy(r, k, f);
                    inv.row_axpy(r, k, f);
                }
            }
        }
    }
    Some(inv)
}

fn check_square(a: &Mat) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

/// Determinant over Z_h, assembled by CRT from the prime-power components.
pub fn det(ring: &Ring, a: &Mat) -> Result<u64> {
    check_ring(ring, a)?;
    check_square(a)?;
    let residues: Vec<u64> = ring
        .components()
        .iter()
        .map(|c| det_local(&a.reduce_to(c.q), c.p))
        .collect();
    Ok(ring.crt_lift_unchecked(&residues))
}

pub fn is_invertible(ring: &Ring, a: &Mat) -> Result<bool> {
    Ok(ring.is_unit(det(ring, a)?))
}

/// Two-sided inverse over Z_h, if `A` is invertible.
pub fn inverse(ring: &Ring, a: &Mat) -> Result<Option<Mat>> {
    check_ring(ring, a)?;
    check_square(a)?;
    let mut parts = Vec::with_capacity(ring.t());
    for c in ring.components() {
        match inverse_local(&a.reduce_to(c.q), c.p) {
            Some(inv) => parts.push(inv),
            None => return Ok(None),
        }
    }
    crt_lift_mat(ring, &parts).map(Some)
}

pub fn random_matrix<R: Rng>(ring: &Ring, rows: usize, cols: usize, rng: &mut R) -> Mat {
    let data = (0..rows * cols).map(|_| rng.random_range(0..ring.h())).collect();
    Mat {
        modulus: ring.h(),
        rows,
        cols,
        data,
    }
}

/// Uniform element of GL_n(Z_h), by rejection sampling on uniform matrices.
pub fn random_invertible_with<R: Rng>(ring: &Ring, n: usize, rng: &mut R) -> Mat {
    loop {
        let m = random_matrix(ring, n, n, rng);
        if ring.is_unit(det(ring, &m).expect("square")) {
            return m;
        }
    }
}

/// Uniform element of GL_n(Z_h); deterministic in `seed`.
pub fn random_invertible(ring: &Ring, n: usize, seed: u64) -> Result<Mat> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    Ok(random_invertible_with(ring, n, &mut seeded_rng(seed)))
}

/// JSON representation: `{"h", "rows", "cols", "entries": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub h: u64,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}

impl From<Mat> for MatrixJson {
    fn from(m: Mat) -> Self {
        MatrixJson::from(&m)
    }
}

impl From<&Mat> for MatrixJson {
    fn from(m: &Mat) -> Self {
        MatrixJson {
            h: m.modulus(),
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_rows(),
        }
    }
}

impl TryFrom<MatrixJson> for Mat {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Mat> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::DimensionMismatch(format!(
                "entries do not form a {}x{} array",
                j.rows, j.cols
            )));
        }
        if let Some(&bad) = j.entries.iter().flatten().find(|&&x| x >= j.h) {
            return Err(Error::InvalidParameters(format!(
                "entry {bad} outside [0, {})",
                j.h
            )));
        }
        Mat::from_rows(j.h, &j.entries)
    }
}

/// CSV line: the entries in row-major order, comma separated.
pub fn to_csv_line(m: &Mat) -> String {
    m.data()
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn from_csv_line(line: &str, modulus: u64, rows: usize, cols: usize) -> Result<Mat> {
    let data = line
        .split(',')
        .map(|f| {
            let f = f.trim();
            f.parse::<u64>()
                .map_err(|_| Error::InvalidParameters(format!("bad CSV field {f:?}")))
        })
        .collect::<Result<Vec<u64>>>()?;
    if let Some(&bad) = data.iter().find(|&&x| x >= modulus) {
        return Err(Error::InvalidParameters(format!(
            "entry {bad} outside [0, {modulus})"
        )));
    }
    Mat::from_vec(modulus, rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z(h: u64) -> Ring {
        Ring::new(h).unwrap()
    }

    fn all_matrices(h: u64, rows: usize, cols: usize) -> impl Iterator<Item = Mat> {
        (0..space_size(h, rows, cols).unwrap()).map(move |i| Mat::from_index(h, rows, cols, i))
    }

    #[test]
    fn arithmetic_identities() {
        let r = z(12);
        let a = Mat::from_rows(12, &[[1, 7, 3], [11, 0, 5]]).unwrap();
        assert_eq!(a.add(&Mat::zeros(12, 2, 3)).unwrap(), a);
        assert_eq!(Mat::identity(12, 2).mul(&a).unwrap(), a);
        assert_eq!(a.sub(&a).unwrap(), Mat::zeros(12, 2, 3));
        assert_eq!(a.add(&a.neg()).unwrap(), Mat::zeros(12, 2, 3));
        assert!(a.mul(&a).is_err());
        assert!(a.add(&a.transpose()).is_err());
        assert!(det(&r, &a).is_err());
        let six = z(6);
        let d1 = Mat::diag(6, 2, 2, &[2, 3]);
        let d2 = Mat::diag(6, 2, 2, &[3, 2]);
        assert!(d1.mul(&d2).unwrap().is_zero());
        assert_eq!(det(&six, &d1).unwrap(), 0);
    }

    #[test]
    fn det_examples() {
        let r = z(12);
        assert_eq!(det(&r, &Mat::identity(12, 3)).unwrap(), 1);
        let a = Mat::from_rows(12, &[[1, 1], [0, 5]]).unwrap();
        assert_eq!(det(&r, &a).unwrap(), 5);
        assert!(is_invertible(&r, &a).unwrap());
        assert!(!is_invertible(&r, &Mat::diag(12, 2, 2, &[2, 1])).unwrap());
        assert!(is_invertible(&r, &Mat::identity(12, 4)).unwrap());
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        // 3x3 Leibniz formula over the integers, then reduced
        let r = z(36);
        let mut rng = seeded_rng(7);
        for _ in 0..2000 {
            let a = random_matrix(&r, 3, 3, &mut rng);
            let g = |i, j| a.get(i, j) as i128;
            let leibniz = g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0));
            assert_eq!(det(&r, &a).unwrap() as i128, leibniz.rem_euclid(36));
        }
    }

    #[test]
    fn invertibility_matches_two_sided_inverse_search() {
        for h in 2..=6 {
            let r = z(h);
            let all: Vec<Mat> = all_matrices(h, 2, 2).collect();
            let id = Mat::identity(h, 2);
            for a in &all {
                let brute = all
                    .iter()
                    .any(|b| a.mul(b).unwrap() == id && b.mul(a).unwrap() == id);
                assert_eq!(is_invertible(&r, a).unwrap(), brute, "h={h} {a:?}");
                let inv = inverse(&r, a).unwrap();
                assert_eq!(inv.is_some(), brute);
                if let Some(b) = inv {
                    assert_eq!(a.mul(&b).unwrap(), id);
                    assert_eq!(b.mul(a).unwrap(), id);
                }
            }
        }
    }

    #[test]
    fn gl2_z2_acceptance_rate() {
        let r = z(2);
        let count = all_matrices(2, 2, 2)
            .filter(|a| is_invertible(&r, a).unwrap())
            .count();
        assert_eq!(count, 6);
    }

    #[test]
    fn det_is_multiplicative() {
        for h in [4u64, 6, 12, 30, 49] {
            let r = z(h);
            let mut rng = seeded_rng(h);
            for _ in 0..1000 {
                let a = random_matrix(&r, 3, 3, &mut rng);
                let b = random_matrix(&r, 3, 3, &mut rng);
                let lhs = det(&r, &a.mul(&b).unwrap()).unwrap();
                let rhs = r.mul(det(&r, &a).unwrap(), det(&r, &b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn projections_and_lift() {
        let r = z(12);
        let a = Mat::identity(12, 2).scale(8);
        assert!(project_mat(&r, &a, 0).unwrap().is_zero());
        assert!(coproject_mat(&r, &a, 1).unwrap().is_zero());
        assert_eq!(coproject_mat(&r, &a, 1).unwrap().modulus(), 4);
        assert!(project_mat(&r, &a, 2).is_err());

        let lifted = crt_lift_mat(&r, &[Mat::identity(4, 2), Mat::identity(3, 2)]).unwrap();
        assert_eq!(lifted, Mat::identity(12, 2));
        let zero = crt_lift_mat(&r, &[Mat::zeros(4, 2, 2), Mat::zeros(3, 2, 2)]).unwrap();
        assert!(zero.is_zero());
        let five = crt_lift_mat(&r, &[Mat::identity(4, 2), Mat::identity(3, 2).scale(2)]).unwrap();
        assert_eq!(five, Mat::identity(12, 2).scale(5));
        assert!(crt_lift_mat(&r, &[Mat::identity(4, 2), Mat::identity(3, 3)]).is_err());
    }

    #[test]
    fn crt_lift_mat_is_a_bijection() {
        for h in 2..=12 {
            let r = z(h);
            for (rows, cols) in [(1, 1), (1, 2), (2, 2)] {
                let mut seen = std::collections::HashSet::new();
                for a in all_matrices(h, rows, cols) {
                    let parts: Vec<Mat> =
                        (0..r.t()).map(|i| project_mat(&r, &a, i).unwrap()).collect();
                    assert_eq!(crt_lift_mat(&r, &parts).unwrap(), a);
                    seen.insert(parts);
                }
                assert_eq!(seen.len() as u64, space_size(h, rows, cols).unwrap());
            }
        }
    }

    #[test]
    fn crt_lift_of_invertibles_is_invertible() {
        let r = z(60);
        let mut rng = seeded_rng(3);
        for _ in 0..200 {
            let parts: Vec<Mat> = (0..r.t())
                .map(|i| random_invertible_with(&r.prime_power_ring(i).unwrap(), 3, &mut rng))
                .collect();
            assert!(is_invertible(&r, &crt_lift_mat(&r, &parts).unwrap()).unwrap());
        }
    }

    #[test]
    fn random_invertible_contract() {
        let r = z(12);
        for seed in 0..20 {
            let u = random_invertible(&r, 1, seed).unwrap();
            assert!(r.is_unit(u.get(0, 0)));
            let a = random_invertible(&r, 3, seed).unwrap();
            assert_eq!(a, random_invertible(&r, 3, seed).unwrap());
            assert!(is_invertible(&r, &a).unwrap());
        }
        assert!(random_invertible(&r, 0, 0).is_err());
    }

    #[test]
    fn json_and_csv_formats() {
        let a = Mat::from_rows(6, &[[2, 0], [0, 3]]).unwrap();
        let j = MatrixJson::from(&a);
        assert_eq!(j.entries, vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(Mat::try_from(j).unwrap(), a);
        let bad = MatrixJson {
            h: 6,
            rows: 1,
            cols: 1,
            entries: vec![vec![6]],
        };
        assert!(Mat::try_from(bad).is_err());
        assert_eq!(to_csv_line(&a), "2,0,0,3");
        assert_eq!(from_csv_line("2, 0,0,3", 6, 2, 2).unwrap(), a);
        assert!(from_csv_line("2,0,0", 6, 2, 2).is_err());
        assert!(from_csv_line("2,0,0,x", 6, 2, 2).is_err());
    }

    proptest! {
        #[test]
        fn index_roundtrip(h in 2u64..20, rows in 1usize..4, cols in 1usize..4, seed: u64) {
            let r = z(h);
            let a = random_matrix(&r, rows, cols, &mut seeded_rng(seed));
            let idx = a.index().unwrap();
            prop_assert_eq!(Mat::from_index(h, rows, cols, idx), a);
        }

        #[test]
        fn index_order_matches_matrix_order(seed: u64) {
            let r = z(6);
            let mut rng = seeded_rng(seed);
            let a = random_matrix(&r, 2, 2, &mut rng);
            let b = random_matrix(&r, 2, 2, &mut rng);
            prop_assert_eq!(a.cmp(&b), a.index().cmp(&b.index()));
        }
    }
}
