//! Inputs shared by the benchmarks.

use bilzh_core::graph::GraphSpec;
use bilzh_core::matrix::{random_matrix, seeded_rng, Mat};
use bilzh_core::ring::Ring;

/// `count` random `rows x cols` matrices over Z_h from a fixed seed.
pub fn sample_matrices(h: u64, rows: usize, cols: usize, count: usize) -> (Ring, Vec<Mat>) {
    let ring = Ring::new(h).expect("valid modulus");
    let mut rng = seeded_rng(7);
    let mats = (0..count).map(|_| random_matrix(&ring, rows, cols, &mut rng)).collect();
    (ring, mats)
}

pub fn spec(h: u64, m: usize, n: usize, r: usize) -> GraphSpec {
    GraphSpec::new(Ring::new(h).expect("valid modulus"), m, n, r).expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible() {
        let (_, a) = sample_matrices(12, 3, 3, 4);
        let (_, b) = sample_matrices(12, 3, 3, 4);
        assert_eq!(a, b);
        assert_eq!(spec(6, 2, 2, 1).vertex_count(), Some(1296));
    }
}
