//! Fixed, seeded workloads shared by the benchmarks.

use gogwork::homology::IntMatrix;

/// A deterministic `n × n` integer matrix with entries in `-9..=9`.
pub fn pseudo_random_matrix(n: usize, seed: u64) -> IntMatrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            row.push(((state >> 33) % 19) as i64 - 9);
        }
        rows.push(row);
    }
    IntMatrix::from_rows(&rows, n)
}
