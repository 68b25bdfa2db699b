//! Small graphs of groups used by tests, benches and the command line.

use crate::gog::GraphOfGroups;

/// HNN extension of `Z = ⟨a⟩` identifying `a` with `a^3`; `H_1 = Z ⊕ Z/2`.
pub fn hnn_f1() -> GraphOfGroups {
    GraphOfGroups::builder().vertex("c", 1).edge("t", "c", "c", &[1], &[1, 1, 1]).build().expect("valid fixture")
}

/// The genus-2 surface group split along a separating curve: two free
/// groups of rank 2 amalgamated over their commutators; `H_1 = Z^4`.
pub fn genus2() -> GraphOfGroups {
    GraphOfGroups::builder()
        .vertex("u", 2)
        .vertex("v", 2)
        .edge("s", "u", "v", &[1, 2, -1, -2], &[1, 2, -1, -2])
        .build()
        .expect("valid fixture")
}

/// A rank-2 vertex `X` joined to two cyclic vertices. Its identity cover
/// already has 2-torsion in `H_1 = Z^3 ⊕ Z/2`, and splitting `C` between
/// its two edges gives a 2-torsion piece.
pub fn seeded_torsion() -> GraphOfGroups {
    GraphOfGroups::builder()
        .vertex("X", 2)
        .vertex("C", 1)
        .vertex("D", 1)
        .edge("c1", "X", "C", &[2], &[1])
        .edge("c2", "X", "C", &[1, 1, 2], &[1])
        .edge("d1", "X", "D", &[1, 2, 1, -2], &[1])
        .edge("d2", "X", "D", &[1, 2, -1, -2], &[1])
        .base("X")
        .build()
        .expect("valid fixture")
}
