//! `p`-torsion pieces: covers split at a cyclic vertex so that `H_1` carries
//! a `p`-group summand complementary to the two boundary classes.

use std::ops::ControlFlow;
use std::sync::Arc;

use super::{for_each_cover, split_cyclic, EdgeEnd, Precover, UnionFind};
use crate::error::{Error, Result};
use crate::gog::GraphOfGroups;
use crate::homology::{cyclic_vertex_image, h1, is_prime, AbelianGroup};

/// Homological evidence for a torsion piece.
///
/// With `A = H_1(piece)`, `S = ⟨[C1], [C2]⟩` and `T` the `p`-primary torsion
/// of `A`, `complementary_rank` is the `F_p`-rank of the image of `T` in
/// `A / (S + pA)`. It is positive exactly when `A = P ⊕ K` with `P` a
/// non-trivial `p`-group and `S ⊆ K`, so the summand `P` survives any
/// gluing that only adds relations among boundary classes and new
/// generators.
#[derive(Clone, Debug)]
pub struct TorsionCertificate {
    pub h1: AbelianGroup,
    /// `A / S`.
    pub quotient: AbelianGroup,
    pub complementary_rank: usize,
    /// `r_p(A / S)`; at least `complementary_rank`.
    pub quotient_p_rank: usize,
}

#[derive(Clone, Debug)]
pub struct TorsionPiece {
    pub piece: Precover,
    pub prime: u64,
    /// The two cyclic vertices produced by the split.
    pub boundary: (usize, usize),
    pub certificate: TorsionCertificate,
    /// The cover that was split.
    pub source: Precover,
    /// The split vertex of `source`.
    pub split_vertex: usize,
}

impl TorsionPiece {
    /// Recomputes the certificate from scratch and compares it with the
    /// stored one.
    pub fn recertify(&self) -> Result<bool> {
        let c = certify_piece(&self.piece, self.boundary, self.prime)?;
        Ok(c.complementary_rank >= 1
            && c.complementary_rank == self.certificate.complementary_rank
            && c.h1.same_invariants(&self.certificate.h1)
            && c.quotient.same_invariants(&self.certificate.quotient))
    }
}

/// Computes the certificate of `m` with boundary cyclic vertices
/// `boundary`. `m` must be connected.
pub fn certify_piece(m: &Precover, boundary: (usize, usize), p: u64) -> Result<TorsionCertificate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let total = m.total_graph();
    let a = h1(&total)?;
    let s = vec![cyclic_vertex_image(&total, &a, boundary.0)?, cyclic_vertex_image(&total, &a, boundary.1)?];
    let quotient = a.quotient_by(&s)?;
    let mut with_torsion = s;
    with_torsion.extend(a.p_primary_generators(p)?);
    let smaller = a.quotient_by(&with_torsion)?;
    let complementary_rank = quotient.mod_p_dimension(p)? - smaller.mod_p_dimension(p)?;
    let quotient_p_rank = quotient.p_rank(p)?;
    debug_assert!(quotient_p_rank >= complementary_rank);
    Ok(TorsionCertificate { h1: a, quotient, complementary_rank, quotient_p_rank })
}

/// Whether removing `v` disconnects the remaining total vertices.
pub fn is_cut_vertex(m: &Precover, v: usize) -> bool {
    let n = m.vertices().len();
    let mut uf = UnionFind::new(n);
    let mut parts = n - 1;
    for e in m.edges() {
        if e.ends.contains(&v) {
            continue;
        }
        if uf.union(e.ends[0], e.ends[1]) {
            parts -= 1;
        }
    }
    parts > 1
}

/// Scans connected covers of degree at most `max_index` (at most `cap` of
/// them) for a cyclic vertex that is not a cut vertex and whose split into
/// one incident edge end and the rest certifies a `p`-torsion piece.
pub fn find_torsion_piece(g: &Arc<GraphOfGroups>, p: u64, max_index: usize, cap: usize) -> Result<TorsionPiece> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut seen = 0usize;
    let mut found: Option<Result<TorsionPiece>> = None;
    let _ = for_each_cover(g, max_index, |m| {
        seen += 1;
        if seen > cap {
            return ControlFlow::Break(());
        }
        match piece_in(m, p) {
            Ok(None) => ControlFlow::Continue(()),
            Ok(Some(piece)) => {
                found = Some(Ok(piece));
                ControlFlow::Break(())
            }
            Err(e) => {
                found = Some(Err(e));
                ControlFlow::Break(())
            }
        }
    })?;
    match found {
        Some(r) => r,
        None => Err(Error::not_found(
            "torsion piece",
            format!("no {p}-torsion piece among {} covers of degree at most {max_index}", seen.min(cap)),
        )),
    }
}

fn piece_in(m: &Precover, p: u64) -> Result<Option<TorsionPiece>> {
    for v in 0..m.vertices().len() {
        if !m.is_cyclic(v) || is_cut_vertex(m, v) {
            continue;
        }
        let ends = m.incident(v);
        if ends.len() < 2 {
            continue;
        }
        for &(edge, side) in &ends {
            let piece = split_cyclic(m, v, &[EdgeEnd { edge, side }])?;
            if !piece.is_connected() {
                continue;
            }
            let boundary = (v, piece.vertices().len() - 1);
            let certificate = certify_piece(&piece, boundary, p)?;
            if certificate.complementary_rank >= 1 {
                return Ok(Some(TorsionPiece {
                    piece,
                    prime: p,
                    boundary,
                    certificate,
                    source: m.clone(),
                    split_vertex: v,
                }));
            }
        }
    }
    Ok(None)
}
