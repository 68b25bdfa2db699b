//! Exhaustive enumeration of small connected covers.

use std::ops::ControlFlow;
use std::sync::Arc;

use super::{Lift, Precover, TotalEdge, TotalVertex, UnionFind};
use crate::cosets::enumerate_subgroups;
use crate::error::{Error, Result};
use crate::gog::{GraphOfGroups, VertexKind};

/// Visits connected covers of degree `1..=max_index`, by degree.
///
/// For each degree, every base vertex receives a multiset of lifts (one
/// table per conjugacy class of subgroups, repetition allowed) whose indices
/// sum to the degree; then every degree-preserving bijection between the
/// two sides' elevations of every edge pair is tried. Covers are labelled:
/// isomorphic covers may appear more than once.
pub fn for_each_cover<F>(g: &Arc<GraphOfGroups>, max_index: usize, mut f: F) -> Result<ControlFlow<()>>
where
    F: FnMut(&Precover) -> ControlFlow<()>,
{
    let mut catalog: Vec<Vec<Lift>> = Vec::new();
    for v in g.vertices() {
        let lifts = match v.kind {
            VertexKind::Cyclic => (1..=max_index).map(Lift::Cyclic).collect(),
            VertexKind::NonCyclic => {
                enumerate_subgroups(v.rank, max_index, 1_000_000)?.into_iter().map(Lift::Table).collect()
            }
        };
        catalog.push(lifts);
    }
    for n in 1..=max_index {
        let per_vertex: Vec<Vec<Vec<usize>>> = catalog.iter().map(|lifts| multisets(lifts, n)).collect();
        let mut choice = vec![0usize; per_vertex.len()];
        if per_vertex.iter().any(Vec::is_empty) {
            continue;
        }
        loop {
            let mut vertices = Vec::new();
            for (v, options) in per_vertex.iter().enumerate() {
                for (k, &i) in options[choice[v]].iter().enumerate() {
                    vertices.push(TotalVertex {
                        name: format!("{}.{}", g.vertex(v).name, k),
                        over: v,
                        lift: catalog[v][i].clone(),
                    });
                }
            }
            if let ControlFlow::Break(()) = match_edges(g, vertices, &mut f) {
                return Ok(ControlFlow::Break(()));
            }
            if !advance(&mut choice, &per_vertex) {
                break;
            }
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Collects [`for_each_cover`], failing when more than `cap` covers exist.
pub fn enumerate_covers(g: &Arc<GraphOfGroups>, max_index: usize, cap: usize) -> Result<Vec<Precover>> {
    let mut out = Vec::new();
    let flow = for_each_cover(g, max_index, |m| {
        if out.len() == cap {
            return ControlFlow::Break(());
        }
        out.push(m.clone());
        ControlFlow::Continue(())
    })?;
    if flow.is_break() {
        return Err(Error::ResourceBound(format!("more than {cap} covers up to degree {max_index}")));
    }
    Ok(out)
}

fn advance(choice: &mut [usize], options: &[Vec<Vec<usize>>]) -> bool {
    for (c, o) in choice.iter_mut().zip(options).rev() {
        *c += 1;
        if *c < o.len() {
            return true;
        }
        *c = 0;
    }
    false
}

/// Non-decreasing index sequences into `lifts` with total index `n`.
fn multisets(lifts: &[Lift], n: usize) -> Vec<Vec<usize>> {
    fn rec(lifts: &[Lift], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..lifts.len() {
            let k = lifts[i].index();
            if k <= left {
                cur.push(i);
                rec(lifts, i, left - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(lifts, 0, n, &mut Vec::new(), &mut out);
    out
}

/// (vertex, anchor, degree) for each elevation on one side of a pair.
fn side_slots(g: &GraphOfGroups, vertices: &[TotalVertex], pair: usize, side: usize) -> Vec<(usize, usize, usize)> {
    let e = g.edge(pair);
    let mut out = Vec::new();
    for (v, tv) in vertices.iter().enumerate() {
        if tv.over == e.ends[side] {
            for cycle in tv.lift.table().word_cycles(&e.words[side]) {
                out.push((v, cycle[0], cycle.len()));
            }
        }
    }
    out
}

fn match_edges<F>(g: &Arc<GraphOfGroups>, vertices: Vec<TotalVertex>, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&Precover) -> ControlFlow<()>,
{
    let sides: Vec<[Vec<(usize, usize, usize)>; 2]> =
        (0..g.edges().len()).map(|p| [side_slots(g, &vertices, p, 0), side_slots(g, &vertices, p, 1)]).collect();
    let mut edges = Vec::new();
    rec_pairs(g, &vertices, &sides, 0, &mut edges, f)
}

fn rec_pairs<F>(
    g: &Arc<GraphOfGroups>,
    vertices: &[TotalVertex],
    sides: &[[Vec<(usize, usize, usize)>; 2]],
    pair: usize,
    edges: &mut Vec<TotalEdge>,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Precover) -> ControlFlow<()>,
{
    if pair == sides.len() {
        let mut uf = UnionFind::new(vertices.len());
        let mut parts = vertices.len();
        for e in edges.iter() {
            if uf.union(e.ends[0], e.ends[1]) {
                parts -= 1;
            }
        }
        if parts != 1 {
            return ControlFlow::Continue(());
        }
        let bv = vertices.iter().position(|v| v.over == g.base()).expect("every base vertex is lifted");
        let m = Precover::from_parts(g.clone(), vertices.to_vec(), edges.clone(), bv);
        debug_assert!(m.validate_cover().is_ok());
        return f(&m);
    }
    let [left, right] = &sides[pair];
    if left.len() != right.len() {
        return ControlFlow::Continue(());
    }
    let mut used = vec![false; right.len()];
    let base_len = edges.len();
    rec_bijection(g, vertices, sides, pair, 0, &mut used, edges, base_len, f)
}

#[allow(clippy::too_many_arguments)]
fn rec_bijection<F>(
    g: &Arc<GraphOfGroups>,
    vertices: &[TotalVertex],
    sides: &[[Vec<(usize, usize, usize)>; 2]],
    pair: usize,
    i: usize,
    used: &mut Vec<bool>,
    edges: &mut Vec<TotalEdge>,
    base_len: usize,
    f: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&Precover) -> ControlFlow<()>,
{
    let [left, right] = &sides[pair];
    if i == left.len() {
        return rec_pairs(g, vertices, sides, pair + 1, edges, f);
    }
    let (v0, a0, d0) = left[i];
    for j in 0..right.len() {
        let (v1, a1, d1) = right[j];
        if used[j] || d1 != d0 {
            continue;
        }
        used[j] = true;
        edges.push(TotalEdge {
            name: format!("{}.{}", g.edge(pair).name, edges.len() - base_len),
            over: pair,
            ends: [v0, v1],
            anchors: [a0, a1],
        });
        let flow = rec_bijection(g, vertices, sides, pair, i + 1, used, edges, base_len, f);
        edges.pop();
        used[j] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gog::euler_characteristic;

    fn count_connected(g: &GraphOfGroups, n: usize) -> usize {
        let g = Arc::new(g.clone());
        enumerate_covers(&g, n, 100_000).unwrap().iter().filter(|m| m.degree().unwrap() == n).count()
    }

    /// Connected labelled double covers of the HNN extension of `Z` with
    /// both edge words `[1]`: cyclic index 2 with its single loop, or two
    /// index-1 lifts whose two degree-1 slots per side are matched by a
    /// bijection that connects them.
    #[test]
    fn hnn_trivial_double_covers() {
        let g = GraphOfGroups::builder().vertex("c", 1).edge("t", "c", "c", &[1], &[1]).build().unwrap();
        // Oracle: for {index 2}, one bijection of the single degree-2 slots;
        // for {1, 1}, of the 2! bijections only the swap is connected.
        assert_eq!(count_connected(&g, 2), 2);
    }

    #[test]
    fn max_index_one_is_identity() {
        for g in [fixtures::hnn_f1(), fixtures::genus2(), fixtures::seeded_torsion()] {
            let g = Arc::new(g);
            let all = enumerate_covers(&g, 1, 10).unwrap();
            assert_eq!(all.len(), 1);
            assert!(super::super::is_isomorphic(&all[0], &Precover::identity(g)));
        }
    }

    #[test]
    fn genus2_covers_multiply_euler_characteristic() {
        let g = Arc::new(fixtures::genus2());
        let covers = enumerate_covers(&g, 2, 100_000).unwrap();
        assert!(covers.iter().any(|m| m.degree().unwrap() == 2));
        for m in covers {
            assert!(m.validate_cover().is_ok());
            let d = m.degree().unwrap() as i64;
            assert_eq!(euler_characteristic(&m.total_graph()), d * euler_characteristic(&g));
        }
    }

    #[test]
    fn cap_enforced() {
        let g = Arc::new(fixtures::genus2());
        assert!(matches!(enumerate_covers(&g, 2, 1), Err(Error::ResourceBound(_))));
    }
}
