//! Cut-and-paste operations on precovers.

use std::collections::HashSet;

use super::{disjoint_union, fresh_name, HangingSlot, Precover, TotalEdge, TotalVertex, TorsionPiece};
use crate::error::{Error, Result};

/// A hanging slot of one part of a splice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub part: usize,
    pub slot: HangingSlot,
}

/// One end of a total edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub side: usize,
}

/// Disjoint union of `ms` with each matched pair of hanging slots fused
/// into a new edge.
pub fn splice(ms: &[Precover], matches: &[(SlotRef, SlotRef)]) -> Result<Precover> {
    let parts: Vec<&Precover> = ms.iter().collect();
    let (mut m, offsets) = disjoint_union(&parts)?;
    let hanging: Vec<HashSet<HangingSlot>> = ms.iter().map(|p| p.hanging_slots().into_iter().collect()).collect();
    let mut used = HashSet::new();
    for (a, b) in matches {
        for r in [a, b] {
            if !hanging.get(r.part).is_some_and(|h| h.contains(&r.slot)) {
                return Err(Error::Surgery(format!("slot {:?} of part {} is not hanging", r.slot, r.part)));
            }
            if !used.insert(*r) {
                return Err(Error::Surgery(format!("slot {:?} of part {} used twice", r.slot, r.part)));
            }
        }
        let (sa, sb) = (a.slot, b.slot);
        if sa.pair != sb.pair {
            return Err(Error::Surgery(format!(
                "slots lie over different edges {} and {}",
                m.base.edge(sa.pair).name,
                m.base.edge(sb.pair).name
            )));
        }
        if sa.side == sb.side {
            return Err(Error::Surgery("matched slots lie on the same side".into()));
        }
        if sa.degree != sb.degree {
            return Err(Error::Surgery(format!("degree mismatch: {} vs {}", sa.degree, sb.degree)));
        }
        let (s0, s1) = if sa.side == 0 { (a, b) } else { (b, a) };
        let ends = [s0.slot.vertex + offsets[s0.part].0, s1.slot.vertex + offsets[s1.part].0];
        let name = fresh_name(m.edges.iter().map(|e| e.name.clone()), &format!("{}~", m.base.edge(sa.pair).name));
        m.edges.push(TotalEdge { name, over: sa.pair, ends, anchors: [s0.slot.anchor, s1.slot.anchor] });
    }
    debug_assert!(m.validate().is_ok());
    debug_assert!(m.predegree() <= ms.iter().map(Precover::predegree).sum());
    Ok(m)
}

/// Replaces cyclic vertex `c` by `c/1`, keeping the ends in `part1`, and a
/// new vertex `c/2` receiving the remaining incident ends.
pub fn split_cyclic(m: &Precover, c: usize, part1: &[EdgeEnd]) -> Result<Precover> {
    if c >= m.vertices.len() {
        return Err(Error::UnknownName { kind: "total vertex", name: format!("#{c}") });
    }
    if !m.is_cyclic(c) {
        return Err(Error::Surgery(format!("vertex {} is not cyclic", m.vertices[c].name)));
    }
    let incident: Vec<EdgeEnd> = m.incident(c).into_iter().map(|(edge, side)| EdgeEnd { edge, side }).collect();
    let part1: HashSet<EdgeEnd> = part1.iter().copied().collect();
    if let Some(bad) = part1.iter().find(|e| !incident.contains(e)) {
        return Err(Error::Surgery(format!("edge end {bad:?} is not incident to {}", m.vertices[c].name)));
    }
    if part1.is_empty() || part1.len() == incident.len() {
        return Err(Error::Surgery("both parts of a split must be non-empty".into()));
    }
    let mut out = m.clone();
    let name = m.vertices[c].name.clone();
    out.vertices[c].name = fresh_vertex_name(m, &format!("{name}/1"));
    let c2 = out.vertices.len();
    out.vertices.push(TotalVertex { name: fresh_vertex_name(m, &format!("{name}/2")), ..m.vertices[c].clone() });
    for end in incident.iter().filter(|e| !part1.contains(e)) {
        out.edges[end.edge].ends[end.side] = c2;
    }
    debug_assert!(out.validate().is_ok());
    Ok(out)
}

fn fresh_vertex_name(m: &Precover, want: &str) -> String {
    if m.vertices.iter().all(|v| v.name != want) {
        want.to_string()
    } else {
        fresh_name(m.vertices.iter().map(|v| v.name.clone()), &format!("{want}."))
    }
}

/// Fuses cyclic vertices `c1` and `c2`; the result keeps `c1`'s name and
/// position.
pub fn merge_cyclic(m: &Precover, c1: usize, c2: usize) -> Result<Precover> {
    let n = m.vertices.len();
    if c1 >= n || c2 >= n {
        return Err(Error::UnknownName { kind: "total vertex", name: format!("#{}", c1.max(c2)) });
    }
    if c1 == c2 {
        return Err(Error::Surgery("cannot merge a vertex with itself".into()));
    }
    let (v1, v2) = (&m.vertices[c1], &m.vertices[c2]);
    if !m.is_cyclic(c1) || !m.is_cyclic(c2) {
        return Err(Error::Surgery("only cyclic vertices can be merged".into()));
    }
    if v1.over != v2.over {
        return Err(Error::Surgery(format!("{} and {} lie over distinct base vertices", v1.name, v2.name)));
    }
    if v1.lift != v2.lift {
        return Err(Error::Surgery(format!(
            "index mismatch: {} has index {}, {} has index {}",
            v1.name,
            v1.lift.index(),
            v2.name,
            v2.lift.index()
        )));
    }
    let realized = |v: usize| -> HashSet<(usize, usize, usize)> {
        m.incident(v).into_iter().map(|(e, s)| (m.edges[e].over, s, m.edges[e].anchors[s])).collect()
    };
    if !realized(c1).is_disjoint(&realized(c2)) {
        return Err(Error::Surgery(format!("{} and {} realize a common elevation", v1.name, v2.name)));
    }
    let mut out = m.clone();
    for e in &mut out.edges {
        for v in &mut e.ends {
            if *v == c2 {
                *v = c1;
            }
        }
    }
    let keep: Vec<bool> = (0..n).map(|v| v != c2).collect();
    let mut out = out.induced(&keep);
    if m.base_vertex == c2 {
        out.base_vertex = if c1 > c2 { c1 - 1 } else { c1 };
    }
    Ok(out)
}

/// Removes an edge joining a cyclic and a non-cyclic vertex, leaving one
/// hanging slot on each side.
pub fn detach_edge(m: &Precover, e: usize) -> Result<Precover> {
    let Some(edge) = m.edges.get(e) else {
        return Err(Error::UnknownName { kind: "total edge", name: format!("#{e}") });
    };
    if m.is_cyclic(edge.ends[0]) == m.is_cyclic(edge.ends[1]) {
        return Err(Error::Surgery(format!("edge {} does not join a cyclic and a non-cyclic vertex", edge.name)));
    }
    Ok(remove_edge(m, e))
}

pub(crate) fn remove_edge(m: &Precover, e: usize) -> Precover {
    let mut out = m.clone();
    out.edges.remove(e);
    out
}

/// A chain of torsion pieces with its two open boundary vertices.
#[derive(Clone, Debug)]
pub struct Chain {
    pub precover: Precover,
    /// `C2` of the first copy.
    pub first: usize,
    /// `C1` of the last copy.
    pub last: usize,
}

/// `copies` copies of the piece, `C1` of each copy merged with `C2` of the
/// next.
pub fn chain(piece: &TorsionPiece, copies: usize) -> Result<Chain> {
    if copies == 0 {
        return Err(Error::Surgery("a chain needs at least one copy".into()));
    }
    let parts: Vec<&Precover> = std::iter::repeat_n(&piece.piece, copies).collect();
    let (mut m, offsets) = disjoint_union(&parts)?;
    let (c1, c2) = piece.boundary;
    let n = piece.piece.vertices.len();
    // Merging C1 of copy i into C2 of copy i+1 removes C2 of copy i+1; track
    // positions through the removals.
    let mut alive: Vec<usize> = (0..n * copies).collect();
    let pos = |alive: &Vec<usize>, v: usize| alive.iter().position(|&x| x == v).expect("vertex alive");
    for i in 0..copies - 1 {
        let a = offsets[i].0 + c1;
        let b = offsets[i + 1].0 + c2;
        let (pa, pb) = (pos(&alive, a), pos(&alive, b));
        m = merge_cyclic(&m, pa, pb)?;
        alive.remove(pb);
    }
    let first = pos(&alive, offsets[0].0 + c2);
    let last = pos(&alive, offsets[copies - 1].0 + c1);
    debug_assert!(m.predegree() <= copies * piece.piece.predegree());
    Ok(Chain { precover: m, first, last })
}

/// A chain closed up by merging its two open ends (the source cover when
/// `copies == 1`).
pub fn ring(piece: &TorsionPiece, copies: usize) -> Result<Precover> {
    let c = chain(piece, copies)?;
    merge_cyclic(&c.precover, c.last, c.first)
}

/// Glues `x` and `y` by cutting edge `ex` of `x` and `ey` of `y` (over the
/// same base pair, of equal degree) and reconnecting crosswise.
pub fn swap_glue(x: &Precover, y: &Precover, ex: usize, ey: usize) -> Result<Precover> {
    let (a, b) = (&x.edges[ex], &y.edges[ey]);
    if a.over != b.over {
        return Err(Error::Surgery("swap edges lie over different base edges".into()));
    }
    if x.edge_degree(ex) != y.edge_degree(ey) {
        return Err(Error::Surgery("swap edges have different degrees".into()));
    }
    let xs = remove_edge(x, ex);
    let ys = remove_edge(y, ey);
    let slot = |e: &TotalEdge, side: usize, degree| HangingSlot {
        vertex: e.ends[side],
        pair: e.over,
        side,
        anchor: e.anchors[side],
        degree,
    };
    let d = x.edge_degree(ex);
    splice(
        &[xs.clone(), ys.clone()],
        &[
            (SlotRef { part: 0, slot: slot(a, 0, d) }, SlotRef { part: 1, slot: slot(b, 1, d) }),
            (SlotRef { part: 1, slot: slot(b, 0, d) }, SlotRef { part: 0, slot: slot(a, 1, d) }),
        ],
    )
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::is_isomorphic;
    use super::super::Lift;
    use super::*;
    use crate::fixtures;

    fn seeded() -> Precover {
        Precover::identity(Arc::new(fixtures::seeded_torsion()))
    }

    fn reattach(d: &Precover) -> Precover {
        let slots = d.hanging_slots();
        assert_eq!(slots.len(), 2);
        let (s0, s1) = if slots[0].side == 0 { (slots[0], slots[1]) } else { (slots[1], slots[0]) };
        splice(std::slice::from_ref(d), &[(SlotRef { part: 0, slot: s0 }, SlotRef { part: 0, slot: s1 })]).unwrap()
    }

    #[test]
    fn splice_two_detached_copies() {
        let d = detach_edge(&seeded(), 0).unwrap();
        let slots = d.hanging_slots();
        let (s0, s1) = if slots[0].side == 0 { (slots[0], slots[1]) } else { (slots[1], slots[0]) };
        let m = splice(
            &[d.clone(), d.clone()],
            &[
                (SlotRef { part: 0, slot: s0 }, SlotRef { part: 1, slot: s1 }),
                (SlotRef { part: 1, slot: s0 }, SlotRef { part: 0, slot: s1 }),
            ],
        )
        .unwrap();
        assert!(m.validate().is_ok());
        assert!(m.hanging_slots().is_empty());
        assert!(m.is_connected());
        assert_eq!(m.degree().unwrap(), 2);
    }

    #[test]
    fn splice_without_matches_is_union() {
        let m = seeded();
        let u = splice(&[m.clone(), m.clone()], &[]).unwrap();
        assert_eq!(u.vertices().len(), 2 * m.vertices().len());
        assert_eq!(u.components().iter().max(), Some(&1));
    }

    #[test]
    fn splice_rejects_degree_mismatch() {
        let g = Arc::new(fixtures::hnn_f1());
        let two = Precover::new(
            g.clone(),
            vec![TotalVertex { name: "c".into(), over: 0, lift: Lift::Cyclic(3) }],
            vec![],
            0,
        )
        .unwrap();
        // Side 0 ([a]) has one slot of degree 3, side 1 ([a³]) three of degree 1.
        let slots = two.hanging_slots();
        let s0 = *slots.iter().find(|s| s.side == 0).unwrap();
        let s1 = *slots.iter().find(|s| s.side == 1).unwrap();
        let err = splice(&[two], &[(SlotRef { part: 0, slot: s0 }, SlotRef { part: 0, slot: s1 })]);
        assert!(matches!(err, Err(Error::Surgery(msg)) if msg.contains("degree mismatch")));
    }

    #[test]
    fn split_valences() {
        let m = seeded();
        let c = m.vertex_index("C").unwrap();
        let ends = m.incident(c);
        assert_eq!(ends.len(), 2);
        let s = split_cyclic(&m, c, &[EdgeEnd { edge: ends[0].0, side: ends[0].1 }]).unwrap();
        assert_eq!(s.incident(c).len(), 1);
        assert_eq!(s.incident(s.vertices().len() - 1).len(), 1);
        assert!(split_cyclic(&m, m.vertex_index("X").unwrap(), &[]).is_err());
        assert!(split_cyclic(&m, c, &[]).is_err());
    }

    #[test]
    fn split_three_two_one() {
        let g = Arc::new(
            crate::gog::GraphOfGroups::builder()
                .vertex("X", 2)
                .vertex("C", 1)
                .edge("e1", "X", "C", &[1], &[1])
                .edge("e2", "X", "C", &[2], &[1])
                .edge("e3", "X", "C", &[1, 2], &[1])
                .build()
                .unwrap(),
        );
        let m = Precover::identity(g);
        let c = m.vertex_index("C").unwrap();
        let s = split_cyclic(&m, c, &[EdgeEnd { edge: 0, side: 1 }, EdgeEnd { edge: 1, side: 1 }]).unwrap();
        assert_eq!(s.incident(c).len(), 2);
        assert_eq!(s.incident(s.vertices().len() - 1).len(), 1);
    }

    #[test]
    fn merge_inverts_split() {
        let m = seeded();
        let c = m.vertex_index("C").unwrap();
        let ends = m.incident(c);
        let s = split_cyclic(&m, c, &[EdgeEnd { edge: ends[0].0, side: ends[0].1 }]).unwrap();
        let back = merge_cyclic(&s, c, s.vertices().len() - 1).unwrap();
        assert!(is_isomorphic(&back, &m));
    }

    #[test]
    fn merge_index_mismatch() {
        let g = Arc::new(fixtures::hnn_f1());
        let m = Precover::new(
            g,
            vec![
                TotalVertex { name: "a".into(), over: 0, lift: Lift::Cyclic(1) },
                TotalVertex { name: "b".into(), over: 0, lift: Lift::Cyclic(2) },
            ],
            vec![],
            0,
        )
        .unwrap();
        assert!(matches!(merge_cyclic(&m, 0, 1), Err(Error::Surgery(msg)) if msg.contains("index mismatch")));
    }

    #[test]
    fn detach_then_splice_back() {
        let m = seeded();
        for e in 0..m.edges().len() {
            let d = detach_edge(&m, e).unwrap();
            assert_eq!(d.hanging_slots().len(), 2);
            assert_eq!(d.predegree(), 1);
            assert!(is_isomorphic(&reattach(&d), &m));
        }
        let g2 = Precover::identity(Arc::new(fixtures::genus2()));
        assert!(detach_edge(&g2, 0).is_err());
    }

    #[test]
    fn swap_glue_connects_two_covers() {
        let m = seeded();
        let glued = swap_glue(&m, &m, 0, 0).unwrap();
        assert!(glued.validate_cover().is_ok());
        assert_eq!(glued.degree().unwrap(), 2);
    }
}
