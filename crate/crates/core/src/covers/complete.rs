//! Bounded completion of precovers to connected covers.

use std::collections::BTreeMap;

use super::{fresh_name, HangingSlot, Lift, Precover, TotalEdge, TotalVertex, UnionFind};
use crate::cosets::enumerate_subgroups;
use crate::error::{Error, Result};
use crate::gog::VertexKind;

/// Search limits for [`complete`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletionBound {
    /// Extra total vertices that may be added.
    pub max_pieces: usize,
    /// Largest index of an added vertex group.
    pub max_index: usize,
    /// Candidate multisets of added vertices examined before giving up.
    pub max_candidates: usize,
}

impl CompletionBound {
    /// At most `b` added vertices of index at most `b`.
    pub fn desk(b: usize) -> CompletionBound {
        CompletionBound { max_pieces: b, max_index: b.max(1), max_candidates: 100_000 }
    }
}

impl Default for CompletionBound {
    fn default() -> Self {
        CompletionBound::desk(3)
    }
}

/// Completes `m` to a connected cover containing it.
///
/// Adds multisets of isolated total vertices (every lift of index at most
/// `max_index`), smallest first, until the hanging slots balance for every
/// (edge, degree) class, then matches them greedily, preferring matches
/// that join different components. Failure means only that nothing was
/// found within the bound.
pub fn complete(m: &Precover, bound: &CompletionBound) -> Result<Precover> {
    let report = m.validate();
    if !report.is_ok() {
        return Err(Error::InvalidPrecover(report));
    }
    if m.is_cover() {
        return Ok(m.clone());
    }
    let g = m.base().clone();
    let mut inventory: Vec<(usize, Lift)> = Vec::new();
    if bound.max_pieces > 0 {
        for (v, vertex) in g.vertices().iter().enumerate() {
            match vertex.kind {
                VertexKind::Cyclic => inventory.extend((1..=bound.max_index).map(|d| (v, Lift::Cyclic(d)))),
                VertexKind::NonCyclic => inventory.extend(
                    enumerate_subgroups(vertex.rank, bound.max_index, 1_000_000)?
                        .into_iter()
                        .map(|t| (v, Lift::Table(t))),
                ),
            }
        }
    }
    let profiles: Vec<BTreeMap<(usize, usize), i64>> =
        inventory.iter().map(|(v, lift)| balance(&lone_slots(m, *v, lift))).collect();
    let start = balance(&m.hanging_slots());

    let mut examined = 0usize;
    for k in 0..=bound.max_pieces {
        let mut chosen = Vec::new();
        if let Some(found) = search(m, &inventory, &profiles, &start, k, 0, &mut chosen, &mut examined, bound)? {
            debug_assert!(found.degree().is_ok_and(|d| d >= m.predegree()));
            return Ok(found);
        }
    }
    Err(Error::not_found(
        "completion",
        format!("no connected completion with at most {} added vertices of index at most {}", bound.max_pieces, bound.max_index),
    ))
}

/// Side-0 minus side-1 slot counts per (edge pair, degree).
fn balance(slots: &[HangingSlot]) -> BTreeMap<(usize, usize), i64> {
    let mut out = BTreeMap::new();
    for s in slots {
        *out.entry((s.pair, s.degree)).or_insert(0) += if s.side == 0 { 1 } else { -1 };
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Every elevation at an isolated total vertex over `over`.
fn lone_slots(m: &Precover, over: usize, lift: &Lift) -> Vec<HangingSlot> {
    let g = m.base();
    let table = lift.table();
    let mut out = Vec::new();
    for (pair, e) in g.edges().iter().enumerate() {
        for side in 0..2 {
            if e.ends[side] == over {
                for cycle in table.word_cycles(&e.words[side]) {
                    out.push(HangingSlot { vertex: 0, pair, side, anchor: cycle[0], degree: cycle.len() });
                }
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn search(
    m: &Precover,
    inventory: &[(usize, Lift)],
    profiles: &[BTreeMap<(usize, usize), i64>],
    acc: &BTreeMap<(usize, usize), i64>,
    left: usize,
    from: usize,
    chosen: &mut Vec<usize>,
    examined: &mut usize,
    bound: &CompletionBound,
) -> Result<Option<Precover>> {
    if left == 0 {
        *examined += 1;
        if *examined > bound.max_candidates {
            return Err(Error::not_found("completion", format!("candidate bound {} exhausted", bound.max_candidates)));
        }
        if !acc.is_empty() {
            return Ok(None);
        }
        return Ok(assemble(m, inventory, chosen));
    }
    for i in from..inventory.len() {
        let mut next = acc.clone();
        for (key, c) in &profiles[i] {
            *next.entry(*key).or_insert(0) += c;
        }
        next.retain(|_, c| *c != 0);
        chosen.push(i);
        let r = search(m, inventory, profiles, &next, left - 1, i, chosen, examined, bound)?;
        chosen.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

fn assemble(m: &Precover, inventory: &[(usize, Lift)], chosen: &[usize]) -> Option<Precover> {
    let mut out = m.clone();
    for &i in chosen {
        let (over, lift) = &inventory[i];
        let name = fresh_name(out.vertices.iter().map(|v| v.name.clone()), &format!("{}+", m.base().vertex(*over).name));
        out.vertices.push(TotalVertex { name, over: *over, lift: lift.clone() });
    }
    let mut groups: BTreeMap<(usize, usize), [Vec<HangingSlot>; 2]> = BTreeMap::new();
    for s in out.hanging_slots() {
        groups.entry((s.pair, s.degree)).or_default()[s.side].push(s);
    }
    let mut uf = UnionFind::new(out.vertices.len());
    for e in &out.edges {
        uf.union(e.ends[0], e.ends[1]);
    }
    for ((pair, _), [left, right]) in groups {
        debug_assert_eq!(left.len(), right.len());
        let mut used = vec![false; right.len()];
        for a in &left {
            let pick = (0..right.len())
                .filter(|&j| !used[j])
                .min_by_key(|&j| uf.find(right[j].vertex) == uf.find(a.vertex))
                .expect("balanced slot counts");
            used[pick] = true;
            let b = right[pick];
            uf.union(a.vertex, b.vertex);
            let name = fresh_name(out.edges.iter().map(|e| e.name.clone()), &format!("{}~", m.base().edge(pair).name));
            out.edges.push(TotalEdge { name, over: pair, ends: [a.vertex, b.vertex], anchors: [a.anchor, b.anchor] });
        }
    }
    (out.validate_cover().is_ok() && out.is_connected()).then_some(out)
}
