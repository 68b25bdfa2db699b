//! Lifting edge-path words through precovers.

use super::Precover;
use crate::cosets::{schreier, Schreier};
use crate::error::{Error, Result};
use crate::gog::{GogWord, OrientedEdge};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    /// The lift closes up; the lifted loop in the total graph.
    InSubgroup(GogWord),
    /// The lift leaves the precover at edge `position` (a hanging slot), or
    /// fails to close when `position` equals the number of edges.
    ExitsAt(usize),
}

/// Lifts `w`, a loop at the base vertex of `m`'s base graph, to the
/// designated total base vertex.
///
/// The state is a total vertex and a coset of its subgroup. Crossing the
/// edge from side `s` at coset `anchor_s · w_s^j` lands at
/// `anchor_{1−s} · w_{1−s}^j` on the other side.
pub fn lift_word(m: &Precover, w: &GogWord) -> Result<LiftOutcome> {
    let g = m.base();
    if w.base() != g.base() {
        return Err(Error::MalformedPath("word is not based at the base vertex".into()));
    }
    let w = GogWord::new(g, w.base(), w.segments().to_vec(), w.edges().to_vec())?;
    let tables: Vec<_> = m.vertices().iter().map(|v| v.lift.table().into_owned()).collect();
    let schreiers: Vec<Schreier> = tables.iter().map(schreier).collect();

    let mut v = m.base_vertex();
    let mut c = 0usize;
    // Prefix of the current segment, before its rewrite.
    let mut pending = Word::identity(tables[v].rank());
    let mut start = 0usize;
    let mut segments = Vec::new();
    let mut edges = Vec::new();
    for (i, seg) in w.segments().iter().enumerate() {
        pending = pending.mul(seg);
        c = tables[v].walk(c, seg);
        let Some(&e) = w.edges().get(i) else { break };
        let (s, t) = (1 - e.to, e.to);
        let ws = m.side_word(e.pair, s);
        let (len, min) = tables[v].cycle_through(c, ws);
        let found = m
            .edges()
            .iter()
            .position(|te| te.over == e.pair && te.ends[s] == v && te.anchors[s] == min);
        let Some(k) = found else {
            return Ok(LiftOutcome::ExitsAt(i));
        };
        let te = &m.edges()[k];
        let mut j = 0;
        let mut x = te.anchors[s];
        while x != c {
            x = tables[v].walk(x, ws);
            j += 1;
        }
        debug_assert!(j < len);
        // Close the segment at the anchor: pending · w_s^{-j} ends at anchor_s.
        let closing = pending.mul(&ws.pow(-(j as i64)));
        let (local, end) = schreiers[v].rewrite_from(&tables[v], start, &closing);
        debug_assert_eq!(end, te.anchors[s]);
        segments.push(local);
        edges.push(OrientedEdge { pair: k, to: t });
        v = te.ends[t];
        let wt = m.side_word(e.pair, t);
        start = te.anchors[t];
        c = tables[v].walk(start, &wt.pow(j as i64));
        pending = wt.pow(j as i64);
    }
    if v != m.base_vertex() || c != 0 {
        return Ok(LiftOutcome::ExitsAt(w.edges().len()));
    }
    let (local, end) = schreiers[v].rewrite_from(&tables[v], start, &pending);
    debug_assert_eq!(end, 0);
    segments.push(local);
    let total = m.total_graph();
    let lifted = GogWord::new(&total, m.base_vertex(), segments, edges)?;
    Ok(LiftOutcome::InSubgroup(lifted))
}

/// Lifts through a tower of precovers, each a precover of the previous
/// one's total graph. Returns the index of the stage the word leaves, if
/// any.
pub fn lift_through(stages: &[Precover], w: &GogWord) -> Result<Option<usize>> {
    let mut current = w.clone();
    for (i, m) in stages.iter().enumerate() {
        if i > 0 {
            let prev = stages[i - 1].total_graph();
            if *m.base().as_ref() != prev {
                return Err(Error::Surgery(format!("stage {i} does not cover stage {}", i - 1)));
            }
        }
        match lift_word(m, &current)? {
            LiftOutcome::ExitsAt(_) => return Ok(Some(i)),
            LiftOutcome::InSubgroup(next) => current = next,
        }
    }
    Ok(None)
}
