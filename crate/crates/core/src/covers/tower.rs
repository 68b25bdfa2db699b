//! Finite prefixes of towers of covers with growing torsion.
//!
//! Step `n` works over the total graph `G_{n−1}` of the previous stage. It
//! finds a `p_n`-torsion piece `H` (from a cover `L′` of `G_{n−1}`), closes
//! `α` copies into a ring `R_H`, picks a cover `L` of `G_{n−1}` of degree
//! `k`, and for `n ≥ 2` a ring `R_prev` of `β` copies of `G_{n−1}`. The parts
//! are joined by edge swaps, which keep every vertex group and so give a
//! connected cover of degree at most `αh + β + k` with `h = predeg(H)` (the
//! ring has degree `α·deg(L′) ≤ αh`). `α` and `β` are the least integers
//! with
//!
//! ```text
//! αh / (αh + β + k) ≥ 1 / 2^{n+1}      β / (αh + β + k) ≥ 1 − 1 / 2^n
//! ```
//!
//! (for `n = 1` there is no `β` and the first bound is `1/4`).

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{
    complete, disjoint_union, find_torsion_piece, for_each_cover, lift_through, ring, swap_glue, CompletionBound,
    Precover, TotalEdge,
};
use crate::error::{Error, Result};
use crate::gog::{enumerate_gog_words, GogWord, GraphOfGroups};
use crate::homology::{is_prime, ledger_check, ledger_update, LedgerRow, TowerLedger};

/// Search limits for [`build_tower`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TowerBounds {
    /// Largest degree of the cover `L` searched at each step.
    pub cover_index: usize,
    /// Covers examined when looking for `L`.
    pub cover_cap: usize,
    /// Largest degree of the cover split into a torsion piece.
    pub piece_index: usize,
    /// Covers examined when looking for a torsion piece.
    pub piece_cap: usize,
    /// Largest cost of the enumerated words `g_1, g_2, …`.
    pub word_cost: usize,
    /// Assemblies (choices of `L` and swap edges) evaluated per step.
    pub assemblies: usize,
}

impl Default for TowerBounds {
    fn default() -> Self {
        TowerBounds { cover_index: 2, cover_cap: 200, piece_index: 2, piece_cap: 200, word_cost: 4, assemblies: 48 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerStatus {
    Complete,
    /// A search came back empty at `step`.
    NotFound { step: usize, stage: String, reason: String },
    BudgetExhausted { step: usize },
}

impl TowerStatus {
    pub fn is_complete(&self) -> bool {
        matches!(self, TowerStatus::Complete)
    }
}

#[derive(Clone, Debug)]
pub struct StepReport {
    pub step: usize,
    pub prime: u64,
    /// `h = predeg(H)` over the previous stage.
    pub piece_predegree: usize,
    /// `⟦G_0 : H⟧`.
    pub piece_index: BigInt,
    /// `k = deg(L)`.
    pub cover_degree: usize,
    pub alpha: usize,
    pub beta: usize,
    /// Degree over the previous stage.
    pub degree: usize,
    /// Degree over `G_0`.
    pub total_degree: BigInt,
    pub exponents: BTreeMap<u64, u64>,
    /// Whether each of `g_1, …, g_n` is excluded from the new stage.
    pub excluded: Vec<bool>,
    /// Whether the swap edge in `L` is farther than `max ‖g_i‖ + 1` from the
    /// base point.
    pub distance_ok: bool,
    pub ledger_ok: bool,
    pub assemblies_tried: usize,
    /// Conditions the chosen assembly does not meet.
    pub failed: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TowerReport {
    pub ledger: TowerLedger,
    pub steps: Vec<StepReport>,
    /// Stage `n` is a cover of the total graph of stage `n − 1` (of the
    /// input graph for `n = 1`).
    pub stages: Vec<Precover>,
    /// The words `g_1, g_2, …` of the input graph.
    pub words: Vec<GogWord>,
    pub status: TowerStatus,
    pub budget_used: u64,
}

impl TowerReport {
    /// Steps completed.
    pub fn completed(&self) -> usize {
        self.stages.len()
    }

    /// One row per ledger row, plus a final row naming the reason when the
    /// tower stopped early. Ratios are exact fractions.
    pub fn to_csv(&self) -> String {
        let primes = &self.ledger.primes;
        let mut out = String::from("step,prime,degree");
        for p in primes {
            let _ = write!(out, ",log_{p}_torsion");
        }
        for p in primes {
            let _ = write!(out, ",ratio_{p}");
        }
        out.push_str(",status\n");
        for row in &self.ledger.rows {
            let prime = row.introduced.as_ref().map(|(p, _)| p.to_string()).unwrap_or_default();
            let _ = write!(out, "{},{prime},{}", row.step, row.degree);
            for p in primes {
                let _ = write!(out, ",{}", row.exponents.get(p).copied().unwrap_or(0));
            }
            for p in primes {
                let _ = write!(out, ",{}", row.ratio(*p));
            }
            let status = match row.step {
                0 => "base".to_string(),
                s => match self.steps.get(s - 1) {
                    Some(r) if r.failed.is_empty() => "ok".to_string(),
                    Some(r) => r.failed.join(";"),
                    None => String::new(),
                },
            };
            let _ = writeln!(out, ",{}", csv_field(&status));
        }
        let stopped = match &self.status {
            TowerStatus::Complete => None,
            TowerStatus::NotFound { step, stage, reason } => Some((step, format!("not found: {stage}: {reason}"))),
            TowerStatus::BudgetExhausted { step } => Some((step, "budget exhausted".to_string())),
        };
        if let Some((step, why)) = stopped {
            let _ = write!(out, "{step},,");
            for _ in 0..2 * primes.len() {
                out.push(',');
            }
            let _ = writeln!(out, "{}", csv_field(&why));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

struct Budget {
    left: u64,
    used: u64,
}

impl Budget {
    fn spend(&mut self) -> bool {
        if self.left == 0 {
            return false;
        }
        self.left -= 1;
        self.used += 1;
        true
    }
}

/// `(α, β)` for step `n` given `h = predeg(H)` and `k = deg(L)`.
pub fn chain_counts(n: usize, h: usize, k: usize) -> (usize, usize) {
    assert!(n >= 1 && h >= 1);
    if n == 1 {
        return ((k.div_ceil(3 * h)).max(1), 0);
    }
    let alpha = k.div_ceil(h).max(1);
    let beta = ((1usize << n) - 1) * (alpha * h + k);
    (alpha, beta)
}

/// Builds up to `steps` stages over `g`, using `primes[(n − 1) % len]` at
/// step `n`. `budget` caps the covers and assemblies examined in total.
///
/// Searches that come back empty, or an exhausted budget, end the tower
/// early; the report says where and why.
pub fn build_tower(
    g: &Arc<GraphOfGroups>,
    primes: &[u64],
    steps: usize,
    bounds: &TowerBounds,
    budget: u64,
) -> Result<TowerReport> {
    if steps > 0 && primes.is_empty() {
        return Err(Error::Surgery("a tower with steps needs at least one prime".into()));
    }
    if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    let report = g.validate();
    if !report.is_ok() {
        return Err(Error::InvalidGraph(report));
    }
    let mut tracked: Vec<u64> = Vec::new();
    for &p in primes {
        if !tracked.contains(&p) {
            tracked.push(p);
        }
    }
    let words: Vec<GogWord> =
        enumerate_gog_words(g, bounds.word_cost).into_iter().filter(|w| !w.is_trivial()).take(steps).collect();
    let base = crate::homology::h1(g)?;
    let mut exponents = BTreeMap::new();
    for &p in &tracked {
        exponents.insert(p, base.torsion_exponent(p)?);
    }
    let ledger = ledger_update(
        TowerLedger::new(tracked.clone()),
        LedgerRow { step: 0, degree: BigInt::from(1), exponents, introduced: None },
    )?;
    let mut report = TowerReport {
        ledger,
        steps: Vec::new(),
        stages: Vec::new(),
        words,
        status: TowerStatus::Complete,
        budget_used: 0,
    };
    let mut budget = Budget { left: budget, used: 0 };
    let mut prev = g.clone();
    let mut degree = BigInt::from(1);
    for n in 1..=steps {
        let p = primes[(n - 1) % primes.len()];
        match step(&mut report, &prev, &degree, n, p, &tracked, bounds, &mut budget) {
            Ok(Some(stage)) => {
                let row = report.steps.last().expect("step recorded");
                degree = row.total_degree.clone();
                prev = Arc::new(stage.total_graph());
                report.stages.push(stage);
            }
            Ok(None) => {
                report.status = TowerStatus::BudgetExhausted { step: n };
                break;
            }
            Err(Error::NotFound { stage, reason }) => {
                report.status = TowerStatus::NotFound { step: n, stage, reason };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    report.budget_used = budget.used;
    Ok(report)
}

struct Candidate {
    cover: Precover,
    excluded: Vec<bool>,
    distance_ok: bool,
    exponents: BTreeMap<u64, u64>,
    ledger: TowerLedger,
    ledger_ok: bool,
    cover_degree: usize,
    alpha: usize,
    beta: usize,
}

impl Candidate {
    fn score(&self) -> (bool, usize, bool) {
        (self.ledger_ok, self.excluded.iter().filter(|&&x| x).count(), self.distance_ok)
    }

    fn perfect(&self) -> bool {
        self.ledger_ok && self.distance_ok && self.excluded.iter().all(|&x| x)
    }
}

/// One step; `Ok(None)` when the budget runs out.
#[allow(clippy::too_many_arguments)]
fn step(
    report: &mut TowerReport,
    prev: &Arc<GraphOfGroups>,
    prev_degree: &BigInt,
    n: usize,
    p: u64,
    tracked: &[u64],
    bounds: &TowerBounds,
    budget: &mut Budget,
) -> Result<Option<Precover>> {
    let piece = find_torsion_piece(prev, p, bounds.piece_index, bounds.piece_cap)?;
    if !budget.spend() {
        return Ok(None);
    }
    let h = piece.piece.predegree();
    let piece_index = prev_degree * BigInt::from(h);
    let words = &report.words[..n.min(report.words.len())];
    let reach = words.iter().map(|w| w.edges().len()).max().unwrap_or(0) + 1;

    // Candidates for L: covers excluding the words, then the rest, then L′.
    let mut covers: Vec<Precover> = Vec::new();
    let mut out_of_budget = false;
    let _ = for_each_cover(prev, bounds.cover_index, |m| {
        if covers.len() >= bounds.cover_cap {
            return ControlFlow::Break(());
        }
        if !budget.spend() {
            out_of_budget = true;
            return ControlFlow::Break(());
        }
        covers.push(m.clone());
        ControlFlow::Continue(())
    })?;
    if out_of_budget {
        return Ok(None);
    }
    covers.push(piece.source.clone());
    let excludes = |m: &Precover| -> Result<usize> {
        let mut stages = report.stages.clone();
        stages.push(m.clone());
        let mut count = 0;
        for w in words {
            if lift_through(&stages, w)?.is_some() {
                count += 1;
            }
        }
        Ok(count)
    };
    let mut ranked = Vec::new();
    for (i, m) in covers.into_iter().enumerate() {
        let count = excludes(&m)?;
        ranked.push((std::cmp::Reverse(count), i, m));
    }
    ranked.sort_by_key(|a| (a.0, a.1));

    let mut best: Option<Candidate> = None;
    let mut tried = 0usize;
    'search: for (_, _, l) in ranked {
        let k = l.degree()?;
        let (alpha, beta) = chain_counts(n, h, k);
        let r_h = ring(&piece, alpha)?;
        for (el, er, dist) in swap_options(&l, &r_h) {
            if tried >= bounds.assemblies {
                break 'search;
            }
            let joined = swap_glue(&l, &r_h, el, er)?;
            let assemblies: Vec<Precover> = if beta == 0 {
                vec![joined]
            } else {
                let r_prev = identity_ring(prev, beta)?;
                let options = swap_options(&joined, &r_prev);
                match options.first() {
                    Some(&(ej, ep, _)) => vec![swap_glue(&joined, &r_prev, ej, ep)?],
                    None => Vec::new(),
                }
            };
            for cover in assemblies {
                if tried >= bounds.assemblies {
                    break 'search;
                }
                if !budget.spend() {
                    return Ok(None);
                }
                tried += 1;
                let candidate = evaluate(
                    report, cover, words, dist > reach, prev_degree, n, p, &piece_index, tracked, k, alpha, beta,
                )?;
                let better = best.as_ref().is_none_or(|b| candidate.score() > b.score());
                let perfect = candidate.perfect();
                if better {
                    best = Some(candidate);
                }
                if perfect {
                    break 'search;
                }
            }
        }
    }
    let Some(best) = best else {
        return Err(Error::not_found("assembly", "no cover admits a swap with the torsion ring"));
    };
    let stage = complete(&best.cover, &CompletionBound::desk(0))?;
    let mut failed = Vec::new();
    if !best.ledger_ok {
        failed.push("ledger bound".to_string());
    }
    for (i, ok) in best.excluded.iter().enumerate() {
        if !ok {
            failed.push(format!("g_{} not excluded", i + 1));
        }
    }
    if words.len() < n {
        failed.push(format!("only {} words within cost {}", words.len(), bounds.word_cost));
    }
    if !best.distance_ok {
        failed.push("distance condition".to_string());
    }
    let degree = stage.degree()?;
    report.ledger = best.ledger;
    report.steps.push(StepReport {
        step: n,
        prime: p,
        piece_predegree: h,
        piece_index,
        cover_degree: best.cover_degree,
        alpha: best.alpha,
        beta: best.beta,
        degree,
        total_degree: prev_degree * BigInt::from(degree),
        exponents: best.exponents,
        excluded: best.excluded,
        distance_ok: best.distance_ok,
        ledger_ok: best.ledger_ok,
        assemblies_tried: tried,
        failed,
    });
    Ok(Some(stage))
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    report: &TowerReport,
    cover: Precover,
    words: &[GogWord],
    distance_ok: bool,
    prev_degree: &BigInt,
    n: usize,
    p: u64,
    piece_index: &BigInt,
    tracked: &[u64],
    cover_degree: usize,
    alpha: usize,
    beta: usize,
) -> Result<Candidate> {
    debug_assert!(cover.validate_cover().is_ok() && cover.is_connected());
    let a = cover.h1()?;
    let mut exponents = BTreeMap::new();
    for &q in tracked {
        exponents.insert(q, a.torsion_exponent(q)?);
    }
    let mut stages = report.stages.clone();
    stages.push(cover.clone());
    let mut excluded = Vec::new();
    for w in words {
        excluded.push(lift_through(&stages, w)?.is_some());
    }
    let degree = cover.degree()?;
    let row = LedgerRow {
        step: n,
        degree: prev_degree * BigInt::from(degree),
        exponents: exponents.clone(),
        introduced: Some((p, piece_index.clone())),
    };
    let ledger = ledger_update(report.ledger.clone(), row)?;
    let ledger_ok = ledger_check(&ledger).is_ok();
    Ok(Candidate { cover, excluded, distance_ok, exponents, ledger, ledger_ok, cover_degree, alpha, beta })
}

/// Pairs `(ex, ey, d)` of edges of `x` and `y` over the same base edge with
/// equal degree, where `d` is the distance in `x` from its base vertex to
/// the nearer end of `ex`; farthest first.
fn swap_options(x: &Precover, y: &Precover) -> Vec<(usize, usize, usize)> {
    let dist = distances(x);
    let mut out = Vec::new();
    for (i, a) in x.edges().iter().enumerate() {
        let d = a.ends.iter().map(|&v| dist[v]).min().unwrap_or(usize::MAX);
        for (j, b) in y.edges().iter().enumerate() {
            if a.over == b.over && x.edge_degree(i) == y.edge_degree(j) {
                out.push((i, j, d));
            }
        }
    }
    out.sort_by_key(|&(i, j, d)| (std::cmp::Reverse(d), i, j));
    out
}

fn distances(m: &Precover) -> Vec<usize> {
    let mut dist = vec![usize::MAX; m.vertices().len()];
    let mut queue = VecDeque::from([m.base_vertex()]);
    dist[m.base_vertex()] = 0;
    while let Some(v) = queue.pop_front() {
        for (e, side) in m.incident(v) {
            let w = m.edges()[e].ends[1 - side];
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `copies` copies of the identity cover of `g`, with one edge of each copy
/// reconnected to the next copy: a connected cyclic cover of degree
/// `copies`.
fn identity_ring(g: &Arc<GraphOfGroups>, copies: usize) -> Result<Precover> {
    let id = Precover::identity(g.clone());
    if copies <= 1 {
        return Ok(id);
    }
    let Some(e) = (0..id.edges().len()).find(|&e| {
        let mut without = id.clone();
        without.edges.remove(e);
        without.is_connected()
    }) else {
        return Err(Error::not_found("ring", "every edge of the previous stage disconnects it"));
    };
    let parts: Vec<&Precover> = std::iter::repeat_n(&id, copies).collect();
    let (mut m, offsets) = disjoint_union(&parts)?;
    let template = id.edges()[e].clone();
    let mut edges: Vec<TotalEdge> = Vec::new();
    for (i, &(vo, eo)) in offsets.iter().enumerate() {
        let (wo, _) = offsets[(i + 1) % copies];
        let mut crossing = m.edges[eo + e].clone();
        crossing.ends = [template.ends[0] + vo, template.ends[1] + wo];
        edges.push(crossing);
    }
    let drop: Vec<usize> = offsets.iter().map(|&(_, eo)| eo + e).collect();
    let mut kept: Vec<TotalEdge> =
        m.edges.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, x)| x.clone()).collect();
    kept.extend(edges);
    m.edges = kept;
    debug_assert!(m.validate_cover().is_ok() && m.is_connected());
    Ok(m)
}
