//! Finite-index subgroups of free groups as coset tables.
//!
//! Cosets are right cosets and the free group acts on them on the right; the
//! subgroup is the stabilizer of coset 0. With this convention the degree of
//! an elevation is the length of a cycle of the word's permutation.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use num_integer::Integer;

use crate::error::{Error, Report, Result};
use crate::words::{abelianize_word, conj_canonical, ConjClass, Word};

/// Transitive right action of `F_rank` on `{0..size}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetTable {
    rank: usize,
    action: Vec<Vec<u32>>,
    inverse: Vec<Vec<u32>>,
}

/// Checks bijectivity of each column and transitivity of the action.
pub fn validate_table(rank: usize, action: &[Vec<u32>]) -> Report {
    let mut report = Report::new();
    if action.len() != rank {
        report.push("table", format!("expected {rank} generator columns, found {}", action.len()));
        return report;
    }
    let n = action.first().map_or(0, Vec::len);
    if n == 0 && rank > 0 {
        report.push("table", "empty coset set");
        return report;
    }
    for (g, col) in action.iter().enumerate() {
        if col.len() != n {
            report.push(format!("generator {}", g + 1), format!("column has {} entries, expected {n}", col.len()));
            continue;
        }
        let mut seen = vec![false; n];
        for &x in col {
            if (x as usize) >= n || std::mem::replace(&mut seen[x as usize], true) {
                report.push(format!("generator {}", g + 1), "column is not a bijection");
                break;
            }
        }
    }
    if !report.is_ok() {
        return report;
    }
    let orbits = orbits(n, action);
    if orbits.len() > 1 {
        let desc: Vec<String> = orbits.iter().map(|o| format!("{o:?}")).collect();
        report.push("table", format!("intransitive action, orbits {}", desc.join(" ")));
    }
    report
}

fn orbits(n: usize, action: &[Vec<u32>]) -> Vec<Vec<usize>> {
    let mut inv = vec![vec![0u32; n]; action.len()];
    for (g, col) in action.iter().enumerate() {
        for (c, &x) in col.iter().enumerate() {
            inv[g][x as usize] = c as u32;
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut i = 0;
        while i < orbit.len() {
            let c = orbit[i];
            i += 1;
            for g in 0..action.len() {
                for d in [action[g][c] as usize, inv[g][c] as usize] {
                    if label[d] == usize::MAX {
                        label[d] = id;
                        orbit.push(d);
                    }
                }
            }
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Letters in breadth-first exploration order: 1, -1, 2, -2, ...
fn letter_order(rank: usize) -> impl Iterator<Item = i32> {
    (1..=rank as i32).flat_map(|g| [g, -g])
}

impl CosetTable {
    pub fn new(rank: usize, action: Vec<Vec<u32>>) -> Result<CosetTable> {
        validate_table(rank, &action).into_result().map_err(Error::InvalidTable)?;
        Ok(Self::from_valid(rank, action))
    }

    fn from_valid(rank: usize, action: Vec<Vec<u32>>) -> CosetTable {
        let n = action.first().map_or(1, Vec::len);
        let mut inverse = vec![vec![0u32; n]; rank];
        for (g, col) in action.iter().enumerate() {
            for (c, &x) in col.iter().enumerate() {
                inverse[g][x as usize] = c as u32;
            }
        }
        CosetTable { rank, action, inverse }
    }

    /// The whole group (index 1).
    pub fn trivial(rank: usize) -> CosetTable {
        Self::from_valid(rank, vec![vec![0]; rank])
    }

    /// The index-`d` subgroup of `Z`.
    pub fn cyclic(d: usize) -> CosetTable {
        assert!(d >= 1);
        Self::from_valid(1, vec![(0..d as u32).map(|c| (c + 1) % d as u32).collect()])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn index(&self) -> usize {
        self.action.first().map_or(1, Vec::len)
    }

    /// Nielsen–Schreier: `index·(rank−1) + 1`.
    pub fn subgroup_rank(&self) -> usize {
        self.index() * (self.rank - 1) + 1
    }

    pub fn action(&self) -> &[Vec<u32>] {
        &self.action
    }

    pub fn act(&self, coset: usize, letter: i32) -> usize {
        let g = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.action[g][coset] as usize
        } else {
            self.inverse[g][coset] as usize
        }
    }

    pub fn walk(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.act(c, l))
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.walk(0, w) == 0
    }

    /// Cycles of the permutation induced by `w`, each listed from its least
    /// coset in the order `c, c·w, c·w², …`, sorted by least coset.
    pub fn word_cycles(&self, w: &Word) -> Vec<Vec<usize>> {
        let n = self.index();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut c = self.walk(start, w);
            while c != start {
                seen[c] = true;
                cycle.push(c);
                c = self.walk(c, w);
            }
            out.push(cycle);
        }
        out
    }

    /// Length of the cycle of `w` through `coset`, and the cycle's least coset.
    pub fn cycle_through(&self, coset: usize, w: &Word) -> (usize, usize) {
        let mut len = 1;
        let mut min = coset;
        let mut c = self.walk(coset, w);
        while c != coset {
            min = min.min(c);
            len += 1;
            c = self.walk(c, w);
        }
        (len, min)
    }

    /// Relabels cosets breadth-first from `base`.
    pub fn rebased(&self, base: usize) -> CosetTable {
        let n = self.index();
        let mut label = vec![u32::MAX; n];
        let mut order = vec![base];
        label[base] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for l in letter_order(self.rank) {
                let d = self.act(c, l);
                if label[d] == u32::MAX {
                    label[d] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let action = (0..self.rank)
            .map(|g| order.iter().map(|&c| label[self.action[g][c] as usize]).collect())
            .collect();
        Self::from_valid(self.rank, action)
    }

    /// Breadth-first standard form; equal standard forms mean equal subgroups.
    pub fn standardized(&self) -> CosetTable {
        self.rebased(0)
    }

    fn entry_key(&self) -> Vec<u32> {
        let n = self.index();
        (0..n).flat_map(|c| (0..self.rank).map(move |g| self.action[g][c])).collect()
    }

    pub fn is_normal(&self) -> bool {
        let s = schreier(self);
        s.basis.iter().all(|b| (0..self.index()).all(|c| self.walk(c, b) == c))
    }

    /// Whether this subgroup lies inside `other` (same ambient group).
    pub fn is_contained_in(&self, other: &CosetTable) -> bool {
        self.rank == other.rank && schreier(self).basis.iter().all(|b| other.contains(b))
    }
}

impl fmt::Display for CosetTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.action)
    }
}

/// Schreier transversal and free basis of a subgroup.
#[derive(Clone, Debug)]
pub struct Schreier {
    /// `representatives[c]` carries coset 0 to coset `c`.
    pub representatives: Vec<Word>,
    /// One generator per non-tree edge of the coset graph.
    pub basis: Vec<Word>,
    labels: Vec<Vec<Option<usize>>>,
}

pub fn schreier(t: &CosetTable) -> Schreier {
    let n = t.index();
    let r = t.rank;
    let mut reps: Vec<Option<Word>> = vec![None; n];
    let mut tree = vec![vec![false; n]; r];
    reps[0] = Some(Word::identity(r));
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for l in letter_order(r) {
            let d = t.act(c, l);
            if reps[d].is_none() {
                let rep = reps[c].as_ref().expect("visited").mul(&Word::generator(l.unsigned_abs() as usize, r).pow(l.signum() as i64));
                reps[d] = Some(rep);
                let g = l.unsigned_abs() as usize - 1;
                if l > 0 {
                    tree[g][c] = true;
                } else {
                    tree[g][d] = true;
                }
                queue.push_back(d);
            }
        }
    }
    let representatives: Vec<Word> = reps.into_iter().map(|w| w.expect("transitive")).collect();
    let mut labels = vec![vec![None; n]; r];
    let mut basis = Vec::new();
    for c in 0..n {
        for g in 0..r {
            if !tree[g][c] {
                let d = t.action[g][c] as usize;
                let gen = Word::generator(g + 1, r);
                labels[g][c] = Some(basis.len());
                basis.push(representatives[c].mul(&gen).mul(&representatives[d].inverse()));
            }
        }
    }
    Schreier { representatives, basis, labels }
}

impl Schreier {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Expresses a subgroup element in the Schreier basis.
    pub fn rewrite(&self, t: &CosetTable, w: &Word) -> Result<Word> {
        let (word, end) = self.rewrite_from(t, 0, w);
        if end != 0 {
            return Err(Error::NotMember(w.to_string()));
        }
        Ok(word)
    }

    /// Reidemeister–Schreier rewrite of the path of `w` starting at `coset`.
    ///
    /// Returns the basis word for `rep[coset]·w·rep[end]⁻¹` and `end`.
    pub fn rewrite_from(&self, t: &CosetTable, coset: usize, w: &Word) -> (Word, usize) {
        let mut out: Vec<i32> = Vec::new();
        let mut c = coset;
        for &l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            if l > 0 {
                if let Some(k) = self.labels[g][c] {
                    out.push(k as i32 + 1);
                }
                c = t.act(c, l);
            } else {
                let d = t.act(c, l);
                if let Some(k) = self.labels[g][d] {
                    out.push(-(k as i32) - 1);
                }
                c = d;
            }
        }
        (Word::new(out, self.rank()).expect("labels in range"), c)
    }

    /// Maps a basis word back into the ambient group.
    pub fn evaluate(&self, w: &Word) -> Word {
        w.substitute(&self.basis)
    }
}

/// An elevation of a conjugacy class to a finite-index subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elevation {
    pub base_class: ConjClass,
    pub degree: usize,
    /// `g·w^degree·g⁻¹` in the ambient basis, `g` the representative of the
    /// least coset of the cycle.
    pub representative: Word,
    /// The cycle, starting at its least coset.
    pub cycle_cosets: Vec<usize>,
}

pub fn elevations(t: &CosetTable, class: &ConjClass) -> Vec<Elevation> {
    let s = schreier(t);
    elevations_with(t, &s, class)
}

fn elevations_with(t: &CosetTable, s: &Schreier, class: &ConjClass) -> Vec<Elevation> {
    let w = class.canonical();
    t.word_cycles(w)
        .into_iter()
        .map(|cycle| {
            let d = cycle.len();
            let g = &s.representatives[cycle[0]];
            Elevation {
                base_class: class.clone(),
                degree: d,
                representative: w.pow(d as i64).conjugate_by(g),
                cycle_cosets: cycle,
            }
        })
        .collect()
}

/// A free group with a peripheral structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    rank: usize,
    peripheral: Vec<ConjClass>,
}

impl Pair {
    pub fn new(rank: usize, peripheral: Vec<ConjClass>) -> Result<Pair> {
        for (i, c) in peripheral.iter().enumerate() {
            if c.rank() != rank {
                return Err(Error::DimensionMismatch { expected: rank, found: c.rank() });
            }
            if peripheral[..i].contains(c) {
                return Err(Error::DuplicateClass { vertex: "pair".into(), class: c.to_string() });
            }
        }
        Ok(Pair { rank, peripheral })
    }

    pub fn from_words(rank: usize, words: &[&[i32]]) -> Result<Pair> {
        let classes = words
            .iter()
            .map(|l| conj_canonical(&Word::new(l.to_vec(), rank)?))
            .collect::<Result<Vec<_>>>()?;
        Pair::new(rank, classes)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn peripheral(&self) -> &[ConjClass] {
        &self.peripheral
    }
}

/// Pull-back of a pair to a finite-index subgroup, in the subgroup's basis.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub pair: Pair,
    /// For each class of `pair`: (index of the base class, the elevation).
    pub origins: Vec<(usize, Elevation)>,
}

pub fn pullback(p: &Pair, t: &CosetTable) -> Result<Pullback> {
    if t.rank() != p.rank {
        return Err(Error::DimensionMismatch { expected: p.rank, found: t.rank() });
    }
    let s = schreier(t);
    let mut classes: Vec<ConjClass> = Vec::new();
    let mut origins = Vec::new();
    for (i, c) in p.peripheral.iter().enumerate() {
        for e in elevations_with(t, &s, c) {
            let local = s.rewrite(t, &e.representative)?;
            let class = conj_canonical(&local)?;
            if let Some(j) = classes.iter().position(|x| x == &class) {
                let (k, other) = &origins[j];
                let other: &Elevation = other;
                return Err(Error::ElevationCollision(format!(
                    "elevation of {} at coset {} equals elevation of {} at coset {} (class {})",
                    c, e.cycle_cosets[0], p.peripheral[*k], other.cycle_cosets[0], class
                )));
            }
            classes.push(class);
            origins.push((i, e));
        }
    }
    Ok(Pullback { pair: Pair { rank: s.rank(), peripheral: classes }, origins })
}

/// Visits one coset table per conjugacy class of subgroups of index at most
/// `max_index`, ordered by index.
///
/// The representative is the least breadth-first standard form over all
/// choices of base coset.
pub fn for_each_subgroup<F>(rank: usize, max_index: usize, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&CosetTable) -> ControlFlow<()>,
{
    for n in 1..=max_index {
        let mut search = LowIndex::new(rank, n);
        search.run(&mut |t: CosetTable| {
            let key = t.entry_key();
            let minimal = (1..n).all(|b| t.rebased(b).entry_key() >= key);
            if minimal {
                f(&t)
            } else {
                ControlFlow::Continue(())
            }
        })?;
    }
    ControlFlow::Continue(())
}

/// Collects [`for_each_subgroup`], failing once more than `cap` tables appear.
pub fn enumerate_subgroups(rank: usize, max_index: usize, cap: usize) -> Result<Vec<CosetTable>> {
    let mut out = Vec::new();
    let flow = for_each_subgroup(rank, max_index, |t| {
        if out.len() == cap {
            return ControlFlow::Break(());
        }
        out.push(t.clone());
        ControlFlow::Continue(())
    });
    if flow.is_break() {
        return Err(Error::ResourceBound(format!(
            "more than {cap} subgroups of rank-{rank} free group up to index {max_index}"
        )));
    }
    Ok(out)
}

/// Backtracking over standard coset tables with exactly `n` cosets.
struct LowIndex {
    rank: usize,
    n: usize,
    fwd: Vec<Vec<Option<u32>>>,
    bwd: Vec<Vec<Option<u32>>>,
    defined: usize,
}

impl LowIndex {
    fn new(rank: usize, n: usize) -> Self {
        LowIndex { rank, n, fwd: vec![vec![None; n]; rank], bwd: vec![vec![None; n]; rank], defined: 1 }
    }

    fn first_gap(&self) -> Option<(usize, usize, bool)> {
        for c in 0..self.defined {
            for g in 0..self.rank {
                if self.fwd[g][c].is_none() {
                    return Some((c, g, true));
                }
                if self.bwd[g][c].is_none() {
                    return Some((c, g, false));
                }
            }
        }
        None
    }

    fn run(&mut self, emit: &mut dyn FnMut(CosetTable) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some((c, g, forward)) = self.first_gap() else {
            if self.defined == self.n {
                let action = self.fwd.iter().map(|col| col.iter().map(|x| x.expect("complete")).collect()).collect();
                return emit(CosetTable::from_valid(self.rank, action));
            }
            return ControlFlow::Continue(());
        };
        let limit = if self.defined < self.n { self.defined + 1 } else { self.defined };
        for t in 0..limit {
            let (this, other) = if forward { (&self.fwd, &self.bwd) } else { (&self.bwd, &self.fwd) };
            debug_assert!(this[g][c].is_none());
            if other[g][t].is_some() {
                continue;
            }
            let fresh = t == self.defined;
            if fresh {
                self.defined += 1;
            }
            let (this, other) = if forward { (&mut self.fwd, &mut self.bwd) } else { (&mut self.bwd, &mut self.fwd) };
            this[g][c] = Some(t as u32);
            other[g][t] = Some(c as u32);
            let flow = self.run(emit);
            let (this, other) = if forward { (&mut self.fwd, &mut self.bwd) } else { (&mut self.bwd, &mut self.fwd) };
            this[g][c] = None;
            other[g][t] = None;
            if fresh {
                self.defined -= 1;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Bounds for [`prescribe_degrees`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBound {
    pub max_candidates: usize,
    pub max_modulus: u64,
    pub max_perm_degree: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound { max_candidates: 2_000_000, max_modulus: 60, max_perm_degree: 4 }
    }
}

/// The finite quotient whose kernel was returned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientFamily {
    /// Generator `i` maps to `images[i]` in `Z/modulus`.
    Cyclic { modulus: u64, images: Vec<u64> },
    /// Generator `i` maps to `images[i]` in `Z/m1 × Z/m2`.
    CyclicPair { moduli: (u64, u64), images: Vec<(u64, u64)> },
    /// Generator `i` maps to the permutation `images[i]`.
    Permutation { degree: usize, images: Vec<Vec<usize>> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Containment {
    NotRequested,
    Verified,
    Unverified,
}

#[derive(Clone, Debug)]
pub struct Prescribed {
    /// Table of a normal subgroup.
    pub table: CosetTable,
    /// Every elevation of class `i` has degree `constant · targets[i]`.
    pub constant: u64,
    pub family: QuotientFamily,
    pub containment: Containment,
    pub candidates_examined: usize,
}

/// Searches finite quotients for a normal subgroup whose elevation degrees
/// are `K·targets[i]` for one common `K`.
///
/// Schedule: cyclic quotients `Z/m` for `m ≤ max_modulus`, then `Z/m1 × Z/m2`
/// with `m1 | m2`, then permutation images in `S_k` for `k ≤ max_perm_degree`.
pub fn prescribe_degrees(p: &Pair, targets: &[u64], bound: &SearchBound) -> Result<Prescribed> {
    prescribe_degrees_within(p, targets, bound, None)
}

/// As [`prescribe_degrees`], preferring subgroups contained in `parent`.
pub fn prescribe_degrees_within(
    p: &Pair,
    targets: &[u64],
    bound: &SearchBound,
    parent: Option<&CosetTable>,
) -> Result<Prescribed> {
    if targets.len() != p.peripheral.len() {
        return Err(Error::DimensionMismatch { expected: p.peripheral.len(), found: targets.len() });
    }
    if targets.contains(&0) {
        return Err(Error::not_found("prescribe_degrees", "targets must be positive"));
    }
    let issues = crate::gog::malnormality_violations(&p.peripheral);
    if !issues.is_empty() {
        return Err(Error::NotMalnormal(issues.join("; ")));
    }
    let mut search = DegreeSearch {
        pair: p,
        targets,
        parent,
        examined: 0,
        limit: bound.max_candidates,
        first: None,
        found: None,
    };
    let _ = search.cyclic(bound.max_modulus).is_break()
        || search.cyclic_pairs(bound.max_modulus).is_break()
        || search.permutations(bound.max_perm_degree).is_break();
    let examined = search.examined;
    let result = search.found.or(search.first);
    match result {
        Some(mut r) => {
            r.candidates_examined = examined;
            if parent.is_none() {
                r.containment = Containment::NotRequested;
            }
            Ok(r)
        }
        None => Err(Error::not_found(
            "prescribe_degrees",
            format!("no quotient among {examined} candidates realizes targets {targets:?}"),
        )),
    }
}

struct DegreeSearch<'a> {
    pair: &'a Pair,
    targets: &'a [u64],
    parent: Option<&'a CosetTable>,
    examined: usize,
    limit: usize,
    first: Option<Prescribed>,
    found: Option<Prescribed>,
}

impl DegreeSearch<'_> {
    fn common_constant(&self, orders: &[u64]) -> Option<u64> {
        let mut k = None;
        for (&o, &t) in orders.iter().zip(self.targets) {
            if o % t != 0 {
                return None;
            }
            match k {
                None => k = Some(o / t),
                Some(k0) if k0 != o / t => return None,
                _ => {}
            }
        }
        k.or(Some(1))
    }

    fn tick(&mut self) -> ControlFlow<()> {
        self.examined += 1;
        if self.examined > self.limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    }

    /// Verifies a candidate by recomputing elevations, then records it.
    fn offer(&mut self, table: CosetTable, constant: u64, family: QuotientFamily) -> ControlFlow<()> {
        let s = schreier(&table);
        for (class, &t) in self.pair.peripheral.iter().zip(self.targets) {
            if elevations_with(&table, &s, class).iter().any(|e| e.degree as u64 != constant * t) {
                return ControlFlow::Continue(());
            }
        }
        let contained = self.parent.map(|par| table.is_contained_in(par));
        let result = Prescribed {
            table,
            constant,
            family,
            containment: if contained == Some(true) { Containment::Verified } else { Containment::Unverified },
            candidates_examined: 0,
        };
        match contained {
            None | Some(true) => {
                self.found = Some(result);
                ControlFlow::Break(())
            }
            Some(false) => {
                if self.first.is_none() {
                    self.first = Some(result);
                }
                ControlFlow::Continue(())
            }
        }
    }

    fn abelian_images(&self) -> Vec<Vec<i64>> {
        self.pair.peripheral.iter().map(|c| abelianize_word(c.canonical())).collect()
    }

    fn cyclic(&mut self, max_modulus: u64) -> ControlFlow<()> {
        let r = self.pair.rank;
        let ab = self.abelian_images();
        for m in 1..=max_modulus {
            let mut images = vec![0u64; r];
            loop {
                self.tick()?;
                let orders: Vec<u64> = ab
                    .iter()
                    .map(|v| {
                        let x = dot_mod(v, &images, m);
                        m / x.gcd(&m)
                    })
                    .collect();
                if let Some(k) = self.common_constant(&orders) {
                    let table = abelian_kernel(r, &[m], &images.iter().map(|&x| vec![x]).collect::<Vec<_>>());
                    self.offer(table, k, QuotientFamily::Cyclic { modulus: m, images: images.clone() })?;
                }
                if !odometer(&mut images, m) {
                    break;
                }
            }
        }
        ControlFlow::Continue(())
    }

    fn cyclic_pairs(&mut self, max_modulus: u64) -> ControlFlow<()> {
        let r = self.pair.rank;
        let ab = self.abelian_images();
        for m2 in 2..=max_modulus {
            for m1 in (2..=m2).filter(|m1| m2 % m1 == 0) {
                let mut a = vec![0u64; r];
                loop {
                    let mut b = vec![0u64; r];
                    loop {
                        self.tick()?;
                        let orders: Vec<u64> = ab
                            .iter()
                            .map(|v| {
                                let x = dot_mod(v, &a, m1);
                                let y = dot_mod(v, &b, m2);
                                (m1 / x.gcd(&m1)).lcm(&(m2 / y.gcd(&m2)))
                            })
                            .collect();
                        if let Some(k) = self.common_constant(&orders) {
                            let images: Vec<Vec<u64>> = a.iter().zip(&b).map(|(&x, &y)| vec![x, y]).collect();
                            let table = abelian_kernel(r, &[m1, m2], &images);
                            let family = QuotientFamily::CyclicPair {
                                moduli: (m1, m2),
                                images: a.iter().zip(&b).map(|(&x, &y)| (x, y)).collect(),
                            };
                            self.offer(table, k, family)?;
                        }
                        if !odometer(&mut b, m2) {
                            break;
                        }
                    }
                    if !odometer(&mut a, m1) {
                        break;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    fn permutations(&mut self, max_degree: usize) -> ControlFlow<()> {
        let r = self.pair.rank;
        for k in 2..=max_degree {
            let perms = all_permutations(k);
            let mut choice = vec![0u64; r];
            loop {
                self.tick()?;
                let images: Vec<Vec<usize>> = choice.iter().map(|&i| perms[i as usize].clone()).collect();
                let orders: Vec<u64> = self
                    .pair
                    .peripheral
                    .iter()
                    .map(|c| perm_order(&perm_of_word(c.canonical(), &images, k)))
                    .collect();
                if let Some(kc) = self.common_constant(&orders) {
                    let table = permutation_kernel(r, &images, k);
                    self.offer(table, kc, QuotientFamily::Permutation { degree: k, images })?;
                }
                if !odometer(&mut choice, perms.len() as u64) {
                    break;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

fn dot_mod(v: &[i64], images: &[u64], m: u64) -> u64 {
    let m = m as i64;
    let s: i64 = v.iter().zip(images).map(|(&a, &b)| a * b as i64).sum();
    s.rem_euclid(m) as u64
}

/// Increments a base-`m` counter; false on wrap-around.
fn odometer(digits: &mut [u64], m: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

/// Regular action of the image of `F_rank → Z/m_1 × … ` on itself.
fn abelian_kernel(rank: usize, moduli: &[u64], images: &[Vec<u64>]) -> CosetTable {
    regular_action(rank, vec![0u64; moduli.len()], |x: &Vec<u64>, g, inv| {
        x.iter()
            .zip(&images[g])
            .zip(moduli)
            .map(|((&a, &b), &m)| if inv { (a + m - b % m) % m } else { (a + b) % m })
            .collect()
    })
}

fn permutation_kernel(rank: usize, images: &[Vec<usize>], k: usize) -> CosetTable {
    let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();
    regular_action(rank, (0..k).collect::<Vec<usize>>(), |x: &Vec<usize>, g, inv| {
        let p = if inv { &inverses[g] } else { &images[g] };
        x.iter().map(|&i| p[i]).collect()
    })
}

/// Breadth-first Cayley graph of the group generated by right
/// multiplication, as a coset table of the kernel.
fn regular_action<T, F>(rank: usize, identity: T, step: F) -> CosetTable
where
    T: Clone + Eq + std::hash::Hash,
    F: Fn(&T, usize, bool) -> T,
{
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut elems = vec![identity.clone()];
    index.insert(identity, 0);
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i].clone();
        i += 1;
        for g in 0..rank {
            for inv in [false, true] {
                let y = step(&x, g, inv);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
        }
    }
    let action = (0..rank).map(|g| elems.iter().map(|x| index[&step(x, g, false)] as u32).collect()).collect();
    CosetTable::from_valid(rank, action)
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// Point map `i ↦ i·w` for the right action.
fn perm_of_word(w: &Word, images: &[Vec<usize>], k: usize) -> Vec<usize> {
    let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();
    (0..k)
        .map(|mut i| {
            for &l in w.letters() {
                let g = l.unsigned_abs() as usize - 1;
                i = if l > 0 { images[g][i] } else { inverses[g][i] };
            }
            i
        })
        .collect()
}

fn perm_order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut order = 1u64;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0u64;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        order = order.lcm(&len);
    }
    order
}

/// Distinct conjugacy classes of subgroup elements among `words`.
pub fn distinct_local_classes(t: &CosetTable, words: &[Word]) -> Result<usize> {
    let s = schreier(t);
    let mut set = HashSet::new();
    for w in words {
        set.insert(conj_canonical(&s.rewrite(t, w)?)?);
    }
    Ok(set.len())
}
