//! Free-group words: reduction, conjugacy canonical forms, primitive roots and
//! abelianization.
//!
//! Letters are nonzero integers: `i` is the `i`-th basis element and `-i` its
//! inverse. Every [`Word`] is freely reduced.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A freely reduced element of the free group of rank `rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

/// Conjugacy class of a non-trivial element, stored as the least rotation of
/// its cyclically reduced core.
///
/// `[w]` and `[w⁻¹]` are different classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConjClass {
    canonical: Word,
}

fn check_letters(letters: &[i32], rank: usize) -> Result<()> {
    for &l in letters {
        if l == 0 || l.unsigned_abs() as usize > rank {
            return Err(Error::LetterOutOfRange { letter: l, rank });
        }
    }
    Ok(())
}

/// Reduces `letters` in the free group of the given rank.
pub fn free_reduce(letters: &[i32], rank: usize) -> Result<Word> {
    check_letters(letters, rank)?;
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Ok(Word { rank, letters: out })
}

impl Word {
    /// Builds a word from raw letters, reducing it.
    pub fn new(letters: impl Into<Vec<i32>>, rank: usize) -> Result<Word> {
        let letters = letters.into();
        free_reduce(&letters, rank)
    }

    pub fn identity(rank: usize) -> Word {
        Word { rank, letters: Vec::new() }
    }

    /// The `i`-th basis element (1-based).
    pub fn generator(i: usize, rank: usize) -> Word {
        assert!(i >= 1 && i <= rank, "generator {i} out of range for rank {rank}");
        Word { rank, letters: vec![i as i32] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { rank: self.rank, letters: out }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) => self.letters.len() == 1 || a != -b,
            _ => true,
        }
    }

    /// Substitutes `images[i-1]` for generator `i`.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let rank = images.first().map_or(0, Word::rank);
        let mut acc = Word::identity(rank);
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                acc = acc.mul(img);
            } else {
                acc = acc.mul(&img.inverse());
            }
        }
        acc
    }

    /// Returns `Some(n)` when `self = base^n`.
    pub fn power_of(&self, base: &Word) -> Option<i64> {
        if base.is_identity() {
            return self.is_identity().then_some(0);
        }
        let bound = self.len() as i64 + 1;
        (-bound..=bound).find(|&n| &base.pow(n) == self)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

/// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically reduced.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let l = &w.letters;
    let mut i = 0;
    let mut j = l.len();
    while j - i >= 2 && l[i] == -l[j - 1] {
        i += 1;
        j -= 1;
    }
    (
        Word { rank: w.rank, letters: l[i..j].to_vec() },
        Word { rank: w.rank, letters: l[..i].to_vec() },
    )
}

/// Index of the lexicographically least rotation.
fn least_rotation(s: &[i32]) -> usize {
    let n = s.len();
    (0..n)
        .min_by(|&a, &b| {
            let ra = s[a..].iter().chain(&s[..a]);
            let rb = s[b..].iter().chain(&s[..b]);
            ra.cmp(rb)
        })
        .unwrap_or(0)
}

fn rotate(letters: &[i32], k: usize) -> Vec<i32> {
    let mut out = letters[k..].to_vec();
    out.extend_from_slice(&letters[..k]);
    out
}

/// Canonical form of the conjugacy class of `w`.
pub fn conj_canonical(w: &Word) -> Result<ConjClass> {
    if w.is_identity() {
        return Err(Error::IdentityWord);
    }
    let (core, _) = cyclic_reduce(w);
    let k = least_rotation(&core.letters);
    Ok(ConjClass {
        canonical: Word { rank: w.rank, letters: rotate(&core.letters, k) },
    })
}

/// Returns `(root, exponent)` with `w` conjugate to `root^exponent` and the
/// exponent maximal.
pub fn primitive_root(w: &Word) -> Result<(Word, u32)> {
    let class = conj_canonical(w)?;
    let core = &class.canonical.letters;
    let n = core.len();
    for p in 1..=n {
        if n % p == 0 && (p..n).all(|i| core[i] == core[i - p]) {
            let root = Word { rank: w.rank, letters: core[..p].to_vec() };
            return Ok((root, (n / p) as u32));
        }
    }
    unreachable!("the full word is always a period")
}

/// Signed letter counts of `w`.
pub fn abelianize_word(w: &Word) -> Vec<i64> {
    let mut v = vec![0i64; w.rank];
    for &l in &w.letters {
        let i = l.unsigned_abs() as usize - 1;
        v[i] += i64::from(l.signum());
    }
    v
}

impl ConjClass {
    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    pub fn rank(&self) -> usize {
        self.canonical.rank
    }

    pub fn of(w: &Word) -> Result<ConjClass> {
        conj_canonical(w)
    }

    /// Class of the inverse element.
    pub fn inverse(&self) -> ConjClass {
        conj_canonical(&self.canonical.inverse()).expect("non-trivial")
    }
}

impl PartialOrd for ConjClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ConjClass {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.canonical.len(), &self.canonical.letters)
            .cmp(&(other.canonical.len(), &other.canonical.letters))
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.canonical.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(l: &[i32], r: usize) -> Word {
        Word::new(l.to_vec(), r).unwrap()
    }

    /// Repeatedly deletes the first cancelling pair.
    fn naive_reduce(mut l: Vec<i32>) -> Vec<i32> {
        loop {
            let pos = (0..l.len().saturating_sub(1)).find(|&i| l[i] == -l[i + 1]);
            match pos {
                Some(i) => {
                    l.drain(i..i + 2);
                }
                None => return l,
            }
        }
    }

    #[test]
    fn free_reduce_examples() {
        assert!(w(&[1, -1], 2).is_identity());
        assert_eq!(w(&[1, 2, -2, 1], 2).letters(), &[1, 1]);
        assert_eq!(naive_reduce(vec![2, -1, 1, -2, 2]), vec![2]);
        assert_eq!(w(&[2, -1, 1, -2, 2], 2).letters(), &[2]);
    }

    #[test]
    fn out_of_range_letters_rejected() {
        assert!(matches!(Word::new(vec![3], 2), Err(Error::LetterOutOfRange { letter: 3, .. })));
        assert!(Word::new(vec![0], 2).is_err());
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, g) = cyclic_reduce(&w(&[1, 2, -1], 2));
        assert_eq!((core.letters(), g.letters()), (&[2][..], &[1][..]));
        let (core, g) = cyclic_reduce(&w(&[2], 2));
        assert_eq!((core.letters(), g.letters()), (&[2][..], &[][..]));
        let (core, g) = cyclic_reduce(&w(&[1, 1, 2, -1, -1], 2));
        assert_eq!((core.letters(), g.letters()), (&[2][..], &[1, 1][..]));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(conj_canonical(&w(&[2, 1], 2)).unwrap().canonical().letters(), &[1, 2]);
        assert_eq!(conj_canonical(&w(&[1, 2, -1], 2)).unwrap(), conj_canonical(&w(&[2], 2)).unwrap());
        assert_eq!(conj_canonical(&w(&[-1, 2], 2)).unwrap(), conj_canonical(&w(&[2, -1], 2)).unwrap());
        assert!(matches!(conj_canonical(&Word::identity(2)), Err(Error::IdentityWord)));
        // inverses stay distinct
        assert_ne!(conj_canonical(&w(&[1, 2], 2)).unwrap(), conj_canonical(&w(&[-2, -1], 2)).unwrap());
    }

    #[test]
    fn primitive_root_examples() {
        let (r, e) = primitive_root(&w(&[1, 2, 1, 2], 2)).unwrap();
        assert_eq!((r.letters(), e), (&[1, 2][..], 2));
        let (r, e) = primitive_root(&w(&[1, 2], 2)).unwrap();
        assert_eq!((r.letters(), e), (&[1, 2][..], 1));
        let (r, e) = primitive_root(&w(&[1, 1, 1], 2)).unwrap();
        assert_eq!((r.letters(), e), (&[1][..], 3));
    }

    #[test]
    fn abelianize_examples() {
        assert_eq!(abelianize_word(&w(&[1, 2, -1, -2], 2)), vec![0, 0]);
        assert_eq!(abelianize_word(&w(&[1, 1, 2], 2)), vec![2, 1]);
        assert_eq!(abelianize_word(&w(&[-2, -2], 2)), vec![0, -2]);
    }

    fn all_words(rank: usize, max_len: usize) -> Vec<Vec<i32>> {
        let letters: Vec<i32> = (1..=rank as i32).flat_map(|i| [i, -i]).collect();
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for word in &frontier {
                for &l in &letters {
                    let mut x: Vec<i32> = word.clone();
                    x.push(l);
                    next.push(x);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn canonical_form_is_rotation_invariant_exhaustive() {
        for rank in 1..=3 {
            let max_len = if rank == 3 { 5 } else { 6 };
            for raw in all_words(rank, max_len) {
                let word = w(&raw, rank);
                if word.is_identity() {
                    continue;
                }
                let c = conj_canonical(&word).unwrap();
                let (core, _) = cyclic_reduce(&word);
                for k in 0..core.len() {
                    let rot = w(&rotate(core.letters(), k), rank);
                    assert_eq!(conj_canonical(&rot).unwrap(), c, "{word} rotation {k}");
                }
                // brute force least rotation
                let best = (0..core.len()).map(|k| rotate(core.letters(), k)).min().unwrap();
                assert_eq!(c.canonical().letters(), &best[..]);
            }
        }
    }

    fn arb_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
        let r = rank as i32;
        prop::collection::vec((1..=r, any::<bool>()), 0..max_len).prop_map(move |v| {
            let letters: Vec<i32> = v.into_iter().map(|(x, s)| if s { x } else { -x }).collect();
            Word::new(letters, rank).unwrap()
        })
    }

    proptest! {
        #[test]
        fn reduce_idempotent_and_shrinking(raw in prop::collection::vec((1..=3i32, any::<bool>()), 0..20)) {
            let letters: Vec<i32> = raw.into_iter().map(|(x, s)| if s { x } else { -x }).collect();
            let once = free_reduce(&letters, 3).unwrap();
            prop_assert!(once.len() <= letters.len());
            prop_assert_eq!(free_reduce(once.letters(), 3).unwrap(), once.clone());
            prop_assert_eq!(once.letters(), &naive_reduce(letters)[..]);
        }

        #[test]
        fn canonical_is_conjugation_invariant(a in arb_word(3, 8), g in arb_word(3, 6)) {
            prop_assume!(!a.is_identity());
            prop_assert_eq!(conj_canonical(&a.conjugate_by(&g)).unwrap(), conj_canonical(&a).unwrap());
        }

        #[test]
        fn root_power_is_conjugate(a in arb_word(2, 10)) {
            prop_assume!(!a.is_identity());
            let (root, e) = primitive_root(&a).unwrap();
            prop_assert!(root.is_cyclically_reduced());
            prop_assert_eq!(conj_canonical(&root.pow(e as i64)).unwrap(), conj_canonical(&a).unwrap());
            let (_, e2) = primitive_root(&root).unwrap();
            prop_assert_eq!(e2, 1);
        }

        #[test]
        fn abelianization_is_additive(u in arb_word(3, 10), v in arb_word(3, 10)) {
            let sum: Vec<i64> = abelianize_word(&u).iter().zip(abelianize_word(&v)).map(|(a, b)| a + b).collect();
            prop_assert_eq!(abelianize_word(&u.mul(&v)), sum);
        }
    }
}
