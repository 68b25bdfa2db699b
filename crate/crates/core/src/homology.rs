//! Exact integer linear algebra, finitely generated abelian groups, first
//! homology of graphs of groups and the tower ledger.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Report, Result};
use crate::gog::{abelianized_presentation, GraphOfGroups};
use crate::words::{abelianize_word, Word};

/// Dense matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Rows of equal length; `cols` is needed when there are no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> IntMatrix {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> IntMatrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        IntMatrix { rows: n, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] += x;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| i64::try_from(x).expect("entry fits i64")).collect())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let x = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = x / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += q · row[src]`.
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let x = &self.data[src * self.cols + j] * q;
            self.data[dst * self.cols + j] += x;
        }
    }

    /// `col[dst] += q · col[src]`.
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let x = &self.data[i * self.cols + src] * q;
            self.data[i * self.cols + dst] += x;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = x;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}[{}]", if i > 0 { "," } else { "" }, row.join(","))?;
        }
        write!(f, "]")
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` in Smith normal form.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries `d_1 | d_2 | …`, length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form. The pivot is the entry of least nonzero absolute value
/// in the remaining block, ties broken by row-major position.
pub fn snf(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d.get(i, j);
                    if !x.is_zero() && pivot.is_none_or(|(pi, pj)| x.abs() < d.get(pi, pj).abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return Snf { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let p = d.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                let q = -d.get(i, t).div_floor(&p);
                if !q.is_zero() {
                    d.add_row_multiple(i, t, &q);
                    u.add_row_multiple(i, t, &q);
                }
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = -d.get(t, j).div_floor(&p);
                if !q.is_zero() {
                    d.add_col_multiple(j, t, &q);
                    v.add_col_multiple(j, t, &q);
                }
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&p)));
            if let Some(i) = offender {
                let one = BigInt::one();
                d.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                continue;
            }
            if p.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    Snf { u, d, v }
}

/// A finitely generated abelian group `Z^betti ⊕ Z/d_1 ⊕ … ⊕ Z/d_k`, together
/// with the images of the presentation's generators.
///
/// Element coordinates list the torsion coordinates (reduced mod `d_i`)
/// first, then the free coordinates.
#[derive(Clone, Debug)]
pub struct AbelianGroup {
    betti: usize,
    divisors: Vec<BigInt>,
    basis_map: Vec<Vec<BigInt>>,
}

/// Quotient of `Z^cols` by the row space of `a`.
pub fn cokernel(a: &IntMatrix) -> AbelianGroup {
    let s = snf(a);
    let diag = s.diagonal();
    let n = a.cols;
    let mut torsion = Vec::new();
    let mut free = Vec::new();
    let mut divisors = Vec::new();
    for j in 0..n {
        match diag.get(j) {
            Some(x) if x.is_one() => {}
            Some(x) if !x.is_zero() => {
                torsion.push(j);
                divisors.push(x.clone());
            }
            _ => free.push(j),
        }
    }
    let coords: Vec<usize> = torsion.iter().chain(&free).copied().collect();
    let mut group = AbelianGroup { betti: free.len(), divisors, basis_map: Vec::new() };
    group.basis_map = (0..n)
        .map(|g| {
            let raw: Vec<BigInt> = coords.iter().map(|&j| s.v.get(g, j).clone()).collect();
            group.normalize(raw)
        })
        .collect();
    group
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

impl AbelianGroup {
    /// `Z^betti ⊕ Z/o_1 ⊕ …` for arbitrary orders (not necessarily a
    /// divisor chain), normalized through Smith normal form.
    pub fn from_orders(orders: &[u64], betti: usize) -> AbelianGroup {
        let n = orders.len() + betti;
        let mut a = IntMatrix::zeros(orders.len(), n);
        for (i, &o) in orders.iter().enumerate() {
            a.set(i, i, BigInt::from(o));
        }
        cokernel(&a)
    }

    pub fn betti(&self) -> usize {
        self.betti
    }

    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    /// Number of element coordinates.
    pub fn dimension(&self) -> usize {
        self.divisors.len() + self.betti
    }

    pub fn generator_count(&self) -> usize {
        self.basis_map.len()
    }

    /// Image of presentation generator `g`.
    pub fn generator_image(&self, g: usize) -> &[BigInt] {
        &self.basis_map[g]
    }

    pub fn same_invariants(&self, other: &AbelianGroup) -> bool {
        self.betti == other.betti && self.divisors == other.divisors
    }

    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.divisors.is_empty()
    }

    /// Reduces torsion coordinates into `0..d_i`.
    pub fn normalize(&self, mut x: Vec<BigInt>) -> Vec<BigInt> {
        for (c, d) in x.iter_mut().zip(&self.divisors) {
            *c = c.mod_floor(d);
        }
        x
    }

    /// Image of a vector over the presentation's generators.
    pub fn image(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.basis_map.len() {
            return Err(Error::DimensionMismatch { expected: self.basis_map.len(), found: x.len() });
        }
        let mut out = vec![BigInt::zero(); self.dimension()];
        for (c, row) in x.iter().zip(&self.basis_map) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o += c * r;
            }
        }
        Ok(self.normalize(out))
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        self.normalize(x.to_vec()).iter().all(Zero::is_zero)
    }

    /// `A / ⟨xs⟩`, with generator images carried through.
    pub fn quotient_by(&self, xs: &[Vec<BigInt>]) -> Result<AbelianGroup> {
        let k = self.dimension();
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (i, d) in self.divisors.iter().enumerate() {
            let mut r = vec![BigInt::zero(); k];
            r[i] = d.clone();
            rows.push(r);
        }
        for x in xs {
            if x.len() != k {
                return Err(Error::DimensionMismatch { expected: k, found: x.len() });
            }
            rows.push(x.clone());
        }
        let q = cokernel(&IntMatrix::from_big_rows(rows, k));
        let basis_map = self.basis_map.iter().map(|x| q.image(x).expect("dimensions agree")).collect();
        Ok(AbelianGroup { betti: q.betti, divisors: q.divisors, basis_map })
    }

    /// `A ⊕ Z`.
    pub fn with_free_summand(&self) -> AbelianGroup {
        let mut basis_map = self.basis_map.clone();
        for row in &mut basis_map {
            row.push(BigInt::zero());
        }
        AbelianGroup { betti: self.betti + 1, divisors: self.divisors.clone(), basis_map }
    }

    /// Number of cyclic `p`-power factors in a primary decomposition.
    pub fn p_rank(&self, p: u64) -> Result<usize> {
        check_prime(p)?;
        let p = BigInt::from(p);
        let r = self.divisors.iter().filter(|d| d.is_multiple_of(&p)).count();
        debug_assert_eq!(r, self.mod_p_dimension_unchecked(&p) - self.betti);
        Ok(r)
    }

    /// `dim_{F_p}(A / pA)`, computed from the relation matrix augmented by
    /// `p·I`.
    pub fn mod_p_dimension(&self, p: u64) -> Result<usize> {
        check_prime(p)?;
        Ok(self.mod_p_dimension_unchecked(&BigInt::from(p)))
    }

    fn mod_p_dimension_unchecked(&self, p: &BigInt) -> usize {
        let k = self.dimension();
        let mut a = IntMatrix::zeros(self.divisors.len() + k, k);
        for (i, d) in self.divisors.iter().enumerate() {
            a.set(i, i, d.clone());
        }
        for j in 0..k {
            a.set(self.divisors.len() + j, j, p.clone());
        }
        let q = cokernel(&a);
        debug_assert_eq!(q.betti, 0);
        q.divisors.len()
    }

    /// `e_p` with `|Tor_p(A)| = p^{e_p}`.
    pub fn torsion_exponent(&self, p: u64) -> Result<u64> {
        check_prime(p)?;
        let p = BigInt::from(p);
        Ok(self.divisors.iter().map(|d| valuation(d, &p)).sum())
    }

    /// Generators of the `p`-primary torsion subgroup, as elements.
    pub fn p_primary_generators(&self, p: u64) -> Result<Vec<Vec<BigInt>>> {
        check_prime(p)?;
        let pb = BigInt::from(p);
        let k = self.dimension();
        let mut out = Vec::new();
        for (i, d) in self.divisors.iter().enumerate() {
            let e = valuation(d, &pb);
            if e > 0 {
                let mut x = vec![BigInt::zero(); k];
                x[i] = d / num_traits::pow(pb.clone(), e as usize);
                out.push(x);
            }
        }
        Ok(out)
    }
}

fn valuation(d: &BigInt, p: &BigInt) -> u64 {
    let mut d = d.clone();
    let mut e = 0;
    while !d.is_zero() && d.is_multiple_of(p) {
        d /= p;
        e += 1;
    }
    e
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.divisors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// First homology of a connected graph of groups.
pub fn h1(g: &GraphOfGroups) -> Result<AbelianGroup> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(cokernel(&abelianized_presentation(g).relations))
}

/// Image in `a = h1(g)` of the element `w` of the vertex group at `vertex`.
pub fn class_image(g: &GraphOfGroups, a: &AbelianGroup, vertex: usize, w: &Word) -> Result<Vec<BigInt>> {
    let Some(v) = g.vertices().get(vertex) else {
        return Err(Error::UnknownName { kind: "vertex", name: format!("#{vertex}") });
    };
    if w.rank() != v.rank {
        return Err(Error::DimensionMismatch { expected: v.rank, found: w.rank() });
    }
    let mut x = vec![BigInt::zero(); a.generator_count()];
    let offset = g.generator_offset(vertex);
    for (k, c) in abelianize_word(w).into_iter().enumerate() {
        x[offset + k] = BigInt::from(c);
    }
    a.image(&x)
}

/// Image of the generator of a cyclic vertex.
pub fn cyclic_vertex_image(g: &GraphOfGroups, a: &AbelianGroup, vertex: usize) -> Result<Vec<BigInt>> {
    if vertex >= g.vertices().len() {
        return Err(Error::UnknownName { kind: "vertex", name: format!("#{vertex}") });
    }
    if !g.is_cyclic(vertex) {
        return Err(Error::Surgery(format!("vertex {} is not cyclic", g.vertex(vertex).name)));
    }
    class_image(g, a, vertex, &Word::generator(1, 1))
}

/// One step of a tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRow {
    pub step: usize,
    /// `[G_0 : G_step]`.
    pub degree: BigInt,
    /// `e_p` for every tracked prime.
    pub exponents: BTreeMap<u64, u64>,
    /// Prime introduced at this step with `⟦G_0 : H_p⟧`.
    pub introduced: Option<(u64, BigInt)>,
}

impl LedgerRow {
    /// `e_p / degree`.
    pub fn ratio(&self, p: u64) -> BigRational {
        let e = self.exponents.get(&p).copied().unwrap_or(0);
        BigRational::new(BigInt::from(e), self.degree.clone())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TowerLedger {
    pub primes: Vec<u64>,
    pub rows: Vec<LedgerRow>,
}

impl TowerLedger {
    pub fn new(primes: Vec<u64>) -> TowerLedger {
        TowerLedger { primes, rows: Vec::new() }
    }
}

/// Appends a row, requiring consecutive steps and a degree that is a proper
/// multiple of the previous one.
pub fn ledger_update(mut l: TowerLedger, row: LedgerRow) -> Result<TowerLedger> {
    if let Some(last) = l.rows.last() {
        if row.step != last.step + 1 {
            return Err(Error::Surgery(format!("ledger step {} follows step {}", row.step, last.step)));
        }
        if row.degree <= last.degree || !row.degree.is_multiple_of(&last.degree) {
            return Err(Error::Surgery(format!(
                "ledger degree {} does not properly extend {}",
                row.degree, last.degree
            )));
        }
    }
    for p in row.exponents.keys() {
        if !l.primes.contains(p) {
            l.primes.push(*p);
        }
    }
    l.rows.push(row);
    Ok(l)
}

/// The lower bound `Π_{j=i+1}^{k} (1 − 2^{−j}) / (2^{i+1} · P_i)` for a prime
/// introduced at step `i` with `P_i = ⟦G_0 : H_{p_i}⟧`, evaluated at step `k`.
pub fn ledger_bound(i: usize, k: usize, piece_index: &BigInt) -> BigRational {
    let two = BigInt::from(2);
    let mut acc = BigRational::new(BigInt::one(), num_traits::pow(two.clone(), i + 1) * piece_index);
    for j in i + 1..=k {
        let pj = num_traits::pow(two.clone(), j);
        acc *= BigRational::new(&pj - 1, pj);
    }
    acc
}

pub fn ledger_check(l: &TowerLedger) -> Report {
    let mut report = Report::new();
    for w in l.rows.windows(2) {
        if w[1].degree <= w[0].degree || !w[1].degree.is_multiple_of(&w[0].degree) {
            report.push(format!("step {}", w[1].step), "degree does not properly extend the previous step");
        }
    }
    for (idx, row) in l.rows.iter().enumerate() {
        let Some((p, piece)) = &row.introduced else { continue };
        if piece.is_zero() || piece.is_negative() {
            report.push(format!("step {}", row.step), "piece index must be positive");
            continue;
        }
        for later in &l.rows[idx..] {
            let bound = ledger_bound(row.step, later.step, piece);
            let ratio = later.ratio(*p);
            if ratio < bound {
                report.push(
                    format!("step {} prime {p}", later.step),
                    format!("ratio {ratio} below bound {bound} (introduced at step {})", row.step),
                );
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows, rows.first().map_or(0, Vec::len))
    }

    fn check_snf(a: &IntMatrix) -> Vec<BigInt> {
        let s = snf(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert!(s.d.is_diagonal());
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        diag
    }

    #[test]
    fn snf_examples() {
        let d = check_snf(&big(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(d, vec![BigInt::from(2), BigInt::from(4)]);
        let d = check_snf(&IntMatrix::zeros(2, 3));
        assert!(d.iter().all(Zero::is_zero));
        let d = check_snf(&IntMatrix::identity(3));
        assert!(d.iter().all(One::is_one));
    }

    #[test]
    fn determinant_oracle() {
        assert_eq!(big(&[vec![2, 4], vec![6, 8]]).determinant(), BigInt::from(-8));
        assert_eq!(big(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).determinant(), BigInt::from(-2));
        assert_eq!(big(&[vec![0, 0], vec![1, 1]]).determinant(), BigInt::zero());
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&big(&[vec![-2, 0]])).to_string(), "Z ⊕ Z/2");
        assert_eq!(cokernel(&IntMatrix::zeros(0, 4)).to_string(), "Z^4");
        assert!(cokernel(&IntMatrix::identity(2)).is_trivial());
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1(&fixtures::hnn_f1()).unwrap().to_string(), "Z ⊕ Z/2");
        assert_eq!(h1(&fixtures::genus2()).unwrap().to_string(), "Z^4");
        let single = GraphOfGroups::builder().vertex("v", 2).build().unwrap();
        assert_eq!(h1(&single).unwrap().to_string(), "Z^2");
    }

    #[test]
    fn class_images() {
        let g = fixtures::hnn_f1();
        let a = h1(&g).unwrap();
        let x = class_image(&g, &a, 0, &Word::generator(1, 1)).unwrap();
        // a has order 2 and generates the torsion.
        assert!(!a.is_zero_element(&x));
        let twice: Vec<BigInt> = x.iter().map(|c| c * 2).collect();
        assert!(a.is_zero_element(&twice));

        let g = fixtures::genus2();
        let a = h1(&g).unwrap();
        let comm = Word::new(vec![1, 2, -1, -2], 2).unwrap();
        assert!(a.is_zero_element(&class_image(&g, &a, 0, &comm).unwrap()));
        assert!(matches!(class_image(&g, &a, 7, &comm), Err(Error::UnknownName { .. })));
    }

    /// Brute-force invariants of a finite abelian group given as a quotient
    /// of `Z/n_1 ⊕ … ⊕ Z/n_k` by one element.
    fn brute_quotient(orders: &[u64], x: &[u64]) -> Vec<u64> {
        let total: u64 = orders.iter().product();
        let elems: Vec<Vec<u64>> = (0..total)
            .map(|mut i| {
                orders
                    .iter()
                    .map(|&o| {
                        let c = i % o;
                        i /= o;
                        c
                    })
                    .collect()
            })
            .collect();
        let add = |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).zip(orders).map(|((x, y), o)| (x + y) % o).collect() };
        let mut sub = vec![vec![0; orders.len()]];
        loop {
            let next = add(sub.last().unwrap(), x);
            if next == sub[0] {
                break;
            }
            sub.push(next);
        }
        let qsize = total / sub.len() as u64;
        // Invariant factors from the counts of elements killed by each m.
        let killed = |m: u64| -> u64 {
            let count = elems.iter().filter(|e| {
                let mut y = vec![0; orders.len()];
                for _ in 0..m {
                    y = add(&y, e);
                }
                sub.contains(&y)
            });
            count.count() as u64 / sub.len() as u64
        };
        let mut factors = Vec::new();
        let mut remaining = qsize;
        // Peel off the number of elements of order dividing m for prime powers.
        let mut n = 2;
        let mut primes = Vec::new();
        while n <= remaining {
            if remaining.is_multiple_of(n) && is_prime(n) {
                primes.push(n);
                while remaining.is_multiple_of(n) {
                    remaining /= n;
                }
            }
            n += 1;
        }
        for p in primes {
            let mut prev = 1;
            let mut pk = p;
            let mut counts = Vec::new();
            loop {
                let c = killed(pk);
                let rank = (c / prev).ilog(p) as usize;
                if c == prev {
                    break;
                }
                counts.push(rank);
                prev = c;
                pk *= p;
            }
            for (k, &r) in counts.iter().enumerate() {
                let next = counts.get(k + 1).copied().unwrap_or(0);
                for _ in 0..(r - next) {
                    factors.push(p.pow(k as u32 + 1));
                }
            }
        }
        factors.sort_unstable();
        factors
    }

    fn primary_parts(a: &AbelianGroup) -> Vec<u64> {
        let mut out = Vec::new();
        for d in a.divisors() {
            let mut d = u64::try_from(d).unwrap();
            let mut p = 2;
            while d > 1 {
                let mut q = 1;
                while d % p == 0 {
                    d /= p;
                    q *= p;
                }
                if q > 1 {
                    out.push(q);
                }
                p += 1;
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn quotient_examples() {
        let z = AbelianGroup::from_orders(&[], 1);
        let q = z.quotient_by(&[vec![BigInt::from(2)]]).unwrap();
        assert_eq!(q.to_string(), "Z/2");

        let a = AbelianGroup::from_orders(&[4, 2], 0);
        // (2, 1) in Z/4 ⊕ Z/2 coordinates, pushed through the generator map.
        let x = a.image(&[BigInt::from(2), BigInt::from(1)]).unwrap();
        let q = a.quotient_by(&[x]).unwrap();
        assert_eq!(primary_parts(&q), brute_quotient(&[4, 2], &[2, 1]));
        assert_eq!(primary_parts(&q), vec![4]);

        assert!(a.quotient_by(&[]).unwrap().same_invariants(&a));
        assert!(matches!(a.quotient_by(&[vec![BigInt::one()]]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn quotient_matches_brute_force() {
        for orders in [[2u64, 4], [3, 6], [4, 4], [2, 6]] {
            for x0 in 0..orders[0] {
                for x1 in 0..orders[1] {
                    let a = AbelianGroup::from_orders(&orders, 0);
                    let x = a.image(&[BigInt::from(x0), BigInt::from(x1)]).unwrap();
                    let q = a.quotient_by(&[x]).unwrap();
                    assert_eq!(primary_parts(&q), brute_quotient(&orders, &[x0, x1]), "{orders:?} {x0} {x1}");
                }
            }
        }
    }

    #[test]
    fn ranks_and_exponents() {
        let a = AbelianGroup::from_orders(&[4, 2], 1);
        assert_eq!((a.p_rank(2).unwrap(), a.betti(), a.torsion_exponent(2).unwrap()), (2, 1, 3));
        let a = AbelianGroup::from_orders(&[6], 0);
        assert_eq!((a.p_rank(3).unwrap(), a.torsion_exponent(3).unwrap()), (1, 1));
        let a = AbelianGroup::from_orders(&[], 3);
        for p in [2, 3, 5] {
            assert_eq!((a.p_rank(p).unwrap(), a.torsion_exponent(p).unwrap()), (0, 0));
        }
        assert!(matches!(a.p_rank(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn display_forms() {
        assert_eq!(AbelianGroup::from_orders(&[2, 4], 2).to_string(), "Z^2 ⊕ Z/2 ⊕ Z/4");
        assert_eq!(AbelianGroup::from_orders(&[], 0).to_string(), "0");
        assert_eq!(AbelianGroup::from_orders(&[2, 3], 0).to_string(), "Z/6");
    }

    fn row(step: usize, degree: i64, e2: u64, introduced: Option<(u64, i64)>) -> LedgerRow {
        LedgerRow {
            step,
            degree: BigInt::from(degree),
            exponents: BTreeMap::from([(2, e2)]),
            introduced: introduced.map(|(p, x)| (p, BigInt::from(x))),
        }
    }

    #[test]
    fn ledger_examples() {
        assert!(ledger_check(&TowerLedger::default()).is_ok());
        let l = ledger_update(TowerLedger::new(vec![2]), row(0, 1, 0, None)).unwrap();
        let l = ledger_update(l, row(1, 8, 2, Some((2, 1)))).unwrap();
        assert!(ledger_check(&l).is_ok());
        let bad = ledger_update(TowerLedger::new(vec![2]), row(0, 1, 0, None)).unwrap();
        let bad = ledger_update(bad, row(1, 8, 1, Some((2, 1)))).unwrap();
        assert!(ledger_check(&bad).mentions("below bound"));
        assert!(ledger_update(l, row(2, 12, 0, None)).is_err());
    }

    #[test]
    fn ledger_bound_values() {
        assert_eq!(ledger_bound(1, 1, &BigInt::from(3)), BigRational::new(1.into(), 12.into()));
        assert_eq!(ledger_bound(1, 2, &BigInt::from(1)), BigRational::new(3.into(), 16.into()));
    }

    proptest! {
        #[test]
        fn snf_invariants(rows in 0usize..5, cols in 0usize..5, seed in proptest::collection::vec(-9i64..=9, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| seed[i * 5..i * 5 + cols].to_vec()).collect();
            let a = IntMatrix::from_rows(&data, cols);
            let diag = check_snf(&a);
            let g = data.iter().flatten().fold(0i64, |acc, &x| acc.gcd(&x));
            prop_assert_eq!(diag.first().cloned().unwrap_or_default(), BigInt::from(g));
        }

        #[test]
        fn p_rank_matches_mod_p(orders in proptest::collection::vec(1u64..=30, 0..4), betti in 0usize..3) {
            let a = AbelianGroup::from_orders(&orders, betti);
            for p in [2u64, 3, 5, 7] {
                prop_assert_eq!(a.p_rank(p).unwrap(), a.mod_p_dimension(p).unwrap() - a.betti());
            }
        }
    }
}
