//! Exact sparse linear algebra over the rationals and prime fields.
//!
//! Matrices carry small rational coefficients (every complex built in this
//! crate is defined over the integers, possibly with user supplied rational
//! scalars). The working [`Field`] is chosen when a rank, kernel or homology
//! dimension is requested: over `Q` elimination runs on arbitrary precision
//! rationals, over `F_p` on reduced residues.
//!
//! Elimination is deterministic: vectors are inserted in order of increasing
//! support size (ties broken by index) and the pivot of a vector is its
//! smallest nonzero coordinate.

use std::cell::Cell;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients stored in matrices and linear combinations.
pub type Rational = Ratio<i64>;

/// A sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec<E> = Vec<(usize, E)>;

/// Coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// 0 for `Q`, `p` for `F_p`.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn is_zero(self, q: &Rational) -> bool {
        match self {
            Field::Rational => q.is_zero(),
            Field::Prime(p) => q.numer().rem_euclid(p as i64) == 0,
        }
    }

    /// Residue of `q` modulo `p`. Errors when the denominator is not invertible.
    pub fn reduce(self, q: &Rational) -> Result<u64> {
        match self {
            Field::Rational => Err(Error::Unsupported("reduce called over Q".into())),
            Field::Prime(p) => reduce_mod(q, p),
        }
    }

    /// Checks that every coefficient of `m` is defined over this field.
    pub fn admits(self, m: &SparseMatrix) -> Result<()> {
        if let Field::Prime(p) = self {
            for (_, _, v) in m.entries() {
                reduce_mod(v, p)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t.eq_ignore_ascii_case("qq") {
            return Ok(Field::Rational);
        }
        let digits = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix('F').or_else(|| t.strip_prefix('f')))
            .ok_or_else(|| Error::Parse {
                line: 0,
                column: 0,
                message: format!("unknown field `{s}` (expected Q or Fp)"),
            })?;
        let p: u64 = digits.parse().map_err(|_| Error::Parse {
            line: 0,
            column: 0,
            message: format!("unknown field `{s}` (expected Q or Fp)"),
        })?;
        Field::prime(p)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn reduce_mod(q: &Rational, p: u64) -> Result<u64> {
    let pi = p as i64;
    let num = q.numer().rem_euclid(pi) as u64;
    let den = q.denom().rem_euclid(pi) as u64;
    if den == 0 {
        return Err(Error::Coefficient(format!("{q} over F{p}")));
    }
    Ok(mul_mod(num, inv_mod(den, p), p))
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{a} not invertible mod {p}");
    t0.rem_euclid(p as i128) as u64
}

/// A sparse matrix stored by columns. Column `j` is the image of the `j`-th
/// source basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVec<Rational>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i, Rational::one())]).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// and zeros dropped.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            columns[c].push((r, v));
        }
        let columns = columns.into_iter().map(normalize_column).collect();
        SparseMatrix { rows, cols, columns }
    }

    /// Builds a matrix from columns given as unsorted `(row, value)` lists.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, Rational)>>) -> Self {
        let cols = columns.len();
        let columns: Vec<_> = columns.into_iter().map(normalize_column).collect();
        for col in &columns {
            if let Some(&(r, _)) = col.last() {
                assert!(r < rows, "row {r} outside matrix with {rows} rows");
            }
        }
        SparseMatrix { rows, cols, columns }
    }

    /// Dense integer constructor (row-major), mostly for tests and small examples.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let trip = rows.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, &v)| (r, c, Rational::from_integer(v)))
        });
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, Rational)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.columns[c].binary_search_by_key(&r, |&(i, _)| i) {
            Ok(k) => self.columns[c][k].1,
            Err(_) => Rational::zero(),
        }
    }

    /// Entries in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Number of entries that do not vanish over `field`.
    pub fn nonzero_over(&self, field: Field) -> usize {
        self.entries().filter(|(_, _, v)| !field.is_zero(v)).count()
    }

    pub fn transpose(&self) -> Self {
        let trip = self.entries().map(|(r, c, v)| (c, r, *v));
        Self::from_triplets(self.cols, self.rows, trip)
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc: HashMap<usize, Rational> = HashMap::new();
                for &(k, b) in col {
                    for &(r, a) in &self.columns[k] {
                        *acc.entry(r).or_insert_with(Rational::zero) += a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        Ok(SparseMatrix::from_columns(self.rows, columns))
    }

    pub fn add(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let trip = self.entries().chain(rhs.entries()).map(|(r, c, v)| (r, c, *v));
        Ok(Self::from_triplets(self.rows, self.cols, trip))
    }

    pub fn scale(&self, s: Rational) -> SparseMatrix {
        let trip = self.entries().map(|(r, c, v)| (r, c, *v * s));
        Self::from_triplets(self.rows, self.cols, trip)
    }

    /// Applies the matrix to a sparse vector with big rational entries.
    pub fn apply_big(&self, v: &[(usize, BigRational)]) -> SparseVec<BigRational> {
        let mut acc: HashMap<usize, BigRational> = HashMap::new();
        for (k, b) in v {
            for (r, a) in &self.columns[*k] {
                *acc.entry(*r).or_insert_with(BigRational::zero) += big(a) * b;
            }
        }
        let mut out: Vec<_> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    /// Reorders rows and columns: entry `(r, c)` moves to `(row_perm[r], col_perm[c])`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> SparseMatrix {
        let trip = self.entries().map(|(r, c, v)| (row_perm[r], col_perm[c], *v));
        Self::from_triplets(self.rows, self.cols, trip)
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::Shape("hcat row mismatch".into()));
        }
        let mut columns = self.columns.clone();
        columns.extend(rhs.columns.iter().cloned());
        Ok(SparseMatrix { rows: self.rows, cols: self.cols + rhs.cols, columns })
    }
}

fn normalize_column(mut col: Vec<(usize, Rational)>) -> SparseVec<Rational> {
    col.sort_by_key(|(r, _)| *r);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

pub(crate) fn big(q: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*q.numer()), BigInt::from(*q.denom()))
}

/// Field arithmetic used by the elimination kernels.
pub trait Arith {
    type E: Clone + PartialEq + fmt::Debug;
    fn lift(&self, q: &Rational) -> Self::E;
    fn lift_big(&self, q: &BigRational) -> Self::E;
    fn is_zero(&self, e: &Self::E) -> bool;
    fn one(&self) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn div(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// `a - f * b`
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Self::E;
    fn to_big(&self, e: &Self::E) -> BigRational;
}

pub struct QArith;

impl Arith for QArith {
    type E = BigRational;
    fn lift(&self, q: &Rational) -> BigRational {
        big(q)
    }
    fn lift_big(&self, q: &BigRational) -> BigRational {
        q.clone()
    }
    fn is_zero(&self, e: &BigRational) -> bool {
        e.is_zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a / b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub_mul(&self, a: &BigRational, f: &BigRational, b: &BigRational) -> BigRational {
        a - f * b
    }
    fn to_big(&self, e: &BigRational) -> BigRational {
        e.clone()
    }
}

/// Rationals with machine-word numerators and denominators. Any overflow is
/// recorded and the caller reruns the computation with [`QArith`].
pub(crate) struct SmallQArith {
    overflow: Cell<bool>,
}

impl SmallQArith {
    pub(crate) fn new() -> Self {
        SmallQArith { overflow: Cell::new(false) }
    }

    pub(crate) fn overflowed(&self) -> bool {
        self.overflow.get()
    }

    fn make(&self, n: i128, d: i128) -> Rational {
        if n == 0 {
            return Rational::zero();
        }
        let g = n.gcd(&d);
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rational::new_raw(n, d),
            _ => {
                self.overflow.set(true);
                Rational::one()
            }
        }
    }
}

impl Arith for SmallQArith {
    type E = Rational;
    fn lift(&self, q: &Rational) -> Rational {
        *q
    }
    fn lift_big(&self, q: &BigRational) -> Rational {
        match to_small(q) {
            Ok(r) => r,
            Err(_) => {
                self.overflow.set(true);
                Rational::one()
            }
        }
    }
    fn is_zero(&self, e: &Rational) -> bool {
        e.is_zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        self.make(
            *a.numer() as i128 * *b.numer() as i128,
            *a.denom() as i128 * *b.denom() as i128,
        )
    }
    fn div(&self, a: &Rational, b: &Rational) -> Rational {
        self.make(
            *a.numer() as i128 * *b.denom() as i128,
            *a.denom() as i128 * *b.numer() as i128,
        )
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn sub_mul(&self, a: &Rational, f: &Rational, b: &Rational) -> Rational {
        let fb = self.mul(f, b);
        let (an, ad) = (*a.numer() as i128, *a.denom() as i128);
        let (bn, bd) = (*fb.numer() as i128, *fb.denom() as i128);
        match an.checked_mul(bd).zip(bn.checked_mul(ad)).and_then(|(x, y)| x.checked_sub(y)) {
            Some(n) => self.make(n, ad * bd),
            None => {
                self.overflow.set(true);
                Rational::one()
            }
        }
    }
    fn to_big(&self, e: &Rational) -> BigRational {
        big(e)
    }
}

pub(crate) struct PArith(pub u64);

impl Arith for PArith {
    type E = u64;
    fn lift(&self, q: &Rational) -> u64 {
        reduce_mod(q, self.0).expect("coefficient not defined over F_p")
    }
    fn lift_big(&self, q: &BigRational) -> u64 {
        let p = BigInt::from(self.0);
        let n = q.numer().mod_floor(&p);
        let d = q.denom().mod_floor(&p);
        let n: u64 = n.try_into().expect("residue fits");
        let d: u64 = d.try_into().expect("residue fits");
        assert!(d != 0, "denominator divisible by p");
        mul_mod(n, inv_mod(d, self.0), self.0)
    }
    fn is_zero(&self, e: &u64) -> bool {
        *e == 0
    }
    fn one(&self) -> u64 {
        1
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.0)
    }
    fn div(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, inv_mod(*b, self.0), self.0)
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> u64 {
        let fb = mul_mod(*f, *b, self.0);
        (a + self.0 - fb) % self.0
    }
    fn to_big(&self, e: &u64) -> BigRational {
        BigRational::from_integer(BigInt::from(*e))
    }
}

/// `a - f * b` on sparse vectors.
fn axpy<A: Arith>(ar: &A, a: &[(usize, A::E)], f: &A::E, b: &[(usize, A::E)]) -> SparseVec<A::E> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = ar.neg(&ar.mul(f, &b[j].1));
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = ar.sub_mul(&a[i].1, f, &b[j].1);
            if !ar.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon basis grown one vector at a time. Pivot rows are normalized to
/// a leading 1 and only leading terms are eliminated.
pub(crate) struct Echelon<A: Arith> {
    pub(crate) ar: A,
    pivot_of: HashMap<usize, usize>,
    rows: Vec<SparseVec<A::E>>,
}

impl<A: Arith> Echelon<A> {
    pub(crate) fn new(ar: A) -> Self {
        Echelon { ar, pivot_of: HashMap::new(), rows: Vec::new() }
    }

    #[cfg(test)]
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns whether it was independent of the current span.
    pub(crate) fn insert(&mut self, mut v: SparseVec<A::E>) -> bool {
        loop {
            let Some((lead, coef)) = v.first().cloned() else {
                return false;
            };
            match self.pivot_of.get(&lead) {
                Some(&r) => v = axpy(&self.ar, &v, &coef, &self.rows[r]),
                None => {
                    let inv = self.ar.div(&self.ar.one(), &coef);
                    let v: Vec<_> = v.into_iter().map(|(i, e)| (i, self.ar.mul(&e, &inv))).collect();
                    self.pivot_of.insert(lead, self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
    }
}

/// Reduced row echelon form grown one vector at a time.
pub struct ReducedEchelon<A: Arith> {
    pub(crate) ar: A,
    pivot_of: HashMap<usize, usize>,
    pub(crate) rows: Vec<SparseVec<A::E>>,
}

impl<A: Arith> ReducedEchelon<A> {
    pub(crate) fn new(ar: A) -> Self {
        ReducedEchelon { ar, pivot_of: HashMap::new(), rows: Vec::new() }
    }

    pub(crate) fn is_pivot(&self, col: usize) -> bool {
        self.pivot_of.contains_key(&col)
    }

    /// Fully reduces `v` against the current rows.
    pub(crate) fn reduce(&self, mut v: SparseVec<A::E>) -> SparseVec<A::E> {
        let hits: Vec<(usize, A::E)> = v
            .iter()
            .filter(|(i, _)| self.pivot_of.contains_key(i))
            .cloned()
            .collect();
        for (col, _) in hits {
            let coef = match v.binary_search_by_key(&col, |(i, _)| *i) {
                Ok(k) => v[k].1.clone(),
                Err(_) => continue,
            };
            let r = self.pivot_of[&col];
            v = axpy(&self.ar, &v, &coef, &self.rows[r]);
        }
        v
    }

    pub(crate) fn insert(&mut self, v: SparseVec<A::E>) -> bool {
        let v = self.reduce(v);
        let Some((lead, coef)) = v.first().cloned() else {
            return false;
        };
        let inv = self.ar.div(&self.ar.one(), &coef);
        let v: Vec<_> = v.into_iter().map(|(i, e)| (i, self.ar.mul(&e, &inv))).collect();
        for row in self.rows.iter_mut() {
            if let Ok(k) = row.binary_search_by_key(&lead, |(i, _)| *i) {
                let f = row[k].1.clone();
                *row = axpy(&self.ar, row, &f, &v);
            }
        }
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(v);
        true
    }
}

fn sorted_vectors(m: &SparseMatrix) -> Vec<&SparseVec<Rational>> {
    let mut cols: Vec<(usize, &SparseVec<Rational>)> = m.columns.iter().enumerate().collect();
    cols.sort_by_key(|(i, c)| (c.len(), *i));
    cols.into_iter().map(|(_, c)| c).collect()
}

/// Echelon rank in natural order; an independent check on [`rank`].
#[cfg(test)]
fn rank_with<A: Arith>(ar: A, m: &SparseMatrix) -> usize {
    rank_echelon(ar, m).0
}

#[cfg(test)]
fn rank_echelon<A: Arith>(ar: A, m: &SparseMatrix) -> (usize, Echelon<A>) {
    // Rank of the column space equals rank of the row space; eliminate the
    // smaller family of vectors.
    let t;
    let src = if m.rows < m.cols {
        t = m.transpose();
        &t
    } else {
        m
    };
    let mut ech = Echelon::new(ar);
    for col in sorted_vectors(src) {
        let v: Vec<_> = col
            .iter()
            .map(|(i, q)| (*i, ech.ar.lift(q)))
            .filter(|(_, e)| !ech.ar.is_zero(e))
            .collect();
        ech.insert(v);
        if ech.rank() == src.rows.min(src.cols) {
            break;
        }
    }
    (ech.rank(), ech)
}

/// Removes rows and columns with a single nonzero entry, repeatedly. Such an
/// entry is a pivot: the rank drops by one when its row and column go. Returns
/// the number of pivots removed and the remaining submatrix.
fn peel(m: &SparseMatrix, field: Field) -> (usize, SparseMatrix) {
    let cols: Vec<Vec<(usize, Rational)>> =
        m.columns.iter().map(|c| c.iter().filter(|(_, q)| !field.is_zero(q)).cloned().collect()).collect();
    let mut row_entries: Vec<Vec<usize>> = vec![Vec::new(); m.rows];
    for (j, c) in cols.iter().enumerate() {
        for (i, _) in c {
            row_entries[*i].push(j);
        }
    }
    let mut col_count: Vec<usize> = cols.iter().map(Vec::len).collect();
    let mut row_count: Vec<usize> = row_entries.iter().map(Vec::len).collect();
    let mut row_live = vec![true; m.rows];
    let mut col_live = vec![true; m.cols];
    let mut col_queue: Vec<usize> = (0..m.cols).filter(|&j| col_count[j] == 1).collect();
    let mut row_queue: Vec<usize> = (0..m.rows).filter(|&i| row_count[i] == 1).collect();
    let mut pivots = 0;
    loop {
        if let Some(j) = col_queue.pop() {
            if !col_live[j] || col_count[j] != 1 {
                continue;
            }
            let i = cols[j].iter().map(|(i, _)| *i).find(|&i| row_live[i]).expect("one live entry");
            pivots += 1;
            col_live[j] = false;
            row_live[i] = false;
            for &k in &row_entries[i] {
                if col_live[k] {
                    col_count[k] -= 1;
                    if col_count[k] == 1 {
                        col_queue.push(k);
                    }
                }
            }
        } else if let Some(i) = row_queue.pop() {
            if !row_live[i] || row_count[i] != 1 {
                continue;
            }
            let j = row_entries[i].iter().copied().find(|&j| col_live[j]).expect("one live entry");
            pivots += 1;
            row_live[i] = false;
            col_live[j] = false;
            for (k, _) in &cols[j] {
                if row_live[*k] {
                    row_count[*k] -= 1;
                    if row_count[*k] == 1 {
                        row_queue.push(*k);
                    }
                }
            }
        } else {
            break;
        }
    }
    let mut new_row = vec![usize::MAX; m.rows];
    let mut nr = 0;
    for i in 0..m.rows {
        if row_live[i] {
            new_row[i] = nr;
            nr += 1;
        }
    }
    let rest: Vec<Vec<(usize, Rational)>> = (0..m.cols)
        .filter(|&j| col_live[j])
        .map(|j| cols[j].iter().filter(|(i, _)| row_live[*i]).map(|(i, q)| (new_row[*i], *q)).collect())
        .collect();
    (pivots, SparseMatrix { rows: nr, cols: rest.len(), columns: rest })
}

/// Rank of `m` over `field`, computed exactly.
pub fn rank(m: &SparseMatrix, field: Field) -> usize {
    let (pivots, rest) = peel(m, field);
    pivots + rank_unpeeled(&rest, field)
}

fn rank_unpeeled(m: &SparseMatrix, field: Field) -> usize {
    match field {
        Field::Rational => {
            let small = SmallQArith::new();
            let r = markowitz_rank(&small, m);
            if small.overflowed() {
                markowitz_rank(&QArith, m)
            } else {
                r
            }
        }
        Field::Prime(p) => markowitz_rank(&PArith(p), m),
    }
}

fn entry<E: Clone>(v: &[(usize, E)], j: usize) -> E {
    let k = v.binary_search_by_key(&j, |(i, _)| *i).expect("entry present");
    v[k].1.clone()
}

/// Rank by sparse elimination on rows. Each pivot is taken in a column with
/// fewest entries (ties by index), in its shortest row, which keeps fill-in
/// low on boundary-like matrices.
fn markowitz_rank<A: Arith>(ar: &A, m: &SparseMatrix) -> usize {
    let t = m.transpose();
    let mut rows: Vec<SparseVec<A::E>> = t
        .columns
        .iter()
        .map(|r| r.iter().map(|(j, q)| (*j, ar.lift(q))).filter(|(_, e)| !ar.is_zero(e)).collect())
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (i, r) in rows.iter().enumerate() {
        for (j, _) in r {
            col_rows[*j].insert(i);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..m.cols).map(|j| Reverse((col_rows[j].len(), j))).collect();
    let mut done = vec![false; m.cols];
    let mut rank = 0;
    while let Some(Reverse((count, c))) = heap.pop() {
        if done[c] || count != col_rows[c].len() {
            continue;
        }
        done[c] = true;
        if count == 0 {
            continue;
        }
        let p = *col_rows[c].iter().min_by_key(|&&i| (rows[i].len(), i)).expect("nonempty");
        rank += 1;
        let prow = std::mem::take(&mut rows[p]);
        let pc = entry(&prow, c);
        let others: Vec<usize> = col_rows[c].iter().copied().filter(|&i| i != p).collect();
        for r in others {
            let f = ar.div(&entry(&rows[r], c), &pc);
            let old = std::mem::take(&mut rows[r]);
            let new = axpy(ar, &old, &f, &prow);
            for (j, _) in &prow {
                let had = old.binary_search_by_key(j, |(k, _)| *k).is_ok();
                let has = new.binary_search_by_key(j, |(k, _)| *k).is_ok();
                if had && !has {
                    col_rows[*j].remove(&r);
                } else if !had && has {
                    col_rows[*j].insert(r);
                }
            }
            rows[r] = new;
        }
        for (j, _) in &prow {
            col_rows[*j].remove(&p);
            if !done[*j] {
                heap.push(Reverse((col_rows[*j].len(), *j)));
            }
        }
    }
    rank
}

fn kernel_with<A: Arith>(ar: A, m: &SparseMatrix) -> Vec<SparseVec<BigRational>> {
    let rows = m.transpose();
    let mut ech = ReducedEchelon::new(ar);
    for row in sorted_vectors(&rows) {
        let v: Vec<_> = row
            .iter()
            .map(|(i, q)| (*i, ech.ar.lift(q)))
            .filter(|(_, e)| !ech.ar.is_zero(e))
            .collect();
        ech.insert(v);
    }
    let mut pivots: Vec<(usize, usize)> = ech.pivot_of.iter().map(|(&c, &r)| (c, r)).collect();
    pivots.sort_unstable();
    let mut out = Vec::new();
    for free in (0..m.cols).filter(|c| !ech.is_pivot(*c)) {
        let mut v: Vec<(usize, BigRational)> = vec![(free, BigRational::one())];
        for &(pc, r) in &pivots {
            if let Ok(k) = ech.rows[r].binary_search_by_key(&free, |(i, _)| *i) {
                v.push((pc, -ech.ar.to_big(&ech.rows[r][k].1)));
            }
        }
        v.sort_by_key(|(i, _)| *i);
        out.push(v);
    }
    out
}

/// Basis of the null space `{v : m v = 0}`; entries over `F_p` are returned as
/// their representatives in `0..p`.
pub fn kernel_basis(m: &SparseMatrix, field: Field) -> Vec<SparseVec<BigRational>> {
    match field {
        Field::Rational => kernel_with(QArith, m),
        Field::Prime(p) => kernel_with(PArith(p), m),
    }
}

/// Checks `d_out * d_in = 0` over `field`.
pub fn check_composition(d_in: &SparseMatrix, d_out: &SparseMatrix, field: Field) -> Result<()> {
    let comp = d_out.mul(d_in)?;
    let bad = comp.nonzero_over(field);
    if bad > 0 {
        return Err(Error::CompositionNotZero { degree: None, entries: bad });
    }
    Ok(())
}

/// `dim ker(d_out) - rank(d_in)` for `C_{n+1} --d_in--> C_n --d_out--> C_{n-1}`.
pub fn homology_dim(d_in: &SparseMatrix, d_out: &SparseMatrix, field: Field) -> Result<usize> {
    if d_in.rows != d_out.cols {
        return Err(Error::Shape(format!(
            "d_in has {} rows but d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    check_composition(d_in, d_out, field)?;
    let kernel = d_out.cols - rank(d_out, field);
    Ok(kernel - rank(d_in, field))
}

fn independent_with<A: Arith>(
    ar: A,
    base: &SparseMatrix,
    candidates: &[SparseVec<BigRational>],
) -> Vec<usize> {
    let mut ech = Echelon::new(ar);
    for col in sorted_vectors(base) {
        let v: Vec<_> = col
            .iter()
            .map(|(i, q)| (*i, ech.ar.lift(q)))
            .filter(|(_, e)| !ech.ar.is_zero(e))
            .collect();
        ech.insert(v);
    }
    let mut chosen = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        let v: Vec<_> = c
            .iter()
            .map(|(i, q)| (*i, ech.ar.lift_big(q)))
            .filter(|(_, e)| !ech.ar.is_zero(e))
            .collect();
        if ech.insert(v) {
            chosen.push(k);
        }
    }
    chosen
}

/// Indices of the candidates that extend the column span of `base`, chosen
/// greedily in order.
pub fn independent_modulo(
    base: &SparseMatrix,
    candidates: &[SparseVec<BigRational>],
    field: Field,
) -> Vec<usize> {
    match field {
        Field::Rational => independent_with(QArith, base, candidates),
        Field::Prime(p) => independent_with(PArith(p), base, candidates),
    }
}

/// Converts a big rational to a stored coefficient, if it fits.
pub fn to_small(q: &BigRational) -> Result<Rational> {
    let n: i64 = q.numer().try_into().map_err(|_| Error::Coefficient(q.to_string()))?;
    let d: i64 = q.denom().try_into().map_err(|_| Error::Coefficient(q.to_string()))?;
    Ok(Rational::new(n, d))
}

/// Sign `(-1)^k`.
pub fn sign(k: i64) -> Rational {
    if k.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Whether a rational is negative; helper for display code.
pub fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}
