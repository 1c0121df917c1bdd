//! Hochschild complexes.
//!
//! * the classical (reduced) complex `𝔠_k A = A ⊗ (sĀ)^{⊗k}` with `d = d¹ + d²`;
//! * the unreduced complex, the normalization of the simplicial algebra
//!   `A^{⊗(n+1)}`, with its comparison map to the reduced one;
//! * the cyclic simplicial algebra `A^{⊔(n+1)}` of an almost free algebra,
//!   its positive part `A⁺` and the operadic complex `Tot(A⁺)`;
//! * the comparison `Tot(A⁺) -> 𝔠(A)` for commutative algebras.
//!
//! Classical labels are lists `[a0, a1, …, ak]` of basis words; the degree is
//! `|a0| + Σ (|ai| + 1)`. Signs use `ε_i = |a0| + Σ_{j<i} |s a_j|`.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use itertools::Itertools;
use crate::dgmod::{basis_vector, lin_is_zero, lin_scale, normalize_lin, ChainMap, DGModule, GradedModule, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Field, Rational};
use crate::oalg::{AlgebraBounds, Flavor, FreeAlgebra, Word};
use crate::simplicial::{self, materialize, SimplicialDGModule, SimplicialSource};

/// `[a0, a1, …, ak]`.
pub type ChainLabel = Vec<Word>;

/// Truncation of Hochschild complexes: tensor length (or simplicial level),
/// total word length, and optionally a degree window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HochschildBounds {
    pub max_length: usize,
    pub max_weight: usize,
    pub degrees: Option<RangeInclusive<i64>>,
}

impl HochschildBounds {
    pub fn new(max_length: usize, max_weight: usize) -> Self {
        HochschildBounds { max_length, max_weight, degrees: None }
    }

    /// Every bound increased by one, for stability checks.
    pub fn enlarged(&self) -> Self {
        HochschildBounds { max_length: self.max_length + 1, max_weight: self.max_weight + 1, degrees: self.degrees.clone() }
    }
}

fn check_augmented(a: &FreeAlgebra) -> Result<()> {
    if a.is_augmented() {
        Ok(())
    } else {
        Err(Error::Unsupported("the differential must preserve the augmentation ideal".into()))
    }
}

fn ambient_basis(a: &FreeAlgebra, w: usize) -> Vec<Word> {
    a.basis(&AlgebraBounds { max_weight: w, degrees: None }).into_values().flatten().sorted().collect()
}

/// Degree of a classical label.
pub fn classical_degree(a: &FreeAlgebra, x: &[Word]) -> i64 {
    a.degree(&x[0]) + x[1..].iter().map(|w| a.degree(w) + 1).sum::<i64>()
}

fn weight(x: &[Word]) -> usize {
    x.iter().map(Vec::len).sum()
}

/// Which sign of the cyclic term of `d²` to use. `Flipped` exists only to
/// exercise the verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CyclicSign {
    Standard,
    Flipped,
}

/// The classical Hochschild complex within the bounds. The differential is
/// verified to square to zero.
pub fn classical_complex(a: &FreeAlgebra, b: &HochschildBounds) -> Result<DGModule<ChainLabel>> {
    classical_complex_with(a, b, CyclicSign::Standard)
}

pub fn classical_complex_with(a: &FreeAlgebra, b: &HochschildBounds, cyclic: CyclicSign) -> Result<DGModule<ChainLabel>> {
    check_augmented(a)?;
    let words = ambient_basis(a, b.max_weight);
    let reduced: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
    let window = b.degrees.as_ref().map(|r| (*r.start() - 1)..=(*r.end() + 1));
    let mut basis: BTreeMap<i64, Vec<ChainLabel>> = BTreeMap::new();
    if let Some(r) = &window {
        for n in r.clone() {
            basis.insert(n, Vec::new());
        }
    }
    let mut stack: Vec<ChainLabel> = words.iter().map(|w| vec![w.clone()]).collect();
    while let Some(x) = stack.pop() {
        let n = classical_degree(a, &x);
        if window.as_ref().map_or(true, |r| r.contains(&n)) {
            basis.entry(n).or_default().push(x.clone());
        }
        if x.len() <= b.max_length {
            let wt = weight(&x);
            for w in &reduced {
                if wt + w.len() <= b.max_weight {
                    let mut y = x.clone();
                    y.push((*w).clone());
                    stack.push(y);
                }
            }
        }
    }
    for v in basis.values_mut() {
        v.sort();
    }
    let module = GradedModule::from_basis(basis)?;
    let m = DGModule::from_fn(module.clone(), |x| {
        classical_d(a, x, cyclic).into_iter().filter(|(y, _)| weight(y) <= b.max_weight && module.position(y).is_some()).collect()
    })?;
    check_dsquare_labels(a, &m)?;
    Ok(m)
}

fn check_dsquare_labels(a: &FreeAlgebra, m: &DGModule<ChainLabel>) -> Result<()> {
    let Some(r) = m.module().degree_range() else { return Ok(()) };
    if let Some(v) = m.verify_dsquare(*r.start()..=*r.end(), a.field).first() {
        let witness = m
            .basis(v.degree)
            .iter()
            .find(|x| !lin_is_zero(&m.apply_d(&m.apply_d(&basis_vector((*x).clone()))), a.field))
            .map(|x| format_chain(a, x))
            .unwrap_or_default();
        return Err(Error::DSquareNonzero { witness });
    }
    Ok(())
}

/// The classical differential on one label, untruncated.
pub fn classical_d(a: &FreeAlgebra, x: &[Word], cyclic: CyclicSign) -> Lin<ChainLabel> {
    let k = x.len() - 1;
    let deg: Vec<i64> = x.iter().map(|w| a.degree(w)).collect();
    // eps[i] = |a0| + Σ_{0<j<i} |s a_j|
    let mut eps = vec![0i64; k + 1];
    if k >= 1 {
        eps[1] = deg[0];
        for i in 2..=k {
            eps[i] = eps[i - 1] + deg[i - 1] + 1;
        }
    }
    let mut out: Lin<ChainLabel> = Vec::new();
    // d¹
    for (dw, c) in a.d_word(&x[0]) {
        let mut y = x.to_vec();
        y[0] = dw;
        out.push((y, c));
    }
    for i in 1..=k {
        let s = -sign(eps[i]);
        for (dw, c) in a.d_word(&x[i]) {
            if dw.is_empty() {
                continue;
            }
            let mut y = x.to_vec();
            y[i] = dw;
            out.push((y, c * s));
        }
    }
    // d²
    if k >= 1 {
        for (p, c) in a.multiply_words(&x[0], &x[1]) {
            let mut y = vec![p];
            y.extend_from_slice(&x[2..]);
            out.push((y, c * sign(deg[0])));
        }
        for i in 2..=k {
            for (p, c) in a.multiply_words(&x[i - 1], &x[i]) {
                let mut y = x[..i - 1].to_vec();
                y.push(p);
                y.extend_from_slice(&x[i + 1..]);
                out.push((y, c * sign(eps[i])));
            }
        }
        let mut s = -sign((deg[k] + 1) * eps[k]);
        if cyclic == CyclicSign::Flipped {
            s = -s;
        }
        for (p, c) in a.multiply_words(&x[k], &x[0]) {
            let mut y = vec![p];
            y.extend_from_slice(&x[1..k]);
            out.push((y, c * s));
        }
    }
    normalize_lin(out)
}

pub fn format_chain(a: &FreeAlgebra, x: &[Word]) -> String {
    format!("{}[{}]", a.format_word(&x[0]), x[1..].iter().map(|w| a.format_word(w)).join("|"))
}

/// Shuffle product on the classical complex of a commutative algebra:
/// `a0[a1|…|an] · b0[b1|…|bm] = (-1)^t Σ_σ ± a0 b0[σ-shuffle of the letters]`,
/// with `t = |b0| Σ |s a_i|` and Koszul signs computed on suspended degrees.
pub fn classical_shuffle_product(a: &FreeAlgebra, x: &[Word], y: &[Word]) -> Lin<ChainLabel> {
    assert_eq!(a.flavor, Flavor::Commutative, "the shuffle product needs a commutative algebra");
    let sx: Vec<i64> = x[1..].iter().map(|w| a.degree(w) + 1).collect();
    let sy: Vec<i64> = y[1..].iter().map(|w| a.degree(w) + 1).collect();
    let t = a.degree(&y[0]) * sx.iter().sum::<i64>();
    let head = a.multiply_words(&x[0], &y[0]);
    if head.is_empty() {
        return Vec::new();
    }
    let (n, m) = (sx.len(), sy.len());
    let mut out = Vec::new();
    for pos in (0..n + m).combinations(n) {
        // pos: positions of the x letters; count sign of moving y letters left
        let mut koszul = 0i64;
        let mut seq: Vec<Word> = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0, 0);
        for slot in 0..n + m {
            if pos.contains(&slot) {
                seq.push(x[1 + i].clone());
                i += 1;
            } else {
                // y_j jumps over the x letters i..n still to come
                koszul += sy[j] * sx[i..].iter().sum::<i64>();
                seq.push(y[1 + j].clone());
                j += 1;
            }
        }
        for (h, c) in &head {
            let mut label = vec![h.clone()];
            label.extend(seq.iter().cloned());
            out.push((label, *c * sign(t + koszul)));
        }
    }
    normalize_lin(out)
}

/// The simplicial algebra `A^{⊗(n+1)}` with `d_i` multiplying neighbours,
/// `d_n` the cyclic term with sign `(-1)^{|a_n|(|a_0|+…+|a_{n-1}|)}`, and
/// `s_j` inserting a unit after position `j`.
pub struct TensorPowers<'a> {
    pub algebra: &'a FreeAlgebra,
    pub max_weight: usize,
}

impl SimplicialSource for TensorPowers<'_> {
    type Label = ChainLabel;

    fn basis(&self, p: usize) -> Result<Vec<(i64, ChainLabel)>> {
        let words = ambient_basis(self.algebra, self.max_weight);
        let mut out = Vec::new();
        let mut stack: Vec<ChainLabel> = vec![Vec::new()];
        while let Some(x) = stack.pop() {
            if x.len() == p + 1 {
                out.push((x.iter().map(|w| self.algebra.degree(w)).sum(), x));
                continue;
            }
            let wt = weight(&x);
            for w in &words {
                if wt + w.len() <= self.max_weight {
                    let mut y = x.clone();
                    y.push(w.clone());
                    stack.push(y);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn differential(&self, _: usize, x: &ChainLabel) -> Lin<ChainLabel> {
        let mut out = Vec::new();
        let mut before = 0;
        for i in 0..x.len() {
            for (dw, c) in self.algebra.d_word(&x[i]) {
                let mut y = x.clone();
                y[i] = dw;
                if weight(&y) <= self.max_weight {
                    out.push((y, c * sign(before)));
                }
            }
            before += self.algebra.degree(&x[i]);
        }
        normalize_lin(out)
    }

    fn face(&self, p: usize, i: usize, x: &ChainLabel) -> Lin<ChainLabel> {
        let a = self.algebra;
        if i < p {
            a.multiply_words(&x[i], &x[i + 1])
                .into_iter()
                .map(|(w, c)| {
                    let mut y = x[..i].to_vec();
                    y.push(w);
                    y.extend_from_slice(&x[i + 2..]);
                    (y, c)
                })
                .collect()
        } else {
            let before: i64 = x[..p].iter().map(|w| a.degree(w)).sum();
            let s = sign(a.degree(&x[p]) * before);
            a.multiply_words(&x[p], &x[0])
                .into_iter()
                .map(|(w, c)| {
                    let mut y = vec![w];
                    y.extend_from_slice(&x[1..p]);
                    (y, c * s)
                })
                .collect()
        }
    }

    fn degeneracy(&self, _: usize, j: usize, x: &ChainLabel) -> Lin<ChainLabel> {
        let mut y = x.clone();
        y.insert(j + 1, Vec::new());
        basis_vector(y)
    }
}

/// Sign of the comparison `a0 ⊗ a1 ⊗ … ⊗ ap ↦ a0[s a1|…|s ap]` on a level-`p`
/// element placed in the total complex.
pub fn comparison_sign(a: &FreeAlgebra, x: &[Word]) -> Rational {
    let p = x.len() as i64 - 1;
    let mut e = p * a.degree(&x[0]);
    for (i, w) in x.iter().enumerate().skip(1) {
        e += a.degree(w) * (p - i as i64);
    }
    sign(e)
}

/// The unreduced complex (normalization of `A^{⊗(n+1)}` up to level `P`),
/// together with the comparison chain map to the reduced complex of length
/// `P`.
pub struct UnreducedComparison {
    pub simplicial: SimplicialDGModule<ChainLabel>,
    pub normalization: simplicial::Normalization<ChainLabel>,
    pub classical: DGModule<ChainLabel>,
    /// `N -> 𝔠`.
    pub map: ChainMap,
    /// `Tot -> 𝔠`.
    pub tot_map: ChainMap,
}

pub fn unreduced_complex(a: &FreeAlgebra, b: &HochschildBounds) -> Result<UnreducedComparison> {
    check_augmented(a)?;
    let src = TensorPowers { algebra: a, max_weight: b.max_weight };
    let s = materialize(&src, b.max_length)?;
    let normalization = simplicial::normalize(&s)?;
    let classical = classical_complex(a, &HochschildBounds { degrees: None, ..b.clone() })?;
    let f = |(_, x): &(usize, ChainLabel)| -> Lin<ChainLabel> {
        if x[1..].iter().any(Vec::is_empty) {
            return Vec::new();
        }
        vec![(x.clone(), comparison_sign(a, x))]
    };
    let map = ChainMap::from_fn(&normalization.normalized, &classical, 0, f)?;
    let tot_map = ChainMap::from_fn(&normalization.tot, &classical, 0, f)?;
    Ok(UnreducedComparison { simplicial: s, normalization, classical, map, tot_map })
}

/// The cyclic simplicial algebra `n ↦ A^{⊔(n+1)}` of an almost free algebra.
/// Letters of level `n` are `copy * G + g`. Faces and degeneracies are the
/// algebra maps relabeling copies like the simplicial circle: `d_i` sends copy
/// `c > i` to `c - 1` (`i < n`), `d_n` sends copy `n` to `0`, `s_j` sends copy
/// `c > j` to `c + 1`.
pub struct CyclicSimplicial {
    pub base: FreeAlgebra,
    pub max_weight: usize,
    levels: Vec<FreeAlgebra>,
}

impl CyclicSimplicial {
    pub fn new(base: &FreeAlgebra, max_level: usize, max_weight: usize) -> Result<Self> {
        if !base.is_almost_free() {
            return Err(Error::Unsupported("the cyclic simplicial algebra needs an almost free algebra".into()));
        }
        let levels = (0..=max_level + 1).map(|n| base.copies(n + 1)).collect::<Result<Vec<_>>>()?;
        Ok(CyclicSimplicial { base: base.clone(), max_weight, levels })
    }

    pub fn level_algebra(&self, p: usize) -> &FreeAlgebra {
        &self.levels[p]
    }

    fn g(&self) -> u16 {
        self.base.gens.len() as u16
    }

    fn relabel(&self, target_level: usize, w: &[u16], copy: impl Fn(u16) -> u16) -> Lin<Word> {
        let g = self.g();
        let t: Word = w.iter().map(|&l| copy(l / g) * g + l % g).collect();
        match self.levels[target_level].canonical(&t) {
            Some((s, t)) => vec![(t, s)],
            None => Vec::new(),
        }
    }

    /// Copies present in a word.
    pub fn copies_of(&self, w: &[u16]) -> BTreeSet<u16> {
        let g = self.g();
        w.iter().map(|l| l / g).collect()
    }

    /// The blocks `(m_0, …, m_p)` of a level-`p` word, as words in the base
    /// generators.
    pub fn blocks(&self, p: usize, w: &[u16]) -> Vec<Word> {
        let g = self.g();
        let mut out = vec![Vec::new(); p + 1];
        for &l in w {
            out[(l / g) as usize].push(l % g);
        }
        out
    }
}

impl SimplicialSource for CyclicSimplicial {
    type Label = Word;

    fn basis(&self, p: usize) -> Result<Vec<(i64, Word)>> {
        let a = &self.levels[p];
        Ok(a
            .basis(&AlgebraBounds { max_weight: self.max_weight, degrees: None })
            .into_iter()
            .flat_map(|(d, ws)| ws.into_iter().map(move |w| (d, w)))
            .collect())
    }

    fn differential(&self, p: usize, w: &Word) -> Lin<Word> {
        self.levels[p].d_word(w).into_iter().filter(|(t, _)| t.len() <= self.max_weight).collect()
    }

    fn face(&self, p: usize, i: usize, w: &Word) -> Lin<Word> {
        let pp = p as u16;
        let ii = i as u16;
        if i < p {
            self.relabel(p - 1, w, |c| if c <= ii { c } else { c - 1 })
        } else {
            self.relabel(p - 1, w, |c| if c == pp { 0 } else { c })
        }
    }

    fn degeneracy(&self, p: usize, j: usize, w: &Word) -> Lin<Word> {
        let jj = j as u16;
        self.relabel(p + 1, w, |c| if c <= jj { c } else { c + 1 })
    }
}

pub fn cyclic_simplicial(a: &FreeAlgebra, b: &HochschildBounds) -> Result<CyclicSimplicial> {
    CyclicSimplicial::new(a, b.max_length, b.max_weight)
}

/// Which words count as positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PositiveVariant {
    /// Every copy `1..=p` occurs; copy 0 is arbitrary.
    CopiesOneToP,
    /// Every copy `0..=p` occurs.
    AllCopies,
}

fn is_positive(c: &CyclicSimplicial, p: usize, w: &[u16], variant: PositiveVariant) -> bool {
    let present = c.copies_of(w);
    let start = match variant {
        PositiveVariant::CopiesOneToP => 1,
        PositiveVariant::AllCopies => 0,
    };
    (start..=p as u16).all(|k| present.contains(&k))
}

/// The total complex of the positive part `A⁺ ⊂ A^{⊔(•+1)}`. Fails with
/// `NotClosed` if the total differential leaves the positive part.
pub fn positive_total(c: &CyclicSimplicial, max_level: usize, variant: PositiveVariant) -> Result<DGModule<(usize, Word)>> {
    let mut basis: BTreeMap<i64, Vec<(usize, Word)>> = BTreeMap::new();
    for p in 0..=max_level {
        for (q, w) in c.basis(p)? {
            if is_positive(c, p, &w, variant) {
                basis.entry(p as i64 + q).or_default().push((p, w));
            }
        }
    }
    if let Some((&lo, _)) = basis.iter().next() {
        let hi = *basis.keys().next_back().expect("nonempty");
        for n in lo..=hi {
            basis.entry(n).or_default();
        }
    }
    for v in basis.values_mut() {
        v.sort();
    }
    let module = GradedModule::from_basis(basis)?;
    DGModule::try_from_fn(module.clone(), |(p, w)| {
        let p = *p;
        let mut out = Vec::new();
        if p > 0 {
            for i in 0..=p {
                out.extend(c.face(p, i, w).into_iter().map(|(t, k)| ((p - 1, t), k * sign(i as i64))));
            }
        }
        out.extend(c.differential(p, w).into_iter().map(|(t, k)| ((p, t), k * sign(p as i64))));
        let out = normalize_lin(out);
        for ((lp, t), _) in &out {
            if !is_positive(c, *lp, t, variant) {
                let n = module.position(&(p, w.clone())).map_or(0, |x| x.0);
                return Err(Error::NotClosed { degree: n });
            }
        }
        Ok(out)
    })
}

/// Outcome of comparing Tot(A+) with the normalization N(A).
#[derive(Clone, Debug)]
pub struct TheoremBReport {
    /// `(degree, dim Tot(A⁺), dim N)`.
    pub dims: Vec<(i64, usize, usize)>,
    pub bijection: bool,
    /// Number of labels whose differentials differ.
    pub differential_mismatches: usize,
    /// Pairs of positive elements whose shuffle product left `A⁺`.
    pub product_failures: usize,
    pub products_checked: usize,
}

impl TheoremBReport {
    pub fn passed(&self) -> bool {
        self.bijection && self.differential_mismatches == 0 && self.product_failures == 0
    }
}

/// The operadic Hochschild complex of an almost free algebra: the cyclic
/// simplicial algebra, its normalization and `Tot(A⁺)`.
pub struct OperadicComplex {
    pub cyclic: CyclicSimplicial,
    pub simplicial: SimplicialDGModule<Word>,
    pub normalization: simplicial::Normalization<Word>,
    pub plus: DGModule<(usize, Word)>,
}

pub fn operadic_hc(a: &FreeAlgebra, b: &HochschildBounds) -> Result<OperadicComplex> {
    check_augmented(a)?;
    let cyclic = cyclic_simplicial(a, b)?;
    let simplicial = materialize(&cyclic, b.max_length)?;
    let normalization = simplicial::normalize(&simplicial)?;
    let plus = positive_total(&cyclic, b.max_length, PositiveVariant::CopiesOneToP)?;
    Ok(OperadicComplex { cyclic, simplicial, normalization, plus })
}

impl OperadicComplex {
    /// Compares `Tot(A⁺)` with `N = Tot/D` label by label and entry by entry,
    /// and checks that shuffle products of positive basis elements (followed
    /// by the levelwise product) stay positive.
    pub fn theorem_b(&self, product_samples: usize) -> Result<TheoremBReport> {
        let n = &self.normalization.normalized;
        let degrees: BTreeSet<i64> = n.module().degrees().chain(self.plus.module().degrees()).collect();
        let mut dims = Vec::new();
        let mut bijection = true;
        let mut mismatches = 0;
        for &d in &degrees {
            let a: BTreeSet<_> = self.plus.basis(d).iter().cloned().collect();
            let b: BTreeSet<_> = n.basis(d).iter().cloned().collect();
            dims.push((d, a.len(), b.len()));
            if a != b {
                bijection = false;
                continue;
            }
            for x in &a {
                let v = basis_vector(x.clone());
                if self.plus.apply_d(&v) != n.apply_d(&v) {
                    mismatches += 1;
                }
            }
        }
        let (failures, checked) = self.check_products(product_samples);
        Ok(TheoremBReport { dims, bijection, differential_mismatches: mismatches, product_failures: failures, products_checked: checked })
    }

    fn check_products(&self, samples: usize) -> (usize, usize) {
        let bound = self.simplicial.bound();
        let all: Vec<(usize, Word)> = self.plus.module().degrees().flat_map(|d| self.plus.basis(d).to_vec()).collect();
        let mut failures = 0;
        let mut checked = 0;
        'outer: for x in &all {
            for y in &all {
                if checked >= samples {
                    break 'outer;
                }
                if x.0 + y.0 > bound {
                    continue;
                }
                checked += 1;
                let sh = simplicial::shuffle_element(&self.simplicial, &self.simplicial, x, y);
                let alg = self.cyclic.level_algebra(x.0 + y.0);
                let mut prod = Vec::new();
                for ((p, (u, v)), c) in sh {
                    for (w, k) in alg.multiply_words(&u, &v) {
                        prod.push(((p, w), k * c));
                    }
                }
                let prod = normalize_lin(prod);
                if prod.iter().any(|((p, w), _)| !is_positive(&self.cyclic, *p, w, PositiveVariant::CopiesOneToP)) {
                    failures += 1;
                }
            }
        }
        (failures, checked)
    }

    /// The splitting `Tot(A⁺) = (A, 0) ⊕ positive levels`. Fails with
    /// `MixingDetected` if the differential connects the summands.
    pub fn splitting(&self) -> Result<(DGModule<(usize, Word)>, DGModule<(usize, Word)>)> {
        split_levels(&self.plus, |w| self.cyclic.base.format_word(w))
    }
}

/// Splits a total complex into its level-0 part and its positive levels.
pub fn split_levels(
    plus: &DGModule<(usize, Word)>,
    fmt: impl Fn(&Word) -> String,
) -> Result<(DGModule<(usize, Word)>, DGModule<(usize, Word)>)> {
    for d in plus.module().degrees() {
        for x in plus.basis(d) {
            for (y, _) in plus.apply_d(&basis_vector(x.clone())) {
                if (x.0 == 0) != (y.0 == 0) {
                    return Err(Error::MixingDetected { witness: format!("level {} {} -> level {} {}", x.0, fmt(&x.1), y.0, fmt(&y.1)) });
                }
            }
        }
    }
    let part = |keep: &dyn Fn(usize) -> bool| -> Result<DGModule<(usize, Word)>> {
        let basis = plus
            .module()
            .degrees()
            .map(|d| (d, plus.basis(d).iter().filter(|x| keep(x.0)).cloned().collect()))
            .collect();
        let module = GradedModule::from_basis(basis)?;
        DGModule::from_fn(module, |x| plus.apply_d(&basis_vector(x.clone())))
    };
    Ok((part(&|p| p == 0)?, part(&|p| p > 0)?))
}

/// The comparison `Tot(A⁺) -> 𝔠(A)` for a commutative almost free algebra:
/// a level-`p` monomial with copy blocks `(m_0, …, m_p)` goes to
/// `± m_0[m_1|…|m_p]`.
pub struct TheoremAComparison {
    pub operadic: OperadicComplex,
    pub classical: DGModule<ChainLabel>,
    pub map: ChainMap,
}

pub fn theorem_a_compare(a: &FreeAlgebra, b: &HochschildBounds) -> Result<TheoremAComparison> {
    if a.flavor != Flavor::Commutative {
        return Err(Error::Unsupported("the comparison with the classical complex needs a commutative algebra".into()));
    }
    let operadic = operadic_hc(a, b)?;
    let classical = classical_complex(a, &HochschildBounds { degrees: None, ..b.clone() })?;
    let map = ChainMap::from_fn(&operadic.plus, &classical, 0, |(p, w)| {
        let blocks = operadic.cyclic.blocks(*p, w);
        if blocks[1..].iter().any(Vec::is_empty) {
            return Vec::new();
        }
        vec![(blocks.clone(), comparison_sign(a, &blocks))]
    })?;
    Ok(TheoremAComparison { operadic, classical, map })
}

/// Per-degree homology comparison of a chain map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub degree: i64,
    pub source: usize,
    pub target: usize,
    /// Rank of the induced map on homology.
    pub induced_rank: usize,
}

impl ComparisonRow {
    pub fn is_iso(&self) -> bool {
        self.source == self.target && self.induced_rank == self.source
    }
}

pub fn compare_homology<S: crate::dgmod::Label, T: crate::dgmod::Label>(
    f: &ChainMap,
    source: &DGModule<S>,
    target: &DGModule<T>,
    degrees: impl IntoIterator<Item = i64>,
    field: Field,
) -> Result<Vec<ComparisonRow>> {
    degrees
        .into_iter()
        .map(|n| {
            Ok(ComparisonRow {
                degree: n,
                source: source.homology_dim(n, field)?,
                target: target.homology_dim(n, field)?,
                induced_rank: crate::dgmod::induced_rank(f, source, target, n, field)?,
            })
        })
        .collect()
}

/// Hochschild homology dimension with a stability flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableDim {
    pub dim: usize,
    pub stable: bool,
}

/// Degrees where some basis element exists in either complex.
fn degree_span<L: crate::dgmod::Label>(m: &DGModule<L>) -> Vec<i64> {
    m.module().degrees().filter(|&n| m.dim(n) > 0).collect()
}

/// `HH_*(A)` from the classical complex, with stability decided by
/// recomputing with every bound increased by one.
pub fn hh(a: &FreeAlgebra, b: &HochschildBounds) -> Result<BTreeMap<i64, StableDim>> {
    let c = classical_complex(a, b)?;
    let bigger = classical_complex(a, &b.enlarged())?;
    let degrees: Vec<i64> = match &b.degrees {
        Some(r) => r.clone().collect(),
        None => degree_span(&c),
    };
    let mut out = BTreeMap::new();
    for n in degrees {
        let dim = c.homology_dim(n, a.field)?;
        let again = bigger.homology_dim(n, a.field)?;
        out.insert(n, StableDim { dim, stable: dim == again });
    }
    Ok(out)
}

/// Operadic Hochschild homology from `Tot(A⁺)`, with the same stability rule.
pub fn ohh(a: &FreeAlgebra, b: &HochschildBounds) -> Result<BTreeMap<i64, StableDim>> {
    let c = operadic_hc(a, b)?;
    let bigger = operadic_hc(a, &b.enlarged())?;
    let degrees: Vec<i64> = match &b.degrees {
        Some(r) => r.clone().collect(),
        None => degree_span(&c.plus),
    };
    let mut out = BTreeMap::new();
    for n in degrees {
        let dim = c.plus.homology_dim(n, a.field)?;
        let again = bigger.plus.homology_dim(n, a.field)?;
        out.insert(n, StableDim { dim, stable: dim == again });
    }
    Ok(out)
}

/// Checks that `Φ_n : A^{⊔(n+1)} -> A^{⊗(n+1)}` (copy blocks to tensor
/// factors) commutes with faces, degeneracies and internal differentials up
/// to level `max_level`. Returns the failures.
pub fn check_phi(a: &FreeAlgebra, max_level: usize, max_weight: usize) -> Result<Vec<String>> {
    let cyc = CyclicSimplicial::new(a, max_level, max_weight)?;
    let ten = TensorPowers { algebra: a, max_weight };
    let phi = |p: usize, v: &Lin<Word>| -> Lin<ChainLabel> {
        normalize_lin(v.iter().map(|(w, c)| (cyc.blocks(p, w), *c)).collect())
    };
    let phi_t = |v: &Lin<ChainLabel>| -> Lin<ChainLabel> { normalize_lin(v.clone()) };
    let mut out = Vec::new();
    for p in 0..=max_level {
        for (_, w) in cyc.basis(p)? {
            let x = basis_vector(w.clone());
            let px = phi(p, &x);
            let lift = |f: &dyn Fn(&ChainLabel) -> Lin<ChainLabel>| -> Lin<ChainLabel> {
                let mut acc = Vec::new();
                for (y, c) in &px {
                    acc.extend(lin_scale(&f(y), *c));
                }
                normalize_lin(acc)
            };
            if p > 0 {
                for i in 0..=p {
                    if phi(p - 1, &cyc.face(p, i, &w)) != phi_t(&lift(&|y| ten.face(p, i, y))) {
                        out.push(format!("face d_{i} at level {p} on {}", a.format_word(&w)));
                    }
                }
            }
            if p < max_level {
                for j in 0..=p {
                    if phi(p + 1, &cyc.degeneracy(p, j, &w)) != phi_t(&lift(&|y| ten.degeneracy(p, j, y))) {
                        out.push(format!("degeneracy s_{j} at level {p}"));
                    }
                }
            }
            if phi(p, &cyc.differential(p, &w)) != phi_t(&lift(&|y| ten.differential(p, y))) {
                out.push(format!("differential at level {p} on {}", a.format_word(&w)));
            }
        }
    }
    Ok(out)
}
