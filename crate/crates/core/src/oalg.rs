//! Free and almost free algebras over the associative and commutative
//! operads.
//!
//! Basis elements are words in generator indices. In the commutative flavor a
//! word is a sorted monomial; reordering letters costs the Koszul sign, and
//! odd generators square to zero away from characteristic 2. Generators may
//! carry a nilpotency bound (`x^h = 0`), which turns the algebra into a
//! monomial quotient; such algebras are accepted by the classical Hochschild
//! complex but are not almost free.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use num_traits::One;

use crate::dgmod::{basis_vector, lin_scale, normalize_lin, DGModule, GradedModule, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Field, Rational};

/// A word in generator (or letter) indices.
pub type Word = Vec<u16>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Commutative,
    Associative,
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::Commutative => "commutative",
            Flavor::Associative => "associative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    /// Homological degree.
    pub degree: i64,
    /// `Some(h)` imposes `x^h = 0`.
    pub nilpotency: Option<u32>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator { name: name.into(), degree, nilpotency: None }
    }
}

/// Truncation of a free algebra: by word length and optionally by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraBounds {
    pub max_weight: usize,
    pub degrees: Option<RangeInclusive<i64>>,
}

/// A free commutative or associative algebra on graded generators with a
/// differential given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeAlgebra {
    pub flavor: Flavor,
    pub field: Field,
    pub gens: Vec<Generator>,
    /// `diff[g]` is `d` of generator `g`.
    pub diff: Vec<Lin<Word>>,
}

impl FreeAlgebra {
    pub fn new(flavor: Flavor, field: Field, gens: Vec<Generator>) -> Self {
        let n = gens.len();
        FreeAlgebra { flavor, field, gens, diff: vec![Vec::new(); n] }
    }

    /// The algebra with no generators: the ground field.
    pub fn trivial(flavor: Flavor, field: Field) -> Self {
        Self::new(flavor, field, Vec::new())
    }

    /// Sets `d(g)`. The value must have degree `|g| - 1`.
    pub fn set_differential(&mut self, g: usize, value: Lin<Word>) -> Result<()> {
        let mut canon = Vec::new();
        for (w, c) in value {
            if self.degree(&w) != self.gens[g].degree - 1 {
                return Err(Error::Unsupported(format!(
                    "d({}) has a term of degree {}, expected {}",
                    self.gens[g].name,
                    self.degree(&w),
                    self.gens[g].degree - 1
                )));
            }
            if let Some((s, w)) = self.canonical(&w) {
                canon.push((w, c * s));
            }
        }
        self.diff[g] = normalize_lin(canon);
        Ok(())
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// No nilpotency relations: the underlying graded algebra is free.
    pub fn is_almost_free(&self) -> bool {
        self.gens.iter().all(|g| g.nilpotency.is_none())
    }

    fn odd_squares_vanish(&self) -> bool {
        self.field.characteristic() != 2
    }

    pub fn degree(&self, w: &[u16]) -> i64 {
        w.iter().map(|&g| self.gens[g as usize].degree).sum()
    }

    /// Canonical form of a word: `None` if it vanishes, otherwise the sign and
    /// the canonical word.
    pub fn canonical(&self, w: &[u16]) -> Option<(Rational, Word)> {
        canonical_word(self.flavor, w, &|g| self.gens[g as usize].degree, self.odd_squares_vanish(), &|g| {
            self.gens[g as usize].nilpotency
        })
    }

    /// Product of two basis words.
    pub fn multiply_words(&self, a: &[u16], b: &[u16]) -> Lin<Word> {
        let mut w = a.to_vec();
        w.extend_from_slice(b);
        match self.canonical(&w) {
            Some((s, w)) => vec![(w, s)],
            None => Vec::new(),
        }
    }

    pub fn multiply(&self, a: &Lin<Word>, b: &Lin<Word>) -> Lin<Word> {
        let mut out = Vec::new();
        for (x, cx) in a {
            for (y, cy) in b {
                for (z, cz) in self.multiply_words(x, y) {
                    out.push((z, *cx * *cy * cz));
                }
            }
        }
        normalize_lin(out)
    }

    /// The derivation extending `diff` to a basis word.
    pub fn d_word(&self, w: &[u16]) -> Lin<Word> {
        let mut out = Vec::new();
        let mut deg_before = 0;
        for i in 0..w.len() {
            let g = w[i] as usize;
            let s = sign(deg_before);
            for (dv, c) in &self.diff[g] {
                let mut t = w[..i].to_vec();
                t.extend_from_slice(dv);
                t.extend_from_slice(&w[i + 1..]);
                if let Some((sg, t)) = self.canonical(&t) {
                    out.push((t, *c * s * sg));
                }
            }
            deg_before += self.gens[g].degree;
        }
        normalize_lin(out)
    }

    pub fn d(&self, v: &Lin<Word>) -> Lin<Word> {
        let mut out = Vec::new();
        for (w, c) in v {
            out.extend(lin_scale(&self.d_word(w), *c));
        }
        normalize_lin(out)
    }

    /// Whether `d` can lower word length (a constant term in some `d(g)`).
    pub fn lowers_weight(&self) -> bool {
        self.diff.iter().any(|v| v.iter().any(|(w, _)| w.is_empty()))
    }

    /// Whether `d` maps words of length ≥ 1 to words of length ≥ 1, i.e. the
    /// augmentation is compatible with `d`.
    pub fn is_augmented(&self) -> bool {
        !self.lowers_weight()
    }

    /// Basis words of length at most `max_weight`, grouped by degree.
    pub fn basis(&self, bounds: &AlgebraBounds) -> BTreeMap<i64, Vec<Word>> {
        let mut out: BTreeMap<i64, Vec<Word>> = BTreeMap::new();
        let mut frontier: Vec<Word> = vec![Vec::new()];
        let keep = |d: i64| bounds.degrees.as_ref().map_or(true, |r| r.contains(&d));
        if keep(0) {
            out.entry(0).or_default().push(Vec::new());
        }
        for _ in 0..bounds.max_weight {
            let mut next = Vec::new();
            for w in &frontier {
                let start = match self.flavor {
                    Flavor::Commutative => w.last().copied().unwrap_or(0),
                    Flavor::Associative => 0,
                };
                for g in start..self.gens.len() as u16 {
                    let mut t = w.clone();
                    t.push(g);
                    if let Some((_, c)) = self.canonical(&t) {
                        if c == t {
                            next.push(t);
                        }
                    }
                }
            }
            for w in &next {
                let d = self.degree(w);
                if keep(d) {
                    out.entry(d).or_default().push(w.clone());
                }
            }
            frontier = next;
        }
        for v in out.values_mut() {
            v.sort();
        }
        out
    }

    /// The truncated algebra as a DG module. Terms of `d` leaving the bounds
    /// are dropped, which yields the quotient by longer words when `d` does
    /// not lower length. The differential is verified to square to zero.
    pub fn dg_module(&self, bounds: &AlgebraBounds) -> Result<DGModule<Word>> {
        if self.lowers_weight() {
            return Err(Error::InvalidBounds("a differential with constant terms is incompatible with length truncation".into()));
        }
        let basis = self.basis(bounds);
        let module = GradedModule::from_basis(basis)?;
        let m = DGModule::from_fn(module.clone(), |w| {
            self.d_word(w).into_iter().filter(|(t, _)| t.len() <= bounds.max_weight && module.position(t).is_some()).collect()
        })?;
        self.check_dsquare(&m)?;
        Ok(m)
    }

    fn check_dsquare(&self, m: &DGModule<Word>) -> Result<()> {
        for n in m.module().degrees().collect::<Vec<_>>() {
            for w in m.basis(n) {
                let dd = m.apply_d(&m.apply_d(&basis_vector(w.clone())));
                if !crate::dgmod::lin_is_zero(&dd, self.field) {
                    return Err(Error::DSquareNonzero { witness: self.format_word(w) });
                }
            }
        }
        Ok(())
    }

    /// Checks `d∘d = 0` on all words up to length `max_weight`, without
    /// truncating images.
    pub fn verify_dsquare(&self, max_weight: usize) -> Result<()> {
        let bounds = AlgebraBounds { max_weight, degrees: None };
        for words in self.basis(&bounds).values() {
            for w in words {
                let dd = self.d(&self.d_word(w));
                if !crate::dgmod::lin_is_zero(&dd, self.field) {
                    return Err(Error::DSquareNonzero { witness: self.format_word(w) });
                }
            }
        }
        Ok(())
    }

    /// Checks `d(ab) = (da)b + (-1)^{|a|} a(db)` for all pairs of basis words
    /// of length at most `max_weight`; returns the first failing pair.
    pub fn check_leibniz(&self, max_weight: usize) -> Option<(Word, Word)> {
        let bounds = AlgebraBounds { max_weight, degrees: None };
        let words: Vec<Word> = self.basis(&bounds).into_values().flatten().collect();
        for a in &words {
            for b in &words {
                let ab = self.multiply_words(a, b);
                let lhs = self.d(&ab);
                let mut rhs = self.multiply(&self.d_word(a), &basis_vector(b.clone()));
                let s = sign(self.degree(a));
                rhs.extend(lin_scale(&self.multiply(&basis_vector(a.clone()), &self.d_word(b)), s));
                let mut diff = lhs;
                diff.extend(rhs.into_iter().map(|(w, c)| (w, -c)));
                if !crate::dgmod::lin_is_zero(&normalize_lin(diff), self.field) {
                    return Some((a.clone(), b.clone()));
                }
            }
        }
        None
    }

    pub fn format_word(&self, w: &[u16]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.gens[w[i] as usize].name;
            parts.push(if j - i > 1 { format!("{name}^{}", j - i) } else { name.clone() });
            i = j;
        }
        parts.join("*")
    }

    pub fn format_lin(&self, v: &Lin<Word>) -> String {
        if v.is_empty() {
            return "0".into();
        }
        v.iter().map(|(w, c)| format!("{c}*{}", self.format_word(w))).collect::<Vec<_>>().join(" + ")
    }

    /// `A ⊔ B`, free on the union of the generators (those of `other` get a
    /// trailing `'`), with the induced differential.
    pub fn coproduct(&self, other: &FreeAlgebra) -> Result<FreeAlgebra> {
        if self.flavor != other.flavor || self.field != other.field {
            return Err(Error::Unsupported("coproduct of algebras of different flavors or fields".into()));
        }
        if !self.is_almost_free() || !other.is_almost_free() {
            return Err(Error::Unsupported("coproducts are implemented for almost free algebras only".into()));
        }
        let shift = self.gens.len() as u16;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().map(|g| Generator { name: format!("{}'", g.name), ..g.clone() }));
        let mut c = FreeAlgebra::new(self.flavor, self.field, gens);
        for g in 0..self.gens.len() {
            c.diff[g] = self.diff[g].clone();
        }
        for g in 0..other.gens.len() {
            let v = other.diff[g].iter().map(|(w, k)| (w.iter().map(|l| l + shift).collect(), *k)).collect();
            c.set_differential(g + shift as usize, v)?;
        }
        Ok(c)
    }

    /// Applies the algebra homomorphism determined by a letter map.
    pub fn apply_homomorphism(&self, target: &FreeAlgebra, w: &[u16], f: &dyn Fn(u16) -> Lin<Word>) -> Lin<Word> {
        let mut acc: Lin<Word> = vec![(Vec::new(), Rational::one())];
        for &l in w {
            acc = target.multiply(&acc, &f(l));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    /// The `n`-fold coproduct `A^{⊔n}` with letters `copy * G + g`.
    pub fn copies(&self, n: usize) -> Result<FreeAlgebra> {
        let mut acc = FreeAlgebra::trivial(self.flavor, self.field);
        for _ in 0..n {
            acc = acc.coproduct(self)?;
        }
        for (c, chunk) in acc.gens.chunks_mut(self.gens.len().max(1)).enumerate() {
            for (g, gen) in chunk.iter_mut().enumerate() {
                gen.name = format!("{}_{c}", self.gens[g].name);
            }
        }
        Ok(acc)
    }

    /// The folding map `A ⊔ A -> A` on a word of `self.copies(2)`.
    pub fn fold(&self, w: &[u16]) -> Lin<Word> {
        let g = self.gens.len() as u16;
        let doubled = FreeAlgebra { gens: [self.gens.clone(), self.gens.clone()].concat(), diff: vec![], ..self.clone() };
        doubled.apply_homomorphism(self, w, &|l| basis_vector(vec![l % g]))
    }

    /// `τ_n` on a word of `self.copies(n)`: copy `c` goes to copy `c + 1 mod n`.
    pub fn cyclic(&self, n: usize, w: &[u16]) -> Lin<Word> {
        let g = self.gens.len() as u16;
        let letters = |l: u16| {
            let (c, x) = (l / g, l % g);
            basis_vector(vec![((c + 1) % n as u16) * g + x])
        };
        let big = self.copies(n).expect("almost free");
        big.apply_homomorphism(&big, w, &letters)
    }
}

/// Canonical form of a word under the flavor's relations.
pub fn canonical_word(
    flavor: Flavor,
    w: &[u16],
    degree: &dyn Fn(u16) -> i64,
    odd_squares_vanish: bool,
    nilpotency: &dyn Fn(u16) -> Option<u32>,
) -> Option<(Rational, Word)> {
    match flavor {
        Flavor::Associative => {
            let mut run = 1u32;
            for i in 0..w.len() {
                if i > 0 && w[i] == w[i - 1] {
                    run += 1;
                } else {
                    run = 1;
                }
                if nilpotency(w[i]).is_some_and(|h| run >= h) {
                    return None;
                }
            }
            Some((Rational::one(), w.to_vec()))
        }
        Flavor::Commutative => {
            // insertion sort, counting transpositions of odd letters
            let mut v = w.to_vec();
            let mut odd_swaps = 0i64;
            for i in 1..v.len() {
                let mut j = i;
                while j > 0 && v[j - 1] > v[j] {
                    if degree(v[j - 1]).rem_euclid(2) == 1 && degree(v[j]).rem_euclid(2) == 1 {
                        odd_swaps += 1;
                    }
                    v.swap(j - 1, j);
                    j -= 1;
                }
            }
            let mut run = 1u32;
            for i in 0..v.len() {
                if i > 0 && v[i] == v[i - 1] {
                    run += 1;
                    if odd_squares_vanish && degree(v[i]).rem_euclid(2) == 1 {
                        return None;
                    }
                } else {
                    run = 1;
                }
                if nilpotency(v[i]).is_some_and(|h| run >= h) {
                    return None;
                }
            }
            Some((sign(odd_swaps), v))
        }
    }
}

/// Number of monomials of degree `n` in the free graded commutative algebra
/// on generators of the given degrees, from the product of the factors
/// `1/(1-t^d)` (even) and `1+t^d` (odd). Degrees must be positive.
pub fn hilbert_series_coefficient(degrees: &[i64], n: i64) -> u64 {
    let n = n as usize;
    let mut coeffs = vec![0u64; n + 1];
    coeffs[0] = 1;
    for &d in degrees {
        let d = d as usize;
        if d == 0 || d > n {
            continue;
        }
        if d % 2 == 0 {
            for k in d..=n {
                coeffs[k] += coeffs[k - d];
            }
        } else {
            for k in (d..=n).rev() {
                coeffs[k] += coeffs[k - d];
            }
        }
    }
    coeffs[n]
}

/// Lookup from generator names to indices.
pub fn name_index(a: &FreeAlgebra) -> HashMap<String, usize> {
    a.gens.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect()
}

/// Helper for tests and examples: the sphere model `Λ(x, y)` with
/// `|x| = -2`, `|y| = -3`, `dy = x^2` (cohomological degrees 2 and 3).
pub fn sphere_model(field: Field) -> FreeAlgebra {
    let mut a = FreeAlgebra::new(Flavor::Commutative, field, vec![Generator::new("x", -2), Generator::new("y", -3)]);
    a.set_differential(1, vec![(vec![0, 0], Rational::one())]).expect("degrees match");
    a
}

/// The polynomial algebra on one generator of degree `deg`.
pub fn polynomial(field: Field, deg: i64) -> FreeAlgebra {
    FreeAlgebra::new(Flavor::Commutative, field, vec![Generator::new("x", deg)])
}

/// `Q[e]/e^2` with `|e| = 0`.
pub fn dual_numbers(field: Field) -> FreeAlgebra {
    FreeAlgebra::new(Flavor::Commutative, field, vec![Generator { name: "e".into(), degree: 0, nilpotency: Some(2) }])
}

/// The exterior algebra on one generator of degree 1.
pub fn exterior(field: Field) -> FreeAlgebra {
    FreeAlgebra::new(Flavor::Commutative, field, vec![Generator::new("x", 1)])
}

#[cfg(test)]
mod tests {
    fn minus_one() -> Rational {
        -Rational::one()
    }

    use super::*;

    const Q: Field = Field::Rational;

    fn words(a: &FreeAlgebra, w: usize) -> Vec<(i64, Vec<String>)> {
        a.basis(&AlgebraBounds { max_weight: w, degrees: None })
            .into_iter()
            .map(|(d, ws)| (d, ws.iter().map(|x| a.format_word(x)).collect()))
            .collect()
    }

    #[test]
    fn free_basis_examples() {
        let a = polynomial(Q, 2);
        assert_eq!(
            words(&a, 3),
            vec![(0, vec!["1".into()]), (2, vec!["x".into()]), (4, vec!["x^2".into()]), (6, vec!["x^3".into()])]
        );
        let odd = polynomial(Q, 3);
        assert_eq!(words(&odd, 5), vec![(0, vec!["1".into()]), (3, vec!["x".into()])]);
        let t = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1), Generator::new("y", 1)]);
        let b = words(&t, 2);
        assert_eq!(b[2].1, vec!["x^2", "x*y", "y*x", "y^2"]);
        assert_eq!(b.iter().map(|(_, v)| v.len()).sum::<usize>(), 7);
    }

    #[test]
    fn characteristic_two_keeps_odd_squares() {
        let odd = polynomial(Field::Prime(2), 3);
        assert_eq!(words(&odd, 3).len(), 4);
    }

    #[test]
    fn multiplication_signs() {
        let a = FreeAlgebra::new(Flavor::Commutative, Q, vec![Generator::new("x", 1), Generator::new("y", 1), Generator::new("z", 3)]);
        assert_eq!(a.multiply_words(&[2], &[2]), vec![]);
        assert_eq!(a.multiply_words(&[1], &[0]), vec![(vec![0, 1], minus_one())]);
        let t = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1), Generator::new("y", 1), Generator::new("z", 1)]);
        assert_eq!(t.multiply_words(&[0, 1], &[2]), vec![(vec![0, 1, 2], Rational::one())]);
    }

    #[test]
    fn sphere_model_differential() {
        let a = sphere_model(Q);
        // d(xy) = x^3 up to the sign (-1)^{|x|} = +1
        assert_eq!(a.d_word(&[0, 1]), vec![(vec![0, 0, 0], Rational::one())]);
        assert!(a.verify_dsquare(5).is_ok());
        assert!(a.check_leibniz(3).is_none());
        let m = a.dg_module(&AlgebraBounds { max_weight: 4, degrees: None }).unwrap();
        let h = m.homology_dims(-8..=0, Q).unwrap();
        // cohomology of S^2 in degrees 0 and 2; the top of the truncation leaks
        assert_eq!(h[&0], 1);
        assert_eq!(h[&-1], 0);
        assert_eq!(h[&-2], 1);
        assert_eq!(h[&-3], 0);
        assert_eq!(h[&-4], 0);
    }

    #[test]
    fn nonzero_dsquare_is_reported() {
        let mut a = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1), Generator::new("y", 2), Generator::new("z", 3)]);
        a.set_differential(2, vec![(vec![1], Rational::one())]).unwrap();
        a.set_differential(1, vec![(vec![0], Rational::one())]).unwrap();
        assert!(matches!(a.verify_dsquare(2), Err(Error::DSquareNonzero { .. })));
    }

    #[test]
    fn coproduct_and_folding() {
        let a = polynomial(Q, 2);
        let aa = a.coproduct(&a).unwrap();
        let b = aa.basis(&AlgebraBounds { max_weight: 2, degrees: Some(4..=4) });
        assert_eq!(b[&4].len(), 3);
        assert_eq!(a.fold(&[1]), basis_vector(vec![0]));
        assert_eq!(a.fold(&[0, 1]), basis_vector(vec![0, 0]));
        let t = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1)]);
        let tt = t.coproduct(&t).unwrap();
        let b = tt.basis(&AlgebraBounds { max_weight: 2, degrees: Some(2..=2) });
        assert_eq!(b[&2].len(), 4);
        let triv = FreeAlgebra::trivial(Flavor::Commutative, Q);
        assert_eq!(a.coproduct(&triv).unwrap().gens.len(), 1);
    }

    #[test]
    fn cyclic_has_order_n() {
        let a = FreeAlgebra::new(Flavor::Commutative, Q, vec![Generator::new("x", 1), Generator::new("y", 2)]);
        for n in 1..=4 {
            let big = a.copies(n).unwrap();
            for w in big.basis(&AlgebraBounds { max_weight: 3, degrees: None }).into_values().flatten() {
                let mut v = basis_vector(w.clone());
                for _ in 0..n {
                    let mut next = Vec::new();
                    for (u, c) in &v {
                        next.extend(lin_scale(&a.cyclic(n, u), *c));
                    }
                    v = normalize_lin(next);
                }
                assert_eq!(v, basis_vector(w));
            }
        }
        assert_eq!(a.cyclic(2, &[0]), basis_vector(vec![2]));
    }

    #[test]
    fn hilbert_series_matches_enumeration() {
        let a = FreeAlgebra::new(Flavor::Commutative, Q, vec![Generator::new("a", 1), Generator::new("b", 2), Generator::new("c", 3)]);
        let b = a.basis(&AlgebraBounds { max_weight: 12, degrees: None });
        for n in 0..=10 {
            assert_eq!(b.get(&n).map_or(0, Vec::len) as u64, hilbert_series_coefficient(&[1, 2, 3], n));
        }
    }
}
