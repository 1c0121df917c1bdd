//! Simplicial objects in differential graded modules.
//!
//! A simplicial DG module is described lazily by a [`SimplicialSource`]
//! (basis per level, internal differential, faces and degeneracies given on
//! basis labels) and materialized up to a level bound `P` into a
//! [`SimplicialDGModule`] of matrices. From there we build the total complex,
//! the degenerate subcomplex, the normalization and shuffle products.
//!
//! The total differential on a level-`p` element is
//! `D x = Σ_i (-1)^i d_i x + (-1)^p d_A x`, the simplicial coordinate being
//! treated as sitting to the left of the internal one.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dgmod::{basis_vector, normalize_lin, ChainMap, DGModule, GradedModule, Label, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, to_small, Field, QArith, Rational, ReducedEchelon};

/// A simplicial DG module given by formulas on basis labels.
///
/// Each level must be finite; truncating sources drop out-of-range labels
/// from the images they return.
pub trait SimplicialSource {
    type Label: Label;
    /// Basis of level `p` as `(internal degree, label)` pairs.
    fn basis(&self, p: usize) -> Result<Vec<(i64, Self::Label)>>;
    /// Internal differential (lowers internal degree by one).
    fn differential(&self, p: usize, x: &Self::Label) -> Lin<Self::Label>;
    /// `d_i : level p -> level p-1`.
    fn face(&self, p: usize, i: usize, x: &Self::Label) -> Lin<Self::Label>;
    /// `s_j : level p -> level p+1`.
    fn degeneracy(&self, p: usize, j: usize, x: &Self::Label) -> Lin<Self::Label>;
}

/// Levels `0..=P` with faces and degeneracies as chain maps.
#[derive(Clone, Debug)]
pub struct SimplicialDGModule<L: Label> {
    pub levels: Vec<DGModule<L>>,
    /// `faces[p][i] : level p -> level p-1`; `faces[0]` is empty.
    pub faces: Vec<Vec<ChainMap>>,
    /// `degeneracies[p][j] : level p -> level p+1` for `p < P`.
    pub degeneracies: Vec<Vec<ChainMap>>,
}

/// Materializes the levels `0..=bound` of a source.
pub fn materialize<S: SimplicialSource>(src: &S, bound: usize) -> Result<SimplicialDGModule<S::Label>> {
    let mut raw = Vec::with_capacity(bound + 1);
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    for p in 0..=bound {
        let b = src.basis(p)?;
        for (q, _) in &b {
            lo = lo.min(*q);
            hi = hi.max(*q);
        }
        raw.push(b);
    }
    let mut levels = Vec::with_capacity(bound + 1);
    for (p, b) in raw.into_iter().enumerate() {
        let mut basis: BTreeMap<i64, Vec<S::Label>> = BTreeMap::new();
        if lo <= hi {
            for q in lo..=hi {
                basis.insert(q, Vec::new());
            }
        }
        for (q, l) in b {
            basis.entry(q).or_default().push(l);
        }
        let module = GradedModule::from_basis(basis)?;
        levels.push(DGModule::from_fn(module, |x| src.differential(p, x))?);
    }
    let mut faces = vec![Vec::new()];
    for p in 1..=bound {
        let maps = (0..=p)
            .map(|i| ChainMap::from_fn(&levels[p], &levels[p - 1], 0, |x| src.face(p, i, x)))
            .collect::<Result<Vec<_>>>()?;
        faces.push(maps);
    }
    let mut degeneracies = Vec::new();
    for p in 0..bound {
        let maps = (0..=p)
            .map(|j| ChainMap::from_fn(&levels[p], &levels[p + 1], 0, |x| src.degeneracy(p, j, x)))
            .collect::<Result<Vec<_>>>()?;
        degeneracies.push(maps);
    }
    Ok(SimplicialDGModule { levels, faces, degeneracies })
}

impl<L: Label> SimplicialDGModule<L> {
    pub fn bound(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// The constant simplicial object on `m`: every face and degeneracy is the
    /// identity.
    pub fn constant(m: &DGModule<L>, bound: usize) -> Self {
        let levels = vec![m.clone(); bound + 1];
        let id = ChainMap::identity(m);
        let faces = (0..=bound).map(|p| if p == 0 { Vec::new() } else { vec![id.clone(); p + 1] }).collect();
        let degeneracies = (0..bound).map(|p| vec![id.clone(); p + 1]).collect();
        SimplicialDGModule { levels, faces, degeneracies }
    }

    pub fn face_apply(&self, p: usize, i: usize, v: &Lin<L>) -> Lin<L> {
        self.faces[p][i].apply(&self.levels[p], &self.levels[p - 1], v)
    }

    pub fn degeneracy_apply(&self, p: usize, j: usize, v: &Lin<L>) -> Lin<L> {
        self.degeneracies[p][j].apply(&self.levels[p], &self.levels[p + 1], v)
    }

    /// Internal degree of a level-`p` label.
    pub fn internal_degree(&self, p: usize, x: &L) -> Option<i64> {
        self.levels[p].module().position(x).map(|(q, _)| q)
    }

    /// Verifies the simplicial identities and the compatibility of faces and
    /// degeneracies with the internal differential. Returns the failures,
    /// each naming the offending identity.
    pub fn check_simplicial_identities(&self, field: Field) -> Vec<String> {
        let mut out = Vec::new();
        let p_max = self.bound();
        let mut differ = |name: String, lhs: &dyn Fn(&Lin<L>) -> Lin<L>, rhs: &dyn Fn(&Lin<L>) -> Lin<L>, p: usize| {
            for x in self.levels[p].module().degrees().flat_map(|q| self.levels[p].basis(q).to_vec()) {
                let v = basis_vector(x.clone());
                let a = lhs(&v);
                let b = rhs(&v);
                let mut d = a;
                d.extend(b.into_iter().map(|(l, c)| (l, -c)));
                let d = normalize_lin(d);
                if !crate::dgmod::lin_is_zero(&d, field) {
                    out.push(format!("{name} fails at level {p} on {x:?}"));
                    return;
                }
            }
        };
        // d_i d_j = d_{j-1} d_i for i < j
        for p in 2..=p_max {
            for j in 1..=p {
                for i in 0..j {
                    differ(
                        format!("d_{i} d_{j} = d_{} d_{i}", j - 1),
                        &|v| self.face_apply(p - 1, i, &self.face_apply(p, j, v)),
                        &|v| self.face_apply(p - 1, j - 1, &self.face_apply(p, i, v)),
                        p,
                    );
                }
            }
        }
        // face/degeneracy relations on level p, using s_j : p -> p+1
        for p in 0..p_max {
            for j in 0..=p {
                for i in 0..=p + 1 {
                    let name;
                    let rhs: Box<dyn Fn(&Lin<L>) -> Lin<L>> = if i < j {
                        name = format!("d_{i} s_{j} = s_{} d_{i}", j - 1);
                        Box::new(move |v| self.degeneracy_apply(p - 1, j - 1, &self.face_apply(p, i, v)))
                    } else if i == j || i == j + 1 {
                        name = format!("d_{i} s_{j} = id");
                        Box::new(|v: &Lin<L>| v.clone())
                    } else {
                        name = format!("d_{i} s_{j} = s_{j} d_{}", i - 1);
                        Box::new(move |v| self.degeneracy_apply(p - 1, j, &self.face_apply(p, i - 1, v)))
                    };
                    differ(name, &|v| self.face_apply(p + 1, i, &self.degeneracy_apply(p, j, v)), &*rhs, p);
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i <= j
        for p in 0..p_max.saturating_sub(1) {
            for j in 0..=p {
                for i in 0..=j {
                    differ(
                        format!("s_{i} s_{j} = s_{} s_{i}", j + 1),
                        &|v| self.degeneracy_apply(p + 1, i, &self.degeneracy_apply(p, j, v)),
                        &|v| self.degeneracy_apply(p + 1, j + 1, &self.degeneracy_apply(p, i, v)),
                        p,
                    );
                }
            }
        }
        // compatibility with the internal differential
        for p in 0..=p_max {
            let level = &self.levels[p];
            if p > 0 {
                for i in 0..=p {
                    differ(
                        format!("d_A d_{i} = d_{i} d_A"),
                        &|v| self.levels[p - 1].apply_d(&self.face_apply(p, i, v)),
                        &|v| self.face_apply(p, i, &level.apply_d(v)),
                        p,
                    );
                }
            }
            if p < p_max {
                for j in 0..=p {
                    differ(
                        format!("d_A s_{j} = s_{j} d_A"),
                        &|v| self.levels[p + 1].apply_d(&self.degeneracy_apply(p, j, v)),
                        &|v| self.degeneracy_apply(p, j, &level.apply_d(v)),
                        p,
                    );
                }
            }
        }
        out
    }
}

/// Label of a total complex: `(level, internal label)`.
pub type TotLabel<L> = (usize, L);

/// The total complex of the levels `0..=P`. The degree of `(p, x)` is
/// `p + |x|`.
pub fn tot<L: Label>(s: &SimplicialDGModule<L>) -> Result<DGModule<TotLabel<L>>> {
    let mut basis: BTreeMap<i64, Vec<TotLabel<L>>> = BTreeMap::new();
    for (p, level) in s.levels.iter().enumerate() {
        for q in level.module().degrees() {
            let e = basis.entry(p as i64 + q).or_default();
            e.extend(level.basis(q).iter().map(|x| (p, x.clone())));
        }
    }
    let module = GradedModule::from_basis(basis)?;
    DGModule::from_fn(module, |(p, x)| tot_differential(s, *p, x))
}

fn tot_differential<L: Label>(s: &SimplicialDGModule<L>, p: usize, x: &L) -> Lin<TotLabel<L>> {
    let v = basis_vector(x.clone());
    let mut out: Lin<TotLabel<L>> = Vec::new();
    if p > 0 {
        for i in 0..=p {
            let si = sign(i as i64);
            out.extend(s.face_apply(p, i, &v).into_iter().map(|(y, c)| ((p - 1, y), c * si)));
        }
    }
    let sp = sign(p as i64);
    out.extend(s.levels[p].apply_d(&v).into_iter().map(|(y, c)| ((p, y), c * sp)));
    out
}

/// The subcomplex of the total complex spanned by degeneracy images, stored
/// as a reduced echelon basis in each total degree.
pub struct DegenerateSubcomplex<L: Label> {
    tot: DGModule<TotLabel<L>>,
    echelons: BTreeMap<i64, ReducedEchelon<QArith>>,
}

impl<L: Label> DegenerateSubcomplex<L> {
    pub fn tot(&self) -> &DGModule<TotLabel<L>> {
        &self.tot
    }

    pub fn dim(&self, n: i64) -> usize {
        self.echelons.get(&n).map_or(0, |e| e.rows.len())
    }

    /// Whether a pure basis label of the total complex is a pivot, i.e. is
    /// not kept in the normalization.
    pub fn is_pivot(&self, n: i64, index: usize) -> bool {
        self.echelons.get(&n).is_some_and(|e| e.is_pivot(index))
    }

    /// Spanning vectors in total degree `n`.
    pub fn basis(&self, n: i64) -> Vec<Lin<TotLabel<L>>> {
        let labels = self.tot.basis(n);
        self.echelons.get(&n).map_or(Vec::new(), |e| {
            e.rows
                .iter()
                .map(|r| r.iter().map(|(i, c)| (labels[*i].clone(), to_small(c).expect("small"))).collect())
                .collect()
        })
    }

    /// Whether `v` (of total degree `n`) lies in the subcomplex.
    pub fn contains(&self, n: i64, v: &Lin<TotLabel<L>>) -> bool {
        let coords = self.tot.module().coords(n, v).expect("labels of the total complex");
        let mut big: Vec<(usize, BigRational)> =
            coords.iter().map(|(i, c)| (*i, crate::exactlin::big(c))).collect();
        big.sort_by_key(|(i, _)| *i);
        match self.echelons.get(&n) {
            Some(e) => e.reduce(big).is_empty(),
            None => big.is_empty(),
        }
    }
}

/// Span of the images of all degeneracies. Checks closure under the total
/// differential, failing with `NotClosed` in the first bad degree.
pub fn degenerate_subcomplex<L: Label>(s: &SimplicialDGModule<L>) -> Result<DegenerateSubcomplex<L>> {
    let tot = tot(s)?;
    let mut vectors: BTreeMap<i64, Vec<Vec<(usize, BigRational)>>> = BTreeMap::new();
    for (p, maps) in s.degeneracies.iter().enumerate() {
        for (_j, m) in maps.iter().enumerate() {
            for q in s.levels[p].module().degrees() {
                for x in s.levels[p].basis(q) {
                    let img = m.apply(&s.levels[p], &s.levels[p + 1], &basis_vector(x.clone()));
                    if img.is_empty() {
                        continue;
                    }
                    let n = (p + 1) as i64 + q;
                    let lin: Lin<TotLabel<L>> = img.into_iter().map(|(y, c)| ((p + 1, y), c)).collect();
                    let mut coords: Vec<(usize, BigRational)> = tot
                        .module()
                        .coords(n, &lin)?
                        .into_iter()
                        .map(|(i, c)| (i, crate::exactlin::big(&c)))
                        .collect();
                    coords.sort_by_key(|(i, _)| *i);
                    vectors.entry(n).or_default().push(coords);
                }
            }
        }
    }
    let mut echelons = BTreeMap::new();
    for (n, mut vs) in vectors {
        vs.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().map(|x| x.0).cmp(b.iter().map(|x| x.0))));
        let mut e = ReducedEchelon::new(QArith);
        for v in vs {
            e.insert(v);
        }
        echelons.insert(n, e);
    }
    let sub = DegenerateSubcomplex { tot, echelons };
    for n in sub.echelons.keys().copied().collect::<Vec<_>>() {
        for v in sub.basis(n) {
            let dv = sub.tot.apply_d(&v);
            if !dv.is_empty() && !sub.tot.module().has_degree(n - 1) {
                continue;
            }
            if !dv.is_empty() && !sub.contains(n - 1, &dv) {
                return Err(Error::NotClosed { degree: n });
            }
        }
    }
    Ok(sub)
}

/// The normalization `N = Tot / D` together with the projection.
pub struct Normalization<L: Label> {
    pub tot: DGModule<TotLabel<L>>,
    /// Basis: the total-complex labels that are not pivots of `D`.
    pub normalized: DGModule<TotLabel<L>>,
    pub projection: ChainMap,
    pub degenerate: DegenerateSubcomplex<L>,
}

impl<L: Label> Normalization<L> {
    /// Image in `N` of a combination of total-complex labels of degree `n`.
    pub fn project(&self, n: i64, v: &Lin<TotLabel<L>>) -> Lin<TotLabel<L>> {
        let coords = self.tot.module().coords(n, v).expect("labels of the total complex");
        let mut big: Vec<(usize, BigRational)> =
            coords.iter().map(|(i, c)| (*i, crate::exactlin::big(c))).collect();
        big.sort_by_key(|(i, _)| *i);
        let red = match self.degenerate.echelons.get(&n) {
            Some(e) => e.reduce(big),
            None => big,
        };
        let labels = self.tot.basis(n);
        normalize_lin(
            red.into_iter()
                .map(|(i, c)| (labels[i].clone(), to_small(&c).expect("small coefficient")))
                .collect(),
        )
    }

    /// Inclusion of the normalized basis labels into the total complex.
    pub fn inclusion(&self) -> Result<ChainMap> {
        ChainMap::from_fn(&self.normalized, &self.tot, 0, |x| basis_vector(x.clone()))
    }
}

/// Normalizes a materialized simplicial DG module.
pub fn normalize<L: Label>(s: &SimplicialDGModule<L>) -> Result<Normalization<L>> {
    let degenerate = degenerate_subcomplex(s)?;
    let tot = degenerate.tot.clone();
    let mut basis: BTreeMap<i64, Vec<TotLabel<L>>> = BTreeMap::new();
    for n in tot.module().degrees() {
        let keep = tot
            .basis(n)
            .iter()
            .enumerate()
            .filter(|(i, _)| !degenerate.is_pivot(n, *i))
            .map(|(_, l)| l.clone())
            .collect();
        basis.insert(n, keep);
    }
    let module = GradedModule::from_basis(basis)?;
    let partial = Normalization {
        tot: tot.clone(),
        normalized: DGModule::zero_differential(module.clone()),
        projection: ChainMap::from_matrices(0, BTreeMap::new()),
        degenerate,
    };
    let degree_of: HashMap<TotLabel<L>, i64> =
        module.degrees().flat_map(|n| module.basis(n).iter().map(move |l| (l.clone(), n))).collect();
    let normalized = DGModule::from_fn(module, |x| {
        let n = degree_of[x];
        let dx = tot.apply_d(&basis_vector(x.clone()));
        if dx.is_empty() || !tot.module().has_degree(n - 1) {
            return Vec::new();
        }
        partial.project(n - 1, &dx)
    })?;
    let projection = ChainMap::from_fn(&tot, &normalized, 0, |x| {
        let n = tot.module().position(x).expect("tot label").0;
        partial.project(n, &basis_vector(x.clone()))
    })?;
    Ok(Normalization { tot, normalized, projection, degenerate: partial.degenerate })
}

/// The levelwise tensor product `a × b` with diagonal faces and degeneracies.
pub fn levelwise_product<A: Label, B: Label>(
    a: &SimplicialDGModule<A>,
    b: &SimplicialDGModule<B>,
) -> Result<SimplicialDGModule<(A, B)>> {
    let bound = a.bound().min(b.bound());
    let levels: Vec<_> = (0..=bound).map(|p| crate::dgmod::tensor(&a.levels[p], &b.levels[p])).collect();
    let mut faces = vec![Vec::new()];
    for p in 1..=bound {
        let maps = (0..=p)
            .map(|i| {
                ChainMap::tensor(
                    &a.faces[p][i],
                    &b.faces[p][i],
                    &a.levels[p],
                    &b.levels[p],
                    &a.levels[p - 1],
                    &b.levels[p - 1],
                    &levels[p],
                    &levels[p - 1],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        faces.push(maps);
    }
    let mut degeneracies = Vec::new();
    for p in 0..bound {
        let maps = (0..=p)
            .map(|j| {
                ChainMap::tensor(
                    &a.degeneracies[p][j],
                    &b.degeneracies[p][j],
                    &a.levels[p],
                    &b.levels[p],
                    &a.levels[p + 1],
                    &b.levels[p + 1],
                    &levels[p],
                    &levels[p + 1],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        degeneracies.push(maps);
    }
    Ok(SimplicialDGModule { levels, faces, degeneracies })
}

/// The `(p, q)`-shuffles as `(sign, μ, ν)`: `μ` and `ν` partition
/// `0..p+q` into increasing sequences of lengths `p` and `q`; the sign is that
/// of the permutation `(μ, ν)`.
pub fn shuffles(p: usize, q: usize) -> Vec<(i64, Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mu in itertools::Itertools::combinations(0..p + q, p) {
        let nu: Vec<usize> = (0..p + q).filter(|k| !mu.contains(k)).collect();
        let inversions: usize = mu.iter().map(|m| nu.iter().filter(|n| *n < m).count()).sum();
        out.push((if inversions % 2 == 0 { 1 } else { -1 }, mu, nu));
    }
    out
}

/// Applies `s_{js[last]} ∘ … ∘ s_{js[0]}` starting at level `p`.
fn degenerate_by<L: Label>(s: &SimplicialDGModule<L>, p: usize, js: &[usize], v: Lin<L>) -> Lin<L> {
    let mut v = v;
    for (k, &j) in js.iter().enumerate() {
        if v.is_empty() {
            break;
        }
        v = s.degeneracy_apply(p + k, j, &v);
    }
    v
}

/// The shuffle product of two total-complex basis elements:
/// `sh((p,x)⊗(q,y)) = Σ sgn(μ,ν) (-1)^{q|x|} (s_ν x ⊗ s_μ y)` at level `p+q`,
/// where `s_ν = s_{ν_q}⋯s_{ν_1}` and `s_μ = s_{μ_p}⋯s_{μ_1}`.
pub fn shuffle_element<A: Label, B: Label>(
    a: &SimplicialDGModule<A>,
    b: &SimplicialDGModule<B>,
    x: &TotLabel<A>,
    y: &TotLabel<B>,
) -> Lin<TotLabel<(A, B)>> {
    let (p, xa) = x;
    let (q, yb) = y;
    if p + q > a.bound().min(b.bound()) {
        return Vec::new();
    }
    let qx = a.internal_degree(*p, xa).expect("label of a");
    let koszul = sign(*q as i64 * qx);
    let mut out = Vec::new();
    for (sg, mu, nu) in shuffles(*p, *q) {
        let xs = degenerate_by(a, *p, &nu, basis_vector(xa.clone()));
        let ys = degenerate_by(b, *q, &mu, basis_vector(yb.clone()));
        let s = Rational::from_integer(sg) * koszul;
        for (u, cu) in &xs {
            for (w, cw) in &ys {
                out.push(((p + q, (u.clone(), w.clone())), *cu * *cw * s));
            }
        }
    }
    normalize_lin(out)
}

/// The shuffle map `Tot(a) ⊗ Tot(b) -> Tot(a × b)` as a chain map. Terms
/// landing above the common level bound are dropped.
pub fn shuffle<A: Label, B: Label>(
    a: &SimplicialDGModule<A>,
    b: &SimplicialDGModule<B>,
) -> Result<ShuffleMap<A, B>> {
    let tot_a = tot(a)?;
    let tot_b = tot(b)?;
    let product = levelwise_product(a, b)?;
    let tot_ab = tot(&product)?;
    let source = crate::dgmod::tensor(&tot_a, &tot_b);
    let map = ChainMap::from_fn(&source, &tot_ab, 0, |(x, y)| shuffle_element(a, b, x, y))?;
    Ok(ShuffleMap { source, target: tot_ab, product, map })
}

/// The shuffle map with its source and target complexes.
pub struct ShuffleMap<A: Label, B: Label> {
    pub source: DGModule<(TotLabel<A>, TotLabel<B>)>,
    pub target: DGModule<TotLabel<(A, B)>>,
    pub product: SimplicialDGModule<(A, B)>,
    pub map: ChainMap,
}

impl<A: Label, B: Label> ShuffleMap<A, B> {
    /// Total degrees in which the chain-map identity can be checked without
    /// hitting the level bound: sources with `p + q < P`.
    pub fn verify(&self, field: Field) -> Result<Vec<i64>> {
        let bound = self.product.bound();
        let mut bad = Vec::new();
        for n in self.source.module().degrees() {
            for (x, y) in self.source.basis(n) {
                if x.0 + y.0 >= bound {
                    continue;
                }
                let v = basis_vector((x.clone(), y.clone()));
                let lhs = self.target.apply_d(&self.map.apply(&self.source, &self.target, &v));
                let rhs = self.map.apply(&self.source, &self.target, &self.source.apply_d(&v));
                let mut d = lhs;
                d.extend(rhs.into_iter().map(|(l, c)| (l, -c)));
                if !crate::dgmod::lin_is_zero(&normalize_lin(d), field) {
                    bad.push(n);
                    break;
                }
            }
        }
        Ok(bad)
    }
}

/// Iterated shuffle product of total-complex elements of one simplicial
/// module, bracketed from the left: `sh(sh(x_0, x_1), x_2)…`. The result
/// lives in the levelwise product of `xs.len()` copies, with labels listing the
/// coordinates.
pub fn iterated_shuffle<L: Label>(
    s: &SimplicialDGModule<L>,
    xs: &[TotLabel<L>],
) -> Lin<TotLabel<Vec<L>>> {
    let Some((first, rest)) = xs.split_first() else {
        return Vec::new();
    };
    let mut acc: Lin<TotLabel<Vec<L>>> = vec![((first.0, vec![first.1.clone()]), Rational::one())];
    for y in rest {
        let mut next = Vec::new();
        for ((p, word), c) in &acc {
            for (t, ct) in shuffle_words(s, *p, word, y) {
                next.push((t, ct * *c));
            }
        }
        acc = normalize_lin(next);
    }
    acc
}

/// Iterated shuffle bracketed from the right: `sh(x_0, sh(x_1, …))`.
pub fn iterated_shuffle_right<L: Label>(
    s: &SimplicialDGModule<L>,
    xs: &[TotLabel<L>],
) -> Lin<TotLabel<Vec<L>>> {
    let Some((last, init)) = xs.split_last() else {
        return Vec::new();
    };
    let mut acc: Lin<TotLabel<Vec<L>>> = vec![((last.0, vec![last.1.clone()]), Rational::one())];
    for x in init.iter().rev() {
        let mut next = Vec::new();
        for ((q, word), c) in &acc {
            for (t, ct) in shuffle_word_right(s, x, *q, word) {
                next.push((t, ct * *c));
            }
        }
        acc = normalize_lin(next);
    }
    acc
}

fn degenerate_word<L: Label>(s: &SimplicialDGModule<L>, p: usize, js: &[usize], word: &[L]) -> Lin<Vec<L>> {
    let mut acc: Lin<Vec<L>> = vec![(Vec::new(), Rational::one())];
    for x in word {
        let img = degenerate_by(s, p, js, basis_vector(x.clone()));
        let mut next = Vec::new();
        for (w, c) in &acc {
            for (u, cu) in &img {
                let mut w2 = w.clone();
                w2.push(u.clone());
                next.push((w2, *c * *cu));
            }
        }
        acc = next;
    }
    acc
}

fn word_degree<L: Label>(s: &SimplicialDGModule<L>, p: usize, word: &[L]) -> i64 {
    word.iter().map(|x| s.internal_degree(p, x).expect("label")).sum()
}

fn shuffle_words<L: Label>(s: &SimplicialDGModule<L>, p: usize, word: &[L], y: &TotLabel<L>) -> Lin<TotLabel<Vec<L>>> {
    let (q, yl) = y;
    if p + q > s.bound() {
        return Vec::new();
    }
    let koszul = sign(*q as i64 * word_degree(s, p, word));
    let mut out = Vec::new();
    for (sg, mu, nu) in shuffles(p, *q) {
        let xs = degenerate_word(s, p, &nu, word);
        let ys = degenerate_by(s, *q, &mu, basis_vector(yl.clone()));
        for (u, cu) in &xs {
            for (w, cw) in &ys {
                let mut t = u.clone();
                t.push(w.clone());
                out.push(((p + q, t), *cu * *cw * koszul * Rational::from_integer(sg)));
            }
        }
    }
    out
}

fn shuffle_word_right<L: Label>(s: &SimplicialDGModule<L>, x: &TotLabel<L>, q: usize, word: &[L]) -> Lin<TotLabel<Vec<L>>> {
    let (p, xl) = x;
    if p + q > s.bound() {
        return Vec::new();
    }
    let qx = s.internal_degree(*p, xl).expect("label");
    let koszul = sign(q as i64 * qx);
    let mut out = Vec::new();
    for (sg, mu, nu) in shuffles(*p, q) {
        let xs = degenerate_by(s, *p, &nu, basis_vector(xl.clone()));
        let ys = degenerate_word(s, q, &mu, word);
        for (u, cu) in &xs {
            for (w, cw) in &ys {
                let mut t = vec![u.clone()];
                t.extend(w.iter().cloned());
                out.push(((p + q, t), *cu * *cw * koszul * Rational::from_integer(sg)));
            }
        }
    }
    out
}

/// Homology dimensions of the total complex and of the normalization in
/// total degrees `range`.
pub fn compare_tot_and_normalization<L: Label>(
    s: &SimplicialDGModule<L>,
    range: std::ops::RangeInclusive<i64>,
    field: Field,
) -> Result<(BTreeMap<i64, usize>, BTreeMap<i64, usize>)> {
    let n = normalize(s)?;
    Ok((n.tot.homology_dims(range.clone(), field)?, n.normalized.homology_dims(range, field)?))
}

/// Whether the big-rational vector is zero; small helper for callers.
pub fn is_zero_big(v: &[(usize, BigRational)]) -> bool {
    v.iter().all(|(_, c)| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `k[K(n)]` in internal degree 0: the chains of the simplicial circle.
    struct CircleChains;

    impl SimplicialSource for CircleChains {
        type Label = usize;
        fn basis(&self, p: usize) -> Result<Vec<(i64, usize)>> {
            Ok((0..=p).map(|k| (0, k)).collect())
        }
        fn differential(&self, _: usize, _: &usize) -> Lin<usize> {
            Vec::new()
        }
        fn face(&self, p: usize, i: usize, &k: &usize) -> Lin<usize> {
            let img = if i == p { k % p } else if k <= i { k } else { k - 1 };
            basis_vector(img)
        }
        fn degeneracy(&self, _: usize, j: usize, &k: &usize) -> Lin<usize> {
            basis_vector(if k <= j { k } else { k + 1 })
        }
    }

    #[test]
    fn circle_chains_total_and_normalized() {
        let s = materialize(&CircleChains, 4).unwrap();
        assert!(s.check_simplicial_identities(Field::Rational).is_empty());
        let t = tot(&s).unwrap();
        assert!(t.verify_dsquare(-1..=6, Field::Rational).is_empty());
        let (ht, hn) = compare_tot_and_normalization(&s, 0..=3, Field::Rational).unwrap();
        assert_eq!(ht.values().copied().collect::<Vec<_>>(), vec![1, 1, 0, 0]);
        assert_eq!(ht, hn);
        let n = normalize(&s).unwrap();
        assert_eq!(n.normalized.dim(0), 1);
        assert_eq!(n.normalized.dim(1), 1);
        assert_eq!(n.normalized.dim(2), 0);
        assert_eq!(n.degenerate.dim(0), 0);
    }

    #[test]
    fn constant_module_normalizes_to_level_zero() {
        let m = DGModule::zero_differential(GradedModule::from_basis([(0, vec![0u8])].into()).unwrap());
        let s = SimplicialDGModule::constant(&m, 4);
        assert!(s.check_simplicial_identities(Field::Rational).is_empty());
        let n = normalize(&s).unwrap();
        assert_eq!(n.normalized.module().total_dim(), 1);
        for d in 1..=4 {
            assert_eq!(n.degenerate.dim(d), 1);
        }
        let h = tot(&s).unwrap().homology_dims(0..=3, Field::Rational).unwrap();
        assert_eq!(h.values().copied().collect::<Vec<_>>(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn projection_after_inclusion_is_identity() {
        let s = materialize(&CircleChains, 3).unwrap();
        let n = normalize(&s).unwrap();
        let inc = n.inclusion().unwrap();
        let comp = n.projection.compose(&inc, &n.normalized, &n.tot, &n.normalized).unwrap();
        assert_eq!(comp, ChainMap::identity(&n.normalized));
        assert!(n.projection.verify(&n.tot, &n.normalized, 0..=3, Field::Rational).unwrap().is_empty());
    }

    #[test]
    fn corrupted_face_is_named() {
        let mut s = materialize(&CircleChains, 3).unwrap();
        let wrong = s.faces[2][0].clone();
        s.faces[2][1] = wrong;
        let failures = s.check_simplicial_identities(Field::Rational);
        assert!(!failures.is_empty());
        assert!(failures.iter().any(|f| f.contains("d_1")));
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(0, 3).len(), 1);
        assert_eq!(shuffles(2, 2).len(), 6);
        let s11 = shuffles(1, 1);
        assert_eq!(s11.iter().map(|t| t.0).sum::<i64>(), 0);
    }

    #[test]
    fn shuffle_of_circle_chains_is_a_chain_map() {
        let s = materialize(&CircleChains, 4).unwrap();
        let sh = shuffle(&s, &s).unwrap();
        assert!(sh.verify(Field::Rational).unwrap().is_empty());
        // p = q = 1 gives two terms with opposite signs
        let v = shuffle_element(&s, &s, &(1, 1), &(1, 1));
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].1 + v[1].1, Rational::zero());
    }

    #[test]
    fn iterated_shuffle_bracketings_agree() {
        let s = materialize(&CircleChains, 4).unwrap();
        let xs = [(1, 1), (1, 0), (2, 2)];
        assert_eq!(iterated_shuffle(&s, &xs), iterated_shuffle_right(&s, &xs));
        assert_eq!(iterated_shuffle(&s, &xs[..1]), vec![((1, vec![1]), Rational::one())]);
    }

    #[test]
    fn empty_simplicial_module() {
        struct Empty;
        impl SimplicialSource for Empty {
            type Label = u8;
            fn basis(&self, _: usize) -> Result<Vec<(i64, u8)>> {
                Ok(Vec::new())
            }
            fn differential(&self, _: usize, _: &u8) -> Lin<u8> {
                Vec::new()
            }
            fn face(&self, _: usize, _: usize, _: &u8) -> Lin<u8> {
                Vec::new()
            }
            fn degeneracy(&self, _: usize, _: usize, _: &u8) -> Lin<u8> {
                Vec::new()
            }
        }
        let s = materialize(&Empty, 3).unwrap();
        assert!(tot(&s).unwrap().module().is_empty());
        assert!(normalize(&s).unwrap().normalized.module().is_empty());
    }
}
