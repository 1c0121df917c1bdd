//! Finite-type dg operads: associative, commutative and Barratt–Eccles.
//!
//! Permutations are `Vec<u8>` of images, `(στ)(i) = σ(τ(i))`. The right
//! action on a basis element is precomposition. Block composition follows
//! `γ(c·σ; d_1..d_n) = ±γ(c; d_{σ⁻¹(1)}..d_{σ⁻¹(n)})·σ(k_1..k_n)` and
//! `γ(c; d_1τ_1..d_nτ_n) = γ(c; d_1..d_n)·(τ_1 ⊕ … ⊕ τ_n)`.
//!
//! `E(n)` is the normalized chain complex of the contractible simplicial set
//! `EΣ_n`: degree `d` is spanned by tuples `(w_0, …, w_d)` with neighbouring
//! entries distinct, `∂_i` deletes `w_i`, and a tuple with equal neighbours is
//! zero. `dim E(n)_d = n!(n!-1)^d`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use num_traits::One;

use crate::dgmod::{normalize_lin, DGModule, GradedModule, Label, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Field, Rational};

pub type Perm = Vec<u8>;

pub fn identity(n: usize) -> Perm {
    (0..n as u8).collect()
}

pub fn compose_perm(s: &[u8], t: &[u8]) -> Perm {
    t.iter().map(|&i| s[i as usize]).collect()
}

pub fn inverse(s: &[u8]) -> Perm {
    let mut out = vec![0; s.len()];
    for (i, &j) in s.iter().enumerate() {
        out[j as usize] = i as u8;
    }
    out
}

/// All permutations of `n` letters in lexicographic order.
pub fn permutations(n: usize) -> Vec<Perm> {
    (0..n as u8).permutations(n).collect()
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The permutation of `Σ k_i` letters moving block `i` (of size `k_i`) to
/// slot `w(i)`.
pub fn block_permutation(w: &[u8], sizes: &[usize]) -> Perm {
    let n = w.len();
    let winv = inverse(w);
    let mut src = vec![0; n];
    let mut tgt = vec![0; n];
    for i in 1..n {
        src[i] = src[i - 1] + sizes[i - 1];
        tgt[i] = tgt[i - 1] + sizes[winv[i - 1] as usize];
    }
    let mut out = vec![0u8; sizes.iter().sum()];
    for i in 0..n {
        for t in 0..sizes[i] {
            out[src[i] + t] = (tgt[w[i] as usize] + t) as u8;
        }
    }
    out
}

/// `τ_1 ⊕ … ⊕ τ_n`.
pub fn direct_sum(ts: &[&[u8]]) -> Perm {
    let mut out = Vec::new();
    let mut off = 0u8;
    for t in ts {
        out.extend(t.iter().map(|&x| x + off));
        off += t.len() as u8;
    }
    out
}

/// Permutation-operad composition `γ(w; v_1..v_n) = w(k) ∘ (v_1 ⊕ … ⊕ v_n)`.
pub fn compose_blocks(w: &[u8], vs: &[&[u8]]) -> Perm {
    let sizes: Vec<usize> = vs.iter().map(|v| v.len()).collect();
    compose_perm(&block_permutation(w, &sizes), &direct_sum(vs))
}

/// A dg operad with a finite basis in each arity and degree.
pub trait Operad {
    type Label: Label;

    fn name(&self) -> &'static str;
    fn basis(&self, arity: usize, degree: i64) -> Result<Vec<Self::Label>>;
    fn degree(&self, x: &Self::Label) -> i64;
    fn arity(&self, x: &Self::Label) -> usize;
    fn differential(&self, x: &Self::Label) -> Lin<Self::Label>;
    /// Right action; basis elements go to basis elements.
    fn act(&self, x: &Self::Label, sigma: &[u8]) -> Self::Label;
    fn compose(&self, c: &Self::Label, inputs: &[Self::Label]) -> Result<Lin<Self::Label>>;
    fn unit(&self) -> Self::Label;
    /// Highest degree with nonzero basis, if bounded.
    fn top_degree(&self, arity: usize) -> Option<i64>;
}

pub fn assoc_operad() -> Ass {
    Ass
}

pub fn comm_operad() -> Com {
    Com
}

pub fn barratt_eccles(cap: usize) -> BarrattEccles {
    BarrattEccles::new(cap)
}

/// Arity-`n` component as a chain complex, up to `max_degree`.
pub fn arity_module<O: Operad>(op: &O, n: usize, max_degree: i64) -> Result<DGModule<O::Label>> {
    let top = op.top_degree(n).map_or(max_degree, |t| t.min(max_degree));
    let mut basis = BTreeMap::new();
    for d in 0..=top.max(0) {
        basis.insert(d, op.basis(n, d)?);
    }
    DGModule::from_fn(GradedModule::from_basis(basis)?, |x| op.differential(x))
}

/// `Ass`: `Ass(n) = k[Σ_n]` in degree 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Ass;

impl Operad for Ass {
    type Label = Perm;
    fn name(&self) -> &'static str {
        "Ass"
    }
    fn basis(&self, arity: usize, degree: i64) -> Result<Vec<Perm>> {
        Ok(if degree == 0 { permutations(arity) } else { Vec::new() })
    }
    fn degree(&self, _: &Perm) -> i64 {
        0
    }
    fn arity(&self, x: &Perm) -> usize {
        x.len()
    }
    fn differential(&self, _: &Perm) -> Lin<Perm> {
        Vec::new()
    }
    fn act(&self, x: &Perm, sigma: &[u8]) -> Perm {
        compose_perm(x, sigma)
    }
    fn compose(&self, c: &Perm, inputs: &[Perm]) -> Result<Lin<Perm>> {
        check_arity(c.len(), inputs.len())?;
        let vs: Vec<&[u8]> = inputs.iter().map(Vec::as_slice).collect();
        Ok(vec![(compose_blocks(c, &vs), Rational::one())])
    }
    fn unit(&self) -> Perm {
        vec![0]
    }
    fn top_degree(&self, _: usize) -> Option<i64> {
        Some(0)
    }
}

/// `Com`: one basis element `μ_n` in each arity, degree 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct Com;

impl Operad for Com {
    type Label = usize;
    fn name(&self) -> &'static str {
        "Com"
    }
    fn basis(&self, arity: usize, degree: i64) -> Result<Vec<usize>> {
        Ok(if degree == 0 { vec![arity] } else { Vec::new() })
    }
    fn degree(&self, _: &usize) -> i64 {
        0
    }
    fn arity(&self, x: &usize) -> usize {
        *x
    }
    fn differential(&self, _: &usize) -> Lin<usize> {
        Vec::new()
    }
    fn act(&self, x: &usize, _: &[u8]) -> usize {
        *x
    }
    fn compose(&self, c: &usize, inputs: &[usize]) -> Result<Lin<usize>> {
        check_arity(*c, inputs.len())?;
        Ok(vec![(inputs.iter().sum(), Rational::one())])
    }
    fn unit(&self) -> usize {
        1
    }
    fn top_degree(&self, _: usize) -> Option<i64> {
        Some(0)
    }
}

fn check_arity(n: usize, k: usize) -> Result<()> {
    if n == k {
        Ok(())
    } else {
        Err(Error::Shape(format!("composition of an arity {n} operation with {k} inputs")))
    }
}

/// The Barratt–Eccles operad. `cap` bounds the number of basis elements
/// enumerated in one arity and degree.
#[derive(Clone, Debug)]
pub struct BarrattEccles {
    pub cap: usize,
}

impl BarrattEccles {
    pub fn new(cap: usize) -> Self {
        BarrattEccles { cap }
    }

    /// `n!(n!-1)^d`.
    pub fn dimension(n: usize, d: usize) -> u128 {
        let f = factorial(n) as u128;
        f * (f - 1).pow(d as u32)
    }

    /// Dimension of the coinvariants `E(n)_d / Σ_n`.
    pub fn coinvariant_dimension(n: usize, d: usize) -> u128 {
        (factorial(n) as u128 - 1).pow(d as u32)
    }
}

fn faces(x: &[Perm]) -> Lin<Vec<Perm>> {
    let d = x.len() - 1;
    let mut out = Vec::new();
    for i in 0..=d {
        if 0 < i && i < d && x[i - 1] == x[i + 1] {
            continue;
        }
        let mut y = x.to_vec();
        y.remove(i);
        out.push((y, sign(i as i64)));
    }
    normalize_lin(out)
}

fn is_normalized(x: &[Perm]) -> bool {
    x.windows(2).all(|w| w[0] != w[1])
}

impl Operad for BarrattEccles {
    type Label = Vec<Perm>;
    fn name(&self) -> &'static str {
        "E"
    }
    fn basis(&self, arity: usize, degree: i64) -> Result<Vec<Vec<Perm>>> {
        if degree < 0 {
            return Ok(Vec::new());
        }
        let d = degree as usize;
        let count = Self::dimension(arity, d);
        if count > self.cap as u128 {
            return Err(Error::SizeLimitExceeded {
                what: format!("E({arity}) in degree {d}"),
                count: usize::try_from(count).unwrap_or(usize::MAX),
                cap: self.cap,
            });
        }
        let perms = permutations(arity);
        let mut out: Vec<Vec<Perm>> = perms.iter().map(|p| vec![p.clone()]).collect();
        for _ in 0..d {
            let mut next = Vec::with_capacity(out.len() * (perms.len() - 1));
            for t in out {
                for p in perms.iter().filter(|p| Some(*p) != t.last()) {
                    let mut u = t.clone();
                    u.push(p.clone());
                    next.push(u);
                }
            }
            out = next;
        }
        Ok(out)
    }
    fn degree(&self, x: &Vec<Perm>) -> i64 {
        x.len() as i64 - 1
    }
    fn arity(&self, x: &Vec<Perm>) -> usize {
        x[0].len()
    }
    fn differential(&self, x: &Vec<Perm>) -> Lin<Vec<Perm>> {
        if x.len() == 1 {
            return Vec::new();
        }
        faces(x)
    }
    fn act(&self, x: &Vec<Perm>, sigma: &[u8]) -> Vec<Perm> {
        x.iter().map(|w| compose_perm(w, sigma)).collect()
    }
    #[cfg(feature = "barratt-eccles-composition")]
    fn compose(&self, c: &Vec<Perm>, inputs: &[Vec<Perm>]) -> Result<Lin<Vec<Perm>>> {
        check_arity(c[0].len(), inputs.len())?;
        let mut factors: Vec<&Vec<Perm>> = vec![c];
        factors.extend(inputs.iter());
        let mut out = Vec::new();
        for (s, path) in multi_shuffles(&factors.iter().map(|f| f.len() - 1).collect::<Vec<_>>()) {
            let mut simplex = Vec::with_capacity(path.len());
            for idx in &path {
                let vs: Vec<&[u8]> = (1..factors.len()).map(|f| factors[f][idx[f]].as_slice()).collect();
                simplex.push(compose_blocks(&factors[0][idx[0]], &vs));
            }
            if is_normalized(&simplex) {
                out.push((simplex, sign(s)));
            }
        }
        Ok(normalize_lin(out))
    }
    #[cfg(not(feature = "barratt-eccles-composition"))]
    fn compose(&self, _: &Vec<Perm>, _: &[Vec<Perm>]) -> Result<Lin<Vec<Perm>>> {
        Err(Error::Unsupported("Barratt–Eccles composition is disabled".into()))
    }
    fn unit(&self) -> Vec<Perm> {
        vec![vec![0]]
    }
    fn top_degree(&self, arity: usize) -> Option<i64> {
        if arity <= 1 {
            Some(0)
        } else {
            None
        }
    }
}

/// Lattice paths through a product of simplices of dimensions `dims`: each
/// path lists, for every vertex, the index into each factor. The sign is that
/// of the shuffle of steps relative to "all steps of factor 0 first".
pub fn multi_shuffles(dims: &[usize]) -> Vec<(i64, Vec<Vec<usize>>)> {
    let total: usize = dims.iter().sum();
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(total);
    fn rec(dims: &[usize], used: &mut Vec<usize>, steps: &mut Vec<usize>, out: &mut Vec<(i64, Vec<Vec<usize>>)>) {
        if steps.len() == dims.iter().sum::<usize>() {
            let mut inv = 0i64;
            for i in 0..steps.len() {
                for j in i + 1..steps.len() {
                    if steps[i] > steps[j] {
                        inv += 1;
                    }
                }
            }
            let mut idx = vec![0; dims.len()];
            let mut path = vec![idx.clone()];
            for &f in steps.iter() {
                idx[f] += 1;
                path.push(idx.clone());
            }
            out.push((inv, path));
            return;
        }
        for f in 0..dims.len() {
            if used[f] < dims[f] {
                used[f] += 1;
                steps.push(f);
                rec(dims, used, steps, out);
                steps.pop();
                used[f] -= 1;
            }
        }
    }
    rec(dims, &mut vec![0; dims.len()], &mut steps, &mut out);
    out
}

/// Extends composition multilinearly.
pub fn compose_lin<O: Operad>(op: &O, c: &Lin<O::Label>, inputs: &[Lin<O::Label>]) -> Result<Lin<O::Label>> {
    let mut out = Vec::new();
    for (x, a) in c {
        for choice in inputs.iter().map(|v| v.iter()).multi_cartesian_product() {
            let labels: Vec<O::Label> = choice.iter().map(|(l, _)| l.clone()).collect();
            let coeff = choice.iter().fold(*a, |acc, (_, k)| acc * *k);
            for (y, k) in op.compose(x, &labels)? {
                out.push((y, k * coeff));
            }
        }
        if inputs.is_empty() {
            for (y, k) in op.compose(x, &[])? {
                out.push((y, k * *a));
            }
        }
    }
    Ok(normalize_lin(out))
}

fn act_lin<O: Operad>(op: &O, v: &Lin<O::Label>, sigma: &[u8]) -> Lin<O::Label> {
    normalize_lin(v.iter().map(|(x, c)| (op.act(x, sigma), *c)).collect())
}

/// Checks unit, equivariance (both forms), associativity and the Leibniz
/// rule for composition on every basis element of arity `≤ max_arity` and
/// degree `≤ max_degree`, with inputs of arity `≤ 2`. Returns the failures.
pub fn check_operad<O: Operad>(op: &O, max_arity: usize, max_degree: i64, field: Field) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let elems = |n: usize| -> Result<Vec<O::Label>> {
        let mut v = Vec::new();
        for d in 0..=max_degree {
            v.extend(op.basis(n, d)?);
        }
        Ok(v)
    };
    let small: Vec<O::Label> = (1..=2).map(elems).collect::<Result<Vec<_>>>()?.concat();
    let one = Rational::one();
    let unit = op.unit();
    let eq = |a: &Lin<O::Label>, b: &Lin<O::Label>| -> bool {
        let mut diff = a.clone();
        diff.extend(b.iter().map(|(x, c)| (x.clone(), -*c)));
        crate::dgmod::lin_is_zero(&normalize_lin(diff), field)
    };
    for n in 1..=max_arity {
        for c in elems(n)? {
            let cd = op.degree(&c);
            // unit
            if !eq(&op.compose(&unit, std::slice::from_ref(&c))?, &vec![(c.clone(), one)])
                || !eq(&op.compose(&c, &vec![unit.clone(); n])?, &vec![(c.clone(), one)])
            {
                bad.push(format!("{}: unit on {:?}", op.name(), c));
            }
            // input tuples: all tuples of small elements, capped
            let tuples: Vec<Vec<O::Label>> = (0..n).map(|_| small.iter().cloned()).multi_cartesian_product().take(64).collect();
            for ds in &tuples {
                let degs: Vec<i64> = ds.iter().map(|d| op.degree(d)).collect();
                let sizes: Vec<usize> = ds.iter().map(|d| op.arity(d)).collect();
                let g = op.compose(&c, ds)?;
                // Leibniz: d γ(c; ds) = γ(dc; ds) + Σ ± γ(c; .., d d_i, ..)
                let mut rhs = Vec::new();
                for (dc, k) in op.differential(&c) {
                    rhs.extend(op.compose(&dc, ds)?.into_iter().map(|(y, a)| (y, a * k)));
                }
                let mut before = cd;
                for i in 0..n {
                    for (di, k) in op.differential(&ds[i]) {
                        let mut e = ds.clone();
                        e[i] = di;
                        rhs.extend(op.compose(&c, &e)?.into_iter().map(|(y, a)| (y, a * k * sign(before))));
                    }
                    before += degs[i];
                }
                let mut lhs = Vec::new();
                for (y, a) in &g {
                    lhs.extend(op.differential(y).into_iter().map(|(z, b)| (z, b * *a)));
                }
                if !eq(&normalize_lin(lhs), &normalize_lin(rhs)) {
                    bad.push(format!("{}: Leibniz on {:?}; {:?}", op.name(), c, ds));
                }
                for sigma in permutations(n) {
                    // γ(c·σ; ds) = ± γ(c; d_{σ⁻¹}) · σ(k)
                    let sinv = inverse(&sigma);
                    let permuted: Vec<O::Label> = (0..n).map(|j| ds[sinv[j] as usize].clone()).collect();
                    let s = koszul_of_permutation(&degs, &sinv);
                    let lhs = op.compose(&op.act(&c, &sigma), ds)?;
                    let rhs = act_lin(op, &op.compose(&c, &permuted)?, &block_permutation(&sigma, &sizes));
                    if !eq(&lhs, &lin_scale_by(&rhs, sign(s))) {
                        bad.push(format!("{}: equivariance in c on {:?}", op.name(), c));
                    }
                }
                // γ(c; d_i τ_i) = γ(c; d)·(⊕τ_i)
                let taus: Vec<Perm> = sizes.iter().map(|&k| (0..k as u8).rev().collect()).collect();
                let twisted: Vec<O::Label> = ds.iter().zip(&taus).map(|(d, t)| op.act(d, t)).collect();
                let ts: Vec<&[u8]> = taus.iter().map(Vec::as_slice).collect();
                if !eq(&op.compose(&c, &twisted)?, &act_lin(op, &g, &direct_sum(&ts))) {
                    bad.push(format!("{}: equivariance in the inputs on {:?}", op.name(), c));
                }
                // associativity with unit-or-small third layer: γ(γ(c; ds); es) = ± γ(c; γ(d_i; es_i))
                let total: usize = sizes.iter().sum();
                if total <= 3 {
                    let es: Vec<O::Label> = (0..total).map(|i| small[(i * 7 + n) % small.len()].clone()).collect();
                    let lhs = compose_lin(op, &g, &es.iter().map(|e| vec![(e.clone(), one)]).collect::<Vec<_>>())?;
                    let mut inner = Vec::new();
                    let mut off = 0;
                    let mut koszul = 0i64;
                    let edeg: Vec<i64> = es.iter().map(|e| op.degree(e)).collect();
                    for i in 0..n {
                        let block = &es[off..off + sizes[i]];
                        // moving the e's of this block past d_{i+1}..d_n
                        let later: i64 = degs[i + 1..].iter().sum();
                        koszul += later * edeg[off..off + sizes[i]].iter().sum::<i64>();
                        inner.push(op.compose(&ds[i], block)?);
                        off += sizes[i];
                    }
                    let rhs = compose_lin(op, &vec![(c.clone(), one)], &inner)?;
                    if !eq(&lhs, &lin_scale_by(&rhs, sign(koszul))) {
                        bad.push(format!("{}: associativity on {:?}; {:?}; {:?}", op.name(), c, ds, es));
                    }
                }
            }
        }
    }
    Ok(bad)
}

fn lin_scale_by<L: Label>(v: &Lin<L>, s: Rational) -> Lin<L> {
    v.iter().map(|(x, c)| (x.clone(), *c * s)).collect()
}

/// Koszul sign of reordering `x_1..x_n` (degrees `degs`) as
/// `x_{p(1)}..x_{p(n)}`.
pub fn koszul_of_permutation(degs: &[i64], p: &[u8]) -> i64 {
    let mut e = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                e += degs[p[i] as usize] * degs[p[j] as usize];
            }
        }
    }
    e
}

/// A morphism of operads given on basis elements.
pub trait OperadMap<S: Operad, T: Operad> {
    fn apply(&self, x: &S::Label) -> Lin<T::Label>;
}

/// `Ass -> Com`.
pub struct AssToCom;
impl OperadMap<Ass, Com> for AssToCom {
    fn apply(&self, x: &Perm) -> Lin<usize> {
        vec![(x.len(), Rational::one())]
    }
}

/// `Ass -> E`: `Σ_n` as the vertices of `EΣ_n`.
pub struct AssToE;
impl OperadMap<Ass, BarrattEccles> for AssToE {
    fn apply(&self, x: &Perm) -> Lin<Vec<Perm>> {
        vec![(vec![x.clone()], Rational::one())]
    }
}

/// `ε̄ : E -> Com`.
pub struct EToCom;
impl OperadMap<BarrattEccles, Com> for EToCom {
    fn apply(&self, x: &Vec<Perm>) -> Lin<usize> {
        if x.len() == 1 {
            vec![(x[0].len(), Rational::one())]
        } else {
            Vec::new()
        }
    }
}

fn map_lin<S: Operad, T: Operad, F: OperadMap<S, T>>(f: &F, v: &Lin<S::Label>) -> Lin<T::Label> {
    let mut out = Vec::new();
    for (x, c) in v {
        out.extend(f.apply(x).into_iter().map(|(y, k)| (y, k * *c)));
    }
    normalize_lin(out)
}

/// Checks that `f` is a chain map commuting with the action and with
/// composition on basis elements of arity `≤ max_arity`, degree `≤ max_degree`.
pub fn check_operad_map<S: Operad, T: Operad, F: OperadMap<S, T>>(
    s: &S,
    t: &T,
    f: &F,
    max_arity: usize,
    max_degree: i64,
) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let elems = |n: usize| -> Result<Vec<S::Label>> {
        let mut v = Vec::new();
        for d in 0..=max_degree {
            v.extend(s.basis(n, d)?);
        }
        Ok(v)
    };
    let small: Vec<S::Label> = (1..=2).map(elems).collect::<Result<Vec<_>>>()?.concat();
    for n in 1..=max_arity {
        for x in elems(n)? {
            let fx = f.apply(&x);
            let mut dfx = Vec::new();
            for (y, c) in &fx {
                dfx.extend(t.differential(y).into_iter().map(|(z, k)| (z, k * *c)));
            }
            if normalize_lin(dfx) != map_lin(f, &s.differential(&x)) {
                bad.push(format!("{} -> {}: differential on {:?}", s.name(), t.name(), x));
            }
            for sigma in permutations(n) {
                if map_lin(f, &vec![(s.act(&x, &sigma), Rational::one())]) != act_lin(t, &fx, &sigma) {
                    bad.push(format!("{} -> {}: action on {:?}", s.name(), t.name(), x));
                }
            }
            for ds in (0..n).map(|_| small.iter().cloned()).multi_cartesian_product().take(32) {
                let lhs = map_lin(f, &s.compose(&x, &ds)?);
                let ins: Vec<Lin<T::Label>> = ds.iter().map(|d| f.apply(d)).collect();
                let rhs = compose_lin(t, &fx, &ins)?;
                if lhs != rhs {
                    bad.push(format!("{} -> {}: composition on {:?}", s.name(), t.name(), x));
                }
            }
        }
    }
    Ok(bad)
}

/// How a degree of `E(n)` was shown acyclic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcyclicityMethod {
    /// Homology computed from ranks.
    Rank,
    /// `dh + hd = id` for the cone contraction `h = (e, -)`, checked on one
    /// representative of every orbit of relabelings of `Σ_n` fixing `e`.
    Contraction,
}

#[derive(Clone, Debug)]
pub struct AcyclicityRow {
    pub arity: usize,
    pub degree: usize,
    pub dimension: u128,
    pub method: AcyclicityMethod,
    /// Homology dimension for `Rank`; `Some(0)` when the contraction checks.
    pub homology: Option<usize>,
    /// Representatives checked for `Contraction`.
    pub representatives: usize,
}

impl AcyclicityRow {
    pub fn acyclic(&self) -> bool {
        self.homology == Some(0)
    }
}

/// Shows `H_d(E(n)) = 0` for each `d` in `degrees` (`d ≥ 1`). Uses ranks when
/// the complex around `d` has at most `rank_limit` basis elements, the
/// contraction otherwise.
pub fn barratt_eccles_acyclicity(n: usize, degrees: std::ops::RangeInclusive<usize>, rank_limit: usize, field: Field) -> Result<Vec<AcyclicityRow>> {
    let op = BarrattEccles::new(rank_limit);
    let mut out = Vec::new();
    for d in degrees {
        if d == 0 {
            return Err(Error::InvalidBounds("acyclicity is about degrees ≥ 1".into()));
        }
        let dimension = BarrattEccles::dimension(n, d);
        let fits = BarrattEccles::dimension(n, d + 1) + dimension <= rank_limit as u128;
        if fits {
            let m = arity_module(&op, n, d as i64 + 1)?;
            out.push(AcyclicityRow { arity: n, degree: d, dimension, method: AcyclicityMethod::Rank, homology: Some(m.homology_dim(d as i64, field)?), representatives: 0 });
        } else {
            let (ok, reps) = contraction_certificate(n, d);
            out.push(AcyclicityRow {
                arity: n,
                degree: d,
                dimension,
                method: AcyclicityMethod::Contraction,
                homology: if ok { Some(0) } else { None },
                representatives: reps,
            });
        }
    }
    Ok(out)
}

/// Equality patterns of `(d+1)`-tuples: entry 0 stands for `e`, other classes
/// are numbered by first occurrence; neighbours differ and at most `classes`
/// non-`e` values occur.
fn patterns(len: usize, classes: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(len: usize, classes: usize, cur: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in 0..=(used + 1).min(classes) {
            if cur.last() == Some(&v) {
                continue;
            }
            cur.push(v);
            rec(len, classes, cur, used.max(v), out);
            cur.pop();
        }
    }
    rec(len, classes, &mut Vec::new(), 0, &mut out);
    out
}

/// Checks `dh + hd = id` on a representative of every relabeling orbit of
/// degree-`d` tuples. `d`, `h` and `id` commute with bijections of `Σ_n`
/// fixing `e`, so this proves the identity in degree `d`.
pub fn contraction_certificate(n: usize, d: usize) -> (bool, usize) {
    let perms = permutations(n);
    let e = identity(n);
    let non_e: Vec<&Perm> = perms.iter().filter(|p| **p != e).collect();
    let h = |x: &Vec<Perm>| -> Lin<Vec<Perm>> {
        if x[0] == e {
            Vec::new()
        } else {
            let mut y = vec![e.clone()];
            y.extend(x.iter().cloned());
            vec![(y, Rational::one())]
        }
    };
    let dl = |v: &Lin<Vec<Perm>>| -> Lin<Vec<Perm>> {
        let mut out = Vec::new();
        for (x, c) in v {
            if x.len() > 1 {
                out.extend(faces(x).into_iter().map(|(y, k)| (y, k * *c)));
            }
        }
        normalize_lin(out)
    };
    let hl = |v: &Lin<Vec<Perm>>| -> Lin<Vec<Perm>> {
        let mut out = Vec::new();
        for (x, c) in v {
            out.extend(h(x).into_iter().map(|(y, k)| (y, k * *c)));
        }
        normalize_lin(out)
    };
    let pats = patterns(d + 1, non_e.len());
    let ok = pats.iter().all(|p| {
        let x: Vec<Perm> = p.iter().map(|&c| if c == 0 { e.clone() } else { non_e[c - 1].clone() }).collect();
        let v = vec![(x, Rational::one())];
        let mut sum = dl(&hl(&v));
        sum.extend(hl(&dl(&v)));
        normalize_lin(sum) == v
    });
    (ok, pats.len())
}

/// `Σ_n`-freeness of `E(n)_d`: counts orbits on the basis when it has at most
/// `limit` elements. Otherwise uses that `x·σ = x` forces `w_0 σ = w_0`,
/// checking that right multiplication on `Σ_n` has trivial stabilizers.
/// Returns `(free, orbits or None)`.
pub fn sigma_free(n: usize, d: usize, limit: usize) -> Result<(bool, Option<u128>)> {
    let perms = permutations(n);
    if BarrattEccles::dimension(n, d) <= limit as u128 {
        let op = BarrattEccles::new(limit);
        let basis = op.basis(n, d as i64)?;
        let mut seen: HashMap<Vec<Perm>, usize> = HashMap::new();
        let mut orbits = 0u128;
        let mut free = true;
        for x in &basis {
            if seen.contains_key(x) {
                continue;
            }
            let orbit: BTreeSet<Vec<Perm>> = perms.iter().map(|s| op.act(x, s)).collect();
            free &= orbit.len() == perms.len();
            for y in orbit {
                seen.insert(y, 0);
            }
            orbits += 1;
        }
        Ok((free && orbits == BarrattEccles::coinvariant_dimension(n, d), Some(orbits)))
    } else {
        let e = identity(n);
        let free = perms.iter().all(|w| perms.iter().all(|s| *s == e || compose_perm(w, s) != *w));
        Ok((free, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    #[test]
    fn permutation_helpers() {
        let s = vec![1, 2, 0];
        assert_eq!(compose_perm(&s, &inverse(&s)), identity(3));
        assert_eq!(block_permutation(&[1, 0], &[2, 1]), vec![1, 2, 0]);
        assert_eq!(direct_sum(&[&[1, 0], &[0]]), vec![1, 0, 2]);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn ass_and_com_are_operads() {
        assert!(check_operad(&Ass, 3, 0, Q).unwrap().is_empty());
        assert!(check_operad(&Com, 3, 0, Q).unwrap().is_empty());
        assert!(check_operad_map(&Ass, &Com, &AssToCom, 3, 0).unwrap().is_empty());
    }

    #[test]
    fn barratt_eccles_dimensions() {
        let op = BarrattEccles::new(10_000);
        for (n, d) in [(2, 3), (3, 2), (4, 1)] {
            assert_eq!(op.basis(n, d).unwrap().len() as u128, BarrattEccles::dimension(n, d as usize));
        }
        assert!(matches!(op.basis(4, 3), Err(Error::SizeLimitExceeded { .. })));
        let m = arity_module(&op, 3, 3).unwrap();
        assert!(m.check_dsquare(Q).is_ok());
        assert_eq!(m.homology_dim(0, Q).unwrap(), 1);
    }

    #[test]
    fn barratt_eccles_is_an_operad() {
        let op = BarrattEccles::new(10_000);
        assert!(check_operad(&op, 3, 1, Q).unwrap().is_empty());
        assert!(check_operad_map(&Ass, &op, &AssToE, 3, 0).unwrap().is_empty());
        assert!(check_operad_map(&op, &Com, &EToCom, 3, 1).unwrap().is_empty());
    }

    #[test]
    fn multi_shuffle_counts() {
        assert_eq!(multi_shuffles(&[1, 1]).len(), 2);
        assert_eq!(multi_shuffles(&[2, 1, 1]).len(), 12);
        let signs: i64 = multi_shuffles(&[1, 1]).iter().map(|(s, _)| if s % 2 == 0 { 1 } else { -1 }).sum();
        assert_eq!(signs, 0);
    }

    #[test]
    fn rank_and_contraction_agree() {
        for n in 2..=3 {
            for row in barratt_eccles_acyclicity(n, 1..=3, 100_000, Q).unwrap() {
                assert_eq!(row.method, AcyclicityMethod::Rank);
                assert!(row.acyclic());
                assert!(contraction_certificate(n, row.degree).0);
            }
        }
    }

    #[test]
    fn pattern_enumeration() {
        // patterns with a repeated neighbour are excluded, so the count is exact
        assert_eq!(patterns(3, 1), vec![vec![0, 1, 0], vec![1, 0, 1]]);
        assert_eq!(patterns(2, 5).len(), 3);
    }

    #[test]
    fn freeness() {
        assert_eq!(sigma_free(3, 2, 10_000).unwrap(), (true, Some(25)));
        assert_eq!(sigma_free(4, 8, 10_000).unwrap(), (true, None));
    }
}
