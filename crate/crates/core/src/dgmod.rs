//! Graded and differential graded modules of finite type.
//!
//! Grading is homological: differentials lower degree by one. Cochain
//! complexes are stored with cochain degree `q` in homological degree `-q`.
//! Basis elements carry structured labels so that maps given by formulas on
//! generators can be evaluated directly.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::RangeInclusive;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{self, sign, Field, Rational, SparseMatrix};

/// Requirements on basis labels.
pub trait Label: Clone + Ord + Hash + Debug + Send + Sync + 'static {}
impl<T: Clone + Ord + Hash + Debug + Send + Sync + 'static> Label for T {}

/// A finite linear combination of labels.
pub type Lin<L> = Vec<(L, Rational)>;

/// Sorts, merges equal labels and drops zero coefficients.
pub fn normalize_lin<L: Ord>(mut v: Lin<L>) -> Lin<L> {
    v.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Lin<L> = Vec::with_capacity(v.len());
    for (l, c) in v {
        match out.last_mut() {
            Some((ll, lc)) if *ll == l => *lc += c,
            _ => out.push((l, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// `a + s * b`, normalized.
pub fn lin_axpy<L: Ord + Clone>(a: &Lin<L>, s: Rational, b: &Lin<L>) -> Lin<L> {
    let mut v = a.clone();
    v.extend(b.iter().map(|(l, c)| (l.clone(), *c * s)));
    normalize_lin(v)
}

pub fn lin_scale<L: Clone>(v: &Lin<L>, s: Rational) -> Lin<L> {
    if s.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(l, c)| (l.clone(), *c * s)).collect()
}

/// Whether a normalized combination vanishes over `field`.
pub fn lin_is_zero<L>(v: &Lin<L>, field: Field) -> bool {
    v.iter().all(|(_, c)| field.is_zero(c))
}

/// A graded module with an ordered basis in each stored degree.
///
/// The set of stored degrees matters: a degree that is stored but has no
/// labels is a genuine zero, while an unstored degree is outside the window
/// the module was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule<L: Label> {
    basis: BTreeMap<i64, Vec<L>>,
    index: HashMap<L, (i64, usize)>,
}

impl<L: Label> Default for GradedModule<L> {
    fn default() -> Self {
        GradedModule { basis: BTreeMap::new(), index: HashMap::new() }
    }
}

impl<L: Label> GradedModule<L> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a module from per-degree label lists. Labels must be unique.
    pub fn from_basis(basis: BTreeMap<i64, Vec<L>>) -> Result<Self> {
        let mut m = Self::new();
        for (d, labels) in basis {
            m.set_degree(d, labels)?;
        }
        Ok(m)
    }

    pub fn set_degree(&mut self, degree: i64, labels: Vec<L>) -> Result<()> {
        if let Some(old) = self.basis.remove(&degree) {
            for l in old {
                self.index.remove(&l);
            }
        }
        for (i, l) in labels.iter().enumerate() {
            if self.index.insert(l.clone(), (degree, i)).is_some() {
                return Err(Error::Unsupported(format!("duplicate basis label {l:?}")));
            }
        }
        self.basis.insert(degree, labels);
        Ok(())
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.basis.get(&degree).map_or(0, Vec::len)
    }

    pub fn basis(&self, degree: i64) -> &[L] {
        self.basis.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn has_degree(&self, degree: i64) -> bool {
        self.basis.contains_key(&degree)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.basis.keys().copied()
    }

    /// Smallest and largest stored degree.
    pub fn degree_range(&self) -> Option<RangeInclusive<i64>> {
        let lo = *self.basis.keys().next()?;
        let hi = *self.basis.keys().next_back()?;
        Some(lo..=hi)
    }

    pub fn position(&self, l: &L) -> Option<(i64, usize)> {
        self.index.get(l).copied()
    }

    pub fn total_dim(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Coordinates of a combination of degree-`degree` labels.
    pub fn coords(&self, degree: i64, v: &Lin<L>) -> Result<Vec<(usize, Rational)>> {
        v.iter()
            .map(|(l, c)| match self.index.get(l) {
                Some(&(d, i)) if d == degree => Ok((i, *c)),
                _ => Err(Error::LabelOutOfBasis { label: format!("{l:?}"), degree }),
            })
            .collect()
    }

    /// Matrix from degree `from` to degree `to` of this or another module,
    /// column `j` being `f(basis(from)[j])`. Images in an unstored target
    /// degree are dropped.
    fn matrix_to<M: Label>(
        &self,
        from: i64,
        target: &GradedModule<M>,
        to: i64,
        f: &mut dyn FnMut(&L) -> Result<Lin<M>>,
    ) -> Result<SparseMatrix> {
        let src = self.basis(from);
        if !target.has_degree(to) {
            return Ok(SparseMatrix::zeros(0, src.len()));
        }
        let mut cols = Vec::with_capacity(src.len());
        for l in src {
            let img = normalize_lin(f(l)?);
            cols.push(target.coords(to, &img)?);
        }
        Ok(SparseMatrix::from_columns(target.dim(to), cols))
    }

    /// Relabels the basis through an injective map.
    pub fn map_labels<M: Label>(&self, f: impl Fn(&L) -> M) -> Result<GradedModule<M>> {
        let basis = self.basis.iter().map(|(d, ls)| (*d, ls.iter().map(&f).collect())).collect();
        GradedModule::from_basis(basis)
    }

    /// Keeps only the degrees in `range`.
    pub fn restrict(&self, range: RangeInclusive<i64>) -> Self {
        let basis = self.basis.range(range).map(|(d, ls)| (*d, ls.clone())).collect();
        GradedModule::from_basis(basis).expect("labels stay unique")
    }
}

/// One violation of `d∘d = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquareViolation {
    /// Degree of the source of `d_{n-1} ∘ d_n`.
    pub degree: i64,
    pub nonzero_entries: usize,
}

/// Homology in one degree.
#[derive(Clone, Debug)]
pub struct HomologyGroup<L> {
    pub dim: usize,
    /// Cycles whose classes form a basis.
    pub representatives: Vec<Vec<(L, BigRational)>>,
}

/// A differential graded module: a graded module with `d_n : M_n -> M_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGModule<L: Label> {
    module: GradedModule<L>,
    diff: BTreeMap<i64, SparseMatrix>,
}

impl<L: Label> DGModule<L> {
    /// Module with zero differential.
    pub fn zero_differential(module: GradedModule<L>) -> Self {
        DGModule { module, diff: BTreeMap::new() }
    }

    /// Builds the differential from its value on basis labels. Images landing
    /// in an unstored degree are dropped.
    pub fn from_fn(module: GradedModule<L>, mut d: impl FnMut(&L) -> Lin<L>) -> Result<Self> {
        Self::try_from_fn(module, |l| Ok(d(l)))
    }

    pub fn try_from_fn(
        module: GradedModule<L>,
        mut d: impl FnMut(&L) -> Result<Lin<L>>,
    ) -> Result<Self> {
        let mut diff = BTreeMap::new();
        let degrees: Vec<i64> = module.degrees().collect();
        for n in degrees {
            let m = module.matrix_to(n, &module, n - 1, &mut d)?;
            if !m.is_zero() {
                diff.insert(n, m);
            }
        }
        Ok(DGModule { module, diff })
    }

    /// Builds from explicit matrices `d_n`; shapes are checked.
    pub fn from_parts(module: GradedModule<L>, diff: BTreeMap<i64, SparseMatrix>) -> Result<Self> {
        for (n, m) in &diff {
            if m.cols() != module.dim(*n) || m.rows() != module.dim(n - 1) {
                return Err(Error::Shape(format!(
                    "d_{n} is {}x{}, basis sizes are {} -> {}",
                    m.rows(),
                    m.cols(),
                    module.dim(*n),
                    module.dim(n - 1)
                )));
            }
        }
        let diff = diff.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(DGModule { module, diff })
    }

    pub fn module(&self) -> &GradedModule<L> {
        &self.module
    }

    pub fn dim(&self, n: i64) -> usize {
        self.module.dim(n)
    }

    pub fn basis(&self, n: i64) -> &[L] {
        self.module.basis(n)
    }

    /// `d_n : M_n -> M_{n-1}`.
    pub fn differential(&self, n: i64) -> SparseMatrix {
        self.diff
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zeros(self.dim(n - 1), self.dim(n)))
    }

    pub fn differential_ref(&self, n: i64) -> Option<&SparseMatrix> {
        self.diff.get(&n)
    }

    /// Replaces `d_n`; used by fault-injection tests.
    pub fn set_differential(&mut self, n: i64, m: SparseMatrix) -> Result<()> {
        if m.cols() != self.dim(n) || m.rows() != self.dim(n - 1) {
            return Err(Error::Shape(format!("d_{n} has the wrong shape")));
        }
        self.diff.insert(n, m);
        Ok(())
    }

    /// `d` applied to a combination of labels (all of one degree).
    pub fn apply_d(&self, v: &Lin<L>) -> Lin<L> {
        let mut out = Vec::new();
        for (l, c) in v {
            let Some((n, i)) = self.module.position(l) else { continue };
            if let Some(m) = self.diff.get(&n) {
                let target = self.module.basis(n - 1);
                out.extend(m.column(i).iter().map(|(r, v)| (target[*r].clone(), *v * *c)));
            }
        }
        normalize_lin(out)
    }

    /// Checks `d_{n-1} ∘ d_n = 0` for `n` in `range`, over `field`.
    pub fn verify_dsquare(&self, range: RangeInclusive<i64>, field: Field) -> Vec<DSquareViolation> {
        let mut out = Vec::new();
        for n in range {
            let (Some(a), Some(b)) = (self.diff.get(&n), self.diff.get(&(n - 1))) else {
                continue;
            };
            let comp = b.mul(a).expect("shapes agree");
            let bad = comp.nonzero_over(field);
            if bad > 0 {
                out.push(DSquareViolation { degree: n, nonzero_entries: bad });
            }
        }
        out
    }

    /// Checks `d∘d = 0` over all stored degrees.
    pub fn check_dsquare(&self, field: Field) -> Result<()> {
        let Some(r) = self.module.degree_range() else { return Ok(()) };
        match self.verify_dsquare(*r.start()..=*r.end() + 1, field).first() {
            None => Ok(()),
            Some(v) => Err(Error::CompositionNotZero {
                degree: Some(v.degree),
                entries: v.nonzero_entries,
            }),
        }
    }

    /// Homology dimension in degree `n`.
    pub fn homology_dim(&self, n: i64, field: Field) -> Result<usize> {
        exactlin::homology_dim(&self.differential(n + 1), &self.differential(n), field).map_err(
            |e| match e {
                Error::CompositionNotZero { entries, .. } => {
                    Error::CompositionNotZero { degree: Some(n + 1), entries }
                }
                e => e,
            },
        )
    }

    /// Homology dimensions over a degree range.
    pub fn homology_dims(&self, range: RangeInclusive<i64>, field: Field) -> Result<BTreeMap<i64, usize>> {
        let degrees: Vec<i64> = range.collect();
        let dims: Vec<Result<usize>> = {
            use rayon::prelude::*;
            degrees.par_iter().map(|&n| self.homology_dim(n, field)).collect()
        };
        degrees.into_iter().zip(dims).map(|(n, d)| Ok((n, d?))).collect()
    }

    /// Homology with representative cycles.
    pub fn homology(
        &self,
        range: RangeInclusive<i64>,
        field: Field,
    ) -> Result<BTreeMap<i64, HomologyGroup<L>>> {
        let mut out = BTreeMap::new();
        for n in range {
            let d_in = self.differential(n + 1);
            let d_out = self.differential(n);
            let dim = self.homology_dim(n, field)?;
            let cycles = exactlin::kernel_basis(&d_out, field);
            let chosen = exactlin::independent_modulo(&d_in, &cycles, field);
            debug_assert_eq!(chosen.len(), dim);
            let basis = self.module.basis(n);
            let representatives = chosen
                .into_iter()
                .map(|k| cycles[k].iter().map(|(i, c)| (basis[*i].clone(), c.clone())).collect())
                .collect();
            out.insert(n, HomologyGroup { dim, representatives });
        }
        Ok(out)
    }

    /// Suspension: degree `n` of the result is degree `n - shift` of `self`,
    /// and the differential is multiplied by `(-1)^shift`.
    pub fn suspend(&self, shift: i64) -> DGModule<L> {
        let basis = self.module.basis.iter().map(|(d, ls)| (d + shift, ls.clone())).collect();
        let module = GradedModule::from_basis(basis).expect("labels stay unique");
        let s = sign(shift);
        let diff = self.diff.iter().map(|(n, m)| (n + shift, m.scale(s))).collect();
        DGModule { module, diff }
    }

    pub fn map_labels<M: Label>(&self, f: impl Fn(&L) -> M) -> Result<DGModule<M>> {
        Ok(DGModule { module: self.module.map_labels(f)?, diff: self.diff.clone() })
    }

    /// Keeps the degrees in `range`; differentials out of the range are cut.
    pub fn restrict(&self, range: RangeInclusive<i64>) -> DGModule<L> {
        let module = self.module.restrict(range.clone());
        let lo = *range.start();
        let diff = self
            .diff
            .range(lo + 1..=*range.end())
            .map(|(n, m)| (*n, m.clone()))
            .collect();
        DGModule { module, diff }
    }
}

/// Tensor product with the Koszul sign `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
pub fn tensor<A: Label, B: Label>(a: &DGModule<A>, b: &DGModule<B>) -> DGModule<(A, B)> {
    let mut basis: BTreeMap<i64, Vec<(A, B)>> = BTreeMap::new();
    let mut deg_of: HashMap<(A, B), (i64, i64)> = HashMap::new();
    for i in a.module.degrees() {
        for j in b.module.degrees() {
            let e = basis.entry(i + j).or_default();
            for x in a.basis(i) {
                for y in b.basis(j) {
                    e.push((x.clone(), y.clone()));
                    deg_of.insert((x.clone(), y.clone()), (i, j));
                }
            }
        }
    }
    let module = GradedModule::from_basis(basis).expect("pairs are unique");
    DGModule::from_fn(module, |(x, y)| {
        let (i, _) = deg_of[&(x.clone(), y.clone())];
        let mut out: Lin<(A, B)> = Vec::new();
        for (dx, c) in a.apply_d(&vec![(x.clone(), Rational::one())]) {
            out.push(((dx, y.clone()), c));
        }
        let s = sign(i);
        for (dy, c) in b.apply_d(&vec![(y.clone(), Rational::one())]) {
            out.push(((x.clone(), dy), c * s));
        }
        out
    })
    .expect("tensor differential stays in the basis")
}

/// The ground field in degree 0, with label `()`.
pub fn unit_module() -> DGModule<()> {
    let mut m = GradedModule::new();
    m.set_degree(0, vec![()]).expect("single label");
    DGModule::zero_differential(m)
}

/// A chain map of degree `shift`: `f_n : S_n -> T_{n+shift}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub shift: i64,
    maps: BTreeMap<i64, SparseMatrix>,
}

impl ChainMap {
    pub fn from_fn<S: Label, T: Label>(
        source: &DGModule<S>,
        target: &DGModule<T>,
        shift: i64,
        mut f: impl FnMut(&S) -> Lin<T>,
    ) -> Result<Self> {
        Self::try_from_fn(source, target, shift, |l| Ok(f(l)))
    }

    pub fn try_from_fn<S: Label, T: Label>(
        source: &DGModule<S>,
        target: &DGModule<T>,
        shift: i64,
        mut f: impl FnMut(&S) -> Result<Lin<T>>,
    ) -> Result<Self> {
        let mut maps = BTreeMap::new();
        for n in source.module.degrees() {
            let m = source.module.matrix_to(n, &target.module, n + shift, &mut f)?;
            maps.insert(n, m);
        }
        Ok(ChainMap { shift, maps })
    }

    pub fn from_matrices(shift: i64, maps: BTreeMap<i64, SparseMatrix>) -> Self {
        ChainMap { shift, maps }
    }

    pub fn identity<L: Label>(m: &DGModule<L>) -> Self {
        let maps = m.module.degrees().map(|n| (n, SparseMatrix::identity(m.dim(n)))).collect();
        ChainMap { shift: 0, maps }
    }

    /// Matrix in source degree `n`, if that degree was built.
    pub fn matrix(&self, n: i64) -> Option<&SparseMatrix> {
        self.maps.get(&n)
    }

    pub fn set_matrix(&mut self, n: i64, m: SparseMatrix) {
        self.maps.insert(n, m);
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.maps.keys().copied()
    }

    /// Matrix in source degree `n`, zero when absent.
    pub fn matrix_or_zero<S: Label, T: Label>(
        &self,
        n: i64,
        source: &DGModule<S>,
        target: &DGModule<T>,
    ) -> SparseMatrix {
        match self.maps.get(&n) {
            Some(m) if m.rows() == target.dim(n + self.shift) => m.clone(),
            _ => SparseMatrix::zeros(target.dim(n + self.shift), source.dim(n)),
        }
    }

    /// Applies the map to a combination of source labels.
    pub fn apply<S: Label, T: Label>(
        &self,
        source: &DGModule<S>,
        target: &DGModule<T>,
        v: &Lin<S>,
    ) -> Lin<T> {
        let mut out = Vec::new();
        for (l, c) in v {
            let Some((n, i)) = source.module.position(l) else { continue };
            let Some(m) = self.maps.get(&n) else { continue };
            let tb = target.basis(n + self.shift);
            if tb.len() != m.rows() {
                continue;
            }
            out.extend(m.column(i).iter().map(|(r, v)| (tb[*r].clone(), *v * *c)));
        }
        normalize_lin(out)
    }

    /// `self ∘ other`.
    pub fn compose<A: Label, B: Label, C: Label>(
        &self,
        other: &ChainMap,
        a: &DGModule<A>,
        b: &DGModule<B>,
        c: &DGModule<C>,
    ) -> Result<ChainMap> {
        let mut maps = BTreeMap::new();
        for n in a.module.degrees() {
            let f = other.matrix_or_zero(n, a, b);
            let g = self.matrix_or_zero(n + other.shift, b, c);
            maps.insert(n, g.mul(&f)?);
        }
        Ok(ChainMap { shift: self.shift + other.shift, maps })
    }

    /// Degrees `n` (of the source) where `d f ≠ (-1)^shift f d` over `field`,
    /// restricted to `range`.
    pub fn verify<S: Label, T: Label>(
        &self,
        source: &DGModule<S>,
        target: &DGModule<T>,
        range: RangeInclusive<i64>,
        field: Field,
    ) -> Result<Vec<i64>> {
        let mut bad = Vec::new();
        let s = sign(self.shift);
        for n in range {
            if !self.maps.contains_key(&n) {
                continue;
            }
            let f_n = self.matrix_or_zero(n, source, target);
            let f_n1 = self.matrix_or_zero(n - 1, source, target);
            let lhs = target.differential(n + self.shift).mul(&f_n)?;
            let rhs = f_n1.mul(&source.differential(n))?.scale(s);
            let diff = lhs.add(&rhs.scale(-Rational::one()))?;
            if diff.nonzero_over(field) > 0 {
                bad.push(n);
            }
        }
        Ok(bad)
    }

    /// Tensor product of maps with the Koszul sign `(f⊗g)(x⊗y) = (-1)^{|g||x|} f x ⊗ g y`.
    pub fn tensor<A: Label, B: Label, C: Label, D: Label>(
        f: &ChainMap,
        g: &ChainMap,
        a: &DGModule<A>,
        b: &DGModule<B>,
        c: &DGModule<C>,
        d: &DGModule<D>,
        ab: &DGModule<(A, B)>,
        cd: &DGModule<(C, D)>,
    ) -> Result<ChainMap> {
        ChainMap::from_fn(ab, cd, f.shift + g.shift, |(x, y)| {
            let (dx, _) = a.module.position(x).expect("label of a");
            let fx = f.apply(a, c, &vec![(x.clone(), Rational::one())]);
            let gy = g.apply(b, d, &vec![(y.clone(), Rational::one())]);
            let s = sign(g.shift * dx);
            let mut out = Vec::new();
            for (u, cu) in &fx {
                for (v, cv) in &gy {
                    out.push(((u.clone(), v.clone()), *cu * *cv * s));
                }
            }
            out
        })
    }
}

/// Dimension of the image of a homology basis under a chain map, in degree `n`.
///
/// Equals `dim H_n(source)` exactly when the induced map is injective in that
/// degree; together with equal dimensions this certifies an isomorphism.
pub fn induced_rank<S: Label, T: Label>(
    f: &ChainMap,
    source: &DGModule<S>,
    target: &DGModule<T>,
    n: i64,
    field: Field,
) -> Result<usize> {
    let src_h = source.homology(n..=n, field)?;
    let reps = &src_h[&n].representatives;
    let m = f.matrix_or_zero(n, source, target);
    let images: Vec<Vec<(usize, BigRational)>> = reps
        .iter()
        .map(|r| {
            let coords: Vec<(usize, BigRational)> = r
                .iter()
                .map(|(l, c)| (source.module.position(l).expect("rep label").1, c.clone()))
                .collect::<Vec<_>>();
            let mut coords = coords;
            coords.sort_by_key(|(i, _)| *i);
            m.apply_big(&coords)
        })
        .collect();
    let boundaries = target.differential(n + f.shift + 1);
    Ok(exactlin::independent_modulo(&boundaries, &images, field).len())
}

/// Converts a combination with big coefficients into one with stored
/// coefficients.
pub fn lin_from_big<L: Clone>(v: &[(L, BigRational)]) -> Result<Lin<L>> {
    v.iter().map(|(l, c)| Ok((l.clone(), exactlin::to_small(c)?))).collect()
}

pub fn basis_vector<L>(l: L) -> Lin<L> {
    vec![(l, Rational::one())]
}

/// Coefficient of `l` in a normalized combination.
pub fn coefficient<L: Ord>(v: &Lin<L>, l: &L) -> Rational {
    v.binary_search_by(|(x, _)| x.cmp(l)).map_or(Rational::zero(), |k| v[k].1)
}

/// Unit big rational, used when lifting basis vectors.
pub fn big_one() -> BigRational {
    BigRational::one()
}
