//! Finite simplicial sets presented by their nondegenerate simplices.
//!
//! Every simplex is written uniquely as `s_η y` with `y` nondegenerate and
//! `η : [m] -> [k]` a monotone surjection, stored as its list of values.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use crate::dgmod::{DGModule, GradedModule, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Rational};

/// Default cap on the number of nondegenerate simplices in one dimension.
pub const DEFAULT_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "HOCHLOOP_CAP";

/// The cap in effect: `HOCHLOOP_CAP` if set and valid, else the default.
pub fn default_cap() -> usize {
    std::env::var(CAP_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// A simplex `s_η y`: `y` is the `index`-th nondegenerate simplex of
/// dimension `eta.last()`, and the simplex has dimension `eta.len() - 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    pub index: u32,
    pub eta: Vec<u8>,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, index: usize) -> Self {
        Simplex { index: index as u32, eta: (0..=dim as u8).collect() }
    }

    pub fn dim(&self) -> usize {
        self.eta.len() - 1
    }

    /// Dimension of the underlying nondegenerate simplex.
    pub fn nd_dim(&self) -> usize {
        *self.eta.last().expect("nonempty") as usize
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.dim() == self.nd_dim()
    }

    /// Positions `j` with `η(j) = η(j+1)`, as a bit mask.
    pub fn degeneracy_mask(&self) -> u64 {
        let mut m = 0u64;
        for j in 0..self.dim() {
            if self.eta[j] == self.eta[j + 1] {
                m |= 1 << j;
            }
        }
        m
    }

    /// `s_j`.
    pub fn degeneracy(&self, j: usize) -> Simplex {
        let mut eta = self.eta.clone();
        eta.insert(j, self.eta[j]);
        Simplex { index: self.index, eta }
    }

    /// Removes the duplicate at position `j+1`, undoing `s_j`.
    fn collapse(&self, j: usize) -> Simplex {
        debug_assert_eq!(self.eta[j], self.eta[j + 1]);
        let mut eta = self.eta.clone();
        eta.remove(j + 1);
        Simplex { index: self.index, eta }
    }
}

/// A finite simplicial set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSimplicialSet {
    names: Vec<Vec<String>>,
    /// `faces[n][k][i]` is `d_i` of the `k`-th nondegenerate `n`-simplex.
    faces: Vec<Vec<Vec<Simplex>>>,
}

impl FiniteSimplicialSet {
    /// Builds a simplicial set and checks the simplicial identities.
    pub fn new(names: Vec<Vec<String>>, faces: Vec<Vec<Vec<Simplex>>>) -> Result<Self> {
        if names.len() != faces.len() {
            return Err(Error::Shape("names and faces disagree on dimensions".into()));
        }
        for (n, fs) in faces.iter().enumerate() {
            if fs.len() != names[n].len() {
                return Err(Error::Shape(format!("dimension {n}: {} names, {} face lists", names[n].len(), fs.len())));
            }
            for f in fs {
                let expected = if n == 0 { 0 } else { n + 1 };
                if f.len() != expected || f.iter().any(|s| s.dim() + 1 != n) {
                    return Err(Error::Shape(format!("bad face list in dimension {n}")));
                }
                for s in f {
                    let k = s.nd_dim();
                    if k >= names.len() || s.index as usize >= names[k].len() {
                        return Err(Error::Shape(format!("face {s:?} refers to a missing simplex")));
                    }
                }
            }
        }
        let x = FiniteSimplicialSet { names, faces };
        if let Some(f) = x.check_identities().first() {
            return Err(Error::Unsupported(format!("simplicial identity fails: {f}")));
        }
        Ok(x)
    }

    pub fn point() -> Self {
        FiniteSimplicialSet { names: vec![vec!["*".into()]], faces: vec![vec![vec![]]] }
    }

    /// Top dimension with a nondegenerate simplex.
    pub fn dim(&self) -> usize {
        self.names.iter().rposition(|v| !v.is_empty()).unwrap_or(0)
    }

    pub fn count(&self, n: usize) -> usize {
        self.names.get(n).map_or(0, Vec::len)
    }

    pub fn name(&self, s: &Simplex) -> String {
        let base = &self.names[s.nd_dim()][s.index as usize];
        if s.is_nondegenerate() {
            base.clone()
        } else {
            format!("s{:?}{base}", s.eta)
        }
    }

    pub fn names(&self, n: usize) -> &[String] {
        self.names.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.names.iter().enumerate().map(|(n, v)| sign(n as i64).to_integer() * v.len() as i64).sum()
    }

    /// `d_i` of an arbitrary simplex.
    pub fn face(&self, s: &Simplex, i: usize) -> Simplex {
        let m = s.dim();
        assert!(m >= 1 && i <= m, "face d_{i} of a {m}-simplex");
        let v = s.eta[i];
        let dup = (i > 0 && s.eta[i - 1] == v) || (i < m && s.eta[i + 1] == v);
        let mut eta = s.eta.clone();
        eta.remove(i);
        if dup {
            return Simplex { index: s.index, eta };
        }
        // η∘δ_i misses v: factor through d_v of the nondegenerate simplex
        let inner: Vec<u8> = eta.iter().map(|&e| if e > v { e - 1 } else { e }).collect();
        let y = &self.faces[s.nd_dim()][s.index as usize][v as usize];
        Simplex { index: y.index, eta: inner.iter().map(|&e| y.eta[e as usize]).collect() }
    }

    /// All simplices of dimension `m`, degenerate ones included.
    pub fn simplices(&self, m: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for k in 0..=m.min(self.dim()) {
            for eta in surjections(m, k) {
                for idx in 0..self.count(k) {
                    out.push(Simplex { index: idx as u32, eta: eta.clone() });
                }
            }
        }
        out
    }

    /// Checks the simplicial identities on all simplices of dimension up to
    /// `dim + 2`.
    pub fn check_identities(&self) -> Vec<String> {
        let mut out = Vec::new();
        let top = self.dim() + 2;
        for m in 0..=top {
            for x in self.simplices(m) {
                if m >= 2 {
                    for j in 1..=m {
                        for i in 0..j {
                            if self.face(&self.face(&x, j), i) != self.face(&self.face(&x, i), j - 1) {
                                out.push(format!("d_{i} d_{j} = d_{} d_{i} on {}", j - 1, self.name(&x)));
                            }
                        }
                    }
                }
                for j in 0..=m {
                    let sx = x.degeneracy(j);
                    for i in 0..=m + 1 {
                        let lhs = self.face(&sx, i);
                        let ok = if i < j {
                            lhs == self.face(&x, i).degeneracy(j - 1)
                        } else if i == j || i == j + 1 {
                            lhs == x
                        } else {
                            lhs == self.face(&x, i - 1).degeneracy(j)
                        };
                        if !ok {
                            out.push(format!("d_{i} s_{j} on {}", self.name(&x)));
                        }
                    }
                }
            }
        }
        out
    }

    /// A simplicial set given by level sizes, faces and degeneracies on
    /// element indices, up to dimension `top`. Nondegenerate elements are
    /// detected as those outside the images of the degeneracies.
    pub fn from_levels(
        top: usize,
        size: impl Fn(usize) -> usize,
        face: impl Fn(usize, usize, usize) -> usize,
        degeneracy: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        // representation of every element as (nondegenerate index, η)
        let mut rep: Vec<Vec<Simplex>> = Vec::new();
        let mut nd_elements: Vec<Vec<usize>> = Vec::new();
        for n in 0..=top {
            let mut level: Vec<Option<Simplex>> = vec![None; size(n)];
            if n > 0 {
                for j in 0..n {
                    for y in 0..size(n - 1) {
                        let x = degeneracy(n - 1, j, y);
                        if level[x].is_none() {
                            level[x] = Some(rep[n - 1][y].degeneracy(j));
                        }
                    }
                }
            }
            let mut nds = Vec::new();
            for (x, slot) in level.iter_mut().enumerate() {
                if slot.is_none() {
                    *slot = Some(Simplex::nondegenerate(n, nds.len()));
                    nds.push(x);
                }
            }
            rep.push(level.into_iter().map(Option::unwrap).collect());
            nd_elements.push(nds);
        }
        let names = nd_elements
            .iter()
            .enumerate()
            .map(|(n, v)| v.iter().map(|x| format!("{x}/{n}")).collect())
            .collect();
        let faces = nd_elements
            .iter()
            .enumerate()
            .map(|(n, v)| {
                v.iter()
                    .map(|&x| if n == 0 { vec![] } else { (0..=n).map(|i| rep[n - 1][face(n, i, x)].clone()).collect() })
                    .collect()
            })
            .collect();
        let mut x = FiniteSimplicialSet::new(names, faces)?;
        while x.names.last().is_some_and(Vec::is_empty) && x.names.len() > 1 {
            x.names.pop();
            x.faces.pop();
        }
        Ok(x)
    }

    /// The simplicial circle `K`: `K(n) = Z/(n+1)`, with
    /// `d_i k = k` for `k ≤ i`, `k - 1` for `k > i` (`i < n`), `d_n k = k mod n`,
    /// and `s_j k = k` for `k ≤ j`, `k + 1` for `k > j`.
    pub fn circle() -> Self {
        Self::from_levels(
            6,
            |n| n + 1,
            |n, i, k| if i == n { k % n } else if k <= i { k } else { k - 1 },
            |_, j, k| if k <= j { k } else { k + 1 },
        )
        .expect("K satisfies the simplicial identities")
    }

    /// The simplicial complex spanned by facets over ordered vertices.
    pub fn from_facets<V: Ord + Clone + std::fmt::Display>(facets: &[Vec<V>]) -> Result<Self> {
        let mut simplices: BTreeMap<usize, BTreeSet<Vec<V>>> = BTreeMap::new();
        for f in facets {
            let mut f = f.clone();
            f.sort();
            if f.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Unsupported("facet with a repeated vertex".into()));
            }
            if f.is_empty() {
                continue;
            }
            for k in 1..=f.len() {
                for sub in f.iter().cloned().combinations(k) {
                    simplices.entry(k - 1).or_default().insert(sub);
                }
            }
        }
        let top = simplices.keys().next_back().copied().unwrap_or(0);
        let lists: Vec<Vec<Vec<V>>> = (0..=top).map(|n| simplices.get(&n).map_or(Vec::new(), |s| s.iter().cloned().collect())).collect();
        let index: Vec<HashMap<Vec<String>, usize>> = lists
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.iter().map(|v| v.to_string()).collect(), i)).collect())
            .collect();
        let names = lists.iter().map(|l| l.iter().map(|s| s.iter().join(" ")).collect()).collect();
        let faces = lists
            .iter()
            .enumerate()
            .map(|(n, l)| {
                l.iter()
                    .map(|s| {
                        if n == 0 {
                            return vec![];
                        }
                        (0..=n)
                            .map(|i| {
                                let mut t: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                                t.remove(i);
                                Simplex::nondegenerate(n - 1, index[n - 1][&t])
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FiniteSimplicialSet::new(names, faces)
    }

    /// The boundary of the `(n+1)`-simplex, a simplicial `n`-sphere.
    pub fn boundary_of_simplex(n: usize) -> Self {
        let facets: Vec<Vec<usize>> = (0..=n + 1).map(|skip| (0..=n + 1).filter(|&v| v != skip).collect()).collect();
        Self::from_facets(&facets).expect("valid facets")
    }

    /// `Δ^n / ∂Δ^n`: one vertex and one `n`-simplex (`n ≥ 1`).
    pub fn minimal_sphere(n: usize) -> Self {
        assert!(n >= 1);
        let mut names = vec![vec!["*".to_string()]];
        let mut faces = vec![vec![vec![]]];
        for _ in 1..n {
            names.push(vec![]);
            faces.push(vec![]);
        }
        names.push(vec![format!("e{n}")]);
        let base = Simplex { index: 0, eta: vec![0; n] };
        faces.push(vec![vec![base; n + 1]]);
        FiniteSimplicialSet::new(names, faces).expect("valid sphere")
    }

    /// Nondegenerate `m`-simplices of `X_1 × … × X_k` as coordinate tuples,
    /// in lexicographic order. Fails when the count exceeds `cap`.
    pub fn product_simplices(factors: &[&FiniteSimplicialSet], m: usize, cap: usize) -> Result<Vec<Vec<Simplex>>> {
        let per: Vec<Vec<(Simplex, u64)>> = factors
            .iter()
            .map(|x| x.simplices(m).into_iter().map(|s| { let mk = s.degeneracy_mask(); (s, mk) }).collect())
            .collect();
        let full = if m == 0 { 0 } else { (1u64 << m) - 1 };
        let mut out = Vec::new();
        let mut stack: Vec<Simplex> = Vec::new();
        fn rec(
            per: &[Vec<(Simplex, u64)>],
            k: usize,
            mask: u64,
            stack: &mut Vec<Simplex>,
            out: &mut Vec<Vec<Simplex>>,
            cap: usize,
            m: usize,
        ) -> Result<()> {
            if k == per.len() {
                if mask == 0 {
                    if out.len() >= cap {
                        return Err(Error::SizeLimitExceeded {
                            what: format!("nondegenerate {m}-simplices of a product"),
                            count: out.len() + 1,
                            cap,
                        });
                    }
                    out.push(stack.clone());
                }
                return Ok(());
            }
            for (s, mk) in &per[k] {
                stack.push(s.clone());
                rec(per, k + 1, mask & mk, stack, out, cap, m)?;
                stack.pop();
            }
            Ok(())
        }
        rec(&per, 0, full, &mut stack, &mut out, cap, m)?;
        out.sort();
        Ok(out)
    }

    /// The product `x × y`. Nondegenerate simplices are the pairs with no
    /// common degeneracy; names record both coordinates.
    pub fn product(x: &FiniteSimplicialSet, y: &FiniteSimplicialSet, cap: usize) -> Result<FiniteSimplicialSet> {
        let top = x.dim() + y.dim();
        let mut lists = Vec::new();
        for m in 0..=top {
            lists.push(Self::product_simplices(&[x, y], m, cap)?);
        }
        let index: Vec<HashMap<Vec<Simplex>, usize>> =
            lists.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let names = lists
            .iter()
            .map(|l| l.iter().map(|t| format!("({},{})", x.name(&t[0]), y.name(&t[1]))).collect())
            .collect();
        let faces = lists
            .iter()
            .enumerate()
            .map(|(m, l)| {
                l.iter()
                    .map(|t| {
                        if m == 0 {
                            return vec![];
                        }
                        (0..=m)
                            .map(|i| {
                                let tuple = vec![x.face(&t[0], i), y.face(&t[1], i)];
                                let (nd, eta) = normalize_tuple(&tuple);
                                Simplex { index: index[nd[0].dim()][&nd] as u32, eta }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FiniteSimplicialSet::new(names, faces)
    }

    /// Normalized chains: degree `n` has the nondegenerate `n`-simplices,
    /// `∂ = Σ (-1)^i d_i` with degenerate faces dropped.
    pub fn normalized_chains(&self) -> DGModule<(usize, usize)> {
        let basis = (0..=self.dim()).map(|n| (n as i64, (0..self.count(n)).map(|k| (n, k)).collect())).collect();
        let module = GradedModule::from_basis(basis).expect("distinct labels");
        DGModule::from_fn(module, |&(n, k)| self.boundary(n, k)).expect("faces stay in the basis")
    }

    fn boundary(&self, n: usize, k: usize) -> Lin<(usize, usize)> {
        if n == 0 {
            return Vec::new();
        }
        self.faces[n][k]
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_nondegenerate())
            .map(|(i, f)| ((n - 1, f.index as usize), sign(i as i64)))
            .collect()
    }

    /// Normalized cochains, stored with cochain degree `q` in homological
    /// degree `-q`. The differential is the transpose of `∂`.
    pub fn normalized_cochains(&self) -> DGModule<(usize, usize)> {
        let basis = (0..=self.dim()).map(|n| (-(n as i64), (0..self.count(n)).map(|k| (n, k)).collect())).collect();
        let module = GradedModule::from_basis(basis).expect("distinct labels");
        let mut cob: HashMap<(usize, usize), Lin<(usize, usize)>> = HashMap::new();
        for n in 1..=self.dim() {
            for k in 0..self.count(n) {
                for (f, c) in self.boundary(n, k) {
                    cob.entry(f).or_default().push(((n, k), c));
                }
            }
        }
        DGModule::from_fn(module, |l| cob.get(l).cloned().unwrap_or_default()).expect("cofaces stay in the basis")
    }
}

/// Monotone surjections `[m] -> [k]` in lexicographic order.
pub fn surjections(m: usize, k: usize) -> Vec<Vec<u8>> {
    if k > m {
        return Vec::new();
    }
    (1..=m)
        .combinations(k)
        .map(|jumps| {
            let mut eta = Vec::with_capacity(m + 1);
            let mut v = 0u8;
            for t in 0..=m {
                if jumps.contains(&t) {
                    v += 1;
                }
                eta.push(v);
            }
            eta
        })
        .collect()
}

/// Writes a tuple of simplices of equal dimension as `s_η` of a
/// nondegenerate tuple.
pub fn normalize_tuple(tuple: &[Simplex]) -> (Vec<Simplex>, Vec<u8>) {
    let mut t = tuple.to_vec();
    let m = t[0].dim();
    let common = t.iter().fold(if m == 0 { 0 } else { (1u64 << m) - 1 }, |a, s| a & s.degeneracy_mask());
    let mut eta: Vec<u8> = Vec::with_capacity(m + 1);
    let mut v = 0u8;
    for j in 0..=m {
        if j > 0 && common & (1 << (j - 1)) == 0 {
            v += 1;
        }
        eta.push(v);
    }
    for j in (0..m).rev() {
        if common & (1 << j) != 0 {
            t = t.iter().map(|s| s.collapse(j)).collect();
        }
    }
    (t, eta)
}

/// Counts of nondegenerate simplices per dimension.
pub fn f_vector(x: &FiniteSimplicialSet) -> Vec<usize> {
    (0..=x.dim()).map(|n| x.count(n)).collect()
}

/// Dense boundary coefficient helper used by tests: `⟨∂σ, τ⟩`.
pub fn incidence(x: &FiniteSimplicialSet, n: usize, k: usize, target: usize) -> Rational {
    x.boundary(n, k).into_iter().filter(|(l, _)| l.1 == target).map(|(_, c)| c).sum()
}
