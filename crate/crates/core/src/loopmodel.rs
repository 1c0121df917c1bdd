//! The cosimplicial model of the free loop space.
//!
//! Level `p` is `X^{p+1}` with cofaces `d^i` duplicating coordinate `i`
//! (`i < p`), `d^p` appending a copy of `x_0`, and codegeneracies `s^j`
//! deleting coordinate `j+1`. Normalized cochains turn it into a simplicial
//! cochain complex with faces `(d^i)^*`; its total complex is
//! `D = Σ_{i=0}^{p} (-1)^i (d^i)^* + (-1)^p δ` in total degree `p - q`.
//!
//! Instead of dividing by the degenerate part we use its complement: the
//! cochains dual to tuples whose coordinates `1..p` all differ from the
//! totally degenerate simplex at vertex 0. This subcomplex maps
//! isomorphically to the normalization.

use std::collections::{BTreeMap, HashMap};

use crate::dgmod::{basis_vector, normalize_lin, DGModule, GradedModule, Lin};
use crate::error::{Error, Result};
use crate::exactlin::{sign, Field, Rational};
use crate::simplicial::SimplicialSource;
use crate::sset::{normalize_tuple, FiniteSimplicialSet, Simplex};

pub type Tuple = Vec<Simplex>;

/// The totally degenerate `q`-simplex at vertex 0.
pub fn base_simplex(q: usize) -> Simplex {
    Simplex { index: 0, eta: vec![0; q + 1] }
}

/// Coface `d^i : X^p -> X^{p+1}` on a tuple of simplices (`p = len`).
pub fn coface(i: usize, t: &[Simplex]) -> Tuple {
    let p = t.len();
    let mut out = t.to_vec();
    if i < p {
        out.insert(i + 1, t[i].clone());
    } else {
        out.push(t[0].clone());
    }
    out
}

/// Codegeneracy `s^j : X^{p+2} -> X^{p+1}`, deleting coordinate `j+1`.
pub fn codegeneracy(j: usize, t: &[Simplex]) -> Tuple {
    let mut out = t.to_vec();
    out.remove(j + 1);
    out
}

/// Checks the cosimplicial identities on tuples of simplices of dimension
/// `≤ max_dim` with at most `max_level + 1` coordinates.
pub fn check_cosimplicial_identities(x: &FiniteSimplicialSet, max_level: usize, max_dim: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for q in 0..=max_dim {
        let simplices = x.simplices(q);
        let mut level: Vec<Tuple> = simplices.iter().map(|s| vec![s.clone()]).collect();
        for p in 0..=max_level {
            let l = p + 1;
            for t in &level {
                for j in 0..=l + 1 {
                    for i in 0..j.min(l + 1) {
                        if coface(j, &coface(i, t)) != coface(i, &coface(j - 1, t)) {
                            bad.push(format!("d^{j} d^{i} = d^{i} d^{} at level {p}", j - 1));
                        }
                    }
                }
                for j in 0..=p {
                    for i in 0..=l {
                        let lhs = codegeneracy(j, &coface(i, t));
                        let rhs = if i < j {
                            coface(i, &codegeneracy(j - 1, t))
                        } else if i <= j + 1 {
                            t.clone()
                        } else {
                            coface(i - 1, &codegeneracy(j, t))
                        };
                        if lhs != rhs {
                            bad.push(format!("s^{j} d^{i} at level {p}"));
                        }
                    }
                }
                for j in 0..p.saturating_sub(1) {
                    for i in 0..=j {
                        if codegeneracy(j, &codegeneracy(i, t)) != codegeneracy(i, &codegeneracy(j + 1, t)) {
                            bad.push(format!("s^{j} s^{i} = s^{i} s^{} at level {p}", j + 1));
                        }
                    }
                }
            }
            level = level
                .iter()
                .flat_map(|t| simplices.iter().map(move |s| [t.as_slice(), std::slice::from_ref(s)].concat()))
                .take(20_000)
                .collect();
        }
    }
    bad
}

/// Nondegenerate `q`-simplices of `X^{k}` as tuples, lexicographic. With
/// `reduced`, coordinates `1..k-1` avoid the base simplex. Fails past `cap`.
pub fn tuples(x: &FiniteSimplicialSet, k: usize, q: usize, reduced: bool, cap: usize) -> Result<Vec<Tuple>> {
    let all: Vec<(Simplex, u64)> = x.simplices(q).into_iter().map(|s| { let m = s.degeneracy_mask(); (s, m) }).collect();
    let base = base_simplex(q);
    let rest: Vec<(Simplex, u64)> = all.iter().filter(|(s, _)| !reduced || *s != base).cloned().collect();
    let full = if q == 0 { 0 } else { (1u64 << q) - 1 };
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(k);
    #[allow(clippy::too_many_arguments)]
    fn rec(
        all: &[(Simplex, u64)],
        rest: &[(Simplex, u64)],
        k: usize,
        mask: u64,
        stack: &mut Tuple,
        out: &mut Vec<Tuple>,
        cap: usize,
        q: usize,
    ) -> Result<()> {
        if stack.len() == k {
            if mask == 0 {
                if out.len() >= cap {
                    return Err(Error::SizeLimitExceeded {
                        what: format!("cochains on nondegenerate {q}-simplices of X^{k}"),
                        count: out.len() + 1,
                        cap,
                    });
                }
                out.push(stack.clone());
            }
            return Ok(());
        }
        let choices = if stack.is_empty() { all } else { rest };
        for (s, m) in choices {
            stack.push(s.clone());
            rec(all, rest, k, mask & m, stack, out, cap, q)?;
            stack.pop();
        }
        Ok(())
    }
    rec(&all, &rest, k, full, &mut stack, &mut out, cap, q)?;
    Ok(out)
}

/// `Σ_k (-1)^{p-k} C(p,k) · #nondeg_q(X^{k+1})`, the size of a reduced block.
pub fn reduced_block_size(x: &FiniteSimplicialSet, p: usize, q: usize, cap: usize) -> Result<i128> {
    let mut total = 0i128;
    let mut binom = 1i128;
    for k in 0..=p {
        let n = tuples(x, k + 1, q, false, cap)?.len() as i128;
        let s = if (p - k) % 2 == 0 { 1 } else { -1 };
        total += s * binom * n;
        binom = binom * (p - k) as i128 / (k + 1) as i128;
    }
    Ok(total)
}

fn tuple_faces(x: &FiniteSimplicialSet, t: &[Simplex]) -> Vec<Option<Tuple>> {
    let q = t[0].dim();
    (0..=q)
        .map(|i| {
            let f: Tuple = t.iter().map(|s| x.face(s, i)).collect();
            let (nd, _) = normalize_tuple(&f);
            (nd[0].dim() == q - 1).then_some(nd)
        })
        .collect()
}

/// Cofaces map of one block: for every `(q+1)`-tuple `ρ`, its nondegenerate
/// faces with their signs, inverted.
fn coboundaries(x: &FiniteSimplicialSet, upper: &[Tuple]) -> HashMap<Tuple, Lin<Tuple>> {
    let mut map: HashMap<Tuple, Lin<Tuple>> = HashMap::new();
    for rho in upper {
        for (i, f) in tuple_faces(x, rho).into_iter().enumerate() {
            if let Some(f) = f {
                map.entry(f).or_default().push((rho.clone(), sign(i as i64)));
            }
        }
    }
    map
}

/// `(d^i)^* δ_σ`: nonzero exactly when `σ = d^i τ`.
fn face_pullback(i: usize, s: &[Simplex]) -> Option<Tuple> {
    let p = s.len() - 1;
    if i < p {
        (s[i] == s[i + 1]).then(|| codegeneracy(i, s))
    } else {
        (s[p] == s[0]).then(|| s[..p].to_vec())
    }
}

/// The full simplicial cochain complex `p ↦ N^*(X^{p+1})`, for comparison
/// with the reduced model on small examples.
pub struct JonesModel<'a> {
    x: &'a FiniteSimplicialSet,
    blocks: Vec<Vec<Vec<Tuple>>>,
    cob: Vec<Vec<HashMap<Tuple, Lin<Tuple>>>>,
}

impl<'a> JonesModel<'a> {
    pub fn new(x: &'a FiniteSimplicialSet, max_level: usize, cap: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        let mut cob = Vec::new();
        for p in 0..=max_level {
            let b = (0..=x.dim() * (p + 1)).map(|q| tuples(x, p + 1, q, false, cap)).collect::<Result<Vec<_>>>()?;
            cob.push((0..b.len()).map(|q| b.get(q + 1).map(|u| coboundaries(x, u)).unwrap_or_default()).collect());
            blocks.push(b);
        }
        Ok(JonesModel { x, blocks, cob })
    }
}

impl SimplicialSource for JonesModel<'_> {
    type Label = Tuple;

    fn basis(&self, p: usize) -> Result<Vec<(i64, Tuple)>> {
        Ok(self.blocks[p].iter().enumerate().flat_map(|(q, b)| b.iter().map(move |t| (-(q as i64), t.clone()))).collect())
    }

    fn differential(&self, p: usize, t: &Tuple) -> Lin<Tuple> {
        self.cob[p][t[0].dim()].get(t).cloned().map(normalize_lin).unwrap_or_default()
    }

    fn face(&self, _: usize, i: usize, t: &Tuple) -> Lin<Tuple> {
        face_pullback(i, t).map(|u| vec![(u, Rational::from_integer(1))]).unwrap_or_default()
    }

    fn degeneracy(&self, _: usize, j: usize, t: &Tuple) -> Lin<Tuple> {
        // (s^j)^* δ_τ = Σ δ_σ over σ with s^j σ = τ
        let q = t[0].dim();
        let mut out = Vec::new();
        for s in self.x.simplices(q) {
            let mut sigma = t.clone();
            sigma.insert(j + 1, s);
            if normalize_tuple(&sigma).0[0].dim() == q {
                out.push((sigma, Rational::from_integer(1)));
            }
        }
        normalize_lin(out)
    }
}

pub fn jones_model(x: &FiniteSimplicialSet, max_level: usize, cap: usize) -> Result<JonesModel<'_>> {
    JonesModel::new(x, max_level, cap)
}

/// The reduced total complex, levels `0..=max_level`, storing the total
/// degrees `lo..=hi` (homological). Blocks are `(level, q)`.
pub struct LoopCototal {
    pub complex: DGModule<(usize, Tuple)>,
    pub block_sizes: BTreeMap<(usize, usize), usize>,
}

pub fn cototal(x: &FiniteSimplicialSet, max_level: usize, lo: i64, hi: i64, cap: usize) -> Result<LoopCototal> {
    if lo > hi {
        return Err(Error::InvalidBounds(format!("empty degree window {lo}..={hi}")));
    }
    let mut blocks: BTreeMap<(usize, usize), Vec<Tuple>> = BTreeMap::new();
    let qmax = |p: usize| x.dim() * (p + 1);
    for p in 0..=max_level {
        // total degree p - q in [lo, hi]; images below lo are not stored
        if p as i64 - lo < 0 {
            break;
        }
        let qlo = (p as i64 - hi).max(0) as usize;
        let qhi = (p as i64 - lo) as usize;
        for q in qlo..=qhi.min(qmax(p)) {
            blocks.insert((p, q), tuples(x, p + 1, q, true, cap)?);
        }
    }
    let mut cob: HashMap<(usize, usize), HashMap<Tuple, Lin<Tuple>>> = HashMap::new();
    for (&(p, q), upper) in &blocks {
        if q > 0 && blocks.contains_key(&(p, q - 1)) {
            cob.insert((p, q - 1), coboundaries(x, upper));
        }
    }
    let mut basis: BTreeMap<i64, Vec<(usize, Tuple)>> = (lo..=hi).map(|n| (n, Vec::new())).collect();
    let mut block_sizes = BTreeMap::new();
    for (&(p, q), ts) in &blocks {
        let n = p as i64 - q as i64;
        if (lo..=hi).contains(&n) {
            block_sizes.insert((p, q), ts.len());
            basis.get_mut(&n).expect("window").extend(ts.iter().map(|t| (p, t.clone())));
        }
    }
    let module = GradedModule::from_basis(basis)?;
    let complex = DGModule::from_fn(module, |(p, t)| {
        let p = *p;
        let q = t[0].dim();
        let mut out = Vec::new();
        if p > 0 {
            for i in 0..=p {
                if let Some(u) = face_pullback(i, t) {
                    out.push(((p - 1, u), sign(i as i64)));
                }
            }
        }
        if let Some(m) = cob.get(&(p, q)) {
            if let Some(v) = m.get(t) {
                out.extend(v.iter().map(|(r, c)| ((p, r.clone()), *c * sign(p as i64))));
            }
        }
        normalize_lin(out)
    })?;
    Ok(LoopCototal { complex, block_sizes })
}

/// One row of loop-space Betti numbers (cohomological degree `m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopBettiRow {
    pub degree: usize,
    pub dim: usize,
    /// `m ≤ P`: levels above `P` cannot contribute.
    pub stable: bool,
    /// Whether recomputing with `P + 1` levels gave the same value; `None`
    /// when that recomputation exceeds the cap.
    pub confirmed: Option<bool>,
}

/// Checks `H̃⁰(X) = 0` and `H¹(X) = 0` over the field.
pub fn simply_connected_proxy(x: &FiniteSimplicialSet, field: Field) -> Result<()> {
    let c = x.normalized_chains();
    let b0 = c.homology_dim(0, field)?;
    let b1 = if x.dim() >= 1 { c.homology_dim(1, field)? } else { 0 };
    if b0 != 1 || b1 != 0 {
        return Err(Error::NotSimplyConnectedProxy { dim: b1 + b0.saturating_sub(1) });
    }
    Ok(())
}

/// `dim H^m(LX)` for `m` in `0..=max_degree` from the model truncated at
/// `max_level` levels. Degrees `m ≤ max_level` are stable; the others are
/// reported but flagged.
pub fn loop_betti(x: &FiniteSimplicialSet, max_level: usize, max_degree: usize, cap: usize, field: Field) -> Result<Vec<LoopBettiRow>> {
    simply_connected_proxy(x, field)?;
    let compute = |levels: usize| -> Result<Vec<usize>> {
        let c = cototal(x, levels, -(max_degree as i64) - 1, 1, cap)?;
        (0..=max_degree).map(|m| c.complex.homology_dim(-(m as i64), field)).collect()
    };
    let dims = compute(max_level)?;
    let again = match compute(max_level + 1) {
        Ok(v) => Some(v),
        Err(Error::SizeLimitExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(dims
        .iter()
        .enumerate()
        .map(|(m, &dim)| LoopBettiRow {
            degree: m,
            dim,
            stable: m <= max_level,
            confirmed: again.as_ref().map(|v| v[m] == dim),
        })
        .collect())
}

/// Map from the reduced model into the full total complex, as a list of
/// labels (the inclusion is label by label).
pub fn reduced_labels(c: &LoopCototal, n: i64) -> Vec<Lin<(usize, Tuple)>> {
    c.complex.basis(n).iter().map(|l| basis_vector(l.clone())).collect()
}
