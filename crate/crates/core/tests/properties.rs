//! Randomized invariants of the linear algebra, DG modules, simplicial sets
//! and free algebras.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use hochloop::dgmod::{tensor, DGModule, GradedModule};
use hochloop::exactlin::{homology_dim, kernel_basis, rank, Field, Rational, SparseMatrix};
use hochloop::hochschild::{classical_complex, HochschildBounds};
use hochloop::oalg::{Flavor, FreeAlgebra, Generator};
use hochloop::sset::FiniteSimplicialSet;

const Q: Field = Field::Rational;

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Rational), Just(Field::Prime(2)), Just(Field::Prime(3)), Just(Field::Prime(101))]
}

fn matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
    (1usize..9, 1usize..9).prop_flat_map(|(r, c)| {
        (Just(r), Just(c), prop::collection::vec(prop::collection::vec(prop_oneof![4 => Just(0i64), 1 => -3i64..=3], c), r))
    })
}

/// Rank by dense elimination over `F_p`.
fn dense_rank_mod(rows: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
    let ncols = a.first().map_or(0, Vec::len);
    let inv = |x: i64| (1..p).find(|y| x * y % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let f = inv(a[rank][c]);
        for v in a[rank].iter_mut() {
            *v = *v * f % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let k = a[r][c];
                for j in 0..ncols {
                    a[r][j] = (a[r][j] - k * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank by dense fraction elimination over `Q`.
fn dense_rank_q(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect()).collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, piv);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let k = &a[r][c] / &a[rank][c];
                for j in 0..ncols {
                    let t = &k * &a[rank][j];
                    a[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A complex with prescribed homology: `singles` are classes, `pairs` are
/// acyclic pieces `k -> k` from degree `n + 1` to `n`. A unitriangular change
/// of basis in each degree hides the structure.
#[derive(Clone, Debug)]
struct Blueprint {
    singles: Vec<i64>,
    pairs: Vec<i64>,
    ops: Vec<(u8, u8, i64)>,
}

fn blueprint() -> impl Strategy<Value = Blueprint> {
    (
        prop::collection::vec(0i64..4, 0..4),
        prop::collection::vec(0i64..3, 0..4),
        prop::collection::vec((0u8..8, 0u8..8, -2i64..=2), 0..12),
    )
        .prop_map(|(singles, pairs, ops)| Blueprint { singles, pairs, ops })
}

fn build(b: &Blueprint) -> DGModule<usize> {
    let mut basis: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut next = 0;
    let mut push = |n: i64, basis: &mut BTreeMap<i64, Vec<usize>>| {
        let v = basis.entry(n).or_default();
        v.push(next);
        next += 1;
        v.len() - 1
    };
    let mut edges = Vec::new();
    for &n in &b.singles {
        push(n, &mut basis);
    }
    for &n in &b.pairs {
        let hi = push(n + 1, &mut basis);
        let lo = push(n, &mut basis);
        edges.push((n + 1, hi, lo));
    }
    let lo = *basis.keys().next().unwrap_or(&0);
    let hi = *basis.keys().last().unwrap_or(&0);
    for n in lo - 1..=hi + 1 {
        basis.entry(n).or_default();
    }
    let dim = |n: i64| basis.get(&n).map_or(0, Vec::len);
    let mut dense: BTreeMap<i64, Vec<Vec<i64>>> = BTreeMap::new();
    for n in lo..=hi + 1 {
        dense.insert(n, vec![vec![0; dim(n)]; dim(n - 1)]);
    }
    for (n, s, t) in edges {
        dense.get_mut(&n).unwrap()[t][s] = 1;
    }
    // basis change U in degree m: d_m <- d_m U^{-1}, d_{m+1} <- U d_{m+1}
    for (k, &(i, j, c)) in b.ops.iter().enumerate() {
        let m = lo + (k as i64 % (hi - lo + 1));
        let dm = dim(m);
        let (i, j) = (i as usize, j as usize);
        if dm < 2 || i >= dm || j >= dm || i == j {
            continue;
        }
        if let Some(d) = dense.get_mut(&(m + 1)) {
            for col in 0..d[i].len() {
                d[i][col] += c * d[j][col];
            }
        }
        if let Some(d) = dense.get_mut(&m) {
            for row in d.iter_mut() {
                row[j] -= c * row[i];
            }
        }
    }
    let diff = dense
        .iter()
        .map(|(&n, rows)| {
            let trip = rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter().enumerate().map(move |(c, &v)| (r, c, Rational::from_integer(v)))
            });
            (n, SparseMatrix::from_triplets(dim(n - 1), dim(n), trip))
        })
        .collect();
    DGModule::from_parts(GradedModule::from_basis(basis).unwrap(), diff).unwrap()
}

fn expected(b: &Blueprint, n: i64) -> usize {
    b.singles.iter().filter(|&&m| m == n).count()
}

fn homology(m: &DGModule<impl hochloop::dgmod::Label>, range: std::ops::RangeInclusive<i64>, f: Field) -> Vec<usize> {
    m.homology_dims(range, f).unwrap().into_values().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rank_plus_nullity((r, c, rows) in matrix(), f in fields()) {
        let m = SparseMatrix::from_dense(&rows);
        let k = kernel_basis(&m, f);
        prop_assert_eq!(rank(&m, f) + k.len(), c);
        if f == Q {
            for v in &k {
                prop_assert!(m.apply_big(v).is_empty());
            }
        }
        prop_assert!(rank(&m, f) <= r.min(c));
    }

    #[test]
    fn rank_matches_dense_oracles((_, _, rows) in matrix()) {
        let m = SparseMatrix::from_dense(&rows);
        prop_assert_eq!(rank(&m, Q), dense_rank_q(&rows));
        for p in [2u64, 3, 7] {
            prop_assert_eq!(rank(&m, Field::Prime(p)), dense_rank_mod(&rows, p as i64));
        }
    }

    #[test]
    fn rank_ignores_permutations((r, c, rows) in matrix(), seed in any::<u64>(), f in fields()) {
        let m = SparseMatrix::from_dense(&rows);
        let mut rp: Vec<usize> = (0..r).collect();
        let mut cp: Vec<usize> = (0..c).collect();
        rp.rotate_left(seed as usize % r);
        cp.reverse();
        cp.rotate_left((seed >> 8) as usize % c);
        prop_assert_eq!(rank(&m.permute(&rp, &cp), f), rank(&m, f));
        prop_assert_eq!(rank(&m.transpose(), f), rank(&m, f));
    }

    #[test]
    fn homology_of_blueprints(b in blueprint(), f in fields()) {
        let m = build(&b);
        m.check_dsquare(f).unwrap();
        for n in -1..=4 {
            prop_assert_eq!(m.homology_dim(n, f).unwrap(), expected(&b, n), "degree {}", n);
        }
    }

    #[test]
    fn kunneth(a in blueprint(), b in blueprint(), f in fields()) {
        let (x, y) = (build(&a), build(&b));
        let t = tensor(&x, &y);
        t.check_dsquare(f).unwrap();
        for n in -1..=7 {
            let want: usize = (-1..=n + 1).map(|i| expected(&a, i) * expected(&b, n - i)).sum();
            prop_assert_eq!(t.homology_dim(n, f).unwrap(), want, "degree {}", n);
        }
    }

    #[test]
    fn tensor_is_associative_up_to_homology(a in blueprint(), b in blueprint(), c in blueprint()) {
        let (x, y, z) = (build(&a), build(&b), build(&c));
        let l = tensor(&tensor(&x, &y), &z);
        let r = tensor(&x, &tensor(&y, &z));
        for n in -1..=10 {
            prop_assert_eq!(l.dim(n), r.dim(n));
        }
        prop_assert_eq!(homology(&l, -1..=10, Q), homology(&r, -1..=10, Q));
    }

    #[test]
    fn suspension_round_trip(b in blueprint(), k in -5i64..=5) {
        let m = build(&b);
        let s = m.suspend(k);
        for n in -1..=4 {
            prop_assert_eq!(s.homology_dim(n + k, Q).unwrap(), m.homology_dim(n, Q).unwrap());
        }
        let back = s.suspend(-k);
        prop_assert_eq!(homology(&back, -2..=5, Q), homology(&m, -2..=5, Q));
    }

    #[test]
    fn composition_check_rejects_nonzero_products((_, c, rows) in matrix()) {
        let m = SparseMatrix::from_dense(&rows);
        let id = SparseMatrix::identity(c);
        // m * id = 0 only for the zero matrix
        prop_assert_eq!(homology_dim(&id, &m, Q).is_ok(), m.is_zero());
    }
}

fn spaces() -> Vec<(&'static str, FiniteSimplicialSet)> {
    vec![
        ("point", FiniteSimplicialSet::point()),
        ("circle", FiniteSimplicialSet::circle()),
        ("triangle boundary", FiniteSimplicialSet::boundary_of_simplex(1)),
        ("minimal S2", FiniteSimplicialSet::minimal_sphere(2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn products_of_simplicial_sets(i in 0usize..4, j in 0usize..4) {
        let s = spaces();
        let (x, y) = (&s[i].1, &s[j].1);
        let p = FiniteSimplicialSet::product(x, y, 100_000).unwrap();
        prop_assert!(p.check_identities().is_empty());
        prop_assert_eq!(p.euler_characteristic(), x.euler_characteristic() * y.euler_characteristic());
        // Eilenberg-Zilber: H(X x Y) = H(X) ⊗ H(Y)
        let hx = x.normalized_chains();
        let hy = y.normalized_chains();
        let hp = p.normalized_chains();
        for n in 0..=4i64 {
            let want: usize = (0..=n).map(|a| hx.homology_dim(a, Q).unwrap() * hy.homology_dim(n - a, Q).unwrap()).sum();
            prop_assert_eq!(hp.homology_dim(n, Q).unwrap(), want, "degree {} of {} x {}", n, s[i].0, s[j].0);
        }
    }
}

fn coefficient() -> impl Strategy<Value = i64> {
    -2i64..=2
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// `d z` is a random quadratic expression in closed generators, so d² = 0.
    #[test]
    fn random_free_algebras(a in coefficient(), b in coefficient(), c in coefficient(), e in coefficient(), assoc in any::<bool>()) {
        let flavor = if assoc { Flavor::Associative } else { Flavor::Commutative };
        let mut alg = FreeAlgebra::new(flavor, Q, vec![Generator::new("x", 2), Generator::new("y", 2), Generator::new("z", 7)]);
        let t = |v: i64| Rational::from_integer(v);
        let w = vec![(vec![0, 1, 1], t(a)), (vec![1, 0, 0], t(b)), (vec![0, 0, 1], t(c)), (vec![1, 1, 1], t(e))];
        alg.set_differential(2, w.into_iter().filter(|(_, k)| !k.is_zero()).collect()).unwrap();
        alg.verify_dsquare(4).unwrap();
        prop_assert!(alg.check_leibniz(3).is_none());
        let cx = classical_complex(&alg, &HochschildBounds::new(3, 4)).unwrap();
        cx.check_dsquare(Q).unwrap();
        // the unit in degree 0 is never a boundary
        prop_assert_eq!(cx.homology_dim(0, Q).unwrap(), 1);
    }

    #[test]
    fn odd_generators_anticommute(k in 1usize..4) {
        let alg = FreeAlgebra::new(Flavor::Commutative, Q, vec![Generator::new("x", 1), Generator::new("y", 3)]);
        let xy = alg.multiply_words(&[0], &[1]);
        let yx = alg.multiply_words(&[1], &[0]);
        prop_assert_eq!(xy.len(), 1);
        prop_assert_eq!(&xy[0].1, &(-yx[0].1));
        let mut x_pow = vec![(vec![], Rational::one())];
        for _ in 0..k {
            x_pow = alg.multiply(&x_pow, &vec![(vec![0], Rational::one())]);
        }
        prop_assert_eq!(x_pow.is_empty(), k >= 2);
    }
}
