//! Acceptance run: one PASS/FAIL line per criterion, with timings.
//!
//! Criterion 9 cannot be met under the default size cap; it prints FAIL with
//! the reason and the run still succeeds as long as the failure is exactly the
//! cap. Any other unexpected outcome makes the process exit nonzero.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;

use hochloop::dgmod::{DGModule, Label, Lin};
use hochloop::exactlin::{Field, Rational};
use hochloop::hochschild::{self, CyclicSimplicial, HochschildBounds, TensorPowers};
use hochloop::loopmodel;
use hochloop::oalg::{dual_numbers, exterior, polynomial, sphere_model, Flavor, FreeAlgebra, Generator};
use hochloop::operads::{self, BarrattEccles};
use hochloop::selftest::{self, SelftestOptions};
use hochloop::simplicial::{compare_tot_and_normalization, materialize, SimplicialSource};
use hochloop::sset::{default_cap, FiniteSimplicialSet, Simplex};
use hochloop::Error;

const Q: Field = Field::Rational;

type Check = Result<(bool, String), String>;

fn err(e: Error) -> String {
    e.to_string()
}

/// `k[X]`: level `p` spanned by all `p`-simplices, internal degree 0.
struct Chains<'a>(&'a FiniteSimplicialSet);

impl SimplicialSource for Chains<'_> {
    type Label = Simplex;

    fn basis(&self, p: usize) -> hochloop::Result<Vec<(i64, Simplex)>> {
        Ok(self.0.simplices(p).into_iter().map(|s| (0, s)).collect())
    }

    fn differential(&self, _: usize, _: &Simplex) -> Lin<Simplex> {
        Vec::new()
    }

    fn face(&self, _: usize, i: usize, s: &Simplex) -> Lin<Simplex> {
        vec![(self.0.face(s, i), Rational::from_integer(1))]
    }

    fn degeneracy(&self, _: usize, j: usize, s: &Simplex) -> Lin<Simplex> {
        vec![(s.degeneracy(j), Rational::from_integer(1))]
    }
}

fn graded_associative() -> FreeAlgebra {
    let mut a = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", -1), Generator::new("y", -2)]);
    a.set_differential(0, vec![(vec![0, 0], Rational::from_integer(1))]).unwrap();
    a.set_differential(1, vec![(vec![0, 1], Rational::from_integer(1)), (vec![1, 0], Rational::from_integer(-1))]).unwrap();
    a
}

fn dsquare<L: Label>(name: &str, m: &DGModule<L>, count: &mut usize, names: &mut Vec<String>) -> Result<(), String> {
    m.check_dsquare(Q).map_err(|e| format!("{name}: {e}"))?;
    *count += m.module().degrees().count();
    names.push(name.to_string());
    Ok(())
}

fn criterion_1() -> Check {
    let mut degrees = 0;
    let mut names = Vec::new();
    let algebras: Vec<(&str, FreeAlgebra, HochschildBounds)> = vec![
        ("sphere model", sphere_model(Q), HochschildBounds::new(5, 6)),
        ("dual numbers", dual_numbers(Q), HochschildBounds::new(6, 7)),
        ("exterior", exterior(Q), HochschildBounds::new(6, 7)),
        ("polynomial", polynomial(Q, 2), HochschildBounds::new(5, 6)),
        ("graded associative", graded_associative(), HochschildBounds::new(3, 4)),
        (
            "odd associative",
            FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1), Generator::new("y", 1)]),
            HochschildBounds::new(3, 4),
        ),
    ];
    for (name, a, b) in &algebras {
        let c = hochschild::classical_complex(a, b).map_err(err)?;
        dsquare(&format!("classical {name}"), &c, &mut degrees, &mut names)?;
    }
    for (name, a) in [("dual numbers", dual_numbers(Q)), ("polynomial", polynomial(Q, 2))] {
        let u = hochschild::unreduced_complex(&a, &HochschildBounds::new(4, 5)).map_err(err)?;
        dsquare(&format!("unreduced Tot {name}"), &u.normalization.tot, &mut degrees, &mut names)?;
        dsquare(&format!("unreduced N {name}"), &u.normalization.normalized, &mut degrees, &mut names)?;
    }
    for (name, a, b) in [("polynomial", polynomial(Q, 2), HochschildBounds::new(4, 5)), ("sphere model", sphere_model(Q), HochschildBounds::new(3, 4))] {
        let o = hochschild::operadic_hc(&a, &b).map_err(err)?;
        dsquare(&format!("cyclic simplicial Tot {name}"), &o.normalization.tot, &mut degrees, &mut names)?;
        dsquare(&format!("operadic Tot(A+) {name}"), &o.plus, &mut degrees, &mut names)?;
    }
    let e = BarrattEccles::new(200_000);
    for (n, d) in [(2, 8), (3, 5), (4, 2)] {
        let m = operads::arity_module(&e, n, d).map_err(err)?;
        dsquare(&format!("E({n}) through degree {d}"), &m, &mut degrees, &mut names)?;
    }
    for (name, x, p, m) in [
        ("point", FiniteSimplicialSet::point(), 3, 4),
        ("minimal S2", FiniteSimplicialSet::minimal_sphere(2), 3, 3),
        ("boundary of the 3-simplex", FiniteSimplicialSet::boundary_of_simplex(2), 2, 2),
    ] {
        let c = loopmodel::cototal(&x, p, -(m as i64) - 1, 1, 200_000).map_err(err)?;
        dsquare(&format!("cototal {name} P={p}"), &c.complex, &mut degrees, &mut names)?;
    }
    Ok((true, format!("{} complexes, {degrees} degrees: {}", names.len(), names.join(", "))))
}

fn tot_vs_n<S: SimplicialSource>(name: &str, src: &S, bound: usize, out: &mut Vec<String>) -> Result<bool, String> {
    let s = materialize(src, bound).map_err(err)?;
    let lo = (0..=bound).flat_map(|p| s.levels[p].module().degrees().map(move |d| d + p as i64)).min().unwrap_or(0);
    let range: RangeInclusive<i64> = lo..=bound as i64 - 1;
    let (t, n) = compare_tot_and_normalization(&s, range.clone(), Q).map_err(err)?;
    let ok = t == n;
    out.push(format!("{name} P={bound} degrees {}..{}: {:?}", range.start(), range.end(), t.values().collect::<Vec<_>>()));
    Ok(ok)
}

fn criterion_2() -> Check {
    let mut out = Vec::new();
    let mut ok = true;
    let circle = FiniteSimplicialSet::circle();
    let triangle = FiniteSimplicialSet::boundary_of_simplex(1);
    let s2 = FiniteSimplicialSet::minimal_sphere(2);
    let torus = FiniteSimplicialSet::product(&circle, &circle, 100_000).map_err(err)?;
    ok &= tot_vs_n("circle chains", &Chains(&circle), 5, &mut out)?;
    ok &= tot_vs_n("triangle boundary chains", &Chains(&triangle), 4, &mut out)?;
    ok &= tot_vs_n("minimal S2 chains", &Chains(&s2), 4, &mut out)?;
    ok &= tot_vs_n("torus chains", &Chains(&torus), 3, &mut out)?;
    let p2 = polynomial(Q, 2);
    ok &= tot_vs_n("cyclic simplicial polynomial", &CyclicSimplicial::new(&p2, 4, 5).map_err(err)?, 4, &mut out)?;
    let ex = exterior(Q);
    ok &= tot_vs_n("cyclic simplicial exterior", &CyclicSimplicial::new(&ex, 4, 5).map_err(err)?, 4, &mut out)?;
    let dn = dual_numbers(Q);
    ok &= tot_vs_n("tensor powers of dual numbers", &TensorPowers { algebra: &dn, max_weight: 5 }, 4, &mut out)?;
    Ok((ok, format!("{} modules; {}", out.len(), out.join("; "))))
}

fn criterion_3() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in 2..=4 {
        let op = BarrattEccles::new(200_000);
        let h0 = operads::arity_module(&op, n, 1).map_err(err)?.homology_dim(0, Q).map_err(err)?;
        let rows = operads::barratt_eccles_acyclicity(n, 1..=8, 200_000, Q).map_err(err)?;
        let by_rank = rows.iter().filter(|r| r.method == operads::AcyclicityMethod::Rank).count();
        let acyclic = rows.iter().all(|r| r.acyclic());
        let mut orbit_degrees = 0;
        let mut free = true;
        for d in 0..=8 {
            let (f, orbits) = operads::sigma_free(n, d, 20_000).map_err(err)?;
            free &= f;
            orbit_degrees += orbits.is_some() as usize;
        }
        ok &= h0 == 1 && acyclic && free;
        parts.push(format!(
            "E({n}): H_0 = {h0}, H_1..8 = 0 ({by_rank} by rank, {} by contraction), free ({orbit_degrees} degrees by orbit count, {} by stabilizers)",
            8 - by_rank,
            9 - orbit_degrees
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn theorem_b_instances() -> Vec<(&'static str, FreeAlgebra, HochschildBounds)> {
    vec![
        ("F(C,<x2>) weight<=5 levels<=4", polynomial(Q, 2), HochschildBounds::new(4, 5)),
        ("sphere model weight<=4 levels<=3", sphere_model(Q), HochschildBounds::new(3, 4)),
    ]
}

fn criterion_4() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a, b) in theorem_b_instances() {
        let o = hochschild::operadic_hc(&a, &b).map_err(err)?;
        let r = o.theorem_b(300).map_err(err)?;
        ok &= r.passed();
        let size: usize = r.dims.iter().map(|d| d.1).sum();
        parts.push(format!(
            "{name}: {size} labels in {} degrees, bijection {}, {} differential mismatches, {} of {} products positive",
            r.dims.len(),
            r.bijection,
            r.differential_mismatches,
            r.products_checked - r.product_failures,
            r.products_checked
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_5() -> Check {
    let mut parts = Vec::new();
    for (name, a, b) in theorem_b_instances() {
        let o = hochschild::operadic_hc(&a, &b).map_err(err)?;
        match o.splitting() {
            Ok((z, p)) => parts.push(format!("{name}: (A,0) {} + positive {}", z.module().total_dim(), p.module().total_dim())),
            Err(e @ Error::MixingDetected { .. }) => return Ok((false, format!("{name}: {e}"))),
            Err(e) => return Err(err(e)),
        }
    }
    Ok((true, parts.join("; ")))
}

fn criterion_6() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a, b) in theorem_b_instances() {
        let o = hochschild::ohh(&a, &b).map_err(err)?;
        let c = hochschild::hh(&a, &b).map_err(err)?;
        let stable: Vec<i64> = o.iter().filter(|(n, s)| s.stable && c.get(n).is_some_and(|x| x.stable)).map(|(n, _)| *n).collect();
        let t = hochschild::theorem_a_compare(&a, &b).map_err(err)?;
        let rows = hochschild::compare_homology(&t.map, &t.operadic.plus, &t.classical, stable.iter().copied(), Q).map_err(err)?;
        let iso = rows.iter().all(hochschild::ComparisonRow::is_iso);
        ok &= iso && !rows.is_empty();
        let shown: Vec<String> = rows.iter().map(|r| format!("{}:{}={}", r.degree, r.source, r.target)).collect();
        parts.push(format!("{name}: {} stable degrees, induced maps iso: {iso} [{}]", rows.len(), shown.join(" ")));
    }
    Ok((ok, parts.join("; ")))
}

/// Homology of `Q[e]/e^2` from a separately written dense complex: degree `k`
/// has basis `1[e|…|e]`, `e[e|…|e]` and `d(1[e^k]) = (1 + (-1)^k) e[e^(k-1)]`.
fn naive_dual_numbers(max: usize) -> Vec<usize> {
    let d = |k: usize| -> Vec<Vec<BigRational>> {
        // rows: degree k-1 basis (1, e); cols: degree k basis (1, e)
        let mut m = vec![vec![BigRational::zero(); 2]; 2];
        if k >= 1 && k % 2 == 0 {
            m[1][0] = BigRational::from_integer(2.into());
        }
        m
    };
    let rank = |mut a: Vec<Vec<BigRational>>| -> usize {
        let mut r = 0;
        for c in 0..2 {
            if let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) {
                a.swap(r, p);
                for i in 0..a.len() {
                    if i != r && !a[i][c].is_zero() {
                        let f = &a[i][c] / &a[r][c];
                        for j in 0..2 {
                            let t = &f * &a[r][j];
                            a[i][j] -= t;
                        }
                    }
                }
                r += 1;
            }
        }
        r
    };
    (0..=max).map(|k| 2 - if k == 0 { 0 } else { rank(d(k)) } - rank(d(k + 1))).collect()
}

fn criterion_7() -> Check {
    let a = dual_numbers(Q);
    let b = HochschildBounds { degrees: Some(0..=4), ..HochschildBounds::new(5, 6) };
    let h = hochschild::hh(&a, &b).map_err(err)?;
    let ours: Vec<usize> = h.values().map(|s| s.dim).collect();
    let naive = naive_dual_numbers(4);
    let c = hochschild::classical_complex(&a, &b).map_err(err)?;
    let same_dims = (0..=4).all(|n| c.dim(n) == 2);
    let dual_ok = ours == vec![2, 1, 1, 1, 1] && naive == ours && same_dims && h.values().all(|s| s.stable);

    let e = exterior(Q);
    let hb = HochschildBounds { degrees: Some(0..=6), ..HochschildBounds::new(6, 7) };
    let he = hochschild::hh(&e, &hb).map_err(err)?;
    let stable: Vec<(i64, usize)> = he.iter().filter(|(_, s)| s.stable).map(|(n, s)| (*n, s.dim)).collect();
    let ext_ok = stable.len() >= 5 && stable.iter().all(|&(_, d)| d == 1);
    Ok((
        dual_ok && ext_ok,
        format!(
            "Q[e]/e^2: {ours:?} (naive dense complex {naive:?}); Lambda(x1): 1 in stable degrees {:?}",
            stable.iter().map(|s| s.0).collect::<Vec<_>>()
        ),
    ))
}

fn criterion_8() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, a) in [("Q[e]/e^2", dual_numbers(Q)), ("F(C,<x2>)", polynomial(Q, 2))] {
        let b = HochschildBounds::new(4, 5);
        let u = hochschild::unreduced_complex(&a, &b).map_err(err)?;
        let bigger = hochschild::unreduced_complex(&a, &b.enlarged()).map_err(err)?;
        let h = hochschild::hh(&a, &HochschildBounds { degrees: Some(0..=4), ..b.clone() }).map_err(err)?;
        let mut stable = Vec::new();
        for n in 0..=4 {
            let un = u.normalization.normalized.homology_dim(n, Q).map_err(err)?;
            let ub = bigger.normalization.normalized.homology_dim(n, Q).map_err(err)?;
            if un == ub && h[&n].stable {
                stable.push(n);
            }
        }
        let chain_map = u.map.verify(&u.normalization.normalized, &u.classical, -1..=12, Q).map_err(err)?.is_empty();
        let rows = hochschild::compare_homology(&u.map, &u.normalization.normalized, &u.classical, stable.iter().copied(), Q).map_err(err)?;
        let iso = rows.iter().all(hochschild::ComparisonRow::is_iso);
        ok &= chain_map && iso && !rows.is_empty();
        let shown: Vec<String> = rows.iter().map(|r| format!("{}:{}={}", r.degree, r.source, r.target)).collect();
        parts.push(format!("{name}: chain map {chain_map}, stable degrees [{}]", shown.join(" ")));
    }
    Ok((ok, parts.join("; ")))
}

fn sphere_oracle(max: usize) -> Result<BTreeMap<usize, (usize, bool)>, String> {
    let b = HochschildBounds { degrees: Some(-(max as i64)..=0), ..HochschildBounds::new(5, 6) };
    let h = hochschild::hh(&sphere_model(Q), &b).map_err(err)?;
    Ok(h.into_iter().map(|(n, s)| ((-n) as usize, (s.dim, s.stable))).collect())
}

fn agree(x: &FiniteSimplicialSet, p: usize, m: usize, cap: usize) -> Result<(bool, Vec<usize>), Error> {
    let rows = loopmodel::loop_betti(x, p, m, cap, Q)?;
    let oracle = sphere_oracle(m).map_err(Error::Unsupported)?;
    let ok = rows.iter().filter(|r| r.stable).all(|r| oracle[&r.degree].1 && oracle[&r.degree].0 == r.dim);
    Ok((ok, rows.iter().map(|r| r.dim).collect()))
}

/// Returns the status line and whether the outcome is the documented one.
fn criterion_9() -> (bool, String, bool) {
    let cap = default_cap();
    let x = FiniteSimplicialSet::boundary_of_simplex(2);
    let mut notes = Vec::new();
    let mut outcome = None;
    for (p, m) in [(4, 3), (3, 1)] {
        match agree(&x, p, m, cap) {
            Ok((ok, dims)) => {
                let enough = p == 4 || (dims.len() >= 2 && dims[0] == 1 && dims[1] == 1);
                notes.push(format!("P={p} degrees 0..{m}: {dims:?}"));
                outcome = Some(ok && enough);
                break;
            }
            Err(e @ Error::SizeLimitExceeded { .. }) => notes.push(format!("P={p}: {e}")),
            Err(e) => return (false, format!("P={p}: {e}"), false),
        }
    }
    // desk-scale evidence that fits the cap
    let mut extra = Vec::new();
    let mut extra_ok = true;
    for (name, y, p, m) in [
        ("boundary of the 3-simplex", FiniteSimplicialSet::boundary_of_simplex(2), 2, 2),
        ("minimal S2", FiniteSimplicialSet::minimal_sphere(2), 3, 3),
    ] {
        match agree(&y, p, m, cap) {
            Ok((ok, dims)) => {
                extra_ok &= ok;
                extra.push(format!("{name} P={p} degrees 0..{m} = {dims:?} {}", if ok { "agrees with HH" } else { "DISAGREES with HH" }));
            }
            Err(e) => {
                extra_ok = false;
                extra.push(format!("{name}: {e}"));
            }
        }
    }
    let detail = format!("{}; supplementary: {}", notes.join("; "), extra.join("; "));
    match outcome {
        Some(ok) => (ok && extra_ok, detail, ok && extra_ok),
        // the documented infeasibility: both level bounds exceed the cap
        None => (false, format!("size cap {cap} exceeded at P=4 and P=3 ({detail})"), extra_ok),
    }
}

fn criterion_10() -> Check {
    let a = selftest::run(SelftestOptions::default());
    let b = selftest::run(SelftestOptions::default());
    let (sa, sb) = (a.to_string(), b.to_string());
    Ok((sa == sb && a.passed(), format!("{} checks, {} bytes, identical: {}", a.checks.len(), sa.len(), sa == sb)))
}

fn run(n: usize, title: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    let in_budget = el <= budget;
    let (pass, detail) = match out {
        Ok((p, d)) => (p && in_budget, d),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} criterion {n}: {title} [{:.1} s, budget {} s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn main() {
    let s = |x: u64| Duration::from_secs(x);
    let mut unexpected = Vec::new();
    let checks: Vec<(usize, &str, Duration, fn() -> Check)> = vec![
        (1, "d^2 = 0 suite", s(120), criterion_1),
        (2, "Tot and normalization have equal homology", s(60), criterion_2),
        (3, "E(n) is acyclic and free", s(120), criterion_3),
        (4, "Tot(A+) -> N is a bijection commuting with d", s(180), criterion_4),
        (5, "splitting of the operadic complex", s(60), criterion_5),
        (6, "operadic and classical Hochschild homology agree", s(300), criterion_6),
        (7, "classical HH oracles", s(60), criterion_7),
        (8, "unreduced and reduced complexes agree", s(120), criterion_8),
    ];
    for (n, title, budget, f) in checks {
        if !run(n, title, budget, f) {
            unexpected.push(n);
        }
    }
    let t = Instant::now();
    let (pass, detail, expected) = criterion_9();
    let el = t.elapsed();
    let pass = pass && el <= s(900);
    println!(
        "{} criterion 9: loop space Betti numbers of the boundary of the 3-simplex match HH [{:.1} s, budget 900 s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        el.as_secs_f64()
    );
    if !expected {
        unexpected.push(9);
    }
    if !run(10, "selftest reports are byte-identical", s(60), criterion_10) {
        unexpected.push(10);
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
