//! The invariant suite behind `hochloop selftest`.
//!
//! Every check runs at small fixed bounds and reports one line. The report
//! contains no timings or addresses, so repeated runs are byte-identical.

use std::fmt;

use crate::dgmod::{tensor, DGModule};
use crate::error::Result;
use crate::exactlin::{homology_dim, kernel_basis, rank, Field, SparseMatrix};
use crate::hochschild::{self, ComparisonRow, CyclicSign, HochschildBounds};
use crate::loopmodel;
use crate::oalg::{dual_numbers, exterior, polynomial, sphere_model, Flavor, FreeAlgebra, Generator};
use crate::operads::{self, Ass, BarrattEccles, Com};
use crate::simplicial::{self, materialize};
use crate::sset::FiniteSimplicialSet;

const Q: Field = Field::Rational;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelftestOptions {
    /// Flip the sign of the cyclic term of the classical Hochschild
    /// differential.
    pub sign_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: &'static str, outcome: Result<(bool, String)>) {
        let (passed, detail) = match outcome {
            Ok(v) => v,
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{}\t{}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.failures().count();
        writeln!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

fn test_matrix(rows: usize, cols: usize, seed: i64) -> SparseMatrix {
    let dense: Vec<Vec<i64>> = (0..rows)
        .map(|i| (0..cols).map(|j| ((i as i64 * 7 + j as i64 * 3 + seed) * (seed + 5)).rem_euclid(5) - 2).collect())
        .collect();
    SparseMatrix::from_dense(&dense)
}

fn circle_chains() -> DGModule<(usize, usize)> {
    FiniteSimplicialSet::circle().normalized_chains()
}

fn graded_associative() -> Result<FreeAlgebra> {
    let mut a = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", -1), Generator::new("y", -2)]);
    a.set_differential(0, vec![(vec![0, 0], 1.into())])?;
    a.set_differential(1, vec![(vec![0, 1], 1.into()), (vec![1, 0], (-1).into())])?;
    Ok(a)
}

fn classical(a: &FreeAlgebra, b: &HochschildBounds, opts: SelftestOptions) -> Result<DGModule<hochschild::ChainLabel>> {
    let sign = if opts.sign_fault { CyclicSign::Flipped } else { CyclicSign::Standard };
    hochschild::classical_complex_with(a, b, sign)
}

fn all_iso(rows: &[ComparisonRow]) -> (bool, String) {
    let dims: Vec<String> = rows.iter().map(|r| format!("{}:{}/{}", r.degree, r.source, r.target)).collect();
    (rows.iter().all(ComparisonRow::is_iso), dims.join(" "))
}

/// Runs the suite.
pub fn run(opts: SelftestOptions) -> Report {
    let mut r = Report::default();

    // exactlin
    r.record("exactlin.rank_nullity", (|| {
        let mut ok = true;
        for seed in 0..6 {
            let m = test_matrix(7, 9, seed);
            ok &= rank(&m, Q) + kernel_basis(&m, Q).len() == 9;
        }
        Ok((ok, "6 matrices 7x9".into()))
    })());
    r.record("exactlin.prime_rank_bound", (|| {
        let m = test_matrix(8, 8, 3);
        let (q, p) = (rank(&m, Q), rank(&m, Field::prime(3)?));
        Ok((p <= q, format!("rank Q {q}, rank F3 {p}")))
    })());
    r.record("exactlin.composition_check", (|| {
        let d_out = SparseMatrix::from_dense(&[vec![1, 1]]);
        let bad = homology_dim(&SparseMatrix::from_dense(&[vec![1], vec![0]]), &d_out, Q).is_err();
        let good = homology_dim(&SparseMatrix::from_dense(&[vec![1], vec![-1]]), &d_out, Q)?;
        Ok((bad && good == 0, "nonzero composite rejected".into()))
    })());

    // dgmod
    r.record("dgmod.tensor_dsquare_kunneth", (|| {
        let c = circle_chains();
        let t = tensor(&c, &c);
        t.check_dsquare(Q)?;
        let dims = t.homology_dims(0..=2, Q)?;
        let got: Vec<usize> = dims.values().copied().collect();
        Ok((got == vec![1, 2, 1], format!("H(S1 x S1 chains) = {got:?}")))
    })());
    r.record("dgmod.suspend", (|| {
        let c = circle_chains();
        let s = c.suspend(3).suspend(-3);
        let same = (0..=1).all(|n| s.homology_dim(n, Q).ok() == c.homology_dim(n, Q).ok());
        Ok((same, "suspend(3) then suspend(-3)".into()))
    })());

    // sset
    r.record("sset.identities_and_betti", (|| {
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, x) in [("circle", FiniteSimplicialSet::circle()), ("S2", FiniteSimplicialSet::boundary_of_simplex(2))] {
            ok &= x.check_identities().is_empty();
            let b: Vec<usize> = x.normalized_chains().homology_dims(0..=x.dim() as i64, Q)?.into_values().collect();
            parts.push(format!("{name} {b:?}"));
        }
        ok &= parts == ["circle [1, 1]", "S2 [1, 0, 1]"];
        Ok((ok, parts.join(", ")))
    })());
    r.record("sset.product_euler", (|| {
        let c = FiniteSimplicialSet::circle();
        let s = FiniteSimplicialSet::boundary_of_simplex(1);
        let t = FiniteSimplicialSet::product(&c, &s, 10_000)?;
        let ok = t.euler_characteristic() == c.euler_characteristic() * s.euler_characteristic() && t.check_identities().is_empty();
        Ok((ok, format!("chi = {}", t.euler_characteristic())))
    })());

    // simplicial
    r.record("simplicial.tot_vs_normalization", (|| {
        let a = polynomial(Q, 2);
        let c = hochschild::cyclic_simplicial(&a, &HochschildBounds::new(3, 3))?;
        let s = materialize(&c, 3)?;
        let ids = s.check_simplicial_identities(Q);
        let (t, n) = simplicial::compare_tot_and_normalization(&s, 0..=2, Q)?;
        let ok = ids.is_empty() && t == n;
        Ok((ok, format!("{} identity failures, degrees 0..2", ids.len())))
    })());

    // oalg
    r.record("oalg.leibniz_dsquare", (|| {
        let s = sphere_model(Q);
        s.verify_dsquare(4)?;
        let g = graded_associative()?;
        g.verify_dsquare(4)?;
        let ok = s.check_leibniz(3).is_none() && g.check_leibniz(3).is_none();
        Ok((ok, "sphere model and a graded associative algebra".into()))
    })());

    // hochschild
    r.record("hochschild.classical_dsquare", (|| {
        let odd = FreeAlgebra::new(Flavor::Associative, Q, vec![Generator::new("x", 1), Generator::new("y", 1)]);
        for a in [sphere_model(Q), dual_numbers(Q), graded_associative()?, odd] {
            classical(&a, &HochschildBounds::new(3, 4), opts)?;
        }
        Ok((true, "4 algebras".into()))
    })());
    r.record("hochschild.dual_numbers", (|| {
        let b = HochschildBounds { degrees: Some(0..=4), ..HochschildBounds::new(5, 6) };
        let c = classical(&dual_numbers(Q), &b, opts)?;
        let got: Vec<usize> = c.homology_dims(0..=4, Q)?.into_values().collect();
        Ok((got == vec![2, 1, 1, 1, 1], format!("{got:?}")))
    })());
    r.record("hochschild.exterior", (|| {
        let b = HochschildBounds { degrees: Some(0..=5), ..HochschildBounds::new(4, 5) };
        let c = classical(&exterior(Q), &b, opts)?;
        let got: Vec<usize> = c.homology_dims(0..=5, Q)?.into_values().collect();
        Ok((got.iter().all(|&d| d == 1), format!("{got:?}")))
    })());
    r.record("hochschild.unreduced_comparison", (|| {
        let u = hochschild::unreduced_complex(&dual_numbers(Q), &HochschildBounds::new(4, 5))?;
        let bad = u.tot_map.verify(&u.normalization.tot, &u.classical, -1..=8, Q)?;
        let rows = hochschild::compare_homology(&u.tot_map, &u.normalization.tot, &u.classical, 0..=3, Q)?;
        let (iso, dims) = all_iso(&rows);
        Ok((bad.is_empty() && iso, dims))
    })());
    r.record("hochschild.plus_bijection_splitting", (|| {
        let o = hochschild::operadic_hc(&polynomial(Q, 2), &HochschildBounds::new(3, 4))?;
        let rep = o.theorem_b(100)?;
        o.splitting()?;
        Ok((rep.passed(), format!("{} degrees, {} products", rep.dims.len(), rep.products_checked)))
    })());
    r.record("hochschild.classical_comparison", (|| {
        let t = hochschild::theorem_a_compare(&sphere_model(Q), &HochschildBounds::new(2, 3))?;
        let bad = t.map.verify(&t.operadic.plus, &t.classical, -12..=2, Q)?;
        let rows = hochschild::compare_homology(&t.map, &t.operadic.plus, &t.classical, -3..=0, Q)?;
        let (iso, dims) = all_iso(&rows);
        Ok((bad.is_empty() && iso, dims))
    })());
    r.record("hochschild.phi_simplicial", (|| {
        let bad = hochschild::check_phi(&sphere_model(Q), 3, 3)?;
        Ok((bad.is_empty(), format!("{} failures", bad.len())))
    })());

    // operads
    r.record("operads.axioms", (|| {
        let e = BarrattEccles::new(10_000);
        let n = operads::check_operad(&Ass, 3, 0, Q)?.len() + operads::check_operad(&Com, 3, 0, Q)?.len() + operads::check_operad(&e, 3, 1, Q)?.len();
        let m = operads::check_operad_map(&e, &Com, &operads::EToCom, 3, 1)?.len() + operads::check_operad_map(&Ass, &e, &operads::AssToE, 3, 0)?.len();
        Ok((n + m == 0, format!("{} failures", n + m)))
    })());
    r.record("operads.acyclicity", (|| {
        let mut ok = true;
        for n in 2..=3 {
            for row in operads::barratt_eccles_acyclicity(n, 1..=3, 20_000, Q)? {
                ok &= row.acyclic();
            }
        }
        ok &= operads::contraction_certificate(4, 4).0;
        Ok((ok, "E(2), E(3) degrees 1..3; E(4) degree 4 by contraction".into()))
    })());
    r.record("operads.freeness", (|| {
        let (free, orbits) = operads::sigma_free(3, 2, 10_000)?;
        Ok((free, format!("E(3)_2 orbits {}", orbits.unwrap_or(0))))
    })());

    // loopmodel
    r.record("loopmodel.cosimplicial_identities", (|| {
        let x = FiniteSimplicialSet::boundary_of_simplex(2);
        let bad = loopmodel::check_cosimplicial_identities(&x, 2, 1);
        Ok((bad.is_empty(), format!("{} failures", bad.len())))
    })());
    r.record("loopmodel.cototal_dsquare_and_betti", (|| {
        let x = FiniteSimplicialSet::minimal_sphere(2);
        let c = loopmodel::cototal(&x, 2, -4, 1, 100_000)?;
        c.complex.check_dsquare(Q)?;
        let rows = loopmodel::loop_betti(&x, 2, 2, 100_000, Q)?;
        let got: Vec<usize> = rows.iter().map(|r| r.dim).collect();
        Ok((got == vec![1, 1, 1], format!("minimal S2, P = 2: {got:?}")))
    })());

    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes() {
        let r = run(SelftestOptions::default());
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn sign_fault_is_named() {
        let r = run(SelftestOptions { sign_fault: true });
        assert!(!r.passed());
        let names: Vec<&str> = r.failures().map(|c| c.name).collect();
        assert!(names.contains(&"hochschild.classical_dsquare"), "{names:?}");
    }
}
