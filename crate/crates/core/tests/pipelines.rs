//! End-to-end runs from input files through the complexes.

use std::path::PathBuf;

use hochloop::formats::{parse_algebra, parse_algebra_over, parse_facets};
use hochloop::hochschild::{self, HochschildBounds};
use hochloop::loopmodel;
use hochloop::oalg::sphere_model;
use hochloop::selftest::{self, SelftestOptions};
use hochloop::sset::f_vector;
use hochloop::{Error, Field};

const Q: Field = Field::Rational;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn dims(h: &std::collections::BTreeMap<i64, hochschild::StableDim>) -> Vec<usize> {
    h.values().map(|s| s.dim).collect()
}

#[test]
fn sphere_file_matches_builtin_model() {
    let a = parse_algebra(&data("sphere.alg")).unwrap();
    let b = HochschildBounds { degrees: Some(-4..=0), ..HochschildBounds::new(5, 6) };
    let from_file = hochschild::hh(&a, &b).unwrap();
    assert_eq!(from_file, hochschild::hh(&sphere_model(Q), &b).unwrap());
    assert_eq!(dims(&from_file), vec![1; 5]);
}

#[test]
fn dual_numbers_in_characteristic_two() {
    // over F_2 the differential 1[e^k] -> (1 + (-1)^k) e[e^(k-1)] vanishes
    let a = parse_algebra_over(&data("dual_numbers.alg"), Some(Field::Prime(2))).unwrap();
    let b = HochschildBounds { degrees: Some(0..=4), ..HochschildBounds::new(5, 6) };
    assert_eq!(dims(&hochschild::hh(&a, &b).unwrap()), vec![2; 5]);
    let a = parse_algebra_over(&data("dual_numbers.alg"), Some(Field::Prime(3))).unwrap();
    assert_eq!(dims(&hochschild::hh(&a, &b).unwrap()), vec![2, 1, 1, 1, 1]);
}

#[test]
fn corrupted_file_is_rejected() {
    let e = parse_algebra(&data("corrupted.alg")).unwrap_err();
    assert!(matches!(e, Error::DSquareNonzero { .. }), "{e:?}");
}

#[test]
fn operadic_pipeline_on_polynomial_file() {
    let a = parse_algebra(&data("polynomial.alg")).unwrap();
    let b = HochschildBounds { degrees: Some(0..=4), ..HochschildBounds::new(3, 4) };
    let o = hochschild::ohh(&a, &b).unwrap();
    let c = hochschild::hh(&a, &b).unwrap();
    for (n, s) in &o {
        if s.stable && c[n].stable {
            assert_eq!(s.dim, c[n].dim, "degree {n}");
        }
    }
    let oc = hochschild::operadic_hc(&a, &b).unwrap();
    assert!(oc.theorem_b(50).unwrap().passed());
    oc.splitting().unwrap();
}

#[test]
fn facet_files() {
    let x = parse_facets(&data("boundary_tetrahedron.facets")).unwrap();
    assert_eq!(f_vector(&x), vec![4, 6, 4]);
    let h = x.normalized_chains().homology_dims(0..=2, Q).unwrap();
    assert_eq!(h.into_values().collect::<Vec<_>>(), vec![1, 0, 1]);
    loopmodel::simply_connected_proxy(&x, Q).unwrap();

    let t = parse_facets(&data("torus.facets")).unwrap();
    assert_eq!(f_vector(&t), vec![7, 21, 14]);
    let h = t.normalized_chains().homology_dims(0..=2, Q).unwrap();
    assert_eq!(h.into_values().collect::<Vec<_>>(), vec![1, 2, 1]);
    assert_eq!(loopmodel::loop_betti(&t, 1, 1, 10_000, Q).unwrap_err(), Error::NotSimplyConnectedProxy { dim: 2 });

    let p = parse_facets(&data("point.facets")).unwrap();
    let rows = loopmodel::loop_betti(&p, 2, 2, 1000, Q).unwrap();
    assert_eq!(rows.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![1, 0, 0]);
}

#[test]
fn boundary_tetrahedron_loop_space() {
    let x = parse_facets(&data("boundary_tetrahedron.facets")).unwrap();
    let rows = loopmodel::loop_betti(&x, 2, 2, 200_000, Q).unwrap();
    assert_eq!(rows.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![1, 1, 1]);
    assert!(rows.iter().all(|r| r.stable));
}

#[test]
fn selftest_is_deterministic_and_sensitive() {
    let a = selftest::run(SelftestOptions::default()).to_string();
    let b = selftest::run(SelftestOptions::default()).to_string();
    assert_eq!(a, b);
    assert!(!a.contains("FAIL"), "{a}");
    let f = selftest::run(SelftestOptions { sign_fault: true });
    let failed: Vec<&str> = f.failures().map(|c| c.name).collect();
    assert!(failed.contains(&"hochschild.classical_dsquare"), "{failed:?}");
}
