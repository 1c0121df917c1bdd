use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hochloop::formats::{parse_algebra_over, parse_facets};
use hochloop::hochschild::{self, HochschildBounds};
use hochloop::loopmodel;
use hochloop::oalg::{Flavor, FreeAlgebra};
use hochloop::operads::{self, BarrattEccles};
use hochloop::selftest::{self, SelftestOptions};
use hochloop::sset::{f_vector, FiniteSimplicialSet, CAP_ENV, DEFAULT_CAP};
use hochloop::{Error, Field};

mod report;

use report::{Report, Status};

#[derive(Parser)]
#[command(name = "hochloop", version, about = "Exact Hochschild homology, operadic Hochschild complexes and free loop space models")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Coefficient field: Q or Fp (e.g. F3). Overrides the algebra file.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Largest degree reported (absolute value).
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Largest tensor length of the classical complex.
    #[arg(long, global = true)]
    max_length: Option<usize>,
    /// Largest total word length.
    #[arg(long, global = true)]
    max_weight: Option<usize>,
    /// Largest simplicial or cosimplicial level.
    #[arg(long, global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Size cap on enumerated bases.
    #[arg(long, global = true, env = CAP_ENV, default_value_t = DEFAULT_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    Point,
    Circle,
    /// The 2-sphere with one vertex and one nondegenerate 2-simplex.
    MinimalS2,
    /// The boundary of the 3-simplex.
    BoundaryTetrahedron,
}

#[derive(Subcommand)]
enum Command {
    /// Hochschild homology from the classical complex.
    Hh { file: PathBuf },
    /// Homology of the operadic Hochschild complex, with comparison checks.
    Ohh { file: PathBuf },
    /// Betti numbers of the cochain model of the free loop space.
    Loop {
        /// Facet list of a simplicial complex.
        #[arg(required_unless_present = "space", conflicts_with = "space")]
        facets: Option<PathBuf>,
        #[arg(long, value_enum)]
        space: Option<Space>,
        /// Commutative model whose Hochschild homology is compared.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Dimensions and homology of the Barratt-Eccles complex E(n).
    Bar {
        #[arg(long, default_value_t = 3)]
        arity: usize,
    },
    /// Runs the invariant suite.
    Selftest {
        /// Flips the cyclic sign of the classical differential.
        #[arg(long, hide = true)]
        inject_sign_fault: bool,
    },
}

/// Failures mapped to exit codes.
enum Failure {
    Input(String),
    Verification(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::SizeLimitExceeded { .. } => Failure::Cap(msg),
            Error::DSquareNonzero { .. }
            | Error::CompositionNotZero { .. }
            | Error::NotClosed { .. }
            | Error::MixingDetected { .. }
            | Error::Shape(_)
            | Error::LabelOutOfBasis { .. } => Failure::Verification(msg),
            Error::NotSimplyConnectedProxy { .. }
            | Error::NotPrime(_)
            | Error::Coefficient(_)
            | Error::NotFiniteType(_)
            | Error::InvalidBounds(_)
            | Error::Parse { .. }
            | Error::Unsupported(_) => Failure::Input(msg),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn field_arg(c: &Common) -> std::result::Result<Option<Field>, Failure> {
    c.field.as_deref().map(|s| s.parse::<Field>().map_err(Failure::from)).transpose()
}

fn load_algebra(path: &Path, c: &Common) -> std::result::Result<FreeAlgebra, Failure> {
    let text = read(path)?;
    parse_algebra_over(&text, field_arg(c)?).map_err(|e| match e {
        Error::Parse { line, column, message } => Failure::Input(format!("{}:{line}:{column}: {message}", path.display())),
        other => other.into(),
    })
}

/// Degrees where homology can live: nonnegative for homologically graded
/// algebras, nonpositive for cohomologically graded ones.
fn window(a: &FreeAlgebra, m: usize) -> RangeInclusive<i64> {
    let m = m as i64;
    let up = a.gens.iter().all(|g| g.degree >= 0);
    let down = a.gens.iter().all(|g| g.degree <= 0);
    match (up, down) {
        (true, _) => 0..=m,
        (false, true) => -m..=0,
        _ => -m..=m,
    }
}

fn positive(name: &str, v: usize) -> std::result::Result<usize, Failure> {
    if v == 0 {
        Err(Failure::Input(format!("--{name} must be positive")))
    } else {
        Ok(v)
    }
}

fn config(c: &Common, field: Field, extra: &[(&'static str, String)]) -> Vec<(&'static str, String)> {
    let mut v = vec![("field", field.to_string())];
    v.extend(extra.iter().cloned());
    v.push(("cap", c.cap.to_string()));
    v.push(("grading", "homological; cohomological degree q is printed as -q".into()));
    v
}

fn cmd_hh(file: &Path, c: &Common) -> Outcome {
    let a = load_algebra(file, c)?;
    let (l, w, m) = (positive("max-length", c.max_length.unwrap_or(5))?, positive("max-weight", c.max_weight.unwrap_or(6))?, c.max_degree.unwrap_or(4));
    let degrees = window(&a, m);
    let b = HochschildBounds { degrees: Some(degrees.clone()), ..HochschildBounds::new(l, w) };
    let cfg = config(
        c,
        a.field,
        &[
            ("input", file.display().to_string()),
            ("flavor", a.flavor.to_string()),
            ("max-length", l.to_string()),
            ("max-weight", w.to_string()),
            ("degrees", format!("{}..{}", degrees.start(), degrees.end())),
            ("stability", "unchanged when length and weight grow by one".into()),
        ],
    );
    let mut r = Report::new("hh", cfg, vec!["degree", "dim", "stable"]);
    for (n, s) in hochschild::hh(&a, &b)? {
        r.row(vec![json!(n), json!(s.dim), json!(s.stable)]);
    }
    Ok(r)
}

fn cmd_ohh(file: &Path, c: &Common) -> Outcome {
    let a = load_algebra(file, c)?;
    let (p, w, m) = (positive("max-level", c.max_level.unwrap_or(3))?, positive("max-weight", c.max_weight.unwrap_or(4))?, c.max_degree.unwrap_or(4));
    let degrees = window(&a, m);
    let b = HochschildBounds { degrees: Some(degrees.clone()), ..HochschildBounds::new(p, w) };
    let commutative = a.flavor == Flavor::Commutative;
    let cfg = config(
        c,
        a.field,
        &[
            ("input", file.display().to_string()),
            ("flavor", a.flavor.to_string()),
            ("max-level", p.to_string()),
            ("max-weight", w.to_string()),
            ("degrees", format!("{}..{}", degrees.start(), degrees.end())),
            ("stability", "unchanged when level and weight grow by one".into()),
        ],
    );
    let mut r = Report::new("ohh", cfg, vec!["degree", "dim", "stable", "classical", "classical_stable"]);
    let operadic = hochschild::ohh(&a, &b)?;
    let classical = if commutative { Some(hochschild::hh(&a, &b)?) } else { None };
    for (n, s) in &operadic {
        let cl = classical.as_ref().map(|h| h[n]);
        r.row(vec![json!(n), json!(s.dim), json!(s.stable), json!(cl.map(|x| x.dim)), json!(cl.map(|x| x.stable))]);
    }

    let o = hochschild::operadic_hc(&a, &b)?;
    let rep = o.theorem_b(200)?;
    r.check(
        "plus-normalization-bijection",
        Status::from_bool(rep.passed()),
        format!(
            "{} degrees, labels equal: {}, differential mismatches {}, products {}/{} positive",
            rep.dims.len(),
            rep.bijection,
            rep.differential_mismatches,
            rep.products_checked - rep.product_failures,
            rep.products_checked
        ),
    );
    match o.splitting() {
        Ok((zero, pos)) => r.check(
            "splitting",
            Status::Pass,
            format!("level-0 summand {} basis elements, positive part {}", zero.module().total_dim(), pos.module().total_dim()),
        ),
        Err(e @ Error::MixingDetected { .. }) => r.check("splitting", Status::Fail, e.to_string()),
        Err(e) => return Err(e.into()),
    }
    match &classical {
        None => r.check("classical-comparison", Status::Skip, "needs a commutative algebra"),
        Some(h) => {
            let stable: Vec<i64> = operadic.iter().filter(|(n, s)| s.stable && h[*n].stable).map(|(n, _)| *n).collect();
            let t = hochschild::theorem_a_compare(&a, &b)?;
            let bad = t.map.verify(&t.operadic.plus, &t.classical, *degrees.start() - 1..=*degrees.end() + 1, a.field)?;
            let rows = hochschild::compare_homology(&t.map, &t.operadic.plus, &t.classical, stable.iter().copied(), a.field)?;
            let iso = rows.iter().all(hochschild::ComparisonRow::is_iso);
            let detail: Vec<String> = rows.iter().map(|x| format!("{}:{}/{}/rank {}", x.degree, x.source, x.target, x.induced_rank)).collect();
            let ok = bad.is_empty() && iso && !rows.is_empty();
            let detail = if rows.is_empty() { "no degree is stable in both complexes".to_string() } else { format!("stable degrees {}", detail.join(" ")) };
            r.check("classical-comparison", Status::from_bool(ok), detail);
        }
    }
    Ok(r)
}

fn cmd_loop(facets: Option<&Path>, space: Option<Space>, model: Option<&Path>, c: &Common) -> Outcome {
    let field = field_arg(c)?.unwrap_or(Field::Rational);
    let (x, input) = match (facets, space) {
        (Some(f), _) => (parse_facets(&read(f)?).map_err(|e| match e {
            Error::Parse { line, column, message } => Failure::Input(format!("{}:{line}:{column}: {message}", f.display())),
            other => other.into(),
        })?, f.display().to_string()),
        (None, Some(s)) => {
            let (x, name) = match s {
                Space::Point => (FiniteSimplicialSet::point(), "point"),
                Space::Circle => (FiniteSimplicialSet::circle(), "circle"),
                Space::MinimalS2 => (FiniteSimplicialSet::minimal_sphere(2), "minimal-s2"),
                Space::BoundaryTetrahedron => (FiniteSimplicialSet::boundary_of_simplex(2), "boundary-tetrahedron"),
            };
            (x, name.to_string())
        }
        (None, None) => return Err(Failure::Input("a facet file or --space is required".into())),
    };
    let p = c.max_level.unwrap_or(2);
    let m = c.max_degree.unwrap_or(2);
    let mut extra = vec![
        ("input", input),
        ("simplices", format!("{:?}", f_vector(&x))),
        ("max-level", p.to_string()),
        ("max-degree", m.to_string()),
        ("stability", format!("degrees <= max-level; confirmed by recomputing at level {}", p + 1)),
    ];
    let (l, w) = (positive("max-length", c.max_length.unwrap_or(5))?, positive("max-weight", c.max_weight.unwrap_or(6))?);
    if let Some(mp) = model {
        extra.push(("model", mp.display().to_string()));
        extra.push(("model-max-length", l.to_string()));
        extra.push(("model-max-weight", w.to_string()));
    }
    let mut r = Report::new("loop", config(c, field, &extra), vec!["degree", "dim", "stable", "confirmed"]);
    let rows = loopmodel::loop_betti(&x, p, m, c.cap, field)?;
    for row in &rows {
        r.row(vec![json!(row.degree), json!(row.dim), json!(row.stable), row.confirmed.map_or(Value::Null, Value::Bool)]);
    }
    if let Some(mp) = model {
        let a = load_algebra(mp, c)?;
        if a.field != field {
            return Err(Failure::Input(format!("model field {} differs from {field}", a.field)));
        }
        let b = HochschildBounds { degrees: Some(-(m as i64)..=0), ..HochschildBounds::new(l, w) };
        let h = hochschild::hh(&a, &b)?;
        let mut compared = Vec::new();
        let mut ok = true;
        for row in rows.iter().filter(|row| row.stable) {
            let s = h[&-(row.degree as i64)];
            if s.stable {
                ok &= s.dim == row.dim;
                compared.push(format!("{}:{}/{}", row.degree, row.dim, s.dim));
            }
        }
        let status = Status::from_bool(ok && !compared.is_empty());
        let detail = if compared.is_empty() { "no degree is stable on both sides".to_string() } else { format!("degree:loop/hh {}", compared.join(" ")) };
        r.check("agreement", status, detail);
    }
    Ok(r)
}

fn cmd_bar(n: usize, c: &Common) -> Outcome {
    let field = field_arg(c)?.unwrap_or(Field::Rational);
    if n == 0 || n > 6 {
        return Err(Failure::Input("--arity must be between 1 and 6".into()));
    }
    let d_max = c.max_degree.unwrap_or(8);
    let cfg = config(
        c,
        field,
        &[("arity", n.to_string()), ("max-degree", d_max.to_string()), ("dim", "basis of E(n)_d modulo the symmetric group".into())],
    );
    let mut r = Report::new("bar", cfg, vec!["degree", "dim", "total_dim", "homology", "method"]);
    let op = BarrattEccles::new(c.cap);
    let h0 = operads::arity_module(&op, n, 1)?.homology_dim(0, field)?;
    r.row(vec![json!(0), json!(BarrattEccles::coinvariant_dimension(n, 0).to_string()), json!(BarrattEccles::dimension(n, 0).to_string()), json!(h0), json!("rank")]);
    let mut acyclic = h0 == 1;
    if d_max >= 1 {
        for row in operads::barratt_eccles_acyclicity(n, 1..=d_max, c.cap, field)? {
            acyclic &= row.acyclic();
            let method = match row.method {
                operads::AcyclicityMethod::Rank => "rank".to_string(),
                operads::AcyclicityMethod::Contraction => format!("contraction ({} representatives)", row.representatives),
            };
            r.row(vec![
                json!(row.degree),
                json!(BarrattEccles::coinvariant_dimension(n, row.degree).to_string()),
                json!(row.dimension.to_string()),
                row.homology.map_or(Value::Null, |h| json!(h)),
                json!(method),
            ]);
        }
    }
    r.check("acyclic", Status::from_bool(acyclic), format!("H_0 = {h0}, higher homology zero through degree {d_max}"));
    let mut free = true;
    let mut counted = 0;
    for d in 0..=d_max {
        let (f, orbits) = operads::sigma_free(n, d, 20_000)?;
        free &= f;
        counted += orbits.is_some() as usize;
    }
    r.check(
        "sigma-free",
        Status::from_bool(free),
        format!("orbit count in {counted} degrees, stabilizer argument in {}", d_max + 1 - counted),
    );
    Ok(r)
}

fn cmd_selftest(fault: bool) -> Outcome {
    let rep = selftest::run(SelftestOptions { sign_fault: fault });
    let mut r = Report::new("selftest", vec![("field", "Q".into()), ("bounds", "fixed small bounds per check".into())], vec![]);
    for ch in &rep.checks {
        r.check(ch.name, Status::from_bool(ch.passed), ch.detail.clone());
    }
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let out = match &cli.command {
        Command::Hh { file } => cmd_hh(file, c),
        Command::Ohh { file } => cmd_ohh(file, c),
        Command::Loop { facets, space, model } => cmd_loop(facets.as_deref(), *space, model.as_deref(), c),
        Command::Bar { arity } => cmd_bar(*arity, c),
        Command::Selftest { inject_sign_fault } => cmd_selftest(*inject_sign_fault),
    };
    match out {
        Ok(r) => {
            let text = match c.format {
                Format::Tsv => r.tsv(),
                Format::Structured => r.structured(),
            };
            print!("{text}");
            if r.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("error: {m}; raise --cap or {CAP_ENV}");
            ExitCode::from(3)
        }
    }
}
