//! Text input formats.
//!
//! Algebra files are line oriented; `#` starts a comment:
//!
//! ```text
//! field Q
//! flavor commutative
//! grading upper
//! gen x 2
//! gen y 3
//! d y = x^2
//! ```
//!
//! `grading upper` means the listed degrees are cohomological (stored
//! negated). `truncate x 2` imposes `x^2 = 0`. Differentials are sums of
//! monomials with rational coefficients, `*` for products and `^` for powers.
//! A key may be followed by `=`.
//!
//! Simplicial complexes are facet lists: one facet per line, vertex names
//! separated by whitespace or commas. Vertices are ordered by first
//! appearance.

use std::collections::HashMap;

use crate::dgmod::Lin;
use crate::error::{Error, Result};
use crate::exactlin::{Field, Rational};
use crate::oalg::{Flavor, FreeAlgebra, Generator, Word};
use crate::sset::FiniteSimplicialSet;

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Splits a line into whitespace-separated tokens with 1-based columns,
/// after removing a comment.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

/// Parses an algebra file.
pub fn parse_algebra(text: &str) -> Result<FreeAlgebra> {
    parse_algebra_over(text, None)
}

/// Parses an algebra file; `field`, when given, replaces the file's `field`
/// line.
pub fn parse_algebra_over(text: &str, over: Option<Field>) -> Result<FreeAlgebra> {
    let mut field = Field::Rational;
    let mut flavor = Flavor::Commutative;
    let mut upper = false;
    let mut gens: Vec<(usize, Generator)> = Vec::new();
    let mut diffs: Vec<(usize, usize, String, String)> = Vec::new();
    let mut truncations: Vec<(usize, usize, String, u32)> = Vec::new();
    let mut seen_gen = false;
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let toks = tokens(raw);
        let Some(&(col, key)) = toks.first() else { continue };
        let rest: Vec<(usize, &str)> = toks[1..].iter().copied().filter(|(_, t)| *t != "=").collect();
        let need = |n: usize| -> Result<()> {
            if rest.len() < n {
                Err(perr(ln, col, format!("`{key}` expects {n} argument(s)")))
            } else {
                Ok(())
            }
        };
        match key {
            "field" => {
                need(1)?;
                if seen_gen {
                    return Err(perr(ln, col, "`field` must come before the generators"));
                }
                field = rest[0].1.parse().map_err(|e| match e {
                    Error::Parse { message, .. } => perr(ln, rest[0].0, message),
                    other => perr(ln, rest[0].0, other.to_string()),
                })?;
            }
            "flavor" => {
                need(1)?;
                flavor = match rest[0].1 {
                    "commutative" | "com" | "C" => Flavor::Commutative,
                    "associative" | "ass" | "A" => Flavor::Associative,
                    other => return Err(perr(ln, rest[0].0, format!("unknown flavor `{other}`"))),
                };
            }
            "grading" => {
                need(1)?;
                upper = match rest[0].1 {
                    "upper" | "cohomological" => true,
                    "lower" | "homological" => false,
                    other => return Err(perr(ln, rest[0].0, format!("unknown grading `{other}`"))),
                };
            }
            "gen" => {
                need(2)?;
                seen_gen = true;
                let name = rest[0].1;
                if !name.chars().next().is_some_and(|c| c.is_alphabetic()) || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(perr(ln, rest[0].0, format!("invalid generator name `{name}`")));
                }
                if gens.iter().any(|(_, g)| g.name == name) {
                    return Err(perr(ln, rest[0].0, format!("generator `{name}` declared twice")));
                }
                let deg: i64 = rest[1].1.parse().map_err(|_| perr(ln, rest[1].0, format!("invalid degree `{}`", rest[1].1)))?;
                gens.push((ln, Generator::new(name, deg)));
            }
            "d" => {
                need(1)?;
                let name = rest[0].1.to_string();
                // the expression is everything after the `=`
                let body = raw.split('#').next().unwrap_or("");
                let Some(eq) = body.find('=') else {
                    return Err(perr(ln, col, "expected `d NAME = expression`"));
                };
                diffs.push((ln, eq + 2, name, body[eq + 1..].to_string()));
            }
            "truncate" => {
                need(2)?;
                let h: u32 = rest[1].1.parse().map_err(|_| perr(ln, rest[1].0, format!("invalid height `{}`", rest[1].1)))?;
                if h < 1 {
                    return Err(perr(ln, rest[1].0, "height must be at least 1"));
                }
                truncations.push((ln, rest[0].0, rest[0].1.to_string(), h));
            }
            other => return Err(perr(ln, col, format!("unknown key `{other}`"))),
        }
    }
    let mut gs: Vec<Generator> = gens.into_iter().map(|(_, g)| g).collect();
    if upper {
        for g in &mut gs {
            g.degree = -g.degree;
        }
    }
    for (ln, col, name, h) in &truncations {
        let g = gs.iter_mut().find(|g| g.name == *name).ok_or_else(|| perr(*ln, *col, format!("unknown generator `{name}`")))?;
        g.nilpotency = Some(*h);
    }
    let field = over.unwrap_or(field);
    check_finite_type(flavor, field, &gs)?;
    let mut a = FreeAlgebra::new(flavor, field, gs);
    let mut defined: HashMap<usize, usize> = HashMap::new();
    for (ln, col, name, expr) in diffs {
        let g = a.generator_index(&name).ok_or_else(|| perr(ln, 3, format!("unknown generator `{name}`")))?;
        if let Some(prev) = defined.insert(g, ln) {
            return Err(perr(ln, 1, format!("d({name}) already given on line {prev}")));
        }
        let v = parse_expression(&a, &expr, ln, col)?;
        for (w, _) in &v {
            let want = a.gens[g].degree - 1;
            if a.degree(w) != want {
                return Err(perr(
                    ln,
                    col,
                    format!("d({name}) has a term {} of degree {}, expected {want}", a.format_word(w), a.degree(w)),
                ));
            }
        }
        a.set_differential(g, v)?;
    }
    // d² = 0 on generators implies d² = 0, d² being a derivation
    a.verify_dsquare(1)?;
    Ok(a)
}

/// Generators that are neither truncated nor odd in a commutative algebra
/// (where they square to zero) must all sit in lower degrees `≥ 1` or all in
/// degrees `≤ -2`.
fn check_finite_type(flavor: Flavor, field: Field, gens: &[Generator]) -> Result<()> {
    let exterior = |g: &Generator| flavor == Flavor::Commutative && g.degree % 2 != 0 && field.characteristic() != 2;
    let free: Vec<&Generator> = gens.iter().filter(|g| g.nilpotency.is_none() && !exterior(g)).collect();
    let positive = free.iter().all(|g| g.degree >= 1);
    let negative = free.iter().all(|g| g.degree <= -2);
    if positive || negative {
        Ok(())
    } else {
        let names: Vec<String> = free.iter().map(|g| format!("{}:{}", g.name, g.degree)).collect();
        Err(Error::NotFiniteType(format!(
            "untruncated generators must all have lower degree ≥ 1 or all ≤ -2; got {}",
            names.join(", ")
        )))
    }
}

/// Parses `c1 m1 + c2 m2 - …` where each monomial is `name` or `name^k`
/// joined by `*`. `column` is the column of the first character of `expr`.
pub fn parse_expression(a: &FreeAlgebra, expr: &str, line: usize, column: usize) -> Result<Lin<Word>> {
    let chars: Vec<char> = expr.chars().collect();
    let mut i = 0;
    let col = |i: usize| column + i;
    let skip = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    let number = |i: &mut usize| -> Option<i64> {
        let s = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        (s < *i).then(|| chars[s..*i].iter().collect::<String>().parse().ok()).flatten()
    };
    let mut out: Lin<Word> = Vec::new();
    let mut first = true;
    skip(&mut i);
    if i == chars.len() {
        return Err(perr(line, col(i), "empty expression"));
    }
    while i < chars.len() {
        skip(&mut i);
        let mut sgn = 1i64;
        if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
            if chars[i] == '-' {
                sgn = -1;
            }
            i += 1;
            skip(&mut i);
        } else if !first {
            return Err(perr(line, col(i), format!("expected `+` or `-`, found `{}`", chars[i])));
        }
        first = false;
        let mut coeff = Rational::from_integer(sgn);
        let mut word: Word = Vec::new();
        let mut has_factor = false;
        if i < chars.len() && chars[i].is_ascii_digit() {
            let start = i;
            let n = number(&mut i).ok_or_else(|| perr(line, col(start), "number too large"))?;
            let mut c = Rational::from_integer(n);
            if i < chars.len() && chars[i] == '/' {
                i += 1;
                let ds = i;
                let d = number(&mut i).ok_or_else(|| perr(line, col(ds), "expected a denominator"))?;
                if d == 0 {
                    return Err(perr(line, col(ds), "zero denominator"));
                }
                c /= Rational::from_integer(d);
            }
            coeff *= c;
            skip(&mut i);
            if i < chars.len() && chars[i] == '*' {
                i += 1;
                skip(&mut i);
            } else {
                has_factor = true;
            }
        }
        loop {
            if i >= chars.len() || !chars[i].is_alphabetic() {
                if !has_factor {
                    let found = chars.get(i).map_or("end of line".to_string(), |c| format!("`{c}`"));
                    return Err(perr(line, col(i), format!("expected a generator, found {found}")));
                }
                break;
            }
            let s = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[s..i].iter().collect();
            let g = a.generator_index(&name).ok_or_else(|| perr(line, col(s), format!("unknown generator `{name}`")))?;
            let mut power = 1;
            skip(&mut i);
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                skip(&mut i);
                let ps = i;
                power = number(&mut i).ok_or_else(|| perr(line, col(ps), "expected an exponent"))?;
            }
            word.extend(std::iter::repeat(g as u16).take(power as usize));
            skip(&mut i);
            if i < chars.len() && chars[i] == '*' {
                i += 1;
                skip(&mut i);
                has_factor = false;
            } else {
                break;
            }
        }
        if matches!(a.field, Field::Prime(_)) && a.field.reduce(&coeff).is_err() {
            return Err(perr(line, column, format!("coefficient {coeff} is not defined over {}", a.field)));
        }
        if let Some((s, w)) = a.canonical(&word) {
            out.push((w, coeff * s));
        }
        skip(&mut i);
    }
    Ok(crate::dgmod::normalize_lin(out))
}

/// Parses a facet list into a simplicial set.
pub fn parse_facets(text: &str) -> Result<FiniteSimplicialSet> {
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.replace(',', " ");
        let toks = tokens(&line);
        if toks.is_empty() {
            continue;
        }
        let mut facet = Vec::new();
        for (col, t) in toks {
            let v = *index.entry(t.to_string()).or_insert_with(|| {
                names.push(t.to_string());
                names.len() - 1
            });
            if facet.contains(&v) {
                return Err(perr(ln, col, format!("vertex `{t}` repeated in a facet")));
            }
            facet.push(v);
        }
        facet.sort();
        facets.push(facet);
    }
    if facets.is_empty() {
        return Err(perr(1, 1, "no facets"));
    }
    let named: Vec<Vec<VertexName>> = facets.iter().map(|f| f.iter().map(|&v| VertexName(v, names[v].clone())).collect()).collect();
    FiniteSimplicialSet::from_facets(&named)
}

/// A vertex ordered by first appearance and displayed by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct VertexName(usize, String);

impl std::fmt::Display for VertexName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}
