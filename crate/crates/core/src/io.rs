//! Text formats: DIMACS graphs, FPHP instances, polynomial systems, cutting
//! planes systems, OPB export and Nullstellensatz certificates.
//!
//! Every `format_*` has a matching `parse_*` with `parse(format(x)) == x`.
//! Proof formats (PC and CP JSON lines) live next to their proof types.

use std::fmt::Write as _;

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::algebra::text::{format_cap, format_field_header, format_polynomial, parse_cap, parse_field_header, parse_polynomial};
use crate::cutplanes::CpLine;
use crate::encodings::{Axiom, AxiomTag, CpSystem, FphpInstance, Graph, PolySystem};
use crate::nullsatz::NssCertificate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

/// Non-empty lines that are not comments (`c` or `c ...` in DIMACS, `#...`
/// elsewhere), numbered from 1.
fn content_lines<'a>(text: &'a str, comment: &'static str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    let is_comment = move |l: &str| match comment {
        "c" => l == "c" || l.starts_with("c "),
        _ => l.starts_with(comment),
    };
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(move |(_, l)| !l.is_empty() && !is_comment(l))
}

/// `p edge n m` followed by `e u v`, vertices 1-indexed.
pub fn format_dimacs(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.n_vertices(), g.n_edges());
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    s
}

pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut n = None;
    let mut declared = 0usize;
    let mut edges = Vec::new();
    for (ln, l) in content_lines(text, "c") {
        let w: Vec<&str> = l.split_whitespace().collect();
        match w.as_slice() {
            ["p", "edge" | "col", nv, ne] => {
                n = Some(nv.parse::<usize>().map_err(|_| err(ln, "bad vertex count"))?);
                declared = ne.parse().map_err(|_| err(ln, "bad edge count"))?;
            }
            ["e", u, v] => {
                let p = |s: &str| s.parse::<u32>().ok().filter(|&x| x >= 1).ok_or_else(|| err(ln, "bad vertex"));
                edges.push((p(u)? - 1, p(v)? - 1));
            }
            _ => return Err(err(ln, format!("unexpected {l:?}"))),
        }
    }
    let n = n.ok_or_else(|| err(0, "missing p line"))?;
    if edges.len() != declared {
        return Err(err(0, format!("declared {declared} edges, found {}", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| err(0, e.to_string()))
}

/// `fphp pigeons=<n> holes=<h> k=<k>`, then one line of 0-based holes per
/// pigeon in edge order.
pub fn format_fphp(b: &FphpInstance) -> String {
    let mut s = format!("fphp pigeons={} holes={} k={}\n", b.n_pigeons(), b.n_holes(), b.k());
    for row in b.all_neighbours() {
        let r: Vec<String> = row.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "{}", r.join(" "));
    }
    s
}

fn header_fields<'a>(ln: usize, l: &'a str, word: &str, keys: &[&str]) -> Result<Vec<&'a str>, ParseError> {
    let mut it = l.split_whitespace();
    if it.next() != Some(word) {
        return Err(err(ln, format!("expected {word} header")));
    }
    let mut out = vec![""; keys.len()];
    for tok in it {
        let (k, v) = tok.split_once('=').ok_or_else(|| err(ln, format!("bad token {tok}")))?;
        let pos = keys.iter().position(|&x| x == k).ok_or_else(|| err(ln, format!("unknown key {k}")))?;
        out[pos] = v;
    }
    if let Some(i) = out.iter().position(|v| v.is_empty()) {
        return Err(err(ln, format!("missing {}", keys[i])));
    }
    Ok(out)
}

pub fn parse_fphp(text: &str) -> Result<FphpInstance, ParseError> {
    let mut lines = content_lines(text, "#");
    let (ln, head) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let f = header_fields(ln, head, "fphp", &["pigeons", "holes", "k"])?;
    let num = |s: &str| s.parse::<usize>().map_err(|_| err(ln, format!("bad number {s}")));
    let (n, h, k) = (num(f[0])?, num(f[1])?, num(f[2])?);
    let mut rows = Vec::with_capacity(n);
    for (ln, l) in lines {
        let row: Result<Vec<u32>, _> = l.split_whitespace().map(str::parse::<u32>).collect();
        rows.push(row.map_err(|_| err(ln, "bad hole"))?);
    }
    if rows.len() != n {
        return Err(err(0, format!("declared {n} pigeons, found {}", rows.len())));
    }
    FphpInstance::new(h, k, rows).map_err(|e| err(0, e.to_string()))
}

/// Field and cap headers, `vars <name>...`, then `<tag>: <polynomial>` per
/// axiom.
pub fn format_poly_system(sys: &PolySystem) -> String {
    let mut s = format!("{}\n{}\nvars", format_field_header(&sys.field), format_cap(sys.cap));
    for name in &sys.var_names {
        s.push(' ');
        s.push_str(name);
    }
    s.push('\n');
    for a in &sys.axioms {
        let _ = writeln!(s, "{}: {}", a.tag.name(), format_polynomial(&a.poly));
    }
    s
}

pub fn parse_poly_system(text: &str) -> Result<PolySystem, ParseError> {
    let mut lines = content_lines(text, "#");
    let (ln, l) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let field = parse_field_header(l).map_err(|e| err(ln, e.to_string()))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing cap"))?;
    let cap = parse_cap(l).map_err(|e| err(ln, e.to_string()))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing vars"))?;
    let var_names: Vec<String> = match l.strip_prefix("vars") {
        Some(rest) => rest.split_whitespace().map(String::from).collect(),
        None => return Err(err(ln, "expected vars line")),
    };
    let mut axioms = Vec::new();
    for (ln, l) in lines {
        let (tag, poly) = l.split_once(':').ok_or_else(|| err(ln, "expected <tag>: <polynomial>"))?;
        let tag = AxiomTag::from_name(tag.trim()).ok_or_else(|| err(ln, format!("unknown tag {tag}")))?;
        let poly = parse_polynomial(poly, &field, cap).map_err(|e| err(ln, e.to_string()))?;
        if let Some(&x) = poly.variables().last() {
            if x as usize >= var_names.len() {
                return Err(err(ln, format!("variable x_{x} not declared")));
            }
        }
        axioms.push(Axiom { poly, tag });
    }
    Ok(PolySystem { field, cap, axioms, var_names })
}

/// `a*x_i + b*x_j >= g`, or `0 >= g` with no terms.
pub fn parse_cp_line(s: &str) -> Result<CpLine, String> {
    let (lhs, rhs) = s.split_once(">=").ok_or_else(|| format!("missing >= in {s:?}"))?;
    let bound: BigInt = rhs.trim().parse().map_err(|_| format!("bad bound {rhs:?}"))?;
    let lhs = lhs.trim();
    let mut coeffs = Vec::new();
    if lhs != "0" {
        for term in lhs.split(" + ") {
            let (a, x) = term.trim().split_once("*x_").ok_or_else(|| format!("bad term {term:?}"))?;
            let a: BigInt = a.parse().map_err(|_| format!("bad coefficient {a:?}"))?;
            let x: u32 = x.parse().map_err(|_| format!("bad variable {x:?}"))?;
            coeffs.push((x, a));
        }
    }
    Ok(CpLine::new(coeffs, bound))
}

/// `cp vars=<n>`, then `<tag>: <inequality>` per line.
pub fn format_cp_system(sys: &CpSystem) -> String {
    let mut s = format!("cp vars={}\n", sys.n_vars);
    for (l, t) in &sys.inequalities {
        let _ = writeln!(s, "{}: {}", t.name(), l);
    }
    s
}

pub fn parse_cp_system(text: &str) -> Result<CpSystem, ParseError> {
    let mut lines = content_lines(text, "#");
    let (ln, head) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let f = header_fields(ln, head, "cp", &["vars"])?;
    let n_vars = f[0].parse().map_err(|_| err(ln, "bad vars"))?;
    let mut inequalities = Vec::new();
    for (ln, l) in lines {
        let (tag, line) = l.split_once(':').ok_or_else(|| err(ln, "expected <tag>: <inequality>"))?;
        let tag = AxiomTag::from_name(tag.trim()).ok_or_else(|| err(ln, format!("unknown tag {tag}")))?;
        inequalities.push((parse_cp_line(line).map_err(|m| err(ln, m))?, tag));
    }
    Ok(CpSystem { inequalities, n_vars })
}

/// OPB text; variable `x` is written `x{x+1}`.
pub fn format_opb(sys: &CpSystem) -> String {
    let mut s = format!("* #variable= {} #constraint= {}\n", sys.n_vars, sys.inequalities.len());
    for (l, _) in &sys.inequalities {
        for (x, a) in l.coeffs() {
            let sign = if *a < BigInt::from(0) { "" } else { "+" };
            let _ = write!(s, "{sign}{a} x{} ", x + 1);
        }
        let _ = writeln!(s, ">= {} ;", l.bound());
    }
    s
}

/// Hex SHA-256 of the system's canonical text.
pub fn system_hash(sys: &PolySystem) -> String {
    hex::encode(Sha256::digest(format_poly_system(sys).as_bytes()))
}

/// `nss-certificate system=<hash> degree=<d> axioms=<m>`, the field and cap
/// headers, then `g_<i>: <polynomial>` per axiom.
pub fn format_certificate(cert: &NssCertificate, sys: &PolySystem) -> String {
    let mut s = format!(
        "nss-certificate system={} degree={} axioms={}\n{}\n{}\n",
        system_hash(sys),
        cert.degree,
        cert.multipliers.len(),
        format_field_header(&sys.field),
        format_cap(sys.cap)
    );
    for (i, g) in cert.multipliers.iter().enumerate() {
        let _ = writeln!(s, "g_{i}: {}", format_polynomial(g));
    }
    s
}

/// Parses a certificate and checks that it was written for `sys`.
pub fn parse_certificate(text: &str, sys: &PolySystem) -> Result<NssCertificate, ParseError> {
    let mut lines = content_lines(text, "#");
    let (ln, head) = lines.next().ok_or_else(|| err(0, "empty input"))?;
    let f = header_fields(ln, head, "nss-certificate", &["system", "degree", "axioms"])?;
    if f[0] != system_hash(sys) {
        return Err(err(ln, "certificate was written for a different system"));
    }
    let degree: i64 = f[1].parse().map_err(|_| err(ln, "bad degree"))?;
    let m: usize = f[2].parse().map_err(|_| err(ln, "bad axiom count"))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing field"))?;
    let field = parse_field_header(l).map_err(|e| err(ln, e.to_string()))?;
    let (ln, l) = lines.next().ok_or_else(|| err(ln, "missing cap"))?;
    let cap = parse_cap(l).map_err(|e| err(ln, e.to_string()))?;
    if field != sys.field || cap != sys.cap {
        return Err(err(ln, "field or cap differs from the system"));
    }
    let mut multipliers = Vec::with_capacity(m);
    for (ln, l) in lines {
        let (name, poly) = l.split_once(':').ok_or_else(|| err(ln, "expected g_<i>: <polynomial>"))?;
        if name.trim() != format!("g_{}", multipliers.len()) {
            return Err(err(ln, format!("expected g_{}", multipliers.len())));
        }
        multipliers.push(parse_polynomial(poly, &field, cap).map_err(|e| err(ln, e.to_string()))?);
    }
    if multipliers.len() != m {
        return Err(err(0, format!("declared {m} multipliers, found {}", multipliers.len())));
    }
    Ok(NssCertificate { multipliers, degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FieldSpec;
    use crate::encodings::{encode_colouring01, encode_colouring_cp, encode_colouring_roots, encode_fphp};

    #[test]
    fn dimacs_round_trip() {
        let g = Graph::cycle(5);
        let t = format_dimacs(&g);
        assert_eq!(t.lines().next(), Some("p edge 5 5"));
        assert_eq!(parse_dimacs(&t).unwrap(), g);
        assert_eq!(parse_dimacs("c hi\np edge 3 1\ne 1 3\n").unwrap(), Graph::new(3, [(0, 2)]).unwrap());
        assert!(parse_dimacs("p edge 2 1\ne 0 1\n").is_err());
        assert!(parse_dimacs("p edge 2 2\ne 1 2\n").is_err());
    }

    #[test]
    fn fphp_round_trip() {
        let b = FphpInstance::new(4, 2, vec![vec![0, 3], vec![2, 1]]).unwrap();
        assert_eq!(parse_fphp(&format_fphp(&b)).unwrap(), b);
        assert!(parse_fphp("fphp pigeons=1 holes=2 k=2\n0 0\n").is_err());
    }

    #[test]
    fn poly_system_round_trip() {
        let f4 = crate::algebra::field_with_kth_root(2, 3).unwrap();
        for sys in [
            encode_colouring01(&Graph::complete(3), 3),
            encode_fphp(&FphpInstance::complete(3, 2), &FieldSpec::prime(3).unwrap()),
            encode_colouring_roots(&Graph::cycle(4), 3, &f4).unwrap(),
        ] {
            let t = format_poly_system(&sys);
            assert_eq!(parse_poly_system(&t).unwrap(), sys, "{t}");
        }
    }

    #[test]
    fn cp_system_round_trip() {
        let sys = encode_colouring_cp(&Graph::complete(3), 2);
        assert_eq!(parse_cp_system(&format_cp_system(&sys)).unwrap(), sys);
        assert_eq!(parse_cp_line("0 >= -3").unwrap(), CpLine::from_i64(&[], -3));
    }
}
