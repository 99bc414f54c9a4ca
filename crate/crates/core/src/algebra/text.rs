//! Line-oriented text format for fields, caps and polynomials.
//!
//! ```text
//! field p=2 m=2 modulus=1,1,1 root=3:2
//! cap roots:3
//! x_0^2 + [1,1]*x_0*x_1 + 1
//! ```
//!
//! Prime-field coefficients print as residues; extension-field coefficients
//! print as `[c0,c1,...]`, least-significant first. The `root` token is
//! optional and carries `k:<packed w>`.

use super::field::{FieldElement, FieldSpec};
use super::poly::{Cap, Monomial, Polynomial};
use super::AlgebraError;

fn parse_err(msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse(msg.into())
}

pub fn format_element(f: &FieldSpec, c: FieldElement) -> String {
    if f.extension_degree() == 1 {
        return c.packed().to_string();
    }
    if let Some(r) = f.as_prime_residue(c) {
        return r.to_string();
    }
    let parts: Vec<String> = f.coeffs(c).iter().map(|d| d.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn parse_element(f: &FieldSpec, s: &str) -> Result<FieldElement, AlgebraError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let digits: Result<Vec<u64>, _> = inner.split(',').map(|d| d.trim().parse::<u64>()).collect();
        let digits = digits.map_err(|_| parse_err(format!("bad coefficient {s}")))?;
        return f.from_coeffs(&digits);
    }
    let v: i128 = s.parse().map_err(|_| parse_err(format!("bad coefficient {s}")))?;
    let p = f.characteristic() as i128;
    Ok(FieldElement(((v % p + p) % p) as u64))
}

pub fn format_field_header(f: &FieldSpec) -> String {
    let modulus: Vec<String> = f.modulus().iter().map(|c| c.to_string()).collect();
    let mut s = format!("field p={} m={} modulus={}", f.characteristic(), f.extension_degree(), modulus.join(","));
    if let Some((w, k)) = f.kth_root() {
        s.push_str(&format!(" root={}:{}", k, w.packed()));
    }
    s
}

pub fn parse_field_header(line: &str) -> Result<FieldSpec, AlgebraError> {
    let mut words = line.split_whitespace();
    if words.next() != Some("field") {
        return Err(parse_err("expected field header"));
    }
    let (mut p, mut m, mut modulus, mut root) = (None, None, None, None);
    for w in words {
        let (key, val) = w.split_once('=').ok_or_else(|| parse_err(format!("bad field token {w}")))?;
        match key {
            "p" => p = Some(val.parse::<u64>().map_err(|_| parse_err("bad p"))?),
            "m" => m = Some(val.parse::<usize>().map_err(|_| parse_err("bad m"))?),
            "modulus" => {
                let coeffs: Result<Vec<u64>, _> = val.split(',').map(str::parse::<u64>).collect();
                modulus = Some(coeffs.map_err(|_| parse_err("bad modulus"))?);
            }
            "root" => {
                let (k, w) = val.split_once(':').ok_or_else(|| parse_err("bad root"))?;
                root = Some((
                    k.parse::<u32>().map_err(|_| parse_err("bad root order"))?,
                    w.parse::<u64>().map_err(|_| parse_err("bad root value"))?,
                ));
            }
            _ => return Err(parse_err(format!("unknown field token {key}"))),
        }
    }
    let p = p.ok_or_else(|| parse_err("missing p"))?;
    let m = m.ok_or_else(|| parse_err("missing m"))?;
    let field = match modulus {
        Some(md) if m > 1 => FieldSpec::with_modulus(p, md)?,
        _ => FieldSpec::extension(p, m)?,
    };
    if field.extension_degree() != m {
        return Err(parse_err("modulus degree disagrees with m"));
    }
    match root {
        Some((k, w)) => field.with_root(FieldElement(w), k),
        None => Ok(field),
    }
}

pub fn format_cap(cap: Cap) -> String {
    match cap {
        Cap::Boolean => "cap boolean".to_string(),
        Cap::Roots(k) => format!("cap roots:{k}"),
    }
}

pub fn parse_cap(line: &str) -> Result<Cap, AlgebraError> {
    let rest = line.trim().strip_prefix("cap").ok_or_else(|| parse_err("expected cap header"))?.trim();
    if rest == "boolean" {
        return Ok(Cap::Boolean);
    }
    let k = rest
        .strip_prefix("roots:")
        .and_then(|k| k.parse::<u32>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| parse_err(format!("bad cap {rest}")))?;
    Ok(Cap::Roots(k))
}

pub fn format_monomial(m: &Monomial) -> String {
    m.pairs().iter().map(|&(v, e)| if e == 1 { format!("x_{v}") } else { format!("x_{v}^{e}") }).collect::<Vec<_>>().join("*")
}

pub fn format_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let f = p.field();
    p.terms()
        .iter()
        .map(|(m, c)| {
            if m.is_one() {
                format_element(f, *c)
            } else if *c == FieldElement::ONE {
                format_monomial(m)
            } else {
                format!("{}*{}", format_element(f, *c), format_monomial(m))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Splits on `+` outside brackets.
fn split_terms(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn parse_polynomial(s: &str, field: &FieldSpec, cap: Cap) -> Result<Polynomial, AlgebraError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(parse_err("empty polynomial"));
    }
    let mut terms = Vec::new();
    for raw in split_terms(s) {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(parse_err(format!("empty term in {s}")));
        }
        let mut coeff = FieldElement::ONE;
        let mut pairs = Vec::new();
        for factor in raw.split('*') {
            let factor = factor.trim();
            if let Some(rest) = factor.strip_prefix("x_") {
                let (id, exp) = match rest.split_once('^') {
                    Some((id, e)) => (id, e.parse::<u32>().map_err(|_| parse_err(format!("bad exponent in {factor}")))?),
                    None => (rest, 1),
                };
                let id = id.parse::<u32>().map_err(|_| parse_err(format!("bad variable {factor}")))?;
                pairs.push((id, exp));
            } else {
                coeff = field.mul(coeff, parse_element(field, factor)?);
            }
        }
        terms.push((Monomial::from_pairs(pairs), coeff));
    }
    Ok(Polynomial::from_terms(field, cap, terms))
}
