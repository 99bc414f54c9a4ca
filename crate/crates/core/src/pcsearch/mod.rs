//! Polynomial calculus: proofs and their checker, degree-bounded
//! saturation, and explicit derivations of substituted axioms.

mod derive;
mod saturate;

use serde::{Deserialize, Serialize};

use crate::algebra::text::{format_element, format_polynomial, parse_element, parse_polynomial};
use crate::algebra::{Cap, FieldElement, FieldSpec, Monomial, Polynomial};
use crate::encodings::PolySystem;

pub use derive::{
    compose_lemma34, derive_substituted_axioms_lemma34, derive_substituted_axioms_prop21, edge_block_coefficient,
    roots_certificate_to_pc, Derivation, LocalIdeal,
};
pub use saturate::{pc_min_degree, pc_refutable_at_degree, PcOptions, PcOutcome, PcSearch, DEFAULT_MAX_LINES};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PcError {
    #[error("degree {d} is below the largest non-Boolean axiom degree {min}")]
    DegreeTooSmall { d: i64, min: i64 },
    #[error("saturation exceeded {0} lines")]
    BudgetExceeded(usize),
    #[error("field has no primitive root of order {0}")]
    MissingRoot(u32),
    #[error("target is not reached by the local decomposition: {0}")]
    NotInIdeal(String),
    #[error("reduction error: {0}")]
    Reduction(String),
    #[error("input proof is invalid at line {0}")]
    InvalidInput(usize),
}

/// How a proof line follows from earlier lines or axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcJust {
    /// `x^2 - x`, which is zero after Boolean reduction.
    BooleanAxiom(u32),
    /// Axiom `index` of the system.
    InitialAxiom(usize),
    /// `alpha * line_i + beta * line_j`.
    LinComb(usize, usize, FieldElement, FieldElement),
    /// `x * line_i`.
    Mul(usize, u32),
}

impl PcJust {
    pub fn premises(&self) -> Vec<usize> {
        match self {
            PcJust::LinComb(i, j, _, _) => vec![*i, *j],
            PcJust::Mul(i, _) => vec![*i],
            _ => Vec::new(),
        }
    }

    pub fn remap(&self, f: impl Fn(usize) -> usize) -> PcJust {
        match self {
            PcJust::LinComb(i, j, a, b) => PcJust::LinComb(f(*i), f(*j), *a, *b),
            PcJust::Mul(i, x) => PcJust::Mul(f(*i), *x),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcLine {
    /// Cap-reduced.
    pub poly: Polynomial,
    pub just: PcJust,
    /// Degree of the rule's unreduced result.
    pub degree: i64,
}

/// A PC derivation over one field and cap; a refutation ends in `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcProof {
    pub field: FieldSpec,
    pub cap: Cap,
    pub lines: Vec<PcLine>,
}

impl PcProof {
    pub fn new(field: &FieldSpec, cap: Cap) -> PcProof {
        PcProof { field: field.clone(), cap, lines: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn poly(&self, i: usize) -> &Polynomial {
        &self.lines[i].poly
    }

    pub fn last(&self) -> Option<&Polynomial> {
        self.lines.last().map(|l| &l.poly)
    }

    /// Max line degree, 0 for an empty proof.
    pub fn degree(&self) -> i64 {
        self.lines.iter().map(|l| l.degree).max().unwrap_or(0).max(0)
    }

    pub fn is_refutation(&self) -> bool {
        self.last().is_some_and(Polynomial::is_one)
    }

    fn push(&mut self, poly: Polynomial, just: PcJust, degree: i64) -> usize {
        self.lines.push(PcLine { poly, just, degree });
        self.lines.len() - 1
    }

    pub fn boolean(&mut self, x: u32) -> usize {
        let raw = Polynomial::from_terms(
            &self.field,
            self.cap,
            [(Monomial::from_pairs([(x, 2)]), FieldElement::ONE), (Monomial::var(x), self.field.neg(FieldElement::ONE))],
        );
        self.push(raw.reduced(), PcJust::BooleanAxiom(x), 2)
    }

    pub fn axiom(&mut self, sys: &PolySystem, index: usize) -> usize {
        let raw = &sys.axioms[index].poly;
        self.push(raw.reduced(), PcJust::InitialAxiom(index), raw.degree())
    }

    pub fn lin_comb(&mut self, i: usize, j: usize, a: FieldElement, b: FieldElement) -> usize {
        let p = lin_comb_raw(&self.lines[i].poly, a, &self.lines[j].poly, b);
        let d = p.degree();
        self.push(p, PcJust::LinComb(i, j, a, b), d)
    }

    pub fn mul(&mut self, i: usize, x: u32) -> usize {
        let src = &self.lines[i].poly;
        let d = src.degree() + 1;
        let p = src.mul_var_reduce(x);
        self.push(p, PcJust::Mul(i, x), d)
    }

    /// Multiplies line `i` by a monomial, one variable at a time.
    pub fn mul_monomial(&mut self, i: usize, m: &Monomial) -> usize {
        let mut cur = i;
        for &(v, e) in m.pairs() {
            for _ in 0..e {
                cur = self.mul(cur, v);
            }
        }
        cur
    }

    /// A line equal to the zero polynomial, built from line `i`.
    pub fn zero_from(&mut self, i: usize) -> usize {
        self.lin_comb(i, i, FieldElement::ZERO, FieldElement::ZERO)
    }

    /// Keeps only the lines the last line depends on.
    pub fn pruned(&self) -> PcProof {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let mut needed = vec![false; n];
        needed[n - 1] = true;
        for t in (0..n).rev() {
            if needed[t] {
                for p in self.lines[t].just.premises() {
                    needed[p] = true;
                }
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut out = PcProof::new(&self.field, self.cap);
        for (t, l) in self.lines.iter().enumerate() {
            if needed[t] {
                map[t] = out.lines.len();
                out.lines.push(PcLine { just: l.just.remap(|i| map[i]), ..l.clone() });
            }
        }
        out
    }
}

fn lin_comb_raw(p: &Polynomial, a: FieldElement, q: &Polynomial, b: FieldElement) -> Polynomial {
    p.lin_comb(a, q, b).expect("lines share field and cap")
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PcCheckFailure {
    #[error("references line {0}, which does not precede it")]
    ForwardReference(usize),
    #[error("no axiom {0}")]
    UnknownAxiom(usize),
    #[error("Boolean axiom in a system without the Boolean cap")]
    BooleanOutsideBooleanCap,
    #[error("stated polynomial differs from the rule's result")]
    Mismatch,
    #[error("stated degree differs from the rule's degree")]
    DegreeMismatch,
    #[error("proof and system disagree on field or cap")]
    FieldMismatch,
    #[error("last line is not 1")]
    NotRefutation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcCheckReport {
    pub valid: bool,
    pub refutation: bool,
    pub degree: i64,
    pub failure: Option<(usize, PcCheckFailure)>,
}

/// Replays every line with exact arithmetic and cap reduction.
pub fn pc_check(proof: &PcProof, sys: &PolySystem) -> PcCheckReport {
    let fail = |t: usize, f: PcCheckFailure| PcCheckReport { valid: false, refutation: false, degree: 0, failure: Some((t, f)) };
    if !proof.field.same_field(&sys.field) || proof.cap != sys.cap {
        return fail(0, PcCheckFailure::FieldMismatch);
    }
    let f = &sys.field;
    let mut degree = 0;
    for (t, line) in proof.lines.iter().enumerate() {
        if !line.poly.field().same_field(f) || line.poly.cap() != sys.cap {
            return fail(t, PcCheckFailure::FieldMismatch);
        }
        for p in line.just.premises() {
            if p >= t {
                return fail(t, PcCheckFailure::ForwardReference(p));
            }
        }
        let (expected, d) = match &line.just {
            PcJust::BooleanAxiom(_) => {
                if sys.cap != Cap::Boolean {
                    return fail(t, PcCheckFailure::BooleanOutsideBooleanCap);
                }
                // x^2 - x vanishes once x^2 is rewritten to x
                (Polynomial::zero(f, sys.cap), 2)
            }
            PcJust::InitialAxiom(i) => match sys.axioms.get(*i) {
                Some(a) => (a.poly.reduced(), a.poly.degree()),
                None => return fail(t, PcCheckFailure::UnknownAxiom(*i)),
            },
            PcJust::LinComb(i, j, a, b) => {
                let p = lin_comb_raw(&proof.lines[*i].poly, *a, &proof.lines[*j].poly, *b);
                let d = p.degree();
                (p, d)
            }
            PcJust::Mul(i, x) => {
                let src = &proof.lines[*i].poly;
                let d = src.degree() + 1;
                (src.mul_var_reduce(*x), d)
            }
        };
        if expected != line.poly {
            return fail(t, PcCheckFailure::Mismatch);
        }
        if d != line.degree {
            return fail(t, PcCheckFailure::DegreeMismatch);
        }
        degree = degree.max(d);
    }
    let refutation = proof.is_refutation();
    PcCheckReport {
        valid: true,
        refutation,
        degree,
        failure: (!refutation).then(|| (proof.len().saturating_sub(1), PcCheckFailure::NotRefutation)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
enum RawLine {
    Boolean { x: u32, poly: String },
    Axiom { index: usize, poly: String },
    LinComb { i: usize, j: usize, a: String, b: String, poly: String },
    Mul { i: usize, x: u32, poly: String },
}

/// One JSON object per line; premises are 0-based line indices and
/// coefficients use the polynomial text format.
pub fn pc_proof_to_jsonl(proof: &PcProof) -> String {
    let f = &proof.field;
    let mut out = String::new();
    for l in &proof.lines {
        let poly = format_polynomial(&l.poly);
        let raw = match &l.just {
            PcJust::BooleanAxiom(x) => RawLine::Boolean { x: *x, poly },
            PcJust::InitialAxiom(index) => RawLine::Axiom { index: *index, poly },
            PcJust::LinComb(i, j, a, b) => {
                RawLine::LinComb { i: *i, j: *j, a: format_element(f, *a), b: format_element(f, *b), poly }
            }
            PcJust::Mul(i, x) => RawLine::Mul { i: *i, x: *x, poly },
        };
        out.push_str(&serde_json::to_string(&raw).expect("plain data serialises"));
        out.push('\n');
    }
    out
}

/// Parses JSON lines against a system; line degrees are recomputed from the
/// rules, so a stored degree is never trusted.
pub fn pc_proof_from_jsonl(text: &str, sys: &PolySystem) -> Result<PcProof, String> {
    let f = &sys.field;
    let cap = sys.cap;
    let mut proof = PcProof::new(f, cap);
    for (n, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let err = |e: String| format!("line {}: {e}", n + 1);
        let raw: RawLine = serde_json::from_str(l).map_err(|e| err(e.to_string()))?;
        let parse = |s: &str| parse_polynomial(s, f, cap).map_err(|e| err(e.to_string()));
        let elem = |s: &str| parse_element(f, s).map_err(|e| err(e.to_string()));
        let t = proof.lines.len();
        let prior = |i: usize| -> Result<&Polynomial, String> {
            proof.lines.get(i).map(|l| &l.poly).ok_or_else(|| err(format!("premise {i} does not precede line {t}")))
        };
        let (poly, just, degree) = match raw {
            RawLine::Boolean { x, poly } => (parse(&poly)?, PcJust::BooleanAxiom(x), 2),
            RawLine::Axiom { index, poly } => {
                let d = sys.axioms.get(index).map(|a| a.poly.degree()).unwrap_or(-1);
                (parse(&poly)?, PcJust::InitialAxiom(index), d)
            }
            RawLine::LinComb { i, j, a, b, poly } => {
                prior(i)?;
                prior(j)?;
                let p = parse(&poly)?;
                let d = p.degree();
                (p, PcJust::LinComb(i, j, elem(&a)?, elem(&b)?), d)
            }
            RawLine::Mul { i, x, poly } => {
                let src = prior(i)?;
                let d = src.degree() + 1;
                (parse(&poly)?, PcJust::Mul(i, x), d)
            }
        };
        proof.lines.push(PcLine { poly, just, degree });
    }
    Ok(proof)
}
