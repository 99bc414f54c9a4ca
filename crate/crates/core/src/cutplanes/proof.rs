use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::line::{CpLine, JsonInt};
use crate::encodings::CpSystem;

/// How a proof line follows from earlier lines or axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CpJust {
    /// `x >= 0`.
    VarAxiom(u32),
    /// `-x >= -1`.
    VarAxiomUpper(u32),
    /// The system's inequality with this index.
    Initial(usize),
    Sum(usize, usize),
    /// Multiplication by a non-negative integer.
    Scalar(usize, BigInt),
    /// Division by a positive integer dividing every coefficient.
    Div(usize, BigInt),
}

impl CpJust {
    /// Earlier lines this step reads.
    pub fn premises(&self) -> Vec<usize> {
        match self {
            CpJust::Sum(i, j) => vec![*i, *j],
            CpJust::Scalar(i, _) | CpJust::Div(i, _) => vec![*i],
            _ => Vec::new(),
        }
    }

    /// The same rule with premises renumbered.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> CpJust {
        match self {
            CpJust::Sum(i, j) => CpJust::Sum(f(*i), f(*j)),
            CpJust::Scalar(i, c) => CpJust::Scalar(f(*i), c.clone()),
            CpJust::Div(i, c) => CpJust::Div(f(*i), c.clone()),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpStep {
    pub line: CpLine,
    pub just: CpJust,
}

/// A cutting planes derivation; a refutation ends in `0 >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CpProof {
    pub steps: Vec<CpStep>,
}

impl CpProof {
    pub fn new() -> CpProof {
        CpProof { steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last_line(&self) -> Option<&CpLine> {
        self.steps.last().map(|s| &s.line)
    }

    pub fn line(&self, i: usize) -> &CpLine {
        &self.steps[i].line
    }

    /// Appends a step whose line is computed from its justification.
    /// Panics on an illegal step; builders only emit legal ones.
    pub fn derive(&mut self, just: CpJust, sys_line: Option<&CpLine>) -> usize {
        let line = match &just {
            CpJust::VarAxiom(x) => CpLine::var_lower(*x),
            CpJust::VarAxiomUpper(x) => CpLine::var_upper(*x),
            CpJust::Initial(_) => sys_line.expect("initial step needs its inequality").clone(),
            CpJust::Sum(i, j) => self.steps[*i].line.add(&self.steps[*j].line),
            CpJust::Scalar(i, c) => {
                assert!(!c.is_negative(), "negative scalar");
                self.steps[*i].line.scale(c)
            }
            CpJust::Div(i, c) => self.steps[*i].line.divide(c).expect("illegal division in builder"),
        };
        self.steps.push(CpStep { line, just });
        self.steps.len() - 1
    }

    pub fn sum(&mut self, i: usize, j: usize) -> usize {
        self.derive(CpJust::Sum(i, j), None)
    }

    pub fn scalar(&mut self, i: usize, c: impl Into<BigInt>) -> usize {
        self.derive(CpJust::Scalar(i, c.into()), None)
    }

    pub fn div(&mut self, i: usize, c: impl Into<BigInt>) -> usize {
        self.derive(CpJust::Div(i, c.into()), None)
    }

    pub fn var_lower(&mut self, x: u32) -> usize {
        self.derive(CpJust::VarAxiom(x), None)
    }

    pub fn var_upper(&mut self, x: u32) -> usize {
        self.derive(CpJust::VarAxiomUpper(x), None)
    }

    pub fn initial(&mut self, sys: &CpSystem, idx: usize) -> usize {
        self.derive(CpJust::Initial(idx), Some(&sys.inequalities[idx].0))
    }

    /// Sums a non-empty list of lines left to right, returning the last index.
    pub fn sum_all(&mut self, idx: &[usize]) -> usize {
        let mut acc = idx[0];
        for &i in &idx[1..] {
            acc = self.sum(acc, i);
        }
        acc
    }
}

/// Why a proof was rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CpCheckFailure {
    #[error("references line {0}, which does not precede it")]
    ForwardReference(usize),
    #[error("no initial inequality {0}")]
    UnknownInitial(usize),
    #[error("stated line differs from the rule's result")]
    Mismatch,
    #[error("illegal division by {0}")]
    IllegalDivision(BigInt),
    #[error("negative scalar {0}")]
    NegativeScalar(BigInt),
    #[error("last line is not 0 >= 1")]
    NotRefutation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpCheckReport {
    /// Every line follows from its justification.
    pub valid: bool,
    /// Valid and ending in a contradiction.
    pub refutation: bool,
    pub length: usize,
    /// First offending line and reason.
    pub failure: Option<(usize, CpCheckFailure)>,
}

/// Replays every rule with exact arithmetic.
pub fn cp_check(proof: &CpProof, sys: &CpSystem) -> CpCheckReport {
    let fail = |t: usize, f: CpCheckFailure| CpCheckReport {
        valid: false,
        refutation: false,
        length: proof.len(),
        failure: Some((t, f)),
    };
    for (t, step) in proof.steps.iter().enumerate() {
        for p in step.just.premises() {
            if p >= t {
                return fail(t, CpCheckFailure::ForwardReference(p));
            }
        }
        let expected = match &step.just {
            CpJust::VarAxiom(x) => CpLine::var_lower(*x),
            CpJust::VarAxiomUpper(x) => CpLine::var_upper(*x),
            CpJust::Initial(idx) => match sys.inequalities.get(*idx) {
                Some((l, _)) => l.clone(),
                None => return fail(t, CpCheckFailure::UnknownInitial(*idx)),
            },
            CpJust::Sum(i, j) => proof.steps[*i].line.add(&proof.steps[*j].line),
            CpJust::Scalar(i, c) => {
                if c.is_negative() {
                    return fail(t, CpCheckFailure::NegativeScalar(c.clone()));
                }
                proof.steps[*i].line.scale(c)
            }
            CpJust::Div(i, c) => match proof.steps[*i].line.divide(c) {
                Some(l) => l,
                None => return fail(t, CpCheckFailure::IllegalDivision(c.clone())),
            },
        };
        if expected != step.line {
            return fail(t, CpCheckFailure::Mismatch);
        }
    }
    let refutation = proof.last_line().is_some_and(CpLine::is_falsum);
    CpCheckReport {
        valid: true,
        refutation,
        length: proof.len(),
        failure: (!refutation).then(|| (proof.len().saturating_sub(1), CpCheckFailure::NotRefutation)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
enum RawStep {
    Var { x: u32, line: CpLine },
    VarUpper { x: u32, line: CpLine },
    Initial { index: usize, line: CpLine },
    Sum { i: usize, j: usize, line: CpLine },
    Scalar { i: usize, c: JsonInt, line: CpLine },
    Div { i: usize, c: JsonInt, line: CpLine },
}

/// One JSON object per line; premises are 0-based line indices.
pub fn cp_proof_to_jsonl(proof: &CpProof) -> String {
    let mut out = String::new();
    for s in &proof.steps {
        let line = s.line.clone();
        let raw = match &s.just {
            CpJust::VarAxiom(x) => RawStep::Var { x: *x, line },
            CpJust::VarAxiomUpper(x) => RawStep::VarUpper { x: *x, line },
            CpJust::Initial(index) => RawStep::Initial { index: *index, line },
            CpJust::Sum(i, j) => RawStep::Sum { i: *i, j: *j, line },
            CpJust::Scalar(i, c) => RawStep::Scalar { i: *i, c: JsonInt(c.clone()), line },
            CpJust::Div(i, c) => RawStep::Div { i: *i, c: JsonInt(c.clone()), line },
        };
        out.push_str(&serde_json::to_string(&raw).expect("plain data serialises"));
        out.push('\n');
    }
    out
}

pub fn cp_proof_from_jsonl(text: &str) -> Result<CpProof, String> {
    let mut steps = Vec::new();
    for (n, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let raw: RawStep = serde_json::from_str(l).map_err(|e| format!("line {}: {e}", n + 1))?;
        steps.push(match raw {
            RawStep::Var { x, line } => CpStep { line, just: CpJust::VarAxiom(x) },
            RawStep::VarUpper { x, line } => CpStep { line, just: CpJust::VarAxiomUpper(x) },
            RawStep::Initial { index, line } => CpStep { line, just: CpJust::Initial(index) },
            RawStep::Sum { i, j, line } => CpStep { line, just: CpJust::Sum(i, j) },
            RawStep::Scalar { i, c, line } => CpStep { line, just: CpJust::Scalar(i, c.0) },
            RawStep::Div { i, c, line } => CpStep { line, just: CpJust::Div(i, c.0) },
        });
    }
    Ok(CpProof { steps })
}

/// Removes `0 >= 0` lines: a sum with such a line is the other premise, and
/// scaling or dividing one gives it back. Later premises are renumbered, so
/// the result checks whenever the input does.
pub fn strip_trivial(proof: &CpProof) -> CpProof {
    #[derive(Clone, Copy)]
    enum Slot {
        Zero,
        At(usize),
    }
    let mut map: Vec<Slot> = Vec::with_capacity(proof.len());
    let mut out = CpProof::new();
    let at = |map: &[Slot], i: usize| match map[i] {
        Slot::At(x) => x,
        Slot::Zero => unreachable!("zero slots are resolved before use"),
    };
    for s in &proof.steps {
        let is_zero_line = s.line.coeffs().is_empty() && s.line.bound().is_zero();
        let slot = match &s.just {
            _ if is_zero_line && !matches!(s.just, CpJust::Sum(..)) => Slot::Zero,
            CpJust::Sum(i, j) => match (map[*i], map[*j]) {
                (Slot::Zero, Slot::Zero) => Slot::Zero,
                (Slot::Zero, other) | (other, Slot::Zero) => other,
                (Slot::At(a), Slot::At(b)) => {
                    out.steps.push(CpStep { line: s.line.clone(), just: CpJust::Sum(a, b) });
                    Slot::At(out.steps.len() - 1)
                }
            },
            CpJust::Scalar(i, _) | CpJust::Div(i, _) if matches!(map[*i], Slot::Zero) => Slot::Zero,
            j => {
                let just = j.remap(|i| at(&map, i));
                out.steps.push(CpStep { line: s.line.clone(), just });
                Slot::At(out.steps.len() - 1)
            }
        };
        map.push(slot);
    }
    out
}

/// Keeps only lines that the final line depends on.
pub fn prune_unused(proof: &CpProof) -> CpProof {
    let n = proof.len();
    if n == 0 {
        return proof.clone();
    }
    let mut needed = vec![false; n];
    needed[n - 1] = true;
    for t in (0..n).rev() {
        if needed[t] {
            for p in proof.steps[t].just.premises() {
                needed[p] = true;
            }
        }
    }
    let mut map = vec![usize::MAX; n];
    let mut out = CpProof::new();
    for (t, s) in proof.steps.iter().enumerate() {
        if needed[t] {
            map[t] = out.steps.len();
            out.steps.push(CpStep { line: s.line.clone(), just: s.just.remap(|i| map[i]) });
        }
    }
    out
}
