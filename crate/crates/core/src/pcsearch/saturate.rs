use std::collections::{BTreeMap, VecDeque};

use super::{PcError, PcProof};
use crate::algebra::{FieldElement, Monomial};
use crate::encodings::{AxiomTag, PolySystem};

/// Default cap on proof lines written during one saturation.
pub const DEFAULT_MAX_LINES: usize = 3_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PcOptions {
    pub max_lines: usize,
}

impl Default for PcOptions {
    fn default() -> PcOptions {
        PcOptions { max_lines: DEFAULT_MAX_LINES }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcOutcome {
    /// A pruned refutation of degree at most `d`.
    Refuted(PcProof),
    /// Saturated without reaching 1; `basis` is the dimension reached.
    NotRefutable { basis: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PcSearch {
    Found { degree: i64, proof: PcProof },
    Exceeded(i64),
}

/// Echelon basis keyed by leading monomial; each entry is a proof line.
struct Saturation<'a> {
    sys: &'a PolySystem,
    d: i64,
    proof: PcProof,
    basis: BTreeMap<Monomial, usize>,
    queue: VecDeque<usize>,
    max_lines: usize,
}

impl Saturation<'_> {
    /// Top-reduces line `t` against the basis; inserts it if a new leading
    /// monomial survives. Returns the line if it reduced to a nonzero
    /// constant.
    fn insert(&mut self, mut t: usize) -> Result<Option<usize>, PcError> {
        let f = self.sys.field.clone();
        loop {
            if self.proof.len() > self.max_lines {
                return Err(PcError::BudgetExceeded(self.max_lines));
            }
            let Some((m, c)) = self.proof.poly(t).leading().cloned() else {
                return Ok(None);
            };
            match self.basis.get(&m) {
                Some(&b) => {
                    let lead = self.proof.poly(b).leading().expect("basis lines are nonzero").1;
                    let s = f.neg(f.div(c, lead).expect("nonzero lead"));
                    t = self.proof.lin_comb(t, b, FieldElement::ONE, s);
                }
                None => {
                    self.basis.insert(m.clone(), t);
                    if m.is_one() {
                        return Ok(Some(t));
                    }
                    self.queue.push_back(t);
                    return Ok(None);
                }
            }
        }
    }

    fn run(&mut self) -> Result<Option<usize>, PcError> {
        for (i, a) in self.sys.axioms.iter().enumerate() {
            if a.tag == AxiomTag::Boolean || a.poly.degree() > self.d {
                continue;
            }
            let t = self.proof.axiom(self.sys, i);
            if let Some(one) = self.insert(t)? {
                return Ok(Some(one));
            }
        }
        while let Some(e) = self.queue.pop_front() {
            if self.proof.poly(e).degree() + 1 > self.d {
                continue;
            }
            for x in 0..self.sys.n_vars() as u32 {
                let t = self.proof.mul(e, x);
                if let Some(one) = self.insert(t)? {
                    return Ok(Some(one));
                }
            }
        }
        Ok(None)
    }
}

/// Closes the cap-reduced axioms of degree at most `d` under linear
/// combination and multiplication by variables, keeping every line of
/// degree at most `d`, and reports whether 1 is reached.
pub fn pc_refutable_at_degree(sys: &PolySystem, d: i64, opts: PcOptions) -> Result<PcOutcome, PcError> {
    let min = sys.degree_floor();
    if d < min {
        return Err(PcError::DegreeTooSmall { d, min });
    }
    let mut s = Saturation {
        sys,
        d,
        proof: PcProof::new(&sys.field, sys.cap),
        basis: BTreeMap::new(),
        queue: VecDeque::new(),
        max_lines: opts.max_lines,
    };
    match s.run()? {
        Some(t) => {
            let f = &sys.field;
            let c = s.proof.poly(t).constant_term();
            let inv = f.inv(c).expect("nonzero constant");
            s.proof.lin_comb(t, t, inv, FieldElement::ZERO);
            Ok(PcOutcome::Refuted(s.proof.pruned()))
        }
        None => Ok(PcOutcome::NotRefutable { basis: s.basis.len() }),
    }
}

/// Ascending search from the largest non-Boolean axiom degree.
pub fn pc_min_degree(sys: &PolySystem, d_max: i64, opts: PcOptions) -> Result<PcSearch, PcError> {
    for d in sys.degree_floor()..=d_max {
        if let PcOutcome::Refuted(proof) = pc_refutable_at_degree(sys, d, opts)? {
            return Ok(PcSearch::Found { degree: d, proof });
        }
    }
    Ok(PcSearch::Exceeded(d_max))
}
