//! Degree-bounded Nullstellensatz certificates: search by exact sparse
//! elimination over the system's field, and independent verification.

use std::collections::HashMap;

use crate::algebra::{Cap, FieldElement, FieldSpec, Monomial, Polynomial};
use crate::encodings::{AxiomTag, PolySystem};

/// Default cap on the number of unknown coefficients per solve.
pub const DEFAULT_MAX_UNKNOWNS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NssError {
    #[error("degree {d} is below the largest non-Boolean axiom degree {min}")]
    DegreeTooSmall { d: i64, min: i64 },
    #[error("{0} unknowns exceed the budget")]
    BudgetExceeded(usize),
    #[error("certificate and system disagree on field or cap")]
    FieldMismatch,
    #[error("{got} multipliers for {expected} axioms")]
    WrongLength { got: usize, expected: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NssOptions {
    /// Use the system's Boolean axioms as generators.
    pub include_boolean: bool,
    pub max_unknowns: usize,
}

impl Default for NssOptions {
    fn default() -> NssOptions {
        NssOptions { include_boolean: true, max_unknowns: DEFAULT_MAX_UNKNOWNS }
    }
}

/// Multipliers `g_i`, one per axiom, with `sum g_i f_i = 1` after reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NssCertificate {
    pub multipliers: Vec<Polynomial>,
    /// `max deg(g_i) + deg(f_i)` over nonzero `g_i`, before reduction.
    pub degree: i64,
}

impl NssCertificate {
    pub fn recompute_degree(&self, sys: &PolySystem) -> i64 {
        certificate_degree(&self.multipliers, sys)
    }

    /// Total number of terms over all multipliers.
    pub fn size(&self) -> usize {
        self.multipliers.iter().map(Polynomial::num_terms).sum()
    }
}

fn certificate_degree(g: &[Polynomial], sys: &PolySystem) -> i64 {
    g.iter().zip(sys.polys()).filter(|(g, _)| !g.is_zero()).map(|(g, f)| g.degree() + f.degree()).max().unwrap_or(-1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NssOutcome {
    Certificate(NssCertificate),
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NssSearch {
    Found { degree: i64, certificate: NssCertificate },
    Exceeded(i64),
}

/// Every cap-reduced monomial in variables `0..n_vars` of degree at most
/// `max_deg`, ascending.
pub fn reduced_monomials(n_vars: usize, max_deg: i64, cap: Cap) -> Vec<Monomial> {
    let mut out = Vec::new();
    if max_deg < 0 {
        return out;
    }
    let top = match cap {
        Cap::Boolean => 1,
        Cap::Roots(k) => k.saturating_sub(1),
    };
    fn go(v: u32, n: u32, left: u32, top: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Monomial>) {
        if v == n {
            out.push(Monomial::from_pairs(cur.iter().copied()));
            return;
        }
        go(v + 1, n, left, top, cur, out);
        for e in 1..=top.min(left) {
            cur.push((v, e));
            go(v + 1, n, left - e, top, cur, out);
            cur.pop();
        }
    }
    go(0, n_vars as u32, max_deg as u32, top, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Sparse row `sum coeff * unknown = rhs`, entries sorted by unknown.
#[derive(Clone, Debug)]
struct Row {
    entries: Vec<(u32, FieldElement)>,
    rhs: FieldElement,
}

fn row_axpy(f: &FieldSpec, a: &Row, scale: FieldElement, b: &Row) -> Row {
    // a - scale * b
    let (x, y) = (&a.entries, &b.entries);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i]);
            i += 1;
        } else if take_y {
            out.push((y[j].0, f.neg(f.mul(scale, y[j].1))));
            j += 1;
        } else {
            let c = f.sub(x[i].1, f.mul(scale, y[j].1));
            if !c.is_zero() {
                out.push((x[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    Row { entries: out, rhs: f.sub(a.rhs, f.mul(scale, b.rhs)) }
}

/// Solves the sparse system exactly; `None` if inconsistent.
fn solve(f: &FieldSpec, mut rows: Vec<Row>, n_unknowns: usize) -> Option<Vec<FieldElement>> {
    let mut fill = vec![0u32; n_unknowns];
    for r in &rows {
        for &(u, _) in &r.entries {
            fill[u as usize] += 1;
        }
    }
    rows.sort_by_key(|r| r.entries.len());
    // pivot rows in creation order, and the order index of each pivot unknown
    let mut pivots: Vec<(u32, Row)> = Vec::new();
    let mut pivot_index: HashMap<u32, usize> = HashMap::new();
    for mut r in rows {
        loop {
            let next = r.entries.iter().filter_map(|(u, c)| pivot_index.get(u).map(|&p| (p, *c))).min_by_key(|x| x.0);
            let Some((p, c)) = next else { break };
            let (pu, prow) = &pivots[p];
            let lead = prow.entries.iter().find(|e| e.0 == *pu).expect("pivot entry present").1;
            let s = f.div(c, lead).expect("pivot is nonzero");
            r = row_axpy(f, &r, s, prow);
        }
        if r.entries.is_empty() {
            if !r.rhs.is_zero() {
                return None;
            }
            continue;
        }
        let pu = r.entries.iter().min_by_key(|(u, _)| (fill[*u as usize], *u)).expect("nonempty").0;
        pivot_index.insert(pu, pivots.len());
        pivots.push((pu, r));
    }
    let mut x = vec![FieldElement::ZERO; n_unknowns];
    for (pu, r) in pivots.iter().rev() {
        let mut acc = r.rhs;
        let mut lead = FieldElement::ZERO;
        for &(u, c) in &r.entries {
            if u == *pu {
                lead = c;
            } else {
                acc = f.sub(acc, f.mul(c, x[u as usize]));
            }
        }
        x[*pu as usize] = f.div(acc, lead).expect("pivot is nonzero");
    }
    Some(x)
}

/// Decides whether a certificate of degree at most `d` exists. Axioms of
/// degree above `d` get no multiplier.
pub fn nss_feasible_at_degree(sys: &PolySystem, d: i64, opts: NssOptions) -> Result<NssOutcome, NssError> {
    let min = sys.degree_floor();
    if d < min {
        return Err(NssError::DegreeTooSmall { d, min });
    }
    let f = &sys.field;
    let used: Vec<usize> =
        (0..sys.axioms.len()).filter(|&i| opts.include_boolean || sys.axioms[i].tag != AxiomTag::Boolean).collect();
    let mut by_degree: HashMap<i64, Vec<Monomial>> = HashMap::new();
    let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
    for &i in &used {
        let e = d - sys.axioms[i].poly.degree();
        let ms = by_degree.entry(e).or_insert_with(|| reduced_monomials(sys.n_vars(), e, sys.cap));
        if unknowns.len() + ms.len() > opts.max_unknowns {
            return Err(NssError::BudgetExceeded(unknowns.len() + ms.len()));
        }
        unknowns.extend(ms.iter().map(|m| (i, m.clone())));
    }
    let mut row_of: HashMap<Monomial, usize> = HashMap::new();
    let mut rows: Vec<Row> = Vec::new();
    for (u, (i, m)) in unknowns.iter().enumerate() {
        for (t, c) in sys.axioms[*i].poly.mul_monomial_reduce(m).terms() {
            let r = *row_of.entry(t.clone()).or_insert_with(|| {
                rows.push(Row { entries: Vec::new(), rhs: FieldElement::ZERO });
                rows.len() - 1
            });
            rows[r].entries.push((u as u32, *c));
        }
    }
    match row_of.get(&Monomial::one()) {
        Some(&r) => rows[r].rhs = FieldElement::ONE,
        None => return Ok(NssOutcome::Infeasible),
    }
    let Some(x) = solve(f, rows, unknowns.len()) else {
        return Ok(NssOutcome::Infeasible);
    };
    let mut terms: Vec<Vec<(Monomial, FieldElement)>> = vec![Vec::new(); sys.axioms.len()];
    for (u, (i, m)) in unknowns.into_iter().enumerate() {
        if !x[u].is_zero() {
            terms[i].push((m, x[u]));
        }
    }
    let multipliers: Vec<Polynomial> = terms.into_iter().map(|t| Polynomial::from_terms(f, sys.cap, t)).collect();
    let degree = certificate_degree(&multipliers, sys);
    let cert = NssCertificate { multipliers, degree };
    assert!(verify_certificate(sys, &cert).unwrap_or(false), "solver produced a certificate that fails verification");
    Ok(NssOutcome::Certificate(cert))
}

/// Ascending search from the largest axiom degree up to `d_max`.
pub fn nss_min_degree(sys: &PolySystem, d_max: i64, opts: NssOptions) -> Result<NssSearch, NssError> {
    for d in sys.degree_floor()..=d_max {
        if let NssOutcome::Certificate(c) = nss_feasible_at_degree(sys, d, opts)? {
            return Ok(NssSearch::Found { degree: d, certificate: c });
        }
    }
    Ok(NssSearch::Exceeded(d_max))
}

/// Expands `sum g_i f_i` term by term into exponent maps, applies the cap
/// only at the end, and compares with the constant 1.
pub fn verify_certificate(sys: &PolySystem, cert: &NssCertificate) -> Result<bool, NssError> {
    if cert.multipliers.len() != sys.axioms.len() {
        return Err(NssError::WrongLength { got: cert.multipliers.len(), expected: sys.axioms.len() });
    }
    let f = &sys.field;
    if cert.multipliers.iter().any(|g| !g.field().same_field(f) || g.cap() != sys.cap) {
        return Err(NssError::FieldMismatch);
    }
    let mut acc: HashMap<Vec<(u32, u32)>, FieldElement> = HashMap::new();
    for (g, fi) in cert.multipliers.iter().zip(sys.polys()) {
        for (mg, cg) in g.terms() {
            for (mf, cf) in fi.terms() {
                let mut exps: HashMap<u32, u32> = HashMap::new();
                for &(v, e) in mg.pairs().iter().chain(mf.pairs()) {
                    *exps.entry(v).or_insert(0) += e;
                }
                let mut key: Vec<(u32, u32)> = exps
                    .into_iter()
                    .map(|(v, e)| match sys.cap {
                        Cap::Boolean => (v, 1),
                        Cap::Roots(k) => (v, e % k),
                    })
                    .filter(|&(_, e)| e > 0)
                    .collect();
                key.sort_unstable();
                let slot = acc.entry(key).or_insert(FieldElement::ZERO);
                *slot = f.add(*slot, f.mul(*cg, *cf));
            }
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(acc.len() == 1 && acc.get(&Vec::new()) == Some(&FieldElement::ONE))
}
