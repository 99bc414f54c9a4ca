use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CpJust, CpLine, CpProof, CpStep};
use crate::encodings::{colour_var, AxiomTag, CpSystem};

/// `cp_weaken` emits at most `3L + 1 <= WEAKEN_FACTOR * L` lines for an
/// input of `L` lines: one shared padding axiom, and at most three lines
/// per division.
pub const WEAKEN_FACTOR: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CpError {
    #[error("input does not end in a contradiction")]
    InputNotRefutation,
    #[error("initial index {0} is outside the system")]
    UnknownInitial(usize),
    #[error("no subproof for branch {0:?}")]
    MissingBranch(Vec<usize>),
    #[error("vertex {0} has no vertex axiom")]
    NoVertexAxiom(u32),
    #[error("the instance has a complete left matching")]
    MatchingExists,
    #[error("gadget colouring {0:?} extends the pinned vertices")]
    GadgetColourable(Vec<(u32, usize)>),
}

/// `x = b` as two inequalities: the assumption itself (`x >= 1`, or
/// `-x >= 0` for `b = 0`), then the redundant opposite bound.
pub fn assignment_lines(x: u32, b: bool) -> [CpLine; 2] {
    if b {
        [CpLine::from_i64(&[(x, 1)], 1), CpLine::var_upper(x)]
    } else {
        [CpLine::from_i64(&[(x, -1)], 0), CpLine::var_lower(x)]
    }
}

/// `sys` followed by two lines per assignment; assumption `j` has index
/// `sys.len() + 2j`.
pub fn with_assignment(sys: &CpSystem, rho: &[(u32, bool)]) -> CpSystem {
    let mut out = sys.clone();
    for &(x, b) in rho {
        for l in assignment_lines(x, b) {
            out.inequalities.push((l, AxiomTag::Assumption));
        }
        out.n_vars = out.n_vars.max(x as usize + 1);
    }
    out
}

/// Every inequality with the assigned variables replaced by constants;
/// indices are unchanged.
pub fn restrict_system(sys: &CpSystem, rho: &HashMap<u32, bool>) -> CpSystem {
    CpSystem { inequalities: sys.inequalities.iter().map(|(l, t)| (l.restrict(rho), *t)).collect(), n_vars: sys.n_vars }
}

/// Restricts a valid proof of `sys` to a valid proof of `sys|rho`.
///
/// Lines that become constant because of `rho` (`0 >= b`, `b <= 0`) are
/// absorbed instead of written. Absorbing a strictly negative constant into
/// a sum leaves the emitted line stronger than the restricted original by a
/// non-negative slack; slack survives every rule, so a contradiction stays
/// a contradiction. Each input line yields at most one output line, and a
/// `rho` touching no variable of the proof returns the proof unchanged.
pub fn cp_restrict(proof: &CpProof, sys: &CpSystem, rho: &HashMap<u32, bool>) -> CpProof {
    #[derive(Clone)]
    enum Slot {
        Const(BigInt),
        At(usize, BigInt),
    }
    let mut out = CpProof::new();
    let mut map: Vec<Slot> = Vec::with_capacity(proof.len());
    let emit = |out: &mut CpProof, just: CpJust, line: Option<&CpLine>| out.derive(just, line);
    for s in &proof.steps {
        let slot = match &s.just {
            CpJust::VarAxiom(x) | CpJust::VarAxiomUpper(x) if rho.contains_key(x) => {
                let lower = matches!(s.just, CpJust::VarAxiom(_));
                // x >= 0 at x = 1 and -x >= -1 at x = 0 leave 0 >= -1.
                Slot::Const(if lower == rho[x] { -BigInt::one() } else { BigInt::zero() })
            }
            CpJust::Initial(i) => {
                let orig = &sys.inequalities[*i].0;
                let r = orig.restrict(rho);
                if r != *orig && r.coeffs().is_empty() && !r.bound().is_positive() {
                    Slot::Const(r.bound().clone())
                } else {
                    Slot::At(emit(&mut out, CpJust::Initial(*i), Some(&r)), BigInt::zero())
                }
            }
            CpJust::Sum(i, j) => match (&map[*i], &map[*j]) {
                (Slot::Const(a), Slot::Const(b)) => Slot::Const(a + b),
                (Slot::Const(a), Slot::At(l, s)) | (Slot::At(l, s), Slot::Const(a)) => Slot::At(*l, s - a),
                (Slot::At(l1, s1), Slot::At(l2, s2)) => {
                    let slack = s1 + s2;
                    Slot::At(emit(&mut out, CpJust::Sum(*l1, *l2), None), slack)
                }
            },
            CpJust::Scalar(i, c) => match &map[*i] {
                Slot::Const(a) => Slot::Const(a * c),
                Slot::At(l, s) => {
                    let slack = s * c;
                    Slot::At(emit(&mut out, CpJust::Scalar(*l, c.clone()), None), slack)
                }
            },
            CpJust::Div(i, c) => match &map[*i] {
                Slot::Const(a) => Slot::Const(a.div_ceil(c)),
                Slot::At(l, s) => {
                    let have = out.line(*l).bound().clone();
                    let slack = have.div_ceil(c) - (&have - s).div_ceil(c);
                    Slot::At(emit(&mut out, CpJust::Div(*l, c.clone()), None), slack)
                }
            },
            j => Slot::At(emit(&mut out, j.clone(), None), BigInt::zero()),
        };
        map.push(slot);
    }
    if let Some(Slot::At(l, _)) = map.last() {
        if l + 1 != out.len() {
            // The final line was absorbed into an earlier one; restate it.
            out.scalar(*l, 1);
        }
    }
    out
}

/// Renumbers premises, renames variables and redirects initial references
/// while appending a fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpliceRef {
    /// An inequality of the destination system.
    Initial(usize),
    /// An existing destination line with the same (renamed) content.
    Line(usize),
}

/// Appends `frag` to `dst`; returns the destination index of each fragment
/// line.
pub fn splice(dst: &mut CpProof, frag: &CpProof, initial: impl Fn(usize) -> SpliceRef, var: impl Fn(u32) -> u32) -> Vec<usize> {
    let mut map: Vec<usize> = Vec::with_capacity(frag.len());
    for s in &frag.steps {
        let idx = match &s.just {
            CpJust::Initial(i) => match initial(*i) {
                SpliceRef::Initial(j) => dst.derive(CpJust::Initial(j), Some(&s.line.rename(&var))),
                SpliceRef::Line(l) => {
                    debug_assert_eq!(*dst.line(l), s.line.rename(&var));
                    l
                }
            },
            CpJust::VarAxiom(x) => dst.var_lower(var(*x)),
            CpJust::VarAxiomUpper(x) => dst.var_upper(var(*x)),
            j => dst.derive(j.remap(|i| map[i]), None),
        };
        map.push(idx);
    }
    map
}

/// Appends `frag` verbatim (same system, premises shifted).
pub fn append(dst: &mut CpProof, frag: &CpProof) -> usize {
    let offset = dst.len();
    dst.steps.extend(frag.steps.iter().map(|s| CpStep { line: s.line.clone(), just: s.just.remap(|i| i + offset) }));
    dst.len() - 1
}

/// Lifts a derivation from `base ∪ {x = b}` (the assumption at index
/// `n_base`, its opposite bound at `n_base + 1`) to one from `base` alone.
///
/// With `τ = 1 - x` for `b = 1` and `τ = x` for `b = 0`, each line `L`
/// becomes `L + K τ` for a non-negative integer `K`: the assumption itself
/// lifts to `0 >= 0` with `K = 1`, sums add and scalars multiply `K`, and a
/// division by `c` first pads `K` up to a multiple of `c` with copies of
/// `τ >= 0`. Returns the lifted proof and the final `K`.
pub fn cp_lift(proof: &CpProof, n_base: usize, x: u32, b: bool) -> Result<(CpProof, BigInt), CpError> {
    let tau_just = if b { CpJust::VarAxiomUpper(x) } else { CpJust::VarAxiom(x) };
    let tau_line = if b { CpLine::var_upper(x) } else { CpLine::var_lower(x) };
    let mut out = CpProof::new();
    let mut tau: Option<usize> = None;
    let mut get_tau = |out: &mut CpProof| *tau.get_or_insert_with(|| out.derive(tau_just.clone(), None));
    let mut map: Vec<usize> = Vec::with_capacity(proof.len());
    let mut ks: Vec<BigInt> = Vec::with_capacity(proof.len());
    for s in &proof.steps {
        let (idx, k) = match &s.just {
            CpJust::Initial(i) if *i < n_base => (out.derive(CpJust::Initial(*i), Some(&s.line)), BigInt::zero()),
            CpJust::Initial(i) if *i == n_base => {
                let t = get_tau(&mut out);
                (out.scalar(t, 0), BigInt::one())
            }
            CpJust::Initial(i) if *i == n_base + 1 => (get_tau(&mut out), BigInt::zero()),
            CpJust::Initial(i) => return Err(CpError::UnknownInitial(*i)),
            CpJust::VarAxiom(y) => (out.var_lower(*y), BigInt::zero()),
            CpJust::VarAxiomUpper(y) => (out.var_upper(*y), BigInt::zero()),
            CpJust::Sum(i, j) => (out.sum(map[*i], map[*j]), &ks[*i] + &ks[*j]),
            CpJust::Scalar(i, c) => (out.scalar(map[*i], c.clone()), &ks[*i] * c),
            CpJust::Div(i, c) => {
                let mut src = map[*i];
                let r = ks[*i].mod_floor(c);
                let mut k = ks[*i].clone();
                if !r.is_zero() {
                    let pad = c - &r;
                    let t = get_tau(&mut out);
                    let p = if pad.is_one() { t } else { out.scalar(t, pad.clone()) };
                    src = out.sum(src, p);
                    k += pad;
                }
                (out.div(src, c.clone()), k / c)
            }
        };
        debug_assert_eq!(*out.line(idx), s.line.add(&tau_line.scale(&k)));
        map.push(idx);
        ks.push(k);
    }
    let k = ks.pop().unwrap_or_default();
    if let Some(&last) = map.last() {
        if last + 1 != out.len() {
            // The final line was an alias of the padding axiom; restate it.
            out.scalar(last, 1);
        }
    }
    Ok((out, k))
}

/// Turns a refutation of `base ∪ {x = b}` into a derivation from `base` of
/// `K τ >= γ` (`τ` as in [`cp_lift`], `γ >= 1`). `K = 0` means the input
/// never used the assumption, and the result already refutes `base`.
pub fn cp_weaken(proof: &CpProof, base: &CpSystem, x: u32, b: bool) -> Result<(CpProof, BigInt), CpError> {
    if !proof.last_line().is_some_and(CpLine::is_falsum) {
        return Err(CpError::InputNotRefutation);
    }
    cp_lift(proof, base.inequalities.len(), x, b)
}

/// Length bookkeeping for one composition step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposeNode {
    pub vertex: u32,
    pub depth: usize,
    pub child_lengths: Vec<usize>,
    pub lifted_lengths: Vec<usize>,
    /// `sum(lifted_lengths) + 2k + 1`: one division per branch, the vertex
    /// axiom, and `k` sums.
    pub length: usize,
}

/// What to do at a node of the branching tree.
pub enum Branch {
    /// A refutation of the system extended by the node's assumptions.
    Leaf(CpProof),
    /// Branch on the colour of this vertex.
    Split(u32),
}

/// Decides a node of the branching tree from its `(vertex, colour)` prefix.
pub type BranchOracle<'o> = dyn FnMut(&[(u32, usize)]) -> Result<Branch, CpError> + 'o;

/// Composes branch refutations into a refutation of `sys`.
///
/// A node with assumptions `x_{u_1,c_1} = 1, ..., x_{u_d,c_d} = 1` (in
/// that order, each added by [`with_assignment`]) either is a leaf or
/// splits on a vertex `u`; each child refutation is lifted over its last
/// assumption to `K_c (1 - x_{u,c}) >= 1`, divided down to `-x_{u,c} >= 0`,
/// and the `k` results are summed with the vertex axiom of `u`.
pub struct Composer<'a> {
    sys: &'a CpSystem,
    k: usize,
    vertex_axiom: HashMap<u32, usize>,
    pub nodes: Vec<ComposeNode>,
}

impl<'a> Composer<'a> {
    pub fn new(sys: &'a CpSystem, k: usize) -> Composer<'a> {
        let mut vertex_axiom = HashMap::new();
        for (i, (l, tag)) in sys.inequalities.iter().enumerate() {
            if *tag == AxiomTag::Vertex {
                if let Some((x, _)) = l.coeffs().first() {
                    vertex_axiom.entry(*x / k as u32).or_insert(i);
                }
            }
        }
        Composer { sys, k, vertex_axiom, nodes: Vec::new() }
    }

    pub fn vertex_axiom(&self, v: u32) -> Result<usize, CpError> {
        self.vertex_axiom.get(&v).copied().ok_or(CpError::NoVertexAxiom(v))
    }

    pub fn run(&mut self, oracle: &mut BranchOracle<'_>) -> Result<CpProof, CpError> {
        self.node(&mut Vec::new(), oracle)
    }

    fn node(&mut self, prefix: &mut Vec<(u32, usize)>, oracle: &mut BranchOracle<'_>) -> Result<CpProof, CpError> {
        let u = match oracle(prefix)? {
            Branch::Leaf(p) => return Ok(p),
            Branch::Split(u) => u,
        };
        let va = self.vertex_axiom(u)?;
        let n_base = self.sys.inequalities.len() + 2 * prefix.len();
        let mut out = CpProof::new();
        let mut divs = Vec::with_capacity(self.k);
        let mut child_lengths = Vec::with_capacity(self.k);
        let mut lifted_lengths = Vec::with_capacity(self.k);
        for c in 0..self.k {
            prefix.push((u, c));
            let child = self.node(prefix, oracle)?;
            prefix.pop();
            if !child.last_line().is_some_and(CpLine::is_falsum) {
                return Err(CpError::InputNotRefutation);
            }
            let (lifted, k) = cp_lift(&child, n_base, colour_var(u as usize, c, self.k), true)?;
            if k.is_zero() {
                return Ok(lifted);
            }
            assert!(lifted.len() <= WEAKEN_FACTOR * child.len());
            child_lengths.push(child.len());
            lifted_lengths.push(lifted.len());
            let last = append(&mut out, &lifted);
            divs.push(out.div(last, k));
        }
        let mut acc = out.derive(CpJust::Initial(va), Some(&self.sys.inequalities[va].0));
        for d in divs {
            acc = out.sum(acc, d);
        }
        let length = lifted_lengths.iter().sum::<usize>() + 2 * self.k + 1;
        assert_eq!(out.len(), length, "composition length recurrence");
        self.nodes.push(ComposeNode { vertex: u, depth: prefix.len(), child_lengths, lifted_lengths, length });
        Ok(out)
    }
}

/// Branches on `vertices` in order. `subproofs` is keyed by colour tuples
/// of length at most `vertices.len()`; a present key is used as is, a
/// missing key is split further, and a missing full-length key is an error.
pub fn cp_branch_compose(
    sys: &CpSystem,
    k: usize,
    vertices: &[u32],
    subproofs: &BTreeMap<Vec<usize>, CpProof>,
) -> Result<(CpProof, Vec<ComposeNode>), CpError> {
    let mut comp = Composer::new(sys, k);
    let proof = comp.run(&mut |prefix| {
        let key: Vec<usize> = prefix.iter().map(|&(_, c)| c).collect();
        if let Some(p) = subproofs.get(&key) {
            Ok(Branch::Leaf(p.clone()))
        } else if key.len() < vertices.len() {
            Ok(Branch::Split(vertices[key.len()]))
        } else {
            Err(CpError::MissingBranch(key))
        }
    })?;
    Ok((proof, comp.nodes))
}

/// At-most-one pair inequalities `-a - b >= -1` of a system, keyed by the
/// ordered variable pair.
pub fn pair_index(sys: &CpSystem) -> HashMap<(u32, u32), usize> {
    let mut out = HashMap::new();
    for (i, (l, _)) in sys.inequalities.iter().enumerate() {
        let c = l.coeffs();
        let m1 = -BigInt::one();
        if c.len() == 2 && c[0].1 == m1 && c[1].1 == m1 && *l.bound() == m1 {
            out.entry((c[0].0, c[1].0)).or_insert(i);
        }
    }
    out
}

/// Facts `x >= 1`, each available as an initial inequality.
pub type Facts = [(u32, usize)];

/// A five-line refutation from two facts forbidden together by a pair
/// inequality, if any two are.
pub fn conflict_leaf(pairs: &HashMap<(u32, u32), usize>, facts: &Facts) -> Option<CpProof> {
    for (a, &(x, ix)) in facts.iter().enumerate() {
        for &(y, iy) in &facts[a + 1..] {
            let key = (x.min(y), x.max(y));
            if let Some(&p) = pairs.get(&key) {
                let mut out = CpProof::new();
                let e = out.derive(CpJust::Initial(p), Some(&CpLine::from_i64(&[(x, -1), (y, -1)], -1)));
                let fx = out.derive(CpJust::Initial(ix), Some(&CpLine::from_i64(&[(x, 1)], 1)));
                let s = out.sum(e, fx);
                let fy = out.derive(CpJust::Initial(iy), Some(&CpLine::from_i64(&[(y, 1)], 1)));
                out.sum(s, fy);
                return Some(out);
            }
        }
    }
    None
}
