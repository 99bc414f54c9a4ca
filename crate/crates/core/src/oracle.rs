//! Brute-force ground truth: backtracking colourers and matchers, and
//! exhaustive point enumeration for polynomial systems.
//!
//! Every witness is re-verified against the instance before it is returned.

use crate::algebra::{Cap, FieldElement};
use crate::encodings::{FphpInstance, Graph, PolySystem};
use crate::reduction::GadgetLayout;

/// Default cap on search nodes per call.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
/// Default cap on the number of variables for point enumeration.
pub const DEFAULT_MAX_POLY_VARS: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
    pub max_poly_vars: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { nodes: DEFAULT_NODE_BUDGET, max_poly_vars: DEFAULT_MAX_POLY_VARS }
    }
}

impl Budget {
    pub fn nodes(nodes: u64) -> Budget {
        Budget { nodes, ..Budget::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
    #[error("{0} variables exceed the enumeration bound")]
    TooManyVariables(usize),
    #[error("system has no root of unity for its cap")]
    MissingRoot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Colour per vertex.
    Colouring(Vec<usize>),
    /// Edge position per pigeon.
    Matching(Vec<usize>),
    /// Value per variable.
    Assignment(Vec<FieldElement>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub satisfiable: bool,
    pub witness: Option<Witness>,
    pub nodes_explored: u64,
}

struct Colourer<'a> {
    g: &'a Graph,
    k: usize,
    colour: Vec<Option<usize>>,
    /// `blocked[v][c]`: number of coloured neighbours of `v` with colour `c`.
    blocked: Vec<Vec<u32>>,
    nodes: u64,
    budget: u64,
    /// Colours are interchangeable (no pre-colouring), so only one unused
    /// colour needs trying.
    symmetric: bool,
    used: Vec<u32>,
}

impl Colourer<'_> {
    fn options(&self, v: usize) -> usize {
        (0..self.k).filter(|&c| self.blocked[v][c] == 0).count()
    }

    fn set(&mut self, v: usize, c: usize) {
        self.colour[v] = Some(c);
        self.used[c] += 1;
        for &u in self.g.neighbours(v as u32) {
            self.blocked[u as usize][c] += 1;
        }
    }

    fn unset(&mut self, v: usize, c: usize) {
        self.colour[v] = None;
        self.used[c] -= 1;
        for &u in self.g.neighbours(v as u32) {
            self.blocked[u as usize][c] -= 1;
        }
    }

    /// Uncoloured vertex with fewest options, then highest degree, then id.
    fn pick(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..self.g.n_vertices() {
            if self.colour[v].is_some() {
                continue;
            }
            let opts = self.options(v);
            let deg = self.g.degree(v as u32);
            let better = match best {
                None => true,
                Some((_, bo, bd)) => opts < bo || (opts == bo && deg > bd),
            };
            if better {
                best = Some((v, opts, deg));
                if opts == 0 {
                    break;
                }
            }
        }
        best.map(|(v, o, _)| (v, o))
    }

    fn search(&mut self) -> Result<bool, OracleError> {
        let Some((v, opts)) = self.pick() else {
            return Ok(true);
        };
        if opts == 0 {
            return Ok(false);
        }
        let mut tried_fresh = false;
        for c in 0..self.k {
            if self.blocked[v][c] != 0 {
                continue;
            }
            if self.symmetric && self.used[c] == 0 {
                if tried_fresh {
                    continue;
                }
                tried_fresh = true;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(OracleError::BudgetExceeded(self.budget));
            }
            self.set(v, c);
            if self.search()? {
                return Ok(true);
            }
            self.unset(v, c);
        }
        Ok(false)
    }
}

/// Exact k-colourability by backtracking with forward checking.
pub fn brute_colour(g: &Graph, k: usize, budget: Budget) -> Result<OracleVerdict, OracleError> {
    brute_colour_precoloured(g, k, &vec![None; g.n_vertices()], budget)
}

/// Whether a partial colouring extends to a proper k-colouring.
pub fn brute_colour_precoloured(
    g: &Graph,
    k: usize,
    pre: &[Option<usize>],
    budget: Budget,
) -> Result<OracleVerdict, OracleError> {
    let n = g.n_vertices();
    let mut s = Colourer {
        g,
        k,
        colour: vec![None; n],
        blocked: vec![vec![0; k]; n],
        nodes: 0,
        budget: budget.nodes,
        symmetric: pre.iter().all(Option::is_none),
        used: vec![0; k],
    };
    let unsat = OracleVerdict { satisfiable: false, witness: None, nodes_explored: 0 };
    for (v, c) in pre.iter().enumerate() {
        if let Some(c) = *c {
            if c >= k || s.blocked[v][c] != 0 {
                return Ok(unsat);
            }
            s.set(v, c);
        }
    }
    let found = s.search()?;
    let nodes = s.nodes;
    if !found {
        return Ok(OracleVerdict { satisfiable: false, witness: None, nodes_explored: nodes });
    }
    let colouring: Vec<usize> = s.colour.iter().map(|c| c.expect("complete")).collect();
    assert!(g.is_proper_colouring(&colouring), "colouring witness fails re-verification");
    assert!(pre.iter().zip(&colouring).all(|(p, c)| p.is_none_or(|p| p == *c)));
    Ok(OracleVerdict { satisfiable: true, witness: Some(Witness::Colouring(colouring)), nodes_explored: nodes })
}

/// Exact FPHP satisfiability: an injective choice of one listed hole per pigeon.
pub fn brute_fphp(b: &FphpInstance, budget: Budget) -> Result<OracleVerdict, OracleError> {
    fn go(
        b: &FphpInstance,
        i: usize,
        used: &mut [bool],
        choice: &mut Vec<usize>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<bool, OracleError> {
        if i == b.n_pigeons() {
            return Ok(true);
        }
        for (c, &h) in b.neighbours(i).iter().enumerate() {
            if used[h as usize] {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return Err(OracleError::BudgetExceeded(budget));
            }
            used[h as usize] = true;
            choice.push(c);
            if go(b, i + 1, used, choice, nodes, budget)? {
                return Ok(true);
            }
            choice.pop();
            used[h as usize] = false;
        }
        Ok(false)
    }
    let mut used = vec![false; b.n_holes()];
    let mut choice = Vec::new();
    let mut nodes = 0;
    if b.n_pigeons() > b.n_holes() {
        return Ok(OracleVerdict { satisfiable: false, witness: None, nodes_explored: 0 });
    }
    let found = go(b, 0, &mut used, &mut choice, &mut nodes, budget.nodes)?;
    if !found {
        return Ok(OracleVerdict { satisfiable: false, witness: None, nodes_explored: nodes });
    }
    assert!(b.is_valid_mapping(&choice), "matching witness fails re-verification");
    Ok(OracleVerdict { satisfiable: true, witness: Some(Witness::Matching(choice)), nodes_explored: nodes })
}

fn enumerate_points(sys: &PolySystem, values: &[FieldElement], budget: Budget) -> Result<OracleVerdict, OracleError> {
    let n = sys.n_vars();
    if n > budget.max_poly_vars {
        return Err(OracleError::TooManyVariables(n));
    }
    // Each axiom is checked as soon as its largest variable is assigned.
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (idx, p) in sys.polys().enumerate() {
        let slot = p.variables().iter().next_back().map(|&v| v as usize + 1).unwrap_or(0);
        due[slot].push(idx);
    }
    let holds = |assign: &[FieldElement], slot: usize| {
        due[slot].iter().all(|&idx| {
            sys.axioms[idx].poly.evaluate_with(|v| assign.get(v as usize).copied()).map(|x| x.is_zero()).unwrap_or(false)
        })
    };
    let unsat = |nodes| Ok(OracleVerdict { satisfiable: false, witness: None, nodes_explored: nodes });
    if !holds(&[], 0) {
        return unsat(0);
    }
    let mut assign: Vec<FieldElement> = Vec::with_capacity(n);
    let mut next: Vec<usize> = Vec::with_capacity(n);
    let mut nodes = 0u64;
    // Iterative depth-first search over value indices.
    next.push(0);
    while let Some(&choice) = next.last() {
        let depth = next.len() - 1;
        if depth == n {
            let witness = assign.clone();
            for p in sys.polys() {
                let val = p.evaluate_with(|v| witness.get(v as usize).copied()).expect("total assignment");
                assert!(val.is_zero(), "point witness fails re-verification");
            }
            return Ok(OracleVerdict { satisfiable: true, witness: Some(Witness::Assignment(witness)), nodes_explored: nodes });
        }
        if choice == values.len() {
            next.pop();
            assign.pop();
            if let Some(last) = next.last_mut() {
                *last += 1;
            }
            continue;
        }
        nodes += 1;
        if nodes > budget.nodes {
            return Err(OracleError::BudgetExceeded(budget.nodes));
        }
        assign.truncate(depth);
        assign.push(values[choice]);
        if holds(&assign, depth + 1) {
            next.push(0);
        } else {
            assign.pop();
            *next.last_mut().unwrap() += 1;
        }
    }
    unsat(nodes)
}

/// Exhaustive search over `{0,1}^n` for a common zero.
pub fn poly_system_satisfiable_01(sys: &PolySystem, budget: Budget) -> Result<OracleVerdict, OracleError> {
    enumerate_points(sys, &[FieldElement::ZERO, FieldElement::ONE], budget)
}

/// Exhaustive search over `{1, w, ..., w^{k-1}}^n` for a common zero.
pub fn poly_system_satisfiable_roots(sys: &PolySystem, budget: Budget) -> Result<OracleVerdict, OracleError> {
    let Cap::Roots(k) = sys.cap else {
        return Err(OracleError::MissingRoot);
    };
    let f = &sys.field;
    let (w, kk) = f.kth_root().ok_or(OracleError::MissingRoot)?;
    if kk != k {
        return Err(OracleError::MissingRoot);
    }
    let values: Vec<FieldElement> = (0..k as u64).map(|j| f.pow(w, j)).collect();
    enumerate_points(sys, &values, budget)
}

/// Whether the gadget admits a completion with pigeon colours `(b, b2)`
/// exactly when `(b, b2) != (c, c2)`.
pub fn check_claim_gadget(g: &GadgetLayout, budget: Budget) -> Result<bool, OracleError> {
    let (graph, index) = g.local_graph();
    let local = |v: u32| index[&v];
    let k = g.k;
    for b in 0..k {
        for b2 in 0..k {
            let mut pre = vec![None; graph.n_vertices()];
            pre[local(g.pigeons.0)] = Some(b);
            pre[local(g.pigeons.1)] = Some(b2);
            pre[local(g.precoloured.0)] = Some(g.colours.0);
            pre[local(g.precoloured.1)] = Some(g.colours.1);
            let ok = brute_colour_precoloured(&graph, k, &pre, budget)?.satisfiable;
            if ok != ((b, b2) != g.colours) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
