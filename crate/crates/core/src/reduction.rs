//! The FPHP to k-colouring reduction: injectivity gadgets, the pre-coloured
//! graph, the pre-colouring chain, the final graph, and the degree-2
//! substitution that maps colouring variables to FPHP variables.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{Cap, FieldElement, FieldSpec, Monomial, Polynomial};
use crate::encodings::{collisions, colour_var, pigeon_var, FphpInstance, Graph};

/// `|V(G)| <= C1 * k^4 * n_pigeons`.
pub const C1: usize = 2;
/// `max degree <= C2 * k^2`.
pub const C2: usize = 2;
/// Inputs must have right degree at most `RIGHT_DEGREE_FACTOR * k`.
pub const RIGHT_DEGREE_FACTOR: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("colour {0} is not below k = {1}")]
    InvalidColour(usize, usize),
    #[error("gadget needs two distinct pigeons")]
    SamePigeon,
    #[error("reduction needs k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("right degree {got} exceeds {limit}")]
    RightDegreeTooLarge { got: usize, limit: usize },
    #[error("no legal colouring of a gadget for pigeon colours {0:?}")]
    GadgetInfeasible((usize, usize)),
    #[error("size bound violated: {0}")]
    BoundViolated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GadgetVariant {
    /// `c = c'`: extra edge between the last clique vertices.
    Edge,
    /// `c != c'`: the last clique vertices are one vertex.
    Merged,
}

/// One injectivity gadget attached to two pigeon vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetLayout {
    pub k: usize,
    /// Pigeon indices in the FPHP instance.
    pub pigeon_indices: (usize, usize),
    /// Vertex ids of the two pigeon vertices.
    pub pigeons: (u32, u32),
    /// Forbidden colour pair `(c, c')`, 0-based.
    pub colours: (usize, usize),
    /// `a_1..a_k`.
    pub left: Vec<u32>,
    /// `b_1..b_k`; in the merged variant `b_k == a_k`.
    pub right: Vec<u32>,
    /// `(w, w')`, pre-coloured `c` and `c'`.
    pub precoloured: (u32, u32),
    pub variant: GadgetVariant,
    /// Every edge of the gadget, pigeon attachments included.
    pub edges: Vec<(u32, u32)>,
}

impl GadgetLayout {
    /// Internal vertices in construction order (left, right, w, w').
    pub fn internal_vertices(&self) -> Vec<u32> {
        let mut out = self.left.clone();
        for &b in &self.right {
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out.push(self.precoloured.0);
        out.push(self.precoloured.1);
        out
    }

    /// All vertices, pigeons first.
    pub fn vertices(&self) -> Vec<u32> {
        let mut out = vec![self.pigeons.0, self.pigeons.1];
        out.extend(self.internal_vertices());
        out
    }

    /// The gadget as a standalone graph, with the local index of each vertex.
    pub fn local_graph(&self) -> (Graph, HashMap<u32, usize>) {
        let verts = self.vertices();
        let index: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self.edges.iter().map(|&(u, v)| (index[&u] as u32, index[&v] as u32));
        (Graph::new(verts.len(), edges).expect("gadget is simple"), index)
    }

    fn renamed(&self, f: &impl Fn(u32) -> u32) -> GadgetLayout {
        GadgetLayout {
            pigeons: (f(self.pigeons.0), f(self.pigeons.1)),
            left: self.left.iter().map(|&v| f(v)).collect(),
            right: self.right.iter().map(|&v| f(v)).collect(),
            precoloured: (f(self.precoloured.0), f(self.precoloured.1)),
            edges: self.edges.iter().map(|&(u, v)| (f(u), f(v))).collect(),
            ..self.clone()
        }
    }
}

/// Builds `D(i, i', c, c')` with fresh internal ids drawn from `fresh`.
pub fn build_gadget(
    pigeons: (u32, u32),
    pigeon_indices: (usize, usize),
    colours: (usize, usize),
    k: usize,
    fresh: &mut u32,
) -> Result<GadgetLayout, ReductionError> {
    let (c, c2) = colours;
    for x in [c, c2] {
        if x >= k {
            return Err(ReductionError::InvalidColour(x, k));
        }
    }
    if pigeons.0 == pigeons.1 {
        return Err(ReductionError::SamePigeon);
    }
    let mut next = || {
        let v = *fresh;
        *fresh += 1;
        v
    };
    let variant = if c == c2 { GadgetVariant::Edge } else { GadgetVariant::Merged };
    let left: Vec<u32> = (0..k).map(|_| next()).collect();
    let mut right: Vec<u32> = (0..k - 1).map(|_| next()).collect();
    right.push(match variant {
        GadgetVariant::Edge => next(),
        GadgetVariant::Merged => left[k - 1],
    });
    let w = next();
    let w2 = next();
    let mut edges = vec![(pigeons.0, left[0]), (pigeons.1, right[0])];
    for clique in [&left, &right] {
        for x in 0..k {
            for y in x + 1..k {
                edges.push((clique[x], clique[y]));
            }
        }
    }
    for l in 1..k - 1 {
        edges.push((w, left[l]));
        edges.push((w2, right[l]));
    }
    if variant == GadgetVariant::Edge {
        edges.push((left[k - 1], right[k - 1]));
    }
    Ok(GadgetLayout { k, pigeon_indices, pigeons, colours, left, right, precoloured: (w, w2), variant, edges })
}

/// The union of all gadgets, with the partial pre-colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecolouredGraph {
    pub graph: Graph,
    pub precolouring: Vec<Option<usize>>,
    pub pigeon_vertices: Vec<u32>,
    pub gadgets: Vec<GadgetLayout>,
}

/// One gadget per pair of pigeon edges meeting in a hole; pigeon `i` is
/// vertex `i`.
pub fn build_hat_g(b: &FphpInstance) -> Result<PrecolouredGraph, ReductionError> {
    let k = b.k();
    let n = b.n_pigeons();
    let mut fresh = n as u32;
    let mut gadgets = Vec::new();
    for (i, c, i2, c2) in collisions(b) {
        gadgets.push(build_gadget((i as u32, i2 as u32), (i, i2), (c, c2), k, &mut fresh)?);
    }
    let nv = fresh as usize;
    let mut precolouring = vec![None; nv];
    for g in &gadgets {
        precolouring[g.precoloured.0 as usize] = Some(g.colours.0);
        precolouring[g.precoloured.1 as usize] = Some(g.colours.1);
    }
    let graph = Graph::new(nv, gadgets.iter().flat_map(|g| g.edges.iter().copied())).expect("gadgets are simple");
    Ok(PrecolouredGraph { graph, precolouring, pigeon_vertices: (0..n as u32).collect(), gadgets })
}

/// Vertices `r_0..r_{M-1}` (0-based), every `k` consecutive ones a clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecolourChain {
    pub k: usize,
    pub m: usize,
    pub graph: Graph,
    next_in_class: Vec<usize>,
}

impl PrecolourChain {
    /// Next unused position `t` with `t ≡ c (mod k)`.
    pub fn allocate(&mut self, c: usize) -> Option<usize> {
        let t = self.next_in_class[c];
        if t >= self.m {
            return None;
        }
        self.next_in_class[c] += self.k;
        Some(t)
    }
}

/// A chain long enough for `n_precoloured` identifications of any colours:
/// `M = k * n_precoloured + k`.
pub fn build_precolour_chain(n_precoloured: usize, k: usize) -> PrecolourChain {
    let m = k * n_precoloured + k;
    let edges = (0..m).flat_map(|t| (t + 1..(t + k).min(m)).map(move |t2| (t as u32, t2 as u32)));
    PrecolourChain { k, m, graph: Graph::new(m, edges).expect("chain is simple"), next_in_class: (0..k).collect() }
}

/// Where a pre-coloured gadget vertex went.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSlot {
    pub gadget: usize,
    /// 0 for `w`, 1 for `w'`.
    pub side: usize,
    pub colour: usize,
    /// Position in the chain, `≡ colour (mod k)`.
    pub position: usize,
}

/// The final uncoloured graph `G(B)` and the maps back to the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: FphpInstance,
    pub k: usize,
    pub graph: Graph,
    /// Pigeon `i` is vertex `pigeon_vertices[i]`.
    pub pigeon_vertices: Vec<u32>,
    /// Gadgets in final vertex ids; `precoloured` points into the chain.
    pub gadgets: Vec<GadgetLayout>,
    /// Vertex id of chain position `t`.
    pub chain: Vec<u32>,
    pub chain_assignment: Vec<ChainSlot>,
}

impl ReductionOutput {
    /// Hole reached by pigeon `i` through its `c`-th edge.
    pub fn hole(&self, i: usize, c: usize) -> u32 {
        self.instance.neighbours(i)[c]
    }

    /// Gadget owning each vertex, if any; pigeons are shared and map to none.
    pub fn owner(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.graph.n_vertices()];
        for (gi, g) in self.gadgets.iter().enumerate() {
            for v in g.internal_vertices() {
                out[v as usize] = Some(gi);
            }
        }
        out
    }

    /// Chain position of each vertex, if it is on the chain.
    pub fn chain_position(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.graph.n_vertices()];
        for (t, &v) in self.chain.iter().enumerate() {
            out[v as usize] = Some(t);
        }
        out
    }
}

/// `G(B)`: pigeons first, then non-pre-coloured gadget vertices in order,
/// then the chain; each pre-coloured vertex becomes its chain vertex.
pub fn build_reduction(b: &FphpInstance) -> Result<ReductionOutput, ReductionError> {
    let k = b.k();
    if k < 3 {
        return Err(ReductionError::KTooSmall(k));
    }
    let limit = RIGHT_DEGREE_FACTOR * k;
    if b.right_degree() > limit {
        return Err(ReductionError::RightDegreeTooLarge { got: b.right_degree(), limit });
    }
    let hat = build_hat_g(b)?;
    let n_pre = hat.precolouring.iter().filter(|c| c.is_some()).count();
    let mut chain = build_precolour_chain(n_pre, k);
    let mut new_id: Vec<u32> = vec![u32::MAX; hat.graph.n_vertices()];
    let mut next = 0u32;
    for (v, pre) in hat.precolouring.iter().enumerate() {
        if pre.is_none() {
            new_id[v] = next;
            next += 1;
        }
    }
    let chain_ids: Vec<u32> = (0..chain.m as u32).map(|t| next + t).collect();
    let mut slots = Vec::new();
    for (gi, g) in hat.gadgets.iter().enumerate() {
        for (side, (w, c)) in [(g.precoloured.0, g.colours.0), (g.precoloured.1, g.colours.1)].into_iter().enumerate() {
            let t = chain.allocate(c).expect("M leaves a slot per pre-coloured vertex in every class");
            new_id[w as usize] = chain_ids[t];
            slots.push(ChainSlot { gadget: gi, side, colour: c, position: t });
        }
    }
    let total = next as usize + chain.m;
    let edges = hat
        .graph
        .edges()
        .iter()
        .map(|&(u, v)| (new_id[u as usize], new_id[v as usize]))
        .chain(chain.graph.edges().iter().map(|&(u, v)| (chain_ids[u as usize], chain_ids[v as usize])));
    let graph = Graph::new(total, edges).expect("identification keeps the graph simple");
    let rename = |v: u32| new_id[v as usize];
    let out = ReductionOutput {
        instance: b.clone(),
        k,
        pigeon_vertices: hat.pigeon_vertices.iter().map(|&v| rename(v)).collect(),
        gadgets: hat.gadgets.iter().map(|g| g.renamed(&rename)).collect(),
        chain: chain_ids,
        chain_assignment: slots,
        graph,
    };
    let n = b.n_pigeons().max(1);
    let vbound = C1 * k.pow(4) * n;
    if out.graph.n_vertices() > vbound {
        return Err(ReductionError::BoundViolated(format!("{} vertices > {}", out.graph.n_vertices(), vbound)));
    }
    let dbound = C2 * k * k;
    if out.graph.max_degree() > dbound {
        return Err(ReductionError::BoundViolated(format!("degree {} > {}", out.graph.max_degree(), dbound)));
    }
    Ok(out)
}

/// Colour of every gadget vertex, keyed by vertex id.
pub type GadgetColouring = BTreeMap<u32, usize>;

/// For every pigeon colour pair `(b, b') != (c, c')`, the lexicographically
/// first legal colouring of the gadget (vertices in id order, colours
/// ascending) with `i = b`, `i' = b'`, `w = c`, `w' = c'`.
pub fn fixed_gadget_colourings(g: &GadgetLayout) -> Result<BTreeMap<(usize, usize), GadgetColouring>, ReductionError> {
    let (graph, index) = g.local_graph();
    let mut order: Vec<u32> = index.keys().copied().collect();
    order.sort_unstable();
    let local_order: Vec<usize> = order.iter().map(|v| index[v]).collect();
    let k = g.k;
    let mut table = BTreeMap::new();
    for b in 0..k {
        for b2 in 0..k {
            if (b, b2) == g.colours {
                continue;
            }
            let mut colour: Vec<Option<usize>> = vec![None; graph.n_vertices()];
            colour[index[&g.pigeons.0]] = Some(b);
            colour[index[&g.pigeons.1]] = Some(b2);
            colour[index[&g.precoloured.0]] = Some(g.colours.0);
            colour[index[&g.precoloured.1]] = Some(g.colours.1);
            let pinned_ok = graph.edges().iter().all(|&(u, v)| match (colour[u as usize], colour[v as usize]) {
                (Some(x), Some(y)) => x != y,
                _ => true,
            });
            if !pinned_ok || !first_colouring(&graph, k, &local_order, 0, &mut colour) {
                return Err(ReductionError::GadgetInfeasible((b, b2)));
            }
            let full: Vec<usize> = colour.iter().map(|c| c.expect("complete")).collect();
            assert!(graph.is_proper_colouring(&full), "gadget colouring fails re-verification");
            table.insert((b, b2), order.iter().map(|&v| (v, full[index[&v]])).collect());
        }
    }
    Ok(table)
}

fn first_colouring(g: &Graph, k: usize, order: &[usize], pos: usize, colour: &mut Vec<Option<usize>>) -> bool {
    let Some(&v) = order.get(pos) else {
        return true;
    };
    if colour[v].is_some() {
        return first_colouring(g, k, order, pos + 1, colour);
    }
    for c in 0..k {
        if g.neighbours(v as u32).iter().any(|&u| colour[u as usize] == Some(c)) {
            continue;
        }
        colour[v] = Some(c);
        if first_colouring(g, k, order, pos + 1, colour) {
            return true;
        }
        colour[v] = None;
    }
    false
}

/// Images of every colouring variable `x_{v,j}` of `G(B)` as polynomials in
/// the FPHP variables `p_{i,c}`:
/// pigeon vertices map to their own edge variables; a gadget vertex `v` maps
/// to the sum of `p_{i,b} p_{i',b'}` over pairs whose fixed colouring gives
/// `v` colour `j`; a chain vertex outside every gadget maps to 1 when its
/// position is `≡ j (mod k)` and to 0 otherwise.
pub fn pc_substitution_map(out: &ReductionOutput, f: &FieldSpec) -> Result<HashMap<u32, Polynomial>, ReductionError> {
    let b = &out.instance;
    let k = out.k;
    let cap = Cap::Boolean;
    let mut images: HashMap<u32, Polynomial> = HashMap::new();
    for (i, &pv) in out.pigeon_vertices.iter().enumerate() {
        for j in 0..k {
            images.insert(colour_var(pv as usize, j, k), Polynomial::var(f, cap, pigeon_var(b, i, j)));
        }
    }
    let mut in_gadget = vec![false; out.graph.n_vertices()];
    for g in &out.gadgets {
        let table = fixed_gadget_colourings(g)?;
        let (i, i2) = g.pigeon_indices;
        for v in g.internal_vertices() {
            in_gadget[v as usize] = true;
            for j in 0..k {
                let terms = table.iter().filter(|(_, col)| col[&v] == j).map(|(&(bb, bb2), _)| {
                    (Monomial::from_vars([pigeon_var(b, i, bb), pigeon_var(b, i2, bb2)]), FieldElement::ONE)
                });
                images.insert(colour_var(v as usize, j, k), Polynomial::from_terms(f, cap, terms));
            }
        }
    }
    for (t, &v) in out.chain.iter().enumerate() {
        if in_gadget[v as usize] {
            continue;
        }
        for j in 0..k {
            let c = if t % k == j { FieldElement::ONE } else { FieldElement::ZERO };
            images.insert(colour_var(v as usize, j, k), Polynomial::constant(f, cap, c));
        }
    }
    Ok(images)
}
