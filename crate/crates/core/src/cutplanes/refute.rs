use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::transform::{
    conflict_leaf, cp_lift, pair_index, splice, with_assignment, Branch, ComposeNode, Composer, CpError, SpliceRef, WEAKEN_FACTOR,
};
use super::{prune_unused, strip_trivial, CpJust, CpLine, CpProof};
use crate::encodings::{colour_var, encode_colouring_cp, encode_fphp_cp, pigeon_var, CpSystem, FphpInstance};
use crate::reduction::{GadgetLayout, ReductionOutput};

/// A pigeon set whose neighbourhood is smaller than itself, found from a
/// maximum matching; `None` if every pigeon can be matched.
pub fn hall_violator(b: &FphpInstance) -> Option<Vec<usize>> {
    let mut hole_to: Vec<Option<usize>> = vec![None; b.n_holes()];
    fn augment(b: &FphpInstance, i: usize, seen: &mut [bool], hole_to: &mut [Option<usize>]) -> bool {
        for &h in b.neighbours(i) {
            let h = h as usize;
            if seen[h] {
                continue;
            }
            seen[h] = true;
            if hole_to[h].is_none_or(|j| augment(b, j, seen, hole_to)) {
                hole_to[h] = Some(i);
                return true;
            }
        }
        false
    }
    let mut unmatched = None;
    for i in 0..b.n_pigeons() {
        if !augment(b, i, &mut vec![false; b.n_holes()], &mut hole_to) {
            unmatched = Some(i);
            break;
        }
    }
    // Pigeons reachable from an unmatched one by alternating paths: every
    // hole they see is matched inside the set, so it has one spare pigeon.
    let start = unmatched?;
    let mut set = vec![start];
    let mut in_set: HashSet<usize> = HashSet::from([start]);
    let mut at = 0;
    while at < set.len() {
        for &h in b.neighbours(set[at]) {
            let j = hole_to[h as usize].expect("maximum matching saturates reachable holes");
            if in_set.insert(j) {
                set.push(j);
            }
        }
        at += 1;
    }
    set.sort_unstable();
    Some(set)
}

/// Declared length bound of [`cp_refute_php`]: `|V(B)|^3` with
/// `|V(B)| = pigeons + holes`.
pub fn php_length_bound(b: &FphpInstance) -> usize {
    (b.n_pigeons() + b.n_holes()).pow(3)
}

/// Cutting planes refutation of the functional pigeonhole inequalities of
/// an instance without a complete left matching.
///
/// For a Hall-violating pigeon set `P`, each hole's pigeons from `P` are
/// summed to at most one by the clique ladder (`r - 1` copies of the
/// size-`r` sum plus the `r` pairs through the next pigeon, divided by
/// `r`), and the result is added to the pigeon axioms of `P`.
pub fn cp_refute_php(b: &FphpInstance) -> Result<CpProof, CpError> {
    let set = hall_violator(b).ok_or(CpError::MatchingExists)?;
    let sys = encode_fphp_cp(b);
    let pairs = pair_index(&sys);
    let in_set: HashSet<usize> = set.iter().copied().collect();
    let mut out = CpProof::new();
    let pigeons: Vec<usize> = set.iter().map(|&i| out.initial(&sys, i)).collect();
    let mut total = out.sum_all(&pigeons);
    let mut holes: Vec<u32> = set.iter().flat_map(|&i| b.neighbours(i).iter().copied()).collect();
    holes.sort_unstable();
    holes.dedup();
    for &h in &holes {
        let vars: Vec<u32> =
            b.pigeons_at(h).into_iter().filter(|(i, _)| in_set.contains(i)).map(|(i, c)| pigeon_var(b, i, c)).collect();
        let pair = |out: &mut CpProof, x: u32, y: u32| out.initial(&sys, pairs[&(x.min(y), x.max(y))]);
        let mut s = if vars.len() == 1 { out.var_upper(vars[0]) } else { pair(&mut out, vars[0], vars[1]) };
        for r in 2..vars.len() {
            let mut acc = if r == 2 { s } else { out.scalar(s, r - 1) };
            for &v in &vars[..r] {
                let p = pair(&mut out, v, vars[r]);
                acc = out.sum(acc, p);
            }
            s = out.div(acc, r);
        }
        total = out.sum(total, s);
    }
    let excess = out.line(total).bound().clone();
    debug_assert!(out.line(total).coeffs().is_empty() && excess.is_positive());
    if !excess.is_one() {
        out.div(total, excess);
    }
    Ok(out)
}

/// Premises of a gadget refutation: the colouring inequalities followed by
/// `x_{w,c} >= 1` (index `n`) and `x_{w',c'} >= 1` (index `n + 2`), each
/// with its opposite bound.
pub fn gadget_premise_system(sys: &CpSystem, g: &GadgetLayout) -> CpSystem {
    let (w, w2) = g.precoloured;
    let (c, c2) = g.colours;
    with_assignment(sys, &[(colour_var(w as usize, c, g.k), true), (colour_var(w2 as usize, c2, g.k), true)])
}

#[derive(Clone, Debug)]
pub struct GadgetRefutation {
    /// Derivation of `x_{i,c} + x_{i',c'} <= 1` over
    /// [`gadget_premise_system`].
    pub proof: CpProof,
    pub nodes: Vec<ComposeNode>,
    /// Multipliers from lifting the two pigeon assumptions.
    pub k_pigeons: (BigInt, BigInt),
}

/// Declared length bound of [`cp_refute_gadget`], a `k^{O(k)}` recursion:
/// leaves have 5 lines, each of at most `2k` branching levels costs
/// `k * WEAKEN_FACTOR * L + 2k + 1`, and the two pigeon lifts plus padding
/// cost `WEAKEN_FACTOR^2 * L + 4`.
pub fn gadget_length_bound(k: usize) -> usize {
    let mut l = 5usize;
    for _ in 0..2 * k {
        l = k * WEAKEN_FACTOR * l + 2 * k + 1;
    }
    WEAKEN_FACTOR * WEAKEN_FACTOR * l + 4
}

/// Derives `x_{i,c} + x_{i',c'} <= 1` for a gadget from the colouring
/// inequalities and its two pre-colour premises. The colours of the
/// internal vertices are branched on (fewest remaining colours first) until
/// two facts clash on an edge, the two pigeon assumptions are lifted, their
/// multipliers equalised, and the result divided.
pub fn cp_refute_gadget(sys: &CpSystem, g: &GadgetLayout) -> Result<GadgetRefutation, CpError> {
    let k = g.k;
    let n = sys.inequalities.len();
    let base = gadget_premise_system(sys, g);
    let pairs = pair_index(sys);
    let (p, p2) = g.pigeons;
    let (c, c2) = g.colours;
    let (xp, xp2) = (colour_var(p as usize, c, k), colour_var(p2 as usize, c2, k));
    let (w, w2) = g.precoloured;
    let fixed = [(w, c), (w2, c2), (p, c), (p2, c2)];
    let free: Vec<u32> = g.internal_vertices().into_iter().filter(|&v| v != w && v != w2).collect();
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in &g.edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    // `base` plus the two pigeon assumptions is the composer's root.
    let root = with_assignment(&base, &[(xp, true), (xp2, true)]);
    let mut comp = Composer::new(&root, k);
    let refutation = comp.run(&mut |prefix| {
        let assigned: Vec<(u32, usize)> = fixed.iter().copied().chain(prefix.iter().copied()).collect();
        let facts: Vec<(u32, usize)> =
            assigned.iter().enumerate().map(|(j, &(v, col))| (colour_var(v as usize, col, k), n + 2 * j)).collect();
        if let Some(leaf) = conflict_leaf(&pairs, &facts) {
            return Ok(Branch::Leaf(leaf));
        }
        let available = |v: u32| {
            (0..k)
                .filter(|&col| !assigned.iter().any(|&(u, cu)| cu == col && adj.get(&v).is_some_and(|nb| nb.contains(&u))))
                .count()
        };
        free.iter()
            .filter(|v| !assigned.iter().any(|(u, _)| u == *v))
            .min_by_key(|&&v| available(v))
            .map(|&v| Branch::Split(v))
            .ok_or_else(|| CpError::GadgetColourable(assigned.clone()))
    });
    let refutation = refutation?;
    let (lift1, k2) = cp_lift(&refutation, n + 6, xp2, true)?;
    let (mut proof, k1) = cp_lift(&lift1, n + 4, xp, true)?;
    let kk = k1.clone().max(k2.clone());
    if !kk.is_positive() {
        return Err(CpError::InputNotRefutation);
    }
    let mut last = proof.len() - 1;
    for (x, have) in [(xp, &k1), (xp2, &k2)] {
        let pad = &kk - have;
        if pad.is_positive() {
            let u = proof.var_upper(x);
            let s = if pad.is_one() { u } else { proof.scalar(u, pad) };
            last = proof.sum(last, s);
        }
    }
    proof.div(last, kk);
    debug_assert_eq!(*proof.last_line().unwrap(), CpLine::from_i64(&[(xp, -1), (xp2, -1)], -1));
    Ok(GadgetRefutation { proof, nodes: comp.nodes, k_pigeons: (k1, k2) })
}

/// Lines per chain propagation step: the vertex axiom, then for each of the
/// other `k - 1` colours an edge, its sum with the neighbour's fact, and the
/// running sum.
pub fn chain_step_length(k: usize) -> usize {
    3 * k - 2
}

#[derive(Clone, Debug)]
pub struct ReductionRefutation {
    /// Over `encode_colouring_cp(&out.graph, k)`; trivial and unused lines
    /// removed.
    pub proof: CpProof,
    /// Length before clean-up.
    pub raw_length: usize,
    /// The identity branch: every step after the first clique.
    pub identity_branch_length: usize,
    pub gadget_lengths: Vec<usize>,
    pub php_length: usize,
    pub top_nodes: Vec<ComposeNode>,
}

/// Declared length bound of [`cp_refute_reduction`]:
/// `(k * WEAKEN_FACTOR)^k * (2k + 1) * M_id`, with the identity branch
/// bounded by `M_id = 2k + chain_step_length(k) * M + Q * (G(k) + 2) +
/// |V(B)|^3` for `Q` gadgets on a chain of `M` vertices. Since `Q <= (nk)^2`
/// and `M = O(kQ)`, this is `k^{O(k)} |V(B)|^4` for fixed right degree.
pub fn reduction_length_bound(out: &ReductionOutput) -> u128 {
    let k = out.k as u128;
    let q = out.gadgets.len() as u128;
    let m = out.chain.len() as u128;
    let id = 2 * k
        + chain_step_length(out.k) as u128 * m
        + q * (gadget_length_bound(out.k) as u128 + 2)
        + php_length_bound(&out.instance) as u128;
    (k * WEAKEN_FACTOR as u128).pow(out.k as u32) * (2 * k + 1) * id
}

/// Refutes the colouring inequalities of a reduction graph whose FPHP
/// instance has no complete matching.
///
/// The first `k` chain vertices are branched on; a repeated colour clashes
/// on a clique edge, and every permutation reuses the identity branch with
/// colours renamed. In the identity branch chain position `t` gets colour
/// `t mod k` by clique sums, each gadget yields its collision inequality
/// from its two pre-coloured chain vertices, and the pigeonhole refutation
/// finishes on the pigeon vertices.
pub fn cp_refute_reduction(out: &ReductionOutput) -> Result<ReductionRefutation, CpError> {
    let k = out.k;
    let php = cp_refute_php(&out.instance)?;
    let sys = encode_colouring_cp(&out.graph, k);
    let n = sys.inequalities.len();
    let pairs = pair_index(&sys);
    let comp_probe = Composer::new(&sys, k);
    let vertex_axiom = |v: u32| comp_probe.vertex_axiom(v);

    let mut id = CpProof::new();
    let mut fact: Vec<usize> = Vec::with_capacity(out.chain.len());
    for t in 0..out.chain.len() {
        let r = out.chain[t] as usize;
        let c = t % k;
        if t < k {
            fact.push(id.derive(CpJust::Initial(n + 2 * t), Some(&CpLine::from_i64(&[(colour_var(r, c, k), 1)], 1))));
            continue;
        }
        let va = vertex_axiom(r as u32)?;
        let mut acc = id.initial(&sys, va);
        for c2 in (0..k).filter(|&c2| c2 != c) {
            let s = t - (t + k - c2) % k;
            let (a, b) = (colour_var(out.chain[s] as usize, c2, k), colour_var(r, c2, k));
            let e = id.initial(&sys, pairs[&(a.min(b), a.max(b))]);
            let e = id.sum(e, fact[s]);
            acc = id.sum(acc, e);
        }
        fact.push(acc);
    }
    let pos = out.chain_position();
    let mut gadget_lines = Vec::with_capacity(out.gadgets.len());
    let mut gadget_lengths = Vec::with_capacity(out.gadgets.len());
    for g in &out.gadgets {
        let frag = cp_refute_gadget(&sys, g)?;
        gadget_lengths.push(frag.proof.len());
        let (w, w2) = g.precoloured;
        let (c, c2) = g.colours;
        let fw = fact[pos[w as usize].expect("pre-coloured vertices lie on the chain")];
        let fw2 = fact[pos[w2 as usize].expect("pre-coloured vertices lie on the chain")];
        let uw = id.var_upper(colour_var(w as usize, c, k));
        let uw2 = id.var_upper(colour_var(w2 as usize, c2, k));
        let map = splice(
            &mut id,
            &frag.proof,
            |i| match i {
                _ if i < n => SpliceRef::Initial(i),
                _ if i == n => SpliceRef::Line(fw),
                _ if i == n + 1 => SpliceRef::Line(uw),
                _ if i == n + 2 => SpliceRef::Line(fw2),
                _ => SpliceRef::Line(uw2),
            },
            |x| x,
        );
        gadget_lines.push(*map.last().expect("gadget derivations are non-empty"));
    }
    let n_p = out.instance.n_pigeons();
    let pv = &out.pigeon_vertices;
    let mut pigeon_axioms = Vec::with_capacity(n_p);
    for &v in pv {
        pigeon_axioms.push(vertex_axiom(v)?);
    }
    splice(
        &mut id,
        &php,
        |i| if i < n_p { SpliceRef::Initial(pigeon_axioms[i]) } else { SpliceRef::Line(gadget_lines[i - n_p]) },
        |x| colour_var(pv[x as usize / k] as usize, x as usize % k, k),
    );
    let identity_branch_length = id.len();

    let index: HashMap<&CpLine, usize> = sys.inequalities.iter().enumerate().map(|(i, (l, _))| (l, i)).collect();
    let first: Vec<u32> = out.chain[..k].to_vec();
    let mut comp = Composer::new(&sys, k);
    let composed = comp.run(&mut |prefix| {
        let facts: Vec<(u32, usize)> =
            prefix.iter().enumerate().map(|(j, &(v, c))| (colour_var(v as usize, c, k), n + 2 * j)).collect();
        if let Some(leaf) = conflict_leaf(&pairs, &facts) {
            return Ok(Branch::Leaf(leaf));
        }
        if prefix.len() < k {
            return Ok(Branch::Split(first[prefix.len()]));
        }
        let perm: Vec<usize> = prefix.iter().map(|&(_, c)| c).collect();
        Ok(Branch::Leaf(recolour(&id, &perm, k, n, &index, &sys)))
    })?;
    let raw_length = composed.len();
    let proof = prune_unused(&strip_trivial(&composed));
    Ok(ReductionRefutation {
        proof,
        raw_length,
        identity_branch_length,
        gadget_lengths,
        php_length: php.len(),
        top_nodes: comp.nodes,
    })
}

/// Applies the colour permutation `c -> perm[c]` to a proof over the
/// colouring system extended by assumptions; assumption indices are kept.
fn recolour(proof: &CpProof, perm: &[usize], k: usize, n: usize, index: &HashMap<&CpLine, usize>, sys: &CpSystem) -> CpProof {
    let sigma = |x: u32| colour_var(x as usize / k, perm[x as usize % k], k);
    let mut out = CpProof::new();
    let map = splice(
        &mut out,
        proof,
        |i| {
            if i < n {
                SpliceRef::Initial(index[&sys.inequalities[i].0.rename(sigma)])
            } else {
                SpliceRef::Initial(i)
            }
        },
        sigma,
    );
    debug_assert_eq!(map.len(), proof.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutplanes::cp_check;
    use crate::reduction::build_reduction;

    #[test]
    fn php_small() {
        for (p, h) in [(2, 1), (3, 2), (4, 3), (5, 4)] {
            let b = FphpInstance::complete(p, h);
            let proof = cp_refute_php(&b).unwrap();
            let r = cp_check(&proof, &encode_fphp_cp(&b));
            assert!(r.refutation, "{p}/{h}: {r:?}");
            assert!(proof.len() <= php_length_bound(&b));
            assert_eq!(*proof.last_line().unwrap(), CpLine::falsum());
        }
        assert_eq!(cp_refute_php(&FphpInstance::complete(3, 3)).unwrap_err(), CpError::MatchingExists);
    }

    #[test]
    fn hall_set_on_sparse_instance() {
        // Pigeons 0..2 share holes {0, 1}; pigeon 3 is free.
        let b = FphpInstance::new(4, 2, vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(hall_violator(&b), Some(vec![0, 1, 2]));
        assert!(cp_check(&cp_refute_php(&b).unwrap(), &encode_fphp_cp(&b)).refutation);
    }

    #[test]
    fn gadgets_of_k43() {
        let out = build_reduction(&FphpInstance::complete(4, 3)).unwrap();
        let sys = encode_colouring_cp(&out.graph, 3);
        for g in out.gadgets.iter().take(3) {
            let r = cp_refute_gadget(&sys, g).unwrap();
            let c = cp_check(&r.proof, &gadget_premise_system(&sys, g));
            assert!(c.valid, "{c:?}");
            assert!(r.proof.len() <= gadget_length_bound(3));
        }
    }
}
