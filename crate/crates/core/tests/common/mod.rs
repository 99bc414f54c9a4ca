//! Strategies and independent reference checks shared by the property tests.
#![allow(dead_code)]

use proptest::prelude::*;

use polycol::cutplanes::CpLine;
use polycol::encodings::{CpSystem, FphpInstance, Graph};

/// Graph on `n` vertices with one bit per unordered pair.
pub fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let mut edges = Vec::new();
    let mut b = 0;
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if bits >> b & 1 == 1 {
                edges.push((u, v));
            }
            b += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

pub fn small_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, any::<u64>()).prop_map(|(n, bits)| graph_from_bits(n, bits))
}

/// Left-regular instance with distinct holes per pigeon.
pub fn small_fphp(max_pigeons: usize, max_holes: usize, max_k: usize) -> impl Strategy<Value = FphpInstance> {
    (1..=max_k, 1..=max_holes, 1..=max_pigeons).prop_filter("k <= holes", |(k, h, _)| k <= h).prop_flat_map(|(k, h, p)| {
        prop::collection::vec(Just((0..h as u32).collect::<Vec<u32>>()).prop_shuffle(), p)
            .prop_map(move |rows| FphpInstance::new(h, k, rows.into_iter().map(|r| r[..k].to_vec()).collect()).unwrap())
    })
}

/// Colourability by enumerating all `k^n` colourings.
pub fn colourable_by_enumeration(g: &Graph, k: usize) -> bool {
    let n = g.n_vertices();
    let total = (k as u64).pow(n as u32);
    (0..total).any(|mut code| {
        let col: Vec<usize> = (0..n)
            .map(|_| {
                let c = (code % k as u64) as usize;
                code /= k as u64;
                c
            })
            .collect();
        g.edges().iter().all(|&(u, v)| col[u as usize] != col[v as usize])
    })
}

/// Whether some choice of one edge per pigeon is injective, by enumerating
/// all `k^pigeons` choices.
pub fn fphp_by_enumeration(b: &FphpInstance) -> bool {
    let p = b.n_pigeons();
    let k = b.k();
    let total = (k as u64).pow(p as u32);
    (0..total).any(|mut code| {
        let mut seen = std::collections::HashSet::new();
        (0..p).all(|i| {
            let c = (code % k as u64) as usize;
            code /= k as u64;
            seen.insert(b.neighbours(i)[c])
        })
    })
}

/// 0/1 feasibility of inequalities by backtracking, checking a line once its
/// largest variable is set.
pub fn cp_satisfiable(sys: &CpSystem) -> bool {
    fn go(lines: &[Vec<&CpLine>], val: &mut Vec<bool>, n: usize) -> bool {
        let d = val.len();
        if !lines[d].iter().all(|l| l.satisfied_by(|x| val[x as usize])) {
            return false;
        }
        if d == n {
            return true;
        }
        for b in [false, true] {
            val.push(b);
            if go(lines, val, n) {
                return true;
            }
            val.pop();
        }
        false
    }
    let n = sys.n_vars;
    let mut due: Vec<Vec<&CpLine>> = vec![Vec::new(); n + 1];
    for l in sys.lines() {
        due[l.max_var().map_or(0, |x| x as usize + 1)].push(l);
    }
    go(&due, &mut Vec::new(), n)
}

/// Instances with left degree exactly `k`.
pub fn fphp_with_k(
    k: usize,
    pigeons: std::ops::RangeInclusive<usize>,
    holes: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = FphpInstance> {
    (pigeons, holes).prop_filter("k <= holes", move |(_, h)| k <= *h).prop_flat_map(move |(p, h)| {
        prop::collection::vec(Just((0..h as u32).collect::<Vec<u32>>()).prop_shuffle(), p)
            .prop_map(move |rows| FphpInstance::new(h, k, rows.into_iter().map(|r| r[..k].to_vec()).collect()).unwrap())
    })
}

use polycol::algebra::{Cap, FieldSpec, Monomial, Polynomial};
use polycol::encodings::{boolean_axiom, encode_colouring01, encode_colouring01_over, encode_fphp, AxiomTag, PolySystem};

/// Random multilinear system over GF(2) or GF(3) on at most `max_vars`
/// variables, with Boolean axioms.
pub fn random_system(max_vars: usize) -> impl Strategy<Value = PolySystem> {
    let term = (any::<u8>(), 1u8..=2);
    (1..=max_vars, any::<bool>(), prop::collection::vec(prop::collection::vec(term, 1..=3), 1..=5)).prop_map(|(n, gf3, polys)| {
        let f = FieldSpec::prime(if gf3 { 3 } else { 2 }).unwrap();
        let mut sys = PolySystem {
            field: f.clone(),
            cap: Cap::Boolean,
            axioms: Vec::new(),
            var_names: (0..n).map(|v| format!("z_{v}")).collect(),
        };
        for terms in polys {
            let p = Polynomial::from_terms(
                &f,
                Cap::Boolean,
                terms.into_iter().map(|(mask, c)| {
                    // At most two variables per term keeps degrees low.
                    let vars = (0..n as u32).filter(|v| mask >> v & 1 == 1).take(2);
                    (Monomial::from_vars(vars), f.from_i64(c as i64))
                }),
            );
            if !p.is_zero() {
                sys.push(p, AxiomTag::Assumption);
            }
        }
        for v in 0..n as u32 {
            sys.push(boolean_axiom(&f, v), AxiomTag::Boolean);
        }
        sys
    })
}

/// Small unsatisfiable systems with known structure.
pub fn unsat_corpus() -> Vec<(&'static str, PolySystem)> {
    let gf3 = FieldSpec::prime(3).unwrap();
    vec![
        ("K3 k=2", encode_colouring01(&Graph::complete(3), 2)),
        ("C5 k=2", encode_colouring01(&Graph::cycle(5), 2)),
        ("C3 k=2 over GF(3)", encode_colouring01_over(&Graph::cycle(3), 2, &gf3)),
        ("K4 k=3", encode_colouring01(&Graph::complete(4), 3)),
        ("FPHP 3->2", encode_fphp(&FphpInstance::complete(3, 2), &FieldSpec::prime(2).unwrap())),
        ("FPHP 3->2 over GF(3)", encode_fphp(&FphpInstance::complete(3, 2), &gf3)),
    ]
}

use num_bigint::BigInt;
use polycol::cutplanes::{with_assignment, CpJust, CpProof};
use polycol::pcsearch::{PcJust, PcProof};

/// A refutation of `with_assignment(base, rho)` built from one inequality
/// that the full assignment `rho` violates, with unrelated valid lines
/// mixed in.
#[derive(Clone, Debug)]
pub struct CpCase {
    pub base: CpSystem,
    pub rho: Vec<(u32, bool)>,
    pub proof: CpProof,
}

impl CpCase {
    pub fn system(&self) -> CpSystem {
        with_assignment(&self.base, &self.rho)
    }
}

type RawLine = (Vec<i8>, i8);

#[allow(clippy::too_many_arguments)]
fn build_cp_case(
    n: usize,
    lines: Vec<RawLine>,
    bits: u32,
    violated: Vec<i8>,
    extra: i64,
    pos: usize,
    order: Vec<u32>,
    via_axiom: u32,
    noise: Vec<(u8, usize, usize, u8)>,
) -> CpCase {
    let alpha = |x: u32| bits >> x & 1 == 1;
    let mk =
        |c: &[i8], b: i64| CpLine::from_i64(&c.iter().enumerate().map(|(x, &a)| (x as u32, a as i64)).collect::<Vec<_>>(), b);
    let lhs: i64 = violated.iter().enumerate().filter(|(x, _)| alpha(*x as u32)).map(|(_, &a)| a as i64).sum();
    let mut ineqs: Vec<CpLine> = lines.iter().map(|(c, b)| mk(c, *b as i64)).collect();
    let vi = pos % (ineqs.len() + 1);
    ineqs.insert(vi, mk(&violated, lhs + 1 + extra));
    let base =
        CpSystem { inequalities: ineqs.into_iter().map(|l| (l, polycol::encodings::AxiomTag::Assumption)).collect(), n_vars: n };
    let rho: Vec<(u32, bool)> = order.iter().map(|&x| (x, alpha(x))).collect();
    let sys = with_assignment(&base, &rho);
    let slot = |x: u32| base.inequalities.len() + 2 * order.iter().position(|&y| y == x).unwrap();

    let mut p = CpProof::new();
    let init = |p: &mut CpProof, i: usize| p.derive(CpJust::Initial(i), Some(&sys.inequalities[i].0));
    for (kind, a, b, c) in noise {
        let len = p.len();
        match kind % 5 {
            0 if len > 0 => {
                p.sum(a % len, b % len);
            }
            1 if len > 0 => {
                p.scalar(a % len, c % 4);
            }
            2 if len > 0 => {
                // Pad every coefficient up to a multiple of c with x >= 0, then divide.
                let c = 2 + (c % 3) as i64;
                let mut acc = a % len;
                let coeffs: Vec<(u32, BigInt)> = p.line(acc).coeffs().to_vec();
                for (x, v) in coeffs {
                    let r = ((v % c) + c) % c;
                    if r != BigInt::from(0) {
                        let ax = p.var_lower(x);
                        let s = p.scalar(ax, c - r);
                        acc = p.sum(acc, s);
                    }
                }
                p.div(acc, c);
            }
            4 => {
                let x = (a % n) as u32;
                if b % 2 == 0 {
                    p.var_lower(x)
                } else {
                    p.var_upper(x)
                };
            }
            _ => {
                init(&mut p, a % sys.inequalities.len());
            }
        }
    }

    // Cancel each variable of the violated line with the assignment.
    let mut parts = vec![init(&mut p, vi)];
    for (x, &a) in violated.iter().enumerate() {
        let x = x as u32;
        if a == 0 {
            continue;
        }
        let axiom = via_axiom >> x & 1 == 1;
        // Positive a needs x's upper bound (alpha = 1) or the assumption
        // -x >= 0 (alpha = 0); negative a the assumption x >= 1 or x >= 0.
        let line = match (alpha(x), a > 0) {
            (true, true) | (false, false) if axiom => {
                if a > 0 {
                    p.var_upper(x)
                } else {
                    p.var_lower(x)
                }
            }
            (true, true) | (false, false) => init(&mut p, slot(x) + 1),
            _ => init(&mut p, slot(x)),
        };
        parts.push(p.scalar(line, a.unsigned_abs() as i64));
    }
    let total = p.sum_all(&parts);
    let g = p.line(total).bound().clone();
    assert!(p.line(total).coeffs().is_empty() && g >= BigInt::from(1));
    if g != BigInt::from(1) {
        p.div(total, g);
    }
    CpCase { base, rho, proof: p }
}

pub fn cp_case() -> impl Strategy<Value = CpCase> {
    (1usize..=6).prop_flat_map(|n| {
        let line = (prop::collection::vec(-3i8..=3, n), -3i8..=3);
        (
            prop::collection::vec(line, 0..=4),
            any::<u32>(),
            prop::collection::vec(-3i8..=3, n),
            0i64..=3,
            any::<usize>(),
            Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle(),
            any::<u32>(),
            prop::collection::vec((any::<u8>(), any::<usize>(), any::<usize>(), any::<u8>()), 0..=8),
        )
            .prop_map(move |(lines, bits, violated, extra, pos, order, via, noise)| {
                build_cp_case(n, lines, bits, violated, extra, pos, order, via, noise)
            })
    })
}

/// Every single-line corruption of each line: a changed bound, a changed
/// coefficient, a forward premise, an unknown initial index, and a negative
/// or zero factor where the rule takes one.
pub fn cp_mutants(proof: &CpProof, sys: &CpSystem) -> Vec<CpProof> {
    let mut out = Vec::new();
    for t in 0..proof.len() {
        let step = &proof.steps[t];
        let mut with = |line: CpLine, just: CpJust| {
            let mut m = proof.clone();
            m.steps[t].line = line;
            m.steps[t].just = just;
            out.push(m);
        };
        let l = &step.line;
        for d in [-1i64, 1] {
            with(CpLine::new(l.coeffs().to_vec(), l.bound() + d), step.just.clone());
        }
        let x = l.coeffs().first().map_or(0, |(x, _)| *x);
        with(CpLine::new(l.coeffs().iter().cloned().chain([(x, BigInt::from(1))]), l.bound().clone()), step.just.clone());
        match &step.just {
            CpJust::Sum(_, j) => with(l.clone(), CpJust::Sum(t, *j)),
            CpJust::Scalar(i, c) => {
                with(l.clone(), CpJust::Scalar(t, c.clone()));
                with(l.clone(), CpJust::Scalar(*i, if *c == BigInt::from(0) { BigInt::from(-1) } else { -c }));
            }
            CpJust::Div(i, c) => {
                with(l.clone(), CpJust::Div(t, c.clone()));
                with(l.clone(), CpJust::Div(*i, BigInt::from(0)));
                with(l.clone(), CpJust::Div(*i, -c));
            }
            CpJust::Initial(_) => with(l.clone(), CpJust::Initial(sys.inequalities.len())),
            _ => {}
        }
    }
    out
}

/// Single-line corruptions of a PC proof: an extra term, a wrong degree, a
/// forward premise, and an unknown axiom index.
pub fn pc_mutants(proof: &PcProof, sys: &PolySystem) -> Vec<PcProof> {
    let f = &proof.field;
    let mut out = Vec::new();
    for t in 0..proof.len() {
        let line = &proof.lines[t];
        let mut m = proof.clone();
        let extra = Polynomial::monomial(f, proof.cap, Monomial::var(0), f.one());
        m.lines[t].poly = line.poly.add(&extra).unwrap();
        out.push(m);
        let mut m = proof.clone();
        m.lines[t].degree += 1;
        out.push(m);
        let just = match &line.just {
            PcJust::LinComb(_, j, a, b) => Some(PcJust::LinComb(t, *j, *a, *b)),
            PcJust::Mul(_, x) => Some(PcJust::Mul(t, *x)),
            PcJust::InitialAxiom(_) => Some(PcJust::InitialAxiom(sys.axioms.len())),
            PcJust::BooleanAxiom(_) => None,
        };
        if let Some(just) = just {
            let mut m = proof.clone();
            m.lines[t].just = just;
            out.push(m);
        }
    }
    out
}

/// Branch on vertices in order, closing a branch once two assumed colours
/// clash on an edge or a vertex.
pub fn compose_by_conflicts(sys: &CpSystem, n: usize, k: usize) -> (CpProof, Vec<polycol::cutplanes::ComposeNode>) {
    let pairs = polycol::cutplanes::pair_index(sys);
    let mut leaves = std::collections::BTreeMap::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(key) = stack.pop() {
        let facts: Vec<(u32, usize)> = key
            .iter()
            .enumerate()
            .map(|(j, &c)| (polycol::encodings::colour_var(j, c, k), sys.inequalities.len() + 2 * j))
            .collect();
        if let Some(leaf) = polycol::cutplanes::conflict_leaf(&pairs, &facts) {
            leaves.insert(key, leaf);
        } else {
            assert!(key.len() < n, "a full colouring without a clash");
            for c in 0..k {
                let mut next = key.clone();
                next.push(c);
                stack.push(next);
            }
        }
    }
    let vertices: Vec<u32> = (0..n as u32).collect();
    polycol::cutplanes::cp_branch_compose(sys, k, &vertices, &leaves).unwrap()
}
