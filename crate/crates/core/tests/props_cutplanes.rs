mod common;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use common::{
    colourable_by_enumeration, compose_by_conflicts, cp_case, cp_mutants, cp_satisfiable, fphp_by_enumeration, small_fphp,
    small_graph,
};
use polycol::cutplanes::{
    cp_check, cp_proof_from_jsonl, cp_proof_to_jsonl, cp_refute_php, cp_restrict, cp_weaken, restrict_system, with_assignment,
    CpJust, CpLine, CpProof, WEAKEN_FACTOR,
};
use polycol::encodings::{encode_colouring_cp, encode_fphp_cp, CpSystem};

fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

/// All 0/1 points of `n` variables satisfying every inequality.
fn models(sys: &CpSystem) -> Vec<u32> {
    (0u32..1 << sys.n_vars).filter(|bits| sys.lines().all(|l| l.satisfied_by(|x| bits >> x & 1 == 1))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Lifting over the last assumption gives a valid derivation from the
    /// rest of `K tau >= 1`, within the length factor.
    #[test]
    fn weaken_is_valid_and_short(case in cp_case()) {
        let sys = case.system();
        let r = cp_check(&case.proof, &sys);
        prop_assert!(r.refutation, "{:?}", r.failure);

        let (&(x, b), prefix) = case.rho.split_last().unwrap();
        let base = with_assignment(&case.base, prefix);
        let (w, k) = cp_weaken(&case.proof, &base, x, b).unwrap();
        let rw = cp_check(&w, &base);
        prop_assert!(rw.valid, "{:?}", rw.failure);
        prop_assert!(w.len() <= WEAKEN_FACTOR * case.proof.len());

        let tau = if b { CpLine::var_upper(x) } else { CpLine::var_lower(x) };
        prop_assert_eq!(w.last_line().unwrap(), &CpLine::falsum().add(&tau.scale(&k)));
        if k == BigInt::from(0) {
            prop_assert!(rw.refutation);
        }
    }

    /// Restriction keeps refutations refutations, line for line.
    #[test]
    fn restrict_keeps_refutations(case in cp_case(), mask in any::<u32>(), vals in any::<u32>()) {
        let sys = case.system();
        let rho: HashMap<u32, bool> =
            (0..sys.n_vars as u32).filter(|x| mask >> x & 1 == 1).map(|x| (x, vals >> x & 1 == 1)).collect();
        let r = cp_restrict(&case.proof, &sys, &rho);
        let rc = cp_check(&r, &restrict_system(&sys, &rho));
        prop_assert!(rc.refutation, "{:?}", rc.failure);
        prop_assert!(r.len() <= case.proof.len());
    }

    #[test]
    fn mutations_are_rejected(case in cp_case()) {
        let sys = case.system();
        for m in cp_mutants(&case.proof, &sys) {
            prop_assert!(!cp_check(&m, &sys).valid);
        }
    }

    #[test]
    fn jsonl_round_trip(case in cp_case()) {
        let text = cp_proof_to_jsonl(&case.proof);
        prop_assert_eq!(cp_proof_from_jsonl(&text).unwrap(), case.proof);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Every derived line holds at every 0/1 model of the premises.
    #[test]
    fn rules_are_sound(
        n in 1usize..=5,
        lines in prop::collection::vec((prop::collection::vec(-4i64..=4, 5), -4i64..=4), 1..=4),
        ops in prop::collection::vec((0u8..5, any::<usize>(), any::<usize>(), 1i64..=4), 1..=24),
    ) {
        let sys = CpSystem {
            inequalities: lines
                .iter()
                .map(|(c, b)| {
                    let coeffs: Vec<(u32, i64)> = c[..n].iter().enumerate().map(|(x, &a)| (x as u32, a)).collect();
                    (CpLine::from_i64(&coeffs, *b), polycol::encodings::AxiomTag::Assumption)
                })
                .collect(),
            n_vars: n,
        };
        let pts = models(&sys);
        let mut p = CpProof::new();
        p.initial(&sys, 0);
        for (kind, a, b, c) in ops {
            let len = p.len();
            match kind {
                0 => { p.sum(a % len, b % len); }
                1 => { p.scalar(a % len, c); }
                2 => {
                    if p.line(a % len).divide(&big(c as i128)).is_some() {
                        p.div(a % len, c);
                    }
                }
                3 => { p.initial(&sys, a % sys.inequalities.len()); }
                _ => { if b % 2 == 0 { p.var_lower((a % n) as u32) } else { p.var_upper((a % n) as u32) }; }
            }
        }
        let report = cp_check(&p, &sys);
        prop_assert!(report.valid);
        for l in p.steps.iter().map(|s| &s.line) {
            for &bits in &pts {
                prop_assert!(l.satisfied_by(|x| bits >> x & 1 == 1), "{} fails at {:b}", l, bits);
            }
        }
        if report.refutation {
            prop_assert!(!cp_satisfiable(&sys));
        }
    }

    /// Division rounds the bound up, compared against exact rationals.
    #[test]
    fn division_rounds_up(
        quot in prop::collection::vec(any::<i64>(), 0..4),
        c in 1i128..=i64::MAX as i128,
        bound in any::<i128>(),
        off in 1i128..=1000,
    ) {
        let c = big(c);
        let line = CpLine::new(quot.iter().enumerate().map(|(x, &q)| (x as u32, big(q as i128) * &c)), big(bound));
        let d = line.divide(&c).unwrap();
        let expected = BigRational::new(big(bound), c.clone()).ceil().to_integer();
        prop_assert_eq!(d.bound(), &expected);
        for (x, q) in d.coeffs() {
            prop_assert_eq!(q, &big(quot[*x as usize] as i128));
        }
        prop_assert!(line.divide(&BigInt::from(0)).is_none());
        prop_assert!(line.divide(&-&c).is_none());
        if quot.iter().any(|&q| q != 0) && c > big(1) {
            // Adding a unit to one coefficient breaks divisibility.
            let x = quot.iter().position(|&q| q != 0).unwrap() as u32;
            let bumped = line.add(&CpLine::from_i64(&[(x, 1)], 0));
            prop_assert!(bumped.divide(&c).is_none());
        }
        // The checker agrees, and a bound off by any amount is rejected.
        let sys = CpSystem { inequalities: vec![(line.clone(), polycol::encodings::AxiomTag::Assumption)], n_vars: 4 };
        let mut p = CpProof::new();
        p.initial(&sys, 0);
        p.div(0, c.clone());
        prop_assert!(cp_check(&p, &sys).valid);
        p.steps[1].line = CpLine::new(d.coeffs().to_vec(), d.bound() - big(off));
        prop_assert!(!cp_check(&p, &sys).valid);
    }

    /// Refutations exist exactly for instances without a left matching, and
    /// each one checks against the inequalities.
    #[test]
    fn php_refutations_check(b in small_fphp(5, 4, 3)) {
        let sys = encode_fphp_cp(&b);
        match cp_refute_php(&b) {
            Ok(p) => {
                prop_assert!(!fphp_by_enumeration(&b));
                let r = cp_check(&p, &sys);
                prop_assert!(r.refutation, "{:?}", r.failure);
                prop_assert!(!cp_satisfiable(&sys));
                for m in cp_mutants(&p, &sys) {
                    prop_assert!(!cp_check(&m, &sys).valid);
                }
            }
            Err(_) => prop_assert!(fphp_by_enumeration(&b)),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Each composed node is the lifted children plus one division per
    /// branch, the vertex axiom and the sums.
    #[test]
    fn composition_follows_the_recurrence(g in small_graph(6), k in 2usize..=3) {
        prop_assume!(!colourable_by_enumeration(&g, k));
        let sys = encode_colouring_cp(&g, k);
        let (proof, nodes) = compose_by_conflicts(&sys, g.n_vertices(), k);
        let r = cp_check(&proof, &sys);
        prop_assert!(r.refutation, "{:?}", r.failure);
        for node in &nodes {
            prop_assert_eq!(node.length, node.lifted_lengths.iter().sum::<usize>() + 2 * k + 1);
            for (l, c) in node.lifted_lengths.iter().zip(&node.child_lengths) {
                prop_assert!(*l <= WEAKEN_FACTOR * c);
            }
            let max_child = *node.child_lengths.iter().max().unwrap();
            prop_assert!(node.length <= k * WEAKEN_FACTOR * max_child + 2 * k + 1);
        }
    }
}

#[test]
fn composition_refutes_k4() {
    let g = polycol::encodings::Graph::complete(4);
    let sys = encode_colouring_cp(&g, 3);
    let (proof, nodes) = compose_by_conflicts(&sys, 4, 3);
    assert!(cp_check(&proof, &sys).refutation);
    assert_eq!(nodes.last().unwrap().depth, 0);
    assert_eq!(nodes.last().unwrap().length, proof.len());
}

#[test]
fn checker_rejects_structural_errors() {
    let sys =
        CpSystem { inequalities: vec![(CpLine::from_i64(&[(0, 2)], 1), polycol::encodings::AxiomTag::Assumption)], n_vars: 1 };
    let mut p = CpProof::new();
    p.initial(&sys, 0);
    let u = p.var_upper(0);
    let s = p.scalar(u, 2);
    p.sum(0, s);
    // 2x >= 1 and -2x >= -2 sum to 0 >= -1: valid but not a refutation.
    let r = cp_check(&p, &sys);
    assert!(r.valid && !r.refutation);

    let mut bad = p.clone();
    bad.steps[2].just = CpJust::Scalar(1, big(-2));
    assert!(!cp_check(&bad, &sys).valid);

    assert!(cp_check(&CpProof::new(), &sys).valid);
    assert!(!cp_check(&CpProof::new(), &sys).refutation);
}
