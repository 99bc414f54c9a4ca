mod common;

use proptest::prelude::*;

use common::{fphp_with_k, small_graph};
use polycol::algebra::{field_with_kth_root, Cap, FieldElement, FieldSpec};
use polycol::encodings::{encode_colouring01_over, encode_fphp, AxiomTag};
use polycol::pcsearch::{compose_lemma34, derive_substituted_axioms_prop21, pc_check, PcProof};
use polycol::reduction::{build_reduction, pc_substitution_map};

fn roots_field(k: usize) -> FieldSpec {
    field_with_kth_root(if k == 3 { 2 } else { 5 }, k as u32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn substituted_roots_axioms_are_derivable(g in small_graph(5), k in 3usize..=4) {
        let f = roots_field(k);
        let sys01 = encode_colouring01_over(&g, k, &f);
        let ds = derive_substituted_axioms_prop21(&g, k, &f).unwrap();
        prop_assert_eq!(ds.len(), g.n_vertices() + g.n_edges());
        for d in &ds {
            let r = pc_check(&d.proof, &sys01);
            prop_assert!(r.valid, "{:?}", r.failure);
            prop_assert!(r.degree <= 2 * k as i64);
            prop_assert_eq!(d.proof.last(), Some(&d.target));
        }
    }

    /// Random derivations from the colouring axioms of `G(B)` transfer to
    /// derivations of their images from the FPHP axioms, at most doubling
    /// the degree.
    #[test]
    fn derivations_transfer_through_the_reduction(
        b in fphp_with_k(3, 2..=3, 3..=4),
        ops in prop::collection::vec((0u8..3, any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<u32>()), 1..12),
    ) {
        let f = FieldSpec::prime(2).unwrap();
        let out = build_reduction(&b).unwrap();
        let col = encode_colouring01_over(&out.graph, 3, &f);
        let fphp = encode_fphp(&b, &f);
        let axioms: Vec<usize> = (0..col.axioms.len()).filter(|&i| col.axioms[i].tag != AxiomTag::Boolean).collect();
        let mut proof = PcProof::new(&f, Cap::Boolean);
        proof.axiom(&col, axioms[ops[0].1.index(axioms.len())]);
        for &(op, i, j, x) in &ops {
            let n = proof.len();
            match op {
                0 => { proof.axiom(&col, axioms[i.index(axioms.len())]); }
                1 => { proof.lin_comb(i.index(n), j.index(n), FieldElement::ONE, FieldElement::ONE); }
                _ => {
                    if proof.poly(i.index(n)).degree() < 3 {
                        proof.mul(i.index(n), x % col.n_vars() as u32);
                    }
                }
            }
        }
        let d = proof.degree();
        let composite = compose_lemma34(&proof, &out, &f).unwrap();
        let r = pc_check(&composite, &fphp);
        prop_assert!(r.valid, "{:?}", r.failure);
        prop_assert!(r.degree <= 2 * d.max(2), "degree {} from {}", r.degree, d);
        let images = pc_substitution_map(&out, &f).unwrap();
        let last = proof.last().unwrap().substitute(&images, Cap::Boolean).unwrap();
        prop_assert_eq!(composite.last(), Some(&last));
    }
}
