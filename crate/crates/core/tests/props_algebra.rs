use std::collections::HashMap;

use proptest::prelude::*;

use polycol::algebra::{
    field_with_kth_root, poly_add, poly_evaluate, poly_mul_reduce, Cap, FieldElement, FieldSpec, Monomial, Polynomial,
};

const N_VARS: u32 = 4;

fn fields() -> Vec<FieldSpec> {
    vec![
        FieldSpec::prime(2).unwrap(),
        FieldSpec::prime(7).unwrap(),
        FieldSpec::extension(2, 2).unwrap(),
        FieldSpec::extension(3, 2).unwrap(),
    ]
}

/// Raw terms: exponent per variable and a coefficient index into the field.
type RawTerms = Vec<(Vec<u32>, usize)>;

fn raw_terms() -> impl Strategy<Value = RawTerms> {
    prop::collection::vec((prop::collection::vec(0u32..4, N_VARS as usize), 0usize..64), 0..6)
}

fn build(f: &FieldSpec, cap: Cap, raw: &RawTerms) -> Polynomial {
    let elems: Vec<FieldElement> = f.elements().collect();
    Polynomial::from_terms(
        f,
        cap,
        raw.iter().map(|(exps, c)| {
            (Monomial::from_pairs(exps.iter().enumerate().map(|(v, &e)| (v as u32, e))), elems[c % elems.len()])
        }),
    )
}

fn point(vals: &[FieldElement]) -> HashMap<u32, FieldElement> {
    vals.iter().enumerate().map(|(v, &x)| (v as u32, x)).collect()
}

proptest! {
    #[test]
    fn distributive_after_reduction(fi in 0usize..4, roots in any::<bool>(), a in raw_terms(), b in raw_terms(), c in raw_terms()) {
        let f = &fields()[fi];
        let cap = if roots { Cap::Roots(3) } else { Cap::Boolean };
        let (a, b, c) = (build(f, cap, &a), build(f, cap, &b), build(f, cap, &c));
        let lhs = poly_mul_reduce(&a, &poly_add(&b, &c).unwrap()).unwrap();
        let rhs = poly_add(&poly_mul_reduce(&a, &b).unwrap(), &poly_mul_reduce(&a, &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn boolean_reduction_sound_on_01_points(fi in 0usize..4, p in raw_terms(), bits in 0u32..16) {
        let f = &fields()[fi];
        let p = build(f, Cap::Boolean, &p);
        let vals: Vec<FieldElement> = (0..N_VARS).map(|v| if bits >> v & 1 == 1 { f.one() } else { f.zero() }).collect();
        let a = point(&vals);
        prop_assert_eq!(poly_evaluate(&p.reduced(), &a).unwrap(), poly_evaluate(&p, &a).unwrap());
    }

    #[test]
    fn roots_reduction_sound_on_root_points(
        case in prop_oneof![Just((2u64, 3u32)), Just((7, 3)), Just((5, 4)), Just((3, 4))],
        p in raw_terms(),
        powers in prop::collection::vec(0u64..8, N_VARS as usize),
    ) {
        let (q, k) = case;
        let f = field_with_kth_root(q, k).unwrap();
        let (w, _) = f.kth_root().unwrap();
        let p = build(&f, Cap::Roots(k), &p);
        let vals: Vec<FieldElement> = powers.iter().map(|&e| f.pow(w, e)).collect();
        let a = point(&vals);
        prop_assert_eq!(poly_evaluate(&p.reduced(), &a).unwrap(), poly_evaluate(&p, &a).unwrap());
    }
}

#[test]
fn kth_roots_are_primitive() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        for k in 2u32..=7 {
            if (k as u64).is_multiple_of(p) {
                assert!(field_with_kth_root(p, k).is_err(), "p={p} k={k}");
                continue;
            }
            let f = field_with_kth_root(p, k).unwrap();
            let (w, kk) = f.kth_root().unwrap();
            assert_eq!(kk, k);
            assert_eq!(f.pow(w, k as u64), f.one());
            let mut powers: Vec<u64> = (0..k as u64).map(|j| f.pow(w, j).packed()).collect();
            powers.sort_unstable();
            powers.dedup();
            assert_eq!(powers.len(), k as usize, "p={p} k={k}");
        }
    }
}
