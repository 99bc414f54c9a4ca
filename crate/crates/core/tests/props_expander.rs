mod common;

use proptest::prelude::*;

use common::{fphp_with_k, graph_from_bits};
use polycol::expander::{boundary, check_boundary_expansion, double_and_delete, Fraction};

/// Expansion by enumerating every pigeon subset as a bitmask.
fn expands_by_bitmask(b: &polycol::encodings::FphpInstance, alpha: Fraction, delta: Fraction) -> bool {
    let n = b.n_pigeons();
    let max = alpha.floor_times(n);
    (1u32..1 << n).filter(|m| m.count_ones() as usize <= max).all(|m| {
        let mut count = vec![0; b.n_holes()];
        for i in (0..n).filter(|i| m >> i & 1 == 1) {
            for &h in b.neighbours(i) {
                count[h as usize] += 1;
            }
        }
        let bd = count.iter().filter(|&&c| c == 1).count() as u64;
        delta.den * bd + delta.den >= delta.num * m.count_ones() as u64
    })
}

fn fractions() -> impl Strategy<Value = (Fraction, Fraction)> {
    (1u64..=3, 1u64..=4, 1u64..=5, 1u64..=3).prop_map(|(an, ad, dn, dd)| (Fraction::new(an.min(ad), ad), Fraction::new(dn, dd)))
}

proptest! {
    #[test]
    fn boundary_bounds(b in fphp_with_k(3, 1..=8, 3..=9), mask in any::<u16>()) {
        let s: Vec<usize> = (0..b.n_pigeons()).filter(|&i| mask >> i & 1 == 1).collect();
        let bd = boundary(&b, &s);
        for h in &bd {
            prop_assert!(s.iter().any(|&i| b.neighbours(i).contains(h)));
        }
        prop_assert!(bd.len() <= s.len() * b.k());
    }

    #[test]
    fn checker_matches_bitmask(b in (2usize..=4).prop_flat_map(|k| fphp_with_k(k, 1..=12, k..=14)), (alpha, delta) in fractions()) {
        let r = check_boundary_expansion(&b, alpha, delta).unwrap();
        prop_assert_eq!(r.holds, expands_by_bitmask(&b, alpha, delta));
        if !r.holds {
            prop_assert_eq!(boundary(&b, &r.witness).len(), r.witness_boundary);
            prop_assert!(delta.den * (r.witness_boundary as u64 + 1) < delta.num * r.witness.len() as u64);
        }
    }

    #[test]
    fn double_and_delete_is_left_regular(n in 2usize..=8, bits in any::<u64>(), u_hat in 0u32..8, k in 2usize..=4) {
        let h = graph_from_bits(n, bits);
        let u_hat = u_hat % n as u32;
        match double_and_delete(&h, u_hat, k) {
            Err(_) => prop_assert!(h.max_degree() > k),
            Ok(b) => {
                prop_assert_eq!(b.n_pigeons(), n);
                for i in 0..n {
                    let row = b.neighbours(i);
                    prop_assert_eq!(row.len(), k);
                    let mut sorted = row.to_vec();
                    sorted.sort_unstable();
                    sorted.dedup();
                    prop_assert_eq!(sorted.len(), k, "multi-edge in row {}", i);
                }
            }
        }
    }
}
