mod common;

use proptest::prelude::*;

use common::{fphp_by_enumeration, fphp_with_k};
use polycol::algebra::FieldSpec;
use polycol::cutplanes::{cp_check, cp_refute_reduction};
use polycol::encodings::{encode_colouring_cp, FphpInstance};
use polycol::oracle::{brute_colour, brute_colour_precoloured, check_claim_gadget, Budget};
use polycol::reduction::{build_gadget, build_hat_g, build_reduction, pc_substitution_map};

/// Completions of the gadget with the pigeons coloured `(b, b2)`, found by
/// enumerating every colouring of the internal vertices.
fn gadget_extends(k: usize, colours: (usize, usize), b: usize, b2: usize) -> bool {
    let mut fresh = 2;
    let g = build_gadget((0, 1), (0, 1), colours, k, &mut fresh).unwrap();
    let internal = g.internal_vertices();
    let n = fresh as usize;
    let mut col = vec![usize::MAX; n];
    col[0] = b;
    col[1] = b2;
    let free: Vec<u32> = internal.iter().copied().filter(|&v| v != g.precoloured.0 && v != g.precoloured.1).collect();
    col[g.precoloured.0 as usize] = colours.0;
    col[g.precoloured.1 as usize] = colours.1;
    let total = (k as u64).pow(free.len() as u32);
    (0..total).any(|mut code| {
        for &v in &free {
            col[v as usize] = (code % k as u64) as usize;
            code /= k as u64;
        }
        g.edges.iter().all(|&(u, v)| col[u as usize] != col[v as usize])
    })
}

#[test]
fn gadget_claim_exhaustive() {
    for k in [3, 4] {
        for c in 0..k {
            for c2 in 0..k {
                for b in 0..k {
                    for b2 in 0..k {
                        assert_eq!(gadget_extends(k, (c, c2), b, b2), (b, b2) != (c, c2), "k={k} c=({c},{c2}) b=({b},{b2})");
                    }
                }
                let mut fresh = 2;
                let g = build_gadget((0, 1), (0, 1), (c, c2), k, &mut fresh).unwrap();
                assert!(check_claim_gadget(&g, Budget::default()).unwrap());
            }
        }
    }
}

/// Relabels every pigeon's edge enumeration by `sigma`.
fn permute_edges(b: &FphpInstance, sigma: &[usize]) -> FphpInstance {
    let rows = (0..b.n_pigeons()).map(|i| sigma.iter().map(|&s| b.neighbours(i)[s]).collect()).collect();
    FphpInstance::new(b.n_holes(), b.k(), rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hat_g_extends_iff_fphp(b in fphp_with_k(3, 2..=3, 3..=5)) {
        let hat = build_hat_g(&b).unwrap();
        let v = brute_colour_precoloured(&hat.graph, 3, &hat.precolouring, Budget::default()).unwrap();
        prop_assert_eq!(v.satisfiable, fphp_by_enumeration(&b));
    }

    #[test]
    fn reduction_colourable_iff_fphp(b in fphp_with_k(3, 2..=3, 3..=5)) {
        let out = build_reduction(&b).unwrap();
        let v = brute_colour(&out.graph, 3, Budget::default()).unwrap();
        prop_assert_eq!(v.satisfiable, fphp_by_enumeration(&b));
    }

    #[test]
    fn substitution_images_have_degree_at_most_two(b in fphp_with_k(3, 2..=4, 3..=5)) {
        let out = build_reduction(&b).unwrap();
        let map = pc_substitution_map(&out, &FieldSpec::prime(2).unwrap()).unwrap();
        prop_assert_eq!(map.len(), out.graph.n_vertices() * 3);
        for img in map.values() {
            prop_assert!(img.degree() <= 2);
        }
    }

    /// Permuting colours in every edge enumeration keeps the size of the
    /// graph and the answer. The graphs need not be isomorphic, nor share a
    /// degree sequence: chain slots sit at colour-dependent positions.
    #[test]
    fn colour_permutation(b in fphp_with_k(3, 2..=4, 3..=5), sigma in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let bs = permute_edges(&b, &sigma);
        let (g, gs) = (build_reduction(&b).unwrap().graph, build_reduction(&bs).unwrap().graph);
        prop_assert_eq!(g.n_vertices(), gs.n_vertices());
        prop_assert_eq!(g.n_edges(), gs.n_edges());
        if b.n_pigeons() <= 3 {
            let (h, hs) = (build_hat_g(&b).unwrap(), build_hat_g(&bs).unwrap());
            let ext = |h: &polycol::reduction::PrecolouredGraph| {
                brute_colour_precoloured(&h.graph, 3, &h.precolouring, Budget::default()).unwrap().satisfiable
            };
            prop_assert_eq!(ext(&h), ext(&hs));
        }
    }
}

/// The smallest unsatisfiable case is out of reach for the backtracking
/// colourer, so non-colourability is certified by a checked CP refutation.
#[test]
fn k43_is_not_colourable() {
    let out = build_reduction(&FphpInstance::complete(4, 3)).unwrap();
    let r = cp_refute_reduction(&out).unwrap();
    assert!(cp_check(&r.proof, &encode_colouring_cp(&out.graph, 3)).refutation);
}

/// Every left-regular instance on at most 3 pigeons and 3 holes.
#[test]
fn reduction_exhaustive_three_holes() {
    let perms: Vec<Vec<u32>> = vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0]];
    let mut checked = 0;
    for p in 1..=3u32 {
        for code in 0..6usize.pow(p) {
            let rows = (0..p).map(|i| perms[code / 6usize.pow(i) % 6].clone()).collect();
            let b = FphpInstance::new(3, 3, rows).unwrap();
            let out = build_reduction(&b).unwrap();
            let col = brute_colour(&out.graph, 3, Budget::default()).unwrap().satisfiable;
            assert_eq!(col, fphp_by_enumeration(&b), "{b:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 6 + 36 + 216);
}
