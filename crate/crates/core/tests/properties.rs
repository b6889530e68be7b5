use std::collections::BTreeSet;

use greenhom_core::algebra::{hom_dimension, BoundQuiver, Representation};
use greenhom_core::linalg::QMatrix;
use greenhom_core::quiver::{IceQuiver, Quiver};
use proptest::prelude::*;

/// `(n, frozen flags, arrows)`: at most one direction per pair, multiplicity
/// at most 2, no arrows between frozen vertices.
fn ice_quiver() -> impl Strategy<Value = IceQuiver> {
    (1usize..=6).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            Just(n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(-2i32..=2, pairs),
        )
            .prop_map(|(n, frozen, mult)| {
                let mut arrows = Vec::new();
                let mut k = 0;
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        let m = mult[k];
                        k += 1;
                        if frozen[i - 1] && frozen[j - 1] {
                            continue;
                        }
                        match m.signum() {
                            1 => arrows.push((i, j, m as u32)),
                            -1 => arrows.push((j, i, (-m) as u32)),
                            _ => {}
                        }
                    }
                }
                let frozen: BTreeSet<usize> = (1..=n).filter(|&v| frozen[v - 1]).collect();
                IceQuiver::new(n, &frozen, &arrows).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn mutation_is_an_involution(q in ice_quiver(), pick in any::<prop::sample::Index>()) {
        let mutable = q.mutable_vertices();
        prop_assume!(!mutable.is_empty());
        let l = mutable[pick.index(mutable.len())];
        let once = q.mutate(l).unwrap();
        prop_assert!(once.exchange_matrix().mutable_block_is_antisymmetric());
        prop_assert_eq!(once.mutate(l).unwrap(), q);
    }

    #[test]
    fn framed_mutation_is_an_involution(q in ice_quiver(), seq in prop::collection::vec(1usize..=6, 0..6)) {
        let plain: Vec<(usize, usize)> = q
            .arrows()
            .into_iter()
            .flat_map(|(s, t, m)| std::iter::repeat_n((s, t), m as usize))
            .collect();
        let n = q.vertex_count();
        let Ok(base) = Quiver::from_pairs(n, &plain) else { return Ok(()) };
        let framed = IceQuiver::framed(&base);
        let seq: Vec<usize> = seq.into_iter().filter(|&v| v <= n).collect();
        let state = framed.mutate_sequence(&seq).unwrap();
        let back: Vec<usize> = seq.iter().rev().copied().collect();
        prop_assert_eq!(state.mutate_sequence(&back).unwrap(), framed);
    }
}

fn quiver3() -> Quiver {
    Quiver::from_pairs(3, &[(1, 2), (2, 3), (1, 3)]).unwrap()
}

fn rep(dims: &[usize], entries: &[i64]) -> Representation {
    let q = quiver3();
    let mut k = 0;
    let mats = q
        .arrows()
        .iter()
        .map(|a| {
            let (r, c) = (dims[a.source - 1], dims[a.target - 1]);
            let m = QMatrix::from_i64(r, c, &entries[k..k + r * c]);
            k += r * c;
            m
        })
        .collect();
    Representation::new(&q, dims.to_vec(), mats).unwrap()
}

fn representation() -> impl Strategy<Value = Representation> {
    prop::collection::vec(0usize..=2, 3).prop_flat_map(|dims| {
        (Just(dims), prop::collection::vec(-2i64..=2, 12)).prop_map(|(d, e)| rep(&d, &e))
    })
}

fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-2i64..=2, n * n)
        .prop_map(move |e| QMatrix::from_i64(n, n, &e))
        .prop_filter("singular", |m| m.is_invertible())
}

fn base_change(dims: Vec<usize>) -> impl Strategy<Value = Vec<QMatrix>> {
    dims.into_iter().map(invertible).collect::<Vec<_>>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hom_dimension_is_invariant_under_base_change(
        (m, gs) in representation().prop_flat_map(|m| {
            let d = m.dims().to_vec();
            (Just(m), base_change(d))
        }),
        n in representation(),
    ) {
        let q = quiver3();
        let bq = BoundQuiver::free(q.clone());
        let m2 = m.change_basis(&q, &gs).unwrap();
        prop_assert_eq!(hom_dimension(&m, &n, &bq).unwrap(), hom_dimension(&m2, &n, &bq).unwrap());
        prop_assert_eq!(hom_dimension(&n, &m, &bq).unwrap(), hom_dimension(&n, &m2, &bq).unwrap());
        prop_assert_eq!(hom_dimension(&m, &m2, &bq).unwrap(), hom_dimension(&m, &m, &bq).unwrap());
    }

    #[test]
    fn hom_is_additive(a in representation(), b in representation(), c in representation()) {
        let bq = BoundQuiver::free(quiver3());
        let h = |x: &Representation, y: &Representation| hom_dimension(x, y, &bq).unwrap();
        let ab = a.direct_sum(&b);
        prop_assert_eq!(h(&ab, &c), h(&a, &c) + h(&b, &c));
        prop_assert_eq!(h(&c, &ab), h(&c, &a) + h(&c, &b));
    }
}
