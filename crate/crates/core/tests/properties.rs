//! Randomized structural properties of the decoders.

use bubblecode_core::bc::{add_ghost, bubble_cluster, peel, post_process, PeelPhase};
use bubblecode_core::reference::{greedy_decode, mwpm_decode};
use bubblecode_core::{BcConfig, BubbleDecoder, QubitSet, Side, Syndrome, SurfaceCode};
use proptest::prelude::*;

fn config_from(bits: u8) -> BcConfig {
    BcConfig {
        enable_radius_adjustment: bits & 1 != 0,
        enable_star_avoidance: bits & 2 != 0,
        enable_high_distance_rules: bits & 4 != 0,
    }
}

fn sites(code: &SurfaceCode, picks: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = picks.iter().map(|p| p % code.num_defect_sites()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Column parities recomputed from scratch over 1-based columns.
fn parities(code: &SurfaceCode, qubits: &QubitSet) -> Vec<u8> {
    (1..=code.d())
        .map(|k| (code.column(k).iter().filter(|&&q| qubits.contains(q)).count() % 2) as u8)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3_000))]

    #[test]
    fn corrections_clear_any_syndrome(
        d in 3usize..14,
        picks in proptest::collection::vec(0usize..10_000, 0..40),
        bits in 0u8..8,
        dual in any::<bool>(),
    ) {
        let code = SurfaceCode::new(d).unwrap();
        let side = if dual { Side::Dual } else { Side::Primal };
        let s = Syndrome::new(side, sites(&code, &picks));
        let mut bc = BubbleDecoder::new(code.clone(), config_from(bits));
        prop_assert_eq!(code.syndrome_of(&bc.decode(&s).unwrap(), side), s.clone());
        prop_assert_eq!(code.syndrome_of(&greedy_decode(&code, &s), side), s.clone());
        if s.len() <= 10 {
            prop_assert_eq!(code.syndrome_of(&mwpm_decode(&code, &s).unwrap(), side), s);
        }
    }

    #[test]
    fn clustering_is_a_forest(
        d in 3usize..14,
        picks in proptest::collection::vec(0usize..10_000, 1..40),
        radius in 1usize..6,
        star in any::<bool>(),
    ) {
        let code = SurfaceCode::new(d).unwrap();
        let v = sites(&code, &picks);
        let state = bubble_cluster(&code, &v, radius, star);
        prop_assert!(state.validate().is_ok(), "{:?}", state.validate());
        prop_assert_eq!(state.edges().count() + state.num_clusters(), v.len());
        // Each edge joins defects within the radius.
        for (a, b) in state.edges() {
            prop_assert!(code.eval_d(state.site(a), state.site(b)) <= radius);
        }
        // Defects in different clusters are farther apart than the radius.
        for a in 0..v.len() {
            for b in a + 1..v.len() {
                if state.cluster_of(a) != state.cluster_of(b) {
                    prop_assert!(code.eval_d(v[a], v[b]) > radius);
                }
            }
        }
    }

    #[test]
    fn peel_weights_match_qubit_sets(
        d in 3usize..12,
        picks in proptest::collection::vec(0usize..10_000, 1..20),
        radius in 1usize..5,
        star in any::<bool>(),
    ) {
        let code = SurfaceCode::new(d).unwrap();
        let v = sites(&code, &picks);
        let state = bubble_cluster(&code, &v, radius, star);
        for c in 0..state.num_clusters() {
            let g = add_ghost(&code, &state, c, PeelPhase::First, None).unwrap();
            let m1 = peel(&code, &state, c, &g).unwrap();
            prop_assert_eq!(m1.weight, m1.qubits.len());
            prop_assert_eq!(&m1.column_parity, &parities(&code, &m1.qubits));
            let defects: Vec<usize> = state.cluster(c).iter().map(|&p| state.site(p)).collect();
            prop_assert_eq!(code.syndrome_of(&m1.qubits, Side::Primal), Syndrome::new(Side::Primal, defects.clone()));
            let out = post_process(&code, &state, c, &g, m1).unwrap();
            prop_assert_eq!(out.chosen.weight, out.chosen.qubits.len());
            prop_assert_eq!(&out.chosen.column_parity, &parities(&code, &out.chosen.qubits));
            prop_assert_eq!(code.syndrome_of(&out.chosen.qubits, Side::Primal), Syndrome::new(Side::Primal, defects));
        }
    }

    #[test]
    fn dual_decoding_is_transposed_primal_decoding(
        d in 3usize..12,
        qubits in proptest::collection::vec(0usize..10_000, 0..12),
        bits in 0u8..8,
    ) {
        let code = SurfaceCode::new(d).unwrap();
        let e: QubitSet = qubits.iter().map(|q| q % code.num_qubits()).collect();
        let transposed: QubitSet = e.iter().map(|q| code.to_frame(Side::Dual, q)).collect();
        let mut bc = BubbleDecoder::new(code.clone(), config_from(bits));
        let c_dual = bc.decode(&code.syndrome_of(&e, Side::Dual)).unwrap();
        let c_primal = bc.decode(&code.syndrome_of(&transposed, Side::Primal)).unwrap();
        let mapped: QubitSet = c_dual.iter().map(|q| code.to_frame(Side::Dual, q)).collect();
        prop_assert_eq!(&mapped, &c_primal);
        prop_assert_eq!(
            code.is_logical_failure(&e.symmetric_difference(&c_dual), Side::Dual).unwrap(),
            code.is_logical_failure(&transposed.symmetric_difference(&c_primal), Side::Primal).unwrap()
        );
    }

    #[test]
    fn corrections_depend_only_on_the_syndrome(
        d in 3usize..10,
        qubits in proptest::collection::vec(0usize..10_000, 0..10),
        generator in 0usize..1000,
    ) {
        // Multiplying the error by a stabilizer leaves the correction and the
        // logical outcome unchanged.
        let code = SurfaceCode::new(d).unwrap();
        let e: QubitSet = qubits.iter().map(|q| q % code.num_qubits()).collect();
        let gens = code.generator_supports(Side::Dual);
        let g = QubitSet::from_sorted(gens[generator % gens.len()].clone());
        let e2 = e.symmetric_difference(&g);
        let mut bc = BubbleDecoder::new(code.clone(), BcConfig::default());
        let s = code.syndrome_of(&e, Side::Primal);
        prop_assert_eq!(&s, &code.syndrome_of(&e2, Side::Primal));
        let c = bc.decode(&s).unwrap();
        prop_assert_eq!(
            code.is_logical_failure(&e.symmetric_difference(&c), Side::Primal).unwrap(),
            code.is_logical_failure(&e2.symmetric_difference(&c), Side::Primal).unwrap()
        );
    }
}
