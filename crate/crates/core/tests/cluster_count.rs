//! Errors spread over at least as many clusters as their excess weight.
//!
//! A weight `t + ℓ − 1` error whose defects fall into `ℓ` or more clusters is
//! corrected as long as no error chain straddles two clusters: each cluster
//! then carries at most `t` errors. Chains longer than the radius can
//! straddle clusters when `ℓ ≥ 3`; the pinned pattern below is such a case.

use std::collections::BTreeSet;

use bubblecode_core::verify::random_pattern;
use bubblecode_core::{BcConfig, BubbleDecoder, QubitSet, Side, SurfaceCode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected pieces of an error: qubits are linked when they share a site.
fn chains(code: &SurfaceCode, error: &QubitSet) -> Vec<QubitSet> {
    let qs = error.as_slice();
    let mut label: Vec<usize> = (0..qs.len()).collect();
    loop {
        let mut changed = false;
        for a in 0..qs.len() {
            let sa = code.qubit_sites(Side::Primal, qs[a]);
            for b in 0..qs.len() {
                let sb = code.qubit_sites(Side::Primal, qs[b]);
                if label[b] < label[a] && sa.iter().any(|s| sb.contains(s)) {
                    label[a] = label[b];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let roots: BTreeSet<usize> = label.iter().copied().collect();
    roots
        .into_iter()
        .map(|r| {
            qs.iter()
                .zip(&label)
                .filter(|(_, &l)| l == r)
                .map(|(&q, _)| q)
                .collect()
        })
        .collect()
}

fn straddles(code: &SurfaceCode, decoder: &BubbleDecoder, error: &QubitSet) -> bool {
    let syndrome = code.syndrome_of(error, Side::Primal);
    let state = decoder.cluster(&syndrome);
    chains(code, error).iter().any(|chain| {
        let clusters: BTreeSet<usize> = code
            .syndrome_of(chain, Side::Primal)
            .defects()
            .iter()
            .map(|s| state.cluster_of(syndrome.defects().binary_search(s).unwrap()))
            .collect();
        clusters.len() > 1
    })
}

#[test]
fn contained_patterns_are_corrected() {
    let code = SurfaceCode::new(7).unwrap();
    let mut decoder = BubbleDecoder::new(code.clone(), BcConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for ell in 1..=3 {
        let w = code.t() + ell - 1;
        let mut accepted = 0;
        while accepted < 5_000 {
            let e = random_pattern(&mut rng, code.num_qubits(), w);
            let s = code.syndrome_of(&e, Side::Primal);
            if s.is_empty()
                || decoder.cluster(&s).num_clusters() < ell
                || straddles(&code, &decoder, &e)
            {
                continue;
            }
            accepted += 1;
            let c = decoder.decode(&s).unwrap();
            assert!(
                !code.is_logical_failure(&e.symmetric_difference(&c), Side::Primal).unwrap(),
                "ell={ell}: {e:?}"
            );
        }
    }
}

#[test]
fn weight_t_plus_one_never_straddles() {
    // With one excess error the radius still spans every chain.
    let code = SurfaceCode::new(7).unwrap();
    let decoder = BubbleDecoder::new(code.clone(), BcConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20_000 {
        let e = random_pattern(&mut rng, code.num_qubits(), code.t() + 1);
        if code.syndrome_of(&e, Side::Primal).is_empty() {
            continue;
        }
        assert!(!straddles(&code, &decoder, &e), "{e:?}");
    }
}

#[test]
fn straddling_chain_is_miscorrected() {
    // Top-row run h(0,2..=4) plus h(2,6) and h(6,1): five defects, radius 2.
    // The run's end defects, three apart, become singletons that each take a
    // weight-2 boundary path, closing the top row into a logical operator.
    let code = SurfaceCode::new(7).unwrap();
    let e = QubitSet::from_sorted(vec![2, 3, 4, 20, 43]);
    let s = code.syndrome_of(&e, Side::Primal);
    let mut decoder = BubbleDecoder::new(code.clone(), BcConfig::default());
    let (c, report) = decoder.decode_with_report(&s).unwrap();
    assert_eq!(report.radius, 2);
    assert_eq!(report.num_clusters, 4);
    assert!(straddles(&code, &decoder, &e));
    assert!(code.is_logical_failure(&e.symmetric_difference(&c), Side::Primal).unwrap());
}
