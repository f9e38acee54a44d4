//! Every error of weight at most `t` must be corrected, on both sides.

use bubblecode_core::verify::{distance_preservation, Budget};
use bubblecode_core::{BcConfig, Decoder, DecoderKind, Side, SurfaceCode};

fn exhaustive(d: usize, kind: DecoderKind, config: BcConfig) {
    let code = SurfaceCode::new(d).unwrap();
    let t = code.t();
    let mut decoder = Decoder::new(kind, code, config);
    let r = distance_preservation(&mut decoder, kind.name(), &Side::BOTH, t, Budget::Exhaustive)
        .unwrap();
    assert!(r.passed(), "d={d} {kind}: {r:?}");
}

#[test]
fn d3_all_single_errors_both_sides() {
    let code = SurfaceCode::new(3).unwrap();
    let mut decoder = Decoder::new(DecoderKind::Bc, code, BcConfig::default());
    let r = distance_preservation(&mut decoder, "bc", &Side::BOTH, 1, Budget::Exhaustive).unwrap();
    assert_eq!(r.patterns, 26);
    assert!(r.passed(), "{r:?}");
}

#[test]
fn d5_all_weight_two_patterns() {
    let code = SurfaceCode::new(5).unwrap();
    let mut decoder = Decoder::new(DecoderKind::Bc, code, BcConfig::default());
    let r = distance_preservation(&mut decoder, "bc", &[Side::Primal], 2, Budget::Exhaustive)
        .unwrap();
    assert_eq!(r.patterns, 41 + 820);
    assert!(r.passed(), "{r:?}");
    exhaustive(5, DecoderKind::Bc, BcConfig::default());
}

#[test]
fn d7_all_weight_three_patterns() {
    exhaustive(7, DecoderKind::Bc, BcConfig::default());
}

#[test]
fn every_configuration_preserves_distance() {
    for r in [false, true] {
        for s in [false, true] {
            let config = BcConfig {
                enable_radius_adjustment: r,
                enable_star_avoidance: s,
                enable_high_distance_rules: true,
            };
            for d in [3, 4, 5, 6] {
                exhaustive(d, DecoderKind::Bc, config);
            }
        }
    }
}

#[test]
fn d11_sampled_with_high_distance_rules() {
    let code = SurfaceCode::new(11).unwrap();
    let mut decoder = Decoder::new(DecoderKind::Bc, code, BcConfig::default());
    let budget = Budget::Sampled { samples: 20_000, seed: 11 };
    let r = distance_preservation(&mut decoder, "bc", &Side::BOTH, 5, budget).unwrap();
    assert!(r.passed(), "{r:?}");
}

#[test]
fn reference_decoders_preserve_distance() {
    for d in [3, 5] {
        exhaustive(d, DecoderKind::Mwpm, BcConfig::default());
    }
}
