//! The bubble clustering decoder.
//!
//! Decoding one side runs four phases: the bubble radius is fixed from the
//! defect count, defects are grouped into trees under that radius, each tree
//! is peeled into a matching (with a ghost ancilla for odd clusters), and a
//! second matching differing by a logical operator is built when the first is
//! heavier than `t`. The cluster matchings are combined into the correction.

mod cluster;
mod peel;

pub use cluster::{bubble_cluster, high_distance_merge, ClusterState};
pub use peel::{
    add_ghost, build_match, peel, post_process, Decision, GhostAttachment, GhostSide, Matching,
    PeelPhase, PeelScratch, PostProcessOutcome, Target,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{Boundary, QubitSet, Syndrome, SurfaceCode};

/// Distance from which the high-distance merge rules apply.
pub const HIGH_DISTANCE_MIN_D: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcConfig {
    /// Floor the radius at 2 once the defect count exceeds `2t`.
    pub enable_radius_adjustment: bool,
    pub enable_star_avoidance: bool,
    /// Only takes effect for `d >= 11`.
    pub enable_high_distance_rules: bool,
}

impl Default for BcConfig {
    fn default() -> Self {
        BcConfig {
            enable_radius_adjustment: true,
            enable_star_avoidance: true,
            enable_high_distance_rules: true,
        }
    }
}

impl BcConfig {
    /// Every adjustment switched off.
    pub fn plain() -> Self {
        BcConfig {
            enable_radius_adjustment: false,
            enable_star_avoidance: false,
            enable_high_distance_rules: false,
        }
    }
}

/// Bubble radius for `n_d` defects: `t + 2 - ceil(n_d / 2)`.
///
/// Adjusted, the radius becomes 2 once `n_d > 2t`. Unadjusted, it is clamped
/// at 1 so that every syndrome still clusters.
pub fn bubble_radius(t: usize, n_d: usize, adjusted: bool) -> usize {
    debug_assert!(t >= 1 && n_d >= 1);
    let raw = (t + 2) as isize - n_d.div_ceil(2) as isize;
    if adjusted && n_d > 2 * t {
        2
    } else {
        raw.max(1) as usize
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClusterReport {
    pub defects: Vec<usize>,
    pub first_ghost: Option<Boundary>,
    pub w1: usize,
    pub w2: Option<usize>,
    pub decision: Decision,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DecodeReport {
    pub radius: usize,
    pub num_clusters: usize,
    pub clusters: Vec<ClusterReport>,
}

/// Reusable decoder for one code. Holds scratch buffers only; every call is
/// independent of the previous ones.
#[derive(Clone, Debug)]
pub struct BubbleDecoder {
    code: SurfaceCode,
    config: BcConfig,
    state: ClusterState,
    scratch: PeelScratch,
    toggles: Vec<usize>,
}

impl BubbleDecoder {
    pub fn new(code: SurfaceCode, config: BcConfig) -> Self {
        BubbleDecoder {
            code,
            config,
            state: ClusterState::default(),
            scratch: PeelScratch::default(),
            toggles: Vec::new(),
        }
    }

    pub fn code(&self) -> &SurfaceCode {
        &self.code
    }

    pub fn config(&self) -> BcConfig {
        self.config
    }

    /// Radius used for a syndrome with `n_d` defects.
    pub fn radius_for(&self, n_d: usize) -> usize {
        bubble_radius(self.code.t(), n_d, self.config.enable_radius_adjustment)
    }

    /// Correction (physical qubit indices) for one side's syndrome.
    pub fn decode(&mut self, syndrome: &Syndrome) -> Result<QubitSet> {
        if syndrome.is_empty() {
            return Ok(QubitSet::new());
        }
        let radius = self.radius_for(syndrome.len());
        self.decode_inner(syndrome, radius, None)
    }

    pub fn decode_with_report(&mut self, syndrome: &Syndrome) -> Result<(QubitSet, DecodeReport)> {
        if syndrome.is_empty() {
            return Ok((QubitSet::new(), DecodeReport::default()));
        }
        let radius = self.radius_for(syndrome.len());
        let mut report = DecodeReport {
            radius,
            ..DecodeReport::default()
        };
        let correction = self.decode_inner(syndrome, radius, Some(&mut report))?;
        Ok((correction, report))
    }

    /// Decodes with a caller-chosen bubble radius instead of the computed one.
    pub fn decode_with_radius(&mut self, syndrome: &Syndrome, radius: usize) -> Result<QubitSet> {
        if syndrome.is_empty() {
            return Ok(QubitSet::new());
        }
        self.decode_inner(syndrome, radius.max(1), None)
    }

    /// Clustering result for a syndrome, including high-distance merges.
    pub fn cluster(&self, syndrome: &Syndrome) -> ClusterState {
        let radius = self.radius_for(syndrome.len().max(1));
        let mut state = bubble_cluster(
            &self.code,
            syndrome.defects(),
            radius,
            self.config.enable_star_avoidance,
        );
        if self.high_distance_active() {
            high_distance_merge(&self.code, &mut state, radius);
        }
        state
    }

    fn high_distance_active(&self) -> bool {
        self.config.enable_high_distance_rules && self.code.d() >= HIGH_DISTANCE_MIN_D
    }

    fn decode_inner(
        &mut self,
        syndrome: &Syndrome,
        radius: usize,
        mut report: Option<&mut DecodeReport>,
    ) -> Result<QubitSet> {
        let code = &self.code;
        cluster::bubble_cluster_into(
            code,
            syndrome.defects(),
            radius,
            self.config.enable_star_avoidance,
            &mut self.state,
        );
        if self.config.enable_high_distance_rules && code.d() >= HIGH_DISTANCE_MIN_D {
            high_distance_merge(code, &mut self.state, radius);
        }
        self.toggles.clear();
        for c in 0..self.state.num_clusters() {
            let ghosts = add_ghost(code, &self.state, c, PeelPhase::First, None)?;
            let m1 = peel::peel_with(code, &self.state, c, &ghosts, &mut self.scratch)?;
            let w1 = m1.weight;
            let outcome =
                peel::post_process_with(code, &self.state, c, &ghosts, m1, &mut self.scratch)?;
            self.toggles.extend(outcome.chosen.qubits.iter());
            if let Some(r) = report.as_deref_mut() {
                r.clusters.push(ClusterReport {
                    defects: self.state.cluster(c).iter().map(|&v| self.state.site(v)).collect(),
                    first_ghost: ghosts.first().map(|g| g.side),
                    w1,
                    w2: outcome.second_weight,
                    decision: outcome.decision,
                });
            }
        }
        if let Some(r) = report {
            r.num_clusters = self.state.num_clusters();
        }
        let side = syndrome.side;
        let toggles = self.toggles.iter().map(|&q| code.to_frame(side, q)).collect();
        Ok(QubitSet::from_toggles(toggles))
    }
}

/// One-shot decode of a single side.
pub fn decode_side(code: &SurfaceCode, syndrome: &Syndrome, config: BcConfig) -> Result<QubitSet> {
    BubbleDecoder::new(code.clone(), config).decode(syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Side;

    #[test]
    fn radius_examples() {
        assert_eq!(bubble_radius(3, 2, false), 4);
        assert_eq!(bubble_radius(3, 3, false), 3);
        assert_eq!(bubble_radius(3, 3, true), 3);
        assert_eq!(bubble_radius(3, 4, true), 3);
        assert_eq!(bubble_radius(3, 7, false), 1);
        assert_eq!(bubble_radius(3, 7, true), 2);
        assert_eq!(bubble_radius(3, 20, false), 1);
        assert_eq!(bubble_radius(1, 1, true), 2);
    }

    #[test]
    fn radius_monotone() {
        for t in 1..8 {
            for adjusted in [false, true] {
                let mut prev = usize::MAX;
                for n_d in 1..60 {
                    let r = bubble_radius(t, n_d, adjusted);
                    assert!(r <= prev && r >= 1);
                    if adjusted && n_d > 2 * t {
                        assert_eq!(r, 2);
                    }
                    prev = r;
                }
            }
        }
    }

    #[test]
    fn empty_syndrome() {
        let code = SurfaceCode::new(7).unwrap();
        let c = decode_side(&code, &Syndrome::empty(Side::Primal), BcConfig::default()).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn every_single_error_d3_both_sides() {
        let code = SurfaceCode::new(3).unwrap();
        let mut dec = BubbleDecoder::new(code.clone(), BcConfig::default());
        for side in Side::BOTH {
            for q in 0..code.num_qubits() {
                let e = QubitSet::from_sorted(vec![q]);
                let s = code.syndrome_of(&e, side);
                let c = dec.decode(&s).unwrap();
                let residual = e.symmetric_difference(&c);
                assert!(!code.is_logical_failure(&residual, side).unwrap(), "{side} q={q}");
            }
        }
    }

    #[test]
    fn report_tracks_clusters() {
        let code = SurfaceCode::new(7).unwrap();
        let mut dec = BubbleDecoder::new(code.clone(), BcConfig::default());
        let s = Syndrome::new(
            Side::Primal,
            vec![code.site_index(0, 0), code.site_index(0, 1), code.site_index(5, 5)],
        );
        let (c, report) = dec.decode_with_report(&s).unwrap();
        assert_eq!(report.radius, 3);
        assert_eq!(report.num_clusters, 2);
        assert_eq!(report.clusters[0].w1, 1);
        assert_eq!(report.clusters[1].first_ghost, Some(Boundary::Right));
        assert_eq!(code.syndrome_of(&c, Side::Primal), s);
    }
}
