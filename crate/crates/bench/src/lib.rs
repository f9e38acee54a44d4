//! Workload builders shared by the decoder benchmarks.

use bubblecode_core::harness::fixed_count_syndromes;
use bubblecode_core::{DepolarizingChannel, Result, Side, SurfaceCode, Syndrome};

/// Syndromes with exactly `n_d` primal defects at uniformly random sites.
pub fn fixed_count_workload(d: usize, n_d: usize, instances: usize, seed: u64) -> Result<(SurfaceCode, Vec<Syndrome>)> {
    let code = SurfaceCode::new(d)?;
    let syndromes = fixed_count_syndromes(&code, n_d, instances, seed)?;
    Ok((code, syndromes))
}

/// Both syndromes of `instances` depolarizing errors at rate `p`, skipping
/// trivial ones so every decode does work.
pub fn depolarizing_workload(d: usize, p: f64, instances: usize, seed: u64) -> Result<(SurfaceCode, Vec<Syndrome>)> {
    let code = SurfaceCode::new(d)?;
    let mut channel = DepolarizingChannel::new(p, seed, d as u64)?;
    let mut syndromes = Vec::with_capacity(instances);
    while syndromes.len() < instances {
        let error = channel.sample_error(&code);
        for side in [Side::Primal, Side::Dual] {
            let syndrome = code.syndrome_of(error.component(side), side);
            if !syndrome.is_empty() && syndromes.len() < instances {
                syndromes.push(syndrome);
            }
        }
    }
    Ok((code, syndromes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_count_workload_has_requested_defects() {
        let (_, syndromes) = fixed_count_workload(7, 8, 20, 1).unwrap();
        assert_eq!(syndromes.len(), 20);
        assert!(syndromes.iter().all(|s| s.len() == 8));
    }

    #[test]
    fn depolarizing_workload_is_nontrivial_and_seeded() {
        let (_, a) = depolarizing_workload(5, 0.05, 50, 3).unwrap();
        let (_, b) = depolarizing_workload(5, 0.05, 50, 3).unwrap();
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|s| !s.is_empty()));
        assert_eq!(a, b);
    }
}
