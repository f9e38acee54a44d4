//! Code-capacity depolarizing noise.
//!
//! Random streams come from ChaCha8 keyed by `seed_from_u64(seed)` with the
//! ChaCha stream number set to `stream_id`. Each qubit consumes exactly one
//! `f64` draw, in index order, so a `(seed, stream_id)` pair replays the same
//! error sequence on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{QubitSet, Side, SurfaceCode};

/// A Pauli error: `z` holds qubits with a Z component, `x` those with an X
/// component. A Y on qubit `q` appears in both.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliError {
    pub z: QubitSet,
    pub x: QubitSet,
}

impl PauliError {
    pub fn new(z: QubitSet, x: QubitSet) -> Self {
        PauliError { z, x }
    }

    pub fn is_identity(&self) -> bool {
        self.z.is_empty() && self.x.is_empty()
    }

    /// Splits into the two independent decoding problems: the Z component is
    /// decoded on the primal grid, the X component on the dual grid.
    pub fn split_sides(&self) -> (QubitSet, QubitSet) {
        (self.z.clone(), self.x.clone())
    }

    pub fn component(&self, side: Side) -> &QubitSet {
        match side {
            Side::Primal => &self.z,
            Side::Dual => &self.x,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DepolarizingChannel {
    p: f64,
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl DepolarizingChannel {
    pub fn new(p: f64, seed: u64, stream_id: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Ok(DepolarizingChannel {
            p,
            seed,
            stream_id,
            rng,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Each qubit independently suffers X, Y or Z with probability `p / 3`.
    pub fn sample_error(&mut self, code: &SurfaceCode) -> PauliError {
        let third = self.p / 3.0;
        let mut z = Vec::new();
        let mut x = Vec::new();
        for q in 0..code.num_qubits() {
            let u: f64 = self.rng.gen();
            if u >= self.p {
                continue;
            }
            if u < third {
                x.push(q);
            } else if u < 2.0 * third {
                x.push(q);
                z.push(q);
            } else {
                z.push(q);
            }
        }
        PauliError::new(QubitSet::from_sorted(z), QubitSet::from_sorted(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_probability() {
        assert_eq!(
            DepolarizingChannel::new(1.5, 0, 0).unwrap_err(),
            Error::InvalidProbability(1.5)
        );
        assert!(DepolarizingChannel::new(-0.1, 0, 0).is_err());
        assert!(DepolarizingChannel::new(f64::NAN, 0, 0).is_err());
    }

    #[test]
    fn zero_rate_is_identity() {
        let code = SurfaceCode::new(5).unwrap();
        let mut ch = DepolarizingChannel::new(0.0, 7, 0).unwrap();
        for _ in 0..1000 {
            assert!(ch.sample_error(&code).is_identity());
        }
    }

    #[test]
    fn unit_rate_hits_every_qubit_uniformly() {
        let code = SurfaceCode::new(3).unwrap();
        let mut ch = DepolarizingChannel::new(1.0, 11, 0).unwrap();
        let mut counts = [0f64; 3]; // X, Y, Z
        let draws = 20_000;
        for _ in 0..draws {
            let e = ch.sample_error(&code);
            for q in 0..code.num_qubits() {
                match (e.x.contains(q), e.z.contains(q)) {
                    (true, false) => counts[0] += 1.0,
                    (true, true) => counts[1] += 1.0,
                    (false, true) => counts[2] += 1.0,
                    (false, false) => panic!("qubit {q} left untouched at p = 1"),
                }
            }
        }
        let expected = (draws * code.num_qubits()) as f64 / 3.0;
        let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
        // 2 degrees of freedom, 99.9th percentile is 13.8.
        assert!(chi2 < 13.8, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn z_marginal_is_two_thirds_p() {
        let code = SurfaceCode::new(3).unwrap();
        let p = 0.1;
        let draws = 1_000_000;
        let mut ch = DepolarizingChannel::new(p, 2024, 3).unwrap();
        let total: usize = (0..draws).map(|_| ch.sample_error(&code).z.len()).sum();
        let mean = total as f64 / draws as f64;
        let q = 2.0 * p / 3.0;
        let expected = 13.0 * q;
        let sigma = (13.0 * q * (1.0 - q) / draws as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sigma, "mean {mean} vs {expected}");
    }

    #[test]
    fn streams_replay_and_differ() {
        let code = SurfaceCode::new(5).unwrap();
        let run = |seed, stream| {
            let mut ch = DepolarizingChannel::new(0.2, seed, stream).unwrap();
            (0..50).map(|_| ch.sample_error(&code)).collect::<Vec<_>>()
        };
        assert_eq!(run(1, 0), run(1, 0));
        assert_ne!(run(1, 0), run(1, 1));
        assert_ne!(run(1, 0), run(2, 0));
    }

    #[test]
    fn split_examples() {
        let y3 = PauliError::new(QubitSet::from_sorted(vec![3]), QubitSet::from_sorted(vec![3]));
        assert_eq!(
            y3.split_sides(),
            (QubitSet::from_sorted(vec![3]), QubitSet::from_sorted(vec![3]))
        );
        assert_eq!(PauliError::default().split_sides(), (QubitSet::new(), QubitSet::new()));
        let mixed = PauliError::new(QubitSet::from_sorted(vec![1]), QubitSet::from_sorted(vec![2]));
        let (z, x) = mixed.split_sides();
        assert_eq!((z.as_slice(), x.as_slice()), (&[1][..], &[2][..]));
        assert_eq!(PauliError::new(z, x), mixed);
    }
}
