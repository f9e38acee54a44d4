//! Correctness suites: distance preservation, the cluster-count corollary,
//! and the fraction `β_w` of weight-`w` patterns a decoder corrects.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bc::{BcConfig, BubbleDecoder};
use crate::decoder::Decoder;
use crate::error::{Error, Result};
use crate::lattice::{QubitSet, Side, SurfaceCode};
use crate::stats::{binomial, wilson_interval};

/// Largest pattern count an exhaustive run may enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

/// Calls `f` on every `w`-subset of `0..n` in lexicographic order.
pub fn for_each_combination<F>(n: usize, w: usize, mut f: F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    if w > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        f(&idx)?;
        // Rightmost position that can still advance.
        let mut i = w;
        while i > 0 && idx[i - 1] == n - w + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(());
        }
        idx[i - 1] += 1;
        for j in i..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Decodes a single-side error and reports whether the residual is logical.
pub fn fails(decoder: &mut Decoder, side: Side, error: &QubitSet) -> Result<bool> {
    let code = decoder.code().clone();
    let syndrome = code.syndrome_of(error, side);
    let correction = decoder.decode(&syndrome)?;
    let residual = error.symmetric_difference(&correction);
    code.is_logical_failure(&residual, side)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub d: usize,
    pub w: usize,
    pub decoder: String,
    pub beta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub patterns: u64,
    pub corrected: u64,
    pub exhaustive: bool,
}

/// Fraction of weight-`w` Z patterns the decoder corrects. Exhaustive runs
/// report a degenerate interval; sampled runs a Wilson 95% interval.
pub fn beta_fraction(
    decoder: &mut Decoder,
    label: &str,
    w: usize,
    budget: Budget,
) -> Result<BetaEstimate> {
    if w == 0 {
        return Err(Error::Config("pattern weight must be at least 1".into()));
    }
    let code = decoder.code().clone();
    let n = code.num_qubits();
    let mut patterns = 0u64;
    let mut corrected = 0u64;
    let exhaustive = matches!(budget, Budget::Exhaustive);
    match budget {
        Budget::Exhaustive => {
            let total = binomial(n, w);
            if total > EXHAUSTIVE_LIMIT {
                return Err(Error::Capacity {
                    what: "exhaustive pattern count",
                    requested: total,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            for_each_combination(n, w, |qs| {
                patterns += 1;
                let e = QubitSet::from_sorted(qs.to_vec());
                if !fails(decoder, Side::Primal, &e)? {
                    corrected += 1;
                }
                Ok(())
            })?;
        }
        Budget::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let e = random_pattern(&mut rng, n, w);
                patterns += 1;
                if !fails(decoder, Side::Primal, &e)? {
                    corrected += 1;
                }
            }
        }
    }
    let beta = if patterns == 0 { 1.0 } else { corrected as f64 / patterns as f64 };
    let (ci_low, ci_high) = if exhaustive {
        (beta, beta)
    } else {
        wilson_interval(corrected, patterns)
    };
    Ok(BetaEstimate {
        d: code.d(),
        w,
        decoder: label.to_string(),
        beta,
        ci_low,
        ci_high,
        patterns,
        corrected,
        exhaustive,
    })
}

pub fn random_pattern(rng: &mut ChaCha8Rng, n: usize, w: usize) -> QubitSet {
    let mut v = index::sample(rng, n, w).into_vec();
    v.sort_unstable();
    QubitSet::from_sorted(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub d: usize,
    pub decoder: String,
    pub patterns: u64,
    pub failures: u64,
    /// Side and qubits of the first failing pattern.
    pub first_failure: Option<(Side, Vec<usize>)>,
}

impl SuiteResult {
    /// No failures. A suite with no qualifying patterns passes vacuously.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Every pattern of weight `1..=max_weight` (or a random sample of them) on
/// `side` must decode without a logical failure.
pub fn distance_preservation(
    decoder: &mut Decoder,
    label: &str,
    sides: &[Side],
    max_weight: usize,
    budget: Budget,
) -> Result<SuiteResult> {
    let code = decoder.code().clone();
    let n = code.num_qubits();
    let mut result = SuiteResult {
        name: format!("distance-preservation(w<={max_weight})"),
        d: code.d(),
        decoder: label.to_string(),
        patterns: 0,
        failures: 0,
        first_failure: None,
    };
    let mut check = |decoder: &mut Decoder, side: Side, e: QubitSet| -> Result<()> {
        result.patterns += 1;
        if fails(decoder, side, &e)? {
            result.failures += 1;
            result.first_failure.get_or_insert((side, e.into_vec()));
        }
        Ok(())
    };
    for &side in sides {
        match budget {
            Budget::Exhaustive => {
                let total: u128 = (1..=max_weight).map(|w| binomial(n, w)).sum();
                if total > EXHAUSTIVE_LIMIT {
                    return Err(Error::Capacity {
                        what: "exhaustive pattern count",
                        requested: total,
                        limit: EXHAUSTIVE_LIMIT,
                    });
                }
                for w in 1..=max_weight {
                    for_each_combination(n, w, |qs| {
                        check(decoder, side, QubitSet::from_sorted(qs.to_vec()))
                    })?;
                }
            }
            Budget::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(side as u64);
                for _ in 0..samples {
                    let w = 1 + (rand::Rng::gen_range(&mut rng, 0..max_weight.max(1)));
                    let e = random_pattern(&mut rng, n, w);
                    check(decoder, side, e)?;
                }
            }
        }
    }
    Ok(result)
}

/// Weight-`(t + ℓ - 1)` Z patterns whose clustering yields at least `ℓ`
/// clusters must all be corrected. One result per `ℓ`. Exhaustive budgets
/// enumerate every pattern of that weight; sampled budgets draw until
/// `samples` qualifying patterns are found or the draw limit is reached.
pub fn cluster_count_suite(
    code: &SurfaceCode,
    config: BcConfig,
    ells: &[usize],
    budget: Budget,
) -> Result<Vec<SuiteResult>> {
    let t = code.t();
    let n = code.num_qubits();
    let label = crate::decoder::decoder_label(crate::decoder::DecoderKind::Bc, &config);
    let mut decoder = Decoder::new(crate::decoder::DecoderKind::Bc, code.clone(), config);
    let clusterer = BubbleDecoder::new(code.clone(), config);
    let mut results = Vec::with_capacity(ells.len());
    for &ell in ells {
        if ell == 0 {
            return Err(Error::Config("cluster count must be positive".into()));
        }
        let w = t + ell - 1;
        let mut result = SuiteResult {
            name: format!("cluster-count(l={ell},w={w})"),
            d: code.d(),
            decoder: label.clone(),
            patterns: 0,
            failures: 0,
            first_failure: None,
        };
        let mut check = |result: &mut SuiteResult, e: QubitSet| -> Result<()> {
            let syndrome = code.syndrome_of(&e, Side::Primal);
            if syndrome.is_empty() || clusterer.cluster(&syndrome).num_clusters() < ell {
                return Ok(());
            }
            result.patterns += 1;
            if fails(&mut decoder, Side::Primal, &e)? {
                result.failures += 1;
                result.first_failure.get_or_insert((Side::Primal, e.into_vec()));
            }
            Ok(())
        };
        match budget {
            Budget::Exhaustive => {
                let total = binomial(n, w);
                if total > EXHAUSTIVE_LIMIT {
                    return Err(Error::Capacity {
                        what: "exhaustive pattern count",
                        requested: total,
                        limit: EXHAUSTIVE_LIMIT,
                    });
                }
                for_each_combination(n, w, |qs| {
                    check(&mut result, QubitSet::from_sorted(qs.to_vec()))
                })?;
            }
            Budget::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(ell as u64);
                let max_draws = samples.saturating_mul(1000);
                let mut draws = 0;
                while result.patterns < samples && draws < max_draws {
                    draws += 1;
                    check(&mut result, random_pattern(&mut rng, n, w))?;
                }
            }
        }
        results.push(result);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DecoderKind;

    #[test]
    fn combinations_enumerate_in_order() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| {
            seen.push(c.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[0], vec![0, 1, 2]);
        assert_eq!(seen[9], vec![2, 3, 4]);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut count = 0;
        for_each_combination(41, 3, |_| {
            count += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(count, 10_660);
        let mut one = 0;
        for_each_combination(4, 4, |_| {
            one += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(one, 1);
    }

    #[test]
    fn cluster_count_d3_is_vacuous_at_three_clusters() {
        let code = SurfaceCode::new(3).unwrap();
        let r = cluster_count_suite(&code, BcConfig::default(), &[1, 2, 3], Budget::Exhaustive)
            .unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(SuiteResult::passed), "{r:?}");
        assert_eq!(r[0].patterns, 13);
        assert!(r[1].patterns > 0);
        assert_eq!(r[2].patterns, 0);
    }

    #[test]
    fn beta_d3_weight_one_is_complete() {
        let code = SurfaceCode::new(3).unwrap();
        let mut dec = Decoder::new(DecoderKind::Bc, code, BcConfig::default());
        let est = beta_fraction(&mut dec, "bc", 1, Budget::Exhaustive).unwrap();
        assert_eq!((est.patterns, est.corrected), (13, 13));
        assert_eq!(est.beta, 1.0);
    }

    #[test]
    fn exhaustive_budget_guard() {
        let code = SurfaceCode::new(11).unwrap();
        let mut dec = Decoder::new(DecoderKind::Greedy, code, BcConfig::default());
        assert!(matches!(
            beta_fraction(&mut dec, "greedy", 6, Budget::Exhaustive),
            Err(Error::Capacity { .. })
        ));
        assert!(beta_fraction(&mut dec, "greedy", 0, Budget::Exhaustive).is_err());
    }

    #[test]
    fn sampled_beta_is_reproducible() {
        let code = SurfaceCode::new(5).unwrap();
        let mut dec = Decoder::new(DecoderKind::Bc, code, BcConfig::default());
        let budget = Budget::Sampled { samples: 2000, seed: 9 };
        let a = beta_fraction(&mut dec, "bc", 3, budget).unwrap();
        let b = beta_fraction(&mut dec, "bc", 3, budget).unwrap();
        assert_eq!(a, b);
        assert!(a.ci_low <= a.beta && a.beta <= a.ci_high);
    }
}
