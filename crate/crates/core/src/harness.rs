//! Monte Carlo logical error rates and decode-time benchmarks.
//!
//! Shots are grouped into fixed-size batches. Batch `b` of the point
//! `(d, p)` draws its errors from the ChaCha stream
//! `d << 48 | p_index << 32 | b`, so every decoder sees the same errors and a
//! row's result depends only on the batch sequence. Batches run in parallel
//! but are folded in index order, and the stop rule is checked after each
//! one; results are therefore identical for any worker count.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bc::BcConfig;
use crate::decoder::{decoder_label, Decoder, DecoderKind};
use crate::error::{Error, Result};
use crate::lattice::{Side, Syndrome, SurfaceCode};
use crate::noise::DepolarizingChannel;
use crate::reference::ORACLE_MAX_DEFECTS;
use crate::stats::{percentile_sorted, wilson_interval};

pub const RESULTS_SCHEMA: &str = "bubblecode-results/1";
pub const TIMING_SCHEMA: &str = "bubblecode-timing/1";

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "BUBBLECODE_THREADS";

/// Latency samples kept per row for the median.
const MAX_LATENCY_SAMPLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    /// Decode both sides of a depolarizing error; either failing counts.
    Depolarizing,
    /// Decode only the Z component of a depolarizing error.
    ZOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub distances: Vec<usize>,
    pub error_rates: Vec<f64>,
    pub decoders: Vec<DecoderKind>,
    pub bc_config: BcConfig,
    pub min_logical_errors: u64,
    pub max_shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub batch_size: u64,
    /// Adds latency columns. Timings are not reproducible between runs.
    pub record_timing: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            distances: vec![3],
            error_rates: vec![1e-2],
            decoders: vec![DecoderKind::Bc],
            bc_config: BcConfig::default(),
            min_logical_errors: 100,
            max_shots: 100_000_000,
            seed: 0,
            noise: NoiseModel::Depolarizing,
            batch_size: 1000,
            record_timing: false,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.distances.is_empty() || self.error_rates.is_empty() || self.decoders.is_empty() {
            return Err(Error::Config(
                "distances, error_rates and decoders must be non-empty".into(),
            ));
        }
        for &d in &self.distances {
            SurfaceCode::new(d)?;
        }
        for &p in &self.error_rates {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        if self.min_logical_errors == 0 {
            return Err(Error::Config("min_logical_errors must be at least 1".into()));
        }
        if self.max_shots == 0 || self.batch_size == 0 {
            return Err(Error::Config("max_shots and batch_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub d: usize,
    pub p: f64,
    pub decoder: String,
    pub shots: u64,
    pub logical_errors: u64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `max_shots` ran out before `min_logical_errors` were seen.
    pub truncated: bool,
    /// Mean defects per shot, summed over decoded sides.
    pub mean_defects: f64,
    pub max_defects: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_latency_ns: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_latency_ns: Option<u64>,
}

#[derive(Default)]
struct BatchTally {
    shots: u64,
    errors: u64,
    defects: u64,
    max_defects: usize,
    latencies: Vec<u64>,
}

/// Worker count: `BUBBLECODE_THREADS` if set, else available parallelism.
pub fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn stream_id(d: usize, p_index: usize, batch: u64) -> u64 {
    ((d as u64) << 48) | ((p_index as u64) << 32) | batch
}

struct RowJob<'a> {
    code: &'a SurfaceCode,
    p: f64,
    p_index: usize,
    kind: DecoderKind,
    spec: &'a ExperimentSpec,
}

impl RowJob<'_> {
    fn run_batch(&self, batch: u64) -> Result<BatchTally> {
        let spec = self.spec;
        let start = batch * spec.batch_size;
        let shots = spec.batch_size.min(spec.max_shots - start);
        let mut channel =
            DepolarizingChannel::new(self.p, spec.seed, stream_id(self.code.d(), self.p_index, batch))?;
        let mut decoder = Decoder::new(self.kind, self.code.clone(), spec.bc_config);
        let sides: &[Side] = match spec.noise {
            NoiseModel::Depolarizing => &Side::BOTH,
            NoiseModel::ZOnly => &[Side::Primal],
        };
        let mut tally = BatchTally {
            shots,
            ..BatchTally::default()
        };
        for _ in 0..shots {
            let error = channel.sample_error(self.code);
            let mut failed = false;
            let mut defects = 0;
            for &side in sides {
                let component = error.component(side);
                let syndrome = self.code.syndrome_of(component, side);
                defects += syndrome.len();
                let correction = if spec.record_timing {
                    let t0 = Instant::now();
                    let c = decoder.decode(&syndrome);
                    tally.latencies.push(t0.elapsed().as_nanos() as u64);
                    c
                } else {
                    decoder.decode(&syndrome)
                };
                // A decoder that cannot handle the syndrome counts as a failure.
                let failed_side = match correction {
                    Ok(c) => self
                        .code
                        .is_logical_failure(&component.symmetric_difference(&c), side)?,
                    Err(Error::Capacity { .. }) => true,
                    Err(e) => return Err(e),
                };
                failed |= failed_side;
            }
            tally.errors += u64::from(failed);
            tally.defects += defects as u64;
            tally.max_defects = tally.max_defects.max(defects);
        }
        Ok(tally)
    }

    fn run(&self, pool: &rayon::ThreadPool, threads: usize) -> Result<ResultRow> {
        let spec = self.spec;
        let total_batches = spec.max_shots.div_ceil(spec.batch_size);
        let mut acc = BatchTally::default();
        let mut next = 0u64;
        let mut round = threads as u64;
        let mut done = false;
        while !done && next < total_batches {
            let end = (next + round).min(total_batches);
            let tallies: Vec<Result<BatchTally>> =
                pool.install(|| (next..end).into_par_iter().map(|b| self.run_batch(b)).collect());
            for tally in tallies {
                let tally = tally?;
                acc.shots += tally.shots;
                acc.errors += tally.errors;
                acc.defects += tally.defects;
                acc.max_defects = acc.max_defects.max(tally.max_defects);
                let room = MAX_LATENCY_SAMPLES.saturating_sub(acc.latencies.len());
                acc.latencies.extend(tally.latencies.into_iter().take(room));
                if acc.errors >= spec.min_logical_errors {
                    done = true;
                    break;
                }
            }
            next = end;
            round = (round * 2).min(threads as u64 * 64);
        }
        let (ci_low, ci_high) = wilson_interval(acc.errors, acc.shots);
        let (mean_latency_ns, median_latency_ns) = if spec.record_timing && !acc.latencies.is_empty()
        {
            let mean = acc.latencies.iter().sum::<u64>() as f64 / acc.latencies.len() as f64;
            acc.latencies.sort_unstable();
            (Some(mean), Some(percentile_sorted(&acc.latencies, 0.5)))
        } else {
            (None, None)
        };
        Ok(ResultRow {
            d: self.code.d(),
            p: self.p,
            decoder: decoder_label(self.kind, &spec.bc_config),
            shots: acc.shots,
            logical_errors: acc.errors,
            p_l: if acc.shots == 0 { 0.0 } else { acc.errors as f64 / acc.shots as f64 },
            ci_low,
            ci_high,
            truncated: !done,
            mean_defects: if acc.shots == 0 { 0.0 } else { acc.defects as f64 / acc.shots as f64 },
            max_defects: acc.max_defects,
            mean_latency_ns,
            median_latency_ns,
        })
    }
}

fn build_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs every `(d, p, decoder)` point of the spec, in that nesting order.
pub fn run_logical_error_experiment(spec: &ExperimentSpec, threads: usize) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let threads = threads.max(1);
    let pool = build_pool(threads)?;
    let mut rows = Vec::new();
    for &d in &spec.distances {
        let code = SurfaceCode::new(d)?;
        for (p_index, &p) in spec.error_rates.iter().enumerate() {
            for &kind in &spec.decoders {
                let job = RowJob {
                    code: &code,
                    p,
                    p_index,
                    kind,
                    spec,
                };
                rows.push(job.run(&pool, threads)?);
            }
        }
    }
    Ok(rows)
}

pub fn results_csv(rows: &[ResultRow]) -> String {
    let timing = rows.iter().any(|r| r.mean_latency_ns.is_some());
    let mut out = String::from(
        "schema,d,p,decoder,shots,logical_errors,p_l,ci_low,ci_high,truncated,mean_defects,max_defects",
    );
    if timing {
        out.push_str(",mean_latency_ns,median_latency_ns");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{RESULTS_SCHEMA},{},{},{},{},{},{},{},{},{},{},{}",
            r.d,
            r.p,
            r.decoder,
            r.shots,
            r.logical_errors,
            r.p_l,
            r.ci_low,
            r.ci_high,
            r.truncated,
            r.mean_defects,
            r.max_defects
        );
        if timing {
            let _ = write!(
                out,
                ",{},{}",
                r.mean_latency_ns.unwrap_or(0.0),
                r.median_latency_ns.unwrap_or(0)
            );
        }
        out.push('\n');
    }
    out
}

pub fn results_json(rows: &[ResultRow]) -> String {
    let doc = serde_json::json!({ "schema": RESULTS_SCHEMA, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("rows serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingSpec {
    pub distances: Vec<usize>,
    pub defect_counts: Vec<usize>,
    pub decoders: Vec<DecoderKind>,
    pub bc_config: BcConfig,
    pub instances: usize,
    pub seed: u64,
}

impl Default for TimingSpec {
    fn default() -> Self {
        TimingSpec {
            distances: vec![3, 5, 7, 9, 11],
            defect_counts: vec![2, 4, 6, 8, 10, 12],
            decoders: vec![DecoderKind::Bc, DecoderKind::Greedy, DecoderKind::Mwpm],
            bc_config: BcConfig::default(),
            instances: 1000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingRow {
    pub d: usize,
    pub n_d: usize,
    pub decoder: String,
    pub instances: usize,
    pub mean_ns: f64,
    pub p50_ns: u64,
    pub p99_ns: u64,
    /// False where the decoder cannot handle this defect count.
    pub available: bool,
}

/// `instances` syndromes with exactly `n_d` distinct defects, drawn uniformly.
pub fn fixed_count_syndromes(code: &SurfaceCode, n_d: usize, instances: usize, seed: u64) -> Result<Vec<Syndrome>> {
    let sites = code.num_defect_sites();
    if n_d > sites {
        return Err(Error::Config(format!(
            "{n_d} defects requested but d={} has only {sites} sites",
            code.d()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((code.d() as u64) << 32) | n_d as u64);
    Ok((0..instances)
        .map(|_| Syndrome::new(Side::Primal, index::sample(&mut rng, sites, n_d).into_vec()))
        .collect())
}

/// Times single decodes around the decode call only. A warm-up pass over the
/// batch is discarded. Runs on the calling thread.
pub fn run_timing_benchmark(spec: &TimingSpec) -> Result<Vec<TimingRow>> {
    if spec.instances == 0 {
        return Err(Error::Config("instances must be positive".into()));
    }
    let mut rows = Vec::new();
    for &d in &spec.distances {
        let code = SurfaceCode::new(d)?;
        for &n_d in &spec.defect_counts {
            let batch = fixed_count_syndromes(&code, n_d, spec.instances, spec.seed)?;
            for &kind in &spec.decoders {
                let label = decoder_label(kind, &spec.bc_config);
                if kind == DecoderKind::Mwpm && n_d > ORACLE_MAX_DEFECTS {
                    rows.push(TimingRow {
                        d,
                        n_d,
                        decoder: label,
                        instances: 0,
                        mean_ns: 0.0,
                        p50_ns: 0,
                        p99_ns: 0,
                        available: false,
                    });
                    continue;
                }
                let mut decoder = Decoder::new(kind, code.clone(), spec.bc_config);
                for s in &batch {
                    black_box(decoder.decode(black_box(s))?);
                }
                let mut times = Vec::with_capacity(batch.len());
                for s in &batch {
                    let t0 = Instant::now();
                    let c = decoder.decode(black_box(s));
                    let dt = t0.elapsed();
                    black_box(c?);
                    times.push(dt.as_nanos() as u64);
                }
                let mean = times.iter().sum::<u64>() as f64 / times.len() as f64;
                times.sort_unstable();
                rows.push(TimingRow {
                    d,
                    n_d,
                    decoder: label,
                    instances: times.len(),
                    mean_ns: mean,
                    p50_ns: percentile_sorted(&times, 0.5),
                    p99_ns: percentile_sorted(&times, 0.99),
                    available: true,
                });
            }
        }
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut out = String::from("schema,d,n_d,decoder,instances,mean_ns,p50_ns,p99_ns,available\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{TIMING_SCHEMA},{},{},{},{},{},{},{},{}",
            r.d, r.n_d, r.decoder, r.instances, r.mean_ns, r.p50_ns, r.p99_ns, r.available
        );
    }
    out
}

pub fn timing_json(rows: &[TimingRow]) -> String {
    let doc = serde_json::json!({ "schema": TIMING_SCHEMA, "rows": rows });
    let mut s = serde_json::to_string_pretty(&doc).expect("rows serialize");
    s.push('\n');
    s
}
