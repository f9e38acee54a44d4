//! `bubblecode`: describe the lattice, decode syndromes, run verification
//! suites, simulate logical error rates and time decoders.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 invalid
//! configuration or input.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bubblecode_core::bc::DecodeReport;
use bubblecode_core::harness::{self, ExperimentSpec, NoiseModel, TimingSpec};
use bubblecode_core::stats::binomial;
use bubblecode_core::verify::{
    beta_fraction, cluster_count_suite, distance_preservation, BetaEstimate, Budget, SuiteResult,
    EXHAUSTIVE_LIMIT,
};
use bubblecode_core::{
    decoder_label, BcConfig, BubbleDecoder, Decoder, DecoderKind, Side, Syndrome, SurfaceCode,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

const DECODE_SCHEMA: &str = "bubblecode-decode/1";
const BETA_SCHEMA: &str = "bubblecode-beta/1";

#[derive(Parser)]
#[command(name = "bubblecode", version, about = "Bubble clustering surface-code decoder")]
#[command(propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Depolarizing,
    ZOnly,
}

fn distance_arg() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(3..=1000)
}

#[derive(Subcommand)]
enum Command {
    /// Print the lattice geometry: qubits, generators, columns, logicals.
    Describe {
        #[arg(long, value_parser = distance_arg())]
        d: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a syndrome read as JSON from standard input:
    /// `{"d": 7, "side": "primal", "defects": [3, 9]}`.
    Decode {
        /// Code distance; must agree with the input's `d` if both are given.
        #[arg(long, value_parser = distance_arg())]
        d: Option<u64>,
        #[arg(long, default_value = "bc")]
        decoder: DecoderKind,
        /// Bubble clustering toggles as JSON (inline or a file path).
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the distance-preservation and cluster-count suites and a table of
    /// corrected-pattern fractions by weight.
    Verify {
        #[arg(long, value_parser = distance_arg())]
        d: u64,
        #[arg(long, default_value = "bc")]
        decoder: DecoderKind,
        /// Patterns per suite when exhaustive enumeration is too large.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bubble clustering toggles as JSON (inline or a file path).
        #[arg(long)]
        config: Option<String>,
        /// Where to write the fraction table.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Monte Carlo logical error rates under depolarizing noise.
    Simulate {
        #[arg(long, value_delimiter = ',', value_parser = distance_arg())]
        d: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        decoder: Vec<DecoderKind>,
        #[arg(long)]
        seed: Option<u64>,
        /// Stop a row once this many logical errors were seen.
        #[arg(long)]
        min_errors: Option<u64>,
        #[arg(long)]
        max_shots: Option<u64>,
        #[arg(long)]
        batch_size: Option<u64>,
        #[arg(long, value_enum)]
        noise: Option<NoiseArg>,
        /// Record decode latencies (adds non-reproducible columns).
        #[arg(long)]
        timing: bool,
        /// Worker threads; defaults to BUBBLECODE_THREADS or all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Experiment spec as JSON (inline or a file path); flags override it.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Time single decodes on syndromes with a fixed number of defects.
    Bench {
        #[arg(long, value_delimiter = ',', value_parser = distance_arg())]
        d: Vec<u64>,
        /// Defect counts per syndrome.
        #[arg(long, value_delimiter = ',')]
        nd: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        decoder: Vec<DecoderKind>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Timing spec as JSON (inline or a file path); flags override it.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every verification passed.
fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Describe { d, format, out } => {
            let code = SurfaceCode::new(d as usize)?;
            let text = match format {
                Format::Json => to_json(&code.describe())?,
                Format::Csv => describe_csv(&code),
            };
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Decode {
            d,
            decoder,
            config,
            out,
        } => {
            let config = parse_config::<BcConfig>(config.as_deref())?.unwrap_or_default();
            let mut input = String::new();
            std::io::stdin()
                .read_to_string(&mut input)
                .context("reading standard input")?;
            let text = decode(d.map(|d| d as usize), decoder, config, &input)?;
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Verify {
            d,
            decoder,
            samples,
            seed,
            config,
            out,
            format,
        } => {
            let config = parse_config::<BcConfig>(config.as_deref())?.unwrap_or_default();
            let code = SurfaceCode::new(d as usize)?;
            let (suites, betas) = verify(&code, decoder, config, samples, seed)?;
            let mut report = String::new();
            for s in &suites {
                let _ = write!(
                    report,
                    "{} {} d={} decoder={} patterns={} failures={}",
                    if s.passed() { "PASS" } else { "FAIL" },
                    s.name,
                    s.d,
                    s.decoder,
                    s.patterns,
                    s.failures
                );
                if let Some((side, qubits)) = &s.first_failure {
                    let _ = write!(report, " first_failure={side}:{qubits:?}");
                }
                report.push('\n');
            }
            for b in &betas {
                let _ = writeln!(
                    report,
                    "beta d={} w={} decoder={} {}/{} = {} ({})",
                    b.d,
                    b.w,
                    b.decoder,
                    b.corrected,
                    b.patterns,
                    b.beta,
                    if b.exhaustive { "exhaustive" } else { "sampled" }
                );
            }
            eprint!("{report}");
            let text = match format {
                Format::Csv => beta_csv(&betas),
                Format::Json => beta_json(&betas)?,
            };
            emit(out.as_deref(), &text)?;
            Ok(suites.iter().all(SuiteResult::passed))
        }
        Command::Simulate {
            d,
            p,
            decoder,
            seed,
            min_errors,
            max_shots,
            batch_size,
            noise,
            timing,
            threads,
            config,
            out,
            format,
        } => {
            let mut spec = parse_config::<ExperimentSpec>(config.as_deref())?.unwrap_or_default();
            if !d.is_empty() {
                spec.distances = d.iter().map(|&d| d as usize).collect();
            }
            if !p.is_empty() {
                spec.error_rates = p;
            }
            if !decoder.is_empty() {
                spec.decoders = decoder;
            }
            if let Some(v) = seed {
                spec.seed = v;
            }
            if let Some(v) = min_errors {
                spec.min_logical_errors = v;
            }
            if let Some(v) = max_shots {
                spec.max_shots = v;
            }
            if let Some(v) = batch_size {
                spec.batch_size = v;
            }
            if let Some(n) = noise {
                spec.noise = match n {
                    NoiseArg::Depolarizing => NoiseModel::Depolarizing,
                    NoiseArg::ZOnly => NoiseModel::ZOnly,
                };
            }
            spec.record_timing |= timing;
            spec.validate()?;
            let threads = match threads {
                Some(0) => bail!("--threads must be positive"),
                Some(n) => n,
                None => harness::worker_count(),
            };
            let rows = harness::run_logical_error_experiment(&spec, threads)?;
            let text = match format {
                Format::Csv => harness::results_csv(&rows),
                Format::Json => harness::results_json(&rows),
            };
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Bench {
            d,
            nd,
            decoder,
            instances,
            seed,
            config,
            out,
            format,
        } => {
            let mut spec = parse_config::<TimingSpec>(config.as_deref())?.unwrap_or_default();
            if !d.is_empty() {
                spec.distances = d.iter().map(|&d| d as usize).collect();
            }
            if !nd.is_empty() {
                spec.defect_counts = nd;
            }
            if !decoder.is_empty() {
                spec.decoders = decoder;
            }
            if let Some(v) = instances {
                spec.instances = v;
            }
            if let Some(v) = seed {
                spec.seed = v;
            }
            let rows = harness::run_timing_benchmark(&spec)?;
            let text = match format {
                Format::Csv => harness::timing_csv(&rows),
                Format::Json => harness::timing_json(&rows),
            };
            emit(out.as_deref(), &text)?;
            Ok(true)
        }
    }
}

/// Parses `--config`: inline JSON if it starts with `{`, else a file path.
fn parse_config<T: for<'de> Deserialize<'de>>(arg: Option<&str>) -> anyhow::Result<Option<T>> {
    let Some(arg) = arg else {
        return Ok(None);
    };
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading config file {arg}"))?
    };
    Ok(Some(serde_json::from_str(&text).context("parsing --config")?))
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn describe_csv(code: &SurfaceCode) -> String {
    let mut out = String::from("index,kind,row,col,column,primal_sites,dual_sites\n");
    for q in code.describe().qubits {
        let join = |side| {
            code.qubit_sites(side, q.index)
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            q.index,
            q.kind,
            q.row,
            q.col,
            q.column.map_or(String::new(), |c| c.to_string()),
            join(Side::Primal),
            join(Side::Dual)
        );
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecodeInput {
    d: Option<usize>,
    #[serde(default = "primal")]
    side: Side,
    #[serde(default)]
    defects: Vec<usize>,
}

fn primal() -> Side {
    Side::Primal
}

#[derive(Serialize)]
struct DecodeOutput {
    schema: &'static str,
    d: usize,
    side: Side,
    decoder: String,
    correction: Vec<usize>,
    weight: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<DecodeReport>,
}

fn decode(d: Option<usize>, kind: DecoderKind, config: BcConfig, input: &str) -> anyhow::Result<String> {
    let parsed: DecodeInput = if input.trim().is_empty() {
        DecodeInput {
            d: None,
            side: Side::Primal,
            defects: Vec::new(),
        }
    } else {
        serde_json::from_str(input).context("parsing syndrome JSON")?
    };
    let d = match (d, parsed.d) {
        (Some(a), Some(b)) if a != b => bail!("--d {a} disagrees with input d = {b}"),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => bail!("code distance missing: pass --d or include \"d\" in the input"),
    };
    let code = SurfaceCode::new(d)?;
    let sites = code.num_defect_sites();
    if let Some(&bad) = parsed.defects.iter().find(|&&s| s >= sites) {
        bail!("defect index {bad} out of range (d={d} has {sites} sites per side)");
    }
    let syndrome = Syndrome::new(parsed.side, parsed.defects);
    let (correction, diagnostics) = match kind {
        DecoderKind::Bc => {
            let (c, report) = BubbleDecoder::new(code.clone(), config).decode_with_report(&syndrome)?;
            (c, Some(report))
        }
        other => (Decoder::new(other, code.clone(), config).decode(&syndrome)?, None),
    };
    to_json(&DecodeOutput {
        schema: DECODE_SCHEMA,
        d,
        side: syndrome.side,
        decoder: decoder_label(kind, &config),
        weight: correction.len(),
        correction: correction.into_vec(),
        diagnostics,
    })
}

/// Exhaustive when the pattern count fits, else `samples` random patterns.
fn budget_for(total: u128, samples: u64, seed: u64) -> Budget {
    if total <= EXHAUSTIVE_LIMIT {
        Budget::Exhaustive
    } else {
        Budget::Sampled { samples, seed }
    }
}

fn verify(
    code: &SurfaceCode,
    kind: DecoderKind,
    config: BcConfig,
    samples: u64,
    seed: u64,
) -> anyhow::Result<(Vec<SuiteResult>, Vec<BetaEstimate>)> {
    let n = code.num_qubits();
    let t = code.t();
    let label = decoder_label(kind, &config);
    let mut decoder = Decoder::new(kind, code.clone(), config);
    let mut suites = Vec::new();

    let total: u128 = (1..=t).map(|w| 2 * binomial(n, w)).sum();
    suites.push(distance_preservation(
        &mut decoder,
        &label,
        &Side::BOTH,
        t,
        budget_for(total, samples, seed),
    )?);

    if kind == DecoderKind::Bc {
        for ell in 1..=3 {
            let total = binomial(n, t + ell - 1);
            suites.extend(cluster_count_suite(
                code,
                config,
                &[ell],
                budget_for(total, samples, seed),
            )?);
        }
    }

    let mut betas = Vec::new();
    for w in 1..=t + 2 {
        let budget = budget_for(binomial(n, w), samples, seed.wrapping_add(w as u64));
        match beta_fraction(&mut decoder, &label, w, budget) {
            Ok(b) => betas.push(b),
            // The exact matcher cannot take every high-weight syndrome.
            Err(bubblecode_core::Error::Capacity { .. }) if kind == DecoderKind::Mwpm => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok((suites, betas))
}

fn beta_csv(rows: &[BetaEstimate]) -> String {
    let mut out = String::from("d,w,decoder,beta,ci_low,ci_high,patterns\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.d, r.w, r.decoder, r.beta, r.ci_low, r.ci_high, r.patterns
        );
    }
    out
}

fn beta_json(rows: &[BetaEstimate]) -> anyhow::Result<String> {
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            serde_json::json!({
                "d": r.d, "w": r.w, "decoder": r.decoder, "beta": r.beta,
                "ci_low": r.ci_low, "ci_high": r.ci_high, "patterns": r.patterns,
            })
        })
        .collect();
    to_json(&serde_json::json!({ "schema": BETA_SCHEMA, "rows": rows }))
}
