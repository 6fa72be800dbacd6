use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bagminhash::harness::{canonical_case, canonical_cases, run_benchmark, run_verification, BenchReport, TestCase};
use bagminhash::signatures::codec;
use bagminhash::{
    bbit_transform, bbit_transform_icws, estimate, sign, Algorithm, ExpSampler, GridDescriptor, RngConfig, Signature,
    WeightDiscretization, WeightedBag,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "bagminhash", version, about = "Weighted minwise hashing signatures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Binary,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the signature of a bag read from a text file.
    Sign {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        m: usize,
        /// binary, f32, geometric:v1,eps,K or explicit:v0,v1,...
        #[arg(long)]
        grid: Option<GridDescriptor>,
        /// Reduce every component to this many bits.
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "binary")]
        format: Format,
        #[arg(long, default_value = "ziggurat")]
        sampler: ExpSampler,
    },
    /// Estimate the weighted Jaccard similarity of two signature files.
    Estimate {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Run a z-score verification of an algorithm on a test case.
    Verify {
        #[arg(long)]
        algo: Algorithm,
        /// Name of a built-in case or path to a file of tab-separated weight pairs.
        #[arg(long)]
        case: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        n_examples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        grid: Option<GridDescriptor>,
        #[arg(long, default_value_t = 3.5)]
        threshold: f64,
        #[arg(long, default_value = "ziggurat")]
        sampler: ExpSampler,
    },
    /// Time signature computations on random bags and print CSV.
    Bench {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        m: usize,
        /// Bag sizes, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        grid: Option<GridDescriptor>,
        #[arg(long, default_value = "ziggurat")]
        sampler: ExpSampler,
        /// Feed elements in order of decreasing weight.
        #[arg(long)]
        descending: bool,
    },
    /// List the built-in verification cases.
    Cases,
}

/// Binary grid for the algorithms that enumerate levels, `f32` otherwise.
fn resolve_grid(algo: Algorithm, grid: Option<GridDescriptor>) -> Result<WeightDiscretization> {
    let descriptor = grid.unwrap_or(match algo {
        Algorithm::Naive | Algorithm::Enhanced => GridDescriptor::Binary,
        _ => GridDescriptor::F32,
    });
    Ok(WeightDiscretization::from_descriptor(&descriptor)?)
}

fn read_signature(path: &Path) -> Result<Signature> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    codec::decode_any(&bytes).with_context(|| format!("decoding {}", path.display()))
}

fn load_case(spec: &str) -> Result<TestCase> {
    if let Some(case) = canonical_case(spec) {
        return Ok(case);
    }
    let path = Path::new(spec);
    if !path.exists() {
        let names: Vec<String> = canonical_cases().into_iter().map(|c| c.name).collect();
        bail!("unknown test case {spec:?}; built-in cases are {}", names.join(", "));
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_stem().map_or_else(|| spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(TestCase::parse(name, &text)?)
}

#[derive(Serialize)]
struct EstimateOutput {
    matches: usize,
    m: usize,
    estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrected_estimate: Option<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    empty_inputs: bool,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Sign { algo, m, grid, b, input, output, format, sampler } => {
            let grid = resolve_grid(algo, grid)?;
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let bag = WeightedBag::parse(&text).with_context(|| format!("parsing {}", input.display()))?;
            let mut sig = sign(algo, &bag, &grid, m, RngConfig::new(sampler))?;
            if let Some(b) = b {
                sig = match &sig {
                    Signature::Real(s) => bbit_transform(s, b)?.into(),
                    Signature::Icws(s) => bbit_transform_icws(s, b)?.into(),
                    Signature::Bbit(_) => unreachable!("sign returns unreduced signatures"),
                };
            }
            let bytes = match format {
                Format::Binary => codec::encode(&sig),
                Format::Json => (codec::to_json(&sig) + "\n").into_bytes(),
            };
            fs::write(&output, bytes).with_context(|| format!("writing {}", output.display()))?;
        }
        Command::Estimate { a, b } => {
            let sig_a = read_signature(&a)?;
            let sig_b = read_signature(&b)?;
            let result = estimate(&sig_a, &sig_b)?;
            let raw = result.matches as f64 / result.m as f64;
            let out = EstimateOutput {
                matches: result.matches,
                m: result.m,
                estimate: raw,
                corrected_estimate: matches!(sig_a, Signature::Bbit(_)).then_some(result.value),
                empty_inputs: result.empty_inputs,
            };
            writeln!(stdout, "{}", serde_json::to_string(&out)?)?;
        }
        Command::Verify { algo, case, m, n_examples, seed, grid, threshold, sampler } => {
            let grid = resolve_grid(algo, grid)?;
            let tc = load_case(&case)?;
            let report = run_verification(algo, &tc, &grid, m, n_examples, seed, RngConfig::new(sampler))?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
            if report.z.is_nan() || report.z.abs() > threshold {
                eprintln!("|z| = {:.3} exceeds the threshold {threshold}", report.z.abs());
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench { algo, m, n, reps, seed, grid, sampler, descending } => {
            let grid = resolve_grid(algo, grid)?;
            writeln!(stdout, "{}", BenchReport::CSV_HEADER)?;
            for n in n {
                let report = run_benchmark(algo, &grid, m, n, reps, seed, RngConfig::new(sampler), descending)?;
                writeln!(stdout, "{}", report.csv_row())?;
                stdout.flush()?;
            }
        }
        Command::Cases => {
            for case in canonical_cases() {
                writeln!(stdout, "{}\tn={}\tJ={}", case.name, case.pairs.len(), case.expected_jaccard())?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
