use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frobdet::corpus::run_corpus;
use frobdet::detrep::verify_det_power;
use frobdet::invariants::{degree_bound_check, fedder_split_test, hasse_witt, HypersurfaceSpec};
use frobdet::module::BettiData;
use frobdet::pipeline::{analyze, expected_rank, parse_input, resolve_b1, MatrixReport, Mode, PipelineOptions};
use frobdet::search::{random_search, SearchKind};
use frobdet::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "frobdet", version, about = "Determinantal representations of hypersurfaces over F_p via B^1")]
struct Cli {
    /// Write the JSON result to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Schwartz-Zippel trials before the exact determinant check
    #[arg(long, global = true, default_value_t = 16)]
    sz_trials: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    p: u32,
    #[arg(long, conflicts_with = "poly_file", required_unless_present = "poly_file")]
    poly: Option<String>,
    #[arg(long)]
    poly_file: Option<PathBuf>,
}

impl Input {
    fn text(&self) -> Result<String, Error> {
        match (&self.poly, &self.poly_file) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some(path)) => Ok(std::fs::read_to_string(path)?.trim().to_string()),
            (None, None) => Err(Error::InvalidInput("one of --poly or --poly-file is required".into())),
        }
    }

    fn spec(&self) -> Result<HypersurfaceSpec, Error> {
        parse_input(&self.text()?, self.p, None)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline (curve or hypersurface, inferred unless --mode is given)
    Analyze {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        mode: Option<Mode>,
    },
    /// Fedder's splitting test and the degree bound
    Fedder {
        #[command(flatten)]
        input: Input,
    },
    /// Hasse-Witt matrix of a plane curve
    HasseWitt {
        #[command(flatten)]
        input: Input,
    },
    /// Saturated B^1 module, minimal presentation and Betti data
    Resolve {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        twist: Option<i32>,
        /// Largest relation degree collected (in the twisted grading)
        #[arg(long)]
        max_degree: Option<i32>,
    },
    /// Check det(M) = lambda * G^r for a matrix given as JSON
    Verify {
        #[command(flatten)]
        input: Input,
        /// JSON file holding {"entries": [[...]]} or a full analyze report
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Random search for a smooth sample passing a gate
    Search {
        #[arg(long, default_value = "ordinary-curve")]
        kind: SearchKind,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        budget: usize,
    },
    /// Batch runs over case files
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    Run {
        dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Output directory (default <dir>/reports)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Mismatch { .. } | Error::DegreeIncompatible { .. } => 4,
        Error::NotPrime(_)
        | Error::Parse { .. }
        | Error::NotHomogeneous
        | Error::ZeroModP(_)
        | Error::InvalidInput(_)
        | Error::VarMismatch(..)
        | Error::NotACurve(_)
        | Error::GenusZero
        | Error::MatrixShape { .. }
        | Error::SizeCap(_)
        | Error::Io(_)
        | Error::Json(_) => 1,
        _ => 5,
    }
}

fn emit(path: Option<&Path>, value: &serde_json::Value) -> Result<(), Error> {
    if let Some(path) = path {
        std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let options = PipelineOptions { seed: cli.seed, sz_trials: cli.sz_trials, ..PipelineOptions::default() };
    let out = cli.json.as_deref();
    match &cli.command {
        Command::Analyze { input, mode } => {
            let text = input.text()?;
            let report = analyze(&text, input.p, &PipelineOptions { mode: *mode, ..options });
            println!("verdict: {}", serde_json::to_value(report.verdict)?.as_str().unwrap_or("?"));
            if let Some(reason) = &report.reason {
                println!("reason: {reason}");
            }
            if let Some(c) = &report.certificate {
                println!("matrix: {0}x{0}, det = {1} * G^{2}", c.size, c.lambda, c.r);
            }
            if let Some(b) = &report.betti {
                println!("generator degrees: {:?}", b.gen_degrees);
                println!("relation degrees: {:?}", b.rel_degrees);
                if let Some(r) = b.regularity {
                    println!("regularity of B^1: {r}");
                }
            }
            if let Some(m) = &report.matrix {
                for row in &m.entries {
                    println!("  [{}]", row.join(", "));
                }
            }
            emit(out, &serde_json::to_value(&report)?)?;
            Ok(report.exit_code() as u8)
        }
        Command::Fedder { input } => {
            let h = input.spec()?;
            let split = fedder_split_test(&h);
            let bound = degree_bound_check(&h);
            println!("fedder_split: {split}");
            println!("degree_bound_ok: {bound}");
            emit(out, &json!({ "fedder_split": split, "degree_bound_ok": bound }))?;
            Ok(0)
        }
        Command::HasseWitt { input } => {
            let h = input.spec()?;
            let hw = hasse_witt(&h)?;
            let ordinary = hw.is_invertible(h.g().fp())?;
            for row in &hw.entries {
                println!("{}", row.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
            }
            println!("ordinary: {ordinary}");
            emit(out, &json!({ "hasse_witt": hw, "ordinary": ordinary }))?;
            Ok(0)
        }
        Command::Resolve { input, twist, max_degree } => {
            let h = input.spec()?;
            let curve = Mode::infer(&h) == Mode::Curve;
            let t = twist.unwrap_or(if curve { 1 } else { 0 });
            let e_max = max_degree.unwrap_or(h.n() as i32 - t);
            let resolved = resolve_b1(&h, t, e_max)?;
            let betti = BettiData::new(&resolved.presentation, &resolved.saturated, t, expected_rank(&h));
            let matrix = MatrixReport::from(&resolved.presentation);
            println!("hilbert (untwisted): {:?}", betti.hilbert);
            println!("generator degrees: {:?}", betti.gen_degrees);
            println!("relation degrees: {:?}", betti.rel_degrees);
            for row in &matrix.entries {
                println!("  [{}]", row.join(", "));
            }
            emit(out, &json!({ "betti": betti, "matrix": matrix }))?;
            Ok(0)
        }
        Command::Verify { input, matrix } => {
            let h = input.spec()?;
            let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(matrix)?)?;
            let m: MatrixReport = serde_json::from_value(value.get("matrix").cloned().unwrap_or(value))?;
            let pres = m.to_presentation(h.p(), h.g().nvars())?;
            let cert = verify_det_power(&pres, h.g(), cli.sz_trials, cli.seed)?;
            println!("det = {} * G^{} ({}x{})", cert.lambda, cert.r, cert.size, cert.size);
            emit(out, &json!({ "certificate": cert }))?;
            Ok(0)
        }
        Command::Search { kind, p, d, n, budget } => match random_search(*kind, *p, *d, *n, cli.seed, *budget)? {
            Some(h) => {
                println!("{}", h.g());
                emit(out, &json!({ "found": true, "poly": h.g().to_string(), "p": p }))?;
                Ok(0)
            }
            None => {
                println!("no sample found within budget {budget}");
                emit(out, &json!({ "found": false }))?;
                Ok(3)
            }
        },
        Command::Corpus { action: CorpusAction::Run { dir, jobs, out: dest } } => {
            let summary = run_corpus(dir, *jobs, cli.seed, dest.as_deref(), &options)?;
            println!("{} cases", summary.total);
            for (verdict, count) in &summary.verdicts {
                println!("  {verdict}: {count}");
            }
            emit(out, &serde_json::to_value(&summary)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
