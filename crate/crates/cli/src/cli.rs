//! Command-line surface: `fit`, `verify`, `gen` and `bench`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use stepfit::generate::{generate, ShapeProfile, WeightProfile};
use stepfit::geom::set_cost;
use stepfit::oracle::oracle_k_step;
use stepfit::{k_step, CostModel};

use crate::io::{load_instance, to_csv, Format, Instance};
use crate::output::FitOutput;
use crate::svg::render_svg;

#[derive(Parser)]
#[command(
    name = "stepfit",
    version,
    about = "Minimax k-step fitting of weighted points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Prune,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Tsv,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a k-step function to an instance file.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Step count; optional when the JSON instance names one.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<CostModel>,
        #[arg(long, value_enum, default_value = "prune")]
        engine: Engine,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        /// Relative tolerance for checking the reported cost against the fit.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve with both engines and compare the costs.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        model: Option<CostModel>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Write a seeded random instance as CSV.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "uniform")]
        weights: WeightProfile,
        #[arg(long, default_value = "random")]
        profile: ShapeProfile,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the solver on generated instances of growing size.
    Bench {
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value = "uniform")]
        weights: WeightProfile,
        #[arg(long, default_value = "random")]
        profile: ShapeProfile,
    },
}

fn load(
    input: &Path,
    k: Option<usize>,
    model: Option<CostModel>,
) -> Result<(Instance, usize, CostModel), Failure> {
    let inst = load_instance(input, Format::from_path(input))
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let k = k
        .or(inst.k)
        .ok_or_else(|| Failure::Usage("--k is required unless the instance names k".into()))?;
    let model = model.or(inst.model).unwrap_or_default();
    Ok((inst, k, model))
}

enum Failure {
    /// Bad input or arguments: exit 2.
    Usage(String),
    /// Solver disagreement or failed check: exit 1.
    Check(String),
}

fn agree(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    let solver = |e: stepfit::FitError| Failure::Usage(e.to_string());
    match cmd {
        Command::Fit {
            input,
            k,
            model,
            engine,
            format,
            tolerance,
            out,
        } => {
            let (inst, k, model) = load(&input, k, model)?;
            let p = &inst.points;
            let fit = match engine {
                Engine::Prune => FitOutput::from_report(&k_step(p, k, model).map_err(solver)?),
                Engine::Oracle => {
                    let (f, c) = oracle_k_step(p, k, model);
                    FitOutput::from_oracle(p, &f, c)
                }
            };
            let text = match format {
                OutFormat::Json => fit.to_json() + "\n",
                OutFormat::Tsv => fit.to_tsv(),
                OutFormat::Svg => render_svg(&fit, p, model),
            };
            emit(&out, &text, stdout)?;
            let segs = fit
                .segments
                .iter()
                .map(|s| stepfit::Segment {
                    x_left: s.x_left,
                    x_right: s.x_right,
                    y: s.y,
                })
                .collect();
            let actual = set_cost(p, &stepfit::StepFunction::new(segs).map_err(solver)?, model)
                .map_err(solver)?;
            if !agree(actual, fit.cost, tolerance) {
                return Err(Failure::Check(format!(
                    "reported cost {} but the fit costs {actual}",
                    fit.cost
                )));
            }
            Ok(())
        }
        Command::Verify {
            input,
            k,
            model,
            tolerance,
        } => {
            let (inst, k, model) = load(&input, k, model)?;
            let prune = k_step(&inst.points, k, model).map_err(solver)?.cost;
            let (_, oracle) = oracle_k_step(&inst.points, k, model);
            let line = format!("prune={prune} oracle={oracle}");
            if agree(prune, oracle, tolerance) {
                writeln!(stdout, "{line} agree").map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(())
            } else {
                Err(Failure::Check(format!("{line} disagree")))
            }
        }
        Command::Gen {
            n,
            k,
            seed,
            weights,
            profile,
            out,
        } => emit(
            &out,
            &to_csv(&generate(n, k, seed, weights, profile)),
            stdout,
        ),
        Command::Bench {
            k,
            sizes,
            seed,
            trials,
            weights,
            profile,
        } => {
            if trials == 0 {
                return Err(Failure::Usage("--trials must be positive".into()));
            }
            let mut w =
                |s: String| writeln!(stdout, "{s}").map_err(|e| Failure::Usage(e.to_string()));
            w("n\tmedian_ms\tratio".into())?;
            let mut prev: Option<f64> = None;
            for &n in &sizes {
                let mut times = Vec::with_capacity(trials);
                for t in 0..trials {
                    let p = generate(n, k, seed + t as u64, weights, profile);
                    let start = Instant::now();
                    k_step(&p, k, CostModel::Linear).map_err(solver)?;
                    times.push(start.elapsed().as_secs_f64() * 1e3);
                }
                let m = median(&mut times);
                let ratio = prev.map_or("-".to_string(), |q| format!("{:.3}", m / q));
                w(format!("{n}\t{m:.3}\t{ratio}"))?;
                prev = Some(m);
            }
            Ok(())
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            1
        }
    }
}
