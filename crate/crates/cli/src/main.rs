use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qadv_core::divergences::beta_eps;
use qadv_core::harness::io::{read_state, PairModel, PairSpec};
use qadv_core::harness::{
    instance_spec, stein_experiment, verify_example1, write_csv, ExperimentOptions, Inputs, Setting,
};
use qadv_core::optimize::{cq_informed_divergence, cq_pair_divergence, minimize_inf, minimize_informed, DEFAULT_TOL};
use qadv_core::{Divergence, Error, Result};

#[derive(Parser)]
#[command(name = "qadv", version, about = "Adversarial channel discrimination: divergences, tests and Stein tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// min_ρ D(N1(ρ)‖N2(ρ))
    Informed,
    /// min_{ρ,σ} D(N1(ρ)‖N2(σ))
    Inf,
    /// min_x D(ρ_{1,x}‖ρ_{2,x})
    CqInformed,
    /// min_{p,q} D(W1(p)‖W2(q))
    CqPair,
}

#[derive(Clone, Copy, ValueEnum)]
enum SettingArg {
    Informed,
    Noninformed,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputsArg {
    Iid,
    General,
}

#[derive(Subcommand)]
enum Command {
    /// Single-letter channel divergence of a channel pair.
    Divergence {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Report in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Smallest type-II error at type-I error ε for two states.
    Beta {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long)]
        bits: bool,
    },
    /// Finite-n Stein exponent table as CSV.
    Stein {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_enum)]
        setting: SettingArg,
        #[arg(long, value_enum, default_value = "iid")]
        inputs: InputsArg,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        /// Comma-separated copy numbers.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        n: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in checks on a named instance.
    Verify { instance: String },
    /// Write a named instance as a channel-pair file.
    Export {
        instance: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn number(d: Divergence, bits: bool) -> Value {
    let v = if bits { d.to_bits() } else { d.value() };
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn unit(bits: bool) -> &'static str {
    if bits {
        "bits"
    } else {
        "nats"
    }
}

fn matrix_json(h: &qadv_core::HermitianMatrix) -> Value {
    json!(qadv_core::harness::io::matrix_to_json(h.matrix()))
}

fn divergence(pair: PathBuf, kind: Kind, tol: f64, bits: bool) -> Result<Value> {
    let model = PairSpec::read(pair)?.load()?;
    let out = match (kind, model) {
        (Kind::Informed, PairModel::Quantum(n1, n2)) => {
            let r = minimize_informed(&n1, &n2, tol)?;
            json!({
                "value": number(r.value, bits),
                "iterations": r.iterations,
                "gap": r.gap,
                "converged": r.converged,
                "argmin": r.argument.map(|s| matrix_json(s.as_hermitian())),
            })
        }
        (Kind::Inf, PairModel::Quantum(n1, n2)) => {
            let r = minimize_inf(&n1, &n2, tol)?;
            let (rho, sigma) = match r.argument {
                Some((a, b)) => (Some(matrix_json(a.as_hermitian())), Some(matrix_json(b.as_hermitian()))),
                None => (None, None),
            };
            json!({
                "value": number(r.value, bits),
                "iterations": r.iterations,
                "gap": r.gap,
                "converged": r.converged,
                "rho": rho,
                "sigma": sigma,
            })
        }
        (Kind::CqInformed, PairModel::Classical(w1, w2)) => {
            let r = cq_informed_divergence(&w1, &w2)?;
            json!({ "value": number(r.value, bits), "symbol": r.symbol })
        }
        (Kind::CqPair, PairModel::Classical(w1, w2)) => {
            let r = cq_pair_divergence(&w1, &w2, tol)?;
            let (p, q) = match r.argument {
                Some((p, q)) => (Some(p.weights().to_vec()), Some(q.weights().to_vec())),
                None => (None, None),
            };
            json!({
                "value": number(r.value, bits),
                "iterations": r.iterations,
                "gap": r.gap,
                "converged": r.converged,
                "p": p,
                "q": q,
            })
        }
        (Kind::Informed | Kind::Inf, PairModel::Classical(..)) => {
            return Err(Error::Validation("this kind needs a kraus or eb channel pair".into()))
        }
        (Kind::CqInformed | Kind::CqPair, PairModel::Quantum(..)) => {
            return Err(Error::Validation("this kind needs a cq channel pair".into()))
        }
    };
    let mut out = out;
    out["unit"] = json!(unit(bits));
    Ok(out)
}

fn beta(rho: PathBuf, sigma: PathBuf, eps: f64, bits: bool) -> Result<Value> {
    let r = beta_eps(&read_state(rho)?, &read_state(sigma)?, eps)?;
    Ok(json!({
        "beta": r.beta,
        "dh": number(r.dh, bits),
        "unit": unit(bits),
        "threshold": r.threshold,
        "boundaryWeight": r.boundary_weight,
    }))
}

fn print_json(v: &Value) -> Result<()> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, v)?;
    writeln!(stdout)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Divergence { pair, kind, tol, bits } => print_json(&divergence(pair, kind, tol, bits)?)?,
        Command::Beta { rho, sigma, eps, bits } => print_json(&beta(rho, sigma, eps, bits)?)?,
        Command::Stein { pair, setting, inputs, eps, n, tol, out } => {
            let spec = PairSpec::read(pair)?;
            let setting = match setting {
                SettingArg::Informed => Setting::Informed,
                SettingArg::Noninformed => Setting::Noninformed,
            };
            let inputs = match inputs {
                InputsArg::Iid => Inputs::Iid,
                InputsArg::General => Inputs::General,
            };
            let options = ExperimentOptions { tol, ..Default::default() };
            let rows = stein_experiment(&spec, setting, inputs, eps, &n, options)?;
            match out {
                Some(path) => write_csv(&rows, BufWriter::new(File::create(path)?))?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::Verify { instance } => {
            if instance != "example1" {
                return Err(Error::Validation(format!(
                    "no checks for {instance:?}; available: example1"
                )));
            }
            let checks = verify_example1()?;
            let mut all = true;
            for c in &checks {
                all &= c.passed;
                let mark = if c.passed { "PASS" } else { "FAIL" };
                println!("[{mark}] {}: {}", c.name, c.detail);
            }
            return Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Export { instance, out } => {
            let spec = instance_spec(&instance)?;
            match out {
                Some(path) => spec.write(path)?,
                None => println!("{}", spec.to_json()?),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qadv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
