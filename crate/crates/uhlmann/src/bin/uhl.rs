use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use uhlmann::clifford::{gamma_rep, RepKind};
use uhlmann::gates::iswap_synthesize;
use uhlmann::holonomy::{left_right_duality_check, loop_anholonomy, Bivector, LoopChart, LoopSpec};
use uhlmann::interference::{interference_observables, total_anholonomy, uniform_grid, InterferenceResult};
use uhlmann::output::{curve_csv, fmt_f64, to_json};
use uhlmann::tfd::{ball_from_half, rho_ball};
use uhlmann::validate::{validate, ValidateConfig, DEFAULT_SEED};
use uhlmann::UhlError;

#[derive(Parser, Debug)]
#[command(name = "uhl", version, about = "Uhlmann transport, anholonomy and interference laboratory")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Number of qubits
    #[arg(long = "n", global = true)]
    n: Option<usize>,
    /// Gamma representation
    #[arg(long, global = true, value_parser = parse_rep)]
    rep: Option<RepKind>,
    /// RNG seed, decimal or 0x-prefixed hex
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Tolerance multiplier
    #[arg(long, global = true, default_value_t = 1.0)]
    tol: f64,
    /// Input file or inline JSON
    #[arg(long, global = true)]
    input: Option<String>,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the oracle-versus-closed-form suites
    Validate {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        smoke: bool,
    },
    /// Anholonomy of a piecewise-geodesic loop
    Loop {
        #[arg(long)]
        check_duality: bool,
    },
    /// Interference visibility and phase shift
    Interfere {
        /// Gauge angle χ
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<f64>,
        /// Rapidity of the segment preparation when no input is given
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        /// Number of χ̃ samples
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Four-triangle iSWAP synthesis
    SynthIswap {
        #[arg(long, value_parser = parse_pair, default_value = "1,2")]
        pair: (usize, usize),
        /// Rapidity fixing the vertex radius tanh(β/2)
        #[arg(long, allow_hyphen_values = true)]
        beta_override: Option<f64>,
    },
}

fn parse_rep(s: &str) -> Result<RepKind, String> {
    s.parse::<RepKind>().map_err(|e| e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16).map_err(|e| e.to_string()),
        None => s.parse::<u64>().map_err(|e| e.to_string()),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected i,j")?;
    Ok((a.trim().parse().map_err(|_| "bad qubit index")?, b.trim().parse().map_err(|_| "bad qubit index")?))
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<UhlError> for Failure {
    fn from(e: UhlError) -> Self {
        Failure::Numeric(e.to_string())
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn read_input(input: &Option<String>) -> Result<Option<String>, Failure> {
    match input {
        None => Ok(None),
        Some(s) if s.trim_start().starts_with('{') => Ok(Some(s.clone())),
        Some(path) => std::fs::read_to_string(path).map(Some).map_err(|e| Failure::Config(format!("{path}: {e}"))),
    }
}

fn emit(global: &Global, text: &str) -> Result<(), Failure> {
    match &global.output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    to_json(v).map_err(|e| Failure::Numeric(e.to_string()))
}

fn cmd_validate(g: &Global, suite: Option<String>, smoke: bool) -> Result<bool, Failure> {
    let n = g.n.unwrap_or(2);
    if !(1..=4).contains(&n) {
        return Err(Failure::Config(format!("--n {n} outside 1..=4")));
    }
    if let Some(s) = &suite {
        if !uhlmann::validate::SUITES.contains(&s.as_str()) {
            return Err(Failure::Config(format!("unknown suite {s}")));
        }
    }
    if g.tol.is_nan() || g.tol <= 0.0 {
        return Err(Failure::Config("--tol must be positive".into()));
    }
    let cfg = ValidateConfig {
        n,
        rep: g.rep.unwrap_or(RepKind::Recursive),
        seed: g.seed.unwrap_or(DEFAULT_SEED),
        tol_scale: g.tol,
        smoke,
        suite,
    };
    let report = validate(&cfg)?;
    let text = match g.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut out = String::from("suite,check,cases,value,bound,tolerance,pass\n");
            for s in &report.suites {
                for c in &s.checks {
                    let bound = if c.bound == uhlmann::validate::Bound::AtMost { "at_most" } else { "at_least" };
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        s.name,
                        c.name,
                        c.cases,
                        fmt_f64(c.value),
                        bound,
                        fmt_f64(c.tolerance),
                        c.pass
                    ));
                }
            }
            out
        }
    };
    emit(g, &text)?;
    Ok(report.pass)
}

fn override_spec(g: &Global, mut spec: LoopSpec) -> LoopSpec {
    if let Some(n) = g.n {
        spec.n = n;
    }
    if let Some(r) = g.rep {
        spec.rep = r;
    }
    spec
}

#[derive(Serialize)]
struct LoopOutput {
    #[serde(rename = "N")]
    n: usize,
    rep: RepKind,
    dim: usize,
    unitary: Vec<[f64; 2]>,
    delta: f64,
    bivector: Option<Bivector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duality_residual: Option<f64>,
}

fn cmd_loop(g: &Global, check_duality: bool) -> Result<bool, Failure> {
    let text = read_input(&g.input)?.ok_or_else(|| Failure::Config("loop requires --input".into()))?;
    let spec: LoopSpec = serde_json::from_str(&text).map_err(config)?;
    let spec = override_spec(g, spec);
    let rep = gamma_rep(spec.n, spec.rep).map_err(config)?;
    spec.half_angle_vertices().map_err(config)?;
    let res = loop_anholonomy(&spec).map_err(|e| match e {
        UhlError::OpenLoop => config(e),
        other => Failure::from(other),
    })?;
    let mut ok = true;
    let duality_residual = if check_duality {
        let r = left_right_duality_check(&spec)?;
        ok = r <= 1e-9 * g.tol;
        Some(r)
    } else {
        None
    };
    let out = LoopOutput {
        n: spec.n,
        rep: spec.rep,
        dim: rep.dim(),
        unitary: res.unitary.entries().iter().map(|z| [z.re, z.im]).collect(),
        delta: res.delta,
        bivector: res.bivector,
        duality_residual,
    };
    emit(g, &json(&out)?)?;
    Ok(ok)
}

/// Interference configuration: an anchor, a loop starting at it and the gauge angle.
#[derive(Deserialize)]
struct InterfereSpec {
    anchor: Vec<f64>,
    #[serde(rename = "loop")]
    loop_spec: LoopSpec,
    #[serde(default)]
    chi: f64,
    #[serde(default)]
    grid: Option<usize>,
}

fn cmd_interfere(g: &Global, chi: Option<f64>, beta: f64, grid: usize) -> Result<bool, Failure> {
    let (anchor, spec, chi, grid) = match read_input(&g.input)? {
        Some(text) => {
            let s: InterfereSpec = serde_json::from_str(&text).map_err(config)?;
            let spec = override_spec(g, s.loop_spec);
            let anchor = match spec.chart {
                LoopChart::HalfAngle => s.anchor,
                LoopChart::Ball => uhlmann::tfd::half_from_ball(&s.anchor),
            };
            (anchor, spec, chi.unwrap_or(s.chi), s.grid.unwrap_or(grid))
        }
        None => {
            let n = g.n.unwrap_or(1);
            let rep = g.rep.unwrap_or(RepKind::Recursive);
            if beta.is_nan() || beta < 0.0 {
                return Err(Failure::Config("--beta must be non-negative".into()));
            }
            let mut a = vec![0.0; 2 * n + 1];
            a[0] = -(beta / 2.0).tanh();
            (a.clone(), LoopSpec::half_angle(n, rep, vec![a]), chi.unwrap_or(0.0), grid)
        }
    };
    if grid == 0 {
        return Err(Failure::Config("--grid must be positive".into()));
    }
    let rep = gamma_rep(spec.n, spec.rep).map_err(config)?;
    spec.half_angle_vertices().map_err(config)?;
    let big_u = total_anholonomy(chi, &anchor, &spec)?;
    let rho = rho_ball(&ball_from_half(&anchor), &rep)?;
    let res: InterferenceResult = interference_observables(&big_u, &rho)?.with_curve(&uniform_grid(grid));
    let text = match g.format {
        Format::Json => json(&res)?,
        Format::Csv => curve_csv(res.curve.as_deref().unwrap_or(&[])),
    };
    emit(g, &text)?;
    Ok(res.visibility <= 1.0 + 1e-12)
}

fn cmd_synth(g: &Global, pair: (usize, usize), beta: Option<f64>) -> Result<bool, Failure> {
    if let Some(n) = g.n {
        if n != 3 {
            return Err(Failure::Config(format!("synth-iswap requires --n 3, got {n}")));
        }
    }
    if let Some(r) = g.rep {
        if r != RepKind::JordanWigner {
            return Err(Failure::Config("synth-iswap requires the jordan_wigner representation".into()));
        }
    }
    if !matches!(pair, (1, 2) | (2, 3)) {
        return Err(Failure::Config(format!("unsupported qubit pair {},{}", pair.0, pair.1)));
    }
    let plan = iswap_synthesize(pair, beta.map(|b| (b / 2.0).tanh()))?;
    emit(g, &json(&plan)?)?;
    Ok(plan.phase_error < 1e-10 * g.tol)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let outcome = match cli.command {
        Command::Validate { suite, smoke } => cmd_validate(g, suite, smoke),
        Command::Loop { check_duality } => cmd_loop(g, check_duality),
        Command::Interfere { chi, beta, grid } => cmd_interfere(g, chi, beta, grid),
        Command::SynthIswap { pair, beta_override } => cmd_synth(g, pair, beta_override),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
