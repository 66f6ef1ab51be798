//! `disc-defect` command-line front end.

mod experiments;
mod output;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::experiments::Outcome;
use crate::output::{error_report, write_plots, Report};

#[derive(Parser, Debug)]
#[command(name = "disc-defect", version, about = "Defect of analytic discs attached to CR manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Manifold spec, e.g. `quadric:n=2` or `prop1:k=3`.
    #[arg(long, global = true)]
    manifold: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,
    #[arg(long, global = true, default_value_t = 2)]
    nu: u32,
    /// Size of the linear w-part `eps (sigma - 1)` of solved discs.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Working degree of the Bishop solver.
    #[arg(long, global = true, default_value_t = 64)]
    degree: usize,
    /// Fixed-point tolerance of the Bishop solver.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write singular-value spectra as SVG files.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq)]
enum Command {
    /// T0 and T1 identities on seeded random polynomials.
    TransformsCheck,
    /// Mean-value and principal-value identities.
    Identities,
    /// Solve Bishop's equation and the G-matrix equations.
    BishopSolve,
    /// Defect through the conormal frame.
    Defect,
    /// Defect against Tumanov's space V_phi.
    Vphi,
    /// Dimension of V_f for f = sigma^s and seeded perturbations.
    VfDim {
        #[arg(long, allow_hyphen_values = true)]
        winding: i64,
    },
    /// Winding bound on the defect of hypersurface discs.
    Bound,
    /// Kernel of the discretized Fredholm operator.
    Fredholm,
    /// Codimension of the evaluation image against the defect.
    Theorem2,
    /// Defect of (zeta, 0) on Re(z1^k z2) = 0.
    Prop1,
    /// Codimension-two example with defect zero.
    Counterexample,
    /// Every acceptance criterion.
    Suite,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::TransformsCheck => "transforms-check",
            Command::Identities => "identities",
            Command::BishopSolve => "bishop-solve",
            Command::Defect => "defect",
            Command::Vphi => "vphi",
            Command::VfDim { .. } => "vf-dim",
            Command::Bound => "bound",
            Command::Fredholm => "fredholm",
            Command::Theorem2 => "theorem2",
            Command::Prop1 => "prop1",
            Command::Counterexample => "counterexample",
            Command::Suite => "suite",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a report.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub manifold: Option<String>,
    pub k: u32,
    pub nu: u32,
    pub eps: Option<f64>,
    pub degree: usize,
    pub tol: f64,
    pub seed: u64,
    pub winding: Option<i64>,
    pub format: Format,
}

impl ExperimentConfig {
    fn from_cli(cli: &Cli) -> Self {
        ExperimentConfig {
            command: cli.command.name().to_string(),
            manifold: cli.manifold.clone(),
            k: cli.k,
            nu: cli.nu,
            eps: cli.eps,
            degree: cli.degree,
            tol: cli.tol,
            seed: cli.seed,
            winding: match cli.command {
                Command::VfDim { winding } => Some(winding),
                _ => None,
            },
            format: cli.format,
        }
    }

    fn validate(&self) -> disc_defect::Result<()> {
        let bad = |msg: &str| Err(disc_defect::Error::PreconditionViolated(msg.into()));
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad("--tol must lie in (0, 1)");
        }
        if self.degree < 4 {
            return bad("--degree must be at least 4");
        }
        if self.eps.is_some_and(|e| !(e.is_finite() && e > 0.0)) {
            return bad("--eps must be positive");
        }
        if self.nu == 0 {
            return bad("--nu must be positive");
        }
        if let Some(spec) = &self.manifold {
            disc_defect::manifold::parse_manifold(spec)?;
        }
        Ok(())
    }
}

fn run(cmd: Command, cfg: &ExperimentConfig) -> disc_defect::Result<Outcome> {
    use experiments as e;
    match cmd {
        Command::TransformsCheck => e::transforms_check(cfg),
        Command::Identities => e::identities(cfg),
        Command::BishopSolve => e::bishop_solve(cfg),
        Command::Defect => e::defect(cfg),
        Command::Vphi => e::vphi(cfg),
        Command::VfDim { winding } => e::vf_dim(cfg, winding),
        Command::Bound => e::bound(cfg),
        Command::Fredholm => e::fredholm(cfg),
        Command::Theorem2 => e::theorem2(cfg),
        Command::Prop1 => e::prop1(cfg),
        Command::Counterexample => e::counterexample(cfg),
        Command::Suite => suite::run(cfg),
    }
}

/// Exit code and console text of one invocation.
struct Execution {
    code: u8,
    stdout: String,
    stderr: String,
}

impl Execution {
    fn new(code: u8, stdout: String) -> Self {
        Execution {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

/// Writes `text` to `out`, or returns it for the console.
fn emit(text: String, out: Option<&PathBuf>) -> std::io::Result<String> {
    match out {
        Some(path) => std::fs::write(path, text).map(|_| String::new()),
        None => Ok(text),
    }
}

fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => return Execution::new(0, err.to_string()),
        Err(err) => return Execution::new(2, error_report("invalid_arguments", err.to_string().trim())),
    };
    let io_error = |err: &dyn std::fmt::Display| Execution::new(2, error_report("io", &err.to_string()));
    let cfg = ExperimentConfig::from_cli(&cli);
    let outcome = match cfg.validate().and_then(|_| run(cli.command, &cfg)) {
        Ok(o) => o,
        Err(err) => {
            let text = error_report(err.kind(), &err.to_string());
            return match emit(text, cli.out.as_ref()) {
                Ok(stdout) => Execution::new(2, stdout),
                Err(e) => io_error(&e),
            };
        }
    };
    let text = match cli.format {
        Format::Json => Report::new(&cfg, &outcome).to_json(),
        Format::Csv => output::to_csv(cli.command.name(), &outcome),
    };
    let stdout = match emit(text, cli.out.as_ref()) {
        Ok(s) => s,
        Err(e) => return io_error(&e),
    };
    if cli.plot {
        if let Err(e) = write_plots(cli.out.as_deref(), cli.command.name(), &outcome.spectra) {
            return io_error(&e);
        }
    }
    match outcome.first_failure() {
        Some(name) => Execution {
            code: 1,
            stdout,
            stderr: format!("assertion failed: {name}"),
        },
        None => Execution::new(0, stdout),
    }
}

fn main() -> ExitCode {
    let e = execute(std::env::args_os());
    if !e.stdout.is_empty() {
        println!("{}", e.stdout.trim_end());
    }
    if !e.stderr.is_empty() {
        eprintln!("{}", e.stderr);
    }
    ExitCode::from(e.code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("disc-defect").chain(args.iter().copied())).unwrap()
    }

    fn exec(args: &[&str]) -> Execution {
        execute(std::iter::once("disc-defect").chain(args.iter().copied()))
    }

    fn json(e: &Execution) -> serde_json::Value {
        serde_json::from_str(&e.stdout).expect("JSON output")
    }

    #[test]
    fn negative_winding_parses() {
        let cli = parse(&["vf-dim", "--winding", "-1"]);
        assert_eq!(cli.command, Command::VfDim { winding: -1 });
        assert_eq!(ExperimentConfig::from_cli(&cli).winding, Some(-1));
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = parse(&["prop1", "--k", "3", "--format", "csv"]);
        assert_eq!(cli.k, 3);
        assert_eq!(cli.format, Format::Csv);
    }

    #[test]
    fn validation_rejects_bad_tolerance() {
        let cli = parse(&["defect", "--tol", "0"]);
        assert!(ExperimentConfig::from_cli(&cli).validate().is_err());
    }

    #[test]
    fn prop1_k3_reports_seven() {
        let e = exec(&["prop1", "--k", "3"]);
        assert_eq!(e.code, 0);
        let v = json(&e);
        assert_eq!(v["schema"], "disc-defect/1");
        assert_eq!(v["result"]["dimension"], 7);
    }

    #[test]
    fn vf_dim_negative_winding_is_zero() {
        let e = exec(&["vf-dim", "--winding", "-1"]);
        assert_eq!(e.code, 0);
        assert_eq!(json(&e)["result"]["dimension"], 0);
    }

    #[test]
    fn quadric_defect_is_zero() {
        let e = exec(&["defect", "--manifold", "quadric:n=2", "--eps", "0.1"]);
        assert_eq!(e.code, 0);
        assert_eq!(json(&e)["result"]["dimension"], 0);
    }

    #[test]
    fn validation_errors_exit_two_with_error_object() {
        for (args, kind) in [
            (&["defect", "--manifold", "torus"][..], "invalid_spec"),
            (&["defect", "--manifold", "quadric:q=1"][..], "invalid_spec"),
            (&["frobnicate"][..], "invalid_arguments"),
            (&["bishop-solve", "--manifold", "prop1:k=1"][..], "precondition_violated"),
        ] {
            let e = exec(args);
            assert_eq!(e.code, 2, "{args:?}");
            let v = json(&e);
            assert_eq!(v["schema"], "disc-defect/1");
            assert_eq!(v["error"]["kind"], kind);
        }
    }

    #[test]
    fn assertion_failure_exits_one() {
        // V_phi is compared only on small discs
        let e = exec(&["vphi", "--manifold", "flat:n=2", "--eps", "0.5"]);
        assert_eq!(e.code, 1);
        assert_eq!(json(&e)["passed"], false);
        assert!(e.stderr.contains("size proxy"));
    }

    #[test]
    fn reports_are_deterministic() {
        let strip = |mut v: serde_json::Value| {
            v.as_object_mut().unwrap().remove("generated_at");
            v
        };
        let a = strip(json(&exec(&["identities", "--seed", "3"])));
        let b = strip(json(&exec(&["identities", "--seed", "3"])));
        assert_eq!(a, b);
        let c = strip(json(&exec(&["identities", "--seed", "4"])));
        assert_ne!(a, c);
    }

    #[test]
    fn csv_output_and_plots() {
        let dir = std::env::temp_dir().join(format!("disc-defect-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("defect.csv");
        let e = exec(&[
            "defect",
            "--manifold",
            "flat:n=2",
            "--format",
            "csv",
            "--plot",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(e.code, 0);
        assert!(e.stdout.is_empty());
        let text = std::fs::read_to_string(&out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("experiment,truncation,dimension,gap_ratio,value,passed"));
        assert_eq!(lines.count(), 4);
        let svg = std::fs::read_to_string(dir.join("defect-flat_n_2.svg")).unwrap();
        assert!(svg.starts_with("<svg"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
