use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use freud_spline::bench::{
    export_resolution, run_fooling, run_inequalities, write_fooling_csv, write_inequalities, ExperimentConfig,
};
use freud_spline::{build_rule, emit_report, run_convergence, Error, OperatorKind};

#[derive(Parser)]
#[command(name = "freud-bench", version, about = "Convergence and inequality experiments for Freud-weighted spline operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recovery error sweep for Q, P, Qbar or Pbar.
    Recover(Common),
    /// Quadrature error sweep for the rule generated by --op.
    Integrate(Common),
    /// Marcinkiewicz, Bernstein and Nikol'skii ensemble ratios; nmin..nmax is the m range.
    Inequalities(Common),
    /// Fooling-spline witnesses; nmin..nmax is the range of point counts.
    Fooling(Common),
    /// Quadrature rule tables.
    Rule {
        #[command(subcommand)]
        action: RuleAction,
    },
}

#[derive(Subcommand)]
enum RuleAction {
    /// Writes `s,x_s,lambda_s` at resolution --m (default: the budget --nmax).
    Export(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Flat key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    d: Option<String>,
    /// Q, P, Qbar, Pbar (quad-Q and quad-P are also accepted).
    #[arg(long)]
    op: Option<String>,
    #[arg(long)]
    nmin: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Corpus function: gauss, oscil, kink<r>, poly<k>, edge, growth.
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    tol: Option<String>,
}

impl Common {
    /// Subcommand defaults, then the config file, then the flags.
    fn resolve(&self, defaults: &[(&str, &str)]) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::default();
        for (k, v) in defaults {
            cfg.set(k, v)?;
        }
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let flags = [
            ("lambda", &self.lambda),
            ("a", &self.a),
            ("b", &self.b),
            ("ell", &self.ell),
            ("p", &self.p),
            ("q", &self.q),
            ("r", &self.r),
            ("d", &self.d),
            ("op", &self.op),
            ("nmin", &self.nmin),
            ("nmax", &self.nmax),
            ("seed", &self.seed),
            ("out", &self.out),
            ("function", &self.function),
            ("rho", &self.rho),
            ("m", &self.m),
            ("tol", &self.tol),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

/// Writes to `--out` if given, otherwise to stdout.
fn write_output(out: &Option<PathBuf>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            body(&mut buf).map_err(|e| Error::Config(e.to_string()))?;
            fs::write(path, buf).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
        None => body(&mut io::stdout().lock()).map_err(|e| Error::Config(e.to_string())),
    }
}

fn convergence(cfg: ExperimentConfig) -> Result<(), Error> {
    let report = run_convergence(&cfg)?;
    match &cfg.out {
        Some(path) => {
            emit_report(&report, path)?;
            report.write_summary(&mut io::stdout().lock()).map_err(|e| Error::Config(e.to_string()))?;
            println!("wrote {}", path.display());
        }
        None => {
            let mut out = io::stdout().lock();
            report.write_csv(&mut out).map_err(|e| Error::Config(e.to_string()))?;
            report.write_summary(&mut io::stderr().lock()).map_err(|e| Error::Config(e.to_string()))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Recover(c) => {
            let cfg = c.resolve(&[])?;
            if cfg.op.is_quadrature() {
                return Err(Error::Config(format!("recover takes Q, P, Qbar or Pbar, got {}", cfg.op)));
            }
            convergence(cfg)
        }
        Command::Integrate(c) => {
            let mut cfg = c.resolve(&[])?;
            if matches!(cfg.op, OperatorKind::QBar | OperatorKind::PBar) {
                return Err(Error::Config(format!("no quadrature is generated by {}", cfg.op)));
            }
            cfg.op = cfg.op.as_quadrature();
            convergence(cfg)
        }
        Command::Inequalities(c) => {
            let cfg = c.resolve(&[("nmin", "16"), ("nmax", "256"), ("r", "3")])?;
            let results = run_inequalities(&cfg)?;
            write_output(&cfg.out, |w| write_inequalities(&results, w))?;
            for (ens, _, b) in &results {
                let status = if b.holds() { "bounded" } else { "NOT bounded" };
                eprintln!(
                    "{} p={} q={} r={}: spread {:.3}, drift slope {:.3} ({status})",
                    ens.kind, ens.p, ens.q, ens.r, b.spread, b.slope
                );
            }
            Ok(())
        }
        Command::Fooling(c) => {
            let cfg = c.resolve(&[("nmin", "8"), ("nmax", "32")])?;
            let rows = run_fooling(&cfg)?;
            write_output(&cfg.out, |w| write_fooling_csv(&rows, w))?;
            let hi = rows.iter().map(|r| r.scaled).fold(f64::MIN, f64::max);
            let lo = rows.iter().map(|r| r.scaled).fold(f64::MAX, f64::min);
            eprintln!("scaled norm spread across n: {:.3}", hi / lo);
            Ok(())
        }
        Command::Rule {
            action: RuleAction::Export(c),
        } => {
            let cfg = c.resolve(&[])?;
            let m = export_resolution(&cfg)?;
            let rule = build_rule(cfg.op.rule_kind(), m, &cfg.operator_config()?)?;
            match &cfg.out {
                Some(path) => rule.export_csv(Path::new(path)),
                None => rule.write_csv(&mut io::stdout().lock()).map_err(|e| Error::Config(e.to_string())),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("freud-bench: {e}");
            ExitCode::FAILURE
        }
    }
}
