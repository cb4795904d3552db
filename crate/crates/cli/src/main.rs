//! `pluripot`: command-line front end for capacities, extremal and Green
//! functions, Orlicz-Bergman quadrature and chain recursions.
//!
//! Exit codes: 0 on success, 2 when a built-in check fails, 1 on usage,
//! parse or computation errors.

mod cmd_capacity;
mod cmd_chain;
mod cmd_envelope;
mod cmd_orlicz_bergman;
mod io;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use io::{error_report, render, CliResult, Ctx, Format, Manifest, Outcome};

#[derive(Parser, Debug)]
#[command(name = "pluripot", version, about = "Pluripotential numerics at desk scale")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate the configuration without computing.
    #[arg(long, global = true)]
    dry_run: bool,
    /// Write a run manifest (command line, config hash, timing, verdict).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logarithmic capacity and capacity-density index sets.
    #[command(subcommand)]
    Capacity(CapacityCmd),
    /// Relative extremal and Green functions on planar grids.
    #[command(subcommand)]
    Envelope(EnvelopeCmd),
    /// Luxemburg norms and the collar dichotomy on the cusp family.
    #[command(subcommand)]
    Orlicz(OrliczCmd),
    /// Bergman kernels of the disk and annuli.
    #[command(subcommand)]
    Bergman(BergmanCmd),
    /// Admissibility and step counts of the chain recursion.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// End-to-end verifications.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum CapacityCmd {
    /// Capacity and equilibrium weights of a compact set.
    Eval {
        /// JSON file or inline JSON: {"intervals":[[l,r],...],"points":[...]} or {"components":[...]}.
        #[arg(long)]
        set: String,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },
    /// Index set of a capacity-density condition at a boundary point.
    Density {
        #[arg(long = "def", value_parser = ["carleson", "gamma"])]
        definition: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 0.0625)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 20)]
        nmax: u32,
        /// Interval set for the annular definition (default: the slit set).
        #[arg(long)]
        set: Option<String>,
        /// Domain for the gamma definition (default: D(0, 3) minus the slit set).
        #[arg(long)]
        domain: Option<String>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Two-sided density check on the slit disk.
    VerifyExample5(Example5Args),
}

#[derive(Args, Debug)]
struct Example5Args {
    #[arg(long, default_value_t = 20)]
    nmax: u32,
    #[arg(long, default_value_t = 16)]
    samples: usize,
    #[arg(long)]
    nodes: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum EnvelopeCmd {
    /// Relative extremal function of a closed ball.
    Extremal {
        /// `disk`, `annulus:R`, `appendix` (the slit disk), or a JSON domain.
        #[arg(long)]
        domain: String,
        /// `center,radius`, e.g. `0.5i,0.2`.
        #[arg(long, allow_hyphen_values = true)]
        ball: String,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Green function with a pole.
    Green {
        #[arg(long)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        pole: String,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Comparison inequalities between extremal and Green functions.
    Check {
        #[arg(long, value_parser = ["2.1", "2.2", "blocki"])]
        lemma: String,
        /// JSON parameters (domain, h, ball, w, eps, r, pairs, alpha, levels, tol).
        #[arg(long)]
        params: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum OrliczCmd {
    /// Luxemburg norm of a function.
    Norm {
        /// JSON function spec, e.g. {"kind":"reciprocal_z"}.
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// `disk`, `annulus:R` or `hartogs:S`.
        #[arg(long, default_value = "disk")]
        domain: String,
        #[arg(long, default_value_t = 64)]
        nr: usize,
        #[arg(long, default_value_t = 128)]
        nphi: usize,
    },
    /// Collar integrals of 1/|z|^2 near the cusps.
    Lemma41 {
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "1e-2,1e-3,1e-4,1e-5")]
        eps: String,
    },
}

#[derive(Subcommand, Debug)]
enum BergmanCmd {
    /// Truncated kernel at a pair of points.
    Kernel {
        /// `disk` or `annulus:R`.
        #[arg(long, default_value = "disk")]
        domain: String,
        /// Truncation order.
        #[arg(long = "M")]
        order: Option<usize>,
        /// `z,w`.
        #[arg(long, allow_hyphen_values = true)]
        probe: String,
        /// Raise the order until the value settles.
        #[arg(long)]
        auto: bool,
    },
    /// Integral of |K(., w)|^2 over sublevel sets of an exhaustion.
    Scan {
        #[arg(long, default_value = "disk")]
        domain: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        pole: String,
        /// Radius of the obstacle disk on the unit disk.
        #[arg(long, default_value_t = 0.5)]
        obstacle: f64,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long = "M")]
        order: Option<usize>,
        /// Report the fitted exponent.
        #[arg(long)]
        r_fit: bool,
    },
    /// Shell-by-shell convergence verdict for a pointwise kernel bound.
    Dyadic {
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        k0: i64,
        #[arg(long, default_value_t = 60)]
        kmax: i64,
    },
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    /// Iterate the step map until the target is passed.
    Run {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        /// Target `ln|ln delta|`.
        #[arg(long)]
        lambda_target: f64,
        #[arg(long = "L0", default_value_t = -1.0, allow_hyphen_values = true)]
        l0: f64,
        /// Constant of the index link (default 1).
        #[arg(long)]
        c_alpha: Option<f64>,
        /// Exponent of the index link (default: alpha).
        #[arg(long)]
        link_alpha: Option<f64>,
        /// JSON index certificate {"c_alpha":..,"alpha":..}.
        #[arg(long)]
        certificate: Option<String>,
        /// Number of leading and trailing L values kept in the JSON report.
        #[arg(long, default_value_t = 10)]
        keep: usize,
    },
    /// Threshold and beta-interval for (n, alpha).
    Admissible {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Two-sided density check on the slit disk.
    Example5(Example5Args),
}

fn dispatch(ctx: &Ctx, cmd: &Command) -> CliResult<Outcome> {
    use cmd_orlicz_bergman as ob;
    match cmd {
        Command::Capacity(c) => match c {
            CapacityCmd::Eval { set, nodes } => cmd_capacity::eval(ctx, set, *nodes),
            CapacityCmd::Density { definition, a, eps, lambda, gamma, nmax, set, domain, nodes } => {
                cmd_capacity::density(
                    ctx,
                    definition,
                    a,
                    *eps,
                    *lambda,
                    *gamma,
                    *nmax,
                    set.as_deref(),
                    domain.as_deref(),
                    *nodes,
                )
            }
            CapacityCmd::VerifyExample5(a) => cmd_capacity::example5(ctx, a.nmax, a.samples, a.nodes),
        },
        Command::Envelope(c) => match c {
            EnvelopeCmd::Extremal { domain, ball, h, tol } => cmd_envelope::extremal(ctx, domain, ball, *h, *tol),
            EnvelopeCmd::Green { domain, pole, h, tol } => cmd_envelope::green(ctx, domain, pole, *h, *tol),
            EnvelopeCmd::Check { lemma, params } => cmd_envelope::check(ctx, lemma, params.as_deref()),
        },
        Command::Orlicz(c) => match c {
            OrliczCmd::Norm { f, p, q, domain, nr, nphi } => ob::norm(ctx, f, *p, *q, domain, *nr, *nphi),
            OrliczCmd::Lemma41 { s, q, eps } => ob::lemma41(ctx, *s, *q, eps),
        },
        Command::Bergman(c) => match c {
            BergmanCmd::Kernel { domain, order, probe, auto } => ob::kernel(ctx, domain, *order, probe, *auto),
            BergmanCmd::Scan { domain, pole, obstacle, eps, order, r_fit } => {
                ob::scan(ctx, domain, pole, *obstacle, eps.as_deref(), *order, *r_fit)
            }
            BergmanCmd::Dyadic { c, alpha, r, q, k0, kmax } => ob::dyadic(ctx, *c, *alpha, *r, *q, *k0, *kmax),
        },
        Command::Chain(c) => match c {
            ChainCmd::Run {
                n,
                alpha,
                beta,
                c,
                c1,
                lambda_target,
                l0,
                c_alpha,
                link_alpha,
                certificate,
                keep,
            } => cmd_chain::run(
                ctx,
                &cmd_chain::RunArgs {
                    n: *n,
                    alpha: *alpha,
                    beta: *beta,
                    c: *c,
                    c1: *c1,
                    lambda: *lambda_target,
                    l0: *l0,
                    c_alpha: *c_alpha,
                    link_alpha: *link_alpha,
                    certificate: certificate.as_deref(),
                    keep: *keep,
                },
            ),
            ChainCmd::Admissible { n, alpha } => cmd_chain::admissible(ctx, *n, *alpha),
        },
        Command::Verify(VerifyCmd::Example5(a)) => cmd_capacity::example5(ctx, a.nmax, a.samples, a.nodes),
    }
}

fn init_threads() {
    if let Ok(v) = std::env::var("PLURIPOT_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring PLURIPOT_THREADS={v:?}"),
        }
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("cannot write to stdout: {e}")),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_threads();
    let start = Instant::now();
    let ctx = Ctx::new(cli.seed, cli.dry_run);
    let result = dispatch(&ctx, &cli.command);
    let code: u8 = match &result {
        Ok(o) => {
            let text = render(&o.report, cli.format);
            if let Err(m) = write_out(cli.out.as_ref(), &text) {
                eprintln!("{m}");
                return ExitCode::from(1);
            }
            if o.pass == Some(false) {
                if cli.out.is_some() {
                    let _ = write_out(None, &pluripot_core::report::to_json_string(&serde_json::json!({"pass": false})));
                }
                eprintln!("check failed");
                2
            } else {
                0
            }
        }
        Err(e) => {
            let _ = write_out(None, &error_report(e));
            eprintln!("error: {e}");
            1
        }
    };
    if let Some(path) = &cli.manifest {
        let m = Manifest {
            args: &args[1..],
            config_hash: ctx.config_hash(&args[1..]),
            seed: cli.seed,
            wall_time: start.elapsed().as_secs_f64(),
            outcome: result.as_ref().ok(),
            exit_code: code,
        };
        if let Err(e) = std::fs::write(path, m.to_json()) {
            eprintln!("cannot write manifest {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
