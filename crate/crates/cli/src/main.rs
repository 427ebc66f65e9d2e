//! `sphere-sos`: moment relaxations, eigenvalue synthesis, rate sweeps,
//! quantum Wasserstein bounds and rate constants from the command line.
//!
//! Exit codes: 0 success, 2 bad input, 3 solver failure, 4 order too small,
//! 5 output error.

mod output;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use sphere_sos::conic::{write_problem, BackendConfig, BackendRegistry, ConicBackend, ConicProblem, BACKEND_ENV, DEFAULT_BACKEND, DEFAULT_TOLERANCE};
use sphere_sos::kernel::{self, KernelError};
use sphere_sos::moment::{self, MomentError, SphereEncoding, SweepOptions};
use sphere_sos::oracle::{self, OracleBudget};
use sphere_sos::qwass::{self, QwassError};
use sphere_sos::SetDescriptor;

use output::{fmt_sig, round_sig, sibling, to_rounded_json, write_file, BackendIdentity, Clock};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Parse(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("{0}")]
    OrderTooSmall(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Solver(_) => 3,
            CliError::OrderTooSmall(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<MomentError> for CliError {
    fn from(e: MomentError) -> Self {
        match e {
            MomentError::OrderTooSmall { .. } => CliError::OrderTooSmall(e.to_string()),
            MomentError::Conic(_) => CliError::Solver(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<KernelError> for CliError {
    fn from(e: KernelError) -> Self {
        match e {
            KernelError::OrderTooSmall { .. } => CliError::OrderTooSmall(e.to_string()),
            KernelError::Solver(_) | KernelError::Conic(_) => CliError::Solver(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

impl From<QwassError> for CliError {
    fn from(e: QwassError) -> Self {
        match e {
            QwassError::OrderTooSmall { .. } => CliError::OrderTooSmall(e.to_string()),
            QwassError::Moment(m) => m.into(),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "sphere-sos", version, about = "Moment-SOS bounds over products of spheres")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for generators and the sampling oracle.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Conic solver backend.
    #[arg(long, global = true, env = BACKEND_ENV, default_value = DEFAULT_BACKEND)]
    backend: String,
    /// Solver feasibility and gap tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Solver iteration limit.
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    /// Write each conic problem in the plain-text triplet format.
    #[arg(long, global = true, value_name = "PATH")]
    export_problem: Option<PathBuf>,
    /// Write the result (and its manifest) to a file.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Reduced,
    Equalities,
}

impl From<Encoding> for SphereEncoding {
    fn from(e: Encoding) -> Self {
        match e {
            Encoding::Reduced => SphereEncoding::Reduced,
            Encoding::Equalities => SphereEncoding::Equalities,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound on the minimum of a polynomial at relaxation order t.
    Minimize {
        /// Polynomial JSON file, or `const:<c>`, `random:<degree>`, `bilinear`.
        poly: String,
        #[arg(long, default_value = "sphere2x3")]
        set: String,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value = "reduced")]
        encoding: Encoding,
    },
    /// Eigenvalue vector of a degree-2t univariate sum of squares.
    Lambda {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
    },
    /// Gap of the relaxation against the oracle over several orders, as CSV.
    RateExperiment {
        /// Polynomial JSON file, or `const:<c>`, `random:<degree>`, `bilinear`.
        poly: String,
        #[arg(long, default_value = "sphere2x3")]
        set: String,
        /// Comma-separated, strictly ascending orders.
        #[arg(long, value_delimiter = ',', required = true)]
        t_list: Vec<usize>,
        #[arg(long, value_enum, default_value = "reduced")]
        encoding: Encoding,
        /// Solve the orders one after another.
        #[arg(long)]
        serial: bool,
    },
    /// Lower bound on the squared quantum Wasserstein distance.
    Qwass {
        /// State JSON `{"n", "re", "im"}`.
        rho: String,
        nu: String,
        #[arg(long, default_value_t = 2)]
        t: usize,
    },
    /// Closed-form rate constants.
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

struct Context {
    common: Common,
    clock: Clock,
}

impl Context {
    fn config(&self) -> BackendConfig {
        BackendConfig { tolerance: self.common.tol, max_iterations: self.common.max_iter }
    }

    fn backend(&self) -> Result<Box<dyn ConicBackend>, CliError> {
        if self.common.tol.is_nan() || self.common.tol <= 0.0 {
            return Err(CliError::Parse(format!("tolerance must be positive, got {}", self.common.tol)));
        }
        BackendRegistry::default().create(&self.common.backend, self.config()).map_err(|e| CliError::Parse(e.to_string()))
    }

    fn identity(&self) -> BackendIdentity {
        BackendIdentity::new(&self.common.backend, self.config())
    }

    fn export(&self, problem: &ConicProblem, suffix: Option<&str>) -> Result<(), CliError> {
        let Some(base) = &self.common.export_problem else {
            return Ok(());
        };
        let path = match suffix {
            Some(s) => {
                let ext = base.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
                sibling(base, &format!("{s}{ext}"))
            }
            None => base.clone(),
        };
        write_file(&path, &write_problem(problem))?;
        log::info!("wrote conic problem to {}", path.display());
        Ok(())
    }

    fn emit(&self, command: &str, result: Value) -> Result<(), CliError> {
        let manifest = self.clock.manifest(command, self.common.seed, self.identity());
        output::emit_json(result, &manifest, self.common.out.as_deref())
    }
}

fn parse_set(s: &str) -> Result<SetDescriptor, CliError> {
    s.parse().map_err(|e: sphere_sos::set::SetError| CliError::Parse(e.to_string()))
}

fn minimize(ctx: &Context, poly: &str, set: &str, t: usize, encoding: Encoding) -> Result<(), CliError> {
    let set = parse_set(set)?;
    let q = source::load_poly(poly, &set, ctx.common.seed)?;
    let backend = ctx.backend()?;
    let problem = moment::build_relaxation_with(&q, &set, t, encoding.into())?;
    ctx.export(&problem.conic, None)?;
    let r = moment::solve(&problem, backend.as_ref())?;
    if !r.status.has_solution() {
        return Err(CliError::Solver(format!("{} ({})", r.status, r.message)));
    }
    let o = oracle::minimize(&q, &set, OracleBudget::default(), ctx.common.seed).map_err(|e| CliError::Parse(e.to_string()))?;
    let gap = o.min_estimate - r.lower_bound;
    let result = json!({
        "set": set.to_string(),
        "t": t,
        "certificate_degree": r.certificate_degree,
        "lower_bound": round_sig(r.lower_bound),
        "oracle_min": round_sig(o.min_estimate),
        "gap": round_sig(gap),
        "status": r.status,
        "iterations": r.iterations,
        "message": r.message,
    });
    ctx.emit("minimize", result)
}

fn lambda(ctx: &Context, n: usize, d: usize, t: usize) -> Result<(), CliError> {
    if d > 2 * t {
        return Err(CliError::OrderTooSmall(format!("order too small: degree {d} needs t >= {}", d.div_ceil(2))));
    }
    let backend = ctx.backend()?;
    ctx.export(&kernel::lambda_problem(n, d, t)?, None)?;
    let l = kernel::synthesize_lambda(n, d, t, backend.as_ref())?;
    let bound = kernel::deficit_bound(n, d, t);
    let mut lv = l.to_json();
    output::round_json(&mut lv);
    let result = json!({
        "lambda": lv,
        "deficit": round_sig(l.deficit),
        "deficit_bound": round_sig(bound),
        "within_bound": l.deficit <= bound,
    });
    ctx.emit("lambda", result)
}

fn rate_experiment(ctx: &Context, poly: &str, set: &str, t_list: &[usize], encoding: Encoding, serial: bool) -> Result<(), CliError> {
    let set = parse_set(set)?;
    let q = source::load_poly(poly, &set, ctx.common.seed)?;
    let backend = ctx.backend()?;
    if ctx.common.export_problem.is_some() {
        for &t in t_list {
            let p = moment::build_relaxation_with(&q, &set, t, encoding.into())?;
            ctx.export(&p.conic, Some(&format!(".t{t}")))?;
        }
    }
    let options = SweepOptions { encoding: encoding.into(), budget: OracleBudget::default(), seed: ctx.common.seed, parallel: !serial };
    let sweep = moment::hierarchy_sweep(&q, &set, t_list, backend.as_ref(), &options)?;
    if let Some(row) = sweep.rows.iter().find(|r| !r.status.has_solution()) {
        return Err(CliError::Solver(format!("order {}: {}", row.t, row.status)));
    }
    let cols = |r: &moment::SweepRow| [r.lower_bound, r.oracle_min, r.gap, r.theory_bound].map(fmt_sig);
    let mut csv = String::from("t,lower_bound,oracle_min,gap,theory_bound\n");
    let mut dat = String::from("# t lower_bound oracle_min gap theory_bound\n");
    for r in &sweep.rows {
        let c = cols(r);
        csv.push_str(&format!("{},{}\n", r.t, c.join(",")));
        dat.push_str(&format!("{} {}\n", r.t, c.join(" ")));
    }
    print!("{csv}");
    let manifest = ctx.clock.manifest("rate-experiment", ctx.common.seed, ctx.identity());
    if let Some(out) = &ctx.common.out {
        write_file(out, &csv)?;
        write_file(&sibling(out, ".dat"), &dat)?;
        let mut m = serde_json::to_value(&manifest).expect("plain data");
        output::round_json(&mut m);
        let text = serde_json::to_string_pretty(&json!({ "manifest": m, "q_min": round_sig(sweep.q_min), "q_max": round_sig(sweep.q_max) }))
            .expect("plain data");
        write_file(&sibling(out, ".manifest.json"), &format!("{text}\n"))?;
    }
    Ok(())
}

fn qwass_cmd(ctx: &Context, rho: &str, nu: &str, t: usize) -> Result<(), CliError> {
    let (rho, nu) = (source::load_state(rho)?, source::load_state(nu)?);
    let backend = ctx.backend()?;
    if ctx.common.export_problem.is_some() {
        ctx.export(&qwass::build_w2_relaxation(&rho, &nu, t)?.conic, None)?;
    }
    let r = qwass::solve_w2(&rho, &nu, t, backend.as_ref())?;
    if !r.status.has_solution() {
        return Err(CliError::Solver(format!("{} ({})", r.status, r.message)));
    }
    ctx.emit("qwass", to_rounded_json(&r, &[("w2_squared_lower", r.w2_squared_lower)]))
}

/// Integers beyond `u64` are printed as strings.
fn exact_json(v: u128) -> Value {
    u64::try_from(v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string()))
}

fn constants(ctx: &Context, n: usize, d: usize, m: usize) -> Result<(), CliError> {
    if ctx.common.export_problem.is_some() {
        log::warn!("constants involves no conic problem; nothing exported");
    }
    let g2 = kernel::gamma_squared_bound_exact(n, d)?;
    let multi_exact = kernel::c_multisphere_exact(n, d, m)?;
    let kappa = if n >= 2 { Some(qwass::kappa_bound(n)?) } else { None };
    let result = json!({
        "n": n,
        "d": d,
        "m": m,
        "c_bisphere": exact_json(kernel::c_bisphere_exact(n, d)?),
        "c_multisphere": round_sig(kernel::c_multisphere(n, d, m)?),
        "c_multisphere_exact": multi_exact.map(exact_json),
        "gamma_squared_bound": exact_json(g2),
        "gamma_bound": round_sig(kernel::gamma_bound(n, d)?),
        "kappa": kappa.map(|k| json!({
            "n": k.n,
            "value": round_sig(k.value),
            "exact": exact_json(k.exact),
            "c_bisphere": exact_json(k.c_bisphere),
            "f_max": k.f_max,
            "h_max": k.h_max,
            "w_l1_bound": round_sig(k.w_l1_bound),
        })),
    });
    ctx.emit("constants", result)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context { common: cli.common, clock: Clock::start() };
    match &cli.command {
        Command::Minimize { poly, set, t, encoding } => minimize(&ctx, poly, set, *t, *encoding),
        Command::Lambda { n, d, t } => lambda(&ctx, *n, *d, *t),
        Command::RateExperiment { poly, set, t_list, encoding, serial } => rate_experiment(&ctx, poly, set, t_list, *encoding, *serial),
        Command::Qwass { rho, nu, t } => qwass_cmd(&ctx, rho, nu, *t),
        Command::Constants { n, d, m } => constants(&ctx, *n, *d, *m),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sphere-sos: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
