//! Command-line front end.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::filters::{filter_solve, Method, Param};
use crate::noise_mc::{
    add_noise, conditioning_error_curve, median_curve, run_monte_carlo, McConfig, NoiseModel, Rule,
};
use crate::par::Execution;
use crate::path::{AlphaGrid, Operator, Path};
use crate::problems::{build_scaled, ProblemKind};
use crate::report;
use crate::selection::{heuristic_select, morozov_like, RuleOutcome};
use crate::spectral::Problem;
use crate::theory::{run_check, CheckKind};

/// Exit code for bad input or I/O failures.
pub const EXIT_INPUT: u8 = 2;
/// Exit code when a verification check fails.
pub const EXIT_VERIFY: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "illreg", version, about = "Spectral filter regularization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a scaled test problem as JSON.
    Problem {
        #[arg(long)]
        name: ProblemKind,
        #[arg(long)]
        n: Option<usize>,
        /// Seed of the diagonal fixture's source vector.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regularized solution for one parameter (cg: α = 1/k).
    Solve {
        #[command(flatten)]
        input: ProblemInput,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo benchmark.
    Mc(McArgs),
    /// Trace of one parameter rule on one noisy instance.
    Rules {
        #[command(flatten)]
        input: ProblemInput,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        rule: Rule,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Numeric checks of the analytic bounds; exits with 3 on any failure.
    Verify {
        #[arg(long)]
        check: CheckKind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Conditioning-versus-error curves.
    Curve {
        #[command(flatten)]
        input: ProblemInput,
        #[arg(long, value_delimiter = ',', default_value = "nrm,tik")]
        methods: Vec<Method>,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Median over this many noise draws (seeds `seed..seed+reps`).
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ProblemInput {
    /// Problem JSON file, or `name[:n]` for a built-in problem.
    #[arg(long)]
    pub problem: String,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Relative noise level ε.
    #[arg(long, default_value_t = 0.04)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1e-12)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 200)]
    pub grid_count: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<AlphaGrid> {
        AlphaGrid::new(self.grid_min, self.grid_max, self.grid_count)
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, value_delimiter = ',', default_value = "shaw:100,baart:100,heat:100")]
    pub problems: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "nrm,tik,tsvd,sw,cg")]
    pub methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "oracle,gcv,dqo,h1,h2,lcv,morozov,apriori")]
    pub rules: Vec<Rule>,
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.04")]
    pub noise_levels: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub base_seed: u64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write one row per replication and rule to this file.
    #[arg(long)]
    pub per_rep_log: Option<PathBuf>,
}

/// Resolves `--problem`: an existing file is read as JSON, anything else is
/// parsed as `name[:n]` and generated (diagonal fixture seed 0).
pub fn load_problem(arg: &str) -> Result<Problem> {
    if FsPath::new(arg).is_file() {
        return Problem::read_json(arg);
    }
    let (name, n) = match arg.split_once(':') {
        Some((name, n)) => {
            let n = n
                .parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad problem size in {arg:?}")))?;
            (name, Some(n))
        }
        None => (arg, None),
    };
    let kind: ProblemKind = name.parse()?;
    build_scaled(kind, n.unwrap_or(kind.default_size()), 0)
}

fn create(path: &FsPath) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Problem { name, n, seed, out } => {
            let p = build_scaled(name, n.unwrap_or(name.default_size()), seed)?;
            p.write_json(&out)?;
        }
        Command::Solve {
            input,
            method,
            alpha,
            noise,
            out,
        } => {
            let p = load_problem(&input.problem)?;
            let op = Operator::from_problem(&p)?;
            let (y, delta) = add_noise(&p.y_exact, NoiseModel { level: noise.noise, seed: noise.seed })?;
            let x = match method {
                Method::Cg => {
                    if !(alpha > 0.0 && alpha <= 1.0) {
                        return Err(Error::Domain(format!("cg needs alpha = 1/k in (0, 1], got {alpha}")));
                    }
                    let k = (1.0 / alpha).round() as usize;
                    let data = op.data(&y)?;
                    crate::filters::cgls_iterates(&op.a, &data.y, k)?
                        .iterates
                        .pop()
                        .ok_or_else(|| Error::Invalid("CGLS broke down before the first iterate".into()))?
                }
                _ => {
                    if !(alpha > 0.0 && alpha.is_finite()) {
                        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
                    }
                    filter_solve(&op.svd, &y, method, alpha)?
                }
            };
            let err = (&x - &p.x_true).norm() / p.x_true.norm();
            report::write_solution(create(&out)?, x.as_slice())?;
            println!("rel_error={err:e} delta={delta:e}");
        }
        Command::Mc(args) => {
            let cfg = McConfig {
                problems: args.problems.iter().map(|s| load_problem(s)).collect::<Result<_>>()?,
                methods: args.methods,
                rules: args.rules,
                noise_levels: args.noise_levels,
                reps: args.reps,
                base_seed: args.base_seed,
                grid: args.grid.grid()?,
            };
            let rep = run_monte_carlo(&cfg)?;
            report::write_mc_report(create(&args.out)?, &rep)?;
            if let Some(path) = args.per_rep_log {
                report::write_rep_log(create(&path)?, &rep)?;
            }
        }
        Command::Rules {
            input,
            method,
            rule,
            noise,
            out,
        } => {
            let p = load_problem(&input.problem)?;
            let op = Operator::from_problem(&p)?;
            let (y, delta) = add_noise(&p.y_exact, NoiseModel { level: noise.noise, seed: noise.seed })?;
            let data = op.data(&y)?;
            let grid = AlphaGrid::default();
            let outcome = rule_outcome(&op, &p, &data, delta, method, rule, &grid)?;
            report::write_rule_trace(create(&out)?, &outcome)?;
            match outcome.param {
                Some(param) => println!("param={:e} flags={:?}", param.value(), outcome.flags),
                None => println!("param=NA (rule {rule} does not apply to {method})"),
            }
        }
        Command::Verify { check, out } => {
            let reports = run_check(check)?;
            report::write_checks(create(&out)?, &reports)?;
            for r in &reports {
                println!(
                    "{} {} {} value={:e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check,
                    r.parameter,
                    r.value
                );
            }
            if reports.iter().any(|r| !r.pass) {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Curve {
            input,
            methods,
            noise,
            reps,
            grid,
            out,
        } => {
            if reps == 0 {
                return Err(Error::Invalid("reps must be >= 1".into()));
            }
            let p = load_problem(&input.problem)?;
            let op = Operator::from_problem(&p)?;
            let target = op.target(&p.x_true)?;
            let alphas = grid.grid()?.values();
            let draws = (0..reps)
                .map(|r| {
                    let (y, _) = add_noise(
                        &p.y_exact,
                        NoiseModel {
                            level: noise.noise,
                            seed: noise.seed + r as u64,
                        },
                    )?;
                    op.data(&y)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut curves = Vec::new();
            for m in methods {
                let per_draw = draws
                    .iter()
                    .map(|d| conditioning_error_curve(&op, d, &target, m, &alphas))
                    .collect::<Result<Vec<_>>>()?;
                curves.push((m, median_curve(&per_draw)?));
            }
            report::write_curves(create(&out)?, &curves)?;
        }
    }
    Ok(0)
}

fn rule_outcome(
    op: &Operator,
    p: &Problem,
    data: &crate::path::Data,
    delta: f64,
    method: Method,
    rule: Rule,
    grid: &AlphaGrid,
) -> Result<RuleOutcome> {
    if !rule.applies_to(method) {
        return Ok(RuleOutcome::not_applicable());
    }
    match rule {
        Rule::Heuristic(h) => heuristic_select(h, op, data, method, grid),
        Rule::Morozov => morozov_like(op, data, delta, method),
        Rule::Apriori => {
            let alpha = crate::selection::apriori_delta(delta)?;
            Ok(RuleOutcome {
                param: Some(Param::Alpha(alpha)),
                objective_trace: vec![(alpha, delta)],
                flags: Default::default(),
            })
        }
        Rule::Oracle => {
            let target = op.target(&p.x_true)?;
            let path = Path::for_method(op, data, method, grid, Some(&target))?;
            let errs = path.rel_error.clone().expect("target supplied");
            let mut best = 0;
            for (i, e) in errs.iter().enumerate() {
                if *e < errs[best] {
                    best = i;
                }
            }
            Ok(RuleOutcome {
                param: Some(path.params[best]),
                objective_trace: path.params.iter().map(|q| q.value()).zip(errs).collect(),
                flags: crate::selection::RuleFlags {
                    boundary_hit: best == 0 || best + 1 == path.len(),
                    ..Default::default()
                },
            })
        }
    }
}

/// Reads `ILLREG_THREADS` and caps the worker pool accordingly.
pub fn apply_thread_limit() -> Result<Execution> {
    match std::env::var("ILLREG_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("ILLREG_THREADS must be a positive integer, got {v:?}")))?;
            if n == 0 {
                return Err(Error::Invalid("ILLREG_THREADS must be >= 1".into()));
            }
            crate::par::limit_threads(n);
            Ok(if n == 1 { Execution::Serial } else { Execution::Parallel })
        }
        Err(_) => Ok(Execution::Parallel),
    }
}
