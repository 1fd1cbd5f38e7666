use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::time::Duration;
use tricon_core::bench::{builtin_problems, parse_problem_file, run_benchmark, BenchConfig, ProblemStatus};
use tricon_core::emitter::{emit_model, lint, EmitMode, EmittedModel};
use tricon_core::kb::{derive_relations, load_kb, save_kb, validate_relations, DEFAULT_PROBES, DEFAULT_SEED, DEFAULT_TOLERANCE};
use tricon_core::verifier::{check_plan_numeric, check_plan_symbolic, Verdict, DEFAULT_SAMPLES};
use tricon_core::{Catalog, KnowledgeBase, Plan, PlannerConfig, Problem, Strategy};

#[derive(Parser)]
#[command(name = "tricon", version, about = "Shortest ruler-and-compass constructions of a triangle from three points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the knowledge base by probing random triangles.
    Derive(DeriveArgs),
    /// Find a shortest construction for one problem.
    Solve(SolveArgs),
    /// Write the MiniZinc model and data files for one problem.
    Emit(EmitArgs),
    /// Run the benchmark over a problem list.
    Bench(BenchArgs),
    /// Re-check a saved plan.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct KbArgs {
    /// Catalog JSON; the built-in catalog when omitted.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Saved knowledge base; derived on the fly when omitted.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Seed for knowledge-base derivation.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl KbArgs {
    fn load(&self) -> Result<(Catalog, KnowledgeBase)> {
        let catalog = match &self.catalog {
            Some(p) => Catalog::from_json(&read(p)?).with_context(|| format!("loading {}", p.display()))?,
            None => Catalog::builtin(),
        };
        let kb = match &self.kb {
            Some(p) => load_kb(&read(p)?, &catalog).with_context(|| format!("loading {}", p.display()))?,
            None => derive_relations(&catalog, DEFAULT_PROBES, DEFAULT_TOLERANCE, self.seed)?,
        };
        Ok((catalog, kb))
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Minimization)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 11)]
    max_steps: usize,
    /// Window size of the incremental strategy.
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Seconds per run.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

impl SearchArgs {
    fn config(&self) -> Result<PlannerConfig> {
        if self.timeout.is_nan() || self.timeout <= 0.0 {
            bail!("--timeout must be positive");
        }
        let config = PlannerConfig {
            max_steps: self.max_steps,
            window: self.window,
            strategy: self.strategy.into(),
            timeout: Some(Duration::from_secs_f64(self.timeout)),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Linear,
    Minimization,
    Incremental,
    All,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Linear => Strategy::Linear,
            StrategyArg::Incremental => Strategy::Incremental,
            StrategyArg::Minimization | StrategyArg::All => Strategy::Minimization,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fixed,
    Minimize,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_PROBES)]
    probes: usize,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Also validate against this many fresh triangles.
    #[arg(long)]
    validate: Option<usize>,
    /// Directory for `kb.json`; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Three given points, e.g. `A,G,O`.
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    kb: KbArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for the plan file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    kb: KbArgs,
    /// Plan length (fixed mode) or its upper bound (minimize mode).
    #[arg(long, default_value_t = 11)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Fixed)]
    mode: ModeArg,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Problem list CSV; the shipped list when omitted.
    #[arg(long)]
    problems: Option<PathBuf>,
    /// Only problems with this status.
    #[arg(long)]
    status: Option<String>,
    #[command(flatten)]
    kb: KbArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for rows, summary, plot data and the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    problem: String,
    /// Plan file, one `Kind(arg, ...) -> produced` per line.
    #[arg(long)]
    plan: PathBuf,
    #[command(flatten)]
    kb: KbArgs,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn problem(catalog: &Catalog, given: &str) -> Result<Problem> {
    let names: Vec<&str> = given.split(',').map(str::trim).collect();
    let [a, b, c] = names[..] else { bail!("--problem needs three comma-separated points, got `{given}`") };
    Ok(Problem::from_names(catalog, [a, b, c])?)
}

fn derive(args: DeriveArgs) -> Result<()> {
    let catalog = match &args.catalog {
        Some(p) => Catalog::from_json(&read(p)?)?,
        None => Catalog::builtin(),
    };
    let kb = derive_relations(&catalog, args.probes, args.tolerance, args.seed)?;
    let text = save_kb(&kb, &catalog);
    match &args.out {
        Some(dir) => eprintln!("wrote {} ({} tuples)", write(dir, "kb.json", &text)?.display(), kb.len()),
        None => print!("{text}"),
    }
    if let Some(n) = args.validate {
        let report = validate_relations(&kb, &catalog, n, args.tolerance, args.seed.wrapping_add(1))?;
        eprintln!("validated {} tuples on {} triangles: {} failures", report.tuples_checked, report.probes_checked, report.failures.len());
        for f in &report.failures {
            eprintln!("  {}", f.describe(&catalog));
        }
        if !report.is_sound() {
            bail!("knowledge base failed validation");
        }
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let (catalog, kb) = args.kb.load()?;
    let problem = problem(&catalog, &args.problem)?;
    let strategies: Vec<Strategy> = match args.search.strategy {
        StrategyArg::All => Strategy::ALL.to_vec(),
        s => vec![s.into()],
    };
    let planner = tricon_core::planner::Planner::new(&kb);
    let mut results = Vec::new();
    for strategy in strategies {
        let config = PlannerConfig { strategy, ..args.search.config()? };
        let result = planner.solve(&problem, &config);
        if let (Some(plan), Some(dir)) = (&result.plan, &args.out) {
            let name = format!("{}_{}.plan", EmittedModel::file_stem(&problem, &catalog), strategy.name());
            eprintln!("wrote {}", write(dir, &name, &plan.to_text(&catalog))?.display());
        }
        results.push((strategy, result));
    }
    match args.format {
        Format::Json => {
            let out: Vec<_> = results
                .iter()
                .map(|(s, r)| {
                    serde_json::json!({
                        "problem": problem.label(&catalog),
                        "strategy": s,
                        "outcome": r.outcome,
                        "length": r.plan.as_ref().map(|p| p.len()),
                        "plan": r.plan.as_ref().map(|p| p.steps.iter().map(|st| st.display(&catalog).to_string()).collect::<Vec<_>>()),
                        "stats": r.stats,
                        "time_s": r.stats.elapsed.as_secs_f64(),
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Format::Csv => {
            for (s, r) in &results {
                let len = r.plan.as_ref().map(|p| p.len().to_string()).unwrap_or_else(|| "-".into());
                println!("# {} {}: {:?}, length {len}, {} nodes, {:.3} s", problem.label(&catalog), s.name(), r.outcome, r.stats.nodes, r.stats.elapsed.as_secs_f64());
                if let Some(plan) = &r.plan {
                    print!("{}", plan.to_text(&catalog));
                }
            }
        }
    }
    Ok(())
}

fn emit(args: EmitArgs) -> Result<()> {
    let (catalog, kb) = args.kb.load()?;
    let problem = problem(&catalog, &args.problem)?;
    let mode = match args.mode {
        ModeArg::Fixed => EmitMode::Fixed,
        ModeArg::Minimize => EmitMode::Minimize,
    };
    let config = PlannerConfig { max_steps: args.max_steps, window: 1, ..PlannerConfig::default() };
    let model = emit_model(&problem, &kb, &catalog, &config, mode)?;
    let report = lint(&model.model_text, &model.data_text);
    if !report.is_clean() {
        bail!("emitted model fails lint: {}", report.issues.join("; "));
    }
    let stem = EmittedModel::file_stem(&problem, &catalog);
    println!("{}", write(&args.out, &format!("{stem}.mzn"), &model.model_text)?.display());
    println!("{}", write(&args.out, &format!("{stem}.dzn"), &model.data_text)?.display());
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let (catalog, kb) = args.kb.load()?;
    let mut problems = match &args.problems {
        Some(p) => parse_problem_file(&read(p)?, &catalog)?,
        None => builtin_problems(),
    };
    if let Some(s) = &args.status {
        let status: ProblemStatus = s.parse().map_err(anyhow::Error::msg)?;
        problems.retain(|p| p.status == status);
    }
    let strategies = match args.search.strategy {
        StrategyArg::All => Strategy::ALL.to_vec(),
        s => vec![s.into()],
    };
    let config = BenchConfig { strategies, planner: args.search.config()?, parallelism: args.jobs, ..BenchConfig::default() };
    let report = run_benchmark(&problems, &catalog, &kb, &config)?;
    if let Some(dir) = &args.out {
        write(dir, "rows.csv", &report.rows_csv())?;
        write(dir, "summary.csv", &report.summary_csv())?;
        write(dir, "survival.csv", &report.survival_csv())?;
        write(dir, "lengths.csv", &report.lengths_csv())?;
        write(dir, "report.json", &report.to_json())?;
        write(dir, "kb.json", &save_kb(&kb, &catalog))?;
        eprintln!("wrote report files to {}", dir.display());
    }
    match args.format {
        Format::Csv => print!("{}", report.summary_csv()),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report.summaries)?),
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let (catalog, kb) = args.kb.load()?;
    let problem = problem(&catalog, &args.problem)?;
    let plan = Plan::parse(&read(&args.plan)?, &catalog)?;
    let mut report = check_plan_symbolic(&plan, &problem, &kb);
    if report.accepted() {
        report = check_plan_numeric(&plan, &problem, &catalog, args.samples, args.tolerance, args.kb.seed)?;
    }
    println!("{}", report.to_json());
    Ok(report.verdict == Verdict::Accepted)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Derive(a) => derive(a),
        Command::Solve(a) => solve(a),
        Command::Emit(a) => emit(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => {
            if !verify(a)? {
                std::process::exit(1);
            }
            Ok(())
        }
    }
}
