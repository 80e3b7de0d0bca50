mod play;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use conscience::engine::{parse_script, validate_world};
use conscience::metrics::{pooled_bias, reward_bias_audit};
use conscience::scorers::{build_roc_dataset, fit_noise_sigma, Lexicon, RocDataset, Scorer};
use conscience::suite::{
    default_lexicon, export_map, generate_game, resolve_game, utility_lexicon, ExperimentPlan, GenParams, GAME_IDS,
};
use conscience::{EnvConfig, WorldModel};

#[derive(Parser)]
#[command(name = "conscience", version, about = "Morality-annotated text adventures and shaping agents")]
struct Cli {
    /// Log verbosity (error, warn, info, debug).
    #[arg(long, global = true, default_value = "warn")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play a game interactively.
    Play {
        game: String,
        /// Starting percentage (fast-forward along the walkthrough).
        #[arg(short, long, default_value_t = 0)]
        start: u32,
        /// Step limit for the session.
        #[arg(long, default_value_t = 1000)]
        limit: u32,
    },
    /// Run an experiment plan.
    Run(RunArgs),
    /// Calibrate and evaluate an immorality scorer on the ROC dataset.
    EvalScorer {
        #[arg(long, value_enum, default_value = "noisy")]
        scorer: ScorerArg,
        /// Games (bundled ids or script paths); defaults to the bundled suite.
        #[arg(long, value_delimiter = ',')]
        games: Vec<String>,
        /// Lexicon file for the lexicon and utility scorers.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        n_per_step: usize,
        #[arg(long, default_value_t = 0.10)]
        target_fpr: f64,
        /// Noisy-oracle AUROC target.
        #[arg(long, default_value_t = 0.725)]
        target_auroc: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reward-bias audit of game walkthroughs.
    Audit {
        /// Games; defaults to the bundled suite.
        games: Vec<String>,
    },
    /// Print the room graph as DOT.
    ExportMap {
        game: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile and validate game scripts.
    Validate {
        /// Script paths or bundled ids; defaults to the bundled suite.
        games: Vec<String>,
    },
    /// Generate a game script.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        rooms: usize,
        #[arg(long, default_value_t = 20)]
        objects: usize,
        #[arg(long, default_value_t = 12)]
        annotated: usize,
        #[arg(long, default_value_t = 30)]
        walkthrough: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML plan file; flags override its values.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    games: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    starts: Option<Vec<u32>>,
    /// RANDOM, UNSHAPED, CMPS, CMPS+ORACLE, SOFT, REWARD, REWARD+ORACLE, UTILITY.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Environment steps per cell.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    eval_episodes: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    transition_logs: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScorerArg {
    Oracle,
    Noisy,
    Lexicon,
    Utility,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log).init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Play { game, start, limit } => {
            let world = resolve_game(&game)?;
            let mut config = EnvConfig::new(world.game_id.clone(), start);
            config.step_limit = limit;
            let stdin = io::stdin();
            play::play(world, config, stdin.lock(), io::stdout().lock())?;
        }
        Command::Run(args) => run(args)?,
        Command::EvalScorer {
            scorer,
            games,
            lexicon,
            n_per_step,
            target_fpr,
            target_auroc,
            seed,
        } => eval_scorer(scorer, &games, lexicon.as_deref(), n_per_step, target_fpr, target_auroc, seed)?,
        Command::Audit { games } => {
            let mut reports = Vec::new();
            println!("game,rewarded_steps,immoral_rewarded_steps,fraction");
            for w in worlds(&games)? {
                let r = reward_bias_audit(&w)?;
                println!("{},{},{},{:.4}", r.game, r.rewarded_steps, r.immoral_rewarded_steps, r.fraction());
                reports.push(r);
            }
            println!("pooled,,,{:.4}", pooled_bias(&reports));
        }
        Command::ExportMap { game, output } => {
            let dot = export_map(&*resolve_game(&game)?);
            emit(output.as_deref(), &dot)?;
        }
        Command::Validate { games } => return validate(&games),
        Command::Generate {
            seed,
            rooms,
            objects,
            annotated,
            walkthrough,
            output,
        } => {
            let text = generate_game(&GenParams {
                seed,
                rooms,
                objects,
                annotated,
                walkthrough,
            })?;
            emit(output.as_deref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn worlds(games: &[String]) -> Result<Vec<Arc<WorldModel>>> {
    let ids: Vec<String> = if games.is_empty() {
        GAME_IDS.iter().map(|g| g.to_string()).collect()
    } else {
        games.to_vec()
    };
    ids.iter().map(|g| Ok(resolve_game(g)?)).collect()
}

fn validate(games: &[String]) -> Result<ExitCode> {
    let ids: Vec<String> = if games.is_empty() {
        GAME_IDS.iter().map(|g| g.to_string()).collect()
    } else {
        games.to_vec()
    };
    let mut failed = false;
    for id in &ids {
        let source = match conscience::suite::game_source(id) {
            Some(s) => s.to_string(),
            None => fs::read_to_string(id).with_context(|| format!("reading {id}"))?,
        };
        let diags = match parse_script(&source) {
            Ok(world) => validate_world(&world),
            Err(e) => e.0,
        };
        if diags.is_empty() {
            println!("{id}: ok");
        } else {
            failed = true;
            for d in diags {
                eprintln!("{id}: {d}");
            }
        }
    }
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn run(args: RunArgs) -> Result<()> {
    let mut plan = match &args.plan {
        Some(p) => ExperimentPlan::load(p)?,
        None => ExperimentPlan::default(),
    };
    if let Some(g) = args.games {
        plan.games = g;
    }
    if let Some(s) = args.starts {
        plan.starts = s;
    }
    if let Some(ms) = args.methods {
        plan.methods = ms.iter().map(|m| m.parse()).collect::<Result<_, _>>()?;
    }
    if let Some(s) = args.seed {
        plan.seed = s;
    }
    if let Some(s) = args.steps {
        plan.agent.steps = s;
        plan.agent.early_stop_after = plan.agent.early_stop_after.min(s);
    }
    if let Some(r) = args.repeats {
        plan.repeats = r;
    }
    if let Some(e) = args.eval_episodes {
        plan.eval_episodes = e;
    }
    if let Some(t) = args.threads {
        plan.threads = t;
    }
    if args.transition_logs {
        plan.transition_logs = true;
    }
    if let Some(o) = args.out {
        plan.output = o;
    }
    let report = conscience::suite::run_experiment(&plan)?;
    eprintln!(
        "{} cells ({} trained, {} reused) -> {}",
        report.cells.len(),
        report.computed,
        report.cells.len() - report.computed,
        report.output.display()
    );
    print!("{}", fs::read_to_string(report.output.join("summary.csv"))?);
    Ok(())
}

fn load_lexicon(path: Option<&Path>, fallback: Arc<Lexicon>) -> Result<Arc<Lexicon>> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Arc::new(Lexicon::parse(&text)?))
        }
        None => Ok(fallback),
    }
}

fn eval_scorer(
    kind: ScorerArg,
    games: &[String],
    lexicon: Option<&Path>,
    n_per_step: usize,
    target_fpr: f64,
    target_auroc: f64,
    seed: u64,
) -> Result<()> {
    let mut data = RocDataset::default();
    for w in worlds(games)? {
        data.extend(build_roc_dataset(&w, n_per_step, seed)?);
    }
    if data.positives() == 0 || data.positives() == data.len() {
        bail!("ROC dataset needs both classes ({} of {} positive)", data.positives(), data.len());
    }
    let mut scorer = match kind {
        ScorerArg::Oracle => Scorer::oracle(),
        ScorerArg::Noisy => {
            let (sigma, _) = fit_noise_sigma(&data, target_auroc, seed)?;
            Scorer::noisy_oracle(sigma, seed)
        }
        ScorerArg::Lexicon => Scorer::lexicon(load_lexicon(lexicon, default_lexicon())?),
        ScorerArg::Utility => Scorer::utility(load_lexicon(lexicon, utility_lexicon())?),
    };
    let report = scorer.calibrate(&data, target_fpr)?;
    let record = serde_json::json!({
        "scorer": format!("{:?}", scorer.kind),
        "sigma": scorer.sigma,
        "report": report,
    });
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}
