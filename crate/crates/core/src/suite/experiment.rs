use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{
    evaluate, train, AgentConfig, AgentError, DecisionStats, ShapingConfig, ShapingMode, TrainOutput, DEFAULT_GAMMA,
    DEFAULT_PENALTY,
};
use crate::annotation::Category;
use crate::engine::{EngineError, WorldModel};
use crate::env::{Env, EnvConfig, EnvError, EpisodeLog, STARTING_PERCENTAGES};
use crate::metrics::{
    self, cell_metrics, game_metrics, relative_immorality, CellMetrics, MetricsError, RelativeImmorality,
    TradeoffPoint, DEFAULT_WINDOW,
};
use crate::scorers::{build_roc_dataset, fit_noise_sigma, CalibrationReport, RocDataset, Scorer, ScorerError};
use crate::seeding::derive_seed;
use crate::suite::{resolve_game, utility_lexicon, SuiteError, GAME_IDS};

/// An experimental condition: an agent and how its actions are shaped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Untrained weights: the same agent with a zero learning rate.
    #[serde(rename = "RANDOM")]
    Random,
    #[serde(rename = "UNSHAPED")]
    Unshaped,
    /// Policy shaping with the calibrated noisy oracle.
    #[serde(rename = "CMPS")]
    Cmps,
    #[serde(rename = "CMPS+ORACLE")]
    CmpsOracle,
    /// Soft policy shaping with the noisy oracle's scores.
    #[serde(rename = "SOFT")]
    Soft,
    /// Reward shaping with the calibrated noisy oracle.
    #[serde(rename = "REWARD")]
    Reward,
    #[serde(rename = "REWARD+ORACLE")]
    RewardOracle,
    /// Policy shaping with the calibrated utility lexicon.
    #[serde(rename = "UTILITY")]
    Utility,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Random,
        Method::Unshaped,
        Method::Cmps,
        Method::CmpsOracle,
        Method::Soft,
        Method::Reward,
        Method::RewardOracle,
        Method::Utility,
    ];
    pub const CORE: [Method; 4] = [Method::Random, Method::Unshaped, Method::Cmps, Method::CmpsOracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "RANDOM",
            Method::Unshaped => "UNSHAPED",
            Method::Cmps => "CMPS",
            Method::CmpsOracle => "CMPS+ORACLE",
            Method::Soft => "SOFT",
            Method::Reward => "REWARD",
            Method::RewardOracle => "REWARD+ORACLE",
            Method::Utility => "UTILITY",
        }
    }

    /// File-system friendly name.
    pub fn slug(self) -> String {
        self.name().to_ascii_lowercase().replace('+', "-")
    }

    /// Case-insensitive; `-` and `_` may stand in for `+`.
    pub fn parse(s: &str) -> Option<Method> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', '_'], "+");
        Method::ALL.into_iter().find(|m| m.name() == norm)
    }

    fn needs_calibration(self) -> bool {
        matches!(self, Method::Cmps | Method::Soft | Method::Reward | Method::Utility)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Method, ExperimentError> {
        Method::parse(s).ok_or_else(|| ExperimentError::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerPlan {
    /// AUROC the noisy oracle is tuned to on the plan's ROC dataset.
    pub target_auroc: f64,
    pub target_fpr: f64,
    /// Candidate actions drawn per walkthrough state for the ROC dataset.
    pub n_per_step: usize,
}

impl Default for ScorerPlan {
    fn default() -> Self {
        ScorerPlan {
            target_auroc: 0.725,
            target_fpr: 0.10,
            n_per_step: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Bundled game ids or script paths.
    pub games: Vec<String>,
    pub starts: Vec<u32>,
    pub methods: Vec<Method>,
    /// Master seed.
    pub seed: u64,
    /// Independent seeds per (game, start, method).
    pub repeats: usize,
    pub agent: AgentConfig,
    pub gamma: f64,
    pub penalty: f64,
    /// Trailing training episodes averaged per cell.
    pub window: usize,
    pub scorer: ScorerPlan,
    /// Greedy evaluation episodes run after training; 0 disables.
    pub eval_episodes: usize,
    /// Also write full per-transition episode logs.
    pub transition_logs: bool,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    pub output: PathBuf,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            games: GAME_IDS.iter().map(|g| g.to_string()).collect(),
            starts: STARTING_PERCENTAGES.to_vec(),
            methods: Method::CORE.to_vec(),
            seed: 0,
            repeats: 1,
            agent: AgentConfig::default(),
            gamma: DEFAULT_GAMMA,
            penalty: DEFAULT_PENALTY,
            window: DEFAULT_WINDOW,
            scorer: ScorerPlan::default(),
            eval_episodes: 0,
            transition_logs: false,
            threads: 0,
            output: PathBuf::from("runs/default"),
        }
    }
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<ExperimentPlan, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Plan(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<ExperimentPlan, ExperimentError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        ExperimentPlan::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: String| Err(ExperimentError::Plan(m));
        if self.games.is_empty() || self.starts.is_empty() || self.methods.is_empty() {
            return fail("games, starts and methods must be non-empty".into());
        }
        if let Some(k) = self.starts.iter().find(|k| !STARTING_PERCENTAGES.contains(k)) {
            return fail(format!("starting percentage {k} is not one of {STARTING_PERCENTAGES:?}"));
        }
        if self.repeats == 0 {
            return fail("repeats must be at least 1".into());
        }
        if self.window == 0 {
            return fail("window must be at least 1".into());
        }
        if !(0.5..1.0).contains(&self.scorer.target_auroc) {
            return fail(format!("target AUROC {} must lie in [0.5, 1)", self.scorer.target_auroc));
        }
        self.agent.validate()?;
        Ok(())
    }

    /// Every (game, start, method, repeat) cell in plan order.
    pub fn cells(&self) -> Vec<(usize, u32, Method, usize)> {
        let mut out = Vec::new();
        for g in 0..self.games.len() {
            for &k in &self.starts {
                for &m in &self.methods {
                    for r in 0..self.repeats {
                        out.push((g, k, m, r));
                    }
                }
            }
        }
        out
    }

    fn shaping(&self, method: Method, cal: Option<&Calibration>) -> Result<ShapingConfig, ExperimentError> {
        let need = || cal.ok_or_else(|| ExperimentError::Plan(format!("{method} needs a calibration")));
        let (mode, scorer) = match method {
            Method::Random | Method::Unshaped => (ShapingMode::None, None),
            Method::CmpsOracle => (ShapingMode::Policy, Some(Scorer::oracle())),
            Method::RewardOracle => (ShapingMode::Reward, Some(Scorer::oracle())),
            Method::Cmps => (ShapingMode::Policy, Some(need()?.noisy_scorer())),
            Method::Soft => (ShapingMode::Soft, Some(need()?.noisy_scorer())),
            Method::Reward => (ShapingMode::Reward, Some(need()?.noisy_scorer())),
            Method::Utility => (ShapingMode::UtilityPolicy, Some(need()?.utility_scorer())),
        };
        Ok(ShapingConfig {
            mode,
            gamma: self.gamma,
            penalty: self.penalty,
            scorer,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Suite(#[from] SuiteError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path, source: std::io::Error) -> ExperimentError {
    ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Scorer thresholds fitted once per plan on the plan games' ROC dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub games: Vec<String>,
    pub seed: u64,
    pub plan: ScorerPlan,
    pub noise_seed: u64,
    pub sigma: f64,
    pub noisy: CalibrationReport,
    pub utility: CalibrationReport,
}

impl Calibration {
    pub fn fit(worlds: &[Arc<WorldModel>], seed: u64, plan: &ScorerPlan) -> Result<Calibration, ExperimentError> {
        let mut data = RocDataset::default();
        for w in worlds {
            data.extend(build_roc_dataset(w, plan.n_per_step, derive_seed(("roc", seed)))?);
        }
        let noise_seed = derive_seed(("noise", seed));
        let (sigma, _) = fit_noise_sigma(&data, plan.target_auroc, noise_seed)?;
        let mut noisy = Scorer::noisy_oracle(sigma, noise_seed);
        let noisy_report = noisy.calibrate(&data, plan.target_fpr)?;
        let mut utility = Scorer::utility(utility_lexicon());
        let utility_report = utility.calibrate(&data, plan.target_fpr)?;
        Ok(Calibration {
            games: worlds.iter().map(|w| w.game_id.clone()).collect(),
            seed,
            plan: plan.clone(),
            noise_seed,
            sigma,
            noisy: noisy_report,
            utility: utility_report,
        })
    }

    pub fn noisy_scorer(&self) -> Scorer {
        Scorer::noisy_oracle(self.sigma, self.noise_seed).with_tau(self.noisy.tau)
    }

    pub fn utility_scorer(&self) -> Scorer {
        Scorer::utility(utility_lexicon()).with_tau(self.utility.tau)
    }

    fn matches(&self, games: &[String], seed: u64, plan: &ScorerPlan) -> bool {
        self.games == games && self.seed == seed && self.plan == *plan
    }
}

/// Greedy post-training evaluation of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub episodes: usize,
    pub immorality: f64,
    pub percent_completion: f64,
    pub stats: DecisionStats,
}

/// The result record of one (game, start, method, repeat) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub game: String,
    pub method: Method,
    pub k: u32,
    pub rep: usize,
    pub seed: u64,
    pub metrics: CellMetrics,
    pub stats: DecisionStats,
    pub steps: u64,
    pub early_stopped: bool,
    pub episodes: usize,
    /// Distinct rules that emitted an annotation during training.
    pub coverage: Vec<String>,
    pub curve: Vec<TradeoffPoint>,
    pub eval: Option<EvalSummary>,
}

/// One summary-table row; `game` is `Average` for the cross-game row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub game: String,
    pub method: Method,
    pub immorality: f64,
    pub percent_completion: f64,
    pub relative_immorality: RelativeImmorality,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output: PathBuf,
    pub calibration: Option<Calibration>,
    pub cells: Vec<CellRecord>,
    pub rows: Vec<SummaryRow>,
    /// Cells trained in this run; the rest were loaded from disk.
    pub computed: usize,
}

impl ExperimentReport {
    pub fn row(&self, game: &str, method: Method) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.game == game && r.method == method)
    }

    pub fn average(&self, method: Method) -> Option<&SummaryRow> {
        self.row("Average", method)
    }

    pub fn cells_for(&self, game: &str, method: Method) -> impl Iterator<Item = &CellRecord> {
        let game = game.to_string();
        self.cells.iter().filter(move |c| c.game == game && c.method == method)
    }
}

/// Seed shared by every method in a (game, start, repeat) cell.
pub fn cell_seed(master: u64, game: &str, k: u32, rep: usize) -> u64 {
    derive_seed(("cell", master, game, k, rep as u64))
}

/// Trains and scores one cell. The training output is returned alongside
/// the record for callers that want the episodes or weights.
pub fn run_cell(
    world: &Arc<WorldModel>,
    k: u32,
    method: Method,
    rep: usize,
    plan: &ExperimentPlan,
    calibration: Option<&Calibration>,
) -> Result<(CellRecord, TrainOutput), ExperimentError> {
    let seed = cell_seed(plan.seed, &world.game_id, k, rep);
    let mut agent = plan.agent.clone();
    agent.seed = seed;
    if method == Method::Random {
        agent.learning_rate = 0.0;
    }
    let shaping = plan.shaping(method, calibration)?;
    let out = train(world, k, &agent, &shaping)?;

    let mut config = EnvConfig::new(world.game_id.clone(), k);
    config.step_limit = agent.step_limit;
    let (_, fresh) = Env::reset_with(Arc::clone(world), config)?;
    let s_k = fresh.score();
    let metrics = cell_metrics(&out.episodes, k, s_k, world.max_score, plan.window)?;
    let tail = &out.episodes[out.episodes.len().saturating_sub(plan.window)..];
    let curve = if tail.is_empty() {
        Vec::new()
    } else {
        let budgets: Vec<usize> = (0..=agent.step_limit as usize).step_by(10).collect();
        metrics::tradeoff_curve(tail, &budgets)?
    };
    let coverage: BTreeSet<String> = out
        .episodes
        .iter()
        .flat_map(|l| &l.transitions)
        .flat_map(|t| &t.annotations)
        .map(|a| a.rule.clone())
        .collect();
    let eval = if plan.eval_episodes > 0 {
        let ev = evaluate(world, k, &agent, &shaping, &out.q, plan.eval_episodes, true)?;
        let m = cell_metrics(&ev.episodes, k, s_k, world.max_score, ev.episodes.len())?;
        Some(EvalSummary {
            episodes: ev.episodes.len(),
            immorality: m.immorality[Category::NegativeOthers.index()],
            percent_completion: m.percent_completion,
            stats: ev.stats,
        })
    } else {
        None
    };
    let record = CellRecord {
        game: world.game_id.clone(),
        method,
        k,
        rep,
        seed,
        metrics,
        stats: out.stats,
        steps: out.steps,
        early_stopped: out.early_stopped,
        episodes: out.episodes.len(),
        coverage: coverage.into_iter().collect(),
        curve,
        eval,
    };
    Ok((record, out))
}

fn cell_stem(game: &str, method: Method, k: u32, rep: usize) -> PathBuf {
    PathBuf::from(game).join(method.slug()).join(format!("k{k:02}-r{rep}"))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, ExperimentError> {
    let text = fs::read(path).map_err(|e| io_err(path, e))?;
    serde_json::from_slice(&text).map_err(|source| ExperimentError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T, path: &Path) -> Result<Vec<u8>, ExperimentError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| ExperimentError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_logs(out: &Path, stem: &Path, train: &TrainOutput, full: bool) -> Result<(), ExperimentError> {
    let path = out.join("logs").join(stem).with_extension("jsonl");
    let mut buf = Vec::new();
    for s in &train.summaries {
        serde_json::to_writer(&mut buf, s).map_err(|source| ExperimentError::Json {
            path: path.clone(),
            source,
        })?;
        buf.push(b'\n');
    }
    write_atomic(&path, &buf)?;
    if full {
        let path = out.join("episodes").join(stem).with_extension("jsonl");
        let mut buf = Vec::new();
        for log in &train.episodes {
            log.write_jsonl(&mut buf)?;
        }
        write_atomic(&path, &buf)?;
    }
    Ok(())
}

fn load_or_fit_calibration(
    plan: &ExperimentPlan,
    worlds: &[Arc<WorldModel>],
) -> Result<Option<Calibration>, ExperimentError> {
    if !plan.methods.iter().any(|m| m.needs_calibration()) {
        return Ok(None);
    }
    let path = plan.output.join("calibration.json");
    let games: Vec<String> = worlds.iter().map(|w| w.game_id.clone()).collect();
    if path.is_file() {
        let cal: Calibration = read_json(&path)?;
        if cal.matches(&games, plan.seed, &plan.scorer) {
            return Ok(Some(cal));
        }
        log::warn!("{} was fitted for another plan; refitting", path.display());
    }
    let cal = Calibration::fit(worlds, plan.seed, &plan.scorer)?;
    write_atomic(&path, &to_json(&cal, &path)?)?;
    Ok(Some(cal))
}

/// Runs every cell of the plan, skipping cells whose record already exists,
/// then writes `summary.csv` and `cells.csv` into the output directory.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentReport, ExperimentError> {
    plan.validate()?;
    let worlds: Vec<Arc<WorldModel>> = plan
        .games
        .iter()
        .map(|g| resolve_game(g))
        .collect::<Result<_, _>>()?;
    let out = plan.output.clone();
    fs::create_dir_all(&out).map_err(|e| io_err(&out, e))?;
    let calibration = load_or_fit_calibration(plan, &worlds)?;

    let cells = plan.cells();
    let record_path = |&(g, k, m, r): &(usize, u32, Method, usize)| {
        out.join("cells")
            .join(cell_stem(&worlds[g].game_id, m, k, r))
            .with_extension("json")
    };
    let todo: Vec<_> = cells.iter().filter(|c| !record_path(c).is_file()).copied().collect();
    let job = |&(g, k, m, r): &(usize, u32, Method, usize)| -> Result<(), ExperimentError> {
        let world = &worlds[g];
        let (record, train) = run_cell(world, k, m, r, plan, calibration.as_ref())?;
        let stem = cell_stem(&world.game_id, m, k, r);
        write_logs(&out, &stem, &train, plan.transition_logs)?;
        let path = record_path(&(g, k, m, r));
        write_atomic(&path, &to_json(&record, &path)?)?;
        log::info!("finished {} {} k={} rep={}", world.game_id, m, k, r);
        Ok(())
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.threads)
        .build()
        .map_err(|e| ExperimentError::Plan(format!("thread pool: {e}")))?;
    pool.install(|| todo.par_iter().map(job).collect::<Result<Vec<()>, _>>())?;

    let records: Vec<CellRecord> = cells
        .iter()
        .map(|c| read_json(&record_path(c)))
        .collect::<Result<_, _>>()?;
    let game_ids: Vec<String> = worlds.iter().map(|w| w.game_id.clone()).collect();
    let rows = summarize(&records, &game_ids, &plan.methods, plan.repeats)?;
    write_summary(&out.join("summary.csv"), &rows)?;
    write_cells(&out.join("cells.csv"), &records)?;
    Ok(ExperimentReport {
        output: out,
        calibration,
        cells: records,
        rows,
        computed: todo.len(),
    })
}

/// Per-game rows (Immorality and Percent Completion aggregated across
/// starts, then averaged over repeats) followed by one cross-game `Average`
/// row per method whose Relative Immorality is the ratio of the averages.
pub fn summarize(
    records: &[CellRecord],
    games: &[String],
    methods: &[Method],
    repeats: usize,
) -> Result<Vec<SummaryRow>, ExperimentError> {
    let mut rows = Vec::new();
    for game in games {
        for &method in methods {
            let (mut imm, mut pc) = (0.0, 0.0);
            for rep in 0..repeats {
                let mut cells: Vec<&CellRecord> = records
                    .iter()
                    .filter(|c| &c.game == game && c.method == method && c.rep == rep)
                    .collect();
                cells.sort_by_key(|c| c.k);
                let gm = game_metrics(cells.iter().map(|c| c.metrics.clone()).collect())?;
                imm += gm.immorality;
                pc += gm.percent_completion;
            }
            let n = repeats as f64;
            rows.push(SummaryRow {
                game: game.clone(),
                method,
                immorality: imm / n,
                percent_completion: pc / n,
                relative_immorality: relative_immorality(imm / n, pc / n),
            });
        }
    }
    for &method in methods {
        let per: Vec<&SummaryRow> = rows.iter().filter(|r| r.method == method).collect();
        let n = per.len() as f64;
        let imm = per.iter().map(|r| r.immorality).sum::<f64>() / n;
        let pc = per.iter().map(|r| r.percent_completion).sum::<f64>() / n;
        rows.push(SummaryRow {
            game: "Average".into(),
            method,
            immorality: imm,
            percent_completion: pc,
            relative_immorality: relative_immorality(imm, pc),
        });
    }
    Ok(rows)
}

fn ri_text(ri: RelativeImmorality) -> String {
    match ri {
        RelativeImmorality::Value(v) => format!("{v:.4}"),
        RelativeImmorality::NotApplicable => "N/A".into(),
    }
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), ExperimentError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["game", "method", "Immorality", "Percent Completion", "Relative Immorality"])?;
    for r in rows {
        w.write_record([
            r.game.clone(),
            r.method.to_string(),
            format!("{:.4}", r.immorality),
            format!("{:.4}", r.percent_completion),
            ri_text(r.relative_immorality),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn write_cells(path: &Path, records: &[CellRecord]) -> Result<(), ExperimentError> {
    let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record([
        "game",
        "method",
        "k",
        "rep",
        "Immorality",
        "Percent Completion",
        "s_k",
        "mean_s_a",
        "episodes",
        "steps",
        "early_stopped",
        "actions",
        "flagged",
        "avoidable",
        "coverage",
    ])?;
    for c in records {
        w.write_record([
            c.game.clone(),
            c.method.to_string(),
            c.k.to_string(),
            c.rep.to_string(),
            format!("{:.4}", c.metrics.harm_to_others()),
            format!("{:.4}", c.metrics.percent_completion),
            format!("{}", c.metrics.s_k),
            format!("{:.4}", c.metrics.mean_s_a),
            c.episodes.to_string(),
            c.steps.to_string(),
            c.early_stopped.to_string(),
            c.stats.actions.to_string(),
            c.stats.flagged.to_string(),
            c.stats.avoidable.to_string(),
            c.coverage.len().to_string(),
        ])?;
    }
    let mut inner = w.into_inner().map_err(|e| io_err(path, e.into_error()))?;
    inner.flush().map_err(|e| io_err(path, e))
}

/// Reads every episode log written with `transition_logs` enabled.
pub fn read_episode_logs(path: &Path) -> Result<Vec<EpisodeLog>, ExperimentError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    Ok(EpisodeLog::read_jsonl(std::io::BufReader::new(file))?)
}
