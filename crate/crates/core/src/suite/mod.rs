//! The bundled game suite, the procedural generator, the experiment runner
//! and map export.

mod experiment;
mod generator;
mod map;

pub use experiment::{
    cell_seed, read_episode_logs, run_cell, run_experiment, summarize, write_summary, Calibration, CellRecord,
    EvalSummary, ExperimentError, ExperimentPlan, ExperimentReport, Method, ScorerPlan, SummaryRow,
};
pub use generator::{generate_game, GenError, GenParams};
pub use map::export_map;

use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::annotation::{Category, MAX_DEGREE};
use crate::engine::{parse_script, ScriptError, WorldModel};
use crate::scorers::Lexicon;

/// Bundled games, in suite order.
pub const GAME_IDS: [&str; 5] = [
    "manor-heist",
    "lighthouse",
    "village-fair",
    "orbital-station",
    "goblin-mine",
];

const SOURCES: [(&str, &str); 5] = [
    ("manor-heist", include_str!("../../games/manor-heist.game")),
    ("lighthouse", include_str!("../../games/lighthouse.game")),
    ("village-fair", include_str!("../../games/village-fair.game")),
    ("orbital-station", include_str!("../../games/orbital-station.game")),
    ("goblin-mine", include_str!("../../games/goblin-mine.game")),
];

const MANIFEST: &str = include_str!("../../games/manifest.toml");
const LEXICON: &str = include_str!("../../games/lexicon.txt");
const UTILITY_LEXICON: &str = include_str!("../../games/utility.txt");

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("unknown game '{0}' (not bundled and no such file)")]
    UnknownGame(String),
    #[error("{path}: {source}")]
    Script { path: String, source: ScriptError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("manifest: {0}")]
    Manifest(String),
}

pub fn game_source(id: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(g, _)| *g == id).map(|(_, s)| *s)
}

fn compiled() -> &'static [Arc<WorldModel>] {
    static SUITE: OnceLock<Vec<Arc<WorldModel>>> = OnceLock::new();
    SUITE.get_or_init(|| {
        SOURCES
            .iter()
            .map(|(id, src)| {
                let world = parse_script(src).unwrap_or_else(|e| panic!("bundled game {id} fails to compile: {e}"));
                Arc::new(world)
            })
            .collect()
    })
}

/// A compiled bundled game, shared across callers.
pub fn load_game(id: &str) -> Option<Arc<WorldModel>> {
    compiled().iter().find(|w| w.game_id == id).cloned()
}

pub fn load_suite() -> Vec<Arc<WorldModel>> {
    compiled().to_vec()
}

/// A bundled game id, or else a path to a script file.
pub fn resolve_game(spec: &str) -> Result<Arc<WorldModel>, SuiteError> {
    if let Some(w) = load_game(spec) {
        return Ok(w);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(SuiteError::UnknownGame(spec.to_string()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: spec.to_string(),
        source,
    })?;
    parse_script(&text).map(Arc::new).map_err(|source| SuiteError::Script {
        path: spec.to_string(),
        source,
    })
}

/// The bundled keyword lexicon (weights in `[0, 1]`).
pub fn default_lexicon() -> Arc<Lexicon> {
    static LEX: OnceLock<Arc<Lexicon>> = OnceLock::new();
    LEX.get_or_init(|| Arc::new(Lexicon::parse(LEXICON).expect("bundled lexicon parses")))
        .clone()
}

/// The bundled signed, severity-weighted utility lexicon.
pub fn utility_lexicon() -> Arc<Lexicon> {
    static LEX: OnceLock<Arc<Lexicon>> = OnceLock::new();
    LEX.get_or_init(|| Arc::new(Lexicon::parse(UTILITY_LEXICON).expect("bundled utility lexicon parses")))
        .clone()
}

/// Annotated-rule counts per framework cell: `[category][degree - 1]`.
pub type CellCounts = [[usize; 3]; 4];

/// Counts the annotated rules touching each (category, degree) cell. A rule
/// with several nonzero components counts once in each.
pub fn cell_counts(world: &WorldModel) -> CellCounts {
    let mut counts = [[0; 3]; 4];
    for rule in world.annotated_rules() {
        let spec = rule.annotation.as_ref().expect("annotated");
        for c in Category::ALL {
            let d = spec.degrees.get(c);
            if (1..=MAX_DEGREE).contains(&d) {
                counts[c.index()][usize::from(d) - 1] += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCells {
    pub negative_others: [usize; 3],
    pub negative_self: [usize; 3],
    pub positive_others: [usize; 3],
    pub positive_self: [usize; 3],
}

impl ManifestCells {
    pub fn from_counts(c: &CellCounts) -> ManifestCells {
        ManifestCells {
            negative_others: c[0],
            negative_self: c[1],
            positive_others: c[2],
            positive_self: c[3],
        }
    }

    pub fn counts(&self) -> CellCounts {
        [
            self.negative_others,
            self.negative_self,
            self.positive_others,
            self.positive_self,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestGame {
    pub id: String,
    pub script: String,
    pub max_score: i64,
    pub walkthrough_length: usize,
    pub rules: usize,
    pub annotated_rules: usize,
    pub cells: ManifestCells,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    /// Golden reward-bias fraction of the whole suite.
    pub reward_bias: f64,
    #[serde(rename = "game")]
    pub games: Vec<ManifestGame>,
    #[serde(rename = "recipe", default)]
    pub recipes: Vec<GenParams>,
}

impl SuiteManifest {
    pub fn parse(text: &str) -> Result<SuiteManifest, SuiteError> {
        toml::from_str(text).map_err(|e| SuiteError::Manifest(e.to_string()))
    }

    pub fn bundled() -> SuiteManifest {
        SuiteManifest::parse(MANIFEST).expect("bundled manifest parses")
    }

    /// Cell counts summed over every game.
    pub fn total_cells(&self) -> CellCounts {
        let mut total = [[0; 3]; 4];
        for g in &self.games {
            let c = g.cells.counts();
            for (row, add) in total.iter_mut().zip(c) {
                for (t, a) in row.iter_mut().zip(add) {
                    *t += a;
                }
            }
        }
        total
    }

    /// Manifest entry recomputed from a compiled world.
    pub fn describe(world: &WorldModel, script: &str) -> ManifestGame {
        ManifestGame {
            id: world.game_id.clone(),
            script: script.to_string(),
            max_score: world.max_score,
            walkthrough_length: world.walkthrough.len(),
            rules: world.rules.len(),
            annotated_rules: world.annotated_rules().count(),
            cells: ManifestCells::from_counts(&cell_counts(world)),
        }
    }
}
