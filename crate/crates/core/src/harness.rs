//! Seeded batch experiments, CSV output and the t tests used to summarize
//! final healthy percentages.
//!
//! Game `g` of point `p` gets `game_id = p * games_per_point + g` and seed
//! `base_seed + game_id`. A comparison pair, when configured, replays the same
//! seeds; its rows continue the id range after the primary games.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::geometry::WorldConfig;
use crate::graph::{AgentId, AgentSnapshot, ComponentView, HealthState, ObservationGraph};
use crate::sim::{run_game, GameResult, Init, StepRecord, Termination};
use crate::strategies::strategy_by_name;
use crate::wpc::{self, FenceModel, IdSet, WpcTrace};

pub const GAMES_CSV: &str = "games.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const JOBS_ENV: &str = "CONTAM_JOBS";

fn default_games() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyPair {
    pub healthy: String,
    pub contaminated: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub agents_per_side: Vec<usize>,
    #[serde(default = "default_games")]
    pub games_per_point: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub strategy_healthy: String,
    pub strategy_contaminated: String,
    #[serde(default)]
    pub world: WorldConfig,
    /// Second pair played on the same seeds and compared with a Welch test.
    #[serde(default)]
    pub compare: Option<StrategyPair>,
    /// Directory receiving `games.csv` and `aggregate.csv`.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(agents_per_side: Vec<usize>, healthy: &str, contaminated: &str) -> Self {
        Self {
            agents_per_side,
            games_per_point: default_games(),
            base_seed: 0,
            strategy_healthy: healthy.to_string(),
            strategy_contaminated: contaminated.to_string(),
            world: WorldConfig::default(),
            compare: None,
            output: None,
            jobs: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.world.validate()?;
        if self.agents_per_side.is_empty() || self.agents_per_side.contains(&0) {
            return Err(Error::Config("agents_per_side needs at least one positive entry".into()));
        }
        if self.games_per_point == 0 {
            return Err(Error::Config("games_per_point must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let mut names = vec![&self.strategy_healthy, &self.strategy_contaminated];
        if let Some(c) = &self.compare {
            names.extend([&c.healthy, &c.contaminated]);
        }
        for name in names {
            strategy_by_name(name, &self.world)?;
        }
        Ok(())
    }

    fn primary(&self) -> StrategyPair {
        StrategyPair {
            healthy: self.strategy_healthy.clone(),
            contaminated: self.strategy_contaminated.clone(),
        }
    }

    fn total_games(&self) -> u64 {
        (self.agents_per_side.len() * self.games_per_point) as u64
    }
}

/// One line of `games.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRow {
    pub game_id: u64,
    pub seed: u64,
    pub agents_per_side: usize,
    pub strategy_healthy: String,
    pub strategy_contaminated: String,
    pub steps: u64,
    pub termination: Termination,
    pub final_healthy: usize,
    pub final_contaminated: usize,
    pub final_healthy_pct: f64,
}

/// One line of `aggregate.csv`. Test columns are empty when the samples are
/// degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub agents_per_side: usize,
    pub strategy_healthy: String,
    pub strategy_contaminated: String,
    pub n_games: usize,
    pub mean_final_healthy_pct: f64,
    pub std: f64,
    /// One-sample t against 50%.
    pub welch_t: Option<f64>,
    pub p_value: Option<f64>,
    pub comparison_mean: Option<f64>,
    pub comparison_t: Option<f64>,
    pub comparison_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchOutput {
    pub games: Vec<GameRow>,
    pub aggregates: Vec<AggregateRow>,
}

/// Worker count: `CONTAM_JOBS`, then the flag, then the config, then the
/// number of available cores.
pub fn resolve_jobs(flag: Option<usize>, config: Option<usize>) -> Result<usize> {
    let env = match std::env::var(JOBS_ENV) {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("{JOBS_ENV}={v:?} is not a count")))?,
        ),
        Err(_) => None,
    };
    let jobs = env
        .or(flag)
        .or(config)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    Ok(jobs)
}

struct Task {
    game_id: u64,
    seed: u64,
    per_side: usize,
}

fn play(cfg: &ExperimentConfig, pair: &StrategyPair, id_offset: u64, jobs: usize) -> Result<Vec<GameRow>> {
    let healthy = strategy_by_name(&pair.healthy, &cfg.world)?;
    let contaminated = strategy_by_name(&pair.contaminated, &cfg.world)?;
    let tasks: Vec<Task> = cfg
        .agents_per_side
        .iter()
        .enumerate()
        .flat_map(|(p, &per_side)| {
            (0..cfg.games_per_point).map(move |g| {
                let idx = (p * cfg.games_per_point + g) as u64;
                Task {
                    game_id: id_offset + idx,
                    seed: cfg.base_seed.wrapping_add(idx),
                    per_side,
                }
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let init = Init::Random {
                    n_healthy: t.per_side,
                    n_contaminated: t.per_side,
                };
                let res = run_game(&cfg.world, healthy.clone(), contaminated.clone(), &init, t.seed)?;
                Ok(game_row(t, pair, &res))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| r.game_id);
    Ok(rows)
}

fn game_row(t: &Task, pair: &StrategyPair, res: &GameResult) -> GameRow {
    GameRow {
        game_id: t.game_id,
        seed: t.seed,
        agents_per_side: t.per_side,
        strategy_healthy: pair.healthy.clone(),
        strategy_contaminated: pair.contaminated.clone(),
        steps: res.steps,
        termination: res.termination,
        final_healthy: res.final_healthy,
        final_contaminated: res.final_contaminated,
        final_healthy_pct: res.final_healthy_pct,
    }
}

/// Plays every configured game on `jobs` worker threads and aggregates per
/// point. Output is independent of `jobs`.
pub fn run_batch(cfg: &ExperimentConfig, jobs: usize) -> Result<BatchOutput> {
    cfg.validate()?;
    let primary = cfg.primary();
    let mut games = play(cfg, &primary, 0, jobs)?;
    let comparison = match &cfg.compare {
        Some(pair) => Some(play(cfg, pair, cfg.total_games(), jobs)?),
        None => None,
    };
    let aggregates = cfg
        .agents_per_side
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            let slice = |rows: &[GameRow]| -> Vec<f64> {
                rows[p * cfg.games_per_point..(p + 1) * cfg.games_per_point]
                    .iter()
                    .map(|r| r.final_healthy_pct)
                    .collect()
            };
            let main = slice(&games);
            let other = comparison.as_deref().map(slice);
            aggregate(n, &primary, &main, other.as_deref())
        })
        .collect();
    if let Some(rows) = comparison {
        games.extend(rows);
    }
    Ok(BatchOutput { games, aggregates })
}

fn aggregate(per_side: usize, pair: &StrategyPair, sample: &[f64], comparison: Option<&[f64]>) -> AggregateRow {
    let (welch_t, p_value) = split(one_sample_t(sample, 50.0).ok());
    let (comparison_t, comparison_p) = split(comparison.and_then(|c| welch_test(sample, c).ok()));
    AggregateRow {
        agents_per_side: per_side,
        strategy_healthy: pair.healthy.clone(),
        strategy_contaminated: pair.contaminated.clone(),
        n_games: sample.len(),
        mean_final_healthy_pct: mean(sample),
        std: std_dev(sample),
        welch_t,
        p_value,
        comparison_mean: comparison.map(mean),
        comparison_t,
        comparison_p,
    }
}

fn split(v: Option<(f64, f64)>) -> (Option<f64>, Option<f64>) {
    (v.map(|x| x.0), v.map(|x| x.1))
}

pub fn write_games_csv<W: Write>(rows: &[GameRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_games_csv(path: &Path) -> Result<Vec<GameRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn read_aggregate_csv(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Writes both CSV files into `dir`, creating it if needed.
pub fn write_batch(out: &BatchOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_games_csv(&out.games, fs::File::create(dir.join(GAMES_CSV))?)?;
    write_aggregate_csv(&out.aggregates, fs::File::create(dir.join(AGGREGATE_CSV))?)?;
    Ok(())
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Sample standard deviation; zero for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        0.0
    } else {
        sample_variance(xs).sqrt()
    }
}

fn check_sample(xs: &[f64], label: &str) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::Degenerate(format!("{label} needs at least two values")));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate(format!("{label} has a non-finite value")));
    }
    Ok(())
}

fn t_dist(df: f64) -> Result<StudentsT> {
    StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Degenerate(format!("t distribution with df {df}: {e}")))
}

/// Welch statistic and Satterthwaite degrees of freedom.
fn welch_parts(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    check_sample(a, "first sample")?;
    check_sample(b, "second sample")?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (qa, qb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = qa + qb;
    if se2 <= 0.0 {
        return Err(Error::Degenerate("both samples have zero variance".into()));
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok((t, df))
}

/// Two-sided Welch unequal-variance t test: `(t, p)`.
pub fn welch_test(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let (t, df) = welch_parts(a, b)?;
    let p = (2.0 * t_dist(df)?.sf(t.abs())).min(1.0);
    Ok((t, p))
}

/// One-sided Welch test of `mean(a) > mean(b)`: `(t, p)`.
pub fn welch_greater(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let (t, df) = welch_parts(a, b)?;
    Ok((t, t_dist(df)?.sf(t)))
}

/// Two-sided one-sample t test against `mu`: `(t, p)`.
pub fn one_sample_t(xs: &[f64], mu: f64) -> Result<(f64, f64)> {
    check_sample(xs, "sample")?;
    let n = xs.len() as f64;
    let var = sample_variance(xs);
    if var <= 0.0 {
        return Err(Error::Degenerate("sample has zero variance".into()));
    }
    let t = (mean(xs) - mu) / (var / n).sqrt();
    let p = (2.0 * t_dist(n - 1.0)?.sf(t.abs())).min(1.0);
    Ok((t, p))
}

/// Initial-state file: a world config plus explicit agents or side sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    #[serde(default)]
    pub cfg: WorldConfig,
    #[serde(flatten)]
    pub init: Init,
}

/// JSON-lines trajectory dump, one record per line.
pub fn write_trajectory<W: Write>(records: &[StepRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory<R: BufRead>(input: R) -> Result<Vec<StepRecord>> {
    input
        .lines()
        .filter(|l| !l.as_ref().is_ok_and(|s| s.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedComponent {
    #[serde(default)]
    pub cfg: WorldConfig,
    pub agents: Vec<AgentSnapshot>,
    /// Side whose agents form the member set.
    #[serde(default = "default_state")]
    pub state: HealthState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjacencyComponent {
    pub adjacency: BTreeMap<AgentId, IdSet>,
    /// Initially exposed members; every member when absent.
    #[serde(default)]
    pub fence: Option<IdSet>,
}

/// Input of the `wpc` command: placed agents, or a bare adjacency when the
/// document has an `adjacency` key.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentFile {
    Geometric(PlacedComponent),
    Abstract(AdjacencyComponent),
}

impl ComponentFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("adjacency").is_some() {
            Ok(Self::Abstract(serde_json::from_value(value)?))
        } else {
            Ok(Self::Geometric(serde_json::from_value(value)?))
        }
    }
}

fn default_state() -> HealthState {
    HealthState::Healthy
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WpcReport {
    pub value: i64,
    pub fence: IdSet,
    pub monotonic: bool,
    pub trace: WpcTrace,
}

pub fn wpc_report(file: &ComponentFile) -> Result<WpcReport> {
    match file {
        ComponentFile::Geometric(PlacedComponent { cfg, agents, state }) => {
            cfg.validate()?;
            let graph = ObservationGraph::build(agents, cfg)?;
            let members: IdSet = agents.iter().filter(|a| a.state == *state).map(|a| a.id).collect();
            let comp = ComponentView::induced(&graph, *state, &members);
            let model = FenceModel::Geometric { world: agents, cfg };
            report_for(&comp, &model)
        }
        ComponentFile::Abstract(AdjacencyComponent { adjacency, fence }) => {
            let edges: Vec<(AgentId, AgentId)> = adjacency
                .iter()
                .flat_map(|(&a, nb)| nb.iter().map(move |&b| (a, b)))
                .collect();
            let ids: Vec<AgentId> = adjacency.keys().copied().collect();
            let comp = wpc::abstract_component(&edges, &ids)?;
            let model = match fence {
                None => FenceModel::AllBare,
                Some(f) => FenceModel::Exposed(f.clone()),
            };
            report_for(&comp, &model)
        }
    }
}

fn report_for(comp: &ComponentView, model: &FenceModel) -> Result<WpcReport> {
    let (value, trace) = wpc::wpc_traced(comp, model)?;
    Ok(WpcReport {
        value,
        fence: wpc::initial_fence(comp, model)?,
        monotonic: wpc::is_monotonic(comp, model)?,
        trace,
    })
}
