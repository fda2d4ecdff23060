//! Batch experiments: flat `key=value` configs, multi-seed runs with
//! log-spaced checkpoints, CSV metrics and aggregation over seeds.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::baselines::{Averaging, BaselineError, BaselineKind, BaselineStore};
use crate::game::{best_response_value, exploitability, GameError, GameTree, Player, StrategyProfile};
use crate::games;
use crate::os::{OsConfig, OsSolver, UpdateMode};
use crate::pos::{PosConfig, PosSolver};
use crate::sampling::{SampleError, SamplingScheme};
use crate::solver::{CfrConfig, CfrSolver, StrategyAveraging};
use crate::variance::{measure_cfv_variance, MeasureSampler, VarianceError, VarianceReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Samples per pair used by the `variance` command when the config leaves it at 0.
pub const DEFAULT_VARIANCE_SAMPLES: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Variance(#[from] VarianceError),
    #[error("aggregation error: {0}")]
    Aggregate(String),
}

impl ExperimentError {
    /// Process exit code: 2 for bad input, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<GameError> for ExperimentError {
    fn from(e: GameError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

impl From<BaselineError> for ExperimentError {
    fn from(e: BaselineError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Cfr,
    CfrPlus,
    Mccfr,
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cfr" => Ok(SolverKind::Cfr),
            "cfrplus" => Ok(SolverKind::CfrPlus),
            "mccfr" => Ok(SolverKind::Mccfr),
            _ => Err(format!("unknown solver '{s}'")),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Cfr => "cfr",
            SolverKind::CfrPlus => "cfrplus",
            SolverKind::Mccfr => "mccfr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Os,
    Pos,
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "os" => Ok(SamplerKind::Os),
            "pos" => Ok(SamplerKind::Pos),
            _ => Err(format!("unknown sampler '{s}'")),
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplerKind::Os => "os",
            SamplerKind::Pos => "pos",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineInit {
    Zero,
    /// Seed history-keyed baselines with the uniform profile's exact values.
    UniformProfile,
}

impl FromStr for BaselineInit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(BaselineInit::Zero),
            "uniform_profile" => Ok(BaselineInit::UniformProfile),
            _ => Err(format!("unknown baseline_init '{s}'")),
        }
    }
}

impl std::fmt::Display for BaselineInit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaselineInit::Zero => "zero",
            BaselineInit::UniformProfile => "uniform_profile",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub run_id: String,
    pub game: String,
    pub solver: SolverKind,
    /// Only set for MCCFR.
    pub sampler: Option<SamplerKind>,
    pub baseline: BaselineKind,
    pub averaging: Averaging,
    pub sampling: SamplingScheme,
    pub updates: UpdateMode,
    pub strategy_averaging: StrategyAveraging,
    /// Regret-matching+ updates for MCCFR.
    pub plus: bool,
    pub linear_averaging: bool,
    pub iterations: u64,
    pub checkpoints: usize,
    pub seeds: Vec<u64>,
    pub full_walk_bootstrap: bool,
    /// Samples per pair for variance at checkpoints; 0 disables.
    pub variance_samples: usize,
    pub baseline_init: BaselineInit,
}

const KEYS: [&str; 18] = [
    "run_id",
    "game",
    "solver",
    "sampler",
    "baseline",
    "averaging",
    "sampling",
    "updates",
    "strategy_averaging",
    "plus",
    "linear_averaging",
    "iterations",
    "checkpoints",
    "seed",
    "bootstrap",
    "variance_samples",
    "baseline_init",
    "version",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ExperimentError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| config_err(format!("bad value for '{key}': {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ExperimentError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(config_err(format!("bad boolean for '{key}': {value}"))),
    }
}

impl RunConfig {
    /// Parses and validates a config. Blank lines and `#` comments (whole-line
    /// or trailing) are skipped; `seed` may repeat, every other key may appear once.
    pub fn parse(text: &str) -> Result<RunConfig, ExperimentError> {
        let mut map: HashMap<&str, &str> = HashMap::new();
        let mut seeds = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected key=value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(config_err(format!("line {}: unknown key '{key}'", n + 1)));
            }
            if key == "seed" {
                seeds.push(parse_value::<u64>(key, value)?);
            } else if map.insert(key, value).is_some() {
                return Err(config_err(format!("line {}: duplicate key '{key}'", n + 1)));
            }
        }
        let get = |k: &str| map.get(k).copied();
        let game = get("game").ok_or_else(|| config_err("missing 'game'"))?.to_string();
        let solver: SolverKind = parse_value("solver", get("solver").unwrap_or("mccfr"))?;
        let sampler = match (solver, get("sampler")) {
            (SolverKind::Mccfr, s) => Some(parse_value::<SamplerKind>("sampler", s.unwrap_or("os"))?),
            (_, Some(_)) => return Err(config_err(format!("solver={solver} does not take a sampler"))),
            (_, None) => None,
        };
        let default_updates = match (solver, sampler) {
            (SolverKind::Cfr, _) | (_, Some(SamplerKind::Pos)) => "simultaneous",
            _ => "alternating",
        };
        let bootstrap = match get("bootstrap").unwrap_or("none") {
            "none" => false,
            "full_walk" => true,
            other => return Err(config_err(format!("unknown bootstrap '{other}'"))),
        };
        let plus = match get("plus") {
            Some(v) => parse_bool("plus", v)?,
            None => solver != SolverKind::Cfr,
        };
        let linear_averaging = match get("linear_averaging") {
            Some(v) => parse_bool("linear_averaging", v)?,
            None => plus,
        };
        if seeds.is_empty() {
            seeds.push(0);
        }
        let config = RunConfig {
            run_id: get("run_id").unwrap_or("run").to_string(),
            game,
            solver,
            sampler,
            baseline: parse_value("baseline", get("baseline").unwrap_or("none"))?,
            averaging: parse_value("averaging", get("averaging").unwrap_or("simple"))?,
            sampling: parse_value("sampling", get("sampling").unwrap_or("uniform"))?,
            updates: parse_value("updates", get("updates").unwrap_or(default_updates))?,
            strategy_averaging: parse_value("strategy_averaging", get("strategy_averaging").unwrap_or("weighted"))?,
            plus,
            linear_averaging,
            iterations: parse_value("iterations", get("iterations").unwrap_or("1000"))?,
            checkpoints: parse_value("checkpoints", get("checkpoints").unwrap_or("20"))?,
            seeds,
            full_walk_bootstrap: bootstrap,
            variance_samples: parse_value("variance_samples", get("variance_samples").unwrap_or("0"))?,
            baseline_init: parse_value("baseline_init", get("baseline_init").unwrap_or("zero"))?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        games::by_name(&self.game)?;
        if self.iterations == 0 || self.checkpoints == 0 {
            return Err(config_err("iterations and checkpoints must be positive"));
        }
        if self.run_id.is_empty() || self.run_id.contains(',') {
            return Err(config_err("run_id must be non-empty and contain no commas"));
        }
        let exact = self.solver != SolverKind::Mccfr;
        if exact {
            if self.sampler.is_some() {
                return Err(config_err(format!("solver={} does not take a sampler", self.solver)));
            }
            if self.baseline != BaselineKind::Zero || self.variance_samples > 0 || self.full_walk_bootstrap {
                return Err(config_err("baselines, variance and bootstrap need solver=mccfr"));
            }
            if self.solver == SolverKind::Cfr && self.plus {
                return Err(config_err("solver=cfr cannot use plus=true; use solver=cfrplus"));
            }
            if self.solver == SolverKind::CfrPlus && !self.plus {
                return Err(config_err("solver=cfrplus needs plus=true"));
            }
        }
        if self.sampling == SamplingScheme::OpponentOnPolicy && self.updates == UpdateMode::Simultaneous {
            return Err(config_err("opponent_onpolicy sampling needs alternating updates"));
        }
        match self.sampler {
            Some(SamplerKind::Pos) => {
                if self.updates != UpdateMode::Simultaneous {
                    return Err(config_err("sampler=pos uses simultaneous updates"));
                }
                if self.sampling != SamplingScheme::Uniform {
                    return Err(config_err("sampler=pos samples successors uniformly"));
                }
            }
            Some(SamplerKind::Os)
                if self.baseline == BaselineKind::LearnedInfoset && self.updates == UpdateMode::Simultaneous =>
            {
                return Err(config_err("learned_infoset with sampler=os needs alternating updates"));
            }
            _ => {}
        }
        if self.full_walk_bootstrap && self.sampler != Some(SamplerKind::Pos) {
            return Err(config_err("bootstrap=full_walk needs sampler=pos"));
        }
        if self.variance_samples == 1 {
            return Err(config_err("variance_samples must be 0 or at least 2"));
        }
        if self.baseline_init == BaselineInit::UniformProfile
            && !matches!(self.baseline, BaselineKind::LearnedHistory | BaselineKind::Predictive)
        {
            return Err(config_err("baseline_init=uniform_profile needs learned_history or predictive"));
        }
        if self.baseline == BaselineKind::Static {
            let tree = games::by_name(&self.game)?;
            games::always_call_profile(&tree)?;
        }
        Ok(())
    }

    /// Config text that parses back to this config. With `seed`, only that
    /// seed is listed and the code version is recorded.
    pub fn to_config_string(&self, seed: Option<u64>) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("run_id", self.run_id.clone());
        kv("game", self.game.clone());
        kv("solver", self.solver.to_string());
        if let Some(sampler) = self.sampler {
            kv("sampler", sampler.to_string());
        }
        kv("baseline", self.baseline.to_string());
        kv("averaging", self.averaging.to_string());
        kv("sampling", self.sampling.to_string());
        kv("updates", self.updates.to_string());
        kv("strategy_averaging", self.strategy_averaging.to_string());
        kv("plus", self.plus.to_string());
        kv("linear_averaging", self.linear_averaging.to_string());
        kv("iterations", self.iterations.to_string());
        kv("checkpoints", self.checkpoints.to_string());
        kv("bootstrap", if self.full_walk_bootstrap { "full_walk" } else { "none" }.into());
        kv("variance_samples", self.variance_samples.to_string());
        kv("baseline_init", self.baseline_init.to_string());
        if seed.is_some() {
            kv("version", VERSION.into());
        }
        match seed {
            Some(seed) => kv("seed", seed.to_string()),
            None => {
                for &seed in &self.seeds {
                    kv("seed", seed.to_string());
                }
            }
        }
        s
    }
}

/// Log-spaced checkpoints `round(T^(k/(K-1)))`, deduplicated, always ending at `T`.
pub fn checkpoint_schedule(iterations: u64, count: usize) -> Vec<u64> {
    if count <= 1 || iterations <= 1 {
        return vec![iterations];
    }
    let t = iterations as f64;
    let mut out: Vec<u64> = (0..count)
        .map(|k| t.powf(k as f64 / (count - 1) as f64).round() as u64)
        .map(|c| c.clamp(1, iterations))
        .collect();
    out.dedup();
    if *out.last().unwrap() != iterations {
        out.push(iterations);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub run_id: String,
    pub seed: u64,
    pub iteration: u64,
    /// Cumulative.
    pub nodes_touched: u64,
    pub exploitability: f64,
    pub mean_cfv_variance: Option<f64>,
}

pub const METRICS_HEADER: [&str; 6] = [
    "run_id",
    "seed",
    "iteration",
    "nodes_touched",
    "exploitability",
    "mean_cfv_variance",
];

enum Runner<'a> {
    Cfr(CfrSolver<'a>),
    Os(OsSolver<'a>),
    Pos(PosSolver<'a>),
}

impl Runner<'_> {
    fn step(&mut self) -> Result<(), SampleError> {
        match self {
            Runner::Cfr(s) => {
                s.step();
            }
            Runner::Os(s) => {
                s.step()?;
            }
            Runner::Pos(s) => {
                s.step()?;
            }
        }
        Ok(())
    }

    fn iteration(&self) -> u64 {
        match self {
            Runner::Cfr(s) => s.iteration(),
            Runner::Os(s) => s.iteration(),
            Runner::Pos(s) => s.iteration(),
        }
    }

    fn nodes_touched(&self) -> u64 {
        match self {
            Runner::Cfr(s) => s.nodes_touched(),
            Runner::Os(s) => s.nodes_touched(),
            Runner::Pos(s) => s.nodes_touched(),
        }
    }

    fn average_profile(&self) -> StrategyProfile {
        match self {
            Runner::Cfr(s) => s.average_profile(),
            Runner::Os(s) => s.average_profile(),
            Runner::Pos(s) => s.average_profile(),
        }
    }

    /// Current strategy and baseline snapshot used for variance measurement.
    fn frozen(&self, tree: &GameTree) -> Option<(StrategyProfile, BaselineStore)> {
        let (profile, store) = match self {
            Runner::Cfr(_) => return None,
            Runner::Os(s) => (s.current_profile(), s.store().clone()),
            Runner::Pos(s) => (s.current_profile(), s.store().clone()),
        };
        let mut store = store;
        store.refresh_oracle(tree, &profile);
        Some((profile, store))
    }
}

/// Everything a single seed produces.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub rows: Vec<MetricsRow>,
    pub average: StrategyProfile,
    /// Variance report at the final checkpoint, when measured.
    pub final_variance: Option<VarianceReport>,
}

fn measurement_seed(seed: u64, iteration: u64) -> u64 {
    seed.wrapping_add(iteration.wrapping_mul(0x9e37_79b9_7f4a_7c15)) ^ 0x5eed
}

fn build_runner<'a>(config: &RunConfig, tree: &'a GameTree, seed: u64) -> Result<Runner<'a>, ExperimentError> {
    if config.solver != SolverKind::Mccfr {
        let cfr = CfrConfig {
            plus: config.plus,
            alternating: config.updates == UpdateMode::Alternating,
            linear_averaging: config.linear_averaging,
        };
        return Ok(Runner::Cfr(CfrSolver::new(tree, cfr)));
    }
    let mut store = BaselineStore::new(tree, config.baseline, config.averaging)?;
    if config.baseline_init == BaselineInit::UniformProfile {
        store.seed_from_profile(tree, &StrategyProfile::uniform(tree));
    }
    Ok(match config.sampler.unwrap_or(SamplerKind::Os) {
        SamplerKind::Os => {
            let os = OsConfig {
                scheme: config.sampling,
                plus: config.plus,
                linear_averaging: config.linear_averaging,
                strategy_averaging: config.strategy_averaging,
            };
            Runner::Os(OsSolver::new(tree, store, os, config.updates, seed)?)
        }
        SamplerKind::Pos => {
            let pos = PosConfig {
                plus: config.plus,
                linear_averaging: config.linear_averaging,
                strategy_averaging: config.strategy_averaging,
            };
            let mut solver = PosSolver::new(tree, store, pos, seed)?;
            if config.full_walk_bootstrap {
                solver.bootstrap()?;
            }
            Runner::Pos(solver)
        }
    })
}

fn measure(
    config: &RunConfig,
    tree: &GameTree,
    runner: &Runner<'_>,
    samples: usize,
    seed: u64,
) -> Result<Option<VarianceReport>, ExperimentError> {
    let Some((profile, store)) = runner.frozen(tree) else {
        return Ok(None);
    };
    let sampler = match config.sampler {
        Some(SamplerKind::Pos) => MeasureSampler::Public,
        _ => MeasureSampler::Outcome(config.sampling),
    };
    let mseed = measurement_seed(seed, runner.iteration());
    Ok(Some(measure_cfv_variance(tree, &profile, &store, sampler, samples, mseed)?))
}

/// Runs one seed of `config` to completion.
pub fn run_seed(config: &RunConfig, seed: u64) -> Result<SeedRun, ExperimentError> {
    config.validate()?;
    let tree = games::by_name(&config.game)?;
    let mut runner = build_runner(config, &tree, seed)?;
    let mut rows = Vec::new();
    let mut final_variance = None;
    for checkpoint in checkpoint_schedule(config.iterations, config.checkpoints) {
        while runner.iteration() < checkpoint {
            runner.step()?;
        }
        let average = runner.average_profile();
        let report = if config.variance_samples >= 2 {
            measure(config, &tree, &runner, config.variance_samples, seed)?
        } else {
            None
        };
        rows.push(MetricsRow {
            run_id: config.run_id.clone(),
            seed,
            iteration: runner.iteration(),
            nodes_touched: runner.nodes_touched(),
            exploitability: exploitability(&tree, &average),
            mean_cfv_variance: report.as_ref().map(|r| r.mean),
        });
        final_variance = report;
    }
    Ok(SeedRun {
        rows,
        average: runner.average_profile(),
        final_variance,
    })
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn seed_dir(out: &Path, seed: u64) -> PathBuf {
    out.join(format!("seed-{seed}"))
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.run_id.clone(),
            r.seed.to_string(),
            r.iteration.to_string(),
            r.nodes_touched.to_string(),
            num(r.exploitability),
            r.mean_cfv_variance.map(num).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<'r>(record: &'r csv::StringRecord, idx: &HashMap<String, usize>, name: &str) -> Result<&'r str, ExperimentError> {
    idx.get(name)
        .and_then(|&i| record.get(i))
        .ok_or_else(|| ExperimentError::Aggregate(format!("missing column '{name}'")))
}

fn number<T: FromStr>(s: &str, name: &str) -> Result<T, ExperimentError> {
    s.parse()
        .map_err(|_| ExperimentError::Aggregate(format!("bad {name} value '{s}'")))
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    let idx: HashMap<String, usize> = r.headers()?.iter().enumerate().map(|(i, h)| (h.to_string(), i)).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let variance = field(&record, &idx, "mean_cfv_variance")?;
        rows.push(MetricsRow {
            run_id: field(&record, &idx, "run_id")?.to_string(),
            seed: number(field(&record, &idx, "seed")?, "seed")?,
            iteration: number(field(&record, &idx, "iteration")?, "iteration")?,
            nodes_touched: number(field(&record, &idx, "nodes_touched")?, "nodes_touched")?,
            exploitability: number(field(&record, &idx, "exploitability")?, "exploitability")?,
            mean_cfv_variance: if variance.is_empty() {
                None
            } else {
                Some(number(variance, "mean_cfv_variance")?)
            },
        });
    }
    Ok(rows)
}

/// Writes `infoset,action,probability` rows keyed by infoset key and action name.
pub fn write_profile(path: &Path, tree: &GameTree, profile: &StrategyProfile) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["infoset", "action", "probability"])?;
    for info in tree.infosets() {
        for (k, &label) in info.labels.iter().enumerate() {
            w.write_record([
                info.key.as_str(),
                tree.action_name(label),
                &num(profile.infoset(tree, info.id)[k]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a profile written by [`write_profile`]. Every infoset must be listed.
pub fn read_profile(path: &Path, tree: &GameTree) -> Result<StrategyProfile, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| config_err(format!("profile: {e}")))?;
    let keys: HashMap<&str, usize> = tree.infosets().iter().map(|i| (i.key.as_str(), i.id)).collect();
    let mut probs = vec![f64::NAN; tree.num_infoset_actions()];
    for record in r.records() {
        let record = record.map_err(|e| config_err(format!("profile: {e}")))?;
        if record.len() != 3 {
            return Err(config_err("profile rows need infoset,action,probability"));
        }
        let info = keys
            .get(&record[0])
            .map(|&id| tree.infoset(id))
            .ok_or_else(|| config_err(format!("profile: unknown infoset '{}'", &record[0])))?;
        let k = info
            .labels
            .iter()
            .position(|&l| tree.action_name(l) == &record[1])
            .ok_or_else(|| config_err(format!("profile: unknown action '{}' at '{}'", &record[1], info.key)))?;
        probs[info.offset + k] = record[2]
            .parse()
            .map_err(|_| config_err(format!("profile: bad probability '{}'", &record[2])))?;
    }
    if let Some(missing) = tree.infosets().iter().find(|i| probs[i.range()].iter().any(|p| p.is_nan())) {
        return Err(config_err(format!("profile: missing entries for '{}'", missing.key)));
    }
    StrategyProfile::from_vec(tree, probs).map_err(|e| config_err(format!("profile: {e}")))
}

/// Runs every seed and writes `seed-<n>/{metrics.csv,manifest.txt,profile.csv}`
/// plus a top-level `manifest.txt`.
pub fn run_experiment(config: &RunConfig, out: &Path) -> Result<Vec<SeedRun>, ExperimentError> {
    config.validate()?;
    let tree = games::by_name(&config.game)?;
    fs::create_dir_all(out)?;
    fs::write(out.join("manifest.txt"), config.to_config_string(None))?;
    let mut runs = Vec::new();
    for &seed in &config.seeds {
        let run = run_seed(config, seed)?;
        let dir = seed_dir(out, seed);
        fs::create_dir_all(&dir)?;
        write_metrics(&dir.join("metrics.csv"), &run.rows)?;
        fs::write(dir.join("manifest.txt"), config.to_config_string(Some(seed)))?;
        write_profile(&dir.join("profile.csv"), &tree, &run.average)?;
        runs.push(run);
    }
    Ok(runs)
}

/// Trains each seed to the configured iteration count, then writes
/// `seed-<n>/variance.csv` with one row per (infoset, action) and a final
/// `mean` summary row.
pub fn run_variance(config: &RunConfig, out: &Path) -> Result<Vec<VarianceReport>, ExperimentError> {
    config.validate()?;
    if config.solver != SolverKind::Mccfr {
        return Err(config_err("variance needs solver=mccfr"));
    }
    let tree = games::by_name(&config.game)?;
    let samples = if config.variance_samples == 0 {
        DEFAULT_VARIANCE_SAMPLES
    } else {
        config.variance_samples
    };
    fs::create_dir_all(out)?;
    let mut reports = Vec::new();
    for &seed in &config.seeds {
        let mut runner = build_runner(config, &tree, seed)?;
        while runner.iteration() < config.iterations {
            runner.step()?;
        }
        let report = measure(config, &tree, &runner, samples, seed)?.expect("sampled solver");
        let dir = seed_dir(out, seed);
        fs::create_dir_all(&dir)?;
        write_variance(&dir.join("variance.csv"), &report)?;
        fs::write(dir.join("manifest.txt"), config.to_config_string(Some(seed)))?;
        reports.push(report);
    }
    Ok(reports)
}

pub fn write_variance(path: &Path, report: &VarianceReport) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["infoset_id", "action", "variance", "samples"])?;
    for p in &report.pairs {
        w.write_record([
            p.infoset.to_string(),
            p.action.to_string(),
            num(p.variance),
            p.samples.to_string(),
        ])?;
    }
    let samples: usize = report.pairs.iter().map(|p| p.samples).sum();
    w.write_record(["mean".to_string(), String::new(), num(report.mean), samples.to_string()])?;
    w.flush()?;
    Ok(())
}

/// Mean and 95% confidence half-width (normal approximation, n - 1 deviation).
pub fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * var.sqrt() / n.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub iteration: u64,
    pub nodes_touched_mean: f64,
    pub exploitability_mean: f64,
    pub exploitability_ci95: f64,
    pub variance_mean: Option<f64>,
    pub variance_ci95: Option<f64>,
    pub runs: usize,
}

pub const AGGREGATE_HEADER: [&str; 7] = [
    "iteration",
    "nodes_touched",
    "exploitability_mean",
    "exploitability_ci95",
    "variance_mean",
    "variance_ci95",
    "runs",
];

/// Combines per-seed series with identical checkpoint grids.
pub fn aggregate_rows(series: &[Vec<MetricsRow>]) -> Result<Vec<AggregateRow>, ExperimentError> {
    if series.len() < 2 {
        return Err(ExperimentError::Aggregate(format!("need at least 2 runs, got {}", series.len())));
    }
    let grid: Vec<u64> = series[0].iter().map(|r| r.iteration).collect();
    for s in &series[1..] {
        if s.iter().map(|r| r.iteration).ne(grid.iter().copied()) {
            return Err(ExperimentError::Aggregate("runs have different checkpoint grids".into()));
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    for (k, &iteration) in grid.iter().enumerate() {
        let expl: Vec<f64> = series.iter().map(|s| s[k].exploitability).collect();
        let nodes: Vec<f64> = series.iter().map(|s| s[k].nodes_touched as f64).collect();
        let var: Option<Vec<f64>> = series.iter().map(|s| s[k].mean_cfv_variance).collect();
        let (em, eci) = mean_ci(&expl);
        let v = var.map(|v| mean_ci(&v));
        out.push(AggregateRow {
            iteration,
            nodes_touched_mean: mean_ci(&nodes).0,
            exploitability_mean: em,
            exploitability_ci95: eci,
            variance_mean: v.map(|x| x.0),
            variance_ci95: v.map(|x| x.1),
            runs: series.len(),
        });
    }
    Ok(out)
}

/// Metrics files under `path`: the file itself, `path/metrics.csv`, or
/// `path/seed-*/metrics.csv` in name order.
pub fn collect_metrics_files(path: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let direct = path.join("metrics.csv");
    if direct.is_file() {
        return Ok(vec![direct]);
    }
    let mut found = Vec::new();
    for entry in fs::read_dir(path)? {
        let p = entry?.path().join("metrics.csv");
        if p.is_file() {
            found.push(p);
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(ExperimentError::Aggregate(format!("no metrics.csv under {}", path.display())));
    }
    Ok(found)
}

pub fn aggregate(inputs: &[PathBuf], out: &Path) -> Result<Vec<AggregateRow>, ExperimentError> {
    let mut series = Vec::new();
    for input in inputs {
        for file in collect_metrics_files(input)? {
            series.push(read_metrics(&file)?);
        }
    }
    let rows = aggregate_rows(&series)?;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(AGGREGATE_HEADER)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for r in &rows {
        w.write_record([
            r.iteration.to_string(),
            num(r.nodes_touched_mean),
            num(r.exploitability_mean),
            num(r.exploitability_ci95),
            opt(r.variance_mean),
            opt(r.variance_ci95),
            r.runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponseReport {
    pub player_one: f64,
    pub player_two: f64,
    pub exploitability: f64,
}

pub fn best_response_report(game: &str, profile_path: &Path) -> Result<BestResponseReport, ExperimentError> {
    let tree = games::by_name(game)?;
    let profile = read_profile(profile_path, &tree)?;
    Ok(BestResponseReport {
        player_one: best_response_value(&tree, &profile, Player::One),
        player_two: best_response_value(&tree, &profile, Player::Two),
        exploitability: exploitability(&tree, &profile),
    })
}
