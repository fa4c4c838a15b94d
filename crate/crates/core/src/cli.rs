//! Scenario files, built-in presets and result files for the command-line tool.
//!
//! A scenario is a TOML document with the group parameters at the top level,
//! a list of `[[group]]` comparisons and a list of `[[accuracy]]` sweeps:
//!
//! ```toml
//! name = "example"
//! n = 25
//! m = 7
//! rate = 0.15
//!
//! [[group]]
//! label = "reverse-bonus"
//! base = { bonus = true }
//! variant = { bonus = true, reverse = [21] }
//! ```
//!
//! A group without a `variant` reports plain funding probabilities; with one
//! it also reports the per-proposal change from `base` to `variant`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{AccuracyRow, Arm, Condition, DeltaStats, Engine, DEFAULT_REPLICATIONS};
use crate::error::SimError;
use crate::model::{BehaviorProfile, Controversy, FundingStats, GroupConfig, Merit, Strategy};
use crate::oracle::{self, UtilityParams};

const PRESETS: [(&str, &str); 12] = [
    ("fig1", include_str!("../presets/fig1.toml")),
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8", include_str!("../presets/fig8.toml")),
    ("fig9", include_str!("../presets/fig9.toml")),
    ("fig10", include_str!("../presets/fig10.toml")),
    ("fig11", include_str!("../presets/fig11.toml")),
    ("fig12", include_str!("../presets/fig12.toml")),
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        /// Offending key, when the parser names one.
        field: Option<String>,
        message: String,
    },
    #[error("{origin}: invalid scenario: {constraint}")]
    Validation { origin: String, constraint: String },
    #[error("`{0}` is neither a preset nor a readable scenario file")]
    NotFound(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    /// 1 for problems with the input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::NotFound(_) => 1,
            CliError::Sim(SimError::Config(_)) => 1,
            CliError::Io { .. } | CliError::Sim(_) => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn default_p() -> f64 {
    1.0
}
fn default_replications() -> u64 {
    DEFAULT_REPLICATIONS
}
fn yes() -> bool {
    true
}
fn half() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub rate: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_replications")]
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub mutual_review: bool,
    /// Compare arms under common random numbers.
    #[serde(default = "yes")]
    pub paired: bool,
    /// Default perception noise of every reviewer.
    #[serde(default)]
    pub noise: f64,
    #[serde(default, rename = "group", skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub accuracy: Vec<AccuracySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionSpec>,
    pub base: ArmSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<ArmSpec>,
}

/// Only assignments where `reviewer` reviews `proposal` are counted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionSpec {
    pub reviewer: usize,
    pub proposal: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    #[serde(default = "yes")]
    pub bonus: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reverse: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub noisy: Vec<NoisySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub favor: Vec<FavorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reciprocal: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controversial: Vec<usize>,
    #[serde(default)]
    pub shift: f64,
    #[serde(default = "half")]
    pub plus_probability: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisySpec {
    pub merit: usize,
    pub sigma: f64,
}

/// PI `from` gives `to` the top score and reverse-scores the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FavorSpec {
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccuracySpec {
    pub label: String,
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub bonus: bool,
    pub m_values: Vec<usize>,
}

/// Command-line overrides applied on top of a scenario.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub rate: Option<f64>,
    pub p: Option<f64>,
    pub replications: Option<u64>,
    pub seed: Option<u64>,
    /// Forces the bonus setting of every arm and accuracy sweep.
    pub bonus: Option<bool>,
    pub paired: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, scenario: &mut Scenario) {
        if let Some(n) = self.n {
            scenario.n = n;
        }
        if let Some(m) = self.m {
            scenario.m = m;
        }
        if let Some(rate) = self.rate {
            scenario.rate = rate;
        }
        if let Some(p) = self.p {
            scenario.p = p;
        }
        if let Some(r) = self.replications {
            scenario.replications = r;
        }
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        if let Some(paired) = self.paired {
            scenario.paired = paired;
        }
        if let Some(bonus) = self.bonus {
            for g in &mut scenario.groups {
                g.base.bonus = bonus;
                if let Some(v) = &mut g.variant {
                    v.bonus = bonus;
                }
            }
            for a in &mut scenario.accuracy {
                a.bonus = bonus;
            }
        }
    }
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// TOML source of a built-in preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, CliError> {
    toml::from_str(text).map_err(|e| {
        let offset = e.span().map(|s| s.start).unwrap_or(0).min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = offset - before.rfind('\n').map(|i| i + 1).unwrap_or(0) + 1;
        let message = e.message().to_string();
        CliError::Parse {
            origin: origin.to_string(),
            line,
            column,
            field: backticked(&message),
            message,
        }
    })
}

fn backticked(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Resolved, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let origin = path.display().to_string();
    resolve(parse_scenario(&text, &origin)?, &origin)
}

/// Loads a preset by name, or else a scenario file at that path.
pub fn load(target: &str, overrides: &Overrides) -> Result<Resolved, CliError> {
    let (text, origin) = match preset_source(target) {
        Some(src) => (src.to_string(), format!("preset {target}")),
        None => {
            let path = Path::new(target);
            if !path.is_file() {
                return Err(CliError::NotFound(target.to_string()));
            }
            (
                fs::read_to_string(path).map_err(io_err(path))?,
                target.to_string(),
            )
        }
    };
    let mut scenario = parse_scenario(&text, &origin)?;
    overrides.apply(&mut scenario);
    resolve(scenario, &origin)
}

/// A validated scenario, ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub scenario: Scenario,
    pub config: GroupConfig,
    pub groups: Vec<ResolvedGroup>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedGroup {
    pub label: String,
    pub config: GroupConfig,
    pub condition: Condition,
    pub base: Arm,
    pub variant: Option<Arm>,
}

/// Checks every constraint of the scenario and builds the engine inputs.
pub fn resolve(scenario: Scenario, origin: &str) -> Result<Resolved, CliError> {
    let invalid = |constraint: String| CliError::Validation {
        origin: origin.to_string(),
        constraint,
    };
    if scenario.name.is_empty()
        || !scenario
            .name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
    {
        return Err(invalid(
            "name must be non-empty and use only [A-Za-z0-9._-]".into(),
        ));
    }
    if scenario.groups.is_empty() && scenario.accuracy.is_empty() {
        return Err(invalid(
            "scenario defines no [[group]] or [[accuracy]] experiment".into(),
        ));
    }
    let config = GroupConfig::new(scenario.n, scenario.m, scenario.rate)
        .with_utility_exponent(scenario.p)
        .with_mutual_review(scenario.mutual_review)
        .with_seed(scenario.seed);
    config.validate().map_err(|e| invalid(e.to_string()))?;
    if scenario.replications == 0 {
        return Err(invalid("replications must be at least 1".into()));
    }
    let mut labels: Vec<&str> = Vec::new();
    for label in scenario
        .groups
        .iter()
        .map(|g| &g.label)
        .chain(scenario.accuracy.iter().map(|a| &a.label))
    {
        if label.is_empty() || label.contains(',') || label.contains('"') {
            return Err(invalid(format!(
                "label `{label}` must be non-empty without commas or quotes"
            )));
        }
        if labels.contains(&label.as_str()) {
            return Err(invalid(format!("label `{label}` is used twice")));
        }
        labels.push(label);
    }

    let mut groups = Vec::with_capacity(scenario.groups.len());
    for g in &scenario.groups {
        let ctx = |e: String| invalid(format!("group `{}`: {e}", g.label));
        let mut cfg = config.clone();
        if let Some(m) = g.m {
            cfg.reviews_per_pi = m;
            cfg.validate().map_err(|e| ctx(e.to_string()))?;
        }
        let noise = g.noise.unwrap_or(scenario.noise);
        let condition = match g.condition {
            None => Condition::Always,
            Some(c) => {
                for who in [c.reviewer, c.proposal] {
                    if who < 1 || who > cfg.n_proposals {
                        return Err(ctx(format!(
                            "condition merit {who} is outside 1..={}",
                            cfg.n_proposals
                        )));
                    }
                }
                if c.reviewer == c.proposal {
                    return Err(ctx("condition reviewer and proposal must differ".into()));
                }
                Condition::Reviews {
                    reviewer: Merit(c.reviewer),
                    proposal: Merit(c.proposal),
                }
            }
        };
        let base = build_arm(&g.base, noise, cfg.n_proposals).map_err(&ctx)?;
        let variant = match &g.variant {
            Some(v) => Some(build_arm(v, noise, cfg.n_proposals).map_err(&ctx)?),
            None => None,
        };
        groups.push(ResolvedGroup {
            label: g.label.clone(),
            config: cfg,
            condition,
            base,
            variant,
        });
    }
    for a in &scenario.accuracy {
        let ctx = |e: String| invalid(format!("accuracy `{}`: {e}", a.label));
        if a.m_values.is_empty() {
            return Err(ctx("m_values is empty".into()));
        }
        if !(a.noise >= 0.0 && a.noise.is_finite()) {
            return Err(ctx(format!(
                "noise must be finite and non-negative, got {}",
                a.noise
            )));
        }
        for &m in &a.m_values {
            let mut cfg = config.clone();
            cfg.reviews_per_pi = m;
            cfg.validate().map_err(|e| ctx(e.to_string()))?;
        }
    }
    Ok(Resolved {
        scenario,
        config,
        groups,
    })
}

fn build_arm(spec: &ArmSpec, noise: f64, n: usize) -> Result<Arm, String> {
    let mut profile = BehaviorProfile::honest().with_noise(noise);
    let mut assigned: Vec<usize> = Vec::new();
    let mut claim = |who: usize| {
        if assigned.contains(&who) {
            Err(format!("PI {who} is given more than one strategy"))
        } else {
            assigned.push(who);
            Ok(())
        }
    };
    for &who in &spec.reverse {
        claim(who)?;
        profile = profile.with_strategy(Merit(who), Strategy::ReverseRanking);
    }
    for s in &spec.noisy {
        claim(s.merit)?;
        profile = profile.with_strategy(Merit(s.merit), Strategy::Noisy { sigma: s.sigma });
    }
    for f in &spec.favor {
        claim(f.from)?;
        profile =
            profile.with_strategy(Merit(f.from), Strategy::OneSidedFavor { ally: Merit(f.to) });
    }
    for &[a, b] in &spec.reciprocal {
        claim(a)?;
        claim(b)?;
        profile = profile.with_reciprocal_pair(Merit(a), Merit(b));
    }
    if !spec.controversial.is_empty() {
        profile = profile.with_controversy(Controversy {
            proposals: spec.controversial.iter().map(|&k| Merit(k)).collect(),
            shift: spec.shift,
            plus_probability: spec.plus_probability,
        });
    }
    profile.validate(n).map_err(|e| e.to_string())?;
    Ok(Arm::new(profile, spec.bonus))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Single(FundingStats),
    Delta(DeltaStats),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupResult {
    pub label: String,
    pub funded_count: usize,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResults {
    pub scenario: Scenario,
    pub groups: Vec<GroupResult>,
    pub accuracy: Vec<(String, Vec<AccuracyRow>)>,
}

/// Runs every experiment of a resolved scenario.
pub fn execute(resolved: &Resolved, engine: &Engine) -> Result<RunResults, CliError> {
    let s = &resolved.scenario;
    let mut groups = Vec::with_capacity(resolved.groups.len());
    for g in &resolved.groups {
        let outcome = match &g.variant {
            None => {
                let cfg = g.config.clone().with_bonus(g.base.bonus_enabled);
                Outcome::Single(engine.conditional_experiment(
                    &cfg,
                    &g.base.profile,
                    g.condition,
                    s.replications,
                    s.seed,
                )?)
            }
            Some(variant) => Outcome::Delta(engine.conditional_delta(
                &g.config,
                &g.base,
                variant,
                g.condition,
                s.replications,
                s.seed,
                s.paired,
            )?),
        };
        groups.push(GroupResult {
            label: g.label.clone(),
            funded_count: g.config.funded_count(),
            outcome,
        });
    }
    let mut accuracy = Vec::with_capacity(s.accuracy.len());
    for a in &s.accuracy {
        let cfg = resolved.config.clone().with_bonus(a.bonus);
        let rows = engine.ranking_accuracy(&cfg, a.noise, &a.m_values, s.replications, s.seed)?;
        accuracy.push((a.label.clone(), rows));
    }
    Ok(RunResults {
        scenario: s.clone(),
        groups,
        accuracy,
    })
}

fn num(x: f64) -> String {
    // Avoid printing "-0.000000".
    let s = format!("{x:.6}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn signed(x: f64) -> String {
    let s = num(x);
    if s.starts_with('-') {
        s
    } else {
        format!("+{s}")
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a Scenario,
    files: Vec<String>,
    groups: Vec<GroupMeta<'a>>,
}

#[derive(Serialize)]
struct GroupMeta<'a> {
    label: &'a str,
    funded_count: usize,
    replications: u64,
    degenerate_replications: u64,
    paired: Option<bool>,
}

/// Writes the result files into `dir` and returns their paths.
///
/// Files are named after the scenario: `NAME.funding.csv`,
/// `NAME.delta.csv`, `NAME.accuracy.csv`, `NAME.oracle.csv` and the metadata
/// sidecar `NAME.json`. CSVs that would be empty are not written.
pub fn write_results(results: &RunResults, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let name = &results.scenario.name;
    let mut written = Vec::new();
    let mut emit =
        |suffix: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<(), CliError> {
            let path = dir.join(format!("{name}.{suffix}"));
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            let record = |w: &mut csv::Writer<Vec<u8>>, r: &[String]| {
                w.write_record(r).expect("writing to memory");
            };
            record(
                &mut w,
                &header.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            );
            for r in &rows {
                record(&mut w, r);
            }
            let bytes = w.into_inner().expect("flushing to memory");
            fs::write(&path, bytes).map_err(io_err(&path))?;
            written.push(path);
            Ok(())
        };

    let mut funding = Vec::new();
    let mut deltas = Vec::new();
    let prob_rows = |label: &str, stats: &FundingStats, out: &mut Vec<Vec<String>>| {
        for (i, (p, se)) in stats
            .funded_probability
            .iter()
            .zip(&stats.std_error)
            .enumerate()
        {
            out.push(vec![
                label.to_string(),
                (i + 1).to_string(),
                num(*p),
                num(*se),
            ]);
        }
    };
    for g in &results.groups {
        let label = format!("{name}/{}", g.label);
        match &g.outcome {
            Outcome::Single(stats) => prob_rows(&label, stats, &mut funding),
            Outcome::Delta(d) => {
                prob_rows(&format!("{label}/base"), &d.base, &mut funding);
                prob_rows(&format!("{label}/variant"), &d.variant, &mut funding);
                for (i, (x, se)) in d.delta.iter().zip(&d.delta_std_error).enumerate() {
                    deltas.push(vec![label.clone(), (i + 1).to_string(), num(*x), num(*se)]);
                }
            }
        }
    }
    if !funding.is_empty() {
        emit(
            "funding.csv",
            &[
                "scenario",
                "proposal_merit",
                "funded_probability",
                "std_error",
            ],
            funding,
        )?;
    }
    if !deltas.is_empty() {
        emit(
            "delta.csv",
            &["scenario", "proposal_merit", "delta", "std_error"],
            deltas,
        )?;
    }
    let accuracy: Vec<Vec<String>> = results
        .accuracy
        .iter()
        .flat_map(|(label, rows)| {
            rows.iter().map(move |r| {
                vec![
                    format!("{name}/{label}"),
                    r.m.to_string(),
                    num(r.top_t_accuracy),
                    num(r.kendall_tau),
                ]
            })
        })
        .collect();
    if !accuracy.is_empty() {
        emit(
            "accuracy.csv",
            &["scenario", "m", "topT_accuracy", "kendall_tau"],
            accuracy,
        )?;
    }
    emit(
        "oracle.csv",
        &[
            "proposal_merit",
            "expected_mbc",
            "utility_truthful",
            "utility_evil",
            "utility_evil_with_bonus",
        ],
        oracle_rows(&results.scenario),
    )?;

    let meta_path = dir.join(format!("{name}.json"));
    let mut files: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .collect();
    files.push(format!("{name}.json"));
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario: &results.scenario,
        files,
        groups: results
            .groups
            .iter()
            .map(|g| {
                let (stats, paired) = match &g.outcome {
                    Outcome::Single(s) => (s, None),
                    Outcome::Delta(d) => (&d.base, Some(d.paired)),
                };
                GroupMeta {
                    label: &g.label,
                    funded_count: g.funded_count,
                    replications: stats.replications,
                    degenerate_replications: stats.degenerate_replications,
                    paired,
                }
            })
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');
    fs::write(&meta_path, json).map_err(io_err(&meta_path))?;
    written.push(meta_path);
    Ok(written)
}

fn oracle_rows(s: &Scenario) -> Vec<Vec<String>> {
    let cfg = GroupConfig::new(s.n, s.m, s.rate);
    let params = UtilityParams::new(s.n, s.m, s.p);
    (1..=s.n)
        .map(|i| {
            let i = Merit(i);
            vec![
                i.0.to_string(),
                num(oracle::expected_mbc(i, 0, &cfg)),
                num(oracle::utility_truthful(i, &params)),
                num(oracle::utility_evil(i, &params)),
                num(oracle::utility_evil_with_bonus(i, &params)),
            ]
        })
        .collect()
}

/// One human-readable line per group and accuracy sweep.
pub fn summary_lines(results: &RunResults) -> Vec<String> {
    let name = &results.scenario.name;
    let mut lines = Vec::new();
    for g in &results.groups {
        let line = match &g.outcome {
            Outcome::Single(stats) => {
                let n = stats.funded_probability.len();
                let from = n.saturating_sub(g.funded_count + 2);
                let cells: Vec<String> = (from..n)
                    .map(|i| format!("{}={}", i + 1, num(stats.funded_probability[i])))
                    .collect();
                format!("{name}/{}: P(funded) {}", g.label, cells.join(" "))
            }
            Outcome::Delta(d) => {
                let (i, x) = d
                    .delta
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |best, (i, &x)| {
                        if x.abs() > best.1.abs() {
                            (i, x)
                        } else {
                            best
                        }
                    });
                format!(
                    "{name}/{}: largest change at merit {}: {} (se {}){}",
                    g.label,
                    i + 1,
                    signed(x),
                    num(d.delta_std_error[i]),
                    if d.paired { "" } else { ", unpaired" }
                )
            }
        };
        lines.push(line);
    }
    for (label, rows) in &results.accuracy {
        let cells: Vec<String> = rows
            .iter()
            .map(|r| format!("m={}:{}", r.m, num(r.top_t_accuracy)))
            .collect();
        lines.push(format!(
            "{name}/{label}: top-T accuracy {}",
            cells.join(" ")
        ));
    }
    lines
}
