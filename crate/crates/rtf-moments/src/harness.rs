//! Run configuration, the verification suites and their JSON reports.
//!
//! Every report carries [`REPORT_VERSION`]; the schema is documented in
//! `REPORTS.md` at the crate root. Reports contain no thread counts, paths or
//! timestamps, and with timings disabled two runs of the same configuration
//! serialize to identical bytes whatever the thread count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::mollify::{
    exact_regime_limit, mollified_main_terms, mollifier_value, normalization_gap, rational_to_f64, regime_limit,
    uniform_grid_minimum, MollifierSpec, Regime, RegimeSpec, UniformSample,
};
use crate::nfcore::arith::is_prime;
use crate::nfcore::zeta::functional_equation_residual;
use crate::nfcore::{Field, IdealData, WeightVector};
use crate::oracle::{
    ingest_newforms, level1_eigenforms_cached, spectral_firstmoment, spectral_secondmoment, NewformRecord,
};
use crate::orbital1::{firstmoment_geometric, firstmoment_main, FirstMomentParams};
use crate::orbital2::{secondmoment_geometric, singular_main, SecondMomentParams};
use crate::specfun::bounds::{
    fit_constant, inner_shape, legendre_p_majorant, near_shape, shell_index, shell_majorant, shell_shape,
};
use crate::specfun::hyper::{kummer_imag_bessel, kummer_imag_integral};
use crate::specfun::{curly_p, gauss_2f1_check, legendre_p, legendre_q};
use crate::sum::{ordered_blocks, with_threads};
use crate::{Error, Result};

pub const REPORT_VERSION: u32 = 1;
/// Floor of the relative-residual denominator.
pub const RESIDUAL_FLOOR: f64 = 1e-3;
/// Forced-vanishing and positivity checks are relative to the k = 12 scale.
pub const SCALE_FRACTION: f64 = 1e-6;
/// Identity tolerance when prime-level eigenvalue data is ingested.
pub const INGEST_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifySecond,
    VerifyFirst,
    Proportion,
    SpecfunCheck,
    Mollified,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifySecond => "verify-second-moment",
            Command::VerifyFirst => "verify-first-moment",
            Command::Proportion => "proportion",
            Command::SpecfunCheck => "specfun-check",
            Command::Mollified => "mollified",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub field: String,
    pub weights: Vec<u32>,
    pub levels: Vec<u64>,
    pub hecke: Vec<u64>,
    pub xi_exponent: f64,
    /// Pass threshold on relative residuals.
    pub tol: f64,
    /// Truncation target for the orbital sums.
    pub truncation_tol: f64,
    pub n_max: usize,
    pub cache_dir: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub threads: usize,
    pub ingest: Option<PathBuf>,
    pub samples: usize,
    pub seed: u64,
    pub regimes: Vec<Regime>,
    pub timings: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        let weights = match command {
            Command::Mollified => vec![12, 16, 20, 24, 28, 32],
            _ => vec![12, 16, 20],
        };
        RunConfig {
            command,
            field: "Q".into(),
            weights,
            levels: vec![1],
            hecke: vec![1, 2, 3, 4],
            xi_exponent: 0.25,
            tol: 1e-4,
            truncation_tol: 1e-8,
            n_max: 1000,
            cache_dir: None,
            report: None,
            threads: 1,
            ingest: None,
            samples: 10_000,
            seed: 20_240_601,
            regimes: Regime::ALL.to_vec(),
            timings: true,
        }
    }

    /// Applies one `key = value` setting; keys use kebab or snake case.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let bad = |what: &str| Error::Config(format!("invalid {what} `{v}`"));
        match key.trim().replace('_', "-").as_str() {
            "field" => self.field = v.to_string(),
            "weights" => self.weights = parse_list(v).map_err(|_| bad("weight list"))?,
            "levels" => self.levels = parse_list(v).map_err(|_| bad("level list"))?,
            "hecke" => self.hecke = parse_list(v).map_err(|_| bad("Hecke index list"))?,
            "xi-exponent" => self.xi_exponent = v.parse().map_err(|_| bad("xi exponent"))?,
            "tol" => self.tol = v.parse().map_err(|_| bad("tolerance"))?,
            "truncation-tol" => self.truncation_tol = v.parse().map_err(|_| bad("truncation tolerance"))?,
            "n-max" => self.n_max = v.parse().map_err(|_| bad("n_max"))?,
            "cache-dir" => self.cache_dir = Some(PathBuf::from(v)),
            "report" => self.report = Some(PathBuf::from(v)),
            "threads" => self.threads = v.parse().map_err(|_| bad("thread count"))?,
            "ingest" => self.ingest = Some(PathBuf::from(v)),
            "samples" => self.samples = v.parse().map_err(|_| bad("sample count"))?,
            "seed" => self.seed = v.parse().map_err(|_| bad("seed"))?,
            "timings" => self.timings = v.parse().map_err(|_| bad("boolean"))?,
            "regimes" => {
                self.regimes = if v == "all" {
                    Regime::ALL.to_vec()
                } else {
                    v.split(',').map(|r| r.trim().parse()).collect::<Result<_>>()?
                }
            }
            other => return Err(Error::Config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Reads a plain `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            self.set(k, v).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::Config(format!("tolerance {} must lie in (0, 1e-2]", self.tol)));
        }
        if !(self.truncation_tol > 0.0 && self.truncation_tol <= 1e-2) {
            return Err(Error::Config(format!("truncation tolerance {} must lie in (0, 1e-2]", self.truncation_tol)));
        }
        if self.threads < 1 {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        if self.samples < 1 {
            return Err(Error::Config("sample count must be at least 1".into()));
        }
        if !(self.xi_exponent > 0.0 && self.xi_exponent <= 0.25) {
            return Err(Error::Config(format!("xi exponent {} must lie in (0, 1/4]", self.xi_exponent)));
        }
        if matches!(self.command, Command::VerifySecond | Command::VerifyFirst | Command::Mollified) {
            if self.weights.is_empty() || self.levels.is_empty() {
                return Err(Error::Config("weights and levels must be non-empty".into()));
            }
            if let Some(&k) = self.weights.iter().find(|&&k| k < 4 || k % 2 == 1) {
                return Err(Error::Config(format!("weight {k} must be even and >= 4")));
            }
            if let Some(&q) = self.levels.iter().find(|&&q| q != 1 && !is_prime(q)) {
                return Err(Error::Config(format!("level {q} must be 1 or prime")));
            }
        }
        if self.hecke.contains(&0) {
            return Err(Error::Config("Hecke indices must be positive".into()));
        }
        Field::from_spec(&self.field)?;
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: self.command,
            field: self.field.clone(),
            weights: self.weights.clone(),
            levels: self.levels.clone(),
            hecke: self.hecke.clone(),
            xi_exponent: self.xi_exponent,
            tol: self.tol,
            truncation_tol: self.truncation_tol,
            n_max: self.n_max,
            ingested: self.ingest.is_some(),
            samples: self.samples,
            seed: self.seed,
        }
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, T::Err> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
}

/// The configuration fields that determine report content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: Command,
    pub field: String,
    pub weights: Vec<u32>,
    pub levels: Vec<u64>,
    pub hecke: Vec<u64>,
    pub xi_exponent: f64,
    pub tol: f64,
    pub truncation_tol: f64,
    pub n_max: usize,
    pub ingested: bool,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Moment {
    Second,
    First,
}

/// Geometric side; for the first moment `regular_sum` holds the tail over
/// t ∉ {0, 1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricEntry {
    pub main_term: f64,
    pub regular_sum: f64,
    pub truncation_bound: f64,
    pub shells_evaluated: u32,
}

impl GeometricEntry {
    pub fn total(&self) -> f64 {
        self.main_term + self.regular_sum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectralEntry {
    Full { value: f64, old_part: f64 },
    OldPartOnly { old_part: f64 },
    Unavailable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &str, value: f64, threshold: f64) -> Check {
        Check { name: name.into(), value, threshold, pass: value < threshold }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Check {
        Check { name: name.into(), value, threshold, pass: value >= threshold }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseEntry {
    pub moment: Moment,
    pub k: Vec<u32>,
    pub q: String,
    pub n: String,
    pub spectral: SpectralEntry,
    pub geometric: Option<GeometricEntry>,
    pub abs_residual: Option<f64>,
    pub rel_residual: Option<f64>,
    pub predicted_new_part: Option<f64>,
    pub scale: f64,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub error: Option<String>,
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub worst_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub version: u32,
    pub suite: String,
    pub config: ConfigEcho,
    pub cases: Vec<CaseEntry>,
    pub summary: Summary,
}

impl MomentReport {
    pub fn pass(&self) -> bool {
        self.summary.failed == 0
    }
}

/// Serializes any report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}

pub fn write_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(report)?)?;
    Ok(())
}

struct CaseSpec {
    moment: Moment,
    k: u32,
    q: u64,
    n: u64,
}

fn ideal(field: &Field, n: u64) -> Result<IdealData> {
    if n == 1 {
        Ok(IdealData::unit())
    } else {
        IdealData::from_integer(field, n)
    }
}

/// |geometric main term| at k = 12, q = n = 𝒪_F for the given moment.
pub fn moment_scale(field: &Field, moment: Moment, truncation_tol: f64) -> Result<f64> {
    let k = WeightVector::parallel(12, field.degree)?;
    let p = SecondMomentParams::new(field.clone(), k, IdealData::unit(), IdealData::unit(), truncation_tol)?;
    Ok(match moment {
        Moment::Second => singular_main(&p)?.derivative_form.abs(),
        Moment::First => firstmoment_main(&p.into()).abs(),
    })
}

struct SuiteData {
    field: Field,
    level1: BTreeMap<u32, Vec<NewformRecord>>,
    ingested: Vec<NewformRecord>,
    scale: f64,
}

fn load_suite(cfg: &RunConfig, moment: Moment) -> Result<SuiteData> {
    let field = Field::from_spec(&cfg.field)?;
    let mut level1 = BTreeMap::new();
    if field.is_rational() {
        let need = cfg.hecke.iter().chain(cfg.levels.iter()).copied().max().unwrap_or(1) as usize;
        let n_max = cfg.n_max.max(need);
        for &k in &cfg.weights {
            level1.insert(k, level1_eigenforms_cached(k, n_max, cfg.cache_dir.as_deref())?);
        }
    }
    let ingested = match &cfg.ingest {
        Some(path) => ingest_newforms(path)?,
        None => Vec::new(),
    };
    let scale = moment_scale(&field, moment, cfg.truncation_tol)?;
    Ok(SuiteData { field, level1, ingested, scale })
}

fn run_case(cfg: &RunConfig, data: &SuiteData, case: &CaseSpec) -> CaseEntry {
    let start = Instant::now();
    let mut entry = CaseEntry {
        moment: case.moment,
        k: vec![case.k; data.field.degree],
        q: case.q.to_string(),
        n: case.n.to_string(),
        spectral: SpectralEntry::Unavailable,
        geometric: None,
        abs_residual: None,
        rel_residual: None,
        predicted_new_part: None,
        scale: data.scale,
        checks: Vec::new(),
        pass: false,
        error: None,
        wall_time_s: None,
    };
    if let Err(e) = fill_case(cfg, data, case, &mut entry) {
        entry.error = Some(e.to_string());
        entry.pass = false;
    } else {
        entry.pass = entry.checks.iter().all(|c| c.pass);
    }
    if cfg.timings {
        entry.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    entry
}

fn fill_case(cfg: &RunConfig, data: &SuiteData, case: &CaseSpec, entry: &mut CaseEntry) -> Result<()> {
    let field = &data.field;
    let k = WeightVector::parallel(case.k, field.degree)?;
    let q = ideal(field, case.q)?;
    let n = ideal(field, case.n)?;
    let p = SecondMomentParams::new(field.clone(), k.clone(), q.clone(), n, cfg.truncation_tol)?;
    let geom = match case.moment {
        Moment::Second => {
            let g = secondmoment_geometric(&p)?;
            GeometricEntry {
                main_term: g.main_term,
                regular_sum: g.regular_sum,
                truncation_bound: g.truncation_bound,
                shells_evaluated: g.shells_evaluated,
            }
        }
        Moment::First => {
            let fp: FirstMomentParams = p.into();
            let g = firstmoment_geometric(&fp)?;
            GeometricEntry {
                main_term: g.main_term,
                regular_sum: g.tail_value,
                truncation_bound: g.tail_bound,
                shells_evaluated: g.shells_evaluated,
            }
        }
    };
    let total = geom.total();
    entry.geometric = Some(geom);
    let vanishing_floor = SCALE_FRACTION * data.scale;
    if q.is_unit() && !k.delta() {
        entry.checks.push(Check::below("forced-vanishing", total.abs(), vanishing_floor));
    }
    if !field.is_rational() {
        return Ok(());
    }
    let level1 = &data.level1[&case.k];
    let new: Vec<NewformRecord> =
        data.ingested.iter().filter(|r| r.weight == case.k && r.level == case.q).cloned().collect();
    let new_opt = (case.q > 1 && !new.is_empty()).then_some(new.as_slice());
    let spec = match case.moment {
        Moment::Second => spectral_secondmoment(case.k, case.q, case.n, level1, new_opt)?,
        Moment::First => spectral_firstmoment(case.k, case.q, case.n, level1, new_opt)?,
    };
    match spec.total() {
        Some(value) => {
            entry.spectral = SpectralEntry::Full { value, old_part: spec.old_part };
            let abs = (value - total).abs();
            let rel = abs / value.abs().max(RESIDUAL_FLOOR);
            entry.abs_residual = Some(abs);
            entry.rel_residual = Some(rel);
            let tol = if case.q > 1 { INGEST_TOL.max(cfg.tol) } else { cfg.tol };
            entry.checks.push(Check::below("identity", rel, tol));
        }
        None => {
            entry.spectral = SpectralEntry::OldPartOnly { old_part: spec.old_part };
            let predicted = total - spec.old_part;
            entry.predicted_new_part = Some(predicted);
            if case.n == 1 {
                entry.checks.push(Check::at_least("new-part-positivity", predicted, -vanishing_floor));
            }
        }
    }
    Ok(())
}

fn verify(cfg: &RunConfig, moment: Moment) -> Result<MomentReport> {
    cfg.validate()?;
    let data = load_suite(cfg, moment)?;
    let mut cases = Vec::new();
    for &k in &cfg.weights {
        for &q in &cfg.levels {
            for &n in &cfg.hecke {
                cases.push(CaseSpec { moment, k, q, n });
            }
        }
    }
    let entries: Vec<CaseEntry> =
        with_threads(cfg.threads, || cases.par_iter().map(|c| run_case(cfg, &data, c)).collect());
    let passed = entries.iter().filter(|e| e.pass).count();
    let worst = entries.iter().filter_map(|e| e.rel_residual).fold(0.0, f64::max);
    Ok(MomentReport {
        version: REPORT_VERSION,
        suite: cfg.command.name().into(),
        config: cfg.echo(),
        summary: Summary { passed, failed: entries.len() - passed, worst_residual: worst },
        cases: entries,
    })
}

/// Second-moment identity over the (k, q, n) grid of the configuration.
pub fn cmd_verify_second(cfg: &RunConfig) -> Result<MomentReport> {
    verify(cfg, Moment::Second)
}

/// First-moment identity over the (k, q, n) grid of the configuration.
pub fn cmd_verify_first(cfg: &RunConfig) -> Result<MomentReport> {
    verify(cfg, Moment::First)
}

pub fn render_moment_table(report: &MomentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<7} {:>4} {:>4} {:>4} {:>20} {:>20} {:>10}  status", "moment", "k", "q", "n", "spectral", "geometric", "rel.res");
    for c in &report.cases {
        let spec = match &c.spectral {
            SpectralEntry::Full { value, .. } => format!("{value:.12e}"),
            SpectralEntry::OldPartOnly { old_part } => format!("old {old_part:.10e}"),
            SpectralEntry::Unavailable => "-".into(),
        };
        let geom = c.geometric.as_ref().map_or("-".into(), |g| format!("{:.12e}", g.total()));
        let rel = c.rel_residual.map_or("-".into(), |r| format!("{r:.2e}"));
        let status = match (&c.error, c.pass) {
            (Some(e), _) => format!("ERROR {e}"),
            (None, true) => "pass".into(),
            (None, false) => {
                let failed: Vec<&str> = c.checks.iter().filter(|x| !x.pass).map(|x| x.name.as_str()).collect();
                format!("FAIL {}", failed.join(","))
            }
        };
        let moment = match c.moment {
            Moment::Second => "second",
            Moment::First => "first",
        };
        let _ = writeln!(out, "{moment:<7} {:>4} {:>4} {:>4} {spec:>20} {geom:>20} {rel:>10}  {status}", c.k[0], c.q, c.n);
    }
    let _ = writeln!(
        out,
        "{} passed, {} failed, worst relative residual {:.3e}",
        report.summary.passed, report.summary.failed, report.summary.worst_residual
    );
    out
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionRow {
    pub regime: Regime,
    pub level: Option<u64>,
    pub published: String,
    pub published_value: f64,
    pub exact: String,
    pub exact_value: f64,
    pub relation: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub version: u32,
    pub rows: Vec<ProportionRow>,
    pub uniform_minimum: UniformSample,
    pub uniform_floor: f64,
    pub pass: bool,
}

/// Published and exact limiting proportions for the configured regimes.
pub fn cmd_proportion(cfg: &RunConfig) -> Result<ProportionReport> {
    cfg.validate()?;
    let mut fixed: Vec<u64> = cfg.levels.iter().copied().filter(|&q| is_prime(q)).collect();
    if fixed.is_empty() {
        fixed = vec![2, 3, 5, 7, 11];
    }
    let mut rows = Vec::new();
    for &regime in &cfg.regimes {
        let specs: Vec<RegimeSpec> = if regime == Regime::WeightAspectFixedQ {
            fixed.iter().map(|&n| RegimeSpec::edge(regime).with_level(n)).collect()
        } else {
            vec![RegimeSpec::edge(regime)]
        };
        for spec in specs {
            let published = regime_limit(&spec)?;
            let exact = exact_regime_limit(&spec)?;
            let (relation, pass) = match regime {
                Regime::WeightAspectFixedQ | Regime::Uniform => ("exact >= published", exact >= published),
                _ => ("exact == published", exact == published),
            };
            rows.push(ProportionRow {
                regime,
                level: spec.nq,
                published: published.to_string(),
                published_value: rational_to_f64(&published),
                exact: exact.to_string(),
                exact_value: rational_to_f64(&exact),
                relation: relation.into(),
                pass,
            });
        }
    }
    let uniform_minimum = uniform_grid_minimum(1e6)?;
    let uniform_floor = 0.01;
    let pass = rows.iter().all(|r| r.pass) && uniform_minimum.bound >= uniform_floor;
    Ok(ProportionReport { version: REPORT_VERSION, rows, uniform_minimum, uniform_floor, pass })
}

pub fn render_proportion_table(report: &ProportionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:>6} {:>14} {:>14} {:>14}  relation", "regime", "N(q)", "published", "exact", "exact value");
    for r in &report.rows {
        let level = r.level.map_or("-".into(), |n| n.to_string());
        let status = if r.pass { "pass" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{:<22} {level:>6} {:>14} {:>14} {:>14.8}  {} {status}",
            r.regime.name(),
            r.published,
            r.exact,
            r.exact_value,
            r.relation
        );
    }
    let u = &report.uniform_minimum;
    let _ = writeln!(
        out,
        "uniform grid minimum {:.6} at N(q) = {}, k = {} (floor {})",
        u.bound, u.nq, u.k, report.uniform_floor
    );
    out
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest residual, or largest value/bound ratio for the majorant suites.
    pub worst: f64,
    pub threshold: f64,
    pub fitted_constant: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecfunReport {
    pub version: u32,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub elapsed_s: Option<f64>,
    pub pass: bool,
}

const CHUNK: usize = 256;

/// Evaluates `f` on every sample in fixed-size chunks and returns the values in order.
fn eval_samples<S: Sync, F: Fn(&S) -> f64 + Sync + Send>(samples: &[S], f: F) -> Vec<f64> {
    let chunks = samples.len().div_ceil(CHUNK);
    ordered_blocks(0..chunks, |c| samples[c * CHUNK..((c + 1) * CHUNK).min(samples.len())].iter().map(&f).collect::<Vec<f64>>())
        .into_iter()
        .flatten()
        .collect()
}

fn residual_suite(name: &str, values: &[f64], threshold: f64) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        samples: values.len(),
        violations: values.iter().filter(|v| !(**v < threshold)).count(),
        worst: values.iter().copied().fold(0.0, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) }),
        threshold,
        fitted_constant: None,
    }
}

/// Fits C = max |value|/shape on the first half, then counts violations of
/// |value| ≤ 2C·shape on the second half.
fn fitted_suite(name: &str, pairs: &[(f64, f64)]) -> SuiteResult {
    let (fit, fresh) = pairs.split_at(pairs.len() / 2);
    let c = fit_constant(fit.iter().copied());
    let ratios: Vec<f64> = fresh.iter().map(|(v, s)| v.abs() / (c * s)).collect();
    let mut r = residual_suite(name, &ratios, 2.0);
    r.violations = ratios.iter().filter(|x| !(**x <= 2.0)).count();
    r.fitted_constant = Some(c);
    r
}

fn even_weight(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> u32 {
    2 * rng.gen_range(lo / 2..=hi / 2)
}

/// Property suites for the special functions, each on `samples` random points.
pub fn cmd_specfun_check(cfg: &RunConfig) -> Result<SpecfunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let suites = with_threads(cfg.threads, || -> Result<Vec<SuiteResult>> {
        let mut suites = Vec::new();

        let pts: Vec<(usize, f64)> = (0..n).map(|_| (rng.gen_range(1..=200), rng.gen_range(-0.999_999..0.999_999))).collect();
        let ratios = eval_samples(&pts, |&(m, x)| legendre_p(m, x).abs() / legendre_p_majorant(m, x));
        let mut s = residual_suite("legendre-p-uniform-bound", &ratios, 1.0);
        s.violations = ratios.iter().filter(|r| !(**r <= 1.0)).count();
        suites.push(s);

        let pts: Vec<(usize, f64)> = (0..n).map(|_| (rng.gen_range(1..200), rng.gen_range(-1.0..1.0))).collect();
        let res = eval_samples(&pts, |&(m, x)| {
            let (a, b, c) = (legendre_p(m + 1, x), legendre_p(m, x), legendre_p(m - 1, x));
            let lhs = (m + 1) as f64 * a;
            let rhs = (2 * m + 1) as f64 * x * b - m as f64 * c;
            (lhs - rhs).abs() / (m as f64 + 1.0)
        });
        suites.push(residual_suite("legendre-p-recurrence", &res, 1e-12));

        let pts: Vec<(usize, f64)> = (0..n).map(|_| (rng.gen_range(1..60), 1.0 + rng.gen_range(1e-3..10.0f64))).collect();
        let res = eval_samples(&pts, |&(m, x)| match (legendre_q(m + 1, x), legendre_q(m, x), legendre_q(m - 1, x)) {
            (Ok(a), Ok(b), Ok(c)) => {
                let t = [(m + 1) as f64 * a, (2 * m + 1) as f64 * x * b, m as f64 * c];
                let scale = t.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                (t[0] - t[1] + t[2]).abs() / scale
            }
            _ => f64::INFINITY,
        });
        suites.push(residual_suite("legendre-q-recurrence", &res, 1e-12));

        let pts: Vec<(f64, u32)> =
            (0..2 * n).map(|_| (-rng.gen_range(1e-9..1.0 - 1e-9), even_weight(&mut rng, 4, 40))).collect();
        let pairs: Vec<(f64, f64)> = eval_samples(&pts, |&(u, k)| curly_p(u, k).unwrap_or(f64::INFINITY))
            .into_iter()
            .zip(&pts)
            .map(|(v, &(u, k))| (v, inner_shape(u, k, 0.01)))
            .collect();
        suites.push(fitted_suite("orbital-weight-inner-branch", &pairs));

        let pts: Vec<(f64, u32)> = (0..2 * n)
            .map(|_| {
                let x = rng.gen_range(1.0 + 1e-9..=2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                ((x - 1.0) / 2.0, even_weight(&mut rng, 4, 40))
            })
            .collect();
        let pairs: Vec<(f64, f64)> = eval_samples(&pts, |&(u, k)| curly_p(u, k).unwrap_or(f64::INFINITY))
            .into_iter()
            .zip(&pts)
            .map(|(v, &(u, k))| (v, near_shape(u, k)))
            .collect();
        suites.push(fitted_suite("orbital-weight-near-shell", &pairs));

        let pts: Vec<(f64, u32)> = (0..2 * n)
            .map(|_| {
                let m = rng.gen_range(2..=12);
                let lo = 2f64.powi(m - 1);
                let x = rng.gen_range(lo..=2.0 * lo) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                ((x - 1.0) / 2.0, even_weight(&mut rng, 4, 40))
            })
            .collect();
        let values = eval_samples(&pts, |&(u, k)| curly_p(u, k).unwrap_or(f64::INFINITY));
        let pairs: Vec<(f64, f64)> = values
            .iter()
            .zip(&pts)
            .map(|(&v, &(u, k))| (v, shell_shape(u, k, shell_index(u))))
            .collect();
        suites.push(fitted_suite("orbital-weight-outer-shells", &pairs));
        let ratios: Vec<f64> =
            values.iter().zip(&pts).map(|(&v, &(u, k))| v.abs() / shell_majorant(k, shell_index(u))).collect();
        let mut s = residual_suite("orbital-weight-explicit-majorant", &ratios, 1.0);
        s.violations = ratios.iter().filter(|r| !(**r <= 1.0)).count();
        suites.push(s);

        let pts: Vec<(u32, f64)> = (0..n).map(|_| (even_weight(&mut rng, 4, 40), rng.gen_range(0.01..0.95))).collect();
        let res = eval_samples(&pts, |&(k, z)| gauss_2f1_check(k, z).unwrap_or(f64::INFINITY));
        suites.push(residual_suite("gauss-2f1-legendre-identity", &res, 1e-8));

        let pts: Vec<(u32, f64)> = (0..n).map(|_| (even_weight(&mut rng, 4, 60), rng.gen_range(-50.0..50.0))).collect();
        let res = eval_samples(&pts, |&(k, x)| (kummer_imag_integral(k, x) - kummer_imag_bessel(k, x)).norm());
        suites.push(residual_suite("kummer-dual-method", &res, 1e-9));
        let pts: Vec<(u32, f64)> = (0..n).map(|_| (even_weight(&mut rng, 4, 60), rng.gen_range(-100.0..100.0))).collect();
        let res = eval_samples(&pts, |&(k, x)| crate::specfun::kummer_imag(k, x).norm());
        let mut s = residual_suite("kummer-modulus-at-most-one", &res, 1.0 + 1e-12);
        s.violations = res.iter().filter(|r| !(**r <= 1.0 + 1e-12)).count();
        suites.push(s);

        let fields = [Field::rational(), Field::real_quadratic(2)?, Field::real_quadratic(5)?];
        let pts: Vec<(usize, Complex64)> = (0..n)
            .map(|i| (i % 3, Complex64::new(rng.gen_range(-1.0..2.0), rng.gen_range(-10.0..10.0))))
            .collect();
        let res = eval_samples(&pts, |&(f, s)| functional_equation_residual(&fields[f], s).unwrap_or(f64::INFINITY));
        suites.push(residual_suite("dedekind-zeta-functional-equation", &res, 1e-10));
        Ok(suites)
    })?;
    let pass = suites.iter().all(|s| s.violations == 0);
    Ok(SpecfunReport {
        version: REPORT_VERSION,
        seed: cfg.seed,
        suites,
        elapsed_s: cfg.timings.then(|| start.elapsed().as_secs_f64()),
        pass,
    })
}

pub fn render_specfun_table(report: &SpecfunReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<36} {:>8} {:>10} {:>12} {:>10} {:>12}", "suite", "samples", "violations", "worst", "threshold", "fitted C");
    for s in &report.suites {
        let c = s.fitted_constant.map_or("-".into(), |c| format!("{c:.4e}"));
        let _ = writeln!(
            out,
            "{:<36} {:>8} {:>10} {:>12.3e} {:>10.1e} {:>12}",
            s.name, s.samples, s.violations, s.worst, s.threshold, c
        );
    }
    let total: usize = report.suites.iter().map(|s| s.violations).sum();
    let _ = writeln!(out, "{} suites, {total} violations", report.suites.len());
    out
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifiedRow {
    pub k: u32,
    pub xi: f64,
    pub forms: usize,
    pub assembled_first: f64,
    pub main_first: f64,
    pub ratio_first: f64,
    pub assembled_second: f64,
    pub main_second: f64,
    pub ratio_second: f64,
    /// |ratio − 1|·log ξ, the constant the error budget C/log ξ needs.
    pub budget_first: f64,
    pub budget_second: f64,
    pub normalization_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifiedReport {
    pub version: u32,
    pub xi_exponent: f64,
    pub rows: Vec<MollifiedRow>,
    pub fitted_c_first: f64,
    pub fitted_c_second: f64,
    pub pass: bool,
}

/// Mollified first and second moments at level 1 assembled from eigenform
/// data, against their main terms, with ξ = k^{xi_exponent}.
pub fn cmd_mollified(cfg: &RunConfig) -> Result<MollifiedReport> {
    cfg.validate()?;
    let field = Field::rational();
    if !Field::from_spec(&cfg.field)?.is_rational() {
        return Err(Error::UnsupportedField("mollified moments are assembled over Q only".into()));
    }
    let q = IdealData::unit();
    let mut weights: Vec<u32> = cfg.weights.iter().copied().filter(|k| k % 4 == 0).collect();
    weights.sort_unstable();
    weights.dedup();
    if weights.is_empty() {
        return Err(Error::Config("mollified moments need weights k = 0 mod 4".into()));
    }
    let rows = with_threads(cfg.threads, || -> Result<Vec<MollifiedRow>> {
        let mut rows = Vec::new();
        for k in weights {
            let records = level1_eigenforms_cached(k, cfg.n_max, cfg.cache_dir.as_deref())?;
            let xi = (k as f64).powf(cfg.xi_exponent);
            let spec = MollifierSpec::new(field.clone(), xi, q.clone())?;
            let (mut s1, mut s2) = (0.0, 0.0);
            for r in &records {
                let m = mollifier_value(r, &spec)?;
                s1 += r.central_value * m / r.adjoint_value;
                s2 += (r.central_value * m).powi(2) / r.adjoint_value;
            }
            let w = WeightVector::from_weights(vec![k])?;
            let (p1, p2) = mollified_main_terms(&field, &w, &q, xi)?;
            let lx = xi.ln();
            rows.push(MollifiedRow {
                k,
                xi,
                forms: records.len(),
                assembled_first: s1,
                main_first: p1,
                ratio_first: s1 / p1,
                assembled_second: s2,
                main_second: p2,
                ratio_second: s2 / p2,
                budget_first: (s1 / p1 - 1.0).abs() * lx,
                budget_second: (s2 / p2 - 1.0).abs() * lx,
                normalization_gap: normalization_gap(&w, &q, xi)?,
            });
        }
        Ok(rows)
    })?;
    let fitted_c_first = rows.iter().map(|r| r.budget_first).fold(0.0, f64::max);
    let fitted_c_second = rows.iter().map(|r| r.budget_second).fold(0.0, f64::max);
    let pass = rows.iter().all(|r| {
        r.normalization_gap < 1e-12 && r.ratio_first.is_finite() && r.ratio_second.is_finite()
    });
    Ok(MollifiedReport { version: REPORT_VERSION, xi_exponent: cfg.xi_exponent, rows, fitted_c_first, fitted_c_second, pass })
}

pub fn render_mollified_table(report: &MollifiedReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>4} {:>7} {:>6} {:>12} {:>12} {:>8} {:>12} {:>12} {:>8}", "k", "xi", "forms", "first", "main", "ratio", "second", "main", "ratio");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>4} {:>7.4} {:>6} {:>12.6} {:>12.6} {:>8.4} {:>12.6} {:>12.6} {:>8.4}",
            r.k, r.xi, r.forms, r.assembled_first, r.main_first, r.ratio_first, r.assembled_second, r.main_second, r.ratio_second
        );
    }
    let _ = writeln!(
        out,
        "fitted C in |ratio - 1| <= C / log xi: first {:.4}, second {:.4}",
        report.fitted_c_first, report.fitted_c_second
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let mut cfg = RunConfig::new(Command::VerifySecond);
        cfg.apply_text("# grid\nweights = 12, 14\nlevels=1,5\nn_max = 400\ntol = 1e-5  # tighter\n").unwrap();
        assert_eq!(cfg.weights, vec![12, 14]);
        assert_eq!(cfg.levels, vec![1, 5]);
        assert_eq!(cfg.n_max, 400);
        cfg.set("threads", "8").unwrap();
        assert_eq!(cfg.threads, 8);
        cfg.validate().unwrap();
        assert!(matches!(cfg.apply_text("bogus = 1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig::new(Command::VerifyFirst);
        cfg.tol = 0.5;
        assert!(cfg.validate().is_err());
        cfg.tol = 1e-4;
        cfg.threads = 0;
        assert!(cfg.validate().is_err());
        cfg.threads = 1;
        cfg.levels = vec![6];
        assert!(cfg.validate().is_err());
        cfg.levels = vec![1];
        cfg.weights = vec![13];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn regime_list() {
        let mut cfg = RunConfig::new(Command::Proportion);
        cfg.set("regimes", "level-aspect,double-limit").unwrap();
        assert_eq!(cfg.regimes, vec![Regime::LevelAspect, Regime::DoubleLimit]);
        assert!(cfg.set("regimes", "nope").is_err());
    }

    #[test]
    fn proportion_report_round_trips() {
        let cfg = RunConfig::new(Command::Proportion);
        let report = cmd_proportion(&cfg).unwrap();
        assert!(report.pass);
        let back: ProportionReport = serde_json::from_str(&to_json(&report).unwrap()).unwrap();
        assert_eq!(back, report);
        let table = render_proportion_table(&report);
        assert!(table.contains("level-aspect") && table.contains("1/4"));
    }

    #[test]
    fn small_specfun_run_is_clean() {
        let mut cfg = RunConfig::new(Command::SpecfunCheck);
        cfg.samples = 200;
        let report = cmd_specfun_check(&cfg).unwrap();
        assert!(report.pass, "{}", render_specfun_table(&report));
    }
}
