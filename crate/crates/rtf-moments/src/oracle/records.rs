//! Newform records: computed level-1 eigenforms, the eigenvalue CSV format,
//! the on-disk cache and ingestion of externally supplied prime-level data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::lfunc::{adjoint_l, central_l, root_number};
use super::modforms::{level1_eigenforms_exact, normalized_coefficients};
use crate::nfcore::arith::factor;
use crate::{Error, Result};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "RTF_CACHE_DIR";

const GENERATOR_SOURCE: &str = concat!(include_str!("modforms.rs"), include_str!("lfunc.rs"), include_str!("records.rs"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Computed,
    Ingested,
}

/// One newform π with its analytic data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NewformRecord {
    pub weight: u32,
    pub level: u64,
    /// λ(n) for 0 ≤ n ≤ n_max; index 0 is unused and holds 0.
    pub lambda: Vec<f64>,
    pub central_value: f64,
    /// L(1, π, Ad) at level 1; the partial L^{(q)}(1, π, Ad) without the
    /// Euler factor at q at prime level q.
    pub adjoint_value: f64,
    pub root_number: i32,
    pub source: Source,
}

impl NewformRecord {
    pub fn n_max(&self) -> usize {
        self.lambda.len() - 1
    }

    /// λ(n), or a coverage error.
    pub fn lambda_at(&self, n: u64) -> Result<f64> {
        self.lambda
            .get(n as usize)
            .copied()
            .filter(|_| n >= 1)
            .ok_or(Error::Coverage { need: n, have: self.n_max() as u64 })
    }

    /// Build a record from an eigenvalue table, computing the L-values.
    pub fn from_eigenvalues(weight: u32, level: u64, lambda: Vec<f64>, source: Source) -> Result<Self> {
        if lambda.len() < 3 {
            return Err(Error::Coverage { need: 2, have: lambda.len().saturating_sub(1) as u64 });
        }
        let lq = if level > 1 { lambda.get(level as usize).copied() } else { None };
        if level > 1 && lq.is_none() {
            return Err(Error::Coverage { need: level, have: lambda.len() as u64 - 1 });
        }
        let eps = root_number(weight, level, lq);
        let central = central_value_checked(&lambda, weight, level, eps)?;
        let mut adjoint = adjoint_value_checked(&lambda, weight, level)?;
        if level > 1 {
            adjoint *= 1.0 - (level as f64).powi(-2);
        }
        Ok(NewformRecord {
            weight,
            level,
            lambda,
            central_value: central,
            adjoint_value: adjoint,
            root_number: eps as i32,
            source,
        })
    }
}

/// L(1/2) at smoothing parameters X = 1 and X = 2, required to agree to 1e-9.
pub fn central_value_checked(lambda: &[f64], k: u32, level: u64, eps: f64) -> Result<f64> {
    let a = central_l(lambda, k, level, eps, 1.0)?;
    let b = central_l(lambda, k, level, eps, 2.0)?;
    if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
        return Err(Error::Convergence(format!("central value unstable under X-doubling: {a} vs {b}")));
    }
    Ok(a)
}

/// L(1, Ad) (with the Euler factor at the level) at X = 1 and X = 2,
/// required to agree to 1e-8.
pub fn adjoint_value_checked(lambda: &[f64], k: u32, level: u64) -> Result<f64> {
    let a = adjoint_l(lambda, k, level, 1.0)?;
    let b = adjoint_l(lambda, k, level, 2.0)?;
    if (a - b).abs() > 1e-8 * a.abs().max(1.0) {
        return Err(Error::Convergence(format!("adjoint value unstable under X-doubling: {a} vs {b}")));
    }
    Ok(a)
}

/// First n at which a Hecke relation fails by more than `tol`, with the
/// deviation. Relations at p | level use λ(p^r) = λ(p)^r.
pub fn hecke_violation(lambda: &[f64], level: u64, tol: f64) -> Option<(usize, f64)> {
    for n in 2..lambda.len() {
        let f = factor(n as u128);
        let (p, e) = (f[0].0 as usize, f[0].1);
        let pe = p.pow(e);
        let expected = if pe != n {
            lambda[pe] * lambda[n / pe]
        } else if e == 1 {
            continue;
        } else if p as u64 == level {
            lambda[p] * lambda[n / p]
        } else {
            lambda[p] * lambda[n / p] - lambda[n / (p * p)]
        };
        let dev = (lambda[n] - expected).abs();
        if dev > tol {
            return Some((n, dev));
        }
    }
    None
}

fn deligne_violation(lambda: &[f64]) -> Option<usize> {
    (2..lambda.len()).find(|&p| factor(p as u128).len() == 1 && factor(p as u128)[0].1 == 1 && lambda[p].abs() > 2.0 + 1e-9)
}

/// Level-1 eigenforms of weight k with λ(n) for n ≤ n_max, ordered by λ(2).
pub fn level1_eigenforms(k: u32, n_max: usize) -> Result<Vec<NewformRecord>> {
    if k % 2 == 1 || k > 200 {
        return Err(Error::Domain(format!("weight {k} must be even and at most 200")));
    }
    let forms = level1_eigenforms_exact(k, n_max + 1, 80)?;
    let mut out = Vec::with_capacity(forms.len());
    for form in &forms {
        let lambda = normalized_coefficients(form, k);
        if let Some((n, dev)) = hecke_violation(&lambda, 1, 1e-10) {
            return Err(Error::Conditioning(format!("Hecke relation fails at n = {n} by {dev:e}")));
        }
        if let Some(p) = deligne_violation(&lambda) {
            return Err(Error::Conditioning(format!("Deligne bound fails at p = {p}")));
        }
        out.push(NewformRecord::from_eigenvalues(k, 1, lambda, Source::Computed)?);
    }
    out.sort_by(|a, b| a.lambda[2].total_cmp(&b.lambda[2]));
    Ok(out)
}

/// Serialise records in the eigenvalue CSV format (one header block per form).
pub fn to_csv(records: &[NewformRecord]) -> String {
    let mut s = String::new();
    for r in records {
        writeln!(s, "# weight={} level={} nmax={} normalization=analytic", r.weight, r.level, r.n_max()).unwrap();
        for (n, l) in r.lambda.iter().enumerate().skip(1) {
            writeln!(s, "{n},{l:?}").unwrap();
        }
    }
    s
}

struct Block {
    weight: u32,
    level: u64,
    n_max: usize,
    header_line: usize,
    rows: Vec<(usize, f64)>,
}

fn parse_header(line: &str, lineno: usize) -> Result<Block> {
    let perr = |msg: String| Error::Parse { line: lineno, msg };
    let mut weight = None;
    let mut level = None;
    let mut n_max = None;
    let mut norm = None;
    for tok in line.trim_start_matches('#').split_whitespace() {
        let Some((key, val)) = tok.split_once('=') else {
            return Err(perr(format!("header token `{tok}` is not key=value")));
        };
        let bad = |_| perr(format!("bad value for {key}: `{val}`"));
        match key {
            "weight" => weight = Some(val.parse::<u32>().map_err(bad)?),
            "level" => level = Some(val.parse::<u64>().map_err(bad)?),
            "nmax" => n_max = Some(val.parse::<usize>().map_err(bad)?),
            "normalization" => norm = Some(val.to_string()),
            _ => {}
        }
    }
    match norm.as_deref() {
        Some("analytic") => {}
        Some(other) => return Err(perr(format!("normalization tag `{other}`, expected `analytic`"))),
        None => return Err(perr("missing normalization tag".into())),
    }
    Ok(Block {
        weight: weight.ok_or_else(|| perr("missing weight".into()))?,
        level: level.ok_or_else(|| perr("missing level".into()))?,
        n_max: n_max.ok_or_else(|| perr("missing nmax".into()))?,
        header_line: lineno,
        rows: Vec::new(),
    })
}

fn parse_blocks(text: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.contains("weight=") {
                blocks.push(parse_header(line, lineno)?);
            }
            continue;
        }
        let Some(block) = blocks.last_mut() else {
            return Err(Error::Parse { line: lineno, msg: "data row before header".into() });
        };
        let perr = |msg: String| Error::Parse { line: lineno, msg };
        let (a, b) = line.split_once(',').ok_or_else(|| perr(format!("expected `n,lambda`, got `{line}`")))?;
        let n: usize = a.trim().parse().map_err(|_| perr(format!("bad index `{a}`")))?;
        let l: f64 = b.trim().parse().map_err(|_| perr(format!("bad eigenvalue `{b}`")))?;
        if !l.is_finite() {
            return Err(perr(format!("non-finite eigenvalue at n = {n}")));
        }
        let expected = block.rows.len() + 1;
        if n != expected {
            return Err(perr(format!("rows must run n = 1, 2, ... in order; expected {expected}, got {n}")));
        }
        block.rows.push((lineno, l));
    }
    Ok(blocks)
}

/// Parse an eigenvalue file into raw tables, validating the Hecke relations
/// row by row. Returns (weight, level, λ table) triples.
pub fn parse_eigendata(text: &str) -> Result<Vec<(u32, u64, Vec<f64>)>> {
    let mut out = Vec::new();
    for block in parse_blocks(text)? {
        if block.rows.is_empty() {
            continue;
        }
        if block.rows.len() != block.n_max {
            return Err(Error::Parse {
                line: block.header_line,
                msg: format!("header declares nmax={} but {} rows follow", block.n_max, block.rows.len()),
            });
        }
        let mut lambda = vec![0.0];
        lambda.extend(block.rows.iter().map(|r| r.1));
        if (lambda[1] - 1.0).abs() > 1e-12 {
            return Err(Error::Parse { line: block.rows[0].0, msg: format!("λ(1) = {} is not 1", lambda[1]) });
        }
        if let Some((n, dev)) = hecke_violation(&lambda, block.level, 1e-8) {
            return Err(Error::Parse {
                line: block.rows[n - 1].0,
                msg: format!("Hecke relation violated at n = {n} (deviation {dev:e})"),
            });
        }
        if let Some(p) = deligne_violation(&lambda) {
            log::warn!("line {}: |λ({p})| = {} exceeds the Deligne bound", block.rows[p - 1].0, lambda[p].abs());
        }
        out.push((block.weight, block.level, lambda));
    }
    Ok(out)
}

/// Read newform eigenvalue data and compute central and adjoint values.
pub fn ingest_newforms(path: &Path) -> Result<Vec<NewformRecord>> {
    let text = fs::read_to_string(path)?;
    parse_eigendata(&text)?
        .into_iter()
        .map(|(k, level, lambda)| NewformRecord::from_eigenvalues(k, level, lambda, Source::Ingested))
        .collect()
}

fn generator_hash() -> String {
    let digest = Sha256::digest(GENERATOR_SOURCE.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Cache root: explicit argument, then the environment override, then `cache`.
pub fn cache_root(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("cache"))
}

/// `level1_eigenforms` backed by `cache/level1/k<k>_n<nmax>.csv`.
pub fn level1_eigenforms_cached(k: u32, n_max: usize, root: Option<&Path>) -> Result<Vec<NewformRecord>> {
    let dir = cache_root(root).join("level1");
    let path = dir.join(format!("k{k}_n{n_max}.csv"));
    let stamp = format!("# generator={}", generator_hash());
    if let Ok(text) = fs::read_to_string(&path) {
        if text.lines().next() == Some(stamp.as_str()) {
            let tables = parse_eigendata(&text)?;
            let mut out = Vec::with_capacity(tables.len());
            for (w, level, lambda) in tables {
                out.push(NewformRecord::from_eigenvalues(w, level, lambda, Source::Computed)?);
            }
            return Ok(out);
        }
    }
    let records = level1_eigenforms(k, n_max)?;
    fs::create_dir_all(&dir)?;
    let body = format!("{stamp}\n# forms={}\n{}", records.len(), to_csv(&records));
    let tmp = dir.join(format!(".k{k}_n{n_max}.{}.tmp", std::process::id()));
    fs::write(&tmp, body)?;
    fs::rename(&tmp, &path)?;
    Ok(records)
}
