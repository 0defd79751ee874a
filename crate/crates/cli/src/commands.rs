use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::json;

use qgt_core::branching::{link_rows, LinkRow};
use qgt_core::characters::{character, qdimension, qdimension_product};
use qgt_core::coherent::{admissibility_check, coherent_measure, OmegaParams};
use qgt_core::markov::{generator, simulate_runs, GeneratorMatrix, RNG_NAME};
use qgt_core::param::{format_rational, rational_to_f64};
use qgt_core::{Signature, TypeLabel};

use crate::config::{Format, SessionConfig};
use crate::error::CliError;

/// Parses a weight such as `2,1,0` or `2.1.-1`; an absent weight is `0` of
/// the configured rank.
pub fn parse_weight(s: Option<&str>, cfg: &SessionConfig) -> Result<Vec<i64>, CliError> {
    let Some(s) = s else {
        return Ok(vec![0; cfg.rank]);
    };
    let w = s
        .split(|c: char| c == ',' || c == '.' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<i64>().map_err(|_| CliError::Usage(format!("bad weight {s:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if cfg.rank_given && w.len() != cfg.rank {
        return Err(CliError::Usage(format!(
            "weight {s:?} has {} parts but --rank is {}",
            w.len(),
            cfg.rank
        )));
    }
    Ok(w)
}

fn parse_signature(s: Option<&str>, cfg: &SessionConfig) -> Result<Signature, CliError> {
    Ok(Signature::new(parse_weight(s, cfg)?)?)
}

fn require_bcd(ty: TypeLabel) -> Result<(), CliError> {
    if ty.is_bcd() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("type {ty} is not supported here")))
    }
}

fn require_bc(ty: TypeLabel) -> Result<(), CliError> {
    match ty {
        TypeLabel::B | TypeLabel::C => Ok(()),
        _ => Err(CliError::Usage(format!("type {ty} has no coherent measures or generators"))),
    }
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn pretty<T: Serialize>(v: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Writes `body` to `out`, or returns it for stdout.
pub fn deliver(body: String, out: Option<&Path>) -> Result<Option<String>, CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, body)?;
            Ok(None)
        }
        None => Ok(Some(body)),
    }
}

#[derive(Debug, Args)]
pub struct CharArgs {
    /// Highest weight, e.g. 2,1,0 (type D allows a negative last part)
    #[arg(long)]
    pub lambda: Option<String>,
}

pub fn cmd_char(cfg: &SessionConfig, a: &CharArgs) -> Result<String, CliError> {
    let w = parse_weight(a.lambda.as_deref(), cfg)?;
    let chi = character(cfg.type_label, &w, &cfg.param)?;
    match cfg.format {
        Format::Json => pretty(&chi),
        Format::Csv => {
            let mut rows = vec![(1..=w.len()).map(|i| format!("e{i}")).chain(["coef".into()]).collect()];
            for (e, c) in chi.poly.terms() {
                let mut row: Vec<String> = e.0.iter().map(|x| x.to_string()).collect();
                row.push(format_rational(c));
                rows.push(row);
            }
            csv_string(rows)
        }
    }
}

pub fn cmd_qdim(cfg: &SessionConfig, a: &CharArgs) -> Result<String, CliError> {
    let ty = cfg.type_label;
    let w = parse_weight(a.lambda.as_deref(), cfg)?;
    let qd = qdimension(ty, &w, &cfg.param)?;
    if ty.is_bcd() && qdimension_product(ty, &w, &cfg.param)? != qd {
        return Err(CliError::Invariant("qdim from the product formula differs from evaluation".into()));
    }
    let r = cfg.param.to_string();
    match cfg.format {
        Format::Json => pretty(&json!({
            "type": ty,
            "N": w.len(),
            "lambda": w,
            "r": r,
            "qdim": format_rational(&qd),
            "qdim_f64": rational_to_f64(&qd),
        })),
        Format::Csv => csv_string(vec![
            vec!["type".into(), "N".into(), "lambda".into(), "r".into(), "qdim".into(), "qdim_f64".into()],
            vec![
                ty.to_string(),
                w.len().to_string(),
                w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("."),
                r,
                format_rational(&qd),
                rational_to_f64(&qd).to_string(),
            ],
        ]),
    }
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    #[arg(long, conflicts_with = "all_upto")]
    pub lambda: Option<String>,
    /// Emit every row with |λ| <= S
    #[arg(long, value_name = "S")]
    pub all_upto: Option<i64>,
    /// Write float values instead of exact rationals in CSV output
    #[arg(long)]
    pub float: bool,
}

#[derive(Serialize)]
struct LinkEntry {
    target: String,
    weight: String,
    float: f64,
}

#[derive(Serialize)]
struct LinkRowOut {
    source: String,
    entries: Vec<LinkEntry>,
}

pub fn check_row(row: &LinkRow) -> Result<(), CliError> {
    if row.is_stochastic() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "link row {} is not stochastic (sum {})",
            row.source,
            format_rational(&row.sum())
        )))
    }
}

pub fn cmd_link(cfg: &SessionConfig, a: &LinkArgs) -> Result<String, CliError> {
    let ty = cfg.type_label;
    require_bcd(ty)?;
    let sources = match a.all_upto {
        Some(s) if s < 0 => return Err(CliError::Usage("--all-upto must be nonnegative".into())),
        Some(s) => Signature::enumerate(cfg.rank, s),
        None => vec![parse_signature(a.lambda.as_deref(), cfg)?],
    };
    if sources.iter().any(|s| s.rank() == 0) {
        return Err(CliError::Usage("links need rank >= 1".into()));
    }
    let table = link_rows(ty, &sources, &cfg.param)?;
    table.values().try_for_each(check_row)?;
    match cfg.format {
        Format::Json => {
            let rows: Vec<LinkRowOut> = table
                .values()
                .map(|row| LinkRowOut {
                    source: row.source.dotted(),
                    entries: row
                        .entries
                        .iter()
                        .map(|(mu, w)| LinkEntry {
                            target: mu.dotted(),
                            weight: format_rational(w),
                            float: rational_to_f64(w),
                        })
                        .collect(),
                })
                .collect();
            pretty(&json!({
                "type": ty,
                "N": cfg.rank.max(sources[0].rank()),
                "r": cfg.param.to_string(),
                "rows": rows,
            }))
        }
        Format::Csv => {
            let targets: BTreeSet<&Signature> = table.values().flat_map(|r| r.entries.keys()).collect();
            let mut rows = vec![std::iter::once("source".to_string())
                .chain(targets.iter().map(|t| t.dotted()))
                .collect::<Vec<_>>()];
            for row in table.values() {
                let mut line = vec![row.source.dotted()];
                for t in &targets {
                    let w = row.get(t);
                    line.push(if a.float { rational_to_f64(&w).to_string() } else { format_rational(&w) });
                }
                rows.push(line);
            }
            csv_string(rows)
        }
    }
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Comma-separated α_i
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Comma-separated β_i
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<f64>,
}

impl OmegaArgs {
    fn omega(&self) -> Result<OmegaParams, CliError> {
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        Ok(OmegaParams::new(sorted(&self.alpha), sorted(&self.beta), self.gamma)?)
    }
}

fn admissible(cfg: &SessionConfig, omega: &OmegaParams, n: usize) -> Result<(), CliError> {
    let report = admissibility_check(omega, cfg.type_label, n, &cfg.param);
    if report.passed {
        return Ok(());
    }
    Err(CliError::Inadmissible {
        message: format!(
            "ω is not admissible at rank {n}: point {} lies outside the convergence region",
            report.first_violation.unwrap_or(0)
        ),
        report: serde_json::to_value(&report)?,
    })
}

pub fn cmd_coherent(cfg: &SessionConfig, a: &OmegaArgs) -> Result<String, CliError> {
    require_bc(cfg.type_label)?;
    let omega = a.omega()?;
    admissible(cfg, &omega, cfg.rank)?;
    let m = coherent_measure(&omega, cfg.type_label, cfg.rank, &cfg.param, cfg.tol, Some(cfg.cutoff))?;
    let total = m.measure.total();
    if m.measure.weights.values().any(|&w| w < 0.0) || (total + m.measure.tail - 1.0).abs() > 1e-9 {
        return Err(CliError::Invariant(format!(
            "coherent weights sum to {total} with tail {}",
            m.measure.tail
        )));
    }
    match cfg.format {
        Format::Json => {
            let weights: Vec<_> = m
                .measure
                .weights
                .iter()
                .map(|(s, p)| json!({ "lambda": s.parts(), "p": p }))
                .collect();
            pretty(&json!({
                "type": cfg.type_label,
                "N": cfg.rank,
                "r": cfg.param.to_string(),
                "omega": omega,
                "weights": weights,
                "tail": m.measure.tail,
                "checks": {
                    "total": total,
                    "max_size": m.max_size,
                    "fourier_tail": m.fourier_tail,
                    "min_raw_weight": m.min_raw_weight,
                    "admissible": true,
                },
            }))
        }
        Format::Csv => {
            let mut rows = vec![vec!["lambda".to_string(), "p".to_string()]];
            rows.extend(m.measure.weights.iter().map(|(s, p)| vec![s.dotted(), p.to_string()]));
            csv_string(rows)
        }
    }
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[command(flatten)]
    pub omega: OmegaArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Returns the serialized generator and a validity summary.
pub fn cmd_generator(cfg: &SessionConfig, a: &GeneratorArgs) -> Result<(String, String), CliError> {
    require_bc(cfg.type_label)?;
    let omega = a.omega.omega()?;
    admissible(cfg, &omega, cfg.rank)?;
    let g = generator(cfg.type_label, cfg.rank, &omega, &cfg.param, cfg.cutoff, cfg.tol)?;
    let v = g.validity();
    let summary = pretty(&json!({
        "type": g.type_label,
        "N": g.rank,
        "r": g.r,
        "cutoff": g.cutoff,
        "states": g.len(),
        "validity": v,
    }))?;
    if !v.passed {
        return Err(CliError::Invariant(format!("generator validity check failed: {summary}")));
    }
    Ok((serde_json::to_string(&g)? + "\n", summary))
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Generator JSON written by the generator command
    #[arg(long)]
    pub gen: PathBuf,
    /// Initial signature; defaults to 0
    #[arg(long)]
    pub init: Option<String>,
    /// Time horizon
    #[arg(long = "T", default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    /// Trajectory CSV destination
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn load_generator(path: &Path) -> Result<GeneratorMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let g: GeneratorMatrix =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad generator file: {e}")))?;
    if g.entries.len() != g.len() || g.entries.iter().any(|r| r.len() != g.len()) {
        return Err(CliError::Usage("generator matrix is not square".into()));
    }
    if !g.validity().passed {
        return Err(CliError::Invariant("loaded generator fails its validity check".into()));
    }
    Ok(g)
}

/// Returns the trajectory body (CSV or JSON) and a summary.
pub fn cmd_simulate(cfg: &SessionConfig, a: &SimulateArgs) -> Result<(String, String), CliError> {
    let g = load_generator(&a.gen)?;
    if !(a.horizon >= 0.0) {
        return Err(CliError::Usage("--T must be nonnegative".into()));
    }
    let init = match &a.init {
        Some(s) => Signature::parse(s)?,
        None => Signature::zero(g.rank),
    };
    let paths = simulate_runs(&g, &init, a.horizon, cfg.seed, a.runs)?;
    let mut finals: BTreeMap<String, u64> = BTreeMap::new();
    for p in &paths {
        let key = p.state_at(a.horizon).map_or("*".to_string(), |s| s.dotted());
        *finals.entry(key).or_insert(0) += 1;
    }
    let summary = pretty(&json!({
        "rng": RNG_NAME,
        "seed": cfg.seed,
        "runs": a.runs,
        "horizon": a.horizon,
        "initial": init.dotted(),
        "escaped": paths.iter().filter(|p| p.escaped()).count(),
        "final": finals,
    }))?;
    let body = if a.out.is_some() || cfg.format == Format::Csv {
        let mut rows = vec![vec!["run".to_string(), "time".to_string(), "lambda".to_string()]];
        for (k, p) in paths.iter().enumerate() {
            for r in &p.records {
                let state = r.state.as_ref().map_or("*".to_string(), |s| s.dotted());
                rows.push(vec![k.to_string(), r.time.to_string(), state]);
            }
        }
        csv_string(rows)?
    } else {
        pretty(&paths)?
    };
    Ok((body, summary))
}
