//! The `rinorm` command line: flags or a JSON config file (flags win), CSV or
//! JSON reports, gnuplot-style data files.

pub mod parse;
pub mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::Error;
use crate::harness::{dilation_sweep, hardy_check, make_test_function, SweepRow};
use crate::optimal_target::{glz_case_table, orlicz_case_table, resolve_target};
use crate::orlicz::sobolev_young_transform;
use crate::quadrature::Grid;
use crate::rearrange::decreasing_rearrangement;
use crate::ri_norms::ri_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    Rearrange,
    Norm,
    OptimalTarget,
    YoungTransform,
    CaseTable,
    VerifyPoincare,
    Hardy,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Strings in flags; strings or inline JSON values in config files.
fn string_or_json<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<String>, D::Error> {
    let v: Option<serde_json::Value> = Option::deserialize(d)?;
    Ok(v.map(|v| match v {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }))
}

/// Run options; the config file uses the same keys as the long flags.
#[derive(Debug, Clone, Default, clap::Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Space descriptor as JSON, e.g. '{"family":"lorentz","p":2,"q":1}'.
    #[arg(long)]
    #[serde(default, deserialize_with = "string_or_json")]
    pub space: Option<String>,
    /// Profile f*, e.g. 'indicator:a=4', 'exp:c=1,rate=2', 'atoms:3@1;1@2'.
    #[arg(long)]
    #[serde(default)]
    pub profile: Option<String>,
    /// Atoms `value@measure;…` for `rearrange`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub atoms: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub a0: Option<f64>,
    #[arg(long = "aInf", allow_hyphen_values = true)]
    #[serde(default, rename = "aInf")]
    pub a_inf: Option<f64>,
    /// Orlicz table: power of A near zero.
    #[arg(long)]
    #[serde(default)]
    pub p0: Option<f64>,
    /// Orlicz table: power of A near infinity.
    #[arg(long = "pInf")]
    #[serde(default, rename = "pInf")]
    pub p_inf: Option<f64>,
    /// Young function, JSON or 'power:p=2'.
    #[arg(long)]
    #[serde(default, deserialize_with = "string_or_json")]
    pub young: Option<String>,
    /// Test function for `verify-poincare`, e.g. 'gaussian', 'plateau:radius=1,ramp=1'.
    #[arg(long)]
    #[serde(default)]
    pub kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub offset: Option<f64>,
    /// Comma-separated dilations.
    #[arg(long)]
    #[serde(default)]
    pub dilations: Option<String>,
    /// Number of ball means.
    #[arg(long = "K")]
    #[serde(default, rename = "K")]
    pub k: Option<usize>,
    /// Hardy check: source space X (JSON).
    #[arg(long)]
    #[serde(default, deserialize_with = "string_or_json")]
    pub x: Option<String>,
    /// Hardy check: target space Y (JSON).
    #[arg(long)]
    #[serde(default, deserialize_with = "string_or_json")]
    pub y: Option<String>,
    /// Hardy check: profiles separated by '|'.
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    /// Grid `t_min,t_max,nodes_per_decade`; defaults to $RINORM_GRID, then 1e-8,1e8,64.
    #[arg(long)]
    #[serde(default)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub format: Option<Format>,
    /// Report path; stdout when absent.
    #[arg(long)]
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Whitespace-separated data file for plotting.
    #[arg(long)]
    #[serde(default)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Randomized cases per selftest suite.
    #[arg(long)]
    #[serde(default)]
    pub cases: Option<usize>,
}

macro_rules! merge {
    ($a:ident, $b:ident; $($f:ident),*) => {
        RunConfig { $($f: $a.$f.or($b.$f)),* }
    };
}

impl RunConfig {
    /// Fields of `self` win over `file`.
    pub fn over(self, file: RunConfig) -> RunConfig {
        let (a, b) = (self, file);
        merge!(a, b; space, profile, atoms, m, n, p, q, a0, a_inf, p0, p_inf, young, kind, offset,
            dilations, k, x, y, family, grid, format, output, plot, seed, cases)
    }
}

#[derive(Debug, Parser)]
#[command(name = "rinorm", version, about = "Rearrangement-invariant norms and optimal Sobolev-Poincaré targets")]
pub struct Cli {
    #[arg(value_enum)]
    pub verb: Verb,
    /// JSON config file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunConfig,
}

/// Failure classes with fixed exit codes.
#[derive(Debug)]
pub enum Failure {
    Parse(String),
    Lib(Error),
    Io(String),
    Selftest(usize),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Lib(Error::Domain(_) | Error::Divergent(_)) => 3,
            Failure::Lib(Error::NotCovered(_)) => 4,
            Failure::Lib(Error::NonConvergence(_) | Error::Bracket { .. }) => 5,
            Failure::Io(_) | Failure::Selftest(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Parse(s) => write!(f, "parse error: {s}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(s) => write!(f, "i/o error: {s}"),
            Failure::Selftest(k) => write!(f, "selftest: {k} suite(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn need<T>(v: Option<T>, flag: &str) -> Outcome<T> {
    v.ok_or_else(|| Failure::Parse(format!("missing --{flag}")))
}

fn parsed<T>(r: std::result::Result<T, String>) -> Outcome<T> {
    r.map_err(Failure::Parse)
}

/// Numbers rounded to 12 significant digits, printed in shortest form.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_infinite() {
            if x > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            "0.0".into()
        };
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{r:?}")
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Failure::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

fn json_text<T: Serialize>(v: &T) -> Outcome<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Io(e.to_string()))
}

fn resolve_grid(cfg: &RunConfig) -> Outcome<Grid> {
    match cfg.grid.clone().or_else(|| std::env::var("RINORM_GRID").ok()) {
        Some(s) => parsed(parse::parse_grid(&s)),
        None => Ok(Grid::default()),
    }
}

fn mn(cfg: &RunConfig) -> Outcome<(usize, usize)> {
    let (m, n) = (cfg.m.unwrap_or(1), need(cfg.n, "n")?);
    if n < 2 || m < 1 || m >= n {
        return Err(Failure::Parse(format!("need n ≥ 2 and 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    Ok((m, n))
}

fn write_plot(path: &Option<PathBuf>, header: &str, rows: &[(f64, f64)]) -> Outcome<()> {
    if let Some(p) = path {
        let mut s = format!("# {header}\n");
        for (a, b) in rows {
            s.push_str(&format!("{} {}\n", fmt_num(*a), fmt_num(*b)));
        }
        std::fs::write(p, s).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// Runs one verb and returns the report text.
pub fn run(verb: Verb, cfg: &RunConfig) -> Outcome<String> {
    let grid = resolve_grid(cfg)?;
    let default_fmt = match verb {
        Verb::CaseTable | Verb::OptimalTarget => Format::Json,
        _ => Format::Csv,
    };
    let fmt = cfg.format.unwrap_or(default_fmt);
    match verb {
        Verb::Rearrange => {
            let f = parsed(parse::parse_atoms(&need(cfg.atoms.clone(), "atoms")?))?;
            let s = decreasing_rearrangement(&f);
            let pts: Vec<(f64, f64)> = s
                .values
                .iter()
                .enumerate()
                .flat_map(|(i, &v)| [(s.breakpoints[i], v), (s.breakpoints[i + 1], v)])
                .collect();
            write_plot(&cfg.plot, "t f*(t)", &pts)?;
            match fmt {
                Format::Json => json_text(&s),
                Format::Csv => csv_text(
                    &["t_start", "t_end", "value"],
                    s.values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| vec![fmt_num(s.breakpoints[i]), fmt_num(s.breakpoints[i + 1]), fmt_num(v)])
                        .collect(),
                ),
            }
        }
        Verb::Norm => {
            let x = parsed(parse::parse_space(&need(cfg.space.clone(), "space")?))?;
            let f = parsed(parse::parse_profile(&need(cfg.profile.clone(), "profile")?))?;
            let v = ri_norm(&f, &x, &grid)?;
            match fmt {
                Format::Json => json_text(&serde_json::json!({ "space": x, "norm": v })),
                Format::Csv => Ok(format!("{}\n", fmt_num(v))),
            }
        }
        Verb::OptimalTarget => {
            let (m, n) = mn(cfg)?;
            let x = parsed(parse::parse_space(&need(cfg.space.clone(), "space")?))?;
            let t = resolve_target(&x, m, n, &grid)?;
            match fmt {
                Format::Json => json_text(&t),
                Format::Csv => csv_text(
                    &["row_id", "target", "unique", "provenance"],
                    vec![vec![
                        t.row_id.clone().unwrap_or_default(),
                        t.target.as_ref().map_or("sigma_m'".into(), |d| d.label()),
                        t.unique.map_or(String::new(), |u| u.to_string()),
                        format!("{:?}", t.provenance),
                    ]],
                ),
            }
        }
        Verb::YoungTransform => {
            let (m, n) = mn(cfg)?;
            let a = parsed(parse::parse_young(&need(cfg.young.clone(), "young")?))?;
            let r = sobolev_young_transform(&a, m, n, &grid)?;
            let ts: Vec<f64> = (-16..=16).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
            let rows: Vec<(f64, f64, f64)> = ts.iter().map(|&t| (t, a.eval(t), r.a_m.eval(t))).collect();
            write_plot(&cfg.plot, "t A_m(t)", &rows.iter().map(|r| (r.0, r.2)).collect::<Vec<_>>())?;
            match fmt {
                Format::Json => json_text(&serde_json::json!({
                    "young": a,
                    "m": m,
                    "n": n,
                    "h_infinity": r.h_infinity,
                    "samples": rows.iter().map(|r| serde_json::json!({"t": r.0, "a": r.1, "a_m": r.2})).collect::<Vec<_>>(),
                })),
                Format::Csv => csv_text(
                    &["t", "a", "a_m"],
                    rows.iter().map(|r| vec![fmt_num(r.0), fmt_num(r.1), fmt_num(r.2)]).collect(),
                ),
            }
        }
        Verb::CaseTable => {
            let (m, n) = mn(cfg)?;
            if cfg.p0.is_some() || cfg.p_inf.is_some() {
                let row = orlicz_case_table(
                    need(cfg.p0, "p0")?,
                    need(cfg.p_inf, "pInf")?,
                    cfg.a0.unwrap_or(0.0),
                    cfg.a_inf.unwrap_or(0.0),
                    m,
                    n,
                )?;
                return match fmt {
                    Format::Json => json_text(&row),
                    Format::Csv => csv_text(
                        &["zero_id", "near_zero", "infinity_id", "near_infinity"],
                        vec![vec![
                            row.zero_id.clone(),
                            row.near_zero.label(),
                            row.infinity_id.clone(),
                            row.near_infinity.label(),
                        ]],
                    ),
                };
            }
            let p = parsed(parse::parse_real(&need(cfg.p.clone(), "p")?))?;
            let q = parsed(parse::parse_real(&need(cfg.q.clone(), "q")?))?;
            let layer = [cfg.a0.unwrap_or(0.0), cfg.a_inf.unwrap_or(0.0)];
            let row = glz_case_table(p, q, &[layer], m, n)?;
            match fmt {
                Format::Json => json_text(&row),
                Format::Csv => csv_text(
                    &["row_id", "target", "unique"],
                    vec![vec![row.row_id.clone(), row.target.label(), row.unique.to_string()]],
                ),
            }
        }
        Verb::VerifyPoincare => {
            let (m, n) = mn(cfg)?;
            let x = parsed(parse::parse_space(&need(cfg.space.clone(), "space")?))?;
            let kind = parsed(parse::parse_kind(cfg.kind.as_deref().unwrap_or("gaussian")))?;
            let u = make_test_function(kind, n)?.with_offset(cfg.offset.unwrap_or(0.0));
            let dil = parsed(parse::parse_list(cfg.dilations.as_deref().unwrap_or("1")))?;
            let spec = resolve_target(&x, m, n, &grid)?;
            let k = cfg.k.unwrap_or(64);
            let rows = dilation_sweep(&u, &x, &spec, m, k, &dil, &grid)
                .into_iter()
                .zip(&dil)
                .map(|(r, &d)| match r {
                    Ok(row) => Ok(row),
                    Err(Error::NonConvergence(_)) => Ok(SweepRow {
                        family: kind.family().into(),
                        param: d,
                        source_norm: f64::NAN,
                        target_norm: f64::NAN,
                        ratio: f64::NAN,
                        converged: false,
                        degenerate: false,
                    }),
                    Err(e) => Err(e),
                })
                .collect::<crate::error::Result<Vec<_>>>()?;
            write_plot(&cfg.plot, "dilation ratio", &rows.iter().map(|r| (r.param, r.ratio)).collect::<Vec<_>>())?;
            match fmt {
                Format::Json => json_text(&rows),
                Format::Csv => csv_text(
                    SweepRow::CSV_HEADER,
                    rows.iter()
                        .map(|r| {
                            vec![
                                r.family.clone(),
                                fmt_num(r.param),
                                fmt_num(r.source_norm),
                                fmt_num(r.target_norm),
                                fmt_num(r.ratio),
                                r.converged.to_string(),
                                r.degenerate.to_string(),
                            ]
                        })
                        .collect(),
                ),
            }
        }
        Verb::Hardy => {
            let n = need(cfg.n, "n")?;
            if n < 2 {
                return Err(Failure::Parse(format!("need n ≥ 2, got {n}")));
            }
            let x = parsed(parse::parse_space(&need(cfg.x.clone(), "x")?))?;
            let y = parsed(parse::parse_space(&need(cfg.y.clone(), "y")?))?;
            let fam_src = need(cfg.family.clone(), "family")?;
            let names: Vec<&str> = fam_src.split('|').map(str::trim).filter(|s| !s.is_empty()).collect();
            let fam = names
                .iter()
                .map(|s| parse::parse_profile(s))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(Failure::Parse)?;
            let r = hardy_check(&x, &y, &fam, n, &grid)?;
            match fmt {
                Format::Json => json_text(&r),
                Format::Csv => csv_text(
                    &["member", "ratio"],
                    names
                        .iter()
                        .zip(&r.ratios)
                        .map(|(s, v)| vec![s.to_string(), v.map_or("skipped".into(), fmt_num)])
                        .collect(),
                ),
            }
        }
        Verb::Selftest => {
            let reps = selftest::run_all(cfg.seed.unwrap_or(0), cfg.cases.unwrap_or(selftest::DEFAULT_CASES), &grid);
            let text = match fmt {
                Format::Json => json_text(&reps)?,
                Format::Csv => csv_text(
                    &["suite", "cases", "violations", "worst_excess"],
                    reps.iter()
                        .map(|r| {
                            vec![
                                r.name.to_string(),
                                r.cases.to_string(),
                                r.violations.to_string(),
                                fmt_num(r.worst_excess),
                            ]
                        })
                        .collect(),
                )?,
            };
            let failed = reps.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                eprint!("{text}");
                return Err(Failure::Selftest(failed));
            }
            Ok(text)
        }
    }
}

fn load_config(path: &PathBuf) -> Outcome<RunConfig> {
    let s = std::fs::read_to_string(path).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Failure::Parse(format!("config {}: {e}", path.display())))
}

/// Parses arguments, runs the verb and maps failures to exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = (|| {
        let file = match &cli.config {
            Some(p) => load_config(p)?,
            None => RunConfig::default(),
        };
        let cfg = cli.run.clone().over(file);
        let text = run(cli.verb, &cfg)?;
        match &cfg.output {
            Some(p) => std::fs::write(p, &text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Io(e.to_string())),
        }
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
