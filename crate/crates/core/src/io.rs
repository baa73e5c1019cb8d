//! Command-line front end, `key=value` config files and CSV/JSON output.
//!
//! Exit codes: 0 success, 1 oracle or validation failure (and I/O failure),
//! 2 configuration error.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analysis::{
    self, fig2, power_scaling, run_sweep, sql_baseline, validation_ledger, Model, ModelParams, PowerScalingSpec,
    PowerScalingTable, SensitivityCurve, SensitivityRecord, SweepSpec, TimeGrid,
};
use crate::cavity::CavityParams;
use crate::cavityless::{self, CavitylessParams};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "OPTOFORCE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";
pub const CSV_HEADER: &str = "t_scaled,signal_per_f,noise,snr_per_f,f_min";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Sweep,
    Fig2,
    PowerScaling,
    Validate,
    Sql,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelSelect {
    Cavityless,
    Cavity,
    Both,
}

impl ModelSelect {
    fn models(self) -> Vec<Model> {
        match self {
            ModelSelect::Cavityless => vec![Model::Cavityless],
            ModelSelect::Cavity => vec![Model::Cavity],
            ModelSelect::Both => vec![Model::Cavityless, Model::Cavity],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "optoforce", version, about = "Force sensitivity of optomechanical detectors")]
struct Cli {
    command: Command,
    #[arg(long, value_enum)]
    model: Option<ModelSelect>,
    #[arg(long)]
    theta_over_chi: Option<String>,
    #[arg(long)]
    omega_over_theta: Option<String>,
    #[arg(long)]
    g_alpha_over_omega: Option<String>,
    /// Squeezing parameter(s), comma separated.
    #[arg(long)]
    s: Option<String>,
    /// Mirror thermal occupation(s), comma separated.
    #[arg(long)]
    n_th: Option<String>,
    /// Force amplitude.
    #[arg(long)]
    f: Option<String>,
    /// Cavity meter squeezing angle; default is the noise-minimising angle at each time point.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    tmin_scaled: Option<String>,
    #[arg(long)]
    tmax_scaled: Option<String>,
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    p_min: Option<String>,
    #[arg(long)]
    p_max: Option<String>,
    #[arg(long)]
    p_points: Option<String>,
    /// Output directory (default: $OPTOFORCE_OUT_DIR or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Run sweeps on one thread.
    #[arg(long)]
    sequential: bool,
    /// `key=value` config file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelSelect,
    pub theta_over_chi: f64,
    pub omega_over_theta: f64,
    pub g_alpha_over_omega: f64,
    pub s: Vec<f64>,
    pub n_th: Vec<f64>,
    pub f: f64,
    pub phi: Option<f64>,
    pub tmin_scaled: f64,
    pub tmax_scaled: f64,
    pub points: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_points: usize,
    pub out: PathBuf,
    pub format: Format,
    pub execution: Execution,
}

impl RunConfig {
    pub fn cavityless_params(&self) -> Result<CavitylessParams> {
        CavitylessParams::from_ratios(self.theta_over_chi, self.omega_over_theta, 1.0, self.f)
    }

    pub fn cavity_params(&self) -> Result<CavityParams> {
        CavityParams::from_ratio(self.g_alpha_over_omega, 1.0, self.f)
    }

    pub fn model_params(&self, model: Model) -> Result<ModelParams> {
        Ok(match model {
            Model::Cavityless => ModelParams::Cavityless(self.cavityless_params()?),
            Model::Cavity => ModelParams::Cavity(self.cavity_params()?),
        })
    }
}

const CONFIG_KEYS: &[&str] = &[
    "model",
    "theta_over_chi",
    "omega_over_theta",
    "g_alpha_over_omega",
    "s",
    "n_th",
    "f",
    "phi",
    "tmin_scaled",
    "tmax_scaled",
    "points",
    "p_min",
    "p_max",
    "p_points",
    "out",
    "format",
];

/// Parse `key=value` lines; `#` starts a comment. Unknown keys are rejected.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            field: format!("line {}", lineno + 1),
            message: format!("expected key=value, got `{line}`"),
        })?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::Config { field: key.into(), message: "unknown key".into() });
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Build a [`RunConfig`] from command-line tokens (including the program
/// name) and optional config file text. Precedence: flag, file, default.
pub fn parse_config<I, T>(args: I, config_text: Option<&str>) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    resolve(cli, config_text)
}

struct Layers<'a> {
    file: &'a BTreeMap<String, String>,
}

impl Layers<'_> {
    fn raw(&self, key: &str, cli: Option<String>) -> Option<String> {
        cli.or_else(|| self.file.get(key).cloned())
    }

    fn num<T: FromStr>(&self, key: &str, cli: Option<String>, default: T) -> Result<T> {
        match self.raw(key, cli) {
            Some(v) => parse_field(key, &v),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str, cli: Option<String>, default: f64) -> Result<Vec<f64>> {
        match self.raw(key, cli) {
            Some(v) => v.split(',').map(|x| parse_field(key, x)).collect(),
            None => Ok(vec![default]),
        }
    }

    fn choice<E: ValueEnum>(&self, key: &str, cli: Option<E>, default: E) -> Result<E> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(v) => E::from_str(v, true).map_err(|message| Error::Config { field: key.into(), message }),
            None => Ok(default),
        }
    }
}

fn parse_field<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config {
        field: field.into(),
        message: format!("cannot parse `{}`", value.trim()),
    })
}

fn config_err(field: &str, e: Error) -> Error {
    let message = match e {
        Error::Domain(m) | Error::Usage(m) => m,
        other => other.to_string(),
    };
    Error::Config { field: field.into(), message }
}

fn resolve(cli: Cli, config_text: Option<&str>) -> Result<RunConfig> {
    let file = match config_text {
        Some(t) => parse_config_text(t)?,
        None => BTreeMap::new(),
    };
    let l = Layers { file: &file };
    let default_model = match cli.command {
        Command::Sweep => ModelSelect::Cavityless,
        _ => ModelSelect::Both,
    };
    let default_points = match cli.command {
        Command::Fig2 => 4001,
        _ => 2001,
    };
    let out = match cli.out.or_else(|| file.get("out").map(PathBuf::from)) {
        Some(p) => p,
        None => std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), PathBuf::from),
    };
    let cfg = RunConfig {
        command: cli.command,
        model: l.choice("model", cli.model, default_model)?,
        theta_over_chi: l.num("theta_over_chi", cli.theta_over_chi, 1.025)?,
        omega_over_theta: l.num("omega_over_theta", cli.omega_over_theta, 10.3)?,
        g_alpha_over_omega: l.num("g_alpha_over_omega", cli.g_alpha_over_omega, 0.2)?,
        s: l.list("s", cli.s, 0.0)?,
        n_th: l.list("n_th", cli.n_th, 0.0)?,
        f: l.num("f", cli.f, 1.0)?,
        phi: l.raw("phi", cli.phi).map(|v| parse_field("phi", &v)).transpose()?,
        tmin_scaled: l.num("tmin_scaled", cli.tmin_scaled, 0.0)?,
        tmax_scaled: l.num("tmax_scaled", cli.tmax_scaled, 8.0 * PI)?,
        points: l.num("points", cli.points, default_points)?,
        p_min: l.num("p_min", cli.p_min, 1e-4)?,
        p_max: l.num("p_max", cli.p_max, 1e4)?,
        p_points: l.num("p_points", cli.p_points, 81)?,
        out,
        format: l.choice("format", cli.format, Format::Csv)?,
        execution: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    if !(cfg.theta_over_chi > 1.0) {
        return Err(Error::Config {
            field: "theta_over_chi".into(),
            message: format!("theta must exceed chi (theta_over_chi = {})", cfg.theta_over_chi),
        });
    }
    cfg.cavityless_params().map_err(|e| config_err("omega_over_theta", e))?;
    if cfg.omega_over_theta == 1.0 {
        return Err(Error::Config {
            field: "omega_over_theta".into(),
            message: "Theta must differ from Omega".into(),
        });
    }
    cfg.cavity_params().map_err(|e| config_err("g_alpha_over_omega", e))?;
    if !(cfg.f.is_finite() && cfg.f != 0.0) {
        return Err(Error::Config { field: "f".into(), message: format!("force must be finite and nonzero, got {}", cfg.f) });
    }
    if let Some(s) = cfg.s.iter().find(|s| !s.is_finite()) {
        return Err(Error::Config { field: "s".into(), message: format!("squeezing must be finite, got {s}") });
    }
    if let Some(n) = cfg.n_th.iter().find(|n| !(**n >= 0.0) || !n.is_finite()) {
        return Err(Error::Config { field: "n_th".into(), message: format!("thermal occupation must be >= 0, got {n}") });
    }
    TimeGrid::new(cfg.tmin_scaled, cfg.tmax_scaled, cfg.points).map_err(|e| config_err("points", e))?;
    if !(cfg.p_min > 0.0) || !(cfg.p_max > cfg.p_min) || cfg.p_points < 2 {
        return Err(Error::Config {
            field: "p_min".into(),
            message: format!("need 0 < p_min < p_max and p_points >= 2, got {} {} {}", cfg.p_min, cfg.p_max, cfg.p_points),
        });
    }
    Ok(())
}

/// Text form of a float: 17 significant digits, lowercase `inf`/`nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(fmt_f64(x))
    }
}

pub fn emit_curve(curve: &SensitivityCurve, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::with_capacity(curve.records.len() * 120);
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in &curve.records {
                let row = [r.t_scaled, r.signal_per_f, r.noise, r.snr_per_f, r.f_min].map(fmt_f64);
                out.push_str(&row.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        Format::Json => {
            let records: Vec<Value> = curve
                .records
                .iter()
                .map(|r| {
                    json!({
                        "t_scaled": json_f64(r.t_scaled),
                        "signal_per_f": json_f64(r.signal_per_f),
                        "noise": json_f64(r.noise),
                        "snr_per_f": json_f64(r.snr_per_f),
                        "f_min": json_f64(r.f_min),
                    })
                })
                .collect();
            let doc = json!({ "metadata": serde_json::to_value(&curve.meta)?, "records": records });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

/// Parse CSV produced by [`emit_curve`].
pub fn parse_curve_csv(text: &str) -> Result<Vec<SensitivityRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Usage("missing or wrong CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|x| x.parse::<f64>().map_err(|_| Error::Usage(format!("bad number `{x}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 5 {
                return Err(Error::Usage(format!("expected 5 fields, got {}", v.len())));
            }
            Ok(SensitivityRecord { t_scaled: v[0], signal_per_f: v[1], noise: v[2], snr_per_f: v[3], f_min: v[4] })
        })
        .collect()
}

/// File name of a curve: `{model}_{s}_{nth}.{ext}`.
pub fn curve_file_name(curve: &SensitivityCurve, format: Format) -> String {
    format!("{}_{}_{}.{}", curve.meta.model.name(), curve.meta.s, curve.meta.n_th, format.ext())
}

/// Write via a temporary file in the same directory and rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| Error::Usage(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::Domain(_) | Error::Usage(_) | Error::DegenerateResonance { .. } => 2,
        _ => 1,
    }
}

/// Execute a parsed config; returns the process exit code.
pub fn run(cfg: &RunConfig) -> i32 {
    match dispatch(cfg) {
        Ok((code, summary)) => {
            println!("{summary}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Full entry point: parse `args`, read `--config` if given, run.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let text = match &cli.config {
        Some(path) => match fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: {}", Error::Config { field: "config".into(), message: format!("{}: {e}", path.display()) });
                return 2;
            }
        },
        None => None,
    };
    match resolve(cli, text.as_deref()) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<(i32, String)> {
    if let Some(w) = cavityless::pi_signal_warning(&cfg.cavityless_params()?) {
        if cfg.model != ModelSelect::Cavity {
            eprintln!("warning: {w}");
        }
    }
    match cfg.command {
        Command::Sweep => {
            let mut curves = Vec::new();
            for model in cfg.model.models() {
                let mut spec = SweepSpec::new(
                    cfg.model_params(model)?,
                    TimeGrid::new(cfg.tmin_scaled, cfg.tmax_scaled, cfg.points)?,
                    cfg.s.clone(),
                    cfg.n_th.clone(),
                )?;
                spec.phi = cfg.phi;
                curves.extend(analysis::run_sweep_with(&spec, cfg.execution)?);
            }
            write_curves(cfg, &curves).map(|s| (0, format!("sweep: {s}")))
        }
        Command::Fig2 => {
            let mut curves = fig2(cfg.cavityless_params()?, cfg.cavity_params()?, cfg.points, cfg.execution)?;
            let keep = cfg.model.models();
            curves.retain(|c| keep.contains(&c.meta.model));
            write_curves(cfg, &curves).map(|s| (0, format!("fig2: {s}")))
        }
        Command::PowerScaling => {
            let mut parts = Vec::new();
            for model in cfg.model.models() {
                let hi = match model {
                    // The cavityless bundle leaves its regime well before 1e4.
                    Model::Cavityless => cfg.p_max.min(1e2),
                    Model::Cavity => cfg.p_max,
                };
                let spec = PowerScalingSpec::log_spaced(cfg.model_params(model)?, cfg.p_min, hi, cfg.p_points, cfg.s[0])?;
                let table = power_scaling(&spec)?;
                let path = cfg.out.join(format!("power_{}.{}", model.name(), cfg.format.ext()));
                write_atomic(&path, &emit_power(&table, cfg.format)?)?;
                parts.push(format!(
                    "{}: {} rows, slopes {:.4} / {:.4}",
                    model.name(),
                    table.rows.len(),
                    table.small_power_slope,
                    table.large_power_slope
                ));
            }
            Ok((0, format!("power-scaling: {}", parts.join("; "))))
        }
        Command::Validate => {
            let ledger = validation_ledger()?;
            write_atomic(&cfg.out.join("ledger.json"), &(serde_json::to_string_pretty(&ledger)? + "\n"))?;
            let failed: Vec<&str> = ledger.failures().iter().map(|e| e.id.as_str()).collect();
            let summary = format!(
                "validate: {} entries, {} failed{}",
                ledger.entries.len(),
                failed.len(),
                if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
            );
            Ok((if ledger.passed { 0 } else { 1 }, summary))
        }
        Command::Sql => {
            let mut doc = Map::new();
            let mut parts = Vec::new();
            for model in cfg.model.models() {
                let params = cfg.model_params(model)?;
                let t_scaled = params.disentangling_scaled_time();
                let f = sql_baseline(&params, params.time_from_scaled(t_scaled))?;
                doc.insert(model.name().into(), json!({ "t_scaled": t_scaled, "f_min": json_f64(f) }));
                parts.push(format!("{} f_min {} at t_scaled {}", model.name(), fmt_f64(f), fmt_f64(t_scaled)));
            }
            write_atomic(&cfg.out.join("sql.json"), &(serde_json::to_string_pretty(&Value::Object(doc))? + "\n"))?;
            Ok((0, format!("sql: {}", parts.join("; "))))
        }
    }
}

fn write_curves(cfg: &RunConfig, curves: &[SensitivityCurve]) -> Result<String> {
    // Render everything before touching the filesystem.
    let rendered = curves
        .iter()
        .map(|c| Ok((cfg.out.join(curve_file_name(c, cfg.format)), emit_curve(c, cfg.format)?)))
        .collect::<Result<Vec<_>>>()?;
    for (path, text) in &rendered {
        write_atomic(path, text)?;
    }
    let records: usize = curves.iter().map(|c| c.records.len()).sum();
    let best = curves
        .iter()
        .filter_map(|c| c.min_f_min().map(|m| (c, m)))
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1));
    let best = match best {
        Some((c, (t, f))) => format!(", min f_min {} at t_scaled {} ({})", fmt_f64(f), fmt_f64(t), curve_file_name(c, cfg.format)),
        None => String::new(),
    };
    Ok(format!("{} curves, {records} records{best}", curves.len()))
}

pub fn emit_power(table: &PowerScalingTable, format: Format) -> Result<String> {
    match format {
        Format::Csv => {
            let mut out = String::from("power_ratio,f_min,in_regime\n");
            for r in &table.rows {
                out.push_str(&format!("{},{},{}\n", fmt_f64(r.power_ratio), fmt_f64(r.f_min), r.in_regime));
            }
            Ok(out)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| json!({ "power_ratio": json_f64(r.power_ratio), "f_min": json_f64(r.f_min), "in_regime": r.in_regime }))
                .collect();
            let doc = json!({
                "small_power_slope": json_f64(table.small_power_slope),
                "large_power_slope": json_f64(table.large_power_slope),
                "rows": rows,
            });
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}

/// Convenience for library callers: run a sweep from a config without writing files.
pub fn sweep_curves(cfg: &RunConfig) -> Result<Vec<SensitivityCurve>> {
    let mut curves = Vec::new();
    for model in cfg.model.models() {
        let spec = SweepSpec::new(
            cfg.model_params(model)?,
            TimeGrid::new(cfg.tmin_scaled, cfg.tmax_scaled, cfg.points)?,
            cfg.s.clone(),
            cfg.n_th.clone(),
        )?;
        curves.extend(run_sweep(&spec)?);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str], text: Option<&str>) -> Result<RunConfig> {
        let mut v = vec!["optoforce"];
        v.extend_from_slice(args);
        parse_config(v, text)
    }

    #[test]
    fn defaults() {
        let c = parse(&["fig2"], None).unwrap();
        assert_eq!(c.model, ModelSelect::Both);
        assert_eq!((c.theta_over_chi, c.omega_over_theta, c.g_alpha_over_omega), (1.025, 10.3, 0.2));
        assert_eq!((c.s.clone(), c.n_th.clone(), c.f), (vec![0.0], vec![0.0], 1.0));
    }

    #[test]
    fn precedence() {
        let c = parse(&["sweep", "--s", "2"], Some("s=5\nn_th = 300 # comment\n")).unwrap();
        assert_eq!(c.s, vec![2.0]);
        assert_eq!(c.n_th, vec![300.0]);
        let c = parse(&["sweep"], Some("s=5")).unwrap();
        assert_eq!(c.s, vec![5.0]);
    }

    #[test]
    fn config_errors_name_the_field() {
        let e = parse(&["sweep", "--theta-over-chi", "0.9"], None).unwrap_err();
        assert!(e.to_string().contains("theta_over_chi") && e.to_string().contains("theta must exceed chi"), "{e}");
        assert_eq!(exit_code(&e), 2);
        let e = parse(&["sweep", "--s", "abc"], None).unwrap_err();
        assert!(e.to_string().contains("`s`"), "{e}");
        let e = parse(&["sweep"], Some("bogus=1")).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = parse(&["sweep", "--points", "1"], None).unwrap_err();
        assert!(e.to_string().contains("points"), "{e}");
    }

    #[test]
    fn float_text() {
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn write_atomic_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
