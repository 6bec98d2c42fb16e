//! Run configuration: a TOML file flattened to dotted keys, plus overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use toml::Value;

use crate::CliError;

/// Every key the configuration understands, with its default rendered as TOML.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("gamma", Some("1.0")),
    ("c", Some("1.0")),
    ("pulse.kind", Some("\"rectangular\"")),
    ("pulse.length", Some("20.0")),
    ("pulse.center", None),
    ("pulse.width", None),
    ("pulse.path", None),
    ("grid.x_min", None),
    ("grid.x_max", None),
    ("grid.n", None),
    ("anchor_x", None),
    ("tau.min", Some("-10.0")),
    ("tau.max", Some("10.0")),
    ("tau.n", Some("2001")),
    ("g2.normalization", Some("\"long-pulse\"")),
    ("g2.length", None),
    ("g2.from", None),
    ("oracle.dx", Some("0.01")),
    ("oracle.mode", Some("\"two\"")),
    ("oracle.ratio", Some("true")),
    ("oracle.tol", None),
    ("compare.tol", Some("1e-10")),
    ("output.dir", Some("\"out\"")),
];

const COUNT_KEYS: &[&str] = &["grid.n", "tau.n"];

pub fn is_key(name: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == name)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseKind {
    Rectangular { length: f64 },
    Gaussian { center: f64, width: f64 },
    File { path: PathBuf },
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G2Norm {
    LongPulse,
    Local,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma: f64,
    pub c: f64,
    pub pulse: PulseKind,
    pub grid: Option<GridSpec>,
    pub anchor_x: Option<f64>,
    pub tau: (f64, f64, usize),
    pub g2_norm: G2Norm,
    pub g2_length: Option<f64>,
    pub g2_from: Option<PathBuf>,
    pub oracle_dx: f64,
    pub oracle_mode: OracleMode,
    pub oracle_ratio: bool,
    pub oracle_tol: Option<f64>,
    pub compare_tol: f64,
    pub out_dir: PathBuf,
    /// Effective flat key/value pairs, defaults included, for headers and manifests.
    pub flat: BTreeMap<String, Value>,
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Table(t) => {
            for (k, v) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// Parses an override value as a TOML scalar, falling back to a bare string.
pub fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Loads `path` (if any), applies `overrides` in order and validates.
pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig, CliError> {
    let mut flat = BTreeMap::new();
    for (k, d) in KEYS {
        if let Some(d) = d {
            flat.insert(k.to_string(), parse_value(d));
        }
    }
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
        let mut file = BTreeMap::new();
        flatten("", &Value::Table(table), &mut file);
        flat.extend(file);
    }
    for (k, v) in overrides {
        flat.insert(k.clone(), parse_value(v));
    }
    for k in flat.keys() {
        if !is_key(k) {
            return Err(CliError::Config(format!("unknown key `{k}`")));
        }
    }
    // `length = 4` and `length = 4.0` are the same run; keep one spelling in manifests.
    for (k, v) in flat.iter_mut() {
        if let (Value::Integer(i), false) = (&*v, COUNT_KEYS.contains(&k.as_str())) {
            *v = Value::Float(*i as f64);
        }
    }
    build(flat)
}

fn num(flat: &BTreeMap<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match flat.get(key) {
        None => Ok(None),
        Some(Value::Float(f)) => Ok(Some(*f)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(other) => Err(CliError::Config(format!("`{key}` must be a number, got {other}"))),
    }
}

fn req(flat: &BTreeMap<String, Value>, key: &str) -> Result<f64, CliError> {
    num(flat, key)?.ok_or_else(|| CliError::Config(format!("missing `{key}`")))
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
    }
}

fn count(flat: &BTreeMap<String, Value>, key: &str) -> Result<Option<usize>, CliError> {
    match flat.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 2 => Ok(Some(*i as usize)),
        Some(other) => Err(CliError::Config(format!("`{key}` must be an integer >= 2, got {other}"))),
    }
}

fn text<'a>(flat: &'a BTreeMap<String, Value>, key: &str) -> Result<Option<&'a str>, CliError> {
    match flat.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(CliError::Config(format!("`{key}` must be a string, got {other}"))),
    }
}

fn build(flat: BTreeMap<String, Value>) -> Result<RunConfig, CliError> {
    let gamma = positive("gamma", req(&flat, "gamma")?)?;
    let c = positive("c", req(&flat, "c")?)?;
    let pulse = match text(&flat, "pulse.kind")?.unwrap_or("rectangular") {
        "rectangular" => PulseKind::Rectangular { length: positive("pulse.length", req(&flat, "pulse.length")?)? },
        "gaussian" => PulseKind::Gaussian {
            center: req(&flat, "pulse.center")?,
            width: positive("pulse.width", req(&flat, "pulse.width")?)?,
        },
        "file" => PulseKind::File {
            path: text(&flat, "pulse.path")?
                .map(PathBuf::from)
                .ok_or_else(|| CliError::Config("`pulse.kind = \"file\"` needs `pulse.path`".into()))?,
        },
        "zero" => PulseKind::Zero,
        other => return Err(CliError::Config(format!("unknown pulse kind `{other}`"))),
    };
    let grid = match (num(&flat, "grid.x_min")?, num(&flat, "grid.x_max")?, count(&flat, "grid.n")?) {
        (None, None, None) => None,
        (Some(x_min), Some(x_max), Some(n)) if x_max > x_min => Some(GridSpec { x_min, x_max, n }),
        (Some(_), Some(_), Some(_)) => return Err(CliError::Config("`grid.x_max` must exceed `grid.x_min`".into())),
        _ => return Err(CliError::Config("`grid.x_min`, `grid.x_max` and `grid.n` go together".into())),
    };
    let tau_n = count(&flat, "tau.n")?.unwrap_or(2001);
    let tau = (req(&flat, "tau.min")?, req(&flat, "tau.max")?, tau_n);
    if !(tau.1 > tau.0) {
        return Err(CliError::Config("`tau.max` must exceed `tau.min`".into()));
    }
    let g2_norm = match text(&flat, "g2.normalization")?.unwrap_or("long-pulse") {
        "long-pulse" => G2Norm::LongPulse,
        "local" => G2Norm::Local,
        other => return Err(CliError::Config(format!("unknown normalization `{other}`"))),
    };
    let oracle_mode = match text(&flat, "oracle.mode")?.unwrap_or("two") {
        "one" => OracleMode::One,
        "two" => OracleMode::Two,
        other => return Err(CliError::Config(format!("`oracle.mode` is `one` or `two`, got `{other}`"))),
    };
    let oracle_ratio = match flat.get("oracle.ratio") {
        Some(Value::Boolean(b)) => *b,
        None => true,
        Some(other) => return Err(CliError::Config(format!("`oracle.ratio` must be a boolean, got {other}"))),
    };
    Ok(RunConfig {
        gamma,
        c,
        pulse,
        grid,
        anchor_x: num(&flat, "anchor_x")?,
        tau,
        g2_norm,
        g2_length: num(&flat, "g2.length")?.map(|v| positive("g2.length", v)).transpose()?,
        g2_from: text(&flat, "g2.from")?.map(PathBuf::from),
        oracle_dx: positive("oracle.dx", req(&flat, "oracle.dx")?)?,
        oracle_mode,
        oracle_ratio,
        oracle_tol: num(&flat, "oracle.tol")?.map(|v| positive("oracle.tol", v)).transpose()?,
        compare_tol: positive("compare.tol", req(&flat, "compare.tol")?)?,
        out_dir: PathBuf::from(text(&flat, "output.dir")?.unwrap_or("out")),
        flat,
    })
}

/// Splits `--key value` / `--key=value` pairs for configuration keys out of
/// the raw argument list, leaving everything else for the flag parser.
pub type Overrides = Vec<(String, String)>;

pub fn extract_overrides(args: Vec<String>) -> Result<(Vec<String>, Overrides), CliError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut found = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(body) = a.strip_prefix("--") else {
            rest.push(a);
            continue;
        };
        let (name, inline) = match body.split_once('=') {
            Some((n, v)) => (n.to_string(), Some(v.to_string())),
            None => (body.to_string(), None),
        };
        if !is_key(&name) {
            if name.contains('.') {
                return Err(CliError::Config(format!("unknown key `{name}`")));
            }
            rest.push(a);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| CliError::Config(format!("`--{name}` needs a value")))?,
        };
        found.push((name, value));
    }
    Ok((rest, found))
}
