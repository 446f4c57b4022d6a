//! Command-line front end with three subcommands:
//!
//! * `iterate` steps a system along a sign sequence,
//! * `solve` evaluates the closed-form branches,
//! * `verify` runs the verification suites.
//!
//! Settings are resolved in one place: command-line flags override a JSON
//! file given with `--config`, which overrides the built-in defaults
//! (tolerance `rel 1e-9, abs 1e-12`, seed 42, CSV output, sampling scale
//! 1.25). The seed also falls back to `SOLVMAPS_SEED`.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error,
//! 3 numeric failure (output up to the failing step is still written).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::Error;
use crate::harness::{run_suites, Family, VerifyConfig, SAMPLING_SCALE};
use crate::maps::{
    CubicFamilyParams, GeneralizedParams, LinearChange, QuadraticFamilyParams, SqrtSystemParams,
};
use crate::numeric::{Cx, Sign, SignSequence, Tolerance};
use crate::pair::states_match;
use crate::ysystem::{y_closed, y_step, YParams, YState};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Numeric(Error),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e)
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "solvmaps",
    version,
    about = "Iterate, solve and verify solvable two-variable maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Step a system along a sign sequence, one row per step.
    Iterate(RunArgs),
    /// Closed-form branches (and coefficients) for each step.
    Solve(RunArgs),
    /// Run verification suites and print a summary.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file with any of the settings below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    system: Option<SystemKind>,
    /// Parameters as a JSON object, e.g. '{"a": 1, "b": [0, 1], "k": 1}'.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Initial state as two complex values: "1,0", "1+2i,-3i" or a JSON array.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    /// Sign per step over {+,-}; defaults to all "+".
    #[arg(long, allow_hyphen_values = true)]
    signs: Option<String>,
    #[arg(long)]
    tol_rel: Option<f64>,
    #[arg(long)]
    tol_abs: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "SOLVMAPS_SEED")]
    seed: Option<u64>,
    /// Suites to run (comma separated or repeated); all when omitted.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    #[arg(long)]
    sampling_scale: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Y,
    QuadFamily,
    Generalized,
    CubicFamily,
    SqrtQuad,
    SqrtCubic,
    Conjugated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub system: Option<SystemKind>,
    pub params: Option<Map<String, Value>>,
    pub x0: Option<Value>,
    pub steps: Option<usize>,
    pub signs: Option<String>,
    pub tol_rel: Option<f64>,
    pub tol_abs: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub suites: Option<Vec<String>>,
    pub sampling_scale: Option<f64>,
}

impl FileConfig {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("bad config {}: {e}", path.display())))
    }
}

/// A system with its parameters.
#[derive(Debug, Clone)]
pub enum System {
    Y(YParams),
    Pair(Family),
}

/// Fully resolved settings for `iterate` and `solve`.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: System,
    pub x0: [Cx; 2],
    pub steps: usize,
    pub signs: Option<SignSequence>,
    pub tol: Tolerance,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn resolve(args: RunArgs) -> Result<Self, CliError> {
        let file = FileConfig::load(args.config.as_ref())?;
        let kind = args
            .system
            .or(file.system)
            .ok_or_else(|| CliError::input("--system is required"))?;
        let params = match args.params {
            Some(text) => match serde_json::from_str(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(CliError::input("--params must be a JSON object")),
                Err(e) => return Err(CliError::input(format!("bad --params: {e}"))),
            },
            None => file.params.unwrap_or_default(),
        };
        let system = build_system(kind, &params)?;
        let x0 = match (args.x0, file.x0) {
            (Some(s), _) => parse_pair(&s)?,
            (None, Some(v)) => parse_pair_value(&v)?,
            (None, None) => return Err(CliError::input("--x0 is required")),
        };
        let steps = args
            .steps
            .or(file.steps)
            .ok_or_else(|| CliError::input("--steps is required"))?;
        let signs = match args.signs.or(file.signs) {
            Some(s) => {
                let seq: SignSequence = s
                    .parse()
                    .map_err(|e: Error| CliError::input(e.to_string()))?;
                if seq.len() != steps {
                    return Err(CliError::input(format!(
                        "--signs has {} entries but --steps is {steps}",
                        seq.len()
                    )));
                }
                if matches!(system, System::Y(_)) {
                    return Err(CliError::input("the y system has no sign choice"));
                }
                Some(seq)
            }
            None => None,
        };
        let tol = Tolerance::new(
            args.tol_rel
                .or(file.tol_rel)
                .unwrap_or(Tolerance::DEFAULT.rel),
            args.tol_abs
                .or(file.tol_abs)
                .unwrap_or(Tolerance::DEFAULT.abs),
        )
        .map_err(|e| CliError::input(e.to_string()))?;
        Ok(RunConfig {
            system,
            x0,
            steps,
            signs,
            tol,
            out: args.out.or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
        })
    }
}

/// Reads named parameters and rejects names that were never asked for.
struct ParamReader<'a> {
    map: &'a Map<String, Value>,
    used: BTreeSet<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(map: &'a Map<String, Value>) -> Self {
        Self {
            map,
            used: BTreeSet::new(),
        }
    }

    fn get(&mut self, key: &'static str) -> Result<&'a Value, CliError> {
        self.used.insert(key);
        self.map
            .get(key)
            .ok_or_else(|| CliError::input(format!("missing parameter {key}")))
    }

    fn cx(&mut self, key: &'static str) -> Result<Cx, CliError> {
        let v = self.get(key)?;
        parse_complex_value(v).map_err(|e| CliError::input(format!("parameter {key}: {e}")))
    }

    fn int(&mut self, key: &'static str) -> Result<i64, CliError> {
        let v = self.get(key)?;
        let parsed = match v {
            Value::Number(n) => n.as_i64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        parsed.ok_or_else(|| CliError::input(format!("parameter {key} must be an integer")))
    }

    fn finish(self) -> Result<(), CliError> {
        let unknown: Vec<_> = self
            .map
            .keys()
            .filter(|k| !self.used.contains(k.as_str()))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::input(format!("unknown parameters {unknown:?}")))
        }
    }
}

pub fn build_system(kind: SystemKind, params: &Map<String, Value>) -> Result<System, CliError> {
    let mut r = ParamReader::new(params);
    let sqrt = |r: &mut ParamReader| -> Result<SqrtSystemParams, CliError> {
        Ok(SqrtSystemParams {
            alpha: r.cx("alpha")?,
            beta: r.cx("beta")?,
            gamma: r.cx("gamma")?,
            k: r.int("k")?,
            q: r.int("q")?,
            r: r.int("r")?,
        })
    };
    let system = match kind {
        SystemKind::Y => {
            let p = sqrt(&mut r)?;
            System::Y(p.y_params()?)
        }
        SystemKind::SqrtQuad => System::Pair(Family::SqrtQuad(sqrt(&mut r)?)),
        SystemKind::SqrtCubic => System::Pair(Family::SqrtCubic(sqrt(&mut r)?)),
        SystemKind::QuadFamily => {
            let p = QuadraticFamilyParams::new(r.cx("a")?, r.cx("b")?, r.int("k")?);
            System::Pair(Family::QuadFamily(p))
        }
        SystemKind::CubicFamily => {
            let p = CubicFamilyParams::new(r.cx("a")?, r.cx("b")?, r.int("k")?);
            System::Pair(Family::CubicFamily(p))
        }
        SystemKind::Generalized => {
            let (alpha, beta) = (r.cx("alpha")?, r.cx("beta")?);
            let b = [r.cx("B1")?, r.cx("B2")?];
            let c = [r.cx("C1")?, r.cx("C2")?, r.cx("C3")?];
            System::Pair(Family::Generalized(GeneralizedParams::new(
                alpha,
                beta,
                b,
                c,
                r.int("k")?,
            )?))
        }
        SystemKind::Conjugated => {
            let change = LinearChange::new(r.cx("A11")?, r.cx("A12")?, r.cx("A21")?, r.cx("A22")?)?;
            let params = CubicFamilyParams::new(r.cx("a")?, r.cx("b")?, r.int("k")?);
            System::Pair(Family::Conjugated { change, params })
        }
    };
    r.finish()?;
    Ok(system)
}

/// Parses `1.5`, `-2i`, `i`, `3-4i`, `1e-3+2e-4i` (or with `j`).
pub fn parse_complex(s: &str) -> Result<Cx, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex value {s:?}");
    let num = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let (re, im) = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        None => (t.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            match split {
                Some(i) => (
                    body[..i].parse::<f64>().map_err(|_| bad())?,
                    num(&body[i..])?,
                ),
                None => (0.0, num(body)?),
            }
        }
    };
    let z = Cx::new(re, im);
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// A complex value given in JSON as a number, `[re, im]` or a literal string.
pub fn parse_complex_value(v: &Value) -> Result<Cx, String> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .map(|re| Cx::new(re, 0.0))
            .ok_or_else(|| format!("bad number {n}")),
        Value::String(s) => parse_complex(s),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Cx::new(re, im)),
            _ => Err(format!("bad complex pair {v}")),
        },
        _ => Err(format!("expected a number, [re, im] or a string, got {v}")),
    }
}

fn parse_pair_value(v: &Value) -> Result<[Cx; 2], CliError> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            let one = |x: &Value| parse_complex_value(x).map_err(CliError::Input);
            Ok([one(&a[0])?, one(&a[1])?])
        }
        Value::String(s) => parse_pair(s),
        _ => Err(CliError::input(format!(
            "initial state must hold two values, got {v}"
        ))),
    }
}

/// Parses an initial state: `"x1,x2"` with complex literals, optionally in
/// parentheses, or a JSON array of two values.
pub fn parse_pair(s: &str) -> Result<[Cx; 2], CliError> {
    let t = s.trim();
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t)
            .map_err(|e| CliError::input(format!("bad state {s:?}: {e}")))?;
        return parse_pair_value(&v);
    }
    let t = t.trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<_> = t.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::input(format!(
            "initial state must hold two values, got {s:?}"
        )));
    }
    Ok([
        parse_complex(parts[0]).map_err(CliError::Input)?,
        parse_complex(parts[1]).map_err(CliError::Input)?,
    ])
}

/// Column layout of an output file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `iterate` on a two-variable system.
    Orbit,
    /// `solve` on a two-variable system: both zeros plus the coefficients.
    Solution,
    /// Either subcommand on the y system.
    Coefficients,
}

impl Layout {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Layout::Orbit => &["x1", "x2"],
            Layout::Solution => &["x1", "x2", "y1", "y2"],
            Layout::Coefficients => &["y1", "y2"],
        }
    }

    pub fn has_branch(self) -> bool {
        self != Layout::Coefficients
    }

    pub fn csv_header(self) -> String {
        let mut cols = vec!["ell".to_string()];
        if self.has_branch() {
            cols.push("branch".into());
        }
        for n in self.names() {
            cols.push(format!("{n}_re"));
            cols.push(format!("{n}_im"));
        }
        cols.join(",")
    }
}

/// One output row. `branch` is the sign prefix for `iterate` and `+`/`-`
/// for `solve`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub ell: usize,
    pub branch: Option<String>,
    pub values: Vec<Cx>,
}

/// Shortest decimal that parses back to the same value; negative zero is
/// written as `0`.
fn fmt_f64(x: f64) -> String {
    (x + 0.0).to_string()
}

/// Floats are written in shortest round-trip form, so parsing the output
/// gives back the same values.
pub fn to_csv(layout: Layout, rows: &[Row]) -> String {
    let mut out = layout.csv_header();
    out.push('\n');
    for r in rows {
        let mut cols = vec![r.ell.to_string()];
        if layout.has_branch() {
            cols.push(r.branch.clone().unwrap_or_default());
        }
        for v in &r.values {
            cols.push(fmt_f64(v.re));
            cols.push(fmt_f64(v.im));
        }
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn to_jsonl(layout: Layout, rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        let mut obj = Map::new();
        obj.insert("ell".into(), Value::from(r.ell));
        if layout.has_branch() {
            obj.insert(
                "branch".into(),
                Value::from(r.branch.clone().unwrap_or_default()),
            );
        }
        for (name, v) in layout.names().iter().zip(&r.values) {
            obj.insert((*name).into(), serde_json::json!([v.re + 0.0, v.im + 0.0]));
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

pub fn parse_csv(layout: Layout, text: &str) -> Result<Vec<Row>, CliError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != layout.csv_header() {
        return Err(CliError::input(format!("unexpected header {header:?}")));
    }
    let width = 2 * layout.names().len();
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let bad = || CliError::input(format!("bad row {line:?}"));
            let cols: Vec<_> = line.split(',').collect();
            let skip = if layout.has_branch() { 2 } else { 1 };
            if cols.len() != skip + width {
                return Err(bad());
            }
            let ell = cols[0].parse().map_err(|_| bad())?;
            let branch = layout.has_branch().then(|| cols[1].to_string());
            let nums = cols[skip..]
                .iter()
                .map(|c| c.parse::<f64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            let values = nums.chunks(2).map(|p| Cx::new(p[0], p[1])).collect();
            Ok(Row {
                ell,
                branch,
                values,
            })
        })
        .collect()
}

pub fn parse_jsonl(layout: Layout, text: &str) -> Result<Vec<Row>, CliError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let bad = || CliError::input(format!("bad row {line:?}"));
            let v: Value = serde_json::from_str(line).map_err(|_| bad())?;
            let ell = v["ell"].as_u64().ok_or_else(bad)? as usize;
            let branch = if layout.has_branch() {
                Some(v["branch"].as_str().ok_or_else(bad)?.to_string())
            } else {
                None
            };
            let values = layout
                .names()
                .iter()
                .map(|n| parse_complex_value(&v[*n]).map_err(|_| bad()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Row {
                ell,
                branch,
                values,
            })
        })
        .collect()
}

pub fn parse_rows(layout: Layout, format: Format, text: &str) -> Result<Vec<Row>, CliError> {
    match format {
        Format::Csv => parse_csv(layout, text),
        Format::Jsonl => parse_jsonl(layout, text),
    }
}

fn render(layout: Layout, format: Format, rows: &[Row]) -> String {
    match format {
        Format::Csv => to_csv(layout, rows),
        Format::Jsonl => to_jsonl(layout, rows),
    }
}

/// Rows produced by a command, plus the error that cut them short, if any.
#[derive(Debug)]
pub struct Output {
    pub layout: Layout,
    pub rows: Vec<Row>,
    pub failure: Option<Error>,
}

fn y_row(ell: usize, y: &YState) -> Row {
    Row {
        ell,
        branch: None,
        values: vec![y.y1, y.y2],
    }
}

fn sign_prefix(signs: &SignSequence, len: usize) -> String {
    signs.iter().take(len).map(Sign::as_char).collect()
}

pub fn iterate(cfg: &RunConfig) -> Output {
    match &cfg.system {
        System::Y(p) => {
            let mut y = YState::new(cfg.x0[0], cfg.x0[1]);
            let mut rows = vec![y_row(0, &y)];
            let mut failure = None;
            for ell in 1..=cfg.steps {
                match y_step(p, &y) {
                    Ok(next) => {
                        y = next;
                        rows.push(y_row(ell, &y));
                    }
                    Err(e) => {
                        failure = Some(e.at_step(ell));
                        break;
                    }
                }
            }
            Output {
                layout: Layout::Coefficients,
                rows,
                failure,
            }
        }
        System::Pair(fam) => {
            let signs = cfg
                .signs
                .clone()
                .unwrap_or_else(|| SignSequence::all_plus(cfg.steps));
            let mut x = cfg.x0;
            let mut rows = vec![Row {
                ell: 0,
                branch: Some(String::new()),
                values: x.to_vec(),
            }];
            let mut failure = None;
            for (i, s) in signs.iter().enumerate() {
                match fam.step(s, &x) {
                    Ok(next) => {
                        x = next;
                        rows.push(Row {
                            ell: i + 1,
                            branch: Some(sign_prefix(&signs, i + 1)),
                            values: x.to_vec(),
                        });
                    }
                    Err(e) => {
                        failure = Some(e.at_step(i + 1));
                        break;
                    }
                }
            }
            Output {
                layout: Layout::Orbit,
                rows,
                failure,
            }
        }
    }
}

pub fn solve(cfg: &RunConfig) -> Result<Output, CliError> {
    match &cfg.system {
        System::Y(p) => {
            let y0 = YState::new(cfg.x0[0], cfg.x0[1]);
            let mut rows = Vec::new();
            let mut failure = None;
            for ell in 0..=cfg.steps {
                match y_closed(p, &y0, ell) {
                    Ok(c) => rows.push(y_row(ell, &c.state)),
                    Err(e) if e.is_numeric() => {
                        failure = Some(e.at_step(ell));
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(Output {
                layout: Layout::Coefficients,
                rows,
                failure,
            })
        }
        System::Pair(fam) => {
            let sol = fam.solve(&cfg.x0, cfg.steps)?;
            let mut rows = Vec::new();
            for e in &sol.entries {
                for (label, x) in [("+", e.plus), ("-", e.minus)] {
                    rows.push(Row {
                        ell: e.ell,
                        branch: Some(label.to_string()),
                        values: vec![x[0], x[1], e.y.y1, e.y.y2],
                    });
                }
            }
            Ok(Output {
                layout: Layout::Solution,
                rows,
                failure: sol.truncated,
            })
        }
    }
}

/// For `solve --signs`: which closed-form branch the iterated orbit sits on
/// at each step, `+`, `-`, `*` for both (coinciding branches) or `?`.
pub fn branch_track(cfg: &RunConfig, sol: &Output) -> Option<String> {
    let (System::Pair(fam), Some(_)) = (&cfg.system, &cfg.signs) else {
        return None;
    };
    let orbit = iterate(cfg);
    let mut labels = String::new();
    for row in orbit.rows.iter().skip(1) {
        let x = [row.values[0], row.values[1]];
        let at: Vec<_> = sol.rows.iter().filter(|r| r.ell == row.ell).collect();
        if at.len() != 2 {
            break;
        }
        let hit = |r: &Row| states_match(x, [r.values[0], r.values[1]], fam.unordered(), cfg.tol);
        labels.push(match (hit(at[0]), hit(at[1])) {
            (true, true) => '*',
            (true, false) => '+',
            (false, true) => '-',
            (false, false) => '?',
        });
    }
    Some(labels)
}

fn emit(cfg_out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cfg_out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write output: {e}"))),
    }
}

fn finish_output(cfg: &RunConfig, out: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    emit(&cfg.out, &render(out.layout, cfg.format, &out.rows), stdout)?;
    match &out.failure {
        Some(e) => Err(CliError::Numeric(e.clone())),
        None => Ok(()),
    }
}

fn run_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_ref())?;
    let defaults = VerifyConfig::default();
    let suites = if !args.suites.is_empty() {
        args.suites
    } else {
        file.suites.unwrap_or(defaults.suites)
    };
    let scale = args
        .sampling_scale
        .or(file.sampling_scale)
        .unwrap_or(SAMPLING_SCALE);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::input("--sampling-scale must be positive"));
    }
    let cfg = VerifyConfig {
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        suites,
        scale,
    };
    let report = run_suites(&cfg).map_err(|e| CliError::input(e.to_string()))?;
    if let Some(path) = args.out.or(file.out) {
        fs::write(&path, report.to_json())
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    stdout
        .write_all(report.summary().as_bytes())
        .map_err(|e| CliError::input(format!("cannot write output: {e}")))?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn dispatch(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match command {
        Command::Iterate(args) => {
            let cfg = RunConfig::resolve(args)?;
            finish_output(&cfg, &iterate(&cfg), stdout)
        }
        Command::Solve(args) => {
            let cfg = RunConfig::resolve(args)?;
            let out = solve(&cfg)?;
            if let (Some(track), Some(signs)) = (branch_track(&cfg, &out), &cfg.signs) {
                let _ = writeln!(stderr, "signs {signs} follow branches {track}");
            }
            finish_output(&cfg, &out, stdout)
        }
        Command::Verify(args) => run_verify(args, stdout),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
