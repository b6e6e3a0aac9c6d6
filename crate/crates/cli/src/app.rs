//! Command dispatch for the `umbral` executable.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use umbral_core::combinatorics::{bell_number, complete_bell, partial_bell, stirling, StirlingKind};
use umbral_core::identities::{check, check_all, list_identities, Overrides};
use umbral_core::inversion::{atom_from_delta_series, cross_check};
use umbral_core::ops::materialize;
use umbral_core::poly::format_rational;
use umbral_core::umbra::render_moments;
use umbral_core::{Poly, Workspace, WorkspaceFile, DEFAULT_ORDER};
use umbral_lab::{compare, DiscreteDist, LabError, Model};

use crate::parse::parse_query;
use crate::resolve::Resolver;
use crate::series_expr::parse_series;

pub const DEFAULT_MC_SEED: u64 = 42;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] umbral_core::Error),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Lab(e) => e.kind(),
            CliError::Usage(_) => "UsageError",
            CliError::Io { .. } => "IoError",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "umbral", version, about = "Exact classical umbral calculus")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Truncation order N of all series and moment sequences.
    #[arg(long, global = true, env = "UMBRAL_ORDER", value_parser = clap::value_parser!(u16).range(1..=64))]
    pub order: Option<u16>,
    /// Workspace file (JSON).
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Defines an umbra for this run: `name=m0,m1,...,mN`.
    #[arg(long = "def", global = true, value_name = "NAME=MOMENTS")]
    pub defs: Vec<String>,
    /// Declares an indeterminate for this run.
    #[arg(long = "indet", global = true, value_name = "NAME")]
    pub indets: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E[expr^k].
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(short, default_value_t = 1)]
        k: usize,
    },
    /// Moments and generating function of an umbral polynomial.
    Gf {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Adds an umbra to the workspace file.
    Define {
        name: String,
        #[arg(long, value_delimiter = ',', required = true)]
        moments: Vec<String>,
    },
    /// Runs identity checks; exits 1 if any fails.
    Check {
        /// Identity id or `all`.
        id: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        list: bool,
    },
    /// Compositional inverse of an umbra or of `1 + series`.
    Invert {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        series: Option<String>,
    },
    /// Bell number B_n.
    Bell {
        #[arg(short)]
        n: usize,
    },
    /// Stirling number of the first (signed) or second kind.
    Stirling {
        #[arg(long, value_enum, default_value = "second")]
        kind: Kind,
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
    },
    /// Partial (with -k) or complete Bell polynomial in a1, a2, ...
    Bellpoly {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: Option<usize>,
    },
    /// Monte Carlo comparison of a Poisson model with its umbral moments.
    Mc {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        jumps: Option<String>,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_order: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Poisson,
    Compound,
    Randomized,
    RandomizedCompound,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: 2, stdout: String::new(), stderr: text }
            } else {
                Output { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let format = cli.global.format;
    match execute(&cli) {
        Ok((ok, doc)) => Output {
            code: if ok { 0 } else { 1 },
            stdout: render(&doc, format),
            stderr: String::new(),
        },
        Err(e) => {
            let doc = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            Output {
                code: 2,
                stdout: String::new(),
                stderr: render(&doc, format),
            }
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn render_poly(p: &Poly) -> String {
    match p.as_constant() {
        Some(c) => format_rational(&c),
        None => p.to_string(),
    }
}

fn execute(cli: &Cli) -> Result<(bool, Value)> {
    let g = &cli.global;
    match &cli.command {
        Command::Eval { expr, k } => {
            let mut ws = workspace(g)?;
            let query = parse_query(expr)?;
            let mut r = Resolver::new(&mut ws);
            let e = r.resolve(&query.expr)?;
            let value = r.workspace().eval(&e, *k)?;
            Ok((true, json!({"expr": query.to_string(), "k": k, "value": render_poly(&value)})))
        }
        Command::Gf { expr } => {
            let mut ws = workspace(g)?;
            let query = parse_query(expr)?;
            let mut r = Resolver::new(&mut ws);
            let e = r.resolve(&query.expr)?;
            let id = materialize(&mut ws, &e, &query.expr.to_string())?;
            let atom = ws.atom(id);
            let egf: Vec<String> = atom.egf.coeffs().iter().map(render_poly).collect();
            Ok((
                true,
                json!({
                    "expr": query.expr.to_string(),
                    "order": atom.order(),
                    "moments": render_moments(&atom.moments),
                    "egf": egf,
                }),
            ))
        }
        Command::Define { name, moments } => {
            let path = g
                .workspace
                .as_deref()
                .ok_or_else(|| CliError::Usage("define needs --workspace".into()))?;
            let mut ws = workspace(g)?;
            let moments = moments
                .iter()
                .map(|m| m.trim().parse::<Poly>())
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let id = ws.define_umbra(name, moments)?;
            let file = ws.to_file();
            let text = serde_json::to_string_pretty(&file).expect("workspace serializes");
            fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
            Ok((
                true,
                json!({
                    "name": name,
                    "order": ws.order(),
                    "moments": render_moments(&ws.atom(id).moments),
                    "workspace": path.display().to_string(),
                }),
            ))
        }
        Command::Check { id, n, k, trials, list } => {
            if *list {
                return Ok((true, to_value(list_identities())));
            }
            let id = id
                .as_deref()
                .ok_or_else(|| CliError::Usage("check needs an identity id, `all` or --list".into()))?;
            let overrides = Overrides { n: *n, k: *k, trials: *trials, seed: g.seed };
            let cases = if id == "all" {
                check_all(&overrides)?
            } else {
                vec![check(id, &overrides)?]
            };
            let ok = cases.iter().all(|c| c.result.passed());
            Ok((ok, to_value(cases)))
        }
        Command::Invert { name, series } => {
            let mut ws = workspace(g)?;
            let (label, alpha) = match (name, series) {
                (Some(name), None) => (name.clone(), ws.lookup(name)?),
                (None, Some(src)) => {
                    let h = parse_series(src, ws.order())?;
                    let label = format!("1 + {src}");
                    let id = atom_from_delta_series(&mut ws, &h, &label)?;
                    (label, id)
                }
                _ => return Err(CliError::Usage("invert needs an umbra name or --series".into())),
            };
            let order = ws.atom(alpha).order();
            let report = cross_check(&mut ws, alpha, order)?;
            let ok = report.all_hold();
            let mut doc = json!({"umbra": label});
            doc.as_object_mut()
                .expect("object")
                .extend(to_value(report).as_object().expect("report is an object").clone());
            Ok((ok, doc))
        }
        Command::Bell { n } => Ok((true, json!({"n": n, "value": format_rational(&bell_number(*n))}))),
        Command::Stirling { kind, n, k } => {
            let kind = match kind {
                Kind::First => StirlingKind::FirstSigned,
                Kind::Second => StirlingKind::Second,
            };
            let value = stirling(kind, *n, *k)?;
            Ok((true, json!({"kind": kind, "n": n, "k": k, "value": format_rational(&value)})))
        }
        Command::Bellpoly { n, k } => {
            let a: Vec<Poly> = (1..=*n).map(|i| Poly::var(&format!("a{i}"))).collect();
            let p = match k {
                Some(k) => partial_bell(*n, *k, &a)?,
                None => complete_bell(*n, &a)?,
            };
            Ok((true, json!({"n": n, "k": k, "polynomial": p.to_string()})))
        }
        Command::Mc { model, lambda, jumps, param, n, max_order } => {
            let model = build_model(*model, lambda.as_deref(), jumps.as_deref(), param.as_deref())?;
            let seed = g.seed.unwrap_or(DEFAULT_MC_SEED);
            let report = compare(&model, *n, seed, *max_order)?;
            Ok((report.passed(), to_value(report)))
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Loads the workspace file if given and present, then applies `--indet` and `--def`.
pub fn workspace(g: &Global) -> Result<Workspace> {
    let order = g.order.map(usize::from);
    let mut ws = match g.workspace.as_deref() {
        Some(path) if path.exists() => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let file: WorkspaceFile = serde_json::from_str(&text).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            Workspace::from_file(&file, order)?
        }
        _ => Workspace::new(order.unwrap_or(DEFAULT_ORDER)),
    };
    for x in &g.indets {
        ws.declare_indeterminate(x)?;
    }
    for def in &g.defs {
        let (name, moments) = def
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--def expects name=m0,m1,..., got {def:?}")))?;
        let mut moments = moments
            .split(',')
            .map(|m| m.trim().parse::<Poly>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if moments.len() > ws.order() + 1 {
            moments.truncate(ws.order() + 1);
        }
        ws.define_umbra(name.trim(), moments)?;
    }
    Ok(ws)
}

fn dist(src: Option<&str>, flag: &str) -> Result<DiscreteDist> {
    let src = src.ok_or_else(|| CliError::Usage(format!("this model needs --{flag}")))?;
    Ok(src.parse()?)
}

pub fn build_model(
    kind: ModelKind,
    lambda: Option<&str>,
    jumps: Option<&str>,
    param: Option<&str>,
) -> Result<Model> {
    let lambda = || -> Result<_> {
        let src = lambda.ok_or_else(|| CliError::Usage("this model needs --lambda".into()))?;
        Ok(umbral_core::poly::parse_rational(src)?)
    };
    let model = match kind {
        ModelKind::Poisson => Model::Poisson { lambda: lambda()? },
        ModelKind::Compound => Model::Compound {
            lambda: lambda()?,
            jumps: dist(jumps, "jumps")?,
        },
        ModelKind::Randomized => Model::Randomized {
            param: dist(param, "param")?,
        },
        ModelKind::RandomizedCompound => Model::RandomizedCompound {
            param: dist(param, "param")?,
            jumps: dist(jumps, "jumps")?,
        },
    };
    model.validate()?;
    Ok(model)
}

/// JSON, or aligned `key  value` lines with dotted paths for nested values.
pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("serializable") + "\n",
        Format::Text => {
            let mut rows = Vec::new();
            flatten(doc, String::new(), &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            rows.iter()
                .map(|(k, v)| {
                    if k.is_empty() {
                        format!("{v}\n")
                    } else {
                        format!("{k:width$}  {v}\n")
                    }
                })
                .collect()
        }
    }
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, join(k), out);
            }
        }
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar_text).collect();
            out.push((path, items.join(" ")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(x, join(&i.to_string()), out);
            }
        }
        other => out.push((path, scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}
