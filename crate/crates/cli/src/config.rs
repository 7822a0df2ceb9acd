//! Command line, config file and the merged run configuration.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use hm_lab_core::SolitonParams64;

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "hm-lab", version, about = "Curvature, regularity, staticity, complex-structure and energy checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form and finite-difference curvature at one radius.
    Curvature,
    /// Horizon, period of φ and the cone angle at the tip.
    Regularity,
    /// Vacuum residuals of the static spacetime and the static fit.
    StaticCheck,
    /// Almost-complex structure, Nijenhuis tensor and dω (even n).
    Complex,
    /// Mass, Hamiltonian energy and the density tail.
    Energy,
    /// Energy against the matched Horowitz-Myers member.
    Compare,
    /// Every module above at one parameter point.
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Regularity => "regularity",
            Command::StaticCheck => "static-check",
            Command::Complex => "complex",
            Command::Energy => "energy",
            Command::Compare => "compare",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Opts {
    /// Dimension of the Riemannian manifold.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub ell: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, global = true)]
    pub r0: Option<f64>,
    /// Torus periods, comma separated; a single value is used for every θ.
    #[arg(long, global = true, value_name = "CSV")]
    pub lambda: Option<String>,
    /// Newton constant.
    #[arg(long = "G", global = true)]
    pub g: Option<f64>,
    /// Sweep one parameter, e.g. `a=-5..5:41`.
    #[arg(long, global = true, value_name = "PARAM=LO..HI:COUNT", allow_hyphen_values = true)]
    pub sweep: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tol_fd: Option<f64>,
    #[arg(long, global = true)]
    pub tol_extrap: Option<f64>,
    #[arg(long, global = true)]
    pub root_tol: Option<f64>,
    /// Evaluation radius for `curvature` (default r₊ + max(r₊, ℓ)).
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Cosmological constant for `static-check` (default -n(n-1)/(2ℓ²)).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cc: Option<f64>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    A,
    R0,
    Ell,
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::A => "a",
            SweepParam::R0 => "r0",
            SweepParam::Ell => "ell",
            SweepParam::N => "n",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let m = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / m })
            .collect()
    }

    pub fn spec(&self) -> String {
        format!("{}={}..{}:{}", self.param.name(), self.lo, self.hi, self.count)
    }
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let bad = || format!("sweep `{s}` is not of the form param=lo..hi:count");
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let (range, count) = range.rsplit_once(':').ok_or_else(bad)?;
    let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
    let param = match name.trim() {
        "a" => SweepParam::A,
        "r0" => SweepParam::R0,
        "ell" => SweepParam::Ell,
        "n" => SweepParam::N,
        other => return Err(format!("cannot sweep `{other}`: choose one of a, r0, ell, n")),
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(format!("sweep range {lo}..{hi} must be finite"));
    }
    if count == 0 {
        return Err("sweep count must be at least 1".into());
    }
    let sweep = Sweep { param, lo, hi, count };
    if param == SweepParam::N {
        if let Some(v) = sweep.values().iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
            return Err(format!("sweep over n produces the non-integer value {v}"));
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tol_fd: f64,
    pub tol_extrap: f64,
    pub root_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tol_fd: 1e-6, tol_extrap: 1e-8, root_tol: 1e-12 }
    }
}

/// Everything a run needs, after merging flags, config file and defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: SolitonParams64,
    /// Periods as given, before expansion to `n - 2` entries.
    pub lambda: Vec<f64>,
    pub sweep: Option<Sweep>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
    pub r: Option<f64>,
    pub cc: Option<f64>,
}

const KEYS: [&str; 14] = [
    "n", "ell", "a", "r0", "lambda", "G", "sweep", "format", "out", "tol-fd", "tol-extrap", "root-tol", "r", "cc",
];

/// Reads `key = value` lines; `#` starts a comment, `_` and `-` are
/// interchangeable in keys.
pub fn parse_config_text(text: &str) -> Result<Opts, String> {
    let mut o = Opts::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: String| format!("config line {}: {msg}", i + 1);
        let (k, v) = line.split_once('=').ok_or_else(|| at(format!("expected key = value, got `{line}`")))?;
        let key = k.trim().replace('_', "-");
        let v = v.trim();
        if !KEYS.contains(&key.as_str()) {
            return Err(at(format!("unknown key `{}`", k.trim())));
        }
        if seen.contains(&key) {
            return Err(at(format!("duplicate key `{key}`")));
        }
        seen.push(key.clone());
        let f = |v: &str| v.parse::<f64>().map_err(|_| at(format!("`{key}` needs a number, got `{v}`")));
        match key.as_str() {
            "n" => o.n = Some(v.parse().map_err(|_| at(format!("`n` needs an integer, got `{v}`")))?),
            "ell" => o.ell = Some(f(v)?),
            "a" => o.a = Some(f(v)?),
            "r0" => o.r0 = Some(f(v)?),
            "lambda" => o.lambda = Some(v.to_string()),
            "G" => o.g = Some(f(v)?),
            "sweep" => o.sweep = Some(v.to_string()),
            "format" => {
                o.format = Some(match v {
                    "table" => Format::Table,
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(at(format!("format must be table, csv or json, got `{v}`"))),
                })
            }
            "out" => o.out = Some(PathBuf::from(v)),
            "tol-fd" => o.tol_fd = Some(f(v)?),
            "tol-extrap" => o.tol_extrap = Some(f(v)?),
            "root-tol" => o.root_tol = Some(f(v)?),
            "r" => o.r = Some(f(v)?),
            "cc" => o.cc = Some(f(v)?),
            _ => unreachable!(),
        }
    }
    Ok(o)
}

/// Fields set in `hi` win over `lo`.
fn overlay(hi: Opts, lo: Opts) -> Opts {
    Opts {
        n: hi.n.or(lo.n),
        ell: hi.ell.or(lo.ell),
        a: hi.a.or(lo.a),
        r0: hi.r0.or(lo.r0),
        lambda: hi.lambda.or(lo.lambda),
        g: hi.g.or(lo.g),
        sweep: hi.sweep.or(lo.sweep),
        format: hi.format.or(lo.format),
        out: hi.out.or(lo.out),
        tol_fd: hi.tol_fd.or(lo.tol_fd),
        tol_extrap: hi.tol_extrap.or(lo.tol_extrap),
        root_tol: hi.root_tol.or(lo.root_tol),
        r: hi.r.or(lo.r),
        cc: hi.cc.or(lo.cc),
        config: hi.config,
    }
}

pub fn parse_lambda(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("lambda entry `{}` is not a number", x.trim())))
        .collect()
}

/// Periods for dimension `n`: `n - 2` explicit values, or one value repeated.
pub fn expand_lambda(lambda: &[f64], n: usize) -> Result<Vec<f64>, String> {
    let m = n.saturating_sub(2);
    match lambda.len() {
        1 => Ok(vec![lambda[0]; m]),
        k if k == m => Ok(lambda.to_vec()),
        k => Err(format!("--lambda has {k} entries; n = {n} needs {m} or a single value")),
    }
}

pub fn build_params(n: usize, ell: f64, a: f64, r0: f64, lambda: &[f64], g: f64) -> Result<SolitonParams64, String> {
    let lambdas = expand_lambda(lambda, n)?;
    SolitonParams64::with_periods(n, ell, a, r0, lambdas, g).map_err(|e| e.to_string())
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{name} = {v} must be positive"))
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let file = match &cli.opts.config {
            Some(path) => load_config(path)?,
            None => Opts::default(),
        };
        let o = overlay(cli.opts, file);
        let lambda = match &o.lambda {
            Some(s) => parse_lambda(s)?,
            None => vec![1.0],
        };
        let sweep = o.sweep.as_deref().map(parse_sweep).transpose()?;
        let n = o.n.unwrap_or(3);
        let params = build_params(n, o.ell.unwrap_or(1.0), o.a.unwrap_or(0.0), o.r0.unwrap_or(1.0), &lambda, o.g.unwrap_or(1.0))?;
        let d = Tolerances::default();
        let tolerances = Tolerances {
            tol_fd: positive("tol-fd", o.tol_fd.unwrap_or(d.tol_fd))?,
            tol_extrap: positive("tol-extrap", o.tol_extrap.unwrap_or(d.tol_extrap))?,
            root_tol: positive("root-tol", o.root_tol.unwrap_or(d.root_tol))?,
        };
        if let Some(r) = o.r {
            if !r.is_finite() {
                return Err(format!("r = {r} must be finite"));
            }
        }
        Ok(Self {
            command: cli.command,
            params,
            lambda,
            sweep,
            format: o.format.unwrap_or(Format::Table),
            out: o.out,
            tolerances,
            r: o.r,
            cc: o.cc,
        })
    }

    /// Parameters at one sweep value.
    pub fn params_at(&self, value: f64) -> Result<SolitonParams64, String> {
        let p = &self.params;
        let (mut n, mut ell, mut a, mut r0) = (p.n, p.ell, p.a, p.r0);
        match self.sweep.as_ref().map(|s| s.param) {
            Some(SweepParam::A) => a = value,
            Some(SweepParam::R0) => r0 = value,
            Some(SweepParam::Ell) => ell = value,
            Some(SweepParam::N) => n = value as usize,
            None => {}
        }
        build_params(n, ell, a, r0, &self.lambda, p.g_newton)
    }
}

fn load_config(path: &Path) -> Result<Opts, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse_config_text(&text)
}
