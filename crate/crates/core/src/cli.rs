//! The `qc` command line: argument parsing, config validation, the run loop
//! and the JSON report.
//!
//! Every subcommand produces one report (see `schema/report.schema.json`),
//! printed to stdout or written atomically to `--out`. Exit codes: 0 when all
//! sections pass (CONDITIONAL counts when `--allow-axioms` is on), 1 on FAIL,
//! 2 on usage errors.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::Domain;
use crate::cremona::{
    chow_comparison, cremona_maps, euler_char_check, map_degree, projective_compose_check, pushforward_check, RatMap,
};
use crate::determinantal::{bilinear_residual, random_tensor, DeterminantalPair, Tensor4};
use crate::lattice::{
    boundary_rays, cremona_obstruction_check, disc_action, discriminant_group, isometries_mapping, noether_fano_check,
    pair_quad, projective_obstruction, Certificate, GramMatrix, NoetherFanoCase, Verdict,
};
use crate::verify_fp::{correspondence_check, smooth_check, surface_points, write_points_csv, MAX_ENUMERATION_PRIME};

pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qc", version, about = "Determinantal quartic pairs, their Cremona map, and lattice certificates")]
pub struct Cli {
    /// Write the report to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Count CONDITIONAL certificates as passing.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set)]
    pub allow_axioms: bool,
    /// Progress messages on stderr; repeat for more.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TensorArgs {
    /// Seed for the tensor generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Read the tensor from a JSON file instead of generating it.
    #[arg(long, conflicts_with = "seed")]
    pub tensor: Option<PathBuf>,
    /// `Q` or a prime `p`.
    #[arg(long)]
    pub domain: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GramArgs {
    /// Gram matrix, rows separated by `;` (`4,6;6,4`) or as JSON (`[[4,6],[6,4]]`).
    #[arg(long, allow_hyphen_values = true)]
    pub gram: Option<String>,
    /// Use `[[4, 4l], [4l, 4]]`; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<i64>,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Generate a seeded tensor.
    GenTensor(TensorArgs),
    /// Build M, N, the quartics F1, F2 and the quadrics Q_i.
    Construct(TensorArgs),
    /// Check M(x)·yᵗ = N(y)·xᵗ.
    VerifyIdentity(TensorArgs),
    /// Build τ and σ and check degree, composition and pushforward.
    CremonaVerify {
        #[command(flatten)]
        tensor: TensorArgs,
        /// Rows of M (and N) whose minors define τ (and σ).
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
        rows: Vec<usize>,
    },
    /// Jacobian criterion for F1 and F2 over F_p.
    SmoothCheck {
        #[command(flatten)]
        tensor: TensorArgs,
        #[arg(long = "prime", value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        /// Dump surface points as `s1_p<p>.csv`, `s2_p<p>.csv` into this directory.
        #[arg(long)]
        csv_dir: Option<PathBuf>,
    },
    /// Lattice certificates.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Noether–Fano order and degree bounds.
    NoetherFano {
        #[arg(long = "d")]
        d: u64,
        #[arg(long = "m")]
        m: u64,
        /// `point`, `curve-off-S` or `curve-in-S`.
        #[arg(long, value_parser = parse_case)]
        case: NoetherFanoCase,
        /// Degree of the curve, checked against the bound in the curve-in-S case.
        #[arg(long)]
        deg_f: Option<u64>,
    },
    /// Full pipeline: identity, maps, composition, pushforward, Chow numbers,
    /// smoothness and the F_p bijection.
    Verify {
        #[command(flatten)]
        tensor: TensorArgs,
        #[arg(long = "prime", value_delimiter = ',', default_values_t = [101u64])]
        primes: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
        rows: Vec<usize>,
    },
    /// Validate a report against the report schema.
    ReportValidate { path: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum LatticeCommand {
    /// Discriminant group with its form values.
    Disc(GramArgs),
    /// Boundary rays of the positive cone.
    Rays(GramArgs),
    /// Isometries G with G·u = v and their action on NS*/NS.
    Isometries {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<i64>>,
        /// Entry bound for the search (defaults to the largest Gram entry).
        #[arg(long)]
        bound: Option<i64>,
    },
    /// Divisibility obstruction for `[[4, 4l], [4l, 4]]`.
    Obstruction {
        #[arg(long, value_delimiter = ',', required = true)]
        ell: Vec<i64>,
    },
    /// No automorphism g with g*u = v.
    ProjectiveObstruction {
        #[command(flatten)]
        gram: GramArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<i64>>,
    },
}

fn parse_case(s: &str) -> Result<NoetherFanoCase, String> {
    s.parse().map_err(|e: crate::lattice::LatticeError| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// A validated subcommand.
#[derive(Debug, Clone)]
pub enum Task {
    GenTensor,
    Construct,
    VerifyIdentity,
    CremonaVerify { rows: [usize; 3] },
    SmoothCheck { csv_dir: Option<PathBuf> },
    LatticeDisc,
    LatticeRays,
    LatticeIsometries { u: Vec<i64>, v: Vec<i64>, bound: Option<i64> },
    LatticeObstruction,
    LatticeProjective { u: Vec<i64>, v: Vec<i64> },
    NoetherFano { d: u64, m: u64, case: NoetherFanoCase, deg_f: Option<u64> },
    Verify { rows: [usize; 3] },
    ReportValidate { path: PathBuf, doc: Result<Value, String> },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::GenTensor => "gen-tensor",
            Task::Construct => "construct",
            Task::VerifyIdentity => "verify-identity",
            Task::CremonaVerify { .. } => "cremona-verify",
            Task::SmoothCheck { .. } => "smooth-check",
            Task::LatticeDisc => "lattice disc",
            Task::LatticeRays => "lattice rays",
            Task::LatticeIsometries { .. } => "lattice isometries",
            Task::LatticeObstruction => "lattice obstruction",
            Task::LatticeProjective { .. } => "lattice projective-obstruction",
            Task::NoetherFano { .. } => "noether-fano",
            Task::Verify { .. } => "verify",
            Task::ReportValidate { .. } => "report-validate",
        }
    }
}

/// Everything a run needs, checked before any computation starts.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: Task,
    pub seed: Option<u64>,
    pub domain: Option<Domain>,
    pub tensor: Option<Tensor4>,
    /// Set when the tensor was read from a file.
    pub tensor_from_file: bool,
    pub primes: Vec<u64>,
    pub ells: Vec<i64>,
    pub grams: Vec<GramMatrix>,
    pub output: Option<PathBuf>,
    pub verbosity: u8,
    pub allow_axioms: bool,
}

fn parse_domain(s: &str) -> Result<Domain, UsageError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("q") {
        return Ok(Domain::Rational);
    }
    let digits = t.trim_start_matches(['F', 'f']).trim_start_matches('_');
    let p: u64 = digits.parse().map_err(|_| usage(format!("--domain must be Q or a prime, got {s:?}")))?;
    Domain::prime_field(p).map_err(|e| usage(format!("--domain {s}: {e}")))
}

/// Parses `4,6;6,4` or `[[4,6],[6,4]]`.
pub fn parse_gram(s: &str) -> Result<GramMatrix, UsageError> {
    let rows: Vec<Vec<i64>> = if s.trim_start().starts_with('[') {
        serde_json::from_str(s).map_err(|e| usage(format!("--gram: {e}")))?
    } else {
        s.split(';')
            .map(|r| r.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()
            .map_err(|e| usage(format!("--gram {s:?}: {e}")))?
    };
    GramMatrix::new(rows).map_err(|e| usage(format!("--gram: {e}")))
}

fn check_ell(l: i64) -> Result<(), UsageError> {
    if l < 2 {
        return Err(usage(format!("--ell {l}: must be at least 2")));
    }
    if l > 1 << 20 {
        return Err(usage(format!("--ell {l}: too large")));
    }
    Ok(())
}

fn check_primes(primes: &[u64]) -> Result<(), UsageError> {
    if primes.is_empty() {
        return Err(usage("at least one --prime is required"));
    }
    for &p in primes {
        if !crate::algebra::is_prime(p) {
            return Err(usage(format!("--prime {p}: not prime")));
        }
        if p > MAX_ENUMERATION_PRIME {
            return Err(usage(format!("--prime {p}: enumeration is limited to p <= {MAX_ENUMERATION_PRIME}")));
        }
    }
    Ok(())
}

fn check_threads() -> Result<(), UsageError> {
    match std::env::var("QC_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(()),
            _ => Err(usage(format!("QC_THREADS={s:?}: expected a positive integer"))),
        },
        Err(_) => Ok(()),
    }
}

fn check_rows(rows: &[usize]) -> Result<[usize; 3], UsageError> {
    let r: [usize; 3] = rows.try_into().map_err(|_| usage("--rows takes exactly three indices"))?;
    if r.iter().any(|&i| i > 3) || r[0] == r[1] || r[0] == r[2] || r[1] == r[2] {
        return Err(usage("--rows must be three distinct indices in 0..=3"));
    }
    Ok(r)
}

fn gram_list(g: &GramArgs) -> Result<(Vec<GramMatrix>, Vec<i64>), UsageError> {
    let mut grams = Vec::new();
    if let Some(s) = &g.gram {
        grams.push(parse_gram(s)?);
    }
    for &l in &g.ell {
        check_ell(l)?;
        grams.push(GramMatrix::ell_family(l));
    }
    if grams.is_empty() {
        return Err(usage("give --gram or --ell"));
    }
    Ok((grams, g.ell.clone()))
}

fn basis_pair(grams: &[GramMatrix], u: Option<Vec<i64>>, v: Option<Vec<i64>>) -> Result<(Vec<i64>, Vec<i64>), UsageError> {
    let n = grams[0].rank();
    if grams.iter().any(|g| g.rank() != n) {
        return Err(usage("all Gram matrices must have the same rank when --u/--v are shared"));
    }
    let e = |i: usize| (0..n).map(|j| (i == j) as i64).collect::<Vec<_>>();
    let u = u.unwrap_or_else(|| e(0));
    let v = v.unwrap_or_else(|| e(1.min(n - 1)));
    if u.len() != n || v.len() != n {
        return Err(usage(format!("--u and --v need {n} coordinates")));
    }
    Ok((u, v))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<RunConfig, UsageError> {
        check_threads()?;
        let mut cfg = RunConfig {
            task: Task::GenTensor,
            seed: None,
            domain: None,
            tensor: None,
            tensor_from_file: false,
            primes: Vec::new(),
            ells: Vec::new(),
            grams: Vec::new(),
            output: cli.out,
            verbosity: cli.verbose,
            allow_axioms: cli.allow_axioms,
        };
        if let Some(out) = &cfg.output {
            let dir = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !dir.is_dir() {
                return Err(usage(format!("--out {}: directory {} does not exist", out.display(), dir.display())));
            }
        }
        match cli.command {
            CliCommand::GenTensor(t) => {
                if t.seed.is_none() {
                    return Err(usage("gen-tensor needs --seed"));
                }
                cfg.load_tensor(&t, None)?;
            }
            CliCommand::Construct(t) => {
                cfg.task = Task::Construct;
                cfg.load_tensor(&t, None)?;
            }
            CliCommand::VerifyIdentity(t) => {
                cfg.task = Task::VerifyIdentity;
                cfg.load_tensor(&t, None)?;
            }
            CliCommand::CremonaVerify { tensor, rows } => {
                cfg.task = Task::CremonaVerify { rows: check_rows(&rows)? };
                cfg.load_tensor(&tensor, None)?;
            }
            CliCommand::SmoothCheck { tensor, primes, csv_dir } => {
                check_primes(&primes)?;
                if let Some(d) = &csv_dir {
                    if !d.is_dir() {
                        return Err(usage(format!("--csv-dir {}: not a directory", d.display())));
                    }
                }
                cfg.task = Task::SmoothCheck { csv_dir };
                cfg.load_tensor(&tensor, Some(&primes))?;
                cfg.primes = primes;
            }
            CliCommand::Lattice(lc) => cfg.load_lattice(lc)?,
            CliCommand::NoetherFano { d, m, case, deg_f } => {
                if d == 0 {
                    return Err(usage("--d must be at least 1"));
                }
                if m > d {
                    return Err(usage(format!("--m {m} exceeds --d {d}")));
                }
                cfg.task = Task::NoetherFano { d, m, case, deg_f };
            }
            CliCommand::Verify { tensor, primes, rows } => {
                check_primes(&primes)?;
                cfg.task = Task::Verify { rows: check_rows(&rows)? };
                cfg.load_tensor(&tensor, Some(&primes))?;
                cfg.primes = primes;
            }
            CliCommand::ReportValidate { path } => {
                let text = std::fs::read_to_string(&path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let doc = serde_json::from_str(&text).map_err(|e| e.to_string());
                cfg.task = Task::ReportValidate { path, doc };
            }
        }
        Ok(cfg)
    }

    /// Resolves the tensor. Without `--domain` it lives over `Q`, or over
    /// `F_p` when exactly one prime is requested.
    fn load_tensor(&mut self, t: &TensorArgs, primes: Option<&[u64]>) -> Result<(), UsageError> {
        let explicit = t.domain.as_deref().map(parse_domain).transpose()?;
        let tensor = match (&t.tensor, t.seed) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                let tensor = Tensor4::from_json(&v).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                self.tensor_from_file = true;
                match explicit {
                    Some(d) if d != tensor.domain() => {
                        tensor.to_domain(d).map_err(|e| usage(format!("--domain {d}: {e}")))?
                    }
                    _ => tensor,
                }
            }
            (None, Some(seed)) => {
                let domain = match (explicit, primes) {
                    (Some(d), _) => d,
                    (None, Some([p])) => Domain::PrimeField(*p),
                    (None, _) => Domain::Rational,
                };
                self.seed = Some(seed);
                random_tensor(seed, domain)
            }
            (None, None) => return Err(usage("give --seed or --tensor")),
        };
        if let (Domain::PrimeField(q), Some(ps)) = (tensor.domain(), primes) {
            if let Some(p) = ps.iter().find(|&&p| p != q) {
                return Err(usage(format!("tensor lives over F_{q} but --prime {p} was requested; use --domain Q")));
            }
        }
        self.domain = Some(tensor.domain());
        self.tensor = Some(tensor);
        Ok(())
    }

    fn load_lattice(&mut self, lc: LatticeCommand) -> Result<(), UsageError> {
        match lc {
            LatticeCommand::Disc(g) => {
                (self.grams, self.ells) = gram_list(&g)?;
                self.task = Task::LatticeDisc;
            }
            LatticeCommand::Rays(g) => {
                (self.grams, self.ells) = gram_list(&g)?;
                if let Some(g) = self.grams.iter().find(|g| g.rank() != 2) {
                    return Err(usage(format!("rays need a rank-2 lattice, got rank {}", g.rank())));
                }
                self.task = Task::LatticeRays;
            }
            LatticeCommand::Isometries { gram, u, v, bound } => {
                (self.grams, self.ells) = gram_list(&gram)?;
                let (u, v) = basis_pair(&self.grams, u, v)?;
                if bound.is_some_and(|b| !(1..=64).contains(&b)) {
                    return Err(usage("--bound must lie in 1..=64"));
                }
                self.task = Task::LatticeIsometries { u, v, bound };
            }
            LatticeCommand::Obstruction { ell } => {
                for &l in &ell {
                    check_ell(l)?;
                }
                self.grams = ell.iter().map(|&l| GramMatrix::ell_family(l)).collect();
                self.ells = ell;
                self.task = Task::LatticeObstruction;
            }
            LatticeCommand::ProjectiveObstruction { gram, u, v } => {
                (self.grams, self.ells) = gram_list(&gram)?;
                let (u, v) = basis_pair(&self.grams, u, v)?;
                self.task = Task::LatticeProjective { u, v };
            }
        }
        Ok(())
    }

    /// The part of the configuration that determines the report.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        if let Some(s) = self.seed {
            m.insert("seed".into(), json!(s));
        }
        if let Some(d) = self.domain {
            m.insert("domain".into(), json!(d.to_string()));
        }
        if self.tensor_from_file {
            m.insert("tensor".into(), self.tensor.as_ref().expect("loaded").to_json());
        }
        if !self.primes.is_empty() {
            m.insert("primes".into(), json!(self.primes));
        }
        if !self.ells.is_empty() {
            m.insert("ells".into(), json!(self.ells));
        }
        if !self.grams.is_empty() {
            m.insert("grams".into(), json!(self.grams.iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>()));
        }
        m.insert("allow_axioms".into(), json!(self.allow_axioms));
        match &self.task {
            Task::CremonaVerify { rows } | Task::Verify { rows } => {
                m.insert("rows".into(), json!(rows));
            }
            Task::LatticeIsometries { u, v, bound } => {
                m.insert("u".into(), json!(u));
                m.insert("v".into(), json!(v));
                if let Some(b) = bound {
                    m.insert("bound".into(), json!(b));
                }
            }
            Task::LatticeProjective { u, v } => {
                m.insert("u".into(), json!(u));
                m.insert("v".into(), json!(v));
            }
            Task::NoetherFano { d, m: mult, case, deg_f } => {
                m.insert("d".into(), json!(d));
                m.insert("m".into(), json!(mult));
                m.insert("case".into(), json!(case));
                if let Some(f) = deg_f {
                    m.insert("deg_f".into(), json!(f));
                }
            }
            Task::ReportValidate { path, .. } => {
                m.insert("path".into(), json!(path.display().to_string()));
            }
            _ => {}
        }
        Value::Object(m)
    }
}

/// A report section: `{"name", "verdict", "witnesses", ...}`.
fn section(name: &str, verdict: Verdict, witnesses: Vec<Value>, body: Value) -> Value {
    let mut m = match body {
        Value::Object(m) => m,
        Value::Null => Map::new(),
        other => Map::from_iter([("value".to_string(), other)]),
    };
    m.insert("name".into(), json!(name));
    m.insert("verdict".into(), json!(verdict));
    m.insert("witnesses".into(), Value::Array(witnesses));
    Value::Object(m)
}

fn pass_fail(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn error_section(name: &str, err: impl Display) -> Value {
    section(name, Verdict::Fail, vec![json!({ "error": err.to_string() })], Value::Null)
}

fn cert_section(name: &str, cert: &Certificate) -> Value {
    let mut v = cert.to_json();
    v["name"] = json!(name);
    v
}

fn verdict_of(section: &Value) -> Verdict {
    match section["verdict"].as_str() {
        Some("PASS") => Verdict::Pass,
        Some("CONDITIONAL") => Verdict::Conditional,
        _ => Verdict::Fail,
    }
}

/// A finished run: the report without its timestamp, and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub config: Value,
    pub sections: Vec<Value>,
    pub verdict: Verdict,
    pub exit_code: i32,
}

impl Outcome {
    /// The report document with the given timestamp.
    pub fn report(&self, timestamp: &str) -> Value {
        let mut witnesses = Vec::new();
        let mut axioms: Vec<String> = Vec::new();
        for s in &self.sections {
            let name = s["name"].as_str().unwrap_or_default();
            for w in s["witnesses"].as_array().into_iter().flatten() {
                witnesses.push(json!({ "section": name, "witness": w }));
            }
            for a in s["axioms"].as_array().into_iter().flatten().filter_map(Value::as_str) {
                if !axioms.iter().any(|x| x == a) {
                    axioms.push(a.to_string());
                }
            }
        }
        json!({
            "tool": "qc",
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp": timestamp,
            "command": self.command,
            "config": self.config,
            "verdict": self.verdict,
            "sections": self.sections,
            "witnesses": witnesses,
            "axioms": axioms,
        })
    }
}

struct Log(u8);

impl Log {
    fn info(&self, msg: impl FnOnce() -> String) {
        if self.0 > 0 {
            eprintln!("qc: {}", msg());
        }
    }
}

/// Runs a validated configuration.
pub fn run(cfg: &RunConfig) -> Outcome {
    let log = Log(cfg.verbosity);
    let sections = match &cfg.task {
        Task::GenTensor => vec![tensor_section(cfg)],
        Task::Construct => construct_sections(cfg),
        Task::VerifyIdentity => vec![identity_section(&DeterminantalPair::new(tensor(cfg)))],
        Task::CremonaVerify { rows } => {
            let pair = DeterminantalPair::new(tensor(cfg));
            let mut s = vec![construction_summary(&pair)];
            if !pair.degenerate {
                s.extend(cremona_sections(&pair, *rows, cfg.seed.unwrap_or(0), &log));
            }
            s.push(chow_section());
            s
        }
        Task::SmoothCheck { csv_dir } => vec![smooth_check_section(cfg, csv_dir.as_deref(), &log)],
        Task::LatticeDisc => cfg.grams.iter().map(disc_section).collect(),
        Task::LatticeRays => cfg.grams.iter().map(rays_section).collect(),
        Task::LatticeIsometries { u, v, bound } => cfg.grams.iter().map(|g| isometries_section(g, u, v, *bound)).collect(),
        Task::LatticeObstruction => cfg
            .ells
            .iter()
            .map(|&l| match cremona_obstruction_check(l) {
                Ok(c) => cert_section("obstruction", &c),
                Err(e) => error_section("obstruction", e),
            })
            .collect(),
        Task::LatticeProjective { u, v } => cfg
            .grams
            .iter()
            .map(|g| match projective_obstruction(g, u, v) {
                Ok(c) => cert_section("projective-obstruction", &c),
                Err(e) => error_section("projective-obstruction", e),
            })
            .collect(),
        Task::NoetherFano { d, m, case, deg_f } => vec![match noether_fano_check(*d, *m, *case, *deg_f) {
            Ok(c) => cert_section("noether-fano", &c),
            Err(e) => error_section("noether-fano", e),
        }],
        Task::Verify { rows } => verify_sections(cfg, *rows, &log),
        Task::ReportValidate { doc, .. } => vec![match doc {
            Ok(doc) => {
                let errors = schema_errors(doc);
                section("schema", pass_fail(errors.is_empty()), errors, Value::Null)
            }
            Err(e) => error_section("schema", format!("not JSON: {e}")),
        }],
    };
    let verdicts: Vec<Verdict> = sections.iter().map(verdict_of).collect();
    let verdict = if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if verdicts.contains(&Verdict::Conditional) {
        Verdict::Conditional
    } else {
        Verdict::Pass
    };
    let exit_code = match verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Conditional if cfg.allow_axioms => EXIT_PASS,
        _ => EXIT_FAIL,
    };
    Outcome { command: cfg.task.name(), config: cfg.to_json(), sections, verdict, exit_code }
}

fn tensor(cfg: &RunConfig) -> &Tensor4 {
    cfg.tensor.as_ref().expect("validated config carries a tensor")
}

fn tensor_section(cfg: &RunConfig) -> Value {
    section("tensor", Verdict::Pass, vec![], json!({ "tensor": tensor(cfg).to_json() }))
}

fn construction_summary(pair: &DeterminantalPair) -> Value {
    let mut witnesses = Vec::new();
    if let Err(e) = pair.require_nondegenerate() {
        witnesses.push(json!({ "degenerate": e.to_string() }));
    }
    section(
        "construction",
        pass_fail(witnesses.is_empty()),
        witnesses,
        json!({
            "F1": pair.f1.to_string(),
            "F2": pair.f2.to_string(),
            "degenerate": pair.degenerate,
        }),
    )
}

fn construct_sections(cfg: &RunConfig) -> Vec<Value> {
    let pair = DeterminantalPair::new(tensor(cfg));
    let show = |m: &crate::PolyMatrix| -> Vec<Vec<String>> {
        (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
    };
    let mut s = construction_summary(&pair);
    s["M"] = json!(show(&pair.m));
    s["N"] = json!(show(&pair.n));
    s["quadrics"] = json!(pair.q.iter().map(|q| q.to_string()).collect::<Vec<_>>());
    s["bidegrees"] = json!(pair.q.iter().map(|q| q.bidegree()).collect::<Vec<_>>());
    vec![tensor_section(cfg), s]
}

fn identity_section(pair: &DeterminantalPair) -> Value {
    match bilinear_residual(&pair.m, &pair.n) {
        Ok(res) => {
            let witnesses: Vec<Value> = res
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.is_zero())
                .map(|(i, r)| json!({ "row": i, "residual": r.to_string() }))
                .collect();
            section(
                "identity",
                pass_fail(witnesses.is_empty()),
                witnesses,
                json!({ "claim": "M(x)·yᵗ - N(y)·xᵗ = 0", "exact": true }),
            )
        }
        Err(e) => error_section("identity", e),
    }
}

fn map_json(m: &RatMap) -> Value {
    let mut v = m.to_json();
    if let Ok(d) = map_degree(m) {
        v["reduced_degree"] = json!(d);
    }
    v
}

/// `maps`, `compose` and `pushforward` sections for a nondegenerate pair.
fn cremona_sections(pair: &DeterminantalPair, rows: [usize; 3], seed: u64, log: &Log) -> Vec<Value> {
    log.info(|| format!("building τ, σ from rows {rows:?}"));
    let (tau, sigma) = match cremona_maps(pair, rows) {
        Ok(m) => m,
        Err(e) => return vec![error_section("maps", e)],
    };
    let mut out = Vec::new();

    let degrees = [("τ", map_degree(&tau)), ("σ", map_degree(&sigma))];
    let mut witnesses = Vec::new();
    for (name, d) in &degrees {
        match d {
            Ok(3) => {}
            Ok(d) => witnesses.push(json!({ "map": name, "degree": d })),
            Err(e) => witnesses.push(json!({ "map": name, "error": e.to_string() })),
        }
    }
    out.push(section(
        "maps",
        pass_fail(witnesses.is_empty()),
        witnesses,
        json!({ "rows": rows, "tau": map_json(&tau), "sigma": map_json(&sigma) }),
    ));

    log.info(|| "composing σ∘τ and τ∘σ".into());
    let mut body = Map::new();
    let mut witnesses = Vec::new();
    for (key, outer, inner) in [("sigma_after_tau", &sigma, &tau), ("tau_after_sigma", &tau, &sigma)] {
        match projective_compose_check(outer, inner) {
            Ok(c) => {
                let deg = c.factor.as_ref().and_then(|f| f.homogeneous_degree());
                if !c.holds {
                    witnesses.push(json!({ "composition": key, "composite": c.composite.iter().map(|p| p.to_string()).collect::<Vec<_>>() }));
                }
                body.insert(key.into(), json!({ "identity": c.holds, "factor_degree": deg }));
            }
            Err(e) => witnesses.push(json!({ "composition": key, "error": e.to_string() })),
        }
    }
    out.push(section("compose", pass_fail(witnesses.is_empty()), witnesses, Value::Object(body)));

    log.info(|| "dividing F2∘τ by F1 and F1∘σ by F2".into());
    let mut body = Map::new();
    let mut witnesses = Vec::new();
    for (key, f, g, m) in [("F1 | F2∘τ", &pair.f1, &pair.f2, &tau), ("F2 | F1∘σ", &pair.f2, &pair.f1, &sigma)] {
        match pushforward_check(f, g, m, seed) {
            Ok(c) => {
                let evidence = c.evidence.as_ref().map(|e| {
                    json!({
                        "field": e.field,
                        "samples": e.samples,
                        "agreed": e.agreed,
                        "failure_bound": crate::lattice::rational_json(&e.failure_bound),
                    })
                });
                if !c.holds {
                    witnesses.push(json!({ "division": key, "pulled_back_terms": c.pulled_back.num_terms() }));
                }
                body.insert(key.into(), json!({ "divides": c.holds, "quotient_degree": c.quotient_degree(), "evidence": evidence }));
            }
            Err(e) => witnesses.push(json!({ "division": key, "error": e.to_string() })),
        }
    }
    out.push(section("pushforward", pass_fail(witnesses.is_empty()), witnesses, Value::Object(body)));
    out
}

fn chow_section() -> Value {
    let c = chow_comparison();
    let mut body = serde_json::to_value(&c).expect("serializes");
    body["euler_characteristic"] = json!((0..=5).map(|n| json!({ "n": n, "chi": euler_char_check(n) })).collect::<Vec<_>>());
    if !c.matches_literature {
        body["discrepancy"] = json!(format!(
            "computed H1^3(H1+H2)^3 = {}, H1^2H2(H1+H2)^3 = {}; literature states {} and {}",
            c.h1_cubed, c.h1_squared_h2, c.literature_values.0, c.literature_values.1
        ));
    }
    let witnesses = if c.differ { vec![] } else { vec![json!({ "equal_values": c.h1_cubed })] };
    section("chow", pass_fail(c.differ), witnesses, body)
}

fn reduced_tensor(cfg: &RunConfig, p: u64) -> Result<Tensor4, String> {
    tensor(cfg).to_domain(Domain::PrimeField(p)).map_err(|e| e.to_string())
}

fn smoothness_interpretation(cfg: &RunConfig) -> &'static str {
    match cfg.domain {
        Some(Domain::Rational) => "no singular F_p-point of the reduction: evidence, not proof, of smoothness over Q",
        _ => "no singular F_p-point: evidence, not proof, of smoothness over the algebraic closure",
    }
}

fn first_points<T: serde::Serialize>(v: &[T]) -> Vec<Value> {
    v.iter().take(crate::verify_fp::JSON_LIST_LIMIT).map(|x| serde_json::to_value(x).expect("serializes")).collect()
}

fn smooth_check_section(cfg: &RunConfig, csv_dir: Option<&Path>, log: &Log) -> Value {
    let mut per_prime = Vec::new();
    let mut witnesses = Vec::new();
    for &p in &cfg.primes {
        log.info(|| format!("enumerating P^3(F_{p})"));
        let t = match reduced_tensor(cfg, p) {
            Ok(t) => t,
            Err(e) => return error_section("smoothness", e),
        };
        let pair = DeterminantalPair::new(&t);
        let mut entry = Map::new();
        entry.insert("prime".into(), json!(p));
        for (label, f) in [("s1", &pair.f1), ("s2", &pair.f2)] {
            match smooth_check(f, p) {
                Ok(r) => {
                    for pt in first_points(&r.singular_points) {
                        witnesses.push(json!({ "prime": p, "surface": label, "singular_point": pt }));
                    }
                    entry.insert(
                        label.into(),
                        json!({ "points": r.points_on_surface, "singular": r.singular_points.len(), "smooth": r.is_smooth() }),
                    );
                }
                Err(e) => witnesses.push(json!({ "prime": p, "surface": label, "error": e.to_string() })),
            }
            if let Some(dir) = csv_dir {
                if let Err(e) = dump_csv(&dir.join(format!("{label}_p{p}.csv")), f, p) {
                    witnesses.push(json!({ "prime": p, "surface": label, "error": e }));
                }
            }
        }
        per_prime.push(Value::Object(entry));
    }
    section(
        "smoothness",
        pass_fail(witnesses.is_empty()),
        witnesses,
        json!({ "primes": per_prime, "interpretation": smoothness_interpretation(cfg) }),
    )
}

fn dump_csv(path: &Path, f: &crate::MPoly, p: u64) -> Result<(), String> {
    let pts = surface_points(f, p).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_points_csv(&mut buf, &pts).map_err(|e| e.to_string())?;
    write_atomic(path, &buf).map_err(|e| e.to_string())
}

fn verify_sections(cfg: &RunConfig, rows: [usize; 3], log: &Log) -> Vec<Value> {
    let t = tensor(cfg);
    let pair = DeterminantalPair::new(t);
    let mut out = vec![identity_section(&pair), construction_summary(&pair)];
    if pair.degenerate {
        return out;
    }
    out.extend(cremona_sections(&pair, rows, cfg.seed.unwrap_or(0), log));
    out.push(chow_section());

    let mut smooth = Vec::new();
    let mut smooth_w = Vec::new();
    let mut bij = Vec::new();
    let mut bij_w = Vec::new();
    for &p in &cfg.primes {
        log.info(|| format!("enumerating P^3(F_{p}) for both surfaces"));
        let cert = match reduced_tensor(cfg, p).and_then(|t| correspondence_check(&t, p).map_err(|e| e.to_string())) {
            Ok(c) => c,
            Err(e) => {
                smooth_w.push(json!({ "prime": p, "error": e.clone() }));
                bij_w.push(json!({ "prime": p, "error": e }));
                continue;
            }
        };
        for (label, pts) in [("s1", &cert.singular_s1), ("s2", &cert.singular_s2)] {
            for pt in first_points(pts) {
                smooth_w.push(json!({ "prime": p, "surface": label, "singular_point": pt }));
            }
        }
        smooth.push(json!({
            "prime": p,
            "s1": { "points": cert.counts.0, "singular": cert.singular_s1.len(), "smooth": cert.singular_s1.is_empty() },
            "s2": { "points": cert.counts.1, "singular": cert.singular_s2.len(), "smooth": cert.singular_s2.is_empty() },
        }));
        let mut body = cert.to_json();
        if let Value::Object(m) = &mut body {
            m.remove("singular_s1");
            m.remove("singular_s2");
            m.remove("verdict");
        }
        let bij_ok = cert.bijection
            && cert.counts.0 == cert.counts.1
            && cert.rank_violations_s1.is_empty()
            && cert.rank_violations_s2.is_empty()
            && cert.fiber_violations.is_empty();
        if !bij_ok {
            let before = bij_w.len();
            for v in first_points(&cert.rank_violations_s1) {
                bij_w.push(json!({ "prime": p, "rank_violation_s1": v }));
            }
            for v in first_points(&cert.rank_violations_s2) {
                bij_w.push(json!({ "prime": p, "rank_violation_s2": v }));
            }
            for v in first_points(&cert.fiber_violations) {
                bij_w.push(json!({ "prime": p, "fiber_violation": v }));
            }
            if bij_w.len() == before {
                bij_w.push(json!({ "prime": p, "counts": [cert.counts.0, cert.counts.1], "bijection": cert.bijection }));
            }
        }
        bij.push(body);
    }
    out.push(section(
        "smoothness",
        pass_fail(smooth_w.is_empty()),
        smooth_w,
        json!({ "primes": smooth, "interpretation": smoothness_interpretation(cfg) }),
    ));
    out.push(section("bijection", pass_fail(bij_w.is_empty()), bij_w, json!({ "primes": bij })));
    out
}

fn disc_section(g: &GramMatrix) -> Value {
    match discriminant_group(g) {
        Ok(group) => {
            let mut body = serde_json::to_value(&group).expect("serializes");
            body["gram"] = json!(g);
            body["order"] = json!(group.order());
            section("disc", Verdict::Pass, vec![], body)
        }
        Err(e) => error_section("disc", e),
    }
}

fn rays_section(g: &GramMatrix) -> Value {
    match boundary_rays(g) {
        Ok(rays) => {
            let norms: Vec<bool> = rays.iter().map(|r| pair_quad(g, r, r).is_zero()).collect();
            let show = |r: &[crate::lattice::QuadIrr; 2]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>();
            let approx = |r: &[crate::lattice::QuadIrr; 2]| r.iter().map(|x| x.approx()).collect::<Vec<_>>();
            let witnesses: Vec<Value> =
                (0..2).filter(|&i| !norms[i]).map(|i| json!({ "ray": i + 1, "nonzero_norm": show(&rays[i]) })).collect();
            section(
                "rays",
                pass_fail(witnesses.is_empty()),
                witnesses,
                json!({
                    "gram": g,
                    "v1": show(&rays[0]),
                    "v2": show(&rays[1]),
                    "v1_approx": approx(&rays[0]),
                    "v2_approx": approx(&rays[1]),
                    "pairing": pair_quad(g, &rays[0], &rays[1]).to_string(),
                }),
            )
        }
        Err(e) => error_section("rays", e),
    }
}

fn isometries_section(g: &GramMatrix, u: &[i64], v: &[i64], bound: Option<i64>) -> Value {
    let group = match discriminant_group(g) {
        Ok(group) => group,
        Err(e) => return error_section("isometries", e),
    };
    let bound = bound.unwrap_or_else(|| g.max_abs_entry().max(1));
    let mut list = Vec::new();
    for m in isometries_mapping(g, u, v, bound) {
        let action = match disc_action(&group, &m) {
            Ok(a) => serde_json::to_value(&a).expect("serializes"),
            Err(e) => return error_section("isometries", e),
        };
        list.push(json!({
            "matrix": m,
            "det": m.det(),
            "finite_order": m.finite_order(),
            "disc_action": action,
        }));
    }
    section("isometries", Verdict::Pass, vec![], json!({ "gram": g, "u": u, "v": v, "bound": bound, "isometries": list }))
}

fn compiled_schema() -> &'static jsonschema::JSONSchema {
    static SCHEMA: OnceLock<jsonschema::JSONSchema> = OnceLock::new();
    SCHEMA.get_or_init(|| {
        let v: Value = serde_json::from_str(REPORT_SCHEMA).expect("schema is JSON");
        jsonschema::JSONSchema::options()
            .with_draft(jsonschema::Draft::Draft7)
            .compile(&v)
            .expect("schema compiles")
    })
}

/// True iff `doc` conforms to the report schema.
pub fn report_schema_validate(doc: &Value) -> bool {
    compiled_schema().is_valid(doc)
}

/// Schema violations as `{"path", "message"}` objects.
pub fn schema_errors(doc: &Value) -> Vec<Value> {
    match compiled_schema().validate(doc) {
        Ok(()) => vec![],
        Err(errs) => errs.map(|e| json!({ "path": e.instance_path.to_string(), "message": e.to_string() })).collect(),
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn usage_exit(e: &UsageError) -> i32 {
    eprintln!("{}", json!({ "error": "usage", "message": e.0 }));
    EXIT_USAGE
}

/// Parses arguments, runs, writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => return usage_exit(&e),
    };
    let outcome = run(&cfg);
    let report = outcome.report(&timestamp());
    let mut text = serde_json::to_string_pretty(&report).expect("serializes");
    text.push('\n');
    match &cfg.output {
        Some(path) => {
            if let Err(e) = write_atomic(path, text.as_bytes()) {
                return usage_exit(&usage(format!("--out {}: {e}", path.display())));
            }
            if cfg.verbosity > 0 {
                eprintln!("qc: {} -> {}", outcome.verdict, path.display());
            }
        }
        None => print!("{text}"),
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> Result<RunConfig, UsageError> {
        let mut v = vec!["qc"];
        v.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(v).expect("parses"))
    }

    #[test]
    fn gram_parsing() {
        assert_eq!(parse_gram("4,6;6,4").unwrap(), GramMatrix::binary(4, 6, 4));
        assert_eq!(parse_gram("[[4,6],[6,4]]").unwrap(), GramMatrix::binary(4, 6, 4));
        assert!(parse_gram("4,6;5,4").is_err());
        assert!(parse_gram("4,x").is_err());
    }

    #[test]
    fn domain_parsing() {
        assert_eq!(parse_domain("Q").unwrap(), Domain::Rational);
        assert_eq!(parse_domain("101").unwrap(), Domain::PrimeField(101));
        assert_eq!(parse_domain("F_7").unwrap(), Domain::PrimeField(7));
        assert!(parse_domain("100").is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        assert!(cfg(&["verify", "--seed", "1", "--prime", "100"]).is_err());
        assert!(cfg(&["verify", "--seed", "1", "--prime", "8191"]).is_err());
        assert!(cfg(&["verify", "--prime", "11"]).is_err());
        assert_eq!(cfg(&["verify", "--seed", "1", "--prime", "7,11"]).unwrap().domain, Some(Domain::Rational));
        assert!(cfg(&["verify", "--seed", "1", "--prime", "11", "--domain", "7"]).is_err());
        assert!(cfg(&["verify", "--seed", "1", "--prime", "7,11", "--domain", "Q"]).is_ok());
        assert!(cfg(&["cremona-verify", "--seed", "1", "--rows", "0,0,1"]).is_err());
        assert!(cfg(&["lattice", "obstruction", "--ell", "1"]).is_err());
        assert!(cfg(&["lattice", "disc"]).is_err());
        assert!(cfg(&["noether-fano", "--d", "3", "--m", "4", "--case", "point"]).is_err());
    }

    #[test]
    fn obstruction_exit_codes() {
        let o = run(&cfg(&["lattice", "obstruction", "--ell", "5"]).unwrap());
        assert_eq!((o.verdict, o.exit_code), (Verdict::Pass, EXIT_PASS));
        let o = run(&cfg(&["lattice", "obstruction", "--ell", "2"]).unwrap());
        assert_eq!((o.verdict, o.exit_code), (Verdict::Fail, EXIT_FAIL));
        let r = o.report("t");
        assert_eq!(r["witnesses"][0]["witness"]["s"], 12);
        assert_eq!(r["witnesses"][0]["witness"]["e"], 24);
        assert!(report_schema_validate(&r));
    }

    #[test]
    fn conditional_needs_allow_axioms() {
        let o = run(&cfg(&["lattice", "projective-obstruction", "--ell", "5"]).unwrap());
        assert_eq!((o.verdict, o.exit_code), (Verdict::Conditional, EXIT_PASS));
        let o = run(&cfg(&["--allow-axioms", "false", "lattice", "projective-obstruction", "--ell", "5"]).unwrap());
        assert_eq!((o.verdict, o.exit_code), (Verdict::Conditional, EXIT_FAIL));
        assert_eq!(o.report("t")["axioms"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn missing_verdict_is_invalid() {
        let o = run(&cfg(&["noether-fano", "--d", "10", "--m", "3", "--case", "curve-in-S"]).unwrap());
        let mut r = o.report("t");
        assert!(report_schema_validate(&r), "{:?}", schema_errors(&r));
        r.as_object_mut().unwrap().remove("verdict");
        assert!(!report_schema_validate(&r));
        assert!(!schema_errors(&r).is_empty());
    }

    #[test]
    fn fail_without_witness_is_invalid() {
        let o = run(&cfg(&["lattice", "obstruction", "--ell", "3"]).unwrap());
        let mut r = o.report("t");
        assert!(report_schema_validate(&r));
        r["witnesses"] = json!([]);
        assert!(!report_schema_validate(&r));
    }
}
