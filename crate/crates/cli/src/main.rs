//! `cmq`: build the integrals of the deformed elliptic Calogero–Moser system
//! and verify their commutativity by exact evaluation.
//!
//! Exit codes: 0 when every report passes, 1 when any report fails, 2 on a
//! usage or input error.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cmq::cmbuild::{Builder, IndexSet};
use cmq::json::to_json;
use cmq::ring::{fmt_rational, int, parse_rational};
use cmq::series::gamma_table;
use cmq::verify::identities::{check_identity, min_n};
use cmq::verify::lemma3::{laurent_w, laurent_y, sample_params, LaurentParams};
use cmq::verify::{default_m_values, BackendKind, Report, VerifyConfig};
use cmq::{Rational, Ring};
use serde::Serialize;

use config::{FileConfig, Flags, RunConfig, ORDER_ENV};

#[derive(Parser, Debug)]
#[command(name = "cmq", version, about = "Exact integrals of the deformed elliptic Calogero-Moser system")]
struct Cli {
    /// TOML file with defaults for the run flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Number of particles
    #[arg(long)]
    n: Option<usize>,
    /// Mass parameter as "p/q"; verify accepts a comma-separated list
    #[arg(long, allow_hyphen_values = true)]
    m: Option<String>,
    /// rational, trig or elliptic
    #[arg(long)]
    backend: Option<String>,
    /// Random assignments per m value (parameter samples for lemma3)
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Laurent truncation order
    #[arg(long)]
    order: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    g2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g3: Option<String>,
    /// Also write the output to this file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Machine-readable output where it is optional
    #[arg(long)]
    json: bool,
}

impl From<Common> for Flags {
    fn from(c: Common) -> Self {
        Flags {
            n: c.n,
            m: c.m,
            backend: c.backend,
            trials: c.trials,
            seed: c.seed,
            order: c.order,
            g2: c.g2,
            g3: c.g3,
            out: c.out,
            json: c.json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print γ₂ … γ₂ₖ for the given invariants
    Gamma {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Dump an operator as canonical JSON
    Build {
        object: Object,
        /// Order of D, or tower index of L
        #[arg(long)]
        k: Option<usize>,
        /// Index subset such as "1,3,4"; defaults to the full set
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite and print one JSON report per identity
    Verify {
        suite: Suite,
        /// Restrict lemma3 to Y_k and W_k
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Shorthand for `verify tower`
    Tower {
        #[command(flatten)]
        common: Common,
    },
    /// Shorthand for `verify lemma3`
    Lemma3 {
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Object {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "theta", alias = "Theta")]
    Theta,
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "H", alias = "h")]
    H,
    #[value(name = "I", alias = "i")]
    I,
    #[value(name = "L", alias = "l")]
    L,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Integral,
    Tower,
    Lemmas,
    Lemma3,
    All,
    /// `[I,H] + ℘₁₂`, which must fail
    Control,
}

/// Input problems; like every other error they exit with code 2.
fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(msg.into())
}

fn resolve(config: &Option<PathBuf>, common: Common) -> Result<RunConfig> {
    let file = match config {
        Some(p) => Some(FileConfig::load(p).map_err(|e| usage(format!("{e:#}")))?),
        None => None,
    };
    RunConfig::resolve(common.into(), file, std::env::var(ORDER_ENV).ok()).map_err(|e| usage(format!("{e:#}")))
}

fn rational_arg(name: &str, v: &Option<String>, default: Rational) -> Result<Rational> {
    match v {
        Some(s) => parse_rational(s).map_err(|_| usage(format!("--{name}: {s:?} is not a rational literal"))),
        None => Ok(default),
    }
}

fn m_list(cfg: &RunConfig) -> Result<Vec<Rational>> {
    match &cfg.m {
        Some(s) => s
            .split(',')
            .map(|t| parse_rational(t).map_err(|_| usage(format!("--m: {t:?} is not a rational literal"))))
            .collect(),
        None => Ok(default_m_values()),
    }
}

fn backend(cfg: &RunConfig) -> Result<BackendKind> {
    BackendKind::from_str(&cfg.backend).map_err(|_| usage(format!("unknown backend {:?}", cfg.backend)))
}

/// Writes to stdout and, when requested, to the output file.
struct Sink {
    file: Option<fs::File>,
}

impl Sink {
    fn new(out: &Option<PathBuf>) -> Result<Self> {
        let file = match out {
            Some(p) => Some(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => None,
        };
        Ok(Sink { file })
    }

    fn line(&mut self, s: &str) -> Result<()> {
        println!("{s}");
        if let Some(f) = &mut self.file {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GammaDoc {
    g2: String,
    g3: String,
    gamma: Vec<String>,
}

fn cmd_gamma(k: usize, cfg: &RunConfig) -> Result<bool> {
    if k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let g2 = rational_arg("g2", &cfg.g2, int(0))?;
    let g3 = rational_arg("g3", &cfg.g3, int(0))?;
    let table = gamma_table(k, &g2, &g3)?;
    let mut sink = Sink::new(&cfg.out)?;
    if cfg.json {
        let doc = GammaDoc {
            g2: fmt_rational(&g2),
            g3: fmt_rational(&g3),
            gamma: table.values().iter().map(fmt_rational).collect(),
        };
        sink.line(&serde_json::to_string(&doc)?)?;
    } else {
        for (i, v) in table.values().iter().enumerate() {
            sink.line(&format!("gamma_{} = {}", 2 * (i + 1), fmt_rational(v)))?;
        }
    }
    Ok(true)
}

fn parse_set(s: &str, n: usize) -> Result<IndexSet> {
    let mut idx = Vec::new();
    for t in s.split(',') {
        let k: usize = t.trim().parse().map_err(|_| usage(format!("--set: {t:?} is not an index")))?;
        if k == 0 || k > n {
            return Err(usage(format!("--set: index {k} outside 1..{n}")));
        }
        idx.push(k);
    }
    Ok(IndexSet::from_indices(idx))
}

fn cmd_build(object: Object, k: Option<usize>, set: Option<String>, cfg: &RunConfig) -> Result<bool> {
    let n = cfg.n;
    if n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let m = rational_arg("m", &cfg.m, int(2))?;
    let g2 = rational_arg("g2", &cfg.g2, int(0))?;
    let g3 = rational_arg("g3", &cfg.g3, int(0))?;
    let ring = Ring::new(n, g2.clone(), g3.clone());
    let set = match &set {
        Some(s) => parse_set(s, n)?,
        None => IndexSet::full(n),
    };
    let need_k = || k.ok_or_else(|| usage(format!("{object:?} needs --k")));
    let op = match object {
        Object::D => {
            let k = need_k()?;
            // the constants of D^k need a table reaching k
            let gamma = gamma_table(k.max(2), &g2, &g3)?;
            let table = cmq::cmbuild::ConstantTable::new(&m, &gamma, k.max(2))?;
            Builder::with_table(&ring, table).d(k)?
        }
        Object::Theta => Builder::new(&ring, &m)?.theta(set)?,
        Object::X => Builder::new(&ring, &m)?.x_set(set)?,
        Object::H => Builder::new(&ring, &m)?.h_set(set)?,
        Object::I => Builder::new(&ring, &m)?.i_set(set)?,
        Object::L => {
            let k = need_k()?;
            if k >= n {
                return Err(usage(format!("L_k exists for k < n = {n}")));
            }
            Builder::new(&ring, &m)?.tower()?.swap_remove(k)
        }
    };
    Sink::new(&cfg.out)?.line(&to_json(&op, &m))?;
    Ok(true)
}

fn lemma_names(n: usize) -> Vec<&'static str> {
    ["lemma2", "lemma4", "lemma5", "lemma6", "theta3", "theta_derivative", "addition", "htheta"]
        .into_iter()
        .filter(|name| min_n(name).is_ok_and(|lo| lo <= n))
        .collect()
}

fn laurent_samples(cfg: &RunConfig) -> Result<Vec<LaurentParams>> {
    let mut samples = sample_params(cfg.trials.max(1), cfg.seed);
    if let Some(ms) = cfg.m.as_ref().map(|_| m_list(cfg)).transpose()? {
        let base = sample_params(ms.len(), cfg.seed);
        samples = ms.into_iter().zip(base).map(|(m, p)| LaurentParams::new(m, p.g2, p.g3)).collect();
    }
    if samples.iter().any(|p| p.m == int(0)) {
        return Err(usage("m must be nonzero"));
    }
    Ok(samples)
}

fn lemma3_reports(k: Option<usize>, cfg: &RunConfig) -> Result<Vec<Report>> {
    let samples = laurent_samples(cfg)?;
    let (ys, ws): (Vec<usize>, Vec<usize>) = match k {
        Some(0) => return Err(usage("--k must be at least 1")),
        Some(k) => (vec![k], if k >= 5 { vec![k] } else { vec![] }),
        None => ((1..=8).collect(), (5..=10).collect()),
    };
    let mut out = Vec::new();
    for n in ys {
        out.push(laurent_y(n, cfg.order, &samples)?);
    }
    for k in ws {
        out.push(laurent_w(k, cfg.order, &samples)?);
    }
    for r in &mut out {
        r.seed = cfg.seed;
    }
    Ok(out)
}

fn cmd_verify(suite: Suite, k: Option<usize>, cfg: &RunConfig) -> Result<bool> {
    let n = cfg.n;
    let needs_n = suite != Suite::Lemma3;
    if needs_n && n < 2 {
        return Err(usage("--n must be at least 2"));
    }
    let ms = m_list(cfg)?;
    if ms.is_empty() || cfg.trials == 0 {
        return Err(usage("need at least one m value and one trial"));
    }
    let vcfg = VerifyConfig::new(backend(cfg)?).with_m(ms.clone()).with_trials(cfg.trials).with_seed(cfg.seed);
    let mut names: Vec<&str> = Vec::new();
    if suite == Suite::Control {
        names.push("corrupted_integral");
    }
    if matches!(suite, Suite::Integral | Suite::All) {
        names.push("integral");
    }
    if matches!(suite, Suite::Tower | Suite::All) {
        if ms.iter().any(|m| *m == int(0)) {
            return Err(usage("the tower needs m != 0"));
        }
        names.push("tower");
        if suite == Suite::Tower {
            names.push("htheta");
        }
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        let lemmas = lemma_names(n);
        if lemmas.is_empty() {
            return Err(usage("the lemma suite needs n >= 3"));
        }
        names.extend(lemmas);
    }
    let mut sink = Sink::new(&cfg.out)?;
    let mut all_pass = true;
    let mut emit = |r: &Report, sink: &mut Sink| -> Result<()> {
        eprintln!("{r}");
        all_pass &= r.passed();
        sink.line(&r.to_json())
    };
    for name in names {
        let r = check_identity(name, n, &vcfg)?;
        emit(&r, &mut sink)?;
    }
    if matches!(suite, Suite::Lemma3 | Suite::All) {
        for r in lemma3_reports(k, cfg)? {
            emit(&r, &mut sink)?;
        }
    }
    Ok(all_pass)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gamma { k, common } => cmd_gamma(k, &resolve(&cli.config, common)?),
        Command::Build { object, k, set, common } => cmd_build(object, k, set, &resolve(&cli.config, common)?),
        Command::Verify { suite, k, common } => cmd_verify(suite, k, &resolve(&cli.config, common)?),
        Command::Tower { common } => cmd_verify(Suite::Tower, None, &resolve(&cli.config, common)?),
        Command::Lemma3 { k, common } => cmd_verify(Suite::Lemma3, k, &resolve(&cli.config, common)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
