//! Command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bnb::{solve, GlobalTraceRow, SolveConfig, SolveResult};
use crate::constraints::CutCaps;
use crate::error::{Error, Result};
use crate::model::{gen_synthetic, SyntheticConfig};
use crate::sdp::ConstraintClass;
use crate::uai::{read_uai, write_uai, TableMode};
use crate::verify::{run_suite, Suite};

pub const EXIT_EXACT: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_TIMEOUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "sdbc", version, about = "Semidefinite branch-and-cut MAP inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a UAI MARKOV model.
    Solve(SolveArgs),
    /// Write a synthetic Gaussian model in UAI format.
    Gen(GenArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub model: PathBuf,
    /// Output prefix; defaults to the model path without its extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub budget_sec: Option<f64>,
    #[arg(long)]
    pub gamma0_scale: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub k_init: Option<usize>,
    #[arg(long)]
    pub k_inner: Option<usize>,
    #[arg(long)]
    pub k_outer: Option<usize>,
    /// Base constraints only.
    #[arg(long)]
    pub no_cuts: bool,
    /// `nonneg,edgemarg,triangle,cycle,oddwheel`
    #[arg(long, value_parser = CutCaps::parse)]
    pub cut_caps: Option<CutCaps>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tables hold energies instead of potentials.
    #[arg(long)]
    pub raw_energy: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub h: usize,
    #[arg(long)]
    pub kappa: f64,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub raw_energy: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Worker threads for independent instances.
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// JSON encoding that keeps non-finite floats as strings.
mod float {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(de::Error::custom(format!("bad float {t:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t_sec: f64,
    #[serde(with = "float")]
    pub glb: f64,
    #[serde(with = "float")]
    pub gub: f64,
}

impl From<GlobalTraceRow> for TraceRecord {
    fn from(r: GlobalTraceRow) -> Self {
        TraceRecord {
            t_sec: r.t_sec,
            glb: r.glb,
            gub: r.gub,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub config: SolveConfig,
    #[serde(with = "float")]
    pub gub: f64,
    #[serde(with = "float")]
    pub glb: f64,
    #[serde(with = "float")]
    pub root_lb: f64,
    pub exact: bool,
    pub timed_out: bool,
    pub incumbent: Option<Vec<usize>>,
    pub wall_sec: f64,
    pub nodes: usize,
    pub splits: usize,
    pub cuts: BTreeMap<ConstraintClass, usize>,
    pub trace: Vec<TraceRecord>,
}

impl RunRecord {
    pub fn new(instance: String, config: SolveConfig, r: &SolveResult) -> Self {
        RunRecord {
            instance,
            config,
            gub: r.gub,
            glb: r.glb,
            root_lb: r.root_lb,
            exact: r.exact,
            timed_out: r.timed_out,
            incumbent: r.incumbent.as_ref().map(|x| x.0.clone()),
            wall_sec: r.wall_sec,
            nodes: r.nodes,
            splits: r.splits,
            cuts: r.cuts.clone(),
            trace: r.trace.iter().copied().map(TraceRecord::from).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })
    }
}

pub fn trace_csv(rows: &[TraceRecord]) -> String {
    let mut s = String::from("t_sec,glb,gub\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.t_sec, r.glb, r.gub).expect("write to string");
    }
    s
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

impl SolveArgs {
    pub fn config(&self) -> Result<SolveConfig> {
        let mut cfg = SolveConfig::default();
        let b = &mut cfg.bound;
        if let Some(v) = self.gamma0_scale {
            b.gamma0_scale = v;
        }
        if let Some(v) = self.delta {
            b.delta = v;
        }
        if let Some(v) = self.k_init {
            b.k_init = v;
        }
        if let Some(v) = self.k_inner {
            b.k_inner = v;
        }
        if let Some(v) = self.k_outer {
            b.k_outer = v;
        }
        if let Some(c) = self.cut_caps {
            b.cut_caps = c;
        }
        if self.no_cuts {
            b.cut_caps = CutCaps::none();
        }
        b.seed = self.seed;
        cfg.budget_sec = match self.budget_sec {
            Some(t) if t.is_nan() || t < 0.0 => {
                return Err(Error::Config(format!("--budget-sec must be non-negative, got {t}")))
            }
            Some(t) if t.is_infinite() => None,
            t => t,
        };
        b.validate()?;
        Ok(cfg)
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<u8> {
    let cfg = args.config()?;
    let text = std::fs::read_to_string(&args.model).map_err(|e| io(&args.model, e))?;
    let mode = if args.raw_energy {
        TableMode::RawEnergy
    } else {
        TableMode::Potentials
    };
    let model = read_uai(&text, mode)?;
    let r = solve(&model, &cfg)?;
    let prefix = args.out.clone().unwrap_or_else(|| args.model.with_extension(""));
    let instance = args
        .model
        .file_stem()
        .map_or_else(|| args.model.display().to_string(), |s| s.to_string_lossy().into_owned());
    let rec = RunRecord::new(instance, cfg, &r);
    let json = with_suffix(&prefix, ".result.json");
    std::fs::write(&json, rec.to_json()).map_err(|e| io(&json, e))?;
    let csv = with_suffix(&prefix, ".trace.csv");
    std::fs::write(&csv, trace_csv(&rec.trace)).map_err(|e| io(&csv, e))?;
    println!(
        "gub {} glb {} exact {} nodes {} wall {:.3}s",
        r.gub, r.glb, r.exact, r.nodes, r.wall_sec
    );
    if let Some(x) = &r.incumbent {
        let labels: Vec<String> = x.0.iter().map(usize::to_string).collect();
        println!("assignment {}", labels.join(" "));
    }
    Ok(if r.exact { EXIT_EXACT } else { EXIT_TIMEOUT })
}

pub fn cmd_gen(args: &GenArgs) -> Result<u8> {
    let cfg = SyntheticConfig {
        n: args.n,
        h: args.h,
        kappa: args.kappa,
        omega: args.omega,
        seed: args.seed,
    };
    let model = gen_synthetic(&cfg)?;
    let mode = if args.raw_energy {
        TableMode::RawEnergy
    } else {
        TableMode::Potentials
    };
    let text = write_uai(&model, mode);
    let e = model.num_edges();
    let realized = if args.n == 0 { 0.0 } else { 2.0 * e as f64 / args.n as f64 };
    match &args.out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| io(p, e))?;
            println!("edges {e} kappa {realized}");
        }
        None => {
            print!("{text}");
            eprintln!("edges {e} kappa {realized}");
        }
    }
    Ok(EXIT_EXACT)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let run = || run_suite(args.suite);
    let reports = match args.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    for r in &reports {
        println!("{r}");
    }
    Ok(if reports.iter().all(|r| r.passed) { EXIT_EXACT } else { EXIT_ERROR })
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SDBC_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::t3;

    #[test]
    fn record_round_trips_with_infinities() {
        let r = solve(
            &t3(),
            &SolveConfig {
                budget_sec: Some(0.0),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        let rec = RunRecord::new("t3".into(), SolveConfig::default(), &r);
        assert_eq!(rec.gub, f64::INFINITY);
        let json = rec.to_json();
        assert!(json.contains("\"inf\""));
        assert_eq!(RunRecord::from_json(&json).unwrap(), rec);
    }

    #[test]
    fn record_round_trips_exact_run() {
        let r = solve(&t3(), &SolveConfig::default()).unwrap();
        let rec = RunRecord::new("t3".into(), SolveConfig::default(), &r);
        let back = RunRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back, rec);
        assert!((back.gub - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn csv_has_header() {
        let rows = [TraceRecord {
            t_sec: 0.5,
            glb: f64::NEG_INFINITY,
            gub: 2.0,
        }];
        assert_eq!(trace_csv(&rows), "t_sec,glb,gub\n0.5,-inf,2\n");
    }

    #[test]
    fn flags_map_to_config() {
        let cli = Cli::try_parse_from([
            "sdbc", "solve", "m.uai", "--no-cuts", "--delta", "3", "--k-outer", "4", "--seed", "9",
        ])
        .unwrap();
        let Command::Solve(a) = cli.command else { panic!("expected solve") };
        let cfg = a.config().unwrap();
        assert!(cfg.bound.cut_caps.is_empty());
        assert_eq!((cfg.bound.delta, cfg.bound.k_outer, cfg.bound.seed), (3.0, 4, 9));
        let bad = Cli::try_parse_from(["sdbc", "solve", "m.uai", "--delta", "0.5"]).unwrap();
        let Command::Solve(a) = bad.command else { panic!("expected solve") };
        assert!(matches!(a.config(), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_suite_is_usage_error() {
        assert!(Cli::try_parse_from(["sdbc", "verify", "speed"]).is_err());
    }
}
