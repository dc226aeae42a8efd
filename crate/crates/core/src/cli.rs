//! Command-line front end for the `ssm` binary.
//!
//! Configuration is layered: built-in defaults, then a flat `key = value`
//! file (`--config`), then `--set key=value` overrides, then the dedicated
//! `--input`, `--out` and `--seed` flags. Unknown keys are rejected.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage,
//! configuration and I/O errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::backtest::{
    compare_to_csv, parse_signal_ledger, replay, run, BacktestConfig, BacktestReport, CompareRow,
    StrategyKind, StrategySpec,
};
use crate::classify::{KernelSpec, SmoParams};
use crate::emd::{decompose, SiftConfig};
use crate::error::{Error, Result};
use crate::hhsa::{holo_decompose, HoloLayer};
use crate::ingest::{parse_csv_named, PriceSeries, SplitSpec};
use crate::spectral::ichain_of;
use crate::states::{state_timeline, timeline_to_csv, TimelineConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ssm",
    version,
    about = "Decompose close-price series and backtest directional strategies"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV (`date,close`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Empirical mode decomposition of the closes.
    Decompose,
    /// AM and FM layers of the detrended closes.
    Hhsa,
    /// Walk-forward backtest of one strategy.
    Backtest,
    /// Backtest a base and a new strategy and report the improvement.
    Compare,
    /// Physiology, hidden-state and gate timeline.
    States,
}

/// Kernel family as written in config files; `gamma` is kept separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Rbs,
}

impl KernelKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "rbs" => Ok(Self::Rbs),
            _ => Err(Error::Config(format!("unknown kernel `{s}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Rbs => "rbs",
        }
    }

    fn spec(self, gamma: f64) -> Result<KernelSpec> {
        match self {
            Self::Linear => Ok(KernelSpec::Linear),
            Self::Rbs => KernelSpec::rbs(gamma),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub strategy: StrategyKind,
    pub kernel: KernelKind,
    pub gamma: f64,
    pub c: f64,
    pub m: usize,
    pub theta_star: f64,
    /// `None` means the strategy's own horizon.
    pub horizon: Option<usize>,
    pub sd_threshold: f64,
    pub max_sift_iters: usize,
    pub max_imfs: usize,
    pub layers: usize,
    pub gate_tau: f64,
    pub gate_window: usize,
    pub embed_window: usize,
    pub train_samples: usize,
    /// `None` splits the series 60/40 by position.
    pub split: Option<SplitSpec>,
    pub base_strategy: StrategyKind,
    pub base_kernel: KernelKind,
    pub base_gamma: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let bt = BacktestConfig::default();
        Self {
            input: None,
            out: PathBuf::from("out"),
            seed: 0,
            strategy: StrategyKind::HtSsm,
            kernel: KernelKind::Rbs,
            gamma: 0.05,
            c: SmoParams::default().c,
            m: 5,
            theta_star: bt.theta_star,
            horizon: None,
            sd_threshold: bt.sift.sd_threshold,
            max_sift_iters: bt.sift.max_sift_iters,
            max_imfs: bt.sift.max_imfs,
            layers: bt.layers,
            gate_tau: bt.gate_tau,
            gate_window: bt.gate_window,
            embed_window: bt.embed_window,
            train_samples: bt.train_samples,
            split: None,
            base_strategy: StrategyKind::Svm,
            base_kernel: KernelKind::Rbs,
            base_gamma: 0.05,
        }
    }
}

const SPLIT_KEYS: [&str; 4] = ["train_start", "train_end", "test_start", "test_end"];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "input" => self.input = (!v.is_empty()).then(|| PathBuf::from(v)),
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = num(key, v)?,
            "strategy" => self.strategy = v.parse()?,
            "kernel" => self.kernel = KernelKind::parse(v)?,
            "gamma" => self.gamma = num(key, v)?,
            "c" => self.c = num(key, v)?,
            "m" => self.m = num(key, v)?,
            "theta_star" => self.theta_star = num(key, v)?,
            "horizon" => {
                self.horizon = if v == "auto" {
                    None
                } else {
                    Some(num(key, v)?)
                }
            }
            "sd_threshold" => self.sd_threshold = num(key, v)?,
            "max_sift_iters" => self.max_sift_iters = num(key, v)?,
            "max_imfs" => self.max_imfs = num(key, v)?,
            "layers" => self.layers = num(key, v)?,
            "gate_tau" => self.gate_tau = num(key, v)?,
            "gate_window" => self.gate_window = num(key, v)?,
            "embed_window" => self.embed_window = num(key, v)?,
            "train_samples" => self.train_samples = num(key, v)?,
            k if SPLIT_KEYS.contains(&k) => {
                let mut ends = self
                    .split
                    .map_or([0; 4], |s| [s.train.0, s.train.1, s.test.0, s.test.1]);
                if v == "auto" {
                    self.split = None;
                    return Ok(());
                }
                let pos = SPLIT_KEYS.iter().position(|x| *x == k).expect("listed key");
                ends[pos] = num(key, v)?;
                self.split = Some(SplitSpec {
                    train: (ends[0], ends[1]),
                    test: (ends[2], ends[3]),
                });
            }
            "base_strategy" => self.base_strategy = v.parse()?,
            "base_kernel" => self.base_kernel = KernelKind::parse(v)?,
            "base_gamma" => self.base_gamma = num(key, v)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a flat config file. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Every key in canonical order; parses back to an equal config.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv(
            "input",
            self.input
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
        );
        kv("out", self.out.display().to_string());
        kv("seed", self.seed.to_string());
        kv("strategy", self.strategy.to_string());
        kv("kernel", self.kernel.name().into());
        kv("gamma", self.gamma.to_string());
        kv("c", self.c.to_string());
        kv("m", self.m.to_string());
        kv("theta_star", self.theta_star.to_string());
        kv(
            "horizon",
            self.horizon.map_or("auto".into(), |h| h.to_string()),
        );
        kv("sd_threshold", self.sd_threshold.to_string());
        kv("max_sift_iters", self.max_sift_iters.to_string());
        kv("max_imfs", self.max_imfs.to_string());
        kv("layers", self.layers.to_string());
        kv("gate_tau", self.gate_tau.to_string());
        kv("gate_window", self.gate_window.to_string());
        kv("embed_window", self.embed_window.to_string());
        kv("train_samples", self.train_samples.to_string());
        let ends = self
            .split
            .map(|s| [s.train.0, s.train.1, s.test.0, s.test.1]);
        for (i, k) in SPLIT_KEYS.iter().enumerate() {
            kv(k, ends.map_or("auto".into(), |e| e[i].to_string()));
        }
        kv("base_strategy", self.base_strategy.to_string());
        kv("base_kernel", self.base_kernel.name().into());
        kv("base_gamma", self.base_gamma.to_string());
        out
    }

    pub fn sift(&self) -> Result<SiftConfig> {
        let cfg = SiftConfig {
            sd_threshold: self.sd_threshold,
            max_sift_iters: self.max_sift_iters,
            max_imfs: self.max_imfs,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn backtest_config(&self) -> Result<BacktestConfig> {
        let cfg = BacktestConfig {
            sift: self.sift()?,
            embed_window: self.embed_window,
            train_samples: self.train_samples,
            smo: SmoParams {
                c: self.c,
                seed: self.seed,
                ..SmoParams::default()
            },
            theta_star: self.theta_star,
            layers: self.layers,
            gate_window: self.gate_window,
            gate_tau: self.gate_tau,
        };
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Config(format!("c must be positive, got {}", self.c)));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn strategy_spec(
        &self,
        kind: StrategyKind,
        kernel: KernelKind,
        gamma: f64,
    ) -> Result<StrategySpec> {
        let mut spec = StrategySpec::new(kind, kernel.spec(gamma)?, self.m);
        if let Some(h) = self.horizon {
            spec.horizon = h;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn strategy(&self) -> Result<StrategySpec> {
        self.strategy_spec(self.strategy, self.kernel, self.gamma)
    }

    /// The base strategy of `compare`; it always uses its own horizon.
    pub fn base(&self) -> Result<StrategySpec> {
        let spec = StrategySpec::new(
            self.base_strategy,
            self.base_kernel.spec(self.base_gamma)?,
            self.m,
        );
        spec.validate()?;
        Ok(spec)
    }

    /// The configured split, or a 60/40 positional split of `series`.
    pub fn split_for(&self, series: &PriceSeries) -> Result<SplitSpec> {
        if let Some(s) = self.split {
            s.validate()?;
            return Ok(s);
        }
        let pts = series.points();
        if pts.len() < 4 {
            return Err(Error::InsufficientData {
                needed: 4,
                got: pts.len(),
            });
        }
        let cut = pts.len() * 3 / 5;
        SplitSpec::new(
            (pts[0].date_ordinal, pts[cut - 1].date_ordinal),
            (pts[cut].date_ordinal, pts[pts.len() - 1].date_ordinal),
        )
    }
}

/// Writes `contents` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    let path = dir.join(name);
    tmp.persist(&path)
        .map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(path)
}

fn read_input(cfg: &RunConfig) -> Result<(String, String)> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("no input; pass --input or set `input`".into()))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let symbol = path
        .file_stem()
        .map_or("series".into(), |s| s.to_string_lossy().into_owned());
    Ok((symbol, text))
}

fn load_series(cfg: &RunConfig) -> Result<PriceSeries> {
    let (symbol, text) = read_input(cfg)?;
    parse_csv_named(&symbol, &text)
}

/// Closes minus their EMD residual.
fn detrended(series: &PriceSeries, sift: &SiftConfig) -> Result<Vec<f64>> {
    let (z, _) = ichain_of(&series.closes(), sift)?;
    Ok(z.re)
}

fn write_report(out: &Path, r: &BacktestReport) -> Result<()> {
    write_atomic(out, "report.csv", &r.summary_csv())?;
    write_atomic(out, "ledger.csv", &r.ledger_csv())?;
    write_atomic(out, "report.json", &r.to_json())?;
    Ok(())
}

fn backtest_report(cfg: &RunConfig, spec: StrategySpec) -> Result<BacktestReport> {
    let (symbol, text) = read_input(cfg)?;
    if text.lines().next().map(str::trim) == Some("date_number,close,signal") {
        let (series, signals) = parse_signal_ledger(&symbol, &text)?;
        return replay(&series, spec, &signals);
    }
    let series = parse_csv_named(&symbol, &text)?;
    let split = cfg.split_for(&series)?;
    run(spec, &series, &split, &cfg.backtest_config()?)
}

fn layer_summary(out: &mut String, branch: &str, layers: &[HoloLayer]) {
    for l in layers {
        let _ = writeln!(out, "{branch},{},{}", l.layer_index, l.dominant_frequency());
    }
}

/// Runs one command and returns its stdout summary line.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<String> {
    match command {
        Command::Decompose => {
            let series = load_series(cfg)?;
            let emd = decompose(&series.closes(), &cfg.sift()?)?;
            write_atomic(&cfg.out, "imfs.csv", &emd.to_csv())?;
            Ok(format!("imfs={}", emd.imfs.len()))
        }
        Command::Hhsa => {
            let sift = cfg.sift()?;
            let series = load_series(cfg)?;
            let stack = holo_decompose(&detrended(&series, &sift)?, cfg.layers, &sift)?;
            let mut summary = String::from("branch,layer,dominant_frequency\n");
            layer_summary(&mut summary, "am", &stack.am_layers);
            layer_summary(&mut summary, "fm", &stack.fm_layers);
            for l in &stack.am_layers {
                write_atomic(
                    &cfg.out,
                    &format!("am_layer{}.csv", l.layer_index),
                    &l.to_csv(),
                )?;
            }
            for l in &stack.fm_layers {
                write_atomic(
                    &cfg.out,
                    &format!("fm_layer{}.csv", l.layer_index),
                    &l.to_csv(),
                )?;
            }
            write_atomic(&cfg.out, "layers.csv", &summary)?;
            Ok(format!(
                "am_depth={} fm_depth={}",
                stack.am_depth(),
                stack.fm_depth()
            ))
        }
        Command::Backtest => {
            let report = backtest_report(cfg, cfg.strategy()?)?;
            write_report(&cfg.out, &report)?;
            Ok(report.summary_line())
        }
        Command::Compare => {
            let base = backtest_report(cfg, cfg.base()?)?;
            let new = backtest_report(cfg, cfg.strategy()?)?;
            let row = CompareRow::new(&base, &new);
            write_atomic(&cfg.out, "compare.csv", &compare_to_csv(&row))?;
            let mut json = serde_json::to_string_pretty(&row).expect("summary serializes");
            json.push('\n');
            write_atomic(&cfg.out, "compare.json", &json)?;
            Ok(format!(
                "improved={}",
                row.improved_pct
                    .map_or_else(|| "undefined".into(), |p| format!("{p:.2}"))
            ))
        }
        Command::States => {
            let series = load_series(cfg)?;
            let tl = TimelineConfig {
                sift: cfg.sift()?,
                layers: cfg.layers,
                gate_window: cfg.gate_window,
                gate_tau: cfg.gate_tau,
            };
            let (z, rows) = state_timeline(&series.closes(), &tl)?;
            write_atomic(&cfg.out, "states.csv", &timeline_to_csv(&rows))?;
            write_atomic(&cfg.out, "ichain.csv", &z.to_csv())?;
            Ok(format!("rows={}", rows.len()))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text)?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got `{kv}`")))?;
        cfg.set(k, v)?;
    }
    if let Some(p) = &cli.input {
        cfg.input = Some(p.clone());
    }
    if let Some(p) = &cli.out {
        cfg.out = p.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    if cli.dump_config {
        let _ = write!(stdout, "{}", cfg.dump());
        return 0;
    }
    let Some(command) = cli.command else {
        let _ = writeln!(stderr, "error: no command given; see --help");
        return 2;
    };
    match execute(command, &cfg) {
        Ok(line) => {
            let _ = writeln!(stdout, "{line}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
