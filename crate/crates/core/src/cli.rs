//! Command-line front end: `verify` runs suites on a model, `twist` writes structure tables.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::models::{EmitLevel, Fault, ModelBundle, ModelSpec, Suite, SCHEMA_VERSION};
use crate::report::{SampleSpec, Status, VerificationReport};

pub const FORMAT_ENV: &str = "TWISTGEOM_FORMAT";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "twistgeom", version, about = "Exact cocycle twists of noncommutative Kähler geometry")]
pub struct Cli {
    /// Flat `key = value` file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and print a report.
    Verify(VerifyArgs),
    /// Write the structure tables of a model as JSON.
    Twist(TwistArgs),
    /// List the injectable faults and the suites that catch them.
    Faults,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// classical_torus, nc_torus, finite_bicharacter or fun_group.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<i64>,
    #[arg(long)]
    pub q: Option<i64>,
    #[arg(long)]
    pub n: Option<i64>,
    /// skew or upper (finite_bicharacter).
    #[arg(long)]
    pub pairing: Option<String>,
    /// d4 or s3 (fun_group).
    #[arg(long)]
    pub group: Option<String>,
    /// Lattice sampling box |m_i| <= box.
    #[arg(long = "box")]
    pub radius: Option<i64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Inject one documented fault.
    #[arg(long)]
    pub fault: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output file.
    #[arg(long)]
    pub emit: PathBuf,
    /// base, twisted or roundtrip.
    #[arg(long)]
    pub level: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", no + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

const CONFIG_KEYS: [&str; 13] =
    ["model", "p", "q", "n", "pairing", "group", "box", "samples", "seed", "fault", "suite", "format", "level"];

fn load_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>, CliError> {
    let Some(p) = path else { return Ok(BTreeMap::new()) };
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    let cfg = parse_config(&text)?;
    if let Some(k) = cfg.keys().find(|k| !CONFIG_KEYS.contains(&k.as_str())) {
        return Err(CliError::Config(format!("unknown config key '{k}'")));
    }
    Ok(cfg)
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(v) => v.parse().map(Some).map_err(|_| CliError::Config(format!("bad value for {key}: '{v}'"))),
    }
}

struct Resolved {
    model: ModelSpec,
    fault: Option<Fault>,
    spec: SampleSpec,
}

fn resolve(a: &ModelArgs, cfg: &BTreeMap<String, String>) -> Result<Resolved, CliError> {
    let err = |e: crate::models::ModelError| CliError::Config(e.to_string());
    let name: String = pick(a.model.clone(), cfg, "model")?.ok_or_else(|| CliError::Config("--model is required".into()))?;
    let pairing: Option<String> = pick(a.pairing.clone(), cfg, "pairing")?;
    let group: Option<String> = pick(a.group.clone(), cfg, "group")?;
    let model = ModelSpec::parse(
        &name,
        pick(a.p, cfg, "p")?,
        pick(a.q, cfg, "q")?,
        pick(a.n, cfg, "n")?,
        pairing.as_deref(),
        group.as_deref(),
    )
    .map_err(err)?;
    let fault = pick(a.fault.clone(), cfg, "fault")?.map(|f: String| f.parse::<Fault>()).transpose().map_err(err)?;
    let d = SampleSpec::default();
    let spec = SampleSpec::new(
        pick(a.radius, cfg, "box")?.unwrap_or(d.radius),
        pick(a.samples, cfg, "samples")?.unwrap_or(d.samples),
        pick(a.seed, cfg, "seed")?.unwrap_or(d.seed),
    );
    if spec.radius < 0 || spec.samples == 0 {
        return Err(CliError::Config("box must be >= 0 and samples > 0".into()));
    }
    Ok(Resolved { model, fault, spec })
}

fn resolve_format(flag: Option<Format>, cfg: &BTreeMap<String, String>) -> Result<Format, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    let from = |s: &str, src: &str| {
        Format::from_str(s, true).map_err(|_| CliError::Config(format!("bad format '{s}' from {src}")))
    };
    if let Some(v) = cfg.get("format") {
        return from(v, "config");
    }
    match std::env::var(FORMAT_ENV) {
        Ok(v) if !v.is_empty() => from(&v, FORMAT_ENV),
        _ => Ok(Format::Text),
    }
}

/// JSON form of a report: sorted keys, entries ordered by check id.
pub fn report_json(model: &ModelSpec, suite: Suite, fault: Option<Fault>, spec: &SampleSpec, r: &VerificationReport) -> Value {
    let count = |s: Status| r.entries.iter().filter(|e| e.status == s).count();
    json!({
        "schema_version": SCHEMA_VERSION,
        "model": { "name": model.name(), "params": model.params() },
        "suite": suite.name(),
        "fault": fault.map(|f| f.name()),
        "sample_spec": { "box": spec.radius, "samples": spec.samples, "seed": spec.seed },
        "entries": r.entries,
        "summary": {
            "checks": r.entries.len(),
            "passed": count(Status::Pass),
            "failed": count(Status::Fail),
            "skipped": count(Status::Skipped),
            "all_pass": r.all_pass(),
        },
    })
}

fn verify(a: &VerifyArgs, cfg: &BTreeMap<String, String>, out: &mut dyn Write) -> Result<i32, CliError> {
    let res = resolve(&a.model, cfg)?;
    let suite: Suite = pick(a.suite.clone(), cfg, "suite")?
        .map(|s: String| s.parse::<Suite>())
        .transpose()
        .map_err(|e| CliError::Config(e.to_string()))?
        .unwrap_or(Suite::All);
    let format = resolve_format(a.format, cfg)?;
    let bundle = ModelBundle::assemble(&res.model, res.fault, &res.spec).map_err(|e| CliError::Config(e.to_string()))?;
    let r = bundle.run(suite, &res.spec);
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match format {
        Format::Json => {
            let v = report_json(&res.model, suite, res.fault, &res.spec, &r);
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable")).map_err(io)?;
        }
        Format::Text => {
            let fault = res.fault.map(|f| format!(" fault={}", f.name())).unwrap_or_default();
            writeln!(out, "model={} suite={} {}{fault}", res.model, suite.name(), res.spec).map_err(io)?;
            write!(out, "{}", r.to_text()).map_err(io)?;
            writeln!(out, "{}", if r.all_pass() { "PASS" } else { "FAIL" }).map_err(io)?;
        }
    }
    Ok(if r.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn twist(a: &TwistArgs, cfg: &BTreeMap<String, String>, out: &mut dyn Write) -> Result<i32, CliError> {
    let res = resolve(&a.model, cfg)?;
    let level: EmitLevel = pick(a.level.clone(), cfg, "level")?
        .map(|s: String| s.parse::<EmitLevel>())
        .transpose()
        .map_err(|e| CliError::Config(e.to_string()))?
        .unwrap_or(EmitLevel::Twisted);
    let bundle = ModelBundle::assemble(&res.model, res.fault, &res.spec).map_err(|e| CliError::Config(e.to_string()))?;
    let doc = match bundle.emit(level, &res.spec) {
        Ok(d) => d,
        Err(e) => {
            writeln!(out, "cannot build tables: {e}").map_err(|e| CliError::Io(e.to_string()))?;
            return Ok(EXIT_FAIL);
        }
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    std::fs::write(&a.emit, text).map_err(|e| CliError::Io(format!("{}: {e}", a.emit.display())))?;
    writeln!(out, "wrote {}", a.emit.display()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(EXIT_PASS)
}

fn faults(out: &mut dyn Write) -> Result<i32, CliError> {
    for f in Fault::ALL {
        writeln!(out, "{:<16} suite={:<11} model={}", f.name(), f.target().name(), f.model())
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(EXIT_PASS)
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = load_config(&cli.config).and_then(|cfg| match &cli.command {
        Command::Verify(a) => verify(a, &cfg, out),
        Command::Twist(a) => twist(a, &cfg, out),
        Command::Faults => faults(out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Parses `args` and runs; clap usage errors exit with 2.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
            } else {
                let _ = write!(out, "{}", e.render());
            }
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let c = parse_config("# defaults\nmodel = nc_torus\n q=3 # comment\n\n").unwrap();
        assert_eq!(c["model"], "nc_torus");
        assert_eq!(c["q"], "3");
        assert!(parse_config("model nc_torus").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(main_with(["twistgeom", "verify", "--bogus"], &mut o, &mut e), EXIT_CONFIG);
        assert_eq!(main_with(["twistgeom", "verify", "--model", "nope"], &mut o, &mut e), EXIT_CONFIG);
        assert_eq!(main_with(["twistgeom", "verify", "--model", "nc_torus", "--q", "0"], &mut o, &mut e), EXIT_CONFIG);
    }
}
