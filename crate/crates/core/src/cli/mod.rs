//! Command-line front end. The binary only forwards `argv` to [`run`].

pub mod mapfile;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::battery::{run_battery, BatteryConfig};
use crate::engine::{Engine, EngineConfig};
use crate::error::Error;
use crate::joint::CurlFluxPoint;
use crate::metrics::{
    check_flux_gap, check_invariance_under_simple_composition, check_inverse_symmetry, format_sig, growth_rate_points,
    nth_root_ratio, ratio_f64, PropertyReport,
};
use crate::morphisms::{classify, verify_inverse, Endomorphism};
use crate::sampler::estimate_curl_ratio;
use crate::transducer::build;
use crate::words::Word;

pub use mapfile::{format_map_file, parse_map_file, MapFile};

/// Environment variable holding the DP memory cap in bytes.
pub const MEMORY_CAP_ENV: &str = "CURLFLUX_MEMORY_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ENGINE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// Radius for root comparisons after composing with conjugations.
pub const INNER_RATE_N: usize = 200;

pub const TSV_HEADER: &str = "n\tCURL_RATIO\tCURL_ROOT\tFLUX_RATIO\tFLUX_ROOT";

#[derive(Parser, Debug)]
#[command(name = "curlflux", version, about = "Curl and flux of free group endomorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Curl/flux ratios and roots per radius.
    Table(TableArgs),
    /// Run the property battery, or the checks that apply to one map.
    Check(CheckArgs),
    /// Growth function Γ_{φ,m}(n) and its n-th roots.
    Growth(GrowthArgs),
    /// Report whether the map is a permutation, inner, simple, a power map, or general.
    Classify(MapArgs),
    /// Dump the image-length transducer as JSON.
    Transducer(MapArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Brute,
    Dp,
    Sample,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(clap::Args, Debug)]
pub struct MapArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct TableArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Radii: a comma list `10,20,50` or a range `A..B` (inclusive).
    #[arg(long, value_parser = parse_radii)]
    pub n: Radii,
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Brute-force enumeration cap (words).
    #[arg(long)]
    pub enumeration_cap: Option<u64>,
}

#[derive(clap::Args, Debug)]
pub struct CheckArgs {
    /// Check one map instead of running the default battery.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long, value_parser = parse_radii)]
    pub n: Option<Radii>,
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Smaller DP radii in the default battery.
    #[arg(long)]
    pub quick: bool,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub struct GrowthArgs {
    #[arg(long)]
    pub map: PathBuf,
    /// Base word length.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Iteration counts; the table runs to the largest.
    #[arg(long, value_parser = parse_radii)]
    pub n: Radii,
    /// Words of length `m` to enumerate.
    #[arg(long, default_value_t = crate::words::DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: u64,
    /// Abort once an iterated image exceeds this length.
    #[arg(long, default_value_t = crate::exact_count::DEFAULT_GROWTH_CAP)]
    pub growth_cap: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radii(pub Vec<usize>);

pub fn parse_radii(s: &str) -> Result<Radii, String> {
    let s = s.trim();
    let mut out = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
        if a > b {
            return Err(format!("empty range {s:?}"));
        }
        (a..=b).collect::<Vec<_>>()
    } else {
        s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad radius {t:?}"))).collect::<Result<Vec<_>, _>>()?
    };
    out.sort_unstable();
    out.dedup();
    if out.is_empty() {
        return Err("no radii".into());
    }
    Ok(Radii(out))
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Unreduced { .. } | Error::InvalidRank(_) | Error::RankMismatch { .. } => EXIT_PARSE,
            Error::NotInverse { .. } => EXIT_VIOLATION,
            _ => EXIT_ENGINE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn io_error(e: std::io::Error, what: &str) -> CliError {
    CliError { code: EXIT_PARSE, message: format!("{what}: {e}") }
}

/// Parse arguments and run; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stderr) {
        Ok((text, code, out)) => match out {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {}", io_error(e, &path.display().to_string()).message);
                    EXIT_ENGINE
                }
            },
            None => {
                let _ = stdout.write_all(text.as_bytes());
                code
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

type Outcome = (String, i32, Option<PathBuf>);

fn dispatch(command: Command, log: &mut dyn Write) -> Result<Outcome, CliError> {
    match command {
        Command::Table(a) => {
            let map = load_map(&a.map)?;
            let text = cmd_table(&map.forward, &a, log)?;
            Ok((text, EXIT_OK, a.out))
        }
        Command::Check(a) => {
            let (reports, text) = cmd_check(&a, log)?;
            let code = if reports.iter().all(PropertyReport::passed) { EXIT_OK } else { EXIT_VIOLATION };
            Ok((text, code, a.out))
        }
        Command::Growth(a) => {
            let map = load_map(&a.map)?;
            Ok((cmd_growth(&map.forward, &a)?, EXIT_OK, a.out))
        }
        Command::Classify(a) => {
            let map = load_map(&a.map)?;
            let class = classify(&map.forward);
            let ctx = map.forward.ctx();
            let text = match a.format {
                Format::Tsv => format!("{}\n", class.describe(ctx)),
                Format::Json => format!(
                    "{}\n",
                    json!({ "map": map.forward.format_images(), "class": class.describe(ctx), "simple": class.is_simple() })
                ),
            };
            Ok((text, EXIT_OK, a.out))
        }
        Command::Transducer(a) => {
            let map = load_map(&a.map)?;
            let t = build(&map.forward, &Default::default())?;
            let text = serde_json::to_string_pretty(&t.dump()).expect("dump serializes") + "\n";
            Ok((text, EXIT_OK, a.out))
        }
    }
}

pub fn load_map(path: &PathBuf) -> Result<MapFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(e, &path.display().to_string()))?;
    Ok(parse_map_file(&text)?)
}

fn engine_config(cap: Option<u64>) -> Result<EngineConfig, CliError> {
    let mut cfg = EngineConfig::default();
    if let Some(c) = cap {
        cfg.enumeration_cap = c;
    }
    if let Ok(v) = std::env::var(MEMORY_CAP_ENV) {
        let bytes = v
            .trim()
            .parse()
            .map_err(|_| CliError { code: EXIT_PARSE, message: format!("{MEMORY_CAP_ENV} must be a byte count, got {v:?}") })?;
        cfg.dp.memory_budget = Some(bytes);
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct TableRow {
    n: usize,
    curl_ratio: f64,
    curl_root: f64,
    flux_ratio: f64,
    flux_root: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    curl_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    flux_count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ball: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hits: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci95: Option<f64>,
}

fn exact_row(p: &CurlFluxPoint) -> TableRow {
    TableRow {
        n: p.n,
        curl_ratio: ratio_f64(&p.curl_count, &p.ball),
        curl_root: nth_root_ratio(&p.curl_count, &p.ball, p.n),
        flux_ratio: ratio_f64(&p.flux_count, &p.ball),
        flux_root: nth_root_ratio(&p.flux_count, &p.ball, p.n),
        curl_count: Some(p.curl_count.to_string()),
        flux_count: Some(p.flux_count.to_string()),
        ball: Some(p.ball.to_string()),
        samples: None,
        hits: None,
        ci95: None,
    }
}

fn sampled_row(phi: &Endomorphism, n: usize, samples: u64, seed: u64) -> TableRow {
    let e = estimate_curl_ratio(phi, n, samples, seed);
    let root = |x: f64| {
        if n == 0 || x == 0.0 {
            if x == 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            x.powf(1.0 / n as f64)
        }
    };
    TableRow {
        n,
        curl_ratio: e.point,
        curl_root: root(e.point),
        flux_ratio: e.flux_point(),
        flux_root: root(e.flux_point()),
        curl_count: None,
        flux_count: None,
        ball: None,
        samples: Some(e.samples),
        hits: Some(e.hits),
        ci95: Some(e.ci95),
    }
}

/// Build the table for `a.n`, returning the formatted output.
pub fn cmd_table(phi: &Endomorphism, a: &TableArgs, log: &mut dyn Write) -> Result<String, CliError> {
    let cfg = engine_config(a.enumeration_cap)?;
    let n_max = *a.n.0.last().unwrap();
    let (rows, used) = match a.engine {
        EngineArg::Sample => {
            let _ = writeln!(log, "engine: sample ({} samples, seed {}, {})", a.samples, a.seed, crate::sampler::RNG_ALGORITHM);
            (a.n.0.iter().map(|&n| sampled_row(phi, n, a.samples, a.seed)).collect::<Vec<_>>(), EngineArg::Sample)
        }
        requested => {
            let engine = match requested {
                EngineArg::Brute => Engine::Brute,
                EngineArg::Dp => Engine::Dp,
                _ => Engine::Auto,
            };
            let resolved = cfg.resolve(phi, n_max, engine);
            if engine == Engine::Auto {
                let _ =
                    writeln!(log, "engine: auto selected {resolved:?} for n <= {n_max} (|B_n| = {})", phi.ctx().ball_size(n_max));
            }
            match cfg.series(phi, n_max, resolved) {
                Ok(series) => (
                    a.n.0.iter().map(|&n| exact_row(&series[n])).collect(),
                    if resolved == Engine::Brute { EngineArg::Brute } else { EngineArg::Dp },
                ),
                Err(e) if requested == EngineArg::Auto => {
                    let _ = writeln!(
                        log,
                        "engine: dp failed ({e}); falling back to sampling with {} samples, seed {}",
                        a.samples, a.seed
                    );
                    (a.n.0.iter().map(|&n| sampled_row(phi, n, a.samples, a.seed)).collect(), EngineArg::Sample)
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(match a.format {
        Format::Tsv => format_tsv(&rows),
        Format::Json => {
            let doc = json!({
                "map": phi.format_images(),
                "engine": used,
                "seed": if used == EngineArg::Sample { Some(a.seed) } else { None },
                "rng": if used == EngineArg::Sample { Some(crate::sampler::RNG_ALGORITHM) } else { None },
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
    })
}

fn format_tsv(rows: &[TableRow]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.n,
            format_sig(r.curl_ratio, 6),
            format_sig(r.curl_root, 6),
            format_sig(r.flux_ratio, 6),
            format_sig(r.flux_root, 6)
        ));
    }
    out
}

/// Run the battery (or per-map checks) and format the reports.
pub fn cmd_check(a: &CheckArgs, log: &mut dyn Write) -> Result<(Vec<PropertyReport>, String), CliError> {
    let cfg = engine_config(None)?;
    let reports = match &a.map {
        None => {
            let mut battery = if a.quick { BatteryConfig::quick() } else { BatteryConfig::default() };
            battery.seed = a.seed;
            battery.engine = cfg;
            let _ = writeln!(log, "running default battery (seed {})", a.seed);
            run_battery(&battery)?
        }
        Some(path) => {
            let map = load_map(path)?;
            check_one_map(&map, a, &cfg)?
        }
    };
    let text = match a.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "passed": reports.iter().all(PropertyReport::passed),
                "instances": reports.iter().map(|r| r.instances).sum::<usize>(),
                "reports": reports,
            }))
            .unwrap()
                + "\n"
        }
        Format::Tsv => {
            let mut out = String::from("property\tinstances\tcomparisons\tviolations\tworst_margin\tstatus\n");
            for r in &reports {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    r.property,
                    r.instances,
                    r.comparisons,
                    r.violations.len(),
                    r.worst_margin.as_deref().unwrap_or("-"),
                    if r.passed() { "pass" } else { "FAIL" }
                ));
                for v in &r.violations {
                    out.push_str(&format!("# violation: {v}\n"));
                }
                for w in &r.warnings {
                    out.push_str(&format!("# warning: {w}\n"));
                }
            }
            out
        }
    };
    Ok((reports, text))
}

fn check_one_map(map: &MapFile, a: &CheckArgs, cfg: &EngineConfig) -> Result<Vec<PropertyReport>, CliError> {
    let n = a.n.as_ref().map(|r| *r.0.last().unwrap()).unwrap_or(8);
    let engine = match a.engine {
        EngineArg::Brute => Engine::Brute,
        EngineArg::Dp => Engine::Dp,
        _ => Engine::Auto,
    };
    let phi = &map.forward;
    let mut reports = Vec::new();
    let mut injective = false;
    if let Some(inv) = &map.inverse {
        match verify_inverse(phi, inv) {
            Ok(v) => {
                injective = true;
                reports.push(check_inverse_symmetry(&v, n, engine, cfg)?);
            }
            Err(e) => {
                let mut r = PropertyReport::new("inverse verification");
                r.instances = 1;
                r.comparisons = 1;
                r.violations.push(e.to_string());
                reports.push(r);
            }
        }
    }
    let ctx = phi.ctx();
    let perms: Vec<Endomorphism> = if ctx.rank() >= 2 {
        let mut images: Vec<crate::words::Letter> = ctx.letters().step_by(2).collect();
        images.rotate_left(1);
        let rotate = Endomorphism::permutation(ctx, &images)?;
        let invert = Endomorphism::permutation(ctx, &ctx.letters().skip(1).step_by(2).collect::<Vec<_>>())?;
        vec![rotate, invert]
    } else {
        vec![]
    };
    // conjugation rates need the DP, which is only expected to close for injective maps
    let conjugators: Vec<Word> = if injective && ctx.rank() >= 2 {
        vec![ctx.generator(0), ctx.generator(0).concat(&ctx.generator(1).inverse())]
    } else {
        vec![]
    };
    reports.push(check_invariance_under_simple_composition(phi, n, &perms, &conjugators, INNER_RATE_N, injective, engine, cfg)?);
    if injective {
        reports.push(check_flux_gap(phi, n, engine, cfg)?);
    }
    Ok(reports)
}

pub fn cmd_growth(phi: &Endomorphism, a: &GrowthArgs) -> Result<String, CliError> {
    let n_max = *a.n.0.last().unwrap();
    let est = growth_rate_points(phi, a.m, n_max, a.enumeration_cap, a.growth_cap)?;
    let rows: Vec<_> = est.points.iter().filter(|p| a.n.0.contains(&p.n)).collect();
    Ok(match a.format {
        Format::Tsv => {
            let mut out = String::from("m\tn\tGAMMA\tGAMMA_ROOT\n");
            for p in rows {
                out.push_str(&format!("{}\t{}\t{}\t{}\n", a.m, p.n, p.count, format_sig(p.root, 6)));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|p| json!({ "m": a.m, "n": p.n, "gamma": p.count.parse::<u64>().unwrap(), "root": p.root }))
                .collect();
            serde_json::to_string_pretty(&json!({ "map": phi.format_images(), "rows": rows })).unwrap() + "\n"
        }
    })
}
