//! Command-line front end. `run` is the whole program minus process exit.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::json;

use crate::arcstats::{self, ArcDistribution};
use crate::asymptotics::{self, AsymptoticEstimate, Provenance};
use crate::cache::Cache;
use crate::diagram::{enumerate_count, histogram, Extra, Query, DEFAULT_LIMIT};
use crate::error::Error;
use crate::rational;
use crate::series::TruncatedSeries;
use crate::structures::{build_family, gf_arc_bivariate, Family, ModelSeries, Params};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "kncross", version, about = "Counting and asymptotics for k-noncrossing diagrams")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct Opts {
    /// matchings, secondary, modular, irreducible, skeleton-matching, skeleton-shape, canonical-skeleton, arc-bivariate
    #[arg(long, global = true)]
    family: Option<String>,
    /// Crossing bound: no k-crossing (default 3)
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Minimum arc length (secondary only)
    #[arg(long, global = true)]
    lambda: Option<usize>,
    /// Minimum stack length (fixed per family; accepted only at that value)
    #[arg(long, global = true)]
    tau: Option<usize>,
    /// Truncation order of the series
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Single size (dist)
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Largest size compared or printed
    #[arg(long = "n-max", global = true)]
    n_max: Option<usize>,
    /// Output format
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output file (directory for dist)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for cached series
    #[arg(long = "cache-dir", global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    target: Option<Target>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient table of a family's generating function
    Count,
    /// Compare generating-function coefficients with exhaustive enumeration
    Verify,
    /// Growth rates, constants and limit-law parameters
    Asym,
    /// Arc-count distribution of canonical skeleton diagrams with a normal overlay
    Dist,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    ModularTable,
    SkeletonConstants,
    Clt,
    /// coeff(n)/(n^e r^n) for skeleton-matching, canonical-skeleton or matchings k=3
    Ratios,
}

/// Effective settings after merging the config file under the flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub family: Option<Family>,
    pub params: Params,
    pub order: Option<usize>,
    pub n: Option<usize>,
    pub n_max: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub target: Option<Target>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::OracleLimit { .. } => EXIT_USAGE,
            _ => EXIT_NUMERIC,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_NUMERIC, message: format!("i/o error: {e}") }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Flat `key = value` lines; `#` starts a comment. Keys use the flag names.
pub fn parse_config(text: &str) -> crate::Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

fn merge(flags: Opts, file: &BTreeMap<String, String>) -> CliResult<RunConfig> {
    const KEYS: [&str; 12] =
        ["family", "k", "lambda", "tau", "order", "n", "n-max", "format", "out", "cache-dir", "threads", "target"];
    if let Some(bad) = file.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Failure::usage(format!("unknown config key {bad:?}")));
    }
    let num = |key: &str, flag: Option<usize>| -> CliResult<Option<usize>> {
        match (flag, file.get(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s.parse().map(Some).map_err(|_| Failure::usage(format!("config {key}: not a number: {s:?}"))),
            (None, None) => Ok(None),
        }
    };
    let family = match flags.family.or_else(|| file.get("family").cloned()) {
        Some(s) => Some(s.parse::<Family>()?),
        None => None,
    };
    let format = match (flags.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::from_str(s, true).map_err(|_| Failure::usage(format!("config format: {s:?}")))?,
        (None, None) => Format::Csv,
    };
    let target = match (flags.target, file.get("target")) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(Target::from_str(s, true).map_err(|_| Failure::usage(format!("config target: {s:?}")))?),
        (None, None) => None,
    };
    Ok(RunConfig {
        family,
        params: Params { k: num("k", flags.k)?, lambda: num("lambda", flags.lambda)?, tau: num("tau", flags.tau)? },
        order: num("order", flags.order)?,
        n: num("n", flags.n)?,
        n_max: num("n-max", flags.n_max)?,
        format,
        out: flags.out.or_else(|| file.get("out").map(PathBuf::from)),
        cache_dir: flags.cache_dir.or_else(|| file.get("cache-dir").map(PathBuf::from)),
        threads: num("threads", flags.threads)?,
        target,
    })
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let file = match &cli.opts.config {
        Some(p) => parse_config(&std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("config {}: {e}", p.display())))?)?,
        None => BTreeMap::new(),
    };
    let cfg = merge(cli.opts, &file)?;
    let work = || match cli.command {
        Command::Count => cmd_count(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Asym => cmd_asym(&cfg),
        Command::Dist => cmd_dist(&cfg),
    };
    let report = match cfg.threads {
        Some(0) => return Err(Failure::usage("--threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    match (&cfg.out, report.file_output) {
        (Some(path), true) => std::fs::write(path, &report.body)?,
        _ => out.write_all(report.body.as_bytes())?,
    }
    err.write_all(report.summary.as_bytes())?;
    Ok(report.code)
}

struct Report {
    body: String,
    summary: String,
    code: i32,
    /// `--out` names a file for `body`; otherwise it is a directory (dist)
    file_output: bool,
}

impl Report {
    fn ok(body: String) -> Self {
        Self { body, summary: String::new(), code: EXIT_OK, file_output: true }
    }
}

fn need_family(cfg: &RunConfig) -> CliResult<Family> {
    cfg.family.ok_or_else(|| Failure::usage("--family is required"))
}

fn check_params(family: Family, p: &Params) -> CliResult<()> {
    let fixed_tau = match family {
        Family::Modular => 2,
        Family::CanonicalSkeleton | Family::ArcBivariate => 3,
        _ => 1,
    };
    if let Some(t) = p.tau {
        if t != fixed_tau {
            return Err(Failure::usage(format!("{family} has stack length at least {fixed_tau}; --tau {t} is not supported")));
        }
    }
    if p.lambda.is_some() && family != Family::Secondary {
        return Err(Failure::usage(format!("--lambda applies only to secondary, not {family}")));
    }
    let k3_only = matches!(
        family,
        Family::Irreducible | Family::SkeletonMatching | Family::SkeletonShape | Family::CanonicalSkeleton | Family::ArcBivariate
    );
    match (family, p.k) {
        (_, Some(k)) if k3_only && k != 3 => Err(Failure::usage(format!("{family} is implemented for k=3 only"))),
        (Family::Secondary, Some(k)) if k != 2 => Err(Failure::usage("secondary structures are noncrossing (k=2)")),
        (Family::Matchings | Family::Modular, Some(k)) if k < 2 => Err(Failure::usage("k must be at least 2")),
        _ => Ok(()),
    }
}

fn series_key(family: Family, p: &Params, order: usize) -> String {
    format!("series;family={family};params={p};order={order}")
}

fn cached_family(cfg: &RunConfig, family: Family, order: usize) -> CliResult<ModelSeries> {
    let cache = cfg.cache_dir.as_ref().map(Cache::new).transpose()?;
    let key = series_key(family, &cfg.params, order);
    if let Some(c) = &cache {
        if let Some(payload) = c.get(&key) {
            if let Ok(s) = TruncatedSeries::from_json(&payload) {
                let built = ModelSeries::new(family, resolved_params(family, &cfg.params), s);
                return Ok(built);
            }
        }
    }
    let m = build_family(family, cfg.params, order)?;
    if let Some(c) = &cache {
        c.put(&key, &m.series.to_json())?;
    }
    Ok(m)
}

fn resolved_params(family: Family, p: &Params) -> Params {
    match family {
        Family::Matchings => Params { k: Some(p.k.unwrap_or(3)), ..Default::default() },
        Family::Secondary => Params { lambda: Some(p.lambda.unwrap_or(1)), ..Default::default() },
        Family::Modular => Params { k: Some(p.k.unwrap_or(3)), ..Default::default() },
        _ => Params { k: Some(3), ..Default::default() },
    }
}

fn cmd_count(cfg: &RunConfig) -> CliResult<Report> {
    let family = need_family(cfg)?;
    check_params(family, &cfg.params)?;
    let order = cfg.order.ok_or_else(|| Failure::usage("--order is required"))?;
    let m = cached_family(cfg, family, order)?;
    let body = match cfg.format {
        Format::Csv => m.to_csv(),
        Format::Json => m.to_json() + "\n",
    };
    Ok(Report::ok(body))
}

/// Oracle vertex count for coefficient index `i`.
fn oracle_vertices(family: Family, i: usize) -> usize {
    match family {
        Family::Matchings | Family::Irreducible | Family::SkeletonMatching | Family::SkeletonShape => 2 * i,
        _ => i,
    }
}

/// S(0) = S(1) = 1 are conventional; skeleton matchings have at least two arcs.
fn oracle_start(family: Family) -> usize {
    if family == Family::SkeletonMatching {
        2
    } else {
        0
    }
}

fn oracle_query(family: Family, p: &Params) -> Query {
    match family {
        Family::Matchings => Query::matching(p.k.unwrap_or(3)),
        Family::Secondary => Query::secondary(p.lambda.unwrap_or(1)),
        Family::Modular => Query::modular(p.k.unwrap_or(3)),
        Family::Irreducible => Query::irreducible(3),
        Family::SkeletonMatching => Query::skeleton_matching(3),
        Family::SkeletonShape => Query { extra: Extra::SkeletonMatching, ..Query::shape(3) },
        Family::CanonicalSkeleton | Family::ArcBivariate => Query::canonical_skeleton(),
    }
}

fn cmd_verify(cfg: &RunConfig) -> CliResult<Report> {
    let family = need_family(cfg)?;
    check_params(family, &cfg.params)?;
    let n_max = cfg.n_max.ok_or_else(|| Failure::usage("--n-max is required"))?;
    let order = cfg.order.unwrap_or(n_max);
    if order < n_max {
        return Err(Failure::usage(format!("--order {order} is below --n-max {n_max}; the series cannot be checked that far")));
    }
    let top = oracle_vertices(family, n_max);
    if top > DEFAULT_LIMIT {
        return Err(Error::OracleLimit { n: top, limit: DEFAULT_LIMIT }.into());
    }
    let q = oracle_query(family, &cfg.params);
    let mut rows = Vec::new();
    if family == Family::ArcBivariate {
        let a = gf_arc_bivariate(order)?;
        for n in 0..=n_max {
            let d = ArcDistribution::from_bivariate(&a, n)?;
            let oracle = histogram(n, &q, DEFAULT_LIMIT, |x| x.arc_count())?;
            for h in 0..=n / 2 {
                let gf = d.counts.get(&h).cloned().unwrap_or_default();
                let want = BigInt::from(oracle.get(&h).copied().unwrap_or(0));
                if gf != BigInt::from(0) || want != BigInt::from(0) {
                    rows.push((format!("{n}:{h}"), gf, want));
                }
            }
        }
    } else {
        let counts = cached_family(cfg, family, order)?.counts()?;
        for (i, gf) in counts.iter().enumerate().take(n_max + 1).skip(oracle_start(family)) {
            let want = BigInt::from(enumerate_count(oracle_vertices(family, i), &q)?);
            rows.push((i.to_string(), gf.clone(), want));
        }
    }
    let mismatches = rows.iter().filter(|(_, a, b)| a != b).count();
    let status = |a: &BigInt, b: &BigInt| if a == b { "ok" } else { "MISMATCH" };
    let body = match cfg.format {
        Format::Csv => {
            let mut s = String::from("n,gf,oracle,status\n");
            for (n, a, b) in &rows {
                let _ = writeln!(s, "{n},{a},{b},{}", status(a, b));
            }
            s
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(n, a, b)| json!({"n": n, "gf": a.to_string(), "oracle": b.to_string(), "status": status(a, b)}))
                .collect();
            json!({"family": family.name(), "params": resolved_params(family, &cfg.params).to_string(), "rows": items, "mismatches": mismatches})
                .to_string()
                + "\n"
        }
    };
    let summary = if mismatches == 0 {
        format!("verify {family}: {} values agree\n", rows.len())
    } else {
        format!("verify {family}: {mismatches} of {} values differ from the oracle\n", rows.len())
    };
    Ok(Report { body, summary, code: if mismatches == 0 { EXIT_OK } else { EXIT_MISMATCH }, file_output: true })
}

fn cmd_asym(cfg: &RunConfig) -> CliResult<Report> {
    let target = cfg.target.ok_or_else(|| Failure::usage("--target is required (modular-table, skeleton-constants, clt, ratios)"))?;
    let body = match target {
        Target::ModularTable => {
            let rows = asymptotics::modular_growth_table(3..=9)?;
            let (g2, inv2) = asymptotics::gamma2()?;
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from("k,gamma,inverse_gamma,exponent,residual\n");
                    let _ = writeln!(s, "2,{g2:.10},{inv2:.10},-1.5,");
                    for r in &rows {
                        let _ = writeln!(s, "{},{:.10},{:.10},{},{:.3e}", r.k, r.gamma, r.growth, asymptotics::modular_exponent(r.k), r.residual);
                    }
                    s
                }
                Format::Json => json!({
                    "k2": {"root": g2, "inverse_root": inv2},
                    "rows": rows.iter().map(|r| json!({
                        "k": r.k, "gamma": r.gamma, "inverse_gamma": r.growth,
                        "exponent": asymptotics::modular_exponent(r.k),
                        "log_term": r.k % 2 == 1, "residual": r.residual,
                    })).collect::<Vec<_>>(),
                })
                .to_string()
                    + "\n",
            }
        }
        Target::SkeletonConstants => {
            let c = asymptotics::skeleton_constants()?;
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from("name,value\n");
                    for (k, v) in [
                        ("rho", c.rho),
                        ("F3_at_rho", c.f3_rho),
                        ("F3_tail_bound", c.f3_rho_tail_bound),
                        ("R_series", c.r_series),
                        ("R_closed", c.r_closed),
                        ("C", c.c),
                        ("eta", c.eta.gamma),
                        ("eta_residual", c.eta.residual),
                        ("C_prime", c.c_prime),
                    ] {
                        let _ = writeln!(s, "{k},{v:.12e}");
                    }
                    s
                }
                Format::Json => serde_json::to_string(&c).map_err(|e| Failure::usage(e.to_string()))? + "\n",
            }
        }
        Target::Clt => {
            let p = asymptotics::clt_params()?;
            match cfg.format {
                Format::Csv => {
                    let mut s = String::from("name,value\n");
                    for (k, v) in [
                        ("mu", p.mu),
                        ("sigma2", p.sigma2),
                        ("gamma0", p.gamma0),
                        ("gamma1", p.gamma1),
                        ("gamma2", p.gamma2),
                        ("mu_fd", p.mu_fd),
                        ("sigma2_fd", p.sigma2_fd),
                    ] {
                        let _ = writeln!(s, "{k},{v:.12e}");
                    }
                    s
                }
                Format::Json => serde_json::to_string(&p).map_err(|e| Failure::usage(e.to_string()))? + "\n",
            }
        }
        Target::Ratios => ratio_table(cfg)?,
    };
    Ok(Report::ok(body))
}

fn ratio_table(cfg: &RunConfig) -> CliResult<String> {
    let family = need_family(cfg)?;
    let order = cfg.order.ok_or_else(|| Failure::usage("--order is required"))?;
    let est = match family {
        Family::SkeletonMatching => {
            let c = asymptotics::skeleton_constants()?;
            AsymptoticEstimate { constant: c.c, exponent: -5.0, rate: 1.0 / c.r_closed, provenance: Provenance::ClosedForm }
        }
        Family::CanonicalSkeleton => {
            let c = asymptotics::skeleton_constants()?;
            AsymptoticEstimate { constant: c.c_prime, exponent: -5.0, rate: 1.0 / c.eta.gamma, provenance: Provenance::ClosedForm }
        }
        Family::Matchings if cfg.params.k.unwrap_or(3) == 3 => AsymptoticEstimate {
            constant: 24.0 / std::f64::consts::PI,
            exponent: -5.0,
            rate: 16.0,
            provenance: Provenance::ClosedForm,
        },
        _ => return Err(Failure::usage("ratios are available for skeleton-matching, canonical-skeleton and matchings with k=3")),
    };
    let counts = cached_family(cfg, family, order)?.counts()?;
    let ns: Vec<usize> = (1..=order).collect();
    let table = asymptotics::empirical_ratio(&counts, &est, &ns)?;
    Ok(match cfg.format {
        Format::Csv => {
            let mut s = String::from("n,ratio,constant\n");
            for (n, r) in &table {
                let _ = writeln!(s, "{n},{r:.12e},{:.12e}", est.constant);
            }
            s
        }
        Format::Json => json!({"family": family.name(), "estimate": est, "ratios": table}).to_string() + "\n",
    })
}

fn cmd_dist(cfg: &RunConfig) -> CliResult<Report> {
    let n = cfg.n.ok_or_else(|| Failure::usage("--n is required"))?;
    let d = arcstats::arc_distribution(n)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let dist_path = dir.join(format!("dist_n{n}.csv"));
    std::fs::write(&dist_path, d.to_csv())?;
    if d.is_empty() {
        let body = match cfg.format {
            Format::Csv => format!("n,total\n{n},0\n"),
            Format::Json => json!({"n": n, "total": "0", "empty": true}).to_string() + "\n",
        };
        let summary = format!("n={n}: no canonical skeleton diagrams; wrote {}\n", dist_path.display());
        return Ok(Report { body, summary, code: EXIT_OK, file_output: false });
    }
    let m = arcstats::exact_moments(&d)?;
    let (mean, var) = (m.mean_f64(), m.variance_f64());
    let nf = n as f64;
    let p = asymptotics::clt_params()?;
    let overlay = match arcstats::normal_overlay_compare(&d, p.mu, p.sigma2) {
        Ok(o) => {
            let path = dir.join(format!("overlay_n{n}.csv"));
            std::fs::write(&path, o.to_csv())?;
            Some((o.sup_distance, path))
        }
        Err(Error::Degenerate) => None,
        Err(e) => return Err(e.into()),
    };
    let sup = overlay.as_ref().map(|o| o.0);
    let body = match cfg.format {
        Format::Csv => format!(
            "n,total,mean_over_n,variance_over_n,mu,sigma2,sup_distance\n{n},{},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
            d.total,
            mean / nf,
            var / nf,
            p.mu,
            p.sigma2,
            sup.map(|s| format!("{s:.6e}")).unwrap_or_default()
        ),
        Format::Json => json!({
            "n": n, "total": d.total.to_string(),
            "mean": rational::format(&m.mean), "variance": rational::format(&m.variance),
            "mean_over_n": mean / nf, "variance_over_n": var / nf,
            "mu": p.mu, "sigma2": p.sigma2, "sup_distance": sup,
        })
        .to_string()
            + "\n",
    };
    let mut summary = format!("n={n}: mean/n={:.6} variance/n={:.6}; wrote {}", mean / nf, var / nf, dist_path.display());
    match &overlay {
        Some((_, path)) => {
            let _ = write!(summary, " and {}", path.display());
        }
        None => summary.push_str("; single-point distribution, no overlay"),
    }
    summary.push('\n');
    Ok(Report { body, summary, code: EXIT_OK, file_output: false })
}
