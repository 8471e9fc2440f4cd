//! The `hfsurg` command line.
//!
//! Every command renders into a string; `main.rs` decides where it goes.
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or contract error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::knots::{self, KnotSpec};
use crate::lens::LensSpace;
use crate::matcher::{self, MatchResult, SearchOptions, DEFAULT_CEILING};
use crate::numtheory::{gcd, Rational};
use crate::spaceform::{self, Sign};

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable capping the largest `p` for which per-filling
/// lookup tables are built during a search.
pub const CACHE_CAP_ENV: &str = "HFSURG_CACHE_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hfsurg", version, about = "Exact correction terms and the half-integral finite surgery search")]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with defaults for search options; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Parser)]
pub struct SearchArgs {
    #[arg(long)]
    pub p_min: Option<i64>,
    #[arg(long)]
    pub p_max: Option<i64>,
    /// Try every multiplier instead of only those near mp/6.
    #[arg(long)]
    pub no_prune: bool,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Refuse ranges with p above this.
    #[arg(long)]
    pub ceiling: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correction terms of the lens space L(p,q).
    LensD { p: i64, q: i64, i: Option<i64> },
    /// Correction terms of the trefoil filling T(p/q).
    TrefoilD {
        p: i64,
        q: i64,
        i: Option<i64>,
        /// Reverse orientation.
        #[arg(long)]
        negate: bool,
    },
    /// Correction terms of p/q surgery on an L-space knot, e.g. "T(5,2)" 17/2.
    KnotD { knot: String, slope: String, i: Option<i64> },
    /// Search trefoil fillings for half-integral surgery matches.
    Search(SearchArgs),
    /// Check the search against the known table of half-integral finite surgeries.
    VerifyTable {
        #[command(flatten)]
        search: SearchArgs,
        /// Remove a knot from the identification catalog (negative control).
        #[arg(long, hide = true)]
        drop_catalog_entry: Vec<String>,
    },
    /// Check the Ak+B+C_k identity on seeded random inputs.
    Lemma43 {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        p_max: i64,
    },
    /// The rigorous search bound 192 r (36 r + 2)^2 for r in {3, 5}.
    Bound { r: i64 },
}

/// Optional defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub p_min: Option<i64>,
    pub p_max: Option<i64>,
    pub prune: Option<bool>,
    pub jobs: Option<usize>,
    pub ceiling: Option<i64>,
    pub format: Option<Format>,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(msg: impl std::fmt::Display) -> Outcome {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

#[derive(Serialize)]
struct OutputRecord<'a, T: Serialize> {
    schema_version: &'a str,
    command: &'a str,
    payload: T,
}

fn record<T: Serialize>(command: &str, payload: T) -> String {
    let rec = OutputRecord { schema_version: SCHEMA_VERSION, command, payload };
    serde_json::to_string(&rec).expect("records serialize") + "\n"
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let config = match &cli.config {
        Some(path) => match load_config(path) {
            Ok(c) => c,
            Err(e) => return Outcome::usage(e),
        },
        None => Config::default(),
    };
    let format = cli.format.or(config.format).unwrap_or(Format::Table);
    match &cli.command {
        Command::LensD { p, q, i } => cmd_lens_d(*p, *q, *i, format),
        Command::TrefoilD { p, q, i, negate } => cmd_trefoil_d(*p, *q, *i, *negate, format),
        Command::KnotD { knot, slope, i } => cmd_knot_d(knot, slope, *i, format),
        Command::Search(args) => match search_options(args, &config) {
            Ok((lo, hi, opts)) => cmd_search(lo, hi, &opts, format),
            Err(e) => Outcome::usage(e),
        },
        Command::VerifyTable { search, drop_catalog_entry } => {
            let (lo, hi, mut opts) = match search_options(search, &config) {
                Ok(v) => v,
                Err(e) => return Outcome::usage(e),
            };
            for name in drop_catalog_entry {
                match name.parse::<KnotSpec>() {
                    Ok(k) => opts.catalog.retain(|c| *c != k),
                    Err(e) => return Outcome::usage(e),
                }
            }
            cmd_verify_table(lo, hi, &opts, format)
        }
        Command::Lemma43 { samples, seed, p_max } => cmd_lemma43(*samples, *seed, *p_max, format),
        Command::Bound { r } => cmd_bound(*r, format),
    }
}

/// Entry point for the binary: runs, writes output, returns the exit code.
pub fn main() -> i32 {
    let cli_out = std::env::args().collect::<Vec<_>>();
    let outcome = run(cli_out.clone());
    let out_path = Cli::try_parse_from(cli_out).ok().and_then(|c| c.out);
    match out_path {
        Some(path) if outcome.code != EXIT_USAGE => {
            if let Err(e) = std::fs::write(&path, &outcome.stdout) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        _ => print!("{}", outcome.stdout),
    }
    eprint!("{}", outcome.stderr);
    outcome.code
}

fn load_config(path: &PathBuf) -> Result<Config, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn cache_cap_from_env() -> Result<i64, String> {
    match std::env::var(CACHE_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{CACHE_CAP_ENV} must be an integer, got {v:?}")),
        Err(_) => Ok(i64::MAX),
    }
}

fn search_options(args: &SearchArgs, config: &Config) -> Result<(i64, i64, SearchOptions), String> {
    let opts = SearchOptions {
        prune: if args.no_prune { false } else { config.prune.unwrap_or(true) },
        jobs: args.jobs.or(config.jobs).unwrap_or(1).max(1),
        ceiling: args.ceiling.or(config.ceiling).unwrap_or(DEFAULT_CEILING),
        cache_cap: cache_cap_from_env()?,
        catalog: knots::catalog(),
    };
    let lo = args.p_min.or(config.p_min).unwrap_or(1);
    let hi = args.p_max.or(config.p_max).unwrap_or(opts.ceiling);
    if lo < 1 || lo > hi {
        return Err(format!("need 1 <= p-min <= p-max (got {lo}, {hi})"));
    }
    if hi > opts.ceiling {
        return Err(format!("p-max {hi} exceeds ceiling {}; pass --ceiling to raise it", opts.ceiling));
    }
    Ok((lo, hi, opts))
}

fn render_values(cmd: &str, indices: &[i64], values: &[Rational], extra: serde_json::Value, format: Format) -> String {
    match format {
        Format::Table => {
            let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            parts.join(" ") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("i,d\n");
            for (i, v) in indices.iter().zip(values) {
                let _ = writeln!(s, "{i},{v}");
            }
            s
        }
        Format::Json => {
            let mut payload = extra;
            payload["indices"] = json!(indices);
            payload["values"] = json!(values);
            record(cmd, payload)
        }
    }
}

pub fn cmd_lens_d(p: i64, q: i64, i: Option<i64>, format: Format) -> Outcome {
    let l = match LensSpace::new(p, q) {
        Ok(l) => l,
        Err(e) => return Outcome::usage(e),
    };
    let indices: Vec<i64> = match i {
        Some(i) => vec![i],
        None => (0..p).collect(),
    };
    let mut values = Vec::new();
    for &i in &indices {
        match l.d(i) {
            Ok(v) => values.push(v),
            Err(e) => return Outcome::usage(e),
        }
    }
    Outcome::ok(render_values("lens-d", &indices, &values, json!({"p": p, "q": q}), format))
}

pub fn cmd_trefoil_d(p: i64, q: i64, i: Option<i64>, negate: bool, format: Format) -> Outcome {
    let indices: Vec<i64> = match i {
        Some(i) => vec![i],
        None => (0..p.max(0)).collect(),
    };
    let mut values = Vec::new();
    for &i in &indices {
        match spaceform::d_trefoil(p, q, i) {
            Ok(v) => values.push(if negate { -v } else { v }),
            Err(e) => return Outcome::usage(e),
        }
    }
    let sign = if negate { -1 } else { 1 };
    Outcome::ok(render_values("trefoil-d", &indices, &values, json!({"p": p, "q": q, "sign": sign}), format))
}

fn parse_slope(s: &str) -> Result<(i64, i64), String> {
    let bad = || format!("slope must be p/q with coprime positive p, q (got {s:?})");
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1),
    };
    if p <= 0 || q <= 0 || gcd(p, q) != 1 {
        return Err(bad());
    }
    Ok((p, q))
}

pub fn cmd_knot_d(knot: &str, slope: &str, i: Option<i64>, format: Format) -> Outcome {
    let spec: KnotSpec = match knot.parse() {
        Ok(k) => k,
        Err(e) => return Outcome::usage(e),
    };
    let (p, q) = match parse_slope(slope) {
        Ok(v) => v,
        Err(e) => return Outcome::usage(e),
    };
    let t = match spec.torsion() {
        Ok(t) => t,
        Err(e) => return Outcome::usage(e),
    };
    let indices: Vec<i64> = match i {
        Some(i) => vec![i],
        None => (0..p).collect(),
    };
    let mut values = Vec::new();
    for &i in &indices {
        match knots::d_surgery(&t, p, q, i) {
            Ok(v) => values.push(v),
            Err(e) => return Outcome::usage(e),
        }
    }
    let mut out = Outcome::ok(render_values(
        "knot-d",
        &indices,
        &values,
        json!({"knot": spec.to_string(), "p": p, "q": q, "tseq": t}),
        format,
    ));
    if p < (2 * spec.genus() - 1) * q {
        out.stderr =
            format!("warning: {p}/{q} < 2g-1 = {}; the formula assumes an L-space surgery\n", 2 * spec.genus() - 1);
    }
    out
}

#[derive(Serialize)]
struct MatchRecord {
    knot: String,
    slope: String,
    target: String,
    p: i64,
    q: i64,
    eps: i64,
    zeta: i64,
    r: i64,
    tseq: Vec<i64>,
    alexander: Vec<i64>,
    witnesses: Vec<i64>,
}

impl From<&MatchResult> for MatchRecord {
    fn from(m: &MatchResult) -> Self {
        MatchRecord {
            knot: m.knot_label(),
            slope: m.slope(),
            target: m.target(),
            p: m.p(),
            q: m.q(),
            eps: m.eps.value(),
            zeta: m.filling.zeta.value(),
            r: m.filling.r,
            tseq: m.tseq.values().to_vec(),
            alexander: m.alex.laurent(),
            witnesses: m.witnesses.clone(),
        }
    }
}

fn join<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn render_matches(cmd: &str, results: &[MatchResult], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Table => {
            let _ = writeln!(s, "{:<14} {:<8} {:<12} {:<22} witnesses a", "knot", "slope", "manifold", "t-sequence");
            for m in results {
                let _ = writeln!(
                    s,
                    "{:<14} {:<8} {:<12} {:<22} {}",
                    m.knot_label(),
                    m.slope(),
                    m.target(),
                    m.tseq.to_string(),
                    join(&m.witnesses, " ")
                );
            }
        }
        Format::Csv => {
            s.push_str("knot,slope,p,q,eps,target,tseq,alexander,witnesses\n");
            for m in results {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    m.knot_label(),
                    m.slope(),
                    m.p(),
                    m.q(),
                    m.eps.value(),
                    m.target(),
                    join(m.tseq.values(), " "),
                    join(&m.alex.laurent(), " "),
                    join(&m.witnesses, " ")
                );
            }
        }
        Format::Json => {
            for m in results {
                s.push_str(&record(cmd, MatchRecord::from(m)));
            }
        }
    }
    s
}

pub fn cmd_search(p_min: i64, p_max: i64, opts: &SearchOptions, format: Format) -> Outcome {
    match matcher::run_search(p_min, p_max, opts) {
        Ok(results) => Outcome::ok(render_matches("search", &results, format)),
        Err(e) => Outcome::usage(e),
    }
}

/// One row of the half-integral finite surgery table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TableRow {
    pub p: i64,
    pub q: i64,
    pub eps: i64,
    pub knot: String,
}

impl TableRow {
    fn new(knot: &str, p: i64, q: i64, eps: i64) -> TableRow {
        TableRow { p, q, eps, knot: knot.to_string() }
    }

    pub fn target(&self) -> String {
        format!("{}𝕋({}/{})", if self.eps < 0 { "-" } else { "" }, self.p, self.q)
    }
}

impl std::fmt::Display for TableRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:<14} {:<8} {}", self.knot, format!("{}/2", self.p), self.target())
    }
}

/// The trefoil at 7/2 plus the ten known half-integral finite surgeries.
pub fn expected_table() -> Vec<TableRow> {
    vec![
        TableRow::new("T(3,2)", 7, 2, 1),
        TableRow::new("T(5,2)", 17, 2, -1),
        TableRow::new("T(5,2)", 23, 3, 1),
        TableRow::new("[11,2;3,2]", 43, 8, 1),
        TableRow::new("[11,2;3,2]", 45, 8, 1),
        TableRow::new("[13,2;3,2]", 51, 8, 1),
        TableRow::new("[13,2;3,2]", 53, 8, 1),
        TableRow::new("[19,2;5,2]", 77, 12, -1),
        TableRow::new("[21,2;5,2]", 83, 13, 1),
        TableRow::new("[17,3;3,2]", 103, 18, 1),
        TableRow::new("[19,3;3,2]", 113, 18, 1),
    ]
}

/// Collapses matches that share a slope and torsion sequence but land on
/// different fillings: those fillings are one manifold described twice
/// (e.g. `𝕋(45/8)` and `-𝕋(45/7)`). The representative prefers `eps = +1`,
/// then the larger `q`; the others are returned as aliases.
pub fn rows_of(results: &[MatchResult]) -> Vec<(TableRow, Vec<String>)> {
    let mut groups: BTreeMap<(i64, String, Vec<i64>), Vec<&MatchResult>> = BTreeMap::new();
    for m in results {
        groups.entry((m.p(), m.knot_label(), m.tseq.values().to_vec())).or_default().push(m);
    }
    groups
        .into_values()
        .map(|mut ms| {
            ms.sort_by_key(|m| (m.eps != Sign::Plus, std::cmp::Reverse(m.q())));
            let rep = ms[0];
            let row = TableRow { p: rep.p(), q: rep.q(), eps: rep.eps.value(), knot: rep.knot_label() };
            (row, ms[1..].iter().map(|m| m.target()).collect())
        })
        .collect()
}

fn trefoil_note(row: &TableRow) -> &'static str {
    if row.knot == "T(3,2)" && row.q == 2 && row.eps == 1 {
        "  [p/2 surgery on T(3,2) is 𝕋(p/2) by definition]"
    } else {
        ""
    }
}

/// Rows expected but not found, and rows found but not expected.
pub fn table_diff(found: &[TableRow], expected: &[TableRow]) -> (Vec<TableRow>, Vec<TableRow>) {
    let f: BTreeSet<&TableRow> = found.iter().collect();
    let e: BTreeSet<&TableRow> = expected.iter().collect();
    let missing = e.difference(&f).map(|r| (*r).clone()).collect();
    let extra = f.difference(&e).map(|r| (*r).clone()).collect();
    (missing, extra)
}

pub fn cmd_verify_table(p_min: i64, p_max: i64, opts: &SearchOptions, format: Format) -> Outcome {
    let results = match matcher::run_search(p_min, p_max, opts) {
        Ok(r) => r,
        Err(e) => return Outcome::usage(e),
    };
    let canonical = rows_of(&results);
    let found: Vec<TableRow> = canonical.iter().map(|(r, _)| r.clone()).collect();
    let expected: Vec<TableRow> = expected_table().into_iter().filter(|r| (p_min..=p_max).contains(&r.p)).collect();
    let (missing, extra) = table_diff(&found, &expected);
    let partial = p_min > 1 || p_max < expected_table().iter().map(|r| r.p).max().unwrap_or(0);
    let ok = missing.is_empty() && extra.is_empty();
    let mut s = String::new();
    match format {
        Format::Json => {
            s = record(
                "verify-table",
                json!({
                    "p_min": p_min,
                    "p_max": p_max,
                    "partial": partial,
                    "ok": ok,
                    "rows": canonical
                        .iter()
                        .map(|(r, aliases)| json!({"row": r, "target": r.target(), "aliases": aliases}))
                        .collect::<Vec<_>>(),
                    "missing": missing,
                    "unexpected": extra,
                }),
            );
        }
        Format::Table | Format::Csv => {
            if format == Format::Csv {
                s.push_str("knot,slope,target\n");
                for r in &found {
                    let _ = writeln!(s, "{},{}/2,{}", r.knot, r.p, r.target());
                }
            } else {
                let _ = writeln!(s, "{:<14} {:<8} manifold", "knot", "slope");
                for (r, aliases) in &canonical {
                    if aliases.is_empty() {
                        let _ = writeln!(s, "{r}");
                    } else {
                        let _ = writeln!(s, "{r}  (also {})", aliases.join(", "));
                    }
                }
            }
            for r in &missing {
                let _ = writeln!(s, "- missing    {r}");
            }
            for r in &extra {
                let _ = writeln!(s, "+ unexpected {r}{}", trefoil_note(r));
            }
            let scope = if partial { format!(" (partial: p in [{p_min}, {p_max}])") } else { String::new() };
            let verdict = if ok { "OK" } else { "MISMATCH" };
            let _ = writeln!(s, "{verdict}: {} rows{scope}", found.len());
        }
    }
    Outcome { code: if ok { EXIT_OK } else { EXIT_MISMATCH }, stdout: s, stderr: String::new() }
}

pub fn cmd_lemma43(samples: usize, seed: u64, p_max: i64, format: Format) -> Outcome {
    let tuples = matcher::sample_lemma43_tuples(samples, seed, p_max);
    if samples > 0 && tuples.is_empty() {
        return Outcome::usage(format!("no filling with p <= {p_max} admits any k"));
    }
    let mut failures = Vec::new();
    for t in &tuples {
        if let Err(e) = matcher::lemma43_check(t.p, t.q, t.eps, t.a, t.k) {
            failures.push((t, e.to_string()));
        }
    }
    let ok = failures.is_empty();
    let s = match format {
        Format::Json => record(
            "lemma43",
            json!({
                "samples": tuples.len(),
                "seed": seed,
                "p_max": p_max,
                "holds": tuples.len() - failures.len(),
                "failures": failures.iter().map(|(t, e)| json!({"tuple": t, "error": e})).collect::<Vec<_>>(),
            }),
        ),
        _ => {
            let mut s = String::new();
            for (t, e) in &failures {
                let _ = writeln!(s, "FAIL p={} q={} eps={} a={} k={}: {e}", t.p, t.q, t.eps.value(), t.a, t.k);
            }
            let _ = writeln!(
                s,
                "{}/{} identities hold (seed {seed}, p <= {p_max})",
                tuples.len() - failures.len(),
                tuples.len()
            );
            s
        }
    };
    Outcome { code: if ok { EXIT_OK } else { EXIT_MISMATCH }, stdout: s, stderr: String::new() }
}

pub fn cmd_bound(r: i64, format: Format) -> Outcome {
    match matcher::prop41_bound(r) {
        Ok(b) => Outcome::ok(match format {
            Format::Json => record("bound", json!({"r": r, "bound": b, "default_ceiling": DEFAULT_CEILING})),
            _ => format!("{b}\n"),
        }),
        Err(e) => Outcome::usage(e),
    }
}
