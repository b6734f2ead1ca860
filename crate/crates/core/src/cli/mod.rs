//! The `help` command-line tool.
//!
//! Exit codes: 0 on a complete run, 2 for invalid input, 3 when an
//! enumeration was capped, 4 when an internal invariant failed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use thiserror::Error;

use crate::chartab::{bundled, load_fusion, load_table_file, CharacterTable, ClassFusion, TableError};
use crate::helpcore::{candidate_classes, multiplicity_form, BrauerSelection, CharRef, PAVector, PowerChain};
use crate::intsolve::{SolveError, SolverConfig};
use crate::numtheory::{divisors, is_prime};
use crate::verdicts::report::{from_json, pa_doc, to_doc, to_json, OptionsDoc};
use crate::verdicts::{eigenvalue_profile, run_check, CheckOptions, GroupReport, QuotientData, Status, VerdictError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_CAPPED: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "help", version, about = "Exact HeLP enumeration for torsion units of integral group rings")]
pub struct Cli {
    /// Worker threads for the solver (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate surviving partial augmentations and report the verdicts.
    Check(CheckArgs),
    /// Print eigenvalue multiplicities of a unit with given partial augmentations.
    Eigenvalues(EigenArgs),
    /// Validate character table files (the bundled corpus when none are given).
    Validate(ValidateArgs),
    /// List the bundled tables and fusions.
    List,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct ConstraintArgs {
    /// Bundled table name (e.g. S6, PSL27) or path to a table file.
    #[arg(long)]
    pub table: String,
    /// Drop the congruence constraints.
    #[arg(long)]
    pub no_congruences: bool,
    /// Drop the a priori bounds derived from nonnegative multiplicities.
    #[arg(long)]
    pub no_eigen_bounds: bool,
    /// Brauer tables to use: `all`, `none` or a comma-separated list of primes.
    #[arg(long, default_value = "all")]
    pub brauer: String,
    /// Node cap per solve.
    #[arg(long, default_value_t = SolverConfig::default().node_cap)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub constraints: ConstraintArgs,
    /// Comma-separated unit orders (default: every divisor of the exponent).
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<u64>>,
    /// Class fusion onto a quotient: bundled fusion name or file.
    #[arg(long)]
    pub fusion: Option<String>,
    /// Report of a previous `check` on the quotient table; required with `--fusion`.
    #[arg(long)]
    pub quotient_report: Option<PathBuf>,
    /// Quotient table (default: the bundled table named by the fusion).
    #[arg(long)]
    pub quotient_table: Option<String>,
    /// Use the p-part restriction; needs `--fusion` onto a quotient by a p-group.
    #[arg(long)]
    pub p_part: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub constraints: ConstraintArgs,
    #[arg(long)]
    pub order: u64,
    /// Partial augmentations of `u`: integers in the order of the classes whose
    /// element order divides `--order` (identity excluded), or `class=value` pairs.
    #[arg(long, allow_hyphen_values = true)]
    pub tuple: String,
    /// Partial augmentations of a power, as `e:tuple` for the power of order `e`.
    #[arg(long = "power", allow_hyphen_values = true)]
    pub powers: Vec<String>,
    /// Print multiplicities even if the tuple is not a survivor.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub paths: Vec<PathBuf>,
    /// Check that a report file parses against `--table` instead.
    #[arg(long, requires = "table")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub table: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Verdict(#[from] VerdictError),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("enumeration capped; the report is incomplete")]
    Capped,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Table(_) | CliError::Write { .. } => EXIT_INVALID,
            CliError::Capped => EXIT_CAPPED,
            CliError::Verdict(e) => match e {
                VerdictError::Invariant(_) | VerdictError::Solve(SolveError::Verification(_)) => EXIT_INVARIANT,
                VerdictError::Solve(_) => EXIT_CAPPED,
                _ => EXIT_INVALID,
            },
        }
    }
}

/// Bundled name, or a path when the argument names an existing file or looks like one.
pub fn resolve_table(spec: &str) -> Result<CharacterTable, CliError> {
    let path = Path::new(spec);
    if path.exists() || spec.ends_with(".json") || spec.contains(std::path::MAIN_SEPARATOR) {
        return Ok(load_table_file(path)?);
    }
    bundled::table(spec).map_err(|_| {
        let names: Vec<&str> = bundled::names().collect();
        CliError::Usage(format!("no table file or bundled table named {spec:?} (bundled: {})", names.join(", ")))
    })
}

fn parse_brauer(spec: &str) -> Result<BrauerSelection, CliError> {
    match spec {
        "all" => Ok(BrauerSelection::All),
        "none" => Ok(BrauerSelection::None),
        s => {
            let mut primes = Vec::new();
            for part in s.split(',') {
                let p: u64 = part.trim().parse().map_err(|_| CliError::Usage(format!("bad --brauer value {s:?}")))?;
                if !is_prime(p) {
                    return Err(CliError::Usage(format!("--brauer: {p} is not a prime")));
                }
                primes.push(p);
            }
            Ok(BrauerSelection::Primes(primes))
        }
    }
}

fn brauer_label(b: &BrauerSelection) -> String {
    match b {
        BrauerSelection::All => "all".into(),
        BrauerSelection::None => "none".into(),
        BrauerSelection::Primes(ps) => ps.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
    }
}

fn check_options(table: &CharacterTable, a: &ConstraintArgs) -> Result<CheckOptions, CliError> {
    let brauer = parse_brauer(&a.brauer)?;
    if let BrauerSelection::Primes(ps) = &brauer {
        if let Some(p) = ps.iter().find(|p| !table.brauer.contains_key(p)) {
            return Err(CliError::Usage(format!("{} has no {p}-modular table", table.group_name)));
        }
    }
    if a.cap == 0 {
        return Err(CliError::Usage("--cap must be positive".into()));
    }
    Ok(CheckOptions {
        congruences: !a.no_congruences,
        brauer,
        eigen_bounds: !a.no_eigen_bounds,
        solver: SolverConfig { node_cap: a.cap, ..SolverConfig::default() },
        quotient: None,
        p_part: None,
    })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_quotient(table: &Arc<CharacterTable>, args: &CheckArgs) -> Result<Option<QuotientData>, CliError> {
    let Some(spec) = &args.fusion else {
        if args.quotient_report.is_some() || args.quotient_table.is_some() {
            return Err(CliError::Usage("--quotient-report and --quotient-table need --fusion".into()));
        }
        if args.p_part.is_some() {
            return Err(CliError::Usage("--p-part needs --fusion and --quotient-report".into()));
        }
        return Ok(None);
    };
    let document = match bundled::fusion_document(spec) {
        Some(d) if !Path::new(spec).exists() => d.to_string(),
        _ => read_text(Path::new(spec))?,
    };
    let target_name = serde_json::from_str::<serde_json::Value>(&document)
        .map_err(TableError::from)?
        .get("target")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::Usage(format!("fusion {spec} names no target")))?;
    let target = match &args.quotient_table {
        Some(t) => resolve_table(t)?,
        None => bundled::table(&target_name)
            .map_err(|_| CliError::Usage(format!("quotient {target_name} is not bundled; pass --quotient-table")))?,
    };
    let fusion: ClassFusion = load_fusion(&document, table.clone(), Arc::new(target))?;
    let report_path = args
        .quotient_report
        .as_ref()
        .ok_or_else(|| CliError::Usage("--fusion needs --quotient-report with a check report of the quotient".into()))?;
    let (_, orders) = from_json(&fusion.target, &read_text(report_path)?)?;
    if let Some(r) = orders.values().find(|r| !r.complete()) {
        return Err(CliError::Usage(format!("quotient report is incomplete at order {}", r.order)));
    }
    if let Some(p) = args.p_part {
        if fusion.kernel_p_group != Some(p) {
            return Err(CliError::Usage(format!("--p-part {p}: the fusion kernel is not declared a {p}-group")));
        }
    }
    let survivors = orders.into_iter().map(|(n, r)| (n, r.tops().cloned().collect())).collect();
    Ok(Some(QuotientData { fusion, survivors }))
}

fn status_line<K: std::fmt::Debug>(label: &str, s: &Status<K>, show: impl Fn(&K) -> String) -> String {
    match s {
        Status::Proved => format!("{label}: proved"),
        Status::Open { offending, unexamined } => {
            let list = |v: &[K]| v.iter().map(&show).collect::<Vec<_>>().join(", ");
            let mut out = format!("{label}: open");
            if !offending.is_empty() {
                write!(out, "; survivors or capped at {}", list(offending)).unwrap();
            }
            if !unexamined.is_empty() {
                write!(out, "; not examined: {}", list(unexamined)).unwrap();
            }
            out
        }
    }
}

fn pa_text(table: &CharacterTable, v: &PAVector) -> String {
    let doc = pa_doc(table, v);
    if doc.is_empty() {
        return "0".into();
    }
    doc.iter().map(|(c, e)| format!("{c}:{e}")).collect::<Vec<_>>().join(" ")
}

fn chain_text(table: &CharacterTable, chain: &PowerChain) -> String {
    let mut s = chain.top().map(|v| pa_text(table, v)).unwrap_or_default();
    let powers: Vec<String> = chain
        .levels
        .iter()
        .filter(|(&e, _)| e < chain.order)
        .map(|(e, v)| format!("[{e}] {}", pa_text(table, v)))
        .collect();
    if !powers.is_empty() {
        write!(s, "  powers {}", powers.join(" ")).unwrap();
    }
    s
}

pub fn render_text(table: &CharacterTable, report: &GroupReport, options: &OptionsDoc) -> String {
    let mut out = String::new();
    writeln!(out, "group {} (order {}, exponent {})", table.group_name, table.order, table.exponent).unwrap();
    writeln!(
        out,
        "options: congruences {}, brauer {}, eigen bounds {}, node cap {}",
        if options.congruences { "on" } else { "off" },
        options.brauer,
        if options.eigen_bounds { "on" } else { "off" },
        options.node_cap
    )
    .unwrap();
    if let Some(f) = &options.fusion {
        writeln!(out, "quotient: {f}{}", options.p_part.map(|p| format!(", {p}-part")).unwrap_or_default()).unwrap();
    }
    for r in report.orders.values() {
        let nontrivial: Vec<&PowerChain> = r.nontrivial(table).collect();
        writeln!(
            out,
            "order {}: {} survivors, {} nontrivial; {} chains, {} nodes, {}",
            r.order,
            r.survivors.len(),
            nontrivial.len(),
            r.chains_examined,
            r.node_count,
            serde_json::to_value(r.completeness).unwrap().as_str().unwrap_or("?")
        )
        .unwrap();
        for c in nontrivial {
            writeln!(out, "  {}", chain_text(table, c)).unwrap();
        }
    }
    let v = &report.verdict;
    writeln!(out, "{}", status_line("zc1", &v.zc1_by_help, u64::to_string)).unwrap();
    writeln!(out, "{}", status_line("sipc", &v.sipc, u64::to_string)).unwrap();
    writeln!(out, "{}", status_line("pq", &v.pq, |(p, q)| format!("{p}-{q}"))).unwrap();
    let edges = |e: &[(u64, u64)]| {
        if e.is_empty() {
            "none".to_string()
        } else {
            e.iter().map(|(p, q)| format!("{p}-{q}")).collect::<Vec<_>>().join(" ")
        }
    };
    writeln!(out, "prime graph: group {}; units {}", edges(&v.prime_graph.group_edges), edges(&v.prime_graph.unit_edges))
        .unwrap();
    let flagged: Vec<String> = v
        .kernel_findings
        .iter()
        .filter(|k| k.flagged > 0)
        .map(|k| format!("{} at {} ({})", k.character, k.prime, k.flagged))
        .collect();
    writeln!(out, "kernel survivors: {}", if flagged.is_empty() { "none".into() } else { flagged.join(", ") }).unwrap();
    out
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.into(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_check(args: &CheckArgs) -> Result<(), CliError> {
    let table = Arc::new(resolve_table(&args.constraints.table)?);
    let mut opts = check_options(&table, &args.constraints)?;
    opts.quotient = load_quotient(&table, args)?;
    opts.p_part = args.p_part;
    if let Some(orders) = &args.orders {
        if let Some(&n) = orders.iter().find(|&&n| n < 2) {
            return Err(CliError::Usage(format!("--orders: {n} is not a unit order to examine")));
        }
    }
    let report = run_check(&table, args.orders.as_deref(), &opts)?;
    let options = OptionsDoc {
        congruences: opts.congruences,
        brauer: brauer_label(&opts.brauer),
        eigen_bounds: opts.eigen_bounds,
        node_cap: opts.solver.node_cap,
        fallback_bound: opts.solver.fallback_bound,
        fusion: args.fusion.clone(),
        p_part: args.p_part,
    };
    let text = match args.format {
        Format::Text => render_text(&table, &report, &options),
        Format::Json => to_json(&to_doc(&table, &report, options)),
    };
    emit(&text, args.out.as_deref())?;
    if report.complete() {
        Ok(())
    } else {
        Err(CliError::Capped)
    }
}

/// Parses a tuple for order `n`: plain integers by candidate class, or
/// `class=value` pairs.
pub fn parse_tuple(table: &CharacterTable, n: u64, spec: &str) -> Result<PAVector, CliError> {
    let classes = candidate_classes(table, n);
    let parts: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let bad = |m: String| CliError::Usage(format!("tuple {spec:?} for order {n}: {m}"));
    let mut entries = Vec::new();
    if parts.iter().all(|p| p.contains('=')) && !parts.is_empty() {
        for p in parts {
            let (name, value) = p.split_once('=').expect("checked");
            let c = table.class_index(name.trim()).ok_or_else(|| bad(format!("unknown class {name}")))?;
            if !classes.contains(&c) {
                return Err(bad(format!("class {name} has order not dividing {n}")));
            }
            let e: i64 = value.trim().parse().map_err(|_| bad(format!("bad value {value}")))?;
            entries.push((c, e));
        }
    } else {
        if parts.len() != classes.len() {
            let names: Vec<&str> = classes.iter().map(|&c| table.classes[c].name.as_str()).collect();
            return Err(bad(format!("expected {} values for {}", classes.len(), names.join(","))));
        }
        for (&c, p) in classes.iter().zip(parts) {
            entries.push((c, p.parse().map_err(|_| bad(format!("bad value {p}")))?));
        }
    }
    let v = PAVector::new(n, entries);
    if v.augmentation() != 1 {
        return Err(bad(format!("partial augmentations sum to {}, not 1", v.augmentation())));
    }
    Ok(v)
}

fn parse_powers(table: &CharacterTable, n: u64, specs: &[String]) -> Result<BTreeMap<u64, PAVector>, CliError> {
    let mut out = BTreeMap::new();
    for s in specs {
        let (e, t) = s.split_once(':').ok_or_else(|| CliError::Usage(format!("--power {s:?}: expected e:tuple")))?;
        let e: u64 = e.trim().parse().map_err(|_| CliError::Usage(format!("--power {s:?}: bad order")))?;
        if e < 2 || e >= n || !n.is_multiple_of(e) {
            return Err(CliError::Usage(format!("--power {s:?}: {e} is not a proper divisor of {n} above 1")));
        }
        out.insert(e, parse_tuple(table, e, t)?);
    }
    Ok(out)
}

fn profile_lines(table: &CharacterTable, chain: &PowerChain) -> Result<String, CliError> {
    let mut out = String::new();
    for (i, ch) in table.characters.iter().enumerate() {
        match eigenvalue_profile(table, chain, CharRef::Ordinary(i)) {
            Ok(p) => writeln!(out, "{} {p}", ch.name).unwrap(),
            Err(_) => {
                let x: Vec<BigInt> = match chain.top() {
                    Some(top) => top.values_on(&candidate_classes(table, chain.order)).into_iter().map(BigInt::from).collect(),
                    None => vec![BigInt::from(1)],
                };
                let mut mus = Vec::new();
                for l in 0..chain.order {
                    let f = multiplicity_form(table, CharRef::Ordinary(i), l, chain).map_err(VerdictError::from)?;
                    mus.push(f.evaluate(&x).to_string());
                }
                writeln!(out, "{} not a survivor; multiplicities by l: {}", ch.name, mus.join(",")).unwrap();
            }
        }
    }
    Ok(out)
}

pub fn cmd_eigenvalues(args: &EigenArgs) -> Result<(), CliError> {
    let table = resolve_table(&args.constraints.table)?;
    let n = args.order;
    if n < 2 || table.exponent % n != 0 {
        return Err(CliError::Usage(format!("order {n} must be above 1 and divide the exponent {}", table.exponent)));
    }
    let top = parse_tuple(&table, n, &args.tuple)?;
    let powers = parse_powers(&table, n, &args.powers)?;
    let opts = check_options(&table, &args.constraints)?;
    let report = run_check(&table, Some(&[n]), &opts)?;
    let matches: Vec<&PowerChain> = report.orders[&n]
        .survivors
        .iter()
        .filter(|c| c.top() == Some(&top) && powers.iter().all(|(e, v)| c.level(*e) == Some(v)))
        .collect();
    let mut out = String::new();
    if matches.is_empty() {
        if !args.force {
            return Err(CliError::Usage(format!(
                "{} is not a survivor at order {n}; pass --force to print anyway",
                pa_text(&table, &top)
            )));
        }
        let mut chain = PowerChain::new(n);
        for e in divisors(n).into_iter().filter(|&e| e > 1 && e < n) {
            let v = powers
                .get(&e)
                .ok_or_else(|| CliError::Usage(format!("--force at order {n} needs --power {e}:... for every proper power")))?;
            chain.levels.insert(e, v.clone());
        }
        let chain = chain.with_top(top);
        eprintln!("warning: {} is not a survivor; multiplicities may be meaningless", pa_text(&table, &chain.top().unwrap().clone()));
        writeln!(out, "{} order {n}: {}", table.group_name, chain_text(&table, &chain)).unwrap();
        out.push_str(&profile_lines(&table, &chain)?);
    } else {
        for (k, chain) in matches.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            writeln!(out, "{} order {n}: {}", table.group_name, chain_text(&table, chain)).unwrap();
            out.push_str(&profile_lines(&table, chain)?);
        }
    }
    print!("{out}");
    if report.complete() {
        Ok(())
    } else {
        Err(CliError::Capped)
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    if let Some(path) = &args.report {
        let table = resolve_table(args.table.as_deref().expect("clap requires --table"))?;
        from_json(&table, &read_text(path)?)?;
        println!("ok {} (report for {})", path.display(), table.group_name);
        return Ok(());
    }
    let mut failed = 0;
    if args.paths.is_empty() {
        for name in bundled::names() {
            match bundled::table(name) {
                Ok(t) => println!("ok {name} ({})", t.group_name),
                Err(e) => {
                    eprintln!("FAIL {name}: {e}");
                    failed += 1;
                }
            }
        }
        for name in bundled::fusion_names() {
            match bundled::fusion(name) {
                Ok(_) => println!("ok {name}"),
                Err(e) => {
                    eprintln!("FAIL {name}: {e}");
                    failed += 1;
                }
            }
        }
    }
    for path in &args.paths {
        match load_table_file(path) {
            Ok(t) => println!("ok {} ({})", path.display(), t.group_name),
            Err(e) => {
                eprintln!("FAIL {}: {e}", path.display());
                failed += 1;
            }
        }
    }
    if failed > 0 {
        Err(CliError::Usage(format!("{failed} invalid")))
    } else {
        Ok(())
    }
}

fn cmd_list() {
    for name in bundled::names() {
        if let Ok(t) = bundled::table(name) {
            let brauer: Vec<String> = t.brauer.keys().map(u64::to_string).collect();
            let extra = if brauer.is_empty() { String::new() } else { format!(", Brauer {}", brauer.join(",")) };
            println!("{name}: {} order {}{extra}", t.group_name, t.order);
        }
    }
    for name in bundled::fusion_names() {
        println!("fusion {name}");
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Eigenvalues(a) => cmd_eigenvalues(a),
        Command::Validate(a) => cmd_validate(a),
        Command::List => {
            cmd_list();
            Ok(())
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("help: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
