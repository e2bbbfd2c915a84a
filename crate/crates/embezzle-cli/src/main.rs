//! Command-line front end: reads bipartite state descriptions, runs the
//! catalyst analysis, and emits machine-readable reports.

mod statefile;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use embezzle_core::{
    is_trumped, majorization_violation, majorizes, min_rank_for, run_selftest, sweep_points,
    SelftestConfig, SweepPoint,
};

/// Hard cap on sweep size: past this the output stops being a table any
/// human or plotting script wants, and run times stop being interactive.
const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "embezzle",
    version,
    about = "Analyze the universal embezzling catalyst family against arbitrary target states",
    after_help = "exit codes: 0 success; 1 a computed report violated an internal \
                  invariant (or selftest failed); 2 bad input or environment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact fidelity, trace distance, and every analytic envelope at one catalyst size
    Report(ReportArgs),
    /// The same report across many sizes, written to a CSV or JSON-lines file
    Sweep(SweepArgs),
    /// Decide whether a catalyst unlocks the conversion between two states
    Trump(TrumpArgs),
    /// Re-derive the crate's invariants on freshly drawn random states
    Selftest(SelftestArgs),
    /// Smallest catalyst size that guarantees a requested fidelity
    MinRank(MinRankArgs),
}

#[derive(Args)]
struct ReportArgs {
    /// Catalyst size (number of Schmidt terms), at least 2
    #[arg(long)]
    n: u64,
    /// Path to the target state file (JSON)
    #[arg(long)]
    target: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Path to the target state file (JSON)
    #[arg(long)]
    target: PathBuf,
    /// Explicit catalyst sizes (comma-separated or repeated); sorted and
    /// deduplicated before the run
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// First size of a geometric grid (needs --n-factor and --n-count)
    #[arg(long)]
    n_start: Option<u64>,
    /// Multiplier between successive grid sizes, above 1
    #[arg(long)]
    n_factor: Option<f64>,
    /// Number of grid sizes
    #[arg(long)]
    n_count: Option<u32>,
    /// Output file path (written atomically)
    #[arg(long)]
    out: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct TrumpArgs {
    /// State to convert from
    #[arg(long)]
    x: PathBuf,
    /// State to convert to
    #[arg(long)]
    y: PathBuf,
    /// Catalyst state, borrowed and returned intact
    #[arg(long)]
    catalyst: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the random-state generator (default: the built-in seed)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct MinRankArgs {
    /// Largest tolerable infidelity, strictly between 0 and 1
    #[arg(long)]
    epsilon: f64,
    /// Schmidt rank of the target state
    #[arg(long)]
    m: u64,
}

#[derive(Debug)]
enum CliError {
    /// Malformed input or a failed environment interaction: exit 2.
    Input(String),
    /// A computed report failed its own consistency checks: exit 1.
    Violation(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Violation(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Violation(_) => 1,
        }
    }
}

fn input_error(e: embezzle_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Report(args) => cmd_report(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Trump(args) => cmd_trump(args),
        Command::Selftest(args) => cmd_selftest(args),
        Command::MinRank(args) => cmd_min_rank(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

// ---------------------------------------------------------------- commands

fn cmd_report(args: &ReportArgs) -> Result<i32, CliError> {
    let target = statefile::load_target(&args.target)?;
    let rows = sweep_points(&[args.n], &target).map_err(input_error)?;
    let row = &rows[0];
    println!("{}", render_report_json(row));
    match row {
        SweepPoint::Full(report) => {
            let violations = report.violated_invariants();
            if violations.is_empty() {
                Ok(0)
            } else {
                for v in &violations {
                    eprintln!("invariant violated: {v}");
                }
                Ok(1)
            }
        }
        SweepPoint::BoundsOnly(report) => {
            eprintln!(
                "note: the {} x {} joint spectrum exceeds the walk budget; exact columns are null",
                report.n, report.m
            );
            Ok(0)
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let target = statefile::load_target(&args.target)?;
    let ns = resolve_ns(args)?;
    let rows = sweep_points(&ns, &target).map_err(input_error)?;

    // validate everything before touching the filesystem, so a violation
    // never leaves partial output behind
    let mut violations = Vec::new();
    for row in &rows {
        if let SweepPoint::Full(report) = row {
            for v in report.violated_invariants() {
                violations.push(format!("n={}: {v}", report.n));
            }
        }
    }
    if !violations.is_empty() {
        return Err(CliError::Violation(violations.join("; ")));
    }

    let contents = match args.format {
        OutputFormat::Csv => render_csv(&rows),
        OutputFormat::Jsonl => render_jsonl(&rows),
    };
    write_atomically(&args.out, &contents)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(0)
}

fn cmd_trump(args: &TrumpArgs) -> Result<i32, CliError> {
    let x = statefile::load_target(&args.x)?.alphas().squared();
    let y = statefile::load_target(&args.y)?.alphas().squared();
    let c = statefile::load_target(&args.catalyst)?.alphas().squared();

    let trumped = is_trumped(&x, &y, &c).map_err(input_error)?;
    let majorized = majorizes(&y, &x);
    // the witness is the first prefix where the decisive comparison fails:
    // the catalyzed one if even that is blocked, otherwise the plain one
    // the catalyst managed to unblock
    let witness = if !trumped {
        let xc = x.tensor_full(&c).map_err(input_error)?;
        let yc = y.tensor_full(&c).map_err(input_error)?;
        majorization_violation(&yc, &xc)
    } else if !majorized {
        majorization_violation(&y, &x)
    } else {
        None
    };
    println!(
        "{{\"trumped\": {trumped}, \"majorized\": {majorized}, \"witness_prefix\": {}}}",
        witness.map_or_else(|| "null".to_owned(), |w| w.to_string())
    );
    Ok(0)
}

fn cmd_selftest(args: &SelftestArgs) -> Result<i32, CliError> {
    let mut cfg = SelftestConfig::default();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    println!(
        "selftest: seed {}, {} targets, catalyst sizes {:?}, target ranks up to {}",
        cfg.seed, cfg.targets, cfg.catalyst_sizes, cfg.max_rank
    );
    let report = run_selftest(&cfg).map_err(input_error)?;
    for check in &report.checks {
        println!("  {:<34} {:>6}/{}", check.name, check.passed, check.total);
    }
    if report.ok() {
        println!("selftest: PASS ({} checks)", report.total_checks());
        Ok(0)
    } else {
        for check in report.checks.iter().filter(|c| !c.ok()) {
            if let Some(first) = &check.first_failure {
                eprintln!("{}: first failure: {first}", check.name);
            }
        }
        println!(
            "selftest: FAIL ({} of {} checks failed)",
            report.total_failures(),
            report.total_checks()
        );
        Ok(1)
    }
}

fn cmd_min_rank(args: &MinRankArgs) -> Result<i32, CliError> {
    let picked = min_rank_for(args.epsilon, args.m).map_err(input_error)?;
    println!(
        "{{\"epsilon\": {}, \"m\": {}, \"n\": {}, \"qubit_pairs\": {}}}",
        args.epsilon,
        args.m,
        picked
            .n
            .map_or_else(|| "null".to_owned(), |n| n.to_string()),
        picked.qubit_pairs
    );
    Ok(0)
}

// ------------------------------------------------------------- size grids

fn resolve_ns(args: &SweepArgs) -> Result<Vec<u64>, CliError> {
    let grid_flags =
        [args.n_start.is_some(), args.n_factor.is_some(), args.n_count.is_some()];
    let explicit = !args.n.is_empty();
    let any_grid = grid_flags.iter().any(|&f| f);

    let ns = match (explicit, any_grid) {
        (true, true) => {
            return Err(CliError::Input(
                "give either --n or a --n-start/--n-factor/--n-count grid, not both".into(),
            ))
        }
        (false, false) => {
            return Err(CliError::Input(
                "sweep needs --n or all of --n-start, --n-factor, --n-count".into(),
            ))
        }
        (true, false) => {
            if args.n.len() > MAX_SWEEP_POINTS {
                return Err(CliError::Input(format!(
                    "{} sizes exceed the {MAX_SWEEP_POINTS}-point cap",
                    args.n.len()
                )));
            }
            let mut ns = args.n.clone();
            ns.sort_unstable();
            ns.dedup();
            ns
        }
        (false, true) => {
            let (Some(start), Some(factor), Some(count)) =
                (args.n_start, args.n_factor, args.n_count)
            else {
                return Err(CliError::Input(
                    "a geometric grid needs all of --n-start, --n-factor, --n-count".into(),
                ));
            };
            if !(factor.is_finite() && factor > 1.0) {
                return Err(CliError::Input(format!(
                    "--n-factor must be a finite number above 1, got {factor}"
                )));
            }
            if count == 0 {
                return Err(CliError::Input("--n-count must be at least 1".into()));
            }
            if count as usize > MAX_SWEEP_POINTS {
                return Err(CliError::Input(format!(
                    "--n-count {count} exceeds the {MAX_SWEEP_POINTS}-point cap"
                )));
            }
            let mut ns = Vec::with_capacity(count as usize);
            for i in 0..count {
                let value = start as f64 * factor.powi(i as i32);
                if !value.is_finite() || value >= 1.8e19 {
                    return Err(CliError::Input(format!(
                        "grid entry {i} overflows a 64-bit size: {value:e}"
                    )));
                }
                ns.push(value.round() as u64);
            }
            ns.dedup();
            ns
        }
    };

    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Input(format!(
            "sweep sizes must be at least 2, got {bad}"
        )));
    }
    Ok(ns)
}

// -------------------------------------------------------------- rendering

/// 17 significant digits: enough to round-trip any f64 exactly.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_csv(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

fn opt_json(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_owned(), sci)
}

/// The nine sweep columns; exact spectral cells are absent past the walk
/// budget.
struct RowCells {
    n: u64,
    m: u64,
    fidelity: Option<f64>,
    eq4_bound: f64,
    sum_omega_sq: Option<f64>,
    delta: Option<f64>,
    eq6_bound: f64,
    fannes_floor: f64,
    entropy_bits: f64,
}

fn cells(row: &SweepPoint) -> RowCells {
    match row {
        SweepPoint::Full(r) => RowCells {
            n: r.n,
            m: r.m,
            fidelity: Some(r.fidelity),
            eq4_bound: r.eq4_bound,
            sum_omega_sq: Some(r.sum_omega_sq),
            delta: Some(r.delta),
            eq6_bound: r.eq6_bound,
            fannes_floor: r.fannes_floor,
            entropy_bits: r.target_entropy_bits,
        },
        SweepPoint::BoundsOnly(r) => RowCells {
            n: r.n,
            m: r.m,
            fidelity: None,
            eq4_bound: r.eq4_bound,
            sum_omega_sq: None,
            delta: None,
            eq6_bound: r.eq6_bound,
            fannes_floor: r.fannes_floor,
            entropy_bits: r.target_entropy_bits,
        },
    }
}

const CSV_HEADER: &str =
    "n,m,fidelity,eq4_bound,sum_omega_sq,delta,eq6_bound,fannes_floor,entropy_bits";

fn render_csv(rows: &[SweepPoint]) -> String {
    let mut out = String::with_capacity(rows.len() * 200 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let c = cells(row);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.n,
            c.m,
            opt_csv(c.fidelity),
            sci(c.eq4_bound),
            opt_csv(c.sum_omega_sq),
            opt_csv(c.delta),
            sci(c.eq6_bound),
            sci(c.fannes_floor),
            sci(c.entropy_bits),
        );
    }
    out
}

fn render_jsonl(rows: &[SweepPoint]) -> String {
    let mut out = String::with_capacity(rows.len() * 260);
    for row in rows {
        let c = cells(row);
        let _ = writeln!(
            out,
            "{{\"n\": {}, \"m\": {}, \"fidelity\": {}, \"eq4_bound\": {}, \"sum_omega_sq\": {}, \
             \"delta\": {}, \"eq6_bound\": {}, \"fannes_floor\": {}, \"entropy_bits\": {}}}",
            c.n,
            c.m,
            opt_json(c.fidelity),
            sci(c.eq4_bound),
            opt_json(c.sum_omega_sq),
            opt_json(c.delta),
            sci(c.eq6_bound),
            sci(c.fannes_floor),
            sci(c.entropy_bits),
        );
    }
    out
}

fn render_report_json(row: &SweepPoint) -> String {
    let c = cells(row);
    let epsilon_implied = match row {
        SweepPoint::Full(r) => Some(r.epsilon_implied),
        SweepPoint::BoundsOnly(_) => None,
    };
    format!(
        "{{\n  \"n\": {},\n  \"m\": {},\n  \"fidelity\": {},\n  \"eq4_bound\": {},\n  \
         \"sum_omega_sq\": {},\n  \"delta\": {},\n  \"eq6_bound\": {},\n  \
         \"fannes_floor\": {},\n  \"entropy_bits\": {},\n  \"epsilon_implied\": {}\n}}",
        c.n,
        c.m,
        opt_json(c.fidelity),
        sci(c.eq4_bound),
        opt_json(c.sum_omega_sq),
        opt_json(c.delta),
        sci(c.eq6_bound),
        sci(c.fannes_floor),
        sci(c.entropy_bits),
        opt_json(epsilon_implied),
    )
}

/// Writes through a sibling temp file and renames into place, so readers
/// never observe partial output and failures leave nothing behind.
fn write_atomically(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", tmp.display())))?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(CliError::Input(format!(
            "cannot move output into place at {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use embezzle_core::{bound_report, EmbezzlerIndex, TargetState};

    fn sweep_args(ns: Vec<u64>) -> SweepArgs {
        SweepArgs {
            target: PathBuf::from("unused"),
            n: ns,
            n_start: None,
            n_factor: None,
            n_count: None,
            out: PathBuf::from("unused"),
            format: OutputFormat::Csv,
        }
    }

    #[test]
    fn explicit_sizes_sort_and_dedup() {
        let ns = resolve_ns(&sweep_args(vec![64, 4, 64, 16])).unwrap();
        assert_eq!(ns, vec![4, 16, 64]);
    }

    #[test]
    fn sizes_below_two_are_rejected() {
        assert!(resolve_ns(&sweep_args(vec![1, 4])).is_err());
    }

    #[test]
    fn geometric_grid_rounds_and_dedups() {
        let mut args = sweep_args(vec![]);
        args.n_start = Some(3);
        args.n_factor = Some(1.2);
        args.n_count = Some(6);
        // 3, 3.6, 4.32, 5.18, 6.22, 7.46 -> rounded, deduped
        assert_eq!(resolve_ns(&args).unwrap(), vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn grid_needs_every_flag() {
        let mut args = sweep_args(vec![]);
        args.n_start = Some(4);
        assert!(resolve_ns(&args).is_err());
        args.n_factor = Some(2.0);
        args.n_count = Some(3);
        args.n = vec![8];
        assert!(resolve_ns(&args).is_err(), "grid and explicit list conflict");
    }

    #[test]
    fn seventeen_digit_cells_round_trip() {
        let x = 0.1f64 + 0.2f64;
        let cell = sci(x);
        assert_eq!(cell.parse::<f64>().unwrap(), x);
        assert_eq!(sci(1.0), "1.0000000000000000e0");
        assert_eq!(sci(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn csv_rows_have_nine_cells_in_both_modes() {
        let target = TargetState::maximally_entangled(2).unwrap();
        let full = SweepPoint::Full(
            bound_report(EmbezzlerIndex::new(16).unwrap(), &target).unwrap(),
        );
        let text = render_csv(&[full]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 9);
        assert!(!row.split(',').any(|cell| cell.is_empty()));

        let rows = sweep_points(&[1 << 30], &target).unwrap();
        assert!(matches!(rows[0], SweepPoint::BoundsOnly(_)));
        let text = render_csv(&rows);
        let row = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 9);
        assert_eq!(cells[2], "");
        assert_eq!(cells[4], "");
        assert_eq!(cells[5], "");
        assert!(!cells[3].is_empty());
    }

    #[test]
    fn report_json_is_valid_json() {
        let target = TargetState::maximally_entangled(3).unwrap();
        let rows = sweep_points(&[32], &target).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&render_report_json(&rows[0])).unwrap();
        assert_eq!(value["n"], 32);
        assert_eq!(value["m"], 3);
        assert!(value["fidelity"].as_f64().is_some());
    }

    #[test]
    fn jsonl_rows_parse_with_nulls_past_budget() {
        let target = TargetState::maximally_entangled(2).unwrap();
        let rows = sweep_points(&[16, 1 << 30], &target).unwrap();
        let text = render_jsonl(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert!(first["fidelity"].as_f64().is_some());
        let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert!(second["fidelity"].is_null());
        assert!(second["eq6_bound"].as_f64().is_some());
    }
}
