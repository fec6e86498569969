//! Command-line front end: rule checking, scenario runs, fixture
//! verification, rotation reports and SVG snapshots.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 input error,
//! 3 engine error.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hepta_core::fixtures::{scenario_for, FIXTURE_NAMES};
use hepta_core::rules::{
    bundled_table, check_coherence, parse_rules, rotation_class_bound, rotation_report, RuleTable,
};
use hepta_core::structures::{build_scenario, Injection, ScenarioSpec, StructureKind};
use hepta_core::{compare_trace, golden};

const EXIT_OK: u8 = 0;
const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_ENGINE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hepta",
    about = "Two-state railway cellular automaton on the heptagrid",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a rule file and report coherence and rotation conflicts.
    CheckRules { file: PathBuf },
    /// Build a scenario, run it and write the trace as TSV.
    Run {
        structure: StructureArg,
        injection: InjectionArg,
        /// Number of synchronous steps.
        #[arg(long)]
        steps: u32,
        /// Trace output file (TSV), `-` for stdout.
        #[arg(long, default_value = "-")]
        trace: String,
        /// Directory for per-step SVG snapshots.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Replay reference fixtures and compare rule-for-rule.
    Verify {
        /// Fixture name; use --all for the whole suite.
        name: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Group the rules of a file by circular permutation of their
    /// neighbourhoods and list rotationally incompatible pairs.
    RotationReport { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    Track,
    FixedSwitch,
    Fork,
    Doubler,
    Selector,
    ControllerBlack,
    ControllerWhite,
    SensorWhite,
    SensorBlack,
}

impl From<StructureArg> for StructureKind {
    fn from(v: StructureArg) -> StructureKind {
        match v {
            StructureArg::Track => StructureKind::Track,
            StructureArg::FixedSwitch => StructureKind::FixedSwitch,
            StructureArg::Fork => StructureKind::Fork,
            StructureArg::Doubler => StructureKind::Doubler,
            StructureArg::Selector => StructureKind::Selector,
            StructureArg::ControllerBlack => StructureKind::ControllerBlack,
            StructureArg::ControllerWhite => StructureKind::ControllerWhite,
            StructureArg::SensorWhite => StructureKind::SensorWhite,
            StructureArg::SensorBlack => StructureKind::SensorBlack,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InjectionArg {
    None,
    SimpleUp,
    SimpleDown,
    DoubleUp,
    DoubleDown,
    SimpleFromLeft,
    SimpleFromRight,
    DoubleFromLeft,
    DoubleFromRight,
    Signal,
}

impl From<InjectionArg> for Injection {
    fn from(v: InjectionArg) -> Injection {
        match v {
            InjectionArg::None => Injection::None,
            InjectionArg::SimpleUp => Injection::SimpleUp,
            InjectionArg::SimpleDown => Injection::SimpleDown,
            InjectionArg::DoubleUp => Injection::DoubleUp,
            InjectionArg::DoubleDown => Injection::DoubleDown,
            InjectionArg::SimpleFromLeft => Injection::SimpleFromLeft,
            InjectionArg::SimpleFromRight => Injection::SimpleFromRight,
            InjectionArg::DoubleFromLeft => Injection::DoubleFromLeft,
            InjectionArg::DoubleFromRight => Injection::DoubleFromRight,
            InjectionArg::Signal => Injection::Signal,
        }
    }
}

/// The rule table: `HEPTA_RULES` overrides the bundled one.
fn load_table() -> Result<RuleTable, String> {
    match std::env::var_os("HEPTA_RULES") {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| format!("cannot read {}: {e}", Path::new(&path).display()))?;
            parse_rules(&text).map_err(|e| e.to_string())
        }
        None => Ok(bundled_table().clone()),
    }
}

fn cmd_check_rules(file: &Path) -> u8 {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let table = match parse_rules(&text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let coherence = check_coherence(&table);
    println!(
        "{} rules, {} conflicts",
        table.len(),
        coherence.conflicts.len()
    );
    for c in &coherence.conflicts {
        println!("conflict: rules {} and {} disagree", c.first, c.second);
    }
    for (a, b) in &coherence.duplicates {
        println!("warning: rules {a} and {b} are exact duplicates");
    }
    let rotation = rotation_report(&table);
    println!(
        "{} rotation classes, {} rotationally incompatible pairs",
        rotation.classes.len(),
        rotation.incompatible.len()
    );
    for (a, b) in &rotation.incompatible {
        println!("rotation-incompatible: {a} {b}");
    }
    if coherence.is_coherent() {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn cmd_run(
    structure: StructureKind,
    injection: Injection,
    steps: u32,
    trace_out: &str,
    svg_dir: Option<&Path>,
) -> u8 {
    let table = match load_table() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let spec = ScenarioSpec {
        structure,
        injection,
        steps,
    };
    let scenario = match build_scenario(&spec, &table) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Some(dir) = svg_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return EXIT_INPUT;
        }
    }
    let mut config = scenario.config.clone();
    let mut events = Vec::new();
    if let Some(dir) = svg_dir {
        if let Err(e) = write_snapshot(dir, 0, &config) {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    }
    for t in 1..=steps {
        match config.step(&table, t) {
            Ok((next, step_events)) => {
                events.extend(step_events);
                config = next;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ENGINE;
            }
        }
        if let Some(dir) = svg_dir {
            if let Err(e) = write_snapshot(dir, t, &config) {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        }
    }
    let trace = hepta_core::Trace {
        events,
        horizon: steps,
    };
    let tsv = trace.to_tsv();
    if trace_out == "-" {
        print!("{tsv}");
    } else if let Err(e) = fs::write(trace_out, tsv) {
        eprintln!("error: cannot write {trace_out}: {e}");
        return EXIT_INPUT;
    }
    EXIT_OK
}

fn write_snapshot(dir: &Path, t: u32, config: &hepta_core::Configuration) -> Result<(), String> {
    let path = dir.join(format!("step-{t:03}.svg"));
    fs::write(&path, svg::render(config, 5))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn cmd_verify(name: Option<&str>, all: bool) -> u8 {
    let table = match load_table() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let names: Vec<&str> = match (name, all) {
        (Some(n), false) => match FIXTURE_NAMES.iter().find(|&&f| f == n) {
            Some(&f) => vec![f],
            None => {
                eprintln!("error: unknown fixture {n}");
                return EXIT_INPUT;
            }
        },
        (None, _) | (Some(_), true) => FIXTURE_NAMES.to_vec(),
    };
    let mut failed = 0usize;
    for n in &names {
        let line = match replay(n, &table) {
            Ok(diff) if diff.is_empty() => format!("{n}: pass"),
            Ok(diff) => {
                failed += 1;
                let m = &diff.mismatches[0];
                format!(
                    "{n}: FAIL ({} mismatches; first at t={} cell={} expected {} got {})",
                    diff.mismatches.len(),
                    m.time,
                    m.cell,
                    m.expected,
                    m.actual.map_or("nothing".to_string(), |r| r.to_string()),
                )
            }
            Err(e) => {
                failed += 1;
                format!("{n}: FAIL ({e})")
            }
        };
        println!("{line}");
    }
    println!("{} fixtures, {} failed", names.len(), failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn replay(name: &str, table: &RuleTable) -> Result<hepta_core::Diff, String> {
    let expected = golden(name).map_err(|e| e.to_string())?;
    let (structure, injection, steps) =
        scenario_for(name).ok_or_else(|| format!("no scenario for {name}"))?;
    let spec = ScenarioSpec {
        structure,
        injection,
        steps,
    };
    let scenario = build_scenario(&spec, table).map_err(|e| e.to_string())?;
    let (_, trace) = scenario
        .config
        .run(table, steps)
        .map_err(|e| e.to_string())?;
    Ok(compare_trace(expected, &trace))
}

fn cmd_rotation_report(file: &Path) -> u8 {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return EXIT_INPUT;
        }
    };
    let table = match parse_rules(&text) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = rotation_report(&table);
    let (classes, max_rules) = rotation_class_bound();
    println!(
        "all 128 neighbourhoods fall into {classes} rotation classes \
         ({max_rules} rotation independent rules at most)"
    );
    println!("table uses {} classes", report.classes.len());
    for class in &report.classes {
        let n: String = class.canonical.iter().map(|s| s.to_string()).collect();
        let ids: Vec<String> = class.rule_ids.iter().map(|i| i.to_string()).collect();
        println!("{} {}: rules {}", class.current, n, ids.join(" "));
    }
    if report.incompatible.is_empty() {
        println!("no rotationally incompatible pairs");
    }
    for (a, b) in &report.incompatible {
        println!("rotation-incompatible: {a} {b}");
    }
    EXIT_OK
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::CheckRules { file } => cmd_check_rules(&file),
        Command::Run {
            structure,
            injection,
            steps,
            trace,
            svg,
        } => cmd_run(
            structure.into(),
            injection.into(),
            steps,
            &trace,
            svg.as_deref(),
        ),
        Command::Verify { name, all } => cmd_verify(name.as_deref(), all),
        Command::RotationReport { file } => cmd_rotation_report(&file),
    };
    ExitCode::from(code)
}
