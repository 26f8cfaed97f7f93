//! The `ucl` command line: lint, analyze, compile, decide, compare, report.
//!
//! Exit codes: 0 clean, 1 at least one ERROR-severity finding, 2 the
//! command could not produce a report (usage, IO, or parse failure).
//! Reports go to stdout; diagnostics go to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ucl_cli::lint::{explain, has_errors, lint, parse_failure_finding, LintFinding};
use ucl_cli::report::{
    analyze, comparison_rows, render_analysis_text, render_comparison_text, render_compiled_text,
    render_corpus_text, render_findings_text, CorpusEntry, CorpusReport,
};
use ucl_cli::stats::{compare_paired, parse_pairs_csv};
use ucl_core::compiler::{compile, parse_bindings, InputContext, SwitchSelection};
use ucl_core::model::{decide, ModelParams};
use ucl_core::syntax::parse;

const EXIT_CLEAN: u8 = 0;
const EXIT_FINDINGS: u8 = 1;
const EXIT_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "ucl", version, about = "Toolchain for UCL prompt sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Model parameter file (JSON object or key=value lines).
    #[arg(long, global = true, value_name = "FILE")]
    params: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct SpecLevel {
    /// Specification level S; overrides the heuristic estimate.
    #[arg(long = "s", value_name = "VALUE")]
    s: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a source file against the lint rule catalog.
    Lint {
        file: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecLevel,
        /// Print the rule catalog and exit.
        #[arg(long)]
        explain: bool,
    },
    /// Full static analysis: structure, overhead, quality model, findings.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        spec: SpecLevel,
    },
    /// Expand a source against an input, keeping only the blocks that fire.
    Compile {
        file: PathBuf,
        /// File holding the input text the indicators are evaluated on.
        #[arg(long, value_name = "TEXTFILE")]
        input: PathBuf,
        /// Optional key=value bindings for EQUALS conditions.
        #[arg(long, value_name = "FILE")]
        bindings: Option<PathBuf>,
        /// Keep a single case of a switch: --select selector=case.
        #[arg(long, value_name = "SEL=CASE")]
        select: Vec<String>,
    },
    /// Compare two prompts under a cost sensitivity lambda.
    Decide {
        #[arg(long)]
        lambda: f64,
        #[arg(long = "q-ucl")]
        q_ucl: f64,
        #[arg(long = "q-base")]
        q_base: f64,
        #[arg(long = "c-ucl")]
        c_ucl: f64,
        #[arg(long = "c-base")]
        c_base: f64,
    },
    /// Paired statistics over a CSV of label,value_a,value_b rows.
    Compare { pairs_file: PathBuf },
    /// Analyze every .ucl file in a directory and tabulate the results.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let params = match load_params(cli.params.as_deref()) {
        Ok(params) => params,
        Err(message) => {
            eprintln!("ucl: {message}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    match run(cli, &params) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("ucl: {message}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn load_params(path: Option<&Path>) -> Result<ModelParams, String> {
    match path {
        None => Ok(ModelParams::default()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read params file {}: {e}", path.display()))?;
            ModelParams::from_config_str(&text).map_err(|e| e.to_string())
        }
    }
}

fn read_source(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

fn run(cli: Cli, params: &ModelParams) -> Result<u8, String> {
    match cli.command {
        Command::Lint {
            file,
            spec,
            explain: show_catalog,
        } => {
            if show_catalog {
                print!("{}", explain());
                return Ok(EXIT_CLEAN);
            }
            let file = file.ok_or("lint needs a FILE (or --explain)")?;
            let source = read_source(&file)?;
            let findings: Vec<LintFinding> = match parse(&source) {
                Ok(doc) => lint(&doc, params, spec.s),
                Err(err) => vec![parse_failure_finding(&err)],
            };
            match cli.format {
                Format::Json => println!("{}", to_json(&findings)),
                Format::Text => print!(
                    "{}",
                    render_findings_text(&file.display().to_string(), &findings)
                ),
            }
            Ok(if has_errors(&findings) {
                EXIT_FINDINGS
            } else {
                EXIT_CLEAN
            })
        }

        Command::Analyze { file, spec } => {
            let source = read_source(&file)?;
            let doc = parse(&source).map_err(|e| format!("{}: {e}", file.display()))?;
            let report = analyze(&doc, params, spec.s, Some(file.display().to_string()));
            match cli.format {
                Format::Json => println!("{}", to_json(&report)),
                Format::Text => print!("{}", render_analysis_text(&report)),
            }
            Ok(if has_errors(&report.findings) {
                EXIT_FINDINGS
            } else {
                EXIT_CLEAN
            })
        }

        Command::Compile {
            file,
            input,
            bindings,
            select,
        } => {
            let source = read_source(&file)?;
            let doc = parse(&source).map_err(|e| format!("{}: {e}", file.display()))?;
            let input_text = read_source(&input)?;
            let bindings = match bindings {
                Some(path) => parse_bindings(&read_source(&path)?)
                    .map_err(|e| format!("{}: {e}", path.display()))?,
                None => Default::default(),
            };
            let ctx = InputContext::with_bindings(input_text, bindings);
            let selection = parse_selection(&select)?;
            let compiled = compile(&doc, &ctx, selection.as_ref()).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Json => println!("{}", to_json(&compiled)),
                Format::Text => {
                    // The expanded prompt is the report; metrics go to the
                    // diagnostic stream so stdout stays pipeable.
                    print!("{}", compiled.emitted);
                    if !compiled.emitted.ends_with('\n') && !compiled.emitted.is_empty() {
                        println!();
                    }
                    eprint!("{}", render_compiled_text(&compiled));
                }
            }
            Ok(EXIT_CLEAN)
        }

        Command::Decide {
            lambda,
            q_ucl,
            q_base,
            c_ucl,
            c_base,
        } => {
            if lambda < 0.0 || c_ucl < 0.0 || c_base < 0.0 {
                return Err("lambda and token counts must be non-negative".to_string());
            }
            let report = decide(lambda, q_ucl, q_base, c_ucl, c_base, params);
            match cli.format {
                Format::Json => println!("{}", to_json(&report)),
                Format::Text => {
                    println!(
                        "utility: selective={:.6} baseline={:.6} -> use_ucl={}",
                        report.utility_ucl, report.utility_baseline, report.use_ucl
                    );
                    println!(
                        "threshold rule: lambda {:.3e} vs lambda* {:.3e} -> use_ucl={}{}",
                        report.lambda,
                        report.lambda_star,
                        report.threshold_use_ucl,
                        if report.rules_disagree {
                            "  (rules disagree)"
                        } else {
                            ""
                        }
                    );
                    println!(
                        "delta_q={:.4} delta_c={:.1}",
                        report.delta_q, report.delta_c
                    );
                }
            }
            Ok(EXIT_CLEAN)
        }

        Command::Compare { pairs_file } => {
            let text = read_source(&pairs_file)?;
            let pairs = parse_pairs_csv(&text).map_err(|e| format!("{}: {e}", pairs_file.display()))?;
            let comparison = compare_paired(&pairs).map_err(|e| e.to_string())?;
            match cli.format {
                Format::Json => println!("{}", to_json(&comparison)),
                Format::Text => print!("{}", render_comparison_text(&comparison)),
            }
            Ok(EXIT_CLEAN)
        }

        Command::Report { dir } => {
            let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| format!("cannot read {}: {e}", dir.display()))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "ucl"))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(format!("no .ucl files under {}", dir.display()));
            }
            let mut entries = Vec::new();
            for path in files {
                let name = path
                    .file_name()
                    .map(|n| n.to_string_lossy().to_string())
                    .unwrap_or_else(|| path.display().to_string());
                let entry = match read_source(&path).and_then(|source| {
                    parse(&source).map_err(|e| format!("parse error: {e}"))
                }) {
                    Ok(doc) => CorpusEntry {
                        file: name.clone(),
                        report: Some(analyze(&doc, params, None, Some(name))),
                        error: None,
                    },
                    Err(err) => CorpusEntry {
                        file: name,
                        report: None,
                        error: Some(err),
                    },
                };
                entries.push(entry);
            }
            let corpus = CorpusReport {
                comparison: comparison_rows(&entries),
                entries,
            };
            match cli.format {
                Format::Json => println!("{}", to_json(&corpus)),
                Format::Text => print!("{}", render_corpus_text(&corpus)),
            }
            let dirty = corpus.entries.iter().any(|e| {
                e.error.is_some()
                    || e.report
                        .as_ref()
                        .is_some_and(|r| has_errors(&r.findings))
            });
            Ok(if dirty { EXIT_FINDINGS } else { EXIT_CLEAN })
        }
    }
}

fn parse_selection(select: &[String]) -> Result<Option<SwitchSelection>, String> {
    if select.is_empty() {
        return Ok(None);
    }
    let mut selection = SwitchSelection::new();
    for item in select {
        let (selector, case) = item
            .split_once('=')
            .ok_or_else(|| format!("--select '{item}': expected selector=case"))?;
        selection.insert(selector.trim().to_string(), case.trim().to_string());
    }
    Ok(Some(selection))
}
