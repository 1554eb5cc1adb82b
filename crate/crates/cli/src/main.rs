use std::collections::BTreeSet;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use natcomp::comp::comp;
use natcomp::completion::{arithmetic_completed_definition, constraint_sentence, ncomp, simplify};
use natcomp::formula::Formula;
use natcomp::modelcheck::{verify_correspondence, VerifyOptions};
use natcomp::parser::{
    formula_to_string, parse_axioms_named, parse_program_named, print_rule, tptp_annotated, Style,
};
use natcomp::puzzle::{pairs, solve_puzzle};
use natcomp::reverse::{
    interval_rewrite, parse_axiom_chain, reverse_completion, strictly_unsafe_variables,
};
use natcomp::solve::{ground, stable_models, GroundProgram, GroundWarning, IntWindow, Method};
use natcomp::syntax::Program;
use natcomp::tightness::{dependency_graph, is_tight, Tightness};

#[derive(Parser)]
#[command(
    name = "natcomp",
    version,
    about = "Completion, tightness and bounded solving for regular answer-set programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Unicode,
    Ascii,
    Tptp,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Brute,
    Completion,
    Stratified,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Brute => Method::Brute,
            MethodArg::Completion => Method::Completion,
            MethodArg::Stratified => Method::Stratified,
        }
    }
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Output syntax; defaults to unicode on a terminal and ascii otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutputArgs {
    fn style(&self) -> Style {
        match self.format {
            Some(Format::Unicode) => Style::Unicode,
            Some(Format::Ascii) => Style::Ascii,
            Some(Format::Tptp) => Style::Tptp,
            None if io::stdout().is_terminal() => Style::Unicode,
            None => Style::Ascii,
        }
    }
}

#[derive(clap::Args)]
struct GroundArgs {
    /// Integer window LO..HI; defaults to the program's numerals with one unit of slack.
    #[arg(long, value_name = "LO..HI", value_parser = parse_window, allow_hyphen_values = true)]
    int_window: Option<IntWindow>,
    /// Extra symbolic constants, comma separated.
    #[arg(long, value_delimiter = ',')]
    consts: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the natural completion of a program.
    Complete {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Eliminate redundant equalities and quantifiers.
        #[arg(long)]
        simplify: bool,
        /// Print completed definitions over integer variables instead.
        #[arg(long)]
        arithmetic: bool,
    },
    /// Print the completion built from term values and body translations.
    Comp {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        simplify: bool,
    },
    /// Decide tightness of a program.
    Tight {
        file: PathBuf,
        /// Print the positive dependency graph in DOT syntax.
        #[arg(long)]
        dot: bool,
    },
    /// Ground a program over a window and print its stable models.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Print one JSON object per model.
        #[arg(long)]
        json: bool,
    },
    /// Check stable models against the completion on a bounded universe.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        ground: GroundArgs,
        /// Print one JSON object per line.
        #[arg(long)]
        json: bool,
        /// Largest Herbrand base whose subsets are all enumerated.
        #[arg(long, default_value_t = 20)]
        max_base: usize,
        /// Number of random subsets checked for larger bases.
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Turn a chain of first-order definitions into a program.
    Reverse {
        file: PathBuf,
        /// Replace pairs of bounding comparisons by intervals in unsafe rules.
        #[arg(long)]
        interval_rewrite: bool,
    },
    /// Solve the Sum and Product Puzzle.
    Puzzle,
}

fn parse_window(s: &str) -> Result<IntWindow, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    Ok(IntWindow::new(lo, hi))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    let text = read(path)?;
    Ok(parse_program_named(&text, &path.display().to_string())?)
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

fn print_sentences(
    out: &mut impl Write,
    sentences: &[Formula],
    style: Style,
    prefix: &str,
) -> Result<()> {
    for (k, f) in sentences.iter().enumerate() {
        let line = match style {
            Style::Tptp => tptp_annotated(&format!("{prefix}_{}", k + 1), f),
            _ => formula_to_string(f, style),
        };
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Widening stops once the window is this wide.
const MAX_AUTO_WIDTH: u64 = 100_000;

/// Grounds over the given window, or over a default window that is widened
/// while rule instances fall outside it.
fn ground_program(p: &Program, args: &GroundArgs) -> GroundProgram {
    let consts: BTreeSet<String> = args.consts.iter().map(|c| c.trim().to_string()).collect();
    let explicit = args.int_window.is_some();
    let mut w = args.int_window.unwrap_or_else(|| IntWindow::around(p));
    loop {
        let g = ground(p, w, &consts);
        let too_small = g
            .warnings
            .iter()
            .any(|w| matches!(w, GroundWarning::WindowTooSmall { .. }));
        if explicit || !too_small || w.width() >= MAX_AUTO_WIDTH {
            for warning in &g.warnings {
                warn(warning);
            }
            return g;
        }
        let grow = w.width().max(1) as i64;
        w = IntWindow::new(w.lo.saturating_sub(grow), w.hi.saturating_add(grow));
        warn(format_args!("widening the integer window to {w}"));
    }
}

fn run(cli: Cli) -> Result<bool> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Complete {
            file,
            output,
            simplify: simp,
            arithmetic,
        } => {
            let p = load_program(&file)?;
            let mut sentences = if arithmetic {
                let mut v = p
                    .predicate_symbols()
                    .iter()
                    .map(|sym| arithmetic_completed_definition(&p, sym))
                    .collect::<Result<Vec<_>, _>>()?;
                v.extend(p.constraints().map(|(k, _)| constraint_sentence(&p, k)));
                v
            } else {
                ncomp(&p)
            };
            if simp {
                sentences = sentences.iter().map(simplify).collect();
            }
            print_sentences(&mut out, &sentences, output.style(), "ncomp")?;
        }
        Command::Comp {
            file,
            output,
            simplify: simp,
        } => {
            let p = load_program(&file)?;
            let mut sentences = comp(&p);
            if simp {
                sentences = sentences.iter().map(simplify).collect();
            }
            print_sentences(&mut out, &sentences, output.style(), "comp")?;
        }
        Command::Tight { file, dot } => {
            let p = load_program(&file)?;
            if dot {
                write!(out, "{}", dependency_graph(&p).to_dot())?;
            }
            match is_tight(&p) {
                Tightness::Tight => writeln!(out, "tight")?,
                Tightness::NotTight(cycle) => {
                    let mut names: Vec<String> = cycle.iter().map(ToString::to_string).collect();
                    if let Some(first) = names.first().cloned() {
                        names.push(first);
                    }
                    writeln!(out, "not tight: {}", names.join(" -> "))?;
                }
            }
        }
        Command::Solve {
            file,
            ground: args,
            method,
            json,
        } => {
            let p = load_program(&file)?;
            let g = ground_program(&p, &args);
            let models = stable_models(&g, method.into())?;
            for (k, m) in models.iter().enumerate() {
                if json {
                    let atoms: Vec<String> = m.atoms.iter().map(ToString::to_string).collect();
                    writeln!(
                        out,
                        "{}",
                        serde_json::json!({ "answer": k + 1, "atoms": atoms })
                    )?;
                } else {
                    writeln!(out, "Answer: {}", k + 1)?;
                    writeln!(out, "{m}")?;
                }
            }
            if json {
                writeln!(out, "{}", serde_json::json!({ "models": models.len() }))?;
            } else {
                let verdict = if models.is_empty() {
                    "UNSATISFIABLE"
                } else {
                    "SATISFIABLE"
                };
                writeln!(out, "{verdict}")?;
                writeln!(out, "Models: {}", models.len())?;
            }
        }
        Command::Verify {
            file,
            ground: args,
            json,
            max_base,
            samples,
            seed,
        } => {
            let p = load_program(&file)?;
            let w = args.int_window.unwrap_or_else(|| IntWindow::around(&p));
            let options = VerifyOptions {
                max_base,
                samples,
                seed,
                extra_constants: args.consts.iter().map(|c| c.trim().to_string()).collect(),
            };
            let report = verify_correspondence(&p, w, &options)?;
            if json {
                for line in report.json_lines() {
                    writeln!(out, "{line}")?;
                }
            } else {
                write!(out, "{report}")?;
            }
            return Ok(report.passed());
        }
        Command::Reverse {
            file,
            interval_rewrite: rewrite,
        } => {
            let text = read(&file)?;
            let axioms = parse_axioms_named(&text, &file.display().to_string())?;
            let chain = parse_axiom_chain(&axioms)?;
            let program = reverse_completion(&chain)?;
            for (k, rule) in program.rules.iter().enumerate() {
                let rule = if rewrite {
                    interval_rewrite(rule)
                } else {
                    rule.clone()
                };
                let unsafe_vars = strictly_unsafe_variables(&rule);
                if !unsafe_vars.is_empty() {
                    let hint = if rewrite {
                        ""
                    } else {
                        "; try --interval-rewrite"
                    };
                    warn(format_args!(
                        "rule {} binds {} only through comparisons, which older grounders reject{hint}",
                        k + 1,
                        unsafe_vars.join(", ")
                    ));
                }
                writeln!(out, "{}", print_rule(&rule))?;
            }
        }
        Command::Puzzle => {
            let model = solve_puzzle()?;
            let answer = pairs(&model, "b3");
            let [(m, n)] = answer.as_slice() else {
                bail!("expected a single pair in b3, found {answer:?}");
            };
            writeln!(out, "M={m}, N={n}")?;
            let mut sizes: Vec<(String, usize)> = Vec::new();
            for a in &model.atoms {
                match sizes.last_mut() {
                    Some((name, count)) if *name == a.predicate => *count += 1,
                    _ => sizes.push((a.predicate.clone(), 1)),
                }
            }
            for (name, count) in sizes {
                writeln!(out, "{name}: {count}")?;
            }
            return Ok((*m, *n) == (4, 13));
        }
    }
    Ok(true)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.downcast_ref::<io::Error>()
        .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
