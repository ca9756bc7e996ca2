//! `sra`: compile patterns, decide language questions and export automata.
//!
//! Exit status is 0 when the asked predicate holds (or the command
//! succeeded), 1 when it does not, and 2 on usage or input errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sra::algebra::{Algebra, Elem};
use sra::automaton::Sra;
use sra::expand::{self, Domain, Limits, CSV_HEADER};
use sra::regex::{benchmark, scaling, CompiledPattern};
use sra::{boolean_ops, equiv, json, normal};

#[derive(Parser)]
#[command(name = "sra", version, about = "Symbolic register automata: patterns, decisions and expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a pattern (or load an automaton) and print it as JSON.
    Compile {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: AutomatonOutput,
    },
    /// Whether the automaton accepts the input.
    Member {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        input: Input,
    },
    /// Whether the language is empty; prints an accepted word otherwise.
    Empty {
        #[command(flatten)]
        source: Source,
    },
    /// Whether every input has at most one run.
    Deterministic {
        #[command(flatten)]
        source: Source,
    },
    /// Whether L(lhs) ⊆ L(rhs); prints a word of L(lhs) \ L(rhs) otherwise.
    Subset {
        #[command(flatten)]
        pair: Pair,
    },
    /// Whether L(lhs) = L(rhs); prints a word in exactly one language otherwise.
    Equiv {
        #[command(flatten)]
        pair: Pair,
    },
    /// Complement of a complete deterministic automaton.
    Complement {
        #[command(flatten)]
        source: Source,
        /// Complete the automaton (via its single-valued form) first.
        #[arg(long)]
        complete: bool,
        #[command(flatten)]
        output: AutomatonOutput,
    },
    /// Product automaton accepting L(lhs) ∩ L(rhs).
    Intersect {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        output: AutomatonOutput,
    },
    /// Automaton accepting L(lhs) ∪ L(rhs).
    Union {
        #[command(flatten)]
        pair: Pair,
        #[command(flatten)]
        output: AutomatonOutput,
    },
    /// Expand into a register-free automaton over a finite domain; prints a CSV size row.
    Expand {
        #[command(flatten)]
        source: Source,
        /// Comma-separated domain items: `c`, `a-z`, `U+0041-U+005A`, `bmp`; integers `n` or `lo..hi`.
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = expand::DEFAULT_MAX_STATES)]
        max_states: usize,
        /// Row label; defaults to the input file stem.
        #[arg(long)]
        name: Option<String>,
        /// Also write the expanded automaton as JSON here.
        #[arg(long)]
        sfa_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time membership on product listings of 10^min..10^max characters; prints CSV.
    Bench {
        /// A product-code benchmark (`Pr-Cn` or `Pr-CLn`).
        #[arg(long, default_value = "Pr-CL3")]
        benchmark: String,
        #[arg(long, default_value_t = 2)]
        min_exp: u32,
        #[arg(long, default_value_t = 7)]
        max_exp: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dialect {
    Strict,
}

/// One automaton: a JSON file, a pattern file, or an inline pattern.
#[derive(Args)]
struct Source {
    /// Automaton JSON (`.json`) or a pattern file with one pattern per line.
    #[arg(long, conflicts_with = "pattern", required_unless_present = "pattern")]
    sra: Option<PathBuf>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, value_enum, default_value = "strict")]
    dialect: Dialect,
}

#[derive(Args)]
struct Pair {
    /// Automaton JSON (`.json`) or a pattern file.
    #[arg(long)]
    lhs: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    #[arg(long, value_enum, default_value = "strict")]
    dialect: Dialect,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Characters for Unicode automata; integers separated by spaces or commas otherwise.
    #[arg(long, allow_hyphen_values = true)]
    input: Option<String>,
    /// As `--input`, read from a file (one trailing newline is ignored).
    #[arg(long)]
    input_file: Option<PathBuf>,
}

#[derive(Args)]
struct AutomatonOutput {
    /// Emit the normalized automaton of the single-valued form instead.
    #[arg(long)]
    emit_normalized: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn compile_patterns(text: &str, origin: &str) -> Result<Sra> {
    let mut result: Option<Sra> = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let p = CompiledPattern::new(line).with_context(|| format!("{origin}:{}: cannot compile pattern", i + 1))?;
        result = Some(match result {
            None => p.sra,
            Some(acc) => boolean_ops::union(&acc, &p.sra)?,
        });
    }
    result.with_context(|| format!("{origin}: no patterns"))
}

fn load(path: &Path) -> Result<Sra> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        json::from_json(&text).with_context(|| format!("{}: invalid automaton", path.display()))
    } else {
        compile_patterns(&text, &path.display().to_string())
    }
}

impl Source {
    fn load(&self) -> Result<Sra> {
        let Dialect::Strict = self.dialect;
        match (&self.sra, &self.pattern) {
            (Some(path), _) => load(path),
            (None, Some(p)) => Ok(CompiledPattern::new(p).context("cannot compile pattern")?.sra),
            (None, None) => bail!("one of --sra or --pattern is required"),
        }
    }

    fn label(&self) -> String {
        match &self.sra {
            Some(path) => path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
            None => "pattern".to_string(),
        }
    }
}

impl Pair {
    fn load(&self) -> Result<(Sra, Sra)> {
        let Dialect::Strict = self.dialect;
        Ok((load(&self.lhs)?, load(&self.rhs)?))
    }
}

fn parse_word(alg: Algebra, text: &str) -> Result<Vec<Elem>> {
    match alg {
        Algebra::Unicode => Ok(text.chars().map(Elem::from).collect()),
        Algebra::Integer => text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map(Elem::Int).with_context(|| format!("bad integer {t:?}")))
            .collect(),
    }
}

impl Input {
    fn word(&self, alg: Algebra) -> Result<Vec<Elem>> {
        let text = match (&self.input, &self.input_file) {
            (Some(s), _) => s.clone(),
            (None, Some(path)) => {
                let mut t = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                if t.ends_with('\n') {
                    t.pop();
                    if t.ends_with('\r') {
                        t.pop();
                    }
                }
                t
            }
            (None, None) => bail!("one of --input or --input-file is required"),
        };
        parse_word(alg, &text)
    }
}

/// The word as a JSON array of values, plus a quoted string when every
/// value is a character.
fn describe_word(word: &[Elem]) -> String {
    let values: Vec<i64> = word.iter().map(|a| a.value()).collect();
    let mut out = format!("word: {}\n", serde_json::to_string(&values).expect("integers serialize"));
    let text: Option<String> =
        word.iter().map(|a| if let Elem::Char(c) = a { char::from_u32(*c) } else { None }).collect();
    if let Some(text) = text {
        let _ = writeln!(out, "text: {}", serde_json::to_string(&text).expect("strings serialize"));
    }
    out
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e).context("cannot write to stdout"),
            _ => Ok(()),
        },
    }
}

fn emit_automaton(s: &Sra, output: &AutomatonOutput) -> Result<()> {
    let s = if output.emit_normalized { normal::normalize(&*normal::single_valued_form(s)?)? } else { s.clone() };
    emit(&json::to_json(&s), output.out.as_deref())
}

/// Prints the verdict and any witness, and maps it to the exit status.
fn verdict(holds: bool, detail: Option<String>) -> Result<ExitCode> {
    emit(&format!("{holds}\n{}", detail.unwrap_or_default()), None)?;
    Ok(if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn bench_code(name: &str) -> Result<(String, char)> {
    let n: usize = name
        .strip_prefix("Pr-CL")
        .or_else(|| name.strip_prefix("Pr-C"))
        .and_then(|n| n.parse().ok())
        .with_context(|| format!("{name}: bench needs a product-code benchmark (Pr-Cn or Pr-CLn)"))?;
    let code: String = "X4aB7cD9e".chars().cycle().take(n).collect();
    Ok((code, '4'))
}

fn run(cli: Cli) -> Result<ExitCode> {
    Ok(match cli.command {
        Command::Compile { source, output } => {
            emit_automaton(&source.load()?, &output)?;
            ExitCode::SUCCESS
        }
        Command::Member { source, input } => {
            let s = source.load()?;
            let word = input.word(s.algebra())?;
            verdict(s.accepts(&word), None)?
        }
        Command::Empty { source } => match normal::emptiness(&source.load()?)? {
            None => verdict(true, None)?,
            Some(w) => verdict(false, Some(describe_word(&w)))?,
        },
        Command::Deterministic { source } => {
            let holds = normal::is_deterministic(&source.load()?)?;
            let why = "explanation: some reachable configuration has two different successors on one input\n";
            verdict(holds, (!holds).then(|| why.to_string()))?
        }
        Command::Subset { pair } => {
            let (l, r) = pair.load()?;
            let d = equiv::includes(&l, &r)?;
            verdict(d.holds, d.counterexample.as_deref().map(describe_word))?
        }
        Command::Equiv { pair } => {
            let (l, r) = pair.load()?;
            let d = equiv::equivalent(&l, &r)?;
            verdict(d.holds, d.counterexample.as_deref().map(describe_word))?
        }
        Command::Complement { source, complete, output } => {
            let s = source.load()?;
            let s = if complete { boolean_ops::complete(&*normal::single_valued_form(&s)?)? } else { s };
            let c = boolean_ops::complement(&s).context("complement needs a complete deterministic automaton (see --complete)")?;
            emit_automaton(&c, &output)?;
            ExitCode::SUCCESS
        }
        Command::Intersect { pair, output } => {
            let (l, r) = pair.load()?;
            emit_automaton(&boolean_ops::intersect(&l, &r)?, &output)?;
            ExitCode::SUCCESS
        }
        Command::Union { pair, output } => {
            let (l, r) = pair.load()?;
            emit_automaton(&boolean_ops::union(&l, &r)?, &output)?;
            ExitCode::SUCCESS
        }
        Command::Expand { source, domain, max_states, name, sfa_out, out } => {
            let s = source.load()?;
            let domain = Domain::parse(s.algebra(), &domain)?;
            let e = expand::expand_to_sfa(&s, &domain, Limits { max_states });
            if let (Some(path), Some(sfa)) = (&sfa_out, e.sfa()) {
                emit(&json::to_json(sfa), Some(path))?;
            }
            let row = expand::size_report(&name.unwrap_or_else(|| source.label()), &s, &domain, &e);
            emit(&format!("{CSV_HEADER}\n{row}\n"), out.as_deref())?;
            ExitCode::SUCCESS
        }
        Command::Bench { benchmark: name, min_exp, max_exp, out } => {
            let b = benchmark(&name).with_context(|| format!("unknown benchmark {name}"))?;
            let (code, lot) = bench_code(&name)?;
            if min_exp > max_exp || max_exp > 8 {
                bail!("need min-exp <= max-exp <= 8");
            }
            let mut csv = String::from("pattern,length,seconds,matched\n");
            for e in min_exp..=max_exp {
                let len = 10usize.pow(e);
                let text = scaling::product_text(&code, lot, len).with_context(|| format!("10^{e} is too short"))?;
                let (t, matched) = scaling::time_membership(&b.compiled, &text, Duration::from_millis(50));
                let _ = writeln!(csv, "{name},{len},{:.9},{matched}", t.as_secs_f64());
            }
            emit(&csv, out.as_deref())?;
            ExitCode::SUCCESS
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
