use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cinfty::rational::parse_rational;
use cinfty::session::{render_error, render_record, Format, Options, Session, SessionError};
use cinfty::termlang::RatBox;
use cinfty::zerocert::{check_verdict, QueryBudget, Verdict};

const USAGE_ERROR: u8 = 64;

#[derive(Parser)]
#[command(name = "cinfty", version, about = "Run session scripts over finitely presented smooth rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a script, one command per line (`-` reads stdin).
    Run(RunArgs),
    /// Re-validate every certificate and witness in structured output.
    Check {
        /// File of structured records (`-` reads stdin).
        file: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

#[derive(clap::Args)]
struct RunArgs {
    script: String,
    /// Default box, `lo,hi` for every variable or `lo,hi;lo,hi;...`.
    #[arg(long = "box", default_value = "-2,2")]
    region: String,
    #[arg(long)]
    depth: Option<u32>,
    /// Smallest box width before giving up, as a rational such as 1/1024.
    #[arg(long)]
    min_width: Option<String>,
    #[arg(long)]
    max_boxes: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Exit 2 when any verdict is UNKNOWN.
    #[arg(long)]
    strict: bool,
    /// Attach the certificate or witness of every decided verdict.
    #[arg(long)]
    certificates: bool,
    /// Worker threads for the query search (0 picks the machine default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Leave timings out of structured records.
    #[arg(long)]
    omit_timing: bool,
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn usage(message: String) -> ExitCode {
    eprintln!("cinfty: {message}");
    ExitCode::from(USAGE_ERROR)
}

fn options(args: &RunArgs) -> Result<Options, String> {
    let mut budget = QueryBudget::default();
    if let Some(d) = args.depth {
        budget.max_depth = d;
    }
    if let Some(w) = &args.min_width {
        budget.min_width = parse_rational(w).ok_or_else(|| format!("--min-width: `{w}` is not a rational"))?;
    }
    if let Some(m) = args.max_boxes {
        budget.max_boxes = m;
    }
    if !budget.is_valid() {
        return Err("budget must have positive depth, width and box count".into());
    }
    let region = RatBox::parse(&args.region).ok_or_else(|| format!("--box: cannot read `{}`", args.region))?;
    Ok(Options {
        budget,
        default_box: region.bounds().to_vec(),
        certificates: args.certificates,
        timing: !args.omit_timing,
    })
}

fn run(args: RunArgs) -> ExitCode {
    let opts = match options(&args) {
        Ok(o) => o,
        Err(m) => return usage(m),
    };
    let script = match read_input(&args.script) {
        Ok(s) => s,
        Err(e) => return usage(format!("{}: {e}", args.script)),
    };
    let format = match args.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Structured => Format::Structured,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.threads).build() {
        Ok(p) => p,
        Err(e) => return usage(format!("--threads: {e}")),
    };
    let outcome = pool.install(|| {
        let mut session = Session::new(opts);
        let mut stdout = io::stdout().lock();
        // Records are written as they complete so long scripts show progress.
        let mut records = Vec::new();
        let mut error: Option<SessionError> = None;
        for (i, text) in script.lines().enumerate() {
            let result = cinfty::session::parse_line(i + 1, text)
                .and_then(|cmd| cmd.map(|c| session.execute(&c)).transpose());
            match result {
                Ok(Some(r)) => {
                    let _ = writeln!(stdout, "{}", render_record(&r, format));
                    records.push(r);
                }
                Ok(None) => {}
                Err(e) => {
                    error = Some(e);
                    break;
                }
            }
        }
        cinfty::session::RunOutcome { records, error }
    });
    if let Some(e) = &outcome.error {
        match format {
            Format::Structured => println!("{}", render_error(e, format)),
            Format::Text => eprintln!("{}", render_error(e, format)),
        }
    }
    ExitCode::from(outcome.exit_code(args.strict) as u8)
}

/// Every `trace` in a record, including those of its secondary checks.
fn traces(record: &serde_json::Value) -> Vec<&serde_json::Value> {
    let mut out: Vec<&serde_json::Value> = record.get("trace").into_iter().collect();
    if let Some(checks) = record.get("checks").and_then(|c| c.as_array()) {
        out.extend(checks.iter().filter_map(|c| c.get("trace")));
    }
    out
}

fn check(file: &str) -> ExitCode {
    let text = match read_input(file) {
        Ok(s) => s,
        Err(e) => return usage(format!("{file}: {e}")),
    };
    let (mut valid, mut invalid) = (0usize, 0usize);
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: serde_json::Value = match serde_json::from_str(line) {
            Ok(v) => v,
            Err(e) => return usage(format!("line {}: not a structured record: {e}", i + 1)),
        };
        for trace in traces(&record) {
            let verdict: Verdict = match serde_json::from_value(trace.clone()) {
                Ok(v) => v,
                Err(e) => return usage(format!("line {}: malformed trace: {e}", i + 1)),
            };
            match check_verdict(&verdict) {
                Ok(()) => valid += 1,
                Err(e) => {
                    invalid += 1;
                    println!("line {}: INVALID ({e})", i + 1);
                }
            }
        }
    }
    println!("{valid} valid, {invalid} invalid");
    if invalid == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run(args) => run(args),
        Command::Check { file } => check(&file),
    }
}
