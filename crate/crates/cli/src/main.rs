//! Command-line front end: one spec file and one verb per invocation, one
//! canonical JSON report on stdout or in `--out`.

mod verbs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use verbs::{CliError, JobSpec};

/// Parallelism of the worker pool; unset means one thread per core.
const THREADS_VAR: &str = "KSYMVAR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ksymvar", version, about = "Equivariant K-theory of complete symmetric varieties of minimal rank")]
struct Args {
    /// Job spec (JSON): datum, optional subdivision, optional verb and args.
    #[arg(long)]
    spec: PathBuf,
    /// One of the verbs listed by `--help`; overrides `verb` in the job file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(verbs::VERBS))]
    verb: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exponent bound for turning a localized class into a Stanley-Reisner element.
    #[arg(long = "box")]
    bound: Option<i64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Env(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Env(e.to_string()))
}

fn load(args: &Args) -> Result<(JobSpec, String), CliError> {
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.spec.display())))?;
    let job: JobSpec = serde_json::from_str(&text).map_err(|e| CliError::Spec(e.to_string()))?;
    let verb = args
        .verb
        .clone()
        .or_else(|| job.verb.clone())
        .ok_or_else(|| CliError::Spec("no verb given".into()))?;
    Ok((job, verb))
}

fn run(args: &Args) -> Result<(Value, bool), CliError> {
    configure_threads()?;
    let (job, verb) = load(args)?;
    verbs::run(&job, &verb, args.bound)
}

fn emit(doc: &Value, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let out = args.out.as_ref();
    match run(&args) {
        Ok((report, ok)) => match emit(&report, out) {
            Ok(()) if ok => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                eprintln!("{}", json!({ "error": e.to_json() }));
                ExitCode::from(2)
            }
        },
        Err(e) => {
            let doc = json!({ "error": e.to_json() });
            if emit(&doc, out).is_err() {
                eprintln!("{doc}");
            }
            ExitCode::from(2)
        }
    }
}
