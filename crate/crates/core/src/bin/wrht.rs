use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use weighted_rht::cli::{exit_code, parse, run, Options};
use weighted_rht::exactlin::Scalar;
use weighted_rht::graded::DegreeWindow;

/// Exact weight-graded rational homotopy models.
#[derive(Parser, Debug)]
#[command(name = "wrht", version)]
struct Args {
    /// check, cohomology, minimal-model, quillen, ce, transfer, segment,
    /// map-model, aut-model, loop-model, ul-dims or verify-suite
    command: String,
    /// Input document; `-` reads standard input.
    input: Option<PathBuf>,
    /// Degree window `a..b`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Highest arity of transferred operations.
    #[arg(long)]
    arity: Option<usize>,
    /// Slope for segmentation, e.g. `1` or `3/2`.
    #[arg(long)]
    alpha: Option<String>,
    /// Block to operate on (default: the first suitable one).
    #[arg(long)]
    block: Option<String>,
    /// Loop model kind: free or cyclic.
    #[arg(long)]
    kind: Option<String>,
    /// Formal dimension for the aut-model interval check.
    #[arg(long)]
    dim: Option<i32>,
    /// Indent the JSON output.
    #[arg(long)]
    pretty: bool,
}

fn usage(msg: String) -> ExitCode {
    eprintln!("wrht: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let window = match args.window.as_deref().map(str::parse::<DegreeWindow>).transpose() {
        Ok(w) => w,
        Err(e) => return usage(e.to_string()),
    };
    let alpha = match args.alpha.as_deref().map(str::parse::<Scalar>).transpose() {
        Ok(a) => a,
        Err(e) => return usage(format!("bad --alpha: {e}")),
    };
    let opts = Options { window, arity: args.arity, alpha, block: args.block, kind: args.kind, dim: args.dim };
    let doc = match &args.input {
        None => None,
        Some(path) => {
            let mut text = String::new();
            let read = if path.as_os_str() == "-" { std::io::stdin().read_to_string(&mut text).map(|_| ()) } else { std::fs::read_to_string(path).map(|t| text = t) };
            if let Err(e) = read {
                return usage(format!("{}: {e}", path.display()));
            }
            match parse(&text) {
                Ok(d) => Some(d),
                Err(e) => return usage(format!("{}: {e}", path.display())),
            }
        }
    };
    let start = Instant::now();
    let out = run(&args.command, doc.as_ref(), &opts);
    let code = exit_code(&out);
    match out {
        Ok(rep) => {
            let mut v = rep.value;
            v["timing_ms"] = serde_json::json!(start.elapsed().as_millis() as u64);
            let s = if args.pretty { serde_json::to_string_pretty(&v) } else { serde_json::to_string(&v) };
            println!("{}", s.expect("JSON values serialize"));
        }
        Err(e) => eprintln!("wrht: {e}"),
    }
    ExitCode::from(code as u8)
}
