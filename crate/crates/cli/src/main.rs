//! Batch front end for the graded-calculus engines.
//!
//! ```text
//! gradecalc <task> --config <path> [--out <path>] [--weight-cap W] [--trunc D]
//! ```
//!
//! The config path `-` reads from stdin. Reports are deterministic JSON on
//! stdout (or `--out`). Exit codes: 0 success, 1 validation error, 2
//! integrity violation (a coboundary that fails to square to zero, bad
//! structure constants, incompatible restrictions).

use std::io::Read;
use std::process::ExitCode;

mod config;
mod tasks;

use config::Config;

const USAGE: &str = "usage: gradecalc <task> --config <path> [--out <path>] [--weight-cap W] [--trunc D]
tasks: eval, d, wedge, cohomology, lie, cech, op-order, jets, curvature, universal, filtration
config path `-` reads from stdin";

struct Args {
    task: String,
    config_path: String,
    out: Option<String>,
    weight_cap: Option<u32>,
    trunc: Option<u32>,
}

fn parse_args(argv: &[String]) -> Result<Args, String> {
    let mut task = None;
    let mut config_path = None;
    let mut out = None;
    let mut weight_cap = None;
    let mut trunc = None;
    let mut i = 0;
    while i < argv.len() {
        match argv[i].as_str() {
            "--config" => {
                i += 1;
                config_path = Some(argv.get(i).ok_or("--config needs a path")?.clone());
            }
            "--out" => {
                i += 1;
                out = Some(argv.get(i).ok_or("--out needs a path")?.clone());
            }
            "--weight-cap" => {
                i += 1;
                let v = argv.get(i).ok_or("--weight-cap needs a number")?;
                weight_cap = Some(v.parse().map_err(|_| "bad --weight-cap value")?);
            }
            "--trunc" => {
                i += 1;
                let v = argv.get(i).ok_or("--trunc needs a number")?;
                trunc = Some(v.parse().map_err(|_| "bad --trunc value")?);
            }
            "--help" | "-h" => return Err(USAGE.to_string()),
            flag if flag.starts_with("--") => {
                return Err(format!("unknown flag `{flag}`\n{USAGE}"));
            }
            word => {
                if task.is_some() {
                    return Err(format!("unexpected argument `{word}`\n{USAGE}"));
                }
                task = Some(word.to_string());
            }
        }
        i += 1;
    }
    Ok(Args {
        task: task.ok_or(USAGE)?,
        config_path: config_path.ok_or("missing --config <path>")?,
        out,
        weight_cap,
        trunc,
    })
}

fn read_config(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let args = match parse_args(&argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };
    let text = match read_config(&args.config_path) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };
    let mut cfg = match Config::parse(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    // the positional task selects (and must agree with) the config's task kind
    if let Err(e) = cfg.select_task(&args.task) {
        eprintln!("{e}");
        return ExitCode::from(1);
    }
    match tasks::run(&cfg, args.weight_cap, args.trunc) {
        Ok(report) => {
            let rendered = format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("json renders")
            );
            match &args.out {
                None => print!("{rendered}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("cannot write `{path}`: {e}");
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code as u8)
        }
    }
}
