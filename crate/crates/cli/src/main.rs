use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use sympack_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("SYMPACK_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            let mut body = out.body;
            body.push('\n');
            let written = match &cli.out {
                Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(body.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!(
                    "{}",
                    serde_json::json!({"error": {"code": "E_IO", "kind": "io", "message": e}})
                );
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
