mod args;
mod commands;
mod fail;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use fail::{Fail, EXIT_USAGE};
use output::Run;

fn configure_threads(n: usize) -> Result<(), Fail> {
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::usage(format!("--threads: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn report(fail: &Fail, run_out: Option<&std::path::Path>) -> ExitCode {
    let j = fail.to_json();
    eprintln!("{}", serde_json::to_string(&j).expect("serializable"));
    if let Some(dir) = run_out.filter(|_| matches!(fail, Fail::Domain(_))) {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(
                dir.join("error.json"),
                serde_json::to_string_pretty(&j).expect("serializable") + "\n",
            );
        }
    }
    ExitCode::from(fail.code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let fail = Fail::usage(e.kind().to_string());
            eprintln!("{}", serde_json::to_string(&fail.to_json()).expect("serializable"));
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    if let Err(f) = configure_threads(cli.threads) {
        return report(&f, None);
    }
    let config = serde_json::to_value(&cli).expect("serializable");
    let mut run = Run::new(&cli.out, cli.command.name(), config);
    match commands::dispatch(&cli, &mut run).and_then(|text| run.finish().map(|_| text)) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            ExitCode::SUCCESS
        }
        Err(f) => report(&f, Some(&cli.out)),
    }
}
