use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;
use shapley_lg::cli::{self, Cli, CliError, Command};
use shapley_lg::io::write_json;
use shapley_lg::Error;

fn init_threads() {
    let Ok(v) = std::env::var("SHAPLEY_LG_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::warn!("could not size the thread pool: {e}");
            }
        }
        Err(_) => log::warn!("ignoring SHAPLEY_LG_THREADS={v}"),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(a) => write_json(a.out.as_deref(), &cli::cmd_compute(&a)?)?,
        Command::Estimate(a) => write_json(a.out.as_deref(), &cli::cmd_estimate(&a)?)?,
        Command::Generate(a) => write_json(a.out.as_deref(), &cli::cmd_generate(&a)?)?,
        Command::Mc(a) => write_json(a.out.as_deref(), &cli::cmd_mc(&a)?)?,
        Command::Benchmark(a) => {
            let rows = cli::cmd_benchmark(&a)?;
            match &a.out {
                Some(p) => cli::write_csv(&rows, BufWriter::new(File::create(p).map_err(Error::Io)?))?,
                None => cli::write_csv(&rows, io::stdout().lock())?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
