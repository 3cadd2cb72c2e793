use std::process::ExitCode;

use clap::Parser;
use fracsync_cli::args::Cli;
use fracsync_cli::runner::{resolve_out_dir, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match cli.command.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.global.seed_override {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    let env = std::env::var("FRACSYNC_OUT").ok();
    let out = resolve_out_dir(cli.global.out.as_deref(), &cfg, env.as_deref());
    match run(&cfg, &out) {
        Ok(outcome) => {
            for v in &outcome.verdicts {
                println!("{} {} statistic={:.6e} tolerance={:.3e}", if v.pass { "PASS" } else { "FAIL" }, v.experiment, v.statistic, v.tolerance);
            }
            println!("artifacts: {}", outcome.out_dir.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
