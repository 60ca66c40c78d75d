mod args;
mod commands;
mod config;
mod exit;
mod output;

use clap::Parser;

use crate::args::Cli;

fn run() -> i32 {
    let argv = match config::merge_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit::USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = commands::run(&cli.command).and_then(|o| {
        output::emit(o.name, &o.body, cli.out.as_deref())?;
        match o.failure {
            Some(f) => Err(f.into()),
            None => Ok(()),
        }
    });
    match outcome {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::code_for(&e)
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("DIRACSHELL_LOG", "warn")).init();
    std::process::exit(run());
}
