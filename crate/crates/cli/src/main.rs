mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use shs_bench::BenchError;
use shs_core::ShsError;

use args::{Cli, Command};
use commands::{RunContext, UsageError};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    let numeric = err.chain().any(|cause| {
        matches!(cause.downcast_ref::<ShsError>(), Some(ShsError::NonFinite(_)))
            || cause.downcast_ref::<BenchError>().is_some_and(BenchError::is_numeric)
    });
    if numeric {
        EXIT_NUMERIC
    } else {
        EXIT_DATA
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let ctx = RunContext {
        seed: cli.seed,
        out: cli.out,
        scale: shs_bench::Scale::from_flag(cli.paper_scale),
        timing_strict: cli.timing_strict,
        force: cli.force,
    };
    match &cli.command {
        Command::Generate(args) => commands::generate_cmd(&ctx, args),
        Command::Prepare(args) => commands::prepare_cmd(&ctx, args),
        Command::Train(args) => commands::train_cmd(&ctx, args),
        Command::TrainMeta(args) => commands::train_meta_cmd(&ctx, args),
        Command::Eval(args) => commands::eval_cmd(&ctx, args),
        Command::Bench(args) => commands::bench_cmd(&ctx, args),
        Command::BenchMeta(args) => commands::bench_meta_cmd(&ctx, args),
        Command::Dynamic(args) => commands::dynamic_cmd(&ctx, args),
        Command::Sweep(args) => commands::sweep_cmd(&ctx, args),
        Command::Report(args) => commands::report_cmd(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
