mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Output, RunConfig};

fn print(doc: &serde_json::Value, output: Output) {
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(doc).expect("valid JSON")),
        Output::Table => print!("{}", commands::render_table(doc)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(&cli) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(commands::EXIT_INVALID_CONFIG);
        }
    };
    match commands::run(&cfg) {
        Ok(doc) => {
            print(&doc, cfg.output);
            ExitCode::SUCCESS
        }
        Err(failure) => {
            if let Some(doc) = &failure.document {
                print(doc, cfg.output);
            }
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
