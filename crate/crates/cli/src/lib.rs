//! Command-line front end: file parsing, reports and subcommands.

pub mod commands;
pub mod fixtures;
pub mod parse;
pub mod report;

use clap::Parser;

use commands::{Cli, Format, Output};

/// Exit status, standard output and standard error of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == 0 { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    match commands::execute(cli.command) {
        Ok(Output::Raw(text)) => Outcome {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
        Ok(Output::Report(r, ok)) => Outcome {
            code: if ok { 0 } else { 1 },
            stdout: match cli.format {
                Format::Text => r.text(),
                Format::Json => r.json(),
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
