//! `llab`: batch front end to littlestone-lab.
//!
//! Exit status: 0 success, 1 unreadable or malformed input, 2 contract or
//! oracle fault (the report carries the witness), 3 resource guard.

#![allow(clippy::result_large_err)]

mod commands;
mod report;
mod roster;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::*;
use report::{error_body, to_pretty, write_atomic, Failure, Inputs};

#[derive(Parser)]
#[command(name = "llab", version, about = "Littlestone dimension laboratory")]
struct Cli {
    /// Report file, written atomically. Without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Littlestone and threshold dimension of a class.
    Dims(DimsArgs),
    /// Worst-case mistakes of a learner over all short realizable samples.
    Learn(LearnArgs),
    /// Play a sample against a learner.
    Game(GameArgs),
    /// Force mistakes along a function or down a shattered tree.
    Force(ForceArgs),
    /// Walk a tree against a learner to a leaf it cannot have avoided.
    Extract(ExtractArgs),
    /// Convert between leaf and threshold oracles and verify every answer.
    Convert(ConvertArgs),
    /// Split a leaf oracle at a point.
    Split(SplitArgs),
    /// Build the bounded-regime learner and check its mistake bound.
    Bounded(BoundedArgs),
    /// Run the diagonalization against a list of learners.
    Fool(FoolArgs),
    /// Check that a restriction stream defines a class of dimension at most 2.
    Certify(CertifyArgs),
    /// Run every acceptance property at reduced scale.
    Selftest(SelftestArgs),
}

impl Verb {
    fn dispatch(&self) -> (Inputs, Result<Done, Failure>) {
        macro_rules! go {
            ($name:literal, $f:ident, $a:expr) => {{
                let mut inputs = Inputs::new($name, $a);
                let r = $f($a, &mut inputs);
                (inputs, r)
            }};
        }
        match self {
            Verb::Dims(a) => go!("dims", dims, a),
            Verb::Learn(a) => go!("learn", learn, a),
            Verb::Game(a) => go!("game", game, a),
            Verb::Force(a) => go!("force", force, a),
            Verb::Extract(a) => go!("extract", extract, a),
            Verb::Convert(a) => go!("convert", convert, a),
            Verb::Split(a) => go!("split", split, a),
            Verb::Bounded(a) => go!("bounded", bounded, a),
            Verb::Fool(a) => go!("fool", fool, a),
            Verb::Certify(a) => go!("certify", certify, a),
            Verb::Selftest(a) => go!("selftest", selftest, a),
        }
    }
}

fn run(args: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let quiet = matches!(cli.verb, Verb::Selftest(_));
    let (inputs, result) = cli.verb.dispatch();
    let (code, envelope) = match result {
        Ok(done) => {
            let status = if done.fault { "fault" } else { "ok" };
            (if done.fault { 2 } else { 0 }, inputs.envelope(status, done.body))
        }
        Err(f) => {
            eprintln!("llab: {}", f.message());
            (f.exit_code(), inputs.envelope("error", error_body(&f)))
        }
    };
    let bytes = to_pretty(&envelope);
    match &cli.out {
        Some(path) => {
            if let Err(f) = write_atomic(path, &bytes) {
                eprintln!("llab: {}", f.message());
                return 1;
            }
        }
        None if !quiet => {
            let _ = std::io::stdout().write_all(&bytes);
        }
        None => {}
    }
    code
}

fn main() {
    std::process::exit(run(std::env::args_os()));
}
