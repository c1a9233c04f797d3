//! Command-line surface.
//!
//! Exit codes: 0 success, 1 validation failure or non-isomorphic comparison,
//! 2 unreadable input, 3 bound exhausted under `--require-saturation`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::io::{
    emit_dot, read_json, write_json, write_text, IoError, LabeledNetFile, ModeFile, NetFile,
    SpreadFile,
};
use crate::mcnet::McNet;
use crate::modes::{spread_with_mode, ModeError};
use crate::net::Net;
use crate::oracle::{isomorphic, trellis_oracle, unfold_bp_oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNSATURATED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spreadnet",
    version,
    about = "Spread multi-clock Petri nets over ticking domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Against {
    Bp,
    Trellis,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a net file describes a valid mc-net.
    Validate {
        #[arg(long)]
        net: PathBuf,
    },
    /// Spread a net with a mode and write the result.
    Spread {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        mode: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long)]
        require_saturation: bool,
    },
    /// Write the branching-process prefix of the given depth.
    UnfoldBp {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the trellis prefix of the given height.
    Trellis {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a depth-bounded spreading with an oracle prefix.
    Compare {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        mode: PathBuf,
        #[arg(long, value_enum)]
        against: Against,
        #[arg(long)]
        depth: usize,
    },
}

struct Failure(i32, String);

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let code = if e.is_validation() {
            EXIT_INVALID
        } else {
            EXIT_PARSE
        };
        Failure(code, e.to_string())
    }
}

impl From<ModeError> for Failure {
    fn from(e: ModeError) -> Self {
        Failure(EXIT_INVALID, e.to_string())
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_PARSE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn load_net(path: &Path) -> Result<McNet, Failure> {
    Ok(read_json::<NetFile>(path)?.to_mcnet()?)
}

fn execute(
    command: Command,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    match command {
        Command::Validate { net } => {
            let file: NetFile = read_json(&net)?;
            match file.to_mcnet() {
                Ok(mc) => {
                    let _ = writeln!(stdout, "valid: {} components", mc.dimension());
                    Ok(EXIT_OK)
                }
                Err(IoError::NotAnMcNet(e)) => {
                    let _ = writeln!(stderr, "{}", e.0);
                    Ok(EXIT_INVALID)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Spread {
            net,
            mode,
            out,
            dot,
            require_saturation,
        } => {
            let mc = load_net(&net)?;
            let spec = read_json::<ModeFile>(&mode)?.to_spec()?;
            let s = spread_with_mode(&mc, &spec)?;
            write_json(&out, &SpreadFile::from_spreading(&s))?;
            if let Some(dot) = dot {
                write_text(&dot, &emit_dot(&s.net))?;
            }
            let n = s.net.mc.net();
            let _ = writeln!(
                stdout,
                "{} places, {} transitions, {}",
                n.place_count(),
                n.transition_count(),
                if s.saturated {
                    "saturated"
                } else {
                    "not saturated"
                }
            );
            if require_saturation && !s.saturated {
                let _ = writeln!(stderr, "bound exhausted before saturation");
                return Ok(EXIT_UNSATURATED);
            }
            Ok(EXIT_OK)
        }
        Command::UnfoldBp { net, depth, out } => {
            let u = unfold_bp_oracle(&load_net(&net)?, depth)
                .map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            write_oracle(&out, &u, stdout)
        }
        Command::Trellis { net, height, out } => {
            let t = trellis_oracle(&load_net(&net)?, height)
                .map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            write_oracle(&out, &t, stdout)
        }
        Command::Compare {
            net,
            mode,
            against,
            depth,
        } => {
            let mc = load_net(&net)?;
            let mut spec = read_json::<ModeFile>(&mode)?.to_spec()?;
            spec.bounds.max_depth = Some(depth);
            let s = spread_with_mode(&mc, &spec)?;
            let oracle = match against {
                Against::Bp => unfold_bp_oracle(&mc, depth),
                Against::Trellis => trellis_oracle(&mc, depth),
            }
            .map_err(|e| Failure(EXIT_INVALID, e.to_string()))?;
            let spread = s.net.mc.net();
            match isomorphic(spread, &oracle) {
                Some(iso) => {
                    let witness = Witness {
                        places: iso
                            .places
                            .iter()
                            .map(|(a, b)| (a.0.clone(), b.0.clone()))
                            .collect(),
                        transitions: iso
                            .transitions
                            .iter()
                            .map(|(a, b)| (a.0.clone(), b.0.clone()))
                            .collect(),
                    };
                    let _ = writeln!(
                        stdout,
                        "{}",
                        serde_json::to_string_pretty(&witness).unwrap()
                    );
                    Ok(EXIT_OK)
                }
                None => {
                    let _ = writeln!(stdout, "not isomorphic: {}", discrepancy(spread, &oracle));
                    Ok(EXIT_INVALID)
                }
            }
        }
    }
}

fn write_oracle(out: &Path, net: &Net, stdout: &mut dyn Write) -> Result<i32, Failure> {
    write_json(out, &LabeledNetFile::from_net(net))?;
    let _ = writeln!(
        stdout,
        "{} places, {} transitions",
        net.place_count(),
        net.transition_count()
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Witness {
    places: BTreeMap<String, String>,
    transitions: BTreeMap<String, String>,
}

/// First difference found between two non-isomorphic nets.
fn discrepancy(a: &Net, b: &Net) -> String {
    fn histogram<'a>(labels: impl Iterator<Item = &'a str>) -> BTreeMap<&'a str, usize> {
        let mut h = BTreeMap::new();
        for l in labels {
            *h.entry(l).or_default() += 1;
        }
        h
    }
    let pa = histogram(
        a.places()
            .map(|p| a.place_label(p.as_str()).unwrap().as_str()),
    );
    let pb = histogram(
        b.places()
            .map(|p| b.place_label(p.as_str()).unwrap().as_str()),
    );
    let ta = histogram(a.transitions().map(|(_, t)| t.label.as_str()));
    let tb = histogram(b.transitions().map(|(_, t)| t.label.as_str()));
    let first = |x: &BTreeMap<&str, usize>, y: &BTreeMap<&str, usize>| {
        x.keys()
            .chain(y.keys())
            .find(|k| x.get(*k) != y.get(*k))
            .map(|k| {
                (
                    k.to_string(),
                    x.get(k).copied().unwrap_or(0),
                    y.get(k).copied().unwrap_or(0),
                )
            })
    };
    if let Some((l, x, y)) = first(&pa, &pb) {
        return format!("{x} places labelled `{l}` in the spreading, {y} in the oracle");
    }
    if let Some((l, x, y)) = first(&ta, &tb) {
        return format!("{x} transitions labelled `{l}` in the spreading, {y} in the oracle");
    }
    if a.flow_size() != b.flow_size() {
        return format!(
            "{} arcs in the spreading, {} in the oracle",
            a.flow_size(),
            b.flow_size()
        );
    }
    "same label counts, but no bijection preserves the flow relation".to_owned()
}
