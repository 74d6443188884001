//! `ortho3r`: classify orthogonal 3R manipulators, trace their singular
//! curves, sweep performance maps and solve their kinematics.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 classification within
//! the instability band of a separating surface.

mod commands;
mod contour;
mod plots;
mod schema;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ortho3r::perf::MapKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ortho3r::error::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "ortho3r",
    version,
    about = "Singularity, topology and performance analysis of orthogonal 3R manipulators"
)]
struct Cli {
    /// Directory receiving written files.
    #[arg(long, global = true, env = "ORTHO3R_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Print the versioned schemas of every output format and exit.
    #[arg(long)]
    schema: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cusp domain, topology id and region census of one manipulator.
    Classify(ClassifyArgs),
    /// Singular branches and their workspace images, with cusps and nodes.
    Curves(CurvesArgs),
    /// Map of the K⁻¹ mean or maximum over a (d3, d4) section.
    Kmap(MapArgs),
    /// Map of the 4-, 2- or all-solution workspace proportion over a (d3, d4) section.
    Volmap(MapArgs),
    /// All joint configurations reaching a Cartesian point.
    Ik(IkArgs),
    /// Effector position of one joint configuration.
    Fk(FkArgs),
    /// Rebuild the topology table from numeric counts.
    Calibrate(CalibrateArgs),
}

/// Geometry in units of d2; `--d2` sets the physical length of d2.
#[derive(Debug, Clone, Args)]
pub struct Manipulator {
    #[arg(long, allow_negative_numbers = true)]
    pub d3: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub d4: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r2: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub d2: f64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub m: Manipulator,
    /// Half-section census resolution (cells along rho).
    #[arg(long, default_value_t = ortho3r::classify::DEFAULT_CENSUS_RESOLUTION)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub m: Manipulator,
    /// Samples per branch in the written polylines.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// File name prefix inside the output directory.
    #[arg(long, default_value = "curves")]
    pub out: String,
    /// Also write <out>.svg.
    #[arg(long)]
    pub svg: bool,
}

/// `lo:hi` or `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub n: Option<usize>,
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("expected lo:hi or lo:hi:n, got `{s}`"));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let n = match parts.get(2) {
        Some(t) => Some(
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("`{t}`: {e}"))?,
        ),
        None => None,
    };
    Ok(Range {
        lo: num(parts[0])?,
        hi: num(parts[1])?,
        n,
    })
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// kmap: mean or max; volmap: p4, p2 or total.
    #[arg(long)]
    pub kind: Option<MapKind>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub r2: f64,
    /// d3 range, `lo:hi` or `lo:hi:n` (25 samples when n is omitted).
    #[arg(long, default_value = "0.05:5", value_parser = parse_range, allow_negative_numbers = true)]
    pub d3: Range,
    /// d4 range, same form as --d3.
    #[arg(long, default_value = "0.05:5", value_parser = parse_range, allow_negative_numbers = true)]
    pub d4: Range,
    /// Resolution of the per-manipulator sweep (joint grid or section grid).
    #[arg(long)]
    pub inner: Option<usize>,
    /// Contour levels, comma separated; evenly spaced when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub levels: Option<Vec<f64>>,
    /// Number of evenly spaced levels when --levels is omitted.
    #[arg(long, default_value_t = 8)]
    pub nlevels: usize,
    /// File name prefix inside the output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Also write <out>.svg with the contours.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct IkArgs {
    #[command(flatten)]
    pub m: Manipulator,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    /// Report angles in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct FkArgs {
    #[command(flatten)]
    pub m: Manipulator,
    #[arg(long, allow_negative_numbers = true)]
    pub theta1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta2: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub theta3: f64,
    /// Angles are given in degrees.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Output file inside the output directory.
    #[arg(long, default_value = "wt_table.json")]
    pub out: String,
    /// Samples along d3 and along d4 in [0.05, 5].
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = ortho3r::classify::DEFAULT_CENSUS_RESOLUTION)]
    pub census_grid: usize,
    #[arg(long, default_value_t = 256)]
    pub aspect_grid: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.schema {
        print!("{}", schema::render());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(1);
    };
    let out = commands::Output::new(cli.out_dir, cli.json);
    let result = match command {
        Command::Classify(a) => commands::classify(&out, &a),
        Command::Curves(a) => commands::curves(&out, &a),
        Command::Kmap(a) => commands::map(&out, &a, false),
        Command::Volmap(a) => commands::map(&out, &a, true),
        Command::Ik(a) => commands::ik(&out, &a),
        Command::Fk(a) => commands::fk(&out, &a),
        Command::Calibrate(a) => commands::calibrate(&out, &a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(
            parse_range("0.05:5").unwrap(),
            Range {
                lo: 0.05,
                hi: 5.0,
                n: None
            }
        );
        assert_eq!(parse_range("1:2:7").unwrap().n, Some(7));
        assert!(parse_range("1").is_err());
        assert!(parse_range("a:2").is_err());
        assert!(parse_range("1:2:3:4").is_err());
    }

    #[test]
    fn negative_lengths_parse_then_fail_validation() {
        let cli = Cli::try_parse_from(["ortho3r", "classify", "--d3", "-1", "--d4", "1"]).unwrap();
        let Some(Command::Classify(a)) = cli.command else {
            panic!()
        };
        assert_eq!(a.m.d3, -1.0);
    }
}
