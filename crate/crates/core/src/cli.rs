//! The `polysoliton` command-line tool.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a residual above `--tol`,
//! 2 on usage, input or output errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::io::{
    parse_affine_map, parse_point, polygon_from_csv, polygon_to_csv, polyline_svg, report_json,
    samples_to_csv, PolygonCsv,
};
use crate::polygon::{
    eigenpolygon, midpoint_map, shorten_t, soliton_recursion, verify_soliton, Polygon,
};
use crate::semidiscrete::evolve_closed;
use crate::zoo::{emit_samples, preset, preset_1c, Case1cCurve, PresetId};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "polysoliton",
    version,
    about = "Polygon shortening and its solitons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Sin,
    Exp,
    Cosh,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a catalogued soliton curve.
    Zoo {
        /// intro, 1a, 1b, 1c, 2a, 2b, 2c, 3, 3fig, 4, 5 or 6
        preset: String,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Curve used by preset 1c.
        #[arg(long, value_enum, default_value_t = Variant::Sin)]
        variant: Variant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply x_j ↦ α x_{j−1} + (1 − 2α) x_j + α x_{j+1} repeatedly.
    Shorten {
        input: PathBuf,
        #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the midpoint map x_j ↦ ½(x_j + x_{j+1}).
    Midpoint {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a closed polygon under the semidiscrete flow for time s.
    Evolve {
        input: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a polygon is a soliton and print a JSON report.
    Verify {
        input: PathBuf,
        /// `{"A": [row-major], "b": [...]}` or `scale:<factor>`; fitted when omitted.
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Regular N-gon traversed with step k.
    Eigen {
        n: usize,
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polygon generated by a soliton map from two consecutive vertices.
    Recursion {
        /// `{"A": [row-major], "b": [...]}` or `scale:<factor>`.
        #[arg(long)]
        map: String,
        /// Vertex x_{j0}, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Vertex x_{j0+1}, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        j0: i64,
        #[arg(long, allow_hyphen_values = true)]
        j_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        j_max: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type CmdResult = std::result::Result<i32, String>;

fn read_polygon(path: &Path) -> std::result::Result<PolygonCsv, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    polygon_from_csv(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}"))?,
    }
    Ok(EXIT_OK)
}

fn emit_polygon(x: &Polygon, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    emit(out, &polygon_to_csv(x, None), stdout)
}

fn cmd_zoo(
    id: &str,
    points: usize,
    format: Format,
    variant: Variant,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let id: PresetId = id.parse().map_err(|e| format!("{e}"))?;
    let p = if id == PresetId::Case1c {
        preset_1c(match variant {
            Variant::Sin => Case1cCurve::Sin,
            Variant::Exp => Case1cCurve::Exp,
            Variant::Cosh => Case1cCurve::Cosh,
        })
    } else {
        preset(id)
    };
    let samples = emit_samples(&p, points).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Csv => samples_to_csv(&samples),
        Format::Svg => {
            let pts: Vec<_> = samples.into_iter().map(|(_, c)| c).collect();
            polyline_svg(&pts, false).map_err(|e| e.to_string())?
        }
    };
    emit(out, &text, stdout)
}

fn cmd_shorten(
    input: &Path,
    alpha: f64,
    iterations: usize,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CmdResult {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(format!("alpha must be finite and nonzero, got {alpha}"));
    }
    if iterations == 0 {
        return Err("iterations must be at least 1".into());
    }
    let mut x = read_polygon(input)?.polygon;
    for i in 0..iterations {
        if !x.is_closed() && x.len() < 5 {
            return Err(format!(
                "open window of {} vertices would shrink below 3 at iteration {}",
                x.len(),
                i + 1
            ));
        }
        x = shorten_t(&x, alpha).map_err(|e| e.to_string())?;
    }
    emit_polygon(&x, out, stdout)
}

fn cmd_verify(input: &Path, map: Option<&str>, tol: f64, stdout: &mut dyn Write) -> CmdResult {
    let x = read_polygon(input)?.polygon;
    let map = map
        .map(|m| parse_affine_map(m, x.dim()))
        .transpose()
        .map_err(|e| e.to_string())?;
    let report = verify_soliton(&x, map.as_ref()).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&report_json(&report)).map_err(|e| e.to_string())?;
    writeln!(stdout, "{json}").map_err(|e| format!("cannot write to stdout: {e}"))?;
    Ok(if report.max_residual <= tol {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Zoo {
            preset,
            points,
            format,
            variant,
            out,
        } => cmd_zoo(&preset, points, format, variant, out.as_deref(), stdout),
        Command::Shorten {
            input,
            alpha,
            iterations,
            out,
        } => cmd_shorten(&input, alpha, iterations, out.as_deref(), stdout),
        Command::Midpoint { input, out } => {
            let x = read_polygon(&input)?.polygon;
            let m = midpoint_map(&x).map_err(|e| e.to_string())?;
            emit_polygon(&m, out.as_deref(), stdout)
        }
        Command::Evolve { input, s, out } => {
            let x = read_polygon(&input)?.polygon;
            let y = evolve_closed(&x, s).map_err(|e| e.to_string())?;
            emit_polygon(&y, out.as_deref(), stdout)
        }
        Command::Verify { input, map, tol } => cmd_verify(&input, map.as_deref(), tol, stdout),
        Command::Eigen { n, k, out } => {
            let (x, _) = eigenpolygon(n, k).map_err(|e| e.to_string())?;
            emit_polygon(&x, out.as_deref(), stdout)
        }
        Command::Recursion {
            map,
            u,
            v,
            j0,
            j_min,
            j_max,
            out,
        } => {
            let u = parse_point(&u).map_err(|e| e.to_string())?;
            let v = parse_point(&v).map_err(|e| e.to_string())?;
            let map = parse_affine_map(&map, u.len()).map_err(|e| e.to_string())?;
            let x = soliton_recursion(&map, &u, &v, j0, j_min, j_max).map_err(|e| e.to_string())?;
            emit_polygon(&x, out.as_deref(), stdout)
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("polysoliton").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn zoo_endpoints() {
        let (code, out, _) = run_capture(&["zoo", "5", "--points", "2"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,-3.0000000000000000e0,"));
        assert!(lines[2].starts_with("1,3.0000000000000000e0,"));
    }

    #[test]
    fn unknown_preset_is_usage_error() {
        let (code, _, err) = run_capture(&["zoo", "bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("bogus"));
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert_eq!(run_capture(&["zoo"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn zoo_svg() {
        let (code, out, _) = run_capture(&["zoo", "1a", "--points", "50", "--format", "svg"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("<svg"));
    }

    #[test]
    fn eigen_output() {
        let (code, out, _) = run_capture(&["eigen", "12", "1"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("# topology=closed N=12\n"));
        assert_eq!(out.lines().count(), 14);
    }

    #[test]
    fn recursion_with_scaling() {
        let (code, out, _) = run_capture(&[
            "recursion",
            "--map",
            "scale:1",
            "--u",
            "0,0",
            "--v",
            "1,-2",
            "--j-min",
            "-2",
            "--j-max",
            "3",
        ]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("# topology=open j_min=-2 j_max=3"));
        assert!(out.contains("\n-2,,-2.0000000000000000e0,4.0000000000000000e0\n"));
    }
}
