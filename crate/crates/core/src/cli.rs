//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failed or nothing found, 2 bad
//! input or usage, 3 internal invariant failure.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::chaincode::parse_code;
use crate::generator::{enumerate_by_length, random_orthotube, GenError};
use crate::lattice::{format_tube, parse_tube, Cell, Direction, FaceId, Orthotube};
use crate::oracle::{enumerate_unfoldings, OracleLimits};
use crate::par;
use crate::render::{render_svg, RenderOptions};
use crate::surface::Cursor;
use crate::unfolder::unfold;
use crate::verifier::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "orthounfold", version, about = "Grid unfolding of orthotubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Unfold a tube and print its chain code and start cursor.
    Unfold {
        tube: PathBuf,
        /// Write the net as SVG to this file.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        checkpoints: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a chain code against a tube.
    Verify {
        tube: PathBuf,
        #[arg(long)]
        code: String,
        /// Start cursor as x,y,z,normal,heading, e.g. 0,0,0,-X,+Y.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a seeded random tube.
    Gen {
        #[arg(long)]
        boxes: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List canonical tubes up to a length, or count them per length.
    Enum {
        #[arg(long)]
        max_boxes: usize,
        #[arg(long)]
        count_only: bool,
        /// Worker threads; 0 picks the default.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Search exhaustively for unfoldings of a small tube.
    Oracle {
        tube: PathBuf,
        /// List every unfolding instead of stopping at the first.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        max_nodes: Option<u64>,
        /// Search one start cursor per symmetry orbit.
        #[arg(long)]
        symmetry: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Render the net of a bare chain code as SVG.
    Render {
        #[arg(long)]
        code: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        scale: u32,
        #[arg(long, default_value_t = 16)]
        margin: u32,
        #[arg(long)]
        show_dual: bool,
    },
}

/// A failed command: exit code plus message for the error stream.
struct Failure(i32, String);

fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

/// Run with process stdout/stderr. Report words are colored only on a
/// terminal and when `NO_COLOR` is unset.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let color = io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    run_cli_with(argv, &mut out, &mut err, color)
}

pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, color) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, color: bool) -> Result<i32, Failure> {
    match cmd {
        Command::Unfold { tube, svg, checkpoints, format } => {
            cmd_unfold(&tube, svg.as_deref(), checkpoints, format, out)
        }
        Command::Verify { tube, code, start, format } => {
            cmd_verify(&tube, &code, &start, format, out, color)
        }
        Command::Gen { boxes, seed, out: path } => cmd_gen(boxes, seed, path.as_deref(), out),
        Command::Enum { max_boxes, count_only, jobs } => cmd_enum(max_boxes, count_only, jobs, out),
        Command::Oracle { tube, all, max_nodes, symmetry, jobs } => {
            let tube = read_tube(&tube)?;
            let limits = OracleLimits {
                max_results: if all { usize::MAX } else { 1 },
                max_nodes: max_nodes.unwrap_or(u64::MAX),
                reduce_symmetry: symmetry,
            };
            let result = par::with_jobs(jobs, || enumerate_unfoldings(&tube, limits));
            let mut text = String::new();
            for (start, code) in &result.codes {
                text.push_str(&format!("{} {}\n", format_cursor(*start), code));
            }
            text.push_str(&format!(
                "codes {} explored {} truncated {}\n",
                result.codes.len(),
                result.explored,
                result.truncated
            ));
            emit(out, &text)?;
            Ok(if result.codes.is_empty() { EXIT_FAIL } else { EXIT_OK })
        }
        Command::Render { code, svg, scale, margin, show_dual } => {
            let code = parse_code(&code).map_err(input_err)?;
            let opts = RenderOptions { scale, show_dual, margin };
            let doc = render_svg(&code, &opts);
            match svg {
                Some(path) => write_file(&path, &doc)?,
                None => emit(out, &doc)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn cmd_unfold(
    path: &Path,
    svg: Option<&Path>,
    checkpoints: bool,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let tube = read_tube(path)?;
    let u = unfold(&tube).map_err(|e| Failure(EXIT_INTERNAL, e.to_string()))?;
    if let Some(p) = svg {
        write_file(p, &render_svg(&u.code, &RenderOptions::default()))?;
    }
    let text = match format {
        Format::Text => {
            let mut s = format!("code {}\nstart {}\n", u.code, format_cursor(u.start));
            if checkpoints {
                for c in &u.checkpoints {
                    s.push_str(&format!("checkpoint {} {}\n", c.box_index, c.code_len));
                }
            }
            s
        }
        Format::Json => {
            let mut v = json!({
                "boxes": tube.len(),
                "code": u.code.to_string(),
                "start": format_cursor(u.start),
            });
            if checkpoints {
                v["checkpoints"] = u
                    .checkpoints
                    .iter()
                    .map(|c| json!({ "box": c.box_index, "code_len": c.code_len }))
                    .collect();
            }
            format!("{v}\n")
        }
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_verify(
    path: &Path,
    code: &str,
    start: &str,
    format: Format,
    out: &mut dyn Write,
    color: bool,
) -> Result<i32, Failure> {
    let tube = read_tube(path)?;
    let code = parse_code(code).map_err(input_err)?;
    let start = parse_cursor(start).map_err(input_err)?;
    let report = verify(&tube, start, &code);
    let text = match format {
        Format::Text if color => colorize(&report.to_text()),
        Format::Text => report.to_text(),
        Format::Json => format!("{}\n", report.to_json()),
    };
    emit(out, &text)?;
    Ok(if report.overall { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_gen(
    boxes: usize,
    seed: u64,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let tube = random_orthotube(boxes, seed).map_err(|e| match e {
        GenError::NoBoxes => input_err(e),
        GenError::GenerationFailed(..) => Failure(EXIT_INTERNAL, e.to_string()),
    })?;
    let text = format_tube(&tube);
    match path {
        Some(p) => write_file(p, &text)?,
        None => emit(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn cmd_enum(
    max_boxes: usize,
    count_only: bool,
    jobs: usize,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    if max_boxes == 0 {
        return Err(input_err("--max-boxes must be at least 1"));
    }
    let levels = par::with_jobs(jobs, || enumerate_by_length(max_boxes));
    let text = if count_only {
        let counts: Vec<String> =
            levels.iter().enumerate().map(|(i, l)| format!("{}:{}", i + 1, l.len())).collect();
        format!("{}\n", counts.join(" "))
    } else {
        let tubes: Vec<String> =
            levels.iter().flatten().map(|f| format_tube(&f.to_tube())).collect();
        tubes.join("---\n")
    };
    emit(out, &text)?;
    Ok(EXIT_OK)
}

fn read_tube(path: &Path) -> Result<Orthotube, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    parse_tube(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure(EXIT_INTERNAL, format!("cannot write output: {e}")))
}

fn colorize(text: &str) -> String {
    text.lines()
        .map(|line| {
            let mut words: Vec<String> = line.split(' ').map(str::to_string).collect();
            for w in words.iter_mut().take(3) {
                match w.as_str() {
                    "PASS" => *w = "\x1b[32mPASS\x1b[0m".to_string(),
                    "FAIL" => *w = "\x1b[31mFAIL\x1b[0m".to_string(),
                    _ => {}
                }
            }
            words.join(" ") + "\n"
        })
        .collect()
}

/// `x,y,z,normal,heading`, directions written as `+X`, `-Z` and so on.
pub fn format_cursor(c: Cursor) -> String {
    let p = c.face.cell;
    format!("{},{},{},{},{}", p.x, p.y, p.z, c.face.normal, c.heading)
}

pub fn parse_cursor(text: &str) -> Result<Cursor, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [x, y, z, n, h] = parts.as_slice() else {
        return Err(format!("start {text:?}: expected x,y,z,normal,heading"));
    };
    let int = |s: &str| s.parse::<i32>().map_err(|e| format!("start {text:?}: {s:?}: {e}"));
    let cell = Cell::new(int(x)?, int(y)?, int(z)?);
    let normal: Direction = n.parse()?;
    let heading: Direction = h.parse()?;
    if !heading.is_perpendicular(normal) {
        return Err(format!("start {text:?}: heading must be tangent to the face"));
    }
    Ok(Cursor::new(FaceId::new(cell, normal), heading))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("orthounfold").chain(args.iter().copied());
        let code = run_cli_with(argv, &mut out, &mut err, false);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cursor_wire_format() {
        let c = parse_cursor("0,0,0,-X,+Y").unwrap();
        assert_eq!(format_cursor(c), "0,0,0,-X,+Y");
        assert_eq!(parse_cursor(&format_cursor(c)).unwrap(), c);
        assert!(parse_cursor("0,0,0,-X,+X").is_err());
        assert!(parse_cursor("0,0,-X,+Y").is_err());
        assert!(parse_cursor("a,0,0,-X,+Y").is_err());
    }

    #[test]
    fn enum_counts() {
        assert_eq!(
            run(&["enum", "--max-boxes", "3", "--count-only"]),
            (0, "1:1 2:1 3:2\n".into(), String::new())
        );
        let (code, out, _) = run(&["enum", "--max-boxes", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.matches("---").count(), 3);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["enum"]).0, EXIT_INPUT);
        assert_eq!(run(&["bogus"]).0, EXIT_INPUT);
        assert_eq!(run(&["render", "--code", "LX"]).0, EXIT_INPUT);
        assert_eq!(run(&["gen", "--boxes", "0", "--seed", "1"]).0, EXIT_INPUT);
        assert_eq!(run(&["unfold", "/nonexistent/tube"]).0, EXIT_INPUT);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn color_only_marks_status_words() {
        let text = "CHECK LENGTH FAIL 3 symbols\nOVERALL PASS\n";
        let c = colorize(text);
        assert!(c.contains("\x1b[31mFAIL\x1b[0m 3 symbols"));
        assert!(c.contains("OVERALL \x1b[32mPASS"));
    }
}
