//! Profile CSV: header `index,P,I`, one row per window, empty fields for
//! unreached entries.

use std::fmt::Write as _;
use std::path::Path;

use mprofile::{Precision, Profile, NONE};

use crate::error::{CliError, Result};

pub const HEADER: &str = "index,P,I";

/// Renders `P` with the shortest decimal that round-trips at `precision`.
pub fn render_profile(profile: &Profile, precision: Precision) -> String {
    let mut out = String::with_capacity(profile.len() * 24 + HEADER.len() + 1);
    out.push_str(HEADER);
    out.push('\n');
    for (i, (&d, &j)) in profile.distances.iter().zip(&profile.indices).enumerate() {
        let _ = write!(out, "{i},");
        if d.is_finite() {
            let _ = match precision {
                Precision::Single => write!(out, "{}", d as f32),
                Precision::Double => write!(out, "{d}"),
            };
        }
        out.push(',');
        if j != NONE {
            let _ = write!(out, "{j}");
        }
        out.push('\n');
    }
    out
}

pub fn write_profile(path: &Path, profile: &Profile, precision: Precision) -> Result<()> {
    std::fs::write(path, render_profile(profile, precision)).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a profile CSV back into memory. Window length is not stored in the
/// file, so `m` is supplied by the caller. Single-precision files are parsed
/// as `f32` and widened, which reproduces the in-memory profile exactly.
pub fn parse_profile(text: &str, m: usize, precision: Precision, path: &Path) -> Result<Profile> {
    let err = |line: usize, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => return Err(err(1, format!("expected header {HEADER:?}"))),
    }
    let mut profile = Profile::new(0, m);
    for (k, line) in lines {
        let line_no = k + 1;
        let fields: Vec<&str> = line.split(',').collect();
        let [index, p, i] = fields[..] else {
            return Err(err(
                line_no,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        };
        if index.parse::<usize>().ok() != Some(profile.len()) {
            return Err(err(
                line_no,
                format!("expected index {}, found {index:?}", profile.len()),
            ));
        }
        let d = match p {
            "" => f64::INFINITY,
            s => match precision {
                Precision::Single => s.parse::<f32>().map(f64::from),
                Precision::Double => s.parse::<f64>(),
            }
            .map_err(|_| err(line_no, format!("bad distance {s:?}")))?,
        };
        let j = match i {
            "" => NONE,
            s => s
                .parse()
                .map_err(|_| err(line_no, format!("bad neighbor index {s:?}")))?,
        };
        profile.distances.push(d);
        profile.indices.push(j);
    }
    Ok(profile)
}

pub fn read_profile(path: &Path, m: usize, precision: Precision) -> Result<Profile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_profile(&text, m, precision, path)
}
