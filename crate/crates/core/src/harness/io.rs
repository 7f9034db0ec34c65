//! Profile files: CSV, one agent per line, no header, `#` comment lines.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point, Profile};
use crate::harness::json::fmt_g17;

/// Parses profile text. Line numbers in errors are 1-based and count
/// comment lines.
pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut agents = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let coords = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| Error::Parse { line, message: format!("`{field}` is not a number") })
            })
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(coords.len()),
            Some(m) if m != coords.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {m} coordinates, found {}", coords.len()),
                })
            }
            Some(_) => {}
        }
        let point = Point::new(coords).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        agents.push(point);
    }
    if agents.is_empty() {
        return Err(Error::Parse { line: 0, message: "profile has no agents".into() });
    }
    Profile::new(agents)
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<Profile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_profile(&text)
}

/// Renders a profile with 17 significant digits per coordinate.
pub fn format_profile(profile: &Profile) -> String {
    let mut out = String::new();
    for agent in profile.agents() {
        let row: Vec<String> = agent.coords().iter().map(|&c| fmt_g17(c)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn save_profile(profile: &Profile, path: impl AsRef<Path>) -> Result<()> {
    write_text(path, &format_profile(profile))
}

pub(crate) fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::file(path, e))
}
