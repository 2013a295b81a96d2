//! Plain-text gnuplot scripts next to the CSV files they draw.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Result;

/// One curve: CSV file name (relative to the script), columns and a title.
pub struct Curve<'a> {
    pub csv: &'a str,
    pub x: &'a str,
    pub y: &'a str,
    pub title: &'a str,
}

pub fn write_script(dir: &Path, name: &str, title: &str, logscale: Option<&str>, curves: &[Curve]) -> Result<PathBuf> {
    let mut s = String::new();
    writeln!(s, "# gnuplot {name}.gp")?;
    writeln!(s, "set datafile separator ','")?;
    writeln!(s, "set datafile commentschars '#'")?;
    writeln!(s, "set key autotitle columnhead")?;
    writeln!(s, "set title '{title}'")?;
    if let Some(axes) = logscale {
        writeln!(s, "set logscale {axes}")?;
    }
    writeln!(s, "set terminal pngcairo size 900,600")?;
    writeln!(s, "set output '{name}.png'")?;
    let parts: Vec<String> = curves
        .iter()
        .map(|c| format!("'{}' using '{}':'{}' with lines title '{}'", c.csv, c.x, c.y, c.title))
        .collect();
    writeln!(s, "plot {}", parts.join(", \\\n     "))?;
    let path = dir.join(format!("{name}.gp"));
    std::fs::write(&path, s)?;
    Ok(path)
}
