//! CSV tables, polyline SVG charts and the file/stdout emission of a run.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

/// A CSV table: header row, `.` decimal point, shortest round-trip floats.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| quote(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Shortest round-trip form; exponent notation for very small or large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Line chart with one polyline per series.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

impl Plot {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn series(mut self, name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        let points = points
            .into_iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        self.series.push((name.into(), points));
        self
    }

    pub fn to_svg(&self) -> String {
        let (w, h) = (640.0, 420.0);
        let (left, right, top, bottom) = (70.0, 20.0, 40.0, 50.0);
        let pts = self.series.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 - x0 <= 0.0 {
            (x0, x1) = (x0 - 0.5, x1 + 0.5);
        }
        if y1 - y0 <= 0.0 {
            let pad = 0.5 * y0.abs().max(1e-9);
            (y0, y1) = (y0 - pad, y1 + pad);
        }
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(xv),
                top + ph + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                left - 6.0,
                sy(yv) + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            h - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, (name, points)) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let coords: Vec<String> = points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            let ly = top + 14.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{ly}" text-anchor="end" fill="{color}">{}</text>"#,
                left + pw - 8.0,
                escape(name)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Everything a subcommand produces.
#[derive(Debug, Clone)]
pub struct Report {
    /// File stem used under the output directory.
    pub stem: String,
    /// Tables keyed by a file suffix; the first one goes to stdout in CSV mode.
    pub tables: Vec<(String, Table)>,
    pub json: serde_json::Value,
    pub plot: Option<Plot>,
    /// Set when part of the computation failed numerically.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(stem: impl Into<String>, json: serde_json::Value) -> Self {
        Self {
            stem: stem.into(),
            tables: Vec::new(),
            json,
            plot: None,
            failure: None,
        }
    }

    pub fn table(mut self, suffix: &str, table: Table) -> Self {
        self.tables.push((suffix.to_string(), table));
        self
    }

    pub fn plot(mut self, plot: Plot) -> Self {
        self.plot = Some(plot);
        self
    }

    fn file(&self, dir: &Path, suffix: &str, ext: &str) -> PathBuf {
        if suffix.is_empty() {
            dir.join(format!("{}.{ext}", self.stem))
        } else {
            dir.join(format!("{}_{suffix}.{ext}", self.stem))
        }
    }

    fn json_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.json).expect("report serializes");
        text.push('\n');
        text
    }

    /// With a directory, writes every table, the JSON report and (for
    /// `svg`) the plot, returning the written paths. Without one, prints
    /// the output selected by `format`.
    pub fn emit(&self, dir: Option<&Path>, format: Format) -> io::Result<Vec<PathBuf>> {
        let Some(dir) = dir else {
            let text = match format {
                Format::Csv => match self.tables.first() {
                    Some((_, t)) => t.to_csv(),
                    None => self.json_text(),
                },
                Format::Json => self.json_text(),
                Format::Svg => match &self.plot {
                    Some(p) => p.to_svg(),
                    None => {
                        return Err(io::Error::new(
                            io::ErrorKind::InvalidInput,
                            "this subcommand has no plot; use --format csv or json",
                        ))
                    }
                },
            };
            io::stdout().lock().write_all(text.as_bytes())?;
            return Ok(Vec::new());
        };
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (suffix, table) in &self.tables {
            let path = self.file(dir, suffix, "csv");
            fs::write(&path, table.to_csv())?;
            written.push(path);
        }
        let path = self.file(dir, "", "json");
        fs::write(&path, self.json_text())?;
        written.push(path);
        if format == Format::Svg {
            if let Some(plot) = &self.plot {
                let path = self.file(dir, "", "svg");
                fs::write(&path, plot.to_svg())?;
                written.push(path);
            }
        }
        Ok(written)
    }
}
