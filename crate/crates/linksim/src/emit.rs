//! CSV tables and SVG line plots of scenario results.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::runner::ResultRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Plot,
}

/// Writes `rows` as `<dir>/<scenario>.csv` or `.svg` and returns the path.
pub fn emit(rows: &[ResultRow], format: Format, dir: &Path) -> Result<PathBuf> {
    let first = rows
        .first()
        .ok_or_else(|| SimError::Invalid("no results to write".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let path = dir.join(format!(
        "{}.{}",
        first.scenario,
        match format {
            Format::Csv => "csv",
            Format::Plot => "svg",
        }
    ));
    match format {
        Format::Csv => write_csv(rows, &path)?,
        Format::Plot => std::fs::write(&path, svg(rows)).map_err(|e| SimError::io(&path, e))?,
    }
    Ok(path)
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| SimError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;

/// BER against SNR on a log axis; theory dashed when present.
pub fn svg(rows: &[ResultRow]) -> String {
    let floor = 1e-7;
    let log = |v: f64| v.max(floor).log10();
    let (x0, x1) = rows.iter().fold((f64::MAX, f64::MIN), |(a, b), r| {
        (a.min(r.snr_db), b.max(r.snr_db))
    });
    let (x0, x1) = if x1 > x0 {
        (x0, x1)
    } else {
        (x0 - 1.0, x0 + 1.0)
    };
    let lowest = rows
        .iter()
        .flat_map(|r| [Some(r.ber), r.ber_theory])
        .flatten()
        .map(log)
        .fold(0.0f64, f64::min);
    let (y0, y1) = (lowest.floor().min(-1.0), 0.0);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| MARGIN + (y1 - y) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{} (config {})</text>"#,
        W / 2.0,
        escape(&rows[0].scenario),
        rows[0].config_id
    );
    let mut d = y0;
    while d <= y1 {
        let y = py(d);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"##,
            W - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
        d += 1.0;
    }
    for r in rows {
        let x = px(r.snr_db);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            H - MARGIN + 18.0,
            r.snr_db
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">SNR (dB)</text>"#,
        W / 2.0,
        H - 16.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let line = |pts: Vec<(f64, f64)>, style: &str| {
        let p: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(log(y))))
            .collect();
        format!(
            r#"<polyline fill="none" {style} points="{}"/>"#,
            p.join(" ")
        )
    };
    if rows.iter().all(|r| r.ber_theory.is_some()) {
        let pts = rows
            .iter()
            .map(|r| (r.snr_db, r.ber_theory.unwrap_or(1.0)))
            .collect();
        let _ = writeln!(
            s,
            "{}",
            line(pts, r#"stroke="gray" stroke-dasharray="6 4""#)
        );
    }
    let pts = rows.iter().map(|r| (r.snr_db, r.ber)).collect();
    let _ = writeln!(s, "{}", line(pts, r#"stroke="navy" stroke-width="2""#));
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
