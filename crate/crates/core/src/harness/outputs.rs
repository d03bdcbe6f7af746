use std::path::Path;

use super::{CheckpointRow, RunLog};
use crate::error::{Error, Result};

/// Column order of `curve.csv`.
pub const CURVE_CSV_HEADER: &str = "round,episodes,exploitability,regret_min_est,regret_max_est,seconds";

/// Writes `curve.csv`, `config.echo` and `curve.svg` into the directory.
pub fn emit_outputs(log: &RunLog, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;

    let csv_path = dir.join("curve.csv");
    std::fs::write(&csv_path, curve_csv(log))
        .map_err(|e| Error::io(csv_path.display().to_string(), e))?;

    let echo_path = dir.join("config.echo");
    std::fs::write(&echo_path, &log.config_echo)
        .map_err(|e| Error::io(echo_path.display().to_string(), e))?;

    let svg_path = dir.join("curve.svg");
    std::fs::write(&svg_path, render_curve_svg(&log.rows))
        .map_err(|e| Error::io(svg_path.display().to_string(), e))?;
    Ok(())
}

/// Numbers are written in the shortest form that parses back to the same
/// float, so a reloaded CSV reproduces the rows exactly.
pub fn curve_csv(log: &RunLog) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for row in &log.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.round,
            row.episodes,
            row.exploitability,
            row.regret_min_est,
            row.regret_max_est,
            row.seconds
        ));
    }
    out
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CheckpointRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CURVE_CSV_HEADER => {}
        other => {
            return Err(Error::Parse {
                line: 1,
                message: format!("bad csv header: {other:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Parse {
            line: i + 2,
            message: format!("bad {what}"),
        };
        rows.push(CheckpointRow {
            round: fields[0].parse().map_err(|_| bad("round"))?,
            episodes: fields[1].parse().map_err(|_| bad("episodes"))?,
            exploitability: fields[2].parse().map_err(|_| bad("exploitability"))?,
            regret_min_est: fields[3].parse().map_err(|_| bad("regret_min_est"))?,
            regret_max_est: fields[4].parse().map_err(|_| bad("regret_max_est"))?,
            seconds: fields[5].parse().map_err(|_| bad("seconds"))?,
        });
    }
    Ok(rows)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 20.0;
const MARGIN_B: f64 = 50.0;

/// Log-log exploitability vs episodes, rendered as a standalone SVG with no
/// external tooling. Rows with nonpositive exploitability are skipped (they
/// have no finite logarithm).
pub fn render_curve_svg(rows: &[CheckpointRow]) -> String {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.exploitability > 0.0 && r.episodes > 0)
        .map(|r| ((r.episodes as f64).log10(), r.exploitability.log10()))
        .collect();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_W} {SVG_H}\" \
         font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n"
    ));

    if points.is_empty() {
        svg.push_str("<text x=\"280\" y=\"240\">no positive data</text>\n</svg>\n");
        return svg;
    }

    let (mut x0, mut x1) = min_max(points.iter().map(|p| p.0));
    let (mut y0, mut y1) = min_max(points.iter().map(|p| p.1));
    // Expand to the surrounding decades so gridlines land on integers.
    x0 = x0.floor();
    x1 = x1.ceil().max(x0 + 1.0);
    y0 = y0.floor();
    y1 = y1.ceil().max(y0 + 1.0);

    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * (SVG_W - MARGIN_L - MARGIN_R);
    let py = |y: f64| SVG_H - MARGIN_B - (y - y0) / (y1 - y0) * (SVG_H - MARGIN_T - MARGIN_B);

    // Decade gridlines with labels.
    let mut d = x0;
    while d <= x1 + 1e-9 {
        let x = px(d);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#ddd\"/>\n",
            MARGIN_T,
            SVG_H - MARGIN_B
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">1e{}</text>\n",
            x,
            SVG_H - MARGIN_B + 18.0,
            d as i64
        ));
        d += 1.0;
    }
    let mut d = y0;
    while d <= y1 + 1e-9 {
        let y = py(d);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>\n",
            MARGIN_L,
            SVG_W - MARGIN_R
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">1e{}</text>\n",
            MARGIN_L - 6.0,
            y + 4.0,
            d as i64
        ));
        d += 1.0;
    }

    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        SVG_W - MARGIN_L - MARGIN_R,
        SVG_H - MARGIN_T - MARGIN_B
    ));

    let path: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    svg.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n",
        path.join(" ")
    ));
    for &(x, y) in &points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f77b4\"/>\n",
            px(x),
            py(y)
        ));
    }

    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{}\" text-anchor=\"middle\">episodes</text>\n",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        SVG_H - 10.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">exploitability</text>\n",
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0,
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0
    ));
    svg.push_str("</svg>\n");
    svg
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}
