//! Static SVG line plots rendered from CSV columns.

use std::fmt::Write as _;

use crate::error::{CliError, Result};
use crate::presets::PlotKind;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Columns of one CSV as parsed `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(CliError::Input("CSV has no header".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<f64>().map_err(|_| CliError::Input(format!("non-numeric CSV field `{f}`"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::Input("CSV has no data rows".into()));
        }
        Ok(Self { headers, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.headers.iter().position(|h| h == name).ok_or_else(|| CliError::UnknownColumn(name.into()))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn has(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }
}

/// Column plotted on the ordinate for each kind.
pub fn default_column(kind: PlotKind) -> &'static str {
    match kind {
        PlotKind::Linear | PlotKind::QuadraticAbscissa | PlotKind::LogLog => "prob",
        PlotKind::Detrended => "detrended",
        PlotKind::Ratio => "ratio",
    }
}

pub fn axis_labels(kind: PlotKind) -> (&'static str, &'static str) {
    match kind {
        PlotKind::Linear => ("τ", "P(τ)"),
        PlotKind::QuadraticAbscissa => ("τ²", "1 − P(τ)"),
        PlotKind::LogLog => ("ln τ", "|ln P(τ)|"),
        PlotKind::Detrended => ("τ", "τ^e P(τ)"),
        PlotKind::Ratio => ("τ", "P_p(τ) / P₀(τ/χ)"),
    }
}

/// Maps `(τ, y)` to plot coordinates; points that have no image are dropped.
pub fn transform(kind: PlotKind, tau: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    tau.iter()
        .zip(y)
        .map(|(&t, &v)| match kind {
            PlotKind::QuadraticAbscissa => (t * t, 1.0 - v),
            PlotKind::LogLog => (t.ln(), v.ln().abs()),
            _ => (t, v),
        })
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// Reads `y_col` (and `overlay` if present) against `tau` from one CSV.
pub fn lines_from_csv(
    text: &str,
    label: &str,
    kind: PlotKind,
    y_col: &str,
    overlay: Option<&str>,
) -> Result<Vec<Line>> {
    let t = Table::parse(text)?;
    let tau = t.column("tau")?;
    let mut out = vec![Line { label: label.into(), points: transform(kind, &tau, &t.column(y_col)?), dashed: false }];
    if let Some(o) = overlay.filter(|o| t.has(o)) {
        // asymptotic predictors diverge at early times; keep them inside the data's range
        let ys = out[0].points.iter().map(|p| p.1);
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), y| (l.min(y), h.max(y)));
        let pad = 0.1 * (hi - lo);
        let points = transform(kind, &tau, &t.column(o)?)
            .into_iter()
            .filter(|(_, y)| *y >= lo - pad && *y <= hi + pad)
            .collect();
        out.push(Line { label: format!("{label} ({o})"), points, dashed: true });
    }
    Ok(out)
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn bounds(lines: &[Line]) -> Option<(f64, f64, f64, f64)> {
    let mut it = lines.iter().flat_map(|l| l.points.iter());
    let &(x, y) = it.next()?;
    let (mut x0, mut x1, mut y0, mut y1) = (x, x, y, y);
    for &(x, y) in it {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let pad = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5 * a.abs().max(1.0), b + 0.5 * b.abs().max(1.0)) };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let dy = 0.04 * (y1 - y0);
    Some((x0, x1, y0 - dy, y1 + dy))
}

/// Renders the lines into a self-contained SVG document; byte-identical for
/// identical input.
pub fn render(title: &str, kind: PlotKind, lines: &[Line]) -> Result<String> {
    let (x0, x1, y0, y1) = bounds(lines).ok_or_else(|| CliError::Input("nothing to plot".into()))?;
    let (ml, mr, mt, mb) = MARGIN;
    let pw = WIDTH - ml - mr;
    let ph = HEIGHT - mt - mb;
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;
    let (xl, yl) = axis_labels(kind);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ =
        writeln!(s, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, esc(title));
    let _ = writeln!(s, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in nice_ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 18.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            ml - 5.0,
            ml - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        HEIGHT - 10.0,
        esc(xl)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        mt + ph / 2.0,
        esc(yl)
    );
    let mut group = 0usize;
    for (i, l) in lines.iter().enumerate() {
        // an overlay shares the colour of the line it follows
        if i > 0 && !l.dashed {
            group += 1;
        }
        if l.points.is_empty() {
            continue;
        }
        let color = COLORS[group % COLORS.len()];
        let mut d = String::new();
        for (k, &(x, y)) in l.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, sx(x), sy(y));
        }
        let dash = if l.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#);
        let ly = mt + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            ml + pw - 210.0,
            ml + pw - 185.0,
            ml + pw - 180.0,
            ly + 4.0,
            esc(&l.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
