//! SVG figures from benchmark records: a log-quotient heatmap, a
//! three-way ranking map and a solve-time line plot.
//!
//! Everything is drawn with rect, line, polyline, circle and text elements.
//! Elements carry `class` attributes (`cell-black`, `cell-gray`, `rank-smt`,
//! `series-milp`, ...) so tests can assert on structure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use roster_core::{Backend, Verdict};

use crate::bench::{backend_name, RunRecord};

/// Quotients beyond ±3 (1000×) saturate.
pub const QUOTIENT_CLAMP: f64 = 3.0;
/// Relative time difference under which the ranking calls a tie.
pub const EQUAL_WITHIN: f64 = 0.05;

pub const POSITIVE_EXTREME: &str = "#2166ac";
pub const NEGATIVE_EXTREME: &str = "#b2182b";
pub const NEUTRAL: &str = "#f7f7f7";
pub const BLACK: &str = "#000000";
pub const GRAY: &str = "#9e9e9e";
const MISSING: &str = "#ffffff";

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FigureError {
    #[error("record {0} has no shifts/staff coordinates")]
    MissingCoordinates(usize),
    #[error("two records share the grid cell shifts={0}, staff={1}")]
    DuplicateCell(u32, u32),
}

struct Svg {
    width: f64,
    height: f64,
    defs: String,
    body: String,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Svg { width, height, defs: String::new(), body: String::new() }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, class: &str) {
        let _ = writeln!(
            self.body,
            r##"<rect class="{class}" x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="{fill}" stroke="#ffffff" stroke-width="1"/>"##
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, class: &str) {
        let _ = writeln!(
            self.body,
            r##"<line class="{class}" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}" stroke="#333333" stroke-width="1"/>"##
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{}</text>"#,
            esc(s)
        );
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.1}" y="{y:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 {x:.1} {y:.1})">{}</text>"#,
            esc(s)
        );
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, class: &str) {
        let p: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            p.join(" ")
        );
    }

    fn circle(&mut self, x: f64, y: f64, color: &str, class: &str) {
        let _ = writeln!(self.body, r#"<circle class="{class}" cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
    }

    fn hatch_pattern(&mut self) {
        self.defs.push_str(
            "<pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"8\" height=\"8\" patternTransform=\"rotate(45)\">\
             <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#333333\" stroke-width=\"2\"/></pattern>\n",
        );
    }

    fn finish(self) -> String {
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = self.width,
            h = self.height
        );
        if !self.defs.is_empty() {
            let _ = write!(out, "<defs>\n{}</defs>\n", self.defs);
        }
        let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", self.width, self.height);
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

fn hex(c: (f64, f64, f64)) -> String {
    let b = |v: f64| v.round().clamp(0.0, 255.0) as u8;
    format!("#{:02x}{:02x}{:02x}", b(c.0), b(c.1), b(c.2))
}

fn rgb(h: &str) -> (f64, f64, f64) {
    let p = |i: usize| f64::from(u8::from_str_radix(&h[i..i + 2], 16).unwrap_or(0));
    (p(1), p(3), p(5))
}

/// Color for `t` in [-1, 1]: negative toward red, positive toward blue.
pub fn diverging_color(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (a, b) = (rgb(NEUTRAL), rgb(if t >= 0.0 { POSITIVE_EXTREME } else { NEGATIVE_EXTREME }));
    let k = t.abs();
    hex((a.0 + (b.0 - a.0) * k, a.1 + (b.1 - a.1) * k, a.2 + (b.2 - a.2) * k))
}

/// How one heatmap cell is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatCell {
    /// Both finished; log10(milp / smt).
    Quotient(f64),
    /// SMT did not finish, MILP did.
    SmtOnlyUnfinished,
    /// MILP did not finish, SMT did; drawn at the positive extreme.
    MilpOnlyUnfinished,
    /// Neither finished.
    NeitherFinished,
    /// No SMT or no MILP result for the cell.
    Missing,
}

pub fn heat_cell(r: &RunRecord) -> HeatCell {
    let (Some(s), Some(m)) = (r.result(Backend::Smt), r.result(Backend::Milp)) else {
        return HeatCell::Missing;
    };
    match (s.finished(), m.finished()) {
        (true, true) => HeatCell::Quotient(r.log_quotient().unwrap_or(0.0)),
        (false, true) => HeatCell::SmtOnlyUnfinished,
        (true, false) => HeatCell::MilpOnlyUnfinished,
        (false, false) => HeatCell::NeitherFinished,
    }
}

fn is_infeasible(r: &RunRecord) -> bool {
    r.results.iter().any(|b| b.verdict == Verdict::Infeasible)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    SmtFaster,
    MilpFaster,
    Equal,
    Neither,
}

impl Rank {
    fn class(self) -> &'static str {
        match self {
            Rank::SmtFaster => "rank-smt",
            Rank::MilpFaster => "rank-milp",
            Rank::Equal => "rank-equal",
            Rank::Neither => "rank-none",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Rank::SmtFaster => POSITIVE_EXTREME,
            Rank::MilpFaster => NEGATIVE_EXTREME,
            Rank::Equal => "#fdd835",
            Rank::Neither => GRAY,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Rank::SmtFaster => "SMT faster",
            Rank::MilpFaster => "MILP faster",
            Rank::Equal => "equal within 5%",
            Rank::Neither => "neither finished",
        }
    }
}

/// Ties when the times differ by at most 5% of the faster one; a backend
/// that finished beats one that did not.
pub fn rank(r: &RunRecord) -> Rank {
    let s = r.result(Backend::Smt).filter(|b| b.finished());
    let m = r.result(Backend::Milp).filter(|b| b.finished());
    match (s, m) {
        (Some(s), Some(m)) => {
            let (a, b) = (s.wall_time, m.wall_time);
            if (a - b).abs() <= EQUAL_WITHIN * a.min(b) {
                Rank::Equal
            } else if a < b {
                Rank::SmtFaster
            } else {
                Rank::MilpFaster
            }
        }
        (Some(_), None) => Rank::SmtFaster,
        (None, Some(_)) => Rank::MilpFaster,
        (None, None) => Rank::Neither,
    }
}

struct Grid<'a> {
    xs: Vec<u32>,
    ys: Vec<u32>,
    cells: BTreeMap<(u32, u32), &'a RunRecord>,
}

/// Shifts along x, staff along y.
fn grid(records: &[RunRecord]) -> Result<Grid<'_>, FigureError> {
    let mut cells = BTreeMap::new();
    let (mut xs, mut ys) = (BTreeSet::new(), BTreeSet::new());
    for (k, r) in records.iter().enumerate() {
        let (Some(x), Some(y)) = (r.cell.shifts, r.cell.staff) else {
            return Err(FigureError::MissingCoordinates(k));
        };
        if cells.insert((x, y), r).is_some() {
            return Err(FigureError::DuplicateCell(x, y));
        }
        xs.insert(x);
        ys.insert(y);
    }
    Ok(Grid { xs: xs.into_iter().collect(), ys: ys.into_iter().collect(), cells })
}

const CELL: f64 = 44.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;

fn grid_frame(g: &Grid<'_>, title: &str, legend_width: f64) -> (Svg, f64, f64) {
    let w = LEFT + CELL * g.xs.len() as f64 + 30.0 + legend_width;
    let h = TOP + CELL * g.ys.len() as f64 + 60.0;
    let mut svg = Svg::new(w.max(320.0), h.max(200.0));
    svg.text(LEFT, 20.0, "start", title);
    let bottom = TOP + CELL * g.ys.len() as f64;
    for (i, x) in g.xs.iter().enumerate() {
        svg.text(LEFT + CELL * (i as f64 + 0.5), bottom + 16.0, "middle", &x.to_string());
    }
    svg.text(LEFT + CELL * g.xs.len() as f64 / 2.0, bottom + 36.0, "middle", "shifts");
    for (j, y) in g.ys.iter().enumerate() {
        // Largest staff value at the top.
        let row = g.ys.len() - 1 - j;
        svg.text(LEFT - 8.0, TOP + CELL * (row as f64 + 0.5) + 4.0, "end", &y.to_string());
    }
    svg.vtext(20.0, TOP + CELL * g.ys.len() as f64 / 2.0, "staff members");
    (svg, LEFT + CELL * g.xs.len() as f64 + 30.0, bottom)
}

fn cell_origin(g: &Grid<'_>, x: u32, y: u32) -> (f64, f64) {
    let i = g.xs.iter().position(|&v| v == x).unwrap_or(0);
    let j = g.ys.iter().position(|&v| v == y).unwrap_or(0);
    (LEFT + CELL * i as f64, TOP + CELL * (g.ys.len() - 1 - j) as f64)
}

/// Heatmap of log10(milp time / smt time). The color scale spans the
/// largest magnitude present, capped at ±3; black marks an SMT timeout
/// where MILP finished, gray marks cells neither finished, and hatching
/// marks infeasible cells.
pub fn render_heatmap(records: &[RunRecord]) -> Result<String, FigureError> {
    let g = grid(records)?;
    let cells: Vec<((u32, u32), HeatCell, bool)> =
        g.cells.iter().map(|(&k, r)| (k, heat_cell(r), is_infeasible(r))).collect();
    let span = cells
        .iter()
        .filter_map(|(_, c, _)| match c {
            HeatCell::Quotient(q) => Some(q.abs()),
            HeatCell::MilpOnlyUnfinished => Some(QUOTIENT_CLAMP),
            _ => None,
        })
        .fold(0.0_f64, f64::max)
        .min(QUOTIENT_CLAMP);
    let span = if span > 0.0 { span } else { 1.0 };
    let (mut svg, legend_x, bottom) = grid_frame(&g, "log10(MILP time / SMT time)", 110.0);
    svg.hatch_pattern();
    for ((x, y), c, infeasible) in cells {
        let (px, py) = cell_origin(&g, x, y);
        match c {
            HeatCell::Quotient(q) => svg.rect(px, py, CELL, CELL, &diverging_color(q / span), "cell-quotient"),
            HeatCell::MilpOnlyUnfinished => svg.rect(px, py, CELL, CELL, POSITIVE_EXTREME, "cell-quotient"),
            HeatCell::SmtOnlyUnfinished => svg.rect(px, py, CELL, CELL, BLACK, "cell-black"),
            HeatCell::NeitherFinished => svg.rect(px, py, CELL, CELL, GRAY, "cell-gray"),
            HeatCell::Missing => svg.rect(px, py, CELL, CELL, MISSING, "cell-missing"),
        }
        if infeasible {
            svg.rect(px, py, CELL, CELL, "url(#hatch)", "cell-infeasible");
        }
    }
    let steps = 8;
    let lh = (bottom - TOP) / steps as f64;
    for k in 0..steps {
        let t = 1.0 - 2.0 * (k as f64 + 0.5) / steps as f64;
        svg.rect(legend_x, TOP + lh * k as f64, 16.0, lh, &diverging_color(t), "legend");
    }
    svg.text(legend_x + 22.0, TOP + 10.0, "start", &format!("+{span:.2}"));
    svg.text(legend_x + 22.0, (TOP + bottom) / 2.0 + 4.0, "start", "0");
    svg.text(legend_x + 22.0, bottom, "start", &format!("-{span:.2}"));
    Ok(svg.finish())
}

/// Categorical map: SMT faster, MILP faster, or equal within 5%.
pub fn render_ranking(records: &[RunRecord]) -> Result<String, FigureError> {
    let g = grid(records)?;
    let (mut svg, legend_x, _) = grid_frame(&g, "faster backend", 140.0);
    for (&(x, y), r) in &g.cells {
        let (px, py) = cell_origin(&g, x, y);
        let k = rank(r);
        svg.rect(px, py, CELL, CELL, k.color(), k.class());
    }
    for (i, k) in [Rank::SmtFaster, Rank::MilpFaster, Rank::Equal, Rank::Neither].into_iter().enumerate() {
        let y = TOP + 22.0 * i as f64;
        svg.rect(legend_x, y, 14.0, 14.0, k.color(), "legend");
        svg.text(legend_x + 20.0, y + 11.0, "start", k.label());
    }
    Ok(svg.finish())
}

fn series_color(b: Backend) -> &'static str {
    match b {
        Backend::Smt => POSITIVE_EXTREME,
        Backend::Milp => NEGATIVE_EXTREME,
        Backend::Native => "#1b7837",
    }
}

/// Solve time against days (or shifts when days are absent), log-scaled,
/// one polyline per backend and a gap wherever a backend did not finish.
pub fn render_lineplot(records: &[RunRecord]) -> String {
    let x_of = |r: &RunRecord| r.cell.days.or(r.cell.shifts).unwrap_or(0);
    let mut recs: Vec<&RunRecord> = records.iter().collect();
    recs.sort_by_key(|r| x_of(r));
    let xs: Vec<u32> = recs.iter().map(|r| x_of(r)).collect::<BTreeSet<_>>().into_iter().collect();
    let backends: Vec<Backend> = [Backend::Smt, Backend::Milp, Backend::Native]
        .into_iter()
        .filter(|b| recs.iter().any(|r| r.result(*b).is_some()))
        .collect();
    let finished_times: Vec<f64> = recs
        .iter()
        .flat_map(|r| r.results.iter())
        .filter(|b| b.finished())
        .map(|b| b.wall_time.max(1e-6))
        .collect();
    let (lo, hi) = if finished_times.is_empty() {
        (-3.0, 0.0)
    } else {
        let lo = finished_times.iter().copied().fold(f64::INFINITY, f64::min).log10().floor();
        let hi = finished_times.iter().copied().fold(f64::NEG_INFINITY, f64::max).log10().ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };

    let (w, h) = (560.0, 360.0);
    let (left, right, top, bottom) = (70.0, 430.0, 40.0, 300.0);
    let mut svg = Svg::new(w, h);
    svg.text(left, 20.0, "start", "solve time");
    svg.line(left, bottom, right, bottom, "axis");
    svg.line(left, top, left, bottom, "axis");
    svg.text((left + right) / 2.0, bottom + 40.0, "middle", "days");
    svg.vtext(20.0, (top + bottom) / 2.0, "seconds (log scale)");
    let ypix = |t: f64| bottom - (t.max(1e-6).log10() - lo) / (hi - lo) * (bottom - top);
    let mut e = lo as i32;
    while f64::from(e) <= hi {
        let y = ypix(10f64.powi(e));
        svg.line(left - 4.0, y, left, y, "tick");
        svg.text(left - 8.0, y + 4.0, "end", &format!("1e{e}"));
        e += 1;
    }
    let xpix = |x: u32| match xs.len() {
        0 => left,
        1 => (left + right) / 2.0,
        n => {
            let i = xs.iter().position(|&v| v == x).unwrap_or(0);
            left + 20.0 + (right - left - 40.0) * i as f64 / (n - 1) as f64
        }
    };
    for &x in &xs {
        svg.line(xpix(x), bottom, xpix(x), bottom + 4.0, "tick");
        svg.text(xpix(x), bottom + 18.0, "middle", &x.to_string());
    }
    for (k, &b) in backends.iter().enumerate() {
        let color = series_color(b);
        let class = format!("series-{}", backend_name(b));
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let mut segments = Vec::new();
        for r in &recs {
            match r.result(b).filter(|res| res.finished()) {
                Some(res) => segment.push((xpix(x_of(r)), ypix(res.wall_time))),
                None => {
                    if !segment.is_empty() {
                        segments.push(std::mem::take(&mut segment));
                    }
                }
            }
        }
        if !segment.is_empty() {
            segments.push(segment);
        }
        for s in &segments {
            if s.len() > 1 {
                svg.polyline(s, color, &class);
            }
            for &(x, y) in s {
                svg.circle(x, y, color, &format!("{class}-point"));
            }
        }
        let ly = top + 18.0 * k as f64;
        svg.line(right + 20.0, ly, right + 40.0, ly, &format!("{class}-legend"));
        svg.text(right + 46.0, ly + 4.0, "start", backend_name(b));
    }
    svg.finish()
}
