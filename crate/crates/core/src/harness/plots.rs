//! Plain SVG figures: walking paths, line plots and grouped bar charts.

use std::fmt::Write as _;

use crate::geometry::TrackedSpace;
use crate::locomotion::TrajectoryRecord;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Maps world coordinates into a square panel with equal axis scaling.
#[derive(Debug, Clone, Copy)]
struct Frame {
    origin_x: f64,
    origin_y: f64,
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(origin_x: f64, min_x: f64, max_x: f64, min_y: f64, max_y: f64) -> Self {
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        let pad = 0.05 * span;
        Self {
            origin_x,
            origin_y: MARGIN,
            min_x: min_x - pad,
            max_y: max_y + pad,
            scale: PANEL / (span + 2.0 * pad),
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.origin_x + (x - self.min_x) * self.scale,
            self.origin_y + (self.max_y - y) * self.scale,
        )
    }
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, stroke: &str, width: f64) -> String {
    let mut coords = String::new();
    for (x, y) in points {
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    format!(
        "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
        coords.trim_end()
    )
}

fn header(width: f64, height: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        width / 2.0,
        escape(title)
    )
}

/// Physical path inside the room (left) and virtual path (right). The
/// physical path is split into segments at resets; reset points are marked.
pub fn path_svg(space: &TrackedSpace, records: &[TrajectoryRecord], title: &str) -> String {
    let width = 3.0 * MARGIN + 2.0 * PANEL;
    let height = 2.0 * MARGIN + PANEL;
    let mut svg = header(width, height, title);

    let (hw, hd) = (space.half_width(), space.half_depth());
    let phys = Frame::fit(MARGIN, -hw, hw, -hd, hd);
    let (x0, y0) = phys.map(-hw, hd);
    let (x1, y1) = phys.map(hw, -hd);
    let _ = writeln!(
        svg,
        "<rect id=\"room\" x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#f7f3e8\" stroke=\"black\"/>",
        x1 - x0,
        y1 - y0
    );
    for o in space.obstacles() {
        let (ox, oy) = phys.map(o.center.x - o.half_side, o.center.y + o.half_side);
        let side = 2.0 * o.half_side * phys.scale;
        let _ = writeln!(
            svg,
            "<rect class=\"obstacle\" x=\"{ox:.2}\" y=\"{oy:.2}\" width=\"{side:.2}\" height=\"{side:.2}\" fill=\"#bbbbbb\"/>"
        );
    }
    let mut segment = Vec::new();
    for r in records {
        if r.reset && !segment.is_empty() {
            svg.push_str(&polyline(segment.drain(..), color(0), 1.2).replace("<polyline", "<polyline class=\"physical\""));
        }
        segment.push(phys.map(r.physical_x, r.physical_y));
    }
    if segment.len() > 1 {
        svg.push_str(&polyline(segment.into_iter(), color(0), 1.2).replace("<polyline", "<polyline class=\"physical\""));
    }
    for r in records.iter().filter(|r| r.reset) {
        let (cx, cy) = phys.map(r.physical_x, r.physical_y);
        let _ = writeln!(svg, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3\" fill=\"{}\"/>", color(1));
    }
    let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">physical</text>", MARGIN + PANEL / 2.0, height - 15.0);

    if !records.is_empty() {
        let xs = records.iter().map(|r| r.virtual_x);
        let ys = records.iter().map(|r| r.virtual_y);
        let (min_x, max_x) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        let (min_y, max_y) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        let virt = Frame::fit(2.0 * MARGIN + PANEL, min_x, max_x, min_y, max_y);
        let _ = writeln!(
            svg,
            "<rect x=\"{:.1}\" y=\"{MARGIN}\" width=\"{PANEL}\" height=\"{PANEL}\" fill=\"none\" stroke=\"#cccccc\"/>",
            2.0 * MARGIN + PANEL
        );
        svg.push_str(
            &polyline(records.iter().map(|r| virt.map(r.virtual_x, r.virtual_y)), color(2), 1.2)
                .replace("<polyline", "<polyline class=\"virtual\""),
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">virtual</text>",
        2.0 * MARGIN + 1.5 * PANEL,
        height - 15.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn axes(svg: &mut String, x_label: &str, y_label: &str, x_range: (f64, f64), y_range: (f64, f64), plot_w: f64) {
    let bottom = MARGIN + PANEL;
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN}\" y1=\"{bottom}\" x2=\"{:.1}\" y2=\"{bottom}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{bottom}\" stroke=\"black\"/>",
        MARGIN + plot_w
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let yv = y_range.0 + f * (y_range.1 - y_range.0);
        let y = bottom - f * PANEL;
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            MARGIN - 5.0,
            y + 4.0,
            format_tick(yv)
        );
        if x_range.1 > x_range.0 {
            let xv = x_range.0 + f * (x_range.1 - x_range.0);
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
                MARGIN + f * plot_w,
                bottom + 16.0,
                format_tick(xv)
            );
        }
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>",
        MARGIN + plot_w / 2.0,
        bottom + 36.0,
        escape(x_label),
        MARGIN + PANEL / 2.0,
        MARGIN + PANEL / 2.0,
        escape(y_label)
    );
}

fn format_tick(v: f64) -> String {
    if v.abs() >= 100.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn legend(svg: &mut String, names: impl Iterator<Item = String>, x: f64) {
    for (i, name) in names.enumerate() {
        let y = MARGIN + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{}\"/>\
             <text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            y - 10.0,
            color(i),
            x + 18.0,
            y,
            escape(&name)
        );
    }
}

pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let plot_w = 1.5 * PANEL;
    let width = 2.0 * MARGIN + plot_w + 160.0;
    let height = 2.0 * MARGIN + PANEL + 20.0;
    let mut svg = header(width, height, title);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (x_lo, x_hi, y_lo, y_hi) = all.fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    let x_range = if x_lo.is_finite() { (x_lo, x_hi) } else { (0.0, 1.0) };
    let y_range = nice_range(y_lo, y_hi);
    axes(&mut svg, x_label, y_label, x_range, y_range, plot_w);
    let span_x = (x_range.1 - x_range.0).max(1e-12);
    for (i, s) in series.iter().enumerate() {
        let pts = s.points.iter().map(|&(x, y)| {
            (
                MARGIN + (x - x_range.0) / span_x * plot_w,
                MARGIN + PANEL - (y - y_range.0) / (y_range.1 - y_range.0) * PANEL,
            )
        });
        svg.push_str(&polyline(pts, color(i), 1.0));
    }
    legend(&mut svg, series.iter().map(|s| s.name.clone()), MARGIN + plot_w + 20.0);
    svg.push_str("</svg>\n");
    svg
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries {
    pub name: String,
    pub values: Vec<f64>,
    /// Half-length of an error bar per value.
    pub errors: Option<Vec<f64>>,
}

/// One group of bars per category, one bar per series within a group.
pub fn bar_chart_svg(title: &str, y_label: &str, categories: &[String], series: &[BarSeries]) -> String {
    let groups = categories.len().max(1) as f64;
    let plot_w = (groups * (series.len().max(1) as f64 * 24.0 + 30.0)).max(300.0);
    let width = 2.0 * MARGIN + plot_w + 160.0;
    let height = 2.0 * MARGIN + PANEL + 20.0;
    let mut svg = header(width, height, title);
    let top = series
        .iter()
        .flat_map(|s| {
            s.values.iter().enumerate().map(move |(i, v)| {
                v + s.errors.as_ref().and_then(|e| e.get(i)).copied().unwrap_or(0.0)
            })
        })
        .fold(0.0_f64, f64::max);
    let y_max = if top > 0.0 { top * 1.1 } else { 1.0 };
    let bottom = MARGIN + PANEL;
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN}\" y1=\"{bottom}\" x2=\"{:.1}\" y2=\"{bottom}\" stroke=\"black\"/>\n\
         <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{bottom}\" stroke=\"black\"/>",
        MARGIN + plot_w
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
            MARGIN - 5.0,
            bottom - f * PANEL + 4.0,
            format_tick(f * y_max)
        );
    }
    let group_w = plot_w / groups;
    let bar_w = (group_w - 20.0) / series.len().max(1) as f64;
    for (g, cat) in categories.iter().enumerate() {
        let gx = MARGIN + g as f64 * group_w + 10.0;
        for (k, s) in series.iter().enumerate() {
            let Some(&v) = s.values.get(g) else { continue };
            let h = (v.max(0.0) / y_max) * PANEL;
            let x = gx + k as f64 * bar_w;
            let _ = writeln!(
                svg,
                "<rect class=\"bar\" x=\"{x:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{h:.2}\" fill=\"{}\"/>",
                bottom - h,
                bar_w * 0.9,
                color(k)
            );
            if let Some(e) = s.errors.as_ref().and_then(|e| e.get(g)) {
                let cx = x + bar_w * 0.45;
                let y_hi = bottom - ((v + e) / y_max) * PANEL;
                let y_lo = bottom - ((v - e).max(0.0) / y_max) * PANEL;
                let _ = writeln!(
                    svg,
                    "<line class=\"error\" x1=\"{cx:.2}\" y1=\"{y_hi:.2}\" x2=\"{cx:.2}\" y2=\"{y_lo:.2}\" stroke=\"black\"/>"
                );
            }
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            gx + (group_w - 20.0) / 2.0,
            bottom + 16.0,
            escape(cat)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>",
        MARGIN + PANEL / 2.0,
        MARGIN + PANEL / 2.0,
        escape(y_label)
    );
    legend(&mut svg, series.iter().map(|s| s.name.clone()), MARGIN + plot_w + 20.0);
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locomotion::GainSet;

    fn record(step: u64, px: f64, py: f64, vx: f64, vy: f64, reset: bool) -> TrajectoryRecord {
        TrajectoryRecord {
            step,
            physical_x: px,
            physical_y: py,
            physical_heading: 0.0,
            virtual_x: vx,
            virtual_y: vy,
            virtual_heading: 0.0,
            g_t: GainSet::NEUTRAL.translation,
            g_c: 0.0,
            reset,
        }
    }

    fn points_of(svg: &str, class: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.contains(&format!("class=\"{class}\"")) && l.contains("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split_whitespace()
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn escapes_markup() {
        let svg = line_plot_svg("a<b & c", "x", "y", &[]);
        assert!(svg.contains("a&lt;b &amp; c"));
    }

    #[test]
    fn straight_virtual_path_is_monotone() {
        let space = TrackedSpace::empty(7.5, 7.5).unwrap();
        let records: Vec<_> = (0..50).map(|i| record(i, 0.0, 0.1 * i as f64 - 2.0, 0.1 * i as f64, 0.0, false)).collect();
        let svg = path_svg(&space, &records, "test");
        let virt = &points_of(&svg, "virtual")[0];
        assert_eq!(virt.len(), 50);
        assert!(virt.windows(2).all(|w| w[1].0 > w[0].0 && (w[1].1 - w[0].1).abs() < 1e-9));
    }

    #[test]
    fn resets_split_physical_path() {
        let space = TrackedSpace::empty(7.5, 7.5).unwrap();
        let records = vec![
            record(0, 0.0, 0.0, 0.0, 0.0, false),
            record(1, 1.0, 0.0, 1.0, 0.0, false),
            record(2, 1.0, 0.0, 2.0, 0.0, true),
            record(3, 1.0, 1.0, 3.0, 0.0, false),
        ];
        let svg = path_svg(&space, &records, "t");
        assert_eq!(points_of(&svg, "physical").len(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn bar_chart_shapes() {
        let svg = bar_chart_svg(
            "resets",
            "count",
            &["0".into(), "1".into()],
            &[
                BarSeries { name: "a".into(), values: vec![1.0, 2.0], errors: Some(vec![0.5, 0.5]) },
                BarSeries { name: "b".into(), values: vec![3.0, 4.0], errors: None },
            ],
        );
        assert_eq!(svg.matches("class=\"bar\"").count(), 4);
        assert_eq!(svg.matches("class=\"error\"").count(), 2);
    }
}
