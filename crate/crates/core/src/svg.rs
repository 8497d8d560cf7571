//! Minimal deterministic SVG rendering: polyline profile plots and 2D
//! heatmaps. Output bytes depend only on the input records.

use crate::scan::ProfileRecord;
use crate::{Error, Result};

/// One named profile curve.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub records: Vec<ProfileRecord>,
    /// Plot the noisy column instead of the ideal one.
    pub use_noisy: bool,
}

/// One plot panel; panels stack vertically in the emitted document.
#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
}

const PALETTE: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];
const W: f64 = 640.0;
const H: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn fnum(x: f64) -> String {
    format!("{x:.3}")
}

/// Render 1D profile panels as polyline plots: x axis is epsilon over the
/// grid range, y axis is probability in [0, 1].
pub fn emit_svg(panels: &[Panel]) -> Result<String> {
    if panels.is_empty() || panels.iter().any(|p| p.series.is_empty()) {
        return Err(Error::Usage("svg emitter needs at least one series".into()));
    }
    for s in panels.iter().flat_map(|p| &p.series) {
        if s.records.is_empty() {
            return Err(Error::Usage(format!("series {:?} has no records", s.label)));
        }
    }
    let total_h = H * panels.len() as f64;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{total_h}\" viewBox=\"0 0 {W} {total_h}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (pi, panel) in panels.iter().enumerate() {
        let oy = pi as f64 * H;
        let x_min = panel
            .series
            .iter()
            .flat_map(|s| s.records.iter().map(|r| r.epsilon))
            .fold(f64::INFINITY, f64::min);
        let x_max = panel
            .series
            .iter()
            .flat_map(|s| s.records.iter().map(|r| r.epsilon))
            .fold(f64::NEG_INFINITY, f64::max);
        let span = if x_max > x_min { x_max - x_min } else { 1.0 };
        let sx = |e: f64| MARGIN + (e - x_min) / span * (W - 2.0 * MARGIN);
        let sy = |p: f64| oy + H - MARGIN - p * (H - 2.0 * MARGIN);

        // frame and axis labels
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            fnum(MARGIN),
            fnum(oy + MARGIN),
            fnum(W - 2.0 * MARGIN),
            fnum(H - 2.0 * MARGIN)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            fnum(W / 2.0),
            fnum(oy + MARGIN - 10.0),
            xml_escape(&panel.title)
        ));
        for (gx, lab) in [(x_min, fnum(x_min)), (x_max, fnum(x_max))] {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                fnum(sx(gx)),
                fnum(oy + H - MARGIN + 16.0),
                lab
            ));
        }
        for gy in [0.0, 0.5, 1.0] {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                fnum(MARGIN - 6.0),
                fnum(sy(gy) + 4.0),
                fnum(gy)
            ));
        }

        for (si, s) in panel.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let pts: Vec<String> = s
                .records
                .iter()
                .map(|r| {
                    let p = if s.use_noisy {
                        r.probability_noisy.unwrap_or(r.probability_ideal)
                    } else {
                        r.probability_ideal
                    };
                    format!("{},{}", fnum(sx(r.epsilon)), fnum(sy(p)))
                })
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                color,
                pts.join(" ")
            ));
            // legend entry
            let ly = oy + MARGIN + 14.0 + 14.0 * si as f64;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                fnum(W - MARGIN - 110.0),
                fnum(ly),
                fnum(W - MARGIN - 86.0),
                fnum(ly),
                color
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
                fnum(W - MARGIN - 80.0),
                fnum(ly + 4.0),
                xml_escape(&s.label)
            ));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render a 2D scan (row-major, delta outer) as a heatmap with a monotone
/// color scale over [0, 1].
pub fn emit_svg_heatmap(
    records: &[ProfileRecord],
    eps_points: usize,
    delta_points: usize,
    title: &str,
) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Usage("svg emitter needs at least one record".into()));
    }
    if records.len() != eps_points * delta_points || eps_points < 1 || delta_points < 1 {
        return Err(Error::Usage(format!(
            "record count {} does not match {} x {} grid",
            records.len(),
            eps_points,
            delta_points
        )));
    }
    let cw = (W - 2.0 * MARGIN) / eps_points as f64;
    let ch = (H - 2.0 * MARGIN) / delta_points as f64;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        fnum(W / 2.0),
        fnum(MARGIN - 10.0),
        xml_escape(title)
    ));
    for (i, r) in records.iter().enumerate() {
        let row = i / eps_points; // delta index
        let col = i % eps_points;
        let p = r.probability_noisy.unwrap_or(r.probability_ideal);
        // rows drawn bottom-up so delta increases upward
        let y = H - MARGIN - (row + 1) as f64 * ch;
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            fnum(MARGIN + col as f64 * cw),
            fnum(y),
            fnum(cw + 0.05),
            fnum(ch + 0.05),
            colormap(p)
        ));
    }
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fnum(MARGIN),
        fnum(MARGIN),
        fnum(W - 2.0 * MARGIN),
        fnum(H - 2.0 * MARGIN)
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

/// Monotone blue-to-yellow map over [0, 1].
fn colormap(p: f64) -> String {
    let p = p.clamp(0.0, 1.0);
    let r = (255.0 * p).round() as u8;
    let g = (255.0 * (0.2 + 0.8 * p)).round() as u8;
    let b = (255.0 * (0.6 - 0.45 * p)).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
