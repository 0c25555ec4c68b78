//! Level diagrams as plain SVG 1.1.

use std::fmt::Write;

use super::config::Config;

pub struct Panel {
    pub label: String,
    /// Levels already mapped onto [0, 1].
    pub levels: Vec<f64>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One column per panel, a horizontal tick per level, label underneath.
pub fn render(panels: &[Panel], cfg: &Config) -> String {
    let k = panels.len() as f64;
    let width = 2.0 * cfg.margin + k * cfg.panel_width + (k - 1.0).max(0.0) * cfg.panel_gap;
    let label_band = 2.0 * cfg.label_size;
    let height = 2.0 * cfg.margin + cfg.plot_height + label_band;

    let mut out = String::new();
    // writing into a String cannot fail
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{width:.3}" height="{height:.3}" fill="white"/>"#);
    for (idx, panel) in panels.iter().enumerate() {
        let left = cfg.margin + idx as f64 * (cfg.panel_width + cfg.panel_gap);
        let x1 = left + (cfg.panel_width - cfg.tick_length) / 2.0;
        let x2 = x1 + cfg.tick_length;
        let _ = writeln!(out, r#"<g id="panel-{idx}" stroke="black" stroke-width="1.5">"#);
        for &v in &panel.levels {
            let y = cfg.margin + (1.0 - v) * cfg.plot_height;
            let _ = writeln!(out, r#"<line x1="{x1:.3}" y1="{y:.3}" x2="{x2:.3}" y2="{y:.3}"/>"#);
        }
        let _ = writeln!(out, "</g>");
        let tx = left + cfg.panel_width / 2.0;
        let ty = cfg.margin + cfg.plot_height + 1.5 * cfg.label_size;
        let _ = writeln!(
            out,
            r#"<text x="{tx:.3}" y="{ty:.3}" font-family="sans-serif" font-size="{:.3}" text-anchor="middle">{}</text>"#,
            cfg.label_size,
            escape(&panel.label)
        );
    }
    out.push_str("</svg>\n");
    out
}
