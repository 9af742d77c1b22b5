use std::fmt::Write;

use super::Spectrum;

/// One stacked plot window.
#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub title: String,
    pub lo_hz: f64,
    pub hi_hz: f64,
}

const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 240.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 60.0;

fn nice_step(span: f64, target_ticks: f64) -> f64 {
    let raw = span / target_ticks;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Real part of `spectrum` in stacked panels. The bottom axis of each panel
/// is labeled in Hz and in ppm relative to `carrier_ppm` at a spectrometer
/// frequency `nu_hz`. Output is deterministic.
pub fn render_svg(spectrum: &Spectrum, panels: &[Panel], nu_hz: f64, carrier_ppm: f64) -> String {
    let height = PANEL_HEIGHT * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (idx, panel) in panels.iter().enumerate() {
        let top = idx as f64 * PANEL_HEIGHT;
        let plot_w = WIDTH - MARGIN_L - MARGIN_R;
        let plot_h = PANEL_HEIGHT - MARGIN_T - MARGIN_B;
        let y0 = top + MARGIN_T;
        let span = panel.hi_hz - panel.lo_hz;
        // NMR convention: frequency increases to the left
        let x_of = |f: f64| MARGIN_L + (panel.hi_hz - f) / span * plot_w;

        let points: Vec<(f64, f64)> = spectrum
            .freqs_hz
            .iter()
            .zip(&spectrum.values)
            .filter(|(f, _)| **f >= panel.lo_hz && **f <= panel.hi_hz)
            .map(|(f, z)| (*f, z.re))
            .collect();
        let peak = points.iter().fold(0.0f64, |m, (_, y)| m.max(y.abs()));
        let scale = if peak > 0.0 { 0.45 * plot_h / peak } else { 0.0 };
        let mid = y0 + plot_h / 2.0;

        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13">{}</text>"#,
            MARGIN_L,
            top + 18.0,
            escape(&panel.title)
        );
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L:.1}" y="{y0:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{mid:.1}" x2="{:.1}" y2="{mid:.1}" stroke="#ccc"/>"##,
            MARGIN_L,
            MARGIN_L + plot_w
        );

        let mut path = String::new();
        for (f, y) in &points {
            let _ = write!(path, "{:.2},{:.2} ", x_of(*f), mid - y * scale);
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#,
            path.trim_end()
        );

        let step = nice_step(span, 6.0);
        let base = y0 + plot_h;
        let mut tick = (panel.lo_hz / step).ceil() * step;
        while tick <= panel.hi_hz + 1e-9 * span {
            let x = x_of(tick);
            let ppm = carrier_ppm + tick / nu_hz * 1e6;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{base:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
                base + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
                base + 17.0,
                tick + 0.0
            );
            let _ = writeln!(
                out,
                r##"<text x="{x:.1}" y="{:.1}" text-anchor="middle" fill="#555">{:.3}</text>"##,
                base + 31.0,
                ppm
            );
            tick += step;
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">Hz (upper) / ppm (lower)</text>"#,
            MARGIN_L + plot_w / 2.0,
            base + 50.0
        );
    }
    out.push_str("</svg>\n");
    out
}
