//! Minimal deterministic SVG charts: accuracy curves and weight bars.
//!
//! All coordinates are formatted with fixed precision so identical inputs
//! produce byte-identical files.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 44.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn fmt(x: f64) -> String {
    format!("{x:.2}")
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    )
}

fn axes(y_label: &str, x_label: &str) -> String {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let mut s = String::new();
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(x0),
        fmt(y0),
        fmt(x1),
        fmt(y0)
    ));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(x0),
        fmt(y0),
        fmt(x0),
        fmt(y1)
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n",
        fmt((x0 + x1) / 2.0),
        fmt(HEIGHT - 10.0)
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{y_label}</text>\n",
        fmt((y0 + y1) / 2.0),
        fmt((y0 + y1) / 2.0)
    ));
    s
}

fn x_pos(i: f64, max: f64) -> f64 {
    MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) * if max > 0.0 { i / max } else { 0.0 }
}

fn y_pos(v: f64) -> f64 {
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    y0 - (y0 - y1) * v.clamp(0.0, 1.0)
}

/// Accuracy-versus-epoch polylines, one per labelled series; the y axis is
/// fixed to [0, 1].
pub fn accuracy_curves(title: &str, series: &[(String, Vec<f64>)]) -> String {
    let mut s = header(title);
    s.push_str(&axes("accuracy", "epoch"));
    let max_epoch = series
        .iter()
        .map(|(_, v)| v.len())
        .max()
        .unwrap_or(1)
        .saturating_sub(1)
        .max(1) as f64;
    for (tick, v) in [(0.0, "0.0"), (0.5, "0.5"), (1.0, "1.0")] {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{v}</text>\n",
            fmt(MARGIN_L - 6.0),
            fmt(y_pos(tick) + 3.0)
        ));
    }
    for (i, (label, values)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(e, &v)| format!("{},{}", fmt(x_pos(e as f64, max_epoch)), fmt(y_pos(v))))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label}</text>\n",
            fmt(WIDTH - MARGIN_R - 120.0),
            fmt(MARGIN_T + 16.0 * (i as f64 + 1.0))
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// One bar per expert weight, y axis [0, 1].
pub fn weight_bars(title: &str, labels: &[String], weights: &[f64]) -> String {
    let mut s = header(title);
    s.push_str(&axes("weight", "expert (ascending topsim)"));
    let n = weights.len().max(1) as f64;
    let span = WIDTH - MARGIN_L - MARGIN_R;
    let bar_w = span / n * 0.7;
    for (i, (&w, label)) in weights.iter().zip(labels).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let cx = MARGIN_L + span * (i as f64 + 0.5) / n;
        let y = y_pos(w);
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>\n",
            fmt(cx - bar_w / 2.0),
            fmt(y),
            fmt(bar_w),
            fmt(y_pos(0.0) - y)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{label}</text>\n",
            fmt(cx),
            fmt(HEIGHT - MARGIN_B + 14.0)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>\n",
            fmt(cx),
            fmt(y - 4.0),
            format!("{w:.3}")
        ));
    }
    s.push_str("</svg>\n");
    s
}
