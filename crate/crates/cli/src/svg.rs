//! Minimal static scatter plots, written as standalone SVG documents.

/// Renders points as a scatter chart with linear axes and light grid lines.
pub fn scatter(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let width = 900.0_f64;
    let height = 560.0_f64;
    let ml = 80.0_f64; // margins
    let mr = 30.0_f64;
    let mt = 50.0_f64;
    let mb = 70.0_f64;

    let finite: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x_min, x_max) = axis_range(finite.iter().map(|p| p.0));
    let (y_min, y_max) = axis_range(finite.iter().map(|p| p.1));

    let px = |x: f64| ml + (x - x_min) / (x_max - x_min) * (width - ml - mr);
    let py = |y: f64| height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"18\">{}</text>\n",
        width / 2.0,
        escape(title)
    ));

    // axes and ticks
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let xv = x_min + f * (x_max - x_min);
        let yv = y_min + f * (y_max - y_min);
        let gx = px(xv);
        let gy = py(yv);
        svg.push_str(&format!(
            "<line x1=\"{gx:.1}\" y1=\"{mt}\" x2=\"{gx:.1}\" y2=\"{:.1}\" stroke=\"#ddd\"/>\n",
            height - mb
        ));
        svg.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{gy:.1}\" x2=\"{:.1}\" y2=\"{gy:.1}\" stroke=\"#ddd\"/>\n",
            width - mr
        ));
        svg.push_str(&format!(
            "<text x=\"{gx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>\n",
            height - mb + 20.0,
            format_tick(xv)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>\n",
            ml - 8.0,
            gy + 4.0,
            format_tick(yv)
        ));
    }
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{0:.1}\" x2=\"{1:.1}\" y2=\"{0:.1}\" stroke=\"black\"/>\n",
        height - mb,
        width - mr
    ));
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        height - mb
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\">{}</text>\n",
        (ml + width - mr) / 2.0,
        height - 18.0,
        escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"14\" transform=\"rotate(-90 20 {:.1})\">{}</text>\n",
        (mt + height - mb) / 2.0,
        (mt + height - mb) / 2.0,
        escape(y_label)
    ));

    for (x, y) in &finite {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.8\" fill=\"#1f5fa8\" fill-opacity=\"0.7\"/>\n",
            px(*x),
            py(*y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    if min == max {
        return (min - 0.5, max + 0.5);
    }
    let pad = (max - min) * 0.05;
    (min - pad, max + pad)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
