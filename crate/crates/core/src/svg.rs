//! Minimal self-contained SVG line charts for report figures.
//!
//! Hand-rolled on purpose: the figures are simple polylines with axes and a
//! legend, and emitting the markup directly keeps the output byte-stable
//! across runs and platforms.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 64.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 6] = [
    "#1f6fb2", "#d1495b", "#3f8f5f", "#8a5fbf", "#c07f2a", "#4f5d75",
];

/// One polyline.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Chart description. `right_series` plot against their own y scale drawn
/// on the right edge, for overlaying token counts on accuracy curves.
#[derive(Debug, Clone)]
pub struct ChartSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub y_range: Option<(f64, f64)>,
    pub right_label: Option<String>,
    pub right_series: Vec<Series>,
}

impl ChartSpec {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        ChartSpec {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            series: Vec::new(),
            y_range: None,
            right_label: None,
            right_series: Vec::new(),
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range_of(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn fmt_num(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 && v.abs() < 1e15 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

/// Render the chart as a standalone SVG document.
pub fn render(spec: &ChartSpec) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let all_x = spec
        .series
        .iter()
        .chain(spec.right_series.iter())
        .flat_map(|s| s.points.iter().map(|p| p.0));
    let (x_lo, x_hi) = range_of(all_x);
    let (y_lo, y_hi) = spec
        .y_range
        .unwrap_or_else(|| range_of(spec.series.iter().flat_map(|s| s.points.iter().map(|p| p.1))));
    let (r_lo, r_hi) = range_of(spec.right_series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));

    let map_x = |v: f64| MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w;
    let map_y = |v: f64| MARGIN_TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h;
    let map_r = |v: f64| MARGIN_TOP + plot_h - (v - r_lo) / (r_hi - r_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(&spec.title)
    ));

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{l:.1}\" y1=\"{t:.1}\" x2=\"{l:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    ));
    out.push_str(&format!(
        "<line x1=\"{l:.1}\" y1=\"{b:.1}\" x2=\"{r:.1}\" y2=\"{b:.1}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    ));

    // Ticks and grid.
    for i in 0..=4 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 4.0;
        let px = map_x(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{b:.1}\" x2=\"{px:.1}\" y2=\"{b2:.1}\" stroke=\"black\"/>\n",
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{y:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"11\">{}</text>\n",
            fmt_num(fx),
            y = MARGIN_TOP + plot_h + 20.0
        ));

        let fy = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let py = map_y(fy);
        out.push_str(&format!(
            "<line x1=\"{l:.1}\" y1=\"{py:.1}\" x2=\"{r:.1}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
            l = MARGIN_LEFT,
            r = MARGIN_LEFT + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{py:.1}\" text-anchor=\"end\" dominant-baseline=\"middle\" \
             font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            fmt_num(fy),
            x = MARGIN_LEFT - 8.0
        ));
        if !spec.right_series.is_empty() {
            let fr = r_lo + (r_hi - r_lo) * i as f64 / 4.0;
            let pr = map_r(fr);
            out.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{pr:.1}\" text-anchor=\"start\" dominant-baseline=\"middle\" \
                 font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                fmt_num(fr),
                x = MARGIN_LEFT + plot_w + 8.0
            ));
        }
    }

    // Axis labels.
    out.push_str(&format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{}</text>\n",
        escape(&spec.x_label),
        x = MARGIN_LEFT + plot_w / 2.0,
        y = HEIGHT - 12.0
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{y:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 18 {y:.1})\">{}</text>\n",
        escape(&spec.y_label),
        y = MARGIN_TOP + plot_h / 2.0
    ));
    if let Some(label) = &spec.right_label {
        let x = WIDTH - 18.0;
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
             font-size=\"13\" transform=\"rotate(90 {x:.1} {y:.1})\">{}</text>\n",
            escape(label),
            y = MARGIN_TOP + plot_h / 2.0
        ));
    }

    // Series.
    let mut color_idx = 0usize;
    let mut legend_y = MARGIN_TOP + 4.0;
    let draw = |out: &mut String,
                    series: &Series,
                    to_y: &dyn Fn(f64) -> f64,
                    dashed: bool,
                    color_idx: &mut usize,
                    legend_y: &mut f64| {
        let color = PALETTE[*color_idx % PALETTE.len()];
        *color_idx += 1;
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|p| format!("{:.1},{:.1}", map_x(p.0), to_y(p.1)))
            .collect();
        let dash = if dashed { " stroke-dasharray=\"6 3\"" } else { "" };
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} points=\"{}\"/>\n",
            pts.join(" ")
        ));
        for p in series.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                map_x(p.0),
                to_y(p.1)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{legend_y:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
             fill=\"{color}\">{}</text>\n",
            escape(&series.name),
            x = MARGIN_LEFT + 10.0
        ));
        *legend_y += 14.0;
    };

    for s in &spec.series {
        draw(&mut out, s, &map_y, false, &mut color_idx, &mut legend_y);
    }
    for s in &spec.right_series {
        draw(&mut out, s, &map_r, true, &mut color_idx, &mut legend_y);
    }

    out.push_str("</svg>\n");
    out
}
