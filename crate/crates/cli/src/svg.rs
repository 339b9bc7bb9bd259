//! Minimal SVG writers: a line plot and a heatmap. CSV is the authoritative
//! output; these are plotting conveniences with no framework contract.

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

fn axis_label(x: f64) -> String {
    format!("{x:.6e}")
}

fn frame(title: &str, x_label: &str, y_label: &str, body: &str, ticks: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tcx}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"14\">{title}</text>\n",
            "<text x=\"{tcx}\" y=\"{h_b}\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"12\">{x_label}</text>\n",
            "<text x=\"16\" y=\"{mcy}\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"12\" transform=\"rotate(-90 16 {mcy})\">{y_label}</text>\n",
            "{body}{ticks}</svg>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tcx = MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        h_b = HEIGHT - 12.0,
        mcy = MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0,
        title = title,
        x_label = x_label,
        y_label = y_label,
        body = body,
        ticks = ticks,
    )
}

fn tick_text(x: f64, y: f64, anchor: &str, value: f64) -> String {
    format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
        axis_label(value)
    )
}

/// Single-trace line plot.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x_lo, x_hi) = bounds(xs);
    let (y_lo, y_hi) = bounds(ys);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo).max(1e-300) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo).max(1e-300) * plot_h;

    let mut points = String::new();
    for (x, y) in xs.iter().zip(ys) {
        points.push_str(&format!("{:.2},{:.2} ", sx(*x), sy(*y)));
    }
    let body = format!(
        concat!(
            "<rect x=\"{l}\" y=\"{t}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" ",
            "stroke=\"black\" stroke-width=\"1\"/>\n",
            "<polyline points=\"{points}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\"/>\n"
        ),
        l = MARGIN_L,
        t = MARGIN_T,
        pw = plot_w,
        ph = plot_h,
        points = points.trim_end(),
    );
    let mut ticks = String::new();
    ticks.push_str(&tick_text(MARGIN_L, HEIGHT - MARGIN_B + 16.0, "middle", x_lo));
    ticks.push_str(&tick_text(WIDTH - MARGIN_R, HEIGHT - MARGIN_B + 16.0, "middle", x_hi));
    ticks.push_str(&tick_text(MARGIN_L - 6.0, HEIGHT - MARGIN_B, "end", y_lo));
    ticks.push_str(&tick_text(MARGIN_L - 6.0, MARGIN_T + 8.0, "end", y_hi));
    frame(title, x_label, y_label, &body, &ticks)
}

/// Row-major heatmap; values mapped onto a blue-to-yellow ramp. Input is
/// min-pooled down to at most 160 cells per axis so resonance dips survive
/// the decimation and the file stays reasonably small.
pub fn heatmap(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[f64],
) -> String {
    let (nx, ny) = (xs.len(), ys.len());
    let max_cells = 160_usize;
    let pool_x = nx.div_ceil(max_cells);
    let pool_y = ny.div_ceil(max_cells);
    let cols = nx.div_ceil(pool_x);
    let rows = ny.div_ceil(pool_y);

    let mut pooled = vec![f64::MAX; cols * rows];
    for i in 0..nx {
        for j in 0..ny {
            let c = i / pool_x;
            let r = j / pool_y;
            let v = values[i * ny + j];
            let cell = &mut pooled[r * cols + c];
            if v < *cell {
                *cell = v;
            }
        }
    }
    let (v_lo, v_hi) = bounds(&pooled);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let cell_w = plot_w / cols as f64;
    let cell_h = plot_h / rows as f64;
    let mut body = String::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = (pooled[r * cols + c] - v_lo) / (v_hi - v_lo).max(1e-300);
            // low |s11| (resonances) rendered bright
            let t = 1.0 - v.clamp(0.0, 1.0);
            let red = (40.0 + 215.0 * t) as u8;
            let green = (40.0 + 180.0 * t) as u8;
            let blue = (120.0 - 60.0 * t).max(0.0) as u8;
            body.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({red},{green},{blue})\"/>\n",
                MARGIN_L + c as f64 * cell_w,
                MARGIN_T + plot_h - (r + 1) as f64 * cell_h,
                cell_w + 0.5,
                cell_h + 0.5,
            ));
        }
    }
    let mut ticks = String::new();
    ticks.push_str(&tick_text(MARGIN_L, HEIGHT - MARGIN_B + 16.0, "middle", xs[0]));
    ticks.push_str(&tick_text(
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B + 16.0,
        "middle",
        xs[nx - 1],
    ));
    ticks.push_str(&tick_text(MARGIN_L - 6.0, HEIGHT - MARGIN_B, "end", ys[0]));
    ticks.push_str(&tick_text(MARGIN_L - 6.0, MARGIN_T + 8.0, "end", ys[ny - 1]));
    frame(title, x_label, y_label, &body, &ticks)
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
