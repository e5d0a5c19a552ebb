//! Self-contained SVG heatmaps (inline styling, no external assets, no
//! timestamps, so reruns are byte-identical).

use targetzone::Surface64;

/// Viridis anchor colors, interpolated linearly.
const VIRIDIS: [(u8, u8, u8); 9] = [
    (68, 1, 84),
    (72, 40, 120),
    (62, 74, 137),
    (49, 104, 142),
    (38, 130, 142),
    (31, 158, 137),
    (53, 183, 121),
    (109, 205, 89),
    (253, 231, 37),
];

fn colormap(v: f64) -> (u8, u8, u8) {
    let v = v.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let i = (v.floor() as usize).min(VIRIDIS.len() - 2);
    let w = v - i as f64;
    let (a, b) = (VIRIDIS[i], VIRIDIS[i + 1]);
    let mix = |x: u8, y: u8| (x as f64 + w * (y as f64 - x as f64)).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 1000.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.1e}")
    }
}

/// Renders a surface as a heatmap with time on the horizontal axis and the
/// rate on the vertical axis. Large surfaces are strided down to at most
/// ~240 x 200 cells.
pub fn heatmap(surface: &Surface64, title: &str) -> String {
    let grid = surface.grid();
    let (left, top, plot_w, plot_h) = (70.0, 40.0, 620.0, 460.0);
    let width = 800.0;
    let height = 560.0;

    let row_stride = (grid.nt() / 200).max(1);
    let col_stride = (grid.nz() / 240).max(1);
    let rows: Vec<usize> = (0..=grid.nt()).step_by(row_stride).collect();
    let cols: Vec<usize> = (0..grid.nz()).step_by(col_stride).collect();

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &k in &rows {
        for &j in &cols {
            let v = surface.value(k, j);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }

    let mut out = String::with_capacity(rows.len() * cols.len() * 64 + 4096);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        left + plot_w / 2.0,
        title
    ));

    // cells: x ~ time, y ~ z (z_min at the bottom)
    let cell_w = plot_w / rows.len() as f64;
    let cell_h = plot_h / cols.len() as f64;
    for (ri, &k) in rows.iter().enumerate() {
        for (ci, &j) in cols.iter().enumerate() {
            let v = (surface.value(k, j) - lo) / (hi - lo);
            let (r, g, b) = colormap(v);
            let x = left + ri as f64 * cell_w;
            let y = top + plot_h - (ci + 1) as f64 * cell_h;
            out.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>\n",
                cell_w + 0.5,
                cell_h + 0.5
            ));
        }
    }

    // axes
    out.push_str(&format!(
        "<rect x=\"{left}\" y=\"{top}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let t = grid.t_max() * f;
        let x = left + plot_w * f;
        out.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{}\" x2=\"{x:.1}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{x:.1}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            top + plot_h,
            top + plot_h + 5.0,
            top + plot_h + 20.0,
            fmt_tick(t)
        ));
        let z = grid.z_min() + (grid.z_max() - grid.z_min()) * f;
        let y = top + plot_h * (1.0 - f);
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.1}\" x2=\"{left}\" y2=\"{y:.1}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            left - 5.0,
            left - 8.0,
            y + 4.0,
            fmt_tick(z)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">t</text>\n\
         <text x=\"16\" y=\"{}\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">z</text>\n",
        left + plot_w / 2.0,
        top + plot_h + 38.0,
        top + plot_h / 2.0
    ));

    // colorbar
    let bar_x = left + plot_w + 20.0;
    out.push_str("<defs><linearGradient id=\"cb\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n");
    for (i, &(r, g, b)) in VIRIDIS.iter().enumerate() {
        out.push_str(&format!(
            "<stop offset=\"{:.3}\" stop-color=\"rgb({r},{g},{b})\"/>\n",
            i as f64 / (VIRIDIS.len() - 1) as f64
        ));
    }
    out.push_str("</linearGradient></defs>\n");
    out.push_str(&format!(
        "<rect x=\"{bar_x}\" y=\"{top}\" width=\"18\" height=\"{plot_h}\" fill=\"url(#cb)\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
        bar_x + 24.0,
        top + 10.0,
        fmt_tick(hi),
        bar_x + 24.0,
        top + plot_h,
        fmt_tick(lo)
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use targetzone::Grid64;

    #[test]
    fn heatmap_is_well_formed_and_deterministic() {
        let grid = Grid64::new(0.0, 2.0, 11, 10, 1.0).unwrap();
        let s = Surface64::tabulate(grid, |t, z| t * z).unwrap();
        let a = heatmap(&s, "test");
        let b = heatmap(&s, "test");
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("linearGradient"));
    }

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), VIRIDIS[0]);
        assert_eq!(colormap(1.0), VIRIDIS[8]);
    }
}
