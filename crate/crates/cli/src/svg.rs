//! Minimal SVG plotting: 3-D loci, component traces and parameter panels.
//!
//! Coordinates are written with three decimals, so identical inputs give
//! byte-identical files.

use std::fmt::Write as _;

use ndarray::ArrayView2;
use zeta_mds_core::{LawSummary, SinusoidFit};

const FONT: &str = "font-family=\"sans-serif\"";

/// Five-stop approximation of the viridis colour map, `t` in `[0, 1]`.
pub fn colormap(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (STOPS.len() - 1) as f64;
    let k = (x.floor() as usize).min(STOPS.len() - 2);
    let f = x - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |u: f64, v: f64| (u + (v - u) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Rectangle in pixels with a linear data-to-pixel map.
#[derive(Debug, Clone, Copy)]
struct Frame {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.x + (v - lo) / (hi - lo) * self.w
    }

    fn py(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        self.y + self.h - (v - lo) / (hi - lo) * self.h
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let span = hi - lo;
    if span <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 1.0, hi + 1.0);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

fn open(width: f64, height: f64) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )
    .unwrap();
    writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    s
}

fn text(s: &mut String, x: f64, y: f64, size: f64, anchor: &str, body: &str) {
    writeln!(
        s,
        "<text x=\"{x:.3}\" y=\"{y:.3}\" font-size=\"{size}\" text-anchor=\"{anchor}\" {FONT}>{}</text>",
        escape(body)
    )
    .unwrap();
}

fn escape(body: &str) -> String {
    body.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn short(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e6 {
        format!("{v:.0}")
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Box with min/max labels on both axes.
fn axes(s: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    writeln!(
        s,
        "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"#444\" stroke-width=\"0.8\"/>",
        f.x, f.y, f.w, f.h
    )
    .unwrap();
    text(s, f.x, f.y + f.h + 13.0, 10.0, "start", &short(f.x_range.0));
    text(s, f.x + f.w, f.y + f.h + 13.0, 10.0, "end", &short(f.x_range.1));
    text(s, f.x - 4.0, f.y + f.h, 10.0, "end", &short(f.y_range.0));
    text(s, f.x - 4.0, f.y + 9.0, 10.0, "end", &short(f.y_range.1));
    text(s, f.x + f.w / 2.0, f.y + f.h + 26.0, 11.0, "middle", x_label);
    writeln!(
        s,
        "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"11\" text-anchor=\"middle\" {FONT} transform=\"rotate(-90 {:.3} {:.3})\">{}</text>",
        f.x - 30.0,
        f.y + f.h / 2.0,
        f.x - 30.0,
        f.y + f.h / 2.0,
        escape(y_label)
    )
    .unwrap();
}

fn polyline(s: &mut String, f: &Frame, pts: impl Iterator<Item = (f64, f64)>, stroke: &str, extra: &str) {
    // Points outside the vertical range are dropped so curves stay in the frame.
    let (lo, hi) = f.y_range;
    let mut d = String::new();
    for (x, y) in pts {
        if x.is_finite() && y.is_finite() && (lo..=hi).contains(&y) {
            write!(d, "{:.3},{:.3} ", f.px(x), f.py(y)).unwrap();
        }
    }
    writeln!(
        s,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1\" {extra}/>",
        d.trim_end()
    )
    .unwrap();
}

/// Axonometric view angles in degrees.
#[derive(Debug, Clone, Copy)]
pub struct View {
    pub azimuth: f64,
    pub elevation: f64,
}

/// Rotates by `azimuth` about the third axis, then tilts by `elevation`.
/// Missing coordinates (embeddings with fewer than three dimensions) are 0.
fn project(coords: ArrayView2<f64>, view: View) -> Vec<(f64, f64)> {
    let (sa, ca) = view.azimuth.to_radians().sin_cos();
    let (se, ce) = view.elevation.to_radians().sin_cos();
    coords
        .rows()
        .into_iter()
        .map(|r| {
            let get = |k: usize| if k < r.len() { r[k] } else { 0.0 };
            let (x, y, z) = (get(0), get(1), get(2));
            let u = x * ca - y * sa;
            let depth = x * sa + y * ca;
            let v = z * ce + depth * se;
            (u, v)
        })
        .collect()
}

fn locus_into(s: &mut String, coords: ArrayView2<f64>, view: View, x: f64, y: f64, size: f64, title: &str) {
    let pts = project(coords, view);
    let f = Frame {
        x,
        y,
        w: size,
        h: size,
        x_range: padded_range(pts.iter().map(|p| p.0)),
        y_range: padded_range(pts.iter().map(|p| p.1)),
    };
    writeln!(
        s,
        "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{size:.3}\" height=\"{size:.3}\" fill=\"none\" stroke=\"#bbb\" stroke-width=\"0.8\"/>"
    )
    .unwrap();
    text(s, x + size / 2.0, y - 6.0, 12.0, "middle", title);
    let n = pts.len();
    for (i, (u, v)) in pts.iter().enumerate() {
        let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        writeln!(
            s,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.6\" fill=\"{}\"/>",
            f.px(*u),
            f.py(*v),
            colormap(t)
        )
        .unwrap();
    }
}

fn colorbar(s: &mut String, x: f64, y: f64, h: f64, n: usize) {
    let steps = 64;
    let dh = h / steps as f64;
    for k in 0..steps {
        let t = 1.0 - (k as f64 + 0.5) / steps as f64;
        writeln!(
            s,
            "<rect x=\"{x:.3}\" y=\"{:.3}\" width=\"12\" height=\"{:.3}\" fill=\"{}\"/>",
            y + k as f64 * dh,
            dh + 0.5,
            colormap(t)
        )
        .unwrap();
    }
    text(s, x + 16.0, y + 9.0, 10.0, "start", &n.to_string());
    text(s, x + 16.0, y + h, 10.0, "start", "1");
    text(s, x + 6.0, y - 6.0, 10.0, "middle", "i");
}

/// One projected locus, coloured by object order, with a colour bar.
pub fn locus(coords: ArrayView2<f64>, view: View, title: &str) -> String {
    let mut s = open(560.0, 520.0);
    locus_into(&mut s, coords, view, 30.0, 40.0, 450.0, title);
    colorbar(&mut s, 500.0, 40.0, 450.0, coords.nrows());
    s.push_str("</svg>\n");
    s
}

/// Loci laid out on a grid, three per row.
pub fn loci_grid(panels: &[(String, ArrayView2<f64>)], view: View) -> String {
    let cols = 3usize;
    let rows = panels.len().div_ceil(cols).max(1);
    let size = 300.0;
    let width = cols as f64 * (size + 30.0) + 60.0;
    let height = rows as f64 * (size + 40.0) + 20.0;
    let mut s = open(width, height);
    for (k, (title, coords)) in panels.iter().enumerate() {
        let x = 20.0 + (k % cols) as f64 * (size + 30.0);
        let y = 30.0 + (k / cols) as f64 * (size + 40.0);
        locus_into(&mut s, *coords, view, x, y, size, title);
    }
    let n = panels.first().map_or(0, |p| p.1.nrows());
    colorbar(&mut s, width - 45.0, 30.0, height - 60.0, n);
    s.push_str("</svg>\n");
    s
}

/// One panel per component: the trace and, when present, its fitted sinusoid.
pub fn traces(coords: ArrayView2<f64>, fits: &[SinusoidFit]) -> String {
    let comps = coords.ncols();
    let panel_h = 90.0;
    let width = 900.0;
    let height = comps as f64 * (panel_h + 20.0) + 40.0;
    let mut s = open(width, height);
    let n = coords.nrows();
    for p in 0..comps {
        let col = coords.column(p);
        let f = Frame {
            x: 70.0,
            y: 20.0 + p as f64 * (panel_h + 20.0),
            w: width - 100.0,
            h: panel_h,
            x_range: (1.0, n.max(2) as f64),
            y_range: padded_range(col.iter().copied()),
        };
        axes(&mut s, &f, if p + 1 == comps { "i" } else { "" }, &format!("c{}", p + 1));
        polyline(&mut s, &f, col.iter().enumerate().map(|(i, v)| ((i + 1) as f64, *v)), "#1f4e9c", "");
        if let Some(fit) = fits.iter().find(|fit| fit.p == p + 1) {
            let mean = col.mean().unwrap_or(0.0);
            polyline(
                &mut s,
                &f,
                (1..=n).map(|i| (i as f64, mean + fit.eval(i as f64))),
                "#d1495b",
                "stroke-dasharray=\"4 3\"",
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// `A_p`, `omega_p` and `phi_p` against `p`, with the fitted laws overlaid.
pub fn parameters(fits: &[SinusoidFit], laws: &LawSummary) -> String {
    let width = 960.0;
    let height = 320.0;
    let mut s = open(width, height);
    let ps: Vec<f64> = fits.iter().map(|f| f.p as f64).collect();
    let p_range = padded_range(ps.iter().copied());
    let series: [(&str, Vec<f64>); 3] = [
        ("A_p", fits.iter().map(|f| f.amplitude).collect()),
        ("omega_p", fits.iter().map(|f| f.omega).collect()),
        ("phi_p", fits.iter().map(|f| f.phi).collect()),
    ];
    for (k, (label, ys)) in series.iter().enumerate() {
        let f = Frame {
            x: 70.0 + k as f64 * 310.0,
            y: 30.0,
            w: 230.0,
            h: 230.0,
            x_range: p_range,
            y_range: padded_range(ys.iter().copied()),
        };
        axes(&mut s, &f, "p", label);
        for (p, y) in ps.iter().zip(ys) {
            writeln!(
                s,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#1f4e9c\"/>",
                f.px(*p),
                f.py(*y)
            )
            .unwrap();
        }
        let grid = || (0..=50).map(|j| p_range.0 + (p_range.1 - p_range.0) * j as f64 / 50.0);
        match (k, laws.amplitude_law, laws.frequency_law) {
            (0, Some(law), _) => {
                polyline(&mut s, &f, grid().filter(|p| *p > 0.0).map(|p| (p, law.eval(p))), "#d1495b", "");
                text(&mut s, f.x + f.w / 2.0, f.y - 8.0, 11.0, "middle",
                    &format!("A ~ p^{:.3} (r2 {:.3})", law.exponent, law.r2));
            }
            (1, _, Some(law)) => {
                polyline(&mut s, &f, grid().map(|p| (p, law.eval(p))), "#d1495b", "");
                text(&mut s, f.x + f.w / 2.0, f.y - 8.0, 11.0, "middle",
                    &format!("omega = {:.3e} p + {:.2e} (r2 {:.3})", law.slope, law.intercept, law.r2));
            }
            _ => {}
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), "#440154");
        assert_eq!(colormap(1.0), "#fde725");
        assert_eq!(colormap(f64::NAN), "#440154");
    }

    #[test]
    fn locus_has_one_marker_per_object() {
        let coords = Array2::from_shape_fn((25, 3), |(i, k)| (i * (k + 1)) as f64);
        let view = View {
            azimuth: 30.0,
            elevation: 20.0,
        };
        let svg = locus(coords.view(), view, "test");
        assert_eq!(svg.matches("<circle").count(), 25);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg, locus(coords.view(), view, "test"));
    }

    #[test]
    fn two_dimensional_coordinates_project() {
        let coords = Array2::from_shape_fn((5, 2), |(i, k)| (i + k) as f64);
        let pts = project(coords.view(), View { azimuth: 0.0, elevation: 0.0 });
        assert_eq!(pts[3], (3.0, 0.0));
    }

    #[test]
    fn titles_are_escaped() {
        let coords = Array2::<f64>::zeros((3, 3));
        let svg = locus(coords.view(), View { azimuth: 0.0, elevation: 0.0 }, "a<b&c");
        assert!(svg.contains("a&lt;b&amp;c"));
    }
}
