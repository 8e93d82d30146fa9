//! A minimal log-log scatter plot written as SVG.

use std::fmt::Write;

/// Points with non-positive coordinates are dropped.
pub fn scatter_svg(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const PAD: f64 = 50.0;
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|&(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 10.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<polyline points="{PAD},{PAD} {PAD},{} {},{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    if !pts.is_empty() {
        let (x0, x1) = bounds(pts.iter().map(|p| p.0));
        let (y0, y1) = bounds(pts.iter().map(|p| p.1));
        for (x, y) in pts {
            let px = PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
            let py = H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
            let _ = writeln!(s, r#"<circle cx="{px:.1}" cy="{py:.1}" r="3" fill="steelblue"/>"#);
        }
        let _ = writeln!(s, r#"<text x="{PAD}" y="{}">10^{x0:.2}</text>"#, H - PAD + 15.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">10^{x1:.2}</text>"#,
            W - PAD,
            H - PAD + 15.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">10^{y0:.2}</text>"#,
            PAD - 3.0,
            H - PAD
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">10^{y1:.2}</text>"#,
            PAD - 3.0,
            PAD + 5.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = it.fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
