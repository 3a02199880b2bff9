//! CSV and SVG emission.

use std::fmt::Write;

use crate::geometry::{Domain, Piece, Point};

/// `%.15g`: fifteen significant digits, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.14e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..15).contains(&exp) {
        let s = format!("{:.*}", (14 - exp).max(0) as usize, x);
        trim(&s).to_string()
    } else {
        format!("{}e{}{:02}", trim(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV text with a schema comment line and a header.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, header: &str) -> Csv {
        Csv { text: format!("# schema: {schema}\n{header}\n") }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

fn boundary_points(domain: &Domain) -> Vec<Point> {
    let mut out = Vec::new();
    for pc in &domain.pieces {
        let n = match pc {
            Piece::Line { .. } => 1,
            Piece::Arc { .. } => 64,
        };
        for i in 0..n {
            out.push(pc.at(i as f64 / n as f64));
        }
    }
    out
}

/// Five-stop blue to yellow ramp.
fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * 4.0;
    let i = (t.floor() as usize).min(3);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Piecewise-constant map of `values` on square cells of side `cell`
/// centred at the poles, with the domain boundary as a dark thick line.
pub fn heatmap(domain: &Domain, poles: &[Point], values: &[f64], cell: f64, title: &str) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 24.0;
    let (lo, hi) = domain.bounding_box();
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let s = (SIZE - 2.0 * PAD) / span;
    let tx = |p: Point| (PAD + (p.x - lo.x) * s, SIZE - PAD - (p.y - lo.y) * s);
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let vmin = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<title>{title}</title>"#);
    let w = cell * s;
    for (p, v) in poles.iter().zip(values) {
        let (x, y) = tx(*p);
        let fill = if v.is_finite() {
            color(if vmax > vmin { (v - vmin) / (vmax - vmin) } else { 0.5 })
        } else {
            "#999999".into()
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
            x - w / 2.0,
            y - w / 2.0,
            w,
            w
        );
    }
    let pts: Vec<String> = boundary_points(domain)
        .into_iter()
        .map(|p| {
            let (x, y) = tx(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        svg,
        r##"<polygon points="{}" fill="none" stroke="#111111" stroke-width="4" stroke-linejoin="round"/>"##,
        pts.join(" ")
    );
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="16" font-family="sans-serif" font-size="12">{title}: {} .. {}</text>"#,
        fmt_g(vmin),
        fmt_g(vmax)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Wireframe of a triangulation.
pub fn mesh_svg(domain: &Domain, vertices: &[Point], edges: &[(usize, usize)]) -> String {
    const SIZE: f64 = 480.0;
    const PAD: f64 = 12.0;
    let (lo, hi) = domain.bounding_box();
    let s = (SIZE - 2.0 * PAD) / (hi.x - lo.x).max(hi.y - lo.y);
    let tx = |p: Point| (PAD + (p.x - lo.x) * s, SIZE - PAD - (p.y - lo.y) * s);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n<path stroke=\"#333333\" stroke-width=\"0.4\" fill=\"none\" d=\""
    );
    for &(a, b) in edges {
        let ((x0, y0), (x1, y1)) = (tx(vertices[a]), tx(vertices[b]));
        let _ = write!(svg, "M{x0:.2} {y0:.2}L{x1:.2} {y1:.2}");
    }
    svg.push_str("\"/>\n</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(fmt_g(9.869604401089358), "9.86960440108936");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(20.0), "20");
        assert_eq!(fmt_g(-1.25e-12), "-1.25e-12");
        assert_eq!(fmt_g(123456789012345678.0), "1.23456789012346e+17");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn heatmap_draws_thick_boundary() {
        let d = build_domain(&DomainSpec::UnitSquare).unwrap();
        let svg = heatmap(&d, &[Point::new(0.5, 0.5)], &[1.0], 0.5, "lambda_1");
        assert!(svg.contains("stroke-width=\"4\""));
        assert_eq!(svg.matches("<rect").count(), 1);
    }
}
