//! Static SVG map of the exponent region in `(1/p, 1/q)` coordinates: the
//! unit square, the strong-type triangle, the boundary behavior, and the
//! swept points shaded by their measured stability.

use std::fmt::Write as _;

use crate::sweep::SweepReport;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn map(u: f64, v: f64) -> (f64, f64) {
    let span = SIZE - 2.0 * MARGIN;
    (MARGIN + u * span, SIZE - MARGIN - v * span)
}

fn polygon(points: &[(f64, f64)], style: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&(u, v)| {
            let (x, y) = map(u, v);
            format!("{x:.1},{y:.1}")
        })
        .collect();
    format!("<polygon points=\"{}\" {}/>\n", coords.join(" "), style)
}

fn line(a: (f64, f64), b: (f64, f64), style: &str) -> String {
    let (x1, y1) = map(a.0, a.1);
    let (x2, y2) = map(b.0, b.1);
    format!("<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" {style}/>\n")
}

pub fn region_map_svg(report: &SweepReport) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Region with strong bounds: 1/p + 1/q > 1/2 inside the open unit square.
    svg.push_str(&polygon(
        &[(0.5, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.5)],
        "fill=\"#dce9f5\" stroke=\"none\"",
    ));
    // Local-L² triangle with vertices (1/2,0), (0,1/2), (1/2,1/2).
    svg.push_str(&polygon(
        &[(0.5, 0.0), (0.0, 0.5), (0.5, 0.5)],
        "fill=\"#aecbe8\" stroke=\"#5b8fc9\" stroke-width=\"1\"",
    ));
    // Unit square: solid edges carry weak bounds, dashed edges fail.
    svg.push_str(&line((1.0, 0.0), (1.0, 1.0), "stroke=\"#444\" stroke-width=\"2\""));
    svg.push_str(&line((0.0, 1.0), (1.0, 1.0), "stroke=\"#444\" stroke-width=\"2\""));
    svg.push_str(&line(
        (0.0, 0.0),
        (1.0, 0.0),
        "stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6,4\"",
    ));
    svg.push_str(&line(
        (0.0, 0.0),
        (0.0, 1.0),
        "stroke=\"#c0392b\" stroke-width=\"2\" stroke-dasharray=\"6,4\"",
    ));
    // Critical line 1/p + 1/q = 1/2.
    svg.push_str(&line(
        (0.5, 0.0),
        (0.0, 0.5),
        "stroke=\"#5b8fc9\" stroke-width=\"1\" stroke-dasharray=\"3,3\"",
    ));

    // Axis labels and triangle vertices.
    let (ax, ay) = map(1.0, -0.06);
    let _ = writeln!(svg, "<text x=\"{ax:.1}\" y=\"{ay:.1}\" font-size=\"14\" text-anchor=\"end\">1/p</text>");
    let (bx, by) = map(-0.06, 1.0);
    let _ = writeln!(svg, "<text x=\"{bx:.1}\" y=\"{by:.1}\" font-size=\"14\">1/q</text>");
    for (label, u, v, du, dv) in [
        ("A", 0.5, 0.0, 0.015, -0.03),
        ("B", 0.0, 0.5, -0.045, 0.0),
        ("C", 0.5, 0.5, 0.015, 0.02),
    ] {
        let (x, y) = map(u + du, v + dv);
        let _ = writeln!(svg, "<text x=\"{x:.1}\" y=\"{y:.1}\" font-size=\"13\">{label}</text>");
    }

    // Swept points: green when the ratio is N-stable, red when it grows.
    for point in &report.points {
        let endpoint = point.p.is_infinite() || point.q.is_infinite();
        let stable = !endpoint && point.trend < 0.1;
        let color = if stable { "#1e8f4e" } else { "#c0392b" };
        let (x, y) = map(point.p.reciprocal(), point.q.reciprocal());
        let _ = writeln!(
            svg,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"5\" fill=\"{color}\" stroke=\"black\" \
             stroke-width=\"0.8\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">({}, {}) r={:.3}</text>",
            x + 8.0,
            y - 4.0,
            point.p,
            point.q,
            point.max_ratio
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;
    use crate::sweep::SweepPoint;

    #[test]
    fn svg_is_well_formed_and_marks_points() {
        let report = SweepReport {
            seed: 1,
            trials: 1,
            steps: 0,
            n_list: vec![3],
            points: vec![
                SweepPoint {
                    p: Exponent(4.0),
                    q: Exponent(4.0),
                    max_ratio: 0.5,
                    per_n: vec![0.5],
                    trend: 0.01,
                },
                SweepPoint {
                    p: Exponent::INF,
                    q: Exponent(2.0),
                    max_ratio: 0.9,
                    per_n: vec![0.9],
                    trend: 1.4,
                },
            ],
        };
        let svg = region_map_svg(&report);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("#1e8f4e"));
        assert!(svg.contains("#c0392b"));
    }
}
