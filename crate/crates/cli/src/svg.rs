//! SVG sketch of a non-termination set. Coordinates are the only place the
//! tool uses floating point; they are presentation only.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use loopnt::{LoopAnalysis, LoopSpec, NtSet, QuadNum, Vec2};

const SIZE: f64 = 400.0;
const R: f64 = 180.0;

fn angle(v: &Vec2<QuadNum>) -> f64 {
    v.x2.approx_f64().atan2(v.x1.approx_f64())
}

fn approx(r: &loopnt::Rational) -> f64 {
    QuadNum::from_rational(r.clone()).approx_f64()
}

fn point(theta: f64, r: f64) -> (f64, f64) {
    (SIZE / 2.0 + r * theta.cos(), SIZE / 2.0 - r * theta.sin())
}

fn ray(out: &mut String, v: &Vec2<QuadNum>, closed: bool) {
    let (x, y) = point(angle(v), R);
    let (class, dash) = if closed {
        ("ray closed", "")
    } else {
        ("ray open", " stroke-dasharray=\"8 5\"")
    };
    let _ = writeln!(
        out,
        "  <line class=\"{class}\" x1=\"{c}\" y1=\"{c}\" x2=\"{x:.3}\" y2=\"{y:.3}\" stroke=\"#1f4e9c\" stroke-width=\"2.5\"{dash}/>",
        c = SIZE / 2.0
    );
}

pub fn render(spec: &LoopSpec, analysis: &LoopAnalysis) -> String {
    let c = SIZE / 2.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        out,
        "  <rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "  <line class=\"axis\" x1=\"0\" y1=\"{c}\" x2=\"{SIZE}\" y2=\"{c}\" stroke=\"#999\"/>\n  <line class=\"axis\" x1=\"{c}\" y1=\"0\" x2=\"{c}\" y2=\"{SIZE}\" stroke=\"#999\"/>"
    );
    for row in spec.guard().row_iter() {
        let b1 = approx(&row[0]);
        let b2 = approx(&row[1]);
        let theta = (-b1).atan2(b2);
        let (x1, y1) = point(theta, SIZE);
        let (x2, y2) = point(theta + PI, SIZE);
        let _ = writeln!(
            out,
            "  <line class=\"guard\" x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke=\"#c0392b\" stroke-width=\"1\"/>"
        );
    }
    match &analysis.nt {
        NtSet::Empty => {
            let _ = writeln!(
                out,
                "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"20\">NT = \u{2205}</text>",
                c + 12.0,
                c - 12.0
            );
        }
        NtSet::Ray { dir } => ray(&mut out, dir, true),
        NtSet::Sector {
            right,
            left,
            right_closed,
            left_closed,
        } => {
            let start = angle(right);
            let mut sweep = angle(left) - start;
            if sweep <= 0.0 {
                sweep += TAU;
            }
            let mut poly = format!("{c},{c}");
            let n = 48;
            for i in 0..=n {
                let (x, y) = point(start + sweep * i as f64 / n as f64, R);
                let _ = write!(poly, " {x:.3},{y:.3}");
            }
            let _ = writeln!(
                out,
                "  <polygon class=\"region\" points=\"{poly}\" fill=\"#1f4e9c\" fill-opacity=\"0.18\" stroke=\"none\"/>"
            );
            ray(&mut out, right, *right_closed);
            ray(&mut out, left, *left_closed);
        }
    }
    out.push_str("</svg>\n");
    out
}
