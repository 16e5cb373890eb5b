//! CSV tables, SVG plots and DOT graphs.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::berkdisc::{Skeleton, Subdivision};
use crate::radii::RadiiProfile;
use crate::valcore::{fmt_q, Val, Q};

/// Header `r,f_1,…,f_n`, then one row per breakpoint of any `f_i`, endpoints included.
pub fn profile_csv(p: &RadiiProfile) -> String {
    let mut out = String::from("r");
    for i in 1..=p.functions.len() {
        write!(out, ",f_{i}").unwrap();
    }
    out.push('\n');
    let mut cuts: Vec<&Q> = p.functions.iter().flat_map(|f| f.breakpoints.iter()).collect();
    cuts.sort();
    cuts.dedup();
    for r in cuts {
        out.push_str(&fmt_q(r));
        for f in &p.functions {
            out.push(',');
            if let Some(v) = f.eval(r) {
                out.push_str(&fmt_q(&v));
            }
        }
        out.push('\n');
    }
    out
}

fn f64_of(x: &Q) -> f64 {
    x.to_f64().unwrap_or(0.0)
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 40.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One polyline per `f_i`; uncertified pieces are drawn dashed.
pub fn profile_svg(p: &RadiiProfile) -> String {
    let xs: Vec<f64> = p.functions.iter().flat_map(|f| f.breakpoints.iter().map(f64_of)).collect();
    let ys: Vec<f64> = p
        .functions
        .iter()
        .flat_map(|f| f.breakpoints.iter().filter_map(|b| f.eval(b)).map(|v| f64_of(&v)))
        .collect();
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#).unwrap();
    writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#999"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    for (i, f) in p.functions.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        writeln!(out, r#"<g id="f_{}" stroke="{color}" stroke-width="2" fill="none">"#, i + 1).unwrap();
        for (j, piece) in f.pieces.iter().enumerate() {
            let (a, b) = (&f.breakpoints[j], &f.breakpoints[j + 1]);
            let dash = if piece.certified { "" } else { r#" stroke-dasharray="6 4""# };
            writeln!(
                out,
                r#"<polyline points="{:.2},{:.2} {:.2},{:.2}"{dash}/>"#,
                sx(f64_of(a)),
                sy(f64_of(&piece.eval(a))),
                sx(f64_of(b)),
                sy(f64_of(&piece.eval(b)))
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
    writeln!(out, r#"<text x="{MARGIN}" y="{}" font-size="12">r ∈ [{x0}, {x1}]</text>"#, HEIGHT - 10.0).unwrap();
    out.push_str("</svg>\n");
    out
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn val_str(v: &Val) -> String {
    match v {
        Val::Fin(x) => fmt_q(x),
        Val::Inf => "inf".into(),
    }
}

/// Skeleton as a DOT digraph; subdivision vertices become boxes on their edges.
pub fn skeleton_dot(s: &Skeleton, sub: Option<&Subdivision>) -> String {
    let mut out = String::from("digraph skeleton {\n  node [shape=ellipse];\n");
    for (i, v) in s.vertices.iter().enumerate() {
        writeln!(out, "  v{i} [label=\"{}\"];", v.to_string().replace('"', "'")).unwrap();
    }
    for (k, e) in s.edges.iter().enumerate() {
        let kinks: Vec<_> = sub.map_or(Vec::new(), |d| d.vertices.iter().filter(|v| v.edge == k).collect());
        let mut prev = format!("v{}", e.parent);
        for (j, v) in kinks.iter().enumerate() {
            let name = format!("k{k}_{j}");
            writeln!(out, "  {name} [shape=box,label=\"r = {}\"];", fmt_q(&v.r)).unwrap();
            writeln!(out, "  {prev} -> {name};").unwrap();
            prev = name;
        }
        writeln!(out, "  {prev} -> v{} [label=\"[{}, {}]\"];", e.child, fmt_q(&e.r_start), val_str(&e.r_end)).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radii::PAFunction;
    use crate::valcore::rational::q;

    fn profile(points: &[(i64, i64)], certified: &[bool]) -> RadiiProfile {
        let pts: Vec<(Q, Q)> = points.iter().map(|(a, b)| (q(*a), q(*b))).collect();
        RadiiProfile { functions: vec![PAFunction::from_points(&pts, certified).unwrap()], flags: vec![], refinement_rounds: 0, samples: 0 }
    }

    #[test]
    fn csv_rows() {
        let flat = profile(&[(0, 3), (1, 3), (2, 3)], &[true, true]);
        assert_eq!(profile_csv(&flat), "r,f_1\n0,3\n2,3\n");
        let kink = profile(&[(0, 4), (1, 3), (2, 3)], &[true, true]);
        assert_eq!(profile_csv(&kink).lines().count(), 4);
    }

    #[test]
    fn dashed_spans() {
        let p = profile(&[(0, 4), (1, 3), (2, 3)], &[true, false]);
        let svg = profile_svg(&p);
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 2);
    }
}
