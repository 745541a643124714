//! Geometric realization of a packing and SVG emission.
//!
//! Positions are computed in units of the bounding-circle radius. The four
//! root circles are solved from their tangency constraints; every further
//! circle is obtained by propagating curvature-times-center vectors, which
//! transform under the generators exactly like the curvatures themselves.

use std::io::Write;

use crate::error::{invalid_argument, Result};
use crate::quadruple::PackingDescriptor;

/// A circle with its center and radius in bounding-radius units.
#[derive(Clone, Copy, Debug)]
pub struct PositionedCircle {
    pub curvature: i64,
    pub center: (f64, f64),
    pub radius: f64,
}

const TANGENCY_TOL: f64 = 1e-9;

fn circle_intersection(
    c0: (f64, f64),
    r0: f64,
    c1: (f64, f64),
    r1: f64,
) -> Option<[(f64, f64); 2]> {
    let dx = c1.0 - c0.0;
    let dy = c1.1 - c0.1;
    let d = (dx * dx + dy * dy).sqrt();
    if d == 0.0 || d > r0 + r1 + 1e-9 * (r0 + r1) {
        return None;
    }
    let a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
    let h2 = r0 * r0 - a * a;
    if h2 < -1e-9 * r0 * r0 {
        return None;
    }
    let h = h2.max(0.0).sqrt();
    let (ux, uy) = (dx / d, dy / d);
    let (px, py) = (c0.0 + a * ux, c0.1 + a * uy);
    Some([(px - h * uy, py + h * ux), (px + h * uy, py - h * ux)])
}

/// Relative tangency error between two circles; internal tangency against
/// the bounding circle, external otherwise.
fn tangency_gap(a: &PositionedCircle, b: &PositionedCircle) -> f64 {
    let dx = a.center.0 - b.center.0;
    let dy = a.center.1 - b.center.1;
    let d = (dx * dx + dy * dy).sqrt();
    let target = if a.curvature < 0 || b.curvature < 0 {
        (a.radius - b.radius).abs()
    } else {
        a.radius + b.radius
    };
    (d - target).abs() / target.max(f64::MIN_POSITIVE)
}

/// Solves the four root circles from their tangency constraints.
///
/// The bounding circle sits at the origin with radius one; the second circle
/// is placed on the positive x-axis, the third in the upper half-plane, and
/// the fourth follows from tangency to all three.
pub fn layout_root(packing: &PackingDescriptor) -> Result<[PositionedCircle; 4]> {
    let root = packing.root().entries();
    let b = (-root[0]) as f64;
    let radius = |v: i64| b / v as f64;
    let degenerate = || invalid_argument(format!("numerically degenerate root layout ({})", packing.root()));

    let c1 = PositionedCircle {
        curvature: root[0],
        center: (0.0, 0.0),
        radius: 1.0,
    };
    let r2 = radius(root[1]);
    let c2 = PositionedCircle {
        curvature: root[1],
        center: (1.0 - r2, 0.0),
        radius: r2,
    };

    let r3 = radius(root[2]);
    let candidates =
        circle_intersection(c1.center, 1.0 - r3, c2.center, c2.radius + r3).ok_or_else(degenerate)?;
    let center3 = if candidates[0].1 >= candidates[1].1 {
        candidates[0]
    } else {
        candidates[1]
    };
    let c3 = PositionedCircle {
        curvature: root[2],
        center: center3,
        radius: r3,
    };

    let r4 = radius(root[3]);
    let candidates =
        circle_intersection(c2.center, c2.radius + r4, c3.center, c3.radius + r4)
            .ok_or_else(degenerate)?;
    let matches_bounding = |p: (f64, f64)| {
        let d = (p.0 * p.0 + p.1 * p.1).sqrt();
        (d - (1.0 - r4)).abs() <= 1e-6
    };
    let center4 = match (
        matches_bounding(candidates[0]),
        matches_bounding(candidates[1]),
    ) {
        (true, true) => {
            if candidates[0].1 >= candidates[1].1 {
                candidates[0]
            } else {
                candidates[1]
            }
        }
        (true, false) => candidates[0],
        (false, true) => candidates[1],
        (false, false) => return Err(degenerate()),
    };
    let c4 = PositionedCircle {
        curvature: root[3],
        center: center4,
        radius: r4,
    };

    let circles = [c1, c2, c3, c4];
    for i in 0..4 {
        for j in i + 1..4 {
            if tangency_gap(&circles[i], &circles[j]) > TANGENCY_TOL {
                return Err(degenerate());
            }
        }
    }
    Ok(circles)
}

/// All circles of curvature below `max_curvature`, in traversal order after
/// the four root circles.
pub fn layout_packing(
    packing: &PackingDescriptor,
    max_curvature: u64,
) -> Result<Vec<PositionedCircle>> {
    if max_curvature < packing.max_root_entry() as u64 {
        return Err(invalid_argument(format!(
            "max curvature {max_curvature} is below the largest root entry {}",
            packing.max_root_entry()
        )));
    }
    if max_curvature > crate::enumerate::MAX_BOUND {
        return Err(invalid_argument(format!(
            "max curvature {max_curvature} exceeds the 2^31 cap"
        )));
    }
    let roots = layout_root(packing)?;
    let b = (-packing.bounding_curvature()) as f64;
    let bound = max_curvature as i64;

    let mut out: Vec<PositionedCircle> = Vec::new();
    for c in roots {
        if c.curvature < 0 || c.curvature < bound {
            out.push(c);
        }
    }

    // curvature * center is invariant under rescaling, so integer curvatures
    // pair with normalized centers
    let root_q = packing.root().entries();
    let root_m: [(f64, f64); 4] = std::array::from_fn(|i| {
        let v = root_q[i] as f64;
        (v * roots[i].center.0, v * roots[i].center.1)
    });

    let mut stack: Vec<([i64; 4], [(f64, f64); 4], u8)> = Vec::new();
    let total: i64 = root_q.iter().sum();
    let m_total = root_m
        .iter()
        .fold((0.0, 0.0), |acc, m| (acc.0 + m.0, acc.1 + m.1));
    for i in 0..4 {
        let nc = 2 * total - 3 * root_q[i];
        if nc < bound {
            let mut child = root_q;
            child[i] = nc;
            let mut child_m = root_m;
            child_m[i] = (
                2.0 * m_total.0 - 3.0 * root_m[i].0,
                2.0 * m_total.1 - 3.0 * root_m[i].1,
            );
            out.push(PositionedCircle {
                curvature: nc,
                center: (child_m[i].0 / nc as f64, child_m[i].1 / nc as f64),
                radius: b / nc as f64,
            });
            stack.push((child, child_m, i as u8));
        }
    }
    while let Some((q, m, g)) = stack.pop() {
        let total: i64 = q.iter().sum();
        let m_total = m
            .iter()
            .fold((0.0, 0.0), |acc, v| (acc.0 + v.0, acc.1 + v.1));
        for i in 0..4 {
            if i == g as usize {
                continue;
            }
            let nc = 2 * total - 3 * q[i];
            if nc < bound {
                let mut child = q;
                child[i] = nc;
                let mut child_m = m;
                child_m[i] = (2.0 * m_total.0 - 3.0 * m[i].0, 2.0 * m_total.1 - 3.0 * m[i].1);
                out.push(PositionedCircle {
                    curvature: nc,
                    center: (child_m[i].0 / nc as f64, child_m[i].1 / nc as f64),
                    radius: b / nc as f64,
                });
                stack.push((child, child_m, i as u8));
            }
        }
    }
    Ok(out)
}

/// Stroke, fill and labeling options for SVG output.
#[derive(Clone, Debug)]
pub struct SvgStyle {
    pub stroke: String,
    pub stroke_width: f64,
    pub fill: String,
    pub labels: bool,
    /// Smallest pixel radius that still gets a curvature label.
    pub min_label_radius_px: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            stroke: "#202020".into(),
            stroke_width: 1.0,
            fill: "none".into(),
            labels: false,
            min_label_radius_px: 8.0,
        }
    }
}

/// Writes one SVG circle element per packing circle with curvature below
/// `max_curvature`, in traversal order. Returns the number of circles.
pub fn render_svg<W: Write>(
    packing: &PackingDescriptor,
    max_curvature: u64,
    canvas_px: u32,
    style: &SvgStyle,
    mut w: W,
) -> Result<u64> {
    if canvas_px == 0 {
        return Err(invalid_argument("canvas size must be positive".to_string()));
    }
    let circles = layout_packing(packing, max_curvature)?;
    let canvas = canvas_px as f64;
    let scale = canvas / 2.1;
    let to_px = |p: (f64, f64)| (canvas / 2.0 + p.0 * scale, canvas / 2.0 - p.1 * scale);

    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{canvas_px}" height="{canvas_px}" viewBox="0 0 {canvas_px} {canvas_px}">"#
    )?;
    for c in &circles {
        let (cx, cy) = to_px(c.center);
        let r = c.radius * scale;
        writeln!(
            w,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="{}" stroke="{}" stroke-width="{}"/>"#,
            style.fill, style.stroke, style.stroke_width
        )?;
    }
    if style.labels {
        for c in &circles {
            let (cx, cy) = to_px(c.center);
            let r = c.radius * scale;
            if c.curvature > 0 && r >= style.min_label_radius_px {
                let digits = c.curvature.to_string().len() as f64;
                let size = (1.4 * r / digits).min(r);
                writeln!(
                    w,
                    r#"<text x="{cx:.3}" y="{cy:.3}" font-size="{size:.3}" text-anchor="middle" dominant-baseline="central">{}</text>"#,
                    c.curvature
                )?;
            }
        }
    }
    writeln!(w, "</svg>")?;
    Ok(circles.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{count_circles, TraversalOptions};
    use crate::quadruple::Quadruple;

    fn bugeye() -> PackingDescriptor {
        PackingDescriptor::bugeye()
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9
    }

    #[test]
    fn bugeye_root_positions() {
        let circles = layout_root(&bugeye()).unwrap();
        assert!(close(circles[0].center, (0.0, 0.0)));
        assert!(close(circles[1].center, (0.5, 0.0)));
        assert!(close(circles[2].center, (-0.5, 0.0)));
        assert!(close(circles[3].center, (0.0, 2.0 / 3.0)));
        assert!((circles[3].radius - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn root_tangencies_hold_for_various_packings() {
        for root in [
            Quadruple::new(-1, 2, 2, 3),
            Quadruple::new(-11, 21, 24, 28),
            Quadruple::new(-3, 5, 8, 8),
            Quadruple::new(-6, 11, 14, 15),
        ] {
            let packing = PackingDescriptor::new(root, None).unwrap();
            let circles = layout_root(&packing).unwrap();
            for i in 0..4 {
                for j in i + 1..4 {
                    assert!(
                        tangency_gap(&circles[i], &circles[j]) <= TANGENCY_TOL,
                        "root {root}: circles {i} and {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn mirrored_circle_appears_below_the_axis() {
        let circles = layout_packing(&bugeye(), 10).unwrap();
        assert_eq!(circles.len(), 9);
        assert!(circles
            .iter()
            .any(|c| c.curvature == 3 && close(c.center, (0.0, -2.0 / 3.0))));
    }

    #[test]
    fn every_circle_touches_at_least_three_others() {
        let circles = layout_packing(&bugeye(), 40).unwrap();
        for (i, c) in circles.iter().enumerate() {
            let tangents = circles
                .iter()
                .enumerate()
                .filter(|&(j, o)| j != i && tangency_gap(c, o) <= 1e-7)
                .count();
            assert!(tangents >= 3, "circle {i} (curvature {})", c.curvature);
        }
    }

    #[test]
    fn propagated_positions_match_fresh_geometric_solves() {
        // walk five generations; re-derive each child center by intersecting
        // distance constraints from two parents, excluding the replaced
        // circle's position, and compare with the propagated value
        struct Node {
            q: [i64; 4],
            centers: [(f64, f64); 4],
            gen: usize,
            depth: u32,
        }
        for packing in [bugeye(), PackingDescriptor::coins()] {
            let roots = layout_root(&packing).unwrap();
            let b = (-packing.bounding_curvature()) as f64;
            let root_q = packing.root().entries();
            let centers: [(f64, f64); 4] = std::array::from_fn(|i| roots[i].center);
            let mut stack: Vec<Node> = vec![];
            let total: i64 = root_q.iter().sum();
            for i in 0..4 {
                let nc = 2 * total - 3 * root_q[i];
                let mut q = root_q;
                q[i] = nc;
                stack.push(Node {
                    q,
                    centers,
                    gen: i,
                    depth: 1,
                });
            }
            while let Some(node) = stack.pop() {
                // recompute center of the generated circle at node.gen
                let nc = node.q[node.gen];
                let r_new = b / nc as f64;
                let parents: Vec<usize> = (0..4).filter(|&j| j != node.gen).collect();
                let parent_circle = |j: usize| {
                    let v = node.q[j];
                    (node.centers[j], if v < 0 { 1.0 } else { b / v as f64 }, v)
                };
                let (p0, r0, v0) = parent_circle(parents[0]);
                let (p1, r1, v1) = parent_circle(parents[1]);
                let (p2, r2, v2) = parent_circle(parents[2]);
                let dist = |a: (f64, f64), b: (f64, f64)| {
                    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
                };
                let target = |r: f64, v: i64| if v < 0 { r - r_new } else { r + r_new };
                let cands = circle_intersection(p0, target(r0, v0), p1, target(r1, v1)).unwrap();
                let ok = |p: (f64, f64)| (dist(p, p2) - target(r2, v2)).abs() < 1e-6;
                let replaced = node.centers[node.gen];
                let solved = cands
                    .iter()
                    .copied()
                    .filter(|&p| ok(p) && dist(p, replaced) > 1e-9)
                    .chain(cands.iter().copied().filter(|&p| ok(p)))
                    .next()
                    .unwrap();

                // propagated value
                let m_parent: (f64, f64) = parents
                    .iter()
                    .map(|&j| {
                        let v = node.q[j] as f64;
                        (v * node.centers[j].0, v * node.centers[j].1)
                    })
                    .fold((0.0, 0.0), |a, m| (a.0 + m.0, a.1 + m.1));
                let v_old = 2 * (node.q[parents[0]] + node.q[parents[1]] + node.q[parents[2]]) - nc;
                let m_old = (replaced.0 * v_old as f64, replaced.1 * v_old as f64);
                let m_new = (2.0 * m_parent.0 - m_old.0, 2.0 * m_parent.1 - m_old.1);
                let propagated = (m_new.0 / nc as f64, m_new.1 / nc as f64);

                assert!(
                    dist(solved, propagated) <= 1e-9 * (1.0 + propagated.0.abs() + propagated.1.abs()),
                    "depth {} root {}: solved {solved:?} vs propagated {propagated:?}",
                    node.depth,
                    packing.root()
                );

                if node.depth < 5 {
                    let mut centers = node.centers;
                    centers[node.gen] = propagated;
                    let total: i64 = node.q.iter().sum();
                    for i in 0..4 {
                        if i == node.gen {
                            continue;
                        }
                        let nc = 2 * total - 3 * node.q[i];
                        let mut q = node.q;
                        q[i] = nc;
                        stack.push(Node {
                            q,
                            centers,
                            gen: i,
                            depth: node.depth + 1,
                        });
                    }
                }
            }
        }
    }

    #[test]
    fn svg_element_count_matches_circle_count() {
        let opts = TraversalOptions::default();
        for max in [10u64, 40, 100] {
            let mut buf = Vec::new();
            let n = render_svg(&bugeye(), max, 512, &SvgStyle::default(), &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let elements = text.matches("<circle ").count() as u64;
            assert_eq!(elements, n);
            assert_eq!(n, count_circles(&bugeye(), max, &opts).unwrap());
            assert!(text.starts_with("<?xml"));
            assert!(text.trim_end().ends_with("</svg>"));
        }
    }

    #[test]
    fn svg_output_is_deterministic() {
        let style = SvgStyle {
            labels: true,
            ..SvgStyle::default()
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        render_svg(&PackingDescriptor::coins(), 65, 1024, &style, &mut a).unwrap();
        render_svg(&PackingDescriptor::coins(), 65, 1024, &style, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        for label in ["21", "24", "28", "40", "52", "61"] {
            assert!(
                text.contains(&format!(">{label}</text>")),
                "missing label {label}"
            );
        }
    }

    #[test]
    fn max_below_root_entries_is_rejected() {
        assert!(layout_packing(&PackingDescriptor::coins(), 27).is_err());
    }
}
