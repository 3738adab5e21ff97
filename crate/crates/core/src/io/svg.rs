use std::fmt::Write as _;
use std::path::Path;

use super::write_text;
use crate::error::{Error, Result};
use crate::model::ModelInstance;
use crate::network::{RoadNetwork, SegmentPolynomial};

const SAMPLES_PER_SEGMENT: usize = 24;
const PANEL_W: f64 = 800.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 40.0;
const CUT_COLOR: &str = "#d95f02";
const FILL_COLOR: &str = "#1b9e77";

/// Plot data of one road: ground at the sections, the road spline at the
/// sections and densely sampled along every segment.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadPlot {
    pub id: String,
    pub ground: Vec<(f64, f64)>,
    pub road_at_sections: Vec<(f64, f64)>,
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePlot {
    pub roads: Vec<RoadPlot>,
}

fn evaluate(polys: &[SegmentPolynomial], station: f64) -> f64 {
    let g = polys
        .iter()
        .rposition(|p| p.start_station <= station)
        .unwrap_or(0);
    polys[g].elevation(station)
}

fn ground_at(ground: &[(f64, f64)], s: f64) -> f64 {
    let k = ground.partition_point(|p| p.0 < s);
    if k == 0 {
        return ground[0].1;
    }
    if k == ground.len() {
        return ground[k - 1].1;
    }
    let (s0, e0) = ground[k - 1];
    let (s1, e1) = ground[k];
    e0 + (e1 - e0) * (s - s0) / (s1 - s0)
}

pub fn profile_plot(net: &RoadNetwork, instance: &ModelInstance, x: &[f64]) -> Result<ProfilePlot> {
    let vars = instance
        .vars
        .as_ref()
        .ok_or_else(|| Error::Emission("instance carries no variable map".into()))?;
    if x.len() != instance.var_count() {
        return Err(Error::Dimension {
            expected: instance.var_count(),
            got: x.len(),
        });
    }
    let roads = net
        .roads
        .iter()
        .enumerate()
        .map(|(i, road)| {
            let polys = net.road_polynomials(i, &vars.road_coefficients(i, x));
            let ground = road
                .sections
                .iter()
                .map(|s| (s.station, s.ground_elevation))
                .collect();
            let road_at_sections = road
                .sections
                .iter()
                .map(|s| (s.station, evaluate(&polys, s.station)))
                .collect();
            let mut curve = Vec::new();
            for (seg, p) in road.segments.iter().zip(&polys) {
                for k in 0..=SAMPLES_PER_SEGMENT {
                    let s = seg.start_station + seg.length * k as f64 / SAMPLES_PER_SEGMENT as f64;
                    if curve.last().is_none_or(|&(last, _)| s > last) {
                        curve.push((s, p.elevation(s)));
                    }
                }
            }
            RoadPlot {
                id: road.id.clone(),
                ground,
                road_at_sections,
                curve,
            }
        })
        .collect();
    Ok(ProfilePlot { roads })
}

fn points(pts: impl Iterator<Item = (f64, f64)>) -> String {
    pts.map(|(a, b)| format!("{a:.2},{b:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn panel(svg: &mut String, road: &RoadPlot, top: f64) {
    let stations = road.curve.iter().chain(&road.ground).map(|p| p.0);
    let elevs = road.curve.iter().chain(&road.ground).map(|p| p.1);
    let (s0, s1) = stations.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)));
    let (e0, e1) = elevs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    let pad = ((e1 - e0) * 0.1).max(0.5);
    let (e0, e1) = (e0 - pad, e1 + pad);
    let span = (s1 - s0).max(1e-9);
    let px = |s: f64| MARGIN + (s - s0) / span * (PANEL_W - 2.0 * MARGIN);
    let py = |e: f64| top + PANEL_H - MARGIN - (e - e0) / (e1 - e0) * (PANEL_H - 2.0 * MARGIN);

    let _ = writeln!(
        svg,
        r#"  <g id="road-{}"><text x="{MARGIN}" y="{:.2}" font-size="13">road {} ({:.1} m to {:.1} m, {:.2} m to {:.2} m)</text>"#,
        road.id,
        top + 20.0,
        road.id,
        s0,
        s1,
        e0,
        e1
    );

    // shaded runs where the road stays on one side of the ground
    let diff: Vec<(f64, f64, f64)> = road
        .curve
        .iter()
        .map(|&(s, e)| (s, e, ground_at(&road.ground, s)))
        .collect();
    let tol = 1e-9 * (1.0 + e1.abs().max(e0.abs()));
    let side = |k: usize| {
        let d = diff[k].1 + diff[k + 1].1 - diff[k].2 - diff[k + 1].2;
        if d.abs() <= tol {
            0.0
        } else {
            d.signum()
        }
    };
    let mut start = 0;
    while start + 1 < diff.len() {
        let run = side(start);
        let mut end = start + 1;
        while end + 1 < diff.len() && side(end) == run {
            end += 1;
        }
        if run != 0.0 {
            let (class, color) = if run < 0.0 {
                ("cut", CUT_COLOR)
            } else {
                ("fill", FILL_COLOR)
            };
            let forward = diff[start..=end].iter().map(|&(s, e, _)| (px(s), py(e)));
            let back = diff[start..=end].iter().rev().map(|&(s, _, g)| (px(s), py(g)));
            let _ = writeln!(
                svg,
                r#"    <polygon class="{class}" fill="{color}" fill-opacity="0.35" stroke="none" points="{}"/>"#,
                points(forward.chain(back))
            );
        }
        start = end;
    }
    let _ = writeln!(
        svg,
        r##"    <polyline class="ground" fill="none" stroke="#6b4f2a" stroke-width="1.5" points="{}"/>"##,
        points(road.ground.iter().map(|&(s, e)| (px(s), py(e))))
    );
    let _ = writeln!(
        svg,
        r##"    <polyline class="road" fill="none" stroke="#222222" stroke-width="2" points="{}"/>"##,
        points(road.curve.iter().map(|&(s, e)| (px(s), py(e))))
    );
    let _ = writeln!(svg, "  </g>");
}

/// SVG 1.1 document with one panel per road.
pub fn profile_svg(net: &RoadNetwork, instance: &ModelInstance, x: &[f64]) -> Result<String> {
    let plot = profile_plot(net, instance, x)?;
    let height = PANEL_H * plot.roads.len().max(1) as f64;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PANEL_W}" height="{height}" viewBox="0 0 {PANEL_W} {height}">"#
    );
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    for (k, road) in plot.roads.iter().enumerate() {
        panel(&mut svg, road, PANEL_H * k as f64);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_profile_svg(
    net: &RoadNetwork,
    instance: &ModelInstance,
    x: &[f64],
    path: impl AsRef<Path>,
) -> Result<()> {
    write_text(path.as_ref(), &profile_svg(net, instance, x)?)
}
