//! SVG snapshots of two-dimensional runs: obstacles, samples, the search
//! tree and the current best path.

use std::io::Write;
use std::path::Path;

use crate::cspace::{Configuration, Obstacle, Scenario};
use crate::search::{PathResult, SearchTree};

const CANVAS: f64 = 1000.0;

struct Mapper {
    lo: [f64; 2],
    scale: [f64; 2],
}

impl Mapper {
    fn new(scenario: &Scenario) -> Self {
        let lo = [scenario.bounds.lo.coords[0], scenario.bounds.lo.coords[1]];
        let hi = [scenario.bounds.hi.coords[0], scenario.bounds.hi.coords[1]];
        Mapper {
            lo,
            scale: [CANVAS / (hi[0] - lo[0]), CANVAS / (hi[1] - lo[1])],
        }
    }

    fn x(&self, v: f64) -> f64 {
        (v - self.lo[0]) * self.scale[0]
    }

    // svg y grows downward
    fn y(&self, v: f64) -> f64 {
        CANVAS - (v - self.lo[1]) * self.scale[1]
    }
}

/// Render one iteration of a 2-D run. Tree edges are exactly the verified
/// parent links of `tree`; the best path, when present, is drawn on top.
pub fn render_svg(
    scenario: &Scenario,
    points: &[Configuration],
    tree: &SearchTree,
    path: &PathResult,
) -> String {
    assert_eq!(scenario.dimension, 2, "snapshots are only defined for 2-D scenarios");
    let m = Mapper::new(scenario);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {c} {c}\" width=\"500\" height=\"500\">\n",
        c = CANVAS
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{c}\" height=\"{c}\" fill=\"white\" stroke=\"black\"/>\n",
        c = CANVAS
    ));

    for obs in &scenario.obstacles {
        match obs {
            Obstacle::Box { lo, hi } => {
                let x = m.x(lo.coords[0]);
                let y = m.y(hi.coords[1]);
                let w = (hi.coords[0] - lo.coords[0]) * m.scale[0];
                let h = (hi.coords[1] - lo.coords[1]) * m.scale[1];
                svg.push_str(&format!(
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"#d04040\"/>\n"
                ));
            }
            Obstacle::Ball { center, radius } => {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#d04040\"/>\n",
                    m.x(center.coords[0]),
                    m.y(center.coords[1]),
                    radius * m.scale[0]
                ));
            }
        }
    }

    // goal region
    svg.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"#40c0c0\" fill-opacity=\"0.5\"/>\n",
        m.x(scenario.goal.center.coords[0]),
        m.y(scenario.goal.center.coords[1]),
        (scenario.goal.radius * m.scale[0]).max(4.0)
    ));

    for (parent, child) in tree.edges() {
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#3060c0\" stroke-width=\"1\"/>\n",
            m.x(points[parent].coords[0]),
            m.y(points[parent].coords[1]),
            m.x(points[child].coords[0]),
            m.y(points[child].coords[1]),
        ));
    }

    for p in points {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"#404040\"/>\n",
            m.x(p.coords[0]),
            m.y(p.coords[1])
        ));
    }

    if let PathResult::Path { nodes, .. } = path {
        let pts: Vec<String> = nodes
            .iter()
            .map(|&i| format!("{:.2},{:.2}", m.x(points[i].coords[0]), m.y(points[i].coords[1])))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#20a020\" stroke-width=\"4\"/>\n",
            pts.join(" ")
        ));
    }

    // start marker
    svg.push_str(&format!(
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"6\" fill=\"#8020c0\"/>\n",
        m.x(scenario.x_init.coords[0]),
        m.y(scenario.x_init.coords[1])
    ));
    svg.push_str("</svg>\n");
    svg
}

pub fn write_snapshot(
    file: &Path,
    scenario: &Scenario,
    points: &[Configuration],
    tree: &SearchTree,
    path: &PathResult,
) -> std::io::Result<()> {
    let svg = render_svg(scenario, points, tree, path);
    let mut out = std::fs::File::create(file)?;
    out.write_all(svg.as_bytes())
}
