use std::f64::consts::PI;
use std::fmt::Write;

use shadowlab::dendrite::{DendriteComplex, DendriteSpace, EdgeId, EdgeLineage, Location, Subtree, VertexId};

const CANVAS: f64 = 600.0;
const MARGIN: f64 = 20.0;

/// Vertex positions: vertex 0 at the origin, each child given an angular
/// sector proportional to its leaf count, edges drawn at their metric length.
pub fn layout(cx: &DendriteComplex) -> Vec<[f64; 2]> {
    let n = cx.n_vertices();
    let mut pos = vec![[0.0; 2]; n];
    if n == 0 {
        return pos;
    }
    let order = dfs_order(cx);
    let mut parent = vec![usize::MAX; n];
    for &(v, p) in &order {
        parent[v] = p;
    }
    let mut leaves = vec![0usize; n];
    for &(v, p) in order.iter().rev() {
        let kids = cx.incident(VertexId(v)).iter().filter(|(_, w)| w.0 != p).count();
        if kids == 0 {
            leaves[v] = 1;
        }
        if p != usize::MAX {
            leaves[p] += leaves[v];
        }
    }
    let mut sector = vec![(0.0, 2.0 * PI); n];
    for &(v, p) in &order {
        let (a0, a1) = sector[v];
        let kids: Vec<(EdgeId, usize)> =
            cx.incident(VertexId(v)).iter().filter(|(_, w)| w.0 != p).map(|&(e, w)| (e, w.0)).collect();
        let total: usize = kids.iter().map(|&(_, w)| leaves[w]).sum();
        let mut start = a0;
        for (e, w) in kids {
            let span = (a1 - a0) * leaves[w] as f64 / total as f64;
            let mid = start + span / 2.0;
            let len = cx.edge(e).length;
            pos[w] = [pos[v][0] + len * mid.cos(), pos[v][1] + len * mid.sin()];
            let half = (span / 2.0).min(PI / 2.0);
            sector[w] = (mid - half, mid + half);
            start += span;
        }
    }
    pos
}

fn dfs_order(cx: &DendriteComplex) -> Vec<(usize, usize)> {
    let mut order = Vec::with_capacity(cx.n_vertices());
    let mut stack = vec![(0usize, usize::MAX)];
    while let Some((v, p)) = stack.pop() {
        order.push((v, p));
        for &(_, w) in cx.incident(VertexId(v)).iter().rev() {
            if w.0 != p {
                stack.push((w.0, v));
            }
        }
    }
    order
}

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in points {
            for i in 0..2 {
                min[i] = min[i].min(p[i]);
                max[i] = max[i].max(p[i]);
            }
        }
        if points.is_empty() {
            min = [0.0; 2];
            max = [1.0; 2];
        }
        let extent = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        Frame { min, scale: (CANVAS - 2.0 * MARGIN) / extent }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + (p[0] - self.min[0]) * self.scale, CANVAS - MARGIN - (p[1] - self.min[1]) * self.scale)
    }
}

fn header(out: &mut String) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    )
    .unwrap();
    writeln!(
        out,
        "<style>line,polyline{{stroke-linecap:round;fill:none}} .base,.edge,.arm{{stroke:#333;stroke-width:1.5}} \
         .highlight{{stroke:#d62728;stroke-width:4;opacity:0.7}} .stable{{stroke:#1f77b4;stroke-width:1}} \
         .unstable{{stroke:#d62728;stroke-width:1}} .mark{{fill:#2ca02c}}</style>"
    )
    .unwrap();
}

fn line(out: &mut String, class: &str, a: (f64, f64), b: (f64, f64)) {
    writeln!(out, r#"<line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, a.0, a.1, b.0, b.1).unwrap();
}

/// A dendrite drawing with optional highlighted subcontinua and marked points.
pub struct DendriteScene<'a> {
    pub space: &'a DendriteSpace,
    pub highlights: Vec<Subtree>,
    pub marks: Vec<Location>,
}

impl<'a> DendriteScene<'a> {
    pub fn new(space: &'a DendriteSpace) -> Self {
        DendriteScene { space, highlights: Vec::new(), marks: Vec::new() }
    }
}

pub fn render_dendrite(scene: &DendriteScene) -> String {
    let cx = &scene.space.complex;
    let pos = layout(cx);
    let frame = Frame::fit(&pos);
    let at = |e: EdgeId, t: f64| {
        let ed = cx.edge(e);
        let (a, b) = (pos[ed.a.0], pos[ed.b.0]);
        frame.map([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
    };
    let mut out = String::new();
    header(&mut out);
    match scene.space.comb() {
        Some(layer) => {
            let mut teeth: Vec<Vec<EdgeId>> = vec![Vec::new(); layer.teeth.len()];
            for (i, l) in layer.lineage.iter().enumerate() {
                match l {
                    EdgeLineage::Base { .. } => line(&mut out, "base", at(EdgeId(i), 0.0), at(EdgeId(i), 1.0)),
                    EdgeLineage::Tooth { tooth, .. } => teeth[*tooth].push(EdgeId(i)),
                }
            }
            for (i, arms) in teeth.iter().enumerate() {
                writeln!(out, r#"<g class="tooth" data-tooth="{i}">"#).unwrap();
                for &e in arms {
                    line(&mut out, "arm", at(e, 0.0), at(e, 1.0));
                }
                writeln!(out, "</g>").unwrap();
            }
        }
        None => {
            for i in 0..cx.n_edges() {
                line(&mut out, "edge", at(EdgeId(i), 0.0), at(EdgeId(i), 1.0));
            }
        }
    }
    for s in &scene.highlights {
        for p in s.pieces() {
            line(&mut out, "highlight", at(p.edge, p.t0), at(p.edge, p.t1));
        }
    }
    for m in &scene.marks {
        let (x, y) = at(m.edge, m.t);
        writeln!(out, r#"<circle class="mark" cx="{x:.2}" cy="{y:.2}" r="4"/>"#).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

/// Wrapped strokes on the unit square, grouped by class.
#[derive(Default)]
pub struct TorusScene {
    pub strokes: Vec<(String, Vec<Vec<[f64; 2]>>)>,
    pub points: Vec<[f64; 2]>,
}

pub fn render_torus(scene: &TorusScene) -> String {
    let frame = Frame::fit(&[[0.0, 0.0], [1.0, 1.0]]);
    let mut out = String::new();
    header(&mut out);
    let (x0, y0) = frame.map([0.0, 1.0]);
    let side = frame.scale;
    writeln!(out, r##"<rect x="{x0:.2}" y="{y0:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="#999"/>"##)
        .unwrap();
    for (class, lines) in &scene.strokes {
        for poly in lines {
            let pts: Vec<String> = poly
                .iter()
                .map(|&p| {
                    let (x, y) = frame.map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            writeln!(out, r#"<polyline class="{class}" points="{}"/>"#, pts.join(" ")).unwrap();
        }
    }
    for &p in &scene.points {
        let (x, y) = frame.map(p);
        writeln!(out, r#"<circle class="mark" cx="{x:.2}" cy="{y:.2}" r="3"/>"#).unwrap();
    }
    out.push_str("</svg>\n");
    out
}
