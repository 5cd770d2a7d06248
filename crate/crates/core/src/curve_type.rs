//! Topological type of a weighted multicurve, keyed by the normalized
//! weighted dual graph of the cut surface.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::foliation::{check_cores, horizontal_cylinders, in_frame, CurveSystem, Direction};
use crate::tiling::{glued_corners, h_side_corners, v_side_corners, MarkedTiling};

/// Which side of a cut curve a boundary circle lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSide {
    Below,
    Above,
}

/// One connected piece of the surface cut along a curve system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutComponent {
    pub genus: u32,
    pub n_marked: u32,
    pub euler: i32,
    /// `(curve index, side)` for each boundary circle, sorted.
    pub boundaries: Vec<(usize, CurveSide)>,
}

/// Cuts the 2×2 refinement along the cores of `cs` and reports each piece.
pub fn cut_along(mt: &MarkedTiling, cs: &CurveSystem) -> Result<Vec<CutComponent>> {
    let refined = in_frame(mt, cs.direction).subdivide2();
    check_cores(&refined, cs)?;
    let table = refined.table();
    let n = table.n_squares() as usize;
    let v = table.v_partners();
    let h = table.h_partners();

    let mut cut: Vec<Option<(usize, CurveSide)>> = vec![None; 2 * n];
    for (k, comp) in cs.components.iter().enumerate() {
        for &(s, f) in &comp.core {
            let top = 2 * s + f as u32;
            cut[top as usize] = Some((k, CurveSide::Below));
            cut[v[top as usize] as usize] = Some((k, CurveSide::Above));
        }
    }

    let mut squares = UnionFind::new(n);
    let mut corners = UnionFind::new(4 * n);
    for s in 0..2 * n as u32 {
        let t = h[s as usize];
        if s < t {
            squares.union(s / 2, t / 2);
            for (a, b) in glued_corners(s, t, h_side_corners) {
                corners.union(a, b);
            }
        }
        let t = v[s as usize];
        if s < t && cut[s as usize].is_none() {
            squares.union(s / 2, t / 2);
            for (a, b) in glued_corners(s, t, v_side_corners) {
                corners.union(a, b);
            }
        }
    }
    let (comp_of, n_comp) = squares.labels();

    let mut faces = vec![0i64; n_comp];
    let mut open_sides = vec![0i64; n_comp];
    for s in 0..n {
        faces[comp_of[s] as usize] += 1;
    }
    for (slot, c) in cut.iter().enumerate() {
        if c.is_some() {
            open_sides[comp_of[slot / 2] as usize] += 1;
        }
    }
    let mut vertex_seen = vec![false; 4 * n];
    let mut vertices = vec![0i64; n_comp];
    for c in 0..4 * n as u32 {
        let r = corners.find(c) as usize;
        if !std::mem::replace(&mut vertex_seen[r], true) {
            vertices[comp_of[(c / 4) as usize] as usize] += 1;
        }
    }

    // boundary circles: cut sides chained through shared cut-surface vertices
    let cut_slots: Vec<u32> = (0..2 * n as u32).filter(|&s| cut[s as usize].is_some()).collect();
    let mut circles = UnionFind::new(cut_slots.len());
    let mut owner = vec![u32::MAX; 4 * n];
    for (i, &s) in cut_slots.iter().enumerate() {
        let (a, b) = v_side_corners(s);
        for c in [a, b] {
            let r = corners.find(c) as usize;
            if owner[r] == u32::MAX {
                owner[r] = i as u32;
            } else {
                circles.union(owner[r], i as u32);
            }
        }
    }
    let (circle_of, n_circles) = circles.labels();
    let mut circle_tag: Vec<Option<(usize, CurveSide)>> = vec![None; n_circles];
    let mut circle_comp = vec![0usize; n_circles];
    for (i, &s) in cut_slots.iter().enumerate() {
        let ci = circle_of[i] as usize;
        let tag = cut[s as usize];
        match circle_tag[ci] {
            None => {
                circle_tag[ci] = tag;
                circle_comp[ci] = comp_of[(s / 2) as usize] as usize;
            }
            Some(prev) if Some(prev) != tag => {
                return Err(Error::InvalidCurveSystem(
                    "a boundary circle mixes sides of different curves".into(),
                ))
            }
            _ => {}
        }
    }

    let mut marked = vec![0u32; n_comp];
    for &m in refined.marked() {
        let c = refined.cone().class_id(m);
        marked[comp_of[(c / 4) as usize] as usize] += 1;
    }

    let mut out = Vec::with_capacity(n_comp);
    for k in 0..n_comp {
        let mut boundaries: Vec<(usize, CurveSide)> = (0..n_circles)
            .filter(|&ci| circle_comp[ci] == k)
            .map(|ci| circle_tag[ci].unwrap())
            .collect();
        boundaries.sort_unstable();
        let edges = (4 * faces[k] - open_sides[k]) / 2 + open_sides[k];
        let euler = vertices[k] - edges + faces[k];
        let twice_genus = 2 - euler - boundaries.len() as i64;
        if twice_genus < 0 || twice_genus % 2 != 0 {
            return Err(Error::InvalidCurveSystem(format!(
                "cut piece has χ = {euler} with {} boundary circles",
                boundaries.len()
            )));
        }
        out.push(CutComponent {
            genus: (twice_genus / 2) as u32,
            n_marked: marked[k],
            euler: euler as i32,
            boundaries,
        });
    }
    Ok(out)
}

/// Vertex label of a dual graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Piece {
    pub genus: u32,
    pub marked: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: u32,
}

/// Weighted dual graph: one vertex per cut piece, one edge per curve.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGraph {
    pub vertices: Vec<Piece>,
    pub edges: Vec<Edge>,
}

impl DualGraph {
    pub fn degree(&self, v: usize) -> u32 {
        self.edges.iter().map(|e| (e.a == v) as u32 + (e.b == v) as u32).sum()
    }

    /// `Σ (2 - 2g_v - deg_v)`, the Euler characteristic of the ambient surface.
    pub fn euler_sum(&self) -> i64 {
        (0..self.vertices.len())
            .map(|v| 2 - 2 * self.vertices[v].genus as i64 - self.degree(v) as i64)
            .sum()
    }

    pub fn total_marked(&self) -> u32 {
        self.vertices.iter().map(|p| p.marked).sum()
    }
}

/// Assembles the dual graph of a cut.
pub fn dual_graph(components: &[CutComponent], cs: &CurveSystem) -> Result<DualGraph> {
    let mut ends = vec![[None::<usize>; 2]; cs.components.len()];
    for (v, comp) in components.iter().enumerate() {
        for &(k, side) in &comp.boundaries {
            let slot = ends
                .get_mut(k)
                .ok_or_else(|| Error::InvalidGraph(format!("boundary names unknown curve {k}")))?;
            let e = &mut slot[side as usize];
            if e.replace(v).is_some() {
                return Err(Error::InvalidGraph(format!("curve {k} has a doubled side")));
            }
        }
    }
    let mut edges = Vec::with_capacity(ends.len());
    for (k, e) in ends.iter().enumerate() {
        match e {
            [Some(a), Some(b)] => edges.push(Edge {
                a: *a,
                b: *b,
                weight: cs.components[k].weight,
            }),
            _ => return Err(Error::InvalidGraph(format!("dangling boundary circle on curve {k}"))),
        }
    }
    Ok(DualGraph {
        vertices: components
            .iter()
            .map(|c| Piece {
                genus: c.genus,
                marked: c.n_marked,
            })
            .collect(),
        edges,
    })
}

/// Contracts unmarked annuli, adding the weights of the two curves they join.
pub fn normalize(dg: &DualGraph) -> Result<DualGraph> {
    let mut g = dg.clone();
    loop {
        let Some(v) =
            (0..g.vertices.len()).find(|&v| g.vertices[v] == Piece { genus: 0, marked: 0 } && g.degree(v) == 2)
        else {
            return Ok(g);
        };
        let inc: Vec<usize> = (0..g.edges.len())
            .filter(|&i| g.edges[i].a == v || g.edges[i].b == v)
            .collect();
        if inc.len() != 2 {
            return Err(Error::InvalidGraph("loop at an unmarked annulus".into()));
        }
        let far = |e: &Edge| if e.a == v { e.b } else { e.a };
        let (e1, e2) = (g.edges[inc[0]], g.edges[inc[1]]);
        let merged = Edge {
            a: far(&e1),
            b: far(&e2),
            weight: e1.weight + e2.weight,
        };
        g.edges.remove(inc[1]);
        g.edges[inc[0]] = merged;
        g.vertices.remove(v);
        for e in &mut g.edges {
            if e.a > v {
                e.a -= 1;
            }
            if e.b > v {
                e.b -= 1;
            }
        }
    }
}

/// Canonical key of a normalized dual graph, rendered as ASCII: sorted vertex
/// labels `g<genus>n<marked>` joined by `+`, then `/`, then edges
/// `<a>-<b>w<weight>` joined by `.`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopType(pub String);

impl TopType {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TopType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for TopType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.contains(',') || !s.contains('/') {
            return Err(Error::Parse(format!("not a type key: {s:?}")));
        }
        Ok(TopType(s.to_string()))
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Minimizes the edge list over all label-preserving vertex orderings.
pub fn top_type(dg: &DualGraph) -> TopType {
    let n = dg.vertices.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| dg.vertices[v]);
    let labels: Vec<Piece> = order.iter().map(|&v| dg.vertices[v]).collect();

    // groups of equal labels, each permuted independently
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        if i > 0 && labels[i] == labels[i - 1] {
            groups.last_mut().unwrap().push(v);
        } else {
            groups.push(vec![v]);
        }
    }
    let mut best: Option<Vec<(usize, usize, u32)>> = None;
    let mut arrangements: Vec<Vec<usize>> = vec![Vec::new()];
    for g in &groups {
        let perms = permutations(g);
        arrangements = arrangements
            .iter()
            .flat_map(|a| {
                perms.iter().map(move |p| {
                    let mut a = a.clone();
                    a.extend_from_slice(p);
                    a
                })
            })
            .collect();
    }
    for arr in arrangements {
        let mut pos = vec![0usize; n];
        for (i, &v) in arr.iter().enumerate() {
            pos[v] = i;
        }
        let mut edges: Vec<(usize, usize, u32)> = dg
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (pos[e.a], pos[e.b]);
                (a.min(b), a.max(b), e.weight)
            })
            .collect();
        edges.sort_unstable();
        if best.as_ref().is_none_or(|b| edges < *b) {
            best = Some(edges);
        }
    }
    let verts: Vec<String> = labels.iter().map(|p| format!("g{}n{}", p.genus, p.marked)).collect();
    let edges: Vec<String> = best
        .unwrap_or_default()
        .iter()
        .map(|(a, b, w)| format!("{a}-{b}w{w}"))
        .collect();
    TopType(format!("{}/{}", verts.join("+"), edges.join(".")))
}

/// Whether cutting along a single curve disconnects the surface.
pub fn is_separating(mt: &MarkedTiling, cs: &CurveSystem) -> Result<bool> {
    if cs.components.len() != 1 {
        return Err(Error::InvalidCurveSystem(format!(
            "expected one curve, got {}",
            cs.components.len()
        )));
    }
    Ok(cut_along(mt, cs)?.len() == 2)
}

/// Dual graph read off the cylinder boundaries without refining: the pieces
/// of the cut surface retract onto the unions of touching singular circles.
pub(crate) fn critical_dual_graph(frame: &MarkedTiling) -> Result<DualGraph> {
    let cyls = horizontal_cylinders(frame, Direction::Horizontal)?;
    let cone = frame.cone();
    let nv = cone.len();
    let mut uf = UnionFind::new(nv);
    let mut on_circle = vec![false; nv];
    for c in &cyls {
        for corners in [&c.bottom_corners, &c.top_corners] {
            let first = cone.class_of(corners[0]);
            for &x in corners.iter() {
                let k = cone.class_of(x);
                on_circle[k] = true;
                uf.union(first as u32, k as u32);
            }
        }
    }
    let mut piece_of = vec![usize::MAX; nv];
    let mut n_pieces = 0;
    for k in 0..nv {
        if on_circle[k] {
            let r = uf.find(k as u32) as usize;
            if piece_of[r] == usize::MAX {
                piece_of[r] = n_pieces;
                n_pieces += 1;
            }
            piece_of[k] = piece_of[r];
        }
    }
    let mut twice_euler = vec![0i64; n_pieces];
    let mut marked = vec![0u32; n_pieces];
    let mut ends = vec![0i64; n_pieces];
    for k in 0..nv {
        if on_circle[k] {
            twice_euler[piece_of[k]] -= cone.order(k) as i64;
        } else if frame.is_marked(k) {
            return Err(Error::NotAnAnnulus("marked point inside a cylinder".into()));
        }
    }
    for &m in frame.marked() {
        marked[piece_of[m]] += 1;
    }
    let mut edges = Vec::with_capacity(cyls.len());
    for c in &cyls {
        let a = piece_of[cone.class_of(c.bottom_corners[0])];
        let b = piece_of[cone.class_of(c.top_corners[0])];
        ends[a] += 1;
        ends[b] += 1;
        edges.push(Edge { a, b, weight: c.height });
    }
    let mut vertices = Vec::with_capacity(n_pieces);
    for k in 0..n_pieces {
        // 2g = 2 - χ - b
        let four_genus = 4 - twice_euler[k] - 2 * ends[k];
        if four_genus < 0 || four_genus % 4 != 0 {
            return Err(Error::InvalidCurveSystem("inconsistent critical graph".into()));
        }
        vertices.push(Piece {
            genus: (four_genus / 4) as u32,
            marked: marked[k],
        });
    }
    Ok(DualGraph { vertices, edges })
}

/// Topological type of the core multicurve in direction `dir`.
pub fn multicurve_type(mt: &MarkedTiling, dir: Direction) -> Result<TopType> {
    Ok(top_type(&normalize(&critical_dual_graph(&in_frame(mt, dir))?)?))
}

/// Same type computed by actually cutting the refined surface.
pub fn multicurve_type_by_cutting(mt: &MarkedTiling, dir: Direction) -> Result<TopType> {
    let cs = crate::foliation::core_multicurve(mt, dir)?;
    let comps = cut_along(mt, &cs)?;
    Ok(top_type(&normalize(&dual_graph(&comps, &cs)?)?))
}
