//! Monochromatic regions, clusters and the crossing, separation, ring and
//! one-arm events built on them.
//!
//! A pure hexagon is one region and a mixed hexagon two. Every hexagon edge
//! is split at its midpoint into two half-edges, and two regions are adjacent
//! when they share a half-edge. The two halves of a mixed hexagon also touch
//! along their chord; that adjacency never joins a cluster because the halves
//! differ in colour, but it does matter for the complement used by the
//! separation event.

use serde::{Deserialize, Serialize};

use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::geometry::{ArcName, Domain, HexCoord, VertexId, NO_HEX};
use crate::model::{Color, Configuration, HexState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub hex: u32,
    /// 0 for a pure hexagon or a blue half, 1 for a yellow half.
    pub part: u8,
    pub color: Color,
}

/// Part of the boundary of a region: half `half` (0 next to corner `edge − 1`,
/// 1 next to corner `edge`) of edge `edge` of its hexagon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSegment {
    pub edge: u8,
    pub half: u8,
}

#[derive(Clone, Debug, Default)]
pub struct RegionGraph {
    regions: Vec<Region>,
    first: Vec<u32>,
    states: Vec<HexState>,
    edges: Vec<(u32, u32)>,
}

impl RegionGraph {
    pub fn build(domain: &Domain, config: &Configuration) -> Result<Self> {
        if config.len() != domain.len() {
            return Err(Error::InvalidInput(format!(
                "configuration has {} states for {} hexagons",
                config.len(),
                domain.len()
            )));
        }
        let mut g = Self::default();
        g.rebuild(domain, config);
        Ok(g)
    }

    /// Rebuilds in place for a new configuration on the same domain.
    pub fn rebuild(&mut self, domain: &Domain, config: &Configuration) {
        self.regions.clear();
        self.first.clear();
        self.states.clear();
        self.states.extend_from_slice(&config.states);
        for (i, st) in config.states.iter().enumerate() {
            self.first.push(self.regions.len() as u32);
            for p in 0..st.parts() {
                self.regions.push(Region { hex: i as u32, part: p as u8, color: st.part_color(p) });
            }
        }
        self.edges.clear();
        let table = domain.neighbor_table();
        for (i, st) in config.states.iter().enumerate() {
            if st.is_mixed() {
                let f = self.first[i];
                self.edges.push((f, f + 1));
            }
            for k in 0..3 {
                let n = table[i][k];
                if n == NO_HEX {
                    continue;
                }
                let n = n as usize;
                let e1 = (self.region_at_corner(i, (k + 5) % 6), self.region_at_corner(n, k + 3));
                let e2 = (self.region_at_corner(i, k), self.region_at_corner(n, k + 2));
                self.edges.push(e1);
                if e2 != e1 {
                    self.edges.push(e2);
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, id: u32) -> Region {
        self.regions[id as usize]
    }

    pub fn color(&self, id: u32) -> Color {
        self.regions[id as usize].color
    }

    /// Adjacent region pairs, each listed once.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn state(&self, hex: usize) -> HexState {
        self.states[hex]
    }

    pub fn region_at_corner(&self, hex: usize, corner: usize) -> u32 {
        self.first[hex] + self.states[hex].corner_part(corner % 6) as u32
    }

    pub fn regions_of_hex(&self, hex: usize) -> std::ops::Range<u32> {
        let f = self.first[hex];
        f..f + self.states[hex].parts() as u32
    }

    /// Region of `hex` touching edge `k` in colour `c`, if any.
    pub fn region_on_edge(&self, hex: usize, k: usize, c: Color) -> Option<u32> {
        [(k + 5) % 6, k % 6]
            .into_iter()
            .map(|j| self.region_at_corner(hex, j))
            .find(|&r| self.color(r) == c)
    }

    pub fn neighbors(&self, id: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == id { Some(b) } else if b == id { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Half-edges of the hexagon boundary belonging to region `id`, in edge order.
    pub fn boundary(&self, id: u32) -> Vec<EdgeSegment> {
        let r = self.region(id);
        let st = self.states[r.hex as usize];
        let mut out = Vec::new();
        for k in 0..6 {
            for (half, j) in [(0u8, (k + 5) % 6), (1u8, k)] {
                if st.corner_part(j) == r.part as usize {
                    out.push(EdgeSegment { edge: k as u8, half });
                }
            }
        }
        out
    }

    /// Unions every same-coloured adjacent pair of colour `c` into `dsu`.
    pub fn union_color(&self, c: Color, dsu: &mut Dsu) {
        dsu.reset(self.regions.len());
        for &(a, b) in &self.edges {
            if self.regions[a as usize].color == c && self.regions[b as usize].color == c {
                dsu.union(a, b);
            }
        }
    }
}

/// Cluster labels for one colour. Labels are numbered in order of first
/// appearance, so they do not depend on how the union–find was built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    pub color: Color,
    pub label: Vec<Option<u32>>,
    pub count: usize,
}

pub fn clusters(graph: &RegionGraph, color: Color) -> Clusters {
    let mut dsu = Dsu::new(graph.len());
    graph.union_color(color, &mut dsu);
    let mut root_label = vec![u32::MAX; graph.len()];
    let mut label = vec![None; graph.len()];
    let mut count = 0u32;
    for id in 0..graph.len() as u32 {
        if graph.color(id) != color {
            continue;
        }
        let r = dsu.find(id) as usize;
        if root_label[r] == u32::MAX {
            root_label[r] = count;
            count += 1;
        }
        label[id as usize] = Some(root_label[r]);
    }
    Clusters { color, label, count: count as usize }
}

pub fn arc_indices(domain: &Domain, name: ArcName) -> Result<Vec<u32>> {
    let arc = domain.arc_or_err(name)?;
    if arc.hexes.is_empty() {
        return Err(Error::MalformedEvent(format!("arc {name} is empty")));
    }
    Ok(arc.hexes.iter().map(|h| domain.index_of(*h).expect("validated arc") as u32).collect())
}

/// Whether a `color` cluster meets both arcs.
pub fn has_crossing(domain: &Domain, graph: &RegionGraph, from: ArcName, to: ArcName, color: Color) -> Result<bool> {
    if from == to {
        return Err(Error::MalformedEvent(format!("crossing from arc {from} to itself")));
    }
    let from = arc_indices(domain, from)?;
    let to = arc_indices(domain, to)?;
    let mut dsu = Dsu::default();
    let mut mark = Vec::new();
    Ok(crossing_with(graph, &from, &to, color, &mut dsu, &mut mark))
}

/// Marks the roots of clusters touching `from` in `mark`; returns whether any
/// of them also touches `to`. Leaves `dsu` holding the colour clusters.
pub fn crossing_with(graph: &RegionGraph, from: &[u32], to: &[u32], color: Color, dsu: &mut Dsu, mark: &mut Vec<u8>) -> bool {
    graph.union_color(color, dsu);
    mark.clear();
    mark.resize(graph.len(), 0);
    for &h in from {
        for r in graph.regions_of_hex(h as usize) {
            if graph.color(r) == color {
                let root = dsu.find(r);
                mark[root as usize] |= 1;
            }
        }
    }
    let mut any = false;
    for &h in to {
        for r in graph.regions_of_hex(h as usize) {
            if graph.color(r) == color {
                let root = dsu.find(r);
                if mark[root as usize] & 1 == 1 {
                    mark[root as usize] |= 2;
                    any = true;
                }
            }
        }
    }
    any
}

/// The three separation events attached to a vertex of a triangle domain.
///
/// `U` asks for a crossing between A and B separating the vertex from C,
/// `V` one between B and C separating it from A, and `W` one between C and
/// A separating it from B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeparationPair {
    U,
    V,
    W,
}

impl SeparationPair {
    pub const ALL: [SeparationPair; 3] = [SeparationPair::U, SeparationPair::V, SeparationPair::W];

    /// `(first arc, second arc, arc to be separated from)`.
    pub fn arcs(self) -> (ArcName, ArcName, ArcName) {
        match self {
            SeparationPair::U => (ArcName::A, ArcName::B, ArcName::C),
            SeparationPair::V => (ArcName::B, ArcName::C, ArcName::A),
            SeparationPair::W => (ArcName::C, ArcName::A, ArcName::B),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeparationPair::U => "u",
            SeparationPair::V => "v",
            SeparationPair::W => "w",
        }
    }
}

/// Incident `(hex index, corner)` pairs of vertices, with `NO_HEX` for hexagons off the domain.
#[derive(Clone, Debug)]
pub struct VertexTable {
    pub vertices: Vec<VertexId>,
    incident: Vec<[(u32, u8); 3]>,
}

impl VertexTable {
    pub fn new(domain: &Domain, vertices: &[VertexId]) -> Result<Self> {
        let mut incident = Vec::with_capacity(vertices.len());
        for &v in vertices {
            if !domain.has_vertex(v) {
                return Err(Error::VertexOutsideDomain(v));
            }
            incident.push(v.incident().map(|(h, j)| (domain.index_of(h).map_or(NO_HEX, |i| i as u32), j as u8)));
        }
        Ok(Self { vertices: vertices.to_vec(), incident })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn regions(&self, graph: &RegionGraph, i: usize) -> [Option<u32>; 3] {
        self.incident[i].map(|(h, j)| (h != NO_HEX).then(|| graph.region_at_corner(h as usize, j as usize)))
    }
}

/// Reusable buffers for evaluating separation events on many vertices.
#[derive(Clone, Debug, Default)]
pub struct SeparationScratch {
    paths: SimplePathRegions,
    rest: Dsu,
    reach: Vec<bool>,
}

/// Finds the regions of one colour that lie on some simple path between two
/// arcs.
///
/// The colour subgraph is extended by a virtual node joined to every region
/// on the first arc, another joined to every region on the second, and an
/// edge between the two virtual nodes. A region lies on a simple arc-to-arc
/// path exactly when it shares a biconnected block with that extra edge.
#[derive(Clone, Debug, Default)]
struct SimplePathRegions {
    start: Vec<u32>,
    fill: Vec<u32>,
    adj: Vec<u32>,
    disc: Vec<u32>,
    low: Vec<u32>,
    parent: Vec<u32>,
    order: Vec<u32>,
    stack: Vec<(u32, u32)>,
    on_path: Vec<bool>,
}

const UNSEEN: u32 = u32::MAX;

impl SimplePathRegions {
    /// Fills `on_path` for every region; returns whether any region is on a path.
    fn compute(&mut self, graph: &RegionGraph, from: &[u32], to: &[u32], color: Color) -> bool {
        let n = graph.len();
        let (a, b) = (n as u32, n as u32 + 1);
        let total = n + 2;
        let arc_regions = |hexes: &[u32]| {
            hexes
                .iter()
                .flat_map(|&h| graph.regions_of_hex(h as usize))
                .filter(|&r| graph.color(r) == color)
                .collect::<Vec<u32>>()
        };
        let (ra, rb) = (arc_regions(from), arc_regions(to));
        let same = |&&(u, v): &&(u32, u32)| graph.color(u) == color && graph.color(v) == color;

        self.start.clear();
        self.start.resize(total + 1, 0);
        for &(u, v) in graph.edges().iter().filter(same) {
            self.start[u as usize + 1] += 1;
            self.start[v as usize + 1] += 1;
        }
        for &r in ra.iter().chain(&rb) {
            self.start[r as usize + 1] += 1;
        }
        self.start[a as usize + 1] += ra.len() as u32 + 1;
        self.start[b as usize + 1] += rb.len() as u32 + 1;
        for i in 0..total {
            self.start[i + 1] += self.start[i];
        }
        self.adj.clear();
        self.adj.resize(self.start[total] as usize, 0);
        self.fill.clear();
        self.fill.extend_from_slice(&self.start[..total]);
        let link = |fill: &mut Vec<u32>, adj: &mut Vec<u32>, u: u32, v: u32| {
            adj[fill[u as usize] as usize] = v;
            fill[u as usize] += 1;
            adj[fill[v as usize] as usize] = u;
            fill[v as usize] += 1;
        };
        link(&mut self.fill, &mut self.adj, a, b);
        for &(u, v) in graph.edges().iter().filter(same) {
            link(&mut self.fill, &mut self.adj, u, v);
        }
        for &r in &ra {
            link(&mut self.fill, &mut self.adj, a, r);
        }
        for &r in &rb {
            link(&mut self.fill, &mut self.adj, b, r);
        }

        self.disc.clear();
        self.disc.resize(total, UNSEEN);
        self.low.clear();
        self.low.resize(total, 0);
        self.parent.clear();
        self.parent.resize(total, UNSEEN);
        self.order.clear();
        self.stack.clear();
        let mut time = 0;
        self.disc[a as usize] = time;
        self.low[a as usize] = time;
        self.order.push(a);
        self.stack.push((a, self.start[a as usize]));
        while let Some(top) = self.stack.last_mut() {
            let v = top.0 as usize;
            if top.1 < self.start[v + 1] {
                let w = self.adj[top.1 as usize];
                top.1 += 1;
                if self.disc[w as usize] == UNSEEN {
                    time += 1;
                    self.parent[w as usize] = v as u32;
                    self.disc[w as usize] = time;
                    self.low[w as usize] = time;
                    self.order.push(w);
                    self.stack.push((w, self.start[w as usize]));
                } else if w != self.parent[v] {
                    self.low[v] = self.low[v].min(self.disc[w as usize]);
                }
            } else {
                self.stack.pop();
                if let Some(&(p, _)) = self.stack.last() {
                    self.low[p as usize] = self.low[p as usize].min(self.low[v]);
                }
            }
        }

        // A tree edge (p, v) opens a new block when low[v] >= disc[p]; otherwise
        // it lies in the block of the tree edge above p.
        self.on_path.clear();
        self.on_path.resize(total, false);
        let mut any = false;
        for &v in &self.order[1..] {
            let v = v as usize;
            let p = self.parent[v] as usize;
            self.on_path[v] = if p == a as usize {
                v == b as usize
            } else {
                self.low[v] < self.disc[p] && self.on_path[p]
            };
            any |= self.on_path[v] && v < n;
        }
        any
    }
}

/// Arc index lists for the three arcs of a triangle domain.
#[derive(Clone, Debug)]
pub struct TriangleArcs {
    a: Vec<u32>,
    b: Vec<u32>,
    c: Vec<u32>,
}

impl TriangleArcs {
    pub fn new(domain: &Domain) -> Result<Self> {
        Ok(Self {
            a: arc_indices(domain, ArcName::A)?,
            b: arc_indices(domain, ArcName::B)?,
            c: arc_indices(domain, ArcName::C)?,
        })
    }

    fn get(&self, n: ArcName) -> &[u32] {
        match n {
            ArcName::A => &self.a,
            ArcName::B => &self.b,
            _ => &self.c,
        }
    }
}

/// Evaluates one separation event for every vertex of `table`, writing into `out`.
///
/// The event holds at `z` when a simple `color` path joins the two arcs of
/// `pair` and leaves `z` on the side away from the third arc. It is computed
/// as follows: the barrier is the set of regions lying on at least one simple
/// path between the two arcs, and `z` is separated when no region incident to
/// it reaches the third arc through regions (of any colour) off the barrier.
///
/// Taking whole crossing clusters as the barrier instead would also count
/// vertices enclosed by a loop that hangs off a crossing by a single stem;
/// no simple path passes around such a loop.
pub fn separation_field(
    graph: &RegionGraph,
    arcs: &TriangleArcs,
    table: &VertexTable,
    pair: SeparationPair,
    color: Color,
    scratch: &mut SeparationScratch,
    out: &mut [bool],
) {
    let (x, y, z) = pair.arcs();
    if !scratch.paths.compute(graph, arcs.get(x), arcs.get(y), color) {
        out.iter_mut().for_each(|o| *o = false);
        return;
    }
    let n = graph.len();
    let barrier = &scratch.paths.on_path[..n];
    scratch.rest.reset(n);
    for &(a, b) in graph.edges() {
        if !barrier[a as usize] && !barrier[b as usize] {
            scratch.rest.union(a, b);
        }
    }
    scratch.reach.clear();
    scratch.reach.resize(n, false);
    for &h in arcs.get(z) {
        for r in graph.regions_of_hex(h as usize) {
            if !barrier[r as usize] {
                let root = scratch.rest.find(r);
                scratch.reach[root as usize] = true;
            }
        }
    }
    for (i, o) in out.iter_mut().enumerate() {
        let mut separated = true;
        for r in table.regions(graph, i).into_iter().flatten() {
            if !barrier[r as usize] && scratch.reach[scratch.rest.find(r) as usize] {
                separated = false;
                break;
            }
        }
        *o = separated;
    }
}

/// Single-vertex separation event on a triangle domain.
pub fn separation_event(
    domain: &Domain,
    config: &Configuration,
    z: VertexId,
    pair: SeparationPair,
    color: Color,
) -> Result<bool> {
    let graph = RegionGraph::build(domain, config)?;
    let arcs = TriangleArcs::new(domain)?;
    let table = VertexTable::new(domain, &[z])?;
    let mut out = [false];
    separation_field(&graph, &arcs, &table, pair, color, &mut SeparationScratch::default(), &mut out);
    Ok(out[0])
}

/// On an annulus: no crossing of the opposite colour between the two boundary rings.
pub fn ring_event(domain: &Domain, graph: &RegionGraph, color: Color) -> Result<bool> {
    Ok(!has_crossing(domain, graph, ArcName::Inner, ArcName::Outer, color.opposite())?)
}

/// Whether a `color` path joins the hexagons at distance `m` from `center`
/// to those at distance `n`, using only hexagons at distance `m..=n`.
pub fn one_arm_event(domain: &Domain, graph: &RegionGraph, center: HexCoord, n: u32, m: u32, color: Color) -> Result<bool> {
    if m > n {
        return Err(Error::MalformedEvent(format!("inner radius {m} exceeds outer radius {n}")));
    }
    let dist: Vec<u32> = domain.hexes().iter().map(|h| h.distance(center)).collect();
    let in_box = dist.iter().filter(|&&d| d <= n).count();
    if in_box != 1 + 3 * (n as usize) * (n as usize + 1) {
        return Err(Error::MalformedEvent(format!("box of radius {n} around {center:?} leaves the domain")));
    }
    let keep = |r: u32| {
        let d = dist[graph.region(r).hex as usize];
        graph.color(r) == color && d >= m && d <= n
    };
    let mut dsu = Dsu::new(graph.len());
    for &(a, b) in graph.edges() {
        if keep(a) && keep(b) {
            dsu.union(a, b);
        }
    }
    let mut mark = vec![false; graph.len()];
    for r in 0..graph.len() as u32 {
        if keep(r) && dist[graph.region(r).hex as usize] == m {
            let root = dsu.find(r);
            mark[root as usize] = true;
        }
    }
    for r in 0..graph.len() as u32 {
        if keep(r) && dist[graph.region(r).hex as usize] == n && mark[dsu.find(r) as usize] {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_annulus_domain, build_hexagon_domain, build_parallelogram_domain, build_triangle_domain};
    use crate::model::{sample_configuration, ModelParams};
    use crate::FloralArrangement;
    use proptest::prelude::*;

    #[test]
    fn region_counts() {
        let d = build_hexagon_domain(1).unwrap();
        let mut c = Configuration::uniform(d.len(), HexState::PureBlue);
        c.states[d.index_of(HexCoord::new(0, 0)).unwrap()] = HexState::MixedBeta;
        let g = RegionGraph::build(&d, &c).unwrap();
        assert_eq!(g.len(), 8);
        let b = clusters(&g, Color::Blue);
        assert_eq!(b.count, 1);
        let y = clusters(&g, Color::Yellow);
        assert_eq!(y.count, 1);
    }

    #[test]
    fn every_vertex_meets_three_regions() {
        let d = build_hexagon_domain(4).unwrap();
        let arr = FloralArrangement::periodic(&d, 3).unwrap();
        let params = ModelParams::parse("1/6").unwrap();
        let c = sample_configuration(&d, &arr, &params, 3).unwrap();
        let g = RegionGraph::build(&d, &c).unwrap();
        let interior = build_hexagon_domain(3).unwrap();
        for v in interior.vertices() {
            let regs: Vec<u32> = v
                .incident()
                .iter()
                .map(|(h, j)| g.region_at_corner(d.index_of(*h).unwrap(), *j))
                .collect();
            assert_eq!(regs.len(), 3);
            for i in 0..3 {
                for k in i + 1..3 {
                    assert_ne!(regs[i], regs[k]);
                    assert!(g.neighbors(regs[i]).contains(&regs[k]));
                }
            }
        }
        for i in 0..d.len() {
            if g.state(i).is_mixed() {
                for r in g.regions_of_hex(i) {
                    assert_eq!(g.boundary(r).len(), 6);
                }
            }
        }
    }

    #[test]
    fn two_by_two_crossings() {
        let d = build_parallelogram_domain(2, 2).unwrap();
        let mut c = Configuration::uniform(4, HexState::PureYellow);
        let g = RegionGraph::build(&d, &c).unwrap();
        assert!(!has_crossing(&d, &g, ArcName::A, ArcName::B, Color::Blue).unwrap());
        assert!(has_crossing(&d, &g, ArcName::A, ArcName::B, Color::Yellow).unwrap());
        // (0,0) and (1,0) blue form a bottom row joining the two columns.
        c.states[d.index_of(HexCoord::new(0, 0)).unwrap()] = HexState::PureBlue;
        c.states[d.index_of(HexCoord::new(1, 0)).unwrap()] = HexState::PureBlue;
        let g = RegionGraph::build(&d, &c).unwrap();
        assert!(has_crossing(&d, &g, ArcName::A, ArcName::B, Color::Blue).unwrap());
    }

    #[test]
    fn all_blue_separates_everything() {
        let d = build_triangle_domain(6).unwrap();
        let c = Configuration::uniform(d.len(), HexState::PureBlue);
        for v in d.vertices() {
            assert!(separation_event(&d, &c, v, SeparationPair::U, Color::Blue).unwrap());
            assert!(!separation_event(&d, &c, v, SeparationPair::U, Color::Yellow).unwrap());
        }
    }

    #[test]
    fn separation_by_a_row() {
        // A blue row at r = 3 joins A and B; vertices above it are cut off from C.
        let d = build_triangle_domain(8).unwrap();
        let mut c = Configuration::uniform(d.len(), HexState::PureYellow);
        for (i, h) in d.hexes().iter().enumerate() {
            if h.r == 3 {
                c.states[i] = HexState::PureBlue;
            }
        }
        let above = HexCoord::new(1, 5).corner(1);
        let below = HexCoord::new(2, 1).corner(1);
        assert!(separation_event(&d, &c, above, SeparationPair::U, Color::Blue).unwrap());
        assert!(!separation_event(&d, &c, below, SeparationPair::U, Color::Blue).unwrap());
        assert!(matches!(
            separation_event(&d, &c, VertexId::up(50, 50), SeparationPair::U, Color::Blue),
            Err(Error::VertexOutsideDomain(_))
        ));
    }

    fn with_blue(d: &Domain, hexes: &[HexCoord]) -> Configuration {
        let mut c = Configuration::uniform(d.len(), HexState::PureYellow);
        for h in hexes {
            c.states[d.index_of(*h).unwrap()] = HexState::PureBlue;
        }
        c
    }

    #[test]
    fn loop_on_a_single_stem_does_not_separate() {
        // Row r = 6 joins A and B. Below it hangs a ring around (5,3),
        // attached through (5,5) only.
        let d = build_triangle_domain(12).unwrap();
        let center = HexCoord::new(5, 3);
        let mut blue: Vec<HexCoord> = (0..=6).map(|q| HexCoord::new(q, 6)).collect();
        blue.extend(HexCoord::ring(center, 1));
        blue.push(HexCoord::new(5, 5));
        let z = center.corner(0);
        let c = with_blue(&d, &blue);
        assert!(!separation_event(&d, &c, z, SeparationPair::U, Color::Blue).unwrap());
        let g = RegionGraph::build(&d, &c).unwrap();
        assert!(!separated_by_some_path(&d, &g, z, SeparationPair::U, Color::Blue));
        // A second stem lets a simple path run around the bottom of the ring.
        blue.push(HexCoord::new(4, 5));
        let c = with_blue(&d, &blue);
        assert!(separation_event(&d, &c, z, SeparationPair::U, Color::Blue).unwrap());
        let g = RegionGraph::build(&d, &c).unwrap();
        assert!(separated_by_some_path(&d, &g, z, SeparationPair::U, Color::Blue));
    }

    /// Separation by brute force: some simple `color` path between the two
    /// arcs leaves `z` cut off from the third arc.
    fn separated_by_some_path(d: &Domain, g: &RegionGraph, z: VertexId, pair: SeparationPair, color: Color) -> bool {
        let (x, y, w) = pair.arcs();
        let regions_on = |name: ArcName| -> Vec<u32> {
            arc_indices(d, name).unwrap().into_iter().flat_map(|h| g.regions_of_hex(h as usize)).collect()
        };
        let (from, to, third) = (regions_on(x), regions_on(y), regions_on(w));
        let zr: Vec<u32> = z
            .incident()
            .iter()
            .filter_map(|(h, j)| d.index_of(*h).map(|i| g.region_at_corner(i, *j)))
            .collect();
        let nbrs: Vec<Vec<u32>> = (0..g.len() as u32).map(|r| g.neighbors(r)).collect();
        let cuts = |path: &[bool]| {
            let mut seen = vec![false; g.len()];
            let mut queue: Vec<u32> = third.iter().copied().filter(|&r| !path[r as usize]).collect();
            for &r in &queue {
                seen[r as usize] = true;
            }
            while let Some(r) = queue.pop() {
                for &t in &nbrs[r as usize] {
                    if !path[t as usize] && !seen[t as usize] {
                        seen[t as usize] = true;
                        queue.push(t);
                    }
                }
            }
            zr.iter().all(|&r| path[r as usize] || !seen[r as usize])
        };
        fn dfs(
            r: u32,
            path: &mut Vec<bool>,
            g: &RegionGraph,
            nbrs: &[Vec<u32>],
            to: &[u32],
            color: Color,
            cuts: &dyn Fn(&[bool]) -> bool,
        ) -> bool {
            path[r as usize] = true;
            if to.contains(&r) && cuts(path) {
                return true;
            }
            for &t in &nbrs[r as usize] {
                if g.color(t) == color && !path[t as usize] && dfs(t, path, g, nbrs, to, color, cuts) {
                    return true;
                }
            }
            path[r as usize] = false;
            false
        }
        let mut path = vec![false; g.len()];
        from.iter().filter(|&&r| g.color(r) == color).any(|&r| dfs(r, &mut path, g, &nbrs, &to, color, &cuts))
    }

    #[test]
    fn ring_and_arm() {
        let d = build_annulus_domain(1, 4).unwrap();
        let c = Configuration::uniform(d.len(), HexState::PureBlue);
        let g = RegionGraph::build(&d, &c).unwrap();
        assert!(ring_event(&d, &g, Color::Blue).unwrap());
        assert!(!ring_event(&d, &g, Color::Yellow).unwrap());
        let h = build_hexagon_domain(5).unwrap();
        let c = Configuration::uniform(h.len(), HexState::PureBlue);
        let g = RegionGraph::build(&h, &c).unwrap();
        assert!(one_arm_event(&h, &g, HexCoord::new(0, 0), 5, 1, Color::Blue).unwrap());
        assert!(!one_arm_event(&h, &g, HexCoord::new(0, 0), 5, 1, Color::Yellow).unwrap());
        assert!(one_arm_event(&h, &g, HexCoord::new(1, 0), 5, 1, Color::Blue).is_err());
    }

    fn naive_labels(g: &RegionGraph, color: Color) -> Vec<Option<usize>> {
        let n = g.len();
        let mut label: Vec<Option<usize>> = (0..n).map(|i| (g.color(i as u32) == color).then_some(i)).collect();
        loop {
            let mut changed = false;
            for &(a, b) in g.edges() {
                if let (Some(la), Some(lb)) = (label[a as usize], label[b as usize]) {
                    let m = la.min(lb);
                    if la != m || lb != m {
                        label[a as usize] = Some(m);
                        label[b as usize] = Some(m);
                        changed = true;
                    }
                }
            }
            if !changed {
                return label;
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn clusters_match_naive_labelling(seed in any::<u64>()) {
            let d = build_triangle_domain(9).unwrap();
            let arr = FloralArrangement::periodic(&d, 3).unwrap();
            let params = ModelParams::parse("1/7").unwrap();
            let c = sample_configuration(&d, &arr, &params, seed).unwrap();
            let g = RegionGraph::build(&d, &c).unwrap();
            for color in Color::BOTH {
                let cl = clusters(&g, color);
                let naive = naive_labels(&g, color);
                for i in 0..g.len() {
                    for j in 0..g.len() {
                        let same = cl.label[i].is_some() && cl.label[i] == cl.label[j];
                        let nsame = naive[i].is_some() && naive[i] == naive[j];
                        prop_assert_eq!(same, nsame);
                    }
                }
            }
        }

        #[test]
        fn separation_matches_simple_path_search(seed in any::<u64>()) {
            let d = build_triangle_domain(7).unwrap();
            let arr = FloralArrangement::periodic(&d, 3).unwrap();
            let params = ModelParams::parse("1/6").unwrap();
            let c = sample_configuration(&d, &arr, &params, seed).unwrap();
            let g = RegionGraph::build(&d, &c).unwrap();
            let arcs = TriangleArcs::new(&d).unwrap();
            let verts = d.vertices();
            let table = VertexTable::new(&d, &verts).unwrap();
            let mut scratch = SeparationScratch::default();
            let mut out = vec![false; verts.len()];
            for pair in SeparationPair::ALL {
                for color in Color::BOTH {
                    separation_field(&g, &arcs, &table, pair, color, &mut scratch, &mut out);
                    for (i, &v) in verts.iter().enumerate() {
                        prop_assert_eq!(out[i], separated_by_some_path(&d, &g, v, pair, color), "{:?} {:?} {:?}", v, pair, color);
                    }
                }
            }
        }

        #[test]
        fn exactly_one_colour_crosses_a_rhombus(seed in any::<u64>(), w in 2u32..9) {
            let d = build_parallelogram_domain(w, w).unwrap();
            let arr = FloralArrangement::empty();
            let params = ModelParams::parse("0").unwrap();
            let c = sample_configuration(&d, &arr, &params, seed).unwrap();
            let g = RegionGraph::build(&d, &c).unwrap();
            let blue = has_crossing(&d, &g, ArcName::A, ArcName::B, Color::Blue).unwrap();
            let bottom: Vec<u32> = (0..w).collect();
            let top: Vec<u32> = (w * (w - 1)..w * w).collect();
            let mut dsu = Dsu::default();
            let mut mark = Vec::new();
            let yellow_other = crossing_with(&g, &bottom, &top, Color::Yellow, &mut dsu, &mut mark);
            prop_assert!(blue != yellow_other);
        }
    }
}
