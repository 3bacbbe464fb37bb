//! Hexagonal tiling, lattice vertices, domains with marked boundary arcs and
//! floral arrangements.
//!
//! Hexagons are pointy-topped and addressed by axial coordinates `(q, r)`.
//! The centre of `(q, r)` sits at `(q + r/2, r·√3/2)`, so neighbouring centres
//! are one unit apart and each hexagon has side `1/√3`.
//!
//! Direction `k` (and edge `k`) points at angle `60°·k`; petal `k + 1` of a
//! flower is the neighbour in direction `k`. Corner `j` sits at angle
//! `30° + 60°·j`, so edge `k` runs from corner `k − 1` to corner `k`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Axial steps for the six directions, counterclockwise from the positive x-axis.
pub const DIRECTIONS: [(i32, i32); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HexCoord {
    pub q: i32,
    pub r: i32,
}

impl HexCoord {
    pub const fn new(q: i32, r: i32) -> Self {
        Self { q, r }
    }

    pub fn neighbor(self, k: usize) -> Self {
        let (dq, dr) = DIRECTIONS[k % 6];
        Self::new(self.q + dq, self.r + dr)
    }

    pub fn neighbors(self) -> [Self; 6] {
        std::array::from_fn(|k| self.neighbor(k))
    }

    /// Direction index `k` with `self.neighbor(k) == other`, if adjacent.
    pub fn direction_to(self, other: Self) -> Option<usize> {
        let d = (other.q - self.q, other.r - self.r);
        DIRECTIONS.iter().position(|&x| x == d)
    }

    pub fn distance(self, other: Self) -> u32 {
        let dq = other.q - self.q;
        let dr = other.r - self.r;
        ((dq.abs() + dr.abs() + (dq + dr).abs()) / 2) as u32
    }

    pub fn center(self) -> (f64, f64) {
        (self.q as f64 + 0.5 * self.r as f64, self.r as f64 * SQRT3 / 2.0)
    }

    /// Rotation by +60° about the origin hexagon.
    pub fn rotate60(self) -> Self {
        Self::new(-self.r, self.q + self.r)
    }

    /// Reflection in the y-axis through the origin hexagon (direction `k ↦ 3 − k`).
    pub fn reflect_y(self) -> Self {
        Self::new(-self.q - self.r, self.r)
    }

    pub fn corner(self, j: usize) -> VertexId {
        let (q, r) = (self.q, self.r);
        match j % 6 {
            0 => VertexId::up(q, r),
            1 => VertexId::down(q - 1, r),
            2 => VertexId::up(q - 1, r),
            3 => VertexId::down(q - 1, r - 1),
            4 => VertexId::up(q, r - 1),
            _ => VertexId::down(q, r - 1),
        }
    }

    pub fn corners(self) -> [VertexId; 6] {
        std::array::from_fn(|j| self.corner(j))
    }

    /// Hexagons at exactly `radius` from `center`, counterclockwise starting
    /// from the one in direction 4.
    pub fn ring(center: Self, radius: u32) -> Vec<Self> {
        if radius == 0 {
            return vec![center];
        }
        let mut out = Vec::with_capacity(6 * radius as usize);
        let (dq, dr) = DIRECTIONS[4];
        let mut h = Self::new(center.q + dq * radius as i32, center.r + dr * radius as i32);
        for k in 0..6 {
            for _ in 0..radius {
                out.push(h);
                h = h.neighbor(k);
            }
        }
        out
    }
}

/// A vertex of the hexagonal tiling, i.e. a triangle of the dual lattice.
///
/// `up` is the triangle `{(q,r), (q+1,r), (q,r+1)}`; otherwise it is
/// `{(q+1,r), (q,r+1), (q+1,r+1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub q: i32,
    pub r: i32,
    pub up: bool,
}

impl VertexId {
    pub const fn up(q: i32, r: i32) -> Self {
        Self { q, r, up: true }
    }

    pub const fn down(q: i32, r: i32) -> Self {
        Self { q, r, up: false }
    }

    pub fn position(self) -> (f64, f64) {
        let (q, r) = (self.q as f64, self.r as f64);
        if self.up {
            (q + r / 2.0 + 0.5, (r + 1.0 / 3.0) * SQRT3 / 2.0)
        } else {
            (q + r / 2.0 + 1.0, (r + 2.0 / 3.0) * SQRT3 / 2.0)
        }
    }

    /// The three hexagons meeting at this vertex with the corner index each one uses.
    pub fn incident(self) -> [(HexCoord, usize); 3] {
        let (q, r) = (self.q, self.r);
        if self.up {
            [(HexCoord::new(q, r), 0), (HexCoord::new(q + 1, r), 2), (HexCoord::new(q, r + 1), 4)]
        } else {
            [(HexCoord::new(q + 1, r), 1), (HexCoord::new(q + 1, r + 1), 3), (HexCoord::new(q, r + 1), 5)]
        }
    }

    pub fn neighbors(self) -> [VertexId; 3] {
        let (q, r) = (self.q, self.r);
        if self.up {
            [VertexId::down(q, r - 1), VertexId::down(q, r), VertexId::down(q - 1, r)]
        } else {
            [VertexId::up(q, r + 1), VertexId::up(q, r), VertexId::up(q + 1, r)]
        }
    }

    pub fn is_adjacent(self, other: VertexId) -> bool {
        self.neighbors().contains(&other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcName {
    A,
    B,
    C,
    D,
    Inner,
    Outer,
}

impl fmt::Display for ArcName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArcName::A => "A",
            ArcName::B => "B",
            ArcName::C => "C",
            ArcName::D => "D",
            ArcName::Inner => "inner",
            ArcName::Outer => "outer",
        };
        f.write_str(s)
    }
}

impl FromStr for ArcName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(ArcName::A),
            "b" => Ok(ArcName::B),
            "c" => Ok(ArcName::C),
            "d" => Ok(ArcName::D),
            "inner" => Ok(ArcName::Inner),
            "outer" => Ok(ArcName::Outer),
            _ => Err(Error::InvalidInput(format!("unknown arc name {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub name: ArcName,
    /// Boundary hexagons of the arc in counterclockwise order.
    pub hexes: Vec<HexCoord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Triangle { n: u32 },
    Parallelogram { width: u32, height: u32 },
    Rectangle { width: f64, height: f64 },
    Hexagon { radius: u32 },
    Annulus { inner: u32, outer: u32 },
    Custom,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DomainData {
    shape: Shape,
    mesh: f64,
    hexes: Vec<HexCoord>,
    arcs: Vec<Arc>,
    corners: Vec<(String, HexCoord)>,
}

/// A finite simply connected (or annular) set of hexagons with named boundary arcs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(from = "DomainData", into = "DomainData")]
pub struct Domain {
    shape: Shape,
    mesh: f64,
    hexes: Vec<HexCoord>,
    arcs: Vec<Arc>,
    corners: Vec<(String, HexCoord)>,
    index: HashMap<HexCoord, usize>,
    nbr: Vec<[u32; 6]>,
    boundary: Vec<bool>,
}

pub const NO_HEX: u32 = u32::MAX;

impl From<DomainData> for Domain {
    fn from(d: DomainData) -> Self {
        Domain::assemble(d.shape, d.mesh, d.hexes, d.arcs, d.corners)
    }
}

impl From<Domain> for DomainData {
    fn from(d: Domain) -> Self {
        DomainData { shape: d.shape, mesh: d.mesh, hexes: d.hexes, arcs: d.arcs, corners: d.corners }
    }
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
            && self.mesh == other.mesh
            && self.hexes == other.hexes
            && self.arcs == other.arcs
            && self.corners == other.corners
    }
}

impl Domain {
    fn assemble(
        shape: Shape,
        mesh: f64,
        hexes: Vec<HexCoord>,
        arcs: Vec<Arc>,
        corners: Vec<(String, HexCoord)>,
    ) -> Self {
        let index: HashMap<HexCoord, usize> = hexes.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let nbr: Vec<[u32; 6]> = hexes
            .iter()
            .map(|h| std::array::from_fn(|k| index.get(&h.neighbor(k)).map_or(NO_HEX, |&i| i as u32)))
            .collect();
        let boundary = nbr.iter().map(|n| n.contains(&NO_HEX)).collect();
        Self { shape, mesh, hexes, arcs, corners, index, nbr, boundary }
    }

    /// Builds a domain from an explicit hexagon list and arcs, then validates it.
    pub fn from_parts(hexes: Vec<HexCoord>, arcs: Vec<Arc>, mesh: f64) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for h in &hexes {
            if !seen.insert(*h) {
                return Err(Error::InvalidInput(format!("hexagon {h:?} listed twice")));
            }
        }
        let d = Self::assemble(Shape::Custom, mesh, hexes, arcs, Vec::new());
        d.validate()?;
        Ok(d)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Scale factor mapping lattice positions to the unit-size continuum domain.
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn len(&self) -> usize {
        self.hexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hexes.is_empty()
    }

    pub fn hexes(&self) -> &[HexCoord] {
        &self.hexes
    }

    pub fn hex(&self, i: usize) -> HexCoord {
        self.hexes[i]
    }

    pub fn index_of(&self, h: HexCoord) -> Option<usize> {
        self.index.get(&h).copied()
    }

    pub fn contains(&self, h: HexCoord) -> bool {
        self.index.contains_key(&h)
    }

    /// Index of the neighbour of hexagon `i` in direction `k`, or [`NO_HEX`].
    pub fn neighbor_index(&self, i: usize, k: usize) -> u32 {
        self.nbr[i][k]
    }

    pub fn neighbor_table(&self) -> &[[u32; 6]] {
        &self.nbr
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn boundary_hexes(&self) -> Vec<HexCoord> {
        self.hexes.iter().zip(&self.boundary).filter(|(_, &b)| b).map(|(&h, _)| h).collect()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, name: ArcName) -> Option<&Arc> {
        self.arcs.iter().find(|a| a.name == name)
    }

    pub fn arc_or_err(&self, name: ArcName) -> Result<&Arc> {
        self.arc(name).ok_or_else(|| Error::MalformedEvent(format!("domain has no arc {name}")))
    }

    pub fn corners(&self) -> &[(String, HexCoord)] {
        &self.corners
    }

    /// All lattice vertices that are a corner of some hexagon of the domain, sorted.
    pub fn vertices(&self) -> Vec<VertexId> {
        let set: BTreeSet<VertexId> = self.hexes.iter().flat_map(|h| h.corners()).collect();
        set.into_iter().collect()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        v.incident().iter().any(|(h, _)| self.contains(*h))
    }

    /// Vertex position divided by the mesh scale.
    pub fn scaled_position(&self, v: VertexId) -> (f64, f64) {
        let (x, y) = v.position();
        (x / self.mesh, y / self.mesh)
    }

    /// Checks that arcs are disjoint, made of boundary hexagons, contiguous in
    /// the listed order, and (for simply connected shapes) cover the boundary.
    pub fn validate(&self) -> Result<()> {
        if self.hexes.is_empty() {
            return Err(Error::DegenerateDomain("no hexagons".into()));
        }
        let mut owner: HashMap<HexCoord, ArcName> = HashMap::new();
        for arc in &self.arcs {
            for (i, h) in arc.hexes.iter().enumerate() {
                let Some(idx) = self.index_of(*h) else {
                    return Err(Error::DegenerateDomain(format!("arc {} contains {h:?} outside the domain", arc.name)));
                };
                if !self.boundary[idx] {
                    return Err(Error::DegenerateDomain(format!("arc {} contains interior hexagon {h:?}", arc.name)));
                }
                if let Some(prev) = owner.insert(*h, arc.name) {
                    return Err(Error::DegenerateDomain(format!("arcs {prev} and {} share {h:?}", arc.name)));
                }
                if i > 0 && arc.hexes[i - 1].distance(*h) != 1 {
                    return Err(Error::DegenerateDomain(format!("arc {} is not contiguous at {h:?}", arc.name)));
                }
            }
        }
        let covers = match self.shape {
            Shape::Annulus { inner, .. } => inner > 0,
            _ => !self.arcs.is_empty(),
        };
        if covers {
            for (i, h) in self.hexes.iter().enumerate() {
                if self.boundary[i] && !owner.contains_key(h) {
                    return Err(Error::DegenerateDomain(format!("boundary hexagon {h:?} belongs to no arc")));
                }
            }
        }
        if !self.is_connected() {
            return Err(Error::DegenerateDomain("domain is not connected".into()));
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.nbr[i] {
                if j != NO_HEX && !seen[j as usize] {
                    seen[j as usize] = true;
                    count += 1;
                    queue.push_back(j as usize);
                }
            }
        }
        count == self.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Domain = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }
}

/// Discretised equilateral triangle with corner hexagons `(0,0)`, `(N,0)`, `(0,N)`.
///
/// Arc C is the bottom side, A the right side and B the left side. Each corner
/// hexagon belongs to the arc that precedes it counterclockwise.
pub fn build_triangle_domain(n: u32) -> Result<Domain> {
    if n < 4 {
        return Err(Error::DegenerateDomain(format!("triangle mesh N = {n} must be at least 4")));
    }
    let n = n as i32;
    let mut hexes = Vec::new();
    for r in 0..=n {
        for q in 0..=(n - r) {
            hexes.push(HexCoord::new(q, r));
        }
    }
    let c: Vec<HexCoord> = (1..=n).map(|q| HexCoord::new(q, 0)).collect();
    let a: Vec<HexCoord> = (1..=n).map(|r| HexCoord::new(n - r, r)).collect();
    let b: Vec<HexCoord> = (0..n).rev().map(|r| HexCoord::new(0, r)).collect();
    let arcs = vec![
        Arc { name: ArcName::A, hexes: a },
        Arc { name: ArcName::B, hexes: b },
        Arc { name: ArcName::C, hexes: c },
    ];
    let corners = vec![
        ("AB".to_string(), HexCoord::new(0, n)),
        ("BC".to_string(), HexCoord::new(0, 0)),
        ("CA".to_string(), HexCoord::new(n, 0)),
    ];
    let d = Domain::assemble(Shape::Triangle { n: n as u32 }, n as f64, hexes, arcs, corners);
    d.validate()?;
    Ok(d)
}

/// Rhombus `0 ≤ q < width`, `0 ≤ r < height`.
///
/// A is the left column and B the right column; C is the rest of the bottom
/// row and D the rest of the top row.
pub fn build_parallelogram_domain(width: u32, height: u32) -> Result<Domain> {
    if width < 2 || height < 2 {
        return Err(Error::DegenerateDomain(format!("parallelogram {width}x{height} needs both sides at least 2")));
    }
    let (w, h) = (width as i32, height as i32);
    let mut hexes = Vec::new();
    for r in 0..h {
        for q in 0..w {
            hexes.push(HexCoord::new(q, r));
        }
    }
    let c: Vec<HexCoord> = (1..w - 1).map(|q| HexCoord::new(q, 0)).collect();
    let b: Vec<HexCoord> = (0..h).map(|r| HexCoord::new(w - 1, r)).collect();
    let d: Vec<HexCoord> = (1..w - 1).rev().map(|q| HexCoord::new(q, h - 1)).collect();
    let a: Vec<HexCoord> = (0..h).rev().map(|r| HexCoord::new(0, r)).collect();
    let mut arcs = vec![Arc { name: ArcName::A, hexes: a }, Arc { name: ArcName::B, hexes: b }];
    if !c.is_empty() {
        arcs.push(Arc { name: ArcName::C, hexes: c });
        arcs.push(Arc { name: ArcName::D, hexes: d });
    }
    let dom = Domain::assemble(Shape::Parallelogram { width, height }, width as f64, hexes, arcs, Vec::new());
    dom.validate()?;
    Ok(dom)
}

/// Hexagons whose centres lie in `[0, width] × [0, height]`.
///
/// A is the leftmost hexagon of each row and B the rightmost; C and D are
/// the remaining hexagons of the bottom and top rows.
pub fn build_rectangle_domain(width: f64, height: f64) -> Result<Domain> {
    const EPS: f64 = 1e-9;
    if !(width >= 3.0 && height >= 2.0 * SQRT3 / 2.0 - EPS) {
        return Err(Error::DegenerateDomain(format!("rectangle {width} x {height} is too small")));
    }
    let rows = ((height + EPS) / (SQRT3 / 2.0)).floor() as i32;
    let mut hexes = Vec::new();
    let mut row_ends = Vec::new();
    for r in 0..=rows {
        let shift = r as f64 / 2.0;
        let q_lo = (-shift - EPS).ceil() as i32;
        let q_hi = (width - shift + EPS).floor() as i32;
        row_ends.push((q_lo, q_hi));
        for q in q_lo..=q_hi {
            hexes.push(HexCoord::new(q, r));
        }
    }
    let (b0, b1) = row_ends[0];
    let (t0, t1) = row_ends[rows as usize];
    let c: Vec<HexCoord> = (b0 + 1..b1).map(|q| HexCoord::new(q, 0)).collect();
    let b: Vec<HexCoord> = (0..=rows).map(|r| HexCoord::new(row_ends[r as usize].1, r)).collect();
    let d: Vec<HexCoord> = (t0 + 1..t1).rev().map(|q| HexCoord::new(q, rows)).collect();
    let a: Vec<HexCoord> = (0..=rows).rev().map(|r| HexCoord::new(row_ends[r as usize].0, r)).collect();
    let arcs = vec![
        Arc { name: ArcName::A, hexes: a },
        Arc { name: ArcName::B, hexes: b },
        Arc { name: ArcName::C, hexes: c },
        Arc { name: ArcName::D, hexes: d },
    ];
    let dom = Domain::assemble(Shape::Rectangle { width, height }, width, hexes, arcs, Vec::new());
    dom.validate()?;
    Ok(dom)
}

/// All hexagons within `radius` of the origin; the outer ring is arc `Outer`.
pub fn build_hexagon_domain(radius: u32) -> Result<Domain> {
    build_annulus_like(0, radius, Shape::Hexagon { radius })
}

/// Hexagons at distance `inner..=outer` from the origin, with the two
/// boundary rings as arcs `Inner` and `Outer`.
pub fn build_annulus_domain(inner: u32, outer: u32) -> Result<Domain> {
    build_annulus_like(inner, outer, Shape::Annulus { inner, outer })
}

fn build_annulus_like(inner: u32, outer: u32, shape: Shape) -> Result<Domain> {
    if outer < inner || outer == 0 {
        return Err(Error::DegenerateDomain(format!("annulus radii {inner}..{outer} are invalid")));
    }
    let origin = HexCoord::new(0, 0);
    let hexes: Vec<HexCoord> = (inner..=outer).flat_map(|k| HexCoord::ring(origin, k)).collect();
    let mut arcs = Vec::new();
    if matches!(shape, Shape::Annulus { .. }) {
        arcs.push(Arc { name: ArcName::Inner, hexes: HexCoord::ring(origin, inner) });
    }
    if outer != inner {
        arcs.push(Arc { name: ArcName::Outer, hexes: HexCoord::ring(origin, outer) });
    }
    let dom = Domain::assemble(shape, outer.max(1) as f64, hexes, arcs, Vec::new());
    dom.validate()?;
    Ok(dom)
}

/// The set of iris hexagons of a floral arrangement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloralArrangement {
    pub period: Option<u32>,
    irises: Vec<HexCoord>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrangementViolation {
    OutsideDomain(HexCoord),
    OnBoundary(HexCoord),
    TooClose { a: HexCoord, b: HexCoord, distance: u32 },
}

impl FloralArrangement {
    pub fn empty() -> Self {
        Self { period: None, irises: Vec::new() }
    }

    /// Explicit irises; fails if any violates the arrangement rules in `domain`.
    pub fn from_irises(domain: &Domain, mut irises: Vec<HexCoord>) -> Result<Self> {
        irises.sort();
        irises.dedup();
        let arr = Self { period: None, irises };
        let v = arr.validate(domain);
        if let Some(first) = v.first() {
            return Err(Error::InvalidArrangement(format!("{first:?}")));
        }
        Ok(arr)
    }

    /// Irises on the sublattice `origin + period·ℤ²` (axial), which is
    /// invariant under 60° rotations about `origin`. Boundary irises are dropped.
    pub fn periodic(domain: &Domain, period: u32) -> Result<Self> {
        let origin = match domain.shape() {
            Shape::Triangle { .. } => HexCoord::new(1, 1),
            _ => HexCoord::new(0, 0),
        };
        Self::periodic_with_origin(domain, period, origin)
    }

    pub fn periodic_with_origin(domain: &Domain, period: u32, origin: HexCoord) -> Result<Self> {
        if period < 3 {
            return Err(Error::InvalidArrangement(format!("period {period} leaves fewer than two hexagons between irises")));
        }
        let p = period as i32;
        let mut kept: Vec<HexCoord> = Vec::new();
        for (i, &h) in domain.hexes().iter().enumerate() {
            if (h.q - origin.q).rem_euclid(p) != 0 || (h.r - origin.r).rem_euclid(p) != 0 {
                continue;
            }
            if domain.is_boundary(i) {
                continue;
            }
            if kept.iter().all(|k| k.distance(h) >= 3) {
                kept.push(h);
            }
        }
        kept.sort();
        Ok(Self { period: Some(period), irises: kept })
    }

    pub fn irises(&self) -> &[HexCoord] {
        &self.irises
    }

    pub fn len(&self) -> usize {
        self.irises.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irises.is_empty()
    }

    pub fn is_iris(&self, h: HexCoord) -> bool {
        self.irises.binary_search(&h).is_ok()
    }

    /// Lists every rule violation; an empty list means the arrangement is valid.
    pub fn validate(&self, domain: &Domain) -> Vec<ArrangementViolation> {
        let mut out = Vec::new();
        for &h in &self.irises {
            match domain.index_of(h) {
                None => out.push(ArrangementViolation::OutsideDomain(h)),
                Some(i) if domain.is_boundary(i) => out.push(ArrangementViolation::OnBoundary(h)),
                _ => {}
            }
        }
        for (i, &a) in self.irises.iter().enumerate() {
            for &b in &self.irises[i + 1..] {
                let d = a.distance(b);
                if d < 3 {
                    out.push(ArrangementViolation::TooClose { a, b, distance: d });
                }
            }
        }
        out
    }
}
