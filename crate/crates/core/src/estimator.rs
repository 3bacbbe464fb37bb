//! Monte Carlo estimation of crossing, separation, ring and one-arm events,
//! of the Cardy–Carleson fields on triangle domains, and of their discrete
//! contour integrals.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cardy::{distance_to_boundary, field_error, FieldError, FieldPoint, TrianglePoint};
use crate::connectivity::{
    arc_indices, crossing_with, one_arm_event, separation_field, RegionGraph, SeparationPair, SeparationScratch,
    TriangleArcs, VertexTable,
};
use crate::dsu::Dsu;
use crate::engine::{derive_seed, Engine, Merge};
use crate::error::{Error, Result};
use crate::geometry::{
    build_hexagon_domain, build_rectangle_domain, build_triangle_domain, ArcName, Domain, FloralArrangement, HexCoord,
    Shape, VertexId, SQRT3,
};
use crate::model::{Color, Configuration, ModelParams, Sampler};

/// A frequency estimate with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub successes: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, n: u64) -> Self {
        if n == 0 {
            return Self { mean: 0.0, stderr: 0.0, n, successes };
        }
        let mean = successes as f64 / n as f64;
        Self { mean, stderr: (mean * (1.0 - mean) / n as f64).sqrt(), n, successes }
    }

    /// Colour-neutral average of a blue and a yellow indicator observed on the
    /// same `n` samples, `both` of which had both indicators set.
    ///
    /// `n` and `successes` count indicator observations (two per sample); the
    /// standard error is that of the per-sample average.
    pub fn neutral(blue: u64, yellow: u64, both: u64, n: u64) -> Self {
        if n == 0 {
            return Self { mean: 0.0, stderr: 0.0, n: 0, successes: 0 };
        }
        let nf = n as f64;
        let mean = (blue + yellow) as f64 / (2.0 * nf);
        let second = (blue + yellow + 2 * both) as f64 / (4.0 * nf);
        let var = (second - mean * mean).max(0.0);
        Self { mean, stderr: (var / nf).sqrt(), n: 2 * n, successes: blue + yellow }
    }

    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }

    /// Whether `|self − other|` is within `k` combined standard errors.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.combined_stderr(other)
    }
}

/// Mean of a complex per-sample quantity with `stderr = sqrt((var Re + var Im)/n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
    pub n: u64,
}

impl ComplexEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.value().norm()
    }

    fn from_sums(s: &[f64; 4], n: u64) -> Self {
        if n == 0 {
            return Self { re: 0.0, im: 0.0, stderr: 0.0, n };
        }
        let nf = n as f64;
        let (re, im) = (s[0] / nf, s[1] / nf);
        let var = (s[2] / nf - re * re).max(0.0) + (s[3] / nf - im * im).max(0.0);
        Self { re, im, stderr: (var / nf).sqrt(), n }
    }
}

/// Primitive cube root of unity `e^{2πi/3}`.
pub fn tau() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

fn color_index(c: Color) -> usize {
    match c {
        Color::Blue => 0,
        Color::Yellow => 1,
    }
}

fn pair_index(p: SeparationPair) -> usize {
    match p {
        SeparationPair::U => 0,
        SeparationPair::V => 1,
        SeparationPair::W => 2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EventSpec {
    /// A `color` cluster meets both arcs.
    Crossing { from: ArcName, to: ArcName, color: Color },
    /// A `color` cluster meets both hexagon sets.
    HexCrossing { name: String, from: Vec<HexCoord>, to: Vec<HexCoord>, color: Color },
    /// The separation event of `pair` at `vertex` on a triangle domain.
    Separation { vertex: VertexId, pair: SeparationPair, color: Color },
    /// A `color` circuit separates the inner from the outer boundary of an annulus.
    Ring { color: Color },
    /// A `color` connection from distance `m` to distance `n` around `center`.
    OneArm { center: HexCoord, n: u32, m: u32, color: Color },
}

impl EventSpec {
    pub fn label(&self) -> String {
        let c = |c: &Color| c.name();
        match self {
            EventSpec::Crossing { from, to, color } => format!("crossing-{from}-{to}-{}", c(color)),
            EventSpec::HexCrossing { name, color, .. } => format!("crossing-{name}-{}", c(color)),
            EventSpec::Separation { vertex, pair, color } => format!(
                "separation-{}-{}-{}-{}-{}",
                pair.name(),
                vertex.q,
                vertex.r,
                if vertex.up { "up" } else { "down" },
                c(color)
            ),
            EventSpec::Ring { color } => format!("ring-{}", c(color)),
            EventSpec::OneArm { n, m, color, .. } => format!("one-arm-{m}-{n}-{}", c(color)),
        }
    }
}

enum Probe {
    Crossing { from: Vec<u32>, to: Vec<u32>, color: Color, negate: bool },
    Separation { arcs: TriangleArcs, table: VertexTable, pair: SeparationPair, color: Color },
    OneArm { center: HexCoord, n: u32, m: u32, color: Color },
}

impl Probe {
    fn compile(domain: &Domain, spec: &EventSpec) -> Result<Self> {
        Ok(match spec {
            EventSpec::Crossing { from, to, color } => {
                if from == to {
                    return Err(Error::MalformedEvent(format!("crossing from arc {from} to itself")));
                }
                Probe::Crossing {
                    from: arc_indices(domain, *from)?,
                    to: arc_indices(domain, *to)?,
                    color: *color,
                    negate: false,
                }
            }
            EventSpec::HexCrossing { from, to, color, .. } => {
                let idx = |hs: &[HexCoord]| -> Result<Vec<u32>> {
                    if hs.is_empty() {
                        return Err(Error::MalformedEvent("empty hexagon set".into()));
                    }
                    hs.iter().map(|h| domain.index_of(*h).map(|i| i as u32).ok_or(Error::HexOutsideDomain(*h))).collect()
                };
                Probe::Crossing { from: idx(from)?, to: idx(to)?, color: *color, negate: false }
            }
            EventSpec::Separation { vertex, pair, color } => {
                if !matches!(domain.shape(), Shape::Triangle { .. }) {
                    return Err(Error::MalformedEvent("separation events need a triangle domain".into()));
                }
                Probe::Separation {
                    arcs: TriangleArcs::new(domain)?,
                    table: VertexTable::new(domain, &[*vertex])?,
                    pair: *pair,
                    color: *color,
                }
            }
            EventSpec::Ring { color } => Probe::Crossing {
                from: arc_indices(domain, ArcName::Inner)?,
                to: arc_indices(domain, ArcName::Outer)?,
                color: color.opposite(),
                negate: true,
            },
            EventSpec::OneArm { center, n, m, color } => {
                let blank = Configuration::uniform(domain.len(), crate::model::HexState::PureYellow);
                one_arm_event(domain, &RegionGraph::build(domain, &blank)?, *center, *n, *m, *color)?;
                Probe::OneArm { center: *center, n: *n, m: *m, color: *color }
            }
        })
    }

    fn eval(&self, domain: &Domain, graph: &RegionGraph, s: &mut Scratch) -> bool {
        match self {
            Probe::Crossing { from, to, color, negate } => {
                crossing_with(graph, from, to, *color, &mut s.dsu, &mut s.mark) != *negate
            }
            Probe::Separation { arcs, table, pair, color } => {
                let mut out = [false];
                separation_field(graph, arcs, table, *pair, *color, &mut s.sep, &mut out);
                out[0]
            }
            Probe::OneArm { center, n, m, color } => {
                one_arm_event(domain, graph, *center, *n, *m, *color).expect("validated when compiled")
            }
        }
    }
}

struct Scratch {
    config: Configuration,
    graph: RegionGraph,
    dsu: Dsu,
    mark: Vec<u8>,
    sep: SeparationScratch,
}

impl Scratch {
    fn new(sampler: &Sampler) -> Self {
        Self {
            config: sampler.blank(),
            graph: RegionGraph::default(),
            dsu: Dsu::default(),
            mark: Vec::new(),
            sep: SeparationScratch::default(),
        }
    }

    fn draw(&mut self, domain: &Domain, sampler: &Sampler, rng: &mut impl rand::Rng) {
        sampler.sample_into(rng, &mut self.config);
        self.graph.rebuild(domain, &self.config);
    }
}

/// Estimates several events from the same `n_samples` configurations.
pub fn estimate_events(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    events: &[EventSpec],
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<Vec<Estimate>> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    let probes = events.iter().map(|e| Probe::compile(domain, e)).collect::<Result<Vec<_>>>()?;
    let sampler = Sampler::new(domain, arr, params)?;
    let counts: Vec<u64> = engine.run(
        n_samples,
        seed,
        || Scratch::new(&sampler),
        || vec![0u64; probes.len()],
        |s, acc, rng| {
            s.draw(domain, &sampler, rng);
            for (k, p) in probes.iter().enumerate() {
                let graph = std::mem::take(&mut s.graph);
                if p.eval(domain, &graph, s) {
                    acc[k] += 1;
                }
                s.graph = graph;
            }
        },
    );
    Ok(counts.into_iter().map(|c| Estimate::from_counts(c, n_samples)).collect())
}

pub fn estimate_event(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    event: &EventSpec,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<Estimate> {
    Ok(estimate_events(domain, arr, params, std::slice::from_ref(event), n_samples, seed, engine)?[0])
}

/// Blue and yellow estimates of the same crossing from independent sample streams.
#[allow(clippy::too_many_arguments)]
pub fn crossing_parity(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    from: ArcName,
    to: ArcName,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<[Estimate; 2]> {
    let mut out = [Estimate::from_counts(0, 0); 2];
    for (k, color) in [Color::Blue, Color::Yellow].into_iter().enumerate() {
        let ev = EventSpec::Crossing { from, to, color };
        out[k] = estimate_event(domain, arr, params, &ev, n_samples, derive_seed(seed, k as u64), engine)?;
    }
    Ok(out)
}

/// A closed lattice path `z_1, …, z_n` (with `z_{n+1} = z_1`) along hexagon edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contour {
    vertices: Vec<VertexId>,
}

impl Contour {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.len() < 6 {
            return Err(Error::InvalidContour(format!("{} vertices cannot close a lattice loop", vertices.len())));
        }
        let distinct: BTreeSet<&VertexId> = vertices.iter().collect();
        if distinct.len() != vertices.len() {
            return Err(Error::InvalidContour("a vertex is visited twice".into()));
        }
        for (k, v) in vertices.iter().enumerate() {
            let w = vertices[(k + 1) % vertices.len()];
            if !v.is_adjacent(w) {
                return Err(Error::InvalidContour(format!("{v:?} and {w:?} are not joined by an edge")));
            }
        }
        Ok(Self { vertices })
    }

    /// The six corners of `h`, counterclockwise from the bottom one.
    pub fn hexagon_boundary(h: HexCoord) -> Self {
        Self { vertices: [4, 5, 0, 1, 2, 3].map(|j| h.corner(j)).to_vec() }
    }

    /// The counterclockwise outer boundary of a set of hexagons with one
    /// boundary component.
    pub fn around_region(hexes: &[HexCoord]) -> Result<Self> {
        let set: BTreeSet<HexCoord> = hexes.iter().copied().collect();
        if set.is_empty() {
            return Err(Error::InvalidContour("empty region".into()));
        }
        let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for h in &set {
            for k in 0..6 {
                if !set.contains(&h.neighbor(k)) {
                    next.insert(h.corner((k + 5) % 6), h.corner(k));
                }
            }
        }
        let start = *next.keys().next().expect("nonempty region has a boundary");
        let mut path = vec![start];
        let mut v = next[&start];
        while v != start {
            path.push(v);
            v = next[&v];
            if path.len() > next.len() {
                return Err(Error::InvalidContour("boundary does not close".into()));
            }
        }
        if path.len() != next.len() {
            return Err(Error::InvalidContour("region boundary has several components".into()));
        }
        Self::new(path)
    }

    /// Boundary of the hexagons whose centres lie in the triangle with the same
    /// centroid as `domain` and half its size.
    pub fn centered_triangle(domain: &Domain) -> Result<Self> {
        Self::scaled_triangle(domain, 0.5, SQRT3 / 6.0, 0.5)
    }

    /// Boundary of the hexagons whose centres lie in the image of the unit
    /// triangle under the homothety of ratio `ratio` about `(cx, cy)`, in
    /// unit-triangle coordinates.
    pub fn scaled_triangle(domain: &Domain, cx: f64, cy: f64, ratio: f64) -> Result<Self> {
        let n = match domain.shape() {
            Shape::Triangle { n } => *n as f64,
            _ => return Err(Error::InvalidContour("triangle contours need a triangle domain".into())),
        };
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidContour(format!("ratio {ratio} is not in (0, 1)")));
        }
        let inner: Vec<HexCoord> = domain
            .hexes()
            .iter()
            .copied()
            .filter(|h| {
                let (x, y) = h.center();
                let (x, y) = ((x / n - cx) / ratio + cx, (y / n - cy) / ratio + cy);
                distance_to_boundary(x, y) >= -1e-9
            })
            .collect();
        Self::around_region(&inner)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// `(1/N) Σ ½ (f(z_k) + f(z_{k+1})) (z_{k+1} − z_k)` over a closed polygon.
pub fn contour_integral_points(points: &[Complex64], values: &[Complex64], n_mesh: f64) -> Complex64 {
    assert_eq!(points.len(), values.len());
    let m = points.len();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let j = (k + 1) % m;
        total += (values[k] + values[j]) * 0.5 * (points[j] - points[k]);
    }
    total / n_mesh
}

fn vertex_point(v: VertexId) -> Complex64 {
    let (x, y) = v.position();
    Complex64::new(x, y)
}

/// Trapezoidal contour integral of a vertex field, in lattice coordinates.
pub fn discrete_contour_integral(
    f: impl Fn(VertexId) -> Option<Complex64>,
    contour: &Contour,
    n_mesh: f64,
) -> Result<Complex64> {
    let values = contour.vertices.iter().map(|&v| f(v).ok_or(Error::MissingFieldValue(v))).collect::<Result<Vec<_>>>()?;
    let points: Vec<Complex64> = contour.vertices.iter().map(|&v| vertex_point(v)).collect();
    Ok(contour_integral_points(&points, &values, n_mesh))
}

/// Hit counts at one vertex: `hits[pair][colour]` with pairs `U, V, W` and
/// colours blue then yellow, plus samples where both colours hit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCounts {
    pub hits: [[u64; 2]; 3],
    pub both: [u64; 3],
}

impl Merge for VertexCounts {
    fn merge(&mut self, later: Self) {
        for p in 0..3 {
            for c in 0..2 {
                self.hits[p][c] += later.hits[p][c];
            }
            self.both[p] += later.both[p];
        }
    }
}

/// Estimates of `u`, `v`, `w` in both colours at a set of vertices, all from
/// the same samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldEstimate {
    pub n_mesh: f64,
    pub samples: u64,
    pub vertices: Vec<VertexId>,
    pub counts: Vec<VertexCounts>,
}

impl FieldEstimate {
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    pub fn estimate(&self, i: usize, pair: SeparationPair, color: Color) -> Estimate {
        Estimate::from_counts(self.counts[i].hits[pair_index(pair)][color_index(color)], self.samples)
    }

    pub fn neutral(&self, i: usize, pair: SeparationPair) -> Estimate {
        let c = &self.counts[i];
        let p = pair_index(pair);
        Estimate::neutral(c.hits[p][0], c.hits[p][1], c.both[p], self.samples)
    }

    /// `u + v + w − 1` for the colour-neutral fields at vertex `i`.
    pub fn sum_deviation(&self, i: usize) -> f64 {
        SeparationPair::ALL.iter().map(|&p| self.neutral(i, p).mean).sum::<f64>() - 1.0
    }

    pub fn scaled_position(&self, i: usize) -> (f64, f64) {
        let (x, y) = self.vertices[i].position();
        (x / self.n_mesh, y / self.n_mesh)
    }

    /// Colour-neutral field of `pair` as points of the unit triangle.
    pub fn field_points(&self, pair: SeparationPair) -> Vec<FieldPoint> {
        (0..self.vertices.len())
            .map(|i| {
                let (x, y) = self.scaled_position(i);
                FieldPoint { x, y, estimate: self.neutral(i, pair) }
            })
            .collect()
    }

    pub fn neutral_map(&self, pair: SeparationPair) -> HashMap<VertexId, f64> {
        (0..self.vertices.len()).map(|i| (self.vertices[i], self.neutral(i, pair).mean)).collect()
    }
}

/// The side of the triangle on which the limit of each separation field vanishes.
pub fn limit_side(pair: SeparationPair) -> ArcName {
    match pair {
        SeparationPair::U => ArcName::C,
        SeparationPair::V => ArcName::A,
        SeparationPair::W => ArcName::B,
    }
}

/// Combinations `(u − τ²v)`, `(v − τ²w)`, `(w − τ²u)` in that order.
pub const COMBINATIONS: [(SeparationPair, SeparationPair, &str); 3] = [
    (SeparationPair::U, SeparationPair::V, "u-t2v"),
    (SeparationPair::V, SeparationPair::W, "v-t2w"),
    (SeparationPair::W, SeparationPair::U, "w-t2u"),
];

#[derive(Clone, Default)]
struct CardyAcc {
    counts: Vec<VertexCounts>,
    contour: Vec<[[f64; 4]; 3]>,
}

impl Merge for CardyAcc {
    fn merge(&mut self, later: Self) {
        self.counts.merge(later.counts);
        for (a, b) in self.contour.iter_mut().zip(later.contour) {
            for (x, y) in a.iter_mut().zip(b) {
                for (s, t) in x.iter_mut().zip(y) {
                    *s += t;
                }
            }
        }
    }
}

/// Result of one shared-sample Cardy run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardyOutcome {
    pub field: FieldEstimate,
    pub contours: Vec<Contour>,
    /// Per contour, the three combinations in [`COMBINATIONS`] order.
    pub integrals: Vec<[ComplexEstimate; 3]>,
}

/// Estimates the separation fields at `vertices` and the contour integrals
/// of the colour-neutral combinations around `contours`, all from one stream
/// of samples on a triangle domain.
#[allow(clippy::too_many_arguments)]
pub fn estimate_cardy_field(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    vertices: &[VertexId],
    contours: &[Contour],
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<CardyOutcome> {
    if n_samples == 0 {
        return Err(Error::InvalidInput("sample count must be at least 1".into()));
    }
    if !matches!(domain.shape(), Shape::Triangle { .. }) {
        return Err(Error::InvalidInput("Cardy fields need a triangle domain".into()));
    }
    let mut all: Vec<VertexId> = vertices.to_vec();
    let mut slot: HashMap<VertexId, usize> = all.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    if slot.len() != all.len() {
        return Err(Error::InvalidInput("repeated field vertex".into()));
    }
    let mut contour_slots = Vec::new();
    for c in contours {
        let idx: Vec<usize> = c
            .vertices
            .iter()
            .map(|v| {
                *slot.entry(*v).or_insert_with(|| {
                    all.push(*v);
                    all.len() - 1
                })
            })
            .collect();
        let pts: Vec<Complex64> = c.vertices.iter().map(|&v| vertex_point(v)).collect();
        contour_slots.push((idx, pts));
    }
    let table = VertexTable::new(domain, &all)?;
    let arcs = TriangleArcs::new(domain)?;
    let sampler = Sampler::new(domain, arr, params)?;
    let n_mesh = domain.mesh();
    let t2 = tau() * tau();
    let n_field = vertices.len();
    let acc = engine.run(
        n_samples,
        seed,
        || (Scratch::new(&sampler), vec![vec![false; all.len()]; 6], Vec::<Complex64>::new()),
        || CardyAcc { counts: vec![VertexCounts::default(); n_field], contour: vec![[[0.0; 4]; 3]; contours.len()] },
        |(s, hits, vals), acc, rng| {
            s.draw(domain, &sampler, rng);
            for pair in SeparationPair::ALL {
                for color in [Color::Blue, Color::Yellow] {
                    let k = 2 * pair_index(pair) + color_index(color);
                    separation_field(&s.graph, &arcs, &table, pair, color, &mut s.sep, &mut hits[k]);
                }
            }
            for (i, c) in acc.counts.iter_mut().enumerate() {
                for p in 0..3 {
                    let (b, y) = (hits[2 * p][i], hits[2 * p + 1][i]);
                    c.hits[p][0] += b as u64;
                    c.hits[p][1] += y as u64;
                    c.both[p] += (b && y) as u64;
                }
            }
            let neutral = |p: SeparationPair, i: usize| {
                let p = pair_index(p);
                (hits[2 * p][i] as u8 + hits[2 * p + 1][i] as u8) as f64 / 2.0
            };
            for (ci, (idx, pts)) in contour_slots.iter().enumerate() {
                for (k, (p, q, _)) in COMBINATIONS.iter().enumerate() {
                    vals.clear();
                    vals.extend(idx.iter().map(|&i| Complex64::new(neutral(*p, i), 0.0) - t2 * neutral(*q, i)));
                    let z = contour_integral_points(pts, vals, n_mesh);
                    let a = &mut acc.contour[ci][k];
                    a[0] += z.re;
                    a[1] += z.im;
                    a[2] += z.re * z.re;
                    a[3] += z.im * z.im;
                }
            }
        },
    );
    Ok(CardyOutcome {
        field: FieldEstimate { n_mesh, samples: n_samples, vertices: vertices.to_vec(), counts: acc.counts },
        contours: contours.to_vec(),
        integrals: acc
            .contour
            .iter()
            .map(|c| [0, 1, 2].map(|k| ComplexEstimate::from_sums(&c[k], n_samples)))
            .collect(),
    })
}

/// The 36 points of the unit triangle with barycentric coordinates in
/// `{1/10, …, 8/10}`, each snapped to the nearest vertex of `domain`.
pub fn cardy_grid(domain: &Domain) -> Result<Vec<VertexId>> {
    let n_mesh = domain.mesh();
    let candidates = domain.vertices();
    let mut out = Vec::new();
    for i in 1..=8 {
        for j in 1..=(9 - i) {
            let k = 10 - i - j;
            let p = TrianglePoint::from_barycentric(i as f64, j as f64, k as f64)?;
            let best = candidates
                .iter()
                .copied()
                .min_by(|a, b| {
                    let d = |v: &VertexId| {
                        let (x, y) = v.position();
                        (x / n_mesh - p.x()).hypot(y / n_mesh - p.y())
                    };
                    d(a).total_cmp(&d(b)).then(a.cmp(b))
                })
                .ok_or_else(|| Error::DegenerateDomain("domain has no vertices".into()))?;
            if !out.contains(&best) {
                out.push(best);
            }
        }
    }
    Ok(out)
}

/// One row of a Cardy convergence study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardyRow {
    pub n: u32,
    pub samples: u64,
    /// Errors of the neutral `u`, `v`, `w` fields against `h_C`, `h_A`, `h_B`.
    pub errors: [FieldError; 3],
    /// Largest `|u + v + w − 1|` over grid points at distance at least `2/N`
    /// from the boundary.
    pub max_sum_deviation: f64,
    pub outcome: CardyOutcome,
}

impl CardyRow {
    pub fn error(&self, pair: SeparationPair) -> &FieldError {
        &self.errors[pair_index(pair)]
    }
}

/// Runs the grid field and default contour at each mesh size on a triangle
/// domain with a periodic arrangement.
#[allow(clippy::too_many_arguments)]
pub fn cardy_study(
    ns: &[u32],
    params: &ModelParams,
    period: u32,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<Vec<CardyRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let domain = build_triangle_domain(n)?;
        let arr = FloralArrangement::periodic(&domain, period)?;
        let grid = cardy_grid(&domain)?;
        let contour = Contour::centered_triangle(&domain)?;
        let outcome = estimate_cardy_field(
            &domain,
            &arr,
            params,
            &grid,
            std::slice::from_ref(&contour),
            n_samples,
            derive_seed(seed, n as u64),
            engine,
        )?;
        let f = &outcome.field;
        let [e0, e1, e2] = SeparationPair::ALL.map(|p| field_error(&f.field_points(p), limit_side(p), f.n_mesh));
        let errors = [e0?, e1?, e2?];
        let cut = 2.0 / f.n_mesh;
        let max_sum_deviation = (0..f.vertices.len())
            .filter(|&i| {
                let (x, y) = f.scaled_position(i);
                distance_to_boundary(x, y) >= cut
            })
            .map(|i| f.sum_deviation(i).abs())
            .fold(0.0, f64::max);
        rows.push(CardyRow { n, samples: n_samples, errors, max_sum_deviation, outcome });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourRow {
    pub n: u32,
    pub combination: String,
    pub value: ComplexEstimate,
}

/// `|∮(u − τ²v)|` and its two rotations for the default contour at each N.
pub fn contour_vanishing_study(
    ns: &[u32],
    params: &ModelParams,
    period: u32,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<Vec<ContourRow>> {
    let rows = cardy_study(ns, params, period, n_samples, seed, engine)?;
    Ok(contour_rows(&rows))
}

pub fn contour_rows(rows: &[CardyRow]) -> Vec<ContourRow> {
    let mut out = Vec::new();
    for r in rows {
        for (k, (_, _, name)) in COMBINATIONS.iter().enumerate() {
            out.push(ContourRow { n: r.n, combination: name.to_string(), value: r.outcome.integrals[0][k] });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmRow {
    pub n: u32,
    pub m: u32,
    pub estimate: Estimate,
    /// No successes at all; the point is left out of the fit.
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmStudy {
    pub rows: Vec<ArmRow>,
    /// Weighted least-squares slope of `log π₁` against `log n`, if at least
    /// two points are uncensored.
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
}

/// Weighted least squares `y = a + b x`; returns `(b, stderr of b)`.
pub fn weighted_slope(x: &[f64], y: &[f64], sigma: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() || x.len() != sigma.len() {
        return None;
    }
    let w: Vec<f64> = sigma.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ym = w.iter().zip(y).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * (x - xm) * (x - xm)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = w.iter().zip(x.iter().zip(y)).map(|(w, (x, y))| w * (x - xm) * (y - ym)).sum();
    Some((sxy / sxx, (1.0 / sxx).sqrt()))
}

/// One-arm probabilities `π₁(n, m)` for blue, each on a hexagonal domain of
/// radius `n` centred on an iris, with the log–log slope.
pub fn arm_decay_study(
    ns: &[u32],
    m: u32,
    params: &ModelParams,
    period: u32,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<ArmStudy> {
    if ns.len() < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("arm radii must be increasing with at least two values".into()));
    }
    if ns[0] < m {
        return Err(Error::InvalidInput(format!("outer radius {} is below the inner radius {m}", ns[0])));
    }
    let mut rows = Vec::new();
    for &n in ns {
        let domain = build_hexagon_domain(n.max(1))?;
        let arr = FloralArrangement::periodic(&domain, period)?;
        let ev = EventSpec::OneArm { center: HexCoord::new(0, 0), n, m, color: Color::Blue };
        let e = estimate_event(&domain, &arr, params, &ev, n_samples, derive_seed(seed, n as u64), engine)?;
        rows.push(ArmRow { n, m, estimate: e, censored: e.successes == 0 });
    }
    let (mut x, mut y, mut sig) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows.iter().filter(|r| !r.censored) {
        let e = &r.estimate;
        let p = (e.successes as f64 + 1.0) / (e.n as f64 + 2.0);
        x.push((r.n as f64).ln());
        y.push(e.mean.ln());
        sig.push((p * (1.0 - p) / e.n as f64).sqrt() / e.mean);
    }
    let fit = weighted_slope(&x, &y, &sig);
    Ok(ArmStudy { rows, slope: fit.map(|f| f.0), slope_stderr: fit.map(|f| f.1) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RswRow {
    pub n: u32,
    /// Height over width.
    pub aspect: f64,
    pub easy: Estimate,
    pub hard: Estimate,
}

/// Full bottom row, top row, and left and right row ends of a domain whose
/// hexagons are arranged in rows.
pub fn rectangle_sides(domain: &Domain) -> [Vec<HexCoord>; 4] {
    let mut rows: BTreeMap<i32, (i32, i32)> = BTreeMap::new();
    for h in domain.hexes() {
        let e = rows.entry(h.r).or_insert((h.q, h.q));
        e.0 = e.0.min(h.q);
        e.1 = e.1.max(h.q);
    }
    let row = |r: i32| {
        let (lo, hi) = rows[&r];
        (lo..=hi).map(|q| HexCoord::new(q, r)).collect::<Vec<_>>()
    };
    let (first, last) = (*rows.keys().next().unwrap_or(&0), *rows.keys().last().unwrap_or(&0));
    [
        row(first),
        row(last),
        rows.iter().map(|(&r, &(lo, _))| HexCoord::new(lo, r)).collect(),
        rows.iter().map(|(&r, &(_, hi))| HexCoord::new(hi, r)).collect(),
    ]
}

/// Easy-way and hard-way `color` crossings of rectangles of width `N` and
/// height `aspect · N`, between full opposite sides.
///
/// Hexagon centres span `N × (aspect · N − √3/2)`, so the union of the
/// hexagons itself has roughly the requested proportions.
#[allow(clippy::too_many_arguments)]
pub fn rsw_study(
    aspects: &[f64],
    ns: &[u32],
    params: &ModelParams,
    period: u32,
    color: Color,
    n_samples: u64,
    seed: u64,
    engine: &Engine,
) -> Result<Vec<RswRow>> {
    let mut rows = Vec::new();
    for (ai, &aspect) in aspects.iter().enumerate() {
        for &n in ns {
            let domain = build_rectangle_domain(n as f64, aspect * n as f64 - SQRT3 / 2.0)?;
            let arr = FloralArrangement::periodic(&domain, period)?;
            let [bottom, top, left, right] = rectangle_sides(&domain);
            let vertical = EventSpec::HexCrossing { name: "bottom-top".into(), from: bottom, to: top, color };
            let horizontal = EventSpec::HexCrossing { name: "left-right".into(), from: left, to: right, color };
            let label = (ai as u64) << 32 | n as u64;
            let est = estimate_events(
                &domain,
                &arr,
                params,
                &[vertical, horizontal],
                n_samples,
                derive_seed(seed, label),
                engine,
            )?;
            let (easy, hard) = if aspect <= 1.0 { (est[0], est[1]) } else { (est[1], est[0]) };
            rows.push(RswRow { n, aspect, easy, hard });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_parallelogram_domain;

    fn approx(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn estimate_invariants() {
        let e = Estimate::from_counts(30, 100);
        assert_eq!(e.mean, 0.3);
        assert!((e.stderr - (0.3f64 * 0.7 / 100.0).sqrt()).abs() < 1e-15);
        let n = Estimate::neutral(30, 30, 30, 100);
        assert_eq!(n.mean, 0.3);
        assert!((n.stderr - e.stderr).abs() < 1e-15);
        let n = Estimate::neutral(50, 50, 0, 100);
        assert_eq!(n.mean, 0.5);
        assert_eq!(n.stderr, 0.0);
    }

    #[test]
    fn contour_self_tests() {
        let hex = Contour::hexagon_boundary(HexCoord::new(2, 3));
        let c = Complex64::new(0.7, -1.1);
        let zero = Complex64::new(0.0, 0.0);
        assert!(approx(discrete_contour_integral(|_| Some(c), &hex, 1.0).unwrap(), zero));
        assert!(approx(discrete_contour_integral(|v| Some(vertex_point(v)), &hex, 1.0).unwrap(), zero));
        let conj = discrete_contour_integral(|v| Some(vertex_point(v).conj()), &hex, 1.0).unwrap();
        assert!(approx(conj, Complex64::new(0.0, SQRT3)), "{conj}");
        let unit: Vec<Complex64> = (0..6).map(|k| Complex64::from_polar(1.0, PI / 3.0 * k as f64)).collect();
        let vals: Vec<Complex64> = unit.iter().map(|z| z.conj()).collect();
        assert!(approx(contour_integral_points(&unit, &vals, 1.0), Complex64::new(0.0, 3.0 * SQRT3)));
        assert!(matches!(
            discrete_contour_integral(|_| None, &hex, 1.0),
            Err(Error::MissingFieldValue(_))
        ));
    }

    #[test]
    fn harmonic_combination_integrates_to_zero() {
        let t2 = tau() * tau();
        let n = 20.0;
        let h = |v: VertexId| {
            let (x, y) = v.position();
            let (a, b, c) = crate::cardy::h_triple(TrianglePoint::new(x / n, y / n).unwrap());
            [a, b, c]
        };
        let hex = Contour::hexagon_boundary(HexCoord::new(5, 6));
        for (p, q) in [(2, 0), (0, 1), (1, 2)] {
            let z = discrete_contour_integral(|v| Some(h(v)[p] - t2 * h(v)[q]), &hex, n).unwrap();
            assert!(z.norm() < 1e-12, "{z}");
        }
        let z = discrete_contour_integral(|v| Some(Complex64::new(h(v)[0], 0.0)), &hex, n).unwrap();
        assert!(z.norm() > 1e-4);
    }

    #[test]
    fn contours_validate_and_trace_regions() {
        let h = HexCoord::new(0, 0);
        assert_eq!(Contour::around_region(&[h]).unwrap(), Contour::around_region(&[h]).unwrap());
        assert_eq!(Contour::around_region(&[h]).unwrap().len(), 6);
        let two = Contour::around_region(&[h, h.neighbor(0)]).unwrap();
        assert_eq!(two.len(), 10);
        let ring: Vec<HexCoord> = HexCoord::ring(h, 1);
        assert!(Contour::around_region(&ring).is_err());
        assert!(Contour::new(vec![VertexId::up(0, 0), VertexId::up(1, 0)]).is_err());
        let mut v = Contour::hexagon_boundary(h).vertices().to_vec();
        v.swap(0, 1);
        assert!(Contour::new(v).is_err());
        let d = build_triangle_domain(15).unwrap();
        let c = Contour::centered_triangle(&d).unwrap();
        assert!(c.vertices().iter().all(|v| d.has_vertex(*v)));
        let signed_area: f64 = (0..c.len())
            .map(|k| {
                let (a, b) = (vertex_point(c.vertices()[k]), vertex_point(c.vertices()[(k + 1) % c.len()]));
                a.re * b.im - a.im * b.re
            })
            .sum();
        assert!(signed_area > 0.0);
    }

    #[test]
    fn grid_has_36_interior_points() {
        for n in [15, 30, 60] {
            let d = build_triangle_domain(n).unwrap();
            let g = cardy_grid(&d).unwrap();
            assert_eq!(g.len(), 36);
        }
    }

    #[test]
    fn forced_events() {
        let d = build_parallelogram_domain(5, 5).unwrap();
        let arr = FloralArrangement::empty();
        let one = ModelParams::parse("0").unwrap();
        let ev = EventSpec::Crossing { from: ArcName::A, to: ArcName::B, color: Color::Blue };
        let e = estimate_event(&d, &arr, &one, &ev, 200, 1, &Engine::sequential()).unwrap();
        assert!(e.mean > 0.0 && e.mean < 1.0);
        assert!(estimate_event(&d, &arr, &one, &EventSpec::Ring { color: Color::Blue }, 10, 1, &Engine::sequential())
            .is_err());
        let bad = EventSpec::Crossing { from: ArcName::A, to: ArcName::A, color: Color::Blue };
        assert!(estimate_event(&d, &arr, &one, &bad, 10, 1, &Engine::sequential()).is_err());
        assert!(estimate_event(&d, &arr, &one, &ev, 0, 1, &Engine::sequential()).is_err());
    }

    #[test]
    fn weighted_slope_recovers_a_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 2.0 - 0.5 * x).collect();
        let (b, se) = weighted_slope(&x, &y, &[0.1; 4]).unwrap();
        assert!((b + 0.5).abs() < 1e-12);
        assert!(se > 0.0);
        assert!(weighted_slope(&x[..1], &y[..1], &[0.1]).is_none());
    }
}
