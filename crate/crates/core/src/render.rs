//! SVG rendering and compact JSON serialisation of configurations.
//!
//! Colour map:
//!
//! | part                    | fill      |
//! |-------------------------|-----------|
//! | blue                    | `#3b6fb6` |
//! | yellow                  | `#f2c14e` |
//! | blue, highlighted       | `#0b2a5c` |
//! | yellow, highlighted     | `#c0392b` |
//!
//! Hexagon outlines are drawn in `#404040`. A mixed hexagon is drawn as two
//! half polygons cut along the chord between the midpoints of its split
//! edges, so α shows blue on top and yellow below.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::connectivity::{clusters, RegionGraph};
use crate::error::{Error, Result};
use crate::geometry::{Domain, HexCoord, SQRT3};
use crate::model::{Color, Configuration, HexState};

pub const MAX_RENDER_HEXES: usize = 10_000;

pub const BLUE: &str = "#3b6fb6";
pub const YELLOW: &str = "#f2c14e";
pub const BLUE_HIGHLIGHT: &str = "#0b2a5c";
pub const YELLOW_HIGHLIGHT: &str = "#c0392b";
pub const OUTLINE: &str = "#404040";

/// The cluster containing the `color` part of `hex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    pub hex: HexCoord,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    /// Pixels per lattice unit (distance between neighbouring centres).
    pub scale: f64,
    pub outline: bool,
    pub highlight: Option<Highlight>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { scale: 20.0, outline: true, highlight: None }
    }
}

fn corner_offset(j: usize) -> (f64, f64) {
    let a = (30.0 + 60.0 * j as f64).to_radians();
    (a.cos() / SQRT3, a.sin() / SQRT3)
}

/// Regions to highlight, as (hex index, part) pairs.
fn highlighted_parts(domain: &Domain, graph: &RegionGraph, h: Highlight) -> Result<HashSet<(usize, usize)>> {
    let i = domain.index_of(h.hex).ok_or(Error::HexOutsideDomain(h.hex))?;
    let Some(start) = graph.regions_of_hex(i).find(|&id| graph.color(id) == h.color) else {
        return Ok(HashSet::new());
    };
    let cl = clusters(graph, h.color);
    let target = cl.label[start as usize];
    Ok((0..graph.len() as u32)
        .filter(|&id| cl.label[id as usize] == target)
        .map(|id| {
            let r = graph.region(id);
            (r.hex as usize, r.part as usize)
        })
        .collect())
}

/// Renders `config` as a standalone SVG 1.1 document.
///
/// The output depends only on the inputs; coordinates are printed with three
/// decimals.
pub fn render_svg(domain: &Domain, config: &Configuration, opts: &RenderOptions) -> Result<String> {
    if domain.len() > MAX_RENDER_HEXES {
        return Err(Error::TooLargeToRender { hexes: domain.len(), limit: MAX_RENDER_HEXES });
    }
    if config.len() != domain.len() {
        return Err(Error::InvalidInput(format!(
            "configuration has {} states for {} hexagons",
            config.len(),
            domain.len()
        )));
    }
    if !(opts.scale.is_finite() && opts.scale > 0.0) {
        return Err(Error::InvalidInput("scale must be positive".into()));
    }
    let highlight = match opts.highlight {
        Some(h) => highlighted_parts(domain, &RegionGraph::build(domain, config)?, h)?,
        None => HashSet::new(),
    };

    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for h in domain.hexes() {
        let (cx, cy) = h.center();
        x0 = x0.min(cx);
        x1 = x1.max(cx);
        y0 = y0.min(cy);
        y1 = y1.max(cy);
    }
    let pad = 1.0;
    let s = opts.scale;
    let px = |x: f64| (x - x0 + pad) * s;
    let py = |y: f64| (y1 - y + pad) * s;
    let width = (x1 - x0 + 2.0 * pad) * s;
    let height = (y1 - y0 + 2.0 * pad) * s;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.3}\" height=\"{height:.3}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    let stroke = if opts.outline {
        format!(" stroke=\"{OUTLINE}\" stroke-width=\"{:.3}\"", s * 0.03)
    } else {
        String::new()
    };
    let _ = writeln!(out, "<g stroke-linejoin=\"round\"{stroke}>");

    let fill = |c: Color, lit: bool| match (c, lit) {
        (Color::Blue, false) => BLUE,
        (Color::Yellow, false) => YELLOW,
        (Color::Blue, true) => BLUE_HIGHLIGHT,
        (Color::Yellow, true) => YELLOW_HIGHLIGHT,
    };
    let mut polygon = |pts: &[(f64, f64)], color: &str| {
        out.push_str("<polygon points=\"");
        for (k, (x, y)) in pts.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.3},{:.3}", px(*x), py(*y));
        }
        let _ = writeln!(out, "\" fill=\"{color}\"/>");
    };

    for (i, (h, state)) in domain.hexes().iter().zip(&config.states).enumerate() {
        let (cx, cy) = h.center();
        let corner = |j: usize| {
            let (dx, dy) = corner_offset(j % 6);
            (cx + dx, cy + dy)
        };
        match (state.pure_color(), state.blue_start()) {
            (Some(c), _) => {
                let pts: Vec<_> = (0..6).map(corner).collect();
                polygon(&pts, fill(c, highlight.contains(&(i, 0))));
            }
            (None, Some(k0)) => {
                let mid = |k: usize| {
                    let (a, b) = (corner(k + 5), corner(k));
                    ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
                };
                let blue = [mid(k0), corner(k0), corner(k0 + 1), corner(k0 + 2), mid(k0 + 3)];
                let yellow = [mid(k0 + 3), corner(k0 + 3), corner(k0 + 4), corner(k0 + 5), mid(k0 + 6)];
                polygon(&blue, fill(Color::Blue, highlight.contains(&(i, 0))));
                polygon(&yellow, fill(Color::Yellow, highlight.contains(&(i, 1))));
            }
            _ => unreachable!(),
        }
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Short tag of a hexagon state: `Y`, `B`, `a`, `b` or `g`.
pub fn state_tag(s: HexState) -> &'static str {
    match s {
        HexState::PureYellow => "Y",
        HexState::PureBlue => "B",
        HexState::MixedAlpha => "a",
        HexState::MixedBeta => "b",
        HexState::MixedGamma => "g",
    }
}

pub fn parse_state_tag(tag: &str) -> Result<HexState> {
    HexState::ALL
        .into_iter()
        .find(|s| state_tag(*s) == tag)
        .ok_or_else(|| Error::InvalidInput(format!("unknown hexagon state tag {tag:?}")))
}

/// Compact JSON: an object from `"q,r"` to a state tag, with keys sorted.
pub fn config_to_json(domain: &Domain, config: &Configuration) -> Result<String> {
    if config.len() != domain.len() {
        return Err(Error::InvalidInput("configuration does not match the domain".into()));
    }
    let map: BTreeMap<String, &str> = domain
        .hexes()
        .iter()
        .zip(&config.states)
        .map(|(h, s)| (format!("{},{}", h.q, h.r), state_tag(*s)))
        .collect();
    Ok(serde_json::to_string(&map)?)
}

pub fn config_from_json(domain: &Domain, json: &str) -> Result<Configuration> {
    let map: BTreeMap<String, String> = serde_json::from_str(json)?;
    if map.len() != domain.len() {
        return Err(Error::InvalidInput(format!("{} states for {} hexagons", map.len(), domain.len())));
    }
    let mut states = vec![HexState::PureYellow; domain.len()];
    for (key, tag) in &map {
        let parsed = key.split_once(',').and_then(|(q, r)| Some(HexCoord::new(q.trim().parse().ok()?, r.trim().parse().ok()?)));
        let h = parsed.ok_or_else(|| Error::InvalidInput(format!("bad hexagon key {key:?}")))?;
        let i = domain.index_of(h).ok_or(Error::HexOutsideDomain(h))?;
        states[i] = parse_state_tag(tag)?;
    }
    Ok(Configuration { states })
}
