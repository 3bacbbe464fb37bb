//! Exact enumeration over a single flower: transmission probabilities,
//! conditional transmissions under permission rules, the rule solver, and the
//! closed-form values the model is known to satisfy.
//!
//! Petals are numbered 1 to 6 in the public API (petal `k + 1` lies in
//! direction `k`). Internally petal sets are bitmasks over directions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::connectivity::RegionGraph;
use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::exact::{fmt_ratio, rat, ExactSum};
use crate::geometry::{build_hexagon_domain, Domain, FloralArrangement, HexCoord};
use crate::model::{enumerate_configurations, Color, Configuration, HexState, ModelParams, PetalConfig};

const FULL: u8 = 63;

fn petal_bit(p: u8) -> Result<u8> {
    if (1..=6).contains(&p) {
        Ok(1 << (p - 1))
    } else {
        Err(Error::InvalidPetalSets(format!("petal {p} is not in 1..=6")))
    }
}

fn ring_neighbors(mask: u8) -> u8 {
    ((mask << 1) | (mask >> 5) | (mask >> 1) | (mask << 5)) & FULL
}

fn fmt_mask(m: u8) -> String {
    let items: Vec<String> = (0..6).filter(|k| m >> k & 1 == 1).map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// One or more disjoint nonempty sets of petals, each to be connected internally.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PetalSets {
    masks: Vec<u8>,
}

impl PetalSets {
    pub fn new(sets: &[&[u8]]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sets.len());
        for set in sets {
            let mut m = 0u8;
            for &p in *set {
                m |= petal_bit(p)?;
            }
            masks.push(m);
        }
        Self::from_masks(masks)
    }

    pub fn from_masks(mut masks: Vec<u8>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::InvalidPetalSets("no sets given".into()));
        }
        let mut seen = 0u8;
        for &m in &masks {
            if m == 0 || m & !FULL != 0 {
                return Err(Error::InvalidPetalSets(format!("invalid set mask {m:#b}")));
            }
            if seen & m != 0 {
                return Err(Error::InvalidPetalSets("sets overlap".into()));
            }
            seen |= m;
        }
        masks.sort_unstable();
        Ok(Self { masks })
    }

    pub fn masks(&self) -> &[u8] {
        &self.masks
    }

    pub fn union(&self) -> u8 {
        self.masks.iter().fold(0, |a, m| a | m)
    }

    /// Every family of disjoint nonempty sets whose union is a nonempty subset of `allowed`.
    pub fn all_within(allowed: u8) -> Vec<PetalSets> {
        let mut out = Vec::new();
        let mut sub = allowed;
        while sub != 0 {
            for part in partitions(sub) {
                out.push(PetalSets::from_masks(part).expect("disjoint by construction"));
            }
            sub = (sub - 1) & allowed;
        }
        out.sort();
        out
    }
}

impl fmt::Display for PetalSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.masks.iter().map(|&m| fmt_mask(m)).collect();
        f.write_str(&parts.join("|"))
    }
}

fn partitions(mask: u8) -> Vec<Vec<u8>> {
    if mask == 0 {
        return vec![Vec::new()];
    }
    let low = mask & mask.wrapping_neg();
    let rest = mask & !low;
    let mut out = Vec::new();
    let mut sub = rest;
    loop {
        let block = low | sub;
        for mut p in partitions(rest & !sub) {
            p.push(block);
            out.push(p);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

/// Conditioned petals of a flower, optionally with the requirement that the
/// iris carries a yellow transmission between two yellow ports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Diamond {
    petals: [Option<Color>; 6],
    iris_ports: Option<(u8, u8)>,
}

impl Diamond {
    pub fn new(constraints: &[(u8, Color)]) -> Result<Self> {
        let mut petals = [None; 6];
        for &(p, c) in constraints {
            petal_bit(p)?;
            if petals[p as usize - 1].replace(c).is_some() {
                return Err(Error::InvalidPetalSets(format!("petal {p} constrained twice")));
            }
        }
        let d = Self { petals, iris_ports: None };
        if d.mask() == FULL {
            return Err(Error::InvalidPetalSets("the conditioned petals must be a proper subset".into()));
        }
        Ok(d)
    }

    /// Requires the iris to carry yellow between petals `u` and `v`, which
    /// must be conditioned yellow and not adjacent.
    pub fn with_iris_ports(mut self, u: u8, v: u8) -> Result<Self> {
        let (bu, bv) = (petal_bit(u)?, petal_bit(v)?);
        if u == v || ring_neighbors(bu) & bv != 0 {
            return Err(Error::InvalidPetalSets(format!("ports {u} and {v} must be distinct and not adjacent")));
        }
        if self.petals[u as usize - 1] != Some(Color::Yellow) || self.petals[v as usize - 1] != Some(Color::Yellow) {
            return Err(Error::InvalidPetalSets("iris ports must be conditioned yellow".into()));
        }
        self.iris_ports = Some((u - 1, v - 1));
        Ok(self)
    }

    pub fn from_masks(mask: u8, blue: u8) -> Self {
        Self { petals: std::array::from_fn(|k| (mask >> k & 1 == 1).then(|| if blue >> k & 1 == 1 { Color::Blue } else { Color::Yellow })), iris_ports: None }
    }

    pub fn petal(&self, p: u8) -> Option<Color> {
        self.petals[p as usize - 1]
    }

    pub fn has_iris_condition(&self) -> bool {
        self.iris_ports.is_some()
    }

    /// Ports as petal numbers.
    pub fn iris_ports(&self) -> Option<(u8, u8)> {
        self.iris_ports.map(|(u, v)| (u + 1, v + 1))
    }

    pub fn mask(&self) -> u8 {
        (0..6).filter(|&k| self.petals[k].is_some()).fold(0, |m, k| m | 1 << k)
    }

    pub fn color_mask(&self, c: Color) -> u8 {
        (0..6).filter(|&k| self.petals[k] == Some(c)).fold(0, |m, k| m | 1 << k)
    }

    pub fn extends(&self, eta: PetalConfig) -> bool {
        (0..6).all(|k| self.petals[k].map_or(true, |c| eta.color(k) == c))
    }

    /// `η̄`: the colours of the petals outside the diamond reversed.
    pub fn reverse_outside(&self, eta: PetalConfig) -> PetalConfig {
        PetalConfig(eta.0 ^ (!self.mask() & FULL))
    }

    /// All petal configurations extending the diamond, in increasing order.
    pub fn completions(&self) -> Vec<PetalConfig> {
        PetalConfig::all().filter(|&e| self.extends(e)).collect()
    }

    fn iris_allowed(&self, state: HexState) -> bool {
        match self.iris_ports {
            None => true,
            Some((u, v)) => state.touches(Color::Yellow, u as usize) && state.touches(Color::Yellow, v as usize),
        }
    }
}

impl fmt::Display for Diamond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..6)
            .filter_map(|k| self.petals[k].map(|c| format!("{}{}", k + 1, if c == Color::Blue { 'B' } else { 'Y' })))
            .collect();
        write!(f, "[{}]", parts.join(","))?;
        if let Some((u, v)) = self.iris_ports {
            write!(f, "+iris({},{})", u + 1, v + 1)?;
        }
        Ok(())
    }
}

/// Which regions a transmission may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Usage {
    /// Petals (direction bitmask) available for the connection.
    pub petals: u8,
    pub iris: bool,
    /// Petals whose same-coloured neighbours, petals and iris parts alike, are removed.
    pub forbid: u8,
}

impl Usage {
    pub const FULL: Usage = Usage { petals: FULL, iris: true, forbid: 0 };
}

/// How the conditioned petals may be treated by a transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Only petals outside the diamond; yellow may not use a port-conditioned iris.
    Plain,
    /// Diamond petals of the transmitting colour may also be used.
    Share,
    /// Regions touching diamond petals of the transmitting colour are removed.
    Forbid,
    /// Like `Plain` but with yellow use of a port-conditioned iris permitted.
    IrisAllowed,
}

fn usage_for(dia: &Diamond, color: Color, mode: Mode) -> Usage {
    let outside = !dia.mask() & FULL;
    let iris = !(dia.has_iris_condition() && color == Color::Yellow) || mode == Mode::IrisAllowed;
    match mode {
        Mode::Plain | Mode::IrisAllowed => Usage { petals: outside, iris, forbid: 0 },
        Mode::Share => Usage { petals: outside | dia.color_mask(color), iris, forbid: 0 },
        Mode::Forbid => Usage { petals: outside, iris, forbid: dia.color_mask(color) },
    }
}

/// Region graphs of the one-flower domain for all 64 × 5 petal and iris states.
pub struct FlowerAtlas {
    centre: usize,
    petal_hex: [usize; 6],
    graphs: Vec<RegionGraph>,
}

impl FlowerAtlas {
    fn build() -> Self {
        let domain = flower_domain();
        let centre = domain.index_of(HexCoord::new(0, 0)).unwrap();
        let petal_hex: [usize; 6] = std::array::from_fn(|k| domain.index_of(HexCoord::new(0, 0).neighbor(k)).unwrap());
        let mut graphs = Vec::with_capacity(320);
        for eta in PetalConfig::all() {
            for st in HexState::ALL {
                let mut c = Configuration::uniform(domain.len(), HexState::PureYellow);
                for k in 0..6 {
                    c.states[petal_hex[k]] = HexState::pure(eta.color(k));
                }
                c.states[centre] = st;
                graphs.push(RegionGraph::build(&domain, &c).unwrap());
            }
        }
        Self { centre, petal_hex, graphs }
    }

    pub fn get() -> &'static FlowerAtlas {
        static ATLAS: OnceLock<FlowerAtlas> = OnceLock::new();
        ATLAS.get_or_init(FlowerAtlas::build)
    }

    fn graph(&self, eta: PetalConfig, st: HexState) -> &RegionGraph {
        let si = HexState::ALL.iter().position(|&x| x == st).unwrap();
        &self.graphs[eta.0 as usize * 5 + si]
    }

    /// Whether every set of `sets` is entirely `color` and connected using only the allowed regions.
    pub fn connected(&self, eta: PetalConfig, st: HexState, color: Color, sets: &[u8], usage: Usage) -> bool {
        let g = self.graph(eta, st);
        let blocked = ring_neighbors(usage.forbid);
        let mut colour_petals = 0u8;
        for k in 0..6 {
            if eta.color(k) == color {
                colour_petals |= 1 << k;
            }
        }
        let avail = colour_petals & usage.petals & !blocked;
        for &m in sets {
            if m & !avail != 0 {
                return false;
            }
        }
        let mut allowed = vec![false; g.len()];
        for k in 0..6 {
            if avail >> k & 1 == 1 {
                allowed[g.regions_of_hex(self.petal_hex[k]).start as usize] = true;
            }
        }
        if usage.iris {
            for r in g.regions_of_hex(self.centre) {
                if g.color(r) != color {
                    continue;
                }
                let touches_forbidden = (0..6)
                    .any(|k| usage.forbid >> k & 1 == 1 && g.region_on_edge(self.centre, k, color) == Some(r));
                if !touches_forbidden {
                    allowed[r as usize] = true;
                }
            }
        }
        let mut dsu = Dsu::new(g.len());
        for &(a, b) in g.edges() {
            if allowed[a as usize] && allowed[b as usize] {
                dsu.union(a, b);
            }
        }
        sets.iter().all(|&m| {
            let regs: Vec<u32> = (0..6)
                .filter(|k| m >> k & 1 == 1)
                .map(|k| g.regions_of_hex(self.petal_hex[k]).start)
                .collect();
            let root = dsu.find(regs[0]);
            regs[1..].iter().all(|&r| dsu.find(r) == root)
        })
    }
}

/// The 7-hexagon flower domain.
pub fn flower_domain() -> Domain {
    build_hexagon_domain(1).expect("radius 1 hexagon")
}

/// Exact iris state masses for one parameter value.
struct Masses {
    half: BigRational,
    a: BigRational,
    s: BigRational,
}

impl Masses {
    fn new(params: &ModelParams) -> Self {
        Self { half: rat(1, 2), a: params.a().clone(), s: params.s().clone() }
    }

    fn law(&self, eta: PetalConfig) -> Vec<(HexState, &BigRational)> {
        if eta.is_trigger() {
            vec![(HexState::PureYellow, &self.half), (HexState::PureBlue, &self.half)]
        } else {
            vec![
                (HexState::PureYellow, &self.a),
                (HexState::PureBlue, &self.a),
                (HexState::MixedAlpha, &self.s),
                (HexState::MixedBeta, &self.s),
                (HexState::MixedGamma, &self.s),
            ]
        }
    }
}

/// Probability over the iris given the petals, with the iris law restricted
/// to the states allowed by the diamond's port condition.
fn prob_given(masses: &Masses, dia: Option<&Diamond>, eta: PetalConfig, color: Color, sets: &[u8], usage: Usage) -> BigRational {
    let atlas = FlowerAtlas::get();
    let mut num = BigRational::zero();
    let mut den = BigRational::zero();
    for (st, w) in masses.law(eta) {
        if dia.map_or(true, |d| d.iris_allowed(st)) {
            den += w;
            if atlas.connected(eta, st, color, sets, usage) {
                num += w;
            }
        }
    }
    if den.is_zero() {
        BigRational::zero()
    } else {
        num / den
    }
}

/// `μ(T^c_D)`: all sets monochromatic `color` and each connected within the flower.
pub fn transmission_prob(d: &PetalSets, color: Color, params: &ModelParams) -> BigRational {
    let masses = Masses::new(params);
    let mut total = BigRational::zero();
    for eta in PetalConfig::all() {
        total += prob_given(&masses, None, eta, color, d.masks(), Usage::FULL);
    }
    total / BigRational::from_integer(64.into())
}

/// `P(event | fixed petals)` over the flower with the event evaluated on `(η, iris state)`.
pub fn flower_event_prob<F>(fixed: &[(u8, Color)], params: &ModelParams, event: F) -> Result<BigRational>
where
    F: Fn(PetalConfig, HexState) -> bool,
{
    let mut mask = 0u8;
    let mut blue = 0u8;
    for &(p, c) in fixed {
        let b = petal_bit(p)?;
        mask |= b;
        if c == Color::Blue {
            blue |= b;
        }
    }
    let masses = Masses::new(params);
    let mut total = BigRational::zero();
    let mut n = 0i64;
    for eta in PetalConfig::all() {
        if eta.0 & mask != blue {
            continue;
        }
        n += 1;
        for (st, w) in masses.law(eta) {
            if event(eta, st) {
                total += w;
            }
        }
    }
    Ok(total / BigRational::from_integer(n.into()))
}

fn check_case(d: &PetalSets, dia: &Diamond) -> Result<()> {
    if d.union() & dia.mask() != 0 {
        return Err(Error::InvalidPetalSets(format!("sets {d} meet the conditioned petals {dia}")));
    }
    Ok(())
}

/// A permission action attached to one petal configuration and colour.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RuleAction {
    AllowSharing(#[serde(serialize_with = "ser_ratio")] BigRational),
    ForbidCloseEncounter(#[serde(serialize_with = "ser_ratio")] BigRational),
    AllowIrisUse(#[serde(serialize_with = "ser_ratio")] BigRational),
}

fn ser_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_ratio(x))
}

impl RuleAction {
    pub fn probability(&self) -> &BigRational {
        match self {
            RuleAction::AllowSharing(p) | RuleAction::ForbidCloseEncounter(p) | RuleAction::AllowIrisUse(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleAction::AllowSharing(_) => "allow-sharing",
            RuleAction::ForbidCloseEncounter(_) => "forbid-close-encounter",
            RuleAction::AllowIrisUse(_) => "allow-iris-use",
        }
    }
}

/// Permission actions for one `(D, ◇)` case; missing entries mean "none".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarRuleTable {
    pub sets: PetalSets,
    pub diamond: Diamond,
    entries: BTreeMap<(PetalConfig, Color), RuleAction>,
}

impl StarRuleTable {
    pub fn empty(sets: PetalSets, diamond: Diamond) -> Self {
        Self { sets, diamond, entries: BTreeMap::new() }
    }

    pub fn action(&self, eta: PetalConfig, color: Color) -> Option<&RuleAction> {
        self.entries.get(&(eta, color))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(PetalConfig, Color), &RuleAction)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, eta: PetalConfig, color: Color, action: RuleAction) {
        self.entries.insert((eta, color), action);
    }
}

/// `μ*(T^{c*}_{D,◇} | η)`, exact, with the permission rules of `rules` applied when given.
pub fn conditional_transmission_prob(
    d: &PetalSets,
    dia: &Diamond,
    eta: PetalConfig,
    color: Color,
    params: &ModelParams,
    rules: Option<&StarRuleTable>,
) -> Result<BigRational> {
    check_case(d, dia)?;
    if !dia.extends(eta) {
        return Err(Error::InconsistentPetals(format!("petals {:06b} do not extend {dia}", eta.0)));
    }
    let masses = Masses::new(params);
    Ok(conditional_inner(&masses, d, dia, eta, color, rules.and_then(|r| r.action(eta, color))))
}

fn mode_prob(masses: &Masses, d: &PetalSets, dia: &Diamond, eta: PetalConfig, color: Color, mode: Mode) -> BigRational {
    prob_given(masses, Some(dia), eta, color, d.masks(), usage_for(dia, color, mode))
}

fn conditional_inner(
    masses: &Masses,
    d: &PetalSets,
    dia: &Diamond,
    eta: PetalConfig,
    color: Color,
    action: Option<&RuleAction>,
) -> BigRational {
    let p0 = mode_prob(masses, d, dia, eta, color, Mode::Plain);
    match action {
        None => p0,
        Some(RuleAction::AllowSharing(p)) => {
            let ps = mode_prob(masses, d, dia, eta, color, Mode::Share);
            &p0 + p * (ps - &p0)
        }
        Some(RuleAction::ForbidCloseEncounter(p)) => {
            let pf = mode_prob(masses, d, dia, eta, color, Mode::Forbid);
            &p0 - p * (&p0 - pf)
        }
        Some(RuleAction::AllowIrisUse(p)) => {
            let pa = mode_prob(masses, d, dia, eta, color, Mode::IrisAllowed);
            &p0 + p * (pa - &p0)
        }
    }
}

fn in_unit(p: &BigRational) -> bool {
    *p >= BigRational::zero() && *p <= BigRational::one()
}

/// Solves the balance `μ*(T^{Y*}_{D,◇} | η) = μ(T^B_{D,◇} | η̄)` for every `η`
/// with `D` yellow, choosing one permission action per unbalanced pair.
///
/// Without an iris condition the adjustable side is the colour of the
/// diamond petals (yellow first when both colours occur): sharing raises its
/// probability and forbidding close encounters lowers it. With an iris
/// condition the yellow iris-use permission is adjusted.
pub fn solve_star_rules(d: &PetalSets, dia: &Diamond, params: &ModelParams) -> Result<StarRuleTable> {
    check_case(d, dia)?;
    if dia.has_iris_condition() && params.a() < params.s() {
        return Err(Error::InvalidParams("iris permission rules need b >= s".into()));
    }
    let masses = Masses::new(params);
    let mut table = StarRuleTable::empty(d.clone(), dia.clone());
    let dmask = d.union();
    for eta in dia.completions() {
        if eta.0 & dmask != 0 {
            continue;
        }
        let bar = dia.reverse_outside(eta);
        let py = mode_prob(&masses, d, dia, eta, Color::Yellow, Mode::Plain);
        let pb = mode_prob(&masses, d, dia, bar, Color::Blue, Mode::Plain);
        if py == pb {
            continue;
        }
        let infeasible = || {
            Error::BalanceInfeasible(format!(
                "sets {d}, diamond {dia}, petals {:06b}: yellow {} vs blue {}",
                eta.0,
                fmt_ratio(&py),
                fmt_ratio(&pb)
            ))
        };
        if dia.has_iris_condition() {
            let pa = mode_prob(&masses, d, dia, eta, Color::Yellow, Mode::IrisAllowed);
            if pa == py {
                return Err(infeasible());
            }
            let q = (&pb - &py) / (&pa - &py);
            if !in_unit(&q) {
                return Err(infeasible());
            }
            table.insert(eta, Color::Yellow, RuleAction::AllowIrisUse(q));
            continue;
        }
        let mut done = false;
        let sides = [(Color::Yellow, eta, &py, &pb), (Color::Blue, bar, &pb, &py)];
        for (color, e, own, target) in sides {
            if dia.color_mask(color) == 0 {
                continue;
            }
            if target > own {
                let ps = mode_prob(&masses, d, dia, e, color, Mode::Share);
                if &ps > own && &ps >= target {
                    table.insert(e, color, RuleAction::AllowSharing((target - own) / (&ps - own)));
                    done = true;
                }
            } else {
                let pf = mode_prob(&masses, d, dia, e, color, Mode::Forbid);
                if &pf < own && &pf <= target {
                    table.insert(e, color, RuleAction::ForbidCloseEncounter((own - target) / (own - &pf)));
                    done = true;
                }
            }
            if done {
                break;
            }
        }
        if !done {
            return Err(infeasible());
        }
    }
    verify_balance(&table, params)?;
    Ok(table)
}

/// Re-evaluates the balance equation with the table plugged in.
pub fn verify_balance(table: &StarRuleTable, params: &ModelParams) -> Result<()> {
    let masses = Masses::new(params);
    let (d, dia) = (&table.sets, &table.diamond);
    let dmask = d.union();
    for (_, action) in table.entries() {
        if !in_unit(action.probability()) {
            return Err(Error::BalanceInfeasible(format!("probability {} outside [0,1]", fmt_ratio(action.probability()))));
        }
    }
    for eta in dia.completions() {
        if eta.0 & dmask != 0 {
            continue;
        }
        let bar = dia.reverse_outside(eta);
        let y = conditional_inner(&masses, d, dia, eta, Color::Yellow, table.action(eta, Color::Yellow));
        let b = conditional_inner(&masses, d, dia, bar, Color::Blue, table.action(bar, Color::Blue));
        if y != b {
            return Err(Error::BalanceInfeasible(format!(
                "sets {d}, diamond {dia}, petals {:06b}: {} != {}",
                eta.0,
                fmt_ratio(&y),
                fmt_ratio(&b)
            )));
        }
    }
    Ok(())
}

/// Both sides of the balance summed over the `η` with `D` yellow, each weighted `2^-free`.
pub fn balance_totals(table: &StarRuleTable, params: &ModelParams) -> (BigRational, BigRational) {
    let masses = Masses::new(params);
    let (d, dia) = (&table.sets, &table.diamond);
    let mut y = BigRational::zero();
    let mut b = BigRational::zero();
    let completions = dia.completions();
    let w = BigRational::new(1.into(), (completions.len() as i64).into());
    for eta in completions {
        if eta.0 & d.union() != 0 {
            continue;
        }
        let bar = dia.reverse_outside(eta);
        y += conditional_inner(&masses, d, dia, eta, Color::Yellow, table.action(eta, Color::Yellow)) * &w;
        b += conditional_inner(&masses, d, dia, bar, Color::Blue, table.action(bar, Color::Blue)) * &w;
    }
    (y, b)
}

/// Outcome of the full-flower-better comparison for one colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullFlowerComparison {
    pub color: Color,
    /// `μ*(T̃^{c*}_{D,◇})`: averaged over the petals extending the diamond,
    /// sharing permissions applied and close-encounter prohibitions ignored.
    pub conditioned: BigRational,
    /// `μ(T^c_D)` with no conditioning.
    pub unconditioned: BigRational,
    pub holds: bool,
}

pub fn verify_full_flower_better(d: &PetalSets, dia: &Diamond, params: &ModelParams) -> Result<Vec<FullFlowerComparison>> {
    let table = solve_star_rules(d, dia, params)?;
    full_flower_better_with(&table, params, &mut HashMap::new())
}

fn full_flower_better_with(
    table: &StarRuleTable,
    params: &ModelParams,
    cache: &mut HashMap<(PetalSets, Color), BigRational>,
) -> Result<Vec<FullFlowerComparison>> {
    let (d, dia) = (&table.sets, &table.diamond);
    if dia.has_iris_condition() {
        return Err(Error::InvalidPetalSets("the full-flower comparison applies to diamonds without an iris condition".into()));
    }
    let masses = Masses::new(params);
    let completions = dia.completions();
    let n = BigRational::from_integer((completions.len() as i64).into());
    let mut out = Vec::new();
    for color in Color::BOTH {
        let mut total = BigRational::zero();
        for &eta in &completions {
            let action = match table.action(eta, color) {
                Some(a @ RuleAction::AllowSharing(_)) => Some(a),
                _ => None,
            };
            total += conditional_inner(&masses, d, dia, eta, color, action);
        }
        let conditioned = total / &n;
        let unconditioned = cache
            .entry((d.clone(), color))
            .or_insert_with(|| transmission_prob(d, color, params))
            .clone();
        let holds = conditioned <= unconditioned;
        out.push(FullFlowerComparison { color, conditioned, unconditioned, holds });
    }
    Ok(out)
}

/// Every `(D, ◇)` with a nonempty diamond of plain petal conditions.
pub fn plain_cases() -> Vec<(PetalSets, Diamond)> {
    let mut out = Vec::new();
    for mask in 1u8..FULL {
        let mut blue = mask;
        loop {
            let dia = Diamond::from_masks(mask, blue);
            for d in PetalSets::all_within(!mask & FULL) {
                out.push((d, dia.clone()));
            }
            if blue == 0 {
                break;
            }
            blue = (blue - 1) & mask;
        }
    }
    out
}

/// Every `(D, ◇)` whose diamond carries yellow ports at distance two or three
/// through the iris, together with any further petal conditions.
pub fn iris_cases() -> Vec<(PetalSets, Diamond)> {
    let mut out = Vec::new();
    for (u, v) in iris_port_pairs() {
        let ports = 1u8 << u | 1u8 << v;
        let others = !ports & FULL;
        let mut extra = others;
        loop {
            if extra != others {
                let mut blue = extra;
                loop {
                    let dia = Diamond::from_masks(ports | extra, blue)
                        .with_iris_ports(u + 1, v + 1)
                        .expect("valid ports");
                    for d in PetalSets::all_within(others & !extra) {
                        out.push((d, dia.clone()));
                    }
                    if blue == 0 {
                        break;
                    }
                    blue = (blue - 1) & extra;
                }
            }
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & others;
        }
    }
    out
}

fn iris_port_pairs() -> Vec<(u8, u8)> {
    let mut out = Vec::new();
    for u in 0u8..6 {
        out.push((u, (u + 2) % 6));
        if u < 3 {
            out.push((u, u + 3));
        }
    }
    out
}

/// Closed forms stated for the model, as functions of `s` (with `b = y = a`).
pub mod closed_forms {
    use super::*;

    fn b(params: &ModelParams) -> BigRational {
        params.a().clone()
    }

    /// Blue transmission between next-nearest ports `1, 3` given `1, 3` blue and `2` yellow.
    pub fn next_nearest_ports(params: &ModelParams) -> BigRational {
        let (b, s) = (b(params), params.s().clone());
        rat(1, 8) * (rat(1, 1) + rat(2, 1) * rat(1, 2) + rat(2, 1) * (&b + &s) + rat(3, 1) * (&b + rat(2, 1) * &s))
    }

    /// Blue transmission between opposite ports `1, 4` given both blue.
    pub fn opposite_ports(params: &ModelParams) -> BigRational {
        let (b, s) = (b(params), params.s().clone());
        rat(1, 4) + rat(3, 4) * (rat(1, 4) + rat(1, 4) * (&b + &s) + rat(1, 2) * (&b + rat(2, 1) * &s))
    }

    /// Blue connection of `{4, 5, 1}` given `4, 5, 1` blue and `6` yellow.
    pub fn fkg_conditioned(params: &ModelParams) -> BigRational {
        let (a, s) = (params.a().clone(), params.s().clone());
        rat(1, 4) * (rat(1, 1) + rat(1, 2) + rat(2, 1) * (a + rat(2, 1) * s))
    }

    /// The same connection given only `6` yellow, with `4, 5, 1` forced blue
    /// for the connection while the actual petals drive the iris law.
    pub fn fkg_unconditioned(params: &ModelParams) -> BigRational {
        let (a, s) = (params.a().clone(), params.s().clone());
        rat(1, 32) * (rat(5, 2) + rat(8, 1) + rat(19, 1) * (a + rat(2, 1) * s))
    }

    /// Through-iris factor for two next-nearest blue ports in a non-triggering configuration.
    pub fn through_iris(params: &ModelParams) -> BigRational {
        b(params) + params.s()
    }

    /// Close-encounter prohibition probability for a single yellow diamond petal.
    pub fn forbid_single_petal(params: &ModelParams) -> BigRational {
        let (y, s) = (params.a().clone(), params.s().clone());
        &s / (rat(2, 1) * y + rat(4, 1) * &s)
    }

    /// Iris-use permission probability for a port-conditioned iris.
    pub fn iris_permission(params: &ModelParams) -> BigRational {
        params.s() / params.a()
    }
}

/// Raw enumerations of the tallies in [`closed_forms`].
pub mod tallies {
    use super::*;

    fn sets(s: &[&[u8]]) -> PetalSets {
        PetalSets::new(s).expect("static sets")
    }

    pub fn next_nearest_ports(params: &ModelParams) -> BigRational {
        let d = sets(&[&[1, 3]]);
        let atlas = FlowerAtlas::get();
        flower_event_prob(&[(1, Color::Blue), (3, Color::Blue), (2, Color::Yellow)], params, |e, st| {
            atlas.connected(e, st, Color::Blue, d.masks(), Usage::FULL)
        })
        .unwrap()
    }

    pub fn opposite_ports(params: &ModelParams) -> BigRational {
        let d = sets(&[&[1, 4]]);
        let atlas = FlowerAtlas::get();
        flower_event_prob(&[(1, Color::Blue), (4, Color::Blue)], params, |e, st| {
            atlas.connected(e, st, Color::Blue, d.masks(), Usage::FULL)
        })
        .unwrap()
    }

    pub fn fkg_conditioned(params: &ModelParams) -> BigRational {
        let d = sets(&[&[1, 4, 5]]);
        let atlas = FlowerAtlas::get();
        flower_event_prob(
            &[(4, Color::Blue), (5, Color::Blue), (1, Color::Blue), (6, Color::Yellow)],
            params,
            |e, st| atlas.connected(e, st, Color::Blue, d.masks(), Usage::FULL),
        )
        .unwrap()
    }

    pub fn fkg_unconditioned(params: &ModelParams) -> BigRational {
        let d = sets(&[&[1, 4, 5]]);
        let atlas = FlowerAtlas::get();
        flower_event_prob(&[(6, Color::Yellow)], params, |e, st| {
            let forced = e.with(0, Color::Blue).with(3, Color::Blue).with(4, Color::Blue);
            atlas.connected(forced, st, Color::Blue, d.masks(), Usage::FULL)
        })
        .unwrap()
    }

    /// Blue transmission between `1` and `3` when only those petals may be used, all others yellow.
    pub fn through_iris(params: &ModelParams) -> BigRational {
        let d = sets(&[&[1, 3]]);
        let atlas = FlowerAtlas::get();
        let usage = Usage { petals: 0b000101, iris: true, forbid: 0 };
        flower_event_prob(
            &[(1, Color::Blue), (2, Color::Yellow), (3, Color::Blue), (4, Color::Yellow), (5, Color::Yellow), (6, Color::Yellow)],
            params,
            |e, st| atlas.connected(e, st, Color::Blue, d.masks(), usage),
        )
        .unwrap()
    }
}

/// Conditioned and unconditioned values of the positive-correlation counterexample.
pub fn fkg_counterexample(params: &ModelParams) -> (BigRational, BigRational) {
    (tallies::fkg_conditioned(params), tallies::fkg_unconditioned(params))
}

/// For every non-adjacent petal pair and colour, the mixed states whose part
/// of that colour meets both petals.
pub fn binary_transmitters(u: usize, v: usize, color: Color) -> Vec<HexState> {
    HexState::MIXED
        .into_iter()
        .filter(|st| {
            (0..2).any(|p| {
                st.part_color(p) == color
                    && [u, v].iter().all(|&k| [(k + 5) % 6, k].iter().any(|&j| st.corner_part(j) == p))
            })
        })
        .collect()
}

/// Counts `(holding, total)` for the flower duality: with two non-adjacent
/// blue petals and every other petal yellow, either the blue pair is
/// connected or the two yellow arcs between them are joined, never both.
pub fn micro_duality(st: HexState) -> (u64, u64) {
    let atlas = FlowerAtlas::get();
    let (mut ok, mut total) = (0u64, 0u64);
    for i in 0..6usize {
        for j in i + 2..6 {
            if (j + 1) % 6 == i {
                continue;
            }
            let pair = 1u8 << i | 1u8 << j;
            let eta = PetalConfig(pair);
            let arcs = !pair & FULL;
            total += 1;
            let blue = atlas.connected(eta, st, Color::Blue, &[pair], Usage::FULL);
            let yellow = atlas.connected(eta, st, Color::Yellow, &[arcs], Usage::FULL);
            if blue != yellow {
                ok += 1;
            }
        }
    }
    (ok, total)
}

/// Monochromatic connection between two sets of non-iris hexagons: every
/// hexagon of `a ∪ b` has colour `color` and all lie in one cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionEvent {
    pub a: Vec<HexCoord>,
    pub b: Vec<HexCoord>,
    pub color: Color,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FkgCheck {
    pub holds: bool,
    /// The pair `(J, L)` (bitmasks over events) with the smallest margin,
    /// with `μ(T_J ∩ T_L)` and `μ(T_J) μ(T_L)`.
    pub worst: Option<(u32, u32, BigRational, BigRational)>,
}

/// Exact check of `μ(T_J ∩ T_L) ≥ μ(T_J) μ(T_L)` for all nonempty index sets.
pub fn verify_path_fkg_small(
    domain: &Domain,
    arr: &FloralArrangement,
    events: &[ConnectionEvent],
    params: &ModelParams,
) -> Result<FkgCheck> {
    if events.is_empty() || events.len() > 8 {
        return Err(Error::MalformedEvent("between one and eight events are supported".into()));
    }
    let mut idx_events = Vec::new();
    for ev in events {
        let mut hexes = Vec::new();
        for h in ev.a.iter().chain(&ev.b) {
            let i = domain.index_of(*h).ok_or(Error::HexOutsideDomain(*h))?;
            if arr.is_iris(*h) {
                return Err(Error::MalformedEvent(format!("{h:?} is an iris")));
            }
            hexes.push(i);
        }
        if ev.a.is_empty() || ev.b.is_empty() {
            return Err(Error::MalformedEvent("empty endpoint set".into()));
        }
        idx_events.push((hexes, ev.color));
    }
    let e = enumerate_configurations(domain, arr, crate::model::DEFAULT_ENUMERATION_CAP)?;
    let n = events.len();
    let mut buckets = vec![ExactSum::new(); 1 << n];
    let mut graph = RegionGraph::default();
    let mut dsu = Dsu::default();
    e.for_each(|config, w| {
        graph.rebuild(domain, config);
        let mut mask = 0usize;
        for (t, (hexes, color)) in idx_events.iter().enumerate() {
            if hexes.iter().any(|&h| config.states[h].pure_color() != Some(*color)) {
                continue;
            }
            graph.union_color(*color, &mut dsu);
            let root = dsu.find(graph.regions_of_hex(hexes[0]).start);
            if hexes.iter().all(|&h| dsu.find(graph.regions_of_hex(h).start) == root) {
                mask |= 1 << t;
            }
        }
        buckets[mask].add(w);
    });
    let vals: Vec<BigRational> = buckets.iter().map(|b| b.eval(params.a(), params.s())).collect();
    let prob = |j: usize| -> BigRational {
        let mut t = BigRational::zero();
        for (m, v) in vals.iter().enumerate() {
            if m & j == j {
                t += v;
            }
        }
        t
    };
    let all: Vec<BigRational> = (0..1usize << n).map(prob).collect();
    let mut holds = true;
    let mut worst: Option<(u32, u32, BigRational, BigRational)> = None;
    for j in 1..1usize << n {
        for l in 1..1usize << n {
            let lhs = all[j | l].clone();
            let rhs = &all[j] * &all[l];
            if lhs < rhs {
                holds = false;
            }
            let margin = &lhs - &rhs;
            if worst.as_ref().map_or(true, |(_, _, a, b)| margin < a - b) {
                worst = Some((j as u32, l as u32, lhs, rhs));
            }
        }
    }
    Ok(FkgCheck { holds, worst })
}

/// One line of the oracle report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheck {
    pub check: &'static str,
    pub case: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub relation: Relation,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Lt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }

    fn test(self, l: &BigRational, r: &BigRational) -> bool {
        match self {
            Relation::Eq => l == r,
            Relation::Le => l <= r,
            Relation::Lt => l < r,
        }
    }
}

fn row(check: &'static str, case: impl Into<String>, lhs: BigRational, rhs: BigRational, relation: Relation) -> OracleCheck {
    let holds = relation.test(&lhs, &rhs);
    OracleCheck { check, case: case.into(), lhs, rhs, relation, holds }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Every exact single-flower identity and inequality at the given `s`.
pub fn oracle_report(params: &ModelParams) -> Vec<OracleCheck> {
    let mut out = Vec::new();
    let masses = Masses::new(params);
    for eta in PetalConfig::all() {
        let total: BigRational = masses.law(eta).into_iter().map(|(_, w)| w.clone()).sum();
        out.push(row("iris-law-normalization", format!("petals {:06b}", eta.0), total, BigRational::one(), Relation::Eq));
    }
    let triggers = PetalConfig::all().filter(|p| p.is_trigger()).count() as u64;
    out.push(row("trigger-count", "all petal configurations", int(triggers), int(12), Relation::Eq));
    for u in 0..6usize {
        for v in u + 2..6 {
            if (v + 1) % 6 == u {
                continue;
            }
            for color in Color::BOTH {
                let n = binary_transmitters(u, v, color).len() as u64;
                out.push(row(
                    "binary-transmission-uniqueness",
                    format!("petals {},{} {}", u + 1, v + 1, color.name()),
                    int(n),
                    int(1),
                    Relation::Eq,
                ));
            }
        }
    }
    for st in HexState::ALL {
        let (ok, total) = micro_duality(st);
        out.push(row("micro-duality", format!("{st:?}"), int(ok), int(total), Relation::Eq));
    }
    for d in PetalSets::all_within(FULL) {
        let b = transmission_prob(&d, Color::Blue, params);
        let y = transmission_prob(&d, Color::Yellow, params);
        out.push(row("color-parity", d.to_string(), b, y, Relation::Eq));
    }
    out.push(row("through-iris-factor", "ports 1,3", tallies::through_iris(params), closed_forms::through_iris(params), Relation::Eq));
    out.push(row("next-nearest-port-tally", "ports 1,3 given 2 yellow", tallies::next_nearest_ports(params), closed_forms::next_nearest_ports(params), Relation::Eq));
    out.push(row("opposite-port-tally", "ports 1,4", tallies::opposite_ports(params), closed_forms::opposite_ports(params), Relation::Eq));
    let (cond, uncond) = fkg_counterexample(params);
    out.push(row("fkg-conditioned", "{4,5,1} given 4,5,1 blue, 6 yellow", cond.clone(), closed_forms::fkg_conditioned(params), Relation::Eq));
    out.push(row("fkg-unconditioned", "{4,5,1} given 6 yellow", uncond.clone(), closed_forms::fkg_unconditioned(params), Relation::Eq));
    if params.s().is_zero() {
        out.push(row("fkg-counterexample", "s = 0", cond, uncond, Relation::Eq));
    } else {
        out.push(row("fkg-counterexample", "s > 0", cond, uncond, Relation::Lt));
    }
    out.extend(named_rule_rows(params));
    let mut cache = HashMap::new();
    for (d, dia) in plain_cases() {
        let case = format!("{d} {dia}");
        match solve_star_rules(&d, &dia, params) {
            Ok(table) => {
                let (y, b) = balance_totals(&table, params);
                out.push(row("star-rule-balance", case.clone(), y, b, Relation::Eq));
                match full_flower_better_with(&table, params, &mut cache) {
                    Ok(cmp) => {
                        for c in cmp {
                            out.push(row("full-flower-better", format!("{case} {}", c.color.name()), c.conditioned, c.unconditioned, Relation::Le));
                        }
                    }
                    Err(e) => out.push(failed("full-flower-better", case, e)),
                }
            }
            Err(e) => out.push(failed("star-rule-balance", case, e)),
        }
    }
    for (d, dia) in iris_cases() {
        let case = format!("{d} {dia}");
        match solve_star_rules(&d, &dia, params) {
            Ok(table) => {
                let (y, b) = balance_totals(&table, params);
                out.push(row("star-rule-balance", case, y, b, Relation::Eq));
            }
            Err(e) => out.push(failed("star-rule-balance", case, e)),
        }
    }
    out
}

fn failed(check: &'static str, case: String, e: Error) -> OracleCheck {
    OracleCheck {
        check,
        case: format!("{case}: {e}"),
        lhs: BigRational::zero(),
        rhs: BigRational::zero(),
        relation: Relation::Eq,
        holds: false,
    }
}

/// The three worked permission cases with their stated closed forms.
pub fn named_rule_rows(params: &ModelParams) -> Vec<OracleCheck> {
    let mut out = Vec::new();
    let y = Color::Yellow;
    let b = Color::Blue;
    let pc = |blue: &[u8]| PetalConfig(blue.iter().fold(0, |m, p| m | 1 << (p - 1)));

    let dia = Diamond::new(&[(5, y)]).unwrap();
    let d = PetalSets::new(&[&[1, 2, 4]]).unwrap();
    let eta = pc(&[3, 6]);
    match solve_star_rules(&d, &dia, params).map(|t| t.action(eta, y).cloned()) {
        Ok(Some(RuleAction::ForbidCloseEncounter(p))) => {
            out.push(row("forbid-single-petal", format!("{d} {dia}"), p, closed_forms::forbid_single_petal(params), Relation::Eq))
        }
        Ok(None) if params.s().is_zero() => out.push(row(
            "forbid-single-petal",
            format!("{d} {dia}"),
            BigRational::zero(),
            closed_forms::forbid_single_petal(params),
            Relation::Eq,
        )),
        other => out.push(failed("forbid-single-petal", format!("{d} {dia} gave {other:?}"), Error::BalanceInfeasible("unexpected action".into()))),
    }

    let d = PetalSets::new(&[&[2, 3, 6]]).unwrap();
    let blue_side = pc(&[2, 3, 6]);
    let yellow_side = pc(&[1, 4]);
    let pb = conditional_transmission_prob(&d, &dia, blue_side, b, params, None).unwrap();
    let py = conditional_transmission_prob(&d, &dia, dia.reverse_outside(blue_side), y, params, None).unwrap();
    out.push(row("share-example-blue", format!("{d} {dia}"), pb, rat(1, 2), Relation::Eq));
    out.push(row("share-example-yellow", format!("{d} {dia}"), py, params.a() + params.s(), Relation::Eq));
    match solve_star_rules(&d, &dia, params).map(|t| t.action(yellow_side, y).cloned()) {
        Ok(Some(RuleAction::AllowSharing(p))) => out.push(row("share-example-permission", format!("{d} {dia}"), p, rat(1, 2), Relation::Eq)),
        Ok(None) if params.s().is_zero() => {}
        other => out.push(failed("share-example-permission", format!("{d} {dia} gave {other:?}"), Error::BalanceInfeasible("unexpected action".into()))),
    }

    if params.a() >= params.s() {
        let dia = Diamond::new(&[(1, y), (3, y)]).unwrap().with_iris_ports(1, 3).unwrap();
        let d = PetalSets::new(&[&[4, 6]]).unwrap();
        let eta = pc(&[5]);
        let bar = dia.reverse_outside(eta);
        let ys = params.a() + params.s();
        let blue = conditional_transmission_prob(&d, &dia, bar, b, params, None).unwrap();
        out.push(row("iris-example-blue", format!("{d} {dia}"), blue, params.s() / &ys, Relation::Eq));
        let masses = Masses::new(params);
        let allowed = mode_prob(&masses, &d, &dia, eta, y, Mode::IrisAllowed);
        out.push(row("iris-example-yellow", format!("{d} {dia}"), allowed, params.a() / &ys, Relation::Eq));
        match solve_star_rules(&d, &dia, params).map(|t| t.action(eta, y).cloned()) {
            Ok(Some(RuleAction::AllowIrisUse(p))) => {
                out.push(row("iris-permission", format!("{d} {dia}"), p, closed_forms::iris_permission(params), Relation::Eq))
            }
            Ok(None) if params.s().is_zero() => {}
            other => out.push(failed("iris-permission", format!("{d} {dia} gave {other:?}"), Error::BalanceInfeasible("unexpected action".into()))),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_parallelogram_domain;

    fn p10() -> ModelParams {
        ModelParams::parse("1/10").unwrap()
    }

    fn pc(blue: &[u8]) -> PetalConfig {
        PetalConfig(blue.iter().fold(0, |m, p| m | 1 << (p - 1)))
    }

    #[test]
    fn adjacent_pair_is_a_quarter() {
        let d = PetalSets::new(&[&[1, 2]]).unwrap();
        assert_eq!(transmission_prob(&d, Color::Blue, &p10()), rat(1, 4));
    }

    #[test]
    fn invalid_sets() {
        assert!(PetalSets::new(&[&[1, 2], &[2, 3]]).is_err());
        assert!(PetalSets::new(&[&[7]]).is_err());
        assert!(PetalSets::new(&[&[]]).is_err());
        assert!(Diamond::new(&[(1, Color::Blue), (2, Color::Blue), (3, Color::Blue), (4, Color::Blue), (5, Color::Blue), (6, Color::Blue)]).is_err());
    }

    #[test]
    fn case_counts() {
        assert_eq!(plain_cases().len(), 8876);
        assert_eq!(iris_cases().len(), 2619);
        assert_eq!(PetalSets::all_within(FULL).len(), 876);
    }

    #[test]
    fn inconsistent_petals_are_rejected() {
        let dia = Diamond::new(&[(5, Color::Yellow)]).unwrap();
        let d = PetalSets::new(&[&[1]]).unwrap();
        let err = conditional_transmission_prob(&d, &dia, pc(&[5]), Color::Blue, &p10(), None);
        assert!(matches!(err, Err(Error::InconsistentPetals(_))));
        let overlap = PetalSets::new(&[&[5]]).unwrap();
        assert!(conditional_transmission_prob(&overlap, &dia, pc(&[]), Color::Blue, &p10(), None).is_err());
    }

    #[test]
    fn predetermined_transmission_is_certain() {
        let dia = Diamond::new(&[(4, Color::Yellow)]).unwrap();
        let d = PetalSets::new(&[&[1, 2]]).unwrap();
        let table = solve_star_rules(&d, &dia, &p10()).unwrap();
        let eta = pc(&[1, 2]);
        assert_eq!(conditional_transmission_prob(&d, &dia, eta, Color::Blue, &p10(), Some(&table)).unwrap(), BigRational::one());
    }

    #[test]
    fn all_yellow_diamond_leaves_blue_side_alone() {
        for (d, dia) in plain_cases().into_iter().filter(|(_, dia)| dia.color_mask(Color::Blue) == 0).take(300) {
            let table = solve_star_rules(&d, &dia, &p10()).unwrap();
            assert!(table.entries().all(|((_, c), _)| *c == Color::Yellow));
        }
    }

    #[test]
    fn iris_ports_must_be_yellow_and_apart() {
        let dia = Diamond::new(&[(1, Color::Yellow), (2, Color::Yellow)]).unwrap();
        assert!(dia.clone().with_iris_ports(1, 2).is_err());
        let dia = Diamond::new(&[(1, Color::Blue), (3, Color::Yellow)]).unwrap();
        assert!(dia.with_iris_ports(1, 3).is_err());
    }

    #[test]
    fn path_fkg_on_a_flower_patch() {
        let d = build_hexagon_domain(2).unwrap();
        let arr = FloralArrangement::from_irises(&d, vec![HexCoord::new(0, 0)]).unwrap();
        let ev1 = ConnectionEvent { a: vec![HexCoord::new(1, 0)], b: vec![HexCoord::new(-1, 0)], color: Color::Blue };
        let ev2 = ConnectionEvent { a: vec![HexCoord::new(0, 1)], b: vec![HexCoord::new(0, -1)], color: Color::Blue };
        let check = verify_path_fkg_small(&d, &arr, &[ev1, ev2], &p10()).unwrap();
        assert!(check.holds);
    }

    #[test]
    fn independent_events_factorise() {
        let d = build_parallelogram_domain(4, 2).unwrap();
        let arr = FloralArrangement::empty();
        let ev1 = ConnectionEvent { a: vec![HexCoord::new(0, 0)], b: vec![HexCoord::new(0, 1)], color: Color::Blue };
        let ev2 = ConnectionEvent { a: vec![HexCoord::new(3, 0)], b: vec![HexCoord::new(3, 1)], color: Color::Yellow };
        let check = verify_path_fkg_small(&d, &arr, &[ev1, ev2], &p10()).unwrap();
        assert!(check.holds);
        let (j, l, lhs, rhs) = check.worst.unwrap();
        assert_eq!((j | l, lhs), (3, rhs));
    }
}
