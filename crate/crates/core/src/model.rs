//! Hexagon states, the flower measure μ and its samplers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Monomial};
use crate::geometry::{Domain, FloralArrangement, NO_HEX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Yellow,
    Blue,
}

impl Color {
    pub const BOTH: [Color; 2] = [Color::Blue, Color::Yellow];

    pub fn opposite(self) -> Color {
        match self {
            Color::Yellow => Color::Blue,
            Color::Blue => Color::Yellow,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Yellow => "yellow",
            Color::Blue => "blue",
        }
    }
}

impl std::str::FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yellow" | "y" => Ok(Color::Yellow),
            "blue" | "b" => Ok(Color::Blue),
            _ => Err(Error::InvalidInput(format!("unknown colour {s:?}"))),
        }
    }
}

/// State of a hexagon. Mixed states split the hexagon along a chord joining
/// two opposite edge midpoints; the three mixed states differ by 120°.
///
/// The blue half of a mixed hexagon contains corners `k0, k0+1, k0+2` and so
/// touches edges `k0..=k0+3`: α has `k0 = 0` (petals 1–4), β has `k0 = 2`
/// (petals 3–6) and γ has `k0 = 4` (petals 5, 6, 1, 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HexState {
    PureYellow,
    PureBlue,
    MixedAlpha,
    MixedBeta,
    MixedGamma,
}

impl HexState {
    pub const ALL: [HexState; 5] =
        [HexState::PureYellow, HexState::PureBlue, HexState::MixedAlpha, HexState::MixedBeta, HexState::MixedGamma];
    pub const MIXED: [HexState; 3] = [HexState::MixedAlpha, HexState::MixedBeta, HexState::MixedGamma];

    pub fn pure(c: Color) -> HexState {
        match c {
            Color::Yellow => HexState::PureYellow,
            Color::Blue => HexState::PureBlue,
        }
    }

    pub fn is_mixed(self) -> bool {
        !matches!(self, HexState::PureYellow | HexState::PureBlue)
    }

    pub fn pure_color(self) -> Option<Color> {
        match self {
            HexState::PureYellow => Some(Color::Yellow),
            HexState::PureBlue => Some(Color::Blue),
            _ => None,
        }
    }

    /// First corner of the blue half of a mixed state.
    pub fn blue_start(self) -> Option<usize> {
        match self {
            HexState::MixedAlpha => Some(0),
            HexState::MixedBeta => Some(2),
            HexState::MixedGamma => Some(4),
            _ => None,
        }
    }

    fn from_blue_start(k0: usize) -> Option<HexState> {
        match k0 % 6 {
            0 => Some(HexState::MixedAlpha),
            2 => Some(HexState::MixedBeta),
            4 => Some(HexState::MixedGamma),
            _ => None,
        }
    }

    /// Colour of the part of the hexagon containing corner `j`.
    pub fn corner_color(self, j: usize) -> Color {
        match (self.pure_color(), self.blue_start()) {
            (Some(c), _) => c,
            (None, Some(k0)) => {
                if (j + 6 - k0) % 6 < 3 {
                    Color::Blue
                } else {
                    Color::Yellow
                }
            }
            _ => unreachable!(),
        }
    }

    /// Part index of corner `j`: 0 for a pure hexagon or the blue half, 1 for the yellow half.
    pub fn corner_part(self, j: usize) -> usize {
        if self.is_mixed() && self.corner_color(j) == Color::Yellow {
            1
        } else {
            0
        }
    }

    /// Colour of part `p` (see [`HexState::corner_part`]).
    pub fn part_color(self, p: usize) -> Color {
        match self.pure_color() {
            Some(c) => c,
            None if p == 0 => Color::Blue,
            None => Color::Yellow,
        }
    }

    pub fn parts(self) -> usize {
        if self.is_mixed() {
            2
        } else {
            1
        }
    }

    /// Whether some part of colour `c` meets edge `k` (petal `k + 1`).
    pub fn touches(self, c: Color, k: usize) -> bool {
        self.corner_color((k + 5) % 6) == c || self.corner_color(k % 6) == c
    }

    /// Image under reflection in the y-axis (edge `k ↦ 3 − k`).
    pub fn reflect_y(self) -> HexState {
        match self.blue_start() {
            None => self,
            Some(k0) => HexState::from_blue_start((6 - k0) % 6).unwrap(),
        }
    }

    /// Image under reflection in the x-axis followed by swapping colours.
    pub fn reflect_x_swap(self) -> HexState {
        match self.blue_start() {
            None => HexState::pure(self.pure_color().unwrap().opposite()),
            Some(k0) => HexState::from_blue_start((6 - k0) % 6).unwrap(),
        }
    }
}

/// Colours of the six petals around an iris. Bit `k` is set when petal `k + 1` is blue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PetalConfig(pub u8);

impl PetalConfig {
    pub fn from_colors(c: [Color; 6]) -> Self {
        let mut m = 0u8;
        for (k, col) in c.iter().enumerate() {
            if *col == Color::Blue {
                m |= 1 << k;
            }
        }
        PetalConfig(m)
    }

    pub fn all() -> impl Iterator<Item = PetalConfig> {
        (0u8..64).map(PetalConfig)
    }

    /// Colour of the petal in direction `k` (petal `k + 1`).
    pub fn color(self, k: usize) -> Color {
        if self.0 >> k & 1 == 1 {
            Color::Blue
        } else {
            Color::Yellow
        }
    }

    pub fn with(self, k: usize, c: Color) -> PetalConfig {
        match c {
            Color::Blue => PetalConfig(self.0 | 1 << k),
            Color::Yellow => PetalConfig(self.0 & !(1 << k)),
        }
    }

    pub fn flipped(self) -> PetalConfig {
        PetalConfig(!self.0 & 63)
    }

    pub fn count(self, c: Color) -> usize {
        (0..6).filter(|&k| self.color(k) == c).count()
    }

    /// Exactly three yellow petals with exactly one cyclically adjacent yellow pair.
    pub fn is_trigger(self) -> bool {
        if self.count(Color::Yellow) != 3 {
            return false;
        }
        let pairs = (0..6)
            .filter(|&k| self.color(k) == Color::Yellow && self.color((k + 1) % 6) == Color::Yellow)
            .count();
        pairs == 1
    }
}

/// Validated model parameter `s` together with `a = (1 − 3s)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    s: BigRational,
    a: BigRational,
    s_f: f64,
    a_f: f64,
}

pub fn s_max() -> f64 {
    3.0 - 2.0 * std::f64::consts::SQRT_2
}

impl ModelParams {
    /// Accepts `s ≥ 0` with `a ≥ 0` and `a² ≥ 2s²`, i.e. `0 ≤ s ≤ 3 − 2√2`.
    pub fn new(s: BigRational) -> Result<Self> {
        let a = (BigRational::one() - rat3() * &s) / BigRational::from_integer(BigInt::from(2));
        if s.is_negative() {
            return Err(Error::InvalidParams(format!("s = {} is negative", exact::fmt_ratio(&s))));
        }
        if a.is_negative() || &a * &a < BigRational::from_integer(BigInt::from(2)) * &s * &s {
            return Err(Error::InvalidParams(format!(
                "s = {} violates a^2 >= 2 s^2 (requires s <= 3 - 2*sqrt(2) ~ {:.9})",
                exact::fmt_ratio(&s),
                s_max()
            )));
        }
        let s_f = exact::to_f64(&s);
        let a_f = exact::to_f64(&a);
        Ok(Self { s, a, s_f, a_f })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(exact::parse_rational(s)?)
    }

    pub fn from_f64(s: f64) -> Result<Self> {
        Self::new(exact::rational_from_f64(s)?)
    }

    pub fn s(&self) -> &BigRational {
        &self.s
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn s_f64(&self) -> f64 {
        self.s_f
    }

    pub fn a_f64(&self) -> f64 {
        self.a_f
    }

    pub fn monomial(&self, m: Monomial) -> BigRational {
        m.eval(&self.a, &self.s)
    }
}

fn rat3() -> BigRational {
    BigRational::from_integer(BigInt::from(3))
}

/// The support of the iris given its petals with the weight of each state as a monomial.
pub fn iris_support(p: PetalConfig) -> Vec<(HexState, Monomial)> {
    if p.is_trigger() {
        let half = Monomial { half: 1, a: 0, s: 0 };
        vec![(HexState::PureYellow, half), (HexState::PureBlue, half)]
    } else {
        let a = Monomial { half: 0, a: 1, s: 0 };
        let s = Monomial { half: 0, a: 0, s: 1 };
        vec![
            (HexState::PureYellow, a),
            (HexState::PureBlue, a),
            (HexState::MixedAlpha, s),
            (HexState::MixedBeta, s),
            (HexState::MixedGamma, s),
        ]
    }
}

/// Conditional law of the iris given its petals, as exact probabilities.
pub fn iris_law(p: PetalConfig, params: &ModelParams) -> Vec<(HexState, BigRational)> {
    iris_support(p).into_iter().map(|(h, m)| (h, params.monomial(m))).collect()
}

/// Probability of `state` for an iris with petals `p` (zero off the support).
pub fn iris_prob(p: PetalConfig, state: HexState, params: &ModelParams) -> BigRational {
    iris_law(p, params).into_iter().find(|(h, _)| *h == state).map_or_else(BigRational::zero, |(_, w)| w)
}

/// States of all hexagons of a domain, indexed like [`Domain::hexes`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub states: Vec<HexState>,
}

impl Configuration {
    pub fn uniform(n: usize, state: HexState) -> Self {
        Self { states: vec![state; n] }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

}

/// Iris bookkeeping shared by the sampler, the weight function and the enumerator.
#[derive(Clone, Debug)]
pub struct FlowerLayout {
    /// `(iris hex index, petal hex indices in direction order)`.
    pub irises: Vec<(u32, [u32; 6])>,
    pub non_iris: Vec<u32>,
    pub is_iris: Vec<bool>,
}

impl FlowerLayout {
    pub fn new(domain: &Domain, arr: &FloralArrangement) -> Result<Self> {
        let violations = arr.validate(domain);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidArrangement(format!("{v:?}")));
        }
        let mut is_iris = vec![false; domain.len()];
        let mut irises = Vec::with_capacity(arr.len());
        for &h in arr.irises() {
            let i = domain.index_of(h).expect("validated");
            is_iris[i] = true;
            let petals: [u32; 6] = std::array::from_fn(|k| domain.neighbor_index(i, k));
            debug_assert!(!petals.contains(&NO_HEX));
            irises.push((i as u32, petals));
        }
        let non_iris = (0..domain.len() as u32).filter(|&i| !is_iris[i as usize]).collect();
        Ok(Self { irises, non_iris, is_iris })
    }

    pub fn petals_of(&self, config: &Configuration, petals: &[u32; 6]) -> Option<PetalConfig> {
        let mut m = 0u8;
        for (k, &p) in petals.iter().enumerate() {
            match config.states[p as usize] {
                HexState::PureBlue => m |= 1 << k,
                HexState::PureYellow => {}
                _ => return None,
            }
        }
        Some(PetalConfig(m))
    }
}

/// Draws configurations from μ on a fixed domain and arrangement.
#[derive(Clone, Debug)]
pub struct Sampler {
    layout: FlowerLayout,
    trigger_cut: f64,
    cuts: [f64; 4],
}

impl Sampler {
    pub fn new(domain: &Domain, arr: &FloralArrangement, params: &ModelParams) -> Result<Self> {
        let layout = FlowerLayout::new(domain, arr)?;
        let (a, s) = (params.a_f64(), params.s_f64());
        Ok(Self { layout, trigger_cut: 0.5, cuts: [a, 2.0 * a, 2.0 * a + s, 2.0 * a + 2.0 * s] })
    }

    pub fn layout(&self) -> &FlowerLayout {
        &self.layout
    }

    pub fn blank(&self) -> Configuration {
        Configuration::uniform(self.layout.is_iris.len(), HexState::PureYellow)
    }

    /// Overwrites `out` with a fresh sample.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut Configuration) {
        out.states.resize(self.layout.is_iris.len(), HexState::PureYellow);
        for chunk in self.layout.non_iris.chunks(64) {
            let bits: u64 = rng.gen();
            for (j, &i) in chunk.iter().enumerate() {
                out.states[i as usize] = if bits >> j & 1 == 1 { HexState::PureBlue } else { HexState::PureYellow };
            }
        }
        for (iris, petals) in &self.layout.irises {
            let p = self.layout.petals_of(out, petals).expect("petals are pure");
            let u: f64 = rng.gen();
            out.states[*iris as usize] = if p.is_trigger() {
                if u < self.trigger_cut {
                    HexState::PureYellow
                } else {
                    HexState::PureBlue
                }
            } else if u < self.cuts[0] {
                HexState::PureYellow
            } else if u < self.cuts[1] {
                HexState::PureBlue
            } else if u < self.cuts[2] {
                HexState::MixedAlpha
            } else if u < self.cuts[3] {
                HexState::MixedBeta
            } else {
                HexState::MixedGamma
            };
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Configuration {
        let mut c = self.blank();
        self.sample_into(rng, &mut c);
        c
    }
}

/// One configuration drawn from μ with a ChaCha generator seeded by `seed`.
pub fn sample_configuration(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    seed: u64,
) -> Result<Configuration> {
    let sampler = Sampler::new(domain, arr, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sampler.sample(&mut rng))
}

/// Weight of `config` under μ as a monomial, or an error off the support.
pub fn config_monomial(domain: &Domain, arr: &FloralArrangement, config: &Configuration) -> Result<Monomial> {
    let layout = FlowerLayout::new(domain, arr)?;
    if config.len() != domain.len() {
        return Err(Error::InvalidInput(format!(
            "configuration has {} states for {} hexagons",
            config.len(),
            domain.len()
        )));
    }
    let mut m = Monomial { half: layout.non_iris.len() as u32, a: 0, s: 0 };
    for &i in &layout.non_iris {
        if config.states[i as usize].is_mixed() {
            return Err(Error::OutsideSupport(format!("non-iris hexagon {:?} is mixed", domain.hex(i as usize))));
        }
    }
    for (iris, petals) in &layout.irises {
        let p = layout.petals_of(config, petals).expect("petals are non-iris");
        let state = config.states[*iris as usize];
        match iris_support(p).into_iter().find(|(h, _)| *h == state) {
            Some((_, w)) => m = m.times(w),
            None => {
                return Err(Error::OutsideSupport(format!(
                    "iris {:?} is {state:?} next to a trigger configuration",
                    domain.hex(*iris as usize)
                )))
            }
        }
    }
    Ok(m)
}

pub fn config_weight(
    domain: &Domain,
    arr: &FloralArrangement,
    config: &Configuration,
    params: &ModelParams,
) -> Result<BigRational> {
    Ok(params.monomial(config_monomial(domain, arr, config)?))
}

pub const DEFAULT_ENUMERATION_CAP: usize = 22;

/// Exhaustive walk over the support of μ on a small domain.
#[derive(Clone, Debug)]
pub struct Enumerator {
    layout: FlowerLayout,
    n: usize,
}

impl Enumerator {
    pub fn new(domain: &Domain, arr: &FloralArrangement, cap: usize) -> Result<Self> {
        let layout = FlowerLayout::new(domain, arr)?;
        if layout.non_iris.len() > cap || layout.irises.len() > 2 {
            return Err(Error::EnumerationTooLarge {
                non_iris: layout.non_iris.len(),
                irises: layout.irises.len(),
                cap,
            });
        }
        Ok(Self { layout, n: domain.len() })
    }

    /// Calls `f` once per support configuration with its weight.
    pub fn for_each<F: FnMut(&Configuration, Monomial)>(&self, mut f: F) {
        let nn = self.layout.non_iris.len();
        let base = Monomial { half: nn as u32, a: 0, s: 0 };
        let mut config = Configuration::uniform(self.n, HexState::PureYellow);
        for mask in 0u64..(1u64 << nn) {
            for (j, &i) in self.layout.non_iris.iter().enumerate() {
                config.states[i as usize] =
                    if mask >> j & 1 == 1 { HexState::PureBlue } else { HexState::PureYellow };
            }
            let supports: Vec<Vec<(HexState, Monomial)>> = self
                .layout
                .irises
                .iter()
                .map(|(_, petals)| iris_support(self.layout.petals_of(&config, petals).unwrap()))
                .collect();
            self.recurse(&supports, 0, base, &mut config, &mut f);
        }
    }

    fn recurse<F: FnMut(&Configuration, Monomial)>(
        &self,
        supports: &[Vec<(HexState, Monomial)>],
        depth: usize,
        w: Monomial,
        config: &mut Configuration,
        f: &mut F,
    ) {
        if depth == supports.len() {
            f(config, w);
            return;
        }
        let iris = self.layout.irises[depth].0 as usize;
        for &(state, m) in &supports[depth] {
            config.states[iris] = state;
            self.recurse(supports, depth + 1, w.times(m), config, f);
        }
    }
}

pub fn enumerate_configurations(domain: &Domain, arr: &FloralArrangement, cap: usize) -> Result<Enumerator> {
    Enumerator::new(domain, arr, cap)
}
