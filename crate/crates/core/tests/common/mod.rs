//! Exact enumeration oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;

use flowerperc::connectivity::{has_crossing, ring_event, separation_event, RegionGraph, SeparationPair};
use flowerperc::engine::Engine;
use flowerperc::estimator::{estimate_events, Estimate, EventSpec};
use flowerperc::exact::{to_f64, ExactSum};
use flowerperc::flower::flower_domain;
use flowerperc::geometry::{build_annulus_domain, build_parallelogram_domain, build_triangle_domain};
use flowerperc::model::{enumerate_configurations, Configuration, Sampler, DEFAULT_ENUMERATION_CAP};
use flowerperc::{ArcName, Color, Domain, FloralArrangement, HexCoord, HexState, ModelParams};

pub fn params(s: &str) -> ModelParams {
    ModelParams::parse(s).unwrap()
}

/// Exact probability of each indicator under μ, by walking the support.
pub fn exact_probs(
    domain: &Domain,
    arr: &FloralArrangement,
    params: &ModelParams,
    k: usize,
    indicators: impl Fn(&Configuration) -> Vec<bool>,
) -> Vec<f64> {
    let en = enumerate_configurations(domain, arr, DEFAULT_ENUMERATION_CAP).unwrap();
    let mut sums = vec![ExactSum::new(); k];
    let mut total = ExactSum::new();
    en.for_each(|c, m| {
        total.add(m);
        for (s, hit) in sums.iter_mut().zip(indicators(c)) {
            if hit {
                s.add(m);
            }
        }
    });
    assert_eq!(to_f64(&total.eval(params.a(), params.s())), 1.0);
    sums.iter().map(|s| to_f64(&s.eval(params.a(), params.s()))).collect()
}

/// An event on a small domain with its enumerated probability.
pub struct SmallCase {
    pub name: &'static str,
    pub domain: Domain,
    pub arr: FloralArrangement,
    pub events: Vec<EventSpec>,
    pub exact: Vec<f64>,
}

/// Crossing, separation and ring events on domains of at most 22 hexagons.
pub fn small_cases(p: &ModelParams) -> Vec<SmallCase> {
    let mut out = Vec::new();

    let d = build_parallelogram_domain(4, 4).unwrap();
    let arr = FloralArrangement::from_irises(&d, vec![HexCoord::new(1, 1)]).unwrap();
    let crossings = [
        (ArcName::A, ArcName::B, Color::Blue),
        (ArcName::A, ArcName::B, Color::Yellow),
        (ArcName::C, ArcName::D, Color::Blue),
        (ArcName::C, ArcName::D, Color::Yellow),
    ];
    let exact = exact_probs(&d, &arr, p, crossings.len(), |c| {
        let g = RegionGraph::build(&d, c).unwrap();
        crossings.iter().map(|&(a, b, col)| has_crossing(&d, &g, a, b, col).unwrap()).collect()
    });
    let events = crossings.iter().map(|&(from, to, color)| EventSpec::Crossing { from, to, color }).collect();
    out.push(SmallCase { name: "parallelogram 4x4", domain: d, arr, events, exact });

    let d = build_triangle_domain(4).unwrap();
    let arr = FloralArrangement::from_irises(&d, vec![HexCoord::new(1, 1)]).unwrap();
    let seps = [
        (HexCoord::new(1, 1).corner(0), SeparationPair::U, Color::Blue),
        (HexCoord::new(1, 1).corner(3), SeparationPair::V, Color::Yellow),
        (HexCoord::new(0, 2).corner(1), SeparationPair::W, Color::Blue),
        (HexCoord::new(2, 0).corner(2), SeparationPair::U, Color::Yellow),
        (HexCoord::new(1, 2).corner(5), SeparationPair::W, Color::Yellow),
    ];
    let exact = exact_probs(&d, &arr, p, seps.len(), |c| {
        seps.iter().map(|&(v, pair, col)| separation_event(&d, c, v, pair, col).unwrap()).collect()
    });
    let events = seps.iter().map(|&(vertex, pair, color)| EventSpec::Separation { vertex, pair, color }).collect();
    out.push(SmallCase { name: "triangle N=4", domain: d, arr, events, exact });

    let d = build_annulus_domain(1, 2).unwrap();
    let arr = FloralArrangement::empty();
    let exact = exact_probs(&d, &arr, p, 2, |c| {
        let g = RegionGraph::build(&d, c).unwrap();
        vec![ring_event(&d, &g, Color::Blue).unwrap(), ring_event(&d, &g, Color::Yellow).unwrap()]
    });
    let events = vec![EventSpec::Ring { color: Color::Blue }, EventSpec::Ring { color: Color::Yellow }];
    out.push(SmallCase { name: "annulus 1..2", domain: d, arr, events, exact });
    out
}

pub struct EventComparison {
    pub label: String,
    pub exact: f64,
    pub estimate: Estimate,
}

impl EventComparison {
    /// Deviation in units of the exact binomial standard error.
    pub fn z(&self) -> f64 {
        let sd = (self.exact * (1.0 - self.exact) / self.estimate.n as f64).sqrt();
        let dev = (self.estimate.mean - self.exact).abs();
        if sd == 0.0 {
            if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            dev / sd
        }
    }
}

pub fn compare_small_cases(p: &ModelParams, n: u64, seed: u64) -> Vec<EventComparison> {
    let mut out = Vec::new();
    for (i, case) in small_cases(p).into_iter().enumerate() {
        let est = estimate_events(&case.domain, &case.arr, p, &case.events, n, seed + i as u64, &Engine::new(0)).unwrap();
        for ((e, x), ev) in est.into_iter().zip(case.exact).zip(&case.events) {
            out.push(EventComparison { label: format!("{} {}", case.name, ev.label()), exact: x, estimate: e });
        }
    }
    out
}

fn encode(c: &Configuration) -> usize {
    c.states.iter().fold(0, |acc, s| acc * 5 + HexState::ALL.iter().position(|t| t == s).unwrap())
}

pub struct ClassCheck {
    pub classes: usize,
    pub worst_z: f64,
    pub outside_support: u64,
}

/// Empirical frequency of every one-flower configuration against its exact weight.
pub fn one_flower_classes(p: &ModelParams, n: u64, seed: u64) -> ClassCheck {
    let d = flower_domain();
    let arr = FloralArrangement::from_irises(&d, vec![HexCoord::new(0, 0)]).unwrap();
    let en = enumerate_configurations(&d, &arr, DEFAULT_ENUMERATION_CAP).unwrap();
    let mut exact: HashMap<usize, f64> = HashMap::new();
    en.for_each(|c, m| {
        *exact.entry(encode(c)).or_insert(0.0) += to_f64(&m.eval(p.a(), p.s()));
    });
    let sampler = Sampler::new(&d, &arr, p).unwrap();
    let counts: Vec<u64> = Engine::new(0).run(
        n,
        seed,
        || sampler.blank(),
        || vec![0u64; 5usize.pow(d.len() as u32)],
        |c, acc, rng| {
            sampler.sample_into(rng, c);
            acc[encode(c)] += 1;
        },
    );
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    for (code, &k) in counts.iter().enumerate() {
        match exact.get(&code) {
            Some(&w) => {
                let z = (k as f64 / n as f64 - w).abs() / (w * (1.0 - w) / n as f64).sqrt();
                worst = worst.max(z);
            }
            None => outside += k,
        }
    }
    ClassCheck { classes: exact.len(), worst_z: worst, outside_support: outside }
}
