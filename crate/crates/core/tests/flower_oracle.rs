use flowerperc::exact::rat;
use flowerperc::flower::{
    binary_transmitters, closed_forms, conditional_transmission_prob, fkg_counterexample, iris_cases, micro_duality,
    oracle_report, plain_cases, solve_star_rules, tallies, transmission_prob, verify_full_flower_better, Diamond,
    PetalSets, RuleAction,
};
use flowerperc::model::{Color, HexState, ModelParams, PetalConfig};
use num_rational::BigRational;

fn params(s: &str) -> ModelParams {
    ModelParams::parse(s).unwrap()
}

fn pc(blue: &[u8]) -> PetalConfig {
    PetalConfig(blue.iter().fold(0, |m, p| m | 1 << (p - 1)))
}

#[test]
fn worked_tallies_at_one_tenth() {
    let p = params("1/10");
    assert_eq!(tallies::next_nearest_ports(&p), rat(91, 160));
    assert_eq!(tallies::opposite_ports(&p), rat(233, 320));
    assert_eq!(tallies::fkg_conditioned(&p), rat(13, 20));
    assert_eq!(tallies::fkg_unconditioned(&p), rat(419, 640));
    assert_eq!(tallies::through_iris(&p), rat(9, 20));
    assert_eq!(closed_forms::next_nearest_ports(&p), rat(91, 160));
    assert_eq!(closed_forms::opposite_ports(&p), rat(233, 320));
}

#[test]
fn tallies_match_closed_forms_across_s() {
    for s in ["0", "1/40", "1/20", "1/10", "3/20", "54903/320000"] {
        let p = params(s);
        assert_eq!(tallies::next_nearest_ports(&p), closed_forms::next_nearest_ports(&p), "s = {s}");
        assert_eq!(tallies::opposite_ports(&p), closed_forms::opposite_ports(&p), "s = {s}");
        assert_eq!(tallies::fkg_conditioned(&p), closed_forms::fkg_conditioned(&p), "s = {s}");
        assert_eq!(tallies::fkg_unconditioned(&p), closed_forms::fkg_unconditioned(&p), "s = {s}");
    }
}

#[test]
fn fkg_counterexample_is_strict_exactly_when_s_positive() {
    let (c, u) = fkg_counterexample(&params("0"));
    assert_eq!(c, u);
    assert_eq!(c, rat(5, 8));
    for s in ["1/1000", "1/10", "54903/320000"] {
        let (c, u) = fkg_counterexample(&params(s));
        assert!(c < u, "s = {s}");
    }
}

#[test]
fn next_nearest_pair_parity() {
    let p = params("1/10");
    let d = PetalSets::new(&[&[1, 3]]).unwrap();
    assert_eq!(transmission_prob(&d, Color::Blue, &p), rat(251, 1280));
    assert_eq!(transmission_prob(&d, Color::Yellow, &p), rat(251, 1280));
}

#[test]
fn parity_over_every_petal_family() {
    for s in ["1/20", "1/10", "54903/320000"] {
        let p = params(s);
        for d in PetalSets::all_within(63) {
            assert_eq!(transmission_prob(&d, Color::Blue, &p), transmission_prob(&d, Color::Yellow, &p), "{d} at s = {s}");
        }
    }
}

#[test]
fn one_mixed_state_per_non_adjacent_pair() {
    for u in 0..6usize {
        for v in u + 2..6 {
            if (v + 1) % 6 == u {
                continue;
            }
            for c in Color::BOTH {
                assert_eq!(binary_transmitters(u, v, c).len(), 1, "petals {} {} {c:?}", u + 1, v + 1);
            }
        }
    }
}

#[test]
fn flower_duality_holds_for_every_iris_state() {
    for st in HexState::ALL {
        let (ok, total) = micro_duality(st);
        assert!(total > 0);
        assert_eq!(ok, total, "{st:?}");
    }
}

#[test]
fn share_example() {
    let p = params("1/10");
    let dia = Diamond::new(&[(5, Color::Yellow)]).unwrap();
    let d = PetalSets::new(&[&[2, 3, 6]]).unwrap();
    let blue = conditional_transmission_prob(&d, &dia, pc(&[2, 3, 6]), Color::Blue, &p, None).unwrap();
    assert_eq!(blue, rat(1, 2));
    let yellow = conditional_transmission_prob(&d, &dia, pc(&[1, 4]), Color::Yellow, &p, None).unwrap();
    assert_eq!(yellow, rat(9, 20));
    let table = solve_star_rules(&d, &dia, &p).unwrap();
    assert_eq!(table.action(pc(&[1, 4]), Color::Yellow), Some(&RuleAction::AllowSharing(rat(1, 2))));
    let with_rules = conditional_transmission_prob(&d, &dia, pc(&[1, 4]), Color::Yellow, &p, Some(&table)).unwrap();
    assert_eq!(with_rules, rat(1, 2));
}

#[test]
fn forbid_example() {
    let p = params("1/10");
    let dia = Diamond::new(&[(5, Color::Yellow)]).unwrap();
    let d = PetalSets::new(&[&[1, 2, 4]]).unwrap();
    let table = solve_star_rules(&d, &dia, &p).unwrap();
    assert_eq!(table.action(pc(&[3, 6]), Color::Yellow), Some(&RuleAction::ForbidCloseEncounter(rat(1, 11))));
}

#[test]
fn iris_example() {
    let p = params("1/10");
    let dia = Diamond::new(&[(1, Color::Yellow), (3, Color::Yellow)]).unwrap().with_iris_ports(1, 3).unwrap();
    let d = PetalSets::new(&[&[4, 6]]).unwrap();
    let bar = dia.reverse_outside(pc(&[5]));
    let blue = conditional_transmission_prob(&d, &dia, bar, Color::Blue, &p, None).unwrap();
    assert_eq!(blue, rat(2, 9));
    let table = solve_star_rules(&d, &dia, &p).unwrap();
    assert_eq!(table.action(pc(&[5]), Color::Yellow), Some(&RuleAction::AllowIrisUse(rat(2, 7))));
}

fn sweep(s: &str) {
    let p = params(s);
    let mut nontrivial_iris = std::collections::BTreeSet::new();
    for (d, dia) in plain_cases() {
        let cmp = verify_full_flower_better(&d, &dia, &p).unwrap_or_else(|e| panic!("{d} {dia}: {e}"));
        for c in cmp {
            assert!(c.holds, "{d} {dia} {:?}", c.color);
        }
    }
    for (d, dia) in iris_cases() {
        let table = solve_star_rules(&d, &dia, &p).unwrap_or_else(|e| panic!("{d} {dia}: {e}"));
        for (_, a) in table.entries() {
            nontrivial_iris.insert(a.probability().clone());
        }
    }
    let expect: std::collections::BTreeSet<BigRational> = [closed_forms::iris_permission(&p)].into_iter().collect();
    assert_eq!(nontrivial_iris, expect, "s = {s}");
}

#[test]
fn every_case_balances_at_one_tenth() {
    sweep("1/10");
}

#[test]
fn every_case_balances_at_one_twentieth() {
    sweep("1/20");
}

#[test]
fn every_case_balances_near_the_upper_limit() {
    sweep("54903/320000");
}

#[test]
fn report_is_all_green() {
    let rows = oracle_report(&params("1/10"));
    let failed: Vec<_> = rows.iter().filter(|r| !r.holds).map(|r| format!("{} {}", r.check, r.case)).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(rows.iter().any(|r| r.check == "forbid-single-petal" && r.lhs == rat(1, 11)));
    assert!(rows.iter().any(|r| r.check == "iris-permission" && r.lhs == rat(2, 7)));
}
