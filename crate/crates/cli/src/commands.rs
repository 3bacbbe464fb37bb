use std::fs;

use anyhow::Context;
use flowerperc::cardy::h_triple;
use flowerperc::connectivity::SeparationPair;
use flowerperc::engine::Engine;
use flowerperc::estimator::{
    arm_decay_study, cardy_study, contour_rows, discrete_contour_integral, rsw_study, CardyRow, Contour,
};
use flowerperc::exact::fmt_ratio;
use flowerperc::flower::oracle_report;
use flowerperc::geometry::{build_hexagon_domain, build_parallelogram_domain, build_triangle_domain, SQRT3};
use flowerperc::model::sample_configuration;
use flowerperc::render::{config_to_json, render_svg, Highlight, RenderOptions, MAX_RENDER_HEXES};
use flowerperc::{Color, Configuration, Domain, FloralArrangement, HexCoord, HexState};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{invalid, resolve, Defaults, ExperimentConfig, Resolved};
use crate::report::{experiment_id, prepare_out, write_csv, write_manifest, Row};

/// What a command reports back to `main`.
pub struct Finished {
    /// Failed property checks; a non-empty list gives exit status 3.
    pub failures: Vec<String>,
}

fn setup(command: &str, cfg: ExperimentConfig, d: Defaults) -> anyhow::Result<(Resolved, Engine)> {
    let r = resolve(command, cfg, d)?;
    prepare_out(&r.out)?;
    write_manifest(&r, command)?;
    let engine = Engine::new(r.workers);
    Ok((r, engine))
}

fn s_label(r: &Resolved) -> String {
    fmt_ratio(r.params.s())
}

#[derive(Serialize)]
struct OracleRow {
    check: &'static str,
    case: String,
    lhs: String,
    relation: &'static str,
    rhs: String,
    holds: bool,
}

pub fn oracle_verify(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (r, _) = setup("oracle-verify", cfg, Defaults { n_mesh: &[1], samples: 1 })?;
    let rows = oracle_report(&r.params);
    let csv: Vec<OracleRow> = rows
        .iter()
        .map(|c| OracleRow {
            check: c.check,
            case: c.case.clone(),
            lhs: fmt_ratio(&c.lhs),
            relation: c.relation.symbol(),
            rhs: fmt_ratio(&c.rhs),
            holds: c.holds,
        })
        .collect();
    let path = write_csv(&r.out, "oracle.csv", &csv)?;
    let failures: Vec<String> = rows.iter().filter(|c| !c.holds).map(|c| format!("{}: {}", c.check, c.case)).collect();
    println!("{} exact checks at s = {}, {} failed; wrote {}", rows.len(), s_label(&r), failures.len(), path.display());
    Ok(Finished { failures })
}

#[derive(Serialize)]
struct FieldRow {
    #[serde(rename = "N")]
    size: u32,
    q: i32,
    r: i32,
    up: bool,
    x: f64,
    y: f64,
    u: f64,
    u_stderr: f64,
    v: f64,
    v_stderr: f64,
    w: f64,
    w_stderr: f64,
    h_c: f64,
    h_a: f64,
    h_b: f64,
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn contour_summary(r: &Resolved, id: &str, rows: &[CardyRow]) -> Vec<Row> {
    contour_rows(rows)
        .into_iter()
        .map(|c| Row {
            experiment_id: id.to_string(),
            size: c.n,
            s: s_label(r),
            event: format!("contour-{}", c.combination),
            mean: c.value.norm(),
            stderr: c.value.stderr,
            n: c.value.n,
        })
        .collect()
}

pub fn cardy(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (r, engine) = setup("cardy", cfg, Defaults { n_mesh: &[30], samples: 10_000 })?;
    let rows = cardy_study(&r.ns, &r.params, r.period, r.samples, r.seed, &engine)?;
    let id = experiment_id(&r, "cardy");
    let mut field = Vec::new();
    let mut summary = Vec::new();
    for row in &rows {
        let f = &row.outcome.field;
        for (i, v) in f.vertices.iter().enumerate() {
            let (x, y) = f.scaled_position(i);
            let [u, vv, w] = SeparationPair::ALL.map(|p| f.neutral(i, p));
            let (h_a, h_b, h_c) = flowerperc::cardy::TrianglePoint::new(x, y).map(h_triple).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            field.push(FieldRow {
                size: row.n,
                q: v.q,
                r: v.r,
                up: v.up,
                x,
                y,
                u: u.mean,
                u_stderr: u.stderr,
                v: vv.mean,
                v_stderr: vv.stderr,
                w: w.mean,
                w_stderr: w.stderr,
                h_c,
                h_a,
                h_b,
            });
        }
        for (k, pair) in SeparationPair::ALL.into_iter().enumerate() {
            let e = &row.errors[k];
            for (what, value) in [("max-error", e.max_abs()), ("l2-error", e.l2())] {
                summary.push(Row {
                    experiment_id: id.clone(),
                    size: row.n,
                    s: s_label(&r),
                    event: format!("{}-{what}", pair.name()),
                    mean: value,
                    stderr: e.max_stderr(),
                    n: row.samples,
                });
            }
        }
        summary.push(Row {
            experiment_id: id.clone(),
            size: row.n,
            s: s_label(&r),
            event: "max-sum-deviation".into(),
            mean: row.max_sum_deviation,
            stderr: 0.0,
            n: row.samples,
        });
    }
    summary.extend(contour_summary(&r, &id, &rows));
    write_csv(&r.out, "cardy_field.csv", &field)?;
    let path = write_csv(&r.out, "cardy_summary.csv", &summary)?;
    for row in &rows {
        println!(
            "N={:>3}  max|u-h_C| {:.4}  max|v-h_A| {:.4}  max|w-h_B| {:.4}  max|u+v+w-1| {:.4}",
            row.n,
            row.errors[0].max_abs(),
            row.errors[1].max_abs(),
            row.errors[2].max_abs(),
            row.max_sum_deviation
        );
    }
    println!("wrote {}", path.display());
    let mut failures = Vec::new();
    if r.cfg.check.unwrap_or(false) {
        let errs: Vec<f64> = rows.iter().map(|x| x.errors[0].max_abs()).collect();
        if !nonincreasing(&errs) {
            failures.push(format!("max u error is not nonincreasing in N: {errs:?}"));
        }
        let sums: Vec<f64> = rows.iter().map(|x| x.max_sum_deviation).collect();
        if !nonincreasing(&sums) {
            failures.push(format!("u+v+w deviation is not nonincreasing in N: {sums:?}"));
        }
    }
    Ok(Finished { failures })
}

pub fn crossing(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (mut r, engine) = setup("crossing", cfg, Defaults { n_mesh: &[20, 40, 80], samples: 10_000 })?;
    let aspect = *r.cfg.aspect.get_or_insert(SQRT3 / 2.0);
    if !(aspect.is_finite() && aspect > 0.0) {
        return Err(invalid("--aspect must be positive"));
    }
    write_manifest(&r, "crossing")?;
    let rows = rsw_study(&[aspect], &r.ns, &r.params, r.period, r.color, r.samples, r.seed, &engine)?;
    let id = experiment_id(&r, "crossing");
    let csv: Vec<Row> = rows
        .iter()
        .map(|x| Row {
            experiment_id: id.clone(),
            size: x.n,
            s: s_label(&r),
            event: format!("easy-crossing-{}-aspect-{aspect:.4}", r.color.name()),
            mean: x.easy.mean,
            stderr: x.easy.stderr,
            n: x.easy.n,
        })
        .collect();
    let path = write_csv(&r.out, "crossing.csv", &csv)?;
    for x in &rows {
        println!("N={:>3}  easy {:.4} ± {:.4}  hard {:.4} ± {:.4}", x.n, x.easy.mean, x.easy.stderr, x.hard.mean, x.hard.stderr);
    }
    println!("wrote {}", path.display());
    Ok(Finished { failures: Vec::new() })
}

pub fn arms(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (mut r, engine) = setup("arms", cfg, Defaults { n_mesh: &[8, 16, 32, 64], samples: 10_000 })?;
    let m = *r.cfg.m.get_or_insert(1);
    write_manifest(&r, "arms")?;
    let study = arm_decay_study(&r.ns, m, &r.params, r.period, r.samples, r.seed, &engine).map_err(|e| invalid(e.to_string()))?;
    let id = experiment_id(&r, "arms");
    let mut csv: Vec<Row> = study
        .rows
        .iter()
        .map(|x| Row {
            experiment_id: id.clone(),
            size: x.n,
            s: s_label(&r),
            event: format!("one-arm-blue-m{m}"),
            mean: x.estimate.mean,
            stderr: x.estimate.stderr,
            n: x.estimate.n,
        })
        .collect();
    csv.push(Row {
        experiment_id: id.clone(),
        size: 0,
        s: s_label(&r),
        event: "log-log-slope".into(),
        mean: study.slope.unwrap_or(f64::NAN),
        stderr: study.slope_stderr.unwrap_or(f64::NAN),
        n: study.rows.iter().filter(|x| !x.censored).count() as u64,
    });
    let path = write_csv(&r.out, "arms.csv", &csv)?;
    for x in &study.rows {
        println!("n={:>3}  pi1 {:.4} ± {:.4}", x.n, x.estimate.mean, x.estimate.stderr);
    }
    if let (Some(b), Some(se)) = (study.slope, study.slope_stderr) {
        println!("slope {b:.4} ± {se:.4}");
    }
    println!("wrote {}", path.display());
    Ok(Finished { failures: Vec::new() })
}

pub fn contour(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (r, engine) = setup("contour", cfg, Defaults { n_mesh: &[15, 60], samples: 10_000 })?;
    let id = experiment_id(&r, "contour");
    let mut failures = Vec::new();
    let csv = if r.cfg.self_test.unwrap_or(false) {
        let mut out = Vec::new();
        for &n in &r.ns {
            let d = build_triangle_domain(n).map_err(|e| invalid(e.to_string()))?;
            let c = Contour::centered_triangle(&d)?;
            let value = discrete_contour_integral(|_| Some(Complex64::new(1.0, 0.0)), &c, d.mesh())?;
            if value.norm() > 1e-12 {
                failures.push(format!("constant field integrates to {value} at N={n}"));
            }
            out.push(Row {
                experiment_id: id.clone(),
                size: n,
                s: s_label(&r),
                event: "self-test-constant".into(),
                mean: value.norm(),
                stderr: 0.0,
                n: 0,
            });
        }
        out
    } else {
        let rows = cardy_study(&r.ns, &r.params, r.period, r.samples, r.seed, &engine)?;
        let out = contour_summary(&r, &id, &rows);
        if r.cfg.check.unwrap_or(false) && rows.len() >= 2 {
            let (a, b) = (&rows[0].outcome.integrals[0][0], &rows[rows.len() - 1].outcome.integrals[0][0]);
            if a.norm() - b.norm() <= 2.0 * a.stderr.hypot(b.stderr) {
                failures.push(format!("|I| does not decrease beyond 2σ: {:.4} -> {:.4}", a.norm(), b.norm()));
            }
        }
        out
    };
    for x in &csv {
        println!("N={:>3}  {}  {:.3e} ± {:.3e}", x.size, x.event, x.mean, x.stderr);
    }
    let path = write_csv(&r.out, "contour.csv", &csv)?;
    println!("wrote {}", path.display());
    Ok(Finished { failures })
}

fn render_domain(shape: &str, n: u32) -> anyhow::Result<Domain> {
    let d = match shape {
        "triangle" => build_triangle_domain(n),
        "hexagon" => build_hexagon_domain(n),
        "rhombus" => build_parallelogram_domain(n, n),
        "flower" => build_hexagon_domain(1),
        other => return Err(invalid(format!("unknown shape {other:?} (triangle, hexagon, rhombus, flower)"))),
    };
    d.map_err(|e| invalid(e.to_string()))
}

fn parse_state(name: &str) -> anyhow::Result<HexState> {
    Ok(match name {
        "alpha" => HexState::MixedAlpha,
        "beta" => HexState::MixedBeta,
        "gamma" => HexState::MixedGamma,
        "blue" => HexState::PureBlue,
        "yellow" => HexState::PureYellow,
        other => return Err(invalid(format!("unknown hexagon state {other:?}"))),
    })
}

fn parse_highlight(text: &str, default: Color) -> anyhow::Result<Highlight> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || invalid(format!("bad --highlight {text:?}; expected q,r or q,r,colour"));
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let q = parts[0].parse().map_err(|_| bad())?;
    let r = parts[1].parse().map_err(|_| bad())?;
    let color = match parts.get(2) {
        Some(c) => c.parse().map_err(|_| bad())?,
        None => default,
    };
    Ok(Highlight { hex: HexCoord::new(q, r), color })
}

pub fn render(cfg: ExperimentConfig) -> anyhow::Result<Finished> {
    let (mut r, _) = setup("render", cfg, Defaults { n_mesh: &[12], samples: 1 })?;
    let shape = r.cfg.shape.get_or_insert_with(|| "triangle".into()).clone();
    write_manifest(&r, "render")?;
    let domain = render_domain(&shape, r.ns[0])?;
    if domain.len() > MAX_RENDER_HEXES {
        return Err(invalid(format!("domain has {} hexagons; the renderer accepts at most {MAX_RENDER_HEXES}", domain.len())));
    }
    let arr = if shape == "flower" {
        FloralArrangement::from_irises(&domain, vec![HexCoord::new(0, 0)])?
    } else {
        FloralArrangement::periodic(&domain, r.period)?
    };
    let mut config = match r.cfg.fill.as_deref() {
        None | Some("sample") => sample_configuration(&domain, &arr, &r.params, r.seed)?,
        Some(c) => Configuration::uniform(domain.len(), HexState::pure(c.parse().map_err(|e: flowerperc::Error| invalid(e.to_string()))?)),
    };
    if let Some(name) = r.cfg.iris.as_deref() {
        let st = parse_state(name)?;
        for h in arr.irises() {
            config.states[domain.index_of(*h).expect("irises lie in the domain")] = st;
        }
    }
    let highlight = r.cfg.highlight.as_deref().map(|h| parse_highlight(h, r.color)).transpose()?;
    let svg = render_svg(&domain, &config, &RenderOptions { highlight, ..Default::default() })?;
    let svg_path = r.out.join("configuration.svg");
    fs::write(&svg_path, svg).with_context(|| format!("cannot write {}", svg_path.display()))?;
    let json_path = r.out.join("configuration.json");
    fs::write(&json_path, config_to_json(&domain, &config)?).with_context(|| format!("cannot write {}", json_path.display()))?;
    println!("{} hexagons, {} irises; wrote {} and {}", domain.len(), arr.len(), svg_path.display(), json_path.display());
    Ok(Finished { failures: Vec::new() })
}
