//! The eight scenarios. Each fills a [`Report`]; a returned error marks the run as failed.

use serde_json::{json, Value};
use xtunnel::analysis::{crossover, fit_exponential, fit_linear, fit_power, scan, window};
use xtunnel::eigen::{symmetry_defect, EigenOptions};
use xtunnel::exchange::{coherence_projection, coherent_externals, legs_element, scan_geometry, Legs};
use xtunnel::hartree_fock::{solve_hf_mixing, tail_profile, wide_b_escape};
use xtunnel::single_particle::{
    perturbative_mixing_direct, resonant_depth_b, solve_potential, wkb_exponent, DoubleWell, Orbital,
};
use xtunnel::two_particle::{build_two_body, lowest_states, one_body_rdm, product_state, strong_coupling_amplitude, well_b_occupation, Sector};
use xtunnel::model::BOX_MARGIN_WIDTHS;
use xtunnel::{DoubleWellSpec, Error, Grid, Result};

use crate::config::{Extent, Resolution, Scenario, ScenarioConfig, SpectrumPotential};
use crate::report::{error_object, num, Cell, Report, Table};

pub fn run(cfg: &ScenarioConfig) -> Report {
    let mut report = Report::new(cfg.scenario.name(), &cfg.output_prefix, cfg.resolved.clone());
    log::info!("running {}", cfg.scenario);
    let outcome = match cfg.scenario {
        Scenario::Spectrum => spectrum(cfg, &mut report),
        Scenario::TunnelingScan => tunneling_scan(cfg, &mut report),
        Scenario::ExchangeScan => exchange_scan(cfg, &mut report),
        Scenario::HfMix => hf_mix(cfg, &mut report),
        Scenario::ExactCompare => exact_compare(cfg, &mut report),
        Scenario::StrongCoupling => strong_coupling(cfg, &mut report),
        Scenario::Coherence => coherence(cfg, &mut report),
        Scenario::WideB => wide_b(cfg, &mut report),
    };
    if let Err(e) = outcome {
        log::error!("{} failed: {e}", cfg.scenario);
        report.error = Some(error_object(&e));
    }
    report
}

fn points_for(res: Resolution, lo: f64, hi: f64) -> Result<Grid> {
    match res {
        Resolution::Points(n) => Grid::new(lo, hi, n),
        Resolution::Spacing(h) => {
            let n = ((hi - lo) / h).ceil() as usize + 1;
            Grid::new(lo, lo + (n - 1) as f64 * h, n)
        }
    }
}

/// Grid for `spec`: the configured box, or the wells plus the margin rule plus padding.
/// `right` extends an automatic box to cover that abscissa.
fn grid_for(cfg: &ScenarioConfig, spec: &DoubleWellSpec, right: Option<f64>) -> Result<Grid> {
    match cfg.extent {
        Extent::Explicit { x_min, x_max } => match cfg.resolution {
            Resolution::Points(n) => Grid::new(x_min, x_max, n),
            Resolution::Spacing(h) => Grid::new(x_min, x_max, ((x_max - x_min) / h).round() as usize + 1),
        },
        Extent::Auto { pad } => {
            let margin = BOX_MARGIN_WIDTHS * spec.width_a.max(spec.width_b) + pad;
            let lo = (spec.center_a - spec.width_a / 2.0).min(spec.center_b - spec.width_b / 2.0) - margin;
            let mut hi = (spec.center_a + spec.width_a / 2.0).max(spec.center_b + spec.width_b / 2.0) + margin;
            if let Some(x) = right {
                hi = hi.max(x + pad);
            }
            match cfg.resolution {
                // keep the origin on the mesh for boxes centered on it
                Resolution::Spacing(h) if (lo + hi).abs() <= 1e-12 * hi.abs() => Grid::centered(hi, h),
                res => points_for(res, lo, hi),
            }
        }
    }
}

fn grid_json(g: &Grid) -> Value {
    json!({ "x_min": num(g.x_min), "x_max": num(g.x_max), "n": g.n, "h": num(g.h) })
}

fn spectrum(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let grid = match cfg.spectrum_potential {
        SpectrumPotential::Wells => grid_for(cfg, &cfg.wells, None)?,
        _ => match cfg.extent {
            Extent::Explicit { .. } => grid_for(cfg, &cfg.wells, None)?,
            Extent::Auto { .. } => points_for(cfg.resolution, -10.0, 10.0)?,
        },
    };
    let center = 0.5 * (grid.x_min + grid.x_max);
    let omega = cfg.spectrum_omega;
    let potential: Vec<f64> = match cfg.spectrum_potential {
        SpectrumPotential::Box => vec![0.0; grid.n],
        SpectrumPotential::Harmonic => grid.points().iter().map(|x| 0.5 * omega * omega * (x - center).powi(2)).collect(),
        SpectrumPotential::Wells => cfg.wells.sample(&grid)?,
    };
    let pairs = solve_potential(&grid, &potential, cfg.spectrum_levels, &EigenOptions::default())?;
    // walls sit one spacing outside the first and last points
    let length = (grid.n + 1) as f64 * grid.h;
    let reference = |k: usize| -> Option<f64> {
        match cfg.spectrum_potential {
            SpectrumPotential::Box => Some(((k + 1) as f64 * std::f64::consts::PI / length).powi(2) / 2.0),
            SpectrumPotential::Harmonic => Some(omega * (k as f64 + 0.5)),
            SpectrumPotential::Wells => None,
        }
    };
    let mut t = Table::new("levels", &["n", "energy", "reference", "deviation"]);
    let (mut max_rel, mut max_abs) = (0.0f64, 0.0f64);
    for (k, p) in pairs.iter().enumerate() {
        match reference(k) {
            Some(e) => {
                let dev = p.energy - e;
                max_rel = max_rel.max((dev / e).abs());
                max_abs = max_abs.max(dev.abs());
                t.push(vec![(k + 1).into(), p.energy.into(), e.into(), dev.into()]);
            }
            None => t.push(vec![(k + 1).into(), p.energy.into(), Cell::Empty, Cell::Empty]),
        }
    }
    r.set("grid", grid_json(&grid));
    r.set("levels", pairs.len().into());
    match cfg.spectrum_potential {
        SpectrumPotential::Box => {
            r.set_num("box_length", length);
            r.set_num("max_relative_deviation", max_rel);
        }
        SpectrumPotential::Harmonic => {
            r.set_num("max_abs_deviation", max_abs);
            r.set_num("max_relative_deviation", max_rel);
        }
        SpectrumPotential::Wells => {}
    }
    r.tables.push(t);
    Ok(())
}

struct TunnelRow {
    barrier: f64,
    t1: f64,
    half_splitting: f64,
    action: f64,
}

fn tunneling_scan(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let table = scan("separation", &cfg.scan_values, |d| {
        let spec = cfg.wells.with_separation(d);
        let sys = DoubleWell::new(spec, grid_for(cfg, &spec, None)?)?;
        let lv = sys.levels(4)?;
        let pair = sys.localize_doublet(&lv, 0)?;
        Ok(TunnelRow {
            barrier: spec.barrier_width(),
            t1: pair.t,
            half_splitting: 0.5 * (lv[1].energy - lv[0].energy),
            action: wkb_exponent(&spec, 0.5 * (pair.e_a + pair.e_b))?,
        })
    })?;
    let mut t = Table::new("tunneling", &["separation", "barrier_width", "t1", "half_splitting", "wkb_exponent", "error"]);
    let (mut tp, mut sp) = (Vec::new(), Vec::new());
    for row in &table.rows {
        match &row.outcome {
            Ok(x) => {
                t.push(vec![row.value.into(), x.barrier.into(), x.t1.into(), x.half_splitting.into(), x.action.into(), Cell::Empty]);
                tp.push((x.barrier, x.t1));
                sp.push((x.barrier, (-x.action).exp()));
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("separation", row.value, e);
            }
        }
    }
    r.tables.push(t);
    let ft = r.fit("t1_vs_barrier_width", fit_exponential(&tp));
    // exp(−S) fitted the same way gives the mean slope dS/dw over the same window
    let fs = r.fit("wkb_vs_barrier_width", fit_exponential(&sp));
    if let (Some(ft), Some(fs)) = (ft, fs) {
        let ts: Vec<f64> = tp.iter().map(|p| p.1).collect();
        let (lo, hi) = ts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        r.set_num("decades", (hi / lo).log10());
        r.set_num("t1_rate", ft.rate_or_exponent);
        r.set_num("wkb_slope", fs.rate_or_exponent);
        r.set_num("relative_difference", (ft.rate_or_exponent - fs.rate_or_exponent).abs() / fs.rate_or_exponent.abs());
    }
    Ok(())
}

struct ExchangeRow {
    g: f64,
    control: f64,
    t1: f64,
}

fn exchange_scan(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let d_max = cfg.scan_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let grid = grid_for(cfg, &cfg.wells.with_separation(d_max), None)?;
    r.set("grid", grid_json(&grid));
    let kernel = cfg.kernel;
    let table = scan("separation", &cfg.scan_values, |d| {
        let geo = scan_geometry(&cfg.wells, &grid, d)?;
        Ok(ExchangeRow {
            g: legs_element(&geo, Legs::Exchange, &kernel)?.value,
            control: legs_element(&geo, Legs::Control, &kernel)?.value,
            t1: geo.pair1.t,
        })
    })?;
    let mut t = Table::new("exchange", &["separation", "G", "G_d2", "G_d3", "control", "control_d", "t1", "error"]);
    let (mut gp, mut cp, mut tp) = (Vec::new(), Vec::new(), Vec::new());
    for row in &table.rows {
        let d = row.value;
        match &row.outcome {
            Ok(x) => {
                t.push(vec![
                    d.into(),
                    x.g.into(),
                    (x.g * d * d).into(),
                    (x.g * d.powi(3)).into(),
                    x.control.into(),
                    (x.control * d).into(),
                    x.t1.into(),
                    Cell::Empty,
                ]);
                gp.push((d, x.g.abs()));
                cp.push((d, x.control.abs()));
                // beyond this separation t1 is below the round-off floor of the localization
                if d <= cfg.t1_max_separation && x.t1 > 0.0 {
                    tp.push((d, x.t1));
                }
            }
            Err(e) => {
                t.push_error(d, e);
                r.row_error("separation", d, e);
            }
        }
    }
    r.tables.push(t);
    let fg = r.fit("G_vs_separation", fit_power(&gp));
    let fc = r.fit("control_vs_separation", fit_power(&cp));
    if let Some(f) = fg {
        r.set_num("G_exponent", f.rate_or_exponent);
        r.set_num("G_decades", (f.window.1 / f.window.0).log10());
    }
    if let Some(f) = fc {
        r.set_num("control_exponent", f.rate_or_exponent);
    }
    match crossover(&tp, &gp) {
        Ok(x) => {
            r.set_num("crossover", x);
            let below = r.fit("t1_below_crossover", fit_exponential(&window(&tp, f64::NEG_INFINITY, x)));
            let above = r.fit("G_above_crossover", fit_power(&window(&gp, x, f64::INFINITY)));
            if let (Some(b), Some(a)) = (below, above) {
                r.set_num("below_r_squared", b.r_squared);
                r.set_num("above_r_squared", a.r_squared);
            }
        }
        Err(e) => r.set("crossover", json!({ "error": error_object(&e) })),
    }
    Ok(())
}

fn hf_mix(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let spec = cfg.wells;
    let grid = grid_for(cfg, &spec, None)?;
    let sys = DoubleWell::new(spec, grid)?;
    let lv = sys.levels(6)?;
    let pair = sys.localize_doublet(&lv, 0)?;
    // frozen passive orbital: level `passive_level` of well a on its own
    let iso = DoubleWell::new(spec.isolated_a(), grid)?.levels(cfg.passive_level)?;
    let psi2 = iso[cfg.passive_level - 1].clone();
    let b_t1 = perturbative_mixing_direct(&pair)?;
    r.set("grid", grid_json(&grid));
    r.set_num("t1", pair.t);
    r.set_num("detuning", pair.e_a - pair.e_b);
    r.set_num("b_t1", b_t1);
    let gap = lv[2].energy - lv[1].energy;
    r.set_num("doublet_gap_over_detuning", gap / (pair.e_a - pair.e_b).abs());

    let table = scan("lambda", &cfg.scan_values, |lam| solve_hf_mixing(&sys, &pair, &psi2, &cfg.kernel.with_lambda(lam)))?;
    let mut t = Table::new(
        "mixing",
        &["lambda", "G", "b_t1", "b_g1_projected", "b_g1_perturbative", "ratio", "residual", "error"],
    );
    let mut ratios = Vec::new();
    let mut last = None;
    for row in &table.rows {
        match &row.outcome {
            Ok(m) => {
                let ratio = m.b_g1_projected / m.b_g1_perturbative;
                t.push(vec![
                    row.value.into(),
                    m.g.into(),
                    b_t1.into(),
                    m.b_g1_projected.into(),
                    m.b_g1_perturbative.into(),
                    ratio.into(),
                    m.residual.into(),
                    Cell::Empty,
                ]);
                if ratio.is_finite() {
                    ratios.push(ratio);
                }
                last = Some(m);
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("lambda", row.value, e);
            }
        }
    }
    r.tables.push(t);
    if !ratios.is_empty() {
        r.set_num("ratio_min", ratios.iter().copied().fold(f64::INFINITY, f64::min));
        r.set_num("ratio_max", ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }
    let lams: Vec<f64> = table.ok_rows().map(|(v, _)| v.abs()).filter(|v| *v > 0.0).collect();
    if lams.len() >= 2 {
        let (lo, hi) = lams.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        r.set_num("lambda_decades", (hi / lo).log10());
    }

    // tail of ψ₁ between the wells, bare and with the largest-λ correction
    let bare = tail_profile(&pair, &spec, None)?;
    let mut tail = Table::new("tail", &["x", "bare", "with_exchange"]);
    let with = match last {
        Some(m) => Some(tail_profile(&pair, &spec, Some(m))?),
        None => None,
    };
    for (i, (x, b)) in bare.iter().enumerate() {
        let w = with.as_ref().map_or(Cell::Empty, |v| v[i].1.into());
        tail.push(vec![(*x).into(), (*b).into(), w]);
    }
    r.tables.push(tail);
    if let Some(f) = r.fit("bare_tail", fit_exponential(&bare)) {
        r.set_num("bare_tail_rate", f.rate_or_exponent);
        r.set_num("bound_state_rate", (2.0 * pair.e_a.abs()).sqrt());
    }
    if let (Some(w), Some((_, b))) = (with.as_ref().and_then(|v| v.last()), bare.last()) {
        r.set_num("tail_enhancement_at_edge_b", w.1 / b);
    }
    Ok(())
}

struct ExactRow {
    occupation: f64,
    region: f64,
    doublet_weight: f64,
    b_g1: f64,
    target_weight: f64,
    energy: f64,
    residual: f64,
}

fn exact_compare(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let mut spec = cfg.wells;
    let grid = grid_for(cfg, &spec, None)?;
    if cfg.depth_b_default && cfg.resonant_level > 0 {
        // well b detuned so that only the level-`resonant_level` doublet is resonant
        spec.depth_b = resonant_depth_b(&spec, &grid, cfg.resonant_level)?;
    }
    let sys = DoubleWell::new(spec, grid)?;
    let lv = sys.levels(6)?;
    let p1 = sys.localize_doublet(&lv, 0)?;
    let psi2 = lv[2].clone();
    let b_t1 = perturbative_mixing_direct(&p1)?;
    r.set("grid", grid_json(&grid));
    r.set_num("depth_b", spec.depth_b);
    r.set_num("t1", p1.t);
    r.set_num("detuning", p1.e_a - p1.e_b);
    r.set_num("b_t1", b_t1);
    let op = build_two_body(&sys, &cfg.kernel, Sector::Antisymmetric)?;
    r.set_num("operator_symmetry_defect", symmetry_defect(&op, cfg.seed, 3));

    let mid = spec.barrier_midpoint();
    let table = scan("lambda", &cfg.scan_values, |lam| {
        let k = cfg.kernel.with_lambda(lam);
        let hf = solve_hf_mixing(&sys, &p1, &psi2, &k)?;
        let states = lowest_states(&sys, &k, Sector::Antisymmetric, cfg.exact_states)?;
        let target = product_state(Sector::Antisymmetric, &p1.psi_a, &psi2);
        let (best, weight) = states
            .iter()
            .map(|s| s.overlap(&target).powi(2))
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(Error::StatesNotIdentifiable { found: 0 })?;
        if weight < 0.5 {
            return Err(Error::StatesNotIdentifiable { found: 0 });
        }
        let occ = well_b_occupation(&one_body_rdm(&states[best]), &p1, mid)?;
        Ok(ExactRow {
            occupation: occ.projected,
            region: occ.region,
            doublet_weight: occ.doublet_weight,
            b_g1: hf.b_g1_projected,
            target_weight: weight,
            energy: states[best].energy,
            residual: states[best].residual,
        })
    })?;
    let mut t = Table::new(
        "occupation",
        &[
            "lambda",
            "occupation",
            "region_weight",
            "b_t1",
            "b_g1",
            "predicted",
            "ratio_predicted",
            "ratio_b_t1_sq",
            "ratio_b_g1_sq",
            "target_weight",
            "doublet_weight",
            "energy",
            "residual",
            "error",
        ],
    );
    let mut rows = Vec::new();
    for row in &table.rows {
        match &row.outcome {
            Ok(x) => {
                let pred = (b_t1 + x.b_g1).powi(2);
                let cells = vec![
                    row.value.into(),
                    x.occupation.into(),
                    x.region.into(),
                    b_t1.into(),
                    x.b_g1.into(),
                    pred.into(),
                    (x.occupation / pred).into(),
                    (x.occupation / (b_t1 * b_t1)).into(),
                    (x.occupation / (x.b_g1 * x.b_g1)).into(),
                    x.target_weight.into(),
                    x.doublet_weight.into(),
                    x.energy.into(),
                    x.residual.into(),
                    Cell::Empty,
                ];
                t.push(cells);
                rows.push(json!({
                    "lambda": num(row.value),
                    "occupation": num(x.occupation),
                    "predicted": num(pred),
                    "ratio_predicted": num(x.occupation / pred),
                    "ratio_b_t1_sq": num(x.occupation / (b_t1 * b_t1)),
                    "ratio_b_g1_sq": num(x.occupation / (x.b_g1 * x.b_g1)),
                    "g_dominated": x.b_g1.abs() >= 10.0 * b_t1.abs(),
                }));
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("lambda", row.value, e);
            }
        }
    }
    r.tables.push(t);
    r.set("rows", Value::Array(rows));
    Ok(())
}

fn strong_coupling(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let grid = grid_for(cfg, &cfg.wells, None)?;
    let sys = DoubleWell::new(cfg.wells, grid)?;
    r.set("grid", grid_json(&grid));
    let table = scan("lambda", &cfg.scan_values, |lam| strong_coupling_amplitude(&sys, &cfg.kernel.with_lambda(lam)))?;
    let mut t = Table::new(
        "strong_coupling",
        &["lambda", "t_eff", "Q", "Q_exchange", "t2", "G", "predicted", "ratio", "weight_low", "weight_high", "error"],
    );
    let (mut tq, mut pq, mut ratios) = (Vec::new(), Vec::new(), Vec::new());
    for row in &table.rows {
        match &row.outcome {
            Ok(x) => {
                let ratio = x.t_eff / x.predicted;
                t.push(vec![
                    row.value.into(),
                    x.t_eff.into(),
                    x.q.into(),
                    x.q_exchange.into(),
                    x.t2.into(),
                    x.g.into(),
                    x.predicted.into(),
                    ratio.into(),
                    x.weights[0].into(),
                    x.weights[1].into(),
                    Cell::Empty,
                ]);
                tq.push((x.q, x.t_eff));
                pq.push((x.q, x.predicted));
                ratios.push(ratio);
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("lambda", row.value, e);
            }
        }
    }
    r.tables.push(t);
    if let Some(f) = r.fit("t_eff_vs_Q", fit_power(&tq)) {
        r.set_num("slope", f.rate_or_exponent);
    }
    if let Some(f) = r.fit("predicted_vs_Q", fit_power(&pq)) {
        r.set_num("predicted_slope", f.rate_or_exponent);
    }
    if !ratios.is_empty() {
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        r.set_num("ratio_min", lo);
        r.set_num("ratio_max", hi);
        r.set_num("ratio_spread", hi / lo);
    }
    Ok(())
}

fn coherence(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let spec = cfg.wells;
    let n_max = cfg.scan_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let bump_start = spec.center_b + spec.width_b / 2.0 + cfg.bump_gap;
    let grid = grid_for(cfg, &spec, Some(bump_start + n_max * cfg.bump_width))?;
    let sys = DoubleWell::new(spec, grid)?;
    let lv = sys.levels(4)?;
    let pair = sys.localize_doublet(&lv, 0)?;

    // shallow well spanning both wells; its two lowest states are the even and odd envelopes
    let (lo, hi) = (
        spec.center_a - spec.width_a / 2.0 - cfg.envelope_pad,
        spec.center_b + spec.width_b / 2.0 + cfg.envelope_pad,
    );
    let u: Vec<f64> = grid.points().iter().map(|&x| if x >= lo && x <= hi { -cfg.envelope_depth } else { 0.0 }).collect();
    let env = solve_potential(&grid, &u, 2, &EigenOptions::default())?;
    let even = Orbital::from_pair(grid, &env[0], "even");
    let odd = Orbital::from_pair(grid, &env[1], "odd");
    r.set("grid", grid_json(&grid));

    let table = scan("orbitals", &cfg.scan_values, |n| {
        let ext = coherent_externals(&even, n as usize, cfg.beta2, bump_start, cfg.bump_width)?;
        coherence_projection(&ext, &pair.psi_a, &pair.psi_b, &cfg.kernel)
    })?;
    let mut t = Table::new("coherence", &["orbitals", "total", "mean_contribution", "probability", "probability_over_n2", "error"]);
    let mut pts = Vec::new();
    for row in &table.rows {
        match &row.outcome {
            Ok(rep) => {
                let n = row.value;
                t.push(vec![
                    n.into(),
                    rep.total.into(),
                    (rep.total / n).into(),
                    (rep.total * rep.total).into(),
                    (rep.total * rep.total / (n * n)).into(),
                    Cell::Empty,
                ]);
                pts.push((n, rep.total));
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("orbitals", row.value, e);
            }
        }
    }
    r.tables.push(t);
    if let Some(f) = r.linear_fit("total_vs_orbitals", fit_linear(&pts)) {
        r.set_num("slope", f.slope);
        r.set_num("intercept", f.intercept);
        r.set_num("r_squared", f.r_squared);
    }
    let p: Vec<(f64, f64)> = pts.iter().map(|&(n, s)| (n, s * s / (n * n))).collect();
    if !p.is_empty() {
        let lo = p.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
        let hi = p.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max);
        r.set_num("probability_over_n2_spread", hi / lo);
    }

    // one orbital of each node parity
    let parity = coherence_projection(&[even, odd], &pair.psi_a, &pair.psi_b, &cfg.kernel)?;
    let mut pt = Table::new("parity", &["orbital", "nodes", "sign_product", "contribution"]);
    for (name, c) in ["even", "odd"].iter().zip(&parity.contributions) {
        pt.push(vec![Cell::Text(name.to_string()), c.nodes.into(), c.sign_product.into(), c.value.into()]);
    }
    r.tables.push(pt);
    let (ce, co) = (&parity.contributions[0], &parity.contributions[1]);
    r.set_num("even_contribution", ce.value);
    r.set_num("odd_contribution", co.value);
    r.set("opposite_signs", (ce.value * co.value < 0.0).into());
    Ok(())
}

fn wide_b(cfg: &ScenarioConfig, r: &mut Report) -> Result<()> {
    let base = cfg.wells;
    let table = scan("barrier", &cfg.scan_values, |gap| {
        // well b stays put; well a moves so that the edge-to-edge gap is `gap`
        let spec = DoubleWellSpec { center_a: base.center_b - base.width_b / 2.0 - gap - base.width_a / 2.0, ..base };
        wide_b_escape(&spec, &grid_for(cfg, &spec, None)?, &cfg.kernel, cfg.bandwidth)
    })?;
    let mut t = Table::new("escape", &["barrier", "bare", "with_exchange", "enhancement", "channels", "b_levels", "error"]);
    let mut enh = Vec::new();
    for row in &table.rows {
        match &row.outcome {
            Ok(x) => {
                t.push(vec![
                    row.value.into(),
                    x.bare.into(),
                    x.with_exchange.into(),
                    x.enhancement.into(),
                    x.channels.len().into(),
                    x.b_levels.into(),
                    Cell::Empty,
                ]);
                enh.push((row.value, x.enhancement));
            }
            Err(e) => {
                t.push_error(row.value, e);
                r.row_error("barrier", row.value, e);
            }
        }
    }
    r.tables.push(t);
    enh.sort_by(|a, b| a.0.total_cmp(&b.0));
    r.set("monotone", enh.windows(2).all(|w| w[1].1 > w[0].1).into());
    if let Some(&(_, e)) = enh.last() {
        r.set_num("enhancement_at_widest", e);
    }
    Ok(())
}
