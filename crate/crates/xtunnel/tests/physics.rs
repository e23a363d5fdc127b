//! End-to-end physics checks through the public API.

use xtunnel::analysis::{fit_exponential, fit_linear};
use xtunnel::eigen::EigenOptions;
use xtunnel::exchange::{coherence_projection, coherent_externals};
use xtunnel::hartree_fock::{solve_hf_mixing, wide_b_escape};
use xtunnel::single_particle::{perturbative_mixing_direct, resonant_depth_b, solve_potential, wkb_exponent, DoubleWell, Orbital};
use xtunnel::two_particle::{lowest_states, one_body_rdm, product_state, well_b_occupation, Sector};
use xtunnel::{DoubleWellSpec, Grid, InteractionKernel, WellShape};

fn square(d: f64) -> DoubleWellSpec {
    DoubleWellSpec::symmetric(WellShape::Square, d, 6.0, 1.2)
}

/// Box around both wells with `pad` beyond the outer edges.
fn boxed(spec: &DoubleWellSpec, pad: f64, n: usize) -> Grid {
    let lo = spec.center_a - spec.width_a / 2.0 - pad;
    let hi = spec.center_b + spec.width_b / 2.0 + pad;
    Grid::new(lo, hi, n).unwrap()
}

#[test]
fn tunneling_amplitude_decays_at_the_wkb_rate() {
    let (mut t1, mut wkb) = (Vec::new(), Vec::new());
    for d in [3.0, 4.0, 5.0, 6.0, 7.0] {
        let spec = square(d);
        let sys = DoubleWell::new(spec, Grid::centered(d / 2.0 + 7.1, 0.02).unwrap()).unwrap();
        let lv = sys.levels(4).unwrap();
        let pair = sys.localize_doublet(&lv, 0).unwrap();
        let w = spec.barrier_width();
        t1.push((w, pair.t.abs()));
        wkb.push((w, (-wkb_exponent(&spec, 0.5 * (pair.e_a + pair.e_b)).unwrap()).exp()));
    }
    let ft = fit_exponential(&t1).unwrap();
    let fw = fit_exponential(&wkb).unwrap();
    assert!(ft.r_squared > 0.999, "{ft:?}");
    assert!((t1[0].1 / t1[4].1).log10() > 4.0);
    let rel = (ft.rate_or_exponent - fw.rate_or_exponent).abs() / fw.rate_or_exponent;
    assert!(rel < 0.05, "t1 rate {} vs WKB {}", ft.rate_or_exponent, fw.rate_or_exponent);
}

#[test]
fn wide_well_escape_enhancement_grows_with_the_barrier() {
    let kernel = InteractionKernel::new(0.3, 1.0).unwrap();
    let mut enh = Vec::new();
    for gap in [6.0, 8.0] {
        let spec = DoubleWellSpec {
            center_a: 12.0 - 12.0 - gap - 0.6,
            center_b: 12.0,
            depth_b: 6.0,
            width_b: 24.0,
            ..square(6.0)
        };
        let lo = spec.center_a - 0.6 - 120.0;
        let hi = spec.center_b + 12.0 + 120.0;
        let grid = Grid::new(lo, hi, ((hi - lo) / 0.08) as usize).unwrap();
        let r = wide_b_escape(&spec, &grid, &kernel, 1.0).unwrap();
        assert!(r.b_levels >= 20);
        assert!(r.with_exchange > r.bare);
        enh.push(r.enhancement);
    }
    assert!(enh[1] > enh[0], "{enh:?}");
    assert!(enh[1] >= 1e3, "{enh:?}");
}

#[test]
fn coherent_contributions_add_linearly_and_parity_flips_the_sign() {
    let spec = square(6.0);
    let bump_start = spec.center_b + 0.6 + 8.0;
    let grid = Grid::new(spec.center_a - 6.6, bump_start + 8.0 * 1.5 + 1.0, 1800).unwrap();
    let sys = DoubleWell::new(spec, grid).unwrap();
    let lv = sys.levels(4).unwrap();
    let pair = sys.localize_doublet(&lv, 0).unwrap();
    let (lo, hi) = (spec.center_a - 1.6, spec.center_b + 1.6);
    let u: Vec<f64> = grid.points().iter().map(|&x| if x >= lo && x <= hi { -1.0 } else { 0.0 }).collect();
    let env = solve_potential(&grid, &u, 2, &EigenOptions::default()).unwrap();
    let even = Orbital::from_pair(grid, &env[0], "even");
    let odd = Orbital::from_pair(grid, &env[1], "odd");
    let kernel = InteractionKernel::new(1.0, 1.0).unwrap();

    let pts: Vec<(f64, f64)> = [1usize, 2, 4, 8]
        .iter()
        .map(|&n| {
            let ext = coherent_externals(&even, n, 0.1, bump_start, 1.5).unwrap();
            (n as f64, coherence_projection(&ext, &pair.psi_a, &pair.psi_b, &kernel).unwrap().total)
        })
        .collect();
    let fit = fit_linear(&pts).unwrap();
    assert!(fit.r_squared > 0.99, "{pts:?}");
    assert!(fit.slope.abs() > 0.0);

    let parity = coherence_projection(&[even, odd], &pair.psi_a, &pair.psi_b, &kernel).unwrap();
    let (ce, co) = (parity.contributions[0].value, parity.contributions[1].value);
    assert!(ce * co < 0.0, "even {ce} odd {co}");
    assert_eq!(parity.contributions[1].nodes, 1);
}

#[test]
fn weak_coupling_occupation_matches_the_combined_admixture() {
    let mut spec = DoubleWellSpec { width_b: 1.4, ..square(6.0) };
    let grid = boxed(&spec, 7.5, 256);
    spec.depth_b = resonant_depth_b(&spec, &grid, 2).unwrap();
    let sys = DoubleWell::new(spec, grid).unwrap();
    let lv = sys.levels(6).unwrap();
    let p1 = sys.localize_doublet(&lv, 0).unwrap();
    let psi2 = lv[2].clone();
    let b_t1 = perturbative_mixing_direct(&p1).unwrap();
    let kernel = InteractionKernel::new(5e-4, 1.0).unwrap();
    let hf = solve_hf_mixing(&sys, &p1, &psi2, &kernel).unwrap();

    let states = lowest_states(&sys, &kernel, Sector::Antisymmetric, 6).unwrap();
    let target = product_state(Sector::Antisymmetric, &p1.psi_a, &psi2);
    let (best, weight) = states
        .iter()
        .map(|s| s.overlap(&target).powi(2))
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(weight > 0.5);
    let occ = well_b_occupation(&one_body_rdm(&states[best]), &p1, spec.barrier_midpoint()).unwrap();
    let ratio = occ.projected / (b_t1 + hf.b_g1_projected).powi(2);
    assert!((ratio - 1.0).abs() < 0.15, "ratio {ratio}");
}
