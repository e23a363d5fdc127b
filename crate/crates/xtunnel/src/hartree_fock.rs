//! Exchange-driven mixing in the frozen-orbital Hartree-Fock picture.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::eigen::{shifted_solve_with, SolveOptions};
use crate::error::{Error, Result};
use crate::exchange::{coulomb_matrix_element, exchange_source};
use crate::model::{DoubleWellSpec, Grid, InteractionKernel};
use crate::single_particle::{DoubleWell, LocalizedPair, Orbital};

#[derive(Debug, Clone, PartialEq)]
pub struct HFMixResult {
    /// First-order correction `δψ₁`, orthogonal to `ψ₁a`.
    pub delta_psi: Vec<f64>,
    /// `G = ⟨ψ₁b|K⟩`.
    pub g: f64,
    /// `−⟨ψ₁b|δψ₁⟩`, sign matched to `G/(E₁a − E₁b)`.
    pub b_g1_projected: f64,
    pub b_g1_perturbative: f64,
    /// `‖P((H − E₁a)δψ₁ − K)‖ / ‖PK‖`.
    pub residual: f64,
}

const SOLVE: SolveOptions = SolveOptions { tol: 1e-11, max_iter: None, refinements: 8 };

/// Solves `(H − E₁a) δψ₁ = K` on the complement of `ψ₁a`, where `K` is the exchange
/// source of the frozen orbital `ψ₂` acting on `ψ₁a`.
pub fn solve_hf_mixing(
    system: &DoubleWell,
    pair1: &LocalizedPair,
    psi2: &Orbital,
    kernel: &InteractionKernel,
) -> Result<HFMixResult> {
    let grid = system.grid;
    for o in [&pair1.psi_a, &pair1.psi_b, psi2] {
        if !o.grid.same_as(&grid) {
            return Err(Error::GridMismatch);
        }
    }
    if (psi2.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("psi2 is not normalized (norm {})", psi2.norm())));
    }
    let n = grid.n;
    let k = exchange_source(std::slice::from_ref(psi2), &pair1.psi_a, kernel)?;
    let g = grid.inner(&pair1.psi_b.values, &k.values);
    let detuning = pair1.e_a - pair1.e_b;
    if g == 0.0 {
        return Ok(HFMixResult { delta_psi: vec![0.0; n], g, b_g1_projected: 0.0, b_g1_perturbative: 0.0, residual: 0.0 });
    }
    if !(g.abs() <= 0.1 * detuning.abs()) {
        return Err(Error::NonPerturbative { coupling: g, detuning });
    }
    let h = system.hamiltonian();
    let deflate = [pair1.psi_a.values.clone()];
    let delta = shifted_solve_with(&h, pair1.e_a, &k.values, &deflate, &SOLVE)?;
    let residual = deflated_residual(system, pair1, &k.values, &delta);
    Ok(HFMixResult {
        b_g1_projected: -grid.inner(&pair1.psi_b.values, &delta),
        b_g1_perturbative: g / detuning,
        delta_psi: delta,
        g,
        residual,
    })
}

fn deflated_residual(system: &DoubleWell, pair1: &LocalizedPair, k: &[f64], delta: &[f64]) -> f64 {
    let grid = &system.grid;
    let a = &pair1.psi_a.values;
    let c = 0.5 / (grid.h * grid.h);
    let n = grid.n;
    let mut r: Vec<f64> = (0..n)
        .map(|i| {
            let lap = if i > 0 { delta[i - 1] } else { 0.0 } + if i + 1 < n { delta[i + 1] } else { 0.0 };
            (2.0 * c + system.potential[i] - pair1.e_a) * delta[i] - c * lap - k[i]
        })
        .collect();
    let mut pk = k.to_vec();
    for v in [&mut r, &mut pk] {
        let p = grid.inner(a, v);
        v.iter_mut().zip(a).for_each(|(x, y)| *x -= p * y);
    }
    grid.norm(&r) / grid.norm(&pk).max(1e-300)
}

/// Samples `|ψ₁(x)|` from `5·r₁` beyond the right edge of well a up to the inner edge of
/// well b. With `exchange` present the sampled orbital is `ψ₁a + δψ₁`.
pub fn tail_profile(pair1: &LocalizedPair, spec: &DoubleWellSpec, exchange: Option<&HFMixResult>) -> Result<Vec<(f64, f64)>> {
    let grid = pair1.psi_a.grid;
    let (edge_a, edge_b) = spec.inner_edges();
    let start = edge_a + 5.0 * pair1.psi_a.rms_radius;
    let rows: Vec<(f64, f64)> = (0..grid.n)
        .filter(|&i| grid.x(i) >= start && grid.x(i) <= edge_b + 1e-9)
        .map(|i| {
            let extra = exchange.map_or(0.0, |m| m.delta_psi[i]);
            (grid.x(i), (pair1.psi_a.values[i] + extra).abs())
        })
        .collect();
    if rows.len() < 2 {
        return Err(Error::RegionEmpty);
    }
    Ok(rows)
}

/// One well-b level that takes part in the escape sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeChannel {
    pub energy: f64,
    pub t: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WideBResult {
    /// `Σ_β (t_β / (E₁a − E_β))²`.
    pub bare: f64,
    /// `Σ_β ((t_β + G_β) / (E₁a − E_β))²`.
    pub with_exchange: f64,
    pub enhancement: f64,
    /// Bound levels found in the isolated well b.
    pub b_levels: usize,
    pub channels: Vec<EscapeChannel>,
}

/// Minimum number of bound well-b levels for the quasi-continuum picture.
pub const WIDE_B_MIN_LEVELS: usize = 20;

/// Probability leaked from `ψ₁a` into the levels of a wide well b within `bandwidth` of `E₁a`,
/// with and without the exchange channel through the level-2 orbital of well a.
pub fn wide_b_escape(spec: &DoubleWellSpec, grid: &Grid, kernel: &InteractionKernel, bandwidth: f64) -> Result<WideBResult> {
    if spec.width_b < 20.0 * spec.width_a {
        return Err(Error::InvalidArgument(format!(
            "wide-b needs width_b >= 20 width_a (got {} and {})",
            spec.width_b, spec.width_a
        )));
    }
    let full = DoubleWell::new(*spec, *grid)?;
    let iso_a = DoubleWell::new(spec.isolated_a(), *grid)?.levels(2)?;
    let iso_b_sys = DoubleWell::new(spec.isolated_b(), *grid)?;

    // enough levels to see the whole bound spectrum of well b, up to what the grid allows
    let mut want = 2 * WIDE_B_MIN_LEVELS;
    let b_levels = loop {
        let lv = iso_b_sys.levels(want.min(grid.n))?;
        let bound = lv.iter().filter(|o| o.energy < 0.0).count();
        if bound < lv.len() || want >= grid.n {
            break lv.into_iter().filter(|o| o.energy < 0.0).collect::<Vec<_>>();
        }
        want *= 2;
    };
    if b_levels.len() < WIDE_B_MIN_LEVELS {
        return Err(Error::InsufficientLevels { found: b_levels.len(), needed: WIDE_B_MIN_LEVELS });
    }

    // the physical level-2 orbital: full eigenstate closest to the isolated 2a state
    let full_levels = full.levels((b_levels.len() + 6).min(grid.n))?;
    let psi2 = full_levels
        .iter()
        .max_by(|x, y| x.overlap(&iso_a[1]).abs().total_cmp(&y.overlap(&iso_a[1]).abs()))
        .cloned()
        .ok_or(Error::RegionEmpty)?;
    let e1 = iso_a[0].energy;
    let chosen: Vec<&Orbital> = b_levels.iter().filter(|o| (o.energy - e1).abs() <= bandwidth).collect();
    if chosen.is_empty() {
        return Err(Error::InsufficientLevels { found: 0, needed: 1 });
    }

    let mut set: Vec<&Orbital> = vec![&iso_a[0]];
    set.extend(chosen.iter().copied());
    let orth = lowdin(grid, &set)?;
    let a = &orth[0];
    let ea = full.energy_form(&a.values, &a.values);
    let mut channels = Vec::with_capacity(orth.len() - 1);
    let (mut bare, mut with_exchange) = (0.0, 0.0);
    for b in &orth[1..] {
        let eb = full.energy_form(&b.values, &b.values);
        let t = -full.energy_form(&a.values, &b.values);
        let g = coulomb_matrix_element(&psi2, a, b, &psi2, kernel)?.value;
        bare += (t / (ea - eb)).powi(2);
        with_exchange += ((t + g) / (ea - eb)).powi(2);
        channels.push(EscapeChannel { energy: eb, t, g });
    }
    Ok(WideBResult { bare, with_exchange, enhancement: with_exchange / bare, b_levels: b_levels.len(), channels })
}

/// Symmetric (Löwdin) orthonormalization `S^{-1/2}`.
fn lowdin(grid: &Grid, set: &[&Orbital]) -> Result<Vec<Orbital>> {
    let m = set.len();
    let s = DMatrix::from_fn(m, m, |i, j| set[i].overlap(set[j]));
    let eig = SymmetricEigen::new(s);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-10) {
        return Err(Error::NonOrthonormal { deviation: 1.0 });
    }
    let inv = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
        * eig.eigenvectors.transpose();
    Ok((0..m)
        .map(|i| {
            let mut v = vec![0.0; grid.n];
            for j in 0..m {
                let c = inv[(j, i)];
                v.iter_mut().zip(&set[j].values).for_each(|(x, y)| *x += c * y);
            }
            Orbital::new(*grid, v, set[i].energy, set[i].label.clone())
        })
        .collect())
}
