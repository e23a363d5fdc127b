//! Single-particle spectra, localized doublets, tunneling amplitudes and WKB exponents.

use nalgebra::{Matrix2, SymmetricEigen};

use crate::eigen::{lowest_eigenpairs_with, EigenOptions, EigenPair, SymTridiagonal};
use crate::error::{Error, Result};
use crate::model::{DoubleWellSpec, Grid};

/// Grid-normalized real wavefunction (`h Σ ψ² = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub energy: f64,
    pub label: String,
    pub rms_radius: f64,
}

impl Orbital {
    pub fn new(grid: Grid, values: Vec<f64>, energy: f64, label: impl Into<String>) -> Self {
        let rms_radius = rms_radius(&grid, &values);
        Self { grid, values, energy, label: label.into(), rms_radius }
    }

    /// Orbital from a unit-Euclidean eigenvector.
    pub fn from_pair(grid: Grid, pair: &EigenPair, label: impl Into<String>) -> Self {
        let s = 1.0 / grid.h.sqrt();
        Self::new(grid, pair.vector.iter().map(|v| v * s).collect(), pair.energy, label)
    }

    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values)
    }

    pub fn overlap(&self, other: &Orbital) -> f64 {
        self.grid.inner(&self.values, &other.values)
    }

    pub fn mean_x(&self) -> f64 {
        mean_x(&self.grid, &self.values)
    }

    /// Sign changes among points where `|ψ| > 1e-6·max|ψ|`.
    pub fn node_count(&self) -> usize {
        node_count(&self.values)
    }

    /// Weight `h Σ ψ²` over points with `x > x0`.
    pub fn weight_beyond(&self, x0: f64) -> f64 {
        let g = &self.grid;
        g.h * self.values.iter().enumerate().filter(|(i, _)| g.x(*i) > x0).map(|(_, v)| v * v).sum::<f64>()
    }

    /// Weight inside `[lo, hi]`.
    pub fn weight_within(&self, lo: f64, hi: f64) -> f64 {
        let g = &self.grid;
        g.h * self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| (lo..=hi).contains(&g.x(*i)))
            .map(|(_, v)| v * v)
            .sum::<f64>()
    }

    pub fn negated(&self) -> Self {
        Self { values: self.values.iter().map(|v| -v).collect(), ..self.clone() }
    }
}

fn mean_x(grid: &Grid, f: &[f64]) -> f64 {
    let num: f64 = f.iter().enumerate().map(|(i, v)| grid.x(i) * v * v).sum();
    let den: f64 = f.iter().map(|v| v * v).sum();
    num / den
}

fn rms_radius(grid: &Grid, f: &[f64]) -> f64 {
    let m = mean_x(grid, f);
    let num: f64 = f.iter().enumerate().map(|(i, v)| (grid.x(i) - m).powi(2) * v * v).sum();
    let den: f64 = f.iter().map(|v| v * v).sum();
    (num / den).sqrt()
}

pub fn node_count(values: &[f64]) -> usize {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = 1e-6 * max;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in values.iter().filter(|v| v.abs() > cut) {
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// Single-particle Hamiltonian `-½ d²/dx² + U` with Dirichlet walls just outside the grid.
pub fn hamiltonian(grid: &Grid, potential: &[f64]) -> SymTridiagonal {
    let c = 0.5 / (grid.h * grid.h);
    SymTridiagonal::new(potential.iter().map(|u| 2.0 * c + u).collect(), vec![-c; grid.n - 1])
}

/// `⟨u|H|v⟩` (grid inner product) written with forward differences, which avoids the
/// cancellation between the `1/h²` diagonal and off-diagonal terms.
pub fn energy_form(grid: &Grid, potential: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let n = grid.n;
    let c = 0.5 / (grid.h * grid.h);
    let mut kin = c * (u[0] * v[0] + u[n - 1] * v[n - 1]);
    for i in 0..n - 1 {
        kin += c * (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
    }
    let pot: f64 = potential.iter().zip(u.iter().zip(v)).map(|(p, (a, b))| p * a * b).sum();
    grid.h * (kin + pot)
}

/// Lowest `k` eigenpairs of an arbitrary sampled potential.
pub fn solve_potential(grid: &Grid, potential: &[f64], k: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    let op = hamiltonian(grid, potential);
    lowest_eigenpairs_with(&op, k, opts)
}

/// A double well sampled on a grid.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    pub spec: DoubleWellSpec,
    pub grid: Grid,
    pub potential: Vec<f64>,
}

impl DoubleWell {
    pub fn new(spec: DoubleWellSpec, grid: Grid) -> Result<Self> {
        let potential = spec.sample(&grid)?;
        Ok(Self { spec, grid, potential })
    }

    pub fn hamiltonian(&self) -> SymTridiagonal {
        hamiltonian(&self.grid, &self.potential)
    }

    pub fn energy_form(&self, u: &[f64], v: &[f64]) -> f64 {
        energy_form(&self.grid, &self.potential, u, v)
    }

    /// `k` lowest eigenpairs (unit Euclidean vectors).
    pub fn solve_wells(&self, k: usize) -> Result<Vec<EigenPair>> {
        let pairs = solve_potential(&self.grid, &self.potential, k, &EigenOptions::default())?;
        if let Some(p) = pairs.iter().find(|p| p.energy >= 0.0) {
            log::debug!("level at E = {} is not bound on this box", p.energy);
        }
        Ok(pairs)
    }

    /// `k` lowest levels as grid-normalized orbitals with energies from the accurate form.
    pub fn levels(&self, k: usize) -> Result<Vec<Orbital>> {
        Ok(self
            .solve_wells(k)?
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut o = Orbital::from_pair(self.grid, p, format!("E{}", i + 1));
                o.energy = self.energy_form(&o.values, &o.values);
                o
            })
            .collect())
    }

    /// Localizes levels `index` and `index + 1` of `levels` (ascending) into well orbitals.
    pub fn localize_doublet(&self, levels: &[Orbital], index: usize) -> Result<LocalizedPair> {
        if index + 1 >= levels.len() {
            return Err(Error::InvalidArgument(format!("need levels up to {}", index + 1)));
        }
        let (p, m) = (&levels[index], &levels[index + 1]);
        let splitting = (m.energy - p.energy).abs();
        let mut gap = f64::INFINITY;
        if index + 2 < levels.len() {
            gap = gap.min(levels[index + 2].energy - m.energy);
        }
        if index > 0 {
            gap = gap.min(p.energy - levels[index - 1].energy);
        }
        if !gap.is_finite() {
            return Err(Error::InvalidArgument("doublet gap check needs a neighbouring level".into()));
        }
        let h2 = [
            [self.energy_form(&p.values, &p.values), self.energy_form(&p.values, &m.values)],
            [self.energy_form(&m.values, &p.values), self.energy_form(&m.values, &m.values)],
        ];
        let level = index / 2 + 1;
        let pair = self.localize(&p.values, &m.values, h2, level)?;
        // isolation is judged against the tunneling splitting 2t; the detuning part of the
        // level difference only has to stay below the gap
        let mid = self.spec.barrier_midpoint();
        let sides_ok = pair.psi_a.mean_x() < mid && pair.psi_b.mean_x() > mid;
        if !sides_ok || gap <= 10.0 * 2.0 * pair.t || gap <= splitting {
            return Err(Error::NotADoublet { index, next: index + 1, splitting, gap });
        }
        Ok(pair)
    }

    /// Lowest `level` orbitals of each well on its own (the other well switched off).
    pub fn isolated_orbitals(&self, level: usize) -> Result<(Orbital, Orbital)> {
        let a = DoubleWell::new(self.spec.isolated_a(), self.grid)?.levels(level)?;
        let b = DoubleWell::new(self.spec.isolated_b(), self.grid)?.levels(level)?;
        Ok((a[level - 1].clone(), b[level - 1].clone()))
    }

    /// Rotates the pair `(f, g)` with Hamiltonian block `h2` onto the symmetrically
    /// orthogonalized projections of the isolated-well orbitals of `level` onto
    /// `span(f, g)`. Orbitals come out positive at their well center (or at their first
    /// large lobe when the center is near a node), with `t ≥ 0`.
    pub fn localize(&self, f: &[f64], g: &[f64], h2: [[f64; 2]; 2], level: usize) -> Result<LocalizedPair> {
        let grid = &self.grid;
        let (ia, ib) = self.isolated_orbitals(level)?;
        // column j: coefficients of isolated orbital j projected onto (f, g)
        let m = Matrix2::new(
            grid.inner(f, &ia.values),
            grid.inner(f, &ib.values),
            grid.inner(g, &ia.values),
            grid.inner(g, &ib.values),
        );
        let eig = SymmetricEigen::new(m.transpose() * m);
        if eig.eigenvalues.min() <= 1e-12 {
            return Err(Error::InvalidWells(format!("isolated level-{level} orbitals do not span the doublet")));
        }
        let inv_sqrt = eig.eigenvectors
            * Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()))
            * eig.eigenvectors.transpose();
        let r = m * inv_sqrt;
        let hm = Matrix2::new(h2[0][0], 0.5 * (h2[0][1] + h2[1][0]), 0.5 * (h2[0][1] + h2[1][0]), h2[1][1]);
        let mut hl = r.transpose() * hm * r;
        let mut a: Vec<f64> = f.iter().zip(g).map(|(x, y)| r[(0, 0)] * x + r[(1, 0)] * y).collect();
        let mut b: Vec<f64> = f.iter().zip(g).map(|(x, y)| r[(0, 1)] * x + r[(1, 1)] * y).collect();

        let sa = gauge_sign(grid, &a, self.spec.center_a);
        let sb = gauge_sign(grid, &b, self.spec.center_b);
        a.iter_mut().for_each(|v| *v *= sa);
        b.iter_mut().for_each(|v| *v *= sb);
        hl[(0, 1)] *= sa * sb;
        let mut t = -hl[(0, 1)];
        if t < 0.0 {
            b.iter_mut().for_each(|v| *v = -*v);
            t = -t;
        }
        let (ea, eb) = (hl[(0, 0)], hl[(1, 1)]);
        Ok(LocalizedPair {
            psi_a: Orbital::new(*grid, a, ea, format!("{level}a")),
            psi_b: Orbital::new(*grid, b, eb, format!("{level}b")),
            e_a: ea,
            e_b: eb,
            t,
        })
    }

    /// Re-runs the localization on an already localized pair.
    pub fn relocalize(&self, pair: &LocalizedPair, level: usize) -> Result<LocalizedPair> {
        let h2 = [[pair.e_a, -pair.t], [-pair.t, pair.e_b]];
        self.localize(&pair.psi_a.values, &pair.psi_b.values, h2, level)
    }
}

fn gauge_sign(grid: &Grid, f: &[f64], center: f64) -> f64 {
    let max = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let c = f[grid.nearest(center)];
    let pick = if c.abs() >= 0.1 * max { c } else { f.iter().copied().find(|v| v.abs() >= 0.5 * max).unwrap_or(1.0) };
    if pick < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Orbitals localized in wells a and b with the tunneling amplitude between them.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedPair {
    pub psi_a: Orbital,
    pub psi_b: Orbital,
    pub e_a: f64,
    pub e_b: f64,
    pub t: f64,
}

impl LocalizedPair {
    /// Equal-weight combination `(ψ_a + ψ_b)/√2`, renormalized.
    pub fn balanced(&self, label: &str) -> Orbital {
        let v: Vec<f64> = self.psi_a.values.iter().zip(&self.psi_b.values).map(|(a, b)| a + b).collect();
        let s = self.psi_a.grid.norm(&v);
        Orbital::new(
            self.psi_a.grid,
            v.iter().map(|x| x / s).collect(),
            0.5 * (self.e_a + self.e_b) - self.t,
            label,
        )
    }
}

/// Direct tunneling admixture `t / (E_a - E_b)`, valid for `t ≤ 0.1·|E_a - E_b|`.
pub fn perturbative_mixing_direct(pair: &LocalizedPair) -> Result<f64> {
    let detuning = pair.e_a - pair.e_b;
    if pair.t == 0.0 {
        return Ok(0.0);
    }
    if !(pair.t.abs() <= 0.1 * detuning.abs()) {
        return Err(Error::NonPerturbative { coupling: pair.t, detuning });
    }
    Ok(pair.t / detuning)
}

/// Number of Simpson intervals used for the under-barrier integral.
pub const WKB_INTERVALS: usize = 200_000;

/// Under-barrier action `∫ sqrt(2(U - E)) dx` between the turning points enclosing the barrier.
pub fn wkb_exponent(spec: &DoubleWellSpec, energy: f64) -> Result<f64> {
    let (lo, hi) = (spec.center_a, spec.center_b);
    let top = spec.barrier_top();
    let tol_top = 1e-12 * energy.abs().max(1.0);
    if energy > top + tol_top {
        return Err(Error::NoBarrier { energy, top });
    }
    if (energy - top).abs() <= tol_top {
        return Ok(0.0);
    }
    let f = |x: f64| spec.potential_at(x) - energy;
    let samples = 20_000;
    let dx = (hi - lo) / samples as f64;
    let mut changes = Vec::new();
    let mut prev = f(lo);
    for i in 1..=samples {
        let x = lo + i as f64 * dx;
        let cur = f(x);
        if (prev < 0.0) != (cur < 0.0) {
            changes.push((x - dx, x));
        }
        prev = cur;
    }
    if changes.len() != 2 {
        return Err(Error::TurningPointAmbiguity { count: changes.len() });
    }
    // bisection; keep the endpoint on the classically forbidden side
    let refine = |(mut a, mut b): (f64, f64)| -> f64 {
        let fa_neg = f(a) < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(m) < 0.0) == fa_neg {
                a = m;
            } else {
                b = m;
            }
            if b - a <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
        }
        if fa_neg {
            b
        } else {
            a
        }
    };
    let x1 = refine(changes[0]);
    let x2 = refine(changes[1]);
    let p = |x: f64| (2.0 * f(x).max(0.0)).sqrt();
    Ok(simpson(p, x1, x2, WKB_INTERVALS))
}

pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Depth of well b that puts its isolated level `level` (1-based) at the energy of the same
/// level of isolated well a. Used to build resonant level-2 configurations.
pub fn resonant_depth_b(spec: &DoubleWellSpec, grid: &Grid, level: usize) -> Result<f64> {
    if level == 0 {
        return Err(Error::InvalidArgument("levels are 1-based".into()));
    }
    let opts = EigenOptions::default();
    let level_of = |s: DoubleWellSpec| -> Result<f64> {
        let u = s.sample(grid)?;
        Ok(solve_potential(grid, &u, level, &opts)?[level - 1].energy)
    };
    let target = level_of(spec.isolated_a())?;
    let mut lo = 1e-6;
    let mut hi = 10.0 * spec.depth_a.max(1e-3) * (spec.width_a / spec.width_b).powi(2).max(1.0);
    let eb = |d: f64| level_of(DoubleWellSpec { depth_b: d, ..*spec }.isolated_b());
    if eb(lo)? < target || eb(hi)? > target {
        return Err(Error::InvalidArgument("resonant depth not bracketed".into()));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eb(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
