//! Exact two-particle diagonalization on the product grid.
//!
//! States are stored in a basis reduced by exchange symmetry: `(|ij⟩ ∓ |ji⟩)/√2` for
//! `i < j` (antisymmetric) and additionally `|ii⟩` (symmetric). Coefficient vectors are
//! Euclidean; the grid wavefunction is `Ψ(x_i, x_j) = M_ij / h` with `M` the expanded matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::SQRT_2;

use crate::eigen::{davidson, lowest_eigenpairs_with, EigenOptions, EigenPair, LinearOperator, Method, Preconditioner, DENSE_GENERAL_LIMIT};
use crate::error::{Error, Result};
use crate::exchange::coulomb_matrix_element;
use crate::model::{Grid, InteractionKernel};
use crate::single_particle::{DoubleWell, LocalizedPair, Orbital};

/// Largest grid accepted for the product space.
pub const MAX_POINTS: usize = 512;
/// Scaled residual required of two-body eigenpairs.
pub const TWO_BODY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Antisymmetric,
    Symmetric,
}

impl Sector {
    pub fn name(&self) -> &'static str {
        match self {
            Sector::Antisymmetric => "antisymmetric",
            Sector::Symmetric => "symmetric",
        }
    }

    fn dim(&self, n: usize) -> usize {
        match self {
            Sector::Antisymmetric => n * (n - 1) / 2,
            Sector::Symmetric => n * (n + 1) / 2,
        }
    }

    fn sign(&self) -> f64 {
        match self {
            Sector::Antisymmetric => -1.0,
            Sector::Symmetric => 1.0,
        }
    }
}

/// Index of the ordered pair `(i, j)` (`i < j`, or `i ≤ j` when symmetric).
#[inline]
fn pair_index(sector: Sector, n: usize, i: usize, j: usize) -> usize {
    match sector {
        Sector::Antisymmetric => i * n - i * (i + 1) / 2 + (j - i - 1),
        Sector::Symmetric => i * n - (i * i - i) / 2 + (j - i),
    }
}

fn pairs(sector: Sector, n: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(sector.dim(n));
    for i in 0..n {
        let start = if sector == Sector::Antisymmetric { i + 1 } else { i };
        for j in start..n {
            out.push((i as u32, j as u32));
        }
    }
    out
}

/// Expands reduced coefficients into the full `n × n` matrix.
pub fn expand(sector: Sector, n: usize, c: &[f64]) -> DMatrix<f64> {
    let s = sector.sign();
    let mut m = DMatrix::zeros(n, n);
    for (k, (i, j)) in pairs(sector, n).into_iter().enumerate() {
        let (i, j) = (i as usize, j as usize);
        if i == j {
            m[(i, i)] = c[k];
        } else {
            m[(i, j)] = c[k] / SQRT_2;
            m[(j, i)] = s * c[k] / SQRT_2;
        }
    }
    m
}

/// Adjoint of [`expand`]: projects a full matrix onto the sector.
pub fn compress(sector: Sector, m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let s = sector.sign();
    pairs(sector, n)
        .into_iter()
        .map(|(i, j)| {
            let (i, j) = (i as usize, j as usize);
            if i == j {
                m[(i, i)]
            } else {
                (m[(i, j)] + s * m[(j, i)]) / SQRT_2
            }
        })
        .collect()
}

/// `H = h ⊗ 1 + 1 ⊗ h + V(x₁, x₂)` restricted to one exchange sector.
pub struct TwoBodyOperator {
    pub grid: Grid,
    pub sector: Sector,
    pairs: Vec<(u32, u32)>,
    diag: Vec<f64>,
    hop: f64,
}

impl TwoBodyOperator {
    pub fn n(&self) -> usize {
        self.grid.n
    }
}

pub fn build_two_body(system: &DoubleWell, kernel: &InteractionKernel, sector: Sector) -> Result<TwoBodyOperator> {
    let grid = system.grid;
    if grid.n > MAX_POINTS {
        return Err(Error::TooLarge { n: grid.n, max: MAX_POINTS });
    }
    let c = 0.5 / (grid.h * grid.h);
    let row = kernel.row(&grid);
    let u = &system.potential;
    let pairs = pairs(sector, grid.n);
    let diag = pairs
        .iter()
        .map(|&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            4.0 * c + u[i] + u[j] + row[j - i]
        })
        .collect();
    Ok(TwoBodyOperator { grid, sector, pairs, diag, hop: c })
}

impl LinearOperator for TwoBodyOperator {
    fn dim(&self) -> usize {
        self.pairs.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.grid.n;
        let sector = self.sector;
        let c = self.hop;
        y.par_iter_mut().enumerate().for_each(|(k, out)| {
            let (i, j) = (self.pairs[k].0 as usize, self.pairs[k].1 as usize);
            let mut acc = self.diag[k] * x[k];
            let mut take = |a: usize, b: usize, w: f64| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if sector == Sector::Antisymmetric && lo == hi {
                    return;
                }
                acc -= w * x[pair_index(sector, n, lo, hi)];
            };
            if i == j {
                // |ii⟩ couples to (i∓1, i) with weight √2 each
                if i > 0 {
                    take(i - 1, i, c * SQRT_2);
                }
                if i + 1 < n {
                    take(i, i + 1, c * SQRT_2);
                }
            } else {
                let w = |a: usize, b: usize| if a == b { c * SQRT_2 } else { c };
                if i > 0 {
                    take(i - 1, j, w(i - 1, j));
                }
                if i + 1 < n {
                    take(i + 1, j, w(i + 1, j));
                }
                if j > 0 {
                    take(i, j - 1, w(i, j - 1));
                }
                if j + 1 < n {
                    take(i, j + 1, w(i, j + 1));
                }
            }
            *out = acc;
        });
    }
}

/// Exact `(H₀ − θ)⁻¹` of the non-interacting part, applied in the one-body eigenbasis.
struct NonInteractingInverse {
    sector: Sector,
    phi: DMatrix<f64>,
    eps: Vec<f64>,
}

impl Preconditioner for NonInteractingInverse {
    fn apply(&self, r: &[f64], theta: f64, out: &mut [f64]) {
        let m = expand(self.sector, self.phi.nrows(), r);
        let mut t = self.phi.transpose() * m * &self.phi;
        let floor = 1e-8 * theta.abs().max(1.0);
        for p in 0..t.nrows() {
            for q in 0..t.ncols() {
                let mut d = self.eps[p] + self.eps[q] - theta;
                if d.abs() < floor {
                    d = floor.copysign(d);
                }
                t[(p, q)] /= d;
            }
        }
        let back = &self.phi * t * self.phi.transpose();
        out.copy_from_slice(&compress(self.sector, &back));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyState {
    pub grid: Grid,
    pub sector: Sector,
    /// Euclidean-normalized reduced coefficients.
    pub coefficients: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
}

impl TwoBodyState {
    /// Expanded coefficient matrix (Euclidean, `‖M‖_F = 1`).
    pub fn matrix(&self) -> DMatrix<f64> {
        expand(self.sector, self.grid.n, &self.coefficients)
    }

    pub fn overlap(&self, reduced: &[f64]) -> f64 {
        self.coefficients.iter().zip(reduced).map(|(a, b)| a * b).sum()
    }
}

/// Reduced coefficients of the (anti)symmetrized product of two orthonormal orbitals.
pub fn product_state(sector: Sector, f: &Orbital, g: &Orbital) -> Vec<f64> {
    let n = f.grid.n;
    let h = f.grid.h;
    let m = DMatrix::from_fn(n, n, |i, j| h * (f.values[i] * g.values[j] + sector.sign() * g.values[i] * f.values[j]));
    let mut c = compress(sector, &m);
    let s = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s > 0.0 {
        c.iter_mut().for_each(|v| *v /= s);
    }
    c
}

/// How the two-body eigenproblem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense up to [`DENSE_GENERAL_LIMIT`], preconditioned Davidson above.
    Auto,
    Dense,
    Davidson,
}

/// Lowest `k` two-body eigenstates in `sector`.
pub fn lowest_states(system: &DoubleWell, kernel: &InteractionKernel, sector: Sector, k: usize) -> Result<Vec<TwoBodyState>> {
    lowest_states_with(system, kernel, sector, k, Solver::Auto)
}

pub fn lowest_states_with(
    system: &DoubleWell,
    kernel: &InteractionKernel,
    sector: Sector,
    k: usize,
    solver: Solver,
) -> Result<Vec<TwoBodyState>> {
    let op = build_two_body(system, kernel, sector)?;
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!("asked for {k} states of a {dim}-dimensional sector")));
    }
    let dense = match solver {
        Solver::Auto => dim <= DENSE_GENERAL_LIMIT,
        Solver::Dense => true,
        Solver::Davidson => false,
    };
    let pairs: Vec<EigenPair> = if dense {
        lowest_eigenpairs_with(&op, k, &EigenOptions { method: Method::Dense, ..EigenOptions::default() })?
    } else {
        let n = system.grid.n;
        let one = system.hamiltonian();
        let (d, e) = one.tridiagonal().expect("one-body Hamiltonian is tridiagonal");
        let hm = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                d[i]
            } else if i.abs_diff(j) == 1 {
                e[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(hm);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let phi = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        let eps: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();

        // non-interacting configurations as starting vectors
        let nguess = (2 * k).max(k + 4);
        let mut configs = Vec::new();
        let reach = (nguess + 2).min(n);
        for p in 0..reach {
            let start = if sector == Sector::Antisymmetric { p + 1 } else { p };
            for q in start..reach {
                configs.push((eps[p] + eps[q], p, q));
            }
        }
        configs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let guesses: Vec<Vec<f64>> = configs
            .iter()
            .take(nguess)
            .map(|&(_, p, q)| {
                let (a, b) = (phi.column(p), phi.column(q));
                let m = if p == q { a * a.transpose() } else { (a * b.transpose() + sector.sign() * b * a.transpose()) / SQRT_2 };
                compress(sector, &m)
            })
            .collect();
        let pre = NonInteractingInverse { sector, phi, eps };
        let opts = EigenOptions { tol: TWO_BODY_TOL, max_restarts: 60, basis: Some((8 * k).max(k + 32)), ..EigenOptions::default() };
        davidson(&op, k, &pre, &guesses, &opts)?
    };
    Ok(pairs
        .into_iter()
        .map(|p| TwoBodyState { grid: system.grid, sector, coefficients: p.vector, energy: p.energy, residual: p.residual })
        .collect())
}

#[derive(Debug, Clone)]
pub struct ReducedDensity {
    /// `ρ(x_i, x_j)` with `h·tr ρ = 2`.
    pub matrix: DMatrix<f64>,
    pub natural_occupations: Vec<f64>,
    pub natural_orbitals: Vec<Orbital>,
}

pub fn one_body_rdm(state: &TwoBodyState) -> ReducedDensity {
    let grid = state.grid;
    let m = state.matrix();
    let occ = (&m * m.transpose()) * 2.0;
    let matrix = &occ / grid.h;
    let eig = SymmetricEigen::new(occ);
    let mut order: Vec<usize> = (0..grid.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let sh = grid.h.sqrt();
    let natural_orbitals = order
        .iter()
        .map(|&j| {
            let mut v: Vec<f64> = eig.eigenvectors.column(j).iter().map(|c| c / sh).collect();
            crate::eigen::fix_sign(&mut v);
            Orbital::new(grid, v, eig.eigenvalues[j], format!("no{}", j))
        })
        .collect();
    ReducedDensity { matrix, natural_occupations: order.iter().map(|&j| eig.eigenvalues[j]).collect(), natural_orbitals }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellBOccupation {
    /// `|⟨ψ₁b|φ⟩|²` for the occupied natural orbital `φ` closest to the level-1 doublet.
    pub projected: f64,
    /// `∫ |φ|²` beyond the barrier midpoint.
    pub region: f64,
    /// `|⟨φ|span(ψ₁a, ψ₁b)⟩|²`.
    pub doublet_weight: f64,
}

/// Occupation of well b by the level-1 particle, read off the natural orbitals.
pub fn well_b_occupation(rdm: &ReducedDensity, pair1: &LocalizedPair, midpoint: f64) -> Result<WellBOccupation> {
    let occupied: Vec<&Orbital> = rdm
        .natural_orbitals
        .iter()
        .zip(&rdm.natural_occupations)
        .filter(|(_, &o)| o >= 0.5)
        .map(|(p, _)| p)
        .collect();
    if occupied.is_empty() {
        return Err(Error::NoIdentifiableOrbital { best: 0.0 });
    }
    // best combination φ = Σ α_k φ_k of occupied orbitals inside span(ψ₁a, ψ₁b)
    let c = DMatrix::from_fn(occupied.len(), 2, |k, s| {
        occupied[k].overlap(if s == 0 { &pair1.psi_a } else { &pair1.psi_b })
    });
    let eig = SymmetricEigen::new(&c * c.transpose());
    let top = (0..occupied.len()).max_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap_or(0);
    let best = eig.eigenvalues[top];
    if best < 0.9 {
        return Err(Error::NoIdentifiableOrbital { best });
    }
    let alpha = eig.eigenvectors.column(top);
    let grid = pair1.psi_a.grid;
    let mut v = vec![0.0; grid.n];
    for (k, o) in occupied.iter().enumerate() {
        v.iter_mut().zip(&o.values).for_each(|(x, y)| *x += alpha[k] * y);
    }
    let phi = Orbital::new(grid, v, 0.0, "phi1");
    Ok(WellBOccupation { projected: phi.overlap(&pair1.psi_b).powi(2), region: phi.weight_beyond(midpoint), doublet_weight: best })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongCouplingResult {
    pub t_eff: f64,
    /// `Q_aa − Q_ab`, direct terms only.
    pub q: f64,
    /// `Q` with the exchange energies of both configurations included.
    pub q_exchange: f64,
    pub t2: f64,
    pub g: f64,
    /// `t₂² |G| / Q²`.
    pub predicted: f64,
    pub energies: [f64; 2],
    pub weights: [f64; 2],
}

/// Splitting of the doubly-occupied-well pair `ψ₁aψ₂a ± ψ₁bψ₂b` in the exact spectrum of two
/// identical fermions, against the three-step estimate.
pub fn strong_coupling_amplitude(system: &DoubleWell, kernel: &InteractionKernel) -> Result<StrongCouplingResult> {
    if !system.spec.is_symmetric() {
        return Err(Error::InvalidArgument("strong coupling needs symmetric wells".into()));
    }
    let levels = system.levels(6)?;
    let p1 = system.localize_doublet(&levels, 0)?;
    let p2 = system.localize_doublet(&levels, 2)?;
    let el = |a: &Orbital, b: &Orbital, c: &Orbital, d: &Orbital| coulomb_matrix_element(a, b, c, d, kernel).map(|e| e.value);
    let (a1, b1, a2, b2) = (&p1.psi_a, &p1.psi_b, &p2.psi_a, &p2.psi_b);
    let q_aa = el(a1, a1, a2, a2)?;
    let q_ab = el(a1, a1, b2, b2)?;
    let q = q_aa - q_ab;
    let q_exchange = q - el(a1, a2, a2, a1)? + el(a1, b2, b2, a1)?;
    let g = el(b1, b2, a2, a1)?;
    let t2 = p2.t;
    if !(q >= 10.0 * t2.max(g.abs())) {
        return Err(Error::RegimeViolation(format!("Q = {q:e} is not >= 10 max(t2 = {t2:e}, |G| = {:e})", g.abs())));
    }
    let states = lowest_states(system, kernel, Sector::Antisymmetric, 8)?;
    let c_aa = product_state(Sector::Antisymmetric, a1, a2);
    let c_bb = product_state(Sector::Antisymmetric, b1, b2);
    let mut scored: Vec<(f64, f64)> = states
        .iter()
        .map(|s| (s.overlap(&c_aa).powi(2) + s.overlap(&c_bb).powi(2), s.energy))
        .collect();
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));
    let found = scored.iter().filter(|s| s.0 >= 0.8).count();
    if found < 2 {
        return Err(Error::StatesNotIdentifiable { found });
    }
    let (lo, hi) = if scored[0].1 <= scored[1].1 { (scored[0], scored[1]) } else { (scored[1], scored[0]) };
    Ok(StrongCouplingResult {
        t_eff: 0.5 * (hi.1 - lo.1),
        q,
        q_exchange,
        t2,
        g,
        predicted: t2 * t2 * g.abs() / (q * q),
        energies: [lo.1, hi.1],
        weights: [lo.0, hi.0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DoubleWellSpec, WellShape};

    fn small(n: usize) -> DoubleWell {
        let spec = DoubleWellSpec::symmetric(WellShape::Square, 1.6, 4.0, 0.4);
        let half = 0.8 + 0.2 + 2.0 + 0.2;
        let grid = Grid::new(-half, half, n).unwrap();
        DoubleWell::new(spec, grid).unwrap()
    }

    #[test]
    fn index_formula_matches_enumeration() {
        for sector in [Sector::Antisymmetric, Sector::Symmetric] {
            for n in [2, 3, 7, 16] {
                for (k, (i, j)) in pairs(sector, n).into_iter().enumerate() {
                    assert_eq!(pair_index(sector, n, i as usize, j as usize), k, "{sector:?} n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn expand_is_an_isometry() {
        let c: Vec<f64> = (0..45).map(|i| (i as f64 * 0.37).sin()).collect();
        for (sector, dim) in [(Sector::Antisymmetric, 45), (Sector::Symmetric, 55)] {
            let n = 10;
            let c = &c.iter().cycle().take(dim).copied().collect::<Vec<_>>();
            let m = expand(sector, n, c);
            let cn: f64 = c.iter().map(|v| v * v).sum();
            assert!((m.norm_squared() - cn).abs() < 1e-12);
            assert!(compress(sector, &m).iter().zip(c).all(|(a, b)| (a - b).abs() < 1e-15));
            assert!((&m - sector.sign() * m.transpose()).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_full_product_diagonalization() {
        let sys = small(24);
        let k = InteractionKernel::new(0.7, 0.5).unwrap();
        let n = 24;
        let c = 0.5 / (sys.grid.h * sys.grid.h);
        let row = k.row(&sys.grid);
        let full = DMatrix::from_fn(n * n, n * n, |p, q| {
            let (i, j) = (p / n, p % n);
            let (a, b) = (q / n, q % n);
            let mut v = 0.0;
            if p == q {
                v += 4.0 * c + sys.potential[i] + sys.potential[j] + row[i.abs_diff(j)];
            }
            if j == b && i.abs_diff(a) == 1 {
                v -= c;
            }
            if i == a && j.abs_diff(b) == 1 {
                v -= c;
            }
            v
        });
        let eig = SymmetricEigen::new(full);
        for sector in [Sector::Antisymmetric, Sector::Symmetric] {
            let mut want: Vec<f64> = (0..n * n)
                .filter(|&m| {
                    let v = eig.eigenvectors.column(m);
                    let swapped: f64 = (0..n * n).map(|p| v[p] * v[(p % n) * n + p / n]).sum();
                    (swapped - sector.sign()).abs() < 1e-6
                })
                .map(|m| eig.eigenvalues[m])
                .collect();
            want.sort_by(f64::total_cmp);
            let op = build_two_body(&sys, &k, sector).unwrap();
            let got = crate::eigen::dense_eigenpairs(&op, op.dim()).unwrap();
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                assert!((g.energy - w).abs() < 1e-8, "{sector:?}: {} vs {w}", g.energy);
            }
        }
    }

    #[test]
    fn operator_is_symmetric() {
        let sys = small(30);
        let k = InteractionKernel::default();
        for sector in [Sector::Antisymmetric, Sector::Symmetric] {
            let op = build_two_body(&sys, &k, sector).unwrap();
            assert!(crate::eigen::symmetry_defect(&op, 3, 4) < 1e-12);
        }
    }

    #[test]
    fn too_large_grid_is_rejected() {
        let spec = DoubleWellSpec::symmetric(WellShape::Square, 2.0, 1.0, 0.2);
        let sys = DoubleWell::new(spec, Grid::new(-3.0, 3.0, 600).unwrap()).unwrap();
        assert!(matches!(
            build_two_body(&sys, &InteractionKernel::default(), Sector::Symmetric),
            Err(Error::TooLarge { n: 600, max: MAX_POINTS })
        ));
    }

    fn medium() -> DoubleWell {
        // large enough for the Davidson path
        let spec = DoubleWellSpec::symmetric(WellShape::Square, 3.0, 4.0, 0.8);
        let half = 1.5 + 0.4 + 4.0 + 0.3;
        DoubleWell::new(spec, Grid::new(-half, half, 96).unwrap()).unwrap()
    }

    #[test]
    fn non_interacting_limits() {
        let sys = medium();
        let lv = sys.levels(3).unwrap();
        let zero = InteractionKernel::new(0.0, 1.0).unwrap();
        let anti = lowest_states(&sys, &zero, Sector::Antisymmetric, 2).unwrap();
        assert!((anti[0].energy - (lv[0].energy + lv[1].energy)).abs() < 1e-6);
        let rdm = one_body_rdm(&anti[0]);
        assert!((rdm.natural_occupations[0] - 1.0).abs() < 1e-6 && (rdm.natural_occupations[1] - 1.0).abs() < 1e-6);
        assert!(rdm.natural_occupations[2].abs() < 1e-6);
        let sym = lowest_states(&sys, &zero, Sector::Symmetric, 2).unwrap();
        assert!((sym[0].energy - 2.0 * lv[0].energy).abs() < 1e-6);
        let rdm = one_body_rdm(&sym[0]);
        assert!((rdm.natural_occupations[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn davidson_path_agrees_with_dense() {
        let sys = medium();
        let k = InteractionKernel::new(0.5, 1.0).unwrap();
        for sector in [Sector::Antisymmetric, Sector::Symmetric] {
            let dense = lowest_states_with(&small(28), &k, sector, 6, Solver::Dense).unwrap();
            let ours = lowest_states_with(&small(28), &k, sector, 6, Solver::Davidson).unwrap();
            for (a, b) in dense.iter().zip(&ours) {
                assert!((a.energy - b.energy).abs() < 1e-9, "{} vs {}", a.energy, b.energy);
                assert!((a.overlap(&b.coefficients).abs() - 1.0).abs() < 1e-8);
            }
        }
        let op = build_two_body(&sys, &k, Sector::Antisymmetric).unwrap();
        assert!(op.dim() > DENSE_GENERAL_LIMIT);
    }

    #[test]
    fn rdm_trace_and_ground_energy_monotone() {
        let sys = medium();
        let mut last = f64::NEG_INFINITY;
        for lam in [0.0, 0.2, 0.6, 1.5] {
            let k = InteractionKernel::new(lam, 1.0).unwrap();
            let st = lowest_states(&sys, &k, Sector::Antisymmetric, 1).unwrap();
            let rdm = one_body_rdm(&st[0]);
            assert!((rdm.matrix.trace() * sys.grid.h - 2.0).abs() < 1e-8);
            assert!((&rdm.matrix - rdm.matrix.transpose()).amax() < 1e-10);
            assert!(rdm.natural_occupations.iter().all(|&o| o <= 1.0 + 1e-8));
            assert!(st[0].energy >= last - 1e-12);
            last = st[0].energy;
        }
    }
}
