//! Coulomb matrix elements, the exchange source term and distance scans.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{DoubleWellSpec, Grid, InteractionKernel};
use crate::single_particle::{DoubleWell, LocalizedPair, Orbital};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombElement {
    pub value: f64,
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

fn common_grid(orbitals: &[&Orbital]) -> Result<Grid> {
    let g = orbitals[0].grid;
    if orbitals.iter().any(|o| !o.grid.same_as(&g) || o.values.len() != g.n) {
        return Err(Error::GridMismatch);
    }
    Ok(g)
}

/// `φ(x_i) = h Σ_j V(x_i, x_j) ρ(x_j)`, rows in parallel.
pub fn kernel_potential(grid: &Grid, kernel: &InteractionKernel, density: &[f64]) -> Vec<f64> {
    let row = kernel.row(grid);
    let n = grid.n;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for (j, rho) in density.iter().enumerate() {
                s += row[i.abs_diff(j)] * rho;
            }
            grid.h * s
        })
        .collect()
}

/// `∬ f1(x) f2(x) V(x, x') f3(x') f4(x') dx dx'` as a double Riemann sum.
pub fn coulomb_matrix_element(
    f1: &Orbital,
    f2: &Orbital,
    f3: &Orbital,
    f4: &Orbital,
    kernel: &InteractionKernel,
) -> Result<CoulombElement> {
    let grid = common_grid(&[f1, f2, f3, f4])?;
    Ok(CoulombElement { value: element_raw(&grid, &f1.values, &f2.values, &f3.values, &f4.values, kernel), separation: None })
}

pub(crate) fn element_raw(grid: &Grid, f1: &[f64], f2: &[f64], f3: &[f64], f4: &[f64], kernel: &InteractionKernel) -> f64 {
    let right: Vec<f64> = f3.iter().zip(f4).map(|(a, b)| a * b).collect();
    let phi = kernel_potential(grid, kernel, &right);
    grid.h * f1.iter().zip(f2).zip(&phi).map(|((a, b), p)| a * b * p).sum::<f64>()
}

/// `K(x) = Σ_q ψ_q(x) ∫ ψ_q(x') V(x, x') target(x') dx'`.
pub fn exchange_source(occupied: &[Orbital], target: &Orbital, kernel: &InteractionKernel) -> Result<ExchangeField> {
    let grid = target.grid;
    let mut values = vec![0.0; grid.n];
    for q in occupied {
        common_grid(&[q, target])?;
        let rho: Vec<f64> = q.values.iter().zip(&target.values).map(|(a, b)| a * b).collect();
        let phi = kernel_potential(&grid, kernel, &rho);
        values.iter_mut().zip(q.values.iter().zip(&phi)).for_each(|(k, (psi, p))| *k += psi * p);
    }
    Ok(ExchangeField { grid, values })
}

/// Orbitals of one geometry in a separation scan.
#[derive(Debug, Clone)]
pub struct ScanGeometry {
    pub separation: f64,
    pub pair1: LocalizedPair,
    pub pair2: LocalizedPair,
    /// Level-2 orbital spread over both wells, `(ψ₂a + ψ₂b)/√2`.
    pub psi2: Orbital,
}

/// Rebuilds the wells at separation `d` on `grid` and localizes the two lowest doublets.
pub fn scan_geometry(base: &DoubleWellSpec, grid: &Grid, d: f64) -> Result<ScanGeometry> {
    let sys = DoubleWell::new(base.with_separation(d), *grid)?;
    let levels = sys.levels(5)?;
    let pair1 = sys.localize_doublet(&levels, 0)?;
    let pair2 = sys.localize_doublet(&levels, 2)?;
    let psi2 = pair2.balanced("2");
    Ok(ScanGeometry { separation: d, pair1, pair2, psi2 })
}

/// Which orbitals sit on the two legs of the scanned element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Legs {
    /// `G = element(ψ₂, ψ₁a; ψ₁b, ψ₂)`: both legs are products of orthogonal orbitals.
    Exchange,
    /// `element(ψ₁a, ψ₁a; ψ₁b, ψ₁b)`: non-orthogonal legs, the monopole survives.
    Control,
}

pub fn legs_element(geo: &ScanGeometry, legs: Legs, kernel: &InteractionKernel) -> Result<CoulombElement> {
    let (a, b) = (&geo.pair1.psi_a, &geo.pair1.psi_b);
    let el = match legs {
        Legs::Exchange => coulomb_matrix_element(&geo.psi2, a, b, &geo.psi2, kernel)?,
        Legs::Control => coulomb_matrix_element(a, a, b, b, kernel)?,
    };
    Ok(CoulombElement { separation: Some(geo.separation), ..el })
}

/// `(d, element)` table over separations, one geometry per `d`, evaluated in parallel.
pub fn exchange_distance_scan(
    base: &DoubleWellSpec,
    grid: &Grid,
    separations: &[f64],
    legs: Legs,
    kernel: &InteractionKernel,
) -> Result<Vec<CoulombElement>> {
    separations
        .par_iter()
        .map(|&d| legs_element(&scan_geometry(base, grid, d)?, legs, kernel))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contribution {
    pub value: f64,
    pub nodes: usize,
    /// Sign of `ψ_q(target center) · ψ_q(probe center)`.
    pub sign_product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub contributions: Vec<Contribution>,
    pub total: f64,
}

/// Splits `⟨probe|K⟩` into per-orbital terms `c_q = element(probe, ψ_q; ψ_q, target)`.
pub fn coherence_projection(
    externals: &[Orbital],
    target: &Orbital,
    probe: &Orbital,
    kernel: &InteractionKernel,
) -> Result<CoherenceReport> {
    let grid = common_grid(&[target, probe])?;
    for q in externals {
        common_grid(&[q, target])?;
    }
    let mut deviation: f64 = 0.0;
    for (i, p) in externals.iter().enumerate() {
        for q in externals.iter().skip(i) {
            let ov = p.overlap(q);
            let expect = if std::ptr::eq(p, q) { 1.0 } else { 0.0 };
            deviation = deviation.max((ov - expect).abs());
        }
    }
    if deviation > 1e-6 {
        return Err(Error::NonOrthonormal { deviation });
    }
    let peak = |o: &Orbital| {
        o.values.iter().enumerate().fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) }).0
    };
    let (it, ip) = (peak(target), peak(probe));
    let contributions: Vec<Contribution> = externals
        .par_iter()
        .map(|q| Contribution {
            value: element_raw(&grid, &probe.values, &q.values, &q.values, &target.values, kernel),
            nodes: q.node_count(),
            sign_product: (q.values[it] * q.values[ip]).signum(),
        })
        .collect();
    let total = contributions.iter().map(|c| c.value).sum();
    Ok(CoherenceReport { contributions, total })
}

/// `count` orthonormal orbitals `ψ_q = β f + Σ_j M_qj g_j` sharing the component `β f` of
/// `envelope`, with `β² = beta2`, `M = sqrt(I − β² J)` and `g_j` disjoint `cos²` bumps of
/// width `bump_width` laid out from `bump_start` and orthogonalized against `f`.
pub fn coherent_externals(envelope: &Orbital, count: usize, beta2: f64, bump_start: f64, bump_width: f64) -> Result<Vec<Orbital>> {
    let grid = envelope.grid;
    if count == 0 || !(beta2 > 0.0) || beta2 * count as f64 >= 1.0 {
        return Err(Error::InvalidArgument(format!("need count >= 1 and 0 < beta2 * count < 1 (got {beta2} x {count})")));
    }
    if !(bump_width > 2.0 * grid.h) || bump_start + count as f64 * bump_width > grid.x_max {
        return Err(Error::InvalidArgument("bumps do not fit on the grid".into()));
    }
    let f: Vec<f64> = envelope.values.iter().map(|v| v / grid.norm(&envelope.values)).collect();
    let mut basis: Vec<Vec<f64>> = vec![f.clone()];
    for j in 0..count {
        let c = bump_start + (j as f64 + 0.5) * bump_width;
        let mut g: Vec<f64> = grid
            .points()
            .iter()
            .map(|x| {
                let u = (x - c) / bump_width;
                if u.abs() < 0.5 {
                    (std::f64::consts::PI * u).cos().powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        for b in &basis {
            let p = grid.inner(b, &g);
            g.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let s = grid.norm(&g);
        g.iter_mut().for_each(|x| *x /= s);
        basis.push(g);
    }
    // sqrt(I − β²J) = I + c J, since J has the single nonzero eigenvalue `count`
    let n = count as f64;
    let cj = ((1.0 - beta2 * n).sqrt() - 1.0) / n;
    let beta = beta2.sqrt();
    Ok((0..count)
        .map(|q| {
            let mut v: Vec<f64> = f.iter().map(|x| beta * x).collect();
            for (j, g) in basis[1..].iter().enumerate() {
                let m = cj + if j == q { 1.0 } else { 0.0 };
                v.iter_mut().zip(g).for_each(|(x, y)| *x += m * y);
            }
            Orbital::new(grid, v, envelope.energy, format!("ext{}", q + 1))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WellShape;
    use proptest::prelude::*;

    fn smooth(grid: &Grid, c: f64, w: f64, p: i32) -> Orbital {
        let v: Vec<f64> = grid.points().iter().map(|x| (x - c).powi(p) * (-(x - c).powi(2) / (2.0 * w * w)).exp()).collect();
        let s = grid.norm(&v);
        Orbital::new(*grid, v.iter().map(|x| x / s).collect(), 0.0, "s")
    }

    /// Independent oracle: direct double loop with the kernel evaluated pointwise.
    fn brute(grid: &Grid, f: [&dyn Fn(f64) -> f64; 4], k: &InteractionKernel) -> f64 {
        let x = grid.points();
        let mut s = 0.0;
        for &xi in &x {
            let l = f[0](xi) * f[1](xi);
            for &xj in &x {
                s += l * k.value(xi, xj) * f[2](xj) * f[3](xj);
            }
        }
        s * grid.h * grid.h
    }

    #[test]
    fn zero_kernel_gives_zero() {
        let g = Grid::new(-5.0, 5.0, 101).unwrap();
        let a = smooth(&g, -1.0, 0.7, 0);
        let k = InteractionKernel::new(0.0, 1.0).unwrap();
        assert_eq!(coulomb_matrix_element(&a, &a, &a, &a, &k).unwrap().value, 0.0);
    }

    #[test]
    fn constant_kernel_and_orthogonal_legs_vanish() {
        // softening far larger than the box makes V constant to ~1e-8
        let g = Grid::new(-5.0, 5.0, 201).unwrap();
        let a = smooth(&g, 0.0, 0.8, 0);
        let b = smooth(&g, 0.0, 0.8, 1);
        assert!(a.overlap(&b).abs() < 1e-12);
        let k = InteractionKernel::new(1e4, 1e4).unwrap();
        let el = coulomb_matrix_element(&a, &b, &a, &a, &k).unwrap().value;
        assert!(el.abs() < 1e-6, "{el}");
        let ex = exchange_source(std::slice::from_ref(&a), &a, &k).unwrap();
        for (kv, av) in ex.values.iter().zip(&a.values) {
            assert!((kv - av).abs() < 1e-6);
        }
    }

    #[test]
    fn matches_refined_double_sum() {
        let k = InteractionKernel::new(1.0, 1.0).unwrap();
        let fs: [&dyn Fn(f64) -> f64; 4] = [
            &|x: f64| (-(x + 1.0f64).powi(2)).exp(),
            &|x: f64| (x * 0.7).cos() * (-(x * x) / 4.0).exp(),
            &|x: f64| (1.0 + 0.3 * x) * (-(x - 1.5f64).powi(2) / 2.0).exp(),
            &|x: f64| (-(x * x) / 3.0).exp(),
        ];
        let coarse = Grid::new(-6.0, 6.0, 64).unwrap();
        let fine = Grid::new(-6.0, 6.0, 127).unwrap();
        let orb = |g: &Grid, f: &dyn Fn(f64) -> f64| Orbital::new(*g, g.points().iter().map(|&x| f(x)).collect(), 0.0, "f");
        let o: Vec<Orbital> = fs.iter().map(|f| orb(&coarse, *f)).collect();
        let ours = coulomb_matrix_element(&o[0], &o[1], &o[2], &o[3], &k).unwrap().value;
        let oracle = brute(&fine, fs, &k);
        assert!((ours - oracle).abs() / oracle.abs() < 1e-4, "{ours} vs {oracle}");
    }

    #[test]
    fn source_projection_equals_element() {
        let spec = DoubleWellSpec::symmetric(WellShape::Square, 5.0, 6.0, 1.2);
        let grid = Grid::centered(9.6, 0.02).unwrap();
        let geo = scan_geometry(&spec, &grid, 5.0).unwrap();
        let k = InteractionKernel::new(0.3, 1.0).unwrap();
        let kf = exchange_source(std::slice::from_ref(&geo.psi2), &geo.pair1.psi_a, &k).unwrap();
        let proj = grid.inner(&geo.pair1.psi_b.values, &kf.values);
        let g = legs_element(&geo, Legs::Exchange, &k).unwrap().value;
        assert!((proj - g).abs() <= 1e-10 * g.abs().max(1e-300), "{proj} vs {g}");
        assert!(exchange_source(&[], &geo.pair1.psi_a, &k).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = Grid::new(-5.0, 5.0, 101).unwrap();
        let g2 = Grid::new(-5.0, 5.0, 103).unwrap();
        let a = smooth(&g1, 0.0, 1.0, 0);
        let b = smooth(&g2, 0.0, 1.0, 0);
        let k = InteractionKernel::default();
        assert_eq!(coulomb_matrix_element(&a, &a, &b, &b, &k), Err(Error::GridMismatch));
    }

    #[test]
    fn orbital_sign_does_not_change_source() {
        let g = Grid::new(-6.0, 6.0, 181).unwrap();
        let q = smooth(&g, 1.0, 0.9, 1);
        let t = smooth(&g, -1.0, 0.6, 0);
        let k = InteractionKernel::default();
        let k1 = exchange_source(std::slice::from_ref(&q), &t, &k).unwrap();
        let k2 = exchange_source(&[q.negated()], &t, &k).unwrap();
        assert_eq!(k1.values, k2.values);
    }

    #[test]
    fn coherence_rejects_non_orthonormal() {
        let g = Grid::new(-6.0, 6.0, 181).unwrap();
        let a = smooth(&g, 1.0, 0.9, 0);
        let b = smooth(&g, 1.2, 0.9, 0);
        let k = InteractionKernel::default();
        assert!(matches!(coherence_projection(&[a.clone(), b], &a, &a, &k), Err(Error::NonOrthonormal { .. })));
    }

    #[test]
    fn coherent_set_is_orthonormal_and_shares_the_envelope() {
        let g = Grid::new(-8.0, 16.0, 961).unwrap();
        let f = smooth(&g, 0.0, 2.0, 0);
        let ext = coherent_externals(&f, 4, 0.1, 6.0, 1.5).unwrap();
        for (i, p) in ext.iter().enumerate() {
            assert!((p.overlap(&f) - 0.1f64.sqrt()).abs() < 1e-8);
            for (j, q) in ext.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.overlap(q) - e).abs() < 1e-10);
            }
        }
        assert!(coherent_externals(&f, 10, 0.1, 6.0, 1.5).is_err());
        assert!(coherent_externals(&f, 8, 0.1, 6.0, 1.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn elements_are_linear_in_lambda_and_leg_symmetric(
            c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, w1 in 0.4f64..1.5, w2 in 0.4f64..1.5,
            lam in 0.1f64..3.0, s in 0.3f64..2.0,
        ) {
            let g = Grid::new(-8.0, 8.0, 161).unwrap();
            let a = smooth(&g, c1, w1, 0);
            let b = smooth(&g, c2, w2, 1);
            let k = InteractionKernel::new(lam, s).unwrap();
            let k2 = k.with_lambda(2.5 * lam);
            let e1 = coulomb_matrix_element(&a, &b, &b, &a, &k).unwrap().value;
            let e2 = coulomb_matrix_element(&a, &b, &b, &a, &k2).unwrap().value;
            prop_assert!((e2 - 2.5 * e1).abs() <= 1e-12 * e2.abs().max(1e-300));
            let f = coulomb_matrix_element(&a, &a, &b, &a, &k).unwrap().value;
            let r = coulomb_matrix_element(&b, &a, &a, &a, &k).unwrap().value;
            prop_assert!((f - r).abs() <= 1e-12 * f.abs().max(1e-300));
            let s1 = exchange_source(std::slice::from_ref(&b), &a, &k).unwrap();
            let s2 = exchange_source(std::slice::from_ref(&b), &a, &k2).unwrap();
            for (x, y) in s1.values.iter().zip(&s2.values) {
                prop_assert!((y - 2.5 * x).abs() <= 1e-12 * y.abs().max(1e-300));
            }
        }
    }
}
