//! Block Davidson with a caller-supplied preconditioner and Olsen correction.
//!
//! Used where plain Krylov methods stall: operators with a huge kinetic spread and
//! near-degenerate target clusters (the two-body Hamiltonian). The block Rayleigh-Ritz
//! step resolves a cluster at a rate set by its gap to the rest of the spectrum.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{dot, finish, norm, residual_norm, EigenOptions, EigenPair, LinearOperator};
use crate::error::{Error, Result};

/// Approximate `(A - θ)⁻¹`.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], theta: f64, out: &mut [f64]);
}

fn orthonormalize_into(v: &mut Vec<Vec<f64>>, mut t: Vec<f64>, op: &dyn LinearOperator) -> bool {
    let t0 = norm(&t);
    if !(t0 > 0.0) || !t0.is_finite() {
        return false;
    }
    op.project(&mut t);
    for _ in 0..2 {
        for q in v.iter() {
            let c = dot(q, &t);
            t.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
    let s = norm(&t);
    if s <= 1e-6 * t0 || s == 0.0 {
        return false;
    }
    t.iter_mut().for_each(|x| *x /= s);
    v.push(t);
    true
}

/// k lowest eigenpairs. `guesses` seed the subspace (at least one is required);
/// `opts.basis` caps the subspace size and `opts.max_restarts` the number of iterations / 10.
pub fn davidson(
    op: &dyn LinearOperator,
    k: usize,
    precond: &dyn Preconditioner,
    guesses: &[Vec<f64>],
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if k == 0 || k > n || guesses.is_empty() {
        return Err(Error::InvalidArgument(format!("davidson needs 1 <= k <= {n} and initial guesses")));
    }
    let max_sub = opts.basis.unwrap_or((6 * k).max(k + 24)).min(n);
    let max_iter = 10 * opts.max_restarts.max(1);

    let mut v: Vec<Vec<f64>> = Vec::new();
    for g in guesses {
        orthonormalize_into(&mut v, g.clone(), op);
    }
    if v.is_empty() {
        return Err(Error::InvalidArgument("initial guesses are degenerate".into()));
    }
    let mut w: Vec<Vec<f64>> = Vec::new();
    let mut g: Vec<Vec<f64>> = Vec::new();
    let mut worst = f64::INFINITY;

    for iter in 0..max_iter {
        // extend W and the projected matrix for the new basis vectors
        while w.len() < v.len() {
            let j = w.len();
            let mut aw = vec![0.0; n];
            op.apply(&v[j], &mut aw);
            let row: Vec<f64> = v.iter().take(j + 1).map(|q| dot(q, &aw)).collect();
            for (i, gi) in g.iter_mut().enumerate() {
                gi.push(row[i]);
            }
            g.push(row);
            w.push(aw);
        }
        let m = v.len();
        let mat = DMatrix::from_fn(m, m, |i, j| 0.5 * (g[i][j] + g[j][i]));
        let eig = SymmetricEigen::new(mat);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let kk = k.min(m);

        let combine = |basis: &[Vec<f64>], j: usize| {
            let mut out = vec![0.0; n];
            for (q, c) in basis.iter().zip(eig.eigenvectors.column(j).iter()) {
                out.iter_mut().zip(q).for_each(|(o, qi)| *o += c * qi);
            }
            out
        };

        let mut ritz = Vec::with_capacity(kk);
        let mut unconverged = Vec::new();
        worst = 0.0;
        for &j in order.iter().take(kk) {
            let theta = eig.eigenvalues[j];
            let x = combine(&v, j);
            let ax = combine(&w, j);
            let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
            let rn = norm(&r);
            let scale = theta.abs().max(1.0);
            worst = worst.max(rn / scale);
            if rn > opts.tol * scale {
                unconverged.push((theta, x.clone(), r));
            }
            ritz.push((theta, x, ax));
        }
        log::debug!("davidson iter {iter}: subspace {m}, worst scaled residual {worst:e}");
        if unconverged.is_empty() && kk == k {
            let pairs = ritz
                .into_iter()
                .map(|(energy, mut x, _)| {
                    let s = norm(&x);
                    x.iter_mut().for_each(|c| *c /= s);
                    let residual = residual_norm(op, &x, energy);
                    EigenPair { energy, vector: x, residual }
                })
                .collect();
            return Ok(finish(pairs));
        }

        // corrections
        let mut corrections = Vec::with_capacity(unconverged.len());
        for (theta, x, r) in &unconverged {
            let mut mr = vec![0.0; n];
            precond.apply(r, *theta, &mut mr);
            let mut mx = vec![0.0; n];
            precond.apply(x, *theta, &mut mx);
            let denom = dot(x, &mx);
            let eps = if denom.abs() > 1e-300 { dot(x, &mr) / denom } else { 0.0 };
            let t: Vec<f64> = mr.iter().zip(&mx).map(|(a, b)| eps * b - a).collect();
            corrections.push(t);
        }

        if m + corrections.len() > max_sub {
            // collapse onto the lowest Ritz vectors (a few spares keep the cluster structure)
            let keep = (2 * k).max(k + 4).min(m);
            let mut nv = Vec::with_capacity(keep);
            let mut nw = Vec::with_capacity(keep);
            for &j in order.iter().take(keep) {
                nv.push(combine(&v, j));
                nw.push(combine(&w, j));
            }
            // re-orthonormalize for stability; W follows linearly
            for i in 0..nv.len() {
                for j in 0..i {
                    let c = dot(&nv[j], &nv[i]);
                    let (vj, wj) = (nv[j].clone(), nw[j].clone());
                    nv[i].iter_mut().zip(&vj).for_each(|(a, b)| *a -= c * b);
                    nw[i].iter_mut().zip(&wj).for_each(|(a, b)| *a -= c * b);
                }
                let s = norm(&nv[i]);
                nv[i].iter_mut().for_each(|a| *a /= s);
                nw[i].iter_mut().for_each(|a| *a /= s);
            }
            g = (0..nv.len()).map(|i| (0..nv.len()).map(|j| dot(&nv[i], &nw[j])).collect()).collect();
            v = nv;
            w = nw;
        }
        let before = v.len();
        for t in corrections {
            orthonormalize_into(&mut v, t, op);
        }
        if v.len() == before {
            // preconditioner produced nothing new: fall back to raw residuals
            for (_, _, r) in &unconverged {
                orthonormalize_into(&mut v, r.clone(), op);
            }
            if v.len() == before {
                break;
            }
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual: worst })
}
