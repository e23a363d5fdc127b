//! Thick-restart Lanczos with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, finish, norm, residual_norm, EigenOptions, EigenPair, LinearOperator};
use crate::error::{Error, Result};

struct Basis<'a> {
    op: &'a dyn LinearOperator,
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    h: Vec<Vec<f64>>,
}

impl<'a> Basis<'a> {
    fn new(op: &'a dyn LinearOperator) -> Self {
        Self { op, v: Vec::new(), av: Vec::new(), h: Vec::new() }
    }

    fn len(&self) -> usize {
        self.v.len()
    }

    /// Removes the components along the basis (two classical Gram-Schmidt passes).
    fn orthogonalize(&self, r: &mut [f64]) {
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.v.iter().map(|q| dot(q, r)).collect();
            for (q, c) in self.v.iter().zip(coeffs) {
                r.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
    }

    fn push(&mut self, v: Vec<f64>) {
        let mut w = vec![0.0; v.len()];
        self.op.apply(&v, &mut w);
        let m = self.len();
        let mut row: Vec<f64> = self.v.iter().map(|q| dot(q, &w)).collect();
        row.push(dot(&v, &w));
        for (i, hi) in self.h.iter_mut().enumerate() {
            hi.push(row[i]);
        }
        self.h.push(row);
        debug_assert_eq!(self.h.len(), m + 1);
        self.v.push(v);
        self.av.push(w);
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.len();
        DMatrix::from_fn(m, m, |i, j| 0.5 * (self.h[i][j] + self.h[j][i]))
    }

    fn combine(vs: &[Vec<f64>], coeffs: impl Iterator<Item = f64>) -> Vec<f64> {
        let mut out = vec![0.0; vs[0].len()];
        for (q, c) in vs.iter().zip(coeffs) {
            if c != 0.0 {
                out.iter_mut().zip(q).for_each(|(o, qi)| *o += c * qi);
            }
        }
        out
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// k lowest eigenpairs by thick-restart Lanczos.
///
/// Keeps `k + (m - k) / 2` Ritz vectors plus the next Krylov direction at every restart.
/// Projected matrix elements are computed explicitly, so the basis need not stay tridiagonal.
pub fn lanczos(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("requested {k} eigenpairs of a dimension-{n} operator")));
    }
    let m = opts.basis.unwrap_or((2 * k + 20).max(k + 30)).min(n).max(k.min(n));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis::new(op);

    let mut start = random_vector(&mut rng, n);
    op.project(&mut start);
    let s = norm(&start);
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("projector annihilates the start vector".into()));
    }
    start.iter_mut().for_each(|x| *x /= s);
    basis.push(start);

    let mut exhausted = false;
    let mut matvecs = 1usize;
    for restart in 0..=opts.max_restarts {
        while basis.len() < m && !exhausted {
            let last = basis.av.last().unwrap();
            let scale = norm(last).max(1.0);
            let mut r = last.clone();
            op.project(&mut r);
            basis.orthogonalize(&mut r);
            let mut nr = norm(&r);
            if nr <= 1e-10 * scale {
                // invariant subspace reached: continue with a fresh random direction
                r = random_vector(&mut rng, n);
                op.project(&mut r);
                basis.orthogonalize(&mut r);
                basis.orthogonalize(&mut r);
                nr = norm(&r);
                if nr <= 1e-8 {
                    exhausted = true;
                    break;
                }
            }
            r.iter_mut().for_each(|x| *x /= nr);
            basis.push(r);
            matvecs += 1;
        }

        let msize = basis.len();
        let eig = SymmetricEigen::new(basis.projected());
        let mut order: Vec<usize> = (0..msize).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let kk = k.min(msize);

        let mut worst: f64 = 0.0;
        let mut converged = true;
        for &j in order.iter().take(kk) {
            let theta = eig.eigenvalues[j];
            let y = eig.eigenvectors.column(j);
            let x = Basis::combine(&basis.v, y.iter().copied());
            let ax = Basis::combine(&basis.av, y.iter().copied());
            let res = ax.iter().zip(&x).map(|(a, b)| (a - theta * b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(res / theta.abs().max(1.0));
            if res > opts.tol * theta.abs().max(1.0) {
                converged = false;
            }
        }
        if kk < k && !exhausted {
            converged = false;
        }
        log::debug!("lanczos restart {restart}: basis {msize}, worst scaled residual {worst:e}");

        if converged || exhausted {
            if kk < k {
                return Err(Error::InvalidArgument(format!("operator range has dimension {kk} < {k}")));
            }
            let pairs = order
                .iter()
                .take(k)
                .map(|&j| {
                    let y = eig.eigenvectors.column(j);
                    let mut x = Basis::combine(&basis.v, y.iter().copied());
                    let s = norm(&x);
                    x.iter_mut().for_each(|v| *v /= s);
                    let energy = eig.eigenvalues[j];
                    let residual = residual_norm(op, &x, energy);
                    EigenPair { energy, vector: x, residual }
                })
                .collect();
            return Ok(finish(pairs));
        }
        if restart == opts.max_restarts {
            return Err(Error::NoConvergence { iterations: matvecs, residual: worst });
        }

        // next Krylov direction from the last basis vector
        let mut f = basis.av.last().unwrap().clone();
        op.project(&mut f);
        basis.orthogonalize(&mut f);
        let nf = norm(&f);

        let keep = (k + (msize - k) / 2).min(msize.saturating_sub(1)).max(k.min(msize));
        let mut fresh = Basis::new(op);
        let mut kept_v = Vec::with_capacity(keep);
        let mut kept_av = Vec::with_capacity(keep);
        for &j in order.iter().take(keep) {
            let y = eig.eigenvectors.column(j);
            kept_v.push(Basis::combine(&basis.v, y.iter().copied()));
            kept_av.push(Basis::combine(&basis.av, y.iter().copied()));
        }
        // re-orthonormalize the kept Ritz vectors to curb drift
        for i in 0..kept_v.len() {
            for j in 0..i {
                let c = dot(&kept_v[j], &kept_v[i]);
                let (vj, avj) = (kept_v[j].clone(), kept_av[j].clone());
                kept_v[i].iter_mut().zip(&vj).for_each(|(a, b)| *a -= c * b);
                kept_av[i].iter_mut().zip(&avj).for_each(|(a, b)| *a -= c * b);
            }
            let s = norm(&kept_v[i]);
            kept_v[i].iter_mut().for_each(|a| *a /= s);
            kept_av[i].iter_mut().for_each(|a| *a /= s);
        }
        for (v, av) in kept_v.into_iter().zip(kept_av) {
            let row: Vec<f64> = fresh.v.iter().map(|q| dot(q, &av)).chain(std::iter::once(dot(&v, &av))).collect();
            for (i, hi) in fresh.h.iter_mut().enumerate() {
                hi.push(row[i]);
            }
            fresh.h.push(row);
            fresh.v.push(v);
            fresh.av.push(av);
        }
        basis = fresh;
        if nf > 1e-10 * norm(basis.av.last().unwrap()).max(1.0) {
            let mut f = f;
            basis.orthogonalize(&mut f);
            let s = norm(&f);
            f.iter_mut().for_each(|x| *x /= s);
            basis.push(f);
            matvecs += 1;
        }
    }
    unreachable!("loop returns on the final restart")
}
