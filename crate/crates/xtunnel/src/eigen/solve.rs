//! Deflated shifted linear solve `(A - E) x = P b` by MINRES.

use super::{axpy, dot, norm, LinearOperator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Required `‖P((A - E)x - b)‖ / ‖b‖`.
    pub tol: f64,
    /// MINRES iterations per refinement cycle; `None` uses `10·n + 100`.
    pub max_iter: Option<usize>,
    pub refinements: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: None, refinements: 6 }
    }
}

struct Deflated<'a> {
    op: &'a dyn LinearOperator,
    shift: f64,
    q: Vec<Vec<f64>>,
}

impl Deflated<'_> {
    fn project(&self, v: &mut [f64]) {
        self.op.project(v);
        for _ in 0..2 {
            for q in &self.q {
                let c = dot(q, v);
                axpy(-c, q, v);
            }
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut px = x.to_vec();
        self.project(&mut px);
        self.op.apply(&px, y);
        axpy(-self.shift, &px, y);
        self.project(y);
    }
}

fn minres(a: &Deflated, b: &[f64], tol: f64, maxit: usize) -> (Vec<f64>, usize) {
    let n = b.len();
    let mut x = vec![0.0; n];
    let beta1 = norm(b);
    if beta1 == 0.0 {
        return (x, 0);
    }
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = b.to_vec();
    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;
    let mut w = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut itn = 0;
    while itn < maxit {
        itn += 1;
        let s = 1.0 / beta;
        v.iter_mut().zip(&y).for_each(|(vi, yi)| *vi = s * yi);
        a.apply(&v, &mut y);
        if itn >= 2 {
            axpy(-beta / oldb, &r1, &mut y);
        }
        let alfa = dot(&v, &y);
        axpy(-alfa / beta, &r2, &mut y);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = norm(&r2);

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        let w1 = std::mem::replace(&mut w2, w.clone());
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        if phibar <= tol * beta1 || beta == 0.0 {
            break;
        }
    }
    (x, itn)
}

/// Solves `(A - E) x = P rhs` on the complement of `deflate`, returning `x ⟂ deflate`.
pub fn shifted_solve(op: &dyn LinearOperator, shift: f64, rhs: &[f64], deflate: &[Vec<f64>]) -> Result<Vec<f64>> {
    shifted_solve_with(op, shift, rhs, deflate, &SolveOptions::default())
}

pub fn shifted_solve_with(
    op: &dyn LinearOperator,
    shift: f64,
    rhs: &[f64],
    deflate: &[Vec<f64>],
    opts: &SolveOptions,
) -> Result<Vec<f64>> {
    let n = op.dim();
    if rhs.len() != n || deflate.iter().any(|d| d.len() != n) {
        return Err(Error::InvalidArgument("dimension mismatch in shifted_solve".into()));
    }
    // orthonormalize the deflation set (callers may pass grid-normalized vectors)
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(deflate.len());
    for d in deflate {
        let mut v = d.clone();
        for _ in 0..2 {
            for p in &q {
                let c = dot(p, &v);
                axpy(-c, p, &mut v);
            }
        }
        let s = norm(&v);
        if s > 1e-12 * norm(d).max(1e-300) {
            v.iter_mut().for_each(|x| *x /= s);
            q.push(v);
        }
    }
    let a = Deflated { op, shift, q };
    let mut b = rhs.to_vec();
    a.project(&mut b);
    let bnorm = norm(&b);
    if bnorm <= 1e-14 * norm(rhs) || bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let maxit = opts.max_iter.unwrap_or(10 * n + 100);
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut total = 0;
    let mut rel = 1.0;
    for _ in 0..=opts.refinements {
        let (dx, it) = minres(&a, &r, 0.1 * opts.tol, maxit);
        total += it;
        axpy(1.0, &dx, &mut x);
        a.project(&mut x);
        let mut ax = vec![0.0; n];
        a.apply(&x, &mut ax);
        r.iter_mut().zip(b.iter().zip(&ax)).for_each(|(ri, (bi, axi))| *ri = bi - axi);
        rel = norm(&r) / bnorm;
        if norm(&x) > 1e6 * bnorm * (1.0 + shift.abs()) {
            return Err(Error::NearSingularShift { shift });
        }
        if rel <= opts.tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { iterations: total, residual: rel })
}
