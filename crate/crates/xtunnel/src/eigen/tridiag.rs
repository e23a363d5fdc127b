//! Sturm-sequence bisection plus inverse iteration for symmetric tridiagonal matrices.

use super::{dot, finish, norm, EigenPair, LinearOperator};
use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: `diag` (length n) and `off` (length n - 1).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n - 1 entries");
        Self { diag, off }
    }
}

impl LinearOperator for SymTridiagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    fn tridiagonal(&self) -> Option<(&[f64], &[f64])> {
        Some((&self.diag, &self.off))
    }
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += e[i - 1].abs();
        }
        if i + 1 < n {
            r += e[i].abs();
        }
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// LU factorization of `T - λ I` with partial pivoting.
struct ShiftedLu {
    a: Vec<f64>,
    b: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(d: &[f64], e: &[f64], lambda: f64, tiny: f64) -> Self {
        let n = d.len();
        let mut a: Vec<f64> = d.iter().map(|v| v - lambda).collect();
        let mut b: Vec<f64> = e.to_vec();
        b.push(0.0);
        let c: Vec<f64> = e.to_vec();
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swapped = vec![false; n];
        for i in 0..n.saturating_sub(1) {
            if a[i].abs() >= c[i].abs() {
                if a[i] == 0.0 {
                    a[i] = tiny;
                }
                l[i] = c[i] / a[i];
                a[i + 1] -= l[i] * b[i];
            } else {
                let mult = a[i] / c[i];
                let (ai1, bi1) = (a[i + 1], b[i + 1]);
                a[i] = c[i];
                let bi = b[i];
                b[i] = ai1;
                u2[i] = bi1;
                a[i + 1] = bi - mult * ai1;
                b[i + 1] = -mult * bi1;
                l[i] = mult;
                swapped[i] = true;
            }
        }
        if a[n - 1] == 0.0 {
            a[n - 1] = tiny;
        }
        for v in a.iter_mut() {
            if v.abs() < tiny {
                *v = tiny.copysign(*v);
            }
        }
        Self { a, b, u2, l, swapped }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = self.a.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                rhs.swap(i, i + 1);
            }
            rhs[i + 1] -= self.l[i] * rhs[i];
        }
        rhs[n - 1] /= self.a[n - 1];
        if n >= 2 {
            rhs[n - 2] = (rhs[n - 2] - self.b[n - 2] * rhs[n - 1]) / self.a[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            rhs[i] = (rhs[i] - self.b[i] * rhs[i + 1] - self.u2[i] * rhs[i + 2]) / self.a[i];
        }
    }
}

/// k lowest eigenpairs of a symmetric tridiagonal matrix.
///
/// Eigenvalues come from bisection on the Sturm count; vectors from inverse
/// iteration, orthogonalized within clusters. Reported energies are Rayleigh quotients.
pub fn tridiagonal_eigenpairs(d: &[f64], e: &[f64], k: usize, tol: f64) -> Result<Vec<EigenPair>> {
    let n = d.len();
    if k == 0 || k > n || e.len() + 1 != n {
        return Err(Error::InvalidArgument(format!("bad tridiagonal request k = {k}, n = {n}")));
    }
    let op = SymTridiagonal::new(d.to_vec(), e.to_vec());
    let (glo, ghi) = gershgorin(d, e);
    let tnorm = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * tnorm);
    let span = ghi - glo;
    let lo0 = glo - 1e-9 * span - pivmin;
    let hi0 = ghi + 1e-9 * span + pivmin;

    let mut values = Vec::with_capacity(k);
    for j in 0..k {
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(d, e, mid, pivmin) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin {
                break;
            }
        }
        values.push(0.5 * (lo + hi));
    }

    let cluster_gap = 1e-3 * tnorm;
    let tiny = f64::EPSILON * tnorm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut pairs = Vec::with_capacity(k);
    let mut av = vec![0.0; n];
    for (j, &lambda) in values.iter().enumerate() {
        let lu = ShiftedLu::new(d, e, lambda, tiny);
        // deterministic, non-special start vector
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (((i * 7919 + j * 104729) % 1009) as f64 / 1009.0)).collect();
        let scale = norm(&v);
        v.iter_mut().for_each(|x| *x /= scale);
        let mut best = (f64::INFINITY, v.clone(), lambda);
        for _ in 0..8 {
            lu.solve(&mut v);
            for _ in 0..2 {
                for (i, prev) in vectors.iter().enumerate() {
                    if (values[i] - lambda).abs() <= cluster_gap {
                        let c = dot(prev, &v);
                        v.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
                    }
                }
            }
            let nv = norm(&v);
            if !(nv > 0.0) || !nv.is_finite() {
                break;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            op.apply(&v, &mut av);
            let rq = dot(&v, &av);
            let res = av.iter().zip(&v).map(|(a, x)| (a - rq * x).powi(2)).sum::<f64>().sqrt();
            if res < best.0 {
                best = (res, v.clone(), rq);
            }
            if res <= 0.01 * tol * rq.abs().max(1.0) {
                break;
            }
        }
        let (res, vec, energy) = best;
        if !(res <= tol * energy.abs().max(1.0)) {
            return Err(Error::NoConvergence { iterations: 8, residual: res });
        }
        vectors.push(vec.clone());
        pairs.push(EigenPair { energy, vector: vec, residual: res });
    }
    Ok(finish(pairs))
}
