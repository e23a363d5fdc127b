//! Symmetric eigensolvers and the deflated shifted solve.
//!
//! Vectors here are plain coefficient vectors with the Euclidean inner product.
//! Callers working with grid-normalized orbitals rescale by `sqrt(h)`.

mod davidson;
mod dense;
mod lanczos;
mod solve;
mod tridiag;

use nalgebra::DMatrix;

use crate::error::Result;

pub use davidson::{davidson, Preconditioner};
pub use dense::dense_eigenpairs;
pub use lanczos::lanczos;
pub use solve::{shifted_solve, shifted_solve_with, SolveOptions};
pub use tridiag::{tridiagonal_eigenpairs, SymTridiagonal};

/// Largest dimension routed to a direct (non-Krylov) solver.
pub const DENSE_TRIDIAGONAL_LIMIT: usize = 4096;
/// Largest general operator that is materialized and diagonalized densely.
pub const DENSE_GENERAL_LIMIT: usize = 400;

/// A real symmetric operator given by its action.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Optional idempotent symmetry projector applied after `apply`.
    fn project(&self, _v: &mut [f64]) {}

    fn has_projector(&self) -> bool {
        false
    }

    /// Diagonal and off-diagonal when the operator is tridiagonal.
    fn tridiagonal(&self) -> Option<(&[f64], &[f64])> {
        None
    }
}

/// Dense symmetric matrix as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for j in 0..n {
                s += self.matrix[(i, j)] * x[j];
            }
            *yi = s;
        }
    }
}

/// Operator defined by closures, with an optional projector.
pub struct FnOperator<F, P = fn(&mut [f64])>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
    P: Fn(&mut [f64]) + Sync,
{
    dim: usize,
    apply: F,
    projector: Option<P>,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, apply: F) -> Self {
        Self { dim, apply, projector: None }
    }
}

impl<F, P> FnOperator<F, P>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
    P: Fn(&mut [f64]) + Sync,
{
    pub fn with_projector(dim: usize, apply: F, projector: P) -> Self {
        Self { dim, apply, projector: Some(projector) }
    }
}

impl<F, P> LinearOperator for FnOperator<F, P>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
    P: Fn(&mut [f64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.apply)(x, y);
        if let Some(p) = &self.projector {
            p(y);
        }
    }

    fn project(&self, v: &mut [f64]) {
        if let Some(p) = &self.projector {
            p(v);
        }
    }

    fn has_projector(&self) -> bool {
        self.projector.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    /// Unit Euclidean norm.
    pub vector: Vec<f64>,
    /// `‖A v - E v‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Convergence when `residual <= tol * max(1, |E|)`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Lanczos basis size; `None` picks one from `k`.
    pub basis: Option<usize>,
    pub method: Method,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_restarts: 50, seed: 0x5eed, basis: None, method: Method::Auto }
    }
}

pub fn lowest_eigenpairs(op: &dyn LinearOperator, k: usize) -> Result<Vec<EigenPair>> {
    lowest_eigenpairs_with(op, k, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(crate::Error::InvalidArgument(format!("requested {k} eigenpairs of a dimension-{n} operator")));
    }
    let method = match opts.method {
        Method::Auto => {
            if op.has_projector() {
                Method::Lanczos
            } else if op.tridiagonal().is_some() && n <= DENSE_TRIDIAGONAL_LIMIT {
                Method::Dense
            } else if op.tridiagonal().is_none() && n <= DENSE_GENERAL_LIMIT {
                Method::Dense
            } else {
                Method::Lanczos
            }
        }
        m => m,
    };
    match method {
        Method::Dense => match op.tridiagonal() {
            Some((d, e)) => tridiagonal_eigenpairs(d, e, k, opts.tol),
            None => dense_eigenpairs(op, k),
        },
        _ => lanczos(op, k, opts),
    }
}

/// Relative symmetry defect `|⟨u|Av⟩ - ⟨Au|v⟩| / (‖u‖‖Av‖ + ‖Au‖‖v‖)` on seeded random vectors.
pub fn symmetry_defect(op: &dyn LinearOperator, seed: u64, trials: usize) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = op.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut au, mut av) = (vec![0.0; n], vec![0.0; n]);
        op.apply(&u, &mut au);
        op.apply(&v, &mut av);
        let scale = norm(&u) * norm(&av) + norm(&au) * norm(&v);
        worst = worst.max((dot(&u, &av) - dot(&au, &v)).abs() / scale.max(f64::MIN_POSITIVE));
    }
    worst
}

/// Idempotence and commutation defects `(‖P²v - Pv‖, ‖PAv - APv‖)`, relative, on random vectors.
pub fn projector_defects(op: &dyn LinearOperator, seed: u64, trials: usize) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = op.dim();
    let (mut idem, mut comm): (f64, f64) = (0.0, 0.0);
    for _ in 0..trials {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut pv = v.clone();
        op.project(&mut pv);
        let mut ppv = pv.clone();
        op.project(&mut ppv);
        idem = idem.max(ppv.iter().zip(&pv).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / norm(&v));
        // apply() already projects its output, so commutation means A(Pv) == P(Av)
        let mut apv = vec![0.0; n];
        op.apply(&pv, &mut apv);
        let mut av = vec![0.0; n];
        op.apply(&v, &mut av);
        let mut pav = av.clone();
        op.project(&mut pav);
        let d = apv.iter().zip(&pav).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        comm = comm.max(d / norm(&av).max(f64::MIN_POSITIVE));
    }
    (idem, comm)
}

/// Makes the first component with `|c| > 1e-6` positive.
pub fn fix_sign(v: &mut [f64]) {
    if let Some(c) = v.iter().copied().find(|c| c.abs() > 1e-6) {
        if c < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

pub(crate) fn residual_norm(op: &dyn LinearOperator, v: &[f64], e: f64) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.apply(v, &mut av);
    av.iter().zip(v).map(|(a, x)| (a - e * x).powi(2)).sum::<f64>().sqrt()
}

/// Stable ordering: ascending energy, ties broken by the sign-fixed vector.
pub(crate) fn finish(mut pairs: Vec<EigenPair>) -> Vec<EigenPair> {
    for p in pairs.iter_mut() {
        fix_sign(&mut p.vector);
    }
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    pairs
}
