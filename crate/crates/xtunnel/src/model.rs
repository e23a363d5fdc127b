//! Grid, double-well potentials and the softened Coulomb kernel.

use crate::error::{Error, Result};

/// Uniform 1D mesh with spacing `h = (x_max - x_min) / (n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidExtent { x_min, x_max });
        }
        if n < 3 {
            return Err(Error::TooFewPoints { min: 3, got: n });
        }
        let h = (x_max - x_min) / (n - 1) as f64;
        Ok(Self { x_min, x_max, n, h })
    }

    /// Symmetric box `[-half_width, half_width]` with spacing as close to `h` as possible
    /// while keeping the origin on a grid point.
    pub fn centered(half_width: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
        }
        let cells = (half_width / h).ceil() as usize;
        let half = cells as f64 * h;
        Self::new(-half, half, 2 * cells + 1)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Weighted inner product `h Σ f g`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.h * f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Index of the grid point nearest to `x`, clamped into the box.
    pub fn nearest(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.h).round();
        i.clamp(0.0, (self.n - 1) as f64) as usize
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n
            && (self.x_min - other.x_min).abs() <= 1e-12 * (1.0 + self.x_min.abs())
            && (self.x_max - other.x_max).abs() <= 1e-12 * (1.0 + self.x_max.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WellShape {
    Square,
    Gaussian,
}

impl WellShape {
    pub fn name(&self) -> &'static str {
        match self {
            WellShape::Square => "square",
            WellShape::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for WellShape {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "square" => Ok(WellShape::Square),
            "gaussian" => Ok(WellShape::Gaussian),
            other => Err(format!("unknown well shape '{other}'")),
        }
    }
}

/// Two wells on a zero baseline. Depths are positive numbers; the wells dip to `-depth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleWellSpec {
    pub shape: WellShape,
    pub center_a: f64,
    pub center_b: f64,
    pub depth_a: f64,
    pub depth_b: f64,
    pub width_a: f64,
    pub width_b: f64,
}

/// Margin between each well edge and the box wall, in units of the widest well.
pub const BOX_MARGIN_WIDTHS: f64 = 5.0;

impl DoubleWellSpec {
    pub fn symmetric(shape: WellShape, separation: f64, depth: f64, width: f64) -> Self {
        Self {
            shape,
            center_a: -separation / 2.0,
            center_b: separation / 2.0,
            depth_a: depth,
            depth_b: depth,
            width_a: width,
            width_b: width,
        }
    }

    pub fn separation(&self) -> f64 {
        self.center_b - self.center_a
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.center_a, self.center_b, self.depth_a, self.depth_b, self.width_a, self.width_b];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidWells("non-finite parameter".into()));
        }
        if self.width_a <= 0.0 || self.width_b <= 0.0 {
            return Err(Error::InvalidWells("widths must be positive".into()));
        }
        if self.depth_a < 0.0 || self.depth_b < 0.0 {
            return Err(Error::InvalidWells("depths must be non-negative".into()));
        }
        if self.center_b <= self.center_a {
            return Err(Error::InvalidWells("center_a must lie left of center_b".into()));
        }
        if self.separation() <= (self.width_a + self.width_b) / 2.0 {
            return Err(Error::InvalidWells(format!(
                "wells overlap: separation {} <= {}",
                self.separation(),
                (self.width_a + self.width_b) / 2.0
            )));
        }
        Ok(())
    }

    /// Same wells moved so that the centers sit at `mid ∓ d/2`, keeping the midpoint.
    pub fn with_separation(&self, d: f64) -> Self {
        let mid = 0.5 * (self.center_a + self.center_b);
        Self { center_a: mid - d / 2.0, center_b: mid + d / 2.0, ..*self }
    }

    pub fn translated(&self, delta: f64) -> Self {
        Self { center_a: self.center_a + delta, center_b: self.center_b + delta, ..*self }
    }

    /// Well a alone (well b switched off).
    pub fn isolated_a(&self) -> Self {
        Self { depth_b: 0.0, ..*self }
    }

    /// Well b alone (well a switched off).
    pub fn isolated_b(&self) -> Self {
        Self { depth_a: 0.0, ..*self }
    }

    pub fn is_symmetric(&self) -> bool {
        (self.depth_a - self.depth_b).abs() <= 1e-12 * self.depth_a.abs().max(1.0)
            && (self.width_a - self.width_b).abs() <= 1e-12 * self.width_a.abs().max(1.0)
    }

    /// Right edge of well a and left edge of well b.
    pub fn inner_edges(&self) -> (f64, f64) {
        (self.center_a + self.width_a / 2.0, self.center_b - self.width_b / 2.0)
    }

    /// Width of the classically forbidden gap between the two wells' nominal edges.
    pub fn barrier_width(&self) -> f64 {
        let (l, r) = self.inner_edges();
        r - l
    }

    fn single(shape: WellShape, x: f64, center: f64, depth: f64, width: f64) -> f64 {
        if depth == 0.0 {
            return 0.0;
        }
        match shape {
            WellShape::Square => {
                let half = width / 2.0;
                if (x - center).abs() <= half + 1e-9 * half.max(1.0) {
                    -depth
                } else {
                    0.0
                }
            }
            WellShape::Gaussian => {
                let sigma = width / 2.0;
                let u = (x - center) / sigma;
                -depth * (-0.5 * u * u).exp()
            }
        }
    }

    /// Continuous potential U(x).
    pub fn potential_at(&self, x: f64) -> f64 {
        Self::single(self.shape, x, self.center_a, self.depth_a, self.width_a)
            + Self::single(self.shape, x, self.center_b, self.depth_b, self.width_b)
    }

    /// Checks the box-margin rule: every well edge stays `5·max(width)` away from the walls.
    pub fn check_box(&self, grid: &Grid) -> Result<()> {
        self.validate()?;
        let margin = BOX_MARGIN_WIDTHS * self.width_a.max(self.width_b);
        let tol = 1e-9 * (1.0 + margin);
        if self.center_a - self.width_a / 2.0 - margin < grid.x_min - tol
            || self.center_a + self.width_a / 2.0 + margin > grid.x_max + tol
        {
            return Err(Error::WellOutsideBox { well: 'a', margin });
        }
        if self.center_b - self.width_b / 2.0 - margin < grid.x_min - tol
            || self.center_b + self.width_b / 2.0 + margin > grid.x_max + tol
        {
            return Err(Error::WellOutsideBox { well: 'b', margin });
        }
        Ok(())
    }

    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        self.check_box(grid)?;
        Ok((0..grid.n).map(|i| self.potential_at(grid.x(i))).collect())
    }

    /// Position of the potential maximum between the wells. Flat barriers (square wells)
    /// return the middle of the gap.
    pub fn barrier_midpoint(&self) -> f64 {
        match self.shape {
            WellShape::Square => {
                let (l, r) = self.inner_edges();
                0.5 * (l + r)
            }
            WellShape::Gaussian => {
                // golden-section search for the maximum of U between the centers
                let (mut lo, mut hi) = (self.center_a, self.center_b);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let mut c = hi - g * (hi - lo);
                let mut d = lo + g * (hi - lo);
                for _ in 0..200 {
                    if self.potential_at(c) > self.potential_at(d) {
                        hi = d;
                    } else {
                        lo = c;
                    }
                    c = hi - g * (hi - lo);
                    d = lo + g * (hi - lo);
                    if hi - lo < 1e-13 * (1.0 + hi.abs()) {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn barrier_top(&self) -> f64 {
        self.potential_at(self.barrier_midpoint())
    }
}

/// Softened Coulomb interaction `λ / sqrt((x - x')² + s²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionKernel {
    pub lambda: f64,
    pub softening: f64,
}

impl Default for InteractionKernel {
    fn default() -> Self {
        Self { lambda: 1.0, softening: 1.0 }
    }
}

impl InteractionKernel {
    pub fn new(lambda: f64, softening: f64) -> Result<Self> {
        if !(softening > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel needs finite lambda and positive softening (got {lambda}, {softening})"
            )));
        }
        Ok(Self { lambda, softening })
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..*self }
    }

    #[inline]
    pub fn value(&self, x: f64, xp: f64) -> f64 {
        let r = x - xp;
        self.lambda / (r * r + self.softening * self.softening).sqrt()
    }

    /// Kernel as a function of the index distance on a uniform grid: `row[m] = V(m h)`.
    pub fn row(&self, grid: &Grid) -> Vec<f64> {
        (0..grid.n).map(|m| self.value(m as f64 * grid.h, 0.0)).collect()
    }
}
