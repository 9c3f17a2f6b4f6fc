//! The semidiscrete flow `dx_j/ds = x_{j−1} − 2x_j + x_{j+1}` on closed polygons
//! and the affine maps that carry soliton curves along it.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::matfun::{mat_exp, phi1, SquareMatrix, Vector};
use crate::polygon::{f2_energy, Polygon, Topology};
use crate::soliton::{affine_family, AffineMap, SolitonCurve, SolitonSpec};

/// Relative bound on the flow-equation residual of a soliton flow map.
pub const FLOW_CHECK_RTOL: f64 = 1e-6;

const FLOW_CHECK_STEP: f64 = 1e-4;
const FLOW_CHECK_SAMPLES: usize = 33;
const FLOW_CHECK_HALF_WIDTH: f64 = 4.0;

/// `λ_k = 2 cos(2πk/N) − 2 = −4 sin²(πk/N)`, the eigenvalues of the discrete Laplacian.
pub fn laplacian_eigenvalue(n: usize, k: usize) -> f64 {
    let x = (PI * k as f64 / n as f64).sin();
    -4.0 * x * x
}

/// Exact solution of the flow at time `s` from the closed polygon `x`.
///
/// Each coordinate sequence is split into discrete Fourier modes by FFT, mode `k` is
/// damped by `exp(λ_k s)` and the sequence is recomposed.
pub fn evolve_closed(x: &Polygon, s: f64) -> Result<Polygon> {
    let n = match x.topology() {
        Topology::Closed { n } => n,
        Topology::OpenWindow { .. } => return Err(Error::RequiresClosed),
    };
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "flow time must be finite and nonnegative, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(x.clone());
    }

    let damping: Vec<f64> = (0..n)
        .map(|k| (laplacian_eigenvalue(n, k) * s).exp())
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let dim = x.dim();
    let mut out = vec![Vector::zeros(dim); n];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for c in 0..dim {
        for (z, v) in buf.iter_mut().zip(x.vertices()) {
            *z = Complex::new(v[c], 0.0);
        }
        forward.process(&mut buf);
        for (z, g) in buf.iter_mut().zip(&damping) {
            *z *= *g;
        }
        inverse.process(&mut buf);
        for (vertex, z) in out.iter_mut().zip(&buf) {
            vertex[c] = z.re / n as f64;
        }
    }
    Polygon::closed(out)
}

/// `Δx_j = x_{j−1} − 2x_j + x_{j+1}` on a closed polygon.
pub fn discrete_laplacian(x: &Polygon) -> Result<Vec<Vector>> {
    let n = match x.topology() {
        Topology::Closed { n } => n,
        Topology::OpenWindow { .. } => return Err(Error::RequiresClosed),
    };
    let vs = x.vertices();
    Ok((0..n)
        .map(|j| &vs[(j + n - 1) % n] - &vs[j] * 2.0 + &vs[(j + 1) % n])
        .collect())
}

/// `max_j ‖(x_j(s+h) − x_j(s−h))/2h − Δx_j(s)‖` for the spectral solution.
pub fn flow_residual(x: &Polygon, s: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    if s - h < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "central difference at s = {s} with h = {h} reaches negative time"
        )));
    }
    let ahead = evolve_closed(x, s + h)?;
    let behind = evolve_closed(x, s - h)?;
    let lap = discrete_laplacian(&evolve_closed(x, s)?)?;
    Ok(ahead
        .vertices()
        .iter()
        .zip(behind.vertices())
        .zip(&lap)
        .map(|((a, b), l)| ((a - b) / (2.0 * h) - l).norm())
        .fold(0.0, f64::max))
}

/// `F₂(x(s))` along an increasing grid of nonnegative times.
pub fn f2_monotone_check(x: &Polygon, s_grid: &[f64]) -> Result<Vec<f64>> {
    if s_grid.iter().any(|s| !(*s >= 0.0)) || s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "time grid must be increasing and nonnegative".into(),
        ));
    }
    s_grid
        .iter()
        .map(|&s| f2_energy(&evolve_closed(x, s)?))
        .collect()
}

/// Generator `(A₁, b₁)` of the flow on a soliton curve:
/// `c(t−1) − 2c(t) + c(t+1) = A₁ c(t) + b₁` with `A₁ = 4(A(1) − I)`, `b₁ = 4b(1)`.
#[derive(Debug, Clone)]
pub struct SolitonFlow {
    curve: SolitonCurve,
    a1: SquareMatrix,
    b1: Vector,
}

impl SolitonFlow {
    pub fn new(spec: &SolitonSpec) -> Result<Self> {
        let n = spec.dim();
        let unit = affine_family(spec, 1.0)?;
        let a1 = (&*unit.a - DMatrix::<f64>::identity(n, n)) * 4.0;
        Ok(SolitonFlow {
            curve: SolitonCurve::new(spec.clone()),
            a1: SquareMatrix::new(a1)?,
            b1: unit.b * 4.0,
        })
    }

    pub fn generator(&self) -> AffineMap {
        AffineMap {
            a: self.a1.clone(),
            b: self.b1.clone(),
        }
    }

    /// `(exp(A₁ s), s φ₁(A₁ s) b₁)`; defined for every real `s`.
    fn map_any(&self, s: f64) -> Result<AffineMap> {
        let scaled = SquareMatrix::new(&*self.a1 * s)?;
        let a = mat_exp(&scaled)?;
        let b = &*phi1(&scaled)? * &self.b1 * s;
        AffineMap::new(a, b)
    }

    /// `(Ã(s), b̃(s))` for `s ≥ 0`.
    pub fn map(&self, s: f64) -> Result<AffineMap> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "flow time must be finite and nonnegative, got {s}"
            )));
        }
        self.map_any(s)
    }

    /// `c̃_s(t) = Ã(s) c(t) + b̃(s)`.
    pub fn evolved_point(&self, s: f64, t: f64) -> Result<Vector> {
        Ok(self.map(s)?.apply(&self.curve.position(t)?))
    }

    /// Largest finite-difference residual of
    /// `∂c̃_s(t)/∂s = c̃_s(t−1) − 2c̃_s(t) + c̃_s(t+1)` over the grid, together with
    /// `max ‖c̃_s(t)‖` over the same grid for scaling.
    pub fn residual(&self, s_values: &[f64], t_values: &[f64], h: f64) -> Result<(f64, f64)> {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        let points: Vec<(Vector, Vector, Vector)> = t_values
            .iter()
            .map(|&t| {
                Ok((
                    self.curve.position(t - 1.0)?,
                    self.curve.position(t)?,
                    self.curve.position(t + 1.0)?,
                ))
            })
            .collect::<Result<_>>()?;
        for &s in s_values {
            let here = self.map_any(s)?;
            let ahead = self.map_any(s + h)?;
            let behind = self.map_any(s - h)?;
            for (left, mid, right) in &points {
                let ds = (ahead.apply(mid) - behind.apply(mid)) / (2.0 * h);
                let centre = here.apply(mid);
                let lap = here.apply(left) - &centre * 2.0 + here.apply(right);
                worst = worst.max((ds - lap).norm());
                scale = scale.max(centre.norm());
            }
        }
        Ok((worst, scale))
    }
}

/// `(Ã(s), b̃(s))` carrying the soliton curve of `spec` along the semidiscrete
/// flow, checked on 33 samples of `t ∈ [−4, 4]`.
pub fn soliton_flow_map(spec: &SolitonSpec, s: f64) -> Result<AffineMap> {
    let flow = SolitonFlow::new(spec)?;
    let map = flow.map(s)?;
    let ts: Vec<f64> = (0..FLOW_CHECK_SAMPLES)
        .map(|i| {
            -FLOW_CHECK_HALF_WIDTH
                + 2.0 * FLOW_CHECK_HALF_WIDTH * i as f64 / (FLOW_CHECK_SAMPLES - 1) as f64
        })
        .collect();
    let (residual, scale) = flow.residual(&[s], &ts, FLOW_CHECK_STEP)?;
    let bound = FLOW_CHECK_RTOL * (1.0 + scale);
    if !(residual <= bound) {
        return Err(Error::SolitonCheck { residual, bound });
    }
    Ok(map)
}
