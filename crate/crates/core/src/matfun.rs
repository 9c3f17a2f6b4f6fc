//! Matrix power series kernel.
//!
//! `co_B(t) = Σ t^{2k}/(2k)! B^k` and `si_B(t) = Σ t^{2k+1}/(2k+1)! B^k` are the
//! matrix analogues of `cos`/`cosh` and `sin`/`sinh`: `X'' = B X` with
//! `co(0) = I, co'(0) = 0` and `si(0) = 0, si'(0) = I`. Also provides the
//! matrix exponential and `φ₁(M) = Σ M^k/(k+1)!`.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// Residual bound used by the identity checks on series results.
pub const TOL_SERIES: f64 = 1e-10;

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

const MAX_TERMS: usize = 200;
const TERM_RTOL: f64 = 1e-16;
const DD_TERM_RTOL: f64 = 1e-32;
const MAX_ABS_T: f64 = 1e6;

/// Dense real `n × n` matrix with `1 ≤ n ≤ 16` and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix(DMatrix<f64>);

impl SquareMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "expected a square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 || m.nrows() > MAX_DIM {
            return Err(Error::Dimension(format!(
                "matrix dimension {} outside 1..={MAX_DIM}",
                m.nrows()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(SquareMatrix(m))
    }

    /// Builds an `n × n` matrix from entries listed row by row.
    pub fn from_row_slice(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {n}x{n} matrix",
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        SquareMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        SquareMatrix(DMatrix::zeros(n, n))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// The nilpotent Jordan block `J_n(0)`: ones on the superdiagonal.
    pub fn nilpotent(n: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            m[(i, i + 1)] = 1.0;
        }
        SquareMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn inf_norm(&self) -> f64 {
        inf_norm(&self.0)
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }
}

impl Deref for SquareMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Maximum absolute row sum.
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `co_B(t)` and `si_B(t)` evaluated together.
#[derive(Debug, Clone, PartialEq)]
pub struct MatPair {
    pub co: SquareMatrix,
    pub si: SquareMatrix,
}

impl MatPair {
    /// `‖co·co − B·si·si − I‖∞`, which vanishes for exact series values.
    pub fn pythagorean_residual(&self, b: &SquareMatrix) -> f64 {
        let n = b.dim();
        let lhs = &*self.co * &*self.co - &**b * (&*self.si * &*self.si);
        inf_norm(&(lhs - DMatrix::identity(n, n)))
    }
}

type DdMatrix = DMatrix<TwoFloat>;

fn dd_inf_norm(m: &DdMatrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.hi().abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn negligible(term: &DdMatrix, acc: &DdMatrix) -> bool {
    let tn = dd_inf_norm(term);
    tn == 0.0 || tn < DD_TERM_RTOL * dd_inf_norm(acc)
}

fn term_negligible(term: &DMatrix<f64>, acc: &DMatrix<f64>) -> bool {
    let tn = inf_norm(term);
    tn == 0.0 || tn < TERM_RTOL * inf_norm(acc)
}

/// Evaluates `co_B(t)` and `si_B(t)`.
///
/// `t` is halved until `‖B‖∞ t² ≤ 1`, the series are summed by term recurrence
/// and the result is brought back with `co(2t) = co(t)² + B si(t)²`,
/// `si(2t) = 2 si(t) co(t)`. Both stages run in double-double arithmetic so the
/// doublings do not amplify rounding noise into the `f64` result.
pub fn co_si(b: &SquareMatrix, t: f64) -> Result<MatPair> {
    if !t.is_finite() || t.abs() >= MAX_ABS_T {
        return Err(Error::InvalidArgument(format!(
            "series argument t = {t} outside |t| < {MAX_ABS_T:e}"
        )));
    }
    let n = b.dim();
    let norm = b.inf_norm();

    let mut tau = t;
    let mut halvings = 0u32;
    while norm * tau * tau > 1.0 {
        tau *= 0.5;
        halvings += 1;
    }

    let bdd: DdMatrix = b.map(TwoFloat::from);
    let bt2 = &bdd * TwoFloat::new_mul(tau, tau);
    let ident = DdMatrix::identity(n, n);
    let mut co = ident.clone();
    let mut co_term = ident.clone();
    let mut si = &ident * TwoFloat::from(tau);
    let mut si_term = si.clone();

    let mut converged = false;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let co_div = TwoFloat::from((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        let si_div = TwoFloat::from((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        co_term = (&co_term * &bt2).map(|x| x / co_div);
        si_term = (&si_term * &bt2).map(|x| x / si_div);
        co += &co_term;
        si += &si_term;
        if negligible(&co_term, &co) && negligible(&si_term, &si) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesNonConvergence { terms: MAX_TERMS });
    }

    for _ in 0..halvings {
        let b_si2 = &bdd * (&si * &si);
        let si2 = (&si * &co).map(|x| x * 2.0);
        co = &co * &co + b_si2;
        si = si2;
    }

    let co = co.map(f64::from);
    let si = si.map(f64::from);
    if co.iter().chain(si.iter()).any(|x| !x.is_finite()) {
        return Err(Error::SeriesNonConvergence { terms: MAX_TERMS });
    }
    Ok(MatPair {
        co: SquareMatrix(co),
        si: SquareMatrix(si),
    })
}

/// Closed forms of `cos_b(t)` and `sin_b(t)`, the solutions of `f'' = b f` with
/// `cos_b(0) = 1, cos_b'(0) = 0` and `sin_b(0) = 0, sin_b'(0) = 1`.
pub fn scalar_cos_sin(b: f64, t: f64) -> (f64, f64) {
    if b > 0.0 {
        let r = b.sqrt();
        ((r * t).cosh(), (r * t).sinh() / r)
    } else if b < 0.0 {
        let r = (-b).sqrt();
        ((r * t).cos(), (r * t).sin() / r)
    } else {
        (1.0, t)
    }
}

/// Halvings needed to bring `norm` down to at most `target`.
fn scaling_steps(norm: f64, target: f64) -> u32 {
    let mut s = 0;
    let mut scaled = norm;
    while scaled > target {
        scaled *= 0.5;
        s += 1;
    }
    s
}

/// Matrix exponential by scaling and squaring around a Taylor core.
pub fn mat_exp(m: &SquareMatrix) -> Result<SquareMatrix> {
    let n = m.dim();
    let squarings = scaling_steps(m.inf_norm(), 0.5);
    let x = &**m * 0.5f64.powi(squarings as i32);

    let mut acc = DMatrix::<f64>::identity(n, n);
    let mut term = acc.clone();
    let mut converged = false;
    for k in 1..=MAX_TERMS {
        term = &term * &x / k as f64;
        acc += &term;
        if term_negligible(&term, &acc) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesNonConvergence { terms: MAX_TERMS });
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(SquareMatrix(acc))
}

/// `φ₁(M) = Σ M^k/(k+1)!`, so that `exp(M) = I + M φ₁(M)`.
///
/// Scaled like [`mat_exp`]; each squaring step uses
/// `φ₁(2X) = ½ φ₁(X) (exp(X) + I)`.
pub fn phi1(m: &SquareMatrix) -> Result<SquareMatrix> {
    let n = m.dim();
    let ident = DMatrix::<f64>::identity(n, n);
    let levels = scaling_steps(m.inf_norm(), 0.5);
    let x = &**m * 0.5f64.powi(levels as i32);

    let mut phi = ident.clone();
    let mut term = ident.clone();
    let mut converged = false;
    for k in 1..=MAX_TERMS {
        term = &term * &x / (k + 1) as f64;
        phi += &term;
        if term_negligible(&term, &phi) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesNonConvergence { terms: MAX_TERMS });
    }

    let mut exp = &ident + &x * &phi;
    for _ in 0..levels {
        phi = (&phi * (&exp + &ident)) * 0.5;
        exp = &exp * &exp;
    }
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("phi1"));
    }
    Ok(SquareMatrix(phi))
}
