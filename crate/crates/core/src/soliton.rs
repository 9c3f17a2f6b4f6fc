//! Soliton curves: solutions of `c'' = B c + d` with `c(0) = v`, `c'(0) = w`,
//! and the affine maps `(A(s), b(s))` with `¼(c(t−s) + 2c(t) + c(t+s)) = A(s) c(t) + b(s)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matfun::{co_si, SquareMatrix, Vector};

/// Relative least-squares residual below which `d` is taken to lie in `range(B)`.
pub const RANGE_RTOL: f64 = 1e-9;

/// Largest step used by the fixed-step integrator for the mixed case.
pub const INTEGRATOR_MAX_STEP: f64 = 1e-3;

/// Bound on the Richardson error estimate of the mixed-case integrator.
pub const INTEGRATOR_RTOL: f64 = 1e-8;

/// Relative bound for the affine-family check.
pub const AFFINE_CHECK_RTOL: f64 = 1e-8;

const AFFINE_CHECK_SAMPLES: usize = 33;
const AFFINE_CHECK_HALF_WIDTH: f64 = 4.0;

/// Initial value data for `c'' = B c + d`, `c(0) = v`, `c'(0) = w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonSpec {
    pub b: SquareMatrix,
    pub d: Vector,
    pub v: Vector,
    pub w: Vector,
}

impl SolitonSpec {
    pub fn new(b: SquareMatrix, d: Vector, v: Vector, w: Vector) -> Result<Self> {
        let n = b.dim();
        for (name, x) in [("d", &d), ("v", &v), ("w", &w)] {
            if x.len() != n {
                return Err(Error::Dimension(format!(
                    "{name} has length {}, matrix is {n}x{n}",
                    x.len()
                )));
            }
            if x.iter().any(|e| !e.is_finite()) {
                return Err(Error::NonFinite("soliton spec vector"));
            }
        }
        Ok(SolitonSpec { b, d, v, w })
    }

    /// `d = 0`.
    pub fn homogeneous(b: SquareMatrix, v: Vector, w: Vector) -> Result<Self> {
        let n = b.dim();
        Self::new(b, Vector::zeros(n), v, w)
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }
}

/// The affine map `x ↦ A x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub a: SquareMatrix,
    pub b: Vector,
}

impl AffineMap {
    pub fn new(a: SquareMatrix, b: Vector) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::Dimension(format!(
                "translation has length {}, matrix is {}x{}",
                b.len(),
                a.dim(),
                a.dim()
            )));
        }
        if b.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("affine translation"));
        }
        Ok(AffineMap { a, b })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            a: SquareMatrix::identity(n),
            b: Vector::zeros(n),
        }
    }

    /// Homothety `x ↦ factor·x`.
    pub fn scaling(n: usize, factor: f64) -> Result<Self> {
        Self::new(
            SquareMatrix::new(DMatrix::identity(n, n) * factor)?,
            Vector::zeros(n),
        )
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &*self.a * x + &self.b
    }
}

/// How `d` relates to `B`; decides which closed form solves the ODE.
#[derive(Debug, Clone, PartialEq)]
pub enum InhomogeneityCase {
    /// `d = 0`.
    Homogeneous,
    /// `d = B d_star`.
    SolvableShift { d_star: Vector },
    /// `B = J_n(0)` and `d = B d_star + d_n e_n`.
    NilpotentAugmented { d_star: Vector, d_n: f64 },
    /// `B = 0`, `d ≠ 0`.
    PureTranslation,
    /// `d = B d_star + kernel_part` with `kernel_part ∉ range(B)`.
    MixedSplit { d_star: Vector, kernel_part: Vector },
}

impl InhomogeneityCase {
    pub fn name(&self) -> &'static str {
        match self {
            InhomogeneityCase::Homogeneous => "Homogeneous",
            InhomogeneityCase::SolvableShift { .. } => "SolvableShift",
            InhomogeneityCase::NilpotentAugmented { .. } => "NilpotentAugmented",
            InhomogeneityCase::PureTranslation => "PureTranslation",
            InhomogeneityCase::MixedSplit { .. } => "MixedSplit",
        }
    }

    pub fn d_star(&self) -> Option<&Vector> {
        match self {
            InhomogeneityCase::SolvableShift { d_star }
            | InhomogeneityCase::NilpotentAugmented { d_star, .. }
            | InhomogeneityCase::MixedSplit { d_star, .. } => Some(d_star),
            _ => None,
        }
    }

    pub fn kernel_part(&self) -> Option<&Vector> {
        match self {
            InhomogeneityCase::MixedSplit { kernel_part, .. } => Some(kernel_part),
            _ => None,
        }
    }
}

fn is_structural_nilpotent(b: &SquareMatrix) -> bool {
    let n = b.dim();
    n >= 2
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let expected = if j == i + 1 { 1.0 } else { 0.0 };
                b[(i, j)] == expected
            })
        })
}

/// Minimum-norm least-squares solution of `B x = d`.
pub(crate) fn least_squares(b: &DMatrix<f64>, d: &Vector) -> Vector {
    let svd = b.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (smax * 1e-12).max(f64::MIN_POSITIVE);
    svd.solve(d, eps)
        .unwrap_or_else(|_| Vector::zeros(b.ncols()))
}

/// Sorts `spec` into one of the solvable inhomogeneity cases.
pub fn classify(spec: &SolitonSpec) -> InhomogeneityCase {
    let n = spec.dim();
    let d = &spec.d;
    if d.iter().all(|&x| x == 0.0) {
        return InhomogeneityCase::Homogeneous;
    }
    if spec.b.iter().all(|&x| x == 0.0) {
        return InhomogeneityCase::PureTranslation;
    }
    if is_structural_nilpotent(&spec.b) {
        let mut d_star = Vector::zeros(n);
        for i in 1..n {
            d_star[i] = d[i - 1];
        }
        return InhomogeneityCase::NilpotentAugmented {
            d_star,
            d_n: d[n - 1],
        };
    }
    let d_star = least_squares(&spec.b, d);
    let kernel_part = d - &*spec.b * &d_star;
    if kernel_part.norm() <= RANGE_RTOL * (1.0 + d.norm()) {
        InhomogeneityCase::SolvableShift { d_star }
    } else {
        InhomogeneityCase::MixedSplit {
            d_star,
            kernel_part,
        }
    }
}

/// `c_*(t) = (t^{2n}/(2n)!, …, t²/2!)` and its derivative.
fn nilpotent_particular(n: usize, t: f64) -> (Vector, Vector) {
    let mut pos = Vector::zeros(n);
    let mut vel = Vector::zeros(n);
    for i in 0..n {
        let p = 2 * (n - i);
        let fact: f64 = (1..=p).map(|k| k as f64).product();
        pos[i] = t.powi(p as i32) / fact;
        vel[i] = t.powi(p as i32 - 1) / (fact / p as f64);
    }
    (pos, vel)
}

/// One classical RK4 step of `y' = M y + F` is the affine map `y ↦ P y + q`
/// with `P = Σ_{k≤4} (hM)^k/k!` and `q = h Σ_{k≤3} (hM)^k/(k+1)! F`.
struct Rk4Affine {
    dim: usize,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl Rk4Affine {
    fn new(m: &DMatrix<f64>, forcing: &Vector, h: f64) -> Self {
        let dim = m.nrows();
        let hm = m * h;
        let ident = DMatrix::<f64>::identity(dim, dim);
        let mut p = ident.clone();
        let mut g = ident.clone();
        let mut pow = ident;
        let mut fact = 1.0;
        for k in 1..=4 {
            pow = &pow * &hm;
            fact *= k as f64;
            p += &pow / fact;
            if k <= 3 {
                g += &pow / (fact * (k + 1) as f64);
            }
        }
        let q = (g * forcing) * h;
        Rk4Affine {
            dim,
            p: p.transpose().iter().copied().collect(),
            q: q.iter().copied().collect(),
        }
    }

    fn step(&self, y: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.p[i * n..(i + 1) * n];
            *o = row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + self.q[i];
        }
    }
}

/// RK4 from zero initial data to `t` on the fixed grid `0, ±h, ±2h, …`, with a
/// final partial step. Nearby `t` share every full step, so the result
/// varies smoothly with `t`.
fn rk4_to(m: &DMatrix<f64>, forcing: &Vector, h: f64, t: f64) -> Vec<f64> {
    let h = h.copysign(t);
    let full = (t / h).floor();
    let rest = t - full * h;
    let mut y = vec![0.0; m.nrows()];
    let mut next = y.clone();
    let stepper = Rk4Affine::new(m, forcing, h);
    for _ in 0..full as usize {
        stepper.step(&y, &mut next);
        std::mem::swap(&mut y, &mut next);
    }
    if rest != 0.0 {
        Rk4Affine::new(m, forcing, rest).step(&y, &mut next);
        std::mem::swap(&mut y, &mut next);
    }
    y
}

/// Solves `p'' = B p + k`, `p(0) = p'(0) = 0` up to time `t` by fixed-step RK4,
/// checked against a run with half the step.
fn integrate_particular(b: &SquareMatrix, k: &Vector, t: f64) -> Result<(Vector, Vector)> {
    let n = b.dim();
    if t == 0.0 {
        return Ok((Vector::zeros(n), Vector::zeros(n)));
    }
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, n), (n, n))
        .copy_from(&DMatrix::<f64>::identity(n, n));
    m.view_mut((n, 0), (n, n)).copy_from(b.as_matrix());
    let mut forcing = Vector::zeros(2 * n);
    forcing.rows_mut(n, n).copy_from(k);

    let coarse = rk4_to(&m, &forcing, INTEGRATOR_MAX_STEP, t);
    let fine = rk4_to(&m, &forcing, 0.5 * INTEGRATOR_MAX_STEP, t);

    let diff = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = fine.iter().map(|x| x * x).sum::<f64>().sqrt();
    let estimate = diff / 15.0;
    if !(estimate <= INTEGRATOR_RTOL * (1.0 + scale)) {
        return Err(Error::IntegratorCheck { estimate });
    }
    Ok((
        Vector::from_column_slice(&fine[..n]),
        Vector::from_column_slice(&fine[n..]),
    ))
}

/// A soliton spec together with its classification.
#[derive(Debug, Clone)]
pub struct SolitonCurve {
    spec: SolitonSpec,
    case: InhomogeneityCase,
}

impl SolitonCurve {
    pub fn new(spec: SolitonSpec) -> Self {
        let case = classify(&spec);
        SolitonCurve { spec, case }
    }

    pub fn spec(&self) -> &SolitonSpec {
        &self.spec
    }

    pub fn case(&self) -> &InhomogeneityCase {
        &self.case
    }

    pub fn position(&self, t: f64) -> Result<Vector> {
        self.state(t).map(|(c, _)| c)
    }

    pub fn velocity(&self, t: f64) -> Result<Vector> {
        self.state(t).map(|(_, v)| v)
    }

    /// `(c(t), c'(t))`.
    pub fn state(&self, t: f64) -> Result<(Vector, Vector)> {
        let SolitonSpec { b, d, v, w } = &self.spec;
        if let InhomogeneityCase::PureTranslation = self.case {
            let pos = d * (0.5 * t * t) + w * t + v;
            let vel = d * t + w;
            return Ok((pos, vel));
        }

        let pair = co_si(b, t)?;
        let zero = Vector::zeros(b.dim());
        let d_star = self.case.d_star().unwrap_or(&zero);
        let base = v + d_star;
        let mut pos = &*pair.co * &base + &*pair.si * w - d_star;
        let mut vel = &**b * (&*pair.si * &base) + &*pair.co * w;

        match &self.case {
            InhomogeneityCase::NilpotentAugmented { d_n, .. } => {
                let (p, dp) = nilpotent_particular(b.dim(), t);
                pos += p * *d_n;
                vel += dp * *d_n;
            }
            InhomogeneityCase::MixedSplit { kernel_part, .. } => {
                let (p, dp) = integrate_particular(b, kernel_part, t)?;
                pos += p;
                vel += dp;
            }
            _ => {}
        }
        Ok((pos, vel))
    }

    /// `c_s(t) = ¼(c(t−s) + 2c(t) + c(t+s))`.
    pub fn shortened(&self, s: f64, t: f64) -> Result<Vector> {
        shortened_alpha(self, 0.25, s, t)
    }
}

/// `α c(t−s) + (1−2α) c(t) + α c(t+s)`.
fn shortened_alpha(curve: &SolitonCurve, alpha: f64, s: f64, t: f64) -> Result<Vector> {
    let left = curve.position(t - s)?;
    let mid = curve.position(t)?;
    let right = curve.position(t + s)?;
    Ok((left + right) * alpha + mid * (1.0 - 2.0 * alpha))
}

/// `c(t)` for the solution of `c'' = B c + d` described by `spec`.
pub fn eval_curve(spec: &SolitonSpec, t: f64) -> Result<Vector> {
    SolitonCurve::new(spec.clone()).position(t)
}

/// `(A(s), b(s))` with `A(s) = ½(I + co_B(s))`, `b(s)` fitted at `t = 0` and
/// then checked for `t`-independence on 33 samples of `[−4, 4]`.
pub fn affine_family(spec: &SolitonSpec, s: f64) -> Result<AffineMap> {
    affine_family_alpha(spec, s, 0.25)
}

/// Affine maps for the generalized weights `α, 1−2α, α`:
/// `A_α(s) = 4α A(s) − (4α−1) I`, `b_α(s) = 4α b(s)`.
pub fn affine_family_alpha(spec: &SolitonSpec, s: f64, alpha: f64) -> Result<AffineMap> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be nonzero, got {alpha}"
        )));
    }
    let n = spec.dim();
    let curve = SolitonCurve::new(spec.clone());
    let pair = co_si(&spec.b, s)?;
    let ident = DMatrix::<f64>::identity(n, n);
    let a_quarter = (&ident + &*pair.co) * 0.5;
    let a = &a_quarter * (4.0 * alpha) - &ident * (4.0 * alpha - 1.0);

    let c0 = curve.position(0.0)?;
    let b = shortened_alpha(&curve, alpha, s, 0.0)? - &a * &c0;
    let map = AffineMap::new(SquareMatrix::new(a)?, b)?;

    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..AFFINE_CHECK_SAMPLES {
        let t = -AFFINE_CHECK_HALF_WIDTH
            + 2.0 * AFFINE_CHECK_HALF_WIDTH * i as f64 / (AFFINE_CHECK_SAMPLES - 1) as f64;
        let c = curve.position(t)?;
        let lhs = shortened_alpha(&curve, alpha, s, t)?;
        residual = residual.max((lhs - map.apply(&c)).norm());
        scale = scale.max(c.norm());
    }
    let bound = AFFINE_CHECK_RTOL * (1.0 + scale);
    if !(residual <= bound) {
        return Err(Error::SolitonCheck { residual, bound });
    }
    Ok(map)
}

/// `c̃_s(t) = ¼(c(t−s) + c(t+s))`, a solution of the wave equation in `(s, t)`.
pub fn wave_family(spec: &SolitonSpec, s: f64, t: f64) -> Result<Vector> {
    let curve = SolitonCurve::new(spec.clone());
    Ok((curve.position(t - s)? + curve.position(t + s)?) * 0.25)
}

/// `E(t) = ½‖c'(t)‖² + U(c(t))` with `U(x) = −½⟨Bx, x⟩ − ⟨d, x⟩`.
///
/// Constant along the curve when `B` is symmetric.
pub fn energy(spec: &SolitonSpec, t: f64) -> Result<f64> {
    let (c, dc) = SolitonCurve::new(spec.clone()).state(t)?;
    let potential = -0.5 * c.dot(&(&*spec.b * &c)) - spec.d.dot(&c);
    Ok(0.5 * dc.norm_squared() + potential)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(x: f64, y: f64) -> Vector {
        Vector::from_column_slice(&[x, y])
    }

    fn intro_spec() -> SolitonSpec {
        SolitonSpec::homogeneous(
            SquareMatrix::diagonal(&[-4.0, -9.0]).unwrap(),
            vec2(1.0, 1.0),
            vec2(0.0, 0.0),
        )
        .unwrap()
    }

    fn parabola_spec() -> SolitonSpec {
        SolitonSpec::new(
            SquareMatrix::zeros(2),
            vec2(0.0, 2.0),
            vec2(0.0, 0.0),
            vec2(1.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&intro_spec()), InhomogeneityCase::Homogeneous);

        let nil = SolitonSpec::new(
            SquareMatrix::nilpotent(2),
            vec2(0.0, 0.7),
            vec2(0.0, 0.0),
            vec2(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(
            classify(&nil),
            InhomogeneityCase::NilpotentAugmented {
                d_star: vec2(0.0, 0.0),
                d_n: 0.7
            }
        );

        let mixed = SolitonSpec::new(
            SquareMatrix::diagonal(&[0.0, -1.0]).unwrap(),
            vec2(2.0, 0.0),
            vec2(0.0, 0.0),
            vec2(0.0, 1.0),
        )
        .unwrap();
        match classify(&mixed) {
            InhomogeneityCase::MixedSplit { kernel_part, .. } => {
                assert!((kernel_part - vec2(2.0, 0.0)).norm() < 1e-14)
            }
            other => panic!("unexpected {other:?}"),
        }

        assert_eq!(
            classify(&parabola_spec()),
            InhomogeneityCase::PureTranslation
        );

        let shift = SolitonSpec::new(
            SquareMatrix::from_row_slice(2, &[2.0, 1.0, 0.0, -3.0]).unwrap(),
            vec2(1.0, 1.0),
            vec2(0.0, 0.0),
            vec2(0.0, 0.0),
        )
        .unwrap();
        match classify(&shift) {
            InhomogeneityCase::SolvableShift { d_star } => {
                assert!((&*shift.b * &d_star - &shift.d).norm() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parabola_curve() {
        let spec = parabola_spec();
        for &t in &[-3.0, -0.5, 0.0, 1.25, 3.0] {
            let c = eval_curve(&spec, t).unwrap();
            assert!((c - vec2(t, t * t)).norm() < 1e-14);
        }
    }

    #[test]
    fn intro_curve() {
        let spec = intro_spec();
        for &t in &[-2.0, 0.0, 0.4, 1.7, 6.0] {
            let c = eval_curve(&spec, t).unwrap();
            let expected = vec2((2.0 * t).cos(), (3.0 * t).cos());
            assert!((c - expected).norm() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn nilpotent_curve() {
        let spec = SolitonSpec::new(
            SquareMatrix::nilpotent(2),
            vec2(0.0, 0.1),
            vec2(0.0, 0.0),
            vec2(0.0, 0.0),
        )
        .unwrap();
        let c = eval_curve(&spec, 1.0).unwrap();
        assert!((c - vec2(0.1 / 24.0, 0.05)).norm() < 1e-15);
    }

    #[test]
    fn mixed_case_recovers_quadratic() {
        let spec = SolitonSpec::new(
            SquareMatrix::diagonal(&[0.0, -1.0]).unwrap(),
            vec2(2.0, 0.0),
            vec2(0.0, 0.0),
            vec2(0.0, 1.0),
        )
        .unwrap();
        for &t in &[-10.0, -2.5, 0.0, 3.0, 10.0] {
            let c = eval_curve(&spec, t).unwrap();
            assert!((c - vec2(t * t, t.sin())).norm() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn intro_affine_family() {
        let map = affine_family(&intro_spec(), 0.4).unwrap();
        let expected = DMatrix::from_row_slice(
            2,
            2,
            &[
                (1.0 + 0.8f64.cos()) / 2.0,
                0.0,
                0.0,
                (1.0 + 1.2f64.cos()) / 2.0,
            ],
        );
        assert!((&*map.a - expected).amax() < 1e-14);
        assert!(map.b.amax() < 1e-12);
    }

    #[test]
    fn parabola_affine_family() {
        for &s in &[0.1, 0.4, 1.0, 2.0] {
            let map = affine_family(&parabola_spec(), s).unwrap();
            assert!((&*map.a - DMatrix::identity(2, 2)).amax() < 1e-15);
            assert!((map.b - vec2(0.0, s * s / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn nilpotent_affine_family() {
        let spec =
            SolitonSpec::homogeneous(SquareMatrix::nilpotent(2), vec2(0.3, -1.0), vec2(1.0, 0.5))
                .unwrap();
        let s = 0.7;
        let map = affine_family(&spec, s).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, s * s / 4.0, 0.0, 1.0]);
        assert!((&*map.a - expected).amax() < 1e-14);
        assert!(map.b.amax() < 1e-12);
    }

    #[test]
    fn wave_family_examples() {
        let spec = parabola_spec();
        let (s, t) = (0.7, -1.3);
        let wv = wave_family(&spec, s, t).unwrap();
        assert!((wv - vec2(0.5 * t, 0.5 * (t * t + s * s))).norm() < 1e-13);
        let half = wave_family(&intro_spec(), 0.0, 0.9).unwrap();
        let c = eval_curve(&intro_spec(), 0.9).unwrap();
        assert!((half - c * 0.5).norm() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        assert!((energy(&intro_spec(), 0.0).unwrap() - 6.5).abs() < 1e-14);
        let free = SolitonSpec::homogeneous(SquareMatrix::zeros(2), vec2(0.0, 0.0), vec2(1.0, 0.0))
            .unwrap();
        for &t in &[-4.0, 0.0, 2.5] {
            assert!((energy(&free, t).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_zero_rejected() {
        assert!(affine_family_alpha(&intro_spec(), 0.4, 0.0).is_err());
    }
}
