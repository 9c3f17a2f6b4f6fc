//! Polygons and the discrete maps acting on them.
//!
//! A polygon is either closed (indices taken mod `N`) or a finite window
//! `j_min..=j_max` of an infinite polygon. Maps that need neighbours shrink an
//! open window instead of inventing vertices beyond its ends.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matfun::{SquareMatrix, Vector};
use crate::soliton::{AffineMap, SolitonCurve, SolitonSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Closed { n: usize },
    OpenWindow { j_min: i64, j_max: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vector>,
    topology: Topology,
    dim: usize,
}

fn common_dim(vertices: &[Vector]) -> Result<usize> {
    let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
    if dim == 0 {
        return Err(Error::Dimension(
            "vertices must have positive dimension".into(),
        ));
    }
    if vertices.iter().any(|v| v.len() != dim) {
        return Err(Error::Dimension("vertices of differing dimension".into()));
    }
    if vertices
        .iter()
        .flat_map(|v| v.iter())
        .any(|x| !x.is_finite())
    {
        return Err(Error::NonFinite("polygon vertex"));
    }
    Ok(dim)
}

impl Polygon {
    /// Closed polygon with `N = vertices.len() ≥ 3`.
    pub fn closed(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices {
                need: 3,
                have: vertices.len(),
            });
        }
        let dim = common_dim(&vertices)?;
        let n = vertices.len();
        Ok(Polygon {
            vertices,
            topology: Topology::Closed { n },
            dim,
        })
    }

    /// Window `j_min..=j_min + len − 1` of an infinite polygon, at least 2 vertices.
    pub fn open(j_min: i64, vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::TooFewVertices {
                need: 2,
                have: vertices.len(),
            });
        }
        let dim = common_dim(&vertices)?;
        let j_max = j_min + vertices.len() as i64 - 1;
        Ok(Polygon {
            vertices,
            topology: Topology::OpenWindow { j_min, j_max },
            dim,
        })
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.topology, Topology::Closed { .. })
    }

    /// Index of the first stored vertex (0 for closed polygons).
    pub fn first_index(&self) -> i64 {
        match self.topology {
            Topology::Closed { .. } => 0,
            Topology::OpenWindow { j_min, .. } => j_min,
        }
    }

    /// `(j, x_j)` for every stored vertex.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, &Vector)> + '_ {
        let first = self.first_index();
        self.vertices
            .iter()
            .enumerate()
            .map(move |(i, v)| (first + i as i64, v))
    }

    /// `x_j`; closed polygons wrap, open windows return `None` outside the window.
    pub fn vertex(&self, j: i64) -> Option<&Vector> {
        match self.topology {
            Topology::Closed { n } => Some(&self.vertices[j.rem_euclid(n as i64) as usize]),
            Topology::OpenWindow { j_min, j_max } => {
                if (j_min..=j_max).contains(&j) {
                    Some(&self.vertices[(j - j_min) as usize])
                } else {
                    None
                }
            }
        }
    }

    /// Applies `x ↦ A x + b` to every vertex.
    pub fn map_affine(&self, map: &AffineMap) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|x| map.apply(x)).collect(),
            topology: self.topology,
            dim: self.dim,
        }
    }

    fn with_vertices(&self, vertices: Vec<Vector>, topology: Topology) -> Polygon {
        Polygon {
            vertices,
            topology,
            dim: self.dim,
        }
    }

    fn require_closed(&self) -> Result<usize> {
        match self.topology {
            Topology::Closed { n } => Ok(n),
            Topology::OpenWindow { .. } => Err(Error::RequiresClosed),
        }
    }
}

/// `M(x)_j = ½(x_j + x_{j+1})`.
pub fn midpoint_map(x: &Polygon) -> Result<Polygon> {
    let vs = &x.vertices;
    match x.topology {
        Topology::Closed { n } => {
            let out = (0..n).map(|j| (&vs[j] + &vs[(j + 1) % n]) * 0.5).collect();
            Ok(x.with_vertices(out, x.topology))
        }
        Topology::OpenWindow { j_min, j_max } => {
            if vs.len() < 2 {
                return Err(Error::TooFewVertices {
                    need: 2,
                    have: vs.len(),
                });
            }
            let out = vs.windows(2).map(|w| (&w[0] + &w[1]) * 0.5).collect();
            Ok(x.with_vertices(
                out,
                Topology::OpenWindow {
                    j_min,
                    j_max: j_max - 1,
                },
            ))
        }
    }
}

fn weighted(alpha: f64, prev: &Vector, cur: &Vector, next: &Vector) -> Vector {
    (prev + next) * alpha + cur * (1.0 - 2.0 * alpha)
}

/// `T_α(x)_j = α x_{j−1} + (1−2α) x_j + α x_{j+1}`; `α = ¼` gives `T`.
pub fn shorten_t(x: &Polygon, alpha: f64) -> Result<Polygon> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be nonzero, got {alpha}"
        )));
    }
    let vs = &x.vertices;
    if vs.len() < 3 {
        return Err(Error::TooFewVertices {
            need: 3,
            have: vs.len(),
        });
    }
    match x.topology {
        Topology::Closed { n } => {
            let out = (0..n)
                .map(|j| weighted(alpha, &vs[(j + n - 1) % n], &vs[j], &vs[(j + 1) % n]))
                .collect();
            Ok(x.with_vertices(out, x.topology))
        }
        Topology::OpenWindow { j_min, j_max } => {
            let out = vs
                .windows(3)
                .map(|w| weighted(alpha, &w[0], &w[1], &w[2]))
                .collect();
            Ok(x.with_vertices(
                out,
                Topology::OpenWindow {
                    j_min: j_min + 1,
                    j_max: j_max - 1,
                },
            ))
        }
    }
}

/// `T(x)`, i.e. [`shorten_t`] with `α = ¼`.
pub fn shorten(x: &Polygon) -> Result<Polygon> {
    shorten_t(x, 0.25)
}

/// The window `j_min..=j_max` of the polygon `x_j = c(a + s j)`.
pub fn sample_polygon(
    spec: &SolitonSpec,
    a: f64,
    s: f64,
    j_min: i64,
    j_max: i64,
) -> Result<Polygon> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sample spacing must be positive, got {s}"
        )));
    }
    if j_max <= j_min {
        return Err(Error::InvalidArgument(format!(
            "empty window {j_min}..={j_max}"
        )));
    }
    let curve = SolitonCurve::new(spec.clone());
    let vertices = (j_min..=j_max)
        .map(|j| curve.position(a + s * j as f64))
        .collect::<Result<Vec<_>>>()?;
    Polygon::open(j_min, vertices)
}

/// The unique polygon with `x_{j0} = u`, `x_{j0+1} = v` and `T(x)_j = A x_j + b`,
/// generated by `x_{j±1} = 2(2A − I) x_j − x_{j∓1} + 4b`.
pub fn soliton_recursion(
    map: &AffineMap,
    u: &Vector,
    v: &Vector,
    j0: i64,
    j_min: i64,
    j_max: i64,
) -> Result<Polygon> {
    let n = map.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::Dimension("seed points do not match the map".into()));
    }
    if !(j_min <= j0 && j0 < j_max) {
        return Err(Error::InvalidArgument(format!(
            "seed indices {j0}, {} not inside {j_min}..={j_max}",
            j0 + 1
        )));
    }
    let step = &*map.a * 4.0 - DMatrix::<f64>::identity(n, n) * 2.0;
    let shift = &map.b * 4.0;
    let next = |cur: &Vector, other: &Vector| -> Vector { &step * cur - other + &shift };

    let len = (j_max - j_min + 1) as usize;
    let mut out = vec![Vector::zeros(n); len];
    let at = |j: i64| (j - j_min) as usize;
    out[at(j0)] = u.clone();
    out[at(j0 + 1)] = v.clone();
    for j in (j0 + 1)..j_max {
        out[at(j + 1)] = next(&out[at(j)], &out[at(j - 1)]);
    }
    for j in ((j_min + 1)..=j0).rev() {
        out[at(j - 1)] = next(&out[at(j)], &out[at(j + 1)]);
    }
    Polygon::open(j_min, out)
}

/// The regular polygon `z_j = (cos 2πjk/N, sin 2πjk/N)` and its eigenvalue
/// `μ_k = ½(1 + cos 2πk/N)` under `T`.
pub fn eigenpolygon(n: usize, k: usize) -> Result<(Polygon, f64)> {
    if n < 3 {
        return Err(Error::TooFewVertices { need: 3, have: n });
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!(
            "mode {k} out of range for N = {n}"
        )));
    }
    let vertices = (0..n)
        .map(|j| {
            let angle = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
            Vector::from_column_slice(&[angle.cos(), angle.sin()])
        })
        .collect();
    let mu = 0.5 * (1.0 + (2.0 * PI * k as f64 / n as f64).cos());
    Ok((Polygon::closed(vertices)?, mu))
}

/// `L(x) = Σ ‖x_{j+1} − x_j‖` over a closed polygon.
pub fn length(x: &Polygon) -> Result<f64> {
    let n = x.require_closed()?;
    let vs = &x.vertices;
    Ok((0..n).map(|j| (&vs[(j + 1) % n] - &vs[j]).norm()).sum())
}

/// `F₂(x) = ½ Σ ‖x_{j+1} − x_j‖²` over a closed polygon.
pub fn f2_energy(x: &Polygon) -> Result<f64> {
    let n = x.require_closed()?;
    let vs = &x.vertices;
    Ok(0.5
        * (0..n)
            .map(|j| (&vs[(j + 1) % n] - &vs[j]).norm_squared())
            .sum::<f64>())
}

/// `grad F₂(x)_j = −(x_{j−1} − 2x_j + x_{j+1})`.
pub fn grad_f2(x: &Polygon) -> Result<Polygon> {
    let n = x.require_closed()?;
    let vs = &x.vertices;
    let out = (0..n)
        .map(|j| &vs[j] * 2.0 - &vs[(j + n - 1) % n] - &vs[(j + 1) % n])
        .collect();
    Ok(x.with_vertices(out, x.topology))
}

pub fn center_of_mass(x: &Polygon) -> Result<Vector> {
    let n = x.require_closed()?;
    let sum = x
        .vertices
        .iter()
        .fold(Vector::zeros(x.dim), |acc, v| acc + v);
    Ok(sum / n as f64)
}

/// Outcome of [`verify_soliton`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonResidualReport {
    /// `max_j ‖T(x)_j − (A x_j + b)‖` over the interior vertices.
    pub max_residual: f64,
    pub argmax_index: i64,
    pub fitted_map: AffineMap,
    /// The vertices are affinely degenerate, so the fitted map is not unique.
    pub rank_deficient: bool,
}

/// Least-squares fit of `(A, b)` to `targets_j ≈ A sources_j + b`.
///
/// Columns are equilibrated before the SVD; returns the map and whether the
/// design matrix lost rank.
fn fit_affine(sources: &[&Vector], targets: &[Vector], n: usize) -> Result<(AffineMap, bool)> {
    let m = sources.len();
    let mut design = DMatrix::<f64>::zeros(m, n + 1);
    let mut rhs = DMatrix::<f64>::zeros(m, n);
    for (row, (x, y)) in sources.iter().zip(targets).enumerate() {
        for c in 0..n {
            design[(row, c)] = x[c];
            rhs[(row, c)] = y[c];
        }
        design[(row, n)] = 1.0;
    }
    let scales: Vec<f64> = (0..=n)
        .map(|c| {
            let s = design.column(c).amax();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (c, s) in scales.iter().enumerate() {
        design.column_mut(c).unscale_mut(*s);
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = smax * 1e-10;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let coeffs = svd
        .solve(&rhs, cutoff.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = Vector::zeros(n);
    for out in 0..n {
        for c in 0..n {
            a[(out, c)] = coeffs[(c, out)] / scales[c];
        }
        b[out] = coeffs[(n, out)] / scales[n];
    }
    Ok((AffineMap::new(SquareMatrix::new(a)?, b)?, rank < n + 1))
}

/// Measures how far `x` is from satisfying `T(x)_j = A x_j + b`.
///
/// With `map = None` the map is fitted by least squares on the interior
/// equations first.
pub fn verify_soliton(x: &Polygon, map: Option<&AffineMap>) -> Result<SolitonResidualReport> {
    if x.len() < 5 {
        return Err(Error::TooFewVertices {
            need: 5,
            have: x.len(),
        });
    }
    let n = x.dim();
    let image = shorten(x)?;
    let pairs: Vec<(i64, &Vector, &Vector)> = image
        .indexed()
        .map(|(j, tx)| (j, x.vertex(j).expect("interior index"), tx))
        .collect();

    let (fitted_map, rank_deficient) = match map {
        Some(m) => {
            if m.dim() != n {
                return Err(Error::Dimension(format!(
                    "map acts on R^{}, polygon lives in R^{n}",
                    m.dim()
                )));
            }
            (m.clone(), false)
        }
        None => {
            if pairs.len() < n + 1 {
                return Err(Error::TooFewVertices {
                    need: n + 3,
                    have: x.len(),
                });
            }
            let sources: Vec<&Vector> = pairs.iter().map(|p| p.1).collect();
            let targets: Vec<Vector> = pairs.iter().map(|p| p.2.clone()).collect();
            fit_affine(&sources, &targets, n)?
        }
    };

    let (argmax_index, max_residual) = pairs
        .iter()
        .map(|(j, xj, txj)| (*j, (*txj - fitted_map.apply(xj)).norm()))
        .fold(
            (pairs[0].0, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );

    Ok(SolitonResidualReport {
        max_residual,
        argmax_index,
        fitted_map,
        rank_deficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v2(x: f64, y: f64) -> Vector {
        Vector::from_column_slice(&[x, y])
    }

    fn unit_square() -> Polygon {
        Polygon::closed(vec![v2(0.0, 0.0), v2(1.0, 0.0), v2(1.0, 1.0), v2(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn midpoints_of_square() {
        let m = midpoint_map(&unit_square()).unwrap();
        let expected = [v2(0.5, 0.0), v2(1.0, 0.5), v2(0.5, 1.0), v2(0.0, 0.5)];
        assert_eq!(m.vertices(), &expected);
        assert_eq!(m.topology(), Topology::Closed { n: 4 });
    }

    #[test]
    fn midpoint_shrinks_open_window() {
        let x = Polygon::open(-2, vec![v2(0.0, 0.0), v2(2.0, 0.0), v2(2.0, 2.0)]).unwrap();
        let m = midpoint_map(&x).unwrap();
        assert_eq!(
            m.topology(),
            Topology::OpenWindow {
                j_min: -2,
                j_max: -1
            }
        );
        assert_eq!(m.vertices(), &[v2(1.0, 0.0), v2(2.0, 1.0)]);
    }

    #[test]
    fn constant_polygon_fixed() {
        let c = Polygon::closed(vec![v2(3.0, -1.0); 5]).unwrap();
        assert_eq!(midpoint_map(&c).unwrap(), c);
        assert_eq!(shorten(&c).unwrap(), c);
        assert_eq!(length(&c).unwrap(), 0.0);
        assert_eq!(f2_energy(&c).unwrap(), 0.0);
        assert!(grad_f2(&c)
            .unwrap()
            .vertices()
            .iter()
            .all(|g| g.norm() == 0.0));
    }

    #[test]
    fn shorten_interior_vertex() {
        let x = Polygon::open(0, vec![v2(0.0, 0.0), v2(1.0, 0.0), v2(0.0, 1.0)]).unwrap();
        let t = shorten(&x).unwrap();
        assert_eq!(t.topology(), Topology::OpenWindow { j_min: 1, j_max: 1 });
        assert_eq!(t.vertices(), &[v2(0.5, 0.25)]);
    }

    #[test]
    fn shorten_errors() {
        let x = Polygon::open(0, vec![v2(0.0, 0.0), v2(1.0, 0.0)]).unwrap();
        assert!(matches!(shorten(&x), Err(Error::TooFewVertices { .. })));
        assert!(shorten_t(&unit_square(), 0.0).is_err());
        assert!(Polygon::closed(vec![v2(0.0, 0.0), v2(1.0, 0.0)]).is_err());
    }

    #[test]
    fn linear_polygon_is_fixed() {
        let u = v2(0.5, -0.25);
        let v = v2(1.0, 2.0);
        let x = Polygon::open(-4, (-4..=4).map(|j| &u * j as f64 + &v).collect()).unwrap();
        for &alpha in &[0.25, 1.0 / 3.0, -0.7] {
            let t = shorten_t(&x, alpha).unwrap();
            for (j, tj) in t.indexed() {
                assert!((tj - x.vertex(j).unwrap()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn square_measures() {
        let sq = unit_square();
        assert_eq!(length(&sq).unwrap(), 4.0);
        assert_eq!(f2_energy(&sq).unwrap(), 2.0);
        assert_eq!(center_of_mass(&sq).unwrap(), v2(0.5, 0.5));
        let open = Polygon::open(0, sq.vertices().to_vec()).unwrap();
        assert_eq!(length(&open), Err(Error::RequiresClosed));
        assert_eq!(center_of_mass(&open), Err(Error::RequiresClosed));
    }

    #[test]
    fn eigenpolygon_basics() {
        let (_, mu) = eigenpolygon(4, 1).unwrap();
        assert!((mu - 0.5).abs() < 1e-16);
        let (z, mu) = eigenpolygon(7, 0).unwrap();
        assert_eq!(mu, 1.0);
        assert!(z.vertices().iter().all(|v| *v == v2(1.0, 0.0)));
        let (z, mu) = eigenpolygon(12, 5).unwrap();
        let tz = shorten(&z).unwrap();
        for (a, b) in tz.vertices().iter().zip(z.vertices()) {
            assert!((a - b * mu).amax() <= 1e-12);
        }
        assert!(eigenpolygon(5, 5).is_err());
        assert!(eigenpolygon(2, 0).is_err());
    }

    #[test]
    fn recursion_degenerates_to_line() {
        let u = v2(1.0, 1.0);
        let v = v2(2.0, 0.5);
        let x = soliton_recursion(&AffineMap::identity(2), &u, &v, 3, -5, 10).unwrap();
        for (j, xj) in x.indexed() {
            let expected = &u + (&v - &u) * (j - 3) as f64;
            assert!((xj - expected).norm() < 1e-12, "j = {j}");
        }
        assert!(soliton_recursion(&AffineMap::identity(2), &u, &v, 10, -5, 10).is_err());
    }

    #[test]
    fn verify_eigenpolygon_and_line() {
        let (z, mu) = eigenpolygon(12, 1).unwrap();
        let map = AffineMap::scaling(2, mu).unwrap();
        assert!(verify_soliton(&z, Some(&map)).unwrap().max_residual <= 1e-12);
        let fitted = verify_soliton(&z, None).unwrap();
        assert!(fitted.max_residual <= 1e-12);
        assert!(!fitted.rank_deficient);

        let line =
            Polygon::open(0, (0..8).map(|j| v2(j as f64, 2.0 * j as f64)).collect()).unwrap();
        let r = verify_soliton(&line, Some(&AffineMap::identity(2))).unwrap();
        assert_eq!(r.max_residual, 0.0);
        let r = verify_soliton(&line, None).unwrap();
        assert!(r.rank_deficient);
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn verify_needs_five_vertices() {
        assert!(matches!(
            verify_soliton(&unit_square(), None),
            Err(Error::TooFewVertices { need: 5, .. })
        ));
    }
}
