//! C ABI for `polysoliton`.
//!
//! Curves and polygons cross the boundary as opaque handles (`PsSpec`,
//! `PsPolygon`) that the caller releases with the matching `_free` function.
//! Matrices are row-major `double` arrays and polygon coordinates are stored
//! vertex after vertex. Every fallible call returns a [`PsStatus`]; on failure
//! [`ps_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polysoliton::jordan::invert_f_scalar;
use polysoliton::matfun::{co_si, SquareMatrix, Vector};
use polysoliton::polygon::{
    eigenpolygon, midpoint_map, sample_polygon, shorten_t, verify_soliton, Polygon, Topology,
};
use polysoliton::semidiscrete::evolve_closed;
use polysoliton::soliton::{affine_family, eval_curve, AffineMap, SolitonSpec};
use polysoliton::zoo::{preset_by_name, to_spec};
use polysoliton::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    NonFinite = 4,
    TooFewVertices = 5,
    RequiresClosed = 6,
    NotConverged = 7,
    SolitonCheck = 8,
    UnknownPreset = 9,
    BufferTooSmall = 10,
    Panic = 11,
}

/// A soliton curve `c'' = Bc + d`, `c(0) = v`, `c'(0) = w`.
pub struct PsSpec(SolitonSpec);

/// A closed polygon or an open window of vertices.
pub struct PsPolygon(Polygon);

/// Summary returned by [`ps_polygon_verify`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PsReport {
    pub max_residual: f64,
    pub argmax_index: i64,
    pub rank_deficient: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Fail {
    Null(&'static str),
    Buffer { need: usize, have: usize },
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl Fail {
    fn status(&self) -> PsStatus {
        match self {
            Fail::Null(_) => PsStatus::NullPointer,
            Fail::Buffer { .. } => PsStatus::BufferTooSmall,
            Fail::Core(e) => match e {
                Error::Dimension(_) => PsStatus::Dimension,
                Error::NonFinite(_) => PsStatus::NonFinite,
                Error::TooFewVertices { .. } => PsStatus::TooFewVertices,
                Error::RequiresClosed => PsStatus::RequiresClosed,
                Error::SeriesNonConvergence { .. } | Error::IntegratorCheck { .. } => {
                    PsStatus::NotConverged
                }
                Error::SolitonCheck { .. } => PsStatus::SolitonCheck,
                Error::UnknownPreset(_) => PsStatus::UnknownPreset,
                Error::InvalidArgument(_) | Error::MissingParam(_) | Error::Parse(_) => {
                    PsStatus::InvalidArgument
                }
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Fail::Null(what) => format!("null pointer passed for `{what}`"),
            Fail::Buffer { need, have } => {
                format!("output buffer holds {have} values, {need} needed")
            }
            Fail::Core(e) => e.to_string(),
        }
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Runs `body`, recording any failure or panic as the thread's last error.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            PsStatus::Ok
        }
        Ok(Err(fail)) => {
            set_error(fail.message());
            fail.status()
        }
        Err(_) => {
            set_error("internal panic".into());
            PsStatus::Panic
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or(Fail::Null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn square(n: usize, entries: &[f64]) -> Result<SquareMatrix, Fail> {
    Ok(SquareMatrix::from_row_slice(n, entries)?)
}

fn copy_matrix(m: &SquareMatrix, out: &mut [f64]) {
    let n = m.dim();
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = m[(r, c)];
        }
    }
}

fn sized(count: usize, dim: usize) -> Result<usize, Fail> {
    count.checked_mul(dim).ok_or_else(|| {
        Fail::Core(Error::InvalidArgument(
            "vertex buffer size overflows".into(),
        ))
    })
}

unsafe fn vertex_list(dim: usize, count: usize, coords: *const f64) -> Result<Vec<Vector>, Fail> {
    if dim == 0 {
        return Err(Error::Dimension("dimension must be at least 1".into()).into());
    }
    let flat = input(coords, sized(count, dim)?, "coords")?;
    Ok(flat
        .chunks_exact(dim)
        .map(Vector::from_column_slice)
        .collect())
}

/// Message for the most recent failure on this thread, or NULL after a success.
///
/// The string stays valid until the next `ps_` call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a curve spec in `R^n`. `b` holds `n*n` entries; `d`, `v`, `w` hold `n`.
/// A NULL `d` means `d = 0`.
///
/// # Safety
/// Non-NULL pointers must reference arrays of the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_new(
    n: usize,
    b: *const f64,
    d: *const f64,
    v: *const f64,
    w: *const f64,
    out: *mut *mut PsSpec,
) -> PsStatus {
    guard(|| {
        let b = square(n, input(b, sized(n, n)?, "b")?)?;
        let d = if d.is_null() {
            Vector::zeros(n)
        } else {
            Vector::from_column_slice(input(d, n, "d")?)
        };
        let v = Vector::from_column_slice(input(v, n, "v")?);
        let w = Vector::from_column_slice(input(w, n, "w")?);
        store(out, PsSpec(SolitonSpec::new(b, d, v, w)?))
    })
}

/// Looks up a catalogue curve by name (`"intro"`, `"1a"`, …, `"6"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_zoo_preset(name: *const c_char, out: *mut *mut PsSpec) -> PsStatus {
    guard(|| {
        if name.is_null() {
            return Err(Fail::Null("name"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Error::InvalidArgument("preset name is not UTF-8".into()))?;
        store(out, PsSpec(to_spec(&preset_by_name(name)?)?))
    })
}

/// # Safety
/// `spec` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_free(spec: *mut PsSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Ambient dimension of the curve, or 0 for a NULL handle.
///
/// # Safety
/// `spec` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_dim(spec: *const PsSpec) -> usize {
    spec.as_ref().map_or(0, |s| s.0.dim())
}

/// Writes `c(t)` to `out[0..n]`.
///
/// # Safety
/// `spec` must be a live handle and `out` must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_eval(spec: *const PsSpec, t: f64, out: *mut f64) -> PsStatus {
    guard(|| {
        let spec = &handle(spec, "spec")?.0;
        let out = output(out, spec.dim(), "out")?;
        out.copy_from_slice(eval_curve(spec, t)?.as_slice());
        Ok(())
    })
}

/// Writes the map `(A(s), b(s))` with `T(c(· ; s)) = A c + b`: `a_out` gets
/// `n*n` row-major entries and `b_out` gets `n`.
///
/// # Safety
/// `spec` must be a live handle; the output arrays must have the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_affine_family(
    spec: *const PsSpec,
    s: f64,
    a_out: *mut f64,
    b_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let spec = &handle(spec, "spec")?.0;
        let n = spec.dim();
        let a_out = output(a_out, n * n, "a_out")?;
        let b_out = output(b_out, n, "b_out")?;
        let map = affine_family(spec, s)?;
        copy_matrix(&map.a, a_out);
        b_out.copy_from_slice(map.b.as_slice());
        Ok(())
    })
}

/// Polygon of curve samples `x_j = c(t0 + j*step)` for `j_min ≤ j ≤ j_max`.
///
/// # Safety
/// `spec` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_spec_sample(
    spec: *const PsSpec,
    t0: f64,
    step: f64,
    j_min: i64,
    j_max: i64,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        let spec = &handle(spec, "spec")?.0;
        store(
            out,
            PsPolygon(sample_polygon(spec, t0, step, j_min, j_max)?),
        )
    })
}

/// Matrix cosine and sine series `co_B(t)`, `si_B(t)` for an `n × n` matrix `b`.
///
/// # Safety
/// `b`, `co_out` and `si_out` must each hold `n*n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_co_si(
    n: usize,
    b: *const f64,
    t: f64,
    co_out: *mut f64,
    si_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let len = sized(n, n)?;
        let b = square(n, input(b, len, "b")?)?;
        let co_out = output(co_out, len, "co_out")?;
        let si_out = output(si_out, len, "si_out")?;
        let pair = co_si(&b, t)?;
        copy_matrix(&pair.co, co_out);
        copy_matrix(&pair.si, si_out);
        Ok(())
    })
}

/// The scalar `b` with `(1 + cos_b(s))/2 = lambda`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_invert_f_scalar(lambda: f64, s: f64, out: *mut f64) -> PsStatus {
    guard(|| {
        let out = output(out, 1, "out")?;
        out[0] = invert_f_scalar(lambda, s)?;
        Ok(())
    })
}

/// Closed polygon from `count` vertices in `R^dim`.
///
/// # Safety
/// `coords` must hold `count*dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_new_closed(
    dim: usize,
    count: usize,
    coords: *const f64,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        store(
            out,
            PsPolygon(Polygon::closed(vertex_list(dim, count, coords)?)?),
        )
    })
}

/// Open window of `count` vertices whose first index is `j_min`.
///
/// # Safety
/// `coords` must hold `count*dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_new_open(
    j_min: i64,
    dim: usize,
    count: usize,
    coords: *const f64,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        store(
            out,
            PsPolygon(Polygon::open(j_min, vertex_list(dim, count, coords)?)?),
        )
    })
}

/// Regular `n`-gon traversed with step `k`; `mu_out` (may be NULL) receives its
/// eigenvalue under the shortening map.
///
/// # Safety
/// `out` must be writable; `mu_out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ps_eigenpolygon(
    n: usize,
    k: usize,
    out: *mut *mut PsPolygon,
    mu_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let (x, mu) = eigenpolygon(n, k)?;
        store(out, PsPolygon(x))?;
        if !mu_out.is_null() {
            *mu_out = mu;
        }
        Ok(())
    })
}

/// # Safety
/// `polygon` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_free(polygon: *mut PsPolygon) {
    if !polygon.is_null() {
        drop(Box::from_raw(polygon));
    }
}

/// Number of stored vertices, or 0 for a NULL handle.
///
/// # Safety
/// `polygon` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_len(polygon: *const PsPolygon) -> usize {
    polygon.as_ref().map_or(0, |p| p.0.len())
}

/// Dimension of the vertices, or 0 for a NULL handle.
///
/// # Safety
/// `polygon` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_dim(polygon: *const PsPolygon) -> usize {
    polygon.as_ref().map_or(0, |p| p.0.dim())
}

/// Whether the polygon is closed. Open windows report their index range through
/// `j_min_out`/`j_max_out` (either may be NULL).
///
/// # Safety
/// `polygon` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_topology(
    polygon: *const PsPolygon,
    closed_out: *mut bool,
    j_min_out: *mut i64,
    j_max_out: *mut i64,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        if closed_out.is_null() {
            return Err(Fail::Null("closed_out"));
        }
        let (closed, lo, hi) = match p.topology() {
            Topology::Closed { n } => (true, 0, n as i64 - 1),
            Topology::OpenWindow { j_min, j_max } => (false, j_min, j_max),
        };
        *closed_out = closed;
        if !j_min_out.is_null() {
            *j_min_out = lo;
        }
        if !j_max_out.is_null() {
            *j_max_out = hi;
        }
        Ok(())
    })
}

/// Copies the coordinates into `out`, vertex after vertex. `capacity` is the
/// number of doubles available; `len * dim` are needed.
///
/// # Safety
/// `polygon` must be a live handle and `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_vertices(
    polygon: *const PsPolygon,
    out: *mut f64,
    capacity: usize,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        let need = p.len() * p.dim();
        if capacity < need {
            return Err(Fail::Buffer {
                need,
                have: capacity,
            });
        }
        let out = output(out, need, "out")?;
        for (chunk, v) in out.chunks_exact_mut(p.dim()).zip(p.vertices()) {
            chunk.copy_from_slice(v.as_slice());
        }
        Ok(())
    })
}

/// `x_j ↦ α x_{j−1} + (1 − 2α) x_j + α x_{j+1}`; `alpha = 0.25` is the standard map.
///
/// # Safety
/// `polygon` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_shorten(
    polygon: *const PsPolygon,
    alpha: f64,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        store(out, PsPolygon(shorten_t(p, alpha)?))
    })
}

/// `x_j ↦ ½(x_j + x_{j+1})`.
///
/// # Safety
/// `polygon` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_midpoint(
    polygon: *const PsPolygon,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        store(out, PsPolygon(midpoint_map(p)?))
    })
}

/// Closed polygon evolved for time `s ≥ 0` under `dx_j/ds = x_{j−1} − 2x_j + x_{j+1}`.
///
/// # Safety
/// `polygon` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_evolve(
    polygon: *const PsPolygon,
    s: f64,
    out: *mut *mut PsPolygon,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        store(out, PsPolygon(evolve_closed(p, s)?))
    })
}

/// Residual of `T(x)_j = A x_j + b` over the interior vertices.
///
/// With `map_a` and `map_b` both NULL the map is fitted by least squares and,
/// when `fit_a_out`/`fit_b_out` are non-NULL, written there (`dim*dim` and `dim`
/// doubles). Otherwise `map_a`/`map_b` give the map to test.
///
/// # Safety
/// `polygon` must be a live handle, `report` writable, and every non-NULL array
/// must have the stated length.
#[no_mangle]
pub unsafe extern "C" fn ps_polygon_verify(
    polygon: *const PsPolygon,
    map_a: *const f64,
    map_b: *const f64,
    report: *mut PsReport,
    fit_a_out: *mut f64,
    fit_b_out: *mut f64,
) -> PsStatus {
    guard(|| {
        let p = &handle(polygon, "polygon")?.0;
        if report.is_null() {
            return Err(Fail::Null("report"));
        }
        let n = p.dim();
        let map = match (map_a.is_null(), map_b.is_null()) {
            (true, true) => None,
            (false, false) => Some(AffineMap::new(
                square(n, input(map_a, n * n, "map_a")?)?,
                Vector::from_column_slice(input(map_b, n, "map_b")?),
            )?),
            (true, false) => return Err(Fail::Null("map_a")),
            (false, true) => return Err(Fail::Null("map_b")),
        };
        let r = verify_soliton(p, map.as_ref())?;
        *report = PsReport {
            max_residual: r.max_residual,
            argmax_index: r.argmax_index,
            rank_deficient: r.rank_deficient,
        };
        if !fit_a_out.is_null() {
            copy_matrix(&r.fitted_map.a, output(fit_a_out, n * n, "fit_a_out")?);
        }
        if !fit_b_out.is_null() {
            output(fit_b_out, n, "fit_b_out")?.copy_from_slice(r.fitted_map.b.as_slice());
        }
        Ok(())
    })
}
