//! CSV, SVG and JSON formats used by the command-line tool.
//!
//! CSV rows are `j,t,x0,x1,…` with every number printed as `{:.16e}`, which
//! round-trips `f64` exactly. Polygon files carry their topology in a leading
//! comment line such as `# topology=closed N=12`.

use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::matfun::{SquareMatrix, Vector};
use crate::polygon::{Polygon, SolitonResidualReport, Topology};
use crate::soliton::AffineMap;

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(dim: usize) -> String {
    let mut h = String::from("j,t");
    for c in 0..dim {
        let _ = write!(h, ",x{c}");
    }
    h
}

fn push_row(out: &mut String, j: i64, t: Option<f64>, x: &Vector) {
    let _ = write!(out, "{j},");
    if let Some(t) = t {
        out.push_str(&fmt_num(t));
    }
    for v in x.iter() {
        out.push(',');
        out.push_str(&fmt_num(*v));
    }
    out.push('\n');
}

/// Curve samples `(t, c(t))` with `j = 0, 1, …` and no comment lines.
pub fn samples_to_csv(samples: &[(f64, Vector)]) -> String {
    let dim = samples.first().map(|(_, c)| c.len()).unwrap_or(0);
    let mut out = header(dim);
    out.push('\n');
    for (j, (t, c)) in samples.iter().enumerate() {
        push_row(&mut out, j as i64, Some(*t), c);
    }
    out
}

/// A polygon with its topology comment; `times` fills the `t` column if given.
pub fn polygon_to_csv(x: &Polygon, times: Option<&[Option<f64>]>) -> String {
    let mut out = match x.topology() {
        Topology::Closed { n } => format!("# topology=closed N={n}\n"),
        Topology::OpenWindow { j_min, j_max } => {
            format!("# topology=open j_min={j_min} j_max={j_max}\n")
        }
    };
    out.push_str(&header(x.dim()));
    out.push('\n');
    for (i, (j, v)) in x.indexed().enumerate() {
        let t = times.and_then(|ts| ts.get(i).copied().flatten());
        push_row(&mut out, j, t, v);
    }
    out
}

/// A polygon read from CSV together with its optional `t` column.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonCsv {
    pub polygon: Polygon,
    pub times: Vec<Option<f64>>,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_topology(comment: &str) -> Result<Option<Topology>> {
    let mut kind = None;
    let mut fields = std::collections::HashMap::new();
    for token in comment.split_whitespace() {
        if let Some((k, v)) = token.split_once('=') {
            if k == "topology" {
                kind = Some(v.to_string());
            } else {
                let value: i64 = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad integer in `{token}`")))?;
                fields.insert(k.to_string(), value);
            }
        }
    }
    let get = |k: &str| {
        fields
            .get(k)
            .copied()
            .ok_or_else(|| Error::Parse(format!("topology comment lacks `{k}`")))
    };
    match kind.as_deref() {
        None => Ok(None),
        Some("closed") => {
            let n = get("N")?;
            if n < 0 {
                return Err(Error::Parse(format!("negative vertex count {n}")));
            }
            Ok(Some(Topology::Closed { n: n as usize }))
        }
        Some("open") => Ok(Some(Topology::OpenWindow {
            j_min: get("j_min")?,
            j_max: get("j_max")?,
        })),
        Some(other) => Err(Error::Parse(format!("unknown topology `{other}`"))),
    }
}

/// Parses a polygon CSV. Without a topology comment the rows are read as an
/// open window starting at the first row's index.
pub fn polygon_from_csv(text: &str) -> Result<PolygonCsv> {
    let mut topology = None;
    let mut header_seen = false;
    let mut dim = 0;
    let mut indices = Vec::new();
    let mut times = Vec::new();
    let mut vertices = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(t) = parse_topology(comment)? {
                topology = Some(t);
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if !header_seen {
            if cells.len() < 3 || cells[0] != "j" || cells[1] != "t" {
                return Err(parse_err(line_no, "expected header `j,t,x0,…`"));
            }
            dim = cells.len() - 2;
            header_seen = true;
            continue;
        }
        if cells.len() != dim + 2 {
            return Err(parse_err(
                line_no,
                format!("expected {} fields, found {}", dim + 2, cells.len()),
            ));
        }
        let j: i64 = cells[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad index `{}`", cells[0])))?;
        let t = if cells[1].is_empty() {
            None
        } else {
            Some(
                cells[1]
                    .parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad number `{}`", cells[1])))?,
            )
        };
        let coords = cells[2..]
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad number `{c}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        indices.push(j);
        times.push(t);
        vertices.push(Vector::from_vec(coords));
    }
    if !header_seen {
        return Err(Error::Parse("missing header line".into()));
    }
    if vertices.is_empty() {
        return Err(Error::Parse("no vertex rows".into()));
    }
    let first = indices[0];
    if indices
        .iter()
        .enumerate()
        .any(|(i, &j)| j != first + i as i64)
    {
        return Err(Error::Parse("vertex indices must be consecutive".into()));
    }

    let polygon = match topology {
        Some(Topology::Closed { n }) => {
            if n != vertices.len() || first != 0 {
                return Err(Error::Parse(format!(
                    "closed polygon declares N = {n} but has {} rows starting at {first}",
                    vertices.len()
                )));
            }
            Polygon::closed(vertices)?
        }
        Some(Topology::OpenWindow { j_min, j_max }) => {
            let last = first + vertices.len() as i64 - 1;
            if j_min != first || j_max != last {
                return Err(Error::Parse(format!(
                    "window {j_min}..={j_max} does not match rows {first}..={last}"
                )));
            }
            Polygon::open(j_min, vertices)?
        }
        None => Polygon::open(first, vertices)?,
    };
    Ok(PolygonCsv { polygon, times })
}

/// A single polyline through the first two coordinates of `points`, y-axis
/// pointing up, stroke width 0.5% of the bounding-box diagonal.
pub fn polyline_svg(points: &[Vector], closed: bool) -> Result<String> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("SVG needs at least 2 points".into()));
    }
    if points.iter().any(|p| p.len() < 2) {
        return Err(Error::Dimension("SVG output needs 2D points".into()));
    }
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(0.0 - p[1]);
        ymax = ymax.max(0.0 - p[1]);
    }
    let diag = (xmax - xmin).hypot(ymax - ymin);
    let diag = if diag > 0.0 { diag } else { 1.0 };
    let stroke = 0.005 * diag;
    let pad = 2.0 * stroke;
    let mut coords = String::new();
    let mut emit = |p: &Vector| {
        if !coords.is_empty() {
            coords.push(' ');
        }
        let _ = write!(coords, "{},{}", p[0], 0.0 - p[1]);
    };
    points.iter().for_each(&mut emit);
    if closed {
        emit(&points[0]);
    }
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n\
         <polyline fill=\"none\" stroke=\"black\" stroke-width=\"{}\" points=\"{}\"/>\n\
         </svg>\n",
        xmin - pad,
        ymin - pad,
        (xmax - xmin) + 2.0 * pad,
        (ymax - ymin) + 2.0 * pad,
        stroke,
        coords
    ))
}

/// `{max_residual, argmax_index, A, b, rank_deficient}` with `A` row-major.
pub fn report_json(report: &SolitonResidualReport) -> serde_json::Value {
    json!({
        "max_residual": report.max_residual,
        "argmax_index": report.argmax_index,
        "A": report.fitted_map.a.to_row_major(),
        "b": report.fitted_map.b.as_slice(),
        "rank_deficient": report.rank_deficient,
    })
}

#[derive(Deserialize)]
struct MapJson {
    #[serde(rename = "A")]
    a: Vec<f64>,
    b: Vec<f64>,
}

/// Parses `{"A": [row-major], "b": [...]}` or the shorthand `scale:<factor>`.
pub fn parse_affine_map(text: &str, dim: usize) -> Result<AffineMap> {
    let text = text.trim();
    if let Some(f) = text.strip_prefix("scale:") {
        let factor: f64 = f
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad scale factor `{f}`")))?;
        return AffineMap::scaling(dim, factor);
    }
    let m: MapJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if m.a.len() != dim * dim || m.b.len() != dim {
        return Err(Error::Dimension(format!(
            "map has {} matrix and {} translation entries, expected {} and {dim}",
            m.a.len(),
            m.b.len(),
            dim * dim
        )));
    }
    AffineMap::new(
        SquareMatrix::from_row_slice(dim, &m.a)?,
        Vector::from_vec(m.b),
    )
}

/// Comma-separated coordinates, e.g. `1.5,-2`.
pub fn parse_point(text: &str) -> Result<Vector> {
    let coords = text
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad coordinate `{c}`")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Vector::from_vec(coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::eigenpolygon;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn closed_round_trip_is_exact() {
        let (x, _) = eigenpolygon(7, 3).unwrap();
        let text = polygon_to_csv(&x, None);
        assert!(text.starts_with("# topology=closed N=7\nj,t,x0,x1\n0,,"));
        let back = polygon_from_csv(&text).unwrap();
        assert_eq!(back.polygon, x);
        assert!(back.times.iter().all(Option::is_none));
        assert_eq!(polygon_to_csv(&back.polygon, None), text);
    }

    #[test]
    fn open_window_round_trip() {
        let x = Polygon::open(
            -2,
            vec![v(&[0.1, 1.0 / 3.0]), v(&[1e-300, -7.0]), v(&[2.0, 5.5])],
        )
        .unwrap();
        let times = [Some(0.5), None, Some(-1.25)];
        let text = polygon_to_csv(&x, Some(&times));
        let back = polygon_from_csv(&text).unwrap();
        assert_eq!(back.polygon, x);
        assert_eq!(back.times, times);
    }

    #[test]
    fn samples_have_no_comment() {
        let text = samples_to_csv(&[(0.0, v(&[1.0, 2.0])), (1.0, v(&[3.0, 4.0]))]);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next(), Some("j,t,x0,x1"));
        let back = polygon_from_csv(&text).unwrap();
        assert_eq!(
            back.polygon.topology(),
            Topology::OpenWindow { j_min: 0, j_max: 1 }
        );
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(polygon_from_csv("").is_err());
        assert!(polygon_from_csv("a,b\n").is_err());
        assert!(polygon_from_csv("j,t,x0\n0,,1\n2,,3\n").is_err());
        assert!(polygon_from_csv("j,t,x0\n0,,abc\n1,,2\n").is_err());
        assert!(polygon_from_csv("# topology=closed N=4\nj,t,x0\n0,,1\n1,,2\n2,,3\n").is_err());
        assert!(polygon_from_csv("# topology=spiral\nj,t,x0\n0,,1\n1,,2\n").is_err());
    }

    #[test]
    fn map_parsing() {
        let m = parse_affine_map(r#"{"A": [1, 2, 3, 4], "b": [5, 6]}"#, 2).unwrap();
        assert_eq!(m.apply(&v(&[1.0, 0.0])), v(&[6.0, 9.0]));
        let s = parse_affine_map("scale:0.5", 3).unwrap();
        assert_eq!(s.apply(&v(&[2.0, 4.0, 6.0])), v(&[1.0, 2.0, 3.0]));
        assert!(parse_affine_map(r#"{"A": [1], "b": [5, 6]}"#, 2).is_err());
        assert!(parse_affine_map("scale:x", 2).is_err());
        assert_eq!(parse_point("1.5, -2").unwrap(), v(&[1.5, -2.0]));
    }

    #[test]
    fn svg_shape() {
        let pts = [v(&[0.0, 0.0]), v(&[3.0, 4.0])];
        let svg = polyline_svg(&pts, false).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("stroke-width=\"0.025\""));
        assert!(svg.contains("points=\"0,0 3,-4\""));
        assert!(polyline_svg(&pts[..1], false).is_err());
    }
}
