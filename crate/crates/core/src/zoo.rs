//! Catalog of planar soliton curves with the parameters used for their figures.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matfun::{SquareMatrix, Vector};
use crate::soliton::{SolitonCurve, SolitonSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PresetId {
    Intro,
    Case1a,
    Case1b,
    Case1c,
    Case2a,
    Case2b,
    Case2c,
    Case3,
    Case3Figure,
    Case4,
    Case5,
    Case6,
}

impl PresetId {
    pub const ALL: [PresetId; 12] = [
        PresetId::Intro,
        PresetId::Case1a,
        PresetId::Case1b,
        PresetId::Case1c,
        PresetId::Case2a,
        PresetId::Case2b,
        PresetId::Case2c,
        PresetId::Case3,
        PresetId::Case3Figure,
        PresetId::Case4,
        PresetId::Case5,
        PresetId::Case6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetId::Intro => "intro",
            PresetId::Case1a => "1a",
            PresetId::Case1b => "1b",
            PresetId::Case1c => "1c",
            PresetId::Case2a => "2a",
            PresetId::Case2b => "2b",
            PresetId::Case2c => "2c",
            PresetId::Case3 => "3",
            PresetId::Case3Figure => "3fig",
            PresetId::Case4 => "4",
            PresetId::Case5 => "5",
            PresetId::Case6 => "6",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Whether samples come from the ODE solution or from the curve as printed
/// for the figure. Only case 3 distinguishes the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Strict,
    Figure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZooPreset {
    pub id: PresetId,
    pub params: BTreeMap<String, f64>,
    pub t_range: (f64, f64),
    pub figure: &'static str,
    pub mode: SampleMode,
}

impl ZooPreset {
    fn build(
        id: PresetId,
        params: &[(&str, f64)],
        t_range: (f64, f64),
        figure: &'static str,
    ) -> Self {
        ZooPreset {
            id,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            t_range,
            figure,
            mode: if id == PresetId::Case3Figure {
                SampleMode::Figure
            } else {
                SampleMode::Strict
            },
        }
    }

    pub fn param(&self, name: &str) -> Result<f64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingParam(name.to_string()))
    }
}

/// Variants of case 1c: `c(t) = (t, y(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case1cCurve {
    Exp,
    Cosh,
    Sin,
}

/// Case 1c preset for the chosen `y(t)`.
pub fn preset_1c(curve: Case1cCurve) -> ZooPreset {
    let (b2, v2, w2) = match curve {
        Case1cCurve::Exp => (1.0, 1.0, 1.0),
        Case1cCurve::Cosh => (1.0, 1.0, 0.0),
        Case1cCurve::Sin => (-1.0, 0.0, 1.0),
    };
    ZooPreset::build(
        PresetId::Case1c,
        &[("b2", b2), ("v2", v2), ("w2", w2)],
        (-3.0, 3.0),
        "scaling, case (1c)",
    )
}

/// All twelve presets, in the order of [`PresetId::ALL`].
pub fn preset_table() -> Vec<ZooPreset> {
    PresetId::ALL.into_iter().map(preset).collect()
}

pub fn preset(id: PresetId) -> ZooPreset {
    use PresetId::*;
    let spiral = |u1: f64, u2: f64, h11: f64, h21: f64| {
        [
            ("u1", u1),
            ("u2", u2),
            ("h11", h11),
            ("h12", 0.0),
            ("h21", h21),
            ("h22", 0.0),
        ]
    };
    let case3 = [
        ("d2", 0.1),
        ("a3", 0.2),
        ("a2", -4.0),
        ("a1", -1.0),
        ("a0", 0.0),
    ];
    match id {
        Intro => ZooPreset::build(
            id,
            &[
                ("b1", -4.0),
                ("b2", -9.0),
                ("v1", 1.0),
                ("v2", 1.0),
                ("w1", 0.0),
                ("w2", 0.0),
                ("s_demo", 0.4),
            ],
            (0.0, 6.3),
            "polygon and curve as solitons, opening example",
        ),
        Case1a => ZooPreset::build(
            id,
            &[
                ("lambda1", 4.0),
                ("lambda2", 9.0),
                ("w1", 1.0),
                ("v2", 1.0),
                ("w2", 0.0),
                ("v1", 0.0),
            ],
            (0.0, 6.3),
            "scaling, case (1a)",
        ),
        Case1b => ZooPreset::build(
            id,
            &[
                ("lambda1", 8.0),
                ("lambda2", 1.0),
                ("v2", 1.0),
                ("w1", 1.0),
                ("v1", 0.0),
                ("w2", 0.0),
            ],
            (-1.3, 1.3),
            "scaling, case (1b)",
        ),
        Case1c => preset_1c(Case1cCurve::Sin),
        Case2a => ZooPreset::build(
            id,
            &spiral(0.3, 4.0, 1.0, 0.0),
            (-3.0, 3.0),
            "spira mirabilis, rotate and scale, case (2a)",
        ),
        Case2b => ZooPreset::build(
            id,
            &spiral(1.0, 20.0, 0.5, 0.5),
            (0.0, 1.2),
            "rotate and scale, case (2b)",
        ),
        Case2c => ZooPreset::build(
            id,
            &spiral(1.0, 20.0, 1.0, 1.3),
            (-0.57, 0.885),
            "rotate and scale, case (2c)",
        ),
        Case3 => ZooPreset::build(id, &case3, (-30.0, 25.0), "shear, case (3)"),
        Case3Figure => ZooPreset::build(id, &case3, (-30.0, 25.0), "shear, case (3), as drawn"),
        Case4 => ZooPreset::build(
            id,
            &[
                ("b", -1.0),
                ("v1", 1.0),
                ("v2", -0.1),
                ("w1", -10.0),
                ("w2", 1.0),
            ],
            (-30.0, 40.0),
            "shear and scaling, case (4)",
        ),
        Case5 => ZooPreset::build(
            id,
            &[("d2", 2.0), ("w1", 1.0)],
            (-3.0, 3.0),
            "translation, case (5)",
        ),
        Case6 => ZooPreset::build(
            id,
            &[("b", -1.0), ("d1", 2.0), ("v2", 0.0), ("w2", 1.0)],
            (-10.0, 10.0),
            "translation and scaling, case (6)",
        ),
    }
}

/// Looks a preset up by its CLI id.
pub fn preset_by_name(name: &str) -> Result<ZooPreset> {
    Ok(preset(name.parse()?))
}

fn v2(x: f64, y: f64) -> Vector {
    Vector::from_column_slice(&[x, y])
}

/// The ODE data `(B, d, v, w)` whose solution is the preset curve.
///
/// For `3fig` this is the case-3 soliton; the printed quartic is only used by
/// [`emit_samples`].
pub fn to_spec(preset: &ZooPreset) -> Result<SolitonSpec> {
    use PresetId::*;
    let p = |name: &str| preset.param(name);
    match preset.id {
        Intro => SolitonSpec::homogeneous(
            SquareMatrix::diagonal(&[p("b1")?, p("b2")?])?,
            v2(p("v1")?, p("v2")?),
            v2(p("w1")?, p("w2")?),
        ),
        // c(t) = (v1 cos λ1t + w1 sin λ1t, v2 cos λ2t + w2 sin λ2t)
        Case1a => {
            let (l1, l2) = (p("lambda1")?, p("lambda2")?);
            SolitonSpec::homogeneous(
                SquareMatrix::diagonal(&[-l1 * l1, -l2 * l2])?,
                v2(p("v1")?, p("v2")?),
                v2(p("w1")? * l1, p("w2")? * l2),
            )
        }
        // c(t) = (w1 sin λ1t, v2 cosh λ2t)
        Case1b => {
            let (l1, l2) = (p("lambda1")?, p("lambda2")?);
            SolitonSpec::homogeneous(
                SquareMatrix::diagonal(&[-l1 * l1, l2 * l2])?,
                v2(p("v1")?, p("v2")?),
                v2(p("w1")? * l1, p("w2")? * l2),
            )
        }
        Case1c => SolitonSpec::homogeneous(
            SquareMatrix::diagonal(&[0.0, p("b2")?])?,
            v2(0.0, p("v2")?),
            v2(1.0, p("w2")?),
        ),
        // z(t) = h1 e^{wt} + h2 e^{−wt} solves z'' = w² z
        Case2a | Case2b | Case2c => {
            let (u1, u2) = (p("u1")?, p("u2")?);
            let (h11, h12, h21, h22) = (p("h11")?, p("h12")?, p("h21")?, p("h22")?);
            let (mu_re, mu_im) = (u1 * u1 - u2 * u2, 2.0 * u1 * u2);
            let (dh_re, dh_im) = (h11 - h21, h12 - h22);
            SolitonSpec::homogeneous(
                SquareMatrix::from_row_slice(2, &[mu_re, -mu_im, mu_im, mu_re])?,
                v2(h11 + h21, h12 + h22),
                v2(u1 * dh_re - u2 * dh_im, u1 * dh_im + u2 * dh_re),
            )
        }
        // B = N₂, d = (0, d2); x(t) matches the printed quartic term by term
        Case3 | Case3Figure => SolitonSpec::new(
            SquareMatrix::nilpotent(2),
            v2(0.0, p("d2")?),
            v2(p("a0")?, p("a2")?),
            v2(p("a1")?, p("a3")?),
        ),
        Case4 => {
            let b = p("b")?;
            SolitonSpec::homogeneous(
                SquareMatrix::from_row_slice(2, &[b, 1.0, 0.0, b])?,
                v2(p("v1")?, p("v2")?),
                v2(p("w1")?, p("w2")?),
            )
        }
        Case5 => SolitonSpec::new(
            SquareMatrix::zeros(2),
            v2(0.0, p("d2")?),
            v2(0.0, 0.0),
            v2(p("w1")?, 0.0),
        ),
        Case6 => SolitonSpec::new(
            SquareMatrix::diagonal(&[0.0, p("b")?])?,
            v2(p("d1")?, 0.0),
            v2(0.0, p("v2")?),
            v2(0.0, p("w2")?),
        ),
    }
}

/// The case-3 curve as printed: `(d2 t⁴/24 + a3 t³/6 + a2 t²/2 + a1 t + a0, t)`.
pub fn case3_figure_point(preset: &ZooPreset, t: f64) -> Result<Vector> {
    let x = preset.param("d2")? * t.powi(4) / 24.0
        + preset.param("a3")? * t.powi(3) / 6.0
        + preset.param("a2")? * t * t / 2.0
        + preset.param("a1")? * t
        + preset.param("a0")?;
    Ok(v2(x, t))
}

/// Evenly spaced parameter values over the preset's `t` range, endpoints exact.
pub fn sample_times(preset: &ZooPreset, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 sample points, got {n_points}"
        )));
    }
    let (lo, hi) = preset.t_range;
    Ok((0..n_points)
        .map(|i| {
            if i == n_points - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n_points - 1) as f64
            }
        })
        .collect())
}

/// `(t, c(t))` on [`sample_times`].
pub fn emit_samples(preset: &ZooPreset, n_points: usize) -> Result<Vec<(f64, Vector)>> {
    let times = sample_times(preset, n_points)?;
    match preset.mode {
        SampleMode::Figure => times
            .into_iter()
            .map(|t| Ok((t, case3_figure_point(preset, t)?)))
            .collect(),
        SampleMode::Strict => {
            let curve = SolitonCurve::new(to_spec(preset)?);
            times
                .into_iter()
                .map(|t| Ok((t, curve.position(t)?)))
                .collect()
        }
    }
}
