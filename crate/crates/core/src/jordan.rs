//! Which invertible matrices `D` are of the form `f(B, s) = ½(I + co_B(s))`.
//!
//! The answer depends only on the Jordan structure of `D`: every real negative
//! eigenvalue must carry an even number of Jordan blocks of each size.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matfun::scalar_cos_sin;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockEigenvalue {
    Real(f64),
    /// `α ± iβ` with `β ≠ 0`; the block is the real block `J_{2m}(α, β)`.
    ComplexPair {
        re: f64,
        im: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: BlockEigenvalue,
    /// `m`; a complex pair block occupies `2m` dimensions.
    pub size: usize,
}

impl JordanBlock {
    pub fn real(lambda: f64, size: usize) -> Self {
        JordanBlock {
            eigenvalue: BlockEigenvalue::Real(lambda),
            size,
        }
    }

    pub fn complex_pair(re: f64, im: f64, size: usize) -> Self {
        JordanBlock {
            eigenvalue: BlockEigenvalue::ComplexPair { re, im },
            size,
        }
    }

    pub fn dimension(&self) -> usize {
        match self.eigenvalue {
            BlockEigenvalue::Real(_) => self.size,
            BlockEigenvalue::ComplexPair { .. } => 2 * self.size,
        }
    }
}

/// A real matrix up to conjugacy, given by its real Jordan blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    blocks: Vec<JordanBlock>,
}

impl JordanSpec {
    pub fn new(blocks: Vec<JordanBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("Jordan data has no blocks".into()));
        }
        for b in &blocks {
            if b.size == 0 {
                return Err(Error::InvalidArgument("Jordan block of size 0".into()));
            }
            match b.eigenvalue {
                BlockEigenvalue::Real(l) if !l.is_finite() => {
                    return Err(Error::NonFinite("Jordan eigenvalue"))
                }
                BlockEigenvalue::ComplexPair { re, im } => {
                    if !re.is_finite() || !im.is_finite() {
                        return Err(Error::NonFinite("Jordan eigenvalue"));
                    }
                    if im == 0.0 {
                        return Err(Error::InvalidArgument(
                            "complex pair block needs a nonzero imaginary part".into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(JordanSpec { blocks })
    }

    /// Diagonal matrix: one `1 × 1` block per entry.
    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&l| JordanBlock::real(l, 1)).collect())
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(JordanBlock::dimension).sum()
    }
}

/// Whether the invertible matrix described by `target` equals `½(I + co_B(s))`
/// for some real `B` and real `s`.
pub fn in_image(target: &JordanSpec) -> Result<bool> {
    let mut counts: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    for block in target.blocks() {
        if let BlockEigenvalue::Real(lambda) = block.eigenvalue {
            if lambda == 0.0 {
                return Err(Error::InvalidArgument(
                    "target has eigenvalue 0 and is not invertible".into(),
                ));
            }
            if lambda < 0.0 {
                *counts.entry((lambda.to_bits(), block.size)).or_default() += 1;
            }
        }
    }
    Ok(counts.values().all(|c| c % 2 == 0))
}

/// The `b` with `(1 + cos_b(s))/2 = lambda`.
pub fn invert_f_scalar(lambda: f64, s: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "{lambda} is not of the form (1 + cos_b(s))/2"
        )));
    }
    if s == 0.0 || !s.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "s must be finite and nonzero, got {s}"
        )));
    }
    let y = 2.0 * lambda - 1.0;
    let s2 = s * s;
    Ok(if y >= 1.0 {
        y.acosh().powi(2) / s2
    } else {
        -y.acos().powi(2) / s2
    })
}

/// Closed interval sampled at `count` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        GridSpec { min, max, count }
    }

    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.min],
            c => (0..c)
                .map(|i| {
                    if i == c - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (c - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Best grid point for a `2 × 2` diagonal target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResult {
    /// `min ‖f(diag(b₁, b₂), s) − D‖∞` over the grid.
    pub residual: f64,
    pub b: (f64, f64),
    pub s: f64,
}

/// Exhaustive search of `‖f(diag(b₁, b₂), s) − diag(target)‖∞` over
/// `b₁, b₂ ∈ b_grid` and `s ∈ s_grid`.
pub fn brute_force_image_scan(
    target_diag: [f64; 2],
    b_grid: GridSpec,
    s_grid: GridSpec,
) -> Result<ScanResult> {
    let bs = b_grid.points();
    let ss = s_grid.points();
    if bs.is_empty() || ss.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    let mut best = ScanResult {
        residual: f64::INFINITY,
        b: (bs[0], bs[0]),
        s: ss[0],
    };
    for &s in &ss {
        let entries: Vec<f64> = bs
            .iter()
            .map(|&b| 0.5 * (1.0 + scalar_cos_sin(b, s).0))
            .collect();
        for (i, f1) in entries.iter().enumerate() {
            let e1 = (f1 - target_diag[0]).abs();
            if e1 >= best.residual {
                continue;
            }
            for (j, f2) in entries.iter().enumerate() {
                let r = e1.max((f2 - target_diag[1]).abs());
                if r < best.residual {
                    best = ScanResult {
                        residual: r,
                        b: (bs[i], bs[j]),
                        s,
                    };
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_examples() {
        assert!(!in_image(&JordanSpec::diagonal(&[-1.0, 2.0]).unwrap()).unwrap());
        assert!(in_image(&JordanSpec::diagonal(&[-1.0, -1.0]).unwrap()).unwrap());
        assert!(in_image(&JordanSpec::diagonal(&[0.5, 0.5, 3.0]).unwrap()).unwrap());
    }

    #[test]
    fn predicate_counts_per_block_size() {
        // J_2(−1) ⊕ J_1(−1): one block of each size, both odd
        let spec =
            JordanSpec::new(vec![JordanBlock::real(-1.0, 2), JordanBlock::real(-1.0, 1)]).unwrap();
        assert!(!in_image(&spec).unwrap());
        let spec = JordanSpec::new(vec![
            JordanBlock::real(-2.0, 3),
            JordanBlock::real(-2.0, 3),
            JordanBlock::complex_pair(-1.0, 0.5, 2),
            JordanBlock::real(4.0, 1),
        ])
        .unwrap();
        assert!(in_image(&spec).unwrap());
        assert_eq!(spec.dimension(), 11);
    }

    #[test]
    fn predicate_rejects_singular() {
        assert!(in_image(&JordanSpec::diagonal(&[0.0, 1.0]).unwrap()).is_err());
        assert!(JordanSpec::new(vec![JordanBlock::complex_pair(1.0, 0.0, 1)]).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(invert_f_scalar(1.0, 1.0).unwrap(), 0.0);

        let b = invert_f_scalar(0.9, 1.0).unwrap();
        assert!((b + 0.8f64.acos().powi(2)).abs() < 1e-15);
        assert!((0.5 * (1.0 + scalar_cos_sin(b, 1.0).0) - 0.9).abs() < 1e-12);

        let b = invert_f_scalar(2.0, 1.0).unwrap();
        let reference = (3.0 + 8f64.sqrt()).ln().powi(2);
        assert!((b - reference).abs() < 1e-12);
        assert!((0.5 * (1.0 + scalar_cos_sin(b, 1.0).0) - 2.0).abs() < 1e-12);

        assert!(invert_f_scalar(-0.1, 1.0).is_err());
        assert!(invert_f_scalar(0.5, 0.0).is_err());
    }

    #[test]
    fn identity_scan_hits_zero() {
        let r = brute_force_image_scan(
            [1.0, 1.0],
            GridSpec::new(-2.0, 2.0, 41),
            GridSpec::new(0.5, 1.5, 5),
        )
        .unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.b, (0.0, 0.0));
    }
}
