use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::special::{at_one, SphereDim};

/// Normalization of expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Coefficients `f̂_{k,l}` against `P_k^m ⊗ P_l^M`.
    Hat,
    /// Coefficients `f̌_{k,l} = P_k^m(1) P_l^M(1) f̂_{k,l}` against the normalized basis.
    Check,
}

/// Where a grid's numbers came from. Quadrature grids carry numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Exact,
    Quadrature,
}

/// Truncated `(K + 1) × (L + 1)` matrix of expansion coefficients on `S^m × S^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientGrid {
    dim_t: SphereDim,
    dim_s: SphereDim,
    k_max: usize,
    l_max: usize,
    mode: Mode,
    provenance: Provenance,
    values: Vec<f64>,
}

impl CoefficientGrid {
    pub fn zeros(
        dim_t: SphereDim,
        dim_s: SphereDim,
        k_max: usize,
        l_max: usize,
        mode: Mode,
    ) -> Result<Self> {
        Self::from_values(
            dim_t,
            dim_s,
            k_max,
            l_max,
            mode,
            vec![0.0; (k_max + 1) * (l_max + 1)],
        )
    }

    /// Builds a grid from row-major values (`values[k * (L + 1) + l]`).
    pub fn from_values(
        dim_t: SphereDim,
        dim_s: SphereDim,
        k_max: usize,
        l_max: usize,
        mode: Mode,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != (k_max + 1) * (l_max + 1) {
            return Err(invalid("grid value count does not match (K + 1)(L + 1)"));
        }
        if mode == Mode::Hat && !(dim_t.is_finite() && dim_s.is_finite()) {
            return Err(invalid("HAT mode needs finite dimensions on both axes"));
        }
        if matches!(dim_t, SphereDim::Finite(0)) || matches!(dim_s, SphereDim::Finite(0)) {
            return Err(invalid("sphere dimension must be at least 1"));
        }
        Ok(CoefficientGrid {
            dim_t,
            dim_s,
            k_max,
            l_max,
            mode,
            provenance: Provenance::Exact,
            values,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim_t(&self) -> SphereDim {
        self.dim_t
    }

    pub fn dim_s(&self) -> SphereDim {
        self.dim_s
    }

    /// Truncation degree `K` on the first axis.
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Truncation degree `L` on the second axis.
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[self.index(k, l)]
    }

    pub fn set(&mut self, k: usize, l: usize, value: f64) {
        let idx = self.index(k, l);
        self.values[idx] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(k, l, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.l_max + 1;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i / cols, i % cols, v))
    }

    /// Largest absolute entry-wise difference to a grid of the same shape.
    pub fn max_abs_diff(&self, other: &CoefficientGrid) -> Option<f64> {
        if (self.k_max, self.l_max) != (other.k_max, other.l_max) {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    /// `alpha * self + beta * other` for grids of identical shape, dimensions and mode.
    pub fn linear_combination(
        &self,
        alpha: f64,
        other: &CoefficientGrid,
        beta: f64,
    ) -> Result<CoefficientGrid> {
        if (self.dim_t, self.dim_s, self.k_max, self.l_max, self.mode)
            != (
                other.dim_t,
                other.dim_s,
                other.k_max,
                other.l_max,
                other.mode,
            )
        {
            return Err(invalid("grids differ in shape, dimensions or mode"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        let provenance =
            if self.provenance == Provenance::Exact && other.provenance == Provenance::Exact {
                Provenance::Exact
            } else {
                Provenance::Quadrature
            };
        Ok(CoefficientGrid {
            values,
            provenance,
            ..self.clone()
        })
    }

    /// Restricts to degrees `k <= k_max`, `l <= l_max`.
    pub fn truncated(&self, k_max: usize, l_max: usize) -> Result<CoefficientGrid> {
        if k_max > self.k_max || l_max > self.l_max {
            return Err(invalid("truncation exceeds grid size"));
        }
        let mut values = Vec::with_capacity((k_max + 1) * (l_max + 1));
        for k in 0..=k_max {
            for l in 0..=l_max {
                values.push(self.get(k, l));
            }
        }
        Ok(CoefficientGrid {
            k_max,
            l_max,
            values,
            ..self.clone()
        })
    }

    /// Swaps the two axes.
    pub fn transposed(&self) -> CoefficientGrid {
        let mut values = Vec::with_capacity(self.values.len());
        for l in 0..=self.l_max {
            for k in 0..=self.k_max {
                values.push(self.get(k, l));
            }
        }
        CoefficientGrid {
            dim_t: self.dim_s,
            dim_s: self.dim_t,
            k_max: self.l_max,
            l_max: self.k_max,
            values,
            ..self.clone()
        }
    }

    pub(crate) fn relabel(mut self, dim_t: SphereDim, dim_s: SphereDim) -> Self {
        self.dim_t = dim_t;
        self.dim_s = dim_s;
        self
    }

    fn index(&self, k: usize, l: usize) -> usize {
        assert!(
            k <= self.k_max && l <= self.l_max,
            "coefficient index ({k}, {l}) out of range"
        );
        k * (self.l_max + 1) + l
    }
}

fn rescale(g: &CoefficientGrid, target: Mode) -> Result<CoefficientGrid> {
    if g.mode == target {
        return Ok(g.clone());
    }
    let m = g.dim_t.require_finite()?;
    let big_m = g.dim_s.require_finite()?;
    let row: Vec<f64> = (0..=g.k_max).map(|k| at_one(k, m)).collect();
    let col: Vec<f64> = (0..=g.l_max).map(|l| at_one(l, big_m)).collect();
    let mut out = g.clone();
    out.mode = target;
    let cols = g.l_max + 1;
    for (i, v) in out.values.iter_mut().enumerate() {
        let scale = row[i / cols] * col[i % cols];
        match target {
            Mode::Check => *v *= scale,
            Mode::Hat => *v /= scale,
        }
    }
    Ok(out)
}

/// Rescales HAT coefficients to CHECK (normalized) coefficients. Identity on CHECK grids.
pub fn to_check_mode(g: &CoefficientGrid) -> Result<CoefficientGrid> {
    rescale(g, Mode::Check)
}

/// Inverse of [`to_check_mode`]. Requires finite dimensions.
pub fn to_hat_mode(g: &CoefficientGrid) -> Result<CoefficientGrid> {
    rescale(g, Mode::Hat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(m: u32) -> SphereDim {
        SphereDim::Finite(m)
    }

    #[test]
    fn legendre_modes_coincide() {
        let mut g = CoefficientGrid::zeros(d(2), d(2), 3, 3, Mode::Hat).unwrap();
        g.set(2, 1, 0.7);
        g.set(3, 3, -0.1);
        let c = to_check_mode(&g).unwrap();
        assert_eq!(c.values(), g.values());
        assert_eq!(c.mode(), Mode::Check);
    }

    #[test]
    fn zero_grid_stays_zero() {
        let g = CoefficientGrid::zeros(d(5), d(3), 4, 2, Mode::Hat).unwrap();
        assert!(to_check_mode(&g)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn value_at_one_scaling() {
        let mut g = CoefficientGrid::zeros(d(3), d(2), 2, 0, Mode::Hat).unwrap();
        g.set(2, 0, 0.5);
        assert!((to_check_mode(&g).unwrap().get(2, 0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn hat_rejects_infinite() {
        assert!(CoefficientGrid::zeros(SphereDim::Infinite, d(2), 1, 1, Mode::Hat).is_err());
        let g = CoefficientGrid::zeros(SphereDim::Infinite, d(2), 1, 1, Mode::Check).unwrap();
        assert!(to_hat_mode(&g).is_err());
    }

    #[test]
    fn transpose_and_truncate() {
        let vals = (0..12).map(|i| i as f64).collect();
        let g = CoefficientGrid::from_values(d(2), d(4), 2, 3, Mode::Check, vals).unwrap();
        let t = g.transposed();
        assert_eq!(
            (t.k_max(), t.l_max(), t.dim_t(), t.dim_s()),
            (3, 2, d(4), d(2))
        );
        assert_eq!(t.get(3, 1), g.get(1, 3));
        let tr = g.truncated(1, 1).unwrap();
        assert_eq!(tr.values(), &[0.0, 1.0, 4.0, 5.0]);
    }

    proptest! {
        #[test]
        fn mode_round_trip(m in 1u32..12, big_m in 1u32..12, vals in proptest::collection::vec(-5.0f64..5.0, 16)) {
            let g = CoefficientGrid::from_values(d(m), d(big_m), 3, 3, Mode::Hat, vals).unwrap();
            let back = to_hat_mode(&to_check_mode(&g).unwrap()).unwrap();
            prop_assert_eq!(back.mode(), Mode::Hat);
            for (a, b) in back.values().iter().zip(g.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }
}
