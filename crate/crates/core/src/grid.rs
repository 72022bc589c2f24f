//! Truncated uniform velocity lattice with its dual (frequency) lattice.
//!
//! Nodes are `v_k = -L + k*h` per axis with `h = 2L/n`, stored row-major in
//! `(k1, k2, k3)`. Frequencies live in fftshift-free "wrap" order: bin `k`
//! maps to the signed integer `k` for `k < n/2` and `k - n` otherwise, and
//! the physical frequency is `xi = pi * m / L` for signed `m`. Quadrature is
//! the plain lattice rule with weight `h^3` per node, which is spectrally
//! accurate for the smooth, rapidly decaying fields used throughout.

use crate::error::{KinlabError, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Uniform velocity lattice on `[-L, L)^3` with anti-aliasing margin `R <= L/2`.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    n: usize,
    box_half_width: f64,
    support_radius: f64,
    axis_nodes: Vec<f64>,
    dual_axis: Vec<f64>,
    signed_index: Vec<i64>,
}

impl VelocityGrid {
    pub fn new(n_per_axis: usize, box_half_width: f64, support_radius: f64) -> Result<Arc<Self>> {
        if n_per_axis < 4 || n_per_axis % 2 != 0 {
            return Err(KinlabError::ParameterDomain(format!(
                "n_per_axis = {n_per_axis}: need an even n >= 4"
            )));
        }
        if !(box_half_width > 0.0) {
            return Err(KinlabError::ParameterDomain(format!(
                "box_half_width = {box_half_width}: must be positive"
            )));
        }
        if !(support_radius > 0.0) || support_radius > box_half_width / 2.0 {
            return Err(KinlabError::ParameterDomain(format!(
                "support_radius = {support_radius}: need 0 < R <= L/2 = {}",
                box_half_width / 2.0
            )));
        }
        let h = 2.0 * box_half_width / n_per_axis as f64;
        let axis_nodes = (0..n_per_axis)
            .map(|k| -box_half_width + k as f64 * h)
            .collect();
        let signed_index: Vec<i64> = (0..n_per_axis)
            .map(|k| {
                if k < n_per_axis / 2 {
                    k as i64
                } else {
                    k as i64 - n_per_axis as i64
                }
            })
            .collect();
        let dual_axis = signed_index
            .iter()
            .map(|&m| std::f64::consts::PI * m as f64 / box_half_width)
            .collect();
        Ok(Arc::new(Self {
            n: n_per_axis,
            box_half_width,
            support_radius,
            axis_nodes,
            dual_axis,
            signed_index,
        }))
    }

    /// Default laboratory grid: `L = 8`, `R = 4`.
    pub fn standard(n_per_axis: usize) -> Result<Arc<Self>> {
        Self::new(n_per_axis, 8.0, 4.0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn box_half_width(&self) -> f64 {
        self.box_half_width
    }

    #[inline]
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.box_half_width / self.n as f64
    }

    /// Quadrature weight per node, `h^3`.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        let h = self.spacing();
        h * h * h
    }

    /// Dual-lattice quadrature weight `(2L)^-3` making Parseval exact.
    #[inline]
    pub fn dual_cell_weight(&self) -> f64 {
        let side = 2.0 * self.box_half_width;
        1.0 / (side * side * side)
    }

    #[inline]
    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis_nodes
    }

    #[inline]
    pub fn dual_axis(&self) -> &[f64] {
        &self.dual_axis
    }

    /// Signed integer frequency index per bin (wrap order).
    #[inline]
    pub fn signed_index(&self) -> &[i64] {
        &self.signed_index
    }

    #[inline]
    pub fn index(&self, k1: usize, k2: usize, k3: usize) -> usize {
        (k1 * self.n + k2) * self.n + k3
    }

    #[inline]
    pub fn node(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let k3 = idx % n;
        let k2 = (idx / n) % n;
        let k1 = idx / (n * n);
        [self.axis_nodes[k1], self.axis_nodes[k2], self.axis_nodes[k3]]
    }

    #[inline]
    pub fn dual_node(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        let k3 = idx % n;
        let k2 = (idx / n) % n;
        let k1 = idx / (n * n);
        [self.dual_axis[k1], self.dual_axis[k2], self.dual_axis[k3]]
    }

    /// Largest dual-lattice frequency magnitude (box corner).
    pub fn dual_radius(&self) -> f64 {
        let m = self.n as f64 / 2.0;
        (std::f64::consts::PI * m / self.box_half_width) * 3f64.sqrt()
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n
            && self.box_half_width == other.box_half_width
            && self.support_radius == other.support_radius
    }
}

fn check_same_grid(a: &VelocityGrid, b: &VelocityGrid, what: &str) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(KinlabError::GridMismatch(format!(
            "{what}: ({}, L={}, R={}) vs ({}, L={}, R={})",
            a.n, a.box_half_width, a.support_radius, b.n, b.box_half_width, b.support_radius
        )))
    }
}

/// Real scalar field sampled on a velocity grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<VelocityGrid>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Arc<VelocityGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<VelocityGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(KinlabError::InvalidInput(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    pub fn from_fn(grid: &Arc<VelocityGrid>, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.node(i))).collect();
        Self {
            grid: Arc::clone(grid),
            values,
        }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<VelocityGrid> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn add_scaled(&mut self, a: f64, other: &Field) -> Result<()> {
        check_same_grid(&self.grid, &other.grid, "add_scaled")?;
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
        Ok(())
    }

    pub fn linear_combination(a: f64, f: &Field, b: f64, g: &Field) -> Result<Field> {
        check_same_grid(&f.grid, &g.grid, "linear_combination")?;
        let values = f
            .values
            .iter()
            .zip(&g.values)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(Field {
            grid: Arc::clone(&f.grid),
            values,
        })
    }

    pub fn pointwise_mul(&self, other: &Field) -> Result<Field> {
        check_same_grid(&self.grid, &other.grid, "pointwise_mul")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| x * y)
            .collect();
        Ok(Field {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    /// Discrete integral `h^3 * sum f`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

/// Complex scalar field (Fourier coefficients or per-mode amplitudes).
#[derive(Debug, Clone)]
pub struct ComplexField {
    grid: Arc<VelocityGrid>,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: &Arc<VelocityGrid>) -> Self {
        Self {
            grid: Arc::clone(grid),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: &Arc<VelocityGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(KinlabError::InvalidInput(format!(
                "field length {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            values,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Arc<VelocityGrid> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn add_scaled(&mut self, a: Complex64, other: &ComplexField) -> Result<()> {
        check_same_grid(&self.grid, &other.grid, "add_scaled")?;
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
        Ok(())
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| a * v).collect(),
        }
    }

    pub fn norm_l2(&self) -> f64 {
        (self.grid.cell_volume() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Largest imaginary magnitude relative to the largest value magnitude.
    pub fn imaginary_residue(&self) -> f64 {
        let max = self.norm_inf();
        if max == 0.0 {
            return 0.0;
        }
        self.values.iter().fold(0.0f64, |m, v| m.max(v.im.abs())) / max
    }

    /// Drops imaginary parts, returning the residue alongside the real field.
    pub fn into_real_lossy(self) -> (Field, f64) {
        let residue = self.imaginary_residue();
        let values = self.values.iter().map(|v| v.re).collect();
        (
            Field {
                grid: self.grid,
                values,
            },
            residue,
        )
    }
}

/// Discrete inner product `h^3 * sum conj(f) g` (real fields).
pub fn inner(f: &Field, g: &Field) -> Result<f64> {
    check_same_grid(&f.grid, &g.grid, "inner")?;
    Ok(f.grid.cell_volume()
        * f.values
            .iter()
            .zip(&g.values)
            .map(|(&x, &y)| x * y)
            .sum::<f64>())
}

/// Discrete inner product for complex fields, conjugate-linear in `f`.
pub fn inner_complex(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    check_same_grid(&f.grid, &g.grid, "inner_complex")?;
    Ok(f.grid.cell_volume()
        * f.values
            .iter()
            .zip(&g.values)
            .map(|(&x, &y)| x.conj() * y)
            .sum::<Complex64>())
}

/// Dual-lattice inner product `(2L)^-3 * sum conj(F) G`.
pub fn inner_dual(f: &ComplexField, g: &ComplexField) -> Result<Complex64> {
    check_same_grid(&f.grid, &g.grid, "inner_dual")?;
    Ok(f.grid.dual_cell_weight()
        * f.values
            .iter()
            .zip(&g.values)
            .map(|(&x, &y)| x.conj() * y)
            .sum::<Complex64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        let grid = VelocityGrid::standard(16).unwrap();
        assert_eq!(grid.spacing(), 1.0);
        assert_eq!(grid.node(0), [-8.0, -8.0, -8.0]);
        // inner(1, 1) = (2L)^3 exactly
        let one = Field::from_fn(&grid, |_| 1.0);
        let ip = inner(&one, &one).unwrap();
        assert_eq!(ip, 4096.0);
    }

    #[test]
    fn wrap_order_matches_signed_integers() {
        let grid = VelocityGrid::standard(8).unwrap();
        assert_eq!(grid.signed_index(), &[0, 1, 2, 3, -4, -3, -2, -1]);
        let xi = grid.dual_axis();
        assert!((xi[1] - std::f64::consts::PI / 8.0).abs() < 1e-15);
        assert!((xi[4] + 4.0 * std::f64::consts::PI / 8.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(VelocityGrid::new(15, 8.0, 4.0).is_err());
        assert!(VelocityGrid::new(16, 8.0, 5.0).is_err());
        let g1 = VelocityGrid::standard(8).unwrap();
        let g2 = VelocityGrid::standard(16).unwrap();
        let f = Field::zeros(&g1);
        let h = Field::zeros(&g2);
        assert!(inner(&f, &h).is_err());
    }
}
