//! Maxwellian and the polynomial / tilde / phi-quotient weight families.

use crate::error::{KinlabError, Result};
use crate::grid::{Field, VelocityGrid};
use std::sync::Arc;

/// Normalized Maxwellian `(2 pi)^{-3/2} exp(-|v|^2 / 2)` on the grid.
pub fn maxwellian(grid: &Arc<VelocityGrid>) -> Field {
    let c = (2.0 * std::f64::consts::PI).powf(-1.5);
    Field::from_fn(grid, |v| {
        c * (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 2.0).exp()
    })
}

/// Square root of the Maxwellian, `(2 pi)^{-3/4} exp(-|v|^2 / 4)`.
pub fn sqrt_maxwellian(grid: &Arc<VelocityGrid>) -> Field {
    let c = (2.0 * std::f64::consts::PI).powf(-0.75);
    Field::from_fn(grid, |v| {
        c * (-(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / 4.0).exp()
    })
}

/// Weight families used by norms and estimate labs.
///
/// * `Polynomial` is `<v>^ell = (1 + |v|^2)^{ell/2}`.
/// * `Tilde` is `(1 + |v|^2)^{|s + gamma/2| ell / 2}`.
/// * `PhiQuotient` is `<v>^ell / (1 + |v|^2 + |x|^2)^{alpha/2}` with a frozen
///   spatial point `x`; requires `alpha > 3/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Polynomial { ell: f64 },
    Tilde { ell: f64, s: f64, gamma: f64 },
    PhiQuotient { ell: f64, alpha: f64, x: [f64; 3] },
}

impl WeightSpec {
    pub fn polynomial(ell: f64) -> Self {
        WeightSpec::Polynomial { ell }
    }

    /// The effective polynomial exponent of the weight.
    pub fn exponent(&self) -> f64 {
        match self {
            WeightSpec::Polynomial { ell } => *ell,
            WeightSpec::Tilde { ell, s, gamma } => (s + gamma / 2.0).abs() * ell,
            WeightSpec::PhiQuotient { ell, .. } => *ell,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let WeightSpec::PhiQuotient { alpha, .. } = self {
            if *alpha <= 1.5 {
                return Err(KinlabError::InvalidWeight { alpha: *alpha });
            }
        }
        Ok(())
    }

    pub fn eval(&self, v: [f64; 3]) -> f64 {
        let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        match self {
            WeightSpec::Polynomial { ell } => (1.0 + v2).powf(ell / 2.0),
            WeightSpec::Tilde { ell, s, gamma } => {
                (1.0 + v2).powf((s + gamma / 2.0).abs() * ell / 2.0)
            }
            WeightSpec::PhiQuotient { ell, alpha, x } => {
                let x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                (1.0 + v2).powf(ell / 2.0) / (1.0 + v2 + x2).powf(alpha / 2.0)
            }
        }
    }
}

/// Pointwise product `w(v) f(v)`.
pub fn apply_weight(f: &Field, w: &WeightSpec) -> Result<Field> {
    w.validate()?;
    let grid = f.grid();
    let mut out = f.clone();
    for idx in 0..grid.len() {
        out.values_mut()[idx] *= w.eval(grid.node(idx));
    }
    Ok(out)
}

/// `<v>^ell` as a field, the workhorse weight for norms.
pub fn polynomial_weight_field(grid: &Arc<VelocityGrid>, ell: f64) -> Field {
    Field::from_fn(grid, |v| {
        (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).powf(ell / 2.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner;

    #[test]
    fn maxwellian_mass_and_center() {
        let grid = VelocityGrid::standard(32).unwrap();
        let mu = maxwellian(&grid);
        // Gaussian tail outside the box is < 1e-13 for L = 8
        assert!((mu.integral() - 1.0).abs() < 1e-13);
        let center = grid.index(16, 16, 16);
        let expected = (2.0 * std::f64::consts::PI).powf(-1.5);
        assert_eq!(mu.values()[center], expected);
        // odd moment vanishes by symmetry of the lattice sum, up to the
        // rounding of a 32^3-term accumulation
        let v1 = Field::from_fn(&grid, |v| v[0]);
        let m1 = inner(&v1, &mu).unwrap();
        assert!(m1.abs() < 1e-13);
    }

    #[test]
    fn weight_identities() {
        let grid = VelocityGrid::standard(8).unwrap();
        let mu = maxwellian(&grid);
        // ell = 0 polynomial weight is the identity
        let w0 = apply_weight(&mu, &WeightSpec::polynomial(0.0)).unwrap();
        assert_eq!(w0.values(), mu.values());
        // at v = 0, <0>^2 = 1
        let w2 = apply_weight(&mu, &WeightSpec::polynomial(2.0)).unwrap();
        let center = grid.index(4, 4, 4);
        assert_eq!(w2.values()[center], mu.values()[center]);
        // tilde exponent vanishes when s = -gamma/2
        let wt = WeightSpec::Tilde {
            ell: 2.0,
            s: 0.5,
            gamma: -1.0,
        };
        let v = [1.0, 1.0, 1.0];
        assert_eq!(wt.eval(v), 1.0);
        // phi-weighted weight requires alpha > 3/2
        let bad = WeightSpec::PhiQuotient {
            ell: 1.0,
            alpha: 1.5,
            x: [0.0; 3],
        };
        assert!(apply_weight(&mu, &bad).is_err());
    }

    #[test]
    fn weights_are_multiplicative() {
        let spec1 = WeightSpec::polynomial(1.3);
        let spec2 = WeightSpec::polynomial(2.4);
        let spec3 = WeightSpec::polynomial(3.7);
        for v in [[0.0, 0.0, 0.0], [1.0, -2.0, 0.5], [3.0, 3.0, 3.0]] {
            let prod = spec1.eval(v) * spec2.eval(v);
            let direct = spec3.eval(v);
            assert!((prod - direct).abs() <= 1e-15 * direct);
        }
    }
}
