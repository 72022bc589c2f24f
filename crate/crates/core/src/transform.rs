//! Discrete Fourier transforms normalized as continuum approximations.
//!
//! `dft` approximates `f_hat(xi) = integral exp(-i v.xi) f(v) dv` by the
//! lattice rule: `F(xi_m) = h^3 * sum_k exp(-i v_k . xi_m) f(v_k)`. With
//! nodes `v_k = -L + k h` and `xi_m = pi m / L` this is the bin-wise FFT
//! times `h^3 * (-1)^(m1+m2+m3)`. `idft` inverts it exactly, so
//! `idft(dft(f)) = f` to rounding, and Parseval holds exactly between
//! `inner` and `inner_dual`.

use crate::grid::{ComplexField, Field, VelocityGrid};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLAN_CACHE: Lazy<Mutex<HashMap<usize, Arc<Plans>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plans_for(n: usize) -> Arc<Plans> {
    let mut cache = PLAN_CACHE.lock().unwrap();
    Arc::clone(cache.entry(n).or_insert_with(|| {
        let mut planner = FftPlanner::new();
        Arc::new(Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }))
}

/// In-place 3-D FFT along each axis of a row-major cube of side `n`.
fn fft3_in_place(values: &mut [Complex64], n: usize, forward: bool) {
    let plans = plans_for(n);
    let fft = if forward {
        &plans.forward
    } else {
        &plans.inverse
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::default(); n];

    // axis 2 (contiguous)
    for chunk in values.chunks_mut(n) {
        fft.process_with_scratch(chunk, &mut scratch);
    }
    // axis 1
    for i1 in 0..n {
        for i3 in 0..n {
            for i2 in 0..n {
                line[i2] = values[(i1 * n + i2) * n + i3];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i2 in 0..n {
                values[(i1 * n + i2) * n + i3] = line[i2];
            }
        }
    }
    // axis 0
    for i2 in 0..n {
        for i3 in 0..n {
            for i1 in 0..n {
                line[i1] = values[(i1 * n + i2) * n + i3];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i1 in 0..n {
                values[(i1 * n + i2) * n + i3] = line[i1];
            }
        }
    }
}

/// Sign flip `(-1)^(m1+m2+m3)` accounting for the node offset `-L`.
fn apply_checkerboard(values: &mut [Complex64], n: usize) {
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                if (i1 + i2 + i3) % 2 == 1 {
                    values[(i1 * n + i2) * n + i3] = -values[(i1 * n + i2) * n + i3];
                }
            }
        }
    }
}

/// Forward transform of a complex field.
pub fn dft_complex(f: &ComplexField) -> ComplexField {
    let grid = Arc::clone(f.grid());
    let n = grid.n();
    let mut values = f.values().to_vec();
    fft3_in_place(&mut values, n, true);
    apply_checkerboard(&mut values, n);
    let h3 = grid.cell_volume();
    for v in &mut values {
        *v *= h3;
    }
    ComplexField::from_values(&grid, values).expect("size preserved")
}

/// Forward transform of a real field.
pub fn dft(f: &Field) -> ComplexField {
    dft_complex(&f.to_complex())
}

/// Inverse transform; `idft(dft(f)) = f` to rounding.
pub fn idft(f: &ComplexField) -> ComplexField {
    let grid = Arc::clone(f.grid());
    let n = grid.n();
    let mut values = f.values().to_vec();
    apply_checkerboard(&mut values, n);
    fft3_in_place(&mut values, n, false);
    // inverse lattice rule carries (2L)^-3 = 1 / (h^3 n^3)
    let w = grid.dual_cell_weight();
    for v in &mut values {
        *v *= w;
    }
    ComplexField::from_values(&grid, values).expect("size preserved")
}

/// Inverse transform of a spectrum known to come from a real field.
pub fn idft_real_lossy(f: &ComplexField) -> (Field, f64) {
    idft(f).into_real_lossy()
}

/// Applies a dual-lattice multiplier `m(xi)` as `idft(m * dft(f))`.
pub fn apply_multiplier(f: &Field, m: impl Fn([f64; 3]) -> f64) -> (Field, f64) {
    let grid = f.grid();
    let mut spec = dft(f);
    for idx in 0..grid.len() {
        let xi = grid.dual_node(idx);
        spec.values_mut()[idx] *= m(xi);
    }
    idft_real_lossy(&spec)
}

pub fn apply_multiplier_complex(f: &ComplexField, m: impl Fn([f64; 3]) -> f64) -> ComplexField {
    let grid = f.grid();
    let mut spec = dft_complex(f);
    for idx in 0..grid.len() {
        let xi = grid.dual_node(idx);
        spec.values_mut()[idx] *= m(xi);
    }
    idft(&spec)
}

/// Convenience: grid reference for multiplier closures.
pub fn grid_of(f: &Field) -> &Arc<VelocityGrid> {
    f.grid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner, inner_dual};
    use crate::weights::maxwellian;

    #[test]
    fn roundtrip_is_identity() {
        let grid = VelocityGrid::standard(16).unwrap();
        let f = Field::from_fn(&grid, |v| (-0.3 * (v[0] * v[0] + 2.0 * v[1] * v[1])).exp());
        let (back, residue) = idft_real_lossy(&dft(&f));
        assert!(residue < 1e-12);
        let mut max_rel = 0.0f64;
        for (a, b) in f.values().iter().zip(back.values()) {
            max_rel = max_rel.max((a - b).abs());
        }
        assert!(max_rel / f.norm_inf() < 1e-12, "roundtrip error {max_rel}");
    }

    #[test]
    fn maxwellian_transform_is_gaussian() {
        // dft(mu) ~ exp(-|xi|^2/2) inside the resolved band (n = 32, L = 8)
        let grid = VelocityGrid::standard(32).unwrap();
        let mu = maxwellian(&grid);
        let spec = dft(&mu);
        assert!((spec.values()[0].re - 1.0).abs() < 1e-12, "mass at xi=0");
        // resolved band: far enough from the lattice Nyquist edge that the
        // nearest alias of the Gaussian is < 1e-8 relative
        let mut max_rel = 0.0f64;
        for idx in 0..grid.len() {
            let xi = grid.dual_node(idx);
            let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if r2.sqrt() <= 4.5 {
                let expected = (-r2 / 2.0).exp();
                let got = spec.values()[idx].re;
                max_rel = max_rel.max((got - expected).abs() / expected);
            }
        }
        assert!(max_rel < 1e-8, "gaussian transform error {max_rel}");
    }

    #[test]
    fn lattice_harmonic_is_single_spike() {
        let grid = VelocityGrid::standard(8).unwrap();
        let xi = grid.dual_node(grid.index(0, 2, 5));
        let f = Field::from_fn(&grid, |v| (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]).cos());
        let spec = dft(&f);
        let volume = 8.0f64.powi(3) * grid.cell_volume();
        // cosine splits between +xi and -xi bins
        let target = grid.index(0, 2, 5);
        let mirror = grid.index(0, 8 - 2, 8 - 5);
        for idx in 0..grid.len() {
            let mag = spec.values()[idx].norm();
            if idx == target || idx == mirror {
                assert!((mag - volume / 2.0).abs() < 1e-9);
            } else {
                assert!(mag < 1e-9, "leakage {mag} at {idx}");
            }
        }
    }

    #[test]
    fn parseval_exact() {
        let grid = VelocityGrid::standard(12).unwrap();
        let f = Field::from_fn(&grid, |v| (-0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).exp());
        let g = Field::from_fn(&grid, |v| v[0] * (-0.4 * (v[0] * v[0] + v[1] * v[1])).exp());
        let lhs = inner(&f, &g).unwrap();
        let rhs = inner_dual(&dft(&f), &dft(&g)).unwrap();
        assert!((lhs - rhs.re).abs() <= 1e-10 * lhs.abs().max(1.0));
        assert!(rhs.im.abs() <= 1e-12 * lhs.abs().max(1.0));
    }
}
