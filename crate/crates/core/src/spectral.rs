//! Fourier-side evaluation of the collision operator.
//!
//! The weak form on the dual lattice reads
//!
//! ```text
//! (Q(f,g), h) = (2L)^-3 sum_{m, m*} W(xi_m, xi_m*) fhat[m*] ghat[m - m*] conj(hhat[m])
//! ```
//!
//! where the angular kernel
//! `W(xi, xi*) = int_{S^2} b(xi/|xi| . sigma) [Phi_hat(xi* - xi^-) - Phi_hat(xi*)] dsigma`
//! with `xi^- = (xi - |xi| sigma)/2` is integrated by a Gauss-Jacobi rule in
//! the polar angle against an exact uniform azimuthal ring. The ring average
//! cancels the O(theta) term of the integrand identically, so the reduced
//! integrand is O(theta^2) and the `theta^{1-2s}` Jacobi weight captures the
//! grazing singularity for every `s` in (0,1).
//!
//! `W` only depends on the integer triple `(|m|^2, m.m*, |m*|^2)`, so the
//! kernel is built once per distinct triple (a bitmap-rank dictionary over
//! the packed key space) and the per-pair sum is two table lookups. The sum
//! over `m*` is restricted to differences inside the frequency band, which
//! is the Galerkin truncation of the bilinear term; with fields supported in
//! `|v| <= R <= L/2` and the smooth kinetic part truncated at `2R` the
//! lattice sum is alias-free.

use crate::cross_section::{
    fourier_phi_c, fourier_phi_cbar_windowed, grazing_theta_rule, CrossSection, KineticWindow,
    RadialTable,
};
use crate::error::{KinlabError, Result};
use crate::grid::{ComplexField, Field, VelocityGrid};
use crate::quadrature::GaussJacobi;
use crate::transform::{dft, dft_complex, idft, idft_real_lossy};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

/// Which kinetic factor the kernel carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KineticPart {
    /// Singular mollified part `Phi_c = |z|^gamma phi(z)`.
    Singular,
    /// Smooth remainder `Phi_cbar`, truncated at `|z| = 2R`.
    Smooth,
    /// Sum of both parts (the full operator).
    Full,
}

/// Quadrature resolution of the kernel build.
#[derive(Debug, Clone, Copy)]
pub struct KernelResolution {
    pub n_theta: usize,
    pub m_phi: usize,
    pub radial_points: usize,
}

impl Default for KernelResolution {
    fn default() -> Self {
        Self {
            n_theta: 24,
            m_phi: 8,
            radial_points: 12001,
        }
    }
}

/// Bitmap-backed rank dictionary over the packed `(a, b, c)` key space.
struct RankDict {
    words: Vec<u64>,
    ranks: Vec<u32>,
    a_max: u64,
}

impl RankDict {
    fn key(&self, a: i64, b: i64, c: i64) -> u64 {
        let am = self.a_max as i64;
        ((a * (2 * am + 1) + (b + am)) as u64) * (self.a_max + 1) + c as u64
    }

    fn decode(&self, key: u64) -> (i64, i64, i64) {
        let am = self.a_max as i64;
        let c = (key % (self.a_max + 1)) as i64;
        let rest = key / (self.a_max + 1);
        let b = (rest % (2 * self.a_max + 1)) as i64 - am;
        let a = (rest / (2 * self.a_max + 1)) as i64;
        (a, b, c)
    }

    #[inline]
    fn rank(&self, key: u64) -> usize {
        let word = (key >> 6) as usize;
        let bit = key & 63;
        self.ranks[word] as usize
            + (self.words[word] & ((1u64 << bit) - 1)).count_ones() as usize
    }
}

/// Materialized spectral collision kernel for one grid + cross-section.
pub struct SpectralKernel {
    grid: Arc<VelocityGrid>,
    dict: RankDict,
    values: Vec<f64>,
}

// Symmetric Galerkin band: signed indices in [-(n/2-1), n/2-1]. The unpaired
// Nyquist plane of the even FFT grid is excluded from the bilinear sum (it
// has no mirror partner, and keeping it breaks the Hermitian symmetry that
// makes Q(real, real) real and the conservation cancellations exact).
fn signed_range(n: i64, m: i64) -> (i64, i64) {
    let nb = n / 2 - 1;
    let lo = (-nb).max(m - nb);
    let hi = nb.min(m + nb);
    (lo, hi)
}

fn for_each_pair(n: i64, mut body: impl FnMut([i64; 3], [i64; 3])) {
    let nb = n / 2 - 1;
    for m1 in -nb..=nb {
        let (lo1, hi1) = signed_range(n, m1);
        for m2 in -nb..=nb {
            let (lo2, hi2) = signed_range(n, m2);
            for m3 in -nb..=nb {
                let (lo3, hi3) = signed_range(n, m3);
                for s1 in lo1..=hi1 {
                    for s2 in lo2..=hi2 {
                        for s3 in lo3..=hi3 {
                            body([m1, m2, m3], [s1, s2, s3]);
                        }
                    }
                }
            }
        }
    }
}

/// One kernel entry from the reduced coordinates `r = |xi|`,
/// `p = xi* . xi/|xi|`, `q = |xi*_perp|`.
///
/// `bandwidth` is the largest radius in the support of the kinetic factor
/// behind `table`: the table then carries rho-oscillations up to that
/// frequency, and both the ring resolution and the polar rule order are
/// chosen from the resulting phase amplitudes (Bessel-harmonic content
/// `~ bandwidth * ring modulation`, polar phase `~ bandwidth * |xi^-|`).
fn kernel_entry(
    r: f64,
    p: f64,
    q: f64,
    table: &RadialTable,
    rules: &ThetaRules,
    base_m_phi: usize,
    bandwidth: f64,
    c_b: f64,
) -> f64 {
    let phi_star = table.eval((p * p + q * q).sqrt());
    let modulation = q.min(0.5 * r); // max ring amplitude of |xi* - xi^-|
    let m_phi = {
        let need = 1.3 * bandwidth * modulation + 8.0;
        let m = (need.ceil() as usize).max(base_m_phi);
        (m + 1) & !1 // round up to even
    };
    let n_theta = {
        let phase = bandwidth * r / std::f64::consts::SQRT_2;
        (16 + (0.75 * phase) as usize).min(rules.max_order())
    };
    let rule = rules.order(n_theta);

    let half = m_phi / 2;
    let inv_m = 1.0 / m_phi as f64;
    let mut total = 0.0;
    for (&theta, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sin_t = theta.sin();
        let sin_half = (theta / 2.0).sin();
        let a = r * sin_half * sin_half; // (r/2)(1 - cos theta)
        let cc = 0.5 * r * sin_t;
        let base = (p - a) * (p - a) + q * q + cc * cc;
        let bphi = 2.0 * q * cc;
        // uniform even ring, folded by cos symmetry
        let mut ring = table.eval((base + bphi).max(0.0).sqrt())
            + table.eval((base - bphi).max(0.0).sqrt());
        for j in 1..half {
            let cphi = (2.0 * std::f64::consts::PI * j as f64 * inv_m).cos();
            ring += 2.0 * table.eval((base + bphi * cphi).max(0.0).sqrt());
        }
        let bracket = ring * inv_m - phi_star;
        // rule integrates theta^{1-2s} F; F = b sin(theta) bracket / theta^{1-2s}
        total += w * (sin_t / (theta * theta * theta)) * bracket;
    }
    2.0 * std::f64::consts::PI * c_b * total
}

/// Pre-built Gauss-Jacobi rules for a ladder of polar orders.
struct ThetaRules {
    rules: Vec<GaussJacobi>,
    orders: Vec<usize>,
}

impl ThetaRules {
    fn build(cs: &CrossSection, base: usize) -> Self {
        let orders: Vec<usize> = [base, base + 8, base + 16, base + 24, base + 40]
            .iter()
            .copied()
            .collect();
        let rules = orders
            .iter()
            .map(|&o| grazing_theta_rule(cs, o))
            .collect();
        Self { rules, orders }
    }

    fn max_order(&self) -> usize {
        *self.orders.last().unwrap()
    }

    fn order(&self, want: usize) -> &GaussJacobi {
        let idx = self
            .orders
            .iter()
            .position(|&o| o >= want)
            .unwrap_or(self.orders.len() - 1);
        &self.rules[idx]
    }
}

fn cache_dir() -> PathBuf {
    std::env::var_os("KINLAB_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("kinlab-kernels"))
}

fn fnv64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl SpectralKernel {
    /// Builds (or loads from the on-disk cache) the kernel for one kinetic
    /// part on one grid.
    pub fn build(
        grid: &Arc<VelocityGrid>,
        cs: &CrossSection,
        part: KineticPart,
        res: KernelResolution,
    ) -> Result<Arc<Self>> {
        cs.validate()?;
        let tag = format!(
            "v6;n={};L={:x};R={:x};g={:x};s={:x};cb={:x};r1={:x};r2={:x};part={:?};nt={};mp={};rp={}",
            grid.n(),
            grid.box_half_width().to_bits(),
            grid.support_radius().to_bits(),
            cs.gamma.to_bits(),
            cs.s.to_bits(),
            cs.c_b.to_bits(),
            cs.r1.to_bits(),
            cs.r2.to_bits(),
            part,
            res.n_theta,
            res.m_phi,
            res.radial_points,
        );

        let n = grid.n() as i64;
        let half = n / 2;
        let a_max = (3 * half * half) as u64;
        let key_space = (a_max + 1) * (2 * a_max + 1) * (a_max + 1);
        let n_words = (key_space as usize + 63) / 64;

        let mut words = vec![0u64; n_words];
        {
            let dict_probe = RankDict {
                words: Vec::new(),
                ranks: Vec::new(),
                a_max,
            };
            for_each_pair(n, |m, s| {
                let a = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
                let b = m[0] * s[0] + m[1] * s[1] + m[2] * s[2];
                let c = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
                let key = dict_probe.key(a, b, c);
                words[(key >> 6) as usize] |= 1u64 << (key & 63);
            });
        }
        let mut ranks = vec![0u32; n_words];
        let mut running: u32 = 0;
        for (i, w) in words.iter().enumerate() {
            ranks[i] = running;
            running += w.count_ones();
        }
        let unique = running as usize;
        let dict = RankDict {
            words,
            ranks,
            a_max,
        };

        let values = match Self::load_cached(&tag, unique) {
            Some(v) => v,
            None => {
                let v = Self::compute_values(grid, cs, part, res, &dict, unique)?;
                Self::store_cached(&tag, &v);
                v
            }
        };

        Ok(Arc::new(Self {
            grid: Arc::clone(grid),
            dict,
            values,
        }))
    }

    fn compute_values(
        grid: &Arc<VelocityGrid>,
        cs: &CrossSection,
        part: KineticPart,
        res: KernelResolution,
        dict: &RankDict,
        unique: usize,
    ) -> Result<Vec<f64>> {
        let kappa = std::f64::consts::PI / grid.box_half_width();
        let rho_max = 2.0 * grid.dual_radius() + 2.0;
        let z_cut = 2.0 * grid.support_radius();
        let singular = match part {
            KineticPart::Singular | KineticPart::Full => {
                Some(fourier_phi_c(cs, rho_max, res.radial_points)?)
            }
            KineticPart::Smooth => None,
        };
        let window = KineticWindow::for_support_radius(grid.support_radius());
        let smooth = match part {
            KineticPart::Smooth | KineticPart::Full => Some(fourier_phi_cbar_windowed(
                cs,
                &window,
                rho_max,
                res.radial_points,
            )?),
            KineticPart::Singular => None,
        };
        let rules = ThetaRules::build(cs, res.n_theta);

        // enumerate realized keys in rank order
        let mut keys = Vec::with_capacity(unique);
        for (wi, &w) in dict.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                keys.push((wi as u64) << 6 | b);
                bits &= bits - 1;
            }
        }

        let values: Vec<f64> = keys
            .par_iter()
            .map(|&key| {
                let (a, b, c) = dict.decode(key);
                if a == 0 {
                    return 0.0;
                }
                let r = kappa * (a as f64).sqrt();
                let p = kappa * b as f64 / (a as f64).sqrt();
                let q2 = c as f64 - (b as f64) * (b as f64) / a as f64;
                let q = kappa * q2.max(0.0).sqrt();
                let mut w = 0.0;
                if let Some(t) = &singular {
                    w += kernel_entry(r, p, q, t, &rules, res.m_phi, cs.r2, cs.c_b);
                }
                if let Some(t) = &smooth {
                    w += kernel_entry(r, p, q, t, &rules, res.m_phi, z_cut, cs.c_b);
                }
                w
            })
            .collect();
        Ok(values)
    }

    fn load_cached(tag: &str, expected: usize) -> Option<Vec<f64>> {
        let path = cache_dir().join(format!("kernel-{:016x}.bin", fnv64(tag)));
        let mut file = std::fs::File::open(path).ok()?;
        let mut head = [0u8; 8];
        file.read_exact(&mut head).ok()?;
        let count = u64::from_le_bytes(head) as usize;
        if count != expected {
            return None;
        }
        let mut buf = vec![0u8; count * 8];
        file.read_exact(&mut buf).ok()?;
        Some(
            buf.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        )
    }

    fn store_cached(tag: &str, values: &[f64]) {
        let dir = cache_dir();
        if std::fs::create_dir_all(&dir).is_err() {
            return;
        }
        let path = dir.join(format!("kernel-{:016x}.bin", fnv64(tag)));
        let tmp = path.with_extension("tmp");
        let write = || -> std::io::Result<()> {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(&(values.len() as u64).to_le_bytes())?;
            for v in values {
                f.write_all(&v.to_le_bytes())?;
            }
            f.sync_all()?;
            std::fs::rename(&tmp, &path)?;
            Ok(())
        };
        let _ = write();
    }

    pub fn grid(&self) -> &Arc<VelocityGrid> {
        &self.grid
    }

    /// Applies the bilinear kernel on already-transformed inputs.
    pub fn apply_hat(&self, f_hat: &ComplexField, g_hat: &ComplexField) -> Result<ComplexField> {
        if !f_hat.grid().same_as(&self.grid) || !g_hat.grid().same_as(&self.grid) {
            return Err(KinlabError::GridMismatch("spectral apply".into()));
        }
        let n = self.grid.n() as i64;
        let half = n / 2;
        let nn = self.grid.n();
        let fh = f_hat.values();
        let gh = g_hat.values();
        let dict = &self.dict;
        let values = &self.values;

        let bin = |m: i64| -> usize {
            if m < 0 {
                (m + n) as usize
            } else {
                m as usize
            }
        };

        let nb = half - 1;
        let rows: Vec<Vec<Complex64>> = (0..nn)
            .into_par_iter()
            .map(|b1| {
                let m1 = if b1 < nn / 2 {
                    b1 as i64
                } else {
                    b1 as i64 - n
                };
                let mut row = vec![Complex64::default(); nn * nn];
                if m1.abs() > nb {
                    return row; // outside the symmetric band
                }
                let (lo1, hi1) = signed_range(n, m1);
                for b2 in 0..nn {
                    let m2 = if b2 < nn / 2 {
                        b2 as i64
                    } else {
                        b2 as i64 - n
                    };
                    if m2.abs() > nb {
                        continue;
                    }
                    let (lo2, hi2) = signed_range(n, m2);
                    for b3 in 0..nn {
                        let m3 = if b3 < nn / 2 {
                            b3 as i64
                        } else {
                            b3 as i64 - n
                        };
                        if m3.abs() > nb {
                            continue;
                        }
                        let (lo3, hi3) = signed_range(n, m3);
                        let a = m1 * m1 + m2 * m2 + m3 * m3;
                        if a == 0 {
                            continue; // mass row: kernel vanishes identically
                        }
                        let mut acc = Complex64::default();
                        for s1 in lo1..=hi1 {
                            let i1 = bin(s1) * nn;
                            let d1 = bin(m1 - s1) * nn;
                            let bs1 = m1 * s1;
                            let cs1 = s1 * s1;
                            for s2 in lo2..=hi2 {
                                let i2 = (i1 + bin(s2)) * nn;
                                let d2 = (d1 + bin(m2 - s2)) * nn;
                                let bs2 = bs1 + m2 * s2;
                                let cs2 = cs1 + s2 * s2;
                                for s3 in lo3..=hi3 {
                                    let fidx = i2 + bin(s3);
                                    let gidx = d2 + bin(m3 - s3);
                                    let b = bs2 + m3 * s3;
                                    let c = cs2 + s3 * s3;
                                    let w = values[dict.rank(dict.key(a, b, c))];
                                    acc += w * (fh[fidx] * gh[gidx]);
                                }
                            }
                        }
                        row[b2 * nn + b3] = acc;
                    }
                }
                row
            })
            .collect();

        let scale = self.grid.dual_cell_weight();
        let mut out = Vec::with_capacity(nn * nn * nn);
        for row in rows {
            out.extend(row.into_iter().map(|v| v * scale));
        }
        ComplexField::from_values(&self.grid, out)
    }

    /// `Q(f, g)` for real fields; returns the field and the imaginary residue
    /// (relative to the max) that was dropped.
    pub fn apply(&self, f: &Field, g: &Field) -> Result<(Field, f64)> {
        let q_hat = self.apply_hat(&dft(f), &dft(g))?;
        Ok(idft_real_lossy(&q_hat))
    }

    /// `Q(f, g)` for complex fields (per-mode amplitudes).
    pub fn apply_complex(&self, f: &ComplexField, g: &ComplexField) -> Result<ComplexField> {
        let q_hat = self.apply_hat(&dft_complex(f), &dft_complex(g))?;
        Ok(idft(&q_hat))
    }

    /// Weak form `(Q(f,g), h)` without leaving the dual lattice.
    pub fn weak_form(&self, f: &Field, g: &Field, h: &Field) -> Result<f64> {
        let q_hat = self.apply_hat(&dft(f), &dft(g))?;
        let h_hat = dft(h);
        Ok(crate::grid::inner_dual(&h_hat, &q_hat)?.re)
    }
}

type KernelCacheKey = (usize, u64, u64, u64, u64, u64, u64, u64, KineticPart, usize, usize);

static KERNEL_CACHE: Lazy<Mutex<HashMap<KernelCacheKey, Arc<SpectralKernel>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Process-wide memoized kernel lookup.
pub fn cached_kernel(
    grid: &Arc<VelocityGrid>,
    cs: &CrossSection,
    part: KineticPart,
    res: KernelResolution,
) -> Result<Arc<SpectralKernel>> {
    let key: KernelCacheKey = (
        grid.n(),
        grid.box_half_width().to_bits(),
        grid.support_radius().to_bits(),
        cs.gamma.to_bits(),
        cs.s.to_bits(),
        cs.c_b.to_bits(),
        cs.r1.to_bits(),
        cs.r2.to_bits(),
        part,
        res.n_theta,
        res.m_phi,
    );
    {
        let cache = KERNEL_CACHE.lock().unwrap();
        if let Some(k) = cache.get(&key) {
            return Ok(Arc::clone(k));
        }
    }
    let built = SpectralKernel::build(grid, cs, part, res)?;
    KERNEL_CACHE
        .lock()
        .unwrap()
        .insert(key, Arc::clone(&built));
    Ok(built)
}
