//! One-dimensional quadrature building blocks: Gauss-Legendre cells,
//! geometrically graded composite rules, and Gauss-Jacobi rules for the
//! power weight `x^beta` that the grazing-collision integrals need.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss-Legendre nodes/weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    match order {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        _ => golub_welsch_legendre(order),
    }
}

fn golub_welsch_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    // Legendre recurrence: beta_k = k^2 / (4k^2 - 1)
    let mut mat = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let kk = k as f64;
        let b = (kk * kk / (4.0 * kk * kk - 1.0)).sqrt();
        mat[(k - 1, k)] = b;
        mat[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(mat);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            (eig.eigenvalues[i], w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )
}

/// Integrates `f` over `[a, b]` with an `order`-point Gauss-Legendre rule.
pub fn integrate_gl(a: f64, b: f64, order: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule on a geometrically graded mesh accumulating at `a = 0`
/// from above: cells `[b q^{k+1}, b q^k]` for `k = 0..cells`.
pub fn integrate_graded(
    b: f64,
    cells: usize,
    ratio: f64,
    order: usize,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..cells {
        let lo = hi * ratio;
        total += integrate_gl(lo, hi, order, &mut f);
        hi = lo;
    }
    total
}

/// Gauss-Jacobi rule for `int_0^upper x^beta f(x) dx`, `beta > -1`.
///
/// Built by Golub-Welsch from the monic Jacobi recurrence for the weight
/// `(1+x)^beta` on [-1, 1], then mapped to `[0, upper]`. Exact for
/// polynomial `f` up to degree `2 order - 1`.
pub struct GaussJacobi {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussJacobi {
    pub fn new(order: usize, beta: f64, upper: f64) -> Self {
        assert!(beta > -1.0, "Jacobi weight needs beta > -1");
        assert!(order >= 1);
        // Monic Jacobi (a = 0, b = beta) on [-1, 1]:
        //   alpha_k = (b^2 - a^2) / ((2k + a + b)(2k + a + b + 2))
        //   beta_k  = 4k(k+a)(k+b)(k+a+b) / ((2k+a+b)^2 (2k+a+b+1)(2k+a+b-1))
        //   beta_0  = 2^{a+b+1} B(a+1, b+1)
        let bj = beta;
        let mut alpha = vec![0.0f64; order];
        let mut betas = vec![0.0f64; order];
        for k in 0..order {
            let kk = k as f64;
            let denom = (2.0 * kk + bj) * (2.0 * kk + bj + 2.0);
            alpha[k] = if denom != 0.0 { bj * bj / denom } else { 0.0 };
            if k > 0 {
                let s = 2.0 * kk + bj;
                betas[k] =
                    4.0 * kk * kk * (kk + bj) * (kk + bj) / (s * s * (s + 1.0) * (s - 1.0));
            }
        }
        // total mass of (1+x)^beta on [-1,1]
        let mass = 2f64.powf(bj + 1.0) / (bj + 1.0);

        let mut mat = DMatrix::<f64>::zeros(order, order);
        for k in 0..order {
            mat[(k, k)] = alpha[k];
            if k > 0 {
                let off = betas[k].sqrt();
                mat[(k - 1, k)] = off;
                mat[(k, k - 1)] = off;
            }
        }
        let eig = SymmetricEigen::new(mat);
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|i| {
                let w = mass * eig.eigenvectors[(0, i)].powi(2);
                (eig.eigenvalues[i], w)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        // map x in [-1,1] with weight (1+x)^beta to t in [0,upper] with t^beta:
        // t = upper (1+x)/2, dt = upper/2 dx, t^beta = (upper/2)^beta (1+x)^beta
        let scale = upper / 2.0;
        let wscale = scale.powf(bj) * scale;
        let nodes = pairs.iter().map(|p| scale * (1.0 + p.0)).collect();
        let weights = pairs.iter().map(|p| wscale * p.1).collect();
        Self { nodes, weights }
    }

    /// Integrates `x^beta f(x)` over `[0, upper]`; `f` must be smooth.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exactness() {
        // 4-point rule is exact through degree 7
        let val = integrate_gl(0.0, 1.0, 4, |x| x.powi(7));
        assert!((val - 1.0 / 8.0).abs() < 1e-14);
        let val = integrate_gl(-2.0, 3.0, 16, |x| (x).exp());
        assert!((val - (3f64.exp() - (-2f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn graded_handles_integrable_singularity() {
        // int_0^1 x^{-1/2} dx = 2 (GL4 on a self-similar singular integrand
        // leaves a small fixed relative error per cell)
        let val = integrate_graded(1.0, 60, 0.5, 4, |x| x.powf(-0.5));
        assert!((val - 2.0).abs() < 2e-6, "got {val}");
    }

    #[test]
    fn gauss_jacobi_moments_exact() {
        // weight x^beta on [0, pi/2]: int x^{beta + j} = u^{beta+j+1}/(beta+j+1)
        let upper = std::f64::consts::FRAC_PI_2;
        for &s in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let beta = 1.0 - 2.0 * s;
            let rule = GaussJacobi::new(24, beta, upper);
            for j in 0..10 {
                let exact = upper.powf(beta + j as f64 + 1.0) / (beta + j as f64 + 1.0);
                let got = rule.integrate(|x| x.powi(j));
                assert!(
                    (got - exact).abs() < 1e-12 * exact.abs(),
                    "s={s} j={j}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_jacobi_smooth_integrand() {
        // int_0^{pi/2} x^{-0.4} cos(3x) dx against a dense graded reference
        let upper = std::f64::consts::FRAC_PI_2;
        let rule = GaussJacobi::new(24, -0.4, upper);
        let got = rule.integrate(|x| (3.0 * x).cos());
        let reference = integrate_graded(upper, 400, 0.9, 4, |x| x.powf(-0.4) * (3.0 * x).cos());
        assert!((got - reference).abs() < 1e-10, "{got} vs {reference}");
    }
}
