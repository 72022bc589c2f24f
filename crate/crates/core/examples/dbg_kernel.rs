use kinlab_core::cross_section::*;
use kinlab_core::grid::*;
use kinlab_core::spectral::*;
use kinlab_core::weights::maxwellian;

fn main() {
    for (n, l, r) in [(16usize, 5.0f64, 2.0f64), (16, 5.1, 2.0), (16, 5.2, 1.9), (16, 5.3, 1.9)] {
        let grid = VelocityGrid::new(n, l, r).unwrap();
        let mu = maxwellian(&grid);
        print!("n={n:2} L={l} R={r}: ");
        for (g, s) in [(1.0, 0.5), (-1.0, 0.3), (-2.0, 0.7)] {
            let cs = CrossSection::new(g, s).unwrap();
            let k = SpectralKernel::build(&grid, &cs, KineticPart::Full, KernelResolution::default()).unwrap();
            let (q, _) = k.apply(&mu, &mu).unwrap();
            print!("({g},{s})={:.2e}  ", q.norm_l2());
        }
        println!();
    }
}
