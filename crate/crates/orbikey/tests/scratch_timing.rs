use num_complex::Complex64;
use orbikey::fuchsian::Gamma0;
use orbikey::greens::{GreensContext, Tier};
use std::time::Instant;

#[test]
fn survey_timing() {
    let group = Gamma0::new(11).unwrap();
    let t = Instant::now();
    let ctx = GreensContext::new(&group, Tier::Survey).unwrap();
    println!("survey context build: {:?}", t.elapsed());
    println!("survey u_window = {:.1}", Tier::Survey.u_window());
    println!("calibration residual = {:.3e}", ctx.calibration_residual());
    println!("rates = {:?}", ctx.discrete_rates());

    let z = Complex64::new(0.21, 0.8);
    let w = Complex64::new(-0.17, 1.12);
    let t = Instant::now();
    let sz = ctx.spectral_point(z);
    let sw = ctx.spectral_point(w);
    println!("two spectral points: {:?}", t.elapsed());
    let t = Instant::now();
    let n = 50;
    let mut acc = 0.0;
    for i in 0..n {
        let zz = Complex64::new(0.21 + 1e-6 * i as f64, 0.8);
        let g = ctx.green_with_spectra(zz, w, &sz, &sw).unwrap();
        acc += g.value;
    }
    println!("green_with_spectra: {:?}/pair  (avg {:.12})", t.elapsed() / n, acc / n as f64);
    let g = ctx.green_with_spectra(z, w, &sz, &sw).unwrap();
    println!("survey g = {:.12} +- {:.2e}  (standard was 5.041214580114)", g.value, g.error_estimate);

    let t = Instant::now();
    let gd = ctx.heat_integral_density(z).unwrap();
    println!("heat_integral_density: {:?}  G(z) = {:.8}", t.elapsed(), gd);

    let fast = GreensContext::new(&group, Tier::Fast).unwrap();
    let gf = fast.green_hyperbolic(z, w).unwrap();
    println!("fast g = {:.12} +- {:.2e}", gf.value, gf.error_estimate);
    let gdf = fast.heat_integral_density(z).unwrap();
    println!("fast G(z) = {:.8}  (survey diff {:.2e})", gdf, (gd - gdf).abs());
    let t = Instant::now();
    let _ = fast.green_hyperbolic(z, w).unwrap();
    println!("fast green_hyperbolic (full, with routes): {:?}", t.elapsed());
}
