//! Riesz generator supported on a wavelet set.

use num_complex::Complex64;
use wavedense::boxcalc::Cuboid;
use wavedense::freqfn::{l2_distance, FreqFn, GridFn};
use wavedense::rational::{format, int};
use wavedense::waveletset::{construct_riesz_generator, riesz_bound_estimate, default_riesz_index};

fn main() -> wavedense::Result<()> {
    let dom = Cuboid::interval(int(-8), int(8))?;
    let g = FreqFn::Grid(GridFn::sample(dom, vec![4096], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))?);
    let f = g.scale(1.0 / g.l2_norm());

    let out = construct_riesz_generator(&f, 0.5)?;
    let psi = FreqFn::Step(out.psi.clone());
    println!("r = {}, R = {}, depth {}", format(&out.params.r), format(&out.params.big_r), out.params.depth);
    println!("U has {} boxes of total measure {}", out.bundle.u.boxes().len(), format(&out.bundle.u.measure()));
    println!("‖f − ψ‖ = {:.6}", l2_distance(&f, &psi)?);
    let (lo, hi) = riesz_bound_estimate(&psi, &out.translations, &default_riesz_index(1))?;
    println!("finite-section Riesz bounds [{lo:.4e}, {hi:.4e}], λ² = {:.4e}", out.params.lambda.powi(2));
    let cap = 0.5f64.powi(2) / 16.0;
    for (name, v) in out.report.quantities.iter().filter(|(k, _)| k.starts_with("budget.")) {
        println!("  {name}: {v} (cap {cap})");
    }
    println!("all checks pass: {}", out.report.all_pass());
    Ok(())
}
