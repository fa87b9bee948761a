//! Orthonormal affine system near a unit-norm Gaussian bump.

use num_complex::Complex64;
use wavedense::boxcalc::Cuboid;
use wavedense::freqfn::{FreqFn, GridFn};
use wavedense::orthosys::construct_ortho_generator;
use wavedense::rational::int;

fn main() -> wavedense::Result<()> {
    let dom = Cuboid::interval(int(-8), int(8))?;
    let g = FreqFn::Grid(GridFn::sample(dom, vec![4096], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))?);
    let f = g.scale(1.0 / g.l2_norm());

    let out = construct_ortho_generator(&f, 0.2)?;
    let r = &out.report;
    let s = &r.search;
    println!("lattice 2^{}ℤ: ‖h_b − 1‖ = {:.4e}, full support {}", s.k, s.distance, s.full_support);
    println!("dilation {:?}", out.dilation.scalar_value().map(wavedense::rational::format));
    println!("annulus {:.4e} + grammian {:.4e} + normalization {:.4e} -> total {:.4e}",
        r.annulus_distance, r.grammian_distance, r.normalization_distance, r.total_distance);
    println!("translate Gram deviation {:.3e}", r.translate_gram_deviation);
    let worst = r.dilation_overlaps.iter().map(|o| o.2).fold(0.0, f64::max);
    println!("largest cross-scale overlap {worst:e}");
    Ok(())
}
