//! Frame generator near a Gaussian bump for the dyadic dilation.

use num_complex::Complex64;
use wavedense::boxcalc::Cuboid;
use wavedense::freqfn::{Dilation, FreqFn, GridFn};
use wavedense::frames::construct_frame_generator;
use wavedense::rational::{format, int};

fn main() -> wavedense::Result<()> {
    let eps: f64 = std::env::args().nth(1).map_or(Ok(0.1), |s| s.parse()).expect("epsilon");
    let dom = Cuboid::interval(int(-8), int(8))?;
    let g = FreqFn::Grid(GridFn::sample(dom, vec![4096], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))?);
    let f = g.scale(1.0 / g.l2_norm());

    let out = construct_frame_generator(&f, eps, &Dilation::scalar(int(2), 1)?)?;
    let p = &out.params;
    println!("annulus r = {}, R = {}, λ = {:.4e}", format(&p.r), format(&p.big_r), p.lambda);
    println!("‖f − ψ‖ = {:.6} < {eps}", out.report.distance);
    println!("gap ρ = {:.4e}, ρR = {:.4}", out.report.gap_used, out.report.beurling_product);
    println!("scale sums p = {}, P = {}", out.report.scale_sum.p, out.report.scale_sum.big_p);
    let e = &out.report.estimate;
    println!("empirical frame bounds [{:.4}, {:.4}] over {} tests", e.m_est, e.big_m_est, e.ratios.len());
    println!("{} of {} checks pass", out.report.checks.checks.iter().filter(|c| c.pass).count(), out.report.checks.checks.len());
    Ok(())
}
