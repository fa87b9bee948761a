//! Why neither the lattice nor the dilation can be fixed in advance.

use num_complex::Complex64;
use wavedense::boxcalc::{BoxSet, Cuboid};
use wavedense::freqfn::{Dilation, FreqFn, StepFn};
use wavedense::orthosys::{nondensity_fixed_dilation_demo, nondensity_fixed_lattice_demo};
use wavedense::rational::{frac, int};

fn indicator(lo: wavedense::Rat, hi: wavedense::Rat, v: f64) -> wavedense::Result<FreqFn> {
    let set = BoxSet::from_box(Cuboid::interval(lo, hi)?);
    Ok(FreqFn::Step(StepFn::indicator(&set, Complex64::new(v, 0.0))))
}

fn main() -> wavedense::Result<()> {
    let f = indicator(int(1), int(3), 0.5f64.sqrt())?;
    let v = nondensity_fixed_dilation_demo(&f, &Dilation::scalar(int(2), 1)?)?;
    println!("a = 2: |<f, D_a f>| = {v:.12} (1/(2√2) = {:.12})", 1.0 / 8f64.sqrt());

    let g = indicator(int(0), frac(1, 2), 2f64.sqrt())?;
    let w = nondensity_fixed_lattice_demo(&g, &[int(1)])?;
    println!("b = 1: ‖g_b − 1‖ = {w:.12} (√(2−√2) = {:.12})", (2.0 - 2f64.sqrt()).sqrt());
    Ok(())
}
