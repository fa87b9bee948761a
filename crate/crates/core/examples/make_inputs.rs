//! Writes the sample target functions used by the command-line walkthrough.
//!
//! ```text
//! cargo run --example make_inputs -- inputs/
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use wavedense::boxcalc::{BoxSet, Cuboid};
use wavedense::cli::write_json;
use wavedense::freqfn::{FreqFn, GridFn, StepFn};
use wavedense::rational::{frac, int};

fn main() -> wavedense::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "inputs".into()));
    std::fs::create_dir_all(&dir)?;

    let dom = Cuboid::interval(int(-8), int(8))?;
    let g = GridFn::sample(dom, vec![4096], |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0))?;
    let g = FreqFn::Grid(g);
    let gaussian = g.scale(1.0 / g.l2_norm());
    write_json(&dir.join("gaussian.json"), &gaussian)?;

    let one = Complex64::new(1.0, 0.0);
    let bx = BoxSet::from_box(Cuboid::interval(int(0), frac(13, 10))?);
    write_json(&dir.join("box.json"), &FreqFn::Step(StepFn::indicator(&bx, one)))?;

    let sq = BoxSet::from_box(Cuboid::cube(int(0), frac(13, 10), 2)?);
    write_json(&dir.join("square.json"), &FreqFn::Step(StepFn::indicator(&sq, one)))?;

    let band = BoxSet::from_box(Cuboid::interval(int(1), int(3))?);
    let band = StepFn::indicator(&band, Complex64::new(0.5f64.sqrt(), 0.0));
    write_json(&dir.join("band.json"), &FreqFn::Step(band))?;

    let low = BoxSet::from_box(Cuboid::interval(int(0), frac(1, 2))?);
    let low = StepFn::indicator(&low, Complex64::new(2f64.sqrt(), 0.0));
    write_json(&dir.join("low.json"), &FreqFn::Step(low))?;

    println!("wrote gaussian, box, square, band and low to {}", dir.display());
    Ok(())
}
