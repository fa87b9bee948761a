use num_complex::Complex64;
use wavedense::boxcalc::{BoxSet, Cuboid};
use wavedense::freqfn::{FreqFn, StepFn};
use wavedense::orthosys::nondensity_fixed_lattice_demo;
use wavedense::rational::{frac, int};

fn low() -> FreqFn {
    let set = BoxSet::from_box(Cuboid::interval(int(0), frac(1, 2)).unwrap());
    FreqFn::Step(StepFn::indicator(&set, Complex64::new(2f64.sqrt(), 0.0)))
}

#[test]
fn fixed_lattice_bound_matches_closed_form() {
    let v = nondensity_fixed_lattice_demo(&low(), &[int(1)]).unwrap();
    assert!((v - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-12);
}

/// The stated target 0.655 disagrees with its own closed form
/// √((√2−1)²/2 + 1/2) = √(2−√2) ≈ 0.7654, so this check fails.
#[test]
#[ignore = "target value contradicts the closed form"]
fn fixed_lattice_bound_matches_stated_target() {
    let v = nondensity_fixed_lattice_demo(&low(), &[int(1)]).unwrap();
    assert!((v - 0.655).abs() < 1e-6, "got {v}");
}
