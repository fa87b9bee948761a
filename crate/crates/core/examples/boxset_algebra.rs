//! Exact set algebra on half-open rational boxes.

use wavedense::boxcalc::{raster_contains, BoxSet, Cuboid};
use wavedense::rational::{format, frac, int};

fn main() -> wavedense::Result<()> {
    let a = BoxSet::from_box(Cuboid::cube(int(0), int(2), 2)?);
    let b = BoxSet::from_box(Cuboid::cube(int(1), int(3), 2)?);
    let hole = BoxSet::from_box(Cuboid::cube(frac(1, 3), frac(2, 3), 2)?);

    let u = a.union(&b)?;
    let i = a.intersect(&b)?;
    let s = u.subtract(&hole)?;
    println!("μ(A ∪ B) = {}", format(&u.measure()));
    println!("μ(A ∩ B) = {}", format(&i.measure()));
    println!("μ(A ∪ B ∖ H) = {} over {} boxes", format(&s.measure()), s.boxes().len());
    assert_eq!(u.measure() + i.measure(), a.measure() + b.measure());

    let p = [frac(1, 2), frac(1, 2)];
    println!("(1/2, 1/2) in A ∪ B ∖ H: {} (raster: {})", s.contains(&p), raster_contains(&s, &p));

    let scaled = s.scale(&frac(3, 2))?;
    println!("μ(3/2 · S) = {}", format(&scaled.measure()));
    for (cell, mult) in s.fold_mod(&int(1), &[int(0), int(0)])?.iter().take(4) {
        println!("mod 1: {:?}..{:?} covered {} times", cell.lo_f64(), cell.hi_f64(), mult);
    }
    Ok(())
}
