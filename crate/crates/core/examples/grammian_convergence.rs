//! The p-Grammian of an indicator flattens as the lattice is oversampled.

use num_complex::Complex64;
use wavedense::boxcalc::{BoxSet, Cuboid};
use wavedense::freqfn::{FreqFn, StepFn};
use wavedense::grammian::{convergence_table, dyadic_sequence, indicator_grammian_counts};
use wavedense::rational::{frac, int};

fn main() -> wavedense::Result<()> {
    let i = Cuboid::interval(int(0), frac(13, 10))?;
    let f = FreqFn::Step(StepFn::indicator(&BoxSet::from_box(i.clone()), Complex64::new(1.0, 0.0)));
    let bs = dyadic_sequence(8, 1);
    for p in [1.0, 2.0] {
        println!("p = {p}");
        println!("{:>3} {:>10} {:>12} {:>12}", "k", "‖b‖", "sup err", "Lp err");
        for (k, row) in convergence_table(&f, p, &bs)?.iter().enumerate() {
            println!("{:>3} {:>10.6} {:>12.6e} {:>12.6e}", k + 1, row.norm_b, row.sup_error, row.lp_error);
        }
    }
    let c = indicator_grammian_counts(&i, &bs[7])?;
    println!("b = 1/256: {} interior cells, {} boundary cells", c.n_i, c.n_o);

    let sq = Cuboid::cube(int(0), frac(13, 10), 2)?;
    let g = FreqFn::Step(StepFn::indicator(&BoxSet::from_box(sq), Complex64::new(1.0, 0.0)));
    let last = convergence_table(&g, 2.0, &dyadic_sequence(8, 2))?;
    println!("square, p = 2, k = 8: L2 error {:.3e}", last[7].lp_error);
    Ok(())
}
