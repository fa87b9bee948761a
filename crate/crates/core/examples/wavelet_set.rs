//! Builds the truncated wavelet set for `r = 1`, `R = 4` and re-checks it.

use wavedense::rational::{format, int, to_f64};
use wavedense::waveletset::{build_wavelet_set, limit_measure, verify_bundle, verify_size_bounds};

fn main() -> wavedense::Result<()> {
    for dim in [1, 2] {
        let (r, big_r) = (int(1), int(4));
        let b = build_wavelet_set(&r, &big_r, 20, dim)?;
        let total: wavedense::Rat = b.levels[1..].iter().flatten().map(|c| c.measure()).sum();
        println!("d = {dim}: Σ μ(A_i) = {:.12} -> {}", to_f64(&total), format(&limit_measure(&r, &big_r, dim)));
        println!("  tail bound {:.3e}", to_f64(&b.tail));
        println!("  size bounds hold: {}", verify_size_bounds(&b.levels, &r, &big_r).pass);
        let rep = verify_bundle(&b)?;
        for c in &rep.checks {
            println!("  [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.inequality);
        }
    }
    Ok(())
}
