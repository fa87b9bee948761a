//! Orthonormal affine systems near a unit-norm target, and two obstructions
//! to approximating by orthonormal systems with a fixed lattice or a fixed
//! dilation.
//!
//! The annulus generator `h` from the frame construction is normalized by its
//! Grammian at `b = 2^{-k} I`. Once `h_b` is positive on all of `Q`, the
//! translates of `u_h` by `2^k ℤ^d` are orthonormal, and a scalar dilation at
//! least `R_ψ/r_ψ` separates the scales.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::boxcalc::BoxSet;
use crate::error::{Error, Result};
use crate::frames;
use crate::freqfn::{self, Dilation, FreqFn, Lattice};
use crate::grammian;
use crate::rational::{self, Rat};
use crate::report::{Check, Report};

const NORM_TOL: f64 = 1e-9;
const MAX_K: u32 = 64;

fn require_unit(f: &FreqFn) -> Result<()> {
    let norm = f.l2_norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Outcome of the dyadic lattice search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BSearch {
    pub k: u32,
    #[serde(with = "rational::serde_rat_vec")]
    pub b: Vec<Rat>,
    /// `‖h_b − χ_Q‖_{L²(Q)}` at the returned `b`.
    pub distance: f64,
    pub full_support: bool,
    /// Whether the returned `b` meets both requirements.
    pub accepted: bool,
}

/// First `k` with `‖h_b − χ_Q‖ < ε/2` and `h_b > 0` on `Q`, `b = 2^{-k} I`.
/// Past `k = 64` the best candidate seen is returned unaccepted.
pub fn search_b(h: &FreqFn, epsilon: f64) -> Result<BSearch> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let d = h.dim();
    let mut best: Option<BSearch> = None;
    for k in 0..=MAX_K {
        let b = vec![rational::pow2(-(k as i32)); d];
        let hb = grammian::grammian_p(h, &b, 2.0)?;
        let distance = hb.lp_distance_to_const(1.0, 2.0);
        let full_support = hb.has_full_support();
        let accepted = full_support && distance < epsilon / 2.0;
        let cand = BSearch {
            k,
            b,
            distance,
            full_support,
            accepted,
        };
        if accepted {
            return Ok(cand);
        }
        let better = match &best {
            None => true,
            Some(o) => (cand.full_support, -cand.distance) > (o.full_support, -o.distance),
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// `μ(a^{-j}S ∩ a^{-j'}S)` for `S = supp ψ̂` and all `j < j'` in the range.
pub fn dilation_overlaps(psi: &FreqFn, a: &Rat, j_range: (i32, i32)) -> Result<Vec<(i32, i32, f64)>> {
    let s = psi.support();
    let (lo, hi) = j_range;
    let scaled: Vec<(i32, BoxSet)> = (lo..=hi)
        .map(|j| Ok((j, s.scale(&rat_pow(a, -j))?)))
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..scaled.len() {
        for k in i + 1..scaled.len() {
            pairs.push((i, k));
        }
    }
    pairs
        .par_iter()
        .map(|&(i, k)| {
            let m = scaled[i].1.intersect(&scaled[k].1)?.measure();
            Ok((scaled[i].0, scaled[k].0, rational::to_f64(&m)))
        })
        .collect()
}

fn rat_pow(a: &Rat, j: i32) -> Rat {
    let p = rational::pow(a, j.unsigned_abs());
    if j < 0 {
        p.recip()
    } else {
        p
    }
}

/// Translate orthonormality and cross-scale support separation.
pub fn verify_ortho_system(
    psi: &FreqFn,
    a: &Dilation,
    lattice: &Lattice,
    j_range: (i32, i32),
    index: &[Vec<i64>],
    tol: f64,
) -> Result<Report> {
    let s = a
        .scalar_value()
        .ok_or_else(|| Error::Unsupported("scale separation is checked for scalar dilations".into()))?
        .abs();
    let gram = grammian::translate_gram_matrix(psi, lattice, index)?;
    let dev = grammian::identity_deviation(&gram);
    let overlaps = dilation_overlaps(psi, &s, j_range)?;
    let worst = overlaps.iter().map(|o| o.2).fold(0.0, f64::max);
    let mut rep = Report::new("orthonormal affine system");
    rep.push(Check::le("translate gram", "max |G − I| ≤ tol", dev, tol));
    rep.push(Check::le("scale separation", "max μ(a^{-j}S ∩ a^{-j'}S) ≤ tol", worst, tol));
    rep.record("translate_gram_deviation", dev);
    rep.record("translates", index.len());
    rep.record("dilation_overlaps", &overlaps);
    rep.record("j_range", j_range);
    Ok(rep)
}

/// Summary of the orthonormal construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthoReport {
    pub search: BSearch,
    /// `‖h_b − χ_Q‖_{L²(Q)}`.
    pub grammian_distance: f64,
    /// `‖h − u_h‖₂`, integrated directly.
    pub normalization_distance: f64,
    /// `‖h_b − χ_{E∩Q}‖_{L²(Q)}`, which equals the previous value.
    pub normalization_via_grammian: f64,
    /// `‖f̂ − h‖₂`.
    pub annulus_distance: f64,
    /// `‖f̂ − û_h‖₂`.
    pub total_distance: f64,
    pub translate_gram_deviation: f64,
    pub dilation_overlaps: Vec<(i32, i32, f64)>,
    pub checks: Report,
}

#[derive(Clone, Debug)]
pub struct OrthoOutcome {
    pub psi: FreqFn,
    pub dilation: Dilation,
    pub lattice: Lattice,
    pub report: OrthoReport,
}

/// Index set of `11^d` translates and scales `0..=3`.
pub fn default_ortho_checks(dim: usize) -> (Vec<Vec<i64>>, (i32, i32)) {
    (grammian::centered_index_set(5, dim), (0, 3))
}

/// Smallest integer at least `R_ψ/r_ψ`.
fn separating_dilation(psi: &FreqFn) -> Result<Rat> {
    let (near, far) = psi.support_radii().ok_or(Error::ZeroFunction)?;
    if !(near > 0.0) {
        return Err(Error::InvalidParameter("support touches the origin".into()));
    }
    let mut a = Rat::from_integer(BigInt::from((far / near).ceil().max(2.0) as i64));
    while rational::to_f64(&a) * near < far {
        a += Rat::one();
    }
    Ok(a)
}

pub fn construct_ortho_generator(f: &FreqFn, epsilon: f64) -> Result<OrthoOutcome> {
    let (index, j_range) = default_ortho_checks(f.dim());
    construct_ortho_with(f, epsilon, &index, j_range)
}

pub fn construct_ortho_with(
    f: &FreqFn,
    epsilon: f64,
    index: &[Vec<i64>],
    j_range: (i32, i32),
) -> Result<OrthoOutcome> {
    require_unit(f)?;
    let d = f.dim();
    let two = Dilation::scalar(Rat::from_integer(2.into()), d)?;
    let params = frames::choose_frame_params(f, epsilon, &two)?;
    let (h, _) = frames::build_h(f, &params)?;
    let annulus_distance = freqfn::l2_distance(f, &h)?;
    let search = search_b(&h, epsilon)?;
    let b = search.b.clone();
    let hb = grammian::grammian_p(&h, &b, 2.0)?;
    let psi = grammian::normalize_u(&h, &b)?;
    let normalization_distance = freqfn::l2_distance(&h, &psi)?;
    let normalization_via_grammian = hb.l2_distance_to_support_indicator();
    let total_distance = freqfn::l2_distance(f, &psi)?;

    let a = separating_dilation(&psi)?;
    let dilation = Dilation::scalar(a.clone(), d)?;
    let lattice = Lattice::scalar(rational::pow2(search.k as i32), d)?;
    let verify = verify_ortho_system(&psi, &dilation, &lattice, j_range, index, 1e-8)?;
    let dev = verify.quantity("translate_gram_deviation").unwrap_or(f64::NAN);
    let overlaps = dilation_overlaps(&psi, &a, j_range)?;

    let mut rep = Report::new("orthonormal generator");
    rep.push(Check::holds("dyadic lattice found", "h_b > 0 on Q and ‖h_b − χ_Q‖ < ε/2", search.accepted));
    rep.push(Check::lt("annulus step", "‖f̂ − h‖₂ < ε/2", annulus_distance, epsilon / 2.0));
    rep.push(Check::lt("grammian distance", "‖h_b − χ_Q‖_{L²(Q)} < ε/2", search.distance, epsilon / 2.0));
    rep.push(Check::le(
        "normalization identity",
        "|‖h − u_h‖₂ − ‖h_b − χ_{E∩Q}‖| ≤ 10⁻⁹",
        (normalization_distance - normalization_via_grammian).abs(),
        1e-9,
    ));
    rep.push(Check::le(
        "normalization bound",
        "‖h_b − χ_{E∩Q}‖ ≤ ‖h_b − χ_Q‖",
        normalization_via_grammian,
        search.distance * (1.0 + 1e-12),
    ));
    rep.push(Check::le(
        "distance chain",
        "‖f̂ − ψ̂‖ ≤ ‖f̂ − h‖ + ‖h − u_h‖",
        total_distance,
        (annulus_distance + normalization_distance) * (1.0 + 1e-12),
    ));
    rep.push(Check::lt("distance", "‖f̂ − ψ̂‖₂ < ε", total_distance, epsilon));
    let ub = grammian::grammian_p(&psi, &b, 2.0)?;
    rep.push(Check::le("normalized grammian", "max |(u_h)_b − 1| on E ≤ 10⁻¹²", ub.sup_deviation_on_support(1.0), 1e-12));
    for c in verify.checks.clone() {
        rep.push(c);
    }
    rep.record("epsilon", epsilon);
    rep.record("k", search.k);
    rep.record("b", b.iter().map(rational::format).collect::<Vec<_>>());
    rep.record("dilation", rational::format(&a));
    rep.record("lattice", &lattice);
    rep.record("r", rational::format(&params.r));
    rep.record("R", rational::format(&params.big_r));
    rep.record("lambda", params.lambda);
    rep.record("distance.annulus", annulus_distance);
    rep.record("distance.grammian", search.distance);
    rep.record("distance.normalization", normalization_distance);
    rep.record("distance.normalization_via_grammian", normalization_via_grammian);
    rep.record("distance.total", total_distance);
    rep.record("translate_gram_deviation", dev);
    rep.record("translates", index.len());
    rep.record("dilation_overlaps", &overlaps);

    let report = OrthoReport {
        search,
        grammian_distance: hb.lp_distance_to_const(1.0, 2.0),
        normalization_distance,
        normalization_via_grammian,
        annulus_distance,
        total_distance,
        translate_gram_deviation: dev,
        dilation_overlaps: overlaps,
        checks: rep,
    };
    Ok(OrthoOutcome {
        psi,
        dilation,
        lattice,
        report,
    })
}

/// `‖f̂_b − χ_Q‖_{L²(Q)}`, a lower bound on the distance from `f` to any
/// generator whose `b^{-T}ℤ^d` translates are orthonormal.
pub fn nondensity_fixed_lattice_demo(f: &FreqFn, b: &[Rat]) -> Result<f64> {
    require_unit(f)?;
    Ok(grammian::grammian_p(f, b, 2.0)?.lp_distance_to_const(1.0, 2.0))
}

/// `|⟨f, D_a f⟩| = |det a|^{-1/2} |∫ f̂(ω) conj f̂(ω/a) dω|` for a scalar `a`.
pub fn nondensity_fixed_dilation_demo(f: &FreqFn, a: &Dilation) -> Result<f64> {
    require_unit(f)?;
    let s = a
        .scalar_value()
        .ok_or_else(|| Error::Unsupported("the dilation pairing is computed for scalar dilations".into()))?;
    if s.is_zero() {
        return Err(Error::ZeroScale { axis: 0 });
    }
    let stretched = f.stretch(s)?;
    let ip = freqfn::inner(f, &stretched)?;
    Ok(ip.norm() / a.det_abs().sqrt())
}
