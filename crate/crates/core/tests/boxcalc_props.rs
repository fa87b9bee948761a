use proptest::prelude::*;
use wavedense::boxcalc::{raster_contains, BoxSet, Cuboid};
use wavedense::rational::{frac, int};
use wavedense::Rat;

fn coord() -> impl Strategy<Value = Rat> {
    (-12i64..12, prop::sample::select(vec![1i64, 2, 3, 4, 8])).prop_map(|(p, q)| frac(p, q))
}

fn cuboid(dim: usize) -> impl Strategy<Value = Cuboid> {
    prop::collection::vec((coord(), coord()), dim).prop_filter_map("degenerate", |pairs| {
        let (lo, hi): (Vec<Rat>, Vec<Rat>) = pairs
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .unzip();
        Cuboid::nonempty(lo, hi)
    })
}

fn raw(dim: usize) -> impl Strategy<Value = Vec<Cuboid>> {
    prop::collection::vec(cuboid(dim), 0..5)
}

fn set(boxes: &[Cuboid], dim: usize) -> BoxSet {
    BoxSet::normalize(dim, boxes.to_vec()).unwrap()
}

fn in_raw(boxes: &[Cuboid], p: &[Rat]) -> bool {
    boxes.iter().any(|b| b.contains(p))
}

fn point(dim: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec((-100i64..100, 1i64..9).prop_map(|(p, q)| frac(p, q)), dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inclusion_exclusion_1d(a in raw(1), b in raw(1)) {
        check_partition(&set(&a, 1), &set(&b, 1))?;
    }

    #[test]
    fn inclusion_exclusion_2d(a in raw(2), b in raw(2)) {
        check_partition(&set(&a, 2), &set(&b, 2))?;
    }

    #[test]
    fn membership_follows_boolean_logic(a in raw(2), b in raw(2), c in raw(2), pts in prop::collection::vec(point(2), 32)) {
        let (sa, sb, sc) = (set(&a, 2), set(&b, 2), set(&c, 2));
        let e = sa.union(&sb).unwrap().subtract(&sc).unwrap().intersect(&sa.union(&sc).unwrap()).unwrap();
        for p in &pts {
            let (x, y, z) = (in_raw(&a, p), in_raw(&b, p), in_raw(&c, p));
            prop_assert_eq!(raster_contains(&e, p), (x || y) && !z && (x || z));
        }
    }

    #[test]
    fn normalization_is_idempotent(a in raw(2)) {
        let s = set(&a, 2);
        prop_assert_eq!(BoxSet::normalize(2, s.boxes().to_vec()).unwrap(), s.clone());
        prop_assert_eq!(s.union(&s).unwrap(), s);
    }

    #[test]
    fn affine_scales_measure(a in raw(2), sx in coord(), sy in coord(), tx in coord()) {
        prop_assume!(sx != int(0) && sy != int(0));
        let s = set(&a, 2);
        let t = s.affine(&[sx.clone(), sy.clone()], &[tx, int(0)]).unwrap();
        let det: Rat = &sx * &sy;
        prop_assert_eq!(t.measure(), s.measure() * if det < int(0) { -det } else { det });
    }

    #[test]
    fn fold_conserves_mass(a in raw(2), side in (1i64..5, 1i64..4).prop_map(|(p, q)| frac(p, q))) {
        let s = set(&a, 2);
        let folded = s.fold_mod(&side, &[int(0), int(0)]).unwrap();
        let mass: Rat = folded.iter().map(|(c, m)| c.measure() * Rat::from_integer((*m as i64).into())).sum();
        prop_assert_eq!(mass, s.measure());
    }
}

fn check_partition(a: &BoxSet, b: &BoxSet) -> Result<(), TestCaseError> {
    let u = a.union(b).unwrap();
    let i = a.intersect(b).unwrap();
    prop_assert_eq!(u.measure(), a.measure() + b.measure() - i.measure());
    let s = a.subtract(b).unwrap();
    prop_assert_eq!(s.measure() + i.measure(), a.measure());
    prop_assert!(s.intersect(&i).unwrap().is_empty());
    prop_assert_eq!(s.union(&i).unwrap(), a.clone());
    Ok(())
}
