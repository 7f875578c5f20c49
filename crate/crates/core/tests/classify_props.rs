use std::collections::BTreeSet;

use proptest::prelude::*;
use rcc8::algebra::{converse, BaseRelation};
use rcc8::oracle::{classify, classify_by_sets, random_region, Bounds, GridRegion};

/// Regions as closed point sets on the doubled lattice: cell `(c, r)` covers
/// the points `(2c..=2c+2, 2r..=2r+2)`. A point is interior when every cell
/// around it belongs to the region.
struct PointSet {
    closure: BTreeSet<(i32, i32)>,
    interior: BTreeSet<(i32, i32)>,
}

fn points(region: &GridRegion) -> PointSet {
    let cells = region.cells();
    let mut closure = BTreeSet::new();
    for &(c, r) in cells {
        for dx in 0..=2 {
            for dy in 0..=2 {
                closure.insert((2 * c + dx, 2 * r + dy));
            }
        }
    }
    let interior = closure
        .iter()
        .copied()
        .filter(|&(px, py)| {
            // cells whose closed square contains the point
            let cs: Vec<i32> = if px % 2 == 0 {
                vec![px / 2 - 1, px / 2]
            } else {
                vec![px / 2]
            };
            let rs: Vec<i32> = if py % 2 == 0 {
                vec![py / 2 - 1, py / 2]
            } else {
                vec![py / 2]
            };
            cs.iter().all(|&c| rs.iter().all(|&r| cells.contains(&(c, r))))
        })
        .collect();
    PointSet { closure, interior }
}

fn geometric_relation(x: &GridRegion, y: &GridRegion) -> BaseRelation {
    use BaseRelation::*;
    let (px, py) = (points(x), points(y));
    let connected = !px.closure.is_disjoint(&py.closure);
    let overlap = !px.interior.is_disjoint(&py.interior);
    let part_xy = px.closure.is_subset(&py.closure);
    let part_yx = py.closure.is_subset(&px.closure);
    // a part is tangential when its closure reaches the boundary of the whole
    let tangential = |part: &PointSet, whole: &PointSet| part.closure.iter().any(|p| !whole.interior.contains(p));
    match (connected, overlap, part_xy, part_yx) {
        (false, ..) => DC,
        (true, false, ..) => EC,
        (_, _, true, true) => EQ,
        (_, _, true, false) => {
            if tangential(&px, &py) {
                TPP
            } else {
                NTPP
            }
        }
        (_, _, false, true) => {
            if tangential(&py, &px) {
                TPPi
            } else {
                NTPPi
            }
        }
        _ => PO,
    }
}

fn region_in(width: i32, height: i32, max: usize) -> impl Strategy<Value = GridRegion> {
    prop::collection::btree_set((0..width, 0..height), 1..=max).prop_map(|cells| GridRegion::new(cells).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn classify_matches_point_set_topology(x in region_in(6, 6, 36), y in region_in(6, 6, 36)) {
        let r = classify(&x, &y);
        prop_assert_eq!(r, geometric_relation(&x, &y));
        prop_assert_eq!(classify(&y, &x), converse(r));
    }

    #[test]
    fn nested_blocks_match_topology(c in 0..4i32, r in 0..4i32, w in 1..4i32, h in 1..4i32, m in 0..3i32) {
        let inner = GridRegion::block(c + m, r + m, w, h);
        let outer = GridRegion::block(c, r, w + 2 * m, h + 2 * m);
        prop_assert_eq!(classify(&inner, &outer), geometric_relation(&inner, &outer));
    }

    #[test]
    fn wide_regions_use_the_same_semantics(x in region_in(90, 3, 40), y in region_in(90, 3, 40)) {
        prop_assert_eq!(classify(&x, &y), classify_by_sets(&x, &y));
        prop_assert_eq!(classify(&x, &y), geometric_relation(&x, &y));
    }
}

#[test]
fn seeded_random_regions_agree_with_topology() {
    let bounds = Bounds::new(5, 5);
    for seed in 0..5000u64 {
        let x = random_region(bounds, seed % 2 == 0, 2 * seed);
        let y = random_region(bounds, seed % 3 == 0, 2 * seed + 1);
        assert_eq!(classify(&x, &y), geometric_relation(&x, &y), "seed {seed}");
    }
}

#[test]
fn every_relation_occurs() {
    let bounds = Bounds::DEFAULT;
    let seen: BTreeSet<BaseRelation> = (0..20_000u64)
        .map(|s| {
            classify(
                &random_region(bounds, true, 2 * s),
                &random_region(bounds, true, 2 * s + 1),
            )
        })
        .collect();
    assert_eq!(seen.len(), 8);
}
