//! Field-level invariants: Lipschitz bounds, downhill chains, variant
//! agreement.

use stepfield_core::floorfield::{compute_static_field, Cell, FieldVariant, Scenario};

const MOORE: [(i32, i32); 8] = [
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, 0),
    (1, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
];

fn walled_scenario() -> Scenario {
    // A room with an internal wall segment and one exit.
    let mut walls = Vec::new();
    for y in 3..15 {
        walls.push(Cell::new(8, y));
    }
    Scenario::new(20, 20, &walls, &[Cell::new(0, 10)]).unwrap()
}

#[test]
fn fields_are_lipschitz_along_moore_edges() {
    for (scenario, variant) in [
        (walled_scenario(), FieldVariant::GridGeodesic),
        (
            Scenario::new(25, 25, &[], &[Cell::new(3, 3), Cell::new(20, 7)]).unwrap(),
            FieldVariant::RealEuclidean,
        ),
    ] {
        let f = compute_static_field(&scenario, variant);
        for c in scenario.free_cells() {
            for (dx, dy) in MOORE {
                let n = Cell::new(c.x + dx, c.y + dy);
                if scenario.is_wall(n) {
                    continue;
                }
                let step = if dx == 0 || dy == 0 {
                    1.0
                } else {
                    std::f64::consts::SQRT_2
                };
                let (a, b) = (f.value(c), f.value(n));
                if a.is_finite() && b.is_finite() {
                    assert!(
                        (a - b).abs() <= step + 1e-12,
                        "Lipschitz violated {c} -> {n}: {a} vs {b}"
                    );
                }
            }
        }
    }
}

#[test]
fn geodesic_field_has_no_local_minima_besides_exits() {
    let scenario = walled_scenario();
    let f = compute_static_field(&scenario, FieldVariant::GridGeodesic);
    for c in scenario.free_cells() {
        if scenario.is_exit(c) || !f.value(c).is_finite() {
            continue;
        }
        let downhill = MOORE.iter().any(|&(dx, dy)| {
            let n = Cell::new(c.x + dx, c.y + dy);
            !scenario.is_wall(n) && f.value(n) < f.value(c)
        });
        assert!(downhill, "no downhill neighbor at {c}");
    }
}

#[test]
fn downhill_chains_reach_an_exit() {
    let scenario = walled_scenario();
    let f = compute_static_field(&scenario, FieldVariant::GridGeodesic);
    for start in scenario.free_cells() {
        if !f.value(start).is_finite() {
            continue;
        }
        let mut c = start;
        let mut steps = 0;
        while !scenario.is_exit(c) {
            let next = MOORE
                .iter()
                .map(|&(dx, dy)| Cell::new(c.x + dx, c.y + dy))
                .filter(|&n| !scenario.is_wall(n) && f.value(n) < f.value(c))
                .min_by(|a, b| f.value(*a).total_cmp(&f.value(*b)))
                .expect("geodesic field always has a downhill neighbor");
            c = next;
            steps += 1;
            assert!(steps < 10_000, "chain from {start} does not terminate");
        }
    }
}

#[test]
fn integer_and_real_variants_agree_within_half_a_cell() {
    let scenario = Scenario::new(40, 40, &[], &[Cell::new(7, 31)]).unwrap();
    let real = compute_static_field(&scenario, FieldVariant::RealEuclidean);
    let int = compute_static_field(&scenario, FieldVariant::IntegerEuclidean);
    for c in scenario.free_cells() {
        let d = (real.value(c) - int.value(c)).abs();
        assert!(d <= 0.5, "variants differ by {d} at {c}");
        assert_eq!(int.value(c), real.value(c).round());
    }
}
