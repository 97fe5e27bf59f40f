#[path = "support/oracles.rs"]
mod oracles;

use oracles::BruteDiagram;
use proptest::prelude::*;
use robust_tda::bottleneck::{bottleneck_all_dims, bottleneck_distance};
use robust_tda::diagram::{Feature, PersistenceDiagram};
use robust_tda::grid::Orientation;

/// Values on a coarse dyadic lattice so that ties between costs occur.
fn value() -> impl Strategy<Value = f64> {
    (0i32..=24).prop_map(|v| v as f64 / 4.0)
}

fn pair(orientation: Orientation) -> impl Strategy<Value = (f64, f64)> {
    (value(), value()).prop_map(move |(a, b)| match orientation {
        Orientation::Sublevel => (a.min(b), a.max(b)),
        Orientation::Superlevel => (a.max(b), a.min(b)),
    })
}

fn diagram(orientation: Orientation) -> impl Strategy<Value = PersistenceDiagram> {
    (
        prop::collection::vec(pair(orientation), 0..=5),
        prop::collection::vec(value(), 0..=2),
    )
        .prop_map(move |(finite, essential)| {
            let inf = match orientation {
                Orientation::Sublevel => f64::INFINITY,
                Orientation::Superlevel => f64::NEG_INFINITY,
            };
            let mut features: Vec<Feature> = finite.into_iter().map(|(b, d)| Feature::new(1, b, d)).collect();
            features.extend(essential.into_iter().map(|b| Feature::new(1, b, inf)));
            PersistenceDiagram::new(orientation, features).unwrap()
        })
}

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Sublevel), Just(Orientation::Superlevel)]
}

fn diagram_pair() -> impl Strategy<Value = (PersistenceDiagram, PersistenceDiagram)> {
    orientation().prop_flat_map(|o| (diagram(o), diagram(o)))
}

fn diagram_triple() -> impl Strategy<Value = (PersistenceDiagram, PersistenceDiagram, PersistenceDiagram)> {
    orientation().prop_flat_map(|o| (diagram(o), diagram(o), diagram(o)))
}

fn brute(d: &PersistenceDiagram) -> BruteDiagram {
    let mut out = BruteDiagram {
        finite: Vec::new(),
        up: Vec::new(),
        down: Vec::new(),
    };
    for f in d.in_dim(1) {
        if f.death == f64::INFINITY {
            out.up.push(f.birth);
        } else if f.death == f64::NEG_INFINITY {
            out.down.push(f.birth);
        } else {
            out.finite.push((f.birth, f.death));
        }
    }
    out
}

/// Every cost the distance could legitimately take.
fn candidate_costs(x: &PersistenceDiagram, y: &PersistenceDiagram) -> Vec<f64> {
    let (bx, by) = (brute(x), brute(y));
    let mut c = vec![0.0, f64::INFINITY];
    for p in bx.finite.iter().chain(&by.finite) {
        c.push((p.1 - p.0).abs() / 2.0);
    }
    for p in &bx.finite {
        for q in &by.finite {
            c.push((p.0 - q.0).abs());
            c.push((p.1 - q.1).abs());
        }
    }
    for (a, b) in [(&bx.up, &by.up), (&bx.down, &by.down)] {
        for p in a.iter() {
            for q in b.iter() {
                c.push((p - q).abs());
            }
        }
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_brute_force((x, y) in diagram_pair()) {
        let fast = bottleneck_distance(&x, &y, 1);
        let slow = oracles::brute_force_bottleneck(&brute(&x), &brute(&y));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn symmetric((x, y) in diagram_pair()) {
        prop_assert_eq!(bottleneck_distance(&x, &y, 1), bottleneck_distance(&y, &x, 1));
    }

    #[test]
    fn triangle_inequality((x, y, z) in diagram_triple()) {
        let xz = bottleneck_distance(&x, &z, 1);
        let xy = bottleneck_distance(&x, &y, 1);
        let yz = bottleneck_distance(&y, &z, 1);
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn zero_on_self(x in orientation().prop_flat_map(diagram)) {
        prop_assert_eq!(bottleneck_distance(&x, &x, 1), 0.0);
    }

    #[test]
    fn value_is_a_candidate_cost((x, y) in diagram_pair()) {
        let d = bottleneck_distance(&x, &y, 1);
        prop_assert!(candidate_costs(&x, &y).contains(&d), "{d}");
    }
}

#[test]
fn distinct_off_diagonal_points_are_separated() {
    let x = PersistenceDiagram::new(Orientation::Sublevel, vec![Feature::new(1, 0.0, 2.0)]).unwrap();
    let y = PersistenceDiagram::new(Orientation::Sublevel, vec![Feature::new(1, 0.0, 2.5)]).unwrap();
    assert_eq!(bottleneck_distance(&x, &y, 1), 0.5);
}

#[test]
fn per_dimension_map() {
    let x = PersistenceDiagram::new(
        Orientation::Sublevel,
        vec![Feature::new(0, 0.0, f64::INFINITY), Feature::new(1, 1.0, 3.0)],
    )
    .unwrap();
    let y = PersistenceDiagram::new(Orientation::Sublevel, vec![Feature::new(0, 0.25, f64::INFINITY)]).unwrap();
    let all = bottleneck_all_dims(&x, &y);
    assert_eq!(all.get(&0), Some(&0.25));
    assert_eq!(all.get(&1), Some(&1.0));
}
