#[path = "support/oracles.rs"]
mod oracles;

use proptest::prelude::*;
use robust_tda::bottleneck::bottleneck_distance;
use robust_tda::diagram::{Feature, PersistenceDiagram};
use robust_tda::grid::{EvaluationGrid, Orientation, ScalarField};
use robust_tda::kernel::{kde_field, KernelDistance, KernelParams};
use robust_tda::persistence::{build_complex, field_diagram};
use robust_tda::PointCloud;

fn field(shape: &[usize], values: Vec<f64>, orientation: Orientation) -> ScalarField {
    let grid = EvaluationGrid::new(vec![0.0; shape.len()], vec![1.0; shape.len()], shape.to_vec()).unwrap();
    ScalarField::new(grid, values, orientation).unwrap()
}

/// Shapes of 1D (length <= 50) and 2D (<= 12 x 12) grids with values drawn
/// from a small dyadic set, so ties are common and affine maps stay exact.
fn small_field() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    prop_oneof![
        (2usize..=50).prop_map(|n| vec![n]),
        (2usize..=12, 2usize..=12).prop_map(|(p, q)| vec![p, q]),
    ]
    .prop_flat_map(|shape| {
        let n: usize = shape.iter().product();
        (Just(shape), prop::collection::vec((-40i32..=40).prop_map(|v| v as f64 / 8.0), n))
    })
}

fn continuous_field_2d() -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    (2usize..=10, 2usize..=10).prop_flat_map(|(p, q)| {
        (Just(vec![p, q]), prop::collection::vec(-5.0f64..5.0, p * q))
    })
}

fn dim0_pairs(d: &PersistenceDiagram) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut essential = Vec::new();
    for f in d.in_dim(0) {
        if f.is_essential() {
            essential.push(f.birth);
        } else {
            finite.push((f.birth, f.death));
        }
    }
    essential.sort_by(f64::total_cmp);
    (finite, essential)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dim0_matches_union_find((shape, values) in small_field()) {
        let d = field_diagram(&field(&shape, values.clone(), Orientation::Sublevel)).unwrap();
        let (got, got_ess) = dim0_pairs(&d);
        let (want, want_ess) = oracles::union_find_dim0(&values, &shape);
        prop_assert!(oracles::same_pairs(&got, &want), "{got:?} vs {want:?}");
        prop_assert_eq!(got_ess, want_ess);
    }

    #[test]
    fn euler_characteristic_matches_cell_count((shape, values) in small_field().prop_filter("2D", |(s, _)| s.len() == 2)) {
        let d = field_diagram(&field(&shape, values.clone(), Orientation::Sublevel)).unwrap();
        for k in -42..=42 {
            let t = k as f64 / 8.0 + if k % 2 == 0 { 0.0 } else { 1.0 / 16.0 };
            let alive: i64 = (0..=2).map(|dim| {
                let sign = if dim % 2 == 0 { 1 } else { -1 };
                sign * d.alive_at(dim, t) as i64
            }).sum();
            prop_assert_eq!(alive, oracles::euler_2d(&values, [shape[0], shape[1]], t), "t = {}", t);
        }
    }

    #[test]
    fn affine_reparameterization_maps_diagram((shape, values) in small_field()) {
        let f = field(&shape, values.clone(), Orientation::Sublevel);
        let g = field(&shape, values.iter().map(|v| 2.0 * v + 3.0).collect(), Orientation::Sublevel);
        let df = field_diagram(&f).unwrap();
        let dg = field_diagram(&g).unwrap();
        let mapped: Vec<Feature> = df.features().iter()
            .map(|x| Feature::new(x.dim, 2.0 * x.birth + 3.0, 2.0 * x.death + 3.0))
            .collect();
        prop_assert_eq!(PersistenceDiagram::new(Orientation::Sublevel, mapped).unwrap(), dg);
    }

    #[test]
    fn stability((shape, f) in continuous_field_2d(), noise in prop::collection::vec(-0.5f64..0.5, 100), scale in 0.0f64..2.0) {
        let g: Vec<f64> = f.iter().enumerate().map(|(i, v)| v + scale * noise[i % noise.len()]).collect();
        let ff = field(&shape, f, Orientation::Sublevel);
        let gg = field(&shape, g, Orientation::Sublevel);
        let sup = ff.sup_distance(&gg).unwrap();
        let (df, dg) = (field_diagram(&ff).unwrap(), field_diagram(&gg).unwrap());
        for dim in 0..=2 {
            let w = bottleneck_distance(&df, &dg, dim);
            prop_assert!(w <= sup + 1e-10, "dim {dim}: {w} > {sup}");
        }
    }

    #[test]
    fn superlevel_is_negated_sublevel((shape, values) in small_field()) {
        let up = field_diagram(&field(&shape, values.clone(), Orientation::Superlevel)).unwrap();
        let down = field_diagram(&field(&shape, values.iter().map(|v| -v).collect(), Orientation::Sublevel)).unwrap();
        let negated: Vec<Feature> = down.features().iter()
            .map(|x| Feature::new(x.dim, -x.birth, -x.death))
            .collect();
        prop_assert_eq!(PersistenceDiagram::new(Orientation::Superlevel, negated).unwrap(), up);
    }
}

#[test]
fn faces_enter_before_cofaces() {
    let values: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
    let complex = build_complex(&field(&[5, 6], values, Orientation::Sublevel)).unwrap();
    let mut position = vec![0; complex.cell_count()];
    for (rank, cell) in complex.filtration_order().enumerate() {
        position[cell] = rank;
    }
    for cell in 0..complex.cell_count() {
        for face in complex.boundary(cell) {
            assert!(position[face] < position[cell]);
            assert!(complex.cell_value(face) <= complex.cell_value(cell));
        }
    }
}

fn match_within(a: &[(usize, f64, f64)], b: &[(usize, f64, f64)], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        let hit = b.iter().enumerate().position(|(j, y)| {
            !used[j]
                && x.0 == y.0
                && (x.1 - y.1).abs() <= tol
                && (x.2 == y.2 || (x.2 - y.2).abs() <= tol)
        });
        match hit {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        }
    })
}

#[test]
fn kernel_distance_and_density_diagrams_correspond() {
    let cloud = PointCloud::new(
        (0..40)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 40.0;
                vec![t.cos() + 0.05 * (3.0 * t).sin(), t.sin()]
            })
            .collect(),
    )
    .unwrap();
    let grid = EvaluationGrid::around(&cloud, 0.2, 40).unwrap();
    for h in [0.15, 0.3] {
        let p = KernelParams::new(h).unwrap();
        let kd = KernelDistance::new(&cloud, p).unwrap();
        let d_sq = field_diagram(&kd.squared_field(&grid).unwrap()).unwrap();
        let d_kde = field_diagram(&kde_field(&cloud, p, &grid).unwrap()).unwrap();
        let c = kd.self_energy() + 1.0;
        let s = 2.0 * p.normalizer(2);
        let tol = 1e-9 * c;
        let keep = |x: &(usize, f64, f64)| (x.2 - x.1).abs() > tol;
        let mapped: Vec<(usize, f64, f64)> = d_kde
            .features()
            .iter()
            .map(|x| (x.dim, c - s * x.birth, c - s * x.death))
            .filter(keep)
            .collect();
        let direct: Vec<(usize, f64, f64)> =
            d_sq.features().iter().map(|x| (x.dim, x.birth, x.death)).filter(keep).collect();
        assert!(match_within(&mapped, &direct, tol), "h = {h}: {mapped:?} vs {direct:?}");
        assert!(d_sq.lifetimes(1).finite[0] > 0.0);
    }
}
