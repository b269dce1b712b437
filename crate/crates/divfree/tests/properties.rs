//! Invariants checked over random inputs.

use divfree::approx::{compress_jet, compression_map, cover_values, image_cover, perp_gradient};
use divfree::fixtures::{flat_potential, Disk, TrigSum};
use divfree::geometry::{distance_field, make_compact_set, separated_preimage_cover, CompactSet, Shape};
use divfree::jets::{jet_norm, shvartsman_maximal, whitney_extend, Jet};
use divfree::norms::{cm_norm, max_divergence, wmp_norm};
use divfree::whitney::{whitney_decompose, WhitneyParams, MAX_NEIGHBORS};
use divfree::{Grid, ScalarField};
use proptest::prelude::*;

fn unit_grid(cells: usize) -> Grid {
    Grid::square(-1.0, 2.0, cells).unwrap()
}

fn disk_set(cells: usize, center: [f64; 2], radius: f64) -> CompactSet {
    make_compact_set(&[Shape::disk(center, radius)], unit_grid(cells)).unwrap()
}

fn two_disk_set(cells: usize, shift: f64) -> CompactSet {
    let shapes = [Shape::disk([-0.4, shift], 0.2), Shape::disk([0.4, -shift], 0.15)];
    make_compact_set(&shapes, unit_grid(cells)).unwrap()
}

fn add(f: &ScalarField, g: &ScalarField) -> ScalarField {
    ScalarField { grid: f.grid, values: f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect() }
}

fn scaled(f: &ScalarField, c: f64) -> ScalarField {
    ScalarField { grid: f.grid, values: f.values.iter().map(|a| c * a).collect() }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distance_is_one_lipschitz_between_neighbors(
        cx in -0.5f64..0.5, cy in -0.5f64..0.5, radius in 0.05f64..0.4,
    ) {
        let k = disk_set(64, [cx, cy], radius);
        let d = distance_field(&k).unwrap();
        let g = k.grid;
        let h = g.h();
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                if i + 1 < g.nx() {
                    prop_assert!((d.get(i + 1, j) - d.get(i, j)).abs() <= h * (1.0 + 1e-12));
                }
                if j + 1 < g.ny() {
                    prop_assert!((d.get(i, j + 1) - d.get(i, j)).abs() <= h * (1.0 + 1e-12));
                }
            }
        }
        for idx in k.samples() {
            prop_assert_eq!(d.values[idx], 0.0);
        }
    }

    #[test]
    fn preimage_sets_are_disjoint_separated_and_cover_k(
        shift in -0.3f64..0.3, first in 0.0f64..1.0, second in 0.0f64..1.0, eps in 0.05f64..0.5,
    ) {
        let disks = [
            Disk { center: [-0.4, shift], radius: 0.2, value: first },
            Disk { center: [0.4, -shift], radius: 0.15, value: second },
        ];
        let g = unit_grid(64);
        let k = make_compact_set(&disks.map(|d| d.shape()), g).unwrap();
        let psi = flat_potential(g, &disks, 2.0 * g.h(), 0.25);
        let intervals = image_cover(&psi, &k, eps).unwrap();
        let cover = separated_preimage_cover(&psi, &k, &intervals, 4.0 * g.h()).unwrap();
        prop_assert_eq!(cover.sets.len(), intervals.len());
        let mut owner = vec![usize::MAX; g.n_nodes()];
        for (s, set) in cover.sets.iter().enumerate() {
            for idx in set.samples() {
                prop_assert_eq!(owner[idx], usize::MAX, "node {} in two sets", idx);
                owner[idx] = s;
            }
        }
        for idx in k.samples() {
            prop_assert!(owner[idx] != usize::MAX, "sample {} uncovered", idx);
        }
        prop_assert!(cover.gap >= 2.0 * g.h() * (1.0 - 1e-12));
    }

    #[test]
    fn partition_is_local_nonnegative_and_sums_to_one(
        shift in -0.3f64..0.3, px in -0.95f64..0.95, py in -0.95f64..0.95,
    ) {
        let k = two_disk_set(64, shift);
        let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k)).unwrap();
        let terms = dec.partition_at([px, py]);
        if let Some(_) = dec.locate([px, py]) {
            prop_assert!(terms.len() <= MAX_NEIGHBORS + 1);
            let total: f64 = terms.iter().map(|(_, phi)| phi.value).sum();
            prop_assert!(terms.iter().all(|(_, phi)| phi.value >= 0.0));
            prop_assert!(close(total, 1.0), "sum {}", total);
        } else {
            prop_assert!(terms.is_empty());
        }
    }

    #[test]
    fn extension_reproduces_values_on_k(seed in 0u64..1000, m in 1u32..=2) {
        let k = disk_set(64, [0.1, -0.2], 0.3);
        let dec = whitney_decompose(&k, &WhitneyParams::for_set(&k)).unwrap();
        let jet = TrigSum::random(seed, 3, 4.0).jet(&k, m);
        let ext = whitney_extend(&jet, &dec, m, k.grid).unwrap();
        for (s, idx) in k.samples().into_iter().enumerate() {
            prop_assert_eq!(ext.values[idx], jet.values[0][s]);
        }
    }

    #[test]
    fn jet_norm_is_homogeneous_and_subadditive(
        a in 0u64..1000, b in 0u64..1000, c in -4.0f64..4.0, gamma in 0.0f64..=1.0,
    ) {
        let k = disk_set(32, [0.0, 0.0], 0.35);
        let f = TrigSum::random(a, 3, 3.0).jet(&k, 1);
        let g = TrigSum::random(b, 3, 3.0).jet(&k, 1);
        let sum_values = f.values.iter().zip(&g.values)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
            .collect();
        let sum = Jet::new(1, f.points.clone(), sum_values).unwrap();
        let nf = jet_norm(&f, 1, gamma, 0).unwrap().jet_norm;
        let ng = jet_norm(&g, 1, gamma, 0).unwrap().jet_norm;
        let ncf = jet_norm(&f.scale(c), 1, gamma, 0).unwrap().jet_norm;
        let nsum = jet_norm(&sum, 1, gamma, 0).unwrap().jet_norm;
        prop_assert!(close(ncf, c.abs() * nf), "{} vs {}", ncf, c.abs() * nf);
        prop_assert!(nsum <= (nf + ng) * (1.0 + 1e-12));
    }

    #[test]
    fn compression_is_small_monotone_and_one_lipschitz(
        values in prop::collection::vec(-3.0f64..3.0, 1..40), eps in 0.01f64..1.0,
    ) {
        let intervals = cover_values(&values, eps).unwrap();
        prop_assert!(intervals.windows(2).all(|w| w[0].1 < w[1].0));
        prop_assert!(values.iter().all(|&v| intervals.iter().any(|&(l, r)| l < v && v < r)));
        let eta = compression_map(&intervals).unwrap();
        prop_assert!(eta.sup() <= eps);
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        for w in sorted.windows(2) {
            let (s, t) = (eta.eval(w[0]), eta.eval(w[1]));
            prop_assert!(s <= t);
            prop_assert!(t - s <= (w[1] - w[0]) * (1.0 + 1e-12) + 1e-15);
        }
        for &v in &values {
            prop_assert!(eta.eval(v).abs() <= eps);
        }
    }

    #[test]
    fn compression_never_raises_the_maximal_function(
        seed in 0u64..1000, eps in 0.05f64..0.5, x in -0.9f64..0.9, y in -0.9f64..0.9,
    ) {
        let k = two_disk_set(32, 0.1);
        let f0: Vec<f64> = TrigSum::random(seed, 2, 3.0).jet(&k, 0).values[0].clone();
        let jet = Jet::from_values(1, k.sample_points(), f0.clone()).unwrap();
        let eta = compression_map(&cover_values(&f0, eps).unwrap()).unwrap();
        let small = compress_jet(&jet, &eta).unwrap();
        let before = shvartsman_maximal(&jet, 1, [x, y]).unwrap();
        let after = shvartsman_maximal(&small, 1, [x, y]).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-12) + 1e-15, "{} > {}", after, before);
    }

    #[test]
    fn grid_norms_are_homogeneous_and_subadditive(
        a in 0u64..1000, b in 0u64..1000, c in -4.0f64..4.0, m in 0u32..=2, p in 1.0f64..4.0,
    ) {
        let g = unit_grid(32);
        let f = TrigSum::random(a, 3, 4.0).field(g);
        let h = TrigSum::random(b, 3, 4.0).field(g);
        let fh = add(&f, &h);
        let cf = scaled(&f, c);
        let (nf, nh) = (cm_norm(&f, m, None).unwrap(), cm_norm(&h, m, None).unwrap());
        prop_assert!(close(cm_norm(&cf, m, None).unwrap(), c.abs() * nf));
        prop_assert!(cm_norm(&fh, m, None).unwrap() <= (nf + nh) * (1.0 + 1e-12));
        let (wf, wh) = (wmp_norm(&f, m, p, None).unwrap(), wmp_norm(&h, m, p, None).unwrap());
        let wcf = wmp_norm(&cf, m, p, None).unwrap();
        prop_assert!((wcf - c.abs() * wf).abs() <= 1e-10 * (1.0 + wcf));
        prop_assert!(wmp_norm(&fh, m, p, None).unwrap() <= (wf + wh) * (1.0 + 1e-10));
    }

    #[test]
    fn perp_gradient_is_divergence_free(seed in 0u64..1000, amp in 0.01f64..100.0, cells in 4usize..7) {
        let g = Grid::square(-1.0, 2.0, 1 << cells).unwrap();
        let psi = scaled(&TrigSum::random(seed, 4, 6.0).field(g), amp);
        prop_assert!(max_divergence(&perp_gradient(&psi)) <= 1e-12);
    }
}
