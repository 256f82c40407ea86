use std::f64::consts::PI;

use paracalc::anderson::{symmetry_defect, ApplyMode};
use paracalc::io::{read_field, read_time_field, write_field, write_time_field, Provenance};
use paracalc::ops::{duhamel_j, heat_propagate, TimeField};
use paracalc::spectral::lp_decompose_with;
use paracalc::stochastic::{
    band_limited, derive_seed, enhance_gpam, mollify, sample_white_noise, GpamEnhancement, Mollifier,
};
use paracalc::{Field, Paracalc, Partition, TorusGrid};
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = TorusGrid> {
    (1usize..=2, 5u32..=6).prop_map(|(d, p)| TorusGrid::new(d, 1 << p).unwrap())
}

fn partition_strategy() -> impl Strategy<Value = Partition> {
    prop_oneof![Just(Partition::Sharp), Just(Partition::Smooth)]
}

fn scale(f: &Field) -> f64 {
    f.sup_norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn blocks_sum_to_the_field(grid in grid_strategy(), seed in any::<u64>(), p in partition_strategy()) {
        let f = sample_white_noise(grid, seed);
        let d = lp_decompose_with(&f, p);
        prop_assert!(d.reconstruct().try_sub(&f).unwrap().sup_norm() <= 1e-12 * scale(&f));
        let partial = d.partial_sum(d.i_max());
        prop_assert!(partial.try_sub(&f).unwrap().sup_norm() <= 1e-12 * scale(&f));
    }

    #[test]
    fn sharp_blocks_are_orthogonal(grid in grid_strategy(), seed in any::<u64>()) {
        let f = sample_white_noise(grid, seed);
        let d = lp_decompose_with(&f, Partition::Sharp);
        let b = d.blocks();
        let norm = f.l2_norm().powi(2);
        for i in 0..b.len() {
            for j in (i + 1)..b.len() {
                prop_assert!(b[i].inner(&b[j]).unwrap().abs() <= 1e-12 * norm);
            }
        }
    }

    #[test]
    fn product_splits_into_three_terms(
        grid in grid_strategy(),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        p in partition_strategy(),
    ) {
        let pc = Paracalc::new(p);
        let f = sample_white_noise(grid, s1);
        let g = sample_white_noise(grid, s2);
        let parts = pc.paraproducts(&f, &g).unwrap();
        let sum = parts.less.try_add(&parts.resonant).unwrap().try_add(&parts.greater).unwrap();
        let fg = f.try_mul(&g).unwrap();
        prop_assert!(sum.try_sub(&fg).unwrap().sup_norm() <= 1e-10 * scale(&fg));
        // f > g is g < f, and the resonant term is symmetric.
        let swapped = pc.para_less(&g, &f).unwrap();
        prop_assert!(swapped.try_sub(&parts.greater).unwrap().sup_norm() <= 1e-12 * scale(&fg));
        let res = pc.resonant(&g, &f).unwrap();
        prop_assert!(res.try_sub(&parts.resonant).unwrap().sup_norm() <= 1e-10 * scale(&fg));
    }

    #[test]
    fn para_less_is_bilinear(grid in grid_strategy(), s in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let pc = Paracalc::default();
        let f1 = band_limited(grid, 8, s);
        let f2 = band_limited(grid, 8, s ^ 1);
        let g = band_limited(grid, 12, s ^ 2);
        let mut lin = f1.scale(a);
        lin.axpy(b, &f2).unwrap();
        let lhs = pc.para_less(&lin, &g).unwrap();
        let mut rhs = pc.para_less(&f1, &g).unwrap().scale(a);
        rhs.axpy(b, &pc.para_less(&f2, &g).unwrap()).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().sup_norm() <= 1e-11 * scale(&lhs));
    }

    #[test]
    fn commutator_c_on_constants(grid in grid_strategy(), s in any::<u64>(), c in -2.0f64..2.0) {
        // f < g = c (g - Delta_{-1} g - Delta_0 g) for constant f, so C(c, g, h) = -c (Delta_{-1} g + Delta_0 g) o h.
        let pc = Paracalc::default();
        let g = band_limited(grid, 10, s);
        let h = band_limited(grid, 10, s ^ 7);
        let out = pc.commutator_c(&Field::constant(grid, c), &g, &h).unwrap();
        let d = pc.decompose(&g);
        let low = d.block(-1).try_add(&d.block(0)).unwrap();
        let want = pc.resonant(&low, &h).unwrap().scale(-c);
        prop_assert!(out.try_sub(&want).unwrap().sup_norm() <= 1e-10 * scale(&g) * scale(&h));
    }

    #[test]
    fn mollifiers_preserve_the_mean(grid in grid_strategy(), s in any::<u64>(), eps in 0.01f64..0.5) {
        let f = sample_white_noise(grid, s);
        for k in [Mollifier::Gaussian, Mollifier::Fejer] {
            let m = mollify(&f, eps, k);
            prop_assert!((m.mean() - f.mean()).abs() <= 1e-12 * scale(&f));
            prop_assert!(m.l2_norm() <= f.l2_norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn heat_flow_is_a_semigroup(grid in grid_strategy(), seed in any::<u64>(), s in 0.0f64..0.01, t in 0.0f64..0.01) {
        let f = band_limited(grid, 10, seed);
        let two = heat_propagate(&heat_propagate(&f, s, 1.0), t, 1.0);
        let one = heat_propagate(&f, s + t, 1.0);
        prop_assert!(two.try_sub(&one).unwrap().sup_norm() <= 1e-12 * scale(&f));
    }

    #[test]
    fn translations_compose(s in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let grid = TorusGrid::new(2, 32).unwrap();
        let e = GpamEnhancement::from_noise(&Paracalc::default(), band_limited(grid, 6, s), 0.0).unwrap();
        let ab = e.translate(a).translate(b);
        let once = e.translate(a + b);
        prop_assert!(ab.resonant.try_sub(&once.resonant).unwrap().sup_norm() <= 1e-12 * scale(&once.resonant));
        prop_assert_eq!(ab.x, e.x);
    }

    #[test]
    fn anderson_operator_is_symmetric(s in any::<u64>()) {
        let grid = TorusGrid::new(2, 32).unwrap();
        let pc = Paracalc::default();
        let e = enhance_gpam(grid, 0.25, Mollifier::Gaussian, s).unwrap();
        let u = band_limited(grid, 6, derive_seed(s, 1));
        let v = band_limited(grid, 6, derive_seed(s, 2));
        for mode in [ApplyMode::Classical, ApplyMode::Paracontrolled] {
            prop_assert!(symmetry_defect(&pc, &e, &u, &v, mode).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn field_files_round_trip_bitwise(grid in grid_strategy(), s in any::<u64>()) {
        let dir = std::env::temp_dir().join(format!("paracalc-prop-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("f{s}.pfld"));
        let f = sample_white_noise(grid, s);
        write_field(&path, &f, Provenance { seed: Some(s), ..Provenance::default() }).unwrap();
        let back = read_field(&path).unwrap();
        prop_assert!(back.data().iter().zip(f.data()).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back.grid(), f.grid());

        let tf = TimeField::from_fn(grid, TimeField::uniform_times(0.1, 3), |t| f.scale(t)).unwrap();
        let tpath = dir.join(format!("t{s}.pfld"));
        write_time_field(&tpath, &tf, Provenance::default()).unwrap();
        let tb = read_time_field(&tpath).unwrap();
        prop_assert_eq!(tb.times, tf.times);
        prop_assert_eq!(tb.frames, tf.frames);
    }

    #[test]
    fn derived_seeds_are_distinct(m in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(derive_seed(m, i), derive_seed(m, j));
        prop_assert_eq!(derive_seed(m, i), derive_seed(m, i));
    }
}

#[test]
fn duhamel_of_a_constant_source_is_exact() {
    // For v(t) = e_k the mild solution is (1 - exp(-lambda t)) / lambda e_k with lambda = 4 pi^2 |k|^2.
    let grid = TorusGrid::new(1, 32).unwrap();
    let times = TimeField::uniform_times(0.01, 20);
    for k in [0i64, 1, 3] {
        let e = Field::mode(grid, [k, 0], 1.0, 0.0);
        let v = TimeField::constant_in_time(&e, times.clone()).unwrap();
        let w = duhamel_j(&v);
        let lambda = 4.0 * PI * PI * (k * k) as f64;
        for (t, frame) in w.times.iter().zip(&w.frames) {
            let factor = if k == 0 { *t } else { (1.0 - (-lambda * t).exp()) / lambda };
            assert!(frame.try_sub(&e.scale(factor)).unwrap().sup_norm() < 1e-13, "k = {k}, t = {t}");
        }
    }
}
