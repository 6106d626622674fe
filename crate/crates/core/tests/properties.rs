use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shellflow::blocktri::{dense_oracle, solve_schur, solve_thomas, BVec, Block, BlockTriSystem, Partition, NB};
use shellflow::grid::{interpolate, l2_norm, Field, Location, MacGrid, ShellSector};
use shellflow::operators::{stress_from_gradient, viscous_heating};
use shellflow::thermo::{eos_density, eos_temperature, exner, potential_temperature, temperature_from_theta, GasParams};
use shellflow::grid::FieldSet;
use shellflow::verification::{observed_order, tcr};

fn random_system(rng: &mut ChaCha8Rng, n: usize) -> BlockTriSystem {
    let mut sys = BlockTriSystem::zeros(n);
    let block = |rng: &mut ChaCha8Rng| -> Block { std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))) };
    for i in 0..n {
        sys.lower[i] = block(rng);
        sys.upper[i] = block(rng);
        let mut d = block(rng);
        for (r, row) in d.iter_mut().enumerate() {
            row[r] += 12.0;
        }
        sys.diag[i] = d;
        sys.rhs[i] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    }
    sys
}

fn max_diff(a: &[BVec], b: &[BVec]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| (0..NB).map(move |k| (x[k] - y[k]).abs()))
        .fold(0.0, f64::max)
}

fn sector() -> ShellSector {
    ShellSector::new([1.0, 2.0], [0.6, 2.2], [0.0, 1.5]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thomas_matches_dense(seed in any::<u64>(), n in 1usize..40) {
        let sys = random_system(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let x = solve_thomas(&sys).unwrap();
        let d = dense_oracle(&sys).unwrap();
        prop_assert!(max_diff(&x, &d) < 1e-10);
    }

    #[test]
    fn schur_is_partition_invariant(seed in any::<u64>(), n in 4usize..60, segs in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n);
        let segs = segs.min(n / 2);
        let mut lengths = vec![1usize; segs];
        for _ in 0..n - segs {
            let k = rng.gen_range(0..segs);
            lengths[k] += 1;
        }
        let a = solve_schur(&sys, &Partition::from_lengths(&lengths).unwrap()).unwrap();
        let b = solve_thomas(&sys).unwrap();
        let scale = b.iter().flat_map(|v| v.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_diff(&a, &b) <= 1e-10 * scale);
    }

    #[test]
    fn thomas_is_linear_in_rhs(seed in any::<u64>(), n in 1usize..30, alpha in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n);
        let mut other = sys.clone();
        for b in other.rhs.iter_mut() {
            *b = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        }
        let mut comb = sys.clone();
        for (c, (a, b)) in comb.rhs.iter_mut().zip(sys.rhs.iter().zip(&other.rhs)) {
            *c = std::array::from_fn(|k| a[k] + alpha * b[k]);
        }
        let xa = solve_thomas(&sys).unwrap();
        let xb = solve_thomas(&other).unwrap();
        let xc = solve_thomas(&comb).unwrap();
        let lin: Vec<BVec> = xa.iter().zip(&xb).map(|(a, b)| std::array::from_fn(|k| a[k] + alpha * b[k])).collect();
        prop_assert!(max_diff(&xc, &lin) < 1e-11);
    }

    #[test]
    fn eos_round_trip(p in 1e2f64..1e6, t in 50.0f64..2000.0, pi_inf in 0.0f64..1e5) {
        let gas = GasParams::new(1000.0, 713.0, 1e-5, 0.71, pi_inf).unwrap();
        let rho = eos_density(&gas, p, t).unwrap();
        let back = eos_temperature(&gas, p, rho).unwrap();
        prop_assert!((back - t).abs() <= 1e-12 * t);
    }

    #[test]
    fn potential_temperature_round_trip(p in 1e4f64..1.2e5, theta in 250.0f64..400.0) {
        let gas = GasParams::dry_air();
        let t = temperature_from_theta(&gas, p, theta, 1e5);
        prop_assert!((t - theta * exner(&gas, p, 1e5)).abs() < 1e-9 * t);
        prop_assert!((potential_temperature(&gas, p, t, 1e5) - theta).abs() < 1e-9 * theta);
    }

    #[test]
    fn stress_is_traceless(g in proptest::array::uniform3(proptest::array::uniform3(-5.0f64..5.0)), mu in 0.0f64..3.0) {
        let s = stress_from_gradient(mu, &g);
        // 2 mu sym(g) - (2/3) mu tr(g) I has zero trace.
        prop_assert!((s[0] + s[1] + s[2]).abs() < 1e-10 * (1.0 + mu * 15.0));
    }

    #[test]
    fn interpolation_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let grid = MacGrid::new(sector(), 4, 5, 6).unwrap();
        let f = Field::from_fn(&grid, Location::RFace, |r, t, p| (r * t).sin() + p);
        let g = Field::from_fn(&grid, Location::RFace, |r, t, p| r * r - t * p.cos());
        let mut h = f.clone();
        h.scale(a);
        h.axpy(b, &g);
        for to in [Location::Center, Location::ThetaFace, Location::PhiFace] {
            let mut lin = interpolate(&f, &grid, to);
            lin.scale(a);
            lin.axpy(b, &interpolate(&g, &grid, to));
            let direct = interpolate(&h, &grid, to);
            let worst = direct.interior_values().zip(lin.interior_values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(worst < 1e-12);
        }
    }

    #[test]
    fn l2_norm_is_absolutely_homogeneous(a in -1e3f64..1e3) {
        let grid = MacGrid::new(sector(), 3, 4, 5).unwrap();
        let f = Field::from_fn(&grid, Location::Center, |r, t, p| r.sin() + t * p);
        let mut g = f.clone();
        g.scale(a);
        let (nf, ng) = (l2_norm(&f, &grid), l2_norm(&g, &grid));
        prop_assert!((ng - a.abs() * nf).abs() <= 1e-12 * (1.0 + ng));
    }

    #[test]
    fn viscous_heating_is_non_negative(seed in any::<u64>(), mu in 0.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = MacGrid::new(sector(), 4, 4, 4).unwrap();
        let gas = GasParams::from_gamma(1.4, 1.0, mu, 1.0, 0.0).unwrap();
        let mut s = FieldSet::zeros(&grid);
        for f in s.fields.iter_mut() {
            for x in f.data.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        let h = viscous_heating(&s, &grid, &gas);
        prop_assert!(h.interior_values().all(|v| v >= -1e-12));
    }

    #[test]
    fn tcr_of_power_law_recovers_exponent(c in 0.01f64..100.0, q in 1u32..4, tau in 1e-4f64..1e-1) {
        let e = |t: f64| c * t.powi(q as i32);
        // Solution differences of an error C tau^q are proportional to C tau^q (1 - 2^-q).
        let coarse = e(tau) - e(tau / 2.0);
        let fine = e(tau / 2.0) - e(tau / 4.0);
        let r = tcr(coarse, fine).unwrap();
        prop_assert!((r - q as f64).abs() < 1e-9);
    }
}

#[test]
fn tcr_edge_cases() {
    assert_eq!(tcr(1.0, 0.0), None);
    assert_eq!(tcr(0.0, 1.0), Some(f64::NEG_INFINITY));
}

#[test]
fn observed_order_of_quadratic_errors_is_two() {
    assert!((observed_order(4e-2, 1e-2, 0.2, 0.1) - 2.0).abs() < 1e-12);
}
