mod common;

use common::{inst, random_instance, E};
use multislope::decompose::{certified_bound, reduce_rents, solve_decompose, split};
use multislope::sim::{default_grid, run_exact};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sub_instance_optima_add_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let i = random_instance(&mut rng, true);
        let subs = split(&i).unwrap();
        assert_eq!(subs.len(), i.k());
        for t in default_grid(&i, 8, &[]).unwrap() {
            let sum: f64 = i.buy(0) + subs.iter().map(|s| s.opt_cost(t).unwrap()).sum::<f64>();
            let opt = i.opt_cost(t).unwrap();
            assert!((sum - opt).abs() <= 1e-12 * opt.max(1.0), "t={t}: {sum} vs {opt}");
        }
    }
}

#[test]
fn ratio_stays_below_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 0..60 {
        let i = random_instance(&mut rng, n % 3 != 0);
        let d = solve_decompose(&i).unwrap();
        let grid = default_grid(&i, 50, &d.profile.breakpoints()).unwrap();
        let report = run_exact(&d.profile, &grid).unwrap();
        assert!(report.max_ratio.unwrap() <= d.bound + 1e-9, "{:?} > {}", report.max_ratio, d.bound);
        assert!(d.profile.validate_structure().passed());
    }
}

#[test]
fn rent_reduction_sharpens_bound() {
    let i = inst(&[(0.0, 2.0), (1.0, 1.0)]);
    let (reduced, shift) = reduce_rents(&i).unwrap();
    assert_eq!(shift, 1.0);
    assert_eq!(reduced.rent(1), 0.0);
    assert!((certified_bound(&i) - (E - 0.5) / (E - 1.0)).abs() < 1e-15);
    assert!(certified_bound(&i) < certified_bound(&reduced));
}
