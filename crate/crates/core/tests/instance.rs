mod common;

use common::{inst, random_instance, random_raw};
use multislope::instance::{DropReason, InstanceFile};
use multislope::{Error, Instance, InstanceF32, Slope};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn dominated_and_hidden_slopes_are_dropped() {
    let raw = [
        Slope::new(0.0, 3.0),
        Slope::new(2.0, 3.5),
        Slope::new(5.0, 0.0),
        Slope::new(3.0, 2.5),
        Slope::new(1.0, 1.0),
    ];
    let norm = Instance::normalize_with_report(&raw).unwrap();
    let pairs: Vec<(f64, f64)> = norm.instance.slopes().iter().map(|s| (s.buy, s.rent)).collect();
    assert_eq!(pairs, vec![(0.0, 3.0), (1.0, 1.0), (5.0, 0.0)]);
    let reasons: Vec<(usize, DropReason)> = norm.dropped.iter().map(|d| (d.index, d.reason)).collect();
    assert!(reasons.contains(&(1, DropReason::DominatedBy(0))));
    assert!(reasons.contains(&(3, DropReason::DominatedBy(4))));
    assert_eq!(norm.instance.intersections(), &[0.0, 0.5, 4.0]);
}

#[test]
fn malformed_inputs_are_rejected() {
    assert!(matches!(Instance::<f64>::normalize(&[]), Err(Error::InvalidInstance(_))));
    assert!(matches!(
        Instance::normalize(&[Slope::new(-1.0, 1.0)]),
        Err(Error::InvalidInstance(_))
    ));
    assert!(matches!(
        Instance::normalize(&[Slope::new(f64::NAN, 1.0)]),
        Err(Error::InvalidInstance(_))
    ));
    assert!(matches!(Instance::<f64>::from_json_str("{\"slopes\": [}"), Err(Error::Parse(_))));
    assert!(matches!(
        Instance::<f64>::from_json_str("{\"slopes\": []}"),
        Err(Error::InvalidInstance(_))
    ));
}

#[test]
fn json_round_trip() {
    let i = inst(&[(0.0, 3.0), (1.0, 1.0), (3.0, 0.0)]);
    let text = serde_json::to_string(&i).unwrap();
    let file: InstanceFile = serde_json::from_str(&text).unwrap();
    assert_eq!(file.slopes.len(), 3);
    let back: Instance = serde_json::from_str(&text).unwrap();
    assert_eq!(back, i);
}

#[test]
fn opt_examples() {
    let i = inst(&[(0.0, 3.0), (1.0, 1.0), (3.0, 0.0)]);
    assert_eq!(i.opt_cost(0.25).unwrap(), 0.75);
    assert_eq!(i.opt_cost(1.0).unwrap(), 2.0);
    assert_eq!(i.opt_cost(10.0).unwrap(), 3.0);
    assert_eq!(i.opt_slope(0.5).unwrap(), 1);
    assert_eq!(i.opt_slope_tie_low(0.5).unwrap(), 0);
    assert!(matches!(i.opt_cost(-1.0), Err(Error::Domain(_))));
    assert!(matches!(i.opt_inverse(3.5), Err(Error::UnreachableBudget { .. })));
    assert_eq!(i.opt_inverse(2.0).unwrap(), 1.0);
}

#[test]
fn single_precision_instance() {
    let i: InstanceF32 = Instance::normalize(&[Slope::new(0.0f32, 1.0), Slope::new(1.0, 0.0)]).unwrap();
    assert_eq!(i.opt_cost(0.5).unwrap(), 0.5f32);
    assert_eq!(i.intersections(), &[0.0f32, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>(), zero in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let once = Instance::normalize(&random_raw(&mut rng, zero)).unwrap();
        let twice = Instance::normalize(once.slopes()).unwrap();
        prop_assert_eq!(&once, &twice);
        let s = once.intersections();
        prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn opt_is_lower_envelope(seed in any::<u64>(), t in 0.0f64..40.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = random_raw(&mut rng, false);
        let i = Instance::normalize(&raw).unwrap();
        let env = raw.iter().map(|s| s.buy + s.rent * t).fold(f64::INFINITY, f64::min);
        prop_assert!((i.opt_cost(t).unwrap() - env).abs() <= 1e-12 * env.max(1.0));
    }

    #[test]
    fn opt_inverse_round_trip(seed in any::<u64>(), frac in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_instance(&mut rng, true);
        let lo = i.buy(0);
        let hi = i.buy(i.k());
        let budget = lo + (hi - lo) * frac;
        let t = i.opt_inverse(budget).unwrap();
        prop_assert!((i.opt_cost(t).unwrap() - budget).abs() <= 1e-12 * budget.max(1.0));
    }

    #[test]
    fn opt_slope_is_monotone(seed in any::<u64>(), a in 0.0f64..30.0, b in 0.0f64..30.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_instance(&mut rng, true);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(i.opt_slope(lo).unwrap() <= i.opt_slope(hi).unwrap());
        prop_assert!(i.opt_slope_tie_low(lo).unwrap() <= i.opt_slope_tie_low(hi).unwrap());
    }
}
