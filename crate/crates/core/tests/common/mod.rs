#![allow(dead_code)]

use multislope::decompose::certified_bound;
use multislope::optimal::euler_feasible_oracle;
use multislope::{Instance, Profile, Slope};
use rand::seq::SliceRandom;
use rand::Rng;

pub const E: f64 = std::f64::consts::E;

pub fn classical() -> Instance {
    Instance::normalize(&[Slope::new(0.0, 1.0), Slope::new(1.0, 0.0)]).unwrap()
}

pub fn inst(pairs: &[(f64, f64)]) -> Instance {
    Instance::normalize(&pairs.iter().map(|&(b, r)| Slope::new(b, r)).collect::<Vec<_>>()).unwrap()
}

/// Raw slope list for a random convex instance with `k` in `1..=8`, plus a
/// few dominated slopes, shuffled. Breakpoints are spread over roughly
/// `[0.2, 10]` and rents over `(0, 10]`; the last rent is 0 when
/// `last_rent_zero`.
pub fn random_raw<R: Rng>(rng: &mut R, last_rent_zero: bool) -> Vec<Slope> {
    let k = rng.gen_range(1..=8);
    // build rents upward from r_k so they stay strictly decreasing in (0, 10]
    let mut rents = vec![if last_rent_zero { 0.0 } else { rng.gen_range(0.1..2.0) }];
    for _ in 0..k {
        let next = rents.last().unwrap() + rng.gen_range(0.05..8.0 / k as f64);
        rents.push(next);
    }
    rents.reverse();
    let mut s: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..10.0)).collect();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for i in 1..k {
        if s[i] < s[i - 1] + 1e-3 {
            s[i] = s[i - 1] + 1e-3;
        }
    }
    let b0 = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..2.0) };
    let mut slopes = vec![Slope::new(b0, rents[0])];
    for i in 1..=k {
        let b = slopes[i - 1].buy + s[i - 1] * (rents[i - 1] - rents[i]);
        slopes.push(Slope::new(b, rents[i]));
    }
    let extra = rng.gen_range(0..=2);
    for _ in 0..extra {
        let j = rng.gen_range(0..=k);
        let base = slopes[j];
        slopes.push(Slope::new(base.buy + rng.gen_range(0.0..1.0), base.rent + rng.gen_range(0.0..1.0)));
    }
    slopes.shuffle(rng);
    slopes
}

pub fn random_instance<R: Rng>(rng: &mut R, last_rent_zero: bool) -> Instance {
    Instance::normalize(&random_raw(rng, last_rent_zero)).unwrap()
}

/// `B(t) + int_0^t R` with the integral done by the trapezoid rule on
/// `steps` points per piece between profile breakpoints.
pub fn trapezoid_total(profile: &Profile, t: f64, steps: usize) -> f64 {
    let mut knots: Vec<f64> = profile.breakpoints().into_iter().filter(|&x| x < t).collect();
    knots.push(t);
    let mut integral = 0.0;
    for w in knots.windows(2) {
        let h = (w[1] - w[0]) / steps as f64;
        if h <= 0.0 {
            continue;
        }
        // evaluate strictly inside the piece so one-sided values are used
        let inner = |x: f64| x.clamp(w[0] + h * 1e-9, w[1] - h * 1e-9);
        let f = |x: f64| profile.rent_rate(inner(x)).unwrap();
        let mut acc = 0.5 * (f(w[0]) + f(w[1]));
        for m in 1..steps {
            acc += f(w[0] + h * m as f64);
        }
        integral += acc * h;
    }
    profile.buy_cost(t).unwrap() + integral
}

/// Bisection on the forward-Euler oracle alone.
pub fn oracle_bisection(inst: &Instance, eps: f64, step: f64) -> f64 {
    if euler_feasible_oracle(inst, 1.0, step).unwrap().is_feasible() {
        return 1.0;
    }
    let mut lo = 1.0;
    let mut hi = certified_bound(inst) + 1e-6;
    while !euler_feasible_oracle(inst, hi, step).unwrap().is_feasible() {
        hi += 1e-3;
    }
    while hi - lo > eps {
        let mid = 0.5 * (lo + hi);
        if euler_feasible_oracle(inst, mid, step).unwrap().is_feasible() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
