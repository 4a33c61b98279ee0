//! The `e/(e-1)` strategy: split an instance into classical rent-or-buy
//! instances, solve each with the classical randomized profile and stack
//! the results.
//!
//! With `r_k = 0`, sub-instance `i` rents at `r_{i-1} - r_i` or buys for
//! `b_i - b_{i-1}`; its break-even time is exactly `s_i` and the offline
//! costs of the sub-instances add up to `OPT`. The combined profile has
//! tail sums `P_i = p^i_1`, which is nonincreasing in `i` because the
//! break-even times are nondecreasing.

use crate::error::{Error, Result};
use crate::instance::{Instance, Slope};
use crate::profile::{ExpPiece, Profile};
use crate::scalar::Scalar;

/// The classical profile `p_1(t) = (exp(t / s) - 1) / (e - 1)` for a
/// two-slope instance with break-even time `s`, clamped to 1 from `s` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalProfile<T> {
    pub break_even: T,
}

impl<T: Scalar> ClassicalProfile<T> {
    /// Probability of having bought by time `t`.
    pub fn buy_probability(&self, t: T) -> T {
        if t >= self.break_even {
            T::one()
        } else {
            let v = (t / self.break_even).exp_m1() / (T::E() - T::one());
            v.max(T::zero()).min(T::one())
        }
    }

    pub fn pieces(&self) -> Vec<ExpPiece<T>> {
        let scale = T::one() / (T::E() - T::one());
        vec![
            ExpPiece {
                t0: T::zero(),
                t1: self.break_even,
                a: -scale,
                amp: scale,
                rate: T::one() / self.break_even,
            },
            ExpPiece::constant(self.break_even, T::infinity(), T::one()),
        ]
    }

    /// The same curve as a profile of its own two-slope instance.
    pub fn profile(&self, sub: &Instance<T>) -> Result<Profile<T>> {
        Profile::from_tails(sub.clone(), vec![self.pieces()])
    }
}

/// Splits an instance with `r_k = 0` into `k` two-slope instances
/// `[(0, r_{i-1} - r_i), (b_i - b_{i-1}, 0)]`.
pub fn split<T: Scalar>(inst: &Instance<T>) -> Result<Vec<Instance<T>>> {
    let k = inst.k();
    if k == 0 {
        return Err(Error::Precondition("split needs at least two slopes".into()));
    }
    if inst.rent(k) != T::zero() {
        return Err(Error::Precondition(format!(
            "split needs r_k = 0, got {}; reduce rents first",
            inst.rent(k)
        )));
    }
    (1..=k)
        .map(|i| {
            Instance::from_sorted(vec![
                Slope::new(T::zero(), inst.rent(i - 1) - inst.rent(i)),
                Slope::new(inst.buy(i) - inst.buy(i - 1), T::zero()),
            ])
        })
        .collect()
}

pub fn classical_profile<T: Scalar>(sub: &Instance<T>) -> Result<ClassicalProfile<T>> {
    if sub.k() != 1 || sub.buy(0) != T::zero() || sub.rent(1) != T::zero() {
        return Err(Error::Precondition(
            "classical profile needs an instance [(0, r), (b, 0)]".into(),
        ));
    }
    Ok(ClassicalProfile {
        break_even: sub.buy(1) / sub.rent(0),
    })
}

/// Stacks classical profiles into a profile of `inst` with `P_i = p^i_1`,
/// i.e. `p_0 = 1 - p^1_1`, `p_i = p^i_1 - p^{i+1}_1`, `p_k = p^k_1`.
pub fn combine<T: Scalar>(inst: &Instance<T>, parts: &[ClassicalProfile<T>]) -> Result<Profile<T>> {
    if parts.len() != inst.k() {
        return Err(Error::Precondition(format!(
            "expected {} classical profiles, got {}",
            inst.k(),
            parts.len()
        )));
    }
    if let Some(i) = (1..parts.len()).find(|&i| parts[i].break_even < parts[i - 1].break_even) {
        return Err(Error::Internal(format!(
            "classical profile {} overtakes profile {}",
            i + 1,
            i
        )));
    }
    Profile::from_tails(inst.clone(), parts.iter().map(|p| p.pieces()).collect())
}

/// `(instance with r'_i = r_i - r_k, r_k)`.
pub fn reduce_rents<T: Scalar>(inst: &Instance<T>) -> Result<(Instance<T>, T)> {
    if inst.k() == 0 {
        return Err(Error::Precondition("rent reduction needs at least two slopes".into()));
    }
    Ok((inst.shifted_rents(), inst.rent(inst.k())))
}

/// `e/(e-1)` when `r_k = 0`, `(e - r_k/r_0)/(e - 1)` otherwise, 1 for a
/// single slope.
pub fn certified_bound<T: Scalar>(inst: &Instance<T>) -> T {
    let k = inst.k();
    if k == 0 {
        return T::one();
    }
    let e = T::E();
    (e - inst.rent(k) / inst.rent(0)) / (e - T::one())
}

#[derive(Debug, Clone)]
pub struct Decomposition<T: Scalar> {
    pub profile: Profile<T>,
    pub bound: T,
    /// Rent removed before splitting.
    pub shift: T,
    pub parts: Vec<ClassicalProfile<T>>,
}

pub fn solve_decompose<T: Scalar>(inst: &Instance<T>) -> Result<Decomposition<T>> {
    if inst.k() == 0 {
        return Ok(Decomposition {
            profile: Profile::constant(inst.clone(), 0)?,
            bound: T::one(),
            shift: T::zero(),
            parts: Vec::new(),
        });
    }
    let (reduced, shift) = reduce_rents(inst)?;
    let parts = split(&reduced)?
        .iter()
        .map(classical_profile)
        .collect::<Result<Vec<_>>>()?;
    // The tails do not depend on the rent shift, so the profile is built
    // against the original instance directly.
    let profile = combine(inst, &parts)?;
    Ok(Decomposition {
        profile,
        bound: certified_bound(inst),
        shift,
        parts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: f64 = std::f64::consts::E;

    fn inst(pairs: &[(f64, f64)]) -> Instance<f64> {
        Instance::normalize(&pairs.iter().map(|&(b, r)| Slope::new(b, r)).collect::<Vec<_>>()).unwrap()
    }

    fn pairs(i: &Instance<f64>) -> Vec<(f64, f64)> {
        i.slopes().iter().map(|s| (s.buy, s.rent)).collect()
    }

    #[test]
    fn split_examples() {
        let c = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(split(&c).unwrap(), vec![c.clone()]);

        let subs = split(&inst(&[(0.0, 2.0), (2.0, 1.0), (4.0, 0.0)])).unwrap();
        assert_eq!(pairs(&subs[0]), vec![(0.0, 1.0), (2.0, 0.0)]);
        assert_eq!(pairs(&subs[1]), vec![(0.0, 1.0), (2.0, 0.0)]);

        let orig = inst(&[(0.0, 3.0), (1.0, 1.0), (3.0, 0.0)]);
        let subs = split(&orig).unwrap();
        assert_eq!(pairs(&subs[0]), vec![(0.0, 2.0), (1.0, 0.0)]);
        assert_eq!(pairs(&subs[1]), vec![(0.0, 1.0), (2.0, 0.0)]);
        assert_eq!(subs[0].intersections()[1], 0.5);
        assert_eq!(subs[1].intersections()[1], 2.0);
        assert_eq!(orig.intersections(), &[0.0, 0.5, 2.0]);

        assert!(matches!(split(&inst(&[(0.0, 2.0), (1.0, 1.0)])), Err(Error::Precondition(_))));
    }

    #[test]
    fn classical_profile_examples() {
        let c = classical_profile(&inst(&[(0.0, 1.0), (1.0, 0.0)])).unwrap();
        for t in [0.0, 0.3, 0.7] {
            assert!((c.buy_probability(t) - (t.exp() - 1.0) / (E - 1.0)).abs() < 1e-15);
        }
        assert_eq!(c.buy_probability(1.0), 1.0);
        let half = classical_profile(&inst(&[(0.0, 1.0), (2.0, 0.0)])).unwrap();
        assert!((half.buy_probability(1.0) - (0.5f64.exp() - 1.0) / (E - 1.0)).abs() < 1e-15);
        assert_eq!(half.buy_probability(2.0), 1.0);
        assert!(half.buy_probability(1.999_999) < 1.0);
    }

    #[test]
    fn combine_examples() {
        let c = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        let d = solve_decompose(&c).unwrap();
        let p = d.profile.eval(0.4).unwrap();
        let p1 = (0.4f64.exp() - 1.0) / (E - 1.0);
        assert!((p[0] - (1.0 - p1)).abs() < 1e-15 && (p[1] - p1).abs() < 1e-15);

        // equal break-even times: the middle slope is never used
        let three = inst(&[(0.0, 2.0), (2.0, 1.0), (4.0, 0.0)]);
        let d = solve_decompose(&three).unwrap();
        for t in [0.0, 0.5, 1.0, 1.9, 2.0, 5.0] {
            let p = d.profile.eval(t).unwrap();
            assert_eq!(p[1], 0.0);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }

        let bad = [ClassicalProfile { break_even: 2.0 }, ClassicalProfile { break_even: 1.0 }];
        assert!(matches!(combine(&three, &bad), Err(Error::Internal(_))));
    }

    #[test]
    fn reduce_and_bounds() {
        let (reduced, shift) = reduce_rents(&inst(&[(0.0, 2.0), (1.0, 1.0)])).unwrap();
        assert_eq!(pairs(&reduced), vec![(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(shift, 1.0);

        let classical = solve_decompose(&inst(&[(0.0, 1.0), (1.0, 0.0)])).unwrap();
        assert!((classical.bound - 1.581_976_706_869_326_5).abs() < 1e-15);
        let single = solve_decompose(&inst(&[(3.0, 1.0)])).unwrap();
        assert_eq!(single.bound, 1.0);
        let shifted = solve_decompose(&inst(&[(0.0, 2.0), (1.0, 1.0)])).unwrap();
        assert!((shifted.bound - (E - 0.5) / (E - 1.0)).abs() < 1e-15);
        assert!((shifted.bound - 1.2910).abs() < 1e-4);
    }

    #[test]
    fn shifted_instance_costs_add_rent() {
        let orig = inst(&[(0.0, 2.0), (1.0, 1.0)]);
        let d = solve_decompose(&orig).unwrap();
        let (reduced, shift) = reduce_rents(&orig).unwrap();
        let on_reduced = combine(&reduced, &d.parts).unwrap();
        for t in [0.2, 0.9, 1.0, 3.0] {
            let x = d.profile.total_cost(t).unwrap();
            let x_red = on_reduced.total_cost(t).unwrap();
            assert!((x - (x_red + shift * t)).abs() < 1e-13);
        }
    }
}
