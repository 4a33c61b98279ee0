//! Randomized repeated doubling for the non-additive model, where entering
//! slope `j` always costs the full `b_j`.
//!
//! Budgets grow geometrically, `B_1 = OPT(s_1) / alpha^x` and
//! `B_{j+1} = alpha B_j` with `x` uniform in `[0, 1)`. Iteration `j` ends at
//! `tau_j = OPT^{-1}(B_j)` and occupies the slope that is offline-optimal
//! at `tau_j` (the lower one at a breakpoint). The expected ratio is at most
//! `alpha / ln(alpha)`, minimized to `e` at `alpha = e`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

/// An instance read under the full-price transition convention.
#[derive(Debug, Clone, PartialEq)]
pub struct NonAdditiveInstance<T: Scalar = f64> {
    base: Instance<T>,
}

impl<T: Scalar> NonAdditiveInstance<T> {
    pub fn new(base: Instance<T>) -> Self {
        NonAdditiveInstance { base }
    }

    pub fn base(&self) -> &Instance<T> {
        &self.base
    }

    /// Cost of moving into slope `j` from anywhere.
    pub fn entry_cost(&self, j: usize) -> T {
        self.base.buy(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iteration<T> {
    /// 1-based index `j` of the budget `B_j`.
    pub index: usize,
    pub budget: T,
    /// `tau_j`; infinite once the budget exceeds `b_k` with `r_k = 0`.
    pub end: T,
    pub slope: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoublingSchedule<T> {
    pub x: T,
    pub alpha: T,
    /// Iterations with a nonempty time span, in order; the first one starts
    /// at time 0 and the last one ends at or after the horizon.
    pub iterations: Vec<Iteration<T>>,
}

impl<T: Scalar> DoublingSchedule<T> {
    /// Position in `iterations` of the iteration running at `tau`, i.e.
    /// `tau` in `(tau_{j-1}, tau_j]`.
    pub fn iteration_at(&self, tau: T) -> Option<usize> {
        let n = self.iterations.partition_point(|it| it.end < tau);
        (n < self.iterations.len()).then_some(n)
    }

    pub fn covered_until(&self) -> T {
        self.iterations.last().map(|it| it.end).unwrap_or_else(T::zero)
    }
}

pub fn build_schedule<T: Scalar>(
    ninst: &NonAdditiveInstance<T>,
    x: T,
    alpha: T,
    horizon: T,
) -> Result<DoublingSchedule<T>> {
    if !(x >= T::zero() && x < T::one()) {
        return Err(Error::Domain(format!("x must lie in [0, 1), got {x}")));
    }
    if !(alpha > T::one()) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if horizon.is_nan() || horizon < T::zero() {
        return Err(Error::Domain(format!("horizon must be nonnegative, got {horizon}")));
    }
    let inst = &ninst.base;
    let k = inst.k();
    if k == 0 {
        return Ok(DoublingSchedule {
            x,
            alpha,
            iterations: vec![Iteration {
                index: 1,
                budget: T::infinity(),
                end: T::infinity(),
                slope: 0,
            }],
        });
    }

    let mut iterations: Vec<Iteration<T>> = Vec::new();
    let mut budget = inst.opt_at(inst.intersections()[1]) / alpha.powf(x);
    let mut index = 1;
    let mut last_end = T::zero();
    loop {
        let end = if budget < inst.buy(0) {
            T::zero()
        } else {
            match inst.opt_inverse(budget) {
                Ok(t) => t,
                Err(Error::UnreachableBudget { .. }) => T::infinity(),
                Err(e) => return Err(e),
            }
        };
        if end > last_end || (iterations.is_empty() && end.is_infinite()) {
            let slope = if end.is_finite() { inst.opt_slope_tie_low(end)? } else { k };
            iterations.push(Iteration {
                index,
                budget,
                end,
                slope,
            });
            last_end = end;
        }
        if !iterations.is_empty() && last_end >= horizon {
            break;
        }
        budget = budget * alpha;
        index += 1;
        if !budget.is_finite() {
            return Err(Error::Internal("budgets overflowed before reaching the horizon".into()));
        }
    }
    Ok(DoublingSchedule {
        x,
        alpha,
        iterations,
    })
}

/// Realized cost when the game stops at `tau`: each slope change pays the
/// full entry price, plus rent for the time spent in each slope. Staying in
/// the same slope across iterations does not pay again.
pub fn doubling_cost<T: Scalar>(
    ninst: &NonAdditiveInstance<T>,
    schedule: &DoublingSchedule<T>,
    tau: T,
) -> Result<T> {
    if tau.is_nan() || tau < T::zero() || tau > schedule.covered_until() {
        return Err(Error::Domain(format!(
            "stop time {tau} outside the schedule [0, {}]",
            schedule.covered_until()
        )));
    }
    let inst = &ninst.base;
    let mut cost = T::zero();
    let mut current: Option<usize> = None;
    let mut start = T::zero();
    for (n, it) in schedule.iterations.iter().enumerate() {
        if n > 0 && start >= tau {
            break;
        }
        if current != Some(it.slope) {
            cost = cost + ninst.entry_cost(it.slope);
            current = Some(it.slope);
        }
        let span = it.end.min(tau) - start;
        if span > T::zero() {
            cost = cost + inst.rent(it.slope) * span;
        }
        start = it.end;
    }
    Ok(cost)
}

/// `alpha / (alpha - 1) * B_m` for the iteration `m` running at `tau`: the
/// geometric-sum bound on the cost of a single draw.
pub fn per_draw_bound<T: Scalar>(schedule: &DoublingSchedule<T>, tau: T) -> Option<T> {
    let m = schedule.iteration_at(tau)?;
    let alpha = schedule.alpha;
    Some(alpha / (alpha - T::one()) * schedule.iterations[m].budget)
}

/// `alpha / ln(alpha)`.
pub fn expected_ratio_bound<T: Scalar>(alpha: T) -> T {
    alpha / alpha.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub samples: usize,
}

/// Monte-Carlo estimate of `E[cost(tau)] / OPT(tau)` over `x ~ U[0, 1)`.
pub fn expected_ratio_estimate<T: Scalar, R: Rng + ?Sized>(
    ninst: &NonAdditiveInstance<T>,
    alpha: T,
    tau: T,
    samples: usize,
    rng: &mut R,
) -> Result<RatioEstimate<T>> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let opt = ninst.base.opt_cost(tau)?;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..samples {
        let x = T::lit(rng.gen::<f64>());
        let schedule = build_schedule(ninst, x, alpha, tau)?;
        let cost = doubling_cost(ninst, &schedule, tau)?;
        let ratio = if opt > T::zero() {
            (cost / opt).as_f64()
        } else if cost == T::zero() {
            1.0
        } else {
            f64::INFINITY
        };
        sum += ratio;
        sum_sq += ratio * ratio;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RatioEstimate {
        mean: T::lit(mean),
        stderr: T::lit((var / n).sqrt()),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Slope;

    fn classical() -> NonAdditiveInstance<f64> {
        NonAdditiveInstance::new(Instance::normalize(&[Slope::new(0.0, 1.0), Slope::new(1.0, 0.0)]).unwrap())
    }

    #[test]
    fn classical_schedule_at_zero_offset() {
        let n = classical();
        let s = build_schedule(&n, 0.0, std::f64::consts::E, 2.0).unwrap();
        assert_eq!(s.iterations.len(), 2);
        assert_eq!(s.iterations[0].budget, 1.0);
        assert_eq!(s.iterations[0].end, 1.0);
        assert_eq!(s.iterations[0].slope, 0);
        assert_eq!(s.iterations[1].end, f64::INFINITY);
        assert_eq!(s.iterations[1].slope, 1);
        assert_eq!(doubling_cost(&n, &s, 2.0).unwrap(), 2.0);
        assert_eq!(doubling_cost(&n, &s, 0.6).unwrap(), 0.6);
    }

    #[test]
    fn tie_goes_to_lower_slope() {
        let inst = Instance::normalize(&[Slope::new(0.0, 2.0), Slope::new(2.0, 1.0), Slope::new(5.0, 0.0)]).unwrap();
        let n = NonAdditiveInstance::new(inst.clone());
        // budgets 4, 5: the second lands exactly on OPT(s_2) = 5
        let s = build_schedule(&n, 0.0, 1.25, 10.0).unwrap();
        assert_eq!(s.iterations[1].budget, 5.0);
        assert_eq!(s.iterations[1].end, 3.0);
        assert_eq!(s.iterations[1].slope, 1);
        assert_eq!(inst.opt_slope(3.0).unwrap(), 2);
    }

    #[test]
    fn early_stop_is_optimal() {
        let n = classical();
        let s = build_schedule(&n, 0.7, 2.0, 0.3).unwrap();
        let tau = 0.3;
        assert!(tau < s.iterations[0].end);
        assert_eq!(doubling_cost(&n, &s, tau).unwrap(), n.base().opt_cost(tau).unwrap());
    }

    #[test]
    fn invalid_parameters() {
        let n = classical();
        assert!(build_schedule(&n, 1.0, 2.0, 1.0).is_err());
        assert!(build_schedule(&n, 0.5, 1.0, 1.0).is_err());
        assert!(build_schedule(&n, 0.5, 2.0, -1.0).is_err());
        let s = build_schedule(&n, 0.5, 2.0, 0.5).unwrap();
        assert!(doubling_cost(&n, &s, s.covered_until() + 1.0).is_err() || s.covered_until().is_infinite());
    }

    #[test]
    fn single_slope_schedule() {
        let n = NonAdditiveInstance::new(Instance::normalize(&[Slope::new(2.0, 1.0)]).unwrap());
        let s = build_schedule(&n, 0.3, 2.0, 5.0).unwrap();
        assert_eq!(doubling_cost(&n, &s, 5.0).unwrap(), 7.0);
    }

    #[test]
    fn alpha_over_log_alpha_minimized_at_e() {
        let grid: Vec<f64> = (0..=2500).map(|i| 1.5 + i as f64 * 1e-3).collect();
        let best = grid
            .iter()
            .copied()
            .min_by(|a, b| expected_ratio_bound(*a).partial_cmp(&expected_ratio_bound(*b)).unwrap())
            .unwrap();
        assert!((best - std::f64::consts::E).abs() <= 1e-3);
        assert!((expected_ratio_bound(std::f64::consts::E) - std::f64::consts::E).abs() < 1e-15);
        assert!((expected_ratio_bound(2.0f64) - 2.885_390_081_777_927).abs() < 1e-12);
    }
}
