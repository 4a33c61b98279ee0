use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

/// Cost of the deterministic strategy with transition times
/// `(t_1, ..., t_k)` when the game stops at `tau`, in the additive model:
/// rent of every occupied slope for its occupied duration plus `b_m`, where
/// `m` is the highest slope entered by `tau` (`t_m <= tau`).
pub fn realized_cost<T: Scalar>(inst: &Instance<T>, times: &[T], tau: T) -> Result<T> {
    if times.len() != inst.k() {
        return Err(Error::Domain(format!(
            "expected {} transition times, got {}",
            inst.k(),
            times.len()
        )));
    }
    if times.iter().any(|t| t.is_nan() || *t < T::zero()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("transition times must be nonnegative and nondecreasing".into()));
    }
    if tau.is_nan() || tau < T::zero() {
        return Err(Error::Domain(format!("stop time must be nonnegative, got {tau}")));
    }
    Ok(realized_cost_unchecked(inst, times, tau))
}

pub(crate) fn realized_cost_unchecked<T: Scalar>(inst: &Instance<T>, times: &[T], tau: T) -> T {
    let k = inst.k();
    let mut cost = T::zero();
    let mut highest = 0;
    for i in 0..=k {
        let start = if i == 0 { T::zero() } else { times[i - 1] };
        if start > tau {
            break;
        }
        highest = i;
        let end = if i < k { times[i].min(tau) } else { tau };
        if end > start {
            cost = cost + inst.rent(i) * (end - start);
        }
    }
    cost + inst.buy(highest)
}
