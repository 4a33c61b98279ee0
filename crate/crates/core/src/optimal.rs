//! Optimal randomized strategy via tight profiles.
//!
//! For a target ratio `c`, a tight profile spends exactly `c * OPT'(t)`
//! per unit time while it still has something to buy. While slope `i` is
//! being bought during `[s_j, s_{j+1})` the probability of slope `i`
//! obeys
//!
//! ```text
//! p' = lambda (p - a),  lambda = (r_{i-1} - r_i)/(b_i - b_{i-1}),
//!                       a      = (c r_j - r_{i-1})/(r_i - r_{i-1})
//! ```
//!
//! so each stretch is a single exponential. [`feasible`] chains these
//! stretches from `t = 0`, switching whenever `t` crosses a breakpoint or a
//! slope is fully bought, and fails as soon as the budget `c r_j` cannot
//! cover the current rent (the profile would have to sell). Feasibility is
//! monotone in `c`, so [`solve_optimal`] bisects on it.

use std::fmt;

use crate::decompose::certified_bound;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::profile::{Profile, Segment};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
}

impl Verdict {
    pub fn is_feasible(self) -> bool {
        self == Verdict::Feasible
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Lump purchase at `t = 0` when `b_0 > 0`.
    InitialPurchase,
    /// `t` reached `s_j`; the spending rate becomes `c r_j`.
    CrossedBreakpoint(usize),
    /// Slope `i` is fully bought.
    FinishedSlope(usize),
    /// The last stretch is stationary and runs forever.
    ConvergedTail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event<T> {
    pub time: T,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureReason {
    /// `c r_j` is below the current rent.
    NegativeBuyRate,
    /// A stretch produced a non-finite value.
    NonFinite,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureReason::NegativeBuyRate => "negative-buy-rate",
            FailureReason::NonFinite => "non-finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Failure<T> {
    pub time: T,
    pub reason: FailureReason,
    /// Slope being bought.
    pub slope: usize,
    /// Offline-optimal slope.
    pub opt_slope: usize,
    /// `c r_j - R(t)`.
    pub deficit: T,
}

#[derive(Debug, Clone)]
pub struct FeasibilityTrace<T: Scalar> {
    pub c: T,
    pub verdict: Verdict,
    /// Complete when feasible, the constructed prefix otherwise.
    pub segments: Vec<Segment<T>>,
    pub terminal_slope: Option<usize>,
    pub events: Vec<Event<T>>,
    pub failure: Option<Failure<T>>,
    /// Set when the construction failed after the last breakpoint, where
    /// stopping at `j >= k` without checking the tail would have accepted.
    pub lenient_tail_would_accept: bool,
    pub profile: Option<Profile<T>>,
}

/// The stretch buying slope `i` at rate `c r_j` from `p_i(t_b) = p_b`.
/// The returned segment is unbounded; callers cut it.
pub fn segment_solution<T: Scalar>(
    inst: &Instance<T>,
    i: usize,
    j: usize,
    c: T,
    boundary: (T, T),
) -> Result<Segment<T>> {
    let k = inst.k();
    if i == 0 || i > k || j > k {
        return Err(Error::Precondition(format!(
            "need 1 <= i <= {k} and j <= {k}, got i = {i}, j = {j}"
        )));
    }
    let (t_b, p_b) = boundary;
    let drop = inst.rent(i - 1) - inst.rent(i);
    let lambda = drop / (inst.buy(i) - inst.buy(i - 1));
    let a = (c * inst.rent(j) - inst.rent(i - 1)) / (inst.rent(i) - inst.rent(i - 1));
    Ok(Segment::anchored(t_b, T::infinity(), i, a, p_b - a, lambda))
}

/// Prudent state whose buying cost is `budget`: `(i, p_i)` with slopes
/// below `i` fully bought, or `None` when everything is affordable.
fn lump_state<T: Scalar>(inst: &Instance<T>, budget: T) -> Option<(usize, T)> {
    let k = inst.k();
    if budget >= inst.buy(k) {
        return None;
    }
    let i = (1..=k).find(|&i| inst.buy(i) > budget).expect("budget below b_k");
    let p = (budget - inst.buy(i - 1)) / (inst.buy(i) - inst.buy(i - 1));
    Some((i, p.max(T::zero())))
}

fn rate_tolerance<T: Scalar>(inst: &Instance<T>, c: T) -> T {
    T::snap() * c * inst.rent(0).max(T::one())
}

/// Builds the tight `c`-competitive profile, or reports where it breaks.
pub fn feasible<T: Scalar>(inst: &Instance<T>, c: T) -> Result<FeasibilityTrace<T>> {
    if !(c >= T::one()) || !c.is_finite() {
        return Err(Error::Domain(format!("ratio must be finite and at least 1, got {c}")));
    }
    let k = inst.k();
    let s = inst.intersections();
    let snap = T::snap();
    let tol = rate_tolerance(inst, c);

    let mut trace = FeasibilityTrace {
        c,
        verdict: Verdict::Infeasible,
        segments: Vec::new(),
        terminal_slope: None,
        events: Vec::new(),
        failure: None,
        lenient_tail_would_accept: false,
        profile: None,
    };
    let accept = |mut trace: FeasibilityTrace<T>, terminal: Option<usize>| -> Result<FeasibilityTrace<T>> {
        trace.verdict = Verdict::Feasible;
        trace.terminal_slope = terminal;
        trace.profile = Some(Profile::prudent(inst.clone(), trace.segments.clone(), terminal)?);
        Ok(trace)
    };
    if k == 0 {
        return accept(trace, Some(0));
    }

    // A tight profile has X(0) = c * OPT(0) = c * b_0.
    let initial = c * inst.buy(0);
    if initial > inst.buy(0) {
        trace.events.push(Event {
            time: T::zero(),
            kind: EventKind::InitialPurchase,
        });
    }
    let (mut i, mut p_b) = match lump_state(inst, initial) {
        Some(state) => state,
        None => return accept(trace, Some(k)),
    };
    let mut j = 0;
    let mut t_b = T::zero();

    for _ in 0..(4 * k + 8) {
        if p_b >= T::one() - snap {
            trace.events.push(Event {
                time: t_b,
                kind: EventKind::FinishedSlope(i),
            });
            i += 1;
            p_b = T::zero();
            if i > k {
                return accept(trace, Some(k));
            }
        }
        while j < k && s[j + 1] <= t_b + snap * t_b.max(T::one()) {
            j += 1;
            trace.events.push(Event {
                time: t_b,
                kind: EventKind::CrossedBreakpoint(j),
            });
        }

        let rent = inst.rent(i - 1) - (inst.rent(i - 1) - inst.rent(i)) * p_b;
        let deficit = c * inst.rent(j) - rent;
        if deficit < -tol {
            trace.lenient_tail_would_accept = j >= k;
            trace.failure = Some(Failure {
                time: t_b,
                reason: FailureReason::NegativeBuyRate,
                slope: i,
                opt_slope: j,
                deficit,
            });
            return Ok(trace);
        }

        let mut seg = segment_solution(inst, i, j, c, (t_b, p_b))?;
        if seg.amp() < T::zero() {
            // within tolerance of stationary
            seg = Segment::anchored(t_b, T::infinity(), i, p_b, T::zero(), seg.lambda);
        }
        let finish = if seg.amp() > T::zero() {
            t_b + ((T::one() - p_b) / seg.amp()).ln_1p() / seg.lambda
        } else {
            T::infinity()
        };
        let next_break = if j < k { s[j + 1] } else { T::infinity() };
        if finish.is_nan() {
            trace.failure = Some(Failure {
                time: t_b,
                reason: FailureReason::NonFinite,
                slope: i,
                opt_slope: j,
                deficit,
            });
            return Ok(trace);
        }

        let near_break = next_break.is_finite() && (finish - next_break).abs() <= snap * next_break.max(T::one());
        if finish.is_finite() && (finish <= next_break || near_break) {
            let end = if near_break { next_break } else { finish };
            if end > t_b {
                seg.t1 = end;
                trace.segments.push(seg);
            }
            t_b = end;
            p_b = T::one();
        } else if next_break.is_finite() {
            seg.t1 = next_break;
            p_b = seg.value(next_break).max(T::zero()).min(T::one());
            if !p_b.is_finite() {
                trace.failure = Some(Failure {
                    time: next_break,
                    reason: FailureReason::NonFinite,
                    slope: i,
                    opt_slope: j,
                    deficit,
                });
                return Ok(trace);
            }
            if next_break > t_b {
                trace.segments.push(seg);
            }
            t_b = next_break;
        } else {
            trace.segments.push(seg);
            trace.events.push(Event {
                time: t_b,
                kind: EventKind::ConvergedTail,
            });
            return accept(trace, None);
        }
    }
    Err(Error::Internal("feasibility loop did not terminate".into()))
}

#[derive(Debug, Clone)]
pub struct OptimalSolution<T: Scalar> {
    /// Smallest ratio found feasible.
    pub c_star: T,
    /// Largest ratio found infeasible (equal to `c_star` when it is 1).
    pub lower: T,
    pub profile: Profile<T>,
    pub iterations: usize,
}

/// Bisects on `c` between 1 and the decomposition bound until the bracket
/// is at most `eps` wide; returns the feasible end and its tight profile.
pub fn solve_optimal<T: Scalar>(inst: &Instance<T>, eps: T) -> Result<OptimalSolution<T>> {
    if !(eps > T::zero()) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let at_one = feasible(inst, T::one())?;
    if let Some(profile) = at_one.profile {
        return Ok(OptimalSolution {
            c_star: T::one(),
            lower: T::one(),
            profile,
            iterations: 0,
        });
    }

    let mut lo = T::one();
    let mut hi = certified_bound(inst);
    let mut best = feasible(inst, hi)?;
    let mut bump = T::snap();
    while best.profile.is_none() {
        // rounding can leave the bound a hair below the threshold
        if bump > T::lit(1e-6) {
            return Err(Error::Internal(format!(
                "decomposition bound {hi} is not feasible: {:?}",
                best.failure
            )));
        }
        hi = hi + bump;
        bump = bump * T::lit(10.0);
        best = feasible(inst, hi)?;
    }

    let mut iterations = 0;
    while hi - lo > eps {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let trace = feasible(inst, mid)?;
        if trace.profile.is_some() {
            hi = mid;
            best = trace;
        } else {
            lo = mid;
        }
    }
    Ok(OptimalSolution {
        c_star: hi,
        lower: lo,
        profile: best.profile.expect("feasible trace has a profile"),
        iterations,
    })
}

/// Forward-Euler version of [`feasible`] used to cross-check the closed
/// form: integrates `p' = (c r_j - R(t)) / (b_i - b_{i-1})` with a fixed
/// step and applies the same verdict rules. Once past the last breakpoint
/// a nonnegative buying rate can only grow, so it stops there.
pub fn euler_feasible_oracle<T: Scalar>(inst: &Instance<T>, c: T, step: T) -> Result<Verdict> {
    if !(step > T::zero()) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    if !(c >= T::one()) {
        return Err(Error::Domain(format!("ratio must be at least 1, got {c}")));
    }
    let k = inst.k();
    if k == 0 {
        return Ok(Verdict::Feasible);
    }
    let s = inst.intersections();
    let b = |i: usize| inst.buy(i);
    let r = |i: usize| inst.rent(i);
    let slack = T::snap() * c * r(0).max(T::one());

    let budget = c * b(0);
    if budget >= b(k) {
        return Ok(Verdict::Feasible);
    }
    let mut i = 1;
    while b(i) <= budget {
        i += 1;
    }
    let mut p = (budget - b(i - 1)) / (b(i) - b(i - 1));
    let mut t = T::zero();
    let mut j = 0;
    loop {
        if p >= T::one() - T::snap() {
            i += 1;
            p = T::zero();
            if i > k {
                return Ok(Verdict::Feasible);
            }
        }
        while j < k && s[j + 1] <= t {
            j += 1;
        }
        let rent = r(i - 1) * (T::one() - p) + r(i) * p;
        let budget_rate = c * r(j);
        if budget_rate - rent < -slack {
            return Ok(Verdict::Infeasible);
        }
        if j == k {
            return Ok(Verdict::Feasible);
        }
        let dp = (budget_rate - rent) / (b(i) - b(i - 1));
        let dt = step.min(s[j + 1] - t);
        p = p + dp * dt;
        t = t + dt;
        if p > T::one() {
            // back up to the crossing so the next slope starts on time
            t = t - (p - T::one()) / dp;
            p = T::one();
        }
    }
}
