//! Randomized profiles: the probability `p_i(t)` of occupying slope `i` at
//! time `t`.
//!
//! A profile is stored through its tail sums `P_i(t) = sum_{j >= i} p_j(t)`,
//! one piecewise-exponential [`Curve`] per transition `i = 1..=k`. This
//! covers both prudent profiles (at most two consecutive active slopes,
//! described by [`Segment`]s) and the per-slope exponential mixtures
//! produced by the decomposition solver. Monotonicity with respect to
//! majorization is exactly "every `P_i` is nondecreasing", and costs are
//! linear in the tails:
//!
//! ```text
//! B(t) = b_0 + sum_i P_i(t) (b_i - b_{i-1})
//! R(t) = r_0 - sum_i P_i(t) (r_{i-1} - r_i)
//! ```

mod io;
pub mod piecewise;
mod strategy;
mod validate;

pub use io::ProfileDoc;
pub use piecewise::{Curve, ExpPiece};
pub use strategy::realized_cost;
pub use validate::{ValidationReport, Violation, ViolationKind, VALIDATION_POINTS_PER_PIECE};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;
use piecewise::push_merged;

/// A stretch of a prudent profile on `[t0, t1)` during which slope `hi` is
/// being bought: `p_hi(t) = a + gamma * exp(lambda * t)` and
/// `p_{hi-1}(t) = 1 - p_hi(t)`.
///
/// Internally the exponential is anchored at `t0` so that long horizons do
/// not underflow `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub t0: T,
    /// May be `T::infinity()` for the last segment.
    pub t1: T,
    pub hi: usize,
    pub a: T,
    pub lambda: T,
    amp: T,
}

impl<T: Scalar> Segment<T> {
    /// Absolute form `a + gamma * exp(lambda * t)`.
    pub fn new(t0: T, t1: T, hi: usize, a: T, gamma: T, lambda: T) -> Self {
        let piece = ExpPiece::from_absolute(t0, t1, a, gamma, lambda);
        Segment {
            t0,
            t1,
            hi,
            a,
            lambda,
            amp: piece.amp,
        }
    }

    /// Anchored form `a + amp * exp(lambda * (t - t0))`.
    pub fn anchored(t0: T, t1: T, hi: usize, a: T, amp: T, lambda: T) -> Self {
        Segment {
            t0,
            t1,
            hi,
            a,
            lambda,
            amp,
        }
    }

    pub fn gamma(&self) -> T {
        self.piece().gamma()
    }

    /// Exponential part at `t0`, i.e. `p_hi(t0) - a`.
    pub fn amp(&self) -> T {
        self.amp
    }

    pub fn piece(&self) -> ExpPiece<T> {
        ExpPiece {
            t0: self.t0,
            t1: self.t1,
            a: self.a,
            amp: self.amp,
            rate: self.lambda,
        }
    }

    /// `p_hi(t)`.
    #[inline]
    pub fn value(&self, t: T) -> T {
        self.piece().value(t)
    }
}

/// How a profile was described when it was built.
#[derive(Debug, Clone, PartialEq)]
pub enum Layout<T> {
    /// Consecutive two-slope segments, then pure `terminal_slope` from the
    /// end of the last segment on (absent when the last segment is
    /// unbounded).
    Prudent {
        segments: Vec<Segment<T>>,
        terminal_slope: Option<usize>,
    },
    /// Arbitrary tail curves, one per transition.
    Tails,
}

/// Competitive ratio at one time; infinite when `OPT(t) = 0` while the
/// profile has already paid something.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Ratio<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Ratio::Finite(r) => Some(r),
            Ratio::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile<T: Scalar = f64> {
    instance: Instance<T>,
    layout: Layout<T>,
    // tails[i - 1] = P_i
    tails: Vec<Curve<T>>,
}

impl<T: Scalar> Profile<T> {
    /// Pure slope `m` forever.
    pub fn constant(instance: Instance<T>, m: usize) -> Result<Self> {
        Self::prudent(instance, Vec::new(), Some(m))
    }

    pub fn prudent(
        instance: Instance<T>,
        segments: Vec<Segment<T>>,
        terminal_slope: Option<usize>,
    ) -> Result<Self> {
        let k = instance.k();
        let bad = |msg: String| Err(Error::InvalidProfile(msg));
        let mut cursor = T::zero();
        for (n, seg) in segments.iter().enumerate() {
            if seg.t0 != cursor {
                return bad(format!("segment {n} starts at {} instead of {cursor}", seg.t0));
            }
            if !(seg.t1 > seg.t0) {
                return bad(format!("segment {n} is empty"));
            }
            if seg.hi == 0 || seg.hi > k {
                return bad(format!("segment {n} buys slope {} outside 1..={k}", seg.hi));
            }
            if !seg.t1.is_finite() && n + 1 != segments.len() {
                return bad(format!("segment {n} is unbounded but not last"));
            }
            cursor = seg.t1;
        }
        let open_ended = !cursor.is_finite();
        match terminal_slope {
            Some(m) if m > k => return bad(format!("terminal slope {m} outside 0..={k}")),
            Some(_) if open_ended => return bad("terminal slope after an unbounded segment".into()),
            None if !open_ended => return bad("profile ends at a finite time without a terminal slope".into()),
            _ => {}
        }

        let mut tails = Vec::with_capacity(k);
        for i in 1..=k {
            let mut pieces = Vec::new();
            for seg in &segments {
                let piece = if seg.hi == i {
                    seg.piece()
                } else {
                    let v = if seg.hi > i { T::one() } else { T::zero() };
                    ExpPiece::constant(seg.t0, seg.t1, v)
                };
                push_merged(&mut pieces, piece);
            }
            if let Some(m) = terminal_slope {
                let v = if i <= m { T::one() } else { T::zero() };
                push_merged(&mut pieces, ExpPiece::constant(cursor, T::infinity(), v));
            }
            tails.push(Curve::new(pieces).map_err(Error::InvalidProfile)?);
        }
        Ok(Profile {
            instance,
            layout: Layout::Prudent {
                segments,
                terminal_slope,
            },
            tails,
        })
    }

    /// Profile given directly by its tail curves `P_1..P_k`.
    pub fn from_tails(instance: Instance<T>, tails: Vec<Vec<ExpPiece<T>>>) -> Result<Self> {
        if tails.len() != instance.k() {
            return Err(Error::InvalidProfile(format!(
                "expected {} tail curves, got {}",
                instance.k(),
                tails.len()
            )));
        }
        let tails = tails
            .into_iter()
            .map(|pieces| Curve::new(pieces).map_err(Error::InvalidProfile))
            .collect::<Result<Vec<_>>>()?;
        Ok(Profile {
            instance,
            layout: Layout::Tails,
            tails,
        })
    }

    #[inline]
    pub fn instance(&self) -> &Instance<T> {
        &self.instance
    }

    #[inline]
    pub fn layout(&self) -> &Layout<T> {
        &self.layout
    }

    pub fn segments(&self) -> Option<&[Segment<T>]> {
        match &self.layout {
            Layout::Prudent { segments, .. } => Some(segments),
            Layout::Tails => None,
        }
    }

    pub fn is_prudent_layout(&self) -> bool {
        matches!(self.layout, Layout::Prudent { .. })
    }

    /// `P_1..P_k`.
    #[inline]
    pub fn tails(&self) -> &[Curve<T>] {
        &self.tails
    }

    /// `P_i(t)`, with `P_0 = 1`.
    #[inline]
    pub fn tail(&self, i: usize, t: T) -> T {
        if i == 0 {
            T::one()
        } else {
            self.tails[i - 1].value(t)
        }
    }

    fn check_time(t: T) -> Result<()> {
        if t.is_nan() || t < T::zero() {
            Err(Error::Domain(format!("time must be nonnegative, got {t}")))
        } else {
            Ok(())
        }
    }

    /// Probability vector `(p_0(t), ..., p_k(t))`.
    pub fn eval(&self, t: T) -> Result<Vec<T>> {
        Self::check_time(t)?;
        Ok(self.probabilities(t))
    }

    pub(crate) fn probabilities(&self, t: T) -> Vec<T> {
        let k = self.instance.k();
        let tails: Vec<T> = (0..=k).map(|i| self.tail(i, t)).collect();
        (0..=k)
            .map(|i| if i < k { tails[i] - tails[i + 1] } else { tails[k] })
            .collect()
    }

    /// Expected total buying cost `B(t)`.
    pub fn buy_cost(&self, t: T) -> Result<T> {
        Self::check_time(t)?;
        Ok(self.buy_at(t))
    }

    fn buy_at(&self, t: T) -> T {
        let inst = &self.instance;
        (1..=inst.k()).fold(inst.buy(0), |acc, i| {
            acc + self.tails[i - 1].value(t) * (inst.buy(i) - inst.buy(i - 1))
        })
    }

    /// Expected rent rate `R(t)`.
    pub fn rent_rate(&self, t: T) -> Result<T> {
        Self::check_time(t)?;
        Ok(self.rent_at(t))
    }

    pub(crate) fn rent_at(&self, t: T) -> T {
        let inst = &self.instance;
        (1..=inst.k()).fold(inst.rent(0), |acc, i| {
            acc - self.tails[i - 1].value(t) * (inst.rent(i - 1) - inst.rent(i))
        })
    }

    /// Right derivative of `B` at `t`.
    pub fn buy_rate(&self, t: T) -> Result<T> {
        Self::check_time(t)?;
        let inst = &self.instance;
        Ok((1..=inst.k()).fold(T::zero(), |acc, i| {
            acc + self.tails[i - 1].derivative(t) * (inst.buy(i) - inst.buy(i - 1))
        }))
    }

    /// Expected total cost `X(t) = B(t) + int_0^t R`, in closed form.
    pub fn total_cost(&self, t: T) -> Result<T> {
        Self::check_time(t)?;
        Ok(self.total_at(t))
    }

    pub(crate) fn total_at(&self, t: T) -> T {
        let inst = &self.instance;
        let rent = (1..=inst.k()).fold(inst.rent(0) * t, |acc, i| {
            acc - self.tails[i - 1].integral(t) * (inst.rent(i - 1) - inst.rent(i))
        });
        self.buy_at(t) + rent
    }

    /// `X(t) / OPT(t)`. At `t = 0` with `OPT(0) = 0` this is the right
    /// limit `(B'(0) + R(0)) / r_0` if the profile starts in slope 0, and
    /// infinite otherwise.
    pub fn ratio(&self, t: T) -> Result<Ratio<T>> {
        let opt = self.instance.opt_cost(t)?;
        let x = self.total_at(t);
        if opt > T::zero() {
            return Ok(Ratio::Finite(x / opt));
        }
        let r0 = self.instance.rent(0);
        let started = self.instance.k() > 0 && self.tail(1, t) > T::zero();
        if x > T::zero() || started {
            return Ok(Ratio::Infinite);
        }
        if r0 == T::zero() {
            // OPT is identically zero and so is X
            return Ok(Ratio::Finite(T::one()));
        }
        Ok(Ratio::Finite((self.buy_rate(t)? + self.rent_at(t)) / r0))
    }

    pub fn ratio_curve(&self, grid: &[T]) -> Result<Vec<(T, Ratio<T>)>> {
        if grid.is_empty() {
            return Err(Error::Domain("grid is empty".into()));
        }
        if grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Domain("grid is not sorted".into()));
        }
        grid.iter().map(|&t| Ok((t, self.ratio(t)?))).collect()
    }

    /// Deterministic transition times `(t_1, ..., t_k)` for the uniform
    /// draw `u`: `t_i = inf { t : P_i(t) >= u }`.
    pub fn sample_strategy(&self, u: T) -> Result<Vec<T>> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::Domain(format!("u must lie in (0, 1), got {u}")));
        }
        Ok(self.transition_times(u))
    }

    pub(crate) fn transition_times(&self, u: T) -> Vec<T> {
        let mut last = T::zero();
        self.tails
            .iter()
            .map(|c| {
                last = last.max(c.first_reach(u));
                last
            })
            .collect()
    }

    /// Sorted distinct finite piece boundaries of all tails, plus every
    /// `s_i`, starting with 0.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts: Vec<T> = self.instance.intersections().to_vec();
        for c in &self.tails {
            pts.extend(c.breakpoints());
        }
        if let Layout::Prudent { segments, .. } = &self.layout {
            pts.extend(segments.iter().map(|s| s.t1).filter(|t| t.is_finite()));
        }
        sort_dedup(&mut pts);
        pts
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProfileDoc::from(self))?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: ProfileDoc<T> = serde_json::from_str(text)?;
        doc.into_profile()
    }
}

pub(crate) fn sort_dedup<T: Scalar>(pts: &mut Vec<T>) {
    pts.retain(|t| t.is_finite());
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
}
