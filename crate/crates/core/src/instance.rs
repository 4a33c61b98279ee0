//! Multislope instances: validation, normalization and the offline optimum.
//!
//! A slope `i` is the cost line `b_i + r_i * t`. After normalization the
//! buy costs are strictly increasing, the rents strictly decreasing and
//! every surviving slope touches the lower envelope `OPT(t)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope<T = f64> {
    pub buy: T,
    pub rent: T,
}

impl<T: Scalar> Slope<T> {
    pub fn new(buy: T, rent: T) -> Self {
        Slope { buy, rent }
    }

    #[inline]
    pub fn cost_at(&self, t: T) -> T {
        self.buy + self.rent * t
    }
}

/// Why a raw slope did not survive normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// Another input slope (by input position) is no more expensive in
    /// both buy cost and rent.
    DominatedBy(usize),
    /// Lies above the lower envelope: its neighbours intersect before it
    /// could become optimal.
    NeverOptimal,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::DominatedBy(i) => write!(f, "dominated by input slope {i}"),
            DropReason::NeverOptimal => write!(f, "never optimal (above the lower envelope)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedSlope<T = f64> {
    /// Position in the raw input.
    pub index: usize,
    pub slope: Slope<T>,
    pub reason: DropReason,
}

/// Result of [`Instance::normalize_with_report`].
#[derive(Debug, Clone)]
pub struct Normalized<T: Scalar = f64> {
    pub instance: Instance<T>,
    pub dropped: Vec<DroppedSlope<T>>,
    pub warnings: Vec<String>,
}

/// On-disk form: `{"slopes": [{"buy": .., "rent": ..}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile<T = f64> {
    pub slopes: Vec<Slope<T>>,
}

/// A normalized additive multislope instance with slopes `0..=k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "InstanceFile<T>", try_from = "InstanceFile<T>", bound = "")]
pub struct Instance<T: Scalar = f64> {
    slopes: Vec<Slope<T>>,
    // s[0] = 0, s[i] = intersection of slopes i-1 and i
    s: Vec<T>,
}

impl<T: Scalar> From<Instance<T>> for InstanceFile<T> {
    fn from(inst: Instance<T>) -> Self {
        InstanceFile { slopes: inst.slopes }
    }
}

impl<T: Scalar> TryFrom<InstanceFile<T>> for Instance<T> {
    type Error = Error;

    fn try_from(file: InstanceFile<T>) -> Result<Self> {
        Instance::normalize(&file.slopes)
    }
}

fn check_raw<T: Scalar>(raw: &[Slope<T>]) -> Result<()> {
    if raw.is_empty() {
        return Err(Error::InvalidInstance("no slopes given".into()));
    }
    for (i, s) in raw.iter().enumerate() {
        if !s.buy.is_finite() || !s.rent.is_finite() {
            return Err(Error::InvalidInstance(format!("slope {i} has a non-finite value")));
        }
        if s.buy < T::zero() || s.rent < T::zero() {
            return Err(Error::InvalidInstance(format!("slope {i} has a negative value")));
        }
    }
    Ok(())
}

#[inline]
fn crossing<T: Scalar>(lo: &Slope<T>, hi: &Slope<T>) -> T {
    (hi.buy - lo.buy) / (lo.rent - hi.rent)
}

impl<T: Scalar> Instance<T> {
    /// Normalizes raw slopes, discarding the report.
    pub fn normalize(raw: &[Slope<T>]) -> Result<Self> {
        Self::normalize_with_report(raw).map(|n| n.instance)
    }

    /// Drops dominated slopes (ties keep the earlier-listed slope) and
    /// slopes above the lower envelope, sorts by buy cost and computes the
    /// intersection times. Coincident intersections are kept and reported
    /// as warnings.
    pub fn normalize_with_report(raw: &[Slope<T>]) -> Result<Normalized<T>> {
        check_raw(raw)?;

        let mut dropped = Vec::new();
        let mut survivors: Vec<(usize, Slope<T>)> = Vec::new();
        for (j, sj) in raw.iter().enumerate() {
            let dominator = raw.iter().enumerate().position(|(i, si)| {
                i != j
                    && si.buy <= sj.buy
                    && si.rent <= sj.rent
                    && (si.buy < sj.buy || si.rent < sj.rent || i < j)
            });
            match dominator {
                Some(i) => dropped.push(DroppedSlope {
                    index: j,
                    slope: *sj,
                    reason: DropReason::DominatedBy(i),
                }),
                None => survivors.push((j, *sj)),
            }
        }
        survivors.sort_by(|a, b| a.1.buy.partial_cmp(&b.1.buy).expect("finite"));

        // Lower envelope by a monotone stack: pop the top while its left
        // crossing lies strictly after its right crossing.
        let mut hull: Vec<(usize, Slope<T>)> = Vec::with_capacity(survivors.len());
        for cand in survivors {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2].1;
                let b = &hull[hull.len() - 1].1;
                if crossing(a, b) > crossing(b, &cand.1) {
                    let (index, slope) = hull.pop().expect("len >= 2");
                    dropped.push(DroppedSlope {
                        index,
                        slope,
                        reason: DropReason::NeverOptimal,
                    });
                } else {
                    break;
                }
            }
            hull.push(cand);
        }
        dropped.sort_by_key(|d| d.index);

        let slopes: Vec<Slope<T>> = hull.into_iter().map(|(_, s)| s).collect();
        let instance = Self::from_sorted(slopes)?;
        let warnings = instance
            .coincident_intersections()
            .into_iter()
            .map(|i| {
                format!(
                    "slopes {} and {} meet at the same time {}; slope {} is never strictly optimal",
                    i - 1,
                    i + 1,
                    instance.s[i],
                    i
                )
            })
            .collect();
        Ok(Normalized {
            instance,
            dropped,
            warnings,
        })
    }

    /// Builds an instance from slopes already in normalized order.
    pub(crate) fn from_sorted(slopes: Vec<Slope<T>>) -> Result<Self> {
        check_raw(&slopes)?;
        let mut s = Vec::with_capacity(slopes.len());
        s.push(T::zero());
        for w in slopes.windows(2) {
            if !(w[0].buy < w[1].buy && w[0].rent > w[1].rent) {
                return Err(Error::InvalidInstance(
                    "slopes must have strictly increasing buy and strictly decreasing rent".into(),
                ));
            }
            s.push(crossing(&w[0], &w[1]));
        }
        if s.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInstance(
                "intersection times are not nondecreasing".into(),
            ));
        }
        Ok(Instance { slopes, s })
    }

    /// Loads the JSON instance format and normalizes it.
    pub fn from_json_str(text: &str) -> Result<Normalized<T>> {
        let file: InstanceFile<T> = serde_json::from_str(text)?;
        Self::normalize_with_report(&file.slopes)
    }

    /// Index of the last slope.
    #[inline]
    pub fn k(&self) -> usize {
        self.slopes.len() - 1
    }

    #[inline]
    pub fn slopes(&self) -> &[Slope<T>] {
        &self.slopes
    }

    #[inline]
    pub fn buy(&self, i: usize) -> T {
        self.slopes[i].buy
    }

    #[inline]
    pub fn rent(&self, i: usize) -> T {
        self.slopes[i].rent
    }

    /// Intersection times `s_0 = 0, s_1, ..., s_k`.
    #[inline]
    pub fn intersections(&self) -> &[T] {
        &self.s
    }

    /// Indices `i` with `s_i == s_{i+1}`.
    pub fn coincident_intersections(&self) -> Vec<usize> {
        (1..self.k()).filter(|&i| self.s[i] == self.s[i + 1]).collect()
    }

    fn check_time(t: T) -> Result<()> {
        if t.is_nan() || t < T::zero() {
            Err(Error::Domain(format!("time must be nonnegative, got {t}")))
        } else {
            Ok(())
        }
    }

    /// `OPT(t) = min_i (b_i + r_i t)`.
    pub fn opt_cost(&self, t: T) -> Result<T> {
        Self::check_time(t)?;
        Ok(self.opt_at(t))
    }

    #[inline]
    pub(crate) fn opt_at(&self, t: T) -> T {
        self.slopes
            .iter()
            .map(|s| s.cost_at(t))
            .fold(T::infinity(), T::min)
    }

    /// Slope `i` with `t` in `[s_i, s_{i+1})`; at a breakpoint the larger
    /// index wins.
    pub fn opt_slope(&self, t: T) -> Result<usize> {
        Self::check_time(t)?;
        Ok(self.opt_slope_at(t))
    }

    #[inline]
    pub(crate) fn opt_slope_at(&self, t: T) -> usize {
        self.s.partition_point(|&si| si <= t) - 1
    }

    /// Slope `i` with `t` in `(s_i, s_{i+1}]`; at a breakpoint the smaller
    /// index wins.
    pub fn opt_slope_tie_low(&self, t: T) -> Result<usize> {
        Self::check_time(t)?;
        Ok(self.s[1..].partition_point(|&si| si < t))
    }

    /// The smallest `t` with `OPT(t) = budget`.
    pub fn opt_inverse(&self, budget: T) -> Result<T> {
        if budget.is_nan() || budget < self.buy(0) {
            return Err(Error::Domain(format!(
                "budget {budget} is below OPT(0) = {}",
                self.buy(0)
            )));
        }
        let k = self.k();
        let at_break: Vec<T> = (0..=k).map(|i| self.slopes[i].cost_at(self.s[i])).collect();
        let piece = at_break.partition_point(|&v| v <= budget) - 1;
        let slope = &self.slopes[piece];
        if slope.rent == T::zero() {
            if budget > slope.buy {
                return Err(Error::UnreachableBudget {
                    budget: budget.as_f64(),
                    max: slope.buy.as_f64(),
                });
            }
            return Ok(self.s[piece]);
        }
        let t = (budget - slope.buy) / slope.rent;
        let upper = if piece < k { self.s[piece + 1] } else { T::infinity() };
        Ok(t.max(self.s[piece]).min(upper))
    }

    /// Same buy costs with every rent lowered by `r_k`.
    pub(crate) fn shifted_rents(&self) -> Self {
        let floor = self.rent(self.k());
        Instance {
            slopes: self
                .slopes
                .iter()
                .map(|s| Slope::new(s.buy, s.rent - floor))
                .collect(),
            s: self.s.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slopes(pairs: &[(f64, f64)]) -> Vec<Slope<f64>> {
        pairs.iter().map(|&(b, r)| Slope::new(b, r)).collect()
    }

    fn inst(pairs: &[(f64, f64)]) -> Instance<f64> {
        Instance::normalize(&slopes(pairs)).unwrap()
    }

    #[test]
    fn classical_instance() {
        let i = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(i.k(), 1);
        assert_eq!(i.intersections(), &[0.0, 1.0]);
    }

    #[test]
    fn coincident_intersections_are_kept_with_warning() {
        let n = Instance::normalize_with_report(&slopes(&[(0.0, 2.0), (1.0, 1.0), (0.5, 1.5)])).unwrap();
        assert_eq!(
            n.instance.slopes(),
            slopes(&[(0.0, 2.0), (0.5, 1.5), (1.0, 1.0)]).as_slice()
        );
        assert_eq!(n.instance.intersections(), &[0.0, 1.0, 1.0]);
        assert_eq!(n.instance.coincident_intersections(), vec![1]);
        assert_eq!(n.warnings.len(), 1);
        assert!(n.dropped.is_empty());
    }

    #[test]
    fn dominated_slope_dropped() {
        let n = Instance::normalize_with_report(&slopes(&[(0.0, 1.0), (2.0, 1.0)])).unwrap();
        assert_eq!(n.instance.k(), 0);
        assert_eq!(n.instance.slopes()[0], Slope::new(0.0, 1.0));
        assert_eq!(n.dropped[0].index, 1);
        assert_eq!(n.dropped[0].reason, DropReason::DominatedBy(0));
    }

    #[test]
    fn duplicate_keeps_first() {
        let n = Instance::normalize_with_report(&slopes(&[(1.0, 1.0), (0.0, 2.0), (1.0, 1.0)])).unwrap();
        assert_eq!(n.instance.k(), 1);
        assert_eq!(n.dropped.len(), 1);
        assert_eq!(n.dropped[0].index, 2);
        assert_eq!(n.dropped[0].reason, DropReason::DominatedBy(0));
    }

    #[test]
    fn slope_above_envelope_dropped() {
        // middle line crosses the first at 1.8 but the third at 0.2
        let n = Instance::normalize_with_report(&slopes(&[(0.0, 2.0), (0.9, 1.5), (1.0, 1.0)])).unwrap();
        assert_eq!(n.instance.k(), 1);
        assert_eq!(n.dropped[0].reason, DropReason::NeverOptimal);
        assert_eq!(n.instance.intersections(), &[0.0, 1.0]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(Instance::<f64>::normalize(&[]), Err(Error::InvalidInstance(_))));
        assert!(matches!(
            Instance::normalize(&slopes(&[(f64::NAN, 1.0)])),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            Instance::normalize(&slopes(&[(0.0, -1.0)])),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn opt_cost_examples() {
        let c = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(c.opt_cost(0.5).unwrap(), 0.5);
        assert_eq!(c.opt_cost(3.0).unwrap(), 1.0);
        // lines at t=3 give 6, 5, 4
        let three = inst(&[(0.0, 2.0), (2.0, 1.0), (4.0, 0.0)]);
        assert_eq!(three.opt_cost(3.0).unwrap(), 4.0);
        assert!(matches!(c.opt_cost(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn opt_slope_examples() {
        let c = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(c.opt_slope(0.5).unwrap(), 0);
        assert_eq!(c.opt_slope(1.0).unwrap(), 1);
        assert_eq!(c.opt_slope_tie_low(1.0).unwrap(), 0);
        let three = inst(&[(0.0, 2.0), (2.0, 1.0), (4.0, 0.0)]);
        assert_eq!(three.intersections(), &[0.0, 2.0, 2.0]);
        // s_1 = s_2 = 2 here, so the larger-index rule lands on slope 2
        assert_eq!(three.opt_slope(2.0).unwrap(), 2);
        assert_eq!(three.opt_slope_tie_low(2.0).unwrap(), 0);
        let spaced = inst(&[(0.0, 2.0), (2.0, 1.0), (5.0, 0.0)]);
        assert_eq!(spaced.intersections(), &[0.0, 2.0, 3.0]);
        assert_eq!(spaced.opt_slope(2.0).unwrap(), 1);
        assert_eq!(spaced.opt_slope_tie_low(3.0).unwrap(), 1);
    }

    #[test]
    fn opt_inverse_examples() {
        let c = inst(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(c.opt_inverse(0.5).unwrap(), 0.5);
        assert_eq!(c.opt_inverse(1.0).unwrap(), 1.0);
        assert!(matches!(c.opt_inverse(1.5), Err(Error::UnreachableBudget { .. })));
        assert!(matches!(c.opt_inverse(-0.1), Err(Error::Domain(_))));
        let three = inst(&[(0.0, 2.0), (2.0, 1.0), (4.0, 0.0)]);
        let t = three.opt_inverse(3.0).unwrap();
        assert_eq!(t, 1.5);
        assert_eq!(three.opt_cost(t).unwrap(), 3.0);
    }

    #[test]
    fn positive_base_cost() {
        let i = inst(&[(1.0, 2.0), (3.0, 0.5)]);
        assert_eq!(i.opt_cost(0.0).unwrap(), 1.0);
        assert_eq!(i.opt_inverse(1.0).unwrap(), 0.0);
        assert!(i.opt_inverse(0.5).is_err());
    }

    #[test]
    fn json_round_trip_and_idempotence() {
        let i = inst(&[(1.0, 0.0), (0.0, 1.0), (0.4, 0.5)]);
        let text = serde_json::to_string(&i).unwrap();
        let back: Instance<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, i);
        assert_eq!(Instance::normalize(i.slopes()).unwrap(), i);
    }
}
