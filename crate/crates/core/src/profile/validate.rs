//! Grid-based checks of the structural properties of a profile.

use std::fmt;

use super::{sort_dedup, Profile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Uniform points inserted between consecutive breakpoints.
pub const VALIDATION_POINTS_PER_PIECE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    SumNotOne,
    NegativeProbability,
    /// More than two slopes active at once.
    TooManyActive,
    /// Two active slopes that are not neighbours.
    NonConsecutive,
    /// Some tail sum `P_i` decreased: a purchase was rolled back.
    Majorization,
    Discontinuity,
    /// `X(t) != c * OPT(t)` before the last slope is fully bought.
    NotTight,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::SumNotOne => "sum-not-one",
            ViolationKind::NegativeProbability => "negative-probability",
            ViolationKind::TooManyActive => "too-many-active",
            ViolationKind::NonConsecutive => "non-consecutive",
            ViolationKind::Majorization => "majorization",
            ViolationKind::Discontinuity => "discontinuity",
            ViolationKind::NotTight => "not-tight",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub time: T,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Outcome of a validator: the first violation of each kind, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub checked_points: usize,
    pub violations: Vec<Violation<T>>,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation<T>> {
        self.violations
            .iter()
            .min_by(|a, b| a.time.partial_cmp(&b.time).expect("finite"))
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    /// Passed when ignoring the listed kinds.
    pub fn passed_except(&self, kinds: &[ViolationKind]) -> bool {
        self.violations.iter().all(|v| kinds.contains(&v.kind))
    }

    fn record(&mut self, time: T, kind: ViolationKind, detail: String) {
        if !self.has(kind) {
            self.violations.push(Violation { time, kind, detail });
        }
    }
}

impl<T: Scalar> fmt::Display for ValidationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first() {
            None => write!(f, "pass ({} points)", self.checked_points),
            Some(v) => write!(f, "fail: {} at t={} ({})", v.kind, v.time, v.detail),
        }
    }
}

impl<T: Scalar> Profile<T> {
    /// Breakpoints plus [`VALIDATION_POINTS_PER_PIECE`] uniform points in
    /// every gap and past the last breakpoint.
    pub fn validation_grid(&self) -> Vec<T> {
        let mut knots = self.breakpoints();
        let last = *knots.last().expect("contains 0");
        knots.push(last * T::lit(2.0) + T::one());
        let n = VALIDATION_POINTS_PER_PIECE;
        let mut grid = Vec::with_capacity(knots.len() * (n + 1));
        for w in knots.windows(2) {
            for m in 0..n {
                let frac = T::lit(m as f64 / n as f64);
                grid.push(w[0] + (w[1] - w[0]) * frac);
            }
        }
        grid.extend(knots);
        sort_dedup(&mut grid);
        grid
    }

    /// Checks sum-to-one, nonnegativity, majorization monotonicity and
    /// continuity, without the two-active-slopes rule.
    pub fn validate_structure(&self) -> ValidationReport<T> {
        self.check(false)
    }

    /// Everything in [`validate_structure`](Self::validate_structure) plus:
    /// at most two active slopes, and they are consecutive.
    pub fn validate_prudent(&self) -> ValidationReport<T> {
        self.check(true)
    }

    fn check(&self, prudence: bool) -> ValidationReport<T> {
        let grid = self.validation_grid();
        let tol = T::snap();
        let mut report = ValidationReport {
            checked_points: grid.len(),
            violations: Vec::new(),
        };
        let k = self.instance.k();
        let mut prev_tails: Option<Vec<T>> = None;
        for &t in &grid {
            let p = self.probabilities(t);
            let sum = p.iter().fold(T::zero(), |a, &b| a + b);
            if (sum - T::one()).abs() > tol {
                report.record(t, ViolationKind::SumNotOne, format!("sum = {sum}"));
            }
            if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| **v < -tol) {
                report.record(t, ViolationKind::NegativeProbability, format!("p_{i} = {v}"));
            }
            if prudence {
                let active: Vec<usize> = (0..=k).filter(|&i| p[i] > tol).collect();
                if active.len() > 2 {
                    report.record(t, ViolationKind::TooManyActive, format!("active slopes {active:?}"));
                } else if active.len() == 2 && active[1] != active[0] + 1 {
                    report.record(t, ViolationKind::NonConsecutive, format!("active slopes {active:?}"));
                }
            }
            let tails: Vec<T> = (1..=k).map(|i| self.tail(i, t)).collect();
            if let Some(prev) = &prev_tails {
                if let Some(i) = (0..k).find(|&i| tails[i] < prev[i] - tol) {
                    report.record(
                        t,
                        ViolationKind::Majorization,
                        format!("P_{} fell from {} to {}", i + 1, prev[i], tails[i]),
                    );
                }
            }
            prev_tails = Some(tails);
        }
        for (i, curve) in self.tails.iter().enumerate() {
            let (at, jump) = curve.max_jump();
            if jump > T::continuity() {
                report.record(at, ViolationKind::Discontinuity, format!("P_{} jumps by {jump}", i + 1));
            }
        }
        report
    }

    /// Checks `X(t) = c * OPT(t)` within `tol * max(1, c * OPT(t))` at every
    /// grid point where the last slope is not fully bought.
    pub fn validate_tight(&self, c: T, tol: T) -> Result<ValidationReport<T>> {
        if !(c >= T::one()) {
            return Err(Error::Domain(format!("ratio must be at least 1, got {c}")));
        }
        let grid = self.validation_grid();
        let k = self.instance.k();
        let mut report = ValidationReport {
            checked_points: grid.len(),
            violations: Vec::new(),
        };
        for &t in &grid {
            if k > 0 && self.tail(k, t) >= T::one() - T::snap() {
                continue;
            }
            let target = c * self.instance.opt_at(t);
            let x = self.total_at(t);
            if (x - target).abs() > tol * target.max(T::one()) {
                report.record(
                    t,
                    ViolationKind::NotTight,
                    format!("X = {x}, c*OPT = {target}"),
                );
                break;
            }
        }
        Ok(report)
    }
}
