//! Piecewise-exponential curves `a + amp * exp(rate * (t - t0))`.
//!
//! Every profile is stored as one such curve per transition `i -> i+1...`,
//! holding the tail probability `P_i(t) = sum_{j >= i} p_j(t)`. Values,
//! integrals, derivatives and level crossings are all closed form.

use crate::scalar::Scalar;

/// One piece of a curve on `[t0, t1)`; `t1` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPiece<T> {
    pub t0: T,
    pub t1: T,
    pub a: T,
    /// Exponential part at `t0`.
    pub amp: T,
    pub rate: T,
}

impl<T: Scalar> ExpPiece<T> {
    pub fn constant(t0: T, t1: T, value: T) -> Self {
        ExpPiece {
            t0,
            t1,
            a: value,
            amp: T::zero(),
            rate: T::zero(),
        }
    }

    /// Builds a piece from the absolute form `a + gamma * exp(rate * t)`.
    pub fn from_absolute(t0: T, t1: T, a: T, gamma: T, rate: T) -> Self {
        ExpPiece {
            t0,
            t1,
            a,
            amp: gamma * (rate * t0).exp(),
            rate,
        }
    }

    /// `gamma` of the absolute form `a + gamma * exp(rate * t)`.
    pub fn gamma(&self) -> T {
        if self.amp == T::zero() {
            T::zero()
        } else {
            self.amp * (-self.rate * self.t0).exp()
        }
    }

    #[inline]
    pub fn is_constant(&self) -> bool {
        self.amp == T::zero() || self.rate == T::zero()
    }

    #[inline]
    pub fn value(&self, t: T) -> T {
        if self.amp == T::zero() {
            self.a
        } else {
            self.a + self.amp * (self.rate * (t - self.t0)).exp()
        }
    }

    #[inline]
    pub fn derivative(&self, t: T) -> T {
        if self.amp == T::zero() {
            T::zero()
        } else {
            self.amp * self.rate * (self.rate * (t - self.t0)).exp()
        }
    }

    /// Value approached at the right end (may be infinite).
    pub fn end_value(&self) -> T {
        if self.t1.is_finite() {
            self.value(self.t1)
        } else if self.is_constant() {
            self.a + self.amp
        } else if self.rate > T::zero() {
            self.a + self.amp.signum() * T::infinity()
        } else {
            self.a
        }
    }

    /// `int_{t0}^{t} value`.
    #[inline]
    pub fn integral_to(&self, t: T) -> T {
        let dt = t - self.t0;
        if self.amp == T::zero() {
            self.a * dt
        } else if self.rate == T::zero() {
            (self.a + self.amp) * dt
        } else {
            self.a * dt + self.amp * (self.rate * dt).exp_m1() / self.rate
        }
    }

    /// Earliest `t` in the piece with `value(t) >= level`, assuming the
    /// piece is nondecreasing. `None` when the level is not reached.
    pub fn first_reach(&self, level: T) -> Option<T> {
        let v0 = self.value(self.t0);
        if v0 >= level {
            return Some(self.t0);
        }
        if self.is_constant() || self.amp < T::zero() {
            return None;
        }
        if self.t1.is_finite() && self.value(self.t1) < level {
            return None;
        }
        let flat = T::lit(1e-14).max(T::epsilon());
        if self.amp.abs() >= flat {
            // a + amp e^{rate dt} = level  =>  dt = ln(1 + (level - v0)/amp)/rate
            let dt = ((level - v0) / self.amp).ln_1p() / self.rate;
            let t = self.t0 + dt.max(T::zero());
            return Some(if self.t1.is_finite() { t.min(self.t1) } else { t });
        }
        if !self.t1.is_finite() {
            return None;
        }
        let (mut lo, mut hi) = (self.t0, self.t1);
        for _ in 0..200 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) >= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// A curve on `[0, inf)` built from contiguous pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<T> {
    pieces: Vec<ExpPiece<T>>,
    // integral over [0, pieces[m].t0]
    cumulative: Vec<T>,
}

impl<T: Scalar> Curve<T> {
    /// Pieces must start at zero, be contiguous and end at infinity.
    pub fn new(pieces: Vec<ExpPiece<T>>) -> Result<Self, String> {
        let first = pieces.first().ok_or("curve has no pieces")?;
        if first.t0 != T::zero() {
            return Err(format!("curve starts at {} instead of 0", first.t0));
        }
        for w in pieces.windows(2) {
            if w[0].t1 != w[1].t0 {
                return Err(format!("gap or overlap between {} and {}", w[0].t1, w[1].t0));
            }
        }
        for p in &pieces {
            if !(p.t1 > p.t0) {
                return Err(format!("empty piece [{}, {})", p.t0, p.t1));
            }
            if !(p.a.is_finite() && p.amp.is_finite() && p.rate.is_finite()) {
                return Err("piece has non-finite coefficients".into());
            }
        }
        if pieces.last().map(|p| p.t1.is_finite()).unwrap_or(true) {
            return Err("curve must extend to infinity".into());
        }
        let mut cumulative = Vec::with_capacity(pieces.len());
        let mut acc = T::zero();
        for p in &pieces {
            cumulative.push(acc);
            if p.t1.is_finite() {
                acc = acc + p.integral_to(p.t1);
            }
        }
        Ok(Curve { pieces, cumulative })
    }

    pub fn constant(value: T) -> Self {
        Curve::new(vec![ExpPiece::constant(T::zero(), T::infinity(), value)]).expect("valid")
    }

    #[inline]
    pub fn pieces(&self) -> &[ExpPiece<T>] {
        &self.pieces
    }

    #[inline]
    fn locate(&self, t: T) -> usize {
        self.pieces.partition_point(|p| p.t0 <= t).saturating_sub(1)
    }

    /// Value clamped to `[0, 1]`.
    #[inline]
    pub fn value(&self, t: T) -> T {
        let v = self.pieces[self.locate(t)].value(t);
        v.max(T::zero()).min(T::one())
    }

    #[inline]
    pub fn derivative(&self, t: T) -> T {
        self.pieces[self.locate(t)].derivative(t)
    }

    /// `int_0^t value`, unclamped and exact per piece.
    #[inline]
    pub fn integral(&self, t: T) -> T {
        let m = self.locate(t);
        self.cumulative[m] + self.pieces[m].integral_to(t)
    }

    /// `inf { t : value(t) >= level }`, or infinity.
    pub fn first_reach(&self, level: T) -> T {
        self.pieces
            .iter()
            .find_map(|p| p.first_reach(level))
            .unwrap_or_else(T::infinity)
    }

    /// Finite piece boundaries, excluding zero.
    pub fn breakpoints(&self) -> impl Iterator<Item = T> + '_ {
        self.pieces.iter().map(|p| p.t1).filter(|t| t.is_finite())
    }

    /// Largest jump between the left limit and the value at each boundary.
    pub fn max_jump(&self) -> (T, T) {
        self.pieces
            .windows(2)
            .map(|w| (w[1].t0, (w[0].value(w[0].t1) - w[1].value(w[1].t0)).abs()))
            .fold((T::zero(), T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc })
    }
}

/// Appends a piece, merging with the previous one when both are the same
/// constant.
pub(crate) fn push_merged<T: Scalar>(pieces: &mut Vec<ExpPiece<T>>, piece: ExpPiece<T>) {
    if let Some(last) = pieces.last_mut() {
        if last.is_constant() && piece.is_constant() && last.value(last.t0) == piece.value(piece.t0) {
            last.t1 = piece.t1;
            return;
        }
    }
    pieces.push(piece);
}
