use std::fmt;

use serde::{Deserialize, Serialize};

/// Span used when an unbounded end of an interval has to be sampled.
pub const UNBOUNDED_SAMPLE_SPAN: f64 = 10.0;

/// Closed time interval `[start, end]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub const ALL: TimeInterval = TimeInterval {
        start: f64::NEG_INFINITY,
        end: f64::INFINITY,
    };

    pub fn new(start: f64, end: f64) -> Self {
        debug_assert!(start <= end, "interval [{start}, {end}] is reversed");
        Self { start, end }
    }

    pub fn until(end: f64) -> Self {
        Self::new(f64::NEG_INFINITY, end)
    }

    pub fn from(start: f64) -> Self {
        Self::new(start, f64::INFINITY)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn is_empty(&self) -> bool {
        !(self.start <= self.end)
    }

    pub fn is_bounded(&self) -> bool {
        self.start.is_finite() && self.end.is_finite()
    }

    pub fn intersect(&self, other: &TimeInterval) -> TimeInterval {
        TimeInterval {
            start: self.start.max(other.start),
            end: self.end.min(other.end),
        }
    }

    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        !self.intersect(other).is_empty()
    }

    /// Time reversal `t -> -t`.
    pub fn negate(&self) -> TimeInterval {
        TimeInterval {
            start: -self.end,
            end: -self.start,
        }
    }

    pub fn shift(&self, by: f64) -> TimeInterval {
        TimeInterval {
            start: self.start + by,
            end: self.end + by,
        }
    }

    /// The finite part of the interval that gets sampled: unbounded ends are
    /// replaced by [`UNBOUNDED_SAMPLE_SPAN`] measured from the other end (or
    /// from zero when both ends are infinite).
    pub fn sampling_range(&self) -> (f64, f64) {
        match (self.start.is_finite(), self.end.is_finite()) {
            (true, true) => (self.start, self.end),
            (true, false) => (self.start, self.start + UNBOUNDED_SAMPLE_SPAN),
            (false, true) => (self.end - UNBOUNDED_SAMPLE_SPAN, self.end),
            (false, false) => (-UNBOUNDED_SAMPLE_SPAN / 2.0, UNBOUNDED_SAMPLE_SPAN / 2.0),
        }
    }

    /// `n + 1` evenly spaced times covering [`Self::sampling_range`].
    pub fn sample_times(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.sampling_range();
        let n = n.max(1);
        (0..=n)
            .map(|k| {
                if k == n {
                    hi
                } else {
                    lo + (hi - lo) * (k as f64) / (n as f64)
                }
            })
            .collect()
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.start.is_finite() { '[' } else { '(' };
        let close = if self.end.is_finite() { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.start, self.end)
    }
}
