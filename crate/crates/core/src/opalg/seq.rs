use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{max_abs, Scalar};

/// Inclusive integer interval `[lo, hi]`, never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow(format!("[{lo}, {hi}]")));
        }
        Ok(Window { lo, hi })
    }

    /// `[-radius, radius]`.
    pub fn symmetric(radius: i64) -> Self {
        let r = radius.abs();
        Window { lo: -r, hi: r }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Window) -> Result<Window> {
        Window::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Widened by `below` on the left and `above` on the right (negative values shrink).
    pub fn grow(&self, below: i64, above: i64) -> Result<Window> {
        Window::new(self.lo - below, self.hi + above)
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl TryFrom<[i64; 2]> for Window {
    type Error = Error;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Window::new(v[0], v[1])
    }
}

impl From<Window> for [i64; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

/// A sequence `n ↦ u(n)` tabulated on a window. Reads outside the window fail.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeq {
    window: Window,
    values: Vec<Scalar>,
}

impl CoeffSeq {
    pub fn from_values(lo: i64, values: Vec<Scalar>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyWindow("sequence with no values".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let window = Window::new(lo, lo + values.len() as i64 - 1)?;
        Ok(CoeffSeq { window, values })
    }

    pub fn from_fn(window: Window, f: impl Fn(i64) -> Scalar) -> Result<Self> {
        Self::try_from_fn(window, |n| Ok(f(n)))
    }

    pub fn try_from_fn(window: Window, f: impl Fn(i64) -> Result<Scalar>) -> Result<Self> {
        let values = window
            .iter()
            .map(|n| f(n).and_then(Scalar::finite))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffSeq { window, values })
    }

    pub fn constant(window: Window, c: Scalar) -> Self {
        CoeffSeq {
            window,
            values: vec![c; window.len()],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn get(&self, n: i64) -> Result<&Scalar> {
        if !self.window.contains(n) {
            return Err(Error::Window {
                missing_lo: n,
                missing_hi: n,
                available_lo: self.window.lo,
                available_hi: self.window.hi,
            });
        }
        Ok(&self.values[(n - self.window.lo) as usize])
    }

    pub fn restrict(&self, window: Window) -> Result<Self> {
        if !self.window.covers(&window) {
            return Err(missing(window, self.window));
        }
        let start = (window.lo - self.window.lo) as usize;
        Ok(CoeffSeq {
            window,
            values: self.values[start..start + window.len()].to_vec(),
        })
    }

    pub fn sup_norm(&self) -> Scalar {
        max_abs(&self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        CoeffSeq {
            window: self.window,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise combination on the common window.
    pub fn zip_with(&self, other: &CoeffSeq, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Self> {
        let window = self.window.intersect(&other.window)?;
        CoeffSeq::try_from_fn(window, |n| Ok(f(self.get(n)?, other.get(n)?)))
    }
}

/// Error describing the part of `wanted` not covered by `have`.
pub(crate) fn missing(wanted: Window, have: Window) -> Error {
    let (missing_lo, missing_hi) = if wanted.lo < have.lo {
        (wanted.lo, (have.lo - 1).min(wanted.hi))
    } else {
        ((have.hi + 1).max(wanted.lo), wanted.hi)
    };
    Error::Window {
        missing_lo,
        missing_hi,
        available_lo: have.lo,
        available_hi: have.hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_outside_window_fail() {
        let s = CoeffSeq::from_fn(Window::new(-2, 2).unwrap(), Scalar::from_i64).unwrap();
        assert_eq!(*s.get(2).unwrap(), 2.0);
        let err = s.get(3).unwrap_err();
        assert!(matches!(err, Error::Window { missing_lo: 3, .. }));
    }

    #[test]
    fn restrict_names_missing_indices() {
        let s = CoeffSeq::constant(Window::new(0, 5).unwrap(), Scalar::one());
        let err = s.restrict(Window::new(-3, 2).unwrap()).unwrap_err();
        assert_eq!(
            err,
            Error::Window {
                missing_lo: -3,
                missing_hi: -1,
                available_lo: 0,
                available_hi: 5
            }
        );
    }

    #[test]
    fn empty_window_rejected() {
        assert!(Window::new(3, 2).is_err());
    }

    #[test]
    fn window_serde_as_pair() {
        let w = Window::new(-24, 24).unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "[-24,24]");
        assert!(serde_json::from_str::<Window>("[5,1]").is_err());
    }
}
