use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::seq::{missing, CoeffSeq, Window};
use crate::error::{Error, Result};
use crate::num::Scalar;

/// A coefficient given as a function of `n`.
pub type CoeffFn<'a> = Box<dyn Fn(i64) -> Scalar + 'a>;

/// `Σ_j u_j(n) T^j` where `(T f)(n) = f(n + 1)`.
///
/// All coefficient sequences are tabulated on the operator's window; every
/// composition computes the exact window on which its result is known.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp {
    window: Window,
    terms: BTreeMap<i64, CoeffSeq>,
}

impl DiffOp {
    pub fn new(window: Window, terms: impl IntoIterator<Item = (i64, CoeffSeq)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (degree, seq) in terms {
            let seq = seq.restrict(window)?;
            if map.insert(degree, seq).is_some() {
                return Err(Error::Domain(format!("shift degree {degree} given twice")));
            }
        }
        Ok(DiffOp { window, terms: map })
    }

    pub fn from_fns(window: Window, terms: Vec<(i64, CoeffFn<'_>)>) -> Result<Self> {
        let seqs = terms
            .into_iter()
            .map(|(d, f)| Ok((d, CoeffSeq::from_fn(window, f)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(window, seqs)
    }

    pub fn zero(window: Window) -> Self {
        DiffOp {
            window,
            terms: BTreeMap::new(),
        }
    }

    /// `c · T^k` with constant `c`.
    pub fn monomial(window: Window, k: i64, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, CoeffSeq::constant(window, c));
        DiffOp { window, terms }
    }

    pub fn shift(window: Window, k: i64) -> Self {
        Self::monomial(window, k, Scalar::one())
    }

    pub fn identity(window: Window) -> Self {
        Self::shift(window, 0)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &CoeffSeq)> {
        self.terms.iter().map(|(d, s)| (*d, s))
    }

    pub fn coeff(&self, degree: i64) -> Option<&CoeffSeq> {
        self.terms.get(&degree)
    }

    /// Coefficient of `T^degree` at `n`, zero for absent degrees.
    pub fn coeff_at(&self, degree: i64, n: i64) -> Result<Scalar> {
        if !self.window.contains(n) {
            return Err(missing(Window::new(n, n)?, self.window));
        }
        match self.terms.get(&degree) {
            Some(seq) => seq.get(n).cloned(),
            None => Ok(Scalar::zero()),
        }
    }

    fn degree_span(&self) -> (i64, i64) {
        let lo = self.terms.keys().next().copied().unwrap_or(0);
        let hi = self.terms.keys().next_back().copied().unwrap_or(0);
        (lo, hi)
    }

    /// Highest degree with a nonzero coefficient sequence.
    pub fn order(&self) -> Option<i64> {
        self.terms.iter().rev().find(|(_, s)| !s.is_zero()).map(|(d, _)| *d)
    }

    /// Lowest degree with a nonzero coefficient sequence.
    pub fn min_degree(&self) -> Option<i64> {
        self.terms.iter().find(|(_, s)| !s.is_zero()).map(|(d, _)| *d)
    }

    pub fn is_positive(&self) -> bool {
        self.min_degree().is_none_or(|d| d >= 0)
    }

    /// Top coefficient equals one on the whole window.
    pub fn is_monic(&self) -> bool {
        self.order()
            .and_then(|d| self.terms.get(&d))
            .is_some_and(|s| s.values().iter().all(|v| *v == 1.0))
    }

    /// Monic of some order with no negative shifts.
    pub fn require_monic_positive(&self) -> Result<i64> {
        if !self.is_positive() {
            return Err(Error::NotMonic("operator has negative shift degrees".into()));
        }
        if !self.is_monic() {
            return Err(Error::NotMonic("top coefficient is not identically 1".into()));
        }
        Ok(self.order().unwrap_or(0))
    }

    /// `(L f)(n) = Σ_j u_j(n) f(n + j)` on every `n` where both are known.
    pub fn apply(&self, f: &CoeffSeq) -> Result<CoeffSeq> {
        let (dlo, dhi) = self.degree_span();
        let fw = f.window();
        let window = Window::new(self.window.lo().max(fw.lo() - dlo), self.window.hi().min(fw.hi() - dhi))
            .map_err(|_| missing(self.window.grow(-dlo, dhi).unwrap_or(self.window), fw))?;
        CoeffSeq::try_from_fn(window, |n| {
            let mut acc = Scalar::zero();
            for (j, u) in &self.terms {
                acc += u.get(n)? * f.get(n + j)?;
            }
            Ok(acc)
        })
    }

    /// Like `apply`, but fails unless the result covers `window`.
    pub fn apply_on(&self, f: &CoeffSeq, window: Window) -> Result<CoeffSeq> {
        let out = self.apply(f)?;
        if !out.window().covers(&window) {
            let (dlo, dhi) = self.degree_span();
            let needed = window.grow(-dlo, dhi)?;
            if !self.window.covers(&window) {
                return Err(missing(window, self.window));
            }
            return Err(missing(needed, f.window()));
        }
        out.restrict(window)
    }

    /// Composition `A ∘ B`, using `T^i ∘ b(n) = b(n + i) T^i`.
    pub fn mul(&self, rhs: &DiffOp) -> Result<DiffOp> {
        let (dlo, dhi) = self.degree_span();
        let window = Window::new(
            self.window.lo().max(rhs.window.lo() - dlo),
            self.window.hi().min(rhs.window.hi() - dhi),
        )
        .map_err(|_| missing(self.window.grow(-dlo, dhi).unwrap_or(self.window), rhs.window))?;
        let mut acc: BTreeMap<i64, Vec<Scalar>> = BTreeMap::new();
        for (i, a) in &self.terms {
            for (k, b) in &rhs.terms {
                let slot = acc
                    .entry(i + k)
                    .or_insert_with(|| vec![Scalar::zero(); window.len()]);
                for (idx, n) in window.iter().enumerate() {
                    slot[idx] += a.get(n)? * b.get(n + i)?;
                }
            }
        }
        let terms = acc
            .into_iter()
            .map(|(d, v)| Ok((d, CoeffSeq::from_values(window.lo(), v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(DiffOp { window, terms })
    }

    fn combine(&self, rhs: &DiffOp, sign: i64) -> Result<DiffOp> {
        let window = self.window.intersect(&rhs.window)?;
        let mut terms = BTreeMap::new();
        for d in self.terms.keys().chain(rhs.terms.keys()) {
            if terms.contains_key(d) {
                continue;
            }
            let seq = CoeffSeq::try_from_fn(window, |n| {
                let a = self.coeff_at(*d, n)?;
                let b = rhs.coeff_at(*d, n)?;
                Ok(a + b * sign)
            })?;
            terms.insert(*d, seq);
        }
        Ok(DiffOp { window, terms })
    }

    pub fn add(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.combine(rhs, 1)
    }

    pub fn sub(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.combine(rhs, -1)
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.mul(rhs)?.sub(&rhs.mul(self)?)
    }

    /// `c(n) · L`, the sequence multiplying from the left.
    pub fn scale_left(&self, c: &CoeffSeq) -> Result<DiffOp> {
        let window = self.window.intersect(&c.window())?;
        let terms = self
            .terms
            .iter()
            .map(|(d, u)| {
                let seq = CoeffSeq::try_from_fn(window, |n| Ok(c.get(n)? * u.get(n)?))?;
                Ok((*d, seq))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(DiffOp { window, terms })
    }

    pub fn scale(&self, c: &Scalar) -> DiffOp {
        DiffOp {
            window: self.window,
            terms: self.terms.iter().map(|(d, u)| (*d, u.map(|v| v * c))).collect(),
        }
    }

    /// `L − z` for a constant `z`.
    pub fn minus_constant(&self, z: &Scalar) -> Result<DiffOp> {
        self.sub(&DiffOp::monomial(self.window, 0, z.clone()))
    }

    pub fn pow(&self, k: u32) -> Result<DiffOp> {
        let mut out = DiffOp::identity(self.window);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn restrict(&self, window: Window) -> Result<DiffOp> {
        Self::new(window, self.terms.iter().map(|(d, s)| (*d, s.clone())))
    }

    /// `max_{j,n} |u_j(n)|`.
    pub fn sup_norm(&self) -> Scalar {
        self.terms
            .values()
            .fold(Scalar::zero(), |acc, s| acc.max(s.sup_norm()))
    }

    /// Same quantity as `sup_norm`, used when asserting an operator vanishes.
    pub fn residual_norm(&self) -> Scalar {
        self.sup_norm()
    }

    pub fn to_doc(&self) -> OperatorDoc {
        OperatorDoc {
            order: self.order().unwrap_or(0),
            window: self.window,
            terms: self
                .terms
                .iter()
                .map(|(d, s)| (d.to_string(), s.values().to_vec()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &OperatorDoc) -> Result<DiffOp> {
        let terms = doc
            .terms
            .iter()
            .map(|(d, values)| {
                let degree: i64 = d
                    .parse()
                    .map_err(|_| Error::Parse(format!("shift degree {d:?} is not an integer")))?;
                if values.len() != doc.window.len() {
                    return Err(Error::Parse(format!(
                        "degree {degree} has {} values, window {} needs {}",
                        values.len(),
                        doc.window,
                        doc.window.len()
                    )));
                }
                Ok((degree, CoeffSeq::from_values(doc.window.lo(), values.clone())?))
            })
            .collect::<Result<Vec<_>>>()?;
        let op = DiffOp::new(doc.window, terms)?;
        if op.order().unwrap_or(0) != doc.order && !op.terms.is_empty() {
            return Err(Error::Parse(format!(
                "declared order {} does not match coefficients (order {:?})",
                doc.order,
                op.order()
            )));
        }
        Ok(op)
    }
}

/// Serialized operator: `{order, window: [lo, hi], terms: {degree: [u(lo), …, u(hi)]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub order: i64,
    pub window: Window,
    pub terms: BTreeMap<String, Vec<Scalar>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: i64, hi: i64) -> Window {
        Window::new(lo, hi).unwrap()
    }

    fn seq(window: Window, f: impl Fn(i64) -> Scalar) -> CoeffSeq {
        CoeffSeq::from_fn(window, f).unwrap()
    }

    #[test]
    fn shift_applied_to_identity_sequence() {
        let f = seq(w(-5, 5), Scalar::from_i64);
        let out = DiffOp::shift(w(-10, 10), 1).apply(&f).unwrap();
        assert_eq!(out.window(), w(-6, 4));
        assert_eq!(*out.get(3).unwrap(), 4.0);
    }

    #[test]
    fn free_second_order_operator_on_powers_of_two() {
        let window = w(-3, 3);
        let l2 = DiffOp::shift(window, 2);
        let f = seq(w(-3, 6), |n| Scalar::from_i64(2).powi(n as i32));
        let out = l2.apply(&f).unwrap();
        for n in window.iter() {
            assert_eq!(*out.get(n).unwrap(), Scalar::from_i64(2).powi(n as i32) * 4i64);
        }
    }

    #[test]
    fn apply_underflow_names_indices() {
        let f = seq(w(0, 2), Scalar::from_i64);
        let err = DiffOp::shift(w(5, 9), 1).apply(&f).unwrap_err();
        assert!(matches!(err, Error::Window { .. }));
    }

    #[test]
    fn products_of_shifts_and_linear_factors() {
        let window = w(-6, 6);
        let t = DiffOp::shift(window, 1);
        let tt = t.mul(&t).unwrap();
        assert_eq!(tt.order(), Some(2));
        assert_eq!(*tt.coeff(2).unwrap().get(0).unwrap(), 1.0);

        let id_n = seq(window, Scalar::from_i64);
        let plus = t.add(&DiffOp::new(window, [(0, id_n.clone())]).unwrap()).unwrap();
        let minus = t.sub(&DiffOp::new(window, [(0, id_n)]).unwrap()).unwrap();
        let prod = plus.mul(&minus).unwrap();
        for n in prod.window().iter() {
            assert_eq!(prod.coeff_at(2, n).unwrap(), 1.0);
            assert_eq!(prod.coeff_at(1, n).unwrap(), -1.0);
            assert_eq!(prod.coeff_at(0, n).unwrap(), -((n * n) as f64));
        }
    }

    #[test]
    fn square_of_shifted_factor() {
        let window = w(-6, 6);
        let u = seq(window, |n| Scalar::from_i64(n * n + 1));
        let wseq = seq(window, |n| Scalar::from_i64(3 * n));
        let factor = DiffOp::shift(window, 1)
            .add(&DiffOp::new(window, [(0, u.clone())]).unwrap())
            .unwrap();
        let l2 = factor
            .mul(&factor)
            .unwrap()
            .add(&DiffOp::new(window, [(0, wseq.clone())]).unwrap())
            .unwrap();
        for n in l2.window().iter() {
            let un = u.get(n).unwrap();
            let un1 = u.get(n + 1).unwrap();
            assert_eq!(l2.coeff_at(1, n).unwrap(), un + un1);
            assert_eq!(l2.coeff_at(0, n).unwrap(), un.square() + wseq.get(n).unwrap());
        }
    }

    #[test]
    fn commutators_that_vanish() {
        let window = w(-8, 8);
        let a = DiffOp::from_fns(window, vec![(2, Box::new(|_| Scalar::one())), (0, Box::new(Scalar::from_i64))])
            .unwrap();
        assert!(a.commutator(&a).unwrap().residual_norm().is_zero());
        let t = DiffOp::shift(window, 1);
        let t3 = DiffOp::shift(window, 3);
        assert!(t.commutator(&t3).unwrap().residual_norm().is_zero());
        assert!(t.sub(&t).unwrap().residual_norm().is_zero());
        assert!(DiffOp::zero(window).residual_norm().is_zero());
    }

    #[test]
    fn order_and_predicates() {
        let window = w(0, 4);
        let op = DiffOp::from_fns(
            window,
            vec![(3, Box::new(|_| Scalar::one())), (-1, Box::new(|_| Scalar::zero())), (1, Box::new(|_| Scalar::one()))],
        )
        .unwrap();
        assert_eq!(op.order(), Some(3));
        assert!(op.is_positive());
        assert!(op.is_monic());
        assert_eq!(op.require_monic_positive().unwrap(), 3);
        let neg = DiffOp::shift(window, -1);
        assert!(!neg.is_positive());
    }

    #[test]
    fn json_round_trip() {
        let window = w(-2, 2);
        let op = DiffOp::from_fns(window, vec![(1, Box::new(|n| Scalar::ratio(n, 3))), (0, Box::new(|_| Scalar::one()))])
            .unwrap();
        let text = serde_json::to_string(&op.to_doc()).unwrap();
        let doc: OperatorDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(DiffOp::from_doc(&doc).unwrap(), op);
        assert!(text.contains("\"window\":[-2,2]"));
    }
}
