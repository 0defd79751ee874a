//! Sparse multivariate Laurent polynomials.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so iteration is in
//! lexicographic order and the lex-leading term is the last entry.

mod coeff;
mod det;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use coeff::{Coeff, FLOAT_PRUNE};
pub use det::{determinant, determinant_bareiss, determinant_laplace};

use crate::error::{Error, Result};
use crate::param::{format_rational, parse_rational};

/// Integer exponent vector; its derived `Ord` is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVec(pub Vec<i32>);

impl ExponentVec {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    fn plus(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    fn minus(&self, o: &Self) -> Self {
        Self(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

/// Region in which a leading term is searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominanceCone {
    /// Weakly decreasing with all entries nonnegative.
    Nonnegative,
    /// Weakly decreasing, any sign.
    Signed,
}

impl DominanceCone {
    pub fn contains(self, e: &[i32]) -> bool {
        let decreasing = e.windows(2).all(|w| w[0] >= w[1]);
        match self {
            DominanceCone::Nonnegative => decreasing && e.last().is_none_or(|&x| x >= 0),
            DominanceCone::Signed => decreasing,
        }
    }
}

/// A Laurent polynomial in a fixed number of variables.
///
/// Invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly<C: Coeff = BigRational> {
    nvars: usize,
    terms: BTreeMap<ExponentVec, C>,
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(ExponentVec::zero(nvars), c);
        }
        p
    }

    /// `c * t^e`.
    pub fn monomial(exp: Vec<i32>, c: C) -> Self {
        let mut p = Self::zero(exp.len());
        if !c.is_zero() {
            p.terms.insert(ExponentVec(exp), c);
        }
        p
    }

    /// `t_i^k` in `nvars` variables.
    pub fn var_power(nvars: usize, i: usize, k: i32) -> Self {
        let mut e = vec![0; nvars];
        e[i] = k;
        Self::monomial(e, C::one())
    }

    /// Builds a polynomial from possibly repeated terms, summing duplicates.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, C)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::VariableCountMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            p.add_term(ExponentVec(e), &c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVec, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i32]) -> Option<&C> {
        self.terms.get(&ExponentVec(e.to_vec()))
    }

    /// Coefficient of `t^0`.
    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExponentVec, &C)> {
        self.terms.last_key_value()
    }

    fn add_term(&mut self, e: ExponentVec, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_vars(&self, o: &Self) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::VariableCountMismatch {
                left: self.nvars,
                right: o.nvars,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), &c.neg());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        self.check_vars(o)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                out.add_term(ea.plus(eb), &ca.mul(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, x)| (e.clone(), x.mul(c)))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        }
    }

    /// Applies `f` to every exponent vector; the result may have a different
    /// number of variables and colliding terms are summed.
    pub fn map_exponents<F>(&self, nvars: usize, f: F) -> Self
    where
        F: Fn(&[i32]) -> Vec<i32>,
    {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let ne = f(&e.0);
            debug_assert_eq!(ne.len(), nvars);
            out.add_term(ExponentVec(ne), c);
        }
        out
    }

    /// Swaps variables `i` and `j`.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        self.map_exponents(self.nvars, |e| {
            let mut v = e.to_vec();
            v.swap(i, j);
            v
        })
    }

    /// Replaces `t_i` by `t_i^{-1}`.
    pub fn invert_var(&self, i: usize) -> Self {
        self.map_exponents(self.nvars, |e| {
            let mut v = e.to_vec();
            v[i] = -v[i];
            v
        })
    }

    /// Replaces every `t_i` by `t_i^k`.
    pub fn scale_exponents(&self, k: i32) -> Self {
        self.map_exponents(self.nvars, |e| e.iter().map(|x| x * k).collect())
    }

    /// Divides every exponent by `k`; fails if some exponent is not a multiple.
    pub fn shrink_exponents(&self, k: i32) -> Result<Self> {
        if self.terms.keys().any(|e| e.0.iter().any(|x| x % k != 0)) {
            return Err(Error::NotDivisible);
        }
        Ok(self.map_exponents(self.nvars, |e| e.iter().map(|x| x / k).collect()))
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> LaurentPoly<D> {
        let mut out = LaurentPoly::<D>::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &f(c));
        }
        out
    }

    pub fn to_float(&self) -> LaurentPoly<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    fn exponent_bounds(&self) -> (Vec<i32>, Vec<i32>) {
        let mut lo = vec![i32::MAX; self.nvars];
        let mut hi = vec![i32::MIN; self.nvars];
        for e in self.terms.keys() {
            for (k, &x) in e.0.iter().enumerate() {
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
        (lo, hi)
    }

    fn max_abs(&self) -> f64 {
        self.terms
            .values()
            .map(coeff::abs_f64)
            .fold(0.0, f64::max)
    }

    /// Exact quotient `self / den`, or [`Error::NotDivisible`].
    ///
    /// Lex-leading-term division. Every quotient exponent must lie in the box
    /// `[min(num) - min(den), max(num) - max(den)]` coordinatewise; leaving
    /// the box proves non-divisibility, and the box bounds the work.
    pub fn exact_div(&self, den: &Self) -> Result<Self> {
        self.check_vars(den)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        let (nlo, nhi) = self.exponent_bounds();
        let (dlo, dhi) = den.exponent_bounds();
        let lo: Vec<i32> = nlo.iter().zip(&dlo).map(|(a, b)| a - b).collect();
        let hi: Vec<i32> = nhi.iter().zip(&dhi).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::NotDivisible);
        }
        let scale = self.max_abs();
        let (lead_e, lead_c) = den.terms.last_key_value().expect("nonzero");
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((e, c)) = rem.last_key_value() {
            if c.negligible(scale) {
                let e = e.clone();
                rem.remove(&e);
                continue;
            }
            let qe = e.minus(lead_e);
            if qe.0.iter().zip(lo.iter().zip(&hi)).any(|(x, (a, b))| x < a || x > b) {
                return Err(Error::NotDivisible);
            }
            let qc = c.div(lead_c);
            let top = e.clone();
            for (de, dc) in &den.terms {
                let k = qe.plus(de);
                let delta = qc.mul(dc);
                match rem.entry(k) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(delta.neg());
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let s = o.get().sub(&delta);
                        if s.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = s;
                        }
                    }
                }
            }
            // Floating-point leftovers at the cancelled position.
            rem.remove(&top);
            quot.insert(qe, qc);
        }
        Ok(Self {
            nvars: self.nvars,
            terms: quot,
        })
    }

    fn powers(&self, var: usize, x: &C) -> Result<(i32, Vec<C>)> {
        let (lo, hi) = self
            .terms
            .keys()
            .fold((0, 0), |(lo, hi), e| (lo.min(e.0[var]), hi.max(e.0[var])));
        let inv = if lo < 0 {
            if x.is_zero() {
                return Err(Error::ZeroCoordinate(var));
            }
            C::one().div(x)
        } else {
            C::one()
        };
        let mut table = vec![C::one(); (hi - lo + 1) as usize];
        let zero_idx = (-lo) as usize;
        for k in 1..=hi as usize {
            table[zero_idx + k] = table[zero_idx + k - 1].mul(x);
        }
        for k in 1..=(-lo) as usize {
            table[zero_idx - k] = table[zero_idx - k + 1].mul(&inv);
        }
        Ok((lo, table))
    }

    /// Evaluates at a point of the torus `(C^*)^n` over the coefficient field.
    pub fn evaluate(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let tables = point
            .iter()
            .enumerate()
            .map(|(i, x)| self.powers(i, x))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &x) in e.0.iter().enumerate() {
                let (lo, tab) = &tables[k];
                t = t.mul(&tab[(x - lo) as usize]);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Evaluates at a complex point with `f64` arithmetic.
    pub fn evaluate_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::PointLength {
                expected: self.nvars,
                got: point.len(),
            });
        }
        if let Some(i) = point.iter().position(|z| z.norm() == 0.0) {
            if self.terms.keys().any(|e| e.0[i] < 0) {
                return Err(Error::ZeroCoordinate(i));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = Complex64::new(c.to_f64(), 0.0);
            for (k, &x) in e.0.iter().enumerate() {
                if x != 0 {
                    t *= point[k].powi(x);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitutes `t_n = value` for the last variable.
    pub fn substitute_last(&self, value: &C) -> Result<Self> {
        if self.nvars == 0 {
            return Err(Error::InvalidParameter(
                "cannot substitute into a polynomial without variables".into(),
            ));
        }
        let last = self.nvars - 1;
        let (lo, tab) = self.powers(last, value)?;
        let mut out = Self::zero(last);
        for (e, c) in &self.terms {
            let k = e.0[last];
            out.add_term(
                ExponentVec(e.0[..last].to_vec()),
                &c.mul(&tab[(k - lo) as usize]),
            );
        }
        Ok(out)
    }

    /// Lex-largest term whose exponent lies in the given cone.
    pub fn leading_dominant_term(&self, cone: DominanceCone) -> Option<(&ExponentVec, &C)> {
        self.terms.iter().rev().find(|(e, _)| cone.contains(&e.0))
    }

    /// Total degree spread per variable, `max - min` over the support.
    pub fn degree_span(&self) -> Vec<i32> {
        if self.is_zero() {
            return vec![0; self.nvars];
        }
        let (lo, hi) = self.exponent_bounds();
        lo.iter().zip(&hi).map(|(a, b)| b - a).collect()
    }

    /// Maximum absolute exponent over the support.
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|e| e.0.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }
}

impl LaurentPoly<BigRational> {
    /// Maximum coefficient-wise distance to a float polynomial.
    pub fn max_deviation(&self, other: &LaurentPoly<f64>) -> f64 {
        let mut keys: Vec<&ExponentVec> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.into_iter()
            .map(|k| {
                let a = self.terms.get(k).map(|c| c.to_f64()).unwrap_or(0.0);
                let b = other.terms.get(k).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

macro_rules! impl_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<C: Coeff> $tr<&LaurentPoly<C>> for &LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            /// Panics on a variable count mismatch; use the `checked_` form otherwise.
            fn $m(self, o: &LaurentPoly<C>) -> LaurentPoly<C> {
                self.$checked(o).expect("variable count mismatch")
            }
        }
        impl<C: Coeff> $tr<LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $m(self, o: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$m(&o)
            }
        }
    };
}

impl_op!(Add, add, checked_add);
impl_op!(Sub, sub, checked_sub);
impl_op!(Mul, mul, checked_mul);

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        self.scale(&C::one().neg())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<i32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for LaurentPoly<BigRational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            vars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.0.clone(),
                    coef: format_rational(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly<BigRational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        let terms = raw
            .terms
            .into_iter()
            .map(|t| parse_rational(&t.coef).map(|c| (t.exp, c)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        LaurentPoly::from_terms(raw.vars, terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = LaurentPoly<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn p(n: usize, terms: &[(&[i32], i64)]) -> P {
        P::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), q(*c, 1)))).unwrap()
    }

    #[test]
    fn cyclotomic_division() {
        // (t^3 - 1) / (t - 1) = t^2 + t + 1
        let num = p(1, &[(&[3], 1), (&[0], -1)]);
        let den = p(1, &[(&[1], 1), (&[0], -1)]);
        assert_eq!(num.exact_div(&den).unwrap(), p(1, &[(&[2], 1), (&[1], 1), (&[0], 1)]));
    }

    #[test]
    fn laurent_division() {
        // (t^2 - t^-2) / (t - t^-1) = t + t^-1
        let num = p(1, &[(&[2], 1), (&[-2], -1)]);
        let den = p(1, &[(&[1], 1), (&[-1], -1)]);
        assert_eq!(num.exact_div(&den).unwrap(), p(1, &[(&[1], 1), (&[-1], 1)]));
    }

    #[test]
    fn non_divisible_is_reported() {
        let num = p(1, &[(&[2], 1), (&[0], 1)]);
        let den = p(1, &[(&[1], 1), (&[0], -1)]);
        assert_eq!(num.exact_div(&den), Err(Error::NotDivisible));
        let two = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let other = p(2, &[(&[1, 0], 1), (&[0, 1], 2)]);
        assert_eq!(two.exact_div(&other), Err(Error::NotDivisible));
        // Monomials are units in the Laurent ring.
        let x = p(2, &[(&[1, 0], 1)]);
        assert!(two.exact_div(&x).is_ok());
    }

    #[test]
    fn division_errors() {
        let a = p(1, &[(&[1], 1)]);
        assert_eq!(a.exact_div(&P::zero(1)), Err(Error::DivisionByZero));
        assert!(matches!(
            a.exact_div(&P::one(2)),
            Err(Error::VariableCountMismatch { .. })
        ));
        assert!(P::zero(1).exact_div(&a).unwrap().is_zero());
    }

    #[test]
    fn multivariate_round_trip() {
        let a = p(2, &[(&[1, -1], 2), (&[0, 3], -1), (&[-2, 0], 5)]);
        let b = p(2, &[(&[1, 1], 1), (&[-1, 0], -3)]);
        let prod = &a * &b;
        assert_eq!(prod.exact_div(&b).unwrap(), a);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
    }

    #[test]
    fn float_division_prunes_noise() {
        let a = p(2, &[(&[1, -1], 2), (&[0, 3], -1), (&[-2, 0], 5)]).to_float();
        let b = p(2, &[(&[1, 1], 1), (&[-1, 0], -3)]).scale(&q(1, 3)).to_float();
        let quot = (&a * &b).exact_div(&b).unwrap();
        assert_eq!(quot.len(), 3);
        assert!((quot.coeff(&[1, -1]).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arithmetic_drops_zeros() {
        let a = p(1, &[(&[1], 1), (&[0], 2)]);
        assert!((&a - &a).is_zero());
        assert_eq!((&a + &(-&a)).len(), 0);
        assert!(P::from_terms(1, vec![(vec![1, 2], q(1, 1))]).is_err());
        assert!(a.checked_add(&P::one(2)).is_err());
    }

    #[test]
    fn substitution_and_evaluation() {
        // t1 t2^-1 + 3 t2^2 at t2 = 1/2 -> 2 t1 + 3/4
        let a = P::from_terms(2, vec![(vec![1, -1], q(1, 1)), (vec![0, 2], q(3, 1))]).unwrap();
        let s = a.substitute_last(&q(1, 2)).unwrap();
        assert_eq!(
            s,
            P::from_terms(1, vec![(vec![1], q(2, 1)), (vec![0], q(3, 4))]).unwrap()
        );
        assert_eq!(a.evaluate(&[q(2, 1), q(1, 2)]).unwrap(), q(19, 4));
        assert_eq!(a.substitute_last(&q(0, 1)), Err(Error::ZeroCoordinate(1)));
        assert!(matches!(
            a.evaluate(&[q(1, 1)]),
            Err(Error::PointLength { .. })
        ));
        let z = a
            .evaluate_complex(&[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)])
            .unwrap();
        assert!((z.re - 4.75).abs() < 1e-14 && z.im.abs() < 1e-14);
    }

    #[test]
    fn leading_dominant_skips_non_dominant() {
        let a = p(2, &[(&[3, 4], 1), (&[2, 1], 5), (&[2, -1], 7)]);
        let (e, c) = a.leading_dominant_term(DominanceCone::Nonnegative).unwrap();
        assert_eq!(e.0, vec![2, 1]);
        assert_eq!(*c, q(5, 1));
        let only_bad = p(2, &[(&[0, 1], 1), (&[-1, -2], 1)]);
        assert!(only_bad.leading_dominant_term(DominanceCone::Nonnegative).is_none());
        assert_eq!(
            only_bad.leading_dominant_term(DominanceCone::Signed).unwrap().0 .0,
            vec![-1, -2]
        );
    }

    #[test]
    fn json_round_trip() {
        let a = P::from_terms(2, vec![(vec![1, -1], q(1, 2)), (vec![0, 0], q(1, 1))]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains("\"coef\":\"1/1\""));
        assert!(s.contains("\"coef\":\"1/2\""));
        let b: P = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exponent_transforms() {
        let a = p(2, &[(&[1, -2], 1)]);
        assert_eq!(a.swap_vars(0, 1), p(2, &[(&[-2, 1], 1)]));
        assert_eq!(a.invert_var(1), p(2, &[(&[1, 2], 1)]));
        assert_eq!(a.scale_exponents(2).shrink_exponents(2).unwrap(), a);
        assert!(a.shrink_exponents(2).is_err());
    }
}
