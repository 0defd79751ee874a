//! Irreducible characters of types A, B, C, D as Laurent polynomials.
//!
//! For B, C, D the character of highest weight λ is the ratio of an
//! alternating determinant to the symmetric Weyl denominator
//! `V^s = ∏_{i<j} (t_i + t_i^{-1} - t_j - t_j^{-1})`; for A it is the Schur
//! bialternant. Quotients are exact and cached by `(type, λ)`, since the
//! polynomial itself does not depend on the deformation parameter.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use dashmap::DashMap;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{determinant, LaurentPoly};
use crate::param::{format_rational, rational_to_f64, BaseParam};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
}

impl TypeLabel {
    /// `2ε(X)`: 1 for B, 2 for C, 0 for D. Type A has no ε.
    pub fn eps_half(self) -> Option<i64> {
        match self {
            TypeLabel::A => None,
            TypeLabel::B => Some(1),
            TypeLabel::C => Some(2),
            TypeLabel::D => Some(0),
        }
    }

    /// `2 c(X)_i = 2(i - 1) + 2ε(X)` for 1-based `i`.
    pub fn c_half(self, i: usize) -> i64 {
        2 * (i as i64 - 1) + self.eps_half().unwrap_or(0)
    }

    /// Exponent `k` with `t_i = r^k` at the distinguished point of rank `n`
    /// (`q^{c(X)_i}` for B, C, D and `q^{n+1-2i}` for A). `i` is 1-based.
    pub fn scaling_exponent(self, n: usize, i: usize) -> i64 {
        match self {
            TypeLabel::A => 4 * (n as i64 + 1 - 2 * i as i64),
            _ => 2 * self.c_half(i),
        }
    }

    pub fn is_bcd(self) -> bool {
        self != TypeLabel::A
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeLabel::A => "A",
            TypeLabel::B => "B",
            TypeLabel::C => "C",
            TypeLabel::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for TypeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(TypeLabel::A),
            "B" => Ok(TypeLabel::B),
            "C" => Ok(TypeLabel::C),
            "D" => Ok(TypeLabel::D),
            _ => Err(Error::InvalidParameter(format!("unknown type {s:?}"))),
        }
    }
}

/// A nonnegative signature `λ_1 >= … >= λ_N >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Signature(Vec<i64>);

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSignature {
                parts,
                reason: "parts must be weakly decreasing".into(),
            });
        }
        if parts.last().is_some_and(|&x| x < 0) {
            return Err(Error::InvalidSignature {
                parts,
                reason: "parts must be nonnegative".into(),
            });
        }
        Ok(Self(parts))
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn size(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Parses `"2.1.0"`, `"2,1,0"` or `"2 1 0"`; the empty string is rank 0.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" {
            return Ok(Self::empty());
        }
        let parts = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(|c: char| c == '.' || c == ',' || c.is_whitespace())
            .filter(|x| !x.is_empty())
            .map(|x| {
                x.parse::<i64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad signature {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }

    /// `"λ1.λ2…"`; `"()"` for rank 0.
    pub fn dotted(&self) -> String {
        if self.0.is_empty() {
            return "()".into();
        }
        self.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")
    }

    /// All signatures of rank `n` with `|λ| <= max_size`, ordered by size and
    /// then lexicographically.
    pub fn enumerate(n: usize, max_size: i64) -> Vec<Signature> {
        let mut out = Vec::new();
        for size in 0..=max_size {
            out.extend(Self::enumerate_size(n, size));
            if n == 0 {
                break;
            }
        }
        out
    }

    /// Signatures of rank `n` with `|λ| = size`, in lexicographic order.
    pub fn enumerate_size(n: usize, size: i64) -> Vec<Signature> {
        let mut level = Vec::new();
        partitions(size, n, size, &mut Vec::new(), &mut level);
        level.sort();
        level.into_iter().map(Signature).collect()
    }

    /// `(λ_1, …, λ_{N-1}, -λ_N)`, as a weight.
    pub fn tilde(&self) -> Vec<i64> {
        let mut w = self.0.clone();
        if let Some(x) = w.last_mut() {
            *x = -*x;
        }
        w
    }
}

fn partitions(rest: i64, slots: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if slots == 0 {
        if rest == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for x in (0..=rest.min(cap)).rev() {
        if x * (slots as i64) < rest {
            break;
        }
        cur.push(x);
        partitions(rest - x, slots - 1, x, cur, out);
        cur.pop();
    }
}

impl TryFrom<Vec<i64>> for Signature {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Signature::new(v)
    }
}

impl From<Signature> for Vec<i64> {
    fn from(s: Signature) -> Vec<i64> {
        s.0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dotted())
    }
}

/// Checks that `w` is a highest weight admissible for the type.
pub fn validate_weight(ty: TypeLabel, w: &[i64]) -> Result<()> {
    let bad = |reason: &str| {
        Err(Error::InvalidSignature {
            parts: w.to_vec(),
            reason: reason.into(),
        })
    };
    let n = w.len();
    let decreasing = |v: &[i64]| v.windows(2).all(|p| p[0] >= p[1]);
    match ty {
        TypeLabel::A => {
            if !decreasing(w) {
                return bad("type A weights must be weakly decreasing");
            }
        }
        TypeLabel::B | TypeLabel::C => {
            if !decreasing(w) || w.last().is_some_and(|&x| x < 0) {
                return bad("weights must be weakly decreasing and nonnegative");
            }
        }
        TypeLabel::D => {
            if n >= 2 && (!decreasing(&w[..n - 1]) || w[n - 2] < w[n - 1].abs()) {
                return bad("type D weights need λ_1 >= … >= λ_{N-1} >= |λ_N|");
            }
        }
    }
    Ok(())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `y_i - y_j` with `y = t + t^{-1}`.
fn symmetric_difference(n: usize, i: usize, j: usize) -> LaurentPoly {
    let mut p = LaurentPoly::zero(n);
    for (v, s) in [(i, 1), (j, -1)] {
        p = &p + &LaurentPoly::var_power(n, v, 1).scale(&rat(s));
        p = &p + &LaurentPoly::var_power(n, v, -1).scale(&rat(s));
    }
    p
}

fn denominator_factors(ty: TypeLabel, n: usize) -> Vec<LaurentPoly> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(match ty {
                TypeLabel::A => {
                    &LaurentPoly::var_power(n, i, 1) - &LaurentPoly::var_power(n, j, 1)
                }
                _ => symmetric_difference(n, i, j),
            });
        }
    }
    out
}

/// The Weyl denominator in product form: `∏_{i<j}(t_i - t_j)` for type A and
/// `V^s` for B, C, D.
pub fn weyl_denominator(ty: TypeLabel, n: usize) -> LaurentPoly {
    denominator_factors(ty, n)
        .iter()
        .fold(LaurentPoly::one(n), |acc, f| &acc * f)
}

/// `(t^{l} - t^{-l}) / (t^{ε} - t^{-ε})` in variable `var`, where `l` and
/// `ε` are given in half units. Computed in the doubled coordinate
/// `t = w^2`, where both exponents are integral, and mapped back.
pub fn divided_entry(nvars: usize, var: usize, l_half: i64, eps_half: i64) -> Result<LaurentPoly> {
    if eps_half <= 0 {
        return Err(Error::InvalidParameter("divided entry needs ε > 0".into()));
    }
    let w = |k: i64| LaurentPoly::<BigRational>::var_power(1, 0, k as i32);
    let num = &w(l_half) - &w(-l_half);
    let den = &w(eps_half) - &w(-eps_half);
    let quot = num.exact_div(&den)?.shrink_exponents(2)?;
    Ok(quot.map_exponents(nvars, |e| {
        let mut v = vec![0; nvars];
        v[var] = e[0];
        v
    }))
}

/// The determinant forms of `V^s`: `(1/2)det[t_j^{c(D)} + t_j^{-c(D)}]` and
/// the divided determinants for B and C, in that order.
pub fn weyl_denominator_determinants(n: usize) -> Result<[LaurentPoly; 3]> {
    let d_rows: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|i| {
            let c = TypeLabel::D.c_half(n - i) / 2;
            (0..n)
                .map(|j| {
                    &LaurentPoly::var_power(n, j, c as i32)
                        + &LaurentPoly::var_power(n, j, -c as i32)
                })
                .collect()
        })
        .collect();
    let d_form = determinant(n, &d_rows)?.scale(&BigRational::new(1.into(), 2.into()));
    let divided = |ty: TypeLabel| -> Result<LaurentPoly> {
        let eps = ty.eps_half().expect("B or C");
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| divided_entry(n, j, ty.c_half(n - i), eps))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        determinant(n, &rows)
    };
    Ok([d_form, divided(TypeLabel::B)?, divided(TypeLabel::C)?])
}

/// `det[t_j^{l_i} ± t_j^{-l_i}]` for type D, with `l_i = λ_i + N - i`.
fn d_determinant(w: &[i64], sign: i64) -> Result<LaurentPoly> {
    let n = w.len();
    let rows: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|i| {
            let l = (w[i] + (n - 1 - i) as i64) as i32;
            (0..n)
                .map(|j| {
                    &LaurentPoly::var_power(n, j, l)
                        + &LaurentPoly::var_power(n, j, -l).scale(&rat(sign))
                })
                .collect()
        })
        .collect();
    determinant(n, &rows)
}

fn divide_by_factors(mut p: LaurentPoly, factors: &[LaurentPoly]) -> Result<LaurentPoly> {
    for f in factors {
        p = p.exact_div(f)?;
    }
    Ok(p)
}

fn build_character(ty: TypeLabel, w: &[i64]) -> Result<LaurentPoly> {
    let n = w.len();
    if n == 0 {
        return Ok(LaurentPoly::one(0));
    }
    let factors = denominator_factors(ty, n);
    let numerator = match ty {
        TypeLabel::A => {
            let rows: Vec<Vec<LaurentPoly>> = (0..n)
                .map(|i| {
                    let e = (w[i] + (n - 1 - i) as i64) as i32;
                    (0..n).map(|j| LaurentPoly::var_power(n, j, e)).collect()
                })
                .collect();
            determinant(n, &rows)?
        }
        TypeLabel::B | TypeLabel::C => {
            let eps = ty.eps_half().expect("B or C");
            let rows = (0..n)
                .map(|i| {
                    let l_half = 2 * w[i] + ty.c_half(n - i);
                    (0..n)
                        .map(|j| divided_entry(n, j, l_half, eps))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            determinant(n, &rows)?
        }
        TypeLabel::D => {
            let sum = &d_determinant(w, 1)? + &d_determinant(w, -1)?;
            sum.scale(&BigRational::new(1.into(), 2.into()))
        }
    };
    divide_by_factors(numerator, &factors)
}

type CharCache = DashMap<(TypeLabel, Vec<i64>), Arc<LaurentPoly>>;

static CACHE: LazyLock<CharCache> =
    LazyLock::new(DashMap::new);

/// The character polynomial `f_λ` of highest weight `w` (cached).
pub fn character_poly(ty: TypeLabel, w: &[i64]) -> Result<Arc<LaurentPoly>> {
    validate_weight(ty, w)?;
    let key = (ty, w.to_vec());
    if let Some(p) = CACHE.get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(build_character(ty, w)?);
    CACHE.insert(key, p.clone());
    Ok(p)
}

/// Number of cached character polynomials.
pub fn cache_len() -> usize {
    CACHE.len()
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    #[serde(rename = "type")]
    ty: TypeLabel,
    lambda: Vec<i64>,
    poly: LaurentPoly,
}

/// Writes the character cache as JSON; returns the number of entries.
pub fn save_cache(path: &Path) -> Result<usize> {
    let mut entries: Vec<CacheEntry> = CACHE
        .iter()
        .map(|e| CacheEntry {
            ty: e.key().0,
            lambda: e.key().1.clone(),
            poly: (**e.value()).clone(),
        })
        .collect();
    entries.sort_by(|a, b| (a.ty, &a.lambda).cmp(&(b.ty, &b.lambda)));
    let s = serde_json::to_string(&entries).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, s).map_err(|e| Error::Io(e.to_string()))?;
    Ok(entries.len())
}

/// Loads a cache file written by [`save_cache`]; returns the number of entries.
pub fn load_cache(path: &Path) -> Result<usize> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
    let entries: Vec<CacheEntry> =
        serde_json::from_str(&s).map_err(|e| Error::Io(e.to_string()))?;
    let n = entries.len();
    for e in entries {
        validate_weight(e.ty, &e.lambda)?;
        CACHE.insert((e.ty, e.lambda), Arc::new(e.poly));
    }
    Ok(n)
}

/// The point `(r^{k_1}, …, r^{k_n})` at which quantum dimensions are taken.
pub fn scaled_point(ty: TypeLabel, n: usize, param: &BaseParam) -> Vec<BigRational> {
    (1..=n)
        .map(|i| param.r_pow(ty.scaling_exponent(n, i)))
        .collect()
}

pub fn scaled_point_f64(ty: TypeLabel, n: usize, param: &BaseParam) -> Vec<f64> {
    (1..=n)
        .map(|i| param.r_pow_f64(ty.scaling_exponent(n, i)))
        .collect()
}

/// Quantum dimension `f_λ(q^{c(X)_1}, …, q^{c(X)_N})`.
pub fn qdimension(ty: TypeLabel, w: &[i64], param: &BaseParam) -> Result<BigRational> {
    let p = character_poly(ty, w)?;
    p.evaluate(&scaled_point(ty, w.len(), param))
}

/// Shifted indices `l_i = λ_i + c(X)_{N-i+1}` in half units (B, C, D).
pub fn shifted_indices_half(ty: TypeLabel, w: &[i64]) -> Vec<i64> {
    let n = w.len();
    (0..n).map(|i| 2 * w[i] + ty.c_half(n - i)).collect()
}

/// Quantum dimension `f_λ(q^{c_1}, …, q^{c_N})` from the product formula
/// `∏_{i<j} (Y(l_i) - Y(l_j)) / (Y(l⁰_i) - Y(l⁰_j)) · ∏_i S(l_i) / S(l⁰_i)`,
/// `Y(l) = q^l + q^{-l}`, `S(l) = q^{εl} - q^{-εl}` (no `S` factor for D).
/// At `r = 1` this is the Weyl dimension formula.
pub fn qdimension_product(ty: TypeLabel, w: &[i64], param: &BaseParam) -> Result<BigRational> {
    validate_weight(ty, w)?;
    if ty == TypeLabel::A {
        return Err(Error::Unsupported("product formula for type A".into()));
    }
    if param.is_classical() {
        return weyl_dimension(ty, w);
    }
    let n = w.len();
    let l = shifted_indices_half(ty, w);
    let l0 = shifted_indices_half(ty, &vec![0; n]);
    let y = |lh: i64| param.r_pow(2 * lh) + param.r_pow(-2 * lh);
    let eps = ty.eps_half().expect("B, C or D");
    let s = |lh: i64| param.r_pow(eps * lh) - param.r_pow(-eps * lh);
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= y(l[i]) - y(l[j]);
            den *= y(l0[i]) - y(l0[j]);
        }
        if eps > 0 {
            num *= s(l[i]);
            den *= s(l0[i]);
        }
    }
    Ok(num / den)
}

/// `ln f_λ(q^{c_1}, …, q^{c_N})` in floating point, from the same product
/// with every factor written as a leading power times `1 - (small)`, so it
/// neither overflows nor cancels for large `λ`.
pub fn ln_qdimension(ty: TypeLabel, w: &[i64], param: &BaseParam) -> Result<f64> {
    validate_weight(ty, w)?;
    let eps = ty
        .eps_half()
        .ok_or_else(|| Error::Unsupported("product formula for type A".into()))?;
    let n = w.len();
    let ln_r = -param.r_f64().ln();
    let classical = param.is_classical();
    let ln_one_minus = |x: f64| (-(-x).exp()).ln_1p();
    // Y(a) - Y(b) = (u^a - u^b)(1 - u^{-a-b}) with u = r^{-2}, a > |b|.
    let ln_y_diff = |a: i64, b: i64| {
        if classical {
            ((a * a - b * b) as f64).ln()
        } else {
            let l = 2.0 * ln_r;
            a as f64 * l + ln_one_minus((a - b) as f64 * l) + ln_one_minus((a + b) as f64 * l)
        }
    };
    let ln_s = |lh: i64| {
        if classical {
            (lh as f64).ln()
        } else {
            let x = (eps * lh) as f64 * ln_r;
            x + ln_one_minus(2.0 * x)
        }
    };
    let sum = |l: &[i64]| {
        let mut acc = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                acc += ln_y_diff(l[i], l[j]);
            }
            if eps > 0 {
                acc += ln_s(l[i]);
            }
        }
        acc
    };
    Ok(sum(&shifted_indices_half(ty, w)) - sum(&shifted_indices_half(ty, &vec![0; n])))
}

/// A character together with its quantum dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterPoly {
    pub type_label: TypeLabel,
    pub weight: Vec<i64>,
    pub poly: Arc<LaurentPoly>,
    pub qdim: BigRational,
}

impl CharacterPoly {
    pub fn rank(&self) -> usize {
        self.weight.len()
    }
}

pub fn character(ty: TypeLabel, w: &[i64], param: &BaseParam) -> Result<CharacterPoly> {
    let poly = character_poly(ty, w)?;
    let qdim = poly.evaluate(&scaled_point(ty, w.len(), param))?;
    Ok(CharacterPoly {
        type_label: ty,
        weight: w.to_vec(),
        poly,
        qdim,
    })
}

impl Serialize for CharacterPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let poly = serde_json::to_value(&*self.poly).map_err(serde::ser::Error::custom)?;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("vars", &poly["vars"])?;
        m.serialize_entry("terms", &poly["terms"])?;
        m.serialize_entry("type", &self.type_label)?;
        m.serialize_entry("N", &self.rank())?;
        m.serialize_entry("lambda", &self.weight)?;
        m.serialize_entry("qdim", &format_rational(&self.qdim))?;
        m.end()
    }
}

/// `f_λ + f_λ̃` for `λ_N > 0`, and `f_λ` itself when `λ_N = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedDCharacter {
    pub signature: Signature,
    pub poly: LaurentPoly,
    pub qdim: BigRational,
}

pub fn symmetrized_d_poly(sig: &Signature) -> Result<LaurentPoly> {
    let f = character_poly(TypeLabel::D, sig.parts())?;
    if sig.parts().last().is_some_and(|&x| x > 0) {
        let g = character_poly(TypeLabel::D, &sig.tilde())?;
        Ok(&*f + &*g)
    } else {
        Ok((*f).clone())
    }
}

pub fn symmetrized_d_character(sig: &Signature, param: &BaseParam) -> Result<SymmetrizedDCharacter> {
    let poly = symmetrized_d_poly(sig)?;
    let qdim = poly.evaluate(&scaled_point(TypeLabel::D, sig.rank(), param))?;
    Ok(SymmetrizedDCharacter {
        signature: sig.clone(),
        poly,
        qdim,
    })
}

/// Basis element of the branching expansion: `f_λ` for B and C, the
/// symmetrized character for D.
pub fn basis_poly(ty: TypeLabel, sig: &Signature) -> Result<Arc<LaurentPoly>> {
    match ty {
        TypeLabel::D => Ok(Arc::new(symmetrized_d_poly(sig)?)),
        TypeLabel::A => Err(Error::Unsupported("branching basis for type A".into())),
        _ => character_poly(ty, sig.parts()),
    }
}

pub fn basis_qdim(ty: TypeLabel, sig: &Signature, param: &BaseParam) -> Result<BigRational> {
    basis_poly(ty, sig)?.evaluate(&scaled_point(ty, sig.rank(), param))
}

/// Normalized character `g_λ(z) = f_λ(q^{c_1} z_1, …) / f_λ(q^{c_1}, …)` at a
/// torus point. For type D the symmetrized character is used, with `λ_N`
/// replaced by `|λ_N|`.
pub fn normalized_character_eval(
    ty: TypeLabel,
    w: &[i64],
    z: &[Complex64],
    param: &BaseParam,
) -> Result<Complex64> {
    if z.len() != w.len() {
        return Err(Error::PointLength {
            expected: w.len(),
            got: z.len(),
        });
    }
    validate_weight(ty, w)?;
    let poly: Arc<LaurentPoly> = match ty {
        TypeLabel::D => {
            let mut parts = w.to_vec();
            if let Some(x) = parts.last_mut() {
                *x = x.abs();
            }
            Arc::new(symmetrized_d_poly(&Signature::new(parts)?)?)
        }
        _ => character_poly(ty, w)?,
    };
    let point = scaled_point(ty, w.len(), param);
    let qdim = rational_to_f64(&poly.evaluate(&point)?);
    let scaled: Vec<Complex64> = point
        .iter()
        .zip(z)
        .map(|(p, zi)| zi * rational_to_f64(p))
        .collect();
    Ok(poly.evaluate_complex(&scaled)? / qdim)
}

/// Checks `f_λ + f_λ̃ = det[t^{l} + t^{-l}] / V^s` exactly, read literally (so
/// the left side is `2 f_λ` when `λ_N = 0`).
pub fn type_d_remark_check(sig: &Signature) -> Result<bool> {
    let n = sig.rank();
    let lhs = &*character_poly(TypeLabel::D, sig.parts())? + &*character_poly(TypeLabel::D, &sig.tilde())?;
    if n == 0 {
        return Ok(lhs == LaurentPoly::constant(0, rat(2)));
    }
    let rhs = divide_by_factors(d_determinant(sig.parts(), 1)?, &denominator_factors(TypeLabel::D, n))?;
    Ok(lhs == rhs)
}

/// Classical dimension from the Weyl dimension formula
/// `∏_{α>0} (λ+ρ, α) / (ρ, α)`; independent of the determinant pipeline.
pub fn weyl_dimension(ty: TypeLabel, w: &[i64]) -> Result<BigRational> {
    validate_weight(ty, w)?;
    let n = w.len();
    // Half units throughout so that ρ_B is integral.
    let rho: Vec<i64> = (1..=n)
        .map(|i| {
            let k = (n - i) as i64;
            match ty {
                TypeLabel::A => n as i64 + 1 - 2 * i as i64,
                TypeLabel::B => 2 * k + 1,
                TypeLabel::C => 2 * k + 2,
                TypeLabel::D => 2 * k,
            }
        })
        .collect();
    let a: Vec<i64> = w.iter().zip(&rho).map(|(l, r)| 2 * l + r).collect();
    let mut dim = BigRational::one();
    let mut factor = |num: i64, den: i64| dim *= BigRational::new(num.into(), den.into());
    for i in 0..n {
        for j in i + 1..n {
            factor(a[i] - a[j], rho[i] - rho[j]);
            if ty.is_bcd() {
                factor(a[i] + a[j], rho[i] + rho[j]);
            }
        }
        if matches!(ty, TypeLabel::B | TypeLabel::C) {
            factor(a[i], rho[i]);
        }
    }
    Ok(dim)
}

/// Checks invariance under generators of the Weyl group: adjacent swaps,
/// plus `t_1 → t_1^{-1}` (B, C) or `(t_1, t_2) → (t_1^{-1}, t_2^{-1})` (D).
pub fn is_weyl_invariant(ty: TypeLabel, p: &LaurentPoly) -> bool {
    let n = p.nvars();
    if (0..n.saturating_sub(1)).any(|i| p.swap_vars(i, i + 1) != *p) {
        return false;
    }
    match ty {
        TypeLabel::A => true,
        TypeLabel::B | TypeLabel::C => n == 0 || p.invert_var(0) == *p,
        TypeLabel::D => n < 2 || p.invert_var(0).invert_var(1) == *p,
    }
}

/// Exponents `(2a + 1, 2b + 1)` of `|1 - z|` and `|1 + z|` in the one-variable
/// part of the Weyl integration density.
pub fn weyl_measure_exponents(ty: TypeLabel) -> Result<(u32, u32)> {
    match ty {
        TypeLabel::B => Ok((2, 0)),
        TypeLabel::C => Ok((2, 2)),
        _ => Err(Error::Unsupported(format!("torus measure for type {ty}"))),
    }
}

fn abs_sq(p: &LaurentPoly) -> LaurentPoly {
    let n = p.nvars();
    let conj = p.map_exponents(n, |e| e.iter().map(|x| -x).collect());
    p * &conj
}

fn torus_density(n: usize, exps: (u32, u32)) -> LaurentPoly {
    let one = LaurentPoly::<BigRational>::one(n);
    let t = |i: usize| LaurentPoly::var_power(n, i, 1);
    let mut w = one.clone();
    for i in 0..n {
        for j in i + 1..n {
            w = &w * &abs_sq(&(&t(i) - &t(j)));
            w = &w * &abs_sq(&(&one - &(&t(i) * &t(j))));
        }
        for _ in 0..exps.0 / 2 {
            w = &w * &abs_sq(&(&one - &t(i)));
        }
        for _ in 0..exps.1 / 2 {
            w = &w * &abs_sq(&(&one + &t(i)));
        }
    }
    w
}

fn factorial(n: usize) -> BigRational {
    (1..=n as i64).fold(BigRational::one(), |acc, k| acc * rat(k))
}

/// `∫ f_λ conj(f_μ) dm` over `T^N` with density
/// `(1/(N! 2^N)) ∏_{i<j}|t_i - t_j|^2 |1 - t_i t_j|^2 ∏_j |1 - t_j|^{e0} |1 + t_j|^{e1}`,
/// computed exactly as a constant term. `exps` must be even.
pub fn torus_pairing_exact(
    ty: TypeLabel,
    lambda: &Signature,
    mu: &Signature,
    exps: (u32, u32),
) -> Result<BigRational> {
    if lambda.rank() != mu.rank() {
        return Err(Error::VariableCountMismatch {
            left: lambda.rank(),
            right: mu.rank(),
        });
    }
    if !exps.0.is_multiple_of(2) || !exps.1.is_multiple_of(2) {
        return Err(Error::Unsupported("odd density exponents".into()));
    }
    let n = lambda.rank();
    let f = character_poly(ty, lambda.parts())?;
    let g = character_poly(ty, mu.parts())?;
    let g_conj = g.map_exponents(n, |e| e.iter().map(|x| -x).collect());
    let integrand = &(&*f * &g_conj) * &torus_density(n, exps);
    let norm = factorial(n) * rat(1i64 << n);
    Ok(integrand.constant_term() / norm)
}

/// `|∫ f_λ conj(f_μ) dm - δ_{λμ}|` for the Weyl measure of type B or C,
/// estimated with the `M^N`-point trapezoid rule on the torus (exact once
/// `M` exceeds the trigonometric degree of the integrand).
pub fn torus_orthogonality_check(
    ty: TypeLabel,
    lambda: &Signature,
    mu: &Signature,
    order: usize,
) -> Result<f64> {
    let exps = weyl_measure_exponents(ty)?;
    if lambda.rank() != mu.rank() {
        return Err(Error::VariableCountMismatch {
            left: lambda.rank(),
            right: mu.rank(),
        });
    }
    if order == 0 {
        return Err(Error::InvalidParameter("quadrature order must be positive".into()));
    }
    let n = lambda.rank();
    let f = character_poly(ty, lambda.parts())?.to_float();
    let g = character_poly(ty, mu.parts())?.to_float();
    let roots: Vec<Complex64> = (0..order)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / order as f64))
        .collect();
    let total = order.pow(n as u32);
    let mut acc = Complex64::zero();
    let mut z = vec![Complex64::one(); n];
    for idx in 0..total {
        let mut k = idx;
        for zi in z.iter_mut() {
            *zi = roots[k % order];
            k /= order;
        }
        let mut dens = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                dens *= (z[i] - z[j]).norm_sqr() * (Complex64::one() - z[i] * z[j]).norm_sqr();
            }
            dens *= (Complex64::one() - z[i]).norm_sqr().powi(exps.0 as i32 / 2);
            dens *= (Complex64::one() + z[i]).norm_sqr().powi(exps.1 as i32 / 2);
        }
        acc += f.evaluate_complex(&z)? * g.evaluate_complex(&z)?.conj() * dens;
    }
    let norm = (1..=n).product::<usize>() as f64 * 2f64.powi(n as i32) * total as f64;
    let value = acc / norm;
    let delta = if lambda == mu { 1.0 } else { 0.0 };
    Ok((value - delta).norm())
}

/// Weight multiplicities as a map, for display.
pub fn weight_table(p: &LaurentPoly) -> BTreeMap<Vec<i32>, String> {
    p.terms()
        .map(|(e, c)| (e.0.clone(), format_rational(c)))
        .collect()
}
