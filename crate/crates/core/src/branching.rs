//! Stochastic links from rank `N` to rank `N - 1`.
//!
//! The basis polynomial of `λ` is restricted by fixing `t_N = q^{c(X)_N}`
//! and expanded back into rank `N - 1` basis polynomials by repeatedly
//! peeling off the lex-largest dominant monomial. With `a_μ` the expansion
//! coefficients, the link is `Λ(λ, μ) = a_μ qdim(μ) / qdim(λ)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::{
    basis_poly, basis_qdim, normalized_character_eval, scaled_point, weyl_dimension, Signature,
    TypeLabel,
};
use crate::error::{Error, Result};
use crate::laurent::{DominanceCone, LaurentPoly};
use crate::param::{rational_to_f64, BaseParam};

/// One row `Λ(λ, ·)` of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkRow {
    pub source: Signature,
    pub entries: BTreeMap<Signature, BigRational>,
}

impl LinkRow {
    pub fn sum(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn is_stochastic(&self) -> bool {
        self.sum().is_one() && self.entries.values().all(|w| !w.is_negative())
    }

    pub fn get(&self, mu: &Signature) -> BigRational {
        self.entries.get(mu).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_f64(&self) -> BTreeMap<Signature, f64> {
        self.entries
            .iter()
            .map(|(k, v)| (k.clone(), rational_to_f64(v)))
            .collect()
    }
}

pub type LinkTable = BTreeMap<Signature, LinkRow>;

/// Basis polynomial of `λ` with the last variable fixed at `q^{c(X)_N}`.
pub fn restrict(ty: TypeLabel, lambda: &Signature, param: &BaseParam) -> Result<LaurentPoly> {
    let n = lambda.rank();
    if n == 0 {
        return Err(Error::InvalidParameter("cannot restrict a rank-0 signature".into()));
    }
    let last = param.r_pow(ty.scaling_exponent(n, n));
    basis_poly(ty, lambda)?.substitute_last(&last)
}

/// Coefficients of `p` in the rank-`p.nvars()` basis (`f_μ` for B, C and the
/// symmetrized characters for D).
pub fn expand_in_characters(
    ty: TypeLabel,
    p: &LaurentPoly,
) -> Result<BTreeMap<Signature, BigRational>> {
    let mut rem = p.clone();
    let mut out = BTreeMap::new();
    while !rem.is_zero() {
        let (e, c) = rem
            .leading_dominant_term(DominanceCone::Nonnegative)
            .ok_or_else(|| {
                Error::NotInSpan(format!("{} non-dominant terms remain", rem.len()))
            })?;
        let mu = Signature::new(e.0.iter().map(|&x| x as i64).collect())?;
        let b = basis_poly(ty, &mu)?;
        let top = b
            .coeff(&e.0)
            .ok_or_else(|| Error::NotInSpan(format!("basis element {mu} misses its top weight")))?;
        let a = c / top;
        rem = &rem - &b.scale(&a);
        out.insert(mu, a);
    }
    Ok(out)
}

/// Exact link row `Λ(λ, ·)`.
pub fn link_row(ty: TypeLabel, lambda: &Signature, param: &BaseParam) -> Result<LinkRow> {
    if ty == TypeLabel::A {
        return Err(Error::Unsupported("links for type A".into()));
    }
    let restricted = restrict(ty, lambda, param)?;
    let coeffs = expand_in_characters(ty, &restricted)?;
    let denom = basis_qdim(ty, lambda, param)?;
    let entries = coeffs
        .into_iter()
        .map(|(mu, a)| {
            let w = a * basis_qdim(ty, &mu, param)? / &denom;
            Ok((mu, w))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(LinkRow {
        source: lambda.clone(),
        entries,
    })
}

/// Link rows for many sources, computed in parallel.
pub fn link_rows(ty: TypeLabel, sources: &[Signature], param: &BaseParam) -> Result<LinkTable> {
    sources
        .par_iter()
        .map(|s| link_row(ty, s, param).map(|r| (s.clone(), r)))
        .collect()
}

/// A finitely supported measure on signatures of one rank, with the mass
/// known to lie outside the support recorded as `tail`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureMeasure {
    pub rank: usize,
    pub weights: BTreeMap<Signature, f64>,
    pub tail: f64,
}

impl SignatureMeasure {
    pub fn total(&self) -> f64 {
        self.weights.values().sum()
    }

    pub fn get(&self, s: &Signature) -> f64 {
        self.weights.get(s).copied().unwrap_or(0.0)
    }
}

/// `m Λ`: pushes a rank-`N` measure to rank `N - 1`. The tail is carried
/// over unchanged since link rows are stochastic.
pub fn pushforward(m: &SignatureMeasure, rows: &LinkTable) -> Result<SignatureMeasure> {
    if m.rank == 0 {
        return Err(Error::InvalidParameter("cannot push a rank-0 measure".into()));
    }
    let mut out: BTreeMap<Signature, f64> = BTreeMap::new();
    for (lambda, w) in &m.weights {
        let row = rows
            .get(lambda)
            .ok_or_else(|| Error::MissingRow(lambda.dotted()))?;
        for (mu, l) in &row.entries {
            *out.entry(mu.clone()).or_insert(0.0) += w * rational_to_f64(l);
        }
    }
    Ok(SignatureMeasure {
        rank: m.rank - 1,
        weights: out,
        tail: m.tail,
    })
}

/// Rank `N - 1` signatures `μ` with `μ_i <= λ_i`; every link target lies here.
pub fn candidate_targets(lambda: &Signature) -> Vec<Signature> {
    let n = lambda.rank();
    if n == 0 {
        return Vec::new();
    }
    let caps = &lambda.parts()[..n - 1];
    let mut out = Vec::new();
    fn rec(caps: &[i64], prev: i64, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if cur.len() == caps.len() {
            out.push(Signature::new(cur.clone()).expect("decreasing by construction"));
            return;
        }
        let hi = caps[cur.len()].min(prev);
        for x in 0..=hi {
            cur.push(x);
            rec(caps, x, cur, out);
            cur.pop();
        }
    }
    rec(caps, i64::MAX, &mut Vec::new(), &mut out);
    out.sort();
    out
}

const LSQ_ATTEMPTS: usize = 5;

/// Solves `A x ≈ b` in the least-squares sense, returning `x` and the
/// relative residual; `None` when `A` is numerically rank deficient.
fn least_squares(a: DMatrix<Complex64>, b: DVector<Complex64>) -> Option<(DVector<Complex64>, f64)> {
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    if sv.is_empty() || smin <= smax * 1e-10 {
        return None;
    }
    let x = svd.solve(&b, 0.0).ok()?;
    let res = (&a * &x - &b).norm() / b.norm().max(1e-300);
    Some((x, res))
}

fn random_unit_points(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| {
            (0..dim)
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect()
        })
        .collect()
}

/// Link row recomputed in floating point from normalized characters: the
/// identity `g_λ(z, 1) = Σ_μ Λ(λ, μ) g_μ(z)` is imposed at random torus
/// points and solved by least squares. Returns every candidate target,
/// including those with zero weight.
pub fn float_link_row(
    ty: TypeLabel,
    lambda: &Signature,
    param: &BaseParam,
    seed: u64,
) -> Result<BTreeMap<Signature, f64>> {
    let n = lambda.rank();
    if n == 0 || ty == TypeLabel::A {
        return Err(Error::Unsupported("float link needs type B, C or D and rank >= 1".into()));
    }
    let cands = candidate_targets(lambda);
    if n == 1 {
        return Ok(cands.into_iter().map(|c| (c, 1.0)).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 2 * cands.len() + 8;
    for _ in 0..LSQ_ATTEMPTS {
        let pts = random_unit_points(&mut rng, k, n - 1);
        let mut a = DMatrix::<Complex64>::zeros(k, cands.len());
        let mut b = DVector::<Complex64>::zeros(k);
        for (row, theta) in pts.iter().enumerate() {
            let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let mut full = z.clone();
            full.push(Complex64::one());
            b[row] = normalized_character_eval(ty, lambda.parts(), &full, param)?;
            for (col, mu) in cands.iter().enumerate() {
                a[(row, col)] = normalized_character_eval(ty, mu.parts(), &z, param)?;
            }
        }
        if let Some((x, res)) = least_squares(a, b) {
            if res < 1e-8 {
                return Ok(cands.into_iter().zip(x.iter().map(|c| c.re)).collect());
            }
        }
    }
    Err(Error::IllConditioned(LSQ_ATTEMPTS))
}

/// `(z^{l} - z^{-l}) / (z^{ε} - z^{-ε})` at `z = e^{iθ}`, as the finite sum
/// `Σ_k z^{l - ε - 2εk}`; `l` and `ε` in half units.
fn divided_entry_numeric(l_half: i64, eps_half: i64, theta: f64) -> Complex64 {
    let m = l_half / eps_half;
    (0..m)
        .map(|k| {
            let e_half = l_half - eps_half - 2 * eps_half * k;
            Complex64::from_polar(1.0, 0.5 * e_half as f64 * theta)
        })
        .sum()
}

fn det_complex(rows: Vec<Vec<Complex64>>) -> Complex64 {
    let n = rows.len();
    if n == 0 {
        return Complex64::one();
    }
    DMatrix::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Classical basis character evaluated on the unit torus directly from the
/// Weyl determinant formula, without building any polynomial.
pub fn classical_character_numeric(ty: TypeLabel, w: &[i64], theta: &[f64]) -> Result<Complex64> {
    let n = w.len();
    if theta.len() != n {
        return Err(Error::PointLength {
            expected: n,
            got: theta.len(),
        });
    }
    let y: Vec<f64> = theta.iter().map(|t| 2.0 * t.cos()).collect();
    let mut vs = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            vs *= y[i] - y[j];
        }
    }
    match ty {
        TypeLabel::B | TypeLabel::C => {
            let eps = ty.eps_half().expect("B or C");
            let rows = (0..n)
                .map(|i| {
                    let l_half = 2 * w[i] + ty.c_half(n - i);
                    theta.iter().map(|&t| divided_entry_numeric(l_half, eps, t)).collect()
                })
                .collect();
            Ok(det_complex(rows) / vs)
        }
        TypeLabel::D => {
            let det = |sign: f64| {
                let rows = (0..n)
                    .map(|i| {
                        let l = (w[i] + (n - 1 - i) as i64) as f64;
                        theta
                            .iter()
                            .map(|&t| {
                                Complex64::from_polar(1.0, l * t)
                                    + sign * Complex64::from_polar(1.0, -l * t)
                            })
                            .collect()
                    })
                    .collect();
                det_complex(rows)
            };
            if w.last().is_some_and(|&x| x > 0) {
                Ok(det(1.0) / vs)
            } else {
                Ok((det(1.0) + det(-1.0)) / (2.0 * vs))
            }
        }
        TypeLabel::A => Err(Error::Unsupported("classical oracle for type A".into())),
    }
}

/// Classical dimension of the basis element (twice the Weyl dimension for
/// symmetrized type D characters with `λ_N > 0`).
pub fn classical_basis_dimension(ty: TypeLabel, sig: &Signature) -> Result<BigRational> {
    let d = weyl_dimension(ty, sig.parts())?;
    if ty == TypeLabel::D && sig.parts().last().is_some_and(|&x| x > 0) {
        Ok(d * BigRational::from_integer(2.into()))
    } else {
        Ok(d)
    }
}

/// Classical branching multiplicities `m^λ_μ` from random evaluations of
/// the Weyl formula at `q = 1`, rounded to integers.
pub fn classical_branching(
    ty: TypeLabel,
    lambda: &Signature,
    seed: u64,
) -> Result<BTreeMap<Signature, u64>> {
    let n = lambda.rank();
    if n == 0 || ty == TypeLabel::A {
        return Err(Error::Unsupported("classical branching needs type B, C or D and rank >= 1".into()));
    }
    let cands = candidate_targets(lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = 3 * cands.len() + 10;
    for _ in 0..LSQ_ATTEMPTS {
        let pts = random_unit_points(&mut rng, k, n - 1);
        let mut a = DMatrix::<Complex64>::zeros(k, cands.len());
        let mut b = DVector::<Complex64>::zeros(k);
        for (row, theta) in pts.iter().enumerate() {
            let mut full = theta.clone();
            full.push(0.0);
            b[row] = classical_character_numeric(ty, lambda.parts(), &full)?;
            for (col, mu) in cands.iter().enumerate() {
                a[(row, col)] = classical_character_numeric(ty, mu.parts(), theta)?;
            }
        }
        let Some((x, res)) = least_squares(a, b) else {
            continue;
        };
        let rounded: Vec<f64> = x.iter().map(|c| c.re.round()).collect();
        let off = x
            .iter()
            .zip(&rounded)
            .map(|(c, r)| (c.re - r).abs().max(c.im.abs()))
            .fold(0.0, f64::max);
        if res < 1e-6 && off < 1e-6 && rounded.iter().all(|&r| r >= 0.0) {
            return Ok(cands
                .into_iter()
                .zip(rounded)
                .filter(|(_, m)| *m > 0.0)
                .map(|(c, m)| (c, m as u64))
                .collect());
        }
    }
    Err(Error::IllConditioned(LSQ_ATTEMPTS))
}

/// Multiplicity of a single target.
pub fn classical_branching_oracle(
    ty: TypeLabel,
    lambda: &Signature,
    mu: &Signature,
    seed: u64,
) -> Result<u64> {
    Ok(classical_branching(ty, lambda, seed)?
        .get(mu)
        .copied()
        .unwrap_or(0))
}

/// Link row predicted by the classical oracle: `m^λ_μ dim(μ) / dim(λ)`.
pub fn classical_link_row(ty: TypeLabel, lambda: &Signature, seed: u64) -> Result<LinkRow> {
    let mult = classical_branching(ty, lambda, seed)?;
    let dl = classical_basis_dimension(ty, lambda)?;
    let entries = mult
        .into_iter()
        .map(|(mu, m)| {
            let w = BigRational::from_integer(m.into()) * classical_basis_dimension(ty, &mu)? / &dl;
            Ok((mu, w))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(LinkRow {
        source: lambda.clone(),
        entries,
    })
}

/// Exact value of `Σ_μ Λ(λ, μ) qdim(μ)` against `qdim(λ)`; both are equal
/// by construction, so this is a consistency probe on the expansion.
pub fn expansion_residual(ty: TypeLabel, lambda: &Signature, param: &BaseParam) -> Result<BigRational> {
    let restricted = restrict(ty, lambda, param)?;
    let coeffs = expand_in_characters(ty, &restricted)?;
    let point = scaled_point(ty, lambda.rank() - 1, param);
    let mut rebuilt = LaurentPoly::zero(lambda.rank() - 1);
    for (mu, a) in &coeffs {
        rebuilt = &rebuilt + &basis_poly(ty, mu)?.scale(a);
    }
    let diff = &rebuilt - &restricted;
    if diff.is_zero() {
        Ok(BigRational::zero())
    } else {
        diff.evaluate(&point)
    }
}
