//! Coherent measures built from the generating function
//!
//! `Φ_ω(x) = e^{γ(x-1)} ∏ (1 + β̃_i (x-1)) / (1 - α̃_i (x-1))`,
//! `α̃ = α(1 + α/2)`, `β̃ = β(1 - β/2)`, and `Ψ_ω(z) = Φ_ω((z + 1/z)/2)`.
//!
//! The rank-`N` character `∏_i Ψ_ω(q^{c_i} z_i) / Ψ_ω(q^{c_i})` is expanded
//! in normalized characters; its coefficients are the weights `P_N(λ)`.
//! They are computed from the torus Fourier coefficients of `Ψ_ω`:
//! `P_N(λ) = qdim(λ) det[E(l_i, l⁰_j)] / (2^N ∏_j Ψ_ω(q^{c_j}))`, with
//! `E(l, m) = 2(ψ̂(l - m) - ψ̂(l + m))` and `l⁰` the shifted indices of `0`.

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::SignatureMeasure;
use crate::characters::{character_poly, qdimension_product, scaled_point, Signature, TypeLabel};
use crate::error::{Error, Result};
use crate::markov::{fourier_entry, shifted_indices};
use crate::numeric::{det_f64, ln_factorial};
use crate::param::{rational_to_f64, BaseParam};

/// Parameters `(α, β, γ)` with finitely many nonzero `α_i`, `β_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: f64,
}

impl OmegaParams {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: f64) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        let decreasing = |v: &[f64]| v.windows(2).all(|w| w[0] >= w[1]);
        if alpha.iter().chain(&beta).chain([&gamma]).any(|x| !x.is_finite() || *x < 0.0) {
            return bad("α, β, γ must be finite and nonnegative");
        }
        if !decreasing(&alpha) || !decreasing(&beta) {
            return bad("α and β must be weakly decreasing");
        }
        if beta.first().is_some_and(|&b| b > 1.0) {
            return bad("β_1 must be at most 1");
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn zero() -> Self {
        Self {
            alpha: Vec::new(),
            beta: Vec::new(),
            gamma: 0.0,
        }
    }

    pub fn gamma_only(gamma: f64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), gamma)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha_tilde(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a * (1.0 + a / 2.0)).filter(|&a| a > 0.0).collect()
    }

    pub fn beta_tilde(&self) -> Vec<f64> {
        self.beta.iter().map(|b| b * (1.0 - b / 2.0)).filter(|&b| b > 0.0).collect()
    }

    /// Radius of convergence of the Taylor series of `Φ_ω` at 0.
    pub fn pole(&self) -> f64 {
        self.alpha_tilde()
            .iter()
            .map(|a| 1.0 + 1.0 / a)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma == 0.0 && self.alpha_tilde().is_empty() && self.beta_tilde().is_empty()
    }

    /// Parameters of `Φ_ω^2`.
    pub fn doubled(&self) -> Self {
        let twice = |v: &[f64]| {
            let mut out: Vec<f64> = v.iter().flat_map(|&x| [x, x]).collect();
            out.sort_by(|a, b| b.total_cmp(a));
            out
        };
        Self {
            alpha: twice(&self.alpha),
            beta: twice(&self.beta),
            gamma: 2.0 * self.gamma,
        }
    }
}

/// `Φ_ω(x)` from the closed-form product.
pub fn phi_closed(omega: &OmegaParams, x: f64) -> Result<f64> {
    let pole = omega.pole();
    if x >= pole {
        return Err(Error::NonConvergent { x, radius: pole });
    }
    let mut v = (omega.gamma * (x - 1.0)).exp();
    for b in omega.beta_tilde() {
        v *= 1.0 + b * (x - 1.0);
    }
    for a in omega.alpha_tilde() {
        v /= 1.0 - a * (x - 1.0);
    }
    Ok(v)
}

/// `Ψ_ω(t) = Φ_ω((t + 1/t)/2)` for real `t > 0`.
pub fn psi_eval(omega: &OmegaParams, t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::InvalidParameter("Ψ is evaluated at t > 0".into()));
    }
    phi_closed(omega, (t + 1.0 / t) / 2.0)
}

/// Taylor coefficients `φ(0..=M)` of `Φ_ω` and a certified bound on
/// `Σ_{n>M} φ(n) x^n` at `x = x_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesCoeffs {
    pub order: usize,
    pub coeffs: Vec<f64>,
    pub tail_bound: f64,
    pub x_max: f64,
}

impl SeriesCoeffs {
    /// `φ(k)`, zero for negative `k`.
    pub fn get(&self, k: i64) -> Result<f64> {
        if k < 0 {
            return Ok(0.0);
        }
        self.coeffs.get(k as usize).copied().ok_or_else(|| {
            Error::InvalidParameter(format!("coefficient {k} beyond order {}", self.order))
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Bound on `Σ_{n>m} [x^n] e^{γ(x-1)} x^n`.
fn exp_tail(gamma: f64, m: usize, x: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let gx = gamma * x;
    let ratio = gx / (m as f64 + 2.0);
    if ratio >= 1.0 {
        return (gamma * (x - 1.0)).exp();
    }
    let ln_first = -gamma + (m as f64 + 1.0) * gx.ln() - ln_factorial(m as u64 + 1);
    ln_first.exp() / (1.0 - ratio)
}

/// Bound on the tail of `1 / (1 + a - a x)` beyond degree `m`.
fn geometric_tail(a: f64, m: usize, x: f64) -> f64 {
    let rho = a * x / (1.0 + a);
    rho.powi(m as i32 + 1) / ((1.0 + a) * (1.0 - rho))
}

fn series_tail_bound(omega: &OmegaParams, order: usize, x: f64) -> Result<f64> {
    let alphas = omega.alpha_tilde();
    let n_beta = omega.beta_tilde().len();
    let n_heavy = alphas.len() + usize::from(omega.gamma > 0.0);
    if n_heavy == 0 {
        return Ok(if order >= n_beta { 0.0 } else { phi_closed(omega, x)? });
    }
    if order < n_beta {
        return phi_closed(omega, x);
    }
    // If Σ n_k > M over all factors, some non-polynomial factor has
    // n_k > (M - #β) / (#heavy factors).
    let m = (order - n_beta) / n_heavy;
    let exp_val = (omega.gamma * (x - 1.0)).exp();
    let lin_val: f64 = omega.beta_tilde().iter().map(|b| 1.0 + b * (x - 1.0)).product();
    let geo_vals: Vec<f64> = alphas.iter().map(|a| 1.0 / (1.0 - a * (x - 1.0))).collect();
    let geo_prod: f64 = geo_vals.iter().product();
    let mut bound = 0.0;
    if omega.gamma > 0.0 {
        bound += exp_tail(omega.gamma, m, x) * lin_val * geo_prod;
    }
    for (k, a) in alphas.iter().enumerate() {
        let others = geo_prod / geo_vals[k];
        bound += geometric_tail(*a, m, x) * lin_val * exp_val * others;
    }
    Ok(bound)
}

const MAX_ORDER: usize = 1 << 16;

/// Truncated Taylor series of `Φ_ω`, with the order doubled until the tail
/// bound at `max(x_max, 1)` drops below `tol / 10`.
pub fn phi_coefficients(omega: &OmegaParams, x_max: f64, tol: f64) -> Result<SeriesCoeffs> {
    phi_coefficients_min_order(omega, x_max, tol, 16)
}

pub fn phi_coefficients_min_order(
    omega: &OmegaParams,
    x_max: f64,
    tol: f64,
    min_order: usize,
) -> Result<SeriesCoeffs> {
    let x = x_max.max(1.0);
    let pole = omega.pole();
    if x >= pole {
        return Err(Error::NonConvergent { x, radius: pole });
    }
    let mut order = min_order.max(1);
    let mut bound = series_tail_bound(omega, order, x)?;
    while bound >= tol / 10.0 {
        order *= 2;
        if order > MAX_ORDER {
            return Err(Error::NonConvergent { x, radius: pole });
        }
        bound = series_tail_bound(omega, order, x)?;
    }
    let mut c = vec![0.0; order + 1];
    c[0] = (-omega.gamma).exp();
    for n in 1..=order {
        c[n] = c[n - 1] * omega.gamma / n as f64;
    }
    for b in omega.beta_tilde() {
        for n in (1..=order).rev() {
            c[n] = (1.0 - b) * c[n] + b * c[n - 1];
        }
        c[0] *= 1.0 - b;
    }
    for a in omega.alpha_tilde() {
        let rho = a / (1.0 + a);
        let mut prev = 0.0;
        for v in c.iter_mut() {
            prev = rho * prev + *v / (1.0 + a);
            *v = prev;
        }
    }
    Ok(SeriesCoeffs {
        order,
        coeffs: c,
        tail_bound: bound,
        x_max: x,
    })
}

/// Fourier coefficients `ψ̂(-K..=K)` of `Ψ_ω` on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierCoeffs {
    pub half_width: usize,
    pub coeffs: Vec<f64>,
    pub tail_bound: f64,
}

impl FourierCoeffs {
    pub fn get(&self, m: i64) -> Result<f64> {
        if m.unsigned_abs() as usize > self.half_width {
            return Err(Error::FourierIndex {
                index: m,
                half_width: self.half_width,
            });
        }
        Ok(self.coeffs[(m + self.half_width as i64) as usize])
    }
}

/// `ψ̂(m) = Σ_{n >= |m|, n ≡ m (2)} φ(n) 2^{-n} C(n, (n+m)/2)`, the
/// coefficient extraction from `((z + 1/z)/2)^n`.
pub fn fourier_coefficients(omega: &OmegaParams, half_width: usize, tol: f64) -> Result<FourierCoeffs> {
    // Twice the half-width keeps every returned ψ̂(m) accurate relative to its
    // own size, not just to the absolute tolerance.
    let phi = phi_coefficients_min_order(omega, 1.0, tol, 2 * half_width + 32)?;
    let k = half_width as i64;
    let mut psi = vec![0.0; 2 * half_width + 1];
    // row[j] = 2^{-n} C(n, j)
    let mut row = vec![1.0];
    for n in 0..=phi.order {
        if n > 0 {
            let mut next = vec![0.0; n + 1];
            for j in 0..=n {
                let left = if j > 0 { row[j - 1] } else { 0.0 };
                let right = if j < n { row[j] } else { 0.0 };
                next[j] = 0.5 * (left + right);
            }
            row = next;
        }
        let f = phi.coeffs[n];
        if f == 0.0 {
            continue;
        }
        for (j, b) in row.iter().enumerate() {
            let m = 2 * j as i64 - n as i64;
            if m.abs() <= k {
                psi[(m + k) as usize] += f * b;
            }
        }
    }
    Ok(FourierCoeffs {
        half_width,
        coeffs: psi,
        tail_bound: phi.tail_bound,
    })
}

/// `x̂_i = (q^{c_i} + q^{-c_i}) / 2`, exactly and as floats.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPoints {
    pub exact: Vec<BigRational>,
    pub values: Vec<f64>,
}

pub fn scaled_points(ty: TypeLabel, n: usize, param: &BaseParam) -> ScaledPoints {
    let half = BigRational::new(1.into(), 2.into());
    let exact: Vec<BigRational> = scaled_point(ty, n, param)
        .into_iter()
        .map(|t| (t.recip() + t) * &half)
        .collect();
    let values = exact.iter().map(rational_to_f64).collect();
    ScaledPoints { exact, values }
}

/// `Ψ_ω(q^{c(X)_i})` for `i = 1..=n`.
pub fn psi_at_scaled(omega: &OmegaParams, ty: TypeLabel, n: usize, param: &BaseParam) -> Result<Vec<f64>> {
    scaled_points(ty, n, param)
        .values
        .iter()
        .map(|&x| phi_closed(omega, x))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub passed: bool,
    pub pole: f64,
    pub points: Vec<f64>,
    /// `pole - x̂_i`.
    pub margins: Vec<f64>,
    /// `Ψ_ω(q^{c_i})`, `NaN` past the pole.
    pub psi: Vec<f64>,
    /// 1-based index of the first failing point.
    pub first_violation: Option<usize>,
}

/// Checks that every `x̂_i`, `i <= n`, lies inside the radius of convergence
/// and that `Ψ_ω(q^{c_i}) > 0`.
pub fn admissibility_check(omega: &OmegaParams, ty: TypeLabel, n: usize, param: &BaseParam) -> AdmissibilityReport {
    let pole = omega.pole();
    let points = scaled_points(ty, n, param).values;
    let margins: Vec<f64> = points.iter().map(|x| pole - x).collect();
    let psi: Vec<f64> = points
        .iter()
        .map(|&x| phi_closed(omega, x).unwrap_or(f64::NAN))
        .collect();
    let first_violation = (0..n)
        .find(|&i| !(margins[i] > 0.0 && psi[i] > 0.0))
        .map(|i| i + 1);
    AdmissibilityReport {
        passed: first_violation.is_none(),
        pole,
        points,
        margins,
        psi,
        first_violation,
    }
}

/// Largest `n <= limit` for which the admissibility check passes.
pub fn max_admissible_rank(omega: &OmegaParams, ty: TypeLabel, param: &BaseParam, limit: usize) -> usize {
    let r = admissibility_check(omega, ty, limit, param);
    r.first_violation.map(|i| i - 1).unwrap_or(limit)
}

/// `det[φ(λ_j - j + i)]_{i,j}` with `φ(k) = 0` for `k < 0`.
pub fn toeplitz_minor(phi: &SeriesCoeffs, lambda: &[i64]) -> Result<f64> {
    let n = lambda.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = phi.get(lambda[j] - j as i64 + i as i64)?;
        }
    }
    Ok(det_f64(m))
}

/// Schur polynomial `s_λ(x)`, normalized so that `s_0 = 1`.
pub fn schur_at_scaled(lambda: &[i64], x: &[BigRational]) -> Result<BigRational> {
    if lambda.len() != x.len() {
        return Err(Error::PointLength {
            expected: lambda.len(),
            got: x.len(),
        });
    }
    character_poly(TypeLabel::A, lambda)?.evaluate(x)
}

pub fn schur_at_scaled_f64(lambda: &[i64], x: &[f64]) -> Result<f64> {
    if lambda.len() != x.len() {
        return Err(Error::PointLength {
            expected: lambda.len(),
            got: x.len(),
        });
    }
    character_poly(TypeLabel::A, lambda)?.to_float().evaluate(x)
}

/// `det[φ(λ_j - j + i)] s_λ(x̂) / ∏ Ψ_ω(q^{c_i})`: the Toeplitz-minor times
/// Schur-value expression. It sums to 1 over `λ` but is not the character
/// expansion for `N >= 1` (compare with [`coherent_weight`]).
pub fn schur_route_weight(
    omega: &OmegaParams,
    ty: TypeLabel,
    lambda: &Signature,
    param: &BaseParam,
    phi: &SeriesCoeffs,
) -> Result<f64> {
    let n = lambda.rank();
    let pts = scaled_points(ty, n, param);
    let norm: f64 = pts
        .values
        .iter()
        .map(|&x| phi_closed(omega, x))
        .product::<Result<f64>>()?;
    let minor = toeplitz_minor(phi, lambda.parts())?;
    let s = rational_to_f64(&schur_at_scaled(lambda.parts(), &pts.exact)?);
    Ok(minor * s / norm)
}

fn check_bc(ty: TypeLabel) -> Result<()> {
    match ty {
        TypeLabel::B | TypeLabel::C => Ok(()),
        _ => Err(Error::Unsupported(format!("coherent weights for type {ty}"))),
    }
}

/// Fourier half-width needed for entries `E(l_i, m_j)` between rank `n`
/// signatures of sizes at most `size_l` and `size_m`.
pub fn required_half_width(ty: TypeLabel, n: usize, size_l: i64, size_m: i64) -> usize {
    let top = shifted_indices(ty, &vec![0; n]).first().copied().unwrap_or(0);
    // (l_1 + m_1) / 2 with l_1 = 2 size_l + top in half units.
    (size_l + size_m + top).max(0) as usize
}

/// Weight `P_N(λ)` of the coherent measure.
pub fn coherent_weight(
    omega: &OmegaParams,
    ty: TypeLabel,
    lambda: &Signature,
    param: &BaseParam,
    psi: &FourierCoeffs,
) -> Result<f64> {
    check_bc(ty)?;
    let n = lambda.rank();
    let l = shifted_indices(ty, lambda.parts());
    let l0 = shifted_indices(ty, &vec![0; n]);
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = fourier_entry(psi, l[i], l0[j])?;
        }
    }
    let norm: f64 = psi_at_scaled(omega, ty, n, param)?.iter().product();
    let d = rational_to_f64(&qdimension_product(ty, lambda.parts(), param)?);
    Ok(d * det_f64(m) / (2f64.powi(n as i32) * norm))
}

/// A coherent measure together with its truncation data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentMeasure {
    pub measure: SignatureMeasure,
    /// Largest `|λ|` enumerated.
    pub max_size: i64,
    /// Certified bound on the Fourier truncation error per coefficient.
    pub fourier_tail: f64,
    /// Most negative raw weight seen (clamped to zero).
    pub min_raw_weight: f64,
}

const NEGATIVE_FLOOR: f64 = -1e-12;

/// Enumerates `λ` by increasing `|λ|` until the accumulated mass reaches
/// `1 - tol` or `|λ|` reaches `cutoff`; the remainder is the tail.
pub fn coherent_measure(
    omega: &OmegaParams,
    ty: TypeLabel,
    n: usize,
    param: &BaseParam,
    tol: f64,
    cutoff: Option<i64>,
) -> Result<CoherentMeasure> {
    check_bc(ty)?;
    let adm = admissibility_check(omega, ty, n, param);
    if !adm.passed {
        return Err(Error::Inadmissible(format!(
            "rank {n} fails at index {}",
            adm.first_violation.unwrap_or(0)
        )));
    }
    let limit = cutoff.unwrap_or(400);
    let psi_tol = (tol * 1e-3).max(1e-16);
    let mut psi = fourier_coefficients(omega, required_half_width(ty, n, limit.min(64), 0), psi_tol)?;
    let mut weights = std::collections::BTreeMap::new();
    let mut total = 0.0;
    let mut min_raw: f64 = 0.0;
    let mut size = 0;
    loop {
        if required_half_width(ty, n, size, 0) > psi.half_width {
            psi = fourier_coefficients(omega, required_half_width(ty, n, 2 * size, 0), psi_tol)?;
        }
        let level: Vec<Signature> = Signature::enumerate_size(n, size);
        let vals = level
            .par_iter()
            .map(|s| coherent_weight(omega, ty, s, param, &psi).map(|w| (s.clone(), w)))
            .collect::<Result<Vec<_>>>()?;
        for (s, w) in vals {
            min_raw = min_raw.min(w);
            if w < NEGATIVE_FLOOR {
                return Err(Error::NegativeWeight {
                    lambda: s.dotted(),
                    value: w,
                });
            }
            if w < 0.0 {
                log::debug!("clamping weight {w:e} at {s} to zero");
            }
            let w = w.max(0.0);
            total += w;
            weights.insert(s, w);
        }
        if total >= 1.0 - tol || size >= limit || n == 0 {
            break;
        }
        size += 1;
    }
    Ok(CoherentMeasure {
        measure: SignatureMeasure {
            rank: n,
            weights,
            tail: (1.0 - total).max(0.0),
        },
        max_size: size,
        fourier_tail: psi.tail_bound,
        min_raw_weight: min_raw,
    })
}

/// `ϰ(l; a, b) = Γ(2l + a + b + 1) / (2^l l! Γ(l + a + b + 1))` for
/// `a + b ∈ {0, 1}`; `a2 = 2a`, `b2 = 2b`.
pub fn kappa_normalizer(l: u64, a2: i32, b2: i32) -> Result<BigRational> {
    let fact = |k: u64| (1..=k).fold(num_bigint::BigInt::from(1), |acc, j| acc * j);
    let pow2 = num_bigint::BigInt::from(1) << l;
    match a2 + b2 {
        2 => Ok(BigRational::new(fact(2 * l + 1), fact(l + 1) * pow2 * fact(l))),
        0 => Ok(BigRational::new(fact(2 * l), fact(l) * pow2 * fact(l))),
        _ => Err(Error::Unsupported(format!(
            "ϰ needs a + b ∈ {{0, 1}}, got a = {a2}/2, b = {b2}/2"
        ))),
    }
}

/// Jacobi polynomial `P_n^{(a,b)}(x)` by the three-term recurrence.
pub fn jacobi_polynomial(n: u64, a: f64, b: f64, x: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + a + b;
        let a1 = 2.0 * k * (k + a + b) * (c - 2.0);
        let a2 = (c - 1.0) * (a * a - b * b);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `|s_λ(x) - det[p_{l_i}(x_j)] / ∏_{i<j}(x_i - x_j)|` with `p_l` the Jacobi
/// polynomial scaled to leading coefficient 1 and `l_i = λ_i + N - i`.
pub fn jacobi_identity_check(lambda: &[i64], x: &[f64], a2: i32, b2: i32) -> Result<f64> {
    let n = lambda.len();
    if x.len() != n {
        return Err(Error::PointLength { expected: n, got: x.len() });
    }
    let (a, b) = (a2 as f64 / 2.0, b2 as f64 / 2.0);
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        let l = (lambda[i] + (n - 1 - i) as i64) as u64;
        let k = rational_to_f64(&kappa_normalizer(l, a2, b2)?);
        for j in 0..n {
            m[i][j] = jacobi_polynomial(l, a, b, x[j]) / k;
        }
    }
    let mut vand = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            vand *= x[i] - x[j];
        }
    }
    if vand == 0.0 {
        return Err(Error::InvalidParameter("coincident points".into()));
    }
    let rhs = det_f64(m) / vand;
    Ok((schur_at_scaled_f64(lambda, x)? - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::bessel_i;

    fn sig(p: &[i64]) -> Signature {
        Signature::new(p.to_vec()).unwrap()
    }

    #[test]
    fn omega_validation() {
        assert!(OmegaParams::new(vec![0.1, 0.2], vec![], 0.0).is_err());
        assert!(OmegaParams::new(vec![], vec![1.5], 0.0).is_err());
        assert!(OmegaParams::new(vec![], vec![], -1.0).is_err());
        assert!(OmegaParams::zero().is_trivial());
        let w = OmegaParams::new(vec![1.0], vec![], 0.0).unwrap();
        assert!((w.pole() - (1.0 + 1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn poisson_coefficients() {
        let g = 0.7;
        let w = OmegaParams::gamma_only(g).unwrap();
        let phi = phi_coefficients(&w, 1.0, 1e-14).unwrap();
        let mut expect = (-g).exp();
        for n in 0..=phi.order {
            assert!((phi.coeffs[n] - expect).abs() < 1e-16);
            expect *= g / (n + 1) as f64;
        }
        assert!(phi.tail_bound < 1e-15);
    }

    #[test]
    fn trivial_coefficients() {
        let phi = phi_coefficients(&OmegaParams::zero(), 3.0, 1e-12).unwrap();
        assert_eq!(phi.coeffs[0], 1.0);
        assert!(phi.coeffs[1..].iter().all(|&c| c == 0.0));
        assert_eq!(phi.tail_bound, 0.0);
    }

    #[test]
    fn series_matches_closed_form() {
        let w = OmegaParams::new(vec![0.5, 0.2], vec![0.9, 0.3], 0.4).unwrap();
        for &x in &[0.0, 0.5, 1.0, 1.3, 1.6] {
            let phi = phi_coefficients(&w, x, 1e-13).unwrap();
            let closed = phi_closed(&w, x).unwrap();
            assert!((phi.eval(x) - closed).abs() <= phi.tail_bound + 1e-14, "x={x}");
        }
        assert!((phi_closed(&w, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            phi_coefficients(&w, w.pole() + 0.1, 1e-10),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn fourier_bessel_and_symmetry() {
        for &g in &[0.25, 1.0, 2.0] {
            let w = OmegaParams::gamma_only(g).unwrap();
            let f = fourier_coefficients(&w, 40, 1e-16).unwrap();
            for m in -40..=40 {
                assert_eq!(f.get(m).unwrap(), f.get(-m).unwrap());
                let expect = (-g).exp() * bessel_i(m, g);
                assert!((f.get(m).unwrap() - expect).abs() < 1e-13, "γ={g} m={m}");
            }
            assert!(f.get(41).is_err());
        }
    }

    #[test]
    fn psi_values() {
        let w = OmegaParams::gamma_only(0.5).unwrap();
        assert!((psi_eval(&w, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let p = BaseParam::parse("1/2").unwrap();
        let v = psi_at_scaled(&w, TypeLabel::C, 1, &p).unwrap();
        let x = (1.0 / 16.0 + 16.0) / 2.0;
        assert!((v[0] - (0.5 * (x - 1.0f64)).exp()).abs() < 1e-12 * v[0]);
        assert_eq!(psi_at_scaled(&OmegaParams::zero(), TypeLabel::B, 3, &p).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn admissibility() {
        let p = BaseParam::parse("4/5").unwrap();
        let g = OmegaParams::gamma_only(1.0).unwrap();
        assert!(admissibility_check(&g, TypeLabel::C, 10, &p).passed);
        // x̂ grows with i; a pole at 1.5 sits between x̂_2 and x̂_3 for r = 4/5.
        let pts = scaled_points(TypeLabel::C, 4, &p).values;
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        let a_tilde = 1.0 / 0.5;
        let alpha = -1.0 + (1.0f64 + 2.0 * a_tilde).sqrt();
        let w = OmegaParams::new(vec![alpha], vec![], 0.0).unwrap();
        assert!((w.pole() - 1.5).abs() < 1e-12);
        let k = pts.iter().position(|&x| x >= 1.5).unwrap();
        let rep = admissibility_check(&w, TypeLabel::C, 4, &p);
        assert!(!rep.passed);
        assert_eq!(rep.first_violation, Some(k + 1));
        assert_eq!(max_admissible_rank(&w, TypeLabel::C, &p, 4), k);
        assert!(admissibility_check(&w, TypeLabel::C, k, &p).passed);
    }

    #[test]
    fn toeplitz_examples() {
        let g = 0.8;
        let w = OmegaParams::gamma_only(g).unwrap();
        let phi = phi_coefficients(&w, 1.0, 1e-15).unwrap();
        assert_eq!(toeplitz_minor(&phi, &[3]).unwrap(), phi.coeffs[3]);
        // λ = 0: lower-triangular with diagonal e^{-γ}.
        let d = toeplitz_minor(&phi, &[0, 0, 0]).unwrap();
        assert!((d - (-3.0 * g).exp()).abs() < 1e-15);
        let triv = phi_coefficients(&OmegaParams::zero(), 1.0, 1e-12).unwrap();
        assert_eq!(toeplitz_minor(&triv, &[0, 0]).unwrap(), 1.0);
        assert_eq!(toeplitz_minor(&triv, &[1, 0]).unwrap(), 0.0);
    }

    fn ssyt_sum(lambda: &[i64], x: &[f64]) -> f64 {
        // Brute force over fillings of a two-row shape with entries in {1, 2}.
        let cells: Vec<(usize, usize)> = lambda
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len as usize).map(move |c| (r, c)))
            .collect();
        let mut total = 0.0;
        for mask in 0..(1u32 << cells.len()) {
            let val = |k: usize| 1 + ((mask >> k) & 1) as usize;
            let at = |r: usize, c: usize| cells.iter().position(|&p| p == (r, c)).map(val);
            let ok = cells.iter().all(|&(r, c)| {
                let v = at(r, c).unwrap();
                let row_ok = c == 0 || at(r, c - 1).unwrap() <= v;
                let col_ok = r == 0 || at(r - 1, c).unwrap() < v;
                row_ok && col_ok
            });
            if ok {
                total += (0..cells.len()).map(|k| x[val(k) - 1]).product::<f64>();
            }
        }
        total
    }

    #[test]
    fn schur_against_tableaux() {
        let x = [1.7, 0.6];
        for s in Signature::enumerate(2, 4) {
            let got = schur_at_scaled_f64(s.parts(), &x).unwrap();
            assert!((got - ssyt_sum(s.parts(), &x)).abs() < 1e-12, "{s}");
        }
        let pts = scaled_points(TypeLabel::C, 1, &BaseParam::parse("1/2").unwrap());
        let v = schur_at_scaled(&[3], &pts.exact).unwrap();
        assert_eq!(v, &pts.exact[0] * &pts.exact[0] * &pts.exact[0]);
        let twice = vec![pts.exact[0].clone(); 2];
        assert_eq!(schur_at_scaled(&[0, 0], &twice).unwrap(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn kappa_values() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(kappa_normalizer(0, 1, 1).unwrap(), q(1, 1));
        assert_eq!(kappa_normalizer(0, -1, 1).unwrap(), q(1, 1));
        assert_eq!(kappa_normalizer(1, 1, 1).unwrap(), q(3, 2));
        assert_eq!(kappa_normalizer(2, 1, -1).unwrap(), q(3, 2));
        assert!(kappa_normalizer(1, -1, -1).is_err());
    }

    #[test]
    fn jacobi_recurrence() {
        // P_2^{(a,b)} from the explicit formula.
        let (a, b, x) = (0.5, -0.5, 0.3);
        let explicit = (a + 1.0) * (a + 2.0) / 2.0
            + (a + 2.0) * (a + b + 3.0) * (x - 1.0) / 2.0
            + (a + b + 3.0) * (a + b + 4.0) / 8.0 * (x - 1.0) * (x - 1.0);
        assert!((jacobi_polynomial(2, a, b, x) - explicit).abs() < 1e-14);
        // Leading coefficient equals ϰ.
        let big = 1e4;
        let lead = jacobi_polynomial(3, 0.5, 0.5, big) / big.powi(3);
        assert!((lead - rational_to_f64(&kappa_normalizer(3, 1, 1).unwrap())).abs() < 1e-3);
    }

    #[test]
    fn jacobi_identity_small_cases() {
        let x = [1.9, 1.2];
        assert!(jacobi_identity_check(&[0], &x[..1], 1, 1).unwrap() < 1e-15);
        assert!(jacobi_identity_check(&[1], &x[..1], 1, 1).unwrap() < 1e-12);
        assert!(jacobi_identity_check(&[1, 0], &x, 1, 1).unwrap() < 1e-10);
        assert!(jacobi_identity_check(&[0, 0], &x, 1, 1).unwrap() < 1e-12);
        // The identity is not a polynomial identity beyond these cases.
        assert!(jacobi_identity_check(&[2], &x[..1], 1, 1).unwrap() > 0.1);
        assert!(jacobi_identity_check(&[1], &x[..1], 1, -1).unwrap() > 0.1);
    }

    #[test]
    fn trivial_omega_is_point_mass() {
        let p = BaseParam::parse("4/5").unwrap();
        for ty in [TypeLabel::B, TypeLabel::C] {
            let m = coherent_measure(&OmegaParams::zero(), ty, 2, &p, 1e-12, Some(4)).unwrap();
            assert_eq!(m.measure.get(&sig(&[0, 0])), 1.0);
            assert!(m.measure.weights.iter().all(|(s, &w)| s.size() == 0 || w == 0.0));
        }
    }

    #[test]
    fn rank_one_closed_form() {
        // P_1(k) = e^{-γ x̂} (2(k+1)/γ) I_{k+1}(γ) U_k(x̂), U_k the Chebyshev polynomial of the second kind.
        let p = BaseParam::parse("4/5").unwrap();
        let g = 0.5;
        let w = OmegaParams::gamma_only(g).unwrap();
        let x = scaled_points(TypeLabel::C, 1, &p).values[0];
        let m = coherent_measure(&w, TypeLabel::C, 1, &p, 1e-12, Some(30)).unwrap();
        let (mut u0, mut u1) = (1.0, 2.0 * x);
        for k in 0..12 {
            let expect = (-g * x).exp() * 2.0 * (k + 1) as f64 / g * bessel_i(k + 1, g) * u0;
            let got = m.measure.get(&sig(&[k]));
            assert!((got - expect).abs() < 1e-13 * expect.max(1.0), "k={k}: {got} vs {expect}");
            (u0, u1) = (u1, 2.0 * x * u1 - u0);
        }
        assert!(m.measure.tail < 1e-12);
    }

    #[test]
    fn schur_route_rank_one_is_poisson() {
        let p = BaseParam::parse("4/5").unwrap();
        let g = 0.5;
        let w = OmegaParams::gamma_only(g).unwrap();
        let x = scaled_points(TypeLabel::C, 1, &p).values[0];
        let phi = phi_coefficients(&w, x, 1e-15).unwrap();
        let mut expect = (-g * x).exp();
        for k in 0..10 {
            let got = schur_route_weight(&w, TypeLabel::C, &sig(&[k]), &p, &phi).unwrap();
            assert!((got - expect).abs() < 1e-14, "k={k}");
            expect *= g * x / (k + 1) as f64;
        }
    }
}
