//! Markov generators on truncated signature spaces.
//!
//! With `E(l, m) = ψ̂(l-m) + ψ̂(m-l) - ψ̂(l+m) - ψ̂(-l-m)`,
//! `L(λ, μ) = (qdim(μ)/qdim(λ)) det[E(l_i, m_j)] / (2^N ∏_j Ψ_ω(q^{c_j})) - δ_{λμ}`.
//! `L + I` is multiplication by the rank-`N` character in the basis of
//! normalized characters, so rows of `L` sum to zero over all of `S^+_N`;
//! on a truncation the missing mass is reported per row as a defect.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branching::{link_rows, LinkTable};
use crate::characters::{ln_qdimension, qdimension_product, shifted_indices_half, Signature, TypeLabel};
use crate::coherent::{
    admissibility_check, fourier_coefficients, psi_at_scaled, required_half_width, FourierCoeffs,
    OmegaParams,
};
use crate::error::{Error, Result};
use crate::numeric::det_f64;
use crate::param::{rational_to_f64, BaseParam};

pub use crate::numeric::bessel_i;

/// Shifted indices `l_i = λ_i + c(X)_{N-i+1}` in half units.
pub fn shifted_indices(ty: TypeLabel, lambda: &[i64]) -> Vec<i64> {
    shifted_indices_half(ty, lambda)
}

/// `∮ Ψ_ω(z) (z^l - z^{-l}) conj(z^m - z^{-m}) dz/(2πi z)` for `l`, `m`
/// given in half units (`l ± m` is always an integer).
pub fn fourier_entry(psi: &FourierCoeffs, l_half: i64, m_half: i64) -> Result<f64> {
    if (l_half - m_half) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "indices {l_half}/2 and {m_half}/2 differ by a half-integer"
        )));
    }
    let d = (l_half - m_half) / 2;
    let s = (l_half + m_half) / 2;
    let full = psi.get(d)? + psi.get(-d)? - psi.get(s)? - psi.get(-s)?;
    let folded = 2.0 * (psi.get(d)? - psi.get(s)?);
    debug_assert!((full - folded).abs() <= 1e-15 * full.abs().max(1.0));
    Ok(full)
}

/// Truncated generator with per-row escape data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    #[serde(rename = "type")]
    pub type_label: TypeLabel,
    #[serde(rename = "N")]
    pub rank: usize,
    pub omega: OmegaParams,
    pub r: String,
    pub cutoff: i64,
    pub states: Vec<Signature>,
    pub entries: Vec<Vec<f64>>,
    /// `-(row sum)`: rate of escaping the truncation.
    pub defects: Vec<f64>,
    /// Escape rate computed independently from states beyond the cutoff.
    pub escape: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorValidity {
    pub min_offdiag: f64,
    pub max_row_sum: f64,
    /// `max |row sum + escape|`, the mismatch with the mass found past the cutoff.
    pub max_escape_mismatch: f64,
    pub max_defect: f64,
    pub passed: bool,
}

impl GeneratorMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, s: &Signature) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    pub fn validity(&self) -> GeneratorValidity {
        let n = self.len();
        let mut min_off = f64::INFINITY;
        let mut max_sum = f64::NEG_INFINITY;
        let mut mismatch: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    min_off = min_off.min(self.entries[i][j]);
                }
            }
            let sum: f64 = self.entries[i].iter().sum();
            max_sum = max_sum.max(sum);
            mismatch = mismatch.max((sum + self.escape[i]).abs());
        }
        let max_defect = self.defects.iter().copied().fold(0.0, f64::max);
        let passed = min_off >= -1e-12 && max_sum <= 1e-12 && mismatch <= 1e-10;
        GeneratorValidity {
            min_offdiag: if n > 1 { min_off } else { 0.0 },
            max_row_sum: max_sum,
            max_escape_mismatch: mismatch,
            max_defect,
            passed,
        }
    }

    /// True when every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&x| x == 0.0)
    }
}

fn check_bc(ty: TypeLabel) -> Result<()> {
    match ty {
        TypeLabel::B | TypeLabel::C => Ok(()),
        _ => Err(Error::Unsupported(format!("generators for type {ty}"))),
    }
}

struct Kernel<'a> {
    ty: TypeLabel,
    n: usize,
    psi: &'a FourierCoeffs,
    norm: f64,
}

impl Kernel<'_> {
    /// `det[E(l_i, m_j)] / (2^N ∏ Ψ)`, the entry of `L + I` before the
    /// quantum-dimension ratio.
    fn core(&self, l: &[i64], m: &[i64]) -> Result<f64> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                a[i][j] = fourier_entry(self.psi, l[i], m[j])?;
            }
        }
        Ok(det_f64(a) / (2f64.powi(self.n as i32) * self.norm))
    }
}

/// `c · ratio`, falling back to `sign(c) exp(ln|c| + ln_ratio)` when the
/// plain product leaves the floating-point range.
fn scaled(c: f64, ratio: f64, ln_ratio: f64) -> f64 {
    let v = c * ratio;
    if v.is_finite() && (v != 0.0 || c == 0.0) {
        return v;
    }
    c.signum() * (c.abs().ln() + ln_ratio).exp()
}

const SHELL_MAX: i64 = 120;
const SHELL_STOP: f64 = 1e-17;

/// Generator on `{λ ∈ S^+_N : |λ| <= cutoff}`. Fails with
/// [`Error::CutoffTooSmall`] if the escape rate from `λ = 0` exceeds `tol`.
pub fn generator(
    ty: TypeLabel,
    n: usize,
    omega: &OmegaParams,
    param: &BaseParam,
    cutoff: i64,
    tol: f64,
) -> Result<GeneratorMatrix> {
    check_bc(ty)?;
    if n == 0 {
        return Err(Error::InvalidParameter("generator needs rank >= 1".into()));
    }
    let adm = admissibility_check(omega, ty, n, param);
    if !adm.passed {
        return Err(Error::Inadmissible(format!(
            "rank {n} fails at index {}",
            adm.first_violation.unwrap_or(0)
        )));
    }
    let states = Signature::enumerate(n, cutoff);
    let width = required_half_width(ty, n, cutoff, cutoff + SHELL_MAX);
    let psi = fourier_coefficients(omega, width, 1e-17)?;
    let norm: f64 = psi_at_scaled(omega, ty, n, param)?.iter().product();
    let kernel = Kernel { ty, n, psi: &psi, norm };
    let qd = |s: &Signature| qdimension_product(ty, s.parts(), param);
    let dims: Vec<BigRational> = states.par_iter().map(qd).collect::<Result<_>>()?;
    let idx: Vec<Vec<i64>> = states.iter().map(|s| shifted_indices(ty, s.parts())).collect();
    let ln_dims: Vec<f64> = states
        .iter()
        .map(|s| ln_qdimension(ty, s.parts(), param))
        .collect::<Result<_>>()?;
    // Levels past the cutoff, shared by every row: shifted indices and log qdim.
    let shell: Vec<Vec<(Vec<i64>, f64)>> = (cutoff + 1..=cutoff + SHELL_MAX)
        .into_par_iter()
        .map(|size| {
            Signature::enumerate_size(n, size)
                .into_iter()
                .map(|mu| Ok((shifted_indices(ty, mu.parts()), ln_qdimension(ty, mu.parts(), param)?)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows = (0..states.len())
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, f64)> {
            let mut row = vec![0.0; states.len()];
            for j in 0..states.len() {
                let c = kernel.core(&idx[i], &idx[j])?;
                let v = if i == j {
                    c
                } else {
                    scaled(c, rational_to_f64(&(&dims[j] / &dims[i])), ln_dims[j] - ln_dims[i])
                };
                row[j] = if i == j { v - 1.0 } else { v };
            }
            // Mass beyond the cutoff, level by level, until it is negligible.
            let mut escape = 0.0;
            let mut prev = f64::INFINITY;
            for members in &shell {
                let mut level = 0.0;
                for (m, ln_d) in members {
                    let c = kernel.core(&idx[i], m)?;
                    if c != 0.0 {
                        level += scaled(c, f64::INFINITY, ln_d - ln_dims[i]);
                    }
                }
                escape += level;
                if level.abs() < SHELL_STOP * escape.abs().max(1e-300) && level <= prev
                    || level == 0.0 && prev == 0.0
                {
                    break;
                }
                prev = level;
            }
            Ok((row, escape))
        })
        .collect::<Result<Vec<_>>>()?;
    let defects: Vec<f64> = rows.iter().map(|(r, _)| -r.iter().sum::<f64>()).collect();
    let (entries, escape): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().unzip();
    if defects[0] > tol {
        return Err(Error::CutoffTooSmall {
            cutoff: cutoff as u32,
            defect: defects[0],
            tolerance: tol,
        });
    }
    let _ = kernel.ty;
    Ok(GeneratorMatrix {
        type_label: ty,
        rank: n,
        omega: omega.clone(),
        r: param.to_string(),
        cutoff,
        states,
        entries,
        defects,
        escape,
    })
}

/// `exp(tL)` on the truncation, with per-row defect `1 - row sum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    pub states: Vec<Signature>,
    pub t: f64,
    pub entries: Vec<Vec<f64>>,
    pub defects: Vec<f64>,
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = b.first().map_or(0, |r| r.len());
    a.par_iter()
        .map(|row| {
            let mut out = vec![0.0; m];
            for (k, &x) in row.iter().enumerate() {
                if x != 0.0 {
                    for (o, y) in out.iter_mut().zip(&b[k]) {
                        *o += x * y;
                    }
                }
            }
            out
        })
        .collect()
}

/// `Q_t = e^{-ct} Σ_k (ct)^k/k! P^k` with `c = max |L(λ,λ)|` and
/// `P = I + L/c`, summed until the Poisson tail is below `1e-15`.
pub fn semigroup(gen: &GeneratorMatrix, t: f64) -> Result<TransitionMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter("time must be nonnegative".into()));
    }
    let n = gen.len();
    let identity: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let c = (0..n).map(|i| gen.entries[i][i].abs()).fold(0.0, f64::max);
    let entries = if c == 0.0 || t == 0.0 {
        identity
    } else {
        let p: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| gen.entries[i][j] / c + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let ct = c * t;
        let mut weight = (-ct).exp();
        let mut used = weight;
        let mut power = identity;
        let mut acc: Vec<Vec<f64>> = power
            .iter()
            .map(|r| r.iter().map(|x| x * weight).collect())
            .collect();
        let mut k = 0.0;
        while 1.0 - used > 1e-15 && k < 10_000.0 {
            k += 1.0;
            weight *= ct / k;
            used += weight;
            power = matmul(&power, &p);
            for (ar, pr) in acc.iter_mut().zip(&power) {
                for (a, x) in ar.iter_mut().zip(pr) {
                    *a += weight * x;
                }
            }
        }
        acc
    };
    let defects = entries.iter().map(|r| 1.0 - r.iter().sum::<f64>()).collect();
    Ok(TransitionMatrix {
        states: gen.states.clone(),
        t,
        entries,
        defects,
    })
}

pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRecord {
    pub time: f64,
    /// `None` marks escape from the truncated state space.
    pub state: Option<Signature>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub stream: u64,
    pub rng: &'static str,
    pub records: Vec<JumpRecord>,
}

impl Trajectory {
    pub fn escaped(&self) -> bool {
        self.records.last().is_some_and(|r| r.state.is_none())
    }

    /// State occupied at time `t`; `None` after an escape.
    pub fn state_at(&self, t: f64) -> Option<&Signature> {
        let k = self.records.partition_point(|r| r.time <= t);
        self.records[k.saturating_sub(1)].state.as_ref()
    }
}

/// One Gillespie path on stream `stream` of the seeded generator.
pub fn simulate_stream(
    gen: &GeneratorMatrix,
    initial: &Signature,
    horizon: f64,
    seed: u64,
    stream: u64,
) -> Result<Trajectory> {
    let mut i = gen
        .index_of(initial)
        .ok_or_else(|| Error::UnknownState(initial.dotted()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut t = 0.0;
    let mut records = vec![JumpRecord {
        time: 0.0,
        state: Some(initial.clone()),
    }];
    loop {
        let rate = -gen.entries[i][i];
        if rate <= 0.0 {
            break;
        }
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / rate;
        if t > horizon {
            break;
        }
        let mut target = rng.random::<f64>() * rate;
        let mut next = None;
        for (j, &v) in gen.entries[i].iter().enumerate() {
            if j == i || v <= 0.0 {
                continue;
            }
            if target < v {
                next = Some(j);
                break;
            }
            target -= v;
        }
        match next {
            Some(j) => {
                i = j;
                records.push(JumpRecord {
                    time: t,
                    state: Some(gen.states[j].clone()),
                });
            }
            None => {
                records.push(JumpRecord { time: t, state: None });
                break;
            }
        }
    }
    Ok(Trajectory {
        seed,
        stream,
        rng: RNG_NAME,
        records,
    })
}

pub fn simulate(gen: &GeneratorMatrix, initial: &Signature, horizon: f64, seed: u64) -> Result<Trajectory> {
    simulate_stream(gen, initial, horizon, seed, 0)
}

/// `runs` independent paths, path `k` on stream `k`.
pub fn simulate_runs(
    gen: &GeneratorMatrix,
    initial: &Signature,
    horizon: f64,
    seed: u64,
    runs: u64,
) -> Result<Vec<Trajectory>> {
    (0..runs)
        .into_par_iter()
        .map(|k| simulate_stream(gen, initial, horizon, seed, k))
        .collect()
}

/// Empirical law at time `t`; escaped paths are counted under `None`.
pub fn empirical_marginal(paths: &[Trajectory], t: f64) -> HashMap<Option<Signature>, u64> {
    let mut out = HashMap::new();
    for p in paths {
        *out.entry(p.state_at(t).cloned()).or_insert(0) += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwiningReport {
    pub t: f64,
    pub max_deviation: f64,
    /// `max (|ΛQ - QΛ| - bound)` over entries; nonpositive when the check passes.
    pub max_excess: f64,
    pub max_bound: f64,
    /// Largest deviation over rows whose truncation bound is below `tolerance`.
    pub interior_deviation: f64,
    pub interior_rows: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `Λ Q^{N-1}_t` with `Q^N_t Λ` on the truncations. Row `λ` may
/// differ by at most `defect^N_t(λ) + Σ_μ Λ(λ, μ) defect^{N-1}_t(μ)` from
/// truncation alone.
pub fn intertwining_check(
    ty: TypeLabel,
    n: usize,
    omega: &OmegaParams,
    param: &BaseParam,
    t: f64,
    cutoff: i64,
    tol: f64,
) -> Result<IntertwiningReport> {
    if n < 2 {
        return Err(Error::InvalidParameter("intertwining needs rank >= 2".into()));
    }
    let gen_hi = generator(ty, n, omega, param, cutoff, 1.0)?;
    let gen_lo = generator(ty, n - 1, omega, param, cutoff, 1.0)?;
    let q_hi = semigroup(&gen_hi, t)?;
    let q_lo = semigroup(&gen_lo, t)?;
    let links: LinkTable = link_rows(ty, &gen_hi.states, param)?;
    intertwining_from_parts(&q_hi, &q_lo, &links, tol)
}

pub fn intertwining_from_parts(
    q_hi: &TransitionMatrix,
    q_lo: &TransitionMatrix,
    links: &LinkTable,
    tol: f64,
) -> Result<IntertwiningReport> {
    let lo_index: HashMap<&Signature, usize> =
        q_lo.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let m = q_lo.states.len();
    // Λ restricted to the truncations, as a dense matrix.
    let lambda: Vec<Vec<f64>> = q_hi
        .states
        .iter()
        .map(|s| {
            let row = links.get(s).ok_or_else(|| Error::MissingRow(s.dotted()))?;
            let mut dense = vec![0.0; m];
            for (mu, w) in &row.entries {
                let j = lo_index
                    .get(mu)
                    .ok_or_else(|| Error::UnknownState(mu.dotted()))?;
                dense[*j] = rational_to_f64(w);
            }
            Ok(dense)
        })
        .collect::<Result<_>>()?;
    let left = matmul(&lambda, &q_lo.entries);
    let right = matmul(&q_hi.entries, &lambda);
    let mut max_dev: f64 = 0.0;
    let mut max_excess = f64::NEG_INFINITY;
    let mut max_bound: f64 = 0.0;
    let mut interior_dev: f64 = 0.0;
    let mut interior_rows = 0;
    for i in 0..q_hi.states.len() {
        let bound = q_hi.defects[i].max(0.0)
            + lambda[i]
                .iter()
                .zip(&q_lo.defects)
                .map(|(w, d)| w * d.max(0.0))
                .sum::<f64>();
        max_bound = max_bound.max(bound);
        let interior = bound < tol;
        interior_rows += usize::from(interior);
        for j in 0..m {
            let dev = (left[i][j] - right[i][j]).abs();
            max_dev = max_dev.max(dev);
            max_excess = max_excess.max(dev - bound);
            if interior {
                interior_dev = interior_dev.max(dev);
            }
        }
    }
    Ok(IntertwiningReport {
        t: q_hi.t,
        max_deviation: max_dev,
        max_excess,
        max_bound,
        interior_deviation: interior_dev,
        interior_rows,
        tolerance: tol,
        passed: max_excess <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::coherent_measure;

    fn sig(p: &[i64]) -> Signature {
        Signature::new(p.to_vec()).unwrap()
    }

    #[test]
    fn fourier_entry_examples() {
        let triv = fourier_coefficients(&OmegaParams::zero(), 10, 1e-15).unwrap();
        assert_eq!(fourier_entry(&triv, 6, 6).unwrap(), 2.0);
        assert_eq!(fourier_entry(&triv, 6, 4).unwrap(), 0.0);
        let g = 0.9;
        let psi = fourier_coefficients(&OmegaParams::gamma_only(g).unwrap(), 30, 1e-16).unwrap();
        for (l, m) in [(2, 4), (6, 2), (3, 5), (8, 8)] {
            let (lf, mf) = (l / 2, m / 2);
            let closed = (-g).exp()
                * (bessel_i(mf - lf, g) + bessel_i(lf - mf, g) - bessel_i(lf + mf, g) - bessel_i(-lf - mf, g));
            if l % 2 == 0 {
                assert!((fourier_entry(&psi, l, m).unwrap() - closed).abs() < 1e-14);
            }
        }
        assert_eq!(
            fourier_entry(&psi, 6, 6).unwrap(),
            2.0 * (psi.get(0).unwrap() - psi.get(6).unwrap())
        );
        assert!(fourier_entry(&psi, 3, 4).is_err());
        assert!(matches!(fourier_entry(&psi, 40, 40), Err(Error::FourierIndex { .. })));
    }

    #[test]
    fn trivial_generator_is_zero() {
        let p = BaseParam::parse("4/5").unwrap();
        let g = generator(TypeLabel::C, 2, &OmegaParams::zero(), &p, 6, 1e-10).unwrap();
        assert!(g.is_zero());
        assert!(g.validity().passed);
        let q = semigroup(&g, 3.0).unwrap();
        for (i, row) in q.entries.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, if i == j { 1.0 } else { 0.0 });
            }
        }
        let tr = simulate(&g, &sig(&[1, 0]), 5.0, 42).unwrap();
        assert_eq!(tr.records.len(), 1);
    }

    #[test]
    fn rank_one_bessel_closed_form() {
        let p = BaseParam::parse("4/5").unwrap();
        let gamma = 0.5;
        let w = OmegaParams::gamma_only(gamma).unwrap();
        let g = generator(TypeLabel::C, 1, &w, &p, 10, 1e-6).unwrap();
        let psi_q = psi_at_scaled(&w, TypeLabel::C, 1, &p).unwrap()[0];
        for (i, a) in g.states.iter().enumerate() {
            for (j, b) in g.states.iter().enumerate() {
                let (l, m) = (a.parts()[0], b.parts()[0]);
                let ratio = rational_to_f64(
                    &(qdimension_product(TypeLabel::C, &[m], &p).unwrap()
                        / qdimension_product(TypeLabel::C, &[l], &p).unwrap()),
                );
                let expect = ratio * (-gamma).exp() * (bessel_i(l - m, gamma) - bessel_i(l + m + 2, gamma)) / psi_q
                    - if i == j { 1.0 } else { 0.0 };
                assert!((g.entries[i][j] - expect).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn generator_validity_and_defect_monotone() {
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(0.5).unwrap();
        let mut last = f64::INFINITY;
        for cutoff in [4, 6, 8] {
            let g = generator(TypeLabel::B, 2, &w, &p, cutoff, 1.0).unwrap();
            let v = g.validity();
            assert!(v.passed, "{v:?}");
            let i = g.index_of(&sig(&[1, 1])).unwrap();
            assert!(g.defects[i] <= last);
            last = g.defects[i];
        }
    }

    #[test]
    fn cutoff_too_small_reported() {
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(1.0).unwrap();
        assert!(matches!(
            generator(TypeLabel::C, 2, &w, &p, 1, 1e-12),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn semigroup_property() {
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(0.5).unwrap();
        let g = generator(TypeLabel::C, 2, &w, &p, 8, 1.0).unwrap();
        let a = semigroup(&g, 0.3).unwrap();
        let b = semigroup(&g, 0.5).unwrap();
        let ab = semigroup(&g, 0.8).unwrap();
        let prod = matmul(&a.entries, &b.entries);
        for (r1, r2) in prod.iter().zip(&ab.entries) {
            for (x, y) in r1.iter().zip(r2) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let id = semigroup(&g, 0.0).unwrap();
        assert!(id.defects.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn coherent_row_is_generator_row() {
        // P_N = (L + I)(0, ·) on the truncation.
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(0.5).unwrap();
        let g = generator(TypeLabel::C, 2, &w, &p, 8, 1.0).unwrap();
        let m = coherent_measure(&w, TypeLabel::C, 2, &p, 1e-14, Some(8)).unwrap();
        for (j, s) in g.states.iter().enumerate() {
            let e = g.entries[0][j] + if j == 0 { 1.0 } else { 0.0 };
            assert!((e - m.measure.get(s)).abs() < 1e-13, "{s}");
        }
    }

    #[test]
    fn coherent_measure_moves_to_doubled_parameter() {
        // P (L + I) is the measure of the squared character, not P itself.
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(0.25).unwrap();
        let cutoff = 10;
        let g = generator(TypeLabel::C, 2, &w, &p, cutoff, 1.0).unwrap();
        let m = coherent_measure(&w, TypeLabel::C, 2, &p, 1e-15, Some(cutoff)).unwrap();
        let m2 = coherent_measure(&w.doubled(), TypeLabel::C, 2, &p, 1e-15, Some(cutoff)).unwrap();
        let mut max_pl: f64 = 0.0;
        for (j, s) in g.states.iter().enumerate() {
            let v: f64 = g
                .states
                .iter()
                .enumerate()
                .map(|(i, a)| m.measure.get(a) * (g.entries[i][j] + if i == j { 1.0 } else { 0.0 }))
                .sum();
            let pl = v - m.measure.get(s);
            max_pl = max_pl.max(pl.abs());
            if s.size() <= 4 {
                assert!((v - m2.measure.get(s)).abs() < 1e-9, "{s}: {v} vs {}", m2.measure.get(s));
            }
        }
        assert!(max_pl > 1e-3);
    }

    #[test]
    fn simulation_is_reproducible() {
        let p = BaseParam::parse("4/5").unwrap();
        let w = OmegaParams::gamma_only(0.5).unwrap();
        let g = generator(TypeLabel::C, 1, &w, &p, 12, 1e-6).unwrap();
        let a = simulate(&g, &sig(&[0]), 5.0, 42).unwrap();
        let b = simulate(&g, &sig(&[0]), 5.0, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.records.windows(2).all(|w| w[0].time < w[1].time && w[0].state != w[1].state));
        assert!(simulate(&g, &sig(&[40]), 1.0, 1).is_err());
        let runs = simulate_runs(&g, &sig(&[0]), 1.0, 42, 8).unwrap();
        assert_ne!(runs[0], runs[1]);
    }

    #[test]
    fn intertwining_trivial_cases() {
        let p = BaseParam::parse("4/5").unwrap();
        let r = intertwining_check(TypeLabel::C, 2, &OmegaParams::zero(), &p, 1.0, 6, 1e-12).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        let w = OmegaParams::gamma_only(0.5).unwrap();
        let r = intertwining_check(TypeLabel::C, 2, &w, &p, 0.0, 6, 1e-12).unwrap();
        assert_eq!(r.max_deviation, 0.0);
    }
}
