use clap::ValueEnum;
use serde::Serialize;

use qgt_core::branching::{classical_link_row, float_link_row, link_row, link_rows, pushforward};
use qgt_core::characters::{
    character_poly, is_weyl_invariant, qdimension, qdimension_product, torus_orthogonality_check,
    type_d_remark_check, weyl_denominator, weyl_denominator_determinants,
};
use qgt_core::coherent::{
    coherent_measure, fourier_coefficients, phi_coefficients, scaled_points, toeplitz_minor, OmegaParams,
};
use qgt_core::markov::{bessel_i, generator, intertwining_check, semigroup};
use qgt_core::param::{parse_rational, rational_to_f64};
use qgt_core::{LaurentPoly, Result, Signature, TypeLabel};

use crate::commands::check_row;
use crate::config::SessionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Characters,
    Links,
    Coherent,
    Markov,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub status: &'static str,
    pub metric: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Ctx<'a> {
    cfg: &'a SessionConfig,
    fault: bool,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    /// Records a check that passes when `metric <= bound`. Errors count as
    /// failures with an infinite metric.
    fn record(&mut self, name: &str, bound: f64, metric: Result<f64>) {
        let (metric, error) = match metric {
            Ok(m) => (m, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        let ok = metric <= bound;
        self.checks.push(Check {
            name: name.into(),
            status: if ok { "pass" } else { "fail" },
            metric,
            bound,
            error,
        });
    }

    /// `γ` small enough that the rank-`n` coherent mass sits well inside the
    /// cutoff: `γ x̂_n <= 1/2`, capped at `1/2`.
    fn gamma(&self, ty: TypeLabel, n: usize) -> f64 {
        let x = scaled_points(ty, n, &self.cfg.param).values.last().copied().unwrap_or(1.0);
        (0.5 / x).min(0.5)
    }
}

const BCD: [TypeLabel; 3] = [TypeLabel::B, TypeLabel::C, TypeLabel::D];
const BC: [TypeLabel; 2] = [TypeLabel::B, TypeLabel::C];

fn signatures(n_max: usize, size: i64) -> Vec<Signature> {
    (1..=n_max).flat_map(|n| Signature::enumerate(n, size)).collect()
}

fn count(it: impl Iterator<Item = Result<bool>>) -> Result<f64> {
    let mut bad = 0;
    for ok in it {
        bad += usize::from(!ok?);
    }
    Ok(bad as f64)
}

fn characters(ctx: &mut Ctx) {
    let p = ctx.cfg.param.clone();
    ctx.record(
        "V^s product equals its determinant forms",
        0.0,
        count((1..=3).map(|n| {
            let prod = weyl_denominator(TypeLabel::B, n);
            Ok(weyl_denominator_determinants(n)?.iter().all(|f| *f == prod))
        })),
    );
    ctx.record(
        "f_λ + f_λ̃ = det[t^l + t^-l] / V^s (type D)",
        0.0,
        count(signatures(3, 3).iter().map(type_d_remark_check)),
    );
    ctx.record(
        "qdim product formula equals f_λ(q^c)",
        0.0,
        count(BCD.iter().flat_map(|&ty| {
            signatures(3, 4)
                .into_iter()
                .map(move |s| (ty, s))
                .collect::<Vec<_>>()
        })
        .map(|(ty, s)| Ok(qdimension_product(ty, s.parts(), &p)? == qdimension(ty, s.parts(), &p)?))),
    );
    let fault = ctx.fault;
    ctx.record(
        "f_λ is Weyl invariant",
        0.0,
        count(BCD.iter().flat_map(|&ty| {
            signatures(3, 3)
                .into_iter()
                .map(move |s| (ty, s))
                .collect::<Vec<_>>()
        })
        .enumerate()
        .map(|(k, (ty, s))| {
            let mut chi = (*character_poly(ty, s.parts())?).clone();
            if fault && k == 7 {
                let exp: Vec<i32> = s.parts().iter().map(|&x| x as i32).collect();
                chi = &chi + &LaurentPoly::monomial(exp, parse_rational("1/1000")?);
            }
            Ok(is_weyl_invariant(ty, &chi))
        })),
    );
    ctx.record(
        "∫ f_λ conj(f_μ) dm = δ_λμ on the torus",
        1e-10,
        (|| {
            let mut worst: f64 = 0.0;
            for ty in BC {
                for n in 1..=2 {
                    let sigs = Signature::enumerate(n, 2);
                    for a in &sigs {
                        for b in &sigs {
                            worst = worst.max(torus_orthogonality_check(ty, a, b, 16)?);
                        }
                    }
                }
            }
            Ok(worst)
        })(),
    );
}

fn links(ctx: &mut Ctx) {
    let p = ctx.cfg.param.clone();
    let fault = ctx.fault;
    ctx.record(
        "Σ_μ Λ(λ, μ) = 1 and Λ >= 0 (exact)",
        0.0,
        (|| {
            let mut bad = 0;
            for ty in BCD {
                for (k, s) in signatures(3, 4).iter().enumerate() {
                    let mut row = link_row(ty, s, &p)?;
                    if fault && k == 3 {
                        if let Some(w) = row.entries.values_mut().next() {
                            *w += parse_rational("1/1000")?;
                        }
                    }
                    bad += usize::from(check_row(&row).is_err());
                }
            }
            Ok(bad as f64)
        })(),
    );
    if p.is_classical() {
        ctx.record(
            "Λ(λ, μ) = m^λ_μ dim μ / dim λ (classical branching oracle)",
            0.0,
            count(BCD.iter().flat_map(|&ty| {
                signatures(3, 4)
                    .into_iter()
                    .map(move |s| (ty, s))
                    .collect::<Vec<_>>()
            })
            .map(|(ty, s)| Ok(link_row(ty, &s, &p)? == classical_link_row(ty, &s, ctx.cfg.seed)?))),
        );
    }
    ctx.record(
        "exact and float link rows agree",
        1e-10,
        (|| {
            let mut worst: f64 = 0.0;
            for ty in BCD {
                for s in signatures(3, 3) {
                    let exact = link_row(ty, &s, &p)?;
                    for (mu, w) in float_link_row(ty, &s, &p, ctx.cfg.seed)? {
                        worst = worst.max((w - rational_to_f64(&exact.get(&mu))).abs());
                    }
                }
            }
            Ok(worst)
        })(),
    );
}

fn coherent(ctx: &mut Ctx) {
    let p = ctx.cfg.param.clone();
    let cutoff = ctx.cfg.cutoff;
    ctx.record(
        "ψ̂(m) = e^-γ I_m(γ) for ω = (0, 0, γ)",
        1e-12,
        (|| {
            let mut worst: f64 = 0.0;
            for gamma in [0.5, 1.0, 2.0] {
                let psi = fourier_coefficients(&OmegaParams::gamma_only(gamma)?, 40, 1e-16)?;
                for m in -40..=40 {
                    worst = worst.max((psi.get(m)? - (-gamma).exp() * bessel_i(m, gamma)).abs());
                }
            }
            Ok(worst)
        })(),
    );
    ctx.record(
        "P_N Λ = P_{N-1} (excess over tail bound)",
        1e-8,
        (|| {
            let mut worst = f64::NEG_INFINITY;
            for ty in BC {
                let omega = OmegaParams::gamma_only(ctx.gamma(ty, 2))?;
                let hi = coherent_measure(&omega, ty, 2, &p, 1e-14, Some(cutoff))?;
                let lo = coherent_measure(&omega, ty, 1, &p, 1e-14, Some(cutoff))?;
                let sources: Vec<Signature> = hi.measure.weights.keys().cloned().collect();
                let pushed = pushforward(&hi.measure, &link_rows(ty, &sources, &p)?)?;
                for mu in lo.measure.weights.keys().chain(pushed.weights.keys()) {
                    let dev = (pushed.get(mu) - lo.measure.get(mu)).abs();
                    worst = worst.max(dev - hi.measure.tail - lo.measure.tail);
                }
            }
            Ok(worst.max(0.0))
        })(),
    );
    ctx.record(
        "det[φ(λ_j - j + i)] >= 0 (negated minimum)",
        1e-12,
        (|| {
            let mut worst = f64::INFINITY;
            for (k, gamma) in [0.3, 1.0, 1.7].into_iter().enumerate() {
                let omega = OmegaParams::new(vec![0.6 / (k + 1) as f64], vec![0.4], gamma)?;
                let phi = phi_coefficients(&omega, 1.0, 1e-15)?;
                for s in signatures(3, 6) {
                    worst = worst.min(toeplitz_minor(&phi, s.parts())?);
                }
            }
            Ok(-worst)
        })(),
    );
}

fn markov(ctx: &mut Ctx) {
    let p = ctx.cfg.param.clone();
    let cutoff = ctx.cfg.cutoff;
    ctx.record(
        "L(λ, μ) >= 0 off the diagonal and row sum + escape = 0",
        1e-10,
        (|| {
            let mut worst: f64 = 0.0;
            for ty in BC {
                let g = generator(ty, 2, &OmegaParams::gamma_only(ctx.gamma(ty, 2))?, &p, cutoff, 1.0)?;
                let v = g.validity();
                worst = worst.max(v.max_escape_mismatch).max(-v.min_offdiag);
            }
            Ok(worst)
        })(),
    );
    ctx.record(
        "ω = 0 gives L = 0",
        0.0,
        count(BC.iter().map(|&ty| Ok(generator(ty, 2, &OmegaParams::zero(), &p, cutoff.min(6), 1.0)?.is_zero()))),
    );
    ctx.record(
        "Q_{t+s} = Q_t Q_s",
        1e-8,
        (|| {
            let g = generator(TypeLabel::C, 2, &OmegaParams::gamma_only(ctx.gamma(TypeLabel::C, 2))?, &p, cutoff, 1.0)?;
            let (a, b, ab) = (semigroup(&g, 0.3)?, semigroup(&g, 0.2)?, semigroup(&g, 0.5)?);
            let n = g.len();
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let prod: f64 = (0..n).map(|k| a.entries[i][k] * b.entries[k][j]).sum();
                    worst = worst.max((prod - ab.entries[i][j]).abs());
                }
            }
            Ok(worst)
        })(),
    );
    ctx.record(
        "Λ Q^{N-1}_t = Q^N_t Λ (excess over truncation bound)",
        1e-6,
        (|| {
            let omega = OmegaParams::gamma_only(ctx.gamma(TypeLabel::C, 2))?;
            let rep = intertwining_check(TypeLabel::C, 2, &omega, &p, 0.5, cutoff, 1e-6)?;
            Ok(rep.max_excess.max(0.0))
        })(),
    );
}

pub fn run(cfg: &SessionConfig, suite: Suite, fault: bool) -> VerifyReport {
    let mut ctx = Ctx {
        cfg,
        fault,
        checks: Vec::new(),
    };
    let all = suite == Suite::All;
    if all || suite == Suite::Characters {
        characters(&mut ctx);
    }
    if all || suite == Suite::Links {
        links(&mut ctx);
    }
    if all || suite == Suite::Coherent {
        coherent(&mut ctx);
    }
    if all || suite == Suite::Markov {
        markov(&mut ctx);
    }
    let passed = ctx.checks.iter().all(|c| c.status == "pass");
    VerifyReport {
        checks: ctx.checks,
        passed,
    }
}
