use qgt_core::branching::{link_rows, pushforward, SignatureMeasure};
use qgt_core::coherent::{
    coherent_measure, phi_coefficients, psi_at_scaled, schur_route_weight, scaled_points, OmegaParams,
};
use qgt_core::markov::bessel_i;
use qgt_core::{BaseParam, Signature, TypeLabel};

fn schur_route_measure(omega: &OmegaParams, ty: TypeLabel, n: usize, p: &BaseParam, max_size: i64) -> SignatureMeasure {
    let x_max = scaled_points(ty, n, p).values.iter().copied().fold(1.0, f64::max);
    let phi = phi_coefficients(omega, x_max, 1e-15).unwrap();
    let weights = Signature::enumerate(n, max_size)
        .into_iter()
        .map(|s| {
            let w = schur_route_weight(omega, ty, &s, p, &phi).unwrap();
            (s, w)
        })
        .collect();
    SignatureMeasure {
        rank: n,
        weights,
        tail: 0.0,
    }
}

fn max_gap(a: &SignatureMeasure, b: &SignatureMeasure) -> f64 {
    a.weights
        .keys()
        .chain(b.weights.keys())
        .map(|s| (a.get(s) - b.get(s)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn fourier_route_is_coherent_and_schur_route_is_not() {
    let p = BaseParam::parse("4/5").unwrap();
    let omega = OmegaParams::gamma_only(0.5).unwrap();
    let ty = TypeLabel::C;
    let hi = coherent_measure(&omega, ty, 2, &p, 1e-14, Some(40)).unwrap();
    let lo = coherent_measure(&omega, ty, 1, &p, 1e-14, Some(40)).unwrap();
    let sources: Vec<Signature> = hi.measure.weights.keys().cloned().collect();
    let rows = link_rows(ty, &sources, &p).unwrap();
    let pushed = pushforward(&hi.measure, &rows).unwrap();
    assert!(max_gap(&pushed, &lo.measure) < 1e-10);

    let s_hi = schur_route_measure(&omega, ty, 2, &p, hi.max_size);
    let s_lo = schur_route_measure(&omega, ty, 1, &p, lo.max_size);
    let gap = max_gap(&pushforward(&s_hi, &rows).unwrap(), &s_lo);
    println!("schur-route coherence gap {gap:.3e}");
    assert!(gap > 1e-3);
    // Both routes still define probability measures.
    assert!((s_hi.total() - 1.0).abs() < 1e-8);
    assert!((hi.measure.total() - 1.0).abs() < 1e-12);
}

#[test]
fn rank_one_weights_have_bessel_form() {
    // P(k) = e^{-γ x̂} 2(k+1)/γ I_{k+1}(γ) U_k(x̂) with U the Chebyshev polynomial
    // of the second kind, x̂ = (q + 1/q)/2.
    let p = BaseParam::parse("1/2").unwrap();
    for gamma in [0.25, 1.0, 2.0] {
        let omega = OmegaParams::gamma_only(gamma).unwrap();
        let m = coherent_measure(&omega, TypeLabel::C, 1, &p, 1e-14, Some(60)).unwrap();
        let x = scaled_points(TypeLabel::C, 1, &p).values[0];
        let norm = psi_at_scaled(&omega, TypeLabel::C, 1, &p).unwrap()[0];
        assert!((norm - (gamma * (x - 1.0)).exp()).abs() < 1e-12 * norm);
        let (mut u_prev, mut u) = (0.0, 1.0);
        for k in 0..20 {
            let want = (-gamma * x).exp() * 2.0 * (k as f64 + 1.0) / gamma * bessel_i(k + 1, gamma) * u;
            let got = m.measure.get(&Signature::new(vec![k]).unwrap());
            assert!((got - want).abs() < 1e-12 * want.max(1e-300) + 1e-15, "γ={gamma} k={k}");
            (u_prev, u) = (u, 2.0 * x * u - u_prev);
        }
    }
}

#[test]
fn admissibility_failure_is_reported() {
    let p = BaseParam::parse("1/2").unwrap();
    let omega = OmegaParams::new(vec![1.0], vec![], 0.0).unwrap();
    assert!(coherent_measure(&omega, TypeLabel::C, 1, &p, 1e-10, Some(10)).is_err());
}
