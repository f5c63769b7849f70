use std::f64::consts::PI;

use plap_operator::{apply_plaplace, deterministic_envelope, dissipativity_pairing, evaluate, PExponent};
use plap_spectral::{random_band_limited, Complex64, Grid, Mode, SpectralField, SPECTRAL_GAP};

fn p(value: f64) -> PExponent {
    PExponent::new(value, 2).unwrap()
}

#[test]
fn zero_field_maps_to_zero() {
    let g = Grid::new(2, 32).unwrap();
    let z = SpectralField::zeros(g);
    assert_eq!(apply_plaplace(&z, p(3.0)).l2_norm(), 0.0);
    let d = dissipativity_pairing(&z, p(3.5));
    assert_eq!((d.pairing, d.grad_norm_p), (0.0, 0.0));
}

#[test]
fn p_two_is_the_laplacian() {
    for (dim, n) in [(2usize, 32usize), (3, 16)] {
        let g = Grid::new(dim, n).unwrap();
        let u = random_band_limited(g, g.cutoff(), 1.0, 11);
        let got = apply_plaplace(&u, PExponent::unchecked(2.0, dim));
        let lap = u.laplacian();
        assert!(got.sub(&lap).unwrap().l2_norm() < 1e-12 * lap.l2_norm());
    }
}

#[test]
fn cosine_mode_fourth_power_integral() {
    // u = √2 cos(2πx₁): |∂₁u|⁴ = (2√2π)⁴ sin⁴, and the mean of sin⁴ is 3/8
    let g = Grid::new(2, 32).unwrap();
    let amp = 0.5f64.sqrt();
    let u = SpectralField::from_modes(g, &[(Mode::new(&[1, 0]), Complex64::new(amp, 0.0))]).unwrap();
    let d = dissipativity_pairing(&u, p(4.0));
    let exact = (2.0 * 2f64.sqrt() * PI).powi(4) * 3.0 / 8.0;
    assert!((exact - 24.0 * PI.powi(4)).abs() < 1e-9);
    assert!((d.grad_norm_p - exact).abs() < 1e-10 * exact);
    assert!((d.pairing + exact).abs() < 1e-10 * exact);
    // Δ₄u = 3|∂₁u|²∂₁²u involves sin² cos, which spans modes 1 and 3
    let e = evaluate(&u, p(4.0));
    assert!((e.max_grad - 2.0 * 2f64.sqrt() * PI).abs() < 1e-9);
    let c1 = e.value.coeff(Mode::new(&[1, 0]));
    let c3 = e.value.coeff(Mode::new(&[3, 0]));
    let a = 2f64.sqrt() * (2.0 * PI).powi(4) * 6.0;
    assert!((c1.re + a / 8.0).abs() < 1e-9 * a && (c3.re - a / 8.0).abs() < 1e-9 * a);
}

#[test]
fn pairing_identity_on_random_fields() {
    let g = Grid::new(2, 64).unwrap();
    for seed in 0..20 {
        for pv in [3.0, 4.0, 2.5] {
            let u = random_band_limited(g, g.cutoff(), 1.0 + seed as f64 * 0.1, seed);
            let d = dissipativity_pairing(&u, p(pv));
            assert!(d.grad_norm_p > 0.0);
            assert!((d.pairing + d.grad_norm_p).abs() <= 1e-8 * d.grad_norm_p);
        }
    }
}

#[test]
fn quadrature_converges_under_refinement() {
    // the 128² evaluation of the same coefficients acts as the reference
    let coarse = Grid::new(2, 64).unwrap();
    let fine = Grid::new(2, 128).unwrap();
    let u = random_band_limited(coarse, 8, 2.0, 5);
    let modes: Vec<(Mode, Complex64)> = (0..coarse.len())
        .map(|i| (coarse.mode_at(i), u.coeffs()[i]))
        .filter(|(k, c)| k.is_positive() && c.norm() > 0.0)
        .collect();
    let v = SpectralField::from_modes(fine, &modes).unwrap();
    let a = dissipativity_pairing(&u, p(3.0));
    let b = dissipativity_pairing(&v, p(3.0));
    assert!((a.grad_norm_p - b.grad_norm_p).abs() < 1e-6 * b.grad_norm_p);
    assert!((a.pairing - b.pairing).abs() < 1e-6 * b.grad_norm_p);
}

#[test]
fn monotone_on_random_pairs() {
    let g = Grid::new(2, 32).unwrap();
    for seed in 0..100u64 {
        let u = random_band_limited(g, g.cutoff(), 1.5, 2 * seed).scaled(1.0 + (seed % 7) as f64);
        let v = random_band_limited(g, g.cutoff(), 1.0, 2 * seed + 1);
        let q = p(3.0 + (seed % 3) as f64 * 0.5);
        let diff = apply_plaplace(&u, q).sub(&apply_plaplace(&v, q)).unwrap();
        let s = diff.inner(&u.sub(&v).unwrap()).unwrap();
        let scale = u.grad_abs_pow(q.value()) + v.grad_abs_pow(q.value());
        assert!(s <= 1e-10 * scale, "seed {seed}: {s:e}");
    }
}

#[test]
fn homogeneous_of_degree_p_minus_one() {
    let g = Grid::new(2, 32).unwrap();
    let u = random_band_limited(g, 8, 1.0, 3);
    for pv in [3.0, 3.7, 4.0] {
        let base = apply_plaplace(&u, p(pv));
        for c in [-2.0, 0.3, 5.0] {
            let got = apply_plaplace(&u.scaled(c), p(pv));
            let want = base.scaled(c * f64::abs(c).powf(pv - 2.0));
            assert!(got.sub(&want).unwrap().l2_norm() < 1e-10 * want.l2_norm());
        }
    }
}

#[test]
fn output_is_real_zero_mean_and_dealiased() {
    let g = Grid::new(3, 16).unwrap();
    let u = random_band_limited(g, g.cutoff(), 1.0, 8);
    let out = apply_plaplace(&u, PExponent::new(3.0, 3).unwrap());
    assert!(out.is_dealiased());
    assert_eq!(out.coeffs()[0].norm(), 0.0);
    assert!(out.hermitian_defect() < 1e-12 * out.l2_norm());
}

#[test]
fn envelope_values() {
    assert_eq!(deterministic_envelope(1.3, 0.0, p(3.0), SPECTRAL_GAP), 1.3);
    assert_eq!(deterministic_envelope(0.0, 0.5, p(3.0), SPECTRAL_GAP), 0.0);
    let e = deterministic_envelope(1.0, 0.001, p(4.0), SPECTRAL_GAP);
    let direct = 1.0 / (1.0 + 2.0 * SPECTRAL_GAP.powi(2) * 0.001).sqrt();
    assert!((e - direct).abs() < 1e-15);
    assert!((e - 0.49275).abs() < 2e-4);
    // p = 3: 1 / (1 + λ₁^{3/2} t)
    let e3 = deterministic_envelope(1.0, 0.01, p(3.0), SPECTRAL_GAP);
    assert!((e3 - 1.0 / (1.0 + SPECTRAL_GAP.powf(1.5) * 0.01)).abs() < 1e-15);
    let mut prev = f64::INFINITY;
    for i in 0..50 {
        let v = deterministic_envelope(2.0, i as f64 * 0.01, p(3.5), SPECTRAL_GAP);
        assert!(v < prev);
        prev = v;
    }
}
