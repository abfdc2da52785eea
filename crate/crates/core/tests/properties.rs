use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qsteer_core::dynamics::cycle_adiabaticity;
use qsteer_core::environment::{EngineeredEnvironment, OhmicSpectrum, DEFAULT_FLUX_GUARD};
use qsteer_core::frame::{local_alpha, AdiabaticFrame, SpectralTriple};
use qsteer_core::master::{rhs, rhs_unitary, RhsVariant};
use qsteer_core::observables::superadiabatic_population;
use qsteer_core::sluice::{eigenstate_amplitudes, frame_at_time, SluiceParams};
use qsteer_core::state::{DensityMatrix2, StateRate};

fn sluice() -> impl Strategy<Value = SluiceParams> {
    (any::<bool>(), 0.05..0.95f64, 0.001..0.3f64, 1e5..1e9f64).prop_map(|(sym, phi, g, f)| {
        let base = if sym {
            SluiceParams::symmetric_default()
        } else {
            SluiceParams::asymmetric_default()
        };
        base.with_phi(phi * 2.0 * PI).with_g(g).with_f(f)
    })
}

fn frame() -> impl Strategy<Value = AdiabaticFrame> {
    (sluice(), 0.0..1.0f64).prop_filter_map("degenerate point", |(p, s)| frame_at_time(&p, s * p.period()).ok())
}

fn spectra() -> impl Strategy<Value = SpectralTriple> {
    (0.0..1e9f64, 0.0..1e9f64, 0.0..1e9f64).prop_map(|(s_plus, s_minus, s_zero)| SpectralTriple {
        s_plus,
        s_minus,
        s_zero,
    })
}

/// Physical states: ρ_gg ∈ [0, 1], |ρ_ge|² ≤ ρ_gg ρ_ee.
fn state() -> impl Strategy<Value = DensityMatrix2> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..2.0 * PI).prop_map(|(p, r, th)| {
        let c = r * (p * (1.0 - p)).sqrt();
        DensityMatrix2::new(p, Complex64::from_polar(c, th))
    })
}

fn close(a: &StateRate, b: &StateRate, scale: f64) -> bool {
    (a.d_gg - b.d_gg).abs() <= 1e-12 * scale && (a.d_ge - b.d_ge).norm() <= 1e-12 * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adiabaticity_scales_with_frequency(p in sluice(), k in 0.1..10.0f64) {
        let a = cycle_adiabaticity(&p, 128).unwrap();
        let b = cycle_adiabaticity(&p.with_f(p.f * k), 128).unwrap();
        prop_assert!((b.alpha_bar - k * a.alpha_bar).abs() <= 1e-9 * b.alpha_bar);
        prop_assert!((b.alpha_max() - k * a.alpha_max()).abs() <= 1e-9 * b.alpha_max());
    }

    #[test]
    fn eigenstates_are_orthonormal(f in frame()) {
        let (g, e) = eigenstate_amplitudes(&f);
        let dot = |a: &[Complex64; 2], b: &[Complex64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
        prop_assert!((dot(&g, &g).re - 1.0).abs() < 1e-14);
        prop_assert!((dot(&e, &e).re - 1.0).abs() < 1e-14);
        prop_assert!(dot(&g, &e).norm() < 1e-14);
    }

    #[test]
    fn coupling_elements_have_fixed_norm(p in sluice(), s in 0.0..1.0f64) {
        if let Ok(f) = frame_at_time(&p, s * p.period()) {
            let n = f.m1 * f.m1 + f.m2().norm_sqr();
            prop_assert!((n - p.g * p.g).abs() <= 1e-14 * p.g * p.g);
        }
    }

    #[test]
    fn rhs_is_affine_in_the_state(f in frame(), sp in spectra(), a in state(), b in state(), x in 0.0..1.0f64) {
        for v in RhsVariant::ALL {
            let mix = DensityMatrix2::new(
                x * a.rho_gg + (1.0 - x) * b.rho_gg,
                x * a.rho_ge() + (1.0 - x) * b.rho_ge(),
            );
            let (ra, rb, rm) = (rhs(v, &f, &sp, &a).unwrap(), rhs(v, &f, &sp, &b).unwrap(), rhs(v, &f, &sp, &mix).unwrap());
            let lin = StateRate { d_gg: x * ra.d_gg + (1.0 - x) * rb.d_gg, d_ge: x * ra.d_ge + (1.0 - x) * rb.d_ge };
            prop_assert!(close(&rm, &lin, ra.norm().max(rb.norm()).max(1.0)), "{v}");
        }
    }

    #[test]
    fn dissipator_is_linear_in_the_spectrum(f in frame(), s1 in spectra(), s2 in spectra(), rho in state()) {
        let u = rhs_unitary(&f, &rho);
        let sum = SpectralTriple { s_plus: s1.s_plus + s2.s_plus, s_minus: s1.s_minus + s2.s_minus, s_zero: s1.s_zero + s2.s_zero };
        for v in [RhsVariant::Full, RhsVariant::Secular] {
            let d = |sp: &SpectralTriple| {
                let r = rhs(v, &f, sp, &rho).unwrap();
                StateRate { d_gg: r.d_gg - u.d_gg, d_ge: r.d_ge - u.d_ge }
            };
            let (a, b, c) = (d(&s1), d(&s2), d(&sum));
            let lin = StateRate { d_gg: a.d_gg + b.d_gg, d_ge: a.d_ge + b.d_ge };
            prop_assert!(close(&c, &lin, u.norm().max(c.norm())), "{v}");
        }
    }

    #[test]
    fn zero_spectrum_is_unitary(f in frame(), rho in state()) {
        let u = rhs_unitary(&f, &rho);
        for v in [RhsVariant::Full, RhsVariant::Secular] {
            prop_assert_eq!(rhs(v, &f, &SpectralTriple::ZERO, &rho).unwrap(), u);
        }
    }

    #[test]
    fn superadiabatic_population_is_a_probability(f in frame(), rho in state(), k in 1.0..1e4f64) {
        // drive up to α of order one
        let f = f.with_drive_scaled(k);
        let p = superadiabatic_population(&f, &rho);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p), "{p} at alpha {:?}", local_alpha(&f));
    }

    #[test]
    fn engineered_spectrum_is_flux_periodic(flux in -2.0..2.0f64, shift in -3i32..=3, logw in 8.0..12.0f64) {
        let env = EngineeredEnvironment {
            base: OhmicSpectrum::new(1.5e3, 0.0, 0.1).unwrap(),
            m_squids: 100,
            c_e: 1e-15,
            c_s: 0.3e-15,
            r_s: 500.0,
            i_c: 4e-9,
            flux,
            flux_guard: DEFAULT_FLUX_GUARD,
        };
        // the array inductance diverges at half a quantum
        prop_assume!((PI * flux).cos().abs() > 0.05);
        let w = 10f64.powf(logw);
        if let (Ok(a), Ok(b)) = (env.spectrum(w), env.with_flux(flux + shift as f64).spectrum(w)) {
            prop_assert!((a - b).abs() <= 1e-9 * a, "{a} {b}");
        }
    }
}
