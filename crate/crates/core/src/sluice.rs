// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Cooper pair sluice in the two-charge-state approximation.
//!
//! The island is restricted to the charge states |0⟩ and |1⟩ (no or one
//! excess Cooper pair). With δn_g = n_g − ½ and constant identity terms
//! dropped, the Hamiltonian is
//!
//! ```text
//! H = E_C δn_g (|0⟩⟨0| − |1⟩⟨1|) − E12 (e^{iγ}|0⟩⟨1| + e^{−iγ}|1⟩⟨0|)
//! ```
//!
//! whose eigenvectors are the states returned by [`eigenstate_amplitudes`].
//! The control parameters (J_L, J_R, δn_g) follow a six-segment
//! piecewise-linear loop; see [`cycle_waveform`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frame::AdiabaticFrame;
use crate::units;

/// Number of piecewise-linear segments in one pumping cycle.
pub const SEGMENTS: usize = 6;

/// Physical parameters of the sluice and its pumping loop.
///
/// Energies are angular frequencies (rad/s), `f` is the cycle frequency in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SluiceParams {
    pub e_c: f64,
    pub j_l_max: f64,
    pub j_l_min: f64,
    pub j_r_max: f64,
    pub j_r_min: f64,
    pub dng_max: f64,
    pub dng_min: f64,
    /// Superconducting phase difference across the device, rad.
    pub phi: f64,
    /// Gate coupling C_E/C_Σ.
    pub g: f64,
    /// Pumping frequency 1/T_p, Hz.
    pub f: f64,
}

impl SluiceParams {
    /// Symmetric loop: E_C/k_B = 1 K, J^M/E_C = 0.1, J^m/J^M = 0.03,
    /// δn_g^M = −δn_g^m = 0.3, φ = π/2, g = 0.01, f = 10 MHz.
    pub fn symmetric_default() -> Self {
        let e_c = units::kelvin_to_rad_s(1.0);
        let j_max = 0.1 * e_c;
        let j_min = 0.03 * j_max;
        Self {
            e_c,
            j_l_max: j_max,
            j_l_min: j_min,
            j_r_max: j_max,
            j_r_min: j_min,
            dng_max: 0.3,
            dng_min: -0.3,
            phi: 0.5 * PI,
            g: 0.01,
            f: 10e6,
        }
    }

    /// Strongly asymmetric loop used to expose charge non-conservation of the
    /// secular equations: J_L^M/E_C = 0.1, J_L^m/J_L^M = 0.006,
    /// J_R^M/E_C = 0.2, J_R^m/J_R^M = 0.04, δn_g^M = 0.4, δn_g^m = −0.03.
    pub fn asymmetric_default() -> Self {
        let base = Self::symmetric_default();
        let e_c = base.e_c;
        Self {
            j_l_max: 0.1 * e_c,
            j_l_min: 0.006 * 0.1 * e_c,
            j_r_max: 0.2 * e_c,
            j_r_min: 0.04 * 0.2 * e_c,
            dng_max: 0.4,
            dng_min: -0.03,
            ..base
        }
    }

    pub fn with_g(self, g: f64) -> Self {
        Self { g, ..self }
    }

    pub fn with_f(self, f: f64) -> Self {
        Self { f, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// Cycle period T_p in seconds.
    pub fn period(&self) -> f64 {
        1.0 / self.f
    }

    pub fn segment_duration(&self) -> f64 {
        self.period() / SEGMENTS as f64
    }

    /// Hard validation. Returns the list of soft warnings (two-state
    /// approximation validity) on success.
    pub fn validate(&self) -> Result<Vec<String>> {
        let finite = [
            self.e_c,
            self.j_l_max,
            self.j_l_min,
            self.j_r_max,
            self.j_r_min,
            self.dng_max,
            self.dng_min,
            self.phi,
            self.g,
            self.f,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(invalid("sluice", "non-finite parameter"));
        }
        if self.e_c <= 0.0 {
            return Err(invalid("e_c", "must be positive"));
        }
        for (name, lo, hi) in [
            ("j_l", self.j_l_min, self.j_l_max),
            ("j_r", self.j_r_min, self.j_r_max),
        ] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(invalid(name, format!("need 0 < min <= max, got min={lo}, max={hi}")));
            }
        }
        if !(self.dng_min < self.dng_max) {
            return Err(invalid("dng", "need dng_min < dng_max"));
        }
        if self.dng_min <= -0.5 || self.dng_max >= 0.5 {
            return Err(invalid("dng", "gate offsets must lie in (-1/2, 1/2)"));
        }
        if (0.5 * self.phi).cos().abs() < 1e-12 {
            return Err(invalid("phi", "phi = pi (mod 2 pi) makes gamma discontinuous"));
        }
        if self.g < 0.0 {
            return Err(invalid("g", "must be non-negative"));
        }
        if self.f <= 0.0 {
            return Err(invalid("f", "must be positive"));
        }
        let mut warnings = Vec::new();
        let j_top = self.j_l_max.max(self.j_r_max);
        if j_top > 0.3 * self.e_c {
            warnings.push(format!(
                "max Josephson energy is {:.3} E_C; the two-state approximation needs J << E_C",
                j_top / self.e_c
            ));
        }
        Ok(warnings)
    }
}

/// Control parameters and their exact time derivatives at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub j_l: f64,
    pub j_r: f64,
    pub dng: f64,
    pub dj_l: f64,
    pub dj_r: f64,
    pub ddng: f64,
}

/// Linear ramp value and slope on a segment of length `dur` at local time `s`.
fn ramp(from: f64, to: f64, s: f64, dur: f64) -> (f64, f64) {
    let frac = s / dur;
    (from + (to - from) * frac, (to - from) / dur)
}

/// Segment index (0-based) that contains phase `tau` ∈ [0, T_p).
/// Corners belong to the segment that starts there.
pub fn segment_of(params: &SluiceParams, t: f64) -> usize {
    let tp = params.period();
    let tau = t.rem_euclid(tp);
    ((tau / tp * SEGMENTS as f64).floor() as usize).min(SEGMENTS - 1)
}

/// Waveform of segment `seg`, evaluated at `local` seconds after the segment
/// start. Values outside [0, T_p/6] extrapolate the same linear piece, which
/// is what an integrator step confined to this segment needs at its ends.
pub fn segment_waveform(params: &SluiceParams, seg: usize, local: f64) -> ControlPoint {
    let p = params;
    let dur = p.segment_duration();
    let hold = |v: f64| (v, 0.0);
    let (jl, jr, ng) = match seg {
        0 => (ramp(p.j_l_min, p.j_l_max, local, dur), hold(p.j_r_min), hold(p.dng_min)),
        1 => (hold(p.j_l_max), hold(p.j_r_min), ramp(p.dng_min, p.dng_max, local, dur)),
        2 => (ramp(p.j_l_max, p.j_l_min, local, dur), hold(p.j_r_min), hold(p.dng_max)),
        3 => (hold(p.j_l_min), ramp(p.j_r_min, p.j_r_max, local, dur), hold(p.dng_max)),
        4 => (hold(p.j_l_min), hold(p.j_r_max), ramp(p.dng_max, p.dng_min, local, dur)),
        5 => (hold(p.j_l_min), ramp(p.j_r_max, p.j_r_min, local, dur), hold(p.dng_min)),
        _ => panic!("segment index {seg} out of range"),
    };
    ControlPoint {
        j_l: jl.0,
        j_r: jr.0,
        dng: ng.0,
        dj_l: jl.1,
        dj_r: jr.1,
        ddng: ng.1,
    }
}

/// The T_p-periodic pumping loop:
/// (1) J_L min→max, (2) δn_g min→max, (3) J_L max→min,
/// (4) J_R min→max, (5) δn_g max→min, (6) J_R max→min,
/// each lasting T_p/6. Derivatives at corners take the right limit.
pub fn cycle_waveform(params: &SluiceParams, t: f64) -> ControlPoint {
    let tp = params.period();
    let tau = t.rem_euclid(tp);
    let seg = segment_of(params, tau);
    segment_waveform(params, seg, tau - seg as f64 * params.segment_duration())
}

/// Instantaneous adiabatic frame of the sluice at control point `cp`.
pub fn frame_at(params: &SluiceParams, cp: &ControlPoint) -> Result<AdiabaticFrame> {
    let (jl, jr) = (cp.j_l, cp.j_r);
    let (half_s, half_c) = (0.5 * params.phi).sin_cos();
    let (sin_phi, cos_phi) = params.phi.sin_cos();

    // −⟨0|H|1⟩ = ½(D + iN) = E12 e^{iγ}
    let num = (jr - jl) * half_s;
    let den = (jr + jl) * half_c;
    let e12 = 0.5 * num.hypot(den);
    let mut gamma = num.atan2(den);
    if den < 0.0 && gamma < 0.0 {
        gamma += 2.0 * PI;
    }

    let ec_dng = params.e_c * cp.dng;
    let half_gap = ec_dng.hypot(e12);
    let omega0 = 2.0 * half_gap;
    if !(omega0 > 0.0) {
        return Err(Error::DegenerateGap { omega0 });
    }
    let eta = ec_dng / half_gap;
    let sqrt_1m_eta2 = e12 / half_gap;
    if e12 == 0.0 || eta * eta == 1.0 {
        return Err(Error::SingularCoordinate);
    }

    let de12 = (jl * cp.dj_l + jr * cp.dj_r + cos_phi * (cp.dj_l * jr + jl * cp.dj_r)) / (4.0 * e12);
    let gamma_dot = sin_phi * (cp.dj_r * jl - cp.dj_l * jr) / (4.0 * e12 * e12);
    // η̇/√(1−η²) = E_C(δṅ_g E12 − δn_g Ė12)/ε²
    let eta_dot_over = params.e_c * (cp.ddng * e12 - cp.dng * de12) / (half_gap * half_gap);

    Ok(AdiabaticFrame {
        e12,
        gamma,
        eta,
        omega0,
        m1: -params.g * eta,
        m2_re: params.g * sqrt_1m_eta2,
        m2_im: 0.0,
        w_gg: -0.5 * (1.0 + eta) * gamma_dot,
        w_ee: -0.5 * (1.0 - eta) * gamma_dot,
        w_ge_re: 0.5 * sqrt_1m_eta2 * gamma_dot,
        w_ge_im: -0.5 * eta_dot_over,
    })
}

/// Convenience: frame at time `t` of the periodic loop.
pub fn frame_at_time(params: &SluiceParams, t: f64) -> Result<AdiabaticFrame> {
    frame_at(params, &cycle_waveform(params, t))
}

/// γ̇ and η̇ implied by a frame's w elements (inverse of the w formulas).
pub fn angle_rates(frame: &AdiabaticFrame) -> (f64, f64) {
    let gamma_dot = -(frame.w_gg + frame.w_ee);
    let s = (1.0 - frame.eta * frame.eta).max(0.0).sqrt();
    (gamma_dot, -2.0 * frame.w_ge_im * s)
}

/// Ground and excited states in the charge basis (|0⟩, |1⟩):
/// |g⟩ = (√(1−η)|0⟩ + e^{−iγ}√(1+η)|1⟩)/√2,
/// |e⟩ = (√(1+η)|0⟩ − e^{−iγ}√(1−η)|1⟩)/√2.
pub fn eigenstate_amplitudes(frame: &AdiabaticFrame) -> ([Complex64; 2], [Complex64; 2]) {
    let eta = frame.eta.clamp(-1.0, 1.0);
    let phase = Complex64::from_polar(1.0, -frame.gamma);
    let a = (0.5 * (1.0 - eta)).sqrt();
    let b = (0.5 * (1.0 + eta)).sqrt();
    (
        [Complex64::new(a, 0.0), phase * b],
        [Complex64::new(b, 0.0), -phase * a],
    )
}

/// Two-level Hamiltonian in the charge basis, rad/s.
pub fn hamiltonian(params: &SluiceParams, cp: &ControlPoint) -> [[Complex64; 2]; 2] {
    let ec = params.e_c * cp.dng;
    let h = 0.5 * params.phi;
    let off = -0.5
        * (cp.j_l * Complex64::from_polar(1.0, -h) + cp.j_r * Complex64::from_polar(1.0, h));
    [[Complex64::new(ec, 0.0), off], [off.conj(), Complex64::new(-ec, 0.0)]]
}

/// Supercurrent operators I_L = J_L sin(φ/2 − θ) and I_R = J_R sin(φ/2 + θ)
/// in the charge basis, in units of 2e per second.
pub fn current_operators(
    params: &SluiceParams,
    cp: &ControlPoint,
) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let h = 0.5 * params.phi;
    let i2 = Complex64::new(0.0, 2.0);
    // e^{iθ} = |0⟩⟨1|, so sin(h − θ) has ⟨1|·|0⟩ = e^{ih}/2i and ⟨0|·|1⟩ = −e^{−ih}/2i
    let l10 = cp.j_l * Complex64::from_polar(1.0, h) / i2;
    let r01 = cp.j_r * Complex64::from_polar(1.0, h) / i2;
    let zero = Complex64::new(0.0, 0.0);
    (
        [[zero, l10.conj()], [l10, zero]],
        [[zero, r01], [r01.conj(), zero]],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matvec(m: &[[Complex64; 2]; 2], v: &[Complex64; 2]) -> [Complex64; 2] {
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    fn inner(a: &[Complex64; 2], b: &[Complex64; 2]) -> Complex64 {
        a[0].conj() * b[0] + a[1].conj() * b[1]
    }

    #[test]
    fn cycle_start_and_periodicity() {
        let p = SluiceParams::symmetric_default();
        let c0 = cycle_waveform(&p, 0.0);
        assert_eq!((c0.j_l, c0.j_r, c0.dng), (p.j_l_min, p.j_r_min, p.dng_min));
        let c1 = cycle_waveform(&p, p.period());
        assert_eq!(c0, c1);
        let c2 = cycle_waveform(&p, 3.0 * p.period());
        assert_eq!(c0, c2);
    }

    #[test]
    fn quarter_period_is_inside_gate_ramp() {
        let p = SluiceParams::symmetric_default();
        let tp = p.period();
        let t = tp / 4.0;
        let c = cycle_waveform(&p, t);
        let expect = p.dng_min + (p.dng_max - p.dng_min) * (t - tp / 6.0) * 6.0 / tp;
        assert_eq!(c.j_l, p.j_l_max);
        assert_eq!(c.j_r, p.j_r_min);
        assert!((c.dng - expect).abs() < 1e-15);
        assert!((c.ddng - 6.0 * (p.dng_max - p.dng_min) / tp).abs() < 1e-6 * c.ddng.abs());
        assert_eq!(c.dj_l, 0.0);
    }

    #[test]
    fn corner_uses_right_limit() {
        let p = SluiceParams::symmetric_default();
        let c = cycle_waveform(&p, p.segment_duration());
        assert_eq!(c.dj_l, 0.0);
        assert!(c.ddng > 0.0);
    }

    #[test]
    fn symmetric_junctions_give_zero_gamma() {
        let p = SluiceParams::symmetric_default().with_phi(1.1);
        let j = 0.07 * p.e_c;
        let cp = ControlPoint { j_l: j, j_r: j, dng: 0.1, dj_l: 0.0, dj_r: 0.0, ddng: 0.0 };
        let f = frame_at(&p, &cp).unwrap();
        assert_eq!(f.gamma, 0.0);
        assert!((f.e12 - j * (0.55f64).cos()).abs() < 1e-12 * j);
    }

    #[test]
    fn degeneracy_point() {
        let p = SluiceParams::symmetric_default();
        let cp = ControlPoint { j_l: 0.05 * p.e_c, j_r: 0.02 * p.e_c, dng: 0.0, dj_l: 0.0, dj_r: 0.0, ddng: 0.0 };
        let f = frame_at(&p, &cp).unwrap();
        assert_eq!(f.eta, 0.0);
        assert_eq!(f.omega0, 2.0 * f.e12);
        assert_eq!(f.m1, 0.0);
        assert_eq!(f.m2_re, p.g);
    }

    #[test]
    fn singular_when_e12_vanishes() {
        let p = SluiceParams::symmetric_default().with_phi(PI);
        let cp = ControlPoint { j_l: 1e9, j_r: 1e9, dng: 0.1, dj_l: 0.0, dj_r: 0.0, ddng: 0.0 };
        assert_eq!(frame_at(&p, &cp), Err(Error::SingularCoordinate));
    }

    #[test]
    fn equal_superposition_at_origin() {
        let f = AdiabaticFrame::static_frame(1.0, 0.0, Complex64::new(1.0, 0.0));
        let (g, e) = eigenstate_amplitudes(&f);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((g[0].re - s).abs() < 1e-15 && (g[1].re - s).abs() < 1e-15);
        assert!((e[0].re - s).abs() < 1e-15 && (e[1].re + s).abs() < 1e-15);
    }

    #[test]
    fn charge_state_limit() {
        let f = AdiabaticFrame { eta: 1.0, gamma: 0.3, ..AdiabaticFrame::static_frame(1.0, 0.0, Complex64::new(0.0, 0.0)) };
        let (g, e) = eigenstate_amplitudes(&f);
        assert!(g[0].norm() < 1e-15);
        assert!((g[1] - Complex64::from_polar(1.0, -0.3)).norm() < 1e-15);
        assert!((e[0].re - 1.0).abs() < 1e-15 && e[1].norm() < 1e-15);
    }

    #[test]
    fn eigenstates_diagonalise_reconstructed_hamiltonian() {
        let p = SluiceParams::symmetric_default();
        for k in 0..600 {
            for phi in [0.3, 1.5, 2.9, 3.5, 5.0] {
                let p = p.with_phi(phi);
                let t = (k as f64 + 0.37) / 600.0 * p.period();
                let cp = cycle_waveform(&p, t);
                let f = frame_at(&p, &cp).unwrap();
                let h = hamiltonian(&p, &cp);
                let (g, e) = eigenstate_amplitudes(&f);
                assert!(inner(&g, &e).norm() < 1e-12);
                assert!((inner(&g, &g).re - 1.0).abs() < 1e-12);
                let hg = matvec(&h, &g);
                let he = matvec(&h, &e);
                let scale = f.omega0;
                for i in 0..2 {
                    assert!((hg[i] + 0.5 * f.omega0 * g[i]).norm() < 1e-12 * scale, "phi={phi} k={k}");
                    assert!((he[i] - 0.5 * f.omega0 * e[i]).norm() < 1e-12 * scale);
                }
            }
        }
    }

    /// γ̇ and η̇ against central differences of γ(t), η(t) at segment midpoints.
    #[test]
    fn angle_rates_match_finite_differences() {
        for p in [SluiceParams::symmetric_default(), SluiceParams::asymmetric_default()] {
            let tp = p.period();
            let dt = 1e-6 * tp;
            for seg in 0..SEGMENTS {
                let t = (seg as f64 + 0.5) * p.segment_duration();
                let f = frame_at_time(&p, t).unwrap();
                let fp = frame_at_time(&p, t + dt).unwrap();
                let fm = frame_at_time(&p, t - dt).unwrap();
                let (gd, ed) = angle_rates(&f);
                let gd_fd = (fp.gamma - fm.gamma) / (2.0 * dt);
                let ed_fd = (fp.eta - fm.eta) / (2.0 * dt);
                let gs = gd.abs().max(1.0 / tp);
                let es = ed.abs().max(1.0 / tp);
                assert!((gd - gd_fd).abs() <= 1e-6 * gs, "seg {seg}: {gd} vs {gd_fd}");
                assert!((ed - ed_fd).abs() <= 1e-6 * es, "seg {seg}: {ed} vs {ed_fd}");
            }
        }
    }

    /// w_kl = −i⟨k|∂_t l⟩ from finite differences of the eigenvectors.
    #[test]
    fn w_elements_match_eigenvector_derivatives() {
        for phi in [0.7, std::f64::consts::FRAC_PI_2, 2.5, 4.1] {
            let p = SluiceParams::asymmetric_default().with_phi(phi);
            let dt = 1e-6 * p.period();
            for k in 0..24 {
                let t = (k as f64 + 0.5) / 24.0 * p.period();
                let f = frame_at_time(&p, t).unwrap();
                let (g, e) = eigenstate_amplitudes(&f);
                let (gp, ep) = eigenstate_amplitudes(&frame_at_time(&p, t + dt).unwrap());
                let (gm, em) = eigenstate_amplitudes(&frame_at_time(&p, t - dt).unwrap());
                let d = |a: &[Complex64; 2], b: &[Complex64; 2]| [(a[0] - b[0]) / (2.0 * dt), (a[1] - b[1]) / (2.0 * dt)];
                let mi = Complex64::new(0.0, -1.0);
                let w_gg = mi * inner(&g, &d(&gp, &gm));
                let w_ee = mi * inner(&e, &d(&ep, &em));
                let w_ge = mi * inner(&g, &d(&ep, &em));
                let scale = f.w_ge().norm().max(f.w_gg.abs()).max(1.0 / p.period());
                assert!((w_gg.re - f.w_gg).abs() < 1e-5 * scale, "phi={phi} k={k}: {w_gg} vs {}", f.w_gg);
                assert!((w_ee.re - f.w_ee).abs() < 1e-5 * scale);
                assert!((w_ge - f.w_ge()).norm() < 1e-5 * scale, "phi={phi} k={k}: {w_ge} vs {}", f.w_ge());
            }
        }
    }

    #[test]
    fn coupling_norm_is_g_squared() {
        let p = SluiceParams::asymmetric_default().with_g(0.037);
        for k in 0..500 {
            let f = frame_at_time(&p, k as f64 / 500.0 * p.period()).unwrap();
            let n = f.m1 * f.m1 + f.m2().norm_sqr();
            assert!((n - p.g * p.g).abs() <= 4.0 * f64::EPSILON * p.g * p.g);
            assert_eq!(f.m2_im, 0.0);
        }
    }

    #[test]
    fn frame_is_periodic() {
        let p = SluiceParams::asymmetric_default();
        for k in 0..100 {
            let t = k as f64 / 100.0 * p.period();
            let a = frame_at_time(&p, t).unwrap();
            let b = frame_at_time(&p, t + 4.0 * p.period()).unwrap();
            let fields_a = [a.e12, a.gamma, a.eta, a.omega0, a.w_gg, a.w_ee, a.w_ge_re, a.w_ge_im];
            let fields_b = [b.e12, b.gamma, b.eta, b.omega0, b.w_gg, b.w_ee, b.w_ge_re, b.w_ge_im];
            for (x, y) in fields_a.iter().zip(fields_b) {
                assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{x} vs {y}");
            }
        }
    }
}
