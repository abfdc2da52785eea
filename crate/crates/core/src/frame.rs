// Copyright 2026 qsteer contributors
// SPDX-License-Identifier: Apache-2.0

//! Instantaneous adiabatic-basis quantities and adiabaticity diagnostics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Everything the master equation needs at one instant, in units with ħ = 1.
///
/// `w_*` are the matrix elements of the basis-rotation generator
/// w = −i D†Ḋ, `m1` and `m2` the coupling-operator elements Y_gg/ħ and
/// Y_ge/ħ (with the electron charge absorbed into the bath operator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticFrame {
    /// Half-modulus of the Josephson off-diagonal element, rad/s.
    pub e12: f64,
    pub gamma: f64,
    pub eta: f64,
    /// Instantaneous gap, rad/s.
    pub omega0: f64,
    pub m1: f64,
    pub m2_re: f64,
    pub m2_im: f64,
    pub w_gg: f64,
    pub w_ee: f64,
    pub w_ge_re: f64,
    pub w_ge_im: f64,
}

impl AdiabaticFrame {
    /// A frame with no drive (w ≡ 0).
    pub fn static_frame(omega0: f64, m1: f64, m2: Complex64) -> Self {
        Self {
            e12: 0.5 * omega0,
            gamma: 0.0,
            eta: 0.0,
            omega0,
            m1,
            m2_re: m2.re,
            m2_im: m2.im,
            w_gg: 0.0,
            w_ee: 0.0,
            w_ge_re: 0.0,
            w_ge_im: 0.0,
        }
    }

    pub fn m2(&self) -> Complex64 {
        Complex64::new(self.m2_re, self.m2_im)
    }

    pub fn w_ge(&self) -> Complex64 {
        Complex64::new(self.w_ge_re, self.w_ge_im)
    }

    pub fn w_eg(&self) -> Complex64 {
        self.w_ge().conj()
    }

    /// Same frame with the drive switched off.
    pub fn without_drive(&self) -> Self {
        Self {
            w_gg: 0.0,
            w_ee: 0.0,
            w_ge_re: 0.0,
            w_ge_im: 0.0,
            ..*self
        }
    }

    /// Same frame with every w element multiplied by `factor`.
    pub fn with_drive_scaled(&self, factor: f64) -> Self {
        Self {
            w_gg: self.w_gg * factor,
            w_ee: self.w_ee * factor,
            w_ge_re: self.w_ge_re * factor,
            w_ge_im: self.w_ge_im * factor,
            ..*self
        }
    }

    /// The 2×2 matrix of w in the (g, e) basis.
    pub fn w_matrix(&self) -> [[Complex64; 2]; 2] {
        let ge = self.w_ge();
        [
            [Complex64::new(self.w_gg, 0.0), ge],
            [ge.conj(), Complex64::new(self.w_ee, 0.0)],
        ]
    }

    fn fields(&self) -> [f64; 11] {
        [
            self.e12,
            self.gamma,
            self.eta,
            self.omega0,
            self.m1,
            self.m2_re,
            self.m2_im,
            self.w_gg,
            self.w_ee,
            self.w_ge_re,
            self.w_ge_im,
        ]
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.fields().iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidFrame(format!("non-finite field in {self:?}")))
        }
    }

    /// Full validity check: finite, positive gap, |η| ≤ 1.
    pub fn validate(&self) -> Result<()> {
        self.check_finite()?;
        if self.omega0 <= 0.0 {
            return Err(Error::DegenerateGap { omega0: self.omega0 });
        }
        if self.eta.abs() > 1.0 {
            return Err(Error::InvalidFrame(format!("|eta| = {} > 1", self.eta.abs())));
        }
        Ok(())
    }
}

/// Bath spectrum evaluated at the three frequencies a two-level system sees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTriple {
    /// S(+ω0): emission into the bath (relaxation).
    pub s_plus: f64,
    /// S(−ω0): absorption from the bath (excitation).
    pub s_minus: f64,
    /// S(0): pure dephasing.
    pub s_zero: f64,
}

impl SpectralTriple {
    pub const ZERO: Self = Self {
        s_plus: 0.0,
        s_minus: 0.0,
        s_zero: 0.0,
    };

    pub fn new(s_plus: f64, s_minus: f64, s_zero: f64) -> Result<Self> {
        let t = Self {
            s_plus,
            s_minus,
            s_zero,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("s_plus", self.s_plus),
            ("s_minus", self.s_minus),
            ("s_zero", self.s_zero),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(crate::error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.s_plus == 0.0 && self.s_minus == 0.0 && self.s_zero == 0.0
    }

    /// Relaxation rate Γ↓ = S(ω0)|m2|².
    pub fn gamma_down(&self, frame: &AdiabaticFrame) -> f64 {
        self.s_plus * frame.m2().norm_sqr()
    }

    /// Excitation rate Γ↑ = S(−ω0)|m2|².
    pub fn gamma_up(&self, frame: &AdiabaticFrame) -> f64 {
        self.s_minus * frame.m2().norm_sqr()
    }

    /// Coherence decay rate ½(S(−ω0)+S(ω0))|m2|² + 2S(0)m1².
    pub fn gamma_dephasing(&self, frame: &AdiabaticFrame) -> f64 {
        let m2sq = frame.m2().norm_sqr();
        0.5 * self.s_minus * m2sq + 0.5 * self.s_plus * m2sq + 2.0 * self.s_zero * frame.m1 * frame.m1
    }
}

/// Trace norm ‖w‖ = Tr √(w†w) of the 2×2 w matrix.
///
/// For any 2×2 matrix the singular values satisfy
/// (σ1 + σ2)² = ‖w‖_F² + 2|det w|.
pub fn trace_norm_w(frame: &AdiabaticFrame) -> Result<f64> {
    frame.check_finite()?;
    let [[a, b], [c, d]] = frame.w_matrix();
    let frob = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
    let det = (a * d - b * c).norm();
    Ok((frob + 2.0 * det).sqrt())
}

/// Local adiabatic parameter α(t) = ħ‖w‖/Δ with Δ = ħω0.
pub fn local_alpha(frame: &AdiabaticFrame) -> Result<f64> {
    if !(frame.omega0 > 0.0) {
        return Err(Error::DegenerateGap { omega0: frame.omega0 });
    }
    Ok(trace_norm_w(frame)? / frame.omega0)
}

/// α(t) over a cycle together with the global estimate ᾱ = ħ/(Δ_min T_p).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub times: Vec<f64>,
    pub alpha_t: Vec<f64>,
    pub alpha_bar: f64,
    /// Minimum gap over the sampled cycle, rad/s.
    pub delta_min: f64,
    pub period: f64,
}

impl AdiabaticityReport {
    pub fn from_frames(times: Vec<f64>, frames: &[AdiabaticFrame], period: f64) -> Result<Self> {
        if times.len() != frames.len() || frames.is_empty() {
            return Err(crate::error::invalid("frames", "need one frame per sample time"));
        }
        let alpha_t = frames.iter().map(local_alpha).collect::<Result<Vec<_>>>()?;
        let delta_min = frames.iter().map(|f| f.omega0).fold(f64::INFINITY, f64::min);
        Ok(Self {
            times,
            alpha_t,
            alpha_bar: 1.0 / (delta_min * period),
            delta_min,
            period,
        })
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_t.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with_w(w_gg: f64, w_ee: f64, w_ge: Complex64, omega0: f64) -> AdiabaticFrame {
        AdiabaticFrame {
            w_gg,
            w_ee,
            w_ge_re: w_ge.re,
            w_ge_im: w_ge.im,
            ..AdiabaticFrame::static_frame(omega0, 0.0, Complex64::new(0.0, 0.0))
        }
    }

    /// Singular values from the eigenvalues of w†w.
    fn svd_oracle(f: &AdiabaticFrame) -> f64 {
        let w = f.w_matrix();
        let mut h = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    h[i][j] += w[k][i].conj() * w[k][j];
                }
            }
        }
        let tr = h[0][0].re + h[1][1].re;
        let det = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).re;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let l1 = 0.5 * tr + disc;
        let l2 = (0.5 * tr - disc).max(0.0);
        l1.sqrt() + l2.sqrt()
    }

    #[test]
    fn zero_drive_has_zero_norm() {
        let f = frame_with_w(0.0, 0.0, Complex64::new(0.0, 0.0), 1.0);
        assert_eq!(trace_norm_w(&f).unwrap(), 0.0);
        assert_eq!(local_alpha(&f).unwrap(), 0.0);
    }

    #[test]
    fn diagonal_drive() {
        let f = frame_with_w(1.0, -1.0, Complex64::new(0.0, 0.0), 1.0);
        assert!((trace_norm_w(&f).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn dense_drive_matches_svd() {
        let f = frame_with_w(0.1, -0.1, Complex64::new(0.3, 0.4), 1.0);
        let oracle = svd_oracle(&f);
        // |λ±| = √(0.01 + 0.25) each → 2·√0.26
        assert!((oracle - 2.0 * 0.26f64.sqrt()).abs() < 1e-14);
        assert!((trace_norm_w(&f).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn off_diagonal_alpha() {
        let f = frame_with_w(0.0, 0.0, Complex64::new(1e6, 0.0), 1e9);
        assert!((local_alpha(&f).unwrap() - 2e-3).abs() < 1e-15);
    }

    #[test]
    fn alpha_requires_gap() {
        let f = frame_with_w(0.0, 0.0, Complex64::new(1.0, 0.0), 0.0);
        assert!(matches!(local_alpha(&f), Err(Error::DegenerateGap { .. })));
    }

    #[test]
    fn non_finite_frame_rejected() {
        let f = frame_with_w(f64::NAN, 0.0, Complex64::new(0.0, 0.0), 1.0);
        assert!(matches!(trace_norm_w(&f), Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn trace_norm_random_matches_svd() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let f = frame_with_w(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)),
                1.0,
            );
            let a = trace_norm_w(&f).unwrap();
            assert!((a - svd_oracle(&f)).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
