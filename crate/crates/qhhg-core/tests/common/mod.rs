//! Shared oracles for the integration suites: independent quadrature routines
//! and the brute-force two-mode grid construction. Everything here is kept
//! deliberately separate from the library's own evaluation paths.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use qhhg_core::params::{
    build_params, intensity_for_bloch_ratio, LaserInput, MaterialInput, SimulationConfig,
    SystemParams,
};
use qhhg_core::quantum::QuadratureState;

/// Parameters with an exactly pinned Bloch ratio and coupling strength on the
/// 1.44 µm / 4.4 Å calibration material.
pub fn pinned_params(x: f64, n0: f64, mu: f64, harmonic_cutoff: u32) -> SystemParams<f64> {
    let mut laser = LaserInput::new(1.44, 1.0);
    laser.peak_intensity_w_cm2 = intensity_for_bloch_ratio(x, 1.44, 4.4);
    laser.mean_photon_number = n0;
    let material = MaterialInput::new(4.4, 2.0, 1.0);
    let sim = SimulationConfig {
        harmonic_cutoff,
        ..Default::default()
    };
    let mut p = build_params(&laser, &material, &sim).unwrap();
    let scale = if p.coupling_strength != 0.0 {
        mu / p.coupling_strength
    } else {
        0.0
    };
    p.coupling_strength *= scale;
    p
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let panels = 64;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let f0 = f(x0);
        let f1 = f(x1);
        let (whole, m, fm) = simpson(f, x0, f0, x1, f1);
        total += recurse(f, x0, f0, x1, f1, whole, m, fm, tol / panels as f64, 42);
    }
    total
}

/// `∫ cos(mτ) e^{iωτ} dτ` by adaptive quadrature of real and imaginary parts.
pub fn quad_cos_exp(m: u32, omega: f64, t0: f64, t: f64) -> C64 {
    let re = adaptive_simpson(
        &|tau: f64| (m as f64 * tau).cos() * (omega * tau).cos(),
        t0,
        t,
        1e-12,
    );
    let im = adaptive_simpson(
        &|tau: f64| (m as f64 * tau).cos() * (omega * tau).sin(),
        t0,
        t,
        1e-12,
    );
    C64::new(re, im)
}

pub const GL16_NODES: [f64; 16] = [
    -0.9894009349916499,
    -0.9445750230732326,
    -0.8656312023878318,
    -0.755_404_408_355_003,
    -0.6178762444026438,
    -0.4580167776572274,
    -0.2816035507792589,
    -0.0950125098376374,
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.755_404_408_355_003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
pub const GL16_WEIGHTS: [f64; 16] = [
    0.0271524594117541,
    0.0622535239386479,
    0.0951585116824928,
    0.1246289712555339,
    0.1495959888165767,
    0.1691565193950025,
    0.1826034150449236,
    0.1894506104550685,
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// Two-dimensional Gauss-Legendre quadrature of the double time integral
/// `∫∫ cos((2n−1)τ) cos((2m−1)τ') sin(ω_j(τ'−τ)) dτ dτ'` over `[t0, t]²`.
pub fn quad_double_integral(n: u32, m: u32, omega_j: f64, t0: f64, t: f64) -> f64 {
    let a = (2 * n - 1) as f64;
    let b = (2 * m - 1) as f64;
    let span = t - t0;
    let fmax = a.max(b) + omega_j;
    let panels = ((span * fmax / (2.0 * std::f64::consts::PI)).ceil() as usize + 2).max(4);
    let h = span / panels as f64;
    let mut total = 0.0;
    for pa in 0..panels {
        let ca = t0 + h * (pa as f64 + 0.5);
        // cache the τ factors for this panel row
        let mut tau_vals = [(0.0f64, 0.0f64, 0.0f64); 16];
        for (idx, (xi, _)) in GL16_NODES.iter().zip(&GL16_WEIGHTS).enumerate() {
            let tau = ca + 0.5 * h * xi;
            tau_vals[idx] = (tau, (a * tau).cos(), 0.0);
        }
        for pb in 0..panels {
            let cb = t0 + h * (pb as f64 + 0.5);
            let mut s = 0.0;
            for (idx, wi) in GL16_WEIGHTS.iter().enumerate() {
                let (tau, cos_a, _) = tau_vals[idx];
                for (xj, wj) in GL16_NODES.iter().zip(&GL16_WEIGHTS) {
                    let taup = cb + 0.5 * h * xj;
                    s += wi * wj * cos_a * (b * taup).cos() * (omega_j * (taup - tau)).sin();
                }
            }
            total += s * 0.25 * h * h;
        }
    }
    total
}

/// Brute-force two-mode wavefunction `Ψ(Q_L, Q₂)` on a dense grid, built from
/// explicit Gaussian exponentials (no coherent-overlap algebra), with the
/// reduced quantities obtained by explicit partial traces.
pub struct DenseTwoMode {
    pub q2: Vec<f64>,
    pub w2: f64,
    pub w_l: f64,
    /// psi[i][k] = Ψ(Q_L[i], Q₂[k])
    pub psi: Vec<Vec<C64>>,
}

impl DenseTwoMode {
    /// Requires a single harmonic mode (M = 2).
    pub fn build(state: &QuadratureState<f64>, q2_halfwidth: f64, n2: usize) -> Self {
        assert_eq!(state.mode_count(), 1, "dense oracle is two-mode only");
        let w2 = 2.0 * q2_halfwidth / (n2 - 1) as f64;
        let q2: Vec<f64> = (0..n2).map(|k| -q2_halfwidth + w2 * k as f64).collect();
        let norm = std::f64::consts::PI.powf(-0.25);
        let psi = (0..state.grid.points)
            .map(|i| {
                let pump = C64::from_polar(state.psi0[i], state.f[i]);
                let alpha = state.alpha[i][0];
                let (ar, ai) = (alpha.re, alpha.im);
                q2.iter()
                    .map(|&q| {
                        let d = q - 2f64.sqrt() * ar;
                        let gauss = norm * (-0.5 * d * d).exp();
                        pump * gauss * C64::from_polar(1.0, 2f64.sqrt() * ai * q - ar * ai)
                    })
                    .collect()
            })
            .collect();
        Self {
            q2,
            w2,
            w_l: state.grid.weight,
            psi,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.psi.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>() * self.w_l * self.w2
    }

    /// ⟨g(Q_L)⟩ from the dense probability density.
    pub fn marginal_expectation(&self, nodes: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (i, row) in self.psi.iter().enumerate() {
            let p: f64 = row.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.w2;
            acc += g(nodes[i]) * p;
        }
        acc * self.w_l
    }

    /// Pump-mode density matrix by explicit partial trace over Q₂.
    pub fn rho_laser(&self) -> DMatrix<C64> {
        let n = self.psi.len();
        DMatrix::from_fn(n, n, |i, k| {
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in self.psi[i].iter().zip(&self.psi[k]) {
                acc += a * b.conj();
            }
            acc * self.w2
        })
    }

    pub fn trace(&self, rho: &DMatrix<C64>) -> f64 {
        (0..rho.nrows()).map(|i| rho[(i, i)].re).sum::<f64>() * self.w_l
    }

    pub fn purity(&self, rho: &DMatrix<C64>) -> f64 {
        rho.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.w_l * self.w_l
    }

    pub fn entropy(&self, rho: &DMatrix<C64>) -> f64 {
        eigen_entropy(rho, self.w_l)
    }

    /// ⟨N₂⟩ = (⟨Q₂²⟩ + ⟨P₂²⟩ − 1)/2 with ⟨P₂²⟩ from a spectral derivative.
    pub fn mean_photons(&self) -> f64 {
        let n2 = self.q2.len();
        let mut q2_sq = 0.0;
        for row in &self.psi {
            for (v, q) in row.iter().zip(&self.q2) {
                q2_sq += v.norm_sqr() * q * q;
            }
        }
        q2_sq *= self.w_l * self.w2;

        let mut planner = rustfft::FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n2);
        let mut p2_sq = 0.0;
        let dk = 2.0 * std::f64::consts::PI / (n2 as f64 * self.w2);
        for row in &self.psi {
            let mut buf: Vec<C64> = row.clone();
            fft.process(&mut buf);
            for (idx, v) in buf.iter().enumerate() {
                let k = if idx <= n2 / 2 {
                    idx as f64 * dk
                } else {
                    (idx as f64 - n2 as f64) * dk
                };
                p2_sq += v.norm_sqr() * k * k;
            }
        }
        // Parseval: Σ|Ψ|² w₂ = Σ|Ψ̃|² w₂/n₂
        p2_sq *= self.w_l * self.w2 / n2 as f64;
        0.5 * (q2_sq + p2_sq - 1.0)
    }

    /// Conditioned state (Ψ − cΨ₀)/√(1−|c|²): overlap, norm, and entropy of
    /// the pump reduction.
    pub fn conditioned(&self, state: &QuadratureState<f64>) -> (C64, f64, f64) {
        let n = self.psi.len();
        let n2 = self.q2.len();
        let norm = std::f64::consts::PI.powf(-0.25);
        let psi0_2: Vec<f64> = self
            .q2
            .iter()
            .map(|&q| norm * (-0.5 * q * q).exp())
            .collect();
        // ⟨G₀|G⟩; the initial wavefunction is real so no conjugation appears
        let mut c = C64::new(0.0, 0.0);
        for (row, a) in self.psi.iter().zip(&state.psi0) {
            for (v, b) in row.iter().zip(&psi0_2) {
                c += (a * b) * v;
            }
        }
        c *= self.w_l * self.w2;
        let norm_sq = 1.0 - c.norm_sqr();
        let scale = norm_sq.sqrt();
        let cond: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n2)
                    .map(|k| (self.psi[i][k] - c * state.psi0[i] * psi0_2[k]) / scale)
                    .collect()
            })
            .collect();
        let rho = DMatrix::from_fn(n, n, |i, k| {
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in cond[i].iter().zip(&cond[k]) {
                acc += a * b.conj();
            }
            acc * self.w2
        });
        (c, norm_sq, eigen_entropy(&rho, self.w_l))
    }
}

/// Von Neumann entropy of a uniformly weighted density kernel.
pub fn eigen_entropy(rho: &DMatrix<C64>, weight: f64) -> f64 {
    let weighted = rho.map(|v| v * weight);
    let eig = SymmetricEigen::try_new(weighted, 1e-15, 50_000).expect("dense eigensolver");
    let mut s = 0.0;
    for &l in eig.eigenvalues.iter() {
        if l > 1e-14 {
            s -= l * l.ln();
        }
    }
    s.max(0.0)
}
