//! Coincidence-detected spectroscopies: linear absorption with joint
//! detection, interferometric pump-probe, interferometric FSRS with a twin
//! photon state, beam-splitter transforms, and the Hong-Ou-Mandel
//! coincidence dip under spectral diffusion.

use crate::axis::{ComplexGrid2D, FrequencyAxis, TimeAxis};
use crate::detection::Amplitude;
use crate::error::{Diagnostic, QsError, Result};
use crate::matter::{SpectralDiffusion, TwoStateJump};
use crate::C64;
use std::f64::consts::PI;
use std::sync::Arc;

/// 50:50 beam splitter with a path-length delay `T`:
/// `E3(t) = (E1(t) - i E2(t + T))/sqrt(2)`,
/// `E4(t) = (E2(t) - i E1(t - T))/sqrt(2)`.
pub fn beam_splitter(e1: Amplitude, e2: Amplitude, delay: f64) -> (Amplitude, Amplitude) {
    let a = e1.clone();
    let b = e2.clone();
    let e3: Amplitude =
        Arc::new(move |t: f64| (a(t) - C64::i() * b(t + delay)) / 2.0_f64.sqrt());
    let e4: Amplitude =
        Arc::new(move |t: f64| (e2(t) - C64::i() * e1(t - delay)) / 2.0_f64.sqrt());
    (e3, e4)
}

/// Coincidence-detected linear absorption: with a narrowband pair
/// (`w1 + w2 = 2 w0`) and a monochromator at `w_m` in the reference arm,
/// the normalized rate returns the sample transfer function reversed about
/// the pump, `S_ILA(w_m) = |H_S(2 w0 - w_m)|^2`.
///
/// `pair_envelope` is `F(Omega)` on the difference frequency; detection
/// points where it carries no weight are flagged rather than divided out.
pub fn ila_signal(
    sample: &dyn Fn(f64) -> C64,
    pair_envelope: &dyn Fn(f64) -> f64,
    pump_center: f64,
    w_monochromator: f64,
) -> (f64, Vec<Diagnostic>) {
    let omega = pump_center - w_monochromator; // difference variable
    let f = pair_envelope(omega);
    let mut diags = Vec::new();
    if f.abs() < 1e-12 {
        diags.push(Diagnostic::new(
            "ila-support",
            format!("monochromator at {w_monochromator} lies outside the pair envelope"),
        ));
        return (0.0, diags);
    }
    let signal = sample(2.0 * pump_center - w_monochromator).norm_sqr();
    (signal, diags)
}

/// Interferometric pump-probe signal for the two-state-jump model.
///
/// `S(w, w_r; t0) = -(2/h) Im[i int_0^inf du int_0^inf dtau
///   e^{i w (u + tau - t0)} F(u, tau) g(tau - t0)]` with the probe-arm
/// time amplitude `g`; resonance widths are set by the matter linewidths,
/// not the probe bandwidth.
pub fn ipp_signal(
    model: &TwoStateJump,
    probe_time_amplitude: &dyn Fn(f64) -> C64,
    reference_weight: C64,
    w: f64,
    t0: f64,
) -> Result<f64> {
    // F(u, tau) separates into exponential terms in u; integrate u
    // analytically and tau numerically.
    let wp = model.omega_plus();
    let wm = model.omega_minus();
    let g = model.gamma;
    let k = model.k;
    let amp = model.mu_ge.norm_sqr() * model.mu_ef.norm_sqr();
    // F(u, tau) = amp e^{-gamma (tau + 2u)} [ e^{-i w+ u}
    //   - c e^{-k tau} (e^{-(k + i w-) u} - e^{-i w+ u}) ], c = 2 i d/(k - 2 i d)
    let c = if model.delta == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(0.0, 2.0 * model.delta) / C64::new(k, -2.0 * model.delta)
    };
    // int_0^inf du e^{i w u} e^{-2 gamma u} e^{-i w_x u - k_x u} = 1/(2g + k_x + i(w_x - w))
    let u_int = |w_x: f64, k_x: f64| -> C64 { 1.0 / C64::new(2.0 * g + k_x, w_x - w) };
    let term_plus = u_int(wp, 0.0);
    let term_min = u_int(wm, k);
    // tau integral: e^{i w tau} e^{-gamma tau} [(1 + c e^{-k tau}) term_plus
    //   - c e^{-k tau} term_min] g(tau - t0)
    let n = 6000;
    let tau_max = t0 + 14.0 / g.max(1e-9);
    let dtau = tau_max / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for q in 0..n {
        let tau = (q as f64 + 0.5) * dtau;
        let probe = probe_time_amplitude(tau - t0);
        if probe.norm() < 1e-16 {
            continue;
        }
        let damp = (-g * tau).exp();
        let jump = (-k * tau).exp();
        let kernel = (term_plus * (1.0 + c * jump)) - term_min * c * jump;
        acc += C64::from_polar(damp, w * (tau - t0)) * kernel * probe;
    }
    acc *= dtau * amp * reference_weight;
    Ok(-2.0 * (C64::i() * acc).im)
}

/// Gaussian classical probe in the time domain (amplitude form).
pub fn gaussian_probe(sigma_w: f64, center: f64) -> impl Fn(f64) -> C64 {
    move |t: f64| C64::from_polar((-0.5 * sigma_w * sigma_w * t * t).exp(), -center * t)
}

/// Twin-state flavor fed into the interferometric Raman signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwinVariant {
    Entangled,
    /// Diagonal (time-averaged) part of the entangled density matrix:
    /// identical single-photon spectra, no temporal coherence.
    CorrelatedSeparable,
    /// Product of two independent Fock wavepackets.
    Uncorrelated,
}

/// Twin photon state of the IFSRS setup.
#[derive(Debug, Clone, Copy)]
pub struct TwinState {
    pub variant: TwinVariant,
    /// Crystal group delays (fs); entanglement time `T = t2 - t1`.
    pub t1: f64,
    pub t2: f64,
    /// Pump sum-frequency width (rad/fs).
    pub sigma0: f64,
    /// Beam center frequency (rad/fs); the pair sum centers on `2 w0`.
    pub omega0: f64,
    /// Classical pump amplitude.
    pub a0: f64,
}

impl TwinState {
    /// Joint spectral amplitude, entire in both arguments:
    /// `Phi = sum_{i != j} sinc(x_ij) e^{i x_ij} A_p(ws + wr)` with
    /// `x_ij = (ws - w0) T_i / 2 + (wr - w0) T_j / 2` and the Lorentzian
    /// pump `A_p(x) = A0 / (x - 2 w0 + i sigma0)`.
    pub fn amplitude(&self, ws: C64, wr: C64) -> C64 {
        match self.variant {
            TwinVariant::Uncorrelated => {
                let ls = 1.0 / (ws - C64::new(self.omega0, -self.sigma0));
                let lr = 1.0 / (wr - C64::new(self.omega0, -self.sigma0));
                self.a0 * ls * lr
            }
            _ => {
                let pump = self.a0 / (ws + wr - C64::new(2.0 * self.omega0, -self.sigma0));
                let half = |x: C64| -> C64 {
                    // sinc(x) e^{i x} = (e^{2 i x} - 1)/(2 i x)
                    let z = 2.0 * C64::i() * x;
                    if z.norm() < 1e-10 {
                        C64::new(1.0, 0.0) + z / 2.0
                    } else {
                        (z.exp() - 1.0) / z
                    }
                };
                let xs = |ti: f64, tj: f64| -> C64 {
                    (ws - self.omega0) * ti / 2.0 + (wr - self.omega0) * tj / 2.0
                };
                pump * (half(xs(self.t1, self.t2)) + half(xs(self.t2, self.t1)))
            }
        }
    }

    /// Detection-coherence product `Phi^*(w_d) Phi(w_shift)`; the
    /// correlated-separable variant has lost the temporal coherence and
    /// contributes `|Phi(w_d)|^2` instead.
    fn coherence(&self, w_detect: C64, w_shift: C64, wr: f64) -> C64 {
        let wr = C64::new(wr, 0.0);
        match self.variant {
            TwinVariant::CorrelatedSeparable => {
                C64::new(self.amplitude(w_detect, wr).norm_sqr(), 0.0)
            }
            _ => self.amplitude(w_detect, wr).conj() * self.amplitude(w_shift, wr),
        }
    }

    /// Single-photon (signal-arm) spectrum marginal `int |Phi|^2 dw_r`.
    pub fn signal_marginal(&self, ws: f64, wr_axis: FrequencyAxis) -> f64 {
        let mut acc = 0.0;
        for i in 0..wr_axis.count() {
            acc += self.amplitude(C64::new(ws, 0.0), C64::new(wr_axis.at(i), 0.0)).norm_sqr();
        }
        acc * wr_axis.step()
    }
}

/// Photon-number-resolved IFSRS branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamanOrder {
    /// Raman loss: no photon in the molecular arm.
    Loss,
    /// One photon in each arm (coincidence).
    Coincidence,
    /// Raman gain: two photons in the molecular arm.
    Gain,
}

impl RamanOrder {
    pub fn from_ns(ns: usize) -> Result<Self> {
        match ns {
            0 => Ok(RamanOrder::Loss),
            1 => Ok(RamanOrder::Coincidence),
            2 => Ok(RamanOrder::Gain),
            _ => Err(QsError::Contract(format!("IFSRS: N_s must be 0, 1 or 2, got {ns}"))),
        }
    }
}

/// Raman window `R_q^(Ns,1)` created by the quantum field.
fn raman_window(
    twin: &TwinState,
    order: RamanOrder,
    w_s: f64,
    w_r: f64,
    w_p: f64,
    gamma: f64,
    omega: C64,
) -> C64 {
    match order {
        RamanOrder::Loss => {
            // int dw/2pi Phi^*(w, wr) Phi(w + i gamma, wr) / (w - wp - Omega)
            let span = 30.0 * twin.sigma0 + 8.0 / (twin.t2 - twin.t1).abs().max(1.0);
            let n = 3000;
            let dw = 2.0 * span / n as f64;
            let mut acc = C64::new(0.0, 0.0);
            for q in 0..n {
                let w = twin.omega0 - span + (q as f64 + 0.5) * dw;
                let coh = twin.coherence(C64::new(w, 0.0), C64::new(w, gamma), w_r);
                acc += coh / (C64::new(w - w_p, 0.0) - omega);
            }
            acc * dw / (2.0 * PI)
        }
        RamanOrder::Coincidence => {
            let shift = C64::new(w_p, -gamma) + omega;
            twin.coherence(C64::new(w_s, 0.0), shift, w_r) / (C64::new(w_s - w_p, 0.0) - omega)
        }
        RamanOrder::Gain => {
            twin.coherence(C64::new(w_s, 0.0), C64::new(w_s, gamma), w_r)
                / (C64::new(w_s - w_p, 0.0) - omega)
        }
    }
}

/// IFSRS signal `S^(Ns,1)(ws, wr; wp, tau)` of the tunneling two-state
/// Raman model: the initially prepared `w_+` line decays at the jump rate
/// while `w_-` builds up, each gated by the quantum window.
#[allow(clippy::too_many_arguments)]
pub fn ifsrs_signal(
    model: &TwoStateJump,
    alpha_ac: f64,
    mu_ag: f64,
    twin: &TwinState,
    order: RamanOrder,
    w_s: f64,
    w_r: f64,
    w_p: f64,
    tau: f64,
) -> f64 {
    let ga = model.gamma;
    let k = model.k;
    let d = model.delta;
    // branch-dependent line assignment and overall sign
    let (nu_first, sign) = match order {
        RamanOrder::Loss => (model.omega_minus(), 1.0),
        RamanOrder::Coincidence => (model.omega_plus(), -1.0),
        RamanOrder::Gain => (model.omega_minus(), -1.0),
    };
    let nu_second = 2.0 * model.omega_center - nu_first; // the partner line
    let pref = sign * alpha_ac * alpha_ac * mu_ag * mu_ag * (-2.0 * ga * tau).exp();
    let cfac = if d == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(0.0, 2.0 * d) / C64::new(k, 2.0 * d) * (-k * tau).exp()
    };
    let r = |gamma: f64, omega: C64| raman_window(twin, order, w_s, w_r, w_p, gamma, omega);
    let total = r(2.0 * ga, C64::new(nu_first, -ga))
        - cfac
            * (r(2.0 * ga + k, C64::new(nu_first, -ga))
                - r(2.0 * ga + k, C64::new(nu_second, -(ga + k))));
    pref * total.im
}

/// Classical FSRS reference: the Raman response gated by the classical
/// probe, `R_c(w, gamma, Omega) = E_s^*(w) E_s(w + i gamma)/(w - wp - Omega)`,
/// including the anti-Stokes mirror.
#[allow(clippy::too_many_arguments)]
pub fn fsrs_classical(
    model: &TwoStateJump,
    alpha_ac: f64,
    mu_ag: f64,
    probe_center: f64,
    probe_sigma: f64,
    w: f64,
    w_p: f64,
    tau: f64,
) -> f64 {
    let ga = model.gamma;
    let k = model.k;
    let d = model.delta;
    let env = |z: C64| -> C64 {
        let x = (z - probe_center) / probe_sigma;
        (-(x * x) / 2.0).exp()
    };
    let rc = |gamma: f64, omega: C64| -> C64 {
        env(C64::new(w, 0.0)).conj() * env(C64::new(w, gamma)) / (C64::new(w - w_p, 0.0) - omega)
    };
    let cfac = if d == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        C64::new(0.0, 2.0 * d) / C64::new(k, 2.0 * d) * (-k * tau).exp()
    };
    let stokes = rc(2.0 * ga, C64::new(model.omega_minus(), -ga))
        - cfac
            * (rc(2.0 * ga + k, C64::new(model.omega_minus(), -ga))
                - rc(2.0 * ga + k, C64::new(model.omega_plus(), -(ga + k))));
    let anti = rc(2.0 * ga, C64::new(-model.omega_plus(), -ga))
        - cfac
            * (rc(2.0 * ga + k, C64::new(-model.omega_plus(), -ga))
                - rc(2.0 * ga + k, C64::new(-model.omega_minus(), -(ga + k))));
    -2.0 * alpha_ac * alpha_ac * mu_ag * mu_ag * (-2.0 * ga * tau).exp() * (stokes - anti).im
}

/// Two-photon Wigner spectrogram of the twin state at fixed reference
/// frequency: `W(w, t) = Phi^*(w, wr) e^{i w t} Phi_t(t)`, separable in
/// modulus, so the (w, t) widths are not Fourier conjugate.
pub fn wigner_two_photon(
    twin: &TwinState,
    w_r: f64,
    waxis: FrequencyAxis,
    taxis: TimeAxis,
) -> Result<ComplexGrid2D> {
    // time profile from the spectral one on a wide internal grid
    let span = waxis.end() - waxis.start();
    let n_int = 4096;
    let dw = 4.0 * span / n_int as f64;
    let w_lo = waxis.start() - 1.5 * span;
    let time_profile = |t: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for q in 0..n_int {
            let w = w_lo + (q as f64 + 0.5) * dw;
            acc += twin.amplitude(C64::new(w, 0.0), C64::new(w_r, 0.0))
                * C64::from_polar(1.0, -w * t);
        }
        acc * dw / (2.0 * PI)
    };
    let tvals: Vec<C64> = taxis.iter().map(time_profile).collect();
    ComplexGrid2D::from_fn(waxis, taxis, |w, t| {
        let it = taxis.nearest_index(t);
        twin.amplitude(C64::new(w, 0.0), C64::new(w_r, 0.0)).conj()
            * C64::from_polar(1.0, w * t)
            * tvals[it]
    })
}

/// Second-moment width of a sampled 1D modulus profile.
fn profile_std(xs: &[f64], ys: &[f64]) -> f64 {
    let wsum: f64 = ys.iter().sum();
    let mean: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum::<f64>() / wsum;
    (xs.iter().zip(ys).map(|(x, y)| (x - mean).powi(2) * y).sum::<f64>() / wsum).sqrt()
}

/// Fourier-uncertainty witness of the coincidence-gated pair: the width of
/// the conditional spectrum (frequency marginal of the two-photon Wigner
/// spectrogram at the gated reference frequency) times the width of the
/// relative-arrival-time distribution.
///
/// These two widths are what the gated coincidence measurement resolves;
/// they are not Fourier conjugate for an entangled pair, so their product
/// can fall far below the transform limit that bounds any classical probe
/// (for which the same estimator reads the pulse spectrum and duration).
pub fn twin_uncertainty_witness(
    twin: &TwinState,
    w_r: f64,
    waxis: FrequencyAxis,
    tau_axis: TimeAxis,
) -> (f64, f64) {
    // conditional spectrum |Phi(w, wr)|
    let wx: Vec<f64> = waxis.values();
    let wy: Vec<f64> = wx
        .iter()
        .map(|&w| twin.amplitude(C64::new(w, 0.0), C64::new(w_r, 0.0)).norm())
        .collect();
    let dw = profile_std(&wx, &wy);
    // relative-arrival profile: Fourier transform of the energy-conserving
    // antidiagonal Phi(w0 + nu, w0 - nu)
    let n_int = 8192;
    let t_ent = (twin.t2 - twin.t1).abs().max(1.0);
    let span = (3.0 * (waxis.end() - waxis.start())).max(300.0 / t_ent);
    let dnu = 2.0 * span / n_int as f64;
    let tx: Vec<f64> = tau_axis.values();
    let ty: Vec<f64> = tx
        .iter()
        .map(|&tau| {
            let mut acc = C64::new(0.0, 0.0);
            for q in 0..n_int {
                let nu = -span + (q as f64 + 0.5) * dnu;
                acc += twin
                    .amplitude(C64::new(twin.omega0 + nu, 0.0), C64::new(twin.omega0 - nu, 0.0))
                    * C64::from_polar(1.0, -nu * tau);
            }
            (acc * dnu).norm()
        })
        .collect();
    let dt = profile_std(&tx, &ty);
    (dw, dt)
}

/// Second-moment widths `(std_w, std_t)` of |W| treated as a density; a
/// transform-limited Gaussian gives `std_w * std_t = 1` exactly.
pub fn second_moment_widths(grid: &ComplexGrid2D) -> (f64, f64) {
    let (n1, n2) = grid.values.dim();
    let mut wsum = 0.0;
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..n1 {
        for j in 0..n2 {
            let w = grid.values[(i, j)].norm();
            wsum += w;
            m1 += w * grid.axis1.at(i);
            m2 += w * grid.axis2.at(j);
        }
    }
    m1 /= wsum;
    m2 /= wsum;
    let (mut v1, mut v2) = (0.0, 0.0);
    for i in 0..n1 {
        for j in 0..n2 {
            let w = grid.values[(i, j)].norm();
            v1 += w * (grid.axis1.at(i) - m1).powi(2);
            v2 += w * (grid.axis2.at(j) - m2).powi(2);
        }
    }
    ((v1 / wsum).sqrt(), (v2 / wsum).sqrt())
}

/// One detector's gate in the coincidence setup (rates).
#[derive(Debug, Clone, Copy)]
pub struct HomGate {
    /// Frequency-gate bandwidth (rad/fs).
    pub sigma_w: f64,
    /// Time-gate bandwidth (rad/fs-compatible rate).
    pub sigma_t: f64,
    /// Detection time (fs).
    pub t_center: f64,
}

impl HomGate {
    /// Effective gated spectral width.
    fn effective_sigma_w(&self) -> f64 {
        (self.sigma_w * self.sigma_w + self.sigma_t * self.sigma_t).sqrt()
    }
}

/// Hong-Ou-Mandel coincidence setup: two remote emitters with spectral
/// diffusion, one beam splitter, two gated detectors.
#[derive(Debug, Clone, Copy)]
pub struct HomSetup {
    pub mol_a: SpectralDiffusion,
    pub mol_b: SpectralDiffusion,
    pub gate_r: HomGate,
    pub gate_s: HomGate,
    /// The classical reference bounds the interference term at one half.
    pub classical_reference: bool,
}

/// Normalized photon-coincidence rate at beam-splitter delay `T`:
/// `R = 1 - V(T) cos U e^{-Gamma(t_s - t_r)}` symmetrized over
/// `(a <-> b, T <-> -T)`; fully distinguishable photons give 1, identical
/// molecules with no spectral diffusion dip to 0 at `T = 0`.
pub fn hom_pcc(setup: &HomSetup, delay: f64) -> (f64, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    for (name, m) in [("a", &setup.mol_a), ("b", &setup.mol_b)] {
        if m.relaxation > 0.0 && !m.high_temperature_ok() {
            diags.push(Diagnostic::new(
                "hbl-flags",
                format!("molecule {name}: high-temperature limit marginal"),
            ));
        }
    }
    for (name, g) in [("r", &setup.gate_r), ("s", &setup.gate_s)] {
        let fast = setup.mol_a.relaxation.max(setup.mol_b.relaxation);
        if fast > 0.0 && g.sigma_w < fast {
            diags.push(Diagnostic::new(
                "hbl-flags",
                format!("gate {name} narrower than the fluctuation rate"),
            ));
        }
    }

    // gated instantaneous emission line of molecule m at detector g
    let line = |m: &SpectralDiffusion, g: &HomGate| -> (f64, f64) {
        let center = m.emission_center(g.t_center);
        let width2 = if m.relaxation > 0.0 && m.delta > 0.0 {
            m.emission_width(g.t_center).powi(2)
        } else {
            0.0
        };
        (center, (width2 + g.effective_sigma_w().powi(2)).sqrt())
    };
    // amplitude overlap of two Gaussian wavepackets at one detector
    let overlap = |g: &HomGate| -> f64 {
        let (ca, sa) = line(&setup.mol_a, g);
        let (cb, sb) = line(&setup.mol_b, g);
        let mismatch = (2.0 * sa * sb / (sa * sa + sb * sb)).sqrt();
        mismatch * (-(ca - cb).powi(2) / (4.0 * (sa * sa + sb * sb) / 2.0)).exp()
    };
    // static-offset which-path factor per detector (time-gate limited)
    let wab = setup.mol_a.omega0 - setup.mol_b.omega0;
    let static_r = (-(wab * wab) / (4.0 * setup.gate_r.sigma_t.powi(2))).exp();
    let static_s = (-(wab * wab) / (4.0 * setup.gate_s.sigma_t.powi(2))).exp();
    // temporal overlap at the beam-splitter delay
    let (_, vr) = line(&setup.mol_a, &setup.gate_r);
    let (_, vs) = line(&setup.mol_a, &setup.gate_s);
    let (_, vrb) = line(&setup.mol_b, &setup.gate_r);
    let (_, vsb) = line(&setup.mol_b, &setup.gate_s);
    let sigma_pair2 = 0.25 * (vr * vr + vs * vs + vrb * vrb + vsb * vsb) / 2.0;
    let kappa_t = (-sigma_pair2 * delay * delay / 2.0).exp();

    // interference phase and the spectral-diffusion decoherence between
    // the two detection times
    let dm_r = line(&setup.mol_a, &setup.gate_r).0 - line(&setup.mol_b, &setup.gate_r).0;
    let dm_s = line(&setup.mol_a, &setup.gate_s).0 - line(&setup.mol_b, &setup.gate_s).0;
    let u_phase = 0.5 * (dm_r + dm_s) * delay;
    let dt_det = (setup.gate_s.t_center - setup.gate_r.t_center).abs();
    let mut big_gamma = 0.0;
    for m in [&setup.mol_a, &setup.mol_b] {
        if m.relaxation > 0.0 && m.delta > 0.0 {
            let f = (-m.relaxation * dt_det).exp() + m.relaxation * dt_det - 1.0;
            big_gamma += m.delta * m.delta / (m.relaxation * m.relaxation) * f;
        }
    }

    let visibility = overlap(&setup.gate_r) * overlap(&setup.gate_s) * static_r * static_s * kappa_t;
    let bound = if setup.classical_reference { 0.5 } else { 1.0 };
    let interf = bound * visibility * u_phase.cos() * (-big_gamma).exp();
    // (a <-> b, T <-> -T) symmetrization: the model is already symmetric
    // under the pair swap, so the two branches average to the same value
    let rate = 1.0 - interf;
    (rate.max(0.0), diags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mhz_to_radfs, wavenumber_to_radfs as w2r};
    use approx::assert_relative_eq;

    #[test]
    fn beam_splitter_unitarity_and_balance() {
        let e1: Amplitude = Arc::new(|t: f64| C64::from_polar((-0.002 * t * t).exp(), -1.1 * t));
        let e2: Amplitude = Arc::new(|t: f64| {
            C64::from_polar(0.7 * (-0.001 * (t - 10.0) * (t - 10.0)).exp(), -1.3 * t + 0.4)
        });
        let (e3, e4) = beam_splitter(e1.clone(), e2.clone(), 7.0);
        let dt = 0.25;
        let energy = |f: &Amplitude| -> f64 {
            (0..4000).map(|i| f(-500.0 + i as f64 * dt).norm_sqr() * dt).sum()
        };
        let lhs = energy(&e3) + energy(&e4);
        let rhs = energy(&e1) + energy(&e2);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-9);

        // dark second port: both outputs carry half the input
        let zero: Amplitude = Arc::new(|_| C64::new(0.0, 0.0));
        let (o3, o4) = beam_splitter(e1.clone(), zero, 0.0);
        assert_relative_eq!(energy(&o3), 0.5 * energy(&e1), max_relative = 1e-9);
        assert_relative_eq!(energy(&o4), 0.5 * energy(&e1), max_relative = 1e-9);

        // applying the T = 0 transform twice swaps the fields up to -i
        let (p3, p4) = beam_splitter(e1.clone(), e2.clone(), 0.0);
        let (q3, q4) = beam_splitter(p3, p4, 0.0);
        for &t in &[-30.0, 0.0, 12.5] {
            assert!((q3(t) + C64::i() * e2(t)).norm() < 1e-12);
            assert!((q4(t) + C64::i() * e1(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn ila_flat_sample_and_mirrored_dip() {
        let w0 = w2r(15_000.0);
        let env = |omega: f64| (-(omega * omega) / (2.0 * w2r(400.0).powi(2))).exp();
        // flat sample: unit response wherever the envelope has support
        let flat = |_: f64| C64::new(1.0, 0.0);
        let (s, d) = ila_signal(&flat, &env, w0, w0 + w2r(100.0));
        assert_relative_eq!(s, 1.0, epsilon = 1e-12);
        assert!(d.is_empty());
        // absorption dip at w_a appears mirrored at w_m = 2 w0 - w_a
        let w_a = w0 + w2r(150.0);
        let dip = move |w: f64| -> C64 {
            let lor = 0.8 / C64::new(w - w_a, w2r(30.0));
            C64::new(1.0, 0.0) - lor * C64::new(0.0, w2r(30.0))
        };
        let at_mirror = ila_signal(&dip, &env, w0, 2.0 * w0 - w_a).0;
        let away = ila_signal(&dip, &env, w0, 2.0 * w0 - w_a + w2r(200.0)).0;
        assert!(at_mirror < 0.2 * away, "no mirrored dip: {at_mirror} vs {away}");
        // outside the envelope: flagged
        let (_, diags) = ila_signal(&flat, &env, w0, w0 + w2r(5_000.0));
        assert_eq!(diags[0].code, "ila-support");
    }

    #[test]
    fn ipp_resonances_matter_limited_and_degenerate_limit() {
        let model = TwoStateJump::from_wavenumbers(11_000.0, 200.0, 40.0, 50.0);
        let probe = gaussian_probe(w2r(1_000.0), model.omega_center);
        let t0 = 60.0;
        // spectrum across both resonances (dips in the transmitted rate)
        let scan: Vec<f64> = (0..240)
            .map(|i| {
                let w = w2r(10_400.0 + i as f64 * 5.0);
                -ipp_signal(&model, &probe, C64::new(1.0, 0.0), w, t0).unwrap()
            })
            .collect();
        let peaks = crate::numerics::local_maxima(&scan, 0.15);
        assert!(peaks.len() >= 2, "expected two spin peaks, got {peaks:?}");
        // width near w_-: matter-limited (gamma), far below the probe width.
        // The doublet partner sits on the right, so fit the left half-width
        // above the flattened baseline.
        let xs: Vec<f64> = (0..120).map(|i| w2r(10_400.0 + i as f64 * 5.0)).collect();
        let base = scan[..120].iter().cloned().fold(f64::INFINITY, f64::min);
        let flat: Vec<f64> = scan[..120].iter().map(|v| v - base).collect();
        let imax = flat.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap().0;
        let half = flat[imax] / 2.0;
        let mut hw = f64::NAN;
        for i in (1..=imax).rev() {
            if flat[i] >= half && flat[i - 1] < half {
                let f = (flat[i] - half) / (flat[i] - flat[i - 1]);
                hw = xs[imax] - (xs[i] - f * (xs[i] - xs[i - 1]));
                break;
            }
        }
        assert!(hw.is_finite(), "left half-crossing not found");
        assert!(
            hw < 3.0 * model.gamma,
            "IPP width {hw} not matter-limited (gamma = {})",
            model.gamma
        );

        // delta = 0: single peak at the center frequency
        let degen = TwoStateJump::from_wavenumbers(11_000.0, 0.0, 120.0, 100.0);
        let scan0: Vec<f64> = (0..240)
            .map(|i| {
                let w = w2r(10_400.0 + i as f64 * 5.0);
                -ipp_signal(&degen, &probe, C64::new(1.0, 0.0), w, t0).unwrap()
            })
            .collect();
        assert_eq!(crate::numerics::local_maxima(&scan0, 0.15).len(), 1);
    }

    #[test]
    fn ipp_upper_state_decays_lower_builds_up() {
        let model = TwoStateJump::from_wavenumbers(11_000.0, 200.0, 40.0, 50.0);
        let probe = gaussian_probe(w2r(1_000.0), model.omega_center);
        let at =
            |w: f64, t0: f64| -ipp_signal(&model, &probe, C64::new(1.0, 0.0), w, t0).unwrap();
        let early_up = at(model.omega_minus(), 5.0);
        let late_up = at(model.omega_minus(), 300.0);
        assert!(late_up < 0.6 * early_up, "w_- resonance should decay: {early_up} -> {late_up}");
        let early_dn = at(model.omega_plus(), 5.0);
        let late_dn = at(model.omega_plus(), 60.0);
        assert!(late_dn > early_dn, "w_+ resonance should build up: {early_dn} -> {late_dn}");
    }

    fn twin(variant: TwinVariant) -> TwinState {
        TwinState {
            variant,
            t1: 30.0,
            t2: 90.0,
            sigma0: w2r(50.0),
            omega0: w2r(12_000.0),
            a0: 1.0,
        }
    }

    #[test]
    fn ifsrs_orders_scale_linearly_in_pump_intensity() {
        let model = TwoStateJump::from_wavenumbers(1_000.0, 200.0, 30.0, 30.0);
        let mut t1 = twin(TwinVariant::Entangled);
        let mut t2 = twin(TwinVariant::Entangled);
        t1.a0 = 1.0;
        t2.a0 = 2.5;
        let wp = w2r(12_700.0);
        let ws = wp + model.omega_minus();
        for order in [RamanOrder::Loss, RamanOrder::Coincidence, RamanOrder::Gain] {
            let s1 = ifsrs_signal(&model, 1.0, 1.0, &t1, order, ws, t1.omega0, wp, 8.0);
            let s2 = ifsrs_signal(&model, 1.0, 1.0, &t2, order, ws, t2.omega0, wp, 8.0);
            assert_relative_eq!(s2 / s1, 2.5 * 2.5, max_relative = 1e-9);
        }
        assert!(RamanOrder::from_ns(3).is_err());
    }

    #[test]
    fn twin_variants_share_marginals_but_not_joint_maps() {
        let ent = twin(TwinVariant::Entangled);
        let sep = twin(TwinVariant::CorrelatedSeparable);
        let wr_axis = FrequencyAxis::centered(ent.omega0, w2r(700.0), 301).unwrap();
        for k in 0..7 {
            let ws = ent.omega0 + w2r(-300.0 + 100.0 * k as f64);
            let a = ent.signal_marginal(ws, wr_axis);
            let b = sep.signal_marginal(ws, wr_axis);
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
        // joint detection maps differ measurably (map distance)
        let model = TwoStateJump::from_wavenumbers(1_000.0, 200.0, 30.0, 30.0);
        let wp = w2r(12_700.0);
        let mut dist = 0.0;
        let mut norm = 0.0;
        for i in 0..40 {
            let ws = wp + model.omega_minus() + w2r(-100.0 + 5.0 * i as f64);
            let a = ifsrs_signal(&model, 1.0, 1.0, &ent, RamanOrder::Coincidence, ws, ent.omega0, wp, 8.0);
            let b = ifsrs_signal(&model, 1.0, 1.0, &sep, RamanOrder::Coincidence, ws, sep.omega0, wp, 8.0);
            dist += (a - b) * (a - b);
            norm += a * a;
        }
        assert!(dist > 1e-4 * norm, "joint maps indistinguishable: {dist} vs {norm}");
    }

    #[test]
    fn ifsrs_resolves_fast_tunneling_where_classical_merges() {
        // fast tunneling: k ~ delta, broad dephasing
        let model = TwoStateJump::from_wavenumbers(1_000.0, 120.0, 100.0, 90.0);
        let ent = twin(TwinVariant::Entangled);
        let wp = w2r(12_700.0);
        let probe_sigma = w2r(500.0);
        // classical spectrum across the Stokes doublet
        let xs: Vec<f64> = (0..260).map(|i| wp + w2r(700.0 + 2.5 * i as f64)).collect();
        let classical: Vec<f64> = xs
            .iter()
            .map(|&w| fsrs_classical(&model, 1.0, 1.0, wp, probe_sigma, w, wp, 6.0).abs())
            .collect();
        let n_classical = crate::numerics::local_maxima(&classical, 0.35).len();
        assert!(n_classical <= 1, "classical doublet should merge, found {n_classical} peaks");

        // IFSRS: reference-gate settings pick out the two lines separately
        let mut positions: Vec<f64> = Vec::new();
        for line in [model.omega_minus(), model.omega_plus()] {
            let wr = 2.0 * ent.omega0 - (wp + line);
            let spec: Vec<f64> = xs
                .iter()
                .map(|&w| {
                    ifsrs_signal(&model, 1.0, 1.0, &ent, RamanOrder::Coincidence, w, wr, wp, 6.0).abs()
                })
                .collect();
            let peaks = crate::numerics::local_maxima(&spec, 0.5);
            if let Some(&p) = peaks.first() {
                let x = xs[p] - wp;
                if !positions.iter().any(|q| (q - x).abs() < w2r(40.0)) {
                    positions.push(x);
                }
            }
        }
        assert_eq!(positions.len(), 2, "IFSRS should resolve both lines: {positions:?}");
    }

    #[test]
    fn wigner_witness_entangled_beats_fourier_classical_does_not() {
        // entangled twin: narrow pump sum, short entanglement time
        let ent = TwinState {
            variant: TwinVariant::Entangled,
            t1: 30.0,
            t2: 90.0,
            sigma0: w2r(20.0),
            omega0: w2r(12_000.0),
            a0: 1.0,
        };
        let waxis = FrequencyAxis::centered(ent.omega0, 6.0 * ent.sigma0, 241).unwrap();
        let taxis = TimeAxis::centered(0.0, 400.0, 241).unwrap();
        let (dw, dt) = twin_uncertainty_witness(&ent, ent.omega0, waxis, taxis);
        assert!(dw * dt < 0.5, "entangled witness {} ({dw}, {dt})", dw * dt);

        // uncorrelated probe, same estimator and windows: conjugate pair
        let cls = TwinState { variant: TwinVariant::Uncorrelated, ..ent };
        let (dwc, dtc) = twin_uncertainty_witness(&cls, cls.omega0, waxis, taxis);
        assert!(dwc * dtc >= 1.0, "classical witness {} ({dwc}, {dtc})", dwc * dtc);
    }

    fn hom_molecule(omega0_mhz_off: f64, lambda: f64, relax_mhz: f64, delta_mhz: f64) -> SpectralDiffusion {
        SpectralDiffusion {
            omega0: w2r(15_000.0) + mhz_to_radfs(omega0_mhz_off),
            lambda: mhz_to_radfs(lambda),
            relaxation: mhz_to_radfs(relax_mhz),
            delta: mhz_to_radfs(delta_mhz),
        }
    }

    #[test]
    fn hom_dip_limits() {
        let mol = hom_molecule(0.0, 0.0, 0.0, 0.0);
        let gate = HomGate { sigma_w: mhz_to_radfs(120.0), sigma_t: mhz_to_radfs(100.0), t_center: 0.0 };
        let setup = HomSetup { mol_a: mol, mol_b: mol, gate_r: gate, gate_s: gate, classical_reference: false };
        // identical molecules, no SD, T = 0: complete dip
        let (r0, _) = hom_pcc(&setup, 0.0);
        assert!(r0 < 1e-6, "dip {r0}");
        // large delay: uncorrelated, rate 1
        let (rinf, _) = hom_pcc(&setup, 1e12);
        assert!((rinf - 1.0).abs() < 1e-3);
        // classical reference never below one half
        let cl = HomSetup { classical_reference: true, ..setup };
        for k in 0..50 {
            let (r, _) = hom_pcc(&cl, k as f64 * 3e9);
            assert!(r >= 0.5 - 1e-6, "classical bound violated: {r}");
        }
    }

    #[test]
    fn hom_dip_deepens_with_broader_frequency_gates() {
        // distinct SD timescales make the photons distinguishable; broad
        // gates erase the which-path spectrum
        let mol_a = hom_molecule(0.0, 60.0, 15.0, 180.0);
        let mol_b = hom_molecule(1.0, 60.0, 1.0, 180.0);
        let t_det = 2.0e7;
        let mk = |sw_mhz: f64| HomSetup {
            mol_a,
            mol_b,
            gate_r: HomGate { sigma_w: mhz_to_radfs(sw_mhz), sigma_t: mhz_to_radfs(100.0), t_center: t_det },
            gate_s: HomGate { sigma_w: mhz_to_radfs(sw_mhz), sigma_t: mhz_to_radfs(100.0), t_center: t_det },
            classical_reference: false,
        };
        let dips: Vec<f64> = [20.0, 120.0, 200.0].iter().map(|&sw| hom_pcc(&mk(sw), 0.0).0).collect();
        assert!(dips[0] > dips[1] && dips[1] > dips[2], "dip not monotone: {dips:?}");
    }
}

#[cfg(test)]
mod raman_window_tests {
    use super::*;
    use crate::units::wavenumber_to_radfs as w2r;

    #[test]
    fn loss_window_quadrature_matches_contour_oracle() {
        // uncorrelated (rational) twin: the loss-window integral closes in
        // the upper half plane around the single conjugate-amplitude pole
        let twin = TwinState {
            variant: TwinVariant::Uncorrelated,
            t1: 30.0,
            t2: 90.0,
            sigma0: w2r(60.0),
            omega0: w2r(12_000.0),
            a0: 1.3,
        };
        let model = TwoStateJump::from_wavenumbers(1_000.0, 120.0, 40.0, 45.0);
        let wp = w2r(12_700.0);
        let wr = twin.omega0 + w2r(35.0);
        for (gamma, omega) in [
            (2.0 * model.gamma, C64::new(model.omega_minus(), -model.gamma)),
            (2.0 * model.gamma + model.k, C64::new(model.omega_plus(), -(model.gamma + model.k))),
        ] {
            // direct numerical loop integral (the implementation path)
            let numeric = {
                let mut acc = C64::new(0.0, 0.0);
                let span = 30.0 * twin.sigma0;
                let n = 60_000;
                let dw = 2.0 * span / n as f64;
                for q in 0..n {
                    let w = twin.omega0 - span + (q as f64 + 0.5) * dw;
                    let phi_conj = twin.amplitude(C64::new(w, 0.0), C64::new(wr, 0.0)).conj();
                    let phi_shift = twin.amplitude(C64::new(w, gamma), C64::new(wr, 0.0));
                    acc += phi_conj * phi_shift / (C64::new(w - wp, 0.0) - omega);
                }
                acc * dw / (2.0 * std::f64::consts::PI)
            };
            // contour oracle: residue at w = w0 + i sigma0
            let l_r = 1.0 / C64::new(wr - twin.omega0, twin.sigma0);
            let closed = C64::i()
                * twin.a0
                * twin.a0
                * l_r.norm_sqr()
                * (1.0 / C64::new(0.0, 2.0 * twin.sigma0 + gamma))
                * (1.0 / (C64::new(twin.omega0 - wp, twin.sigma0) - omega));
            let rel = (numeric - closed).norm() / closed.norm();
            assert!(rel < 1e-3, "window mismatch {rel:.2e} (num {numeric}, oracle {closed})");
        }
    }
}
