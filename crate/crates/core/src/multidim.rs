//! Two-dimensional fluorescence-detected signals under the loop (LOP) and
//! ladder (LAP) delay-scanning protocols, and double-quantum-coherence
//! (DQC) signals, for classical and entangled fields.

use crate::axis::FrequencyAxis;
use crate::error::{QsError, Result};
use crate::matter::{Level, LevelSystem};
use crate::C64;
use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Train of four phase-controlled pulses (impulsive scalar envelopes).
#[derive(Debug, Clone, Copy)]
pub struct PulseTrain {
    /// Chronological center times T1..T4 (fs).
    pub centers: [f64; 4],
    /// Pulse phases phi1..phi4 (rad).
    pub phases: [f64; 4],
    /// Scalar envelope amplitudes.
    pub envelopes: [C64; 4],
}

impl PulseTrain {
    pub fn impulsive(centers: [f64; 4]) -> Self {
        Self { centers, phases: [0.0; 4], envelopes: [C64::new(1.0, 0.0); 4] }
    }

    /// Envelope product with the phase-cycling signature
    /// `phi1 + phi2 - phi3 - phi4` (pulses 1, 2 absorb, 3, 4 de-excite).
    pub fn selected_amplitude(&self) -> C64 {
        let sig = self.phases[0] + self.phases[1] - self.phases[2] - self.phases[3];
        self.envelopes[0]
            * self.envelopes[1]
            * self.envelopes[2].conj()
            * self.envelopes[3].conj()
            * C64::from_polar(1.0, sig)
    }
}

/// Delay-scanning protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayProtocol {
    /// Loop delays `(s1, s2, s3)`; `s1, s3 >= 0`, `s2` free sign.
    Lop { s1: f64, s2: f64, s3: f64 },
    /// Ladder delays `(t1, t2, t3)`, all nonnegative.
    Lap { t1: f64, t2: f64, t3: f64 },
}

impl DelayProtocol {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DelayProtocol::Lop { s1, s2: _, s3 } => {
                if s1 < 0.0 || s3 < 0.0 {
                    return Err(QsError::Contract("LOP: s1 and s3 must be >= 0".into()));
                }
            }
            DelayProtocol::Lap { t1, t2, t3 } => {
                if t1 < 0.0 || t2 < 0.0 || t3 < 0.0 {
                    return Err(QsError::Contract("LAP: all delays must be >= 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Phase-cycling branch (rephasing / nonrephasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    KII,
    KIII,
}

#[inline]
fn gt(system: &LevelSystem, a: Level, b: Level, t: f64) -> C64 {
    system.greens_fn(a, b).expect("registered pair").time(t)
}

#[inline]
fn gf(system: &LevelSystem, a: Level, b: Level, w: C64) -> C64 {
    let g = system.greens_fn(a, b).expect("registered pair");
    1.0 / (w - C64::new(g.omega, -g.gamma))
}

fn mu4(system: &LevelSystem, e: usize, ep: usize, f: usize) -> C64 {
    // mu_ge' mu_e'f mu_fe^* mu_eg^*
    system.mu_ge[ep] * system.mu_ef[(ep, f)] * (system.mu_ef[(e, f)] * system.mu_ge[e]).conj()
}

/// Ladder-protocol classical signal (complex kernel; displays take Re/Im):
/// `k_II: sum G_ef(t3) G_ee'(t2) G_eg(t1)`,
/// `k_III: sum G_ef(t3) G_ee'(t2) G_ge'(t1)`.
pub fn lap_signal_classical(
    system: &LevelSystem,
    train: &PulseTrain,
    branch: Branch,
    t1: f64,
    t2: f64,
    t3: f64,
) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                let chain = match branch {
                    Branch::KII => {
                        gt(system, Level::Single(e), Level::Double(f), t3)
                            * gt(system, Level::Single(e), Level::Single(ep), t2)
                            * gt(system, Level::Single(e), Level::Ground, t1)
                    }
                    Branch::KIII => {
                        gt(system, Level::Single(e), Level::Double(f), t3)
                            * gt(system, Level::Single(e), Level::Single(ep), t2)
                            * gt(system, Level::Ground, Level::Single(ep), t1)
                    }
                };
                s += mu4(system, e, ep, f) * chain;
            }
        }
    }
    train.selected_amplitude() * s
}

/// Loop-protocol classical signal:
/// `k_II: sum G_ef(s2) G_ee'(s3) G_eg(s1 - s2 - s3)`,
/// `k_III: sum G_ef(s2) G_ee'(s1 - s2) G_ge'(s2 + s3 - s1)`.
pub fn lop_signal_classical(
    system: &LevelSystem,
    train: &PulseTrain,
    branch: Branch,
    s1: f64,
    s2: f64,
    s3: f64,
) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                let chain = match branch {
                    Branch::KII => {
                        gt(system, Level::Single(e), Level::Double(f), s2)
                            * gt(system, Level::Single(e), Level::Single(ep), s3)
                            * gt(system, Level::Single(e), Level::Ground, s1 - s2 - s3)
                    }
                    Branch::KIII => {
                        gt(system, Level::Single(e), Level::Double(f), s2)
                            * gt(system, Level::Single(e), Level::Single(ep), s1 - s2)
                            * gt(system, Level::Ground, Level::Single(ep), s2 + s3 - s1)
                    }
                };
                s += mu4(system, e, ep, f) * chain;
            }
        }
    }
    train.selected_amplitude() * s
}

/// Exact Fourier transform of the classical LAP time signal over `(t1, t3)`
/// at `t2 = 0` (kernels `e^{i W1 t1 + i W3 t3}`).
pub fn lap_frequency_map_classical(
    system: &LevelSystem,
    train: &PulseTrain,
    branch: Branch,
    w1: f64,
    w3: f64,
) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    let z1 = C64::new(w1, 0.0);
    let z3 = C64::new(w3, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                // int_0^inf e^{iWt} G(t) dt = G_tilde(W); G(0) = -i
                let chain = match branch {
                    Branch::KII => {
                        gf(system, Level::Single(e), Level::Double(f), z3)
                            * (-C64::i())
                            * gf(system, Level::Single(e), Level::Ground, z1)
                    }
                    Branch::KIII => {
                        gf(system, Level::Single(e), Level::Double(f), z3)
                            * (-C64::i())
                            * gf(system, Level::Ground, Level::Single(ep), z1)
                    }
                };
                s += mu4(system, e, ep, f) * chain;
            }
        }
    }
    train.selected_amplitude() * s
}

/// Exact Fourier transform of the classical LOP time signal over `(s1, s3)`
/// at `s2 = 0`: cross-peaks on `W1 + W3 = w_ee'`.
pub fn lop_frequency_map_classical(
    system: &LevelSystem,
    train: &PulseTrain,
    branch: Branch,
    w1: f64,
    w3: f64,
) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                // s2 = 0: G_ef(0) = -i; the coupled theta in G_eg(s1 - s3)
                // mixes the axes into the antidiagonal resonance
                let chain = match branch {
                    Branch::KII => {
                        (-C64::i())
                            * gf(system, Level::Single(e), Level::Single(ep), C64::new(w1 + w3, 0.0))
                            * gf(system, Level::Single(e), Level::Ground, C64::new(w1, 0.0))
                    }
                    Branch::KIII => {
                        (-C64::i())
                            * gf(system, Level::Single(e), Level::Single(ep), C64::new(w1 + w3, 0.0))
                            * gf(system, Level::Ground, Level::Single(ep), C64::new(w3, 0.0))
                    }
                };
                s += mu4(system, e, ep, f) * chain;
            }
        }
    }
    train.selected_amplitude() * s
}

/// cw-pumped entangled pair feeding the LOP/LAP protocols.
#[derive(Debug, Clone, Copy)]
pub struct CwPair {
    /// Pump frequency (rad/fs); pairs satisfy `wa + wb = wp`.
    pub omega_p: f64,
    /// Beam centers (rad/fs).
    pub omega1: f64,
    pub omega2: f64,
    /// Entanglement time (fs).
    pub t_ent: f64,
    /// Pair-generation amplitude (proportional to the pump amplitude).
    pub amplitude: f64,
}

impl CwPair {
    /// Spectral profile `psi(w) = s(w) + s(wp - w)` with
    /// `s(w) = (e^{i (w1 - w) T} - 1) / (i (w1 - w) T)`, valid for complex
    /// arguments.
    pub fn spectral(&self, w: C64) -> C64 {
        let one_sided = |x: C64| -> C64 {
            let z = C64::i() * x * self.t_ent;
            if z.norm() < 1e-8 {
                C64::new(1.0, 0.0) + z / 2.0
            } else {
                (z.exp() - 1.0) / z
            }
        };
        self.amplitude
            * (one_sided(C64::new(self.omega1, 0.0) - w)
                + one_sided(C64::new(self.omega1, 0.0) - (self.omega_p - w)))
    }

    /// Relative-time profile `phi(x)`: the pair wavefunction is
    /// `psi(ta, tb) = e^{-i wp (ta + tb)/2} phi(tb - ta)` with rect support
    /// `|x| <= T`.
    pub fn relative(&self, x: f64) -> C64 {
        if x.abs() > self.t_ent {
            return C64::new(0.0, 0.0);
        }
        let dw = (self.omega2 - self.omega1) / 2.0;
        let v = if x >= 0.0 {
            C64::from_polar(1.0, -dw * x)
        } else {
            C64::from_polar(1.0, dw * x)
        };
        self.amplitude / self.t_ent * v
    }
}

/// Matter response `R_j(wa, wb, wd)` of the loop protocol.
fn lop_response(system: &LevelSystem, branch: Branch, wa: C64, wb: C64, wd: C64) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                let chain = match branch {
                    Branch::KII => {
                        gf(system, Level::Single(e), Level::Double(f), -wb)
                            * gf(system, Level::Single(e), Level::Single(ep), wa - wd)
                            * gf(system, Level::Single(e), Level::Ground, wa)
                    }
                    Branch::KIII => {
                        gf(system, Level::Single(e), Level::Double(f), -wb)
                            * gf(system, Level::Single(e), Level::Single(ep), wa - wd)
                            * gf(system, Level::Ground, Level::Single(ep), -wd)
                    }
                };
                s += mu4(system, e, ep, f) * chain;
            }
        }
    }
    s
}

/// Frequency-domain entangled LOP map `S(W1, s2 = 0, W3)` on the given
/// axes (complex kernel; figures plot |S| or Im S).
///
/// The cw pair pins `wb = wp - wa`; the display transforms become
/// separable kernels `i/(W1 - wa + i eta)` and `i/(W3 + wd + i eta)` and
/// the double frequency integral reduces to two matrix products.
pub fn lop_entangled_map(
    system: &LevelSystem,
    pair: &CwPair,
    branch: Branch,
    axis_w1: FrequencyAxis,
    axis_w3: FrequencyAxis,
    integration: FrequencyAxis,
    eta: Option<f64>,
) -> Result<Array2<C64>> {
    let n = integration.count();
    let eta = eta.unwrap_or(2.0 * integration.step());
    let dw = integration.step();
    // F(wa, wd) = R_j(wa, wp - wa, wd) psi^*(wd) psi(wa)
    let f_grid: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|ia| {
            let wa = integration.at(ia);
            let psi_a = pair.spectral(C64::new(wa, 0.0));
            (0..n)
                .map(|id| {
                    let wd = integration.at(id);
                    let psi_d = pair.spectral(C64::new(wd, 0.0)).conj();
                    lop_response(
                        system,
                        branch,
                        C64::new(wa, 0.0),
                        C64::new(pair.omega_p - wa, 0.0),
                        C64::new(wd, 0.0),
                    ) * psi_a
                        * psi_d
                })
                .collect()
        })
        .collect();
    let n1 = axis_w1.count();
    let n3 = axis_w3.count();
    let mut out = Array2::<C64>::zeros((n1, n3));
    let rows: Vec<Vec<C64>> = (0..n1)
        .into_par_iter()
        .map(|m| {
            let w1 = axis_w1.at(m);
            let mut t = vec![C64::new(0.0, 0.0); n];
            for ia in 0..n {
                let k1 = C64::i() / C64::new(w1 - integration.at(ia), eta);
                for (id, tv) in t.iter_mut().enumerate() {
                    *tv += k1 * f_grid[ia][id];
                }
            }
            (0..n3)
                .map(|k| {
                    let w3 = axis_w3.at(k);
                    let mut s = C64::new(0.0, 0.0);
                    for (id, tv) in t.iter().enumerate() {
                        s += tv * (C64::i() / C64::new(w3 + integration.at(id), eta));
                    }
                    s * (dw / (2.0 * PI)).powi(2)
                })
                .collect()
        })
        .collect();
    for (m, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            out[(m, k)] = v;
        }
    }
    Ok(out)
}

/// Frequency-domain entangled LAP map `S(W1, t2 = 0, W3)`; both display
/// kernels act on `wa` (the ladder delays are uncoupled), the `wd`
/// integral contracts the pair profile.
pub fn lap_entangled_map(
    system: &LevelSystem,
    pair: &CwPair,
    branch: Branch,
    axis_w1: FrequencyAxis,
    axis_w3: FrequencyAxis,
    integration: FrequencyAxis,
    eta: Option<f64>,
) -> Result<Array2<C64>> {
    let n = integration.count();
    let eta = eta.unwrap_or(2.0 * integration.step());
    let dw = integration.step();
    let fd: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|ia| {
            let wa = integration.at(ia);
            let psi_a = pair.spectral(C64::new(wa, 0.0));
            let mut s = C64::new(0.0, 0.0);
            for id in 0..n {
                let wd = integration.at(id);
                s += lop_response(
                    system,
                    branch,
                    C64::new(wa, 0.0),
                    C64::new(pair.omega_p - wa, 0.0),
                    C64::new(wd, 0.0),
                ) * pair.spectral(C64::new(wd, 0.0)).conj();
            }
            s * psi_a * dw / (2.0 * PI)
        })
        .collect();
    let n1 = axis_w1.count();
    let n3 = axis_w3.count();
    let mut out = Array2::<C64>::zeros((n1, n3));
    for m in 0..n1 {
        for k in 0..n3 {
            let mut s = C64::new(0.0, 0.0);
            for (ia, f) in fd.iter().enumerate() {
                let wa = integration.at(ia);
                // D_LAP kII phases: e^{-i wa t1 + i wb t3}, wb = wp - wa
                let k1 = C64::i() / C64::new(axis_w1.at(m) - wa, eta);
                let k3 = C64::i() / C64::new(axis_w3.at(k) + pair.omega_p - wa, eta);
                s += f * k1 * k3;
            }
            out[(m, k)] = s * dw / (2.0 * PI);
        }
    }
    Ok(out)
}

/// Time-domain entangled LOP signal for the rephasing branch via the
/// stationary-pair reduction (`u = tb - ta`, `v = tc - td`, `w = ta - td`):
///
/// `S(s) = sum int du dv dw phi(u) phi^*(v) e^{-i wp (2w + u - v)/2}
///   G_ef(s2 + w + u - v) G_ee'(s3 + v) G_eg(s1 - s2 - s3 - w)`.
///
/// With a classical product field (`phi -> delta`) this collapses exactly
/// onto [`lop_signal_classical`].
pub fn lop_entangled_time_kii(
    system: &LevelSystem,
    pair: &CwPair,
    s1: f64,
    s2: f64,
    s3: f64,
    quad_points: usize,
) -> C64 {
    let t = pair.t_ent;
    let nu = quad_points;
    let du = 2.0 * t / nu as f64;
    let g_eg = system.greens_fn(Level::Single(0), Level::Ground).unwrap().gamma;
    let pad = 12.0 / g_eg.max(1e-6);
    let w_hi = s1 - s2 - s3;
    let w_lo = (-s2 - 2.0 * t).min(w_hi) - pad;
    let nw = (((w_hi - w_lo) / du).ceil() as usize).clamp(nu, 20 * nu);
    let dw_step = (w_hi - w_lo) / nw as f64;

    let mut total = C64::new(0.0, 0.0);
    for iu in 0..nu {
        let u = -t + (iu as f64 + 0.5) * du;
        let phi_u = pair.relative(u);
        if phi_u == C64::new(0.0, 0.0) {
            continue;
        }
        for iv in 0..nu {
            let v = -t + (iv as f64 + 0.5) * du;
            let phi_v = pair.relative(v).conj();
            if phi_v == C64::new(0.0, 0.0) {
                continue;
            }
            let mut acc_w = C64::new(0.0, 0.0);
            for iw in 0..nw {
                let w = w_lo + (iw as f64 + 0.5) * dw_step;
                let phase = C64::from_polar(1.0, -pair.omega_p * (2.0 * w + u - v) / 2.0);
                let mut chain = C64::new(0.0, 0.0);
                for e in 0..system.e.len() {
                    for ep in 0..system.e.len() {
                        for f in 0..system.f.len() {
                            chain += mu4(system, e, ep, f)
                                * gt(system, Level::Single(e), Level::Double(f), s2 + w + u - v)
                                * gt(system, Level::Single(e), Level::Single(ep), s3 + v)
                                * gt(system, Level::Single(e), Level::Ground, s1 - s2 - s3 - w);
                        }
                    }
                }
                acc_w += phase * chain;
            }
            total += phi_u * phi_v * acc_w * dw_step;
        }
    }
    total * du * du
}

/// Gaussian spectral envelope of a classical DQC pulse.
#[derive(Debug, Clone, Copy)]
pub struct GaussEnvelope {
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
}

impl GaussEnvelope {
    pub fn value(&self, w: f64) -> C64 {
        C64::new(
            self.amplitude * (-(w - self.center).powi(2) / (2.0 * self.sigma * self.sigma)).exp(),
            0.0,
        )
    }
}

/// Which 2D display of the DQC signal to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqcDisplay {
    /// `(W1, W3)`: single-quantum axes.
    W1W3,
    /// `(W1, W2)`: the second axis shows the double-quantum `w_fg` poles.
    W1W2,
}

#[inline]
fn xi(system: &LevelSystem, a: Level, b: Level) -> C64 {
    let g = system.greens_fn(a, b).expect("registered pair");
    C64::new(g.omega, g.gamma)
}

/// Classical DQC map: every resonance carries four envelope factors at the
/// four transition frequencies (relative to the carrier), times the two
/// display Lorentzians; the two pathways enter with opposite signs.
pub fn dqc_classical_map(
    system: &LevelSystem,
    envelopes: &[GaussEnvelope; 4],
    carrier: f64,
    display: DqcDisplay,
    w_a: f64,
    w_b: f64,
) -> C64 {
    let mut total = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                let v4 = mu4(system, e, ep, f);
                let xi_eg = xi(system, Level::Single(e), Level::Ground);
                let xi_epg = xi(system, Level::Single(ep), Level::Ground);
                let xi_fep = xi(system, Level::Double(f), Level::Single(ep));
                let xi_fg = xi(system, Level::Double(f), Level::Ground);
                let w_eg = system.e[e];
                let w_fe = system.f[f] - system.e[e];
                let w_epg = system.e[ep];
                let w_fep = system.f[f] - system.e[ep];
                let env_i = envelopes[3].value(w_fep - carrier).conj()
                    * envelopes[2].value(w_epg - carrier).conj()
                    * envelopes[1].value(w_fe - carrier)
                    * envelopes[0].value(w_eg - carrier);
                let env_ii = envelopes[3].value(w_epg - carrier).conj()
                    * envelopes[2].value(w_fep - carrier).conj()
                    * envelopes[1].value(w_fe - carrier)
                    * envelopes[0].value(w_eg - carrier);
                let l1 = C64::i() / (C64::new(w_a, 0.0) - xi_eg);
                total += match display {
                    DqcDisplay::W1W3 => {
                        let l3_i = C64::i() / (C64::new(w_b, 0.0) - xi_fep);
                        let l3_ii = C64::i() / (C64::new(w_b, 0.0) - xi_epg);
                        v4 * l1 * (env_i * l3_i - env_ii * l3_ii)
                    }
                    DqcDisplay::W1W2 => {
                        let l2 = C64::i() / (C64::new(w_b, 0.0) - xi_fg);
                        v4 * l1 * l2 * (env_i - env_ii)
                    }
                };
            }
        }
    }
    total
}

/// Entangled DQC map: the pump envelope limits only the two-photon
/// transition (`|A_p(w_fg - Omega_p)|^2 = e^{-sigma^2 (w_fg - Omega_p)^2}`)
/// and every single-quantum resonance carries the entanglement-time
/// interference factor
/// `(e^{i (w_fg/2 - xi) T} - 1) e^{-i xi_fg T / 2} / (i (w_fg/2 - xi) T)`.
#[allow(clippy::too_many_arguments)]
pub fn dqc_entangled_map(
    system: &LevelSystem,
    pump_center: f64,
    pump_sigma_time: f64,
    pump_amplitude: f64,
    t_ent: f64,
    display: DqcDisplay,
    w_a: f64,
    w_b: f64,
) -> C64 {
    let bracket = |xi_x: C64, xi_fg: C64, w_fg: f64| -> C64 {
        let z = C64::new(w_fg / 2.0, 0.0) - xi_x;
        let denom = C64::i() * z * t_ent;
        let num = if denom.norm() < 1e-10 {
            denom + denom * denom / 2.0 + C64::new(0.0, 0.0)
        } else {
            denom.exp() - 1.0
        };
        let ratio = if denom.norm() < 1e-10 { C64::new(1.0, 0.0) } else { num / denom };
        ratio * (-C64::i() * xi_fg * t_ent / 2.0).exp()
    };
    let mut total = C64::new(0.0, 0.0);
    for e in 0..system.e.len() {
        for ep in 0..system.e.len() {
            for f in 0..system.f.len() {
                let v4 = mu4(system, e, ep, f);
                let xi_eg = xi(system, Level::Single(e), Level::Ground);
                let xi_epg = xi(system, Level::Single(ep), Level::Ground);
                let xi_fep = xi(system, Level::Double(f), Level::Single(ep));
                let xi_fg = xi(system, Level::Double(f), Level::Ground);
                let w_fg = system.f[f];
                let weight = pump_amplitude
                    * pump_amplitude
                    * (-(pump_sigma_time * pump_sigma_time) * (w_fg - pump_center).powi(2)).exp();
                let br1 = bracket(xi_eg, xi_fg, w_fg);
                let l1 = C64::i() / (C64::new(w_a, 0.0) - xi_eg);
                total += match display {
                    DqcDisplay::W1W3 => {
                        let term_i =
                            bracket(xi_fep, xi_fg, w_fg) * C64::i() / (C64::new(w_b, 0.0) - xi_fep);
                        let term_ii =
                            bracket(xi_epg, xi_fg, w_fg) * C64::i() / (C64::new(w_b, 0.0) - xi_epg);
                        v4 * weight * br1 * l1 * (term_i - term_ii)
                    }
                    DqcDisplay::W1W2 => {
                        let l2 = C64::i() / (C64::new(w_b, 0.0) - xi_fg);
                        let diff = bracket(xi_fep, xi_fg, w_fg) - bracket(xi_epg, xi_fg, w_fg);
                        v4 * weight * br1 * l1 * l2 * diff
                    }
                };
            }
        }
    }
    total
}

/// Half width at half maximum of a sampled peak by linear interpolation;
/// `None` when the peak is not resolved inside the window.
pub fn fitted_hwhm(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (imax, &ymax) = ys.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    let half = ymax / 2.0;
    let mut right = None;
    for i in imax..ys.len() - 1 {
        if ys[i] >= half && ys[i + 1] < half {
            let f = (ys[i] - half) / (ys[i] - ys[i + 1]);
            right = Some(xs[i] + f * (xs[i + 1] - xs[i]));
            break;
        }
    }
    let mut left = None;
    for i in (1..=imax).rev() {
        if ys[i] >= half && ys[i - 1] < half {
            let f = (ys[i] - half) / (ys[i] - ys[i - 1]);
            left = Some(xs[i] - f * (xs[i] - xs[i - 1]));
            break;
        }
    }
    match (left, right) {
        (Some(l), Some(r)) => Some(0.5 * (r - l)),
        _ => None,
    }
}

/// Peak-contrast metric: map maximum over the map mean; the documented
/// constant behind "broad vs narrow" comparisons.
pub fn peak_contrast(map: &Array2<f64>) -> f64 {
    let max = map.iter().cloned().fold(0.0, f64::max);
    let mean = map.iter().sum::<f64>() / map.len() as f64;
    if mean > 0.0 {
        max / mean
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matter::Dephasing;
    use crate::numerics::{dft_uniform, FtSign};
    use crate::units::wavenumber_to_radfs as w2r;

    fn dimer() -> LevelSystem {
        LevelSystem::new(
            &[11_000.0, 11_500.0],
            &[22_300.0],
            vec![C64::new(1.0, 0.0), C64::new(0.9, 0.0)],
            ndarray::array![[C64::new(1.0, 0.0)], [C64::new(0.8, 0.0)]],
            &[100.0, 100.0],
            &[100.0],
            Dephasing::Uniform(w2r(100.0)),
            None,
        )
        .unwrap()
    }

    #[test]
    fn phase_cycling_signature_linearity() {
        let sys = dimer();
        let base = PulseTrain::impulsive([0.0, 10.0, 20.0, 30.0]);
        let s0 = lap_signal_classical(&sys, &base, Branch::KII, 10.0, 5.0, 8.0);
        let mut global = base;
        global.phases = [0.7; 4];
        let sg = lap_signal_classical(&sys, &global, Branch::KII, 10.0, 5.0, 8.0);
        assert!((s0 - sg).norm() < 1e-12 * s0.norm());
        let mut p1 = base;
        p1.phases[0] = 0.4;
        let s1 = lap_signal_classical(&sys, &p1, Branch::KII, 10.0, 5.0, 8.0);
        assert!((s1 - s0 * C64::from_polar(1.0, 0.4)).norm() < 1e-12 * s0.norm());
    }

    #[test]
    fn lap_frequency_map_matches_fft_of_time_map() {
        let sys = dimer();
        let train = PulseTrain::impulsive([0.0; 4]);
        // truncation e^{-gamma n dt} and the O((z dt)^2) lattice bias must
        // both sit below the 1e-5 gate
        let n = 2560;
        let dt = 0.3;
        let mut grid = vec![vec![C64::new(0.0, 0.0); n]; n];
        let rows: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut v = lap_signal_classical(
                            &sys,
                            &train,
                            Branch::KII,
                            i as f64 * dt,
                            0.0,
                            j as f64 * dt,
                        );
                        if i == 0 {
                            v *= 0.5;
                        }
                        if j == 0 {
                            v *= 0.5;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            grid[i] = row;
        }
        let (f0, df) = crate::numerics::conjugate_axis(dt, n);
        let mut tmp = vec![vec![C64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            tmp[i] = dft_uniform(0.0, dt, &grid[i], FtSign::Plus, f0, df).unwrap();
        }
        let mut freq = vec![vec![C64::new(0.0, 0.0); n]; n];
        for j in 0..n {
            let col: Vec<C64> = (0..n).map(|i| tmp[i][j]).collect();
            let out = dft_uniform(0.0, dt, &col, FtSign::Plus, f0, df).unwrap();
            for i in 0..n {
                freq[i][j] = out[i];
            }
        }
        let m1 = ((sys.e[0] - f0) / df).round() as usize;
        let m3 = (((sys.e[0] - sys.f[0]) - f0) / df).round() as usize;
        for (i, j) in [(m1, m3), (m1 + 1, m3 - 1), (m1 - 1, m3 + 1)] {
            let want = lap_frequency_map_classical(
                &sys,
                &train,
                Branch::KII,
                f0 + df * i as f64,
                f0 + df * j as f64,
            );
            let got = freq[i][j];
            let rel = (got - want).norm() / want.norm();
            assert!(rel < 1e-5, "({i},{j}): rel {rel}");
        }
    }

    #[test]
    fn lop_cross_peaks_at_interband_splitting() {
        let sys = dimer();
        let train = PulseTrain::impulsive([0.0; 4]);
        let w_ee = sys.e[1] - sys.e[0];
        let w1 = sys.e[1];
        // the imaginary part isolates the absorptive cross-peak Lorentzian
        let scan: Vec<f64> = (-200..=200)
            .map(|k| {
                let w3 = -w1 + w_ee + k as f64 * 2e-4;
                lop_frequency_map_classical(&sys, &train, Branch::KII, w1, w3).im.abs()
            })
            .collect();
        let peaks = crate::numerics::local_maxima(&scan, 0.5);
        assert!(
            peaks.iter().any(|&p| (p as isize - 200).abs() <= 1),
            "no antidiagonal cross peak at w_ee': {peaks:?}"
        );
        // single-e system: the only ridge sits at W1 + W3 = 0
        let single = LevelSystem::new(
            &[11_000.0],
            &[22_300.0],
            vec![C64::new(1.0, 0.0)],
            ndarray::array![[C64::new(1.0, 0.0)]],
            &[100.0],
            &[100.0],
            Dephasing::Uniform(w2r(100.0)),
            None,
        )
        .unwrap();
        let scan0: Vec<f64> = (-200..=200)
            .map(|k| {
                let w3 = -w1 + k as f64 * 2e-4;
                lop_frequency_map_classical(&single, &train, Branch::KII, w1, w3).norm()
            })
            .collect();
        let peaks0 = crate::numerics::local_maxima(&scan0, 0.5);
        assert!(peaks0.iter().any(|&p| (p as isize - 200).abs() <= 1));
    }

    #[test]
    fn lop_antidiagonal_width_is_interband_dephasing() {
        let sys = dimer();
        let train = PulseTrain::impulsive([0.0; 4]);
        let w_ee = sys.e[1] - sys.e[0];
        let w1 = sys.e[1];
        let xs: Vec<f64> = (-300..=300).map(|k| k as f64 * 1.2e-4).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| {
                lop_frequency_map_classical(&sys, &train, Branch::KII, w1, -w1 + w_ee + x).im.abs()
            })
            .collect();
        let hwhm = fitted_hwhm(&xs, &ys).expect("resolved peak");
        let gamma = sys.gamma_pair(Level::Single(0), Level::Single(1));
        assert!(
            (hwhm - gamma).abs() / gamma < 0.2,
            "antidiagonal HWHM {hwhm} vs gamma_ee' {gamma}"
        );
    }

    #[test]
    fn entangled_lop_linear_in_pump_intensity() {
        let sys = dimer();
        let mk = |amp: f64| CwPair {
            omega_p: sys.f[0],
            omega1: w2r(11_000.0),
            omega2: w2r(11_300.0),
            t_ent: 50.0,
            amplitude: amp,
        };
        let v1 = lop_entangled_time_kii(&sys, &mk(1.0), 60.0, 10.0, 15.0, 48);
        let v2 = lop_entangled_time_kii(&sys, &mk(3.0), 60.0, 10.0, 15.0, 48);
        // the pair amplitude enters twice (psi psi^*): the signal scales
        // with amplitude^2, i.e. linearly in the pump intensity
        assert!((v2 - 9.0 * v1).norm() < 1e-9 * v2.norm());
    }

    #[test]
    fn entangled_time_trace_peaks_on_e_resonance() {
        let sys = dimer();
        let pair = CwPair {
            omega_p: sys.f[0],
            omega1: w2r(11_000.0),
            omega2: w2r(11_300.0),
            t_ent: 40.0,
            amplitude: 1.0,
        };
        let n = 256;
        let dt = 1.1;
        let vals: Vec<C64> = (0..n)
            .map(|i| {
                let v = lop_entangled_time_kii(&sys, &pair, i as f64 * dt, 0.0, 0.0, 32);
                if i == 0 {
                    v * 0.5
                } else {
                    v
                }
            })
            .collect();
        let (f0, df) = crate::numerics::conjugate_axis(dt, n);
        let ft = dft_uniform(0.0, dt, &vals, FtSign::Plus, f0, df).unwrap();
        let m_peak = ft
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        let w_peak = f0 + df * m_peak as f64;
        let near = sys.e.iter().any(|&we| (w_peak - we).abs() < 3.0 * df);
        assert!(near, "time-engine FT peaks at {w_peak}, expected near an e resonance");
    }

    #[test]
    fn entangled_lop_map_shows_both_cross_peaks() {
        let sys = dimer();
        let pair = CwPair {
            omega_p: sys.f[0],
            omega1: w2r(11_000.0),
            omega2: w2r(11_300.0),
            t_ent: 100.0,
            amplitude: 1.0,
        };
        let n_map = 72;
        let half = w2r(800.0);
        let ax1 = FrequencyAxis::centered(0.5 * (sys.e[0] + sys.e[1]), half, n_map).unwrap();
        let ax3 = FrequencyAxis::centered(-0.5 * (sys.e[0] + sys.e[1]), half, n_map).unwrap();
        let integ = FrequencyAxis::centered(0.5 * (sys.e[0] + sys.e[1]), w2r(1_600.0), 384).unwrap();
        let map = lop_entangled_map(&sys, &pair, Branch::KII, ax1, ax3, integ, None).unwrap();
        // diagonal (e = e') ridge and the w_ee' side peaks must both appear
        let val = |w1t: f64, w3t: f64| -> f64 {
            map[(ax1.nearest_index(w1t), ax3.nearest_index(w3t))].norm()
        };
        let diag = val(sys.e[0], -sys.e[0]);
        let cross = val(sys.e[1], -sys.e[1] + (sys.e[1] - sys.e[0]));
        // off every structure: 250 cm^-1 from both e lines and both ridges
        let off = val(sys.e[0] + w2r(250.0), -sys.e[0]);
        assert!(diag > 5.0 * off, "diagonal peak not resolved: {diag} vs {off}");
        assert!(cross > 2.0 * off, "cross peak not resolved: {cross} vs {off}");
    }

    #[test]
    fn dqc_classical_envelope_selectivity() {
        let sys = dimer();
        let sigma = w2r(120.0);
        let env = GaussEnvelope { center: 0.0, sigma, amplitude: 1.0 };
        let carrier = sys.f[0] / 2.0;
        let envs = [env; 4];
        // probe the (w_eg, w_fe') resonance; identical pulses cancel the two
        // pathways exactly on the W1W2 display, so selectivity is read here
        let probe = (sys.e[0], sys.f[0] - sys.e[0]);
        let on = dqc_classical_map(&sys, &envs, carrier, DqcDisplay::W1W3, probe.0, probe.1);
        let off =
            dqc_classical_map(&sys, &envs, carrier + 6.0 * sigma, DqcDisplay::W1W3, probe.0, probe.1);
        assert!(off.norm() < 1e-3 * on.norm());
    }

    #[test]
    fn dqc_entanglement_time_interference_zeros() {
        // single e, f with gamma = 0: the interference factor vanishes when
        // (w_fg/2 - w_eg) T = 2 pi n
        let sys = LevelSystem::new(
            &[11_000.0],
            &[22_500.0],
            vec![C64::new(1.0, 0.0)],
            ndarray::array![[C64::new(1.0, 0.0)]],
            &[0.0],
            &[0.0],
            Dephasing::Derived,
            None,
        )
        .unwrap();
        let detune = sys.f[0] / 2.0 - sys.e[0];
        let t_zero = 2.0 * PI / detune;
        let probe = (sys.e[0] + w2r(30.0), sys.f[0] + w2r(10.0));
        let v = dqc_entangled_map(&sys, sys.f[0], 1.0 / w2r(100.0), 1.0, t_zero, DqcDisplay::W1W2, probe.0, probe.1);
        let v_ref =
            dqc_entangled_map(&sys, sys.f[0], 1.0 / w2r(100.0), 1.0, 0.6 * t_zero, DqcDisplay::W1W2, probe.0, probe.1);
        assert!(v.norm() < 1e-10 * v_ref.norm(), "no interference zero: {} vs {}", v.norm(), v_ref.norm());
    }

    #[test]
    fn dqc_scaling_exponents() {
        let sys = dimer();
        let t_ent = 15.0;
        let sigma = w2r(100.0);
        let probe = (sys.e[0], sys.f[0] - sys.e[0]);
        let mut ent = Vec::new();
        let mut cls = Vec::new();
        let intensities: Vec<f64> = (0..6).map(|k| 10f64.powf(k as f64 / 5.0)).collect();
        for &i_pump in &intensities {
            let beta = i_pump.sqrt();
            ent.push(
                dqc_entangled_map(&sys, sys.f[0], 1.0 / sigma, beta, t_ent, DqcDisplay::W1W3, probe.0, probe.1)
                    .norm(),
            );
            let env = GaussEnvelope { center: 0.0, sigma, amplitude: beta };
            cls.push(
                dqc_classical_map(&sys, &[env; 4], sys.f[0] / 2.0, DqcDisplay::W1W3, probe.0, probe.1).norm(),
            );
        }
        let slope = |ys: &[f64]| -> f64 {
            let xs: Vec<f64> = intensities.iter().map(|x| x.ln()).collect();
            let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
            let xm = xs.iter().sum::<f64>() / xs.len() as f64;
            let ym = ly.iter().sum::<f64>() / ly.len() as f64;
            let num: f64 = xs.iter().zip(&ly).map(|(x, y)| (x - xm) * (y - ym)).sum();
            let den: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
            num / den
        };
        let s_ent = slope(&ent);
        let s_cls = slope(&cls);
        assert!((s_ent - 1.0).abs() < 0.02, "entangled exponent {s_ent}");
        assert!((s_cls - 2.0).abs() < 0.02, "classical exponent {s_cls}");
    }

    #[test]
    fn lap_map_broader_than_lop_map_on_dimer() {
        // narrow intraband dephasing is what the loop protocol resolves
        let mut sys = dimer();
        sys.dephasing = Dephasing::Explicit {
            eg: w2r(100.0),
            fg: w2r(100.0),
            fe: w2r(100.0),
            ee: w2r(8.0),
            ff: w2r(100.0),
        };
        let train = PulseTrain::impulsive([0.0; 4]);
        let n = 96;
        let half = w2r(900.0);
        let ax1 = FrequencyAxis::centered(sys.e[0], half, n).unwrap();
        let ax3l = FrequencyAxis::centered(-sys.e[0], half, n).unwrap();
        let ax3d = FrequencyAxis::centered(sys.e[0] - sys.f[0], half, n).unwrap();
        let mut lop = Array2::<f64>::zeros((n, n));
        let mut lap = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                lop[(i, j)] =
                    lop_frequency_map_classical(&sys, &train, Branch::KII, ax1.at(i), ax3l.at(j)).norm();
                lap[(i, j)] =
                    lap_frequency_map_classical(&sys, &train, Branch::KII, ax1.at(i), ax3d.at(j)).norm();
            }
        }
        assert!(peak_contrast(&lop) > peak_contrast(&lap));
    }

    #[test]
    fn protocol_validation() {
        assert!(DelayProtocol::Lop { s1: -1.0, s2: 0.0, s3: 0.0 }.validate().is_err());
        assert!(DelayProtocol::Lop { s1: 1.0, s2: -5.0, s3: 0.0 }.validate().is_ok());
        assert!(DelayProtocol::Lap { t1: 1.0, t2: -0.1, t3: 0.0 }.validate().is_err());
    }
}
