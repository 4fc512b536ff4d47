//! Time-and-frequency gated photon counting: gate spectrograms, bare
//! Wigner signals built from transition amplitudes, gated photon numbers,
//! gated emission and coincidence signals, and the Lorentzian-gate
//! "physical spectrum" benchmark.

use crate::axis::{FrequencyAxis, TimeAxis};
use crate::error::{Diagnostic, QsError, Result};
use crate::C64;
use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

/// Gate profile family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateFamily {
    Gaussian,
    Lorentzian,
}

/// Combined time/frequency detector gate. Widths are rates:
/// `sigma_t` (fs^-1) for the time gate, `sigma_w` (rad/fs) for the
/// frequency gate. The time gate is applied first.
#[derive(Debug, Clone, Copy)]
pub struct GateSpec {
    pub family: GateFamily,
    /// Gate center time (fs).
    pub t_center: f64,
    /// Gate center frequency (rad/fs).
    pub w_center: f64,
    pub sigma_t: f64,
    pub sigma_w: f64,
}

impl GateSpec {
    pub fn gaussian(t_center: f64, w_center: f64, sigma_t: f64, sigma_w: f64) -> Result<Self> {
        if !(sigma_t > 0.0 && sigma_w > 0.0) {
            return Err(QsError::Contract("GateSpec: gate widths must be positive".into()));
        }
        Ok(Self { family: GateFamily::Gaussian, t_center, w_center, sigma_t, sigma_w })
    }

    pub fn lorentzian(t_center: f64, w_center: f64, sigma_t: f64, sigma_w: f64) -> Result<Self> {
        if !(sigma_t > 0.0 && sigma_w > 0.0) {
            return Err(QsError::Contract("GateSpec: gate widths must be positive".into()));
        }
        Ok(Self { family: GateFamily::Lorentzian, t_center, w_center, sigma_t, sigma_w })
    }

    /// Effective Gaussian detection widths (rates):
    /// `sigma_w_eff^2 = sigma_t^2 + sigma_w^2` and
    /// `sigma_t_eff^2 = sigma_t^2 + 1/(sigma_w^-2 + sigma_t^-2)`.
    /// Gating only degrades both with respect to the raw gates.
    pub fn effective_widths(&self) -> (f64, f64) {
        let st2 = self.sigma_t * self.sigma_t;
        let sw2 = self.sigma_w * self.sigma_w;
        let sw_eff = (st2 + sw2).sqrt();
        let st_eff = (st2 + 1.0 / (1.0 / sw2 + 1.0 / st2)).sqrt();
        (st_eff, sw_eff)
    }

    /// Fourier-uncertainty product of the effective widths:
    /// temporal resolution (fs) times spectral resolution (rad/fs),
    /// `sigma_w_eff / sigma_t_eff > 1` for every positive gate pair.
    pub fn uncertainty_product(&self) -> f64 {
        let (st_eff, sw_eff) = self.effective_widths();
        sw_eff / st_eff
    }

    /// Time gate `F_t(t', tbar)`.
    pub fn time_gate(&self, t: f64) -> f64 {
        let x = t - self.t_center;
        match self.family {
            GateFamily::Gaussian => (-0.5 * self.sigma_t * self.sigma_t * x * x).exp(),
            GateFamily::Lorentzian => {
                if x <= 0.0 {
                    (self.sigma_t * x).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Frequency gate `F_f(w, wbar)`.
    pub fn freq_gate(&self, w: f64) -> C64 {
        let x = w - self.w_center;
        match self.family {
            GateFamily::Gaussian => {
                C64::new((-x * x / (4.0 * self.sigma_w * self.sigma_w)).exp(), 0.0)
            }
            GateFamily::Lorentzian => C64::i() / C64::new(x, self.sigma_w),
        }
    }
}

/// Detector spectrogram evaluators (time gate first).
#[derive(Debug, Clone, Copy)]
pub struct Spectrogram {
    gate: GateSpec,
}

/// Build the detector spectrogram for a gate.
pub fn detector_spectrogram(gate: GateSpec) -> Spectrogram {
    Spectrogram { gate }
}

impl Spectrogram {
    /// Time-domain spectrogram
    /// `D(tbar, wbar; t', tau) = int dw/2pi e^{-i w tau} |F_f|^2 F_t^*(t' + tau) F_t(t')`.
    pub fn time_domain(&self, t_prime: f64, tau: f64) -> C64 {
        let g = &self.gate;
        let dt = t_prime - g.t_center;
        match g.family {
            GateFamily::Gaussian => {
                let st2 = g.sigma_t * g.sigma_t;
                let sw = g.sigma_w;
                let sw_t2 = st2 + sw * sw;
                let re = -0.5 * sw * sw * tau * tau - st2 * dt * dt - st2 * dt * tau
                    - 0.5 * st2 * tau * tau;
                let _ = sw_t2;
                (sw / (2.0 * PI).sqrt()) * C64::from_polar(re.exp(), -g.w_center * tau)
            }
            GateFamily::Lorentzian => {
                // theta(tbar - t') theta((tbar - t') - tau) windowed kernel
                let x = -dt; // tbar - t'
                if x < 0.0 || tau > x {
                    return C64::new(0.0, 0.0);
                }
                let damp = (-g.sigma_w * tau.abs() + g.sigma_t * tau - 2.0 * g.sigma_t * x).exp();
                (1.0 / (2.0 * g.sigma_w)) * C64::from_polar(damp, -g.w_center * tau)
            }
        }
    }

    /// Wigner spectrogram `W_D(tbar, wbar; t', w') = int dtau e^{i w' tau} D`.
    pub fn wigner(&self, t_prime: f64, w_prime: f64) -> C64 {
        let g = &self.gate;
        let dt = t_prime - g.t_center;
        let dw = w_prime - g.w_center;
        match g.family {
            GateFamily::Gaussian => {
                let st2 = g.sigma_t * g.sigma_t;
                let sw2 = g.sigma_w * g.sigma_w;
                let sw_eff2 = st2 + sw2;
                let st_eff2 = st2 * (st2 + 2.0 * sw2) / sw_eff2;
                let a = st2 / sw_eff2;
                let norm = g.sigma_w / sw_eff2.sqrt();
                let re = -0.5 * st_eff2 * dt * dt - dw * dw / (2.0 * sw_eff2);
                norm * C64::from_polar(re.exp(), -a * dw * dt)
            }
            GateFamily::Lorentzian => {
                let x = -dt;
                if x < 0.0 {
                    return C64::new(0.0, 0.0);
                }
                // int_{-inf}^{x} e^{i (w' - wbar) tau} windowed kernel
                let z_neg = C64::new(g.sigma_w + g.sigma_t, dw);
                let z_pos = C64::new(g.sigma_t - g.sigma_w, dw);
                let part_neg = 1.0 / z_neg;
                let part_pos = ((z_pos * x).exp() - 1.0) / z_pos;
                (1.0 / (2.0 * g.sigma_w)) * (-2.0 * g.sigma_t * x).exp() * (part_neg + part_pos)
            }
        }
    }
}

/// Complex transition amplitude evaluator `T_eg(t)`.
pub type Amplitude = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Bare Wigner signal assembled from a set of transition amplitudes.
#[derive(Debug, Clone)]
pub struct BareSignal {
    /// `n(t', w')` on the product grid: real after the e-sum.
    pub values: Array2<f64>,
    pub time_axis: TimeAxis,
    pub freq_axis: FrequencyAxis,
    pub diagnostics: Vec<Diagnostic>,
}

/// `n(t', w') = sum_e int dtau e^{-i w' tau} T_eg(t' - tau/2) T_eg^*(t' + tau/2)`.
///
/// `tau_span` must cover the amplitude support; the edge diagnostic fires
/// if the amplitudes are visibly truncated.
pub fn bare_signal(
    amplitudes: &[Amplitude],
    time_axis: TimeAxis,
    freq_axis: FrequencyAxis,
    tau_span: f64,
    n_tau: usize,
) -> Result<BareSignal> {
    if amplitudes.is_empty() {
        return Err(QsError::Contract("bare_signal: need at least one amplitude".into()));
    }
    let dtau = tau_span / n_tau as f64;
    let mut diagnostics = Vec::new();
    // truncation check on the amplitude magnitude at the window edges
    let mut peak = 0.0_f64;
    let mut edge = 0.0_f64;
    for amp in amplitudes {
        for i in 0..time_axis.count() {
            peak = peak.max(amp(time_axis.at(i)).norm());
        }
        edge = edge
            .max(amp(time_axis.start() - 0.5 * tau_span).norm())
            .max(amp(time_axis.end() + 0.5 * tau_span).norm());
    }
    if peak > 0.0 && edge > 1e-6 * peak {
        diagnostics.push(Diagnostic::new(
            "edge-truncation",
            format!("amplitude carries {:.2e} of its peak at the tau window edge", edge / peak),
        ));
    }
    let rows: Vec<Vec<f64>> = (0..time_axis.count())
        .into_par_iter()
        .map(|it| {
            let t = time_axis.at(it);
            (0..freq_axis.count())
                .map(|iw| {
                    let w = freq_axis.at(iw);
                    let mut acc = C64::new(0.0, 0.0);
                    for amp in amplitudes {
                        for k in 0..n_tau {
                            let tau = -0.5 * tau_span + (k as f64 + 0.5) * dtau;
                            acc += C64::from_polar(1.0, -w * tau)
                                * amp(t - 0.5 * tau)
                                * amp(t + 0.5 * tau).conj();
                        }
                    }
                    (acc * dtau).re
                })
                .collect()
        })
        .collect();
    let mut values = Array2::<f64>::zeros((time_axis.count(), freq_axis.count()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[(i, j)] = v;
        }
    }
    Ok(BareSignal { values, time_axis, freq_axis, diagnostics })
}

impl BareSignal {
    /// Frequency marginal `int dw'/2pi n(t', w') = sum_e |T_eg(t')|^2`.
    pub fn time_marginal(&self) -> Vec<f64> {
        (0..self.time_axis.count())
            .map(|i| {
                (0..self.freq_axis.count()).map(|j| self.values[(i, j)]).sum::<f64>()
                    * self.freq_axis.step()
                    / (2.0 * PI)
            })
            .collect()
    }
}

/// Gated photon number: overlap of the bare Wigner signal with the
/// detector Wigner spectrogram, `n = int dt' dw'/2pi W_D n`.
pub fn gated_photon_number(bare: &BareSignal, gate: &GateSpec) -> f64 {
    let spec = detector_spectrogram(*gate);
    let mut acc = 0.0;
    for i in 0..bare.time_axis.count() {
        let t = bare.time_axis.at(i);
        for j in 0..bare.freq_axis.count() {
            let w = bare.freq_axis.at(j);
            acc += (spec.wigner(t, w) * bare.values[(i, j)]).re;
        }
    }
    acc * bare.time_axis.step() * bare.freq_axis.step() / (2.0 * PI)
}

/// Time-resolved limit: no frequency gate, delta time gate at `tbar`
/// gives `sum_e |T_eg(tbar)|^2`.
pub fn time_resolved_number(amplitudes: &[Amplitude], tbar: f64) -> f64 {
    amplitudes.iter().map(|a| a(tbar).norm_sqr()).sum()
}

/// Frequency-resolved limit: no time gate, narrow frequency gate at
/// `wbar` gives `sum_e |T_eg(wbar)|^2` with
/// `T_eg(w) = int dt e^{i w t} T_eg(t)`.
pub fn frequency_resolved_number(
    amplitudes: &[Amplitude],
    wbar: f64,
    t_lo: f64,
    t_hi: f64,
    n: usize,
) -> f64 {
    let dt = (t_hi - t_lo) / n as f64;
    amplitudes
        .iter()
        .map(|a| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let t = t_lo + (k as f64 + 0.5) * dt;
                acc += C64::from_polar(1.0, wbar * t) * a(t);
            }
            (acc * dt).norm_sqr()
        })
        .sum()
}

/// Gated emission spectrum
/// `S1(tbar, wbar) = DOS^2 int dt' dtau D(tbar, wbar; t', tau) <V^dag(t'+tau) V(t')>`.
pub fn emission_spectrum_s1(
    correlator: &(dyn Fn(f64, f64) -> C64 + Sync),
    gate: &GateSpec,
    dos: f64,
    t_range: (f64, f64),
    tau_range: (f64, f64),
    n: usize,
) -> f64 {
    let spec = detector_spectrogram(*gate);
    let dt = (t_range.1 - t_range.0) / n as f64;
    let dtau = (tau_range.1 - tau_range.0) / n as f64;
    let total: f64 = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = t_range.0 + (i as f64 + 0.5) * dt;
            let mut row = 0.0;
            for k in 0..n {
                let tau = tau_range.0 + (k as f64 + 0.5) * dtau;
                row += (spec.time_domain(t, tau) * correlator(t, tau)).re;
            }
            row
        })
        .sum();
    dos * dos * total * dt * dtau
}

/// Gated two-detector coincidence
/// `S2 = DOS^4 int D1(t1', tau1) D2(t2', tau2) <V^dag(t2'+tau2) V^dag(t1'+tau1) V(t1') V(t2')>`.
/// Symmetric under swapping the detectors together with their gates.
#[allow(clippy::too_many_arguments)]
pub fn coincidence_s2(
    four_point: &(dyn Fn(f64, f64, f64, f64) -> C64 + Sync),
    gate1: &GateSpec,
    gate2: &GateSpec,
    dos: f64,
    t_range: (f64, f64),
    tau_range: (f64, f64),
    n: usize,
) -> f64 {
    let s1 = detector_spectrogram(*gate1);
    let s2 = detector_spectrogram(*gate2);
    let dt = (t_range.1 - t_range.0) / n as f64;
    let dtau = (tau_range.1 - tau_range.0) / n as f64;
    let total: f64 = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let i1 = idx / n;
            let i2 = idx % n;
            let t1 = t_range.0 + (i1 as f64 + 0.5) * dt;
            let t2 = t_range.0 + (i2 as f64 + 0.5) * dt;
            let mut acc = 0.0;
            for k1 in 0..n {
                let tau1 = tau_range.0 + (k1 as f64 + 0.5) * dtau;
                let d1 = s1.time_domain(t1, tau1);
                if d1.norm() < 1e-14 {
                    continue;
                }
                for k2 in 0..n {
                    let tau2 = tau_range.0 + (k2 as f64 + 0.5) * dtau;
                    let d2 = s2.time_domain(t2, tau2);
                    if d2.norm() < 1e-14 {
                        continue;
                    }
                    acc += (d1 * d2 * four_point(t1, tau1, t2, tau2)).re;
                }
            }
            acc
        })
        .sum();
    dos.powi(4) * total * (dt * dtau).powi(2)
}

/// Gated counting order guard: only single and coincidence detection are
/// implemented.
pub fn photon_counting_order(n: usize) -> Result<usize> {
    if n == 0 || n > 2 {
        return Err(QsError::Capability(format!(
            "photon counting implemented for N in {{1, 2}}, requested N = {n}"
        )));
    }
    Ok(n)
}

/// Physical-spectrum benchmark: single-detector rate of the
/// Lorentzian-gated field `A_{w,G}(t) = int^t dt1 e^{(i w - G/2)(t - t1)} E(t1)`
/// for a stationary field correlator `c(tau) = <E^dag(t + tau) E(t)>`:
/// `S1 = (1/G) int du c(u) e^{i w u - G |u| / 2}`.
pub fn physical_spectrum_s1(
    correlator: &dyn Fn(f64) -> C64,
    w: f64,
    gamma_gate: f64,
    u_span: f64,
    n: usize,
) -> f64 {
    let du = 2.0 * u_span / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let u = -u_span + (k as f64 + 0.5) * du;
        acc += correlator(u) * C64::from_polar((-0.5 * gamma_gate * u.abs()).exp(), w * u);
    }
    (acc * du).re / gamma_gate
}

/// Normalized two-gate coincidence of the physical spectrum,
/// `g2 = <A1^dag A2^dag A2 A1> / (<A1^dag A1><A2^dag A2>)`, for a field
/// whose four-point correlator factorizes through `pair(t, t')` and
/// `auto(tau)` parts (coherent-state-like inputs give exactly 1).
pub struct StationarySource {
    /// Two-time amplitude correlator `c(tau)`.
    pub auto: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    /// Include the exchange (Wick) pairing of chaotic light; coherent
    /// sources factorize through a single pairing and give `g2 = 1`.
    pub chaotic: bool,
    /// Optional pair amplitude for bunched two-photon sources.
    pub pair: Option<Arc<dyn Fn(f64) -> C64 + Send + Sync>>,
}

impl StationarySource {
    /// Four-point value `<E^dag(t1) E^dag(t2) E(t3) E(t4)>`:
    /// `c(t1 - t4) c(t2 - t3) [+ c(t1 - t3) c(t2 - t4)] [+ p^*(t1 - t2) p(t4 - t3)]`.
    pub fn four_point(&self, t1: f64, t2: f64, t3: f64, t4: f64) -> C64 {
        let c = &self.auto;
        let mut v = c(t1 - t4) * c(t2 - t3);
        if self.chaotic {
            v += c(t1 - t3) * c(t2 - t4);
        }
        if let Some(p) = &self.pair {
            v += p(t1 - t2).conj() * p(t4 - t3);
        }
        v
    }
}

/// `g^2_{G1 G2}(w1, w2; tau)` of a stationary source through two
/// Lorentzian-gated fields (numerical, finite memory window).
pub fn physical_spectrum_g2(
    source: &StationarySource,
    w1: f64,
    gamma1: f64,
    w2: f64,
    gamma2: f64,
    tau: f64,
    span: f64,
    n: usize,
) -> f64 {
    // A_i(t) = int_0^inf ds e^{(i w_i - G_i/2) s} E(t - s)
    let ds = span / n as f64;
    let kernel = |w: f64, g: f64, k: usize| -> C64 {
        let s = (k as f64 + 0.5) * ds;
        C64::from_polar((-0.5 * g * s).exp(), w * s)
    };
    // numerator: <A1^dag(0) A2^dag(tau) A2(tau) A1(0)>
    let mut num = C64::new(0.0, 0.0);
    for k1 in 0..n {
        let s1 = (k1 as f64 + 0.5) * ds;
        for k2 in 0..n {
            let s2 = (k2 as f64 + 0.5) * ds;
            for k3 in 0..n {
                let s3 = (k3 as f64 + 0.5) * ds;
                for k4 in 0..n {
                    let s4 = (k4 as f64 + 0.5) * ds;
                    let f = source.four_point(-s1, tau - s2, tau - s3, -s4);
                    num += kernel(w1, gamma1, k1).conj()
                        * kernel(w2, gamma2, k2).conj()
                        * kernel(w2, gamma2, k3)
                        * kernel(w1, gamma1, k4)
                        * f;
                }
            }
        }
    }
    let num = num.re * ds.powi(4);
    // single-detector rates
    let single = |w: f64, g: f64| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for k1 in 0..n {
            let s1 = (k1 as f64 + 0.5) * ds;
            for k4 in 0..n {
                let s4 = (k4 as f64 + 0.5) * ds;
                acc += kernel(w, g, k1).conj() * kernel(w, g, k4) * (source.auto)(s4 - s1);
            }
        }
        acc.re * ds * ds
    };
    num / (single(w1, gamma1) * single(w2, gamma2))
}
