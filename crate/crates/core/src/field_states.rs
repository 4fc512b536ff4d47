//! Entangled two-photon states from parametric down-conversion: joint
//! amplitudes, Schmidt decomposition (numeric SVD and the analytic
//! bipartite-Gaussian route), entanglement measures and multimode field
//! correlation functions.

use crate::axis::{ComplexGrid2D, FrequencyAxis, GridAxis, TimeAxis};
use crate::error::{QsError, Result};
use crate::numerics::{hermite_function, svd_matrix};
use crate::C64;
use ndarray::Array2;
use std::f64::consts::PI;

/// Gaussian stand-in for the sinc phase-matching central peak.
pub const GAUSSIAN_PM_GAMMA: f64 = 0.04822;

#[inline]
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Pump pulse envelope. `bandwidth == 0` encodes a cw pump, which must go
/// through [`cw_two_photon_wavefunction`] instead of the pulsed builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpEnvelope {
    /// Center frequency omega_p (rad/fs).
    pub center: f64,
    /// Gaussian standard deviation sigma_p (rad/fs); 0 = cw.
    pub bandwidth: f64,
    /// Overall amplitude scale alpha (a.u.); sets the squeezing strength.
    pub amplitude: f64,
}

impl PumpEnvelope {
    pub fn new(center: f64, bandwidth: f64, amplitude: f64) -> Result<Self> {
        if bandwidth < 0.0 {
            return Err(QsError::Contract(format!("PumpEnvelope: sigma_p must be >= 0, got {bandwidth}")));
        }
        Ok(Self { center, bandwidth, amplitude })
    }

    pub fn is_cw(&self) -> bool {
        self.bandwidth == 0.0
    }

    /// Normalized Gaussian `A_p(w) = exp(-(w - w_p)^2 / 2 sigma_p^2) / sqrt(2 pi sigma_p^2)`.
    pub fn value(&self, omega_sum: f64) -> f64 {
        let s = self.bandwidth;
        let d = omega_sum - self.center;
        (-(d * d) / (2.0 * s * s)).exp() / (2.0 * PI * s * s).sqrt()
    }
}

/// Phase-matching model of the down-conversion crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMatchingKind {
    /// Linear type-II walk-off: `dk L / 2 = (wa - w1) T1/2 + (wb - w2) T2/2`
    /// with the sinc profile and its `e^{i dk L / 2}` phase.
    TypeII,
    /// Same linear walk-off, with the sinc replaced by
    /// `exp(-gamma (dk L)^2)` (no residual phase); this is the form the
    /// analytic Schmidt decomposition applies to.
    GaussianApprox,
    /// Quadratic type-I expansion through its three coefficients:
    /// `dk L / 2 = c1 (wa + wb - wp) + c2 (wa + wb - wp)^2 - c3 [(wa - w1)^2 + (wb - w2)^2]`.
    TypeI { c1: f64, c2: f64, c3: f64 },
}

/// Phase matching plus the two beam center frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatching {
    pub kind: PhaseMatchingKind,
    /// Group-delay times T1, T2 (fs) for the linear (type-II) kinds.
    pub t1: f64,
    pub t2: f64,
    /// Beam center frequencies (rad/fs).
    pub omega1: f64,
    pub omega2: f64,
}

impl PhaseMatching {
    pub fn type_ii(t1: f64, t2: f64, omega1: f64, omega2: f64) -> Result<Self> {
        if !(t2 > t1) {
            return Err(QsError::Contract(format!("PhaseMatching: requires T2 > T1, got T1={t1}, T2={t2}")));
        }
        Ok(Self { kind: PhaseMatchingKind::TypeII, t1, t2, omega1, omega2 })
    }

    pub fn gaussian(t1: f64, t2: f64, omega1: f64, omega2: f64) -> Result<Self> {
        if !(t2 > t1) {
            return Err(QsError::Contract(format!("PhaseMatching: requires T2 > T1, got T1={t1}, T2={t2}")));
        }
        Ok(Self { kind: PhaseMatchingKind::GaussianApprox, t1, t2, omega1, omega2 })
    }

    pub fn type_i(c1: f64, c2: f64, c3: f64, omega1: f64, omega2: f64) -> Self {
        Self { kind: PhaseMatchingKind::TypeI { c1, c2, c3 }, t1: 0.0, t2: 0.0, omega1, omega2 }
    }

    /// Entanglement time `T = T2 - T1`.
    pub fn entanglement_time(&self) -> f64 {
        self.t2 - self.t1
    }

    /// `dk L / 2` for the linear kinds; for type-I the quadratic expansion
    /// (needs the pump center).
    fn dkl_half(&self, wa: f64, wb: f64, pump_center: f64) -> f64 {
        match self.kind {
            PhaseMatchingKind::TypeII | PhaseMatchingKind::GaussianApprox => {
                0.5 * ((wa - self.omega1) * self.t1 + (wb - self.omega2) * self.t2)
            }
            PhaseMatchingKind::TypeI { c1, c2, c3 } => {
                let s = wa + wb - pump_center;
                c1 * s + c2 * s * s
                    - c3 * ((wa - self.omega1).powi(2) + (wb - self.omega2).powi(2))
            }
        }
    }

    /// Phase-matching factor entering the two-photon amplitude.
    pub fn factor(&self, wa: f64, wb: f64, pump_center: f64) -> C64 {
        let x = self.dkl_half(wa, wb, pump_center);
        match self.kind {
            PhaseMatchingKind::TypeII | PhaseMatchingKind::TypeI { .. } => {
                C64::from_polar(sinc(x), x)
            }
            PhaseMatchingKind::GaussianApprox => {
                C64::new((-GAUSSIAN_PM_GAMMA * (2.0 * x) * (2.0 * x)).exp(), 0.0)
            }
        }
    }
}

/// Normalization state of a [`TwoPhotonState`] amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Raw pump-scaled amplitude; grows with pump strength.
    Raw,
    /// Rescaled so the grid integral of |Phi|^2 is one.
    UnitNorm,
}

/// Two-photon joint spectral amplitude with its provenance.
#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    pub amplitude: ComplexGrid2D,
    pub normalization: Normalization,
    pub pump: PumpEnvelope,
    pub pm: PhaseMatching,
}

impl TwoPhotonState {
    pub fn axis_a(&self) -> FrequencyAxis {
        match self.amplitude.axis1 {
            GridAxis::Frequency(a) => a,
            GridAxis::Time(_) => unreachable!("two-photon amplitude always lives on frequency axes"),
        }
    }

    pub fn axis_b(&self) -> FrequencyAxis {
        match self.amplitude.axis2 {
            GridAxis::Frequency(a) => a,
            GridAxis::Time(_) => unreachable!("two-photon amplitude always lives on frequency axes"),
        }
    }

    /// Convert to unit norm, returning the original norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.amplitude.norm_sq().sqrt();
        self.amplitude.normalize();
        self.normalization = Normalization::UnitNorm;
        n
    }
}

/// Build `Phi(wa, wb) = alpha A_p(wa + wb) f_pm(wa, wb)` on the given axes.
///
/// A cw pump (`sigma_p == 0`) is rejected; use [`cw_two_photon_wavefunction`].
pub fn build_two_photon_amplitude(
    pump: PumpEnvelope,
    pm: PhaseMatching,
    axis_a: FrequencyAxis,
    axis_b: FrequencyAxis,
) -> Result<TwoPhotonState> {
    if pump.is_cw() {
        return Err(QsError::WrongConstructor(
            "cw pump (sigma_p = 0): use cw_two_photon_wavefunction".into(),
        ));
    }
    let amplitude = ComplexGrid2D::from_fn(axis_a, axis_b, |wa, wb| {
        pm.factor(wa, wb, pump.center) * (pump.amplitude * pump.value(wa + wb))
    })?;
    Ok(TwoPhotonState { amplitude, normalization: Normalization::Raw, pump, pm })
}

/// Representation choice for the cw wavefunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CwRepresentation {
    /// `(t1, t2)` support form built from rect windows.
    Time(TimeAxis, TimeAxis),
    /// `(wa, wb)` form with the energy constraint as a one-bin ridge of
    /// height `1/dw` on `wa + wb = wp`.
    Frequency(FrequencyAxis, FrequencyAxis),
}

/// Two-photon wavefunction of a cw-pumped type-II source, normalized to a
/// unit grid norm.
pub fn cw_two_photon_wavefunction(
    pm: PhaseMatching,
    pump_center: f64,
    representation: CwRepresentation,
) -> Result<ComplexGrid2D> {
    if !matches!(pm.kind, PhaseMatchingKind::TypeII) {
        return Err(QsError::Contract("cw_two_photon_wavefunction: requires type-II phase matching".into()));
    }
    let t_ent = pm.entanglement_time();
    let mut grid = match representation {
        CwRepresentation::Time(ax1, ax2) => {
            // rect((t2 - t1)/T) e^{-i(w1 t1 + w2 t2)} + (t1 <-> t2)
            ComplexGrid2D::from_fn(ax1, ax2, |t1, t2| {
                let mut v = C64::new(0.0, 0.0);
                let x12 = (t2 - t1) / t_ent;
                if (0.0..=1.0).contains(&x12) {
                    v += C64::from_polar(1.0, -(pm.omega1 * t1 + pm.omega2 * t2));
                }
                let x21 = (t1 - t2) / t_ent;
                if (0.0..=1.0).contains(&x21) {
                    v += C64::from_polar(1.0, -(pm.omega2 * t1 + pm.omega1 * t2));
                }
                v
            })?
        }
        CwRepresentation::Frequency(ax1, ax2) => {
            let dw = ax2.step();
            ComplexGrid2D::from_fn(ax1, ax2, |wa, wb| {
                if (wa + wb - pump_center).abs() > 0.5 * dw {
                    return C64::new(0.0, 0.0);
                }
                let xa = (pm.omega1 - wa) * t_ent / 2.0;
                let xb = (pm.omega1 - wb) * t_ent / 2.0;
                (C64::from_polar(sinc(xa), xa) + C64::from_polar(sinc(xb), xb)) / dw
            })?
        }
    };
    grid.normalize();
    Ok(grid)
}

/// Ordered Schmidt spectrum plus sampled mode functions.
///
/// `r` holds the full singular-value ladder (descending) so that the
/// normalized weights `lambda` sum to one exactly; mode functions are stored
/// only for the `retained` leading modes above the cutoff.
#[derive(Debug, Clone)]
pub struct SchmidtModes {
    /// Continuum-normalized mode weights r_k, descending, full ladder.
    pub r: Vec<f64>,
    /// `lambda_k = r_k / sqrt(sum r^2)`; `sum lambda^2 == 1`.
    pub lambda: Vec<f64>,
    /// Retained mode functions on `axis_a` / `axis_b`, unit L2 norm in the
    /// continuum measure. `Phi ~ sum_k r_k psi_k^*(wa) phi_k^*(wb)`.
    pub psi: Vec<Vec<C64>>,
    pub phi: Vec<Vec<C64>>,
    pub axis_a: FrequencyAxis,
    pub axis_b: FrequencyAxis,
    pub retained: usize,
}

impl SchmidtModes {
    /// Checks the stored weights are a normalized Schmidt spectrum.
    pub fn check_normalized(&self) -> Result<()> {
        let s: f64 = self.lambda.iter().map(|l| l * l).sum();
        if (s - 1.0).abs() > 1e-8 {
            return Err(QsError::Contract(format!(
                "SchmidtModes: sum lambda^2 = {s}, expected 1"
            )));
        }
        Ok(())
    }

    /// Rescale every r_k by `s` (pump-amplitude scaling); lambda unchanged.
    pub fn scaled(&self, s: f64) -> SchmidtModes {
        let mut out = self.clone();
        for r in &mut out.r {
            *r *= s;
        }
        out
    }
}

/// Decomposition route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchmidtMethod {
    /// SVD of the sampled amplitude.
    Numeric,
    /// Closed-form bipartite-Gaussian decomposition; requires a Gaussian
    /// pump and [`PhaseMatchingKind::GaussianApprox`].
    AnalyticGaussian,
}

/// Default cutoff on normalized weights: modes with `lambda^2` below this
/// carry no mode functions.
pub const DEFAULT_SCHMIDT_CUTOFF: f64 = 1e-6;

/// Parameters of the analytic bipartite-Gaussian decomposition.
#[derive(Debug, Clone, Copy)]
pub struct GaussianSchmidt {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mu: f64,
    pub k1: f64,
    pub k2: f64,
    /// `r_n = r0 * |mu|^n`.
    pub r0: f64,
}

/// Closed-form Schmidt parameters of
/// `alpha A_p(wa + wb) exp(-gamma (dk L)^2)` with a Gaussian pump:
/// the kernel is `exp(-a x^2 - 2 b x y - c y^2)` in the detunings
/// `x = wa - w1`, `y = wb - w2`, and the mode weights form a geometric
/// ladder `r_n = r0 mu^n`.
pub fn gaussian_schmidt_params(pump: &PumpEnvelope, pm: &PhaseMatching) -> Result<GaussianSchmidt> {
    if !matches!(pm.kind, PhaseMatchingKind::GaussianApprox) {
        return Err(QsError::Capability(
            "analytic Schmidt decomposition requires GaussianApprox phase matching".into(),
        ));
    }
    if pump.is_cw() {
        return Err(QsError::Capability("analytic Schmidt decomposition requires a pulsed Gaussian pump".into()));
    }
    let s2 = pump.bandwidth * pump.bandwidth;
    let g = GAUSSIAN_PM_GAMMA;
    let a = 1.0 / (2.0 * s2) + g * pm.t1 * pm.t1;
    let b = 1.0 / (2.0 * s2) + g * pm.t1 * pm.t2;
    let c = 1.0 / (2.0 * s2) + g * pm.t2 * pm.t2;
    let det = a * c - b * b;
    if det < 0.0 {
        return Err(QsError::Contract("gaussian_schmidt_params: kernel not positive definite".into()));
    }
    let mu = if b.abs() < 1e-300 { 0.0 } else { (det.sqrt() - (a * c).sqrt()) / b };
    let mu2 = mu * mu;
    let k1 = (2.0 * a * (1.0 - mu2) / (1.0 + mu2)).sqrt();
    let k2 = (2.0 * c * (1.0 - mu2) / (1.0 + mu2)).sqrt();
    // From Mehler's kernel: prefactor of the geometric ladder. The pump
    // normalization 1/sqrt(2 pi sigma^2) is part of the amplitude.
    let r0 = pump.amplitude.abs() / (2.0 * PI * s2).sqrt() * (PI * (1.0 - mu2)).sqrt() / (k1 * k2).sqrt();
    Ok(GaussianSchmidt { a, b, c, mu, k1, k2, r0 })
}

/// Entanglement entropy of the geometric ladder `lambda_n^2 = (1 - mu^2) mu^{2n}`.
pub fn gaussian_schmidt_entropy(mu: f64) -> f64 {
    let m2 = mu * mu;
    if m2 <= 0.0 {
        return 0.0;
    }
    -(1.0 - m2).ln() - m2 * m2.ln() / (1.0 - m2)
}

/// Schmidt-decompose a two-photon state.
pub fn schmidt_decompose(
    state: &TwoPhotonState,
    method: SchmidtMethod,
    cutoff: f64,
) -> Result<SchmidtModes> {
    let axis_a = state.axis_a();
    let axis_b = state.axis_b();
    match method {
        SchmidtMethod::Numeric => {
            let svd = svd_matrix(&state.amplitude.values)?;
            let cell = (axis_a.step() * axis_b.step()).sqrt();
            let r: Vec<f64> = svd.singular_values.iter().map(|s| s * cell).collect();
            let total: f64 = r.iter().map(|x| x * x).sum();
            let lambda: Vec<f64> = r.iter().map(|x| x / total.sqrt()).collect();
            let retained = lambda.iter().take_while(|l| l.powi(2) >= cutoff).count().max(1);
            // Phi = U S V^dagger => Phi(wa, wb) = sum s_k u_k(wa) v_k^*(wb),
            // so psi_k = u_k^*, phi_k = v_k in Phi = sum r psi^* phi^*.
            let sa = axis_a.step().sqrt();
            let sb = axis_b.step().sqrt();
            let mut psi = Vec::with_capacity(retained);
            let mut phi = Vec::with_capacity(retained);
            for k in 0..retained {
                psi.push((0..axis_a.count()).map(|i| svd.u[(i, k)].conj() / sa).collect());
                phi.push((0..axis_b.count()).map(|j| svd.v[(j, k)] / sb).collect());
            }
            Ok(SchmidtModes { r, lambda, psi, phi, axis_a, axis_b, retained })
        }
        SchmidtMethod::AnalyticGaussian => {
            let p = gaussian_schmidt_params(&state.pump, &state.pm)?;
            let mu_abs = p.mu.abs();
            // keep the ladder down to the same relative depth the numeric
            // route would report
            let n_modes = if mu_abs < 1e-12 {
                1
            } else {
                ((0.5 * cutoff.ln() / mu_abs.ln()).ceil() as usize + 2)
                    .max(24)
                    .min(axis_a.count().min(axis_b.count()))
            };
            let r: Vec<f64> = (0..n_modes).map(|n| p.r0 * mu_abs.powi(n as i32)).collect();
            let total: f64 = if mu_abs < 1.0 {
                p.r0 * p.r0 / (1.0 - mu_abs * mu_abs)
            } else {
                r.iter().map(|x| x * x).sum()
            };
            let lambda: Vec<f64> = r.iter().map(|x| x / total.sqrt()).collect();
            let retained = lambda.iter().take_while(|l| l.powi(2) >= cutoff).count().max(1);
            let sign = p.mu.signum();
            let mut psi = Vec::with_capacity(retained);
            let mut phi = Vec::with_capacity(retained);
            for n in 0..retained {
                // Phi = sum_n r0 mu^n f_n(k1 x) f_n(k2 y) with real orthonormal
                // Hermite functions; the sign of mu^n is carried by phi.
                let psi_n: Vec<C64> = axis_a
                    .iter()
                    .map(|w| hermite_function(n, p.k1, w - state.pm.omega1).map(|h| h.conj()))
                    .collect::<Result<_>>()?;
                let sgn = sign.powi(n as i32);
                let phase = C64::from_polar(1.0, 3.0 * PI / 8.0);
                let phi_n: Vec<C64> = axis_b
                    .iter()
                    .map(|w| {
                        hermite_function(n, p.k2, w - state.pm.omega2)
                            // conj undoes psi's fixed phase so psi^* phi^* is real
                            .map(|h| (h * phase * phase).conj() * sgn)
                    })
                    .collect::<Result<_>>()?;
                psi.push(psi_n);
                phi.push(phi_n);
            }
            Ok(SchmidtModes { r, lambda, psi, phi, axis_a, axis_b, retained })
        }
    }
}

/// `E = -sum lambda_k^2 ln lambda_k^2`.
pub fn entanglement_entropy(modes: &SchmidtModes) -> Result<f64> {
    modes.check_normalized()?;
    Ok(entropy_of_weights(&modes.lambda))
}

/// Entropy of an explicit normalized weight list.
pub fn entropy_of_weights(lambda: &[f64]) -> f64 {
    lambda
        .iter()
        .map(|l| {
            let p = l * l;
            if p > 0.0 {
                -p * p.ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Mean photon number per beam, `nbar = sum_k sinh^2 r_k`.
pub fn mean_photon_number(modes: &SchmidtModes) -> f64 {
    modes.r.iter().map(|r| r.sinh().powi(2)).sum()
}

/// Multimode field correlators of the squeezed output state, sampled on the
/// common mode axis.
#[derive(Debug, Clone)]
pub struct FieldCorrelators {
    pub axis: FrequencyAxis,
    /// `h12(wa, wb) = sum_k cosh(r_k) sinh(r_k) psi_k(wa) phi_k(wb)`.
    pub h12: Array2<C64>,
    /// `h21(wa, wb) = h12` with the beam roles swapped.
    pub h21: Array2<C64>,
    /// `g1(w, w') = sum_k sinh^2(r_k) psi_k(w) psi_k^*(w')`.
    pub g1: Array2<C64>,
    pub g2: Array2<C64>,
    /// `h12 + h21` (pair part as seen by the total field E = E1 + E2).
    pub pair: Array2<C64>,
    /// `g1 + g2` (autocorrelation part of the total field).
    pub auto: Array2<C64>,
}

impl FieldCorrelators {
    /// `<E^dag(wa') E^dag(wb') E(wb) E(wa)>` by grid indices.
    pub fn four_point(&self, ia_p: usize, ib_p: usize, ib: usize, ia: usize) -> C64 {
        self.pair[(ia_p, ib_p)].conj() * self.pair[(ia, ib)]
            + self.auto[(ia, ia_p)] * self.auto[(ib, ib_p)]
            + self.auto[(ia, ib_p)] * self.auto[(ib, ia_p)]
    }

    /// Same by physical frequencies (nearest grid sample).
    pub fn four_point_at(&self, wa_p: f64, wb_p: f64, wb: f64, wa: f64) -> C64 {
        let i = |w: f64| self.axis.nearest_index(w);
        self.four_point(i(wa_p), i(wb_p), i(wb), i(wa))
    }
}

/// Assemble h12/g1/g2 and the four-point evaluator from Schmidt modes.
/// Both beams must share one frequency axis.
pub fn field_correlators(modes: &SchmidtModes) -> Result<FieldCorrelators> {
    if modes.axis_a != modes.axis_b {
        return Err(QsError::Contract(
            "field_correlators: both beams must be sampled on a common frequency axis".into(),
        ));
    }
    let axis = modes.axis_a;
    let n = axis.count();
    let mut h12 = Array2::<C64>::zeros((n, n));
    let mut g1 = Array2::<C64>::zeros((n, n));
    let mut g2 = Array2::<C64>::zeros((n, n));
    for k in 0..modes.retained {
        let r = modes.r[k];
        let cs = r.cosh() * r.sinh();
        let s2 = r.sinh().powi(2);
        let psi = &modes.psi[k];
        let phi = &modes.phi[k];
        for i in 0..n {
            for j in 0..n {
                h12[(i, j)] += cs * psi[i] * phi[j];
                g1[(i, j)] += s2 * psi[i] * psi[j].conj();
                g2[(i, j)] += s2 * phi[i] * phi[j].conj();
            }
        }
    }
    let h21 = Array2::from_shape_fn((n, n), |(i, j)| h12[(j, i)]);
    let pair = &h12 + &h21;
    let auto = &g1 + &g2;
    Ok(FieldCorrelators { axis, h12, h21, g1, g2, pair, auto })
}

/// Which photon the delay stage acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    One,
    Two,
}

/// Apply a delay/phase mask `e^{i w tau + i phase}` on one arm. Unitary, so
/// the norm is preserved exactly.
pub fn apply_delay_phase(state: &TwoPhotonState, arm: Arm, tau: f64, phase: f64) -> TwoPhotonState {
    let mut out = state.clone();
    let (n1, n2) = out.amplitude.values.dim();
    match arm {
        Arm::One => {
            for i in 0..n1 {
                let w = out.amplitude.axis1.at(i);
                let m = C64::from_polar(1.0, w * tau + phase);
                for j in 0..n2 {
                    out.amplitude.values[(i, j)] *= m;
                }
            }
        }
        Arm::Two => {
            for j in 0..n2 {
                let w = out.amplitude.axis2.at(j);
                let m = C64::from_polar(1.0, w * tau + phase);
                for i in 0..n1 {
                    out.amplitude.values[(i, j)] *= m;
                }
            }
        }
    }
    out
}

/// Axis sized to the Gaussian amplitude support: centered per beam, spanning
/// `n_sigma` marginal standard deviations of |Phi|^2.
pub fn gaussian_support_axes(
    pump: &PumpEnvelope,
    pm: &PhaseMatching,
    n_sigma: f64,
    count: usize,
) -> Result<(FrequencyAxis, FrequencyAxis)> {
    let p = gaussian_schmidt_params(pump, pm)?;
    let det = p.a * p.c - p.b * p.b;
    let std_a = (p.c / (4.0 * det)).sqrt();
    let std_b = (p.a / (4.0 * det)).sqrt();
    Ok((
        FrequencyAxis::centered(pm.omega1, n_sigma * std_a, count)?,
        FrequencyAxis::centered(pm.omega2, n_sigma * std_b, count)?,
    ))
}

/// Correlation coefficient of |Phi|^2 between the two frequency axes.
pub fn frequency_correlation(state: &TwoPhotonState) -> f64 {
    let g = &state.amplitude;
    let (n1, n2) = g.values.dim();
    let mut w_sum = 0.0;
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n1 {
        for j in 0..n2 {
            let w = g.values[(i, j)].norm_sqr();
            w_sum += w;
            mx += w * g.axis1.at(i);
            my += w * g.axis2.at(j);
        }
    }
    mx /= w_sum;
    my /= w_sum;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for i in 0..n1 {
        for j in 0..n2 {
            let w = g.values[(i, j)].norm_sqr();
            let dx = g.axis1.at(i) - mx;
            let dy = g.axis2.at(j) - my;
            sxx += w * dx * dx;
            syy += w * dy * dy;
            sxy += w * dx * dy;
        }
    }
    sxy / (sxx * syy).sqrt()
}
