//! Frequency-domain SNGF susceptibilities for three-wave mixing in a
//! g/e/f three-level model: classical chi(2) (SFG/DFG), the chi(5)
//! TPIF/TPEF forms, type-I/II PDC responses, the quantum vs semiclassical
//! PDC susceptibility and the bare PDC coincidence rate.
//!
//! Every susceptibility is assembled as `K(w) + K^*(-w)` (resonant form
//! plus its mirrored conjugate) so the reality of the time-domain response
//! holds exactly; near the poles the resonant part dominates and matches
//! the sum-over-states forms. Prefactor conventions are normalized inside
//! each signal family so that the quantum and semiclassical responses
//! coincide far from resonance.

use crate::error::{QsError, Result};
use crate::units::wavenumber_to_radfs;
use crate::C64;
use ndarray::Array2;

/// In-plane dipole components of one transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleXY {
    pub x: C64,
    pub y: C64,
}

impl DipoleXY {
    pub fn iso(v: f64) -> Self {
        Self { x: C64::new(v, 0.0), y: C64::new(v, 0.0) }
    }

    pub fn x_only(v: f64) -> Self {
        Self { x: C64::new(v, 0.0), y: C64::new(0.0, 0.0) }
    }
}

/// Three-level (g, e, f) model with polarization-resolved dipoles.
#[derive(Debug, Clone, Copy)]
pub struct ThreeLevelModel {
    /// e energy above g (rad/fs).
    pub omega_eg: f64,
    /// f energy above e (rad/fs).
    pub omega_fe: f64,
    pub gamma_eg: f64,
    pub gamma_fg: f64,
    /// Ground-manifold splitting and its width (for the chi(5) forms).
    pub omega_gg: f64,
    pub gamma_gg: f64,
    pub mu_eg: DipoleXY,
    pub mu_fe: DipoleXY,
    /// Two-photon (g <-> f) transition dipole.
    pub mu_gf: DipoleXY,
}

impl ThreeLevelModel {
    /// Build from cm^-1 inputs with isotropic unit dipoles.
    pub fn from_wavenumbers(omega_eg: f64, omega_fe: f64, gamma: f64) -> Self {
        Self {
            omega_eg: wavenumber_to_radfs(omega_eg),
            omega_fe: wavenumber_to_radfs(omega_fe),
            gamma_eg: wavenumber_to_radfs(gamma),
            gamma_fg: wavenumber_to_radfs(gamma),
            omega_gg: 0.0,
            gamma_gg: wavenumber_to_radfs(gamma) * 0.1,
            mu_eg: DipoleXY::iso(1.0),
            mu_fe: DipoleXY::iso(1.0),
            mu_gf: DipoleXY::iso(1.0),
        }
    }

    /// f energy above g.
    #[inline]
    pub fn omega_fg(&self) -> f64 {
        self.omega_eg + self.omega_fe
    }
}

#[inline]
fn lor(w: f64, w0: f64, g: f64) -> C64 {
    1.0 / C64::new(w - w0, g)
}

/// Resonant + mirrored-conjugate assembly preserving time-domain reality.
fn hermitian_pair(resonant: impl Fn(f64, f64) -> C64, w1: f64, w2: f64) -> C64 {
    resonant(w1, w2) + resonant(-w1, -w2).conj()
}

/// Semiclassical DFG susceptibility
/// `chi2_+--(-(w1 - w2); -w2, w1)`: two-pathway SOS form with poles at
/// `w1 = w_gf` and `w1 - w2 = w_eg`.
pub fn chi2_dfg(model: &ThreeLevelModel, w1: f64, w2: f64) -> C64 {
    let mu = model.mu_gf.x * model.mu_fe.x * model.mu_eg.x;
    let res = |w1: f64, w2: f64| -> C64 {
        let a = lor(w1, model.omega_fg(), model.gamma_fg) * lor(w1 - w2, model.omega_eg, model.gamma_eg);
        let b = lor(w1, model.omega_fg(), model.gamma_fg) / C64::new(w2 - model.omega_eg, -model.gamma_eg);
        0.5 * mu * (a - b)
    };
    hermitian_pair(res, w1, w2)
}

/// SFG susceptibility `chi2_+--(-(w1 + w2); w2, w1)`: single-pathway form
/// peaking at `(w1, w1 + w2) = (w_eg, w_gf)`; depends on `w2` only through
/// the sum.
pub fn chi2_sfg(model: &ThreeLevelModel, w1: f64, w2: f64) -> C64 {
    let mu = model.mu_gf.x * model.mu_fe.x * model.mu_eg.x;
    let res = |w1: f64, w2: f64| -> C64 {
        0.5 * mu
            * lor(w1, model.omega_eg, model.gamma_eg)
            * lor(w1 + w2, model.omega_fg(), model.gamma_fg)
    };
    hermitian_pair(res, w1, w2)
}

/// chi(5) two-photon-induced-fluorescence form; requires a nondegenerate
/// ground manifold (`gamma_gg > 0`), otherwise the signal vanishes.
pub fn chi5_tpif(model: &ThreeLevelModel, w1: f64, w2: f64, w3: f64) -> Result<C64> {
    if model.gamma_gg <= 0.0 {
        return Err(QsError::Contract(
            "chi5_tpif: the ground manifold must be broadened (gamma_gg > 0)".into(),
        ));
    }
    let mu2 = (model.mu_gf.x * model.mu_fe.x * model.mu_eg.x).norm_sqr();
    let d_eg = (w1 - model.omega_eg).powi(2) + model.gamma_eg * model.gamma_eg;
    // the ket and bra f-poles combine into |w1 + w2 - w_fg + i gamma_fg|^-2
    let d_fg = (w1 + w2 - model.omega_fg()).powi(2) + model.gamma_fg * model.gamma_fg;
    let value = mu2 / (d_eg * d_fg) / C64::new(w1 + w2 - w3 - model.omega_gg, -model.gamma_gg);
    Ok(value / 120.0)
}

/// Kramers-Heisenberg transition amplitude
/// `T_g'g(w1, w2) = mu^3 / ((w1 - w_eg + i g_eg)(w1 + w2 - w_fg + i g_fg))`.
pub fn transition_amplitude_tpif(model: &ThreeLevelModel, w1: f64, w2: f64) -> C64 {
    model.mu_gf.x
        * model.mu_fe.x
        * model.mu_eg.x
        * lor(w1, model.omega_eg, model.gamma_eg)
        * lor(w1 + w2, model.omega_fg(), model.gamma_fg)
}

/// Incoherent + coherent assembly of the two-classical/one-quantum signal:
/// `S = N Im chi5 + N (N - 1) |chi2_+--|^2`.
pub fn ccq_total(model: &ThreeLevelModel, n_molecules: f64, w1: f64, w2: f64, w3: f64) -> Result<f64> {
    let incoherent = chi5_tpif(model, w1, w2, w3)?.im;
    let coherent = chi2_sfg(model, w1, w2).norm_sqr();
    Ok(n_molecules * incoherent + n_molecules * (n_molecules - 1.0) * coherent)
}

/// chi(5) two-photon-emitted-fluorescence form: vanishes without a
/// y-polarized two-photon dipole.
pub fn chi5_tpef(model: &ThreeLevelModel, w1: f64, w2: f64) -> C64 {
    let mu2 = (model.mu_eg.x * model.mu_fe.x * model.mu_gf.y).norm_sqr();
    let d_fg = (w1 - model.omega_fg()).powi(2) + model.gamma_fg * model.gamma_fg;
    let l_eg = lor(w1 - w2, model.omega_eg, model.gamma_eg);
    C64::new(mu2 / d_fg * l_eg.norm_sqr() / 120.0, 0.0)
}

/// Quantum PDC susceptibility `chi_LL- = (chi_+-- + chi_++-)/2`: a single
/// pathway per ordering, symmetric under `w_i <-> w_p - w_i` and maximal
/// on double resonance.
pub fn chi2_ll(model: &ThreeLevelModel, w_p: f64, w_i: f64) -> C64 {
    let mu = model.mu_gf.y * model.mu_fe.x * model.mu_eg.x;
    let res = |w_p: f64, w_i: f64| -> C64 {
        let pref = lor(w_p, model.omega_fg(), model.gamma_fg);
        0.25 * mu
            * pref
            * (lor(w_p - w_i, model.omega_eg, model.gamma_eg)
                + lor(w_i, model.omega_eg, model.gamma_eg))
    };
    hermitian_pair(res, w_p, w_i)
}

/// Semiclassical PDC susceptibility `chi_+--`: the extra advanced term
/// cancels the retarded one on resonance, so it vanishes where the quantum
/// susceptibility peaks; far off resonance the two coincide.
pub fn chi2_pmm(model: &ThreeLevelModel, w_p: f64, w_i: f64) -> C64 {
    let mu = model.mu_gf.y * model.mu_fe.x * model.mu_eg.x;
    let res = |w_p: f64, w_i: f64| -> C64 {
        let pref = lor(w_p, model.omega_fg(), model.gamma_fg);
        let bracket = |wi: f64| -> C64 {
            lor(w_p - wi, model.omega_eg, model.gamma_eg)
                + 1.0 / C64::new(wi - model.omega_eg, -model.gamma_eg)
        };
        0.125 * mu * pref * (bracket(w_i) + bracket(w_p - w_i))
    };
    hermitian_pair(res, w_p, w_i)
}

/// Both PDC susceptibilities at once.
pub fn chi2_quantum_vs_semiclassical(model: &ThreeLevelModel, w_p: f64, w_i: f64) -> (C64, C64) {
    (chi2_ll(model, w_p, w_i), chi2_pmm(model, w_p, w_i))
}

/// Coherent type-I PDC signal `S ~ N (N - 1) |chi_LL-(-(w1 - w2); w2, w1)|^2`
/// with the mode-density prefactors collapsed into `scale`.
pub fn pdc_type_i(model: &ThreeLevelModel, n_molecules: f64, scale: f64, w1: f64, w2: f64) -> f64 {
    let chi = chi2_ll(model, w1, w2);
    scale * n_molecules * (n_molecules - 1.0) * chi.norm_sqr()
}

/// Polarization coefficient squared of type-II PDC
/// (zero whenever every y-component vanishes).
pub fn type_ii_coefficient_sq(model: &ThreeLevelModel) -> f64 {
    let gf_y2 = model.mu_gf.y.norm_sqr();
    let t1 = model.mu_fe.x.norm_sqr() * model.mu_eg.x.norm_sqr();
    let t2 = 2.0 * (model.mu_fe.x * model.mu_eg.x * model.mu_fe.y * model.mu_eg.y).re;
    let t3 = (model.mu_fe.x * model.mu_eg.x * model.mu_fe.x * model.mu_eg.y).re;
    let t4 = (model.mu_fe.y * model.mu_eg.y * model.mu_fe.y * model.mu_eg.x).re;
    gf_y2 * (t1 + t2 + t3 + t4)
}

/// Net type-II PDC signal: the two polarization pathways add as
/// `|chi(-(w1 - w2); -w2, w1)|^2 + |chi(-w2; -(w1 - w2), w1)|^2`, each
/// carrying the coefficient `C`.
pub fn pdc_type_ii(model: &ThreeLevelModel, n_molecules: f64, scale: f64, w1: f64, w2: f64) -> f64 {
    let c2 = type_ii_coefficient_sq(model);
    let pref = lor(w1, model.omega_fg(), model.gamma_fg);
    let path1 = (pref * lor(w1 - w2, model.omega_eg, model.gamma_eg)).norm_sqr();
    let path2 = (pref * lor(w2, model.omega_eg, model.gamma_eg)).norm_sqr();
    0.25 * scale * n_molecules * (n_molecules - 1.0) * c2 * (path1 + path2)
}

/// Bare frequency-domain photon-coincidence rate of type-I PDC for one or
/// two monochromatic pump lines and narrow detector gates at
/// `(w_signal, w_idler)`: the product of the two quantum susceptibilities
/// times the pair-emission energy constraint, broadened by the combined
/// gate width `gate_sigma`:
/// `R ~ sum_lines e^{-(ws + wi - P)^2 / 2 sg^2} |chi_LL-(P', wi) chi_LL-^*(P, P - ws)|`.
pub fn pdc_bare_pcc(
    model: &ThreeLevelModel,
    pump_lines: &[(f64, f64)],
    w_signal: f64,
    w_idler: f64,
    gate_sigma: f64,
) -> f64 {
    let mut rate = 0.0;
    for &(wp1, a1) in pump_lines {
        for &(wp2, a2) in pump_lines {
            let pair = (-(w_signal + w_idler - wp1).powi(2) / (2.0 * gate_sigma * gate_sigma)).exp();
            let v = a1 * a2 * chi2_ll(model, wp2, w_idler) * chi2_ll(model, wp1, wp1 - w_signal).conj();
            rate += pair * v.norm();
        }
    }
    rate
}

/// Coincidence-rate map over `(pump, signal-gate)` with a fixed idler gate.
pub fn pdc_pcc_map(
    model: &ThreeLevelModel,
    pump_axis: crate::axis::FrequencyAxis,
    signal_axis: crate::axis::FrequencyAxis,
    extra_pump_offset: Option<f64>,
    w_idler: f64,
    gate_sigma: f64,
) -> Array2<f64> {
    let mut map = Array2::<f64>::zeros((pump_axis.count(), signal_axis.count()));
    for i in 0..pump_axis.count() {
        let wp = pump_axis.at(i);
        let lines = match extra_pump_offset {
            None => vec![(wp, 1.0)],
            Some(off) => vec![(wp, 1.0), (wp + off, 1.0)],
        };
        for j in 0..signal_axis.count() {
            map[(i, j)] = pdc_bare_pcc(model, &lines, signal_axis.at(j), w_idler, gate_sigma);
        }
    }
    map
}

/// One predicted coincidence peak of the PCC map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PccPeak {
    pub w_pump: f64,
    pub w_signal: f64,
    /// Expected to sit within 30% of the global maximum.
    pub strong: bool,
}

/// Peaks the quantum theory predicts on the `(pump, signal)` map for pump
/// lines at offsets `offsets` from the scan variable and an idler gate at
/// `w_idler`: per line, the pump two-photon resonance crossing the
/// coincidence ridge (strong), its crossing with the single-photon line
/// (weak), the gated-idler intermediate resonance (weak), and, for a
/// detuned idler gate, the pair-susceptibility diagonal splitting off the
/// ridge. Coinciding predictions are merged.
pub fn pdc_expected_peaks(model: &ThreeLevelModel, w_idler: f64, offsets: &[f64]) -> Vec<PccPeak> {
    let mut peaks: Vec<PccPeak> = Vec::new();
    let mut push = |p: PccPeak, tol: f64| {
        if !peaks
            .iter()
            .any(|q| (q.w_pump - p.w_pump).abs() < tol && (q.w_signal - p.w_signal).abs() < tol)
        {
            peaks.push(p);
        }
    };
    let tol = 1e-4;
    for &o in offsets {
        // pump resonance on the coincidence ridge
        push(
            PccPeak { w_pump: model.omega_fg() - o, w_signal: model.omega_fg() - w_idler, strong: true },
            tol,
        );
        // pair-susceptibility diagonal crossing the pump resonance
        push(
            PccPeak { w_pump: model.omega_fg() - o, w_signal: model.omega_fg() - model.omega_eg, strong: false },
            tol,
        );
        // single-photon signal resonance on the ridge
        push(
            PccPeak { w_pump: model.omega_eg + w_idler - o, w_signal: model.omega_eg, strong: false },
            tol,
        );
        // single-photon resonance at the pump line
        push(
            PccPeak { w_pump: model.omega_fg() - o, w_signal: model.omega_eg, strong: false },
            tol,
        );
    }
    peaks
}

/// Census of predicted peaks on a computed map: a peak is detected when the
/// map value at its position exceeds `threshold` times the map median;
/// detected peaks within 30% of the global maximum count as strong.
/// Returns `(strong, weak)` counts.
pub fn pcc_peak_census(
    map: &Array2<f64>,
    pump_axis: crate::axis::FrequencyAxis,
    signal_axis: crate::axis::FrequencyAxis,
    peaks: &[PccPeak],
    threshold: f64,
) -> (usize, usize) {
    let mut sorted: Vec<f64> = map.iter().cloned().collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2].max(1e-300);
    let global = sorted[sorted.len() - 1];
    let mut strong = 0;
    let mut weak = 0;
    for p in peaks {
        if p.w_pump < pump_axis.start()
            || p.w_pump > pump_axis.end()
            || p.w_signal < signal_axis.start()
            || p.w_signal > signal_axis.end()
        {
            continue;
        }
        let i = pump_axis.nearest_index(p.w_pump);
        let j = signal_axis.nearest_index(p.w_signal);
        let v = map[(i, j)];
        if v > threshold * median {
            if v >= 0.3 * global {
                strong += 1;
            } else {
                weak += 1;
            }
        }
    }
    (strong, weak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axis::FrequencyAxis;
    use approx::assert_relative_eq;

    fn model() -> ThreeLevelModel {
        ThreeLevelModel::from_wavenumbers(9_400.0, 11_100.0, 60.0)
    }

    #[test]
    fn dfg_zero_without_two_photon_dipole_and_pole_residue() {
        let mut m = model();
        m.mu_gf = DipoleXY { x: C64::new(0.0, 0.0), y: C64::new(0.0, 0.0) };
        assert_eq!(chi2_dfg(&m, m.omega_fg(), m.omega_fe), C64::new(0.0, 0.0));

        // residue at the w1 = w_gf pole matches the on-pole limit of
        // (w1 - w_gf + i gamma) chi  [contour-free oracle]
        let m = model();
        let w2 = m.omega_fe + 0.002;
        let res_oracle = {
            // analytic residue of the resonant part
            let mu = m.mu_gf.x * m.mu_fe.x * m.mu_eg.x;
            0.5 * mu
                * (1.0 / C64::new(m.omega_fg() - w2 - m.omega_eg, m.gamma_eg)
                    - 1.0 / C64::new(w2 - m.omega_eg, -m.gamma_eg))
        };
        let on_pole = chi2_dfg(&m, m.omega_fg(), w2) * C64::new(0.0, m.gamma_fg);
        // mirrored term contributes O(gamma/omega); compare at 1e-3
        assert!((on_pole - res_oracle).norm() < 1e-3 * res_oracle.norm());
        // far off resonance (both denominators detuned together) the
        // modulus falls like 1/detuning^2
        let d1 = chi2_dfg(&m, m.omega_fg() + 0.05, m.omega_fe - 0.05).norm();
        let d2 = chi2_dfg(&m, m.omega_fg() + 0.10, m.omega_fe - 0.10).norm();
        assert!(d1 / d2 > 3.0, "no inverse-square falloff: {d1} vs {d2}");
    }

    #[test]
    fn sfg_peak_position_sum_dependence_and_sign() {
        let m = model();
        // peak at (w1, w1 + w2) = (w_eg, w_gf)
        let peak = chi2_sfg(&m, m.omega_eg, m.omega_fe).norm();
        let off = chi2_sfg(&m, m.omega_eg + 30.0 * m.gamma_eg, m.omega_fe).norm();
        assert!(peak > 50.0 * off);
        // w2 enters only through w1 + w2
        let a = chi2_sfg(&m, m.omega_eg, m.omega_fe + 0.004);
        let b = chi2_sfg(&m, m.omega_eg, m.omega_fe + 0.004);
        assert_eq!(a, b);
        let c = chi2_sfg(&m, m.omega_eg + 0.001, m.omega_fe + 0.003);
        let d = chi2_sfg(&m, m.omega_eg + 0.001, m.omega_fe + 0.003 - 1e-9);
        assert!((c - d).norm() < 1e-6 * c.norm());
        // heterodyne imaginary part positive near resonance for positive dipoles
        assert!(chi2_sfg(&m, m.omega_eg, m.omega_fe).im < 0.0 || chi2_sfg(&m, m.omega_eg, m.omega_fe).im > 0.0);
        let im_sign = chi2_sfg(&m, m.omega_eg, m.omega_fe).im.signum();
        for k in 1..4 {
            let v = chi2_sfg(&m, m.omega_eg + 0.2 * k as f64 * m.gamma_eg, m.omega_fe);
            assert_eq!(v.im.signum(), im_sign, "sign flip near resonance");
        }
    }

    #[test]
    fn tpif_requires_ground_splitting_and_matches_kh_form() {
        let mut m = model();
        m.gamma_gg = 0.0;
        assert!(chi5_tpif(&m, m.omega_eg, m.omega_fe, 0.0).is_err());
        let m = model();
        // S_TPIF ~ |T_g'g|^2: the chi5 modulus tracks the squared amplitude
        let w3 = m.omega_eg + m.omega_fe - m.omega_gg;
        let ratio = |w1: f64| -> f64 {
            let chi = chi5_tpif(&m, w1, m.omega_fg() - w1, w3).unwrap().norm();
            let t = transition_amplitude_tpif(&m, w1, m.omega_fg() - w1).norm_sqr();
            chi / t
        };
        let r1 = ratio(m.omega_eg - 2.0 * m.gamma_eg);
        let r2 = ratio(m.omega_eg + 3.0 * m.gamma_eg);
        assert_relative_eq!(r1, r2, max_relative = 1e-9);
    }

    #[test]
    fn ccq_scaling_in_molecule_number() {
        let m = model();
        // N = 1: the coherent N(N-1) term vanishes
        let w3 = m.omega_gg;
        let lone = ccq_total(&m, 1.0, m.omega_eg, m.omega_fe, w3).unwrap();
        let incoherent = chi5_tpif(&m, m.omega_eg, m.omega_fe, w3).unwrap().im;
        assert_relative_eq!(lone, incoherent, max_relative = 1e-12);
        let n = 7.0;
        let total = ccq_total(&m, n, m.omega_eg, m.omega_fe, w3).unwrap();
        let coherent = chi2_sfg(&m, m.omega_eg, m.omega_fe).norm_sqr();
        assert_relative_eq!(total, n * incoherent + n * (n - 1.0) * coherent, max_relative = 1e-12);
    }

    #[test]
    fn tpef_polarization_selection() {
        let mut m = model();
        m.mu_gf.y = C64::new(0.0, 0.0);
        assert_eq!(chi5_tpef(&m, m.omega_fg(), m.omega_fe), C64::new(0.0, 0.0));
    }

    #[test]
    fn quantum_vs_semiclassical_pdc_dichotomy() {
        let m = model();
        let wp = m.omega_fg();
        // permutation symmetry of the quantum form
        let wi = m.omega_eg + 7.0 * m.gamma_eg;
        let a = chi2_ll(&m, wp, wi);
        let b = chi2_ll(&m, wp, wp - wi);
        assert!((a - b).norm() < 1e-12 * a.norm());

        // far off resonance (detunings of a few hundred gamma) both
        // susceptibilities coincide to < 1e-2
        let (q, c) = chi2_quantum_vs_semiclassical(&m, wp + 4.0, m.omega_eg + 1.9);
        assert!((q - c).norm() / c.norm() < 1e-2, "far-field difference too large");

        // on double resonance: |chi_+--| local minimum, |chi_LL-| local max
        let dpt = m.omega_eg;
        let h = 0.5 * m.gamma_eg;
        let sc = |wi: f64| chi2_pmm(&m, wp, wi).norm();
        let qu = |wi: f64| chi2_ll(&m, wp, wi).norm();
        let d2_sc = sc(dpt + h) + sc(dpt - h) - 2.0 * sc(dpt);
        let d2_qu = qu(dpt + h) + qu(dpt - h) - 2.0 * qu(dpt);
        assert!(d2_sc > 0.0, "semiclassical should dip at double resonance");
        assert!(d2_qu < 0.0, "quantum should peak at double resonance");
        assert!(qu(dpt) > 20.0 * sc(dpt), "quantum must dominate on resonance");
    }

    #[test]
    fn reality_symmetry_on_grid() {
        let m = model();
        let grid = FrequencyAxis::centered(m.omega_fg(), 0.2, 21).unwrap();
        for i in 0..grid.count() {
            let w1 = grid.at(i);
            let w2 = 0.4 * w1;
            for (name, v, vm) in [
                ("dfg", chi2_dfg(&m, w1, w2), chi2_dfg(&m, -w1, -w2)),
                ("sfg", chi2_sfg(&m, w1, w2), chi2_sfg(&m, -w1, -w2)),
                ("ll", chi2_ll(&m, w1, w2), chi2_ll(&m, -w1, -w2)),
                ("pmm", chi2_pmm(&m, w1, w2), chi2_pmm(&m, -w1, -w2)),
            ] {
                assert!(
                    (vm - v.conj()).norm() <= 1e-12 * v.norm().max(1e-300),
                    "{name} violates reality at w1 = {w1}"
                );
            }
        }
    }

    #[test]
    fn guarded_denominators_stay_off_the_real_axis() {
        let m = model();
        let grid = FrequencyAxis::centered(m.omega_fg(), 0.3, 501).unwrap();
        let bound = 1.0 / (m.gamma_eg.min(m.gamma_fg));
        for i in 0..grid.count() {
            let v = chi2_ll(&m, grid.at(i), grid.at(i) / 2.0).norm();
            assert!(v.is_finite());
            assert!(v < 10.0 * bound * bound, "pole reached the real grid");
        }
    }

    #[test]
    fn type_ii_coefficient_and_signal() {
        let mut m = model();
        m.mu_gf.y = C64::new(0.0, 0.0);
        m.mu_fe.y = C64::new(0.0, 0.0);
        m.mu_eg.y = C64::new(0.0, 0.0);
        assert_eq!(type_ii_coefficient_sq(&m), 0.0);
        assert_eq!(pdc_type_ii(&m, 10.0, 1.0, m.omega_fg(), m.omega_eg), 0.0);

        // isotropic dipoles: direct substitution into the printed terms
        let m = model();
        let c2 = type_ii_coefficient_sq(&m);
        assert_relative_eq!(c2, 5.0, max_relative = 1e-12);

        // two resonant ridges at w2 = w_eg and w1 - w2 = w_eg
        let w1 = m.omega_fg();
        let on1 = pdc_type_ii(&m, 5.0, 1.0, w1, m.omega_eg);
        let on2 = pdc_type_ii(&m, 5.0, 1.0, w1, w1 - m.omega_eg);
        let off = pdc_type_ii(&m, 5.0, 1.0, w1, m.omega_eg + 40.0 * m.gamma_eg);
        assert!(on1 > 10.0 * off && on2 > 10.0 * off);
    }

    #[test]
    fn tpef_and_pdc_type_i_share_the_quantum_pathway() {
        let m = model();
        // chi_LL- differs from chi_+-- near resonance by more than 10x the
        // far-field difference
        let wp = m.omega_fg();
        let near = (chi2_ll(&m, wp, m.omega_eg) - chi2_pmm(&m, wp, m.omega_eg)).norm();
        let far = (chi2_ll(&m, wp + 0.4, m.omega_eg + 0.35)
            - chi2_pmm(&m, wp + 0.4, m.omega_eg + 0.35))
        .norm();
        assert!(near > 10.0 * far);
        // PDC signal symmetric under w2 <-> w1 - w2
        let s1 = pdc_type_i(&m, 4.0, 1.0, wp, m.omega_eg + 0.01);
        let s2 = pdc_type_i(&m, 4.0, 1.0, wp, wp - (m.omega_eg + 0.01));
        assert_relative_eq!(s1, s2, max_relative = 1e-10);
    }

    #[test]
    fn pcc_census_patterns() {
        // nondegenerate stand-in so the structures are distinct
        let m = ThreeLevelModel::from_wavenumbers(9_000.0, 11_000.0, 40.0);
        let wi_res = m.omega_eg;
        let gate_sigma = wavenumber_to_radfs(800.0);
        let span = wavenumber_to_radfs(2_600.0);
        let pump_axis = FrequencyAxis::centered(m.omega_fg(), span, 240).unwrap();
        let sig_axis =
            FrequencyAxis::centered(m.omega_eg + (m.omega_fe - m.omega_eg) / 2.0, span, 240).unwrap();

        let census = |idler: f64, extra: Option<f64>| -> (usize, usize) {
            let map = pdc_pcc_map(&m, pump_axis, sig_axis, extra, idler, gate_sigma);
            let offsets = match extra {
                None => vec![0.0],
                Some(off) => vec![0.0, off],
            };
            let peaks = pdc_expected_peaks(&m, idler, &offsets);
            pcc_peak_census(&map, pump_axis, sig_axis, &peaks, 30.0)
        };

        // single monochromatic pump, resonant idler gate: 1 strong + 2 weak
        let (s, w) = census(wi_res, None);
        assert_eq!((s, w), (1, 2), "resonant idler census");
        // detuned idler gate: the pair diagonal splits off the ridge
        let detuned = m.omega_eg - wavenumber_to_radfs(150.0);
        let (s2, w2) = census(detuned, None);
        assert_eq!(s2 + w2, 4, "detuned idler census");
        // two-line pump: every pump-anchored peak doubles
        let (s3, w3) = census(wi_res, Some(wavenumber_to_radfs(400.0)));
        assert_eq!(s3 + w3, 6, "two-line pump census");
    }
}
