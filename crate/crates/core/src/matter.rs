//! Few-level matter models: g/e/f manifolds with transport, Liouville-space
//! Green's functions, the two-state-jump stochastic model and
//! spectral-diffusion lineshapes.

use crate::error::{QsError, Result};
use crate::numerics::matrix_exp;
use crate::units::wavenumber_to_radfs;
use crate::C64;
use ndarray::Array2;

/// Level label inside a [`LevelSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Ground,
    /// Singly excited state by index.
    Single(usize),
    /// Doubly excited state by index.
    Double(usize),
}

/// Dephasing model for the coherence Green's functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dephasing {
    /// One rate (rad/fs) for every coherence and the f population.
    Uniform(f64),
    /// Coherence rates from the per-state amplitude widths,
    /// `gamma_ab = gamma_a + gamma_b`; reproduces closed-system
    /// (wavefunction) evolution exactly.
    Derived,
    /// Independent rates per coherence class (rad/fs).
    Explicit { eg: f64, fg: f64, fe: f64, ee: f64, ff: f64 },
}

/// g/e/f manifold with dipoles, dephasings and e-manifold transport.
///
/// Energies are stored in rad/fs; constructors take cm^-1.
#[derive(Debug, Clone)]
pub struct LevelSystem {
    /// Singly excited energies (rad/fs).
    pub e: Vec<f64>,
    /// Doubly excited energies (rad/fs).
    pub f: Vec<f64>,
    /// `<e|V^dag|g>` per e.
    pub mu_ge: Vec<C64>,
    /// `<f|V^dag|e>`, indexed `[e][f]`.
    pub mu_ef: Array2<C64>,
    /// Amplitude-level widths per state (rad/fs), used by the closed-form
    /// transition amplitudes.
    pub gamma_e: Vec<f64>,
    pub gamma_f: Vec<f64>,
    pub dephasing: Dephasing,
    /// Population transport matrix K (fs^-1) on the e manifold; columns sum
    /// to zero. `None` disables transport.
    pub transport: Option<Array2<f64>>,
    /// When set, e/f populations also decay at `2 gamma_state` so that the
    /// density-matrix pathways reproduce `|T_fg|^2` exactly (closed system).
    pub population_decay: bool,
}

impl LevelSystem {
    /// Build from cm^-1 energies and cm^-1 rates.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        e_wavenumbers: &[f64],
        f_wavenumbers: &[f64],
        mu_ge: Vec<C64>,
        mu_ef: Array2<C64>,
        gamma_e_cm: &[f64],
        gamma_f_cm: &[f64],
        dephasing: Dephasing,
        transport: Option<Array2<f64>>,
    ) -> Result<Self> {
        let sys = Self {
            e: e_wavenumbers.iter().map(|&x| wavenumber_to_radfs(x)).collect(),
            f: f_wavenumbers.iter().map(|&x| wavenumber_to_radfs(x)).collect(),
            mu_ge,
            mu_ef,
            gamma_e: gamma_e_cm.iter().map(|&x| wavenumber_to_radfs(x)).collect(),
            gamma_f: gamma_f_cm.iter().map(|&x| wavenumber_to_radfs(x)).collect(),
            dephasing,
            transport,
            population_decay: false,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu_ge.len() != self.e.len() || self.mu_ef.dim() != (self.e.len(), self.f.len()) {
            return Err(QsError::Contract("LevelSystem: dipole shapes do not match level counts".into()));
        }
        if self.gamma_e.len() != self.e.len() || self.gamma_f.len() != self.f.len() {
            return Err(QsError::Contract("LevelSystem: width lists do not match level counts".into()));
        }
        if self.gamma_e.iter().chain(self.gamma_f.iter()).any(|&g| g < 0.0) {
            return Err(QsError::Contract("LevelSystem: negative dephasing rate".into()));
        }
        match self.dephasing {
            Dephasing::Uniform(g) => {
                if g < 0.0 {
                    return Err(QsError::Contract("LevelSystem: negative dephasing rate".into()));
                }
            }
            Dephasing::Explicit { eg, fg, fe, ee, ff } => {
                if [eg, fg, fe, ee, ff].iter().any(|&g| g < 0.0) {
                    return Err(QsError::Contract("LevelSystem: negative dephasing rate".into()));
                }
            }
            Dephasing::Derived => {}
        }
        if let Some(k) = &self.transport {
            if k.dim() != (self.e.len(), self.e.len()) {
                return Err(QsError::Contract("LevelSystem: transport matrix shape mismatch".into()));
            }
            for col in 0..k.ncols() {
                let s: f64 = (0..k.nrows()).map(|r| k[(r, col)]).sum();
                if s.abs() > 1e-12 {
                    return Err(QsError::Contract(format!(
                        "LevelSystem: transport column {col} sums to {s}, must conserve population"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The default multilevel model of this crate: e-states at 11,000 and
    /// 11,500 cm^-1 with downhill e2 -> e1 transfer in 30 fs, two f-states
    /// in the 22,000 cm^-1 band fed selectively (f1 via e1, f2 via e2),
    /// all dephasings 100 cm^-1.
    pub fn demo_dimer() -> Self {
        let k = 1.0 / 30.0;
        // column order (e1, e2): e2 drains into e1 at rate k, k/20 uphill.
        let transport = ndarray::array![[-k / 20.0, k], [k / 20.0, -k]];
        let mu_ef = ndarray::array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
        ];
        LevelSystem::new(
            &[11_000.0, 11_500.0],
            &[22_000.0, 22_500.0],
            vec![C64::new(1.0, 0.0); 2],
            mu_ef,
            &[100.0, 100.0],
            &[100.0, 100.0],
            Dephasing::Uniform(wavenumber_to_radfs(100.0)),
            Some(transport),
        )
        .expect("demo model is valid")
    }

    pub fn energy(&self, l: Level) -> Result<f64> {
        match l {
            Level::Ground => Ok(0.0),
            Level::Single(i) => self
                .e
                .get(i)
                .copied()
                .ok_or_else(|| QsError::Contract(format!("unknown single-excited index {i}"))),
            Level::Double(i) => self
                .f
                .get(i)
                .copied()
                .ok_or_else(|| QsError::Contract(format!("unknown double-excited index {i}"))),
        }
    }

    fn width(&self, l: Level) -> f64 {
        match l {
            Level::Ground => 0.0,
            Level::Single(i) => self.gamma_e[i],
            Level::Double(i) => self.gamma_f[i],
        }
    }

    /// Coherence dephasing rate for the (a, b) pair.
    pub fn gamma_pair(&self, a: Level, b: Level) -> f64 {
        match self.dephasing {
            Dephasing::Uniform(g) => {
                // one dephasing-dominated width for every block, including
                // the intraband e = e' line; population conservation in the
                // transport engine is governed by gamma_population instead
                if a == b && a == Level::Ground {
                    0.0
                } else {
                    g
                }
            }
            Dephasing::Derived => self.width(a) + self.width(b),
            Dephasing::Explicit { eg, fg, fe, ee, ff } => match (a, b) {
                (Level::Ground, Level::Ground) => 0.0,
                (Level::Single(_), Level::Ground) | (Level::Ground, Level::Single(_)) => eg,
                (Level::Double(_), Level::Ground) | (Level::Ground, Level::Double(_)) => fg,
                (Level::Double(_), Level::Single(_)) | (Level::Single(_), Level::Double(_)) => fe,
                (Level::Single(_), Level::Single(_)) => ee,
                (Level::Double(_), Level::Double(_)) => ff,
            },
        }
    }

    /// Population decay rate used by the pathway engine for `aa` blocks.
    pub fn gamma_population(&self, a: Level) -> f64 {
        if self.population_decay {
            2.0 * self.width(a)
        } else {
            match a {
                Level::Double(i) => match self.dephasing {
                    Dephasing::Uniform(g) => g,
                    Dephasing::Derived => 2.0 * self.gamma_f[i],
                    Dephasing::Explicit { ff, .. } => ff,
                },
                _ => 0.0,
            }
        }
    }

    /// Liouville-space Green's function evaluator for a registered pair.
    pub fn greens_fn(&self, a: Level, b: Level) -> Result<GreensFn> {
        let omega = self.energy(a)? - self.energy(b)?;
        Ok(GreensFn { omega, gamma: self.gamma_pair(a, b) })
    }

    /// Equilibrium populations of the transport matrix.
    pub fn transport_equilibrium(&self) -> Option<Vec<f64>> {
        let k = self.transport.as_ref()?;
        let p = matrix_exp(k, 1e7).ok()?;
        let n = k.nrows();
        Some((0..n).map(|r| (0..n).map(|c| p[(r, c)]).sum::<f64>() / n as f64).collect())
    }
}

/// `G_ab(t) = (-i/hbar) theta(t) e^{-(i w_ab + gamma_ab) t}` with hbar = 1,
/// and its Fourier transform `G_ab(w) = 1 / (w - w_ab + i gamma_ab)`.
#[derive(Debug, Clone, Copy)]
pub struct GreensFn {
    pub omega: f64,
    pub gamma: f64,
}

impl GreensFn {
    #[inline]
    pub fn time(&self, t: f64) -> C64 {
        if t < 0.0 {
            C64::new(0.0, 0.0)
        } else {
            -C64::i() * C64::from_polar((-self.gamma * t).exp(), -self.omega * t)
        }
    }

    #[inline]
    pub fn freq(&self, w: f64) -> C64 {
        1.0 / C64::new(w - self.omega, self.gamma)
    }
}

/// e-manifold propagator over an interval: coherences decay with
/// `e^{-(i w_ee' + gamma_ee') t}`, populations follow `exp(K t)`.
#[derive(Debug, Clone)]
pub struct TransportPropagator {
    /// `exp(K t)` (identity when the system has no transport).
    pub populations: Array2<f64>,
    coherence: Array2<C64>,
    pop_damp: f64,
}

impl TransportPropagator {
    /// Element `(e e'; e'' e''')` of the single-excitation propagator: only
    /// the coherence-diagonal (`e = e''`, `e' = e'''`, `e != e'`) and the
    /// population (`e = e'`, `e'' = e'''`) blocks are nonzero.
    pub fn element(&self, e: usize, ep: usize, epp: usize, eppp: usize) -> C64 {
        if e != ep {
            if e == epp && ep == eppp {
                self.coherence[(e, ep)]
            } else {
                C64::new(0.0, 0.0)
            }
        } else if epp == eppp {
            C64::new(self.populations[(e, epp)] * self.pop_damp, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }
}

/// Build the propagator at time `t >= 0`.
pub fn transport_propagator(system: &LevelSystem, t: f64) -> Result<TransportPropagator> {
    if t < 0.0 {
        return Err(QsError::Contract(format!("transport_propagator: t must be >= 0, got {t}")));
    }
    let n = system.e.len();
    let populations = match &system.transport {
        Some(k) => matrix_exp(k, t)?,
        None => Array2::eye(n),
    };
    let mut coherence = Array2::<C64>::zeros((n, n));
    for e in 0..n {
        for ep in 0..n {
            if e != ep {
                let w = system.e[e] - system.e[ep];
                let g = system.gamma_pair(Level::Single(e), Level::Single(ep));
                coherence[(e, ep)] = C64::from_polar((-g * t).exp(), -w * t);
            }
        }
    }
    let pop_damp = (-system.gamma_population(Level::Single(0)) * t).exp();
    Ok(TransportPropagator { populations, coherence, pop_damp })
}

/// Two-state-jump model: an optical transition whose frequency jumps
/// between `w_center + delta` and `w_center - delta`; only the downhill
/// jump (rate `k`) is allowed (low-temperature limit).
#[derive(Debug, Clone, Copy)]
pub struct TwoStateJump {
    /// Central transition frequency (rad/fs); `w_fe` in the pump-probe
    /// setting, the Raman shift `w_ac` in the IFSRS setting.
    pub omega_center: f64,
    /// Half splitting delta (rad/fs).
    pub delta: f64,
    /// Jump rate (fs^-1).
    pub k: f64,
    /// Electronic dephasing (rad/fs).
    pub gamma: f64,
    pub mu_ge: C64,
    pub mu_ef: C64,
}

impl TwoStateJump {
    /// All four parameters in cm^-1 (the jump rate enters as a rate,
    /// `k = 2 pi c k_cm`).
    pub fn from_wavenumbers(omega_center: f64, delta: f64, k: f64, gamma: f64) -> Self {
        Self {
            omega_center: wavenumber_to_radfs(omega_center),
            delta: wavenumber_to_radfs(delta),
            k: wavenumber_to_radfs(k),
            gamma: wavenumber_to_radfs(gamma),
            mu_ge: C64::new(1.0, 0.0),
            mu_ef: C64::new(1.0, 0.0),
        }
    }

    #[inline]
    pub fn omega_plus(&self) -> f64 {
        self.omega_center + self.delta
    }

    #[inline]
    pub fn omega_minus(&self) -> f64 {
        self.omega_center - self.delta
    }
}

/// Field correlation function `F(t2, t1)` of the two-state-jump model: a
/// population period `t1` followed by a detected-coherence period `t2`,
/// starting in the initially prepared (`w_-`) state.
///
/// Exact solution of the stochastic Liouville equation:
/// `F = |mu_ge mu_ef|^2 e^{-gamma (t1 + 2 t2)} [ e^{-i w_+ t2}
///   - (2 i d / (k - 2 i d)) e^{-k t1} ( e^{-(k + i w_-) t2} - e^{-i w_+ t2} ) ]`.
pub fn tsj_correlation(model: &TwoStateJump, t1: f64, t2: f64) -> Result<C64> {
    if t1 < 0.0 || t2 < 0.0 {
        return Err(QsError::Contract(format!("tsj_correlation: times must be >= 0, got ({t1}, {t2})")));
    }
    let amp = model.mu_ge.norm_sqr() * model.mu_ef.norm_sqr();
    let damp = (-model.gamma * (t1 + 2.0 * t2)).exp();
    let wp = model.omega_plus();
    let wm = model.omega_minus();
    let lower = C64::from_polar(1.0, -wp * t2);
    let bracket = if model.delta == 0.0 {
        lower
    } else {
        let upper = C64::from_polar((-model.k * t2).exp(), -wm * t2);
        let coef = C64::new(0.0, 2.0 * model.delta) / C64::new(model.k, -2.0 * model.delta);
        lower - coef * (-model.k * t1).exp() * (upper - lower)
    };
    Ok(amp * damp * bracket)
}

/// Two-peak absorption lineshape of the two-state-jump model,
/// `S_l(w) = -Im (4/hbar^2) |mu_ac|^2/(k + 2 i d) [ (k + i d)/(w - w_- + i g)
///   + i d / (w - w_+ + i (g + k)) ]`.
pub fn tsj_absorption(model: &TwoStateJump, mu_ac: C64, w: f64) -> f64 {
    let d = model.delta;
    let k = model.k;
    let g = model.gamma;
    let pref = 4.0 * mu_ac.norm_sqr() / C64::new(k, 2.0 * d);
    let term1 = C64::new(k, d) / C64::new(w - model.omega_minus(), g);
    let term2 = C64::new(0.0, d) / C64::new(w - model.omega_plus(), g + k);
    -(pref * (term1 + term2)).im
}

/// Overdamped-Brownian-oscillator spectral diffusion parameters for one
/// molecule (rad/fs everywhere).
#[derive(Debug, Clone, Copy)]
pub struct SpectralDiffusion {
    /// Bare electronic gap `w0` (mean of absorption and fluorescence).
    pub omega0: f64,
    /// Reorganization energy lambda (half Stokes shift).
    pub lambda: f64,
    /// Fluctuation relaxation rate Lambda.
    pub relaxation: f64,
    /// Fluctuation magnitude Delta.
    pub delta: f64,
}

impl SpectralDiffusion {
    /// High-temperature validity flag `k_B T >> hbar Lambda`, with
    /// `Delta^2 = 2 lambda k_B T / hbar` eliminating the temperature.
    pub fn high_temperature_ok(&self) -> bool {
        if self.lambda <= 0.0 {
            return true;
        }
        self.delta * self.delta / (2.0 * self.lambda) > 10.0 * self.relaxation
    }

    /// Slow-nuclear-dynamics flag `Lambda << Delta`.
    pub fn slow_dynamics_ok(&self) -> bool {
        self.relaxation < 0.1 * self.delta
    }

    /// High-temperature lineshape
    /// `g(t) = (Delta^2/Lambda^2 - i lambda/Lambda)(e^{-Lambda t} + Lambda t - 1)`.
    pub fn lineshape(&self, t: f64) -> Result<C64> {
        if t < 0.0 {
            return Err(QsError::Contract(format!("sd lineshape: t must be >= 0, got {t}")));
        }
        let l = self.relaxation;
        let shape = (-l * t).exp() + l * t - 1.0;
        Ok(C64::new(self.delta * self.delta / (l * l), -self.lambda / l) * shape)
    }

    /// Four-point lineshape exponent
    /// `Phi(t1..t4) = -g(t1-t2) - g(t3-t4) + g(t1-t3) - g(t2-t3) + g(t2-t4) - g(t1-t4)`
    /// with `g(-t) = g(t)^*`.
    pub fn four_point_exponent(&self, t1: f64, t2: f64, t3: f64, t4: f64) -> C64 {
        let g = |t: f64| {
            let v = self.lineshape(t.abs()).expect("t.abs() >= 0");
            if t >= 0.0 {
                v
            } else {
                v.conj()
            }
        };
        -g(t1 - t2) - g(t3 - t4) + g(t1 - t3) - g(t2 - t3) + g(t2 - t4) - g(t1 - t4)
    }

    /// Absorption peak position `w0 + lambda`.
    pub fn absorption_center(&self) -> f64 {
        self.omega0 + self.lambda
    }

    /// Fluorescence peak position `w0 - lambda`.
    pub fn fluorescence_center(&self) -> f64 {
        self.omega0 - self.lambda
    }

    /// Time-dependent emission center: starts at the absorption position
    /// and red-shifts to the fluorescence position as the bath relaxes.
    pub fn emission_center(&self, t: f64) -> f64 {
        self.omega0 - self.lambda + 2.0 * self.lambda * (-self.relaxation * t).exp()
    }

    /// Time-dependent inhomogeneous emission width.
    pub fn emission_width(&self, t: f64) -> f64 {
        self.delta * (1.0 - (-2.0 * self.relaxation * t).exp()).sqrt().max(1e-9)
    }

    /// Pade-form FWHM of the absorption line.
    pub fn absorption_fwhm(&self) -> f64 {
        let x = self.relaxation / self.delta;
        (2.355 + 1.76 * x) / (1.0 + 0.85 * x + 0.88 * x * x) * self.delta
    }
}

/// Slow-limit absorption and fluorescence lineshapes for a set of molecules;
/// each term is a unit-normalized Gaussian.
pub fn sd_lineshapes_abs_fluor(molecules: &[SpectralDiffusion], w: f64) -> (f64, f64) {
    let mut abs = 0.0;
    let mut fluor = 0.0;
    for m in molecules {
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * m.delta);
        let da = w - m.absorption_center();
        let df = w - m.fluorescence_center();
        abs += norm * (-da * da / (2.0 * m.delta * m.delta)).exp();
        fluor += norm * (-df * df / (2.0 * m.delta * m.delta)).exp();
    }
    (abs, fluor)
}
