//! Scenario configuration schema and validation.
//!
//! One TOML file describes one deterministic job: a matter model, a field
//! or protocol specification, grid sizes and output names. Unknown keys are
//! rejected so that typos fail loudly.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    /// Unique scenario name; also the default output stem.
    pub id: String,
    /// Free-form one-line description shown by `list`.
    pub description: String,
    /// Signal family tag used by the catalog.
    pub family: String,
    pub model: Option<ModelConfig>,
    pub protocol: Protocol,
    #[serde(default)]
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    /// Built-in two-e/two-f model with downhill transport.
    DemoDimer,
    /// Explicit g/e/f level system (cm^-1 everywhere).
    Levels {
        e: Vec<f64>,
        f: Vec<f64>,
        mu_ge: Vec<f64>,
        /// Row-major e x f block.
        mu_ef: Vec<f64>,
        gamma_e: Vec<f64>,
        gamma_f: Vec<f64>,
        /// Uniform dephasing rate (cm^-1); per-class rates may override it.
        gamma: f64,
        #[serde(default)]
        gamma_ee: Option<f64>,
        /// Downhill transport time constant (fs); omit to disable.
        #[serde(default)]
        transport_fs: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Points per frequency axis.
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points: 128 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum Protocol {
    /// Joint-amplitude moduli and entanglement entropies for a set of
    /// pump-bandwidth regimes (Gaussian phase matching).
    FreqCorrelations {
        /// (sigma_p T2, T1/T2) pairs.
        cases: Vec<(f64, f64)>,
        t2_fs: f64,
    },
    /// f-state fractions vs pump frequency, entangled vs classical.
    FPopulations {
        pump_center_cm: f64,
        pump_halfspan_cm: f64,
        scan_points: usize,
        pump_sigma_cm: f64,
        entanglement_time_fs: f64,
    },
    /// TPIF action spectra for the same scan.
    ActionSpectrum {
        pump_center_cm: f64,
        pump_halfspan_cm: f64,
        scan_points: usize,
        pump_sigma_cm: f64,
        entanglement_time_fs: f64,
    },
    /// Classical LOP vs LAP frequency maps (kII + kIII).
    LopLapMaps { halfspan_cm: f64 },
    /// Entangled vs classical LOP maps on a trimer.
    W1W3 { entanglement_time_fs: f64, halfspan_cm: f64 },
    /// DQC displays for entangled and classical excitation.
    Dqc {
        entanglement_time_fs: f64,
        pump_sigma_cm: f64,
        halfspan_cm: f64,
    },
    /// Interferometric pump-probe spectra at a set of delays.
    TpcSlices {
        delta_cm: f64,
        jump_rate_cm: f64,
        gamma_cm: f64,
        probe_sigma_cm: f64,
        delays_fs: Vec<f64>,
    },
    /// IFSRS gain/loss/coincidence spectra and the uncertainty witness.
    Wig {
        t1_fs: f64,
        t2_fs: f64,
        pump_sigma_cm: f64,
        delta_cm: f64,
        jump_rate_cm: f64,
        gamma_cm: f64,
    },
    /// Bare PCC maps with resonant/detuned idler and one/two pump lines.
    Pdc2 {
        idler_detuning_cm: f64,
        second_line_offset_cm: f64,
        gate_sigma_cm: f64,
        halfspan_cm: f64,
    },
    /// HOM coincidence dip vs beam-splitter delay for a gate sweep.
    HomDip {
        delta_mhz: f64,
        lambda_mhz: f64,
        relax_a_mhz: f64,
        relax_b_mhz: f64,
        offset_mhz: f64,
        sigma_t_mhz: f64,
        sigma_w_sweep_mhz: Vec<f64>,
        detection_ns: f64,
    },
}

/// Machine-readable validation problem.
#[derive(Debug, Clone, Serialize)]
pub struct Problem {
    pub code: String,
    pub message: String,
    pub hard: bool,
}

/// Parse a TOML scenario file.
pub fn parse(text: &str) -> Result<Scenario> {
    let sc: Scenario = toml::from_str(text).context("schema violation")?;
    if sc.schema_version != 1 {
        bail!("schema violation: unsupported schema_version {}", sc.schema_version);
    }
    Ok(sc)
}

/// Schema-plus-physics validation; hard problems abort `run`.
pub fn validate(sc: &Scenario) -> Vec<Problem> {
    let mut out = Vec::new();
    let mut hard = |code: &str, msg: String| {
        out.push(Problem { code: code.into(), message: msg, hard: true })
    };
    if sc.id.is_empty() || sc.id.contains(['/', '\\']) {
        hard("schema-id", format!("invalid scenario id {:?}", sc.id));
    }
    if sc.grid.points < 8 || sc.grid.points > 4096 {
        hard("schema-grid", format!("grid points {} outside 8..=4096", sc.grid.points));
    }
    if let Some(ModelConfig::Levels { e, f, mu_ge, mu_ef, gamma_e, gamma_f, gamma, gamma_ee, .. }) =
        &sc.model
    {
        if gamma_e.iter().chain(gamma_f.iter()).any(|&g| g < 0.0)
            || *gamma < 0.0
            || gamma_ee.is_some_and(|g| g < 0.0)
        {
            hard("physics-gamma", "negative dephasing rate".into());
        }
        if mu_ge.len() != e.len() || mu_ef.len() != e.len() * f.len() {
            hard("schema-dipoles", "dipole blocks do not match level counts".into());
        }
    }
    match &sc.protocol {
        Protocol::FreqCorrelations { cases, t2_fs } => {
            if cases.is_empty() {
                hard("schema-cases", "cases must be non-empty".into());
            }
            if *t2_fs <= 0.0 {
                hard("physics-walkoff", "T2 must be positive".into());
            }
            for &(v, rho) in cases {
                if v <= 0.0 {
                    hard("physics-pump", format!("sigma_p T2 = {v} must be positive"));
                }
                if rho >= 1.0 {
                    hard("physics-walkoff", format!("T1/T2 = {rho} must be < 1"));
                }
            }
        }
        Protocol::FPopulations { pump_sigma_cm, entanglement_time_fs, pump_halfspan_cm, .. }
        | Protocol::ActionSpectrum { pump_sigma_cm, entanglement_time_fs, pump_halfspan_cm, .. } => {
            if *pump_sigma_cm <= 0.0 || *entanglement_time_fs <= 0.0 {
                hard("physics-pump", "pump bandwidth and entanglement time must be positive".into());
            }
            // the integration grid must cover the pump band
            let cover = 1_600.0;
            if *pump_halfspan_cm + 4.0 * pump_sigma_cm > cover {
                out.push(Problem {
                    code: "grid-coverage".into(),
                    message: format!(
                        "scan span {pump_halfspan_cm} + 4 sigma exceeds the {cover} cm^-1 kernel window"
                    ),
                    hard: false,
                });
            }
        }
        Protocol::TpcSlices { gamma_cm, probe_sigma_cm, delays_fs, .. } => {
            if *gamma_cm <= 0.0 || *probe_sigma_cm <= 0.0 {
                hard("physics-gamma", "gamma and probe bandwidth must be positive".into());
            }
            if delays_fs.iter().any(|&t| t < 0.0) {
                hard("physics-delay", "delays must be nonnegative".into());
            }
        }
        Protocol::Wig { t1_fs, t2_fs, pump_sigma_cm, .. } => {
            if t2_fs <= t1_fs {
                hard("physics-walkoff", "requires T2 > T1".into());
            }
            if *pump_sigma_cm <= 0.0 {
                hard("physics-pump", "pump bandwidth must be positive".into());
            }
        }
        Protocol::HomDip { sigma_t_mhz, sigma_w_sweep_mhz, relax_a_mhz, relax_b_mhz, .. } => {
            if *sigma_t_mhz <= 0.0 || sigma_w_sweep_mhz.iter().any(|&s| s <= 0.0) {
                hard("physics-gate", "gate bandwidths must be positive".into());
            }
            // HBL flags: gates should not be narrower than the fluctuations
            let fast = relax_a_mhz.max(*relax_b_mhz);
            if sigma_w_sweep_mhz.iter().any(|&s| s < fast) {
                out.push(Problem {
                    code: "hbl-flags".into(),
                    message: "a frequency gate is narrower than the fluctuation rate".into(),
                    hard: false,
                });
            }
        }
        Protocol::Pdc2 { gate_sigma_cm, .. } => {
            if *gate_sigma_cm <= 0.0 {
                hard("physics-gate", "gate width must be positive".into());
            }
        }
        Protocol::LopLapMaps { halfspan_cm } | Protocol::W1W3 { halfspan_cm, .. } => {
            if *halfspan_cm <= 0.0 {
                hard("schema-span", "halfspan must be positive".into());
            }
        }
        Protocol::Dqc { pump_sigma_cm, entanglement_time_fs, .. } => {
            if *pump_sigma_cm <= 0.0 || *entanglement_time_fs <= 0.0 {
                hard("physics-pump", "pump bandwidth and entanglement time must be positive".into());
            }
        }
    }
    out
}
