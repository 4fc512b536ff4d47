//! Scenario execution: dispatches a validated config to the library and
//! assembles deterministic output artifacts.

use crate::config::{ModelConfig, Protocol, Scenario};
use anyhow::{Context, Result};
use num_complex::Complex64 as C64;
use qspectro::axis::{FrequencyAxis, TimeAxis};
use qspectro::field_states::{
    build_two_photon_amplitude, entanglement_entropy, field_correlators, gaussian_support_axes,
    schmidt_decompose, PhaseMatching, PumpEnvelope, SchmidtMethod,
};
use qspectro::interferometric::{
    fsrs_classical, gaussian_probe, hom_pcc, ifsrs_signal, ipp_signal, twin_uncertainty_witness,
    HomGate, HomSetup, RamanOrder, TwinState, TwinVariant,
};
use qspectro::matter::{Dephasing, LevelSystem, SpectralDiffusion, TwoStateJump};
use qspectro::multidim::{
    dqc_classical_map, dqc_entangled_map, lap_frequency_map_classical, lop_entangled_map,
    lop_frequency_map_classical, Branch, CwPair, DqcDisplay, GaussEnvelope, PulseTrain,
};
use qspectro::population::{f_populations, tpif_signal, FourPointKernel, PathwayTime};
use qspectro::susceptibility::{pdc_pcc_map, ThreeLevelModel};
use qspectro::units::{mhz_to_radfs, radfs_to_wavenumber, wavenumber_to_radfs as w2r};
use qspectro::{AxisMeta, SignalMap, SignalValues};
use serde_json::json;
use std::f64::consts::PI;

pub struct RunOutput {
    pub maps: Vec<SignalMap>,
    pub summary: serde_json::Value,
}

fn build_model(cfg: &Option<ModelConfig>) -> Result<LevelSystem> {
    match cfg {
        None | Some(ModelConfig::DemoDimer) => Ok(LevelSystem::demo_dimer()),
        Some(ModelConfig::Levels {
            e,
            f,
            mu_ge,
            mu_ef,
            gamma_e,
            gamma_f,
            gamma,
            gamma_ee,
            transport_fs,
        }) => {
            let mu_ge: Vec<C64> = mu_ge.iter().map(|&x| C64::new(x, 0.0)).collect();
            let mu_ef = ndarray::Array2::from_shape_vec(
                (e.len(), f.len()),
                mu_ef.iter().map(|&x| C64::new(x, 0.0)).collect(),
            )
            .context("mu_ef block shape")?;
            let dephasing = match gamma_ee {
                None => Dephasing::Uniform(w2r(*gamma)),
                Some(ee) => Dephasing::Explicit {
                    eg: w2r(*gamma),
                    fg: w2r(*gamma),
                    fe: w2r(*gamma),
                    ee: w2r(*ee),
                    ff: w2r(*gamma),
                },
            };
            let transport = transport_fs.map(|tf| {
                let k = 1.0 / tf;
                ndarray::array![[-k / 20.0, k], [k / 20.0, -k]]
            });
            Ok(LevelSystem::new(e, f, mu_ge, mu_ef, gamma_e, gamma_f, dephasing, transport)?)
        }
    }
}

fn axis_meta(name: &str, axis: FrequencyAxis) -> AxisMeta {
    AxisMeta::new(name, "rad/fs", axis.start(), axis.step(), axis.count())
}

/// f-state fractions for one pump frequency, entangled and classical.
fn fpop_point(
    sys: &LevelSystem,
    wp: f64,
    sigma_p: f64,
    t_ent: f64,
    grid: usize,
) -> Result<([f64; 2], [f64; 2])> {
    let (w1, w2) = (w2r(11_000.0), w2r(11_500.0));
    let ax = FrequencyAxis::centered(wp / 2.0, w2r(1_600.0), grid)?;
    let pm = PhaseMatching::type_ii(0.0, t_ent, w1, w2)?;
    let pump = PumpEnvelope::new(wp, sigma_p, 1e-4)?;
    let state = build_two_photon_amplitude(pump, pm, ax, ax)?;
    let modes = schmidt_decompose(&state, SchmidtMethod::Numeric, 1e-8)?;
    let fc = field_correlators(&modes)?;
    let ent = f_populations(sys, &FourPointKernel::from_correlators(&fc), PathwayTime::Integrated)?;
    let kernel_c = FourPointKernel::classical_product(ax, |w| {
        let centers = [wp / 2.0 - (w2 - w1) / 2.0, wp / 2.0 + (w2 - w1) / 2.0];
        centers
            .iter()
            .map(|&w0| {
                C64::new(
                    (2.0 * PI).sqrt() / sigma_p
                        * (-(w - w0).powi(2) / (2.0 * sigma_p * sigma_p)).exp(),
                    0.0,
                )
            })
            .sum()
    });
    let cls = f_populations(sys, &kernel_c, PathwayTime::Integrated)?;
    let te = ent.totals();
    let tc = cls.totals();
    Ok(([te[0], te[1]], [tc[0], tc[1]]))
}

pub fn run(sc: &Scenario) -> Result<RunOutput> {
    match &sc.protocol {
        Protocol::FreqCorrelations { cases, t2_fs } => {
            let mut maps = Vec::new();
            let mut entropies = Vec::new();
            for (idx, &(v, rho)) in cases.iter().enumerate() {
                let (w1, w2) = (w2r(11_000.0), w2r(11_500.0));
                let pm = PhaseMatching::gaussian(rho * t2_fs, *t2_fs, w1, w2)?;
                let pump = PumpEnvelope::new(w1 + w2, v / t2_fs, 1e-3)?;
                let (axa, axb) = gaussian_support_axes(&pump, &pm, 4.7, sc.grid.points)?;
                let state = build_two_photon_amplitude(pump, pm, axa, axb)?;
                let modes = schmidt_decompose(&state, SchmidtMethod::Numeric, 1e-10)?;
                let e = entanglement_entropy(&modes)?;
                entropies.push(json!({"sigma_p_t2": v, "walkoff_ratio": rho, "entropy": e}));
                let vals: Vec<f64> = state.amplitude.values.iter().map(|c| c.norm()).collect();
                maps.push(SignalMap::real_2d(
                    &format!("{}-case{}", sc.id, idx),
                    axis_meta("omega_a", axa),
                    axis_meta("omega_b", axb),
                    vals,
                )?);
            }
            Ok(RunOutput { maps, summary: json!({ "entropies": entropies }) })
        }

        Protocol::FPopulations {
            pump_center_cm,
            pump_halfspan_cm,
            scan_points,
            pump_sigma_cm,
            entanglement_time_fs,
        } => {
            let sys = build_model(&sc.model)?;
            let axis = FrequencyAxis::centered(
                w2r(*pump_center_cm),
                w2r(*pump_halfspan_cm),
                *scan_points,
            )?;
            let mut ent = Vec::with_capacity(axis.count());
            let mut cls = Vec::with_capacity(axis.count());
            for wp in axis.iter() {
                let (e, c) =
                    fpop_point(&sys, wp, w2r(*pump_sigma_cm), *entanglement_time_fs, sc.grid.points)?;
                ent.push(e[1] / (e[0] + e[1]));
                cls.push(c[1] / (c[0] + c[1]));
            }
            let meta = axis_meta("omega_p", axis);
            let at_center = axis.nearest_index(w2r(*pump_center_cm));
            let summary = json!({
                "entangled_f2_fraction": ent[at_center],
                "classical_f2_fraction": cls[at_center],
            });
            Ok(RunOutput {
                maps: vec![
                    SignalMap::real_1d(&format!("{}-entangled", sc.id), meta.clone(), ent)?,
                    SignalMap::real_1d(&format!("{}-classical", sc.id), meta, cls)?,
                ],
                summary,
            })
        }

        Protocol::ActionSpectrum {
            pump_center_cm,
            pump_halfspan_cm,
            scan_points,
            pump_sigma_cm,
            entanglement_time_fs,
        } => {
            let sys = build_model(&sc.model)?;
            let axis = FrequencyAxis::centered(
                w2r(*pump_center_cm),
                w2r(*pump_halfspan_cm),
                *scan_points,
            )?;
            let (w1, w2) = (w2r(11_000.0), w2r(11_500.0));
            let mut ent = Vec::new();
            let mut cls = Vec::new();
            for wp in axis.iter() {
                let ax = FrequencyAxis::centered(wp / 2.0, w2r(1_600.0), sc.grid.points)?;
                let pm = PhaseMatching::type_ii(0.0, *entanglement_time_fs, w1, w2)?;
                let pump = PumpEnvelope::new(wp, w2r(*pump_sigma_cm), 1e-4)?;
                let state = build_two_photon_amplitude(pump, pm, ax, ax)?;
                let modes = schmidt_decompose(&state, SchmidtMethod::Numeric, 1e-8)?;
                let fc = field_correlators(&modes)?;
                let pe = f_populations(
                    &sys,
                    &FourPointKernel::from_correlators(&fc),
                    PathwayTime::Integrated,
                )?;
                ent.push(tpif_signal(&sys, &pe, true));
                let sp = w2r(*pump_sigma_cm);
                // classical comparison: one degenerate pulse at wp/2
                let kernel_c = FourPointKernel::classical_product(ax, |w| {
                    C64::new(
                        (2.0 * PI).sqrt() / sp * (-(w - wp / 2.0).powi(2) / (2.0 * sp * sp)).exp(),
                        0.0,
                    )
                });
                let pc = f_populations(&sys, &kernel_c, PathwayTime::Integrated)?;
                cls.push(tpif_signal(&sys, &pc, true));
            }
            // normalized peak comparability summary
            let peak = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
            let summary = json!({
                "entangled_peak": peak(&ent),
                "classical_peak": peak(&cls),
            });
            let meta = axis_meta("omega_p", axis);
            Ok(RunOutput {
                maps: vec![
                    SignalMap::real_1d(&format!("{}-entangled", sc.id), meta.clone(), ent)?,
                    SignalMap::real_1d(&format!("{}-classical", sc.id), meta, cls)?,
                ],
                summary,
            })
        }

        Protocol::LopLapMaps { halfspan_cm } => {
            let sys = build_model(&sc.model)?;
            let train = PulseTrain::impulsive([0.0; 4]);
            let n = sc.grid.points;
            let half = w2r(*halfspan_cm);
            let center1 = 0.5 * (sys.e[0] + sys.e[1]);
            let ax1 = FrequencyAxis::centered(center1, half, n)?;
            let ax3_lop = FrequencyAxis::centered(-center1, half, n)?;
            let ax3_lap = FrequencyAxis::centered(sys.e[0] - sys.f[0], half, n)?;
            let mut lop = Vec::with_capacity(n * n);
            let mut lap = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let l = lop_frequency_map_classical(&sys, &train, Branch::KII, ax1.at(i), ax3_lop.at(j))
                        + lop_frequency_map_classical(&sys, &train, Branch::KIII, ax1.at(i), ax3_lop.at(j));
                    lop.push(l);
                    let m = lap_frequency_map_classical(&sys, &train, Branch::KII, ax1.at(i), ax3_lap.at(j))
                        + lap_frequency_map_classical(&sys, &train, Branch::KIII, ax1.at(i), ax3_lap.at(j));
                    lap.push(m);
                }
            }
            Ok(RunOutput {
                maps: vec![
                    SignalMap::complex_2d(
                        &format!("{}-lop", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3_lop),
                        lop,
                    )?,
                    SignalMap::complex_2d(
                        &format!("{}-lap", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3_lap),
                        lap,
                    )?,
                ],
                summary: json!({}),
            })
        }

        Protocol::W1W3 { entanglement_time_fs, halfspan_cm } => {
            // three singly excited states sharing one f-state
            let sys = LevelSystem::new(
                &[11_000.0, 11_250.0, 11_500.0],
                &[22_400.0],
                vec![C64::new(1.0, 0.0); 3],
                ndarray::array![
                    [C64::new(1.0, 0.0)],
                    [C64::new(0.9, 0.0)],
                    [C64::new(0.8, 0.0)]
                ],
                &[100.0; 3],
                &[100.0],
                Dephasing::Explicit {
                    eg: w2r(100.0),
                    fg: w2r(100.0),
                    fe: w2r(100.0),
                    ee: w2r(8.0),
                    ff: w2r(100.0),
                },
                None,
            )?;
            let n = sc.grid.points;
            let half = w2r(*halfspan_cm);
            let center = 0.5 * (sys.e[0] + sys.e[2]);
            let ax1 = FrequencyAxis::centered(center, half, n)?;
            let ax3 = FrequencyAxis::centered(-center, half, n)?;
            let pair = CwPair {
                omega_p: sys.f[0],
                omega1: sys.e[0],
                omega2: sys.e[2],
                t_ent: *entanglement_time_fs,
                amplitude: 1.0,
            };
            let integ = FrequencyAxis::centered(center, 2.2 * half, 3 * n)?;
            let ent_map = lop_entangled_map(&sys, &pair, Branch::KII, ax1, ax3, integ, None)?;
            let train = PulseTrain::impulsive([0.0; 4]);
            let mut cls = Vec::with_capacity(n * n);
            let mut ent = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    cls.push(
                        lop_frequency_map_classical(&sys, &train, Branch::KII, ax1.at(i), ax3.at(j)),
                    );
                    ent.push(ent_map[(i, j)]);
                }
            }
            Ok(RunOutput {
                maps: vec![
                    SignalMap::complex_2d(
                        &format!("{}-classical", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3),
                        cls,
                    )?,
                    SignalMap::complex_2d(
                        &format!("{}-entangled", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3),
                        ent,
                    )?,
                ],
                summary: json!({}),
            })
        }

        Protocol::Dqc { entanglement_time_fs, pump_sigma_cm, halfspan_cm } => {
            let sys = build_model(&sc.model)?;
            let n = sc.grid.points;
            let half = w2r(*halfspan_cm);
            let ax1 = FrequencyAxis::centered(0.5 * (sys.e[0] + sys.e[sys.e.len() - 1]), half, n)?;
            let ax3 = FrequencyAxis::centered(sys.f[0] - sys.e[0], half, n)?;
            let ax2 = FrequencyAxis::centered(sys.f[0], half, n)?;
            let sigma = w2r(*pump_sigma_cm);
            let mut w13 = Vec::with_capacity(n * n);
            let mut w12 = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    w13.push(dqc_entangled_map(
                        &sys,
                        sys.f[0],
                        1.0 / sigma,
                        1.0,
                        *entanglement_time_fs,
                        DqcDisplay::W1W3,
                        ax1.at(i),
                        ax3.at(j),
                    ));
                    w12.push(dqc_entangled_map(
                        &sys,
                        sys.f[0],
                        1.0 / sigma,
                        1.0,
                        *entanglement_time_fs,
                        DqcDisplay::W1W2,
                        ax1.at(i),
                        ax2.at(j),
                    ));
                }
            }
            // classical reference on the W1W3 display
            let env = GaussEnvelope { center: 0.0, sigma, amplitude: 1.0 };
            let mut cls = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    cls.push(dqc_classical_map(
                        &sys,
                        &[env; 4],
                        sys.f[0] / 2.0,
                        DqcDisplay::W1W3,
                        ax1.at(i),
                        ax3.at(j),
                    ));
                }
            }
            Ok(RunOutput {
                maps: vec![
                    SignalMap::complex_2d(
                        &format!("{}-w1w3", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3),
                        w13,
                    )?,
                    SignalMap::complex_2d(
                        &format!("{}-w1w2", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_2", ax2),
                        w12,
                    )?,
                    SignalMap::complex_2d(
                        &format!("{}-classical-w1w3", sc.id),
                        axis_meta("omega_1", ax1),
                        axis_meta("omega_3", ax3),
                        cls,
                    )?,
                ],
                summary: json!({}),
            })
        }

        Protocol::TpcSlices { delta_cm, jump_rate_cm, gamma_cm, probe_sigma_cm, delays_fs } => {
            let model = TwoStateJump::from_wavenumbers(11_000.0, *delta_cm, *jump_rate_cm, *gamma_cm);
            let probe = gaussian_probe(w2r(*probe_sigma_cm), model.omega_center);
            let n = sc.grid.points;
            let waxis = FrequencyAxis::centered(model.omega_center, w2r(4.0 * delta_cm + 400.0), n)?;
            let mut rows = Vec::with_capacity(delays_fs.len() * n);
            for &t0 in delays_fs {
                for j in 0..n {
                    rows.push(-ipp_signal(&model, &probe, C64::new(1.0, 0.0), waxis.at(j), t0)?);
                }
            }
            let t_meta = AxisMeta::new("delay", "fs", delays_fs[0], if delays_fs.len() > 1 {
                delays_fs[1] - delays_fs[0]
            } else {
                1.0
            }, delays_fs.len());
            Ok(RunOutput {
                maps: vec![SignalMap::new(
                    &format!("{}-ipp", sc.id),
                    vec![t_meta, axis_meta("omega", waxis)],
                    SignalValues::Real(rows),
                )?],
                summary: json!({}),
            })
        }

        Protocol::Wig { t1_fs, t2_fs, pump_sigma_cm, delta_cm, jump_rate_cm, gamma_cm } => {
            let model = TwoStateJump::from_wavenumbers(1_000.0, *delta_cm, *jump_rate_cm, *gamma_cm);
            let twin = TwinState {
                variant: TwinVariant::Entangled,
                t1: *t1_fs,
                t2: *t2_fs,
                sigma0: w2r(*pump_sigma_cm),
                omega0: w2r(12_000.0),
                a0: 1.0,
            };
            let wp = w2r(12_700.0);
            let n = sc.grid.points;
            let waxis = FrequencyAxis::centered(wp + model.omega_center, w2r(4.0 * delta_cm + 300.0), n)?;
            let tau = 6.0;
            let orders =
                [("loss", RamanOrder::Loss), ("coincidence", RamanOrder::Coincidence), ("gain", RamanOrder::Gain)];
            let mut maps = Vec::new();
            for (name, order) in orders {
                let vals: Vec<f64> = (0..n)
                    .map(|j| {
                        ifsrs_signal(&model, 1.0, 1.0, &twin, order, waxis.at(j), twin.omega0, wp, tau)
                    })
                    .collect();
                maps.push(SignalMap::real_1d(
                    &format!("{}-{}", sc.id, name),
                    axis_meta("omega_s", waxis),
                    vals,
                )?);
            }
            let cls: Vec<f64> = (0..n)
                .map(|j| fsrs_classical(&model, 1.0, 1.0, wp, w2r(500.0), waxis.at(j), wp, tau))
                .collect();
            maps.push(SignalMap::real_1d(
                &format!("{}-classical", sc.id),
                axis_meta("omega_s", waxis),
                cls,
            )?);
            // uncertainty witness on the same twin
            let wit_ax = FrequencyAxis::centered(twin.omega0, 6.0 * twin.sigma0, 241)?;
            let wit_t = TimeAxis::centered(0.0, 400.0, 241)?;
            let (dw, dt) = twin_uncertainty_witness(&twin, twin.omega0, wit_ax, wit_t);
            let cls_twin = TwinState { variant: TwinVariant::Uncorrelated, ..twin };
            let (dwc, dtc) = twin_uncertainty_witness(&cls_twin, cls_twin.omega0, wit_ax, wit_t);
            Ok(RunOutput {
                maps,
                summary: json!({
                    "witness_entangled": dw * dt,
                    "witness_classical": dwc * dtc,
                }),
            })
        }

        Protocol::Pdc2 { idler_detuning_cm, second_line_offset_cm, gate_sigma_cm, halfspan_cm } => {
            let m = ThreeLevelModel::from_wavenumbers(9_000.0, 11_000.0, 40.0);
            let n = sc.grid.points;
            let span = w2r(*halfspan_cm);
            let pump_axis = FrequencyAxis::centered(m.omega_fg(), span, n)?;
            let sig_axis =
                FrequencyAxis::centered(m.omega_eg + (m.omega_fe - m.omega_eg) / 2.0, span, n)?;
            let gate = w2r(*gate_sigma_cm);
            let mut maps = Vec::new();
            let configs = [
                ("resonant", m.omega_eg, None),
                ("detuned", m.omega_eg - w2r(*idler_detuning_cm), None),
                ("two-line", m.omega_eg, Some(w2r(*second_line_offset_cm))),
            ];
            for (name, idler, extra) in configs {
                let map = pdc_pcc_map(&m, pump_axis, sig_axis, extra, idler, gate);
                maps.push(SignalMap::real_2d(
                    &format!("{}-{}", sc.id, name),
                    axis_meta("omega_p", pump_axis),
                    axis_meta("omega_s", sig_axis),
                    map.into_iter().collect(),
                )?);
            }
            Ok(RunOutput { maps, summary: json!({}) })
        }

        Protocol::HomDip {
            delta_mhz,
            lambda_mhz,
            relax_a_mhz,
            relax_b_mhz,
            offset_mhz,
            sigma_t_mhz,
            sigma_w_sweep_mhz,
            detection_ns,
        } => {
            let mol = |off: f64, relax: f64| SpectralDiffusion {
                omega0: w2r(15_000.0) + mhz_to_radfs(off),
                lambda: mhz_to_radfs(*lambda_mhz),
                relaxation: mhz_to_radfs(relax),
                delta: mhz_to_radfs(*delta_mhz),
            };
            let t_det = detection_ns * 1e6;
            let delays = TimeAxis::centered(0.0, 4.0e10, sc.grid.points.max(33) | 1)?;
            let mut maps = Vec::new();
            let mut dips = Vec::new();
            for &sw in sigma_w_sweep_mhz {
                let gate = HomGate {
                    sigma_w: mhz_to_radfs(sw),
                    sigma_t: mhz_to_radfs(*sigma_t_mhz),
                    t_center: t_det,
                };
                let setup = HomSetup {
                    mol_a: mol(0.0, *relax_a_mhz),
                    mol_b: mol(*offset_mhz, *relax_b_mhz),
                    gate_r: gate,
                    gate_s: gate,
                    classical_reference: false,
                };
                let trace: Vec<f64> = delays.iter().map(|t| hom_pcc(&setup, t).0).collect();
                let dip = trace.iter().cloned().fold(f64::INFINITY, f64::min);
                dips.push(json!({"sigma_w_mhz": sw, "dip": dip}));
                maps.push(SignalMap::real_1d(
                    &format!("{}-sw{}", sc.id, sw as i64),
                    AxisMeta::new("delay", "fs", delays.start(), delays.step(), delays.count()),
                    trace,
                )?);
            }
            Ok(RunOutput { maps, summary: json!({ "dips": dips }) })
        }
    }
}

/// Entries of the bundled catalog (id, embedded TOML).
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("freq-correlations", include_str!("../scenarios/freq-correlations.toml")),
        ("f-pop", include_str!("../scenarios/f-pop.toml")),
        ("actionspectrum", include_str!("../scenarios/actionspectrum.toml")),
        ("loplap", include_str!("../scenarios/loplap.toml")),
        ("w1w3", include_str!("../scenarios/w1w3.toml")),
        ("dqc", include_str!("../scenarios/dqc.toml")),
        ("tpc-slices", include_str!("../scenarios/tpc-slices.toml")),
        ("wig", include_str!("../scenarios/wig.toml")),
        ("pdc2", include_str!("../scenarios/pdc2.toml")),
        ("hom-dip", include_str!("../scenarios/hom-dip.toml")),
    ]
}

/// Human-oriented note attached by `run` diagnostics.
pub fn describe_units() -> String {
    format!(
        "frequencies in rad/fs (1 cm^-1 = {:.6e} rad/fs), inverse: {:.3} cm^-1 per rad/fs",
        w2r(1.0),
        radfs_to_wavenumber(1.0)
    )
}
