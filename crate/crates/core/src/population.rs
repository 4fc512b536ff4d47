//! Doubly-excited-state populations and fluorescence-detected signals:
//! entangled vs classical two-photon amplitudes, density-matrix pathways
//! with transport, TPIF action spectra, virtual-state delay scans, the
//! two-atom cascade and the pair/autocorrelation intensity crossover.

use crate::axis::{FrequencyAxis, TimeAxis};
use crate::error::{Diagnostic, QsError, Result};
use crate::field_states::FieldCorrelators;
use crate::matter::{Level, LevelSystem};
use crate::numerics::{fourier_1d, local_maxima, FtSign};
use crate::C64;
use ndarray::Array2;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Four-point field correlator `<E^dag(wa') E^dag(wb') E(wb) E(wa)>`
/// sampled on one frequency axis, split into a pair (two-photon) part
/// `pair(wa, wb)` and an autocorrelation part `auto(w, w')`:
///
/// `C = pair^*(wa', wb') pair(wa, wb) + auto(wa, wa') auto(wb, wb')
///    + auto(wa, wb') auto(wb, wa')`.
#[derive(Debug, Clone)]
pub struct FourPointKernel {
    pub axis: FrequencyAxis,
    pub pair: Option<Array2<C64>>,
    pub auto: Option<Array2<C64>>,
}

impl FourPointKernel {
    pub fn from_correlators(fc: &FieldCorrelators) -> Self {
        Self { axis: fc.axis, pair: Some(fc.pair.clone()), auto: Some(fc.auto.clone()) }
    }

    /// Keep only the coherent pair term of a correlator set.
    pub fn pair_part(fc: &FieldCorrelators) -> Self {
        Self { axis: fc.axis, pair: Some(fc.pair.clone()), auto: None }
    }

    /// Factorized classical field: `pair(wa, wb) = A(wa) A(wb)`, no
    /// autocorrelation term (stimulated product state).
    pub fn classical_product(axis: FrequencyAxis, field: impl Fn(f64) -> C64) -> Self {
        let a: Vec<C64> = axis.iter().map(&field).collect();
        let n = axis.count();
        let pair = Array2::from_shape_fn((n, n), |(i, j)| a[i] * a[j]);
        Self { axis, pair: Some(pair), auto: None }
    }

    #[inline]
    fn value(&self, ia_p: usize, ib_p: usize, ib: usize, ia: usize) -> C64 {
        let mut v = C64::new(0.0, 0.0);
        if let Some(p) = &self.pair {
            v += p[(ia_p, ib_p)].conj() * p[(ia, ib)];
        }
        if let Some(g) = &self.auto {
            v += g[(ia, ia_p)] * g[(ib, ib_p)] + g[(ia, ib_p)] * g[(ib, ia_p)];
        }
        v
    }

    /// Fraction of the kernel weight on the grid boundary; a proxy for
    /// insufficient coverage.
    fn edge_fraction(&self) -> f64 {
        let Some(p) = &self.pair else { return 0.0 };
        let n = self.axis.count();
        let max = p.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0.0;
        }
        let mut edge = 0.0_f64;
        for i in 0..n {
            edge = edge
                .max(p[(0, i)].norm())
                .max(p[(n - 1, i)].norm())
                .max(p[(i, 0)].norm())
                .max(p[(i, n - 1)].norm());
        }
        edge / max
    }
}

/// When to evaluate the pathway integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathwayTime {
    /// `int dt p_f(t)`; the energy-balance delta collapses one integral.
    Integrated,
    /// Snapshot at a fixed time (fs).
    At(f64),
}

/// Complex pathway contributions for one final state; the physical
/// population is `2 Re (I + II + III)` (conjugate diagrams double the
/// real part).
#[derive(Debug, Clone, Copy)]
pub struct FPathways {
    pub pathway_i: C64,
    pub pathway_ii: C64,
    pub pathway_iii: C64,
}

impl FPathways {
    pub fn total(&self) -> f64 {
        2.0 * (self.pathway_i + self.pathway_ii + self.pathway_iii).re
    }
}

/// Populations of every f-state with the pathway breakdown.
#[derive(Debug, Clone)]
pub struct PathwayResult {
    pub per_f: Vec<FPathways>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PathwayResult {
    pub fn totals(&self) -> Vec<f64> {
        self.per_f.iter().map(|p| p.total()).collect()
    }
}

/// Resolvent of the e-population block, split into the conserved zero mode
/// (equilibrium projector) and the regular remainder.
struct PopulationResolvent {
    p0: Array2<f64>,
    shifted: Array2<f64>,
    has_zero_mode: bool,
}

impl PopulationResolvent {
    fn new(system: &LevelSystem) -> Result<Self> {
        let n = system.e.len();
        let mut m = match &system.transport {
            Some(k) => k.clone(),
            None => Array2::zeros((n, n)),
        };
        let mut decaying = false;
        for e in 0..n {
            let g = system.gamma_population(Level::Single(e));
            if g > 0.0 {
                decaying = true;
            }
            m[(e, e)] -= g;
        }
        let p0 = if decaying {
            Array2::zeros((n, n))
        } else {
            // long-time limit of exp(M t): columns hold the equilibrium
            crate::numerics::matrix_exp(&m, 1e7)?
        };
        let shifted = &p0 - &m;
        Ok(Self { p0, shifted, has_zero_mode: !decaying })
    }

    /// Regular part of `int_0^inf exp(M t) e^{i d t} dt`, i.e. the resolvent
    /// without the `i P0 / (d + i0)` zero-mode term. `P0` commutes with `M`,
    /// so shifting by `P0` regularizes the inversion without touching the
    /// complement.
    fn regular(&self, detuning: f64) -> Array2<C64> {
        let n = self.shifted.nrows();
        let a = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| {
            C64::new(self.shifted[(i, j)], if i == j { -detuning } else { 0.0 })
        });
        let inv = a.try_inverse().expect("population resolvent is invertible");
        let mut out = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let mut v = inv[(i, j)];
                if self.has_zero_mode {
                    let p = self.p0[(i, j)];
                    if p != 0.0 {
                        v -= p / C64::new(1.0, -detuning);
                    }
                }
                out[(i, j)] = v;
            }
        }
        out
    }
}

struct Workspace<'a> {
    system: &'a LevelSystem,
    kernel: &'a FourPointKernel,
    /// ket factor per f: `sum_e mu_ge mu_ef G_eg(wa)` (pathway I).
    ket_i: Vec<Vec<C64>>,
    /// bra factor per f on the extended lattice:
    /// `sum_e' mu_ge'^* mu_e'f^* G_fe'(x)`.
    bra_i: Vec<Vec<C64>>,
    /// `G_fg` on the sum lattice (`2 start + s step`), per f.
    gfg: Vec<Vec<C64>>,
    /// `G_fe'(x)` per (f, e') on the extended lattice.
    gfe: Vec<Vec<Vec<C64>>>,
    /// `G_e''f(-x)` per (f, e'') on the extended lattice.
    gef_neg: Vec<Vec<Vec<C64>>>,
    geg: Vec<Vec<C64>>,
    /// coherence-block propagators `i G_ee'(d)` per (e, e') on the
    /// detuning lattice.
    coh: Vec<Vec<Vec<C64>>>,
    resolvent: PopulationResolvent,
    rreg: Vec<Array2<C64>>,
    gff0: Vec<C64>,
    n: usize,
}

impl<'a> Workspace<'a> {
    fn new(system: &'a LevelSystem, kernel: &'a FourPointKernel) -> Result<Self> {
        let axis = kernel.axis;
        let n = axis.count();
        let ne = system.e.len();
        let nf = system.f.len();
        // extended lattice index m (offset n-1) holds x = start + (m - (n-1)) step,
        // covering x = wa + wb - wa' and x = -wb for all in-range combinations
        let next = 3 * n - 2;
        let moff = n as isize - 1;
        let ext_val = |m: usize| axis.start() + axis.step() * (m as isize - moff) as f64;

        let mut geg = vec![vec![C64::new(0.0, 0.0); n]; ne];
        for (e, row) in geg.iter_mut().enumerate() {
            let g = system.greens_fn(Level::Single(e), Level::Ground)?;
            for (i, v) in row.iter_mut().enumerate() {
                *v = g.freq(axis.at(i));
            }
        }
        let mut ket_i = vec![vec![C64::new(0.0, 0.0); n]; nf];
        for (f, row) in ket_i.iter_mut().enumerate() {
            for e in 0..ne {
                let mu = system.mu_ge[e] * system.mu_ef[(e, f)];
                for (i, v) in row.iter_mut().enumerate() {
                    *v += mu * geg[e][i];
                }
            }
        }
        let mut gfg = vec![vec![C64::new(0.0, 0.0); 2 * n - 1]; nf];
        for (f, row) in gfg.iter_mut().enumerate() {
            let g = system.greens_fn(Level::Double(f), Level::Ground)?;
            for (s, v) in row.iter_mut().enumerate() {
                *v = g.freq(2.0 * axis.start() + axis.step() * s as f64);
            }
        }
        let mut gfe = vec![vec![vec![C64::new(0.0, 0.0); next]; ne]; nf];
        let mut bra_i = vec![vec![C64::new(0.0, 0.0); next]; nf];
        for f in 0..nf {
            for e in 0..ne {
                let g = system.greens_fn(Level::Double(f), Level::Single(e))?;
                for m in 0..next {
                    gfe[f][e][m] = g.freq(ext_val(m));
                }
                let mu = (system.mu_ge[e] * system.mu_ef[(e, f)]).conj();
                for m in 0..next {
                    bra_i[f][m] += mu * gfe[f][e][m];
                }
            }
        }
        let mut gef_neg = vec![vec![vec![C64::new(0.0, 0.0); next]; ne]; nf];
        for f in 0..nf {
            for e in 0..ne {
                let g = system.greens_fn(Level::Single(e), Level::Double(f))?;
                for m in 0..next {
                    gef_neg[f][e][m] = g.freq(-ext_val(m));
                }
            }
        }
        let mut coh = vec![vec![vec![C64::new(0.0, 0.0); 2 * n - 1]; ne]; ne];
        for e in 0..ne {
            for ep in 0..ne {
                if e == ep {
                    continue;
                }
                let g = system.greens_fn(Level::Single(e), Level::Single(ep))?;
                for m in 0..(2 * n - 1) {
                    let d = axis.step() * (m as f64 - (n as f64 - 1.0));
                    coh[e][ep][m] = g.freq(d);
                }
            }
        }
        let resolvent = PopulationResolvent::new(system)?;
        let rreg: Vec<Array2<C64>> = (0..(2 * n - 1))
            .map(|m| resolvent.regular(axis.step() * (m as f64 - (n as f64 - 1.0))))
            .collect();
        let gff0: Vec<C64> = (0..nf)
            .map(|f| 1.0 / C64::new(0.0, system.gamma_population(Level::Double(f))))
            .collect();
        Ok(Self {
            system,
            kernel,
            ket_i,
            bra_i,
            gfg,
            gfe,
            gef_neg,
            geg,
            coh,
            resolvent,
            rreg,
            gff0,
            n,
        })
    }

    #[inline]
    fn ext_index(&self, m: isize) -> usize {
        (m + self.n as isize - 1) as usize
    }

    /// Time-integrated pathway sums for one f; the energy-conservation delta
    /// fixes `wb' = wa + wb - wa'` and the measure is `(dw / 2 pi)^3`.
    fn integrated(&self, f: usize) -> FPathways {
        let n = self.n;
        let ne = self.system.e.len();
        let dw = self.kernel.axis.step();
        let gff0 = self.gff0[f];

        let rows: Vec<(C64, C64, C64)> = (0..n)
            .into_par_iter()
            .map(|ia| {
                let mut acc_i = C64::new(0.0, 0.0);
                let mut acc_ii = C64::new(0.0, 0.0);
                let mut acc_iii = C64::new(0.0, 0.0);
                for ib in 0..n {
                    let isum = ia + ib;
                    let gfg = self.gfg[f][isum];
                    // gef_neg[m] holds G(-ext_val(m)); -wb sits at m = ib + n - 1
                    let m_negb = self.ext_index(ib as isize);
                    for iap in 0..n {
                        let ibp = isum as isize - iap as isize;
                        if ibp < 0 || ibp >= n as isize {
                            continue;
                        }
                        let c = self.kernel.value(iap, ibp as usize, ib, ia);
                        if c.re == 0.0 && c.im == 0.0 {
                            continue;
                        }
                        let mx = self.ext_index(isum as isize - iap as isize);
                        acc_i += c * self.ket_i[f][ia] * gfg * self.bra_i[f][mx];

                        let dm = ia as isize - iap as isize;
                        let dmi = (dm + n as isize - 1) as usize;
                        let detuning = dw * dm as f64;
                        // coherence block: e != e', e'' = e, e''' = e'
                        for e in 0..ne {
                            for ep in 0..ne {
                                if e == ep {
                                    continue;
                                }
                                let front = self.system.mu_ge[e]
                                    * self.system.mu_ge[ep].conj()
                                    * self.geg[e][ia]
                                    * self.coh[e][ep][dmi]
                                    * self.system.mu_ef[(e, f)]
                                    * self.system.mu_ef[(ep, f)].conj();
                                acc_ii += c * front * self.gfe[f][ep][mx];
                                acc_iii += c * front * self.gef_neg[f][e][m_negb];
                            }
                        }
                        // population block: e = e', e'' = e'''
                        for e in 0..ne {
                            let front = self.system.mu_ge[e].norm_sqr() * self.geg[e][ia];
                            for epp in 0..ne {
                                let w_ef = self.system.mu_ef[(epp, f)].norm_sqr();
                                let mut prop = self.rreg[dmi][(epp, e)];
                                if self.resolvent.has_zero_mode {
                                    let p0 = self.resolvent.p0[(epp, e)];
                                    if dm != 0 {
                                        prop += C64::i() * p0 / detuning;
                                    } else {
                                        prop += p0 * PI / dw;
                                    }
                                }
                                let amp = c * front * prop * w_ef * C64::new(0.0, -1.0);
                                acc_ii += amp * self.gfe[f][epp][mx];
                                acc_iii += amp * self.gef_neg[f][epp][m_negb];
                            }
                        }
                    }
                }
                (acc_i * gff0, acc_ii * gff0, acc_iii * gff0)
            })
            .collect();

        let meas = (dw / (2.0 * PI)).powi(3);
        let mut out = FPathways {
            pathway_i: C64::new(0.0, 0.0),
            pathway_ii: C64::new(0.0, 0.0),
            pathway_iii: C64::new(0.0, 0.0),
        };
        for (a, b, c) in rows {
            out.pathway_i += a * meas;
            out.pathway_ii += b * meas;
            out.pathway_iii += c * meas;
        }
        out
    }

    /// Snapshot pathway sums at time `t` (full quadruple sum).
    fn at_time(&self, f: usize, t: f64) -> FPathways {
        let n = self.n;
        let ne = self.system.e.len();
        let dw = self.kernel.axis.step();
        let gff = self.system.greens_fn(Level::Double(f), Level::Double(f)).unwrap();

        let rows: Vec<(C64, C64, C64)> = (0..n)
            .into_par_iter()
            .map(|ia| {
                let mut acc_i = C64::new(0.0, 0.0);
                let mut acc_ii = C64::new(0.0, 0.0);
                let mut acc_iii = C64::new(0.0, 0.0);
                for ib in 0..n {
                    let isum = ia + ib;
                    let gfg = self.gfg[f][isum];
                    for iap in 0..n {
                        let dm = ia as isize - iap as isize;
                        let dmi = (dm + n as isize - 1) as usize;
                        let detuning = dw * dm as f64;
                        let mx = self.ext_index(isum as isize - iap as isize);
                        for ibp in 0..n {
                            let c = self.kernel.value(iap, ibp, ib, ia);
                            if c.re == 0.0 && c.im == 0.0 {
                                continue;
                            }
                            let sigma_t = dw * (isum as isize - iap as isize - ibp as isize) as f64;
                            let cg = c * C64::from_polar(1.0, -sigma_t * t) * gff.freq(sigma_t);
                            acc_i += cg * self.ket_i[f][ia] * gfg * self.bra_i[f][mx];

                            // x3 = wa - wa' - wb' = -(s0 + (iap + ibp - ia) dw)
                            let m3 = self.ext_index(iap as isize + ibp as isize - ia as isize);
                            for e in 0..ne {
                                for ep in 0..ne {
                                    if e == ep {
                                        continue;
                                    }
                                    let front = self.system.mu_ge[e]
                                        * self.system.mu_ge[ep].conj()
                                        * self.geg[e][ia]
                                        * self.coh[e][ep][dmi]
                                        * self.system.mu_ef[(e, f)]
                                        * self.system.mu_ef[(ep, f)].conj();
                                    acc_ii += cg * front * self.gfe[f][ep][mx];
                                    acc_iii += cg * front * self.gef_neg[f][e][m3];
                                }
                            }
                            for e in 0..ne {
                                let front = self.system.mu_ge[e].norm_sqr() * self.geg[e][ia];
                                for epp in 0..ne {
                                    let w_ef = self.system.mu_ef[(epp, f)].norm_sqr();
                                    let mut prop = self.rreg[dmi][(epp, e)];
                                    if self.resolvent.has_zero_mode {
                                        let p0 = self.resolvent.p0[(epp, e)];
                                        if dm != 0 {
                                            prop += C64::i() * p0 / detuning;
                                        } else {
                                            prop += p0 * PI / dw;
                                        }
                                    }
                                    let amp = cg * front * prop * w_ef * C64::new(0.0, -1.0);
                                    acc_ii += amp * self.gfe[f][epp][mx];
                                    acc_iii += amp * self.gef_neg[f][epp][m3];
                                }
                            }
                        }
                    }
                }
                (acc_i, acc_ii, acc_iii)
            })
            .collect();

        let meas = (dw / (2.0 * PI)).powi(4);
        let mut out = FPathways {
            pathway_i: C64::new(0.0, 0.0),
            pathway_ii: C64::new(0.0, 0.0),
            pathway_iii: C64::new(0.0, 0.0),
        };
        for (a, b, c) in rows {
            out.pathway_i += a * meas;
            out.pathway_ii += b * meas;
            out.pathway_iii += c * meas;
        }
        out
    }
}

/// Evaluate the three density-matrix pathways for every f-state against a
/// four-point field kernel.
pub fn f_populations(
    system: &LevelSystem,
    kernel: &FourPointKernel,
    time: PathwayTime,
) -> Result<PathwayResult> {
    system.validate()?;
    let ws = Workspace::new(system, kernel)?;
    let mut diagnostics = Vec::new();
    let edge = kernel.edge_fraction();
    if edge > 1e-3 {
        diagnostics.push(Diagnostic::new(
            "grid-coverage",
            format!("four-point kernel carries {edge:.2e} of its peak weight on the grid edge"),
        ));
    }
    if let PathwayTime::At(t) = time {
        // the e^{-i sigma t} factor must be resolved by the lattice
        if kernel.axis.step() * t.abs() > 1.0 {
            diagnostics.push(Diagnostic::new(
                "time-resolution",
                format!(
                    "snapshot at t = {t} fs under-resolved: dw * t = {:.2} rad per lattice step",
                    kernel.axis.step() * t.abs()
                ),
            ));
        }
    }
    let per_f = (0..system.f.len())
        .map(|f| match time {
            PathwayTime::Integrated => ws.integrated(f),
            PathwayTime::At(t) => ws.at_time(f, t),
        })
        .collect();
    Ok(PathwayResult { per_f, diagnostics })
}

/// Closed-form entangled two-photon transition amplitude of a cw-pumped
/// type-II pair with entanglement time `t_ent`:
/// `T_f = A_p / (T (w1 + w2 - w_f + i g_f)) sum_e mu_ge mu_ef [B(w1, e) + B(w2, e)]`
/// with `B(w, e) = (e^{i (w - w_e + i g_e) T} - 1)/(w - w_e + i g_e)`.
pub fn entangled_tpa_amplitude(
    system: &LevelSystem,
    t_ent: f64,
    w1: f64,
    w2: f64,
    pump_amp: f64,
) -> Result<Vec<C64>> {
    if !(t_ent > 0.0) {
        return Err(QsError::Contract(format!("entangled_tpa_amplitude: T must be > 0, got {t_ent}")));
    }
    let bracket = |w: f64, e: usize| -> C64 {
        let z = C64::new(w - system.e[e], system.gamma_e[e]);
        ((C64::i() * z * t_ent).exp() - 1.0) / z
    };
    Ok((0..system.f.len())
        .map(|f| {
            let pref = pump_amp / (t_ent * C64::new(w1 + w2 - system.f[f], system.gamma_f[f]));
            let mut s = C64::new(0.0, 0.0);
            for e in 0..system.e.len() {
                s += system.mu_ge[e] * system.mu_ef[(e, f)] * (bracket(w1, e) + bracket(w2, e));
            }
            pref * s
        })
        .collect())
}

/// Classical two-photon amplitude,
/// `T_f = A1 A2 sum_e mu_ge mu_ef / ((w1 - w_eg + i g_eg)(w2 - w_fe + i g_fe)) + (w1 <-> w2)`.
pub fn classical_tpa_amplitude(
    system: &LevelSystem,
    w1: f64,
    w2: f64,
    a1: C64,
    a2: C64,
) -> Result<Vec<C64>> {
    Ok((0..system.f.len())
        .map(|f| {
            let mut s = C64::new(0.0, 0.0);
            for e in 0..system.e.len() {
                let geg = system.gamma_pair(Level::Single(e), Level::Ground);
                let gfe = system.gamma_pair(Level::Double(f), Level::Single(e));
                let weg = system.e[e];
                let wfe = system.f[f] - system.e[e];
                let mu = system.mu_ge[e] * system.mu_ef[(e, f)];
                s += mu / (C64::new(w1 - weg, geg) * C64::new(w2 - wfe, gfe));
                s += mu / (C64::new(w2 - weg, geg) * C64::new(w1 - wfe, gfe));
            }
            a1 * a2 * s
        })
        .collect())
}

/// Fluorescence weights: `w_f = sum_e |mu_ef|^2` (radiative) or 1
/// (nonradiative variant measuring the bare populations).
pub fn tpif_weights(system: &LevelSystem, radiative: bool) -> Vec<f64> {
    (0..system.f.len())
        .map(|f| {
            if radiative {
                (0..system.e.len()).map(|e| system.mu_ef[(e, f)].norm_sqr()).sum()
            } else {
                1.0
            }
        })
        .collect()
}

/// TPIF action value for one scan point.
pub fn tpif_signal(system: &LevelSystem, populations: &PathwayResult, radiative: bool) -> f64 {
    let w = tpif_weights(system, radiative);
    populations.totals().iter().zip(w.iter()).map(|(p, w)| p * w).sum()
}

/// Relative-time profile of the photon pair in the virtual-state scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanProfile {
    /// rect window (sinc spectrum, long Lorentzian tails).
    Sinc,
    /// Gaussian window of matched central width (suppressed tails).
    Gaussian,
}

/// Resonance group labels of the virtual-state Fourier peaks.
#[derive(Debug, Clone, PartialEq)]
pub enum PeakGroup {
    /// `|Delta_e - Delta_e'|` (group A).
    DetuningDifference(usize, usize),
    /// `|Delta_e|` (group B).
    Detuning(usize),
    /// `|Delta_e + Delta_e'|` (group C; includes `2 Delta_e`).
    DetuningSum(usize, usize),
}

/// One classified Fourier peak of the delay scan.
#[derive(Debug, Clone)]
pub struct ClassifiedPeak {
    pub frequency: f64,
    pub amplitude: f64,
    pub group: Option<PeakGroup>,
}

/// Output of [`virtual_state_scan`].
#[derive(Debug, Clone)]
pub struct VirtualStateScan {
    pub tau: TimeAxis,
    /// `|T_fg(tau)|^2` summed over f.
    pub signal: Vec<f64>,
    pub fourier_start: f64,
    pub fourier_step: f64,
    /// Modulus of the Fourier transform of the signal.
    pub fourier: Vec<f64>,
    pub peaks: Vec<ClassifiedPeak>,
}

/// Entangled-photon virtual-state spectroscopy: delay scan of the TPIF
/// amplitude for degenerate down-conversion (`w1 = w2 = wp/2`) plus the
/// Fourier classification of its resonance groups.
///
/// `T_fg(tau) ~ sum_e mu mu / (wp - w_f + i g_f) int_0^inf ds
/// e^{i (Delta_e + i g_e) s} [chi(s - tau) + chi(s + tau)]`; for the rect
/// window this reproduces the closed bracket form
/// `[e^{i z (T - tau)} + e^{i z (T + tau)} - 2] / (i z T)`.
pub fn virtual_state_scan(
    system: &LevelSystem,
    profile: ScanProfile,
    omega_p: f64,
    t_ent: f64,
    tau: TimeAxis,
) -> Result<VirtualStateScan> {
    if !(t_ent > 0.0) {
        return Err(QsError::Contract("virtual_state_scan: T must be > 0".into()));
    }
    let half = omega_p / 2.0;
    let n_f = system.f.len();
    let n_quad = 4096;
    let smax = match profile {
        ScanProfile::Sinc => t_ent,
        ScanProfile::Gaussian => 6.0 * t_ent,
    };
    let chi = |x: f64| -> f64 {
        match profile {
            ScanProfile::Sinc => {
                if x.abs() <= t_ent {
                    1.0 / t_ent
                } else {
                    0.0
                }
            }
            ScanProfile::Gaussian => {
                let sg = (2.0 * crate::field_states::GAUSSIAN_PM_GAMMA).sqrt() * t_ent;
                (-(x * x) / (2.0 * sg * sg)).exp() / ((2.0 * PI).sqrt() * sg)
            }
        }
    };
    let amp_at = |tau_v: f64| -> Vec<C64> {
        let tmax = smax + tau_v.abs();
        let ds = tmax / n_quad as f64;
        (0..n_f)
            .map(|f| {
                let pref = 1.0 / C64::new(omega_p - system.f[f], system.gamma_f[f]);
                let mut total = C64::new(0.0, 0.0);
                for e in 0..system.e.len() {
                    let z = C64::new(half - system.e[e], system.gamma_e[e]);
                    let mu = system.mu_ge[e] * system.mu_ef[(e, f)];
                    let mut acc = C64::new(0.0, 0.0);
                    for q in 0..n_quad {
                        let s = (q as f64 + 0.5) * ds;
                        let w = chi(s - tau_v) + chi(s + tau_v);
                        if w != 0.0 {
                            acc += w * (C64::i() * z * s).exp();
                        }
                    }
                    total += mu * acc * ds;
                }
                pref * total
            })
            .collect()
    };

    let signal: Vec<f64> = tau
        .values()
        .par_iter()
        .map(|&t| amp_at(t).iter().map(|a| a.norm_sqr()).sum())
        .collect();

    let vals: Vec<C64> = signal.iter().map(|&s| C64::new(s, 0.0)).collect();
    let (f0, df, ft) = fourier_1d(tau.start(), tau.step(), &vals, FtSign::Plus)?;
    let fourier: Vec<f64> = ft.iter().map(|v| v.norm()).collect();

    // classify positive-frequency peaks against the detuning combinations
    let detunings: Vec<f64> = system.e.iter().map(|&we| half - we).collect();
    let mut candidates: Vec<(f64, PeakGroup)> = Vec::new();
    for (i, &di) in detunings.iter().enumerate() {
        candidates.push((di.abs(), PeakGroup::Detuning(i)));
        for (j, &dj) in detunings.iter().enumerate() {
            if j > i {
                candidates.push(((di - dj).abs(), PeakGroup::DetuningDifference(i, j)));
            }
            if j >= i {
                candidates.push(((di + dj).abs(), PeakGroup::DetuningSum(i, j)));
            }
        }
    }
    let tol = 2.0 * df;
    let mut peaks = Vec::new();
    for idx in local_maxima(&fourier, 0.01) {
        let freq = f0 + df * idx as f64;
        if freq <= 0.5 * df {
            continue;
        }
        let group = candidates
            .iter()
            .filter(|(w, _)| (w - freq).abs() <= tol)
            .min_by(|a, b| (a.0 - freq).abs().partial_cmp(&(b.0 - freq).abs()).unwrap())
            .map(|(_, g)| g.clone());
        peaks.push(ClassifiedPeak { frequency: freq, amplitude: fourier[idx], group });
    }
    Ok(VirtualStateScan { tau, signal, fourier_start: f0, fourier_step: df, fourier, peaks })
}

/// Cascade photon-pair source (three-level atom radiating two photons).
#[derive(Debug, Clone, Copy)]
pub struct CascadeSource {
    /// Upper transition frequency (rad/fs).
    pub omega_alpha: f64,
    /// Lower transition frequency (rad/fs).
    pub omega_beta: f64,
    /// Upper-level width (fs^-1).
    pub gamma_alpha: f64,
    /// Intermediate-level width (fs^-1).
    pub gamma_beta: f64,
    /// Retardation `t_R = L/c` (fs).
    pub retardation: f64,
}

impl CascadeSource {
    /// "Maximum entanglement" flag `gamma_beta >> gamma_alpha`.
    pub fn max_entanglement_ok(&self) -> bool {
        self.gamma_beta > 10.0 * self.gamma_alpha
    }
}

/// Two noninteracting two-level atoms driven by the cascade pair.
#[derive(Debug, Clone, Copy)]
pub struct TwoAtoms {
    pub eps_a: f64,
    pub eps_b: f64,
    pub mu_a: f64,
    pub mu_b: f64,
}

/// Marginal arrival-time density of the first cascade photon.
pub fn cascade_marginal(source: &CascadeSource, tau_alpha: f64) -> f64 {
    if tau_alpha < 0.0 {
        0.0
    } else {
        2.0 * source.gamma_alpha * (-2.0 * source.gamma_alpha * tau_alpha).exp()
    }
}

/// Conditional arrival density of the second photon given the first.
pub fn cascade_conditional(source: &CascadeSource, tau_beta: f64, tau_alpha: f64) -> f64 {
    if tau_beta < tau_alpha {
        0.0
    } else {
        2.0 * source.gamma_beta * (-2.0 * source.gamma_beta * (tau_beta - tau_alpha)).exp()
    }
}

/// Classical two-mode amplitude `T_ab = T_a T_b`; single-particle
/// resonances only (the collective one cancels by destructive
/// interference).
pub fn cascade_classical_amplitude(
    atoms: &TwoAtoms,
    w_alpha: f64,
    w_beta: f64,
    field: (f64, f64),
    t: f64,
    gamma: f64,
) -> C64 {
    let single = |eps: f64, mu: f64| -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (w, e_amp) in [(w_alpha, field.0), (w_beta, field.1)] {
            let a = mu
                * e_amp
                * (C64::new(1.0, 0.0) - C64::from_polar((-gamma * t).exp(), (w - eps) * t));
            s += C64::i() * a / C64::new(eps - w, -gamma);
        }
        s
    };
    single(atoms.eps_a, atoms.mu_a) * single(atoms.eps_b, atoms.mu_b)
}

/// Entangled cascade amplitude: single-particle terms plus the collective
/// `eps_a + eps_b - w_alpha - w_beta` resonance.
pub fn cascade_entangled_amplitude(source: &CascadeSource, atoms: &TwoAtoms, t: f64) -> C64 {
    let tr = source.retardation;
    let mu2 = atoms.mu_a * atoms.mu_b;
    let pair = |eps_m: f64, eps_n: f64| -> C64 {
        let amp = mu2
            * (C64::from_polar(
                (-source.gamma_alpha * (t - tr)).exp(),
                (eps_n - source.omega_alpha) * (t - tr),
            ) - C64::from_polar(1.0, -(eps_m + eps_n) * tr));
        amp / (C64::new(eps_m - source.omega_alpha, -source.gamma_alpha)
            * C64::new(eps_n - source.omega_beta, -source.gamma_beta))
    };
    let mut total = pair(atoms.eps_a, atoms.eps_b) + pair(atoms.eps_b, atoms.eps_a);
    let a_tpa = mu2
        * (C64::from_polar(1.0, -(atoms.eps_a + atoms.eps_b) * tr)
            - C64::from_polar(
                (-(source.gamma_alpha + source.gamma_beta) * (t - tr)).exp(),
                -(atoms.eps_a + atoms.eps_b) * t
                    + (source.omega_alpha - source.omega_beta) * (t - tr),
            ));
    let coll_den = C64::new(
        atoms.eps_a + atoms.eps_b - source.omega_alpha - source.omega_beta,
        -(source.gamma_alpha + source.gamma_beta),
    );
    for eps_m in [atoms.eps_a, atoms.eps_b] {
        total += a_tpa / (coll_den * C64::new(eps_m - source.omega_beta, -source.gamma_beta));
    }
    total
}

/// Resonant doubly-excited probability of the entangled cascade,
/// `p_ab = p0 gamma_beta / (gamma_alpha Delta^2)` with the single-atom
/// detuning `Delta`.
pub fn cascade_resonant_probability(source: &CascadeSource, detuning: f64, p0: f64) -> f64 {
    p0 * source.gamma_beta / (source.gamma_alpha * detuning * detuning)
}

/// Correlated-separable probability
/// `p1 = p0 (g_a g_b / (d^2 + g_a^2)) (1/(w1 - w_b)^2 + 1/(w2 - w_b)^2) (t / (L/c))^2`.
pub fn cascade_separable_probability(
    source: &CascadeSource,
    two_photon_detuning: f64,
    w1_detuning: f64,
    w2_detuning: f64,
    t: f64,
    p0: f64,
) -> f64 {
    let ga = source.gamma_alpha;
    let gb = source.gamma_beta;
    let d2 = two_photon_detuning * two_photon_detuning;
    p0 * (ga * gb / (d2 + ga * ga))
        * (1.0 / (w1_detuning * w1_detuning) + 1.0 / (w2_detuning * w2_detuning))
        * (t / source.retardation).powi(2)
}

/// Relative pair-term contribution to one f-state population vs the mean
/// photon number: `fraction(nbar) = p[pair only] / p[full four-point]`.
pub fn intensity_crossover(
    system: &LevelSystem,
    base_modes: &crate::field_states::SchmidtModes,
    f_index: usize,
    nbar_targets: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let nbar_of = |s: f64| -> f64 { base_modes.r.iter().map(|r| (s * r).sinh().powi(2)).sum() };
    let scale_for = |target: f64| -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while nbar_of(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if nbar_of(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut out = Vec::with_capacity(nbar_targets.len());
    for &target in nbar_targets {
        let modes = base_modes.scaled(scale_for(target));
        let fc = crate::field_states::field_correlators(&modes)?;
        let full =
            f_populations(system, &FourPointKernel::from_correlators(&fc), PathwayTime::Integrated)?;
        let pair = f_populations(system, &FourPointKernel::pair_part(&fc), PathwayTime::Integrated)?;
        let frac = pair.per_f[f_index].total() / full.per_f[f_index].total();
        out.push((target, frac));
    }
    Ok(out)
}
