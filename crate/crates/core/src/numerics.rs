//! Shared numerical kernels: Hermite functions, matrix exponentials,
//! phase-correct discrete Fourier transforms and SVD of complex grids.

use crate::axis::{ComplexGrid2D, FrequencyAxis, GridAxis};
use crate::error::{QsError, Result};
use crate::C64;
use ndarray::Array2;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Hermite orders above this are rejected; the normalized recursion is
/// stable well past it but the quadrature oracles are not.
pub const HERMITE_MAX_ORDER: usize = 200;

/// Orthonormal Hermite function with the fixed `e^{i 3 pi / 8}` phase:
/// `H_n(k x) = sqrt(k / (sqrt(pi) 2^n n!)) e^{i 3 pi/8} e^{-(k x)^2 / 2} h_n(k x)`.
///
/// Orthonormal on the real line: `int H_n(k x) H_m^*(k x) dx = delta_nm`.
/// Evaluated with a per-step normalized three-term recursion so orders up to
/// [`HERMITE_MAX_ORDER`] stay finite.
pub fn hermite_function(n: usize, k: f64, x: f64) -> Result<C64> {
    if n > HERMITE_MAX_ORDER {
        return Err(QsError::Capability(format!(
            "hermite_function: order {n} above stability bound {HERMITE_MAX_ORDER}"
        )));
    }
    if !(k > 0.0) {
        return Err(QsError::Contract(format!("hermite_function: scale k must be > 0, got {k}")));
    }
    let u = k * x;
    // phi_0 = pi^{-1/4} e^{-u^2/2}, phi_{n+1} = u sqrt(2/(n+1)) phi_n - sqrt(n/(n+1)) phi_{n-1}
    let mut prev = 0.0_f64;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    for m in 0..n {
        let next = u * (2.0 / (m as f64 + 1.0)).sqrt() * cur
            - (m as f64 / (m as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    let phase = C64::from_polar(1.0, 3.0 * PI / 8.0);
    Ok(phase * k.sqrt() * cur)
}

/// `exp(M t)` for a square real matrix (scaling-and-squaring Pade behind the
/// scenes). `t` is in fs, `M` in fs^-1.
pub fn matrix_exp(m: &Array2<f64>, t: f64) -> Result<Array2<f64>> {
    if m.nrows() != m.ncols() {
        return Err(QsError::Contract(format!(
            "matrix_exp: matrix must be square, got {:?}",
            m.dim()
        )));
    }
    if t < 0.0 {
        return Err(QsError::Contract(format!("matrix_exp: t must be >= 0, got {t}")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(QsError::Contract("matrix_exp: non-finite entries".into()));
    }
    let n = m.nrows();
    let na = nalgebra::DMatrix::<f64>::from_fn(n, n, |i, j| m[(i, j)] * t);
    let e = na.exp();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| e[(i, j)]))
}

/// Sign of the Fourier kernel `e^{sign * i * omega * t}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtSign {
    Plus,
    Minus,
}

impl FtSign {
    #[inline]
    fn val(self) -> f64 {
        match self {
            FtSign::Plus => 1.0,
            FtSign::Minus => -1.0,
        }
    }

    #[inline]
    pub fn flip(self) -> FtSign {
        match self {
            FtSign::Plus => FtSign::Minus,
            FtSign::Minus => FtSign::Plus,
        }
    }
}

/// Conjugate axis of a uniform lattice: step `2 pi / (N step)`, centered on 0.
pub fn conjugate_axis(step: f64, count: usize) -> (f64, f64) {
    let out_step = 2.0 * PI / (count as f64 * step);
    let out_start = -((count / 2) as f64) * out_step;
    (out_start, out_step)
}

/// Core phase-correct uniform DFT:
/// `F(w_m) = in_step * sum_j f_j e^{sign i w_m t_j}` with `t_j = in_start + j in_step`
/// and `w_m = out_start + m out_step`, where `out_step * in_step * N = 2 pi`.
///
/// Arbitrary axis starts are handled exactly, so shifted grids transform
/// correctly.
pub fn dft_uniform(
    in_start: f64,
    in_step: f64,
    values: &[C64],
    sign: FtSign,
    out_start: f64,
    out_step: f64,
) -> Result<Vec<C64>> {
    let n = values.len();
    if n < 2 {
        return Err(QsError::Contract("dft_uniform: need at least 2 samples".into()));
    }
    let compat = (out_step * in_step * n as f64 - 2.0 * PI).abs();
    if compat > 1e-9 * 2.0 * PI {
        return Err(QsError::Contract(format!(
            "dft_uniform: out_step {out_step} incompatible with in_step {in_step} and N {n}"
        )));
    }
    let s = sign.val();
    let mut buf: Vec<C64> = values
        .iter()
        .enumerate()
        .map(|(j, v)| v * C64::from_polar(1.0, s * out_start * (j as f64) * in_step))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = match sign {
        FtSign::Plus => planner.plan_fft_inverse(n),
        FtSign::Minus => planner.plan_fft_forward(n),
    };
    fft.process(&mut buf);
    let out: Vec<C64> = buf
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let w_m = out_start + m as f64 * out_step;
            v * in_step * C64::from_polar(1.0, s * w_m * in_start)
        })
        .collect();
    Ok(out)
}

/// 1D transform of samples on `axis`: returns the conjugate axis (as raw
/// `(start, step)`) and `F(w) = int dt e^{sign i w t} f(t)`.
pub fn fourier_1d(
    start: f64,
    step: f64,
    values: &[C64],
    sign: FtSign,
) -> Result<(f64, f64, Vec<C64>)> {
    let (out_start, out_step) = conjugate_axis(step, values.len());
    let vals = dft_uniform(start, step, values, sign, out_start, out_step)?;
    Ok((out_start, out_step, vals))
}

/// Inverse of [`fourier_1d`] back onto a caller-chosen axis:
/// `f(t_j) = (1/2 pi) int dw e^{-sign i w t_j} F(w)`.
pub fn fourier_1d_inverse(
    freq_start: f64,
    freq_step: f64,
    values: &[C64],
    sign: FtSign,
    time_start: f64,
) -> Result<Vec<C64>> {
    let n = values.len();
    let time_step = 2.0 * PI / (n as f64 * freq_step);
    let vals = dft_uniform(freq_start, freq_step, values, sign.flip(), time_start, time_step)?;
    Ok(vals.into_iter().map(|v| v / (2.0 * PI)).collect())
}

/// Which axes of a 2D grid to transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtAxes {
    First,
    Second,
    Both,
}

fn transformed_axis(axis: GridAxis) -> GridAxis {
    let (start, step) = conjugate_axis(axis.step(), axis.count());
    match axis {
        // Time transforms to frequency and vice versa.
        GridAxis::Time(_) => GridAxis::Frequency(FrequencyAxis::new(start, step, axis.count()).unwrap()),
        GridAxis::Frequency(_) => {
            GridAxis::Time(crate::axis::TimeAxis::new(start, step, axis.count()).unwrap())
        }
    }
}

/// Transform a grid along the selected axes with kernel `e^{sign i w t}` per
/// transformed direction. Output axes span the conjugate ranges.
pub fn fourier_transform_grid(grid: &ComplexGrid2D, axes: FtAxes, sign: FtSign) -> Result<ComplexGrid2D> {
    let mut values = grid.values.clone();
    let mut axis1 = grid.axis1;
    let mut axis2 = grid.axis2;

    if matches!(axes, FtAxes::First | FtAxes::Both) {
        let out = transformed_axis(axis1);
        let mut new_vals = Array2::<C64>::zeros(values.dim());
        for j in 0..values.ncols() {
            let col: Vec<C64> = values.column(j).to_vec();
            let t = dft_uniform(axis1.start(), axis1.step(), &col, sign, out.start(), out.step())?;
            for (i, v) in t.into_iter().enumerate() {
                new_vals[(i, j)] = v;
            }
        }
        values = new_vals;
        axis1 = out;
    }
    if matches!(axes, FtAxes::Second | FtAxes::Both) {
        let out = transformed_axis(axis2);
        let mut new_vals = Array2::<C64>::zeros(values.dim());
        for i in 0..values.nrows() {
            let row: Vec<C64> = values.row(i).to_vec();
            let t = dft_uniform(axis2.start(), axis2.step(), &row, sign, out.start(), out.step())?;
            for (j, v) in t.into_iter().enumerate() {
                new_vals[(i, j)] = v;
            }
        }
        values = new_vals;
        axis2 = out;
    }
    ComplexGrid2D::new(axis1, axis2, values)
}

/// Result of [`svd_grid`]: `A = sum_k s_k u_k v_k^dagger` with `s_k`
/// descending; `u`/`v` hold the vectors as columns.
#[derive(Debug, Clone)]
pub struct GridSvd {
    pub singular_values: Vec<f64>,
    pub u: Array2<C64>,
    pub v: Array2<C64>,
}

/// Singular value decomposition of the grid values.
pub fn svd_grid(grid: &ComplexGrid2D) -> Result<GridSvd> {
    svd_matrix(&grid.values)
}

/// SVD of a raw complex matrix; vectors returned as columns of `u` and `v`.
pub fn svd_matrix(values: &Array2<C64>) -> Result<GridSvd> {
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(QsError::Contract("svd_grid: non-finite values".into()));
    }
    let (rows, cols) = values.dim();
    let m = nalgebra::DMatrix::<C64>::from_fn(rows, cols, |i, j| values[(i, j)]);
    let svd = m.svd(true, true);
    let u_na = svd.u.expect("svd: requested u");
    let vt_na = svd.v_t.expect("svd: requested v_t");
    let k = svd.singular_values.len();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("svd: NaN singular value")
    });

    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = Array2::from_shape_fn((rows, k), |(i, c)| u_na[(i, order[c])]);
    let v = Array2::from_shape_fn((cols, k), |(j, c)| vt_na[(order[c], j)].conj());
    Ok(GridSvd { singular_values, u, v })
}

/// Trapezoidal quadrature on a uniform lattice.
pub fn trapz(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (0.5 * (values[0] + values[values.len() - 1]) + inner)
}

/// Complex trapezoidal quadrature.
pub fn trapz_c(values: &[C64], step: f64) -> C64 {
    if values.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let inner: C64 = values[1..values.len() - 1].iter().sum();
    (0.5 * (values[0] + values[values.len() - 1]) + inner) * step
}

/// Indices of strict local maxima exceeding `rel_threshold * max`.
pub fn local_maxima(values: &[f64], rel_threshold: f64) -> Vec<usize> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = rel_threshold * max;
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        if values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= floor {
            out.push(i);
        }
    }
    out
}
