//! Uniformly sampled axes and complex grids.
//!
//! `FrequencyAxis` carries rad/fs samples, `TimeAxis` fs samples. Both are
//! strictly increasing uniform lattices with at least two points.

use crate::error::{QsError, Result};
use crate::C64;
use ndarray::Array2;

/// Uniform angular-frequency lattice (rad/fs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyAxis {
    start: f64,
    step: f64,
    count: usize,
}

/// Uniform time lattice (fs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeAxis {
    start: f64,
    step: f64,
    count: usize,
}

macro_rules! axis_impl {
    ($name:ident) => {
        impl $name {
            pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
                if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
                    return Err(QsError::Contract(format!(
                        concat!(stringify!($name), ": step must be positive and finite, got {}"),
                        step
                    )));
                }
                if count < 2 {
                    return Err(QsError::Contract(format!(
                        concat!(stringify!($name), ": count must be >= 2, got {}"),
                        count
                    )));
                }
                Ok(Self { start, step, count })
            }

            /// Symmetric lattice of `count` points centered on `center` with
            /// total half-width `half_width`.
            pub fn centered(center: f64, half_width: f64, count: usize) -> Result<Self> {
                if !(half_width > 0.0) {
                    return Err(QsError::Contract(format!(
                        concat!(stringify!($name), ": half_width must be positive, got {}"),
                        half_width
                    )));
                }
                let step = 2.0 * half_width / (count.max(2) as f64 - 1.0);
                Self::new(center - half_width, step, count)
            }

            #[inline]
            pub fn start(&self) -> f64 {
                self.start
            }

            #[inline]
            pub fn step(&self) -> f64 {
                self.step
            }

            #[inline]
            pub fn count(&self) -> usize {
                self.count
            }

            #[inline]
            pub fn at(&self, i: usize) -> f64 {
                self.start + self.step * i as f64
            }

            #[inline]
            pub fn end(&self) -> f64 {
                self.at(self.count - 1)
            }

            pub fn values(&self) -> Vec<f64> {
                (0..self.count).map(|i| self.at(i)).collect()
            }

            pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
                (0..self.count).map(move |i| self.at(i))
            }

            /// Index of the sample closest to `x`.
            pub fn nearest_index(&self, x: f64) -> usize {
                let i = ((x - self.start) / self.step).round();
                (i.max(0.0) as usize).min(self.count - 1)
            }
        }
    };
}

axis_impl!(FrequencyAxis);
axis_impl!(TimeAxis);

/// Either kind of axis; grids may mix time and frequency directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridAxis {
    Frequency(FrequencyAxis),
    Time(TimeAxis),
}

impl GridAxis {
    #[inline]
    pub fn start(&self) -> f64 {
        match self {
            GridAxis::Frequency(a) => a.start(),
            GridAxis::Time(a) => a.start(),
        }
    }

    #[inline]
    pub fn step(&self) -> f64 {
        match self {
            GridAxis::Frequency(a) => a.step(),
            GridAxis::Time(a) => a.step(),
        }
    }

    #[inline]
    pub fn count(&self) -> usize {
        match self {
            GridAxis::Frequency(a) => a.count(),
            GridAxis::Time(a) => a.count(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start() + self.step() * i as f64
    }

    pub fn unit(&self) -> &'static str {
        match self {
            GridAxis::Frequency(_) => "rad/fs",
            GridAxis::Time(_) => "fs",
        }
    }
}

impl From<FrequencyAxis> for GridAxis {
    fn from(a: FrequencyAxis) -> Self {
        GridAxis::Frequency(a)
    }
}

impl From<TimeAxis> for GridAxis {
    fn from(a: TimeAxis) -> Self {
        GridAxis::Time(a)
    }
}

/// Complex-valued function sampled on the outer product of two axes.
/// Row index runs along `axis1`, column index along `axis2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid2D {
    pub axis1: GridAxis,
    pub axis2: GridAxis,
    pub values: Array2<C64>,
}

impl ComplexGrid2D {
    pub fn new(axis1: impl Into<GridAxis>, axis2: impl Into<GridAxis>, values: Array2<C64>) -> Result<Self> {
        let axis1 = axis1.into();
        let axis2 = axis2.into();
        if values.nrows() != axis1.count() || values.ncols() != axis2.count() {
            return Err(QsError::Contract(format!(
                "ComplexGrid2D: value shape {:?} does not match axes ({}, {})",
                values.dim(),
                axis1.count(),
                axis2.count()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QsError::Contract("ComplexGrid2D: non-finite values".into()));
        }
        Ok(Self { axis1, axis2, values })
    }

    /// Sample `f(x1, x2)` on the lattice.
    pub fn from_fn(
        axis1: impl Into<GridAxis>,
        axis2: impl Into<GridAxis>,
        mut f: impl FnMut(f64, f64) -> C64,
    ) -> Result<Self> {
        let axis1 = axis1.into();
        let axis2 = axis2.into();
        let values = Array2::from_shape_fn((axis1.count(), axis2.count()), |(i, j)| {
            f(axis1.at(i), axis2.at(j))
        });
        Self::new(axis1, axis2, values)
    }

    /// Riemann measure of one grid cell.
    #[inline]
    pub fn cell(&self) -> f64 {
        self.axis1.step() * self.axis2.step()
    }

    /// `sum |v|^2 dx1 dx2`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell()
    }

    /// Rescale so that `norm_sq() == 1`.
    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            self.values.mapv_inplace(|v| v / n);
        }
    }

    /// Largest modulus on the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
