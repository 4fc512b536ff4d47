//! Labeled 1D/2D signal outputs with axis metadata and provenance.
//!
//! `SignalMap` is the exchange format between the signal modules and the
//! scenario runner: values are dumped as plot-ready CSV, metadata as a JSON
//! sidecar. Serialization is deterministic (fixed float formatting, fixed
//! key order) so identical inputs yield identical bytes.

use crate::error::{QsError, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Axis description attached to a [`SignalMap`] dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisMeta {
    pub name: String,
    pub unit: String,
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl AxisMeta {
    pub fn new(name: &str, unit: &str, start: f64, step: f64, count: usize) -> Self {
        Self { name: name.into(), unit: unit.into(), start, step, count }
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

/// Real or complex payload, row-major over the axes.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalValues {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

impl SignalValues {
    pub fn len(&self) -> usize {
        match self {
            SignalValues::Real(v) => v.len(),
            SignalValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Provenance recorded with every output artifact. Excludes volatile data
/// (wall time, hostnames) so that re-runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub version: String,
    pub config_digest: String,
}

/// Labeled 1D/2D output map.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMap {
    pub name: String,
    pub axes: Vec<AxisMeta>,
    pub values: SignalValues,
    pub provenance: Provenance,
}

impl SignalMap {
    pub fn new(name: &str, axes: Vec<AxisMeta>, values: SignalValues) -> Result<Self> {
        let expect: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() || axes.len() > 2 {
            return Err(QsError::Contract(format!(
                "SignalMap: expected 1 or 2 axes, got {}",
                axes.len()
            )));
        }
        if values.len() != expect {
            return Err(QsError::Contract(format!(
                "SignalMap: {} values for axes of total size {expect}",
                values.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            axes,
            values,
            provenance: Provenance {
                generator: "qspectro".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config_digest: String::new(),
            },
        })
    }

    pub fn real_1d(name: &str, axis: AxisMeta, values: Vec<f64>) -> Result<Self> {
        Self::new(name, vec![axis], SignalValues::Real(values))
    }

    pub fn real_2d(name: &str, axis1: AxisMeta, axis2: AxisMeta, values: Vec<f64>) -> Result<Self> {
        Self::new(name, vec![axis1, axis2], SignalValues::Real(values))
    }

    pub fn complex_2d(name: &str, axis1: AxisMeta, axis2: AxisMeta, values: Vec<C64>) -> Result<Self> {
        Self::new(name, vec![axis1, axis2], SignalValues::Complex(values))
    }

    /// Row-major linear index for 2D maps.
    #[inline]
    pub fn idx2(&self, i: usize, j: usize) -> usize {
        i * self.axes[1].count + j
    }

    pub fn real_values(&self) -> Vec<f64> {
        match &self.values {
            SignalValues::Real(v) => v.clone(),
            SignalValues::Complex(v) => v.iter().map(|c| c.norm()).collect(),
        }
    }

    /// Plot-ready CSV: one row per sample, axis values first, then
    /// `value` (real) or `re,im` (complex). Deterministic formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let axis_names: Vec<String> =
            self.axes.iter().map(|a| format!("{}_{}", a.name, a.unit.replace('/', "_"))).collect();
        match &self.values {
            SignalValues::Real(_) => {
                out.push_str(&axis_names.join(","));
                out.push_str(",value\n");
            }
            SignalValues::Complex(_) => {
                out.push_str(&axis_names.join(","));
                out.push_str(",re,im\n");
            }
        }
        let n2 = if self.axes.len() == 2 { self.axes[1].count } else { 1 };
        for lin in 0..self.values.len() {
            if self.axes.len() == 2 {
                let (i, j) = (lin / n2, lin % n2);
                out.push_str(&format!("{:.12e},{:.12e}", self.axes[0].at(i), self.axes[1].at(j)));
            } else {
                out.push_str(&format!("{:.12e}", self.axes[0].at(lin)));
            }
            match &self.values {
                SignalValues::Real(v) => out.push_str(&format!(",{:.12e}\n", v[lin])),
                SignalValues::Complex(v) => {
                    out.push_str(&format!(",{:.12e},{:.12e}\n", v[lin].re, v[lin].im))
                }
            }
        }
        out
    }

    /// JSON sidecar with axes metadata and provenance.
    pub fn metadata_json(&self) -> String {
        #[derive(Serialize)]
        struct Meta<'a> {
            name: &'a str,
            kind: &'a str,
            axes: &'a [AxisMeta],
            provenance: &'a Provenance,
        }
        let kind = match self.values {
            SignalValues::Real(_) => "real",
            SignalValues::Complex(_) => "complex",
        };
        serde_json::to_string_pretty(&Meta {
            name: &self.name,
            kind,
            axes: &self.axes,
            provenance: &self.provenance,
        })
        .expect("metadata serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape_1d() {
        let m = SignalMap::real_1d(
            "s",
            AxisMeta::new("omega", "cm-1", 0.0, 1.0, 3),
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("omega_cm-1,value"));
    }

    #[test]
    fn size_mismatch_rejected() {
        let r = SignalMap::real_1d("s", AxisMeta::new("x", "fs", 0.0, 1.0, 3), vec![1.0]);
        assert!(r.is_err());
    }

    #[test]
    fn deterministic_bytes() {
        let mk = || {
            SignalMap::real_2d(
                "m",
                AxisMeta::new("a", "rad/fs", -1.0, 0.5, 3),
                AxisMeta::new("b", "rad/fs", 0.0, 0.25, 2),
                vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            )
            .unwrap()
        };
        assert_eq!(mk().to_csv(), mk().to_csv());
        assert_eq!(mk().metadata_json(), mk().metadata_json());
    }
}
