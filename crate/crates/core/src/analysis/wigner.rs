use std::f64::consts::PI;
use std::fmt::Write as _;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::FieldDensityMatrix;

/// Phase-space coordinates of a Wigner grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WignerConvention {
    /// `x = Re α`, `p = Im α`: the `x` marginal is the distribution of
    /// `X = (a + a†)/2`. Vacuum peak `2/π`.
    #[default]
    Quadrature,
    /// `q = √2 Re α`, `p = √2 Im α`. Vacuum peak `1/π`.
    Canonical,
}

impl WignerConvention {
    /// Axis value per unit of `Re α` / `Im α`.
    pub fn scale(self) -> f64 {
        match self {
            WignerConvention::Quadrature => 1.0,
            WignerConvention::Canonical => std::f64::consts::SQRT_2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            WignerConvention::Quadrature => "W(alpha)=(2/pi)Tr[rho D(alpha) P D(-alpha)], x=Re(alpha), p=Im(alpha), integral dx dp = 1",
            WignerConvention::Canonical => {
                "W(alpha)=(1/pi)Tr[rho D(alpha) P D(-alpha)], q=sqrt(2)Re(alpha), p=sqrt(2)Im(alpha), integral dq dp = 1"
            }
        }
    }
}

/// Wigner function sampled on a rectangular grid; `values[[i, j]]` is at
/// `(x_axis[i], p_axis[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    #[serde(skip)]
    pub values: Array2<f64>,
    pub convention: WignerConvention,
    pub convention_tag: String,
    /// Set when the grid does not span six standard deviations of the state
    /// around its mean in both quadratures.
    pub coverage_warning: bool,
}

#[derive(Debug, Clone, Serialize)]
struct GridHeader<'a> {
    convention: WignerConvention,
    convention_tag: &'a str,
    x_min: f64,
    x_max: f64,
    nx: usize,
    p_min: f64,
    p_max: f64,
    np: usize,
    integral: f64,
    coverage_warning: bool,
}

impl WignerGrid {
    /// `lo..=hi` in `n` equal steps.
    pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * step }).collect()
    }

    /// 201 × 201 points over `[-8, 8]²`.
    pub fn default_axis() -> Vec<f64> {
        Self::axis(-8.0, 8.0, 201)
    }

    fn spacing(axis: &[f64]) -> f64 {
        if axis.len() < 2 {
            0.0
        } else {
            (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
        }
    }

    /// Riemann-sum integral over the grid.
    pub fn integral(&self) -> f64 {
        self.values.sum() * Self::spacing(&self.x_axis) * Self::spacing(&self.p_axis)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Grid point with the largest value.
    pub fn peak(&self) -> (f64, f64, f64) {
        let mut best = (0, 0);
        for ((i, j), &v) in self.values.indexed_iter() {
            if v > self.values[[best.0, best.1]] {
                best = (i, j);
            }
        }
        (self.x_axis[best.0], self.p_axis[best.1], self.values[[best.0, best.1]])
    }

    /// `x` marginal `∫ W dp` on the `x` axis.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = Self::spacing(&self.p_axis);
        self.values.rows().into_iter().map(|r| r.sum() * dp).collect()
    }

    /// Variance of the `x` marginal, in units of `Re α`.
    pub fn x_variance(&self) -> f64 {
        let dx = Self::spacing(&self.x_axis);
        let m = self.x_marginal();
        let s = self.convention.scale();
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (x, v) in self.x_axis.iter().zip(&m) {
            let u = x / s;
            w += v * dx;
            m1 += u * v * dx;
            m2 += u * u * v * dx;
        }
        m2 / w - (m1 / w).powi(2)
    }

    /// CSV with header `x,p,w`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 40);
        out.push_str("x,p,w\n");
        for (i, x) in self.x_axis.iter().enumerate() {
            for (j, p) in self.p_axis.iter().enumerate() {
                let _ = writeln!(out, "{x},{p},{}", self.values[[i, j]]);
            }
        }
        out
    }

    /// JSON metadata accompanying the CSV.
    pub fn header_json(&self) -> String {
        let h = GridHeader {
            convention: self.convention,
            convention_tag: &self.convention_tag,
            x_min: self.x_axis[0],
            x_max: *self.x_axis.last().unwrap(),
            nx: self.x_axis.len(),
            p_min: self.p_axis[0],
            p_max: *self.p_axis.last().unwrap(),
            np: self.p_axis.len(),
            integral: self.integral(),
            coverage_warning: self.coverage_warning,
        };
        serde_json::to_string_pretty(&h).expect("header serializes")
    }
}

/// Wigner function of `rho` from the displaced-parity series, in the
/// [`WignerConvention::Quadrature`] convention.
pub fn wigner(rho: &FieldDensityMatrix, x_axis: &[f64], p_axis: &[f64]) -> Result<WignerGrid> {
    wigner_with(rho, x_axis, p_axis, WignerConvention::Quadrature)
}

pub fn wigner_with(rho: &FieldDensityMatrix, x_axis: &[f64], p_axis: &[f64], convention: WignerConvention) -> Result<WignerGrid> {
    if x_axis.is_empty() || p_axis.is_empty() {
        return Err(Error::InvalidArgument("empty Wigner axis".into()));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(Error::InvalidState(format!("density matrix trace {tr} differs from 1")));
    }
    let m = rho.matrix();
    let s = convention.scale();
    // the series gives the canonical density; rescale the Jacobian
    let jac = 1.0 / (s * s) * 2.0;
    let rows: Vec<Vec<f64>> = x_axis
        .par_iter()
        .map(|&x| {
            let mut work = vec![C64::new(0.0, 0.0); m.nrows()];
            p_axis.iter().map(|&p| jac * parity_series(m, C64::new(x / s, p / s), &mut work)).collect()
        })
        .collect();
    let mut values = Array2::zeros((x_axis.len(), p_axis.len()));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    Ok(WignerGrid {
        x_axis: x_axis.to_vec(),
        p_axis: p_axis.to_vec(),
        values,
        convention,
        convention_tag: convention.tag().to_string(),
        coverage_warning: !covers(rho, x_axis, p_axis, s),
    })
}

/// `(1/π) Tr[ρ D(α) P D(-α)]` by the standard upward iteration over `W_mn(α)`.
fn parity_series(rho: &Array2<C64>, alpha: C64, w: &mut [C64]) -> f64 {
    let d = rho.nrows();
    let two_a = alpha * 2.0;
    let two_ac = two_a.conj();
    w[0] = C64::new((-2.0 * alpha.norm_sqr()).exp() / PI, 0.0);
    let mut total = rho[[0, 0]].re * w[0].re;
    for n in 1..d {
        w[n] = two_a * w[n - 1] / (n as f64).sqrt();
        total += 2.0 * (rho[[0, n]] * w[n]).re;
    }
    for mm in 1..d {
        let sm = (mm as f64).sqrt();
        let mut temp = w[mm];
        w[mm] = (two_ac * temp - w[mm - 1] * sm) / sm;
        total += rho[[mm, mm]].re * w[mm].re;
        for n in mm + 1..d {
            let next = (two_a * w[n - 1] - temp * sm) / (n as f64).sqrt();
            temp = w[n];
            w[n] = next;
            total += 2.0 * (rho[[mm, n]] * w[n]).re;
        }
    }
    total
}

fn covers(rho: &FieldDensityMatrix, x_axis: &[f64], p_axis: &[f64], scale: f64) -> bool {
    let mom = rho.field_moments();
    let (x0, p0) = (mom.a.re, mom.a.im);
    let var_x = mom.quadrature_variance_at(0.0).max(0.0);
    let var_p = mom.quadrature_variance_at(std::f64::consts::FRAC_PI_2).max(0.0);
    let span = |axis: &[f64]| {
        let lo = axis.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo / scale, hi / scale)
    };
    let inside = |(lo, hi): (f64, f64), c: f64, var: f64| c - 6.0 * var.sqrt() >= lo && c + 6.0 * var.sqrt() <= hi;
    inside(span(x_axis), x0, var_x) && inside(span(p_axis), p0, var_p)
}
