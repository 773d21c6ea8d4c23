//! Analytic test states: Gaussian packets, oscillator eigenstates and
//! semiclassical states `√ρ·e^{iS/ħ}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, Representation, WavefunctionGrid};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `Ψ(q) = (πw²)^{−1/4} e^{−(q−q0)²/(2w²)} e^{i p0 q/ħ}`.
pub fn gaussian_state(grid: &Grid, q0: f64, p0: f64, width: f64) -> Result<WavefunctionGrid> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid(format!(
            "width must be positive, got {width}"
        )));
    }
    if !q0.is_finite() || !p0.is_finite() {
        return Err(Error::invalid("packet center must be finite"));
    }
    let norm = (PI * width * width).powf(-0.25);
    let samples = grid
        .q_values()
        .iter()
        .map(|&q| {
            let envelope = norm * (-(q - q0).powi(2) / (2.0 * width * width)).exp();
            Complex64::from_polar(envelope, p0 * q / grid.hbar())
        })
        .collect();
    let psi = WavefunctionGrid::new(*grid, samples, Representation::Position)?.normalized()?;
    psi.check_support(false)?;
    Ok(psi)
}

/// Samples of the first `count` oscillator eigenfunctions for
/// `H = (p² + q²)/2` with the grid's ħ, via the normalized recurrence.
pub fn ho_eigenfunctions(grid: &Grid, count: usize) -> Vec<Vec<f64>> {
    let hbar = grid.hbar();
    let scale = hbar.sqrt();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    let xs: Vec<f64> = grid.q_values().iter().map(|q| q / scale).collect();
    let first: Vec<f64> = xs
        .iter()
        .map(|x| (PI * hbar).powf(-0.25) * (-x * x / 2.0).exp())
        .collect();
    if count == 0 {
        return out;
    }
    out.push(first);
    if count > 1 {
        let second = xs
            .iter()
            .zip(&out[0])
            .map(|(x, f)| 2f64.sqrt() * x * f)
            .collect();
        out.push(second);
    }
    for k in 1..count.saturating_sub(1) {
        let a = (2.0 / (k as f64 + 1.0)).sqrt();
        let b = (k as f64 / (k as f64 + 1.0)).sqrt();
        let next = xs
            .iter()
            .enumerate()
            .map(|(j, x)| a * x * out[k][j] - b * out[k - 1][j])
            .collect();
        out.push(next);
    }
    out
}

/// The `n`-th eigenstate of `(p² + q²)/2` (m = ω = 1, ħ from the grid).
pub fn ho_eigenstate(grid: &Grid, n: usize) -> Result<WavefunctionGrid> {
    let f = ho_eigenfunctions(grid, n + 1)
        .pop()
        .expect("at least one function");
    let samples = f.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    let psi = WavefunctionGrid::new(*grid, samples, Representation::Position)?;
    if psi.norm_squared() < 0.5 || psi.edge_amplitude() > crate::grid::EDGE_TOLERANCE {
        return Err(Error::Support {
            edge: psi.edge_amplitude(),
        });
    }
    psi.normalized()
}

/// Density, action and dynamical data defining `Ψ = √ρ e^{iS/ħ}` at one time.
#[derive(Clone)]
pub struct WkbFields {
    pub rho_fn: RealFn,
    pub s_action_fn: RealFn,
    pub ds_dt_fn: RealFn,
    pub mass: f64,
    pub potential_fn: RealFn,
}

impl fmt::Debug for WkbFields {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WkbFields")
            .field("mass", &self.mass)
            .finish_non_exhaustive()
    }
}

/// `ρ(q) = (πw²)^{−1/2} e^{−(q−q0)²/w²}`, the density of [`gaussian_state`].
pub fn gaussian_density(q0: f64, width: f64) -> RealFn {
    let norm = 1.0 / (PI.sqrt() * width);
    Arc::new(move |q: f64| norm * (-(q - q0).powi(2) / (width * width)).exp())
}

impl WkbFields {
    pub fn new(
        rho_fn: RealFn,
        s_action_fn: RealFn,
        ds_dt_fn: RealFn,
        mass: f64,
        potential_fn: RealFn,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            rho_fn,
            s_action_fn,
            ds_dt_fn,
            mass,
            potential_fn,
        })
    }

    /// Free particle with momentum `p0` at time `t`: `S = p0 q − p0² t/(2m)`,
    /// Gaussian density of width `w` at `q0`.
    pub fn free_particle(q0: f64, width: f64, p0: f64, mass: f64, t: f64) -> Result<Self> {
        let energy = p0 * p0 / (2.0 * mass);
        Self::new(
            gaussian_density(q0, width),
            Arc::new(move |q| p0 * q - energy * t),
            Arc::new(move |_| -energy),
            mass,
            Arc::new(|_| 0.0),
        )
    }

    /// Gaussian density with `S = c2 q² + c1 q` frozen in time, no potential.
    /// Not a Hamilton–Jacobi solution unless `c2 = 0` and `c1 = 0`.
    pub fn static_quadratic_action(
        q0: f64,
        width: f64,
        c1: f64,
        c2: f64,
        mass: f64,
    ) -> Result<Self> {
        Self::new(
            gaussian_density(q0, width),
            Arc::new(move |q| c2 * q * q + c1 * q),
            Arc::new(|_| 0.0),
            mass,
            Arc::new(|_| 0.0),
        )
    }

    /// Derivative of the action by a central 8th-order difference of the
    /// analytic closure.
    pub fn action_gradient(&self, q: f64) -> f64 {
        central_difference(&*self.s_action_fn, q)
    }

    /// Derivative of ln ρ, likewise by central differences.
    pub fn log_density_gradient(&self, q: f64) -> f64 {
        let rho = &self.rho_fn;
        central_difference(&|x| rho(x).ln(), q)
    }
}

/// 8th-order central difference with a step scaled to the argument.
pub fn central_difference(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let h = 1e-2 * x.abs().max(1.0);
    W.iter()
        .enumerate()
        .map(|(i, w)| {
            let d = (i + 1) as f64 * h;
            w * (f(x + d) - f(x - d))
        })
        .sum::<f64>()
        / h
}

/// `Ψ = √ρ e^{iS/ħ}` sampled on `grid` with ħ replaced by `hbar`, renormalized.
pub fn wkb_state(grid: &Grid, fields: &WkbFields, hbar: f64) -> Result<WavefunctionGrid> {
    let grid = grid.with_hbar(hbar)?;
    let mut samples = Vec::with_capacity(grid.n());
    for q in grid.q_values() {
        let rho = (fields.rho_fn)(q);
        if rho < 0.0 || !rho.is_finite() {
            return Err(Error::invalid(format!("density is {rho} at q = {q}")));
        }
        let phase = (fields.s_action_fn)(q) / hbar;
        samples.push(Complex64::from_polar(rho.sqrt(), phase));
    }
    let mass: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dq();
    if (mass - 1.0).abs() > 1e-8 {
        log::warn!("wkb density integrates to {mass} on the grid");
    }
    let psi = WavefunctionGrid::new(grid, samples, Representation::Position)?.normalized()?;
    psi.check_support(false)?;
    Ok(psi)
}
