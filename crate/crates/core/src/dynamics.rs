//! Time evolution: RK4 on the s-Moyal bracket, and a split-step Schrödinger
//! propagator used as an independent check.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{
    momentum_to_position, position_to_momentum, Grid, Representation, WavefunctionGrid,
};
use crate::star::MoyalGenerator;
use crate::states::RealFn;
use crate::symbol::{operator_to_symbol, OperatorMatrix};
use crate::transform::{s_wigner, PhaseSpaceFunction, SParameter};

/// Bound on `dt · (max H_w − min H_w)/ħ`. Classical RK4 is stable on the
/// imaginary axis up to `2√2`.
pub const RK4_STABILITY_LIMIT: f64 = 2.8;

/// Default time step.
pub const DEFAULT_DT: f64 = 1e-3;

/// Pass threshold for [`cross_validate`].
pub const CROSS_VALIDATION_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HamiltonianKind {
    Free,
    Harmonic { omega: f64 },
    Custom,
}

/// `H = p²/2m + V(q)`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub mass: f64,
    potential: RealFn,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("kind", &self.kind)
            .field("mass", &self.mass)
            .finish()
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid(format!("mass must be positive, got {mass}")));
    }
    Ok(())
}

impl HamiltonianSpec {
    pub fn free(mass: f64) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self {
            kind: HamiltonianKind::Free,
            mass,
            potential: Arc::new(|_| 0.0),
        })
    }

    /// `V = mω²q²/2`.
    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        check_mass(mass)?;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::invalid(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(Self {
            kind: HamiltonianKind::Harmonic { omega },
            mass,
            potential: Arc::new(move |q| 0.5 * mass * omega * omega * q * q),
        })
    }

    pub fn custom(mass: f64, potential: RealFn) -> Result<Self> {
        check_mass(mass)?;
        Ok(Self {
            kind: HamiltonianKind::Custom,
            mass,
            potential,
        })
    }

    pub fn potential(&self, q: f64) -> f64 {
        (self.potential)(q)
    }

    fn potential_samples(&self, grid: &Grid) -> Result<Vec<f64>> {
        let v: Vec<f64> = grid.q_values().iter().map(|&q| self.potential(q)).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("potential is not finite on the grid"));
        }
        Ok(v)
    }

    /// Kinetic part diagonal in momentum plus the potential on the diagonal.
    pub fn matrix(&self, grid: &Grid) -> Result<OperatorMatrix> {
        let mass = self.mass;
        let kinetic = OperatorMatrix::momentum_function(grid, |p| p * p / (2.0 * mass));
        let v = self.potential_samples(grid)?;
        let potential = OperatorMatrix::diagonal(grid, |q| v[grid.nearest_q_index(q)]);
        let mut h = kinetic.add(&potential)?;
        h.hermitian_hint = true;
        Ok(h)
    }

    pub fn symbol(&self, grid: &Grid, s: SParameter) -> Result<PhaseSpaceFunction> {
        operator_to_symbol(&self.matrix(grid)?, s)
    }

    /// `HΨ` with the kinetic term applied spectrally.
    pub fn apply(&self, psi: &WavefunctionGrid) -> Result<Vec<Complex64>> {
        let grid = psi.grid;
        let samples = psi.position_samples();
        let mut phi = position_to_momentum(&grid, &samples);
        for (z, p) in phi.iter_mut().zip(grid.p_values()) {
            *z *= p * p / (2.0 * self.mass);
        }
        let kinetic = momentum_to_position(&grid, &phi);
        let v = self.potential_samples(&grid)?;
        Ok(kinetic
            .iter()
            .zip(&samples)
            .zip(&v)
            .map(|((t, s), v)| t + s * v)
            .collect())
    }

    /// `⟨Ψ|H|Ψ⟩`.
    pub fn expectation(&self, psi: &WavefunctionGrid) -> Result<Complex64> {
        let h_psi = self.apply(psi)?;
        let dq = psi.grid.dq();
        Ok(psi
            .position_samples()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| a.conj() * b * dq)
            .sum())
    }
}

/// Per-step record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostic {
    pub step: usize,
    pub time: f64,
    /// `∬ρ_w dq dp` for phase-space runs, `‖Ψ‖²` for wavefunction runs.
    pub mass: Complex64,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult<T> {
    pub times: Vec<f64>,
    pub snapshots: Vec<T>,
    pub diagnostics: Vec<StepDiagnostic>,
}

impl<T> EvolutionResult<T> {
    pub fn last(&self) -> &T {
        self.snapshots
            .last()
            .expect("evolution results always hold the initial snapshot")
    }

    /// Largest `|mass(t) − mass(0)|` over the run.
    pub fn mass_drift(&self) -> f64 {
        let first = self.diagnostics[0].mass;
        self.diagnostics
            .iter()
            .map(|d| (d.mass - first).norm())
            .fold(0.0, f64::max)
    }
}

fn validate_steps(dt: f64, snapshot_every: usize) -> Result<()> {
    if !dt.is_finite() || dt == 0.0 {
        return Err(Error::invalid(format!(
            "time step must be finite and nonzero, got {dt}"
        )));
    }
    if snapshot_every == 0 {
        return Err(Error::invalid("snapshot interval must be positive"));
    }
    Ok(())
}

/// RK4 integrator for `∂ρ/∂t = [H, ρ]_M`.
pub struct MoyalPropagator {
    generator: MoyalGenerator,
    spectral_range: f64,
}

impl MoyalPropagator {
    pub fn new(h: &HamiltonianSpec, grid: &Grid, s: SParameter) -> Result<Self> {
        let symbol = h.symbol(grid, s)?;
        let (lo, hi) = symbol
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
                (lo.min(z.re), hi.max(z.re))
            });
        Ok(Self {
            generator: MoyalGenerator::new(&symbol),
            spectral_range: (hi - lo) / grid.hbar(),
        })
    }

    pub fn check_stability(&self, dt: f64) -> Result<()> {
        let product = dt.abs() * self.spectral_range;
        if product >= RK4_STABILITY_LIMIT {
            return Err(Error::Stability {
                dt,
                product,
                limit: RK4_STABILITY_LIMIT,
            });
        }
        Ok(())
    }

    /// One RK4 step; `dt` may be negative.
    pub fn step(&self, rho: &PhaseSpaceFunction, dt: f64) -> Result<PhaseSpaceFunction> {
        let axpy = |x: &PhaseSpaceFunction, k: &PhaseSpaceFunction, h: f64| {
            x.zip_with(k, |a, b| a + b * h)
        };
        let k1 = self.generator.bracket(rho)?;
        let k2 = self.generator.bracket(&axpy(rho, &k1, dt / 2.0))?;
        let k3 = self.generator.bracket(&axpy(rho, &k2, dt / 2.0))?;
        let k4 = self.generator.bracket(&axpy(rho, &k3, dt))?;
        let mut next = rho.clone();
        for (i, z) in next.samples.iter_mut().enumerate() {
            *z += (k1.samples[i] + (k2.samples[i] + k3.samples[i]) * 2.0 + k4.samples[i])
                * (dt / 6.0);
        }
        Ok(next)
    }
}

/// RK4 evolution of a phase-space state. Snapshots are taken at step 0, every
/// `snapshot_every` steps, and at the final step.
pub fn evolve_moyal(
    rho0: &PhaseSpaceFunction,
    h: &HamiltonianSpec,
    dt: f64,
    n_steps: usize,
    snapshot_every: usize,
) -> Result<EvolutionResult<PhaseSpaceFunction>> {
    validate_steps(dt, snapshot_every)?;
    let propagator = MoyalPropagator::new(h, &rho0.grid, rho0.s)?;
    propagator.check_stability(dt)?;
    let area = rho0.grid.dq() * rho0.grid.dp();
    let mass = |rho: &PhaseSpaceFunction| rho.samples.iter().sum::<Complex64>() * area;
    let mut result = EvolutionResult {
        times: vec![0.0],
        snapshots: vec![rho0.clone()],
        diagnostics: vec![StepDiagnostic {
            step: 0,
            time: 0.0,
            mass: mass(rho0),
        }],
    };
    let mut rho = rho0.clone();
    for step in 1..=n_steps {
        rho = propagator.step(&rho, dt)?;
        if rho
            .samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite { step });
        }
        let time = step as f64 * dt;
        result.diagnostics.push(StepDiagnostic {
            step,
            time,
            mass: mass(&rho),
        });
        if step % snapshot_every == 0 || step == n_steps {
            result.times.push(time);
            result.snapshots.push(rho.clone());
        }
    }
    Ok(result)
}

/// Strang split-step propagator: half potential kick, full kinetic drift,
/// half potential kick.
pub struct SplitStep {
    grid: Grid,
    half_kick: Vec<Complex64>,
    drift: Vec<Complex64>,
}

impl SplitStep {
    pub fn new(h: &HamiltonianSpec, grid: &Grid, dt: f64) -> Result<Self> {
        let hbar = grid.hbar();
        let v = h.potential_samples(grid)?;
        Ok(Self {
            grid: *grid,
            half_kick: v
                .iter()
                .map(|v| Complex64::from_polar(1.0, -v * dt / (2.0 * hbar)))
                .collect(),
            drift: grid
                .p_values()
                .iter()
                .map(|p| Complex64::from_polar(1.0, -p * p * dt / (2.0 * h.mass * hbar)))
                .collect(),
        })
    }

    pub fn step(&self, psi: &mut Vec<Complex64>) {
        psi.iter_mut()
            .zip(&self.half_kick)
            .for_each(|(z, k)| *z *= k);
        let mut phi = position_to_momentum(&self.grid, psi);
        phi.iter_mut().zip(&self.drift).for_each(|(z, d)| *z *= d);
        *psi = momentum_to_position(&self.grid, &phi);
        psi.iter_mut()
            .zip(&self.half_kick)
            .for_each(|(z, k)| *z *= k);
    }
}

pub fn evolve_schrodinger(
    psi0: &WavefunctionGrid,
    h: &HamiltonianSpec,
    dt: f64,
    n_steps: usize,
    snapshot_every: usize,
) -> Result<EvolutionResult<WavefunctionGrid>> {
    validate_steps(dt, snapshot_every)?;
    let grid = psi0.grid;
    let propagator = SplitStep::new(h, &grid, dt)?;
    let dq = grid.dq();
    let norm =
        |psi: &[Complex64]| Complex64::new(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq, 0.0);
    let mut psi = psi0.position_samples();
    let mut result = EvolutionResult {
        times: vec![0.0],
        snapshots: vec![WavefunctionGrid::new(
            grid,
            psi.clone(),
            Representation::Position,
        )?],
        diagnostics: vec![StepDiagnostic {
            step: 0,
            time: 0.0,
            mass: norm(&psi),
        }],
    };
    for step in 1..=n_steps {
        propagator.step(&mut psi);
        if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        let time = step as f64 * dt;
        result.diagnostics.push(StepDiagnostic {
            step,
            time,
            mass: norm(&psi),
        });
        if step % snapshot_every == 0 || step == n_steps {
            result.times.push(time);
            result.snapshots.push(WavefunctionGrid::new(
                grid,
                psi.clone(),
                Representation::Position,
            )?);
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub s: String,
    pub time: f64,
    pub dt: f64,
    pub steps: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares `s_wigner(Schrödinger(ψ0, t))` against `Moyal(s_wigner(ψ0), t)`.
pub fn cross_validate(
    psi0: &WavefunctionGrid,
    h: &HamiltonianSpec,
    s: SParameter,
    time: f64,
    dt: f64,
) -> Result<CrossValidation> {
    if !(time.is_finite() && time >= 0.0) {
        return Err(Error::invalid(format!(
            "time must be nonnegative, got {time}"
        )));
    }
    let steps = (time / dt).round() as usize;
    let step = if steps == 0 { dt } else { time / steps as f64 };
    let rho0 = s_wigner(psi0, s)?;
    let moyal = evolve_moyal(&rho0, h, step, steps, steps.max(1))?;
    let schrodinger = evolve_schrodinger(psi0, h, step, steps, steps.max(1))?;
    let reference = s_wigner(schrodinger.last(), s)?;
    let max_deviation = moyal.last().max_deviation(&reference);
    Ok(CrossValidation {
        s: s.to_string(),
        time,
        dt: step,
        steps,
        max_deviation,
        tolerance: CROSS_VALIDATION_TOLERANCE,
        passed: max_deviation < CROSS_VALIDATION_TOLERANCE,
    })
}
