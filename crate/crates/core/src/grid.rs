//! Periodic position/momentum lattices, the discrete Fourier maps between
//! them, and spectral fractional shifts.
//!
//! Positions are `q_j = q_min + j·dq` for `j = 0..n`. Momenta are centered:
//! `p_k = (k − n/2)·dp` for `k = 0..n`, so the Nyquist point sits at `−n/2`.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `|Re(exponent)|` of a complex phase ramp.
pub const DEFAULT_RAMP_GUARD: f64 = 50.0;

/// Relative threshold below which Fourier coefficients are dropped before a
/// complex (growing) ramp is applied. Such coefficients are round-off, and
/// amplifying them would only inject noise.
pub const COMPLEX_SHIFT_PRUNE: f64 = 1e-15;

/// Amplitude at the box edges above which a state is considered clipped.
pub const EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_points: usize,
    q_min: f64,
    q_max: f64,
    hbar: f64,
}

impl Grid {
    pub fn new(n_points: usize, q_min: f64, q_max: f64, hbar: f64) -> Result<Self> {
        if !q_min.is_finite() || !q_max.is_finite() {
            return Err(Error::invalid("grid bounds must be finite"));
        }
        if q_max <= q_min {
            return Err(Error::invalid(format!(
                "q_max ({q_max}) must exceed q_min ({q_min})"
            )));
        }
        if n_points < 8 {
            return Err(Error::invalid(format!(
                "grid needs at least 8 points, got {n_points}"
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "grid size must be even, got {n_points}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::invalid(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self {
            n_points,
            q_min,
            q_max,
            hbar,
        })
    }

    /// Same box and size with a different ħ.
    pub fn with_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(self.n_points, self.q_min, self.q_max, hbar)
    }

    pub fn n(&self) -> usize {
        self.n_points
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.q_max - self.q_min
    }

    pub fn dq(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / (self.n_points as f64 * self.dq())
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq()
    }

    pub fn p(&self, k: usize) -> f64 {
        self.centered(k) as f64 * self.dp()
    }

    pub fn q_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.q(j)).collect()
    }

    pub fn p_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.p(k)).collect()
    }

    /// Index of the lattice point nearest to `q`, clamped to the box.
    pub fn nearest_q_index(&self, q: f64) -> usize {
        let j = ((q - self.q_min) / self.dq()).round();
        j.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Index of the momentum lattice point nearest to `p`.
    pub fn nearest_p_index(&self, p: f64) -> usize {
        let k = (p / self.dp()).round() + (self.n_points / 2) as f64;
        k.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Centered momentum index `k − n/2`.
    pub fn centered(&self, k: usize) -> i64 {
        k as i64 - (self.n_points / 2) as i64
    }

    /// Angular wavenumber of FFT bin `i` on the position axis.
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * signed_index(i, self.n_points) as f64 / self.length()
    }
}

/// Signed representative of an FFT bin: `0..n/2` stay, the rest map to
/// `−n/2..0`. Bin `n/2` is the Nyquist bin and maps to `−n/2`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    let i = i as i64;
    let n = n as i64;
    if i < n / 2 {
        i
    } else {
        i - n
    }
}

/// Wrap any integer into the centered range `[−n/2, n/2)`.
pub fn wrap_centered(i: i64, n: usize) -> i64 {
    let n = n as i64;
    (i + n / 2).rem_euclid(n) - n / 2
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Cached forward and inverse plans for length `n`. Both are unnormalized.
#[derive(Clone)]
pub struct FftPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut p = planner().lock().expect("fft planner poisoned");
        Self {
            forward: p.plan_fft_forward(n),
            inverse: p.plan_fft_inverse(n),
        }
    }
}

/// Forward FFT of a copy of `data`.
pub fn fft(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    FftPair::new(data.len()).forward.process(&mut out);
    out
}

/// Inverse FFT of a copy of `data`, divided by its length.
pub fn ifft(data: &[Complex64]) -> Vec<Complex64> {
    let mut out = data.to_vec();
    FftPair::new(data.len()).inverse.process(&mut out);
    let scale = 1.0 / data.len() as f64;
    out.iter_mut().for_each(|z| *z *= scale);
    out
}

/// In-place 2-D FFT of a row-major `n × n` array (unnormalized).
pub fn fft2_in_place(data: &mut [Complex64], n: usize, inverse: bool) {
    let pair = FftPair::new(n);
    let plan = if inverse {
        &pair.inverse
    } else {
        &pair.forward
    };
    plan.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            column[r] = data[r * n + c];
        }
        plan.process(&mut column);
        for r in 0..n {
            data[r * n + c] = column[r];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    pub representation: Representation,
}

impl WavefunctionGrid {
    pub fn new(
        grid: Grid,
        samples: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::invalid(format!(
                "expected {} samples, got {}",
                grid.n(),
                samples.len()
            )));
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::invalid("wavefunction samples must be finite"));
        }
        Ok(Self {
            grid,
            samples,
            representation,
        })
    }

    /// Lattice spacing of this representation.
    pub fn spacing(&self) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dq(),
            Representation::Momentum => self.grid.dp(),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Rescale to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return Err(Error::invalid("cannot normalize a zero wavefunction"));
        }
        self.samples.iter_mut().for_each(|z| *z /= norm);
        Ok(self)
    }

    pub fn density(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid || self.representation != other.representation {
            return Err(Error::GridMismatch);
        }
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.spacing())
    }

    /// Largest modulus among the two outermost samples on each side,
    /// relative to the largest modulus overall.
    pub fn edge_amplitude(&self) -> f64 {
        let n = self.samples.len();
        let peak = self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        [0, 1, n - 2, n - 1]
            .iter()
            .map(|&i| self.samples[i].norm())
            .fold(0.0, f64::max)
            / peak
    }

    /// Warn (or fail when `strict`) if the state does not decay at the box edges.
    pub fn check_support(&self, strict: bool) -> Result<()> {
        let edge = self.edge_amplitude();
        if edge > EDGE_TOLERANCE {
            if strict {
                return Err(Error::Support { edge });
            }
            log::warn!("box too small: relative edge amplitude {edge:.3e}");
        }
        Ok(())
    }

    fn require(&self, rep: Representation) -> Result<()> {
        if self.representation != rep {
            return Err(Error::invalid(format!(
                "expected {rep:?} representation, got {:?}",
                self.representation
            )));
        }
        Ok(())
    }

    pub fn to_momentum(&self) -> Result<Self> {
        self.require(Representation::Position)?;
        Ok(Self {
            grid: self.grid,
            samples: position_to_momentum(&self.grid, &self.samples),
            representation: Representation::Momentum,
        })
    }

    pub fn to_position(&self) -> Result<Self> {
        self.require(Representation::Momentum)?;
        Ok(Self {
            grid: self.grid,
            samples: momentum_to_position(&self.grid, &self.samples),
            representation: Representation::Position,
        })
    }

    /// Position-space samples, converting if needed.
    pub fn position_samples(&self) -> Vec<Complex64> {
        match self.representation {
            Representation::Position => self.samples.clone(),
            Representation::Momentum => momentum_to_position(&self.grid, &self.samples),
        }
    }

    /// Momentum-space samples, converting if needed.
    pub fn momentum_samples(&self) -> Vec<Complex64> {
        match self.representation {
            Representation::Momentum => self.samples.clone(),
            Representation::Position => position_to_momentum(&self.grid, &self.samples),
        }
    }
}

/// `Φ(p_k) = dq/√(2πħ) Σ_j e^{−i p_k q_j/ħ} Ψ_j`.
pub fn position_to_momentum(grid: &Grid, psi: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let spectrum = fft(psi);
    let scale = grid.dq() / (2.0 * PI * grid.hbar()).sqrt();
    (0..n)
        .map(|k| {
            let kc = grid.centered(k);
            let bin = kc.rem_euclid(n as i64) as usize;
            let phase = Complex64::from_polar(1.0, -grid.p(k) * grid.q_min() / grid.hbar());
            spectrum[bin] * phase * scale
        })
        .collect()
}

/// `Ψ(q_j) = dp/√(2πħ) Σ_k e^{i p_k q_j/ħ} Φ_k`.
pub fn momentum_to_position(grid: &Grid, phi: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (k, value) in phi.iter().enumerate() {
        let bin = grid.centered(k).rem_euclid(n as i64) as usize;
        bins[bin] = value * Complex64::from_polar(1.0, grid.p(k) * grid.q_min() / grid.hbar());
    }
    FftPair::new(n).inverse.process(&mut bins);
    let scale = grid.dp() / (2.0 * PI * grid.hbar()).sqrt();
    bins.iter_mut().for_each(|z| *z *= scale);
    bins
}

/// Options for spectral shifts with complex displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftOptions {
    pub guard: f64,
    pub prune: f64,
}

impl Default for ShiftOptions {
    fn default() -> Self {
        Self {
            guard: DEFAULT_RAMP_GUARD,
            prune: COMPLEX_SHIFT_PRUNE,
        }
    }
}

/// Precomputed spectrum of a periodic lattice function, ready to be shifted
/// repeatedly.
#[derive(Clone)]
pub struct Shifter {
    spectrum: Vec<Complex64>,
    wavenumbers: Vec<f64>,
    /// Largest wavenumber magnitude among coefficients that survive pruning.
    retained_kmax: f64,
    retained: Vec<bool>,
    options: ShiftOptions,
    fft: FftPair,
}

impl Shifter {
    /// `spacing` is the lattice step of the axis `f` lives on.
    pub fn new(f: &[Complex64], spacing: f64, options: ShiftOptions) -> Self {
        let n = f.len();
        let fft = FftPair::new(n);
        let mut spectrum = f.to_vec();
        fft.forward.process(&mut spectrum);
        let length = spacing * n as f64;
        let wavenumbers: Vec<f64> = (0..n)
            .map(|i| 2.0 * PI * signed_index(i, n) as f64 / length)
            .collect();
        let peak = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let retained: Vec<bool> = spectrum
            .iter()
            .map(|z| z.norm() > options.prune * peak)
            .collect();
        let retained_kmax = wavenumbers
            .iter()
            .zip(&retained)
            .filter(|(_, keep)| **keep)
            .map(|(k, _)| k.abs())
            .fold(0.0, f64::max);
        Self {
            spectrum,
            wavenumbers,
            retained_kmax,
            retained,
            options,
            fft,
        }
    }

    /// Largest `|Im δ|` this function can be shifted by.
    pub fn max_imaginary_shift(&self) -> f64 {
        if self.retained_kmax == 0.0 {
            f64::INFINITY
        } else {
            self.options.guard / self.retained_kmax
        }
    }

    /// Samples of `q ↦ f(q − delta)`.
    pub fn shift(&self, delta: Complex64) -> Result<Vec<Complex64>> {
        let n = self.spectrum.len();
        let mut out = Vec::with_capacity(n);
        if delta.im == 0.0 {
            for (c, k) in self.spectrum.iter().zip(&self.wavenumbers) {
                out.push(c * Complex64::from_polar(1.0, -k * delta.re));
            }
        } else {
            let exponent = self.retained_kmax * delta.im.abs();
            if exponent > self.options.guard {
                return Err(Error::OverflowGuard {
                    exponent,
                    guard: self.options.guard,
                    max_imag: f64::NAN,
                });
            }
            for ((c, k), keep) in self
                .spectrum
                .iter()
                .zip(&self.wavenumbers)
                .zip(&self.retained)
            {
                if *keep {
                    out.push(c * (Complex64::new(0.0, -k) * delta).exp());
                } else {
                    out.push(Complex64::new(0.0, 0.0));
                }
            }
        }
        self.fft.inverse.process(&mut out);
        let scale = 1.0 / n as f64;
        out.iter_mut().for_each(|z| *z *= scale);
        Ok(out)
    }
}

/// Samples of `q ↦ f(q − delta)` for a band-limited periodic `f` with the
/// given lattice spacing.
pub fn fractional_shift(f: &[Complex64], delta: Complex64, spacing: f64) -> Result<Vec<Complex64>> {
    Shifter::new(f, spacing, ShiftOptions::default()).shift(delta)
}

/// Spectral derivative of order `order` of a periodic lattice function.
pub fn spectral_derivative(f: &[Complex64], spacing: f64, order: u32) -> Vec<Complex64> {
    let n = f.len();
    let mut spectrum = fft(f);
    let length = spacing * n as f64;
    for (i, c) in spectrum.iter_mut().enumerate() {
        let si = signed_index(i, n);
        // The Nyquist mode has no well-defined odd derivative.
        if order % 2 == 1 && si == -(n as i64) / 2 {
            *c = Complex64::new(0.0, 0.0);
            continue;
        }
        let k = 2.0 * PI * si as f64 / length;
        *c *= Complex64::new(0.0, k).powu(order);
    }
    ifft(&spectrum)
}
