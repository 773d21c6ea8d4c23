//! s-Wigner functions of pure states, computed by three independent routes,
//! plus the characteristic function and the two marginals.
//!
//! The position route evaluates, for every lag `τ_m = m·dq`,
//! `f_m(q) = Ψ*(q − aτ)·Ψ(q + bτ)` with `a = (1−s)/2`, `b = (1+s)/2` by two
//! spectral shifts, then Fourier transforms over `τ`. The lags `±N/2` alias to
//! the same momentum bin and are averaged.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    fft2_in_place, position_to_momentum, signed_index, FftPair, Grid, ShiftOptions, Shifter,
    WavefunctionGrid, COMPLEX_SHIFT_PRUNE, DEFAULT_RAMP_GUARD,
};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// The ordering parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SParameter(pub Complex64);

impl SParameter {
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::invalid("s must be finite"));
        }
        Ok(Self(value))
    }

    pub fn real(value: f64) -> Self {
        Self(Complex64::new(value, 0.0))
    }

    pub fn imag(value: f64) -> Self {
        Self(Complex64::new(0.0, value))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.im == 0.0
    }

    /// Weight `(1−s)/2` of the conjugated factor.
    pub fn left_weight(&self) -> Complex64 {
        (1.0 - self.0) / 2.0
    }

    /// Weight `(1+s)/2` of the plain factor.
    pub fn right_weight(&self) -> Complex64 {
        (1.0 + self.0) / 2.0
    }

    /// `−conj(s)`, the parameter of the complex-conjugate function.
    pub fn reflected(&self) -> Self {
        Self(-self.0.conj())
    }
}

impl fmt::Display for SParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex(self.0))
    }
}

impl FromStr for SParameter {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        Self::new(parse_complex(text)?)
    }
}

/// `a+bi` with 17 significant digits.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (no spaces; `i` or `j` suffix).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let bad = || Error::Parse(format!("cannot parse complex number '{text}'"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent or the leading sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let parse_imag = |s: &str| -> Result<f64> {
        match s {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => s.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_imag(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, parse_imag(body)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    StateSymbol,
    OperatorSymbol,
}

/// Samples on the phase-space lattice, row-major with `q` outer and `p` inner.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceFunction {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    pub s: SParameter,
    pub kind: SymbolKind,
}

impl PhaseSpaceFunction {
    pub fn new(
        grid: Grid,
        samples: Vec<Complex64>,
        s: SParameter,
        kind: SymbolKind,
    ) -> Result<Self> {
        if samples.len() != grid.n() * grid.n() {
            return Err(Error::invalid(format!(
                "expected {} phase-space samples, got {}",
                grid.n() * grid.n(),
                samples.len()
            )));
        }
        Ok(Self {
            grid,
            samples,
            s,
            kind,
        })
    }

    /// Samples `f(q_j, p_k)` of a function on the lattice.
    pub fn from_fn(
        grid: &Grid,
        s: SParameter,
        kind: SymbolKind,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Self {
        let n = grid.n();
        let mut samples = Vec::with_capacity(n * n);
        for j in 0..n {
            let q = grid.q(j);
            for k in 0..n {
                samples.push(f(q, grid.p(k)));
            }
        }
        Self {
            grid: *grid,
            samples,
            s,
            kind,
        }
    }

    pub fn constant(grid: &Grid, s: SParameter, value: Complex64) -> Self {
        Self::from_fn(grid, s, SymbolKind::OperatorSymbol, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.samples[j * self.n() + k]
    }

    /// Value at the lattice point nearest to `(q, p)`.
    pub fn nearest(&self, q: f64, p: f64) -> Complex64 {
        self.at(self.grid.nearest_q_index(q), self.grid.nearest_p_index(p))
    }

    /// `Σ A dq dp`.
    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * self.grid.dq() * self.grid.dp()
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|z| z.conj()).collect(),
            s: self.s.reflected(),
            ..self.clone()
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|&z| f(z)).collect(),
            ..self.clone()
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..self.clone()
        }
    }

    pub fn require_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.s != other.s {
            return Err(Error::ParameterMismatch(format!(
                "s = {} vs s = {}",
                self.s, other.s
            )));
        }
        Ok(())
    }
}

/// Samples of `M(τ_m, θ_l)` for centered `m, l`, row-major with `τ` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    pub s: SParameter,
}

impl CharacteristicFunction {
    pub fn dtau(&self) -> f64 {
        self.grid.dq()
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.grid.length()
    }

    /// Value at centered indices `m` (lag) and `l` (wavenumber).
    pub fn at(&self, m: i64, l: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let row = (m + n / 2) as usize;
        let col = (l + n / 2) as usize;
        self.samples[row * n as usize + col]
    }

    /// Inverse transform back to the s-Wigner function.
    pub fn to_wigner(&self) -> PhaseSpaceFunction {
        let grid = self.grid;
        let n = grid.n();
        let half = (n / 2) as i64;
        let fft = FftPair::new(n);
        // table[j][bin(m)] = f_m(q_j)
        let mut table = vec![ZERO; n * n];
        let mut column = vec![ZERO; n];
        for m in -half..half {
            let row = (m + half) as usize;
            for l in -half..half {
                let phase = Complex64::from_polar(1.0, -(l as f64) * self.dtheta() * grid.q_min());
                column[l.rem_euclid(n as i64) as usize] =
                    self.samples[row * n + (l + half) as usize] * phase;
            }
            fft.forward.process(&mut column);
            let bin = m.rem_euclid(n as i64) as usize;
            for j in 0..n {
                table[j * n + bin] = column[j] / (n as f64 * grid.dq());
            }
        }
        lag_table_to_wigner(&grid, table, self.s)
    }
}

fn guard_error(exponent: f64, max_imag: f64) -> Error {
    Error::OverflowGuard {
        exponent,
        guard: DEFAULT_RAMP_GUARD,
        max_imag,
    }
}

/// `f_m(q_j)` for every lag, stored as `table[j·N + bin(m)]`, with the
/// `±N/2` lags averaged into the shared bin.
fn position_lag_table(psi: &WavefunctionGrid, s: SParameter) -> Result<Vec<Complex64>> {
    let grid = psi.grid;
    let n = grid.n();
    let half = (n / 2) as i64;
    let samples = psi.position_samples();
    let shifter = Shifter::new(&samples, grid.dq(), ShiftOptions::default());
    let max_imag = 4.0 * shifter.max_imaginary_shift() / grid.length();
    let a = s.left_weight();
    let b = s.right_weight();
    let mut table = vec![ZERO; n * n];
    for m in -half..=half {
        let tau = m as f64 * grid.dq();
        let left = shifter
            .shift(a.conj() * tau)
            .map_err(|e| with_max_imag(e, max_imag))?;
        let right = shifter
            .shift(-b * tau)
            .map_err(|e| with_max_imag(e, max_imag))?;
        let weight = if m.abs() == half { 0.5 } else { 1.0 };
        let bin = m.rem_euclid(n as i64) as usize;
        for j in 0..n {
            table[j * n + bin] += left[j].conj() * right[j] * weight;
        }
    }
    Ok(table)
}

fn with_max_imag(err: Error, max_imag: f64) -> Error {
    match err {
        Error::OverflowGuard { exponent, .. } => guard_error(exponent, max_imag),
        other => other,
    }
}

/// `A(q_j, p_k) = dq/(2πħ) Σ_m e^{−iτ_m p_k/ħ} f_m(q_j)`.
fn lag_table_to_wigner(
    grid: &Grid,
    mut table: Vec<Complex64>,
    s: SParameter,
) -> PhaseSpaceFunction {
    let n = grid.n();
    let fft = FftPair::new(n);
    let scale = grid.dq() / (2.0 * PI * grid.hbar());
    let mut samples = vec![ZERO; n * n];
    for j in 0..n {
        let row = &mut table[j * n..(j + 1) * n];
        fft.forward.process(row);
        for k in 0..n {
            let bin = grid.centered(k).rem_euclid(n as i64) as usize;
            samples[j * n + k] = row[bin] * scale;
        }
    }
    PhaseSpaceFunction {
        grid: *grid,
        samples,
        s,
        kind: SymbolKind::StateSymbol,
    }
}

/// The s-Wigner function by the position-space kernel.
pub fn s_wigner(psi: &WavefunctionGrid, s: SParameter) -> Result<PhaseSpaceFunction> {
    let table = position_lag_table(psi, s)?;
    Ok(lag_table_to_wigner(&psi.grid, table, s))
}

/// `M(τ, θ) = Σ_q f_τ(q) e^{iθq} dq` on the `(τ, θ)` lattice.
pub fn characteristic(psi: &WavefunctionGrid, s: SParameter) -> Result<CharacteristicFunction> {
    let grid = psi.grid;
    let n = grid.n();
    let half = (n / 2) as i64;
    let table = position_lag_table(psi, s)?;
    let fft = FftPair::new(n);
    let dtheta = 2.0 * PI / grid.length();
    let mut samples = vec![ZERO; n * n];
    let mut column = vec![ZERO; n];
    for m in -half..half {
        let bin = m.rem_euclid(n as i64) as usize;
        for j in 0..n {
            column[j] = table[j * n + bin];
        }
        fft.inverse.process(&mut column);
        let row = (m + half) as usize;
        for l in -half..half {
            let phase = Complex64::from_polar(grid.dq(), l as f64 * dtheta * grid.q_min());
            samples[row * n + (l + half) as usize] =
                column[l.rem_euclid(n as i64) as usize] * phase;
        }
    }
    Ok(CharacteristicFunction { grid, samples, s })
}

/// Multiplies position samples by `e^{iδq/ħ}` so that the momentum
/// transform of the result is `Φ(p − δ)`.
struct MomentumShifter {
    grid: Grid,
    psi: Vec<Complex64>,
    retained: Vec<bool>,
    retained_qmax: f64,
}

impl MomentumShifter {
    fn new(grid: Grid, psi: Vec<Complex64>) -> Self {
        let peak = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let retained: Vec<bool> = psi
            .iter()
            .map(|z| z.norm() > COMPLEX_SHIFT_PRUNE * peak)
            .collect();
        let retained_qmax = grid
            .q_values()
            .iter()
            .zip(&retained)
            .filter(|(_, keep)| **keep)
            .map(|(q, _)| q.abs())
            .fold(0.0, f64::max);
        Self {
            grid,
            psi,
            retained,
            retained_qmax,
        }
    }

    fn max_imaginary_shift(&self) -> f64 {
        DEFAULT_RAMP_GUARD * self.grid.hbar() / self.retained_qmax.max(f64::MIN_POSITIVE)
    }

    /// Samples of `p ↦ Φ(p − delta)`.
    fn shift(&self, delta: Complex64) -> Result<Vec<Complex64>> {
        let hbar = self.grid.hbar();
        let exponent = self.retained_qmax * delta.im.abs() / hbar;
        if delta.im != 0.0 && exponent > DEFAULT_RAMP_GUARD {
            return Err(guard_error(exponent, f64::NAN));
        }
        let ramped: Vec<Complex64> = self
            .psi
            .iter()
            .zip(self.grid.q_values())
            .zip(&self.retained)
            .map(|((z, q), keep)| {
                if delta.im != 0.0 && !keep {
                    ZERO
                } else {
                    z * (Complex64::new(0.0, q / hbar) * delta).exp()
                }
            })
            .collect();
        Ok(position_to_momentum(&self.grid, &ramped))
    }
}

/// The s-Wigner function by the momentum-space kernel
/// `A = (1/2πħ) ∫ du Φ*(p − bu) Φ(p + au) e^{iqu/ħ}`.
pub fn s_wigner_momentum(phi: &WavefunctionGrid, s: SParameter) -> Result<PhaseSpaceFunction> {
    let grid = phi.grid;
    let n = grid.n();
    let half = (n / 2) as i64;
    let shifter = MomentumShifter::new(grid, phi.position_samples());
    let max_imag = 4.0 * shifter.max_imaginary_shift() / (n as f64 * grid.dp());
    let a = s.left_weight();
    let b = s.right_weight();
    let dp = grid.dp();
    let hbar = grid.hbar();
    // table[k][bin(m)] = h_m(p_k) e^{i m q_min dp/ħ}
    let mut table = vec![ZERO; n * n];
    for m in -half..=half {
        let u = m as f64 * dp;
        let left = shifter
            .shift(b.conj() * u)
            .map_err(|e| with_max_imag(e, max_imag))?;
        let right = shifter
            .shift(-a * u)
            .map_err(|e| with_max_imag(e, max_imag))?;
        let weight = if m.abs() == half { 0.5 } else { 1.0 };
        let phase = Complex64::from_polar(weight, u * grid.q_min() / hbar);
        let bin = m.rem_euclid(n as i64) as usize;
        for k in 0..n {
            table[k * n + bin] += left[k].conj() * right[k] * phase;
        }
    }
    let fft = FftPair::new(n);
    let scale = dp / (2.0 * PI * hbar);
    let mut samples = vec![ZERO; n * n];
    for k in 0..n {
        let row = &mut table[k * n..(k + 1) * n];
        fft.inverse.process(row);
        for j in 0..n {
            samples[j * n + k] = row[j] * scale;
        }
    }
    Ok(PhaseSpaceFunction {
        grid,
        samples,
        s,
        kind: SymbolKind::StateSymbol,
    })
}

/// The s-Wigner function as `e^{−iħa ∂q∂p}` applied to the ordered product
/// `Ψ*(q) Φ(p) e^{ipq/ħ}/√(2πħ)`, which is itself the `s = 1` function.
pub fn s_wigner_kirkwood(psi: &WavefunctionGrid, s: SParameter) -> Result<PhaseSpaceFunction> {
    let grid = psi.grid;
    let n = grid.n();
    let hbar = grid.hbar();
    let position = psi.position_samples();
    let momentum = psi.momentum_samples();
    let norm = 1.0 / (2.0 * PI * hbar).sqrt();
    let mut data = vec![ZERO; n * n];
    for j in 0..n {
        let q = grid.q(j);
        for k in 0..n {
            let p = grid.p(k);
            data[j * n + k] =
                position[j].conj() * momentum[k] * Complex64::from_polar(norm, p * q / hbar);
        }
    }
    let a = s.left_weight();
    if a == ZERO {
        return PhaseSpaceFunction::new(grid, data, s, SymbolKind::StateSymbol);
    }
    fft2_in_place(&mut data, n, false);
    let peak = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut max_exponent: f64 = 0.0;
    let complex = a.im != 0.0;
    for u in 0..n {
        let su = signed_index(u, n) as f64;
        for v in 0..n {
            let sv = signed_index(v, n) as f64;
            let idx = u * n + v;
            if complex && data[idx].norm() <= COMPLEX_SHIFT_PRUNE * peak {
                data[idx] = ZERO;
                continue;
            }
            let exponent = Complex64::new(0.0, 2.0 * PI * su * sv / n as f64) * a;
            max_exponent = max_exponent.max(exponent.re.abs());
            data[idx] *= exponent.exp();
        }
    }
    if complex && max_exponent > DEFAULT_RAMP_GUARD {
        let max_imag = 2.0 * s.0.im.abs() * DEFAULT_RAMP_GUARD / max_exponent;
        return Err(guard_error(max_exponent, max_imag));
    }
    fft2_in_place(&mut data, n, true);
    let scale = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    PhaseSpaceFunction::new(grid, data, s, SymbolKind::StateSymbol)
}

/// A marginal density with the imaginary residue kept apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub values: Vec<f64>,
    pub imaginary_residue: Vec<f64>,
}

impl Marginal {
    pub fn max_imaginary(&self) -> f64 {
        self.imaginary_residue
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

fn require_state(a: &PhaseSpaceFunction) -> Result<()> {
    if a.kind != SymbolKind::StateSymbol {
        return Err(Error::invalid("marginals need a state symbol"));
    }
    Ok(())
}

/// `∫ A dp` at every `q_j`.
pub fn marginal_position(a: &PhaseSpaceFunction) -> Result<Marginal> {
    require_state(a)?;
    let n = a.n();
    let dp = a.grid.dp();
    let sums: Vec<Complex64> = (0..n)
        .map(|j| a.samples[j * n..(j + 1) * n].iter().sum::<Complex64>() * dp)
        .collect();
    Ok(split(sums))
}

/// `∫ A dq` at every `p_k`.
pub fn marginal_momentum(a: &PhaseSpaceFunction) -> Result<Marginal> {
    require_state(a)?;
    let n = a.n();
    let dq = a.grid.dq();
    let sums: Vec<Complex64> = (0..n)
        .map(|k| (0..n).map(|j| a.samples[j * n + k]).sum::<Complex64>() * dq)
        .collect();
    Ok(split(sums))
}

fn split(values: Vec<Complex64>) -> Marginal {
    Marginal {
        values: values.iter().map(|z| z.re).collect(),
        imaginary_residue: values.iter().map(|z| z.im).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{gaussian_state, ho_eigenstate};

    fn grid() -> Grid {
        Grid::new(256, -12.0, 12.0, 1.0).unwrap()
    }

    fn ground() -> WavefunctionGrid {
        gaussian_state(&grid(), 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.3").unwrap(), Complex64::new(0.3, 0.0));
        assert_eq!(parse_complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(parse_complex("-0.5i").unwrap(), Complex64::new(0.0, -0.5));
        assert_eq!(parse_complex("0.5+0.5i").unwrap(), Complex64::new(0.5, 0.5));
        assert_eq!(
            parse_complex("-1e-3-2E+1i").unwrap(),
            Complex64::new(-1e-3, -20.0)
        );
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        let z = Complex64::new(0.1, -1.0 / 3.0);
        assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn ground_values_at_origin() {
        let psi = ground();
        let cases = [
            (SParameter::real(0.0), 1.0 / PI),
            (SParameter::real(0.5), 1.0 / PI / 1.25f64.sqrt()),
            (SParameter::imag(0.5), 1.0 / PI / 0.75f64.sqrt()),
        ];
        for (s, expected) in cases {
            let a = s_wigner(&psi, s).unwrap();
            let value = a.nearest(0.0, 0.0);
            assert!((value.re - expected).abs() < 1e-10, "s={s}: {value}");
            assert!(value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn wigner_of_ground_state() {
        let a = s_wigner(&ground(), SParameter::real(0.0)).unwrap();
        let g = a.grid;
        let mut worst: f64 = 0.0;
        for j in 0..g.n() {
            for k in 0..g.n() {
                let (q, p) = (g.q(j), g.p(k));
                worst = worst.max((a.at(j, k) - (-q * q - p * p).exp() / PI).norm());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn marginals_hold() {
        let psi = ground();
        let density = psi.density();
        let phi = psi.to_momentum().unwrap();
        for s in [SParameter::real(0.7), SParameter::imag(0.4)] {
            let a = s_wigner(&psi, s).unwrap();
            let mq = marginal_position(&a).unwrap();
            let mp = marginal_momentum(&a).unwrap();
            for j in 0..256 {
                assert!((mq.values[j] - density[j]).abs() < 1e-9);
                assert!((mp.values[j] - phi.samples[j].norm_sqr()).abs() < 1e-9);
            }
            assert!((a.integral() - 1.0).norm() < 1e-8);
        }
        let a = s_wigner(&psi, SParameter::real(0.7)).unwrap();
        let mq = marginal_position(&a).unwrap();
        assert!((mq.values[128] - PI.powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn route_equivalence() {
        let g = grid();
        let states = [ground(), ho_eigenstate(&g, 3).unwrap()];
        for psi in &states {
            for s in [0.0, 0.3, -0.3, 0.5] {
                let s = SParameter::real(s);
                let a = s_wigner(psi, s).unwrap();
                let b = s_wigner_momentum(&psi.to_momentum().unwrap(), s).unwrap();
                let c = s_wigner_kirkwood(psi, s).unwrap();
                assert!(
                    a.max_deviation(&b) < 1e-9,
                    "momentum route {}",
                    a.max_deviation(&b)
                );
                assert!(
                    a.max_deviation(&c) < 1e-9,
                    "kirkwood route {}",
                    a.max_deviation(&c)
                );
            }
        }
    }

    /// Closed-form Gaussian τ-integral of the ground state's s-Wigner function.
    fn ground_closed_form(q: f64, p: f64, s: Complex64) -> Complex64 {
        let one_plus = 1.0 + s * s;
        let z = s * q + Complex64::new(0.0, p);
        (z * z / one_plus - q * q).exp() / (PI * one_plus.sqrt())
    }

    // Imaginary s continues Ψ off the real axis, which amplifies FFT round-off
    // by about e^{κ_max·|Im s|·τ_max/2}. A box of ±10 balances that against the
    // truncated lag tail; at |Im s| = 0.5 the floor is near 1e-7.
    fn balanced_grid() -> Grid {
        Grid::new(64, -10.0, 10.0, 1.0).unwrap()
    }

    #[test]
    fn routes_against_closed_form() {
        let g = balanced_grid();
        let psi = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap();
        let phi = psi.to_momentum().unwrap();
        let cases = [
            (SParameter::real(0.5), 1e-9, 1e-9),
            (SParameter(Complex64::new(0.3, 0.2)), 1e-9, 1e-9),
            (SParameter::imag(0.4), 1e-9, 1e-9),
            (SParameter::imag(0.5), 2e-7, 1e-8),
        ];
        for (s, shifted_tol, kirkwood_tol) in cases {
            let exact = PhaseSpaceFunction::from_fn(&g, s, SymbolKind::StateSymbol, |q, p| {
                ground_closed_form(q, p, s.0)
            });
            let a = s_wigner(&psi, s).unwrap();
            let b = s_wigner_momentum(&phi, s).unwrap();
            let c = s_wigner_kirkwood(&psi, s).unwrap();
            assert!(a.max_deviation(&exact) < shifted_tol, "s={s} position");
            assert!(b.max_deviation(&exact) < shifted_tol, "s={s} momentum");
            assert!(c.max_deviation(&exact) < kirkwood_tol, "s={s} kirkwood");
            assert!(a.max_deviation(&b) < shifted_tol, "s={s} routes");
        }
    }

    #[test]
    fn kirkwood_raw_product() {
        let psi = gaussian_state(&grid(), 0.5, 1.0, 1.0).unwrap();
        let raw = s_wigner_kirkwood(&psi, SParameter::real(1.0)).unwrap();
        let a = s_wigner(&psi, SParameter::real(1.0)).unwrap();
        assert!(raw.max_deviation(&a) < 1e-9);
    }

    #[test]
    fn characteristic_values() {
        let psi = ground();
        let m = characteristic(&psi, SParameter::real(0.0)).unwrap();
        assert!((m.at(0, 0) - 1.0).norm() < 1e-10);
        // τ = 1 is lag 1/dq = 32/3 on this grid; use a grid where it is integral.
        let g = Grid::new(256, -16.0, 16.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap();
        let m = characteristic(&psi, SParameter::real(0.0)).unwrap();
        assert!((m.at(8, 0) - (-0.25f64).exp()).norm() < 1e-10);
        for s in [
            SParameter::real(0.0),
            SParameter::real(0.3),
            SParameter::imag(0.4),
        ] {
            let m = characteristic(&psi, s).unwrap();
            let a = s_wigner(&psi, s).unwrap();
            assert!(m.to_wigner().max_deviation(&a) < 1e-9);
        }
    }

    #[test]
    fn reality_and_conjugation() {
        let psi = gaussian_state(&grid(), 0.5, 1.0, 1.0).unwrap();
        for im in [0.4, 0.8] {
            let a = s_wigner(&psi, SParameter::imag(im)).unwrap();
            assert!(a.max_imag() < 1e-10, "{}", a.max_imag());
        }
        for s in [Complex64::new(0.3, 0.0), Complex64::new(0.3, 0.2)] {
            let s = SParameter(s);
            let a = s_wigner(&psi, s).unwrap();
            let b = s_wigner(&psi, s.reflected()).unwrap();
            assert!(a.conj().max_deviation(&b) < 1e-10);
        }
    }

    #[test]
    fn guard_reports_admissible_bound() {
        let g = Grid::new(64, -6.0, 6.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.0, 0.0, 0.5).unwrap();
        let err = s_wigner(&psi, SParameter(Complex64::new(0.5, 5.0))).unwrap_err();
        match err {
            Error::OverflowGuard { max_imag, .. } => {
                assert!(max_imag > 0.0 && max_imag < 5.0);
                assert!(s_wigner(&psi, SParameter(Complex64::new(0.5, 0.9 * max_imag))).is_ok());
            }
            other => panic!("unexpected {other}"),
        }
    }
}
