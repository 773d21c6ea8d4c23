//! Canonical-shift parameter algebra and the operator ↔ symbol transform.
//!
//! An operator is an `N × N` matrix in the orthonormal position basis, so its
//! continuum kernel is `K(x, x′) = A[x, x′]/dq`. Its symbol is
//! `A_w(q, p) = ∫ dτ e^{−iτp/ħ} K(q + bτ, q − aτ)` with `a = (1−s)/2`,
//! `b = (1+s)/2`. With this normalization the identity maps to 1 and
//! `|Ψ⟩⟨Ψ|` maps to `2πħ` times the s-Wigner function of `Ψ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    momentum_to_position, position_to_momentum, FftPair, Grid, ShiftOptions, Shifter,
    WavefunctionGrid,
};
use crate::transform::{PhaseSpaceFunction, SParameter, SymbolKind};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coefficients of the linear change of variables `Q = αu + βv`,
/// `P = γu + δv` (per axis).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalShift {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

impl CanonicalShift {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || beta.len() != n || gamma.len() != n || delta.len() != n {
            return Err(Error::invalid(
                "coefficient vectors must share a nonzero length",
            ));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// One-axis shift.
    pub fn scalar(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha: vec![alpha],
            beta: vec![beta],
            gamma: vec![gamma],
            delta: vec![delta],
        }
    }

    /// The symmetric choice `(1/2, −1/2, 1/2, −1/2)`.
    pub fn symmetric() -> Self {
        Self::scalar(0.5, -0.5, 0.5, -0.5)
    }

    pub fn dimension(&self) -> usize {
        self.alpha.len()
    }
}

/// `∏ (α_i − β_i)(γ_i − δ_i)`.
pub fn canonicity_jacobian(shift: &CanonicalShift) -> f64 {
    (0..shift.dimension())
        .map(|i| (shift.alpha[i] - shift.beta[i]) * (shift.gamma[i] - shift.delta[i]))
        .product()
}

pub fn is_canonical(shift: &CanonicalShift) -> bool {
    (canonicity_jacobian(shift) - 1.0).abs() < 1e-12
}

/// `r_i = γ_i (β_i − α_i)/(γ_i − δ_i)`.
pub fn r_parameter(shift: &CanonicalShift) -> Result<Vec<f64>> {
    (0..shift.dimension())
        .map(|i| {
            let denom = shift.gamma[i] - shift.delta[i];
            if denom == 0.0 {
                return Err(Error::invalid(format!("gamma equals delta on axis {i}")));
            }
            Ok(shift.gamma[i] * (shift.beta[i] - shift.alpha[i]) / denom)
        })
        .collect()
}

/// `s = −(1 + 2r)`.
pub fn s_from_r(r: &[f64]) -> Vec<f64> {
    r.iter().map(|r| -(1.0 + 2.0 * r)).collect()
}

/// `r = −(1 + s)/2`.
pub fn r_from_s(s: &[f64]) -> Vec<f64> {
    s.iter().map(|s| -(1.0 + s) / 2.0).collect()
}

/// Dense operator in the orthonormal position basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub grid: Grid,
    pub entries: Vec<Complex64>,
    pub hermitian_hint: bool,
}

impl OperatorMatrix {
    pub fn new(grid: Grid, entries: Vec<Complex64>, hermitian_hint: bool) -> Result<Self> {
        let n = grid.n();
        if entries.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} matrix entries, got {}",
                n * n,
                entries.len()
            )));
        }
        let op = Self {
            grid,
            entries,
            hermitian_hint,
        };
        if hermitian_hint && op.hermiticity_defect() >= 1e-12 {
            return Err(Error::invalid("matrix flagged Hermitian is not Hermitian"));
        }
        Ok(op)
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n();
        Self {
            grid: *grid,
            entries: vec![ZERO; n * n],
            hermitian_hint: true,
        }
    }

    pub fn identity(grid: &Grid) -> Self {
        Self::diagonal(grid, |_| 1.0)
    }

    /// Multiplication by `f(q)`.
    pub fn diagonal(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let mut op = Self::zeros(grid);
        let n = grid.n();
        for j in 0..n {
            op.entries[j * n + j] = Complex64::new(f(grid.q(j)), 0.0);
        }
        op
    }

    pub fn position(grid: &Grid) -> Self {
        Self::diagonal(grid, |q| q)
    }

    /// Multiplication by `f(p)` in the momentum representation.
    pub fn momentum_function(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let n = grid.n();
        let multiplier: Vec<f64> = grid.p_values().iter().map(|&p| f(p)).collect();
        let mut op = Self::zeros(grid);
        let mut basis = vec![ZERO; n];
        for j in 0..n {
            basis.iter_mut().for_each(|z| *z = ZERO);
            basis[j] = Complex64::new(1.0, 0.0);
            let mut phi = position_to_momentum(grid, &basis);
            phi.iter_mut().zip(&multiplier).for_each(|(z, m)| *z *= m);
            let column = momentum_to_position(grid, &phi);
            for i in 0..n {
                op.entries[i * n + j] = column[i];
            }
        }
        op.symmetrize();
        op
    }

    pub fn momentum(grid: &Grid) -> Self {
        Self::momentum_function(grid, |p| p)
    }

    /// `|Ψ⟩⟨Ψ|`.
    pub fn projector(psi: &WavefunctionGrid) -> Self {
        Self::outer(psi, psi)
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &WavefunctionGrid, b: &WavefunctionGrid) -> Self {
        let grid = a.grid;
        let n = grid.n();
        let dq = grid.dq();
        let va = a.position_samples();
        let vb = b.position_samples();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(va[i] * vb[j].conj() * dq);
            }
        }
        Self {
            grid,
            entries,
            hermitian_hint: false,
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n() + j]
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        Self {
            entries,
            ..self.clone()
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst =
                    worst.max((self.entries[i * n + j] - self.entries[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// Replace by `(A + A†)/2` and mark Hermitian.
    pub fn symmetrize(&mut self) {
        let n = self.n();
        for i in 0..n {
            for j in i..n {
                let avg = (self.entries[i * n + j] + self.entries[j * n + i].conj()) / 2.0;
                self.entries[i * n + j] = avg;
                self.entries[j * n + i] = avg.conj();
            }
        }
        self.hermitian_hint = true;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n()).map(|i| self.at(i, i)).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.n();
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            let out = &mut entries[i * n..(i + 1) * n];
            for l in 0..n {
                let a = self.entries[i * n + l];
                if a == ZERO {
                    continue;
                }
                let row = &other.entries[l * n..(l + 1) * n];
                for (o, b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self {
            grid: self.grid,
            entries,
            hermitian_hint: false,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
            hermitian_hint: self.hermitian_hint && factor.im == 0.0,
            grid: self.grid,
        }
    }

    fn combine(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            hermitian_hint: self.hermitian_hint && other.hermitian_hint,
        })
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(psi)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

fn guard_with_bound(err: Error, shifter: &Shifter, grid: &Grid) -> Error {
    match err {
        Error::OverflowGuard {
            exponent, guard, ..
        } => Error::OverflowGuard {
            exponent,
            guard,
            max_imag: 4.0 * shifter.max_imaginary_shift() / grid.length(),
        },
        other => other,
    }
}

/// The s-symbol of an operator.
pub fn operator_to_symbol(op: &OperatorMatrix, s: SParameter) -> Result<PhaseSpaceFunction> {
    let grid = op.grid;
    let n = grid.n();
    let half = (n / 2) as i64;
    let dq = grid.dq();
    let a = s.left_weight();
    // table[j][bin(m)] = g_m(q_j) = K(q_j + bτ_m, q_j − aτ_m)
    let mut table = vec![ZERO; n * n];
    let mut diagonal = vec![ZERO; n];
    for m in -half..half {
        for (j, h) in diagonal.iter_mut().enumerate() {
            let row = (j as i64 + m).rem_euclid(n as i64) as usize;
            *h = op.entries[row * n + j] / dq;
        }
        let bin = m.rem_euclid(n as i64) as usize;
        let tau = m as f64 * dq;
        let shifted = if m == 0 {
            diagonal.clone()
        } else {
            let shifter = Shifter::new(&diagonal, dq, ShiftOptions::default());
            shifter
                .shift(a * tau)
                .map_err(|e| guard_with_bound(e, &shifter, &grid))?
        };
        for j in 0..n {
            table[j * n + bin] = shifted[j];
        }
    }
    let fft = FftPair::new(n);
    let mut samples = vec![ZERO; n * n];
    for j in 0..n {
        let row = &mut table[j * n..(j + 1) * n];
        fft.forward.process(row);
        for k in 0..n {
            let bin = grid.centered(k).rem_euclid(n as i64) as usize;
            samples[j * n + k] = row[bin] * dq;
        }
    }
    PhaseSpaceFunction::new(grid, samples, s, SymbolKind::OperatorSymbol)
}

/// The operator whose s-symbol is `symbol`; exact inverse of [`operator_to_symbol`].
pub fn symbol_to_operator(symbol: &PhaseSpaceFunction) -> Result<OperatorMatrix> {
    if symbol.kind != SymbolKind::OperatorSymbol {
        return Err(Error::invalid("expected an operator symbol"));
    }
    let grid = symbol.grid;
    let n = grid.n();
    let half = (n / 2) as i64;
    let dq = grid.dq();
    let a = symbol.s.left_weight();
    let fft = FftPair::new(n);
    // lags[bin(m)][j] = g_m(q_j)
    let mut lags = vec![ZERO; n * n];
    let mut row = vec![ZERO; n];
    for j in 0..n {
        for k in 0..n {
            let bin = grid.centered(k).rem_euclid(n as i64) as usize;
            row[bin] = symbol.samples[j * n + k];
        }
        fft.inverse.process(&mut row);
        for (bin, value) in row.iter().enumerate() {
            lags[bin * n + j] = value / (n as f64 * dq);
        }
    }
    let mut entries = vec![ZERO; n * n];
    for m in -half..half {
        let bin = m.rem_euclid(n as i64) as usize;
        let g = &lags[bin * n..(bin + 1) * n];
        let tau = m as f64 * dq;
        let h = if m == 0 {
            g.to_vec()
        } else {
            let shifter = Shifter::new(g, dq, ShiftOptions::default());
            shifter
                .shift(-a * tau)
                .map_err(|e| guard_with_bound(e, &shifter, &grid))?
        };
        for j in 0..n {
            let i = (j as i64 + m).rem_euclid(n as i64) as usize;
            entries[i * n + j] = h[j] * dq;
        }
    }
    Ok(OperatorMatrix {
        grid,
        entries,
        hermitian_hint: false,
    })
}

/// `|Ψ⟩⟨Ψ|` symbol divided by `2πħ`, as a state symbol.
pub fn projector_symbol(psi: &WavefunctionGrid, s: SParameter) -> Result<PhaseSpaceFunction> {
    let sym = operator_to_symbol(&OperatorMatrix::projector(psi), s)?;
    let scale = 1.0 / (2.0 * PI * psi.grid.hbar());
    Ok(PhaseSpaceFunction {
        kind: SymbolKind::StateSymbol,
        ..sym.map(|z| z * scale)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::gaussian_state;
    use crate::transform::s_wigner;

    fn grid() -> Grid {
        Grid::new(64, -8.0, 8.0, 1.0).unwrap()
    }

    #[test]
    fn jacobians() {
        assert_eq!(canonicity_jacobian(&CanonicalShift::symmetric()), 1.0);
        assert_eq!(
            canonicity_jacobian(&CanonicalShift::scalar(1.0, 0.0, 1.0, 0.0)),
            1.0
        );
        let off = CanonicalShift::scalar(1.0, 0.0, 2.0, 0.0);
        assert_eq!(canonicity_jacobian(&off), 2.0);
        assert!(!is_canonical(&off));
    }

    #[test]
    fn r_and_s() {
        let r = r_parameter(&CanonicalShift::symmetric()).unwrap();
        assert_eq!(r, vec![-0.5]);
        assert_eq!(s_from_r(&r), vec![0.0]);
        let r = r_parameter(&CanonicalShift::scalar(1.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(r, vec![-1.0]);
        assert_eq!(s_from_r(&r), vec![1.0]);
        assert!(r_parameter(&CanonicalShift::scalar(1.0, 0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn identity_and_position_symbols() {
        let g = grid();
        for s in [
            SParameter::real(0.0),
            SParameter::real(0.5),
            SParameter::real(-0.3),
        ] {
            let one = operator_to_symbol(&OperatorMatrix::identity(&g), s).unwrap();
            assert!(one.samples.iter().all(|z| (z - 1.0).norm() < 1e-10));
            let q = operator_to_symbol(&OperatorMatrix::position(&g), s).unwrap();
            let expected =
                PhaseSpaceFunction::from_fn(&g, s, SymbolKind::OperatorSymbol, |q, _| q.into());
            assert!(q.max_deviation(&expected) < 1e-9);
            let p = operator_to_symbol(&OperatorMatrix::momentum(&g), s).unwrap();
            let expected =
                PhaseSpaceFunction::from_fn(&g, s, SymbolKind::OperatorSymbol, |_, p| p.into());
            assert!(p.max_deviation(&expected) < 1e-9);
        }
    }

    #[test]
    fn momentum_symbol_inverts_to_momentum_operator() {
        let g = grid();
        let s = SParameter::real(0.0);
        let p = PhaseSpaceFunction::from_fn(&g, s, SymbolKind::OperatorSymbol, |_, p| p.into());
        let op = symbol_to_operator(&p).unwrap();
        assert!(op.max_deviation(&OperatorMatrix::momentum(&g)) < 1e-9);
        let one = PhaseSpaceFunction::constant(&g, s, 1.0.into());
        assert!(
            symbol_to_operator(&one)
                .unwrap()
                .max_deviation(&OperatorMatrix::identity(&g))
                < 1e-10
        );
    }

    #[test]
    fn projector_matches_wigner() {
        // The two sides differ only by the aliased lag ±L/2 term, so the box
        // must hold Ψ(q + L/2)Ψ(q − L/2) below the tolerance.
        let g = Grid::new(64, -10.0, 10.0, 1.0).unwrap();
        let psi = gaussian_state(&g, 0.5, 0.7, 1.0).unwrap();
        for s in [
            SParameter::real(0.0),
            SParameter::real(0.3),
            SParameter::real(-0.5),
        ] {
            let a = projector_symbol(&psi, s).unwrap();
            let w = s_wigner(&psi, s).unwrap();
            assert!(a.max_deviation(&w) < 1e-9, "s={s}: {}", a.max_deviation(&w));
        }
    }

    #[test]
    fn trace_identity_and_round_trip() {
        let g = grid();
        let a = gaussian_state(&g, 0.5, 0.7, 1.0).unwrap();
        let b = gaussian_state(&g, -1.0, -0.4, 0.8).unwrap();
        let mut op = OperatorMatrix::outer(&a, &b);
        op = op.add(&op.adjoint()).unwrap();
        for s in [SParameter::real(0.0), SParameter::real(0.3)] {
            let sym = operator_to_symbol(&op, s).unwrap();
            let trace = sym.integral() / (2.0 * PI * g.hbar());
            assert!((trace - op.trace()).norm() < 1e-8);
            let back = symbol_to_operator(&sym).unwrap();
            assert!(back.max_deviation(&op) < 1e-9);
        }
    }

    #[test]
    fn commutator_of_coordinates() {
        let g = grid();
        let q = OperatorMatrix::position(&g);
        let p = OperatorMatrix::momentum(&g);
        let c = q.matmul(&p).unwrap().sub(&p.matmul(&q).unwrap()).unwrap();
        // The discrete commutator is traceless, so it cannot equal iħ·1 on the
        // whole lattice; its symbol is linear in it all the same.
        assert!(c.trace().norm() < 1e-9);
    }
}
