//! Star product, commutator symbol and Moyal bracket.
//!
//! A symbol is expanded in lattice Fourier modes `ω^{uj + vk}` (`ω = e^{2πi/N}`,
//! `j` the q index, `k` the p index). Writing `m = −v` (centered), the product
//! of two modes is the mode `(u1+u2, m1+m2)` times
//!
//! `φ = exp(2πi/N · [u1·m2 + a·(u1·m1 + u2·m2 − U·M)])`,
//!
//! where `U`, `M` are the centered wrapped sums and `a = (1−s)/2`. This is the
//! exact image of matrix multiplication under the operator ↔ symbol map, so the
//! star product is associative on the lattice. For modes that do not wrap it
//! reduces to `exp(iħ[aη1ξ2 − bξ1η2])`, the continuum s-ordered product.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    fft2_in_place, signed_index, wrap_centered, FftPair, Grid, COMPLEX_SHIFT_PRUNE,
    DEFAULT_RAMP_GUARD,
};
use crate::transform::{PhaseSpaceFunction, SParameter, SymbolKind};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// How the twisted convolution is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarMethod {
    /// FFT-factored evaluation in `O(N³)`; used for real `s`.
    Factored,
    /// Explicit sum over pairs of retained modes; used for complex `s`.
    Direct,
}

impl StarMethod {
    pub fn default_for(s: SParameter) -> Self {
        if s.is_real() {
            StarMethod::Factored
        } else {
            StarMethod::Direct
        }
    }
}

/// Normalized 2-D mode coefficients `c[u·N + v]` of a symbol.
fn mode_coefficients(symbol: &PhaseSpaceFunction) -> Vec<Complex64> {
    let n = symbol.n();
    let mut data = symbol.samples.clone();
    fft2_in_place(&mut data, n, false);
    let scale = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    data
}

fn coefficients_to_samples(mut coefficients: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    fft2_in_place(&mut coefficients, n, true);
    coefficients
}

fn pre_phase(a: Complex64, u: i64, m: i64, n: usize) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI * (u * m) as f64 / n as f64) * a).exp()
}

/// A symbol prepared for repeated factored products: for every `u`, the
/// `m`-row of coefficients times `e^{2πi a u m/N}`, inverse transformed over `m`.
#[derive(Clone)]
pub struct FactoredSymbol {
    grid: Grid,
    s: SParameter,
    rows: Vec<Complex64>,
}

impl FactoredSymbol {
    pub fn new(symbol: &PhaseSpaceFunction) -> Self {
        let n = symbol.n();
        let a = symbol.s.left_weight();
        let coefficients = mode_coefficients(symbol);
        let fft = FftPair::new(n);
        let mut rows = vec![ZERO; n * n];
        for u in 0..n {
            let su = signed_index(u, n);
            let row = &mut rows[u * n..(u + 1) * n];
            for (mbin, slot) in row.iter_mut().enumerate() {
                let v = (n - mbin) % n;
                let sm = signed_index(mbin, n);
                *slot = coefficients[u * n + v] * pre_phase(a, su, sm, n);
            }
            fft.inverse.process(row);
        }
        Self {
            grid: symbol.grid,
            s: symbol.s,
            rows,
        }
    }

    fn finish(&self, mut products: Vec<Complex64>) -> Vec<Complex64> {
        let n = self.grid.n();
        let a = self.s.left_weight();
        let fft = FftPair::new(n);
        let mut coefficients = vec![ZERO; n * n];
        for u in 0..n {
            let su = signed_index(u, n);
            let row = &mut products[u * n..(u + 1) * n];
            fft.forward.process(row);
            for (mbin, value) in row.iter().enumerate() {
                let sm = signed_index(mbin, n);
                let v = (n - mbin) % n;
                coefficients[u * n + v] = value / n as f64 * pre_phase(-a, su, sm, n);
            }
        }
        coefficients_to_samples(coefficients, n)
    }

    /// Symbol of the operator product `self · other`.
    pub fn product(&self, other: &Self) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut products = vec![ZERO; n * n];
        for target in 0..n {
            let out = &mut products[target * n..(target + 1) * n];
            for u1 in 0..n {
                let u2 = (target + n - u1) % n;
                let shift = signed_index(u1, n).rem_euclid(n as i64) as usize;
                let left = &self.rows[u1 * n..(u1 + 1) * n];
                let right = &other.rows[u2 * n..(u2 + 1) * n];
                accumulate_shifted(out, left, right, shift, 1.0);
            }
        }
        self.finish(products)
    }

    /// Symbol of `self · other − other · self`.
    pub fn commutator(&self, other: &Self) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut products = vec![ZERO; n * n];
        for target in 0..n {
            let out = &mut products[target * n..(target + 1) * n];
            for u1 in 0..n {
                let u2 = (target + n - u1) % n;
                let left = &self.rows[u1 * n..(u1 + 1) * n];
                let right = &other.rows[u2 * n..(u2 + 1) * n];
                let shift1 = signed_index(u1, n).rem_euclid(n as i64) as usize;
                let shift2 = signed_index(u2, n).rem_euclid(n as i64) as usize;
                accumulate_shifted(out, left, right, shift1, 1.0);
                accumulate_shifted(out, right, left, shift2, -1.0);
            }
        }
        self.finish(products)
    }
}

/// `out[x] += sign · fixed[x] · rotated[(x + shift) mod n]`.
#[inline]
fn accumulate_shifted(
    out: &mut [Complex64],
    fixed: &[Complex64],
    rotated: &[Complex64],
    shift: usize,
    sign: f64,
) {
    let n = out.len();
    let split = n - shift;
    let (head_out, tail_out) = out.split_at_mut(split);
    let (head_fixed, tail_fixed) = fixed.split_at(split);
    for ((o, f), r) in head_out.iter_mut().zip(head_fixed).zip(&rotated[shift..]) {
        *o += f * r * sign;
    }
    for ((o, f), r) in tail_out.iter_mut().zip(tail_fixed).zip(&rotated[..shift]) {
        *o += f * r * sign;
    }
}

struct Mode {
    u: i64,
    m: i64,
    value: Complex64,
}

fn retained_modes(symbol: &PhaseSpaceFunction, prune: f64) -> Vec<Mode> {
    let n = symbol.n();
    let coefficients = mode_coefficients(symbol);
    let peak = coefficients.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut modes = Vec::new();
    for u in 0..n {
        for v in 0..n {
            let value = coefficients[u * n + v];
            if value.norm() > prune * peak && value != ZERO {
                modes.push(Mode {
                    u: signed_index(u, n),
                    m: wrap_centered(-(signed_index(v, n)), n),
                    value,
                });
            }
        }
    }
    modes
}

/// Direct pair sum. `antisymmetric` selects the commutator kernel.
fn direct_twisted(
    left: &PhaseSpaceFunction,
    right: &PhaseSpaceFunction,
    antisymmetric: bool,
) -> Result<Vec<Complex64>> {
    let n = left.n();
    let ni = n as i64;
    let a = left.s.left_weight();
    let modes_l = retained_modes(left, COMPLEX_SHIFT_PRUNE);
    let modes_r = retained_modes(right, COMPLEX_SHIFT_PRUNE);
    // exp(2πi a t/N) for integer t in [−N², N²].
    let span = ni * ni;
    let a_table: Vec<Complex64> = (-span..=span)
        .map(|t| (Complex64::new(0.0, 2.0 * PI * t as f64 / n as f64) * a).exp())
        .collect();
    let omega: Vec<Complex64> = (0..n)
        .map(|t| Complex64::from_polar(1.0, 2.0 * PI * t as f64 / n as f64))
        .collect();
    let growth = -2.0 * PI * a.im / n as f64;
    let mut worst_exponent: f64 = 0.0;
    let mut out = vec![ZERO; n * n];
    for x in &modes_l {
        for y in &modes_r {
            let big_u = wrap_centered(x.u + y.u, n);
            let big_m = wrap_centered(x.m + y.m, n);
            let t = x.u * x.m + y.u * y.m - big_u * big_m;
            worst_exponent = worst_exponent.max((growth * t as f64).abs());
            let mut phase = omega[(x.u * y.m).rem_euclid(ni) as usize];
            if antisymmetric {
                phase -= omega[(y.u * x.m).rem_euclid(ni) as usize];
            }
            let weight = a_table[(t + span) as usize] * phase;
            let v = (-big_m).rem_euclid(ni) as usize;
            let u = big_u.rem_euclid(ni) as usize;
            out[u * n + v] += x.value * y.value * weight;
        }
    }
    if worst_exponent > DEFAULT_RAMP_GUARD {
        return Err(Error::OverflowGuard {
            exponent: worst_exponent,
            guard: DEFAULT_RAMP_GUARD,
            max_imag: 2.0 * left.s.0.im.abs() * DEFAULT_RAMP_GUARD / worst_exponent,
        });
    }
    Ok(coefficients_to_samples(out, n))
}

fn output(
    template: &PhaseSpaceFunction,
    samples: Vec<Complex64>,
    kind: SymbolKind,
) -> PhaseSpaceFunction {
    PhaseSpaceFunction {
        grid: template.grid,
        samples,
        s: template.s,
        kind,
    }
}

/// `A ⋆ B`, the symbol of the operator product.
pub fn star_product(a: &PhaseSpaceFunction, b: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
    star_product_with(a, b, StarMethod::default_for(a.s))
}

pub fn star_product_with(
    a: &PhaseSpaceFunction,
    b: &PhaseSpaceFunction,
    method: StarMethod,
) -> Result<PhaseSpaceFunction> {
    a.require_compatible(b)?;
    let samples = match method {
        StarMethod::Factored => FactoredSymbol::new(a).product(&FactoredSymbol::new(b)),
        StarMethod::Direct => direct_twisted(a, b, false)?,
    };
    Ok(output(a, samples, SymbolKind::OperatorSymbol))
}

/// `A ⋆ B − B ⋆ A`, from two star products.
pub fn commutator_symbol(
    a: &PhaseSpaceFunction,
    b: &PhaseSpaceFunction,
) -> Result<PhaseSpaceFunction> {
    let ab = star_product(a, b)?;
    let ba = star_product(b, a)?;
    Ok(ab.zip_with(&ba, |x, y| x - y))
}

/// `A ⋆ B − B ⋆ A` from the continuum sine kernel
/// `−2i e^{−iπs(X+Y)/N} sin(π(X−Y)/N)`, `X = u1·v2`, `Y = v1·u2`, summed
/// directly over mode pairs with signed indices. Agrees with
/// [`commutator_symbol`] whenever no pair's output mode wraps around.
pub fn commutator_sine_kernel(
    a: &PhaseSpaceFunction,
    b: &PhaseSpaceFunction,
) -> Result<PhaseSpaceFunction> {
    a.require_compatible(b)?;
    let n = a.n();
    let ni = n as i64;
    let s = a.s.value();
    let ca = mode_coefficients(a);
    let cb = mode_coefficients(b);
    let nonzero = |c: &[Complex64]| -> Vec<(i64, i64, Complex64)> {
        let peak = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        (0..n * n)
            .filter(|&i| c[i].norm() > COMPLEX_SHIFT_PRUNE * peak && c[i] != ZERO)
            .map(|i| (signed_index(i / n, n), signed_index(i % n, n), c[i]))
            .collect()
    };
    let modes_a = nonzero(&ca);
    let modes_b = nonzero(&cb);
    let mut out = vec![ZERO; n * n];
    for &(u1, v1, x) in &modes_a {
        for &(u2, v2, y) in &modes_b {
            let cross = (u1 * v2) as f64;
            let swapped = (v1 * u2) as f64;
            let prefactor = (Complex64::new(0.0, -PI * (cross + swapped) / n as f64) * s).exp();
            let kernel =
                Complex64::new(0.0, -2.0) * prefactor * (PI * (cross - swapped) / n as f64).sin();
            let u = (u1 + u2).rem_euclid(ni) as usize;
            let v = (v1 + v2).rem_euclid(ni) as usize;
            out[u * n + v] += x * y * kernel;
        }
    }
    Ok(output(
        a,
        coefficients_to_samples(out, n),
        SymbolKind::OperatorSymbol,
    ))
}

/// Precomputed Hamiltonian for repeated bracket evaluation.
#[derive(Clone)]
pub struct MoyalGenerator {
    hamiltonian: FactoredSymbol,
    direct: Option<PhaseSpaceFunction>,
    hbar: f64,
}

impl MoyalGenerator {
    pub fn new(h_symbol: &PhaseSpaceFunction) -> Self {
        let direct = (!h_symbol.s.is_real()).then(|| h_symbol.clone());
        Self {
            hamiltonian: FactoredSymbol::new(h_symbol),
            direct,
            hbar: h_symbol.grid.hbar(),
        }
    }

    pub fn s(&self) -> SParameter {
        self.hamiltonian.s
    }

    /// `[H, ρ]` in phase space: the exponential-times-sine kernel applied to
    /// `H_w ρ_w`, divided by `iħ`.
    pub fn bracket(&self, rho: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
        if rho.grid != self.hamiltonian.grid {
            return Err(Error::GridMismatch);
        }
        if rho.s != self.hamiltonian.s {
            return Err(Error::ParameterMismatch(format!(
                "Hamiltonian has s = {}, state has s = {}",
                self.hamiltonian.s, rho.s
            )));
        }
        let commutator = match &self.direct {
            Some(h) => direct_twisted(h, rho, true)?,
            None => self.hamiltonian.commutator(&FactoredSymbol::new(rho)),
        };
        let factor = Complex64::new(0.0, -1.0 / self.hbar);
        Ok(output(
            rho,
            commutator.into_iter().map(|z| z * factor).collect(),
            rho.kind,
        ))
    }
}

/// The s-Moyal bracket `[H, ρ]_M`.
pub fn moyal_bracket(
    h: &PhaseSpaceFunction,
    rho: &PhaseSpaceFunction,
) -> Result<PhaseSpaceFunction> {
    MoyalGenerator::new(h).bracket(rho)
}

/// `x·w(x)` with `w = ½[erf((x + edge)/σ) − erf((x − edge)/σ)]`: a linear
/// function tapered smoothly to zero before the box edge, so that it is
/// band-limited and periodic on the lattice to double precision.
pub fn windowed_linear(x: f64, edge: f64, sigma: f64) -> f64 {
    x * 0.5 * (libm::erf((x + edge) / sigma) - libm::erf((x - edge) / sigma))
}

/// Windowed `q` and `p` symbols for a grid whose box is centered on zero,
/// tapered `6σ` inside each edge.
pub fn windowed_coordinates(
    grid: &Grid,
    s: SParameter,
    sigma: f64,
) -> (PhaseSpaceFunction, PhaseSpaceFunction) {
    let q_edge = grid.length() / 2.0 - 6.0 * sigma;
    let p_edge = grid.n() as f64 * grid.dp() / 2.0 - 6.0 * sigma;
    let q = PhaseSpaceFunction::from_fn(grid, s, SymbolKind::OperatorSymbol, |q, _| {
        windowed_linear(q, q_edge, sigma).into()
    });
    let p = PhaseSpaceFunction::from_fn(grid, s, SymbolKind::OperatorSymbol, |_, p| {
        windowed_linear(p, p_edge, sigma).into()
    });
    (q, p)
}
