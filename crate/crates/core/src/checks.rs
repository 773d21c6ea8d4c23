//! Invariant suites run by `sweyl check`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::{cross_validate, evolve_schrodinger, HamiltonianSpec};
use crate::error::Result;
use crate::grid::{fractional_shift, Grid};
use crate::moments::{
    analytic_first_moment, analytic_second_moment, conditional_moment, hj_residual,
};
use crate::star::{
    commutator_sine_kernel, commutator_symbol, moyal_bracket, star_product, windowed_coordinates,
};
use crate::states::{gaussian_state, ho_eigenstate, WkbFields};
use crate::symbol::{
    canonicity_jacobian, operator_to_symbol, projector_symbol, r_parameter, s_from_r,
    symbol_to_operator, CanonicalShift, OperatorMatrix,
};
use crate::transform::{
    marginal_momentum, marginal_position, s_wigner, s_wigner_kirkwood, s_wigner_momentum,
    PhaseSpaceFunction, SParameter, SymbolKind,
};

pub const SUITES: [&str; 7] = [
    "params",
    "grid",
    "transform",
    "symbol",
    "star",
    "dynamics",
    "moments",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Short form of `s` for table labels.
pub fn label(s: SParameter) -> String {
    let z = s.value();
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format!("{}", z.re),
        (true, false) => format!("{}i", z.im),
        _ => format!("{}{:+}i", z.re, z.im),
    }
}

struct Recorder {
    suite: &'static str,
    results: Vec<CheckResult>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            results: Vec::new(),
        }
    }

    fn below(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.results.push(CheckResult {
            suite: self.suite,
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        });
    }
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(name: &str) -> Result<Vec<CheckResult>> {
    if name == "all" {
        let mut out = Vec::new();
        for suite in SUITES {
            out.extend(run_suite(suite)?);
        }
        return Ok(out);
    }
    match name {
        "params" => params(),
        "grid" => grid_suite(),
        "transform" => transform_suite(),
        "symbol" => symbol_suite(),
        "star" => star_suite(),
        "dynamics" => dynamics_suite(),
        "moments" => moments_suite(),
        other => Err(crate::error::Error::invalid(format!(
            "unknown suite `{other}`; expected all or one of {}",
            SUITES.join(", ")
        ))),
    }
}

fn params() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("params");
    let symmetric = CanonicalShift::symmetric();
    r.below(
        "symmetric shift is canonical",
        (canonicity_jacobian(&symmetric) - 1.0).abs(),
        1e-12,
    );
    let s = s_from_r(&r_parameter(&symmetric)?);
    r.below("r = -1/2 gives s = 0", s[0].abs(), 1e-12);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let x = i as f64 * 0.37;
        let (alpha, beta, gamma) = (1.0 + x.sin(), x.cos() - 1.5, 0.5 + 0.2 * x.sin());
        let shift = CanonicalShift::scalar(alpha, beta, gamma, gamma - 1.0 / (alpha - beta));
        worst = worst.max((canonicity_jacobian(&shift) - 1.0).abs());
        let r0 = r_parameter(&shift)?;
        let back = crate::symbol::r_from_s(&s_from_r(&r0));
        worst = worst.max((back[0] - r0[0]).abs());
    }
    r.below("random canonical shifts and r <-> s", worst, 1e-12);
    Ok(r.results)
}

fn grid_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("grid");
    let g = Grid::new(128, -10.0, 10.0, 1.0)?;
    let psi = gaussian_state(&g, 0.5, 1.0, 1.0)?;
    let samples = psi.position_samples();
    let once = fractional_shift(
        &fractional_shift(&samples, 0.3.into(), g.dq())?,
        0.4.into(),
        g.dq(),
    )?;
    let direct = fractional_shift(&samples, 0.7.into(), g.dq())?;
    let dev = once
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    r.below("shift composition", dev, 1e-12);
    let phi = psi.to_momentum()?;
    r.below(
        "Parseval",
        (phi.norm_squared() - psi.norm_squared()).abs(),
        1e-12,
    );
    let back = phi.to_position()?;
    let dev = back
        .samples
        .iter()
        .zip(&psi.samples)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    r.below("position/momentum round trip", dev, 1e-12);
    Ok(r.results)
}

fn transform_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("transform");
    let g = Grid::new(256, -12.0, 12.0, 1.0)?;
    let ground = gaussian_state(&g, 0.0, 0.0, 1.0)?;
    let w = s_wigner(&ground, SParameter::real(0.0))?;
    let exact = PhaseSpaceFunction::from_fn(
        &g,
        SParameter::real(0.0),
        SymbolKind::StateSymbol,
        |q, p| ((-q * q - p * p).exp() / PI).into(),
    );
    r.below("ground Wigner closed form", w.max_deviation(&exact), 1e-9);
    let ho = ho_eigenstate(&g, 3)?;
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::real(-0.3),
        SParameter::real(0.5),
        SParameter::imag(0.4),
    ] {
        let a = s_wigner(&ho, s)?;
        let density = ho.density();
        let mq = marginal_position(&a)?;
        let dev = mq
            .values
            .iter()
            .zip(&density)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r.below(
            format!("ho3 position marginal, s={}", label(s)),
            dev.max(mq.max_imaginary()),
            1e-8,
        );
        let phi = ho.to_momentum()?.density();
        let mp = marginal_momentum(&a)?;
        let dev = mp
            .values
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r.below(
            format!("ho3 momentum marginal, s={}", label(s)),
            dev.max(mp.max_imaginary()),
            1e-8,
        );
    }
    for s in [SParameter::imag(0.4), SParameter::imag(0.8)] {
        r.below(
            format!("realness, s={}", label(s)),
            s_wigner(&ground, s)?.max_imag(),
            1e-10,
        );
    }
    let s = SParameter::new(Complex64::new(0.3, 0.2))?;
    let lhs = s_wigner(&ground, s)?.conj();
    let rhs = s_wigner(&ground, s.reflected())?;
    r.below("conjugation, s=0.3+0.2i", lhs.max_deviation(&rhs), 1e-10);
    for s in [SParameter::real(0.0), SParameter::real(0.5)] {
        let a = s_wigner(&ho, s)?;
        let b = s_wigner_momentum(&ho.to_momentum()?, s)?;
        let c = s_wigner_kirkwood(&ho, s)?;
        let dev = a
            .max_deviation(&b)
            .max(a.max_deviation(&c))
            .max(b.max_deviation(&c));
        r.below(format!("three routes, ho3, s={}", label(s)), dev, 1e-9);
    }
    Ok(r.results)
}

fn symbol_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("symbol");
    let g = Grid::new(64, -10.0, 10.0, 1.0)?;
    let a = gaussian_state(&g, 0.5, 0.7, 1.0)?;
    let b = gaussian_state(&g, -1.0, -0.4, 0.8)?;
    let mut op = OperatorMatrix::outer(&a, &b);
    op = op.add(&op.adjoint())?;
    for s in [SParameter::real(0.0), SParameter::real(0.3)] {
        let sym = operator_to_symbol(&op, s)?;
        r.below(
            format!("round trip, s={}", label(s)),
            symbol_to_operator(&sym)?.max_deviation(&op),
            1e-9,
        );
        let trace = sym.integral() / (2.0 * PI * g.hbar());
        r.below(
            format!("trace identity, s={}", label(s)),
            (trace - op.trace()).norm(),
            1e-8,
        );
        let proj = projector_symbol(&a, s)?;
        r.below(
            format!("projector symbol, s={}", label(s)),
            proj.max_deviation(&s_wigner(&a, s)?),
            1e-9,
        );
    }
    let one = operator_to_symbol(&OperatorMatrix::identity(&g), SParameter::real(0.5))?;
    r.below(
        "identity symbol",
        one.samples
            .iter()
            .map(|z| (z - 1.0).norm())
            .fold(0.0, f64::max),
        1e-10,
    );
    Ok(r.results)
}

fn bump(g: &Grid, s: SParameter, q0: f64, p0: f64, c: Complex64) -> PhaseSpaceFunction {
    PhaseSpaceFunction::from_fn(g, s, SymbolKind::OperatorSymbol, |q, p| {
        c * (-((q - q0).powi(2) + (p - p0).powi(2)) / 3.0).exp()
            * Complex64::from_polar(1.0, 0.3 * q - 0.2 * p)
    })
}

fn star_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("star");
    let g = Grid::new(64, -10.0, 10.0, 1.0)?;
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::imag(0.4),
    ] {
        let a = bump(&g, s, 0.5, -0.3, Complex64::new(1.0, 0.5));
        let b = bump(&g, s, -0.4, 0.6, Complex64::new(0.2, -1.0));
        let c = bump(&g, s, 1.0, 1.0, Complex64::new(-0.7, 0.3));
        let left = star_product(&star_product(&a, &b)?, &c)?;
        let right = star_product(&a, &star_product(&b, &c)?)?;
        r.below(
            format!("associativity, s={}", label(s)),
            left.max_deviation(&right),
            1e-8,
        );
        r.below(
            format!("self commutator, s={}", label(s)),
            commutator_symbol(&a, &a)?.max_abs(),
            1e-12,
        );
    }
    // Leaving the symbol space at imaginary s amplifies round-off in mode
    // (u, m) by up to e^{π|Im s|·|um|/N} in each direction, so the operator
    // route is checked at 0.4i on a coarser lattice.
    let coarse = Grid::new(32, -8.0, 8.0, 1.0)?;
    for (grid, s) in [
        (&g, SParameter::real(0.0)),
        (&g, SParameter::real(0.3)),
        (&g, SParameter::imag(0.2)),
        (&coarse, SParameter::imag(0.4)),
    ] {
        let a = bump(grid, s, 0.5, -0.3, Complex64::new(1.0, 0.5));
        let b = bump(grid, s, -0.4, 0.6, Complex64::new(0.2, -1.0));
        let product = symbol_to_operator(&a)?.matmul(&symbol_to_operator(&b)?)?;
        let expected = operator_to_symbol(&product, s)?;
        let name = format!("operator route, N={}, s={}", grid.n(), label(s));
        r.below(name, star_product(&a, &b)?.max_deviation(&expected), 1e-8);
    }
    let balanced = Grid::new(
        64,
        -(2.0 * PI * 64.0).sqrt() / 2.0,
        (2.0 * PI * 64.0).sqrt() / 2.0,
        1.0,
    )?;
    let s = SParameter::real(0.3);
    let a = bump(&balanced, s, 0.5, -0.3, Complex64::new(1.0, 0.5));
    let b = bump(&balanced, s, -0.4, 0.6, Complex64::new(0.2, -1.0));
    let dev = commutator_symbol(&a, &b)?.max_deviation(&commutator_sine_kernel(&a, &b)?);
    r.below("sine kernel vs star difference, s=0.3", dev, 1e-10);
    let half = (2.0 * PI * 128.0).sqrt() / 2.0;
    let wide = Grid::new(128, -half, half, 1.0)?;
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.5),
        SParameter::imag(0.4),
    ] {
        let (q, p) = windowed_coordinates(&wide, s, 1.0);
        let c = commutator_symbol(&q, &p)?;
        let mut worst: f64 = 0.0;
        for j in 0..wide.n() {
            for k in 0..wide.n() {
                if wide.q(j).abs() <= 1.0 && wide.p(k).abs() <= 1.0 {
                    worst = worst.max((c.at(j, k) - Complex64::new(0.0, wide.hbar())).norm());
                }
            }
        }
        r.below(format!("[q, p] = i hbar, s={}", label(s)), worst, 1e-9);
    }
    let h = PhaseSpaceFunction::from_fn(&g, s, SymbolKind::OperatorSymbol, |q, p| {
        (0.5 * (p * p + q * q)).into()
    });
    r.below("bracket(H, H)", moyal_bracket(&h, &h)?.max_abs(), 1e-12);
    Ok(r.results)
}

fn dynamics_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("dynamics");
    let half = (2.0 * PI * 64.0).sqrt() / 2.0;
    let g = Grid::new(64, -half, half, 1.0)?;
    let psi = gaussian_state(&g, 1.0, 0.0, 1.0)?;
    let harmonic = HamiltonianSpec::harmonic(1.0, 1.0)?;
    let report = cross_validate(&psi, &harmonic, SParameter::real(0.0), PI / 8.0, 1e-3)?;
    r.below(
        "cross validation, harmonic, s=0",
        report.max_deviation,
        report.tolerance,
    );
    let boosted = gaussian_state(&g, 0.0, 0.5, 1.0)?;
    let free = HamiltonianSpec::free(1.0)?;
    let report = cross_validate(&boosted, &free, SParameter::real(0.3), 0.25, 1e-3)?;
    r.below(
        "cross validation, free, s=0.3",
        report.max_deviation,
        report.tolerance,
    );
    let run = evolve_schrodinger(&psi, &harmonic, 1e-3, 1000, 1000)?;
    r.below("Schrodinger norm drift", run.mass_drift(), 1e-10);
    Ok(r.results)
}

fn moments_suite() -> Result<Vec<CheckResult>> {
    let mut r = Recorder::new("moments");
    let g = Grid::new(256, -12.0, 12.0, 1.0)?;
    let psi = gaussian_state(&g, 0.0, 0.0, 1.0)?;
    let inner: Vec<bool> = g.q_values().iter().map(|q| q.abs() <= 3.0).collect();
    for s in [0.0, 0.3, -0.3, 0.5] {
        let sp = SParameter::real(s);
        let w = s_wigner(&psi, sp)?;
        let grid_first = conditional_moment(&w, 1)?;
        let grid_second = conditional_moment(&w, 2)?;
        let first = analytic_first_moment(&psi, sp);
        let second = analytic_second_moment(&psi, sp);
        r.below(
            format!("first moment routes, s={}", label(sp)),
            first.max_deviation_where(&grid_first, &inner),
            1e-7,
        );
        r.below(
            format!("second moment routes, s={}", label(sp)),
            second.max_deviation_where(&grid_second, &inner),
            1e-7,
        );
    }
    let free = WkbFields::free_particle(0.0, 1.0, 1.5, 1.0, 0.3)?;
    let worst = hj_residual(&g, &free)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    r.below("Hamilton-Jacobi residual of a free solution", worst, 1e-10);
    Ok(r.results)
}
