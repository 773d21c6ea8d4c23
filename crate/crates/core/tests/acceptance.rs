//! Acceptance criteria 1 to 10, one PASS/FAIL line each. Runs without the
//! libtest harness so the lines always reach the output.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweyl::dynamics::{cross_validate, HamiltonianSpec};
use sweyl::moments::{
    analytic_first_moment, analytic_second_moment, classical_limit_scan, conditional_moment,
    fit_quadratic, MomentProfile,
};
use sweyl::star::{commutator_symbol, star_product, windowed_coordinates};
use sweyl::states::{gaussian_state, ho_eigenstate, WkbFields};
use sweyl::symbol::{
    canonicity_jacobian, operator_to_symbol, projector_symbol, r_from_s, r_parameter, s_from_r,
    symbol_to_operator, CanonicalShift, OperatorMatrix,
};
use sweyl::transform::{
    marginal_momentum, marginal_position, s_wigner, s_wigner_kirkwood, s_wigner_momentum,
    PhaseSpaceFunction, SParameter, SymbolKind,
};
use sweyl::Grid;

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    start: Instant,
    failures: Vec<String>,
    worst: Vec<(String, f64, f64)>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, budget_secs: u64) -> Self {
        Self {
            id,
            title,
            budget: Duration::from_secs(budget_secs),
            start: Instant::now(),
            failures: Vec::new(),
            worst: Vec::new(),
        }
    }

    fn below(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let name = name.into();
        if !(value.is_finite() && value < tolerance) {
            self.failures
                .push(format!("{name}: {value:.3e} >= {tolerance:.0e}"));
        }
        self.worst.push((name, value, tolerance));
    }

    fn finish(self) -> bool {
        let elapsed = self.start.elapsed();
        let ratio = self
            .worst
            .iter()
            .map(|(_, v, t)| v / t)
            .fold(
                0.0,
                |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) },
            );
        let mut failures = self.failures;
        if elapsed > self.budget {
            failures.push(format!(
                "runtime {:.1}s over {}s",
                elapsed.as_secs_f64(),
                self.budget.as_secs()
            ));
        }
        let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {}: {} ({} checks, worst value/tolerance {ratio:.2e}, {:.2}s)",
            self.id,
            self.title,
            self.worst.len(),
            elapsed.as_secs_f64()
        );
        for f in &failures {
            println!("    {f}");
        }
        failures.is_empty()
    }
}

fn label(s: SParameter) -> String {
    sweyl::checks::label(s)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn balanced(n: usize) -> Grid {
    let half = (2.0 * PI * n as f64).sqrt() / 2.0;
    Grid::new(n, -half, half, 1.0).unwrap()
}

fn criterion_01_marginals() -> bool {
    let mut c = Criterion::new(1, "marginal invariance", 10);
    let g = Grid::new(256, -12.0, 12.0, 1.0).unwrap();
    let states = [
        ("ground", gaussian_state(&g, 0.0, 0.0, 1.0).unwrap()),
        ("boosted", gaussian_state(&g, 0.7, 1.5, 1.0).unwrap()),
        ("ho3", ho_eigenstate(&g, 3).unwrap()),
    ];
    let s_values = [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::real(-0.3),
        SParameter::real(0.5),
        SParameter::imag(0.4),
    ];
    for (name, psi) in &states {
        let position = psi.density();
        let momentum = psi.to_momentum().unwrap().density();
        for s in s_values {
            let a = s_wigner(psi, s).unwrap();
            let mq = marginal_position(&a).unwrap();
            let mp = marginal_momentum(&a).unwrap();
            let dq = max_abs_diff(&mq.values, &position).max(mq.max_imaginary());
            let dp = max_abs_diff(&mp.values, &momentum).max(mp.max_imaginary());
            c.below(format!("{name} position marginal s={}", label(s)), dq, 1e-8);
            c.below(format!("{name} momentum marginal s={}", label(s)), dp, 1e-8);
        }
    }
    c.finish()
}

fn criterion_02_wigner_reduction() -> bool {
    let mut c = Criterion::new(2, "ground-state Wigner function", 1);
    let g = Grid::new(256, -12.0, 12.0, 1.0).unwrap();
    let psi = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap();
    let w = s_wigner(&psi, SParameter::real(0.0)).unwrap();
    let mut worst: f64 = 0.0;
    for j in 0..g.n() {
        for k in 0..g.n() {
            let (q, p) = (g.q(j), g.p(k));
            let exact = (-q * q - p * p).exp() / PI;
            worst = worst.max((w.at(j, k) - exact).norm());
        }
    }
    c.below("max |A - exp(-q²-p²)/π|", worst, 1e-9);
    c.finish()
}

fn criterion_03_reality_and_conjugation() -> bool {
    let mut c = Criterion::new(3, "reality and conjugation", 5);
    let g = Grid::new(256, -12.0, 12.0, 1.0).unwrap();
    let states = [
        ("ground", gaussian_state(&g, 0.0, 0.0, 1.0).unwrap()),
        ("boosted", gaussian_state(&g, 0.7, 1.5, 1.0).unwrap()),
        ("ho3", ho_eigenstate(&g, 3).unwrap()),
    ];
    for (name, psi) in &states {
        let imaginary: &[f64] = if *name == "ho3" {
            &[0.4, 0.6]
        } else {
            &[0.4, 0.8]
        };
        for &s in imaginary {
            let s = SParameter::imag(s);
            c.below(
                format!("{name} Im A, s={}", label(s)),
                s_wigner(psi, s).unwrap().max_imag(),
                1e-10,
            );
        }
        for s in [
            SParameter::real(0.3),
            SParameter::new(Complex64::new(0.3, 0.2)).unwrap(),
        ] {
            let lhs = s_wigner(psi, s).unwrap().conj();
            let rhs = s_wigner(psi, s.reflected()).unwrap();
            c.below(
                format!("{name} conjugation, s={}", label(s)),
                lhs.max_deviation(&rhs),
                1e-10,
            );
        }
    }
    // Lags near L/2 continue the state to Im q = ±|Im s|·L/4, beyond what the
    // sampled spectrum resolves for n = 3 on the 24-wide box.
    let narrow = Grid::new(256, -10.0, 10.0, 1.0).unwrap();
    let ho3 = ho_eigenstate(&narrow, 3).unwrap();
    let s = SParameter::imag(0.8);
    c.below(
        "ho3 Im A, s=0.8i, L=20",
        s_wigner(&ho3, s).unwrap().max_imag(),
        1e-10,
    );
    // The reflection is -conj(s), checked on its own.
    let r = SParameter::new(Complex64::new(0.3, 0.2))
        .unwrap()
        .reflected()
        .value();
    c.below(
        "reflection of 0.3+0.2i",
        (r - Complex64::new(-0.3, 0.2)).norm(),
        1e-15,
    );
    c.finish()
}

fn criterion_04_three_routes() -> bool {
    let mut c = Criterion::new(4, "position, momentum and product-form routes", 30);
    let g = Grid::new(256, -12.0, 12.0, 1.0).unwrap();
    let states = [
        ("ground", gaussian_state(&g, 0.0, 0.0, 1.0).unwrap()),
        ("boosted", gaussian_state(&g, -0.5, 1.0, 0.8).unwrap()),
        ("ho3", ho_eigenstate(&g, 3).unwrap()),
    ];
    for (name, psi) in &states {
        let phi = psi.to_momentum().unwrap();
        for s in [0.0, 0.3, -0.3, 0.5].map(SParameter::real) {
            let a = s_wigner(psi, s).unwrap();
            let b = s_wigner_momentum(&phi, s).unwrap();
            let k = s_wigner_kirkwood(psi, s).unwrap();
            let dev = a
                .max_deviation(&b)
                .max(a.max_deviation(&k))
                .max(b.max_deviation(&k));
            c.below(format!("{name} s={}", label(s)), dev, 1e-9);
        }
    }
    c.finish()
}

fn random_hermitian(g: &Grid, rng: &mut ChaCha8Rng) -> OperatorMatrix {
    let mut op = OperatorMatrix::zeros(g);
    for _ in 0..4 {
        let a = gaussian_state(
            g,
            rng.gen_range(-2.5..2.5),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.8..1.4),
        )
        .unwrap();
        let b = gaussian_state(
            g,
            rng.gen_range(-2.5..2.5),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.8..1.4),
        )
        .unwrap();
        let weight = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        op = op
            .add(&OperatorMatrix::outer(&a, &b).scale(weight))
            .unwrap();
    }
    op.add(&op.adjoint()).unwrap()
}

fn criterion_05_symbol_calculus() -> bool {
    let mut c = Criterion::new(5, "operator/symbol transforms", 30);
    let g = Grid::new(64, -10.0, 10.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..5 {
        let op = random_hermitian(&g, &mut rng);
        assert!(op.hermiticity_defect() < 1e-14);
        for s in [SParameter::real(0.0), SParameter::real(0.3)] {
            let sym = operator_to_symbol(&op, s).unwrap();
            let back = symbol_to_operator(&sym).unwrap();
            c.below(
                format!("round trip #{trial} s={}", label(s)),
                back.max_deviation(&op),
                1e-9,
            );
            let trace = sym.integral() / (2.0 * PI * g.hbar());
            c.below(
                format!("trace #{trial} s={}", label(s)),
                (trace - op.trace()).norm(),
                1e-8,
            );
        }
    }
    let psi = gaussian_state(&g, 0.4, -0.6, 1.1).unwrap();
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::real(-0.3),
    ] {
        let proj = projector_symbol(&psi, s).unwrap();
        c.below(
            format!("projector s={}", label(s)),
            proj.max_deviation(&s_wigner(&psi, s).unwrap()),
            1e-9,
        );
    }
    c.finish()
}

fn bump(g: &Grid, s: SParameter, q0: f64, p0: f64, amp: Complex64) -> PhaseSpaceFunction {
    PhaseSpaceFunction::from_fn(g, s, SymbolKind::OperatorSymbol, |q, p| {
        amp * (-((q - q0).powi(2) + (p - p0).powi(2)) / 3.0).exp()
            * Complex64::from_polar(1.0, 0.3 * q - 0.2 * p)
    })
}

fn criterion_06_star_product() -> bool {
    let mut c = Criterion::new(6, "star product and commutator", 60);
    let g = Grid::new(64, -10.0, 10.0, 1.0).unwrap();
    let coarse = Grid::new(32, -8.0, 8.0, 1.0).unwrap();
    // At imaginary s the transform to operators scales Fourier mode (u, m)
    // by e^{±π Im(s) um/N}; 0.4i is compared on the 32-point lattice.
    let cases = [
        (&g, SParameter::real(0.0)),
        (&g, SParameter::real(0.3)),
        (&g, SParameter::real(-0.5)),
        (&g, SParameter::imag(0.2)),
        (&g, SParameter::new(Complex64::new(0.3, 0.1)).unwrap()),
        (&coarse, SParameter::imag(0.4)),
    ];
    for (grid, s) in cases {
        let a = bump(grid, s, 0.5, -0.3, Complex64::new(1.0, 0.5));
        let b = bump(grid, s, -0.4, 0.6, Complex64::new(0.2, -1.0));
        let product = symbol_to_operator(&a)
            .unwrap()
            .matmul(&symbol_to_operator(&b).unwrap())
            .unwrap();
        let expected = operator_to_symbol(&product, s).unwrap();
        let got = star_product(&a, &b).unwrap();
        c.below(
            format!("operator route N={} s={}", grid.n(), label(s)),
            got.max_deviation(&expected),
            1e-8,
        );
    }
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::imag(0.4),
    ] {
        let a = bump(&g, s, 0.5, -0.3, Complex64::new(1.0, 0.5));
        let b = bump(&g, s, -0.4, 0.6, Complex64::new(0.2, -1.0));
        let d = bump(&g, s, 1.0, 1.0, Complex64::new(-0.7, 0.3));
        let left = star_product(&star_product(&a, &b).unwrap(), &d).unwrap();
        let right = star_product(&a, &star_product(&b, &d).unwrap()).unwrap();
        c.below(
            format!("associativity s={}", label(s)),
            left.max_deviation(&right),
            1e-8,
        );
    }
    let wide = balanced(128);
    for s in [
        SParameter::real(0.0),
        SParameter::real(0.3),
        SParameter::real(-0.5),
        SParameter::real(0.5),
        SParameter::imag(0.4),
        SParameter::new(Complex64::new(0.3, 0.2)).unwrap(),
    ] {
        let (q, p) = windowed_coordinates(&wide, s, 1.0);
        let comm = commutator_symbol(&q, &p).unwrap();
        let mut worst: f64 = 0.0;
        for j in 0..wide.n() {
            for k in 0..wide.n() {
                if wide.q(j).abs() <= 1.0 && wide.p(k).abs() <= 1.0 {
                    worst = worst.max((comm.at(j, k) - Complex64::new(0.0, wide.hbar())).norm());
                }
            }
        }
        c.below(format!("[q, p] = iħ s={}", label(s)), worst, 1e-9);
    }
    c.finish()
}

fn criterion_07_dynamics() -> bool {
    let mut c = Criterion::new(7, "phase-space vs Schrodinger dynamics", 120);
    let g = balanced(128);
    let psi = gaussian_state(&g, 1.0, 0.0, 1.0).unwrap();
    let harmonic = HamiltonianSpec::harmonic(1.0, 1.0).unwrap();
    let report = cross_validate(&psi, &harmonic, SParameter::real(0.0), PI / 4.0, 1e-3).unwrap();
    assert!(report.tolerance <= 1e-5);
    c.below("harmonic s=0 t=π/4", report.max_deviation, 1e-5);
    assert_eq!(report.passed, report.max_deviation < report.tolerance);
    let boosted = gaussian_state(&g, -1.0, 1.0, 1.0).unwrap();
    let free = HamiltonianSpec::free(1.0).unwrap();
    let report = cross_validate(&boosted, &free, SParameter::real(0.3), 0.5, 1e-3).unwrap();
    c.below("free s=0.3 t=0.5", report.max_deviation, 1e-5);
    c.finish()
}

fn restrict(profile: &MomentProfile, mask: &[bool]) -> MomentProfile {
    MomentProfile {
        values: profile
            .values
            .iter()
            .zip(mask)
            .map(|(v, &m)| if m { *v } else { None })
            .collect(),
        ..profile.clone()
    }
}

fn mask(g: &Grid, radius: f64) -> Vec<bool> {
    g.q_values().iter().map(|q| q.abs() <= radius).collect()
}

fn criterion_08_moments() -> bool {
    let mut c = Criterion::new(8, "conditional moments", 20);
    let g = Grid::new(256, -12.0, 12.0, 1.0).unwrap();
    let ground = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap();
    let boosted = gaussian_state(&g, 0.0, 1.2, 1.0).unwrap();
    let inner = mask(&g, 3.0);
    for (name, psi) in [("ground", &ground), ("boosted", &boosted)] {
        for s in [0.0, 0.3, -0.3, 0.5].map(SParameter::real) {
            let w = s_wigner(psi, s).unwrap();
            let g1 = conditional_moment(&w, 1).unwrap();
            let g2 = conditional_moment(&w, 2).unwrap();
            let a1 = analytic_first_moment(psi, s);
            let a2 = analytic_second_moment(psi, s);
            c.below(
                format!("{name} first routes s={}", label(s)),
                a1.max_deviation_where(&g1, &inner),
                1e-7,
            );
            c.below(
                format!("{name} second routes s={}", label(s)),
                a2.max_deviation_where(&g2, &inner),
                1e-7,
            );
        }
    }
    for s in [0.0, 0.3, -0.3, 0.5] {
        let sp = SParameter::real(s);
        let w = s_wigner(&ground, sp).unwrap();
        let first = |q: f64| Complex64::new(0.0, s * q);
        let second = |q: f64| Complex64::from((1.0 + s * s) / 2.0 - s * s * q * q);
        let g1 = restrict(&conditional_moment(&w, 1).unwrap(), &inner);
        let g2 = restrict(&conditional_moment(&w, 2).unwrap(), &inner);
        c.below(
            format!("grid <p> = isq, s={s}"),
            g1.max_deviation_from(first),
            1e-8,
        );
        c.below(
            format!("grid <p²> closed form, s={s}"),
            g2.max_deviation_from(second),
            1e-8,
        );
        let a1 = restrict(&analytic_first_moment(&ground, sp), &inner);
        let a2 = restrict(&analytic_second_moment(&ground, sp), &inner);
        c.below(
            format!("analytic <p> = isq, s={s}"),
            a1.max_deviation_from(first),
            1e-8,
        );
        c.below(
            format!("analytic <p²> closed form, s={s}"),
            a2.max_deviation_from(second),
            1e-8,
        );
    }
    // s² coefficient of ⟨p²⟩ for the ground state of ω = m = 1 at general ħ.
    let s_samples = [-0.5, 0.0, 0.5, 0.8];
    let s_values: Vec<Complex64> = s_samples.iter().map(|&s| s.into()).collect();
    for hbar in [1.0, 0.5] {
        let gh = g.with_hbar(hbar).unwrap();
        let psi = gaussian_state(&gh, 0.0, 0.0, hbar.sqrt()).unwrap();
        let region = mask(&gh, 3.0 * hbar.sqrt());
        let profiles: Vec<(MomentProfile, MomentProfile)> = s_samples
            .iter()
            .map(|&s| {
                let sp = SParameter::real(s);
                let grid_route = conditional_moment(&s_wigner(&psi, sp).unwrap(), 2).unwrap();
                (grid_route, analytic_second_moment(&psi, sp))
            })
            .collect();
        let mut worst_grid: f64 = 0.0;
        let mut worst_analytic: f64 = 0.0;
        for (i, q) in gh.q_values().into_iter().enumerate() {
            if !region[i] {
                continue;
            }
            let expected = hbar / 2.0 - q * q;
            let grid_values: Vec<Complex64> =
                profiles.iter().map(|p| p.0.values[i].unwrap()).collect();
            let analytic_values: Vec<Complex64> =
                profiles.iter().map(|p| p.1.values[i].unwrap()).collect();
            let fg = fit_quadratic(&s_values, &grid_values).unwrap();
            let fa = fit_quadratic(&s_values, &analytic_values).unwrap();
            worst_grid = worst_grid.max((fg[2] - expected).norm());
            worst_analytic = worst_analytic.max((fa[2] - expected).norm());
        }
        c.below(format!("grid s² coefficient, ħ={hbar}"), worst_grid, 1e-8);
        c.below(
            format!("analytic s² coefficient, ħ={hbar}"),
            worst_analytic,
            1e-8,
        );
    }
    c.finish()
}

fn criterion_09_classical_limit() -> bool {
    let mut c = Criterion::new(9, "classical limit of the s-dependence", 120);
    let s = [
        SParameter::real(-0.5),
        SParameter::real(0.0),
        SParameter::real(0.5),
    ];
    let g = Grid::new(1024, -8.0, 8.0, 1.0).unwrap();
    let p0 = 1.0;
    let free = WkbFields::free_particle(0.0, 1.0, p0, 1.0, 0.0).unwrap();
    let report = classical_limit_scan(&g, &free, &s, &[0.4, 0.2, 0.1]).unwrap();
    for (i, ratio) in report.second_s2_ratios.iter().enumerate() {
        c.below(
            format!("free s² ratio #{i} vs 4"),
            (ratio - 4.0).abs() / 4.0,
            0.10,
        );
    }
    let last = report.tables.last().unwrap();
    assert!(!last.q_values.is_empty());
    let worst = last
        .second_s0
        .iter()
        .zip(&last.q_values)
        .map(|(c0, q)| {
            let grad = free.action_gradient(*q);
            (c0 - grad * grad).norm() / (grad * grad)
        })
        .fold(0.0, f64::max);
    c.below("free s⁰ vs (∇S)² at ħ=0.1", worst, 0.02);
    let quad = WkbFields::static_quadratic_action(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
    let fine = Grid::new(4096, -8.0, 8.0, 1.0).unwrap();
    let report = classical_limit_scan(&fine, &quad, &s, &[0.1]).unwrap();
    let t = &report.tables[0];
    assert!(!t.q_values.is_empty());
    let mut worst: f64 = 0.0;
    for (c2, q) in t.second_s2.iter().zip(&t.q_values) {
        let target = -2.0 * q * q;
        // Relative to the scale of -m R(q) over the scanned region.
        let scale = t.q_values.iter().map(|x| 2.0 * x * x).fold(0.0, f64::max);
        worst = worst.max((c2 - target).norm() / (target.abs().max(1e-3 * scale)));
    }
    c.below("S=q² s² coefficient vs -2q² at ħ=0.1", worst, 0.05);
    c.finish()
}

fn criterion_10_parameter_algebra() -> bool {
    let mut c = Criterion::new(10, "canonical shifts and r <-> s", 1);
    let symmetric = CanonicalShift::symmetric();
    c.below(
        "symmetric shift Jacobian",
        (canonicity_jacobian(&symmetric) - 1.0).abs(),
        1e-12,
    );
    let r = r_parameter(&symmetric).unwrap();
    c.below("symmetric r = -1/2", (r[0] + 0.5).abs(), 1e-12);
    c.below("r = -1/2 gives s = 0", s_from_r(&r)[0].abs(), 1e-12);
    c.below(
        "s = 0 gives r = -1/2",
        (r_from_s(&[0.0])[0] + 0.5).abs(),
        1e-12,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut jac: f64 = 0.0;
    let mut map: f64 = 0.0;
    let mut sign: f64 = 0.0;
    for _ in 0..1000 {
        let alpha: f64 = rng.gen_range(-3.0..3.0);
        let mut beta: f64 = rng.gen_range(-3.0..3.0);
        if (alpha - beta).abs() < 0.1 {
            beta += 0.5;
        }
        let gamma = rng.gen_range(-3.0..3.0);
        let delta = gamma - 1.0 / (alpha - beta);
        let shift = CanonicalShift::scalar(alpha, beta, gamma, delta);
        jac = jac.max((canonicity_jacobian(&shift) - 1.0).abs());
        let r = r_parameter(&shift).unwrap();
        let s = s_from_r(&r);
        map = map.max((r_from_s(&s)[0] - r[0]).abs());
        // r = -(1+s)/2
        sign = sign.max((r[0] + (1.0 + s[0]) / 2.0).abs());
    }
    c.below("random canonical shifts, Jacobian", jac, 1e-12);
    c.below("random canonical shifts, r -> s -> r", map, 1e-12);
    c.below("r = -(1+s)/2", sign, 1e-12);
    let bad = CanonicalShift::scalar(1.0, 0.0, 0.0, 0.0);
    assert!(!sweyl::symbol::is_canonical(&bad));
    c.finish()
}

fn main() {
    let criteria: [(u32, fn() -> bool); 10] = [
        (1, criterion_01_marginals),
        (2, criterion_02_wigner_reduction),
        (3, criterion_03_reality_and_conjugation),
        (4, criterion_04_three_routes),
        (5, criterion_05_symbol_calculus),
        (6, criterion_06_star_product),
        (7, criterion_07_dynamics),
        (8, criterion_08_moments),
        (9, criterion_09_classical_limit),
        (10, criterion_10_parameter_algebra),
    ];
    let mut failed = Vec::new();
    for (id, run) in criteria {
        match std::panic::catch_unwind(run) {
            Ok(true) => {}
            Ok(false) => failed.push(id),
            Err(_) => {
                println!("FAIL criterion {id}: aborted");
                failed.push(id);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed.len(),
        criteria.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
