//! Space-conditional momentum moments and the classical-limit diagnostics.
//!
//! With `L = ln Ψ` and the library's sign of `s`,
//!
//! `⟨p⟩_w = (ħ/2i)[(L′ − L̄′) + s(L′ + L̄′)]`
//!
//! `⟨p²⟩_w = −(ħ²/4)[(1+s)²Ψ″/Ψ − 2(1−s²)L′L̄′ + (1−s)²Ψ̄″/Ψ̄]`
//!
//! both of which follow from `ρ⟨pⁿ⟩_w = (−iħ)ⁿ ∂ⁿ_τ C(q, τ)|_{τ=0}` with
//! `C(q, τ) = Ψ̄(q − aτ)Ψ(q + bτ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{spectral_derivative, Grid, WavefunctionGrid};
use crate::states::{wkb_state, WkbFields};
use crate::transform::{PhaseSpaceFunction, SParameter, SymbolKind};

/// Densities below this are treated as nodes.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-12;

/// Largest admissible edge share of a moment integral.
pub const BOUNDARY_FRACTION: f64 = 1e-6;

/// Largest admissible phase advance per lattice step for WKB states.
pub const MAX_PHASE_STEP: f64 = PI / 4.0;

/// The classical-limit scan reports points where the density exceeds this
/// fraction of its peak.
pub const SCAN_DENSITY_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentProfile {
    pub q_values: Vec<f64>,
    /// `None` where the density is below the floor.
    pub values: Vec<Option<Complex64>>,
    pub order: u32,
    pub s: SParameter,
}

impl MomentProfile {
    /// Largest deviation from `f(q)` over the defined points.
    pub fn max_deviation_from(&self, f: impl Fn(f64) -> Complex64) -> f64 {
        self.q_values
            .iter()
            .zip(&self.values)
            .filter_map(|(&q, v)| v.map(|v| (v - f(q)).norm()))
            .fold(0.0, f64::max)
    }

    /// Largest deviation between two profiles where both are defined and
    /// `mask` holds.
    pub fn max_deviation_where(&self, other: &Self, mask: &[bool]) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(mask)
            .filter_map(|((a, b), &keep)| match (a, b) {
                (Some(a), Some(b)) if keep => Some((a - b).norm()),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// `∫A pⁿ dp / ∫A dp` at every `q`.
pub fn conditional_moment(a: &PhaseSpaceFunction, order: u32) -> Result<MomentProfile> {
    conditional_moment_with_floor(a, order, DEFAULT_DENSITY_FLOOR)
}

pub fn conditional_moment_with_floor(
    a: &PhaseSpaceFunction,
    order: u32,
    floor: f64,
) -> Result<MomentProfile> {
    if a.kind != SymbolKind::StateSymbol {
        return Err(Error::invalid("conditional moments need a state symbol"));
    }
    let grid = a.grid;
    let n = grid.n();
    let dp = grid.dp();
    let powers: Vec<f64> = grid
        .p_values()
        .iter()
        .map(|p| p.powi(order as i32))
        .collect();
    let mut values = Vec::with_capacity(n);
    let mut total = 0.0;
    let mut boundary = 0.0;
    for j in 0..n {
        let row = &a.samples[j * n..(j + 1) * n];
        let density: Complex64 = row.iter().sum::<Complex64>() * dp;
        let moment: Complex64 = row
            .iter()
            .zip(&powers)
            .map(|(z, p)| z * p)
            .sum::<Complex64>()
            * dp;
        total += row
            .iter()
            .zip(&powers)
            .map(|(z, p)| (z * p).norm())
            .sum::<f64>();
        boundary += (row[0] * powers[0]).norm() + (row[n - 1] * powers[n - 1]).norm();
        values.push((density.norm() > floor).then(|| moment / density));
    }
    if total > 0.0 && boundary > BOUNDARY_FRACTION * total {
        return Err(Error::invalid(format!(
            "moment integrand does not decay in p: edge share {:.3e}",
            boundary / total
        )));
    }
    Ok(MomentProfile {
        q_values: grid.q_values(),
        values,
        order,
        s: a.s,
    })
}

/// `Ψ′/Ψ` and `Ψ″/Ψ` from spectral derivatives; `None` at nodes.
struct LogDerivatives {
    first: Vec<Option<Complex64>>,
    second: Vec<Option<Complex64>>,
}

fn log_derivatives(psi: &WavefunctionGrid, floor: f64) -> LogDerivatives {
    let samples = psi.position_samples();
    let dq = psi.grid.dq();
    let d1 = spectral_derivative(&samples, dq, 1);
    let d2 = spectral_derivative(&samples, dq, 2);
    let mut first = Vec::with_capacity(samples.len());
    let mut second = Vec::with_capacity(samples.len());
    for i in 0..samples.len() {
        if samples[i].norm_sqr() > floor {
            first.push(Some(d1[i] / samples[i]));
            second.push(Some(d2[i] / samples[i]));
        } else {
            first.push(None);
            second.push(None);
        }
    }
    LogDerivatives { first, second }
}

fn first_moment_formula(s: Complex64, hbar: f64, log_d: Complex64) -> Complex64 {
    let conj = log_d.conj();
    Complex64::new(0.0, -hbar / 2.0) * ((log_d - conj) + s * (log_d + conj))
}

/// `ratio` is `Ψ″/Ψ` and `ratio_conj` is `Ψ̄″/Ψ̄`.
fn second_moment_formula(
    s: Complex64,
    hbar: f64,
    log_d: Complex64,
    ratio: Complex64,
    ratio_conj: Complex64,
) -> Complex64 {
    let plus = (1.0 + s) * (1.0 + s);
    let minus = (1.0 - s) * (1.0 - s);
    let cross = (1.0 - s * s) * 2.0 * log_d * log_d.conj();
    -(hbar * hbar / 4.0) * (plus * ratio - cross + minus * ratio_conj)
}

/// `⟨p⟩_w` from the logarithmic derivative of `Ψ`.
pub fn analytic_first_moment(psi: &WavefunctionGrid, s: SParameter) -> MomentProfile {
    let hbar = psi.grid.hbar();
    let logs = log_derivatives(psi, DEFAULT_DENSITY_FLOOR);
    MomentProfile {
        q_values: psi.grid.q_values(),
        values: logs
            .first
            .iter()
            .map(|l| l.map(|l| first_moment_formula(s.value(), hbar, l)))
            .collect(),
        order: 1,
        s,
    }
}

/// `⟨p²⟩_w` from the first and second logarithmic derivatives of `Ψ`.
pub fn analytic_second_moment(psi: &WavefunctionGrid, s: SParameter) -> MomentProfile {
    let hbar = psi.grid.hbar();
    let logs = log_derivatives(psi, DEFAULT_DENSITY_FLOOR);
    MomentProfile {
        q_values: psi.grid.q_values(),
        values: logs
            .first
            .iter()
            .zip(&logs.second)
            .map(|(l, r)| match (l, r) {
                (Some(l), Some(r)) => {
                    Some(second_moment_formula(s.value(), hbar, *l, *r, r.conj()))
                }
                _ => None,
            })
            .collect(),
        order: 2,
        s,
    }
}

/// `R = ∂S/∂t + (∇S)²/2m + V` on the grid, with `∇S` by central differences
/// of the action closure (the action need not be periodic).
pub fn hj_residual(grid: &Grid, fields: &WkbFields) -> Vec<f64> {
    grid.q_values()
        .iter()
        .map(|&q| {
            let grad = fields.action_gradient(q);
            (fields.ds_dt_fn)(q) + grad * grad / (2.0 * fields.mass) + (fields.potential_fn)(q)
        })
        .collect()
}

/// Least-squares fit of `c0 + c1 s + c2 s²`; exact interpolation for three
/// samples.
pub fn fit_quadratic(s_samples: &[Complex64], values: &[Complex64]) -> Result<[Complex64; 3]> {
    if s_samples.len() != values.len() {
        return Err(Error::invalid("sample and value counts differ"));
    }
    let mut distinct: Vec<Complex64> = Vec::new();
    for s in s_samples {
        if distinct.iter().all(|d| (d - s).norm() > 1e-12) {
            distinct.push(*s);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::invalid(format!(
            "a quadratic fit in s needs at least 3 distinct samples, got {}",
            distinct.len()
        )));
    }
    // Normal equations V^H V c = V^H y, solved by Gaussian elimination.
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 3];
    for (s, y) in s_samples.iter().zip(values) {
        let row = [Complex64::new(1.0, 0.0), *s, s * s];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i].conj() * row[j];
            }
            m[i][3] += row[i].conj() * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .expect("non-empty range");
        m.swap(col, pivot);
        for r in 0..3 {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..4 {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    Ok([m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]])
}

/// Coefficients at one `ħ`, over the points where the density exceeds
/// [`SCAN_DENSITY_FRACTION`] of its peak.
#[derive(Debug, Clone, Serialize)]
pub struct ScanTable {
    pub hbar: f64,
    pub q_values: Vec<f64>,
    pub action_gradient: Vec<f64>,
    pub log_density_gradient: Vec<f64>,
    pub hj_residual: Vec<f64>,
    pub first_s0: Vec<Complex64>,
    pub first_s1: Vec<Complex64>,
    pub first_s2: Vec<Complex64>,
    pub second_s0: Vec<Complex64>,
    pub second_s1: Vec<Complex64>,
    pub second_s2: Vec<Complex64>,
}

impl ScanTable {
    pub fn max_abs_second_s2(&self) -> f64 {
        self.second_s2.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_first_s1(&self) -> f64 {
        self.first_s1.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub s_samples: Vec<String>,
    pub tables: Vec<ScanTable>,
    /// `max|s²-coefficient of ⟨p²⟩_w|` at ħ_i divided by that at ħ_{i+1}.
    pub second_s2_ratios: Vec<f64>,
    /// The same ratios as exponents of the ħ ratio.
    pub second_s2_rates: Vec<f64>,
    /// Ratios of `max|s-coefficient of ⟨p⟩_w|`.
    pub first_s1_ratios: Vec<f64>,
}

/// Builds the WKB state at each `ħ`, evaluates `⟨p⟩_w` and `⟨p²⟩_w` at every
/// `s` sample and fits the coefficients of `1, s, s²` pointwise.
///
/// `⟨p²⟩_w` is evaluated with `Ψ″/Ψ` eliminated through the Schrödinger
/// equation, `Ψ″/Ψ = (2m/ħ²)(V − iħ ∂_tΨ/Ψ)`, where `∂_tΨ/Ψ = ρ̇/2ρ + iṠ/ħ`,
/// `Ṡ` is the supplied `∂S/∂t` and `ρ̇` follows from continuity. The
/// kinematic second derivative alone carries no information about `∂S/∂t`.
pub fn classical_limit_scan(
    grid: &Grid,
    fields: &WkbFields,
    s_samples: &[SParameter],
    hbar_samples: &[f64],
) -> Result<ScanReport> {
    let s_values: Vec<Complex64> = s_samples.iter().map(|s| s.value()).collect();
    // Reject an underdetermined fit before doing any work.
    fit_quadratic(&s_values, &vec![Complex64::new(0.0, 0.0); s_values.len()])?;
    if hbar_samples.is_empty() {
        return Err(Error::invalid("no hbar samples"));
    }
    let mass = fields.mass;
    let mut tables = Vec::with_capacity(hbar_samples.len());
    for &hbar in hbar_samples {
        let steepest = grid
            .q_values()
            .iter()
            .map(|&q| fields.action_gradient(q).abs())
            .fold(0.0, f64::max);
        let phase_step = steepest * grid.dq() / hbar;
        if phase_step > MAX_PHASE_STEP {
            return Err(Error::invalid(format!(
                "phase under-resolved at hbar = {hbar}: |∇S|·dq/ħ = {phase_step:.3} > π/4"
            )));
        }
        let psi = wkb_state(grid, fields, hbar)?;
        let density = psi.density();
        let peak = density.iter().cloned().fold(0.0, f64::max);
        let logs = log_derivatives(&psi, DEFAULT_DENSITY_FLOOR);
        let residual = hj_residual(grid, fields);
        let mut table = ScanTable {
            hbar,
            q_values: Vec::new(),
            action_gradient: Vec::new(),
            log_density_gradient: Vec::new(),
            hj_residual: Vec::new(),
            first_s0: Vec::new(),
            first_s1: Vec::new(),
            first_s2: Vec::new(),
            second_s0: Vec::new(),
            second_s1: Vec::new(),
            second_s2: Vec::new(),
        };
        for (i, q) in grid.q_values().into_iter().enumerate() {
            if density[i] < SCAN_DENSITY_FRACTION * peak {
                continue;
            }
            let (Some(log_d), Some(ratio)) = (logs.first[i], logs.second[i]) else {
                continue;
            };
            let half_log_density = log_d.re;
            let action_gradient = hbar * log_d.im;
            let action_curvature = hbar * (ratio - log_d * log_d).im;
            let density_rate =
                -(action_curvature + 2.0 * half_log_density * action_gradient) / mass;
            let v = (fields.potential_fn)(q);
            let ds_dt = (fields.ds_dt_fn)(q);
            let scale = 2.0 * mass / (hbar * hbar);
            let dynamic_ratio = Complex64::new(v + ds_dt, -hbar * density_rate / 2.0) * scale;
            let dynamic_ratio_conj = Complex64::new(v + ds_dt, hbar * density_rate / 2.0) * scale;
            let first: Vec<Complex64> = s_values
                .iter()
                .map(|&s| first_moment_formula(s, hbar, log_d))
                .collect();
            let second: Vec<Complex64> = s_values
                .iter()
                .map(|&s| second_moment_formula(s, hbar, log_d, dynamic_ratio, dynamic_ratio_conj))
                .collect();
            let f = fit_quadratic(&s_values, &first)?;
            let g = fit_quadratic(&s_values, &second)?;
            table.q_values.push(q);
            table.action_gradient.push(action_gradient);
            table.log_density_gradient.push(2.0 * half_log_density);
            table.hj_residual.push(residual[i]);
            table.first_s0.push(f[0]);
            table.first_s1.push(f[1]);
            table.first_s2.push(f[2]);
            table.second_s0.push(g[0]);
            table.second_s1.push(g[1]);
            table.second_s2.push(g[2]);
        }
        tables.push(table);
    }
    let pairs = |f: &dyn Fn(&ScanTable) -> f64| -> Vec<f64> {
        tables.windows(2).map(|w| f(&w[0]) / f(&w[1])).collect()
    };
    let second_s2_ratios = pairs(&|t| t.max_abs_second_s2());
    let first_s1_ratios = pairs(&|t| t.max_abs_first_s1());
    let second_s2_rates = second_s2_ratios
        .iter()
        .zip(hbar_samples.windows(2))
        .map(|(r, h)| r.ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(ScanReport {
        s_samples: s_samples.iter().map(|s| s.to_string()).collect(),
        tables,
        second_s2_ratios,
        second_s2_rates,
        first_s1_ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{gaussian_state, ho_eigenstate};
    use crate::transform::s_wigner;

    fn grid() -> Grid {
        Grid::new(256, -12.0, 12.0, 1.0).unwrap()
    }

    #[test]
    fn ground_gaussian_closed_forms() {
        let g = grid();
        let psi = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap();
        for s in [0.0, 0.5, -0.3] {
            let sp = SParameter::real(s);
            let w = s_wigner(&psi, sp).unwrap();
            let first = conditional_moment(&w, 1).unwrap();
            let second = conditional_moment(&w, 2).unwrap();
            // Both routes divide by the density, so the check stays where it is
            // above 1e−4.
            let mask: Vec<bool> = g.q_values().iter().map(|q| q.abs() <= 3.0).collect();
            let restrict = |p: &MomentProfile| MomentProfile {
                values: p
                    .values
                    .iter()
                    .zip(&mask)
                    .map(|(v, &m)| if m { *v } else { None })
                    .collect(),
                ..p.clone()
            };
            let dev1 = restrict(&first).max_deviation_from(|q| Complex64::new(0.0, s * q));
            let dev2 = restrict(&second)
                .max_deviation_from(|q| ((1.0 + s * s) / 2.0 - s * s * q * q).into());
            assert!(dev1 < 1e-8 && dev2 < 1e-8, "s={s}: {dev1} {dev2}");
            let a1 = restrict(&analytic_first_moment(&psi, sp))
                .max_deviation_from(|q| Complex64::new(0.0, s * q));
            let a2 = restrict(&analytic_second_moment(&psi, sp))
                .max_deviation_from(|q| ((1.0 + s * s) / 2.0 - s * s * q * q).into());
            assert!(a1 < 1e-8 && a2 < 1e-8, "s={s}: {a1} {a2}");
        }
    }

    #[test]
    fn boosted_gaussian_first_moment() {
        let g = grid();
        let psi = gaussian_state(&g, 0.0, 2.0, 1.0).unwrap();
        let zero = analytic_first_moment(&psi, SParameter::real(0.0));
        assert!(zero.max_deviation_from(|_| 2.0.into()) < 1e-8);
        let half = analytic_first_moment(&psi, SParameter::real(0.5));
        assert!(half.max_deviation_from(|q| Complex64::new(2.0, 0.5 * q)) < 1e-8);
    }

    #[test]
    fn node_is_undefined() {
        let g = grid();
        let psi = ho_eigenstate(&g, 1).unwrap();
        let profile = analytic_first_moment(&psi, SParameter::real(0.3));
        let centre = g.nearest_q_index(0.0);
        assert!(g.q(centre).abs() < 1e-12);
        assert!(profile.values[centre].is_none());
    }

    #[test]
    fn residual_examples() {
        let g = grid();
        let free = WkbFields::free_particle(0.0, 1.0, 1.5, 1.0, 0.3).unwrap();
        assert!(hj_residual(&g, &free).iter().all(|r| r.abs() < 1e-10));
        let quad = WkbFields::static_quadratic_action(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let r = hj_residual(&g, &quad);
        let one = g.nearest_q_index(1.0);
        assert!((r[one] - 2.0 * g.q(one).powi(2)).abs() < 1e-10);
    }

    #[test]
    fn underdetermined_fit() {
        let g = grid();
        let free = WkbFields::free_particle(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let err = classical_limit_scan(&g, &free, &[SParameter::real(0.0)], &[0.1]).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let c = [
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.1),
            Complex64::new(3.0, 0.0),
        ];
        let s: Vec<Complex64> = [-0.4, 0.0, 0.4, 0.7]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let y: Vec<Complex64> = s.iter().map(|s| c[0] + c[1] * s + c[2] * s * s).collect();
        let fit = fit_quadratic(&s, &y).unwrap();
        for i in 0..3 {
            assert!((fit[i] - c[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn scan_separates_solutions_from_non_solutions() {
        let s = [
            SParameter::real(-0.5),
            SParameter::real(0.0),
            SParameter::real(0.5),
        ];
        let g = Grid::new(1024, -8.0, 8.0, 1.0).unwrap();
        let free = WkbFields::free_particle(0.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        let report = classical_limit_scan(&g, &free, &s, &[0.2, 0.1]).unwrap();
        assert!((report.second_s2_ratios[0] - 4.0).abs() < 1e-6);
        let quad = WkbFields::static_quadratic_action(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let report = classical_limit_scan(&g, &quad, &s, &[0.4]).unwrap();
        let t = &report.tables[0];
        for (c, q) in t.second_s2.iter().zip(&t.q_values) {
            assert!((c + 2.0 * q * q).norm() <= 0.04 * 2.0 * q * q + 1e-9);
        }
        assert!(classical_limit_scan(&g, &quad, &s, &[0.01]).is_err());
    }
}
