//! Verification suites: kernel identities checked at low-discrepancy sample
//! points, the transform checked against an independent ODE oracle on single
//! Fourier modes, and the transform checked against a finite-difference
//! solver on grid problems. Each suite returns a [`SuiteReport`] whose cases
//! carry a scale-free residual and the tolerance it was judged against.

use crate::jet::Jet2;
use crate::kernels::{
    aux, aux_derivatives, k0_direct, k0_regular_jet, kernel_e, kernel_e_r, kernel_e_raw,
    kernel_e_rr, kernel_e_t, kernel_e_tt, kernel_k0, kernel_k0_boundary_derivatives, phi,
    KernelError, KernelPoint,
};
use crate::transform::{transform_full, QuadratureConfig, TransformError};
use crate::wave::{
    dalembert_v, extend_profile, fd_direct_solver, ode_oracle, GridProblem1D, ModeProblem,
    WaveError, ODE_ORACLE_TOL,
};
use crate::Mass;
use num_complex::Complex64;
use thiserror::Error;

/// Identity-suite tolerance for general mass values.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Identity-suite tolerance at M = 1/2, where every hypergeometric factor
/// collapses to an elementary expression and the identities hold to
/// rounding error.
pub const IDENTITY_TOL_HALF: f64 = 1e-12;

/// Mode-oracle suite tolerance on the worst relative deviation.
pub const MODE_ORACLE_TOL: f64 = 1e-6;

/// End-to-end suite tolerance on the final-time sup-norm deviation between
/// the transform and the second-order finite-difference solution.
pub const END_TO_END_TOL: f64 = 5e-3;

/// Fraction of the stability bound used when the end-to-end suite picks its
/// time step from the grid spacing.
const E2E_CFL_FRACTION: f64 = 0.45;

/// Finite-difference step for the check that K0 equals the backward slope of
/// E in its second time slot. The slope is a fourth-order five-point stencil;
/// this step balances its truncation error against evaluation roundoff,
/// which is amplified by |E| / |K0| when the slope is small relative to E.
const K0_SLOPE_STEP: f64 = 1e-4;

/// Slope-check step at M = 1/2, where E is elementary and single-rounding
/// accurate, so a larger step drives both error terms below 1e-13.
const K0_SLOPE_STEP_HALF: f64 = 3e-3;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// One verified identity instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCase {
    pub case_id: String,
    pub r: f64,
    pub t: f64,
    pub b: f64,
    pub mass: Complex64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// A named collection of verified cases plus the worst residual seen.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<SuiteCase>,
    pub worst_residual: f64,
}

impl SuiteReport {
    pub fn from_cases(suite: &str, cases: Vec<SuiteCase>) -> Self {
        let worst_residual = cases.iter().map(|case| case.residual).fold(0.0, f64::max);
        SuiteReport {
            suite: suite.to_string(),
            cases,
            worst_residual,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|case| case.pass)
    }
}

/// The Halton radical-inverse sequence in the given base, a deterministic
/// low-discrepancy stream in (0, 1) for index >= 1.
pub fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut value = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        value += f * (i % base) as f64;
        i /= base;
    }
    value
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn is_half(m: Complex64) -> bool {
    m.re == 0.5 && m.im == 0.0
}

fn identity_tol(m: Complex64) -> f64 {
    if is_half(m) {
        IDENTITY_TOL_HALF
    } else {
        IDENTITY_TOL
    }
}

/// Turn a residual computation into a plain number; any kernel failure or
/// non-finite value becomes an infinite (always failing) residual.
fn checked(result: Result<f64, KernelError>) -> f64 {
    match result {
        Ok(value) if value.is_finite() => value,
        _ => f64::INFINITY,
    }
}

/// E solves its wave equation: E_tt - e^{-2t} E_rr - M^2 E = 0, measured
/// against the sum of the three term magnitudes.
fn e_wave_residual(r: f64, t: f64, b: f64, mass: Mass) -> Result<f64, KernelError> {
    let p = KernelPoint::new(r, t, b)?;
    let e_tt = kernel_e_tt(p, mass)?;
    let e_rr = kernel_e_rr(p, mass)?;
    let e = kernel_e(p, mass)?;
    let m = mass.value();
    let damped = (-2.0 * t).exp() * e_rr;
    let massive = m * m * e;
    let lhs = e_tt - damped - massive;
    Ok(lhs.norm() / (e_tt.norm() + damped.norm() + massive.norm() + 1e-300))
}

/// At the propagation edge r = e^{-b} - e^{-t} the normal derivatives
/// balance the boundary weight: 2 E_r + 2 e^t E_t = (1/2) e^t e^{(b+t)/2}.
fn e_flux_residual(t: f64, b: f64, mass: Mass) -> Result<f64, KernelError> {
    let d = (-b).exp() - (-t).exp();
    let p = KernelPoint::new(d, t, b)?;
    let e_r = kernel_e_r(p, mass)?;
    let e_t = kernel_e_t(p, mass)?;
    let flux_r = 2.0 * e_r;
    let flux_t = 2.0 * t.exp() * e_t;
    let rhs = c(0.5 * t.exp() * (0.5 * (b + t)).exp());
    let lhs = flux_r + flux_t;
    Ok((lhs - rhs).norm() / (flux_r.norm() + flux_t.norm() + rhs.norm() + 1e-300))
}

/// E_t at the propagation edge, (1/16) e^{(b-t)/2} ((1-4M^2) e^b + (4M^2+3) e^t).
fn edge_e_t(t: f64, b: f64, m: Complex64) -> Complex64 {
    let m2 = m * m;
    ((c(1.0) - 4.0 * m2) * b.exp() + (4.0 * m2 + 3.0) * t.exp()) * (0.0625 * (0.5 * (b - t)).exp())
}

/// Closed-form edge and axis values: E = (1/2) e^{(b+t)/2} and
/// E_r = (1/4)(1/4 - M^2)(e^t - e^b) e^{(b+t)/2} at the edge, E_t as in
/// [`edge_e_t`], and E_r = 0 on the axis r = 0.
fn e_edge_residual(t: f64, b: f64, mass: Mass) -> Result<f64, KernelError> {
    let m = mass.value();
    let d = (-b).exp() - (-t).exp();
    let edge = KernelPoint::new(d, t, b)?;
    let axis = KernelPoint::new(0.0, t, b)?;
    let mut worst = 0.0f64;
    let mut check = |got: Complex64, want: Complex64| {
        worst = worst.max((got - want).norm() / (got.norm() + want.norm() + 1.0));
    };
    let half_exp = (0.5 * (b + t)).exp();
    check(kernel_e(edge, mass)?, c(0.5 * half_exp));
    check(
        kernel_e_r(edge, mass)?,
        (c(0.25) - m * m) * (0.25 * (t.exp() - b.exp()) * half_exp),
    );
    check(kernel_e_t(edge, mass)?, edge_e_t(t, b, m));
    check(kernel_e_r(axis, mass)?, c(0.0));
    Ok(worst)
}

/// K1(z, t) = E(z, t; 0, 0) solves the same wave equation in (z, t).
fn k1_wave_residual(q: f64, t: f64, mass: Mass) -> Result<f64, KernelError> {
    e_wave_residual(q * phi(t), t, 0.0, mass)
}

/// K1 boundary derivatives along z = phi(t):
/// K1_r = (1/4)(1/4 - M^2)(1 - e^{-t}) e^{3t/2} and
/// K1_t = (1/16) e^{-t/2} ((4M^2+3) e^t + 1 - 4M^2).
fn k1_edge_residual(t: f64, mass: Mass) -> Result<f64, KernelError> {
    let m = mass.value();
    let ph = phi(t);
    let edge = KernelPoint::new(ph, t, 0.0)?;
    let mut worst = 0.0f64;
    let mut check = |got: Complex64, want: Complex64| {
        worst = worst.max((got - want).norm() / (got.norm() + want.norm() + 1.0));
    };
    check(
        kernel_e_r(edge, mass)?,
        (c(0.25) - m * m) * (0.25 * ph * (1.5 * t).exp()),
    );
    check(kernel_e_t(edge, mass)?, edge_e_t(t, 0.0, m));
    Ok(worst)
}

/// K0 solves the wave equation K0_tt - e^{-2t} K0_zz - M^2 K0 = 0; the
/// second derivatives come from jet evaluations of the regular form.
fn k0_wave_residual(q: f64, t: f64, mass: Mass) -> Result<f64, KernelError> {
    let z = q * phi(t);
    let z_pass = k0_regular_jet(Jet2::variable(z), Jet2::constant(t), mass)?;
    let t_pass = k0_regular_jet(Jet2::constant(z), Jet2::variable(t), mass)?;
    let m = mass.value();
    let damped = (-2.0 * t).exp() * z_pass.dd;
    let massive = m * m * z_pass.v;
    let lhs = t_pass.dd - damped - massive;
    Ok(lhs.norm() / (t_pass.dd.norm() + damped.norm() + massive.norm() + 1e-300))
}

/// K0 is even in z, so its z-derivative vanishes on the axis.
fn k0_axis_residual(t: f64, mass: Mass) -> Result<f64, KernelError> {
    let j = k0_regular_jet(Jet2::variable(0.0), Jet2::constant(t), mass)?;
    Ok(j.d.norm() / (j.v.norm() + j.dd.norm() + 1e-300))
}

/// Along z = phi(t) the closed-form values satisfy
/// (1/4 - M^2) e^{t/2} - 2 e^{-t} K0 + 4 e^{-2t} K0_z + 4 e^{-t} K0_t = 0.
fn k0_horizon_residual(t: f64, mass: Mass) -> Result<f64, KernelError> {
    let m = mass.value();
    let ph = phi(t);
    let k0 = kernel_k0(ph, t, mass)?;
    let boundary = kernel_k0_boundary_derivatives(t, mass)?;
    let et = (-t).exp();
    let a1 = (c(0.25) - m * m) * (0.5 * t).exp();
    let a2 = -2.0 * et * k0;
    let a3 = 4.0 * et * et * boundary.r_derivative;
    let a4 = 4.0 * et * boundary.t_derivative;
    let lhs = a1 + a2 + a3 + a4;
    Ok(lhs.norm() / (a1.norm() + a2.norm() + a3.norm() + a4.norm() + 1e-300))
}

/// K0 is the negated b-slope of E at b = 0, checked against a five-point
/// central difference of E in b. The step balances the fourth-order
/// truncation against rounding in the difference.
///
/// The residual is scaled by |K0| + |slope| + |E|: both members are
/// derivative-of-E objects whose natural magnitude is that of E itself (the
/// b-scale of the geometry is one e-fold), and K0 has structural zeros --
/// for example d(ln E)/db tends to 1 - M on the axis at late times, so K0
/// vanishes there for M = 1 -- where no difference quotient of E can certify
/// agreement relative to |K0| alone.
fn k0_slope_residual(q: f64, t: f64, mass: Mass) -> Result<f64, KernelError> {
    let h = if is_half(mass.value()) {
        K0_SLOPE_STEP_HALF
    } else {
        K0_SLOPE_STEP
    };
    k0_slope_residual_with_step(q, t, mass, h)
}

fn k0_slope_residual_with_step(q: f64, t: f64, mass: Mass, h: f64) -> Result<f64, KernelError> {
    let z = q * phi(t);
    let e_at = |b: f64| kernel_e_raw(z, t, b, mass);
    let slope = (8.0 * (e_at(h)? - e_at(-h)?) - (e_at(2.0 * h)? - e_at(-2.0 * h)?)) / (12.0 * h);
    let k0 = kernel_k0(z, t, mass)?;
    let e_scale = kernel_e_raw(z, t, 0.0, mass)?.norm();
    Ok((k0 + slope).norm() / (k0.norm() + slope.norm() + e_scale + 1e-300))
}

/// The direct two-term K0 evaluation and the regular-form evaluation agree.
fn k0_forms_residual(q: f64, t: f64, mass: Mass) -> Result<f64, KernelError> {
    let z = q * phi(t);
    let direct = k0_direct(z, t, mass.value())?;
    let regular = k0_regular_jet(Jet2::constant(z), Jet2::constant(t), mass)?.v;
    Ok((direct - regular).norm() / (direct.norm() + regular.norm() + 1e-300))
}

/// The auxiliary quantities and their derivatives take elementary values at
/// the propagation edge, and stay in range at the interior point.
fn aux_edge_residual(r: f64, t: f64, b: f64, mass: Mass) -> Result<f64, KernelError> {
    let m = mass.value();
    let eb = (-b).exp();
    let et = (-t).exp();
    let d = eb - et;
    let s = eb + et;
    let edge = KernelPoint::new(d, t, b)?;
    let a = aux(edge, mass);
    let ad = aux_derivatives(edge, mass);
    let half_exp = (0.5 * (b + t)).exp();
    let full_exp = half_exp * half_exp;
    let mut worst = 0.0f64;
    let mut check = |got: Complex64, want: Complex64| {
        worst = worst.max((got - want).norm() / (got.norm() + want.norm() + 1.0));
    };
    check(a.alpha, c(1.0));
    check(c(a.beta), c(0.5 * half_exp));
    check(c(a.gamma), c(0.0));
    check(ad.alpha_r, m * (-0.5 * d * full_exp));
    check(c(ad.beta_r), c(d * half_exp.powi(3) / 8.0));
    check(c(ad.gamma_r), c(-0.5 * d * full_exp));
    check(ad.alpha_t, m * (0.5 - 0.5 * (b - t).exp()));
    check(c(ad.beta_t), c(et * s * half_exp.powi(3) / 8.0));
    check(c(ad.gamma_t), c(0.5 * d * b.exp()));

    let interior = aux(KernelPoint::new(r, t, b)?, mass);
    if !(interior.gamma >= 0.0 && interior.gamma < 1.0 && interior.beta > 0.0) {
        worst = f64::INFINITY;
    }
    Ok(worst)
}

/// E is symmetric in its two time slots.
fn e_slot_symmetry_residual(r: f64, t: f64, b: f64, mass: Mass) -> Result<f64, KernelError> {
    let e1 = kernel_e_raw(r, t, b, mass)?;
    let e2 = kernel_e_raw(r, b, t, mass)?;
    Ok((e1 - e2).norm() / (e1.norm() + e2.norm() + 1e-300))
}

/// Check every kernel identity at `sample_count` low-discrepancy points of
/// the admissible wedge (Halton bases 2, 3, 5 for t in (0, 5), b in (0, t),
/// and the fractional radius) for each mass in `masses`. Residuals are
/// scale-free; cases at M = 1/2 are held to [`IDENTITY_TOL_HALF`], all
/// others to [`IDENTITY_TOL`]. Designed for sample counts up to a few
/// thousand; far beyond that the samples crowd the cancellation-limited
/// corner q -> 1 of the direct K0 formula.
pub fn run_kernel_identity_suite(sample_count: usize, masses: &[Mass]) -> SuiteReport {
    let mut cases = Vec::new();
    for &mass in masses {
        let m = mass.value();
        let tol = identity_tol(m);
        for i in 1..=sample_count {
            let t = 5.0 * halton(i, 2);
            let b = t * halton(i, 3);
            let q = halton(i, 5);
            let d = (-b).exp() - (-t).exp();
            let r = q * d;
            let mut push = |name: &str, at_r: f64, residual: f64| {
                cases.push(SuiteCase {
                    case_id: format!("{name}[{i}]"),
                    r: at_r,
                    t,
                    b,
                    mass: m,
                    residual,
                    tol,
                    pass: residual <= tol,
                });
            };
            push(
                "e_wave_equation",
                r,
                checked(e_wave_residual(r, t, b, mass)),
            );
            push("e_flux_balance", d, checked(e_flux_residual(t, b, mass)));
            push("e_edge_values", d, checked(e_edge_residual(t, b, mass)));
            push(
                "e_slot_symmetry",
                r,
                checked(e_slot_symmetry_residual(r, t, b, mass)),
            );
            push(
                "aux_edge_values",
                d,
                checked(aux_edge_residual(r, t, b, mass)),
            );
            push(
                "k1_wave_equation",
                q * phi(t),
                checked(k1_wave_residual(q, t, mass)),
            );
            push(
                "k1_edge_derivatives",
                phi(t),
                checked(k1_edge_residual(t, mass)),
            );
            push(
                "k0_wave_equation",
                q * phi(t),
                checked(k0_wave_residual(q, t, mass)),
            );
            push(
                "k0_axis_derivative",
                0.0,
                checked(k0_axis_residual(t, mass)),
            );
            push(
                "k0_horizon_identity",
                phi(t),
                checked(k0_horizon_residual(t, mass)),
            );
            push(
                "k0_matches_e_slope",
                q * phi(t),
                checked(k0_slope_residual(q, t, mass)),
            );
            push(
                "k0_two_forms_agree",
                q * phi(t),
                checked(k0_forms_residual(q, t, mass)),
            );
        }
    }
    SuiteReport::from_cases("kernel_identities", cases)
}

/// Compare the transform against the adaptive ODE oracle on each mode
/// problem over `t_grid`. The case residual is the worst absolute deviation
/// over the grid divided by the peak oracle amplitude.
pub fn run_mode_oracle_suite(
    problems: &[ModeProblem],
    t_grid: &[f64],
    cfg: &QuadratureConfig,
) -> SuiteReport {
    let t_max = t_grid.iter().copied().fold(0.0, f64::max);
    let mut cases = Vec::new();
    for problem in problems {
        let (c0, c1, mass) = (problem.c0, problem.c1, problem.mass);
        let lambda = problem.lambda();
        let factor = move |s: f64| (lambda * s).cos();
        let residual = (|| -> Result<f64, String> {
            let oracle = ode_oracle(problem, t_max, ODE_ORACLE_TOL).map_err(|e| e.to_string())?;
            let mut amplitude = 0.0f64;
            let mut worst = 0.0f64;
            for &t in t_grid {
                let y = oracle.eval(t)[0];
                let source = problem
                    .forcing
                    .as_ref()
                    .map(|g| move |_x: f64, r: f64, b: f64| g(b) * factor(r));
                let u = transform_full(
                    source,
                    |_x, s| c0 * factor(s),
                    |_x, s| c1 * factor(s),
                    0.0,
                    t,
                    mass,
                    cfg,
                )
                .map_err(|e| e.to_string())?
                .re;
                amplitude = amplitude.max(y.abs());
                worst = worst.max((u - y).abs());
            }
            Ok(worst / amplitude.max(1e-30))
        })();
        let residual = match residual {
            Ok(value) if value.is_finite() => value,
            _ => f64::INFINITY,
        };
        cases.push(SuiteCase {
            case_id: format!(
                "mode[mu={}; mass={}; c0={}; c1={}; forced={}]",
                problem.mu,
                mass.value(),
                c0,
                c1,
                problem.forcing.is_some()
            ),
            r: 0.0,
            t: t_max,
            b: 0.0,
            mass: mass.value(),
            residual,
            tol: MODE_ORACLE_TOL,
            pass: residual <= MODE_ORACLE_TOL,
        });
    }
    SuiteReport::from_cases("mode_oracle", cases)
}

/// Compare the transform against the leapfrog solver at the final time of a
/// source-free grid problem. `profile0` and `profile1` are the continuous
/// displacement and velocity profiles whose node samples the grid problem
/// carries; the undamped fields are the even d'Alembert evolutions of their
/// boundary-respecting extensions (periodic wrap or Dirichlet images). The
/// time step is E2E_CFL_FRACTION of the grid spacing. Solver failures
/// (bad grids, complex mass) propagate as errors.
pub fn run_end_to_end_suite<P0, P1>(
    problem: &GridProblem1D,
    profile0: P0,
    profile1: P1,
    mass: Mass,
    t_max: f64,
    cfg: &QuadratureConfig,
) -> Result<SuiteReport, VerifyError>
where
    P0: Fn(f64) -> f64,
    P1: Fn(f64) -> f64,
{
    let (_, dx) = problem.grid();
    let dt = E2E_CFL_FRACTION * dx;
    let fd = fd_direct_solver(problem, mass, t_max, dt)?;
    let extended0 = extend_profile(problem.boundary, problem.x_min, problem.x_max, profile0);
    let extended1 = extend_profile(problem.boundary, problem.x_min, problem.x_max, profile1);
    let mut worst = 0.0f64;
    for (i, &x) in fd.xs.iter().enumerate() {
        let u = transform_full(
            None::<fn(f64, f64, f64) -> f64>,
            |x, s| dalembert_v(&extended0, x, s),
            |x, s| dalembert_v(&extended1, x, s),
            x,
            t_max,
            mass,
            cfg,
        )?
        .re;
        worst = worst.max((u - fd.final_row()[i]).abs());
    }
    if !worst.is_finite() {
        worst = f64::INFINITY;
    }
    let case = SuiteCase {
        case_id: format!("grid_sup_norm[n_x={}; t_max={}]", problem.n_x, t_max),
        r: 0.0,
        t: t_max,
        b: 0.0,
        mass: mass.value(),
        residual: worst,
        tol: END_TO_END_TOL,
        pass: worst <= END_TO_END_TOL,
    };
    Ok(SuiteReport::from_cases("end_to_end", vec![case]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergeom;

    fn test_masses() -> Vec<Mass> {
        vec![
            Mass::real(0.0),
            Mass::real(0.25),
            Mass::real(0.5),
            Mass::real(1.0),
            Mass::curved(Complex64::new(0.0, 0.3)),
            Mass::curved(Complex64::new(0.0, 1.7)),
        ]
    }

    #[test]
    fn halton_produces_the_radical_inverse() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 2), 0.25);
        assert_eq!(halton(3, 2), 0.75);
        assert_eq!(halton(4, 2), 0.125);
        assert!((halton(1, 3) - 1.0 / 3.0).abs() <= 1e-16);
        assert!((halton(2, 3) - 2.0 / 3.0).abs() <= 1e-16);
        assert!((halton(3, 3) - 1.0 / 9.0).abs() <= 1e-16);
        for i in 1..500 {
            let h = halton(i, 5);
            assert!(h > 0.0 && h < 1.0);
        }
    }

    #[test]
    fn report_bookkeeping_flags_failures() {
        let case = |residual: f64, tol: f64| SuiteCase {
            case_id: "case".into(),
            r: 0.0,
            t: 1.0,
            b: 0.0,
            mass: c(0.0),
            residual,
            tol,
            pass: residual <= tol,
        };
        let report = SuiteReport::from_cases("demo", vec![case(1e-12, 1e-9), case(2e-9, 1e-9)]);
        assert!(!report.all_pass());
        assert_eq!(report.worst_residual, 2e-9);
        let report = SuiteReport::from_cases("demo", vec![case(1e-12, 1e-9)]);
        assert!(report.all_pass());
    }

    #[test]
    fn empty_mass_list_gives_an_empty_passing_report() {
        let report = run_kernel_identity_suite(50, &[]);
        assert!(report.cases.is_empty());
        assert_eq!(report.worst_residual, 0.0);
        assert!(report.all_pass());
    }

    /// Calibration sweep for K0_SLOPE_STEP: prints the worst slope residual
    /// per candidate step over the full 200-sample stream and every test
    /// mass. Run with --ignored --nocapture when retuning the constant.
    #[test]
    #[ignore = "calibration sweep, run manually when retuning K0_SLOPE_STEP"]
    fn slope_step_calibration_sweep() {
        for &h in &[2.5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 3e-3, 5e-3] {
            let mut worst = 0.0f64;
            let mut worst_at = String::new();
            for mass in test_masses() {
                if is_half(mass.value()) {
                    continue;
                }
                for i in 1..=200 {
                    let t = 5.0 * halton(i, 2);
                    let q = halton(i, 5);
                    let residual = checked(k0_slope_residual_with_step(q, t, mass, h));
                    if residual > worst {
                        worst = residual;
                        worst_at = format!("i={i} t={t:.4} q={q:.4} M={}", mass.value());
                    }
                }
            }
            println!("h = {h:9.1e}: worst residual {worst:e} at {worst_at}");
        }
    }

    #[test]
    fn identities_hold_to_rounding_at_the_elementary_mass() {
        let report = run_kernel_identity_suite(25, &[Mass::real(0.5)]);
        assert!(
            report.all_pass(),
            "worst residual {:e}",
            report.worst_residual
        );
        assert!(report.worst_residual <= IDENTITY_TOL_HALF);
    }

    #[test]
    fn identities_hold_for_real_and_imaginary_masses() {
        let masses = [
            Mass::real(0.0),
            Mass::real(1.0),
            Mass::curved(Complex64::new(0.0, 0.3)),
        ];
        let report = run_kernel_identity_suite(20, &masses);
        for case in &report.cases {
            assert!(
                case.pass,
                "{} at (r={}, t={}, b={}, M={}) residual {:e}",
                case.case_id, case.r, case.t, case.b, case.mass, case.residual
            );
        }
    }

    #[test]
    fn mode_suite_matches_oracle_and_elementary_solutions() {
        let problems = vec![
            ModeProblem {
                mu: -1.0,
                mass: Mass::real(0.5),
                c0: 0.0,
                c1: 1.0,
                forcing: None,
            },
            ModeProblem {
                mu: -4.0,
                mass: Mass::real(0.25),
                c0: 1.0,
                c1: 0.0,
                forcing: None,
            },
        ];
        let t_grid = [0.0, 0.5, 1.0, 1.5, 2.0];
        let report = run_mode_oracle_suite(&problems, &t_grid, &QuadratureConfig::default());
        assert!(
            report.all_pass(),
            "worst residual {:e}",
            report.worst_residual
        );
        // The elementary-mass case is far inside the tolerance.
        assert!(report.cases[0].residual <= 1e-8);
    }

    #[test]
    fn end_to_end_suite_is_exact_on_zero_data() {
        let n_x = 31;
        let problem = GridProblem1D {
            x_min: -1.0,
            x_max: 1.0,
            n_x,
            phi0: vec![0.0; n_x],
            phi1: vec![0.0; n_x],
            forcing: None,
            boundary: crate::wave::Boundary::Periodic,
        };
        let report = run_end_to_end_suite(
            &problem,
            |_| 0.0,
            |_| 0.0,
            Mass::real(0.5),
            0.5,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(report.all_pass());
        assert_eq!(report.worst_residual, 0.0);
    }

    /// Independent transcription of the interior t-derivative of K0 as a
    /// two-term hypergeometric expression (polynomial coefficients in
    /// powers of e^t), used to cross-check the jet evaluation. Its raw
    /// polynomials cancel catastrophically for large t, so it serves as a
    /// fixed-point reference rather than a suite case.
    fn k0_t_interior_reference(z: f64, t: f64, m: Complex64) -> Complex64 {
        let et = t.exp();
        let e = |k: i32| et.powi(k);
        let z2 = z * z;
        let z4 = z2 * z2;
        let z6 = z4 * z2;
        let den1 = {
            let v = et * ((z2 - 1.0) * et + 2.0) - 1.0;
            v * v
        };
        let den2 = et * ((z2 - 1.0) * et - 2.0) - 1.0;
        let emt = (-t).exp();
        let rho0 = (1.0 + emt) * (1.0 + emt) - z2;
        let gamma0 = ((1.0 - emt) * (1.0 - emt) - z2) / rho0;
        let pre = ((m - 2.0) * t + (m - 1.5) * rho0.ln() - m * 4.0f64.ln()).exp() / den1;
        let p3_m2 = z6 * e(6) - z4 * e(4) + 2.0 * z4 * e(5) - z4 * e(6) - z2 * e(2)
            + 2.0 * z2 * e(4)
            - z2 * e(6)
            - 2.0 * e(1)
            - e(2)
            + 4.0 * e(3)
            - e(4)
            - 2.0 * e(5)
            + e(6)
            + 1.0;
        let p3_m1 = -z4 * e(4) - z4 * e(6) + 2.0 * z2 * e(2) - 12.0 * z2 * e(4)
            + 2.0 * z2 * e(6)
            + e(2)
            + e(4)
            - e(6)
            - 1.0;
        let p3_m0 = -z2 * e(3) + 6.0 * z2 * e(4) - z2 * e(5) + e(1) - 2.0 * e(3) + e(5);
        let p3 = m * m * p3_m2 + m * p3_m1 + p3_m0;
        let q_poly = z4 * e(5) + z4 * e(7) - 2.0 * z2 * e(3) + 12.0 * z2 * e(5) - 2.0 * z2 * e(7)
            + e(1)
            - e(3)
            - e(5)
            + e(7);
        let p4 = (4.0 * m - 2.0) * q_poly;
        let a = c(0.5) - m;
        let f1 = hypergeom::series(a, a, c(1.0), gamma0).unwrap();
        let fb = hypergeom::series(a, c(1.5) - m, c(1.0), gamma0).unwrap();
        pre * (p3 * f1 - p4 * fb / den2)
    }

    #[test]
    fn k0_time_derivative_jet_matches_the_direct_transcription() {
        let t = 1.0;
        for mass in test_masses() {
            let m = mass.value();
            let tol = if is_half(m) { 1e-11 } else { 1e-10 };
            for q in [0.3, 0.6] {
                let z = q * phi(t);
                let want = k0_t_interior_reference(z, t, m);
                let jet = k0_regular_jet(Jet2::constant(z), Jet2::variable(t), mass).unwrap();
                let rel = (jet.d - want).norm() / (want.norm() + 1e-300);
                assert!(
                    rel <= tol,
                    "K0_t mismatch at q={q}, M={m}: jet {} vs reference {} (rel {rel:e})",
                    jet.d,
                    want
                );
            }
        }
    }

    #[test]
    fn interior_k0_time_slope_matches_a_finite_difference() {
        // Independent of the transcription above: difference kernel_k0 in t.
        let (q, t) = (0.45, 0.9);
        for mass in test_masses() {
            let z = q * phi(t);
            let h = 1e-5;
            let plus = kernel_k0(z, t + h, mass).unwrap();
            let minus = kernel_k0(z, t - h, mass).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            let jet = k0_regular_jet(Jet2::constant(z), Jet2::variable(t), mass).unwrap();
            let rel = (jet.d - fd).norm() / (jet.d.norm() + fd.norm() + 1e-300);
            assert!(
                rel <= 1e-7,
                "K0_t finite difference mismatch at M={}: {rel:e}",
                mass.value()
            );
        }
    }
}
