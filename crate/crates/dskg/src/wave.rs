//! Undamped input fields for the transform and two independent reference
//! solvers: an adaptive Runge-Kutta integrator (Dormand-Prince 5(4) with
//! cubic-Hermite dense output) for single Fourier modes of the damped
//! equation, and a leapfrog finite-difference scheme for the full damped
//! equation on a one-dimensional grid.

use crate::Mass;
use num_complex::Complex64;
use thiserror::Error;

/// Fraction of the leapfrog stability bound dt <= dx that the solver
/// accepts (propagation speed e^{-t} <= 1 for t >= 0).
pub const CFL_SAFETY: f64 = 0.9;

/// Default local tolerance of the mode ODE oracle.
pub const ODE_ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaveError {
    #[error("time step {dt} exceeds the stability bound {bound} for dx = {dx}")]
    CflViolation { dt: f64, dx: f64, bound: f64 },
    #[error("mass must be real or purely imaginary for the real-valued solvers, got {0}")]
    ComplexMass(Complex64),
    #[error("ode integrator failed: step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Even d'Alembert solution of v_ss = v_xx with v(x,0) = profile and
/// v_s(x,0) = 0, namely (profile(x+s) + profile(x-s)) / 2.
pub fn dalembert_v<F: Fn(f64) -> f64>(profile: F, x: f64, s: f64) -> f64 {
    0.5 * (profile(x + s) + profile(x - s))
}

/// Extension of a profile given on [x_min, x_max] to the whole line as the
/// boundary condition dictates: wrap-around with period x_max - x_min for
/// [`Boundary::Periodic`], odd reflection about both walls (method of
/// images, period 2(x_max - x_min)) for [`Boundary::Dirichlet`]. Feeding
/// the extension to [`dalembert_v`] turns the whole-line formula into the
/// undamped solution on the bounded domain; at a Dirichlet wall the two
/// image terms cancel, so v vanishes there for every s > 0.
pub fn extend_profile<F: Fn(f64) -> f64>(
    boundary: Boundary,
    x_min: f64,
    x_max: f64,
    profile: F,
) -> impl Fn(f64) -> f64 {
    let length = x_max - x_min;
    move |y: f64| match boundary {
        Boundary::Periodic => profile(x_min + (y - x_min).rem_euclid(length)),
        Boundary::Dirichlet => {
            let xi = (y - x_min).rem_euclid(2.0 * length);
            if xi <= length {
                profile(x_min + xi)
            } else {
                -profile(x_min + 2.0 * length - xi)
            }
        }
    }
}

/// A single spatial mode of the damped equation: A acts as multiplication
/// by mu <= 0, so the mode amplitude y satisfies
/// y'' - mu e^{-2t} y - M^2 y = g(t), y(0) = c0, y'(0) = c1.
pub struct ModeProblem {
    pub mu: f64,
    pub mass: Mass,
    pub c0: f64,
    pub c1: f64,
    pub forcing: Option<Box<dyn Fn(f64) -> f64>>,
}

impl ModeProblem {
    /// Spatial frequency lambda = sqrt(-mu).
    pub fn lambda(&self) -> f64 {
        (-self.mu).max(0.0).sqrt()
    }

    /// Undamped evolution factor cos(lambda s) shared by every data slot:
    /// the solution of y'' = mu y, y(0) = 1, y'(0) = 0.
    pub fn undamped_factor(&self, s: f64) -> f64 {
        (self.lambda() * s).cos()
    }
}

/// The two undamped fields of a mode problem at lag s: the phi0 slot
/// c0 cos(lambda s) and the phi1 slot c1 cos(lambda s).
pub fn mode_v(problem: &ModeProblem, s: f64) -> (f64, f64) {
    let factor = problem.undamped_factor(s);
    (problem.c0 * factor, problem.c1 * factor)
}

/// Dense ODE solution: accepted nodes plus cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    ts: Vec<f64>,
    ys: Vec<[f64; 2]>,
    fs: Vec<[f64; 2]>,
}

impl OdeSolution {
    /// Interpolated state [y, y'] at time t (clamped to the solved range).
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let n = self.ts.len();
        let t = t.clamp(self.ts[0], self.ts[n - 1]);
        // Index of the segment [ts[i], ts[i+1]] containing t.
        let i = self.ts.partition_point(|&ti| ti <= t).clamp(1, n - 1) - 1;
        let h = self.ts[i + 1] - self.ts[i];
        let th = (t - self.ts[i]) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mut out = [0.0; 2];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = h00 * self.ys[i][k]
                + h10 * h * self.fs[i][k]
                + h01 * self.ys[i + 1][k]
                + h11 * h * self.fs[i + 1][k];
        }
        out
    }

    pub fn end_time(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn steps(&self) -> usize {
        self.ts.len() - 1
    }
}

/// Integrate the mode ODE from t = 0 to t_max with a Dormand-Prince 5(4)
/// embedded pair at local tolerance `tol` (absolute and relative).
pub fn ode_oracle(problem: &ModeProblem, t_max: f64, tol: f64) -> Result<OdeSolution, WaveError> {
    if !problem.mass.is_real_or_imaginary() {
        return Err(WaveError::ComplexMass(problem.mass.value()));
    }
    let m2 = (problem.mass.value() * problem.mass.value()).re;
    let mu = problem.mu;
    let rhs = |t: f64, y: &[f64; 2]| -> [f64; 2] {
        let force = problem.forcing.as_ref().map_or(0.0, |g| g(t));
        [y[1], (mu * (-2.0 * t).exp() + m2) * y[0] + force]
    };

    // Dormand-Prince coefficients (FSAL: the 7th stage is the next k1).
    const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    // y5 - y4, the embedded error estimate weights.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let mut t = 0.0;
    let mut y = [problem.c0, problem.c1];
    let mut f = rhs(t, &y);
    let mut ts = vec![t];
    let mut ys = vec![y];
    let mut fs = vec![f];
    if t_max <= 0.0 {
        return Ok(OdeSolution { ts, ys, fs });
    }

    let mut h = (0.01 * t_max).min(0.1);
    let mut k = [[0.0f64; 2]; 7];
    while t < t_max {
        h = h.min(t_max - t);
        if h < 1e-14 * t_max.max(1.0) {
            return Err(WaveError::StepFailure { t });
        }
        k[0] = f;
        for stage in 1..7 {
            let mut ystage = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    ystage[0] += h * a * kj[0];
                    ystage[1] += h * a * kj[1];
                }
            }
            k[stage] = rhs(t + C[stage] * h, &ystage);
        }
        // Stage 7 used y_new = y + h * (A[5] row) which equals the 5th-order
        // solution, so k[6] is f(t+h, y_new).
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                y_new[0] += h * a * kj[0];
                y_new[1] += h * a * kj[1];
            }
        }
        let mut err_norm_sq = 0.0;
        for comp in 0..2 {
            let mut err = 0.0;
            for (j, kj) in k.iter().enumerate() {
                err += E[j] * kj[comp];
            }
            err *= h;
            let scale = tol + tol * y[comp].abs().max(y_new[comp].abs());
            err_norm_sq += (err / scale) * (err / scale);
        }
        let err_norm = (0.5 * err_norm_sq).sqrt();
        if err_norm <= 1.0 {
            t += h;
            y = y_new;
            f = k[6];
            ts.push(t);
            ys.push(y);
            fs.push(f);
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(OdeSolution { ts, ys, fs })
}

/// How the spatial boundary is treated by the grid solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Nodes x_i = x_min + i dx, i < n_x, dx = (x_max - x_min)/n_x; the
    /// stencil wraps around.
    Periodic,
    /// Nodes x_i = x_min + i dx, i <= n_x - 1, dx = (x_max - x_min)/(n_x-1);
    /// the endpoint values are pinned to zero.
    Dirichlet,
}

/// A 1-d grid problem for u_tt - e^{-2t} u_xx - M^2 u = f with nodal data.
pub struct GridProblem1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    /// Nodal forcing values at a given time.
    pub forcing: Option<Box<dyn Fn(f64) -> Vec<f64>>>,
    pub boundary: Boundary,
}

impl GridProblem1D {
    /// Grid nodes and spacing for the boundary convention.
    pub fn grid(&self) -> (Vec<f64>, f64) {
        let length = self.x_max - self.x_min;
        let dx = match self.boundary {
            Boundary::Periodic => length / self.n_x as f64,
            Boundary::Dirichlet => length / (self.n_x - 1) as f64,
        };
        let xs = (0..self.n_x).map(|i| self.x_min + i as f64 * dx).collect();
        (xs, dx)
    }

    fn validate(&self) -> Result<(), WaveError> {
        if self.n_x < 3 {
            return Err(WaveError::InvalidGrid(format!(
                "n_x = {} but at least 3 nodes are required",
                self.n_x
            )));
        }
        if !(self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min) {
            return Err(WaveError::InvalidGrid(format!(
                "empty or non-finite domain [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.phi0.len() != self.n_x || self.phi1.len() != self.n_x {
            return Err(WaveError::InvalidGrid(format!(
                "data lengths ({}, {}) do not match n_x = {}",
                self.phi0.len(),
                self.phi1.len(),
                self.n_x
            )));
        }
        Ok(())
    }
}

/// Leapfrog solution history on the grid.
#[derive(Debug, Clone)]
pub struct FdSolution {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub dt: f64,
    rows: Vec<Vec<f64>>,
}

impl FdSolution {
    pub fn row(&self, step: usize) -> &[f64] {
        &self.rows[step]
    }

    pub fn final_row(&self) -> &[f64] {
        self.rows.last().unwrap()
    }
}

/// March the damped wave equation with the explicit leapfrog scheme
///
/// ```text
/// u^{n+1} = 2u^n - u^{n-1} + dt^2 (e^{-2 t_n} Lap u^n + M^2 u^n + f^n),
/// ```
///
/// second-order in time and space, with the first step taken from the
/// Taylor expansion u^1 = u^0 + dt phi1 + dt^2/2 (Lap u^0 + M^2 u^0 + f^0).
/// The step is shortened to divide t_max exactly; `dt` must satisfy the
/// stability bound dt <= CFL_SAFETY * dx.
pub fn fd_direct_solver(
    problem: &GridProblem1D,
    mass: Mass,
    t_max: f64,
    dt: f64,
) -> Result<FdSolution, WaveError> {
    problem.validate()?;
    if !mass.is_real_or_imaginary() {
        return Err(WaveError::ComplexMass(mass.value()));
    }
    if !(t_max.is_finite() && dt.is_finite() && t_max > 0.0 && dt > 0.0) {
        return Err(WaveError::InvalidGrid(format!(
            "t_max = {t_max} and dt = {dt} must be positive and finite"
        )));
    }
    let m2 = (mass.value() * mass.value()).re;
    let (xs, dx) = problem.grid();
    let bound = CFL_SAFETY * dx;
    if dt > bound {
        return Err(WaveError::CflViolation { dt, dx, bound });
    }
    let n_steps = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let dt = t_max / n_steps as f64;
    let n = problem.n_x;
    let dx2 = dx * dx;

    let laplacian = |u: &[f64], out: &mut [f64]| match problem.boundary {
        Boundary::Periodic => {
            for i in 0..n {
                let left = u[if i == 0 { n - 1 } else { i - 1 }];
                let right = u[if i == n - 1 { 0 } else { i + 1 }];
                out[i] = (left - 2.0 * u[i] + right) / dx2;
            }
        }
        Boundary::Dirichlet => {
            out[0] = 0.0;
            out[n - 1] = 0.0;
            for i in 1..n - 1 {
                out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / dx2;
            }
        }
    };
    let enforce = |u: &mut [f64]| {
        if problem.boundary == Boundary::Dirichlet {
            u[0] = 0.0;
            u[n - 1] = 0.0;
        }
    };
    let force_at = |t: f64| -> Vec<f64> {
        match &problem.forcing {
            Some(f) => {
                let values = f(t);
                assert_eq!(values.len(), n, "forcing must return one value per node");
                values
            }
            None => vec![0.0; n],
        }
    };

    let mut prev = problem.phi0.clone();
    enforce(&mut prev);
    let mut lap = vec![0.0; n];
    laplacian(&prev, &mut lap);
    let f0 = force_at(0.0);
    let mut cur: Vec<f64> = (0..n)
        .map(|i| prev[i] + dt * problem.phi1[i] + 0.5 * dt * dt * (lap[i] + m2 * prev[i] + f0[i]))
        .collect();
    enforce(&mut cur);

    let mut rows = Vec::with_capacity(n_steps + 1);
    rows.push(prev.clone());
    rows.push(cur.clone());
    for step in 1..n_steps {
        let tn = step as f64 * dt;
        laplacian(&cur, &mut lap);
        let fn_ = force_at(tn);
        let damping = (-2.0 * tn).exp();
        let mut next: Vec<f64> = (0..n)
            .map(|i| 2.0 * cur[i] - prev[i] + dt * dt * (damping * lap[i] + m2 * cur[i] + fn_[i]))
            .collect();
        enforce(&mut next);
        rows.push(next.clone());
        prev = cur;
        cur = next;
    }
    let ts = (0..=n_steps).map(|k| k as f64 * dt).collect();
    Ok(FdSolution { xs, ts, dt, rows })
}

#[cfg(test)]
// Frozen reference values are quoted at the precision of the oracle that
// produced them.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn grid_points(n: usize) -> Vec<f64> {
        (0..=n).map(|k| 0.25 * k as f64).collect()
    }

    // Reference values from an independent arbitrary-precision integration.

    #[test]
    fn oracle_matches_reference_values() {
        let problem = ModeProblem {
            mu: -4.0,
            mass: Mass::real(0.25),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        let solution = ode_oracle(&problem, 2.0, 1e-12).unwrap();
        let want = -1.224_801_175_746_997_83;
        assert!((solution.eval(2.0)[0] - want).abs() <= 1e-9);

        let beam = ModeProblem {
            mu: -1.3f64.powi(4),
            mass: Mass::real(0.0),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        let solution = ode_oracle(&beam, 2.0, 1e-12).unwrap();
        let want = -0.756_894_390_234_152_304;
        assert!((solution.eval(2.0)[0] - want).abs() <= 1e-9);
    }

    #[test]
    fn oracle_reproduces_half_mass_closed_forms() {
        // At M = 1/2 and mu = -1 the solutions are elementary in
        // phi(t) = 1 - e^{-t}.
        let ph = |t: f64| -(-t).exp_m1();
        let from_velocity = ModeProblem {
            mu: -1.0,
            mass: Mass::real(0.5),
            c0: 0.0,
            c1: 1.0,
            forcing: None,
        };
        let solution = ode_oracle(&from_velocity, 2.0, 1e-12).unwrap();
        for t in grid_points(8) {
            let want = (0.5 * t).exp() * ph(t).sin();
            assert!(
                (solution.eval(t)[0] - want).abs() <= 1e-9,
                "velocity data at t = {t}"
            );
        }
        let from_displacement = ModeProblem {
            mu: -1.0,
            mass: Mass::real(0.5),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        let solution = ode_oracle(&from_displacement, 2.0, 1e-12).unwrap();
        for t in grid_points(8) {
            let want = (0.5 * t).exp() * (ph(t).cos() - 0.5 * ph(t).sin());
            assert!(
                (solution.eval(t)[0] - want).abs() <= 1e-9,
                "displacement data at t = {t}"
            );
        }
    }

    #[test]
    fn zero_mode_grows_as_cosh() {
        let problem = ModeProblem {
            mu: 0.0,
            mass: Mass::real(1.0),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        let solution = ode_oracle(&problem, 2.0, 1e-12).unwrap();
        for t in grid_points(8) {
            assert!((solution.eval(t)[0] - t.cosh()).abs() <= 1e-9 * t.cosh());
        }
    }

    #[test]
    fn forced_solutions_superpose() {
        let make = |c0: f64, forced: bool| ModeProblem {
            mu: -1.0,
            mass: Mass::real(0.25),
            c0,
            c1: 0.0,
            forcing: forced.then(|| Box::new(|t: f64| (-t).exp()) as Box<dyn Fn(f64) -> f64>),
        };
        let free = ode_oracle(&make(1.0, false), 2.0, 1e-11).unwrap();
        let forced_zero_data = ode_oracle(&make(0.0, true), 2.0, 1e-11).unwrap();
        let forced = ode_oracle(&make(1.0, true), 2.0, 1e-11).unwrap();
        for t in grid_points(8) {
            let lhs = forced.eval(t)[0];
            let rhs = free.eval(t)[0] + forced_zero_data.eval(t)[0];
            assert!((lhs - rhs).abs() <= 1e-8, "superposition at t = {t}");
        }
    }

    #[test]
    fn dense_output_matches_tight_run() {
        let problem = ModeProblem {
            mu: -4.0,
            mass: Mass::curved(Complex64::new(0.0, 0.7)),
            c0: 1.0,
            c1: 0.5,
            forcing: None,
        };
        let coarse = ode_oracle(&problem, 2.0, 1e-10).unwrap();
        let tight = ode_oracle(&problem, 2.0, 1e-13).unwrap();
        for k in 0..=40 {
            let t = 0.05 * k as f64;
            assert!(
                (coarse.eval(t)[0] - tight.eval(t)[0]).abs() <= 1e-7,
                "dense output at t = {t}"
            );
        }
    }

    #[test]
    fn mode_fields_factor_the_data() {
        let problem = ModeProblem {
            mu: -4.0,
            mass: Mass::real(0.0),
            c0: 2.0,
            c1: -1.0,
            forcing: None,
        };
        let (v0, v1) = mode_v(&problem, 0.3);
        assert!((v0 - 2.0 * (2.0 * 0.3f64).cos()).abs() <= 1e-15);
        assert!((v1 + (2.0 * 0.3f64).cos()).abs() <= 1e-15);
        assert_eq!(problem.lambda(), 2.0);
    }

    #[test]
    fn dalembert_of_a_sine_mode_separates() {
        let profile = |x: f64| (std::f64::consts::PI * x).sin();
        for (x, s) in [(0.3, 0.2), (0.7, 0.55), (0.0, 0.4), (1.0, 0.25)] {
            let got = dalembert_v(profile, x, s);
            let want = (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * s).cos();
            assert!((got - want).abs() <= 1e-15, "at x = {x}, s = {s}");
        }
    }

    // The argument reduction in extend_profile costs a few ulp, so these
    // compare with small tolerances rather than exact equality.
    #[test]
    fn periodic_extension_wraps_the_profile() {
        let profile = |x: f64| x * x + 1.0;
        let p = extend_profile(Boundary::Periodic, 1.0, 3.0, profile);
        for x in [1.0, 1.7, 2.9] {
            assert_eq!(p(x), profile(x));
            assert!((p(x + 2.0) - profile(x)).abs() <= 1e-14);
            assert!((p(x - 4.0) - profile(x)).abs() <= 1e-14);
        }
    }

    #[test]
    fn dirichlet_extension_is_odd_about_both_walls() {
        let profile = |x: f64| (x - 1.0) * (3.0 - x) + 0.5;
        let p = extend_profile(Boundary::Dirichlet, 1.0, 3.0, profile);
        for x in [1.3, 2.0, 2.8] {
            assert_eq!(p(x), profile(x));
            // Odd about the left wall, odd about the right wall, period 4.
            assert!((p(2.0 - x) + profile(x)).abs() <= 1e-14);
            assert!((p(6.0 - x) + profile(x)).abs() <= 1e-14);
            assert!((p(x + 4.0) - profile(x)).abs() <= 1e-14);
        }
    }

    #[test]
    fn dirichlet_images_pin_the_walls_of_the_dalembert_field() {
        // The profile need not vanish at the walls; the image terms cancel.
        let profile = |x: f64| (-(x - 0.5) * (x - 0.5) / 0.02).exp();
        let p = extend_profile(Boundary::Dirichlet, 0.0, 1.0, profile);
        for s in [0.1, 0.37, 0.9, 1.6] {
            assert!(dalembert_v(&p, 0.0, s).abs() <= 1e-13);
            assert!(dalembert_v(&p, 1.0, s).abs() <= 1e-13);
        }
    }

    #[test]
    fn flat_grid_solution_follows_cosh() {
        // x-independent data turns the PDE into u'' = u; compare to cosh(t).
        let n_x = 101;
        let problem = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x,
            phi0: vec![1.0; n_x],
            phi1: vec![0.0; n_x],
            forcing: None,
            boundary: Boundary::Periodic,
        };
        let solution = fd_direct_solver(&problem, Mass::real(1.0), 1.0, 0.008).unwrap();
        let want = 1.0f64.cosh();
        for &u in solution.final_row() {
            assert!((u - want).abs() <= 1e-4);
        }
    }

    #[test]
    fn dirichlet_sine_mode_agrees_with_the_mode_oracle() {
        let n_x = 201;
        let (xs, _) = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x,
            phi0: vec![],
            phi1: vec![],
            forcing: None,
            boundary: Boundary::Dirichlet,
        }
        .grid();
        let pi = std::f64::consts::PI;
        let problem = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x,
            phi0: xs.iter().map(|&x| (pi * x).sin()).collect(),
            phi1: vec![0.0; n_x],
            forcing: None,
            boundary: Boundary::Dirichlet,
        };
        let fd = fd_direct_solver(&problem, Mass::real(0.0), 0.5, 0.002).unwrap();
        let mode = ModeProblem {
            mu: -pi * pi,
            mass: Mass::real(0.0),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        let oracle = ode_oracle(&mode, 0.5, 1e-11).unwrap();
        let y = oracle.eval(0.5)[0];
        let mut worst: f64 = 0.0;
        for (i, &x) in fd.xs.iter().enumerate() {
            let want = y * (pi * x).sin();
            worst = worst.max((fd.final_row()[i] - want).abs());
        }
        assert!(worst <= 5e-4, "worst grid deviation {worst}");
        assert_eq!(fd.final_row()[0], 0.0);
        assert_eq!(fd.final_row()[n_x - 1], 0.0);
    }

    #[test]
    fn cfl_violations_are_rejected() {
        let problem = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x: 11,
            phi0: vec![0.0; 11],
            phi1: vec![0.0; 11],
            forcing: None,
            boundary: Boundary::Periodic,
        };
        let result = fd_direct_solver(&problem, Mass::real(0.0), 1.0, 0.5);
        assert!(matches!(result, Err(WaveError::CflViolation { .. })));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        let problem = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x: 2,
            phi0: vec![0.0; 2],
            phi1: vec![0.0; 2],
            forcing: None,
            boundary: Boundary::Periodic,
        };
        assert!(matches!(
            fd_direct_solver(&problem, Mass::real(0.0), 1.0, 0.01),
            Err(WaveError::InvalidGrid(_))
        ));
        let problem = GridProblem1D {
            x_min: 0.0,
            x_max: 1.0,
            n_x: 11,
            phi0: vec![0.0; 4],
            phi1: vec![0.0; 11],
            forcing: None,
            boundary: Boundary::Periodic,
        };
        assert!(matches!(
            fd_direct_solver(&problem, Mass::real(0.0), 1.0, 0.01),
            Err(WaveError::InvalidGrid(_))
        ));
    }

    #[test]
    fn complex_mass_is_rejected_by_real_solvers() {
        let problem = ModeProblem {
            mu: -1.0,
            mass: Mass::curved(Complex64::new(0.3, 0.4)),
            c0: 1.0,
            c1: 0.0,
            forcing: None,
        };
        assert!(matches!(
            ode_oracle(&problem, 1.0, 1e-10),
            Err(WaveError::ComplexMass(_))
        ));
    }
}
