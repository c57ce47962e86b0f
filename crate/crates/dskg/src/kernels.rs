//! The three hypergeometric kernels E, K0, K1 of the integral transform,
//! their analytic derivatives, and closed-form boundary values.
//!
//! With `s = e^{-b} + e^{-t}` and `d = e^{-b} - e^{-t}`, the kernel E is
//! built from the auxiliary quantities
//!
//! ```text
//! rho   = s^2 - r^2,
//! alpha = 4^{-M} e^{M(b+t)} rho^M,
//! beta  = rho^{-1/2},
//! gamma = (d^2 - r^2) / rho      in [0, 1),
//! ```
//!
//! as `E = alpha beta F(1/2-M, 1/2-M; 1; gamma)` on the admissible wedge
//! `0 <= b <= t`, `0 <= r <= d`. K1 is E at `b = 0`; K0 is `-dE/db` at
//! `b = 0`. All evaluators accept complex mass M and return complex values;
//! when M is real or purely imaginary the exact values are real, and the
//! evaluators assert the imaginary residue is at rounding level before
//! projecting it away.

use crate::hypergeom::{self, HypergeomError};
use crate::jet::Jet2;
use crate::Mass;
use num_complex::Complex64;
use thiserror::Error;

/// Fraction of the [0, phi(t)] range, adjacent to the endpoint, on which
/// kernel_k0 cross-fades from the direct formula (a 0/0 limit at the
/// endpoint itself) to a first-order Taylor expansion around the closed-form
/// endpoint values.
pub const K0_BLEND_EPS: f64 = 1e-4;

/// Absolute slack accepted on admissibility comparisons; arguments violating
/// a constraint by no more than this are clamped onto the boundary, so that
/// inputs rounded to a few decimal places still evaluate.
pub const ADMISSIBILITY_SLACK: f64 = 1e-8;

/// Bound on |Im value| / |Re value| accepted when projecting kernel values
/// that are exactly real (mass real or purely imaginary).
pub const REALNESS_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("inadmissible kernel arguments: {0}")]
    Domain(String),
    #[error(transparent)]
    Hypergeom(#[from] HypergeomError),
}

/// Signal travel bound phi(t) = 1 - e^{-t}, computed without cancellation.
pub fn phi(t: f64) -> f64 {
    -(-t).exp_m1()
}

/// A point (r, t, b) of the admissible wedge r >= 0, 0 <= b <= t,
/// r <= e^{-b} - e^{-t}. The constructor validates the constraints with
/// [`ADMISSIBILITY_SLACK`] and clamps near-boundary values onto the
/// boundary, so the fields always satisfy the constraints exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    r: f64,
    t: f64,
    b: f64,
}

impl KernelPoint {
    pub fn new(r: f64, t: f64, b: f64) -> Result<Self, KernelError> {
        if !(r.is_finite() && t.is_finite() && b.is_finite()) {
            return Err(KernelError::Domain(format!(
                "arguments must be finite, got r = {r}, t = {t}, b = {b}"
            )));
        }
        if b < -ADMISSIBILITY_SLACK {
            return Err(KernelError::Domain(format!("b = {b} is negative")));
        }
        let b = b.max(0.0);
        if t < b - ADMISSIBILITY_SLACK {
            return Err(KernelError::Domain(format!("t = {t} is below b = {b}")));
        }
        let t = t.max(b);
        if r < -ADMISSIBILITY_SLACK {
            return Err(KernelError::Domain(format!("r = {r} is negative")));
        }
        let r = r.max(0.0);
        let d = (-b).exp() - (-t).exp();
        if r > d + ADMISSIBILITY_SLACK {
            return Err(KernelError::Domain(format!(
                "r = {r} exceeds the propagation bound e^-b - e^-t = {d}"
            )));
        }
        let r = r.min(d);
        Ok(KernelPoint { r, t, b })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// The auxiliary quantities alpha, beta, gamma at a kernel point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxValues {
    pub alpha: Complex64,
    pub beta: f64,
    pub gamma: f64,
}

/// First and second r-derivatives and first t-derivatives of the auxiliary
/// quantities. Only alpha's derivatives are complex (through the factor M).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxDerivatives {
    pub alpha_r: Complex64,
    pub alpha_rr: Complex64,
    pub alpha_t: Complex64,
    pub beta_r: f64,
    pub beta_rr: f64,
    pub beta_t: f64,
    pub gamma_r: f64,
    pub gamma_rr: f64,
    pub gamma_t: f64,
}

/// Closed-form derivatives of K0 along the diagonal z = phi(t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K0BoundaryDerivatives {
    pub r_derivative: Complex64,
    pub t_derivative: Complex64,
}

/// Raw kernel geometry at (r, t, b); pure arithmetic, no validation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Geom {
    pub r: f64,
    pub t: f64,
    pub b: f64,
    pub eb: f64,
    pub et: f64,
    pub s: f64,
    pub d: f64,
    pub rho: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Geom {
    pub fn new(r: f64, t: f64, b: f64) -> Self {
        let eb = (-b).exp();
        let et = (-t).exp();
        let s = eb + et;
        let d = eb - et;
        let rho = (s - r) * (s + r);
        let gamma = (d - r) * (d + r) / rho;
        let beta = 1.0 / rho.sqrt();
        Geom {
            r,
            t,
            b,
            eb,
            et,
            s,
            d,
            rho,
            beta,
            gamma,
        }
    }

    /// alpha = 4^{-M} e^{M(b+t)} rho^M in one exponential.
    pub fn alpha(&self, m: Complex64) -> Complex64 {
        (m * (self.b + self.t + (self.rho / 4.0).ln())).exp()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// 2^e for complex e.
fn two_powc(e: Complex64) -> Complex64 {
    (e * std::f64::consts::LN_2).exp()
}

/// base^e for positive real base and complex e.
fn powc(base: f64, e: Complex64) -> Complex64 {
    (e * base.ln()).exp()
}

/// Drop the imaginary part of a value that is real by symmetry whenever the
/// mass is real or purely imaginary. `scale` is the magnitude of the largest
/// intermediate term in the formula that produced `value`; roundoff leaves
/// an imaginary residue proportional to that scale (not to the possibly
/// cancelled final value), so the assertion is measured against it.
fn project_real(value: Complex64, scale: f64, mass: Mass, context: &str) -> Complex64 {
    if !mass.is_real_or_imaginary() {
        return value;
    }
    assert!(
        value.im.abs() <= REALNESS_REL_TOL * value.re.abs().max(scale) + 1e-300,
        "{context}: imaginary residue {:e} on real value {:e} (term scale {:e})",
        value.im,
        value.re,
        scale
    );
    Complex64::new(value.re, 0.0)
}

/// F(1/2-M, 1/2-M; 1; gamma), the series underlying E itself, together with
/// its term-magnitude sum (the rounding yardstick for realness checks).
fn f1(m: Complex64, gamma: f64) -> Result<(Complex64, f64), HypergeomError> {
    let a = c(0.5) - m;
    hypergeom::series_with_magnitude(a, a, c(1.0), gamma)
}

/// F(3/2-M, 3/2-M; 2; gamma), carrying the first gamma-derivative of f1.
fn f2(m: Complex64, gamma: f64) -> Result<(Complex64, f64), HypergeomError> {
    let a = c(1.5) - m;
    hypergeom::series_with_magnitude(a, a, c(2.0), gamma)
}

/// F(5/2-M, 5/2-M; 3; gamma), carrying the second gamma-derivative of f1.
fn f3(m: Complex64, gamma: f64) -> Result<(Complex64, f64), HypergeomError> {
    let a = c(2.5) - m;
    hypergeom::series_with_magnitude(a, a, c(3.0), gamma)
}

/// Auxiliary quantities at an admissible point.
pub fn aux(point: KernelPoint, mass: Mass) -> AuxValues {
    let g = Geom::new(point.r, point.t, point.b);
    AuxValues {
        alpha: g.alpha(mass.value()),
        beta: g.beta,
        gamma: g.gamma,
    }
}

/// Derivatives of the auxiliary quantities at an admissible point.
pub fn aux_derivatives(point: KernelPoint, mass: Mass) -> AuxDerivatives {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let alpha = g.alpha(m);
    let (r, beta, gamma) = (g.r, g.beta, g.gamma);
    let beta2 = beta * beta;
    let r2 = r * r;
    AuxDerivatives {
        alpha_r: -2.0 * m * r * alpha * beta2,
        alpha_rr: -2.0
            * m
            * alpha
            * beta2
            * (c(1.0) - 2.0 * m * (r2 * beta2) + c(2.0 * r2 * beta2)),
        alpha_t: m * alpha - 2.0 * m * g.et * g.s * alpha * beta2,
        beta_r: r * beta2 * beta,
        beta_rr: beta2 * beta * (1.0 + 3.0 * r2 * beta2),
        beta_t: g.et * g.s * beta2 * beta,
        gamma_r: 2.0 * r * beta2 * (gamma - 1.0),
        gamma_rr: 2.0 * beta2 * (1.0 + 4.0 * r2 * beta2) * (gamma - 1.0),
        gamma_t: 2.0 * g.et * beta2 * (g.d + g.s * gamma),
    }
}

/// The kernel E(r, t; 0, b) = alpha beta F(1/2-M,1/2-M;1;gamma).
pub fn kernel_e(point: KernelPoint, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let (f, f_mag) = f1(m, g.gamma)?;
    let prefactor = g.alpha(m) * g.beta;
    let value = prefactor * f;
    Ok(project_real(
        value,
        prefactor.norm() * f_mag,
        mass,
        "kernel_e",
    ))
}

/// Unvalidated E evaluation used by finite-difference and symmetry checks,
/// which probe points a hair outside the admissible wedge (gamma may then be
/// slightly negative; the series continues analytically). No realness
/// projection is applied.
pub(crate) fn kernel_e_raw(r: f64, t: f64, b: f64, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(r, t, b);
    let m = mass.value();
    Ok(g.alpha(m) * g.beta * f1(m, g.gamma)?.0)
}

/// dE/dr = 2(1/2-M) r alpha beta^3 [f1 + (gamma-1)(1/2-M) f2].
pub fn kernel_e_r(point: KernelPoint, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let half_m = c(0.5) - m;
    let (f1v, f1_mag) = f1(m, g.gamma)?;
    let (f2v, f2_mag) = f2(m, g.gamma)?;
    let coeff_b = (g.gamma - 1.0) * half_m;
    let prefactor = 2.0 * g.r * g.beta.powi(3) * g.alpha(m) * half_m;
    let value = prefactor * (f1v + coeff_b * f2v);
    let scale = prefactor.norm() * (f1_mag + coeff_b.norm() * f2_mag);
    Ok(project_real(value, scale, mass, "kernel_e_r"))
}

/// d^2 E/dr^2 as an explicit three-term hypergeometric combination.
pub fn kernel_e_rr(point: KernelPoint, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let half_m = c(0.5) - m;
    let three_half_m = c(1.5) - m;
    let bt = g.b + g.t;
    let s2 = g.s * g.s;
    let r2 = g.r * g.r;
    let coeff_a = two_powc(c(1.0) - 2.0 * m)
        * half_m
        * (m * bt).exp()
        * powc(g.rho, m - 2.5)
        * (c(s2) + (c(2.0) - 2.0 * m) * r2);
    let coeff_b = -two_powc(c(3.0) - 2.0 * m)
        * half_m
        * half_m
        * ((m - 1.0) * bt).exp()
        * powc(g.rho, m - 3.5)
        * (c(s2) + (c(5.0) - 4.0 * m) * r2);
    let coeff_c = two_powc(c(5.0) - 2.0 * m)
        * half_m
        * half_m
        * three_half_m
        * three_half_m
        * ((m - 2.0) * bt).exp()
        * r2
        * powc(g.rho, m - 4.5);
    let (f1v, f1_mag) = f1(m, g.gamma)?;
    let (f2v, f2_mag) = f2(m, g.gamma)?;
    let (f3v, f3_mag) = f3(m, g.gamma)?;
    let value = coeff_a * f1v + coeff_b * f2v + coeff_c * f3v;
    let scale = coeff_a.norm() * f1_mag + coeff_b.norm() * f2_mag + coeff_c.norm() * f3_mag;
    Ok(project_real(value, scale, mass, "kernel_e_rr"))
}

/// The two-term coefficient pair of dE/dt = A f1 + B f2.
fn e_t_coefficients(g: &Geom, m: Complex64) -> (Complex64, Complex64) {
    let half_m = c(0.5) - m;
    let bt = g.b + g.t;
    let coeff_a = two_powc(-2.0 * m)
        * (m * bt).exp()
        * powc(g.rho, m - 1.5)
        * (m * g.rho - (2.0 * m - 1.0) * (g.s * g.et));
    // The printed bracket d s^2 - d r^2 + s d^2 - s r^2 equals
    // rho (d + s gamma); d and s gamma are both nonnegative, so this form
    // adds no cancellation.
    let coeff_b = two_powc(c(1.0) - 2.0 * m)
        * half_m
        * half_m
        * (m * bt).exp()
        * g.et
        * powc(g.rho, m - 1.5)
        * (g.d + g.s * g.gamma);
    (coeff_a, coeff_b)
}

/// dE/dt as an explicit two-term hypergeometric combination.
pub fn kernel_e_t(point: KernelPoint, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let (coeff_a, coeff_b) = e_t_coefficients(&g, m);
    let (f1v, f1_mag) = f1(m, g.gamma)?;
    let (f2v, f2_mag) = f2(m, g.gamma)?;
    let value = coeff_a * f1v + coeff_b * f2v;
    let scale = coeff_a.norm() * f1_mag + coeff_b.norm() * f2_mag;
    Ok(project_real(value, scale, mass, "kernel_e_t"))
}

/// d^2 E/dt^2 as a three-term hypergeometric combination. The f1
/// coefficient and the f3 coefficient are explicit; the f2 coefficient is
/// assembled from the t-derivative of the dE/dt pair via the chain rule,
/// d(f1)/dt = (1/2-M)^2 f2 gamma_t and d(f2)/dt = (3/2-M)^2/2 f3 gamma_t.
pub fn kernel_e_tt(point: KernelPoint, mass: Mass) -> Result<Complex64, KernelError> {
    let g = Geom::new(point.r, point.t, point.b);
    let m = mass.value();
    let half_m = c(0.5) - m;
    let three_half_m = c(1.5) - m;
    let bt = g.b + g.t;
    let (coeff_a, coeff_b) = e_t_coefficients(&g, m);
    let rho_t = -2.0 * g.s * g.et;
    let gamma_t = 2.0 * g.et * g.beta * g.beta * (g.d + g.s * g.gamma);

    let e_bt = (m * bt).exp();
    let coeff_a_t = two_powc(-2.0 * m) * m * m * e_bt * powc(g.rho, m - 0.5)
        - two_powc(-2.0 * m)
            * (2.0 * m - 1.0)
            * e_bt
            * (g.eb * g.et * g.et)
            * powc(g.rho, m - 1.5)
            * (2.0 * m / g.eb - c(2.0 / g.eb) + 2.0 * m / g.et - c(1.0 / g.et))
        + two_powc(c(2.0) - 2.0 * m)
            * (m - 0.5)
            * (m - 1.5)
            * (g.s * g.s)
            * e_bt
            * (g.et * g.et)
            * powc(g.rho, m - 2.5);
    // t-derivative of the f2 coefficient B = 2^{1-2M}(1/2-M)^2 e^{M(b+t)}
    // e^{-t} rho^{M-5/2} G with G = rho (d + s gamma); G_t = 4 e^{-b-2t}.
    let coeff_b_t = coeff_b * ((m - 1.0) + (m - 2.5) * (rho_t / g.rho))
        + two_powc(c(1.0) - 2.0 * m)
            * half_m
            * half_m
            * e_bt
            * g.et
            * powc(g.rho, m - 2.5)
            * (4.0 * g.eb * g.et * g.et);
    let coeff_f2 = coeff_a * gamma_t * half_m * half_m + coeff_b_t;
    let diag = g.r * g.r + g.et * g.et - g.eb * g.eb;
    let coeff_f3 = two_powc(c(3.0) - 2.0 * m)
        * half_m
        * half_m
        * three_half_m
        * three_half_m
        * e_bt
        * (g.et * g.et)
        * powc(g.rho, m - 4.5)
        * (g.eb * g.eb * diag * diag);
    let (f1v, f1_mag) = f1(m, g.gamma)?;
    let (f2v, f2_mag) = f2(m, g.gamma)?;
    let (f3v, f3_mag) = f3(m, g.gamma)?;
    let value = coeff_a_t * f1v + coeff_f2 * f2v + coeff_f3 * f3v;
    let scale = coeff_a_t.norm() * f1_mag + coeff_f2.norm() * f2_mag + coeff_f3.norm() * f3_mag;
    Ok(project_real(value, scale, mass, "kernel_e_tt"))
}

/// The kernel K1(z, t) = E(z, t; 0, 0) weighting the phi1 data.
///
/// Requires t >= 0 and 0 <= z <= phi(t).
pub fn kernel_k1(z: f64, t: f64, mass: Mass) -> Result<Complex64, KernelError> {
    if !(t.is_finite()) || t < -ADMISSIBILITY_SLACK {
        return Err(KernelError::Domain(format!("t = {t} is negative")));
    }
    let point = KernelPoint::new(z, t.max(0.0), 0.0)?;
    kernel_e(point, mass)
}

/// The kernel K0(z, t) = -dE/db (z, t; 0, b)|_{b=0} weighting the phi0 data.
///
/// Requires t > 0 and 0 <= z <= phi(t). The direct two-term formula is a
/// 0/0 limit at z = phi(t); on the last K0_BLEND_EPS fraction of the range
/// the evaluation cross-fades (cubic smoothstep) to the first-order Taylor
/// expansion around the closed-form endpoint values, which bounds the
/// cancellation error uniformly in z.
pub fn kernel_k0(z: f64, t: f64, mass: Mass) -> Result<Complex64, KernelError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(KernelError::Domain(format!(
            "K0 requires t > 0, got t = {t}"
        )));
    }
    let ph = phi(t);
    if !z.is_finite() || z < -ADMISSIBILITY_SLACK || z > ph + ADMISSIBILITY_SLACK {
        return Err(KernelError::Domain(format!(
            "z = {z} outside [0, phi(t) = {ph}]"
        )));
    }
    let z = z.clamp(0.0, ph);
    let m = mass.value();
    let split = (1.0 - K0_BLEND_EPS) * ph;
    let (value, scale) = if z <= split {
        k0_direct_scaled(z, t, m)?
    } else {
        let u = ((z - split) / (ph - split)).clamp(0.0, 1.0);
        let w = u * u * (3.0 - 2.0 * u);
        let endpoint = k0_endpoint_value(t, m);
        let endpoint_r = k0_r_endpoint_value(t, m);
        let taylor = endpoint + (z - ph) * endpoint_r;
        let taylor_scale = endpoint.norm() + (ph - z) * endpoint_r.norm();
        if w >= 1.0 {
            (taylor, taylor_scale)
        } else {
            let (direct, direct_scale) = k0_direct_scaled(z, t, m)?;
            (
                (1.0 - w) * direct + w * taylor,
                (1.0 - w) * direct_scale + w * taylor_scale,
            )
        }
    };
    Ok(project_real(value, scale, mass, "kernel_k0"))
}

/// Direct two-term evaluation of K0; 0/0 at z = phi(t).
pub(crate) fn k0_direct(z: f64, t: f64, m: Complex64) -> Result<Complex64, KernelError> {
    Ok(k0_direct_scaled(z, t, m)?.0)
}

/// Direct K0 evaluation together with the magnitude of its two summands
/// before cancellation, 1/num |term1 + term2| <= |pre| (|term1| + |term2|).
fn k0_direct_scaled(z: f64, t: f64, m: Complex64) -> Result<(Complex64, f64), KernelError> {
    let et = (-t).exp();
    let ph = phi(t); // 1 - e^{-t}
    let rho0 = (1.0 + et - z) * (1.0 + et + z);
    let num = (ph - z) * (ph + z); // (1-e^{-t})^2 - z^2 = rho0 gamma0
    let gamma0 = num / rho0;
    let pre = (m * (t + (rho0 / 4.0).ln())).exp() / (num * rho0.sqrt());
    let a = c(0.5) - m;
    let coeff1 = c(et - 1.0) + m * (et * et - 1.0 - z * z);
    let coeff2 = c(1.0 - et * et + z * z) * (c(0.5) + m);
    let (fa, fa_mag) = hypergeom::series_with_magnitude(a, a, c(1.0), gamma0)?;
    let (fb, fb_mag) = hypergeom::series_with_magnitude(-c(0.5) - m, a, c(1.0), gamma0)?;
    let scale = pre.norm() * (coeff1.norm() * fa_mag + coeff2.norm() * fb_mag);
    Ok((pre * (coeff1 * fa + coeff2 * fb), scale))
}

/// K0(phi(t), t) in closed form.
pub(crate) fn k0_endpoint_value(t: f64, m: Complex64) -> Complex64 {
    let m2 = m * m;
    let e1 = (0.5 * t).exp();
    let e3 = (1.5 * t).exp();
    -0.25 * m2 * e1 + 0.25 * m2 * e3 - c(3.0 / 16.0 * e1) - c(1.0 / 16.0 * e3)
}

/// dK0/dz (phi(t), t) in closed form.
pub(crate) fn k0_r_endpoint_value(t: f64, m: Complex64) -> Complex64 {
    let m2 = m * m;
    let m4 = m2 * m2;
    let e1 = (0.5 * t).exp();
    let e3 = (1.5 * t).exp();
    let e5 = (2.5 * t).exp();
    m4 * (-e1 / 16.0 + e3 / 8.0 - e5 / 16.0)
        + m2 * (-7.0 / 32.0 * e1 + e3 / 16.0 + 5.0 / 32.0 * e5)
        + c(15.0 / 256.0 * e1 - 3.0 / 128.0 * e3 - 9.0 / 256.0 * e5)
}

/// dK0/dt (phi(t), t) in closed form (partial derivative in the second
/// slot, z held fixed).
pub(crate) fn k0_t_endpoint_value(t: f64, m: Complex64) -> Complex64 {
    let m2 = m * m;
    let m4 = m2 * m2;
    let em1 = (-0.5 * t).exp();
    let e1 = (0.5 * t).exp();
    let e3 = (1.5 * t).exp();
    m4 * (em1 / 16.0 - e1 / 8.0 + e3 / 16.0)
        + m2 * (7.0 / 32.0 * em1 - 3.0 / 16.0 * e1 + 7.0 / 32.0 * e3)
        + c(-15.0 / 256.0 * em1 - 9.0 / 128.0 * e1 - 15.0 / 256.0 * e3)
}

/// Closed-form z- and t-derivatives of K0 along the diagonal z = phi(t).
pub fn kernel_k0_boundary_derivatives(
    t: f64,
    mass: Mass,
) -> Result<K0BoundaryDerivatives, KernelError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(KernelError::Domain(format!(
            "K0 requires t > 0, got t = {t}"
        )));
    }
    let m = mass.value();
    let r_derivative = k0_r_endpoint_value(t, m);
    let t_derivative = k0_t_endpoint_value(t, m);
    Ok(K0BoundaryDerivatives {
        r_derivative: project_real(r_derivative, r_derivative.norm(), mass, "k0 r_derivative"),
        t_derivative: project_real(t_derivative, t_derivative.norm(), mass, "k0 t_derivative"),
    })
}

/// K0 in a cancellation-free "regular" form, -(A f1 + B (1/2-M)^2 f2) with
/// bounded coefficients, evaluated on second-order jets. Seeding `z` or `t`
/// as the jet variable yields first and second partial derivatives of K0,
/// which the verification suites use to test the wave equation for K0
/// without hand-written derivative formulas.
pub(crate) fn k0_regular_jet(z: Jet2, t: Jet2, mass: Mass) -> Result<Jet2, KernelError> {
    let m = mass.value();
    let one = Jet2::constant(1.0);
    let et = (-t).exp();
    let opet = one + et;
    let omet = one - et;
    let rho0 = opet * opet - z * z;
    let gamma0 = (omet * omet - z * z) / rho0;
    // a0 = 4^{-M} e^{M t} rho0^M
    let a0 = ((t + rho0.scale(c(0.25)).ln()).scale(m)).exp();
    let b0 = rho0.powc(c(-0.5));
    let b0sq = b0 * b0;
    let half_m = c(0.5) - m;
    let coeff_a = a0 * b0 * (Jet2::constant_c(m) + (opet * b0sq).scale(c(1.0) - 2.0 * m));
    let coeff_b = (a0 * b0 * b0sq * ((et - one) + opet * gamma0)).scale(c(2.0));
    let a1 = half_m;
    let f1 = f_jet(a1, a1, c(1.0), gamma0)?;
    let a2 = c(1.5) - m;
    let f2 = f_jet(a2, a2, c(2.0), gamma0)?;
    Ok(-(coeff_a * f1 + (coeff_b * f2).scale(half_m * half_m)))
}

/// Compose the hypergeometric series with a jet argument: F(g), F'(g) g',
/// F''(g) g'^2 + F'(g) g''. The geometry jets feeding this carry exactly
/// zero imaginary parts, so the series argument is g.v.re.
fn f_jet(a: Complex64, b: Complex64, cc: Complex64, g: Jet2) -> Result<Jet2, KernelError> {
    debug_assert_eq!(g.v.im, 0.0);
    let z = g.v.re;
    let f0 = hypergeom::series(a, b, cc, z)?;
    let ratio = a * b / cc;
    let d1 = ratio * hypergeom::series(a + 1.0, b + 1.0, cc + 1.0, z)?;
    let d2 = ratio
        * ((a + 1.0) * (b + 1.0) / (cc + 1.0))
        * hypergeom::series(a + 2.0, b + 2.0, cc + 2.0, z)?;
    Ok(Jet2 {
        v: f0,
        d: d1 * g.d,
        dd: d2 * g.d * g.d + d1 * g.dd,
    })
}
