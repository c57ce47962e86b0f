//! Integral-transform solver and verifier for the Klein-Gordon equation on a
//! de Sitter background,
//!
//! ```text
//! u_tt - e^{-2t} A(x, d/dx) u - M^2 u = f,    u(x,0) = phi0,   u_t(x,0) = phi1,
//! ```
//!
//! where A is a spatial operator of arbitrary order and M a complex constant
//! (the effective mass). The solution is represented exactly as integrals of
//! solutions of the undamped problem `v_tt - A v = 0` against three
//! hypergeometric kernels:
//!
//! * [`hypergeom`] evaluates the Gauss series the kernels are built from;
//! * [`kernels`] evaluates the kernels E, K0, K1, their analytic derivatives,
//!   and their closed-form boundary values;
//! * [`transform`] performs the kernel integrals by adaptive quadrature;
//! * [`wave`] produces undamped input solutions plus independent reference
//!   solutions (an adaptive ODE integrator and a leapfrog grid solver);
//! * [`verify`] bundles the kernel identities and oracle comparisons into
//!   runnable pass/fail suites.

pub mod hypergeom;
mod jet;
pub mod kernels;
pub mod transform;
pub mod verify;
pub mod wave;

use num_complex::Complex64;

/// Records which form of the mass term the caller supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassConvention {
    /// M entered directly; the zeroth-order term of the equation is -M^2 u.
    ImaginaryMass,
    /// A physical mass m entered as M = -i m, flipping the term to +m^2 u.
    RealMass,
}

/// The (complex) effective mass M of the damped wave equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mass {
    value: Complex64,
    convention: MassConvention,
}

impl Mass {
    /// Mass given directly in the -M^2 convention.
    ///
    /// Panics if `value` is not finite.
    pub fn curved(value: Complex64) -> Self {
        assert!(
            value.re.is_finite() && value.im.is_finite(),
            "mass must be finite, got {value}"
        );
        Mass {
            value,
            convention: MassConvention::ImaginaryMass,
        }
    }

    /// Real mass in the -M^2 convention.
    pub fn real(m: f64) -> Self {
        Mass::curved(Complex64::new(m, 0.0))
    }

    /// Physical mass m of the +m^2 form of the equation, stored as M = -i m.
    pub fn physical(m: f64) -> Self {
        assert!(m.is_finite(), "mass must be finite, got {m}");
        Mass {
            value: Complex64::new(0.0, -m),
            convention: MassConvention::RealMass,
        }
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn convention(&self) -> MassConvention {
        self.convention
    }

    /// True when M is real or purely imaginary, which makes M^2 real and all
    /// kernel values real on admissible real arguments.
    pub fn is_real_or_imaginary(&self) -> bool {
        self.value.im == 0.0 || self.value.re == 0.0
    }
}
