//! Closed-form hyperbolic trigonometry for right-angled polygons.
//!
//! Everything here is a pure function of its arguments. Lengths are plain
//! `f64` values in hyperbolic units. Each public function validates its
//! inputs and reports a [`Error::Domain`] rather than producing NaN.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A strictly positive, finite hyperbolic length.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Length(f64);

impl Length {
    pub fn new(value: f64) -> Result<Self> {
        check_positive("length", value)?;
        Ok(Length(value))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Length {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Length::new(value)
    }
}

impl From<Length> for f64 {
    fn from(l: Length) -> f64 {
        l.0
    }
}

/// An angle in the open interval (0, π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < std::f64::consts::PI) {
            return Err(domain(format!("angle {value} outside (0, pi)")));
        }
        Ok(Angle(value))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

pub(crate) fn check_positive(what: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{what} must be positive and finite, got {value}")))
    }
}

/// `acosh` that keeps full relative precision for arguments close to 1.
pub fn stable_acosh(x: f64) -> f64 {
    if x < 1.0 {
        return f64::NAN;
    }
    let t = x - 1.0;
    if t < 1.0 {
        (t + (t * (t + 2.0)).sqrt()).ln_1p()
    } else {
        x.acosh()
    }
}

/// `asinh` with the small-argument branch routed through `ln_1p`.
pub fn stable_asinh(x: f64) -> f64 {
    let a = x.abs();
    let r = if a < 0.5 {
        let a2 = a * a;
        (a + a2 / (1.0 + (1.0 + a2).sqrt())).ln_1p()
    } else {
        x.abs().asinh()
    };
    r.copysign(x)
}

/// Right-angled hexagon with arc sides `a[k]` and boundary sides `b[k]`.
///
/// Cyclic side order is `a0, b0, a1, b1, a2, b2`; `b[k]` joins `a[k]` to
/// `a[(k + 1) % 3]` and is opposite `a[(k + 2) % 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RightHexagon {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

impl RightHexagon {
    /// Side lengths in cyclic order `a0, b0, a1, b1, a2, b2`.
    pub fn sides(&self) -> [f64; 6] {
        [self.a[0], self.b[0], self.a[1], self.b[1], self.a[2], self.b[2]]
    }

    /// Largest relative residual of the three hexagon relations.
    pub fn residual(&self) -> f64 {
        (0..3)
            .map(|k| {
                let (x, y, z) = (self.a[k], self.a[(k + 1) % 3], self.a[(k + 2) % 3]);
                let lhs = self.b[k].cosh() * x.sinh() * y.sinh();
                let rhs = z.cosh() + x.cosh() * y.cosh();
                ((lhs - rhs) / rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Side γ between `a` and `b`, opposite `c`, of a right-angled hexagon
/// whose alternate sides are `a, b, c`.
pub fn hexagon_boundary_side(a: f64, b: f64, c: f64) -> Result<f64> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    check_positive("c", c)?;
    let arg = (c.cosh() + a.cosh() * b.cosh()) / (a.sinh() * b.sinh());
    if !arg.is_finite() {
        return Err(Error::Numeric(format!(
            "hexagon relation overflowed for ({a}, {b}, {c})"
        )));
    }
    Ok(stable_acosh(arg))
}

pub fn solve_hexagon(a0: f64, a1: f64, a2: f64) -> Result<RightHexagon> {
    let a = [a0, a1, a2];
    let mut b = [0.0; 3];
    for (k, side) in b.iter_mut().enumerate() {
        *side = hexagon_boundary_side(a[k], a[(k + 1) % 3], a[(k + 2) % 3])?;
    }
    Ok(RightHexagon { a, b })
}

/// Acute angle of a trirectangle with sides σ, τ adjacent to it.
pub fn trirectangle_angle(sigma: f64, tau: f64) -> Result<Angle> {
    check_positive("sigma", sigma)?;
    check_positive("tau", tau)?;
    Angle::new((sigma.tanh() * tau.tanh()).acos())
}

/// Length of the perpendicular β of a right-angled octagon.
///
/// The octagon has pairwise disjoint sides `d1..d4` in cyclic order and an
/// orthogonal arc α separating `{d1, d2}` from `{d3, d4}`. β separates
/// `{d4, d1}` from `{d2, d3}`. Evaluated as the composition of three
/// hexagon relations: the two pieces `x`, `x'` that α cuts from the side
/// between `d4` and `d1`, then the hexagon `(β, d4, d1)`.
pub fn octagon_perpendicular(alpha: f64, d1: f64, d2: f64, d3: f64, d4: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("d1", d1), ("d2", d2), ("d3", d3), ("d4", d4)] {
        check_positive(name, v)?;
    }
    let x = hexagon_boundary_side(d1, alpha, d2)?;
    let x_prime = hexagon_boundary_side(d4, alpha, d3)?;
    let cosh_beta = d1.sinh() * d4.sinh() * (x + x_prime).cosh() - d1.cosh() * d4.cosh();
    if !(cosh_beta > 1.0) || !cosh_beta.is_finite() {
        return Err(Error::Numeric(format!(
            "octagon perpendicular has cosh = {cosh_beta}"
        )));
    }
    Ok(stable_acosh(cosh_beta))
}

/// Summand `B(ℓ) = 2 asinh(1 / sinh ℓ)` of the boundary-length identity.
pub fn basmajian_term(len: f64) -> Result<f64> {
    check_positive("length", len)?;
    Ok(2.0 * stable_asinh(1.0 / len.sinh()))
}

fn check_topology(genus: usize, boundary: usize) -> Result<()> {
    if boundary == 0 || 2 * genus + boundary <= 2 {
        return Err(domain(format!(
            "topology (g={genus}, b={boundary}) must have b >= 1 and negative Euler characteristic"
        )));
    }
    Ok(())
}

/// Upper bound on total boundary length of a surface of type (g, b) with
/// orthosystole `t`.
pub fn orthosystole_boundary_bound(t: f64, genus: usize, boundary: usize) -> Result<f64> {
    check_positive("orthosystole", t)?;
    check_topology(genus, boundary)?;
    let coeff = (24 * genus + 12 * boundary - 24) as f64;
    Ok(coeff * stable_asinh(1.0 / (2.0 * (2.0 * t).sinh())))
}

/// Upper bound on the simple orthogeodesic τ from γ to itself on a pair of
/// pants, where α is the longer of the two other boundary components.
pub fn pants_tau_bound(len_alpha: f64, len_gamma: f64) -> Result<f64> {
    check_positive("alpha", len_alpha)?;
    check_positive("gamma", len_gamma)?;
    Ok(2.0 * stable_asinh((len_alpha / 2.0).cosh() / (len_gamma / 4.0).sinh()))
}

/// Width of the standard half-collar around a boundary geodesic.
pub fn half_collar_width(len_gamma: f64) -> Result<f64> {
    check_positive("gamma", len_gamma)?;
    Ok(stable_asinh(1.0 / (len_gamma / 2.0).sinh()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollarKind {
    /// Two closed geodesics.
    Closed,
    /// Two orthogeodesics.
    Ortho,
}

/// Necessary condition for two geodesics (one of them simple) to intersect.
pub fn collar_test(len_alpha: f64, len_beta: f64, kind: CollarKind) -> Result<bool> {
    check_positive("alpha", len_alpha)?;
    check_positive("beta", len_beta)?;
    let product = match kind {
        CollarKind::Closed => (len_alpha / 2.0).sinh() * (len_beta / 2.0).sinh(),
        CollarKind::Ortho => len_alpha.sinh() * len_beta.sinh(),
    };
    Ok(product > 1.0)
}
