//! Smooth real functions of one real variable with analytic derivatives up
//! to third order.
//!
//! Every map is an immutable expression tree built from a small set of
//! combinators (polynomials, exponentials, products, powers, compositions).
//! Derivatives are propagated through the tree as truncated Taylor jets, so
//! no numeric differentiation ever enters a construction path; central
//! finite differences exist only as a test oracle via [`fd_consistency`].

use thiserror::Error;

/// Machine epsilon for `f64`.
const EPS: f64 = f64::EPSILON;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("empty domain intersection")]
    EmptyDomain,
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("point {x} outside domain [{lo}, {hi}]")]
    DomainViolation { x: f64, lo: f64, hi: f64 },
    #[error("validation window must be finite and inside the map domain")]
    InvalidWindow,
    #[error("mass profile not strictly positive: M({x}) = {value}")]
    NonPositiveMass { x: f64, value: f64 },
    #[error("coordinate map has a vanishing or sign-changing derivative near x = {x}")]
    VanishingJacobian { x: f64 },
    #[error(
        "quadrature failed to reach tolerance {requested:e} (best estimate {best}, \
         error estimate {error_estimate:e})"
    )]
    QuadratureFailure {
        best: f64,
        requested: f64,
        error_estimate: f64,
    },
}

/// Closed interval of the real line. Either endpoint may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self, FieldError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(FieldError::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Value and first three derivatives of a map at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub fn constant(c: f64) -> Self {
        Jet3 {
            v: c,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        }
    }

    fn add(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
        }
    }

    fn scale(self, c: f64) -> Jet3 {
        Jet3 {
            v: c * self.v,
            d1: c * self.d1,
            d2: c * self.d2,
            d3: c * self.d3,
        }
    }

    // Leibniz rule through third order.
    fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }

    // w = e^u, differentiated via w' = u' w.
    fn exp(self) -> Jet3 {
        let w = self.v.exp();
        let w1 = self.d1 * w;
        let w2 = self.d2 * w + self.d1 * w1;
        let w3 = self.d3 * w + 2.0 * self.d2 * w1 + self.d1 * w2;
        Jet3 {
            v: w,
            d1: w1,
            d2: w2,
            d3: w3,
        }
    }

    // w = u^p by the power rule; the base must be positive unless p is a
    // non-negative integer small enough to stay exact.
    fn powf(self, p: f64) -> Jet3 {
        let u = self.v;
        let (u1, u2, u3) = (self.d1, self.d2, self.d3);
        let wp = u.powf(p);
        let wp1 = p * u.powf(p - 1.0);
        let wp2 = p * (p - 1.0) * u.powf(p - 2.0);
        let wp3 = p * (p - 1.0) * (p - 2.0) * u.powf(p - 3.0);
        Jet3 {
            v: wp,
            d1: wp1 * u1,
            d2: wp2 * u1 * u1 + wp1 * u2,
            d3: wp3 * u1 * u1 * u1 + 3.0 * wp2 * u1 * u2 + wp1 * u3,
        }
    }

    fn sin(self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        let (u1, u2, u3) = (self.d1, self.d2, self.d3);
        Jet3 {
            v: s,
            d1: c * u1,
            d2: c * u2 - s * u1 * u1,
            d3: c * u3 - 3.0 * s * u1 * u2 - c * u1 * u1 * u1,
        }
    }

    // Faà di Bruno through third order: self is the outer jet evaluated at
    // the inner value, `inner` the inner jet.
    fn compose(self, inner: Jet3) -> Jet3 {
        let (f1, f2, f3) = (self.d1, self.d2, self.d3);
        let (g1, g2, g3) = (inner.d1, inner.d2, inner.d3);
        Jet3 {
            v: self.v,
            d1: f1 * g1,
            d2: f2 * g1 * g1 + f1 * g2,
            d3: f3 * g1 * g1 * g1 + 3.0 * f2 * g1 * g2 + f1 * g3,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    /// Coefficients in ascending degree.
    Poly(Vec<f64>),
    Exp(Box<Node>),
    Sin(Box<Node>),
    Power(Box<Node>, f64),
    Add(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Scale(f64, Box<Node>),
    /// outer ∘ inner
    Compose(Box<Node>, Box<Node>),
}

impl Node {
    fn jet(&self, x: f64) -> Jet3 {
        match self {
            Node::Poly(c) => poly_jet(c, x),
            Node::Exp(u) => u.jet(x).exp(),
            Node::Sin(u) => u.jet(x).sin(),
            Node::Power(u, p) => u.jet(x).powf(*p),
            Node::Add(a, b) => a.jet(x).add(b.jet(x)),
            Node::Mul(a, b) => a.jet(x).mul(b.jet(x)),
            Node::Scale(c, u) => u.jet(x).scale(*c),
            Node::Compose(outer, inner) => {
                let gi = inner.jet(x);
                outer.jet(gi.v).compose(gi)
            }
        }
    }
}

fn poly_jet(coeffs: &[f64], x: f64) -> Jet3 {
    if coeffs.is_empty() {
        return Jet3::constant(0.0);
    }
    let n = coeffs.len() - 1;
    let mut pd = [coeffs[n], 0.0, 0.0, 0.0];
    for i in (0..n).rev() {
        pd[3] = pd[3] * x + pd[2];
        pd[2] = pd[2] * x + pd[1];
        pd[1] = pd[1] * x + pd[0];
        pd[0] = pd[0] * x + coeffs[i];
    }
    Jet3 {
        v: pd[0],
        d1: pd[1],
        d2: 2.0 * pd[2],
        d3: 6.0 * pd[3],
    }
}

/// A real function of one real variable carrying analytic derivatives up to
/// third order on an explicit domain.
#[derive(Debug, Clone)]
pub struct SmoothMap1D {
    node: Node,
    domain: Interval,
}

impl SmoothMap1D {
    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Restrict the domain. Fails if `interval` leaves the current domain.
    pub fn with_domain(mut self, interval: Interval) -> Result<Self, FieldError> {
        if !self.domain.contains_interval(&interval) {
            return Err(FieldError::EmptyDomain);
        }
        self.domain = interval;
        Ok(self)
    }

    pub fn jet(&self, x: f64) -> Jet3 {
        self.node.jet(x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.node.jet(x).v
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.node.jet(x).d1
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.node.jet(x).d2
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.node.jet(x).d3
    }

    pub fn constant(c: f64) -> Self {
        SmoothMap1D {
            node: Node::Poly(vec![c]),
            domain: Interval::REAL_LINE,
        }
    }

    /// `a·x + b`
    pub fn affine(a: f64, b: f64) -> Self {
        SmoothMap1D {
            node: Node::Poly(vec![b, a]),
            domain: Interval::REAL_LINE,
        }
    }

    pub fn identity() -> Self {
        Self::affine(1.0, 0.0)
    }

    /// Polynomial with coefficients in ascending degree.
    pub fn poly(coeffs: &[f64]) -> Self {
        SmoothMap1D {
            node: Node::Poly(coeffs.to_vec()),
            domain: Interval::REAL_LINE,
        }
    }

    pub fn sin_map() -> Self {
        SmoothMap1D {
            node: Node::Sin(Box::new(Node::Poly(vec![0.0, 1.0]))),
            domain: Interval::REAL_LINE,
        }
    }

    /// `e^{u(x)}`
    pub fn exp_of(u: SmoothMap1D) -> Self {
        SmoothMap1D {
            node: Node::Exp(Box::new(u.node)),
            domain: u.domain,
        }
    }

    /// `u(x)^p`. The caller is responsible for a positive base on the domain
    /// when `p` is not a non-negative integer.
    pub fn power(u: SmoothMap1D, p: f64) -> Self {
        SmoothMap1D {
            node: Node::Power(Box::new(u.node), p),
            domain: u.domain,
        }
    }

    /// `1/u(x)`
    pub fn recip(u: SmoothMap1D) -> Self {
        Self::power(u, -1.0)
    }

    pub fn scale(c: f64, u: SmoothMap1D) -> Self {
        SmoothMap1D {
            node: Node::Scale(c, Box::new(u.node)),
            domain: u.domain,
        }
    }

    pub fn sum(a: SmoothMap1D, b: SmoothMap1D) -> Result<Self, FieldError> {
        let domain = a
            .domain
            .intersect(&b.domain)
            .ok_or(FieldError::EmptyDomain)?;
        Ok(SmoothMap1D {
            node: Node::Add(Box::new(a.node), Box::new(b.node)),
            domain,
        })
    }

    pub fn product(a: SmoothMap1D, b: SmoothMap1D) -> Result<Self, FieldError> {
        let domain = a
            .domain
            .intersect(&b.domain)
            .ok_or(FieldError::EmptyDomain)?;
        Ok(SmoothMap1D {
            node: Node::Mul(Box::new(a.node), Box::new(b.node)),
            domain,
        })
    }

    /// `outer(inner(x))`. The domain is inherited from `inner`; the caller
    /// is responsible for the range of `inner` lying in the domain of
    /// `outer`.
    pub fn compose(outer: SmoothMap1D, inner: SmoothMap1D) -> Self {
        SmoothMap1D {
            node: Node::Compose(Box::new(outer.node), Box::new(inner.node)),
            domain: inner.domain,
        }
    }
}

/// `e^{a·x + b}` with the exact derivative chain `d1 = a·u`, `d2 = a²·u`,
/// `d3 = a³·u`.
pub fn make_exp_map(a: f64, b: f64) -> SmoothMap1D {
    SmoothMap1D::exp_of(SmoothMap1D::affine(a, b))
}

/// Strictly positive dimensionless mass profile `M(x)`.
///
/// Positivity is validated by a 1024-point scan over a finite window at
/// construction; the window must sit inside the map's domain.
#[derive(Debug, Clone)]
pub struct MassProfile {
    map: SmoothMap1D,
}

impl MassProfile {
    pub fn new(map: SmoothMap1D, window: Interval) -> Result<Self, FieldError> {
        if !window.is_finite() || !map.domain().contains_interval(&window) {
            return Err(FieldError::InvalidWindow);
        }
        for i in 0..1024 {
            let x = window.lo + (window.hi - window.lo) * (i as f64 / 1023.0);
            let value = map.eval(x);
            if value <= 0.0 || !value.is_finite() {
                return Err(FieldError::NonPositiveMass { x, value });
            }
        }
        Ok(MassProfile { map })
    }

    pub fn map(&self) -> &SmoothMap1D {
        &self.map
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.map.eval(x)
    }

    pub fn jet(&self, x: f64) -> Jet3 {
        self.map.jet(x)
    }
}

/// Change-of-variable map `g(x)` with a nowhere-vanishing derivative, so
/// that divisions by `g'` are defined everywhere on the window of interest.
#[derive(Debug, Clone)]
pub struct CoordinateMap {
    map: SmoothMap1D,
}

impl CoordinateMap {
    pub fn new(map: SmoothMap1D, window: Interval) -> Result<Self, FieldError> {
        if !window.is_finite() || !map.domain().contains_interval(&window) {
            return Err(FieldError::InvalidWindow);
        }
        let mut sign = 0.0f64;
        for i in 0..1024 {
            let x = window.lo + (window.hi - window.lo) * (i as f64 / 1023.0);
            let d = map.d1(x);
            if d == 0.0 || !d.is_finite() || (sign != 0.0 && d.signum() != sign) {
                return Err(FieldError::VanishingJacobian { x });
            }
            sign = d.signum();
        }
        Ok(CoordinateMap { map })
    }

    pub fn map(&self) -> &SmoothMap1D {
        &self.map
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.map.eval(x)
    }

    pub fn jet(&self, x: f64) -> Jet3 {
        self.map.jet(x)
    }
}

const QUAD_MAX_DEPTH: u32 = 48;

/// Adaptive-Simpson estimate of `∫_a^b u` with absolute error ≤ `tol`.
///
/// Antisymmetric under swapping the bounds. Non-convergence within the
/// maximum refinement depth reports the best estimate in the error.
pub fn integrate(u: &SmoothMap1D, a: f64, b: f64, tol: f64) -> Result<f64, FieldError> {
    integrate_fn(&|x| u.eval(x), Some(u.domain()), a, b, tol)
}

/// Quadrature backend shared with closures (used for the `Q` and `ΔQ`
/// integrals, which are functions of the transformed variable).
pub(crate) fn integrate_fn(
    f: &dyn Fn(f64) -> f64,
    domain: Option<Interval>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, FieldError> {
    assert!(tol > 0.0, "quadrature tolerance must be positive");
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_fn(f, domain, b, a, tol).map(|v| -v);
    }
    if let Some(dom) = domain {
        if !dom.contains(a) {
            return Err(FieldError::DomainViolation {
                x: a,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
        if !dom.contains(b) {
            return Err(FieldError::DomainViolation {
                x: b,
                lo: dom.lo,
                hi: dom.hi,
            });
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0;
    let mut worst = 0.0f64;
    let value = simpson_step(f, a, b, fa, fm, fb, whole, tol, QUAD_MAX_DEPTH, &mut worst);
    if worst > tol {
        return Err(FieldError::QuadratureFailure {
            best: value,
            requested: tol,
            error_estimate: worst,
        });
    }
    if !value.is_finite() {
        return Err(FieldError::QuadratureFailure {
            best: value,
            requested: tol,
            error_estimate: f64::INFINITY,
        });
    }
    Ok(value)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    worst: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    let right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        if depth == 0 {
            *worst = worst.max(delta.abs() / 15.0);
        }
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

/// Relative deviation between the analytic derivative of `u` and a central
/// finite difference of `eval`, `|analytic − fd| / (1 + |analytic|)`.
///
/// Steps per order: `h₁ = ε^{1/3}(1+|x|)`, `h₂ = ε^{1/4}(1+|x|)`,
/// `h₃ = ε^{1/5}(1+|x|)`, balancing truncation against rounding for each
/// stencil. `x` must be strictly interior so the stencil stays in-domain.
pub fn fd_consistency(u: &SmoothMap1D, x: f64, order: u32) -> f64 {
    let (analytic, fd) = match order {
        1 => {
            let h = EPS.powf(1.0 / 3.0) * (1.0 + x.abs());
            (u.d1(x), (u.eval(x + h) - u.eval(x - h)) / (2.0 * h))
        }
        2 => {
            let h = EPS.powf(0.25) * (1.0 + x.abs());
            (
                u.d2(x),
                (u.eval(x + h) - 2.0 * u.eval(x) + u.eval(x - h)) / (h * h),
            )
        }
        3 => {
            let h = EPS.powf(0.2) * (1.0 + x.abs());
            (
                u.d3(x),
                (u.eval(x + 2.0 * h) - 2.0 * u.eval(x + h) + 2.0 * u.eval(x - h)
                    - u.eval(x - 2.0 * h))
                    / (2.0 * h * h * h),
            )
        }
        _ => panic!("fd_consistency supports derivative orders 1..=3, got {order}"),
    };
    (analytic - fd).abs() / (1.0 + analytic.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exp_map_identity_case() {
        let u = make_exp_map(0.0, 0.0);
        assert_eq!(u.eval(5.0), 1.0);
        assert_eq!(u.d1(5.0), 0.0);
    }

    #[test]
    fn exp_map_decaying() {
        let u = make_exp_map(-1.0, 0.0);
        assert_eq!(u.eval(0.0), 1.0);
        assert_eq!(u.d1(0.0), -1.0);
        assert_eq!(u.d2(0.0), 1.0);
    }

    #[test]
    fn exp_map_third_derivative() {
        let u = make_exp_map(2.0, 0.0);
        let e2 = (2.0f64).exp();
        assert!((u.eval(1.0) - e2).abs() < 1e-12 * e2);
        assert!((u.d3(1.0) - 8.0 * e2).abs() < 1e-12 * 8.0 * e2);
        assert!(fd_consistency(&u, 1.0, 1) < 1e-8);
        assert!(fd_consistency(&u, 1.0, 2) < 1e-6);
        assert!(fd_consistency(&u, 1.0, 3) < 1e-4);
    }

    #[test]
    fn integrate_linear() {
        let u = SmoothMap1D::identity();
        let v = integrate(&u, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn integrate_sine() {
        let u = SmoothMap1D::sin_map();
        let v = integrate(&u, 0.0, std::f64::consts::PI, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrate_reciprocal() {
        let u = SmoothMap1D::recip(SmoothMap1D::identity())
            .with_domain(Interval::new(0.5, 10.0).unwrap())
            .unwrap();
        let v = integrate(&u, 1.0, 2.0, 1e-10).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn integrate_rejects_out_of_domain_bounds() {
        let u = SmoothMap1D::identity()
            .with_domain(Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        assert!(matches!(
            integrate(&u, 0.0, 2.0, 1e-8),
            Err(FieldError::DomainViolation { .. })
        ));
    }

    #[test]
    fn fd_consistency_constant_is_zero() {
        let u = SmoothMap1D::constant(3.25);
        assert_eq!(fd_consistency(&u, 0.7, 1), 0.0);
    }

    #[test]
    fn fd_consistency_exp_second_order() {
        let u = make_exp_map(-1.0, 0.0);
        assert!(fd_consistency(&u, 0.0, 2) <= 1e-6);
    }

    #[test]
    fn fd_consistency_cubic_third_order() {
        let u = SmoothMap1D::poly(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(u.d3(1.0), 6.0);
        assert!(fd_consistency(&u, 1.0, 3) <= 1e-4);
    }

    #[test]
    fn mass_profile_rejects_non_positive() {
        let window = Interval::new(-2.0, 2.0).unwrap();
        assert!(MassProfile::new(SmoothMap1D::identity(), window).is_err());
        assert!(MassProfile::new(make_exp_map(-1.0, 0.0), window).is_ok());
    }

    #[test]
    fn coordinate_map_rejects_turning_points() {
        let window = Interval::new(-1.0, 1.0).unwrap();
        // x² turns at the origin.
        assert!(CoordinateMap::new(SmoothMap1D::poly(&[0.0, 0.0, 1.0]), window).is_err());
        assert!(CoordinateMap::new(make_exp_map(-1.0, 0.0), window).is_ok());
    }

    #[test]
    fn product_of_disjoint_domains_fails_fast() {
        let a = SmoothMap1D::identity()
            .with_domain(Interval::new(0.0, 1.0).unwrap())
            .unwrap();
        let b = SmoothMap1D::identity()
            .with_domain(Interval::new(2.0, 3.0).unwrap())
            .unwrap();
        assert!(matches!(
            SmoothMap1D::product(a, b),
            Err(FieldError::EmptyDomain)
        ));
    }

    #[test]
    fn composition_chain_rule_matches_finite_differences() {
        // e^{-(x² + x/2)} through the compose node.
        let inner = SmoothMap1D::poly(&[0.0, 0.5, 1.0]);
        let outer = make_exp_map(-1.0, 0.0);
        let u = SmoothMap1D::compose(outer, inner);
        for &x in &[-1.3, -0.2, 0.4, 1.7] {
            assert!(fd_consistency(&u, x, 1) < 1e-8, "d1 at {x}");
            assert!(fd_consistency(&u, x, 2) < 1e-6, "d2 at {x}");
            assert!(fd_consistency(&u, x, 3) < 1e-4, "d3 at {x}");
        }
    }

    fn sample_maps() -> Vec<SmoothMap1D> {
        let rational = SmoothMap1D::product(
            SmoothMap1D::poly(&[2.0, 0.0, 1.0]),
            SmoothMap1D::recip(SmoothMap1D::poly(&[1.0, 0.0, 1.0])),
        )
        .unwrap();
        vec![
            make_exp_map(-0.7, 0.2),
            SmoothMap1D::poly(&[1.0, -2.0, 0.5, 0.25]),
            SmoothMap1D::product(make_exp_map(-0.5, 0.0), SmoothMap1D::poly(&[0.0, 1.0, 1.0]))
                .unwrap(),
            SmoothMap1D::power(SmoothMap1D::poly(&[4.0, 0.0, 1.0]), 0.5),
            rational,
        ]
    }

    proptest! {
        #[test]
        fn analytic_derivatives_match_finite_differences(
            x in -3.0f64..3.0,
            idx in 0usize..5,
        ) {
            let u = &sample_maps()[idx];
            prop_assert!(fd_consistency(u, x, 1) <= 1e-5);
            prop_assert!(fd_consistency(u, x, 2) <= 1e-5);
            prop_assert!(fd_consistency(u, x, 3) <= 1e-3);
        }

        #[test]
        fn quadrature_is_additive(
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
            c in -2.0f64..2.0,
        ) {
            let u = SmoothMap1D::product(
                make_exp_map(-0.3, 0.0),
                SmoothMap1D::poly(&[1.0, 0.5, -0.25]),
            ).unwrap();
            let tol = 1e-9;
            let ab = integrate(&u, a, b, tol).unwrap();
            let bc = integrate(&u, b, c, tol).unwrap();
            let ac = integrate(&u, a, c, tol).unwrap();
            prop_assert!((ab + bc - ac).abs() <= 2.0 * tol + 1e-12);
        }

        #[test]
        fn quadrature_is_antisymmetric(a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let u = SmoothMap1D::poly(&[0.3, 1.0, 0.0, 2.0]);
            let fwd = integrate(&u, a, b, 1e-10).unwrap();
            let rev = integrate(&u, b, a, 1e-10).unwrap();
            prop_assert!((fwd + rev).abs() <= 1e-12_f64.max(2e-10 * fwd.abs()));
        }
    }
}
