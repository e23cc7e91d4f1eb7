//! Root finding and contour integration for holomorphic functions.
//!
//! Everything here is model-agnostic: the physics modules hand in closures
//! together with their analytic derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

/// Default residual tolerance for polished roots.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Roots closer than this are treated as the same root.
pub const DEDUP_RADIUS: f64 = 1e-6;
/// Newton iteration budget.
pub const MAX_NEWTON_ITERATIONS: usize = 100;
/// Smallest node count used for argument-principle counts.
pub const MIN_COUNT_NODES: usize = 64;
/// Node count cap for any doubling quadrature.
pub const MAX_QUADRATURE_NODES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("Newton iteration stalled after {iterations} iterations (|f| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanished at {at}")]
    DerivativeVanished { at: Complex64 },
    #[error("|f| = {value:e} on the contour at {at}; move the contour")]
    BoundaryZero { at: Complex64, value: f64 },
    #[error("grid scan found {found} roots, argument principle counts {expected}")]
    CountMismatch { found: usize, expected: usize },
    #[error("argument principle count is negative ({0}); the function has poles inside")]
    NegativeCount(i64),
    #[error("quadrature did not settle within {max_nodes} nodes")]
    QuadratureNoConvergence { max_nodes: usize },
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// A holomorphic function with its derivative.
pub trait Holomorphic {
    fn value(&self, z: Complex64) -> Complex64;
    fn derivative(&self, z: Complex64) -> Complex64;
}

/// Pairs a value closure with a derivative closure.
pub struct Analytic<F, D> {
    pub f: F,
    pub df: D,
}

impl<F, D> Analytic<F, D>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    pub fn new(f: F, df: D) -> Self {
        Self { f, df }
    }
}

impl<F, D> Holomorphic for Analytic<F, D>
where
    F: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    fn value(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
    fn derivative(&self, z: Complex64) -> Complex64 {
        (self.df)(z)
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rectangle {
    pub fn new(lo: Complex64, hi: Complex64) -> Result<Self> {
        if !is_finite(lo) || !is_finite(hi) {
            return Err(NumericsError::NonFinite);
        }
        if hi.re <= lo.re || hi.im <= lo.im {
            return Err(NumericsError::InvalidArgument(
                "rectangle must have lo < hi in both axes",
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn from_bounds(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        Self::new(Complex64::new(re.0, im.0), Complex64::new(re.1, im.1))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }
}

/// Roots found inside a rectangle, with the argument-principle count that
/// certified them.
#[derive(Debug, Clone, PartialEq)]
pub struct RootList {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub winding_count: usize,
}

impl RootList {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Tunables for [`polish_root`] and [`grid_seed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSettings {
    pub tol: f64,
    pub dedup_radius: f64,
    pub max_iterations: usize,
    pub count_nodes: usize,
    pub max_refinements: usize,
}

impl Default for RootSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            dedup_radius: DEDUP_RADIUS,
            max_iterations: MAX_NEWTON_ITERATIONS,
            count_nodes: 256,
            max_refinements: 5,
        }
    }
}

/// Damped Newton iteration from `seed` until `|f| <= tol`.
///
/// The step is halved while it fails to decrease `|f|`.
pub fn polish_root<H: Holomorphic + ?Sized>(f: &H, seed: Complex64, tol: f64) -> Result<Complex64> {
    polish_root_with(f, seed, tol, MAX_NEWTON_ITERATIONS)
}

pub fn polish_root_with<H: Holomorphic + ?Sized>(
    f: &H,
    seed: Complex64,
    tol: f64,
    max_iterations: usize,
) -> Result<Complex64> {
    if !is_finite(seed) || !tol.is_finite() || tol <= 0.0 {
        return Err(NumericsError::NonFinite);
    }
    let mut x = seed;
    let mut fx = f.value(x);
    for _ in 0..max_iterations {
        if !is_finite(fx) {
            return Err(NumericsError::NonFinite);
        }
        if fx.norm() <= tol {
            return Ok(x);
        }
        let d = f.derivative(x);
        if d.norm() == 0.0 || !is_finite(d) {
            return Err(NumericsError::DerivativeVanished { at: x });
        }
        let step = fx / d;
        let mut damping = 1.0;
        loop {
            let trial = x - step * damping;
            let ft = f.value(trial);
            if is_finite(ft) && ft.norm() < fx.norm() {
                x = trial;
                fx = ft;
                break;
            }
            damping *= 0.5;
            if damping < 1e-12 {
                // No descent left: we are sitting on the rounding floor.
                return if fx.norm() <= tol {
                    Ok(x)
                } else {
                    Err(NumericsError::NoConvergence {
                        iterations: max_iterations,
                        residual: fx.norm(),
                    })
                };
            }
        }
    }
    if fx.norm() <= tol {
        Ok(x)
    } else {
        Err(NumericsError::NoConvergence {
            iterations: max_iterations,
            residual: fx.norm(),
        })
    }
}

/// Counts zeros inside `rect` via the trapezoidal rule on `f'/f`.
///
/// The node count doubles from `max(nodes, 64)` until two successive
/// rounded counts agree and the raw value is within 0.25 of an integer.
pub fn count_roots<H: Holomorphic + ?Sized>(
    f: &H,
    rect: &Rectangle,
    nodes: usize,
) -> Result<usize> {
    let mut n = nodes.max(MIN_COUNT_NODES);
    let mut previous: Option<i64> = None;
    while n <= MAX_QUADRATURE_NODES {
        let raw = winding_integral(f, rect, n)?;
        let rounded = raw.round() as i64;
        let settled = (raw - raw.round()).abs() < 0.25;
        if settled && previous == Some(rounded) {
            if rounded < 0 {
                return Err(NumericsError::NegativeCount(rounded));
            }
            return Ok(rounded as usize);
        }
        previous = if settled { Some(rounded) } else { None };
        n *= 2;
    }
    Err(NumericsError::QuadratureNoConvergence {
        max_nodes: MAX_QUADRATURE_NODES,
    })
}

fn winding_integral<H: Holomorphic + ?Sized>(f: &H, rect: &Rectangle, nodes: usize) -> Result<f64> {
    let corners = rect.corners();
    let per_edge = (nodes / 4).max(4);
    let perimeter = 2.0 * (rect.width() + rect.height());
    let mut total = Complex64::new(0.0, 0.0);
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        // Keep the node density uniform around the perimeter.
        let m = ((per_edge as f64 * 4.0 * (b - a).norm() / perimeter).ceil() as usize).max(4);
        let dz = (b - a) / m as f64;
        for j in 0..=m {
            let z = a + dz * j as f64;
            let fz = f.value(z);
            if !is_finite(fz) {
                return Err(NumericsError::NonFinite);
            }
            if fz.norm() <= DEFAULT_TOL {
                return Err(NumericsError::BoundaryZero {
                    at: z,
                    value: fz.norm(),
                });
            }
            let w = if j == 0 || j == m { 0.5 } else { 1.0 };
            total += f.derivative(z) / fz * dz * w;
        }
    }
    let count = total / Complex64::new(0.0, 2.0 * PI);
    Ok(count.re)
}

/// Finds every root inside `rect`.
///
/// Local minima of `|f|` on an `n x n` grid are polished and deduplicated;
/// the result must match the argument-principle count, otherwise the grid
/// is refined.
pub fn grid_seed<H: Holomorphic + ?Sized>(f: &H, rect: &Rectangle, n: usize) -> Result<RootList> {
    grid_seed_with(f, rect, n, &[], &RootSettings::default())
}

/// [`grid_seed`] with extra seeds (tried first) and explicit settings.
pub fn grid_seed_with<H: Holomorphic + ?Sized>(
    f: &H,
    rect: &Rectangle,
    n: usize,
    extra_seeds: &[Complex64],
    settings: &RootSettings,
) -> Result<RootList> {
    if n < 2 {
        return Err(NumericsError::InvalidArgument(
            "grid needs at least 2 points per axis",
        ));
    }
    let expected = count_roots(f, rect, settings.count_nodes)?;
    let mut roots: Vec<Complex64> = Vec::new();
    let absorb = |seed: Complex64, roots: &mut Vec<Complex64>| {
        if let Ok(r) = polish_root_with(f, seed, settings.tol, settings.max_iterations) {
            if rect.contains(r) && !roots.iter().any(|q| (q - r).norm() < settings.dedup_radius) {
                roots.push(r);
            }
        }
    };
    for &s in extra_seeds {
        absorb(s, &mut roots);
    }
    let mut n = n;
    for _ in 0..=settings.max_refinements {
        if roots.len() == expected {
            break;
        }
        let seeds = grid_minima(f, rect, n);
        for &seed in &seeds {
            absorb(seed, &mut roots);
            if roots.len() == expected {
                break;
            }
        }
        // Clustered roots share one grid minimum: deflate the known ones.
        for &seed in extra_seeds.iter().chain(&seeds) {
            if roots.len() == expected {
                break;
            }
            if let Some(r) = deflated_newton(f, seed, &roots, settings) {
                if rect.contains(r) && !roots.iter().any(|q| (q - r).norm() < settings.dedup_radius)
                {
                    roots.push(r);
                }
            }
        }
        n *= 2;
    }
    if roots.len() != expected {
        return Err(NumericsError::CountMismatch {
            found: roots.len(),
            expected,
        });
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let residuals = roots.iter().map(|&r| f.value(r).norm()).collect();
    Ok(RootList {
        roots,
        residuals,
        winding_count: expected,
    })
}

/// Newton on `f(z) / Π(z − r_i)`, then a final polish on `f` itself.
fn deflated_newton<H: Holomorphic + ?Sized>(
    f: &H,
    seed: Complex64,
    known: &[Complex64],
    settings: &RootSettings,
) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..settings.max_iterations {
        let fz = f.value(z);
        if fz.norm() == 0.0 {
            break;
        }
        let log_deriv =
            f.derivative(z) / fz - known.iter().map(|r| (z - r).inv()).sum::<Complex64>();
        if !is_finite(log_deriv) || log_deriv.norm() == 0.0 {
            return None;
        }
        let step = log_deriv.inv();
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    polish_root_with(f, z, settings.tol, settings.max_iterations).ok()
}

fn grid_minima<H: Holomorphic + ?Sized>(f: &H, rect: &Rectangle, n: usize) -> Vec<Complex64> {
    let point = |i: usize, j: usize| {
        Complex64::new(
            rect.lo.re + rect.width() * i as f64 / (n - 1) as f64,
            rect.lo.im + rect.height() * j as f64 / (n - 1) as f64,
        )
    };
    let mut mag = vec![f64::INFINITY; n * n];
    for i in 0..n {
        for j in 0..n {
            let v = f.value(point(i, j)).norm();
            mag[i * n + j] = if v.is_finite() { v } else { f64::INFINITY };
        }
    }
    let mut seeds: Vec<(f64, Complex64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = mag[i * n + j];
            let mut is_min = v.is_finite();
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if mag[ii as usize * n + jj as usize] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                seeds.push((v, point(i, j)));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.into_iter().map(|(_, z)| z).collect()
}

/// Trapezoidal estimate of `(1/2πi) ∮ f(z) (z - center)^moment dz` from
/// samples at `center + radius·e^{2πi n/N}`, `n = 0..N`.
pub fn trapezoid_moment(values: &[Complex64], radius: f64, moment: i32) -> Complex64 {
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        let theta = 2.0 * PI * j as f64 / n as f64;
        let z = Complex64::from_polar(radius, theta);
        acc += v * z.powi(moment + 1);
    }
    acc / n as f64
}

/// `(1/2πi) ∮ f(z) (z - center)^moment dz` on a circle, doubling the node
/// count from `nodes` until successive estimates agree to 1e-12 relative
/// to the integrand scale `max |f| r^{moment+1}`.
pub fn contour_quadrature<F>(
    f: F,
    center: Complex64,
    radius: f64,
    moment: i32,
    nodes: usize,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !is_finite(center) || !radius.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    if radius <= 0.0 || nodes < 4 {
        return Err(NumericsError::InvalidArgument(
            "radius must be positive and nodes >= 4",
        ));
    }
    let sample = |n: usize| -> Result<Vec<Complex64>> {
        (0..n)
            .map(|j| {
                let z = center + Complex64::from_polar(radius, 2.0 * PI * j as f64 / n as f64);
                let v = f(z);
                if is_finite(v) {
                    Ok(v)
                } else {
                    Err(NumericsError::NonFinite)
                }
            })
            .collect()
    };
    let mut n = nodes;
    let mut values = sample(n)?;
    let mut estimate = trapezoid_moment(&values, radius, moment);
    while 2 * n <= MAX_QUADRATURE_NODES {
        n *= 2;
        values = sample(n)?;
        let next = trapezoid_moment(&values, radius, moment);
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max) * radius.powi(moment + 1);
        if (next - estimate).norm() <= 1e-12 * scale.max(next.norm()).max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        estimate = next;
    }
    Err(NumericsError::QuadratureNoConvergence {
        max_nodes: MAX_QUADRATURE_NODES,
    })
}

/// Bisection on a real bracket with a sign change, to full precision.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Result<f64> {
    if !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::NonFinite);
    }
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::InvalidArgument(
            "bisection bracket has no sign change",
        ));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polish_finds_sqrt_two() {
        let f = Analytic::new(|z: Complex64| z * z - 2.0, |z: Complex64| z * 2.0);
        let r = polish_root(&f, c(1.0, 0.1), 1e-14).unwrap();
        assert_abs_diff_eq!(r.re, 2f64.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn polish_rejects_flat_start() {
        let f = Analytic::new(|z: Complex64| z * z + 1.0, |z: Complex64| z * 2.0);
        assert!(matches!(
            polish_root(&f, c(0.0, 0.0), 1e-12),
            Err(NumericsError::DerivativeVanished { .. })
        ));
    }

    #[test]
    fn count_cubic_roots() {
        // z^3 - 1 has three roots on the unit circle.
        let f = Analytic::new(|z: Complex64| z.powi(3) - 1.0, |z: Complex64| z * z * 3.0);
        let rect = Rectangle::from_bounds((-2.0, 2.0), (-2.0, 2.0)).unwrap();
        assert_eq!(count_roots(&f, &rect, 64).unwrap(), 3);
        let half = Rectangle::from_bounds((-2.0, 2.0), (0.1, 2.0)).unwrap();
        assert_eq!(count_roots(&f, &half, 64).unwrap(), 1);
    }

    #[test]
    fn boundary_zero_is_reported() {
        let f = Analytic::new(|z: Complex64| z - 1.0, |_| c(1.0, 0.0));
        let rect = Rectangle::from_bounds((1.0, 2.0), (-1.0, 1.0)).unwrap();
        assert!(matches!(
            count_roots(&f, &rect, 64),
            Err(NumericsError::BoundaryZero { .. })
        ));
    }

    #[test]
    fn grid_seed_matches_count_for_sine() {
        let f = Analytic::new(|z: Complex64| z.sin(), |z: Complex64| z.cos());
        let rect = Rectangle::from_bounds((-0.5, 10.0), (-1.0, 1.3)).unwrap();
        let roots = grid_seed(&f, &rect, 32).unwrap();
        assert_eq!(roots.len(), 4);
        assert_eq!(roots.winding_count, 4);
        for (k, r) in roots.roots.iter().enumerate() {
            assert_abs_diff_eq!(r.re, k as f64 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_seed_separates_close_roots() {
        let f = Analytic::new(
            |z: Complex64| (z - 1.0) * (z - 1.001),
            |z: Complex64| z * 2.0 - 2.001,
        );
        let rect = Rectangle::from_bounds((0.0, 2.0), (-1.0, 1.1)).unwrap();
        let roots = grid_seed(&f, &rect, 16).unwrap();
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn quadrature_recovers_taylor_coefficients() {
        // e^z = Σ z^n/n!, coefficient n is (1/2πi)∮ e^z z^{-n-1} dz.
        for n in 0..8 {
            let got =
                contour_quadrature(|z: Complex64| z.exp(), c(0.0, 0.0), 1.0, -n - 1, 32).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert_abs_diff_eq!(got.re, 1.0 / fact, epsilon = 1e-14);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn quadrature_of_polynomial_vanishes() {
        let p = |z: Complex64| z.powi(6) * 3.0 - z.powi(3) + 2.0;
        for m in 0..4 {
            let got = contour_quadrature(p, c(0.3, -0.2), 1.5, m, 16).unwrap();
            assert!(got.norm() <= 1e-12, "moment {m}: {got}");
        }
    }

    #[test]
    fn bisect_cosine() {
        let r = bisect(|x| x.cos(), 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(r, PI / 2.0, epsilon = 1e-15);
        assert!(bisect(|x| x.cos(), 2.0, 3.0).is_err());
    }
}
