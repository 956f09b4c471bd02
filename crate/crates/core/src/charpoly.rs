//! Characteristic polynomials of `F_n` and `G_n`.
//!
//! * Fibonacci family: `p_{n+1}(λ) = λ^{n+1} − λ^n − 1`
//! * Fibonacci-like family: `q_{n+1}(λ) = λ^{n+1} − 2λ^n + λ^{n−1} − ρ
//!   = λ^{n−1}(λ − 1)² − ρ`
//!
//! Both have exactly one real root larger than one, and that root strictly
//! dominates every other root in modulus.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for the dominant-root Newton solve.
pub const DOMINANT_TOL: f64 = 1e-12;
/// Default residual tolerance for the simultaneous all-roots solve.
pub const ROOTS_TOL: f64 = 1e-10;
/// Relative tolerance used to decide `ρ = ρ₀`.
pub const REGIME_REL_TOL: f64 = 1e-9;

const MAX_NEWTON: usize = 200;
const MAX_ABERTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    FibonacciP,
    FibLikeQ { rho: f64 },
}

/// `p_{n+1}` or `q_{n+1}`; degree is always `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPolynomial {
    family: Family,
    n: usize,
}

/// All roots of a characteristic polynomial, dominant root separated out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    pub dominant: f64,
    pub others: Vec<Complex64>,
    /// Largest `|poly(z)|` over every returned root.
    pub residual_bound: f64,
}

impl RootSet {
    /// Dominant root first, then the rest in solver order.
    pub fn all(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(self.dominant, 0.0))
            .chain(self.others.iter().copied())
            .collect()
    }
}

/// Roots with modulus strictly greater than one, and roots too close to the
/// unit circle to call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSpectrum {
    pub members: Vec<Complex64>,
    /// Roots with `||z| − 1| ≤ tol`. They are not counted as members.
    pub boundary: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NoInteriorRoots,
    OneDoubleRoot,
    TwoInteriorRoots,
}

/// Number and location of the real roots of `q_{n+1}` in `(0, λ_max)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootCountReport {
    pub rho_0: f64,
    pub lambda_1: f64,
    pub regime: Regime,
    pub interior_roots: Vec<f64>,
}

impl CharPolynomial {
    pub fn fibonacci(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("operator index n must be ≥ 1".into()));
        }
        Ok(Self { family: Family::FibonacciP, n })
    }

    pub fn fib_like(n: usize, rho: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("operator index n must be ≥ 1".into()));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("rho must be positive and finite, got {rho}")));
        }
        Ok(Self { family: Family::FibLikeQ { rho }, n })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> Option<f64> {
        match self.family {
            Family::FibonacciP => None,
            Family::FibLikeQ { rho } => Some(rho),
        }
    }

    pub fn degree(&self) -> usize {
        self.n + 1
    }

    /// Coefficients in ascending powers, length `degree + 1`.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.n;
        let mut c = vec![0.0; n + 2];
        c[n + 1] = 1.0;
        match self.family {
            Family::FibonacciP => {
                c[n] = -1.0;
                c[0] = -1.0;
            }
            Family::FibLikeQ { rho } => {
                c[n] -= 2.0;
                c[n - 1] += 1.0;
                c[0] -= rho;
            }
        }
        c
    }

    /// Residual scale `(1 + |z|)^{degree}`.
    pub fn scale(&self, z: Complex64) -> f64 {
        (1.0 + z.norm()).powi(self.degree() as i32)
    }

    /// Evaluates the polynomial. For the Fibonacci-like family on the
    /// nonnegative real axis the factored form `λ^{n−1}(λ−1)² − ρ` is used.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z.im == 0.0 && z.re >= 0.0 {
            if let Family::FibLikeQ { .. } = self.family {
                return Complex64::new(self.eval_real(z.re), 0.0);
            }
        }
        self.eval_monomial(z)
    }

    /// Horner evaluation of the expanded coefficients.
    pub fn eval_monomial(&self, z: Complex64) -> Complex64 {
        self.coefficients()
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let n = self.n as i32;
        match self.family {
            Family::FibonacciP => x.powi(n) * (x - 1.0) - 1.0,
            Family::FibLikeQ { rho } => {
                if x >= 0.0 {
                    x.powi(n - 1) * (x - 1.0) * (x - 1.0) - rho
                } else {
                    self.eval_monomial(Complex64::new(x, 0.0)).re
                }
            }
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let n = self.n as i32;
        match self.family {
            Family::FibonacciP => z.powi(n - 1) * ((n + 1) as f64 * z - n as f64),
            Family::FibLikeQ { .. } => {
                // λ^{n−2}[(n+1)λ² − 2nλ + (n−1)], written so n = 1 stays polynomial.
                let np1 = (n + 1) as f64;
                let two_n = 2.0 * n as f64;
                let nm1 = (n - 1) as f64;
                if n >= 2 {
                    z.powi(n - 2) * (np1 * z * z - two_n * z + nm1)
                } else {
                    np1 * z - two_n
                }
            }
        }
    }

    pub fn derivative_real(&self, x: f64) -> f64 {
        self.derivative(Complex64::new(x, 0.0)).re
    }

    /// Rounding-error bound for Horner evaluation at `z`.
    fn eval_error_bound(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let sum = self
            .coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc: f64, &c| acc * r + c.abs());
        8.0 * f64::EPSILON * (self.degree() as f64 + 1.0) * sum
    }

    /// The unique real root larger than one.
    ///
    /// Bracket `[1, b]` with `b` doubled from 2 until the polynomial turns
    /// positive, bisect down to a narrow bracket, then finish with Newton
    /// safeguarded by the bracket.
    pub fn dominant_root(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {tol}")));
        }
        let mut lo = 1.0;
        let mut hi = 2.0;
        while self.eval_real(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Domain("dominant root bracket overflowed".into()));
            }
        }
        for _ in 0..20 {
            let mid = 0.5 * (lo + hi);
            if self.eval_real(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        let mut x = 0.5 * (lo + hi);
        let mut last_change = f64::INFINITY;
        for _ in 0..MAX_NEWTON {
            let fx = self.eval_real(x);
            if fx == 0.0 {
                return Ok(x);
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - fx / self.derivative_real(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            last_change = (next - x).abs();
            x = next;
            if last_change <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
                break;
            }
        }
        let residual = self.eval_real(x).abs();
        let scale = (1.0 + x).powi(self.degree() as i32);
        if residual <= tol * scale {
            Ok(x)
        } else {
            Err(Error::NonConvergence { iterations: MAX_NEWTON, last_change })
        }
    }

    /// All `n + 1` roots by Aberth–Ehrlich simultaneous iteration.
    ///
    /// One starting point is the Newton-refined dominant root; the remaining
    /// ones sit on the circle of radius `max(1, λ_max)` with an irrational
    /// angular offset so that no start is symmetric about the real axis.
    pub fn all_roots(&self, tol: f64) -> Result<RootSet> {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tol must be positive, got {tol}")));
        }
        let dominant = self.dominant_root(DOMINANT_TOL.max(tol.min(1e-6)))?;
        let deg = self.degree();
        let radius = dominant.max(1.0);
        let mut z: Vec<Complex64> = Vec::with_capacity(deg);
        z.push(Complex64::new(dominant, 0.0));
        for j in 1..deg {
            let theta = std::f64::consts::TAU * j as f64 / deg as f64 + 0.4;
            z.push(Complex64::from_polar(radius, theta));
        }

        let mut converged = vec![false; deg];
        converged[0] = true;
        let mut last_change = f64::INFINITY;
        let mut iterations = 0;
        while iterations < MAX_ABERTH && converged.iter().any(|c| !c) {
            iterations += 1;
            last_change = 0.0;
            for k in 0..deg {
                if converged[k] {
                    continue;
                }
                let pk = self.eval_monomial(z[k]);
                if pk.norm() <= self.eval_error_bound(z[k]) {
                    converged[k] = true;
                    continue;
                }
                let ratio = pk / self.derivative(z[k]);
                let repulsion: Complex64 = (0..deg)
                    .filter(|&j| j != k)
                    .map(|j| (z[k] - z[j]).inv())
                    .sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if !w.re.is_finite() || !w.im.is_finite() {
                    continue;
                }
                z[k] -= w;
                let change = w.norm();
                last_change = last_change.max(change);
                if change <= 2.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                    converged[k] = true;
                }
            }
        }

        // Newton polish, accepted only when it lowers the residual.
        for zk in z.iter_mut().skip(1) {
            for _ in 0..3 {
                let f = self.eval_monomial(*zk);
                let d = self.derivative(*zk);
                if d.norm() == 0.0 {
                    break;
                }
                let cand = *zk - f / d;
                if self.eval_monomial(cand).norm() < f.norm() {
                    *zk = cand;
                } else {
                    break;
                }
            }
            // Snap conjugate-free roots onto the real axis.
            if zk.im.abs() <= 1e-13 * (1.0 + zk.norm()) {
                let snapped = Complex64::new(zk.re, 0.0);
                if self.eval_monomial(snapped).norm() <= self.eval_monomial(*zk).norm() * 2.0 {
                    *zk = snapped;
                }
            }
        }

        let mut residual_bound = self.eval_real(dominant).abs();
        for zk in &z[1..] {
            let r = self.eval_monomial(*zk).norm();
            if r > tol * self.scale(*zk) {
                return Err(Error::NonConvergence { iterations, last_change });
            }
            residual_bound = residual_bound.max(r);
        }

        let others: Vec<Complex64> = z[1..].to_vec();
        if let Some(bad) = others.iter().find(|w| w.norm() >= dominant) {
            return Err(Error::Domain(format!(
                "root {bad} is not dominated by λ_max = {dominant}"
            )));
        }
        Ok(RootSet { dominant, others, residual_bound })
    }

    /// Roots with `|z| > 1`; roots within `tol` of the unit circle are
    /// reported separately and never counted as members.
    pub fn point_spectrum(&self, tol: f64) -> Result<PointSpectrum> {
        let roots = self.all_roots(ROOTS_TOL.max(tol.min(1e-6)))?;
        let mut members = Vec::new();
        let mut boundary = Vec::new();
        for z in roots.all() {
            let m = z.norm();
            if (m - 1.0).abs() <= tol {
                boundary.push(z);
            } else if m > 1.0 {
                members.push(z);
            }
        }
        Ok(PointSpectrum { members, boundary })
    }

    /// Real roots of `q_{n+1}` in `(0, λ_max)` as governed by
    /// `ρ₀ = 4 λ₁^{n−1} / (n+1)²`, `λ₁ = (n−1)/(n+1)`.
    pub fn root_count_report(&self, tol: f64) -> Result<RootCountReport> {
        let rho = match self.family {
            Family::FibLikeQ { rho } => rho,
            Family::FibonacciP => {
                return Err(Error::Domain("root count report needs the Fibonacci-like family".into()))
            }
        };
        let n = self.n;
        if n < 2 {
            return Err(Error::Domain(format!("root count report needs n ≥ 2, got {n}")));
        }
        let lambda_1 = (n - 1) as f64 / (n + 1) as f64;
        let rho_0 = 4.0 * lambda_1.powi(n as i32 - 1) / ((n + 1) * (n + 1)) as f64;

        let rel = if tol > 0.0 { tol } else { REGIME_REL_TOL };
        let (regime, interior_roots) = if (rho - rho_0).abs() <= rel * rho_0 {
            (Regime::OneDoubleRoot, vec![lambda_1])
        } else if rho > rho_0 {
            (Regime::NoInteriorRoots, Vec::new())
        } else {
            // q(0) = −ρ < 0, q(λ₁) = ρ₀ − ρ > 0, q(1) = −ρ < 0.
            let left = self.bisect(0.0, lambda_1);
            let right = self.bisect(lambda_1, 1.0);
            (Regime::TwoInteriorRoots, vec![left, right])
        };
        Ok(RootCountReport { rho_0, lambda_1, regime, interior_roots })
    }

    /// Sign-change bisection on `[a, b]` down to adjacent floats.
    fn bisect(&self, mut a: f64, mut b: f64) -> f64 {
        let fa_neg = self.eval_real(a) < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if (self.eval_real(mid) < 0.0) == fa_neg {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }
}
