//! Invasion-speed bound for a pathogen with a five-day latency period.
//!
//! The cohort dynamics are the Leslie operator `Γ₅` with
//! `ρ(s) = const · M(s)`, `M` the moment-generating function of the dispersal
//! kernel. The spread rate is bounded by
//!
//! ```text
//! v* = min_{0 < s < ŝ} ln(λ_max(Γ₅(s))) / s
//! ```
//!
//! where `λ_max(Γ₅)` is the largest real root of `q₆(λ) = λ⁴(λ−1)² − ρ`,
//! available in closed form.

use serde::Serialize;

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const PROBES: usize = 64;
const MAX_EXPAND: usize = 400;
const MAX_GOLDEN: usize = 10_000;

/// `λ_max(Γ₅)` from Cardano's formula for `λ³ − λ² − √ρ = 0`:
///
/// `1/3 + 2^{1/3} / (3 C^{1/3}) + C^{1/3} / (3 · 2^{1/3})`,
/// `C = 2 + 27√ρ + √(108√ρ + 729ρ)`.
pub fn lambda_max_gamma5_closed(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be positive and finite, got {rho}")));
    }
    let root_rho = rho.sqrt();
    let c = 2.0 + 27.0 * root_rho + (108.0 * root_rho + 729.0 * rho).sqrt();
    let c3 = c.cbrt();
    let two3 = 2f64.cbrt();
    Ok(1.0 / 3.0 + two3 / (3.0 * c3) + c3 / (3.0 * two3))
}

/// Tabulated moment-generating function with monotone cubic (Fritsch–Carlson)
/// interpolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedKernel {
    s: Vec<f64>,
    m: Vec<f64>,
    tangents: Vec<f64>,
}

impl TabulatedKernel {
    pub fn new(s: Vec<f64>, m: Vec<f64>) -> Result<Self> {
        if s.len() != m.len() || s.len() < 2 {
            return Err(Error::Input("kernel table needs at least two (s, M) rows".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("kernel table s values must be strictly increasing".into()));
        }
        if s[0] < 0.0 || s.iter().chain(&m).any(|v| !v.is_finite()) {
            return Err(Error::Input("kernel table must hold finite values with s ≥ 0".into()));
        }
        if m.iter().any(|&v| v <= 0.0) {
            return Err(Error::Input("kernel table M values must be positive".into()));
        }
        let tangents = pchip_tangents(&s, &m);
        Ok(Self { s, m, tangents })
    }

    /// Two-column `s,M` CSV; a non-numeric first line is taken as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut m = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Input(format!("line {}: expected two columns", lineno + 1)));
            }
            match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    s.push(a);
                    m.push(b);
                }
                _ if s.is_empty() && lineno == 0 => continue,
                _ => return Err(Error::Input(format!("line {}: not a number pair", lineno + 1))),
            }
        }
        Self::new(s, m)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s[0], self.s[self.s.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = match self.s.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(self.s.len() - 2),
        };
        let h = self.s[i + 1] - self.s[i];
        let t = (x - self.s[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Some(
            h00 * self.m[i]
                + h10 * h * self.tangents[i]
                + h01 * self.m[i + 1]
                + h11 * h * self.tangents[i + 1],
        )
    }
}

fn pchip_tangents(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut t = vec![0.0; n];
    t[0] = d[0];
    t[n - 1] = d[n - 2];
    for k in 1..n - 1 {
        if d[k - 1] * d[k] <= 0.0 {
            t[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            t[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Kernel {
    /// `M(s) = exp(σ²s²/2)`, `ŝ = ∞`.
    Gaussian,
    /// `M(s) = 1/(1 − σ²s²)`, `ŝ = 1/σ`.
    Laplace,
    /// Tabulated `M(s)`; `σ` is ignored.
    Custom(TabulatedKernel),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvasionModel {
    pub kernel: Kernel,
    pub sigma: f64,
    /// Multiplier in `ρ(s) = const · M(s)`.
    pub constant: f64,
}

impl InvasionModel {
    pub fn new(kernel: Kernel, sigma: f64, constant: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::Domain(format!("const must be positive, got {constant}")));
        }
        Ok(Self { kernel, sigma, constant })
    }

    pub fn gaussian(sigma: f64, constant: f64) -> Result<Self> {
        Self::new(Kernel::Gaussian, sigma, constant)
    }

    pub fn laplace(sigma: f64, constant: f64) -> Result<Self> {
        Self::new(Kernel::Laplace, sigma, constant)
    }

    /// Open interval of admissible `s`.
    pub fn domain(&self) -> (f64, f64) {
        match &self.kernel {
            Kernel::Gaussian => (0.0, f64::INFINITY),
            Kernel::Laplace => (0.0, 1.0 / self.sigma),
            Kernel::Custom(table) => table.range(),
        }
    }

    /// `ŝ`, the largest `s` for which `M(s)` is defined.
    pub fn s_hat(&self) -> f64 {
        self.domain().1
    }

    pub fn mgf(&self, s: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(s > lo && s < hi) {
            return Err(Error::Domain(format!("s = {s} outside ({lo}, {hi})")));
        }
        let ss = self.sigma * self.sigma * s * s;
        match &self.kernel {
            Kernel::Gaussian => Ok((0.5 * ss).exp()),
            Kernel::Laplace => Ok(1.0 / (1.0 - ss)),
            Kernel::Custom(table) => table
                .eval(s)
                .filter(|v| *v > 0.0)
                .ok_or_else(|| Error::Domain(format!("tabulated M is not positive at s = {s}"))),
        }
    }

    pub fn rho(&self, s: f64) -> Result<f64> {
        Ok(self.constant * self.mgf(s)?)
    }
}

/// `ln(λ_max(Γ₅(ρ(s)))) / s`.
pub fn speed_objective(model: &InvasionModel, s: f64) -> Result<f64> {
    let rho = model.rho(s)?;
    if rho.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(lambda_max_gamma5_closed(rho)?.ln() / s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedResult {
    pub v_star: f64,
    pub s_star: f64,
    pub lambda_at_s: f64,
    /// Objective evaluations spent on bracketing and refinement.
    pub iterations: usize,
    /// Final golden-section bracket.
    pub bracket: (f64, f64),
    /// Lowest objective value among the validation probes.
    pub probe_min: f64,
    pub warnings: Vec<String>,
}

struct Counted<'a> {
    model: &'a InvasionModel,
    calls: usize,
}

impl Counted<'_> {
    fn f(&mut self, s: f64) -> f64 {
        self.calls += 1;
        speed_objective(self.model, s).unwrap_or(f64::INFINITY)
    }
}

/// Minimizes the speed objective: bracket expansion from
/// `s₀ = min(1, ŝ/2)`, golden-section refinement to width `tol`, then a
/// 64-probe scan of the domain to catch a better basin elsewhere.
pub fn minimize_speed(model: &InvasionModel, tol: f64) -> Result<SpeedResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let (lo, hi) = model.domain();
    let mut s0 = 1f64.min(if hi.is_finite() { 0.5 * (lo + hi) } else { 1.0 });
    if s0 <= lo {
        s0 = 0.5 * (lo + hi);
    }
    let mut obj = Counted { model, calls: 0 };
    let (a, c) = expand_bracket(&mut obj, s0, lo, hi)?;
    let (mut bracket, mut s_star) = golden_section(&mut obj, a, c, tol);
    let mut v_star = obj.f(s_star);
    let mut warnings = Vec::new();

    let probe_hi = if hi.is_finite() { hi } else { 4.0 * bracket.1.max(s0) };
    let probes: Vec<(f64, f64)> = (0..PROBES)
        .map(|i| {
            let s = lo + (probe_hi - lo) * (i + 1) as f64 / (PROBES + 1) as f64;
            (s, obj.f(s))
        })
        .collect();
    let (best_idx, &(best_s, best_v)) = probes
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .expect("probes are non-empty");
    let slack = 1e-12 * v_star.abs().max(1e-300);
    if best_v < v_star - slack {
        if best_idx == 0 || best_idx == PROBES - 1 {
            return Err(Error::NoInteriorMinimum { s: best_s, value: best_v, v_star });
        }
        warnings.push(format!(
            "probe at s = {best_s} beat the bracketed minimum {v_star}; refined around it"
        ));
        let (rb, rs) = golden_section(&mut obj, probes[best_idx - 1].0, probes[best_idx + 1].0, tol);
        bracket = rb;
        s_star = rs;
        v_star = obj.f(s_star);
    }
    let probe_min = probes.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let lambda_at_s = lambda_max_gamma5_closed(model.rho(s_star)?)?;
    Ok(SpeedResult {
        v_star,
        s_star,
        lambda_at_s,
        iterations: obj.calls,
        bracket,
        probe_min,
        warnings,
    })
}

/// Returns `(a, c)` with an interior point no worse than either end.
fn expand_bracket(obj: &mut Counted, s0: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let up = |s: f64| if hi.is_finite() { s + 0.5 * (hi - s) } else { 2.0 * s };
    let down = |s: f64| lo + 0.5 * (s - lo);
    let near_edge = |s: f64| {
        s - lo <= 1e-12 * (1.0 + lo.abs()) || (hi.is_finite() && hi - s <= 1e-12 * hi) || s > 1e12
    };

    let f0 = obj.f(s0);
    let su = up(s0);
    let fu = obj.f(su);
    if fu < f0 {
        let (mut a, mut b, mut fb) = (s0, su, fu);
        for _ in 0..MAX_EXPAND {
            let c = up(b);
            let fc = obj.f(c);
            if fc >= fb {
                return Ok((a, c));
            }
            if near_edge(c) {
                return Err(Error::NoInteriorMinimum { s: c, value: fc, v_star: fb });
            }
            (a, b, fb) = (b, c, fc);
        }
    } else {
        let (mut b, mut c, mut fb) = (s0, su, f0);
        for _ in 0..MAX_EXPAND {
            let a = down(b);
            let fa = obj.f(a);
            if fa >= fb {
                return Ok((a, c));
            }
            if near_edge(a) {
                return Err(Error::NoInteriorMinimum { s: a, value: fa, v_star: fb });
            }
            (c, b, fb) = (b, a, fa);
        }
    }
    Err(Error::NonConvergence { iterations: MAX_EXPAND, last_change: f64::NAN })
}

/// Golden-section search on `[a, c]`; returns the final bracket and the
/// better interior point.
fn golden_section(obj: &mut Counted, mut a: f64, mut c: f64, tol: f64) -> ((f64, f64), f64) {
    let mut x1 = c - GOLDEN * (c - a);
    let mut x2 = a + GOLDEN * (c - a);
    let mut f1 = obj.f(x1);
    let mut f2 = obj.f(x2);
    for _ in 0..MAX_GOLDEN {
        if c - a <= tol {
            break;
        }
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - GOLDEN * (c - a);
            f1 = obj.f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (c - a);
            f2 = obj.f(x2);
        }
    }
    let best = if f1 <= f2 { x1 } else { x2 };
    ((a, c), best)
}

/// Uniform scan of `count` points on `(lo, hi]`; returns `(s, value)` of the minimum.
pub fn grid_scan(model: &InvasionModel, lo: f64, hi: f64, count: usize) -> (f64, f64) {
    (1..=count)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / count as f64;
            (s, speed_objective(model, s).unwrap_or(f64::INFINITY))
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((f64::NAN, f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::{CharPolynomial, DOMINANT_TOL};

    fn bisect_q6(rho: f64) -> f64 {
        let f = |x: f64| x.powi(4) * (x - 1.0).powi(2) - rho;
        let (mut a, mut b) = (1.0, 2.0);
        while f(b) < 0.0 {
            b *= 2.0;
        }
        while b - a > 1e-14 * b {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn closed_form_limits_and_oracles() {
        assert!((lambda_max_gamma5_closed(1e-14).unwrap() - 1.0).abs() < 1e-4);
        let one = lambda_max_gamma5_closed(1.0).unwrap();
        assert!((one - bisect_q6(1.0)).abs() < 1e-13);
        let q = CharPolynomial::fib_like(5, 4.0).unwrap();
        let newton = q.dominant_root(DOMINANT_TOL).unwrap();
        assert!((lambda_max_gamma5_closed(4.0).unwrap() - newton).abs() / newton < 1e-10);
        assert!(lambda_max_gamma5_closed(0.0).is_err());
        assert!(lambda_max_gamma5_closed(-1.0).is_err());
    }

    #[test]
    fn objective_examples() {
        let g = InvasionModel::gaussian(1.0, 1.0).unwrap();
        let expect = lambda_max_gamma5_closed(0.5f64.exp()).unwrap().ln();
        assert!((speed_objective(&g, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!(speed_objective(&g, 0.0).is_err());
        assert!(speed_objective(&g, 1e-9).unwrap() > 1e7);

        let l = InvasionModel::laplace(1.0, 1.0).unwrap();
        assert!(speed_objective(&l, 1.0 - 1e-12).unwrap() > speed_objective(&l, 0.9).unwrap());
        assert!(speed_objective(&l, 1.0).is_err());
    }

    #[test]
    fn laplace_minimum_is_interior() {
        let l = InvasionModel::laplace(2.0, 0.5).unwrap();
        let r = minimize_speed(&l, 1e-10).unwrap();
        assert!(r.s_star > 0.0 && r.s_star < 0.5);
        assert!(speed_objective(&l, r.bracket.0).unwrap() >= r.v_star);
        assert!(speed_objective(&l, r.bracket.1).unwrap() >= r.v_star);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn gaussian_matches_grid_scan() {
        let g = InvasionModel::gaussian(1.0, 1.0).unwrap();
        let r = minimize_speed(&g, 1e-10).unwrap();
        let (_, grid_v) = grid_scan(&g, 0.0, 10.0, 10_000);
        assert!((r.v_star - grid_v).abs() < 1e-6);
        assert!(r.v_star <= grid_v + 1e-9);
        let expect = lambda_max_gamma5_closed(g.rho(r.s_star).unwrap()).unwrap().ln() / r.s_star;
        assert_eq!(r.v_star, expect);
    }

    #[test]
    fn small_const_limit() {
        // λ_max − 1 ≈ √ρ, so v(s) ≈ √c · e^{s²/4} / s, minimized at s = √2.
        let c = 1e-8;
        let g = InvasionModel::gaussian(1.0, c).unwrap();
        let r = minimize_speed(&g, 1e-10).unwrap();
        let limit = c.sqrt() * 0.5f64.exp() / 2f64.sqrt();
        assert!(r.v_star > 0.0);
        assert!((r.v_star - limit).abs() / limit < 1e-3);
        assert!((r.s_star - 2f64.sqrt()).abs() < 1e-2);
        let (_, grid_v) = grid_scan(&g, 0.0, 10.0, 10_000);
        assert!(r.v_star <= grid_v + 1e-12);
    }

    #[test]
    fn tabulated_kernel_reproduces_gaussian() {
        let s: Vec<f64> = (0..=400).map(|i| i as f64 * 0.02).collect();
        let m: Vec<f64> = s.iter().map(|x| (0.5 * x * x).exp()).collect();
        let table = TabulatedKernel::new(s, m).unwrap();
        let custom = InvasionModel::new(Kernel::Custom(table), 1.0, 1.0).unwrap();
        let gauss = InvasionModel::gaussian(1.0, 1.0).unwrap();
        let a = minimize_speed(&custom, 1e-9).unwrap();
        let b = minimize_speed(&gauss, 1e-9).unwrap();
        assert!((a.v_star - b.v_star).abs() < 1e-6);
    }

    #[test]
    fn kernel_csv_parsing() {
        let t = TabulatedKernel::from_csv("s,M\n0,1\n0.5,1.2\n1.0,2.0\n").unwrap();
        assert_eq!(t.range(), (0.0, 1.0));
        assert!((t.eval(0.5).unwrap() - 1.2).abs() < 1e-15);
        assert!(TabulatedKernel::from_csv("0,1\n0,2\n").is_err());
        assert!(TabulatedKernel::from_csv("0,1\nfoo,2\n").is_err());
        assert!(TabulatedKernel::from_csv("0,1\n1,-2\n").is_err());
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let t = TabulatedKernel::new(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 1.1, 5.0, 5.01]).unwrap();
        let mut prev = 0.0;
        for i in 0..=300 {
            let v = t.eval(i as f64 * 0.01).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn model_validation() {
        assert!(InvasionModel::gaussian(0.0, 1.0).is_err());
        assert!(InvasionModel::laplace(1.0, -1.0).is_err());
        assert_eq!(InvasionModel::laplace(2.0, 1.0).unwrap().s_hat(), 0.5);
        assert!(InvasionModel::gaussian(1.0, 1.0).unwrap().s_hat().is_infinite());
    }
}
