//! Spectrum classification, eigenvectors, resolvents and transpose checks
//! for `F_n` and `G_n`.
//!
//! For both families the complex plane splits into four disjoint parts:
//!
//! | part       | set                                  |
//! |------------|--------------------------------------|
//! | continuous | `{1}`                                |
//! | residual   | `|λ| ≤ 1, λ ≠ 1`                      |
//! | point      | `|λ| > 1`, characteristic root        |
//! | resolvent  | `|λ| > 1`, not a characteristic root  |
//!
//! Values within `tol` of the unit circle are flagged and, since the residual
//! set is closed, assigned to it.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::charpoly::{PointSpectrum, ROOTS_TOL};
use crate::error::{Error, Result};
use crate::operators::{OperatorKind, OperatorSpec, SeqVector};

/// Default "is a root" tolerance, relative to `(1 + |λ|)^{n+1}`.
pub const ROOT_TOL: f64 = 1e-9;

/// Number of eigenvector coordinates attached to a point-spectrum verdict.
const WITNESS_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralPart {
    Resolvent,
    Point,
    Residual,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    EigenvectorHead(Vec<Complex64>),
    /// `‖(λI − H)x − e₁‖₁` for `x = (λI − H)^{-1} e₁`.
    ResolventResidual(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumVerdict {
    pub lambda: Complex64,
    pub part: SpectralPart,
    pub boundary_flag: bool,
    pub witness: Option<Witness>,
}

/// Closed-form continuation of a sequence past its last stored coordinate.
///
/// Past the anchor the `F` recurrence is geometric with ratio `1/λ`, the `G`
/// recurrence multiplies by `(k−n+1)/(k−n)` as well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRule {
    pub kind: OperatorKind,
    pub n: usize,
    pub lambda: Complex64,
    /// 1-based index of the last stored coordinate; always `> n`.
    pub anchor_index: usize,
    pub anchor: Complex64,
}

impl TailRule {
    /// Coordinate `k ≥ anchor_index`.
    pub fn coord(&self, k: usize) -> Complex64 {
        debug_assert!(k >= self.anchor_index);
        let steps = (k - self.anchor_index) as i32;
        let geometric = self.anchor * self.lambda.powi(-steps);
        match self.kind {
            OperatorKind::F => geometric,
            _ => geometric * ((k - self.n) as f64 / (self.anchor_index - self.n) as f64),
        }
    }

    /// `Σ_{k > anchor_index} x_k`.
    pub fn sum_after(&self) -> Complex64 {
        let lm1 = self.lambda - 1.0;
        match self.kind {
            OperatorKind::F => self.anchor / lm1,
            _ => {
                let m = (self.anchor_index - self.n) as f64;
                self.anchor * (lm1.inv() + self.lambda / (m * lm1 * lm1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenvector {
    pub lambda: Complex64,
    /// First `K` coordinates, `x₁ = 1`.
    pub head: Vec<Complex64>,
    pub tail_rule: TailRule,
    /// Exact `‖x‖₁` from the closed form.
    pub norm1: f64,
}

/// First `K` coordinates of `(λI − H)^{-1} y` with the tail continuation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventSolution {
    pub lambda: Complex64,
    pub head: Vec<Complex64>,
    pub tail_rule: TailRule,
    /// `‖(λI − H)x − y‖₁`, first-row tail summed in closed form.
    pub residual: f64,
}

fn require_f_or_g(spec: &OperatorSpec) -> Result<()> {
    if spec.kind == OperatorKind::Gamma {
        return Err(Error::Domain(
            "Γ_n has an empty resolvent set; classify G_n instead (same point spectrum)".into(),
        ));
    }
    Ok(())
}

/// Assigns `λ` to exactly one part of the spectrum of `F_n` or `G_n`.
pub fn classify(spec: &OperatorSpec, lambda: Complex64, tol: f64) -> Result<SpectrumVerdict> {
    require_f_or_g(spec)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let poly = spec.charpoly();
    let modulus = lambda.norm();
    let near_circle = (modulus - 1.0).abs() <= tol;
    let near_root = poly.eval(lambda).norm() <= tol * poly.scale(lambda);
    let boundary_flag = near_circle || near_root;

    let (part, witness) = if (lambda - 1.0).norm() <= tol {
        (SpectralPart::Continuous, None)
    } else if modulus <= 1.0 || near_circle {
        (SpectralPart::Residual, None)
    } else if near_root {
        let head = eigenvector(spec, lambda, WITNESS_LEN, tol).ok().map(|v| v.head);
        (SpectralPart::Point, head.map(Witness::EigenvectorHead))
    } else {
        let probe = SeqVector::unit(1, 1, 1.0);
        let residual = match spec.kind {
            OperatorKind::F => resolvent_apply_f(spec.n, lambda, &probe, WITNESS_LEN, tol).ok(),
            _ if spec.n >= 2 => {
                resolvent_apply_g(spec.n, spec.rho, lambda, &probe, WITNESS_LEN, tol).ok()
            }
            _ => None,
        };
        (SpectralPart::Resolvent, residual.map(|r| Witness::ResolventResidual(r.residual)))
    };
    Ok(SpectrumVerdict { lambda, part, boundary_flag, witness })
}

/// Point spectrum of `Γ_n`, which coincides with that of `G_n`.
pub fn gamma_point_spectrum(n: usize, rho: f64, tol: f64) -> Result<PointSpectrum> {
    OperatorSpec::gamma(n, rho)?.charpoly().point_spectrum(tol.max(ROOTS_TOL))
}

/// Closed-form eigenvector with `x₁ = 1`:
/// `F`: `x_k = λ^{-(k−1)}`; `G`: `x_k = λ^{-(k−1)}` for `k ≤ n`,
/// `x_k = ρ(k−n) λ^{-(k−1)}` beyond.
pub fn eigenvector(spec: &OperatorSpec, lambda: Complex64, k: usize, tol: f64) -> Result<Eigenvector> {
    require_f_or_g(spec)?;
    let poly = spec.charpoly();
    let residual = poly.eval(lambda).norm();
    if lambda.norm() <= 1.0 || residual > tol * poly.scale(lambda) {
        return Err(Error::NotAnEigenvalue { lambda: lambda.to_string(), residual });
    }
    let n = spec.n;
    let coord = |idx: usize| -> Complex64 {
        let base = lambda.powi(-(idx as i32 - 1));
        match spec.kind {
            OperatorKind::F => base,
            _ if idx <= n => base,
            _ => base * (spec.rho * (idx - n) as f64),
        }
    };
    let head: Vec<Complex64> = (1..=k).map(coord).collect();
    let anchor_index = k.max(n + 1);
    let tail_rule = TailRule {
        kind: spec.kind,
        n,
        lambda,
        anchor_index,
        anchor: coord(anchor_index),
    };
    let r = lambda.norm();
    let norm1 = match spec.kind {
        OperatorKind::F => r / (r - 1.0),
        _ => {
            (r.powi(n as i32) - 1.0) / (r.powi(n as i32 - 1) * (r - 1.0))
                + spec.rho / r.powi(n as i32) * r * r / ((r - 1.0) * (r - 1.0))
        }
    };
    Ok(Eigenvector { lambda, head, tail_rule, norm1 })
}

impl Eigenvector {
    /// `‖(λI − H)x‖₁` over the first `max(K, n+1)` rows, with the first-row
    /// tail summed from the closed form.
    pub fn residual(&self, spec: &OperatorSpec) -> f64 {
        let coords = materialize(&self.head, &self.tail_rule);
        window_residual(spec, self.lambda, &coords, &self.tail_rule, &[])
    }
}

fn materialize(head: &[Complex64], tail: &TailRule) -> Vec<Complex64> {
    let mut coords = head.to_vec();
    for idx in coords.len() + 1..=tail.anchor_index {
        coords.push(tail.coord(idx));
    }
    coords.truncate(tail.anchor_index);
    coords
}

/// `Σ_rows |((λI − H)x − y)_i|` over rows `1..=L`, `L = coords.len()`.
/// Rows past `L` are satisfied by the tail rule by construction.
pub fn window_residual(
    spec: &OperatorSpec,
    lambda: Complex64,
    coords: &[Complex64],
    tail: &TailRule,
    y: &[f64],
) -> f64 {
    let n = spec.n;
    let yk = |k: usize| y.get(k - 1).copied().unwrap_or(0.0);
    let head_sum: Complex64 = coords.iter().skip(n).sum();
    let mut total = (lambda * coords[0] - head_sum - tail.sum_after() - yk(1)).norm();
    for k in 2..=coords.len() {
        let r = lambda * coords[k - 1] - spec.subdiagonal(k - 1) * coords[k - 2] - yk(k);
        total += r.norm();
    }
    total
}

fn check_resolvent_point(poly_value: Complex64, scale: f64, lambda: Complex64, tol: f64) -> Result<()> {
    if lambda.norm() <= 1.0 {
        return Err(Error::OutsideResolventSet(lambda.to_string()));
    }
    if poly_value.norm() <= tol * scale {
        return Err(Error::SingularResolvent(lambda.to_string()));
    }
    Ok(())
}

/// Forward substitution `x_{k+1} = (s_k x_k + y_{k+1}) / λ` from a known `x₁`.
fn forward_substitute(
    spec: &OperatorSpec,
    lambda: Complex64,
    x1: Complex64,
    y: &[f64],
    len: usize,
) -> Vec<Complex64> {
    let inv = lambda.inv();
    let mut x = Vec::with_capacity(len);
    x.push(x1);
    for k in 1..len {
        let yk1 = y.get(k).copied().unwrap_or(0.0);
        let next = (spec.subdiagonal(k) * x[k - 1] + yk1) * inv;
        x.push(next);
    }
    x
}

fn finish_resolvent(
    spec: &OperatorSpec,
    lambda: Complex64,
    x1: Complex64,
    y: &SeqVector,
    k: usize,
) -> ResolventSolution {
    let len = k.max(y.support_len() + 1).max(spec.n + 2);
    let coords = forward_substitute(spec, lambda, x1, &y.coords, len);
    let tail_rule = TailRule {
        kind: spec.kind,
        n: spec.n,
        lambda,
        anchor_index: len,
        anchor: coords[len - 1],
    };
    let residual = window_residual(spec, lambda, &coords, &tail_rule, &y.coords);
    let head = coords[..k].to_vec();
    ResolventSolution { lambda, head, tail_rule, residual }
}

/// `(λI − F_n)^{-1} y` for finitely supported `y`:
///
/// `x₁ = [λ^{n−1}(λ−1) y₁ + y₂ + λ y₃ + … + λ^{n−2} y_n + λ^{n−1} v] / p_{n+1}(λ)`,
/// `v = Σ_{k ≥ n+1} y_k`, then forward substitution.
pub fn resolvent_apply_f(
    n: usize,
    lambda: Complex64,
    y: &SeqVector,
    k: usize,
    tol: f64,
) -> Result<ResolventSolution> {
    let spec = OperatorSpec::f(n)?;
    let poly = spec.charpoly();
    let p = poly.eval(lambda);
    check_resolvent_point(p, poly.scale(lambda), lambda, tol)?;
    let yk = |i: usize| y.coords.get(i - 1).copied().unwrap_or(0.0);

    let pow = |e: i32| lambda.powi(e);
    let v: f64 = y.coords.iter().skip(n).sum();
    let mut numer = pow(n as i32 - 1) * (lambda - 1.0) * yk(1) + pow(n as i32 - 1) * v;
    for j in 2..=n {
        numer += pow(j as i32 - 2) * yk(j);
    }
    Ok(finish_resolvent(&spec, lambda, numer / p, y, k))
}

/// `(λI − G_n)^{-1} y` for finitely supported `y`, `n ≥ 2`:
///
/// `x₁ = [λ^{n−2}(λ−1)² y₁ + ρ Σ_{j=2}^{n} λ^{j−2} y_j + λ^{n−1} y_{n+1}
///        + Σ_{k≥2} ᾱ_{n+k} y_{n+k}] / q_{n+1}(λ)`
///
/// where the series for `ᾱ_{n+k}` sums to `λ^{n−2}(λ − 1 + 1/k)`.
pub fn resolvent_apply_g(
    n: usize,
    rho: f64,
    lambda: Complex64,
    y: &SeqVector,
    k: usize,
    tol: f64,
) -> Result<ResolventSolution> {
    if n < 2 {
        return Err(Error::Domain(format!("the G_n resolvent formula needs n ≥ 2, got {n}")));
    }
    let spec = OperatorSpec::g(n, rho)?;
    let poly = spec.charpoly();
    let q = poly.eval(lambda);
    check_resolvent_point(q, poly.scale(lambda), lambda, tol)?;
    let yk = |i: usize| y.coords.get(i - 1).copied().unwrap_or(0.0);

    let pow = |e: i32| lambda.powi(e);
    let lm1 = lambda - 1.0;
    let mut numer = pow(n as i32 - 2) * lm1 * lm1 * yk(1) + pow(n as i32 - 1) * yk(n + 1);
    for j in 2..=n {
        numer += rho * pow(j as i32 - 2) * yk(j);
    }
    for idx in n + 2..=y.support_len() {
        let kk = (idx - n) as f64;
        numer += alpha_bar(n, lambda, kk) * yk(idx);
    }
    Ok(finish_resolvent(&spec, lambda, numer / q, y, k))
}

/// `ᾱ_{n+k} = λ^{n−2}(λ−1)² α_{n+k}` with
/// `α_{n+k} = 1/λ + Σ_{i≥1} (k+i)/k · λ^{−(i+1)} = 1/(λ−1) + 1/(k(λ−1)²)`.
pub fn alpha_bar(n: usize, lambda: Complex64, k: f64) -> Complex64 {
    lambda.powi(n as i32 - 2) * (lambda - 1.0 + 1.0 / k)
}

fn check_transpose_domain(lambda: Complex64, tol: f64) -> Result<()> {
    if (lambda - 1.0).norm() <= tol {
        return Err(Error::Domain(
            "λ = 1 gives an unbounded transpose sequence; use transpose_eigvec_divergence".into(),
        ));
    }
    if lambda.norm() > 1.0 + tol {
        return Err(Error::Domain(format!("transpose check needs |λ| ≤ 1, got |λ| = {}", lambda.norm())));
    }
    Ok(())
}

/// Candidate eigenvector of the transpose `H^t` on `l^∞` with `x₁ = 1`:
/// `x_{j+1} = (λ x_j − [j ≥ n+1] x₁) / s_j`, `s_j` the subdiagonal of `H`.
pub fn transpose_eigvec(spec: &OperatorSpec, lambda: Complex64, k: usize) -> Result<Vec<Complex64>> {
    require_f_or_g(spec)?;
    let mut x = Vec::with_capacity(k);
    if k == 0 {
        return Ok(x);
    }
    x.push(Complex64::new(1.0, 0.0));
    for j in 1..k {
        let feed = if j > spec.n { 1.0 } else { 0.0 };
        let next = (lambda * x[j - 1] - feed) / spec.subdiagonal(j);
        x.push(next);
    }
    Ok(x)
}

/// Explicit bounds on the transpose candidate for `|λ| ≤ 1, λ ≠ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransposeBound {
    /// `1 + 2/|λ−1|` for `F`, `1/(2ρ) + 2/|λ−1|²` for `G` (covers `x_{n+k}`, `k ≥ 2`).
    pub tail: f64,
    /// Covers every coordinate: for `G` also `x_{n+1} = λⁿ/ρ` and the unit-modulus head.
    pub all: f64,
}

pub fn transpose_bound(spec: &OperatorSpec, lambda: Complex64) -> TransposeBound {
    let d = (lambda - 1.0).norm();
    match spec.kind {
        OperatorKind::F => {
            let b = 1.0 + 2.0 / d;
            TransposeBound { tail: b, all: b }
        }
        _ => {
            let tail = 1.0 / (2.0 * spec.rho) + 2.0 / (d * d);
            TransposeBound { tail, all: tail.max(1.0).max(1.0 / spec.rho) }
        }
    }
}

/// `max_{k ≤ K} |x_k|` of the transpose candidate at `|λ| ≤ 1, λ ≠ 1`.
pub fn transpose_eigvec_bound(spec: &OperatorSpec, lambda: Complex64, k: usize, tol: f64) -> Result<f64> {
    check_transpose_domain(lambda, tol)?;
    Ok(transpose_eigvec(spec, lambda, k)?
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// `max_{k ≤ K} |x_k|` of the transpose candidate at `λ = 1`; grows without bound.
pub fn transpose_eigvec_divergence(spec: &OperatorSpec, k: usize) -> Result<f64> {
    if k < spec.n + 3 {
        return Err(Error::Domain(format!("K must be ≥ n + 3 = {}", spec.n + 3)));
    }
    Ok(transpose_eigvec(spec, Complex64::new(1.0, 0.0), k)?
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max))
}

/// Dense-solve comparison: `max_{i<count} |x_i − x̃_i|` against the solution of
/// the `size × size` section.
pub fn compare_with_dense(
    spec: &OperatorSpec,
    solution: &ResolventSolution,
    y: &SeqVector,
    size: usize,
    count: usize,
) -> Result<f64> {
    let op = crate::operators::TruncatedOperator::build(*spec, size)?;
    let rhs: Vec<Complex64> = y.coords.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let dense = op.solve_shifted(solution.lambda, &rhs)?;
    Ok((0..count.min(solution.head.len()))
        .map(|i| (solution.head[i] - dense[i]).norm())
        .fold(0.0, f64::max))
}

impl ResolventSolution {
    pub fn is_zero(&self) -> bool {
        self.head.iter().all(|v| v.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charpoly::DOMINANT_TOL;

    const PHI: f64 = 1.618033988749895;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classify_examples() {
        let f1 = OperatorSpec::f(1).unwrap();
        assert_eq!(classify(&f1, c(1.0, 0.0), ROOT_TOL).unwrap().part, SpectralPart::Continuous);
        let f3 = OperatorSpec::f(3).unwrap();
        assert_eq!(classify(&f3, c(0.3, -0.4), ROOT_TOL).unwrap().part, SpectralPart::Residual);
        let v = classify(&f1, c(PHI, 0.0), ROOT_TOL).unwrap();
        assert_eq!(v.part, SpectralPart::Point);
        assert!(matches!(v.witness, Some(Witness::EigenvectorHead(_))));
        let g5 = OperatorSpec::g(5, 1.0).unwrap();
        // q₆(3) = 3⁴·2² − 1 = 323
        assert_eq!(g5.charpoly().eval(c(3.0, 0.0)), c(323.0, 0.0));
        let v = classify(&g5, c(3.0, 0.0), ROOT_TOL).unwrap();
        assert_eq!(v.part, SpectralPart::Resolvent);
        match v.witness {
            Some(Witness::ResolventResidual(r)) => assert!(r < 1e-12),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn classify_rejects_gamma() {
        let g = OperatorSpec::gamma(2, 1.0).unwrap();
        assert!(classify(&g, c(2.0, 0.0), ROOT_TOL).is_err());
        let ps = gamma_point_spectrum(5, 1.0, ROOT_TOL).unwrap();
        let dom = OperatorSpec::g(5, 1.0).unwrap().charpoly().dominant_root(DOMINANT_TOL).unwrap();
        assert!(ps.members.iter().any(|z| (z.re - dom).abs() < 1e-12));
    }

    #[test]
    fn unit_circle_is_flagged() {
        let f2 = OperatorSpec::f(2).unwrap();
        let v = classify(&f2, Complex64::from_polar(1.0 + 1e-12, 2.0), ROOT_TOL).unwrap();
        assert!(v.boundary_flag);
        assert_eq!(v.part, SpectralPart::Residual);
    }

    #[test]
    fn eigenvector_f_golden() {
        let f1 = OperatorSpec::f(1).unwrap();
        let v = eigenvector(&f1, c(PHI, 0.0), 5, ROOT_TOL).unwrap();
        for (i, x) in v.head.iter().enumerate() {
            assert!((x.re - PHI.powi(-(i as i32))).abs() < 1e-15);
        }
        assert!(v.residual(&f1) < 1e-12);
    }

    #[test]
    fn eigenvector_g_coordinate_and_norm() {
        let rho = 0.7;
        let g2 = OperatorSpec::g(2, rho).unwrap();
        let lam = g2.charpoly().dominant_root(DOMINANT_TOL).unwrap();
        let v = eigenvector(&g2, c(lam, 0.0), 10, ROOT_TOL).unwrap();
        // k = n + 2 = 4
        assert!((v.head[3].re - 2.0 * rho / lam.powi(3)).abs() < 1e-15);
        assert!(v.residual(&g2) < 1e-10);
        let direct: f64 = (1..4000).map(|k| {
            if k <= 2 { lam.powi(-(k - 1)) } else { rho * (k - 2) as f64 * lam.powi(-(k - 1)) }
        }).sum();
        assert!((v.norm1 - direct).abs() < 1e-10);
    }

    #[test]
    fn eigenvector_f_norm() {
        let f2 = OperatorSpec::f(2).unwrap();
        let lam = f2.charpoly().dominant_root(DOMINANT_TOL).unwrap();
        let v = eigenvector(&f2, c(lam, 0.0), 3, ROOT_TOL).unwrap();
        assert!((v.norm1 - lam / (lam - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn eigenvector_rejects_non_roots() {
        let f2 = OperatorSpec::f(2).unwrap();
        assert!(matches!(
            eigenvector(&f2, c(2.0, 0.0), 5, ROOT_TOL),
            Err(Error::NotAnEigenvalue { .. })
        ));
        // roots inside the unit disk are not eigenvalues on l¹
        let roots = f2.charpoly().all_roots(ROOTS_TOL).unwrap();
        let inner = roots.others[0];
        assert!(inner.norm() < 1.0);
        assert!(eigenvector(&f2, inner, 5, ROOT_TOL).is_err());
    }

    #[test]
    fn resolvent_f_unit_probe() {
        // x₁ = λ^{0}(λ−1)/p₂(2) = 1/1
        let sol = resolvent_apply_f(1, c(2.0, 0.0), &SeqVector::unit(1, 1, 1.0), 4, ROOT_TOL).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125];
        for (x, e) in sol.head.iter().zip(expect) {
            assert!((x - c(e, 0.0)).norm() < 1e-15);
        }
        assert!(sol.residual < 1e-14);
    }

    #[test]
    fn resolvent_zero_input() {
        let zero = SeqVector::new(vec![0.0; 6]);
        assert!(resolvent_apply_f(3, c(1.7, 0.4), &zero, 10, ROOT_TOL).unwrap().is_zero());
        assert!(resolvent_apply_g(3, 0.5, c(1.7, 0.4), &zero, 10, ROOT_TOL).unwrap().is_zero());
    }

    #[test]
    fn resolvent_f_against_dense_solve() {
        let y = SeqVector::unit(4, 4, 1.0);
        let sol = resolvent_apply_f(2, c(2.0, 0.0), &y, 40, ROOT_TOL).unwrap();
        assert!(sol.residual < 1e-10);
        let gap = compare_with_dense(&OperatorSpec::f(2).unwrap(), &sol, &y, 80, 20).unwrap();
        assert!(gap < 1e-12);
    }

    #[test]
    fn resolvent_g_examples() {
        let sol = resolvent_apply_g(2, 1.0, c(2.0, 0.0), &SeqVector::unit(1, 1, 1.0), 30, ROOT_TOL).unwrap();
        assert!((sol.head[0] - c(1.0, 0.0)).norm() < 1e-14);
        let gap = compare_with_dense(&OperatorSpec::g(2, 1.0).unwrap(), &sol, &SeqVector::unit(1, 1, 1.0), 100, 20).unwrap();
        assert!(gap < 1e-10);

        let y = SeqVector::unit(6, 6, 1.0);
        let sol = resolvent_apply_g(3, 0.5, c(1.8, 0.0), &y, 60, ROOT_TOL).unwrap();
        assert!(sol.residual < 1e-9);
        let gap = compare_with_dense(&OperatorSpec::g(3, 0.5).unwrap(), &sol, &y, 100, 20).unwrap();
        assert!(gap < 1e-9);
    }

    #[test]
    fn resolvent_errors() {
        let y = SeqVector::unit(1, 1, 1.0);
        assert!(matches!(
            resolvent_apply_f(1, c(0.5, 0.0), &y, 5, ROOT_TOL),
            Err(Error::OutsideResolventSet(_))
        ));
        assert!(matches!(
            resolvent_apply_f(1, c(PHI, 0.0), &y, 5, ROOT_TOL),
            Err(Error::SingularResolvent(_))
        ));
        assert!(matches!(
            resolvent_apply_g(1, 1.0, c(3.0, 0.0), &y, 5, ROOT_TOL),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transpose_bound_examples() {
        let f2 = OperatorSpec::f(2).unwrap();
        let m = transpose_eigvec_bound(&f2, c(-1.0, 0.0), 50, 1e-9).unwrap();
        assert!(m <= 2.0);

        let f1 = OperatorSpec::f(1).unwrap();
        let m = transpose_eigvec_bound(&f1, c(0.0, 0.0), 50, 1e-9).unwrap();
        assert!(m <= 3.0);
        // λ = 0: x = (1, 0, −1, −1, …)
        let x = transpose_eigvec(&f1, c(0.0, 0.0), 6).unwrap();
        assert_eq!(x.iter().map(|v| v.re).collect::<Vec<_>>(), vec![1.0, 0.0, -1.0, -1.0, -1.0, -1.0]);

        let g2 = OperatorSpec::g(2, 1.0).unwrap();
        let m = transpose_eigvec_bound(&g2, c(0.5, 0.0), 100, 1e-9).unwrap();
        assert!(m <= 8.5);
        assert!(transpose_eigvec_bound(&g2, c(1.0, 0.0), 10, 1e-9).is_err());
        assert!(transpose_eigvec_bound(&g2, c(1.5, 0.0), 10, 1e-9).is_err());
    }

    #[test]
    fn transpose_closed_forms() {
        let lam = c(-0.3, 0.8);
        let n = 3;
        let f = OperatorSpec::f(n).unwrap();
        let x = transpose_eigvec(&f, lam, 40).unwrap();
        for k in n + 1..=40 {
            let closed = lam.powi(k as i32 - 1) - (lam.powi((k - n - 1) as i32) - 1.0) / (lam - 1.0);
            assert!((x[k - 1] - closed).norm() < 1e-12, "k={k}");
        }
        let rho = 0.4;
        let g = OperatorSpec::g(n, rho).unwrap();
        let x = transpose_eigvec(&g, lam, 40).unwrap();
        assert!((x[n] - lam.powi(n as i32) / rho).norm() < 1e-14);
        for kk in 2..=(40 - n) {
            let kf = kk as f64;
            let closed = (lam.powi((n + kk - 1) as i32) / rho
                - (lam.powi(kk as i32) - kf * lam + (kf - 1.0)) / ((lam - 1.0) * (lam - 1.0)))
                / kf;
            assert!((x[n + kk - 1] - closed).norm() < 1e-12, "k={kk}");
        }
    }

    #[test]
    fn transpose_divergence_examples() {
        let f1 = OperatorSpec::f(1).unwrap();
        assert_eq!(transpose_eigvec_divergence(&f1, 103).unwrap(), 100.0);
        let f4 = OperatorSpec::f(4).unwrap();
        let x = transpose_eigvec(&f4, c(1.0, 0.0), 6).unwrap();
        assert_eq!(x[5], c(0.0, 0.0));
        let g2 = OperatorSpec::g(2, 1.0).unwrap();
        let x = transpose_eigvec(&g2, c(1.0, 0.0), 12).unwrap();
        assert!((x[11].norm() - 4.4).abs() < 1e-12);
        assert!(transpose_eigvec_divergence(&g2, 4).is_err());
    }
}
