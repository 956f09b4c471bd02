//! Finite sections of `F_n`, `G_n` and `Γ_n`.
//!
//! All three share the same skeleton: a first row that sums the tail from
//! column `n + 1` onward, and a subdiagonal that shifts coordinates down.
//!
//! ```text
//! F_n : first row 1, 1, 1, …        subdiagonal 1, 1, 1, …
//! Γ_n : first row ρ, 2ρ, 3ρ, …      subdiagonal 1, 1, 1, …
//! G_n : first row 1, 1, 1, …        subdiagonal 1, …, 1, ρ, 2, 3/2, 4/3, …
//! ```
//!
//! A truncation is only trusted where the cut cannot reach: operations refuse
//! inputs whose support touches the last row/column instead of silently
//! returning a clipped answer.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::charpoly::CharPolynomial;
use crate::error::{Error, Result};
use crate::sequences;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OperatorKind {
    F,
    G,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub n: usize,
    /// Ignored for `F`.
    pub rho: f64,
}

impl OperatorSpec {
    pub fn f(n: usize) -> Result<Self> {
        Self::new(OperatorKind::F, n, None)
    }

    pub fn g(n: usize, rho: f64) -> Result<Self> {
        Self::new(OperatorKind::G, n, Some(rho))
    }

    pub fn gamma(n: usize, rho: f64) -> Result<Self> {
        Self::new(OperatorKind::Gamma, n, Some(rho))
    }

    pub fn new(kind: OperatorKind, n: usize, rho: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("operator index n must be ≥ 1".into()));
        }
        let rho = match (kind, rho) {
            (OperatorKind::F, _) => 1.0,
            (_, Some(r)) if r > 0.0 && r.is_finite() => r,
            (_, Some(r)) => return Err(Error::Domain(format!("rho must be positive, got {r}"))),
            (_, None) => return Err(Error::Domain("rho is required for G and Γ".into())),
        };
        Ok(Self { kind, n, rho })
    }

    /// `p_{n+1}` for `F`, `q_{n+1}` for `G` and `Γ` (same point spectrum).
    pub fn charpoly(&self) -> CharPolynomial {
        match self.kind {
            OperatorKind::F => CharPolynomial::fibonacci(self.n),
            OperatorKind::G | OperatorKind::Gamma => CharPolynomial::fib_like(self.n, self.rho),
        }
        .expect("spec invariants already checked")
    }

    /// Entry `(1, j)`, 1-based.
    pub fn first_row(&self, j: usize) -> f64 {
        if j <= self.n {
            return 0.0;
        }
        match self.kind {
            OperatorKind::F | OperatorKind::G => 1.0,
            OperatorKind::Gamma => self.rho * (j - self.n) as f64,
        }
    }

    /// Entry `(k + 1, k)`, 1-based.
    pub fn subdiagonal(&self, k: usize) -> f64 {
        match self.kind {
            OperatorKind::F | OperatorKind::Gamma => 1.0,
            OperatorKind::G => {
                if k < self.n {
                    1.0
                } else if k == self.n {
                    self.rho
                } else {
                    (k - self.n + 1) as f64 / (k - self.n) as f64
                }
            }
        }
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == 1 {
            self.first_row(j)
        } else if i == j + 1 {
            self.subdiagonal(j)
        } else {
            0.0
        }
    }

    /// Entry `(i, j)` as an exact rational; `ρ` is taken at its exact binary value.
    pub fn entry_exact(&self, i: usize, j: usize) -> BigRational {
        let rho = BigRational::from_float(self.rho).expect("rho is finite");
        let int = |v: usize| BigRational::from_integer(BigInt::from(v));
        if i == 1 {
            if j <= self.n {
                return BigRational::zero();
            }
            match self.kind {
                OperatorKind::F | OperatorKind::G => BigRational::one(),
                OperatorKind::Gamma => rho * int(j - self.n),
            }
        } else if i == j + 1 {
            match self.kind {
                OperatorKind::F | OperatorKind::Gamma => BigRational::one(),
                OperatorKind::G if j < self.n => BigRational::one(),
                OperatorKind::G if j == self.n => rho,
                OperatorKind::G => int(j - self.n + 1) / int(j - self.n),
            }
        } else {
            BigRational::zero()
        }
    }

    /// Diagonal of `D_n = diag(1, …, 1, ρ, 2ρ, 3ρ, …)` with `G_n = D_n Γ_n D_n^{-1}`.
    pub fn similarity_weight(&self, k: usize) -> f64 {
        if k <= self.n {
            1.0
        } else {
            self.rho * (k - self.n) as f64
        }
    }
}

/// Finitely supported `l¹` vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeqVector {
    pub coords: Vec<f64>,
}

impl SeqVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// `scale · e_k` padded to `len` coordinates.
    pub fn unit(k: usize, len: usize, scale: f64) -> Self {
        let mut coords = vec![0.0; len.max(k)];
        coords[k - 1] = scale;
        Self { coords }
    }

    pub fn norm1(&self) -> f64 {
        self.coords.iter().map(|v| v.abs()).sum()
    }

    /// Index (1-based) of the last nonzero coordinate, 0 for the zero vector.
    pub fn support_len(&self) -> usize {
        self.coords.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1)
    }
}

/// Top-left `N × N` block of an operator's matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    spec: OperatorSpec,
    size: usize,
    entries: Vec<f64>,
}

impl TruncatedOperator {
    pub fn build(spec: OperatorSpec, size: usize) -> Result<Self> {
        if size < spec.n + 2 {
            return Err(Error::Domain(format!(
                "truncation size {size} is below n + 2 = {}",
                spec.n + 2
            )));
        }
        let mut entries = vec![0.0; size * size];
        for i in 1..=size {
            for j in 1..=size {
                entries[(i - 1) * size + (j - 1)] = spec.entry(i, j);
            }
        }
        Ok(Self { spec, size, entries })
    }

    pub fn spec(&self) -> OperatorSpec {
        self.spec
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1) * self.size + (j - 1)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[(i - 1) * self.size..i * self.size]
    }

    fn check_support(&self, support: usize) -> Result<()> {
        if support >= self.size {
            return Err(Error::Truncation(format!(
                "support reaches coordinate {support} but a size-{} section is exact only up to {}",
                self.size,
                self.size - 1
            )));
        }
        Ok(())
    }

    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (1..=self.size)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Image of a finitely supported vector. Exact (equal to the infinite
    /// operator's action) as long as the support stays below the cut.
    pub fn apply(&self, x: &SeqVector) -> Result<SeqVector> {
        self.check_support(x.support_len())?;
        let mut padded = x.coords.clone();
        padded.resize(self.size, 0.0);
        Ok(SeqVector::new(self.matvec(&padded)))
    }

    /// Exact rational image; same support rule as [`apply`](Self::apply).
    pub fn apply_exact(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        let support = x.iter().rposition(|v| !v.is_zero()).map_or(0, |i| i + 1);
        self.check_support(support)?;
        let mut out = vec![BigRational::zero(); self.size];
        for (j, xj) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let col = j + 1;
            let top = self.spec.entry_exact(1, col);
            if !top.is_zero() {
                out[0] += top * xj;
            }
            out[col] += self.spec.entry_exact(col + 1, col) * xj;
        }
        Ok(out)
    }

    /// Dominant eigenvalue of the section by `l¹`-normalized power iteration
    /// from the uniform positive vector.
    pub fn power_iteration_radius(&self, iters: usize, tol: f64) -> Result<f64> {
        if iters == 0 {
            return Err(Error::Domain("iters must be ≥ 1".into()));
        }
        let mut x = vec![1.0 / self.size as f64; self.size];
        let mut estimate = f64::NAN;
        let mut change = f64::INFINITY;
        for _ in 0..iters {
            let y = self.matvec(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            if norm == 0.0 {
                return Ok(0.0);
            }
            change = (norm - estimate).abs();
            estimate = norm;
            x = y.into_iter().map(|v| v / norm).collect();
            if change <= tol * estimate {
                return Ok(estimate);
            }
        }
        if iters == 1 || change <= tol * estimate {
            Ok(estimate)
        } else {
            Err(Error::NonConvergence { iterations: iters, last_change: change })
        }
    }

    /// Solves `(λI − T)x = y` for the section `T` by dense Gaussian
    /// elimination with partial pivoting.
    pub fn solve_shifted(&self, lambda: Complex64, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.size;
        if y.len() > n {
            return Err(Error::Truncation(format!(
                "right-hand side has {} coordinates, section has {n}",
                y.len()
            )));
        }
        let mut a: Vec<Complex64> = self.entries.iter().map(|&v| Complex64::new(-v, 0.0)).collect();
        for i in 0..n {
            a[i * n + i] += lambda;
        }
        let mut b = vec![Complex64::zero(); n];
        b[..y.len()].copy_from_slice(y);

        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .expect("non-empty range");
            if a[pivot * n + col].norm() == 0.0 {
                return Err(Error::SingularResolvent(format!("{lambda}")));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                b.swap(pivot, col);
            }
            let inv = a[col * n + col].inv();
            for r in col + 1..n {
                let factor = a[r * n + col] * inv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= factor * v;
                }
                let v = b[col];
                b[r] -= factor * v;
            }
        }
        let mut x = vec![Complex64::zero(); n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Ok(x)
    }
}

/// Max column sum of the exact integer truncated power `F_n^k`, taken over
/// the columns `j ≤ N − k` that the cut cannot reach.
pub fn exact_power_norm(spec: OperatorSpec, k: usize, size: usize) -> Result<BigUint> {
    if spec.kind != OperatorKind::F {
        return Err(Error::Domain("exact powers are only defined for F_n".into()));
    }
    if k == 0 {
        return Err(Error::Domain("power k must be ≥ 1".into()));
    }
    let n = spec.n;
    if size < k + n + 2 {
        return Err(Error::Domain(format!(
            "size {size} too small for exact power k={k}, n={n} (need ≥ {})",
            k + n + 2
        )));
    }
    let base: Vec<Vec<BigUint>> = (1..=size)
        .map(|i| {
            (1..=size)
                .map(|j| {
                    if (i == 1 && j > n) || i == j + 1 {
                        BigUint::one()
                    } else {
                        BigUint::zero()
                    }
                })
                .collect()
        })
        .collect();

    let mut power = base.clone();
    for _ in 1..k {
        power = matmul(&power, &base);
    }
    let interior = size - k;
    (0..interior)
        .map(|j| power.iter().map(|row| &row[j]).sum::<BigUint>())
        .max()
        .ok_or_else(|| Error::Domain("no interior columns".into()))
}

fn matmul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let n = a.len();
    let mut out = vec![vec![BigUint::zero(); n]; n];
    for i in 0..n {
        for (l, ail) in a[i].iter().enumerate() {
            if ail.is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    out[i][j] += ail * &b[l][j];
                }
            }
        }
    }
    out
}

/// `‖F_n^k‖₁` for any `k ≥ 1`: the sequence identity when `k > n`, the exact
/// truncated power otherwise.
pub fn f_power_norm(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        sequences::norm_of_power(n, k)
    } else {
        exact_power_norm(OperatorSpec::f(n)?, k, k + n + 2)
    }
}

/// One row of the `Γ_n` non-closedness table.
#[derive(Debug, Clone, PartialEq)]
pub struct NonClosedRow {
    pub m: usize,
    /// `‖x^{(m)}‖₁`, exact.
    pub preimage_norm: BigRational,
    /// `‖Γ_n x^{(m)}‖₁`, exact.
    pub image_norm: BigRational,
    /// `‖Γ_n x^{(m)} − ρ e₁‖₁`, exact.
    pub gap_to_limit: BigRational,
}

/// `x^{(m)} = (1/m) e_{m+n} → 0` while `Γ_n x^{(m)} → ρ e₁ ≠ Γ_n 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonClosedReport {
    pub n: usize,
    pub rho: f64,
    pub rows: Vec<NonClosedRow>,
    /// `‖ρ e₁ − Γ_n(0)‖₁ = ρ`: the graph-limit mismatch.
    pub limit_mismatch: f64,
}

impl NonClosedReport {
    pub fn final_preimage_norm(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| rational_to_f64(&r.preimage_norm))
    }

    pub fn final_gap(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| rational_to_f64(&r.gap_to_limit))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn nonclosedness_demo(n: usize, rho: f64, m_max: usize) -> Result<NonClosedReport> {
    if m_max < 2 {
        return Err(Error::Domain(format!("m_max must be ≥ 2, got {m_max}")));
    }
    let spec = OperatorSpec::gamma(n, rho)?;
    let rho_exact = BigRational::from_float(rho).expect("finite");
    let abs_sum = |v: &[BigRational]| v.iter().fold(BigRational::zero(), |acc, x| acc + x.abs());

    let mut rows = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let pos = m + n;
        let size = pos + 2;
        let op = TruncatedOperator::build(spec, size)?;
        let mut x = vec![BigRational::zero(); size];
        x[pos - 1] = BigRational::new(BigInt::one(), BigInt::from(m));
        let image = op.apply_exact(&x)?;
        let mut shifted = image.clone();
        shifted[0] -= &rho_exact;
        rows.push(NonClosedRow {
            m,
            preimage_norm: abs_sum(&x),
            image_norm: abs_sum(&image),
            gap_to_limit: abs_sum(&shifted),
        });
    }
    Ok(NonClosedReport { n, rho, rows, limit_mismatch: rho })
}
