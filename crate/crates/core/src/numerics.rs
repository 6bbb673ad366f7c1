//! Small dense complex linear algebra and scalar root-finding.
//!
//! Everything here targets matrices of dimension n <= 16 stored row-major,
//! which is all the vertex and lattice computations ever need. Solves use
//! scaled partial pivoting; a pivot smaller than [`PIVOT_THRESHOLD`] relative
//! to its row scale is treated as a genuine singularity rather than round-off.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold separating singular systems from round-off.
pub const PIVOT_THRESHOLD: f64 = 1e-13;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Identity matrix of dimension `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry vector of length n*n.
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { n, entries })
    }

    /// Build from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(
                "rows must form a square matrix".into(),
            ));
        }
        Self::from_entries(n, rows.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Transposed copy.
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Conjugate-transposed copy.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j).conj());
            }
        }
        t
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matrix dim {} vs vector len {}",
                self.n,
                x.len()
            )));
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm residual of `U* U - I`; small for unitary matrices.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dim");
        gram.max_diff(&Self::identity(self.n))
    }

    /// Standard matrix product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::DimensionMismatch(format!(
                "left dim {} vs right dim {}",
                self.n, rhs.n
            )));
        }
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Solve `self * X = b` by Gaussian elimination with scaled partial pivoting.
    ///
    /// Fails with [`Error::SingularMatrix`] when the best available pivot is
    /// below [`PIVOT_THRESHOLD`] relative to its row's original max magnitude.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        if self.n != b.n {
            return Err(Error::DimensionMismatch(format!(
                "coefficient dim {} vs rhs dim {}",
                self.n, b.n
            )));
        }
        let n = self.n;
        let mut a = self.entries.clone();
        let mut x = b.entries.clone();
        let scales: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j].norm()).fold(0.0, f64::max))
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();

        for col in 0..n {
            let (best_row, best_ratio) = (col..n)
                .map(|r| {
                    let s = scales[perm[r]];
                    let ratio = if s > 0.0 {
                        a[perm[r] * n + col].norm() / s
                    } else {
                        0.0
                    };
                    (r, ratio)
                })
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if best_ratio < PIVOT_THRESHOLD {
                return Err(Error::SingularMatrix {
                    step: col,
                    threshold: PIVOT_THRESHOLD,
                });
            }
            perm.swap(col, best_row);
            let p = perm[col];
            let pivot = a[p * n + col];
            for r in col + 1..n {
                let row = perm[r];
                let factor = a[row * n + col] / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[row * n + j] - factor * a[p * n + j];
                    a[row * n + j] = v;
                }
                for j in 0..n {
                    let v = x[row * n + j] - factor * x[p * n + j];
                    x[row * n + j] = v;
                }
            }
        }

        // back substitution
        let mut out = Self::zeros(n);
        for j in 0..n {
            for i in (0..n).rev() {
                let row = perm[i];
                let mut acc = x[row * n + j];
                for k in i + 1..n {
                    acc -= a[row * n + k] * out.get(k, j);
                }
                out.set(i, j, acc / a[row * n + i]);
            }
        }
        Ok(out)
    }

    /// Determinant by pivoted elimination with sign tracking. Zero is a valid
    /// result, so near-singularity is not an error here.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let best = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            let pivot = a[best * n + col];
            if pivot.norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if best != col {
                for j in 0..n {
                    a.swap(col * n + j, best * n + j);
                }
                det = -det;
            }
            det *= pivot;
            for r in col + 1..n {
                let factor = a[r * n + col] / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[r * n + j] - factor * a[col * n + j];
                    a[r * n + j] = v;
                }
            }
        }
        det
    }
}

/// A sign-change bracket for scalar root-finding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }
}

/// Bisect a bracketed sign change of `f` down to `|hi - lo| < tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, bracket: RootBracket, tol: f64) -> f64 {
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo < tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (flo <= 0.0) == (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan `[a, b]` on `grid` points and bisect every sign-change bracket.
///
/// Returns the sorted roots. Tangential zeros that do not change sign are the
/// caller's responsibility, as are roots separated by less than the grid step.
pub fn find_roots<F: Fn(f64) -> f64>(
    f: F,
    interval: (f64, f64),
    grid: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let (a, b) = interval;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { lo: a, hi: b });
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be >= 2".into()));
    }
    let mut roots = Vec::new();
    let step = (b - a) / (grid - 1) as f64;
    let mut x_prev = a;
    let mut f_prev = f(a);
    for i in 1..grid {
        let x = a + step * i as f64;
        let fx = f(x);
        if f_prev == 0.0 {
            roots.push(x_prev);
        } else if fx != 0.0 && (f_prev < 0.0) != (fx < 0.0) {
            let bracket = RootBracket::new(x_prev, x)?;
            roots.push(bisect(&f, bracket, tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < tol);
    Ok(roots)
}
