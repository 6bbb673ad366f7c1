//! Circulant unitary matrices: construction, analytic diagonalization, the
//! parity permutation and the Dirichlet/Neumann/Robin split of the spectrum.
//!
//! A circulant matrix is fixed by its first row `(c_1, ..., c_n)`; row `i` is
//! the cyclic right-shift of row `i-1`. The discrete Fourier basis
//! `v_m = (1, w^m, w^{2m}, ..., w^{(n-1)m}) / sqrt(n)` with `w = e^{2 pi i/n}`
//! diagonalizes every such matrix, with eigenvalues
//!
//! ```text
//! lambda_m = sum_t c_{t+1} w^{m t},          m = 0, ..., n-1,
//! ```
//!
//! so unitarity is exactly `|lambda_m| = 1` for all `m`. The index convention
//! used throughout pairs `lambda_m` with `v_m`; `m = 0` is the constant
//! vector. The inverse transform `c_{t+1} = (1/n) sum_m lambda_m w^{-m t}`
//! makes phase round-trips exact up to rounding.
//!
//! The parity operator fixes edge 1 and swaps edge `j` with edge `n+2-j`;
//! conjugating a circulant by it produces the transpose, which is what makes
//! every circulant coupling mirror-covariant even when it is not symmetric.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Residual bound for accepting a first row as inducing a unitary matrix.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Default tolerance classifying eigenvalues as Dirichlet (-1) or Neumann (+1).
pub const DNR_DEFAULT_TOL: f64 = 1e-9;

const TWO_PI: f64 = 2.0 * PI;

#[inline]
fn omega_pow(n: usize, exponent: i64) -> Complex64 {
    let e = exponent.rem_euclid(n as i64);
    Complex64::from_polar(1.0, TWO_PI * e as f64 / n as f64)
}

/// An n x n unitary circulant matrix stored by its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantUnitary {
    n: usize,
    first_row: Vec<Complex64>,
}

/// Eigenvalue phases `gamma_m` with `lambda_m = e^{i gamma_m}`, stored in
/// `[0, 2 pi)` and ordered by the Fourier index `m = 0, ..., n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPhases {
    gamma: Vec<f64>,
}

impl EigenPhases {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 phases".into()));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("eigenphases"));
        }
        Ok(Self {
            gamma: gamma.into_iter().map(normalize_phase).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Unit-modulus eigenvalues `e^{i gamma_m}`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.gamma
            .iter()
            .map(|&g| Complex64::from_polar(1.0, g))
            .collect()
    }
}

/// Wrap a phase into `[0, 2 pi)`.
pub fn normalize_phase(g: f64) -> f64 {
    let mut x = g.rem_euclid(TWO_PI);
    if x >= TWO_PI {
        x -= TWO_PI;
    }
    x
}

/// Eigenvalue counts near -1 (Dirichlet), near +1 (Neumann) and the rest
/// (Robin), at a given classification tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DnrDecomposition {
    pub dirichlet: usize,
    pub neumann: usize,
    pub robin: usize,
}

/// Transposition and mirror symmetry of a circulant coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// `U = U^T` within tolerance.
    pub time_reversal: bool,
    /// `P U P = U^T` within tolerance; holds for every circulant.
    pub pt_symmetric: bool,
    /// 1-based edge indices fixed by the parity permutation.
    pub parity_fixed_edges: Vec<usize>,
}

impl CirculantUnitary {
    /// Validate a first row and build the circulant it induces.
    ///
    /// The row must have length >= 2 and the induced matrix must satisfy
    /// `U* U = I` within [`UNITARITY_TOL`] (equivalently, all eigenvalues on
    /// the unit circle).
    pub fn from_first_row(row: Vec<Complex64>) -> Result<Self> {
        let n = row.len();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "circulant dimension must be at least 2".into(),
            ));
        }
        if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("first row"));
        }
        let candidate = Self { n, first_row: row };
        let residual = candidate.unitarity_residual();
        if residual >= UNITARITY_TOL {
            return Err(Error::NonUnitaryRow { residual });
        }
        Ok(candidate)
    }

    /// Build the circulant with prescribed eigenphases via the inverse
    /// discrete Fourier transform of `e^{i gamma_m}`.
    pub fn from_eigenphases(phases: &EigenPhases) -> Self {
        let n = phases.n();
        let lambda = phases.eigenvalues();
        let mut row = Vec::with_capacity(n);
        for t in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, lam) in lambda.iter().enumerate() {
                acc += lam * omega_pow(n, -((m * t) as i64));
            }
            row.push(acc / n as f64);
        }
        // Unit-modulus eigenvalues make the row unitary by construction.
        Self { n, first_row: row }
    }

    /// The cyclic shift matrix as a circulant (first row `(0, 1, 0, ..., 0)`).
    pub fn shift(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "shift dimension must be at least 2".into(),
            ));
        }
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        row[1] = Complex64::new(1.0, 0.0);
        Ok(Self { n, first_row: row })
    }

    /// The shift matrix scaled by a unit phase `e^{i mu}` (optionally negated).
    pub fn phased_shift(n: usize, mu: f64, negate: bool) -> Result<Self> {
        let mut u = Self::shift(n)?;
        let mut factor = Complex64::from_polar(1.0, mu);
        if negate {
            factor = -factor;
        }
        for c in &mut u.first_row {
            *c *= factor;
        }
        Ok(u)
    }

    /// Permutation-invariant coupling `U = u I + v J` with `J` the all-ones
    /// matrix. Unitarity requires `|u| = 1` and `|u + n v| = 1`.
    pub fn permutation_invariant(n: usize, u: Complex64, v: Complex64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 2".into(),
            ));
        }
        let r1 = (u.norm() - 1.0).abs();
        let r2 = ((u + v * n as f64).norm() - 1.0).abs();
        if r1 >= UNITARITY_TOL || r2 >= UNITARITY_TOL {
            return Err(Error::ConstraintViolation(format!(
                "need |u| = 1 and |u + n v| = 1; residuals {r1:e}, {r2:e}"
            )));
        }
        let mut row = vec![v; n];
        row[0] = u + v;
        Ok(Self { n, first_row: row })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    /// Entry `(i, j)` of the induced matrix: `c[(j - i) mod n]`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let d = (j as i64 - i as i64).rem_euclid(self.n as i64) as usize;
        self.first_row[d]
    }

    /// Expand into a dense matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// Max-norm residual of `U* U - I`, computed from the cyclic
    /// autocorrelation of the first row.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for d in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                acc += self.first_row[t].conj() * self.first_row[(t + d) % n];
            }
            let target = if d == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((acc - target).norm());
        }
        worst
    }

    /// Eigenvalues `lambda_m = sum_t c_{t+1} w^{m t}` as phases in `[0, 2 pi)`.
    pub fn eigenvalues(&self) -> EigenPhases {
        let n = self.n;
        let mut gamma = Vec::with_capacity(n);
        for m in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, c) in self.first_row.iter().enumerate() {
                acc += c * omega_pow(n, (m * t) as i64);
            }
            gamma.push(normalize_phase(acc.arg()));
        }
        EigenPhases { gamma }
    }

    /// Complex eigenvalues ordered by Fourier index.
    pub fn complex_eigenvalues(&self) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|m| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, c) in self.first_row.iter().enumerate() {
                    acc += c * omega_pow(n, (m * t) as i64);
                }
                acc
            })
            .collect()
    }

    /// Transposed circulant: first row reversed cyclically.
    pub fn transpose(&self) -> Self {
        let n = self.n;
        let row = (0..n).map(|t| self.first_row[(n - t) % n]).collect();
        Self { n, first_row: row }
    }

    /// Check transposition symmetry and mirror covariance entrywise.
    pub fn symmetry_report(&self) -> SymmetryReport {
        let u = self.to_dense();
        let ut = u.transpose();
        let p = parity_operator(self.n);
        let pup = p.mul(&u).expect("dims agree").mul(&p).expect("dims agree");
        let time_reversal = u.max_diff(&ut) < UNITARITY_TOL;
        let pt_symmetric = pup.max_diff(&ut) < UNITARITY_TOL;
        SymmetryReport {
            time_reversal,
            pt_symmetric,
            parity_fixed_edges: parity_fixed_edges(self.n),
        }
    }

    /// Count eigenvalues within `tol` of -1 (Dirichlet) and +1 (Neumann);
    /// the remainder is Robin.
    pub fn dnr_decomposition(&self, tol: f64) -> Result<DnrDecomposition> {
        if !(tol > 0.0 && tol < 0.1) {
            return Err(Error::InvalidParameter(format!(
                "classification tolerance {tol} outside (0, 0.1)"
            )));
        }
        let mut dirichlet = 0;
        let mut neumann = 0;
        for lam in self.complex_eigenvalues() {
            if (lam + Complex64::new(1.0, 0.0)).norm() < tol {
                dirichlet += 1;
            } else if (lam - Complex64::new(1.0, 0.0)).norm() < tol {
                neumann += 1;
            }
        }
        Ok(DnrDecomposition {
            dirichlet,
            neumann,
            robin: self.n - dirichlet - neumann,
        })
    }
}

/// Normalized Fourier eigenvector; `j` runs `1..=n` and `j = n` is the
/// constant vector (the same mode as Fourier index 0).
pub fn eigenvector(n: usize, j: usize) -> Result<Vec<Complex64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 2".into(),
        ));
    }
    if j < 1 || j > n {
        return Err(Error::IndexOutOfRange { index: j, n });
    }
    let norm = 1.0 / (n as f64).sqrt();
    Ok((0..n)
        .map(|i| omega_pow(n, (j * i) as i64) * norm)
        .collect())
}

/// Parity permutation: fixes index 1 and maps `j` to `n + 2 - j` otherwise
/// (1-based). In 0-based terms entry `(i, j)` is 1 iff `i + j = 0 (mod n)`.
pub fn parity_operator(n: usize) -> DenseMatrix {
    let mut p = DenseMatrix::zeros(n);
    for i in 0..n {
        p.set(i, (n - i) % n, Complex64::new(1.0, 0.0));
    }
    p
}

/// The same operator assembled from eigenvector overlaps
/// `Theta_{m m'} = sum_a (v_m)_a (v_{m'})_a` (no conjugation), which collapses
/// to the permutation because the Fourier modes sum to zero unless `m + m'`
/// vanishes mod n.
pub fn parity_from_eigenvectors(n: usize) -> Result<DenseMatrix> {
    let mut p = DenseMatrix::zeros(n);
    // Fourier index m = 0..n-1; index 0 is eigenvector(n, n).
    let vectors: Vec<Vec<Complex64>> = (0..n)
        .map(|m| eigenvector(n, if m == 0 { n } else { m }))
        .collect::<Result<_>>()?;
    for (a, va) in vectors.iter().enumerate() {
        for (b, vb) in vectors.iter().enumerate() {
            let overlap: Complex64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
            p.set(a, b, overlap);
        }
    }
    Ok(p)
}

/// 1-based edge indices fixed by the parity permutation: edge 1 always, and
/// edge `n/2 + 1` when `n` is even.
pub fn parity_fixed_edges(n: usize) -> Vec<usize> {
    if n % 2 == 0 {
        vec![1, n / 2 + 1]
    } else {
        vec![1]
    }
}
