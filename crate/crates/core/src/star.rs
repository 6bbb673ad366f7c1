//! Star-graph vertex physics: boundary-condition residuals, the on-shell
//! scattering matrix, its low/high-energy limits and (anti)bound states.
//!
//! A vertex of degree n carries the matching condition
//!
//! ```text
//! (U - I) Psi + i l (U + I) Psi' = 0
//! ```
//!
//! with `U` unitary and derivatives taken outward on every edge. The on-shell
//! scattering matrix at momentum k is
//!
//! ```text
//! S(k) = ((k l - 1) I + (k l + 1) U) ((k l + 1) I + (k l - 1) U)^{-1},
//! ```
//!
//! whose factors commute. For circulant couplings everything reduces to the
//! scalar map `s = ((k l - 1) + (k l + 1) lambda) / ((k l + 1) + (k l - 1) lambda)`
//! on each eigenvalue `lambda` of `U`; bound states sit at `k = i kappa` with
//! `kappa = tan(gamma/2) / l` for each eigenphase `gamma` in `(0, pi)`, and
//! phases in `(pi, 2 pi)` produce antibound states with negative `kappa`.

use num_complex::Complex64;

use crate::circulant::CirculantUnitary;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Tolerance treating an eigenphase as exactly 0 or pi, in which case it
/// contributes neither a bound nor an antibound state.
const PHASE_EDGE_TOL: f64 = 1e-12;

/// The unitary matrix of a vertex coupling, either with analytic circulant
/// structure or as a general dense unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    Circulant(CirculantUnitary),
    Dense(DenseMatrix),
}

impl Coupling {
    pub fn n(&self) -> usize {
        match self {
            Coupling::Circulant(u) => u.n(),
            Coupling::Dense(m) => m.dim(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Coupling::Circulant(u) => u.to_dense(),
            Coupling::Dense(m) => m.clone(),
        }
    }
}

/// A unitary coupling matrix together with the length scale of the boundary
/// condition.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCoupling {
    coupling: Coupling,
    ell: f64,
}

impl VertexCoupling {
    pub fn circulant(u: CirculantUnitary, ell: f64) -> Result<Self> {
        Self::validate_ell(ell)?;
        Ok(Self {
            coupling: Coupling::Circulant(u),
            ell,
        })
    }

    /// Accept a general dense coupling; spectral operations are unavailable
    /// for these, only the scattering matrix.
    pub fn dense(u: DenseMatrix, ell: f64) -> Result<Self> {
        Self::validate_ell(ell)?;
        let residual = u.unitarity_residual();
        if residual >= 1e-10 {
            return Err(Error::NonUnitaryMatrix { residual });
        }
        Ok(Self {
            coupling: Coupling::Dense(u),
            ell,
        })
    }

    fn validate_ell(ell: f64) -> Result<()> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "length scale must be positive and finite, got {ell}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    fn circulant_part(&self) -> Result<&CirculantUnitary> {
        match &self.coupling {
            Coupling::Circulant(u) => Ok(u),
            Coupling::Dense(_) => Err(Error::NonCirculantCoupling),
        }
    }
}

/// Boundary values and outward derivatives at the vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub psi: Vec<Complex64>,
    pub dpsi: Vec<Complex64>,
}

impl BoundaryData {
    pub fn new(psi: Vec<Complex64>, dpsi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != dpsi.len() {
            return Err(Error::DimensionMismatch(format!(
                "psi len {} vs dpsi len {}",
                psi.len(),
                dpsi.len()
            )));
        }
        Ok(Self { psi, dpsi })
    }
}

/// On-shell scattering matrix at a fixed momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub k: f64,
    pub s: DenseMatrix,
}

/// Bound and antibound state data of a circulant coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateList {
    /// Sorted positive kappa values; eigenvalues are `-kappa^2`.
    pub kappas: Vec<f64>,
    pub energies: Vec<f64>,
    /// Negative kappa values from eigenphases in `(pi, 2 pi)`.
    pub antibound_kappas: Vec<f64>,
}

/// Residual `(U - I) Psi + i l (U + I) Psi'` of the vertex condition; the
/// zero vector exactly when the data satisfies it.
pub fn boundary_residual(c: &VertexCoupling, b: &BoundaryData) -> Result<Vec<Complex64>> {
    let n = c.n();
    if b.psi.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "coupling dim {} vs boundary data len {}",
            n,
            b.psi.len()
        )));
    }
    let u = c.coupling.to_dense();
    let u_psi = u.mul_vec(&b.psi)?;
    let u_dpsi = u.mul_vec(&b.dpsi)?;
    let il = Complex64::new(0.0, c.ell());
    Ok((0..n)
        .map(|i| (u_psi[i] - b.psi[i]) + il * (u_dpsi[i] + b.dpsi[i]))
        .collect())
}

/// Scalar scattering amplitude on one eigenvalue of the coupling.
#[inline]
fn eigen_amplitude(kl: Complex64, lambda: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    ((kl - one) + (kl + one) * lambda) / ((kl + one) + (kl - one) * lambda)
}

/// On-shell scattering matrix at momentum `k > 0`.
///
/// Circulant couplings go through the eigenvalue map and stay circulant;
/// dense couplings solve `((k l + 1) I + (k l - 1) U) S = (k l - 1) I + (k l + 1) U`.
pub fn s_matrix(c: &VertexCoupling, k: f64) -> Result<ScatteringMatrix> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "momentum must be positive and finite, got {k}"
        )));
    }
    let kl = Complex64::new(k * c.ell(), 0.0);
    let s = match &c.coupling {
        Coupling::Circulant(u) => {
            let amplitudes: Vec<Complex64> = u
                .complex_eigenvalues()
                .into_iter()
                .map(|lam| eigen_amplitude(kl, lam))
                .collect();
            circulant_from_eigenvalues(&amplitudes)
        }
        Coupling::Dense(u) => {
            let n = u.dim();
            let one = Complex64::new(1.0, 0.0);
            let mut num = DenseMatrix::zeros(n);
            let mut den = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    let uij = u.get(i, j);
                    let diag = if i == j {
                        one
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    num.set(i, j, (kl - one) * diag + (kl + one) * uij);
                    den.set(i, j, (kl + one) * diag + (kl - one) * uij);
                }
            }
            den.solve(&num)?
        }
    };
    Ok(ScatteringMatrix { k, s })
}

/// Assemble the circulant matrix with given eigenvalues in Fourier order.
fn circulant_from_eigenvalues(lambda: &[Complex64]) -> DenseMatrix {
    let n = lambda.len();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for (t, slot) in row.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, lam) in lambda.iter().enumerate() {
            let e = ((m * t) as i64).rem_euclid(n as i64);
            acc +=
                lam * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * e as f64 / n as f64);
        }
        *slot = acc / n as f64;
    }
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let d = (j as i64 - i as i64).rem_euclid(n as i64) as usize;
            m.set(i, j, row[d]);
        }
    }
    m
}

/// Which end of the momentum axis a scattering limit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitEnd {
    Zero,
    Infinity,
}

/// Momentum limits of `S(k)`, assembled spectrally for circulant couplings.
///
/// At infinity the amplitude tends to -1 on the Dirichlet eigenspace
/// (eigenvalue -1) and +1 elsewhere; at zero it tends to +1 on the Neumann
/// eigenspace (eigenvalue +1) and -1 elsewhere.
pub fn s_matrix_limit(c: &VertexCoupling, end: LimitEnd) -> Result<DenseMatrix> {
    let u = c.circulant_part()?;
    let one = Complex64::new(1.0, 0.0);
    let tol = crate::circulant::DNR_DEFAULT_TOL;
    let limits: Vec<Complex64> = u
        .complex_eigenvalues()
        .into_iter()
        .map(|lam| match end {
            LimitEnd::Infinity => {
                if (lam + one).norm() < tol {
                    -one
                } else {
                    one
                }
            }
            LimitEnd::Zero => {
                if (lam - one).norm() < tol {
                    one
                } else {
                    -one
                }
            }
        })
        .collect();
    Ok(circulant_from_eigenvalues(&limits))
}

/// Closed-form scattering matrix of the phased-shift coupling `e^{i mu} R`.
///
/// With `eta = (1 - k l) / (1 + k l)` and `eps = e^{i mu}` the entries are
///
/// ```text
/// S_ij = ( -eta (1 - eps^n eta^{n-2}) delta_ij
///          + (1 - delta_ij)(1 - eta^2) eps (eps eta)^{(j-i-1) mod n} )
///        / (1 - eps^n eta^n).
/// ```
pub fn s_matrix_shift_closed_form(n: usize, mu: f64, ell: f64, k: f64) -> Result<ScatteringMatrix> {
    if n < 3 {
        return Err(Error::InvalidParameter("need n >= 3".into()));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidParameter("momentum must be positive".into()));
    }
    if !(ell > 0.0) {
        return Err(Error::InvalidParameter(
            "length scale must be positive".into(),
        ));
    }
    if !(0.0..2.0 * std::f64::consts::PI / n as f64).contains(&mu) {
        return Err(Error::InvalidParameter(format!(
            "phase {mu} outside [0, 2 pi / n)"
        )));
    }
    let eta = Complex64::new((1.0 - k * ell) / (1.0 + k * ell), 0.0);
    let eps = Complex64::from_polar(1.0, mu);
    let eps_eta = eps * eta;
    let denom = Complex64::new(1.0, 0.0) - eps_eta.powu(n as u32);
    let diag = -eta * (Complex64::new(1.0, 0.0) - eps.powu(n as u32) * eta.powu(n as u32 - 2));
    let off_scale = (Complex64::new(1.0, 0.0) - eta * eta) * eps;
    let mut s = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let v = if i == j {
                diag
            } else {
                let p = (j as i64 - i as i64 - 1).rem_euclid(n as i64) as u32;
                off_scale * eps_eta.powu(p)
            };
            s.set(i, j, v / denom);
        }
    }
    Ok(ScatteringMatrix { k, s })
}

/// Bound and antibound states of a circulant coupling, straight from the
/// eigenphases: `kappa = tan(gamma / 2) / l`.
pub fn bound_states(c: &VertexCoupling) -> Result<BoundStateList> {
    let u = c.circulant_part()?;
    let ell = c.ell();
    let mut kappas = Vec::new();
    let mut antibound = Vec::new();
    for &gamma in u.eigenvalues().gamma() {
        if gamma < PHASE_EDGE_TOL
            || (gamma - std::f64::consts::PI).abs() < PHASE_EDGE_TOL
            || gamma > 2.0 * std::f64::consts::PI - PHASE_EDGE_TOL
        {
            continue;
        }
        let kappa = (0.5 * gamma).tan() / ell;
        if gamma < std::f64::consts::PI {
            kappas.push(kappa);
        } else {
            antibound.push(kappa);
        }
    }
    kappas.sort_by(f64::total_cmp);
    antibound.sort_by(f64::total_cmp);
    let energies = kappas.iter().map(|k| -k * k).collect();
    Ok(BoundStateList {
        kappas,
        energies,
        antibound_kappas: antibound,
    })
}

/// `(k l + 1) I + (k l - 1) U` evaluated at complex momentum; singular exactly
/// at the bound-state poles on the positive imaginary axis.
pub fn s_denominator_at(c: &VertexCoupling, k: Complex64) -> DenseMatrix {
    let n = c.n();
    let kl = k * c.ell();
    let one = Complex64::new(1.0, 0.0);
    let u = c.coupling.to_dense();
    let mut den = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let diag = if i == j {
                one
            } else {
                Complex64::new(0.0, 0.0)
            };
            den.set(i, j, (kl + one) * diag + (kl - one) * u.get(i, j));
        }
    }
    den
}
