//! Square-lattice band structure for the phased-shift vertex coupling.
//!
//! Every vertex of the square lattice (edge length `l`, vertex length scale
//! fixed to one) carries the coupling `e^{i mu} R` with `R` the cyclic shift
//! of degree four. The Bloch ansatz turns the spectral problem at momentum
//! `k` and quasimomentum `(theta_1, theta_2)` into a 4x4 secular determinant,
//! which factors into a quartic
//!
//! ```text
//! sum_j c_j k^j = F(k) + Q G(k),      Q = cos(theta_1) + cos(theta_2),
//! ```
//!
//! where `Q` enters only through the odd coefficients. Since `Q` sweeps
//! `[-2, 2]`, a momentum lies in the spectrum exactly when
//! `q*(k) = -F(k)/G(k)` lands in `[-2, 2]`; every scan in this module is
//! built on that scalar reduction and validated against the raw determinant.
//! `G` vanishes at `k = 1` and at the lattice points `sin(k l) = 0`, where
//! either a flat band appears (`F = 0` too) or the point is excluded from the
//! spectrum. The negative branch substitutes `k = i kappa` and runs on the
//! hyperbolic coefficient set.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{bisect, DenseMatrix, RootBracket};

/// Below this magnitude `G` counts as vanishing and `q*` is undefined.
const G_TOL: f64 = 1e-9;

/// Flat-band residual tolerance on `F`, relative to the local scale.
const FLAT_TOL: f64 = 1e-9;

/// `sin(k l)` threshold for labeling a vanishing-`G` point as a lattice point.
const LATTICE_POINT_TOL: f64 = 1e-6;

/// Spectral branch: propagating momenta `k > 0` or decaying `kappa > 0`
/// (energy `-kappa^2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Positive,
    Negative,
}

/// Lattice coupling phase and edge length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    mu: f64,
    ell: f64,
}

impl LatticeModel {
    /// `mu` must lie in `[0, pi/2]`; the endpoints are admissible degenerate
    /// cases. `ell` is the lattice edge length.
    pub fn new(mu: f64, ell: f64) -> Result<Self> {
        if !mu.is_finite() || !(0.0..=PI / 2.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!(
                "phase {mu} outside [0, pi/2]"
            )));
        }
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "edge length must be positive, got {ell}"
            )));
        }
        Ok(Self { mu, ell })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }
}

/// Bloch phase pair on the square lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quasimomentum {
    pub theta1: f64,
    pub theta2: f64,
}

impl Quasimomentum {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(-PI..=PI).contains(&theta1) || !(-PI..=PI).contains(&theta2) {
            return Err(Error::InvalidParameter(format!(
                "quasimomentum ({theta1}, {theta2}) outside the Brillouin zone"
            )));
        }
        Ok(Self { theta1, theta2 })
    }

    /// `Q = cos(theta_1) + cos(theta_2)`, in `[-2, 2]`.
    pub fn q(&self) -> f64 {
        self.theta1.cos() + self.theta2.cos()
    }
}

/// Quartic coefficients `c_0..c_4` of the spectral condition on one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub branch: Branch,
    pub c: [f64; 5],
}

impl SpectralCoefficients {
    /// Evaluate `sum_j c_j x^j`.
    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &coeff| acc * x + coeff)
    }
}

/// Classification of a momentum against the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandStatus {
    InBand,
    Gap,
    FlatBand,
    ExcludedLatticePoint,
}

/// Membership verdict with the quasimomentum constraint value when defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipVerdict {
    pub status: BandStatus,
    pub q_star: Option<f64>,
}

/// Which Brillouin-zone point a band edge is pinned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `Q = +2`, i.e. `theta = (0, 0)`.
    Center,
    /// `Q = -2`, i.e. `theta = (pi, pi)`.
    Corner,
}

/// One spectral interval with edge classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandInterval {
    pub lo: f64,
    pub hi: f64,
    pub edge_lo: EdgeKind,
    pub edge_hi: EdgeKind,
}

impl BandInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Width of the image on the energy axis (`E = x^2` on the positive
    /// branch, `E = -x^2` on the negative one).
    pub fn energy_width(&self) -> f64 {
        (self.hi * self.hi - self.lo * self.lo).abs()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Ordered disjoint spectral intervals plus isolated flat-band points.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    pub branch: Branch,
    pub intervals: Vec<BandInterval>,
    pub flat_points: Vec<f64>,
}

/// Solution contour of the spectral condition in the Brillouin zone.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiSurface {
    pub k: f64,
    pub points: Vec<Quasimomentum>,
}

/// A gap-closing point found by the parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracPoint {
    pub mu: f64,
    pub k: f64,
    pub location: EdgeKind,
}

// ---------------------------------------------------------------------------
// secular determinant
// ---------------------------------------------------------------------------

/// The prefactor `8 i eps^2 e^{i(theta_1+theta_2)} (k+1)^{-4}` relating the
/// determinant to the quartic form.
pub fn spectral_prefactor(m: &LatticeModel, k: Complex64, q: &Quasimomentum) -> Complex64 {
    let eps = Complex64::from_polar(1.0, m.mu);
    let bloch = Complex64::from_polar(1.0, q.theta1 + q.theta2);
    let one = Complex64::new(1.0, 0.0);
    Complex64::new(0.0, 8.0) * eps * eps * bloch / (k + one).powu(4)
}

/// The 4x4 secular determinant at complex momentum `k`.
///
/// Entries carry the full-edge phase `e^{i k l}` and its reciprocal together
/// with `eta = (1-k)/(1+k)` and the Bloch factors. Against the quartic form
/// the identity `D = prefactor * sum_j c_j k^j` holds exactly.
pub fn secular_determinant(m: &LatticeModel, k: Complex64, q: &Quasimomentum) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    if (k + one).norm() < 1e-12 {
        return Err(Error::EtaPole);
    }
    let eta = (one - k) / (one + k);
    let z = (Complex64::new(0.0, 1.0) * k * m.ell).exp(); // e^{i k l}
    let zb = (Complex64::new(0.0, -1.0) * k * m.ell).exp();
    let eps = Complex64::from_polar(1.0, m.mu);
    let w1 = Complex64::from_polar(1.0, q.theta1);
    let w2 = Complex64::from_polar(1.0, q.theta2);
    let zero = Complex64::new(0.0, 0.0);

    let mut mat = DenseMatrix::zeros(4);
    let rows = [
        [-one, -eta, eps * eta, eps],
        [eps * w1 * z, eps * w1 * zb * eta, -one, -eta],
        [-w1 * z * eta, -w1 * zb, eps * w2 * z, eps * w2 * zb * eta],
        [eps * eta, eps, -w2 * z * eta, -w2 * zb],
    ];
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            mat.set(i, j, if v == zero { zero } else { v });
        }
    }
    Ok(mat.determinant())
}

// ---------------------------------------------------------------------------
// quartic coefficients and the scalar reduction
// ---------------------------------------------------------------------------

/// Trigonometric coefficient set of the positive branch.
pub fn coefficients_positive(
    m: &LatticeModel,
    k: f64,
    q: &Quasimomentum,
) -> Result<SpectralCoefficients> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "momentum must be positive, got {k}"
        )));
    }
    let (s2m, c2m) = ((2.0 * m.mu).sin(), (2.0 * m.mu).cos());
    let s = (k * m.ell).sin();
    let ck = (k * m.ell).cos();
    let c2k = (2.0 * k * m.ell).cos();
    let qv = q.q();
    let c0 = -s2m * s * s;
    let c2 = s2m * (1.0 + 3.0 * c2k);
    let c1 = 2.0 * (2.0 * c2m * ck - qv) * s;
    let c3 = 2.0 * (2.0 * c2m * ck + qv) * s;
    Ok(SpectralCoefficients {
        branch: Branch::Positive,
        c: [c0, c1, c2, c3, c0],
    })
}

/// Hyperbolic coefficient set of the negative branch (`k = i kappa`).
pub fn coefficients_negative(
    m: &LatticeModel,
    kappa: f64,
    q: &Quasimomentum,
) -> Result<SpectralCoefficients> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let (s2m, c2m) = ((2.0 * m.mu).sin(), (2.0 * m.mu).cos());
    let sh = (kappa * m.ell).sinh();
    let ch = (kappa * m.ell).cosh();
    let ch2 = (2.0 * kappa * m.ell).cosh();
    let qv = q.q();
    let c0 = s2m * sh * sh;
    let c2 = -s2m * (1.0 + 3.0 * ch2);
    let c1 = -2.0 * (2.0 * c2m * ch - qv) * sh;
    let c3 = 2.0 * (2.0 * c2m * ch + qv) * sh;
    Ok(SpectralCoefficients {
        branch: Branch::Negative,
        c: [c0, c1, c2, c3, c0],
    })
}

/// Split of the quartic into `F + Q G` with the quasimomentum isolated:
/// `G(k) = 2 sin(k l)(k^3 - k)` on the positive branch and
/// `G(kappa) = 2 sinh(kappa l)(kappa^3 + kappa)` on the negative one, while
/// `F` collects every `Q`-independent term.
pub fn reduced_fg(m: &LatticeModel, x: f64, branch: Branch) -> Result<(f64, f64)> {
    let origin = Quasimomentum {
        theta1: PI / 2.0,
        theta2: PI / 2.0,
    }; // Q = 0
    match branch {
        Branch::Positive => {
            let coeffs = coefficients_positive(m, x, &origin)?;
            let g = 2.0 * (x * m.ell).sin() * (x * x * x - x);
            Ok((coeffs.eval(x), g))
        }
        Branch::Negative => {
            let coeffs = coefficients_negative(m, x, &origin)?;
            let g = 2.0 * (x * m.ell).sinh() * (x * x * x + x);
            Ok((coeffs.eval(x), g))
        }
    }
}

/// The (F, G) pair used for classification. On the positive branch this is
/// the literal reduced form. On the negative branch both are rescaled by the
/// common positive factor `4 e^{-2 kappa l}`, which leaves `q* = -F/G` and
/// the sign of the edge indicator untouched while keeping every hyperbolic
/// bounded: the literal `sinh` overflows past `kappa l ~ 350`, well inside
/// the range the divergent asymptotic root reaches near `mu = pi/2`.
fn classification_fg(m: &LatticeModel, x: f64, branch: Branch) -> Result<(f64, f64)> {
    match branch {
        Branch::Positive => reduced_fg(m, x, branch),
        Branch::Negative => {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "kappa must be positive, got {x}"
                )));
            }
            let (s2m, c2m) = ((2.0 * m.mu).sin(), (2.0 * m.mu).cos());
            let kl = x * m.ell;
            let e1 = (-kl).exp();
            let e2 = (-2.0 * kl).exp();
            let e4 = e2 * e2;
            let one_m_e2 = -(-2.0 * kl).exp_m1(); // 1 - e^{-2 kl}, cancellation-free
            let sinh_sq = one_m_e2 * one_m_e2; // 4 e^{-2kl} sinh^2(kl)
            let one_plus_3cosh2 = 4.0 * e2 + 6.0 * (1.0 + e4); // 4 e^{-2kl} (1 + 3 cosh 2kl)
            let chsh = -(-4.0 * kl).exp_m1(); // 4 e^{-2kl} cosh(kl) sinh(kl)
            let f = s2m * sinh_sq * (1.0 + x.powi(4)) - s2m * one_plus_3cosh2 * x * x
                + 4.0 * c2m * chsh * (x * x * x - x);
            let g = 4.0 * e1 * one_m_e2 * (x * x * x + x); // 4 e^{-2kl} G
            Ok((f, g))
        }
    }
}

/// Continuous edge indicator: `|F| - 2 |G|` is non-positive exactly on the
/// spectrum (away from the isolated `G = 0` points) and vanishes at band
/// edges, so every edge search bisects this function.
fn edge_indicator(m: &LatticeModel, x: f64, branch: Branch) -> f64 {
    match classification_fg(m, x, branch) {
        Ok((f, g)) => f.abs() - 2.0 * g.abs(),
        Err(_) => f64::INFINITY,
    }
}

/// `q*(x) = -F/G`. On the positive branch `G` genuinely vanishes at the
/// lattice points and `x = 1`, where no finite value exists; on the negative
/// branch `G > 0` for every `kappa > 0`, so the ratio is always taken (it
/// may overflow to infinity deep in the underflow regime, which classifies
/// correctly as a gap).
fn q_star_raw(m: &LatticeModel, x: f64, branch: Branch) -> Option<f64> {
    let (f, g) = classification_fg(m, x, branch).ok()?;
    if branch == Branch::Positive && g.abs() < G_TOL {
        None
    } else {
        Some(-f / g)
    }
}

/// Classify a momentum: in a band when some quasimomentum solves the
/// spectral condition, a flat band when every quasimomentum does, an
/// excluded lattice point at `sin(x l) = 0` with nonvanishing `F`, and a gap
/// otherwise.
pub fn membership(m: &LatticeModel, x: f64, branch: Branch) -> Result<MembershipVerdict> {
    let (f, g) = classification_fg(m, x, branch)?;
    if branch == Branch::Positive && g.abs() < G_TOL {
        // local scale of F over a surrounding cell, so the flat test is
        // insensitive to the absolute size of the coefficients
        let h = (1e-3 * x.abs()).max(1e-6);
        let scale = [x - h, x + h]
            .iter()
            .filter(|&&y| y > 0.0)
            .filter_map(|&y| classification_fg(m, y, branch).ok())
            .map(|(fy, _)| fy.abs())
            .fold(0.0, f64::max);
        if f.abs() < FLAT_TOL * (1.0 + scale) {
            return Ok(MembershipVerdict {
                status: BandStatus::FlatBand,
                q_star: None,
            });
        }
        let status = if branch == Branch::Positive && (x * m.ell).sin().abs() < LATTICE_POINT_TOL {
            BandStatus::ExcludedLatticePoint
        } else {
            BandStatus::Gap
        };
        return Ok(MembershipVerdict {
            status,
            q_star: None,
        });
    }
    let q = -f / g;
    let status = if q.is_finite() && q.abs() <= 2.0 {
        BandStatus::InBand
    } else {
        BandStatus::Gap
    };
    Ok(MembershipVerdict {
        status,
        q_star: q.is_finite().then_some(q),
    })
}

// ---------------------------------------------------------------------------
// band structure
// ---------------------------------------------------------------------------

/// Sample points for a branch scan: a uniform grid at the guaranteed spacing
/// plus geometric clusters around the `q*` poles (lattice points and `x = 1`
/// on the positive branch) and around the asymptotic negative-band centers,
/// where bands can be far narrower than any uniform step.
fn scan_points(m: &LatticeModel, branch: Branch, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let spacing = (PI / (4.0 * m.ell)).min(0.01);
    let base = (((hi - lo) / spacing).ceil() as usize).min(4_000_000);
    let npts = grid.max(base).max(100);
    let mut xs = Vec::with_capacity(npts + 1);
    for i in 0..=npts {
        xs.push(lo + (hi - lo) * i as f64 / npts as f64);
    }

    let mut push_cluster = |center: f64, width: f64| {
        let mut offset = width;
        while offset > 1e-12 * center.abs().max(1.0) {
            for x in [center - offset, center + offset] {
                if x > lo && x < hi {
                    xs.push(x);
                }
            }
            offset *= 0.5;
        }
        if center > lo && center < hi {
            xs.push(center);
        }
    };

    match branch {
        Branch::Positive => {
            let half_cell = PI / (2.0 * m.ell);
            let n_max = (hi * m.ell / PI).floor() as i64;
            for n in 1..=n_max {
                let center = PI * n as f64 / m.ell;
                if center > lo - half_cell && center < hi + half_cell {
                    push_cluster(center, half_cell);
                }
            }
            push_cluster(1.0, 0.5);
        }
        Branch::Negative => {
            if let Ok((r1, r2)) = negative_asymptotic_roots(m.mu) {
                push_cluster(r1, 0.2);
                push_cluster(r2, 0.2);
            }
            // at the endpoint phases the band collapses onto kappa = 1 and
            // is far narrower than any uniform step
            push_cluster(1.0, 0.2);
        }
    }

    xs.retain(|x| *x >= lo && *x <= hi && *x > 0.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Scan a range for the spectral intervals of one branch.
///
/// Band edges are located by bisecting the edge indicator between adjacent
/// scan points whose membership differs, to within `tol`. Edges are labeled
/// by the sign of `q*` there (`+2` center, `-2` corner). Isolated flat-band
/// points, which carry no measure, are reported separately.
pub fn band_structure(
    m: &LatticeModel,
    branch: Branch,
    range: (f64, f64),
    grid: usize,
    tol: f64,
) -> Result<BandSet> {
    let (lo, hi) = range;
    if !(lo > 0.0 && lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if grid < 100 {
        return Err(Error::InvalidParameter("grid must be >= 100".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }

    let xs = scan_points(m, branch, lo, hi, grid);
    let in_band: Vec<bool> = xs
        .iter()
        .map(|&x| {
            matches!(
                membership(m, x, branch).map(|v| v.status),
                Ok(BandStatus::InBand)
            )
        })
        .collect();

    let refine = |a: f64, b: f64| -> f64 {
        let f = |x: f64| edge_indicator(m, x, branch);
        match RootBracket::new(a, b) {
            Ok(bracket) => bisect(&f, bracket, tol),
            Err(_) => 0.5 * (a + b),
        }
    };

    let edge_kind_at = |x: f64| -> EdgeKind {
        match q_star_raw(m, x, branch) {
            Some(q) if q < 0.0 => EdgeKind::Corner,
            _ => EdgeKind::Center,
        }
    };

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        if !in_band[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < xs.len() && in_band[j + 1] {
            j += 1;
        }
        let band_lo = if i == 0 {
            xs[0]
        } else {
            refine(xs[i - 1], xs[i])
        };
        let band_hi = if j == xs.len() - 1 {
            xs[j]
        } else {
            refine(xs[j], xs[j + 1])
        };
        if band_hi > band_lo {
            intervals.push(BandInterval {
                lo: band_lo,
                hi: band_hi,
                edge_lo: edge_kind_at(band_lo),
                edge_hi: edge_kind_at(band_hi),
            });
        }
        i = j + 1;
    }

    // isolated flat-band candidates: the G = 0 points
    let mut flat_points = Vec::new();
    if branch == Branch::Positive {
        let mut candidates = vec![1.0];
        let n_max = (hi * m.ell / PI).floor() as i64;
        for n in 1..=n_max {
            candidates.push(PI * n as f64 / m.ell);
        }
        for x in candidates {
            if x >= lo && x <= hi {
                if let Ok(v) = membership(m, x, branch) {
                    if v.status == BandStatus::FlatBand {
                        flat_points.push(x);
                    }
                }
            }
        }
        flat_points.sort_by(f64::total_cmp);
        flat_points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }

    Ok(BandSet {
        branch,
        intervals,
        flat_points,
    })
}

/// The coupling phase at which the lattice has a flat band at `k = 1`:
/// `pi/2 - l` reduced mod `pi/2` into `[0, pi/2)`.
pub fn flat_band_mu(ell: f64) -> Result<f64> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "edge length must be positive, got {ell}"
        )));
    }
    Ok((PI / 2.0 - ell).rem_euclid(PI / 2.0))
}

/// Asymptotic energy-width bound `(8/l) cot(mu)` of the high bands; diverges
/// at the interval endpoints.
pub fn band_width_bound(m: &LatticeModel, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("band index must be >= 1".into()));
    }
    if m.mu <= 0.0 || m.mu >= PI / 2.0 {
        return Err(Error::EndpointDivergence { mu: m.mu });
    }
    Ok(8.0 / m.ell / m.mu.tan())
}

/// Fraction of the energy window `[0, k_max^2]` covered by spectrum,
/// measured on the energy axis from the positive-branch band intervals.
pub fn p_sigma_estimate(m: &LatticeModel, k_max: f64, grid: usize) -> Result<f64> {
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "k_max must be positive, got {k_max}"
        )));
    }
    let lo = (1e-4f64).min(k_max / 100.0);
    let bands = band_structure(m, Branch::Positive, (lo, k_max), grid.max(100), 1e-10)?;
    let energy: f64 = bands.intervals.iter().map(|b| b.energy_width()).sum();
    Ok(energy / (k_max * k_max))
}

/// The two positive roots `tan(mu/2)` and `tan(mu/2 + pi/4)` of the
/// large-`l` negative-branch condition
/// `kappa^4 + 1 - 6 kappa^2 + 4 kappa (kappa^2 - 1) cot(2 mu) = 0`.
pub fn negative_asymptotic_roots(mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu < PI / 2.0) {
        return Err(Error::EndpointDivergence { mu });
    }
    Ok(((0.5 * mu).tan(), (0.5 * mu + PI / 4.0).tan()))
}

// ---------------------------------------------------------------------------
// Fermi surfaces
// ---------------------------------------------------------------------------

/// Trace the level set `cos(theta_1) + cos(theta_2) = q` on a `grid x grid`
/// mesh of the Brillouin zone. Crossing points found by sign interpolation
/// along cell edges are refined by bisection, so each returned point
/// satisfies the level equation to far better than 1e-8.
pub fn brillouin_contour(q: f64, grid: usize) -> Result<Vec<Quasimomentum>> {
    if q.abs() > 2.0 {
        return Err(Error::InvalidParameter(format!(
            "level {q} outside [-2, 2]"
        )));
    }
    if grid < 8 {
        return Err(Error::InvalidParameter("grid must be >= 8".into()));
    }
    if (q - 2.0).abs() < 1e-12 {
        return Ok(vec![Quasimomentum {
            theta1: 0.0,
            theta2: 0.0,
        }]);
    }
    if (q + 2.0).abs() < 1e-12 {
        return Ok(vec![Quasimomentum {
            theta1: PI,
            theta2: PI,
        }]);
    }

    // Tiny contours hug the zone center (q near 2) or corner (q near -2);
    // shrink the mesh window so they stay resolved.
    let rad = (2.0 * (2.0 - q.abs())).sqrt();
    let (c1, c2, half) = if 3.0 * rad < PI {
        let center = if q > 0.0 { 0.0 } else { PI };
        (center, center, 3.0 * rad)
    } else {
        (0.0, 0.0, PI)
    };

    let f = |t1: f64, t2: f64| t1.cos() + t2.cos() - q;
    let n = grid;
    let step = 2.0 * half / n as f64;
    let coord = |c: f64, i: usize| c - half + step * i as f64;
    let mut points = Vec::new();

    let mut wrap = |t1: f64, t2: f64| {
        let w = |t: f64| {
            let mut x = (t + PI).rem_euclid(2.0 * PI) - PI;
            if x < -PI {
                x += 2.0 * PI;
            }
            x
        };
        points.push(Quasimomentum {
            theta1: w(t1),
            theta2: w(t2),
        });
    };

    // horizontal cell edges: vary theta1 at fixed theta2
    for j in 0..=n {
        let t2 = coord(c2, j);
        for i in 0..n {
            let (a, b) = (coord(c1, i), coord(c1, i + 1));
            let (fa, fb) = (f(a, t2), f(b, t2));
            if fa == 0.0 {
                wrap(a, t2);
            } else if (fa < 0.0) != (fb < 0.0) {
                let g = |t: f64| f(t, t2);
                let root = bisect(&g, RootBracket::new(a, b)?, 1e-12);
                wrap(root, t2);
            }
        }
    }
    // vertical cell edges: vary theta2 at fixed theta1
    for i in 0..=n {
        let t1 = coord(c1, i);
        for j in 0..n {
            let (a, b) = (coord(c2, j), coord(c2, j + 1));
            let (fa, fb) = (f(t1, a), f(t1, b));
            if fa == 0.0 {
                wrap(t1, a);
            } else if (fa < 0.0) != (fb < 0.0) {
                let g = |t: f64| f(t1, t);
                let root = bisect(&g, RootBracket::new(a, b)?, 1e-12);
                wrap(t1, root);
            }
        }
    }
    Ok(points)
}

/// Fermi surface at an in-band momentum: the quasimomentum contour solving
/// the spectral condition at `k`.
pub fn fermi_surface(m: &LatticeModel, k: f64, grid: usize) -> Result<FermiSurface> {
    let verdict = membership(m, k, Branch::Positive)?;
    match verdict.status {
        BandStatus::InBand => {
            let q = verdict.q_star.expect("in-band verdict carries q*");
            let points = brillouin_contour(q, grid)?;
            Ok(FermiSurface { k, points })
        }
        BandStatus::FlatBand => Err(Error::InvalidParameter(format!(
            "momentum {k} sits on a flat band: the contour is the whole zone"
        ))),
        BandStatus::Gap | BandStatus::ExcludedLatticePoint => Err(Error::MomentumInGap { k }),
    }
}

// ---------------------------------------------------------------------------
// Dirac points
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct GapProbe {
    kind: EdgeKind,
    /// position of the q* bulge extremum inside the gap
    k_crit: f64,
    /// tangency margin `|q*_extremum| - 2`; zero exactly when bands touch
    margin: f64,
    /// half-width of a pole-free window around the bulge
    window: f64,
}

/// Tolerance accepting a refined tangency margin as an actual band touching.
const TOUCH_TOL: f64 = 1e-9;

/// Extremum of the q* bulge inside `(lo, hi)`: the local maximum for a
/// center-type gap (q* > 2 inside), the local minimum for a corner-type one.
/// Sampling guards against pole tails by discarding huge values.
fn bulge_extremum(m: &LatticeModel, lo: f64, hi: f64, kind: EdgeKind) -> Option<(f64, f64)> {
    let n = 128usize;
    let value = |x: f64| -> Option<f64> {
        let q = q_star_raw(m, x, Branch::Positive)?;
        if q.abs() > 10.0 {
            return None;
        }
        Some(match kind {
            EdgeKind::Center => q,
            EdgeKind::Corner => -q,
        })
    };
    let mut best: Option<(usize, f64)> = None;
    let xs: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        if let Some(v) = value(x) {
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((i, v));
            }
        }
    }
    let (idx, _) = best?;
    let (mut a, mut b) = (xs[idx.saturating_sub(1)], xs[(idx + 1).min(n)]);
    // golden-section maximization of the (locally unimodal) bulge
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (value(x1)?, value(x2)?);
    for _ in 0..80 {
        if b - a < 1e-12 * b.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = value(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = value(x1)?;
        }
    }
    let k_crit = 0.5 * (a + b);
    let v = value(k_crit)?;
    Some((k_crit, v - 2.0))
}

/// Distance from `x` to the nearest pole of q* (a lattice point or k = 1).
fn pole_distance(m: &LatticeModel, x: f64) -> f64 {
    let cell = PI / m.ell;
    let nearest_lattice = (x / cell).round().max(1.0) * cell;
    (x - nearest_lattice).abs().min((x - 1.0).abs())
}

/// Probe every pole-free gap of the band set for its bulge extremum.
fn probe_gaps(m: &LatticeModel, bands: &BandSet, k_range: (f64, f64)) -> Vec<GapProbe> {
    let mut probes = Vec::new();
    for pair in bands.intervals.windows(2) {
        let (a, b) = (pair[0].hi, pair[1].lo);
        if b - a < 1e-10 {
            continue;
        }
        // skip gaps containing a pole of q* (lattice points or k = 1)
        let n_lo = (a * m.ell / PI).ceil() as i64;
        let n_hi = (b * m.ell / PI).floor() as i64;
        if n_hi >= n_lo || (a < 1.0 && 1.0 < b) {
            continue;
        }
        if a <= k_range.0 || b >= k_range.1 {
            continue;
        }
        let Some(qm) = q_star_raw(m, 0.5 * (a + b), Branch::Positive) else {
            continue;
        };
        let kind = if qm > 0.0 {
            EdgeKind::Center
        } else {
            EdgeKind::Corner
        };
        if let Some((k_crit, margin)) = bulge_extremum(m, a, b, kind) {
            let window = (0.4 * pole_distance(m, k_crit))
                .min(4.0 * (b - a))
                .max(1e-4);
            probes.push(GapProbe {
                kind,
                k_crit,
                margin,
                window,
            });
        }
    }
    probes
}

/// Sweep the coupling phase and report parameter pairs where a spectral gap
/// closes. The bulge of q* over a gap touches the band boundary (+2 at the
/// zone center, -2 at the corner) quadratically in mu: the margin dips to
/// zero at the touching and reopens, so closings are located by minimizing
/// the tracked margin over mu and accepting minima below 1e-9.
/// Flat-band parameters are never reported because gaps adjacent to the q*
/// poles are excluded from the probes.
pub fn dirac_points(
    ell: f64,
    mu_range: (f64, f64),
    k_range: (f64, f64),
    grid: usize,
) -> Result<Vec<DiracPoint>> {
    let (mu_lo, mu_hi) = mu_range;
    if !(mu_lo > 0.0 && mu_lo < mu_hi && mu_hi < PI / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "phase range ({mu_lo}, {mu_hi}) must lie inside (0, pi/2)"
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be >= 2".into()));
    }
    let band_grid = 400;
    let probes_at = |mu: f64| -> Result<Vec<GapProbe>> {
        let m = LatticeModel::new(mu, ell)?;
        let bands = band_structure(&m, Branch::Positive, k_range, band_grid, 1e-11)?;
        Ok(probe_gaps(&m, &bands, k_range))
    };

    let mus: Vec<f64> = (0..=grid)
        .map(|i| mu_lo + (mu_hi - mu_lo) * i as f64 / grid as f64)
        .collect();
    let all_probes: Vec<Vec<GapProbe>> =
        mus.iter().map(|&mu| probes_at(mu)).collect::<Result<_>>()?;

    // chain probes across mu samples by kind and bulge proximity
    let half_cell = PI / (2.0 * ell);
    let mut chains: Vec<Vec<(usize, GapProbe)>> = Vec::new();
    for (i, probes) in all_probes.iter().enumerate() {
        for p in probes {
            let joined = chains.iter_mut().find(|chain| {
                let (last_i, last_p) = chain.last().unwrap();
                *last_i + 1 == i
                    && last_p.kind == p.kind
                    && (last_p.k_crit - p.k_crit).abs() < half_cell
            });
            match joined {
                Some(chain) => chain.push((i, *p)),
                None => chains.push(vec![(i, *p)]),
            }
        }
    }

    let mut found: Vec<DiracPoint> = Vec::new();
    for chain in &chains {
        for w in 0..chain.len() {
            let (i, p) = chain[w];
            let is_min = (w == 0 || chain[w - 1].1.margin >= p.margin)
                && (w + 1 == chain.len() || chain[w + 1].1.margin >= p.margin);
            if !is_min || p.margin > 1e-2 {
                continue;
            }
            // when the chain ends because the gap shrank below scan
            // resolution, the touching lies just beyond it: widen the
            // bracket by one sweep step on the broken side
            let lo = if w > 0 {
                mus[chain[w - 1].0]
            } else {
                mus[i.saturating_sub(1)]
            };
            let hi = if w + 1 < chain.len() {
                mus[chain[w + 1].0]
            } else {
                mus[(i + 1).min(mus.len() - 1)]
            };
            if hi <= lo {
                continue;
            }
            if let Some(point) = refine_closing(ell, (lo, hi), &p) {
                let duplicate = found
                    .iter()
                    .any(|d| (d.mu - point.mu).abs() < 1e-6 && (d.k - point.k).abs() < 1e-4);
                if !duplicate {
                    found.push(point);
                }
            }
        }
    }
    found.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    Ok(found)
}

/// Golden-section minimization of the tangency margin over mu, tracking the
/// bulge inside a fixed pole-free window; accepts only an actual touching.
fn refine_closing(ell: f64, mu_bracket: (f64, f64), seed: &GapProbe) -> Option<DiracPoint> {
    let (k_lo, k_hi) = (seed.k_crit - seed.window, seed.k_crit + seed.window);
    let eval = |mu: f64| -> Option<(f64, f64)> {
        let m = LatticeModel::new(mu, ell).ok()?;
        bulge_extremum(&m, k_lo, k_hi, seed.kind)
    };
    let (mut a, mut b) = mu_bracket;
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut r1, mut r2) = (eval(x1)?, eval(x2)?);
    for _ in 0..80 {
        if b - a < 1e-8 {
            break;
        }
        if r1.1 > r2.1 {
            a = x1;
            x1 = x2;
            r1 = r2;
            x2 = a + phi * (b - a);
            r2 = eval(x2)?;
        } else {
            b = x2;
            x2 = x1;
            r2 = r1;
            x1 = b - phi * (b - a);
            r1 = eval(x1)?;
        }
    }
    let mu_star = 0.5 * (a + b);
    let (k_star, margin) = eval(mu_star)?;
    if margin.abs() > TOUCH_TOL {
        return None;
    }
    Some(DiracPoint {
        mu: mu_star,
        k: k_star,
        location: seed.kind,
    })
}
