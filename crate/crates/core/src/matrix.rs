//! Dense complex matrices for the handful of small operators this crate needs:
//! density matrices, the Wootters `ζ` product, and Choi matrices.
//!
//! Two eigen-routines live here. [`eigenvalues`] handles general (possibly
//! non-normal) complex input by Householder reduction to Hessenberg form
//! followed by shifted QR sweeps. [`eigh`] is a cyclic Jacobi method for
//! Hermitian input that also returns eigenvectors.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Largest dimension accepted by the eigen-routines.
pub const MAX_EIGEN_DIM: usize = 16;

/// Default tolerance for Hermiticity and positivity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Square dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails if the length is not a
    /// perfect square or an entry is not finite.
    pub fn from_row_major(data: Vec<Complex>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Complex> {
        if row < self.dim && col < self.dim {
            Some(self.data[row * self.dim + col])
        } else {
            None
        }
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        for (k, z) in self.data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / self.dim,
                    col: k % self.dim,
                });
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the slow digit.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m_ij − conj(m_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Partial trace over the given sites, keeping the remaining ones in order.
    /// `dims` lists the local dimensions with site 0 as the slowest digit.
    pub fn partial_trace(&self, dims: &[usize], traced: &[usize]) -> Result<CMatrix> {
        let total: usize = dims.iter().product();
        if total != self.dim {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: self.dim,
            });
        }
        let kept: Vec<usize> = (0..dims.len()).filter(|s| !traced.contains(s)).collect();
        let kept_dim: usize = kept.iter().map(|&s| dims[s]).product();
        let mut out = CMatrix::zeros(kept_dim.max(1));
        let digits = |mut idx: usize| {
            let mut d = vec![0; dims.len()];
            for s in (0..dims.len()).rev() {
                d[s] = idx % dims[s];
                idx /= dims[s];
            }
            d
        };
        let compose = |d: &[usize]| kept.iter().fold(0, |acc, &s| acc * dims[s] + d[s]);
        for r in 0..self.dim {
            let dr = digits(r);
            for c in 0..self.dim {
                let dc = digits(c);
                if traced.iter().all(|&s| dr[s] == dc[s]) {
                    out[(compose(&dr), compose(&dc))] += self[(r, c)];
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        assert!(
            r < self.dim && c < self.dim,
            "index ({r}, {c}) out of bounds for {0}x{0} matrix",
            self.dim
        );
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        assert!(
            r < self.dim && c < self.dim,
            "index ({r}, {c}) out of bounds for {0}x{0} matrix",
            self.dim
        );
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({0}x{0}) [", self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:>+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn check_eigen_input(m: &CMatrix) -> Result<()> {
    if m.dim > MAX_EIGEN_DIM {
        return Err(Error::DimensionTooLarge {
            dim: m.dim,
            max: MAX_EIGEN_DIM,
        });
    }
    m.check_finite()
}

/// All eigenvalues of `m`, with multiplicity and in no particular order.
///
/// Householder reduction to upper Hessenberg form, then single-shift complex
/// QR iterations with Wilkinson shifts and an exceptional shift every tenth
/// sweep on a stalled block.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex>> {
    check_eigen_input(m)?;
    let n = m.dim;
    let mut h = m.clone();
    if n == 1 {
        return Ok(vec![h[(0, 0)]]);
    }
    hessenberg_in_place(&mut h);

    let norm = h.frobenius_norm();
    if norm == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let eps = f64::EPSILON;
    let max_iter_per_eig = 60;

    let mut eig = vec![ZERO; n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // Look for a negligible subdiagonal entry inside the active window.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if sub <= eps * scale || sub <= f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        if iter > max_iter_per_eig {
            let residual = (lo + 1..=hi)
                .map(|k| h[(k, k - 1)].norm())
                .fold(0.0, f64::max);
            return Err(Error::EigensolverFailed { residual });
        }

        let shift = if iter.is_multiple_of(10) {
            h[(hi, hi)] + Complex::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(eig)
}

fn hessenberg_in_place(a: &mut CMatrix) {
    let n = a.dim;
    for k in 0..n.saturating_sub(2) {
        let norm_x = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * norm_x;
        let mut v: Vec<Complex> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A ← (I − 2vv†) A
        for c in 0..n {
            let dot: Complex = v
                .iter()
                .enumerate()
                .map(|(j, vj)| vj.conj() * a[(k + 1 + j, c)])
                .sum();
            for (j, vj) in v.iter().enumerate() {
                a[(k + 1 + j, c)] -= 2.0 * vj * dot;
            }
        }
        // A ← A (I − 2vv†)
        for r in 0..n {
            let dot: Complex = v
                .iter()
                .enumerate()
                .map(|(j, vj)| a[(r, k + 1 + j)] * vj)
                .sum();
            for (j, vj) in v.iter().enumerate() {
                a[(r, k + 1 + j)] -= 2.0 * dot * vj.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of the trailing 2×2 block closest to its bottom-right entry.
fn wilkinson_shift(a: Complex, b: Complex, c: Complex, d: Complex) -> Complex {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5) * ((a - d) * 0.5) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Givens rotation `[c s; −s̄ c]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex, b: Complex) -> (f64, Complex) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, ZERO);
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// One shifted QR step `H − μI = QR`, `H ← RQ + μI` on rows/cols `lo..=hi`.
fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex) {
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (offset, &(c, s)) in rots.iter().enumerate() {
        let k = lo + offset;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns real eigenvalues (unsorted) and the unitary whose
/// columns are the matching eigenvectors.
pub fn eigh(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    check_eigen_input(m)?;
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim;
    // Symmetrize so tiny Hermiticity noise does not stall the sweeps.
    let mut a = CMatrix::from_fn(n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();
    let off = |a: &CMatrix| {
        let mut s = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let max_sweeps = 100;
    let mut sweep = 0;
    while off(&a) > f64::EPSILON * norm * 1e-2 && norm > 0.0 {
        sweep += 1;
        if sweep > max_sweeps {
            return Err(Error::EigensolverFailed { residual: off(&a) });
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Column rotation U on (p, q): [[c, s], [−s·e^{−iφ}, c·e^{−iφ}]].
                let ph = phase.conj();
                let u = [
                    [Complex::new(c, 0.0), Complex::new(s, 0.0)],
                    [-ph * s, ph * c],
                ];
                // A ← A U
                for r in 0..n {
                    let x = a[(r, p)];
                    let y = a[(r, q)];
                    a[(r, p)] = x * u[0][0] + y * u[1][0];
                    a[(r, q)] = x * u[0][1] + y * u[1][1];
                }
                // A ← U† A
                for col in 0..n {
                    let x = a[(p, col)];
                    let y = a[(q, col)];
                    a[(p, col)] = u[0][0].conj() * x + u[1][0].conj() * y;
                    a[(q, col)] = u[0][1].conj() * x + u[1][1].conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex::new(a[(q, q)].re, 0.0);
                // V ← V U
                for r in 0..n {
                    let x = v[(r, p)];
                    let y = v[(r, q)];
                    v[(r, p)] = x * u[0][0] + y * u[1][0];
                    v[(r, q)] = x * u[0][1] + y * u[1][1];
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

/// True iff the smallest eigenvalue of the Hermitian matrix `m` is ≥ −tol.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(m, tol)? >= -tol)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix, tol: f64) -> Result<f64> {
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let eig = eigenvalues(m)?;
    Ok(eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}
