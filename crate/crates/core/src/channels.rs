//! Local channels as transfer tensors and their composition over
//! independent qudits.
//!
//! A transfer tensor `A[i][i'][l][l']` maps single-qudit matrix elements as
//! `ρ_{ii'}(t) = Σ_{ll'} A_{ii'}^{ll'} ρ_{ll'}(0)`. For `N` qudits coupled to
//! separate reservoirs the composite map is the product of the local tensors
//! on every index pair, applied here one site at a time.
//!
//! Qubit convention: local index 0 is the excited level `|1⟩`, index 1 the
//! ground level `|0⟩`; composite indices put site 0 in the slowest digit, so
//! for two qubits the order is `|11⟩, |10⟩, |01⟩, |00⟩`.

use crate::density::DensityMatrix;
use crate::env::Uvz;
use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, Complex};
use crate::states::XState;

/// Tolerance for the trace-preservation and Hermiticity-covariance checks.
pub const TENSOR_TOL: f64 = 1e-12;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct TransferTensor {
    d: usize,
    a: Vec<Complex>,
}

impl TransferTensor {
    #[inline]
    fn idx(d: usize, i: usize, ip: usize, l: usize, lp: usize) -> usize {
        ((i * d + ip) * d + l) * d + lp
    }

    /// Builds a tensor from `f(i, i', l, l')`, checking both invariants.
    pub fn from_fn(
        d: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> Complex,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("local dimension must be positive".into()));
        }
        let mut a = vec![ZERO; d * d * d * d];
        for i in 0..d {
            for ip in 0..d {
                for l in 0..d {
                    for lp in 0..d {
                        a[Self::idx(d, i, ip, l, lp)] = f(i, ip, l, lp);
                    }
                }
            }
        }
        let t = Self { d, a };
        t.validate()?;
        Ok(t)
    }

    pub fn identity(d: usize) -> Self {
        let mut a = vec![ZERO; d * d * d * d];
        for i in 0..d {
            for ip in 0..d {
                a[Self::idx(d, i, ip, i, ip)] = ONE;
            }
        }
        Self { d, a }
    }

    /// Qubit tensor of the `(u, v, z)` map.
    pub fn from_uvz(q: &Uvz) -> Result<Self> {
        q.validate()?;
        Ok(Self::uvz_layout(q))
    }

    /// Like [`from_uvz`](Self::from_uvz) but without the complete-positivity
    /// check; the result is trace preserving and Hermiticity preserving for
    /// any finite `(u, v, z)`.
    pub fn from_uvz_unchecked(q: &Uvz) -> Result<Self> {
        if !(q.u.is_finite() && q.v.is_finite() && q.z.re.is_finite() && q.z.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite map {q:?}")));
        }
        Ok(Self::uvz_layout(q))
    }

    fn uvz_layout(q: &Uvz) -> Self {
        let mut a = vec![ZERO; 16];
        let re = |x: f64| Complex::new(x, 0.0);
        // Index 0 ≡ |1⟩, index 1 ≡ |0⟩.
        a[Self::idx(2, 0, 0, 0, 0)] = re(q.u);
        a[Self::idx(2, 0, 0, 1, 1)] = re(q.v);
        a[Self::idx(2, 1, 1, 0, 0)] = re(1.0 - q.u);
        a[Self::idx(2, 1, 1, 1, 1)] = re(1.0 - q.v);
        a[Self::idx(2, 0, 1, 0, 1)] = q.z;
        a[Self::idx(2, 1, 0, 1, 0)] = q.z.conj();
        Self { d: 2, a }
    }

    /// Tensor of the channel `ρ ↦ Σ_k K_k ρ K_k†`.
    pub fn from_kraus(ops: &[CMatrix]) -> Result<Self> {
        let d = ops
            .first()
            .map(CMatrix::dim)
            .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        if let Some(k) = ops.iter().find(|k| k.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: k.dim(),
            });
        }
        Self::from_fn(d, |i, ip, l, lp| {
            ops.iter().map(|k| k[(i, l)] * k[(ip, lp)].conj()).sum()
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, ip: usize, l: usize, lp: usize) -> Complex {
        assert!(i < self.d && ip < self.d && l < self.d && lp < self.d);
        self.a[Self::idx(self.d, i, ip, l, lp)]
    }

    /// Largest `|Σ_i A_{ii}^{ll'} − δ_{ll'}|`.
    pub fn trace_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for l in 0..d {
            for lp in 0..d {
                let s: Complex = (0..d).map(|i| self.a[Self::idx(d, i, i, l, lp)]).sum();
                let target = if l == lp { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Largest `|A_{i'i}^{l'l} − conj(A_{ii'}^{ll'})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.d;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for ip in 0..d {
                for l in 0..d {
                    for lp in 0..d {
                        let a = self.a[Self::idx(d, i, ip, l, lp)];
                        let b = self.a[Self::idx(d, ip, i, lp, l)];
                        worst = worst.max((b - a.conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let tp = self.trace_defect();
        if tp > TENSOR_TOL {
            return Err(Error::InvalidParameter(format!(
                "transfer tensor is not trace preserving (defect {tp:e})"
            )));
        }
        let h = self.hermiticity_defect();
        if h > TENSOR_TOL {
            return Err(Error::InvalidParameter(format!(
                "transfer tensor does not preserve Hermiticity (defect {h:e})"
            )));
        }
        Ok(())
    }

    /// Single-qudit action on a `d × d` matrix.
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: rho.dim(),
            });
        }
        let d = self.d;
        Ok(CMatrix::from_fn(d, |i, ip| {
            let mut s = ZERO;
            for l in 0..d {
                for lp in 0..d {
                    s += self.a[Self::idx(d, i, ip, l, lp)] * rho[(l, lp)];
                }
            }
            s
        }))
    }

    /// `C = Σ_{ll'} |l⟩⟨l'| ⊗ Φ(|l⟩⟨l'|)`.
    pub fn choi(&self) -> ChoiMatrix {
        let d = self.d;
        ChoiMatrix(CMatrix::from_fn(d * d, |r, c| {
            let (l, i) = (r / d, r % d);
            let (lp, ip) = (c / d, c % d);
            self.a[Self::idx(d, i, ip, l, lp)]
        }))
    }

    /// Kraus operators recovered from the Choi eigendecomposition;
    /// eigenvalues below `tol` are dropped.
    pub fn kraus(&self, tol: f64) -> Result<Vec<CMatrix>> {
        let d = self.d;
        let choi = self.choi();
        let (vals, vecs) = matrix::eigh(&choi.0, tol)?;
        if let Some(&neg) = vals.iter().find(|&&v| v < -tol) {
            return Err(Error::InvalidParameter(format!(
                "channel is not completely positive (Choi eigenvalue {neg:e})"
            )));
        }
        Ok(vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > tol)
            .map(|(k, &v)| {
                let s = v.sqrt();
                CMatrix::from_fn(d, |i, l| vecs[(l * d + i, k)] * s)
            })
            .collect())
    }
}

/// Choi matrix of a channel; positive semidefinite iff the channel is
/// completely positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix(pub CMatrix);

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        matrix::is_psd(&self.0, tol)
    }
}

pub fn transfer_from_uvz(q: &Uvz) -> Result<TransferTensor> {
    TransferTensor::from_uvz(q)
}

pub fn choi(tt: &TransferTensor) -> ChoiMatrix {
    tt.choi()
}

/// Evolves an `N`-qudit state under independent local channels, one tensor
/// per site (site 0 slowest).
pub fn compose_product(tensors: &[TransferTensor], rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let dims: Vec<usize> = tensors.iter().map(TransferTensor::dim).collect();
    let total: usize = dims.iter().product();
    if tensors.is_empty() || total != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: rho0.dim(),
        });
    }
    let n = rho0.dim();
    let mut cur = rho0.matrix().clone();
    // Stride of site s in the composite index.
    let strides: Vec<usize> = (0..dims.len())
        .map(|s| dims[s + 1..].iter().product())
        .collect();
    for (s, t) in tensors.iter().enumerate() {
        let (d, stride) = (dims[s], strides[s]);
        let mut next = CMatrix::zeros(n);
        for r in 0..n {
            let i = (r / stride) % d;
            let r_base = r - i * stride;
            for c in 0..n {
                let ip = (c / stride) % d;
                let c_base = c - ip * stride;
                let mut acc = ZERO;
                for l in 0..d {
                    for lp in 0..d {
                        let a = t.a[TransferTensor::idx(d, i, ip, l, lp)];
                        if a != ZERO {
                            acc += a * cur[(r_base + l * stride, c_base + lp * stride)];
                        }
                    }
                }
                next[(r, c)] = acc;
            }
        }
        cur = next;
    }
    Ok(DensityMatrix::from_trusted(cur))
}

/// Closed-form two-qubit evolution under local `(u, v, z)` maps, qubit A
/// first.
pub fn two_qubit_evolve(qa: &Uvz, qb: &Uvz, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    qa.validate()?;
    qb.validate()?;
    if rho0.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho0.dim(),
        });
    }
    Ok(DensityMatrix::from_trusted(evolve_elements(qa, qb, rho0.matrix())))
}

/// Two-qubit evolution restricted to X states, which the local maps
/// preserve.
pub fn evolve_x(qa: &Uvz, qb: &Uvz, x: &XState) -> XState {
    let (ua, va, za) = (qa.u, qa.v, qa.z);
    let (ub, vb, zb) = (qb.u, qb.v, qb.z);
    let [p1, p2, p3, p4] = x.diag;
    XState {
        diag: [
            ua * ub * p1 + ua * vb * p2 + va * ub * p3 + va * vb * p4,
            ua * (1.0 - ub) * p1 + ua * (1.0 - vb) * p2 + va * (1.0 - ub) * p3
                + va * (1.0 - vb) * p4,
            (1.0 - ua) * ub * p1 + (1.0 - ua) * vb * p2 + (1.0 - va) * ub * p3
                + (1.0 - va) * vb * p4,
            (1.0 - ua) * (1.0 - ub) * p1
                + (1.0 - ua) * (1.0 - vb) * p2
                + (1.0 - va) * (1.0 - ub) * p3
                + (1.0 - va) * (1.0 - vb) * p4,
        ],
        rho14: za * zb * x.rho14,
        rho23: za * zb.conj() * x.rho23,
    }
}

pub(crate) fn evolve_elements(qa: &Uvz, qb: &Uvz, m: &CMatrix) -> CMatrix {
    let (ua, va, za) = (qa.u, qa.v, qa.z);
    let (ub, vb, zb) = (qb.u, qb.v, qb.z);
    let p = |i: usize| m[(i, i)].re;
    let e = |i: usize, j: usize| m[(i, j)];
    let (p1, p2, p3, p4) = (p(0), p(1), p(2), p(3));

    let r11 = ua * ub * p1 + ua * vb * p2 + va * ub * p3 + va * vb * p4;
    let r22 = ua * (1.0 - ub) * p1 + ua * (1.0 - vb) * p2 + va * (1.0 - ub) * p3
        + va * (1.0 - vb) * p4;
    let r33 = (1.0 - ua) * ub * p1 + (1.0 - ua) * vb * p2 + (1.0 - va) * ub * p3
        + (1.0 - va) * vb * p4;
    let r44 = (1.0 - ua) * (1.0 - ub) * p1
        + (1.0 - ua) * (1.0 - vb) * p2
        + (1.0 - va) * (1.0 - ub) * p3
        + (1.0 - va) * (1.0 - vb) * p4;

    let r12 = zb * ua * e(0, 1) + zb * va * e(2, 3);
    let r13 = za * ub * e(0, 2) + za * vb * e(1, 3);
    let r14 = za * zb * e(0, 3);
    let r23 = za * zb.conj() * e(1, 2);
    let r24 = za * (1.0 - ub) * e(0, 2) + za * (1.0 - vb) * e(1, 3);
    let r34 = zb * (1.0 - ua) * e(0, 1) + zb * (1.0 - va) * e(2, 3);

    let mut out = CMatrix::from_real_diag(&[r11, r22, r33, r44]);
    for (i, j, v) in [
        (0, 1, r12),
        (0, 2, r13),
        (0, 3, r14),
        (1, 2, r23),
        (1, 3, r24),
        (2, 3, r34),
    ] {
        out[(i, j)] = v;
        out[(j, i)] = v.conj();
    }
    out
}
