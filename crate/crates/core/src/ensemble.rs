//! Hermitian operators, density matrices, projectors, POVMs and ensembles.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards. Internally every index is 0-based.

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};

/// Hermiticity tolerance on the raw input before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Input matrices further than this from Hermitian are rejected outright.
const HERMITIAN_REJECT: f64 = 1e-6;
pub const PSD_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const IDEMPOTENT_TOL: f64 = 1e-9;
pub const COMPLETENESS_TOL: f64 = 1e-8;
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// A `d×d` complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    /// Symmetrizes `(A + A†)/2`. Rejects non-square input and matrices that
    /// are visibly non-Hermitian, i.e. not just off by roundoff.
    pub fn new(mat: CMat) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::validation(format!(
                "operator must be square and non-empty, got {}×{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("operator has non-finite entries"));
        }
        let scale = 1.0 + linalg::frobenius(&mat);
        let defect = linalg::hermiticity_defect(&mat);
        if defect > HERMITIAN_REJECT * scale {
            return Err(Error::validation(format!(
                "operator is not Hermitian (max |A_ij - conj A_ji| = {defect:e})"
            )));
        }
        Ok(Self {
            mat: linalg::hermitize(&mat),
        })
    }

    pub fn zeros(d: usize) -> Self {
        Self { mat: linalg::zeros(d) }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mat: linalg::identity(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.mat)
    }

    /// Eigenvalues, non-increasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh_desc(&self.mat)
    }

    /// `tr(self · other)`, real for Hermitian arguments.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        linalg::re_trace_product(&self.mat, &other.mat)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            mat: self.mat.scale(t),
        }
    }

    pub fn plus(&self, other: &HermitianOperator) -> Self {
        Self {
            mat: &self.mat + &other.mat,
        }
    }

    /// `U A U†`.
    pub fn conjugated_by(&self, u: &CMat) -> Self {
        Self {
            mat: linalg::hermitize(&(u * &self.mat * u.adjoint())),
        }
    }

    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        linalg::frobenius(&(&self.mat - &other.mat))
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::validation(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = op.eigenvalues().last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::validation(format!(
                "density matrix is not PSD (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(mat: CMat) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &CVec) -> Result<Self> {
        check_normalized(psi)?;
        Self::from_matrix(linalg::outer(psi))
    }

    /// `𝟙/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            op: HermitianOperator::identity(d).scaled(1.0 / d as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    /// `v ρ + (1 − v) 𝟙/d`.
    pub fn depolarized(&self, v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("visibility {v} outside [0, 1]")));
        }
        let d = self.dim();
        let mixed = HermitianOperator::identity(d).scaled((1.0 - v) / d as f64);
        Ok(Self {
            op: self.op.scaled(v).plus(&mixed),
        })
    }

    pub fn conjugated_by(&self, u: &CMat) -> Self {
        Self {
            op: self.op.conjugated_by(u),
        }
    }

    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.op.distance(&other.op)
    }
}

/// Rank-`r` orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceProjector {
    op: HermitianOperator,
    rank: usize,
}

impl SubspaceProjector {
    pub fn new(op: HermitianOperator, rank: usize) -> Result<Self> {
        if rank == 0 || rank > op.dim() {
            return Err(Error::validation(format!(
                "projector rank {rank} outside 1..={}",
                op.dim()
            )));
        }
        let m = op.matrix();
        let idem = linalg::frobenius(&(m * m - m));
        if idem > IDEMPOTENT_TOL {
            return Err(Error::validation(format!("projector not idempotent (‖Π²−Π‖ = {idem:e})")));
        }
        let tr = op.trace();
        if (tr - rank as f64).abs() > IDEMPOTENT_TOL {
            return Err(Error::validation(format!("projector trace {tr} differs from rank {rank}")));
        }
        Ok(Self { op, rank })
    }

    /// Projector onto the column span of an isometry `V` (`V†V = 𝟙`).
    pub fn from_isometry(v: &CMat) -> Result<Self> {
        let gram = v.adjoint() * v;
        if linalg::frobenius(&(gram - linalg::identity(v.ncols()))) > 1e-9 {
            return Err(Error::validation("columns are not orthonormal"));
        }
        Self::new(HermitianOperator::new(v * v.adjoint())?, v.ncols())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    /// `‖Π A Π − A‖_F`: zero iff `A` lives in the subspace.
    pub fn confinement_defect(&self, a: &CMat) -> f64 {
        let p = self.matrix();
        linalg::frobenius(&(p * a * p - a))
    }
}

/// A measurement: PSD elements summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let Some(first) = elements.first() else {
            return Err(Error::validation("POVM needs at least one element"));
        };
        let d = first.dim();
        let mut total = linalg::zeros(d);
        for (b, e) in elements.iter().enumerate() {
            if e.dim() != d {
                return Err(Error::validation(format!(
                    "POVM element {b} has dim {}, expected {d}",
                    e.dim()
                )));
            }
            let min = e.eigenvalues().last().copied().unwrap_or(0.0);
            if min < -PSD_TOL {
                return Err(Error::validation(format!(
                    "POVM element {b} is not PSD (min eigenvalue {min:e})"
                )));
            }
            total += e.matrix();
        }
        let defect = linalg::frobenius(&(total - linalg::identity(d)));
        if defect > COMPLETENESS_TOL {
            return Err(Error::validation(format!(
                "POVM elements do not sum to identity (defect {defect:e})"
            )));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in the columns of `u`.
    pub fn from_basis(u: &CMat) -> Result<Self> {
        let d = u.nrows();
        let elements = (0..d)
            .map(|i| HermitianOperator::new(linalg::outer(&u.column(i).into_owned())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(elements)
    }

    pub fn computational(d: usize) -> Self {
        Self::from_basis(&linalg::identity(d)).expect("identity basis is a valid POVM")
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Outcome probabilities `tr(ρ M_b)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.elements.iter().map(|m| m.inner(rho.operator())).collect()
    }
}

/// An ordered list of `m ≥ 1` density matrices on a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    dim: usize,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(states: Vec<DensityMatrix>) -> Result<Self> {
        let Some(first) = states.first() else {
            return Err(Error::validation("ensemble needs at least one state"));
        };
        let dim = first.dim();
        if let Some(x) = states.iter().position(|s| s.dim() != dim) {
            return Err(Error::validation(format!(
                "state {x} has dim {}, expected {dim}",
                states[x].dim()
            )));
        }
        Ok(Self { dim, states })
    }

    /// `{v|ψ_x⟩⟨ψ_x| + (1−v)𝟙/d}` for the given pure states.
    pub fn isotropic(pure_states: &[CVec], v: f64) -> Result<Self> {
        Self::new(
            pure_states
                .iter()
                .map(|psi| make_isotropic(psi, v))
                .collect::<Result<_>>()?,
        )
    }

    /// The first `m` computational-basis states under isotropic noise.
    pub fn orthonormal(d: usize, m: usize, v: f64) -> Result<Self> {
        if m == 0 || m > d {
            return Err(Error::domain(format!("need 1 ≤ m ≤ d, got m={m}, d={d}")));
        }
        let states: Vec<CVec> = (0..m).map(|i| linalg::basis_vector(d, i)).collect();
        Self::isotropic(&states, v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// Every state mixed with white noise at visibility `v`.
    pub fn depolarized(&self, v: f64) -> Result<Self> {
        Self::new(self.states.iter().map(|s| s.depolarized(v)).collect::<Result<_>>()?)
    }

    /// `{U ρ_x U†}`.
    pub fn rotated(&self, u: &CMat) -> Self {
        Self {
            dim: self.dim,
            states: self.states.iter().map(|s| s.conjugated_by(u)).collect(),
        }
    }

    /// Largest per-state Frobenius distance.
    pub fn max_distance(&self, other: &Ensemble) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_normalized(psi: &CVec) -> Result<()> {
    let n = psi.norm();
    if psi.is_empty() || (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::validation(format!("state vector has norm {n}, expected 1")));
    }
    Ok(())
}

/// Scale a non-zero vector to unit norm.
pub fn normalized(psi: &CVec) -> Result<CVec> {
    let n = psi.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::validation("cannot normalize a zero vector"));
    }
    Ok(psi.unscale(n))
}

/// `v|ψ⟩⟨ψ| + (1−v)𝟙/d`.
pub fn make_isotropic(psi: &CVec, v: f64) -> Result<DensityMatrix> {
    check_normalized(psi)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::domain(format!("visibility {v} outside [0, 1]")));
    }
    DensityMatrix::pure(psi)?.depolarized(v)
}

/// Rank of the Gram matrix of the given vectors: the dimension of their span.
pub fn span_dimension(pure_states: &[CVec]) -> Result<usize> {
    let Some(first) = pure_states.first() else {
        return Err(Error::domain("span dimension of an empty list"));
    };
    let d = first.len();
    for (i, psi) in pure_states.iter().enumerate() {
        if psi.len() != d {
            return Err(Error::validation(format!("vector {i} has length {}, expected {d}", psi.len())));
        }
        check_normalized(psi)?;
    }
    let m = pure_states.len();
    let gram = CMat::from_fn(m, m, |i, j| pure_states[i].dotc(&pure_states[j]));
    Ok(linalg::numerical_rank(&gram, 1e-9))
}

/// `d×r` isometry made of the selected columns of `u`.
pub fn basis_isometry(u: &CMat, subset: &[usize]) -> Result<CMat> {
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::validation("basis matrix must be square"));
    }
    if subset.is_empty() {
        return Err(Error::domain("subset must contain at least one index"));
    }
    let mut seen = vec![false; d];
    for &i in subset {
        if i >= d {
            return Err(Error::domain(format!("index {i} out of range 0..{d}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::domain(format!("duplicate index {i}")));
        }
    }
    Ok(CMat::from_fn(d, subset.len(), |row, k| u[(row, subset[k])]))
}

/// `Σ_{i∈subset} U|i⟩⟨i|U†` (0-based indices).
pub fn projector_from_basis_subset(u: &CMat, subset: &[usize]) -> Result<SubspaceProjector> {
    if linalg::unitarity_defect(u) > 1e-9 {
        return Err(Error::validation("basis matrix is not unitary"));
    }
    let v = basis_isometry(u, subset)?;
    SubspaceProjector::new(HermitianOperator::new(&v * v.adjoint())?, subset.len())
}

/// Uniform superposition `Σ_i |i⟩/√d`.
pub fn uniform_superposition(d: usize) -> CVec {
    CVec::from_element(d, c(1.0 / (d as f64).sqrt(), 0.0))
}
