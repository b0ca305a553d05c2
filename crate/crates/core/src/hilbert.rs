//! Dense complex state-vector and operator algebra over labeled
//! tensor-product spaces.
//!
//! Amplitude indexing is row-major in the space's label order (first label
//! most significant). Local operators are applied without materializing the
//! full-dimension matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const KIND_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;
pub const MIN_NORM: f64 = 1e-14;
/// Default eigencheck tolerance; built-in states are exact rationals over
/// √2, √6, so the only noise is arithmetic.
pub const EIGEN_TOL: f64 = 1e-9;

const DEFAULT_DIM_CAP: usize = 1 << 20;

/// A named subsystem with its local dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLabel {
    pub name: String,
    pub dim: usize,
}

/// An ordered list of subsystem labels fixing the tensor-product indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceDescriptor {
    labels: Vec<SubsystemLabel>,
}

impl SpaceDescriptor {
    pub fn new(labels: Vec<(impl Into<String>, usize)>) -> Result<Self> {
        Self::with_cap(labels, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(labels: Vec<(impl Into<String>, usize)>, cap: usize) -> Result<Self> {
        let labels: Vec<SubsystemLabel> = labels
            .into_iter()
            .map(|(name, dim)| SubsystemLabel { name: name.into(), dim })
            .collect();
        let mut total: usize = 1;
        for (i, l) in labels.iter().enumerate() {
            if l.dim == 0 {
                return Err(Error::Algebra(format!("subsystem {} has dimension 0", l.name)));
            }
            if labels[..i].iter().any(|m| m.name == l.name) {
                return Err(Error::Algebra(format!("duplicate subsystem name {}", l.name)));
            }
            total = total
                .checked_mul(l.dim)
                .filter(|&t| t <= cap)
                .ok_or_else(|| Error::Algebra(format!("total dimension exceeds cap {cap}")))?;
        }
        Ok(SpaceDescriptor { labels })
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(|l| l.name.as_str())
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(|l| l.dim).product()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::Algebra(format!("unknown subsystem label {name}")))
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.labels[self.position(name)?].dim)
    }

    /// Row-major strides, one per label.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.labels.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.labels[i + 1].dim;
        }
        s
    }

    /// Concatenation of disjoint spaces.
    pub fn concat(parts: &[&SpaceDescriptor]) -> Result<Self> {
        let mut labels = Vec::new();
        for p in parts {
            labels.extend(p.labels.iter().cloned());
        }
        SpaceDescriptor::new(labels.into_iter().map(|l| (l.name, l.dim)).collect())
    }
}

/// A normalized-or-weighted complex amplitude vector over a labeled space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: SpaceDescriptor,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(space: SpaceDescriptor, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != space.total_dim() {
            return Err(Error::Algebra(format!(
                "amplitude count {} does not match space dimension {}",
                amps.len(),
                space.total_dim()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Algebra("non-finite amplitude".into()));
        }
        Ok(StateVector { space, amps })
    }

    /// |i⟩ in the computational product basis.
    pub fn basis_state(space: SpaceDescriptor, index: usize) -> Result<Self> {
        let dim = space.total_dim();
        if index >= dim {
            return Err(Error::Algebra(format!("basis index {index} out of range {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { space, amps })
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        StateVector {
            space: self.space.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// Largest absolute amplitude difference; spaces must match.
    pub fn max_diff(&self, other: &StateVector) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::Algebra("space mismatch".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// What a local operator claims to be; the claim is checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Unitary,
    Projector,
    Hermitian,
}

/// A dense operator acting on an order-preserving subset of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator {
    targets: Vec<String>,
    dim: usize,
    matrix: Vec<Complex64>, // row-major dim x dim
    kind: OperatorKind,
}

impl LocalOperator {
    pub fn new(
        targets: Vec<String>,
        dim: usize,
        matrix: Vec<Complex64>,
        kind: OperatorKind,
    ) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::Algebra(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                dim * dim
            )));
        }
        let op = LocalOperator { targets, dim, matrix, kind };
        op.check_kind()?;
        Ok(op)
    }

    pub fn unitary(targets: Vec<String>, dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        Self::new(targets, dim, matrix, OperatorKind::Unitary)
    }

    pub fn projector(targets: Vec<String>, dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        Self::new(targets, dim, matrix, OperatorKind::Projector)
    }

    pub fn hermitian(targets: Vec<String>, dim: usize, matrix: Vec<Complex64>) -> Result<Self> {
        Self::new(targets, dim, matrix, OperatorKind::Hermitian)
    }

    pub fn identity(targets: Vec<String>, dim: usize) -> Self {
        LocalOperator {
            targets,
            dim,
            matrix: mat_identity(dim),
            kind: OperatorKind::Hermitian,
        }
    }

    fn check_kind(&self) -> Result<()> {
        let d = self.dim;
        match self.kind {
            OperatorKind::Unitary => {
                let prod = matmul(&dagger(&self.matrix, d), &self.matrix, d);
                if mat_diff(&prod, &mat_identity(d)) > KIND_TOL {
                    return Err(Error::Algebra("operator is not unitary".into()));
                }
            }
            OperatorKind::Projector => {
                if mat_diff(&self.matrix, &dagger(&self.matrix, d)) > KIND_TOL {
                    return Err(Error::Algebra("projector is not Hermitian".into()));
                }
                let sq = matmul(&self.matrix, &self.matrix, d);
                if mat_diff(&sq, &self.matrix) > KIND_TOL {
                    return Err(Error::Algebra("projector is not idempotent".into()));
                }
            }
            OperatorKind::Hermitian => {
                if mat_diff(&self.matrix, &dagger(&self.matrix, d)) > KIND_TOL {
                    return Err(Error::Algebra("operator is not Hermitian".into()));
                }
            }
        }
        Ok(())
    }

    pub fn targets(&self) -> &[String] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Same matrix, relabeled targets (dimension contract unchanged).
    pub fn with_targets(&self, targets: Vec<String>) -> Self {
        LocalOperator {
            targets,
            dim: self.dim,
            matrix: self.matrix.clone(),
            kind: self.kind,
        }
    }
}

// Small dense-matrix helpers shared with the gadget constructions.

pub fn mat_identity(d: usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        m[i * d + i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

pub fn dagger(a: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

pub fn mat_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Kronecker product of square matrices (row-major).
pub fn kron_mat(a: &[Complex64], da: usize, b: &[Complex64], db: usize) -> Vec<Complex64> {
    let d = da * db;
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i1 in 0..da {
        for j1 in 0..da {
            let aij = a[i1 * da + j1];
            for i2 in 0..db {
                for j2 in 0..db {
                    out[(i1 * db + i2) * d + (j1 * db + j2)] = aij * b[i2 * db + j2];
                }
            }
        }
    }
    out
}

/// Tensor product of states over disjoint spaces.
pub fn kron_state(factors: &[StateVector]) -> Result<StateVector> {
    if factors.is_empty() {
        return Err(Error::Algebra("tensor product of no factors".into()));
    }
    let spaces: Vec<&SpaceDescriptor> = factors.iter().map(|f| f.space()).collect();
    let space = SpaceDescriptor::concat(&spaces)?; // rejects overlapping labels
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(amps.len() * f.amps.len());
        for a in &amps {
            for b in &f.amps {
                next.push(a * b);
            }
        }
        amps = next;
    }
    StateVector::new(space, amps)
}

/// Applies `op` (embedded with identities elsewhere) to `psi`.
pub fn apply_local(op: &LocalOperator, psi: &StateVector) -> Result<StateVector> {
    let space = psi.space();
    let dims: Vec<usize> = space.labels().iter().map(|l| l.dim).collect();
    let strides = space.strides();
    let mut positions = Vec::with_capacity(op.targets().len());
    for t in op.targets() {
        positions.push(space.position(t)?);
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Algebra(
            "operator targets must be an order-preserving subset of the space".into(),
        ));
    }
    let tdim: usize = positions.iter().map(|&p| dims[p]).product();
    if tdim != op.dim() {
        return Err(Error::Algebra(format!(
            "operator dimension {} does not match targets dimension {tdim}",
            op.dim()
        )));
    }

    // Offsets of each operator basis index into the full index.
    let d = op.dim();
    let mut offsets = vec![0usize; d];
    for (j, off) in offsets.iter_mut().enumerate() {
        let mut rem = j;
        for &p in positions.iter().rev() {
            *off += (rem % dims[p]) * strides[p];
            rem /= dims[p];
        }
    }

    let rest: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let total = space.total_dim();
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let matrix = op.matrix();
    let mut rest_counter = vec![0usize; rest.len()];
    let mut gathered = vec![Complex64::new(0.0, 0.0); d];
    loop {
        let base: usize = rest
            .iter()
            .zip(&rest_counter)
            .map(|(&p, &digit)| digit * strides[p])
            .sum();
        for (j, g) in gathered.iter_mut().enumerate() {
            *g = psi.amps[base + offsets[j]];
        }
        for r in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..d {
                acc += matrix[r * d + c] * gathered[c];
            }
            out[base + offsets[r]] = acc;
        }
        // Increment the mixed-radix rest counter.
        let mut k = rest.len();
        loop {
            if k == 0 {
                return StateVector::new(space.clone(), out);
            }
            k -= 1;
            rest_counter[k] += 1;
            if rest_counter[k] < dims[rest[k]] {
                break;
            }
            rest_counter[k] = 0;
        }
    }
}

/// Applies a projector, returning the unnormalized result and its norm².
pub fn project(p: &LocalOperator, psi: &StateVector) -> Result<(StateVector, f64)> {
    if p.kind() != OperatorKind::Projector {
        return Err(Error::Algebra("project requires a Projector operator".into()));
    }
    let out = apply_local(p, psi)?;
    let prob = out.norm_sq();
    Ok((out, prob))
}

pub fn normalize(psi: &StateVector) -> Result<StateVector> {
    let n = psi.norm();
    if n < MIN_NORM {
        return Err(Error::ZeroNorm);
    }
    Ok(psi.scaled(Complex64::new(1.0 / n, 0.0)))
}

pub fn inner(phi: &StateVector, psi: &StateVector) -> Result<Complex64> {
    if phi.space() != psi.space() {
        return Err(Error::Algebra("space mismatch in inner product".into()));
    }
    Ok(phi
        .amps
        .iter()
        .zip(&psi.amps)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

pub fn expectation(op: &LocalOperator, psi: &StateVector) -> Result<f64> {
    if op.kind() != OperatorKind::Hermitian && op.kind() != OperatorKind::Projector {
        return Err(Error::Algebra("expectation requires a Hermitian operator".into()));
    }
    let opsi = apply_local(op, psi)?;
    let val = inner(psi, &opsi)?;
    if val.im.abs() > KIND_TOL {
        return Err(Error::Algebra(format!(
            "expectation has non-real value (imag {})",
            val.im
        )));
    }
    Ok(val.re)
}

/// Verdict of an eigenvector check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenVerdict {
    Definite(f64),
    Indefinite,
}

/// Residual-based eigenvector test: λ := ⟨ψ|O|ψ⟩, definite iff ‖Oψ−λψ‖ < tol.
pub fn eigencheck(op: &LocalOperator, psi: &StateVector, tol: f64) -> Result<EigenVerdict> {
    let (verdict, _) = eigencheck_residual(op, psi, tol)?;
    Ok(verdict)
}

/// As `eigencheck`, also returning the residual ‖Oψ−λψ‖.
pub fn eigencheck_residual(
    op: &LocalOperator,
    psi: &StateVector,
    tol: f64,
) -> Result<(EigenVerdict, f64)> {
    let lambda = expectation(op, psi)?;
    let opsi = apply_local(op, psi)?;
    let residual: f64 = opsi
        .amps
        .iter()
        .zip(&psi.amps)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual < tol {
        Ok((EigenVerdict::Definite(lambda), residual))
    } else {
        Ok((EigenVerdict::Indefinite, residual))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit(name: &str) -> SpaceDescriptor {
        SpaceDescriptor::new(vec![(name, 2)]).unwrap()
    }

    fn ket(name: &str, amps: [f64; 2]) -> StateVector {
        StateVector::new(qubit(name), vec![c(amps[0], 0.0), c(amps[1], 0.0)]).unwrap()
    }

    fn random_state(space: &SpaceDescriptor, rng: &mut ChaCha8Rng) -> StateVector {
        let amps: Vec<Complex64> = (0..space.total_dim())
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        normalize(&StateVector::new(space.clone(), amps).unwrap()).unwrap()
    }

    #[test]
    fn kron_examples() {
        let s = kron_state(&[ket("a", [1.0, 0.0]), ket("b", [1.0, 0.0])]).unwrap();
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| *a == c(0.0, 0.0)));

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = kron_state(&[ket("a", [h, h]), ket("b", [0.0, 1.0])]).unwrap();
        let expect = [0.0, h, 0.0, h];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!((a.re - e).abs() < 1e-15 && a.im == 0.0);
        }

        // Overlapping labels rejected.
        assert!(kron_state(&[ket("a", [1.0, 0.0]), ket("a", [1.0, 0.0])]).is_err());
    }

    #[test]
    fn kron_norm_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = StateVector::new(
                qubit("a"),
                vec![c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), c(rng.gen_range(-1.0..1.0), 0.3)],
            )
            .unwrap();
            let b = StateVector::new(
                SpaceDescriptor::new(vec![("b", 3)]).unwrap(),
                (0..3).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            )
            .unwrap();
            let ab = kron_state(&[a.clone(), b.clone()]).unwrap();
            assert!((ab.norm() - a.norm() * b.norm()).abs() < 1e-12);
        }
    }

    fn bit_flip(target: &str) -> LocalOperator {
        LocalOperator::unitary(
            vec![target.to_string()],
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn apply_local_examples() {
        let psi = kron_state(&[ket("A", [1.0, 0.0]), ket("B", [1.0, 0.0])]).unwrap();
        let id = LocalOperator::identity(vec!["A".into()], 2);
        assert_eq!(apply_local(&id, &psi).unwrap(), psi);

        let flipped = apply_local(&bit_flip("A"), &psi).unwrap();
        // |1>_A |0>_B is index 2 in row-major order.
        assert_eq!(flipped.amplitudes()[2], c(1.0, 0.0));
        assert_eq!(flipped.norm_sq(), 1.0);

        // Unknown label.
        assert!(apply_local(&bit_flip("C"), &psi).is_err());
    }

    #[test]
    fn apply_local_disjoint_commute() {
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let psi = random_state(&space, &mut rng);
            let u = bit_flip("A");
            let v = hadamard("C");
            let a = apply_local(&u, &apply_local(&v, &psi).unwrap()).unwrap();
            let b = apply_local(&v, &apply_local(&u, &psi).unwrap()).unwrap();
            assert!(a.max_diff(&b).unwrap() < 1e-12);
        }
    }

    fn hadamard(target: &str) -> LocalOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        LocalOperator::unitary(
            vec![target.to_string()],
            2,
            vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        )
        .unwrap()
    }

    /// Oracle: embed the operator as an explicit full-dimension matrix and
    /// compare against the matrix-free path.
    #[test]
    fn apply_local_matches_full_embedding() {
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 3), ("C", 2), ("D", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(&space, &mut rng);

        // Random unitary-ish op on (B, D): random Hermitian exponent would be
        // heavy; instead use a random matrix declared Hermitian after
        // symmetrization.
        let d = 6;
        let mut m = vec![c(0.0, 0.0); d * d];
        for entry in m.iter_mut() {
            *entry = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let herm: Vec<Complex64> = {
            let md = dagger(&m, d);
            m.iter().zip(&md).map(|(a, b)| (a + b) * 0.5).collect()
        };
        let op = LocalOperator::hermitian(vec!["B".into(), "D".into()], d, herm.clone()).unwrap();

        // Full embedding in label order A ⊗ B ⊗ C ⊗ D: start from the op on
        // B ⊗ D and permute basis indices explicitly.
        let total = space.total_dim();
        let mut full = vec![c(0.0, 0.0); total * total];
        let dims = [2usize, 3, 2, 2];
        let idx = |a: usize, b: usize, cc: usize, dd: usize| ((a * 3 + b) * 2 + cc) * 2 + dd;
        for a in 0..dims[0] {
            for cc in 0..dims[2] {
                for b1 in 0..dims[1] {
                    for d1 in 0..dims[3] {
                        for b2 in 0..dims[1] {
                            for d2 in 0..dims[3] {
                                let row = idx(a, b1, cc, d1);
                                let col = idx(a, b2, cc, d2);
                                full[row * total + col] = herm[(b1 * 2 + d1) * d + (b2 * 2 + d2)];
                            }
                        }
                    }
                }
            }
        }
        let mut expect = vec![c(0.0, 0.0); total];
        for r in 0..total {
            for cidx in 0..total {
                expect[r] += full[r * total + cidx] * psi.amplitudes()[cidx];
            }
        }
        let got = apply_local(&op, &psi).unwrap();
        for (g, e) in got.amplitudes().iter().zip(&expect) {
            assert!((g - e).norm() < 1e-12);
        }
    }

    #[test]
    fn project_examples() {
        let p0 = LocalOperator::projector(
            vec!["A".into()],
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let (s, prob) = project(&p0, &ket("A", [1.0, 0.0])).unwrap();
        assert_eq!(prob, 1.0);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));

        let (s, prob) = project(&p0, &ket("A", [0.0, 1.0])).unwrap();
        assert_eq!(prob, 0.0);
        assert_eq!(s.norm_sq(), 0.0);

        // Non-projector rejected.
        let id = LocalOperator::identity(vec!["A".into()], 2);
        assert!(project(&id, &ket("A", [1.0, 0.0])).is_err());
    }

    #[test]
    fn complementary_projectors_complete() {
        let p0 = LocalOperator::projector(
            vec!["A".into()],
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let p1 = LocalOperator::projector(
            vec!["A".into()],
            2,
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 2)]).unwrap();
        for _ in 0..10 {
            let psi = random_state(&space, &mut rng);
            let (_, q0) = project(&p0, &psi).unwrap();
            let (_, q1) = project(&p1, &psi).unwrap();
            assert!((q0 + q1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn project_then_normalize_idempotent() {
        let p0 = LocalOperator::projector(
            vec!["A".into()],
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = ket("A", [h, h]);
        let (once, _) = project(&p0, &psi).unwrap();
        let once = normalize(&once).unwrap();
        let (_, prob) = project(&p0, &once).unwrap();
        assert!((prob - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let s = ket("A", [2.0, 0.0]);
        let n = normalize(&s).unwrap();
        assert_eq!(n.amplitudes()[0], c(1.0, 0.0));

        let z = StateVector::new(qubit("A"), vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(normalize(&z).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 3)]).unwrap();
        let psi = random_state(&space, &mut rng);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_examples() {
        let zero = ket("A", [1.0, 0.0]);
        let one = ket("A", [0.0, 1.0]);
        assert_eq!(inner(&zero, &zero).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&zero, &one).unwrap(), c(0.0, 0.0));
        assert!(inner(&zero, &ket("B", [1.0, 0.0])).is_err());
    }

    #[test]
    fn unitary_preserves_norm() {
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let psi = random_state(&space, &mut rng);
            let out = apply_local(&hadamard("A"), &psi).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kind_checks_reject_imposters() {
        // Not unitary.
        assert!(LocalOperator::unitary(
            vec!["A".into()],
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
        )
        .is_err());
        // Not idempotent.
        assert!(LocalOperator::projector(
            vec!["A".into()],
            2,
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]
        )
        .is_err());
        // Not Hermitian.
        assert!(LocalOperator::hermitian(
            vec!["A".into()],
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        )
        .is_err());
    }

    /// Independent oracle for eigencheck: synthesize O = U diag(λ) U† from a
    /// Gram-Schmidt-orthonormalized random frame, then check its own columns.
    #[test]
    fn eigencheck_on_synthesized_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = 4;
        // Random complex frame -> Gram-Schmidt.
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
            .collect();
        for i in 0..d {
            for j in 0..i {
                let proj: Complex64 = cols[j]
                    .iter()
                    .zip(&cols[i])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for k in 0..d {
                    let cjk = cols[j][k];
                    cols[i][k] -= proj * cjk;
                }
            }
            let n: f64 = cols[i].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in cols[i].iter_mut() {
                *a /= n;
            }
        }
        let lambdas = [-2.0, -0.5, 0.5, 3.0];
        let mut m = vec![c(0.0, 0.0); d * d];
        for (k, l) in lambdas.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    m[i * d + j] += cols[k][i] * cols[k][j].conj() * l;
                }
            }
        }
        let space = SpaceDescriptor::new(vec![("A", 2), ("B", 2)]).unwrap();
        let op = LocalOperator::hermitian(vec!["A".into(), "B".into()], d, m).unwrap();
        for (k, l) in lambdas.iter().enumerate() {
            let psi = StateVector::new(space.clone(), cols[k].clone()).unwrap();
            match eigencheck(&op, &psi, EIGEN_TOL).unwrap() {
                EigenVerdict::Definite(got) => assert!((got - l).abs() < 1e-9),
                EigenVerdict::Indefinite => panic!("eigenvector not recognized"),
            }
            // Global phase invariance.
            let phased = psi.scaled(Complex64::from_polar(1.0, 1.234));
            match eigencheck(&op, &phased, EIGEN_TOL).unwrap() {
                EigenVerdict::Definite(got) => assert!((got - l).abs() < 1e-9),
                EigenVerdict::Indefinite => panic!("phase broke the verdict"),
            }
        }
        // A balanced superposition of distinct eigenvectors is indefinite.
        let mix: Vec<Complex64> = (0..d)
            .map(|i| (cols[0][i] + cols[3][i]) * std::f64::consts::FRAC_1_SQRT_2)
            .collect();
        let mix = StateVector::new(space, mix).unwrap();
        assert_eq!(eigencheck(&op, &mix, EIGEN_TOL).unwrap(), EigenVerdict::Indefinite);
    }

    proptest! {
        #[test]
        fn prop_kron_norm(av in proptest::collection::vec(-1.0f64..1.0, 4),
                          bv in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let a = StateVector::new(qubit("a"),
                vec![c(av[0], av[1]), c(av[2], av[3])]).unwrap();
            let b = StateVector::new(SpaceDescriptor::new(vec![("b", 3)]).unwrap(),
                vec![c(bv[0], bv[1]), c(bv[2], bv[3]), c(bv[4], bv[5])]).unwrap();
            let ab = kron_state(&[a.clone(), b.clone()]).unwrap();
            prop_assert!((ab.norm() - a.norm() * b.norm()).abs() < 1e-12);
        }
    }
}
