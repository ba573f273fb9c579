//! Truncated Fock-space states and operators.
//!
//! The field mode lives in span{|0>, ..., |dim-1>}. Joint atom-field vectors
//! are atom-major with the ground block first: index = atom * dim + n, where
//! atom 0 is |g> and atom 1 is |e>.

use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::SystemParams;

pub const DEFAULT_DIM: usize = 32;
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
            });
        }
        Ok(OperatorMatrix { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        OperatorMatrix {
            entries: DMatrix::from_element(dim, dim, ZERO),
        }
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: impl IntoIterator<Item = C64>) -> Self {
        let v: Vec<C64> = values.into_iter().collect();
        OperatorMatrix {
            entries: DMatrix::from_diagonal(&DVector::from_vec(v)),
        }
    }

    /// Block-diagonal matrix with the given blocks on the diagonal in order.
    pub fn block_diagonal(blocks: &[&OperatorMatrix]) -> Self {
        let dim = blocks.iter().map(|b| b.dim()).sum();
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        let mut offset = 0;
        for b in blocks {
            let d = b.dim();
            out.view_mut((offset, offset), (d, d)).copy_from(&b.entries);
            offset += d;
        }
        OperatorMatrix { entries: out }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// Square sub-block starting at `(offset, offset)`.
    pub fn block(&self, offset: usize, dim: usize) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.view((offset, offset), (dim, dim)).into_owned(),
        }
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.adjoint(),
        }
    }

    /// max |M - M^dagger| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..d {
            for c in r..d {
                let dev = (self.entries[(r, c)] - self.entries[(c, r)].conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn ensure_hermitian(self, tol: f64) -> Result<Self> {
        let deviation = self.hermiticity_defect();
        if deviation > tol {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        OperatorMatrix {
            entries: &self.entries * factor,
        }
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> Self {
        OperatorMatrix {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
        }
    }

    pub fn apply(&self, v: &DVector<C64>) -> Result<DVector<C64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.len(),
            });
        }
        Ok(&self.entries * v)
    }

    /// <v|M|v> for a raw vector.
    pub fn expectation_vec(&self, v: &DVector<C64>) -> Result<C64> {
        let mv = self.apply(v)?;
        Ok(v.dotc(&mv))
    }

    pub fn expectation(&self, state: &FieldState) -> Result<C64> {
        self.expectation_vec(state.amplitudes())
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Matrix exponential (Pade scaling and squaring).
    pub fn exp(&self) -> Self {
        OperatorMatrix {
            entries: self.entries.clone().exp(),
        }
    }

    /// exp(-i H t) for Hermitian H via eigendecomposition; exact unitary.
    pub fn unitary_evolution(&self, t: f64) -> Self {
        let eig = self.entries.clone().symmetric_eigen();
        let phases = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        );
        let v = &eig.eigenvectors;
        OperatorMatrix {
            entries: v * DMatrix::from_diagonal(&phases) * v.adjoint(),
        }
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries - &rhs.entries,
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries * &rhs.entries,
        }
    }
}

/// Truncated boson operators a, a^dagger and n = a^dagger a.
#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub a_dagger: OperatorMatrix,
    pub number: OperatorMatrix,
}

pub fn ladder_operators(dim: usize) -> Result<Ladder> {
    if dim < 2 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "ladder operators need at least two Fock levels",
        });
    }
    let mut a = DMatrix::from_element(dim, dim, ZERO);
    for m in 1..dim {
        a[(m - 1, m)] = C64::new((m as f64).sqrt(), 0.0);
    }
    let a = OperatorMatrix { entries: a };
    let a_dagger = a.adjoint();
    let number = OperatorMatrix::diagonal((0..dim).map(|m| C64::new(m as f64, 0.0)));
    Ok(Ladder {
        a,
        a_dagger,
        number,
    })
}

/// A field-mode state vector in a truncated Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    amplitudes: DVector<C64>,
}

impl FieldState {
    pub fn from_amplitudes(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "a field state needs at least one Fock level",
            });
        }
        Ok(FieldState { amplitudes })
    }

    pub fn fock(m: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension {
                dim,
                reason: "a field state needs at least one Fock level",
            });
        }
        if m >= dim {
            return Err(Error::IndexOutOfRange { index: m, dim });
        }
        let mut v = DVector::from_element(dim, ZERO);
        v[m] = ONE;
        Ok(FieldState { amplitudes: v })
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::fock(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Returns the state scaled to unit norm; the zero vector is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        FieldState {
            amplitudes: self.amplitudes.unscale(n),
        }
    }

    /// |amplitude[dim-1]|^2
    pub fn tail_mass(&self) -> f64 {
        self.amplitudes[self.dim() - 1].norm_sqr()
    }

    pub fn is_truncation_safe(&self, threshold: f64) -> bool {
        self.tail_mass() < threshold
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(m, z)| m as f64 * z.norm_sqr())
            .sum::<f64>()
            / self.amplitudes.norm_squared()
    }

    /// <(-1)^n> for the normalized state.
    pub fn parity(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(m, z)| if m % 2 == 0 { z.norm_sqr() } else { -z.norm_sqr() })
            .sum::<f64>()
            / self.amplitudes.norm_squared()
    }

    /// <a> (unnormalized states are not rescaled).
    pub fn annihilation_expectation(&self) -> C64 {
        (1..self.dim())
            .map(|m| self.amplitudes[m - 1].conj() * self.amplitudes[m] * (m as f64).sqrt())
            .sum()
    }

    /// |<self|other>|^2
    pub fn fidelity(&self, other: &FieldState) -> Result<f64> {
        Ok(overlap(self, other)?.norm_sqr())
    }

    pub(crate) fn warn_if_truncated(self, what: &str) -> Self {
        if !self.is_truncation_safe(DEFAULT_TAIL_THRESHOLD) {
            log::warn!(
                "{what}: tail mass {:e} at level {} exceeds {:e}; increase the truncation dimension",
                self.tail_mass(),
                self.dim() - 1,
                DEFAULT_TAIL_THRESHOLD
            );
        }
        self
    }
}

/// Coherent state e^{-|a|^2/2} sum a^m / sqrt(m!) |m>, renormalized after truncation.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<FieldState> {
    if dim == 0 {
        return Err(Error::InvalidDimension {
            dim,
            reason: "a field state needs at least one Fock level",
        });
    }
    let mut amps = Vec::with_capacity(dim);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for m in 1..dim {
        c = c * alpha / (m as f64).sqrt();
        amps.push(c);
    }
    let state = FieldState {
        amplitudes: DVector::from_vec(amps),
    };
    Ok(state.normalized().warn_if_truncated("coherent_state"))
}

/// D(alpha) = exp(alpha a^dagger - alpha* a) in the truncated space.
pub fn displacement_operator(alpha: C64, dim: usize) -> Result<OperatorMatrix> {
    let l = ladder_operators(dim)?;
    let generator = &l.a_dagger.scaled(alpha) - &l.a.scaled(alpha.conj());
    Ok(generator.exp())
}

/// D(alpha)|m>, the m-th eigenstate of the invariant with amplitude alpha.
pub fn displaced_number_state(alpha: C64, m: usize, dim: usize) -> Result<FieldState> {
    if m >= dim {
        return Err(Error::IndexOutOfRange { index: m, dim });
    }
    let d = displacement_operator(alpha, dim)?;
    let column = d.entries().column(m).into_owned();
    let state = FieldState {
        amplitudes: column,
    };
    Ok(state.normalized().warn_if_truncated("displaced_number_state"))
}

/// Hermitian inner product <u|v>.
pub fn overlap(u: &FieldState, v: &FieldState) -> Result<C64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.amplitudes.dotc(&v.amplitudes))
}

/// Atom-field state in the branch decomposition
/// |Psi> = c_g e^{i theta_g} |g>|phi_g> + c_e e^{i theta_e} |e>|phi_e>.
///
/// `phase_g` and `phase_e` hold the explicit atomic prefactors (omega0 t / 2
/// and -(omega0 / 2 + chi) t for free evolution) as accumulated angles.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    pub phi_g: FieldState,
    pub phi_e: FieldState,
    pub c_g: C64,
    pub c_e: C64,
    pub phase_g: f64,
    pub phase_e: f64,
}

impl JointState {
    pub fn new(phi_g: FieldState, phi_e: FieldState, c_g: C64, c_e: C64) -> Result<Self> {
        if phi_g.dim() != phi_e.dim() {
            return Err(Error::DimensionMismatch {
                left: phi_g.dim(),
                right: phi_e.dim(),
            });
        }
        Ok(JointState {
            phi_g,
            phi_e,
            c_g,
            c_e,
            phase_g: 0.0,
            phase_e: 0.0,
        })
    }

    /// (c_g |g> + c_e |e>) (x) |field>.
    pub fn product(c_g: C64, c_e: C64, field: FieldState) -> Self {
        JointState {
            phi_g: field.clone(),
            phi_e: field,
            c_g,
            c_e,
            phase_g: 0.0,
            phase_e: 0.0,
        }
    }

    /// Compose independently propagated branch fields with the free atomic
    /// prefactors e^{i omega0 t / 2} and e^{-i (omega0 / 2 + chi) t}.
    pub fn from_branches(
        params: &SystemParams,
        c_g: C64,
        c_e: C64,
        phi_g: FieldState,
        phi_e: FieldState,
        t: f64,
    ) -> Result<Self> {
        let mut s = Self::new(phi_g, phi_e, c_g, c_e)?;
        s.phase_g = params.omega0 * t / 2.0;
        s.phase_e = -(params.omega0 / 2.0 + params.chi) * t;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.phi_g.dim()
    }

    pub fn block_g(&self) -> DVector<C64> {
        self.phi_g.amplitudes() * (self.c_g * C64::from_polar(1.0, self.phase_g))
    }

    pub fn block_e(&self) -> DVector<C64> {
        self.phi_e.amplitudes() * (self.c_e * C64::from_polar(1.0, self.phase_e))
    }

    /// Atom-major joint vector of length 2 * dim, ground block first.
    pub fn to_vector(&self) -> DVector<C64> {
        let d = self.dim();
        let mut v = DVector::from_element(2 * d, ZERO);
        v.rows_mut(0, d).copy_from(&self.block_g());
        v.rows_mut(d, d).copy_from(&self.block_e());
        v
    }

    /// Inverse of [`to_vector`](Self::to_vector): atomic amplitudes become the
    /// block norms and the fields are normalized. A vanishing block keeps a
    /// vacuum placeholder with zero amplitude.
    pub fn from_vector(v: &DVector<C64>, dim: usize) -> Result<Self> {
        if v.len() != 2 * dim || dim == 0 {
            return Err(Error::DimensionMismatch {
                left: 2 * dim,
                right: v.len(),
            });
        }
        let split = |offset: usize| -> Result<(FieldState, C64)> {
            let block = v.rows(offset, dim).into_owned();
            let n = block.norm();
            if n == 0.0 {
                Ok((FieldState::vacuum(dim)?, ZERO))
            } else {
                Ok((
                    FieldState {
                        amplitudes: block.unscale(n),
                    },
                    C64::new(n, 0.0),
                ))
            }
        };
        let (phi_g, c_g) = split(0)?;
        let (phi_e, c_e) = split(dim)?;
        Self::new(phi_g, phi_e, c_g, c_e)
    }

    /// |c_g|^2 ||phi_g||^2 + |c_e|^2 ||phi_e||^2
    pub fn total_probability(&self) -> f64 {
        let (pg, pe) = self.populations();
        pg + pe
    }

    /// Detection probabilities (P_g, P_e).
    pub fn populations(&self) -> (f64, f64) {
        (
            self.c_g.norm_sqr() * self.phi_g.amplitudes().norm_squared(),
            self.c_e.norm_sqr() * self.phi_e.amplitudes().norm_squared(),
        )
    }

    /// Largest eigenvalue of the reduced atomic density matrix; 1 for a
    /// product state.
    pub fn schmidt_weight(&self) -> f64 {
        let g = self.block_g();
        let e = self.block_e();
        let a = g.norm_squared();
        let d = e.norm_squared();
        let b = g.dotc(&e).norm_sqr();
        let tr = a + d;
        (tr + ((a - d).powi(2) + 4.0 * b).sqrt()) / 2.0 / tr
    }
}
