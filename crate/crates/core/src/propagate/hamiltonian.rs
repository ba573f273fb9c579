use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::analytic::{Branch, DriveProfile};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::qstate::{ladder_operators, OperatorMatrix};

const HERMITIAN_TOL: f64 = 1e-12;

/// Which Hamiltonian a [`HamiltonianSpec`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// w_l n + f a^dagger + f* a on one field branch.
    BranchDispersive,
    /// The dispersive atom-field Hamiltonian on the joint space.
    JointDispersive,
    /// Jaynes-Cummings coupling g (a^dagger s- + a s+) with the same drive.
    FullRabi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub params: SystemParams,
    /// Required for, and only for, [`HamiltonianKind::BranchDispersive`].
    pub branch: Option<Branch>,
    pub drive: DriveProfile,
    /// Field truncation dimension.
    pub dim: usize,
}

impl HamiltonianSpec {
    pub fn branch(params: SystemParams, branch: Branch, drive: DriveProfile, dim: usize) -> Result<Self> {
        let spec = HamiltonianSpec {
            kind: HamiltonianKind::BranchDispersive,
            params,
            branch: Some(branch),
            drive,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn joint(params: SystemParams, drive: DriveProfile, dim: usize) -> Result<Self> {
        let spec = HamiltonianSpec {
            kind: HamiltonianKind::JointDispersive,
            params,
            branch: None,
            drive,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rabi(params: SystemParams, drive: DriveProfile, dim: usize) -> Result<Self> {
        let spec = HamiltonianSpec {
            kind: HamiltonianKind::FullRabi,
            params,
            branch: None,
            drive,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind, self.branch) {
            (HamiltonianKind::BranchDispersive, None) => {
                return Err(Error::InvalidSpec("a branch Hamiltonian needs a branch"))
            }
            (HamiltonianKind::JointDispersive | HamiltonianKind::FullRabi, Some(_)) => {
                return Err(Error::InvalidSpec("only branch Hamiltonians take a branch"))
            }
            _ => {}
        }
        if self.dim < 2 {
            return Err(Error::InvalidDimension {
                dim: self.dim,
                reason: "the field needs at least two Fock levels",
            });
        }
        if !self.params.nu.is_finite() || !self.params.omega0.is_finite() || !self.params.chi.is_finite() {
            return Err(Error::Validation {
                constraint: "all parameters finite",
                value: f64::NAN,
            });
        }
        Ok(())
    }

    /// Length of the state vectors this Hamiltonian acts on.
    pub fn state_dim(&self) -> usize {
        match self.kind {
            HamiltonianKind::BranchDispersive => self.dim,
            _ => 2 * self.dim,
        }
    }

    fn expect(&self, kind: HamiltonianKind) -> Result<()> {
        self.validate()?;
        if self.kind != kind {
            return Err(Error::InvalidSpec("builder does not match the spec kind"));
        }
        Ok(())
    }
}

fn driven_oscillator(freq: f64, f: C64, dim: usize) -> Result<OperatorMatrix> {
    let l = ladder_operators(dim)?;
    let h = &l.number.scaled(C64::new(freq, 0.0)) + &l.a_dagger.scaled(f);
    Ok(&h + &l.a.scaled(f.conj()))
}

/// w_l n + f(t) a^dagger + f*(t) a.
pub fn build_branch_hamiltonian(spec: &HamiltonianSpec, t: f64) -> Result<OperatorMatrix> {
    spec.expect(HamiltonianKind::BranchDispersive)?;
    let branch = spec.branch.expect("validated");
    let w = branch.shifted_frequency(&spec.params);
    driven_oscillator(w, spec.drive.eval(t), spec.dim)?.ensure_hermitian(HERMITIAN_TOL)
}

/// Block-diagonal joint Hamiltonian, ground block first:
/// H_g - omega0/2 and H_e + omega0/2 + chi.
pub fn build_joint_hamiltonian(spec: &HamiltonianSpec, t: f64) -> Result<OperatorMatrix> {
    spec.expect(HamiltonianKind::JointDispersive)?;
    let p = &spec.params;
    let f = spec.drive.eval(t);
    let id = OperatorMatrix::identity(spec.dim);
    let g = &driven_oscillator(p.nu - p.chi, f, spec.dim)?
        - &id.scaled(C64::new(p.omega0 / 2.0, 0.0));
    let e = &driven_oscillator(p.nu + p.chi, f, spec.dim)?
        + &id.scaled(C64::new(p.omega0 / 2.0 + p.chi, 0.0));
    OperatorMatrix::block_diagonal(&[&g, &e]).ensure_hermitian(HERMITIAN_TOL)
}

/// nu n + (omega0/2) s_z + g (a^dagger s- + a s+) + f a^dagger + f* a.
pub fn build_rabi_hamiltonian(spec: &HamiltonianSpec, t: f64) -> Result<OperatorMatrix> {
    spec.expect(HamiltonianKind::FullRabi)?;
    let p = &spec.params;
    let d = spec.dim;
    let f = spec.drive.eval(t);
    let id = OperatorMatrix::identity(d);
    let field = driven_oscillator(p.nu, f, d)?;
    let g = &field - &id.scaled(C64::new(p.omega0 / 2.0, 0.0));
    let e = &field + &id.scaled(C64::new(p.omega0 / 2.0, 0.0));
    let mut m = OperatorMatrix::block_diagonal(&[&g, &e]).entries().clone();
    for n in 0..d - 1 {
        // <g, n+1| a^dagger s- |e, n> = sqrt(n+1)
        let c = C64::new(p.g_rabi * ((n + 1) as f64).sqrt(), 0.0);
        m[(n + 1, d + n)] = c;
        m[(d + n, n + 1)] = c;
    }
    OperatorMatrix::from_matrix(m)?.ensure_hermitian(HERMITIAN_TOL)
}

/// Dense builder matching the spec kind.
pub fn build_hamiltonian(spec: &HamiltonianSpec, t: f64) -> Result<OperatorMatrix> {
    match spec.kind {
        HamiltonianKind::BranchDispersive => build_branch_hamiltonian(spec, t),
        HamiltonianKind::JointDispersive => build_joint_hamiltonian(spec, t),
        HamiltonianKind::FullRabi => build_rabi_hamiltonian(spec, t),
    }
}

/// H(t) = H_0 + f(t) R + f*(t) R^dagger in coordinate form, with R the
/// field raising operator on every atomic block.
#[derive(Clone, Debug)]
pub struct CompiledHamiltonian {
    dim: usize,
    static_part: Vec<(usize, usize, C64)>,
    raising: Vec<(usize, usize, f64)>,
    drive: DriveProfile,
    spectral_bound: f64,
}

impl CompiledHamiltonian {
    pub fn new(spec: &HamiltonianSpec) -> Result<Self> {
        let undriven = HamiltonianSpec {
            drive: DriveProfile::Zero,
            ..spec.clone()
        };
        let h0 = build_hamiltonian(&undriven, 0.0)?;
        let n = h0.dim();
        let mut static_part = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = h0.get(r, c);
                if v != C64::new(0.0, 0.0) {
                    static_part.push((r, c, v));
                }
            }
        }
        let blocks = n / spec.dim;
        let mut raising = Vec::new();
        for b in 0..blocks {
            for m in 1..spec.dim {
                raising.push((b * spec.dim + m, b * spec.dim + m - 1, (m as f64).sqrt()));
            }
        }
        let gershgorin = (0..n)
            .map(|r| (0..n).map(|c| h0.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let spectral_bound =
            gershgorin + 2.0 * spec.drive.magnitude_bound() * ((spec.dim - 1) as f64).sqrt();
        Ok(CompiledHamiltonian {
            dim: n,
            static_part,
            raising,
            drive: spec.drive.clone(),
            spectral_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Upper bound on the spectral radius of H(t) for every t.
    pub fn spectral_bound(&self) -> f64 {
        self.spectral_bound
    }

    /// out = H(t) psi
    pub fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) {
        out.fill(C64::new(0.0, 0.0));
        for &(r, c, v) in &self.static_part {
            out[r] += v * psi[c];
        }
        let f = self.drive.eval(t);
        if f != C64::new(0.0, 0.0) {
            let fc = f.conj();
            for &(r, c, s) in &self.raising {
                out[r] += f * s * psi[c];
                out[c] += fc * s * psi[r];
            }
        }
    }

    /// Dense H(t), for tests and exact exponentiation.
    pub fn dense(&self, t: f64) -> OperatorMatrix {
        let mut m = OperatorMatrix::zeros(self.dim).entries().clone();
        for &(r, c, v) in &self.static_part {
            m[(r, c)] += v;
        }
        let f = self.drive.eval(t);
        for &(r, c, s) in &self.raising {
            m[(r, c)] += f * s;
            m[(c, r)] += f.conj() * s;
        }
        OperatorMatrix::from_matrix(m).expect("square by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::alpha_resonant;
    use crate::qstate::coherent_state;

    fn p() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn branch_requires_branch() {
        let bad = HamiltonianSpec {
            kind: HamiltonianKind::BranchDispersive,
            params: p(),
            branch: None,
            drive: DriveProfile::Zero,
            dim: 8,
        };
        assert_eq!(bad.validate().unwrap_err().tag(), "invalid-spec");
        let bad = HamiltonianSpec {
            kind: HamiltonianKind::JointDispersive,
            branch: Some(Branch::Ground),
            ..bad
        };
        assert_eq!(bad.validate().unwrap_err().tag(), "invalid-spec");
        let spec = HamiltonianSpec::joint(p(), DriveProfile::Zero, 8).unwrap();
        assert!(build_branch_hamiltonian(&spec, 0.0).is_err());
    }

    #[test]
    fn free_branch_is_diagonal() {
        let spec = HamiltonianSpec::branch(p(), Branch::Ground, DriveProfile::Zero, 6).unwrap();
        let h = build_branch_hamiltonian(&spec, 1.3).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let expected = if r == c { 19.0 * r as f64 } else { 0.0 };
                assert_eq!(h.get(r, c), C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn drive_enters_off_diagonal_at_t0() {
        let params = p();
        let spec =
            HamiltonianSpec::branch(params, Branch::Excited, DriveProfile::resonant(&params), 6)
                .unwrap();
        let h = build_branch_hamiltonian(&spec, 0.0).unwrap();
        for m in 1..6 {
            let expected = params.kappa * (m as f64).sqrt();
            assert!((h.get(m, m - 1).re - expected).abs() < 1e-15);
            assert!((h.get(m - 1, m).re - expected).abs() < 1e-15);
        }
        assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn energy_along_analytic_track() {
        let params = p();
        let d = DriveProfile::resonant(&params);
        for branch in Branch::BOTH {
            let spec = HamiltonianSpec::branch(params, branch, d.clone(), 40).unwrap();
            for &t in &[0.3, 1.7, 4.4] {
                let a = alpha_resonant(&params, branch, t);
                let psi = coherent_state(a, 40).unwrap();
                let h = build_branch_hamiltonian(&spec, t).unwrap();
                let numeric = h.expectation(&psi).unwrap().re;
                let w = branch.shifted_frequency(&params);
                let closed = w * a.norm_sqr() + 2.0 * (d.eval(t) * a.conj()).re;
                assert!((numeric - closed).abs() < 1e-10, "{numeric} vs {closed}");
            }
        }
    }

    #[test]
    fn joint_blocks_reduce_to_branches() {
        let params = SystemParams {
            omega0: 31.5,
            ..p()
        };
        let d = DriveProfile::resonant(&params);
        let joint = HamiltonianSpec::joint(params, d.clone(), 7).unwrap();
        let h = build_joint_hamiltonian(&joint, 0.8).unwrap();
        let id = OperatorMatrix::identity(7);
        let g = HamiltonianSpec::branch(params, Branch::Ground, d.clone(), 7).unwrap();
        let e = HamiltonianSpec::branch(params, Branch::Excited, d, 7).unwrap();
        let hg = build_branch_hamiltonian(&g, 0.8).unwrap();
        let he = build_branch_hamiltonian(&e, 0.8).unwrap();
        let shift_e = id.scaled(C64::new(params.omega0 / 2.0 + params.chi, 0.0));
        let shift_g = id.scaled(C64::new(-params.omega0 / 2.0, 0.0));
        assert!((&(&h.block(7, 7) - &shift_e) - &he).max_abs() < 1e-14);
        assert!((&(&h.block(0, 7) - &shift_g) - &hg).max_abs() < 1e-14);
        assert!(h.entries().view((0, 7), (7, 7)).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn rabi_structure() {
        let params = SystemParams {
            g_rabi: 0.0,
            ..p()
        };
        let d = DriveProfile::resonant(&params);
        let spec = HamiltonianSpec::rabi(params, d.clone(), 6).unwrap();
        let h = build_rabi_hamiltonian(&spec, 0.4).unwrap();
        let field = driven_oscillator(params.nu, d.eval(0.4), 6).unwrap();
        let id = OperatorMatrix::identity(6);
        let g = &field - &id.scaled(C64::new(params.omega0 / 2.0, 0.0));
        assert!((&h.block(0, 6) - &g).max_abs() < 1e-14);
        assert!(h.entries().view((0, 6), (6, 6)).iter().all(|z| z.norm() == 0.0));

        // excitation number n + s_ee commutes with the undriven JC Hamiltonian
        let params = SystemParams {
            g_rabi: 0.3,
            ..p()
        };
        let spec = HamiltonianSpec::rabi(params, DriveProfile::Zero, 6).unwrap();
        let h = build_rabi_hamiltonian(&spec, 0.0).unwrap();
        let excitations =
            OperatorMatrix::diagonal((0..12).map(|k| C64::new((k % 6 + k / 6) as f64, 0.0)));
        assert!(h.commutator(&excitations).max_abs() < 1e-13);
    }

    #[test]
    fn one_excitation_splitting() {
        let g = 0.37;
        let params = SystemParams {
            nu: 20.0,
            omega0: 21.2,
            g_rabi: g,
            ..p()
        };
        let spec = HamiltonianSpec::rabi(params, DriveProfile::Zero, 5).unwrap();
        let h = build_rabi_hamiltonian(&spec, 0.0).unwrap();
        let spectrum = h.hermitian_spectrum();
        // the {|g,1>, |e,0>} block has mean nu/2 and half-splitting sqrt(Delta^2 + 4g^2)/2
        let delta = params.nu - params.omega0;
        let half = (delta * delta + 4.0 * g * g).sqrt() / 2.0;
        let mean = params.nu / 2.0;
        for target in [mean - half, mean + half] {
            assert!(spectrum.iter().any(|x| (x - target).abs() < 1e-10), "{target} in {spectrum:?}");
        }
    }

    #[test]
    fn compiled_form_matches_builders() {
        let params = SystemParams {
            g_rabi: 0.2,
            ..p()
        };
        let d = DriveProfile::resonant(&params);
        let specs = [
            HamiltonianSpec::branch(params, Branch::Ground, d.clone(), 9).unwrap(),
            HamiltonianSpec::joint(params, d.clone(), 9).unwrap(),
            HamiltonianSpec::rabi(params, d, 9).unwrap(),
        ];
        for spec in &specs {
            let compiled = CompiledHamiltonian::new(spec).unwrap();
            for &t in &[0.0, 0.77, 3.1] {
                let dense = build_hamiltonian(spec, t).unwrap();
                assert!((&compiled.dense(t) - &dense).max_abs() < 1e-14);
                let psi = DVector::from_fn(compiled.dim(), |k, _| C64::new(k as f64, 1.0 - k as f64));
                let mut out = DVector::from_element(compiled.dim(), C64::new(0.0, 0.0));
                compiled.apply(t, &psi, &mut out);
                assert!((out - dense.entries() * &psi).norm() < 1e-11);
            }
            let eig = compiled.dense(0.5).hermitian_spectrum();
            let radius = eig.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(radius <= compiled.spectral_bound());
        }
    }
}
