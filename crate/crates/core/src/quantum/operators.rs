use ndarray::Array2;
use num_complex::Complex64 as C64;

use super::space::{HilbertSpace, Qubit, SystemParams};
use super::state::StateVector;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Dense operator on the qubit ⊗ Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    space: HilbertSpace,
    matrix: Array2<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn zeros(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, matrix: Array2::zeros((d, d)), hermitian: true }
    }

    pub fn identity(space: HilbertSpace) -> Self {
        let d = space.dim();
        Self { space, matrix: Array2::eye(d), hermitian: true }
    }

    /// Wraps a matrix, setting the hermitian flag by inspection.
    pub fn from_matrix(space: HilbertSpace, matrix: Array2<C64>) -> Self {
        assert_eq!(matrix.dim(), (space.dim(), space.dim()), "matrix shape mismatch");
        let mut op = Self { space, matrix, hermitian: false };
        op.hermitian = op.hermiticity_defect() < HERMITIAN_TOLERANCE;
        op
    }

    /// Field operator `f ⊗`-extended with the qubit identity; `f(n, m)` gives `⟨n|f|m⟩`.
    fn field(space: HilbertSpace, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Array2::zeros((space.dim(), space.dim()));
        for s in [Qubit::Ground, Qubit::Excited] {
            for n in 0..=space.n_max() {
                for k in 0..=space.n_max() {
                    let v = f(n, k);
                    if v != 0.0 {
                        m[[space.index(s, n), space.index(s, k)]] = C64::new(v, 0.0);
                    }
                }
            }
        }
        Self::from_matrix(space, m)
    }

    /// Qubit operator extended with the field identity; `q[r][c]` in the (g, e) basis.
    fn qubit(space: HilbertSpace, q: [[C64; 2]; 2]) -> Self {
        let levels = [Qubit::Ground, Qubit::Excited];
        let mut m = Array2::zeros((space.dim(), space.dim()));
        for n in 0..=space.n_max() {
            for (r, &sr) in levels.iter().enumerate() {
                for (c, &sc) in levels.iter().enumerate() {
                    m[[space.index(sr, n), space.index(sc, n)]] = q[r][c];
                }
            }
        }
        Self::from_matrix(space, m)
    }

    pub fn annihilation(space: HilbertSpace) -> Self {
        Self::field(space, |n, k| if k == n + 1 { (k as f64).sqrt() } else { 0.0 })
    }

    pub fn creation(space: HilbertSpace) -> Self {
        Self::annihilation(space).dagger()
    }

    pub fn number(space: HilbertSpace) -> Self {
        Self::field(space, |n, k| if n == k { n as f64 } else { 0.0 })
    }

    /// `X = (a + a†)/2`.
    pub fn quadrature_x(space: HilbertSpace) -> Self {
        Self::field(space, |n, k| {
            if k == n + 1 {
                0.5 * (k as f64).sqrt()
            } else if n == k + 1 {
                0.5 * (n as f64).sqrt()
            } else {
                0.0
            }
        })
    }

    pub fn sigma_z(space: HilbertSpace) -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::qubit(space, [[-i, o], [o, i]])
    }

    pub fn sigma_x(space: HilbertSpace) -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::qubit(space, [[o, i], [i, o]])
    }

    /// `σ₊ = |e⟩⟨g|`.
    pub fn sigma_plus(space: HilbertSpace) -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::qubit(space, [[o, o], [i, o]])
    }

    pub fn sigma_minus(space: HilbertSpace) -> Self {
        Self::sigma_plus(space).dagger()
    }

    /// `N_exc = a†a + σ₊σ₋`.
    pub fn excitation_number(space: HilbertSpace) -> Self {
        let mut m = Array2::zeros((space.dim(), space.dim()));
        for n in 0..=space.n_max() {
            m[[space.index(Qubit::Ground, n), space.index(Qubit::Ground, n)]] = C64::new(n as f64, 0.0);
            m[[space.index(Qubit::Excited, n), space.index(Qubit::Excited, n)]] = C64::new(n as f64 + 1.0, 0.0);
        }
        Self::from_matrix(space, m)
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn element(&self, row: (Qubit, usize), col: (Qubit, usize)) -> C64 {
        self.matrix[[self.space.index(row.0, row.1), self.space.index(col.0, col.1)]]
    }

    /// `max |M - M†|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for ((r, c), v) in m.indexed_iter() {
            worst = worst.max((v - m[[c, r]].conj()).norm());
        }
        worst
    }

    pub fn dagger(&self) -> Self {
        let matrix = self.matrix.t().mapv(|c| c.conj());
        Self { space: self.space, matrix, hermitian: self.hermitian }
    }

    pub fn dot(&self, other: &Self) -> Self {
        Self::from_matrix(self.space, self.matrix.dot(&other.matrix))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_matrix(self.space, &self.matrix + &other.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { space: self.space, matrix: &self.matrix * C64::new(s, 0.0), hermitian: self.hermitian }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        let ab = self.matrix.dot(&other.matrix);
        let ba = other.matrix.dot(&self.matrix);
        Self::from_matrix(self.space, ab - ba)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.space, state.space());
        StateVector::from_vec_unchecked(self.space, self.matrix.dot(state.amplitudes()).to_vec())
    }

    pub fn expectation(&self, state: &StateVector) -> C64 {
        state.inner(&self.apply(state))
    }
}

/// `H/ℏg = (ω/g) a†a + (ω₀/2g) σ_z + (σ₋a† + σ₊a)`.
pub fn jc_hamiltonian(params: &SystemParams, space: HilbertSpace) -> OperatorMatrix {
    let a = OperatorMatrix::annihilation(space);
    let ad = a.dagger();
    let sp = OperatorMatrix::sigma_plus(space);
    let sm = sp.dagger();
    let free =
        OperatorMatrix::number(space).scale(params.omega_over_g).add(&OperatorMatrix::sigma_z(space).scale(0.5 * params.omega0_over_g));
    let mut h = free.add(&sm.dot(&ad)).add(&sp.dot(&a));
    h.hermitian = h.hermiticity_defect() < HERMITIAN_TOLERANCE;
    h
}

/// The time-independent factor `σ_x ⊗ 𝟙` of the pulse drive.
pub fn drive_operator(space: HilbertSpace) -> OperatorMatrix {
    OperatorMatrix::sigma_x(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::build_space;

    fn space() -> HilbertSpace {
        build_space(12).unwrap()
    }

    #[test]
    fn jc_matrix_elements() {
        let space = space();
        let h = jc_hamiltonian(&SystemParams::default().with_n_max(12), space);
        assert!(h.is_hermitian());
        assert_eq!(h.element((Qubit::Excited, 0), (Qubit::Ground, 1)), C64::new(1.0, 0.0));
        for n in 0..12 {
            let want = ((n + 1) as f64).sqrt();
            let got = h.element((Qubit::Excited, n), (Qubit::Ground, n + 1));
            assert!((got.re - want).abs() < 1e-15 && got.im == 0.0);
        }
        let diag = h.element((Qubit::Excited, 3), (Qubit::Excited, 3));
        assert_eq!(diag.re, 300.0 + 50.0);
    }

    #[test]
    fn jc_conserves_excitations() {
        let space = space();
        let params = SystemParams::new(100.0, 97.5, 100.0, 12).unwrap();
        let h = jc_hamiltonian(&params, space);
        let comm = h.commutator(&OperatorMatrix::excitation_number(space));
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn drive_operator_properties() {
        let space = space();
        let sx = drive_operator(space);
        assert!(sx.is_hermitian());
        let sq = sx.dot(&sx);
        let id = OperatorMatrix::identity(space);
        assert!(sq.add(&id.scale(-1.0)).max_abs() < 1e-12);
        for n in 0..=12 {
            assert_eq!(sx.element((Qubit::Excited, n), (Qubit::Ground, n)).re, 1.0);
            for m in 0..=12 {
                if m != n {
                    assert_eq!(sx.element((Qubit::Excited, n), (Qubit::Ground, m)).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn ladder_algebra() {
        let space = space();
        let a = OperatorMatrix::annihilation(space);
        let ad = OperatorMatrix::creation(space);
        assert!(!a.is_hermitian());
        let n = ad.dot(&a);
        assert!(n.add(&OperatorMatrix::number(space).scale(-1.0)).max_abs() < 1e-12);
        let x = a.add(&ad).scale(0.5);
        assert!(x.add(&OperatorMatrix::quadrature_x(space).scale(-1.0)).max_abs() < 1e-15);
        let sp = OperatorMatrix::sigma_plus(space);
        let sm = OperatorMatrix::sigma_minus(space);
        let ex = n.add(&sp.dot(&sm));
        assert!(ex.add(&OperatorMatrix::excitation_number(space).scale(-1.0)).max_abs() < 1e-12);
    }

    #[test]
    fn dense_variance_matches_moment_formula() {
        let space = build_space(30).unwrap();
        let alpha = C64::new(0.7, 0.3);
        let mut s = crate::quantum::coherent_excited_state(alpha, space).unwrap();
        // mix the qubit to get a nontrivial field state
        let h = jc_hamiltonian(&SystemParams::default().with_n_max(30), space);
        let hs = h.apply(&s);
        let mut amps = s.amplitudes().clone();
        amps.zip_mut_with(hs.amplitudes(), |a, b| *a += b * C64::new(0.0, -1e-3));
        s = StateVector::from_amplitudes(space, amps).unwrap().normalized().unwrap();
        let x = OperatorMatrix::quadrature_x(space);
        let mean = x.expectation(&s).re;
        let second = x.dot(&x).expectation(&s).re;
        let dense = second - mean * mean;
        // the dense X² loses the a a† term at the top level; the state has no weight there
        assert!((dense - crate::quantum::quadrature_variance(&s).unwrap()).abs() < 1e-12);
    }
}
