//! Dense complex linear algebra at dimension d = p^n.
//!
//! Projectors come from the character average
//! P_s = |I|^{-1} Σ_{u∈I} ω^{-s(u)} η(u), never from an eigensolver, and
//! Wigner values are computed from the Pauli expectations Tr(ρ η(u)).

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gfp::{PrimeConfig, Subspace, SymplecticVector};
use crate::pauli::{eta_monomial, symplectic_form};
use crate::presheaf::OutcomeFunction;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Largest Hilbert dimension handled densely.
pub const MATRIX_DIM_LIMIT: usize = 128;
/// Tolerance for matrix identities.
pub const MATRIX_TOL: f64 = 1e-10;
/// Tolerance for probabilities.
pub const PROB_TOL: f64 = 1e-9;

fn omega_pow(p: u32, e: i64) -> C64 {
    let k = e.rem_euclid(p as i64) as f64;
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / p as f64)
}

fn guard_dim(cfg: PrimeConfig) -> Result<()> {
    if cfg.d() > MATRIX_DIM_LIMIT {
        return Err(Error::Capacity(format!(
            "d = {} exceeds the matrix limit {MATRIX_DIM_LIMIT}",
            cfg.d()
        )));
    }
    Ok(())
}

/// A validated state: Hermitian, trace one, positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    cfg: PrimeConfig,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(cfg: PrimeConfig, entries: CMatrix) -> Result<Self> {
        guard_dim(cfg)?;
        let d = cfg.d();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Input(format!(
                "density matrix is {}x{}, expected {d}x{d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let herm = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > MATRIX_TOL {
            return Err(Error::Domain(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > MATRIX_TOL {
            return Err(Error::Domain(format!("trace is {trace}, expected 1")));
        }
        let min_eig = entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PROB_TOL {
            return Err(Error::Domain(format!(
                "matrix is not positive semi-definite (min eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { cfg, entries })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(cfg: PrimeConfig, amplitudes: &[C64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let psi = nalgebra::DVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|a| a / norm),
        );
        Self::new(cfg, &psi * psi.adjoint())
    }

    pub fn maximally_mixed(cfg: PrimeConfig) -> Result<Self> {
        guard_dim(cfg)?;
        let d = cfg.d();
        Self::new(cfg, CMatrix::identity(d, d) / C64::new(d as f64, 0.0))
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    /// (1 − λ)ρ + λ·Id/d.
    pub fn depolarize(&self, lambda: f64) -> Result<Self> {
        let d = self.cfg.d();
        let mixed = &self.entries * C64::new(1.0 - lambda, 0.0)
            + CMatrix::identity(d, d) * C64::new(lambda / d as f64, 0.0);
        Self::new(self.cfg, mixed)
    }

    /// Tr(ρ η(u)) for every u ∈ V, in index order.
    pub fn pauli_expectations(&self) -> Result<Vec<C64>> {
        self.cfg
            .all_vectors()
            .map(|u| Ok(eta_monomial(self.cfg, &u)?.trace_with(&self.entries)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NamedState {
    /// (|000⟩ + |111⟩)/√2, three qubits.
    Ghz,
    /// (|00⟩ + |11⟩)/√2, two qubits.
    Bell,
    /// The computational basis state |k⟩.
    Basis(usize),
    MaximallyMixed,
    /// Haar-random pure state, optionally depolarized by `mix`.
    Random { seed: u64, mix: f64 },
}

impl NamedState {
    pub fn is_stabilizer(&self) -> bool {
        !matches!(self, NamedState::Random { .. })
    }
}

pub fn named_state(state: &NamedState, cfg: PrimeConfig) -> Result<DensityMatrix> {
    guard_dim(cfg)?;
    let d = cfg.d();
    let one = C64::new(1.0, 0.0);
    match state {
        NamedState::Ghz | NamedState::Bell => {
            let (want_n, name) = if *state == NamedState::Ghz { (3, "ghz") } else { (2, "bell") };
            if cfg.p() != 2 || cfg.n() != want_n {
                return Err(Error::Input(format!(
                    "{name} requires p = 2, n = {want_n}, got {cfg}"
                )));
            }
            let mut amps = vec![C64::new(0.0, 0.0); d];
            amps[0] = one;
            amps[d - 1] = one;
            DensityMatrix::pure(cfg, &amps)
        }
        NamedState::Basis(k) => {
            if *k >= d {
                return Err(Error::Input(format!("basis index {k} out of range for d = {d}")));
            }
            let mut amps = vec![C64::new(0.0, 0.0); d];
            amps[*k] = one;
            DensityMatrix::pure(cfg, &amps)
        }
        NamedState::MaximallyMixed => DensityMatrix::maximally_mixed(cfg),
        NamedState::Random { seed, mix } => {
            if !(0.0..=1.0).contains(mix) {
                return Err(Error::Input(format!("mix parameter {mix} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let amps: Vec<C64> = (0..d)
                .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            DensityMatrix::pure(cfg, &amps)?.depolarize(*mix)
        }
    }
}

fn check_outcome(context: &Subspace, s: &OutcomeFunction) -> Result<()> {
    if s.context() != context {
        return Err(Error::Domain("outcome function belongs to a different context".into()));
    }
    s.validate()
}

/// P_s = |I|^{-1} Σ_{u∈I} ω^{-s(u)} η(u).
pub fn projector(context: &Subspace, s: &OutcomeFunction) -> Result<CMatrix> {
    check_outcome(context, s)?;
    let cfg = context.cfg();
    guard_dim(cfg)?;
    let d = cfg.d();
    let mut acc = CMatrix::zeros(d, d);
    for (u, &value) in context.elements().iter().zip(s.values()) {
        let eta = eta_monomial(cfg, u)?;
        let coeff = omega_pow(cfg.p(), -(value as i64));
        for col in 0..d {
            acc[(eta.rows[col], col)] += coeff * eta.entry_phase(col);
        }
    }
    Ok(acc / C64::new(context.len() as f64, 0.0))
}

/// The joint spectral projector Π_{u∈I} Q_u(s(u)), where Q_u(k) projects onto
/// the ω^k eigenspace of η(u). Accepts any function s : I → Z/p, and equals
/// [`projector`] on outcome functions.
pub fn joint_projector(context: &Subspace, values: &[u32]) -> Result<CMatrix> {
    let cfg = context.cfg();
    guard_dim(cfg)?;
    if values.len() != context.len() {
        return Err(Error::Input(format!(
            "{} values for a context with {} elements",
            values.len(),
            context.len()
        )));
    }
    let (p, d) = (cfg.p(), cfg.d());
    let mut acc = CMatrix::identity(d, d);
    for (u, &value) in context.elements().iter().zip(values) {
        let eta = eta_monomial(cfg, u)?.to_dense() * omega_pow(p, -(value as i64));
        let mut power = CMatrix::identity(d, d);
        let mut spectral = CMatrix::zeros(d, d);
        for _ in 0..p {
            spectral += &power;
            power = &power * &eta;
        }
        acc = acc * spectral / C64::new(p as f64, 0.0);
    }
    Ok(acc)
}

/// A_v = |V|^{-1/2} Σ_{u∈V} ω^{𝔟(v,u)} η(u).
pub fn point_operator(cfg: PrimeConfig, v: &SymplecticVector) -> Result<CMatrix> {
    guard_dim(cfg)?;
    cfg.check(v)?;
    let d = cfg.d();
    let mut acc = CMatrix::zeros(d, d);
    for u in cfg.all_vectors() {
        let eta = eta_monomial(cfg, &u)?;
        let coeff = omega_pow(cfg.p(), symplectic_form(v, &u) as i64);
        for col in 0..d {
            acc[(eta.rows[col], col)] += coeff * eta.entry_phase(col);
        }
    }
    Ok(acc / C64::new((cfg.vcard() as f64).sqrt(), 0.0))
}

/// The quasi-probability table W_ρ : V → ℝ, indexed like [`PrimeConfig::vector_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    cfg: PrimeConfig,
    table: Vec<f64>,
}

impl WignerFunction {
    pub fn from_table(cfg: PrimeConfig, table: Vec<f64>) -> Result<Self> {
        if table.len() != cfg.vcard() {
            return Err(Error::Input(format!(
                "Wigner table has {} entries, expected {}",
                table.len(),
                cfg.vcard()
            )));
        }
        Ok(Self { cfg, table })
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn value(&self, v: &SymplecticVector) -> f64 {
        self.table[self.cfg.index_of(v)]
    }

    pub fn min(&self) -> f64 {
        self.table.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn total(&self) -> f64 {
        self.table.iter().sum()
    }

    /// Σ_v W(v) A_v.
    pub fn reconstruct(&self) -> Result<CMatrix> {
        let d = self.cfg.d();
        let mut acc = CMatrix::zeros(d, d);
        for (i, &w) in self.table.iter().enumerate() {
            if w != 0.0 {
                acc += point_operator(self.cfg, &self.cfg.vector_at(i))? * C64::new(w, 0.0);
            }
        }
        Ok(acc)
    }
}

/// W_ρ(v) = |V|^{-1/2} Tr(ρ A_v) = |V|^{-1} Σ_u ω^{𝔟(v,u)} Tr(ρ η(u)).
pub fn wigner(rho: &DensityMatrix) -> Result<WignerFunction> {
    let cfg = rho.cfg();
    let expectations = rho.pauli_expectations()?;
    let vectors: Vec<SymplecticVector> = cfg.all_vectors().collect();
    let scale = 1.0 / cfg.vcard() as f64;
    let mut table = Vec::with_capacity(vectors.len());
    for v in &vectors {
        let value: C64 = vectors
            .iter()
            .zip(&expectations)
            .map(|(u, e)| omega_pow(cfg.p(), symplectic_form(v, u) as i64) * e)
            .sum::<C64>()
            * scale;
        if value.im.abs() > MATRIX_TOL {
            return Err(Error::Numerical(format!(
                "Wigner value at {v} has imaginary part {:e}",
                value.im
            )));
        }
        table.push(value.re);
    }
    WignerFunction::from_table(cfg, table)
}

/// Born probability Tr(ρ P_s), checked against [-tol, 1 + tol] and clamped.
pub fn born(rho: &DensityMatrix, context: &Subspace, s: &OutcomeFunction) -> Result<f64> {
    check_outcome(context, s)?;
    let cfg = rho.cfg();
    if context.cfg() != cfg {
        return Err(Error::Input(format!(
            "state is for {cfg} but context is for {}",
            context.cfg()
        )));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (u, &value) in context.elements().iter().zip(s.values()) {
        let trace = eta_monomial(cfg, u)?.trace_with(rho.matrix());
        acc += omega_pow(cfg.p(), -(value as i64)) * trace;
    }
    let prob = acc / context.len() as f64;
    if prob.im.abs() > PROB_TOL || prob.re < -PROB_TOL || prob.re > 1.0 + PROB_TOL {
        return Err(Error::Numerical(format!("Born value {prob} is not a probability")));
    }
    Ok(prob.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::{enumerate_isotropic, span};
    use crate::pauli::eta_matrix;
    use crate::presheaf::events;

    fn cfg(p: u32, n: usize) -> PrimeConfig {
        PrimeConfig::new(p, n).unwrap()
    }

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn named_state_examples() {
        let c1 = cfg(3, 1);
        let mm = named_state(&NamedState::MaximallyMixed, c1).unwrap();
        assert!(max_dev(mm.matrix(), &(CMatrix::identity(3, 3) / c(3.0))) < 1e-15);

        let b0 = named_state(&NamedState::Basis(0), c1).unwrap();
        let mut expected = CMatrix::zeros(3, 3);
        expected[(0, 0)] = c(1.0);
        assert!(max_dev(b0.matrix(), &expected) < 1e-15);

        let ghz = named_state(&NamedState::Ghz, cfg(2, 3)).unwrap();
        let m = ghz.matrix();
        for &(i, j) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((m[(i, j)] - c(0.5)).norm() < 1e-15);
        }
        assert!(max_dev(&(m * m), m) < 1e-12);

        assert!(named_state(&NamedState::Ghz, cfg(2, 2)).is_err());
        assert!(named_state(&NamedState::Bell, cfg(3, 2)).is_err());
        assert!(named_state(&NamedState::Basis(9), c1).is_err());
    }

    #[test]
    fn random_states_are_seeded() {
        let c2 = cfg(3, 1);
        let a = named_state(&NamedState::Random { seed: 7, mix: 0.0 }, c2).unwrap();
        let b = named_state(&NamedState::Random { seed: 7, mix: 0.0 }, c2).unwrap();
        let other = named_state(&NamedState::Random { seed: 8, mix: 0.0 }, c2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
    }

    #[test]
    fn density_validation() {
        let c1 = cfg(2, 1);
        let mut bad = CMatrix::identity(2, 2);
        assert!(matches!(DensityMatrix::new(c1, bad.clone()), Err(Error::Domain(_))));
        bad[(0, 0)] = c(1.5);
        bad[(1, 1)] = c(-0.5);
        assert!(matches!(DensityMatrix::new(c1, bad), Err(Error::Domain(_))));
        let mut non_herm = CMatrix::identity(2, 2) / c(2.0);
        non_herm[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(c1, non_herm).is_err());
    }

    #[test]
    fn projector_examples() {
        let c1 = cfg(2, 1);
        let zero = Subspace::zero(c1);
        let s = &events(&zero).unwrap()[0];
        assert!(max_dev(&projector(&zero, s).unwrap(), &CMatrix::identity(2, 2)) < 1e-15);

        let zline = span(&[c1.z(1)], c1).unwrap();
        let s0 = events(&zline).unwrap().into_iter().find(|s| s.value(&c1.z(1)) == Some(0)).unwrap();
        let mut expected = CMatrix::zeros(2, 2);
        expected[(0, 0)] = c(1.0);
        assert!(max_dev(&projector(&zline, &s0).unwrap(), &expected) < 1e-15);

        let c2 = cfg(2, 2);
        for lag in enumerate_isotropic(c2, Some(2)).unwrap() {
            for s in events(&lag).unwrap() {
                let pm = projector(&lag, &s).unwrap();
                assert!((pm.trace() - c(1.0)).norm() < 1e-12, "rank d/|I| = 1");
            }
        }
    }

    #[test]
    fn point_operator_examples() {
        let c1 = cfg(2, 1);
        let a0 = point_operator(c1, &c1.zero()).unwrap();
        let sum = CMatrix::identity(2, 2)
            + eta_matrix(c1, &c1.x(1)).unwrap()
            + eta_matrix(c1, &c1.z(1)).unwrap()
            + eta_matrix(c1, &c1.y(1)).unwrap();
        assert!(max_dev(&a0, &(sum / c(2.0))) < 1e-14);

        for (p, n) in [(2, 1), (3, 1)] {
            let cf = cfg(p, n);
            let ops: Vec<CMatrix> =
                cf.all_vectors().map(|v| point_operator(cf, &v).unwrap()).collect();
            let norm = (cf.vcard() as f64).sqrt();
            for (i, a) in ops.iter().enumerate() {
                assert!((a.trace() - c(1.0)).norm() < 1e-12);
                assert!(max_dev(a, &a.adjoint()) < 1e-12);
                for (j, b) in ops.iter().enumerate() {
                    let ip = (a.adjoint() * b).trace() / norm;
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(target)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn wigner_examples() {
        let c1 = cfg(3, 1);
        let w = wigner(&DensityMatrix::maximally_mixed(c1).unwrap()).unwrap();
        assert!(w.table().iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-12));

        // Oracle: W(v) = |V|^{-1/2} Tr(ρ A_v) with explicit point operators.
        let b0 = named_state(&NamedState::Basis(0), c1).unwrap();
        let w = wigner(&b0).unwrap();
        for v in c1.all_vectors() {
            let direct = (b0.matrix() * point_operator(c1, &v).unwrap()).trace().re / 3.0;
            assert!((w.value(&v) - direct).abs() < 1e-12);
            let expected = if v.x_part().iter().all(|&c| c == 0) { 1.0 / 3.0 } else { 0.0 };
            assert!((w.value(&v) - expected).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn ghz_wigner_is_flat_on_its_stabilizer_characters() {
        // Tr(ρ η(u)) = ±1 on the 8 stabilizers and 0 elsewhere, so each W(v)
        // is either 8/64 or 0.
        let ghz = named_state(&NamedState::Ghz, cfg(2, 3)).unwrap();
        let w = wigner(&ghz).unwrap();
        assert!((w.total() - 1.0).abs() < 1e-12);
        let eighth = w.table().iter().filter(|&&x| (x - 0.125).abs() < 1e-12).count();
        let zero = w.table().iter().filter(|&&x| x.abs() < 1e-12).count();
        assert_eq!((eighth, zero), (8, 56));
    }

    #[test]
    fn qutrit_strange_state_is_negative_at_the_origin() {
        // A_0 is the parity |a⟩ ↦ |−a⟩, and (|1⟩ − |2⟩)/√2 is odd under it.
        let c1 = cfg(3, 1);
        let mut parity = CMatrix::zeros(3, 3);
        for a in 0..3 {
            parity[((3 - a) % 3, a)] = c(1.0);
        }
        assert!(max_dev(&point_operator(c1, &c1.zero()).unwrap(), &parity) < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let strange = DensityMatrix::pure(c1, &[c(0.0), c(h), c(-h)]).unwrap();
        let w = wigner(&strange).unwrap();
        assert!((w.value(&c1.zero()) + 1.0 / 3.0).abs() < 1e-12);
        assert!((w.min() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn born_examples() {
        let c3 = cfg(2, 3);
        let mm = DensityMatrix::maximally_mixed(c3).unwrap();
        let ctx = span(&[c3.x(1), c3.x(2), c3.x(3)], c3).unwrap();
        for s in events(&ctx).unwrap() {
            assert!((born(&mm, &ctx, &s).unwrap() - 1.0 / 8.0).abs() < 1e-12);
        }
        let rho = named_state(&NamedState::Random { seed: 3, mix: 0.2 }, c3).unwrap();
        let total: f64 = events(&ctx).unwrap().iter().map(|s| born(&rho, &ctx, s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wigner_is_linear_in_the_state() {
        let c1 = cfg(3, 1);
        let a = named_state(&NamedState::Random { seed: 1, mix: 0.0 }, c1).unwrap();
        let b = named_state(&NamedState::Random { seed: 2, mix: 0.0 }, c1).unwrap();
        let mix = DensityMatrix::new(c1, a.matrix() * c(0.3) + b.matrix() * c(0.7)).unwrap();
        let (wa, wb, wm) = (wigner(&a).unwrap(), wigner(&b).unwrap(), wigner(&mix).unwrap());
        for i in 0..9 {
            assert!((wm.table()[i] - 0.3 * wa.table()[i] - 0.7 * wb.table()[i]).abs() < 1e-12);
        }
    }
}
