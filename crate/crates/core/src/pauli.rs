//! The symplectic form, the canonical extension cocycle β = β₀ + dq̄, the
//! section η(v) = μ^{q̄(v)} Z(v_z) X(v_x), and the group π = V ×_𝔟 Z/p.
//!
//! Cocycle values are exact residues. For p = 2 they live in Z/4 (μ = i),
//! otherwise in Z/p (μ = ω). Matrices only appear in [`eta_matrix`], which
//! the tests use as an oracle for the integer formulas.

use crate::error::{Error, Result};
use crate::gfp::{inv_mod, PrimeConfig, Subspace, SymplecticVector};
use crate::quantum::{CMatrix, C64, MATRIX_DIM_LIMIT};

fn dot(a: &[u8], b: &[u8], modulus: u32) -> u32 {
    a.iter().zip(b).fold(0u32, |acc, (&x, &y)| (acc + x as u32 * y as u32) % modulus)
}

/// 𝔟(v, w) = v_x·w_z − w_x·v_z mod p.
pub fn symplectic_form(v: &SymplecticVector, w: &SymplecticVector) -> u32 {
    let p = v.p();
    let a = dot(v.x_part(), w.z_part(), p);
    let b = dot(w.x_part(), v.z_part(), p);
    (a + p - b) % p
}

/// Order of the central subgroup ⟨μ⟩: 4 when p = 2, otherwise p.
pub fn cocycle_modulus(p: u32) -> u32 {
    if p == 2 {
        4
    } else {
        p
    }
}

/// An exponent of μ, i.e. an element of Z_μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CocycleValue {
    pub value: u32,
    pub modulus: u32,
}

impl CocycleValue {
    fn new(value: i64, modulus: u32) -> Self {
        let m = modulus as i64;
        Self { value: value.rem_euclid(m) as u32, modulus }
    }
}

/// 𝔮(v) = v_x·v_z mod p.
pub fn frak_q(v: &SymplecticVector) -> u32 {
    dot(v.x_part(), v.z_part(), v.p())
}

/// q̄(v) as an exponent of μ: 𝔮(v) ∈ {0,1} ⊂ Z/4 for p = 2, and
/// (v_x·v_z)/2 ∈ Z/p for odd p.
pub fn qbar(v: &SymplecticVector) -> u32 {
    let p = v.p();
    if p == 2 {
        frak_q(v)
    } else {
        frak_q(v) * inv_mod(2, p) % p
    }
}

/// β₀(v, w): 2 v_x·w_z mod 4 for p = 2, v_x·w_z mod p otherwise.
pub fn beta0(v: &SymplecticVector, w: &SymplecticVector) -> CocycleValue {
    let p = v.p();
    let m = cocycle_modulus(p);
    let vx_wz = dot(v.x_part(), w.z_part(), p) as i64;
    let raw = if p == 2 { 2 * vx_wz } else { vx_wz };
    CocycleValue::new(raw, m)
}

/// The canonical cocycle β = β₀ + dq̄, with dq̄(v, w) = q̄(v) − q̄(v+w) + q̄(w).
pub fn beta(v: &SymplecticVector, w: &SymplecticVector) -> CocycleValue {
    let m = cocycle_modulus(v.p());
    let sum = v + w;
    let dq = qbar(v) as i64 - qbar(&sum) as i64 + qbar(w) as i64;
    CocycleValue::new(beta0(v, w).value as i64 + dq, m)
}

/// β on an isotropic pair as a residue mod p. For p = 2 the Z/4 value is
/// even and gets halved; for odd p it is always zero.
pub fn commuting_beta(v: &SymplecticVector, w: &SymplecticVector) -> Result<u32> {
    let p = v.p();
    let form = symplectic_form(v, w);
    if form != 0 {
        return Err(Error::Domain(format!("{v} and {w} do not commute (b = {form})")));
    }
    let b = beta(v, w).value;
    if p == 2 {
        debug_assert!(b.is_multiple_of(2), "beta on a commuting pair must be even");
        Ok(b / 2)
    } else {
        Ok(b % p)
    }
}

pub fn is_isotropic(space: &Subspace) -> bool {
    let basis = space.basis();
    basis
        .iter()
        .enumerate()
        .all(|(i, a)| basis[i + 1..].iter().all(|b| symplectic_form(a, b) == 0))
}

/// Finds a basis pair of `space` on which 𝔟 does not vanish.
pub fn non_isotropic_witness(space: &Subspace) -> Option<(SymplecticVector, SymplecticVector, u32)> {
    let basis = space.basis();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            let f = symplectic_form(a, b);
            if f != 0 {
                return Some((a.clone(), b.clone(), f));
            }
        }
    }
    None
}

/// β restricted to I × I for an isotropic context I, as Z/p values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedCocycle {
    context: Subspace,
    elements: Vec<SymplecticVector>,
    table: Vec<u32>,
}

impl RestrictedCocycle {
    pub fn context(&self) -> &Subspace {
        &self.context
    }

    pub fn elements(&self) -> &[SymplecticVector] {
        &self.elements
    }

    /// Value at the pair of element indices (in [`Subspace::elements`] order).
    pub fn at(&self, i: usize, j: usize) -> u32 {
        self.table[i * self.elements.len() + j]
    }

    pub fn get(&self, v: &SymplecticVector, w: &SymplecticVector) -> Option<u32> {
        let i = self.context.element_index(v)?;
        let j = self.context.element_index(w)?;
        Some(self.at(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&t| t == 0)
    }
}

pub fn restricted_beta(context: &Subspace) -> Result<RestrictedCocycle> {
    if let Some((a, b, f)) = non_isotropic_witness(context) {
        return Err(Error::Domain(format!(
            "context {context:?} is not isotropic: b({a}, {b}) = {f}"
        )));
    }
    let elements = context.elements();
    let mut table = Vec::with_capacity(elements.len() * elements.len());
    for v in &elements {
        for w in &elements {
            table.push(commuting_beta(v, w)?);
        }
    }
    Ok(RestrictedCocycle { context: context.clone(), elements, table })
}

/// η(v) as a monomial matrix: column b has its single nonzero entry in row
/// `rows[b]`, equal to e^{2πi·exps[b]/root}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub root: u32,
    pub rows: Vec<usize>,
    pub exps: Vec<u32>,
}

impl MonomialMatrix {
    pub fn entry_phase(&self, col: usize) -> C64 {
        let angle = 2.0 * std::f64::consts::PI * self.exps[col] as f64 / self.root as f64;
        C64::from_polar(1.0, angle)
    }

    pub fn to_dense(&self) -> CMatrix {
        let d = self.rows.len();
        let mut m = CMatrix::zeros(d, d);
        for col in 0..d {
            m[(self.rows[col], col)] = self.entry_phase(col);
        }
        m
    }

    /// Tr(ρ · self) without forming the dense matrix.
    pub fn trace_with(&self, rho: &CMatrix) -> C64 {
        (0..self.rows.len())
            .map(|b| rho[(b, self.rows[b])] * self.entry_phase(b))
            .sum()
    }
}

/// Digits of a computational basis index, qudit 1 most significant.
pub fn basis_digits(cfg: PrimeConfig, mut index: usize) -> Vec<u32> {
    let p = cfg.p() as usize;
    let mut digits = vec![0u32; cfg.n()];
    for slot in digits.iter_mut().rev() {
        *slot = (index % p) as u32;
        index /= p;
    }
    digits
}

pub fn basis_index(cfg: PrimeConfig, digits: &[u32]) -> usize {
    digits.iter().fold(0usize, |acc, &a| acc * cfg.p() as usize + a as usize)
}

/// η(v) = μ^{q̄(v)} Z(v_z) X(v_x) in monomial form, with Z|a⟩ = ω^a|a⟩ and
/// X|a⟩ = |a−1⟩ on each tensor factor. The downward shift gives
/// X Z = ω Z X, so that η₀(v)η₀(w) = ω^{v_x·w_z} η₀(v+w) as β₀ requires.
pub fn eta_monomial(cfg: PrimeConfig, v: &SymplecticVector) -> Result<MonomialMatrix> {
    cfg.check(v)?;
    let d = cfg.d();
    if d > MATRIX_DIM_LIMIT {
        return Err(Error::Capacity(format!("d = {d} exceeds the matrix limit {MATRIX_DIM_LIMIT}")));
    }
    let p = cfg.p();
    let root = cocycle_modulus(p);
    let omega_step = root / p;
    let q = qbar(v);
    let vz: Vec<u32> = v.z_part().iter().map(|&c| c as u32).collect();
    let vx: Vec<u32> = v.x_part().iter().map(|&c| c as u32).collect();
    let mut rows = Vec::with_capacity(d);
    let mut exps = Vec::with_capacity(d);
    for b in 0..d {
        let digits = basis_digits(cfg, b);
        let shifted: Vec<u32> = digits.iter().zip(&vx).map(|(&a, &s)| (a + p - s) % p).collect();
        let z_phase = vz.iter().zip(&shifted).fold(0u32, |acc, (&z, &a)| (acc + z * a) % p);
        rows.push(basis_index(cfg, &shifted));
        exps.push((q + omega_step * z_phase) % root);
    }
    Ok(MonomialMatrix { root, rows, exps })
}

pub fn eta_matrix(cfg: PrimeConfig, v: &SymplecticVector) -> Result<CMatrix> {
    Ok(eta_monomial(cfg, v)?.to_dense())
}

/// Largest group order materialized by [`PiGroup`].
pub const PI_GROUP_LIMIT: usize = 8192;

/// π = V ×_𝔟 Z/p with (v, t)(v′, t′) = (v + v′, t + t′ + 𝔟(v, v′)).
///
/// Elements are encoded as `index_of(v) * p + t`.
#[derive(Debug, Clone)]
pub struct PiGroup {
    cfg: PrimeConfig,
    vectors: Vec<SymplecticVector>,
}

impl PiGroup {
    pub fn order(&self) -> usize {
        self.vectors.len() * self.cfg.p() as usize
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn encode(&self, v: &SymplecticVector, t: u32) -> usize {
        self.cfg.index_of(v) * self.cfg.p() as usize + (t % self.cfg.p()) as usize
    }

    pub fn decode(&self, g: usize) -> (&SymplecticVector, u32) {
        let p = self.cfg.p() as usize;
        (&self.vectors[g / p], (g % p) as u32)
    }

    /// The embedding v ↦ (v, 0).
    pub fn embed(&self, v: &SymplecticVector) -> usize {
        self.encode(v, 0)
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        let p = self.cfg.p();
        let (v, t) = self.decode(a);
        let (w, s) = self.decode(b);
        self.encode(&(v + w), (t + s + symplectic_form(v, w)) % p)
    }

    pub fn inverse(&self, a: usize) -> usize {
        // (v,t)(-v,t') = (0, t + t' + 𝔟(v,-v)) and 𝔟(v,-v) = 0.
        let p = self.cfg.p();
        let (v, t) = self.decode(a);
        self.encode(&(-v), (p - t) % p)
    }

    pub fn identity(&self) -> usize {
        0
    }
}

pub fn build_pi(cfg: PrimeConfig) -> Result<PiGroup> {
    let order = cfg.vcard() * cfg.p() as usize;
    if order > PI_GROUP_LIMIT {
        return Err(Error::Capacity(format!(
            "|pi| = {order} exceeds the group limit {PI_GROUP_LIMIT}"
        )));
    }
    Ok(PiGroup { cfg, vectors: cfg.all_vectors().collect() })
}

/// The isomorphism q: π → V × Z/2, (v, t) ↦ (v, t + 𝔮(v)), for p = 2.
pub fn q_map(v: &SymplecticVector, t: u32) -> Result<(SymplecticVector, u32)> {
    if v.p() != 2 {
        return Err(Error::Domain("q is only defined for p = 2".into()));
    }
    Ok((v.clone(), (t + frak_q(v)) % 2))
}

/// Q(v, t) = t + Σ_i x_i^*(v) z_i^*(v) on V × Z/2, for p = 2.
pub fn quadratic_form_q(v: &SymplecticVector, t: u32) -> Result<u32> {
    if v.p() != 2 {
        return Err(Error::Domain("the quadratic form Q is only defined for p = 2".into()));
    }
    Ok((t + frak_q(v)) % 2)
}

/// A set of vectors of V × Z/2 spans a singular subspace when Q vanishes on
/// every element of the span (which forces the polar form to vanish too).
pub fn is_singular(points: &[(SymplecticVector, u32)]) -> Result<bool> {
    let Some((first, _)) = points.first() else {
        return Ok(true);
    };
    let zero = (&first.scale(0), 0u32);
    let mut span: Vec<(SymplecticVector, u32)> = vec![(zero.0.clone(), zero.1)];
    for (v, t) in points {
        let mut grown = span.clone();
        for (w, s) in &span {
            let candidate = (v + w, (t + s) % 2);
            if !grown.contains(&candidate) {
                grown.push(candidate);
            }
        }
        span = grown;
    }
    for (v, t) in &span {
        if quadratic_form_q(v, *t)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfp::{enumerate_isotropic, span};

    fn cfg(p: u32, n: usize) -> PrimeConfig {
        PrimeConfig::new(p, n).unwrap()
    }

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn mu_pow(p: u32, e: u32) -> C64 {
        let m = cocycle_modulus(p);
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / m as f64)
    }

    #[test]
    fn symplectic_examples() {
        for p in [2, 3, 5] {
            let c = cfg(p, 2);
            assert_eq!(symplectic_form(&c.z(1), &c.x(1)), p - 1);
            assert_eq!(symplectic_form(&c.x(1), &c.z(1)), 1);
            assert_eq!(symplectic_form(&c.x(1), &c.x(2)), 0);
            for v in c.all_vectors().step_by(7) {
                assert_eq!(symplectic_form(&v, &v), 0);
            }
        }
    }

    #[test]
    fn beta_vanishes_at_zero() {
        for p in [2, 3] {
            let c = cfg(p, 2);
            for v in c.all_vectors() {
                assert_eq!(beta(&v, &c.zero()).value, 0);
                assert_eq!(beta(&c.zero(), &v).value, 0);
            }
        }
    }

    #[test]
    fn beta_qubit_example_matches_matrices() {
        let c = cfg(2, 1);
        let (x, z) = (c.x(1), c.z(1));
        assert_eq!(beta(&x, &z), CocycleValue { value: 1, modulus: 4 });
        let lhs = eta_matrix(c, &x).unwrap() * eta_matrix(c, &z).unwrap();
        let rhs = eta_matrix(c, &(&x + &z)).unwrap() * mu_pow(2, 1);
        assert!(max_dev(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn beta_qutrit_example_matches_matrices() {
        // 2β = 𝔟 with 𝔟(z1, x1) = 2 gives β(z1, x1) = 1 in Z/3.
        let c = cfg(3, 1);
        let (z, x) = (c.z(1), c.x(1));
        assert_eq!(beta(&z, &x).value, 1);
        assert_eq!(2 * beta(&z, &x).value % 3, symplectic_form(&z, &x));
        let lhs = eta_matrix(c, &z).unwrap() * eta_matrix(c, &x).unwrap();
        let rhs = eta_matrix(c, &(&z + &x)).unwrap() * mu_pow(3, 1);
        assert!(max_dev(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn eta_examples() {
        let c = cfg(2, 1);
        assert!(max_dev(&eta_matrix(c, &c.zero()).unwrap(), &CMatrix::identity(2, 2)) < 1e-15);
        let z = eta_matrix(c, &c.z(1)).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
        );
        assert!(max_dev(&z, &expected) < 1e-15);

        let y = eta_matrix(c, &c.y(1)).unwrap();
        let x = eta_matrix(c, &c.x(1)).unwrap();
        let izx = (&z * &x) * C64::new(0.0, 1.0);
        assert!(max_dev(&y, &izx) < 1e-15);
        assert!(max_dev(&y, &y.adjoint()) < 1e-15);
        // iZX is minus the textbook Y
        assert!((y[(0, 1)] - C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((y[(1, 0)] - C64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cocycle_law_holds_exhaustively() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let c = cfg(p, n);
            let etas: Vec<CMatrix> = c.all_vectors().map(|v| eta_matrix(c, &v).unwrap()).collect();
            for v in c.all_vectors() {
                for w in c.all_vectors() {
                    let lhs = &etas[c.index_of(&v)] * &etas[c.index_of(&w)];
                    let rhs = &etas[c.index_of(&(&v + &w))] * mu_pow(p, beta(&v, &w).value);
                    assert!(max_dev(&lhs, &rhs) < 1e-12, "{v} {w}");
                }
            }
        }
    }

    #[test]
    fn commutation_law_holds_exhaustively() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
            let c = cfg(p, n);
            let omega = |e: u32| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / p as f64);
            let etas: Vec<CMatrix> = c.all_vectors().map(|v| eta_matrix(c, &v).unwrap()).collect();
            for v in c.all_vectors() {
                for w in c.all_vectors() {
                    let (a, b) = (&etas[c.index_of(&v)], &etas[c.index_of(&w)]);
                    let lhs = a * b;
                    let rhs = (b * a) * omega(symplectic_form(&v, &w));
                    assert!(max_dev(&lhs, &rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn twice_beta_on_isotropic_pairs() {
        for (p, n) in [(2, 2), (3, 2)] {
            let c = cfg(p, n);
            for v in c.all_vectors() {
                for w in c.all_vectors() {
                    let b = beta(&v, &w).value;
                    if p == 2 {
                        if symplectic_form(&v, &w) == 0 {
                            assert_eq!(2 * b % 4, 0);
                        }
                    } else {
                        assert_eq!(2 * b % p, symplectic_form(&v, &w));
                    }
                }
            }
        }
    }

    #[test]
    fn eta_has_order_p() {
        for (p, n) in [(2, 2), (3, 1), (3, 2), (5, 1)] {
            let c = cfg(p, n);
            for v in c.all_vectors() {
                let m = eta_matrix(c, &v).unwrap();
                let mut acc = CMatrix::identity(c.d(), c.d());
                for _ in 0..p {
                    acc = &acc * &m;
                }
                assert!(max_dev(&acc, &CMatrix::identity(c.d(), c.d())) < 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn restricted_beta_examples() {
        let c3 = cfg(3, 2);
        for iso in enumerate_isotropic(c3, Some(2)).unwrap() {
            assert!(restricted_beta(&iso).unwrap().is_zero());
        }
        let c = cfg(2, 2);
        let xs = span(&[c.x(1), c.x(2)], c).unwrap();
        assert!(restricted_beta(&xs).unwrap().is_zero());

        let ys = span(&[c.y(1), c.y(2)], c).unwrap();
        let r = restricted_beta(&ys).unwrap();
        assert_eq!(r.get(&c.y(1), &c.y(2)), Some(1));
        // Matrix oracle: η(y1)η(y2) = i^2 η(y1+y2).
        let lhs = eta_matrix(c, &c.y(1)).unwrap() * eta_matrix(c, &c.y(2)).unwrap();
        let rhs = eta_matrix(c, &(&c.y(1) + &c.y(2))).unwrap() * mu_pow(2, 2);
        assert!(max_dev(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn restricted_beta_rejects_non_isotropic() {
        let c = cfg(2, 1);
        let s = span(&[c.x(1), c.z(1)], c).unwrap();
        assert!(matches!(restricted_beta(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn pi_group_examples() {
        let c = cfg(2, 2);
        let g = build_pi(c).unwrap();
        assert_eq!(g.order(), 32);
        let xs = span(&[c.x(1), c.x(2)], c).unwrap();
        for v in xs.elements() {
            for w in xs.elements() {
                assert_eq!(g.multiply(g.embed(&v), g.embed(&w)), g.embed(&(&v + &w)));
            }
        }
        // 𝔟 is symmetric mod 2, so π is abelian at p = 2 ...
        let (x, z) = (g.embed(&c.x(1)), g.embed(&c.z(1)));
        assert_eq!(g.multiply(x, z), g.multiply(z, x));
        assert_ne!(g.multiply(x, z), g.embed(&(&c.x(1) + &c.z(1))));
        // ... but not at odd p.
        let c3 = cfg(3, 1);
        let g3 = build_pi(c3).unwrap();
        let (x, z) = (g3.embed(&c3.x(1)), g3.embed(&c3.z(1)));
        assert_ne!(g3.multiply(x, z), g3.multiply(z, x));
    }

    #[test]
    fn pi_group_axioms() {
        for (p, n) in [(2, 1), (3, 1), (2, 2)] {
            let g = build_pi(cfg(p, n)).unwrap();
            let order = g.order();
            for a in 0..order {
                assert_eq!(g.multiply(a, g.inverse(a)), g.identity());
                assert_eq!(g.multiply(g.identity(), a), a);
                for b in 0..order {
                    for c in (0..order).step_by(3) {
                        assert_eq!(
                            g.multiply(g.multiply(a, b), c),
                            g.multiply(a, g.multiply(b, c))
                        );
                    }
                }
            }
            // the central copy of Z/p
            for t in 0..p {
                let central = g.encode(&cfg(p, n).zero(), t);
                for a in 0..order {
                    assert_eq!(g.multiply(central, a), g.multiply(a, central));
                }
            }
        }
        assert!(matches!(build_pi(cfg(3, 4)), Err(Error::Capacity(_))));
    }

    #[test]
    fn quadratic_form_examples() {
        let c = cfg(2, 1);
        assert_eq!(quadratic_form_q(&c.zero(), 0).unwrap(), 0);
        let (y, t) = q_map(&c.y(1), 0).unwrap();
        assert_eq!(t, 1);
        assert_eq!(quadratic_form_q(&y, t).unwrap(), 0);
        assert_eq!(quadratic_form_q(&c.x(1), 1).unwrap(), 1);
        assert!(quadratic_form_q(&cfg(3, 1).x(1), 0).is_err());
    }

    #[test]
    fn isotropic_subspaces_map_to_singular_subspaces() {
        let c = cfg(2, 2);
        for iso in enumerate_isotropic(c, None).unwrap() {
            let image: Vec<_> =
                iso.basis().iter().map(|v| q_map(v, 0).unwrap()).collect();
            assert!(is_singular(&image).unwrap());
        }
        // (x1, 0) and (z1, 0) span a non-singular plane.
        assert!(!is_singular(&[(c.x(1), 0), (c.z(1), 0)]).unwrap());
    }
}
