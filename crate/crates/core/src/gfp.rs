//! Exact linear algebra over Z/p.
//!
//! Vectors of V = (Z/p)^{2n} are stored in (z|x) order: the first n
//! coordinates are the Z-exponents, the last n the X-exponents. Subspaces
//! are kept in reduced row echelon form, so two subspaces are equal exactly
//! when their bases are.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Largest |V| for which subspace enumeration is attempted.
pub const ENUMERATION_LIMIT: usize = 4096;

pub const SUPPORTED_PRIMES: [u32; 4] = [2, 3, 5, 7];

pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p), "zero has no inverse");
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut base: u32, mut exp: u32, p: u32) -> u32 {
    let mut acc = 1u32;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc % p
}

/// The prime, the qudit count, and the derived sizes d = p^n, |V| = p^{2n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeConfig {
    p: u32,
    n: usize,
}

impl PrimeConfig {
    pub fn new(p: u32, n: usize) -> Result<Self> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::Input(format!(
                "prime p = {p} is not supported (expected one of 2, 3, 5, 7)"
            )));
        }
        if n == 0 {
            return Err(Error::Input("qudit count n must be at least 1".into()));
        }
        if (p as f64).powi(2 * n as i32) > u32::MAX as f64 {
            return Err(Error::Capacity(format!("|V| = {p}^{} does not fit", 2 * n)));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert space dimension p^n.
    pub fn d(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    /// |V| = p^{2n}.
    pub fn vcard(&self) -> usize {
        (self.p as usize).pow(2 * self.n as u32)
    }

    pub fn zero(&self) -> SymplecticVector {
        SymplecticVector { p: self.p as u8, coords: vec![0; 2 * self.n] }
    }

    /// The basis vector z_i (1-based, as in z_1, ..., z_n).
    pub fn z(&self, i: usize) -> SymplecticVector {
        assert!(i >= 1 && i <= self.n, "z index {i} out of range");
        let mut v = self.zero();
        v.coords[i - 1] = 1;
        v
    }

    /// The basis vector x_i (1-based).
    pub fn x(&self, i: usize) -> SymplecticVector {
        assert!(i >= 1 && i <= self.n, "x index {i} out of range");
        let mut v = self.zero();
        v.coords[self.n + i - 1] = 1;
        v
    }

    /// y_i := x_i + z_i.
    pub fn y(&self, i: usize) -> SymplecticVector {
        &self.x(i) + &self.z(i)
    }

    pub fn vector(&self, coords: &[u32]) -> Result<SymplecticVector> {
        if coords.len() != 2 * self.n {
            return Err(Error::Input(format!(
                "vector has length {}, expected 2n = {}",
                coords.len(),
                2 * self.n
            )));
        }
        Ok(SymplecticVector {
            p: self.p as u8,
            coords: coords.iter().map(|&c| (c % self.p) as u8).collect(),
        })
    }

    /// Position of `v` in the lexicographic enumeration of V.
    pub fn index_of(&self, v: &SymplecticVector) -> usize {
        v.coords.iter().fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn vector_at(&self, mut index: usize) -> SymplecticVector {
        let p = self.p as usize;
        let mut coords = vec![0u8; 2 * self.n];
        for slot in coords.iter_mut().rev() {
            *slot = (index % p) as u8;
            index /= p;
        }
        SymplecticVector { p: self.p as u8, coords }
    }

    /// All of V in index order.
    pub fn all_vectors(&self) -> impl Iterator<Item = SymplecticVector> + '_ {
        (0..self.vcard()).map(move |i| self.vector_at(i))
    }

    pub(crate) fn check(&self, v: &SymplecticVector) -> Result<()> {
        if v.p as u32 != self.p || v.coords.len() != 2 * self.n {
            return Err(Error::Input(format!(
                "vector {v} does not belong to V for p = {}, n = {}",
                self.p, self.n
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PrimeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={}, n={}", self.p, self.n)
    }
}

/// An element v = (v_z, v_x) of V.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticVector {
    p: u8,
    coords: Vec<u8>,
}

impl SymplecticVector {
    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn n(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn z_part(&self) -> &[u8] {
        &self.coords[..self.n()]
    }

    pub fn x_part(&self) -> &[u8] {
        &self.coords[self.n()..]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: u32) -> SymplecticVector {
        let p = self.p as u32;
        SymplecticVector {
            p: self.p,
            coords: self.coords.iter().map(|&c| ((c as u32 * (k % p)) % p) as u8).collect(),
        }
    }

    pub fn to_u32(&self) -> Vec<u32> {
        self.coords.iter().map(|&c| c as u32).collect()
    }
}

impl fmt::Debug for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymplecticVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i == n {
                write!(f, "|")?;
            } else if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &SymplecticVector {
    type Output = SymplecticVector;

    fn add(self, rhs: &SymplecticVector) -> SymplecticVector {
        assert_eq!(self.coords.len(), rhs.coords.len(), "vector length mismatch");
        assert_eq!(self.p, rhs.p, "vector modulus mismatch");
        SymplecticVector {
            p: self.p,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(&a, &b)| ((a as u32 + b as u32) % self.p as u32) as u8)
                .collect(),
        }
    }
}

impl Neg for &SymplecticVector {
    type Output = SymplecticVector;

    fn neg(self) -> SymplecticVector {
        let p = self.p as u32;
        SymplecticVector {
            p: self.p,
            coords: self.coords.iter().map(|&c| ((p - c as u32) % p) as u8).collect(),
        }
    }
}

impl Sub for &SymplecticVector {
    type Output = SymplecticVector;

    fn sub(self, rhs: &SymplecticVector) -> SymplecticVector {
        self + &(-rhs)
    }
}

/// Reduces `rows` in place to reduced row echelon form over Z/p, dropping
/// zero rows. Returns the pivot column of each remaining row.
pub fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = inv_mod(rows[rank][col], p);
        for entry in rows[rank].iter_mut() {
            *entry = *entry * inv % p;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let factor = row[col] % p;
            if factor == 0 {
                continue;
            }
            for (entry, &pv) in row.iter_mut().zip(&pivot_row) {
                *entry = (*entry + (p - factor) * pv) % p;
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

/// A linear subspace of V in canonical (reduced row echelon) form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    cfg: PrimeConfig,
    basis: Vec<SymplecticVector>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ">")
    }
}

impl Subspace {
    pub fn zero(cfg: PrimeConfig) -> Self {
        Self { cfg, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn basis(&self) -> &[SymplecticVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// p^dim.
    pub fn len(&self) -> usize {
        (self.cfg.p as usize).pow(self.dim() as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    /// Coefficients of `v` with respect to the echelon basis, if `v` lies in
    /// the subspace.
    pub fn coefficients(&self, v: &SymplecticVector) -> Option<Vec<u32>> {
        if v.coords.len() != 2 * self.cfg.n || v.p as u32 != self.cfg.p {
            return None;
        }
        let p = self.cfg.p;
        let coeffs: Vec<u32> = self.pivots.iter().map(|&c| v.coords[c] as u32).collect();
        let mut rebuilt = vec![0u32; v.coords.len()];
        for (b, &c) in self.basis.iter().zip(&coeffs) {
            for (slot, &bc) in rebuilt.iter_mut().zip(&b.coords) {
                *slot = (*slot + c * bc as u32) % p;
            }
        }
        rebuilt
            .iter()
            .zip(&v.coords)
            .all(|(&a, &b)| a == b as u32)
            .then_some(coeffs)
    }

    pub fn contains(&self, v: &SymplecticVector) -> bool {
        self.coefficients(v).is_some()
    }

    /// Index of `v` in [`Subspace::elements`] order.
    pub fn element_index(&self, v: &SymplecticVector) -> Option<usize> {
        let p = self.cfg.p as usize;
        self.coefficients(v)
            .map(|c| c.iter().fold(0usize, |acc, &d| acc * p + d as usize))
    }

    pub fn element_at(&self, mut index: usize) -> SymplecticVector {
        let p = self.cfg.p as usize;
        let mut coeffs = vec![0u32; self.dim()];
        for slot in coeffs.iter_mut().rev() {
            *slot = (index % p) as u32;
            index /= p;
        }
        self.combination(&coeffs)
    }

    pub fn combination(&self, coeffs: &[u32]) -> SymplecticVector {
        let mut v = self.cfg.zero();
        for (b, &c) in self.basis.iter().zip(coeffs) {
            if c % self.cfg.p != 0 {
                v = &v + &b.scale(c);
            }
        }
        v
    }

    /// Every element, ordered by the base-p digits of its basis coefficients.
    pub fn elements(&self) -> Vec<SymplecticVector> {
        (0..self.len()).map(|i| self.element_at(i)).collect()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// The subspace spanned by both.
    pub fn sum(&self, other: &Subspace) -> Subspace {
        let gens: Vec<SymplecticVector> =
            self.basis.iter().chain(other.basis.iter()).cloned().collect();
        span(&gens, self.cfg).expect("bases share a configuration")
    }
}

/// The Z/p-span of `generators`, in canonical echelon form.
pub fn span(generators: &[SymplecticVector], cfg: PrimeConfig) -> Result<Subspace> {
    for g in generators {
        cfg.check(g)?;
    }
    let mut rows: Vec<Vec<u32>> = generators.iter().map(SymplecticVector::to_u32).collect();
    let pivots = rref(&mut rows, cfg.p);
    let basis = rows
        .iter()
        .map(|r| SymplecticVector { p: cfg.p as u8, coords: r.iter().map(|&c| c as u8).collect() })
        .collect();
    Ok(Subspace { cfg, basis, pivots })
}

/// Set-theoretic intersection, computed with the Zassenhaus construction.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    if a.cfg != b.cfg {
        return Err(Error::Input(format!(
            "cannot intersect subspaces of different spaces ({} vs {})",
            a.cfg, b.cfg
        )));
    }
    let cfg = a.cfg;
    let w = 2 * cfg.n;
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(a.dim() + b.dim());
    for v in &a.basis {
        let mut row = v.to_u32();
        row.extend(v.to_u32());
        rows.push(row);
    }
    for v in &b.basis {
        let mut row = v.to_u32();
        row.extend(std::iter::repeat_n(0, w));
        rows.push(row);
    }
    rref(&mut rows, cfg.p);
    let gens: Vec<SymplecticVector> = rows
        .iter()
        .filter(|r| r[..w].iter().all(|&c| c == 0))
        .map(|r| SymplecticVector { p: cfg.p as u8, coords: r[w..].iter().map(|&c| c as u8).collect() })
        .collect();
    span(&gens, cfg)
}

/// Solutions of a linear system over Z/p: one particular solution (when
/// consistent) plus a basis of the homogeneous solution space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolutionSet {
    pub p: u32,
    pub unknowns: usize,
    pub particular: Option<Vec<u32>>,
    pub kernel_basis: Vec<Vec<u32>>,
}

impl AffineSolutionSet {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    pub fn kernel_rank(&self) -> usize {
        self.kernel_basis.len()
    }

    /// Number of solutions, or `None` if it overflows u128.
    pub fn count(&self) -> Option<u128> {
        if self.is_empty() {
            return Some(0);
        }
        (self.p as u128).checked_pow(self.kernel_rank() as u32)
    }

    pub fn solution(&self, coeffs: &[u32]) -> Option<Vec<u32>> {
        let mut x = self.particular.clone()?;
        for (k, &c) in self.kernel_basis.iter().zip(coeffs) {
            for (xi, &ki) in x.iter_mut().zip(k) {
                *xi = (*xi + c * ki) % self.p;
            }
        }
        Some(x)
    }

    /// All solutions, refusing when there are more than `limit`.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<u32>>> {
        let Some(count) = self.count() else {
            return Err(Error::Capacity("solution count overflows".into()));
        };
        if count > limit as u128 {
            return Err(Error::Capacity(format!(
                "{count} solutions exceed the enumeration limit of {limit}"
            )));
        }
        let k = self.kernel_rank();
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; k];
        for _ in 0..count {
            out.push(self.solution(&digits).expect("nonempty"));
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < self.p {
                    break;
                }
                *d = 0;
            }
        }
        Ok(out)
    }

    /// True when `x` satisfies every equation of the source system.
    pub fn satisfies(equations: &[Vec<u32>], rhs: &[u32], x: &[u32], p: u32) -> bool {
        equations.iter().zip(rhs).all(|(row, &b)| {
            row.iter().zip(x).fold(0u32, |acc, (&a, &xi)| (acc + a % p * xi) % p) == b % p
        })
    }
}

/// Incrementally row-reduced linear system over Z/p. Equations are reduced
/// against the stored pivot rows as they arrive, so redundant equations never
/// accumulate.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    p: u32,
    unknowns: usize,
    // pivot column -> (row, rhs); rows are normalized so the pivot entry is 1
    rows: HashMap<usize, (Vec<u32>, u32)>,
    inconsistent: bool,
}

impl LinearSystem {
    pub fn new(unknowns: usize, p: u32) -> Self {
        Self { p, unknowns, rows: HashMap::new(), inconsistent: false }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    /// Adds Σ coeffs[(j, c)] x_j = rhs. Repeated indices are summed.
    pub fn add_sparse(&mut self, coeffs: &[(usize, u32)], rhs: u32) {
        let mut row = vec![0u32; self.unknowns];
        for &(j, c) in coeffs {
            row[j] = (row[j] + c) % self.p;
        }
        self.add_dense(row, rhs);
    }

    pub fn add_dense(&mut self, mut row: Vec<u32>, rhs: u32) {
        if self.inconsistent {
            return;
        }
        let p = self.p;
        let mut b = rhs % p;
        for x in row.iter_mut() {
            *x %= p;
        }
        // Stored rows are zero left of their pivot, so one left-to-right sweep
        // eliminates every stored pivot.
        let mut col = 0;
        while col < self.unknowns {
            let c = row[col];
            if c != 0 {
                if let Some((prow, pb)) = self.rows.get(&col) {
                    let f = p - c;
                    for (x, &y) in row.iter_mut().zip(prow) {
                        *x = (*x + f * y) % p;
                    }
                    b = (b + f * pb) % p;
                } else {
                    let inv = inv_mod(c, p);
                    for x in row.iter_mut() {
                        *x = *x * inv % p;
                    }
                    b = b * inv % p;
                    self.rows.insert(col, (row, b));
                    return;
                }
            }
            col += 1;
        }
        if b != 0 {
            self.inconsistent = true;
        }
    }

    pub fn solve(&self) -> AffineSolutionSet {
        let p = self.p;
        if self.inconsistent {
            return AffineSolutionSet {
                p,
                unknowns: self.unknowns,
                particular: None,
                kernel_basis: Vec::new(),
            };
        }
        // Back-substitute to reduced form: process pivots right to left.
        let mut pivots: Vec<usize> = self.rows.keys().copied().collect();
        pivots.sort_unstable();
        let mut reduced: HashMap<usize, (Vec<u32>, u32)> = HashMap::new();
        for &pc in pivots.iter().rev() {
            let (mut row, mut b) = self.rows[&pc].clone();
            for &other in pivots.iter().filter(|&&o| o > pc) {
                let c = row[other];
                if c != 0 {
                    let (orow, ob) = &reduced[&other];
                    let f = p - c;
                    for (x, &y) in row.iter_mut().zip(orow) {
                        *x = (*x + f * y) % p;
                    }
                    b = (b + f * ob) % p;
                }
            }
            reduced.insert(pc, (row, b));
        }
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.unknowns).filter(|j| !pivot_set.contains(j)).collect();
        let mut particular = vec![0u32; self.unknowns];
        for (&pc, (_, b)) in &reduced {
            particular[pc] = *b;
        }
        let kernel_basis = free
            .iter()
            .map(|&f| {
                let mut k = vec![0u32; self.unknowns];
                k[f] = 1;
                for (&pc, (row, _)) in &reduced {
                    k[pc] = (p - row[f]) % p;
                }
                k
            })
            .collect();
        AffineSolutionSet { p, unknowns: self.unknowns, particular: Some(particular), kernel_basis }
    }
}

/// Solves `equations · x = rhs` over Z/p.
pub fn solve_affine(equations: &[Vec<u32>], rhs: &[u32], p: u32) -> Result<AffineSolutionSet> {
    if equations.len() != rhs.len() {
        return Err(Error::Input(format!(
            "{} equations but {} right-hand sides",
            equations.len(),
            rhs.len()
        )));
    }
    let unknowns = equations.first().map_or(0, Vec::len);
    if equations.iter().any(|r| r.len() != unknowns) {
        return Err(Error::Input("equation rows have inconsistent lengths".into()));
    }
    let mut system = LinearSystem::new(unknowns, p);
    for (row, &b) in equations.iter().zip(rhs) {
        system.add_dense(row.clone(), b);
    }
    Ok(system.solve())
}

/// Every isotropic subspace of V (optionally only those of one dimension),
/// each in canonical form, sorted by dimension and then basis.
pub fn enumerate_isotropic(cfg: PrimeConfig, exactly_dim: Option<usize>) -> Result<Vec<Subspace>> {
    use crate::pauli::symplectic_form;

    if cfg.vcard() > ENUMERATION_LIMIT {
        return Err(Error::Capacity(format!(
            "|V| = {} exceeds the enumeration limit of {ENUMERATION_LIMIT}",
            cfg.vcard()
        )));
    }
    let top = exactly_dim.unwrap_or(cfg.n).min(cfg.n);
    let vectors: Vec<SymplecticVector> = cfg.all_vectors().filter(|v| !v.is_zero()).collect();
    let mut layers: Vec<Vec<Subspace>> = vec![vec![Subspace::zero(cfg)]];
    for _ in 0..top {
        let mut next: BTreeSet<Subspace> = BTreeSet::new();
        for s in layers.last().expect("at least one layer") {
            for v in &vectors {
                if s.contains(v) || s.basis.iter().any(|b| symplectic_form(b, v) != 0) {
                    continue;
                }
                let mut gens = s.basis.clone();
                gens.push(v.clone());
                next.insert(span(&gens, cfg)?);
            }
        }
        layers.push(next.into_iter().collect());
    }
    Ok(match exactly_dim {
        Some(k) if k > cfg.n => Vec::new(),
        Some(k) => layers.swap_remove(k),
        None => layers.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u32, n: usize) -> PrimeConfig {
        PrimeConfig::new(p, n).unwrap()
    }

    #[test]
    fn config_rejects_unsupported_primes() {
        assert!(PrimeConfig::new(4, 1).is_err());
        assert!(PrimeConfig::new(11, 1).is_err());
        assert!(PrimeConfig::new(2, 0).is_err());
        let c = cfg(3, 2);
        assert_eq!((c.d(), c.vcard()), (9, 81));
    }

    #[test]
    fn vector_index_roundtrip() {
        let c = cfg(3, 2);
        for i in 0..c.vcard() {
            assert_eq!(c.index_of(&c.vector_at(i)), i);
        }
    }

    #[test]
    fn span_examples() {
        let c = cfg(2, 2);
        let zero = span(&[], c).unwrap();
        assert_eq!(zero.dim(), 0);
        assert_eq!(zero.elements(), vec![c.zero()]);

        let s = span(&[c.x(1), c.x(2)], c).unwrap();
        assert_eq!((s.dim(), s.len()), (2, 4));

        let r = span(&[c.x(1), &c.x(1) + &c.x(2), c.x(2)], c).unwrap();
        assert_eq!(r.dim(), 2);
        assert_eq!(r, s);
    }

    #[test]
    fn span_rejects_wrong_length() {
        let c = cfg(2, 2);
        let other = cfg(2, 1);
        assert!(matches!(span(&[other.x(1)], c), Err(Error::Input(_))));
    }

    #[test]
    fn intersect_examples() {
        let c = cfg(2, 2);
        let xs = span(&[c.x(1), c.x(2)], c).unwrap();
        let zs = span(&[c.z(1), c.z(2)], c).unwrap();
        assert_eq!(intersect(&xs, &xs).unwrap(), xs);
        // Oracle: element-wise intersection.
        let brute: Vec<_> = xs.elements().into_iter().filter(|v| zs.contains(v)).collect();
        assert_eq!(brute, vec![c.zero()]);
        assert!(intersect(&xs, &zs).unwrap().is_zero());

        let mixed = span(&[c.x(1), c.z(2)], c).unwrap();
        let brute: Vec<_> = xs.elements().into_iter().filter(|v| mixed.contains(v)).collect();
        assert_eq!(brute.len(), 2);
        assert_eq!(intersect(&xs, &mixed).unwrap(), span(&[c.x(1)], c).unwrap());
    }

    #[test]
    fn element_indices_follow_enumeration() {
        let c = cfg(3, 2);
        let s = span(&[c.x(1), &c.z(2) + &c.x(2).scale(2)], c).unwrap();
        for (i, v) in s.elements().iter().enumerate() {
            assert_eq!(s.element_index(v), Some(i));
        }
        assert_eq!(s.element_index(&c.z(1)), None);
    }

    #[test]
    fn solve_affine_examples() {
        let zero_eq = solve_affine(&[vec![0]], &[0], 5).unwrap();
        assert_eq!((zero_eq.kernel_rank(), zero_eq.count()), (1, Some(5)));

        let clash = solve_affine(&[vec![1], vec![1]], &[1, 0], 3).unwrap();
        assert!(clash.is_empty());
        assert_eq!(clash.count(), Some(0));

        let line = solve_affine(&[vec![1, 1]], &[1], 2).unwrap();
        assert_eq!(line.count(), Some(2));
        for x in line.enumerate(10).unwrap() {
            assert!(AffineSolutionSet::satisfies(&[vec![1, 1]], &[1], &x, 2));
        }
    }

    #[test]
    fn solve_affine_rejects_shape_mismatch() {
        assert!(solve_affine(&[vec![1, 0], vec![1]], &[0, 0], 2).is_err());
        assert!(solve_affine(&[vec![1]], &[0, 1], 2).is_err());
    }

    #[test]
    fn isotropic_counts() {
        for p in SUPPORTED_PRIMES {
            let lines = enumerate_isotropic(cfg(p, 1), Some(1)).unwrap();
            assert_eq!(lines.len(), p as usize + 1);
            let zero = enumerate_isotropic(cfg(p, 1), Some(0)).unwrap();
            assert_eq!(zero, vec![Subspace::zero(cfg(p, 1))]);
        }
        let lagrangians = enumerate_isotropic(cfg(2, 2), Some(2)).unwrap();
        assert_eq!(lagrangians.len(), 15);
    }

    #[test]
    fn lagrangian_count_matches_brute_force() {
        use crate::pauli::symplectic_form;
        // Oracle: every pair of independent vectors spans a plane; keep the
        // isotropic ones and deduplicate.
        let c = cfg(2, 2);
        let vs: Vec<_> = c.all_vectors().filter(|v| !v.is_zero()).collect();
        let mut planes = BTreeSet::new();
        for a in &vs {
            for b in &vs {
                if a != b && symplectic_form(a, b) == 0 {
                    let elems: BTreeSet<_> = [c.zero(), a.clone(), b.clone(), a + b].into();
                    planes.insert(elems);
                }
            }
        }
        assert_eq!(planes.len(), 15);
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(enumerate_isotropic(cfg(3, 4), None), Err(Error::Capacity(_))));
    }
}
