//! Low-degree topology of the classifying space: the normalized chain
//! complex in degrees ≤ 3, the [β] obstruction, homology dimensions, coset
//! posets with their Euler characteristics, and the sphere-count formula.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::gfp::{inv_mod, PrimeConfig, Subspace, SymplecticVector};
use crate::pauli::{commuting_beta, PiGroup};
use crate::presheaf::ContextCover;
use crate::rational::Rational;

/// Largest |Σ(𝓘)| accepted by [`build_chain_complex`].
pub const SUPPORT_LIMIT: usize = 512;
/// Largest |G|·|𝓘| accepted by [`coset_poset`].
pub const POSET_LIMIT: usize = 100_000;

type SparseRow = Vec<(usize, u32)>;

/// Rank over Z/p of sparse rows, by elimination on leading columns.
pub fn sparse_rank(rows: &[SparseRow], p: u32) -> usize {
    let mut pivots: HashMap<usize, SparseRow> = HashMap::new();
    for row in rows {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for &(j, c) in row {
            let e = acc.entry(j).or_insert(0);
            *e = (*e + c) % p;
        }
        acc.retain(|_, c| *c != 0);
        loop {
            let Some((&lead, &c)) = acc.iter().next() else { break };
            match pivots.get(&lead) {
                Some(prow) => {
                    let f = p - c;
                    for &(j, y) in prow {
                        let e = acc.entry(j).or_insert(0);
                        *e = (*e + f * y) % p;
                        if *e == 0 {
                            acc.remove(&j);
                        }
                    }
                }
                None => {
                    let inv = inv_mod(c, p);
                    let normalized = acc.iter().map(|(&j, &x)| (j, x * inv % p)).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Nondegenerate simplices of degrees 0..=3 and the boundary maps between
/// them. `boundary[k]` maps degree k+1 to degree k, one sparse row per
/// (k+1)-simplex.
#[derive(Debug, Clone)]
pub struct TruncatedChainComplex {
    pub p: u32,
    pub simplices: [Vec<Vec<SymplecticVector>>; 4],
    pub boundary: [Vec<SparseRow>; 3],
}

impl TruncatedChainComplex {
    pub fn rank(&self, degree: usize) -> usize {
        self.simplices[degree].len()
    }

    /// Rank of ∂_k : C_k → C_{k−1}, for k in 1..=3.
    pub fn boundary_rank(&self, k: usize) -> usize {
        sparse_rank(&self.boundary[k - 1], self.p)
    }
}

fn tuples_in(context: &Subspace, k: usize, out: &mut Vec<Vec<SymplecticVector>>) {
    let nonzero: Vec<SymplecticVector> = context.elements().into_iter().skip(1).collect();
    let mut idx = vec![0usize; k];
    if nonzero.is_empty() {
        return;
    }
    loop {
        out.push(idx.iter().map(|&i| nonzero[i].clone()).collect());
        let mut pos = k;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < nonzero.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Faces of [v_1|…|v_k] with signs, dropping faces with a zero entry.
pub fn boundary_terms(simplex: &[SymplecticVector], p: u32) -> Vec<(Vec<SymplecticVector>, u32)> {
    let k = simplex.len();
    let sign = |i: usize| if i.is_multiple_of(2) { 1 } else { p - 1 };
    let mut out = Vec::with_capacity(k + 1);
    out.push((simplex[1..].to_vec(), 1));
    for i in 0..k - 1 {
        let merged = &simplex[i] + &simplex[i + 1];
        if merged.is_zero() {
            continue;
        }
        let mut face = simplex[..i].to_vec();
        face.push(merged);
        face.extend_from_slice(&simplex[i + 2..]);
        out.push((face, sign(i + 1)));
    }
    out.push((simplex[..k - 1].to_vec(), sign(k)));
    out
}

pub fn build_chain_complex(cover: &ContextCover) -> Result<TruncatedChainComplex> {
    if cover.support().len() > SUPPORT_LIMIT {
        return Err(Error::Capacity(format!(
            "|Σ| = {} exceeds the chain-complex limit {SUPPORT_LIMIT}",
            cover.support().len()
        )));
    }
    let p = cover.cfg().p();
    let maximal = cover.maximal_contexts();
    let mut simplices: [Vec<Vec<SymplecticVector>>; 4] = Default::default();
    simplices[0].push(Vec::new());
    for (k, slot) in simplices.iter_mut().enumerate().skip(1) {
        let mut all = Vec::new();
        for ctx in &maximal {
            tuples_in(ctx, k, &mut all);
        }
        all.sort();
        all.dedup();
        *slot = all;
    }
    let mut boundary: [Vec<SparseRow>; 3] = Default::default();
    for k in 1..=3 {
        let index: HashMap<&[SymplecticVector], usize> =
            simplices[k - 1].iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        boundary[k - 1] = simplices[k]
            .iter()
            .map(|s| {
                boundary_terms(s, p)
                    .into_iter()
                    .map(|(face, c)| (index[face.as_slice()], c))
                    .collect()
            })
            .collect();
    }
    Ok(TruncatedChainComplex { p, simplices, boundary })
}

/// Whether β restricted to the 2-simplices is δs for a 1-cochain s, with a
/// witness s on the degree-1 basis when it is.
pub fn beta_is_coboundary(cover: &ContextCover) -> Result<(bool, Option<Vec<(SymplecticVector, u32)>>)> {
    let complex = build_chain_complex(cover)?;
    let p = complex.p;
    let ones = &complex.simplices[1];
    let mut system = crate::gfp::LinearSystem::new(ones.len(), p);
    for (row, simplex) in complex.boundary[1].iter().zip(&complex.simplices[2]) {
        let b = commuting_beta(&simplex[0], &simplex[1])?;
        // (δs)(v, w) = s(∂(v, w)).
        system.add_sparse(row, b);
        if system.is_inconsistent() {
            return Ok((false, None));
        }
    }
    let solution = system.solve();
    Ok(match solution.particular {
        Some(s) => (true, Some(ones.iter().map(|v| v[0].clone()).zip(s).collect())),
        None => (false, None),
    })
}

/// (dim H_1, dim H^2) over Z/p.
pub fn homology_dims(cover: &ContextCover) -> Result<(usize, usize)> {
    let complex = build_chain_complex(cover)?;
    let r2 = complex.boundary_rank(2);
    let r3 = complex.boundary_rank(3);
    Ok((complex.rank(1) - r2, complex.rank(2) - r2 - r3))
}

/// A finite group with elements 0..order and a map V → G.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn multiply(&self, a: usize, b: usize) -> usize;
    fn inverse(&self, a: usize) -> usize;
    fn embed(&self, v: &SymplecticVector) -> usize;
    fn name(&self) -> &'static str;
}

/// V itself, elements indexed by [`PrimeConfig::index_of`].
#[derive(Debug, Clone)]
pub struct AbelianV {
    cfg: PrimeConfig,
    vectors: Vec<SymplecticVector>,
}

impl AbelianV {
    pub fn new(cfg: PrimeConfig) -> Self {
        Self { cfg, vectors: cfg.all_vectors().collect() }
    }
}

impl FiniteGroup for AbelianV {
    fn order(&self) -> usize {
        self.vectors.len()
    }

    fn identity(&self) -> usize {
        0
    }

    fn multiply(&self, a: usize, b: usize) -> usize {
        self.cfg.index_of(&(&self.vectors[a] + &self.vectors[b]))
    }

    fn inverse(&self, a: usize) -> usize {
        self.cfg.index_of(&(-&self.vectors[a]))
    }

    fn embed(&self, v: &SymplecticVector) -> usize {
        self.cfg.index_of(v)
    }

    fn name(&self) -> &'static str {
        "abelian"
    }
}

impl FiniteGroup for PiGroup {
    fn order(&self) -> usize {
        PiGroup::order(self)
    }

    fn identity(&self) -> usize {
        PiGroup::identity(self)
    }

    fn multiply(&self, a: usize, b: usize) -> usize {
        PiGroup::multiply(self, a, b)
    }

    fn inverse(&self, a: usize) -> usize {
        PiGroup::inverse(self, a)
    }

    fn embed(&self, v: &SymplecticVector) -> usize {
        PiGroup::embed(self, v)
    }

    fn name(&self) -> &'static str {
        "full-extension"
    }
}

/// Checks e_v e_w = e_{v+w} for every commuting pair inside a context of the
/// cover, i.e. that each context embeds as a subgroup.
pub fn verify_presentation(group: &dyn FiniteGroup, cover: &ContextCover) -> Result<()> {
    for ctx in cover.maximal_contexts() {
        let elems = ctx.elements();
        for v in &elems {
            for w in &elems {
                let lhs = group.multiply(group.embed(v), group.embed(w));
                if lhs != group.embed(&(v + w)) {
                    return Err(Error::Domain(format!(
                        "relation e_v e_w = e_(v+w) fails in the {} group for v = {v}, w = {w}",
                        group.name()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Left cosets gA for the cover's subgroups A, ordered by inclusion.
#[derive(Debug, Clone)]
pub struct CosetPoset {
    /// (subgroup index into the cover, sorted members).
    pub elements: Vec<(usize, Vec<usize>)>,
    /// below[x] lists every y < x.
    pub below: Vec<Vec<usize>>,
    /// Longest strict chain in the cover, in steps.
    pub cover_height: usize,
}

impl CosetPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn coset_poset(group: &dyn FiniteGroup, cover: &ContextCover) -> Result<CosetPoset> {
    let order = group.order();
    let contexts = cover.contexts();
    if order.saturating_mul(contexts.len()) > POSET_LIMIT {
        return Err(Error::Capacity(format!(
            "|G|·|cover| = {} exceeds the coset-poset limit {POSET_LIMIT}",
            order * contexts.len()
        )));
    }
    verify_presentation(group, cover)?;
    let subgroups: Vec<Vec<usize>> = contexts
        .iter()
        .map(|ctx| {
            let mut m: Vec<usize> = ctx.elements().iter().map(|v| group.embed(v)).collect();
            m.sort_unstable();
            m
        })
        .collect();
    // coset_id[a][g] = index of the coset gA in `elements`.
    let mut elements = Vec::new();
    let mut coset_id = vec![vec![usize::MAX; order]; contexts.len()];
    for (a, members) in subgroups.iter().enumerate() {
        for g in 0..order {
            if coset_id[a][g] != usize::MAX {
                continue;
            }
            let mut coset: Vec<usize> = members.iter().map(|&h| group.multiply(g, h)).collect();
            coset.sort_unstable();
            let id = elements.len();
            for &x in &coset {
                coset_id[a][x] = id;
            }
            elements.push((a, coset));
        }
    }
    let mut below = vec![Vec::new(); elements.len()];
    for (x, (b, members)) in elements.iter().enumerate() {
        for (a, ctx) in contexts.iter().enumerate() {
            if a == *b || ctx.dim() >= contexts[*b].dim() || !ctx.is_subspace_of(&contexts[*b]) {
                continue;
            }
            let mut ys: Vec<usize> = members.iter().map(|&g| coset_id[a][g]).collect();
            ys.sort_unstable();
            ys.dedup();
            below[x].extend(ys);
        }
    }
    Ok(CosetPoset { elements, below, cover_height: cover.longest_chain() })
}

/// Σ_k (−1)^k · #(chains with k+1 elements), via f(x) = 1 − Σ_{y<x} f(y).
pub fn euler_characteristic(poset: &CosetPoset) -> i64 {
    // Elements are created in cover order, which lists subgroups by
    // dimension, so everything below x has a smaller index.
    let mut f = vec![0i64; poset.len()];
    for x in 0..poset.len() {
        f[x] = 1 - poset.below[x].iter().map(|&y| f[y]).sum::<i64>();
    }
    f.iter().sum()
}

/// (−1)^h (χ − 1), where h must be the longest chain of the cover.
pub fn sphere_count(poset: &CosetPoset, fiber_dim: usize) -> Result<i64> {
    if fiber_dim != poset.cover_height {
        return Err(Error::Domain(format!(
            "fiber dimension {fiber_dim} differs from the cover's longest chain {}",
            poset.cover_height
        )));
    }
    let chi = euler_characteristic(poset);
    Ok(if fiber_dim.is_multiple_of(2) { chi - 1 } else { 1 - chi })
}

fn big_pow(p: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// d(p, r) = (−1)^{r+1} + p^{2r+1+r²}
///   + Σ_{j=1}^{r} (−1)^j p^{2r+1−j+(r−j)²} Π_{t=0}^{j−1} (p^{2r−t} − p^t)/(p^j − p^t),
/// evaluated with r = n.
pub fn d_formula(p: u32, n: usize) -> Result<BigInt> {
    PrimeConfig::new(p, n)?;
    let r = n as u32;
    let mut total = Rational::from_integer(if (r + 1).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() });
    total += Rational::from_integer(big_pow(p, 2 * r + 1 + r * r));
    for j in 1..=r {
        let mut product = Rational::one();
        for t in 0..j {
            product *= Rational::new(big_pow(p, 2 * r - t) - big_pow(p, t), big_pow(p, j) - big_pow(p, t));
        }
        if !product.is_integer() {
            return Err(Error::Formula(format!("the j = {j} product is not an integer: {product}")));
        }
        let term = Rational::from_integer(big_pow(p, 2 * r + 1 - j + (r - j) * (r - j))) * product;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    if !total.is_integer() || !total.is_positive() {
        return Err(Error::Formula(format!("d({p}, {n}) evaluates to {total}")));
    }
    Ok(total.to_integer())
}

pub fn d_formula_i64(p: u32, n: usize) -> Result<i64> {
    d_formula(p, n)?.to_i64().ok_or_else(|| Error::Capacity("d(p, n) overflows i64".into()))
}

/// Which group to build the coset poset in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupChoice {
    /// π = V ×_𝔟 Z/p for the full cover (n ≥ 2), V otherwise.
    Auto,
    FullExtension,
    Abelian,
}

/// Resolves the group for a cover. The full cover at n = 1 has an infinite
/// fundamental group and is refused.
pub fn choose_group(cover: &ContextCover, choice: GroupChoice) -> Result<Box<dyn FiniteGroup>> {
    let cfg = cover.cfg();
    let full = match choice {
        GroupChoice::Auto => {
            let full = cover.is_full()?;
            if full && cfg.n() == 1 {
                return Err(Error::Domain(
                    "the full cover at n = 1 has no finite fundamental group; pass --group explicitly".into(),
                ));
            }
            full
        }
        GroupChoice::FullExtension => true,
        GroupChoice::Abelian => false,
    };
    Ok(if full {
        Box::new(crate::pauli::build_pi(cfg)?)
    } else {
        if cfg.vcard() > crate::pauli::PI_GROUP_LIMIT {
            return Err(Error::Capacity(format!("|V| = {} exceeds the group limit", cfg.vcard())));
        }
        Box::new(AbelianV::new(cfg))
    })
}
