//! Context covers, the event presheaf E_β(I) = {s : I → Z/p | ds = β|_I},
//! global sections, and empirical models of quantum states.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gfp::{enumerate_isotropic, intersect, span, AffineSolutionSet, LinearSystem, PrimeConfig, Subspace, SymplecticVector};
use crate::pauli::{non_isotropic_witness, restricted_beta, symplectic_form};
use crate::quantum::{born, DensityMatrix, WignerFunction, C64, PROB_TOL};
use crate::rational::{self, Rational};

/// Enumeration guard for global sections.
pub const SECTION_LIMIT: usize = 1_000_000;
/// Largest support the section solver accepts.
pub const SECTION_SUPPORT_LIMIT: usize = 1024;

/// An intersection-closed family of isotropic subspaces, sorted by dimension
/// and then by basis. The zero subspace is present whenever two contexts
/// meet trivially.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextCover {
    cfg: PrimeConfig,
    contexts: Vec<Subspace>,
    support: Vec<SymplecticVector>,
}

impl ContextCover {
    /// Closes `subspaces` under pairwise intersection. Every subspace must be
    /// isotropic.
    pub fn from_subspaces(cfg: PrimeConfig, subspaces: Vec<Subspace>) -> Result<Self> {
        let mut set: BTreeSet<Subspace> = BTreeSet::new();
        for s in subspaces {
            if s.cfg() != cfg {
                return Err(Error::Input(format!(
                    "context {s:?} is for {}, cover is for {cfg}",
                    s.cfg()
                )));
            }
            if let Some((a, b, f)) = non_isotropic_witness(&s) {
                return Err(Error::Domain(format!(
                    "context {s:?} is not isotropic: b({a}, {b}) = {f}"
                )));
            }
            set.insert(s);
        }
        if set.is_empty() {
            set.insert(Subspace::zero(cfg));
        }
        loop {
            let current: Vec<Subspace> = set.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    if set.insert(intersect(a, b)?) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut contexts: Vec<Subspace> = set.into_iter().collect();
        contexts.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        let support: BTreeSet<SymplecticVector> =
            contexts.iter().flat_map(|c| c.elements()).collect();
        Ok(Self { cfg, contexts, support: support.into_iter().collect() })
    }

    /// The full cover 𝓘(V) of all isotropic subspaces.
    pub fn full(cfg: PrimeConfig) -> Result<Self> {
        Self::from_subspaces(cfg, enumerate_isotropic(cfg, None)?)
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn contexts(&self) -> &[Subspace] {
        &self.contexts
    }

    /// Σ(𝓘), sorted.
    pub fn support(&self) -> &[SymplecticVector] {
        &self.support
    }

    pub fn position(&self, context: &Subspace) -> Option<usize> {
        self.contexts.iter().position(|c| c == context)
    }

    pub fn contains(&self, context: &Subspace) -> bool {
        self.position(context).is_some()
    }

    /// Contexts not strictly contained in another context.
    pub fn maximal_contexts(&self) -> Vec<&Subspace> {
        self.contexts
            .iter()
            .filter(|a| {
                !self.contexts.iter().any(|b| b.dim() > a.dim() && a.is_subspace_of(b))
            })
            .collect()
    }

    /// Length of the longest strictly increasing chain of contexts, counted
    /// in steps.
    pub fn longest_chain(&self) -> usize {
        let mut height = vec![0usize; self.contexts.len()];
        for (i, a) in self.contexts.iter().enumerate() {
            for (j, b) in self.contexts[..i].iter().enumerate() {
                if b.dim() < a.dim() && b.is_subspace_of(a) {
                    height[i] = height[i].max(height[j] + 1);
                }
            }
        }
        height.into_iter().max().unwrap_or(0)
    }

    /// True when this is the full cover 𝓘(V).
    pub fn is_full(&self) -> Result<bool> {
        let all = enumerate_isotropic(self.cfg, None)?;
        Ok(all.len() == self.contexts.len() && all.iter().all(|s| self.contains(s)))
    }
}

/// Spans each generator list and closes the family under intersection.
pub fn make_cover(generator_lists: &[Vec<SymplecticVector>], cfg: PrimeConfig) -> Result<ContextCover> {
    let mut subspaces = Vec::with_capacity(generator_lists.len());
    for (k, gens) in generator_lists.iter().enumerate() {
        for (i, a) in gens.iter().enumerate() {
            cfg.check(a)?;
            for b in &gens[i + 1..] {
                cfg.check(b)?;
                let f = symplectic_form(a, b);
                if f != 0 {
                    return Err(Error::Domain(format!(
                        "context {k} is not isotropic: b({a}, {b}) = {f}"
                    )));
                }
            }
        }
        subspaces.push(span(gens, cfg)?);
    }
    ContextCover::from_subspaces(cfg, subspaces)
}

/// An element of E_β(I): values on every element of the context, aligned
/// with [`Subspace::elements`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeFunction {
    context: Subspace,
    values: Vec<u32>,
}

impl OutcomeFunction {
    /// Validates ds = β|_I.
    pub fn new(context: Subspace, values: Vec<u32>) -> Result<Self> {
        if values.len() != context.len() {
            return Err(Error::Input(format!(
                "outcome function has {} values, context has {} elements",
                values.len(),
                context.len()
            )));
        }
        let f = Self { context, values };
        f.validate()?;
        Ok(f)
    }

    pub fn context(&self) -> &Subspace {
        &self.context
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, v: &SymplecticVector) -> Option<u32> {
        self.context.element_index(v).map(|i| self.values[i])
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.context.cfg().p();
        let beta = restricted_beta(&self.context)?;
        let elems = beta.elements();
        if self.values.iter().any(|&v| v >= p) {
            return Err(Error::Domain("outcome values must lie in [0, p)".into()));
        }
        for (i, v) in elems.iter().enumerate() {
            for (j, w) in elems.iter().enumerate() {
                let k = self.context.element_index(&(v + w)).expect("closed under addition");
                let ds = (self.values[i] + self.values[j] + p - self.values[k]) % p;
                if ds != beta.at(i, j) {
                    return Err(Error::Domain(format!(
                        "s({v}) + s({w}) - s({}) = {ds}, but beta = {}",
                        v + w,
                        beta.at(i, j)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Position in the [`events`] list of this context.
    pub fn event_index(&self) -> usize {
        let p = self.context.cfg().p() as usize;
        let dim = self.context.dim();
        (0..dim).fold(0usize, |acc, i| {
            acc * p + self.values[(p).pow((dim - 1 - i) as u32)] as usize
        })
    }

    /// Restriction to a subcontext.
    pub fn restrict(&self, sub: &Subspace) -> Result<OutcomeFunction> {
        let values = sub
            .elements()
            .iter()
            .map(|v| {
                self.value(v).ok_or_else(|| {
                    Error::Domain(format!("{v} is not in the context being restricted"))
                })
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(OutcomeFunction { context: sub.clone(), values })
    }
}

/// E_β(I), enumerated by the values on the echelon basis (first basis vector
/// most significant). Each function is extended to the whole context by
/// s(u + b) = s(u) + s(b) − β(u, b) and re-verified on all pairs.
pub fn events(context: &Subspace) -> Result<Vec<OutcomeFunction>> {
    let cfg = context.cfg();
    let p = cfg.p() as usize;
    let dim = context.dim();
    let beta = restricted_beta(context)?;
    let elems = beta.elements().to_vec();
    let mut out = Vec::with_capacity(p.pow(dim as u32));
    for code in 0..p.pow(dim as u32) {
        let mut basis_vals = vec![0u32; dim];
        let mut c = code;
        for slot in basis_vals.iter_mut().rev() {
            *slot = (c % p) as u32;
            c /= p;
        }
        let mut values = vec![0u32; elems.len()];
        for idx in 1..elems.len() {
            // Element index digits are the basis coefficients; peel off the
            // lowest-order nonzero digit so the predecessor is already known.
            let k = (0..dim).rev().find(|&k| !(idx / p.pow((dim - 1 - k) as u32)).is_multiple_of(p)).expect("nonzero");
            let step = p.pow((dim - 1 - k) as u32);
            let prev = idx - step;
            let b_idx = step;
            let beta_val = beta.at(prev, b_idx);
            values[idx] = (values[prev] + basis_vals[k] + cfg.p() - beta_val) % cfg.p();
        }
        out.push(OutcomeFunction::new(context.clone(), values)?);
    }
    Ok(out)
}

/// A function Σ(𝓘) → Z/p restricting to an outcome function on every context.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalSection {
    support: Vec<SymplecticVector>,
    values: Vec<u32>,
}

impl GlobalSection {
    pub(crate) fn from_values(support: Vec<SymplecticVector>, values: Vec<u32>) -> Self {
        Self { support, values }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, v: &SymplecticVector) -> Option<u32> {
        self.support.binary_search(v).ok().map(|i| self.values[i])
    }

    pub fn restrict(&self, context: &Subspace) -> Result<OutcomeFunction> {
        let values = context
            .elements()
            .iter()
            .map(|v| self.value(v).ok_or_else(|| Error::Domain(format!("{v} is outside the support"))))
            .collect::<Result<Vec<u32>>>()?;
        OutcomeFunction::new(context.clone(), values)
    }
}

/// The solution set of ds = β over Σ(𝓘), kept in affine form.
#[derive(Debug, Clone)]
pub struct SectionSet {
    support: Vec<SymplecticVector>,
    solutions: AffineSolutionSet,
}

impl SectionSet {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn count(&self) -> Option<u128> {
        self.solutions.count()
    }

    pub fn affine(&self) -> &AffineSolutionSet {
        &self.solutions
    }

    pub fn support(&self) -> &[SymplecticVector] {
        &self.support
    }

    /// Every section; errors with a capacity error above [`SECTION_LIMIT`].
    pub fn list(&self) -> Result<Vec<GlobalSection>> {
        self.list_up_to(SECTION_LIMIT)
    }

    pub fn list_up_to(&self, limit: usize) -> Result<Vec<GlobalSection>> {
        Ok(self
            .solutions
            .enumerate(limit)?
            .into_iter()
            .map(|values| GlobalSection { support: self.support.clone(), values })
            .collect())
    }

    pub fn first(&self) -> Option<GlobalSection> {
        self.solutions
            .particular
            .clone()
            .map(|values| GlobalSection { support: self.support.clone(), values })
    }
}

/// E_β(𝓘): solves s(v) + s(w) − s(v+w) = β|(v, w) for pairs in a common
/// context, over unknowns s(v), v ∈ Σ.
pub fn global_sections(cover: &ContextCover) -> Result<SectionSet> {
    let support = cover.support().to_vec();
    if support.len() > SECTION_SUPPORT_LIMIT {
        return Err(Error::Capacity(format!(
            "|Σ| = {} exceeds the section-solver limit {SECTION_SUPPORT_LIMIT}",
            support.len()
        )));
    }
    let p = cover.cfg().p();
    let index = |v: &SymplecticVector| support.binary_search(v).expect("in support");
    let mut system = LinearSystem::new(support.len(), p);
    for ctx in cover.maximal_contexts() {
        let beta = restricted_beta(ctx)?;
        let elems = beta.elements();
        let ids: Vec<usize> = elems.iter().map(index).collect();
        // Pairs (u, b) with b in the basis suffice: the differences of two
        // solutions are then additive, and β is a cocycle.
        let basis: Vec<usize> =
            ctx.basis().iter().map(|b| ctx.element_index(b).expect("basis lies in the context")).collect();
        for (i, v) in elems.iter().enumerate() {
            for &j in &basis {
                let k = index(&(v + &elems[j]));
                system.add_sparse(&[(ids[i], 1), (ids[j], 1), (k, p - 1)], beta.at(i, j));
            }
        }
        if system.is_inconsistent() {
            break;
        }
    }
    Ok(SectionSet { support, solutions: system.solve() })
}

/// Per-context probability tables over E_β(I), aligned with [`events`].
#[derive(Debug, Clone)]
pub struct EmpiricalModel {
    cover: ContextCover,
    events: Vec<Vec<OutcomeFunction>>,
    tables: Vec<Vec<f64>>,
}

impl EmpiricalModel {
    /// A model from explicit tables, one per cover context in cover order.
    pub fn from_tables(cover: ContextCover, tables: Vec<Vec<f64>>) -> Result<Self> {
        if tables.len() != cover.contexts().len() {
            return Err(Error::Input(format!(
                "{} tables for {} contexts",
                tables.len(),
                cover.contexts().len()
            )));
        }
        let events = cover.contexts().iter().map(events).collect::<Result<Vec<_>>>()?;
        for (k, (t, e)) in tables.iter().zip(&events).enumerate() {
            if t.len() != e.len() {
                return Err(Error::Input(format!(
                    "table {k} has {} entries, context has {} outcome functions",
                    t.len(),
                    e.len()
                )));
            }
        }
        Ok(Self { cover, events, tables })
    }

    pub fn cover(&self) -> &ContextCover {
        &self.cover
    }

    pub fn events(&self, context: usize) -> &[OutcomeFunction] {
        &self.events[context]
    }

    pub fn table(&self, context: usize) -> &[f64] {
        &self.tables[context]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.tables
    }

    pub fn probability(&self, context: &Subspace, s: &OutcomeFunction) -> Option<f64> {
        let i = self.cover.position(context)?;
        Some(self.tables[i][s.event_index()])
    }

    /// Pushforward of context `i`'s table onto E_β(sub).
    pub fn marginal(&self, i: usize, sub: &Subspace) -> Result<Vec<f64>> {
        let size = (sub.cfg().p() as usize).pow(sub.dim() as u32);
        let mut out = vec![0.0; size];
        for (s, &prob) in self.events[i].iter().zip(&self.tables[i]) {
            out[s.restrict(sub)?.event_index()] += prob;
        }
        Ok(out)
    }
}

/// (e_ρ)_I(s) = Tr(ρ P_s) for every context and outcome function.
pub fn empirical_model(rho: &DensityMatrix, cover: &ContextCover) -> Result<EmpiricalModel> {
    if rho.cfg() != cover.cfg() {
        return Err(Error::Input(format!(
            "state is for {} but cover is for {}",
            rho.cfg(),
            cover.cfg()
        )));
    }
    let mut events_all = Vec::with_capacity(cover.contexts().len());
    let mut tables = Vec::with_capacity(cover.contexts().len());
    for ctx in cover.contexts() {
        let evs = events(ctx)?;
        let table = evs.iter().map(|s| born(rho, ctx, s)).collect::<Result<Vec<f64>>>()?;
        let total: f64 = table.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::Numerical(format!("context table sums to {total}")));
        }
        events_all.push(evs);
        tables.push(table);
    }
    Ok(EmpiricalModel { cover: cover.clone(), events: events_all, tables })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompatibilityReport {
    /// (context index, table sum) for tables not summing to one.
    pub normalization: Vec<(usize, f64)>,
    /// (i, j, largest deviation) for pairs whose marginals on I ∩ J differ.
    pub mismatches: Vec<(usize, usize, f64)>,
    /// (context index, value) for negative entries.
    pub negative: Vec<(usize, f64)>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.normalization.is_empty() && self.mismatches.is_empty() && self.negative.is_empty()
    }
}

pub fn compatibility_check(model: &EmpiricalModel, tol: f64) -> Result<CompatibilityReport> {
    let mut report = CompatibilityReport::default();
    let contexts = model.cover.contexts();
    for (i, t) in model.tables.iter().enumerate() {
        let total: f64 = t.iter().sum();
        if (total - 1.0).abs() > tol {
            report.normalization.push((i, total));
        }
        if let Some(&neg) = t.iter().find(|&&x| x < -tol) {
            report.negative.push((i, neg));
        }
    }
    for i in 0..contexts.len() {
        for j in i + 1..contexts.len() {
            let meet = intersect(&contexts[i], &contexts[j])?;
            let a = model.marginal(i, &meet)?;
            let b = model.marginal(j, &meet)?;
            let dev = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if dev > tol {
                report.mismatches.push((i, j, dev));
            }
        }
    }
    Ok(report)
}

/// Rows of the marginal-agreement system over all (context, outcome)
/// variables: for each pair K ⊊ I of cover contexts and each t ∈ E_β(K),
/// Σ_{s|_K = t} x_{I,s} − x_{K,t} = 0. Returns the rows and the column
/// offset of each context.
pub(crate) fn marginal_constraints(cover: &ContextCover) -> Result<(Vec<Vec<Rational>>, Vec<usize>)> {
    let contexts = cover.contexts();
    let mut offsets = Vec::with_capacity(contexts.len());
    let mut width = 0usize;
    for ctx in contexts {
        offsets.push(width);
        width += ctx.len();
    }
    let all_events = contexts.iter().map(events).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, big) in contexts.iter().enumerate() {
        for (k, small) in contexts.iter().enumerate() {
            if small.dim() >= big.dim() || !small.is_subspace_of(big) {
                continue;
            }
            let mut block: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
            for (t_idx, _) in all_events[k].iter().enumerate() {
                let mut row = vec![rational::int(0); width];
                row[offsets[k] + t_idx] = rational::int(-1);
                block.insert(t_idx, row);
            }
            for (s_idx, s) in all_events[i].iter().enumerate() {
                let t = s.restrict(small)?.event_index();
                block.get_mut(&t).expect("restriction lands in E(K)")[offsets[i] + s_idx] =
                    rational::int(1);
            }
            rows.extend(block.into_values());
        }
    }
    Ok((rows, offsets))
}

/// Real dimension of the space of marginal-compatible families
/// {x_I ∈ ℝ^{E_β(I)}} (no positivity, no normalization).
pub fn nosignaling_dimension(cover: &ContextCover) -> Result<usize> {
    let (rows, offsets) = marginal_constraints(cover)?;
    let width = offsets.last().map_or(0, |&o| o + cover.contexts().last().map_or(0, Subspace::len));
    Ok(width - rational::rank(rows))
}

/// (b_t|_I, χ_s) = |I|^{-1} Σ_{u∈I} ω^{𝔟(u,t) − s(u)}.
pub fn character_pairing(t: &SymplecticVector, s: &OutcomeFunction) -> f64 {
    let ctx = s.context();
    let p = ctx.cfg().p();
    let sum: C64 = ctx
        .elements()
        .iter()
        .zip(s.values())
        .map(|(u, &su)| {
            let e = (symplectic_form(u, t) + p - su) % p;
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / p as f64)
        })
        .sum();
    sum.re / ctx.len() as f64
}

/// The coefficient family {c_t} with Σ_t (b_t|_I, χ_s) c_t = model_I(s) for
/// every (I, s) of the full cover.
pub fn wigner_of_model(model: &EmpiricalModel) -> Result<WignerFunction> {
    let cover = model.cover();
    let cfg = cover.cfg();
    if !cover.is_full()? {
        return Err(Error::Domain("the Wigner preimage needs the full cover of isotropic subspaces".into()));
    }
    let report = compatibility_check(model, PROB_TOL)?;
    if !report.mismatches.is_empty() || !report.normalization.is_empty() {
        return Err(Error::NoSolution("model is not marginal-compatible".into()));
    }
    let vectors: Vec<SymplecticVector> = cfg.all_vectors().collect();
    let rows: usize = cover.contexts().iter().map(Subspace::len).sum();
    let mut a = DMatrix::<f64>::zeros(rows, vectors.len());
    let mut b = DVector::<f64>::zeros(rows);
    let mut r = 0;
    for i in 0..cover.contexts().len() {
        for (s, &prob) in model.events(i).iter().zip(model.table(i)) {
            for (col, t) in vectors.iter().enumerate() {
                a[(r, col)] = character_pairing(t, s);
            }
            b[r] = prob;
            r += 1;
        }
    }
    let normal = a.transpose() * &a;
    let rhs = a.transpose() * &b;
    let solution = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NoSolution("character system is singular".into()))?;
    let residual = (&a * &solution - &b).amax();
    if residual > 1e-9 {
        return Err(Error::NoSolution(format!("no exact preimage (residual {residual:e})")));
    }
    WignerFunction::from_table(cfg, solution.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers;
    use crate::quantum::{named_state, joint_projector, projector, wigner, NamedState};

    fn cfg(p: u32, n: usize) -> PrimeConfig {
        PrimeConfig::new(p, n).unwrap()
    }

    #[test]
    fn mermin_square_cover_shape() {
        let cover = covers::mermin_square().unwrap();
        let maximal = cover.maximal_contexts();
        assert_eq!(maximal.len(), 6);
        assert!(maximal.iter().all(|c| c.dim() == 2));
        assert_eq!(cover.support().len(), 10);
    }

    #[test]
    fn single_context_cover() {
        let c = cfg(2, 1);
        let cover = make_cover(&[vec![c.z(1)]], c).unwrap();
        assert_eq!(cover.contexts(), &[span(&[c.z(1)], c).unwrap()]);
    }

    #[test]
    fn anticommuting_generators_are_rejected() {
        let c = cfg(2, 1);
        let err = make_cover(&[vec![c.x(1), c.z(1)]], c).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("= 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn event_examples() {
        let c = cfg(2, 1);
        let zero = events(&Subspace::zero(c)).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].values(), &[0]);

        let c3 = cfg(3, 1);
        let line = span(&[c3.z(1)], c3).unwrap();
        let evs = events(&line).unwrap();
        assert_eq!(evs.len(), 3);
        for s in &evs {
            // linear: s(2 z1) = 2 s(z1)
            let a = s.value(&c3.z(1)).unwrap();
            assert_eq!(s.value(&c3.z(1).scale(2)).unwrap(), 2 * a % 3);
        }

        let c2 = cfg(2, 2);
        let ys = span(&[c2.y(1), c2.y(2)], c2).unwrap();
        let evs = events(&ys).unwrap();
        assert_eq!(evs.len(), 4);
        let y12 = &c2.y(1) + &c2.y(2);
        for s in &evs {
            let total = s.value(&c2.y(1)).unwrap() + s.value(&c2.y(2)).unwrap() + s.value(&y12).unwrap();
            assert_eq!(total % 2, 1);
        }
        // Oracle: brute force over all 2^4 functions on the context.
        let elems = ys.elements();
        let brute = (0..16u32)
            .filter(|mask| {
                let vals: Vec<u32> = (0..4).map(|i| (mask >> i) & 1).collect();
                OutcomeFunction::new(ys.clone(), vals).is_ok()
            })
            .count();
        assert_eq!(brute, 4);
        assert_eq!(elems.len(), 4);
    }

    #[test]
    fn event_indices_are_positions() {
        for (p, n) in [(2, 2), (3, 1), (5, 1)] {
            for ctx in enumerate_isotropic(cfg(p, n), None).unwrap() {
                for (i, s) in events(&ctx).unwrap().iter().enumerate() {
                    assert_eq!(s.event_index(), i);
                }
            }
        }
    }

    #[test]
    fn event_count_is_p_to_the_dim() {
        for (p, n) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (7, 1)] {
            for ctx in enumerate_isotropic(cfg(p, n), None).unwrap() {
                assert_eq!(events(&ctx).unwrap().len(), ctx.len());
            }
        }
    }

    #[test]
    fn global_section_examples() {
        assert!(global_sections(&covers::mermin_square().unwrap()).unwrap().is_empty());
        assert!(global_sections(&covers::mermin_star().unwrap()).unwrap().is_empty());

        let c = cfg(3, 1);
        let full = ContextCover::full(c).unwrap();
        let sections = global_sections(&full).unwrap();
        assert_eq!(sections.count(), Some(81));
        // Oracle: all 3^8 functions on the nonzero vectors that are linear
        // on each of the four lines.
        let nonzero: Vec<_> = c.all_vectors().filter(|v| !v.is_zero()).collect();
        let lines = enumerate_isotropic(c, Some(1)).unwrap();
        let mut brute = 0;
        for code in 0..3usize.pow(8) {
            let val = |v: &SymplecticVector| -> u32 {
                if v.is_zero() {
                    return 0;
                }
                let i = nonzero.iter().position(|w| w == v).unwrap();
                ((code / 3usize.pow(i as u32)) % 3) as u32
            };
            let ok = lines.iter().all(|l| {
                let b = &l.basis()[0];
                val(&b.scale(2)) == 2 * val(b) % 3
            });
            if ok {
                brute += 1;
            }
        }
        assert_eq!(brute, 81);
        for g in sections.list().unwrap() {
            for ctx in full.contexts() {
                g.restrict(ctx).unwrap();
            }
        }
    }

    #[test]
    fn empirical_model_examples() {
        let c = cfg(2, 2);
        let cover = ContextCover::full(c).unwrap();
        let mm = DensityMatrix::maximally_mixed(c).unwrap();
        let model = empirical_model(&mm, &cover).unwrap();
        for (i, ctx) in cover.contexts().iter().enumerate() {
            for &x in model.table(i) {
                assert!((x - 1.0 / ctx.len() as f64).abs() < 1e-12);
            }
        }

        let c3 = cfg(2, 3);
        let star = covers::mermin_star().unwrap();
        let ghz = named_state(&NamedState::Ghz, c3).unwrap();
        let model = empirical_model(&ghz, &star).unwrap();
        let i5 = star.position(&covers::mermin_star_contexts().unwrap()[4]).unwrap();
        let t = model.table(i5);
        assert_eq!(t.iter().filter(|&&x| (x - 1.0).abs() < 1e-12).count(), 1);
        assert_eq!(t.iter().filter(|&&x| x.abs() < 1e-12).count(), 7);

        let c1 = cfg(2, 1);
        let single = make_cover(&[vec![c1.z(1)]], c1).unwrap();
        let zero_state = named_state(&NamedState::Basis(0), c1).unwrap();
        let model = empirical_model(&zero_state, &single).unwrap();
        let zline = single.position(&span(&[c1.z(1)], c1).unwrap()).unwrap();
        let s0 = model.events(zline).iter().position(|s| s.value(&c1.z(1)) == Some(0)).unwrap();
        assert!((model.table(zline)[s0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn support_law_outside_the_event_presheaf() {
        // The joint spectral projector of s' vanishes unless s' ∈ E_β(I), and
        // agrees with the character average on E_β(I).
        for (p, n, seed) in [(2, 2, 11), (3, 1, 4)] {
            let c = cfg(p, n);
            let rho = named_state(&NamedState::Random { seed, mix: 0.1 }, c).unwrap();
            for ctx in enumerate_isotropic(c, Some(n)).unwrap() {
                let size = ctx.len();
                for code in 0..(p as usize).pow(size as u32) {
                    let vals: Vec<u32> = (0..size).map(|i| ((code / (p as usize).pow(i as u32)) % p as usize) as u32).collect();
                    let joint = joint_projector(&ctx, &vals).unwrap();
                    let tr = (rho.matrix() * &joint).trace();
                    match OutcomeFunction::new(ctx.clone(), vals) {
                        Ok(s) => {
                            let avg = projector(&ctx, &s).unwrap();
                            assert!((&joint - avg).camax() < 1e-10);
                        }
                        Err(_) => assert!(tr.norm() < 1e-10, "{tr}"),
                    }
                }
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        let c = cfg(2, 2);
        let cover = ContextCover::full(c).unwrap();
        let rho = named_state(&NamedState::Random { seed: 5, mix: 0.0 }, c).unwrap();
        let model = empirical_model(&rho, &cover).unwrap();
        assert!(compatibility_check(&model, 1e-9).unwrap().passed());

        // Break the marginal of one line against its planes.
        let mut tables = model.tables().to_vec();
        let line = cover.contexts().iter().position(|ctx| ctx.dim() == 1).unwrap();
        tables[line] = vec![1.0, 0.0];
        let other = tables[line + 1].clone();
        tables[line + 1] = other;
        let broken = EmpiricalModel::from_tables(cover.clone(), tables).unwrap();
        let report = compatibility_check(&broken, 1e-9).unwrap();
        assert!(!report.passed());
        assert!(report.mismatches.iter().all(|&(i, j, _)| i == line || j == line));

        let single = make_cover(&[vec![c.z(1)]], c).unwrap();
        let model = empirical_model(&rho, &single).unwrap();
        assert!(compatibility_check(&model, 1e-9).unwrap().passed());
    }

    #[test]
    fn nosignaling_dimension_of_full_covers() {
        assert_eq!(nosignaling_dimension(&ContextCover::full(cfg(2, 1)).unwrap()).unwrap(), 4);
        assert_eq!(nosignaling_dimension(&ContextCover::full(cfg(3, 1)).unwrap()).unwrap(), 9);
    }

    #[test]
    fn wigner_preimage_examples() {
        let c = cfg(3, 1);
        let cover = ContextCover::full(c).unwrap();
        let mm = DensityMatrix::maximally_mixed(c).unwrap();
        let w = wigner_of_model(&empirical_model(&mm, &cover).unwrap()).unwrap();
        assert!(w.table().iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-10));

        let b0 = named_state(&NamedState::Basis(0), c).unwrap();
        let w = wigner_of_model(&empirical_model(&b0, &cover).unwrap()).unwrap();
        let direct = wigner(&b0).unwrap();
        for v in c.all_vectors() {
            assert!((w.value(&v) - direct.value(&v)).abs() < 1e-10);
        }

        let partial = make_cover(&[vec![c.z(1)]], c).unwrap();
        let model = empirical_model(&mm, &partial).unwrap();
        assert!(matches!(wigner_of_model(&model), Err(Error::Domain(_))));
    }

    #[test]
    fn wigner_preimage_matches_wigner_for_random_states() {
        for (p, n) in [(2, 1), (3, 1), (2, 2)] {
            let c = cfg(p, n);
            let cover = ContextCover::full(c).unwrap();
            for seed in 0..20 {
                let rho = named_state(&NamedState::Random { seed, mix: 0.0 }, c).unwrap();
                let via_model = wigner_of_model(&empirical_model(&rho, &cover).unwrap()).unwrap();
                let direct = wigner(&rho).unwrap();
                for (a, b) in via_model.table().iter().zip(direct.table()) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
