//! Exact contextuality verdicts and Mermin-type inequalities.
//!
//! Noncontextuality is membership of the model in the image of the
//! global-section distributions, decided by an exact phase-1 simplex.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gfp::{PrimeConfig, Subspace, SymplecticVector};
use crate::pauli::{eta_monomial, symplectic_form};
use crate::presheaf::{events, global_sections, marginal_constraints, ContextCover, EmpiricalModel, GlobalSection, OutcomeFunction};
use crate::quantum::{born, wigner, DensityMatrix, C64};
use crate::rational::{self, Rational};

/// Equality-form feasibility problem A x = b, x ≥ 0 over ℚ.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLp {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<Rational>),
    /// y with yᵀA ≥ 0 and yᵀb < 0.
    Infeasible(Vec<Rational>),
}

impl RationalLp {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Input(format!("{} rows but {} right-hand sides", a.len(), b.len())));
        }
        let width = a.first().map_or(0, Vec::len);
        if a.iter().any(|row| row.len() != width) {
            return Err(Error::Input("constraint rows have different lengths".into()));
        }
        Ok(Self { a, b })
    }

    pub fn width(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn is_witness(&self, x: &[Rational]) -> bool {
        x.len() == self.width()
            && x.iter().all(|v| !v.is_negative())
            && self.a.iter().zip(&self.b).all(|(row, b)| &rational::dot(row, x) == b)
    }

    pub fn is_certificate(&self, y: &[Rational]) -> bool {
        if y.len() != self.a.len() {
            return false;
        }
        let yb = rational::dot(y, &self.b);
        yb.is_negative()
            && (0..self.width()).all(|j| {
                let col: Rational = y
                    .iter()
                    .zip(&self.a)
                    .filter(|(yi, _)| !yi.is_zero())
                    .map(|(yi, row)| yi * &row[j])
                    .sum();
                !col.is_negative()
            })
    }
}

/// Phase-1 simplex with Bland's rule. Artificial columns stay in the tableau
/// so the final duals can be read off them.
pub fn lp_feasible(lp: &RationalLp) -> Result<LpOutcome> {
    let m = lp.a.len();
    let n = lp.width();
    let rhs = n + m;
    let signs: Vec<bool> = lp.b.iter().map(|b| b.is_negative()).collect();
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(n + m + 1);
            let flip = |q: &Rational| if signs[i] { -q.clone() } else { q.clone() };
            row.extend(lp.a[i].iter().map(flip));
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(flip(&lp.b[i]));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let cost = |j: usize| j >= n;

    loop {
        let entering = (0..n + m).find(|&j| {
            let mut r = if cost(j) { Rational::one() } else { Rational::zero() };
            for (i, row) in t.iter().enumerate() {
                if cost(basis[i]) && !row[j].is_zero() {
                    r -= &row[j];
                }
            }
            r.is_negative()
        });
        let Some(j) = entering else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if !row[j].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[j];
            let better = match &leave {
                None => true,
                Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let (r, _) = leave.ok_or_else(|| Error::Numerical("phase-1 objective unbounded".into()))?;
        let inv = t[r][j].recip();
        for e in t[r].iter_mut() {
            if !e.is_zero() {
                *e *= &inv;
            }
        }
        let pivot = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (e, pv) in row.iter_mut().zip(&pivot) {
                if !pv.is_zero() {
                    *e -= &f * pv;
                }
            }
        }
        basis[r] = j;
    }

    let objective: Rational = t
        .iter()
        .zip(&basis)
        .filter(|(_, &bv)| cost(bv))
        .map(|(row, _)| row[rhs].clone())
        .sum();
    if objective.is_zero() {
        let mut x = vec![Rational::zero(); n];
        for (row, &bv) in t.iter().zip(&basis) {
            if bv < n {
                x[bv] = row[rhs].clone();
            }
        }
        if !lp.is_witness(&x) {
            return Err(Error::Numerical("simplex witness failed verification".into()));
        }
        return Ok(LpOutcome::Feasible(x));
    }
    let y: Vec<Rational> = (0..m)
        .map(|k| {
            let dual: Rational = t
                .iter()
                .zip(&basis)
                .filter(|(_, &bv)| cost(bv))
                .map(|(row, _)| row[n + k].clone())
                .sum();
            if signs[k] {
                dual
            } else {
                -dual
            }
        })
        .collect();
    if !lp.is_certificate(&y) {
        return Err(Error::Numerical("Farkas certificate failed verification".into()));
    }
    Ok(LpOutcome::Infeasible(y))
}

/// How float probabilities become exact rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rationalization {
    /// Nearest fraction with denominator p^{2n+4}; fails if an entry moves by
    /// more than 1e-9.
    Snap,
    /// The exact binary value of each float.
    Dyadic,
    /// [`Rationalization::Snap`], falling back to [`Rationalization::Dyadic`].
    Auto,
}

impl Rationalization {
    pub fn name(self) -> &'static str {
        match self {
            Self::Snap => "snap",
            Self::Dyadic => "dyadic",
            Self::Auto => "auto",
        }
    }
}

/// Largest distance a snapped entry may move.
pub const SNAP_TOL: f64 = 1e-9;

/// An empirical model with exact entries satisfying the marginal and
/// normalization equations exactly.
#[derive(Debug, Clone)]
pub struct ExactModel {
    pub tables: Vec<Vec<Rational>>,
    pub policy: Rationalization,
    /// Largest |exact − float| over all entries.
    pub max_shift: f64,
}

pub fn snap_denominator(cfg: PrimeConfig) -> u64 {
    (cfg.p() as u64).pow(2 * cfg.n() as u32 + 4)
}

/// Rationalizes each entry, then projects orthogonally onto the affine space
/// of marginal-compatible, normalized families.
pub fn rationalize(model: &EmpiricalModel, policy: Rationalization) -> Result<ExactModel> {
    if policy == Rationalization::Auto {
        return match rationalize(model, Rationalization::Snap) {
            Err(Error::Numerical(_)) => rationalize(model, Rationalization::Dyadic),
            other => other,
        };
    }
    let cover = model.cover();
    let denominator = snap_denominator(cover.cfg());
    let mut flat = Vec::new();
    let mut floats = Vec::new();
    for table in model.tables() {
        for &x in table {
            let q = match policy {
                Rationalization::Snap => {
                    let q = rational::snap(x, denominator)?;
                    if (rational::to_f64(&q) - x).abs() > SNAP_TOL {
                        return Err(Error::Numerical(format!(
                            "probability {x} is not within {SNAP_TOL:e} of a multiple of 1/{denominator}"
                        )));
                    }
                    q
                }
                _ => rational::from_f64_exact(x)?,
            };
            flat.push(q);
            floats.push(x);
        }
    }
    let (mut rows, offsets) = marginal_constraints(cover)?;
    let mut rhs = vec![Rational::zero(); rows.len()];
    for (i, ctx) in cover.contexts().iter().enumerate() {
        let mut row = vec![Rational::zero(); flat.len()];
        for slot in &mut row[offsets[i]..offsets[i] + ctx.len()] {
            *slot = Rational::one();
        }
        rows.push(row);
        rhs.push(Rational::one());
    }
    let consistent = rows.iter().zip(&rhs).all(|(r, b)| &rational::dot(r, &flat) == b);
    let exact = if consistent { flat } else { rational::project_affine(&rows, &rhs, &flat)? };
    let max_shift = exact
        .iter()
        .zip(&floats)
        .map(|(q, x)| (rational::to_f64(q) - x).abs())
        .fold(0.0, f64::max);
    let tables = cover
        .contexts()
        .iter()
        .zip(&offsets)
        .map(|(ctx, &o)| exact[o..o + ctx.len()].to_vec())
        .collect();
    Ok(ExactModel { tables, policy, max_shift })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// A distribution on global sections whose pushforward is the model.
    Noncontextual { witness: Vec<(GlobalSection, Rational)> },
    /// Farkas certificate over the rows (context, outcome function) in cover
    /// and event order.
    Contextual { certificate: Vec<Rational> },
    /// No global sections exist.
    StronglyContextual,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Noncontextual { .. } => "noncontextual",
            Verdict::Contextual { .. } => "contextual",
            Verdict::StronglyContextual => "strongly_contextual",
        }
    }

    pub fn is_contextual(&self) -> bool {
        !matches!(self, Verdict::Noncontextual { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub verdict: Verdict,
    pub sections: u128,
    /// None when the cover is strongly contextual and no rationalization ran.
    pub exact: Option<ExactModel>,
}

/// The deterministic assignments a noncontextual model may mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HiddenVariables {
    /// Every global section of the cover.
    CoverSections,
    /// For odd p, the |V| sections u ↦ 𝔟(u, t), t ∈ V, which extend to all
    /// of V. They coincide with the cover sections of the full cover when
    /// n ≥ 2, but are far fewer when n = 1.
    PhasePoints,
}

impl HiddenVariables {
    pub fn name(self) -> &'static str {
        match self {
            Self::CoverSections => "cover-sections",
            Self::PhasePoints => "phase-points",
        }
    }
}

/// The phase-point sections t ↦ (u ↦ 𝔟(u, t)) restricted to Σ(𝓘).
pub fn phase_point_sections(cover: &ContextCover) -> Result<Vec<GlobalSection>> {
    let cfg = cover.cfg();
    if cfg.p() == 2 {
        return Err(Error::Domain("phase-point hidden variables need an odd prime".into()));
    }
    let support = cover.support().to_vec();
    Ok(cfg
        .all_vectors()
        .map(|t| {
            let values = support.iter().map(|u| symplectic_form(u, &t)).collect();
            GlobalSection::from_values(support.clone(), values)
        })
        .collect())
}

/// Decides whether the model is a convex mixture of global sections.
pub fn is_noncontextual(model: &EmpiricalModel, policy: Rationalization) -> Result<Decision> {
    is_noncontextual_with(model, policy, HiddenVariables::CoverSections)
}

pub fn is_noncontextual_with(model: &EmpiricalModel, policy: Rationalization, hidden: HiddenVariables) -> Result<Decision> {
    let cover = model.cover();
    let (count, list) = match hidden {
        HiddenVariables::CoverSections => {
            let sections = global_sections(cover)?;
            if sections.is_empty() {
                return Ok(Decision { verdict: Verdict::StronglyContextual, sections: 0, exact: None });
            }
            (sections.count().unwrap_or(u128::MAX), sections.list()?)
        }
        HiddenVariables::PhasePoints => {
            let list = phase_point_sections(cover)?;
            (list.len() as u128, list)
        }
    };
    let exact = rationalize(model, policy)?;

    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, ctx) in cover.contexts().iter().enumerate() {
        let restricted: Vec<usize> = list
            .iter()
            .map(|g| g.restrict(ctx).map(|s| s.event_index()))
            .collect::<Result<_>>()?;
        for (s_idx, target) in exact.tables[i].iter().enumerate() {
            a.push(
                restricted
                    .iter()
                    .map(|&r| if r == s_idx { Rational::one() } else { Rational::zero() })
                    .collect(),
            );
            b.push(target.clone());
        }
    }
    let lp = RationalLp::new(a, b)?;
    let verdict = match lp_feasible(&lp)? {
        LpOutcome::Feasible(x) => Verdict::Noncontextual {
            witness: list
                .into_iter()
                .zip(x)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        },
        LpOutcome::Infeasible(y) => Verdict::Contextual { certificate: y },
    };
    Ok(Decision { verdict, sections: count, exact: Some(exact) })
}

/// θ(d): the empirical model of a distribution on global sections.
pub fn pushforward(cover: &ContextCover, witness: &[(GlobalSection, Rational)]) -> Result<Vec<Vec<Rational>>> {
    let mut tables: Vec<Vec<Rational>> =
        cover.contexts().iter().map(|c| vec![Rational::zero(); c.len()]).collect();
    for (g, w) in witness {
        for (i, ctx) in cover.contexts().iter().enumerate() {
            tables[i][g.restrict(ctx)?.event_index()] += w;
        }
    }
    Ok(tables)
}

/// 𝓘 together with J and every I ∩ J, closed under intersection.
pub fn extend_cover(cover: &ContextCover, j: &Subspace) -> Result<ContextCover> {
    let mut subspaces = cover.contexts().to_vec();
    subspaces.push(j.clone());
    ContextCover::from_subspaces(cover.cfg(), subspaces)
}

/// Below this magnitude a Wigner minimum is called marginal.
pub const MARGINAL_WIGNER: f64 = 1e-6;
/// A Wigner minimum below minus this is negative.
pub const NEGATIVE_WIGNER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerNegativity {
    pub min: f64,
    pub negative: bool,
    pub marginal: bool,
}

pub fn wigner_negativity(rho: &DensityMatrix) -> Result<WignerNegativity> {
    let min = wigner(rho)?.min();
    Ok(WignerNegativity { min, negative: min < -NEGATIVE_WIGNER, marginal: min.abs() <= MARGINAL_WIGNER })
}

/// The outcome function s₀ of J with Tr(ρ P_{s₀}) = 1, when ρ is a common
/// eigenstate of {η(a) : a ∈ J}.
pub fn eigenvalue_function(rho: &DensityMatrix, j: &Subspace, tol: f64) -> Result<OutcomeFunction> {
    let evs = events(j)?;
    let mut best: Option<(f64, OutcomeFunction)> = None;
    for s in evs {
        let prob = born(rho, j, &s)?;
        if best.as_ref().is_none_or(|(b, _)| prob > *b) {
            best = Some((prob, s));
        }
    }
    match best {
        Some((prob, s)) if prob >= 1.0 - tol => Ok(s),
        Some((prob, _)) => Err(Error::Domain(format!(
            "state is not a common eigenstate of the context (largest outcome probability {prob})"
        ))),
        None => Err(Error::Domain("context has no outcome functions".into())),
    }
}

/// ev_{s₀} = Tr(ρ P_{s₀}).
pub fn eigenvalue_functional(rho: &DensityMatrix, j: &Subspace, s0: &OutcomeFunction) -> Result<f64> {
    born(rho, j, s0)
}

/// A = (J ∩ Σ(𝓘)) ∖ 0, in the order of J's elements.
pub fn shared_observables(cover: &ContextCover, j: &Subspace) -> Vec<SymplecticVector> {
    j.elements()
        .into_iter()
        .filter(|a| !a.is_zero() && cover.support().binary_search(a).is_ok())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTerm {
    pub observable: SymplecticVector,
    /// s₀(a); the term enters with ω^{−s₀(a)}.
    pub s0: u32,
    pub expectation: C64,
}

/// |A|^{-1} Σ_{a∈A} ω^{−s₀(a)} Tr(ρ η(a)) and its terms.
pub fn correlator(rho: &DensityMatrix, cover: &ContextCover, j: &Subspace, s0: &OutcomeFunction) -> Result<(f64, Vec<CorrelatorTerm>)> {
    let cfg = rho.cfg();
    let p = cfg.p();
    let shared = shared_observables(cover, j);
    if shared.is_empty() {
        return Err(Error::Domain("the context shares no nonzero observable with the cover".into()));
    }
    let mut total = C64::new(0.0, 0.0);
    let mut terms = Vec::with_capacity(shared.len());
    for a in shared {
        let s = s0.value(&a).ok_or_else(|| Error::Domain(format!("{a} is not in the context")))?;
        let expectation = eta_monomial(cfg, &a)?.trace_with(rho.matrix());
        total += C64::from_polar(1.0, -2.0 * std::f64::consts::PI * s as f64 / p as f64) * expectation;
        terms.push(CorrelatorTerm { observable: a, s0: s, expectation });
    }
    Ok((total.re / terms.len() as f64, terms))
}

/// Largest correlator value attained by a deterministic global section g of
/// 𝓘, where η(a) takes the value (−1)^{g(a)}. Qubits only.
pub fn noncontextual_bound(cover: &ContextCover, j: &Subspace, s0: &OutcomeFunction) -> Result<Rational> {
    if cover.cfg().p() != 2 {
        return Err(Error::Domain("the deterministic correlator bound is defined for p = 2".into()));
    }
    let shared = shared_observables(cover, j);
    if shared.is_empty() {
        return Err(Error::Domain("the context shares no nonzero observable with the cover".into()));
    }
    let sections = global_sections(cover)?;
    if sections.is_empty() {
        return Err(Error::NoSolution("the cover has no global sections".into()));
    }
    let s0_vals: Vec<u32> = shared
        .iter()
        .map(|a| s0.value(a).ok_or_else(|| Error::Domain(format!("{a} is not in the context"))))
        .collect::<Result<_>>()?;
    let mut best: Option<i64> = None;
    for g in sections.list()? {
        let score: i64 = shared
            .iter()
            .zip(&s0_vals)
            .map(|(a, &s)| if (g.value(a).expect("in support") + s) % 2 == 0 { 1 } else { -1 })
            .sum();
        best = Some(best.map_or(score, |b| b.max(score)));
    }
    Ok(rational::frac(best.expect("nonempty"), shared.len() as i64))
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub s0: OutcomeFunction,
    pub ev: f64,
    pub correlator: f64,
    pub terms: Vec<CorrelatorTerm>,
    /// Absent for odd p.
    pub bound: Option<Rational>,
    pub violated: bool,
}

/// The Mermin-type inequality for cover 𝓘 and an extra context J. With no
/// `s0`, the eigenvalue function of ρ on J is used.
pub fn mermin_inequality(
    rho: &DensityMatrix,
    cover: &ContextCover,
    j: &Subspace,
    s0: Option<OutcomeFunction>,
    tol: f64,
) -> Result<InequalityReport> {
    let s0 = match s0 {
        Some(s) => {
            if s.context() != j {
                return Err(Error::Domain("s0 is defined on a different context".into()));
            }
            s
        }
        None => eigenvalue_function(rho, j, tol)?,
    };
    let ev = eigenvalue_functional(rho, j, &s0)?;
    let (value, terms) = correlator(rho, cover, j, &s0)?;
    let bound = if cover.cfg().p() == 2 { Some(noncontextual_bound(cover, j, &s0)?) } else { None };
    let violated = match &bound {
        Some(b) => value > rational::to_f64(b) + tol,
        None => false,
    };
    Ok(InequalityReport { s0, ev, correlator: value, terms, bound, violated })
}
