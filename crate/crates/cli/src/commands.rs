//! The four subcommands. Each returns a [`Report`]; nothing is printed here.

use std::time::Instant;

use contexta::decision::{
    is_noncontextual_with, mermin_inequality, wigner_negativity, HiddenVariables, Rationalization, Verdict,
};
use contexta::gfp::{span, Subspace, SymplecticVector};
use contexta::presheaf::{
    compatibility_check, empirical_model, events, global_sections, make_cover, nosignaling_dimension, OutcomeFunction,
};
use contexta::quantum::wigner;
use contexta::rational::{self, Rational};
use contexta::topology::{
    beta_is_coboundary, choose_group, coset_poset, d_formula, euler_characteristic, homology_dims, sphere_count,
    verify_presentation, GroupChoice,
};
use contexta::Error;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::input::{load_cover, load_state, parse_generators, LoadedCover};
use crate::report::{coords, number, Report};

/// Marginal-constraint systems wider than this are not ranked by
/// `analyze-cover`.
pub const NOSIGNALING_WIDTH_LIMIT: usize = 256;
/// Witness entries listed in a report.
pub const WITNESS_LISTING: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub tolerance: f64,
    pub seed: u64,
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { tolerance: 1e-9, seed: 0, timing: false }
    }
}

fn generators_json(gens: &[SymplecticVector]) -> Value {
    Value::Array(gens.iter().map(coords).collect())
}

fn capacity_or<T>(result: contexta::Result<T>, f: impl FnOnce(T) -> Value) -> CliResult<Value> {
    match result {
        Ok(v) => Ok(f(v)),
        Err(Error::Capacity(msg)) => Ok(json!({ "skipped": msg })),
        Err(e) => Err(e.into()),
    }
}

pub fn analyze_cover(cover_arg: &str, opts: &Options) -> CliResult<Report> {
    let start = Instant::now();
    let loaded = load_cover(cover_arg)?;
    let cover = &loaded.cover;
    let sections = global_sections(cover)?;
    let count = sections.count();
    let coboundary = capacity_or(beta_is_coboundary(cover), |(b, _)| json!(b))?;
    let homology = capacity_or(homology_dims(cover), |(h1, h2)| json!({ "h1": h1, "h2": h2 }))?;
    let width: usize = cover.contexts().iter().map(Subspace::len).sum();
    let nosignaling = if width <= NOSIGNALING_WIDTH_LIMIT {
        json!(nosignaling_dimension(cover)?)
    } else {
        json!({ "skipped": format!("{width} unknowns exceed the limit {NOSIGNALING_WIDTH_LIMIT}") })
    };
    let result = json!({
        "cover": loaded.label,
        "generator_lists": loaded.generators.iter().map(|g| generators_json(g)).collect::<Vec<_>>(),
        "contexts_after_closure": cover.contexts().len(),
        "maximal_contexts": cover.maximal_contexts().len(),
        "support_size": cover.support().len(),
        "sections": count.map_or_else(|| "overflow".to_string(), |c| c.to_string()),
        "strongly_contextual": sections.is_empty(),
        "beta_coboundary": coboundary,
        "homology": homology,
        "nosignaling_dimension": nosignaling,
    });
    let mut summary = vec![
        format!("cover {}: {} contexts after closure, |Σ| = {}", loaded.label, cover.contexts().len(), cover.support().len()),
        format!(
            "global sections: {}{}",
            result["sections"].as_str().unwrap_or_default(),
            if sections.is_empty() { " (strongly contextual)" } else { "" }
        ),
        match result["beta_coboundary"].as_bool() {
            Some(b) => format!("[β] coboundary: {b}"),
            None => format!("[β] coboundary: skipped ({})", result["beta_coboundary"]["skipped"].as_str().unwrap_or("")),
        },
    ];
    if let (Some(h1), Some(h2)) = (homology["h1"].as_u64(), homology["h2"].as_u64()) {
        summary.push(format!("dim H1 = {h1}, dim H2 = {h2}"));
    }
    Ok(Report::new("analyze-cover", vec![cover_arg.into()], loaded.cfg, result, summary, opts, start))
}

fn witness_json(witness: &[(contexta::presheaf::GlobalSection, Rational)], loaded: &LoadedCover) -> Value {
    let mut entries: Vec<&(contexta::presheaf::GlobalSection, Rational)> = witness.iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.values().cmp(b.0.values())));
    json!({
        "support": loaded.cover.support().iter().map(coords).collect::<Vec<_>>(),
        "sections_used": witness.len(),
        "total_weight": witness.iter().fold(Rational::zero(), |acc, (_, w)| acc + w).to_string(),
        "entries": entries
            .iter()
            .take(WITNESS_LISTING)
            .map(|(g, w)| json!({ "values": g.values(), "weight": w.to_string() }))
            .collect::<Vec<_>>(),
    })
}

fn certificate_json(y: &[Rational], tables: &[Vec<Rational>]) -> Value {
    let b: Vec<Rational> = tables.iter().flatten().cloned().collect();
    let value = rational::dot(y, &b);
    let l1 = y.iter().fold(Rational::zero(), |acc, v| acc + v.abs());
    json!({
        "length": y.len(),
        "nonzero": y.iter().filter(|v| !v.is_zero()).count(),
        "l1_norm": l1.to_string(),
        "value_on_model": value.to_string(),
    })
}

pub fn analyze_state(
    state_arg: &str,
    cover_arg: &str,
    policy: Rationalization,
    hidden: HiddenVariables,
    opts: &Options,
) -> CliResult<Report> {
    let start = Instant::now();
    let loaded = load_cover(cover_arg)?;
    let cover = &loaded.cover;
    let cfg = loaded.cfg;
    let rho = load_state(state_arg, cfg, opts.seed)?;
    let model = empirical_model(&rho, cover)?;
    let compat = compatibility_check(&model, opts.tolerance)?;
    if !compat.passed() {
        return Err(Error::Numerical(format!("empirical model fails the marginal check: {compat:?}")).into());
    }
    let tables: Vec<Value> = cover
        .contexts()
        .iter()
        .enumerate()
        .map(|(i, ctx)| {
            json!({
                "context": generators_json(ctx.basis()),
                "outcomes": model
                    .events(i)
                    .iter()
                    .zip(model.table(i))
                    .map(|(s, &prob)| json!({
                        "basis_values": ctx.basis().iter().map(|b| s.value(b).unwrap_or(0)).collect::<Vec<_>>(),
                        "probability": number(prob),
                    }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();

    let decision = is_noncontextual_with(&model, policy, hidden)?;
    let mut verdict = json!({
        "kind": decision.verdict.kind(),
        "hidden_variables": hidden.name(),
        "sections": decision.sections.to_string(),
    });
    if let Some(exact) = &decision.exact {
        verdict["rationalization"] = json!(exact.policy.name());
        verdict["max_shift"] = number(exact.max_shift);
    }
    match &decision.verdict {
        Verdict::Noncontextual { witness } => verdict["witness"] = witness_json(witness, &loaded),
        Verdict::Contextual { certificate } => {
            let exact = decision.exact.as_ref().expect("contextual verdicts carry the exact model");
            verdict["certificate"] = certificate_json(certificate, &exact.tables);
        }
        Verdict::StronglyContextual => {}
    }
    let mut summary = vec![
        format!("state {state_arg} on cover {} ({})", loaded.label, cfg),
        format!("verdict: {} over {} {}", decision.verdict.kind(), decision.sections, hidden.name()),
    ];

    let mut result = json!({
        "state": state_arg,
        "cover": loaded.label,
        "empirical_model": tables,
        "verdict": verdict,
    });
    if cover.is_full()? {
        let w = wigner(&rho)?;
        let neg = wigner_negativity(&rho)?;
        result["wigner"] = json!({
            "min": number(neg.min),
            "negative": neg.negative,
            "marginal": neg.marginal,
            "table": cfg
                .all_vectors()
                .map(|v| json!({ "point": coords(&v), "value": number(w.value(&v)) }))
                .collect::<Vec<_>>(),
        });
        summary.push(format!("Wigner min: {}", number(neg.min)));
        if cfg.p() > 2 {
            let phase = if hidden == HiddenVariables::PhasePoints {
                decision.verdict.is_contextual()
            } else {
                is_noncontextual_with(&model, policy, HiddenVariables::PhasePoints)?.verdict.is_contextual()
            };
            let agree = if neg.marginal { None } else { Some(neg.negative == phase) };
            result["wigner_cross_check"] = json!({
                "wigner_nonnegative": !neg.negative,
                "phase_point_noncontextual": !phase,
                "marginal": neg.marginal,
                "agree": agree,
            });
            summary.push(format!(
                "Wigner/phase-point cross-check: {}",
                match agree {
                    Some(true) => "agree",
                    Some(false) => "DISAGREE",
                    None => "marginal minimum, not compared",
                }
            ));
        }
    }
    Ok(Report::new("analyze-state", vec![state_arg.into(), cover_arg.into()], cfg, result, summary, opts, start))
}

pub fn topology(cover_arg: &str, group: GroupChoice, opts: &Options) -> CliResult<Report> {
    let start = Instant::now();
    let loaded = load_cover(cover_arg)?;
    let cover = &loaded.cover;
    let g = choose_group(cover, group)?;
    verify_presentation(g.as_ref(), cover)?;
    let poset = coset_poset(g.as_ref(), cover)?;
    let chi = euler_characteristic(&poset);
    let spheres = sphere_count(&poset, poset.cover_height)?;
    let mut result = json!({
        "cover": loaded.label,
        "group": g.name(),
        "group_order": g.order(),
        "poset_size": poset.len(),
        "fiber_dim": poset.cover_height,
        "euler_characteristic": chi,
        "spheres": spheres,
    });
    let mut summary = vec![
        format!("cover {} in group {} of order {}", loaded.label, g.name(), g.order()),
        format!("coset poset: {} elements, χ = {chi}, spheres = {spheres}", poset.len()),
    ];
    if cover.is_full()? {
        let (p, n) = (loaded.cfg.p(), loaded.cfg.n());
        let formula = match d_formula(p, n) {
            Ok(d) => {
                let agrees = d == (chi - 1).into();
                let mut block = json!({
                    "reading": "r = n",
                    "d_formula": d.to_string(),
                    "chi_minus_one": chi - 1,
                    "agrees": agrees,
                });
                if !agrees {
                    block["flag"] = json!("formula interpretation: d(p, n) with r = n differs from the coset-poset count, which is authoritative");
                }
                summary.push(format!("d({p}, {n}) = {d} vs χ − 1 = {}: {}", chi - 1, if agrees { "agree" } else { "MISMATCH" }));
                block
            }
            Err(e) => {
                summary.push(format!("d({p}, {n}) unavailable: {e}"));
                json!({ "reading": "r = n", "error": e.to_string(), "chi_minus_one": chi - 1, "agrees": false,
                        "flag": "formula interpretation: the closed form did not evaluate to an integer" })
            }
        };
        result["formula"] = formula;
    }
    let args = vec![cover_arg.into(), format!("--group={}", group_name(group))];
    Ok(Report::new("topology", args, loaded.cfg, result, summary, opts, start))
}

pub fn group_name(group: GroupChoice) -> &'static str {
    match group {
        GroupChoice::Auto => "auto",
        GroupChoice::FullExtension => "full-extension",
        GroupChoice::Abelian => "abelian",
    }
}

/// Splits the cover into 𝓘 and J. An index selects a generator list, which is
/// removed from 𝓘; a generator list spanning one of the cover's listed
/// contexts removes that context too.
fn split_context(loaded: &LoadedCover, context: &str) -> CliResult<(Vec<Vec<SymplecticVector>>, Subspace)> {
    let cfg = loaded.cfg;
    let mut rest = loaded.generators.clone();
    if let Ok(k) = context.trim().parse::<usize>() {
        if k == 0 || k > rest.len() {
            return Err(Error::Input(format!("context index {k} outside 1..={}", rest.len())).into());
        }
        let gens = rest.remove(k - 1);
        return Ok((rest, span(&gens, cfg)?));
    }
    let j = span(&parse_generators(context, cfg)?, cfg)?;
    let mut kept = Vec::with_capacity(rest.len());
    for gens in rest {
        if span(&gens, cfg)? != j {
            kept.push(gens);
        }
    }
    Ok((kept, j))
}

fn outcome_from_basis(j: &Subspace, text: &str) -> CliResult<OutcomeFunction> {
    let values: Vec<u32> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| CliError::parse("--s0", format!("cannot read {t:?}"))))
        .collect::<CliResult<_>>()?;
    if values.len() != j.dim() {
        return Err(Error::Input(format!("--s0 has {} values, J has dimension {}", values.len(), j.dim())).into());
    }
    events(j)?
        .into_iter()
        .find(|s| j.basis().iter().zip(&values).all(|(b, &v)| s.value(b) == Some(v)))
        .ok_or_else(|| Error::Domain(format!("no outcome function of J takes the basis values {values:?}")).into())
}

pub fn inequality(state_arg: &str, cover_arg: &str, context: &str, s0: &str, opts: &Options) -> CliResult<Report> {
    let start = Instant::now();
    let loaded = load_cover(cover_arg)?;
    let cfg = loaded.cfg;
    let (rest, j) = split_context(&loaded, context)?;
    if rest.is_empty() {
        return Err(Error::Input("no contexts remain once J is removed".into()).into());
    }
    let cover = make_cover(&rest, cfg)?;
    let rho = load_state(state_arg, cfg, opts.seed)?;
    let explicit = match s0 {
        "auto" => None,
        text => Some(outcome_from_basis(&j, text)?),
    };
    let report = mermin_inequality(&rho, &cover, &j, explicit, opts.tolerance)?;
    let p = cfg.p();
    let ev_exact = rational::snap(report.ev, contexta::decision::snap_denominator(cfg))
        .ok()
        .filter(|q| (rational::to_f64(q) - report.ev).abs() <= opts.tolerance);
    let terms: Vec<Value> = report
        .terms
        .iter()
        .map(|t| {
            let mut term = json!({
                "observable": coords(&t.observable),
                "s0": t.s0,
                "expectation": [number(t.expectation.re), number(t.expectation.im)],
            });
            if p == 2 {
                term["sign"] = json!(if t.s0 == 0 { "+1" } else { "-1" });
            }
            term
        })
        .collect();
    let bound = report.bound.as_ref().map(Rational::to_string);
    let result = json!({
        "cover": format!("{} without J", loaded.label),
        "context": generators_json(j.basis()),
        "s0": {
            "mode": if s0 == "auto" { "auto" } else { "explicit" },
            "basis_values": j.basis().iter().map(|b| report.s0.value(b).unwrap_or(0)).collect::<Vec<_>>(),
        },
        "ev": number(report.ev),
        "ev_exact": ev_exact.as_ref().map(Rational::to_string),
        "correlator": number(report.correlator),
        "terms": terms,
        "bound": bound,
        "violated": report.violated,
    });
    let summary = vec![
        format!("J = ⟨{}⟩ against {} without J", j.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "), loaded.label),
        format!(
            "ev = {}, correlator = {}, bound = {}, violated = {}",
            ev_exact.map_or_else(|| number(report.ev).to_string(), |q| q.to_string()),
            number(report.correlator),
            result["bound"].as_str().unwrap_or("n/a"),
            report.violated
        ),
    ];
    let args = vec![state_arg.into(), cover_arg.into(), format!("--context={context}"), format!("--s0={s0}")];
    Ok(Report::new("inequality", args, cfg, result, summary, opts, start))
}
