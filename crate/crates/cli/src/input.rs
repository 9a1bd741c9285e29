//! Cover and state files, plus the short names accepted on the command line.
//!
//! Vectors are integer arrays of length 2n in (z|x) order: the first n
//! entries are the Z exponents, the last n the X exponents.

use std::path::Path;

use contexta::covers::{named_cover, COVER_NAMES};
use contexta::gfp::{PrimeConfig, SymplecticVector};
use contexta::presheaf::{make_cover, ContextCover};
use contexta::quantum::{named_state, CMatrix, DensityMatrix, NamedState, C64};
use contexta::Error;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const COORDINATE_ORDER: &str = "z|x";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contexts: Option<Vec<Vec<Vec<u32>>>>,
    /// 1-based indices of generator lists to drop.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omit: Vec<usize>,
}

impl CoverFile {
    /// An explicit file for the given generator lists.
    pub fn explicit(cfg: PrimeConfig, generators: &[Vec<SymplecticVector>]) -> Self {
        CoverFile {
            name: None,
            p: Some(cfg.p()),
            n: Some(cfg.n()),
            order: Some(COORDINATE_ORDER.into()),
            contexts: Some(generators.iter().map(|g| g.iter().map(SymplecticVector::to_u32).collect()).collect()),
            omit: Vec::new(),
        }
    }
}

/// A parsed cover together with the generator lists it was built from.
#[derive(Debug, Clone)]
pub struct LoadedCover {
    pub label: String,
    pub cfg: PrimeConfig,
    pub generators: Vec<Vec<SymplecticVector>>,
    pub cover: ContextCover,
}

impl LoadedCover {
    pub fn is_named(&self, name: &str) -> bool {
        self.label == name
    }
}

fn config(p: u32, n: usize) -> CliResult<PrimeConfig> {
    Ok(PrimeConfig::new(p, n)?)
}

fn vector(cfg: PrimeConfig, coords: &[u32], what: &str) -> CliResult<SymplecticVector> {
    if coords.len() != 2 * cfg.n() {
        return Err(Error::Input(format!(
            "{what}: length {}, expected 2n = {} in (z|x) order",
            coords.len(),
            2 * cfg.n()
        ))
        .into());
    }
    if let Some(c) = coords.iter().find(|&&c| c >= cfg.p()) {
        return Err(Error::Input(format!("{what}: entry {c} is not reduced mod {}", cfg.p())).into());
    }
    Ok(cfg.vector(coords)?)
}

fn generator_lists(cfg: PrimeConfig, raw: &[Vec<Vec<u32>>]) -> CliResult<Vec<Vec<SymplecticVector>>> {
    raw.iter()
        .enumerate()
        .map(|(i, list)| {
            list.iter()
                .enumerate()
                .map(|(j, v)| vector(cfg, v, &format!("context {}, generator {}", i + 1, j + 1)))
                .collect()
        })
        .collect()
}

fn build(label: String, cfg: PrimeConfig, mut generators: Vec<Vec<SymplecticVector>>, omit: &[usize]) -> CliResult<LoadedCover> {
    let mut omit = omit.to_vec();
    omit.sort_unstable();
    omit.dedup();
    for &k in omit.iter().rev() {
        if k == 0 || k > generators.len() {
            return Err(Error::Input(format!("omit index {k} outside 1..={}", generators.len())).into());
        }
        generators.remove(k - 1);
    }
    if generators.is_empty() {
        return Err(Error::Input("cover has no contexts".into()).into());
    }
    let label = if omit.is_empty() {
        label
    } else {
        let list: Vec<String> = omit.iter().map(usize::to_string).collect();
        format!("{label} minus {}", list.join(","))
    };
    let cover = make_cover(&generators, cfg)?;
    Ok(LoadedCover { label, cfg, generators, cover })
}

impl CoverFile {
    pub fn load(&self, source_name: &str) -> CliResult<LoadedCover> {
        if let Some(order) = &self.order {
            if order != COORDINATE_ORDER {
                return Err(CliError::parse(source_name, format!("order must be \"{COORDINATE_ORDER}\", got {order:?}")));
            }
        }
        match (&self.name, &self.contexts) {
            (Some(_), Some(_)) => Err(CliError::parse(source_name, "give either \"name\" or \"contexts\", not both")),
            (None, None) => Err(CliError::parse(source_name, "missing \"name\" or \"contexts\"")),
            (Some(name), None) => {
                let requested = match (self.p, self.n) {
                    (Some(p), Some(n)) => Some(config(p, n)?),
                    (None, None) => None,
                    _ => return Err(CliError::parse(source_name, "\"p\" and \"n\" must be given together")),
                };
                let (cfg, generators) = named_cover(name, requested)?;
                if let Some(req) = requested {
                    if req != cfg {
                        return Err(Error::Input(format!("{name} is defined for {cfg}, not {req}")).into());
                    }
                }
                let label = if name == "full" { format!("full:{}:{}", cfg.p(), cfg.n()) } else { name.clone() };
                build(label, cfg, generators, &self.omit)
            }
            (None, Some(raw)) => {
                let (Some(p), Some(n)) = (self.p, self.n) else {
                    return Err(CliError::parse(source_name, "explicit contexts need \"p\" and \"n\""));
                };
                let cfg = config(p, n)?;
                let generators = generator_lists(cfg, raw)?;
                build(source_name.to_string(), cfg, generators, &self.omit)
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, source_name: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::parse(source_name, e.to_string()))
}

/// `mermin-square`, `mermin-star`, `full:P:N`, or a path to a cover file.
pub fn load_cover(arg: &str) -> CliResult<LoadedCover> {
    if let Some(rest) = arg.strip_prefix("full:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let parsed: Option<(u32, usize)> = match parts.as_slice() {
            [p, n] => p.parse().ok().zip(n.parse().ok()),
            _ => None,
        };
        let (p, n) = parsed.ok_or_else(|| CliError::parse(arg, "expected full:P:N"))?;
        let file = CoverFile { name: Some("full".into()), p: Some(p), n: Some(n), order: None, contexts: None, omit: Vec::new() };
        return file.load(arg);
    }
    if COVER_NAMES.contains(&arg) && arg != "full" {
        let file = CoverFile { name: Some(arg.into()), p: None, n: None, order: None, contexts: None, omit: Vec::new() };
        return file.load(arg);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::parse(
            arg,
            "not a file and not one of mermin-square, mermin-star, full:P:N",
        ));
    }
    let file: CoverFile = parse_json(&read(path)?, arg)?;
    file.load(arg)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateFile {
    Named {
        name: String,
        p: u32,
        n: usize,
        #[serde(default)]
        params: NamedParams,
    },
    /// Row-major real and imaginary parts.
    Matrix { p: u32, n: usize, real: Vec<Vec<f64>>, imag: Vec<Vec<f64>> },
}

pub const STATE_NAMES: [&str; 5] = ["ghz", "bell", "maximally-mixed", "basis", "random"];

fn named(name: &str, params: &NamedParams, seed: u64) -> CliResult<NamedState> {
    Ok(match name {
        "ghz" => NamedState::Ghz,
        "bell" => NamedState::Bell,
        "maximally-mixed" => NamedState::MaximallyMixed,
        "basis" => NamedState::Basis(params.index.unwrap_or(0)),
        "random" => NamedState::Random { seed: params.seed.unwrap_or(seed), mix: params.mix.unwrap_or(0.0) },
        other => {
            return Err(Error::Input(format!("unknown state {other:?}; expected one of {}", STATE_NAMES.join(", "))).into())
        }
    })
}

impl StateFile {
    pub fn load(&self, seed: u64) -> CliResult<DensityMatrix> {
        match self {
            StateFile::Named { name, p, n, params } => Ok(named_state(&named(name, params, seed)?, config(*p, *n)?)?),
            StateFile::Matrix { p, n, real, imag } => {
                let cfg = config(*p, *n)?;
                let d = cfg.d();
                let shape_ok = |m: &Vec<Vec<f64>>| m.len() == d && m.iter().all(|r| r.len() == d);
                if !shape_ok(real) || !shape_ok(imag) {
                    return Err(Error::Input(format!("real and imag must both be {d}x{d}")).into());
                }
                let m = CMatrix::from_fn(d, d, |i, j| C64::new(real[i][j], imag[i][j]));
                Ok(DensityMatrix::new(cfg, m)?)
            }
        }
    }
}

/// A path to a state file, or `ghz`, `bell`, `maximally-mixed`, `basis:K`,
/// `random:SEED[:MIX]`, taking p and n from the cover.
pub fn load_state(arg: &str, cfg: PrimeConfig, seed: u64) -> CliResult<DensityMatrix> {
    let mut parts = arg.split(':');
    let head = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    if STATE_NAMES.contains(&head) {
        let bad = || CliError::parse(arg, "malformed state parameters");
        let mut params = NamedParams::default();
        match (head, rest.as_slice()) {
            (_, []) => {}
            ("basis", [k]) => params.index = Some(k.parse().map_err(|_| bad())?),
            ("random", [s]) => params.seed = Some(s.parse().map_err(|_| bad())?),
            ("random", [s, m]) => {
                params.seed = Some(s.parse().map_err(|_| bad())?);
                params.mix = Some(m.parse().map_err(|_| bad())?);
            }
            _ => return Err(bad()),
        }
        let file = StateFile::Named { name: head.into(), p: cfg.p(), n: cfg.n(), params };
        return file.load(seed);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(CliError::parse(arg, format!("not a file and not one of {}", STATE_NAMES.join(", "))));
    }
    let file: StateFile = parse_json(&read(path)?, arg)?;
    let rho = file.load(seed)?;
    if rho.cfg() != cfg {
        return Err(Error::Input(format!("state is for {} but cover is for {cfg}", rho.cfg())).into());
    }
    Ok(rho)
}

fn symbolic_term(cfg: PrimeConfig, term: &str) -> Option<SymplecticVector> {
    let term = term.trim();
    let letter_at = term.find(|c: char| c.is_ascii_alphabetic())?;
    let coef: u32 = if letter_at == 0 { 1 } else { term[..letter_at].trim().parse().ok()? };
    let letter = term[letter_at..].chars().next()?;
    let index: usize = term[letter_at + 1..].trim().parse().ok()?;
    if index == 0 || index > cfg.n() {
        return None;
    }
    let v = match letter {
        'x' => cfg.x(index),
        'z' => cfg.z(index),
        'y' => cfg.y(index),
        _ => return None,
    };
    Some(v.scale(coef % cfg.p()))
}

/// Generators as JSON (`[[0,1],[1,0]]`) or symbolically
/// (`x1+x2, z1+z2`, with y_i = x_i + z_i and optional coefficients `2x1`).
pub fn parse_generators(text: &str, cfg: PrimeConfig) -> CliResult<Vec<SymplecticVector>> {
    let text = text.trim();
    if text.starts_with('[') {
        let raw: Vec<Vec<u32>> = parse_json(text, "--context")?;
        return raw
            .iter()
            .enumerate()
            .map(|(i, v)| vector(cfg, v, &format!("generator {}", i + 1)))
            .collect();
    }
    text.split(',')
        .map(|gen| {
            gen.split('+')
                .map(|t| {
                    symbolic_term(cfg, t)
                        .ok_or_else(|| CliError::parse("--context", format!("cannot read term {:?}", t.trim())))
                })
                .try_fold(cfg.zero(), |acc, v| Ok(&acc + &v?))
        })
        .collect()
}
