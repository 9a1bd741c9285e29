//! Named covers: the Mermin square (two qubits) and the Mermin star (three
//! qubits). Contexts are listed in the conventional order I_1, ..., I_6 and
//! I_1, ..., I_5.

use crate::error::Result;
use crate::gfp::{span, PrimeConfig, Subspace, SymplecticVector};
use crate::presheaf::ContextCover;

fn sum(vs: &[SymplecticVector]) -> SymplecticVector {
    vs.iter().skip(1).fold(vs[0].clone(), |acc, v| &acc + v)
}

pub fn mermin_square_generators() -> Result<(PrimeConfig, Vec<Vec<SymplecticVector>>)> {
    let c = PrimeConfig::new(2, 2)?;
    let (x1, x2, z1, z2) = (c.x(1), c.x(2), c.z(1), c.z(2));
    Ok((
        c,
        vec![
            vec![x1.clone(), x2.clone()],
            vec![sum(&[x1.clone(), x2.clone()]), sum(&[z1.clone(), z2.clone()])],
            vec![z1.clone(), z2.clone()],
            vec![x1.clone(), z2.clone()],
            vec![sum(&[x1, z2]), sum(&[z1.clone(), x2.clone()])],
            vec![z1, x2],
        ],
    ))
}

pub fn mermin_star_generators() -> Result<(PrimeConfig, Vec<Vec<SymplecticVector>>)> {
    let c = PrimeConfig::new(2, 3)?;
    let (x1, x2, x3) = (c.x(1), c.x(2), c.x(3));
    let (y1, y2, y3) = (c.y(1), c.y(2), c.y(3));
    Ok((
        c,
        vec![
            vec![x1.clone(), x2.clone(), x3.clone()],
            vec![x1.clone(), y2.clone(), y3.clone()],
            vec![y1.clone(), x2.clone(), y3.clone()],
            vec![y1.clone(), y2.clone(), x3.clone()],
            vec![
                sum(&[x1.clone(), x2, x3.clone()]),
                sum(&[y1, y2.clone(), x3]),
                sum(&[x1, y2, y3]),
            ],
        ],
    ))
}

fn spans(cfg: PrimeConfig, lists: &[Vec<SymplecticVector>]) -> Result<Vec<Subspace>> {
    lists.iter().map(|g| span(g, cfg)).collect()
}

/// I_1, ..., I_6 of the square.
pub fn mermin_square_contexts() -> Result<Vec<Subspace>> {
    let (c, g) = mermin_square_generators()?;
    spans(c, &g)
}

/// I_1, ..., I_5 of the star.
pub fn mermin_star_contexts() -> Result<Vec<Subspace>> {
    let (c, g) = mermin_star_generators()?;
    spans(c, &g)
}

pub fn mermin_square() -> Result<ContextCover> {
    let (c, _) = mermin_square_generators()?;
    ContextCover::from_subspaces(c, mermin_square_contexts()?)
}

pub fn mermin_star() -> Result<ContextCover> {
    let (c, _) = mermin_star_generators()?;
    ContextCover::from_subspaces(c, mermin_star_contexts()?)
}

/// Names accepted by [`named_cover`].
pub const COVER_NAMES: [&str; 3] = ["mermin-square", "mermin-star", "full"];

/// Generator lists of a named cover, one list per maximal context. For
/// `full` the lists are the bases of all maximal isotropic subspaces.
pub fn named_cover(name: &str, cfg: Option<PrimeConfig>) -> Result<(PrimeConfig, Vec<Vec<SymplecticVector>>)> {
    use crate::error::Error;
    match name {
        "mermin-square" => mermin_square_generators(),
        "mermin-star" => mermin_star_generators(),
        "full" => {
            let cfg = cfg.ok_or_else(|| Error::Input("the full cover needs p and n".into()))?;
            let lagrangians = crate::gfp::enumerate_isotropic(cfg, Some(cfg.n()))?;
            Ok((cfg, lagrangians.into_iter().map(|s| s.basis().to_vec()).collect()))
        }
        other => Err(Error::Input(format!(
            "unknown cover {other:?}; expected one of {}",
            COVER_NAMES.join(", ")
        ))),
    }
}
