use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::localization::{enumerate_fixed_points, Scope};
use super::KringError;
use crate::fan::Fan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    /// Joins (σ, u) to (σ, u s_α) for α ∈ Φ⁺ outside the Levi; only in X.
    Root,
    /// Joins (σ, u) to (σ, u s_α s_{θ(α)}) when σ has a facet in γ^⊥.
    Wall,
    /// Joins (σ, u) to (σ′, u) across a common facet of σ and σ′.
    Facet,
}

impl CurveKind {
    pub fn code(self) -> &'static str {
        match self {
            CurveKind::Root => "2",
            CurveKind::Wall => "3",
            CurveKind::Facet => "4",
        }
    }
}

/// A T-invariant curve: two fixed points (indices into the fixed-point set)
/// and the character of T on its tangent line, up to sign.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub endpoints: [usize; 2],
    pub character: Vec<i64>,
}

fn normalize(chi: Vec<i64>) -> Vec<i64> {
    match chi.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => chi.into_iter().map(|v| -v).collect(),
        _ => chi,
    }
}

/// All invariant curves, each found from both of its endpoints.
pub fn enumerate_invariant_curves(fan: &Fan, scope: Scope) -> Result<Vec<Curve>, KringError> {
    let d = fan.datum();
    let fps = enumerate_fixed_points(fan, scope);
    let root_moves: Vec<(usize, Vec<i64>)> = match scope {
        Scope::X => d
            .positive_roots_outside_levi()
            .into_iter()
            .map(|a| (d.weyl.index_of(&d.roots.reflection(&a)).expect("reflection lies in W"), a))
            .collect(),
        Scope::Y => Vec::new(),
    };
    let walls: Vec<(usize, Vec<usize>)> = fan
        .maximal_cones()
        .iter()
        .map(|&s| Ok((s, fan.facet_orthogonal_restricted_roots(s)?)))
        .collect::<Result<_, KringError>>()?;
    let t: Vec<usize> = (0..d.restricted_rank()).map(|k| d.restricted_reflection(k)).collect();
    let adjacent: Vec<(usize, usize, Vec<i64>)> =
        fan.adjacent_pairs().into_iter().map(|(a, b, chi)| (a, b, d.gamma.apply(&chi))).collect();

    let found: Vec<Curve> = (0..fps.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let p = fps.points()[i];
            let u = d.weyl.element(p.coset);
            let mut out = Vec::new();
            let mut push = |kind, other: usize, chi: Vec<i64>| {
                out.push(Curve { kind, endpoints: [i.min(other), i.max(other)], character: normalize(chi) });
            };
            for (s, alpha) in &root_moves {
                let j = fps.index_of(fan, p.cone, d.weyl.mul(p.coset, *s)).expect("coset");
                push(CurveKind::Root, j, u.apply(alpha));
            }
            let ks = &walls.iter().find(|(s, _)| *s == p.cone).expect("maximal").1;
            for &k in ks {
                let j = fps.index_of(fan, p.cone, d.weyl.mul(p.coset, t[k])).expect("coset");
                push(CurveKind::Wall, j, u.apply(&d.restricted_simple_roots[k]));
            }
            for (a, b, chi) in &adjacent {
                let other = if *a == p.cone {
                    *b
                } else if *b == p.cone {
                    *a
                } else {
                    continue;
                };
                let j = fps.index_of(fan, other, p.coset).expect("coset");
                push(CurveKind::Facet, j, u.apply(chi));
            }
            out
        })
        .collect();

    let mut counts: BTreeMap<Curve, usize> = BTreeMap::new();
    for c in found {
        *counts.entry(c).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(c, n)| {
            if n == 2 && c.endpoints[0] != c.endpoints[1] {
                Ok(c)
            } else {
                Err(KringError::CurveMismatch(format!(
                    "curve {:?} between {} and {} found {n} times",
                    c.kind,
                    fps.label(fan, c.endpoints[0]),
                    fps.label(fan, c.endpoints[1])
                )))
            }
        })
        .collect()
}
