use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::curves::enumerate_invariant_curves;
use super::KringError;
use crate::fan::Fan;
use crate::group_ring::{congruent_mod, ElementJson, GroupRingElement};
use crate::root_datum::CosetTable;

/// Which fixed-point set a class lives on: the whole variety X, or the
/// closure Y of the torus T/T_H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    X,
    Y,
}

/// A torus-fixed point, indexed by a maximal cone of F₊ and a coset
/// representative (an index into the Weyl group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    pub cone: usize,
    pub coset: usize,
}

/// The fixed points F₊(r) × W/W_L (scope X) or F₊(r) × W_H/W_L (scope Y),
/// ordered by cone, then by coset.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    pub scope: Scope,
    points: Vec<FixedPoint>,
    cone_position: HashMap<usize, usize>,
    num_cosets: usize,
}

impl FixedPointSet {
    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn table<'a>(&self, fan: &'a Fan) -> &'a CosetTable {
        match self.scope {
            Scope::X => fan.datum().cosets_w(),
            Scope::Y => fan.datum().cosets_wh(),
        }
    }

    /// The fixed point (σ, w·W_L) for any Weyl group element `w` of the coset.
    pub fn index_of(&self, fan: &Fan, cone: usize, w: usize) -> Option<usize> {
        let c = self.table(fan).coset_of(w)?;
        Some(self.cone_position.get(&cone)? * self.num_cosets + c)
    }

    pub fn labels(&self, fan: &Fan, i: usize) -> (String, String) {
        let p = self.points[i];
        (fan.cone_label(p.cone), fan.datum().weyl.word(p.coset))
    }

    pub fn label(&self, fan: &Fan, i: usize) -> String {
        let (c, w) = self.labels(fan, i);
        format!("({c}, {w})")
    }
}

pub fn enumerate_fixed_points(fan: &Fan, scope: Scope) -> FixedPointSet {
    let table = match scope {
        Scope::X => fan.datum().cosets_w(),
        Scope::Y => fan.datum().cosets_wh(),
    };
    let mut points = Vec::new();
    let mut cone_position = HashMap::new();
    for (pos, &cone) in fan.maximal_cones().iter().enumerate() {
        cone_position.insert(cone, pos);
        points.extend(table.representatives().iter().map(|&coset| FixedPoint { cone, coset }));
    }
    FixedPointSet { scope, points, cone_position, num_cosets: table.len() }
}

/// A family of values in R(T), one per fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizationClass {
    pub scope: Scope,
    pub values: Vec<GroupRingElement>,
}

impl LocalizationClass {
    pub fn constant(fan: &Fan, scope: Scope, c: i64) -> Self {
        let n = enumerate_fixed_points(fan, scope).len();
        let one = GroupRingElement::constant(fan.datum().char_t.clone(), c);
        LocalizationClass { scope, values: vec![one; n] }
    }

    fn zip(&self, other: &Self, f: impl Fn(&GroupRingElement, &GroupRingElement) -> GroupRingElement) -> Result<Self, KringError> {
        if self.scope != other.scope {
            return Err(KringError::ScopeMismatch { expected: self.scope });
        }
        if self.values.len() != other.values.len() {
            return Err(KringError::IndexMismatch { expected: self.values.len(), found: other.values.len() });
        }
        Ok(LocalizationClass { scope: self.scope, values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self, KringError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, KringError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, KringError> {
        self.zip(other, |a, b| a * b)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(GroupRingElement::is_zero)
    }

    pub fn to_json(&self, fan: &Fan) -> LocalizationClassJson {
        let fps = enumerate_fixed_points(fan, self.scope);
        LocalizationClassJson {
            scope: self.scope,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let (cone, coset) = fps.labels(fan, i);
                    LocalizedValueJson { cone, coset, element: v.to_json() }
                })
                .collect(),
        }
    }

    /// Reads a class, requiring exactly one value per fixed point.
    pub fn from_json(fan: &Fan, json: &LocalizationClassJson) -> Result<Self, KringError> {
        let fps = enumerate_fixed_points(fan, json.scope);
        let index: HashMap<(String, String), usize> = (0..fps.len()).map(|i| (fps.labels(fan, i), i)).collect();
        if json.values.len() != fps.len() {
            return Err(KringError::IndexMismatch { expected: fps.len(), found: json.values.len() });
        }
        let mut values: Vec<Option<GroupRingElement>> = vec![None; fps.len()];
        for v in &json.values {
            let key = (v.cone.clone(), v.coset.clone());
            let i = *index
                .get(&key)
                .ok_or_else(|| KringError::UnknownFixedPoint { cone: v.cone.clone(), coset: v.coset.clone() })?;
            if values[i].is_some() {
                return Err(KringError::IndexMismatch { expected: fps.len(), found: json.values.len() + 1 });
            }
            values[i] = Some(GroupRingElement::from_json(&v.element, fan.datum().char_t.clone())?);
        }
        Ok(LocalizationClass { scope: json.scope, values: values.into_iter().map(|v| v.expect("all filled")).collect() })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationClassJson {
    pub scope: Scope,
    pub values: Vec<LocalizedValueJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedValueJson {
    pub cone: String,
    pub coset: String,
    pub element: ElementJson,
}

/// The first violated condition found by a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// `"2"`, `"3"`, `"4"` for curve congruences, `"invariance"` for W_L-invariance.
    pub kind: String,
    pub points: Vec<String>,
    pub character: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<Witness>,
}

impl Membership {
    fn from_witness(witness: Option<Witness>) -> Self {
        Membership { member: witness.is_none(), witness }
    }
}

/// Membership of a fixed-point family in the image of localization: the
/// values at the two ends of every invariant curve must agree modulo
/// 1 − e^{−χ} for the curve's character χ.
pub fn kt_membership(fan: &Fan, class: &LocalizationClass) -> Result<Membership, KringError> {
    let fps = enumerate_fixed_points(fan, class.scope);
    if class.values.len() != fps.len() {
        return Err(KringError::IndexMismatch { expected: fps.len(), found: class.values.len() });
    }
    let curves = enumerate_invariant_curves(fan, class.scope)?;
    let failure = curves.par_iter().find_map_first(|c| {
        let [a, b] = c.endpoints;
        match congruent_mod(&class.values[a], &class.values[b], &c.character) {
            Ok(true) => None,
            Ok(false) => Some(Ok(Witness {
                kind: c.kind.code().to_string(),
                points: vec![fps.label(fan, a), fps.label(fan, b)],
                character: c.character.clone(),
            })),
            Err(e) => Some(Err(e)),
        }
    });
    Ok(Membership::from_witness(failure.transpose()?))
}

/// Membership of (f_σ)_{σ ∈ F₊(r)} in the G-equivariant ring: each f_σ is
/// W_L-invariant, s_α s_{θ(α)}·f_σ ≡ f_σ mod (1 − e^{−γ}) whenever σ has a
/// facet in γ^⊥, and f_σ ≡ f_σ′ mod (1 − e^{−χ}) across shared facets.
pub fn kg_membership(fan: &Fan, collapsed: &[GroupRingElement]) -> Result<Membership, KringError> {
    let maximal = fan.maximal_cones();
    if collapsed.len() != maximal.len() {
        return Err(KringError::IndexMismatch { expected: maximal.len(), found: collapsed.len() });
    }
    let d = fan.datum();
    for (f, &sigma) in collapsed.iter().zip(maximal) {
        for &i in &d.delta_l {
            let s = &d.weyl.generators()[i];
            if f.act(s) != *f {
                return Ok(Membership::from_witness(Some(Witness {
                    kind: "invariance".into(),
                    points: vec![fan.cone_label(sigma), d.weyl.word(d.weyl.generator_index(i))],
                    character: Vec::new(),
                })));
            }
        }
    }
    for (f, &sigma) in collapsed.iter().zip(maximal) {
        for k in fan.facet_orthogonal_restricted_roots(sigma)? {
            let t = d.weyl.element(d.restricted_reflection(k));
            let gamma = &d.restricted_simple_roots[k];
            if !congruent_mod(&f.act(t), f, gamma)? {
                return Ok(Membership::from_witness(Some(Witness {
                    kind: "3".into(),
                    points: vec![fan.cone_label(sigma)],
                    character: gamma.clone(),
                })));
            }
        }
    }
    let position: HashMap<usize, usize> = maximal.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    for (a, b, chi) in fan.adjacent_pairs() {
        let character = d.gamma.apply(&chi);
        if !congruent_mod(&collapsed[position[&a]], &collapsed[position[&b]], &character)? {
            return Ok(Membership::from_witness(Some(Witness {
                kind: "4".into(),
                points: vec![fan.cone_label(a), fan.cone_label(b)],
                character,
            })));
        }
    }
    Ok(Membership::from_witness(None))
}

/// The W-equivariant family f_{σ,w} = w·f_σ on the fixed points of X.
pub fn expand(fan: &Fan, collapsed: &[GroupRingElement]) -> Result<LocalizationClass, KringError> {
    let maximal = fan.maximal_cones();
    if collapsed.len() != maximal.len() {
        return Err(KringError::IndexMismatch { expected: maximal.len(), found: collapsed.len() });
    }
    let position: HashMap<usize, usize> = maximal.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let fps = enumerate_fixed_points(fan, Scope::X);
    let w = &fan.datum().weyl;
    let values = fps.points().iter().map(|p| collapsed[position[&p.cone]].act(w.element(p.coset))).collect();
    Ok(LocalizationClass { scope: Scope::X, values })
}

/// The values at the fixed points (σ, W_L), one per maximal cone.
pub fn collapse(fan: &Fan, class: &LocalizationClass) -> Result<Vec<GroupRingElement>, KringError> {
    let fps = enumerate_fixed_points(fan, class.scope);
    if class.values.len() != fps.len() {
        return Err(KringError::IndexMismatch { expected: fps.len(), found: class.values.len() });
    }
    fan.maximal_cones()
        .iter()
        .map(|&s| Ok(class.values[fps.index_of(fan, s, 0).expect("identity coset")].clone()))
        .collect()
}

/// A piecewise linear function on F₊: one character of T/T_H per maximal
/// cone, agreeing on common facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinear {
    pub values: Vec<Vec<i64>>,
}

impl PiecewiseLinear {
    pub fn new(fan: &Fan, values: Vec<Vec<i64>>) -> Result<Self, KringError> {
        let maximal = fan.maximal_cones();
        if values.len() != maximal.len() {
            return Err(KringError::IndexMismatch { expected: maximal.len(), found: values.len() });
        }
        let r = fan.dim();
        if values.iter().any(|v| v.len() != r) {
            return Err(KringError::InvalidPiecewiseLinear(format!("characters must have {r} coordinates")));
        }
        let position: HashMap<usize, usize> = maximal.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        for (a, b, _) in fan.adjacent_pairs() {
            let (ha, hb) = (&values[position[&a]], &values[position[&b]]);
            for &j in fan.cone(a)?.iter().filter(|j| fan.cones()[b].contains(j)) {
                let v = &fan.rays()[j];
                let pa: i64 = ha.iter().zip(v).map(|(x, y)| x * y).sum();
                let pb: i64 = hb.iter().zip(v).map(|(x, y)| x * y).sum();
                if pa != pb {
                    return Err(KringError::InvalidPiecewiseLinear(format!(
                        "values on {} and {} disagree on ray {j}",
                        fan.cone_label(a),
                        fan.cone_label(b)
                    )));
                }
            }
        }
        Ok(PiecewiseLinear { values })
    }

    /// The linear function u on every cone.
    pub fn constant(fan: &Fan, u: &[i64]) -> Self {
        PiecewiseLinear { values: vec![u.to_vec(); fan.maximal_cones().len()] }
    }

    /// The function that is 1 on ray `j`, 0 on all other rays and linear on cones.
    pub fn ray_divisor(fan: &Fan, j: usize) -> Result<Self, KringError> {
        let r = fan.dim();
        let values = fan
            .maximal_cones()
            .iter()
            .map(|&s| {
                Ok(fan
                    .local_characters(s)?
                    .into_iter()
                    .find(|(ray, _)| *ray == j)
                    .map(|(_, u)| u)
                    .unwrap_or_else(|| vec![0; r]))
            })
            .collect::<Result<Vec<_>, KringError>>()?;
        Ok(PiecewiseLinear { values })
    }
}

/// The class of the line bundle of a piecewise linear function: at (σ, w)
/// its value is e^{w(h_σ)}.
pub fn line_bundle_class(fan: &Fan, h: &PiecewiseLinear, scope: Scope) -> Result<LocalizationClass, KringError> {
    let maximal = fan.maximal_cones();
    if h.values.len() != maximal.len() {
        return Err(KringError::IndexMismatch { expected: maximal.len(), found: h.values.len() });
    }
    let d = fan.datum();
    let position: HashMap<usize, usize> = maximal.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let in_t: Vec<Vec<i64>> = h.values.iter().map(|u| d.gamma.apply(u)).collect();
    let fps = enumerate_fixed_points(fan, scope);
    let values = fps
        .points()
        .iter()
        .map(|p| {
            let exp = d.weyl.element(p.coset).apply(&in_t[position[&p.cone]]);
            GroupRingElement::monomial(d.char_t.clone(), exp, 1)
        })
        .collect();
    Ok(LocalizationClass { scope, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::group_ring::orbit_sum;

    #[test]
    fn fixed_point_counts() {
        let fan = catalog::pgl6_wonderful();
        assert_eq!(enumerate_fixed_points(&fan, Scope::X).len(), 90);
        assert_eq!(enumerate_fixed_points(&fan, Scope::Y).len(), 6);
        let a1 = catalog::group_a1_wonderful();
        assert_eq!(enumerate_fixed_points(&a1, Scope::X).len(), 4);
        assert_eq!(enumerate_fixed_points(&a1, Scope::Y).len(), 2);
    }

    #[test]
    fn constants_and_bumps() {
        let fan = catalog::pgl6_wonderful();
        let c = LocalizationClass::constant(&fan, Scope::X, 3);
        assert!(kt_membership(&fan, &c).unwrap().member);
        let mut bumped = c.clone();
        bumped.values[17] = &bumped.values[17] + &GroupRingElement::one(fan.datum().char_t.clone());
        let m = kt_membership(&fan, &bumped).unwrap();
        assert!(!m.member);
        let label = enumerate_fixed_points(&fan, Scope::X).label(&fan, 17);
        assert!(m.witness.unwrap().points.contains(&label));
    }

    #[test]
    fn line_bundles_are_members() {
        let fan = catalog::pgl6_wonderful();
        let d = fan.datum();
        for u in [vec![1, 0], vec![0, 1], vec![2, -3]] {
            let c = line_bundle_class(&fan, &PiecewiseLinear::constant(&fan, &u), Scope::X).unwrap();
            assert!(kt_membership(&fan, &c).unwrap().member, "u = {u:?}");
        }
        let zero = line_bundle_class(&fan, &PiecewiseLinear::constant(&fan, &[0, 0]), Scope::X).unwrap();
        assert_eq!(zero, LocalizationClass::constant(&fan, Scope::X, 1));
        assert_eq!(d.restricted_rank(), 2);
    }

    #[test]
    fn ray_classes_on_split_fan() {
        let fan = catalog::pgl6_split();
        for j in 0..fan.rays().len() {
            let h = PiecewiseLinear::ray_divisor(&fan, j).unwrap();
            let c = line_bundle_class(&fan, &h, Scope::X).unwrap();
            assert!(kt_membership(&fan, &c).unwrap().member);
        }
        assert!(PiecewiseLinear::new(&fan, vec![vec![1, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn kg_examples() {
        let fan = catalog::pgl6_wonderful();
        let d = fan.datum();
        let one = GroupRingElement::one(d.char_t.clone());
        assert!(kg_membership(&fan, &[one.scale(7)]).unwrap().member);
        let e = GroupRingElement::monomial(d.char_t.clone(), vec![1, 0, 0, 0, 0], 1);
        let wh: Vec<_> = d.weyl_h.iter().map(|&w| d.weyl.element(w).clone()).collect();
        let f = orbit_sum(wh.iter(), &e);
        assert!(kg_membership(&fan, &[f.clone()]).unwrap().member);
        assert!(kt_membership(&fan, &expand(&fan, &[f]).unwrap()).unwrap().member);
        // e^{γ1} is W_L-invariant and s·e^{γ1} − e^{γ1} = e^{−γ1} − e^{γ1} is divisible by 1 − e^{−γ1}
        let g1 = GroupRingElement::monomial(d.char_t.clone(), d.restricted_simple_roots[0].clone(), 1);
        assert!(kg_membership(&fan, &[g1]).unwrap().member);
        // e^{α2} is not W_L-invariant
        let a2 = GroupRingElement::monomial(d.char_t.clone(), vec![0, 1, 0, 0, 0], 1);
        let m = kg_membership(&fan, &[a2]).unwrap();
        assert_eq!(m.witness.unwrap().kind, "invariance");
    }

    #[test]
    fn json_round_trip() {
        let fan = catalog::group_a1_wonderful();
        let c = line_bundle_class(&fan, &PiecewiseLinear::constant(&fan, &[1]), Scope::X).unwrap();
        let json = c.to_json(&fan);
        assert_eq!(LocalizationClass::from_json(&fan, &json).unwrap(), c);
        let mut short = json.clone();
        short.values.pop();
        assert!(matches!(LocalizationClass::from_json(&fan, &short), Err(KringError::IndexMismatch { .. })));
    }
}
