use serde::{Deserialize, Serialize};

use super::localization::{enumerate_fixed_points, line_bundle_class, LocalizationClass, PiecewiseLinear, Scope};
use super::KringError;
use crate::fan::{cone_label, Fan};
use crate::group_ring::GroupRingElement;

/// A generator of the ideal of relations among the ray classes X_j over
/// the K-ring of the wonderful variety.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// X_F = ∏_{j∈F}(1 − X_j) for a minimal non-face F of F₊.
    NonFace(Vec<usize>),
    /// ∏_j X_j^{⟨u, v_j⟩} − [L_u] for u ∈ X*(T/T_H).
    LineBundle(Vec<i64>),
}

impl Relation {
    pub fn label(&self) -> String {
        match self {
            Relation::NonFace(f) => format!("X_{}", cone_label(f)),
            Relation::LineBundle(u) => format!("L{u:?}"),
        }
    }

    /// The class of the relation at the fixed points of X.
    pub fn evaluate(&self, fan: &Fan) -> Result<LocalizationClass, KringError> {
        let rays = ray_classes(fan)?;
        let n = enumerate_fixed_points(fan, Scope::X).len();
        let lattice = fan.datum().char_t.clone();
        let one = GroupRingElement::one(lattice.clone());
        let values = match self {
            Relation::NonFace(f) => (0..n)
                .map(|i| f.iter().fold(one.clone(), |acc, &j| &acc * &(&one - &rays[j].values[i])))
                .collect(),
            Relation::LineBundle(u) => {
                let l = line_bundle_class(fan, &PiecewiseLinear::constant(fan, u), Scope::X)?;
                let exps: Vec<i64> = fan.rays().iter().map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum()).collect();
                (0..n)
                    .map(|i| {
                        let mut exp = vec![0; lattice.rank()];
                        for (j, &k) in exps.iter().enumerate() {
                            let (e, c) = single_term(&rays[j].values[i]);
                            assert_eq!(c, 1, "ray classes are units");
                            for (x, y) in exp.iter_mut().zip(e) {
                                *x += k * y;
                            }
                        }
                        &GroupRingElement::monomial(lattice.clone(), exp, 1) - &l.values[i]
                    })
                    .collect()
            }
        };
        Ok(LocalizationClass { scope: Scope::X, values })
    }
}

fn single_term(f: &GroupRingElement) -> (Vec<i64>, i64) {
    let mut terms = f.terms();
    let (e, c) = terms.next().expect("nonzero monomial");
    assert!(terms.next().is_none(), "monomial expected");
    (e.clone(), c)
}

/// The classes X_j of the rays of F₊ at the fixed points of X.
fn ray_classes(fan: &Fan) -> Result<Vec<LocalizationClass>, KringError> {
    (0..fan.rays().len())
        .map(|j| line_bundle_class(fan, &PiecewiseLinear::ray_divisor(fan, j)?, Scope::X))
        .collect()
}

pub fn line_bundle_relation(u: &[i64]) -> Relation {
    Relation::LineBundle(u.to_vec())
}

/// Generators X_j (one per ray of F₊) and the ideal generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KClassPresentation {
    pub generators: Vec<String>,
    pub relations: Vec<Relation>,
}

impl KClassPresentation {
    /// Non-face products for the minimal non-faces of F₊ and the line
    /// bundle relations for u ∈ Δ_{G/H}.
    pub fn new(fan: &Fan) -> Self {
        let r = fan.dim();
        let generators = (1..=fan.rays().len()).map(|j| format!("X{j}")).collect();
        let relations = fan
            .minimal_non_faces()
            .into_iter()
            .map(Relation::NonFace)
            .chain((0..r).map(|k| {
                let mut u = vec![0; r];
                u[k] = 1;
                Relation::LineBundle(u)
            }))
            .collect();
        KClassPresentation { generators, relations }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: String,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationReport {
    pub datum: String,
    pub fixed_points: usize,
    pub generators: Vec<String>,
    pub relations: Vec<RelationReport>,
}

/// Evaluates every relation of the presentation at all fixed points of X.
pub fn wonderful_presentation_check(fan: &Fan) -> Result<PresentationReport, KringError> {
    let p = KClassPresentation::new(fan);
    let mut relations = Vec::new();
    for rel in &p.relations {
        if !rel.evaluate(fan)?.is_zero() {
            return Err(KringError::RelationViolation(rel.label()));
        }
        relations.push(RelationReport { relation: rel.label(), vanishes: true });
    }
    Ok(PresentationReport {
        datum: fan.datum().label(),
        fixed_points: enumerate_fixed_points(fan, Scope::X).len(),
        generators: p.generators,
        relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn wonderful_relations_vanish() {
        let fan = catalog::pgl6_wonderful();
        let report = wonderful_presentation_check(&fan).unwrap();
        assert_eq!(report.fixed_points, 90);
        assert_eq!(report.relations.len(), 2);
    }

    #[test]
    fn split_relations_vanish() {
        let fan = catalog::pgl6_split();
        let p = KClassPresentation::new(&fan);
        assert!(p.relations.contains(&Relation::NonFace(vec![0, 1])));
        assert!(wonderful_presentation_check(&fan).is_ok());
    }

    #[test]
    fn trivial_and_composite_characters() {
        let fan = catalog::pgl6_split();
        assert!(line_bundle_relation(&[0, 0]).evaluate(&fan).unwrap().is_zero());
        assert!(line_bundle_relation(&[2, -1]).evaluate(&fan).unwrap().is_zero());
    }

    #[test]
    fn faces_do_not_vanish() {
        let fan = catalog::pgl6_split();
        let sigma = fan.maximal_cones()[0];
        assert!(!Relation::NonFace(fan.cones()[sigma].clone()).evaluate(&fan).unwrap().is_zero());
    }
}
