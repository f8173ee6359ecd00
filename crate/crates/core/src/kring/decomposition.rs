use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stanley_reisner::SrRing;
use super::KringError;
use crate::fan::{Fan, FanError};
use crate::group_ring::{ElementJson, GroupRingElement};
use crate::root_datum::CosetTable;

/// Components c_τ ∈ C_τ ⊗ R(T_H)^{W_τ} indexed by cones τ of F₊, stored in
/// the Stanley–Reisner ring of F₊. Zero components are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedDecomposition {
    pub components: BTreeMap<usize, GroupRingElement>,
}

impl GradedDecomposition {
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, tau: usize) -> Option<&GroupRingElement> {
        self.components.get(&tau)
    }

    fn insert_add(&mut self, tau: usize, c: GroupRingElement) {
        let sum = match self.components.remove(&tau) {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.components.insert(tau, sum);
        }
    }

    pub fn to_json(&self, fan: &Fan) -> DecompositionJson {
        DecompositionJson {
            components: self
                .components
                .iter()
                .map(|(&t, c)| ComponentJson { cone: fan.cone_label(t), element: c.to_json() })
                .collect(),
        }
    }

    pub fn from_json(fan: &Fan, json: &DecompositionJson) -> Result<Self, KringError> {
        let lattice = SrRing::positive(fan).lattice().clone();
        let mut d = GradedDecomposition::default();
        for c in &json.components {
            let t = fan.cone_by_label(&c.cone)?;
            d.insert_add(t, GroupRingElement::from_json(&c.element, lattice.clone())?);
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub components: Vec<ComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub cone: String,
    pub element: ElementJson,
}

/// The model SR(F) ⊗ R(T_H) with its W_H-action, where W_H permutes the
/// rays of F and acts on X*(T_H).
#[derive(Debug, Clone)]
pub struct GradedModel<'a> {
    fan: &'a Fan,
    full: SrRing,
    positive: SrRing,
    generators: Vec<usize>,
    translates: Vec<CosetTable>,
}

impl<'a> GradedModel<'a> {
    pub fn new(fan: &'a Fan) -> Result<Self, KringError> {
        let d = fan.datum();
        let generators = d
            .delta_l
            .iter()
            .map(|&i| d.weyl.generator_index(i))
            .chain((0..d.restricted_rank()).map(|k| d.restricted_reflection(k)))
            .collect();
        let translates = (0..fan.cones().len())
            .map(|t| {
                let stab = fan.cone_stabilizer(t)?;
                d.weyl.coset_representatives(&d.weyl_h, stab).map_err(FanError::from)
            })
            .collect::<Result<_, FanError>>()?;
        Ok(GradedModel { fan, full: SrRing::full(fan), positive: SrRing::positive(fan), generators, translates })
    }

    pub fn fan(&self) -> &Fan {
        self.fan
    }

    pub fn full(&self) -> &SrRing {
        &self.full
    }

    pub fn positive(&self) -> &SrRing {
        &self.positive
    }

    /// Generators of W_H: the simple reflections of Δ_L and s_α s_{θ(α)}.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Representatives of W_H/W_τ.
    pub fn translates(&self, tau: usize) -> &[usize] {
        self.translates[tau].representatives()
    }

    /// The action of w ∈ W_H on an element of SR(F) ⊗ R(T_H).
    pub fn act(&self, w: usize, f: &GroupRingElement) -> GroupRingElement {
        let d = self.fan.datum();
        let perm = self.fan.ray_permutation(d.restricted_index(w).expect("element of W_H"));
        let th = d.th_action(w).expect("element of W_H");
        let m = self.full.nrays();
        f.map_exponents(f.lattice().clone(), |e| {
            let mut out = vec![0; e.len()];
            for (j, &x) in e[..m].iter().enumerate() {
                out[perm[j]] = x;
            }
            out[m..].copy_from_slice(&th.apply(&e[m..]));
            out
        })
    }

    /// The first generator of W_H that moves the class of f, if any.
    pub fn non_invariance(&self, f: &GroupRingElement) -> Option<usize> {
        let n = self.full.normal_form(f).ok()?;
        self.moves_normal_form(&n)
    }

    fn moves_normal_form(&self, n: &GroupRingElement) -> Option<usize> {
        // W_H maps C_τ onto C_{wτ}, so translates of a normal form are normal forms
        self.generators.iter().copied().find(|&w| self.act(w, n) != *n)
    }

    /// Σ_{w ∈ W_H} w·f.
    pub fn symmetrize(&self, f: &GroupRingElement) -> GroupRingElement {
        let zero = GroupRingElement::zero(f.lattice().clone());
        self.fan.datum().weyl_h.iter().fold(zero, |acc, &w| &acc + &self.act(w, f))
    }

    /// Embeds an element of SR(F₊) ⊗ R(T_H) into SR(F) ⊗ R(T_H).
    pub fn to_full(&self, c: &GroupRingElement) -> GroupRingElement {
        let (mp, m) = (self.positive.nrays(), self.full.nrays());
        c.map_exponents(self.full.lattice().clone(), |e| {
            let mut out = e[..mp].to_vec();
            out.resize(m, 0);
            out.extend_from_slice(&e[mp..]);
            out
        })
    }

    /// Restricts to SR(F₊) ⊗ R(T_H); `None` if a ray outside F₊ occurs.
    pub fn to_positive(&self, f: &GroupRingElement) -> Option<GroupRingElement> {
        let (mp, m) = (self.positive.nrays(), self.full.nrays());
        if f.terms().any(|(e, _)| e[mp..m].iter().any(|&x| x != 0)) {
            return None;
        }
        Some(f.map_exponents(self.positive.lattice().clone(), |e| e[..mp].iter().chain(&e[m..]).copied().collect()))
    }

    /// The decomposition of a W_H-invariant element of SR(F) ⊗ R(T_H).
    pub fn decompose(&self, f: &GroupRingElement) -> Result<GradedDecomposition, KringError> {
        let comps = self.full.components(f)?;
        let zero = GroupRingElement::zero(self.full.lattice().clone());
        let normal = comps.iter().fold(zero, |acc, c| &acc + c);
        if let Some(w) = self.moves_normal_form(&normal) {
            return Err(KringError::NotInvariant(format!("moved by {}", self.fan.datum().weyl.word(w))));
        }
        let mut d = GradedDecomposition::default();
        for (t, c) in comps.into_iter().enumerate().take(self.fan.cones().len()) {
            if c.is_zero() {
                continue;
            }
            let pc = self
                .to_positive(&c)
                .ok_or_else(|| KringError::DecompositionResidual(format!("component at {} leaves F+", self.fan.cone_label(t))))?;
            for &w in self.fan.cone_stabilizer(t)? {
                if self.act(w, &c) != c {
                    return Err(KringError::DecompositionResidual(format!(
                        "component at {} is not W_tau-invariant",
                        self.fan.cone_label(t)
                    )));
                }
            }
            d.components.insert(t, pc);
        }
        let back = self.reassemble(&d);
        if back != normal {
            return Err(KringError::DecompositionResidual("reassembly differs from the input".into()));
        }
        Ok(d)
    }

    /// Σ_τ Σ_{w ∈ W_H/W_τ} w·c_τ.
    pub fn reassemble(&self, d: &GradedDecomposition) -> GroupRingElement {
        let parts: Vec<GroupRingElement> = d
            .components
            .par_iter()
            .map(|(&t, c)| {
                let full = self.to_full(c);
                let zero = GroupRingElement::zero(self.full.lattice().clone());
                self.translates(t).iter().fold(zero, |acc, &w| &acc + &self.act(w, &full))
            })
            .collect();
        let zero = GroupRingElement::zero(self.full.lattice().clone());
        parts.iter().fold(zero, |acc, p| &acc + p)
    }

    /// The product rule: C_τ·C_σ ⊆ C_γ when τ and σ span γ, and 0 otherwise.
    pub fn multiply(&self, a: &GradedDecomposition, b: &GradedDecomposition) -> GradedDecomposition {
        let mut out = GradedDecomposition::default();
        for (&t, x) in &a.components {
            for (&s, y) in &b.components {
                if let Some(g) = self.fan.join(t, s) {
                    out.insert_add(g, x * y);
                }
            }
        }
        out
    }
}

pub fn kg_decompose(fan: &Fan, f: &GroupRingElement) -> Result<GradedDecomposition, KringError> {
    GradedModel::new(fan)?.decompose(f)
}

pub fn graded_multiply(fan: &Fan, a: &GradedDecomposition, b: &GradedDecomposition) -> Result<GradedDecomposition, KringError> {
    Ok(GradedModel::new(fan)?.multiply(a, b))
}

/// Membership in F_τ = ⊕_{τ ≼ σ} C_σ ⊗ R(T_H)^{W_σ}.
pub fn filtration_membership(fan: &Fan, d: &GradedDecomposition, tau: usize) -> Result<bool, KringError> {
    fan.cone(tau)?;
    Ok(d.components.keys().all(|&s| fan.is_face(tau, s)))
}
