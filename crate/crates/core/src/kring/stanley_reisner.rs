use std::collections::HashMap;
use std::sync::Arc;

use super::KringError;
use crate::fan::Fan;
use crate::group_ring::{packed, GroupRingElement, GroupRingError};
use crate::lattice::Lattice;

/// The Laurent ring Z[X_j^{±1}] ⊗ R(T_H) modulo the Stanley–Reisner ideal of
/// a simplicial fan, generated by X_F = ∏_{j∈F}(1 − X_j) for non-faces F.
///
/// Exponent vectors are (x_1, …, x_m, b_1, …, b_k).
#[derive(Debug, Clone)]
pub struct SrRing {
    lattice: Arc<Lattice>,
    nrays: usize,
    cones: Vec<Vec<usize>>,
    by_dim: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl SrRing {
    pub fn new(name: &str, nrays: usize, th_rank: usize, cones: Vec<Vec<usize>>) -> Self {
        let labels = (1..=nrays).map(|j| format!("X{j}")).chain((1..=th_rank).map(|i| format!("b{i}"))).collect();
        let mut by_dim: Vec<usize> = (0..cones.len()).collect();
        by_dim.sort_by_key(|&i| cones[i].len());
        let index = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        SrRing { lattice: Arc::new(Lattice::new(name, labels)), nrays, cones, by_dim, index }
    }

    /// The ring of the full fan F, cones indexed as in [`Fan::full_cones`].
    pub fn full(fan: &Fan) -> Self {
        let cones = fan.full_cones().iter().map(|c| c.rays.clone()).collect();
        Self::new("SR(F)", fan.full_rays().len(), fan.datum().h_rank(), cones)
    }

    /// The ring of F₊, cones indexed as in [`Fan::cones`].
    pub fn positive(fan: &Fan) -> Self {
        Self::new("SR(F+)", fan.rays().len(), fan.datum().h_rank(), fan.cones().to_vec())
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn nrays(&self) -> usize {
        self.nrays
    }

    pub fn th_rank(&self) -> usize {
        self.lattice.rank() - self.nrays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone_index(&self, rays: &[usize]) -> Option<usize> {
        self.index.get(rays).copied()
    }

    pub fn monomial(&self, x: &[i64], b: &[i64], coef: i64) -> GroupRingElement {
        let exp = x.iter().chain(b).copied().collect();
        GroupRingElement::monomial(self.lattice.clone(), exp, coef)
    }

    /// The generator X_j.
    pub fn x(&self, j: usize) -> GroupRingElement {
        let mut x = vec![0; self.nrays];
        x[j] = 1;
        self.monomial(&x, &vec![0; self.th_rank()], 1)
    }

    /// e^b for b ∈ X*(T_H).
    pub fn th_monomial(&self, b: &[i64]) -> GroupRingElement {
        self.monomial(&vec![0; self.nrays], b, 1)
    }

    /// X_F = ∏_{j∈F} (1 − X_j).
    pub fn x_product(&self, rays: &[usize]) -> GroupRingElement {
        let one = GroupRingElement::one(self.lattice.clone());
        rays.iter().fold(one.clone(), |acc, &j| &acc * &(&one - &self.x(j)))
    }

    /// ε_τ: sets X_j = 1 for every ray j outside τ.
    pub fn restrict(&self, f: &GroupRingElement, rays: &[usize]) -> GroupRingElement {
        let n = self.nrays;
        f.map_exponents(self.lattice.clone(), |e| {
            e.iter().enumerate().map(|(i, &x)| if i < n && !rays.contains(&i) { 0 } else { x }).collect()
        })
    }

    fn check(&self, f: &GroupRingElement) -> Result<(), KringError> {
        if f.lattice().name != self.lattice.name || f.lattice().rank() != self.lattice.rank() {
            return Err(GroupRingError::LatticeMismatch {
                left: f.lattice().name.clone(),
                right: self.lattice.name.clone(),
            }
            .into());
        }
        Ok(())
    }

    /// The decomposition f ≡ Σ_τ c_τ with c_τ ∈ C_τ ⊗ R(T_H), where
    /// c_τ = ε_τ(f) − Σ_{σ ⊊ τ} c_σ. Aligned with [`Self::cones`].
    ///
    /// Computed per monomial: the component of X^x e^b at τ is
    /// ∏_{j∈τ}(X_j^{x_j} − 1)·e^b when every ray of τ has x_j ≠ 0, else 0.
    pub fn components(&self, f: &GroupRingElement) -> Result<Vec<GroupRingElement>, KringError> {
        self.check(f)?;
        if f.packable() {
            return Ok(self.packed_components(f));
        }
        let mut sums: Vec<HashMap<Vec<i64>, i64>> = vec![HashMap::new(); self.cones.len()];
        for (e, c) in f.terms() {
            for (t, cone) in self.cones.iter().enumerate() {
                if cone.iter().any(|&j| e[j] == 0) {
                    continue;
                }
                let mut base = e.clone();
                for (j, x) in base[..self.nrays].iter_mut().enumerate() {
                    if !cone.contains(&j) {
                        *x = 0;
                    }
                }
                let k = cone.len();
                for mask in 0u32..(1 << k) {
                    let mut exp = base.clone();
                    for (i, &j) in cone.iter().enumerate() {
                        if mask & (1 << i) == 0 {
                            exp[j] = 0;
                        }
                    }
                    let sign = if (k - mask.count_ones() as usize) % 2 == 0 { 1 } else { -1 };
                    *sums[t].entry(exp).or_default() += sign * c;
                }
            }
        }
        sums.into_iter()
            .map(|m| Ok(GroupRingElement::from_terms(self.lattice.clone(), m)?))
            .collect()
    }

    fn packed_components(&self, f: &GroupRingElement) -> Vec<GroupRingElement> {
        let rank = self.lattice.rank();
        let bias = packed::bias(rank);
        let ray_lanes: Vec<u128> = (0..self.nrays).map(packed::lane).collect();
        let all_rays = ray_lanes.iter().fold(0, |a, &l| a | l);
        let mut sums: Vec<Vec<(u128, i64)>> = vec![Vec::new(); self.cones.len()];
        for (e, c) in f.terms() {
            let key = packed::pack(e);
            for (t, cone) in self.cones.iter().enumerate() {
                if cone.iter().any(|&j| e[j] == 0) {
                    continue;
                }
                let k = cone.len();
                for mask in 0u32..(1 << k) {
                    let keep = cone
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .fold(!all_rays, |acc, (_, &j)| acc | ray_lanes[j]);
                    let sign = if (k - mask.count_ones() as usize) % 2 == 0 { 1 } else { -1 };
                    sums[t].push(((key & keep) | (bias & !keep), sign * c));
                }
            }
        }
        sums.into_iter().map(|v| GroupRingElement::from_packed(self.lattice.clone(), v)).collect()
    }

    /// The recursion c_τ = ε_τ(f) − Σ_{σ ⊊ τ} c_σ, evaluated literally.
    pub fn components_by_recursion(&self, f: &GroupRingElement) -> Result<Vec<GroupRingElement>, KringError> {
        self.check(f)?;
        let zero = GroupRingElement::zero(self.lattice.clone());
        let mut out = vec![zero; self.cones.len()];
        for &t in &self.by_dim {
            let cone = &self.cones[t];
            let mut c = self.restrict(f, cone);
            for mask in 0..(1u32 << cone.len()) - 1 {
                let face: Vec<usize> =
                    cone.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &j)| j).collect();
                c = &c - &out[self.index[&face]];
            }
            out[t] = c;
        }
        Ok(out)
    }

    /// The canonical representative Σ_τ c_τ of the class of f.
    pub fn normal_form(&self, f: &GroupRingElement) -> Result<GroupRingElement, KringError> {
        let zero = GroupRingElement::zero(self.lattice.clone());
        Ok(self.components(f)?.iter().fold(zero, |acc, c| &acc + c))
    }

    pub fn equivalent(&self, f: &GroupRingElement, g: &GroupRingElement) -> Result<bool, KringError> {
        Ok(self.normal_form(&(f - g))?.is_zero())
    }

    /// Whether c lies in C_τ ⊗ R(T_H): only the generators of τ occur, and c
    /// vanishes under ε_σ for every facet σ of τ.
    pub fn in_component(&self, c: &GroupRingElement, tau: usize) -> bool {
        let cone = &self.cones[tau];
        let only_tau = c.terms().all(|(e, _)| (0..self.nrays).all(|j| e[j] == 0 || cone.contains(&j)));
        only_tau
            && (0..cone.len()).all(|skip| {
                let facet: Vec<usize> = cone.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &j)| j).collect();
                self.restrict(c, &facet).is_zero()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;

    #[test]
    fn non_faces_vanish() {
        let fan = catalog::pgl6_split();
        let sr = SrRing::positive(&fan);
        for nf in fan.minimal_non_faces() {
            assert!(sr.normal_form(&sr.x_product(&nf)).unwrap().is_zero());
        }
        let full = SrRing::full(&fan);
        for nf in fan.full_minimal_non_faces() {
            assert!(full.normal_form(&full.x_product(&nf)).unwrap().is_zero());
        }
    }

    #[test]
    fn cone_products_are_their_own_components() {
        let fan = catalog::pgl6_wonderful();
        let sr = SrRing::positive(&fan);
        for (t, cone) in sr.cones().iter().enumerate() {
            let x = sr.x_product(cone);
            assert!(sr.in_component(&x, t));
            let comps = sr.components(&x).unwrap();
            for (s, c) in comps.iter().enumerate() {
                assert_eq!(c.is_zero(), s != t, "cone {t}, component {s}");
            }
        }
    }

    fn small_element(sr: &SrRing) -> impl Strategy<Value = GroupRingElement> {
        let rank = sr.lattice().rank();
        let lattice = sr.lattice().clone();
        prop::collection::vec((prop::collection::vec(-2i64..=2, rank), -3i64..=3), 0..6)
            .prop_map(move |terms| GroupRingElement::from_terms(lattice.clone(), terms).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn normal_form_is_idempotent_and_agrees_on_maximal_cones(f in small_element(&SrRing::full(&catalog::pgl6_split()))) {
            let sr = SrRing::full(&catalog::pgl6_split());
            let n = sr.normal_form(&f).unwrap();
            prop_assert_eq!(sr.normal_form(&n).unwrap(), n.clone());
            for cone in sr.cones() {
                prop_assert_eq!(sr.restrict(&n, cone), sr.restrict(&f, cone));
            }
        }

        #[test]
        fn closed_form_matches_recursion(f in small_element(&SrRing::full(&catalog::pgl6_split())), shift in 0i64..70) {
            let sr = SrRing::full(&catalog::pgl6_split());
            let mut x = vec![0; sr.nrays()];
            x[0] = shift;
            let f = &f * &sr.monomial(&x, &vec![0; sr.th_rank()], 1);
            prop_assert_eq!(sr.components(&f).unwrap(), sr.components_by_recursion(&f).unwrap());
        }

        #[test]
        fn normal_form_is_a_ring_map(
            f in small_element(&SrRing::positive(&catalog::pgl6_split())),
            g in small_element(&SrRing::positive(&catalog::pgl6_split())),
        ) {
            let sr = SrRing::positive(&catalog::pgl6_split());
            let lhs = sr.normal_form(&(&f * &g)).unwrap();
            let rhs = sr.normal_form(&(&sr.normal_form(&f).unwrap() * &sr.normal_form(&g).unwrap())).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
