//! Smooth fans subdividing the positive restricted Weyl chamber, and their
//! translates under the restricted Weyl group.
//!
//! Rays are written in the coweight basis of X_*(T/T_H) dual to the restricted
//! simple roots, so the positive chamber is the positive orthant.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{gcd, kernel_basis, IntMatrix};
use crate::root_datum::{DatumError, SymmetricDatum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("not smooth: {0}")]
    NotSmooth(String),
    #[error("not a subdivision of the positive chamber: {0}")]
    NotSubdivision(String),
    #[error("ray {0:?} lies outside the positive chamber")]
    NotInChamber(Vec<i64>),
    #[error("cone {0} is not in the fan")]
    ConeNotInFan(String),
    #[error(transparent)]
    Datum(#[from] DatumError),
}

/// User-supplied subdivision: rays and maximal cones (as ray indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionSpec {
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

/// A cone of the full fan, recorded as the translate `w·τ` of a cone τ of
/// F₊ with the first such `w` in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullCone {
    pub rays: Vec<usize>,
    /// Index into the restricted Weyl group.
    pub w: usize,
    /// Index of τ among the cones of F₊.
    pub tau: usize,
}

/// A smooth subdivision F₊ of the positive chamber together with its
/// W_{G/H}-translates.
#[derive(Debug)]
pub struct Fan {
    datum: Arc<SymmetricDatum>,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    cone_index: HashMap<Vec<usize>, usize>,
    maximal: Vec<usize>,
    full_rays: Vec<Vec<i64>>,
    ray_perm: Vec<Vec<usize>>,
    full_cones: Vec<FullCone>,
    full_index: HashMap<Vec<usize>, usize>,
    stabilizers: OnceLock<Vec<Vec<usize>>>,
}

pub fn cone_label(rays: &[usize]) -> String {
    let inner: Vec<String> = rays.iter().map(usize::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Parses a label produced by [`cone_label`].
pub fn parse_cone_label(label: &str) -> Option<Vec<usize>> {
    let inner = label.trim().strip_prefix('{')?.strip_suffix('}')?.trim();
    if inner.is_empty() {
        return Some(Vec::new());
    }
    let mut rays: Vec<usize> = inner.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
    rays.sort_unstable();
    Some(rays)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Fan {
    /// The wonderful fan: F₊ is the positive chamber with all its faces.
    pub fn wonderful(datum: Arc<SymmetricDatum>) -> Result<Self, FanError> {
        let r = datum.restricted_rank();
        let rays = (0..r)
            .map(|i| {
                let mut e = vec![0; r];
                e[i] = 1;
                e
            })
            .collect();
        Self::build(datum, rays, vec![(0..r).collect()])
    }

    pub fn new(datum: Arc<SymmetricDatum>, subdivision: Option<&SubdivisionSpec>) -> Result<Self, FanError> {
        match subdivision {
            None => Self::wonderful(datum),
            Some(s) => Self::build(datum, s.rays.clone(), s.max_cones.clone()),
        }
    }

    fn build(datum: Arc<SymmetricDatum>, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        let r = datum.restricted_rank();
        validate_subdivision(r, &rays, &max_cones)?;

        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for m in &max_cones {
            let mut m = m.clone();
            m.sort_unstable();
            for mask in 0u32..(1 << m.len()) {
                faces.insert(m.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &j)| j).collect());
            }
        }
        let mut cones: Vec<Vec<usize>> = faces.into_iter().collect();
        cones.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let cone_index: HashMap<Vec<usize>, usize> = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let maximal: Vec<usize> = (0..cones.len()).filter(|&i| cones[i].len() == r).collect();

        // translates of rays and cones
        let mut full_rays = rays.clone();
        for m in &datum.coweight_action {
            for v in &rays {
                let image = m.apply(v);
                if !full_rays.contains(&image) {
                    full_rays.push(image);
                }
            }
        }
        let ray_perm: Vec<Vec<usize>> = datum
            .coweight_action
            .iter()
            .map(|m| {
                full_rays
                    .iter()
                    .map(|v| {
                        let image = m.apply(v);
                        full_rays.iter().position(|x| *x == image).expect("ray orbits are closed")
                    })
                    .collect()
            })
            .collect();
        let mut full_cones = Vec::new();
        let mut full_index = HashMap::new();
        for (w, perm) in ray_perm.iter().enumerate() {
            for (tau, c) in cones.iter().enumerate() {
                let mut image: Vec<usize> = c.iter().map(|&j| perm[j]).collect();
                image.sort_unstable();
                if !full_index.contains_key(&image) {
                    full_index.insert(image.clone(), full_cones.len());
                    full_cones.push(FullCone { rays: image, w, tau });
                }
            }
        }
        Ok(Fan {
            datum,
            rays,
            cones,
            cone_index,
            maximal,
            full_rays,
            ray_perm,
            full_cones,
            full_index,
            stabilizers: OnceLock::new(),
        })
    }

    pub fn datum(&self) -> &Arc<SymmetricDatum> {
        &self.datum
    }

    pub fn dim(&self) -> usize {
        self.datum.restricted_rank()
    }

    /// Rays of F₊.
    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    /// Cones of F₊ by dimension, then lexicographically; the zero cone first.
    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn cone(&self, i: usize) -> Result<&[usize], FanError> {
        self.cones.get(i).map(Vec::as_slice).ok_or_else(|| FanError::ConeNotInFan(format!("#{i}")))
    }

    pub fn cone_label(&self, i: usize) -> String {
        cone_label(&self.cones[i])
    }

    pub fn find_cone(&self, rays: &[usize]) -> Option<usize> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.cone_index.get(&key).copied()
    }

    /// Index of a cone of F₊ from its label, e.g. `{0,1}`.
    pub fn cone_by_label(&self, label: &str) -> Result<usize, FanError> {
        parse_cone_label(label)
            .and_then(|rays| self.find_cone(&rays))
            .ok_or_else(|| FanError::ConeNotInFan(label.to_string()))
    }

    /// Indices of the maximal cones F₊(r).
    pub fn maximal_cones(&self) -> &[usize] {
        &self.maximal
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.cones.get(i).is_some_and(|c| c.len() == self.dim())
    }

    fn require_maximal(&self, i: usize) -> Result<&[usize], FanError> {
        if self.is_maximal(i) {
            Ok(&self.cones[i])
        } else {
            Err(FanError::ConeNotInFan(format!("#{i} (not maximal)")))
        }
    }

    /// Whether cone `a` is a face of cone `b` (both of F₊).
    pub fn is_face(&self, a: usize, b: usize) -> bool {
        self.cones[a].iter().all(|j| self.cones[b].contains(j))
    }

    /// The cone of F₊ spanned by two cones, if their rays span one.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let union: BTreeSet<usize> = self.cones[a].iter().chain(&self.cones[b]).copied().collect();
        self.find_cone(&union.into_iter().collect::<Vec<_>>())
    }

    /// Rays of the full fan F; the rays of F₊ come first with the same indices.
    pub fn full_rays(&self) -> &[Vec<i64>] {
        &self.full_rays
    }

    /// Cones of F; the cones of F₊ come first with the same indices.
    pub fn full_cones(&self) -> &[FullCone] {
        &self.full_cones
    }

    pub fn find_full_cone(&self, rays: &[usize]) -> Option<usize> {
        let mut key = rays.to_vec();
        key.sort_unstable();
        self.full_index.get(&key).copied()
    }

    /// Permutation of the rays of F induced by a restricted Weyl group element.
    pub fn ray_permutation(&self, restricted: usize) -> &[usize] {
        &self.ray_perm[restricted]
    }

    /// Image of a cone of F₊ under `w ∈ W_H`, as an index into the full cones.
    pub fn translate(&self, w: usize, tau: usize) -> usize {
        let k = self.datum.restricted_index(w).expect("element of W_H");
        let perm = &self.ray_perm[k];
        let image: Vec<usize> = self.cones[tau].iter().map(|&j| perm[j]).collect();
        self.find_full_cone(&image).expect("fan is closed under W_H")
    }

    /// W_τ = {w ∈ W_H : w(τ) = τ}, as indices into the Weyl group.
    pub fn cone_stabilizer(&self, tau: usize) -> Result<&[usize], FanError> {
        self.cone(tau)?;
        let all = self.stabilizers.get_or_init(|| {
            self.cones
                .iter()
                .map(|c| {
                    let set: BTreeSet<usize> = c.iter().copied().collect();
                    self.datum
                        .weyl_h
                        .iter()
                        .copied()
                        .filter(|&w| {
                            let perm = &self.ray_perm[self.datum.restricted_index(w).expect("W_H")];
                            c.iter().map(|&j| perm[j]).collect::<BTreeSet<_>>() == set
                        })
                        .collect()
                })
                .collect()
        });
        Ok(&all[tau])
    }

    /// Indices k such that σ has a facet in the wall γ_k^⊥.
    pub fn facet_orthogonal_restricted_roots(&self, sigma: usize) -> Result<Vec<usize>, FanError> {
        let cone = self.require_maximal(sigma)?;
        let r = self.dim();
        Ok((0..r)
            .filter(|&k| cone.iter().filter(|&&j| self.rays[j][k] == 0).count() == r - 1)
            .collect())
    }

    /// The primitive character vanishing on the common facet of σ and σ′,
    /// positive on the ray of σ′ outside it.
    pub fn shared_facet_character(&self, sigma: usize, sigma2: usize) -> Result<Option<Vec<i64>>, FanError> {
        let a = self.require_maximal(sigma)?;
        let b = self.require_maximal(sigma2)?;
        if sigma == sigma2 {
            return Ok(None);
        }
        let facet: Vec<usize> = a.iter().copied().filter(|j| b.contains(j)).collect();
        if facet.len() + 1 != self.dim() {
            return Ok(None);
        }
        let extra = *b.iter().find(|j| !facet.contains(j)).expect("σ′ has one more ray");
        let chi = facet_normal(self.dim(), &facet.iter().map(|&j| self.rays[j].clone()).collect::<Vec<_>>());
        let s = dot(&chi, &self.rays[extra]).signum();
        Ok(Some(chi.iter().map(|x| x * s).collect()))
    }

    /// Pairs (σ, σ′, χ) of distinct maximal cones sharing a facet, σ < σ′.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize, Vec<i64>)> {
        let mut out = Vec::new();
        for (i, &a) in self.maximal.iter().enumerate() {
            for &b in &self.maximal[i + 1..] {
                if let Ok(Some(chi)) = self.shared_facet_character(a, b) {
                    out.push((a, b, chi));
                }
            }
        }
        out
    }

    /// For a maximal cone given by ray vectors, the dual basis of characters:
    /// entry `i` pairs to 1 with ray `i` and to 0 with the others.
    pub fn dual_characters(rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = rays.len();
        let v = IntMatrix::from_columns(n, rays).expect("square");
        let inv = v.inverse_unimodular().expect("smooth cone");
        (0..n).map(|i| inv.row(i).to_vec()).collect()
    }

    /// Local characters of a maximal cone of F₊, one per ray, in cone order.
    pub fn local_characters(&self, sigma: usize) -> Result<Vec<(usize, Vec<i64>)>, FanError> {
        let cone = self.require_maximal(sigma)?;
        let rays: Vec<Vec<i64>> = cone.iter().map(|&j| self.rays[j].clone()).collect();
        Ok(cone.iter().copied().zip(Self::dual_characters(&rays)).collect())
    }

    /// Local characters of a maximal cone of the full fan.
    pub fn full_local_characters(&self, full: usize) -> Vec<(usize, Vec<i64>)> {
        let cone = &self.full_cones[full].rays;
        let rays: Vec<Vec<i64>> = cone.iter().map(|&j| self.full_rays[j].clone()).collect();
        cone.iter().copied().zip(Self::dual_characters(&rays)).collect()
    }

    /// Minimal sets of rays of F₊ that do not span a cone.
    pub fn minimal_non_faces(&self) -> Vec<Vec<usize>> {
        minimal_non_faces(self.rays.len(), |s| self.find_cone(s).is_some())
    }

    /// Minimal sets of rays of F that do not span a cone.
    pub fn full_minimal_non_faces(&self) -> Vec<Vec<usize>> {
        minimal_non_faces(self.full_rays.len(), |s| self.find_full_cone(s).is_some())
    }

    /// Whether F₊ is the chamber itself with its faces.
    pub fn is_wonderful(&self) -> bool {
        self.maximal.len() == 1 && self.rays.len() == self.dim()
    }
}

fn minimal_non_faces(nrays: usize, is_cone: impl Fn(&[usize]) -> bool) -> Vec<Vec<usize>> {
    // grow candidates level by level from cones; a minimal non-face has all
    // its maximal proper subsets spanning cones
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut level: Vec<Vec<usize>> = (0..nrays).map(|j| vec![j]).filter(|s| is_cone(s)).collect();
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for c in &level {
            for j in (c.last().copied().unwrap_or(0) + 1)..nrays {
                let mut s = c.clone();
                s.push(j);
                let subsets_are_cones = (0..s.len()).all(|drop| {
                    let sub: Vec<usize> = s.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, &x)| x).collect();
                    is_cone(&sub)
                });
                if !subsets_are_cones {
                    continue;
                }
                if is_cone(&s) {
                    next.insert(s);
                } else {
                    out.insert(s);
                }
            }
        }
        level = next.into_iter().collect();
    }
    out.into_iter().collect()
}

/// The primitive integer normal of the hyperplane spanned by `facet` in Z^r.
fn facet_normal(r: usize, facet: &[Vec<i64>]) -> Vec<i64> {
    if facet.is_empty() {
        debug_assert_eq!(r, 1);
        return vec![1];
    }
    let m = IntMatrix::from_rows(facet).expect("rays of equal length");
    let k = kernel_basis(&m);
    debug_assert_eq!(k.cols(), 1);
    k.column(0)
}

fn validate_subdivision(r: usize, rays: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Result<(), FanError> {
    for v in rays {
        if v.len() != r {
            return Err(FanError::NotSubdivision(format!("ray {v:?} does not have {r} coordinates")));
        }
        if v.iter().any(|&x| x < 0) {
            return Err(FanError::NotInChamber(v.clone()));
        }
        let g = v.iter().fold(0, |g, &x| gcd(g, x));
        if g == 0 {
            return Err(FanError::NotSubdivision("zero ray".into()));
        }
        if g != 1 {
            return Err(FanError::NotSmooth(format!("ray {v:?} is not primitive")));
        }
    }
    let distinct: BTreeSet<&Vec<i64>> = rays.iter().collect();
    if distinct.len() != rays.len() {
        return Err(FanError::NotSubdivision("repeated ray".into()));
    }
    if max_cones.is_empty() {
        return Err(FanError::NotSubdivision("no maximal cones".into()));
    }
    let mut seen = BTreeSet::new();
    let mut used = vec![false; rays.len()];
    let mut volume = Ratio::<i128>::from_integer(0);
    for c in max_cones {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != r || c.len() != r || sorted.iter().any(|&j| j >= rays.len()) {
            return Err(FanError::NotSubdivision(format!("cone {c:?} is not spanned by {r} distinct rays")));
        }
        if !seen.insert(sorted.clone()) {
            return Err(FanError::NotSubdivision(format!("cone {c:?} repeated")));
        }
        let cols: Vec<Vec<i64>> = sorted.iter().map(|&j| rays[j].clone()).collect();
        let det = IntMatrix::from_columns(r, &cols).expect("square").determinant();
        if det.abs() != 1 {
            return Err(FanError::NotSmooth(format!("cone {c:?} has determinant {det}")));
        }
        let denom: i128 = cols.iter().map(|v| v.iter().map(|&x| i128::from(x)).sum::<i128>()).product();
        volume += Ratio::new(1, denom);
        for &j in &sorted {
            used[j] = true;
        }
    }
    if let Some(j) = used.iter().position(|u| !u) {
        return Err(FanError::NotSubdivision(format!("ray {j} lies in no maximal cone")));
    }
    if volume != Ratio::from_integer(1) {
        return Err(FanError::NotSubdivision(format!("cones cover the chamber with total volume {volume}")));
    }
    // facet incidences: interior facets separate two cones, boundary facets bound one
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for c in &seen {
        for &drop in c {
            let facet: Vec<usize> = c.iter().copied().filter(|&j| j != drop).collect();
            facets.entry(facet).or_default().push(drop);
        }
    }
    for (facet, opposite) in &facets {
        let on_wall = (0..r).any(|k| facet.iter().all(|&j| rays[j][k] == 0));
        if on_wall {
            if opposite.len() != 1 {
                return Err(FanError::NotSubdivision(format!("boundary facet {facet:?} bounds {} cones", opposite.len())));
            }
            continue;
        }
        if opposite.len() != 2 {
            return Err(FanError::NotSubdivision(format!("interior facet {facet:?} bounds {} cones", opposite.len())));
        }
        let normal = facet_normal(r, &facet.iter().map(|&j| rays[j].clone()).collect::<Vec<_>>());
        let s0 = dot(&normal, &rays[opposite[0]]).signum();
        let s1 = dot(&normal, &rays[opposite[1]]).signum();
        if s0 * s1 != -1 {
            return Err(FanError::NotSubdivision(format!("cones on facet {facet:?} overlap")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{CartanFamily, CartanType};

    fn pgl6() -> Arc<SymmetricDatum> {
        let theta = IntMatrix::from_rows(&[
            vec![1, -1, 0, 0, 0],
            vec![0, -1, 0, 0, 0],
            vec![0, -1, 1, -1, 0],
            vec![0, 0, 0, -1, 0],
            vec![0, 0, 0, -1, 1],
        ])
        .unwrap();
        Arc::new(SymmetricDatum::build(CartanType::new(CartanFamily::A, 5).unwrap(), false, theta).unwrap())
    }

    fn split() -> SubdivisionSpec {
        SubdivisionSpec { rays: vec![vec![1, 0], vec![0, 1], vec![1, 1]], max_cones: vec![vec![0, 2], vec![1, 2]] }
    }

    #[test]
    fn wonderful_pgl6() {
        let fan = Fan::wonderful(pgl6()).unwrap();
        assert_eq!(fan.cones().len(), 4);
        assert_eq!(fan.maximal_cones().len(), 1);
        assert_eq!(fan.rays(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(fan.full_rays().len(), 6);
        assert_eq!(fan.full_cones().len(), 13);
        assert!(fan.is_wonderful());
    }

    #[test]
    fn stabilizers_pgl6() {
        let d = pgl6();
        let fan = Fan::wonderful(d.clone()).unwrap();
        assert_eq!(fan.cone_stabilizer(0).unwrap().len(), 48);
        let sigma = fan.maximal_cones()[0];
        assert_eq!(fan.cone_stabilizer(sigma).unwrap(), d.weyl_l.as_slice());
        let rho1 = fan.find_cone(&[0]).unwrap();
        let stab = fan.cone_stabilizer(rho1).unwrap();
        assert_eq!(stab.len(), 16);
        // W_L ⋊ ⟨s_{γ2}⟩
        assert!(stab.contains(&d.restricted_reflection(1)));
        assert!(!stab.contains(&d.restricted_reflection(0)));
        assert!(fan.cone_stabilizer(99).is_err());
    }

    #[test]
    fn split_fan() {
        let fan = Fan::new(pgl6(), Some(&split())).unwrap();
        assert_eq!(fan.maximal_cones().len(), 2);
        let a = fan.find_cone(&[0, 2]).unwrap();
        let b = fan.find_cone(&[1, 2]).unwrap();
        assert_eq!(fan.facet_orthogonal_restricted_roots(a).unwrap(), vec![1]);
        assert_eq!(fan.facet_orthogonal_restricted_roots(b).unwrap(), vec![0]);
        let chi = fan.shared_facet_character(a, b).unwrap().unwrap();
        assert_eq!(dot(&chi, &[1, 1]), 0);
        assert_eq!(chi, vec![-1, 1]);
        let back = fan.shared_facet_character(b, a).unwrap().unwrap();
        assert_eq!(back, vec![1, -1]);
        assert_eq!(fan.shared_facet_character(a, a).unwrap(), None);
        assert_eq!(fan.minimal_non_faces(), vec![vec![0, 1]]);
    }

    #[test]
    fn wonderful_facets() {
        let fan = Fan::wonderful(pgl6()).unwrap();
        let s = fan.maximal_cones()[0];
        assert_eq!(fan.facet_orthogonal_restricted_roots(s).unwrap(), vec![0, 1]);
        assert!(fan.adjacent_pairs().is_empty());
        assert!(fan.minimal_non_faces().is_empty());
    }

    #[test]
    fn rank_one_wonderful() {
        let d = Arc::new(SymmetricDatum::build_group_case(CartanType::new(CartanFamily::A, 1).unwrap()).unwrap());
        let fan = Fan::wonderful(d).unwrap();
        let s = fan.maximal_cones()[0];
        assert_eq!(fan.facet_orthogonal_restricted_roots(s).unwrap(), vec![0]);
        assert_eq!(fan.full_rays(), &[vec![1], vec![-1]]);
    }

    #[test]
    fn rejects_bad_subdivisions() {
        let d = pgl6();
        let not_primitive = SubdivisionSpec { rays: vec![vec![2, 0], vec![0, 1]], max_cones: vec![vec![0, 1]] };
        assert!(matches!(Fan::new(d.clone(), Some(&not_primitive)), Err(FanError::NotSmooth(_))));
        let outside = SubdivisionSpec { rays: vec![vec![1, 0], vec![-1, 1]], max_cones: vec![vec![0, 1]] };
        assert!(matches!(Fan::new(d.clone(), Some(&outside)), Err(FanError::NotInChamber(_))));
        let singular = SubdivisionSpec {
            rays: vec![vec![1, 0], vec![0, 1], vec![1, 2]],
            max_cones: vec![vec![0, 2], vec![1, 2]],
        };
        assert!(matches!(Fan::new(d.clone(), Some(&singular)), Err(FanError::NotSmooth(_))));
        let partial = SubdivisionSpec { rays: vec![vec![1, 0], vec![1, 1]], max_cones: vec![vec![0, 1]] };
        assert!(matches!(Fan::new(d.clone(), Some(&partial)), Err(FanError::NotSubdivision(_))));
        let overlap = SubdivisionSpec {
            rays: vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            max_cones: vec![vec![0, 1], vec![0, 2]],
        };
        assert!(matches!(Fan::new(d, Some(&overlap)), Err(FanError::NotSubdivision(_))));
    }

    #[test]
    fn translates_stay_in_fan() {
        let d = pgl6();
        let fan = Fan::new(d.clone(), Some(&split())).unwrap();
        for &w in &d.weyl_h {
            for tau in 0..fan.cones().len() {
                let image = fan.translate(w, tau);
                assert_eq!(fan.full_cones()[image].tau, tau);
            }
        }
        for tau in 0..fan.cones().len() {
            let stab = fan.cone_stabilizer(tau).unwrap();
            assert!(d.weyl_l.iter().all(|w| stab.contains(w)));
        }
    }

    #[test]
    fn labels() {
        assert_eq!(cone_label(&[]), "{}");
        assert_eq!(cone_label(&[0, 2]), "{0,2}");
        assert_eq!(parse_cone_label("{2, 0}"), Some(vec![0, 2]));
        assert_eq!(parse_cone_label("{}"), Some(vec![]));
        assert_eq!(parse_cone_label("0,2"), None);
    }
}
