use std::sync::Arc;

use super::localization::{enumerate_fixed_points, LocalizationClass, Scope};
use super::stanley_reisner::SrRing;
use super::KringError;
use crate::fan::Fan;
use crate::group_ring::{GroupRingElement, GroupRingError};
use crate::lattice::Lattice;
use crate::root_datum::SymmetricDatum;

/// X*(T/T_H) ⊕ X*(T_H), with coordinates (g_1, …, g_r, b_1, …, b_k).
pub fn product_lattice(datum: &SymmetricDatum) -> Arc<Lattice> {
    let labels = datum
        .char_quotient
        .basis_labels
        .iter()
        .chain(&datum.char_th.basis_labels)
        .cloned()
        .collect();
    Arc::new(Lattice::new(format!("{}+{}", datum.char_quotient.name, datum.char_th.name), labels))
}

fn require(f: &GroupRingElement, lattice: &Lattice) -> Result<(), KringError> {
    if f.lattice().name != lattice.name || f.lattice().rank() != lattice.rank() {
        return Err(GroupRingError::LatticeMismatch { left: f.lattice().name.clone(), right: lattice.name.clone() }.into());
    }
    Ok(())
}

/// R(T) → R(T/T_H) ⊗ R(T_H), sending e^u to e^{(u − s(q(u)), q(u))}.
pub fn kiso_split(datum: &SymmetricDatum, f: &GroupRingElement) -> Result<GroupRingElement, KringError> {
    require(f, &datum.char_t)?;
    let target = product_lattice(datum);
    Ok(f.map_exponents(target, |u| {
        let b = datum.q.apply(u);
        let s = datum.section.apply(&b);
        let rest: Vec<i64> = u.iter().zip(&s).map(|(x, y)| x - y).collect();
        let mut out = datum.to_quotient(&rest).expect("u − s(q(u)) lies in ker q");
        out.extend(b);
        out
    }))
}

/// The inverse of [`kiso_split`]: e^{(a, b)} ↦ e^{Γa + s(b)}.
pub fn kiso_join(datum: &SymmetricDatum, f: &GroupRingElement) -> Result<GroupRingElement, KringError> {
    let source = product_lattice(datum);
    require(f, &source)?;
    let r = datum.restricted_rank();
    Ok(f.map_exponents(datum.char_t.clone(), |e| {
        let a = datum.gamma.apply(&e[..r]);
        let b = datum.section.apply(&e[r..]);
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }))
}

/// Restriction of an element of SR(F) ⊗ R(T_H) to the fixed points of Y:
/// at the point of the maximal cone δ of F, X_j ↦ e^{u_j} for the local
/// characters u_j of δ, and X_j ↦ 1 for rays outside δ.
pub fn sr_to_localization(fan: &Fan, f: &GroupRingElement) -> Result<LocalizationClass, KringError> {
    let sr = SrRing::full(fan);
    require(f, sr.lattice())?;
    let d = fan.datum();
    let m = sr.nrays();
    let r = d.restricted_rank();
    let product = product_lattice(d);
    let fps = enumerate_fixed_points(fan, Scope::Y);
    let values = fps
        .points()
        .iter()
        .map(|p| {
            let local = fan.full_local_characters(fan.translate(p.coset, p.cone));
            let g = f.map_exponents(product.clone(), |e| {
                let mut a = vec![0; r];
                for (j, u) in &local {
                    for (ai, ui) in a.iter_mut().zip(u) {
                        *ai += e[*j] * ui;
                    }
                }
                a.extend_from_slice(&e[m..]);
                a
            });
            kiso_join(d, &g)
        })
        .collect::<Result<_, _>>()?;
    Ok(LocalizationClass { scope: Scope::Y, values })
}

/// The element of SR(F) ⊗ R(T_H) in normal form whose restriction to the
/// fixed points of Y is the given class. Glues the restrictions ε_δ(f) read
/// off at each maximal cone δ of F along common faces.
pub fn localization_to_sr(fan: &Fan, class: &LocalizationClass, bound: i64) -> Result<GroupRingElement, KringError> {
    if class.scope != Scope::Y {
        return Err(KringError::ScopeMismatch { expected: Scope::Y });
    }
    let fps = enumerate_fixed_points(fan, Scope::Y);
    if class.values.len() != fps.len() {
        return Err(KringError::IndexMismatch { expected: fps.len(), found: class.values.len() });
    }
    let d = fan.datum();
    let sr = SrRing::full(fan);
    let r = d.restricted_rank();
    let m = sr.nrays();

    let mut maximal: Vec<(usize, GroupRingElement)> = Vec::with_capacity(fps.len());
    for (p, value) in fps.points().iter().zip(&class.values) {
        let delta = fan.translate(p.coset, p.cone);
        let rays = &fan.full_cones()[delta].rays;
        let split = kiso_split(d, value)?;
        let local = split.map_exponents(sr.lattice().clone(), |e| {
            let mut x = vec![0; m];
            for &j in rays {
                x[j] = fan.full_rays()[j].iter().zip(&e[..r]).map(|(v, a)| v * a).sum();
            }
            x.extend_from_slice(&e[r..]);
            x
        });
        maximal.push((delta, local));
    }

    let cones = sr.cones();
    let mut order: Vec<usize> = (0..cones.len()).collect();
    order.sort_by_key(|&t| cones[t].len());
    let zero = GroupRingElement::zero(sr.lattice().clone());
    let mut comps = vec![zero.clone(); cones.len()];
    for &t in &order {
        let tau = &cones[t];
        let mut restricted = maximal
            .iter()
            .filter(|(delta, _)| tau.iter().all(|j| cones[*delta].contains(j)))
            .map(|(_, e)| sr.restrict(e, tau));
        let first = restricted.next().expect("every cone lies in a maximal cone");
        if restricted.any(|e| e != first) {
            return Err(KringError::NotInImage(format!("restrictions disagree on the cone {:?}", tau)));
        }
        let mut c = first;
        for mask in 0..(1u32 << tau.len()) - 1 {
            let face: Vec<usize> = tau.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &j)| j).collect();
            c = &c - &comps[sr.cone_index(&face).expect("faces of cones are cones")];
        }
        comps[t] = c;
    }
    let f = comps.iter().fold(zero, |acc, c| &acc + c);
    if f.max_abs_exponent() > bound {
        return Err(KringError::NoPreimageInBox { bound });
    }
    Ok(f)
}
