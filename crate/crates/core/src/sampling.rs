//! Seeded random inputs for property checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group_ring::{orbit_sum, GroupRingElement};
use crate::kring::{GradedDecomposition, GradedModel};
use crate::lattice::Lattice;
use crate::root_datum::SymmetricDatum;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut impl Rng, len: usize, max_abs: i64) -> Vec<i64> {
    (0..len).map(|_| rng.gen_range(-max_abs..=max_abs)).collect()
}

/// Nonzero coefficients in [−max_coef, max_coef].
pub fn random_coefficient(rng: &mut impl Rng, max_coef: i64) -> i64 {
    let c = rng.gen_range(1..=max_coef);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

pub fn random_element(rng: &mut impl Rng, lattice: &Arc<Lattice>, terms: usize, max_exp: i64, max_coef: i64) -> GroupRingElement {
    let rank = lattice.rank();
    let terms: Vec<_> = (0..terms)
        .map(|_| (random_vector(rng, rank, max_exp), random_coefficient(rng, max_coef)))
        .collect();
    GroupRingElement::from_terms(lattice.clone(), terms).expect("exponents fit the lattice")
}

/// Σ c_i · Σ_{w∈W_H} e^{w(μ_i)} for random μ_i ∈ X*(T).
pub fn random_wh_orbit_sum(rng: &mut impl Rng, datum: &SymmetricDatum, terms: usize, max_exp: i64) -> GroupRingElement {
    let group: Vec<_> = datum.weyl_h.iter().map(|&w| datum.weyl.element(w).clone()).collect();
    let seed = random_element(rng, &datum.char_t, terms, max_exp, 3);
    orbit_sum(group.iter(), &seed)
}

/// A W_H-invariant element of SR(F) ⊗ R(T_H) in normal form.
pub fn random_invariant(rng: &mut impl Rng, model: &GradedModel, terms: usize, max_exp: i64) -> GroupRingElement {
    let seed = random_element(rng, model.full().lattice(), terms, max_exp, 3);
    model.full().normal_form(&model.symmetrize(&seed)).expect("same lattice")
}

/// A random element of C_τ ⊗ R(T_H)^{W_τ}: X_τ times the W_τ-symmetrization
/// of a polynomial in the generators of τ and R(T_H).
pub fn random_component(rng: &mut impl Rng, model: &GradedModel, tau: usize, terms: usize, max_exp: i64) -> GroupRingElement {
    let pos = model.positive();
    let rays = &pos.cones()[tau];
    let poly_terms: Vec<_> = (0..terms)
        .map(|_| {
            let mut x = vec![0; pos.nrays()];
            for &j in rays {
                x[j] = rng.gen_range(0..=max_exp);
            }
            let b = random_vector(rng, pos.th_rank(), max_exp);
            (x.into_iter().chain(b).collect(), random_coefficient(rng, 3))
        })
        .collect();
    let poly = GroupRingElement::from_terms(pos.lattice().clone(), poly_terms).expect("fits");
    let seed = model.to_full(&(&pos.x_product(rays) * &poly));
    let zero = GroupRingElement::zero(seed.lattice().clone());
    let sym = model
        .fan()
        .cone_stabilizer(tau)
        .expect("cone of F+")
        .iter()
        .fold(zero, |acc, &w| &acc + &model.act(w, &seed));
    model.to_positive(&sym).expect("W_tau preserves tau")
}

/// Random components at each of the given cones.
pub fn random_decomposition(rng: &mut impl Rng, model: &GradedModel, cones: &[usize], terms: usize, max_exp: i64) -> GradedDecomposition {
    let mut components = BTreeMap::new();
    for &t in cones {
        let c = random_component(rng, model, t, terms, max_exp);
        if !c.is_zero() {
            components.insert(t, c);
        }
    }
    GradedDecomposition { components }
}

/// A random element of F_τ: components at up to two random cones having τ
/// as a face.
pub fn random_filtered(rng: &mut impl Rng, model: &GradedModel, tau: usize, terms: usize, max_exp: i64) -> GradedDecomposition {
    let fan = model.fan();
    let above: Vec<usize> = (0..fan.cones().len()).filter(|&s| fan.is_face(tau, s)).collect();
    let cones: Vec<usize> = (0..2).map(|_| above[rng.gen_range(0..above.len())]).collect();
    random_decomposition(rng, model, &cones, terms, max_exp)
}
