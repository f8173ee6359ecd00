//! Sparse elements of integral group rings Z[L] of lattices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{gcd, smith_normal_form, IntMatrix, Lattice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupRingError {
    #[error("lattice mismatch: {left} vs {right}")]
    LatticeMismatch { left: String, right: String },
    #[error("congruence modulo the zero character")]
    ZeroCharacter,
    #[error("exponent of length {found} in a lattice of rank {rank}")]
    BadExponent { rank: usize, found: usize },
}

/// A finitely supported map from lattice points to nonzero integers,
/// read as Σ c_u e^u.
#[derive(Clone)]
pub struct GroupRingElement {
    lattice: Arc<Lattice>,
    terms: BTreeMap<Vec<i64>, i64>,
}

const PACKED_LANES: usize = 16;
const PACKED_BIAS: i64 = 64;

/// Exponent vectors of rank ≤ 16 with entries in (−64, 64), one biased
/// byte per coordinate.
pub(crate) mod packed {
    use super::PACKED_BIAS;

    pub fn bias(rank: usize) -> u128 {
        (0..rank).fold(0, |acc, i| acc | ((PACKED_BIAS as u128) << (8 * i)))
    }

    pub fn pack(e: &[i64]) -> u128 {
        e.iter().enumerate().fold(0u128, |acc, (i, &x)| acc | (((x + PACKED_BIAS) as u128) << (8 * i)))
    }

    pub fn unpack(k: u128, rank: usize) -> Vec<i64> {
        (0..rank).map(|i| ((k >> (8 * i)) & 0xff) as i64 - PACKED_BIAS).collect()
    }

    /// Mask selecting the lane of coordinate `i`.
    pub fn lane(i: usize) -> u128 {
        0xff << (8 * i)
    }
}

fn same_lattice(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
    Arc::ptr_eq(a, b) || (a.name == b.name && a.rank() == b.rank())
}

impl GroupRingElement {
    pub fn zero(lattice: Arc<Lattice>) -> Self {
        GroupRingElement { lattice, terms: BTreeMap::new() }
    }

    pub fn constant(lattice: Arc<Lattice>, c: i64) -> Self {
        let rank = lattice.rank();
        Self::monomial(lattice, vec![0; rank], c)
    }

    pub fn one(lattice: Arc<Lattice>) -> Self {
        Self::constant(lattice, 1)
    }

    /// `coef · e^exp`.
    pub fn monomial(lattice: Arc<Lattice>, exp: Vec<i64>, coef: i64) -> Self {
        assert_eq!(exp.len(), lattice.rank(), "exponent length does not match lattice rank");
        let mut terms = BTreeMap::new();
        if coef != 0 {
            terms.insert(exp, coef);
        }
        GroupRingElement { lattice, terms }
    }

    pub fn from_terms(
        lattice: Arc<Lattice>,
        terms: impl IntoIterator<Item = (Vec<i64>, i64)>,
    ) -> Result<Self, GroupRingError> {
        let mut f = Self::zero(lattice);
        for (exp, c) in terms {
            if exp.len() != f.lattice.rank() {
                return Err(GroupRingError::BadExponent { rank: f.lattice.rank(), found: exp.len() });
            }
            f.add_term(exp, c);
        }
        Ok(f)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// Terms in lexicographic order of exponents.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, i64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[i64]) -> i64 {
        self.terms.get(exp).copied().unwrap_or(0)
    }

    /// Sum of all coefficients (the value at the identity of the torus).
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Largest absolute value of an exponent coordinate.
    pub fn max_abs_exponent(&self) -> i64 {
        self.terms.keys().flat_map(|e| e.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exp: Vec<i64>, coef: i64) {
        if coef == 0 {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), GroupRingError> {
        if same_lattice(&self.lattice, &other.lattice) {
            Ok(())
        } else {
            Err(GroupRingError::LatticeMismatch {
                left: format!("{}[{}]", self.lattice.name, self.lattice.rank()),
                right: format!("{}[{}]", other.lattice.name, other.lattice.rank()),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GroupRingError> {
        self.check(other)?;
        let rank = self.lattice.rank();
        if rank <= PACKED_LANES && self.max_abs_exponent() + other.max_abs_exponent() < PACKED_BIAS {
            return Ok(self.packed_mul(other));
        }
        let mut sums: HashMap<Vec<i64>, i64> = HashMap::new();
        for (a, &c) in &self.terms {
            for (b, &d) in &other.terms {
                let e: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                *sums.entry(e).or_default() += c * d;
            }
        }
        let terms = sums.into_iter().filter(|&(_, c)| c != 0).collect();
        Ok(GroupRingElement { lattice: self.lattice.clone(), terms })
    }

    /// Multiplication with exponent vectors packed into biased 8-bit lanes of
    /// a u128, so that adding exponents is one integer addition.
    fn packed_mul(&self, other: &Self) -> Self {
        let rank = self.lattice.rank();
        let bias = packed::bias(rank);
        let left: Vec<(u128, i64)> = self.terms.iter().map(|(e, &c)| (packed::pack(e), c)).collect();
        let right: Vec<(u128, i64)> = other.terms.iter().map(|(e, &c)| (packed::pack(e), c)).collect();
        let mut products: Vec<(u128, i64)> = Vec::with_capacity(left.len() * right.len());
        for &(a, c) in &left {
            for &(b, d) in &right {
                products.push((a + b - bias, c * d));
            }
        }
        Self::from_packed(self.lattice.clone(), products)
    }

    /// Sums packed terms into an element.
    pub(crate) fn from_packed(lattice: Arc<Lattice>, mut terms: Vec<(u128, i64)>) -> Self {
        let rank = lattice.rank();
        terms.sort_unstable_by_key(|&(k, _)| k);
        let mut out = Vec::new();
        let mut iter = terms.into_iter().peekable();
        while let Some((k, mut c)) = iter.next() {
            while let Some(&(k2, c2)) = iter.peek() {
                if k2 != k {
                    break;
                }
                c += c2;
                iter.next();
            }
            if c != 0 {
                out.push((packed::unpack(k, rank), c));
            }
        }
        GroupRingElement { lattice, terms: out.into_iter().collect() }
    }

    /// Whether every exponent fits a packed lane with room for one addition.
    pub(crate) fn packable(&self) -> bool {
        self.lattice.rank() <= PACKED_LANES && self.max_abs_exponent() < PACKED_BIAS / 2
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero(self.lattice.clone());
        }
        GroupRingElement { lattice: self.lattice.clone(), terms: self.terms.iter().map(|(e, &c)| (e.clone(), c * k)).collect() }
    }

    /// Relabels exponents u ↦ w·u.
    pub fn act(&self, w: &IntMatrix) -> Self {
        assert!(w.is_square() && w.rows() == self.lattice.rank(), "action matrix does not fit the lattice");
        self.map_exponents(self.lattice.clone(), |u| w.apply(u))
    }

    /// Pushes forward along a map of lattices (exponent-wise).
    pub fn map_exponents(&self, target: Arc<Lattice>, f: impl Fn(&[i64]) -> Vec<i64>) -> Self {
        let mut out = Self::zero(target);
        for (e, &c) in &self.terms {
            out.add_term(f(e), c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.lattice.clone()), |acc, _| &acc * self)
    }

    /// Moves the element to another lattice of the same rank.
    pub fn relabel(&self, lattice: Arc<Lattice>) -> Self {
        assert_eq!(lattice.rank(), self.lattice.rank());
        GroupRingElement { lattice, terms: self.terms.clone() }
    }
}

impl PartialEq for GroupRingElement {
    fn eq(&self, other: &Self) -> bool {
        same_lattice(&self.lattice, &other.lattice) && self.terms == other.terms
    }
}

impl Eq for GroupRingElement {}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{c}*e^{e:?}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr for &GroupRingElement {
            type Output = GroupRingElement;
            fn $m(self, rhs: &GroupRingElement) -> GroupRingElement {
                self.$checked(rhs).expect("group ring operands live on different lattices")
            }
        }
        impl $tr for GroupRingElement {
            type Output = GroupRingElement;
            fn $m(self, rhs: GroupRingElement) -> GroupRingElement {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        self.scale(-1)
    }
}

/// Serialized form: `{"lattice": name, "terms": [{"exp": [...], "coef": n}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub lattice: String,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<i64>,
    pub coef: i64,
}

impl GroupRingElement {
    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            lattice: self.lattice.name.clone(),
            terms: self.terms.iter().map(|(e, &c)| TermJson { exp: e.clone(), coef: c }).collect(),
        }
    }

    pub fn from_json(json: &ElementJson, lattice: Arc<Lattice>) -> Result<Self, GroupRingError> {
        if json.lattice != lattice.name {
            return Err(GroupRingError::LatticeMismatch { left: json.lattice.clone(), right: lattice.name.clone() });
        }
        Self::from_terms(lattice, json.terms.iter().map(|t| (t.exp.clone(), t.coef)))
    }
}

/// Coordinates adapted to a primitive character χ₀: an exponent u becomes
/// (t-degree, rest) with e^{χ₀} = t.
struct AdaptedBasis {
    u: IntMatrix,
    sign: i64,
}

impl AdaptedBasis {
    fn new(primitive: &[i64]) -> Self {
        let col = IntMatrix::from_columns(primitive.len(), &[primitive.to_vec()]).expect("column");
        let snf = smith_normal_form(&col);
        let sign = snf.u.apply(primitive)[0];
        debug_assert!(sign == 1 || sign == -1);
        AdaptedBasis { u: snf.u, sign }
    }

    fn split(&self, exp: &[i64]) -> (i64, Vec<i64>) {
        let v = self.u.apply(exp);
        (self.sign * v[0], v[1..].to_vec())
    }
}

fn primitive_part(chi: &[i64]) -> Result<(i64, Vec<i64>), GroupRingError> {
    let k = chi.iter().fold(0, |g, &x| gcd(g, x));
    if k == 0 {
        return Err(GroupRingError::ZeroCharacter);
    }
    Ok((k, chi.iter().map(|x| x / k).collect()))
}

/// Exact quotient `f / (1 − e^{−χ})`, or `None` if the division leaves a
/// remainder.
pub fn divide_by_one_minus(f: &GroupRingElement, chi: &[i64]) -> Result<Option<GroupRingElement>, GroupRingError> {
    if chi.len() != f.lattice.rank() {
        return Err(GroupRingError::BadExponent { rank: f.lattice.rank(), found: chi.len() });
    }
    let (k, chi0) = primitive_part(chi)?;
    let basis = AdaptedBasis::new(&chi0);
    // group by the complementary coordinates; keep one base exponent per group
    let mut groups: BTreeMap<Vec<i64>, (Vec<i64>, i64, BTreeMap<i64, i64>)> = BTreeMap::new();
    for (e, c) in f.terms() {
        let (deg, rest) = basis.split(e);
        let g = groups.entry(rest).or_insert_with(|| (e.clone(), deg, BTreeMap::new()));
        g.2.insert(deg, c);
    }
    let mut quotient = GroupRingElement::zero(f.lattice.clone());
    for (base_exp, base_deg, poly) in groups.into_values() {
        // h = (1 − t^{−k})·q, so q_{j+k} = q_j − h_j scanning upward from the lowest degree
        let lo = *poly.keys().next().expect("nonempty group");
        let hi = *poly.keys().next_back().expect("nonempty group");
        let span = (hi - lo) as usize + 1;
        let ku = k as usize;
        let mut q = vec![0i64; span + ku];
        for j in 0..span {
            let h = poly.get(&(lo + j as i64)).copied().unwrap_or(0);
            q[j + ku] = q[j] - h;
        }
        // q is supported on degrees lo+k ..= hi; anything above is remainder
        if q[span..].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        for (idx, &c) in q.iter().enumerate().take(span).skip(ku) {
            let deg = lo + idx as i64;
            let exp: Vec<i64> = base_exp.iter().zip(&chi0).map(|(b, x)| b + (deg - base_deg) * x).collect();
            quotient.add_term(exp, c);
        }
    }
    Ok(Some(quotient))
}

/// Whether f ≡ g modulo the principal ideal (1 − e^{−χ}).
pub fn congruent_mod(f: &GroupRingElement, g: &GroupRingElement, chi: &[i64]) -> Result<bool, GroupRingError> {
    let diff = f.checked_sub(g)?;
    Ok(divide_by_one_minus(&diff, chi)?.is_some())
}

/// Σ_{w ∈ group} w·f.
pub fn orbit_sum<'a>(group: impl IntoIterator<Item = &'a IntMatrix>, f: &GroupRingElement) -> GroupRingElement {
    let mut out = GroupRingElement::zero(f.lattice.clone());
    for w in group {
        for (e, c) in f.terms() {
            out.add_term(w.apply(e), c);
        }
    }
    out
}

/// Whether every generator fixes f.
pub fn is_invariant<'a>(generators: impl IntoIterator<Item = &'a IntMatrix>, f: &GroupRingElement) -> bool {
    generators.into_iter().all(|g| f.act(g) == *f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lat(rank: usize) -> Arc<Lattice> {
        Arc::new(Lattice::with_prefix("L", "e", rank))
    }

    fn e(l: &Arc<Lattice>, exp: &[i64]) -> GroupRingElement {
        GroupRingElement::monomial(l.clone(), exp.to_vec(), 1)
    }

    /// Reference check: f ∈ (1 − e^{−χ}) for primitive χ iff f vanishes
    /// after collapsing exponents along χ.
    fn projection_oracle(f: &GroupRingElement, chi: &[i64]) -> bool {
        let mut classes: Vec<(Vec<i64>, i64)> = Vec::new();
        'terms: for (u, c) in f.terms() {
            for (v, total) in classes.iter_mut() {
                let d: Vec<i64> = u.iter().zip(v.iter()).map(|(a, b)| a - b).collect();
                let i = chi.iter().position(|&x| x != 0).unwrap();
                if d[i] % chi[i] == 0 {
                    let t = d[i] / chi[i];
                    if d.iter().zip(chi).all(|(a, b)| *a == t * b) {
                        *total += c;
                        continue 'terms;
                    }
                }
            }
            classes.push((u.clone(), c));
        }
        classes.iter().all(|(_, t)| *t == 0)
    }

    #[test]
    fn identities() {
        let l = lat(1);
        let f = e(&l, &[3]) + e(&l, &[-1]).scale(4);
        assert_eq!(&f * &GroupRingElement::one(l.clone()), f);
        let one = GroupRingElement::one(l.clone());
        let g = e(&l, &[1]);
        assert_eq!(&(&one - &g) * &(&one + &g), &one - &e(&l, &[2]));
    }

    #[test]
    fn reflection_action() {
        let l = lat(1);
        let s = IntMatrix::from_rows(&[vec![-1]]).unwrap();
        assert_eq!(e(&l, &[1]).act(&s), e(&l, &[-1]));
        let group = [IntMatrix::identity(1), s.clone()];
        let orbit = orbit_sum(group.iter(), &e(&l, &[1]));
        assert_eq!(orbit, e(&l, &[1]) + e(&l, &[-1]));
        assert!(is_invariant([&s], &orbit));
        assert!(!is_invariant([&s], &e(&l, &[1])));
        assert!(is_invariant([&s], &GroupRingElement::constant(l.clone(), 5)));
        assert_eq!(orbit_sum([IntMatrix::identity(1)].iter(), &orbit), orbit);
        assert_eq!(orbit_sum(group.iter(), &GroupRingElement::one(l.clone())), GroupRingElement::constant(l, 2));
    }

    #[test]
    fn congruence_examples() {
        let l = lat(2);
        let gamma = [1, 2];
        let f = e(&l, &[3, -1]);
        assert!(congruent_mod(&f, &f, &gamma).unwrap());
        let gen = GroupRingElement::one(l.clone()) - e(&l, &[-1, -2]);
        assert!(congruent_mod(&gen, &GroupRingElement::zero(l.clone()), &gamma).unwrap());
        let mu = [4, 1];
        let shifted = [mu[0] - 2 * gamma[0], mu[1] - 2 * gamma[1]];
        assert!(congruent_mod(&e(&l, &mu), &e(&l, &shifted), &gamma).unwrap());
        assert!(!congruent_mod(&e(&l, &mu), &GroupRingElement::zero(l.clone()), &gamma).unwrap());
        assert_eq!(congruent_mod(&f, &f, &[0, 0]), Err(GroupRingError::ZeroCharacter));
    }

    #[test]
    fn imprimitive_modulus() {
        let l = lat(1);
        // 1 − e^{−2} divides 1 − e^{−4} but not 1 − e^{−1}
        let one = GroupRingElement::one(l.clone());
        assert!(congruent_mod(&one, &e(&l, &[-4]), &[2]).unwrap());
        assert!(!congruent_mod(&one, &e(&l, &[-1]), &[2]).unwrap());
        let q = divide_by_one_minus(&(&one - &e(&l, &[-4])), &[2]).unwrap().unwrap();
        assert_eq!(q, one.clone() + e(&l, &[-2]));
    }

    #[test]
    fn lattice_mismatch() {
        let a = GroupRingElement::one(lat(1));
        let b = GroupRingElement::one(Arc::new(Lattice::with_prefix("M", "e", 1)));
        assert!(matches!(a.checked_add(&b), Err(GroupRingError::LatticeMismatch { .. })));
    }

    fn arb_element(rank: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
        proptest::collection::vec((proptest::collection::vec(-3i64..4, rank), -3i64..4), 0..6)
    }

    proptest! {
        #[test]
        fn product_matches_termwise_expansion(a in arb_element(3), b in arb_element(3), shift in 0i64..70) {
            let l = lat(3);
            // shifted inputs exercise both the packed and the general path
            let a: Vec<_> = a.into_iter().map(|(e, c)| (e.into_iter().map(|x| x + shift).collect::<Vec<_>>(), c)).collect();
            let f = GroupRingElement::from_terms(l.clone(), a.clone()).unwrap();
            let g = GroupRingElement::from_terms(l.clone(), b.clone()).unwrap();
            let mut expected = GroupRingElement::zero(l.clone());
            for (x, c) in &a {
                for (y, d) in &b {
                    expected.add_term(x.iter().zip(y).map(|(p, q)| p + q).collect(), c * d);
                }
            }
            prop_assert_eq!(&f * &g, expected);
        }

        #[test]
        fn division_reconstructs(terms in arb_element(2), chi in proptest::collection::vec(-3i64..4, 2)) {
            prop_assume!(chi.iter().any(|&x| x != 0));
            let l = lat(2);
            let g = GroupRingElement::from_terms(l.clone(), terms).unwrap();
            let neg: Vec<i64> = chi.iter().map(|x| -x).collect();
            let f = &g * &(GroupRingElement::one(l.clone()) - GroupRingElement::monomial(l.clone(), neg, 1));
            let q = divide_by_one_minus(&f, &chi).unwrap().unwrap();
            prop_assert_eq!(q, g);
        }

        #[test]
        fn sign_symmetry(a in arb_element(2), b in arb_element(2), chi in proptest::collection::vec(-3i64..4, 2)) {
            prop_assume!(chi.iter().any(|&x| x != 0));
            let l = lat(2);
            let f = GroupRingElement::from_terms(l.clone(), a).unwrap();
            let g = GroupRingElement::from_terms(l, b).unwrap();
            let neg: Vec<i64> = chi.iter().map(|x| -x).collect();
            prop_assert_eq!(congruent_mod(&f, &g, &chi).unwrap(), congruent_mod(&f, &g, &neg).unwrap());
        }

        #[test]
        fn projection_agrees(a in arb_element(3), chi in proptest::collection::vec(-2i64..3, 3)) {
            prop_assume!(chi.iter().fold(0, |g, &x| gcd(g, x)) == 1);
            let l = lat(3);
            let f = GroupRingElement::from_terms(l.clone(), a).unwrap();
            let zero = GroupRingElement::zero(l);
            prop_assert_eq!(congruent_mod(&f, &zero, &chi).unwrap(), projection_oracle(&f, &chi));
        }

        #[test]
        fn congruence_respects_products(a in arb_element(2), b in arb_element(2), h in arb_element(2)) {
            let l = lat(2);
            let chi = [1, -2];
            let f = GroupRingElement::from_terms(l.clone(), a).unwrap();
            let k = GroupRingElement::from_terms(l.clone(), b).unwrap();
            let m = GroupRingElement::from_terms(l.clone(), h).unwrap();
            // g = f + k·(1 − e^{−χ}) is congruent to f, and so are their products with m
            let g = &f + &(&k * &(GroupRingElement::one(l.clone()) - GroupRingElement::monomial(l.clone(), vec![-1, 2], 1)));
            prop_assert!(congruent_mod(&f, &g, &chi).unwrap());
            prop_assert!(congruent_mod(&(&f * &m), &(&g * &m), &chi).unwrap());
            prop_assert!(congruent_mod(&(&f + &m), &(&g + &m), &chi).unwrap());
        }
    }
}
