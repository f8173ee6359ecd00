//! Root systems, Weyl groups and the combinatorial datum of a symmetric
//! space of minimal rank.
//!
//! Characters of the maximal torus are written in the basis of simple roots.
//! An involution is an integer matrix acting on column vectors, so column `j`
//! of `theta` holds the coordinates of θ(α_j).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{
    left_inverse, smith_normal_form, solve_integer_system, split_surjection, IntMatrix, Lattice, LatticeAction,
    LatticeError, LatticeMap, equivariant_section_exists,
};

/// Largest Weyl group that is enumerated element by element.
pub const MAX_WEYL_ORDER: u64 = 51_840;
/// Largest total rank accepted.
pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("unknown Cartan type {0}")]
    UnknownType(String),
    #[error("Weyl group of {label} has order {order}, above the supported {max}")]
    TooLarge { label: String, order: u64, max: u64 },
    #[error("theta is not an involution")]
    NotInvolution,
    #[error("theta does not preserve the root system: {0}")]
    RootSystemViolation(String),
    #[error("not of minimal rank: {0}")]
    NotMinimalRank(String),
    #[error("element {0} is not in the ambient group")]
    NotSubgroup(usize),
    #[error("invalid datum description: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CartanFamily {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// An irreducible Cartan type such as `A5` or `G2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub family: CartanFamily,
    pub rank: usize,
}

impl CartanType {
    pub fn new(family: CartanFamily, rank: usize) -> Result<Self, DatumError> {
        let ok = match family {
            CartanFamily::A => rank >= 1,
            CartanFamily::B | CartanFamily::C => rank >= 2,
            CartanFamily::D => rank >= 4,
            CartanFamily::E => (6..=8).contains(&rank),
            CartanFamily::F => rank == 4,
            CartanFamily::G => rank == 2,
        };
        if !ok {
            return Err(DatumError::UnknownType(format!("{family:?}{rank}")));
        }
        Ok(CartanType { family, rank })
    }

    /// Parses a family letter (`"A"`) or a full label (`"A5"`, in which case
    /// the embedded rank must agree with `rank`).
    pub fn parse(label: &str, rank: usize) -> Result<Self, DatumError> {
        let mut chars = label.trim().chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => CartanFamily::A,
            Some('B') => CartanFamily::B,
            Some('C') => CartanFamily::C,
            Some('D') => CartanFamily::D,
            Some('E') => CartanFamily::E,
            Some('F') => CartanFamily::F,
            Some('G') => CartanFamily::G,
            _ => return Err(DatumError::UnknownType(label.to_string())),
        };
        let rest: String = chars.collect();
        if !rest.is_empty() && rest.parse::<usize>().ok() != Some(rank) {
            return Err(DatumError::UnknownType(format!("{label} with rank {rank}")));
        }
        Self::new(family, rank)
    }

    /// `cartan[i][j] = ⟨α_i^∨, α_j⟩`.
    pub fn cartan_matrix(&self) -> IntMatrix {
        let n = self.rank;
        let mut c = IntMatrix::identity(n);
        for i in 0..n {
            c[(i, i)] = 2;
        }
        let mut link = |i: usize, j: usize, cij: i64, cji: i64| {
            c[(i, j)] = cij;
            c[(j, i)] = cji;
        };
        match self.family {
            CartanFamily::A => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
            CartanFamily::B => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -1, -2);
            }
            CartanFamily::C => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -2, -1);
            }
            CartanFamily::D => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 3, n - 1, -1, -1);
            }
            CartanFamily::E => {
                // 1-3-4-5-…, with 2 attached to 4
                link(0, 2, -1, -1);
                link(1, 3, -1, -1);
                (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
            }
            CartanFamily::F => {
                link(0, 1, -1, -1);
                link(1, 2, -1, -2);
                link(2, 3, -1, -1);
            }
            CartanFamily::G => link(0, 1, -3, -1),
        }
        c
    }

    /// Squared lengths of the simple roots, scaled to be integral.
    pub fn root_lengths(&self) -> Vec<i64> {
        let n = self.rank;
        match self.family {
            CartanFamily::A | CartanFamily::D | CartanFamily::E => vec![2; n],
            CartanFamily::B => (0..n).map(|i| if i + 1 == n { 1 } else { 2 }).collect(),
            CartanFamily::C => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
            CartanFamily::F => vec![2, 2, 1, 1],
            CartanFamily::G => vec![2, 6],
        }
    }

    pub fn weyl_order(&self) -> u64 {
        let n = self.rank as u64;
        let fact = |k: u64| (1..=k).product::<u64>();
        match self.family {
            CartanFamily::A => fact(n + 1),
            CartanFamily::B | CartanFamily::C => (1u64 << n) * fact(n),
            CartanFamily::D => (1u64 << (n - 1)) * fact(n),
            CartanFamily::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            CartanFamily::F => 1152,
            CartanFamily::G => 12,
        }
    }

    pub fn label(&self) -> String {
        format!("{:?}{}", self.family, self.rank)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn block_diagonal(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut m = IntMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m[(a.rows() + i, a.cols() + j)] = b[(i, j)];
        }
    }
    m
}

/// A (possibly reducible) root system in simple-root coordinates.
#[derive(Debug, Clone)]
pub struct RootSystem {
    cartan: IntMatrix,
    /// Twice the invariant form on the simple roots.
    form: IntMatrix,
    roots: Vec<Vec<i64>>,
    positive: usize,
    index: HashMap<Vec<i64>, usize>,
}

impl RootSystem {
    pub fn from_cartan(cartan: IntMatrix, lengths: &[i64]) -> Self {
        let n = cartan.rows();
        let mut form = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                form[(i, j)] = cartan[(i, j)] * lengths[i];
            }
        }
        debug_assert_eq!(form, form.transpose());
        let reflections: Vec<IntMatrix> = (0..n).map(|i| simple_reflection(&cartan, i)).collect();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            if seen.insert(e.clone()) {
                queue.push_back(e);
            }
        }
        while let Some(r) = queue.pop_front() {
            for s in &reflections {
                let image = s.apply(&r);
                if seen.insert(image.clone()) {
                    queue.push_back(image);
                }
            }
        }
        let mut positive: Vec<Vec<i64>> = seen.into_iter().filter(|r| r.iter().all(|&x| x >= 0)).collect();
        positive.sort_by_key(|r| (r.iter().sum::<i64>(), std::cmp::Reverse(r.clone())));
        let negative: Vec<Vec<i64>> = positive.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let count = positive.len();
        let roots: Vec<Vec<i64>> = positive.into_iter().chain(negative).collect();
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        RootSystem { cartan, form, roots, positive: count, index }
    }

    pub fn rank(&self) -> usize {
        self.cartan.rows()
    }

    pub fn cartan(&self) -> &IntMatrix {
        &self.cartan
    }

    /// Twice the invariant bilinear form, in the simple-root basis.
    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    /// Positive roots first (by height), then their negatives in the same order.
    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.roots[..self.positive]
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &[i64]) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        let fy = self.form.apply(y);
        x.iter().zip(&fy).map(|(a, b)| a * b).sum()
    }

    /// The reflection in the hyperplane orthogonal to `beta`.
    pub fn reflection(&self, beta: &[i64]) -> IntMatrix {
        let n = self.rank();
        let bb = self.pairing(beta, beta);
        let cols: Vec<Vec<i64>> = (0..n)
            .map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                let c = 2 * self.pairing(&e, beta) / bb;
                e.iter().zip(beta).map(|(x, b)| x - c * b).collect()
            })
            .collect();
        IntMatrix::from_columns(n, &cols).expect("square")
    }
}

/// s_i(α_j) = α_j − ⟨α_i^∨, α_j⟩ α_i.
fn simple_reflection(cartan: &IntMatrix, i: usize) -> IntMatrix {
    let n = cartan.rows();
    let mut s = IntMatrix::identity(n);
    for j in 0..n {
        s[(i, j)] -= cartan[(i, j)];
    }
    s
}

/// A finite reflection group, enumerated breadth-first from the identity by
/// right multiplication with the simple reflections.
#[derive(Debug, Clone)]
pub struct WeylGroup {
    generators: Vec<IntMatrix>,
    elements: Vec<IntMatrix>,
    words: Vec<Vec<usize>>,
    index: HashMap<IntMatrix, usize>,
}

impl WeylGroup {
    pub fn generate(generators: Vec<IntMatrix>, max_order: usize) -> Result<Self, DatumError> {
        let n = generators.first().map_or(0, IntMatrix::rows);
        let id = IntMatrix::identity(n);
        let mut elements = vec![id.clone()];
        let mut words = vec![Vec::new()];
        let mut index = HashMap::from([(id, 0usize)]);
        let mut cursor = 0;
        while cursor < elements.len() {
            for (k, g) in generators.iter().enumerate() {
                let next = &elements[cursor] * g;
                if !index.contains_key(&next) {
                    if elements.len() >= max_order {
                        return Err(DatumError::TooLarge {
                            label: format!("group on {n} generators"),
                            order: elements.len() as u64 + 1,
                            max: max_order as u64,
                        });
                    }
                    let mut w = words[cursor].clone();
                    w.push(k);
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                    words.push(w);
                }
            }
            cursor += 1;
        }
        Ok(WeylGroup { generators, elements, words, index })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// The index of the `k`-th generator.
    pub fn generator_index(&self, k: usize) -> usize {
        self.index[&self.generators[k]]
    }

    /// A reduced-length word such as `s1s3`, or `e` for the identity.
    pub fn word(&self, i: usize) -> String {
        if self.words[i].is_empty() {
            "e".to_string()
        } else {
            self.words[i].iter().map(|k| format!("s{}", k + 1)).collect()
        }
    }

    pub fn length(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&(&self.elements[a] * &self.elements[b])]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let n = self.elements[a].rows();
        let m = self.words[a].iter().rev().fold(IntMatrix::identity(n), |acc, &k| &acc * &self.generators[k]);
        self.index[&m]
    }

    /// The subgroup generated by the given elements, in enumeration order.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen: HashSet<usize> = HashSet::from([0]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<usize> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// One representative per left coset `g·subgroup` of `group`, always the
    /// first coset element in enumeration order.
    pub fn coset_representatives(&self, group: &[usize], subgroup: &[usize]) -> Result<CosetTable, DatumError> {
        let members: HashSet<usize> = group.iter().copied().collect();
        if let Some(&bad) = subgroup.iter().find(|x| !members.contains(x)) {
            return Err(DatumError::NotSubgroup(bad));
        }
        let mut sorted = group.to_vec();
        sorted.sort_unstable();
        let mut coset_of = HashMap::new();
        let mut representatives = Vec::new();
        for &g in &sorted {
            if coset_of.contains_key(&g) {
                continue;
            }
            let c = representatives.len();
            representatives.push(g);
            for &h in subgroup {
                let x = self.mul(g, h);
                if !members.contains(&x) {
                    return Err(DatumError::NotSubgroup(h));
                }
                coset_of.insert(x, c);
            }
        }
        Ok(CosetTable { representatives, coset_of })
    }
}

/// Left cosets of a subgroup with a distinguished representative each.
#[derive(Debug, Clone)]
pub struct CosetTable {
    representatives: Vec<usize>,
    coset_of: HashMap<usize, usize>,
}

impl CosetTable {
    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Position of the coset containing group element `g`.
    pub fn coset_of(&self, g: usize) -> Option<usize> {
        self.coset_of.get(&g).copied()
    }
}

/// How θ is specified in a datum description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Matrix(IntMatrix),
    Keyword(String),
}

/// Input description of a symmetric datum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumSpec {
    #[serde(rename = "type")]
    pub cartan_type: String,
    pub rank: usize,
    pub theta_matrix: ThetaSpec,
}

impl DatumSpec {
    pub fn simple(cartan_type: &str, rank: usize, theta: IntMatrix) -> Self {
        DatumSpec { cartan_type: cartan_type.to_string(), rank, theta_matrix: ThetaSpec::Matrix(theta) }
    }

    pub fn group_case(cartan_type: &str, rank: usize) -> Self {
        DatumSpec {
            cartan_type: cartan_type.to_string(),
            rank,
            theta_matrix: ThetaSpec::Keyword("group_case".to_string()),
        }
    }
}

/// Outcome of the splitting test on the simply-connected cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingReport {
    pub splitting_exists: bool,
    #[serde(rename = "WL_invariant_splitting_exists")]
    pub wl_invariant_splitting_exists: bool,
}

/// A symmetric space of minimal rank with all derived combinatorial data.
#[derive(Debug, Clone)]
pub struct SymmetricDatum {
    pub cartan_type: CartanType,
    pub group_case: bool,
    pub roots: RootSystem,
    pub theta: IntMatrix,
    /// Indices of the θ-fixed simple roots.
    pub delta_l: Vec<usize>,
    /// γ = α − θ(α) for α ∈ Δ∖Δ_L, in simple-root coordinates.
    pub restricted_simple_roots: Vec<Vec<i64>>,
    /// Simple roots of H, a basis of (1+θ)X*(T).
    pub h_simple_roots: Vec<Vec<i64>>,
    pub char_t: Arc<Lattice>,
    pub char_quotient: Arc<Lattice>,
    pub char_th: Arc<Lattice>,
    /// Inclusion X*(T/T_H) → X*(T); its columns are the γ.
    pub gamma: LatticeMap,
    gamma_left_inverse: IntMatrix,
    pub p: LatticeMap,
    pub q: LatticeMap,
    pub section: LatticeMap,
    pub weyl: WeylGroup,
    pub weyl_h: Vec<usize>,
    pub weyl_l: Vec<usize>,
    /// W_{G/H} acting on X*(T/T_H), identity first.
    pub restricted_weyl: Vec<IntMatrix>,
    /// W_{G/H} acting on coweight coordinates of X_*(T/T_H).
    pub coweight_action: Vec<IntMatrix>,
    restricted_of: HashMap<usize, usize>,
    th_action: HashMap<usize, IntMatrix>,
    cosets_l: CosetTable,
    cosets_h: CosetTable,
}

impl SymmetricDatum {
    pub fn from_spec(spec: &DatumSpec) -> Result<Self, DatumError> {
        let ct = CartanType::parse(&spec.cartan_type, spec.rank)?;
        match &spec.theta_matrix {
            ThetaSpec::Matrix(theta) => Self::build(ct, false, theta.clone()),
            ThetaSpec::Keyword(k) if k == "group_case" => Self::build_group_case(ct),
            ThetaSpec::Keyword(k) => Err(DatumError::InvalidSpec(format!("unknown theta keyword {k:?}"))),
        }
    }

    /// G × G with θ swapping the factors.
    ///
    /// X*(T) has the basis (α_i, 0), (0, −α_i), in which θ(x, y) = (−y, −x).
    pub fn build_group_case(ct: CartanType) -> Result<Self, DatumError> {
        let r = ct.rank;
        let mut theta = IntMatrix::zeros(2 * r, 2 * r);
        for i in 0..r {
            theta[(i, r + i)] = -1;
            theta[(r + i, i)] = -1;
        }
        Self::build(ct, true, theta)
    }

    pub fn build(ct: CartanType, group_case: bool, theta: IntMatrix) -> Result<Self, DatumError> {
        let factors = if group_case { 2 } else { 1 };
        let weyl_order = ct.weyl_order().pow(factors);
        let label = if group_case { format!("{ct}x{ct}") } else { ct.label() };
        if weyl_order > MAX_WEYL_ORDER || ct.rank * factors as usize > MAX_RANK {
            return Err(DatumError::TooLarge { label, order: weyl_order, max: MAX_WEYL_ORDER });
        }
        let (cartan, lengths) = if group_case {
            let c = ct.cartan_matrix();
            let l = ct.root_lengths();
            (block_diagonal(&c, &c), [l.clone(), l].concat())
        } else {
            (ct.cartan_matrix(), ct.root_lengths())
        };
        let n = cartan.rows();
        if theta.rows() != n || theta.cols() != n {
            return Err(DatumError::InvalidSpec(format!(
                "theta must be {n} x {n}, found {} x {}",
                theta.rows(),
                theta.cols()
            )));
        }
        if !(&theta * &theta).is_identity() {
            return Err(DatumError::NotInvolution);
        }
        let roots = RootSystem::from_cartan(cartan.clone(), &lengths);
        for r in roots.roots() {
            if !roots.contains(&theta.apply(r)) {
                return Err(DatumError::RootSystemViolation(format!("theta{r:?} is not a root")));
            }
        }

        let delta_l: Vec<usize> = (0..n).filter(|&i| theta.column(i) == unit(n, i)).collect();
        for r in roots.roots() {
            let fixed = theta.apply(r) == *r;
            let in_levi = r.iter().enumerate().all(|(i, &x)| x == 0 || delta_l.contains(&i));
            if fixed != in_levi {
                return Err(DatumError::NotMinimalRank(format!(
                    "root {r:?} breaks the identity of θ-fixed roots with the span of Δ_L"
                )));
            }
            if theta.apply(r).iter().zip(r).all(|(a, b)| *a == -b) {
                return Err(DatumError::NotMinimalRank(format!("root {r:?} is real (θα = −α)")));
            }
        }

        // restricted simple roots and X*(T/T_H) = ker(1+θ)
        let mut gammas: Vec<Vec<i64>> = Vec::new();
        for i in (0..n).filter(|i| !delta_l.contains(i)) {
            let g: Vec<i64> = unit(n, i).iter().zip(theta.column(i)).map(|(a, b)| a - b).collect();
            if !gammas.contains(&g) {
                gammas.push(g);
            }
        }
        let r = gammas.len();
        let one_plus = add(&IntMatrix::identity(n), &theta);
        let one_minus = sub(&IntMatrix::identity(n), &theta);
        let kernel_rank = n - smith_normal_form(&one_plus).rank();
        if kernel_rank != r {
            return Err(DatumError::NotMinimalRank(format!(
                "{r} restricted simple roots but ker(1+θ) has rank {kernel_rank}"
            )));
        }
        let gamma_matrix = IntMatrix::from_columns(n, &gammas)?;
        let gamma_left_inverse = left_inverse(&gamma_matrix).map_err(|_| {
            DatumError::NotMinimalRank("restricted simple roots do not span a saturated sublattice".into())
        })?;

        let char_t = Arc::new(Lattice::with_prefix("X*(T)", "a", n));
        let char_quotient = Arc::new(Lattice::with_prefix("X*(T/T_H)", "g", r));
        let h_simple_roots = h_simple_roots(&roots, &one_plus, n - r)?;
        let char_th = Arc::new(Lattice::with_prefix("X*(T_H)", "b", n - r));

        let basis = IntMatrix::from_columns(n, &h_simple_roots)?;
        let q_cols: Vec<Vec<i64>> = (0..n)
            .map(|j| solve_integer_system(&basis, &one_plus.column(j)).expect("basis spans the image"))
            .collect();
        let q = LatticeMap::new(char_t.clone(), char_th.clone(), IntMatrix::from_columns(n - r, &q_cols)?)?;
        let section = split_surjection(&q)?;
        let p = LatticeMap::new(char_t.clone(), char_quotient.clone(), &gamma_left_inverse * &one_minus)?;
        let gamma = LatticeMap::new(char_quotient.clone(), char_t.clone(), gamma_matrix.clone())?;

        let generators: Vec<IntMatrix> = (0..n).map(|i| simple_reflection(&cartan, i)).collect();
        let weyl = WeylGroup::generate(generators, MAX_WEYL_ORDER as usize)?;
        if weyl.order() as u64 != weyl_order {
            return Err(DatumError::RootSystemViolation(format!(
                "enumerated {} Weyl group elements, expected {weyl_order}",
                weyl.order()
            )));
        }
        let weyl_h: Vec<usize> = (0..weyl.order())
            .filter(|&i| {
                let w = weyl.element(i);
                &(w * &theta) == &(&theta * w)
            })
            .collect();
        let l_gens: Vec<usize> = delta_l.iter().map(|&i| weyl.generator_index(i)).collect();
        let weyl_l = weyl.generated_subgroup(&l_gens);

        let mut restricted_weyl: Vec<IntMatrix> = Vec::new();
        let mut restricted_of = HashMap::new();
        let mut th_action = HashMap::new();
        let mut kernel = Vec::new();
        for &w in &weyl_h {
            let m = weyl.element(w);
            let wr = &(&gamma_left_inverse * m) * &gamma_matrix;
            let k = match restricted_weyl.iter().position(|x| *x == wr) {
                Some(k) => k,
                None => {
                    restricted_weyl.push(wr.clone());
                    restricted_weyl.len() - 1
                }
            };
            if wr.is_identity() {
                kernel.push(w);
            }
            restricted_of.insert(w, k);
            th_action.insert(w, &(&q.matrix * m) * &section.matrix);
        }
        if kernel != weyl_l {
            return Err(DatumError::NotMinimalRank(
                "kernel of W_H → W_{G/H} differs from W_L".into(),
            ));
        }
        if weyl_h.len() != weyl_l.len() * restricted_weyl.len() {
            return Err(DatumError::NotMinimalRank("|W_H| ≠ |W_L|·|W_{G/H}|".into()));
        }
        let coweight_action = restricted_weyl
            .iter()
            .map(|m| m.inverse_unimodular().map(|inv| inv.transpose()))
            .collect::<Result<Vec<_>, _>>()?;

        let all: Vec<usize> = (0..weyl.order()).collect();
        let cosets_l = weyl.coset_representatives(&all, &weyl_l)?;
        let cosets_h = weyl.coset_representatives(&weyl_h, &weyl_l)?;

        Ok(SymmetricDatum {
            cartan_type: ct,
            group_case,
            roots,
            theta,
            delta_l,
            restricted_simple_roots: gammas,
            h_simple_roots,
            char_t,
            char_quotient,
            char_th,
            gamma,
            gamma_left_inverse,
            p,
            q,
            section,
            weyl,
            weyl_h,
            weyl_l,
            restricted_weyl,
            coweight_action,
            restricted_of,
            th_action,
            cosets_l,
            cosets_h,
        })
    }

    pub fn label(&self) -> String {
        if self.group_case {
            format!("{0}x{0}", self.cartan_type)
        } else {
            self.cartan_type.label()
        }
    }

    /// Rank of X*(T).
    pub fn rank(&self) -> usize {
        self.theta.rows()
    }

    /// rk(G/H), the number of restricted simple roots.
    pub fn restricted_rank(&self) -> usize {
        self.restricted_simple_roots.len()
    }

    /// rk(H).
    pub fn h_rank(&self) -> usize {
        self.h_simple_roots.len()
    }

    pub fn simple_root_label(&self, i: usize) -> String {
        format!("alpha{}", i + 1)
    }

    /// Coordinates in X*(T/T_H) of a character of T lying in ker(1+θ).
    pub fn to_quotient(&self, chi: &[i64]) -> Option<Vec<i64>> {
        let coords = self.gamma_left_inverse.apply(chi);
        (self.gamma.apply(&coords) == chi).then_some(coords)
    }

    pub fn is_in_wh(&self, w: usize) -> bool {
        self.restricted_of.contains_key(&w)
    }

    /// Index into [`Self::restricted_weyl`] of the image of `w ∈ W_H`.
    pub fn restricted_index(&self, w: usize) -> Option<usize> {
        self.restricted_of.get(&w).copied()
    }

    /// The action of `w ∈ W_H` on X*(T_H).
    pub fn th_action(&self, w: usize) -> Option<&IntMatrix> {
        self.th_action.get(&w)
    }

    /// Left cosets W/W_L.
    pub fn cosets_w(&self) -> &CosetTable {
        &self.cosets_l
    }

    /// Left cosets W_H/W_L.
    pub fn cosets_wh(&self) -> &CosetTable {
        &self.cosets_h
    }

    /// Positive roots outside the Levi subsystem, Φ⁺∖Φ_L⁺.
    pub fn positive_roots_outside_levi(&self) -> Vec<Vec<i64>> {
        self.roots
            .positive_roots()
            .iter()
            .filter(|r| r.iter().enumerate().any(|(i, &x)| x != 0 && !self.delta_l.contains(&i)))
            .cloned()
            .collect()
    }

    /// For each restricted simple root, a simple root α with γ = α − θ(α).
    pub fn restricted_sources(&self) -> Vec<usize> {
        let n = self.rank();
        self.restricted_simple_roots
            .iter()
            .map(|g| {
                (0..n)
                    .find(|&i| {
                        !self.delta_l.contains(&i)
                            && unit(n, i).iter().zip(self.theta.column(i)).map(|(a, b)| a - b).eq(g.iter().copied())
                    })
                    .expect("every restricted simple root has a source")
            })
            .collect()
    }

    /// The element s_α s_{θ(α)} of W_H attached to the `k`-th restricted simple root.
    pub fn restricted_reflection(&self, k: usize) -> usize {
        let alpha = unit(self.rank(), self.restricted_sources()[k]);
        let s1 = self.roots.reflection(&alpha);
        let s2 = self.roots.reflection(&self.theta.apply(&alpha));
        self.weyl.index_of(&(&s1 * &s2)).expect("product of reflections lies in W")
    }

    /// The roots α with q(α) = β.
    pub fn q_fiber(&self, beta: &[i64]) -> Vec<Vec<i64>> {
        self.roots.roots().iter().filter(|r| self.q.apply(r) == beta).cloned().collect()
    }

    /// Decides whether the restriction map of the simply-connected cover
    /// splits, and whether it splits W_L-equivariantly.
    pub fn simply_connected_splitting(&self) -> Result<SplittingReport, DatumError> {
        let c = self.roots.cartan();
        let n = self.rank();
        // weight coordinates = C · root coordinates
        let det = c.determinant();
        let adj = adjugate(c);
        let num = &(c * &self.theta) * &adj;
        let mut theta_w = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = i128::from(num[(i, j)]);
                if x % det != 0 {
                    return Err(DatumError::InvalidSpec("theta does not preserve the weight lattice".into()));
                }
                theta_w[(i, j)] = (x / det) as i64;
            }
        }
        let one_plus = add(&IntMatrix::identity(n), &theta_w);
        let snf = smith_normal_form(&one_plus);
        let k = snf.rank();
        let v_inv = snf.v.inverse_unimodular()?;
        let weights = Arc::new(Lattice::with_prefix("X*(T~)", "w", n));
        let target = Arc::new(Lattice::with_prefix("X*(T~_H)", "c", k));
        let q = LatticeMap::new(weights, target, v_inv.select_rows(0..k))?;
        let section = match split_surjection(&q) {
            Ok(s) => s,
            Err(LatticeError::NotSurjective { .. }) => {
                return Ok(SplittingReport { splitting_exists: false, wl_invariant_splitting_exists: false })
            }
            Err(e) => return Err(e.into()),
        };
        let actions: Vec<LatticeAction> = self
            .delta_l
            .iter()
            .map(|&i| {
                let mut g = IntMatrix::identity(n);
                for r in 0..n {
                    g[(r, i)] -= c[(r, i)];
                }
                let on_target = &(&q.matrix * &g) * &section.matrix;
                LatticeAction { on_source: g, on_target }
            })
            .collect();
        Ok(SplittingReport {
            splitting_exists: true,
            wl_invariant_splitting_exists: equivariant_section_exists(&q, &actions)?,
        })
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut m = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[(i, j)] += b[(i, j)];
        }
    }
    m
}

fn sub(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut m = a.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[(i, j)] -= b[(i, j)];
        }
    }
    m
}

fn adjugate(m: &IntMatrix) -> IntMatrix {
    let n = m.rows();
    let mut adj = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = m.select_rows((0..n).filter(|&r| r != j)).select_columns((0..n).filter(|&c| c != i));
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[(i, j)] = sign * minor.determinant() as i64;
        }
    }
    adj
}

/// Simple roots of the root system (1+θ)Φ∖{0}, which form a basis of
/// (1+θ)X*(T). Ordered by the position of their last nonzero coordinate.
fn h_simple_roots(roots: &RootSystem, one_plus: &IntMatrix, expected: usize) -> Result<Vec<Vec<i64>>, DatumError> {
    let n = roots.rank();
    let mut images: Vec<Vec<i64>> = Vec::new();
    for r in roots.roots() {
        let v = one_plus.apply(r);
        if v.iter().any(|&x| x != 0) && !images.contains(&v) {
            images.push(v);
        }
    }
    let linear = |w: &[i128], v: &[i64]| -> i128 { w.iter().zip(v).map(|(a, &b)| a * i128::from(b)).sum() };
    let mut weights: Vec<i128> = (1..=n as i128).collect();
    if images.iter().any(|v| linear(&weights, v) == 0) {
        weights = (0..n as u32).map(|i| 1000i128.pow(i)).collect();
    }
    let positive: Vec<&Vec<i64>> = images.iter().filter(|v| linear(&weights, v) > 0).collect();
    let positive_set: HashSet<&Vec<i64>> = positive.iter().copied().collect();
    let mut simple: Vec<Vec<i64>> = positive
        .iter()
        .filter(|v| {
            !positive.iter().any(|a| {
                let rest: Vec<i64> = v.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
                positive_set.contains(&rest)
            })
        })
        .map(|v| (*v).clone())
        .collect();
    simple.sort_by_key(|v| (v.iter().rposition(|&x| x != 0), v.clone()));

    let spans = simple.len() == expected && {
        let b = IntMatrix::from_columns(n, &simple)?;
        (0..n).all(|j| solve_integer_system(&b, &one_plus.column(j)).is_some())
    };
    if spans {
        return Ok(simple);
    }
    // fall back to a lattice basis of the image
    let snf = smith_normal_form(one_plus);
    let u_inv = snf.u.inverse_unimodular()?;
    Ok((0..snf.rank()).map(|i| u_inv.column(i).iter().map(|x| x * snf.d[(i, i)]).collect()).collect())
}
