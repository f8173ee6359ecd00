//! The acceptance checks, run against one datum and fan.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::catalog::pgl_psp_theta;
use crate::fan::Fan;
use crate::group_ring::{congruent_mod, GroupRingElement};
use crate::kring::{
    enumerate_fixed_points, enumerate_invariant_curves, expand, filtration_membership, kg_membership, kiso_join,
    kiso_split, kt_membership, product_lattice, wonderful_presentation_check, CurveKind, GradedDecomposition, GradedModel, Scope, Witness,
};
use crate::root_datum::{CartanFamily, SymmetricDatum};
use crate::sampling;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} ({}): {} in {} ms (limit {} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms,
            self.limit_ms
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub oracle_triples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 20240601, samples: 100, oracle_triples: 1000 }
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(id: u8, name: &str, limit_ms: u128, f: impl FnOnce() -> Check) -> CriterionResult {
    let start = Instant::now();
    let outcome = f();
    let elapsed_ms = start.elapsed().as_millis();
    let (ok, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult { id, name: name.to_string(), passed: ok && elapsed_ms < limit_ms, detail, elapsed_ms, limit_ms }
}

/// Runs all eight checks on one fan.
pub fn verify(fan: &Fan, opts: VerifyOptions) -> Vec<CriterionResult> {
    vec![
        timed(1, "datum", 5_000, || datum_structure(fan)),
        timed(2, "fixed points and curves", 60_000, || curves(fan)),
        timed(3, "congruence subring", 60_000, || congruences(fan, opts)),
        timed(4, "graded decomposition", 120_000, || decomposition(fan, opts)),
        timed(5, "kiso round trip", 10_000, || kiso(fan.datum(), opts)),
        timed(6, "splitting", 5_000, || splitting(fan.datum())),
        timed(7, "presentation", 60_000, || presentation(fan)),
        timed(8, "multifiltration", 60_000, || multifiltration(fan, opts)),
    ]
}

fn is_pgl_psp(d: &SymmetricDatum, n: usize) -> bool {
    !d.group_case && d.cartan_type.family == CartanFamily::A && d.rank() == 2 * n - 1 && d.theta == pgl_psp_theta(n)
}

/// Group orders are consistent; for PGL(6)/PSp(6) the known values match.
pub fn datum_structure(fan: &Fan) -> Check {
    let d = fan.datum();
    let (w, wh, wl, wr) = (d.weyl.order(), d.weyl_h.len(), d.weyl_l.len(), d.restricted_weyl.len());
    ensure(wh == wl * wr, || format!("|W_H| = {wh} but |W_L|·|W_G/H| = {}", wl * wr))?;
    ensure(w == wl * d.cosets_w().len(), || "W/W_L has the wrong size".into())?;
    ensure(fan.cones().len() >= fan.dim() + 1, || "F+ is missing cones".into())?;
    if is_pgl_psp(d, 3) {
        ensure(d.delta_l == [0, 2, 4], || format!("Delta_L = {:?}", d.delta_l))?;
        ensure(d.restricted_simple_roots == [vec![1, 2, 1, 0, 0], vec![0, 0, 1, 2, 1]], || {
            format!("restricted roots {:?}", d.restricted_simple_roots)
        })?;
        ensure(d.theta.column(1) == [-1, -1, -1, 0, 0] && d.theta.column(3) == [0, 0, -1, -1, -1], || {
            "theta images of alpha2, alpha4".into()
        })?;
        let fibers = [
            (vec![1, 0, 0], vec![vec![1, 0, 0, 0, 0]]),
            (vec![0, 1, 0], vec![vec![0, 1, 1, 0, 0], vec![-1, -1, 0, 0, 0]]),
            (vec![0, 0, 1], vec![vec![0, 0, -1, -1, 0], vec![0, 0, 0, 1, 1]]),
        ];
        for (beta, expected) in fibers {
            let got: BTreeSet<_> = d.q_fiber(&beta).into_iter().collect();
            let want: BTreeSet<_> = expected.into_iter().collect();
            ensure(got == want, || format!("q-fiber of {beta:?} is {got:?}"))?;
        }
        ensure((w, wl, wr, wh) == (720, 8, 6, 48), || format!("orders {w}, {wl}, {wr}, {wh}"))?;
        if fan.is_wonderful() {
            ensure(fan.cones().len() == 4, || format!("{} cones", fan.cones().len()))?;
        }
    }
    Ok(format!("|W|={w} |W_L|={wl} |W_G/H|={wr} |W_H|={wh}, {} cones in F+", fan.cones().len()))
}

fn normalize(chi: Vec<i64>) -> Vec<i64> {
    match chi.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => chi.into_iter().map(|v| -v).collect(),
        _ => chi,
    }
}

type CurveKey = (CurveKind, usize, usize, Vec<i64>);

/// Pairs fixed points directly by the rules for each curve type.
pub fn brute_force_curves(fan: &Fan, scope: Scope) -> BTreeSet<CurveKey> {
    let d = fan.datum();
    let fps = enumerate_fixed_points(fan, scope);
    let roots = d.positive_roots_outside_levi();
    let reflections: Vec<_> = roots.iter().map(|a| d.roots.reflection(a)).collect();
    let t: Vec<usize> = (0..d.restricted_rank()).map(|k| d.restricted_reflection(k)).collect();
    let adjacent = fan.adjacent_pairs();
    let table = match scope {
        Scope::X => d.cosets_w(),
        Scope::Y => d.cosets_wh(),
    };
    let mut out = BTreeSet::new();
    let pts = fps.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (p, q) = (pts[i], pts[j]);
            let u = d.weyl.element(p.coset);
            if p.cone == q.cone {
                let uinv = d.weyl.inverse(p.coset);
                let walls = fan.facet_orthogonal_restricted_roots(p.cone).expect("maximal");
                for &l in &d.weyl_l {
                    let m = d.weyl.mul(uinv, d.weyl.mul(q.coset, l));
                    if scope == Scope::X {
                        for (a, s) in roots.iter().zip(&reflections) {
                            if d.weyl.element(m) == s {
                                out.insert((CurveKind::Root, i, j, normalize(u.apply(a))));
                            }
                        }
                    }
                    for &k in &walls {
                        if m == t[k] {
                            out.insert((CurveKind::Wall, i, j, normalize(u.apply(&d.restricted_simple_roots[k]))));
                        }
                    }
                }
            } else if table.coset_of(p.coset) == table.coset_of(q.coset) {
                for (a, b, chi) in &adjacent {
                    if (*a == p.cone && *b == q.cone) || (*a == q.cone && *b == p.cone) {
                        out.insert((CurveKind::Facet, i, j, normalize(u.apply(&d.gamma.apply(chi)))));
                    }
                }
            }
        }
    }
    out
}

pub fn curves(fan: &Fan) -> Check {
    let d = fan.datum();
    let mut summary = Vec::new();
    for scope in [Scope::X, Scope::Y] {
        let fps = enumerate_fixed_points(fan, scope);
        let found = enumerate_invariant_curves(fan, scope).map_err(|e| e.to_string())?;
        let ours: BTreeSet<CurveKey> =
            found.iter().map(|c| (c.kind, c.endpoints[0], c.endpoints[1], c.character.clone())).collect();
        ensure(ours.len() == found.len(), || "duplicate curves".into())?;
        ensure(ours == brute_force_curves(fan, scope), || format!("{scope:?}: curves differ from the direct pairing"))?;
        let movers: Vec<usize> = match scope {
            Scope::X => (0..d.rank()).map(|i| d.weyl.generator_index(i)).collect(),
            Scope::Y => d.weyl_h.clone(),
        };
        for &g in &movers {
            let gm = d.weyl.element(g);
            for (kind, a, b, chi) in &ours {
                let pa = fps.points()[*a];
                let pb = fps.points()[*b];
                let ia = fps.index_of(fan, pa.cone, d.weyl.mul(g, pa.coset)).expect("coset");
                let ib = fps.index_of(fan, pb.cone, d.weyl.mul(g, pb.coset)).expect("coset");
                let key = (*kind, ia.min(ib), ia.max(ib), normalize(gm.apply(chi)));
                ensure(ours.contains(&key), || format!("{scope:?}: curve set is not stable under {}", d.weyl.word(g)))?;
            }
        }
        summary.push(format!("{scope:?}: {} points, {} curves", fps.len(), ours.len()));
    }
    Ok(summary.join("; "))
}

/// f ∈ (1 − e^{−χ}) iff the coefficients sum to zero on every class of
/// exponents modulo Zχ.
pub fn projection_oracle(f: &GroupRingElement, chi: &[i64]) -> bool {
    let i = chi.iter().position(|&x| x != 0).expect("nonzero character");
    let mut classes: Vec<(Vec<i64>, i64)> = Vec::new();
    'terms: for (u, c) in f.terms() {
        for (v, total) in classes.iter_mut() {
            let diff: Vec<i64> = u.iter().zip(v.iter()).map(|(a, b)| a - b).collect();
            if diff[i] % chi[i] == 0 {
                let t = diff[i] / chi[i];
                if diff.iter().zip(chi).all(|(a, b)| *a == t * b) {
                    *total += c;
                    continue 'terms;
                }
            }
        }
        classes.push((u.clone(), c));
    }
    classes.iter().all(|(_, t)| *t == 0)
}

/// Re-checks that a kg witness names a condition that really fails.
pub fn kg_witness_holds(fan: &Fan, collapsed: &[GroupRingElement], w: &Witness) -> bool {
    let d = fan.datum();
    let pos = |label: &str| {
        let c = fan.cone_by_label(label).ok()?;
        fan.maximal_cones().iter().position(|&s| s == c)
    };
    match w.kind.as_str() {
        "invariance" => {
            let (Some(i), Some(g)) = (pos(&w.points[0]), d.delta_l.iter().find(|&&k| d.weyl.word(d.weyl.generator_index(k)) == w.points[1]))
            else {
                return false;
            };
            collapsed[i].act(&d.weyl.generators()[*g]) != collapsed[i]
        }
        "3" => {
            let (Some(i), Some(k)) = (pos(&w.points[0]), d.restricted_simple_roots.iter().position(|g| *g == w.character)) else {
                return false;
            };
            let t = d.weyl.element(d.restricted_reflection(k));
            !projection_oracle(&(&collapsed[i].act(t) - &collapsed[i]), &w.character)
        }
        "4" => {
            let (Some(i), Some(j)) = (pos(&w.points[0]), pos(&w.points[1])) else {
                return false;
            };
            !projection_oracle(&(&collapsed[i] - &collapsed[j]), &w.character)
        }
        _ => false,
    }
}

pub fn congruences(fan: &Fan, opts: VerifyOptions) -> Check {
    let d = fan.datum();
    let mut rng = sampling::rng(opts.seed);
    let nmax = fan.maximal_cones().len();
    let fps = enumerate_fixed_points(fan, Scope::X);
    for s in 0..opts.samples {
        let f = sampling::random_wh_orbit_sum(&mut rng, d, 2, 2);
        let collapsed = vec![f.clone(); nmax];
        let m = kg_membership(fan, &collapsed).map_err(|e| e.to_string())?;
        ensure(m.member, || format!("sample {s}: orbit sum rejected: {:?}", m.witness))?;
        let mut perturbed = collapsed.clone();
        let i = rng.gen_range(0..nmax);
        let mu = non_congruent_unit(fan, &mut rng);
        perturbed[i] = &perturbed[i] + &GroupRingElement::monomial(d.char_t.clone(), mu, 1);
        let m = kg_membership(fan, &perturbed).map_err(|e| e.to_string())?;
        ensure(!m.member, || format!("sample {s}: perturbation accepted"))?;
        let w = m.witness.expect("failure carries a witness");
        ensure(kg_witness_holds(fan, &perturbed, &w), || format!("sample {s}: witness {w:?} does not fail"))?;
        if s % 10 == 0 {
            let mut class = expand(fan, &collapsed).map_err(|e| e.to_string())?;
            ensure(kt_membership(fan, &class).map_err(|e| e.to_string())?.member, || format!("sample {s}: expanded class rejected"))?;
            let k = rng.gen_range(0..class.values.len());
            class.values[k] = &class.values[k] + &GroupRingElement::one(d.char_t.clone());
            let m = kt_membership(fan, &class).map_err(|e| e.to_string())?;
            let label = fps.label(fan, k);
            ensure(!m.member && m.witness.as_ref().is_some_and(|w| w.points.contains(&label)), || {
                format!("sample {s}: bumped class not rejected at {label}")
            })?;
        }
    }
    let triples = congruence_triples(opts.seed ^ 0x5eed, opts.oracle_triples)?;
    Ok(format!("{} orbit sums and perturbations; {triples} oracle triples", opts.samples))
}

/// A character μ such that adding e^μ to one f_σ breaks a congruence:
/// moved by W_L, or (without W_L) moved off μ + Zγ by some s_α s_{θ(α)}, or
/// any μ when F₊ has several maximal cones.
fn non_congruent_unit(fan: &Fan, rng: &mut impl Rng) -> Vec<i64> {
    let d = fan.datum();
    loop {
        let mu = sampling::random_vector(rng, d.rank(), 2);
        if fan.maximal_cones().len() > 1 {
            return mu;
        }
        if d.delta_l.iter().any(|&i| d.weyl.generators()[i].apply(&mu) != mu) {
            return mu;
        }
        let sigma = fan.maximal_cones()[0];
        let walls = fan.facet_orthogonal_restricted_roots(sigma).expect("maximal");
        let breaks = walls.iter().any(|&k| {
            let moved = d.weyl.element(d.restricted_reflection(k)).apply(&mu);
            let diff: Vec<i64> = moved.iter().zip(&mu).map(|(a, b)| a - b).collect();
            let e = GroupRingElement::monomial(d.char_t.clone(), diff, 1);
            !projection_oracle(&(&e - &GroupRingElement::one(d.char_t.clone())), &d.restricted_simple_roots[k])
        });
        if breaks {
            return mu;
        }
    }
}

fn congruence_triples(seed: u64, n: usize) -> Result<usize, String> {
    use crate::lattice::Lattice;
    use std::sync::Arc;
    let mut rng = sampling::rng(seed);
    for t in 0..n {
        let rank = rng.gen_range(1..=4);
        let l = Arc::new(Lattice::with_prefix("Z", "e", rank));
        let chi = loop {
            let c = sampling::random_vector(&mut rng, rank, 3);
            if c.iter().any(|&x| x != 0) {
                break c;
            }
        };
        let f = sampling::random_element(&mut rng, &l, 4, 3, 4);
        let g = if rng.gen_bool(0.5) {
            let h = sampling::random_element(&mut rng, &l, 3, 3, 4);
            let minus: Vec<i64> = chi.iter().map(|x| -x).collect();
            let one = GroupRingElement::one(l.clone());
            &f + &(&(&one - &GroupRingElement::monomial(l.clone(), minus, 1)) * &h)
        } else {
            sampling::random_element(&mut rng, &l, 4, 3, 4)
        };
        let ours = congruent_mod(&f, &g, &chi).map_err(|e| e.to_string())?;
        ensure(ours == projection_oracle(&(&f - &g), &chi), || format!("triple {t}: congruence disagrees with the oracle"))?;
    }
    Ok(n)
}

/// Decomposition of the product of the reassembled elements.
pub fn oracle_product(model: &GradedModel, a: &GradedDecomposition, b: &GradedDecomposition) -> Result<GradedDecomposition, String> {
    let raw = &model.reassemble(a) * &model.reassemble(b);
    model.decompose(&model.full().normal_form(&raw).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

pub fn decomposition(fan: &Fan, opts: VerifyOptions) -> Check {
    let model = GradedModel::new(fan).map_err(|e| e.to_string())?;
    let d = fan.datum();
    let mut rng = sampling::rng(opts.seed.wrapping_add(4));
    for s in 0..opts.samples {
        let f = sampling::random_invariant(&mut rng, &model, 2, 1);
        let dec = model.decompose(&f).map_err(|e| format!("sample {s}: {e}"))?;
        ensure(model.reassemble(&dec) == f, || format!("sample {s}: reassembly differs"))?;
        for (&t, c) in &dec.components {
            ensure(model.positive().in_component(c, t), || format!("sample {s}: component outside C_tau"))?;
            let full = model.to_full(c);
            ensure(d.weyl_l.iter().all(|&w| model.act(w, &full) == full), || format!("sample {s}: component not W_L-invariant"))?;
        }
    }
    let ncones = fan.cones().len();
    let mut zero_products = 0;
    for s in 0..opts.samples {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng| vec![rng.gen_range(0..ncones), rng.gen_range(0..ncones)];
        let (ca, cb) = (pick(&mut rng), pick(&mut rng));
        let a = sampling::random_decomposition(&mut rng, &model, &ca, 2, 1);
        let b = sampling::random_decomposition(&mut rng, &model, &cb, 2, 1);
        let product = model.multiply(&a, &b);
        let oracle = oracle_product(&model, &a, &b).map_err(|e| format!("product {s}: {e}"))?;
        ensure(product == oracle, || format!("product {s}: graded product differs from the oracle"))?;
    }
    for t in 0..ncones {
        for u in 0..ncones {
            if fan.join(t, u).is_none() {
                let a = sampling::random_decomposition(&mut rng, &model, &[t], 2, 1);
                let b = sampling::random_decomposition(&mut rng, &model, &[u], 2, 1);
                let (Some(ct), Some(cu)) = (a.component(t), b.component(u)) else {
                    continue;
                };
                let local = model.to_full(&(ct * cu));
                ensure(model.full().normal_form(&local).map_err(|e| e.to_string())?.is_zero(), || {
                    format!("components on {} and {} multiply to a nonzero class", fan.cone_label(t), fan.cone_label(u))
                })?;
                let dec = oracle_product(&model, &a, &b)?;
                ensure(model.multiply(&a, &b).is_zero() && dec.is_zero(), || "non-spanning product is not zero".into())?;
                zero_products += 1;
            }
        }
    }
    Ok(format!("{} reassemblies, {} products, {zero_products} non-spanning pairs", opts.samples, opts.samples))
}

pub fn kiso(d: &SymmetricDatum, opts: VerifyOptions) -> Check {
    let mut rng = sampling::rng(opts.seed.wrapping_add(5));
    let product = product_lattice(d);
    for s in 0..opts.samples {
        let f = sampling::random_element(&mut rng, &d.char_t, 4, 2, 5);
        let g = sampling::random_element(&mut rng, &d.char_t, 4, 2, 5);
        let sf = kiso_split(d, &f).map_err(|e| e.to_string())?;
        let sg = kiso_split(d, &g).map_err(|e| e.to_string())?;
        ensure(kiso_join(d, &sf).map_err(|e| e.to_string())? == f, || format!("sample {s}: join∘split ≠ id"))?;
        ensure(kiso_split(d, &(&f * &g)).map_err(|e| e.to_string())? == &sf * &sg, || format!("sample {s}: split is not multiplicative"))?;
        let h = sampling::random_element(&mut rng, &product, 4, 2, 5);
        let k = sampling::random_element(&mut rng, &product, 4, 2, 5);
        let jh = kiso_join(d, &h).map_err(|e| e.to_string())?;
        let jk = kiso_join(d, &k).map_err(|e| e.to_string())?;
        ensure(kiso_split(d, &jh).map_err(|e| e.to_string())? == h, || format!("sample {s}: split∘join ≠ id"))?;
        ensure(kiso_join(d, &(&h * &k)).map_err(|e| e.to_string())? == &jh * &jk, || format!("sample {s}: join is not multiplicative"))?;
    }
    Ok(format!("{} round trips each way", opts.samples))
}

pub fn splitting(d: &SymmetricDatum) -> Check {
    let r = d.simply_connected_splitting().map_err(|e| e.to_string())?;
    if is_pgl_psp(d, 2) {
        ensure(r.splitting_exists && !r.wl_invariant_splitting_exists, || format!("SL(4): {r:?}"))?;
    }
    Ok(format!("splitting_exists={} WL_invariant_splitting_exists={}", r.splitting_exists, r.wl_invariant_splitting_exists))
}

pub fn presentation(fan: &Fan) -> Check {
    let report = wonderful_presentation_check(fan).map_err(|e| e.to_string())?;
    Ok(format!("{} relations vanish at {} fixed points", report.relations.len(), report.fixed_points))
}

pub fn multifiltration(fan: &Fan, opts: VerifyOptions) -> Check {
    let model = GradedModel::new(fan).map_err(|e| e.to_string())?;
    let mut rng = sampling::rng(opts.seed.wrapping_add(8));
    let ncones = fan.cones().len();
    for s in 0..opts.samples {
        let (t, u) = (rng.gen_range(0..ncones), rng.gen_range(0..ncones));
        let a = sampling::random_filtered(&mut rng, &model, t, 2, 1);
        let b = sampling::random_filtered(&mut rng, &model, u, 2, 1);
        let p = oracle_product(&model, &a, &b)?;
        match fan.join(t, u) {
            Some(g) => ensure(filtration_membership(fan, &p, g).map_err(|e| e.to_string())?, || {
                format!("sample {s}: F_{}·F_{} not in F_{}", fan.cone_label(t), fan.cone_label(u), fan.cone_label(g))
            })?,
            None => ensure(p.is_zero(), || format!("sample {s}: product of non-spanning filtrations is nonzero"))?,
        }
        let z = sampling::random_filtered(&mut rng, &model, 0, 2, 1);
        let q = oracle_product(&model, &z, &a)?;
        ensure(filtration_membership(fan, &q, t).map_err(|e| e.to_string())?, || format!("sample {s}: F_0·F_tau not in F_tau"))?;
    }
    Ok(format!("{} filtered products", opts.samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_passes_with_small_samples() {
        let opts = VerifyOptions { seed: 1, samples: 5, oracle_triples: 50 };
        for (name, spec) in catalog::entries() {
            let fan = spec.build().unwrap();
            for r in verify(&fan, opts) {
                assert!(r.passed, "{name}: {}", r.line());
            }
        }
    }

    #[test]
    fn oracle_rejects_units() {
        let fan = catalog::pgl6_wonderful();
        let one = GroupRingElement::one(fan.datum().char_t.clone());
        assert!(!projection_oracle(&one, &[1, 0, 0, 0, 0]));
        assert!(projection_oracle(&GroupRingElement::zero(fan.datum().char_t.clone()), &[0, 1, 0, 0, 0]));
    }
}
