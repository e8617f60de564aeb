//! Exponentials `M^N` of set-valued functors, built as the subset of the
//! product of function families cut out by the compatibility equations, and
//! a brute-force check of the currying bijection.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::report::ValidationReport;

use super::category::{Mor, Obj};
use super::csp::Csp;
use super::enumerate::{for_each_nat, Bound};
use super::functor::{FinFunctor, NatTrans};
use super::limits::product;
use super::FinCatError;

/// One factor of a family: the function assigned to `mor`, defined on
/// `domain` (elements of the exponent at `cod mor`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Slot {
    pub mor: Mor,
    pub domain: Vec<usize>,
    pub offset: usize,
}

/// All compatible families at one object, each stored flat (slot values
/// concatenated) and indexed for reverse lookup.
#[derive(Clone, Debug)]
pub(crate) struct FamilySpace {
    pub slots: Vec<Slot>,
    pub families: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FamilySpace {
    /// Families at `w` with `domains[k]` the domain of the function attached
    /// to the `k`-th morphism out of `w`, and `codomains[k]` the values it
    /// may take.
    pub(crate) fn build(
        base: &FinFunctor,
        exponent: &FinFunctor,
        w: Obj,
        domains: Vec<Vec<usize>>,
        codomains: Vec<Vec<usize>>,
        bound: Bound,
    ) -> Result<FamilySpace, FinCatError> {
        let cat = base.cat();
        let outgoing = cat.out_of(w);
        let mut slots = Vec::with_capacity(outgoing.len());
        let mut offset = 0;
        for (&mor, domain) in outgoing.iter().zip(domains) {
            let len = domain.len();
            slots.push(Slot { mor, domain, offset });
            offset += len;
        }
        let mut ranges = Vec::with_capacity(offset);
        for s in &slots {
            ranges.extend(std::iter::repeat(base.size(cat.cod(s.mor))).take(s.domain.len()));
        }
        let mut csp = Csp::new(&ranges);
        for (s, allowed) in slots.iter().zip(&codomains) {
            for j in 0..s.domain.len() {
                csp.restrict(s.offset + j, allowed.iter().copied());
            }
        }
        let candidates = csp.candidates();
        if candidates > bound.0 as u128 {
            return Err(FinCatError::SizeLimit {
                what: format!("exponential families at `{}`", cat.objects()[w]),
                candidates,
                bound: bound.0,
            });
        }
        let slot_of: HashMap<Mor, usize> = slots.iter().enumerate().map(|(k, s)| (s.mor, k)).collect();
        for s in &slots {
            let v1 = cat.cod(s.mor);
            for &next in cat.out_of(v1) {
                if cat.is_identity(next) {
                    continue;
                }
                let target = &slots[slot_of[&cat.comp(next, s.mor)]];
                for (j, &n) in s.domain.iter().enumerate() {
                    let moved = exponent.apply(next, n);
                    let Some(j2) = target.domain.iter().position(|&d| d == moved) else {
                        return Err(FinCatError::Functor(format!(
                            "exponent action along `{}` leaves the family domain",
                            cat.arrow(next).name
                        )));
                    };
                    csp.constrain(s.offset + j, base.map(next), target.offset + j2);
                }
            }
        }
        let mut families = Vec::new();
        csp.solve(bound.0, &mut |flat| families.push(flat.to_vec())).map_err(|_| FinCatError::SizeLimit {
            what: format!("exponential search at `{}`", cat.objects()[w]),
            candidates,
            bound: bound.0,
        })?;
        let index = families.iter().enumerate().map(|(k, f)| (f.clone(), k)).collect();
        Ok(FamilySpace { slots, families, index })
    }

    pub(crate) fn lookup(&self, flat: &[usize]) -> Option<usize> {
        self.index.get(flat).copied()
    }

    pub(crate) fn slot(&self, mor: Mor) -> Option<&Slot> {
        self.slots.iter().find(|s| s.mor == mor)
    }

    /// `s_mor` of family `k`, as values on the slot's domain.
    pub(crate) fn values(&self, k: usize, mor: Mor) -> &[usize] {
        let s = self.slot(mor).expect("morphism out of this object");
        &self.families[k][s.offset..s.offset + s.domain.len()]
    }

    /// The family `φ' ↦ s_{φ' ∘ ψ}` at the codomain of `ψ`, as a flat vector
    /// laid out for `target`.
    pub(crate) fn reindex(&self, k: usize, psi: Mor, target: &FamilySpace, cat: &super::FinCat) -> Vec<usize> {
        let mut flat = Vec::with_capacity(target.families.first().map_or(0, Vec::len));
        for s in &target.slots {
            flat.extend_from_slice(self.values(k, cat.comp(s.mor, psi)));
        }
        flat
    }

    pub(crate) fn render(&self, k: usize, base: &FinFunctor, cat: &super::FinCat) -> String {
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|s| {
                let v = cat.cod(s.mor);
                let vals: Vec<&str> = self.values(k, s.mor).iter().map(|&y| base.label(v, y)).collect();
                format!("{}:{}", cat.arrow(s.mor).name, vals.join(" "))
            })
            .collect();
        format!("<{}>", parts.join("; "))
    }
}

/// `M^N` together with the family data behind each element.
#[derive(Clone, Debug)]
pub struct Exponential {
    base: Arc<FinFunctor>,
    exponent: Arc<FinFunctor>,
    spaces: Vec<FamilySpace>,
    functor: Arc<FinFunctor>,
}

impl Exponential {
    pub fn new(base: &Arc<FinFunctor>, exponent: &Arc<FinFunctor>, bound: Bound) -> Result<Exponential, FinCatError> {
        if base.cat() != exponent.cat() {
            return Err(FinCatError::CategoryMismatch);
        }
        let cat = base.cat().clone();
        let spaces = (0..cat.object_count())
            .map(|w| {
                let outgoing = cat.out_of(w);
                let domains = outgoing.iter().map(|&m| (0..exponent.size(cat.cod(m))).collect()).collect();
                let codomains = outgoing.iter().map(|&m| (0..base.size(cat.cod(m))).collect()).collect();
                FamilySpace::build(base, exponent, w, domains, codomains, bound)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let labels = spaces
            .iter()
            .map(|sp| (0..sp.families.len()).map(|k| sp.render(k, base, &cat)).collect())
            .collect();
        let mut maps = Vec::with_capacity(cat.morphism_count());
        for psi in 0..cat.morphism_count() {
            let (w1, w2) = (cat.dom(psi), cat.cod(psi));
            let mut table = Vec::with_capacity(spaces[w1].families.len());
            for k in 0..spaces[w1].families.len() {
                let flat = spaces[w1].reindex(k, psi, &spaces[w2], &cat);
                table.push(spaces[w2].lookup(&flat).ok_or_else(|| {
                    FinCatError::NotFunctorial(format!("reindexing along `{}` leaves the exponential", cat.arrow(psi).name))
                })?);
            }
            maps.push(table);
        }
        let functor = Arc::new(FinFunctor::new(&cat, labels, maps)?);
        Ok(Exponential { base: base.clone(), exponent: exponent.clone(), spaces, functor })
    }

    pub fn functor(&self) -> &Arc<FinFunctor> {
        &self.functor
    }

    pub fn base(&self) -> &Arc<FinFunctor> {
        &self.base
    }

    pub fn exponent(&self) -> &Arc<FinFunctor> {
        &self.exponent
    }

    /// The function `s_φ: N(V) -> M(V)` of element `k` at `dom φ`.
    pub fn component(&self, k: usize, phi: Mor) -> &[usize] {
        let w = self.functor.cat().dom(phi);
        self.spaces[w].values(k, phi)
    }

    /// Element at `w` with the given functions, one per morphism out of `w`
    /// in index order.
    pub fn lookup(&self, w: Obj, family: &[Vec<usize>]) -> Option<usize> {
        self.spaces[w].lookup(&family.concat())
    }

    pub(crate) fn space(&self, w: Obj) -> &FamilySpace {
        &self.spaces[w]
    }

    /// Copy whose action along `mor` is shifted cyclically by one element
    /// (a deliberately wrong reindexing).
    pub fn with_shifted_action(&self, mor: Mor) -> Exponential {
        let mut maps = self.functor.maps().to_vec();
        let table = &mut maps[mor];
        if !table.is_empty() {
            table.rotate_left(1);
        }
        let cat = self.functor.cat();
        let labels = (0..cat.object_count()).map(|o| self.functor.labels(o).to_vec()).collect();
        let functor = Arc::new(FinFunctor::new(cat, labels, maps).expect("same shape"));
        Exponential { functor, ..self.clone() }
    }

    /// `ev: M^N × N => M`, `(s, n) ↦ s_id(n)`, with the product it lives on.
    pub fn evaluation(&self) -> Result<(Arc<FinFunctor>, NatTrans), FinCatError> {
        let (prod, _, _) = product(&self.functor, &self.exponent)?;
        let cat = self.functor.cat();
        let comps = (0..cat.object_count())
            .map(|w| {
                let nsize = self.exponent.size(w);
                (0..prod.size(w)).map(|pair| self.component(pair / nsize, cat.identity(w))[pair % nsize]).collect()
            })
            .collect();
        Ok((prod.clone(), NatTrans::new(&prod, &self.base, comps)?))
    }

    /// `λθ` for `θ: P × N => M` given flat (pairs indexed `p * |N(V)| + n`).
    fn curry_flat(&self, probe: &FinFunctor, theta: &[usize]) -> Result<Vec<usize>, String> {
        let cat = self.functor.cat();
        let starts = starts(&cat_sizes(probe, &self.exponent));
        let mut out = Vec::new();
        for w in 0..cat.object_count() {
            let space = &self.spaces[w];
            for p in 0..probe.size(w) {
                let mut flat = Vec::with_capacity(space.families.first().map_or(0, Vec::len));
                for s in &space.slots {
                    let v = cat.cod(s.mor);
                    let moved = probe.apply(s.mor, p);
                    let nsize = self.exponent.size(v);
                    flat.extend(s.domain.iter().map(|&n| theta[starts[v] + moved * nsize + n]));
                }
                match space.lookup(&flat) {
                    Some(k) => out.push(k),
                    None => {
                        return Err(format!(
                            "curried family at `{}` for {} is not compatible",
                            cat.objects()[w],
                            probe.label(w, p)
                        ))
                    }
                }
            }
        }
        Ok(out)
    }

    fn uncurry_flat(&self, probe: &FinFunctor, sigma: &[usize]) -> Vec<usize> {
        let cat = self.functor.cat();
        let mut out = Vec::new();
        let mut at = 0;
        for w in 0..cat.object_count() {
            let id = cat.identity(w);
            for p in 0..probe.size(w) {
                let s = self.spaces[w].values(sigma[at + p], id);
                out.extend_from_slice(s);
            }
            at += probe.size(w);
        }
        out
    }

    /// `λθ: P => M^N` for `θ: P × N => M`.
    pub fn curry(&self, theta: &NatTrans) -> Result<NatTrans, FinCatError> {
        let probe = probe_of(theta, &self.exponent)?;
        let sigma = self.curry_flat(&probe, &theta.flat()).map_err(FinCatError::NonNatural)?;
        Ok(NatTrans::from_flat(&probe, &self.functor, &sigma))
    }

    /// Inverse of [`Exponential::curry`]: `(p, n) ↦ σ(p)_id(n)`.
    pub fn uncurry(&self, sigma: &NatTrans, pn: &Arc<FinFunctor>) -> Result<NatTrans, FinCatError> {
        let theta = self.uncurry_flat(sigma.source(), &sigma.flat());
        NatTrans::new(pn, &self.base, split(&theta, &pn.sizes()))
    }
}

fn cat_sizes(probe: &FinFunctor, exponent: &FinFunctor) -> Vec<usize> {
    (0..probe.cat().object_count()).map(|o| probe.size(o) * exponent.size(o)).collect()
}

pub(crate) fn starts(sizes: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .iter()
        .map(|&n| {
            let s = acc;
            acc += n;
            s
        })
        .collect()
}

pub(crate) fn split(flat: &[usize], sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut at = 0;
    sizes
        .iter()
        .map(|&n| {
            let v = flat[at..at + n].to_vec();
            at += n;
            v
        })
        .collect()
}

/// Recovers `P` from `θ: P × N => M` by reading the product labels.
fn probe_of(theta: &NatTrans, exponent: &Arc<FinFunctor>) -> Result<Arc<FinFunctor>, FinCatError> {
    let pn = theta.source();
    let cat = pn.cat();
    let mut sizes = Vec::new();
    for o in 0..cat.object_count() {
        let n = exponent.size(o);
        if n == 0 || pn.size(o) % n != 0 {
            return Err(FinCatError::Functor("source is not a product with the exponent".into()));
        }
        sizes.push(pn.size(o) / n);
    }
    let maps = (0..cat.morphism_count())
        .map(|m| {
            let (d, c) = (cat.dom(m), cat.cod(m));
            (0..sizes[d]).map(|p| pn.apply(m, p * exponent.size(d)) / exponent.size(c)).collect()
        })
        .collect();
    Ok(Arc::new(FinFunctor::from_tables(cat, &sizes, maps)?))
}

/// Mixed-radix code of an assignment, for compact hash sets.
pub(crate) struct Radix(Vec<u128>);

impl Radix {
    pub(crate) fn new(ranges: &[usize]) -> Option<Radix> {
        let mut weights = Vec::with_capacity(ranges.len());
        let mut w: u128 = 1;
        for &r in ranges.iter().rev() {
            weights.push(w);
            w = w.checked_mul(r.max(1) as u128)?;
        }
        weights.reverse();
        Some(Radix(weights))
    }

    pub(crate) fn encode(&self, flat: &[usize]) -> u128 {
        flat.iter().zip(&self.0).map(|(&v, &w)| v as u128 * w).sum()
    }
}

pub(crate) fn value_ranges(source: &FinFunctor, target: &FinFunctor) -> Vec<usize> {
    (0..source.cat().object_count()).flat_map(|o| std::iter::repeat(target.size(o)).take(source.size(o))).collect()
}

/// Outcome of the currying check for one probe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeOutcome {
    pub probe: String,
    pub uncurried: u64,
    pub curried: u64,
    pub bijective: bool,
    pub round_trip: bool,
    pub natural_in_probe: bool,
    pub witness: Option<String>,
}

impl ProbeOutcome {
    pub fn passed(&self) -> bool {
        self.bijective && self.round_trip && self.natural_in_probe
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CccReport {
    pub outcomes: Vec<ProbeOutcome>,
}

impl CccReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(ProbeOutcome::passed)
    }

    pub fn to_validation(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        for (k, o) in self.outcomes.iter().enumerate() {
            let name = format!("probe[{k}] {}", o.probe);
            if o.passed() {
                r.pass(name);
            } else {
                r.fail(name, o.witness.clone().unwrap_or_else(|| "failed".into()));
            }
        }
        r
    }
}

/// Shared bijection check between two enumerated hom-sets.
pub(crate) struct Bijection {
    pub uncurried: u64,
    pub curried: u64,
    pub bijective: bool,
    pub round_trip: bool,
    pub witness: Option<String>,
    pub thetas: Vec<Vec<usize>>,
}

/// Enumerates both hom-sets, maps one into the other with `curry`, and
/// checks injectivity, image membership, surjectivity and the inverse.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bijection(
    pn: &FinFunctor,
    base: &FinFunctor,
    pn_allowed: Option<&[Vec<Vec<usize>>]>,
    probe: &FinFunctor,
    exp: &FinFunctor,
    probe_allowed: Option<&[Vec<Vec<usize>>]>,
    curry: &dyn Fn(&[usize]) -> Result<Vec<usize>, String>,
    uncurry: &dyn Fn(&[usize]) -> Vec<usize>,
    bound: Bound,
) -> Result<Bijection, FinCatError> {
    let too_big = || FinCatError::SizeLimit { what: "hom-set encoding".into(), candidates: u128::MAX, bound: bound.0 };
    let theta_code = Radix::new(&value_ranges(pn, base)).ok_or_else(too_big)?;
    let sigma_code = Radix::new(&value_ranges(probe, exp)).ok_or_else(too_big)?;

    let mut thetas = Vec::new();
    for_each_nat(pn, base, pn_allowed, bound, &mut |flat| thetas.push(flat.to_vec()))?;
    let theta_set: HashSet<u128> = thetas.iter().map(|t| theta_code.encode(t)).collect();

    let mut sigmas: HashSet<u128> = HashSet::new();
    let mut sigma_list = Vec::new();
    for_each_nat(probe, exp, probe_allowed, bound, &mut |flat| {
        sigmas.insert(sigma_code.encode(flat));
        sigma_list.push(flat.to_vec());
    })?;

    let mut witness = None;
    let mut images: HashSet<u128> = HashSet::new();
    let mut injective = true;
    let mut into = true;
    let mut round_trip = true;
    for theta in &thetas {
        match curry(theta) {
            Err(w) => {
                into = false;
                witness.get_or_insert(w);
            }
            Ok(sigma) => {
                let code = sigma_code.encode(&sigma);
                if !sigmas.contains(&code) {
                    into = false;
                    witness.get_or_insert_with(|| format!("curried transformation {sigma:?} is not natural"));
                }
                if !images.insert(code) {
                    injective = false;
                    witness.get_or_insert_with(|| format!("two transformations curry to {sigma:?}"));
                }
                if uncurry(&sigma) != *theta {
                    round_trip = false;
                    witness.get_or_insert_with(|| format!("uncurry(curry(θ)) != θ for θ = {theta:?}"));
                }
            }
        }
    }
    for sigma in &sigma_list {
        let theta = uncurry(sigma);
        if !theta_set.contains(&theta_code.encode(&theta)) {
            round_trip = false;
            witness.get_or_insert_with(|| format!("uncurried {sigma:?} is not natural"));
            continue;
        }
        if curry(&theta).ok().as_deref() != Some(sigma.as_slice()) {
            round_trip = false;
            witness.get_or_insert_with(|| format!("curry(uncurry(σ)) != σ for σ = {sigma:?}"));
        }
    }
    let surjective = images.len() == sigmas.len();
    if !surjective && witness.is_none() {
        witness = Some(format!("{} curried images for {} transformations", images.len(), sigmas.len()));
    }
    Ok(Bijection {
        uncurried: thetas.len() as u64,
        curried: sigma_list.len() as u64,
        bijective: injective && into && surjective,
        round_trip,
        witness,
        thetas,
    })
}

/// For every probe `P`: enumerates `Nat(P × N, M)` and `Nat(P, M^N)`, checks
/// that currying is a bijection with inverse `σ ↦ ev ∘ (σ × N)`, and that it
/// commutes with precomposition by each supplied `γ: P' => P` among the probes.
pub fn verify_ccc(
    base: &Arc<FinFunctor>,
    exponent: &Arc<FinFunctor>,
    probes: &[Arc<FinFunctor>],
    probe_morphisms: &[NatTrans],
    bound: Bound,
) -> Result<CccReport, FinCatError> {
    let exp = Exponential::new(base, exponent, bound)?;
    verify_ccc_with(&exp, probes, probe_morphisms, bound)
}

/// [`verify_ccc`] against an already built (possibly tampered) exponential.
pub fn verify_ccc_with(
    exp: &Exponential,
    probes: &[Arc<FinFunctor>],
    probe_morphisms: &[NatTrans],
    bound: Bound,
) -> Result<CccReport, FinCatError> {
    let mut outcomes = Vec::with_capacity(probes.len());
    for probe in probes {
        let (pn, _, _) = product(probe, &exp.exponent)?;
        let curry = |theta: &[usize]| exp.curry_flat(probe, theta);
        let uncurry = |sigma: &[usize]| exp.uncurry_flat(probe, sigma);
        let b = bijection(&pn, &exp.base, None, probe, &exp.functor, None, &curry, &uncurry, bound)?;

        let mut natural = true;
        let mut witness = b.witness.clone();
        for gamma in probe_morphisms.iter().filter(|g| g.target().as_ref() == probe.as_ref()) {
            let source = gamma.source();
            for theta in &b.thetas {
                // θ ∘ (γ × N) on P' × N
                let cat = probe.cat();
                let pn_starts = starts(&cat_sizes(probe, &exp.exponent));
                let mut pulled = Vec::new();
                for w in 0..cat.object_count() {
                    let nsize = exp.exponent.size(w);
                    for p in 0..source.size(w) {
                        for n in 0..nsize {
                            pulled.push(theta[pn_starts[w] + gamma.apply(w, p) * nsize + n]);
                        }
                    }
                }
                let left = exp.curry_flat(source, &pulled);
                let sigma = exp.curry_flat(probe, theta);
                let right = sigma.map(|s| {
                    let s = NatTrans::from_flat(probe, &exp.functor, &s);
                    s.after(gamma).map(|t| t.flat()).unwrap_or_default()
                });
                if left != right {
                    natural = false;
                    witness.get_or_insert_with(|| format!("currying is not natural along a probe morphism at θ = {theta:?}"));
                    break;
                }
            }
        }
        outcomes.push(ProbeOutcome {
            probe: probe.to_string(),
            uncurried: b.uncurried,
            curried: b.curried,
            bijective: b.bijective,
            round_trip: b.round_trip,
            natural_in_probe: natural,
            witness: if b.bijective && b.round_trip && natural { None } else { witness },
        });
    }
    Ok(CccReport { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::limits::{initial, terminal};
    use crate::fincat::FinCat;

    fn terminal_cat() -> Arc<FinCat> {
        Arc::new(FinCat::build("terminal", &["*"], &[], &[]).unwrap())
    }

    fn set(cat: &Arc<FinCat>, n: usize) -> Arc<FinFunctor> {
        Arc::new(FinFunctor::from_tables(cat, &[n], vec![(0..n).collect()]).unwrap())
    }

    #[test]
    fn plain_set_exponential() {
        let c = terminal_cat();
        let e = Exponential::new(&set(&c, 3), &set(&c, 2), Bound(1000)).unwrap();
        assert_eq!(e.functor().size(0), 9);
        let empty = Arc::new(initial(&c));
        let e = Exponential::new(&set(&c, 3), &empty, Bound(1000)).unwrap();
        assert_eq!(e.functor().size(0), 1);
    }

    #[test]
    fn currying_on_sets() {
        let c = terminal_cat();
        let two = set(&c, 2);
        let report = verify_ccc(&two, &two, &[two.clone(), Arc::new(terminal(&c))], &[], Bound(10_000)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!((report.outcomes[0].uncurried, report.outcomes[0].curried), (16, 16));
        let one = Arc::new(terminal(&c));
        let r = verify_ccc(&one, &two, &[two.clone()], &[], Bound(10_000)).unwrap();
        assert_eq!((r.outcomes[0].uncurried, r.outcomes[0].curried), (1, 1));
    }

    #[test]
    fn size_limit_is_reported() {
        let c = terminal_cat();
        let err = Exponential::new(&set(&c, 3), &set(&c, 3), Bound(10)).unwrap_err();
        assert!(matches!(err, FinCatError::SizeLimit { candidates: 27, .. }));
    }
}
