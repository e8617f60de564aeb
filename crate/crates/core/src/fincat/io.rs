//! JSON instance files: a category, named functors, transformations,
//! endofunctors, families, sliced objects, and the roles each check reads.
//! The schema is described in `docs/instance_format.md`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use super::compat::{exp_compat_check, exp_compat_check_slice};
use super::endo::{Endofunctor, EndofunctorData, NaturalFamily};
use super::enumerate::Bound;
use super::exponential::verify_ccc;
use super::localization::{localization_check, IteratedObject};
use super::slice::{verify_slice_ccc, SlicedObject};
use super::{FinCat, FinCatError, FinFunctor, NatTrans};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    id: String,
    dom: String,
    cod: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctor {
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    maps: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNatTrans {
    source: String,
    target: String,
    components: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEndofunctor {
    objects: BTreeMap<String, String>,
    #[serde(default)]
    morphisms: BTreeMap<String, String>,
    p: Option<BTreeMap<String, String>>,
    i: Option<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    source: String,
    target: String,
    components: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSlice {
    structure: String,
}

/// Which named entries each check reads.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRoles {
    pub ccc: Option<CccRole>,
    pub slice_ccc: Option<CccRole>,
    pub exp_compat: Option<CompatRole>,
    pub localization: Option<LocalizationRole>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CccRole {
    pub base: String,
    pub exponent: String,
    pub probes: Vec<String>,
    #[serde(default)]
    pub probe_morphisms: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompatRole {
    pub endofunctor: String,
    pub base: String,
    pub exponent: String,
    pub family: Option<String>,
    /// Sliced objects; when given, the slice form runs too.
    pub slice_base: Option<String>,
    pub slice_exponent: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizationRole {
    pub endofunctor: String,
    pub object: String,
    pub extra: String,
    /// Pairs `[slice, transformation into the object's total]`.
    #[serde(default)]
    pub over: Vec<(String, String)>,
    pub family: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default)]
    name: String,
    objects: Vec<String>,
    morphisms: Vec<RawMorphism>,
    #[serde(default)]
    comp: BTreeMap<String, String>,
    #[serde(default)]
    functors: BTreeMap<String, RawFunctor>,
    #[serde(default)]
    nat_trans: BTreeMap<String, RawNatTrans>,
    #[serde(default)]
    endofunctors: BTreeMap<String, RawEndofunctor>,
    #[serde(default)]
    families: BTreeMap<String, RawFamily>,
    #[serde(default)]
    slices: BTreeMap<String, RawSlice>,
    #[serde(default)]
    checks: CheckRoles,
}

/// A parsed, validated instance file.
#[derive(Clone, Debug)]
pub struct Instance {
    pub cat: Arc<FinCat>,
    pub functors: BTreeMap<String, Arc<FinFunctor>>,
    pub nat_trans: BTreeMap<String, NatTrans>,
    pub endofunctors: BTreeMap<String, Endofunctor>,
    pub data: BTreeMap<String, EndofunctorData>,
    pub families: BTreeMap<String, NaturalFamily>,
    pub slices: BTreeMap<String, SlicedObject>,
    pub checks: CheckRoles,
}

/// The checks `model check` can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Ccc,
    SliceCcc,
    ExpCompat,
    Localization,
}

impl FromStr for CheckKind {
    type Err = FinCatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ccc" => Ok(CheckKind::Ccc),
            "slice-ccc" => Ok(CheckKind::SliceCcc),
            "exp-compat" => Ok(CheckKind::ExpCompat),
            "localization" => Ok(CheckKind::Localization),
            other => Err(FinCatError::Instance(format!("unknown check `{other}`"))),
        }
    }
}

fn err(msg: impl Into<String>) -> FinCatError {
    FinCatError::Instance(msg.into())
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, what: &str, name: &str) -> Result<&'a T, FinCatError> {
    map.get(name).ok_or_else(|| err(format!("unknown {what} `{name}`")))
}

fn element(f: &FinFunctor, o: usize, label: &str) -> Result<usize, FinCatError> {
    f.element(o, label)
        .ok_or_else(|| err(format!("`{label}` is not an element at `{}`", f.cat().objects()[o])))
}

pub fn parse_instance(text: &str) -> Result<Instance, FinCatError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    let objects: Vec<&str> = raw.objects.iter().map(String::as_str).collect();
    let arrows: Vec<(&str, &str, &str)> = raw.morphisms.iter().map(|m| (m.id.as_str(), m.dom.as_str(), m.cod.as_str())).collect();
    let mut composites = Vec::new();
    for (key, h) in &raw.comp {
        let (g, f) = key.split_once('.').ok_or_else(|| err(format!("composite key `{key}` is not `g.f`")))?;
        composites.push((g, f, h.as_str()));
    }
    let name = if raw.name.is_empty() { "instance" } else { raw.name.as_str() };
    let cat = Arc::new(FinCat::build(name, &objects, &arrows, &composites)?);
    let report = cat.validate();
    if !report.all_passed() {
        return Err(FinCatError::Category(report.to_string()));
    }

    let mut functors = BTreeMap::new();
    for (fname, rf) in &raw.functors {
        let mut labels = vec![Vec::new(); cat.object_count()];
        for (o, set) in &rf.sets {
            labels[cat.object(o)?] = set.clone();
        }
        let mut maps: Vec<Option<Vec<usize>>> = vec![None; cat.morphism_count()];
        for o in 0..cat.object_count() {
            maps[cat.identity(o)] = Some((0..labels[o].len()).collect());
        }
        for (m, images) in &rf.maps {
            let m = cat.morphism(m)?;
            let c = cat.cod(m);
            let table = images
                .iter()
                .map(|l| labels[c].iter().position(|x| x == l).ok_or_else(|| err(format!("`{l}` is not in the set at `{}`", cat.objects()[c]))))
                .collect::<Result<_, _>>()?;
            maps[m] = Some(table);
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(m, t)| t.ok_or_else(|| err(format!("functor `{fname}` gives no table for `{}`", cat.arrow(m).name))))
            .collect::<Result<_, _>>()?;
        let f = FinFunctor::new(&cat, labels, maps)?;
        if let Some(c) = f.validate().first_failure() {
            return Err(FinCatError::NotFunctorial(format!("`{fname}`: {}", c.witness.clone().unwrap_or_default())));
        }
        functors.insert(fname.clone(), Arc::new(f));
    }

    let mut nat_trans = BTreeMap::new();
    for (tname, rt) in &raw.nat_trans {
        let source = lookup(&functors, "functor", &rt.source)?;
        let target = lookup(&functors, "functor", &rt.target)?;
        let mut comps = vec![Vec::new(); cat.object_count()];
        for (o, images) in &rt.components {
            let o = cat.object(o)?;
            comps[o] = images.iter().map(|l| element(target, o, l)).collect::<Result<_, _>>()?;
        }
        let t = NatTrans::natural(source, target, comps).map_err(|e| err(format!("`{tname}`: {e}")))?;
        nat_trans.insert(tname.clone(), t);
    }

    let mut endofunctors = BTreeMap::new();
    let mut data = BTreeMap::new();
    endofunctors.insert("Id".to_string(), Endofunctor::identity(&cat));
    data.insert("Id".to_string(), EndofunctorData::identity(&cat));
    for (gname, rg) in &raw.endofunctors {
        let objs: Vec<(&str, &str)> = rg.objects.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let mors: Vec<(&str, &str)> = rg.morphisms.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let g = Endofunctor::from_names(gname, &cat, &objs, &mors)?;
        if let Some(c) = g.validate().first_failure() {
            return Err(FinCatError::NotFunctorial(format!("`{gname}`: {}", c.witness.clone().unwrap_or_default())));
        }
        match (&rg.p, &rg.i) {
            (Some(p), Some(i)) => {
                let p: Vec<(&str, &str)> = p.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                let i: Vec<(&str, &str)> = i.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                let d = EndofunctorData::from_names(g.clone(), &p, &i)?;
                if let Some(c) = d.validate().first_failure() {
                    return Err(err(format!("`{gname}`: {}", c.witness.clone().unwrap_or_default())));
                }
                data.insert(gname.clone(), d);
            }
            (None, None) => {}
            _ => return Err(err(format!("`{gname}` gives only one of p and i"))),
        }
        endofunctors.insert(gname.clone(), g);
    }

    let mut families = BTreeMap::new();
    for (fname, rf) in &raw.families {
        let source = lookup(&endofunctors, "endofunctor", &rf.source)?;
        let target = lookup(&endofunctors, "endofunctor", &rf.target)?;
        let comps: Vec<(&str, &str)> = rf.components.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let eta = NaturalFamily::from_names(source, target, &comps)?;
        if let Some(w) = eta.naturality_witness() {
            return Err(FinCatError::NonNatural(format!("`{fname}`: {w}")));
        }
        families.insert(fname.clone(), eta);
    }

    let mut slices = BTreeMap::new();
    for (sname, rs) in &raw.slices {
        let t = lookup(&nat_trans, "transformation", &rs.structure)?;
        slices.insert(sname.clone(), SlicedObject::new(t.clone())?);
    }

    Ok(Instance { cat, functors, nat_trans, endofunctors, data, families, slices, checks: raw.checks })
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, FinCatError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    parse_instance(&text)
}

impl Instance {
    fn functor(&self, name: &str) -> Result<&Arc<FinFunctor>, FinCatError> {
        lookup(&self.functors, "functor", name)
    }

    fn slice(&self, name: &str) -> Result<&SlicedObject, FinCatError> {
        lookup(&self.slices, "slice", name)
    }

    fn transformations(&self, names: &[String]) -> Result<Vec<NatTrans>, FinCatError> {
        names.iter().map(|n| lookup(&self.nat_trans, "transformation", n).cloned()).collect()
    }

    /// Runs one check from the roles; returns whether it passed and a JSON
    /// report.
    pub fn run_check(&self, kind: CheckKind, bound: Bound) -> Result<(bool, Value), FinCatError> {
        let missing = |role: &str| err(format!("the instance has no `{role}` role under `checks`"));
        match kind {
            CheckKind::Ccc => {
                let role = self.checks.ccc.as_ref().ok_or_else(|| missing("ccc"))?;
                let probes = role.probes.iter().map(|p| self.functor(p).cloned()).collect::<Result<Vec<_>, _>>()?;
                let r = verify_ccc(self.functor(&role.base)?, self.functor(&role.exponent)?, &probes, &self.transformations(&role.probe_morphisms)?, bound)?;
                Ok((r.passed(), json!({"check": "ccc", "passed": r.passed(), "outcomes": r.outcomes})))
            }
            CheckKind::SliceCcc => {
                let role = self.checks.slice_ccc.as_ref().ok_or_else(|| missing("slice_ccc"))?;
                let probes = role.probes.iter().map(|p| self.slice(p).cloned()).collect::<Result<Vec<_>, _>>()?;
                let r = verify_slice_ccc(self.slice(&role.base)?, self.slice(&role.exponent)?, &probes, &self.transformations(&role.probe_morphisms)?, bound)?;
                Ok((r.passed(), json!({"check": "slice-ccc", "passed": r.passed(), "outcomes": r.outcomes})))
            }
            CheckKind::ExpCompat => {
                let role = self.checks.exp_compat.as_ref().ok_or_else(|| missing("exp_compat"))?;
                let g = lookup(&self.endofunctors, "endofunctor", &role.endofunctor)?;
                let eta = role.family.as_deref().map(|f| lookup(&self.families, "family", f)).transpose()?;
                let plain = exp_compat_check(g, self.functor(&role.base)?, self.functor(&role.exponent)?, eta, bound)?;
                let mut passed = plain.passed();
                let mut out = json!({"check": "exp-compat", "plain": plain});
                if let (Some(a), Some(b)) = (&role.slice_base, &role.slice_exponent) {
                    let data = lookup(&self.data, "endofunctor with p and i", &role.endofunctor)?;
                    let second = match eta {
                        Some(eta) => {
                            let target = self
                                .data
                                .values()
                                .find(|d| d.functor == eta.target)
                                .ok_or_else(|| err("the family's target has no p and i"))?;
                            Some((target, eta))
                        }
                        None => None,
                    };
                    let sliced = exp_compat_check_slice(data, self.slice(a)?, self.slice(b)?, second, bound)?;
                    passed &= sliced.passed();
                    out["sliced"] = json!(sliced);
                }
                out["passed"] = json!(passed);
                Ok((passed, out))
            }
            CheckKind::Localization => {
                let role = self.checks.localization.as_ref().ok_or_else(|| missing("localization"))?;
                let data = lookup(&self.data, "endofunctor with p and i", &role.endofunctor)?;
                let a = self.slice(&role.object)?;
                let objects = role
                    .over
                    .iter()
                    .map(|(s, t)| IteratedObject::new(a, self.slice(s)?.clone(), lookup(&self.nat_trans, "transformation", t)?.clone()))
                    .collect::<Result<Vec<_>, _>>()?;
                let second = match role.family.as_deref() {
                    Some(f) => {
                        let eta = lookup(&self.families, "family", f)?;
                        let target = self.data.values().find(|d| d.functor == eta.target).ok_or_else(|| err("the family's target has no p and i"))?;
                        Some((target, eta))
                    }
                    None => None,
                };
                let r = localization_check(data, a, self.functor(&role.extra)?, &objects, second, bound)?;
                let passed = r.all_passed();
                Ok((passed, json!({"check": "localization", "passed": passed, "report": r})))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ARROW: &str = r#"{
        "name": "arrow",
        "objects": ["A", "B"],
        "morphisms": [{"id": "f", "dom": "A", "cod": "B"}],
        "functors": {
            "M": {"sets": {"A": ["a0", "a1"], "B": ["b0", "b1"]}, "maps": {"f": ["b1", "b0"]}},
            "One": {"sets": {"A": ["*"], "B": ["*"]}, "maps": {"f": ["*"]}}
        },
        "nat_trans": {"bang": {"source": "M", "target": "One", "components": {"A": ["*", "*"], "B": ["*", "*"]}}},
        "slices": {"S": {"structure": "bang"}},
        "checks": {"ccc": {"base": "M", "exponent": "M", "probes": ["One"]}}
    }"#;

    #[test]
    fn parses_and_runs() {
        let inst = parse_instance(ARROW).unwrap();
        assert_eq!(inst.functors["M"].sizes(), vec![2, 2]);
        let (passed, report) = inst.run_check(CheckKind::Ccc, Bound(100_000)).unwrap();
        assert!(passed, "{report}");
        assert!(matches!(inst.run_check(CheckKind::Localization, Bound(10)), Err(FinCatError::Instance(_))));
    }

    #[test]
    fn rejects_bad_tables() {
        let bad = ARROW.replace(r#""f": ["b1", "b0"]"#, r#""f": ["b1", "b9"]"#);
        assert!(parse_instance(&bad).is_err());
        let non_natural = ARROW.replace(r#"{"A": ["*", "*"], "B": ["*", "*"]}"#, r#"{"A": ["*"], "B": ["*", "*"]}"#);
        assert!(parse_instance(&non_natural).is_err());
    }
}
