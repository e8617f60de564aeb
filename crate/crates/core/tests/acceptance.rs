//! The eight acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use weilad::algebra::{tensor, WeilAlgebra};
use weilad::fincat::bundled::{self, categories, endofunctor_data, plain_endofunctors, sliced_families};
use weilad::fincat::{
    exp_compat_check, exp_compat_check_slice, flatten_slice, functors_up_to_iso, slice_morphisms, verify_ccc, verify_ccc_with,
    verify_slice_ccc, Bound, CccReport, Exponential, FinFunctor, IteratedObject, NatTrans, SlicedObject,
};
use weilad::functor::{fd_oracle, partials, Normalization};
use weilad::laws::{default_algebras, default_morphisms, rational_corpus, run_law, transcendental_corpus, LawId, LawInstance, Model};
use weilad::scalar::{rational_to_f64, Rational, ScalarMode};

struct Line {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
}

fn bound() -> Bound {
    Bound::default()
}

fn timed(id: usize, title: &'static str, budget: Option<Duration>, run: impl FnOnce() -> Result<String, String>) -> Line {
    let start = Instant::now();
    let outcome = run();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = budget {
        if elapsed > budget {
            passed = false;
            detail.push_str(&format!("; over the {budget:?} budget"));
        }
    }
    Line { id, title, passed, detail, elapsed }
}

fn criterion_1() -> Result<String, String> {
    let d1 = Arc::new(WeilAlgebra::dual(1).unwrap());
    let j2 = Arc::new(WeilAlgebra::jet(2).unwrap());
    let family = vec![
        Arc::new(WeilAlgebra::base()),
        d1.clone(),
        Arc::new(WeilAlgebra::dual(2).unwrap()),
        j2.clone(),
        Arc::new(WeilAlgebra::jet(3).unwrap()),
        Arc::new(WeilAlgebra::mixed(&[1, 1]).unwrap()),
        tensor(&d1, &d1).0,
        tensor(&j2, &d1).0,
    ];
    for w in &family {
        let r = w.validate();
        if let Some(c) = r.first_failure() {
            return Err(format!("{}: {} {:?}", w.name(), c.name, c.witness));
        }
    }
    Ok(format!("{} algebras valid", family.len()))
}

fn criterion_2() -> Result<String, String> {
    let maps = rational_corpus().len();
    let instances = default_algebras().len().min(default_morphisms().len());
    if maps < 10 || instances < 5 {
        return Err(format!("corpus too small: {maps} maps, {instances} instances"));
    }
    let mut runs = 0;
    for law in [LawId::L2, LawId::L3, LawId::L5, LawId::L6, LawId::L8, LawId::L9, LawId::L11] {
        let r = run_law(&LawInstance::new(law, Model::Numeric).mode(ScalarMode::Rational)).map_err(|e| e.to_string())?;
        if !r.passed() || !r.exact || r.max_abs_error != 0.0 {
            return Err(format!("{law}: {} failures, {:?}", r.failures, r.witnesses));
        }
        runs += r.instances_run;
    }
    Ok(format!("{runs} exact comparisons over {maps} maps"))
}

/// Relative error with unit floor, so vanishing derivatives compare absolutely.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn criterion_3() -> Result<String, String> {
    let mut worst_law: f64 = 0.0;
    for law in [LawId::L2, LawId::L3, LawId::L11] {
        let r = run_law(&LawInstance::new(law, Model::Numeric).mode(ScalarMode::Float)).map_err(|e| e.to_string())?;
        if !r.passed() || r.max_rel_error >= 1e-10 {
            return Err(format!("{law}: max relative error {:e}, {:?}", r.max_rel_error, r.witnesses));
        }
        worst_law = worst_law.max(r.max_rel_error);
    }
    let mut worst_fd: f64 = 0.0;
    let mut compared = 0;
    for e in transcendental_corpus() {
        let point: Vec<f64> = e.point.iter().map(rational_to_f64).collect();
        let table = partials(&e.map, &point, &vec![3; point.len()], Normalization::Derivative).map_err(|err| err.to_string())?;
        for (m, values) in &table.entries {
            if m.degree() > 3 {
                continue;
            }
            let exps = m.dense(point.len());
            let oracle = fd_oracle(&e.map, &point, &exps);
            let err = rel(values[0], oracle[0]);
            if err.is_nan() || err >= 1e-5 {
                return Err(format!("`{}` exponents {exps:?}: {} vs {} ({err:e})", e.source, values[0], oracle[0]));
            }
            worst_fd = worst_fd.max(err);
            compared += 1;
        }
    }
    Ok(format!("law error {worst_law:.1e}, {compared} derivatives within {worst_fd:.1e} of finite differences"))
}

type Pair = (String, Arc<FinFunctor>, Arc<FinFunctor>);

fn all_pairs() -> Vec<Pair> {
    let mut out = Vec::new();
    for cat in categories() {
        let fs: Vec<Arc<FinFunctor>> = functors_up_to_iso(&cat, 3, bound()).unwrap().into_iter().map(Arc::new).collect();
        for m in &fs {
            for n in &fs {
                out.push((cat.name().to_string(), m.clone(), n.clone()));
            }
        }
    }
    out
}

fn criterion_4(pairs: &[Pair]) -> Result<(String, Vec<CccReport>), String> {
    let probes: Vec<_> = categories().iter().map(|c| (c.name().to_string(), bundled::probes(c, bound()).unwrap())).collect();
    let reports = pairs
        .par_iter()
        .map(|(cat, m, n)| {
            let (ps, gs) = &probes.iter().find(|(c, _)| c == cat).unwrap().1;
            verify_ccc(m, n, ps, gs, bound()).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    for ((cat, m, n), r) in pairs.iter().zip(&reports) {
        if let Some(o) = r.outcomes.iter().find(|o| !o.passed()) {
            return Err(format!("{cat}: {m}^{n} against {}: {:?}", o.probe, o.witness));
        }
    }
    let probes_run: usize = reports.iter().map(|r| r.outcomes.len()).sum();
    Ok((format!("{} pairs, {probes_run} probe bijections", pairs.len()), reports))
}

fn criterion_5(pairs: &[Pair], plain: &[CccReport]) -> Result<String, String> {
    let mut checked = 0;
    for cat in categories() {
        for fam in sliced_families(&cat, bound()).map_err(|e| e.to_string())? {
            let results: Vec<Result<CccReport, String>> = fam
                .objects
                .par_iter()
                .flat_map_iter(|a| fam.objects.iter().map(move |b| (a, b)))
                .map(|(a, b)| verify_slice_ccc(a, b, &fam.probes, &fam.probe_morphisms, bound()).map_err(|e| e.to_string()))
                .collect();
            for r in results {
                let r = r?;
                if let Some(o) = r.outcomes.iter().find(|o| !o.passed()) {
                    return Err(format!("{} over {}: {:?}", o.probe, fam.base, o.witness));
                }
                checked += 1;
            }
        }
    }
    let probes: Vec<_> = categories().iter().map(|c| (c.name().to_string(), bundled::probes(c, bound()).unwrap())).collect();
    let sliced = pairs
        .par_iter()
        .map(|(cat, m, n)| {
            let (ps, gs) = &probes.iter().find(|(c, _)| c == cat).unwrap().1;
            let ps: Vec<SlicedObject> = ps.iter().map(SlicedObject::over_terminal).collect();
            verify_slice_ccc(&SlicedObject::over_terminal(m), &SlicedObject::over_terminal(n), &ps, gs, bound()).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(k) = sliced.iter().zip(plain).position(|(s, p)| s != p) {
        let (cat, m, n) = &pairs[k];
        return Err(format!("over the terminal object the report for {m}^{n} on {cat} differs"));
    }
    Ok(format!("{checked} sliced pairs, {} terminal-base reports identical", sliced.len()))
}

fn criterion_6() -> Result<String, String> {
    let mut reports = 0;
    let mut failures = Vec::new();
    for p in plain_endofunctors() {
        let fs: Vec<Arc<FinFunctor>> = functors_up_to_iso(p.functor.cat(), 2, bound()).unwrap().into_iter().map(Arc::new).collect();
        for m in &fs {
            for n in &fs {
                let r = exp_compat_check(&p.functor, m, n, p.family.as_ref(), bound()).map_err(|e| e.to_string())?;
                reports += 1;
                if !r.passed() {
                    failures.push(format!("{} on {m}^{n}: {}", p.name, r.to_validation()));
                }
            }
        }
    }
    for d in endofunctor_data() {
        let second = d.second.as_ref().map(|(s, e)| (s, e));
        for l in functors_up_to_iso(d.data.functor.cat(), 1, bound()).unwrap() {
            let fam = bundled::sliced_family(&Arc::new(l), bound()).map_err(|e| e.to_string())?;
            for a in &fam.objects {
                for b in &fam.probes {
                    let r = exp_compat_check_slice(&d.data, a, b, second, bound()).map_err(|e| e.to_string())?;
                    reports += 1;
                    if !r.passed() {
                        failures.push(format!("{} over {}: {}", d.name, fam.base, r.to_validation()));
                    }
                }
            }
        }
    }
    match failures.first() {
        None => Ok(format!("{reports} comparison reports, all isomorphisms with equal composites")),
        Some(f) => Err(format!("{} of {reports} reports fail, first: {f}", failures.len())),
    }
}

fn criterion_7() -> Result<String, String> {
    let r = run_law(&LawInstance::new(LawId::L12, Model::Finset)).map_err(|e| e.to_string())?;
    if !r.passed() {
        return Err(format!("{:?}", r.witnesses));
    }
    let mut round_trips = 0;
    for cat in categories() {
        for l in functors_up_to_iso(&cat, 1, bound()).unwrap() {
            let fam = bundled::sliced_family(&Arc::new(l), bound()).map_err(|e| e.to_string())?;
            for a in &fam.objects {
                let flat = flatten_slice(a);
                let mut objects = Vec::new();
                for x in &fam.objects {
                    for f in slice_morphisms(&x.structure, &a.structure, bound()).map_err(|e| e.to_string())? {
                        objects.push(IteratedObject::new(a, x.clone(), f).map_err(|e| e.to_string())?);
                    }
                }
                let report = flat.check(&objects, bound()).map_err(|e| e.to_string())?;
                if let Some(c) = report.first_failure() {
                    return Err(format!("{} over {}: {:?}", c.name, a.total, c.witness));
                }
                round_trips += objects.len();
            }
        }
    }
    Ok(format!("{} localization checks, {round_trips} iterated objects round-trip", r.instances_run))
}

fn criterion_8() -> Result<String, String> {
    let mut caught = Vec::new();

    let j2 = WeilAlgebra::jet(2).unwrap();
    let x = j2.basis_index(&weilad::Monomial::var(0)).unwrap();
    let xx = j2.basis_index(&weilad::Monomial::power(0, 2)).unwrap();
    let corrupted = Arc::new(j2.with_struct_const_entry(x, x, vec![(xx, Rational::from_integer(2.into()))]));
    let validation = corrupted.validate();
    let mut inst = LawInstance::new(LawId::L3, Model::Numeric);
    inst.algebras = vec![corrupted];
    let law = run_law(&inst).map_err(|e| e.to_string())?;
    match (law.passed(), law.witnesses.first(), validation.first_failure()) {
        (false, Some(w), Some(v)) => caught.push(format!("struct_const: L3 ({w}) and validation ({})", v.name)),
        _ => return Err("corrupted struct_const went unnoticed".into()),
    }

    let arrow = bundled::arrow();
    let fs: Vec<Arc<FinFunctor>> = functors_up_to_iso(&arrow, 2, bound()).unwrap().into_iter().map(Arc::new).collect();
    let m = fs.iter().find(|f| f.sizes() == vec![2, 2] && f.map(arrow.morphism("f").unwrap()) == [0, 1]).unwrap();
    let id = NatTrans::identity(m);
    let broken = id.with_component_entry(0, 0, 1);
    let report = broken.validate();
    match report.first_failure() {
        Some(c) if c.witness.is_some() => caught.push(format!("non-natural: {}", c.name)),
        _ => return Err("non-natural transformation went unnoticed".into()),
    }
    if NatTrans::natural(m, m, broken.components().to_vec()).is_ok() {
        return Err("non-natural transformation accepted".into());
    }

    let f = arrow.morphism("f").unwrap();
    let one = Arc::new(bundled::constant(&arrow, 1));
    let two = Arc::new(bundled::constant(&arrow, 2));
    let exp = Exponential::new(&two, &one, bound()).map_err(|e| e.to_string())?;
    let (probes, gammas) = bundled::probes(&arrow, bound()).map_err(|e| e.to_string())?;
    let honest = verify_ccc_with(&exp, &probes, &gammas, bound()).map_err(|e| e.to_string())?;
    let tampered = verify_ccc_with(&exp.with_shifted_action(f), &probes, &gammas, bound()).map_err(|e| e.to_string())?;
    match (honest.passed(), tampered.outcomes.iter().find(|o| !o.passed())) {
        (true, Some(o)) => caught.push(format!("reindexing: currying fails against {}", o.probe)),
        _ => return Err("shifted exponential action went unnoticed".into()),
    }
    Ok(caught.join("; "))
}

#[test]
fn acceptance_criteria() {
    let pairs = all_pairs();
    let mut plain = Vec::new();
    let mut lines = vec![
        timed(1, "algebra correctness", Some(Duration::from_secs(5)), criterion_1),
        timed(2, "exact law fragment", Some(Duration::from_secs(30)), criterion_2),
        timed(3, "transcendental fragment", None, criterion_3),
        timed(4, "exponentials by currying", Some(Duration::from_secs(60)), || {
            criterion_4(&pairs).map(|(d, r)| {
                plain = r;
                d
            })
        }),
    ];
    lines.push(timed(5, "slice exponentials", None, || {
        if plain.is_empty() {
            return Err("criterion 4 produced no reports to compare against".into());
        }
        criterion_5(&pairs, &plain)
    }));
    lines.push(timed(6, "exponential comparisons", None, criterion_6));
    lines.push(timed(7, "localization", None, criterion_7));
    lines.push(timed(8, "planted defects", None, criterion_8));

    for l in &lines {
        println!(
            "criterion {} {:<26} {} ({:.2?}) {}",
            l.id,
            l.title,
            if l.passed { "PASS" } else { "FAIL" },
            l.elapsed,
            l.detail
        );
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
