//! Independent brute-force oracles for the finite model.

use std::sync::Arc;

use weilad::fincat::bundled::{categories, z3};
use weilad::fincat::{functors_up_to_iso, Bound, Exponential, FinCat, FinFunctor, Mor, Obj};

/// Every assignment of arbitrary functions `s_ψ: N(cod ψ) -> M(cod ψ)` to
/// the morphisms out of `w`, kept when `M(g) s_ψ = s_{gψ} N(g)` for all `g`.
fn compatible_families(cat: &FinCat, m: &FinFunctor, n: &FinFunctor, w: Obj) -> Vec<Vec<Vec<usize>>> {
    let out: Vec<Mor> = cat.out_of(w).to_vec();
    let mut families: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for &psi in &out {
        let v = cat.cod(psi);
        let functions = all_functions(n.size(v), m.size(v));
        families = families
            .into_iter()
            .flat_map(|fam| {
                functions.iter().map(move |f| {
                    let mut next = fam.clone();
                    next.push(f.clone());
                    next
                })
            })
            .collect();
    }
    families.retain(|fam| {
        out.iter().enumerate().all(|(k, &psi)| {
            let v = cat.cod(psi);
            (0..cat.morphism_count()).filter(|&g| cat.dom(g) == v).all(|g| {
                let gpsi = cat.comp(g, psi);
                let j = out.iter().position(|&x| x == gpsi).expect("composite leaves w");
                (0..n.size(v)).all(|y| m.apply(g, fam[k][y]) == fam[j][n.apply(g, y)])
            })
        })
    });
    families
}

fn all_functions(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out.into_iter().flat_map(|f| (0..to).map(move |y| [f.clone(), vec![y]].concat())).collect();
    }
    out
}

fn check(cat: &Arc<FinCat>, max: usize) -> usize {
    let fs: Vec<Arc<FinFunctor>> = functors_up_to_iso(cat, max, Bound(10_000_000)).unwrap().into_iter().map(Arc::new).collect();
    let mut checked = 0;
    for m in &fs {
        for n in &fs {
            let exp = Exponential::new(m, n, Bound(10_000_000)).unwrap();
            for w in 0..cat.object_count() {
                let oracle = compatible_families(cat, m, n, w);
                assert_eq!(oracle.len(), exp.functor().size(w), "{} at {}: {m}^{n}", cat.name(), cat.objects()[w]);
                let mut seen = vec![false; oracle.len()];
                for fam in &oracle {
                    let k = exp.lookup(w, fam).expect("oracle family is in the exponential");
                    assert!(!seen[k]);
                    seen[k] = true;
                    for (i, &psi) in cat.out_of(w).iter().enumerate() {
                        assert_eq!(exp.component(k, psi), fam[i].as_slice());
                    }
                    // the action of φ: w -> w' reads the family at ψ ∘ φ
                    for phi in (0..cat.morphism_count()).filter(|&phi| cat.dom(phi) == w) {
                        let target = cat.cod(phi);
                        let moved: Vec<Vec<usize>> = cat.out_of(target).iter().map(|&psi| fam[cat.out_of(w).iter().position(|&x| x == cat.comp(psi, phi)).unwrap()].clone()).collect();
                        assert_eq!(Some(exp.functor().apply(phi, k)), exp.lookup(target, &moved));
                    }
                }
                checked += 1;
            }
        }
    }
    checked
}

#[test]
fn exponential_matches_filtered_full_product() {
    let mut total = 0;
    for cat in categories() {
        total += check(&cat, 2);
    }
    total += check(&z3(), 2);
    assert!(total > 100);
}

#[test]
fn exponential_matches_oracle_at_size_three_on_one_object_categories() {
    for cat in categories().into_iter().filter(|c| c.object_count() == 1) {
        check(&cat, 3);
    }
}
