use hardy_core::caccioppoli::caccioppoli_margin;
use hardy_core::compatibility::{check_assumptions, Gate};
use hardy_core::hardy::{construct_hardy_measures, hardy_margin, hardy_poincare_data};
use hardy_core::radial::Grading;
use hardy_core::rayleigh::rayleigh_quotient;
use hardy_core::testfn::library;
use hardy_core::*;

fn talenti(nodes: usize) -> (PdiProblem, RadialProfile, QuadratureGrid) {
    let d = RadialDomain::full_space(3, 1e3).unwrap();
    let g = QuadratureGrid::new(&d, nodes, Grading::Log).unwrap();
    let u = hardy_core::model::make_talenti_profile(3, 2.0, 0.0, 3.0, g.nodes()).unwrap();
    let b = WeightFunction::tabulated(u.abs_pow(4.0).scale(3.0)).unwrap();
    let prob = PdiProblem::new(d, 2.0, WeightFunction::Constant(1.0), b.into(), ScalarFn::identity()).unwrap();
    (prob, u, g)
}

#[test]
fn hardy_margin_holds_over_the_library() {
    let (prob, u, g) = talenti(2000);
    for (pair, sigmas) in [(PsiGPair::power(1.0), vec![0.0, 0.5]), (PsiGPair::power(2.0), vec![0.0, 1.0])] {
        let rep = check_assumptions(&prob, &u, &pair, &g).unwrap();
        assert!(rep.holds(), "{}: {:?}", pair.name, rep.flags);
        for sigma in sigmas {
            let hd = construct_hardy_measures(&prob, &u, &pair, sigma, Gate::Verified(&rep), &g).unwrap();
            for (k, f) in library(1e-3, 500.0, 100, 2.0, 11).unwrap().iter().enumerate() {
                let xi = f.sample(g.nodes()).unwrap();
                let m = hardy_margin(&hd, &xi, &g).unwrap();
                assert!(m.holds(), "{} sigma {sigma} function {k}: {m:?}", pair.name);
            }
        }
    }
}

#[test]
fn hardy_and_caccioppoli_pairs_coincide() {
    let (prob, u, g) = talenti(2000);
    let pair = PsiGPair::power(1.0);
    let hd = construct_hardy_measures(&prob, &u, &pair, 0.25, Gate::Waived, &g).unwrap();
    for f in library(1e-2, 100.0, 30, 2.0, 5).unwrap() {
        let xi = f.sample(g.nodes()).unwrap();
        let h = hardy_margin(&hd, &xi, &g).unwrap();
        let c = caccioppoli_margin(&prob, &u, &pair, 0.25, &xi.abs_pow(2.0), &g).unwrap();
        assert_eq!(h.lhs, c.lhs);
        assert!((h.rhs - c.rhs).abs() <= 1e-13 * h.rhs.abs());
    }
}

#[test]
fn hardy_poincare_inequality_holds_for_library() {
    let hd = hardy_poincare_data(3, 2.0, 2.0, 0.5).unwrap();
    let d = RadialDomain::full_space(3, 1e3).unwrap();
    let g = QuadratureGrid::new(&d, 2000, Grading::Log).unwrap();
    for f in library(1e-3, 100.0, 40, 2.0, 2).unwrap() {
        let xi = f.sample(g.nodes()).unwrap();
        let q = rayleigh_quotient(&hd, &xi, &g).unwrap();
        assert!(q >= 10.5, "{q}");
        assert!(hardy_margin(&hd, &xi, &g).unwrap().holds());
    }
}

#[test]
fn quotient_is_scale_invariant() {
    let hd = hardy_poincare_data(3, 2.0, 5.0, 1.0).unwrap();
    let d = RadialDomain::full_space(3, 1e3).unwrap();
    let g = QuadratureGrid::new(&d, 1000, Grading::Log).unwrap();
    let xi = library(1e-2, 10.0, 1, 2.0, 9).unwrap()[0].sample(g.nodes()).unwrap();
    let a = rayleigh_quotient(&hd, &xi, &g).unwrap();
    for lambda in [1e-3, 0.5, 7.0, 1e4] {
        let b = rayleigh_quotient(&hd, &xi.scale(lambda), &g).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }
}
