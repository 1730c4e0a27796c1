use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weingarten_core::classes::{
    catalog, default_params, linear_fractional_pair_at, make_basic_class, BasicClassId, ClassParams, Interval,
    Operator, PotentialMethod,
};
use weingarten_core::classification::FractionalCoeffs;
use weingarten_core::pde::{natural_residual_point, NuJet};

/// λ-jet with λ_uu chosen so the class PDE holds, mapped to a ν-jet.
fn solved_jet(id: BasicClassId, l: f64, lu: f64, lv: f64, lvv: f64) -> (NuJet, f64) {
    let (class, _) = make_basic_class(id, default_params(id)).unwrap();
    let d0 = class.pde.defect_point(l, lu, lv, 0.0, lvv);
    let d1 = class.pde.defect_point(l, lu, lv, 1.0, lvv);
    let luu = -d0 / (d1 - d0);
    let (n1, n2) = class.substitution.derivs(l);
    let nu = class.nu_of_lambda(l);
    let jet = NuJet {
        nu,
        nu_u: n1 * lu,
        nu_v: n1 * lv,
        nu_uu: n2 * lu * lu + n1 * luu,
        nu_vv: n2 * lv * lv + n1 * lvv,
    };
    (jet, n1)
}

#[test]
fn class_pde_solutions_solve_the_natural_pde() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in BasicClassId::ALL {
        let (class, pair) = make_basic_class(id, default_params(id)).unwrap();
        let pot = pair.potentials();
        let l0 = class.lambda_of_nu(class.nu0);
        let mut checked = 0;
        for _ in 0..400 {
            let l = l0 + rng.random_range(-0.2..0.2);
            let nu = class.nu_of_lambda(l);
            if pair.check_sample(nu).is_err() || !class.pde.transform.admissible_w(class.pde.transform.w(l)) {
                continue;
            }
            let (lu, lv, lvv) = (rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
            let (jet, n1) = solved_jet(id, l, lu, lv, lvv);
            let p = pair.jet(jet.nu);
            let (i, j) = pot.eval(jet.nu).unwrap();
            let r = natural_residual_point(&p, i, j, class.a_const, class.b_const, &jet);
            // Sensitivity of the residual to a unit change of λ_uu.
            let bumped = NuJet { nu_uu: jet.nu_uu + n1, ..jet };
            let s = (natural_residual_point(&p, i, j, class.a_const, class.b_const, &bumped) - r).abs();
            assert!(r.abs() <= 1e-9 * s.max(1e-3), "{id:?} at lambda={l}: residual {r:e} vs sensitivity {s:e}");
            checked += 1;
        }
        assert!(checked > 100, "{id:?}: only {checked} admissible samples");
    }
}

#[test]
fn registry_invariants() {
    for id in BasicClassId::ALL {
        let (class, pair) = make_basic_class(id, default_params(id)).unwrap();
        assert!(matches!(
            class.pde.operator,
            Operator::Laplace | Operator::Wave | Operator::Star | Operator::BarStar
        ));
        for nu in pair.domain.samples(200) {
            let j = pair.jet(nu);
            assert!((j.f - j.g) * j.f1 * j.g1 != 0.0, "{id:?} at {nu}");
            let back = class.nu_of_lambda(class.lambda_of_nu(nu));
            assert!((back - nu).abs() <= 1e-12 * nu.abs().max(1.0), "{id:?} substitution round trip at {nu}");
        }
        let (i0, j0) = pair.potentials().eval(pair.nu0).unwrap();
        assert_eq!((i0, j0), (0.0, 0.0));
    }
    assert_eq!(catalog().len(), 10);
}

#[test]
fn potentials_match_their_derivatives() {
    for id in BasicClassId::ALL {
        let (_, pair) = make_basic_class(id, default_params(id)).unwrap();
        let pot = pair.potentials();
        let mut errs = Vec::new();
        for h in [1e-3, 5e-4] {
            let mut worst: f64 = 0.0;
            for nu in pair.domain.samples(9) {
                if pair.check_sample(nu - h).is_err() || pair.check_sample(nu + h).is_err() {
                    continue;
                }
                let (ip, jp) = pot.eval(nu + h).unwrap();
                let (im, jm) = pot.eval(nu - h).unwrap();
                let j = pair.jet(nu);
                let s = 1.0 + j.di().abs() + j.dj().abs();
                worst = worst.max(((ip - im) / (2.0 * h) - j.di()).abs() / s);
                worst = worst.max(((jp - jm) / (2.0 * h) - j.dj()).abs() / s);
            }
            errs.push(worst);
        }
        assert!(errs[0] < 1e-4, "{id:?}: {errs:?}");
        assert!(errs[1] <= errs[0] * 0.3 + 1e-9, "{id:?}: no second-order decay {errs:?}");
    }
}

#[test]
fn closed_forms_agree_with_quadrature() {
    for id in BasicClassId::ALL {
        let (_, pair) = make_basic_class(id, default_params(id)).unwrap();
        let cf = pair.potentials_with(PotentialMethod::ClosedForm).unwrap();
        let q = pair.potentials_with(PotentialMethod::Quadrature).unwrap();
        let near: Vec<f64> = [-0.3, -0.1, 0.1, 0.3]
            .iter()
            .map(|d| pair.nu0 + d * pair.nu0.abs().max(0.5))
            .filter(|nu| pair.check_sample(*nu).is_ok())
            .collect();
        for nu in near {
            let (a, b) = cf.eval(nu).unwrap();
            let (c, d) = q.eval(nu).unwrap();
            assert!((a - c).abs() < 1e-9 && (b - d).abs() < 1e-9, "{id:?} at {nu}: {a} {c} {b} {d}");
        }
    }
}

#[test]
fn half_cmc_potentials_in_closed_form() {
    // f = 1 − ν, g = ν on (1/2, ∞): I = J = ½ ln|(2ν−1)/(2ν₀−1)|.
    let pair = linear_fractional_pair_at(FractionalCoeffs::new(-1.0, 1.0, 0.0, 1.0), Interval { lo: 0.5, hi: f64::INFINITY }, 0.75)
        .unwrap();
    let (i, j) = pair.potentials().eval(0.9).unwrap();
    let exact = 0.5 * ((2.0 * 0.9f64 - 1.0) / (2.0 * 0.75 - 1.0)).ln();
    assert!((i - exact).abs() < 1e-9 && (j - exact).abs() < 1e-9);
}

#[test]
fn cmc_half_and_k_minus1_entries() {
    let (c, _) = make_basic_class(BasicClassId::CmcHalf, ClassParams::none()).unwrap();
    assert_eq!(c.pde.expanded(), "λ_uu − λ_vv = sinh λ");
    assert!(c.substitution.text().contains("(1 - e^lambda)/2"), "{}", c.substitution.text());
    let (k, _) = make_basic_class(BasicClassId::KMinus1, ClassParams::none()).unwrap();
    assert_eq!(k.pde.expanded(), "λ_uu + λ_vv = −sin λ");
    assert!(make_basic_class(BasicClassId::HBetaHPrimeGt1, ClassParams::beta(1.0)).is_err());
    assert!(make_basic_class(BasicClassId::KBetaHPrimeGamma, ClassParams::beta_gamma(1.0, 0.0)).is_err());
}

#[test]
fn k2hprime_substitution_matches_the_proof_form() {
    // λ = 4(ν−β)/(2ν−β) at β = 2, inverted by ν = (λ−4)/(λ−2); the pair has g = ν − 1.
    let (c, pair) = make_basic_class(BasicClassId::K2HPrime, ClassParams::none()).unwrap();
    for l in [-3.0, -2.0, -0.5, 1.0f64] {
        let nu = c.nu_of_lambda(l);
        assert!((nu - (l - 4.0) / (l - 2.0)).abs() < 1e-13);
        let nu2 = pair.g(nu);
        assert!((nu2 - (nu - 1.0)).abs() < 1e-13);
        assert!((4.0 * (nu - 2.0) / (2.0 * nu - 2.0) - l).abs() < 1e-12 * l.abs().max(1.0));
        assert!((c.lambda_of_nu(nu) - l).abs() < 1e-12 * l.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn lf_lemma_identity(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0, t in 0.05f64..0.95) {
        let fc = FractionalCoeffs::new(a, b, c, d);
        prop_assume!(fc.validate().is_ok());
        let rel = weingarten_core::classification::coeffs_to_relation(&fc).unwrap();
        let nu: f64 = -4.0 + 8.0 * t;
        let den = c * nu + d;
        prop_assume!(den.abs() > 1e-3);
        let f = (a * nu + b) / den;
        let g = nu;
        let r = rel.evaluate(f * g, 0.5 * (f + g), 0.5 * (f - g));
        prop_assert!(r.abs() <= 1e-10 * (1.0 + f.abs()) * (1.0 + g.abs()) * 10.0);
    }
}
