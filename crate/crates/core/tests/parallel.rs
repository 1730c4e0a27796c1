use proptest::prelude::*;

use weingarten_core::classes::{default_params, make_basic_class, BasicClassId, WeingartenPair};
use weingarten_core::classification::reduced_relation;
use weingarten_core::grid::GridSpec;
use weingarten_core::minkowski::apply_motion;
use weingarten_core::parallel::{
    align_anchors, inverse_parallel_curvatures, offset_patch, parallel_KHH, parallel_constants, parallel_curvatures,
    parallel_weingarten, verify_parallel_pde,
};
use weingarten_core::pde::GridField;
use weingarten_core::pipeline::{reconstruct, solve_class, SolveData, SolveOptions};
use weingarten_core::reconstruction::metric_from_nu;

fn cmc_half() -> (weingarten_core::classes::BasicClass, WeingartenPair) {
    make_basic_class(BasicClassId::CmcHalf, default_params(BasicClassId::CmcHalf)).unwrap()
}

fn cmc_field(h: f64) -> (WeingartenPair, GridField) {
    let (class, pair) = cmc_half();
    let spec = GridSpec::new((0.48 / h).round() as usize + 1, (2.56 / h).round() as usize + 1, 0.0, 0.0, h, h).unwrap();
    let lambda = (0..spec.cols).map(|j| 0.3 * (-((spec.v(j) - 1.28) / 0.5).powi(2)).exp()).collect();
    let data = SolveData::Cauchy { lambda, lambda_u: vec![0.0; spec.cols] };
    let (lam, _) = solve_class(&class, &spec, &data, &SolveOptions::default()).unwrap();
    (pair, class.to_nu_field(&lam))
}

fn khh(n1: f64, n2: f64) -> (f64, f64, f64) {
    (n1 * n2, 0.5 * (n1 + n2), 0.5 * (n1 - n2))
}

#[test]
fn offset_laws_by_hand() {
    let (a, b, e) = parallel_curvatures(0.5, -1.0, 0.5).unwrap();
    assert_eq!(e, 1.0);
    assert!((a - 0.5 / 0.75).abs() < 1e-15 && (b + 1.0 / 1.5).abs() < 1e-15);
    assert!(parallel_curvatures(2.0, 1.0, 1.0).is_err());
    let (a, b, e) = parallel_curvatures(0.3, -0.7, 1e-12).unwrap();
    assert_eq!(e, 1.0);
    assert!((a - 0.3).abs() < 1e-11 && (b + 0.7).abs() < 1e-11);
}

#[test]
fn pole_at_the_reference_value_is_rejected() {
    // f(ν₀) = 1 for CMC ½, so a = 1 puts ν₀ on the focal set.
    let (_, pair) = cmc_half();
    assert!(parallel_weingarten(&pair, 1.0).is_err());
}

#[test]
fn parallel_pair_of_cmc_half_satisfies_the_offset_relation() {
    let (class, pair) = cmc_half();
    let rel = class.relation();
    for a in [0.1, -0.2, 0.35, 1.7] {
        let par = parallel_weingarten(&pair, a).unwrap();
        let j = pair.jet(pair.nu0);
        let eps = ((1.0 - a * j.f) * (1.0 - a * j.g)).signum();
        for nu in par.domain.samples(40) {
            let (k, h, hp) = khh(par.f(nu), par.g(nu));
            // (δ − aα − a²γ)K̄ = ε(α + 2aγ)H̄ + εβH̄′ + γ, from K, H, H′ in terms of the offset.
            let lhs = (rel.delta - a * rel.alpha - a * a * rel.gamma) * k;
            let rhs = eps * (rel.alpha + 2.0 * a * rel.gamma) * h + eps * rel.beta * hp + rel.gamma;
            let s = 1.0 + k.abs() + h.abs() + hp.abs();
            assert!((lhs - rhs).abs() <= 1e-10 * s, "a={a} nu={nu}: {lhs} vs {rhs}");
            let r = reduced_relation(&rel, a, eps);
            assert!(r.evaluate(k, h, hp).abs() <= 1e-10 * s);
        }
    }
}

#[test]
fn parallel_metric_scales_by_the_offset_factors() {
    let (pair, field) = cmc_field(0.04);
    let a = 0.2;
    let par = parallel_weingarten(&pair, a).unwrap();
    let (ab, bb) = parallel_constants(&pair, a, field.a_const, field.b_const);
    let mut pf = field.clone();
    pf.a_const = ab;
    pf.b_const = bb;
    pf.class_tag = par.label();
    let (e, g) = metric_from_nu(&pair, &field).unwrap();
    let (eb, gb) = metric_from_nu(&par, &pf).unwrap();
    for i in 0..field.rows() {
        for j in 0..field.cols() {
            let nu = *field.values.get(i, j);
            let (q1, q2) = (1.0 - a * pair.f(nu), 1.0 - a * pair.g(nu));
            assert!((eb.get(i, j) - q1 * q1 * e.get(i, j)).abs() < 1e-9 * e.get(i, j).abs());
            assert!((gb.get(i, j) - q2 * q2 * g.get(i, j)).abs() < 1e-9 * g.get(i, j).abs());
        }
    }
}

#[test]
fn residual_identity_for_several_offsets() {
    let (pair, field) = cmc_field(0.04);
    for a in [0.1, -0.2, 0.35] {
        let rep = verify_parallel_pde(&pair, &field, a).unwrap();
        assert!(rep.identity_rel <= 1e-8, "a={a}: {}", rep.identity_rel);
    }
    let tiny = verify_parallel_pde(&pair, &field, 1e-9).unwrap();
    let d = tiny.parallel.field.max_abs_diff(&tiny.base.field, 1);
    assert!(d <= 1e-7 * tiny.base.max_abs.max(1e-12), "{d:e}");
}

#[test]
fn zero_residual_fields_stay_zero_residual() {
    // λ ≡ 0 is ν ≡ 0, where fg = 0, so both residuals vanish identically.
    let (class, pair) = cmc_half();
    let spec = GridSpec::new(9, 9, 0.0, 0.0, 0.05, 0.05).unwrap();
    let field = GridField::from_fn(spec, class.nu0, class.a_const, class.b_const, |_, _| 0.0).unwrap();
    for a in [0.1, -0.2, 0.35] {
        let rep = verify_parallel_pde(&pair, &field, a).unwrap();
        assert_eq!(rep.base.max_abs, 0.0);
        assert!(rep.parallel.max_abs <= 1e-14, "{}", rep.parallel.max_abs);
    }
}

#[test]
fn offset_patch_round_trip() {
    let (pair, field) = cmc_field(0.04);
    let patch = reconstruct(&pair, &field).unwrap();
    let (off, po) = offset_patch(&patch, 0.2).unwrap();
    assert_eq!(po.eps, 1.0);
    let back_off = po.inverse();
    let (back, _) = offset_patch(&off, back_off.a).unwrap();
    let d = patch.z.iter().zip(back.z.iter()).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max);
    assert!(d <= 1e-12, "{d:e}");
    assert!(patch.fields.nu1.max_abs_diff(&back.fields.nu1, 0) <= 1e-12);
    assert!(patch.fields.gamma2.max_abs_diff(&back.fields.gamma2, 0) <= 1e-12);
}

#[test]
fn singular_offsets_list_the_nodes() {
    let (pair, field) = cmc_field(0.04);
    let patch = reconstruct(&pair, &field).unwrap();
    // ν₁ = 1 − ν ranges over about [1, 1.17]; a = 0.95 crosses 1/ν₁ inside the patch.
    let mx = patch.fields.nu1.iter().fold(0.0f64, |m, x| m.max(*x));
    assert!(1.0 / mx < 0.95, "{mx}");
    let err = offset_patch(&patch, 0.95).unwrap_err().to_string();
    assert!(err.contains("node"), "{err}");
}

/// Offset positions vs a direct reconstruction of the parallel pair, after alignment.
fn offset_vs_direct(h: f64, a: f64) -> f64 {
    let (pair, field) = cmc_field(h);
    let patch = reconstruct(&pair, &field).unwrap();
    let (off, _) = offset_patch(&patch, a).unwrap();
    let par = parallel_weingarten(&pair, a).unwrap();
    let (ab, bb) = parallel_constants(&pair, a, field.a_const, field.b_const);
    let mut pf = field.clone();
    pf.a_const = ab;
    pf.b_const = bb;
    pf.class_tag = par.label();
    let direct = reconstruct(&par, &pf).unwrap();
    let m = align_anchors(direct.z.as_slice(), off.z.as_slice()).unwrap();
    direct.z.iter().zip(off.z.iter()).map(|(p, q)| (apply_motion(&m, *p) - *q).max_abs()).fold(0.0, f64::max)
}

#[test]
fn offset_patch_matches_the_directly_reconstructed_parallel_surface() {
    // The discrete frame integration commutes with the offset, so agreement is at roundoff level.
    for (h, a) in [(0.04, 0.2), (0.02, -0.3)] {
        let d = offset_vs_direct(h, a);
        assert!(d < 1e-10, "h={h} a={a}: {d:e}");
    }
}

proptest! {
    #[test]
    fn inverse_undoes_the_offset(n1 in -3.0f64..3.0, n2 in -3.0f64..3.0, a in -0.3f64..0.3) {
        let q = (1.0 - a * n1) * (1.0 - a * n2);
        prop_assume!(q.abs() > 1e-3);
        let (b1, b2, e) = parallel_curvatures(n1, n2, a).unwrap();
        let (m1, m2) = inverse_parallel_curvatures(b1, b2, a, e).unwrap();
        prop_assert!((m1 - n1).abs() <= 1e-12 * (1.0 + n1.abs()) * 1e2);
        prop_assert!((m2 - n2).abs() <= 1e-12 * (1.0 + n2.abs()) * 1e2);
    }

    #[test]
    fn offset_twice_is_the_identity_when_eps_is_positive(n1 in -2.0f64..2.0, n2 in -2.0f64..2.0, a in -0.2f64..0.2) {
        let (b1, b2, e) = parallel_curvatures(n1, n2, a).unwrap();
        prop_assume!(e == 1.0);
        let (c1, c2, e2) = parallel_curvatures(b1, b2, -a).unwrap();
        prop_assert_eq!(e2, 1.0);
        prop_assert!((c1 - n1).abs() <= 1e-12 * (1.0 + n1.abs()) * 10.0);
        prop_assert!((c2 - n2).abs() <= 1e-12 * (1.0 + n2.abs()) * 10.0);
    }

    #[test]
    fn khh_law_and_h_prime_sign(n1 in -3.0f64..3.0, n2 in -3.0f64..3.0, a in -2.0f64..2.0) {
        let q = (1.0 - a * n1) * (1.0 - a * n2);
        prop_assume!(q.abs() > 1e-2);
        let (b1, b2, e) = parallel_curvatures(n1, n2, a).unwrap();
        let (kb, hb, hpb) = khh(b1, b2);
        let (k, h, hp) = parallel_KHH(kb, hb, hpb, a, e).unwrap();
        let (k0, h0, hp0) = khh(n1, n2);
        let s = 1.0 + kb.abs() + hb.abs();
        prop_assert!((k - k0).abs() <= 1e-10 * s && (h - h0).abs() <= 1e-10 * s && (hp - hp0).abs() <= 1e-10 * s);
        prop_assert!(hp0 * hpb >= 0.0);
    }
}
