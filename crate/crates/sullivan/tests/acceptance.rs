//! The acceptance gate: eight exact criteria that certify the repository
//! does what it claims. Every check is an exact rational or integer
//! equality; there are no tolerances anywhere.
//!
//! 1. the bigraded model of the wedge verifies at cap 12 with the
//!    prescribed cohomology dimensions;
//! 2. stage one matches the hand-computed golden generators;
//! 3. the constructed self-equivalence is a chain map with identity
//!    linear part in every degree and moves exactly one cohomology class,
//!    in degree 3, by the circle class times the degree-2 class;
//! 4. its inverse is exact on both sides and undoes the twist;
//! 5. substituting zero for the circle collapses it to the identity;
//! 6. the bundled group presentations have the pinned abelian invariants,
//!    cross-checked against an independent determinant-minor oracle;
//! 7. the randomized property suites pass with zero failures;
//! 8. two umbrella runs produce byte-identical artifacts.

mod support;

use std::sync::OnceLock;
use sullivan::algebra::Polynomial;
use sullivan::bigraded::{build, BigradedModel, CohomologySpec};
use sullivan::groups;
use sullivan::pipeline::{self, ReportFormat};
use sullivan::selfeq::{
    construct_phi, e_sharp_report, invert, is_chain_map, substitute_circle_zero, CdgaMorphism,
};
use sullivan::{q, Q, Z};

const CAP: u32 = 12;

fn base() -> &'static BigradedModel {
    static MODEL: OnceLock<BigradedModel> = OnceLock::new();
    MODEL.get_or_init(|| build(&CohomologySpec::wedge_s2_s3_s3(), CAP))
}

fn adjoined() -> &'static (BigradedModel, CdgaMorphism) {
    static PAIR: OnceLock<(BigradedModel, CdgaMorphism)> = OnceLock::new();
    PAIR.get_or_init(|| {
        let adj = base().adjoin_circle();
        let phi = construct_phi(&adj).expect("the construction must succeed");
        (adj, phi)
    })
}

fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn criterion_1_model_verifies_at_cap_12() {
    let report = base().verify();
    let mut expected = vec![1, 0, 1, 2];
    expected.resize(CAP as usize, 0);
    assert_eq!(report.h_dims, expected, "cohomology dimensions");
    assert_eq!(report.expected_h_dims, expected);
    assert!(
        report.passed(),
        "verification violations: {:?}",
        report.violations
    );
    println!("criterion 1 (cap-12 model verification): PASS");
}

#[test]
fn criterion_2_stage_one_golden() {
    let model = base();
    let ctx = model.ctx();
    let stage0: Vec<u32> = model.stages()[0]
        .iter()
        .map(|&id| ctx.generator(id).degree)
        .collect();
    assert_eq!(stage0, [2, 3, 3], "stage-zero degrees");
    let stage1: Vec<(String, u32, String)> = model.stages()[1]
        .iter()
        .map(|&id| {
            (
                ctx.generator(id).name.clone(),
                ctx.generator(id).degree,
                model.model().differential(id).to_text(ctx),
            )
        })
        .collect();
    assert_eq!(
        stage1,
        [
            ("w1_3_0".to_string(), 3, "a2^2".to_string()),
            ("w1_4_0".to_string(), 4, "a2*b3".to_string()),
            ("w1_4_1".to_string(), 4, "a2*c3".to_string()),
            ("w1_5_0".to_string(), 5, "b3*c3".to_string()),
        ],
        "stage-one generators and differentials"
    );
    println!("criterion 2 (stage-one golden): PASS");
}

#[test]
fn criterion_3_selfeq_nontrivial_with_identity_linear_part() {
    let (adj, phi) = adjoined();
    let model = adj.model();
    let ctx = model.ctx();

    let chain = is_chain_map(model, phi);
    assert!(chain.passed(), "chain-map failures: {:?}", chain.failures);
    let below_cap = ctx
        .ids()
        .filter(|&id| ctx.generator(id).degree + 1 <= CAP)
        .count();
    assert_eq!(chain.checked, below_cap, "every below-cap generator checked");

    let esharp = e_sharp_report(model, phi, CAP);
    assert!(esharp.is_member);
    assert_eq!(
        esharp.linear_part_identity_up_to, CAP,
        "the linear part must be the identity in every degree"
    );

    // Exactly one class moves: the second degree-3 class, sent to itself
    // plus the product of the degree-2 class with the circle. Everything
    // else -- including the degree-0, degree-1, degree-2 classes and the
    // first degree-3 class -- is fixed, which is what the emptiness of the
    // rest of the moved list says.
    assert_eq!(esharp.moved_classes.len(), 1, "{:?}", esharp.moved_classes);
    let moved = &esharp.moved_classes[0];
    assert_eq!(moved.degree, 3);
    let a2 = Polynomial::from_generator(ctx.by_name("a2").unwrap());
    let c3 = Polynomial::from_generator(ctx.by_name("c3").unwrap());
    let x = Polynomial::from_generator(ctx.circle().unwrap());
    let ax = a2.mul(&x, ctx);
    let rep = &model.cohomology(3).representatives[moved.class_index];
    assert_eq!(
        model.class_of(rep, 3),
        model.class_of(&c3, 3),
        "the moved class is the second degree-3 class"
    );
    assert_eq!(
        moved.image_coords,
        vec_add(&model.class_of(&c3, 3), &model.class_of(&ax, 3)),
        "the image class gains the circle times the degree-2 class"
    );
    // The same facts in the engine's frozen basis order (a2*x, b3, c3).
    assert_eq!(moved.class_index, 2);
    assert_eq!(moved.image_coords, vec![q(1), q(0), q(1)]);
    println!("criterion 3 (nontrivial self-equivalence with identity linear part): PASS");
}

#[test]
fn criterion_4_inverse_is_exact() {
    let (adj, phi) = adjoined();
    let model = adj.model();
    let ctx = model.ctx();
    let psi = invert(model, phi);
    assert!(
        psi.compose(phi, model).is_identity(model),
        "psi . phi must be the identity"
    );
    assert!(
        phi.compose(&psi, model).is_identity(model),
        "phi . psi must be the identity"
    );
    let a2 = Polynomial::from_generator(ctx.by_name("a2").unwrap());
    let c3 = Polynomial::from_generator(ctx.by_name("c3").unwrap());
    let x = Polynomial::from_generator(ctx.circle().unwrap());
    let expected = c3.sub(&a2.mul(&x, ctx));
    assert_eq!(
        psi.image(ctx.by_name("c3").unwrap()),
        &expected,
        "the inverse must subtract the twist"
    );
    println!("criterion 4 (exact two-sided inverse): PASS");
}

#[test]
fn criterion_5_circle_substitution_collapses_to_identity() {
    let (adj, phi) = adjoined();
    let dropped = substitute_circle_zero(adj.model(), phi, base().model());
    assert!(dropped.is_identity(base().model()));
    println!("criterion 5 (circle substitution yields the identity): PASS");
}

#[test]
fn criterion_6_group_invariants_match_the_minor_oracle() {
    let z = |n: i64| Z::from(n);
    let f = groups::parse(groups::F_GRP).unwrap();
    let f_inv = f.abelian_invariants();
    assert_eq!(f_inv.free_rank, 0);
    assert_eq!(f_inv.torsion, vec![z(2), z(4), z(4)]);
    let f_oracle = support::minor_gcd_invariants(&f.relation_matrix());
    assert_eq!(f_oracle, vec![z(1), z(1), z(1), z(2), z(4), z(4)]);
    assert_eq!(f.generators().len() - f_oracle.len(), f_inv.free_rank);

    let g = groups::parse(groups::G_GRP).unwrap();
    let g_inv = g.abelian_invariants();
    assert_eq!(g.rational_rank(), 1);
    assert_eq!(g_inv.torsion, vec![z(2), z(4), z(4)]);
    let g_oracle = support::minor_gcd_invariants(&g.relation_matrix());
    assert_eq!(g_oracle, vec![z(1), z(1), z(1), z(2), z(4), z(4)]);
    assert_eq!(g.generators().len() - g_oracle.len(), g_inv.free_rank);
    println!("criterion 6 (group invariants against the minor oracle): PASS");
}

#[test]
fn criterion_7_property_suites() {
    support::leibniz_suite(0xACCE_0001, 1000);
    support::graded_algebra_suite(0xACCE_0002, 1000);
    support::rank_nullity_suite(0xACCE_0003, 500);
    support::snf_divisibility_suite(0xACCE_0004, 500);
    support::tietze_suite(0xACCE_0005, 200);
    println!("criterion 7 (randomized property suites, zero failures): PASS");
}

#[test]
fn criterion_8_umbrella_runs_are_byte_identical() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let out1 = pipeline::reproduce(CAP, dir1.path(), ReportFormat::Json).unwrap();
    let out2 = pipeline::reproduce(CAP, dir2.path(), ReportFormat::Json).unwrap();
    assert!(out1.passed, "first run must pass");
    assert!(out2.passed, "second run must pass");
    assert_eq!(out1.text, out2.text, "printed reports differ");
    for name in ["model.json", "phi.json", "psi.json", "report.json"] {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    println!("criterion 8 (byte-identical umbrella runs): PASS");
}
