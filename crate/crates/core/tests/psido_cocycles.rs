use lifting_core::algebra::{trial_rng, RandomElements, TraceAlgebra};
use lifting_core::cochains::{build_psi_n1, build_psi_nl, evaluate, evaluate_naive};
use lifting_core::cohomology::{verify_thm21, verify_thm23};
use lifting_core::psido::make_psido_context;

#[test]
fn psi_21_is_a_cocycle_on_psidos() {
    let ctx = make_psido_context(1, vec![-10]).unwrap();
    let r = verify_thm21(2, &ctx, 8, 7).unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert!(r.notes["cochain_nonzero_trials"].as_u64().unwrap() > 0, "{}", r.to_json());
}

#[test]
fn circle_psi_21_is_a_cocycle_on_psidos() {
    let ctx = make_psido_context(1, vec![-10]).unwrap();
    let r = verify_thm23(2, 1, &ctx, 8, 8).unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert!(r.notes["cochain_nonzero_trials"].as_u64().unwrap() > 0, "{}", r.to_json());
}

#[test]
fn dp_matches_naive_on_psidos() {
    let ctx = make_psido_context(1, vec![-10]).unwrap();
    for d in [build_psi_n1(2).unwrap(), build_psi_nl(2, 1).unwrap()] {
        let args = ctx.random_elements(d.arity, &mut trial_rng(5, 0));
        assert_eq!(evaluate(&d, &ctx, &args).unwrap(), evaluate_naive(&d, &ctx, &args).unwrap());
    }
    assert_eq!(ctx.derivation_count(), 2);
}

/// Two variables, four derivations: `Q` is nonzero only between `ln x_v` and `ln ∂_v`.
#[test]
fn axioms_in_two_variables() {
    let ctx = make_psido_context(2, vec![-9, -9]).unwrap();
    let r = lifting_core::algebra::axioms::check_axioms(&ctx, 3, 1);
    assert!(r.pass, "{}", r.to_json());
}
