use foliated_hodge::{
    build_torus_model, check_harmonic_transport, check_laplacian_conjugations, check_sign_identities,
    check_transverse_conjugation, Exact, Report, TorusModelSpec,
};
use num_rational::BigRational;

fn specs() -> Vec<TorusModelSpec> {
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    let mut out = Vec::new();
    for (p, q) in [(1, 1), (2, 1), (2, 3)] {
        let mut cs = vec![vec![zero.clone(); p]];
        let mut dx1 = vec![zero.clone(); p];
        dx1[0] = one.clone();
        cs.push(dx1.clone());
        if p >= 2 {
            let mut mixed = dx1;
            mixed[1] = half.clone();
            cs.push(mixed);
        }
        for c in cs {
            out.push(TorusModelSpec::new(p, q, 1, c).unwrap());
        }
    }
    out
}

fn failures(r: &Report) -> Vec<String> {
    r.failures().map(|f| f.to_string()).collect()
}

#[test]
fn star_invariants_hold_on_torus_models() {
    for spec in specs() {
        let m = build_torus_model::<Exact>(&spec).unwrap();
        assert!(m.stars.invariant_report().all_pass(), "{spec:?}");
    }
}

#[test]
fn sign_identities_hold_exactly() {
    for spec in specs() {
        let m = build_torus_model::<Exact>(&spec).unwrap();
        let t = m.twisted().unwrap();
        let r = check_sign_identities(&m.stars, &t).unwrap();
        assert!(r.all_pass(), "{spec:?}: {:#?}", failures(&r));
    }
}

#[test]
fn laplacian_conjugations_hold_exactly() {
    for spec in specs() {
        let m = build_torus_model::<Exact>(&spec).unwrap();
        let t = m.twisted().unwrap();
        let r = check_laplacian_conjugations(&t, &t.negated(), &m.stars).unwrap();
        assert!(r.all_pass(), "{spec:?}: {:#?}", failures(&r));
        let r = check_harmonic_transport(&t, &t.negated(), &m.stars).unwrap();
        assert!(r.all_pass(), "{spec:?}: {:#?}", failures(&r));
    }
}

#[test]
fn transverse_star_never_anticommutes_with_nonzero_laplacian() {
    let m = build_torus_model::<Exact>(&TorusModelSpec::untwisted(1, 1, 1)).unwrap();
    let t = m.twisted().unwrap();
    let r = check_transverse_conjugation(&t, &m.stars, "t", |_, _, _, _| -1).unwrap();
    assert!(r.records.iter().all(|x| !x.pass));
}

fn circle_model(n: usize, g: &[(usize, i64)]) -> (foliated_hodge::ExactTwisted, foliated_hodge::StarOperators<Exact>) {
    use foliated_hodge::{make_twist, BigradedComplex, LeafwiseForm, Matrix, Orientation, StarOperators};
    use std::sync::Arc;
    // modes k = -K..K, read modulo n
    let k = (n as i64 - 1) / 2;
    let d = Matrix::diagonal((0..n).map(|a| Exact::new(BigRational::from_integer(0.into()), BigRational::from_integer((a as i64 - k).into()))));
    let base = BigradedComplex::new(1, 0, vec![vec![n, n]], None, vec![vec![d, Matrix::zeros(0, n)]]).unwrap();
    // multiplication by the real function g = sum_m ghat_m e^{imx}, ghat_{-m} = ghat_m
    let mut coeff = vec![Exact::from_integer(0); n];
    for &(m, c) in g {
        coeff[m % n] = Exact::from_integer(c);
        coeff[(n - m % n) % n] = Exact::from_integer(c);
    }
    let w = Matrix::from_fn(n, n, |r, c| coeff[(r + n - c) % n].clone());
    let omega = LeafwiseForm::new((0, 1), w.column(k as usize));
    let t = make_twist(Arc::new(base), omega, vec![vec![w, Matrix::zeros(0, n)]]).unwrap();
    let id = Matrix::identity(n);
    let stars = StarOperators::from_blocks(
        t.base(),
        vec![vec![id.clone(), id.clone()]],
        vec![vec![id.clone(), id]],
        None,
        Orientation::default(),
    )
    .unwrap();
    (t, stars)
}

#[test]
fn swapped_twists_still_conjugate() {
    // exchanging the two twists is the same identity for -omega
    let (t, stars) = circle_model(5, &[(0, 1), (1, 1)]);
    let good = check_laplacian_conjugations(&t, &t.negated(), &stars).unwrap();
    assert!(good.all_pass(), "{:#?}", failures(&good));
    let swapped = check_laplacian_conjugations(&t.negated(), &t, &stars).unwrap();
    assert!(swapped.all_pass(), "{:#?}", failures(&swapped));
}

#[test]
fn same_twist_on_both_sides_fails_on_aliased_circle() {
    let (t, stars) = circle_model(5, &[(0, 1), (1, 1)]);
    assert_ne!(t.laplacian(0, 0).unwrap(), t.negated().laplacian(0, 0).unwrap());
    let r = check_laplacian_conjugations(&t, &t, &stars).unwrap();
    assert!(r.failures().any(|f| f.identity == "leaf_star_laplacian" && f.block == (0, 0)), "{}", r.to_text());
}

#[test]
fn same_twist_on_both_sides_passes_on_torus() {
    // the torus Laplacian only sees |omega|^2, so both twists share it
    let spec = TorusModelSpec::with_integer_twist(1, 1, 1, &[1]);
    let m = build_torus_model::<Exact>(&spec).unwrap();
    let t = m.twisted().unwrap();
    assert_eq!(t.laplacian(0, 0).unwrap(), t.negated().laplacian(0, 0).unwrap());
    assert!(check_laplacian_conjugations(&t, &t, &m.stars).unwrap().all_pass());
}

#[test]
fn reversing_leaf_orientation_negates_leaf_and_full_stars() {
    for (p, q) in [(1, 1), (2, 1), (2, 3)] {
        let spec = TorusModelSpec::with_integer_twist(p, q, 1, &vec![1; p]);
        let mut reversed = spec.clone();
        reversed.reverse_leaf_orientation = true;
        let a = build_torus_model::<Exact>(&spec).unwrap();
        let b = build_torus_model::<Exact>(&reversed).unwrap();
        assert!(b.stars.invariant_report().all_pass());
        for u in 0..=q as isize {
            for v in 0..=p as isize {
                assert_eq!(b.stars.star_f(u, v), -&a.stars.star_f(u, v), "({u},{v})");
                assert_eq!(b.stars.star_full(u, v), -&a.stars.star_full(u, v), "({u},{v})");
                assert_eq!(b.stars.star_perp(u, v), a.stars.star_perp(u, v), "({u},{v})");
            }
        }
        let t = b.twisted().unwrap();
        assert!(check_sign_identities(&b.stars, &t).unwrap().all_pass());
    }
}
