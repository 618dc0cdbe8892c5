use foliated_hodge::linalg::rank;
use foliated_hodge::{
    betti_table, build_tensor_model, build_torus_model, compose, conjugated_twist, induced_map, leafwise_exactness,
    verify_homotopy_factor, verify_intertwiner, verify_morphism, ComplexMorphism, Error, Exact, ExactTwisted,
    LeafComplex, Matrix, MorphismKind, TensorModelSpec, TorusModelSpec,
};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Blocks = Vec<Vec<Matrix<Exact>>>;

fn torus(p: usize, q: usize, k: usize, c: &[i64]) -> foliated_hodge::TorusModel<Exact> {
    build_torus_model::<Exact>(&TorusModelSpec::with_integer_twist(p, q, k, c)).unwrap()
}

fn identity_blocks(t: &ExactTwisted) -> Blocks {
    (0..=t.q()).map(|u| (0..=t.p()).map(|v| Matrix::identity(t.dim(u as isize, v as isize))).collect()).collect()
}

fn map_blocks(b: &Blocks, f: impl Fn(&Matrix<Exact>) -> Matrix<Exact>) -> Blocks {
    b.iter().map(|row| row.iter().map(&f).collect()).collect()
}

fn random_diagonal(t: &ExactTwisted, rng: &mut ChaCha8Rng) -> Blocks {
    (0..=t.q())
        .map(|u| {
            (0..=t.p())
                .map(|v| {
                    let n = t.dim(u as isize, v as isize);
                    Matrix::diagonal((0..n).map(|_| {
                        let num = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
                        Exact::ratio(num, rng.gen_range(1..=4))
                    }))
                })
                .collect()
        })
        .collect()
}

fn synthetic_bases() -> Vec<ExactTwisted> {
    let mut out = vec![
        torus(1, 1, 1, &[0]).twisted().unwrap(),
        torus(1, 1, 1, &[1]).twisted().unwrap(),
        torus(2, 1, 0, &[0, 0]).twisted().unwrap(),
        torus(1, 2, 0, &[2]).twisted().unwrap(),
    ];
    for c in [0, 3] {
        let spec = TensorModelSpec { transverse_dims: vec![2, 1], leaf: LeafComplex::two_point(Exact::from_integer(c)) };
        out.push(build_tensor_model(&spec).unwrap().twisted().unwrap());
    }
    out
}

#[test]
fn identity_induces_identity() {
    let t = torus(1, 1, 1, &[0]).twisted().unwrap();
    let m = ComplexMorphism::identity(&t);
    for (u, row) in betti_table(&t).unwrap().iter().enumerate() {
        for (v, &h) in row.iter().enumerate() {
            assert_eq!(induced_map(&m, u as isize, v as isize).unwrap(), Matrix::identity(h));
        }
    }
}

#[test]
fn synthetic_gauge_pairs_preserve_betti_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bases = synthetic_bases();
    for i in 0..20 {
        let t = &bases[i % bases.len()];
        let u = random_diagonal(t, &mut rng);
        let target = conjugated_twist(t, &u).unwrap();
        let m = verify_intertwiner(u, t, &target).unwrap();
        assert_eq!(m.kind(), MorphismKind::Gauge);
        let (bs, bt) = (betti_table(t).unwrap(), betti_table(&target).unwrap());
        assert_eq!(bs, bt);
        for (a, row) in bs.iter().enumerate() {
            for (b, &h) in row.iter().enumerate() {
                let map = induced_map(&m, a as isize, b as isize).unwrap();
                assert_eq!((map.rows(), map.cols(), rank(&map)), (h, h, h));
            }
        }
    }
}

#[test]
fn gauge_verification_rejects_bad_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in synthetic_bases() {
        let u = random_diagonal(&t, &mut rng);
        let target = conjugated_twist(&t, &u).unwrap();

        let mut singular = u.clone();
        let (r, c) = (0..=t.q())
            .flat_map(|a| (0..=t.p()).map(move |b| (a, b)))
            .find(|&(a, b)| singular[a][b].rows() > 0)
            .unwrap();
        let n = singular[r][c].rows();
        singular[r][c] = Matrix::diagonal((0..n).map(|i| if i == 0 { Exact::zero() } else { Exact::one() }));
        assert!(matches!(verify_intertwiner(singular, &t, &target), Err(Error::NotInvertible { .. })));

        // a fresh random diagonal does not intertwine with the first conjugate
        let trivial = (0..=t.q() as isize).all(|a| (0..=t.p() as isize).all(|b| t.d_omega(a, b).is_zero()));
        if trivial {
            continue;
        }
        let wrong = random_diagonal(&t, &mut rng);
        assert!(matches!(verify_intertwiner(wrong, &t, &target), Err(Error::NotIntertwining { .. })));
    }
}

#[test]
fn quarter_leaf_translations_act_trivially_on_cohomology() {
    for (p, q) in [(1, 1), (2, 1), (1, 2)] {
        let m = torus(p, q, 1, &vec![0; p]);
        let t = m.twisted().unwrap();
        let betti = betti_table(&t).unwrap();
        for j in 0..p {
            let f = verify_morphism(m.leaf_translation(j).unwrap(), &t, &t, MorphismKind::Pullback).unwrap();
            for u in 0..=q {
                for v in 0..=p {
                    let map = induced_map(&f, u as isize, v as isize).unwrap();
                    assert_eq!(map, Matrix::identity(betti[u][v]), "p={p} q={q} j={j} ({u},{v})");
                }
            }
        }
    }
}

#[test]
fn quarter_transverse_translation_is_not_trivial() {
    let m = torus(1, 1, 1, &[0]);
    let t = m.twisted().unwrap();
    let f = verify_morphism(m.transverse_translation(0).unwrap(), &t, &t, MorphismKind::Pullback).unwrap();
    let map = induced_map(&f, 0, 0).unwrap();
    assert_ne!(map, Matrix::identity(map.rows()));
    // four quarter turns are the identity
    let square = compose(&f, &f).unwrap();
    let full = compose(&square, &square).unwrap();
    assert_eq!(induced_map(&full, 0, 0).unwrap(), Matrix::identity(map.rows()));
}

#[test]
fn induced_maps_compose() {
    let m = torus(1, 2, 1, &[0]);
    let t = m.twisted().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_diagonal(&t, &mut rng);
    let target = conjugated_twist(&t, &g).unwrap();
    let gauge = verify_intertwiner(g, &t, &target).unwrap();
    let shifts = [
        verify_morphism(m.transverse_translation(0).unwrap(), &t, &t, MorphismKind::Pullback).unwrap(),
        verify_morphism(m.transverse_translation(1).unwrap(), &t, &t, MorphismKind::Pullback).unwrap(),
        verify_morphism(m.leaf_translation(0).unwrap(), &t, &t, MorphismKind::Pullback).unwrap(),
    ];
    for first in &shifts {
        for second in &shifts {
            let both = compose(second, first).unwrap();
            let then_gauge = compose(&gauge, &both).unwrap();
            for u in 0..=2isize {
                for v in 0..=1isize {
                    let (a, b) = (induced_map(first, u, v).unwrap(), induced_map(second, u, v).unwrap());
                    assert_eq!(induced_map(&both, u, v).unwrap(), &b * &a);
                    let c = induced_map(&gauge, u, v).unwrap();
                    assert_eq!(induced_map(&then_gauge, u, v).unwrap(), &(&c * &b) * &a);
                }
            }
        }
    }
}

#[test]
fn composition_checks_matching_complexes() {
    let a = torus(1, 1, 0, &[0]).twisted().unwrap();
    let b = torus(1, 1, 0, &[1]).twisted().unwrap();
    let (ia, ib) = (ComplexMorphism::identity(&a), ComplexMorphism::identity(&b));
    assert!(compose(&ib, &ia).is_err());
}

#[test]
fn homotopy_factor_translation_versus_identity() {
    let m = torus(1, 1, 1, &[0]);
    let t = m.twisted().unwrap();
    let shift = verify_morphism(m.leaf_translation(0).unwrap(), &t, &t, MorphismKind::Pullback).unwrap();
    let id = ComplexMorphism::identity(&t);
    let r = verify_homotopy_factor(&shift, &id, &identity_blocks(&t)).unwrap();
    assert!(r.all_pass(), "{}", r.to_text());
    assert_eq!(r.len(), 4);
}

#[test]
fn homotopy_factor_fails_against_negation() {
    let m = torus(1, 1, 1, &[0]);
    let t = m.twisted().unwrap();
    let id = ComplexMorphism::identity(&t);
    let neg = verify_morphism(map_blocks(&identity_blocks(&t), |b| -b), &t, &t, MorphismKind::General).unwrap();
    let r = verify_homotopy_factor(&id, &neg, &identity_blocks(&t)).unwrap();
    let betti = betti_table(&t).unwrap();
    for rec in &r.records {
        let (u, v) = rec.block;
        assert_eq!(rec.pass, betti[u][v] == 0, "{rec}");
    }
    assert!(verify_homotopy_factor(&id, &id, &identity_blocks(&t)).unwrap().all_pass());
}

#[test]
fn homotopy_factor_rejects_singular_factor() {
    let t = torus(1, 1, 0, &[0]).twisted().unwrap();
    let id = ComplexMorphism::identity(&t);
    let zero = map_blocks(&identity_blocks(&t), |b| Matrix::zeros(b.rows(), b.cols()));
    assert!(matches!(verify_homotopy_factor(&id, &id, &zero), Err(Error::NotInvertible { .. })));
}

#[test]
fn degree_zero_criterion_on_tori() {
    for (p, q) in [(1, 1), (2, 1), (1, 2)] {
        for c0 in [0, 1, -2] {
            let mut c = vec![0; p];
            c[p - 1] = c0;
            let e = leafwise_exactness(&torus(p, q, 1, &c).twisted().unwrap()).unwrap();
            assert!(e.criterion_holds());
            assert_eq!(e.primitive.is_some(), c0 == 0);
            assert_eq!(e.h00 != 0, c0 == 0);
        }
    }
}

#[test]
fn two_point_leaf_twist_is_always_exact() {
    for c in [0, 1, 5] {
        let spec = TensorModelSpec { transverse_dims: vec![1], leaf: LeafComplex::two_point(Exact::from_integer(c)) };
        let t = build_tensor_model(&spec).unwrap().twisted().unwrap();
        let e = leafwise_exactness(&t).unwrap();
        let g = e.primitive.expect("difference map is onto");
        let d = t.base().d_f(0, 0);
        assert_eq!(d.apply(&g.coefficients).unwrap(), t.omega().coefficients);
    }
}
