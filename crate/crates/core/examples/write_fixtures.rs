//! Regenerates the bundled model files and the tampered copies used by the CLI tests.
//!
//! cargo run -p foliated-hodge --example write_fixtures -- crates/core/fixtures crates/cli/tests/fixtures

use std::path::Path;
use std::sync::Arc;

use foliated_hodge::models::fcx::StoredMorphism;
use foliated_hodge::{
    build_tensor_model, build_torus_model, save_model, Error, Exact, FcxModel, LeafComplex, Matrix, MorphismKind,
    TensorModelSpec, TorusModelSpec,
};

fn torus(spec: &TorusModelSpec) -> Result<FcxModel<Exact>, Error> {
    let m = build_torus_model::<Exact>(spec)?;
    let morphisms = (0..spec.p)
        .map(|j| {
            Ok(StoredMorphism {
                name: format!("quarter_leaf_shift_{}", j + 1),
                kind: MorphismKind::Pullback,
                blocks: m.leaf_translation(j)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(FcxModel { complex: m.complex, twist: Some(m.twist), stars: Some(m.stars), morphisms })
}

/// Doubles the last stored entry.
fn perturb(m: &Matrix<Exact>) -> Matrix<Exact> {
    let mut t: Vec<(usize, usize, Exact)> = m.triplets().map(|(i, j, x)| (i, j, x.clone())).collect();
    if let Some(last) = t.last_mut() {
        last.2 = last.2.clone() + last.2.clone();
    }
    Matrix::from_triplets(m.rows(), m.cols(), t).expect("same pattern")
}

fn main() -> Result<(), Error> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (bundled, tampered) = match args.as_slice() {
        [a, b] => (Path::new(a), Path::new(b)),
        _ => {
            eprintln!("usage: write_fixtures <bundled dir> <tampered dir>");
            std::process::exit(2);
        }
    };
    std::fs::create_dir_all(bundled)?;
    std::fs::create_dir_all(tampered)?;

    let leaf = TensorModelSpec { transverse_dims: vec![1], leaf: LeafComplex::two_point(Exact::from_integer(1)) };
    let m = build_tensor_model(&leaf)?;
    save_model(&FcxModel { complex: m.complex, twist: Some(m.twist), stars: None, morphisms: vec![] }, bundled.join("two_point_leaf.fcx"))?;
    save_model(&torus(&TorusModelSpec::with_integer_twist(1, 1, 1, &[1]))?, bundled.join("torus_p1_q1_K1.fcx"))?;
    save_model(&torus(&TorusModelSpec::untwisted(2, 3, 1))?, bundled.join("torus_p2_q3_K1_c0.fcx"))?;

    let base = torus(&TorusModelSpec::with_integer_twist(2, 1, 1, &[1, 0]))?;

    let mut bad_df = base.clone();
    let complex = (*bad_df.complex).clone();
    let block = perturb(&complex.d_f(0, 0));
    bad_df.complex = Arc::new(complex.with_d_f_block(0, 0, block)?);
    save_model(&bad_df, tampered.join("tampered_dF.fcx"))?;

    let mut bad_star = base.clone();
    let stars = bad_star.stars.take().expect("torus has stars");
    let negated = -&stars.star_f(0, 1);
    bad_star.stars = Some(stars.with_star_f_block(0, 1, negated)?);
    save_model(&bad_star, tampered.join("tampered_starF.fcx"))?;

    let mut bad_w = base;
    let twist = bad_w.twist.as_mut().expect("torus has a twist");
    twist.w[0][0] = perturb(&twist.w[0][0]);
    save_model(&bad_w, tampered.join("tampered_W.fcx"))?;
    Ok(())
}
