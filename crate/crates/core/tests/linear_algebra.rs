use foliated_hodge::linalg::{rank_kernel, solve_linear};
use foliated_hodge::{Exact, Float, Matrix};
use num_complex::Complex;
use proptest::prelude::*;

/// Determinant by cofactor expansion over i64.
fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect()
}

/// Size of the largest nonvanishing minor.
fn minor_rank(a: &[Vec<i64>], rows: usize, cols: usize) -> usize {
    (1..=rows.min(cols))
        .rev()
        .find(|&k| {
            choose(rows, k).iter().any(|r| {
                choose(cols, k).iter().any(|c| {
                    let sub: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| a[i][j]).collect()).collect();
                    det(&sub) != 0
                })
            })
        })
        .unwrap_or(0)
}

fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        // sparse entries so that rank deficiency is common
        let entry = prop_oneof![3 => Just(0i64), 2 => -3i64..=3];
        (Just(r), Just(c), proptest::collection::vec(proptest::collection::vec(entry, c), r))
    })
}

fn exact_matrix(a: &[Vec<i64>], rows: usize, cols: usize) -> Matrix<Exact> {
    Matrix::from_fn(rows, cols, |i, j| Exact::from_integer(a[i][j]))
}

proptest! {
    #[test]
    fn exact_rank_matches_minors((rows, cols, a) in small_matrix()) {
        let m = exact_matrix(&a, rows, cols);
        let rk = rank_kernel(&m);
        prop_assert_eq!(rk.rank, minor_rank(&a, rows, cols));
        prop_assert_eq!(rk.kernel.shape(), (cols, cols - rk.rank));
        prop_assert_eq!(rk.image.shape(), (rows, rk.rank));
        prop_assert!((&m * &rk.kernel).is_zero());
        prop_assert_eq!(rank_kernel(&rk.kernel).rank, cols - rk.rank);
    }

    #[test]
    fn float_rank_matches_exact((rows, cols, a) in small_matrix()) {
        let m: Matrix<Float> = Matrix::from_fn(rows, cols, |i, j| Complex::new(a[i][j] as f64, 0.0));
        prop_assert_eq!(rank_kernel(&m).rank, minor_rank(&a, rows, cols));
    }

    #[test]
    fn solutions_solve((rows, cols, a) in small_matrix(), x in proptest::collection::vec(-3i64..=3, 4)) {
        let m = exact_matrix(&a, rows, cols);
        let x: Vec<Exact> = x[..cols].iter().map(|&v| Exact::from_integer(v)).collect();
        let b = m.apply(&x).unwrap();
        let sol = solve_linear(&m, &b).unwrap().expect("b is in the image");
        prop_assert_eq!(m.apply(&sol).unwrap(), b);
    }

    #[test]
    fn transpose_preserves_rank((rows, cols, a) in small_matrix()) {
        let m = exact_matrix(&a, rows, cols);
        prop_assert_eq!(rank_kernel(&m).rank, rank_kernel(&m.adjoint()).rank);
    }
}
