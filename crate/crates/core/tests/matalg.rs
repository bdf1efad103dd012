use ellipquad::matalg::*;
use ellipquad::rng::stream_rng;
use ellipquad::AlgebraKind;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

const B1: AlgebraKind = AlgebraKind::REAL;
const B2: AlgebraKind = AlgebraKind::COMPLEX;
const B4: AlgebraKind = AlgebraKind::QUATERNION;

fn gaussian(beta: AlgebraKind, rows: usize, cols: usize, seed: u64) -> DAMatrix {
    let mut rng = stream_rng(seed, 99);
    DAMatrix::from_fn(beta, rows, cols, |_, _, _| rng.sample(StandardNormal))
}

fn max_diff(a: &DAMatrix, b: &DAMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

fn gram_psd(b: &DAMatrix) -> HermitianMatrix {
    HermitianMatrix::identity(b.beta(), b.cols())
        .congruence(&b.conj_transpose())
        .unwrap()
}

#[test]
fn eig_examples() {
    for beta in [B1, B2, B4] {
        assert_eq!(
            eig_hermitian(&HermitianMatrix::identity(beta, 3))
                .unwrap()
                .len(),
            3
        );
        for v in eig_hermitian(&HermitianMatrix::identity(beta, 3)).unwrap() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
    let s = HermitianMatrix::from_real(B1, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
    let e = eig_hermitian(&s).unwrap();
    assert!((e[0] - 3.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    assert!(eig_hermitian(&HermitianMatrix::identity(AlgebraKind::OCTONION, 2)).is_err());
}

#[test]
fn quaternion_eigenvalues_match_embedding() {
    let b = gaussian(B4, 2, 2, 1);
    let s = gram_psd(&b);
    let e = eig_hermitian(&s).unwrap();
    let c = s.to_complex().unwrap();
    let mut ce: Vec<f64> = nalgebra::SymmetricEigen::new(c)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ce.sort_by(|a, b| b.total_cmp(a));
    assert_eq!(e.len(), 2);
    for i in 0..2 {
        assert!((e[i] - ce[2 * i]).abs() < 1e-12);
        assert!((e[i] - ce[2 * i + 1]).abs() < 1e-12);
    }
    let (vals, frame) = hermitian_eigen(&s).unwrap();
    let rec = HermitianMatrix::diag(B4, &vals)
        .congruence(&frame.conj_transpose())
        .unwrap();
    assert!(max_diff(rec.as_matrix(), s.as_matrix()) < 1e-12);
}

#[test]
fn embedding_fidelity_for_real_input() {
    let b = gaussian(B1, 4, 4, 2);
    let s = gram_psd(&b);
    let e1 = eig_hermitian(&s).unwrap();
    for beta in [B2, B4] {
        let sp = HermitianMatrix::new(s.as_matrix().promote(beta).unwrap()).unwrap();
        let e = eig_hermitian(&sp).unwrap();
        for (x, y) in e1.iter().zip(&e) {
            assert!((x - y).abs() < 1e-12 * e1[0]);
        }
    }
}

#[test]
fn spectral_nonsingular_examples() {
    let d = spectral_nonsingular(&HermitianMatrix::identity(B1, 3), None).unwrap();
    assert_eq!(d.rank, 3);
    let d = spectral_nonsingular(&HermitianMatrix::diag(B1, &[1.0, 0.0]), None).unwrap();
    assert_eq!(d.rank, 1);
    assert_eq!(d.eigenvalues, vec![1.0]);
    assert!((d.frame.entry(0, 0)[0].abs() - 1.0).abs() < 1e-15);
    assert!(matches!(
        spectral_nonsingular(&HermitianMatrix::diag(B1, &[1.0, -0.5]), None),
        Err(ellipquad::Error::Indefinite { .. })
    ));
}

#[test]
fn rank_two_round_trip_all_algebras() {
    for (seed, beta) in [B1, B2, B4].into_iter().enumerate() {
        let b = gaussian(beta, 4, 2, 10 + seed as u64);
        let a = gram_psd(&b);
        let d = spectral_nonsingular(&a, None).unwrap();
        assert_eq!(d.rank, 2, "beta = {beta}");
        let rec = d.reconstruct().unwrap();
        assert!(max_diff(rec.as_matrix(), a.as_matrix()) <= 1e-10 * a.as_matrix().max_abs());
        let ptp = d.frame.conj_transpose().matmul(&d.frame).unwrap();
        assert!(max_diff(&ptp, &DAMatrix::identity(beta, 2)) < 1e-12);
        assert!(d.eigenvalues[0] > d.eigenvalues[1] && d.eigenvalues[1] > 0.0);
    }
}

#[test]
fn moore_penrose_examples_and_identities() {
    let p = moore_penrose(&HermitianMatrix::identity(B2, 3), None).unwrap();
    assert!(max_diff(p.as_matrix(), &DAMatrix::identity(B2, 3)) < 1e-15);
    let p = moore_penrose(&HermitianMatrix::diag(B1, &[2.0, 0.0]), None).unwrap();
    assert!(
        max_diff(
            p.as_matrix(),
            HermitianMatrix::diag(B1, &[0.5, 0.0]).as_matrix()
        ) < 1e-15
    );
    for (seed, beta) in [B1, B2, B4].into_iter().enumerate() {
        let a = gram_psd(&gaussian(beta, 5, 3, 20 + seed as u64));
        let ap = moore_penrose(&a, None).unwrap();
        let (am, pm) = (a.as_matrix(), ap.as_matrix());
        let apa = am.matmul(pm).unwrap().matmul(am).unwrap();
        let pap = pm.matmul(am).unwrap().matmul(pm).unwrap();
        let ap_ = am.matmul(pm).unwrap();
        let pa_ = pm.matmul(am).unwrap();
        let s = am.max_abs();
        assert!(max_diff(&apa, am) < 1e-10 * s);
        assert!(max_diff(&pap, pm) < 1e-10 * pm.max_abs());
        assert!(max_diff(&ap_, &ap_.conj_transpose()) < 1e-10);
        assert!(max_diff(&pa_, &pa_.conj_transpose()) < 1e-10);
    }
}

#[test]
fn sqrt_psd_examples() {
    let r = sqrt_psd(&HermitianMatrix::diag(B1, &[4.0, 1.0])).unwrap();
    assert!(
        max_diff(
            r.as_matrix(),
            HermitianMatrix::diag(B1, &[2.0, 1.0]).as_matrix()
        ) < 1e-14
    );
    for (seed, beta) in [B1, B2, B4].into_iter().enumerate() {
        let a = gram_psd(&gaussian(beta, 3, 3, 30 + seed as u64));
        let r = sqrt_psd(&a).unwrap();
        let sq = r.as_matrix().matmul(r.as_matrix()).unwrap();
        assert!(max_diff(&sq, a.as_matrix()) < 1e-10 * a.as_matrix().max_abs());
    }
}

#[test]
fn haar_orthonormal_and_deterministic() {
    for beta in [B1, B2, B4] {
        for seed in 0..5 {
            let h = haar_sample(3, beta, seed).unwrap();
            let hh = h.conj_transpose().matmul(&h).unwrap();
            assert!(max_diff(&hh, &DAMatrix::identity(beta, 3)) < 1e-12);
            assert_eq!(h, haar_sample(3, beta, seed).unwrap());
        }
        let s = stiefel_sample(2, 5, beta, 7).unwrap();
        assert_eq!((s.rows(), s.cols()), (5, 2));
        let ss = s.conj_transpose().matmul(&s).unwrap();
        assert!(max_diff(&ss, &DAMatrix::identity(beta, 2)) < 1e-12);
    }
    assert!(haar_sample(2, AlgebraKind::OCTONION, 1).is_err());
    assert!(stiefel_sample(3, 2, B1, 1).is_err());
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn haar_first_entry_moment() {
    let mut rng = stream_rng(5, 0);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| stiefel_sample_with(2, 2, B1, &mut rng).unwrap().entry(0, 0)[0].powi(2))
        .collect();
    let (m, se) = mean_se(&xs);
    assert!((m - 0.5).abs() <= 3.0 * se, "{m} +- {se}");
}

#[test]
fn stiefel_complex_moment() {
    let n = 4;
    let mut rng = stream_rng(6, 0);
    let xs: Vec<f64> = (0..100_000)
        .map(|_| {
            let h = stiefel_sample_with(2, n, B2, &mut rng).unwrap();
            h.entry(0, 0).iter().map(|x| x * x).sum::<f64>()
        })
        .collect();
    let (m, se) = mean_se(&xs);
    assert!((m - 1.0 / n as f64).abs() <= 3.0 * se, "{m} +- {se}");
}

#[test]
fn haar_left_invariance_statistic() {
    // Entries of U H for fixed unitary U have the same law as entries of H.
    let u = haar_sample(3, B1, 123).unwrap();
    let mut rng = stream_rng(8, 0);
    let xs: Vec<f64> = (0..50_000)
        .map(|_| {
            let h = stiefel_sample_with(3, 3, B1, &mut rng).unwrap();
            u.matmul(&h).unwrap().entry(1, 2)[0].powi(2)
        })
        .collect();
    let (m, se) = mean_se(&xs);
    assert!((m - 1.0 / 3.0).abs() <= 3.0 * se);
}

/// Real matrix of the map X -> A X on the beta*n*m real coordinates of X.
fn induced_map(a: &DAMatrix, m: usize) -> DMatrix<f64> {
    let beta = a.beta();
    let (p, n) = (a.rows(), a.cols());
    let dim_in = beta.components() * n * m;
    let dim_out = beta.components() * p * m;
    let mut out = DMatrix::zeros(dim_out, dim_in);
    for k in 0..dim_in {
        let mut e = vec![0.0; dim_in];
        e[k] = 1.0;
        let x = DAMatrix::new(beta, n, m, e).unwrap();
        let y = a.matmul(&x).unwrap();
        for (r, v) in y.data().iter().enumerate() {
            out[(r, k)] = *v;
        }
    }
    out
}

fn gram_volume(map: &DMatrix<f64>) -> f64 {
    (map.transpose() * map).determinant().sqrt()
}

#[test]
fn linear_volume_examples() {
    assert!((linear_volume_factor(&DAMatrix::identity(B2, 3), 2).unwrap() - 1.0).abs() < 1e-14);
    let a = DAMatrix::from_real(B1, 2, 2, &[2.0, 0.0, 0.0, 3.0]).unwrap();
    assert!((linear_volume_factor(&a, 1).unwrap() - 6.0).abs() < 1e-13);
    let a = gaussian(B1, 5, 3, 41);
    let lv = linear_volume_factor(&a, 2).unwrap();
    let g = gram_volume(&induced_map(&a, 2));
    assert!(((lv - g) / g).abs() < 1e-10);
    let singular = DAMatrix::from_real(B1, 3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
    assert!(matches!(
        linear_volume_factor(&singular, 1),
        Err(ellipquad::Error::Rank(_))
    ));
}

#[test]
fn linear_volume_quaternion_gram() {
    let a = gaussian(B4, 3, 2, 42);
    let lv = linear_volume_factor(&a, 2).unwrap();
    let g = gram_volume(&induced_map(&a, 2));
    assert!(((lv - g) / g).abs() < 1e-10);
}

#[test]
fn singular_volume_examples() {
    let a = gaussian(B1, 4, 3, 50);
    let c = gaussian(B1, 3, 2, 51);
    let sv = singular_volume_factor(&a, &c, 1).unwrap();
    let ratio =
        gram_volume(&induced_map(&a.matmul(&c).unwrap(), 1)) / gram_volume(&induced_map(&c, 1));
    assert!(((sv - ratio) / ratio).abs() < 1e-10);
    let one = singular_volume_factor(&DAMatrix::identity(B1, 3), &c, 2).unwrap();
    assert!((one - 1.0).abs() < 1e-12);

    // C = leading right singular vectors of A: factor equals product of the leading sigma^(beta m).
    let a = gaussian(B1, 3, 3, 52);
    let svd = nalgebra::SVD::new(DMatrix::from_fn(3, 3, |i, j| a.entry(i, j)[0]), false, true);
    let vt = svd.v_t.unwrap();
    let mut idx: Vec<usize> = (0..3).collect();
    idx.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let c = DAMatrix::from_fn(B1, 3, 2, |i, j, _| vt[(idx[j], i)]);
    let expect: f64 = (0..2)
        .map(|j| svd.singular_values[idx[j]].powi(2))
        .product();
    assert!(((singular_volume_factor(&a, &c, 2).unwrap() - expect) / expect).abs() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conj_transpose_is_involution(seed in 0u64..1000, beta_idx in 0usize..3, r in 1usize..4, c in 1usize..4) {
        let beta = [B1, B2, B4][beta_idx];
        let a = gaussian(beta, r, c, seed);
        prop_assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn trace_of_hermitian_product_is_real(seed in 0u64..1000, beta_idx in 0usize..2) {
        let beta = [B1, B2][beta_idx];
        let w = gram_psd(&gaussian(beta, 3, 3, seed));
        let s = gram_psd(&gaussian(beta, 3, 3, seed + 7));
        let p = w.as_matrix().matmul(s.as_matrix()).unwrap();
        let imag: f64 = (0..3).map(|i| p.entry(i, i)[1..].iter().sum::<f64>()).sum();
        prop_assert!(imag.abs() < 1e-10 * p.max_abs().max(1.0));
    }

    #[test]
    fn quaternion_embedded_trace_is_twice_real_trace(seed in 0u64..1000) {
        let w = gram_psd(&gaussian(B4, 3, 3, seed));
        let s = gram_psd(&gaussian(B4, 3, 3, seed + 7));
        let p = w.as_matrix().matmul(s.as_matrix()).unwrap();
        let emb = w.to_complex().unwrap() * s.to_complex().unwrap();
        let t = emb.trace();
        prop_assert!(t.im.abs() < 1e-10 * p.max_abs().max(1.0));
        prop_assert!((t.re - 2.0 * p.trace_re()).abs() < 1e-10 * p.max_abs().max(1.0));
    }

    #[test]
    fn linear_volume_matches_gram(seed in 0u64..1000, beta_idx in 0usize..2, n in 1usize..4, extra in 0usize..3, m in 1usize..3) {
        let beta = [B1, B2][beta_idx];
        let a = gaussian(beta, n + extra, n, seed);
        let lv = linear_volume_factor(&a, m).unwrap();
        let g = gram_volume(&induced_map(&a, m));
        prop_assert!(((lv - g) / g).abs() < 1e-10);
    }
}
