//! Library results checked against independent, deliberately naive
//! computations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use ndarray::{array, Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use rda_core::classifiers::{gmm_classify, kld_gaussian, qda_fit, CovType, Gmm};
use rda_core::features::mel::{Mfcc, MfccConfig};

fn to_na(m: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

/// `ln N(x; mu, S)` through an LU determinant and explicit inverse.
fn log_gauss(x: &[f64], mu: &[f64], s: &Array2<f64>) -> f64 {
    let s = to_na(s);
    let d = DVector::from_iterator(x.len(), x.iter().zip(mu).map(|(a, b)| a - b));
    let inv = s.clone().try_inverse().unwrap();
    let q = (d.transpose() * inv * &d)[(0, 0)];
    -0.5 * (x.len() as f64 * (2.0 * PI).ln() + s.determinant().ln() + q)
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Array2<f64> {
    let a = Array2::from_shape_fn((d, d), |_| rng.sample::<f64, _>(StandardNormal));
    a.t().dot(&a) + Array2::<f64>::eye(d) * 0.5
}

#[test]
fn gmm_density_and_decision_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = 3;
    let models: Vec<Gmm> = (0..4)
        .map(|_| {
            let k = rng.random_range(1..=3);
            let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            let means = Array2::from_shape_fn((k, d), |_| rng.random_range(-3.0..3.0));
            let covs = (0..k).map(|_| random_spd(&mut rng, d)).collect();
            Gmm::new(CovType::Full, w, means, covs).unwrap()
        })
        .collect();
    for _ in 0..200 {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let brute: Vec<f64> = models
            .iter()
            .map(|g| {
                (0..g.n_components())
                    .map(|c| {
                        let mu = g.means().row(c).to_vec();
                        g.weights()[c] * log_gauss(&v, &mu, &g.covariances()[c]).exp()
                    })
                    .sum::<f64>()
                    .ln()
            })
            .collect();
        for (g, b) in models.iter().zip(&brute) {
            let got = g.log_pdf(Array1::from(v.clone()).view());
            assert!((got - b).abs() < 1e-9 * b.abs().max(1.0), "{got} vs {b}");
        }
        let best = (0..brute.len()).fold(0, |i, j| if brute[j] > brute[i] { j } else { i });
        assert_eq!(gmm_classify(&models, Array1::from(v).view()).unwrap(), best);
    }
}

#[test]
fn qda_discriminant_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 120;
    let x = Array2::from_shape_fn((n, 2), |(i, j)| rng.sample::<f64, _>(StandardNormal) + (i % 3) as f64 * (j + 1) as f64);
    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let q = qda_fit(x.view(), &labels, 4, 0.1).unwrap();
    assert!(q.classes[3].is_none());
    for _ in 0..50 {
        let v = [rng.random_range(-3.0..5.0), rng.random_range(-3.0..8.0)];
        let scores = q.scores(array![v[0], v[1]].view());
        for k in 0..3 {
            let c = q.classes[k].as_ref().unwrap();
            let want = c.log_prior + log_gauss(&v, c.mean.as_slice().unwrap(), &c.covariance);
            assert!((scores[k] - want).abs() < 1e-9, "{} vs {want}", scores[k]);
        }
        assert_eq!(scores[3], f64::NEG_INFINITY);
    }
}

#[test]
fn qda_shrinkage_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = Array2::from_shape_fn((200, 3), |_| rng.sample::<f64, _>(StandardNormal));
    let labels = vec![0usize; 200];
    let q = qda_fit(x.view(), &labels, 1, 0.25).unwrap();
    let c = q.classes[0].as_ref().unwrap();
    let mean = x.mean_axis(ndarray::Axis(0)).unwrap();
    let centered = &x - &mean;
    let mle = centered.t().dot(&centered) / 200.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { mle[[i, j]] } else { 0.75 * mle[[i, j]] };
            assert!((c.covariance[[i, j]] - want).abs() < 1e-9);
        }
    }
}

#[test]
fn kld_matches_monte_carlo() {
    let mu_a = array![0.0, 1.0];
    let s_a = array![[1.0, 0.3], [0.3, 0.5]];
    let mu_b = array![0.5, -0.5];
    let s_b = array![[2.0, -0.2], [-0.2, 1.0]];
    let closed = kld_gaussian(&mu_a, &s_a, &mu_b, &s_b).unwrap();
    // samples of A through its Cholesky factor [[1, 0], [0.3, sqrt(0.41)]]
    let l21 = 0.3;
    let l22 = 0.41f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 200_000;
    let mc: f64 = (0..n)
        .map(|_| {
            let (z1, z2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            let s = [z1, 1.0 + l21 * z1 + l22 * z2];
            log_gauss(&s, &[0.0, 1.0], &s_a) - log_gauss(&s, &[0.5, -0.5], &s_b)
        })
        .sum::<f64>()
        / n as f64;
    assert!((closed - mc).abs() < 0.02, "{closed} vs {mc}");
    assert!(kld_gaussian(&mu_b, &s_b, &mu_a, &s_a).unwrap() != closed);
}

#[test]
fn mfcc_matches_reference_pipeline() {
    let cfg = MfccConfig::default();
    let frame_len = 320;
    let mfcc = Mfcc::new(frame_len, 8000, cfg).unwrap();
    let bank = &mfcc.filterbank().weights;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let x: Vec<f64> = (0..frame_len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n_fft = cfg.n_fft;
        let windowed: Vec<f64> = (0..frame_len)
            .map(|i| x[i] * (0.54 - 0.46 * (2.0 * PI * i as f64 / (frame_len - 1) as f64).cos()))
            .collect();
        let power: Vec<f64> = (0..=n_fft / 2)
            .map(|k| {
                let s: Complex64 = windowed
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n_fft as f64))
                    .sum();
                s.norm_sqr() / frame_len as f64
            })
            .collect();
        let log_mel: Vec<f64> = bank
            .rows()
            .into_iter()
            .map(|r| r.iter().zip(&power).map(|(w, p)| w * p).sum::<f64>().max(1e-10).ln())
            .collect();
        let m = log_mel.len() as f64;
        let want: Vec<f64> = (0..cfg.n_coeffs)
            .map(|k| {
                let s: f64 = log_mel
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * m)).cos())
                    .sum();
                s * if k == 0 { (1.0 / m).sqrt() } else { (2.0 / m).sqrt() }
            })
            .collect();
        let got = mfcc.coefficients(&x);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn mel_triangles_peak_at_one() {
    let mfcc = Mfcc::new(320, 8000, MfccConfig::default()).unwrap();
    for row in mfcc.filterbank().weights.rows() {
        let max = row.iter().copied().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(row.iter().all(|&w| (0.0..=1.0).contains(&w)));
    }
}
