mod common;

use common::{naive_dft, naive_gmsd, naive_psnr, naive_spectral_l1, naive_ssim, random_image};
use lapjitter::{metrics, Image};

#[test]
fn psnr_matches_brute_force_mse() {
    let mut rng = common::rng(21);
    for _ in 0..20 {
        let a = random_image(&mut rng, 8, 8);
        let b = random_image(&mut rng, 8, 8);
        let got = metrics::psnr(&a, &b, 1.0).unwrap();
        assert!((got - naive_psnr(&a, &b)).abs() <= 1e-9);
    }
}

#[test]
fn ssim_matches_windowed_statistics() {
    let mut rng = common::rng(22);
    for _ in 0..5 {
        let a = random_image(&mut rng, 32, 32);
        let noise = random_image(&mut rng, 32, 32);
        let b = Image::from_fn(32, 32, |r, c| {
            (a.get(r, c) + 0.4 * (noise.get(r, c) - 0.5)).clamp(0.0, 1.0)
        });
        let got = metrics::ssim(&a, &b).unwrap();
        assert!((got - naive_ssim(&a, &b)).abs() <= 1e-6);
    }
}

#[test]
fn gmsd_matches_per_pixel_prewitt() {
    let mut rng = common::rng(23);
    for (h, w) in [(16, 16), (17, 15), (4, 4)] {
        let a = random_image(&mut rng, h, w);
        let b = random_image(&mut rng, h, w);
        let got = metrics::gmsd(&a, &b).unwrap();
        assert!((got - naive_gmsd(&a, &b)).abs() <= 1e-9);
    }
}

#[test]
fn fft_matches_naive_dft_and_parseval() {
    let mut rng = common::rng(24);
    let img = random_image(&mut rng, 6, 10);
    let fast = metrics::dft2(&img);
    for (z, (re, im)) in fast.iter().zip(naive_dft(&img)) {
        assert!((z.re - re).abs() < 1e-9 && (z.im - im).abs() < 1e-9);
    }
    let energy: f64 = img.as_slice().iter().map(|v| v * v).sum();
    let spectral: f64 = fast.iter().map(|z| z.norm_sqr()).sum::<f64>() / img.len() as f64;
    assert!((energy - spectral).abs() < 1e-9);
}

#[test]
fn spectral_l1_of_constant_is_half_its_value() {
    for c in [0.25, -0.8] {
        let zeros = Image::zeros(5, 7);
        let k = Image::filled(5, 7, c);
        let got = metrics::spectral_l1(&zeros, &k).unwrap();
        assert!((got - c.abs() / 2.0).abs() < 1e-12);
        assert!((naive_spectral_l1(&zeros, &k) - got).abs() < 1e-12);
    }
}

#[test]
fn spectral_l1_matches_naive_dft() {
    let mut rng = common::rng(25);
    let a = random_image(&mut rng, 8, 8);
    let b = random_image(&mut rng, 8, 8);
    assert!((metrics::spectral_l1(&a, &b).unwrap() - naive_spectral_l1(&a, &b)).abs() <= 1e-6);
}

#[test]
fn identical_images_hit_metric_sentinels() {
    let mut rng = common::rng(26);
    let a = random_image(&mut rng, 20, 20);
    let r = metrics::evaluate(&a, &a, 0).unwrap();
    assert_eq!(r.psnr_db, f64::INFINITY);
    assert_eq!(r.ssim, 1.0);
    assert_eq!(r.gmsd, 0.0);
    assert_eq!(r.spectral_l1, 0.0);
}
