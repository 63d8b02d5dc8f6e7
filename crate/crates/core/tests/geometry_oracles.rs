mod common;

use common::max_gradient;
use lapjitter::geometry::{self, BoundaryPolicy, Displacement, FlowField};
use lapjitter::jitter::{self, Direction};
use lapjitter::sensor::{self, GammaConfig};
use lapjitter::{scene, DegradationConfig, Image, SamplingGrid, SinusoidComponent, SinusoidSet};
use rand::Rng;

#[test]
fn plane_is_reproduced_under_fractional_constant_flow() {
    let mut rng = common::rng(3);
    for _ in 0..100 {
        let (a, b, c) = (
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let img = Image::from_fn(24, 32, |r, k| a * r as f64 + b * k as f64 + c);
        let d = Displacement::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let flow = FlowField::constant(24, 32, d);
        let out = geometry::grid_sample(&img, &flow, BoundaryPolicy::ZeroFill).unwrap();
        for r in 4..20 {
            for k in 4..28 {
                let expected = a * (r as f64 + d.cross_track) + b * (k as f64 + d.along_track) + c;
                assert!((out.get(r, k) - expected).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn grid_sample_matches_scalar_bilinear_loop() {
    let mut rng = common::rng(4);
    let img = common::random_image(&mut rng, 9, 11);
    let flow = FlowField::from_fn(9, 11, |_, _| {
        Displacement::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
    });
    let out = geometry::grid_sample(&img, &flow, BoundaryPolicy::ClampEdge).unwrap();
    let px = |r: f64, c: f64| img.get(r.clamp(0.0, 8.0) as usize, c.clamp(0.0, 10.0) as usize);
    for r in 0..9 {
        for c in 0..11 {
            let d = flow.get(r, c);
            let (y, x) = (r as f64 + d.cross_track, c as f64 + d.along_track);
            let (y0, x0) = (y.floor(), x.floor());
            let (fy, fx) = (y - y0, x - x0);
            let expected = (1.0 - fy) * ((1.0 - fx) * px(y0, x0) + fx * px(y0, x0 + 1.0))
                + fy * ((1.0 - fx) * px(y0 + 1.0, x0) + fx * px(y0 + 1.0, x0 + 1.0));
            assert!((out.get(r, c) - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn jitter_map_rows_are_identical_for_dataset_curves() {
    let cfg = DegradationConfig::default();
    let grid = SamplingGrid::new(640, cfg.tau_s, 6).unwrap();
    let roll = jitter::cdsm_average(&cfg.roll_sinusoids, Direction::Roll, &grid).unwrap();
    let pitch = jitter::cdsm_average(&cfg.pitch_sinusoids, Direction::Pitch, &grid).unwrap();
    let map = geometry::build_jitter_map(&roll, &pitch, 480).unwrap();
    for r in 0..480 {
        for c in 0..640 {
            assert_eq!(
                map.get(r, c),
                Displacement::new(roll.samples[c], pitch.samples[c])
            );
        }
    }
}

#[test]
fn noisy_map_negation_elementwise() {
    let mut rng = common::rng(5);
    let map = FlowField::from_fn(6, 7, |_, _| {
        Displacement::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0))
    });
    let flow = geometry::flow_from_noisy_map(&map);
    for r in 0..6 {
        for c in 0..7 {
            assert_eq!(flow.get(r, c).cross_track, -map.get(r, c).cross_track);
            assert_eq!(flow.get(r, c).along_track, -map.get(r, c).along_track);
        }
    }
}

#[test]
fn flow_l1_matches_brute_force() {
    let mut rng = common::rng(6);
    let mut field = || {
        FlowField::from_fn(4, 4, |_, _| {
            Displacement::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    };
    let (a, b) = (field(), field());
    let mut expected = 0.0;
    for r in 0..4 {
        for c in 0..4 {
            expected += (a.get(r, c).cross_track - b.get(r, c).cross_track).abs()
                + (a.get(r, c).along_track - b.get(r, c).along_track).abs();
        }
    }
    let got = geometry::flow_l1_distance(&a, &b).unwrap();
    // mean over the 2·4·4 components
    assert!((got - expected / 32.0).abs() < 1e-12);
}

fn maps_for(set: &SinusoidSet, m: usize, h: usize, w: usize) -> Vec<FlowField> {
    let grid = SamplingGrid::new(w, 3.54e-5, m).unwrap();
    let zero = jitter::JitterCurve::zeros(Direction::Pitch, w);
    jitter::subdivision_curves(set, Direction::Roll, &grid)
        .iter()
        .map(|roll| geometry::build_jitter_map(roll, &zero, h).unwrap())
        .collect()
}

#[test]
fn six_subdivisions_blur_a_step_edge_more_than_one() {
    // horizontal edge moved cross-track by a fast roll sinusoid
    let (h, w) = (64, 96);
    let step = Image::from_fn(h, w, |r, _| if r < h / 2 { 0.1 } else { 0.9 });
    let set = SinusoidSet::new(vec![SinusoidComponent::new(4.0, 4000.0, 0.5).unwrap()]);
    let one = geometry::deform_multi_subdivision(
        &step,
        &maps_for(&set, 1, h, w),
        BoundaryPolicy::ClampEdge,
    )
    .unwrap();
    let six = geometry::deform_multi_subdivision(
        &step,
        &maps_for(&set, 6, h, w),
        BoundaryPolicy::ClampEdge,
    )
    .unwrap();
    assert!(
        max_gradient(&six) < max_gradient(&one),
        "{} vs {}",
        max_gradient(&six),
        max_gradient(&one)
    );
}

#[test]
fn warping_roughly_preserves_energy_domain_brightness() {
    let cfg = DegradationConfig::default();
    for seed in 0..4 {
        let clean = scene::aerial_scene(480, 640, seed);
        let energy = sensor::inverse_gamma(&clean, &GammaConfig::default()).unwrap();
        let grid = cfg.grid(640).unwrap();
        let curves =
            lapjitter::pipeline::ideal_curves(&cfg.roll_sinusoids, &cfg.pitch_sinusoids, &grid);
        let maps = lapjitter::pipeline::maps_from_curves(&curves, 480).unwrap();
        let deformed =
            geometry::deform_multi_subdivision(&energy, &maps, BoundaryPolicy::ClampEdge).unwrap();
        let rel = (deformed.mean() / energy.mean() - 1.0).abs();
        assert!(rel < 0.02, "seed {seed}: {rel}");
    }
}
