use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xylem::wood::{preset, WoodParams};
use xylem_render::raster::luminance;
use xylem_render::*;

fn plain(params: WoodParams) -> WoodParams {
    let mut p = params.without_noise();
    p.pores.density = 1e-12;
    p.rays.density = 1e-12;
    p
}

fn small(cut: Cut, size: u32) -> SlabScene {
    SlabScene { cut, resolution: [size, size], ..SlabScene::default() }
}

#[test]
fn straight_rings_on_a_noiseless_radial_cut() {
    let scene = small(Cut::Radial { distance: 40.0 }, 48);
    let img = render_slab(&scene, &plain(preset("mahogany").unwrap())).unwrap();
    for i in 0..img.width {
        let top = img.get(i, 0);
        assert!((0..img.height).all(|j| img.get(i, j) == top), "column {i} varies");
    }
    let lum: Vec<f64> = (0..img.width).map(|i| luminance(img.get(i, 0))).collect();
    let spread = lum.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lum.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread > 0.01, "rings should show across the radius");
}

#[test]
fn renders_repeat_exactly() {
    let scene = small(Cut::default(), 40);
    let params = preset("curly_maple").unwrap();
    let a = render_slab(&scene, &params).unwrap().png_bytes().unwrap();
    let b = render_slab(&scene, &params).unwrap().png_bytes().unwrap();
    assert_eq!(a, b);
}

#[test]
fn worker_count_and_pixel_order_do_not_matter() {
    let scene = small(Cut::Radial { distance: 30.0 }, 32);
    let slab = Slab::new(&scene, &preset("red_oak").unwrap()).unwrap();
    let one = slab.render(Some(1)).unwrap();
    let three = slab.render(Some(3)).unwrap();
    assert_eq!(one, three);
    let mut order: Vec<(usize, usize)> = (0..32).flat_map(|j| (0..32).map(move |i| (i, j))).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    for (i, j) in order.into_iter().take(200) {
        assert_eq!(slab.render_pixel(i, j), one.get(i, j), "pixel ({i}, {j})");
    }
}

#[test]
fn pfm_layout() {
    let mut img = LinearImage::new(2, 3);
    img.pixels[0] = [1.0, 2.0, 3.0];
    let bytes = img.pfm_bytes();
    let header = b"PF\n2 3\n-1.0\n";
    assert_eq!(&bytes[..header.len()], header);
    assert_eq!(bytes.len(), header.len() + 2 * 3 * 12);
    // The top-left pixel is stored in the last row.
    let last_row = header.len() + 2 * 2 * 12;
    assert_eq!(&bytes[last_row..last_row + 4], &1.0f32.to_le_bytes());
}

#[test]
fn draft_quality_caps_size_and_bands() {
    let scene = SlabScene { resolution: [1024, 512], ..SlabScene::default() };
    let params = preset("mahogany").unwrap();
    let (s, p) = Quality::Draft.apply(&scene, &params);
    assert_eq!(s.resolution, [256, 128]);
    assert!(p.distortion.axes().iter().all(|(_, a)| a.noise.bands <= 2));
    let (s, p) = Quality::Full.apply(&scene, &params);
    assert_eq!((s, p), (scene, params));
}

#[test]
fn invalid_inputs_are_reported() {
    let mut params = preset("mahogany").unwrap();
    params.highlight_width.min = 0.0;
    let err = render_slab(&SlabScene::default(), &params).unwrap_err();
    assert!(matches!(&err, RenderError::Invalid(e) if e.iter().any(|f| f.path == "highlight_width")));

    let scene = SlabScene { resolution: [0, 8], ..SlabScene::default() };
    let err = render_slab(&scene, &preset("mahogany").unwrap()).unwrap_err();
    assert!(matches!(&err, RenderError::Degenerate(e) if e[0].path == "scene.resolution"));

    let skew = Cut::Plane { origin: [0.0; 3], u: [1.0, 0.0, 0.0], v: [0.6, 0.8, 0.0] };
    let err = render_slab(&small(skew, 8), &preset("mahogany").unwrap()).unwrap_err();
    assert!(matches!(err, RenderError::Degenerate(_)));
}

#[test]
fn sweep_frames() {
    let spec = SweepSpec::default();
    let e = spec.elevations();
    assert_eq!((e.len(), e[0], e[63]), (64, 10.0, 170.0));
    assert_eq!(SweepSpec { frames: 1, arc: [30.0, 90.0] }.elevations(), vec![30.0]);
    assert_eq!(frame_name(7, 64), "frame_007.png");
    assert_eq!(frame_name(12, 2000), "frame_0012.png");
    assert_eq!(frame_name(999, 1000), "frame_999.png");
}

#[test]
fn single_frame_sweep_is_a_render() {
    let scene = small(Cut::default(), 24);
    let params = preset("padauk").unwrap();
    let slab = Slab::new(&scene, &params).unwrap();
    let frames = slab.sweep(&SweepSpec { frames: 1, arc: [scene.light.elevation, 0.0] }, None).unwrap();
    assert_eq!(frames, vec![slab.render(None).unwrap()]);
}

#[test]
fn sweep_luminance_has_no_pops() {
    let scene = small(Cut::Radial { distance: 40.0 }, 48);
    let slab = Slab::new(&scene, &preset("yellowheart").unwrap()).unwrap();
    let frames = slab.sweep(&SweepSpec::default(), None).unwrap();
    let mean: Vec<f64> = frames.iter().map(LinearImage::mean_luminance).collect();
    let range = mean.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - mean.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst = mean.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(range > 0.0);
    assert!(worst < 0.1 * range, "largest step {worst} against range {range}");
    let again: Vec<f64> = slab.sweep(&SweepSpec::default(), Some(2)).unwrap().iter().map(LinearImage::mean_luminance).collect();
    assert_eq!(mean, again);
}

/// Spearman rank correlation.
fn rank_correlation(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&x, &y| v[x].total_cmp(&v[y]));
        let mut r = vec![0.0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let m = (n - 1.0) / 2.0;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - m) * (y - m)).sum();
    let var: f64 = ra.iter().map(|x| (x - m) * (x - m)).sum();
    cov / var
}

#[test]
fn ribbon_stripes_peak_at_different_light_angles() {
    // A quarter-sawn face: columns run along the radius, rows along the grain.
    let mut params = preset("yellowheart").unwrap();
    params.pores.density = 1e-12;
    let scene = SlabScene { cut: Cut::Radial { distance: 40.0 }, resolution: [160, 16], ..SlabScene::default() };
    let slab = Slab::new(&scene, &params).unwrap();
    let spec = SweepSpec { frames: 161, arc: [10.0, 170.0] };
    let frames = slab.sweep(&spec, None).unwrap();
    let elevations = spec.elevations();
    let (mut phi, mut peak) = (Vec::new(), Vec::new());
    for i in 0..scene.width() {
        let column = |f: &LinearImage| (0..f.height).map(|j| luminance(f.get(i, j))).sum::<f64>();
        let best = (0..frames.len()).max_by(|&a, &b| column(&frames[a]).total_cmp(&column(&frames[b]))).unwrap();
        let r = scene.surface_coords(i as i64, 0)[0] + 40.0;
        let angle = slab.model().interlock_angle(r);
        // Steeper grain sends the highlight outside the swept arc.
        if angle.abs() > 0.05 && angle.abs() < 0.4 {
            phi.push(angle);
            peak.push(elevations[best]);
        }
    }
    assert!(phi.iter().any(|&a| a > 0.0) && phi.iter().any(|&a| a < 0.0), "preset should cross a stripe boundary");
    let rho = rank_correlation(&phi, &peak);
    assert!(rho < -0.95, "peak elevation should fall as the grain tilts toward the light, rho = {rho}");
}
