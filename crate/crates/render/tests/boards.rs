use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xylem::grid::CellHashSeed;
use xylem::linalg::Vec3;
use xylem::wood::preset;
use xylem::WoodModel;
use xylem_render::board::{board_origin, BoardId};
use xylem_render::*;

fn pattern(kind: BoardKind, rotation: f64) -> BoardPattern {
    BoardPattern { kind, board: [50.0, 5.0], rotation, region: Region { min: [30.0, -20.0, -300.0], max: [80.0, 20.0, 300.0] } }
}

fn surface_point(rng: &mut impl Rng) -> [f64; 2] {
    [rng.gen_range(-80.0..80.0), rng.gen_range(-80.0..80.0)]
}

#[test]
fn designated_corner_maps_to_the_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let seed = CellHashSeed(9);
    for kind in [BoardKind::Parallel, BoardKind::NestedSquare] {
        let p = pattern(kind, 0.3);
        for _ in 0..2000 {
            let q = surface_point(&mut rng);
            let b = board_map(&p, q, seed);
            let (a, c) = (b.along, [-b.along[1], b.along[0]]);
            // Approach the corner from inside the board, off the mitre diagonal.
            let s = [0, 1].map(|k| q[k] - a[k] * (b.offset[0] - 2e-7) - c[k] * (b.offset[1] - 1e-7));
            let at = board_map(&p, s, seed);
            assert_eq!(at.id, b.id, "{kind:?}");
            assert!((at.tree - board_origin(&p, b.id, seed)).norm() < 1e-6);
        }
    }
}

#[test]
fn boards_are_rigid_and_tangential() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let seed = CellHashSeed(3);
    for kind in [BoardKind::Parallel, BoardKind::NestedSquare] {
        let p = pattern(kind, -0.7);
        for _ in 0..2000 {
            let s = surface_point(&mut rng);
            let b = board_map(&p, s, seed);
            assert!(b.frame.orthonormality_error() < 1e-12 && b.frame.determinant() > 0.0);
            assert!((b.frame.col(2) - Vec3::x_axis()).norm() < 1e-12, "board faces stay tangential");
            assert!((0.0..50.0).contains(&b.offset[0]) && b.offset[1] >= 0.0 && b.offset[1] <= 5.0, "{kind:?} {:?}", b.offset);
            let t = [s[0] + rng.gen_range(-0.5..0.5), s[1] + rng.gen_range(-0.5..0.5)];
            let other = board_map(&p, t, seed);
            if other.id == b.id {
                let expected = b.frame.mul_vec(Vec3::new(t[0] - s[0], t[1] - s[1], 0.0));
                assert!((other.tree - b.tree - expected).norm() < 1e-9);
            }
        }
    }
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn neighbouring_board_origins_are_uncorrelated() {
    let seed = CellHashSeed(17);
    for kind in [BoardKind::Parallel, BoardKind::NestedSquare] {
        let p = pattern(kind, 0.0);
        let pairs: Vec<(BoardId, BoardId)> = (0..10_000)
            .flat_map(|k: i64| {
                let id = BoardId { band: k / 100, side: k % 4, slot: k % 100 };
                [(id, BoardId { slot: id.slot + 1, ..id }), (id, BoardId { band: id.band + 1, ..id })]
            })
            .collect();
        for axis in 0..3 {
            let first: Vec<f64> = pairs.iter().map(|(a, _)| board_origin(&p, *a, seed)[axis]).collect();
            let second: Vec<f64> = pairs.iter().map(|(_, b)| board_origin(&p, *b, seed)[axis]).collect();
            let r = correlation(&first, &second);
            assert!(r.abs() < 0.05, "{kind:?} axis {axis}: r = {r}");
        }
        let inside = pairs.iter().all(|(a, _)| {
            let o = board_origin(&p, *a, seed);
            (0..3).all(|k| o[k] >= p.region.min[k] && o[k] <= p.region.max[k])
        });
        assert!(inside);
    }
}

#[test]
fn nested_squares_run_around_the_center() {
    let p = pattern(BoardKind::NestedSquare, 0.0);
    let seed = CellHashSeed(0);
    let side = |s: [f64; 2]| board_map(&p, s, seed);
    assert_eq!(side([12.0, 1.0]).along, [0.0, 1.0]);
    assert_eq!(side([1.0, 12.0]).along, [-1.0, 0.0]);
    assert_eq!(side([-12.0, 1.0]).along, [0.0, -1.0]);
    assert_eq!(side([1.0, -12.0]).along, [1.0, 0.0]);
    assert_eq!(side([12.0, 1.0]).id.band, 2);
    assert_eq!(side([2.0, 1.0]).id.band, 0);
}

#[test]
fn pattern_validation() {
    let mut errors = Vec::new();
    let mut p = pattern(BoardKind::Parallel, 0.0);
    p.board[1] = 0.0;
    p.region.min[2] = 1e9;
    p.validate("scene.boards", &mut errors);
    let paths: Vec<&str> = errors.iter().map(|e| e.path.as_str()).collect();
    assert_eq!(paths, ["scene.boards.board", "scene.boards.region"]);
}

/// Mean ring-value variance along scan lines `origin + a·t + b·k`.
fn scan_variance(model: &WoodModel, map: impl Fn([f64; 2]) -> Vec3<f64>) -> f64 {
    let lines = 16;
    let samples = 200;
    let mut total = 0.0;
    for k in 0..lines {
        let across = 30.0 * (k as f64 + 0.5) / lines as f64;
        let g: Vec<f64> = (0..samples).map(|t| model.ring_at(map([30.0 * t as f64 / samples as f64, across]))).collect();
        let mean = g.iter().sum::<f64>() / samples as f64;
        total += g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / samples as f64;
    }
    total / lines as f64
}

struct CubeStats {
    transverse: f64,
    radial: f64,
    tangential: f64,
    veneer: [f64; 3],
}

fn cube_stats(model: &WoodModel) -> CubeStats {
    let corner = Vec3::new(45.0, -15.0, -15.0);
    let at = |x: f64, y: f64, z: f64| corner + Vec3::new(x, y, z);
    let veneer = std::array::from_fn(|face| {
        let origin = [60.0, 0.0, 100.0 * face as f64];
        let p = BoardPattern { kind: BoardKind::Parallel, board: [1e3, 1e3], rotation: 0.0, region: Region { min: origin, max: origin } };
        scan_variance(model, |s| board_map(&p, s, CellHashSeed(face as u64)).tree)
    });
    // A solid block shows the tree where each face lies.
    CubeStats {
        transverse: scan_variance(model, |s| at(s[0], s[1], 30.0)),
        radial: scan_variance(model, |s| at(s[0], 30.0, s[1])),
        tangential: scan_variance(model, |s| at(30.0, s[1], s[0])),
        veneer,
    }
}

#[test]
fn carved_cube_differs_from_veneered_cube() {
    let mut sums = [0.0; 3];
    for name in xylem::wood::PRESET_NAMES {
        let full = WoodModel::new(&preset(name).unwrap()).unwrap();
        let straight = full.clone().with_distortion(xylem::distortion::Distortion::identity());
        let s = cube_stats(&straight);
        assert!(s.transverse > 0.1 && s.radial > 0.1, "{name}: rings must cross the end and quarter faces");
        // Zero up to the rounding of the mean.
        assert!(s.tangential < 1e-20, "{name}");
        assert!(s.veneer.iter().all(|v| *v < 1e-20), "{name}");

        let s = cube_stats(&full);
        sums[0] += s.transverse.min(s.radial);
        sums[1] += s.tangential;
        sums[2] += s.veneer.iter().cloned().fold(0.0, f64::max);
    }
    // Distortion lets rings wander along the grain, but they still cross the end grain far more often.
    assert!(sums[0] > 2.0 * sums[1], "{sums:?}");
    assert!(sums[0] > 2.0 * sums[2], "{sums:?}");
}
