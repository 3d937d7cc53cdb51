use rvm_core::history::{Frame, RunHistory};
use rvm_core::maxwell::*;
use rvm_core::phase::{Mode, Particle, ParticleEnsemble};
use rvm_core::quad;
use rvm_core::CoreError;
use std::f64::consts::{PI, TAU};

fn grid(n: usize) -> Grid {
    Grid::new([n, n], [TAU, TAU]).unwrap()
}

fn fill(g: &Grid, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; g.size()];
    for i2 in 0..g.n[1] {
        for i1 in 0..g.n[0] {
            out[g.idx(i1, i2)] = f(g.node(i1, i2));
        }
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn plane_wave(g: &Grid, k: [f64; 2], t: f64) -> FieldState {
    // B3 = cos(k.x - w t), E = (-k2, k1) cos(k.x - w t) / w
    let w = k[0].hypot(k[1]);
    let mut f = FieldState::zeros(Mode::TwoD, *g);
    f.time = t;
    f.b[2] = fill(g, |x| (k[0] * x[0] + k[1] * x[1] - w * t).cos());
    f.e[0] = fill(g, |x| -k[1] / w * (k[0] * x[0] + k[1] * x[1] - w * t).cos());
    f.e[1] = fill(g, |x| k[0] / w * (k[0] * x[0] + k[1] * x[1] - w * t).cos());
    f
}

fn smooth_25d(g: &Grid) -> FieldState {
    // B in-plane from a stream function, so div B = 0
    let mut f = FieldState::zeros(Mode::TwoHalfD, *g);
    f.e[0] = fill(g, |x| 0.3 * (x[1]).sin() + 0.1 * (2.0 * x[0] - x[1]).cos());
    f.e[1] = fill(g, |x| -0.2 * (x[0] + x[1]).cos());
    f.e[2] = fill(g, |x| 0.4 * (x[0] - 2.0 * x[1]).sin());
    f.b[0] = fill(g, |x| 0.5 * (x[1]).cos() * (2.0 * x[0]).sin());
    f.b[1] = fill(g, |x| -1.0 * (x[1]).sin() * (2.0 * x[0]).cos());
    f.b[2] = fill(g, |x| 0.25 + 0.3 * (x[0] + 3.0 * x[1]).cos());
    f
}

#[test]
fn zero_state_stays_zero() {
    let g = grid(16);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let f = FieldState::zeros(Mode::TwoHalfD, g);
    let out = s.step(&f, &SourceDensities::zeros(g), 0.1).unwrap();
    assert!(out.e.iter().chain(out.b.iter()).all(|a| a.iter().all(|&v| v == 0.0)));
    assert_eq!(s.constraint_residual(&out, &vec![0.0; g.size()]).unwrap(), (0.0, 0.0));
}

#[test]
fn cfl_violation_is_rejected_before_stepping() {
    let g = grid(16);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let f = FieldState::zeros(Mode::TwoD, g);
    let err = s.step(&f, &SourceDensities::zeros(g), 2.0 * s.dt_limit()).unwrap_err();
    assert!(matches!(err, CoreError::Cfl { .. }));
}

#[test]
fn plane_wave_after_one_period() {
    let g = grid(32);
    let k: [f64; 2] = [2.0, 1.0];
    let period = TAU / k[0].hypot(k[1]);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let steps = (period / s.dt_limit()).ceil() as usize;
    let dt = period / steps as f64;
    let mut f = plane_wave(&g, k, 0.0);
    let src = SourceDensities::zeros(g);
    for _ in 0..steps {
        f = s.step(&f, &src, dt).unwrap();
    }
    let exact = plane_wave(&g, k, 0.0);
    let err = [max_diff(&f.e[0], &exact.e[0]), max_diff(&f.e[1], &exact.e[1]), max_diff(&f.b[2], &exact.b[2])];
    assert!(err.iter().all(|&e| e < 1e-6), "{err:?}");
    assert!((f.time - period).abs() < 1e-12);
}

#[test]
fn plane_wave_matches_dispersion_at_intermediate_time() {
    let g = grid(24);
    let k = [1.0, -3.0];
    let mut f = plane_wave(&g, k, 0.0);
    let src = SourceDensities::zeros(g);
    for _ in 0..7 {
        f = step_maxwell(&f, &src, 0.13).unwrap();
    }
    let exact = plane_wave(&g, k, 7.0 * 0.13);
    assert!(max_diff(&f.b[2], &exact.b[2]) < 1e-12);
    assert!(max_diff(&f.e[0], &exact.e[0]) < 1e-12);
}

#[test]
fn poisson_field_satisfies_gauss_law() {
    let g = grid(32);
    let rho = fill(&g, |x| 0.7 * (x[0]).cos() + 0.2 * (2.0 * x[0] + x[1]).sin() + 0.05 * (3.0 * x[1]).cos());
    let [e1, e2] = poisson_field(g, &rho).unwrap();
    let mut f = FieldState::zeros(Mode::TwoD, g);
    f.e = [e1, e2, vec![0.0; g.size()]];
    let (r, rb) = constraint_residual(&f, &rho).unwrap();
    assert!(r < 1e-12, "{r}");
    assert_eq!(rb, 0.0);
    // closed form for the first mode: E1 = 0.7 sin x1
    let want = fill(&g, |x| 0.7 * x[0].sin());
    let sp = Spectral::new(g);
    let single = fill(&g, |x| 0.7 * x[0].cos());
    let e = MaxwellSolver::new(g, DEFAULT_CFL).poisson_field(&single).unwrap();
    assert!(max_diff(&e[0], &want) < 1e-13);
    assert!(max_diff(&sp.derivative(&e[0], 0), &single) < 1e-12);
}

#[test]
fn static_charge_is_stationary() {
    let g = grid(32);
    let rho = fill(&g, |x| (-(x[0] - PI).powi(2) - (x[1] - PI).powi(2)).exp());
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let [e1, e2] = s.poisson_field(&rho).unwrap();
    let mut f = FieldState::zeros(Mode::TwoD, g);
    f.e = [e1, e2, vec![0.0; g.size()]];
    let e0 = f.clone();
    let src = SourceDensities { grid: g, rho: rho.clone(), j: [vec![0.0; g.size()], vec![0.0; g.size()], vec![0.0; g.size()]] };
    let steps = 50;
    for _ in 0..steps {
        f = s.step(&f, &src, s.dt_limit()).unwrap();
    }
    let drift = max_diff(&f.e[0], &e0.e[0]).max(max_diff(&f.e[1], &e0.e[1])).max(max_diff(&f.b[2], &e0.b[2]));
    assert!(drift / (steps as f64) < 1e-10, "{drift}");
    let (r, _) = s.constraint_residual(&f, &rho).unwrap();
    assert!(r < 1e-10);
}

#[test]
fn source_free_energy_drift() {
    let g = grid(32);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let mut f = smooth_25d(&g);
    let e0 = field_energy(&f);
    let src = SourceDensities::zeros(g);
    for _ in 0..1000 {
        f = s.step(&f, &src, s.dt_limit()).unwrap();
    }
    let rel = (field_energy(&f) - e0).abs() / e0;
    assert!(rel < 1e-8, "{rel}");
    let (_, rb) = s.constraint_residual(&f, &vec![0.0; g.size()]).unwrap();
    assert!(rb < 1e-10, "{rb}");
}

#[test]
fn planar_div_b_is_exactly_zero() {
    let g = grid(16);
    let f = plane_wave(&g, [1.0, 1.0], 0.3);
    assert_eq!(constraint_residual(&f, &vec![0.0; g.size()]).unwrap().1, 0.0);
}

#[test]
fn uniform_current_drains_mean_field() {
    let g = grid(8);
    let mut src = SourceDensities::zeros(g);
    src.j[0] = vec![0.5; g.size()];
    let f = step_maxwell(&FieldState::zeros(Mode::TwoD, g), &src, 0.2).unwrap();
    assert!(f.e[0].iter().all(|v| (v + 0.1).abs() < 1e-15));
}

#[test]
fn driven_mode_matches_exact_solution() {
    // j3 = cos(x1) constant in time, zero data: E3 = -sin(t) cos(x1), B2 = (1 - cos t) sin(x1)
    let g = grid(16);
    let mut src = SourceDensities::zeros(g);
    src.j[2] = fill(&g, |x| x[0].cos());
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let mut f = FieldState::zeros(Mode::TwoHalfD, g);
    let dt = 0.1;
    for _ in 0..20 {
        f = s.step(&f, &src, dt).unwrap();
    }
    let t: f64 = 2.0;
    assert!(max_diff(&f.e[2], &fill(&g, |x| -t.sin() * x[0].cos())) < 1e-12);
    assert!(max_diff(&f.b[1], &fill(&g, |x| (1.0 - t.cos()) * x[0].sin())) < 1e-12);
}

#[test]
fn energy_examples() {
    let g = Grid::new([8, 8], [1.0, 1.0]).unwrap();
    let f = FieldState::zeros(Mode::TwoD, g);
    let empty = ParticleEnsemble::empty(Mode::TwoD, [1.0, 1.0]);
    assert_eq!(energy(&f, &empty).unwrap(), 0.0);
    let mut e = f.clone();
    e.e[0] = vec![1.0; g.size()];
    assert!((energy(&e, &empty).unwrap() - 0.5).abs() < 1e-15);
    let one = ParticleEnsemble::new(Mode::TwoD, [1.0, 1.0], vec![Particle { x: [0.5, 0.5], p: [0.0; 3], w: 1.0 }]).unwrap();
    assert!((energy(&f, &one).unwrap() - 4.0 * PI).abs() < 1e-15);
    let mixed = ParticleEnsemble::empty(Mode::TwoHalfD, [1.0, 1.0]);
    assert!(matches!(energy(&f, &mixed), Err(CoreError::Mode(_))));
}

#[test]
fn gauge_zero_field_is_zero() {
    let g = grid(16);
    let a = gauge_a3(&FieldState::zeros(Mode::TwoHalfD, g)).unwrap();
    assert!(a.a3.iter().all(|&v| v == 0.0));
    assert!(matches!(gauge_a3(&FieldState::zeros(Mode::TwoD, g)), Err(CoreError::Unsupported(_))));
}

#[test]
fn gauge_recovers_stream_function() {
    let g = grid(32);
    let phi = |x: [f64; 2]| 0.4 * (x[0] + 2.0 * x[1]).sin() + 0.3 * (3.0 * x[0]).cos() * x[1].sin() + 1.7;
    // B1 = d2 phi, B2 = -d1 phi
    let mut f = FieldState::zeros(Mode::TwoHalfD, g);
    f.b[0] = fill(&g, |x| 0.8 * (x[0] + 2.0 * x[1]).cos() + 0.3 * (3.0 * x[0]).cos() * x[1].cos());
    f.b[1] = fill(&g, |x| -(0.4 * (x[0] + 2.0 * x[1]).cos() - 0.9 * (3.0 * x[0]).sin() * x[1].sin()));
    let a = gauge_a3(&f).unwrap().zero_mean();
    let want = fill(&g, phi);
    let mean = want.iter().sum::<f64>() / want.len() as f64;
    let want: Vec<f64> = want.iter().map(|v| v - mean).collect();
    assert!(max_diff(&a, &want) < 1e-12);
}

#[test]
fn gauge_is_frozen_without_e3() {
    let g = grid(16);
    let mut f = smooth_25d(&g);
    f.e = [vec![0.0; g.size()], vec![0.0; g.size()], vec![0.0; g.size()]];
    let a0 = gauge_a3(&f).unwrap();
    let zero = vec![0.0; g.size()];
    let mut a = a0.clone();
    for _ in 0..100 {
        a = evolve_a3(&a, &zero, &zero, 0.05).unwrap();
    }
    assert!(max_diff(&a.a3, &a0.a3) < 1e-12);
}

#[test]
fn gauge_evolution_tracks_elliptic_solve() {
    let g = grid(32);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let mut f = smooth_25d(&g);
    let mut a = gauge_a3(&f).unwrap();
    let src = SourceDensities::zeros(g);
    let dt = 0.5 * s.dt_limit();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let next = s.step(&f, &src, dt).unwrap();
        a = evolve_a3(&a, &f.e[2], &next.e[2], dt).unwrap();
        f = next;
        let b = gauge_a3(&f).unwrap();
        worst = worst.max(max_diff(&a.zero_mean(), &b.zero_mean()));
    }
    assert!(worst < 5e-3, "{worst}");
}

#[test]
fn snapshot_round_trip() {
    let g = Grid::new([8, 6], [2.0, 3.0]).unwrap();
    for f in [plane_wave(&g, [PI, 2.0 * PI / 3.0], 0.25), {
        let mut f = FieldState::zeros(Mode::TwoHalfD, g);
        f.e[2] = fill(&g, |x| x[0] - 2.0 * x[1]);
        f.b[1] = fill(&g, |x| x[0] * x[1]);
        f.time = 1.5;
        f
    }] {
        let mut buf = Vec::new();
        write_fields(&f, &mut buf).unwrap();
        let comps = if f.mode == Mode::TwoD { 3 } else { 6 };
        assert_eq!(buf.len(), 4 + 4 + 1 + 8 + 40 + 4 + comps * (1 + 8 * g.size()));
        assert_eq!(&buf[..4], FIELD_MAGIC);
        let back = read_fields(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }
}

#[test]
fn snapshot_rejects_garbage() {
    assert!(matches!(read_fields(&b"XXXX"[..]), Err(CoreError::Format(_))));
    let g = Grid::new([4, 4], [1.0, 1.0]).unwrap();
    let mut buf = Vec::new();
    write_fields(&FieldState::zeros(Mode::TwoD, g), &mut buf).unwrap();
    buf.pop();
    assert!(read_fields(buf.as_slice()).is_err());
}

fn static_history(g: Grid, field: &FieldState, frames: usize, dt: f64, particles: Vec<Particle>) -> RunHistory {
    let frames = (0..frames)
        .map(|k| {
            let mut f = field.clone();
            f.time = k as f64 * dt;
            Frame { time: k as f64 * dt, fields: f, particles: particles.clone() }
        })
        .collect();
    RunHistory::new(field.mode, g, dt, frames).unwrap()
}

#[test]
fn flux_density_identities() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let e: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let b: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-3.0..3.0));
        let th: f64 = rng.gen_range(0.0..TAU);
        let w = [th.cos(), th.sin()];
        let ecb = [e[1] * b[2] - e[2] * b[1], e[2] * b[0] - e[0] * b[2], e[0] * b[1] - e[1] * b[0]];
        let lhs = 0.5 * (e.iter().map(|v| v * v).sum::<f64>() + b.iter().map(|v| v * v).sum::<f64>()) + w[0] * ecb[0] + w[1] * ecb[1];
        let scale = 1.0 + lhs.abs();
        assert!((cone_flux_density(e, b, w) - lhs).abs() < 1e-12 * scale);
        // planar ansatz: 1/2 (|E.w|^2 + |B3 + w^E|^2)
        let (ep, bp) = ([e[0], e[1], 0.0], [0.0, 0.0, b[2]]);
        let planar = 0.5 * ((ep[0] * w[0] + ep[1] * w[1]).powi(2) + (bp[2] + w[0] * ep[1] - w[1] * ep[0]).powi(2));
        assert!((cone_flux_density(ep, bp, w) - planar).abs() < 1e-12 * (1.0 + planar));
    }
}

#[test]
fn zero_history_has_zero_flux() {
    let g = grid(8);
    let h = static_history(g, &FieldState::zeros(Mode::TwoD, g), 5, 0.1, vec![]);
    let r = null_cone_flux(&h, 0.4, [1.0, 2.0], &ConeFluxQuadrature::default()).unwrap();
    assert_eq!((r.flux_kg, r.particle_cone_term), (0.0, 0.0));
}

#[test]
fn flux_requires_stored_vertex_time() {
    let g = grid(8);
    let h = static_history(g, &FieldState::zeros(Mode::TwoD, g), 5, 0.1, vec![]);
    let q = ConeFluxQuadrature::default();
    assert!(matches!(null_cone_flux(&h, 0.9, [0.0, 0.0], &q), Err(CoreError::History(_))));
    assert!(matches!(null_cone_flux(&h, 0.25, [0.0, 0.0], &q), Err(CoreError::History(_))));
    let mut gap = h.clone();
    gap.frames.remove(2);
    assert!(null_cone_flux(&gap, 0.3, [0.0, 0.0], &q).is_err());
}

#[test]
fn static_radial_field_flux_matches_adaptive_quadrature() {
    // E = -grad phi for a Gaussian bump centred at the vertex, B = 0
    let g = grid(64);
    let c = [PI, PI];
    let phi_grad = |x: [f64; 2]| {
        let d = [x[0] - c[0], x[1] - c[1]];
        let e = (-(d[0] * d[0] + d[1] * d[1])).exp();
        [2.0 * d[0] * e, 2.0 * d[1] * e]
    };
    let mut f = FieldState::zeros(Mode::TwoD, g);
    f.e[0] = fill(&g, |x| phi_grad(x)[0]);
    f.e[1] = fill(&g, |x| phi_grad(x)[1]);
    let (dt, frames) = (0.05, 25);
    let t = dt * (frames - 1) as f64;
    let h = static_history(g, &f, frames, dt, vec![]);
    let r = null_cone_flux(&h, t, c, &ConeFluxQuadrature { n_theta: 128, n_radius: 32 }).unwrap();
    // radial field: E.w = |E|, w^E = 0, so the density is |E|^2 / 2 and only depends on tau
    let oracle = quad::integrate(
        |s| {
            let tau = t - s;
            let e = phi_grad([c[0] + tau, c[1]])[0];
            TAU * tau * 0.5 * e * e
        },
        0.0,
        t,
        1e-14,
        1e-12,
    )
    .unwrap();
    assert!((r.flux_kg - oracle).abs() < 1e-5 * oracle, "{} vs {oracle}", r.flux_kg);
    assert_eq!(r.particle_cone_term, 0.0);
}

#[test]
fn particle_cone_term_for_resting_particles() {
    // uniform cold density n at rest: cone term = 4 pi n int_0^t 2 pi tau ds = 4 pi^2 n t^2
    let g = grid(16);
    let h = g.h();
    let mut ps = Vec::new();
    for i2 in 0..16 {
        for i1 in 0..16 {
            ps.push(Particle { x: [i1 as f64 * h[0], i2 as f64 * h[1]], p: [0.0; 3], w: h[0] * h[1] * 0.3 });
        }
    }
    let (dt, frames) = (0.1, 11);
    let hist = static_history(g, &FieldState::zeros(Mode::TwoD, g), frames, dt, ps);
    let r = null_cone_flux(&hist, 1.0, [0.3, 0.7], &ConeFluxQuadrature::default()).unwrap();
    let want = 4.0 * PI * PI * 0.3;
    assert!((r.particle_cone_term - want).abs() < 1e-10 * want, "{}", r.particle_cone_term);
}

#[test]
fn source_free_flux_equals_base_disk_energy() {
    let g = grid(32);
    let s = MaxwellSolver::new(g, DEFAULT_CFL);
    let mut f = smooth_25d(&g);
    let dt = 0.0125;
    let src = SourceDensities::zeros(g);
    let mut frames = Vec::new();
    for k in 0..=120 {
        frames.push(Frame { time: k as f64 * dt, fields: f.clone(), particles: vec![] });
        f = s.step(&f, &src, dt).unwrap();
    }
    let h = RunHistory::new(Mode::TwoHalfD, g, dt, frames).unwrap();
    let q = ConeFluxQuadrature { n_theta: 96, n_radius: 40 };
    for (t, x) in [(0.5, [1.0, 2.0]), (1.5, [4.0, 0.5])] {
        let r = null_cone_flux(&h, t, x, &q).unwrap();
        let base = base_disk_energy(&h, t, x, &q).unwrap();
        assert!(r.flux_kg >= 0.0);
        assert!((r.total - base).abs() < 1e-6 * base, "t={t}: {} vs {base}", r.total);
    }
}
