use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use bwdelay_core::config::{GAMMA_OMEGA, PULSE_P1, PULSE_P2};
use bwdelay_core::kinematics::LightConeMomentum;
use bwdelay_core::{
    normalize_amplitude, solve_partner, sweep_delay, DoublePulseConfig, GammaProbe, GridSpec, MomentumGrid, QuadConfig,
    PulseTable, Simulator,
};

fn single_amplitude(c: &mut Criterion) {
    let gamma = GammaProbe::new(GAMMA_OMEGA);
    let quad = QuadConfig::default();
    let pair = solve_partner(&LightConeMomentum::lepton_spherical(0.4, 1.1, 0.3), &gamma).unwrap();
    let mut group = c.benchmark_group("pulse_amplitude");
    for (name, cfg) in [("xi0.1", PULSE_P1), ("xi0.6", PULSE_P2)] {
        let field = normalize_amplitude(&cfg.spec()).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| bwdelay_core::amplitude::PulseAmplitude::evaluate(black_box(&pair), &field, &gamma, &quad))
        });
    }
    group.finish();
}

fn small_grid(c: &mut Criterion) {
    let gamma = GammaProbe::new(GAMMA_OMEGA);
    // Coarsest grid the validator accepts.
    let spec = GridSpec::for_max_xi(PULSE_P1.xi).scaled(0.5);
    let grid = MomentumGrid::new(spec, gamma).unwrap();
    let quad = QuadConfig::default();
    let mut group = c.benchmark_group("grid");
    group.sample_size(10);
    group.bench_function("pulse_table", |b| {
        b.iter(|| PulseTable::build(black_box(&PULSE_P1.spec()), &grid, &quad).unwrap())
    });

    let sim = Simulator::new(spec, gamma, quad).unwrap();
    let config = DoublePulseConfig {
        first: PULSE_P1.spec(),
        second: PULSE_P1.spec(),
        gap: 0.0,
        gamma,
    };
    sim.pulse(&config.first).unwrap();
    let delays: Vec<f64> = (0..151).map(|i| i as f64 * 0.1).collect();
    group.bench_function("cached_sweep_151", |b| {
        b.iter(|| sweep_delay(&config, black_box(&delays), &sim).unwrap())
    });
    group.finish();
}

criterion_group!(benches, single_amplitude, small_grid);
criterion_main!(benches);
