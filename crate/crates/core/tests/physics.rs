use zitterlab::algebra::Complex;
use zitterlab::dynamics::{
    dense_evolve_oracle, evolve_recording, init_gaussian, max_resolving_dt, zb_fit,
    EvolutionConfig, GaussianPacket, Grid1D, SplitStepPropagator,
};
use zitterlab::pairsim::{pair_mode_sum_series, satellite_speed, ModeSumConfig, PotentialSpec};
use zitterlab::planewave::PhysConsts;

fn mix_packet(f_plus: f64) -> GaussianPacket {
    GaussianPacket {
        x0: 0.0,
        p0: 0.0,
        sigma_x: 0.1,
        c_plus: Complex::new(f_plus.sqrt(), 0.0),
        c_minus: Complex::new((1.0 - f_plus).sqrt(), 0.0),
    }
}

fn rest_run(f_plus: f64, k: &PhysConsts) -> zitterlab::dynamics::EvolutionRecord {
    let grid = Grid1D::centered(1024, 2.0).unwrap();
    let mut field = init_gaussian(grid, &mix_packet(f_plus), k).unwrap();
    let cfg = EvolutionConfig {
        dt: max_resolving_dt(k) / 4.0,
        n_steps: 3000,
        potential: PotentialSpec::Zero,
        record_every: 1,
    };
    evolve_recording(&mut field, &cfg, k).unwrap()
}

#[test]
fn strang_error_is_second_order() {
    let k = PhysConsts::atomic();
    let grid = Grid1D::centered(64, 0.15).unwrap();
    let potential = PotentialSpec::TanhStep {
        v0: 0.5 * k.rest_energy(),
        width: 0.01,
    };
    let packet = GaussianPacket {
        x0: -0.01,
        p0: 0.3 * k.c,
        sigma_x: 0.012,
        c_plus: Complex::new(0.8, 0.0),
        c_minus: Complex::new(0.0, 0.6),
    };
    let field = init_gaussian(grid, &packet, &k).unwrap();
    let t = 4e-5;
    let exact = dense_evolve_oracle(&field, t, 1, &potential, &k).unwrap();
    let err = |steps: usize| {
        let prop = SplitStepPropagator::new(grid, t / steps as f64, &potential, &k).unwrap();
        let mut f = field.clone();
        prop.evolve(&mut f, steps, &mut prop.workspace());
        f.max_diff(&exact)
    };
    let (coarse, fine) = (err(20), err(40));
    let order = (coarse / fine).log2();
    assert!(
        (order - 2.0).abs() < 0.2,
        "{coarse:e} {fine:e} order {order}"
    );
}

#[test]
fn zitter_amplitude_tracks_energy_mixing() {
    let k = PhysConsts::atomic();
    let a0 = 0.5 * k.compton_length();
    for f_plus in [0.5, 0.8, 0.95] {
        let rec = rest_run(f_plus, &k);
        let fit = zb_fit(&rec.position, &k).unwrap();
        let want = 2.0 * (f_plus * (1.0 - f_plus)).sqrt() * a0;
        assert!(
            (fit.amplitude / want - 1.0).abs() < 0.1,
            "f+ {f_plus}: {} vs {want}",
            fit.amplitude
        );
        assert!((rec.f_plus.values[0] - f_plus).abs() < 1e-3);
    }
}

#[test]
fn equal_mix_velocity_reaches_but_never_exceeds_c() {
    let k = PhysConsts::atomic();
    let rec = rest_run(0.5, &k);
    let peak = rec
        .velocity
        .values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak >= 0.8 * k.c, "{}", peak / k.c);
    assert!(peak <= k.c * (1.0 + 1e-3), "{}", peak / k.c);
}

#[test]
fn pair_number_grows_and_fronts_stay_subluminal() {
    let k = PhysConsts::atomic();
    let cfg = ModeSumConfig::desk(PotentialSpec::TanhStep {
        v0: 3.0 * k.c * k.c,
        width: 0.1 / k.c,
    });
    let times = [2e-4, 4e-4, 6e-4, 8e-4];
    let runs = pair_mode_sum_series(&cfg, &times, &k).unwrap();
    let numbers: Vec<f64> = runs.iter().map(|d| d.electron_number()).collect();
    assert!(numbers.windows(2).all(|w| w[1] > w[0]), "{numbers:?}");
    for d in &runs {
        assert!((d.electron_number() - d.positron_number()).abs() <= 1e-8);
        assert!(d.rho_e.iter().chain(&d.rho_p).all(|&v| v >= 0.0));
    }
    let speed = satellite_speed(&runs).unwrap();
    assert!(speed <= k.c * 1.05, "{}", speed / k.c);
}
