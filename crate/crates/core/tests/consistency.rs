use d2d_mimo::metrics::log_grid_db;
use d2d_mimo::montecarlo::{empirical_coverage, simulate, SimConfig, UserType};
use d2d_mimo::sweep::{run_sweep, LoadedConfig, Mode, RowMode, SweepGrid, SweepOptions};
use d2d_mimo::SystemParams;

fn coverage(p: &SystemParams, sim: &SimConfig, user_type: UserType) -> Vec<(f64, f64)> {
    let batch = simulate(p, sim, user_type).unwrap();
    empirical_coverage(&batch, &log_grid_db(-10.0, 20.0, 7))
        .unwrap()
        .into_iter()
        .map(|e| (e.p_hat, e.std_err))
        .collect()
}

#[test]
fn larger_window_changes_little() {
    let p = SystemParams { t_c: 8, lambda_d: 1e-5, ..Default::default() };
    for user_type in [UserType::D2d, UserType::Cellular] {
        let base = SimConfig { trials: 40_000, ..Default::default() };
        let wide = SimConfig { window_factor: 10.0, master_seed: 7, ..base.clone() };
        for ((a, sa), (b, sb)) in coverage(&p, &base, user_type).into_iter().zip(coverage(&p, &wide, user_type)) {
            let tol = 4.0 * (sa * sa + sb * sb).sqrt() + 0.003;
            assert!((a - b).abs() <= tol, "{user_type}: {a} vs {b}");
        }
    }
}

#[test]
fn sweep_modes_agree_on_asr() {
    let config = LoadedConfig {
        sim: SimConfig { trials: 40_000, ..Default::default() },
        grid: SweepGrid { tc_values: vec![4, 16], lambda_values: vec![1e-6, 1e-5], mode: Mode::Both },
        ..Default::default()
    };
    let rows = run_sweep(&config, SweepOptions::default(), |_| {}).unwrap();
    assert_eq!(rows.len(), 8);
    for pair in rows.chunks(2) {
        let (a, m) = (&pair[0], &pair[1]);
        assert_eq!((a.mode, m.mode), (RowMode::Analytic, RowMode::Mc));
        assert_eq!((a.tc, a.lambda_d), (m.tc, m.lambda_d));
        assert_eq!(a.total_power, m.total_power);
        let rel = (a.asr - m.asr).abs() / a.asr;
        assert!(rel < 0.03, "t_c={} λ={}: analytic {} vs mc {}", a.tc, a.lambda_d, a.asr, m.asr);
        assert!(m.asr_stderr.unwrap() > 0.0 && a.asr_stderr.is_none());
    }
}
