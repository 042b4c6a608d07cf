use std::f64::consts::{E, TAU};
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use dcesim::config::{parse_config, RunConfig};
use dcesim::table::{read_table, read_table_from, write_table_to, ResultTable};
use dcesim::{run_scenario, Command};
use proptest::prelude::*;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_dcesim");

fn resonant_config(t_end: f64, samples: usize) -> String {
    format!(
        r#"{{
  "profile": {{"kind": "sinusoidal", "L0": {TAU}, "epsilon": {eps}, "Omega": 2.0}},
  "mode": 1,
  "drive": {{"gamma": 1e-5, "zeta": 1e-4}},
  "unruh": {{"a": 3.0, "omega_min": 0.1, "omega_max": 5.0, "omega_count": 25}},
  "scan": {{"Omega_min": 1.9, "Omega_max": 2.1, "points": 5}},
  "numerics": {{"t_end": {t_end}, "sample_count": {samples}}}
}}"#,
        eps = 1e-3 * TAU
    )
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(command: &str, config: &Path, out: &Path, overrides: &[&str]) -> std::process::Output {
    let mut p = Process::new(BIN);
    p.arg(command).arg("--config").arg(config).arg("--out").arg(out);
    for o in overrides {
        p.arg("--override").arg(o);
    }
    p.output().unwrap()
}

#[test]
fn every_command_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.json", &resonant_config(2000.0, 50));
    for command in ["simulate", "casimir", "scan", "unruh", "compare"] {
        let a = dir.path().join(format!("{command}-a.csv"));
        let b = dir.path().join(format!("{command}-b.csv"));
        for out in [&a, &b] {
            let res = run(command, &cfg, out, &[]);
            assert!(res.status.success(), "{command}: {}", String::from_utf8_lossy(&res.stderr));
        }
        let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert!(!ba.is_empty());
        assert_eq!(ba, bb, "{command} output differs between runs");
        let table = read_table(&a).unwrap();
        assert_eq!(table.meta("command"), Some(command));
        assert_eq!(table.meta("config_sha256").map(str::len), Some(64));
    }
}

#[test]
fn scan_output_does_not_depend_on_workers() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.json", &resonant_config(2000.0, 10));
    let mut outputs = Vec::new();
    for workers in [1, 2, 5] {
        let out = dir.path().join(format!("scan-{workers}.csv"));
        let res = run("scan", &cfg, &out, &[&format!("scan.workers={workers}")]);
        assert!(res.status.success());
        outputs.push(read_table(&out).unwrap().rows);
    }
    // The library path with explicit pools.
    let base: RunConfig = parse_config(resonant_config(2000.0, 10).as_bytes()).unwrap();
    for workers in [1, 3, 8] {
        let mut cfg = base.clone();
        cfg.scan.as_mut().unwrap().workers = Some(workers);
        outputs.push(run_scenario(&cfg, Command::Scan).unwrap().rows);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn csv_layout() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.json", &resonant_config(100.0, 4));
    let out = dir.path().join("sim.csv");
    assert!(run("simulate", &cfg, &out, &[]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.split("\r\n").collect();
    assert_eq!(lines.last(), Some(&""));
    assert!(!text.replace("\r\n", "").contains('\n'));
    let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert!(header >= 4);
    assert_eq!(
        lines[header],
        "t,re_alpha,im_alpha,re_beta,im_beta,abs_beta_sq,invariant_drift"
    );
    assert_eq!(lines.len() - header - 2, 4);
    for field in lines[header + 1].split(',') {
        let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
    }
}

#[test]
fn thousand_sample_simulation() {
    let cfg: RunConfig = parse_config(
        br#"{"profile": {"kind": "sinusoidal", "L0": 1, "epsilon": 0.001, "Omega": 2},
            "mode": 1, "numerics": {"t_end": 100, "tol": 1e-10, "sample_count": 1000}}"#,
    )
    .unwrap();
    let table = run_scenario(&cfg, Command::Simulate).unwrap();
    let mut buf = Vec::new();
    write_table_to(&table, &mut buf).unwrap();
    let back = read_table_from(buf.as_slice()).unwrap();
    assert_eq!(back.rows.len(), 1000);
    assert_eq!(back, table);
    let t = back.column("t").unwrap();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn constant_profile_creates_nothing() {
    let cfg: RunConfig = parse_config(
        br#"{"profile": {"kind": "constant", "L0": 2}, "mode": 2,
            "numerics": {"t_end": 50, "sample_count": 20}}"#,
    )
    .unwrap();
    let table = run_scenario(&cfg, Command::Simulate).unwrap();
    assert!(table.column("abs_beta_sq").unwrap().iter().all(|&n| n == 0.0));
}

#[test]
fn casimir_ode_tracks_ideal_growth() {
    let eps = 1e-3;
    let nu0 = eps * 0.5 * dcesim_core::casimir::bessel_j(0, eps);
    let t_end = 3.0 / nu0;
    let mut cfg: RunConfig = parse_config(resonant_config(t_end, 61).as_bytes()).unwrap();
    cfg.drive.gamma = 0.0;
    let table = run_scenario(&cfg, Command::Casimir).unwrap();
    let t = table.column("t").unwrap();
    let ode = table.column("N_ode").unwrap();
    let ideal = table.column("N_ideal").unwrap();
    for i in 0..t.len() {
        let x = nu0 * t[i];
        if (0.1..=3.0).contains(&x) {
            let ratio = ode[i] / ideal[i];
            assert!((0.95..=1.05).contains(&ratio), "ν0t = {x}: ratio {ratio}");
        }
    }
    let sat = table.column("N_saturated").unwrap();
    assert!(sat.iter().zip(&ideal).all(|(s, i)| *s <= i * (1.0 + 1e-8)));
}

#[test]
fn compare_row_at_threshold_has_unit_ratio() {
    // L0 = 4mε; sample exactly at the threshold time t*.
    let eps_rel = 0.25;
    let l0 = 1.0;
    let eps = eps_rel * l0;
    let nu0 = eps_rel * 0.5 * TAU * dcesim_core::casimir::bessel_j(0, eps_rel);
    let t_star = (1.0 / (E - 1.0)).sqrt().asinh() / nu0;
    let text = format!(
        r#"{{"profile": {{"kind": "sinusoidal", "L0": {l0}, "epsilon": {eps}, "Omega": {omega}}},
            "mode": 1, "numerics": {{"t_end": {t_end}, "sample_count": 3}}}}"#,
        omega = 2.0 * TAU,
        t_end = 2.0 * t_star
    );
    let cfg = parse_config(text.as_bytes()).unwrap();
    let table = run_scenario(&cfg, Command::Compare).unwrap();
    assert_eq!(table.rows.len(), 2, "t = 0 has no photons and is skipped");
    let r = table.column("R").unwrap();
    assert!((r[0] - 1.0).abs() <= 1e-9, "{}", r[0]);
    let n_c = table.column("N_c").unwrap();
    assert!((n_c[0] - 1.0 / (E - 1.0)).abs() <= 1e-12);
    assert!(table.meta("threshold_quoted_flag").unwrap().starts_with("INCONSISTENT"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write_config(&dir, "good.json", &resonant_config(10.0, 3));
    let out = dir.path().join("out.csv");

    let typo = write_config(&dir, "typo.json", &resonant_config(10.0, 3).replace("\"epsilon\"", "\"epsilonn\""));
    let res = run("simulate", &typo, &out, &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("epsilonn"));

    let res = run("simulate", &good, &out, &["profile.epsilon=100"]);
    assert_eq!(res.status.code(), Some(2));

    let res = run("simulate", &dir.path().join("missing.json"), &out, &[]);
    assert_eq!(res.status.code(), Some(4));

    let res = run("simulate", &good, &dir.path().join("no/such/dir/out.csv"), &[]);
    assert_eq!(res.status.code(), Some(4));

    // A step budget too small for the run is a numerical failure.
    let res = run("simulate", &good, &out, &["numerics.tol=1e-300"]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));

    let res = run("scan", &good, &out, &["scan=null"]);
    assert_eq!(res.status.code(), Some(2));

    let res = run("simulate", &good, &out, &["drive.gamma=0.5"]);
    assert_eq!(res.status.code(), Some(0));
    let table = read_table(&out).unwrap();
    assert_eq!(table.rows.len(), 3);
}

fn table_strategy() -> impl Strategy<Value = ResultTable> {
    (1usize..5, 0usize..20).prop_flat_map(|(cols, rows)| {
        prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, cols), rows).prop_map(
            move |data| {
                let mut t = ResultTable::new((0..cols).map(|i| format!("c{i}")));
                t.push_meta("origin", "proptest");
                for r in data {
                    t.push_row(r);
                }
                t
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_round_trip_is_exact(table in table_strategy()) {
        let mut buf = Vec::new();
        write_table_to(&table, &mut buf).unwrap();
        let back = read_table_from(buf.as_slice()).unwrap();
        prop_assert_eq!(back.rows.len(), table.rows.len());
        for (a, b) in back.rows.iter().zip(&table.rows) {
            for (x, y) in a.iter().zip(b) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        prop_assert_eq!(back.columns, table.columns);
    }

    #[test]
    fn canonical_config_round_trips(
        l0 in 0.1f64..10.0,
        depth in 0.0f64..0.9,
        omega in 0.01f64..10.0,
        gamma in 0.0f64..1.0,
        zeta in 0.0f64..1.0,
        v_c in 0.01f64..100.0,
        tol in 1e-14f64..1e-3,
        samples in 2usize..5000,
        si in any::<bool>(),
    ) {
        let text = format!(
            r#"{{"profile": {{"kind": "sinusoidal", "L0": {l0}, "epsilon": {eps}, "Omega": {omega}}},
                "mode": 3, "drive": {{"gamma": {gamma}, "zeta": {zeta}}}, "unruh": {{"V_c": {v_c}}},
                "numerics": {{"t_end": 10, "tol": {tol}, "sample_count": {samples}}},
                "units": "{units}"}}"#,
            eps = depth * l0,
            units = if si { "SI" } else { "internal" }
        );
        let cfg = parse_config(text.as_bytes()).unwrap();
        let again = parse_config(cfg.to_canonical_json().as_bytes()).unwrap();
        prop_assert_eq!(&cfg, &again);
        prop_assert_eq!(cfg.to_canonical_json(), again.to_canonical_json());
    }
}
