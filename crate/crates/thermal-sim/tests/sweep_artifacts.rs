//! Sweep artifacts and CLI behavior: CSV exactness and reproducibility,
//! preset coverage of every operation, and the binary's contract (flags,
//! config files, exit codes).

use std::path::Path;
use std::process::Command;

use thermal_sim::network::ProtocolParams;
use thermal_sim::oplog;
use thermal_sim::sweep::{
    evaluate_sweep, preset_sweeps, read_csv, render_sweep_csv, resolve, run, run_sweep, Cell,
    GridSpec, Overrides, ResolvedRun, RunMode, SweepSpec, SweptParam, PRESET_NAMES,
};

fn small_spec(name: &str, mode: RunMode) -> SweepSpec {
    SweepSpec {
        name: name.into(),
        grids: vec![GridSpec {
            param: SweptParam::Eta1,
            values: vec![0.1, 0.4, 0.7, 1.0],
        }],
        base: ProtocolParams::thermal_from_occupancy(1309.0),
        mode,
        samples: 4_000,
        seed: 99,
        jobs: Some(2),
    }
}

#[test]
fn csv_cells_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec("roundtrip", RunMode::Both);
    let rows = evaluate_sweep(&spec).unwrap();
    let artifacts = run_sweep(&spec, dir.path()).unwrap();
    let (header, parsed) = read_csv(&artifacts.csv_path).unwrap();
    assert_eq!(header.len(), 15); // 1 swept + 6 analytic + 8 sampled
    assert_eq!(parsed.len(), rows.len());
    for (row, cells) in rows.iter().zip(&parsed) {
        let a = row.analytic.as_ref().unwrap();
        let s = row.sampled.as_ref().unwrap();
        let expect = [
            row.swept[0],
            a.i_ab,
            a.i_ab_given_e,
            a.discord_b_given_a,
            f64::NAN, // discord_quadrature (text)
            f64::NAN, // physical (text)
            f64::NAN, // verdict (text)
            s.cmi,
            s.cmi_se,
            s.g2_a.value,
            s.g2_a.std_error,
            s.g2_b.value,
            s.g2_b.std_error,
            s.g2_ab.value,
            s.g2_ab.std_error,
        ];
        for (k, &want) in expect.iter().enumerate() {
            if want.is_nan() {
                assert!(matches!(cells[k], Cell::Text(_)));
            } else {
                let got = cells[k].as_f64().expect("numeric cell");
                assert_eq!(got.to_bits(), want.to_bits(), "column {k} not exact");
            }
        }
    }
}

#[test]
fn rendered_csv_is_deterministic() {
    let spec = small_spec("determinism", RunMode::Both);
    let a = render_sweep_csv(&spec, &evaluate_sweep(&spec).unwrap());
    let b = render_sweep_csv(&spec, &evaluate_sweep(&spec).unwrap());
    assert_eq!(a, b);
    assert!(a.ends_with('\n'));
    assert!(!a.contains("\r\n"), "LF line endings only");
}

/// Every public operation must be exercised by running all presets.
#[test]
fn presets_touch_every_operation() {
    let dir = tempfile::tempdir().unwrap();
    oplog::reset();
    for name in PRESET_NAMES {
        let mut flags = Overrides::default();
        flags.set("preset", name).unwrap();
        flags.set("samples", "200").unwrap();
        flags.set("jobs", "4").unwrap();
        flags.out = Some(dir.path().join(name));
        let resolved = resolve(None, flags, None).unwrap();
        run(&resolved).unwrap();
    }
    let ops = [
        "gaussian.make_thermal",
        "gaussian.bose_einstein_nbar",
        "gaussian.direct_sum",
        "gaussian.beamsplitter",
        "gaussian.apply",
        "gaussian.reduce",
        "gaussian.symplectic_eigenvalues",
        "gaussian.von_neumann_entropy",
        "gaussian.check_physical",
        "network.channel_env_variance",
        "network.build_network",
        "network.post_splitter_cov",
        "network.channel_output_cov",
        "secrecy.mutual_information",
        "secrecy.conditional_mutual_information",
        "secrecy.conditional_cov_homodyne",
        "secrecy.discord",
        "secrecy.secrecy_verdict",
        "empirical.sample_quadratures",
        "empirical.slice_bits",
        "empirical.shannon_entropy",
        "empirical.empirical_cmi",
        "empirical.g2_auto",
        "empirical.g2_cross",
        "sweep.run",
        "sweep.parse_config",
    ];
    let counts = oplog::counts();
    for op in ops {
        assert!(
            counts.get(op).copied().unwrap_or(0) > 0,
            "operation {op} not touched by the presets; counts: {counts:?}"
        );
    }
}

#[test]
fn discord_preset_is_positive_everywhere() {
    // `sweep --preset fig-discord`: 50-row CSVs with positive discord for
    // every Eve variance series
    let dir = tempfile::tempdir().unwrap();
    let mut flags = Overrides::default();
    flags.set("preset", "fig-discord").unwrap();
    flags.out = Some(dir.path().to_path_buf());
    let resolved = resolve(None, flags, None).unwrap();
    let artifacts = run(&resolved).unwrap();
    assert_eq!(artifacts.len(), 3);
    for a in &artifacts {
        let (header, rows) = read_csv(&a.csv_path).unwrap();
        assert_eq!(rows.len(), 50);
        let col = header.iter().position(|h| h == "discord_b_given_a").unwrap();
        for row in &rows {
            assert!(row[col].as_f64().unwrap() > 0.0);
        }
    }
}

// ---------------------------------------------------------------------------
// binary-level checks
// ---------------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermal-sim"))
}

#[test]
fn photon_number_subcommand_prints_the_anchor() {
    let out = bin()
        .args(["photon-number", "--omega", "3e10", "--temp", "300"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: f64 = text.trim().parse().unwrap();
    assert!((value - 1308.7).abs() < 0.1, "printed {text}");
}

#[test]
fn photon_number_rejects_nonpositive_inputs() {
    let out = bin()
        .args(["photon-number", "--omega", "0", "--temp", "300"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "domain error is a numerical failure");
}

#[test]
fn sweep_runs_are_byte_identical(){
    let dir = tempfile::tempdir().unwrap();
    let run_once = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let status = bin()
            .args([
                "sweep",
                "--mode",
                "both",
                "--samples",
                "2000",
                "--seed",
                "31337",
                "--jobs",
                "2",
            ])
            .arg("--out")
            .arg(&out_dir)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out_dir.join("sweep-eta1.csv")).unwrap()
    };
    assert_eq!(run_once("a"), run_once("b"));
}

#[test]
fn coherent_preset_cmi_is_flat() {
    // `sweep --preset fig-coherent`: the analytic CMI column is constant
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["sweep", "--preset", "fig-coherent", "--samples", "1000"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = read_csv(&dir.path().join("fig-coherent.csv")).unwrap();
    let col = header.iter().position(|h| h == "i_ab_given_e").unwrap();
    let values: Vec<f64> = rows.iter().map(|r| r[col].as_f64().unwrap()).collect();
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-9, "coherent CMI varies by {spread:.3e}");
    // plot script artifact exists alongside
    assert!(dir.path().join("fig-coherent.gp").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "ve = 1\nseed = 4\nmode = analytic\n").unwrap();
    let status = bin()
        .args(["sweep", "--ve", "250"])
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep-eta1.csv")).unwrap();
    assert!(
        text.contains("# v_e = 2.5000000000000000e2"),
        "flag must override file"
    );
    assert!(text.contains("# seed = 4"), "file seed applies");
}

#[test]
fn env_seed_is_honored_as_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["sweep", "--mode", "analytic"])
        .arg("--out")
        .arg(dir.path())
        .env("THERMAL_SIM_SEED", "777")
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("sweep-eta1.csv")).unwrap();
    assert!(text.contains("# seed = 777"));
}

#[test]
fn configuration_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // unknown config key
    let cfg = dir.path().join("bad.conf");
    std::fs::write(&cfg, "etaX = 0.3\n").unwrap();
    let out = bin().arg("sweep").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("valid keys"), "stderr: {err}");

    // out-of-range flag value
    let out = bin().args(["sweep", "--eta1", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing config file
    let out = bin()
        .args(["sweep", "--config", "/nonexistent/path.conf"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // invalid environment seed
    let out = bin()
        .arg("sweep")
        .env("THERMAL_SIM_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown preset
    let out = bin().args(["sweep", "--preset", "fig-nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_subcommand_emits_verdict_and_row() {
    let out = bin()
        .args(["report", "--eta1", "0.9", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict         = secret"), "{text}");
    // machine-readable row after the header line
    let header_line = text
        .lines()
        .find(|l| l.starts_with("eta1,"))
        .expect("csv header");
    assert!(header_line.contains("discord_b_given_a"));
    let row_line = text.lines().last().unwrap();
    assert!(row_line.contains("secret"));
}

#[test]
fn g2_subcommand_reports_thermal_signature() {
    let out = bin()
        .args(["g2", "--eta1", "1", "--samples", "20000", "--seed", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("g2_auto(a)"));
    assert!(text.contains("g2_cross(a,b)"));
    assert!(text.contains("thermal signature (g2_auto(a) > 1): yes"), "{text}");
}

#[test]
fn plot_scripts_reference_their_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec("plots", RunMode::Analytic);
    let resolved = ResolvedRun {
        sweeps: vec![spec.clone()],
        out_dir: dir.path().to_path_buf(),
        base: spec.base.clone(),
        mode: spec.mode,
        samples: spec.samples,
        seed: spec.seed,
    };
    let artifacts = run(&resolved).unwrap();
    let gp = std::fs::read_to_string(&artifacts[0].plot_path).unwrap();
    assert!(gp.contains("plots.csv"));
    assert!(gp.contains("set datafile separator ','"));
    assert!(Path::new(&artifacts[0].csv_path).exists());
}
