use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL: &str = "[model]\nn_max = 3\n[integrator]\nt_final = 2.0\n";

#[test]
fn energy_run_writes_csv() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "e.cfg", SMALL);
    let out = tmp.path().join("out");
    let o = sim(&["energy", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("energy.csv")).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows[0], "t,pe1,pe2,photons,total_excitation");
    assert_eq!(rows.len(), 1 + 41);
    assert!(rows[1].starts_with("0,1,0,0,"));
    assert!(text.contains("# steady_converged = true"));
    let pe2: f64 = text.lines().find_map(|l| l.strip_prefix("# steady_pe2 = ")).unwrap().parse().unwrap();
    assert!(pe2 > 0.99);
}

#[test]
fn identical_configs_give_identical_files() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "s.cfg", "[model]\nn_max = 2\n[sweep]\naxis = \"g\"\nvalues = [0.5, 1.0, 2.0]\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(sim(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap(), "--workers", "1"]).status.code(), Some(0));
    assert_eq!(sim(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3"]).status.code(), Some(0));
    let fa = fs::read(a.join("sweep_summary.csv")).unwrap();
    let fb = fs::read(b.join("sweep_summary.csv")).unwrap();
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa).unwrap();
    assert_eq!(data_rows(&text)[0], "sweep_value,steady_value,t_half,t_reached,residual,converged");
}

#[test]
fn print_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "e.cfg", SMALL);
    let first = sim(&["energy", "--config", &cfg, "--print-config"]);
    assert_eq!(first.status.code(), Some(0));
    let printed = String::from_utf8(first.stdout).unwrap();
    assert!(printed.contains("horizon = "));
    let again = write(tmp.path(), "resolved.cfg", &printed);
    let second = sim(&["energy", "--config", &again, "--print-config"]);
    assert_eq!(String::from_utf8(second.stdout).unwrap(), printed);
}

#[test]
fn config_errors_exit_64() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        ("axis.cfg", "[sweep]\naxis = \"temperature\"\nvalues = [1.0]\n", "sweep"),
        ("typo.cfg", "[model]\nkapa = 3.0\n", "energy"),
        (
            "norm.cfg",
            "[model]\ndetunings = [15.0, 0.0, 15.0, 0.0]\ncouplings = [2.0, 1.0, 2.0, 1.0]\n[initial]\nalpha = [1.0, 0.0]\nbeta = [1.0, 0.0]\n",
            "state",
        ),
        ("qubits.cfg", "", "state"),
    ];
    for (name, text, cmd) in cases {
        let cfg = write(tmp.path(), name, text);
        let o = sim(&[cmd, "--config", &cfg]);
        assert_eq!(o.status.code(), Some(64), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(sim(&["energy", "--config", "/nonexistent/x.cfg"]).status.code(), Some(64));
    assert_eq!(sim(&["teleport"]).status.code(), Some(64));
    assert_eq!(sim(&["sweep", "--workers", "0"]).status.code(), Some(64));
    assert_eq!(sim(&["--help"]).status.code(), Some(0));
}

#[test]
fn validate_passes_and_flags_broken_hamiltonian() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let good = write(tmp.path(), "v.cfg", "[model]\nn_max = 3\n[validate]\ngrid = 4\n");
    let o = sim(&["validate", "--config", &good, "--out", out]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("PASS selection_rule_m34"));
    assert!(!stdout.contains("FAIL"));

    let bad = write(tmp.path(), "b.cfg", "[model]\nn_max = 2\n[validate]\ngrid = 2\nbroken_hamiltonian = true\n");
    let o = sim(&["validate", "--config", &bad, "--out", out]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout.contains("FAIL hamiltonian_hermitian"));
    assert!(stdout.contains("not Hermitian"));
}

#[test]
fn state_and_eigen_runs() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    let cfg = write(
        tmp.path(),
        "q.cfg",
        "[model]\ndetunings = [15.0, 0.0, 15.0, 0.0]\ncouplings = [2.0, 1.0, 2.0, 1.0]\nn_max = 2\n[integrator]\nt_final = 1.0\n[output]\nname = \"bell\"\n",
    );
    assert_eq!(sim(&["state", "--config", &cfg, "--out", out]).status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("bell.csv")).unwrap();
    let header = data_rows(&text)[0];
    assert!(header.starts_with("t,infidelity,pair13_p00,pair13_p11,pair13_coh_re,pair13_coh_im,pair24_p00"));
    let first: Vec<f64> = data_rows(&text)[1].split(',').map(|x| x.parse().unwrap()).collect();
    let expected = [0.0, 1.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    assert!(first.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-12), "{first:?}");

    assert_eq!(sim(&["eigen", "--out", out]).status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("eigen.csv")).unwrap();
    assert!(text.contains("# m34 = 0"));
    assert_eq!(data_rows(&text).len(), 5);
}

#[test]
fn presets_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    for name in ["fig2a", "fig2b", "fig2c", "fig3"] {
        let path = dir.join(format!("{name}.cfg"));
        let o = sim(&["sweep", "--config", path.to_str().unwrap(), "--print-config"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
