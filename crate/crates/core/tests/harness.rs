use std::fs;
use std::path::Path;

use czlab::grid::{norm, superlevel_measure, GridSpec, Norm};
use czlab::harness::*;
use czlab::microlocal::DirectionNet;
use czlab::CzError;

fn small_config() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(
        r#"
seed = 7
claims = ["net-cardinality", "chebyshev"]

[grid]
d = 2
n = 32

[a_field]
kind = "random-signs"
seed = 3
block = 1

[input]
family = "multi-scale"
count = 3
min_level = 1
max_level = 2
seed = 5

[claim.net-cardinality]
n_values = [4, 5, 6]
d_values = [2]
"#,
    )
    .unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        for entry in fs::read_dir(&p).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "timing.json" {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn identical_configs_give_identical_outputs() {
    let cfg = small_config();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let sa = run_config(&cfg, a.path()).unwrap();
    let sb = run_config(&cfg, b.path()).unwrap();
    assert_eq!(sa.config_hash, sb.config_hash);
    assert!(sa.all_pass(), "{:?}", sa.verdicts);
    let fa = files(a.path());
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    for want in ["decomposition.json", "operator.json", "summary.csv", "reports/chebyshev.json", "weak_type.json"] {
        assert!(names.contains(&want), "missing {want} in {names:?}");
    }
    assert!(a.path().join("timing.json").exists());
    assert_eq!(fa, files(b.path()));
}

#[test]
fn reports_carry_the_config_hash() {
    let cfg = small_config();
    let rep = verify_claim("net-cardinality", &cfg).unwrap();
    assert_eq!(rep.config_hash, cfg.hash());
    let json: serde_json::Value = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    assert_eq!(json["claim_id"], "net-cardinality");
    assert!(json["extrapolation_note"].as_str().unwrap().contains("extrapolated"));
}

#[test]
fn net_rows_recompute_from_their_params() {
    let rep = verify_claim("net-cardinality", &small_config()).unwrap();
    let rows = &rep.groups[0].rows;
    assert_eq!(rows.len(), 3);
    for row in rows {
        let n = row.params["n"].as_u64().unwrap() as u32;
        let d = row.params["d"].as_u64().unwrap() as usize;
        let gamma = row.params["gamma"].as_f64().unwrap();
        let net = DirectionNet::build(n, gamma, d).unwrap();
        assert_eq!(row.lhs, net.len() as f64);
        assert_eq!(row.rhs, 2f64.powf(n as f64 * gamma * (d - 1) as f64));
    }
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let cases = [
        ("[grid]\nd = 4\nn = 32\n", "grid.d"),
        ("[grid]\nd = 2\nn = 48\n", "grid.n"),
        ("gamma = 1.5\n", "gamma"),
        ("[input]\nfamily = \"spikes\"\ncount = \"many\"\n", "input"),
        ("claims = [\"chebyshev\", \"nope\"]\n", "claims[1]"),
        ("[claim.chebyshev]\ngrid_n = -1\n", "claim"),
    ];
    for (text, want) in cases {
        fs::write(&path, text).unwrap();
        match ExperimentConfig::load(&path) {
            Err(CzError::Config { path, .. }) => assert!(path.starts_with(want), "{text:?}: got path {path}"),
            other => panic!("{text:?}: expected a config error, got {other:?}"),
        }
    }
    assert!(matches!(ExperimentConfig::load(&dir.path().join("absent.toml")), Err(CzError::Io { .. })));
}

#[test]
fn spike_half_peak_measure_is_one_cell() {
    let spec = GridSpec::new(2, 32, 8.0).unwrap();
    let f = generate_input(&InputFamily::Spikes { count: 1, seed: 9 }, &spec).unwrap().f;
    assert!((norm(&f, Norm::L1) - 1.0).abs() < 1e-12);
    let peak = norm(&f, Norm::Linf);
    assert_eq!(superlevel_measure(&f, peak / 2.0).unwrap(), spec.cell_measure());
}

#[test]
fn planted_cubes_are_recovered() {
    let spec = GridSpec::unit_cells(2, 64).unwrap();
    for seed in 0..5 {
        let fam = InputFamily::MultiScale { count: 4, min_level: 1, max_level: 3, seed };
        let gen = generate_input(&fam, &spec).unwrap();
        let dec = czlab::czd::cz_decompose(&gen.f, gen.lambda_hint.unwrap(), 2).unwrap();
        let mut found: Vec<_> = dec.atoms.iter().map(|a| a.cube).collect();
        let mut want = gen.planted.clone();
        found.sort();
        want.sort();
        assert_eq!(found, want, "seed {seed}");
    }
}

#[test]
fn lambda_grid_spans_three_decades() {
    let g = lambda_grid(5.0, 3, 40).unwrap();
    assert_eq!(g.len(), 121);
    assert!((g.iter().cloned().fold(f64::MIN, f64::max) - 5.0).abs() < 1e-12);
    assert!((g.iter().cloned().fold(f64::MAX, f64::min) - 5e-3).abs() < 1e-15);
}

#[test]
fn every_registered_claim_has_a_description() {
    let ids = registered_ids();
    assert_eq!(ids.len(), registry().len());
    assert!(registry().iter().all(|c| !c.description.is_empty()));
    for want in ["tube-majorization", "weak-type-stability", "kjn-l1-error", "tjn-gap", "low-pass-atom"] {
        assert!(ids.contains(&want));
    }
}
