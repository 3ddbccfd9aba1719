//! The `decompose -> apply pieces -> verify claims` pipeline.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::claims::verify_claim;
use super::config::ExperimentConfig;
use super::inputs::generate_input;
use super::weak::{lambda_grid, weak_type_profile, DECADES, POINTS_PER_DECADE};
use crate::commutator::{apply_t, apply_tj, CommutatorParams};
use crate::czd::{cz_decompose, exceptional_set, group_by_level};
use crate::error::{CzError, Result};
use crate::grid::io::write_slice_csv;
use crate::grid::{norm, Norm};

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub out_dir: PathBuf,
    pub config_hash: String,
    pub verdicts: Vec<(String, bool)>,
}

impl ExperimentSummary {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.1)
    }
}

#[derive(Serialize)]
struct PieceRow {
    level: u32,
    j: i32,
    b_l1: f64,
    tjb_l1: f64,
}

#[derive(Serialize)]
struct OperatorReport {
    config_hash: String,
    lambda: f64,
    exceptional_measure: f64,
    f_l1: f64,
    tf_l1: f64,
    tf_linf: f64,
    weak_type_ratio: f64,
    weak_type_argmax: f64,
    pieces: Vec<PieceRow>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| CzError::io(path, e))?))
}

fn write_file(path: &Path, contents: String) -> Result<()> {
    fs::write(path, contents).map_err(|e| CzError::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CzError::io(path, e))
}

fn write_slice(f: &crate::grid::GridFunction, path: &Path) -> Result<()> {
    write_slice_csv(f, 0, 0, create(path)?).map_err(|e| CzError::io(path, e))
}

/// Runs the pipeline for a loaded configuration. Every file except
/// `timing.json` is a deterministic function of the configuration.
pub fn run_config(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    let started = Instant::now();
    mkdir(out_dir)?;
    let spec = cfg.grid_spec()?;
    let hash = cfg.hash();
    let mut timing = serde_json::Map::new();

    let gen = generate_input(&cfg.input, &spec)?;
    let f = gen.f;
    let lambda = cfg.lambda.or(gen.lambda_hint).unwrap_or(4.0 * norm(&f, Norm::L1) / spec.volume());
    let dec = cz_decompose(&f, lambda, cfg.dilate)?;
    dec.write_certificate(create(&out_dir.join("decomposition.json"))?)?;
    timing.insert("decompose_s".into(), started.elapsed().as_secs_f64().into());

    let a = cfg.a_field.sample(&spec)?;
    let op = CommutatorParams::new(cfg.kernel_spec()?, a, cfg.m_s, cfg.r)?.with_mollify(cfg.mollify);
    let tf = apply_t(&op, &f)?;
    write_slice(&tf, &out_dir.join("tf_slice_axis0.csv"))?;
    write_slice(&f, &out_dir.join("f_slice_axis0.csv"))?;
    let top = norm(&tf, Norm::Linf);
    let profile = if top > 0.0 {
        Some(weak_type_profile(&tf, norm(&f, Norm::L1), &lambda_grid(top, DECADES, POINTS_PER_DECADE)?)?)
    } else {
        None
    };
    let mut pieces = Vec::new();
    for level in dec.levels() {
        let b = group_by_level(&dec, level);
        let tjb = apply_tj(&op, &b, cfg.j)?;
        pieces.push(PieceRow { level, j: cfg.j, b_l1: norm(&b, Norm::L1), tjb_l1: norm(&tjb, Norm::L1) });
    }
    let report = OperatorReport {
        config_hash: hash.clone(),
        lambda,
        exceptional_measure: exceptional_set(&dec).measure,
        f_l1: norm(&f, Norm::L1),
        tf_l1: norm(&tf, Norm::L1),
        tf_linf: top,
        weak_type_ratio: profile.as_ref().map_or(0.0, |p| p.ratio),
        weak_type_argmax: profile.as_ref().map_or(f64::NAN, |p| p.argmax_lambda),
        pieces,
    };
    write_file(&out_dir.join("operator.json"), serde_json::to_string_pretty(&report)?)?;
    if let Some(p) = &profile {
        write_file(&out_dir.join("weak_type.json"), serde_json::to_string_pretty(p)?)?;
    }
    timing.insert("apply_s".into(), started.elapsed().as_secs_f64().into());

    let mut verdicts = Vec::new();
    if !cfg.claims.is_empty() {
        let reports_dir = out_dir.join("reports");
        mkdir(&reports_dir)?;
        let csv_path = out_dir.join("summary.csv");
        let mut csv = create(&csv_path)?;
        for (i, id) in cfg.claims.iter().enumerate() {
            let t0 = Instant::now();
            let rep = verify_claim(id, cfg)?;
            write_file(&reports_dir.join(format!("{id}.json")), rep.to_json()?)?;
            rep.write_csv(&mut csv, i == 0)?;
            timing.insert(format!("claim_{id}_s"), t0.elapsed().as_secs_f64().into());
            verdicts.push((id.clone(), rep.verdict));
        }
        csv.flush().map_err(|e| CzError::io(&csv_path, e))?;
    }
    timing.insert("total_s".into(), started.elapsed().as_secs_f64().into());
    write_file(&out_dir.join("timing.json"), serde_json::to_string_pretty(&timing)?)?;
    Ok(ExperimentSummary { out_dir: out_dir.to_path_buf(), config_hash: hash, verdicts })
}

pub fn run_experiment(config_path: &Path, out_dir: &Path) -> Result<ExperimentSummary> {
    let cfg = ExperimentConfig::load(config_path)?;
    run_config(&cfg, out_dir)
}
