// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pmme_core::estimation::{estimate_kernels, kernel_disagreement};
use pmme_core::oracles::{markov_trajectory, max_stable_step};
use pmme_core::{
    apply_map, assemble_map, choi_matrix, compare_trajectories, cp_check, cp_scan, damping_basis, integrate_pmme,
    integrate_reduced, kraus_extract, xi_from_states, CpScan, DensityMatrix, DynamicalMap, Trajectory,
};
use rayon::prelude::*;

use crate::config::{format_kernel, parse_number, ScenarioConfig};
use crate::error::{CliError, Context, Result};
use crate::output::{fmt_complex, fmt_f64, fmt_matrix, write_atomic, Table};

/// Summary printed after a command. Files written by the command contain no
/// timing information, so they are byte-identical across runs.
#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub sections: Vec<(String, Vec<String>)>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    fn section(&mut self, title: &str, lines: Vec<String>) {
        self.sections.push((title.to_string(), lines));
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (title, lines) in &self.sections {
            writeln!(f, "== {title} ==")?;
            for l in lines {
                writeln!(f, "{l}")?;
            }
        }
        writeln!(f, "== output ==")?;
        for p in &self.files {
            writeln!(f, "{}", p.display())?;
        }
        Ok(())
    }
}

fn spectral_map(cfg: &ScenarioConfig) -> Result<DynamicalMap> {
    let basis = damping_basis(&cfg.system.generator).context("damping basis")?;
    assemble_map(basis, cfg.kernel()?).context("response functions")
}

fn base_report(cfg: &ScenarioConfig, map: &DynamicalMap) -> RunReport {
    let mut r = RunReport::default();
    r.section("config", cfg.ini.render().lines().map(str::to_string).collect());
    r.section(
        "damping basis",
        map.basis().eigenvalues().iter().enumerate().map(|(i, l)| format!("lambda_{i} = {}", fmt_complex(*l))).collect(),
    );
    r.section(
        "poles",
        map.xis()
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let poles: Vec<String> = xi
                    .terms()
                    .iter()
                    .map(|t| match t.coeffs.len() {
                        1 => fmt_complex(t.pole),
                        m => format!("{} x{m}", fmt_complex(t.pole)),
                    })
                    .collect();
                format!("xi_{i}: {}", if poles.is_empty() { "none".to_string() } else { poles.join(", ") })
            })
            .collect(),
    );
    r
}

fn cp_lines(scan: &CpScan) -> Vec<String> {
    vec![
        format!("min margin = {}", fmt_f64(scan.min_margin())),
        match scan.first_violation_time {
            Some(t) => format!("first violation at t = {}", fmt_f64(t)),
            None => "completely positive on the whole grid".to_string(),
        },
    ]
}

fn rho_header(n: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            h.push(format!("re_rho_{i}_{j}"));
            h.push(format!("im_rho_{i}_{j}"));
        }
    }
    h
}

pub fn solve(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let grid = cfg.grid()?;
    let rho0 = cfg.initial()?;
    let map = spectral_map(cfg)?;
    let n = cfg.system.dim;
    let times = grid.times();
    let rows = times
        .par_iter()
        .map(|&t| {
            let rho = apply_map(&map, rho0, t).context("propagation")?;
            let mut row = vec![fmt_f64(t)];
            for z in rho.matrix().iter() {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            for xi in map.xi_values(t) {
                row.push(fmt_f64(xi.re));
                row.push(fmt_f64(xi.im));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["t".to_string()];
    header.extend(rho_header(n));
    for k in 0..n * n {
        header.push(format!("re_xi_{k}"));
        header.push(format!("im_xi_{k}"));
    }
    let mut table = Table::new(header);
    rows.into_iter().for_each(|r| table.push(r));

    let scan = cp_scan(&map, &times).context("complete-positivity scan")?;
    let mut report = base_report(cfg, &map);
    report.section("complete positivity", cp_lines(&scan));
    report.files.push(table.write(&out.join("trajectory.csv"))?);
    Ok(report)
}

pub fn cp_scan_cmd(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let grid = cfg.grid()?;
    let map = spectral_map(cfg)?;
    let scan = cp_scan(&map, &grid.times()).context("complete-positivity scan")?;
    let mut table = Table::new(vec!["t".into(), "margin".into(), "is_cp".into()]);
    for ((t, m), ok) in scan.times.iter().zip(&scan.margins).zip(&scan.is_cp) {
        table.push(vec![fmt_f64(*t), fmt_f64(*m), ok.to_string()]);
    }
    let mut report = base_report(cfg, &map);
    report.section("complete positivity", cp_lines(&scan));
    report.files.push(table.write(&out.join("cp_scan.csv"))?);
    Ok(report)
}

pub fn kraus(cfg: &ScenarioConfig, t: f64, out: &Path) -> Result<RunReport> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::config(format!("--t must be finite and nonnegative, got {t}")));
    }
    let map = spectral_map(cfg)?;
    let choi = choi_matrix(&map, t).context("Choi matrix")?;
    let check = cp_check(&choi).context("Choi spectrum")?;
    if !check.is_cp {
        return Err(CliError::NotCompletelyPositive { t, margin: check.margin });
    }
    let set = kraus_extract(&choi).context("Kraus decomposition")?;
    let mut text = format!(
        "# Kraus operators at t = {}\n# choi_margin = {}\n# completeness_residual = {}\n# operators = {}\n",
        fmt_f64(t),
        fmt_f64(check.margin),
        fmt_f64(set.completeness_residual()),
        set.len()
    );
    for (k, (m, w)) in set.operators().iter().zip(set.weights()).enumerate() {
        text.push_str(&format!("\noperator {k} choi_eigenvalue = {}\n{}\n", fmt_f64(*w), fmt_matrix(m)));
    }
    let path = out.join("kraus.txt");
    write_atomic(&path, text.as_bytes())?;
    let mut report = base_report(cfg, &map);
    report.section("kraus", text.lines().map(str::to_string).collect());
    report.files.push(path);
    Ok(report)
}

/// Reads a trajectory written by [`solve`]; extra columns are ignored.
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let bad = |line: Option<usize>, msg: String| CliError::Config {
        location: crate::error::Location { path: Some(path.to_path_buf()), line, key: None },
        message: msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| bad(None, format!("cannot read trajectory: {e}")))?;
    let header = reader.headers().map_err(|e| bad(Some(1), e.to_string()))?.clone();
    if header.get(0) != Some("t") {
        return Err(bad(Some(1), "first column must be 't'".into()));
    }
    let count = header.iter().filter(|h| h.starts_with("re_rho_")).count();
    let n = (count as f64).sqrt().round() as usize;
    if n < 2 || n * n != count {
        return Err(bad(Some(1), format!("found {count} re_rho columns, expected n² for some n ≥ 2")));
    }
    let mut cols = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let find = |name: String| {
                header.iter().position(|h| h == name).ok_or_else(|| bad(Some(1), format!("missing column '{name}'")))
            };
            cols.push((find(format!("re_rho_{i}_{j}"))?, find(format!("im_rho_{i}_{j}"))?));
        }
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let line = r + 2;
        let record = record.map_err(|e| bad(Some(line), e.to_string()))?;
        let field = |k: usize| -> Result<f64> {
            parse_number(record.get(k).unwrap_or("")).map_err(|m| bad(Some(line), m))
        };
        times.push(field(0)?);
        let mut m = ndarray::Array2::zeros((n, n));
        for (idx, &(re, im)) in cols.iter().enumerate() {
            m[[idx / n, idx % n]] = Complex64::new(field(re)?, field(im)?);
        }
        states.push(DensityMatrix::from_raw(m).map_err(|e| bad(Some(line), e.to_string()))?);
    }
    if times.is_empty() {
        return Err(bad(None, "trajectory has no rows".into()));
    }
    if times[0] != 0.0 {
        return Err(bad(Some(2), format!("trajectory must start at t = 0, found {}", times[0])));
    }
    let step = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    for (j, t) in times.iter().enumerate() {
        if (t - j as f64 * step).abs() > 1e-9 * times[times.len() - 1].abs().max(1.0) {
            return Err(bad(Some(j + 2), format!("time grid is not uniform at t = {t}")));
        }
    }
    Trajectory::new(step, states).map_err(|e| bad(None, e.to_string()))
}

pub fn estimate_kernel(cfg: &ScenarioConfig, trajectory: &Path, out: &Path) -> Result<RunReport> {
    let traj = read_trajectory(trajectory)?;
    if traj.dim() != cfg.system.dim {
        return Err(CliError::config(format!(
            "trajectory has dimension {} but the system has dimension {}",
            traj.dim(),
            cfg.system.dim
        )));
    }
    let basis = damping_basis(&cfg.system.generator).context("damping basis")?;
    let rho0 = traj.states()[0].clone();
    let samples = xi_from_states(&basis, &traj, &rho0).context("response samples")?;
    let estimates = estimate_kernels(&samples, cfg.options.max_order, cfg.options.residual).context("kernel fit")?;
    let best = estimates
        .iter()
        .min_by(|a, b| a.fit.residual.total_cmp(&b.fit.residual))
        .expect("estimate_kernels returns at least one index");
    let mut text = format!(
        "# kernel recovered from {} ({} samples, step {})\n# assumed Markovian model: {}\n",
        trajectory.display(),
        traj.len(),
        fmt_f64(traj.step()),
        samples.provenance()
    );
    for e in &estimates {
        text.push_str(&format!(
            "# index {}: lambda = {}, {} exponentials, residual {}: {}\n",
            e.index,
            fmt_complex(e.eigenvalue),
            e.fit.poles.len(),
            fmt_f64(e.fit.residual),
            format_kernel(&e.kernel)
        ));
    }
    text.push_str(&format!(
        "# largest disagreement between indices: {}\n[kernel]\nspec = {}\n",
        fmt_f64(kernel_disagreement(&estimates)),
        format_kernel(&best.kernel)
    ));
    let path = out.join("kernel.ini");
    write_atomic(&path, text.as_bytes())?;
    let mut report = RunReport::default();
    report.section("estimate", text.lines().map(str::to_string).collect());
    report.files.push(path);
    Ok(report)
}

/// Substeps per grid interval for the history integrators.
fn oracle_substeps(cfg: &ScenarioConfig, h_grid: f64) -> Result<usize> {
    let l = &cfg.system.generator;
    let target = match cfg.options.oracle_step {
        Some(h) => h,
        None => {
            let norm = l.norm().context("generator norm")?;
            let accurate = if norm > 0.0 { 1e-2 / norm } else { f64::INFINITY };
            accurate.min(max_stable_step(l, cfg.kernel()?).context("oracle step")?)
        }
    };
    Ok(((h_grid / target) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
}

pub fn compare(cfg: &ScenarioConfig, out: &Path) -> Result<RunReport> {
    let grid = cfg.grid()?;
    let rho0 = cfg.initial()?;
    let kernel = cfg.kernel()?;
    let l = &cfg.system.generator;
    let map = spectral_map(cfg)?;
    let h = grid.step();
    let points = grid.steps;

    let spectral = if points > 1 {
        map.trajectory(rho0, h, points).context("spectral solution")?
    } else {
        Trajectory::new(0.0, vec![rho0.clone()]).context("spectral solution")?
    };
    let (full, reduced, markov) = if points > 1 {
        let m = oracle_substeps(cfg, h)?;
        let h_o = h / m as f64;
        let (full, reduced) = rayon::join(
            || integrate_pmme(l, kernel, rho0, grid.t_max, h_o).context("memory-kernel integration"),
            || integrate_reduced(l, kernel, rho0, grid.t_max, h_o).context("reduced-equation integration"),
        );
        (
            full?.subsample(m).context("subsampling")?,
            reduced?.subsample(m).context("subsampling")?,
            markov_trajectory(l, rho0, h, points).context("Markovian solution")?,
        )
    } else {
        (spectral.clone(), spectral.clone(), spectral.clone())
    };

    let solvers = [("spectral", &spectral), ("pmme_oracle", &full), ("reduced_oracle", &reduced), ("markov", &markov)];
    let mut header = vec!["t".to_string()];
    let mut columns = Vec::new();
    for (i, (na, a)) in solvers.iter().enumerate() {
        for (nb, b) in &solvers[i + 1..] {
            header.push(format!("{na}_vs_{nb}"));
            columns.push(compare_trajectories(a, b).context("trajectory comparison")?);
        }
    }
    let mut table = Table::new(header.clone());
    for j in 0..points {
        let mut row = vec![fmt_f64(j as f64 * h)];
        row.extend(columns.iter().map(|d| fmt_f64(d.distances[j])));
        table.push(row);
    }
    let mut report = base_report(cfg, &map);
    report.section(
        "max trace-norm distance",
        header[1..].iter().zip(&columns).map(|(n, d)| format!("{n} = {}", fmt_f64(d.max))).collect(),
    );
    report.files.push(table.write(&out.join("compare.csv"))?);
    Ok(report)
}
