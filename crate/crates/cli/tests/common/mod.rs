// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::path::Path;

pub fn scenario(system: &str, kernel: &str, t_max: f64, steps: usize, initial: &str) -> String {
    format!(
        "[system]\n{system}\n\n[kernel]\nspec = {kernel}\n\n[grid]\nt_max = {t_max}\nsteps = {steps}\n\n[initial]\n{initial}\n"
    )
}

pub fn dephasing_scenario(kernel: &str, t_max: f64, steps: usize) -> String {
    scenario("preset = dephasing(1)", kernel, t_max, steps, "preset = plus")
}

pub fn f1(a: f64, amp: f64, gamma: f64, t: f64) -> f64 {
    let omega = (4.0 * amp * a - (gamma + a).powi(2)).sqrt() / 2.0;
    let sigma = (a + gamma) / 2.0;
    (-sigma * t).exp() * ((omega * t).cos() + (omega * t).sin() * sigma / omega)
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Rows of a CSV file as (header, numeric rows); non-numeric fields are NaN.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

pub fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}
