#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mean_x = rx.iter().sum::<f64>() / n;
    let mean_y = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mean_x) * (b - mean_y);
        var_x += (a - mean_x).powi(2);
        var_y += (b - mean_y).powi(2);
    }
    cov / (var_x * var_y).sqrt()
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Parsed CSV with named float columns.
pub struct Csv {
    pub columns: HashMap<String, Vec<f64>>,
    pub n_rows: usize,
    pub header: Vec<String>,
}

pub fn read_csv(path: &Path) -> Csv {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("csv header")
        .split(',')
        .map(str::to_string)
        .collect();
    let mut columns: HashMap<String, Vec<f64>> =
        header.iter().map(|h| (h.clone(), Vec::new())).collect();
    let mut n_rows = 0;
    for line in lines {
        n_rows += 1;
        for (name, field) in header.iter().zip(line.split(',')) {
            let value = match field {
                "nan" => f64::NAN,
                "true" => 1.0,
                "false" => 0.0,
                other => other
                    .parse()
                    .unwrap_or_else(|e| panic!("bad field {other}: {e}")),
            };
            columns.get_mut(name).unwrap().push(value);
        }
    }
    Csv {
        columns,
        n_rows,
        header,
    }
}

impl Csv {
    pub fn col(&self, name: &str) -> &[f64] {
        self.columns
            .get(name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }
}

/// Runs the fwdgame binary with the given arguments.
pub fn fwdgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwdgame"))
        .args(args)
        .output()
        .expect("spawn fwdgame")
}

pub fn stdout_str(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn stderr_str(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn last_decile_mean(values: &[f64]) -> f64 {
    let tail = (values.len() / 10).max(1);
    let slice = &values[values.len() - tail..];
    slice.iter().sum::<f64>() / slice.len() as f64
}
