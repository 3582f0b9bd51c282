//! File handling, number lists, direction sets and error mapping.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use stochastic_coresets::geom::{direction_net, width};
use stochastic_coresets::model::{Instance, UncertainSet};
use stochastic_coresets::Error;

/// Exit code for malformed input and usage errors.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for failed preconditions and unsupported requests.
pub const EXIT_PRECONDITION: u8 = 3;
/// Exit code for file system failures.
pub const EXIT_IO: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: "cli.io".into(),
            message: message.into(),
            exit: EXIT_IO,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: "cli.validation".into(),
            message: message.into(),
            exit: EXIT_VALIDATION,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = if e.is_validation() {
            EXIT_VALIDATION
        } else {
            EXIT_PRECONDITION
        };
        CliError {
            code: e.code(),
            message: e.to_string(),
            exit,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))
}

pub fn read_set(path: &Path) -> CliResult<UncertainSet> {
    Ok(Instance::from_json(&read_text(path)?)?.into_set()?)
}

/// Writes `text` to `out`, or to standard output when `out` is `None`.
pub fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())
                .and_then(|_| s.flush())
                .map_err(|e| CliError::io(format!("stdout: {e}")))
        }
    }
}

pub fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::usage(format!("'{t}' is not a finite number")))
        })
        .collect()
}

pub fn unit(v: &[f64], d: usize) -> CliResult<Vec<f64>> {
    if v.len() != d {
        return Err(CliError::usage(format!("direction has {} components, the instance has d = {d}", v.len())));
    }
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(CliError::usage("direction must be nonzero"));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

/// `k` report directions: evenly spaced over a half circle in the plane,
/// a thinned direction net otherwise.
pub fn report_directions(d: usize, k: usize) -> Vec<Vec<f64>> {
    if d == 2 {
        return (0..k)
            .map(|j| {
                let t = std::f64::consts::PI * j as f64 / k as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    let net: Vec<Vec<f64>> = direction_net(d, 0.1).into_iter().map(|u| u.into_vec()).collect();
    if net.len() <= k {
        return net;
    }
    (0..k).map(|j| net[j * net.len() / k].clone()).collect()
}

/// `count` t values evenly spaced on (0, 1.05·W] where W is the largest
/// width of all locations over `dirs`.
pub fn t_values(set: &UncertainSet, dirs: &[Vec<f64>], count: usize) -> Vec<f64> {
    let locs = set.all_locations();
    let w = dirs.iter().map(|u| width(&locs, u)).fold(0.0, f64::max).max(1e-12);
    (1..=count).map(|j| 1.05 * w * j as f64 / count as f64).collect()
}

pub fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
