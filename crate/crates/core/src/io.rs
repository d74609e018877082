//! The `control.txt`, `gp.txt` and `output.txt` file formats.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::optimizer::Method;
use crate::portfolio::ReturnParams;

/// Estimation settings from the third control-file line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorSpec {
    Dp { precision: u32, rf_max: f64 },
    Simulation { base_n: u64, alpha_noninferiority: f64, alpha_zero: f64 },
}

/// Parsed control file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlFile {
    pub params: ReturnParams,
    pub horizon: usize,
    pub withdrawal_rate: f64,
    pub epsilon: f64,
    pub method: Method,
    pub estimator: EstimatorSpec,
}

fn field<T: std::str::FromStr>(tokens: &mut std::str::SplitWhitespace<'_>, name: &str) -> Result<T> {
    let tok = tokens.next().ok_or_else(|| Error::Parse(format!("control file is missing {name}")))?;
    tok.parse().map_err(|_| Error::Parse(format!("control file field {name} has invalid value '{tok}'")))
}

impl ControlFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = text.split_whitespace();
        let mu_s = field(&mut t, "mu_s")?;
        let sigma2_s = field(&mut t, "sigma2_s")?;
        let mu_b = field(&mut t, "mu_b")?;
        let sigma2_b = field(&mut t, "sigma2_b")?;
        let cov_sb = field(&mut t, "cov_sb")?;
        let expense_ratio = field(&mut t, "expense ratio")?;
        let params = ReturnParams::new(mu_s, sigma2_s, mu_b, sigma2_b, cov_sb, expense_ratio)?;
        let horizon: usize = field(&mut t, "T_D")?;
        let withdrawal_rate: f64 = field(&mut t, "W_R")?;
        let epsilon: f64 = field(&mut t, "epsilon")?;
        let method = match field::<String>(&mut t, "method")?.as_str() {
            "nr" => Method::Newton,
            "ga" => Method::GradientAscent,
            other => return Err(Error::Parse(format!("method must be 'nr' or 'ga', found '{other}'"))),
        };
        let estimator = match field::<String>(&mut t, "estimator")?.as_str() {
            "dp" => EstimatorSpec::Dp { precision: field(&mut t, "precision")?, rf_max: field(&mut t, "rf_max")? },
            "sim" => EstimatorSpec::Simulation {
                base_n: field(&mut t, "N")?,
                alpha_noninferiority: field(&mut t, "alpha 1")?,
                alpha_zero: field(&mut t, "alpha 2")?,
            },
            other => return Err(Error::Parse(format!("estimator must be 'dp' or 'sim', found '{other}'"))),
        };
        if let Some(extra) = t.next() {
            return Err(Error::Parse(format!("unexpected trailing control-file field '{extra}'")));
        }
        if horizon == 0 {
            return Err(Error::Parse("T_D must be at least 1".into()));
        }
        if withdrawal_rate.is_nan() || withdrawal_rate <= 0.0 || epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Parse("W_R and epsilon must be positive".into()));
        }
        Ok(Self { params, horizon, withdrawal_rate, epsilon, method, estimator })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }

    /// Renders the three control lines.
    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "{} {} {} {} {} {}\n{} {} {}\n",
            p.mu_s,
            p.sigma2_s,
            p.mu_b,
            p.sigma2_b,
            p.cov_sb,
            p.expense_ratio,
            self.horizon,
            self.withdrawal_rate,
            self.epsilon
        );
        let m = match self.method {
            Method::Newton => "nr",
            Method::GradientAscent => "ga",
        };
        match self.estimator {
            EstimatorSpec::Dp { precision, rf_max } => writeln!(s, "{m} dp {precision} {rf_max}"),
            EstimatorSpec::Simulation { base_n, alpha_noninferiority, alpha_zero } => {
                writeln!(s, "{m} sim {base_n} {alpha_noninferiority} {alpha_zero}")
            }
        }
        .expect("writing to a String cannot fail");
        s
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Reads the first `horizon` whitespace-separated ratios.
pub fn parse_glidepath(text: &str, horizon: usize, name: &str) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(horizon);
    for tok in text.split_whitespace().take(horizon) {
        let a: f64 = tok.parse().map_err(|_| Error::Parse(format!("{name}: invalid equity ratio '{tok}'")))?;
        if !a.is_finite() {
            return Err(Error::Parse(format!("{name}: invalid equity ratio '{tok}'")));
        }
        out.push(a);
    }
    if out.len() < horizon {
        return Err(Error::Parse(format!("{name} needs {horizon} initial asset allocations, but has fewer")));
    }
    Ok(out)
}

pub fn read_glidepath(path: &Path, horizon: usize) -> Result<Vec<f64>> {
    parse_glidepath(&read_text(path)?, horizon, &path.display().to_string())
}

/// One ratio per line.
pub fn render_glidepath(glidepath: &[f64]) -> String {
    glidepath.iter().map(|a| format!("{a}\n")).collect()
}

/// The output file: a blank line, the success probability to 12 decimals, then the ratios as
/// `GP[nn]=+x.xxxxxxxxxx` in five columns, filled column by column.
pub fn format_output(probability: f64, glidepath: &[f64]) -> String {
    let mut s = String::from("\n");
    if (-0.000001..=1.000001).contains(&probability) {
        writeln!(s, "--> Success probability for this Glide-Path = {probability:.12}").unwrap();
    }
    s.push_str(&format_array("GP", glidepath));
    s
}

/// Column-major block of `label[nn]=+value` entries, five per row.
pub fn format_array(label: &str, values: &[f64]) -> String {
    const COLS: usize = 5;
    let rows = values.len().div_ceil(COLS);
    let mut s = String::new();
    for r in 0..rows {
        for c in 0..COLS {
            let i = r + rows * c;
            if i < values.len() {
                write!(s, "{label}[{i:02}]={:+.10}  ", values[i]).unwrap();
            }
        }
        s.push('\n');
    }
    s
}

pub fn write_output(path: &Path, probability: f64, glidepath: &[f64]) -> Result<()> {
    std::fs::write(path, format_output(probability, glidepath))
        .map_err(|source| Error::Io { path: path.display().to_string(), source })
}
