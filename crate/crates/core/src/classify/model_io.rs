//! Flat text format for trained SVMs.
//!
//! ```text
//! ssm-svm-model v1
//! kernel rbs 0.05
//! c 1
//! bias -0.25
//! dim 2
//! sv 3
//! <signed alpha> <x_1> ... <x_dim>
//! ...
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so reading a written
//! model gives back identical bits.

use super::kernel::KernelSpec;
use super::smo::SvmModel;
use crate::error::{Error, Result};

const MAGIC: &str = "ssm-svm-model v1";

pub fn write_model(model: &SvmModel) -> String {
    let mut out = format!("{MAGIC}\n");
    match model.kernel {
        KernelSpec::Linear => out.push_str("kernel linear\n"),
        KernelSpec::Rbs { gamma } => out.push_str(&format!("kernel rbs {gamma}\n")),
    }
    out.push_str(&format!("c {}\n", model.c_param));
    out.push_str(&format!("bias {}\n", model.bias));
    out.push_str(&format!("dim {}\n", model.dim()));
    out.push_str(&format!("sv {}\n", model.support_vectors.len()));
    for (sv, a) in model.support_vectors.iter().zip(&model.alphas) {
        out.push_str(&a.to_string());
        for v in sv {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::ModelFormat(format!("line {line}: {}", msg.into()))
}

fn field<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> Result<(usize, Vec<&'a str>)> {
    let (no, line) = lines
        .next()
        .ok_or_else(|| bad(0, format!("missing `{key}`")))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(bad(no, format!("expected `{key}`")));
    }
    Ok((no, parts.collect()))
}

fn num(no: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| bad(no, format!("bad number `{s}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(no, "non-finite value"))
    }
}

fn single<'a>(no: usize, parts: &[&'a str]) -> Result<&'a str> {
    match parts {
        [v] => Ok(v),
        _ => Err(bad(no, "expected one value")),
    }
}

pub fn read_model(text: &str) -> Result<SvmModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == MAGIC => {}
        _ => return Err(bad(1, format!("expected `{MAGIC}`"))),
    }
    let (no, parts) = field(&mut lines, "kernel")?;
    let kernel = match parts.as_slice() {
        ["linear"] => KernelSpec::Linear,
        ["rbs", g] => KernelSpec::rbs(num(no, g)?).map_err(|e| bad(no, e.to_string()))?,
        _ => return Err(bad(no, "unknown kernel")),
    };
    let (no, parts) = field(&mut lines, "c")?;
    let c_param = num(no, single(no, &parts)?)?;
    let (no, parts) = field(&mut lines, "bias")?;
    let bias = num(no, single(no, &parts)?)?;
    let (no, parts) = field(&mut lines, "dim")?;
    let dim: usize = single(no, &parts)?
        .parse()
        .map_err(|_| bad(no, "bad dim"))?;
    let (no, parts) = field(&mut lines, "sv")?;
    let count: usize = single(no, &parts)?
        .parse()
        .map_err(|_| bad(no, "bad sv count"))?;

    let mut support_vectors = Vec::with_capacity(count);
    let mut alphas = Vec::with_capacity(count);
    for _ in 0..count {
        let (no, line) = lines
            .next()
            .ok_or_else(|| bad(0, "truncated support vectors"))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| num(no, s))
            .collect::<Result<_>>()?;
        if vals.len() != dim + 1 {
            return Err(bad(no, format!("expected {} values", dim + 1)));
        }
        alphas.push(vals[0]);
        support_vectors.push(vals[1..].to_vec());
    }
    if let Some((no, l)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(bad(no, format!("trailing content `{l}`")));
    }
    Ok(SvmModel {
        support_vectors,
        alphas,
        bias,
        kernel,
        c_param,
    })
}
