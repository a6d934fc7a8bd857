//! Kernel labels.
//!
//! ```text
//! kernel  := const:c=<x>
//!          | cm_exp:a=<x>,b=<x>
//!          | cm_pow:alpha=<x>,beta=<x>
//!          | prod:f=<part>,g=<part>
//!          | geg:k=<int>,m=<int>,l=<int>,M=<int>
//!          | sum(<w>*<kernel> + <w>*<kernel> ...)
//!          | product(<kernel> * <kernel> ...)
//! part    := one | lin | affine | exp(<a>) | pow(<alpha>) | <constant>
//! ```
//! Every kernel prints a label that parses back to the same kernel.

use spherepd::constructions::{
    cm_exponential, cm_inverse_power, combine, constant, gegenbauer_tensor, product_kernel,
    Combination, IsotropicKernel, Univariate,
};
use spherepd::SphereDim;

use crate::error::{CliError, Result};

fn bad(label: &str, message: impl Into<String>) -> CliError {
    CliError::Kernel {
        label: label.to_string(),
        message: message.into(),
    }
}

/// `key=value,key=value` with exactly the given keys, in order.
fn params<'a>(label: &str, body: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let pairs: Vec<&str> = body.split(',').collect();
    if pairs.len() != keys.len() {
        return Err(bad(
            label,
            format!("expected parameters {}", keys.join(",")),
        ));
    }
    pairs
        .iter()
        .zip(keys)
        .map(|(pair, key)| match pair.split_once('=') {
            Some((k, v)) if k.trim() == *key => Ok(v.trim()),
            _ => Err(bad(label, format!("expected `{key}=` in `{pair}`"))),
        })
        .collect()
}

fn num(label: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(label, format!("`{s}` is not a finite number")))
}

fn int<T: std::str::FromStr>(label: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| bad(label, format!("`{s}` is not a nonnegative integer")))
}

fn part(label: &str, s: &str) -> Result<Univariate> {
    let call = |name: &str| {
        s.strip_prefix(name)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    Ok(match s {
        "one" => Univariate::constant(1.0),
        "lin" => Univariate::identity(),
        "affine" => Univariate::affine(),
        _ => {
            if let Some(a) = call("exp") {
                Univariate::geodesic_exp(num(label, a)?).map_err(|e| bad(label, e.to_string()))?
            } else if let Some(a) = call("pow") {
                Univariate::geodesic_pow(num(label, a)?).map_err(|e| bad(label, e.to_string()))?
            } else {
                let c = num(label, s).map_err(|_| bad(label, format!("unknown factor `{s}`")))?;
                if c < 0.0 {
                    return Err(bad(label, "constant factors must be nonnegative"));
                }
                Univariate::constant(c)
            }
        }
    })
}

/// Splits on `sep` outside parentheses.
fn split_top<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            _ if depth == 0 && s[i..].starts_with(sep) => {
                out.push(&s[start..i]);
                i += sep.len();
                start = i;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out.push(&s[start..]);
    out
}

pub fn parse_kernel(label: &str) -> Result<IsotropicKernel> {
    let label = label.trim();
    if let Some(inner) = label.strip_prefix("sum(").and_then(|r| r.strip_suffix(')')) {
        let mut kernels = Vec::new();
        let mut weights = Vec::new();
        for term in split_top(inner, " + ") {
            let (w, k) = term
                .split_once('*')
                .ok_or_else(|| bad(label, format!("sum term `{term}` needs the form w*kernel")))?;
            weights.push(num(label, w.trim())?);
            kernels.push(parse_kernel(k)?);
        }
        return combine(&kernels, Combination::Sum(weights)).map_err(|e| bad(label, e.to_string()));
    }
    if let Some(inner) = label
        .strip_prefix("product(")
        .and_then(|r| r.strip_suffix(')'))
    {
        let kernels = split_top(inner, " * ")
            .into_iter()
            .map(parse_kernel)
            .collect::<Result<Vec<_>>>()?;
        return combine(&kernels, Combination::Product).map_err(|e| bad(label, e.to_string()));
    }
    let (family, body) = label
        .split_once(':')
        .ok_or_else(|| bad(label, "expected `family:parameters`"))?;
    let core = |r: spherepd::Result<IsotropicKernel>| r.map_err(|e| bad(label, e.to_string()));
    match family {
        "const" => {
            let p = params(label, body, &["c"])?;
            Ok(constant(num(label, p[0])?))
        }
        "cm_exp" => {
            let p = params(label, body, &["a", "b"])?;
            core(cm_exponential(num(label, p[0])?, num(label, p[1])?))
        }
        "cm_pow" => {
            let p = params(label, body, &["alpha", "beta"])?;
            core(cm_inverse_power(num(label, p[0])?, num(label, p[1])?))
        }
        "prod" => {
            let p = params(label, body, &["f", "g"])?;
            Ok(product_kernel(part(label, p[0])?, part(label, p[1])?))
        }
        "geg" => {
            let p = params(label, body, &["k", "m", "l", "M"])?;
            let m = SphereDim::finite(int(label, p[1])?).map_err(|e| bad(label, e.to_string()))?;
            let big_m =
                SphereDim::finite(int(label, p[3])?).map_err(|e| bad(label, e.to_string()))?;
            core(gegenbauer_tensor(
                int(label, p[0])?,
                m,
                int(label, p[2])?,
                big_m,
            ))
        }
        other => Err(bad(label, format!("unknown kernel family `{other}`"))),
    }
}
