//! Text formats for coefficient grids, point sets and interpolation problems.
//!
//! Grid:
//! ```text
//! # mode=CHECK m=2 M=3 K=4 L=4 source=quadrature
//! 0,0,1.0000000000000000e0
//! ...
//! ```
//! `source=` is optional (default `exact`). Missing `k,l` lines are zero.
//!
//! Point set: header `# m=2 M=1 n=3`, then one line per point,
//! `x_0,...,x_m|z_0,...,z_M`. An interpolation problem appends
//! `targets: h_1,...,h_n`.

use std::fmt::Write as _;

use spherepd::oracle::ProductPointSet;
use spherepd::quadrature::{CoefficientGrid, Mode, Provenance};
use spherepd::SphereDim;

use crate::error::{CliError, Result};

fn format_err(context: &'static str, line: usize, message: impl Into<String>) -> CliError {
    CliError::Format {
        context,
        line,
        message: message.into(),
    }
}

/// Parses `# key=value key=value ...` into pairs, in order.
fn header_fields(context: &'static str, line: &str) -> Result<Vec<(String, String)>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| format_err(context, 1, "expected a `#` header line"))?;
    body.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| {
                    format_err(context, 1, format!("header token `{tok}` is not key=value"))
                })
        })
        .collect()
}

fn take<'a>(context: &'static str, fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| format_err(context, 1, format!("header is missing `{key}=`")))
}

fn parse_num<T: std::str::FromStr>(
    context: &'static str,
    line: usize,
    s: &str,
    what: &str,
) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| format_err(context, line, format!("cannot parse {what} `{}`", s.trim())))
}

fn parse_dim(context: &'static str, line: usize, s: &str) -> Result<SphereDim> {
    s.parse()
        .map_err(|e: spherepd::Error| format_err(context, line, e.to_string()))
}

/// Content lines with their 1-based numbers, skipping blanks and later `#` comments.
fn body_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_grid(g: &CoefficientGrid) -> String {
    let mode = match g.mode() {
        Mode::Hat => "HAT",
        Mode::Check => "CHECK",
    };
    let source = match g.provenance() {
        Provenance::Exact => "exact",
        Provenance::Quadrature => "quadrature",
    };
    let mut out = format!(
        "# mode={mode} m={} M={} K={} L={} source={source}\n",
        g.dim_t(),
        g.dim_s(),
        g.k_max(),
        g.l_max()
    );
    for (k, l, v) in g.entries() {
        writeln!(out, "{k},{l},{v:.16e}").expect("writing to a String");
    }
    out
}

pub fn parse_grid(text: &str) -> Result<CoefficientGrid> {
    const CTX: &str = "grid";
    let first = text
        .lines()
        .next()
        .ok_or_else(|| format_err(CTX, 1, "empty file"))?;
    let fields = header_fields(CTX, first.trim())?;
    let mode = match take(CTX, &fields, "mode")? {
        "HAT" => Mode::Hat,
        "CHECK" => Mode::Check,
        other => return Err(format_err(CTX, 1, format!("unknown mode `{other}`"))),
    };
    let dim_t = parse_dim(CTX, 1, take(CTX, &fields, "m")?)?;
    let dim_s = parse_dim(CTX, 1, take(CTX, &fields, "M")?)?;
    let k_max: usize = parse_num(CTX, 1, take(CTX, &fields, "K")?, "K")?;
    let l_max: usize = parse_num(CTX, 1, take(CTX, &fields, "L")?, "L")?;
    let provenance = match fields
        .iter()
        .find(|(k, _)| k == "source")
        .map(|(_, v)| v.as_str())
    {
        None | Some("exact") => Provenance::Exact,
        Some("quadrature") => Provenance::Quadrature,
        Some(other) => return Err(format_err(CTX, 1, format!("unknown source `{other}`"))),
    };
    if let Some((k, _)) = fields
        .iter()
        .find(|(k, _)| !matches!(k.as_str(), "mode" | "m" | "M" | "K" | "L" | "source"))
    {
        return Err(format_err(CTX, 1, format!("unknown header key `{k}`")));
    }
    let cols = l_max + 1;
    let mut values = vec![0.0; (k_max + 1) * cols];
    let mut seen = vec![false; values.len()];
    for (n, line) in body_lines(text) {
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(format_err(CTX, n, "expected `k,l,value`"));
        }
        let k: usize = parse_num(CTX, n, parts[0], "k")?;
        let l: usize = parse_num(CTX, n, parts[1], "l")?;
        let v: f64 = parse_num(CTX, n, parts[2], "value")?;
        if k > k_max || l > l_max {
            return Err(format_err(
                CTX,
                n,
                format!("index ({k},{l}) outside K={k_max}, L={l_max}"),
            ));
        }
        if !v.is_finite() {
            return Err(format_err(CTX, n, "value is not finite"));
        }
        let idx = k * cols + l;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(format_err(CTX, n, format!("duplicate entry ({k},{l})")));
        }
        values[idx] = v;
    }
    let grid = CoefficientGrid::from_values(dim_t, dim_s, k_max, l_max, mode, values)
        .map_err(|e| format_err(CTX, 1, e.to_string()))?;
    Ok(grid.with_provenance(provenance))
}

fn write_coords(out: &mut String, v: &[f64]) {
    for (i, c) in v.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{c}").expect("writing to a String");
    }
}

pub fn write_points(p: &ProductPointSet) -> String {
    let mut out = format!("# m={} M={} n={}\n", p.dim_t(), p.dim_s(), p.len());
    for (x, z) in p.xs().iter().zip(p.zs()) {
        write_coords(&mut out, x);
        out.push('|');
        write_coords(&mut out, z);
        out.push('\n');
    }
    out
}

pub fn parse_points(text: &str) -> Result<ProductPointSet> {
    let (p, targets) = parse_point_lines("point set", text, false)?;
    debug_assert!(targets.is_none());
    Ok(p)
}

/// Point set followed by its interpolation targets.
pub fn write_problem(p: &ProductPointSet, targets: &[f64]) -> String {
    let mut out = write_points(p);
    out.push_str("targets: ");
    write_coords(&mut out, targets);
    out.push('\n');
    out
}

pub fn parse_problem(text: &str) -> Result<(ProductPointSet, Vec<f64>)> {
    let (p, targets) = parse_point_lines("problem", text, true)?;
    let targets = targets
        .ok_or_else(|| format_err("problem", text.lines().count(), "missing `targets:` line"))?;
    if targets.len() != p.len() {
        return Err(format_err(
            "problem",
            text.lines().count(),
            format!("{} targets for {} points", targets.len(), p.len()),
        ));
    }
    Ok((p, targets))
}

fn parse_list(context: &'static str, line: usize, s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|c| parse_num(context, line, c, "number"))
        .collect()
}

fn parse_point_lines(
    context: &'static str,
    text: &str,
    with_targets: bool,
) -> Result<(ProductPointSet, Option<Vec<f64>>)> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| format_err(context, 1, "empty file"))?;
    let fields = header_fields(context, first.trim())?;
    let dim_t = parse_dim(context, 1, take(context, &fields, "m")?)?;
    let dim_s = parse_dim(context, 1, take(context, &fields, "M")?)?;
    let n: usize = parse_num(context, 1, take(context, &fields, "n")?, "n")?;
    let (Some(m), Some(big_m)) = (dim_t.get(), dim_s.get()) else {
        return Err(format_err(context, 1, "point sets need finite dimensions"));
    };
    let (mut xs, mut zs) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut targets = None;
    let mut lines = body_lines(text).peekable();
    while let Some((ln, line)) = lines.next() {
        if let Some(rest) = line.strip_prefix("targets:") {
            if !with_targets {
                return Err(format_err(
                    context,
                    ln,
                    "unexpected `targets:` line in a point set",
                ));
            }
            let rest = if rest.trim().is_empty() {
                lines.next().map(|(_, l)| l).unwrap_or("")
            } else {
                rest
            };
            targets = Some(parse_list(context, ln, rest)?);
            if let Some((extra, _)) = lines.next() {
                return Err(format_err(context, extra, "content after `targets:`"));
            }
            break;
        }
        let (x, z) = line
            .split_once('|')
            .ok_or_else(|| format_err(context, ln, "expected `x coordinates|z coordinates`"))?;
        let x = parse_list(context, ln, x)?;
        let z = parse_list(context, ln, z)?;
        if x.len() != m as usize + 1 || z.len() != big_m as usize + 1 {
            return Err(format_err(
                context,
                ln,
                format!(
                    "expected {} and {} coordinates, found {} and {}",
                    m + 1,
                    big_m + 1,
                    x.len(),
                    z.len()
                ),
            ));
        }
        xs.push(x);
        zs.push(z);
    }
    if xs.len() != n {
        return Err(format_err(
            context,
            1,
            format!("header says n={n}, found {} points", xs.len()),
        ));
    }
    let p = ProductPointSet::new(dim_t, dim_s, xs, zs)
        .map_err(|e| format_err(context, 1, e.to_string()))?;
    Ok((p, targets))
}
