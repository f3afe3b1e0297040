//! Spec strings for functions, norming functions and couple spaces.
//!
//! ```text
//! boyd  := power:<θ> | phialphap:a=<a>,p=<p>[,n=<N>] | prod:<boyd>*<boyd>
//!        | quot:<boyd>/<boyd> | compose:<boyd>^<m>
//!        | reiterated:chi=<boyd>,phi0=<boyd>,phi1=<boyd> | (<boyd>)
//! snf   := phi1 | phiinf | eps:a=<a>[,p=<p>][,n=<N>]
//! space := lp:<p|inf> | lm:<q|inf>:<boyd> | snf:<snf>
//! ```

use crate::boyd::{power_weights, BoydFunction};
use crate::error::{Error, Result};
use crate::kfunc::SequenceSpaceDescriptor;
use crate::snorm::SymmetricNormingFunction;

/// Stored length for weights built from a spec string; the power generator
/// covers indices beyond it.
pub const DEFAULT_WEIGHT_LEN: usize = 1024;

fn err(token: &str, what: &str) -> Error {
    Error::Parse(format!("{what}: `{token}`"))
}

/// A real number, accepting `inf`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    match s {
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|_| err(s, "not a number")),
    }
}

fn strip_parens(s: &str) -> &str {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') && matching_close(s) == Some(s.len() - 1) {
        strip_parens(&s[1..s.len() - 1])
    } else {
        s
    }
}

fn matching_close(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits at the first (or last) occurrence of `sep` outside parentheses.
fn split_top(s: &str, sep: char, last: bool) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                found = Some(i);
                if !last {
                    break;
                }
            }
            _ => {}
        }
    }
    found.map(|i| (&s[..i], &s[i + sep.len_utf8()..]))
}

fn split_all_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut rest = s;
    while let Some((a, b)) = split_top(rest, sep, false) {
        parts.push(a);
        rest = b;
    }
    parts.push(rest);
    parts
}

/// `key=value` pairs separated by top-level commas.
fn key_values<'a>(s: &'a str, allowed: &[&str], token: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let mut out: Vec<(&str, &str)> = Vec::new();
    for part in split_all_top(s, ',') {
        let (k, v) = part.split_once('=').ok_or_else(|| err(token, "expected key=value"))?;
        let k = k.trim();
        if !allowed.contains(&k) {
            return Err(err(token, &format!("unknown key `{k}`")));
        }
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(err(token, &format!("duplicate key `{k}`")));
        }
        out.push((k, v.trim()));
    }
    Ok(out)
}

fn lookup<'a>(kv: &[(&str, &'a str)], key: &str) -> Option<&'a str> {
    kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
}

fn weight_len(kv: &[(&str, &str)], token: &str) -> Result<usize> {
    match lookup(kv, "n") {
        Some(v) => v.parse::<usize>().ok().filter(|n| *n >= 1).ok_or_else(|| err(token, "n must be a positive integer")),
        None => Ok(DEFAULT_WEIGHT_LEN),
    }
}

pub fn parse_boyd(spec: &str) -> Result<BoydFunction> {
    let s = strip_parens(spec);
    let (head, body) = s.split_once(':').ok_or_else(|| err(s, "unknown function spec"))?;
    match head.trim() {
        "power" => Ok(BoydFunction::power(parse_real(body)?)),
        "phialphap" => {
            let kv = key_values(body, &["a", "p", "n"], s)?;
            let a = parse_real(lookup(&kv, "a").ok_or_else(|| err(s, "missing a"))?)?;
            let p = parse_real(lookup(&kv, "p").ok_or_else(|| err(s, "missing p"))?)?;
            BoydFunction::phi_alpha_p(power_weights(a, weight_len(&kv, s)?)?, p)
        }
        "prod" => {
            let (a, b) = split_top(body, '*', false).ok_or_else(|| err(s, "expected A*B"))?;
            Ok(BoydFunction::product(parse_boyd(a)?, parse_boyd(b)?))
        }
        "quot" => {
            let (a, b) = split_top(body, '/', false).ok_or_else(|| err(s, "expected A/B"))?;
            Ok(BoydFunction::quotient(parse_boyd(a)?, parse_boyd(b)?))
        }
        "compose" => {
            let (a, m) = split_top(body, '^', true).ok_or_else(|| err(s, "expected A^m"))?;
            Ok(BoydFunction::compose_power(parse_boyd(a)?, parse_real(m)?))
        }
        "reiterated" => {
            let kv = key_values(body, &["chi", "phi0", "phi1"], s)?;
            let get = |k: &str| lookup(&kv, k).ok_or_else(|| err(s, &format!("missing {k}")));
            Ok(crate::boyd::reiteration_rho(
                &parse_boyd(get("chi")?)?,
                &parse_boyd(get("phi0")?)?,
                &parse_boyd(get("phi1")?)?,
            ))
        }
        _ => Err(err(s, "unknown function spec")),
    }
}

pub fn parse_snf(spec: &str) -> Result<SymmetricNormingFunction> {
    let s = spec.trim();
    match s {
        "phi1" => return Ok(SymmetricNormingFunction::ExtremalOne),
        "phiinf" => return Ok(SymmetricNormingFunction::ExtremalInfinity),
        _ => {}
    }
    let body = s.strip_prefix("eps:").ok_or_else(|| err(s, "unknown norming function spec"))?;
    let kv = key_values(body, &["a", "p", "n"], s)?;
    let a = parse_real(lookup(&kv, "a").ok_or_else(|| err(s, "missing a"))?)?;
    let weights = power_weights(a, weight_len(&kv, s)?)?;
    match lookup(&kv, "p") {
        Some(p) => SymmetricNormingFunction::convexified(weights, parse_real(p)?),
        None => Ok(SymmetricNormingFunction::weighted(weights)),
    }
}

pub fn parse_space(spec: &str) -> Result<SequenceSpaceDescriptor> {
    let s = spec.trim();
    if let Some(p) = s.strip_prefix("lp:") {
        return SequenceSpaceDescriptor::lp(parse_real(p)?);
    }
    if let Some(rest) = s.strip_prefix("lm:") {
        let (q, phi) = rest.split_once(':').ok_or_else(|| err(s, "expected lm:<q>:<function>"))?;
        return SequenceSpaceDescriptor::lorentz_marcinkiewicz(parse_boyd(phi)?, parse_real(q)?);
    }
    if let Some(rest) = s.strip_prefix("snf:") {
        return Ok(SequenceSpaceDescriptor::PhiType(parse_snf(rest)?));
    }
    Err(err(s, "unknown space spec"))
}
