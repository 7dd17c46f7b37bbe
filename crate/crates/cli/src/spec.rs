//! Parsing of symbol and self-map specifications.

use std::f64::consts::PI;

use wco_core::{Complex64, Moebius, Series};

/// `0.5`, `-2`, `0.3i`, `1-0.5i`, `i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty number".into());
    }
    let bad = || format!("cannot parse complex number `{s}`");
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re = re.parse::<f64>().map_err(|_| bad())?;
        return finite(Complex64::new(re, im)).ok_or_else(bad);
    }
    let re = t.parse::<f64>().map_err(|_| bad())?;
    finite(Complex64::new(re, 0.0)).ok_or_else(bad)
}

fn finite(z: Complex64) -> Option<Complex64> {
    z.is_finite().then_some(z)
}

pub fn parse_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| format!("cannot parse number `{s}`"))
}

/// `Σ_{k≥2} zᵏ/(k (log k)^{3/4})`: in the Dirichlet space but not a multiplier.
pub fn loglacunary(order: usize) -> Series {
    let mut c = vec![0.0; order.max(2) + 1];
    for (k, v) in c.iter_mut().enumerate().skip(2) {
        let kf = k as f64;
        *v = 1.0 / (kf * kf.ln().powf(0.75));
    }
    Series::from_real(&c[..=order]).expect("finite coefficients")
}

/// Coefficient list `2,1`, quotient `2,1/2` (numerator/denominator
/// coefficients), or preset name `loglacunary`.
pub fn parse_symbol(s: &str, order: usize) -> Result<Series, String> {
    let s = s.trim();
    if s == "loglacunary" {
        return Ok(loglacunary(order));
    }
    let series = match s.split_once('/') {
        Some((num, den)) => {
            let num = Series::new(parse_list(num)?).map_err(|e| e.to_string())?;
            let den = Series::new(parse_list(den)?).map_err(|e| e.to_string())?;
            if den.coeff(0) == Complex64::new(0.0, 0.0) {
                return Err(format!("denominator of `{s}` vanishes at 0"));
            }
            num.div_trunc(&den, order).map_err(|e| e.to_string())?
        }
        None => Series::new(parse_list(s)?).map_err(|e| e.to_string())?,
    };
    if series.order() > order {
        return Ok(series.truncate(order));
    }
    Ok(series)
}

/// Self-map specifications:
/// `identity`, `rotation:θ`, `rotation-turns:p/q` (or a decimal),
/// `auto:p,θ` for `e^{iθ}(p − z)/(1 − p̄z)`, `parabolic:y`, `hyperbolic:μ`,
/// and `half` for `(1 − z)/2`.
pub fn parse_phi(s: &str) -> Result<Moebius, String> {
    let s = s.trim();
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let err = |e: wco_core::Error| e.to_string();
    match kind {
        "identity" | "id" => Ok(Moebius::identity()),
        "half" => Moebius::new(
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .map_err(err),
        "rotation" => Ok(Moebius::rotation(parse_real(arg)?)),
        "rotation-turns" => {
            let turns = match arg.split_once('/') {
                Some((p, q)) => {
                    let q = parse_real(q)?;
                    if q == 0.0 {
                        return Err("zero denominator in rotation-turns".into());
                    }
                    parse_real(p)? / q
                }
                None => parse_real(arg)?,
            };
            Ok(Moebius::rotation(2.0 * PI * turns))
        }
        "auto" => {
            let (p, theta) = arg
                .split_once(',')
                .ok_or_else(|| format!("expected auto:p,theta, got `{s}`"))?;
            Moebius::disc_automorphism(parse_complex(p)?, parse_real(theta)?).map_err(err)
        }
        "parabolic" => Moebius::parabolic_normal_form(parse_real(arg)?, 1).map_err(err),
        "hyperbolic" => Moebius::hyperbolic_normal_form(parse_real(arg)?, 1).map_err(err),
        _ => Err(format!("unknown self-map `{s}`")),
    }
}

/// Comma-separated unsigned integers, a dyadic range `a..b`, or every
/// integer in `a..=b`.
pub fn parse_counts(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..=") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
        if a > b {
            return Err(format!("bad range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
        if a == 0 || a > b {
            return Err(format!("bad range `{s}`"));
        }
        let mut out = Vec::new();
        let mut k = a;
        while k <= b {
            out.push(k);
            k *= 2;
        }
        return Ok(out);
    }
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad integer `{x}`")))
        .collect()
}
