//! Turning command-line text into maps and run settings.

use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;

use deckgroup_core::{BicriticalMap, MoebiusMap, Tolerance};

use crate::error::{CliError, Result};

/// Parses `re+imi`, `re`, `imi`, `i`, `-i` or a JSON array `[re, im]`.
pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if s.starts_with('[') {
        let [re, im]: [f64; 2] =
            serde_json::from_str(&s).map_err(|e| format!("bad complex array `{text}`: {e}"))?;
        return Ok(Complex64::new(re, im));
    }
    let number = |t: &str| t.parse::<f64>().map_err(|_| format!("bad complex literal `{text}`"));
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(number(&s)?, 0.0));
    };
    // The sign separating the parts is the last one not opening the literal
    // and not belonging to an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| matches!(bytes[j], b'+' | b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (number(&body[..j])?, &body[j..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => number(t)?,
    };
    Ok(Complex64::new(re, im))
}

/// Splits on commas outside brackets, so `[1,0],[0,1]` has two items.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (j, ch) in text.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..j]);
                start = j + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// The four coefficients `α, β, γ, δ` of `(α z^d + β)/(γ z^d + δ)`.
pub fn parse_coefficients(text: &str) -> Result<[Complex64; 4]> {
    let parts = split_top_level(text);
    if parts.len() != 4 {
        return Err(CliError::input(
            "--normal-form",
            format!("expected 4 comma-separated coefficients, got {}", parts.len()),
        ));
    }
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (j, (slot, part)) in out.iter_mut().zip(parts).enumerate() {
        let name = ["alpha", "beta", "gamma", "delta"][j];
        *slot = parse_complex(part).map_err(|m| CliError::input(format!("--normal-form {name}"), m))?;
    }
    Ok(out)
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn json_argument<T: DeserializeOwned>(field: &str, arg: &str) -> Result<T> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') {
        (trimmed.to_string(), "inline JSON".to_string())
    } else {
        let text = std::fs::read_to_string(Path::new(arg))
            .map_err(|e| CliError::input(field, format!("cannot read `{arg}`: {e}")))?;
        (text, format!("file `{arg}`"))
    };
    serde_json::from_str(&text).map_err(|e| CliError::input(field, format!("{origin}: {e}")))
}

/// Map selection flags, exactly as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct MapSpec {
    pub normal_form: Option<String>,
    pub degree: Option<u32>,
    pub pre: Option<String>,
    pub post: Option<String>,
    pub map: Option<String>,
}

impl MapSpec {
    pub fn normal_form(coefficients: &str, degree: u32) -> Self {
        MapSpec { normal_form: Some(coefficients.into()), degree: Some(degree), ..Default::default() }
    }

    pub fn build(&self) -> Result<BicriticalMap> {
        if let Some(map) = &self.map {
            if self.normal_form.is_some() || self.pre.is_some() || self.post.is_some() {
                return Err(CliError::input("--map", "cannot be combined with --normal-form, --pre or --post"));
            }
            if self.degree.is_some() {
                return Err(CliError::input("--degree", "the degree is part of the --map document"));
            }
            return json_argument("--map", map);
        }
        let degree = self.degree.ok_or_else(|| CliError::input("--degree", "required"))?;
        if let Some(nf) = &self.normal_form {
            if self.pre.is_some() || self.post.is_some() {
                return Err(CliError::input("--normal-form", "cannot be combined with --pre or --post"));
            }
            let [a, b, c, d] = parse_coefficients(nf)?;
            return Ok(BicriticalMap::from_normal_form(a, b, c, d, degree)?);
        }
        if self.pre.is_none() && self.post.is_none() {
            return Err(CliError::input("map", "give --normal-form, --pre/--post or --map"));
        }
        let factor = |field: &str, arg: &Option<String>| -> Result<MoebiusMap> {
            arg.as_deref().map_or(Ok(MoebiusMap::IDENTITY), |a| json_argument(field, a))
        };
        let pre = factor("--pre", &self.pre)?;
        let post = factor("--post", &self.post)?;
        Ok(BicriticalMap::new(pre, degree, post)?)
    }
}

/// Default tolerance with the optional overrides applied and checked.
pub fn tolerance(eps: Option<f64>, seed: Option<u64>) -> Result<Tolerance> {
    let mut tol = Tolerance::default();
    if let Some(eps) = eps {
        tol.eps = eps;
    }
    if let Some(seed) = seed {
        tol.rng_seed = seed;
    }
    tol.validated().map_err(|e| CliError::input("--eps", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("+i", c(0.0, 1.0)),
            ("2", c(2.0, 0.0)),
            ("-1.5", c(-1.5, 0.0)),
            ("3i", c(0.0, 3.0)),
            ("1+2i", c(1.0, 2.0)),
            ("1-i", c(1.0, -1.0)),
            ("-0.5-0.25i", c(-0.5, -0.25)),
            ("1e-3+2E+1i", c(1e-3, 20.0)),
            ("2e-1i", c(0.0, 0.2)),
            ("[0.5, -2]", c(0.5, -2.0)),
            (" 1 + i ", c(1.0, 1.0)),
        ];
        for (text, want) in cases {
            assert_eq!(parse_complex(text), Ok(want), "{text}");
        }
        for bad in ["", "x", "1+", "ii", "[1]", "1+2j"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn coefficient_lists() {
        assert_eq!(parse_coefficients("1,-1,1,i").unwrap()[3], c(0.0, 1.0));
        assert_eq!(parse_coefficients("[1,0],[-1,0],[1,0],[0,1]").unwrap()[3], c(0.0, 1.0));
        let err = parse_coefficients("1,-1,1").unwrap_err();
        assert!(err.to_string().contains("expected 4"));
        let err = parse_coefficients("1,-1,q,1").unwrap_err();
        assert!(err.to_string().starts_with("--normal-form gamma"), "{err}");
    }

    #[test]
    fn map_specs() {
        let g = MapSpec::normal_form("1,-1,1,1", 2).build().unwrap();
        assert_eq!(g.degree(), 2);
        let singular = MapSpec::normal_form("1,1,1,1", 3).build().unwrap_err();
        assert_eq!(singular.exit_code(), 1);
        assert!(MapSpec { degree: Some(2), ..Default::default() }.build().is_err());

        let post = r#"{"a":[1,0],"b":[-1,0],"c":[1,0],"d":[1,0]}"#;
        let factored = MapSpec { degree: Some(2), post: Some(post.into()), ..Default::default() }.build().unwrap();
        assert!(factored.critical_values().approx_eq(&g.critical_values(), 1e-12));

        let broken = MapSpec { degree: Some(2), pre: Some("{\"a\": [1,0],\n \"b\": }".into()), ..Default::default() };
        let msg = broken.build().unwrap_err().to_string();
        assert!(msg.starts_with("--pre: inline JSON") && msg.contains("line 2"), "{msg}");

        let json = r#"{"normal_form":{"alpha":[1,0],"beta":[-1,0],"gamma":[1,0],"delta":[0,1],"d":4}}"#;
        let f = MapSpec { map: Some(json.into()), ..Default::default() }.build().unwrap();
        assert_eq!(f.degree(), 4);
        let missing = MapSpec { map: Some("/nonexistent/map.json".into()), ..Default::default() };
        assert!(missing.build().unwrap_err().to_string().contains("cannot read"));
    }

    #[test]
    fn tolerance_overrides() {
        assert_eq!(tolerance(Some(1e-8), Some(3)).unwrap().eps, 1e-8);
        assert_eq!(tolerance(None, Some(3)).unwrap().rng_seed, 3);
        assert!(tolerance(Some(-1.0), None).is_err());
    }
}
