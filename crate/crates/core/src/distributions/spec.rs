//! Spec-string grammar for distributions.
//!
//! ```text
//! gamma:a=<f>,b=<f>      exp:rate=<f>      uniform:lo=<f>,hi=<f>
//! bernoulli:a=<f>,b=<f>,p=<f>      halfnormal      const:value=<f>
//! trunc(<spec>;k=<int>,c5=<f>[,bump=hat|quartic|hat:<lo>:<hi>])
//! tabulated:x=<f>/<f>/...,h=<f>/<f>/...
//! ```

use std::collections::BTreeMap;
use std::fmt;

use super::{Bump, Distribution, Kind};
use crate::error::{Error, Result};

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{key}: '{raw}' is not a number")))
}

/// Splits `k=v,k=v` into a map, rejecting duplicates.
fn params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if body.trim().is_empty() {
        return Ok(out);
    }
    for item in body.split(',') {
        let Some((k, v)) = item.split_once('=') else {
            return parse_err(format!("expected key=value, got '{item}'"));
        };
        let k = k.trim().to_ascii_lowercase();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return parse_err(format!("duplicate parameter '{k}'"));
        }
    }
    Ok(out)
}

struct Params {
    map: BTreeMap<String, String>,
    family: &'static str,
}

impl Params {
    fn take(&mut self, key: &str) -> Result<String> {
        self.map
            .remove(key)
            .ok_or_else(|| Error::Parse(format!("{}: missing parameter '{key}'", self.family)))
    }

    fn num(&mut self, key: &str) -> Result<f64> {
        let raw = self.take(key)?;
        parse_f64(key, &raw)
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            return parse_err(format!("{}: unknown parameter '{k}'", self.family));
        }
        Ok(())
    }
}

pub(super) fn parse_bump(raw: &str) -> Result<Bump> {
    let raw = raw.trim().to_ascii_lowercase();
    match raw.as_str() {
        "hat" => Ok(Bump::default()),
        "quartic" => Ok(Bump::Quartic),
        _ => {
            let parts: Vec<&str> = raw.split(':').collect();
            if parts.len() == 3 && parts[0] == "hat" {
                Ok(Bump::Hat {
                    lo: parse_f64("bump lo", parts[1])?,
                    hi: parse_f64("bump hi", parts[2])?,
                })
            } else {
                parse_err(format!("unknown bump '{raw}'"))
            }
        }
    }
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split('/').map(|t| parse_f64(key, t)).collect()
}

pub(super) fn parse_spec(s: &str) -> Result<Distribution> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("trunc(") {
        let Some(inner) = rest.strip_suffix(')') else {
            return parse_err("trunc(...) is missing its closing parenthesis");
        };
        // The separating ';' is the last one outside any nested parentheses.
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ';' if depth == 0 => split = Some(i),
                _ => {}
            }
        }
        let Some(i) = split else {
            return parse_err("trunc(<spec>;k=<int>,c5=<f>) needs ';'");
        };
        let base = parse_spec(&inner[..i])?;
        let mut p = Params {
            map: params(&inner[i + 1..])?,
            family: "trunc",
        };
        let k_raw = p.take("k")?;
        let k = k_raw
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("k: '{k_raw}' is not a nonnegative integer")))?;
        let c5 = p.num("c5")?;
        let bump = match p.map.remove("bump") {
            Some(b) => parse_bump(&b)?,
            None => Bump::default(),
        };
        p.finish()?;
        return Distribution::truncate(&base, k, c5, bump);
    }
    let (family, body) = s.split_once(':').unwrap_or((s, ""));
    let family = family.trim().to_ascii_lowercase();
    let (name, ctor): (&'static str, fn(&mut Params) -> Result<Distribution>) = match family.as_str() {
        "gamma" => ("gamma", |p| {
            let (a, b) = (p.num("a")?, p.num("b")?);
            Distribution::gamma(a, b)
        }),
        "exp" | "exponential" => ("exp", |p| Distribution::exponential(p.num("rate")?)),
        "uniform" => ("uniform", |p| {
            let (lo, hi) = (p.num("lo")?, p.num("hi")?);
            Distribution::uniform(lo, hi)
        }),
        "bernoulli" => ("bernoulli", |p| {
            let (a, b, pr) = (p.num("a")?, p.num("b")?, p.num("p")?);
            Distribution::bernoulli(a, b, pr)
        }),
        "halfnormal" => ("halfnormal", |_| Ok(Distribution::half_normal())),
        "const" => ("const", |p| Distribution::constant(p.num("value")?)),
        "tabulated" => ("tabulated", |p| {
            let xs = parse_list("x", &p.take("x")?)?;
            let hs = parse_list("h", &p.take("h")?)?;
            Distribution::tabulated(xs, hs)
        }),
        "" => return parse_err("empty distribution spec"),
        other => return parse_err(format!("unknown distribution family '{other}'")),
    };
    let mut p = Params {
        map: params(body)?,
        family: name,
    };
    let d = ctor(&mut p)?;
    p.finish()?;
    Ok(d)
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join("/")
}

pub(super) fn write_spec(d: &Distribution, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match d.kind() {
        Kind::Gamma { shape, rate } => write!(f, "gamma:a={shape},b={rate}"),
        Kind::Exponential { rate } => write!(f, "exp:rate={rate}"),
        Kind::Uniform { lo, hi } => write!(f, "uniform:lo={lo},hi={hi}"),
        Kind::Bernoulli { a, b, p } => write!(f, "bernoulli:a={a},b={b},p={p}"),
        Kind::HalfNormal => write!(f, "halfnormal"),
        Kind::Constant { value } => write!(f, "const:value={value}"),
        Kind::Truncated(t) => {
            write!(f, "trunc({};k={},c5={}", t.base(), t.k(), t.c5())?;
            match t.bump() {
                Bump::Hat { lo, hi } if lo == 0.0 && hi == 1.0 => {}
                Bump::Hat { lo, hi } => write!(f, ",bump=hat:{lo}:{hi}")?,
                Bump::Quartic => write!(f, ",bump=quartic")?,
            }
            write!(f, ")")
        }
        Kind::Tabulated(t) => write!(f, "tabulated:x={},h={}", join(t.nodes()), join(t.densities())),
    }
}

impl std::str::FromStr for Bump {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_bump(s)
    }
}

impl std::fmt::Display for Bump {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Bump::Hat { lo, hi } if lo == 0.0 && hi == 1.0 => write!(f, "hat"),
            Bump::Hat { lo, hi } => write!(f, "hat:{lo}:{hi}"),
            Bump::Quartic => write!(f, "quartic"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        for s in [
            "gamma:a=0.5,b=2",
            "exp:rate=1",
            "uniform:lo=1,hi=2",
            "bernoulli:a=1,b=2,p=0.5",
            "halfnormal",
            "const:value=1",
            "trunc(exp:rate=1;k=100,c5=8)",
            "trunc(trunc(exp:rate=1;k=100,c5=8);k=50,c5=2,bump=quartic)",
            "trunc(gamma:a=2,b=1;k=10,c5=1,bump=hat:0.25:0.75)",
        ] {
            let d: Distribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
    }

    #[test]
    fn tabulated_display_is_normalised() {
        let d: Distribution = "tabulated:x=0/1/2,h=0/2/0".parse().unwrap();
        assert_eq!(d.to_string(), "tabulated:x=0/1/2,h=0/1/0");
        let again: Distribution = d.to_string().parse().unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn rejects_malformed_specs() {
        for s in [
            "",
            "gamma:a=1",
            "gamma:a=1,b=1,c=2",
            "gamma:a=1,a=2,b=1",
            "exp:rate=abc",
            "weibull:k=1",
            "trunc(exp:rate=1,k=100)",
            "trunc(exp:rate=1;k=1.5,c5=1)",
            "trunc(exp:rate=1;k=10,c5=1,bump=triangle)",
        ] {
            assert!(s.parse::<Distribution>().is_err(), "{s} should fail");
        }
    }

    #[test]
    fn parameter_errors_surface_as_domain_errors() {
        assert!(matches!("exp:rate=-1".parse::<Distribution>(), Err(Error::Domain(_))));
        assert!(matches!(
            "trunc(exp:rate=1;k=10,c5=1,bump=hat:0.5:1.5)".parse::<Distribution>(),
            Err(Error::Domain(_))
        ));
    }
}
