//! Argument values, the optional `key = value` config file, and the
//! precedence rule: flag > config file > environment > default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use specwell::{Complex64, Family, Parity};

use crate::error::{invalid, CliError};

pub const TOL_ENV: &str = "SPECWELL_TOL";
pub const DEFAULT_TOL: f64 = 1e-10;

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown value '{other}' (expected one of: {})",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($name::$variant => $text),+ })
            }
        }
    };
}

keyword_enum!(Model { Well => "well", Delta => "delta" });
keyword_enum!(ParityArg { Even => "even", Odd => "odd" });
keyword_enum!(Center { Infinity => "infinity", Origin => "origin" });
keyword_enum!(Format { Csv => "csv", Json => "json", Svg => "svg" });
keyword_enum!(ScatterMode { Poles => "poles", Profile => "profile" });
keyword_enum!(ChartArg {
    EvenPhase => "even-phase",
    OddPhase => "odd-phase",
    OddEnergy => "odd-energy",
    DeltaEnergy => "delta-energy",
    DeltaMomentum => "delta-momentum",
});

impl ParityArg {
    pub fn parity(self) -> Parity {
        match self {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

impl Center {
    pub fn center(self) -> specwell::perturbation::SeriesCenter {
        match self {
            Center::Infinity => specwell::perturbation::SeriesCenter::Infinity,
            Center::Origin => specwell::perturbation::SeriesCenter::Origin,
        }
    }
}

pub fn family(model: Model, parity: ParityArg) -> Family {
    match (model, parity) {
        (Model::Delta, _) => Family::DeltaBarrier,
        (Model::Well, ParityArg::Even) => Family::EvenWell,
        (Model::Well, ParityArg::Odd) => Family::OddWell,
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("'{}' is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{}' is not finite", s.trim()))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',');
    let re = parse_f64(parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(p) => parse_f64(p)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("'{s}' has more than two components"));
    }
    Ok(Complex64::new(re, im))
}

/// `re,im;re,im;...` (a bare `re` means `im = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexList(pub Vec<Complex64>);

impl FromStr for ComplexList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let pts = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(parse_complex)
            .collect::<Result<Vec<_>, _>>()?;
        if pts.is_empty() {
            return Err("empty point list".into());
        }
        Ok(ComplexList(pts))
    }
}

/// A single real value or a closed range `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealSpan {
    Value(f64),
    Range(f64, f64),
}

impl FromStr for RealSpan {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None => Ok(RealSpan::Value(parse_f64(s)?)),
            Some((a, b)) => {
                let (lo, hi) = (parse_f64(a)?, parse_f64(b)?);
                if hi <= lo {
                    return Err(format!("range '{s}' must be increasing"));
                }
                Ok(RealSpan::Range(lo, hi))
            }
        }
    }
}

/// Comma-separated list of non-negative integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("'{}' is not an index", p.trim()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IndexList(v))
    }
}

/// Parsed `key = value` file.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("config line {}: expected key = value", n + 1)))?;
            let key = k.trim().to_owned();
            if values.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(invalid(format!(
                    "config line {}: duplicate key '{key}'",
                    n + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Rejects keys that the running command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(invalid(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }

    /// The flag value if given, else the parsed config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| invalid(format!("config key '{key}': {e}")))
            })
            .transpose()
    }
}

/// Resolved tolerance: flag, config, `SPECWELL_TOL`, then the default.
pub fn resolve_tol(
    flag: Option<f64>,
    file: &ConfigFile,
    env: Option<String>,
) -> Result<f64, CliError> {
    let tol = match file.pick(flag.map(Tol), "tol")? {
        Some(Tol(t)) => t,
        None => match env {
            Some(v) => {
                v.parse::<Tol>()
                    .map_err(|e| invalid(format!("{TOL_ENV}: {e}")))?
                    .0
            }
            None => DEFAULT_TOL,
        },
    };
    Ok(tol)
}

/// Positive finite tolerance.
#[derive(Debug, Clone, Copy)]
struct Tol(f64);

impl FromStr for Tol {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = parse_f64(s)?;
        if v > 0.0 {
            Ok(Tol(v))
        } else {
            Err(format!("tolerance must be positive, got {v}"))
        }
    }
}

/// A parsed number wrapper so plain numbers share the `String` error type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl FromStr for Num {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_f64(s).map(Num)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_lists() {
        let l: ComplexList = "2,0; 20 ;1.5,-0.25".parse().unwrap();
        assert_eq!(
            l.0,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(20.0, 0.0),
                Complex64::new(1.5, -0.25)
            ]
        );
        assert!("1,2,3".parse::<ComplexList>().is_err());
        assert!("nan".parse::<ComplexList>().is_err());
    }

    #[test]
    fn spans() {
        assert_eq!(
            "2:5".parse::<RealSpan>().unwrap(),
            RealSpan::Range(2.0, 5.0)
        );
        assert_eq!("3".parse::<RealSpan>().unwrap(), RealSpan::Value(3.0));
        assert!("5:2".parse::<RealSpan>().is_err());
    }

    #[test]
    fn config_precedence() {
        let f = ConfigFile::parse("# comment\nlambda = 4\nformat=json\n").unwrap();
        assert_eq!(f.pick(None::<Num>, "lambda").unwrap(), Some(Num(4.0)));
        assert_eq!(f.pick(Some(Num(7.0)), "lambda").unwrap(), Some(Num(7.0)));
        assert_eq!(
            f.pick(None::<Format>, "format").unwrap(),
            Some(Format::Json)
        );
        assert!(f.check_keys(&["lambda"]).is_err());
        assert!(f.check_keys(&["lambda", "format"]).is_ok());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
        assert!(ConfigFile::parse("novalue").is_err());
    }

    #[test]
    fn tolerance_order() {
        let empty = ConfigFile::default();
        assert_eq!(resolve_tol(None, &empty, None).unwrap(), DEFAULT_TOL);
        assert_eq!(
            resolve_tol(None, &empty, Some("1e-8".into())).unwrap(),
            1e-8
        );
        let f = ConfigFile::parse("tol = 1e-6").unwrap();
        assert_eq!(resolve_tol(None, &f, Some("1e-8".into())).unwrap(), 1e-6);
        assert_eq!(resolve_tol(Some(1e-3), &f, None).unwrap(), 1e-3);
        assert!(resolve_tol(None, &empty, Some("-1".into())).is_err());
    }
}
