//! Unit-suffixed quantities such as `"75 MHz"`, `"300 kOhm"` or `"0.5 pi"`.
//!
//! Every quantity is converted once, here, into the unit the core library
//! works in (rad/s for energies, Hz for frequencies, SI otherwise).

use std::fmt;
use std::str::FromStr;

use qsteer_core::units::{self, HBAR};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::ConfigError;

/// What a quantity measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// Energies and gaps, stored in rad/s. Accepts an `E_C` unit relative to the charging energy.
    Energy,
    Frequency,
    Temperature,
    Resistance,
    Capacitance,
    Current,
    Time,
    Angle,
    Dimensionless,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Energy => "energy",
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Resistance => "resistance",
            Dimension::Capacitance => "capacitance",
            Dimension::Current => "current",
            Dimension::Time => "time",
            Dimension::Angle => "angle",
            Dimension::Dimensionless => "dimensionless",
        }
    }
}

/// A number with an optional unit, kept as written so configs echo verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub unit: Option<String>,
}

impl Quantity {
    pub fn bare(value: f64) -> Self {
        Self { value, unit: None }
    }

    pub fn with_unit(value: f64, unit: &str) -> Self {
        Self {
            value,
            unit: Some(unit.to_string()),
        }
    }

    /// Convert to the working unit of `dim`. `e_c` (rad/s) resolves the `E_C` unit.
    pub fn to_si(&self, dim: Dimension, key: &str, e_c: Option<f64>) -> Result<f64, ConfigError> {
        let bad = |reason: String| ConfigError::Unit {
            key: key.to_string(),
            text: self.to_string(),
            reason,
        };
        if !self.value.is_finite() {
            return Err(bad("value is not finite".into()));
        }
        let unit = match self.unit.as_deref() {
            None => return Ok(self.value),
            Some(u) => u,
        };
        let scale = match (dim, unit) {
            (Dimension::Energy, "E_C") => e_c.ok_or_else(|| bad("E_C is not known here".into()))?,
            (Dimension::Energy, u) => energy_scale(u).ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Frequency, u) => prefixed(u, "Hz").ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Temperature, u) => prefixed(u, "K").ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Resistance, u) => prefixed(u, "Ohm")
                .or_else(|| prefixed(u, "Ω"))
                .ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Capacitance, u) => prefixed(u, "F").ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Current, u) => prefixed(u, "A").ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Time, u) => prefixed(u, "s").ok_or_else(|| bad(format!("unknown {} unit", dim.name())))?,
            (Dimension::Angle, "rad") => 1.0,
            (Dimension::Angle, "pi") | (Dimension::Angle, "π") => std::f64::consts::PI,
            (Dimension::Angle, "deg") => std::f64::consts::PI / 180.0,
            (Dimension::Dimensionless, _) | (Dimension::Angle, _) => {
                return Err(bad(format!("unknown {} unit", dim.name())))
            }
        };
        Ok(self.value * scale)
    }
}

fn prefix(p: &str) -> Option<f64> {
    Some(match p {
        "" => 1.0,
        "T" => 1e12,
        "G" => 1e9,
        "M" => 1e6,
        "k" => 1e3,
        "m" => 1e-3,
        "u" | "µ" | "μ" => 1e-6,
        "n" => 1e-9,
        "p" => 1e-12,
        "f" => 1e-15,
        "a" => 1e-18,
        _ => return None,
    })
}

fn prefixed(unit: &str, base: &str) -> Option<f64> {
    unit.strip_suffix(base).and_then(prefix)
}

/// rad/s per unit of an energy written as temperature, frequency, joule or eV.
fn energy_scale(unit: &str) -> Option<f64> {
    if unit == "rad/s" {
        return Some(1.0);
    }
    if let Some(p) = prefixed(unit, "K") {
        return Some(units::kelvin_to_rad_s(p));
    }
    if let Some(p) = prefixed(unit, "Hz") {
        return Some(units::hz_to_rad_s(p));
    }
    if let Some(p) = prefixed(unit, "eV") {
        return Some(p * units::E_CHARGE / HBAR);
    }
    prefixed(unit, "J").map(units::joule_to_rad_s)
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.unit {
            Some(u) => write!(f, "{} {}", self.value, u),
            None => write!(f, "{}", self.value),
        }
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        // split at the first character that cannot continue a float literal
        let split = s
            .char_indices()
            .find(|&(i, c)| {
                !(c.is_ascii_digit()
                    || c == '.'
                    || c == '+'
                    || c == '-'
                    || ((c == 'e' || c == 'E') && s[i + 1..].starts_with(|d: char| d.is_ascii_digit() || d == '-' || d == '+')))
            })
            .map(|(i, _)| i)
            .unwrap_or(s.len());
        let (num, unit) = s.split_at(split);
        let value: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` does not start with a number"))?;
        let unit = unit.trim();
        Ok(if unit.is_empty() {
            Quantity::bare(value)
        } else {
            Quantity::with_unit(value, unit)
        })
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.unit {
            None => s.serialize_f64(self.value),
            Some(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Quantity;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a string like \"75 MHz\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Quantity, E> {
                Ok(Quantity::bare(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Quantity, E> {
                Ok(Quantity::bare(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Quantity, E> {
                Ok(Quantity::bare(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Quantity, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}
