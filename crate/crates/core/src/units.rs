//! Dimensioned quantities written as `"<number> <unit>"` strings, e.g.
//! `"220 um"` or `"5.8 deg"`. Values are held in SI units (radians for angles)
//! and serialized back in SI so a config survives a round trip unchanged.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

fn split_number(s: &str) -> Result<(f64, &str)> {
    let s = s.trim();
    let end = s
        .char_indices()
        .find(|&(i, c)| {
            !(c.is_ascii_digit()
                || c == '.'
                || c == '+'
                || c == '-'
                || ((c == 'e' || c == 'E')
                    && s[i + c.len_utf8()..]
                        .chars()
                        .next()
                        .is_some_and(|n| n.is_ascii_digit() || n == '-' || n == '+')))
        })
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(end);
    let value: f64 = num
        .parse()
        .map_err(|_| Error::Config(format!("cannot read a number from '{}'", s)))?;
    Ok((value, unit.trim()))
}

macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $what:literal, $si:literal, [$($unit:literal => $factor:expr),+ $(,)?]) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name(pub f64);

        impl $name {
            /// Value in SI units.
            pub fn si(self) -> f64 {
                self.0
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let (value, unit) = split_number(s)?;
                let factor: f64 = match unit {
                    $($unit => $factor,)+
                    "" => {
                        return Err(Error::Config(format!(
                            "{} '{}' needs an explicit unit (e.g. '{}')",
                            $what, s, $si
                        )))
                    }
                    other => {
                        return Err(Error::Config(format!(
                            "unknown {} unit '{}' in '{}'",
                            $what, other, s
                        )))
                    }
                };
                let v = value * factor;
                if !v.is_finite() {
                    return Err(Error::Config(format!("{} '{}' is not finite", $what, s)));
                }
                Ok($name(v))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:e} {}", self.0, $si)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(|e: Error| de::Error::custom(e.to_string()))
            }
        }
    };
}

quantity!(
    /// Length in meters.
    Length, "length", "m",
    ["m" => 1.0, "km" => 1e3, "cm" => 1e-2, "mm" => 1e-3, "um" => 1e-6, "µm" => 1e-6, "μm" => 1e-6, "nm" => 1e-9]
);

quantity!(
    /// Duration in seconds.
    Seconds, "duration", "s",
    ["s" => 1.0, "ms" => 1e-3, "us" => 1e-6, "µs" => 1e-6, "μs" => 1e-6, "ns" => 1e-9, "min" => 60.0, "h" => 3600.0]
);

quantity!(
    /// Angle in radians.
    Angle, "angle", "rad",
    ["rad" => 1.0, "mrad" => 1e-3, "deg" => std::f64::consts::PI / 180.0, "°" => std::f64::consts::PI / 180.0]
);

quantity!(
    /// Temperature difference in kelvin.
    TempDiff, "temperature difference", "K",
    ["K" => 1.0, "mK" => 1e-3, "C" => 1.0, "degC" => 1.0, "°C" => 1.0]
);

quantity!(
    /// Temperature coefficient per kelvin.
    PerKelvin, "temperature coefficient", "/K",
    ["/K" => 1.0, "1/K" => 1.0, "K^-1" => 1.0, "/degC" => 1.0]
);

quantity!(
    /// Rate in events per second.
    Rate, "rate", "Hz",
    ["Hz" => 1.0, "kHz" => 1e3, "MHz" => 1e6, "/s" => 1.0]
);

impl Angle {
    pub fn from_degrees(deg: f64) -> Self {
        Angle(deg.to_radians())
    }
}
