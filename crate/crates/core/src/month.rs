//! Calendar months (`YYYY-MM`), the granularity of all temporal analysis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month, stored as months since year 0 so ordering and
/// iteration are plain integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month(u32);

impl Month {
    pub fn new(year: u32, month: u32) -> Option<Self> {
        if !(1..=12).contains(&month) {
            return None;
        }
        Some(Month(year * 12 + (month - 1)))
    }

    pub fn year(self) -> u32 {
        self.0 / 12
    }

    pub fn month(self) -> u32 {
        self.0 % 12 + 1
    }

    pub fn next(self) -> Month {
        Month(self.0 + 1)
    }

    /// Number of months from `self` to `other` (0 when equal).
    pub fn months_until(self, other: Month) -> i64 {
        i64::from(other.0) - i64::from(self.0)
    }

    /// Iterate `self..=to` inclusive.
    pub fn range_inclusive(self, to: Month) -> impl Iterator<Item = Month> {
        (self.0..=to.0).map(Month)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year(), self.month())
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let invalid = || Error::InvalidMonth(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(invalid)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(invalid());
        }
        let year: u32 = y.parse().map_err(|_| invalid())?;
        let month: u32 = m.parse().map_err(|_| invalid())?;
        Month::new(year, month).ok_or_else(invalid)
    }
}

impl Serialize for Month {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        let m: Month = "2014-06".parse().unwrap();
        assert_eq!(m.year(), 2014);
        assert_eq!(m.month(), 6);
        assert_eq!(m.to_string(), "2014-06");
    }

    #[test]
    fn rejects_malformed() {
        assert!("2014-13".parse::<Month>().is_err());
        assert!("2014-00".parse::<Month>().is_err());
        assert!("2014".parse::<Month>().is_err());
        assert!("14-06".parse::<Month>().is_err());
        assert!("2014-6".parse::<Month>().is_err());
    }

    #[test]
    fn ordering_crosses_year_boundary() {
        let dec: Month = "2013-12".parse().unwrap();
        let jan: Month = "2014-01".parse().unwrap();
        assert!(dec < jan);
        assert_eq!(dec.next(), jan);
        assert_eq!(dec.months_until(jan), 1);
    }

    #[test]
    fn range_is_inclusive() {
        let from: Month = "2012-11".parse().unwrap();
        let to: Month = "2013-02".parse().unwrap();
        let months: Vec<String> = from.range_inclusive(to).map(|m| m.to_string()).collect();
        assert_eq!(months, ["2012-11", "2012-12", "2013-01", "2013-02"]);
    }
}
