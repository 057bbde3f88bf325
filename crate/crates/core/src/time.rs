//! Minimal UTC calendar handling: dates as days since the Unix epoch,
//! timestamps as seconds since the Unix epoch, ISO-8601 in and out.
//!
//! The day/civil conversions follow the classic era-based algorithms, so the
//! proleptic Gregorian calendar is handled exactly with integer arithmetic.

use alloc::format;
use alloc::string::String;
use core::fmt;

/// A UTC calendar date, stored as days since 1970-01-01.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UtcDate {
    days: i64,
}

/// A UTC instant with second resolution, stored as seconds since the epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp {
    secs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TimeError {
    BadDate(String),
    BadTimestamp(String),
}

impl fmt::Display for TimeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeError::BadDate(s) => write!(f, "invalid date: {s}"),
            TimeError::BadTimestamp(s) => write!(f, "invalid timestamp: {s}"),
        }
    }
}

impl core::error::Error for TimeError {}

fn is_leap(y: i32) -> bool {
    (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
}

fn days_in_month(y: i32, m: u32) -> u32 {
    match m {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap(y) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

fn days_from_civil(y: i32, m: u32, d: u32) -> i64 {
    let y = y as i64 - if m <= 2 { 1 } else { 0 };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = y - era * 400;
    let mp = if m > 2 { m - 3 } else { m + 9 } as i64;
    let doy = (153 * mp + 2) / 5 + d as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    ((y + if m <= 2 { 1 } else { 0 }) as i32, m, d)
}

impl UtcDate {
    pub fn from_days(days: i64) -> Self {
        UtcDate { days }
    }

    pub fn from_ymd(y: i32, m: u32, d: u32) -> Result<Self, TimeError> {
        if !(1..=12).contains(&m) || d == 0 || d > days_in_month(y, m) {
            return Err(TimeError::BadDate(format!("{y:04}-{m:02}-{d:02}")));
        }
        Ok(UtcDate {
            days: days_from_civil(y, m, d),
        })
    }

    /// Parses `YYYY-MM-DD`.
    pub fn parse(s: &str) -> Result<Self, TimeError> {
        let err = || TimeError::BadDate(String::from(s));
        let bytes = s.as_bytes();
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return Err(err());
        }
        let y: i32 = s[0..4].parse().map_err(|_| err())?;
        let m: u32 = s[5..7].parse().map_err(|_| err())?;
        let d: u32 = s[8..10].parse().map_err(|_| err())?;
        Self::from_ymd(y, m, d)
    }

    pub fn days(&self) -> i64 {
        self.days
    }

    pub fn ymd(&self) -> (i32, u32, u32) {
        civil_from_days(self.days)
    }

    pub fn add_days(&self, n: i64) -> Self {
        UtcDate {
            days: self.days + n,
        }
    }
}

impl fmt::Display for UtcDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = self.ymd();
        write!(f, "{y:04}-{m:02}-{d:02}")
    }
}

impl Timestamp {
    pub fn from_secs(secs: i64) -> Self {
        Timestamp { secs }
    }

    /// Parses ISO-8601 at second resolution: `YYYY-MM-DDTHH:MM:SSZ`, with
    /// `+00:00` accepted for `Z` and any fractional seconds truncated.
    pub fn parse(s: &str) -> Result<Self, TimeError> {
        let err = || TimeError::BadTimestamp(String::from(s));
        let bytes = s.as_bytes();
        if bytes.len() < 20 || (bytes[10] != b'T' && bytes[10] != b' ') {
            return Err(err());
        }
        let date = UtcDate::parse(&s[0..10]).map_err(|_| err())?;
        let time = &s[11..];
        let tb = time.as_bytes();
        if tb.len() < 9 || tb[2] != b':' || tb[5] != b':' {
            return Err(err());
        }
        let h: i64 = time[0..2].parse().map_err(|_| err())?;
        let mi: i64 = time[3..5].parse().map_err(|_| err())?;
        let sec: i64 = time[6..8].parse().map_err(|_| err())?;
        if h > 23 || mi > 59 || sec > 60 {
            return Err(err());
        }
        // leap-second inputs clamp to :59
        let sec = sec.min(59);
        let mut rest = &time[8..];
        if rest.starts_with('.') {
            let end = rest[1..]
                .find(|c: char| !c.is_ascii_digit())
                .map(|i| i + 1)
                .unwrap_or(rest.len());
            rest = &rest[end..];
        }
        match rest {
            "Z" | "z" | "+00:00" | "+0000" => {}
            _ => return Err(err()),
        }
        Ok(Timestamp {
            secs: date.days() * 86_400 + h * 3600 + mi * 60 + sec,
        })
    }

    pub fn secs(&self) -> i64 {
        self.secs
    }

    /// The UTC calendar day containing this instant.
    pub fn date(&self) -> UtcDate {
        UtcDate {
            days: self.secs.div_euclid(86_400),
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let date = self.date();
        let rem = self.secs.rem_euclid(86_400);
        let (h, mi, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);
        write!(f, "{date}T{h:02}:{mi:02}:{s:02}Z")
    }
}
