//! Calendar-day helpers. The simulator's clock ticks once per day.

pub use chrono::NaiveDate as Date;
use chrono::{Datelike, Duration};

/// Parses `YYYY-MM-DD`.
pub fn parse_day(s: &str) -> Option<Date> {
    let mut parts = s.splitn(3, '-');
    let y = parts.next()?;
    let m = parts.next()?;
    let d = parts.next()?;
    if y.len() != 4 || m.len() != 2 || d.len() != 2 {
        return None;
    }
    Date::from_ymd_opt(y.parse().ok()?, m.parse().ok()?, d.parse().ok()?)
}

pub fn add_days(date: Date, days: i64) -> Date {
    date + Duration::days(days)
}

/// Signed day count `to - from`.
pub fn days_between(from: Date, to: Date) -> i64 {
    (to - from).num_days()
}

/// Completed years between `birth` and `on` (negative before birth).
pub fn full_years(birth: Date, on: Date) -> i32 {
    let mut years = on.year() - birth.year();
    if (on.month(), on.day()) < (birth.month(), birth.day()) {
        years -= 1;
    }
    years
}

/// Completed months between `birth` and `on`.
pub fn full_months(birth: Date, on: Date) -> i32 {
    let mut months = (on.year() - birth.year()) * 12 + on.month() as i32 - birth.month() as i32;
    if on.day() < birth.day() {
        months -= 1;
    }
    months
}

/// The same calendar day `years` earlier, clamping Feb 29 to Feb 28.
pub fn years_before(date: Date, years: i32) -> Date {
    let y = date.year() - years;
    Date::from_ymd_opt(y, date.month(), date.day())
        .or_else(|| Date::from_ymd_opt(y, date.month(), 28))
        .expect("valid clamped date")
}

pub fn last_day_of_month(year: i32, month: u32) -> Date {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    Date::from_ymd_opt(ny, nm, 1).expect("valid month") - Duration::days(1)
}
