//! Fixed 365-day calendar: no leap years, standard month lengths, hours
//! indexed 0..8759 starting January 1st 00:00.

/// Hours in one model year.
pub const HOURS_PER_YEAR: usize = 8760;

/// Days in one model year.
pub const DAYS_PER_YEAR: usize = 365;

/// Hours in each month, January through December.
pub const MONTH_HOURS: [usize; 12] = [744, 672, 744, 720, 744, 720, 744, 744, 720, 744, 720, 744];

/// First hour (0-based) of the given month (0-based).
pub fn month_start_hour(month: usize) -> usize {
    MONTH_HOURS[..month].iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_hours_cover_the_year() {
        assert_eq!(MONTH_HOURS.iter().sum::<usize>(), HOURS_PER_YEAR);
    }

    #[test]
    fn month_starts() {
        assert_eq!(month_start_hour(0), 0);
        assert_eq!(month_start_hour(1), 744);
        assert_eq!(month_start_hour(11), 8760 - 744);
    }
}
