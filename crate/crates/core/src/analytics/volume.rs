use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::text::RawRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeSeries {
    pub corpus: String,
    pub days: BTreeMap<NaiveDate, u64>,
    pub missing_timestamps: u64,
}

/// Raw records per calendar day for one corpus.
pub fn daily_volume(records: &[RawRecord], corpus: &str) -> VolumeSeries {
    let mut series = VolumeSeries {
        corpus: corpus.to_string(),
        days: BTreeMap::new(),
        missing_timestamps: 0,
    };
    for r in records.iter().filter(|r| r.corpus == corpus) {
        match r.timestamp {
            Some(day) => *series.days.entry(day).or_default() += 1,
            None => series.missing_timestamps += 1,
        }
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, corpus: &str, day: Option<&str>) -> RawRecord {
        RawRecord {
            id: id.into(),
            text: String::new(),
            corpus: corpus.into(),
            seed_code: None,
            timestamp: day.map(|d| d.parse().unwrap()),
            stratum: None,
        }
    }

    #[test]
    fn counts_per_day() {
        let records = vec![
            rec("1", "tw", Some("2013-09-22")),
            rec("2", "tw", Some("2013-09-22")),
            rec("3", "tw", Some("2013-09-22")),
            rec("4", "tw", Some("2013-09-21")),
            rec("5", "tw", None),
            rec("6", "fb", Some("2013-09-22")),
        ];
        let s = daily_volume(&records, "tw");
        assert_eq!(s.days[&"2013-09-22".parse().unwrap()], 3);
        assert_eq!(s.days.len(), 2);
        assert_eq!(s.missing_timestamps, 1);
        assert!(daily_volume(&records, "none").days.is_empty());
    }
}
