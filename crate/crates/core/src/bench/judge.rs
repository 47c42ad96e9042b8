use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{AnswerKey, BenchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Infected,
    Clean,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Infected => "infected",
            Label::Clean => "clean",
        })
    }
}

impl FromStr for Label {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "infected" => Ok(Label::Infected),
            "clean" => Ok(Label::Clean),
            other => Err(BenchError::Submission(format!(
                "label `{other}` is neither `infected` nor `clean`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submission {
    pub set_name: String,
    pub submitter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub verdicts: BTreeMap<String, Label>,
}

impl Submission {
    /// Builds a submission, rejecting repeated ids.
    pub fn from_rows(
        set_name: impl Into<String>,
        submitter: impl Into<String>,
        rows: impl IntoIterator<Item = (String, Label)>,
    ) -> Result<Submission, BenchError> {
        let mut verdicts = BTreeMap::new();
        for (id, label) in rows {
            if verdicts.insert(id.clone(), label).is_some() {
                return Err(BenchError::Submission(format!(
                    "duplicate verdict for `{id}`"
                )));
            }
        }
        Ok(Submission {
            set_name: set_name.into(),
            submitter: submitter.into(),
            timestamp: None,
            verdicts,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenBreakdown {
    pub golden: String,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Per-entry truth, only reported once a key is public.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryTruth {
    pub id: String,
    pub k: u8,
    pub verdict: Label,
    pub golden: String,
    pub recipe: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub set_name: String,
    pub submitter: String,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// FP / (FP + TN), 0 when there are no clean entries.
    pub fp_rate: f64,
    /// FN / (FN + TP), 0 when there are no infected entries.
    pub fn_rate: f64,
    pub alpha: f64,
    pub conf_val: f64,
    pub per_golden: Vec<GoldenBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<EntryTruth>>,
}

impl ConfusionReport {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Confidence value (1 - FP rate) / (1/α + FN rate); α weighs a missed
/// Trojan against a false alarm.
pub fn conf_val(fp_rate: f64, fn_rate: f64, alpha: f64) -> Result<f64, BenchError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(BenchError::Alpha(alpha));
    }
    Ok((1.0 - fp_rate) / (1.0 / alpha + fn_rate))
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores `sub` against `key`. The submission must cover every entry of the
/// key exactly once.
pub fn score_submission(
    sub: &Submission,
    key: &AnswerKey,
    alpha: f64,
) -> Result<ConfusionReport, BenchError> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(BenchError::Alpha(alpha));
    }
    if sub.set_name != key.set_name {
        return Err(BenchError::Submission(format!(
            "submission is for `{}`, key is for `{}`",
            sub.set_name, key.set_name
        )));
    }
    let known: HashSet<&str> = key.entries.iter().map(|e| e.id.as_str()).collect();
    let unknown: Vec<&str> = sub
        .verdicts
        .keys()
        .map(String::as_str)
        .filter(|id| !known.contains(id))
        .collect();
    if !unknown.is_empty() {
        return Err(BenchError::Submission(format!(
            "unknown ids: {}",
            unknown.join(", ")
        )));
    }
    let missing: Vec<&str> = key
        .entries
        .iter()
        .map(|e| e.id.as_str())
        .filter(|id| !sub.verdicts.contains_key(*id))
        .collect();
    if !missing.is_empty() {
        return Err(BenchError::Submission(format!(
            "missing verdicts for: {}",
            missing.join(", ")
        )));
    }

    let mut per: BTreeMap<usize, GoldenBreakdown> = BTreeMap::new();
    let mut truth = Vec::with_capacity(key.entries.len());
    for e in &key.entries {
        let verdict = sub.verdicts[&e.id];
        let b = per
            .entry(e.golden_index)
            .or_insert_with(|| GoldenBreakdown {
                golden: e.golden.clone(),
                ..Default::default()
            });
        match (e.k == 1, verdict) {
            (true, Label::Infected) => b.tp += 1,
            (true, Label::Clean) => b.fn_ += 1,
            (false, Label::Infected) => b.fp += 1,
            (false, Label::Clean) => b.tn += 1,
        }
        truth.push(EntryTruth {
            id: e.id.clone(),
            k: e.k,
            verdict,
            golden: e.golden.clone(),
            recipe: e.recipe,
        });
    }
    let per_golden: Vec<GoldenBreakdown> = per.into_values().collect();
    let sum = |f: fn(&GoldenBreakdown) -> usize| per_golden.iter().map(f).sum::<usize>();
    let (tp, tn, fp, fn_) = (sum(|b| b.tp), sum(|b| b.tn), sum(|b| b.fp), sum(|b| b.fn_));
    let fp_rate = rate(fp, fp + tn);
    let fn_rate = rate(fn_, fn_ + tp);
    Ok(ConfusionReport {
        set_name: key.set_name.clone(),
        submitter: sub.submitter.clone(),
        tp,
        tn,
        fp,
        fn_,
        fp_rate,
        fn_rate,
        alpha,
        conf_val: conf_val(fp_rate, fn_rate, alpha)?,
        per_golden,
        entries: key.expired.then_some(truth),
    })
}

/// Judging cadence: reports are released on the first day of each month
/// until the set expires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPolicy {
    pub expiry: NaiveDate,
}

impl WindowPolicy {
    pub fn of(key: &AnswerKey) -> Self {
        WindowPolicy { expiry: key.expiry }
    }

    /// The release date for a submission received on `day`.
    pub fn release_date(&self, day: NaiveDate) -> NaiveDate {
        if day.day() == 1 {
            day
        } else {
            day.with_day(1)
                .expect("day 1 exists")
                .checked_add_months(Months::new(1))
                .expect("date in range")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Judged {
    Released {
        report: ConfusionReport,
    },
    Deferred {
        received: NaiveDate,
        release: NaiveDate,
    },
}

/// Scores the submission if `today` is a release day, otherwise returns a
/// receipt naming the next release day.
pub fn judge_window(
    policy: &WindowPolicy,
    sub: &Submission,
    key: &AnswerKey,
    alpha: f64,
    today: NaiveDate,
) -> Result<Judged, BenchError> {
    if today > policy.expiry {
        return Err(BenchError::Retired(policy.expiry));
    }
    // validate now so a malformed submission is not queued for a month
    let report = score_submission(sub, key, alpha)?;
    let release = policy.release_date(today);
    if release == today {
        Ok(Judged::Released { report })
    } else {
        Ok(Judged::Deferred {
            received: today,
            release,
        })
    }
}

/// The public form of a retired key.
pub fn export_key(key: &AnswerKey, today: NaiveDate) -> Result<AnswerKey, BenchError> {
    if today <= key.expiry {
        return Err(BenchError::Sealed(key.expiry));
    }
    Ok(AnswerKey {
        expired: true,
        ..key.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confidence_value_cases() {
        assert_eq!(conf_val(0.0, 0.0, 10.0).unwrap(), 10.0);
        assert_eq!(conf_val(0.2, 0.3, 10.0).unwrap(), 2.0);
        assert_eq!(conf_val(1.0, 0.0, 10.0).unwrap(), 0.0);
        assert!(conf_val(0.0, 0.0, 0.0).is_err());
        assert!(conf_val(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn release_days() {
        let p = WindowPolicy {
            expiry: NaiveDate::from_ymd_opt(2029, 1, 1).unwrap(),
        };
        let d = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
        assert_eq!(p.release_date(d(2026, 3, 1)), d(2026, 3, 1));
        assert_eq!(p.release_date(d(2026, 3, 17)), d(2026, 4, 1));
        assert_eq!(p.release_date(d(2026, 12, 31)), d(2027, 1, 1));
    }

    #[test]
    fn duplicate_rows_rejected() {
        let rows = vec![
            ("c1".to_string(), Label::Clean),
            ("c1".to_string(), Label::Infected),
        ];
        assert!(Submission::from_rows("s", "me", rows).is_err());
        assert!("maybe".parse::<Label>().is_err());
    }
}
