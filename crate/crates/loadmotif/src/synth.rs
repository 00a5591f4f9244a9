//! Synthetic households with planted activities and a ground-truth log, plus
//! scoring of how well a catalog recovers the planted instances.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use loadmotif_core::evaluate::top_motifs;
use loadmotif_core::mine::MotifCatalog;
use loadmotif_core::{Dataset, DaySeries, SLOTS_PER_DAY};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityTemplate {
    pub name: String,
    /// Power added on top of the base load, one value per slot.
    pub shape: Vec<f64>,
    /// Relative amplitude jitter; the shape is scaled by `1 ± amplitude_jitter`.
    pub amplitude_jitter: f64,
    /// Start moves by up to this many slots either way.
    pub time_jitter: usize,
    pub target_slot: usize,
    /// Chance the activity happens on a given day.
    pub probability: f64,
}

impl ActivityTemplate {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Usage(format!("activity '{}': {m}", self.name)));
        if !(2..=12).contains(&self.shape.len()) {
            return bad("shape must be 2 to 12 slots long");
        }
        if self.shape.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return bad("shape values must be finite and non-negative");
        }
        if self.shape.iter().copied().fold(0.0, f64::max) < 100.0 {
            return bad("peak must be at least 100 W");
        }
        if !(0.0..=1.0).contains(&self.probability) || !(0.0..1.0).contains(&self.amplitude_jitter) {
            return bad("probability must lie in [0, 1] and amplitude jitter in [0, 1)");
        }
        if self.target_slot + self.shape.len() > SLOTS_PER_DAY {
            return bad("activity would run past midnight");
        }
        Ok(())
    }
}

/// Always-on appliance cycling on and off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fridge {
    pub period_slots: usize,
    pub on_delta: f64,
    pub duty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdProfile {
    pub id: String,
    pub base_load: f64,
    pub fridge: Option<Fridge>,
    pub noise_sd: f64,
    pub activities: Vec<ActivityTemplate>,
    /// Selects this household's random stream under the run seed.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthEntry {
    pub household: String,
    pub date: NaiveDate,
    pub activity: String,
    pub start_slot: usize,
    pub amplitude_scale: f64,
}

/// Default first day of generated data.
pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2011, 3, 1).expect("valid date")
}

/// `count` consecutive weekdays from `start` (inclusive when it is a weekday).
pub fn weekdays_from(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(count);
    let mut date = start;
    while out.len() < count {
        if !matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(date);
        }
        date = date + Days::new(1);
    }
    out
}

fn household_rng(seed: u64, profile: &HouseholdProfile) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(profile.seed);
    rng
}

fn generate_household(profile: &HouseholdProfile, dates: &[NaiveDate], seed: u64) -> (Vec<DaySeries>, Vec<TruthEntry>) {
    let mut rng = household_rng(seed, profile);
    let noise = (profile.noise_sd > 0.0).then(|| Normal::new(0.0, profile.noise_sd).expect("finite sd"));
    let fridge_phase = profile
        .fridge
        .map(|f| rng.random_range(0..f.period_slots.max(1)))
        .unwrap_or(0);
    let mut days = Vec::with_capacity(dates.len());
    let mut truth = Vec::new();

    for (day_index, &date) in dates.iter().enumerate() {
        let mut load = vec![profile.base_load; SLOTS_PER_DAY];
        if let Some(f) = profile.fridge {
            let on_slots = (f.period_slots as f64 * f.duty).round() as usize;
            for (slot, v) in load.iter_mut().enumerate() {
                let t = day_index * SLOTS_PER_DAY + slot + fridge_phase;
                if t % f.period_slots < on_slots {
                    *v += f.on_delta;
                }
            }
        }
        for activity in &profile.activities {
            let active = rng.random_bool(activity.probability);
            let jitter = activity.time_jitter as i64;
            let shift = if jitter > 0 { rng.random_range(-jitter..=jitter) } else { 0 };
            let scale = if activity.amplitude_jitter > 0.0 {
                1.0 + rng.random_range(-activity.amplitude_jitter..=activity.amplitude_jitter)
            } else {
                1.0
            };
            if !active {
                continue;
            }
            let latest = (SLOTS_PER_DAY - activity.shape.len()) as i64;
            let start = (activity.target_slot as i64 + shift).clamp(0, latest) as usize;
            for (v, s) in load[start..].iter_mut().zip(&activity.shape) {
                *v += s * scale;
            }
            truth.push(TruthEntry {
                household: profile.id.clone(),
                date,
                activity: activity.name.clone(),
                start_slot: start,
                amplitude_scale: scale,
            });
        }
        if let Some(noise) = &noise {
            for v in &mut load {
                *v = (*v + noise.sample(&mut rng)).max(0.0);
            }
        }
        days.push(DaySeries::new(profile.id.clone(), date, load).expect("generated readings are valid"));
    }
    (days, truth)
}

/// Generates `days` weekdays from `start` for every profile. The output only
/// depends on `seed` and the profiles, not on how many threads run.
pub fn generate(
    profiles: &[HouseholdProfile],
    days: usize,
    start: NaiveDate,
    seed: u64,
) -> Result<(Dataset, Vec<TruthEntry>)> {
    if days == 0 {
        return Err(Error::Usage("synthetic data needs at least one day".into()));
    }
    for p in profiles {
        if !(p.base_load >= 0.0 && p.noise_sd >= 0.0) {
            return Err(Error::Usage(format!("household '{}': base load and noise must be >= 0", p.id)));
        }
        p.activities.iter().try_for_each(ActivityTemplate::validate)?;
    }
    let dates = weekdays_from(start, days);
    let generated: Vec<_> = profiles
        .par_iter()
        .map(|p| generate_household(p, &dates, seed))
        .collect();
    let mut data = Dataset::new();
    let mut truth = Vec::new();
    for (series, log) in generated {
        for day in series {
            data.insert(day)?;
        }
        truth.extend(log);
    }
    truth.sort_by(|a, b| (&a.household, a.date, &a.activity).cmp(&(&b.household, b.date, &b.activity)));
    Ok((data, truth))
}

/// The standard test fixture: 20 households over 65 weekdays, a 15-minute
/// 1.2 kW morning pulse and a 30-minute two-level evening activity peaking at
/// 2 kW, a 100 W fridge on a 60-minute cycle and 20 W of noise.
pub fn desk_fixture(seed: u64) -> Vec<HouseholdProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|i| HouseholdProfile {
            id: format!("h{:02}", i + 1),
            base_load: rng.random_range(100.0..250.0),
            fridge: Some(Fridge {
                period_slots: 12,
                on_delta: 100.0,
                duty: 0.5,
            }),
            noise_sd: 20.0,
            activities: vec![
                ActivityTemplate {
                    name: "morning".into(),
                    shape: vec![1200.0; 3],
                    amplitude_jitter: 0.1,
                    time_jitter: 2,
                    target_slot: rng.random_range(78..=96),
                    probability: 0.85,
                },
                ActivityTemplate {
                    name: "evening".into(),
                    shape: vec![1000.0, 1000.0, 1000.0, 2000.0, 2000.0, 2000.0],
                    amplitude_jitter: 0.1,
                    time_jitter: 2,
                    target_slot: rng.random_range(204..=228),
                    probability: 0.75,
                },
            ],
            seed: i as u64,
        })
        .collect()
}

pub const DESK_DAYS: usize = 65;

pub fn write_truth(truth: &[TruthEntry], out: &mut impl Write) -> std::io::Result<()> {
    for entry in truth {
        serde_json::to_writer(&mut *out, entry)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_truth(input: impl BufRead, path: &Path) -> Result<Vec<TruthEntry>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::format(path, i + 1, e.to_string()))?);
    }
    Ok(out)
}

/// Writes `household_id,timestamp,watts` rows that ingest back to `data`.
pub fn write_readings(data: &Dataset, out: &mut impl Write) -> std::io::Result<()> {
    let config = loadmotif_core::align::AlignConfig::default();
    for (_, days) in data.households() {
        for r in loadmotif_core::align::to_raw_readings(days, &config) {
            writeln!(
                out,
                "{},{},{}",
                r.household,
                r.timestamp.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                r.power
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityRecovery {
    pub activity: String,
    pub instances: usize,
    pub recovered: usize,
    pub recall: f64,
    /// Share of the matched motifs' occurrences that land on an instance of
    /// this activity; `None` when no motif matched.
    pub precision: Option<f64>,
    /// `household/band/word` of every top motif that recovered an instance.
    pub matched_motifs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub slack: usize,
    pub top: usize,
    pub activities: Vec<ActivityRecovery>,
}

fn motif_label(household: &str, key: &loadmotif_core::mine::MotifKey) -> String {
    match key.band {
        Some(b) => format!("{household}/{b}/{}", key.word),
        None => format!("{household}/-/{}", key.word),
    }
}

/// An instance counts as recovered when an occurrence of one of its
/// household's `top` motifs starts on the same date within `slack` slots.
pub fn recovery_report(catalog: &MotifCatalog, truth: &[TruthEntry], slack: usize, top: usize) -> RecoveryReport {
    let mut activities: BTreeMap<&str, (usize, usize, BTreeSet<String>)> = BTreeMap::new();
    // (household, date) -> instances of that day
    let mut by_day: BTreeMap<(&str, NaiveDate), Vec<&TruthEntry>> = BTreeMap::new();
    for t in truth {
        by_day.entry((&t.household, t.date)).or_default().push(t);
        activities.entry(&t.activity).or_default().0 += 1;
    }
    let near = |a: usize, b: usize| a.abs_diff(b) <= slack;

    let mut matched_hits: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in truth {
        let Some(household) = catalog.households.get(&t.household) else {
            continue;
        };
        let hit = top_motifs(household, top)
            .into_iter()
            .filter(|(_, occ)| occ.iter().any(|o| o.date == t.date && near(o.start_slot, t.start_slot)))
            .map(|(key, _)| motif_label(&t.household, key))
            .collect::<Vec<_>>();
        if !hit.is_empty() {
            let entry = activities.get_mut(t.activity.as_str()).expect("activity registered");
            entry.1 += 1;
            entry.2.extend(hit);
        }
    }
    for (household_id, household) in &catalog.households {
        for (key, occurrences) in top_motifs(household, top) {
            let label = motif_label(household_id, key);
            for (activity, (_, _, matched)) in &activities {
                if !matched.contains(&label) {
                    continue;
                }
                let on_target = occurrences
                    .iter()
                    .filter(|o| {
                        by_day.get(&(household_id.as_str(), o.date)).is_some_and(|ts| {
                            ts.iter().any(|t| t.activity == *activity && near(o.start_slot, t.start_slot))
                        })
                    })
                    .count();
                let counts = matched_hits.entry(activity).or_default();
                counts.0 += on_target;
                counts.1 += occurrences.len();
            }
        }
    }

    let activities = activities
        .into_iter()
        .map(|(name, (instances, recovered, matched))| {
            let precision = matched_hits
                .get(name)
                .filter(|(_, total)| *total > 0)
                .map(|&(hits, total)| hits as f64 / total as f64);
            ActivityRecovery {
                activity: name.to_string(),
                instances,
                recovered,
                recall: if instances > 0 { recovered as f64 / instances as f64 } else { 0.0 },
                precision,
                matched_motifs: matched.into_iter().collect(),
            }
        })
        .collect();
    RecoveryReport { slack, top, activities }
}
