//! Survey ingestion: study configuration, long-format response files,
//! respondent demographics and the country-of-residence filter.
//!
//! # File formats
//!
//! `responses.csv` has one row per `(respondent, candidate, prompt)`:
//!
//! ```text
//! respondent_id,ccr,attribute,candidate,prompt,raw_rating
//! MY001,MY,calm,tenang,appr,80
//! ```
//!
//! `prompt` is one of `appr, undr, asso_cw, asso_ccw, impl_cw, impl_ccw,
//! anto, bias`; `anto` and `bias` only apply to main-axis attributes.
//!
//! `respondents.csv` columns: `respondent_id, ccr, stay_outside_band,
//! ilr_zsm, ilr_eng, discipline`.
//!
//! The study configuration is TOML:
//!
//! ```toml
//! scale_min = 0.0
//! scale_max = 100.0
//! alpha = 0.05
//! country_whitelist = ["SG", "MY"]
//!
//! [attributes]
//! calm = ["menenangkan", "tenang"]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circumplex::{Axis, PaqAttribute};
use crate::scoring::{Prompt, RatingRecord};

/// Country of residence code, stored upper-case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountryCode(String);

impl CountryCode {
    pub fn new(code: &str) -> Self {
        CountryCode(code.trim().to_ascii_uppercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("row {row}: {kind}")]
    Row { row: u64, kind: RowError },
    #[error("no respondents left after filtering by country of residence")]
    EmptyRetained,
    #[error("no respondents to summarize")]
    NoRespondents,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RowError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("candidate `{candidate}` is not registered for attribute `{attribute}`")]
    UnknownCandidate { attribute: PaqAttribute, candidate: String },
    #[error("unknown prompt `{0}`")]
    UnknownPrompt(String),
    #[error("prompt `{prompt}` does not apply to {axis}-axis attribute `{attribute}`")]
    PromptNotForAxis {
        prompt: Prompt,
        attribute: PaqAttribute,
        axis: Axis,
    },
    #[error("rating `{0}` is not a number")]
    NotANumber(String),
    #[error("raw rating {value} outside scale [{min}, {max}]")]
    OutOfScale { value: f64, min: f64, max: f64 },
    #[error("duplicate rating for respondent `{respondent}`, candidate `{candidate}`, prompt `{prompt}`")]
    Duplicate {
        respondent: String,
        candidate: String,
        prompt: Prompt,
    },
    #[error("respondent `{respondent}` has missing prompt `{prompt}` for candidate `{candidate}`")]
    MissingPrompt {
        respondent: String,
        candidate: String,
        prompt: Prompt,
    },
    #[error("respondent `{respondent}` reported as both `{first}` and `{second}`")]
    InconsistentCountry {
        respondent: String,
        first: CountryCode,
        second: CountryCode,
    },
    #[error("empty field `{0}`")]
    EmptyField(&'static str),
    #[error("invalid {field} `{value}`")]
    InvalidField { field: &'static str, value: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_scale_min")]
    scale_min: f64,
    #[serde(default = "default_scale_max")]
    scale_max: f64,
    #[serde(default = "default_alpha")]
    alpha: f64,
    #[serde(default = "default_whitelist")]
    country_whitelist: Vec<String>,
    #[serde(default)]
    attributes: BTreeMap<String, Vec<String>>,
}

fn default_scale_min() -> f64 {
    0.0
}
fn default_scale_max() -> f64 {
    100.0
}
fn default_alpha() -> f64 {
    0.05
}
fn default_whitelist() -> Vec<String> {
    vec!["SG".into(), "MY".into()]
}

/// Validated study configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub scale_min: f64,
    pub scale_max: f64,
    /// Candidate registry in canonical attribute order.
    pub attributes: BTreeMap<PaqAttribute, Vec<String>>,
    pub country_whitelist: Vec<CountryCode>,
    pub alpha: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            scale_min: default_scale_min(),
            scale_max: default_scale_max(),
            attributes: BTreeMap::new(),
            country_whitelist: default_whitelist().iter().map(|c| CountryCode::new(c)).collect(),
            alpha: default_alpha(),
        }
    }
}

impl StudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, IngestError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| IngestError::Config(e.to_string()))?;
        let mut attributes = BTreeMap::new();
        for (name, candidates) in raw.attributes {
            let attribute = PaqAttribute::from_str(&name).map_err(|e| IngestError::Config(e.to_string()))?;
            if attributes.insert(attribute, candidates).is_some() {
                return Err(IngestError::Config(format!("attribute `{attribute}` listed twice")));
            }
        }
        let config = StudyConfig {
            scale_min: raw.scale_min,
            scale_max: raw.scale_max,
            attributes,
            country_whitelist: raw.country_whitelist.iter().map(|c| CountryCode::new(c)).collect(),
            alpha: raw.alpha,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, IngestError> {
        Self::from_toml_str(&read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if !(self.scale_min.is_finite() && self.scale_max.is_finite() && self.scale_max > self.scale_min) {
            return Err(IngestError::Config(format!(
                "scale_max ({}) must exceed scale_min ({})",
                self.scale_max, self.scale_min
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(IngestError::Config(format!("alpha {} outside (0, 0.5]", self.alpha)));
        }
        if self.country_whitelist.is_empty() {
            return Err(IngestError::Config("country_whitelist is empty".into()));
        }
        for (attribute, candidates) in &self.attributes {
            if candidates.is_empty() {
                return Err(IngestError::Config(format!("attribute `{attribute}` has no candidates")));
            }
            let unique: BTreeSet<&String> = candidates.iter().collect();
            if unique.len() != candidates.len() {
                return Err(IngestError::Config(format!(
                    "attribute `{attribute}` lists a candidate twice"
                )));
            }
            if candidates.iter().any(|c| c.trim().is_empty()) {
                return Err(IngestError::Config(format!("attribute `{attribute}` has an empty candidate")));
            }
        }
        Ok(())
    }

    /// Serialize back to the TOML document accepted by [`StudyConfig::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scale_min = {:?}\n", self.scale_min));
        out.push_str(&format!("scale_max = {:?}\n", self.scale_max));
        out.push_str(&format!("alpha = {:?}\n", self.alpha));
        let wl: Vec<String> = self.country_whitelist.iter().map(|c| format!("{:?}", c.as_str())).collect();
        out.push_str(&format!("country_whitelist = [{}]\n\n[attributes]\n", wl.join(", ")));
        for (attribute, candidates) in &self.attributes {
            let cs: Vec<String> = candidates.iter().map(|c| format!("{c:?}")).collect();
            out.push_str(&format!("{} = [{}]\n", attribute, cs.join(", ")));
        }
        out
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        (raw - self.scale_min) / (self.scale_max - self.scale_min)
    }

    pub fn denormalize(&self, r: f64) -> f64 {
        self.scale_min + r * (self.scale_max - self.scale_min)
    }

    pub fn is_whitelisted(&self, ccr: &CountryCode) -> bool {
        self.country_whitelist.contains(ccr)
    }
}

fn read_to_string(path: &Path) -> Result<String, IngestError> {
    std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn open(path: &Path) -> Result<std::fs::File, IngestError> {
    std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn column(headers: &csv::StringRecord, name: &'static str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or(IngestError::MissingColumn(name))
}

fn row_err(row: u64, kind: RowError) -> IngestError {
    IngestError::Row { row, kind }
}

#[derive(Default)]
struct PendingRecord {
    attribute: Option<PaqAttribute>,
    ccr: Option<CountryCode>,
    first_row: u64,
    ratings: BTreeMap<Prompt, f64>,
}

pub fn load_responses(path: &Path, config: &StudyConfig) -> Result<Vec<RatingRecord>, IngestError> {
    parse_responses(open(path)?, config)
}

/// Parse a long-format response file into validated, normalized records,
/// sorted by `(respondent_id, candidate)`.
pub fn parse_responses<R: Read>(reader: R, config: &StudyConfig) -> Result<Vec<RatingRecord>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let c_resp = column(&headers, "respondent_id")?;
    let c_ccr = column(&headers, "ccr")?;
    let c_attr = column(&headers, "attribute")?;
    let c_cand = column(&headers, "candidate")?;
    let c_prompt = column(&headers, "prompt")?;
    let c_raw = column(&headers, "raw_rating")?;

    let mut pending: BTreeMap<(String, String), PendingRecord> = BTreeMap::new();
    let mut countries: BTreeMap<String, CountryCode> = BTreeMap::new();
    for result in rdr.records() {
        let rec = result?;
        let row = rec.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, name: &'static str| -> Result<&str, IngestError> {
            match rec.get(i) {
                Some(s) if !s.is_empty() => Ok(s),
                _ => Err(row_err(row, RowError::EmptyField(name))),
            }
        };
        let respondent = field(c_resp, "respondent_id")?.to_string();
        let ccr = CountryCode::new(field(c_ccr, "ccr")?);
        let attr_name = field(c_attr, "attribute")?;
        let attribute = PaqAttribute::from_str(attr_name)
            .map_err(|_| row_err(row, RowError::UnknownAttribute(attr_name.to_string())))?;
        let candidate = field(c_cand, "candidate")?.to_string();
        let registered = config
            .attributes
            .get(&attribute)
            .is_some_and(|cs| cs.contains(&candidate));
        if !registered {
            return Err(row_err(row, RowError::UnknownCandidate { attribute, candidate }));
        }
        let prompt_name = field(c_prompt, "prompt")?;
        let prompt = Prompt::from_str(prompt_name)
            .map_err(|_| row_err(row, RowError::UnknownPrompt(prompt_name.to_string())))?;
        let axis = attribute.axis();
        if !Prompt::required_for(axis).contains(&prompt) {
            return Err(row_err(row, RowError::PromptNotForAxis { prompt, attribute, axis }));
        }
        let raw_text = field(c_raw, "raw_rating")?;
        let raw: f64 = raw_text
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| row_err(row, RowError::NotANumber(raw_text.to_string())))?;
        if raw < config.scale_min || raw > config.scale_max {
            return Err(row_err(
                row,
                RowError::OutOfScale {
                    value: raw,
                    min: config.scale_min,
                    max: config.scale_max,
                },
            ));
        }

        match countries.get(&respondent) {
            Some(first) if *first != ccr => {
                return Err(row_err(
                    row,
                    RowError::InconsistentCountry {
                        respondent,
                        first: first.clone(),
                        second: ccr,
                    },
                ))
            }
            Some(_) => {}
            None => {
                countries.insert(respondent.clone(), ccr.clone());
            }
        }

        let entry = pending.entry((respondent.clone(), candidate.clone())).or_default();
        if entry.attribute.is_none() {
            entry.attribute = Some(attribute);
            entry.ccr = Some(ccr);
            entry.first_row = row;
        }
        if entry.ratings.insert(prompt, config.normalize(raw)).is_some() {
            return Err(row_err(
                row,
                RowError::Duplicate {
                    respondent,
                    candidate,
                    prompt,
                },
            ));
        }
    }

    let mut records = Vec::with_capacity(pending.len());
    for ((respondent, candidate), p) in pending {
        let attribute = p.attribute.expect("set on first row");
        let axis = attribute.axis();
        for &prompt in Prompt::required_for(axis) {
            if !p.ratings.contains_key(&prompt) {
                return Err(row_err(
                    p.first_row,
                    RowError::MissingPrompt {
                        respondent,
                        candidate,
                        prompt,
                    },
                ));
            }
        }
        let get = |prompt| p.ratings[&prompt];
        let main = axis == Axis::Main;
        records.push(RatingRecord {
            respondent_id: respondent,
            candidate,
            attribute,
            ccr: p.ccr.expect("set on first row"),
            appr: get(Prompt::Appr),
            undr: get(Prompt::Undr),
            asso_cw: get(Prompt::AssoCw),
            asso_ccw: get(Prompt::AssoCcw),
            impl_cw: get(Prompt::ImplCw),
            impl_ccw: get(Prompt::ImplCcw),
            anto: main.then(|| get(Prompt::Anto)),
            bias: main.then(|| get(Prompt::Bias)),
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StayBand {
    Y0To1,
    Y1To5,
    Y6To10,
    Y10Plus,
}

impl StayBand {
    pub const ALL: [StayBand; 4] = [StayBand::Y0To1, StayBand::Y1To5, StayBand::Y6To10, StayBand::Y10Plus];

    pub fn code(self) -> &'static str {
        match self {
            StayBand::Y0To1 => "0-1",
            StayBand::Y1To5 => "1-5",
            StayBand::Y6To10 => "6-10",
            StayBand::Y10Plus => "10+",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            StayBand::Y0To1 => "0-1 years",
            StayBand::Y1To5 => "1-5 years",
            StayBand::Y6To10 => "6-10 years",
            StayBand::Y10Plus => "more than 10 years",
        }
    }
}

impl FromStr for StayBand {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        StayBand::ALL.iter().copied().find(|b| b.code() == s.trim()).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Discipline {
    AudioRelated,
    NonAudioHass,
    NonAudioEngr,
    NonAudioSciences,
    Others,
}

impl Discipline {
    pub const ALL: [Discipline; 5] = [
        Discipline::AudioRelated,
        Discipline::NonAudioHass,
        Discipline::NonAudioEngr,
        Discipline::NonAudioSciences,
        Discipline::Others,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Discipline::AudioRelated => "audio_related",
            Discipline::NonAudioHass => "non_audio_hass",
            Discipline::NonAudioEngr => "non_audio_engr",
            Discipline::NonAudioSciences => "non_audio_sciences",
            Discipline::Others => "others",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Discipline::AudioRelated => "Audio-related",
            Discipline::NonAudioHass => "Non-audio HASS",
            Discipline::NonAudioEngr => "Non-audio Engr.",
            Discipline::NonAudioSciences => "Non-audio Sciences",
            Discipline::Others => "Others",
        }
    }
}

impl FromStr for Discipline {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Discipline::ALL
            .iter()
            .copied()
            .find(|d| d.code().eq_ignore_ascii_case(s.trim()))
            .ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Respondent {
    pub respondent_id: String,
    pub ccr: CountryCode,
    pub stay_outside_band: StayBand,
    pub ilr_zsm: u8,
    pub ilr_eng: u8,
    pub discipline: Discipline,
}

pub fn load_respondents(path: &Path) -> Result<Vec<Respondent>, IngestError> {
    parse_respondents(open(path)?)
}

pub fn parse_respondents<R: Read>(reader: R) -> Result<Vec<Respondent>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols = [
        column(&headers, "respondent_id")?,
        column(&headers, "ccr")?,
        column(&headers, "stay_outside_band")?,
        column(&headers, "ilr_zsm")?,
        column(&headers, "ilr_eng")?,
        column(&headers, "discipline")?,
    ];
    let mut out: Vec<Respondent> = Vec::new();
    let mut seen = BTreeSet::new();
    for result in rdr.records() {
        let rec = result?;
        let row = rec.position().map(|p| p.line()).unwrap_or(0);
        let get = |i: usize| rec.get(cols[i]).unwrap_or("");
        let invalid = |field: &'static str, value: &str| {
            row_err(
                row,
                RowError::InvalidField {
                    field,
                    value: value.to_string(),
                },
            )
        };
        let ilr = |i: usize, field: &'static str| -> Result<u8, IngestError> {
            get(i)
                .parse::<u8>()
                .ok()
                .filter(|v| *v <= 5)
                .ok_or_else(|| invalid(field, get(i)))
        };
        let id = get(0);
        if id.is_empty() {
            return Err(row_err(row, RowError::EmptyField("respondent_id")));
        }
        if !seen.insert(id.to_string()) {
            return Err(invalid("respondent_id (duplicate)", id));
        }
        if get(1).is_empty() {
            return Err(row_err(row, RowError::EmptyField("ccr")));
        }
        out.push(Respondent {
            respondent_id: id.to_string(),
            ccr: CountryCode::new(get(1)),
            stay_outside_band: get(2).parse().map_err(|_| invalid("stay_outside_band", get(2)))?,
            ilr_zsm: ilr(3, "ilr_zsm")?,
            ilr_eng: ilr(4, "ilr_eng")?,
            discipline: get(5).parse().map_err(|_| invalid("discipline", get(5)))?,
        });
    }
    out.sort_by(|a, b| a.respondent_id.cmp(&b.respondent_id));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionReport {
    pub total: usize,
    pub retained: usize,
    pub excluded: usize,
    pub excluded_ids: Vec<String>,
}

impl ExclusionReport {
    pub fn excluded_percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.excluded as f64 / self.total as f64
        }
    }
}

impl fmt::Display for ExclusionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "retained {}, excluded {} ({:.2}%)",
            self.retained,
            self.excluded,
            self.excluded_percent()
        )
    }
}

/// Keep only respondents whose country of residence is whitelisted.
///
/// The respondent population is the union of ids seen in `records` and in
/// `respondents`. Returns the retained records and respondents.
pub fn filter_ccr(
    records: &[RatingRecord],
    respondents: &[Respondent],
    config: &StudyConfig,
) -> Result<(Vec<RatingRecord>, Vec<Respondent>, ExclusionReport), IngestError> {
    let mut ccr_of: BTreeMap<&str, &CountryCode> = BTreeMap::new();
    for r in respondents {
        ccr_of.insert(&r.respondent_id, &r.ccr);
    }
    for r in records {
        ccr_of.entry(&r.respondent_id).or_insert(&r.ccr);
    }
    let excluded_ids: Vec<String> = ccr_of
        .iter()
        .filter(|(_, c)| !config.is_whitelisted(c))
        .map(|(id, _)| id.to_string())
        .collect();
    let total = ccr_of.len();
    let report = ExclusionReport {
        total,
        retained: total - excluded_ids.len(),
        excluded: excluded_ids.len(),
        excluded_ids,
    };
    if report.retained == 0 {
        return Err(IngestError::EmptyRetained);
    }
    let kept_records = records
        .iter()
        .filter(|r| config.is_whitelisted(&r.ccr))
        .cloned()
        .collect();
    let kept_respondents = respondents
        .iter()
        .filter(|r| config.is_whitelisted(&r.ccr))
        .cloned()
        .collect();
    Ok((kept_records, kept_respondents, report))
}

/// One row of the demographics table: counts per column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemographicsRow {
    pub section: String,
    pub level: String,
    pub counts: Vec<usize>,
}

/// Counts by country-of-residence column.
///
/// Columns are the whitelisted countries in whitelist order, followed by an
/// `Others` column when any respondent falls outside the whitelist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemographicsSummary {
    pub columns: Vec<String>,
    pub column_totals: Vec<usize>,
    pub grand_total: usize,
    pub rows: Vec<DemographicsRow>,
}

impl DemographicsSummary {
    pub fn percent(count: usize, total: usize) -> String {
        if total == 0 {
            "-".into()
        } else {
            format!("{:.1}", 100.0 * count as f64 / total as f64)
        }
    }

    /// Plain-text table, `count (pct%)` per cell.
    pub fn render_text(&self) -> String {
        let cell = |c: usize, t: usize| format!("{} ({}%)", c, Self::percent(c, t));
        let mut lines = Vec::new();
        let mut header = vec![String::new(), String::new()];
        header.extend(self.columns.iter().cloned());
        lines.push(header);
        let mut ccr = vec!["Current country of residence".to_string(), String::new()];
        ccr.extend(self.column_totals.iter().map(|&c| cell(c, self.grand_total)));
        lines.push(ccr);
        for row in &self.rows {
            let mut line = vec![row.section.clone(), row.level.clone()];
            line.extend(row.counts.iter().zip(&self.column_totals).map(|(&c, &t)| cell(c, t)));
            lines.push(line);
        }
        let ncols = lines[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for l in lines {
            let padded: Vec<String> = l
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}", w = *w))
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

const ILR_LEVELS: [(u8, &str); 6] = [
    (5, "Native (5)"),
    (4, "Full Prof. (4)"),
    (3, "Prof. Working (3)"),
    (2, "Lim. Working (2)"),
    (1, "Elementary (1)"),
    (0, "No proficiency (0)"),
];

pub fn demographics_summary(
    respondents: &[Respondent],
    whitelist: &[CountryCode],
) -> Result<DemographicsSummary, IngestError> {
    if respondents.is_empty() {
        return Err(IngestError::NoRespondents);
    }
    let has_others = respondents.iter().any(|r| !whitelist.contains(&r.ccr));
    let mut columns: Vec<String> = whitelist.iter().map(|c| c.to_string()).collect();
    if has_others {
        columns.push("Others".into());
    }
    let column_of = |r: &Respondent| {
        whitelist
            .iter()
            .position(|c| *c == r.ccr)
            .unwrap_or(whitelist.len())
    };
    let ncol = columns.len();
    let mut column_totals = vec![0; ncol];
    for r in respondents {
        column_totals[column_of(r)] += 1;
    }
    let count_where = |pred: &dyn Fn(&Respondent) -> bool| {
        let mut counts = vec![0; ncol];
        for r in respondents.iter().filter(|r| pred(r)) {
            counts[column_of(r)] += 1;
        }
        counts
    };

    let mut rows = Vec::new();
    for band in StayBand::ALL {
        rows.push(DemographicsRow {
            section: "Length of stay outside MY/SG".into(),
            level: band.label().into(),
            counts: count_where(&|r| r.stay_outside_band == band),
        });
    }
    for (language, pick) in [("zsm", 0usize), ("eng", 1usize)] {
        for (level, label) in ILR_LEVELS {
            rows.push(DemographicsRow {
                section: format!("Language proficiency (ILR, {language})"),
                level: label.into(),
                counts: count_where(&|r| [r.ilr_zsm, r.ilr_eng][pick] == level),
            });
        }
    }
    for d in Discipline::ALL {
        rows.push(DemographicsRow {
            section: "Discipline".into(),
            level: d.label().into(),
            counts: count_where(&|r| r.discipline == d),
        });
    }
    Ok(DemographicsSummary {
        columns,
        column_totals,
        grand_total: respondents.len(),
        rows,
    })
}
