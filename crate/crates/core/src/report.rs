//! Result tables: mean scores, cross-national tests, Mann-Whitney posthoc,
//! intra-country tests and (optionally) the combined-population tests.
//!
//! Every numeric cell keeps its full-precision value next to the display
//! string. Display rules:
//!
//! - means: 3 decimals.
//! - p-values: 3 decimals; 4 decimals for `1e-4 <= p < 1e-3`; below `1e-4`
//!   one significant digit in scientific form (`3e-07`). If rounding would
//!   move a p-value across a star threshold, decimals are added until the
//!   displayed value carries the same stars as the exact one.
//! - stars: `**` for p < 0.01, `*` for 0.01 <= p < 0.05, written before the
//!   number.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::ingest::CountryCode;
use crate::pipeline::{CandidateTest, Outcome, StudyResult};
use crate::ranktests::TestResult;
use crate::scoring::Criterion;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV encoding: {0}")]
    Csv(#[from] csv::Error),
}

/// Significance marker for a p-value.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

pub fn format_mean(x: f64) -> String {
    format!("{x:.3}")
}

fn scientific(p: f64, digits: usize) -> String {
    let s = format!("{p:.digits$e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, num) = exp.strip_prefix('-').map_or(("+", exp), |n| ("-", n));
            format!("{mantissa}e{sign}{num:0>2}")
        }
        None => s,
    }
}

/// Display string for a p-value; see the module docs.
pub fn format_p(p: f64) -> String {
    if p.is_nan() {
        return "NaN".into();
    }
    if p == 0.0 {
        return "0".into();
    }
    let want = stars(p);
    if p < 1e-4 {
        return scientific(p, 0);
    }
    let start = if p < 1e-3 { 4 } else { 3 };
    for decimals in start..=17 {
        let s = format!("{p:.decimals$}");
        if s.parse::<f64>().map(stars) == Ok(want) {
            return s;
        }
    }
    format!("{p:e}")
}

/// Parse a displayed p-value cell (with or without stars) back to a number.
pub fn parse_p_display(text: &str) -> Option<f64> {
    text.trim_start_matches('*').parse().ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Full-precision value; `None` for text cells.
    pub value: Option<f64>,
    pub display: String,
    pub stars: &'static str,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell {
            value: None,
            display: s.into(),
            stars: "",
        }
    }

    pub fn blank() -> Self {
        Cell::text("")
    }

    pub fn mean(x: f64) -> Self {
        Cell {
            value: Some(x),
            display: format_mean(x),
            stars: "",
        }
    }

    pub fn number(x: f64, decimals: usize) -> Self {
        Cell {
            value: Some(x),
            display: format!("{x:.decimals$}"),
            stars: "",
        }
    }

    pub fn p_value(p: f64) -> Self {
        Cell {
            value: Some(p),
            display: format_p(p),
            stars: stars(p),
        }
    }

    /// Stars followed by the display string.
    pub fn rendered(&self) -> String {
        format!("{}{}", self.stars, self.display)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTable {
    /// File stem used when writing the table.
    pub name: &'static str,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RenderedTable {
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::rendered))?;
        }
        let bytes = w.into_inner().map_err(|e| ReportError::Io {
            path: PathBuf::from("<memory>"),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells is UTF-8"))
    }

    pub fn to_markdown(&self) -> String {
        let esc = |s: &str| s.replace('|', "\\|");
        let mut out = format!("## {}\n\n", self.title);
        let _ = writeln!(out, "| {} |", self.columns.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.columns.len()));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| esc(&c.rendered())).collect();
            let _ = writeln!(out, "| {} |", cells.join(" | "));
        }
        out
    }
}

/// Criterion columns of the wide p-value tables.
pub const CRITERION_COLUMNS: [Criterion; 8] = [
    Criterion::Appr,
    Criterion::Undr,
    Criterion::Clar,
    Criterion::Orth,
    Criterion::Anto,
    Criterion::Ncon,
    Criterion::Conn,
    Criterion::Ibal,
];

fn all_countries(result: &StudyResult) -> Vec<CountryCode> {
    let mut c: Vec<CountryCode> = result.analyses.iter().flat_map(|a| a.countries.iter().cloned()).collect();
    c.sort();
    c.dedup();
    c
}

fn outcome_cell(o: &Outcome<TestResult>) -> Cell {
    match o {
        Outcome::Tested(r) => Cell::p_value(r.p_value),
        Outcome::Skipped { .. } => Cell::text("n/a"),
    }
}

/// Mean scores per attribute, criterion and candidate, pooled and per country.
pub fn render_mean_scores(result: &StudyResult) -> RenderedTable {
    let countries = all_countries(result);
    let mut columns: Vec<String> = ["attribute", "criterion", "candidate", "Combined"].map(String::from).to_vec();
    columns.extend(countries.iter().map(|c| c.to_string()));
    let mut rows = Vec::new();
    for a in &result.analyses {
        for &criterion in a.criteria() {
            for m in &a.mean_table {
                let mut row = vec![
                    Cell::text(a.attribute.name()),
                    Cell::text(criterion.label()),
                    Cell::text(&m.candidate),
                ];
                row.push(m.combined.scores.get(criterion).map_or_else(Cell::blank, Cell::mean));
                for c in &countries {
                    row.push(
                        m.by_country
                            .get(c)
                            .and_then(|s| s.scores.get(criterion))
                            .map_or_else(Cell::blank, Cell::mean),
                    );
                }
                rows.push(row);
            }
        }
    }
    RenderedTable {
        name: "mean_scores",
        title: "Mean evaluation scores (combined and per country)".into(),
        columns,
        rows,
    }
}

fn criterion_header(first: &[&str]) -> Vec<String> {
    first
        .iter()
        .map(|s| s.to_string())
        .chain(CRITERION_COLUMNS.iter().map(|c| c.label().to_string()))
        .collect()
}

/// Cross-national omnibus p-values, one row per attribute.
pub fn render_cross_national(result: &StudyResult) -> RenderedTable {
    let mut rows = Vec::new();
    for a in &result.analyses {
        let method = a
            .cross_national
            .iter()
            .find_map(|t| t.omnibus.tested().map(|r| r.method.label()))
            .unwrap_or("skipped");
        let mut row = vec![Cell::text(a.attribute.name()), Cell::text(method)];
        for c in CRITERION_COLUMNS {
            row.push(
                a.cross_national
                    .iter()
                    .find(|t| t.criterion == c)
                    .map_or_else(Cell::blank, |t| outcome_cell(&t.omnibus)),
            );
        }
        rows.push(row);
    }
    RenderedTable {
        name: "cross_national",
        title: "Cross-national tests for differences in distributions".into(),
        columns: criterion_header(&["attribute", "test"]),
        rows,
    }
}

/// Mann-Whitney posthoc comparisons, present only behind a significant omnibus.
pub fn render_posthoc_mww(result: &StudyResult) -> RenderedTable {
    let columns = ["attribute", "criterion", "candidate", "comparison", "U", "p_raw", "p_adjusted", "family_size"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for a in &result.analyses {
        for t in &a.cross_national {
            let Some(posthoc) = &t.posthoc else { continue };
            for ph in posthoc {
                let mut row = vec![
                    Cell::text(a.attribute.name()),
                    Cell::text(t.criterion.label()),
                    Cell::text(&ph.candidate),
                    Cell::text(format!("{} vs {}", ph.countries.0, ph.countries.1)),
                ];
                match &ph.outcome {
                    Outcome::Tested(r) => {
                        row.push(Cell::number(r.statistic, 1));
                        row.push(Cell::p_value(r.p_value));
                        row.push(ph.p_adjusted.map_or_else(Cell::blank, Cell::p_value));
                    }
                    Outcome::Skipped { .. } => {
                        row.extend([Cell::text("n/a"), Cell::text("n/a"), Cell::text("n/a")]);
                    }
                }
                row.push(Cell::text(t.family_size.to_string()));
                rows.push(row);
            }
        }
    }
    RenderedTable {
        name: "posthoc_mww",
        title: "Posthoc Mann-Whitney-Wilcoxon pairwise tests".into(),
        columns,
        rows,
    }
}

// Kruskal-Wallis row plus one Conover-Iman row per pair, per population.
fn candidate_test_rows(attribute: &str, label: &str, tests: &[&CandidateTest], rows: &mut Vec<Vec<Cell>>) {
    let mut row = vec![Cell::text(attribute), Cell::text(label), Cell::text("Kruskal-Wallis")];
    for c in CRITERION_COLUMNS {
        row.push(
            tests
                .iter()
                .find(|t| t.criterion == c)
                .map_or_else(Cell::blank, |t| outcome_cell(&t.omnibus)),
        );
    }
    rows.push(row);

    let mut pairs: Vec<(String, String)> = Vec::new();
    for t in tests {
        if let Some(ci) = &t.posthoc {
            for p in &ci.pairs {
                if !pairs.contains(&p.pair) {
                    pairs.push(p.pair.clone());
                }
            }
        }
    }
    for pair in pairs {
        let mut row = vec![
            Cell::text(attribute),
            Cell::text(label),
            Cell::text(format!("{} vs {}", pair.0, pair.1)),
        ];
        for c in CRITERION_COLUMNS {
            let cell = tests
                .iter()
                .find(|t| t.criterion == c)
                .and_then(|t| t.posthoc.as_ref())
                .and_then(|ci| ci.pairs.iter().find(|p| p.pair == pair))
                .map_or_else(Cell::blank, |p| Cell::p_value(p.p_adjusted));
            row.push(cell);
        }
        rows.push(row);
    }
}

fn population_tests<'a>(tests: &'a [CandidateTest], country: Option<&CountryCode>) -> Vec<&'a CandidateTest> {
    tests.iter().filter(|t| t.country.as_ref() == country).collect()
}

/// Intra-country Kruskal-Wallis p-values with Bonferroni-adjusted Conover-Iman rows.
pub fn render_intra_country(result: &StudyResult) -> RenderedTable {
    let mut rows = Vec::new();
    for a in &result.analyses {
        for country in &a.countries {
            let tests = population_tests(&a.intra_country, Some(country));
            if !tests.is_empty() {
                candidate_test_rows(a.attribute.name(), country.as_str(), &tests, &mut rows);
            }
        }
    }
    RenderedTable {
        name: "intra_country",
        title: "Kruskal-Wallis tests across candidates and posthoc Conover-Iman tests (Bonferroni-adjusted)"
            .into(),
        columns: criterion_header(&["attribute", "population", "comparison"]),
        rows,
    }
}

/// Combined-population Kruskal-Wallis and Conover-Iman, when that mode ran.
pub fn render_combined(result: &StudyResult) -> RenderedTable {
    let mut rows = Vec::new();
    for a in &result.analyses {
        let tests = population_tests(&a.combined, None);
        if !tests.is_empty() {
            candidate_test_rows(a.attribute.name(), "Combined", &tests, &mut rows);
        }
    }
    RenderedTable {
        name: "combined",
        title: "Kruskal-Wallis tests across candidates on the combined population".into(),
        columns: criterion_header(&["attribute", "population", "comparison"]),
        rows,
    }
}

/// η² and its band for every Kruskal-Wallis test across candidates.
pub fn render_effect_sizes(result: &StudyResult) -> RenderedTable {
    let columns = ["attribute", "population", "criterion", "H", "eta_squared", "band"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for a in &result.analyses {
        for t in a.intra_country.iter().chain(&a.combined) {
            let Some(r) = t.omnibus.tested() else { continue };
            let population = t.country.as_ref().map_or("Combined", |c| c.as_str());
            let (eta, band) = match r.effect_size {
                Some(e) => (Cell::number(e.eta_sq, 3), Cell::text(e.band.label())),
                None => (Cell::blank(), Cell::text(if r.is_degenerate() { "degenerate" } else { "" })),
            };
            rows.push(vec![
                Cell::text(a.attribute.name()),
                Cell::text(population),
                Cell::text(t.criterion.label()),
                Cell::number(r.statistic, 3),
                eta,
                band,
            ]);
        }
    }
    RenderedTable {
        name: "effect_sizes",
        title: "Effect sizes of the Kruskal-Wallis tests across candidates".into(),
        columns,
        rows,
    }
}

/// The three p-value tables, plus the combined table when that mode ran.
pub fn render_pvalue_tables(result: &StudyResult) -> Vec<RenderedTable> {
    let mut tables = vec![
        render_cross_national(result),
        render_posthoc_mww(result),
        render_intra_country(result),
    ];
    if result.combined_mode {
        tables.push(render_combined(result));
    }
    tables
}

/// Every table in output order.
pub fn render_all(result: &StudyResult) -> Vec<RenderedTable> {
    let mut tables = vec![render_mean_scores(result)];
    tables.extend(render_pvalue_tables(result));
    tables.push(render_effect_sizes(result));
    tables
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Markdown => "md",
        }
    }
}

/// Write every table into `dir` (created if missing), one file per table.
pub fn write_tables(result: &StudyResult, dir: &Path, format: TableFormat) -> Result<Vec<PathBuf>, ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for table in render_all(result) {
        let path = dir.join(format!("{}.{}", table.name, format.extension()));
        let body = match format {
            TableFormat::Csv => table.to_csv()?,
            TableFormat::Markdown => table.to_markdown(),
        };
        fs::write(&path, body).map_err(|source| ReportError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
