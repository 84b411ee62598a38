//! Respondent fixture built from the published demographics table (SG 33,
//! MY 30, 3 elsewhere). Counts and one-decimal percentages are checked cell
//! by cell against that table.

use std::path::Path;

use circumplex_eval::ingest::{demographics_summary, filter_ccr, load_respondents, DemographicsSummary};
use circumplex_eval::{CountryCode, StudyConfig};

fn fixture() -> Vec<circumplex_eval::Respondent> {
    load_respondents(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/study_respondents.csv")).unwrap()
}

fn whitelist(codes: &[&str]) -> Vec<CountryCode> {
    codes.iter().map(|c| CountryCode::new(c)).collect()
}

// (section prefix, level, [(count, published percent)] for SG, MY, Others).
// The published table leaves zero-count percentages blank; they are `None` here.
type Expected = (&'static str, &'static str, [(usize, Option<&'static str>); 3]);

const TABLE: &[Expected] = &[
    // 28/33 = 84.848...%; the published table prints 84.9
    ("Length of stay", "0-1 years", [(28, Some("84.8")), (14, Some("46.7")), (0, None)]),
    ("Length of stay", "1-5 years", [(2, Some("6.1")), (10, Some("33.3")), (1, Some("33.3"))]),
    ("Length of stay", "6-10 years", [(2, Some("6.1")), (4, Some("13.3")), (1, Some("33.3"))]),
    ("Length of stay", "more than 10 years", [(1, Some("3.0")), (2, Some("6.7")), (1, Some("33.3"))]),
    ("Language proficiency (ILR, zsm)", "Native (5)", [(15, Some("45.5")), (17, Some("56.7")), (0, None)]),
    ("Language proficiency (ILR, zsm)", "Full Prof. (4)", [(6, Some("18.2")), (4, Some("13.3")), (1, Some("33.3"))]),
    ("Language proficiency (ILR, zsm)", "Prof. Working (3)", [(8, Some("24.2")), (7, Some("23.3")), (2, Some("66.7"))]),
    ("Language proficiency (ILR, zsm)", "Lim. Working (2)", [(4, Some("12.1")), (2, Some("6.7")), (0, None)]),
    ("Language proficiency (ILR, eng)", "Native (5)", [(13, Some("39.4")), (6, Some("20.0")), (1, Some("33.3"))]),
    ("Language proficiency (ILR, eng)", "Full Prof. (4)", [(11, Some("33.3")), (10, Some("33.3")), (2, Some("66.7"))]),
    ("Language proficiency (ILR, eng)", "Prof. Working (3)", [(8, Some("24.2")), (14, Some("46.7")), (0, None)]),
    ("Language proficiency (ILR, eng)", "Lim. Working (2)", [(1, Some("3.0")), (0, None), (0, None)]),
    ("Discipline", "Audio-related", [(7, Some("21.2")), (3, Some("10.0")), (1, Some("33.3"))]),
    ("Discipline", "Non-audio HASS", [(4, Some("12.1")), (9, Some("30.0")), (1, Some("33.3"))]),
    ("Discipline", "Non-audio Engr.", [(11, Some("33.3")), (5, Some("16.7")), (0, None)]),
    ("Discipline", "Non-audio Sciences", [(6, Some("18.2")), (2, Some("6.7")), (0, None)]),
    ("Discipline", "Others", [(5, Some("15.2")), (11, Some("36.7")), (1, Some("33.3"))]),
];

#[test]
fn demographics_match_published_table() {
    let s = demographics_summary(&fixture(), &whitelist(&["SG", "MY"])).unwrap();
    assert_eq!(s.columns, vec!["SG", "MY", "Others"]);
    assert_eq!(s.column_totals, vec![33, 30, 3]);
    assert_eq!(s.grand_total, 66);
    let top: Vec<String> = s.column_totals.iter().map(|&c| DemographicsSummary::percent(c, 66)).collect();
    assert_eq!(top, vec!["50.0", "45.5", "4.5"]);

    for (section, level, cells) in TABLE {
        let row = s
            .rows
            .iter()
            .find(|r| r.section.starts_with(section) && r.level == *level)
            .unwrap_or_else(|| panic!("missing row {section} / {level}"));
        for (i, (count, pct)) in cells.iter().enumerate() {
            assert_eq!(row.counts[i], *count, "{section} / {level} column {i}");
            if let Some(pct) = pct {
                assert_eq!(&DemographicsSummary::percent(*count, s.column_totals[i]), pct, "{section} / {level}");
            }
        }
    }
    // nobody reports elementary proficiency or worse
    for r in s.rows.iter().filter(|r| r.level.ends_with("(1)") || r.level.ends_with("(0)")) {
        assert_eq!(r.counts, vec![0, 0, 0]);
    }
}

#[test]
fn residence_filter_matches_exclusion_count() {
    let people = fixture();
    let config = StudyConfig::default();
    let (_, kept, report) = filter_ccr(&[], &people, &config).unwrap();
    assert_eq!((report.total, report.retained, report.excluded), (66, 63, 3));
    assert_eq!(kept.len(), 63);
    assert_eq!(report.to_string(), "retained 63, excluded 3 (4.55%)");

    let sg_only = StudyConfig {
        country_whitelist: whitelist(&["SG"]),
        ..StudyConfig::default()
    };
    let (_, kept, report) = filter_ccr(&[], &people, &sg_only).unwrap();
    assert_eq!((kept.len(), report.excluded), (33, 33));
}
