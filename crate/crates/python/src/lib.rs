//! Python bindings. Test results come back as plain dicts; a study run is
//! wrapped in [`Study`] so tables can be rendered or written on demand.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use circumplex_eval::ingest::{filter_ccr, load_respondents, load_responses};
use circumplex_eval::pipeline::{run_study, AnalysisOptions, StudyResult};
use circumplex_eval::radar::{emit_radar, parse_selection, RadarFormat};
use circumplex_eval::ranktests::{self, BlockedObservation, ConoverIman, Sample, TestResult};
use circumplex_eval::report::{render_all, write_tables, TableFormat};
use circumplex_eval::scoring;
use circumplex_eval::synth::{generate, GeneratorSpec};
use circumplex_eval::{neighbors as core_neighbors, PaqAttribute, StudyConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn attribute(name: &str) -> PyResult<PaqAttribute> {
    name.parse().map_err(value_err)
}

fn samples(groups: Vec<Vec<f64>>) -> Vec<Sample> {
    groups
        .into_iter()
        .enumerate()
        .map(|(i, g)| Sample::new(i.to_string(), g))
        .collect()
}

fn result_dict<'py>(py: Python<'py>, r: &TestResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("method", r.method.label())?;
    d.set_item("statistic", r.statistic)?;
    d.set_item("df", r.df)?;
    d.set_item("p_value", r.p_value)?;
    d.set_item("degenerate", r.is_degenerate())?;
    d.set_item("flags", r.flags.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>())?;
    if let Some(es) = r.effect_size {
        d.set_item("eta_sq", es.eta_sq)?;
        d.set_item("effect_band", es.band.label())?;
    }
    Ok(d)
}

fn conover_dict<'py>(py: Python<'py>, c: &ConoverIman) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("df", c.df)?;
    d.set_item("h", c.h)?;
    let pairs = PyList::empty(py);
    for p in &c.pairs {
        let e = PyDict::new(py);
        e.set_item("pair", (p.pair.0.parse::<usize>().ok(), p.pair.1.parse::<usize>().ok()))?;
        e.set_item("statistic", p.statistic)?;
        e.set_item("p_raw", p.p_raw)?;
        e.set_item("p_adjusted", p.p_adjusted)?;
        pairs.append(e)?;
    }
    d.set_item("pairs", pairs)?;
    Ok(d)
}

// ---- circumplex

/// `(axis, cw neighbor, ccw neighbor, antipode)` of an attribute.
#[pyfunction]
fn neighbors(name: &str) -> PyResult<(String, String, String, String)> {
    let a = attribute(name)?;
    let n = core_neighbors(a);
    Ok((
        a.axis().to_string(),
        n.neighbor_cw.to_string(),
        n.neighbor_ccw.to_string(),
        n.antipode.to_string(),
    ))
}

// ---- scoring

#[pyfunction]
fn score_clarity(asso_cw: f64, asso_ccw: f64) -> PyResult<f64> {
    scoring::score_clarity(asso_cw, asso_ccw).map_err(value_err)
}

#[pyfunction]
fn score_orthogonality(bias: f64) -> PyResult<f64> {
    scoring::score_orthogonality(bias).map_err(value_err)
}

#[pyfunction]
fn score_connotativeness(impl_cw: f64, impl_ccw: f64) -> PyResult<f64> {
    scoring::score_connotativeness(impl_cw, impl_ccw).map_err(value_err)
}

#[pyfunction]
fn score_nonconnotativeness(impl_cw: f64, impl_ccw: f64) -> PyResult<f64> {
    scoring::score_nonconnotativeness(impl_cw, impl_ccw).map_err(value_err)
}

#[pyfunction]
fn score_implicative_balance(impl_cw: f64, impl_ccw: f64) -> PyResult<f64> {
    scoring::score_implicative_balance(impl_cw, impl_ccw).map_err(value_err)
}

// ---- rank tests

#[pyfunction]
fn kruskal_wallis<'py>(py: Python<'py>, groups: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let r = ranktests::kruskal_wallis(&samples(groups)).map_err(value_err)?;
    result_dict(py, &r)
}

#[pyfunction]
fn mann_whitney<'py>(py: Python<'py>, x: Vec<f64>, y: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = ranktests::mann_whitney(&Sample::new("x", x), &Sample::new("y", y)).map_err(value_err)?;
    result_dict(py, &r)
}

/// Pairs are group indices `(i, j)` with `i < j`.
#[pyfunction]
fn conover_iman<'py>(py: Python<'py>, groups: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let c = ranktests::conover_iman(&samples(groups)).map_err(value_err)?;
    conover_dict(py, &c)
}

/// One row per block, one column per treatment.
#[pyfunction]
fn friedman<'py>(py: Python<'py>, blocks: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let r = ranktests::friedman(&blocks).map_err(value_err)?;
    result_dict(py, &r)
}

/// `observations` is a list of `(block, group, value)` triples.
#[pyfunction]
fn prentice<'py>(py: Python<'py>, observations: Vec<(String, String, f64)>) -> PyResult<Bound<'py, PyDict>> {
    let obs: Vec<BlockedObservation> = observations
        .into_iter()
        .map(|(b, g, v)| BlockedObservation::new(b, g, v))
        .collect();
    let r = ranktests::prentice(&obs).map_err(value_err)?;
    result_dict(py, &r)
}

#[pyfunction]
fn chi_square_sf(x: f64, df: f64) -> f64 {
    ranktests::chi_square_sf(x, df)
}

#[pyfunction]
fn student_t_sf(t: f64, df: f64) -> f64 {
    ranktests::student_t_sf(t, df)
}

#[pyfunction]
fn normal_sf(z: f64) -> f64 {
    ranktests::normal_sf(z)
}

// ---- pipeline

/// Result of a full analysis run.
#[pyclass(frozen)]
struct Study {
    result: StudyResult,
}

fn table_format(format: &str) -> PyResult<TableFormat> {
    match format {
        "csv" => Ok(TableFormat::Csv),
        "md" | "markdown" => Ok(TableFormat::Markdown),
        other => Err(PyValueError::new_err(format!("unknown table format `{other}`"))),
    }
}

#[pymethods]
impl Study {
    #[getter]
    fn exclusion(&self) -> String {
        self.result.exclusion.to_string()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.result.alpha
    }

    #[getter]
    fn attributes(&self) -> Vec<String> {
        self.result.analyses.iter().map(|a| a.attribute.to_string()).collect()
    }

    #[getter]
    fn candidates(&self) -> BTreeMap<String, Vec<String>> {
        self.result
            .analyses
            .iter()
            .map(|a| (a.attribute.to_string(), a.candidates.clone()))
            .collect()
    }

    /// Combined-population mean of one criterion for one candidate.
    fn mean(&self, attribute_name: &str, candidate: &str, criterion: &str) -> PyResult<f64> {
        let a = attribute(attribute_name)?;
        let crit: scoring::Criterion = criterion.parse().map_err(value_err)?;
        let analysis = self
            .result
            .analysis(a)
            .ok_or_else(|| PyKeyError::new_err(format!("{a} was not analyzed")))?;
        let row = analysis
            .mean_table
            .iter()
            .find(|m| m.candidate == candidate)
            .ok_or_else(|| PyKeyError::new_err(format!("no candidate `{candidate}` for {a}")))?;
        row.combined
            .scores
            .get(crit)
            .ok_or_else(|| PyKeyError::new_err(format!("{crit} does not apply to {a}")))
    }

    /// Rendered tables keyed by file stem.
    #[pyo3(signature = (format = "csv"))]
    fn tables(&self, format: &str) -> PyResult<BTreeMap<String, String>> {
        let format = table_format(format)?;
        render_all(&self.result)
            .into_iter()
            .map(|t| {
                let body = match format {
                    TableFormat::Csv => t.to_csv().map_err(value_err)?,
                    TableFormat::Markdown => t.to_markdown(),
                };
                Ok((t.name.to_string(), body))
            })
            .collect()
    }

    #[pyo3(signature = (out_dir, format = "csv"))]
    fn write(&self, out_dir: PathBuf, format: &str) -> PyResult<Vec<PathBuf>> {
        write_tables(&self.result, &out_dir, table_format(format)?).map_err(value_err)
    }

    /// Radar data for `attr=candidate,...` as SVG or CSV text.
    #[pyo3(signature = (selection, format = "svg"))]
    fn radar(&self, selection: &str, format: &str) -> PyResult<String> {
        let format = match format {
            "svg" => RadarFormat::Svg,
            "csv" => RadarFormat::Csv,
            other => return Err(PyValueError::new_err(format!("unknown radar format `{other}`"))),
        };
        let selection = parse_selection(selection).map_err(value_err)?;
        emit_radar(&self.result, &selection, format).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Study({} attributes, alpha={}, {})",
            self.result.analyses.len(),
            self.result.alpha,
            self.result.exclusion
        )
    }
}

#[pyfunction]
#[pyo3(signature = (responses, respondents, config, alpha = None, combined = false))]
fn analyze(
    py: Python<'_>,
    responses: PathBuf,
    respondents: PathBuf,
    config: PathBuf,
    alpha: Option<f64>,
    combined: bool,
) -> PyResult<Study> {
    let config = StudyConfig::load(&config).map_err(value_err)?;
    let records = load_responses(&responses, &config).map_err(value_err)?;
    let people = load_respondents(&respondents).map_err(value_err)?;
    let options = AnalysisOptions {
        alpha: alpha.unwrap_or(config.alpha),
        combined,
    };
    let result = py
        .detach(|| run_study(&records, &people, &config, &options))
        .map_err(value_err)?;
    Ok(Study { result })
}

/// Residence-filter summary line for a pair of input files.
#[pyfunction]
fn ingest_check(responses: PathBuf, respondents: PathBuf, config: PathBuf) -> PyResult<String> {
    let config = StudyConfig::load(&config).map_err(value_err)?;
    let records = load_responses(&responses, &config).map_err(value_err)?;
    let people = load_respondents(&respondents).map_err(value_err)?;
    let (_, _, report) = filter_ccr(&records, &people, &config).map_err(value_err)?;
    Ok(report.to_string())
}

/// Write a synthetic survey; `spec` defaults to the bundled study design.
#[pyfunction]
#[pyo3(signature = (out_dir, seed = None, spec = None))]
fn synth(out_dir: PathBuf, seed: Option<u64>, spec: Option<PathBuf>) -> PyResult<()> {
    let mut spec = match spec {
        Some(path) => GeneratorSpec::load(&path).map_err(value_err)?,
        None => GeneratorSpec::study_design(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    generate(&spec).and_then(|o| o.write_to(&out_dir)).map_err(value_err)
}

#[pymodule(name = "circumplex_eval")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(neighbors, m)?)?;
    m.add_function(wrap_pyfunction!(score_clarity, m)?)?;
    m.add_function(wrap_pyfunction!(score_orthogonality, m)?)?;
    m.add_function(wrap_pyfunction!(score_connotativeness, m)?)?;
    m.add_function(wrap_pyfunction!(score_nonconnotativeness, m)?)?;
    m.add_function(wrap_pyfunction!(score_implicative_balance, m)?)?;
    m.add_function(wrap_pyfunction!(kruskal_wallis, m)?)?;
    m.add_function(wrap_pyfunction!(mann_whitney, m)?)?;
    m.add_function(wrap_pyfunction!(conover_iman, m)?)?;
    m.add_function(wrap_pyfunction!(friedman, m)?)?;
    m.add_function(wrap_pyfunction!(prentice, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square_sf, m)?)?;
    m.add_function(wrap_pyfunction!(student_t_sf, m)?)?;
    m.add_function(wrap_pyfunction!(normal_sf, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(ingest_check, m)?)?;
    m.add_function(wrap_pyfunction!(synth, m)?)?;
    m.add_class::<Study>()?;
    Ok(())
}
