use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use weighted_rht::cli::{self, Options};
use weighted_rht::exactlin::Scalar;
use weighted_rht::graded::DegreeWindow;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs one `wrht` command on a document given as text and returns the
/// JSON report as a string.
#[pyfunction]
#[pyo3(signature = (command, text=None, window=None, arity=None, alpha=None, block=None, kind=None, dim=None))]
#[allow(clippy::too_many_arguments)]
fn run(
    command: &str,
    text: Option<&str>,
    window: Option<&str>,
    arity: Option<usize>,
    alpha: Option<&str>,
    block: Option<String>,
    kind: Option<String>,
    dim: Option<i32>,
) -> PyResult<String> {
    let window = window.map(str::parse::<DegreeWindow>).transpose().map_err(err)?;
    let alpha = alpha.map(str::parse::<Scalar>).transpose().map_err(err)?;
    let doc = text.map(cli::parse).transpose().map_err(err)?;
    let opts = Options { window, arity, alpha, block, kind, dim };
    let rep = cli::run(command, doc.as_ref(), &opts).map_err(err)?;
    Ok(rep.value.to_string())
}

/// Parses a document and prints it back in canonical form.
#[pyfunction]
fn normalize(text: &str) -> PyResult<String> {
    Ok(cli::emit(&cli::parse(text).map_err(err)?))
}

#[pymodule]
fn weighted_rht_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add("COMMANDS", cli::COMMANDS.to_vec())?;
    Ok(())
}
