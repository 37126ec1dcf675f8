use pyo3::prelude::*;

#[pyfunction]
fn probe() -> PyResult<f64> {
    Ok(1.0)
}

#[pymodule]
fn matconvex_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    Ok(())
}
