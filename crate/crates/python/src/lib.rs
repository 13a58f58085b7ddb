use pyo3::prelude::*;

#[pymodule]
fn alexandrov_py(_m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
