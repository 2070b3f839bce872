use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module(code: &std::ffi::CStr) {
    Python::initialize();
    Python::attach(|py| {
        let m = wrap_pymodule!(shiftlab_py::shiftlab_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("shiftlab", m).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn counts_and_membership() {
    with_module(
        c"
rows = shiftlab.count_table(2, 4, 8, 'squares')
assert (rows[2][2], rows[3][2], rows[2][3]) == (3, 13, 43)
x = shiftlab.Shift(2, 4)
assert [x.count_brute(n) for n in range(6)] == [r[3] for r in rows[:6]]
assert x.decompose('1:2 O 2:0') == ('1:2', 'O 2:0', '')
assert repr(x) == 'Shift(p=2, q=4, family=\"squares\")'
",
    );
}

#[test]
fn reports_and_certificates() {
    with_module(
        c"
import json
c = shiftlab.condition(3, 4)
assert c['verdict'] == 'fails' and (c['lhs_exact']['num'], c['lhs_exact']['den']) == ('14', '3')
cert = shiftlab.refute('log')
assert shiftlab.replay(json.dumps(cert))['passed']
cert['steps'][0]['rule']['budget'] = 0
r = shiftlab.replay(json.dumps(cert))
assert not r['passed'] and not r['steps'][1]['ok']
assert shiftlab.gap_function('0.3', 12) == 84
",
    );
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(
        c"
for f, exc in [(lambda: shiftlab.Shift(2, 1), ValueError),
               (lambda: shiftlab.Shift(2, 4).enumerate(13), RuntimeError),
               (lambda: shiftlab.gap_function('1/64', 1), OverflowError),
               (lambda: shiftlab.replay('{}'), ValueError)]:
    try:
        f()
    except exc:
        pass
    else:
        raise AssertionError(f)
",
    );
}
