"""Smoke tests for the python bindings; runnable directly or under pytest."""

import json
import math
import tempfile

import symdiss


def test_bundled_scalar_pipeline():
    plant = symdiss.example1_system()
    assert plant.state_dim == 1
    assert plant.input_dim == 1
    assert plant.measurement_mode == "state"

    params = symdiss.example1_params("figure")
    check = symdiss.validate_state_measured(params)
    assert check.ok, check.violations

    ts = symdiss.build_abstraction(plant, params)
    assert ts.num_states == 5
    assert ts.num_inputs == 3
    assert ts.num_transitions == 27

    qsr = symdiss.QsrTriple.passivity(0.25, 0.5, 1)
    derived = symdiss.abstraction_qsr_state_measured(qsr, params.tau, 1.0)
    idx = symdiss.as_passivity_indices(derived)
    assert idx is not None
    assert math.isclose(idx.rho, 0.19, abs_tol=1e-12)
    assert math.isclose(idx.nu, 0.338, abs_tol=1e-12)

    storage = symdiss.StorageFunction.quadratic([[0.5154]], params.tau, ts.states)
    beta = symdiss.quantization_offset(storage, params.eta, params.tau)
    cert = symdiss.verify_quasi_dissipativity(ts, derived, storage, beta)
    assert cert.verdict
    assert cert.min_margin >= 0.0
    assert len(cert.margins) == ts.num_transitions

    rel = symdiss.max_ioas_relation(ts, ts, 0.0, 0.0)
    assert rel.contains(0, 0)
    assert symdiss.check_covering(rel, ts)


def test_output_measured_indices_and_feedback():
    qsr = symdiss.QsrTriple.passivity(0.15, 0.7, 1)
    derived = symdiss.abstraction_qsr_output_measured(
        qsr, 0.2, 0.44, 0.1, 1, "example2compat"
    )
    idx = symdiss.as_passivity_indices(derived)
    assert idx is not None
    assert math.isclose(idx.rho, -0.7653, abs_tol=5e-4)
    assert math.isclose(idx.nu, 0.1329, abs_tol=5e-4)

    fb = symdiss.feedback_passivity_index(idx.rho, idx.nu, 0.0420, 0.8115)
    assert fb.ok
    assert math.isclose(fb.rho_cl, 0.0462, abs_tol=5e-4)


def test_transfer_corollary():
    zeta = symdiss.TransferConstants(0.1, 0.05, 0.05, 0.1)
    idx = symdiss.transfer_passivity_indices(0.19, 0.338, zeta)
    assert idx is not None
    assert idx.rho > 0.0
    assert idx.nu > 0.0
    back = symdiss.transfer_qsr_from_abstraction(
        symdiss.QsrTriple.passivity(0.19, 0.338, 1), zeta, idx.to_qsr(1)
    )
    assert back.ok


def test_report_command_runs():
    cfg = symdiss.parse_config(json.dumps({"system": {"builtin": "example1"}}), ".")
    assert cfg.name == "example1"
    with tempfile.TemporaryDirectory() as out:
        code, text, report = symdiss.run(cfg, "report", out)
    assert code == 0
    assert "[verdict] PASS" in text
    assert "states=5" in text
    assert "transitions=27" in text
    parsed = json.loads(report)
    assert parsed["verdict"] == "PASS"
    assert parsed["stages"]["verify"]["verdict"] is True


if __name__ == "__main__":
    test_bundled_scalar_pipeline()
    test_output_measured_indices_and_feedback()
    test_transfer_corollary()
    test_report_command_runs()
    print("python smoke ok")
