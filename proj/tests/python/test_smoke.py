import json

import numpy as np
import pytest
import scipy.linalg

import holocurrent as hc

E = np.array([[0, 1], [0, 0]], dtype=complex)
F = np.array([[0, 0], [1, 0]], dtype=complex)
H = np.array([[1, 0], [0, -1]], dtype=complex)


def test_killing_form_sl2():
    assert hc.killing_form(H, H) == pytest.approx(8.0)
    assert hc.killing_form(E, F) == pytest.approx(4.0)


def test_matrix_exp_matches_scipy():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a -= np.trace(a) / 3 * np.eye(3)
    assert np.allclose(hc.matrix_exp(a), scipy.linalg.expm(a), rtol=1e-12, atol=1e-12)


def test_monodromy_of_a_simple_pole():
    a = 0.3 * H + 0.2 * E
    tuple_ = hc.monodromy([0.0, 1.0], [(a, 0, 1)])
    assert len(tuple_) == 2
    expected = scipy.linalg.expm(2j * np.pi * a)
    assert np.trace(tuple_[0]) == pytest.approx(np.trace(expected), abs=1e-8)
    assert np.allclose(tuple_[1], np.eye(2), atol=1e-8)


def test_cocycle_value():
    value = hc.cocycle([0.0], [(E, None, 1)], [(F, 0, 1)])
    assert value == pytest.approx(-8j * np.pi, abs=1e-9)


def test_frenkel_constant_loop():
    a = 0.4 * H + 0.1 * F
    mono, quasi = hc.frenkel([a], 2.0)
    assert np.allclose(mono, scipy.linalg.expm(-np.pi * a), atol=1e-8)
    assert quasi < 1e-7


def test_classify_zero_form():
    out = hc.classify([0.0, 1.0], [], 1.0, n=2)
    assert all(np.allclose(m, np.eye(2)) for m in out["tuple"])
    assert out["generic"] is False


def test_errors_are_translated():
    with pytest.raises(hc.HoloError, match="ZeroLevel"):
        hc.frenkel([H], 0.0)


def test_cli_roundtrip():
    problem = {
        "algebra": {"family": "sl", "n": 2},
        "surface": {"punctures": [[0, 0]]},
        "sigma_index": 0,
        "x": [{"matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "pole": "polynomial", "order": 1}],
        "y": [{"matrix": [[[0, 0], [0, 0]], [[1, 0], [0, 0]]], "pole": 0, "order": 1}],
    }
    code, out, _ = hc.run_cli(["cocycle", "-"], json.dumps(problem))
    assert code == 0
    value = json.loads(out)["outputs"]["value"]
    assert value[1] == pytest.approx(-8 * np.pi)
    code, _, _ = hc.run_cli(["cocycle", "-"], "{}")
    assert code == 2
