import json

import numpy as np
import pytest

from euler_spectra.contfrac import CFParams, find_eigenvalues
from euler_spectra.errors import UsageError
from euler_spectra.lattice import WaveVector, canonical_label
from euler_spectra.matrixop import build, classify_band_distance, essential_band, truncated_spectrum
from euler_spectra.reporting import (
    cf_report,
    field_csv,
    format_float,
    matrix_spectrum_report,
    operator_triplets_csv,
    spectrum_csv,
    to_canonical_json,
    trajectory_csv,
    trajectory_summary,
)
from euler_spectra.subsystem import ComplexSeq, SubsystemSpec, integrate

V = WaveVector


def test_format_float_fixed_precision():
    assert format_float(0.1) == "0.1"
    assert format_float(1 / 3) == "0.333333333333333"
    assert format_float(-0.0) == "0"
    assert format_float(1.5e-300) == "1.5e-300"
    with pytest.raises(UsageError):
        format_float(float("nan"))


def test_canonical_json_sorted_and_parseable():
    doc = {"b": 2, "a": [1.0, {"z": 1j}], "vec": V(3, -4)}
    text = to_canonical_json(doc)
    assert text == '{"a":[1,{"z":{"im":1,"re":0}}],"b":2,"vec":[3,-4]}\n'
    parsed = json.loads(text)
    assert parsed["vec"] == [3, -4]


def test_canonical_json_deterministic():
    doc = {"x": np.float64(0.123456789012345678), "y": np.arange(3)}
    assert to_canonical_json(doc) == to_canonical_json(doc)


def test_trajectory_exports():
    spec = SubsystemSpec(khat=V(1, 0), p=V(1, 1), gamma=1.0, n_min=-3, n_max=3)
    traj = integrate(spec, ComplexSeq.unit(spec, 0), dt=1e-2, steps=10, sample_every=5)
    csv = trajectory_csv(traj)
    lines = csv.strip().splitlines()
    assert lines[0] == "t,n,re,im"
    assert len(lines) == 1 + len(traj.times) * spec.width
    summary = trajectory_summary(traj)
    assert set(summary) == {"H_drift", "I_drift", "enstrophy_ratio"}


def test_cf_report_contract():
    params = CFParams.for_class(V(1, 0), V(1, 1), 1.0)
    label = canonical_label(V(1, 0), V(1, 1))
    quads = find_eigenvalues(params, search_box=(0.1, 0.6, 0.1, 0.6), grid=5)
    doc = cf_report(params, label, essential_band(params), quads)
    assert doc["method"] == "continued-fraction"
    assert doc["a"] == -0.5
    assert doc["class"]["khat"] == V(1, 0)
    assert len(doc["quadruples"]) == 1
    q = doc["quadruples"][0]
    assert {"re", "im", "residual", "members"} <= set(q)
    json.loads(to_canonical_json(doc))


def test_matrix_report_and_csv():
    params = CFParams.for_class(V(1, 0), V(1, 1), 1.0)
    label = canonical_label(V(1, 0), V(1, 1))
    op = build("A", params, 80)
    ev = truncated_spectrum(op)
    iso = classify_band_distance(op, ev)
    doc = matrix_spectrum_report(op, label, ev, iso)
    assert doc["method"] == "matrix-oracle"
    assert len(doc["eigenvalues"]) == 80
    csv = spectrum_csv(ev, iso)
    lines = csv.strip().splitlines()
    assert lines[0] == "re,im,kind"
    kinds = {line.split(",")[2] for line in lines[1:]}
    assert kinds <= {"isolated", "band"}


def test_operator_triplets_roundtrip():
    params = CFParams.for_class(V(1, 0), V(1, 1), 1.0)
    op = build("B", params, 12)
    csv = operator_triplets_csv(op)
    lines = csv.strip().splitlines()[1:]
    rebuilt = np.zeros((12, 12), dtype=complex)
    for line in lines:
        r, c, re, im = line.split(",")
        rebuilt[int(r) - 1, int(c) - 1] = float(re) + 1j * float(im)
    assert np.allclose(rebuilt, op.entries, atol=1e-15)


def test_field_csv_header():
    csv = field_csv([V(1, 0), V(0, 1)], np.array([1 + 2j, -0.5j]))
    lines = csv.strip().splitlines()
    assert lines[0] == "k1,k2,re,im"
    assert lines[1] == "1,0,1,2"
