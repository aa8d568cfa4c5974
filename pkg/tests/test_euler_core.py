import numpy as np
import pytest

from euler_spectra.errors import DomainError, UsageError
from euler_spectra.euler_core import (
    ModeSet,
    VorticityField,
    conserved,
    euler_rhs,
    fixed_point,
    integrate_euler,
    jacobian_check,
)
from euler_spectra.lattice import WaveVector
from euler_spectra.subsystem import ComplexSeq, SubsystemSpec, integrate

V = WaveVector
K5 = ModeSet.disk(5.0)


def random_field(modeset, seed=0, scale=0.1):
    rng = np.random.default_rng(seed)
    n = len(modeset.representatives)
    return VorticityField(modeset, scale * (rng.normal(size=n) + 1j * rng.normal(size=n)))


def test_modeset_disk_counts():
    assert len(K5.modes) == 80  # 40 +-pairs
    assert len(K5.representatives) == 40
    assert all((-k) in K5 for k in K5.modes)


def test_field_reality_enforced():
    fld = VorticityField.from_dict(K5, {V(1, 1): 2.0 + 1.0j})
    assert fld.value(V(1, 1)) == 2.0 + 1.0j
    assert fld.value(V(-1, -1)) == 2.0 - 1.0j
    # consistent duplicate is fine
    VorticityField.from_dict(K5, {V(1, 1): 1j, V(-1, -1): -1j})
    with pytest.raises(DomainError):
        VorticityField.from_dict(K5, {V(1, 1): 1j, V(-1, -1): 1j})


def test_euler_rhs_zero_field():
    out = euler_rhs(VorticityField.zero(K5))
    assert np.all(out.coeffs == 0)


def test_fixed_point_is_stationary():
    fld = fixed_point(V(1, 1), 1.0, K5)
    assert np.max(np.abs(euler_rhs(fld).coeffs)) < 1e-14
    complex_pump = fixed_point(V(2, 1), 0.8 - 0.6j, K5)
    assert np.max(np.abs(euler_rhs(complex_pump).coeffs)) < 1e-14


def test_ray_and_circle_families_are_fixed_points():
    # single-ray support
    ray = VorticityField.from_dict(K5, {V(1, 2): 0.3 + 0.4j, V(2, 4): -0.2j})
    assert np.max(np.abs(euler_rhs(ray).coeffs)) < 1e-14
    # single-circle support: |k|^2 = 5
    circle = VorticityField.from_dict(
        K5, {V(1, 2): 1.0, V(2, 1): 0.5j, V(-1, 2): -0.25, V(2, -1): 0.1 - 0.9j}
    )
    assert np.max(np.abs(euler_rhs(circle).coeffs)) < 1e-14


def test_reality_preserved_by_rhs():
    fld = random_field(K5, seed=1)
    out = euler_rhs(fld)
    full = out.full_vector()
    for i, k in enumerate(K5.modes):
        j = K5.index(-k)
        assert abs(full[i] - np.conj(full[j])) < 1e-14


def test_conserved_frozen_values():
    E, J, I = conserved(VorticityField.zero(K5), V(1, 1))
    assert (E, J, I) == (0.0, 0.0, 0.0)

    fp = fixed_point(V(1, 1), 1.0, K5)
    E, J, I = conserved(fp, V(1, 1))
    assert E == pytest.approx(0.5, abs=1e-15)
    assert J == pytest.approx(2.0, abs=1e-15)
    assert I == pytest.approx(0.0, abs=1e-15)

    single = VorticityField.from_dict(K5, {V(2, 0): 1.0})
    E, J, _ = conserved(single)
    assert E == pytest.approx(0.25, abs=1e-15)
    assert J == pytest.approx(2.0, abs=1e-15)


def test_energy_enstrophy_directional_derivative_vanishes():
    # E and J are conserved by the truncated dynamics in exact arithmetic;
    # both are quadratic so the central difference is exact
    for seed in range(5):
        fld = random_field(K5, seed=seed, scale=0.5)
        v = euler_rhs(fld)
        h = 1e-3
        for pick in (0, 1):
            up = conserved(VorticityField(K5, fld.coeffs + h * v.coeffs))[pick]
            dn = conserved(VorticityField(K5, fld.coeffs - h * v.coeffs))[pick]
            assert abs(up - dn) / (2 * h) < 1e-12 * max(1.0, abs(up))


def test_jacobian_check_matches_linearization():
    report = jacobian_check(V(1, 1), 1.0, K5, h=1e-6)
    assert report.max_deviation < 1e-6
    assert report.entries_checked == 2 * 40 * 80


def test_jacobian_zero_when_gamma_zero():
    report = jacobian_check(V(1, 1), 0.0, K5)
    assert report.max_deviation == 0.0


def test_jacobian_row_structure():
    # row k = (2,1): the only couplings are k' = (1,0) and k' = (3,2)
    from euler_spectra.euler_core import _embed, _rhs_full

    p = V(1, 1)
    base = fixed_point(p, 1.0, K5)
    k_row = K5.index(V(2, 1))
    h = 1e-6
    reps = K5.representatives
    for c, kc in enumerate(reps):
        bump = np.zeros(len(reps), dtype=complex)
        bump[c] = h
        d_re = (
            _rhs_full(K5, _embed(K5, base.coeffs + bump))
            - _rhs_full(K5, _embed(K5, base.coeffs - bump))
        ) / (2 * h)
        bump[c] = 1j * h
        d_im = (
            _rhs_full(K5, _embed(K5, base.coeffs + bump))
            - _rhs_full(K5, _embed(K5, base.coeffs - bump))
        ) / (2 * h)
        col_plus = 0.5 * (d_re - 1j * d_im)
        col_minus = 0.5 * (d_re + 1j * d_im)
        for col, kk in ((col_plus, kc), (col_minus, -kc)):
            if kk in (V(1, 0), V(3, 2)):
                assert abs(col[k_row]) > 1e-3
            else:
                assert abs(col[k_row]) < 1e-9


def test_integrate_euler_fixed_point_constant():
    fp = fixed_point(V(1, 1), 1.0, K5)
    traj = integrate_euler(fp, dt=1e-2, steps=50)
    assert np.max(np.abs(traj.coeffs - traj.coeffs[0])) < 1e-14


def test_integrate_euler_conservation():
    fld = random_field(K5, seed=3, scale=0.2)
    traj = integrate_euler(fld, dt=1e-3, steps=1000, sample_every=100)
    assert traj.e_drift < 1e-8
    assert traj.j_drift < 1e-8


def test_perturbed_pump_tracks_linearized_chain():
    # seed the chain members of the class through (1,0) inside the cutoff
    # and compare the nonlinear evolution against the per-class integrator
    p = V(1, 1)
    eps = 1e-6
    spec = SubsystemSpec(khat=V(1, 0), p=p, gamma=1.0, n_min=-4, n_max=3)
    rng = np.random.default_rng(9)
    seed_vals = rng.normal(size=spec.width) + 1j * rng.normal(size=spec.width)

    chain0 = ComplexSeq(spec.n_min, eps * seed_vals)
    lin = integrate(spec, chain0, dt=1e-2, steps=100)

    base = fixed_point(p, 1.0, K5)
    pert = {spec.member(n): eps * seed_vals[j] for j, n in enumerate(spec.indices())}
    full0 = base.copy()
    for k, v in pert.items():
        reps = K5.representatives
        if k in reps:
            full0.coeffs[reps.index(k)] += v
        else:
            full0.coeffs[reps.index(-k)] += np.conj(v)
    nl = integrate_euler(full0, dt=1e-2, steps=100)

    base_full = base.full_vector()
    for sample, t in enumerate(nl.times):
        fld = nl.field(sample)
        delta = fld.full_vector() - base_full
        got = np.array([delta[K5.index(spec.member(n))] for n in spec.indices()])
        want = lin.states[sample]
        assert np.max(np.abs(got - want)) < 1e-4 * eps


def test_integrate_euler_rejects_bad_steps():
    with pytest.raises(DomainError):
        integrate_euler(VorticityField.zero(K5), dt=0.0, steps=5)


def test_fixed_point_requires_pump_in_set():
    with pytest.raises(UsageError):
        fixed_point(V(9, 9), 1.0, K5)
