"""Galerkin-truncated nonlinear vorticity dynamics in Fourier modes.

The quadratic system

    d/dt w_k = sum over unordered pairs {p, q}, p + q = k, of A(p, q) w_p w_q

is restricted to triads lying wholly inside a negation-closed mode set, so
kinetic energy E = 1/2 sum |k|^-2 |w_k|^2 and enstrophy J = sum |w_k|^2 are
conserved exactly by the truncation.  Reality (w_{-k} = conj w_k) is
enforced structurally: only one representative per +-k pair is stored.

The single-pump steady states w*_{+-p} = Gamma / conj(Gamma) are fixed
points; a finite-difference Jacobian check against the two-diagonal
linearized coupling ties this module to the per-class chain dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError, UsageError
from .lattice import WaveVector, triad_coeff

__all__ = [
    "ModeSet",
    "VorticityField",
    "euler_rhs",
    "fixed_point",
    "conserved",
    "jacobian_check",
    "integrate_euler",
    "EulerTrajectory",
    "JacobianReport",
]


def _is_representative(k: WaveVector) -> bool:
    return k.k1 > 0 or (k.k1 == 0 and k.k2 > 0)


@dataclass(frozen=True)
class ModeSet:
    """Nonzero lattice modes with |k| <= cutoff, closed under k -> -k."""

    cutoff: float
    modes: tuple[WaveVector, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def disk(cls, cutoff: float) -> "ModeSet":
        if cutoff < 1.0:
            raise DomainError("cutoff below 1 leaves no modes")
        r2 = cutoff * cutoff
        modes = []
        r = int(cutoff) + 1
        for k1 in range(-r, r + 1):
            for k2 in range(-r, r + 1):
                if (k1, k2) != (0, 0) and k1 * k1 + k2 * k2 <= r2:
                    modes.append(WaveVector(k1, k2))
        return cls(cutoff=cutoff, modes=tuple(sorted(modes)))

    def __post_init__(self):
        index = {k: i for i, k in enumerate(self.modes)}
        object.__setattr__(self, "_index", index)
        for k in self.modes:
            if k.is_zero or -k not in index:
                raise DomainError("mode set must exclude the origin and be negation-closed")

    def __contains__(self, k: WaveVector) -> bool:
        return k in self._index

    def index(self, k: WaveVector) -> int:
        return self._index[k]

    @property
    def representatives(self) -> tuple[WaveVector, ...]:
        return tuple(k for k in self.modes if _is_representative(k))


_TRIAD_CACHE: dict[tuple, tuple] = {}


def _triads(modeset: ModeSet):
    """Flattened unordered-pair triad table (k_idx, p_idx, q_idx, coeff)
    with every leg inside the mode set; pairs with zero coefficient are
    dropped."""
    key = (modeset.cutoff, modeset.modes)
    hit = _TRIAD_CACHE.get(key)
    if hit is not None:
        return hit
    ks, ps, qs, cs = [], [], [], []
    n = len(modeset.modes)
    for i in range(n):
        p = modeset.modes[i]
        for j in range(i, n):
            q = modeset.modes[j]
            k = p + q
            if k.is_zero or k not in modeset:
                continue
            coeff = triad_coeff(p, q)
            if coeff == 0.0:
                continue
            ks.append(modeset.index(k))
            ps.append(i)
            qs.append(j)
            cs.append(coeff)
    table = (np.array(ks), np.array(ps), np.array(qs), np.array(cs))
    _TRIAD_CACHE[key] = table
    return table


@dataclass
class VorticityField:
    """Field over a mode set; stores one complex amplitude per
    representative (+k half), the -k partner being its conjugate."""

    modeset: ModeSet
    coeffs: np.ndarray  # aligned with modeset.representatives

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if len(self.coeffs) != len(self.modeset.representatives):
            raise UsageError("coefficient array does not match the representative count")

    @classmethod
    def zero(cls, modeset: ModeSet) -> "VorticityField":
        return cls(modeset, np.zeros(len(modeset.representatives), dtype=complex))

    @classmethod
    def from_dict(cls, modeset: ModeSet, values: dict[WaveVector, complex]) -> "VorticityField":
        fld = cls.zero(modeset)
        rep_pos = {k: i for i, k in enumerate(modeset.representatives)}
        seen: dict[WaveVector, complex] = {}
        for k, v in values.items():
            if k not in modeset:
                raise DomainError(f"mode {k} outside the mode set")
            rep, stored = (k, complex(v)) if k in rep_pos else (-k, np.conj(complex(v)))
            if rep in seen and abs(seen[rep] - stored) > 1e-12 * max(1.0, abs(stored)):
                raise DomainError(f"conflicting values violate w(-k) = conj(w(k)) at {k}")
            seen[rep] = stored
            fld.coeffs[rep_pos[rep]] = stored
        return fld

    def value(self, k: WaveVector) -> complex:
        reps = self.modeset.representatives
        if _is_representative(k):
            return complex(self.coeffs[reps.index(k)])
        return complex(np.conj(self.coeffs[reps.index(-k)]))

    def full_vector(self) -> np.ndarray:
        """Amplitudes over all signed modes, conjugates filled in."""
        return _embed(self.modeset, self.coeffs)

    def copy(self) -> "VorticityField":
        return VorticityField(self.modeset, self.coeffs.copy())


_EMBED_CACHE: dict[tuple, tuple] = {}


def _embedding(modeset: ModeSet):
    key = (modeset.cutoff, modeset.modes)
    hit = _EMBED_CACHE.get(key)
    if hit is not None:
        return hit
    reps = modeset.representatives
    rep_pos = {k: i for i, k in enumerate(reps)}
    src = np.empty(len(modeset.modes), dtype=int)
    conj = np.empty(len(modeset.modes), dtype=bool)
    for i, k in enumerate(modeset.modes):
        if k in rep_pos:
            src[i] = rep_pos[k]
            conj[i] = False
        else:
            src[i] = rep_pos[-k]
            conj[i] = True
    rep_idx = np.array([modeset.index(k) for k in reps])
    _EMBED_CACHE[key] = (src, conj, rep_idx)
    return src, conj, rep_idx


def _embed(modeset: ModeSet, coeffs: np.ndarray) -> np.ndarray:
    src, conj, _ = _embedding(modeset)
    full = coeffs[src]
    full[conj] = np.conj(full[conj])
    return full


def _rhs_full(modeset: ModeSet, full: np.ndarray) -> np.ndarray:
    ks, ps, qs, cs = _triads(modeset)
    prod = cs * full[ps] * full[qs]
    out_re = np.bincount(ks, weights=prod.real, minlength=len(full))
    out_im = np.bincount(ks, weights=prod.imag, minlength=len(full))
    return out_re + 1j * out_im


def euler_rhs(field: VorticityField) -> VorticityField:
    """Quadratic mode-coupling right-hand side; preserves reality."""
    full = field.full_vector()
    out = _rhs_full(field.modeset, full)
    _, _, rep_idx = _embedding(field.modeset)
    return VorticityField(field.modeset, out[rep_idx])


def fixed_point(p: WaveVector, gamma: complex, modeset: ModeSet) -> VorticityField:
    """Single-pump steady state: w_p = Gamma, w_{-p} = conj(Gamma)."""
    if p not in modeset:
        raise UsageError(f"pump mode {p} outside the mode set")
    return VorticityField.from_dict(modeset, {p: gamma})


def conserved(field: VorticityField, p: WaveVector | None = None) -> tuple[float, float, float | None]:
    """(E, J, I): kinetic energy, enstrophy, and the pump-weighted
    combination I = 2E - |p|^-2 J when a pump direction is supplied."""
    full = field.full_vector()
    norms = np.array([k.norm2 for k in field.modeset.modes], dtype=float)
    amps2 = np.abs(full) ** 2
    E = float(0.5 * np.sum(amps2 / norms))
    J = float(np.sum(amps2))
    I = (2.0 * E - J / p.norm2) if p is not None else None
    return E, J, I


@dataclass(frozen=True)
class JacobianReport:
    max_deviation: float
    entries_checked: int


def jacobian_check(p: WaveVector, gamma: complex, modeset: ModeSet, h: float = 1e-6) -> JacobianReport:
    """Compare the finite-difference Jacobian of euler_rhs at the pump
    fixed point against the exact linearized coupling:

        entry (k, k') = A(p, k-p) Gamma        if k' = k - p,
                        A(-p, k+p) conj(Gamma) if k' = k + p,
                        0                       otherwise.

    Columns for k' and -k' are both recovered from one pair of real /
    imaginary probes (the linearized operator is complex-linear), so every
    matrix entry over the full signed mode list gets checked.
    """
    if h <= 0:
        raise DomainError("h must be positive")
    base = fixed_point(p, gamma, modeset)
    reps = modeset.representatives
    modes = modeset.modes
    n_full = len(modes)

    def rhs_of(coeffs: np.ndarray) -> np.ndarray:
        return _rhs_full(modeset, _embed(modeset, coeffs))

    expected = np.zeros((n_full, n_full), dtype=complex)
    for r, k in enumerate(modes):
        km, kp = k - p, k + p
        if not km.is_zero and km in modeset:
            expected[r, modeset.index(km)] += triad_coeff(p, km) * gamma
        if not kp.is_zero and kp in modeset:
            expected[r, modeset.index(kp)] += triad_coeff(-p, kp) * np.conj(gamma)

    max_dev = 0.0
    checked = 0
    for c, kc in enumerate(reps):
        bump = np.zeros(len(reps), dtype=complex)
        bump[c] = h
        d_re = (rhs_of(base.coeffs + bump) - rhs_of(base.coeffs - bump)) / (2 * h)
        bump[c] = 1j * h
        d_im = (rhs_of(base.coeffs + bump) - rhs_of(base.coeffs - bump)) / (2 * h)
        col_plus = 0.5 * (d_re - 1j * d_im)   # d rhs / d w_{k_c}
        col_minus = 0.5 * (d_re + 1j * d_im)  # d rhs / d w_{-k_c}
        i_plus = modeset.index(kc)
        i_minus = modeset.index(-kc)
        max_dev = max(
            max_dev,
            float(np.max(np.abs(col_plus - expected[:, i_plus]))),
            float(np.max(np.abs(col_minus - expected[:, i_minus]))),
        )
        checked += 2 * n_full
    return JacobianReport(max_deviation=max_dev, entries_checked=checked)


@dataclass
class EulerTrajectory:
    modeset: ModeSet
    times: np.ndarray
    coeffs: np.ndarray  # (samples, representatives)
    e_drift: float
    j_drift: float

    def field(self, i: int) -> VorticityField:
        return VorticityField(self.modeset, self.coeffs[i].copy())


def integrate_euler(
    field0: VorticityField,
    dt: float,
    steps: int,
    sample_every: int = 1,
) -> EulerTrajectory:
    """Classical fixed-step 4th-order integration with E/J drift report."""
    if dt <= 0 or steps < 1:
        raise DomainError("need dt > 0 and steps >= 1")
    modeset = field0.modeset
    _, _, rep_idx = _embedding(modeset)

    def rhs(coeffs: np.ndarray) -> np.ndarray:
        return _rhs_full(modeset, _embed(modeset, coeffs))[rep_idx]

    w = field0.coeffs.astype(complex).copy()
    samples = [w.copy()]
    times = [0.0]
    for step in range(1, steps + 1):
        k1 = rhs(w)
        k2 = rhs(w + 0.5 * dt * k1)
        k3 = rhs(w + 0.5 * dt * k2)
        k4 = rhs(w + dt * k3)
        w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(w)):
            raise NumericalError(f"non-finite amplitude at step {step}")
        if step % sample_every == 0 or step == steps:
            samples.append(w.copy())
            times.append(step * dt)

    coeffs = np.array(samples)
    e_series, j_series = [], []
    for row in coeffs:
        E, J, _ = conserved(VorticityField(modeset, row))
        e_series.append(E)
        j_series.append(J)
    e_series = np.array(e_series)
    j_series = np.array(j_series)

    def drift(series):
        scale = max(abs(series[0]), 1e-300)
        return float(np.max(np.abs(series - series[0])) / scale)

    return EulerTrajectory(
        modeset=modeset,
        times=np.array(times),
        coeffs=coeffs,
        e_drift=drift(e_series),
        j_drift=drift(j_series),
    )
