"""One invariant subsystem of the linearized dynamics.

Restricted to a class {khat + n p}, the linearized equation is the
two-neighbor chain

    d/dt w_n = A(p, k_{n-1}) * Gamma * w_{n-1} + A(-p, k_{n+1}) * conj(Gamma) * w_{n+1}

with k_m = khat + m p.  The chain is a linear Hamiltonian system; both the
quadratic Hamiltonian and the weighted enstrophy sum_n rho_n |w_n|^2 are
conserved, which is what powers the stability classification implemented
here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, UsageError
from .lattice import ClassLabel, WaveVector, canonical_label, class_members, det, triad_coeff

__all__ = [
    "SubsystemSpec",
    "ComplexSeq",
    "StabilityKind",
    "StabilityVerdict",
    "Trajectory",
    "cle_rhs",
    "hamiltonian",
    "invariant_I",
    "half_invariants",
    "integrate",
    "classify_stability",
    "udt_bound_check",
    "fit_growth_rate",
]


@dataclass(frozen=True)
class SubsystemSpec:
    """One chain: class data (khat, p), pump amplitude Gamma, and the finite
    index window [n_min, n_max] used for truncation.  Neighbors outside the
    window contribute zero (hard cutoff)."""

    khat: WaveVector
    p: WaveVector
    gamma: complex
    n_min: int
    n_max: int

    def __post_init__(self):
        if self.p.is_zero or self.khat.is_zero:
            raise DomainError("khat and p must be nonzero")
        if not (self.n_min <= 0 <= self.n_max):
            raise DomainError(f"window [{self.n_min}, {self.n_max}] must contain 0")

    @property
    def width(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def hole(self) -> int | None:
        """Window index with khat + n p = 0, if any (parallel classes only)."""
        return class_members(self.label, self.n_min, self.n_max).excluded

    @property
    def label(self) -> ClassLabel:
        return canonical_label(self.khat, self.p)

    def member(self, n: int) -> WaveVector:
        return self.khat.plus(n, self.p)

    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    def rho_window(self) -> np.ndarray:
        """rho_n over the window; the hole slot (if any) is set to 0 and
        never used (its couplings vanish identically)."""
        out = np.zeros(self.width)
        for j, n in enumerate(self.indices()):
            k = self.member(n)
            if not k.is_zero:
                out[j] = 1.0 / k.norm2 - 1.0 / self.p.norm2
        return out


@dataclass
class ComplexSeq:
    """Finite window of complex amplitudes; index n = offset + position."""

    offset: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)

    @classmethod
    def zero(cls, spec: SubsystemSpec) -> "ComplexSeq":
        return cls(spec.n_min, np.zeros(spec.width, dtype=complex))

    @classmethod
    def unit(cls, spec: SubsystemSpec, n: int, amplitude: complex = 1.0) -> "ComplexSeq":
        seq = cls.zero(spec)
        seq[n] = amplitude
        return seq

    def copy(self) -> "ComplexSeq":
        return ComplexSeq(self.offset, self.values.copy())

    def __getitem__(self, n: int) -> complex:
        return complex(self.values[n - self.offset])

    def __setitem__(self, n: int, v: complex) -> None:
        self.values[n - self.offset] = v

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def matches(self, spec: SubsystemSpec) -> bool:
        return self.offset == spec.n_min and len(self.values) == spec.width


def _require_match(spec: SubsystemSpec, state: ComplexSeq) -> None:
    if not state.matches(spec):
        raise UsageError(
            f"state window (offset={state.offset}, len={len(state.values)}) does not "
            f"match spec window [{spec.n_min}, {spec.n_max}]"
        )


def _coupling_arrays(spec: SubsystemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-slot coefficients (cm, cp): d/dt w_n = cm[n] w_{n-1} + cp[n] w_{n+1}.

    cm multiplies the lower neighbor, cp the upper one; slots whose neighbor
    is the excluded origin get a zero coefficient, and the hole slot itself
    stays inert.
    """
    cm = np.zeros(spec.width, dtype=complex)
    cp = np.zeros(spec.width, dtype=complex)
    for j, n in enumerate(spec.indices()):
        if spec.member(n).is_zero:
            continue
        lower = spec.member(n - 1)
        if not lower.is_zero:
            cm[j] = triad_coeff(spec.p, lower) * spec.gamma
        upper = spec.member(n + 1)
        if not upper.is_zero:
            cp[j] = triad_coeff(-spec.p, upper) * np.conj(spec.gamma)
    return cm, cp


def cle_rhs(spec: SubsystemSpec, state: ComplexSeq) -> ComplexSeq:
    """Time derivative of the chain state under the linearized dynamics.

    Neighbors outside the window or at the excluded origin contribute
    zero.  When |khat| = |p| the coefficient into n = 0 from below
    vanishes identically, so the two half-chains n >= 1 and n <= -1
    decouple on their own.
    """
    _require_match(spec, state)
    cm, cp = _coupling_arrays(spec)
    w = state.values
    out = np.zeros_like(w)
    out[1:] += cm[1:] * w[:-1]
    out[:-1] += cp[:-1] * w[1:]
    return ComplexSeq(state.offset, out)


def hamiltonian(spec: SubsystemSpec, state: ComplexSeq) -> float:
    """Conserved quadratic Hamiltonian of the chain,

        H = -det[[p1, khat1], [p2, khat2]]
            * Im{ sum_n Gamma rho_n rho_{n-1} w_{n-1} conj(w_n) }

    summed over neighbor pairs wholly inside the window.
    """
    _require_match(spec, state)
    rho_w = spec.rho_window()
    w = state.values
    pair_sum = np.sum(spec.gamma * rho_w[1:] * rho_w[:-1] * w[:-1] * np.conj(w[1:]))
    d = det(spec.p, spec.khat)
    return float(-d * np.imag(pair_sum))


def invariant_I(spec: SubsystemSpec, state: ComplexSeq) -> float:
    """Conserved weighted enstrophy sum_n rho_n |w_n|^2."""
    _require_match(spec, state)
    return float(np.sum(spec.rho_window() * np.abs(state.values) ** 2))


def half_invariants(spec: SubsystemSpec, state: ComplexSeq) -> tuple[float, float]:
    """(I_plus, I_minus): the n >= 1 and n <= -1 partial sums.

    Individually conserved exactly when |khat| = |p| (the half-chains
    decouple there); restricted to that case to keep the contract honest.
    """
    _require_match(spec, state)
    if spec.khat.norm2 != spec.p.norm2:
        raise UsageError("half invariants are conserved only when |khat| = |p|")
    rho_w = spec.rho_window()
    idx = spec.indices()
    w2 = np.abs(state.values) ** 2
    plus = float(np.sum(rho_w[idx >= 1] * w2[idx >= 1]))
    minus = float(np.sum(rho_w[idx <= -1] * w2[idx <= -1]))
    return plus, minus


@dataclass
class Trajectory:
    """Sampled integration output plus conservation diagnostics relative
    to t = 0."""

    spec: SubsystemSpec
    times: np.ndarray
    states: np.ndarray  # shape (samples, window)
    h_drift: float
    i_drift: float
    enstrophy_ratio: float

    def state(self, i: int) -> ComplexSeq:
        return ComplexSeq(self.spec.n_min, self.states[i].copy())


def _rel_drift(series: np.ndarray) -> float:
    ref = series[0]
    scale = max(abs(ref), 1e-300)
    return float(np.max(np.abs(series - ref)) / scale)


def integrate(
    spec: SubsystemSpec,
    state0: ComplexSeq,
    dt: float,
    steps: int,
    sample_every: int = 1,
) -> Trajectory:
    """Classical fixed-step 4th-order integration of cle_rhs.

    Returns sampled states together with the relative drifts of the
    Hamiltonian and of the weighted enstrophy, and the peak enstrophy
    ratio max_t ||w(t)||^2 / ||w(0)||^2.
    """
    _require_match(spec, state0)
    if dt <= 0 or steps < 1:
        raise DomainError("need dt > 0 and steps >= 1")
    cm, cp = _coupling_arrays(spec)

    def rhs(w: np.ndarray) -> np.ndarray:
        out = np.zeros_like(w)
        out[1:] += cm[1:] * w[:-1]
        out[:-1] += cp[:-1] * w[1:]
        return out

    w = state0.values.astype(complex).copy()
    samples = [w.copy()]
    times = [0.0]
    for step in range(1, steps + 1):
        k1 = rhs(w)
        k2 = rhs(w + 0.5 * dt * k1)
        k3 = rhs(w + 0.5 * dt * k2)
        k4 = rhs(w + dt * k3)
        w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(w)):
            raise NumericalError(f"non-finite state at step {step}")
        if step % sample_every == 0 or step == steps:
            samples.append(w.copy())
            times.append(step * dt)

    states = np.array(samples)
    seqs = [ComplexSeq(spec.n_min, s) for s in states]
    h_series = np.array([hamiltonian(spec, s) for s in seqs])
    i_series = np.array([invariant_I(spec, s) for s in seqs])
    enstrophy = np.sum(np.abs(states) ** 2, axis=1)
    ratio = float(np.max(enstrophy) / enstrophy[0]) if enstrophy[0] > 0 else 1.0
    return Trajectory(
        spec=spec,
        times=np.array(times),
        states=states,
        h_drift=_rel_drift(h_series),
        i_drift=_rel_drift(i_series),
        enstrophy_ratio=ratio,
    )


class StabilityKind(enum.Enum):
    PARALLEL_TRIVIAL = "ParallelTrivial"
    STABLE_UDT = "StableUDT"
    STABLE_HALF_CLASS_BOTH = "StableHalfClassBoth"
    STABLE_HALF_CLASS_ONE = "StableHalfClassOne"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class StabilityVerdict:
    kind: StabilityKind
    sigma: float | None
    detail: str


def _sigma_from_min_norm2(min_norm2: int, p_norm2: int) -> float:
    # sigma = sup(-rho) / inf(-rho) over the relevant index range; the sup
    # is the |n| -> infinity limit 1/|p|^2, the inf sits at the member
    # closest to the disk, so sigma = m / (m - |p|^2) with integer m.
    return min_norm2 / (min_norm2 - p_norm2)


def _half_chain_min_norm2(label: ClassLabel, side: int) -> int:
    # strictly convex in n and increasing away from the disk on a stable
    # half, so the first member of the half attains the minimum
    vals = [label.member(side * n).norm2 for n in range(1, 4)]
    return min(vals)


def classify_stability(label: ClassLabel) -> StabilityVerdict:
    """Stability verdict for one class, by conserved-quantity arguments.

    ParallelTrivial: khat || p, zero vector field.
    StableUDT: class misses the closed disk |k| <= |p|; enstrophy bounded
        by sigma = sup(-rho_n) / inf(-rho_n).
    StableHalfClassBoth/One: minimal member sits on the circle |k| = |p|;
        each half-chain with khat +/- p outside the closed disk is stable.
    Undetermined: class meets the open disk; point spectrum possible.
    """
    label = canonical_label(label.khat, label.p)  # tolerate non-canonical input
    p2 = label.p.norm2
    if label.parallel:
        return StabilityVerdict(StabilityKind.PARALLEL_TRIVIAL, None, "khat parallel to p: zero dynamics")
    m = label.khat.norm2
    if m > p2:
        sigma = _sigma_from_min_norm2(m, p2)
        return StabilityVerdict(
            StabilityKind.STABLE_UDT, sigma, f"class misses closed disk; enstrophy bound sigma={sigma!r}"
        )
    if m == p2:
        plus_ok = (label.khat + label.p).norm2 > p2
        minus_ok = (label.khat - label.p).norm2 > p2
        if plus_ok and minus_ok:
            sig = max(
                _sigma_from_min_norm2(_half_chain_min_norm2(label, +1), p2),
                _sigma_from_min_norm2(_half_chain_min_norm2(label, -1), p2),
            )
            return StabilityVerdict(
                StabilityKind.STABLE_HALF_CLASS_BOTH, sig, "both half-chains stable; n=0 only driven"
            )
        if plus_ok or minus_ok:
            side = +1 if plus_ok else -1
            sig = _sigma_from_min_norm2(_half_chain_min_norm2(label, side), p2)
            return StabilityVerdict(
                StabilityKind.STABLE_HALF_CLASS_ONE,
                sig,
                f"half-chain n {'>= 1' if side > 0 else '<= -1'} stable",
            )
        return StabilityVerdict(StabilityKind.UNDETERMINED, None, "both half-chains touch the disk")
    return StabilityVerdict(StabilityKind.UNDETERMINED, None, "class meets the open disk")


@dataclass(frozen=True)
class UdtBoundReport:
    sigma: float
    max_ratio: float
    ok: bool


def udt_bound_check(spec: SubsystemSpec, trajectory: Trajectory, slack: float = 1e-6) -> UdtBoundReport:
    """Check the enstrophy bound ||w(t)||^2 <= sigma ||w(0)||^2 along a
    trajectory of a disk-avoiding class."""
    verdict = classify_stability(spec.label)
    if verdict.kind is not StabilityKind.STABLE_UDT or verdict.sigma is None:
        raise UsageError("udt_bound_check applies to StableUDT classes only")
    enstrophy = np.sum(np.abs(trajectory.states) ** 2, axis=1)
    if enstrophy[0] == 0.0:
        return UdtBoundReport(verdict.sigma, 1.0, True)
    max_ratio = float(np.max(enstrophy) / enstrophy[0])
    return UdtBoundReport(verdict.sigma, max_ratio, max_ratio <= verdict.sigma * (1.0 + slack))


def fit_growth_rate(times: np.ndarray, series: np.ndarray, window_frac: float = 1.0 / 3.0) -> float:
    """Least-squares slope of log(series) over the trailing window_frac of
    the samples (transients decay out of the fit window)."""
    times = np.asarray(times, dtype=float)
    series = np.asarray(series, dtype=float)
    if np.any(series <= 0):
        raise DomainError("growth-rate fit needs a positive series")
    start = int(len(times) * (1.0 - window_frac))
    t = times[start:]
    y = np.log(series[start:])
    slope = np.polyfit(t, y, 1)[0]
    return float(slope)
