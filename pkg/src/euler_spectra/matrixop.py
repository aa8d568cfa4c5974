"""Truncated infinite-matrix realizations of the chain operator.

Relabeling the two-sided chain index onto the positive integers
(n >= 1 -> 2n, n <= 0 -> 2|n| + 1) turns the chain operator into a
one-sided pentadiagonal ("2x2+1"-banded) infinite matrix

    A = i a * [rho pattern],

a compact perturbation of the constant-coefficient matrix B = i b * P
(b = a * rho_limit, P the 0/1 pattern).  Finite top-left sections serve as
a spectrum oracle; B's spectral curve, resolvent Green's function, and the
decaying-solution determinant test are implemented in closed form.

Scalings used here (lam = physical eigenvalue):
    lambda_b   = lam / (i b)   -- B-normalized; spectral curve = [-2, 2]
    lambda_hat = lam / (i a)   -- recurrence-normalized, for the det M test
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contfrac import CFParams
from .errors import (
    DomainError,
    NumericalError,
    OnCircleError,
    OnSpectralCurveError,
    SpectralPointSetError,
)

__all__ = [
    "TruncatedOperator",
    "BandSpec",
    "relabel",
    "build",
    "truncated_spectrum",
    "char_roots",
    "root_count_S",
    "essential_band",
    "resolvent_apply",
    "green_kernel",
    "detM_eigentest",
    "classify_band_distance",
]

DENSE_CAP = 2048  # dense eigensolver guard; O(N^3) beyond this is a mistake
CURVE_TOL = 1e-12


def relabel(n: int) -> int:
    """Two-sided chain index -> positive matrix index: n>=1 -> 2n,
    n<=0 -> 2|n|+1.  Bijective onto {1, 2, 3, ...}."""
    return 2 * n if n >= 1 else 2 * (-n) + 1


def unrelabel(m: int) -> int:
    """Inverse of relabel."""
    if m < 1:
        raise DomainError("matrix indices start at 1")
    return m // 2 if m % 2 == 0 else -(m - 1) // 2


@dataclass
class TruncatedOperator:
    """Top-left N x N section of one of the three infinite matrices."""

    kind: str  # 'A', 'B' or 'C'
    size: int
    entries: np.ndarray
    params: CFParams
    b: float  # a * rho_limit = -a / |p|^2


@dataclass(frozen=True)
class BandSpec:
    """Essential band: the segment between +-2bi on the imaginary axis."""

    endpoints: tuple[complex, complex]
    width: float


def _pattern_positions(N: int):
    """Nonzero positions (row, col, chain index whose rho enters), 1-based,
    of the infinite matrices' top-left N x N section.

    Rows 1..3 are the printed coupling rows; even rows continue the n >= 1
    chain, odd rows the n <= 0 chain.
    """
    pos = [(1, 2, 1), (1, 3, -1), (2, 1, 0), (2, 4, 2), (3, 1, 0), (3, 5, -2)]
    for n in range(2, (N + 2) // 2 + 1):
        pos.append((2 * n, 2 * (n - 1), n - 1))
        pos.append((2 * n, 2 * (n + 1), n + 1))
    for n in range(1, (N + 1) // 2 + 1):
        pos.append((2 * n + 1, 2 * n - 1, -n + 1))
        pos.append((2 * n + 1, 2 * n + 3, -n - 1))
    return [(r, c, idx) for r, c, idx in pos if r <= N and c <= N]


def build(kind: str, params: CFParams, N: int) -> TruncatedOperator:
    """Assemble the N x N section of A (rho coefficients), B (constant
    limit coefficient) or C = A - B (decaying difference)."""
    if kind not in ("A", "B", "C"):
        raise DomainError(f"kind must be 'A', 'B' or 'C', got {kind!r}")
    if N < 5:
        raise DomainError("N >= 5 required to include the coupling rows")
    rho_lim = params.rho_seq.limit
    ia = 1j * params.a
    M = np.zeros((N, N), dtype=complex)
    for r, c, idx in _pattern_positions(N):
        if kind == "A":
            coeff = params.rho_seq.value(idx)
        elif kind == "B":
            coeff = rho_lim
        else:
            coeff = params.rho_seq.value(idx) - rho_lim
        M[r - 1, c - 1] = ia * coeff
    return TruncatedOperator(kind=kind, size=N, entries=M, params=params, b=params.a * rho_lim)


def truncated_spectrum(op: TruncatedOperator) -> np.ndarray:
    """All N eigenvalues of the dense section (LAPACK Hessenberg + shifted
    QR), sorted by (imag, real) for reproducibility."""
    if op.size > DENSE_CAP:
        raise DomainError(f"dense solve capped at N = {DENSE_CAP}")
    ev = np.linalg.eigvals(op.entries)
    order = np.lexsort((ev.real, ev.imag))
    return ev[order]


def char_roots(lambda_b: complex) -> tuple[complex, complex, complex, complex]:
    """Roots {w, -w, 1/w, -1/w} of the characteristic polynomial
    1 - lambda_b w^2 + w^4 of the constant-coefficient difference equation;
    their product is 1."""
    lam = complex(lambda_b)
    w2 = 0.5 * (lam + np.sqrt(lam * lam - 4.0))
    w = np.sqrt(w2)
    if w == 0.0:  # cannot happen for finite lambda; guard the division
        raise NumericalError("degenerate characteristic root")
    return (complex(w), complex(-w), complex(1.0 / w), complex(-1.0 / w))


def root_count_S(lambda_b: complex) -> int:
    """Number of characteristic roots of modulus < 1: 0 on the spectral
    curve (all moduli exactly 1 there, boundary points included), 2 off it."""
    return sum(1 for w in char_roots(lambda_b) if abs(w) < 1.0 - CURVE_TOL)


def essential_band(params: CFParams) -> BandSpec:
    """Band endpoints +-2bi with b = -a/|p|^2; width 4|b|.  Degenerates to
    {0} for parallel classes."""
    b = params.a * params.rho_seq.limit
    lo, hi = sorted((2j * b, -2j * b), key=lambda z: z.imag)
    return BandSpec(endpoints=(lo, hi), width=4.0 * abs(b))


def _on_curve(lambda_b: complex) -> bool:
    return abs(lambda_b.imag) < CURVE_TOL and -2.0 <= lambda_b.real <= 2.0


def _reject_curve_points(lambda_b: complex) -> None:
    if _on_curve(lambda_b):
        if abs(abs(lambda_b.real) - 2.0) < CURVE_TOL:
            raise SpectralPointSetError(f"lambda_b = {lambda_b} is a boundary point of the curve")
        raise OnSpectralCurveError(f"lambda_b = {lambda_b} lies on the spectral curve")


def _small_root(lambda_b: complex) -> complex:
    _reject_curve_points(lambda_b)
    ws = char_roots(lambda_b)
    w = min(ws, key=abs)
    if abs(w) >= 1.0 - CURVE_TOL:
        raise OnSpectralCurveError(f"lambda_b = {lambda_b} has no root inside the unit circle")
    return w


def _matching_matrix(lambda_b: complex, w: complex) -> np.ndarray:
    return np.array(
        [
            [-lambda_b * w + w**2 + w**3, lambda_b * w + w**2 - w**3],
            [w - lambda_b * w**2 + w**4, -w - lambda_b * w**2 + w**4],
        ],
        dtype=complex,
    )


def green_kernel(lambda_b: complex, n_max: int, j_max: int) -> np.ndarray:
    """Green's function G(n, j) of the one-sided constant-coefficient
    section, n = 1..n_max, j = 1..j_max, for lambda_b off the curve.

    Variation of constants over the four characteristic solutions gives a
    translation kernel g(n, j) plus a boundary correction through the
    inverse of the 2 x 2 matching matrix; (B_pattern - lambda_b I) applied
    to G's columns reproduces identity columns.
    """
    lam = complex(lambda_b)
    w = _small_root(lam)  # rejects curve and point-set values

    # 4x4 Wronskian-style determinant of the characteristic solutions,
    # constant in the translation index
    rows = []
    for e in (1, 2, 3, 4):
        rows.append([w**e, (-w) ** e, w**-e, (-w) ** -e])
    W0 = complex(np.linalg.det(np.array(rows, dtype=complex)))
    if W0 == 0.0:
        raise SpectralPointSetError(f"degenerate characteristic system at lambda_b = {lam}")

    cminus = 2.0 * (1.0 - w**-4) / W0  # weights the forward-decaying part
    cplus = 2.0 * (1.0 - w**4) / W0  # weights the backward sum

    def g(n: int, j: int) -> complex:
        if j == 1:
            return 0.0
        if 2 <= j <= n + 1:
            e = n - j + 2
            return cminus * (w**e + (-w) ** e)
        e = j - n - 2
        return -cplus * (w**e + (-w) ** e)

    M = _matching_matrix(lam, w)
    det_m = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det_m) < 1e-14:
        raise SpectralPointSetError(f"matching matrix singular at lambda_b = {lam}")
    Minv = np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=complex) / det_m

    G = np.zeros((n_max, j_max), dtype=complex)
    for j in range(1, j_max + 1):
        gj = np.array(
            [
                (1.0 if j == 1 else 0.0) + lam * g(1, j) - g(2, j) - g(3, j),
                (1.0 if j == 2 else 0.0) - g(1, j) + lam * g(2, j) - g(4, j),
            ],
            dtype=complex,
        )
        ab = Minv @ gj
        for n in range(1, n_max + 1):
            G[n - 1, j - 1] = ab[0] * w**n + ab[1] * (-w) ** n + g(n, j)
    return G


def resolvent_apply(lambda_b: complex, y: np.ndarray, n_out: int | None = None) -> np.ndarray:
    """Solve (B_pattern - lambda_b I) z = y for finitely supported y
    (y[0] is the j = 1 slot), via the explicit Green's function.

    Returns z over 1..n_out, sized so the geometric tail has decayed
    below rounding unless overridden.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1:
        raise DomainError("y must be a one-dimensional sequence")
    lam = complex(lambda_b)
    w = _small_root(lam)  # raises on the curve
    if n_out is None:
        decay = max(abs(w), 1e-6)
        n_out = len(y) + max(8, int(np.ceil(np.log(1e-16) / np.log(decay))))
    G = green_kernel(lam, n_out, len(y))
    return G @ y


def classify_band_distance(op: TruncatedOperator, eigenvalues: np.ndarray) -> np.ndarray:
    """Boolean mask: True where an eigenvalue counts as isolated from the
    band segment (distance exceeding 10x the median distance)."""
    b = abs(op.b)
    im = np.clip(eigenvalues.imag, -2.0 * b, 2.0 * b)
    dist = np.abs(eigenvalues - 1j * im)
    med = np.median(dist)
    return dist > 10.0 * med


def detM_eigentest(params: CFParams, lambda_hat: complex, N_tail: int | None = None) -> complex:
    """Determinant test for point-spectrum membership at lam = i a lambda_hat.

    Backward recurrence from a far tail seeded with the decaying
    characteristic rate builds the minimal (square-summable) solution of
    each decoupled half-recurrence; the two are normalized and substituted
    into the coupling constraints.  det M = 0 exactly at eigenvalues.
    """
    if params.parallel:
        raise DomainError("parallel class: zero operator")
    lam_hat = complex(lambda_hat)
    rho = params.rho_seq.value
    lam_b = lam_hat / params.rho_seq.limit  # lam/(i b)
    w = _small_root(lam_b)  # raises on the essential band
    r = w * w  # Poincare-Perron decay ratio of both half-recurrences

    if N_tail is None:
        N_tail = max(64, int(np.ceil(np.log(1e-14) / np.log(max(abs(r), 1e-12)))) + 16)

    def backward(chain_rho, n_stop: int) -> list[complex]:
        """Run u_{n-1} = (lam_hat u_n - rho(n+1) u_{n+1}) / rho(n-1) from
        the seed (1, r) at the tail down to n_stop; renormalize on overflow
        (only ratios matter until the final normalization)."""
        u_next, u_cur = complex(r), 1.0 + 0.0j
        out = {N_tail: u_cur, N_tail + 1: u_next}
        for n in range(N_tail, n_stop, -1):
            denom = chain_rho(n - 1)
            if denom == 0.0:
                raise OnCircleError("rho vanishes on a member; half-chain treatment required")
            u_prev = (lam_hat * u_cur - chain_rho(n + 1) * u_next) / denom
            if not np.isfinite(u_prev):
                raise NumericalError(f"backward recurrence overflowed at n = {n}")
            u_next, u_cur = u_cur, u_prev
            scale = abs(u_cur)
            if scale > 1e200:
                u_cur /= scale
                u_next /= scale
                for key in out:
                    out[key] /= scale
            out[n - 1] = u_cur
        return [out[n] for n in range(n_stop, n_stop + 3)]

    # even chain u_n = z_{2n}: coefficients rho(n); need z_2 = u_1, z_4 = u_2
    u1, u2, _ = backward(lambda n: rho(n), 1)
    # odd chain v_n = z_{2n+1}: coefficients rho(-n); need z_1 = v_0, z_3 = v_1
    v0, v1, _ = backward(lambda n: rho(-n), 0)

    z2, z4 = u1, u2
    z1, z3 = v0, v1
    s_even = max(abs(z2), abs(z4))
    s_odd = max(abs(z1), abs(z3))
    if s_even == 0.0 or s_odd == 0.0:
        raise NumericalError("degenerate minimal solution in det M test")
    M = np.array(
        [
            [rho(1) * z2 / s_even, -lam_hat * z1 / s_odd + rho(-1) * z3 / s_odd],
            [-lam_hat * z2 / s_even + rho(2) * z4 / s_even, rho(0) * z1 / s_odd],
        ],
        dtype=complex,
    )
    return complex(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
