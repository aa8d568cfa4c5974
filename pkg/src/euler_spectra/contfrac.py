"""Point spectrum of one chain via continued fractions.

Separating time out of the chain equation leaves the three-term recurrence

    a_n z_n + z_{n-1} - z_{n+1} = 0,      a_n = lambda / (a * rho_n),

whose square-summable solutions exist exactly when the two continued
fractions built from the upper and lower tails match at n = 1.  Away from
the essential band the tail coefficients approach the constant
a_tilde = -lambda |p|^2 / a, so both fractions converge (Van Vleck /
Sleszynski-Pringsheim regimes) and can be truncated with the exact
constant-coefficient tail value as seed.  Zeros of the matching function

    f(lambda_tilde) = a_0 + K(lower tail) + K(upper tail)

are the point-spectrum values, reported as symmetry quadruples
{+-lambda_tilde, +-conj(lambda_tilde)}.

All search-facing entry points work in the scale-free variable
lambda_tilde = lambda / a, which is invariant under rescaling |Gamma|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EssentialBandError, NumericalError, OnCircleError
from .lattice import RhoSequence, WaveVector, det

__all__ = [
    "CFParams",
    "AsymRoots",
    "EigenQuadruple",
    "a_n",
    "a_tilde",
    "asym_roots",
    "cf_tail",
    "f_eigen",
    "f_eigen_half",
    "find_eigenvalues",
    "find_eigenvalues_half",
    "eigenvector_window",
    "mode_amplitudes",
]

BAND_TUBE = 1e-3  # exclusion radius around the essential band segment
_MAX_DEPTH = 1 << 17


@dataclass
class CFParams:
    """Chain data entering the recurrence: class (khat, p), the real scale
    a = |Gamma| (p1 khat2 - p2 khat1) / 2, and the memoized rho sequence."""

    khat: WaveVector
    p: WaveVector
    a: float
    rho_seq: RhoSequence

    @classmethod
    def for_class(cls, khat: WaveVector, p: WaveVector, gamma: complex) -> "CFParams":
        if khat.is_zero or p.is_zero:
            raise DomainError("khat and p must be nonzero")
        a = 0.5 * abs(gamma) * det(p, khat)
        return cls(khat=khat, p=p, a=a, rho_seq=RhoSequence(khat, p))

    @property
    def parallel(self) -> bool:
        return self.a == 0.0

    @property
    def rho_limit(self) -> float:
        return self.rho_seq.limit

    def band_halfwidth_tilde(self) -> float:
        """Half-length of the essential band segment on the imaginary axis
        of the lambda_tilde plane: 2 / |p|^2."""
        return 2.0 / self.p.norm2


@dataclass(frozen=True)
class AsymRoots:
    """Roots of w^2 - a_tilde w - 1 = 0 governing the tail behavior;
    w_plus * w_minus = -1 and |w_plus| > 1 > |w_minus| off the band."""

    a_tilde: complex
    w_plus: complex
    w_minus: complex


@dataclass(frozen=True)
class EigenQuadruple:
    """One symmetry orbit of the point spectrum in the lambda_tilde plane.

    lambda_tilde is the representative with Re >= 0, Im >= 0; members hold
    the deduplicated orbit {+-lt, +-conj(lt)}; residual is |f| at the
    representative.
    """

    lambda_tilde: complex
    members: tuple[complex, ...]
    residual: float


def _outside_band(a_t: complex) -> bool:
    return a_t.real != 0.0 or abs(a_t) > 2.0


def band_distance_tilde(params: CFParams, lt: complex) -> float:
    """Distance from lt to the essential band segment i*[-2/|p|^2, 2/|p|^2]."""
    half = params.band_halfwidth_tilde()
    im = lt.imag
    if abs(im) <= half:
        return abs(lt.real)
    return abs(lt - 1j * np.sign(im) * half)


def a_n(params: CFParams, lam: complex, n: int) -> complex:
    """Recurrence coefficient a_n = lambda / (a * rho_n)."""
    if params.parallel:
        raise DomainError("parallel class: a = 0, no spectral recurrence")
    r = params.rho_seq.value(n)
    if r == 0.0:
        raise OnCircleError(
            f"rho_{n} = 0 (member on the circle |k| = |p|); use the half-chain solver"
        )
    return lam / (params.a * r)


def a_tilde(params: CFParams, lam: complex) -> complex:
    """Limit of a_n as |n| -> infinity: -lambda |p|^2 / a."""
    if params.parallel:
        raise DomainError("parallel class: a = 0")
    return -lam * params.p.norm2 / params.a


def asym_roots(a_t: complex) -> AsymRoots:
    """Solve w^2 - a_tilde w - 1 = 0 with the sign convention that makes
    w_plus the large root: |w_plus| > 1 > |w_minus|.

    Requires Re(a_tilde) != 0, or Re(a_tilde) = 0 with |a_tilde| > 2;
    anything else sits on the essential band and is rejected.
    """
    a_t = complex(a_t)
    if not _outside_band(a_t):
        raise EssentialBandError(f"a_tilde = {a_t} lies on the essential band")
    if a_t.real != 0.0:
        s = np.sqrt(a_t * a_t + 4.0)
        delta = np.sign(a_t.real) * np.sign(s.real)
        w_plus = 0.5 * (a_t + delta * s)
    else:
        xi = a_t.imag
        s = np.sqrt(xi * xi - 4.0)
        w_plus = 0.5j * (xi + np.sign(xi) * s)
    return AsymRoots(a_tilde=a_t, w_plus=complex(w_plus), w_minus=complex(-1.0 / w_plus))


def _tail_once(params: CFParams, lam: complex, direction: str, depth: int) -> complex:
    roots = asym_roots(a_tilde(params, lam))
    if direction == "down":
        # w_1 = a_0 + 1/(a_{-1} + 1/(a_{-2} + ...)), seeded with w_plus
        w = roots.w_plus
        for m in range(-depth, 1):
            w = a_n(params, lam, m) + 1.0 / w
        return w
    if direction == "up":
        # w_1 = -1/(a_1 + 1/(a_2 + ...)), seeded with w_minus at the far end
        w = roots.w_minus
        for n in range(depth, 0, -1):
            w = 1.0 / (w - a_n(params, lam, n))
        return w
    raise DomainError(f"direction must be 'down' or 'up', got {direction!r}")


def cf_tail(params: CFParams, lam: complex, direction: str, tol: float) -> complex:
    """Evaluate one tail continued fraction at lambda, doubling the
    truncation depth until successive values differ by less than tol."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    depth = 32
    prev = _tail_once(params, lam, direction, depth)
    while depth <= _MAX_DEPTH:
        depth *= 2
        cur = _tail_once(params, lam, direction, depth)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise NumericalError(
        f"continued fraction did not converge by depth {_MAX_DEPTH}; last iterates {prev}, {cur}"
    )


def f_eigen(params: CFParams, lambda_tilde: complex, tol: float = 1e-13) -> complex:
    """Matching function whose zeros are the point-spectrum values:

        f = a_0 + [lower-tail fraction] + [upper-tail fraction]

    evaluated at lambda = a * lambda_tilde; defined off the essential band
    only.
    """
    if params.parallel:
        raise DomainError("parallel class carries no point spectrum machinery")
    lam = params.a * lambda_tilde
    if not _outside_band(a_tilde(params, lam)):
        raise EssentialBandError(f"lambda_tilde = {lambda_tilde} lies on the essential band")
    down = cf_tail(params, lam, "down", tol)  # = a_0 + K(lower)
    up = cf_tail(params, lam, "up", tol)  # = -K(upper)
    return down - up


def f_eigen_half(params: CFParams, lambda_tilde: complex, side: int, tol: float = 1e-13) -> complex:
    """Matching function for one decoupled half-chain (|khat| = |p| case):

        side=+1:  f = a_1 + 1/(a_2 + 1/(a_3 + ...))   (chain n >= 1)
        side=-1:  f = a_{-1} + 1/(a_{-2} + ...)        (chain n <= -1)

    The n = 0 mode is excluded (its outgoing couplings vanish there).
    """
    if side not in (+1, -1):
        raise DomainError("side must be +1 or -1")
    if params.khat.norm2 != params.p.norm2:
        raise DomainError("half-chain solver applies only when |khat| = |p|")
    lam = params.a * lambda_tilde
    if not _outside_band(a_tilde(params, lam)):
        raise EssentialBandError(f"lambda_tilde = {lambda_tilde} lies on the essential band")
    roots = asym_roots(a_tilde(params, lam))
    depth = 32
    prev = None
    while depth <= _MAX_DEPTH:
        if side > 0:
            w = roots.w_minus
            for n in range(depth, 1, -1):
                w = 1.0 / (w - a_n(params, lam, n))
            cur = a_n(params, lam, 1) - w
        else:
            w = roots.w_plus
            for m in range(-depth, -1):
                w = a_n(params, lam, m) + 1.0 / w
            cur = a_n(params, lam, -1) + 1.0 / w
        if prev is not None and abs(cur - prev) < tol:
            return cur
        prev = cur
        depth *= 2
    raise NumericalError("half-chain continued fraction did not converge")


# ---------------------------------------------------------------------------
# vectorized evaluation + Newton search


def _rho_array(params: CFParams, depth: int) -> tuple[np.ndarray, np.ndarray]:
    lower = np.array([params.rho_seq.value(m) for m in range(-depth, 1)])  # m = -depth..0
    upper = np.array([params.rho_seq.value(n) for n in range(1, depth + 1)])  # n = 1..depth
    if np.any(lower == 0.0) or np.any(upper == 0.0):
        raise OnCircleError("rho vanishes on a member; use the half-chain solver")
    return lower, upper


def _f_batch(params: CFParams, lts: np.ndarray, depth: int) -> np.ndarray:
    """f at an array of lambda_tilde points, fixed truncation depth.
    Points on the band come back NaN."""
    lower, upper = _rho_array(params, depth)
    lts = np.asarray(lts, dtype=complex)
    at = -lts * params.p.norm2
    ok = (at.real != 0.0) | (np.abs(at) > 2.0)
    s = np.sqrt(at * at + 4.0)
    delta = np.where(at.real != 0.0, np.sign(at.real) * np.sign(s.real), np.sign(at.imag))
    wp = 0.5 * (at + delta * s)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = wp.copy()
        for rho_m in lower:  # m = -depth .. 0
            w = lts / rho_m + 1.0 / w
        down = w
        w = -1.0 / wp
        for rho_n in upper[::-1]:  # n = depth .. 1
            w = 1.0 / (w - lts / rho_n)
        up = w
    f = down - up
    f[~ok] = np.nan
    return f


def _adaptive_depth(params: CFParams, probes: np.ndarray, tol: float) -> int:
    """Smallest doubling depth at which f is tol-converged on the probes."""
    depth = 64
    prev = _f_batch(params, probes, depth)
    while depth <= _MAX_DEPTH:
        depth *= 2
        cur = _f_batch(params, probes, depth)
        good = np.isfinite(prev) & np.isfinite(cur)
        if good.any() and np.max(np.abs(cur[good] - prev[good])) < tol:
            return depth
        prev = cur
    raise NumericalError("continued fraction depth search did not converge")


def _quadruple_members(lt: complex, tol: float) -> tuple[complex, ...]:
    orbit = [lt, -lt, np.conj(lt), -np.conj(lt)]
    kept: list[complex] = []
    for z in orbit:
        if all(abs(z - u) > tol for u in kept):
            kept.append(complex(z))
    kept.sort(key=lambda z: (-z.real, -z.imag))
    return tuple(kept)


def _representative(members: tuple[complex, ...]) -> complex:
    # the orbit {+-z, +-conj z} always meets the closed first quadrant
    for z in members:
        if z.real >= 0 and z.imag >= 0:
            return z
    return members[0]


def find_eigenvalues(
    params: CFParams,
    search_box: tuple[float, float, float, float] = (BAND_TUBE, 4.0, BAND_TUBE, 4.0),
    grid: int = 20,
    tol: float = 1e-12,
) -> list[EigenQuadruple]:
    """Newton search for zeros of f over a seed grid in the lambda_tilde
    plane, returning deduplicated symmetry quadruples sorted by modulus.

    The box (re_min, re_max, im_min, im_max) should avoid the exclusion
    tube around the essential band; iterates that wander into the tube or
    diverge are dropped.  Every returned root satisfies |f| < tol.  An
    empty list is a legitimate outcome (classes missing the disk).
    """
    if params.parallel:
        raise DomainError("parallel class carries no point spectrum machinery")
    re_min, re_max, im_min, im_max = search_box
    if re_max <= re_min or im_max <= im_min:
        raise DomainError("degenerate search box")

    res = np.linspace(re_min, re_max, grid)
    ims = np.linspace(im_min, im_max, grid)
    seeds = (res[:, None] + 1j * ims[None, :]).ravel()

    cf_tol = min(tol * 1e-2, 1e-13)
    depth = _adaptive_depth(params, seeds[:: max(1, len(seeds) // 16)], cf_tol)

    lt = seeds.copy()
    active = np.ones(len(lt), dtype=bool)
    bound = 4.0 * (abs(re_max) + abs(im_max) + 1.0)
    for _ in range(60):
        if not active.any():
            break
        cur = lt[active]
        h = 1e-7 * (1.0 + np.abs(cur))
        f0 = _f_batch(params, cur, depth)
        fp = _f_batch(params, cur + h, depth)
        fm = _f_batch(params, cur - h, depth)
        deriv = (fp - fm) / (2.0 * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = f0 / deriv
        nxt = cur - step
        bad = (
            ~np.isfinite(nxt)
            | (np.abs(nxt) > bound)
            | (np.array([band_distance_tilde(params, z) for z in nxt]) < BAND_TUBE)
        )
        conv = np.abs(step) < 1e-14 * (1.0 + np.abs(nxt))
        nxt[bad] = np.nan
        lt[active] = nxt
        still = np.zeros(len(lt), dtype=bool)
        still[active] = ~(bad | conv)
        active = still

    finite = lt[np.isfinite(lt)]
    if len(finite) == 0:
        return []
    fvals = _f_batch(params, finite, depth * 2)
    roots = finite[np.abs(fvals) < tol]

    quads: list[EigenQuadruple] = []
    for z in sorted(roots, key=lambda z: (abs(z), z.real, z.imag)):
        members = _quadruple_members(complex(z), 10.0 * tol)
        rep = _representative(members)
        if any(min(abs(rep - m) for m in q.members) < 10.0 * tol for q in quads):
            continue
        residual = abs(_f_batch(params, np.array([rep]), depth * 2)[0])
        if residual < tol:
            quads.append(EigenQuadruple(lambda_tilde=rep, members=members, residual=float(residual)))
    quads.sort(key=lambda q: (abs(q.lambda_tilde), q.lambda_tilde.real, q.lambda_tilde.imag))
    return quads


def find_eigenvalues_half(
    params: CFParams,
    side: int,
    search_box: tuple[float, float, float, float] = (BAND_TUBE, 4.0, BAND_TUBE, 4.0),
    grid: int = 12,
    tol: float = 1e-12,
) -> list[EigenQuadruple]:
    """Root search for one half-chain matching function (|khat| = |p|).
    Scalar Newton per seed; same dedup/quadruple reporting as the full
    solver."""
    re_min, re_max, im_min, im_max = search_box
    seeds = [
        complex(r, i)
        for r in np.linspace(re_min, re_max, grid)
        for i in np.linspace(im_min, im_max, grid)
    ]
    roots = []
    for z in seeds:
        ok = True
        for _ in range(50):
            try:
                h = 1e-7 * (1.0 + abs(z))
                d = (f_eigen_half(params, z + h, side, tol=1e-13) - f_eigen_half(params, z - h, side, tol=1e-13)) / (2 * h)
                step = f_eigen_half(params, z, side, tol=1e-13) / d
            except (EssentialBandError, ZeroDivisionError):
                ok = False
                break
            z = z - step
            if not np.isfinite(z) or abs(z) > 50.0:
                ok = False
                break
            if abs(step) < 1e-14 * (1 + abs(z)):
                break
        if ok and band_distance_tilde(params, z) > BAND_TUBE:
            try:
                if abs(f_eigen_half(params, z, side, tol=1e-14)) < tol:
                    roots.append(z)
            except EssentialBandError:
                pass
    quads: list[EigenQuadruple] = []
    for z in sorted(roots, key=lambda z: (abs(z), z.real, z.imag)):
        members = _quadruple_members(complex(z), 10.0 * tol)
        rep = _representative(members)
        if any(min(abs(rep - m) for m in q.members) < 10.0 * tol for q in quads):
            continue
        quads.append(
            EigenQuadruple(rep, members, float(abs(f_eigen_half(params, rep, side, tol=1e-14))))
        )
    return quads


# ---------------------------------------------------------------------------
# eigenvector reconstruction


def eigenvector_window(
    params: CFParams, lambda_tilde: complex, n_min: int, n_max: int, tol: float = 1e-13
) -> np.ndarray:
    """Recurrence solution z_n over [n_min, n_max] built from the tail
    ratios, normalized to z_0 = 1.

    Below the matching index the ratios come from the lower-tail fraction,
    above it from the upper one; at a true root of f the two agree and the
    assembled z solves a_n z_n + z_{n-1} - z_{n+1} = 0 on the whole window,
    decaying in both directions.
    """
    if n_min > 0 or n_max < 1:
        raise DomainError("window must contain the matching indices 0 and 1")
    lam = params.a * lambda_tilde
    roots = asym_roots(a_tilde(params, lam))
    depth = 64
    # converge the deepest needed down-ratio
    need = abs(n_min) + 8
    while depth < need:
        depth *= 2

    def down_ratios(d: int) -> dict[int, complex]:
        w = roots.w_plus
        out = {}
        for m in range(-d, 2):  # produces w_{m+1} after using a_m
            w = a_n(params, lam, m) + 1.0 / w
            out[m + 1] = w
        return out

    prev = down_ratios(depth)
    while depth <= _MAX_DEPTH:
        depth *= 2
        cur = down_ratios(depth)
        if abs(cur[1] - prev[1]) < tol:
            break
        prev = cur
    w_down = cur  # w_n^{(lower)} for n in [-depth+1, 1]

    def up_ratios(d: int) -> dict[int, complex]:
        w = roots.w_minus
        out = {d + 1: w}
        for n in range(d, 1, -1):
            w = 1.0 / (w - a_n(params, lam, n))
            out[n] = w
        return out

    depth_u = max(64, n_max + 8)
    prev = up_ratios(depth_u)
    while depth_u <= _MAX_DEPTH:
        depth_u *= 2
        cur = up_ratios(depth_u)
        if abs(cur[2] - prev[2]) < tol:
            break
        prev = cur
    w_up = cur  # w_n^{(upper)} for n >= 2

    z = {0: 1.0 + 0.0j}
    for n in range(1, n_max + 1):
        ratio = w_down[1] if n == 1 else w_up[n]
        z[n] = z[n - 1] * ratio
    for n in range(-1, n_min - 1, -1):
        z[n] = z[n + 1] / w_down[n + 1]
    return np.array([z[n] for n in range(n_min, n_max + 1)])


def mode_amplitudes(
    params: CFParams, lambda_tilde: complex, gamma: complex, n_min: int, n_max: int
) -> np.ndarray:
    """Eigenmode amplitudes w_n of the physical chain over the window,
    unwinding the z_n = rho_n e^{i n (theta + pi/2)} w_n substitution
    (theta = pi/2 - arg Gamma)."""
    z = eigenvector_window(params, lambda_tilde, n_min, n_max)
    theta = 0.5 * np.pi - np.angle(gamma)
    ns = np.arange(n_min, n_max + 1)
    rho_vals = np.array([params.rho_seq.value(int(n)) for n in ns])
    return z / (rho_vals * np.exp(1j * ns * (theta + 0.5 * np.pi)))
