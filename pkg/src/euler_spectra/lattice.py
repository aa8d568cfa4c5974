"""Integer-lattice geometry underlying the mode-coupling analysis.

A pump mode p partitions the nonzero lattice into classes
Sigma = {khat + n*p : n in Z} \\ {0}.  This module provides the triad
interaction coefficient, the rho coefficient sequence attached to a class,
canonical class labels, and the disk predicates used by the stability
classification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "WaveVector",
    "ClassLabel",
    "RhoSequence",
    "WindowMembers",
    "triad_coeff",
    "rho",
    "class_members",
    "canonical_label",
    "classes_meeting_disk",
]


@dataclass(frozen=True, order=True)
class WaveVector:
    """Lattice point k = (k1, k2); the origin is excluded wherever a
    WaveVector is used as a mode index."""

    k1: int
    k2: int

    def __add__(self, other: "WaveVector") -> "WaveVector":
        return WaveVector(self.k1 + other.k1, self.k2 + other.k2)

    def __neg__(self) -> "WaveVector":
        return WaveVector(-self.k1, -self.k2)

    def __sub__(self, other: "WaveVector") -> "WaveVector":
        return WaveVector(self.k1 - other.k1, self.k2 - other.k2)

    def plus(self, n: int, p: "WaveVector") -> "WaveVector":
        """k + n*p."""
        return WaveVector(self.k1 + n * p.k1, self.k2 + n * p.k2)

    @property
    def norm2(self) -> int:
        return self.k1 * self.k1 + self.k2 * self.k2

    @property
    def is_zero(self) -> bool:
        return self.k1 == 0 and self.k2 == 0

    def dot(self, other: "WaveVector") -> int:
        return self.k1 * other.k1 + self.k2 * other.k2

    def as_tuple(self) -> tuple[int, int]:
        return (self.k1, self.k2)


def det(p: WaveVector, q: WaveVector) -> int:
    """Determinant |p q| = p1*q2 - p2*q1."""
    return p.k1 * q.k2 - p.k2 * q.k1


def parallel(p: WaveVector, q: WaveVector) -> bool:
    return det(p, q) == 0


def triad_coeff(p: WaveVector, q: WaveVector) -> float:
    """Symmetrized interaction coefficient of the mode triad (p, q, p+q):

        A(p, q) = 1/2 * (|q|^-2 - |p|^-2) * (p1*q2 - p2*q1)

    Symmetric in (p, q); vanishes when |p| = |q| or p is parallel to q.
    """
    if p.is_zero or q.is_zero:
        raise DomainError(f"triad_coeff needs nonzero vectors, got p={p}, q={q}")
    return 0.5 * (1.0 / q.norm2 - 1.0 / p.norm2) * det(p, q)


def rho(khat: WaveVector, p: WaveVector, n: int) -> float:
    """rho_n = |khat + n p|^-2 - |p|^-2 for the class member khat + n p."""
    member = khat.plus(n, p)
    if member.is_zero:
        raise DomainError(f"khat + n p = 0 at n={n}; the origin carries no mode")
    return 1.0 / member.norm2 - 1.0 / p.norm2


@dataclass(frozen=True)
class ClassLabel:
    """Canonical label of one class: khat is the member of minimal |khat|^2,
    ties resolved to the lexicographically greatest (k1, k2) so that e.g.
    (1,0) beats (0,-1).  Parallel classes (khat || p) have trivially zero
    dynamics and carry an explicit flag."""

    khat: WaveVector
    p: WaveVector
    parallel: bool

    def member(self, n: int) -> WaveVector:
        return self.khat.plus(n, p=self.p)


@dataclass
class RhoSequence:
    """Memoized rho_n values for one class, with the |n| -> infinity limit
    rho = -|p|^-2 held alongside."""

    khat: WaveVector
    p: WaveVector
    values: dict[int, float] = field(default_factory=dict)

    @property
    def limit(self) -> float:
        return -1.0 / self.p.norm2

    def value(self, n: int) -> float:
        got = self.values.get(n)
        if got is None:
            got = rho(self.khat, self.p, n)
            self.values[n] = got
        return got


@dataclass(frozen=True)
class WindowMembers:
    """Members (n, khat + n p) of a class over a finite index window, plus
    the excluded index where khat + n p = 0 (recorded, never silently
    skipped)."""

    members: tuple[tuple[int, WaveVector], ...]
    excluded: int | None


def class_members(label: ClassLabel, n_min: int, n_max: int) -> WindowMembers:
    """All (n, khat + n p) with n in [n_min, n_max] and khat + n p != 0."""
    if n_min > n_max:
        raise DomainError(f"empty window: n_min={n_min} > n_max={n_max}")
    members = []
    excluded = None
    for n in range(n_min, n_max + 1):
        k = label.member(n)
        if k.is_zero:
            excluded = n
        else:
            members.append((n, k))
    return WindowMembers(tuple(members), excluded)


def _min_norm_members(k: WaveVector, p: WaveVector) -> list[WaveVector]:
    """Members of k's class attaining the minimal squared norm.

    |k + n p|^2 is a strictly convex quadratic in n, so the minimum over
    integers lies at floor/ceil of the real minimizer; a couple of extra
    neighbors cover the case where the nearest site is the excluded origin.
    """
    n_star = -k.dot(p) / p.norm2
    lo = int(n_star) - 2
    candidates = [k.plus(n, p) for n in range(lo, lo + 6)]
    candidates = [c for c in candidates if not c.is_zero]
    best = min(c.norm2 for c in candidates)
    return sorted(c for c in candidates if c.norm2 == best)


def canonical_label(k: WaveVector, p: WaveVector) -> ClassLabel:
    """Label of the unique class containing k.

    Idempotent along the class: canonical_label(khat + n p, p) gives the
    same label for every valid n.
    """
    if k.is_zero or p.is_zero:
        raise DomainError("canonical_label needs nonzero k and p")
    khat = _min_norm_members(k, p)[-1]
    return ClassLabel(khat=khat, p=p, parallel=parallel(k, p))


def lattice_points_in_disk(radius2: int) -> list[WaveVector]:
    """Nonzero lattice points with |k|^2 <= radius2, in sorted order."""
    out = []
    r = int(radius2**0.5) + 1
    for k1 in range(-r, r + 1):
        for k2 in range(-r, r + 1):
            if (k1, k2) != (0, 0) and k1 * k1 + k2 * k2 <= radius2:
                out.append(WaveVector(k1, k2))
    return sorted(out)


def classes_meeting_disk(p: WaveVector) -> list[ClassLabel]:
    """Every distinct class whose members intersect the closed disk
    {k : |k| <= |p|}, deduplicated by canonical label.

    Parallel classes are included (the disk contains p itself) but arrive
    flagged; the finite disk makes the list finite.
    """
    if p.is_zero:
        raise DomainError("p must be nonzero")
    seen: dict[tuple[int, int], ClassLabel] = {}
    for k in lattice_points_in_disk(p.norm2):
        label = canonical_label(k, p)
        seen.setdefault(label.khat.as_tuple(), label)
    return [seen[key] for key in sorted(seen, key=lambda t: (WaveVector(*t).norm2, t))]
