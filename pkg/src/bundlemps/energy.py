"""Energy-difference distance in a truncated orbital basis and metric checks."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .density import DensityMatrix, NaturalOrbitalSet, rotated
from .errors import DimensionError, NormalizationError, ValidationError


@dataclass(frozen=True, eq=False)
class LocalCouplings:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if not np.all(np.isfinite(v)):
            raise ValidationError("couplings must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, n: int, value: float = 1.0) -> "LocalCouplings":
        return cls(np.full(n, float(value)))

    @property
    def c_max(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0


class BoundCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class Violation(NamedTuple):
    axiom: str
    points: tuple
    magnitude: float


@dataclass
class MetricReport:
    points: list
    violations: list = field(default_factory=list)
    max_triangle_slack: float = -math.inf

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        lines = [f"points: {self.points}",
                 f"violations: {len(self.violations)}",
                 f"max triangle slack: {self.max_triangle_slack:.3e}"]
        lines += [f"  {v.axiom} {v.points} {v.magnitude:.3e}" for v in self.violations]
        return "\n".join(lines)


def _prepare(rho_a, rho_b, basis, m, couplings):
    n = basis.dim
    if rho_a.dim != n or rho_b.dim != n:
        raise DimensionError("density matrices and basis must share a dimension")
    if not 0 <= m <= n:
        raise ValidationError(f"m={m} outside 0..{n}")
    if couplings is None:
        couplings = LocalCouplings.uniform(n)
    if couplings.values.shape[0] != n:
        raise DimensionError("need one coupling per site")
    return couplings


def energy_difference_truncated(rho_a: DensityMatrix, rho_b: DensityMatrix,
                                basis: NaturalOrbitalSet, m: int,
                                couplings: LocalCouplings | None = None,
                                ultralocal: bool = True) -> float:
    """Energy difference of two density matrices kept to m orbitals of ``basis``.

    With ``ultralocal=True`` only the diagonal of each density matrix in the
    orbital basis contributes::

        sum_i sum_{k<=m} C_i (rho_a~_kk - rho_b~_kk) |Phi_k(i)|^2

    Otherwise the full ``m x m`` block of the difference is kept,
    ``sum_i C_i [Phi_m (rho_a~ - rho_b~) Phi_m^T]_ii``.
    """
    couplings = _prepare(rho_a, rho_b, basis, m, couplings)
    phi = basis.orbitals[:, :m]
    diff = rotated(rho_a, basis, m) - rotated(rho_b, basis, m)
    if ultralocal:
        weights = couplings.values @ (phi**2)
        return float(weights @ np.diag(diff))
    return float(np.einsum("i,ik,kl,il->", couplings.values, phi, diff, phi))


def frobenius_bound_check(rho_a: DensityMatrix, rho_b: DensityMatrix,
                          basis: NaturalOrbitalSet, m: int,
                          couplings: LocalCouplings | None = None,
                          ultralocal: bool = True, slack: float = 1e-10) -> BoundCheck:
    """Check ``|dE_m| / C_max <= sum_{k,l<=m} |rho_a~_kl - rho_b~_kl|``."""
    couplings = _prepare(rho_a, rho_b, basis, m, couplings)
    c_max = couplings.c_max
    if c_max == 0.0:
        raise NormalizationError("c_max = 0 cannot normalize the energy difference")
    de = energy_difference_truncated(rho_a, rho_b, basis, m, couplings, ultralocal)
    lhs = abs(de) / c_max
    rhs = float(np.abs(rotated(rho_a, basis, m) - rotated(rho_b, basis, m)).sum())
    return BoundCheck(lhs, rhs, lhs <= rhs + slack)


def metric_axiom_suite(points, distance: Callable, tol: float = 1e-10) -> MetricReport:
    """Check identity, nonnegativity, symmetry and the triangle inequality.

    The distance is evaluated on every ordered pair once; the triangle
    inequality ``d(x,z) <= d(x,y) + d(y,z)`` is checked on every ordered
    triple of distinct points.  ``max_triangle_slack`` is the largest value
    of ``d(x,z) - d(x,y) - d(y,z)`` seen (positive means violated).
    """
    points = list(points)
    if len(points) < 3:
        raise ValidationError("the axiom suite needs at least three points")
    d = {}
    for x, y in itertools.product(points, repeat=2):
        val = float(distance(x, y))
        if math.isnan(val):
            raise ValidationError(f"distance({x!r}, {y!r}) returned NaN")
        d[x, y] = val

    report = MetricReport(points)
    bad = report.violations
    for x in points:
        if abs(d[x, x]) > tol:
            bad.append(Violation("identity", (x,), abs(d[x, x])))
    for x, y in itertools.combinations(points, 2):
        for a, b in ((x, y), (y, x)):
            if d[a, b] < -tol:
                bad.append(Violation("nonnegativity", (a, b), -d[a, b]))
        if abs(d[x, y] - d[y, x]) > tol:
            bad.append(Violation("symmetry", (x, y), abs(d[x, y] - d[y, x])))
    for x, y, z in itertools.permutations(points, 3):
        slack = d[x, z] - d[x, y] - d[y, z]
        report.max_triangle_slack = max(report.max_triangle_slack, slack)
        if slack > tol:
            bad.append(Violation("triangle", (x, y, z), slack))
    return report
