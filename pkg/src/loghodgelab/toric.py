"""Sheaf cohomology of divisors on smooth complete toric varieties, and the
logarithmic Hodge tables built from it.

h^q(X, O(D)) is computed character by character: for a lattice character m
the graded piece is the reduced cohomology, one degree down, of the
simplicial complex spanned inside each maximal cone by the rays whose
inequality <m, v> >= -a_v fails.  Characters with a nonzero contribution lie
in bounded sign chambers whose vertices solve n x n subsystems with right
hand sides -a_v or -a_v - 1, so scanning the integer points of the bounding
box of those solutions (padded by one) is exhaustive.

For the full toric boundary the sheaf of logarithmic p-forms is free of rank
C(n, p), so every row of the log Hodge table is a binomial multiple of the
divisor cohomology of the twist.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb, floor, gcd
from typing import Optional, Sequence

from .complexes import CochainComplex, cohomology_dims
from .linalg import RationalMatrix, rank, solve_rational
from .weights import WeightFunction


class FanError(ValueError):
    pass


def _primitive(vec: tuple[int, ...]) -> bool:
    g = 0
    for v in vec:
        g = gcd(g, abs(v))
    return g == 1


def _det(matrix: list[list[Fraction]]) -> Fraction:
    n = len(matrix)
    m = [row[:] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        piv = None
        for i in range(col, n):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for i in range(col + 1, n):
            if m[i][col] != 0:
                f = m[i][col] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return det


class Fan:
    """Smooth complete simplicial fan of rank <= 3."""

    def __init__(self, rays: Sequence[Sequence[int]], maximal_cones: Sequence[Sequence[int]],
                 ray_names: Optional[Sequence[str]] = None):
        self.rays = [tuple(int(x) for x in ray) for ray in rays]
        if not self.rays:
            raise FanError("fan needs at least one ray")
        self.rank = len(self.rays[0])
        if self.rank < 1 or self.rank > 3:
            raise FanError(f"fan rank {self.rank} not supported (rank must be 1..3)")
        if any(len(r) != self.rank for r in self.rays):
            raise FanError("rays have mixed lengths")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("duplicate rays")
        for ray in self.rays:
            if not _primitive(ray):
                raise FanError(f"ray {ray} is not primitive")
        self.maximal_cones = [tuple(sorted(int(i) for i in cone)) for cone in maximal_cones]
        for cone in self.maximal_cones:
            if len(set(cone)) != len(cone):
                raise FanError(f"repeated ray in cone {cone}")
            if any(i < 0 or i >= len(self.rays) for i in cone):
                raise FanError(f"cone {cone} references a missing ray")
        if ray_names is None:
            ray_names = [f"r{i}" for i in range(len(self.rays))]
        if len(ray_names) != len(self.rays) or len(set(ray_names)) != len(ray_names):
            raise FanError("ray names must be distinct, one per ray")
        self.ray_names = list(ray_names)
        self._validate_smooth()
        self._validate_complete()

    def _cone_matrix(self, cone: tuple[int, ...]) -> list[list[Fraction]]:
        # columns are the ray vectors of the cone
        return [[Fraction(self.rays[i][row]) for i in cone] for row in range(self.rank)]

    def _validate_smooth(self):
        n = self.rank
        for cone in self.maximal_cones:
            if len(cone) != n:
                raise FanError(
                    f"maximal cone {cone} is not simplicial of full rank {n}")
            if abs(_det(self._cone_matrix(cone))) != 1:
                raise FanError(f"cone {cone} is not unimodular: fan is not smooth")

    def _validate_complete(self):
        n = self.rank
        # facet pairing: every (n-1)-subset of a maximal cone lies in exactly two
        facets: dict[tuple[int, ...], int] = {}
        for cone in self.maximal_cones:
            for facet in combinations(cone, n - 1):
                facets[facet] = facets.get(facet, 0) + 1
        for facet, count in sorted(facets.items()):
            if count != 2:
                raise FanError(
                    f"facet {facet} lies in {count} maximal cones (needs 2): fan "
                    f"is not complete")
        # deterministic grid sampling: every point must lie in some cone
        for point in product(range(-2, 3), repeat=n):
            if all(x == 0 for x in point):
                continue
            if not any(self._cone_contains(cone, point) for cone in self.maximal_cones):
                raise FanError(f"point {point} is outside every cone: fan is not complete")

    def _cone_contains(self, cone: tuple[int, ...], point: Sequence[int]) -> bool:
        m = RationalMatrix.from_rows(self._cone_matrix(cone))
        sol = solve_rational(m, [Fraction(x) for x in point])
        return sol is not None and all(c >= 0 for c in sol)

    def ray_index(self, name: str) -> int:
        try:
            return self.ray_names.index(name)
        except ValueError:
            raise FanError(f"unknown ray name {name!r}") from None

    def __repr__(self):
        return f"Fan(rank {self.rank}, {len(self.rays)} rays, {len(self.maximal_cones)} cones)"


@dataclass
class QDivisor:
    """Rational coefficients on every ray of a fan."""

    coefficients: dict[int, Fraction]

    def __post_init__(self):
        self.coefficients = {int(i): Fraction(v) for i, v in self.coefficients.items()}

    @classmethod
    def zero(cls, fan: Fan) -> "QDivisor":
        return cls({i: Fraction(0) for i in range(len(fan.rays))})

    def validate_on(self, fan: Fan):
        expected = set(range(len(fan.rays)))
        if set(self.coefficients) != expected:
            raise FanError("divisor does not assign a coefficient to every ray")

    def floor(self) -> dict[int, int]:
        return {i: floor(v) for i, v in sorted(self.coefficients.items())}

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coefficients.values())


def _reduced_cohomology(vertex_count: int, facets: list[tuple[int, ...]]) -> dict[int, int]:
    """Reduced simplicial cohomology of the complex generated by ``facets``
    on vertices 0..vertex_count-1.  Degree -1 holds the empty-complex class."""
    faces: set[tuple[int, ...]] = set()
    for facet in facets:
        fs = tuple(sorted(facet))
        k = len(fs)
        for mask in range(1, 2 ** k):
            faces.add(tuple(v for i, v in enumerate(fs) if mask >> i & 1))
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for face in faces:
        by_dim.setdefault(len(face) - 1, []).append(face)
    for d in by_dim:
        by_dim[d].sort()
    top = max(by_dim) if by_dim else -1
    # augmented complex: degree -1 is Q (the empty simplex)
    dims = {-1: 1}
    for d in range(0, top + 1):
        dims[d] = len(by_dim.get(d, []))
    diffs: dict[int, RationalMatrix] = {}
    if 0 in dims and dims.get(0, 0):
        diffs[-1] = RationalMatrix.from_rows([[1]] * dims[0])
    index = {d: {f: i for i, f in enumerate(by_dim.get(d, []))} for d in by_dim}
    for d in range(0, top):
        entries = {}
        for face in by_dim.get(d + 1, []):
            i = index[d + 1][face]
            for drop in range(len(face)):
                sub = face[:drop] + face[drop + 1:]
                entries[(i, index[d][sub])] = (-1) ** drop
        diffs[d] = RationalMatrix(dims[d + 1], dims[d], entries)
    complex_ = CochainComplex(dims, diffs)
    return {k: v for k, v in cohomology_dims(complex_).items() if v}


def _character_box(fan: Fan, divisor: dict[int, int]) -> list[tuple[int, int]]:
    """Bounding box containing every character with a nonzero contribution:
    the chamber vertices solve n x n ray subsystems with rhs -a or -a-1."""
    n = fan.rank
    lo = [0] * n
    hi = [0] * n
    for subset in combinations(range(len(fan.rays)), n):
        m = RationalMatrix.from_rows([list(map(Fraction, fan.rays[i])) for i in subset])
        if rank(m) < n:
            continue
        for signs in product((0, -1), repeat=n):
            rhs = [Fraction(-divisor[i] + s) for i, s in zip(subset, signs)]
            sol = solve_rational(m, rhs)
            if sol is None:
                continue
            for j, v in enumerate(sol):
                lo[j] = min(lo[j], floor(v))
                hi[j] = max(hi[j], -floor(-v))
    return [(lo[j] - 1, hi[j] + 1) for j in range(n)]


def divisor_cohomology(fan: Fan, divisor: dict[int, int]) -> dict[int, int]:
    """h^q(X_Sigma, O(D)) for an integral divisor D = sum a_i D_i.

    Sums, over lattice characters m in the relevant finite box, the reduced
    cohomology (one degree down) of the subcomplex of rays with <m, v> < -a.
    """
    if set(divisor) != set(range(len(fan.rays))):
        raise FanError("divisor must be defined on every ray")
    n = fan.rank
    box = _character_box(fan, divisor)
    out = {q: 0 for q in range(n + 1)}
    for m in product(*[range(lo, hi + 1) for lo, hi in box]):
        violating = [i for i, ray in enumerate(fan.rays)
                     if sum(a * b for a, b in zip(m, ray)) < -divisor[i]]
        vset = set(violating)
        facets = []
        for cone in fan.maximal_cones:
            bad = tuple(i for i in cone if i in vset)
            if bad:
                facets.append(bad)
        reduced = _reduced_cohomology(len(fan.rays), facets)
        for q_tilde, dim in reduced.items():
            q = q_tilde + 1
            if 0 <= q <= n:
                out[q] += dim
    return out


@dataclass
class LogHodgeTable:
    """Dimensions h^q of the twisted logarithmic p-forms, indexed by (p, q)."""

    rank: int
    entries: dict[tuple[int, int], int]
    variety_tag: str = "fan"
    weight_tag: str = "zero"

    def __post_init__(self):
        for (p, q), v in self.entries.items():
            if v < 0 or p > self.rank or q > self.rank:
                raise FanError(f"invalid log Hodge entry at {(p, q)}: {v}")

    def entry(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def to_json_dict(self) -> dict:
        return {
            "rank": self.rank,
            "variety": self.variety_tag,
            "weight": self.weight_tag,
            "entries": {f"{p},{q}": v for (p, q), v in sorted(self.entries.items()) if v},
        }


def log_hodge_numbers(fan: Fan, twist: QDivisor,
                      variety_tag: str = "fan") -> LogHodgeTable:
    """Entry (p, q) = C(n, p) * h^q(O(floor(twist))); twist zero gives the
    first-page table of the full-boundary toric triple."""
    twist.validate_on(fan)
    floored = twist.floor()
    h = divisor_cohomology(fan, floored)
    n = fan.rank
    entries = {}
    for p in range(n + 1):
        for q in range(n + 1):
            value = comb(n, p) * h.get(q, 0)
            if value:
                entries[(p, q)] = value
    weight_tag = "zero" if twist.is_zero() else \
        "+".join(f"{v}*D{i}" for i, v in sorted(twist.coefficients.items()) if v != 0)
    return LogHodgeTable(n, entries, variety_tag, weight_tag)


@dataclass
class E1SumCheck:
    per_degree: dict[int, tuple[int, int, bool]]   # k -> (sum, expected, ok)
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "per_degree": {str(k): {"sum": s, "expected": e, "pass": ok}
                           for k, (s, e, ok) in sorted(self.per_degree.items())},
            "pass": self.passed,
        }


def e1_sum_check(table: LogHodgeTable) -> E1SumCheck:
    """Degeneration bookkeeping: for the untwisted full boundary the totals
    along anti-diagonals must equal the torus Betti numbers C(n, k)."""
    n = table.rank
    per_degree = {}
    ok_all = True
    for k in range(n + 1):
        total = sum(table.entry(p, k - p) for p in range(k + 1))
        expected = comb(n, k)
        ok = total == expected
        ok_all = ok_all and ok
        per_degree[k] = (total, expected, ok)
    return E1SumCheck(per_degree, ok_all)


def weight_divisor(w: WeightFunction, fan: Fan) -> QDivisor:
    """The divisor with coefficient w(ray) on each boundary ray; callers take
    the floor separately.  Ray names must match the weight's ray set."""
    missing = [name for name in fan.ray_names if name not in w.ray_values]
    extra = [name for name in sorted(w.ray_values) if name not in fan.ray_names]
    if missing or extra:
        raise FanError(
            f"weight rays do not match fan rays (missing {missing}, extra {extra})")
    return QDivisor({i: w.ray_value(name) for i, name in enumerate(fan.ray_names)})


# standard test fans


def projective_line() -> Fan:
    return Fan([(1,), (-1,)], [(0,), (1,)])


def projective_plane() -> Fan:
    return Fan([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (0, 2)])


def hirzebruch(a: int) -> Fan:
    return Fan([(1, 0), (0, 1), (-1, a), (0, -1)],
               [(0, 1), (1, 2), (2, 3), (3, 0)])
