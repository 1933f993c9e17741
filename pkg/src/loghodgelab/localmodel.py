"""Truncated multigraded models of forms on (C^n, {z_1 ... z_r = 0}).

All three flavors (holomorphic, logarithmic, Laurent) are realized in one
common frame: generators are pairs (S, a) standing for z^a times the wedge
of dz_i/z_i for i in S with i <= r and dz_j for j in S with j > r.  In this
frame the differential

    d(z^a frame_S) = sum over j not in S of
        sign(S, j) * a_j * z^(a - e_j if j > r else a) frame_{S u {j}}

preserves the multidegree mu with mu_i = a_i for i <= r and
mu_j = a_j + [j in S] for j > r, so every computation splits into finite
blocks indexed by mu.  Truncation keeps exactly the multidegrees whose block
is complete inside the exponent window; the differential never leaves such a
block, which is what makes the truncated cohomology trustworthy.

The obstruction of a flavor is the cone of its inclusion into the Laurent
model (the localization at z_1 ... z_r).  The same group is recomputed by
assembling, over the nerve of the boundary components, the local cohomology
supported on each partial intersection (a Cech / Mayer-Vietoris total
complex); agreement of the two routes is recorded in the report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

from .complexes import ChainMap, CochainComplex, cohomology_dims, mapping_cone
from .linalg import RationalMatrix

HOLOMORPHIC = "holomorphic"
LOGARITHMIC = "logarithmic"
LAURENT = "laurent"
FLAVORS = (HOLOMORPHIC, LOGARITHMIC, LAURENT)


class LocalModelError(ValueError):
    pass


@dataclass(frozen=True)
class LocalModel:
    """(C^n, {z_1...z_r = 0}) with exponents truncated to |a_i| <= window."""

    n: int
    r: int
    window: int

    def __post_init__(self):
        if not (0 <= self.r <= self.n):
            raise LocalModelError(f"need 0 <= r <= n, got r={self.r}, n={self.n}")
        if self.n < 1:
            raise LocalModelError("ambient dimension must be at least 1")
        if self.window < 1:
            raise LocalModelError("window must be at least 1")


Mu = tuple[int, ...]
Subset = tuple[int, ...]   # sorted coordinate indices, 1-based


def _exponent(model: LocalModel, s: Subset, mu: Mu) -> tuple[int, ...]:
    return tuple(mu[i - 1] if i <= model.r else mu[i - 1] - (1 if i in s else 0)
                 for i in range(1, model.n + 1))


def _flavor_allows(model: LocalModel, flavor: str, s: Subset,
                   a: tuple[int, ...], localized: frozenset[int] = frozenset()) -> bool:
    """Exponent constraints in the common frame; ``localized`` coordinates
    (from a Cech localization) carry no lower bound."""
    for i in range(1, model.n + 1):
        ai = a[i - 1]
        if abs(ai) > model.window:
            return False
        if i in localized and i <= model.r:
            continue
        if i <= model.r:
            if flavor == LAURENT:
                continue
            if flavor == LOGARITHMIC and ai < 0:
                return False
            if flavor == HOLOMORPHIC:
                if ai < (1 if i in s else 0):
                    return False
        else:
            if ai < 0:
                return False
    return True


def reliable_multidegrees(model: LocalModel, flavor: str) -> Iterator[Mu]:
    """Multidegrees whose block lies entirely inside the window."""
    lo = -model.window if flavor == LAURENT else 0
    ranges = []
    for i in range(1, model.n + 1):
        if i <= model.r:
            ranges.append(range(lo, model.window + 1))
        else:
            ranges.append(range(0, model.window + 1))
    return product(*ranges)


def _sign_insert(s: Subset, j: int) -> int:
    return (-1) ** sum(1 for i in s if i < j)


def block_basis(model: LocalModel, flavor: str, mu: Mu, p: int,
                localized: frozenset[int] = frozenset()) -> list[Subset]:
    out = []
    for s in combinations(range(1, model.n + 1), p):
        a = _exponent(model, s, mu)
        if _flavor_allows(model, flavor, s, a, localized):
            out.append(s)
    return out


def block_complex(model: LocalModel, flavor: str, mu: Mu) -> CochainComplex:
    """The multidegree-mu block of the flavor's form complex, degrees 0..n."""
    basis = {p: block_basis(model, flavor, mu, p) for p in range(model.n + 1)}
    dims = {p: len(basis[p]) for p in range(model.n + 1)}
    index = {p: {s: i for i, s in enumerate(basis[p])} for p in basis}
    diffs = {}
    for p in range(model.n):
        entries = {}
        for col, s in enumerate(basis[p]):
            a = _exponent(model, s, mu)
            for j in range(1, model.n + 1):
                if j in s or a[j - 1] == 0:
                    continue
                target = tuple(sorted(s + (j,)))
                row = index[p + 1].get(target)
                if row is None:
                    continue
                entries[(row, col)] = Fraction(_sign_insert(s, j) * a[j - 1])
        diffs[p] = RationalMatrix(dims[p + 1], dims[p], entries)
    return CochainComplex(dims, diffs)


def block_inclusion(model: LocalModel, source_flavor: str, mu: Mu) -> ChainMap:
    """Inclusion of a flavor block into the Laurent block at the same mu."""
    if source_flavor not in (HOLOMORPHIC, LOGARITHMIC):
        raise LocalModelError(f"source flavor must be holomorphic or logarithmic, "
                              f"got {source_flavor!r}")
    src = block_complex(model, source_flavor, mu)
    tgt = block_complex(model, LAURENT, mu)
    components = {}
    for p in range(model.n + 1):
        sbasis = block_basis(model, source_flavor, mu, p)
        tindex = {s: i for i, s in enumerate(block_basis(model, LAURENT, mu, p))}
        entries = {}
        for col, s in enumerate(sbasis):
            entries[(tindex[s], col)] = Fraction(1)
        components[p] = RationalMatrix(tgt.dim(p), src.dim(p), entries)
    return ChainMap(src, tgt, components)


def build_form_complex(model: LocalModel, flavor: str) -> CochainComplex:
    """Direct sum of all reliable multidegree blocks, ordered by multidegree."""
    if flavor not in FLAVORS:
        raise LocalModelError(f"unknown flavor {flavor!r}")
    blocks = [block_complex(model, flavor, mu)
              for mu in sorted(reliable_multidegrees(model, flavor))]
    dims = {p: sum(b.dim(p) for b in blocks) for p in range(model.n + 1)}
    diffs = {}
    for p in range(model.n):
        entries = {}
        row_off = col_off = 0
        for b in blocks:
            for (i, j), v in b.differential(p).entries.items():
                entries[(i + row_off, j + col_off)] = v
            row_off += b.dim(p + 1)
            col_off += b.dim(p)
        diffs[p] = RationalMatrix(dims[p + 1], dims[p], entries)
    return CochainComplex(dims, diffs)


def form_cohomology(model: LocalModel, flavor: str) -> dict[int, int]:
    """Blockwise cohomology of the flavor's form complex."""
    total = {p: 0 for p in range(model.n + 1)}
    for mu in reliable_multidegrees(model, flavor):
        for p, dim in cohomology_dims(block_complex(model, flavor, mu)).items():
            total[p] += dim
    return total


# ---------------------------------------------------------------------------
# obstruction stalk: direct cone and Mayer-Vietoris assembly
# ---------------------------------------------------------------------------


@dataclass
class ObstructionStalkReport:
    model: LocalModel
    source_flavor: str
    direct: dict[int, int]
    direct_by_multidegree: dict[int, dict[Mu, int]]
    per_subset: Optional[dict[Subset, dict[int, int]]] = None
    assembled: Optional[dict[int, int]] = None
    assembled_by_multidegree: Optional[dict[int, dict[Mu, int]]] = None
    matches: Optional[bool] = None

    def to_json_dict(self) -> dict:
        def mu_map(by_mu):
            return {str(p): {",".join(map(str, mu)): d for mu, d in sorted(m.items())}
                    for p, m in sorted(by_mu.items())}

        out = {
            "model": {"n": self.model.n, "r": self.model.r, "window": self.model.window},
            "source_flavor": self.source_flavor,
            "direct": {str(p): d for p, d in sorted(self.direct.items())},
            "direct_by_multidegree": mu_map(self.direct_by_multidegree),
        }
        if self.assembled is not None:
            out["assembled"] = {str(p): d for p, d in sorted(self.assembled.items())}
            out["assembled_by_multidegree"] = mu_map(self.assembled_by_multidegree or {})
            out["per_subset"] = {
                ",".join(map(str, i_set)): {str(p): d for p, d in sorted(m.items())}
                for i_set, m in sorted((self.per_subset or {}).items())}
            out["matches"] = self.matches
        return out


def obstruction_cone(model: LocalModel, source_flavor: str) -> ObstructionStalkReport:
    """Cone of (flavor -> Laurent) blockwise; H dims per degree and multidegree."""
    direct: dict[int, int] = {p: 0 for p in range(model.n + 1)}
    by_mu: dict[int, dict[Mu, int]] = {}
    for mu in reliable_multidegrees(model, LAURENT):
        cone = mapping_cone(block_inclusion(model, source_flavor, mu))
        for p, dim in cohomology_dims(cone).items():
            if dim == 0:
                continue
            direct[p] = direct.get(p, 0) + dim
            by_mu.setdefault(p, {})[mu] = dim
    return ObstructionStalkReport(model, source_flavor, direct, by_mu)


# Cech positions: localizations of the module at subsets T of some I <= {1..r}


def _cech_column(model: LocalModel, flavor: str, i_set: Subset,
                 mu: Mu) -> dict[tuple[Subset, Subset], int]:
    """Basis (T, S) of the Cech complex of the localized form complex at mu,
    as a map (T, S) -> Cech degree |T|."""
    out = {}
    for t_size in range(len(i_set) + 1):
        for t in combinations(i_set, t_size):
            localized = frozenset(t)
            for p in range(model.n + 1):
                for s in block_basis(model, flavor, mu, p, localized):
                    out[(t, s)] = t_size
    return out


def koszul_local_cohomology(model: LocalModel, i_set: Sequence[int], p: int) -> dict[Mu, int]:
    """Graded dims of H^{|I|} with support (z_i : i in I) of the logarithmic
    p-forms, inside the window.

    The p-forms are free over the coordinate ring, so the grading here is by
    the coefficient exponent a (the frames contribute C(n, p) copies per
    exponent and do not shift the grading).  Computed two ways: the Cech
    cochain complex on {z_i != 0, i in I}, and the closed-form stable-Koszul
    count (one class per frame at every a with a_i <= -1 exactly on I and
    a_j >= 0 off I); the two must agree, and the Cech cohomology must be
    concentrated in degree |I|.
    """
    i_set = tuple(sorted(set(int(i) for i in i_set)))
    if not i_set:
        raise LocalModelError("subset I must be nonempty")
    if any(i < 1 or i > model.r for i in i_set):
        raise LocalModelError(f"subset {i_set} is not contained in 1..r={model.r}")
    if not (0 <= p <= model.n):
        raise LocalModelError(f"form degree {p} out of range 0..{model.n}")
    s_card = len(i_set)
    frames = list(combinations(range(1, model.n + 1), p))
    out: dict[Mu, int] = {}
    ranges = [range(-model.window if i in i_set else 0, model.window + 1)
              for i in range(1, model.n + 1)]
    for a in product(*ranges):
        # Cech route: positions (T, frame) with T <= I; the monomial z^a is
        # present at T iff a_i >= 0 for every coordinate not freed by T
        positions = [t for size in range(s_card + 1)
                     for t in combinations(i_set, size)
                     if all(a[i - 1] >= 0 for i in range(1, model.n + 1)
                            if i not in t)]
        by_deg: dict[int, list[tuple[Subset, Subset]]] = {}
        for t in positions:
            for s in frames:
                by_deg.setdefault(len(t), []).append((t, s))
        for deg in by_deg:
            by_deg[deg].sort()
        dims = {d: len(by_deg.get(d, [])) for d in range(s_card + 1)}
        index = {d: {ts: i for i, ts in enumerate(by_deg.get(d, []))} for d in dims}
        diffs = {}
        for d in range(s_card):
            entries = {}
            for col, (t, s) in enumerate(by_deg.get(d, [])):
                for j in i_set:
                    if j in t:
                        continue
                    target = (tuple(sorted(t + (j,))), s)
                    row = index[d + 1].get(target)
                    if row is not None:
                        entries[(row, col)] = Fraction(_sign_insert(t, j))
            diffs[d] = RationalMatrix(dims[d + 1], dims[d], entries)
        coh = cohomology_dims(CochainComplex(dims, diffs))
        cech_dim = coh.get(s_card, 0)
        for d, v in coh.items():
            if d != s_card and v:
                raise LocalModelError(
                    "internal: local cohomology not concentrated in degree |I|")
        # stable-Koszul closed form
        valid = all(a[i - 1] <= -1 for i in i_set) and \
            all(a[j - 1] >= 0 for j in range(1, model.n + 1) if j not in i_set)
        count = len(frames) if valid else 0
        if cech_dim != count:
            raise LocalModelError(
                f"Cech and Koszul-dual counts disagree at exponent {a}: "
                f"{cech_dim} vs {count}")
        if cech_dim:
            out[a] = cech_dim
    return dict(sorted(out.items()))


def _mv_total_block(model: LocalModel, flavor: str, mu: Mu) -> CochainComplex:
    """Total complex over the nerve of the boundary components:

        position (I, T, S), total degree |S| + |T| - |I| + 1,
        D = d_form + (-1)^{|S|} cech + (-1)^{|S|+|T|} nerve-restriction.
    """
    r = model.r
    basis: dict[int, list[tuple[Subset, Subset, Subset]]] = {}
    for size in range(1, r + 1):
        for i_set in combinations(range(1, r + 1), size):
            for (t, s), _ in _cech_column(model, flavor, i_set, mu).items():
                k = len(s) + len(t) - len(i_set) + 1
                basis.setdefault(k, []).append((i_set, t, s))
    if not basis:
        return CochainComplex({0: 0}, {})
    lo, hi = min(basis), max(basis)
    for k in range(lo, hi + 1):
        basis.setdefault(k, []).sort()
    dims = {k: len(basis[k]) for k in range(lo, hi + 1)}
    index = {k: {key: i for i, key in enumerate(basis[k])} for k in basis}
    diffs = {}
    for k in range(lo, hi):
        entries: dict[tuple[int, int], Fraction] = {}

        def add(row_key, col, value):
            row = index[k + 1].get(row_key)
            if row is not None and value != 0:
                entries[(row, col)] = entries.get((row, col), Fraction(0)) + value

        for col, (i_set, t, s) in enumerate(basis[k]):
            a = _exponent(model, s, mu)
            localized = frozenset(t)
            # form direction
            for j in range(1, model.n + 1):
                if j in s or a[j - 1] == 0:
                    continue
                s2 = tuple(sorted(s + (j,)))
                if _flavor_allows(model, flavor, s2, _exponent(model, s2, mu), localized):
                    add((i_set, t, s2), col, Fraction(_sign_insert(s, j) * a[j - 1]))
            # Cech direction, sign (-1)^{|S|}
            for j in i_set:
                if j in t:
                    continue
                t2 = tuple(sorted(t + (j,)))
                add((i_set, t2, s), col,
                    Fraction((-1) ** len(s) * _sign_insert(t, j)))
            # nerve direction (restriction to smaller I), sign (-1)^{|S| + |T|}
            for j in i_set:
                if j in t:
                    continue
                i2 = tuple(x for x in i_set if x != j)
                if not i2:
                    continue
                add((i2, t, s), col,
                    Fraction((-1) ** (len(s) + len(t)) * _sign_insert(tuple(x for x in i_set if x != j), j)))
        diffs[k] = RationalMatrix(dims[k + 1], dims[k], entries)
    return CochainComplex(dims, diffs)


def _subset_total_block(model: LocalModel, flavor: str, i_set: Subset, mu: Mu) -> CochainComplex:
    """Totalized Cech complex of one support subset I (degrees |S| + |T|)."""
    cols = _cech_column(model, flavor, i_set, mu)
    basis: dict[int, list[tuple[Subset, Subset]]] = {}
    for (t, s), _ in cols.items():
        basis.setdefault(len(s) + len(t), []).append((t, s))
    if not basis:
        return CochainComplex({0: 0}, {})
    lo, hi = min(basis), max(basis)
    for k in range(lo, hi + 1):
        basis.setdefault(k, []).sort()
    dims = {k: len(basis[k]) for k in range(lo, hi + 1)}
    index = {k: {key: i for i, key in enumerate(basis[k])} for k in basis}
    diffs = {}
    for k in range(lo, hi):
        entries: dict[tuple[int, int], Fraction] = {}
        for col, (t, s) in enumerate(basis[k]):
            a = _exponent(model, s, mu)
            localized = frozenset(t)
            for j in range(1, model.n + 1):
                if j in s or a[j - 1] == 0:
                    continue
                s2 = tuple(sorted(s + (j,)))
                if _flavor_allows(model, flavor, s2, _exponent(model, s2, mu), localized):
                    row = index[k + 1].get((t, s2))
                    if row is not None:
                        entries[(row, col)] = Fraction(_sign_insert(s, j) * a[j - 1])
            for j in i_set:
                if j in t:
                    continue
                t2 = tuple(sorted(t + (j,)))
                row = index[k + 1].get((t2, s))
                if row is not None:
                    entries[(row, col)] = Fraction((-1) ** len(s) * _sign_insert(t, j))
        diffs[k] = RationalMatrix(dims[k + 1], dims[k], entries)
    return CochainComplex(dims, diffs)


def assemble_stalk(model: LocalModel, source_flavor: str) -> ObstructionStalkReport:
    """Mayer-Vietoris assembly of the obstruction stalk, with the direct cone
    computed alongside and compared degree by degree and multidegree by
    multidegree."""
    report = obstruction_cone(model, source_flavor)
    if model.r == 0:
        # no boundary: the nerve is empty and so is the obstruction
        report.per_subset = {}
        report.assembled = {p: 0 for p in range(model.n + 1)}
        report.assembled_by_multidegree = {}
        report.matches = report.assembled == report.direct
        return report
    assembled: dict[int, int] = {p: 0 for p in range(model.n + 1)}
    assembled_by_mu: dict[int, dict[Mu, int]] = {}
    per_subset: dict[Subset, dict[int, int]] = {}
    for mu in reliable_multidegrees(model, LAURENT):
        total = _mv_total_block(model, source_flavor, mu)
        for k, dim in cohomology_dims(total).items():
            if dim == 0:
                continue
            p = k - 1   # cone degree p corresponds to assembled degree p + 1
            assembled[p] = assembled.get(p, 0) + dim
            assembled_by_mu.setdefault(p, {})[mu] = dim
        for size in range(1, model.r + 1):
            for i_set in combinations(range(1, model.r + 1), size):
                sub = _subset_total_block(model, source_flavor, i_set, mu)
                for k, dim in cohomology_dims(sub).items():
                    if dim == 0:
                        continue
                    p = k - len(i_set)   # contribution H^{p + |I|} at degree p
                    slot = per_subset.setdefault(i_set, {})
                    slot[p] = slot.get(p, 0) + dim
    report.per_subset = dict(sorted(per_subset.items()))
    report.assembled = assembled
    report.assembled_by_multidegree = assembled_by_mu
    same_totals = all(assembled.get(p, 0) == report.direct.get(p, 0)
                      for p in set(assembled) | set(report.direct))
    same_graded = report.assembled_by_multidegree == report.direct_by_multidegree
    report.matches = same_totals and same_graded
    return report
