"""Cochain complexes over Q: mapping cones, long exact sequences, filtered
complexes and their spectral sequences.

Complexes are bounded, with an explicit contiguous degree range.  Filtrations
are stored as explicit subspace bases per degree (not index markers), because
the weighted filtrations built elsewhere are not coordinate-aligned.  Page
computation is by explicit subquotient bases

    Z_r^{p,q} = { x in F^p C^{p+q} : d x in F^{p+r} C^{p+q+1} }
    E_r^{p,q} = Z_r^{p,q} / ( Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2} )

rather than derived couples, so every page can be checked directly against
the cohomology of the previous one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .linalg import (
    RationalMatrix,
    column_space_basis,
    contains_space,
    extend_basis,
    kernel_basis,
    preimage_space,
    rank,
    solve_rational,
    sum_spaces,
)


class ComplexError(ValueError):
    pass


class ChainMapError(ValueError):
    pass


class FiltrationError(ValueError):
    pass


class CochainComplex:
    """Bounded complex of finite-dimensional Q-vector spaces.

    ``dims`` maps every degree of a contiguous range to a dimension (zero
    allowed); ``differentials[k]`` is the matrix of d_k : C^k -> C^{k+1},
    of shape dims[k+1] x dims[k].  d o d = 0 is enforced at construction.
    """

    def __init__(self, dims: dict[int, int], differentials: dict[int, RationalMatrix]):
        if not dims:
            raise ComplexError("complex needs at least one degree")
        lo, hi = min(dims), max(dims)
        for k in range(lo, hi + 1):
            if k not in dims:
                raise ComplexError(f"degree range not contiguous: missing degree {k}")
            if dims[k] < 0:
                raise ComplexError(f"negative dimension in degree {k}")
        self.min_degree = lo
        self.max_degree = hi
        self.dims = {k: dims[k] for k in range(lo, hi + 1)}
        self._differentials: dict[int, RationalMatrix] = {}
        for k, m in differentials.items():
            expected = (self.dim(k + 1), self.dim(k))
            if (m.rows, m.cols) != expected:
                raise ComplexError(
                    f"differential at degree {k} has shape {(m.rows, m.cols)}, expected {expected}")
            if not m.is_zero():
                self._differentials[k] = m
        for k in range(lo - 1, hi + 1):
            comp = self.differential(k + 1) * self.differential(k)
            if not comp.is_zero():
                raise ComplexError(f"d o d != 0 at degree {k}")

    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def differential(self, k: int) -> RationalMatrix:
        d = self._differentials.get(k)
        if d is None:
            return RationalMatrix.zeros(self.dim(k + 1), self.dim(k))
        return d

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in self.dims.items())

    def __repr__(self) -> str:
        return (f"CochainComplex(degrees {self.min_degree}..{self.max_degree}, "
                f"dims {list(self.dims.values())})")


@dataclass(frozen=True)
class ChainMap:
    """Degreewise linear map commuting with the differentials."""

    source: CochainComplex
    target: CochainComplex
    components: dict[int, RationalMatrix]

    def __post_init__(self):
        for k, m in self.components.items():
            expected = (self.target.dim(k), self.source.dim(k))
            if (m.rows, m.cols) != expected:
                raise ChainMapError(
                    f"component at degree {k} has shape {(m.rows, m.cols)}, expected {expected}")
        lo = min(self.source.min_degree, self.target.min_degree)
        hi = max(self.source.max_degree, self.target.max_degree)
        for k in range(lo, hi + 1):
            lhs = self.target.differential(k) * self.component(k)
            rhs = self.component(k + 1) * self.source.differential(k)
            if lhs != rhs:
                raise ChainMapError(f"map does not commute with differentials at degree {k}")

    def component(self, k: int) -> RationalMatrix:
        m = self.components.get(k)
        if m is None:
            return RationalMatrix.zeros(self.target.dim(k), self.source.dim(k))
        return m


def zero_chain_map(source: CochainComplex, target: CochainComplex) -> ChainMap:
    return ChainMap(source, target, {})


def identity_chain_map(c: CochainComplex) -> ChainMap:
    return ChainMap(c, c, {k: RationalMatrix.identity(c.dim(k))
                           for k in c.degrees() if c.dim(k)})


# ---------------------------------------------------------------------------
# cohomology
# ---------------------------------------------------------------------------


def cohomology_dims(c: CochainComplex) -> dict[int, int]:
    """dim ker(d_k) - rank(d_{k-1}) per degree."""
    out = {}
    rank_d = {k: rank(c.differential(k)) for k in range(c.min_degree - 1, c.max_degree + 1)}
    for k in c.degrees():
        out[k] = c.dim(k) - rank_d[k] - rank_d[k - 1]
    return out


def cohomology_representatives(c: CochainComplex, k: int) -> tuple[RationalMatrix, RationalMatrix]:
    """(R, B): columns of R are cocycles representing a basis of H^k,
    columns of B a basis of the coboundaries im d_{k-1}."""
    ker = kernel_basis(c.differential(k))
    z = RationalMatrix.from_columns(ker, c.dim(k))
    b = column_space_basis(c.differential(k - 1))
    chosen = extend_basis(b, z)
    return z.submatrix_columns(chosen), b


def class_coordinates(reps: RationalMatrix, boundaries: RationalMatrix,
                      vector: Sequence) -> tuple[Fraction, ...]:
    """Coordinates of the class of a cocycle in the representative basis."""
    combined = reps.hstack(boundaries)
    sol = solve_rational(combined, vector)
    if sol is None:
        raise ComplexError("vector is not a cocycle of the given complex")
    return sol[:reps.cols]


def induced_map_on_cohomology(f: ChainMap, k: int,
                              source_data=None, target_data=None) -> RationalMatrix:
    """Matrix of H^k(f) in the deterministic representative bases."""
    reps_s, _ = source_data if source_data else cohomology_representatives(f.source, k)
    reps_t, bnd_t = target_data if target_data else cohomology_representatives(f.target, k)
    fk = f.component(k)
    columns = []
    for j in range(reps_s.cols):
        image = fk.apply(reps_s.column(j))
        columns.append(class_coordinates(reps_t, bnd_t, image))
    return RationalMatrix.from_columns(columns, reps_t.cols)


# ---------------------------------------------------------------------------
# mapping cone and long exact sequence
# ---------------------------------------------------------------------------


def mapping_cone(f: ChainMap) -> CochainComplex:
    """Cone of f with degree-k space target_k (+) source_{k+1} and

        d(t, s) = (d_target t + f(s), -d_source s).
    """
    src, tgt = f.source, f.target
    lo = min(tgt.min_degree, src.min_degree - 1)
    hi = max(tgt.max_degree, src.max_degree - 1)
    dims = {k: tgt.dim(k) + src.dim(k + 1) for k in range(lo, hi + 1)}
    diffs = {}
    for k in range(lo, hi):
        entries = {}
        for (i, j), v in tgt.differential(k).entries.items():
            entries[(i, j)] = v
        for (i, j), v in f.component(k + 1).entries.items():
            entries[(i, j + tgt.dim(k))] = v
        for (i, j), v in src.differential(k + 1).entries.items():
            entries[(i + tgt.dim(k + 1), j + tgt.dim(k))] = -v
        diffs[k] = RationalMatrix(dims[k + 1], dims[k], entries)
    return CochainComplex(dims, diffs)


@dataclass
class ExactnessNode:
    degree: int
    term: str                       # "source", "target" or "cone"
    dim: int
    rank_in: int
    rank_out: int
    exact: bool


@dataclass
class LongExactSequenceReport:
    source_cohomology: dict[int, int]
    target_cohomology: dict[int, int]
    cone_cohomology: dict[int, int]
    nodes: list[ExactnessNode]
    exact: bool

    def to_json_dict(self) -> dict:
        return {
            "source_cohomology": {str(k): v for k, v in sorted(self.source_cohomology.items())},
            "target_cohomology": {str(k): v for k, v in sorted(self.target_cohomology.items())},
            "cone_cohomology": {str(k): v for k, v in sorted(self.cone_cohomology.items())},
            "nodes": [
                {"degree": n.degree, "term": n.term, "dim": n.dim,
                 "rank_in": n.rank_in, "rank_out": n.rank_out, "exact": n.exact}
                for n in self.nodes
            ],
            "exact": self.exact,
        }


def long_exact_sequence(f: ChainMap) -> LongExactSequenceReport:
    """Cohomology of source, target and cone with explicit connecting maps;
    exactness (image = kernel) is verified at every node by rank bookkeeping.

    The nodes are ... -> H^k(src) -f*-> H^k(tgt) -i*-> H^k(cone)
    -delta-> H^{k+1}(src) -> ...
    """
    src, tgt = f.source, f.target
    cone = mapping_cone(f)
    lo = min(src.min_degree, cone.min_degree)
    hi = max(src.max_degree, cone.max_degree)

    data_s = {k: cohomology_representatives(src, k) for k in range(lo, hi + 2)}
    data_t = {k: cohomology_representatives(tgt, k) for k in range(lo, hi + 2)}
    data_c = {k: cohomology_representatives(cone, k) for k in range(lo, hi + 2)}

    f_star = {}
    i_star = {}
    delta = {}
    for k in range(lo, hi + 1):
        f_star[k] = induced_map_on_cohomology(f, k, data_s[k], data_t[k])
        # inclusion t |-> (t, 0) of the target into the cone
        reps_t, _ = data_t[k]
        reps_c, bnd_c = data_c[k]
        cols = []
        for j in range(reps_t.cols):
            cone_vec = list(reps_t.column(j)) + [Fraction(0)] * src.dim(k + 1)
            cols.append(class_coordinates(reps_c, bnd_c, cone_vec))
        i_star[k] = RationalMatrix.from_columns(cols, reps_c.cols)
        # connecting map (t, s) |-> s, landing in H^{k+1}(source)
        reps_s1, bnd_s1 = data_s[k + 1]
        cols = []
        for j in range(reps_c.cols):
            s_part = reps_c.column(j)[tgt.dim(k):]
            cols.append(class_coordinates(reps_s1, bnd_s1, s_part))
        delta[k] = RationalMatrix.from_columns(cols, reps_s1.cols)

    nodes = []
    exact = True
    for k in range(lo, hi + 1):
        triples = [
            ("source", data_s[k][0].cols, delta.get(k - 1), f_star[k]),
            ("target", data_t[k][0].cols, f_star[k], i_star[k]),
            ("cone", data_c[k][0].cols, i_star[k], delta[k]),
        ]
        for term, dim, incoming, outgoing in triples:
            rank_in = rank(incoming) if incoming is not None else 0
            rank_out = rank(outgoing)
            composite_zero = incoming is None or (outgoing * incoming).is_zero()
            node_exact = composite_zero and (rank_in + rank_out == dim)
            nodes.append(ExactnessNode(k, term, dim, rank_in, rank_out, node_exact))
            exact = exact and node_exact

    return LongExactSequenceReport(
        source_cohomology=cohomology_dims(src),
        target_cohomology=cohomology_dims(tgt),
        cone_cohomology=cohomology_dims(cone),
        nodes=nodes,
        exact=exact,
    )


# ---------------------------------------------------------------------------
# filtered complexes and spectral sequences
# ---------------------------------------------------------------------------


class FilteredComplex:
    """Decreasing filtration F^0 ⊇ F^1 ⊇ ... ⊇ F^P by explicit subspace bases.

    ``levels[p][k]`` is a matrix whose columns span F^p C^k.  F^0 must be the
    whole complex (exhaustive); F^{P+1} = 0.  Every level must be a
    subcomplex and the levels must be nested.
    """

    def __init__(self, underlying: CochainComplex, levels: list[dict[int, RationalMatrix]]):
        self.underlying = underlying
        if not levels:
            raise FiltrationError("need at least one filtration level")
        norm: list[dict[int, RationalMatrix]] = []
        for p, level in enumerate(levels):
            fixed = {}
            for k in underlying.degrees():
                basis = level.get(k, RationalMatrix.zeros(underlying.dim(k), 0))
                if basis.rows != underlying.dim(k):
                    raise FiltrationError(
                        f"level {p} basis at degree {k} has ambient dimension "
                        f"{basis.rows}, expected {underlying.dim(k)}")
                fixed[k] = column_space_basis(basis)
            norm.append(fixed)
        for k in underlying.degrees():
            if rank(norm[0][k]) != underlying.dim(k):
                raise FiltrationError(f"filtration not exhaustive at degree {k}: F^0 != C^{k}")
        for p in range(len(norm) - 1):
            for k in underlying.degrees():
                if not contains_space(norm[p][k], norm[p + 1][k]):
                    raise FiltrationError(f"levels not nested at level {p + 1}, degree {k}")
        for p, level in enumerate(norm):
            for k in underlying.degrees():
                image_cols = [underlying.differential(k).apply(level[k].column(j))
                              for j in range(level[k].cols)]
                img = RationalMatrix.from_columns(image_cols, underlying.dim(k + 1))
                tgt = level.get(k + 1, RationalMatrix.zeros(underlying.dim(k + 1), 0))
                if not contains_space(tgt, img):
                    raise FiltrationError(
                        f"level {p} is not a subcomplex: d(F^{p} C^{k}) is not "
                        f"contained in F^{p} C^{k + 1}")
        self.levels = norm

    @property
    def depth(self) -> int:
        """Number of stored levels (indices 0..depth-1); F^depth = 0."""
        return len(self.levels)

    def level_basis(self, p: int, k: int) -> RationalMatrix:
        n = self.underlying.dim(k)
        if p < 0:
            return RationalMatrix.identity(n)
        if p >= len(self.levels):
            return RationalMatrix.zeros(n, 0)
        if k < self.underlying.min_degree or k > self.underlying.max_degree:
            return RationalMatrix.zeros(n, 0)
        return self.levels[p][k]


def trivial_filtration(c: CochainComplex) -> FilteredComplex:
    return FilteredComplex(c, [{k: RationalMatrix.identity(c.dim(k)) for k in c.degrees()}])


def stupid_filtration(c: CochainComplex) -> FilteredComplex:
    """F^p = the subcomplex of degrees >= min_degree + p."""
    levels = []
    span = c.max_degree - c.min_degree + 1
    for p in range(span):
        cutoff = c.min_degree + p
        levels.append({k: (RationalMatrix.identity(c.dim(k)) if k >= cutoff
                           else RationalMatrix.zeros(c.dim(k), 0))
                       for k in c.degrees()})
    return FilteredComplex(c, levels)


@dataclass
class SpectralSequencePage:
    r: int
    entries: dict[tuple[int, int], int]
    differentials: dict[tuple[int, int], RationalMatrix]

    def entry(self, p: int, q: int) -> int:
        return self.entries.get((p, q), 0)

    def differential(self, p: int, q: int) -> Optional[RationalMatrix]:
        return self.differentials.get((p, q))

    def is_zero_page_differential(self) -> bool:
        return all(m.is_zero() for m in self.differentials.values())

    def total_dims(self) -> dict[int, int]:
        totals: dict[int, int] = {}
        for (p, q), n in self.entries.items():
            totals[p + q] = totals.get(p + q, 0) + n
        return {k: v for k, v in sorted(totals.items()) if v}

    def to_json_dict(self) -> dict:
        return {
            "r": self.r,
            "entries": {f"{p},{q}": n for (p, q), n in sorted(self.entries.items()) if n},
            "nonzero_differentials": sorted(
                f"{p},{q}" for (p, q), m in self.differentials.items() if not m.is_zero()),
        }


class _PageEntry:
    """Representatives of E_r^{p,q} = Z_r / D_r for one spot (p, q)."""

    __slots__ = ("reps", "denominator")

    def __init__(self, reps: RationalMatrix, denominator: RationalMatrix):
        self.reps = reps
        self.denominator = denominator


def spectral_sequence(fc: FilteredComplex, r_max: Optional[int] = None) -> list[SpectralSequencePage]:
    """Pages E_0 .. E_{r_max} of the filtration spectral sequence.

    After computing d_r, the page E_{r+1} is checked against the cohomology
    of (E_r, d_r); a mismatch raises (it would indicate an internal bug).
    Default r_max is depth + 1, past which all pages are stable.
    """
    c = fc.underlying
    depth = fc.depth
    if r_max is None:
        r_max = depth + 1
    r_max = max(r_max, 0)

    pq_pairs = [(p, k - p) for k in c.degrees() for p in range(depth)]

    z_cache: dict[tuple[int, int, int], RationalMatrix] = {}

    def z(r: int, p: int, k: int) -> RationalMatrix:
        """Z_r^{p, k-p} = F^p C^k ∩ d^{-1}(F^{p+r} C^{k+1}); for r <= 0 this
        is just F^p C^k (d preserves the filtration)."""
        if r <= 0:
            return fc.level_basis(p, k)
        key = (r, p, k)
        if key not in z_cache:
            fp = fc.level_basis(p, k)
            if fp.cols == 0:
                z_cache[key] = fp
            else:
                d = c.differential(k)
                images = [d.apply(fp.column(j)) for j in range(fp.cols)]
                dmat = RationalMatrix.from_columns(images, c.dim(k + 1))
                coeff = preimage_space(dmat, fc.level_basis(p + r, k + 1))
                vecs = [fp.apply(coeff.column(j)) for j in range(coeff.cols)]
                z_cache[key] = column_space_basis(
                    RationalMatrix.from_columns(vecs, c.dim(k)))
        return z_cache[key]

    def page_entries(r: int) -> dict[tuple[int, int], _PageEntry]:
        data = {}
        for (p, q) in pq_pairs:
            k = p + q
            zr = z(r, p, k)
            z_above = z(r - 1, p + 1, k)
            lower = z(r - 1, p - r + 1, k - 1)
            d_prev = c.differential(k - 1)
            images = [d_prev.apply(lower.column(j)) for j in range(lower.cols)]
            img = RationalMatrix.from_columns(images, c.dim(k))
            denom = sum_spaces(z_above, img)
            if not contains_space(zr, denom):
                raise ComplexError("internal: page denominator not contained in Z_r")
            chosen = extend_basis(denom, zr)
            data[(p, q)] = _PageEntry(zr.submatrix_columns(chosen), denom)
        return data

    pages: list[SpectralSequencePage] = []
    prev_cohomology: Optional[dict[tuple[int, int], int]] = None
    for r in range(0, r_max + 1):
        data = page_entries(r)
        entries = {pq: e.reps.cols for pq, e in data.items() if e.reps.cols}
        diffs: dict[tuple[int, int], RationalMatrix] = {}
        for (p, q), e in data.items():
            if e.reps.cols == 0:
                continue
            target = data.get((p + r, q - r + 1))
            d = c.differential(p + q)
            cols = []
            t_cols = target.reps.cols if target else 0
            for j in range(e.reps.cols):
                image = d.apply(e.reps.column(j))
                if target is None:
                    if any(v != 0 for v in image):
                        raise ComplexError("internal: d_r image outside the page grid")
                    cols.append(tuple())
                else:
                    sol = solve_rational(target.reps.hstack(target.denominator), image)
                    if sol is None:
                        raise ComplexError("internal: d_r image not in target page space")
                    cols.append(sol[:t_cols])
            diffs[(p, q)] = RationalMatrix.from_columns(cols, t_cols)
        page = SpectralSequencePage(r, entries, diffs)
        if prev_cohomology is not None:
            for pq in set(entries) | set(prev_cohomology):
                if entries.get(pq, 0) != prev_cohomology.get(pq, 0):
                    raise ComplexError(
                        f"internal: page {r} entry at {pq} does not match "
                        f"cohomology of page {r - 1}")
        coh: dict[tuple[int, int], int] = {}
        for (p, q), n in entries.items():
            out = diffs.get((p, q))
            inc = diffs.get((p - r, q + r - 1))
            dim = n - (rank(out) if out is not None else 0) \
                    - (rank(inc) if inc is not None else 0)
            if dim:
                coh[(p, q)] = dim
        prev_cohomology = coh
        pages.append(page)
    return pages


def e_infinity_totals(fc: FilteredComplex) -> dict[int, int]:
    return spectral_sequence(fc)[-1].total_dims()


def degeneration_check(fc: FilteredComplex) -> tuple[bool, Optional[int]]:
    """True iff every d_r with r >= 1 vanishes; else the first nonzero page."""
    pages = spectral_sequence(fc)
    for page in pages[1:]:
        if not page.is_zero_page_differential():
            return False, page.r
    return True, None
