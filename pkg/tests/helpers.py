"""Shared generators for randomized structural tests (seeded, deterministic)."""

import random

from loghodgelab.complexes import ChainMap, CochainComplex
from loghodgelab.linalg import RationalMatrix, kernel_basis


def random_matrix(rng, rows, cols, lo=-3, hi=3):
    if rows == 0 or cols == 0:
        return RationalMatrix.zeros(rows, cols)
    return RationalMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


def random_complex(rng: random.Random, max_total_dim: int = 8) -> CochainComplex:
    """Random bounded complex with d built row-by-row inside ker(d_prev^T)."""
    n_degrees = rng.randint(1, 4)
    lo = rng.randint(-2, 2)
    dims = {}
    remaining = max_total_dim
    for k in range(lo, lo + n_degrees):
        d = rng.randint(0, min(3, remaining))
        dims[k] = d
        remaining -= d
    if all(v == 0 for v in dims.values()):
        dims[lo] = 1
    diffs = {}
    prev = None
    for k in range(lo, lo + n_degrees - 1):
        rows, cols = dims[k + 1], dims[k]
        if prev is None or prev.is_zero():
            m = random_matrix(rng, rows, cols)
        else:
            # rows of the new differential must annihilate the image of prev
            ker = kernel_basis(prev.transpose())
            if not ker:
                m = RationalMatrix.zeros(rows, cols)
            else:
                kmat = RationalMatrix.from_rows([list(v) for v in ker])
                m = random_matrix(rng, rows, len(ker)) * kmat
        diffs[k] = m
        prev = m
    return CochainComplex(dims, diffs)


def random_chain_map(rng: random.Random, source: CochainComplex,
                     target: CochainComplex) -> ChainMap:
    """Null-homotopic map f = d h + h d; always a chain map for random h."""
    h = {}
    lo = min(source.min_degree, target.min_degree)
    hi = max(source.max_degree, target.max_degree) + 1
    for k in range(lo, hi + 1):
        h[k] = random_matrix(rng, target.dim(k - 1), source.dim(k))
    components = {}
    for k in range(lo, hi):
        fk = target.differential(k - 1) * h[k] + h[k + 1] * source.differential(k)
        if not fk.is_zero():
            components[k] = fk
    return ChainMap(source, target, components)
