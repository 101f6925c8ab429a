"""Cayley tables of small standard groups.

Every builder puts the identity at index 0.
"""
from __future__ import annotations

from itertools import permutations, product
from typing import Sequence

import numpy as np

from .core import FiniteMagma, magma_from_array


def cyclic(n: int) -> FiniteMagma:
    i = np.arange(n)
    return magma_from_array((i[:, None] + i[None, :]) % n)


def klein_four() -> FiniteMagma:
    i = np.arange(4)
    return magma_from_array(i[:, None] ^ i[None, :])


def elementary_abelian(p: int, k: int) -> FiniteMagma:
    elems = list(product(range(p), repeat=k))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[tuple((x + y) % p for x, y in zip(a, b))] for b in elems] for a in elems]
    return magma_from_array(np.array(table))


def from_permutations(perms: Sequence[Sequence[int]]) -> FiniteMagma:
    """Group table of a list of permutations closed under composition.

    The product ``g*h`` is ``g`` after ``h``: ``(g*h)(x) = g(h(x))``.
    """
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(g[h[x]] for x in range(len(h)))] for h in perms] for g in perms]
    return magma_from_array(np.array(table))


def symmetric(k: int) -> FiniteMagma:
    return from_permutations(sorted(permutations(range(k))))


def dihedral(m: int) -> FiniteMagma:
    """Symmetries of a regular m-gon, order 2m."""
    rots = [tuple((x + r) % m for x in range(m)) for r in range(m)]
    refl = [tuple((r - x) % m for x in range(m)) for r in range(m)]
    return from_permutations(rots + refl)


def quaternion() -> FiniteMagma:
    """Q8 with elements 1, i, j, k, -1, -i, -j, -k (in that order)."""
    # unit-quaternion products on basis indices 0..3 = 1, i, j, k
    basis = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    table = np.empty((8, 8), dtype=np.int64)
    for a in range(8):
        for b in range(8):
            sa, ia = (-1 if a >= 4 else 1), a % 4
            sb, ib = (-1 if b >= 4 else 1), b % 4
            s, i = basis[ia, ib]
            s *= sa * sb
            table[a, b] = i if s == 1 else i + 4
    return magma_from_array(table)


def standard_corpus() -> dict[str, FiniteMagma]:
    """Named groups used as the baseline test corpus."""
    out = {f"Z{n}": cyclic(n) for n in range(1, 9)}
    out["V4"] = klein_four()
    out["S3"] = symmetric(3)
    out["D4"] = dihedral(4)
    out["Q8"] = quaternion()
    return out


def twisted_extension(q: FiniteMagma, k: int, f) -> FiniteMagma:
    """Loop on ``Q x Z_k`` with ``(q1,s1)(q2,s2) = (q1q2, s1+s2+f[q1,q2])``.

    ``f`` must vanish when either argument is the unit of ``Q``. The result
    is a loop whose associators lie in the central copy of ``Z_k``; it is a
    group exactly when ``f`` is a 2-cocycle. Element ``(q, s)`` has index
    ``q*k + s``.
    """
    f = np.asarray(f, dtype=np.int64)
    e = q.unit
    if e is None or f.shape != (q.order, q.order):
        raise ValueError("twisted_extension needs a unital Q and an order x order f")
    if f[e].any() or f[:, e].any():
        raise ValueError("f must vanish on the unit")
    s = np.arange(k)
    s_part = (s[None, :, None, None] + s[None, None, None, :] + f[:, None, :, None]) % k
    q_part = q.table[:, None, :, None]
    n = q.order * k
    return magma_from_array((q_part * k + s_part).reshape(n, n))


def nonassociative_loop8() -> FiniteMagma:
    """Order-8 loop ``V4 x Z2`` twisted by a non-cocycle; fan {0, 1}."""
    f = np.zeros((4, 4), dtype=np.int64)
    f[1, 2] = 1
    return twisted_extension(klein_four(), 2, f)
