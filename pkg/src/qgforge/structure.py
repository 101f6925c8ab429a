"""Commutant, nuclei, center, associators, fans, normality and quotients."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import ElementSubset, FiniteMagma, magma_from_array
from .errors import AxiomError, ConsistencyError, PreconditionError

# full n^3 associator tables are kept up to this order, computed on demand above
MATERIALIZE_MAX_ORDER = 24


@dataclass(frozen=True)
class StructureReport:
    com: ElementSubset
    n_l: ElementSubset
    n_m: ElementSubset
    n_r: ElementSubset
    nucleus: ElementSubset
    center: ElementSubset


def _assoc_mask(m: FiniteMagma) -> np.ndarray:
    """Boolean cube ``[a, b, c] -> (ab)c == a(bc)``."""
    t = m.table
    ab_c = t[t]
    a_bc = t[np.arange(m.order)[:, None, None], t[None, :, :]]
    return ab_c == a_bc


def structure_report(m: FiniteMagma) -> StructureReport:
    """Compute Com, N_l, N_m, N_r, N and the center by exhaustive checks."""
    n = m.order
    t = m.table
    com = np.all(t == t.T, axis=1)
    ok = _assoc_mask(m)
    n_l = ok.all(axis=(1, 2))  # a in first slot
    n_m = ok.all(axis=(0, 2))  # a in middle slot
    n_r = ok.all(axis=(0, 1))  # a in last slot
    nuc = n_l & n_m & n_r
    sub = ElementSubset.from_mask
    return StructureReport(
        com=sub(com), n_l=sub(n_l), n_m=sub(n_m), n_r=sub(n_r),
        nucleus=sub(nuc), center=sub(com & nuc),
    )


def nucleus(m: FiniteMagma) -> ElementSubset:
    return structure_report(m).nucleus


def associator_t(m: FiniteMagma, a, b, c):
    """``((ab)c) / (a(bc))``; accepts scalars or broadcastable index arrays."""
    if m.rdiv is None:
        raise AxiomError("t-associator needs right division")
    t = m.table
    out = m.rdiv[t[a, t[b, c]], t[t[a, b], c]]
    return int(out) if np.ndim(out) == 0 else out


def associator_p(m: FiniteMagma, a, b, c):
    """``(a(bc)) \\ ((ab)c)``; accepts scalars or broadcastable index arrays."""
    if m.ldiv is None:
        raise AxiomError("p-associator needs left division")
    t = m.table
    out = m.ldiv[t[a, t[b, c]], t[t[a, b], c]]
    return int(out) if np.ndim(out) == 0 else out


def _axes(n: int):
    i = np.arange(n)
    return i[:, None, None], i[None, :, None], i[None, None, :]


def generated_subgroup(m: FiniteMagma, gens: Iterable[int]) -> ElementSubset:
    """Closure of ``gens`` (plus the unit, if any) under multiplication."""
    members = set(int(g) for g in gens)
    if m.unit is not None:
        members.add(m.unit)
    frontier = set(members)
    t = m.table
    while frontier:
        cur = np.array(sorted(members))
        new = set()
        f = np.array(sorted(frontier))
        new.update(t[np.ix_(f, cur)].ravel().tolist())
        new.update(t[np.ix_(cur, f)].ravel().tolist())
        frontier = new - members
        members |= frontier
    return ElementSubset(m.order, frozenset(members))


@dataclass(frozen=True, eq=False)
class FanCertificate:
    """Proof that ``base`` is a fan quasigroup, with access to t and p.

    ``t_table``/``p_table`` are full ``n^3`` arrays for small orders and
    ``None`` above :data:`MATERIALIZE_MAX_ORDER`; :meth:`t` and :meth:`p`
    give identical answers either way.
    """

    base: FiniteMagma
    nucleus: ElementSubset
    center: ElementSubset
    fan: ElementSubset
    t_table: Optional[np.ndarray] = None
    p_table: Optional[np.ndarray] = None

    @property
    def unit(self) -> int:
        return self.base.unit

    def t(self, a, b, c):
        if self.t_table is not None:
            out = self.t_table[a, b, c]
            return int(out) if np.ndim(out) == 0 else out
        return associator_t(self.base, a, b, c)

    def p(self, a, b, c):
        if self.p_table is not None:
            out = self.p_table[a, b, c]
            return int(out) if np.ndim(out) == 0 else out
        return associator_p(self.base, a, b, c)

    def inverse(self, x):
        """Inverse inside the nucleus group, ``x \\ e``."""
        out = self.base.ldiv[x, self.base.unit]
        return int(out) if np.ndim(out) == 0 else out

    def t_values(self) -> set[int]:
        return _value_set(self, "t")

    def p_values(self) -> set[int]:
        return _value_set(self, "p")


def _value_set(cert: FanCertificate, which: str) -> set[int]:
    table = cert.t_table if which == "t" else cert.p_table
    if table is not None:
        return set(np.unique(table).tolist())
    fn = associator_t if which == "t" else associator_p
    n = cert.base.order
    i = np.arange(n)
    vals: set[int] = set()
    for a in range(n):
        vals.update(np.unique(fn(cert.base, a, i[:, None], i[None, :])).tolist())
    return vals


def fan_certificate(m: FiniteMagma, report: Optional[StructureReport] = None) -> Optional[FanCertificate]:
    """Return a certificate if ``m`` is a fan quasigroup, else ``None``."""
    if not m.is_loop:
        return None
    report = report or structure_report(m)
    nuc_mask = report.nucleus.mask()
    n = m.order
    if n <= MATERIALIZE_MAX_ORDER:
        a, b, c = _axes(n)
        t_tab = associator_t(m, a, b, c)
        p_tab = associator_p(m, a, b, c)
        if not (nuc_mask[t_tab].all() and nuc_mask[p_tab].all()):
            return None
        t_tab.setflags(write=False)
        p_tab.setflags(write=False)
        gens = set(np.unique(t_tab).tolist()) | set(np.unique(p_tab).tolist())
    else:
        t_tab = p_tab = None
        i = np.arange(n)
        gens = set()
        for a in range(n):
            ts = associator_t(m, a, i[:, None], i[None, :])
            ps = associator_p(m, a, i[:, None], i[None, :])
            if not (nuc_mask[ts].all() and nuc_mask[ps].all()):
                return None
            gens.update(np.unique(ts).tolist())
            gens.update(np.unique(ps).tolist())
    fan = generated_subgroup(m, gens)
    return FanCertificate(
        base=m, nucleus=report.nucleus, center=report.center, fan=fan,
        t_table=t_tab, p_table=p_tab,
    )


def is_subquasigroup(m: FiniteMagma, h: ElementSubset) -> bool:
    """Non-empty and closed under multiplication and both divisions."""
    if not len(h) or not m.is_quasigroup:
        return False
    idx = h.array()
    mask = h.mask()
    sub = np.ix_(idx, idx)
    return bool(mask[m.table[sub]].all() and mask[m.ldiv[sub]].all() and mask[m.rdiv[sub]].all())


def _row_sets(arr: np.ndarray) -> np.ndarray:
    """Sort the last axis so that set equality becomes array equality."""
    return np.sort(arr, axis=-1)


def normality_failures(m: FiniteMagma, h: ElementSubset) -> list[tuple]:
    """List every coset condition that fails, as (label, x[, y]) tuples.

    Labels: ``"39"`` for ``xH = Hx``; ``"40a"`` ``(xy)H = x(yH)``;
    ``"40b"`` ``(xH)y = x(Hy)``; ``"40c"`` ``H(xy) = (Hx)y``.
    """
    if not is_subquasigroup(m, h):
        raise PreconditionError("subset is not a subquasigroup")
    t = m.table
    H = h.array()
    n = m.order
    x = np.arange(n)
    fails: list[tuple] = []

    xH = _row_sets(t[x[:, None], H[None, :]])
    Hx = _row_sets(t[H[None, :], x[:, None]])
    for i in np.flatnonzero(~np.all(xH == Hx, axis=1)):
        fails.append(("39", int(i)))

    X, Y = x[:, None, None], x[None, :, None]
    Hh = H[None, None, :]
    xy = t[X, Y]
    lhs_a = _row_sets(t[xy, Hh])
    rhs_a = _row_sets(t[X, t[Y, Hh]])
    lhs_b = _row_sets(t[t[X, Hh], Y])
    rhs_b = _row_sets(t[X, t[Hh, Y]])
    lhs_c = _row_sets(t[Hh, xy])
    rhs_c = _row_sets(t[t[Hh, X], Y])
    for label, lhs, rhs in (("40a", lhs_a, rhs_a), ("40b", lhs_b, rhs_b), ("40c", lhs_c, rhs_c)):
        for i, j in np.argwhere(~np.all(lhs == rhs, axis=2)):
            fails.append((label, int(i), int(j)))
    return fails


def is_normal(m: FiniteMagma, h: ElementSubset) -> bool:
    return not normality_failures(m, h)


def is_subgroup(m: FiniteMagma, h: ElementSubset) -> bool:
    """Closed subquasigroup on which the product is associative and unital."""
    if not is_subquasigroup(m, h):
        return False
    idx = h.array()
    ok = _assoc_mask(m)[np.ix_(idx, idx, idx)]
    return bool(ok.all()) and m.unit in h


@dataclass(frozen=True)
class QuotientGroup:
    base: FiniteMagma
    subgroup: ElementSubset
    cosets: tuple[tuple[int, ...], ...]
    quotient: FiniteMagma
    projection: tuple[int, ...]


def quotient(m: FiniteMagma, n1: ElementSubset, cert: Optional[FanCertificate] = None) -> QuotientGroup:
    """Quotient of a fan quasigroup by a normal subgroup between its fan and nucleus."""
    cert = cert or fan_certificate(m)
    if cert is None:
        raise PreconditionError("quotient needs a fan quasigroup")
    if not cert.fan <= n1:
        raise PreconditionError(f"subgroup must contain the fan {cert.fan.sorted()}")
    if not n1 <= cert.nucleus:
        raise PreconditionError("subgroup must lie inside the nucleus")
    if not is_subgroup(m, n1):
        raise PreconditionError("subset is not a subgroup")
    if any(f[0] == "39" for f in normality_failures(m, n1)):
        raise PreconditionError("subgroup does not satisfy xH = Hx")

    t = m.table
    H = n1.array()
    proj = np.full(m.order, -1, dtype=np.int64)
    cosets = []
    for a in range(m.order):
        if proj[a] >= 0:
            continue
        coset = np.unique(t[a, H])
        if (proj[coset] >= 0).any():
            raise ConsistencyError(f"coset of {a} overlaps an earlier coset")
        proj[coset] = len(cosets)
        cosets.append(tuple(coset.tolist()))

    reps = np.array([c[0] for c in cosets])
    q = proj[t[np.ix_(reps, reps)]]
    # well-definedness over every pair of representatives, not only the chosen ones
    if not np.array_equal(proj[t], q[proj[:, None], proj[None, :]]):
        raise ConsistencyError("coset product depends on the representative")
    qm = magma_from_array(q)
    if not (qm.is_loop and qm.is_associative()):
        raise ConsistencyError("quotient is not a group")
    return QuotientGroup(
        base=m, subgroup=n1, cosets=tuple(cosets), quotient=qm,
        projection=tuple(proj.tolist()),
    )


def conj_maps(m: FiniteMagma, a: int, beta: int) -> tuple[int, int]:
    """``((a*beta)/a, a\\(beta*a))``."""
    if m.ldiv is None or m.rdiv is None:
        raise AxiomError("conjugation maps need both divisions")
    t = m.table
    return int(m.rdiv[a, t[a, beta]]), int(m.ldiv[a, t[beta, a]])
