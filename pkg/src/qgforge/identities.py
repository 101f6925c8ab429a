"""Exhaustive checks of the division and associator identities of fan quasigroups.

Every identity is evaluated over its full quantification domain with numpy
broadcasting, one value of the leading variable at a time. Inverses written
``x^-1`` are taken inside the nucleus group as ``x \\ e``.

Identity ids are stable string labels. Two auxiliary division identities are
``"72b"`` (``a\\b = ((a\\e) b) p(a, a\\e, b)``) and ``"76a"``
(``b (e/a) = (b/a) p(b/a, a, a\\e) p(e/a, a, a\\e)^-1``); the four basic
division laws are ``"80a"``, ``"80b"``, ``"81a"``, ``"81b"``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import FiniteMagma
from .errors import DomainError, PreconditionError
from .structure import FanCertificate

# n^4 identities (63)-(65) are skipped above this order unless raised
DEFAULT_N4_MAX_ORDER = 10
MAX_STORED_FAILURES = 50


@dataclass
class IdentityReport:
    identity_id: str
    domain_size: int
    failures: list[tuple] = field(default_factory=list)
    failure_count: int = 0
    skipped: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure_count == 0 and self.skipped is None

    def to_dict(self) -> dict:
        return {
            "identity": self.identity_id,
            "domain_size": self.domain_size,
            "failure_count": self.failure_count,
            "failures": [
                {"args": list(args), "lhs": lhs, "rhs": rhs} for args, lhs, rhs in self.failures
            ],
            "skipped": self.skipped,
        }


class _Ops:
    """Vectorized table lookups for a unital quasigroup."""

    def __init__(self, m: FiniteMagma, cert: Optional[FanCertificate] = None):
        self.m = m
        self.cert = cert
        self.T = m.table
        self.L = m.ldiv
        self.R = m.rdiv
        self.e = m.unit

    def mul(self, x, y):
        return self.T[x, y]

    def ld(self, x, y):
        """x \\ y"""
        return self.L[x, y]

    def rd(self, y, x):
        """y / x"""
        return self.R[x, y]

    def t(self, a, b, c):
        return self.cert.t(a, b, c)

    def p(self, a, b, c):
        return self.cert.p(a, b, c)

    def inv(self, x):
        return self.L[x, self.e]


# Each identity: (id, domains, fn). fn(ops, *vars) returns (lhs, rhs) or
# (lhs, rhs, rhs_other_grouping); the third array must agree with the second.
_Identity = tuple[str, tuple[str, ...], Callable]


def _lemma1() -> list[_Identity]:
    def i70(o, b):
        eb, be = o.rd(o.e, b), o.ld(b, o.e)
        return be, o.mul(o.t(eb, b, be), eb)

    def i71(o, b):
        eb, be = o.rd(o.e, b), o.ld(b, o.e)
        return be, o.mul(eb, o.p(eb, b, be))

    def i72(o, a, b):
        ea, ae, ab = o.rd(o.e, a), o.ld(a, o.e), o.ld(a, b)
        lhs = o.mul(ae, b)
        t1, t2 = o.t(ea, a, ae), o.inv(o.t(ea, a, ab))
        return lhs, o.mul(t1, o.mul(t2, ab)), o.mul(o.mul(t1, t2), ab)

    def i72b(o, a, b):
        ae = o.ld(a, o.e)
        return o.ld(a, b), o.mul(o.mul(ae, b), o.p(a, ae, b))

    def i73(o, a, b, c):
        bc = o.mul(b, c)
        w = o.ld(bc, a)
        return w, o.mul(o.ld(c, o.ld(b, a)), o.inv(o.p(b, c, w)))

    def i74(o, a, b, c):
        ab = o.ld(a, b)
        return o.mul(ab, c), o.mul(o.ld(a, o.mul(b, c)), o.inv(o.p(a, ab, c)))

    def i75(o, a, b):
        ab = o.mul(a, b)
        ae, be = o.ld(a, o.e), o.ld(b, o.e)
        x = o.mul(be, ae)
        n1, n2 = o.inv(o.t(a, b, be)), o.t(ab, be, ae)
        return o.ld(ab, o.e), o.mul(x, o.mul(n1, n2)), o.mul(o.mul(x, n1), n2)

    def i76a(o, a, b):
        ea, ae, ba = o.rd(o.e, a), o.ld(a, o.e), o.rd(b, a)
        n1, n2 = o.p(ba, a, ae), o.inv(o.p(ea, a, ae))
        return o.mul(b, ea), o.mul(ba, o.mul(n1, n2)), o.mul(o.mul(ba, n1), n2)

    def i76(o, a, b):
        ea = o.rd(o.e, a)
        return o.rd(b, a), o.mul(o.inv(o.t(b, ea, a)), o.mul(b, ea))

    def i77(o, a, b, c):
        w = o.rd(a, o.mul(b, c))
        return w, o.mul(o.t(w, b, c), o.rd(o.rd(a, c), b))

    def i78(o, a, b, c):
        ba = o.rd(b, a)
        return o.mul(c, ba), o.mul(o.t(c, ba, a), o.rd(o.mul(c, b), a))

    def i79(o, a, b):
        ab = o.mul(a, b)
        ea, eb = o.rd(o.e, a), o.rd(o.e, b)
        n = o.mul(o.inv(o.p(eb, ea, ab)), o.p(ea, a, b))
        return o.rd(o.e, ab), o.mul(n, o.mul(eb, ea))

    return [
        ("70", ("G",), i70), ("71", ("G",), i71), ("72", ("G", "G"), i72),
        ("72b", ("G", "G"), i72b), ("73", ("G", "G", "G"), i73),
        ("74", ("G", "G", "G"), i74), ("75", ("G", "G"), i75),
        ("76a", ("G", "G"), i76a), ("76", ("G", "G"), i76),
        ("77", ("G", "G", "G"), i77), ("78", ("G", "G", "G"), i78),
        ("79", ("G", "G"), i79),
    ]


def _lemma2() -> list[_Identity]:
    def i82(o, a1, a2, a3, z1, z2, z3):
        return o.t(o.mul(z1, a1), o.mul(z2, a2), o.mul(z3, a3)), o.t(a1, a2, a3)

    def i83(o, a1, a2, a3, z1, z2, z3):
        return o.p(o.mul(z1, a1), o.mul(z2, a2), o.mul(z3, a3)), o.p(a1, a2, a3)

    def i84(o, a):
        ae = o.ld(a, o.e)
        return o.mul(o.t(a, ae, a), a), o.mul(a, o.p(a, ae, a))

    def i85(o, a):
        ea = o.rd(o.e, a)
        return o.mul(o.t(a, ea, a), a), o.mul(a, o.p(a, ea, a))

    def i86(o, a):
        ea, ae = o.rd(o.e, a), o.ld(a, o.e)
        lhs = o.mul(o.p(a, ae, a), o.t(ea, a, ae))
        return lhs, np.full_like(lhs, o.e)

    def i87(o, a1, a2, a3, b):
        return o.t(a1, a2, o.mul(a3, b)), o.t(a1, a2, a3)

    def i88(o, a1, a2, a3, b):
        return o.p(o.mul(b, a1), a2, a3), o.p(a1, a2, a3)

    def i89(o, a1, a2, a3, b):
        tt = o.t(a1, a2, a3)
        return (o.t(o.mul(b, a1), a2, a3), o.mul(o.mul(b, tt), o.inv(b)),
                o.mul(b, o.mul(tt, o.inv(b))))

    def i90(o, a1, a2, a3, b):
        pp = o.p(a1, a2, a3)
        return (o.p(a1, a2, o.mul(a3, b)), o.mul(o.mul(o.inv(b), pp), b),
                o.mul(o.inv(b), o.mul(pp, b)))

    def i94(o, a):
        ea, ae = o.rd(o.e, a), o.ld(a, o.e)
        t1, t0 = o.t(a, ae, a), o.t(ea, a, ae)
        lhs = o.mul(t1, o.mul(a, t0))
        return lhs, np.broadcast_to(a, lhs.shape), o.mul(o.mul(t1, a), t0)

    g6 = ("G", "G", "G", "C", "C", "C")
    g3n = ("G", "G", "G", "N")
    return [
        ("82", g6, i82), ("83", g6, i83), ("84", ("G",), i84), ("85", ("G",), i85),
        ("86", ("G",), i86), ("87", g3n, i87), ("88", g3n, i88), ("89", g3n, i89),
        ("90", g3n, i90), ("94", ("G",), i94),
    ]


def _theorem4() -> list[_Identity]:
    def i60(o, a, b, x):
        return o.ld(x, o.mul(a, b)), o.mul(o.ld(x, a), b)

    def i61(o, a, b, x):
        return o.rd(o.mul(a, b), x), o.mul(a, o.rd(b, x))

    def i62(o, a, b, x):
        xa, xb = o.ld(x, a), o.ld(x, b)
        xbx = o.mul(xb, x)
        prod = o.mul(o.mul(xa, x), xbx)
        n1, n2 = o.inv(o.p(xa, x, xbx)), o.p(x, xb, x)
        lhs = o.mul(o.ld(x, o.mul(a, b)), x)
        return lhs, o.mul(prod, o.mul(n1, n2)), o.mul(o.mul(prod, n1), n2)

    def i63(o, u, v, x, y):
        uv = o.ld(u, v)
        q = o.ld(o.mul(u, x), o.mul(v, y))
        lhs = o.ld(x, o.mul(uv, y))
        return lhs, o.mul(o.mul(q, o.p(u, x, q)), o.inv(o.p(u, uv, y)))

    def i64(o, a, b, c, x):
        bc, ab, cx = o.mul(b, c), o.mul(a, b), o.mul(c, x)
        u, v = o.mul(a, bc), o.mul(ab, c)
        ux, vx = o.mul(u, x), o.mul(v, x)
        lhs = o.ld(x, o.mul(o.p(a, b, c), x))
        pre = o.inv(o.mul(o.p(b, c, x), o.p(a, bc, x)))
        tail = o.mul(o.mul(o.p(a, b, cx), o.p(ab, c, x)), o.p(u, x, o.ld(ux, vx)))
        return lhs, o.mul(pre, tail)

    def i65(o, a, b, c, z):
        u = o.mul(a, o.mul(b, c))
        tt, pp = o.t(a, b, c), o.p(a, b, c)
        x = o.ld(u, z)
        tu = o.mul(tt, u)
        tux = o.mul(tu, x)
        lhs = o.ld(z, o.mul(tt, z))
        rhs = o.mul(o.mul(o.ld(x, o.mul(pp, x)), o.p(u, o.ld(u, tu), x)),
                    o.inv(o.p(u, x, o.ld(o.mul(u, x), tux))))
        return lhs, rhs

    nng = ("N", "N", "G")
    return [
        ("60", nng, i60), ("61", nng, i61), ("62", nng, i62),
        ("63", ("G",) * 4, i63), ("64", ("G",) * 4, i64), ("65", ("G",) * 4, i65),
    ]


def _basics() -> list[_Identity]:
    def i80a(o, a, b):
        return o.mul(b, o.ld(b, a)), np.broadcast_to(a, np.broadcast(a, b).shape)

    def i80b(o, a, b):
        return o.ld(b, o.mul(b, a)), np.broadcast_to(a, np.broadcast(a, b).shape)

    def i81a(o, a, b):
        return o.mul(o.rd(a, b), b), np.broadcast_to(a, np.broadcast(a, b).shape)

    def i81b(o, a, b):
        return o.rd(o.mul(a, b), b), np.broadcast_to(a, np.broadcast(a, b).shape)

    return [("80a", ("G", "G"), i80a), ("80b", ("G", "G"), i80b),
            ("81a", ("G", "G"), i81a), ("81b", ("G", "G"), i81b)]


LEMMA1 = _lemma1()
LEMMA2 = _lemma2()
THEOREM4 = _theorem4()
BASICS = _basics()
ALL_IDENTITIES = {i[0]: i for i in BASICS + LEMMA1 + LEMMA2 + THEOREM4}
N4_IDENTITIES = frozenset({"63", "64", "65"})


def _domains(m: FiniteMagma, cert: Optional[FanCertificate]) -> dict[str, np.ndarray]:
    out = {"G": np.arange(m.order)}
    if cert is not None:
        out["N"] = cert.nucleus.array()
        out["C"] = cert.center.array()
    return out


def _run(ident: _Identity, ops: _Ops, domains: dict[str, np.ndarray]) -> IdentityReport:
    ident_id, doms, fn = ident
    values = [domains[d] for d in doms]
    size = int(np.prod([len(v) for v in values]))
    report = IdentityReport(ident_id, size)
    if size == 0:
        return report
    lead, rest = values[0], values[1:]
    k = len(rest)
    grids = [v.reshape([-1 if i == j else 1 for i in range(k)]) for j, v in enumerate(rest)]
    for x0 in lead.tolist():
        out = fn(ops, np.int64(x0), *grids) if k else fn(ops, np.array(x0))
        lhs, rhs = out[0], out[1]
        shape = np.broadcast_shapes(*(np.shape(a) for a in out), tuple(len(v) for v in rest))
        lhs = np.broadcast_to(lhs, shape)
        rhs = np.broadcast_to(rhs, shape)
        bad = lhs != rhs
        if len(out) > 2:
            bad = bad | (rhs != np.broadcast_to(out[2], shape))
        if not bad.any():
            continue
        hits = np.argwhere(bad)
        report.failure_count += len(hits)
        for idx in hits[: max(0, MAX_STORED_FAILURES - len(report.failures))]:
            args = (x0,) + tuple(int(rest[j][i]) for j, i in enumerate(idx))
            key = tuple(idx)
            report.failures.append((args, int(lhs[key]), int(rhs[key])))
    return report


def _need_cert(cert: Optional[FanCertificate]) -> FanCertificate:
    if cert is None:
        raise PreconditionError("identity checks need a fan quasigroup certificate")
    return cert


def _run_group(cert: FanCertificate, group: Sequence[_Identity],
               n4_max_order: int = DEFAULT_N4_MAX_ORDER) -> list[IdentityReport]:
    cert = _need_cert(cert)
    m = cert.base
    ops = _Ops(m, cert)
    domains = _domains(m, cert)
    reports = []
    for ident in group:
        if ident[0] in N4_IDENTITIES and m.order > n4_max_order:
            size = m.order ** 4
            reports.append(IdentityReport(ident[0], size, skipped=f"order {m.order} > {n4_max_order}"))
            continue
        reports.append(_run(ident, ops, domains))
    return reports


def check_lemma1(cert: FanCertificate) -> list[IdentityReport]:
    return _run_group(cert, LEMMA1)


def check_lemma2(cert: FanCertificate) -> list[IdentityReport]:
    return _run_group(cert, LEMMA2)


def check_theorem4_identities(cert: FanCertificate,
                              n4_max_order: int = DEFAULT_N4_MAX_ORDER) -> list[IdentityReport]:
    return _run_group(cert, THEOREM4, n4_max_order)


def check_quasigroup_basics(m: FiniteMagma) -> list[IdentityReport]:
    """Division laws: 80a/80b need left division, 81a/81b right division."""
    ops = _Ops(m)
    domains = _domains(m, None)
    reports = []
    for ident in BASICS:
        if ident[0].startswith("80") and m.ldiv is None:
            continue
        if ident[0].startswith("81") and m.rdiv is None:
            continue
        reports.append(_run(ident, ops, domains))
    return reports


def evaluate_identity(cert: FanCertificate, identity_id: str, args: Sequence[int]) -> tuple[int, int]:
    """Evaluate one identity at one argument tuple, enforcing its domain."""
    cert = _need_cert(cert)
    try:
        ident_id, doms, fn = ALL_IDENTITIES[identity_id]
    except KeyError:
        raise PreconditionError(f"unknown identity {identity_id!r}") from None
    if len(args) != len(doms):
        raise PreconditionError(f"identity {identity_id} takes {len(doms)} arguments")
    domains = _domains(cert.base, cert)
    for pos, (x, d) in enumerate(zip(args, doms)):
        if x not in domains[d]:
            raise DomainError(f"argument {pos} = {x} is outside {d} for identity {identity_id}")
    out = fn(_Ops(cert.base, cert), *(np.int64(x) for x in args))
    return int(out[0]), int(out[1])


def _numeric(ident_id: str) -> int:
    return int(re.match(r"\d+", ident_id).group())


def select_identities(spec: Optional[str]) -> list[str]:
    """Parse ``"70-79,82-94,60-65,80-81"`` into known identity ids.

    Ranges match on the numeric part, so ``70-79`` includes ``72b`` and
    ``76a``. ``None`` or ``"all"`` selects everything.
    """
    ids = list(ALL_IDENTITIES)
    if spec is None or spec.strip().lower() == "all":
        return ids
    chosen: set[str] = set()
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if part in ALL_IDENTITIES:
            chosen.add(part)
            continue
        m = re.fullmatch(r"(\d+)(?:-(\d+))?", part)
        if not m:
            raise PreconditionError(f"bad identity selector {part!r}")
        lo = int(m.group(1))
        hi = int(m.group(2) or lo)
        hit = [i for i in ids if lo <= _numeric(i) <= hi]
        if not hit:
            raise PreconditionError(f"selector {part!r} matches no identity")
        chosen.update(hit)
    return [i for i in ids if i in chosen]


def run_identities(m: FiniteMagma, cert: Optional[FanCertificate], ids: Sequence[str],
                   n4_max_order: int = DEFAULT_N4_MAX_ORDER) -> list[IdentityReport]:
    """Run a selection; fan-only identities need ``cert``."""
    wanted = set(ids)
    reports = [r for r in check_quasigroup_basics(m) if r.identity_id in wanted]
    fan_ids = [i for i in ids if i not in {b[0] for b in BASICS}]
    if fan_ids:
        cert = _need_cert(cert)
        group = [ALL_IDENTITIES[i] for i in fan_ids]
        reports.extend(_run_group(cert, group, n4_max_order))
    return reports
