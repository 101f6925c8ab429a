"""Direct, smashed and skew smashed products of finite (left) quasigroups.

Pairs ``(a, b)`` of a product over ``A x B`` are encoded as ``a * |B| + b``.
Direct products of several factors use the same mixed-radix rule, first
factor most significant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .core import ElementSubset, FiniteMagma, magma_from_array
from .errors import CapacityError, ConsistencyError, PreconditionError
from .structure import (
    MATERIALIZE_MAX_ORDER,
    FanCertificate,
    fan_certificate,
    generated_subgroup,
    is_normal,
    is_subquasigroup,
)

DEFAULT_MAX_ORDER = 2048


def encode(pair: tuple[int, int], order_b: int) -> int:
    a, b = pair
    return a * order_b + b


def decode(x: int, order_b: int) -> tuple[int, int]:
    return divmod(int(x), order_b)


# -- direct products ---------------------------------------------------------

def _pair_table(ta: np.ndarray, tb: np.ndarray) -> np.ndarray:
    na, nb = ta.shape[0], tb.shape[0]
    full = ta[:, None, :, None] * nb + tb[None, :, None, :]
    return full.reshape(na * nb, na * nb)


def direct_product(factors: Sequence[FiniteMagma], max_order: int = DEFAULT_MAX_ORDER) -> FiniteMagma:
    """Componentwise product of a finite, non-empty list of magmas."""
    if not factors:
        raise PreconditionError("direct product needs at least one factor")
    order = math.prod(f.order for f in factors)
    if order > max_order:
        raise CapacityError(f"product order {order} exceeds ceiling {max_order}")
    table = factors[0].table
    for f in factors[1:]:
        table = _pair_table(table, f.table)
    return magma_from_array(table)


def _mixed_radix(orders: Sequence[int]) -> np.ndarray:
    """Decode every product element into its coordinates, shape (order, k)."""
    grids = np.indices(orders).reshape(len(orders), -1)
    return grids.T


def direct_product_certificate(factors: Sequence[FiniteMagma],
                               max_order: int = DEFAULT_MAX_ORDER) -> Optional[FanCertificate]:
    """Fan certificate of a direct product assembled from the factors' certificates.

    t and p are taken componentwise; nucleus and center are the products of
    the factor nuclei and centers. Returns ``None`` unless every factor is a
    fan quasigroup.
    """
    product = direct_product(factors, max_order)
    certs = [fan_certificate(f) for f in factors]
    if any(c is None for c in certs):
        return None
    orders = [f.order for f in factors]
    coords = _mixed_radix(orders)
    weights = np.array([math.prod(orders[i + 1:]) for i in range(len(orders))])

    def prod_subset(subsets: list[ElementSubset]) -> ElementSubset:
        mask = np.ones(product.order, dtype=bool)
        for j, s in enumerate(subsets):
            mask &= s.mask()[coords[:, j]]
        return ElementSubset.from_mask(mask)

    t_tab = p_tab = None
    if product.order <= MATERIALIZE_MAX_ORDER:
        n = product.order
        a = coords[:, None, None, :]
        b = coords[None, :, None, :]
        c = coords[None, None, :, :]
        t_tab = np.zeros((n, n, n), dtype=np.int64)
        p_tab = np.zeros((n, n, n), dtype=np.int64)
        for j, cert in enumerate(certs):
            t_tab += cert.t(a[..., j], b[..., j], c[..., j]) * weights[j]
            p_tab += cert.p(a[..., j], b[..., j], c[..., j]) * weights[j]
        t_tab.setflags(write=False)
        p_tab.setflags(write=False)
    gens: set[int] = set()
    if t_tab is not None:
        gens = set(np.unique(t_tab).tolist()) | set(np.unique(p_tab).tolist())
    else:
        fan = prod_subset([c.fan for c in certs])
        gens = set(fan.members)
    return FanCertificate(
        base=product,
        nucleus=prod_subset([c.nucleus for c in certs]),
        center=prod_subset([c.center for c in certs]),
        fan=generated_subgroup(product, gens),
        t_table=t_tab,
        p_table=p_tab,
    )


# -- smashed products --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmashFactors:
    """Twisting data for a smashed product over ``A x B``.

    ``xi1``/``xi2`` have shape ``(|A|, |B|, |A|)`` with values in B;
    ``phi1..phi3`` have shape ``(|A|, |B|)`` and each row is a permutation
    of B (``phi_j[a, b]`` is the image of ``b`` under ``phi_j(a)``).
    """

    xi1: np.ndarray
    xi2: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    phi3: np.ndarray

    @classmethod
    def trivial(cls, A: FiniteMagma, B: FiniteMagma, value: Optional[int] = None) -> "SmashFactors":
        """Identity phis and constant xis (default: the unit of B, else 0)."""
        v = value if value is not None else (B.unit if B.unit is not None else 0)
        na, nb = A.order, B.order
        xi = np.full((na, nb, na), v, dtype=np.int64)
        ident = np.tile(np.arange(nb), (na, 1))
        return cls(xi, xi.copy(), ident, ident.copy(), ident.copy())

    def shape_errors(self, order_a: int, order_b: int) -> list[str]:
        errs = []
        for name in ("xi1", "xi2"):
            arr = getattr(self, name)
            if arr.shape != (order_a, order_b, order_a):
                errs.append(f"{name} has shape {arr.shape}, expected {(order_a, order_b, order_a)}")
            elif arr.size and (arr.min() < 0 or arr.max() >= order_b):
                errs.append(f"{name} has values outside 0..{order_b - 1}")
        ident = np.arange(order_b)
        for name in ("phi1", "phi2", "phi3"):
            arr = getattr(self, name)
            if arr.shape != (order_a, order_b):
                errs.append(f"{name} has shape {arr.shape}, expected {(order_a, order_b)}")
                continue
            bad = np.flatnonzero(~np.all(np.sort(arr, axis=1) == ident, axis=1))
            if len(bad):
                errs.append(f"{name}[{int(bad[0])}] is not a permutation")
        return errs


def _check_smash_inputs(A: FiniteMagma, B: FiniteMagma, f: SmashFactors) -> None:
    if A.ldiv is None or B.ldiv is None:
        raise PreconditionError("smashed products need left quasigroups A and B")
    errs = f.shape_errors(A.order, B.order)
    if errs:
        raise PreconditionError("; ".join(errs))


def _smash_prefix(B: FiniteMagma, f: SmashFactors) -> np.ndarray:
    """``[(xi1 * b1^(a2)) * xi2]^{a1}`` indexed by (a1, b1, a2)."""
    tb = B.table
    nb = B.order
    b1 = np.arange(nb)[None, :, None]
    a2 = np.arange(f.phi2.shape[0])[None, None, :]
    b1_a2 = f.phi2[a2, b1]
    inner = tb[tb[f.xi1, b1_a2], f.xi2]
    a1 = np.arange(f.phi3.shape[0])[:, None, None]
    return f.phi3[a1, inner]


def smashed_product(A: FiniteMagma, B: FiniteMagma, f: SmashFactors) -> FiniteMagma:
    """Left quasigroup on ``A x B`` twisted by the five smashing factors.

    The B-part of ``(a1,b1)(a2,b2)`` is
    ``phi3(a1)[(xi1(a1,b1,a2) * phi2(a2)b1) * xi2(a1,b1,a2)] * phi1(a1)b2``.
    """
    _check_smash_inputs(A, B, f)
    na, nb = A.order, B.order
    pre = _smash_prefix(B, f)  # (a1, b1, a2)
    b2_a1 = f.phi1  # (a1, b2)
    bpart = B.table[pre[:, :, :, None], b2_a1[:, None, None, :]]
    apart = A.table[:, None, :, None]
    table = (apart * nb + bpart).reshape(na * nb, na * nb)
    m = magma_from_array(table)
    if m.ldiv is None:
        raise ConsistencyError("smashed product is not a left quasigroup")
    return m


def smashed_div_l(A: FiniteMagma, B: FiniteMagma, f: SmashFactors,
                  pair1: tuple[int, int], pair2: tuple[int, int]) -> tuple[int, int]:
    """Solve ``(a,b) * (x,y) = (c,d)`` by the closed form."""
    _check_smash_inputs(A, B, f)
    (a, b), (c, d) = pair1, pair2
    tb = B.table
    x = int(A.ldiv[a, c])
    w = tb[tb[f.xi1[a, b, x], f.phi2[x, b]], f.xi2[a, b, x]]
    z = int(B.ldiv[f.phi3[a, w], d])
    y = int(np.flatnonzero(f.phi1[a] == z)[0])
    return x, y


def smashed_div_l_table(A: FiniteMagma, B: FiniteMagma, f: SmashFactors) -> np.ndarray:
    """The closed form of :func:`smashed_div_l` for every pair at once.

    Entry ``[g, h]`` is the encoded solution of ``g * X = h``.
    """
    _check_smash_inputs(A, B, f)
    na, nb = A.order, B.order
    a = np.repeat(np.arange(na), nb)[:, None]
    b = np.tile(np.arange(nb), na)[:, None]
    c = np.repeat(np.arange(na), nb)[None, :]
    d = np.tile(np.arange(nb), na)[None, :]
    tb = B.table
    x = A.ldiv[a, c]
    w = tb[tb[f.xi1[a, b, x], f.phi2[x, b]], f.xi2[a, b, x]]
    z = B.ldiv[f.phi3[a, w], d]
    phi1_inv = np.argsort(f.phi1, axis=1)
    return x * nb + phi1_inv[a, z]


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of checking right solvability of a smashed product.

    When the product is not a right quasigroup, ``column`` is the pair
    ``(a, b)`` on the right of ``(x,y)*(a,b) = (c,d)``, ``target`` is the
    right-hand side ``(c, d)`` and ``solutions`` lists every ``(x, y)``
    that solves it (zero or at least two of them).
    """

    is_right_quasigroup: bool
    column: Optional[tuple[int, int]] = None
    target: Optional[tuple[int, int]] = None
    solutions: tuple[tuple[int, int], ...] = ()
    missing: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "is_right_quasigroup": self.is_right_quasigroup,
            "column": None if self.column is None else list(self.column),
            "target": None if self.target is None else list(self.target),
            "solutions": [list(s) for s in self.solutions],
            "missing": [list(s) for s in self.missing],
        }


def probe_columns(m: FiniteMagma, order_b: int) -> ProbeReport:
    """Column scan of a product table; first defective column wins."""
    if m.rdiv is not None:
        return ProbeReport(True)
    n = m.order
    t = m.table
    for col in range(n):
        counts = np.bincount(t[:, col], minlength=n)
        if np.all(counts == 1):
            continue
        target = int(np.flatnonzero(counts >= 2)[0])
        sols = tuple(decode(y, order_b) for y in np.flatnonzero(t[:, col] == target))
        missing = tuple(decode(v, order_b) for v in np.flatnonzero(counts == 0))
        return ProbeReport(False, decode(col, order_b), decode(target, order_b), sols, missing)
    raise ConsistencyError("no right division yet every column is a permutation")


def right_solvability_probe(A: FiniteMagma, B: FiniteMagma, f: SmashFactors) -> ProbeReport:
    return probe_columns(smashed_product(A, B, f), B.order)


# -- skew smashed products ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class SkewFactors:
    """Twisting data for a skew smashed product through a group N.

    Values of ``eta``, ``kappa`` and ``xi`` are elements of ``n_group``;
    ``embed_a``/``embed_b`` send them into A and B.

    shapes: phi (|A|,|B|); eta (|A|,|A|,|B|) indexed (v,u,b);
    kappa (|A|,|B|,|B|) indexed (u,c,b); xi (|A|,|B|,|A|,|B|) indexed (u,c,v,b).
    """

    n_group: FiniteMagma
    embed_a: np.ndarray
    embed_b: np.ndarray
    phi: np.ndarray
    eta: np.ndarray
    kappa: np.ndarray
    xi: np.ndarray

    @classmethod
    def trivial(cls, A: FiniteMagma, B: FiniteMagma, n_group: FiniteMagma,
                embed_a: Sequence[int], embed_b: Sequence[int]) -> "SkewFactors":
        na, nb = A.order, B.order
        e = n_group.unit if n_group.unit is not None else 0
        return cls(
            n_group=n_group,
            embed_a=np.asarray(embed_a, dtype=np.int64),
            embed_b=np.asarray(embed_b, dtype=np.int64),
            phi=np.tile(np.arange(nb), (na, 1)),
            eta=np.full((na, na, nb), e, dtype=np.int64),
            kappa=np.full((na, nb, nb), e, dtype=np.int64),
            xi=np.full((na, nb, na, nb), e, dtype=np.int64),
        )

    def with_xi(self, xi: np.ndarray) -> "SkewFactors":
        return SkewFactors(self.n_group, self.embed_a, self.embed_b, self.phi,
                           self.eta, self.kappa, np.asarray(xi, dtype=np.int64))

    def is_trivial(self) -> bool:
        e = self.n_group.unit
        ident = np.arange(self.phi.shape[1])
        return bool(np.all(self.phi == ident) and np.all(self.eta == e)
                    and np.all(self.kappa == e) and np.all(self.xi == e))

    def shape_errors(self, order_a: int, order_b: int) -> list[str]:
        nn = self.n_group.order
        want = {
            "phi": ((order_a, order_b), order_b),
            "eta": ((order_a, order_a, order_b), nn),
            "kappa": ((order_a, order_b, order_b), nn),
            "xi": ((order_a, order_b, order_a, order_b), nn),
            "embed_a": ((nn,), order_a),
            "embed_b": ((nn,), order_b),
        }
        errs = []
        for name, (shape, bound) in want.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                errs.append(f"{name} has shape {arr.shape}, expected {shape}")
            elif arr.size and (arr.min() < 0 or arr.max() >= bound):
                errs.append(f"{name} has values outside 0..{bound - 1}")
        return errs


@dataclass(frozen=True)
class Violation:
    equation: str
    args: tuple
    expected: object
    got: object

    def to_dict(self) -> dict:
        return {"equation": self.equation, "args": list(self.args),
                "expected": self.expected, "got": self.got}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    # stored instances per equation; the count is always complete
    limit: int = 20

    @property
    def ok(self) -> bool:
        return not self.counts

    def add(self, equation: str, args, expected, got) -> None:
        n = self.counts.get(equation, 0)
        self.counts[equation] = n + 1
        if n < self.limit:
            self.violations.append(Violation(equation, tuple(int(a) for a in args),
                                             _plain(expected), _plain(got)))

    def add_mask(self, equation: str, bad: np.ndarray, expected: np.ndarray, got: np.ndarray) -> None:
        """Record every True cell of ``bad`` (lexicographic order)."""
        idx = np.argwhere(bad)
        if not len(idx):
            return
        exp = np.broadcast_to(expected, bad.shape)
        gt = np.broadcast_to(got, bad.shape)
        self.counts[equation] = self.counts.get(equation, 0) + len(idx)
        room = max(0, self.limit - sum(v.equation == equation for v in self.violations))
        for row in idx[:room]:
            k = tuple(row)
            self.violations.append(Violation(equation, tuple(int(a) for a in row),
                                             _plain(exp[k]), _plain(gt[k])))

    def to_dict(self) -> dict:
        return {"ok": self.ok, "counts": dict(sorted(self.counts.items())),
                "violations": [v.to_dict() for v in self.violations]}


def _plain(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    return x


def _is_group(m: FiniteMagma) -> bool:
    return m.is_loop and m.is_associative()


def validate_skew_factors(A: FiniteMagma, B: FiniteMagma, f: SkewFactors) -> ValidationReport:
    """Exhaustively check every admission condition on skew smashing factors."""
    rep = ValidationReport()
    errs = f.shape_errors(A.order, B.order)
    for msg in errs:
        rep.add("shape", (), "consistent", msg)
    if errs:
        return rep
    N = f.n_group
    if not _is_group(N):
        rep.add("N", (), "group", "not a group")
        return rep
    certs = {}
    for name, M in (("A", A), ("B", B)):
        cert = fan_certificate(M)
        if cert is None:
            rep.add("41", (), f"{name} fan quasigroup", "not a fan quasigroup")
        certs[name] = cert
    if not rep.ok:
        return rep

    eN = N.unit
    tn = N.table
    ta, tb = A.table, B.table
    ea, eb = A.unit, B.unit
    na, nb, nn = A.order, B.order, N.order
    emb_a, emb_b = f.embed_a, f.embed_b

    # embeddings: injective homomorphisms, unit to unit, images in the
    # nucleus, containing the fan, normal
    for name, M, emb, cert in (("A", A, emb_a, certs["A"]), ("B", B, emb_b, certs["B"])):
        if len(set(emb.tolist())) != nn:
            rep.add("41", (), f"embed_{name.lower()} injective", emb.tolist())
            continue
        if emb[eN] != M.unit:
            rep.add("41", (eN,), M.unit, int(emb[eN]))
        hom = emb[tn] == M.table[np.ix_(emb, emb)]
        rep.add_mask("41", ~hom, emb[tn], M.table[np.ix_(emb, emb)])
        img = ElementSubset.of(M.order, emb.tolist())
        if not img <= cert.nucleus:
            rep.add("41", (), f"image in N({name})", sorted(img.members - cert.nucleus.members))
        if not cert.fan <= img:
            rep.add("41", (), f"image contains fan of {name}", sorted(cert.fan.members - img.members))
        if is_subquasigroup(M, img):
            if not is_normal(M, img):
                rep.add("41", (), f"image normal in {name}", "not normal")
        else:
            rep.add("41", (), f"image subquasigroup of {name}", "not closed")
    if not rep.ok:
        return rep

    phi = f.phi
    ident = np.arange(nb)
    bad_rows = np.flatnonzero(~np.all(np.sort(phi, axis=1) == ident, axis=1))
    for a in bad_rows:
        rep.add("43", (a,), "permutation", phi[a].tolist())
    if len(bad_rows):
        return rep

    u = np.arange(na)
    b = np.arange(nb)
    g = np.arange(nn)
    in_a = np.zeros(na, dtype=bool)
    in_a[emb_a] = True
    in_b = np.zeros(nb, dtype=bool)
    in_b[emb_b] = True

    # condition 44: (b^u)^v = b^{vu} eta(v,u,b), indexed (v,u,b)
    V, U, Bb = u[:, None, None], u[None, :, None], b[None, None, :]
    lhs = phi[V, phi[U, Bb]]
    rhs = tb[phi[ta[V, U], Bb], emb_b[f.eta]]
    rep.add_mask("44", lhs != rhs, rhs, lhs)
    # gamma^u = gamma on embed_b(N), indexed (u, gamma)
    fixed = phi[u[:, None], emb_b[None, :]]
    rep.add_mask("44", fixed != emb_b[None, :], emb_b[None, :], fixed)
    # b^gamma = b for gamma in embed_a(N), indexed (gamma, b)
    act = phi[emb_a[:, None], b[None, :]]
    rep.add_mask("44", act != b[None, :], b[None, :], act)

    # condition 45: eta invariant under N-shifts of b, and e on N-arguments
    G = g[:, None]
    Bl = tb[emb_b[G], b[None, :]]  # gamma*b, indexed (gamma, b)
    Br = tb[b[None, :], emb_b[G]]  # b*gamma
    for shifted in (Bl, Br):
        moved = f.eta[:, :, shifted]  # (v, u, gamma, b)
        base = f.eta[:, :, None, :]
        rep.add_mask("45", moved != base, base, moved)
    dead = in_a[:, None, None] | in_a[None, :, None] | in_b[None, None, :]
    rep.add_mask("45", dead & (f.eta != eN), eN, f.eta)

    # condition 46: (cb)^u = c^u b^u kappa(u,c,b), indexed (u,c,b)
    U3, C3, B3 = u[:, None, None], b[None, :, None], b[None, None, :]
    lhs = phi[U3, tb[C3, B3]]
    rhs = tb[tb[phi[U3, C3], phi[U3, B3]], emb_b[f.kappa]]
    rep.add_mask("46", lhs != rhs, rhs, lhs)

    # condition 47: kappa invariant under N-shifts of c and b; e on N-arguments
    for shifted in (Bl, Br):
        moved_c = f.kappa[:, shifted, :]  # (u, gamma, c, b)
        rep.add_mask("47", moved_c != f.kappa[:, None, :, :], f.kappa[:, None, :, :], moved_c)
        moved_b = f.kappa[:, :, shifted]  # (u, c, gamma, b)
        rep.add_mask("47", moved_b != f.kappa[:, :, None, :], f.kappa[:, :, None, :], moved_b)
    dead = in_a[:, None, None] | in_b[None, :, None] | in_b[None, None, :]
    rep.add_mask("47", dead & (f.kappa != eN), eN, f.kappa)

    # condition 48: xi invariant under N-shifts of all four slots; e at (e,e)
    xi = f.xi
    Al = ta[emb_a[G], u[None, :]]
    Ar = ta[u[None, :], emb_a[G]]
    for shifted in (Al, Ar):
        m0 = xi[shifted]  # (gamma, u, c, v, b)
        rep.add_mask("48", m0 != xi[None], xi[None], m0)
        m2 = xi[:, :, shifted]  # (u, c, gamma, v, b)
        rep.add_mask("48", m2 != xi[:, :, None], xi[:, :, None], m2)
    for shifted in (Bl, Br):
        m1 = xi[:, shifted]  # (u, gamma, c, v, b)
        rep.add_mask("48", m1 != xi[:, None], xi[:, None], m1)
        m3 = xi[:, :, :, shifted]  # (u, c, v, gamma, b)
        rep.add_mask("48", m3 != xi[:, :, :, None], xi[:, :, :, None], m3)
    rep.add_mask("48", xi[ea, eb] != eN, eN, xi[ea, eb])
    rep.add_mask("48", xi[:, :, ea, eb] != eN, eN, xi[:, :, ea, eb])
    return rep


@dataclass(frozen=True)
class SkewProduct:
    """A skew smashed product with its fan certificate.

    ``nn_subgroup`` is the subgroup generated by the embedded copies
    ``(N, e)`` and ``(e, N)``; every t and p value lies inside it.
    """

    A: FiniteMagma
    B: FiniteMagma
    factors: SkewFactors
    magma: FiniteMagma
    certificate: FanCertificate
    nn_subgroup: ElementSubset


def _skew_table(A: FiniteMagma, B: FiniteMagma, f: SkewFactors) -> np.ndarray:
    na, nb = A.order, B.order
    tb = B.table
    # b2^{a1} indexed (a1, b2) -> broadcast to (a1, b1, a2, b2)
    b2a1 = f.phi[:, None, None, :]
    b1 = np.arange(nb)[None, :, None, None]
    gamma = f.embed_b[f.xi]  # (a1, b1, a2, b2)
    left = tb[tb[b2a1, b1], gamma]
    right = tb[b2a1, tb[b1, gamma]]
    if not np.array_equal(left, right):
        bad = tuple(int(i) for i in np.argwhere(left != right)[0])
        raise ConsistencyError(f"grouping of b2^a1 * b1 * xi matters at {bad}")
    apart = A.table[:, None, :, None]
    return (apart * nb + left).reshape(na * nb, na * nb)


def skew_smashed_product(A: FiniteMagma, B: FiniteMagma, f: SkewFactors) -> SkewProduct:
    """Fan quasigroup on ``A x B``: ``(a1,b1)(a2,b2) = (a1a2, (b2^{a1} b1) xi)``."""
    rep = validate_skew_factors(A, B, f)
    if not rep.ok:
        first = rep.violations[0]
        raise PreconditionError(
            f"skew factors rejected: condition {first.equation} at {first.args} "
            f"({sum(rep.counts.values())} violations)"
        )
    G = magma_from_array(_skew_table(A, B, f))
    nb = B.order
    e = A.unit * nb + B.unit
    if not G.is_loop or G.unit != e:
        raise ConsistencyError("skew smashed product is not a unital quasigroup with unit (e,e)")
    cert = fan_certificate(G)
    if cert is None:
        raise ConsistencyError("skew smashed product is not a fan quasigroup")
    gens = [a * nb + B.unit for a in f.embed_a.tolist()] + [A.unit * nb + b for b in f.embed_b.tolist()]
    nn = generated_subgroup(G, gens)
    if not (cert.t_values() <= nn.members and cert.p_values() <= nn.members):
        raise ConsistencyError("associator values escape the (N, N) subgroup")
    return SkewProduct(A, B, f, G, cert, nn)


def skew_unit_inverses(A: FiniteMagma, B: FiniteMagma, f: SkewFactors,
                       pair: tuple[int, int]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Return ``((e,e)/(a,b), (a,b)\\(e,e))`` from the closed forms."""
    a, b = pair
    ea, eb = A.unit, B.unit
    N = f.n_group
    emb = f.embed_b
    # (x, y) * (a, b) = (e, e)
    x = int(A.rdiv[a, ea])
    y0 = int(B.ldiv[f.phi[x, b], eb])
    y = int(B.rdiv[emb[f.xi[x, y0, a, b]], y0])
    # (a, b) * (v, z) = (e, e), z recovered through phi(e/a) and eta
    v = int(A.ldiv[a, ea])
    e_over_a = x
    e_over_b = int(B.rdiv[b, eb])
    w = int(f.phi[e_over_a, e_over_b])
    xi_inv = int(N.ldiv[f.xi[a, b, v, w], N.unit])
    za = int(B.rdiv[b, emb[xi_inv]])  # z^a = xi^{-1} / b
    z = int(B.rdiv[emb[f.eta[e_over_a, a, w]], f.phi[e_over_a, za]])
    return (x, y), (v, z)


def skew_div(A: FiniteMagma, B: FiniteMagma, f: SkewFactors,
             mode: Literal["left", "right"], pair1: tuple[int, int], pair2: tuple[int, int],
             product: Optional[SkewProduct] = None) -> tuple[int, int]:
    """Closed-form divisions in a skew smashed product.

    ``mode="left"`` solves ``pair1 * X = pair2``; ``mode="right"`` solves
    ``Y * pair1 = pair2``. Both go through the unit inverses of ``pair1``
    and a correcting associator from the product's fan certificate.
    """
    product = product or skew_smashed_product(A, B, f)
    G, cert = product.magma, product.certificate
    nb = B.order
    g1, g2 = encode(pair1, nb), encode(pair2, nb)
    right_inv, left_inv = skew_unit_inverses(A, B, f, pair1)
    t = G.table
    if mode == "left":
        L = encode(left_inv, nb)
        out = t[t[L, g2], cert.p(g1, L, g2)]
    elif mode == "right":
        R = encode(right_inv, nb)
        out = t[cert.inverse(cert.t(g2, R, g1)), t[g2, R]]
    else:
        raise PreconditionError(f"mode must be 'left' or 'right', got {mode!r}")
    return decode(int(out), nb)
