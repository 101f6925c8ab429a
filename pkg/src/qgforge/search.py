"""Corpus generation and seeded witness searches.

Randomness comes from numpy's PCG64 generator. Candidate ``i`` of a search
with seed ``s`` draws from ``default_rng([s, i])``, so each candidate is
reproducible on its own and parallel runs pick the same (lowest-index)
witness as serial ones.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .core import FiniteMagma, magma_from_array, magma_from_table
from .errors import CapacityError, PreconditionError, SearchExhausted
from .formats import factors_from_doc, skew_factors_to_doc, smash_factors_to_doc
from .groups import cyclic
from .products import (
    SkewFactors,
    SmashFactors,
    direct_product,
    probe_columns,
    skew_smashed_product,
    smashed_product,
    validate_skew_factors,
)
from .structure import fan_certificate

LATIN_MAX_ORDER = 7
AUT_MAX_ORDER = 8
TARGETS = ("left-not-right", "nontrivial-fan", "one-sided-inverse-gap", "latin-square-census")


def worker_count() -> int:
    """Workers for candidate evaluation, capped by ``QGFORGE_THREADS``."""
    raw = os.environ.get("QGFORGE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


# -- Latin squares -------------------------------------------------------------

def _check_latin_order(n: int) -> None:
    if not 1 <= n <= LATIN_MAX_ORDER:
        raise CapacityError(f"Latin square enumeration supports 1 <= n <= {LATIN_MAX_ORDER}, got {n}")


def _latin_fill(n: int, reduced: bool) -> Iterator[list[list[int]]]:
    grid = [[-1] * n for _ in range(n)]
    row_used = [0] * n
    col_used = [0] * n
    full = (1 << n) - 1
    if reduced:
        for i in range(n):
            grid[0][i] = grid[i][0] = i
            row_used[0] |= 1 << i
            col_used[i] |= 1 << i
            row_used[i] |= 1 << i
            col_used[0] |= 1 << i
    cells = [(r, c) for r in range(n) for c in range(n) if grid[r][c] < 0]

    def rec(k: int):
        if k == len(cells):
            yield grid
            return
        r, c = cells[k]
        free = full & ~(row_used[r] | col_used[c])
        while free:
            bit = free & -free
            free ^= bit
            grid[r][c] = bit.bit_length() - 1
            row_used[r] |= bit
            col_used[c] |= bit
            yield from rec(k + 1)
            row_used[r] ^= bit
            col_used[c] ^= bit
        grid[r][c] = -1

    yield from rec(0)


def enumerate_latin_squares(n: int, reduced: bool = False) -> Iterator[FiniteMagma]:
    """Every n x n Latin square in lexicographic (row-major) order."""
    _check_latin_order(n)
    for grid in _latin_fill(n, reduced):
        yield magma_from_array(np.array(grid))


def _count_reduced(n: int) -> int:
    if n <= 2:
        return 1
    count = 0
    for _ in _latin_fill(n, True):
        count += 1
    return count


def count_latin_squares(n: int, reduced: bool = False) -> int:
    """Exact count; unreduced totals are ``reduced * n! * (n-1)!``."""
    _check_latin_order(n)
    r = _count_reduced(n)
    return r if reduced else r * math.factorial(n) * math.factorial(n - 1)


# -- automorphisms and homomorphisms -------------------------------------------

def automorphisms(m: FiniteMagma) -> list[tuple[int, ...]]:
    """All permutations ``s`` with ``s(a*b) = s(a)*s(b)``, by brute force."""
    if m.order > AUT_MAX_ORDER:
        raise CapacityError(f"automorphism search is limited to order {AUT_MAX_ORDER}")
    t = m.table
    out = []
    for perm in permutations(range(m.order)):
        s = np.array(perm)
        if np.array_equal(s[t], t[np.ix_(s, s)]):
            out.append(perm)
    return out


def is_homomorphism(xi: np.ndarray, domain: FiniteMagma, target: FiniteMagma) -> bool:
    """Is the flat map ``xi`` (indexed by domain elements) multiplicative?"""
    flat = np.asarray(xi).ravel()
    return bool(np.array_equal(flat[domain.table], target.table[flat[:, None], flat[None, :]]))


@dataclass(frozen=True)
class SmashConstraints:
    """Restrictions for :func:`random_smash_factors`.

    ``phi_non_automorphism``: every ``phi_j(a)`` avoids Aut(B).
    ``xi_non_homomorphism``: neither ``xi_i`` is a homomorphism ``A x B x A -> B``.
    ``fix_unit``: every ``phi_j(a)`` fixes the unit of B.
    """

    phi_non_automorphism: bool = False
    xi_non_homomorphism: bool = False
    fix_unit: bool = False


_perm_pool_cache: dict[tuple, np.ndarray] = {}


def _perm_pool(B: FiniteMagma, c: SmashConstraints) -> Optional[np.ndarray]:
    """Allowed permutations as rows, or None when any permutation is allowed."""
    if not (c.phi_non_automorphism or c.fix_unit):
        return None
    key = (B.table.tobytes(), B.order, c.phi_non_automorphism, c.fix_unit)
    if key in _perm_pool_cache:
        return _perm_pool_cache[key]
    if B.order > AUT_MAX_ORDER:
        raise CapacityError(f"constrained phi sampling is limited to order {AUT_MAX_ORDER}")
    perms = list(permutations(range(B.order)))
    if c.fix_unit:
        if B.unit is None:
            raise PreconditionError("fix_unit needs a unital B")
        perms = [p for p in perms if p[B.unit] == B.unit]
    if c.phi_non_automorphism:
        aut = set(automorphisms(B))
        perms = [p for p in perms if p not in aut]
    pool = np.array(perms, dtype=np.int64).reshape(len(perms), B.order)
    _perm_pool_cache[key] = pool
    return pool


def random_smash_factors(A: FiniteMagma, B: FiniteMagma, seed,
                         constraints: Optional[SmashConstraints] = None,
                         max_tries: int = 1000) -> SmashFactors:
    """Uniformly sampled smashing factors, deterministic given ``seed``."""
    c = constraints or SmashConstraints()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    na, nb = A.order, B.order
    pool = _perm_pool(B, c)
    if pool is not None and len(pool) == 0:
        raise SearchExhausted("no permutation of B satisfies the phi constraints")

    def draw_phi() -> np.ndarray:
        if pool is None:
            return np.array([rng.permutation(nb) for _ in range(na)], dtype=np.int64)
        return pool[rng.integers(0, len(pool), size=na)]

    phis = [draw_phi() for _ in range(3)]
    domain = direct_product([A, B, A]) if c.xi_non_homomorphism else None
    xis = []
    for _ in range(2):
        for _ in range(max_tries):
            xi = rng.integers(0, nb, size=(na, nb, na), dtype=np.int64)
            if domain is None or not is_homomorphism(xi, domain, B):
                break
        else:
            raise SearchExhausted("could not draw a non-homomorphism xi")
        xis.append(xi)
    return SmashFactors(xis[0], xis[1], *phis)


# -- skew factor sampling ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NSpec:
    """A group N and its embeddings into A and B."""

    n_group: FiniteMagma
    embed_a: np.ndarray
    embed_b: np.ndarray

    @classmethod
    def trivial(cls, A: FiniteMagma, B: FiniteMagma) -> "NSpec":
        return cls(cyclic(1), np.array([A.unit]), np.array([B.unit]))


def cyclic_n_spec(order_a: int, order_b: int, order_n: int) -> NSpec:
    """``Z_order_n`` inside ``Z_order_a`` and ``Z_order_b`` as multiples."""
    if order_a % order_n or order_b % order_n:
        raise PreconditionError(f"Z{order_n} does not embed in both Z{order_a} and Z{order_b}")
    k = np.arange(order_n)
    return NSpec(cyclic(order_n), k * (order_a // order_n), k * (order_b // order_n))


def default_n_order(order_a: int, order_b: int) -> int:
    g = math.gcd(order_a, order_b)
    for p in range(2, g + 1):
        if g % p == 0:
            return p
    return 1


def two_sided_orbits(m: FiniteMagma, emb: np.ndarray) -> np.ndarray:
    """Class index of each element under ``x -> g x h`` for g, h in the image."""
    n = m.order
    cls = np.full(n, -1, dtype=np.int64)
    t = m.table
    k = 0
    for x in range(n):
        if cls[x] >= 0:
            continue
        orbit = {x}
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for g in emb.tolist():
                for z in (int(t[g, y]), int(t[y, g])):
                    if z not in orbit:
                        orbit.add(z)
                        frontier.append(z)
        cls[sorted(orbit)] = k
        k += 1
    return cls


def _xi_classes(A: FiniteMagma, B: FiniteMagma, spec: NSpec):
    ca = two_sided_orbits(A, spec.embed_a)
    cb = two_sided_orbits(B, spec.embed_b)
    return ca, cb, int(ca.max()) + 1, int(cb.max()) + 1, int(ca[A.unit]), int(cb[B.unit])


def xi_space_is_trivial(A: FiniteMagma, B: FiniteMagma, spec: NSpec) -> bool:
    _, _, ka, kb, _, _ = _xi_classes(A, B, spec)
    return spec.n_group.order == 1 or ka * kb == 1


def _random_xi(A, B, spec: NSpec, rng: np.random.Generator) -> np.ndarray:
    ca, cb, ka, kb, ua, ub = _xi_classes(A, B, spec)
    vals = rng.integers(0, spec.n_group.order, size=(ka, kb, ka, kb), dtype=np.int64)
    e = spec.n_group.unit
    vals[ua, ub, :, :] = e
    vals[:, :, ua, ub] = e
    return vals[ca[:, None, None, None], cb[None, :, None, None],
                ca[None, None, :, None], cb[None, None, None, :]]


def sample_skew_factors(A: FiniteMagma, B: FiniteMagma, spec: NSpec, seed,
                        budget: int) -> Optional[SkewFactors]:
    """First validator-passing nontrivial perturbation of trivial factors.

    Only ``xi`` is perturbed, one value per pair of two-sided N-orbits, which
    keeps its shift invariance by construction. Returns the trivial factors
    when no nontrivial ``xi`` exists, ``None`` when the budget runs out.
    """
    if budget < 1:
        return None
    base = SkewFactors.trivial(A, B, spec.n_group, spec.embed_a, spec.embed_b)
    if xi_space_is_trivial(A, B, spec):
        return base if validate_skew_factors(A, B, base).ok else None
    for i in range(budget):
        rng = np.random.default_rng([int(seed), i])
        f = base.with_xi(_random_xi(A, B, spec, rng))
        if f.is_trivial():
            continue
        if validate_skew_factors(A, B, f).ok:
            return f
    return None


# -- searches ------------------------------------------------------------------

@dataclass
class SearchTask:
    target: str
    seed: int = 0
    budget: int = 1000
    order_a: int = 3
    order_b: int = 3
    order_n: Optional[int] = None
    A: Optional[FiniteMagma] = None
    B: Optional[FiniteMagma] = None
    n_spec: Optional[NSpec] = None

    def __post_init__(self):
        if self.target not in TARGETS:
            raise PreconditionError(f"unknown target {self.target!r}; choose from {', '.join(TARGETS)}")
        if self.budget < 1:
            raise PreconditionError("budget must be at least 1")
        if self.order_a < 1 or self.order_b < 1:
            raise PreconditionError("orders must be positive")

    def factor_a(self) -> FiniteMagma:
        return self.A if self.A is not None else cyclic(self.order_a)

    def factor_b(self) -> FiniteMagma:
        return self.B if self.B is not None else cyclic(self.order_b)

    def resolve_n_spec(self) -> NSpec:
        if self.n_spec is not None:
            return self.n_spec
        A, B = self.factor_a(), self.factor_b()
        if self.A is not None or self.B is not None:
            if self.order_n not in (None, 1):
                raise PreconditionError("give an explicit NSpec for non-cyclic factors")
            return NSpec.trivial(A, B)
        d = self.order_n if self.order_n is not None else default_n_order(A.order, B.order)
        return cyclic_n_spec(A.order, B.order, d)


@dataclass
class SearchResult:
    target: str
    status: str  # "found" or "exhausted"
    seed: int
    candidates_tried: int
    rejections: dict[str, int] = field(default_factory=dict)
    witness: Optional[dict] = None
    note: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "status": self.status,
            "seed": self.seed,
            "candidates_tried": self.candidates_tried,
            "rejections": dict(sorted(self.rejections.items())),
            "note": self.note,
            "witness": self.witness,
        }


# candidate evaluator: index -> (witness or None, rejection reason)
_Evaluator = Callable[[int], tuple[Optional[dict], str]]


def _scan(evaluate: _Evaluator, budget: int, workers: int) -> tuple[int, Optional[dict], dict[str, int]]:
    """Evaluate candidates 0..budget-1; return (tried, witness, rejections)."""
    rejections: dict[str, int] = {}
    batch = max(1, workers * 8)
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for start in range(0, budget, batch):
            idx = range(start, min(budget, start + batch))
            results = list(pool.map(evaluate, idx)) if pool else [evaluate(i) for i in idx]
            for i, (witness, reason) in zip(idx, results):
                if witness is not None:
                    return i + 1, witness, rejections
                rejections[reason] = rejections.get(reason, 0) + 1
    finally:
        if pool:
            pool.shutdown()
    return budget, None, rejections


def _left_not_right(task: SearchTask, workers: int) -> SearchResult:
    A, B = task.factor_a(), task.factor_b()
    constraints = SmashConstraints(phi_non_automorphism=True, xi_non_homomorphism=True)

    def evaluate(i: int):
        f = random_smash_factors(A, B, np.random.default_rng([task.seed, i]), constraints)
        m = smashed_product(A, B, f)
        probe = probe_columns(m, B.order)
        if probe.is_right_quasigroup:
            return None, "right quasigroup"
        return {
            "target": task.target,
            "candidate": i,
            "A": A.rows(),
            "B": B.rows(),
            "factors": smash_factors_to_doc(f),
            "magma": m.rows(),
            "probe": probe.to_dict(),
        }, ""

    try:
        tried, witness, rej = _scan(evaluate, task.budget, workers)
    except SearchExhausted as exc:
        return SearchResult(task.target, "exhausted", task.seed, 0, {"constraints": 1}, None, str(exc))
    status = "found" if witness else "exhausted"
    return SearchResult(task.target, status, task.seed, tried, rej, witness)


def _skew_candidates(task: SearchTask, accept: Callable, reason: str, workers: int) -> SearchResult:
    A, B = task.factor_a(), task.factor_b()
    for name, M in (("A", A), ("B", B)):
        if fan_certificate(M) is None:
            raise PreconditionError(f"{name} is not a fan quasigroup")
    spec = task.resolve_n_spec()
    base = SkewFactors.trivial(A, B, spec.n_group, spec.embed_a, spec.embed_b)
    if not validate_skew_factors(A, B, base).ok:
        raise PreconditionError("N does not satisfy the embedding conditions in A and B")
    single = xi_space_is_trivial(A, B, spec)

    def evaluate(i: int):
        if single:
            f = base
        else:
            f = base.with_xi(_random_xi(A, B, spec, np.random.default_rng([task.seed, i])))
            if not validate_skew_factors(A, B, f).ok:
                return None, "validator"
        sp = skew_smashed_product(A, B, f)
        extra = accept(sp)
        if extra is None:
            return None, reason
        return {
            "target": task.target,
            "candidate": i,
            "A": A.rows(),
            "B": B.rows(),
            "factors": skew_factors_to_doc(f),
            "magma": sp.magma.rows(),
            **extra,
        }, ""

    budget = 1 if single else task.budget
    tried, witness, rej = _scan(evaluate, budget, workers)
    note = "xi has no nontrivial values for this N; one candidate covers the space" if single else ""
    status = "found" if witness else "exhausted"
    return SearchResult(task.target, status, task.seed, tried, rej, witness, note)


def _accept_fan(sp) -> Optional[dict]:
    fan = sp.certificate.fan
    if len(fan) <= 1:
        return None
    return {"fan": fan.sorted()}


def inverse_gaps(m: FiniteMagma) -> list[int]:
    """Elements ``a`` of a unital quasigroup with ``e/a != a\\e``."""
    e = m.unit
    return np.flatnonzero(m.rdiv[:, e] != m.ldiv[:, e]).tolist()


def _accept_gap(sp) -> Optional[dict]:
    gaps = inverse_gaps(sp.magma)
    if not gaps:
        return None
    m = sp.magma
    a = gaps[0]
    return {
        "gap_elements": gaps,
        "gap_count": len(gaps),
        "example": {"a": a, "e_over_a": int(m.rdiv[a, m.unit]), "a_under_e": int(m.ldiv[a, m.unit])},
    }


def run_search(task: SearchTask, workers: Optional[int] = None) -> SearchResult:
    """Run one search; budget exhaustion is a result, not an exception."""
    workers = workers or worker_count()
    if task.target == "left-not-right":
        return _left_not_right(task, workers)
    if task.target == "nontrivial-fan":
        return _skew_candidates(task, _accept_fan, "fan trivial", workers)
    if task.target == "one-sided-inverse-gap":
        return _skew_candidates(task, _accept_gap, "no gap", workers)
    n = task.order_a
    reduced = count_latin_squares(n, reduced=True)
    witness = {"target": task.target, "order": n, "reduced": reduced,
               "total": count_latin_squares(n, reduced=False)}
    return SearchResult(task.target, "found", task.seed, 1, {}, witness)


# -- replay --------------------------------------------------------------------

def _table(rows: Sequence) -> FiniteMagma:
    return magma_from_table(len(rows), rows)


def replay_witness(witness: dict) -> bool:
    """Re-verify a serialized witness from scratch, without search state."""
    target = witness.get("target")
    if target == "latin-square-census":
        n = witness["order"]
        return (count_latin_squares(n, True) == witness["reduced"]
                and count_latin_squares(n, False) == witness["total"])
    A, B = _table(witness["A"]), _table(witness["B"])
    stored = _table(witness["magma"])
    f = factors_from_doc(witness["factors"])
    nb = B.order
    if target == "left-not-right":
        m = smashed_product(A, B, f)
        if m != stored or m.ldiv is None or m.rdiv is not None:
            return False
        probe = witness["probe"]
        a, b = probe["column"]
        col = a * nb + b
        target_el = probe["target"][0] * nb + probe["target"][1]
        sols = sorted(int(y) for y in np.flatnonzero(m.table[:, col] == target_el))
        return sols == sorted(x * nb + y for x, y in probe["solutions"]) and len(sols) != 1
    sp = skew_smashed_product(A, B, f)
    if sp.magma != stored:
        return False
    if target == "nontrivial-fan":
        cert = fan_certificate(sp.magma)
        return cert is not None and cert.fan.sorted() == witness["fan"] and len(cert.fan) > 1
    if target == "one-sided-inverse-gap":
        gaps = inverse_gaps(sp.magma)
        return bool(gaps) and gaps == witness["gap_elements"]
    raise PreconditionError(f"unknown witness target {target!r}")
