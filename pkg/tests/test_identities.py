import dataclasses

import numpy as np
import pytest

from corpus import fan_corpus, skew_products, twisted_loops
from qgforge.core import ElementSubset, magma_from_table
from qgforge.errors import DomainError, PreconditionError
from qgforge.groups import cyclic
from qgforge.identities import (
    ALL_IDENTITIES,
    MAX_STORED_FAILURES,
    _Ops,
    _run,
    check_lemma1,
    check_lemma2,
    check_quasigroup_basics,
    check_theorem4_identities,
    evaluate_identity,
    run_identities,
    select_identities,
)
from qgforge.structure import fan_certificate

CORPUS = fan_corpus(12)


def _all_reports(cert, n4=10):
    return (check_lemma1(cert) + check_lemma2(cert) + check_theorem4_identities(cert, n4)
            + check_quasigroup_basics(cert.base))


@pytest.mark.parametrize("name", list(CORPUS))
def test_corpus_passes_every_identity(name):
    cert = fan_certificate(CORPUS[name])
    reports = _all_reports(cert)
    assert {r.identity_id for r in reports} == set(ALL_IDENTITIES)
    for r in reports:
        if CORPUS[name].order <= 10:
            assert r.skipped is None
        assert r.failure_count == 0, (r.identity_id, r.failures[:3])


def test_z4z4_passes_n4_identities_at_order_16():
    cert = skew_products()["Z4*Z4 N=Z2"].certificate
    for r in check_theorem4_identities(cert, n4_max_order=16):
        assert r.ok, r.identity_id
        assert r.domain_size in (16 ** 4, 4 * 4 * 16)


def test_n4_skipped_above_ceiling():
    cert = skew_products()["Z4*Z4 N=Z2"].certificate
    by_id = {r.identity_id: r for r in check_theorem4_identities(cert)}
    assert by_id["63"].skipped and by_id["64"].skipped and by_id["65"].skipped
    assert by_id["60"].skipped is None


def test_domain_sizes():
    m = twisted_loops()["V4~Z2 loop"]
    cert = fan_certificate(m)
    sizes = {r.identity_id: r.domain_size for r in _all_reports(cert)}
    assert sizes["70"] == 8 and sizes["73"] == 8 ** 3
    assert sizes["60"] == 2 * 2 * 8  # a, b in the nucleus {0, 1}
    assert sizes["82"] == 8 ** 3 * 2 ** 3  # z_i in the center
    assert sizes["87"] == 8 ** 3 * 2
    assert sizes["63"] == 8 ** 4


# Uncorrected variants of identities 63 and 64; both are refuted below.
def _printed_63(o, u, v, x, y):
    uv = o.ld(u, v)
    q = o.ld(o.mul(u, x), o.mul(v, y))
    return o.ld(x, o.mul(uv, y)), o.mul(o.mul(q, o.p(u, x, q)), o.inv(o.p(u, uv, x)))


def _printed_64(o, a, b, c, x):
    bc, ab, cx = o.mul(b, c), o.mul(a, b), o.mul(c, x)
    u, v = o.mul(a, bc), o.mul(ab, c)
    ux, vx = o.mul(u, x), o.mul(v, x)
    lhs = o.ld(x, o.mul(o.p(a, b, c), x))
    pre = o.inv(o.mul(o.p(b, c, x), o.p(a, bc, x)))
    return lhs, o.mul(pre, o.mul(o.p(a, b, cx), o.p(u, x, o.ld(ux, vx))))


@pytest.mark.parametrize("fn", [_printed_63, _printed_64])
def test_uncorrected_forms_are_false(fn):
    cert = skew_products()["Z4*Z4 N=Z2"].certificate
    doms = {"G": np.arange(16)}
    rep = _run(("x", ("G",) * 4, fn), _Ops(cert.base, cert), doms)
    assert rep.failure_count > 1000
    assert len(rep.failures) == MAX_STORED_FAILURES
    assert all(r.ok for r in check_theorem4_identities(cert, n4_max_order=16))


def test_failures_are_lexicographic_and_deterministic():
    cert = skew_products()["Z4*Z4 N=Z2"].certificate
    doms = {"G": np.arange(16)}
    rep1 = _run(("x", ("G",) * 4, _printed_63), _Ops(cert.base, cert), doms)
    rep2 = _run(("x", ("G",) * 4, _printed_63), _Ops(cert.base, cert), doms)
    args = [f[0] for f in rep1.failures]
    assert args == sorted(args)
    assert rep1.failures == rep2.failures
    for (a, lhs, rhs) in rep1.failures[:5]:
        assert evaluate_identity(cert, "63", a)[0] == lhs != rhs


def test_corrupted_t_table_detected():
    m = twisted_loops()["V4~Z2 loop"]
    cert = fan_certificate(m)
    t = cert.t_table.copy()
    t[3, 5, 6] = 1 - t[3, 5, 6]
    bad = dataclasses.replace(cert, t_table=t)
    failures = sum(r.failure_count for r in _all_reports(bad))
    assert failures > 0


def test_corrupted_p_table_detected():
    sp = skew_products()["Z6*Z2 N=Z2"]
    cert = sp.certificate
    p = cert.p_table.copy()
    p[0, 0, 0] = 1
    bad = dataclasses.replace(cert, p_table=p)
    assert sum(r.failure_count for r in _all_reports(bad)) > 0


def test_wrong_nucleus_detected():
    m = twisted_loops()["V4~Z2 loop"]
    cert = fan_certificate(m)
    bad = dataclasses.replace(cert, nucleus=ElementSubset.of(8, range(8)))
    assert sum(r.failure_count for r in check_theorem4_identities(bad)) > 0


def test_corrupted_ldiv_fails_basics():
    m = cyclic(3)
    ldiv = m.ldiv.copy()
    ldiv[1] = ldiv[1][::-1]
    bad = dataclasses.replace(m, ldiv=ldiv)
    reps = {r.identity_id: r for r in check_quasigroup_basics(bad)}
    assert reps["80a"].failure_count > 0 and reps["81a"].ok


def test_basics_on_subtraction():
    m = magma_from_table(3, [[(a - b) % 3 for b in range(3)] for a in range(3)])
    reps = check_quasigroup_basics(m)
    assert len(reps) == 4 and all(r.ok for r in reps)


def test_domain_error():
    cert = fan_certificate(twisted_loops()["V4~Z2 loop"])
    with pytest.raises(DomainError):
        evaluate_identity(cert, "60", (5, 0, 0))  # a must lie in the nucleus {0, 1}
    with pytest.raises(DomainError):
        evaluate_identity(cert, "82", (0, 0, 0, 3, 0, 0))
    lhs, rhs = evaluate_identity(cert, "60", (1, 0, 5))
    assert lhs == rhs
    with pytest.raises(PreconditionError):
        evaluate_identity(cert, "70", (0, 1))


def test_select_identities():
    assert select_identities("70-79") == ["70", "71", "72", "72b", "73", "74", "75", "76a", "76",
                                          "77", "78", "79"]
    assert select_identities("80-81") == ["80a", "80b", "81a", "81b"]
    assert select_identities("94,60") == ["94", "60"]
    assert select_identities(None) == list(ALL_IDENTITIES)
    for bad in ("x", "99", "1-5"):
        with pytest.raises(PreconditionError):
            select_identities(bad)


def test_run_identities_needs_certificate():
    m = magma_from_table(3, [[(a - b) % 3 for b in range(3)] for a in range(3)])
    assert len(run_identities(m, None, ["80a", "81b"])) == 2
    with pytest.raises(PreconditionError):
        run_identities(m, None, ["70"])


def test_uncorrected_forms_fail_on_order8_loop():
    # frozen counts for the deterministic twisted V4 x Z2 loop
    cert = fan_certificate(twisted_loops()["V4~Z2 loop"])
    doms = {"G": np.arange(8)}
    ops = _Ops(cert.base, cert)
    assert _run(("x", ("G",) * 4, _printed_63), ops, doms).failure_count == 704
    assert _run(("x", ("G",) * 4, _printed_64), ops, doms).failure_count == 640
