import numpy as np
import pytest

from corpus import groups, skew_instances, skew_products, twisted_loops
from qgforge.errors import CapacityError, PreconditionError
from qgforge.groups import cyclic, klein_four, symmetric
from qgforge.products import (
    SkewFactors,
    SmashFactors,
    decode,
    direct_product,
    direct_product_certificate,
    encode,
    right_solvability_probe,
    skew_div,
    skew_smashed_product,
    skew_unit_inverses,
    smashed_div_l,
    smashed_div_l_table,
    smashed_product,
    validate_skew_factors,
)
from qgforge.search import random_smash_factors
from qgforge.structure import fan_certificate, structure_report


def test_encode_decode():
    assert encode((2, 1), 3) == 7 and decode(7, 3) == (2, 1)


def test_direct_product_cells():
    A, B = cyclic(2), symmetric(3)
    m = direct_product([A, B])
    for a1 in range(2):
        for b1 in range(6):
            for a2 in range(2):
                for b2 in range(6):
                    assert decode(m.mul(a1 * 6 + b1, a2 * 6 + b2), 6) == (A.mul(a1, a2), B.mul(b1, b2))


def test_direct_product_limits():
    with pytest.raises(PreconditionError):
        direct_product([])
    with pytest.raises(CapacityError):
        direct_product([cyclic(50), cyclic(50)], max_order=2048)


def test_three_factor_certificate():
    loop = twisted_loops()["V4~Z2 loop"]
    factors = [cyclic(2), loop, cyclic(1)]
    cert = direct_product_certificate(factors)
    brute = fan_certificate(cert.base)
    assert cert.nucleus == brute.nucleus and cert.center == brute.center
    assert cert.fan == brute.fan
    assert np.array_equal(cert.t_table, brute.t_table)
    assert np.array_equal(cert.p_table, brute.p_table)


def test_certificate_none_for_non_fan():
    sub = direct_product([cyclic(3)])
    from qgforge.core import magma_from_table
    m = magma_from_table(3, [[(a - b) % 3 for b in range(3)] for a in range(3)])
    assert direct_product_certificate([sub, m]) is None


@pytest.mark.parametrize("ab", [(cyclic(3), cyclic(3)), (cyclic(2), cyclic(4)), (symmetric(3), cyclic(3))])
def test_smashed_left_division_closed_form(ab):
    A, B = ab
    for seed in range(5):
        f = random_smash_factors(A, B, seed)
        m = smashed_product(A, B, f)
        for g in range(m.order):
            for h in range(m.order):
                x = smashed_div_l(A, B, f, decode(g, B.order), decode(h, B.order))
                assert m.mul(g, encode(x, B.order)) == h


def test_trivial_smash_is_direct_product():
    for A, B in [(cyclic(3), cyclic(3)), (symmetric(3), cyclic(2)), (klein_four(), symmetric(3))]:
        assert smashed_product(A, B, SmashFactors.trivial(A, B)) == direct_product([A, B])


def test_smash_rejects_bad_shapes():
    A, B = cyclic(2), cyclic(3)
    f = SmashFactors.trivial(A, B)
    bad = SmashFactors(f.xi1, f.xi2, f.phi1, np.zeros_like(f.phi2), f.phi3)
    with pytest.raises(PreconditionError, match="phi2"):
        smashed_product(A, B, bad)
    with pytest.raises(PreconditionError, match="xi1"):
        smashed_product(A, B, SmashFactors(f.xi1[:1], f.xi2, f.phi1, f.phi2, f.phi3))


def test_probe_on_direct_product():
    A = B = cyclic(3)
    assert right_solvability_probe(A, B, SmashFactors.trivial(A, B)).is_right_quasigroup


def test_probe_reports_defective_column():
    A = B = cyclic(3)
    # xi1 = b1^{-1} cancels b1: the B-part no longer depends on b1
    xi = np.zeros((3, 3, 3), dtype=np.int64)
    xi[:, :, :] = ((-np.arange(3)) % 3)[None, :, None]
    ident = np.tile(np.arange(3), (3, 1))
    f = SmashFactors(xi, np.zeros_like(xi), ident, ident, ident)
    rep = right_solvability_probe(A, B, f)
    assert not rep.is_right_quasigroup
    assert rep.column == (0, 0) and len(rep.solutions) == 3
    m = smashed_product(A, B, f)
    for y in rep.solutions:
        assert decode(m.mul(encode(y, 3), 0), 3) == rep.target


@pytest.mark.parametrize("name", list(skew_instances()))
def test_skew_instances_validate_and_divide(name):
    A, B, f = skew_instances()[name]
    assert validate_skew_factors(A, B, f).ok
    sp = skew_products()[name]
    G = sp.magma
    nb = B.order
    e = encode((A.unit, B.unit), nb)
    assert G.is_loop and G.unit == e
    assert sp.certificate.t_values() <= sp.nn_subgroup.members
    assert sp.certificate.p_values() <= sp.nn_subgroup.members
    for g in range(G.order):
        pair = decode(g, nb)
        r_inv, l_inv = skew_unit_inverses(A, B, f, pair)
        assert G.mul(encode(r_inv, nb), g) == e
        assert G.mul(g, encode(l_inv, nb)) == e
        for h in range(G.order):
            x = encode(skew_div(A, B, f, "left", pair, decode(h, nb), sp), nb)
            y = encode(skew_div(A, B, f, "right", pair, decode(h, nb), sp), nb)
            assert G.mul(g, x) == h
            assert G.mul(y, g) == h


def test_skew_div_bad_mode():
    A, B, f = skew_instances()["Z2*Z3 trivial"]
    with pytest.raises(PreconditionError):
        skew_div(A, B, f, "up", (0, 0), (0, 0))


@pytest.mark.parametrize("name", ["Z2*Z3 trivial", "Z2*Z2 trivial", "Z2*Z2 N=Z2", "S3*Z2 trivial"])
def test_trivial_skew_is_direct_product(name):
    A, B, f = skew_instances()[name]
    assert f.is_trivial()
    assert skew_smashed_product(A, B, f).magma == direct_product([A, B])


def test_nontrivial_skew_has_nontrivial_fan():
    sp = skew_products()["Z4*Z4 N=Z2"]
    assert sp.certificate.fan.sorted() == [0, 2]
    assert not sp.magma.is_associative()
    rep = structure_report(sp.magma)
    assert rep.nucleus == sp.certificate.nucleus


def _mutate(f: SkewFactors, **kw) -> SkewFactors:
    fields = dict(n_group=f.n_group, embed_a=f.embed_a, embed_b=f.embed_b, phi=f.phi,
                  eta=f.eta, kappa=f.kappa, xi=f.xi)
    fields.update(kw)
    return SkewFactors(**fields)


def test_validator_rejects_broken_xi():
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    xi = f.xi.copy()
    # break shift invariance in the last slot
    xi[1, 1, 1, 1] = 1 - xi[1, 1, 1, 1]
    rep = validate_skew_factors(A, B, f.with_xi(xi))
    assert not rep.ok and "48" in rep.counts
    with pytest.raises(PreconditionError, match="rejected"):
        skew_smashed_product(A, B, f.with_xi(xi))


def test_validator_rejects_unnormalized_xi():
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    xi = f.xi.copy()
    xi[0, 0] = 1
    assert not validate_skew_factors(A, B, f.with_xi(xi)).ok


def test_validator_rejects_non_identity_phi_on_n():
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    phi = f.phi.copy()
    phi[0] = [0, 3, 2, 1]
    assert not validate_skew_factors(A, B, _mutate(f, phi=phi)).ok


def test_validator_rejects_bad_embedding():
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    assert not validate_skew_factors(A, B, _mutate(f, embed_a=np.array([0, 1]))).ok


def test_validator_reports_shape_errors():
    A, B, f = skew_instances()["Z4*Z4 N=Z2"]
    rep = validate_skew_factors(A, B, _mutate(f, xi=f.xi[:2]))
    assert not rep.ok


def test_div_table_matches_scalar_closed_form():
    A, B = symmetric(3), cyclic(3)
    f = random_smash_factors(A, B, 11)
    tab = smashed_div_l_table(A, B, f)
    m = smashed_product(A, B, f)
    for g in range(18):
        for h in range(18):
            assert tab[g, h] == encode(smashed_div_l(A, B, f, decode(g, 3), decode(h, 3)), 3)
    assert (tab == m.ldiv).all()
