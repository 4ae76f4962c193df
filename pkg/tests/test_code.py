import random
from itertools import combinations

import pytest

from atrahasis.code import (EXTERIOR, SYMMETRIC, CodeParams, StarFamily,
                            derive_params, download, encode, help_matrix,
                            help_message, node_content, repair, rs_stars_t2,
                            verify_axioms)
from atrahasis.errors import (AxiomViolationError, FieldTooSmallError,
                              InfeasibleParametersError, UsageError)
from atrahasis.fields import binary_field, prime_field
from atrahasis.linalg import SpanSolver, Vector, dot_ints
from conftest import random_values


def random_file(rng, spec, family):
    return encode(spec, random_values(rng, spec, family.params.M), family.params)


def all_contents(spec, family, file):
    return [node_content(file, family, h) for h in range(family.params.n)]


def test_derive_params_flagship():
    p = derive_params(9, 5, 6)
    assert (p.t, p.alpha, p.beta, p.M) == (3, 6, 3, 30)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_derive_params_t2_family(k):
    p = derive_params(2 * k, k, 2 * (k - 1))
    assert (p.t, p.alpha, p.beta, p.M) == (2, k - 1, 1, k * (k - 1))


@pytest.mark.parametrize("k", [2, 3, 5, 8])
def test_derive_params_degenerate_top(k):
    p = derive_params(k + 1, k, k)
    assert (p.t, p.alpha, p.beta, p.M) == (k, 1, 1, k)


def test_derive_params_rejects_non_integral_t():
    with pytest.raises(InfeasibleParametersError):
        derive_params(6, 4, 5)  # t = 5/2
    with pytest.raises(InfeasibleParametersError):
        derive_params(5, 5, 5)  # n - 1 < d
    with pytest.raises(InfeasibleParametersError):
        derive_params(4, 1, 2)  # k < 2


def test_params_invariants_enforced():
    good = derive_params(9, 5, 6)
    with pytest.raises(InfeasibleParametersError):
        CodeParams(n=9, k=5, d=6, t=3, alpha=7, beta=3, M=30, flavor=SYMMETRIC)
    with pytest.raises(InfeasibleParametersError):
        CodeParams(n=9, k=5, d=6, t=3, alpha=6, beta=2, M=30, flavor=SYMMETRIC)
    with pytest.raises(InfeasibleParametersError):
        CodeParams(n=9, k=5, d=6, t=3, alpha=6, beta=3, M=31, flavor=SYMMETRIC)
    with pytest.raises(UsageError):
        CodeParams(n=9, k=5, d=6, t=3, alpha=6, beta=3, M=30, flavor="other")
    assert good.y_dim == 3


def test_verify_axioms_fixture(fixture_family):
    report = verify_axioms(fixture_family)
    assert report.ok
    assert report.subsets_checked == 84 + 84 + 84


def test_verify_axioms_rs_t2(gf16):
    # squaring is a bijection in characteristic 2, so 6 points exist
    assert verify_axioms(rs_stars_t2(gf16, 6, 3, SYMMETRIC)).ok
    assert verify_axioms(rs_stars_t2(gf16, 6, 3, EXTERIOR)).ok


def test_verify_axioms_duplicate_stars(gf16):
    fam = rs_stars_t2(gf16, 6, 3, SYMMETRIC)
    broken = StarFamily(gf16, fam.params,
                        [fam.x_stars[0]] + fam.x_stars[1:5] + [fam.x_stars[0]],
                        fam.second_stars)
    report = verify_axioms(broken)
    assert not report.ok
    assert report.axiom == "MDSx"
    assert set(report.subset) == {0, 5}


def test_encode_identity_and_linearity(gf16, fixture_family, rng):
    params = fixture_family.params
    raw = random_values(rng, gf16, params.M)
    assert encode(gf16, raw, params).vector.values == raw
    assert encode(gf16, [0] * params.M, params).vector.is_zero()
    other = random_values(rng, gf16, params.M)
    summed = [gf16.add(a, b) for a, b in zip(raw, other)]
    lhs = encode(gf16, summed, params).vector
    rhs = encode(gf16, raw, params).vector + encode(gf16, other, params).vector
    assert lhs == rhs
    with pytest.raises(UsageError):
        encode(gf16, raw[:-1], params)


def test_node_content_values(gf16, fixture_family, rng):
    params = fixture_family.params
    zero = encode(gf16, [0] * params.M, params)
    assert node_content(zero, fixture_family, 0).values.is_zero()
    unit = encode(gf16, [1] + [0] * (params.M - 1), params)
    nc = node_content(unit, fixture_family, 2)
    assert len(nc.values) == 6
    expected = [row[0] for row in fixture_family.node_tensor_rows(2)]
    assert nc.values.values == expected
    phi = random_file(rng, gf16, fixture_family)
    nc = node_content(phi, fixture_family, 5)
    rows = fixture_family.node_tensor_rows(5)
    assert nc.values.values == [dot_ints(gf16, r, phi.vector.values) for r in rows]
    with pytest.raises(UsageError):
        node_content(phi, fixture_family, 9)


def test_download_exhaustive_small(gf16, rng):
    fam = rs_stars_t2(gf16, 6, 3, SYMMETRIC)
    for _ in range(3):
        phi = random_file(rng, gf16, fam)
        contents = all_contents(gf16, fam, phi)
        for K in combinations(range(6), 3):
            got = download([contents[h] for h in K], fam)
            assert got.vector == phi.vector
    zero = encode(gf16, [0] * fam.params.M, fam.params)
    zc = all_contents(gf16, fam, zero)
    assert download(zc[:3], fam).vector.is_zero()
    with pytest.raises(UsageError):
        download(zc[:2], fam)  # k-1 contents underdetermine the file
    with pytest.raises(UsageError):
        download([zc[0], zc[0], zc[1]], fam)


def test_help_and_repair_roundtrip(gf16, fixture_family, rng):
    fam = fixture_family
    phi = random_file(rng, gf16, fam)
    contents = all_contents(gf16, fam, phi)
    f = 3
    helpers = [0, 1, 2, 4, 5, 8]
    msgs = [help_message(contents[h], fam, f) for h in helpers]
    assert all(len(m.values) == 3 for m in msgs)
    rebuilt = repair(msgs, fam)
    assert rebuilt.node_index == f
    assert rebuilt.values == contents[f].values
    with pytest.raises(UsageError):
        repair(msgs[:-1], fam)
    with pytest.raises(UsageError):
        help_message(contents[f], fam, f)


def test_zero_file_messages(gf16, fixture_family):
    params = fixture_family.params
    zero = encode(gf16, [0] * params.M, params)
    zc = node_content(zero, fixture_family, 0)
    msg = help_message(zc, fixture_family, 4)
    assert msg.values.is_zero()
    msgs = [help_message(node_content(zero, fixture_family, h), fixture_family, 0)
            for h in (1, 2, 3, 4, 5, 6)]
    assert repair(msgs, fixture_family).values.is_zero()


def test_message_containment_all_pairs(gf16, fixture_family):
    # every help-message tensor lies in the helper's node subspace
    for h in range(9):
        for f in range(9):
            if h != f:
                help_matrix(fixture_family, h, f)  # raises if containment fails


def test_short_helper_sets_are_span_deficient(gf16, fixture_family):
    fam = fixture_family
    generators = []
    for h in (0, 1, 2, 4, 5):  # d - 1 = 5 helpers only
        generators.extend(fam.message_tensor_rows(h, 3))
    solver = SpanSolver(gf16, generators, fam.params.M)
    targets = fam.node_tensor_rows(3)
    assert any(solver.coefficients_for(t) is None for t in targets)


def test_linearity_of_pipeline(gf16, fixture_family, rng):
    fam = fixture_family
    params = fam.params
    a = random_file(rng, gf16, fam)
    b = random_file(rng, gf16, fam)
    c = rng.randrange(1, 16)
    summed = encode(
        gf16,
        [gf16.add(x, gf16.mul(c, y)) for x, y in
         zip(a.vector.values, b.vector.values)],
        params)
    for h in range(4):
        lhs = node_content(summed, fam, h).values
        rhs = node_content(a, fam, h).values + \
            node_content(b, fam, h).values.scale(c)
        assert lhs == rhs
    msg_lhs = help_message(node_content(summed, fam, 1), fam, 0).values
    msg_rhs = help_message(node_content(a, fam, 1), fam, 0).values + \
        help_message(node_content(b, fam, 1), fam, 0).values.scale(c)
    assert msg_lhs == msg_rhs
    K = (0, 2, 4, 6, 8)
    lhs = download([node_content(summed, fam, h) for h in K], fam).vector
    rhs = download([node_content(a, fam, h) for h in K], fam).vector + \
        download([node_content(b, fam, h) for h in K], fam).vector.scale(c)
    assert lhs == rhs
    H = (1, 2, 3, 4, 5, 6)
    def rebuild(phi):
        msgs = [help_message(node_content(phi, fam, h), fam, 0) for h in H]
        return repair(msgs, fam).values
    assert rebuild(summed) == rebuild(a) + rebuild(b).scale(c)


def test_rs_stars_field_too_small():
    gf7 = prime_field(7)
    # squares mod 7 are {0, 1, 2, 4}: only four distinct values, so a
    # six-node code cannot pick its points there
    assert len({gf7.pow(a, 2) for a in range(7)}) == 4
    with pytest.raises(FieldTooSmallError):
        rs_stars_t2(gf7, 6, 3, SYMMETRIC)
    # GF(11) has six distinct squares: exactly enough for n = 6
    gf11 = prime_field(11)
    fam = rs_stars_t2(gf11, 6, 3, SYMMETRIC)
    assert len({x.values[1] for x in fam.x_stars}) == 6
    assert verify_axioms(fam).ok
    with pytest.raises(FieldTooSmallError):
        rs_stars_t2(gf11, 7, 3, SYMMETRIC)


def test_rs_stars_frobenius_all_points(gf16):
    fam = rs_stars_t2(gf16, 6, 3, SYMMETRIC)
    assert verify_axioms(fam).ok
    # squaring is a bijection in characteristic 2: GF(8) already has
    # eight distinct squares, enough for six nodes
    gf8 = binary_field(3)
    fam8 = rs_stars_t2(gf8, 6, 3, SYMMETRIC)
    assert len({x.values[1] for x in fam8.x_stars}) == 6
    assert verify_axioms(fam8).ok
    # k = 2 needs n >= d + 1 = 3; two nodes alone cannot run a repair
    with pytest.raises(InfeasibleParametersError):
        rs_stars_t2(binary_field(2), 2, 2, SYMMETRIC)
    fam22 = rs_stars_t2(binary_field(2), 3, 2, SYMMETRIC)
    assert verify_axioms(fam22).ok


def test_exterior_t3_roundtrip():
    # a (7,5,6,6) exterior instance over GF(17); the star draw is pinned
    spec = prime_field(17)
    params = derive_params(7, 5, 6, EXTERIOR)
    r = random.Random(2)
    xs = [Vector(spec, [r.randrange(17) for _ in range(3)]) for _ in range(7)]
    ws = [Vector(spec, [r.randrange(17) for _ in range(5)]) for _ in range(7)]
    fam = StarFamily(spec, params, xs, ws)
    assert verify_axioms(fam).ok
    rng = random.Random(5)
    phi = random_file(rng, spec, fam)
    contents = all_contents(spec, fam, phi)
    for K in combinations(range(7), 5):
        assert download([contents[h] for h in K], fam).vector == phi.vector
    for f in range(7):
        helpers = [h for h in range(7) if h != f]
        msgs = [help_message(contents[h], fam, f) for h in helpers]
        assert all(len(m.values) == 3 for m in msgs)
        assert repair(msgs, fam).values == contents[f].values


def test_t3_stretch_gf32_roundtrip():
    # stretch instance: (10,7,9,15) over GF(32) from the greedy pattern
    # search (alpha = 15, beta = 5, M = 105)
    from atrahasis.search import SearchConfig, grow_pool
    spec = binary_field(5)
    params = derive_params(10, 7, 9, SYMMETRIC)
    result = grow_pool(SearchConfig(spec, params, (0, 3, 9), (0, 1, 2, 3, 4)))
    assert result.ok and len(result.pool) == 10
    fam = result.family
    assert (fam.params.t, fam.params.alpha, fam.params.beta, fam.params.M) == \
        (3, 15, 5, 105)
    rng = random.Random(32)
    phi = random_file(rng, spec, fam)
    contents = all_contents(spec, fam, phi)
    assert download([contents[h] for h in (0, 1, 3, 5, 6, 8, 9)],
                    fam).vector == phi.vector
    f = 7
    helpers = [0, 1, 2, 3, 4, 5, 6, 8, 9]
    msgs = [help_message(contents[h], fam, f) for h in helpers]
    assert all(len(m.values) == 5 for m in msgs)
    assert repair(msgs, fam).values == contents[f].values


def test_t4_symmetric_roundtrip():
    # a (9,7,8,20) instance over GF(64), found by the greedy pattern
    # search; spot-check one download and one repair at alpha = 20
    from atrahasis.search import SearchConfig, grow_pool
    spec = binary_field(6)
    params = derive_params(9, 7, 8, SYMMETRIC)
    result = grow_pool(SearchConfig(spec, params, (0, 3, 9, 21), (0, 1, 3, 7)))
    assert result.ok and result.pool == (0, 1, 2, 4, 8, 15, 16, 32, 60)
    fam = result.family
    assert (fam.params.t, fam.params.alpha, fam.params.beta, fam.params.M) == \
        (4, 20, 10, 140)
    rng = random.Random(44)
    phi = random_file(rng, spec, fam)
    contents = all_contents(spec, fam, phi)
    assert download([contents[h] for h in (0, 2, 3, 5, 6, 7, 8)],
                    fam).vector == phi.vector
    f = 4
    helpers = [0, 1, 2, 3, 5, 6, 7, 8]
    msgs = [help_message(contents[h], fam, f) for h in helpers]
    assert all(len(m.values) == 10 for m in msgs)
    assert repair(msgs, fam).values == contents[f].values


def test_degenerate_top_rate_over_gf2():
    # (4, 3, 3) with t = k = 3 over GF(2): unit x vectors plus all-ones
    spec = binary_field(1)
    params = derive_params(4, 3, 3, SYMMETRIC)
    xs = [Vector(spec, v) for v in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1])]
    ys = [Vector(spec, [1])] * 4
    fam = StarFamily(spec, params, xs, ys)
    assert verify_axioms(fam).ok
    rng = random.Random(9)
    phi = random_file(rng, spec, fam)
    contents = all_contents(spec, fam, phi)
    for K in combinations(range(4), 3):
        assert download([contents[h] for h in K], fam).vector == phi.vector
    for f in range(4):
        helpers = [h for h in range(4) if h != f]
        msgs = [help_message(contents[h], fam, f) for h in helpers]
        assert repair(msgs, fam).values == contents[f].values


def test_download_singular_names_subset(gf16, rng):
    fam = rs_stars_t2(gf16, 6, 3, SYMMETRIC)
    broken = StarFamily(gf16, fam.params,
                        [fam.x_stars[0], fam.x_stars[0]] + fam.x_stars[2:],
                        [fam.second_stars[0], fam.second_stars[0]]
                        + fam.second_stars[2:])
    phi = encode(gf16, random_values(rng, gf16, 6), fam.params)
    contents = [node_content(phi, broken, h) for h in (0, 1, 2)]
    with pytest.raises(AxiomViolationError) as exc:
        download(contents, broken)
    assert exc.value.subset == (0, 1, 2)


def test_repair_span_deficient_names_pair(gf16, rng):
    fam = rs_stars_t2(gf16, 6, 3, SYMMETRIC)
    broken = StarFamily(gf16, fam.params,
                        [fam.x_stars[0], fam.x_stars[0]] + fam.x_stars[2:],
                        [fam.second_stars[0], fam.second_stars[0]]
                        + fam.second_stars[2:])
    phi = encode(gf16, random_values(rng, gf16, 6), fam.params)
    msgs = [help_message(node_content(phi, broken, h), broken, 5)
            for h in (0, 1, 2, 3)]
    with pytest.raises(AxiomViolationError) as exc:
        repair(msgs, broken)
    assert exc.value.failed_node == 5
    assert exc.value.subset == (0, 1, 2, 3)


def test_star_family_validation(gf16):
    params = derive_params(6, 3, 4, EXTERIOR)
    xs = [Vector(gf16, [1, v]) for v in range(6)]
    ws = [Vector(gf16, [1, v, v]) for v in range(6)]
    StarFamily(gf16, params, xs, ws)
    with pytest.raises(UsageError):
        StarFamily(gf16, params, xs[:5], ws)
    with pytest.raises(UsageError):
        StarFamily(gf16, params, xs, ws[:5] + [Vector(gf16, [0, 0, 0])])
    with pytest.raises(UsageError):
        StarFamily(gf16, params, [Vector(gf16, [1, 2, 3])] * 6, ws)
