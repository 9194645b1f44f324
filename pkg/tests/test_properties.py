"""Randomized structural properties over generated inputs."""

import numpy as np
from hypothesis import given, settings, strategies as st

import quiverlim as ql

COMMON = dict(deadline=None, max_examples=25, derandomize=True)


@st.composite
def small_quivers(draw):
    n = draw(st.integers(min_value=1, max_value=3))
    num_edges = draw(st.integers(min_value=0, max_value=3))
    edges = []
    for _ in range(num_edges):
        a = draw(st.integers(min_value=0, max_value=n - 1))
        b = draw(st.integers(min_value=0, max_value=n - 1))
        if a != b:
            edges.append((a, b))
    v = tuple(draw(st.integers(min_value=1, max_value=3)) for _ in range(n))
    w = tuple(draw(st.integers(min_value=0, max_value=3)) for _ in range(n))
    quiver = ql.Quiver(n, tuple(edges))
    dims = ql.DimensionVectors(v=v, w=w)
    sigma = tuple(draw(st.integers(min_value=-3, max_value=3)) for _ in range(n))
    c = tuple(0.0 for _ in range(n))
    return quiver, dims, ql.CentralParameter(sigma=sigma, c=c)


@settings(**COMMON)
@given(small_quivers())
def test_quiver_dict_round_trip(case):
    quiver, dims, central = case
    q2, d2, z2 = ql.quiver_from_dict(ql.quiver_to_dict(quiver, dims, central))
    assert q2.n == quiver.n and q2.edges == quiver.edges
    assert d2 == dims
    assert np.array_equal(z2.sigma_array(), central.sigma_array())


@settings(**COMMON)
@given(small_quivers(), st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_moment_identities_hold_for_any_rep(case, seed):
    quiver, dims, central = case
    p = ql.random_rep(quiver, dims, ql.make_rng(seed))
    mr = ql.moment_real(p)
    scale = max(1.0, mr.norm())
    for blk in mr.blocks:
        assert np.linalg.norm(blk + blk.conj().T) < 1e-12 * scale
    # flatten round trip never loses a coordinate
    back = ql.RepPoint.from_flat(quiver, dims, p.flatten())
    assert (back - p).norm() == 0.0


@settings(**COMMON)
@given(small_quivers(), st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                          allow_infinity=False))
def test_twistor_identities_hold_for_any_rep(case, seed, xi):
    quiver, dims, central = case
    p = ql.random_rep(quiver, dims, ql.make_rng(seed))
    mr, mc = ql.moment_real(p), ql.moment_complex(p)
    q = ql.twistor_rotate(p, xi)
    pred_c = mc + (-2j * xi) * mr + (-xi ** 2) * mc.dagger()
    scale = max(1.0, pred_c.norm())
    assert (ql.moment_complex(q) - pred_c).norm() < 1e-11 * scale
