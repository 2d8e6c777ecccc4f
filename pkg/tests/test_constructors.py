import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genuine_nonlocality.constructors import (
    Block,
    CompositionPlan,
    UflUnitary,
    bipartite_boundary_set,
    compose_chain,
    compose_general,
    compose_star,
    compose_tristar,
    down_extension,
    fourier,
    hadamard,
    pad,
    random_ufl,
    resolve_unitary,
    synthesize,
    tripartite_plan,
    tripartite_set,
    ufl_check,
    up_extension,
)
from genuine_nonlocality.errors import DomainError, InputError, NeedsExternalSeed, PlanError, ShapeError
from genuine_nonlocality.states import (
    OrderedBasis,
    ProductState,
    StateSet,
    assemble,
    basis_vector,
    gram,
    inner_product,
)

from oracles import random_unit

H2 = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
S2 = 1 / np.sqrt(2)


def support(state):
    """Computational index tuples (1-based) carrying a nonzero amplitude."""
    nz = [[k + 1 for k in np.flatnonzero(f)] for f in state.factors]
    return set(itertools.product(*nz))


# -- unitaries -------------------------------------------------------------


def test_ufl_check_examples():
    assert ufl_check(H2)
    assert not ufl_check(np.eye(2))
    assert ufl_check(fourier(3).matrix)
    assert np.allclose(np.abs(fourier(3).matrix), 1 / np.sqrt(3))


def test_ufl_check_uses_first_and_last_rows():
    # zeros in the first and last rows
    u = np.array([[S2, S2, 0], [0, 0, 1], [S2, -S2, 0]])
    assert not ufl_check(u)
    # zero at (2, 1): first column has a zero, first and last rows do not
    cols = [np.array([1, 0, -1]) / np.sqrt(2), np.array([1, 1, 1]) / np.sqrt(3), np.array([1, -2, 1]) / np.sqrt(6)]
    v = np.stack(cols, axis=1)
    assert np.allclose(v.T @ v, np.eye(3))
    assert v[1, 0] == 0
    assert ufl_check(v)


def test_ufl_check_rejects_non_unitary():
    with pytest.raises(InputError):
        ufl_check(np.diag([1.0, 2.0]))


def test_ufl_unitary_rejects_zero_edge_row():
    with pytest.raises(InputError):
        UflUnitary(np.eye(3))


def test_random_ufl_deterministic_and_valid():
    a, b = random_ufl(4, 11), random_ufl(4, 11)
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, random_ufl(4, 12).matrix)
    for seed in range(20):
        u = random_ufl(2, seed).matrix
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-9
        assert np.all(np.abs(u) > 1e-6)


def test_resolve_unitary_sources():
    assert np.array_equal(resolve_unitary("hadamard", 2).matrix, hadamard().matrix)
    assert np.array_equal(resolve_unitary("random:5", 3).matrix, random_ufl(3, 5).matrix)
    assert np.array_equal(resolve_unitary("random", 3, seed=5).matrix, random_ufl(3, 5).matrix)
    with pytest.raises(InputError):
        resolve_unitary("hadamard", 3)
    with pytest.raises(InputError):
        resolve_unitary("qft", 3)


# -- extensions ------------------------------------------------------------


def test_extension_literals():
    ident = OrderedBasis.identity(3)
    up = up_extension(H2, ident)
    down = down_extension(H2, ident)
    assert np.allclose(up, [[S2, S2, 0], [S2, -S2, 0], [0, 0, 0]], atol=1e-15)
    assert np.allclose(down, [[0, 0, 0], [0, S2, S2], [0, S2, -S2]], atol=1e-15)
    assert np.linalg.matrix_rank(up) == 2 and np.linalg.matrix_rank(down) == 2
    assert np.array_equal(up @ basis_vector(3, 3), np.zeros(3))
    assert np.array_equal(down @ basis_vector(3, 1), np.zeros(3))


def test_extension_dimension_mismatch():
    with pytest.raises(ShapeError):
        up_extension(H2, OrderedBasis.identity(4))


def test_extension_in_reordered_basis():
    basis = OrderedBasis.from_swaps(3, [(1, 2)])
    up = up_extension(H2, basis)
    # logical |1'> = |2>, |2'> = |1>: H acts on span{|2>,|1>}, |3> is annihilated
    assert np.allclose(up @ basis.vector(1), basis.vector(1) * S2 + basis.vector(2) * S2)
    assert np.array_equal(up @ basis_vector(3, 3), np.zeros(3))


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_extension_partial_isometries(n):
    h = random_ufl(n - 1, n)
    basis = OrderedBasis.identity(n)
    up, down = up_extension(h, basis), down_extension(h, basis)
    for e in (up, down):
        proj = e.conj().T @ e
        assert np.allclose(proj @ proj, proj)
        assert np.linalg.matrix_rank(e) == n - 1
    assert np.linalg.matrix_rank(up @ down.conj().T, tol=1e-9) <= n - 2


# -- bipartite boundary sets -------------------------------------------------


def test_boundary_set_hadamard_literals():
    s = bipartite_boundary_set(3, 3, H2, H2)
    assert len(s) == 8
    assert np.array_equal(s[0].factors[0], [1, 0, 0])
    assert np.allclose(s[0].factors[1], [S2, S2, 0], atol=1e-15)
    assert np.array_equal(s[4].factors[0], [0, 0, 1])
    assert np.allclose(s[4].factors[1], [0, S2, S2], atol=1e-15)


@pytest.mark.parametrize("x,y", [(x, y) for x in range(3, 10) for y in range(3, 10)])
def test_boundary_set_size_and_orthogonality(x, y):
    s = bipartite_boundary_set(x, y)
    assert len(s) == 2 * (x + y) - 4
    g = np.abs(gram(s))
    np.fill_diagonal(g, 0)
    assert g.max() <= 1e-12
    for st_ in s:
        for f in st_.factors:
            assert abs(np.linalg.norm(f) - 1) <= 1e-15


def test_boundary_set_rejects_qubit():
    with pytest.raises(DomainError, match="C\\^2"):
        bipartite_boundary_set(2, 5)


@pytest.mark.parametrize("x,y", [(3, 3), (3, 4), (4, 6), (5, 9)])
def test_boundary_span(x, y):
    s = bipartite_boundary_set(x, y, random_ufl(x - 1, 1), random_ufl(y - 1, 2))
    vecs = np.array([assemble(p) for p in s]).T
    assert np.linalg.matrix_rank(vecs) == 2 * (x + y) - 4
    for i, j in itertools.product(range(1, x + 1), range(1, y + 1)):
        if i in (1, x) or j in (1, y):
            target = np.kron(basis_vector(x, i), basis_vector(y, j))
            coef, *_ = np.linalg.lstsq(vecs, target, rcond=None)
            assert np.linalg.norm(vecs @ coef - target) <= 1e-9


# -- tripartite ----------------------------------------------------------------


@pytest.mark.parametrize("x,y,z", [(3, 4, 3), (4, 4, 4), (3, 5, 6), (5, 6, 4)])
def test_tripartite_count_and_supports(x, y, z):
    s = tripartite_set(x, y, z)
    n_psi = 2 * (x + y) - 4
    assert len(s) == 2 * x + 4 * y + 2 * z - 8
    psi_support = set().union(*(support(p) for p in s.states[:n_psi]))
    phi_support = set().union(*(support(p) for p in s.states[n_psi:]))
    expected_psi = {(i, j, 1) for i in range(1, x + 1) for j in range(1, y + 1) if i in (1, x) or j in (1, y)}
    expected_phi = {(2, j, k) for j in range(1, y + 1) for k in range(1, z + 1) if j in (2, y - 1) or k in (2, z)}
    assert psi_support == expected_psi
    assert phi_support == expected_phi
    assert not psi_support & phi_support


def test_tripartite_known_counts():
    assert len(tripartite_set(3, 4, 3)) == 20
    assert len(tripartite_set(4, 4, 4)) == 24


def test_tripartite_rejects_small_middle():
    with pytest.raises(DomainError):
        tripartite_set(3, 3, 3)
    with pytest.raises(DomainError):
        tripartite_set(2, 4, 3)


def test_tripartite_carries_plan():
    s = tripartite_set(3, 4, 3)
    assert s.plan is not None
    assert [b.parties for b in s.plan.blocks] == [(0, 1), (1, 2)]


# -- padding -------------------------------------------------------------------


def test_pad_examples():
    seed = bipartite_boundary_set(3, 3, H2, H2)
    out = pad(seed, (0, 1), (3, 3, 3), {2: basis_vector(3, 1)})
    assert len(out) == 8
    assert all(np.array_equal(p.factors[2], [1, 0, 0]) for p in out)
    assert np.array_equal(gram(out), gram(seed))
    out4 = pad(seed, (0, 1), (3, 3, 4), {2: basis_vector(4, 2)})
    assert np.array_equal(out4[0].factors[2], [0, 1, 0, 0])


def test_pad_places_by_layout():
    seed = bipartite_boundary_set(3, 4)
    out = pad(seed, (2, 0), (4, 5, 3), {1: basis_vector(5, 5)})
    assert out.dims == (4, 5, 3)
    assert np.array_equal(out[3].factors[2], seed[3].factors[0])
    assert np.array_equal(out[3].factors[0], seed[3].factors[1])


def test_pad_errors():
    seed = bipartite_boundary_set(3, 3)
    with pytest.raises(InputError):
        pad(seed, (0, 0), (3, 3, 3), {2: basis_vector(3, 1)})
    with pytest.raises(InputError):
        pad(seed, (0, 1), (3, 4, 3), {2: basis_vector(3, 1)})
    with pytest.raises(InputError):
        pad(seed, (0, 1), (3, 3, 3), {})


@settings(max_examples=25)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_pad_preserves_gram(n, seed_):
    rng = np.random.default_rng(seed_)
    seed = StateSet((3, 4), [ProductState([random_unit(3, rng), random_unit(4, rng)]) for _ in range(n)])
    out = pad(seed, (1, 2), (5, 3, 4, 2), {0: random_unit(5, rng), 3: random_unit(2, rng)})
    assert np.max(np.abs(gram(out) - gram(seed))) <= 1e-15


# -- compositions --------------------------------------------------------------


def _cross_block_max(states, sizes):
    g = np.abs(gram(states))
    starts = np.cumsum([0] + sizes)
    worst = 0.0
    for a in range(len(sizes)):
        for b in range(a + 1, len(sizes)):
            worst = max(worst, g[starts[a] : starts[a + 1], starts[b] : starts[b + 1]].max())
    return worst


def _random_seed_set(rng, dims, n):
    return StateSet(dims, [ProductState([random_unit(d, rng) for d in dims]) for _ in range(n)])


def test_star_examples():
    seeds = [bipartite_boundary_set(3, 3, H2, H2)] * 3
    s = compose_star((3, 3, 3, 3), seeds)
    assert len(s) == 24 and s.dims == (3, 3, 3, 3)
    # block 0 vs block 1 vanish on the last party, block 1 vs block 2 on party 1
    assert inner_product(s[0], s[8]) == 0
    assert np.vdot(s[0].factors[3], s[8].factors[3]) == 0
    assert np.vdot(s[8].factors[1], s[16].factors[1]) == 0
    assert _cross_block_max(s, [8, 8, 8]) == 0


def test_star_rejects_bad_inputs():
    seeds = [bipartite_boundary_set(3, 3)] * 2
    with pytest.raises(DomainError):
        compose_star((3, 3, 3), seeds)
    with pytest.raises(DomainError):
        compose_star((3, 2, 3, 3), [bipartite_boundary_set(3, 3)] * 3)


def test_chain_examples():
    seeds = [bipartite_boundary_set(3, 3, H2, H2)] * 4
    s = compose_chain((3,) * 5, seeds)
    assert len(s) == 32
    # first vs second block vanish on the fourth party: |1> against the |2> filler
    for i in range(8):
        for j in range(8, 16):
            assert np.vdot(s[i].factors[3], s[j].factors[3]) == 0
    assert _cross_block_max(s, [8] * 4) == 0
    with pytest.raises(DomainError):
        compose_chain((3,) * 4, seeds[:3])


def test_tristar_examples():
    seed = tripartite_set(3, 4, 3)
    s = compose_tristar(3, seed)
    assert len(s) == 60 and s.dims == (3, 4, 3, 4, 3, 4, 3)
    # block 0 vs last block vanish on party 2L-2 (0-based 3)
    assert np.vdot(s[0].factors[3], s[40].factors[3]) == 0
    assert _cross_block_max(s, [20, 20, 20]) == 0
    with pytest.raises(InputError):
        compose_tristar(3, seed, (3,) * 7)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 7), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_star_cross_blocks_orthogonal_for_any_seeds(n, per_block, seed_):
    rng = np.random.default_rng(seed_)
    dims = tuple(int(d) for d in rng.integers(3, 6, size=n))
    seeds = [_random_seed_set(rng, (dims[0], d), per_block) for d in dims[1:]]
    assert _cross_block_max(compose_star(dims, seeds), [per_block] * (n - 1)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(5, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_chain_cross_blocks_orthogonal_for_any_seeds(n, per_block, seed_):
    rng = np.random.default_rng(seed_)
    dims = tuple(int(d) for d in rng.integers(3, 6, size=n))
    seeds = [_random_seed_set(rng, (a, b), per_block) for a, b in zip(dims, dims[1:])]
    assert _cross_block_max(compose_chain(dims, seeds), [per_block] * (n - 1)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 5), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_tristar_cross_blocks_orthogonal_for_any_seeds(n_blocks, per_block, seed_):
    rng = np.random.default_rng(seed_)
    e = tuple(int(d) for d in rng.integers(3, 5, size=3))
    seed = _random_seed_set(rng, e, per_block)
    assert _cross_block_max(compose_tristar(n_blocks, seed), [per_block] * n_blocks) == 0


def test_general_reproduces_star():
    seeds = [bipartite_boundary_set(3, d) for d in (3, 4, 5)]
    dims = (3, 3, 4, 5)
    plan = CompositionPlan(
        dims,
        [
            Block((0, 1), seeds[0], {2: basis_vector(4, 1), 3: basis_vector(5, 2)}),
            Block((0, 2), seeds[1], {1: basis_vector(3, 2), 3: basis_vector(5, 1)}),
            Block((0, 3), seeds[2], {1: basis_vector(3, 1), 2: basis_vector(4, 2)}),
        ],
    )
    a, b = compose_general(plan), compose_star(dims, seeds)
    assert len(a) == len(b)
    for p, q in zip(a, b):
        assert all(np.array_equal(f, g) for f, g in zip(p.factors, q.factors))


def test_general_rejects_disconnected_plan():
    seed = bipartite_boundary_set(3, 3)
    e1 = basis_vector(3, 1)
    plan = CompositionPlan(
        (3, 3, 3, 3), [Block((0, 1), seed, {2: e1, 3: e1}), Block((2, 3), seed, {0: e1, 1: e1})]
    )
    with pytest.raises(PlanError, match=r"\{1,2\} and \{3,4\}"):
        compose_general(plan)


def test_general_rejects_colliding_union():
    seed = bipartite_boundary_set(3, 3)
    e1 = basis_vector(3, 1)
    plan = CompositionPlan((3, 3, 3), [Block((0, 1), seed, {2: e1}), Block((1, 2), seed, {0: e1})])
    # state 0 of block 0 is |1>(Y_up|1>)|1>, state 0 of block 1 is |1>|1>(Y_up|1>): overlap 1/2
    assert abs(inner_product(pad(seed, (0, 1), (3, 3, 3), {2: e1})[0], pad(seed, (1, 2), (3, 3, 3), {0: e1})[0])) > 0.1
    with pytest.raises(PlanError, match=r"block 0\).*block 1\)"):
        compose_general(plan)


def test_plan_validation():
    seed = bipartite_boundary_set(3, 3)
    e1 = basis_vector(3, 1)
    with pytest.raises(InputError):
        CompositionPlan((3, 3), [Block((0, 1), seed, {})])
    with pytest.raises(InputError):
        CompositionPlan((3, 3, 4), [Block((0, 2), seed, {1: e1})])
    with pytest.raises(InputError):
        CompositionPlan((3, 3, 3), [Block((0, 1), seed, {2: 2 * e1})])


# -- synthesis -----------------------------------------------------------------


def test_synthesize_tripartite_places_largest_in_middle():
    s, plan = synthesize((4, 3, 5))
    assert s.dims == (4, 3, 5)
    assert len(s) == 2 * 4 + 4 * 5 + 2 * 3 - 8 == 26
    assert [b.parties for b in plan.blocks] == [(0, 2), (2, 1)]


def test_synthesize_cases():
    s, plan = synthesize((3, 3, 3, 3))
    assert len(s) == 24 and len(plan.blocks) == 3
    s, plan = synthesize((3, 4))
    assert len(s) == 10 and plan is None
    with pytest.raises(NeedsExternalSeed):
        synthesize((3, 3, 3))
    with pytest.raises(DomainError):
        synthesize((2, 5))


def test_synthesize_random_is_deterministic():
    a, _ = synthesize((3, 4, 3, 5), "random", 9)
    b, _ = synthesize((3, 4, 3, 5), "random", 9)
    for p, q in zip(a, b):
        assert all(np.array_equal(f, g) for f, g in zip(p.factors, q.factors))


def test_tripartite_plan_order():
    plan = tripartite_plan(3, 4, 5, order=(2, 0, 1))
    assert plan.dims == (4, 5, 3)
