"""
Builders for orthogonal product-state sets and their compositions.

The bipartite building block lives on the "boundary" of an ``x`` by ``y``
grid of computational basis states: two rows and two columns, each spread
out by a unitary whose first and last rows have no zero entry. Larger sets
are obtained by placing such blocks on subsets of parties and padding the
remaining parties with fixed basis states, following a :class:`CompositionPlan`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, InputError, NeedsExternalSeed, PlanError, ShapeError
from .numerics import DEFAULT_TOL, is_unitary
from .partition_graph import build_graph
from .states import (
    NORM_TOL,
    OrderedBasis,
    ProductState,
    StateSet,
    basis_vector,
    normalize,
)

UFL_FLOOR = 1e-6
MAX_RESAMPLES = 1000

_QUBIT_NOTE = (
    "every party needs dimension >= 3: orthogonal product sets in C^2 x C^d "
    "are always locally distinguishable"
)


def require_party_dims(dims: Sequence[int], what: str) -> None:
    small = [d for d in dims if d < 3]
    if small:
        raise DomainError(f"{what}: got dims {tuple(dims)}; {_QUBIT_NOTE}")


# -- unitaries ---------------------------------------------------------------


def ufl_check(u: np.ndarray, floor: float = UFL_FLOOR, tol: float = DEFAULT_TOL) -> bool:
    """
    True iff every entry of the first and of the last row has modulus > ``floor``.

    Raises
    ------
    InputError
        If ``u`` is not unitary within ``tol``.
    """
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise InputError("matrix is not unitary")
    return bool(np.all(np.abs(u[0]) > floor) and np.all(np.abs(u[-1]) > floor))


@dataclass(frozen=True, eq=False)
class UflUnitary:
    """A unitary whose first and last rows are free of zeros."""

    matrix: np.ndarray
    name: str = ""
    floor: float = UFL_FLOOR

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ShapeError(f"expected an n x n matrix with n >= 2, got shape {m.shape}")
        if not ufl_check(m, self.floor):
            raise InputError("unitary has a (near-)zero entry in its first or last row")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def hadamard() -> UflUnitary:
    return UflUnitary(np.array([[1, 1], [1, -1]]) / math.sqrt(2), "hadamard")


def fourier(n: int) -> UflUnitary:
    """Discrete Fourier matrix ``w**(j k) / sqrt(n)``; every entry has modulus ``1/sqrt(n)``."""
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return UflUnitary(np.exp(2j * np.pi * j * k / n) / math.sqrt(n), "fourier")


def random_ufl(n: int, rng_seed: int | Sequence[int], floor: float = UFL_FLOOR) -> UflUnitary:
    """
    Haar-random unitary, resampled until its first and last rows are zero-free.

    Uses QR of a complex Gaussian matrix with the phases of ``R``'s diagonal
    folded back into ``Q``. The stream comes from ``numpy.random.default_rng``
    (PCG64) seeded with ``rng_seed``, so equal seeds give identical matrices.
    """
    if n < 2:
        raise DomainError("random unitaries need n >= 2")
    rng = np.random.default_rng(rng_seed)
    for _ in range(MAX_RESAMPLES):
        z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        q = q * (d / np.abs(d))
        if is_unitary(q) and ufl_check(q, floor):
            return UflUnitary(q, "random", floor)
    raise RuntimeError(f"no admissible unitary after {MAX_RESAMPLES} draws")


def resolve_unitary(
    source: str, n: int, seed: int = 0, slot: int = 0, floor: float = UFL_FLOOR
) -> UflUnitary:
    """
    Named unitary source: ``"hadamard"`` (n = 2), ``"fourier"``, ``"random"``
    (uses ``seed``) or ``"random:<seed>"``.

    ``slot`` distinguishes several random unitaries drawn for one build.
    """
    if source == "hadamard":
        if n != 2:
            raise InputError(f"the hadamard source is 2 x 2 only, a {n} x {n} unitary is needed")
        return UflUnitary(hadamard().matrix, "hadamard", floor)
    if source == "fourier":
        return UflUnitary(fourier(n).matrix, "fourier", floor)
    if source == "random" or source.startswith("random:"):
        if source != "random":
            try:
                seed = int(source.split(":", 1)[1])
            except ValueError as exc:
                raise InputError(f"bad random seed in unitary source {source!r}") from exc
        return random_ufl(n, seed if slot == 0 else [seed, slot], floor)
    raise InputError(f"unknown unitary source {source!r}")


def _as_ufl(u) -> UflUnitary:
    return u if isinstance(u, UflUnitary) else UflUnitary(u)


def up_extension(h, basis: OrderedBasis) -> np.ndarray:
    """
    ``[[H, 0], [0, 0]]`` in the ordered basis, returned in computational coordinates.
    """
    h = _as_ufl(h)
    if basis.dim != h.n + 1:
        raise ShapeError(f"basis dim {basis.dim} must equal unitary size + 1 = {h.n + 1}")
    block = np.zeros((basis.dim, basis.dim), dtype=complex)
    block[:-1, :-1] = h.matrix
    p = basis.matrix()
    return p @ block @ p.T


def down_extension(h, basis: OrderedBasis) -> np.ndarray:
    """``[[0, 0], [0, H]]`` in the ordered basis, returned in computational coordinates."""
    h = _as_ufl(h)
    if basis.dim != h.n + 1:
        raise ShapeError(f"basis dim {basis.dim} must equal unitary size + 1 = {h.n + 1}")
    block = np.zeros((basis.dim, basis.dim), dtype=complex)
    block[1:, 1:] = h.matrix
    p = basis.matrix()
    return p @ block @ p.T


# -- bipartite and tripartite sets ---------------------------------------------


def bipartite_boundary_set(
    x: int,
    y: int,
    X=None,
    Y=None,
    basis_a: OrderedBasis | None = None,
    basis_b: OrderedBasis | None = None,
) -> StateSet:
    """
    The ``2(x+y) - 4`` product states on the boundary of the ``x`` by ``y`` grid.

    In order: ``|1>(Y_up|i>)`` for ``i < y``, ``(X_up|j>)|y>`` for ``j < x``,
    ``|x>(Y_down|k>)`` for ``k >= 2`` and ``(X_down|l>)|1>`` for ``l >= 2``,
    with every ket taken in the given ordered bases. ``X`` and ``Y`` default
    to Fourier matrices of size ``x - 1`` and ``y - 1``.
    """
    require_party_dims((x, y), "bipartite boundary set")
    X = fourier(x - 1) if X is None else _as_ufl(X)
    Y = fourier(y - 1) if Y is None else _as_ufl(Y)
    if X.n != x - 1 or Y.n != y - 1:
        raise ShapeError(f"need unitaries of size ({x - 1}, {y - 1}), got ({X.n}, {Y.n})")
    basis_a = OrderedBasis.identity(x) if basis_a is None else basis_a
    basis_b = OrderedBasis.identity(y) if basis_b is None else basis_b
    if basis_a.dim != x or basis_b.dim != y:
        raise ShapeError("ordered bases must match the party dimensions")

    xu, xd = up_extension(X, basis_a), down_extension(X, basis_a)
    yu, yd = up_extension(Y, basis_b), down_extension(Y, basis_b)
    a, b = basis_a.vector, basis_b.vector

    pairs = []
    pairs += [(a(1), yu @ b(i)) for i in range(1, y)]
    pairs += [(xu @ a(j), b(y)) for j in range(1, x)]
    pairs += [(a(x), yd @ b(k)) for k in range(2, y + 1)]
    pairs += [(xd @ a(l), b(1)) for l in range(2, x + 1)]
    states = [ProductState([normalize(u), normalize(v)]) for u, v in pairs]
    return StateSet((x, y), states, f"boundary({x},{y})")


def tripartite_bases(y: int, z: int) -> tuple[OrderedBasis, OrderedBasis]:
    """
    Reordered bases for the second block of the tripartite set: swap
    ``1<->2`` and ``y-1<->y`` on the middle party, ``1<->2`` on the last.
    """
    if y < 4:
        raise DomainError(f"middle party needs dimension >= 4 (got {y}): the swaps 1<->2 and y-1<->y collide")
    return OrderedBasis.from_swaps(y, [(1, 2), (y - 1, y)]), OrderedBasis.from_swaps(z, [(1, 2)])


# -- composition plans -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Block:
    """
    One seed set placed on ``parties`` (seed party ``k`` goes to
    ``parties[k]``), every other party fixed to ``padding[party]``.

    ``external`` marks a seed whose nonlocality is attested by the user rather
    than checked; its value is a free-text reference.
    """

    parties: tuple[int, ...]
    seed: StateSet
    padding: Mapping[int, np.ndarray]
    external: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "parties", tuple(int(p) for p in self.parties))
        pad = {int(k): np.asarray(v, dtype=complex) for k, v in dict(self.padding).items()}
        object.__setattr__(self, "padding", dict(sorted(pad.items())))


@dataclass(frozen=True, eq=False)
class CompositionPlan:
    dims: tuple[int, ...]
    blocks: tuple[Block, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "blocks", tuple(self.blocks))
        validate_plan(self)


def validate_plan(plan: CompositionPlan) -> None:
    """Structural checks: proper party subsets, matching dims, unit padding factors."""
    n = len(plan.dims)
    if n < 2:
        raise InputError("a plan needs at least two parties")
    if not plan.blocks:
        raise InputError("a plan needs at least one block")
    for bi, block in enumerate(plan.blocks):
        ps = block.parties
        if len(set(ps)) != len(ps) or any(not 0 <= p < n for p in ps):
            raise InputError(f"block {bi}: parties {ps} must be distinct indices in 0..{n - 1}")
        if not ps or len(ps) == n:
            raise InputError(f"block {bi}: parties must form a non-empty proper subset")
        want = tuple(plan.dims[p] for p in ps)
        if block.seed.dims != want:
            raise InputError(f"block {bi}: seed dims {block.seed.dims} do not match {want}")
        rest = set(range(n)) - set(ps)
        if set(block.padding) != rest:
            raise InputError(f"block {bi}: padding must cover exactly parties {sorted(rest)}")
        for p, f in block.padding.items():
            if f.shape != (plan.dims[p],):
                raise InputError(f"block {bi}: padding for party {p} has shape {f.shape}")
            if abs(np.linalg.norm(f) - 1.0) > NORM_TOL:
                raise InputError(f"block {bi}: padding for party {p} is not unit norm")


def pad(
    seed: StateSet,
    layout: Sequence[int],
    dims: Sequence[int],
    padding: Mapping[int, np.ndarray],
    label: str = "",
) -> StateSet:
    """
    Embed ``seed`` into a larger system.

    Seed party ``k`` is placed on party ``layout[k]`` of ``dims``; every
    other party gets the same fixed factor ``padding[party]`` in all states.
    """
    dims = tuple(dims)
    layout = tuple(layout)
    if len(layout) != seed.n_parties:
        raise InputError(f"layout has {len(layout)} entries for a {seed.n_parties}-party seed")
    if len(set(layout)) != len(layout) or any(not 0 <= p < len(dims) for p in layout):
        raise InputError(f"layout {layout} is not an injective map into 0..{len(dims) - 1}")
    for k, p in enumerate(layout):
        if dims[p] != seed.dims[k]:
            raise InputError(f"seed party {k} has dim {seed.dims[k]}, target party {p} has {dims[p]}")
    rest = [p for p in range(len(dims)) if p not in layout]
    if sorted(padding) != rest:
        raise InputError(f"padding must cover exactly parties {rest}")
    fixed = {p: np.asarray(padding[p], dtype=complex) for p in rest}
    for p, f in fixed.items():
        if f.shape != (dims[p],):
            raise InputError(f"padding for party {p} has length {f.size}, expected {dims[p]}")

    where = {p: k for k, p in enumerate(layout)}
    out = []
    for s in seed:
        out.append(ProductState([s.factors[where[p]] if p in where else fixed[p] for p in range(len(dims))]))
    return StateSet(dims, out, label or seed.label)


def layout_plan(plan: CompositionPlan) -> StateSet:
    """Union of the padded blocks without any connectivity or orthogonality check."""
    states = []
    for block in plan.blocks:
        states.extend(pad(block.seed, block.parties, plan.dims, block.padding).states)
    return StateSet(plan.dims, states, plan.label, plan)


def compose_general(plan: CompositionPlan, tol: float = DEFAULT_TOL) -> StateSet:
    """
    Union of all padded blocks, in block order.

    Raises
    ------
    PlanError
        If the plan's graph is disconnected (the message lists the
        components) or two states of the union overlap by more than ``tol``.
    """
    from .verifier import check_orthogonality

    comps = build_graph(plan).components()
    if len(comps) > 1:
        shown = " and ".join("{" + ",".join(str(p + 1) for p in c) + "}" for c in comps[:2])
        raise PlanError(f"composition graph is disconnected: components {shown}")
    built = layout_plan(plan)
    audit = check_orthogonality(built, tol)
    if not audit.passed:
        i, j, ov = audit.offending[0]
        bi, bj = _block_of(plan, i), _block_of(plan, j)
        raise PlanError(
            f"union is not orthogonal: states {i} (block {bi}) and {j} (block {bj}) overlap {ov:.3g}"
        )
    return built


def _block_of(plan: CompositionPlan, index: int) -> int:
    start = 0
    for bi, block in enumerate(plan.blocks):
        start += len(block.seed)
        if index < start:
            return bi
    raise IndexError(index)


def _filler(dims: Sequence[int], twos: Sequence[int], skip: Sequence[int]) -> dict[int, np.ndarray]:
    """``|2>`` on ``twos``, ``|1>`` on every other party outside ``skip``."""
    return {p: basis_vector(d, 2 if p in twos else 1) for p, d in enumerate(dims) if p not in skip}


def tripartite_plan(
    x: int,
    y: int,
    z: int,
    X=None,
    Y=None,
    Z=None,
    order: Sequence[int] = (0, 1, 2),
) -> CompositionPlan:
    """
    Two boundary blocks sharing the middle party.

    The first block covers parties (A, B) with C fixed to ``|1>``; the
    second covers (B, C) in the swapped bases of :func:`tripartite_bases`
    with A fixed to ``|2>``. ``order`` places A, B, C on output parties.
    """
    require_party_dims((x, y, z), "tripartite set")
    if sorted(order) != [0, 1, 2]:
        raise InputError(f"order must be a permutation of (0, 1, 2), got {tuple(order)}")
    bb, bc = tripartite_bases(y, z)
    X = fourier(x - 1) if X is None else _as_ufl(X)
    Y = fourier(y - 1) if Y is None else _as_ufl(Y)
    Z = fourier(z - 1) if Z is None else _as_ufl(Z)
    pa, pb, pc = order
    dims = [0, 0, 0]
    dims[pa], dims[pb], dims[pc] = x, y, z
    first = bipartite_boundary_set(x, y, X, Y)
    second = bipartite_boundary_set(y, z, Y, Z, bb, bc)
    blocks = [
        Block((pa, pb), first, {pc: basis_vector(z, 1)}),
        Block((pb, pc), second, {pa: basis_vector(x, 2)}),
    ]
    return CompositionPlan(tuple(dims), blocks, f"tripartite({x},{y},{z})")


def tripartite_set(x: int, y: int, z: int, X=None, Y=None, Z=None) -> StateSet:
    """
    The ``2x + 4y + 2z - 8`` state tripartite set (``y >= 4``).

    The result carries its :func:`tripartite_plan` for block-wise certification.
    """
    return compose_general(tripartite_plan(x, y, z, X, Y, Z))


def star_plan(dims: Sequence[int], seeds: Sequence[StateSet]) -> CompositionPlan:
    """Seed ``i`` on parties ``(0, i+1)``; ``|2>`` on party ``i`` (block 0: last party)."""
    dims = tuple(dims)
    n = len(dims)
    if n < 4:
        raise DomainError(f"star composition needs at least 4 parties, got {n}")
    require_party_dims(dims, "star composition")
    if len(seeds) != n - 1:
        raise InputError(f"star composition needs {n - 1} seeds, got {len(seeds)}")
    blocks = []
    for i, seed in enumerate(seeds):
        parties = (0, i + 1)
        two = n - 1 if i == 0 else i
        blocks.append(Block(parties, seed, _filler(dims, [two], parties)))
    return CompositionPlan(dims, blocks, f"star(L={n})")


def chain_plan(dims: Sequence[int], seeds: Sequence[StateSet]) -> CompositionPlan:
    """Seed ``i`` on parties ``(i, i+1)``; ``|2>`` on party ``i+2`` (last block: party 0)."""
    dims = tuple(dims)
    n = len(dims)
    if n < 5:
        raise DomainError(f"chain composition needs at least 5 parties, got {n}")
    require_party_dims(dims, "chain composition")
    if len(seeds) != n - 1:
        raise InputError(f"chain composition needs {n - 1} seeds, got {len(seeds)}")
    blocks = []
    for i, seed in enumerate(seeds):
        parties = (i, i + 1)
        two = 0 if i == n - 2 else i + 2
        blocks.append(Block(parties, seed, _filler(dims, [two], parties)))
    return CompositionPlan(dims, blocks, f"chain(L={n})")


def tristar_plan(n_blocks: int, seed: StateSet, dims: Sequence[int] | None = None) -> CompositionPlan:
    """
    A tripartite seed repeated ``n_blocks`` times over ``2 n_blocks + 1`` parties.

    Block ``i`` puts the seed on parties ``(0, 2i+1, 2i+2)`` and ``|2>|2>``
    on the pair used by block ``i - 1`` (block 0: the last pair).
    """
    if n_blocks < 3:
        raise DomainError(f"tri-star composition needs at least 3 blocks, got {n_blocks}")
    if seed.n_parties != 3:
        raise InputError(f"tri-star seed must be tripartite, got {seed.n_parties} parties")
    e1, e2, e3 = seed.dims
    expected = (e1,) + (e2, e3) * n_blocks
    dims = expected if dims is None else tuple(dims)
    if dims != expected:
        raise InputError(f"dims {dims} do not match the seed pattern {expected}")
    blocks = []
    for i in range(n_blocks):
        parties = (0, 2 * i + 1, 2 * i + 2)
        prev = n_blocks - 1 if i == 0 else i - 1
        blocks.append(Block(parties, seed, _filler(dims, [2 * prev + 1, 2 * prev + 2], parties)))
    return CompositionPlan(dims, blocks, f"tristar(L={n_blocks})")


def compose_star(dims: Sequence[int], seeds: Sequence[StateSet]) -> StateSet:
    """
    Star-pattern union; cross-block orthogonality comes from the ``|1>``/``|2>``
    fillers alone, whatever the seeds.
    """
    return layout_plan(star_plan(dims, seeds))


def compose_chain(dims: Sequence[int], seeds: Sequence[StateSet]) -> StateSet:
    return layout_plan(chain_plan(dims, seeds))


def compose_tristar(n_blocks: int, seed: StateSet, dims: Sequence[int] | None = None) -> StateSet:
    return layout_plan(tristar_plan(n_blocks, seed, dims))


# -- existence ---------------------------------------------------------------


def synthesize(
    dims: Sequence[int], unitary: str = "fourier", seed: int = 0, floor: float = UFL_FLOOR
) -> tuple[StateSet, CompositionPlan | None]:
    """
    Build a set meant to be genuinely nonlocal for any dims that are all >= 3.

    Two parties give a boundary set (no plan); three parties use the
    tripartite set with the largest dimension on the middle party; four or
    more use a star of boundary sets centred on party 0.

    Raises
    ------
    DomainError
        If a party has dimension below 3.
    NeedsExternalSeed
        For three qutrits, which none of the in-package constructions cover.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise DomainError("need at least two parties")
    require_party_dims(dims, "synthesize")
    source = lambda n, slot: resolve_unitary(unitary, n, seed, slot, floor)

    if len(dims) == 2:
        x, y = dims
        return bipartite_boundary_set(x, y, source(x - 1, 0), source(y - 1, 1)), None

    if len(dims) == 3:
        if max(dims) < 4:
            raise NeedsExternalSeed(
                "NeedsExternalSeed: no in-package construction for 3 x 3 x 3; "
                "supply a known genuinely nonlocal tripartite qutrit set as an external seed"
            )
        pb = dims.index(max(dims))
        pa, pc = [p for p in range(3) if p != pb]
        x, y, z = dims[pa], dims[pb], dims[pc]
        plan = tripartite_plan(x, y, z, source(x - 1, 0), source(y - 1, 1), source(z - 1, 2), (pa, pb, pc))
        return compose_general(plan), plan

    seeds = [
        bipartite_boundary_set(dims[0], d, source(dims[0] - 1, 2 * i), source(d - 1, 2 * i + 1))
        for i, d in enumerate(dims[1:])
    ]
    plan = star_plan(dims, seeds)
    return compose_general(plan), plan
