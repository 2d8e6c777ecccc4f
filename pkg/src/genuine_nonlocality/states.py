"""
Factored multipartite product states and state sets.

States are kept as one unit vector per party and never expanded into a
global vector unless :func:`assemble` is called explicitly. Party indices are
0-based throughout the Python API; files and reports use 1-based labels.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Sequence

import numpy as np

from .errors import InputError, ShapeError
from .numerics import kron_all

if TYPE_CHECKING:
    from .constructors import CompositionPlan

NORM_TOL = 1e-9


def _as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2:
        raise ShapeError(f"need at least two parties, got dims {dims}")
    if any(d < 1 for d in dims):
        raise ShapeError(f"party dimensions must be positive, got {dims}")
    return dims


def basis_vector(dim: int, k: int) -> np.ndarray:
    """Computational basis vector ``|k>`` with the 1-based label ``k``."""
    if not 1 <= k <= dim:
        raise ShapeError(f"basis label {k} outside 1..{dim}")
    v = np.zeros(dim, dtype=complex)
    v[k - 1] = 1.0
    return v


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


@dataclass(frozen=True, eq=False)
class ProductState:
    """One unit-norm complex vector per party."""

    factors: tuple[np.ndarray, ...]

    def __init__(self, factors: Sequence[np.ndarray], *, tol: float = NORM_TOL):
        fs = []
        for k, f in enumerate(factors):
            f = np.array(f, dtype=complex)
            if f.ndim != 1 or f.size == 0:
                raise ShapeError(f"factor {k} must be a non-empty 1-D vector")
            if not np.all(np.isfinite(f)):
                raise InputError(f"factor {k} has non-finite entries")
            norm = np.linalg.norm(f)
            if abs(norm - 1.0) > tol:
                raise InputError(f"factor {k} has norm {norm:.6g}, expected 1")
            f.setflags(write=False)
            fs.append(f)
        object.__setattr__(self, "factors", tuple(fs))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.size for f in self.factors)

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True, eq=False)
class StateSet:
    """
    An ordered list of product states over fixed party dimensions.

    ``plan`` is set by the composition builders so that the set can later be
    certified through its block structure; it does not take part in
    serialization.
    """

    dims: tuple[int, ...]
    states: tuple[ProductState, ...]
    label: str = ""
    plan: CompositionPlan | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", _as_dims(self.dims))
        object.__setattr__(self, "states", tuple(self.states))
        for i, s in enumerate(self.states):
            if s.dims != self.dims:
                raise ShapeError(f"state {i} has factor dims {s.dims}, set dims are {self.dims}")

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i):
        return self.states[i]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def factor_matrix(self, party: int) -> np.ndarray:
        """Stack of party ``party``'s factors, shape ``(len(self), dims[party])``."""
        if not self.states:
            return np.zeros((0, self.dims[party]), dtype=complex)
        return np.stack([s.factors[party] for s in self.states])

    def with_label(self, label: str) -> StateSet:
        return StateSet(self.dims, self.states, label, self.plan)


@dataclass(frozen=True)
class OrderedBasis:
    """
    A reordering of the computational basis.

    ``perm[k]`` is the 0-based computational index of the logical basis
    element ``k``.
    """

    perm: tuple[int, ...]

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ShapeError(f"not a permutation of 0..{len(perm) - 1}: {perm}")
        object.__setattr__(self, "perm", perm)

    @classmethod
    def identity(cls, dim: int) -> OrderedBasis:
        return cls(tuple(range(dim)))

    @classmethod
    def from_swaps(cls, dim: int, swaps: Iterable[tuple[int, int]]) -> OrderedBasis:
        """Build from 1-based transpositions, e.g. ``[(1, 2)]`` for ``|1'>=|2>, |2'>=|1>``."""
        perm = list(range(dim))
        for a, b in swaps:
            perm[a - 1], perm[b - 1] = perm[b - 1], perm[a - 1]
        return cls(tuple(perm))

    @property
    def dim(self) -> int:
        return len(self.perm)

    def inverse(self) -> OrderedBasis:
        return OrderedBasis(tuple(int(i) for i in np.argsort(self.perm)))

    def matrix(self) -> np.ndarray:
        """Permutation matrix ``P`` with ``P e_k = e_perm[k]``."""
        p = np.zeros((self.dim, self.dim))
        p[list(self.perm), list(range(self.dim))] = 1.0
        return p

    def vector(self, k: int) -> np.ndarray:
        """The 1-based logical basis element ``|k'>`` in computational coordinates."""
        return basis_vector(self.dim, self.perm[k - 1] + 1)


def apply_basis(v: np.ndarray, basis: OrderedBasis) -> np.ndarray:
    """Move logical coordinate ``k`` of ``v`` to computational index ``basis.perm[k]``."""
    v = np.asarray(v)
    if v.shape[0] != basis.dim:
        raise ShapeError(f"vector length {v.shape[0]} does not match basis dim {basis.dim}")
    out = np.empty_like(v)
    out[list(basis.perm)] = v
    return out


def inner_product(a: ProductState, b: ProductState) -> complex:
    """``<a|b>`` computed factor by factor (conjugate-linear in ``a``)."""
    if a.dims != b.dims:
        raise ShapeError(f"dimension mismatch: {a.dims} vs {b.dims}")
    out = 1.0 + 0j
    for fa, fb in zip(a.factors, b.factors):
        out *= np.vdot(fa, fb)
    return complex(out)


def assemble(s: ProductState) -> np.ndarray:
    """Global state vector, parties in order (party 0 most significant)."""
    return kron_all(s.factors)


def gram(states: StateSet, parties: Iterable[int] | None = None) -> np.ndarray:
    """
    Gram matrix ``G[i, j] = <s_i|s_j>`` restricted to ``parties``.

    Built as an elementwise product of per-party Gram matrices, so a single
    orthogonal factor gives an exact zero. An empty ``parties`` gives all ones.
    """
    parties = range(states.n_parties) if parties is None else parties
    n = len(states)
    g = np.ones((n, n), dtype=complex)
    for p in parties:
        f = states.factor_matrix(p)
        g *= np.conj(f) @ f.T
    return g


def permute_parties(states: StateSet, order: Sequence[int]) -> StateSet:
    """New set whose party ``k`` is party ``order[k]`` of ``states``."""
    order = list(order)
    if sorted(order) != list(range(states.n_parties)):
        raise ShapeError(f"not a party permutation: {order}")
    dims = tuple(states.dims[p] for p in order)
    new = [ProductState([s.factors[p] for p in order]) for s in states]
    return StateSet(dims, new, states.label)


def local_unitary(states: StateSet, party: int, u: np.ndarray) -> StateSet:
    """Apply the unitary ``u`` to party ``party`` of every state."""
    new = []
    for s in states:
        fs = list(s.factors)
        fs[party] = u @ fs[party]
        new.append(ProductState(fs))
    return StateSet(states.dims, new, states.label)


# -- serialization -----------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _dump(obj: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, dict):
        inner = ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            raise InputError("cannot serialize non-finite number")
        return _fmt(obj)
    return json.dumps(obj, ensure_ascii=False)


def dumps_json(obj: Any) -> str:
    return _dump(obj) + "\n"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary sibling file and rename it over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def vector_to_json(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex)]


def vector_from_json(data: Any, where: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: amplitudes must be [re, im] number pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError(f"{where}: amplitudes must be [re, im] number pairs")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: non-finite amplitude")
    return arr[:, 0] + 1j * arr[:, 1]


def state_set_to_dict(states: StateSet) -> dict:
    return {
        "dims": list(states.dims),
        "label": states.label,
        "states": [{"factors": [vector_to_json(f) for f in s.factors]} for s in states],
    }


def state_set_from_dict(data: Any) -> StateSet:
    """Parse and validate the state-set schema; errors name the offending state."""
    if not isinstance(data, dict):
        raise InputError("state-set document must be a JSON object")
    for key in ("dims", "states"):
        if key not in data:
            raise InputError(f"state-set document is missing {key!r}")
    dims = data["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise InputError("'dims' must be a list of integers")
    try:
        dims = _as_dims(dims)
    except ShapeError as exc:
        raise InputError(str(exc)) from exc
    label = data.get("label", "")
    if not isinstance(label, str):
        raise InputError("'label' must be a string")
    raw_states = data["states"]
    if not isinstance(raw_states, list):
        raise InputError("'states' must be a list")
    states = []
    for i, entry in enumerate(raw_states):
        if not isinstance(entry, dict) or not isinstance(entry.get("factors"), list):
            raise InputError(f"state {i}: expected an object with a 'factors' list")
        factors = entry["factors"]
        if len(factors) != len(dims):
            raise InputError(f"state {i}: has {len(factors)} factors, dims list {len(dims)} parties")
        vecs = []
        for k, raw in enumerate(factors):
            v = vector_from_json(raw, f"state {i}, factor {k}")
            if v.size != dims[k]:
                raise InputError(f"state {i}, factor {k}: length {v.size}, expected {dims[k]}")
            norm = np.linalg.norm(v)
            if abs(norm - 1.0) > NORM_TOL:
                raise InputError(f"state {i}, factor {k}: norm {norm:.6g} is not 1")
            vecs.append(v)
        states.append(ProductState(vecs))
    return StateSet(dims, states, label)


def write_state_set(states: StateSet, path: str | os.PathLike) -> None:
    atomic_write_text(path, dumps_json(state_set_to_dict(states)))


def read_state_set(path: str | os.PathLike) -> StateSet:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return state_set_from_dict(data)
