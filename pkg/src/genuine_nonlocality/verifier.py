"""
Nonlocality certificates for orthogonal product-state sets.

The core test: if a party group starts a measurement, every outcome
operator ``M`` (Hermitian, positive) must keep all post-measurement states
pairwise orthogonal. For product states split as ``u_i (x) v_i`` across the
group and its complement this reads

    (u_i^dagger M u_j) <v_i|v_j> = 0    for all i != j,

which is linear in the real coordinates of ``M``. When the only solutions
are multiples of the identity on both sides of every bipartition, no party
group can begin a useful measurement and the set is certified nonlocal.
A larger solution space proves nothing either way and is reported as
inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .constructors import CompositionPlan, layout_plan
from .errors import BudgetError, InputError, PlanError
from .numerics import DEFAULT_TOL, herm_coefficients, herm_to_vec, kron_all, null_space, vec_to_herm
from .partition_graph import Bipartition, bipartitions, build_graph, is_connected
from .states import StateSet, gram

DEFAULT_SIDE_CAP = 100

QUBIT_NOTE = (
    "a party of dimension 2 is present; orthogonal product sets in C^2 x C^d "
    "are always locally distinguishable, so this set cannot be certified"
)


class Verdict(str, Enum):
    CERTIFIED = "Certified"
    REFUTED = "Refuted"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class OrthogonalityAudit:
    max_overlap: float
    offending: list[tuple[int, int, float]]
    tol: float

    @property
    def passed(self) -> bool:
        return not self.offending

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_overlap": self.max_overlap,
            "tol": self.tol,
            "offending_pairs": [[i, j, ov] for i, j, ov in self.offending],
        }


def check_orthogonality(states: StateSet, tol: float = DEFAULT_TOL) -> OrthogonalityAudit:
    """All pairs ``i < j`` with ``|<s_i|s_j>| > tol``, largest overlap first."""
    g = np.abs(gram(states))
    iu, ju = np.triu_indices(len(states), 1)
    ov = g[iu, ju]
    bad = np.nonzero(ov > tol)[0]
    bad = bad[np.argsort(-ov[bad], kind="stable")]
    offending = [(int(iu[k]), int(ju[k]), float(ov[k])) for k in bad]
    return OrthogonalityAudit(float(ov.max(initial=0.0)), offending, tol)


@dataclass
class OpmReport:
    """Solution space of the orthogonality-preserving constraints for one party group."""

    side: tuple[int, ...]
    side_dim: int
    constraint_count: int
    solution_dim: int
    witness: np.ndarray | None = field(default=None, repr=False)

    @property
    def trivial(self) -> bool:
        return self.solution_dim == 1

    def to_dict(self) -> dict:
        out = {
            "side": [p + 1 for p in self.side],
            "side_dim": self.side_dim,
            "constraint_count": self.constraint_count,
            "solution_dim": self.solution_dim,
            "trivial": self.trivial,
        }
        if self.witness is not None:
            out["witness"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.witness]
        return out


def _side_vectors(states: StateSet, side: Iterable[int]) -> np.ndarray:
    side = list(side)
    return np.stack([kron_all([s.factors[p] for p in side]) for s in states])


def _witness(basis: np.ndarray, d: int) -> np.ndarray | None:
    """A solution not proportional to the identity, scaled to max entry 1."""
    if basis.shape[0] < 2:
        return None
    ident = herm_to_vec(np.eye(d))
    ident = ident / np.linalg.norm(ident)
    rest = basis - np.outer(basis @ ident, ident)
    v = rest[int(np.argmax(np.linalg.norm(rest, axis=1)))]
    m = vec_to_herm(v, d)
    m = m - np.trace(m).real / d * np.eye(d)
    m = m / np.max(np.abs(m))
    m[np.abs(m) < 1e-12] = 0
    return m


def constraint_system(
    states: StateSet, side: Iterable[int], tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, int]:
    """
    Real coefficient matrix of the constraints on ``herm_to_vec(M)``.

    Only pairs whose complement factors overlap by more than ``tol`` are
    kept; for the others the constraint vanishes identically. Returns the
    matrix and the number of active pairs.
    """
    side = tuple(sorted(side))
    rest = [p for p in range(states.n_parties) if p not in side]
    d = int(np.prod([states.dims[p] for p in side]))
    overlap = np.abs(gram(states, rest))
    iu, ju = np.triu_indices(len(states), 1)
    active = overlap[iu, ju] > tol
    iu, ju = iu[active], ju[active]
    if iu.size == 0:
        return np.zeros((0, d * d)), 0
    u = _side_vectors(states, side)
    c = herm_coefficients(u[iu], u[ju])
    return np.vstack([c.real, c.imag]), int(iu.size)


def opm_space(
    states: StateSet,
    side: Iterable[int],
    tol: float = DEFAULT_TOL,
    side_cap: int = DEFAULT_SIDE_CAP,
) -> OpmReport:
    """
    Dimension of the space of Hermitian ``M`` on ``side`` that preserve orthogonality.

    Parameters
    ----------
    states : StateSet
    side : iterable of int
        Non-empty proper subset of the parties (0-based).
    tol : float
        Complement overlaps at or below ``tol`` count as exact zeros; the same
        value is the relative rank tolerance of the null-space solve.
    side_cap : int
        Largest admissible product of the side's dimensions.

    Raises
    ------
    BudgetError
        If the side dimension exceeds ``side_cap``.
    """
    side = tuple(sorted(set(side)))
    if not side or len(side) >= states.n_parties or any(not 0 <= p < states.n_parties for p in side):
        raise InputError(f"side {side} is not a non-empty proper subset of the parties")
    d = int(np.prod([states.dims[p] for p in side]))
    if d > side_cap:
        raise BudgetError(f"side {[p + 1 for p in side]} has dimension {d} > cap {side_cap}")
    a, pairs = constraint_system(states, side, tol)
    basis = null_space(a, tol)
    return OpmReport(side, d, pairs, basis.shape[0], _witness(basis, d))


@dataclass
class BipartitionResult:
    bipartition: Bipartition
    left: OpmReport | None
    right: OpmReport | None
    note: str = ""

    @property
    def trivial(self) -> bool:
        return all(r is not None and r.trivial for r in (self.left, self.right))

    def to_dict(self) -> dict:
        return {
            "bipartition": self.bipartition.label(),
            "left": self.left.to_dict() if self.left else None,
            "right": self.right.to_dict() if self.right else None,
            "trivial": self.trivial,
            "note": self.note,
        }


@dataclass
class CoverEntry:
    """The block whose parties straddle a bipartition of the composed system."""

    bipartition: Bipartition
    block: int

    def to_dict(self) -> dict:
        return {"bipartition": self.bipartition.label(), "block": self.block}


@dataclass
class Certificate:
    """
    Evidence tree. ``kind`` is ``"direct"`` (per-bipartition sweep),
    ``"composition"`` (connectivity, union audit and one child per block) or
    ``"external"`` (user-attested, trust assumed).
    """

    kind: str
    verdict: Verdict
    reason: str
    dims: tuple[int, ...]
    n_states: int
    label: str = ""
    audit: OrthogonalityAudit | None = None
    sweep: list[BipartitionResult] = field(default_factory=list)
    connected: bool | None = None
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    cover: list[CoverEntry] = field(default_factory=list)
    children: list[Certificate] = field(default_factory=list)
    external_ref: str | None = None

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def leaves(self) -> list[Certificate]:
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def to_dict(self) -> dict:
        out: dict = {
            "kind": self.kind,
            "verdict": self.verdict.value,
            "reason": self.reason,
            "label": self.label,
            "dims": list(self.dims),
            "n_states": self.n_states,
        }
        if self.audit is not None:
            out["orthogonality"] = self.audit.to_dict()
        if self.kind == "direct":
            out["bipartitions"] = [r.to_dict() for r in self.sweep]
        if self.kind == "composition":
            out["connected"] = self.connected
            out["blocks"] = [[p + 1 for p in ps] for ps in self.blocks]
            out["cover"] = [c.to_dict() for c in self.cover]
            out["children"] = [c.to_dict() for c in self.children]
        if self.kind == "external":
            out["external_ref"] = self.external_ref
            out["trust_assumed"] = True
        return out


def direct_sweep(
    states: StateSet,
    tol: float = DEFAULT_TOL,
    side_cap: int = DEFAULT_SIDE_CAP,
) -> Certificate:
    """
    Run :func:`opm_space` on both sides of every canonical bipartition.

    Certified iff the set is orthogonal and every side admits only the
    identity. Never returns Refuted: a non-trivial solution space does not
    imply the set can be distinguished locally.
    """
    audit = check_orthogonality(states, tol)
    sweep = []
    for bp in bipartitions(states.n_parties):
        reports, notes = [], []
        for side in (bp.left, bp.right):
            try:
                reports.append(opm_space(states, side, tol, side_cap))
            except BudgetError as exc:
                reports.append(None)
                notes.append(str(exc))
        sweep.append(BipartitionResult(bp, reports[0], reports[1], "; ".join(notes)))

    reason = "every side of every bipartition admits only trivial measurements"
    verdict = Verdict.CERTIFIED
    failing = next((r for r in sweep if not r.trivial), None)
    if not audit.passed:
        i, j, ov = audit.offending[0]
        verdict, reason = Verdict.INCONCLUSIVE, f"set is not orthogonal: states {i} and {j} overlap {ov:.3g}"
    elif failing is not None:
        verdict = Verdict.INCONCLUSIVE
        if failing.note:
            reason = f"bipartition {failing.bipartition.label()}: {failing.note}"
        else:
            reason = f"bipartition {failing.bipartition.label()} admits a non-trivial orthogonality-preserving measurement"
    if any(d < 3 for d in states.dims):
        verdict = Verdict.INCONCLUSIVE
        reason = f"{QUBIT_NOTE} ({reason})"
    return Certificate("direct", verdict, reason, states.dims, len(states), states.label, audit, sweep)


def external_certificate(states: StateSet, reference: str) -> Certificate:
    return Certificate(
        "external",
        Verdict.CERTIFIED,
        "nonlocality attested by the user; not checked",
        states.dims,
        len(states),
        states.label,
        external_ref=reference,
    )


def _same_states(a: StateSet, b: StateSet, tol: float = 1e-12) -> bool:
    if a.dims != b.dims or len(a) != len(b):
        return False
    return all(
        np.max(np.abs(fa - fb)) <= tol for sa, sb in zip(a, b) for fa, fb in zip(sa.factors, sb.factors)
    )


def _certify_block(block, tol: float, side_cap: int) -> Certificate:
    if block.external is not None:
        return external_certificate(block.seed, block.external)
    if block.seed.plan is not None:
        return certify(block.seed.plan, block.seed, tol, side_cap)
    return direct_sweep(block.seed, tol, side_cap)


def certify(
    plan: CompositionPlan,
    built: StateSet | None = None,
    tol: float = DEFAULT_TOL,
    side_cap: int = DEFAULT_SIDE_CAP,
) -> Certificate:
    """
    Certify a composed set through its plan.

    Checks that the plan graph is connected, that the union is orthogonal,
    and that every block's seed is certified on its own parties: by a nested
    plan when the seed carries one, by an explicit external attestation, or
    by a direct sweep. Each bipartition of the composed system is then
    covered by a block whose parties lie on both sides of it.

    Raises
    ------
    PlanError
        If the plan graph is disconnected.
    InputError
        If ``built`` is given and differs from the plan's output.
    """
    graph = build_graph(plan)
    if not is_connected(graph):
        comps = graph.components()
        raise PlanError(
            "composition graph is disconnected: components "
            + " and ".join("{" + ",".join(str(p + 1) for p in c) + "}" for c in comps[:2])
        )
    union = layout_plan(plan)
    if built is not None and not _same_states(union, built):
        raise InputError("state set does not match the composition plan")
    audit = check_orthogonality(union, tol)
    children = [_certify_block(b, tol, side_cap) for b in plan.blocks]

    cover = []
    for bp in bipartitions(len(plan.dims)):
        hit = next(i for i, b in enumerate(plan.blocks) if bp.crosses(b.parties))
        cover.append(CoverEntry(bp, hit))

    verdict, reason = Verdict.CERTIFIED, "graph connected, union orthogonal, every block certified"
    if not audit.passed:
        i, j, ov = audit.offending[0]
        verdict, reason = Verdict.REFUTED, f"union is not orthogonal: states {i} and {j} overlap {ov:.3g}"
    else:
        weak = [i for i, c in enumerate(children) if not c.certified]
        if weak:
            verdict = Verdict.INCONCLUSIVE
            reason = f"block {weak[0]} is not certified: {children[weak[0]].reason}"
    return Certificate(
        "composition",
        verdict,
        reason,
        plan.dims,
        len(union),
        plan.label,
        audit,
        connected=True,
        blocks=[b.parties for b in plan.blocks],
        cover=cover,
        children=children,
    )


def certify_set(states: StateSet, tol: float = DEFAULT_TOL, side_cap: int = DEFAULT_SIDE_CAP) -> Certificate:
    """Use the attached plan when there is one, otherwise a direct sweep."""
    if states.plan is not None:
        return certify(states.plan, states, tol, side_cap)
    return direct_sweep(states, tol, side_cap)


def render_markdown(cert: Certificate, depth: int = 0) -> str:
    """Human-readable rendering of a certificate tree."""
    h = "#" * min(depth + 2, 6)
    lines = [
        f"{h} {cert.label or 'state set'}: {cert.verdict.value}",
        "",
        f"- kind: {cert.kind}",
        f"- dims: {list(cert.dims)}, states: {cert.n_states}",
        f"- reason: {cert.reason}",
    ]
    if cert.audit is not None:
        lines.append(f"- max pairwise overlap: {cert.audit.max_overlap:.3g} (tol {cert.audit.tol:g})")
    if cert.kind == "external":
        lines.append(f"- external reference (trust assumed): {cert.external_ref}")
    if cert.sweep:
        lines += [
            "",
            "| bipartition | side | side dim | constraints | solution dim | trivial |",
            "|---|---|---|---|---|---|",
        ]
        for r in cert.sweep:
            for rep, side in ((r.left, r.bipartition.left), (r.right, r.bipartition.right)):
                s = "{" + ",".join(str(p + 1) for p in side) + "}"
                if rep is None:
                    lines.append(f"| {r.bipartition.label()} | {s} | over cap | - | - | no |")
                else:
                    lines.append(
                        f"| {r.bipartition.label()} | {s} | {rep.side_dim} | {rep.constraint_count} "
                        f"| {rep.solution_dim} | {'yes' if rep.trivial else 'no'} |"
                    )
    if cert.kind == "composition":
        lines += ["", "| bipartition | covering block | block parties |", "|---|---|---|"]
        for c in cert.cover:
            ps = ",".join(str(p + 1) for p in cert.blocks[c.block])
            lines.append(f"| {c.bipartition.label()} | {c.block} | {{{ps}}} |")
    out = "\n".join(lines) + "\n"
    for child in cert.children:
        out += "\n" + render_markdown(child, depth + 1)
    return out
