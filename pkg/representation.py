"""Representations of the N=1 ADE quiver.

Q[(i, j)] is the map V(j) -> V(i) for adjacent i, j; Phi[j] is the loop at j.
"""
from __future__ import annotations

import itertools
import logging
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from dynkin import DimVector, DynkinDiagram, build_diagram, check_potentials, unit_vector
from errors import HypothesisError, InputError
from exactnum import (
    NUMERIC_TOLERANCE,
    ComplexField,
    Matrix,
    Mode,
    PrimeField,
    RationalField,
    Scalar,
    Span,
    block_diag,
    format_scalar,
    identity,
    is_zero_scalar,
    kernel_basis,
    matrix,
    max_magnitude,
    mode_of,
    mul,
    poly_eval,
    poly_eval_matrix,
    rank,
    scalar_matrix,
    to_scalar,
    zeros,
)

logger = logging.getLogger(__name__)

RANDOM_ISO_TRIALS = 50
ISO_SWEEP_RANGE = range(-3, 4)
ISO_SWEEP_MAX_BASIS = 3


@dataclass(frozen=True, eq=False)
class QuiverRep:
    diagram: DynkinDiagram
    dims: DimVector
    Q: dict
    Phi: dict
    mode: Mode = Mode.EXACT

    def __post_init__(self):
        d = self.diagram
        dims = d.check_vector(self.dims)
        if any(not isinstance(n, int) or n < 0 for n in dims):
            raise InputError(f"dimensions must be nonnegative integers: {dims}")
        object.__setattr__(self, "dims", dims)

        if set(self.Q) != set(d.ordered_pairs):
            raise InputError("Q must be given exactly on the ordered adjacent pairs")
        for (i, j), m in self.Q.items():
            self._check_block(f"Q{i}{j}", m, (self.dim(i), self.dim(j)))
        if set(self.Phi) != set(d.vertices):
            raise InputError("Phi must be given on every vertex")
        for j, m in self.Phi.items():
            self._check_block(f"Phi{j}", m, (self.dim(j), self.dim(j)))

    def _check_block(self, name: str, m, shape):
        if not isinstance(m, np.ndarray) or m.shape != shape:
            got = getattr(m, "shape", None)
            raise InputError(f"{name} has shape {got}, expected {shape}")
        if mode_of(m) is not self.mode:
            raise InputError(f"{name} is not a {self.mode.value} matrix")

    def dim(self, v: int) -> int:
        return self.dims[v - 1]

    @property
    def total_dim(self) -> int:
        return sum(self.dims)


@dataclass(frozen=True, eq=False)
class LambdaRep:
    """A representation whose loops all act as the scalar lam."""

    rep: QuiverRep
    lam: Scalar
    tolerance: float = NUMERIC_TOLERANCE

    def __post_init__(self):
        lam = to_scalar(self.lam, self.rep.mode)
        object.__setattr__(self, "lam", lam)
        for j in self.rep.diagram.vertices:
            n = self.rep.dim(j)
            diff = self.rep.Phi[j] - scalar_matrix(n, lam, self.rep.mode)
            if max_magnitude(diff) != 0 and not (
                self.rep.mode is Mode.NUMERIC and max_magnitude(diff) < self.tolerance
            ):
                raise InputError(f"Phi{j} is not {format_scalar(lam)} times the identity")

    @property
    def diagram(self) -> DynkinDiagram:
        return self.rep.diagram

    @property
    def dims(self) -> DimVector:
        return self.rep.dims

    @property
    def mode(self) -> Mode:
        return self.rep.mode

    @property
    def Q(self) -> dict:
        return self.rep.Q

    @property
    def Phi(self) -> dict:
        return self.rep.Phi

    def dim(self, v: int) -> int:
        return self.rep.dim(v)

    @property
    def total_dim(self) -> int:
        return self.rep.total_dim


def _base(rep) -> QuiverRep:
    return rep.rep if isinstance(rep, LambdaRep) else rep


def make_rep(
    diagram: DynkinDiagram,
    dims,
    Q: dict | None = None,
    Phi: dict | None = None,
    mode: Mode = Mode.EXACT,
) -> QuiverRep:
    """Build a QuiverRep, coercing nested lists and filling missing maps with zeros."""
    dims = tuple(diagram.check_vector(dims))
    Q = dict(Q or {})
    for key in Q:
        if key not in diagram.ordered_pairs:
            raise InputError(f"Q{key[0]}{key[1]}: {key[0]} and {key[1]} are not adjacent")
    maps = {}
    for i, j in diagram.ordered_pairs:
        shape = (dims[i - 1], dims[j - 1])
        maps[(i, j)] = _coerce_block(Q.get((i, j)), shape, mode)
    loops = {}
    for j in diagram.vertices:
        shape = (dims[j - 1], dims[j - 1])
        loops[j] = _coerce_block((Phi or {}).get(j), shape, mode)
    return QuiverRep(diagram, dims, maps, loops, mode)


def _coerce_block(value, shape, mode: Mode) -> Matrix:
    if value is None:
        return zeros(*shape, mode)
    if isinstance(value, np.ndarray):
        if value.shape != shape:
            raise InputError(f"block of shape {value.shape}, expected {shape}")
        return value if mode_of(value) is mode else matrix(value.tolist(), mode, shape)
    return matrix(value, mode, shape)


def lambda_rep(diagram: DynkinDiagram, dims, Q: dict | None, lam, mode: Mode = Mode.EXACT) -> LambdaRep:
    lam = to_scalar(lam, mode)
    dims = tuple(diagram.check_vector(dims))
    Phi = {j: scalar_matrix(dims[j - 1], lam, mode) for j in diagram.vertices}
    return LambdaRep(make_rep(diagram, dims, Q, Phi, mode), lam)


# ------------------------------
# Relations
# ------------------------------
@dataclass(frozen=True, eq=False)
class RelationReport:
    """Residuals of the vertex relations and the loop commutators.

    Numeric reports compare against tolerance * (1 + scale), scale being the
    largest magnitude among the terms that were summed.
    """

    vertex_residuals: dict
    edge_commutators: dict
    max_magnitude: object
    mode: Mode = Mode.EXACT
    tolerance: float = NUMERIC_TOLERANCE
    scale: float = 0.0

    @property
    def threshold(self) -> float:
        return self.tolerance * (1.0 + self.scale)

    @property
    def holds(self) -> bool:
        if self.mode is Mode.EXACT:
            return self.max_magnitude == 0
        return self.max_magnitude < self.threshold

    def failing(self) -> list[str]:
        bad = []
        for j, r in sorted(self.vertex_residuals.items()):
            if not self._small(r):
                bad.append(f"vertex {j}")
        for (i, j), c in sorted(self.edge_commutators.items()):
            if not self._small(c):
                bad.append(f"commutator {i}{j}")
        return bad

    def _small(self, m) -> bool:
        mag = max_magnitude(m)
        return mag == 0 if self.mode is Mode.EXACT else mag < self.threshold


def check_relations(rep, potentials, tol: float = NUMERIC_TOLERANCE) -> RelationReport:
    rep = _base(rep)
    d = rep.diagram
    potentials = check_potentials(d, potentials)
    terms = []

    residuals = {}
    for j in d.vertices:
        n = rep.dim(j)
        r = poly_eval_matrix(potentials[j - 1], rep.Phi[j])
        terms.append(r)
        for i in d.neighbours(j):
            term = mul(rep.Q[(j, i)], rep.Q[(i, j)]) * d.sign(i, j)
            terms.append(term)
            r = r + term
        residuals[j] = r if n else zeros(0, 0, rep.mode)

    commutators = {}
    for i, j in d.ordered_pairs:
        left, right = mul(rep.Q[(i, j)], rep.Phi[j]), mul(rep.Phi[i], rep.Q[(i, j)])
        terms += [left, right]
        commutators[(i, j)] = left - right

    blocks = list(residuals.values()) + list(commutators.values())
    worst = max((max_magnitude(m) for m in blocks), default=0)
    scale = 0.0
    if rep.mode is Mode.NUMERIC:
        worst = float(worst)
        scale = max((max_magnitude(m) for m in terms), default=0.0)
    return RelationReport(residuals, commutators, worst, rep.mode, tol, float(scale))


def concentrated_simple(
    d: DynkinDiagram,
    k: int,
    lam,
    potentials,
    mode: Mode = Mode.EXACT,
    tol: float = NUMERIC_TOLERANCE,
) -> LambdaRep:
    """L_k: one-dimensional at k, Phi_k = [lam], no arrows."""
    d.check_vertex(k)
    potentials = check_potentials(d, potentials)
    lam = to_scalar(lam, mode)
    value = poly_eval(potentials[k - 1], lam)
    if not is_zero_scalar(value, tol):
        raise HypothesisError(
            f"L{k} needs P'{k}(lambda) = 0 for the vertex-{k} relation; "
            f"P'{k}({format_scalar(lam)}) = {format_scalar(value)}"
        )
    return lambda_rep(d, unit_vector(d, k), None, lam, mode)


def trace_identity_residual(rep: LambdaRep, potentials):
    """sum_i dim V(i) * P'_i(lam); zero whenever the relations hold."""
    d = rep.diagram
    potentials = check_potentials(d, potentials)
    total = to_scalar(0, rep.mode)
    for v in d.vertices:
        if rep.dim(v):
            total += rep.dim(v) * poly_eval(potentials[v - 1], rep.lam)
    return total


# ------------------------------
# Sums and duals
# ------------------------------
def direct_sum(a, b):
    base_a, base_b = _base(a), _base(b)
    if base_a.diagram != base_b.diagram:
        raise InputError(f"cannot add representations of {base_a.diagram.label} and {base_b.diagram.label}")
    if base_a.mode is not base_b.mode:
        raise InputError("cannot add exact and numeric representations")

    dims = tuple(x + y for x, y in zip(base_a.dims, base_b.dims))
    Q = {key: block_diag(base_a.Q[key], base_b.Q[key]) for key in base_a.Q}
    Phi = {j: block_diag(base_a.Phi[j], base_b.Phi[j]) for j in base_a.Phi}
    rep = QuiverRep(base_a.diagram, dims, Q, Phi, base_a.mode)

    if isinstance(a, LambdaRep) and isinstance(b, LambdaRep):
        if a.total_dim == 0:
            return LambdaRep(rep, b.lam)
        if b.total_dim == 0 or a.lam == b.lam:
            return LambdaRep(rep, a.lam)
    return rep


def dual(rep):
    """Transpose dual: V*(i) = V(i)^*, Q*_ij = (Q_ji)^T, Phi*_j = Phi_j^T."""
    base = _base(rep)
    Q = {(i, j): base.Q[(j, i)].T.copy() for i, j in base.Q}
    Phi = {j: m.T.copy() for j, m in base.Phi.items()}
    out = QuiverRep(base.diagram, base.dims, Q, Phi, base.mode)
    return LambdaRep(out, rep.lam) if isinstance(rep, LambdaRep) else out


# ------------------------------
# Spinning
# ------------------------------
def _field_for(rep: QuiverRep, tol: float):
    if rep.mode is Mode.EXACT:
        return RationalField()
    scale = max((max_magnitude(m) for m in rep.Q.values()), default=0.0)
    return ComplexField(tol, float(scale))


def _operators(rep: QuiverRep, field) -> dict:
    ops = {v: [] for v in rep.diagram.vertices}
    for (i, j), m in sorted(rep.Q.items()):
        if m.size:
            ops[j].append((i, [[field.coerce(x) for x in row] for row in m]))
    for j, m in rep.Phi.items():
        if m.size:
            ops[j].append((j, [[field.coerce(x) for x in row] for row in m]))
    return ops


def _spin(ops: dict, dims, field, seeds) -> dict:
    spans = {v: Span(field, n) for v, n in enumerate(dims, start=1)}
    queue = deque()
    for v, vec in seeds:
        vec = [field.coerce(x) for x in vec]
        if spans[v].add(vec):
            queue.append((v, vec))
    while queue:
        j, vec = queue.popleft()
        for i, rows in ops[j]:
            if spans[i].is_full:
                continue
            image = [field.dot(row, vec) for row in rows]
            if spans[i].add(image):
                queue.append((i, image))
    return spans


def _check_seeds(rep: QuiverRep, seeds):
    checked = []
    for v, vec in seeds:
        rep.diagram.check_vertex(v)
        vec = list(vec)
        if len(vec) != rep.dim(v):
            raise InputError(f"seed of length {len(vec)} in V({v}) of dimension {rep.dim(v)}")
        checked.append((v, vec))
    return checked


def spin_subspaces(rep, seeds, tol: float = NUMERIC_TOLERANCE) -> dict[int, Matrix]:
    """Bases (as rows) of the smallest subrepresentation containing the seeds."""
    base = _base(rep)
    field = _field_for(base, tol)
    spans = _spin(_operators(base, field), base.dims, field, _check_seeds(base, seeds))
    out = {}
    for v, span in spans.items():
        rows = span.basis()
        out[v] = matrix(rows, base.mode, (len(rows), base.dim(v)))
    return out


def spin_subrep(rep, seeds, tol: float = NUMERIC_TOLERANCE) -> DimVector:
    spaces = spin_subspaces(rep, seeds, tol)
    return tuple(spaces[v].shape[0] for v in sorted(spaces))


def _all_full(spans: dict) -> bool:
    return all(s.is_full for s in spans.values())


def _prime_operators(rep: QuiverRep, field: PrimeField):
    try:
        return _operators(rep, field)
    except ValueError:
        return None


def _path_spaces(ops: dict, dims, field, source: int) -> dict:
    """Spans of the path maps V(source) -> V(w), flattened row by row."""
    n = dims[source - 1]
    spans = {v: Span(field, m * n) for v, m in enumerate(dims, start=1)}
    one, zero = field.coerce(1), field.coerce(0)
    start = [[one if r == c else zero for c in range(n)] for r in range(n)]
    spans[source].add([a for row in start for a in row])
    queue = deque([(source, start)])
    while queue:
        j, path = queue.popleft()
        cols = list(zip(*path))
        for i, rows in ops[j]:
            if spans[i].is_full:
                continue
            image = [[field.dot(row, col) for col in cols] for row in rows]
            if spans[i].add([a for row in image for a in row]):
                queue.append((i, image))
    return spans


def _path_algebra_is_full(ops: dict, dims, field) -> bool:
    for v, n in enumerate(dims, start=1):
        if n and not _all_full(_path_spaces(ops, dims, field, v)):
            logger.debug("path maps out of V(%s) miss part of some Hom(V(%s), V(w))", v, v)
            return False
    return True


def is_simple(rep: LambdaRep, tol: float = NUMERIC_TOLERANCE) -> bool:
    """Burnside test: deterministic, no sampling.

    V is (absolutely) simple iff the algebra generated by the vertex
    idempotents, the arrows and the loops is all of End(V), that is iff the
    path maps V(v) -> V(w) span Hom(V(v), V(w)) for every pair of vertices.
    Exact representations are tried modulo a large prime first: a full span
    there is full over Q as well, anything short of it is recomputed over Q.
    """
    if rep.total_dim == 0:
        raise InputError("the zero representation is not simple by definition")

    base = _base(rep)
    if base.mode is Mode.EXACT:
        fast_field = PrimeField()
        fast_ops = _prime_operators(base, fast_field)
        if fast_ops is not None and _path_algebra_is_full(fast_ops, base.dims, fast_field):
            return True

    field = _field_for(base, tol)
    return _path_algebra_is_full(_operators(base, field), base.dims, field)


# ------------------------------
# Morphisms
# ------------------------------
def _intertwiner_system(a: QuiverRep, b: QuiverRep):
    d = a.diagram
    offsets, total = {}, 0
    for v in d.vertices:
        offsets[v] = total
        total += b.dim(v) * a.dim(v)

    def index(v, r, s):
        return offsets[v] + r * a.dim(v) + s

    equations = []

    def commuting(left_v, right_v, ma, mb):
        # h_left @ ma - mb @ h_right == 0
        for r in range(mb.shape[0]):
            for c in range(ma.shape[1]):
                eq = {}
                for s in range(ma.shape[0]):
                    if ma[s, c] != 0:
                        key = index(left_v, r, s)
                        eq[key] = eq.get(key, 0) + ma[s, c]
                for s in range(mb.shape[1]):
                    if mb[r, s] != 0:
                        key = index(right_v, s, c)
                        eq[key] = eq.get(key, 0) - mb[r, s]
                if eq:
                    equations.append(eq)

    for i, j in d.ordered_pairs:
        commuting(i, j, a.Q[(i, j)], b.Q[(i, j)])
    for v in d.vertices:
        commuting(v, v, a.Phi[v], b.Phi[v])

    system = zeros(len(equations), total, a.mode)
    for r, eq in enumerate(equations):
        for c, value in eq.items():
            system[r, c] = value
    return system, offsets


def intertwiner_space(a, b, tol: float = NUMERIC_TOLERANCE) -> list[dict[int, Matrix]]:
    """Basis of Hom(a, b) as per-vertex matrix tuples h_v: V_a(v) -> V_b(v)."""
    a, b = _base(a), _base(b)
    if a.diagram != b.diagram:
        raise InputError("representations live on different diagrams")
    if a.mode is not b.mode:
        raise InputError("cannot mix exact and numeric representations")

    system, offsets = _intertwiner_system(a, b)
    if system.shape[1] == 0:
        return []
    kernel = kernel_basis(system, tol)
    basis = []
    for col in range(kernel.shape[1]):
        h = {}
        for v in a.diagram.vertices:
            rows, cols = b.dim(v), a.dim(v)
            start = offsets[v]
            block = kernel[start:start + rows * cols, col]
            h[v] = block.reshape(rows, cols) if rows * cols else zeros(rows, cols, a.mode)
        basis.append(h)
    return basis


def _combine(basis: list[dict], coeffs, mode: Mode) -> dict:
    out = {}
    for v in basis[0]:
        acc = zeros(*basis[0][v].shape, mode)
        for c, h in zip(coeffs, basis):
            if c:
                acc = acc + h[v] * to_scalar(c, mode)
        out[v] = acc
    return out


def _invertible_everywhere(h: dict, tol: float) -> bool:
    return all(m.shape[0] == m.shape[1] and rank(m, tol) == m.shape[0] for m in h.values())


def _sweep_coefficients(m: int):
    """Small integer combinations of at least two basis intertwiners.

    Every combination is tried for m <= ISO_SWEEP_MAX_BASIS; above that only
    pairs of basis elements are.
    """
    nonzero = [c for c in ISO_SWEEP_RANGE if c]
    if m <= ISO_SWEEP_MAX_BASIS:
        for coeffs in itertools.product(ISO_SWEEP_RANGE, repeat=m):
            if sum(1 for c in coeffs if c) >= 2:
                yield coeffs
        return

    logger.debug("Hom space of dimension %d: sweeping pairs of basis intertwiners only", m)
    for a, b in itertools.combinations(range(m), 2):
        for ca, cb in itertools.product(nonzero, repeat=2):
            coeffs = [0] * m
            coeffs[a], coeffs[b] = ca, cb
            yield coeffs


def are_isomorphic(a, b, seed: int = 0, tol: float = NUMERIC_TOLERANCE) -> bool:
    base_a, base_b = _base(a), _base(b)
    if base_a.diagram != base_b.diagram:
        raise InputError("representations live on different diagrams")
    if base_a.dims != base_b.dims:
        return False
    if base_a.total_dim == 0:
        return True

    basis = intertwiner_space(base_a, base_b, tol)
    if not basis:
        return False
    mode = base_a.mode

    for h in basis:
        if _invertible_everywhere(h, tol):
            return True

    m = len(basis)
    for coeffs in _sweep_coefficients(m):
        if _invertible_everywhere(_combine(basis, coeffs, mode), tol):
            return True

    rng = random.Random(seed)
    for _ in range(RANDOM_ISO_TRIALS):
        coeffs = [Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for _ in range(m)]
        if _invertible_everywhere(_combine(basis, coeffs, mode), tol):
            return True
    return False


# ------------------------------
# Serialization
# ------------------------------
def _pair_key(i: int, j: int) -> str:
    return f"{i}{j}" if i < 10 and j < 10 else f"{i},{j}"


def _parse_pair_key(key: str) -> tuple[int, int]:
    try:
        if "," in key:
            i, j = key.split(",")
            return int(i), int(j)
        if len(key) == 2 and key.isdigit():
            return int(key[0]), int(key[1])
    except ValueError:
        pass
    raise InputError(f"bad arrow key {key!r}; use 'ij' or 'i,j'")


def _matrix_strings(m: Matrix) -> list[list[str]]:
    return [[format_scalar(v) for v in row] for row in m]


def rep_to_json(rep: LambdaRep) -> dict:
    d = rep.diagram
    return {
        "diagram": {"family": d.family.value, "rank": d.rank},
        "mode": rep.mode.value,
        "dims": list(rep.dims),
        "lambda": format_scalar(rep.lam),
        "Q": {
            _pair_key(i, j): _matrix_strings(rep.Q[(i, j)])
            for i, j in d.ordered_pairs
            if rep.Q[(i, j)].size
        },
    }


def rep_from_json(data: dict, mode: Mode | None = None) -> LambdaRep:
    if not isinstance(data, dict):
        raise InputError("representation document must be a JSON object")
    try:
        diagram = build_diagram(data["diagram"]["family"], data["diagram"]["rank"])
        dims = data["dims"]
        lam = data["lambda"]
    except (KeyError, TypeError):
        raise InputError("representation needs 'diagram', 'dims' and 'lambda'")
    if mode is None:
        try:
            mode = Mode(data.get("mode", "exact"))
        except ValueError:
            raise InputError(f"unknown mode {data.get('mode')!r}")

    raw_q = data.get("Q", {})
    if not isinstance(raw_q, dict):
        raise InputError("'Q' must be an object keyed by arrow")
    Q = {}
    for key, rows in raw_q.items():
        i, j = _parse_pair_key(key)
        if not isinstance(rows, list):
            raise InputError(f"Q{key} must be a list of rows")
        Q[(i, j)] = rows
    if not isinstance(dims, list) or any(not isinstance(n, int) or isinstance(n, bool) for n in dims):
        raise InputError("'dims' must be a list of integers")
    return lambda_rep(diagram, dims, Q, lam, mode)
