"""Modified reflection functors F_k on lambda-representations."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from dynkin import Potentials, WeylWord, check_potentials, weyl_act_on_potentials
from errors import HypothesisError, PreconditionError
from exactnum import (
    NUMERIC_TOLERANCE,
    Matrix,
    cokernel_projection,
    format_scalar,
    is_zero_matrix,
    is_zero_scalar,
    kernel_basis,
    mul,
    poly_eval,
    rank,
    scalar_matrix,
    solve_linear,
    to_scalar,
    zeros,
)
from monitoring import track
from representation import LambdaRep, QuiverRep

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ReflectionResult:
    rep: LambdaRep
    potentials: Potentials
    phi_matrix: Matrix


# ------------------------------
# Local maps around vertex k
# ------------------------------
def _blocks(rep: LambdaRep, k: int) -> list[tuple[int, int, int]]:
    """(neighbour, offset, dim) of each summand of N = sum of V(i), i adjacent to k."""
    out, offset = [], 0
    for i in rep.diagram.neighbours(k):
        out.append((i, offset, rep.dim(i)))
        offset += rep.dim(i)
    return out


def _h(rep: LambdaRep, k: int) -> Matrix:
    """h: N -> V(k), (x_i) -> sum s_ik Q_ki x_i."""
    d = rep.diagram
    blocks = _blocks(rep, k)
    total = sum(n for _, _, n in blocks)
    h = zeros(rep.dim(k), total, rep.mode)
    for i, offset, n in blocks:
        if n:
            h[:, offset:offset + n] = rep.Q[(k, i)] * d.sign(i, k)
    return h


def _g(rep: LambdaRep, k: int) -> Matrix:
    """g: V(k) -> N, x -> (Q_ik x)."""
    blocks = _blocks(rep, k)
    total = sum(n for _, _, n in blocks)
    g = zeros(total, rep.dim(k), rep.mode)
    for i, offset, n in blocks:
        if n:
            g[offset:offset + n, :] = rep.Q[(i, k)]
    return g


def reflect_plus(rep: LambdaRep, k: int, tol: float = NUMERIC_TOLERANCE) -> tuple[Matrix, dict]:
    """Kernel side: basis of ker h (as columns) and the maps Q'_ik out of it."""
    rep.diagram.check_vertex(k)
    d = rep.diagram
    kernel = kernel_basis(_h(rep, k), tol)
    maps = {}
    for i, offset, n in _blocks(rep, k):
        maps[(i, k)] = kernel[offset:offset + n, :] * (-d.sign(k, i))
    return kernel, maps


def reflect_minus(rep: LambdaRep, k: int, tol: float = NUMERIC_TOLERANCE) -> tuple[Matrix, dict]:
    """Cokernel side: projection N -> coker g and the maps Q'_ki = proj . incl_i."""
    rep.diagram.check_vertex(k)
    proj, _ = cokernel_projection(_g(rep, k), tol)
    maps = {}
    for i, offset, n in _blocks(rep, k):
        maps[(k, i)] = proj[:, offset:offset + n]
    return proj, maps


def _derivative_at(rep: LambdaRep, k: int, potentials) -> object:
    return poly_eval(potentials[k - 1], rep.lam)


def phi_iso(rep: LambdaRep, k: int, potentials, tol: float = NUMERIC_TOLERANCE) -> Matrix:
    """phi = proj . incl(ker h): the bridge between the two new vertex-k spaces."""
    d = rep.diagram
    d.check_vertex(k)
    potentials = check_potentials(d, potentials)
    p = _derivative_at(rep, k, potentials)
    if is_zero_scalar(p, tol):
        raise PreconditionError(
            f"P'{k}(lambda) vanishes at lambda = {format_scalar(rep.lam)}",
            reason="eigenvalue-vanishing",
        )

    h, g = _h(rep, k), _g(rep, k)
    bridge = mul(h, g) + scalar_matrix(rep.dim(k), p, rep.mode)
    if not is_zero_matrix(bridge, tol):
        raise HypothesisError(f"h.g != -P'{k}(lambda) Id at vertex {k}; the vertex-{k} relation fails")

    if rank(g, tol) != rep.dim(k):
        raise PreconditionError(f"g is not injective at vertex {k}", reason="degeneracy")
    if rank(h, tol) != rep.dim(k):
        raise PreconditionError(f"h is not surjective at vertex {k}", reason="degeneracy")

    kernel, _ = reflect_plus(rep, k, tol)
    proj, _ = reflect_minus(rep, k, tol)
    phi = mul(proj, kernel)
    if phi.shape[0] != phi.shape[1] or rank(phi, tol) != phi.shape[0]:
        raise PreconditionError(f"phi is singular at vertex {k}", reason="degeneracy")
    return phi


def _concentrated_at(rep: LambdaRep, k: int) -> bool:
    return rep.dim(k) > 0 and all(n == 0 for v, n in enumerate(rep.dims, start=1) if v != k)


def reflect(rep: LambdaRep, k: int, potentials, tol: float = NUMERIC_TOLERANCE) -> ReflectionResult:
    d = rep.diagram
    d.check_vertex(k)
    potentials = check_potentials(d, potentials)
    if _concentrated_at(rep, k):
        raise PreconditionError(
            f"representation is concentrated at vertex {k}; use the concentrated simple L{k} directly",
            reason="concentrated",
        )

    phi = phi_iso(rep, k, potentials, tol)
    p = _derivative_at(rep, k, potentials)
    kernel, outgoing = reflect_plus(rep, k, tol)
    _, incoming = reflect_minus(rep, k, tol)
    new_dim = kernel.shape[1]

    Q = dict(rep.Q)
    Q.update(outgoing)
    for (kk, i), m in incoming.items():
        solved = solve_linear(phi, m * p, tol)
        if solved is None:
            raise PreconditionError(f"phi cannot be inverted on Q'{k}{i}", reason="degeneracy")
        Q[(kk, i)] = solved

    dims = tuple(new_dim if v == k else n for v, n in enumerate(rep.dims, start=1))
    Phi = dict(rep.Phi)
    Phi[k] = scalar_matrix(new_dim, rep.lam, rep.mode)

    out = LambdaRep(QuiverRep(d, dims, Q, Phi, rep.mode), rep.lam)
    track("reflection.step", diagram=d.label, vertex=k, dims_in=list(rep.dims), dims_out=list(dims))
    return ReflectionResult(out, weyl_act_on_potentials(d, k, potentials), phi)


def apply_word(rep: LambdaRep, word: WeylWord, potentials, tol: float = NUMERIC_TOLERANCE) -> ReflectionResult:
    """Reflect along word, rightmost letter first, threading the potentials."""
    potentials = check_potentials(rep.diagram, potentials)
    result = ReflectionResult(rep, potentials, zeros(0, 0, rep.mode))
    for position in range(len(word) - 1, -1, -1):
        k = word[position]
        try:
            result = reflect(result.rep, k, result.potentials, tol)
        except PreconditionError as exc:
            raise PreconditionError(
                f"word position {position} (vertex {k}): {exc}", reason=exc.reason, step=position
            ) from exc
        except HypothesisError as exc:
            raise HypothesisError(f"word position {position} (vertex {k}): {exc}", step=position) from exc
    return result


# ------------------------------
# Explicit double-reflection map
# ------------------------------
def double_reflection_map(rep: LambdaRep, k: int, potentials, tol: float = NUMERIC_TOLERANCE):
    """The map V -> F_k F_k(V): identity off k, x -> (-s_ki Q_ik x) at k.

    Returns (F_k F_k(V) result, per-vertex maps), or the result and None when
    the image at k does not lie in the new vertex space.
    """
    d = rep.diagram
    once = reflect(rep, k, potentials, tol)
    twice = reflect(once.rep, k, once.potentials, tol)

    kernel, _ = reflect_plus(once.rep, k, tol)
    image = zeros(kernel.shape[0], rep.dim(k), rep.mode)
    for i, offset, n in _blocks(once.rep, k):
        if n:
            image[offset:offset + n, :] = rep.Q[(i, k)] * (-d.sign(k, i))
    at_k = solve_linear(kernel, image, tol)
    if at_k is None:
        return twice, None

    maps = {}
    for v in d.vertices:
        if v == k:
            maps[v] = at_k
        else:
            maps[v] = scalar_matrix(rep.dim(v), to_scalar(1, rep.mode), rep.mode)
    return twice, maps


def is_intertwiner(a, b, maps: dict, tol: float = NUMERIC_TOLERANCE) -> bool:
    """Whether the per-vertex maps h_v: V_a(v) -> V_b(v) commute with every arrow and loop."""
    d = a.diagram
    for v in d.vertices:
        if maps[v].shape != (b.dim(v), a.dim(v)):
            return False
    for i, j in d.ordered_pairs:
        if not is_zero_matrix(mul(maps[i], a.Q[(i, j)]) - mul(b.Q[(i, j)], maps[j]), tol):
            return False
    for v in d.vertices:
        if not is_zero_matrix(mul(maps[v], a.Phi[v]) - mul(b.Phi[v], maps[v]), tol):
            return False
    return True


def check_double_reflection(rep: LambdaRep, k: int, potentials, tol: float = NUMERIC_TOLERANCE) -> bool:
    """Secondary check of F_k F_k(V) ~ V through the explicit map; never raises on mismatch."""
    twice, maps = double_reflection_map(rep, k, potentials, tol)
    ok = maps is not None and is_intertwiner(rep, twice.rep, maps, tol)
    if not ok:
        logger.warning("explicit double-reflection map at vertex %s is not an intertwiner", k)
    return ok
