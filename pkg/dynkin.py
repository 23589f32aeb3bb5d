"""ADE Dynkin diagram combinatorics and the Weyl action on potentials."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property

import numpy as np

from errors import InputError
from exactnum import Polynomial

# largest coefficient of any ADE positive root (E8 highest root)
MAX_ROOT_COEFFICIENT = 6

DimVector = tuple[int, ...]
Potentials = tuple[Polynomial, ...]
TCoordinates = tuple[Polynomial, ...]
WeylWord = tuple[int, ...]


class Family(str, Enum):
    A = "A"
    D = "D"
    E = "E"


@dataclass(frozen=True)
class DynkinDiagram:
    family: Family
    rank: int

    @property
    def label(self) -> str:
        return f"{self.family.value}{self.rank}"

    @property
    def vertices(self) -> range:
        return range(1, self.rank + 1)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        n = self.rank
        if self.family is Family.A:
            edges = [(i, i + 1) for i in range(1, n)]
        elif self.family is Family.D:
            edges = [(i, i + 1) for i in range(1, n - 1)] + [(n - 2, n)]
        else:
            edges = [(i, i + 1) for i in range(1, n - 1)] + [(3, n)]
        return tuple(sorted(edges))

    @cached_property
    def _neighbours(self) -> dict[int, tuple[int, ...]]:
        adj = {v: [] for v in self.vertices}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def neighbours(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return self._neighbours[v]

    def adjacent(self, i: int, j: int) -> bool:
        return j in self._neighbours.get(i, ())

    def sign(self, i: int, j: int) -> int:
        """s_ij: 0 unless adjacent, +1 when i > j, -1 when i < j."""
        if not self.adjacent(i, j):
            return 0
        return 1 if i > j else -1

    @cached_property
    def ordered_pairs(self) -> tuple[tuple[int, int], ...]:
        pairs = [(i, j) for i, j in self.edges] + [(j, i) for i, j in self.edges]
        return tuple(sorted(pairs))

    def check_vertex(self, v: int):
        if not isinstance(v, int) or not 1 <= v <= self.rank:
            raise InputError(f"vertex {v!r} is not in 1..{self.rank} of {self.label}")

    def check_vector(self, x) -> tuple:
        x = tuple(x)
        if len(x) != self.rank:
            raise InputError(f"vector of length {len(x)} on {self.label}")
        return x


def build_diagram(family, rank: int) -> DynkinDiagram:
    try:
        family = Family(str(getattr(family, "value", family)).upper())
    except ValueError:
        raise InputError(f"unknown Dynkin family {family!r}")
    if not isinstance(rank, int) or isinstance(rank, bool):
        raise InputError(f"rank must be an integer, got {rank!r}")

    valid = (
        (family is Family.A and rank >= 1)
        or (family is Family.D and rank >= 4)
        or (family is Family.E and rank in (6, 7, 8))
    )
    if not valid:
        raise InputError(f"no Dynkin diagram {family.value}{rank}")
    return DynkinDiagram(family, rank)


# ------------------------------
# Root space
# ------------------------------
def bilinear_form(d: DynkinDiagram, x, y) -> Fraction:
    x, y = d.check_vector(x), d.check_vector(y)
    value = Fraction(0)
    for i in d.vertices:
        value += Fraction(x[i - 1]) * y[i - 1]
    for i, j in d.edges:
        value -= Fraction(x[i - 1] * y[j - 1] + x[j - 1] * y[i - 1], 2)
    return value


def quadratic_form_B(d: DynkinDiagram, x) -> Fraction:
    x = d.check_vector(x)
    value = sum((Fraction(v) ** 2 for v in x), Fraction(0))
    for i, j in d.edges:
        value -= Fraction(x[i - 1]) * x[j - 1]
    return value


def simple_reflection(d: DynkinDiagram, beta: int, x) -> DimVector:
    d.check_vertex(beta)
    x = list(d.check_vector(x))
    x[beta - 1] = -x[beta - 1] + sum(x[l - 1] for l in d.neighbours(beta))
    return tuple(x)


def is_positive(x) -> bool:
    return any(v != 0 for v in x) and all(v >= 0 for v in x)


def height(x) -> int:
    return sum(x)


def unit_vector(d: DynkinDiagram, k: int) -> DimVector:
    d.check_vertex(k)
    return tuple(1 if v == k else 0 for v in d.vertices)


def positive_roots(d: DynkinDiagram) -> list[DimVector]:
    """All x > 0 with B(x) = 1, by brute force over 0..6 per coordinate.

    Sorted by height, then lexicographically.
    """
    n = d.rank
    values = MAX_ROOT_COEFFICIENT + 1
    tail = min(n, 6)
    head = n - tail
    grid = np.indices((values,) * tail, dtype=np.int32).reshape(tail, -1).T

    found = []
    for prefix in itertools.product(range(values), repeat=head):
        block = np.concatenate(
            [np.broadcast_to(np.array(prefix, dtype=np.int32), (grid.shape[0], head)), grid],
            axis=1,
        )
        form = (block * block).sum(axis=1)
        for i, j in d.edges:
            form -= block[:, i - 1] * block[:, j - 1]
        for row in block[form == 1]:
            found.append(tuple(int(v) for v in row))

    return sorted(found, key=lambda r: (height(r), r))


def highest_root(d: DynkinDiagram) -> DimVector:
    return positive_roots(d)[-1]


def coxeter_apply(d: DynkinDiagram, x, times: int) -> DimVector:
    """c^times x with c = s_n ... s_2 s_1 (s_1 applied first)."""
    if times < 0:
        raise InputError("times must be nonnegative")
    x = d.check_vector(x)
    for _ in range(times):
        for beta in d.vertices:
            x = simple_reflection(d, beta, x)
    return x


def apply_word_to_vector(d: DynkinDiagram, word: WeylWord, x) -> DimVector:
    x = d.check_vector(x)
    for beta in reversed(word):
        x = simple_reflection(d, beta, x)
    return x


def reflection_word(d: DynkinDiagram, rho) -> tuple[WeylWord, int]:
    """A word w and a vertex b with rho = w(e_b), w applied right to left.

    Reduces rho by the smallest vertex k with 2<rho, e_k> > 0 until a unit
    vector remains.
    """
    rho = d.check_vector(rho)
    if not is_positive(rho) or quadratic_form_B(d, rho) != 1:
        raise InputError(f"{rho} is not a positive root of {d.label}")

    picks = []
    x = rho
    while height(x) > 1:
        k = next(
            v for v in d.vertices
            if 2 * x[v - 1] - sum(x[l - 1] for l in d.neighbours(v)) > 0
        )
        picks.append(k)
        x = simple_reflection(d, k, x)

    base = x.index(1) + 1
    # rho = s_{k1} s_{k2} ... s_{km} e_b, so the first pick acts last
    return tuple(picks), base


def support_type(d: DynkinDiagram, rho) -> str:
    """Dynkin label of the (connected) support subgraph of rho."""
    rho = d.check_vector(rho)
    support = [v for v in d.vertices if rho[v - 1] != 0]
    if not support:
        raise InputError("the zero vector has no support")
    sub = {v: [u for u in d.neighbours(v) if u in support] for v in support}

    seen, stack = {support[0]}, [support[0]]
    while stack:
        for u in sub[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(seen) != len(support):
        raise InputError(f"support of {rho} is not connected")

    size = len(support)
    branch = [v for v in support if len(sub[v]) == 3]
    if not branch:
        return f"A{size}"

    centre = branch[0]
    arms = []
    for start in sub[centre]:
        length, prev, cur = 1, centre, start
        while True:
            nxt = [u for u in sub[cur] if u != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{size}"
    return f"E{size}"


# ------------------------------
# Potentials and t-coordinates
# ------------------------------
def check_potentials(d: DynkinDiagram, potentials) -> Potentials:
    potentials = tuple(potentials)
    if len(potentials) != d.rank:
        raise InputError(f"{d.label} needs {d.rank} potentials, got {len(potentials)}")
    return potentials


def weyl_act_on_potentials(d: DynkinDiagram, i: int, potentials) -> Potentials:
    d.check_vertex(i)
    potentials = check_potentials(d, potentials)
    p_i = potentials[i - 1]
    out = []
    for j in d.vertices:
        p_j = potentials[j - 1]
        if j == i:
            out.append(-p_i)
        elif d.adjacent(i, j):
            out.append(p_j + p_i)
        else:
            out.append(p_j)
    return tuple(out)


def apply_word_to_potentials(d: DynkinDiagram, word: WeylWord, potentials) -> Potentials:
    potentials = check_potentials(d, potentials)
    for i in reversed(word):
        potentials = weyl_act_on_potentials(d, i, potentials)
    return potentials


def t_length(d: DynkinDiagram) -> int:
    return d.rank + 1 if d.family is Family.A else d.rank


def check_t(d: DynkinDiagram, t) -> TCoordinates:
    t = tuple(t)
    if len(t) != t_length(d):
        raise InputError(f"{d.label} needs {t_length(d)} t-functions, got {len(t)}")
    if d.family is Family.A and not sum(t, Polynomial()).is_zero:
        raise InputError("A-type t-functions must sum to zero identically")
    return t


def t_to_potentials(d: DynkinDiagram, t) -> Potentials:
    t = check_t(d, t)
    n = d.rank
    if d.family is Family.A:
        return tuple(t[i - 1] - t[i] for i in range(1, n + 1))
    chain = [t[i - 1] - t[i] for i in range(1, n)]
    if d.family is Family.D:
        return tuple(chain + [t[n - 2] + t[n - 1]])
    return tuple(chain + [-t[0] - t[1] - t[2]])


def weyl_act_on_t(d: DynkinDiagram, i: int, t) -> TCoordinates:
    """Generator r_i on t-coordinates.

    r_i for i < n (and r_n on A_n) transposes t_i and t_{i+1}. On D_n, r_n
    sends t_{n-1} to -t_n and t_n to -t_{n-1} and fixes the other t's. On E_n, r_n
    shifts t_i by -2/3 (t_1+t_2+t_3) for i <= 3 and by +1/3 of it otherwise.
    """
    d.check_vertex(i)
    t = list(check_t(d, t))
    n = d.rank
    if d.family is Family.A or i < n:
        t[i - 1], t[i] = t[i], t[i - 1]
        return tuple(t)
    if d.family is Family.D:
        t[n - 2], t[n - 1] = -t[n - 1], -t[n - 2]
        return tuple(t)
    s = t[0] + t[1] + t[2]
    return tuple(
        t[k] - Fraction(2, 3) * s if k < 3 else t[k] + Fraction(1, 3) * s
        for k in range(n)
    )


def root_potential(rho, potentials) -> Polynomial:
    rho = tuple(rho)
    potentials = tuple(potentials)
    if len(rho) != len(potentials):
        raise InputError("root and potentials have different lengths")
    total = Polynomial()
    for coeff, p in zip(rho, potentials):
        if coeff:
            total = total + p * coeff
    return total
