"""Classification of simple representations and the curve/fibration geometry."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

import sympy as sp
from sympy.polys.domains import QQ

from dynkin import (
    DimVector,
    DynkinDiagram,
    Family,
    Potentials,
    TCoordinates,
    WeylWord,
    apply_word_to_potentials,
    check_potentials,
    check_t,
    positive_roots,
    reflection_word,
    root_potential,
    support_type,
    t_to_potentials,
)
from errors import HypothesisError, UnsupportedError, VerificationError
from exactnum import (
    NUMERIC_TOLERANCE,
    Mode,
    Polynomial,
    Scalar,
    complex_roots,
    format_scalar,
    is_square_free,
    is_zero_scalar,
    poly_eval,
    poly_gcd,
    rational_roots,
)
from monitoring import track
from reflection import apply_word
from representation import (
    LambdaRep,
    check_relations,
    concentrated_simple,
    is_simple,
    trace_identity_residual,
)

logger = logging.getLogger(__name__)

GENERIC_POTENTIAL_BASE = 1000


# ------------------------------
# Hypotheses
# ------------------------------
def b_gamma(d: DynkinDiagram, potentials) -> list[tuple[DimVector, Polynomial]]:
    potentials = check_potentials(d, potentials)
    return [(rho, root_potential(rho, potentials)) for rho in positive_roots(d)]


@dataclass(frozen=True)
class StarViolation:
    root: DimVector
    other: DimVector
    common: Polynomial

    @property
    def shared_roots(self) -> list[Fraction]:
        return sorted(set(rational_roots(self.common)))


@dataclass(frozen=True)
class StarReport:
    violations: tuple = ()

    @property
    def holds(self) -> bool:
        return not self.violations


def check_star(d: DynkinDiagram, potentials) -> StarReport:
    """Pairwise coprimality of the root combinations sum rho_i P'_i.

    Only positive-root combinations are compared; two distinct positive roots
    are never proportional.
    """
    table = b_gamma(d, potentials)
    violations = []
    for a in range(len(table)):
        rho, p = table[a]
        for b in range(a + 1, len(table)):
            other, q = table[b]
            if p.is_zero or q.is_zero:
                common = p if q.is_zero else q
                violations.append(StarViolation(rho, other, common.monic()))
                continue
            g = poly_gcd(p, q)
            if g.degree > 0:
                violations.append(StarViolation(rho, other, g))
    return StarReport(tuple(violations))


@dataclass(frozen=True)
class SimpleRootsReport:
    offenders: tuple = ()

    @property
    def holds(self) -> bool:
        return not self.offenders


def check_simple_roots(d: DynkinDiagram, potentials) -> SimpleRootsReport:
    offenders = []
    for rho, p in b_gamma(d, potentials):
        # the zero polynomial vanishes to every order
        if p.is_zero or not is_square_free(p):
            offenders.append(rho)
    return SimpleRootsReport(tuple(offenders))


def _square_free_part(p: Polynomial) -> Polynomial:
    if p.degree < 1:
        return p
    return (p // poly_gcd(p, p.derivative())).monic()


def count_irrational_roots(d: DynkinDiagram, potentials) -> list[tuple[DimVector, int]]:
    """Per root: distinct roots of sum rho_i P'_i that are not rational."""
    out = []
    for rho, p in b_gamma(d, potentials):
        if p.degree < 1:
            out.append((rho, 0))
            continue
        sf = _square_free_part(p)
        out.append((rho, sf.degree - len(set(rational_roots(sf)))))
    return out


def generic_linear_potentials(d: DynkinDiagram, base: int = GENERIC_POTENTIAL_BASE) -> Potentials:
    """P'_i = x - base^(i-1): distinct root combinations never collide for base > max height."""
    return tuple(Polynomial((-Fraction(base) ** (i - 1), 1)) for i in d.vertices)


# ------------------------------
# Enumeration
# ------------------------------
@dataclass(frozen=True, eq=False)
class ClassificationEntry:
    root: DimVector
    lam: Scalar
    rep: LambdaRep
    word: WeylWord
    base: int
    curve_class: tuple
    config_type: str


def _lambda_key(lam):
    if isinstance(lam, complex):
        return (round(lam.real, 9), round(lam.imag, 9))
    return (lam, 0)


def _roots_of(p: Polynomial, mode: Mode, tol: float) -> list:
    if p.degree < 1:
        return []
    if mode is Mode.EXACT:
        return sorted(set(rational_roots(p)))
    return complex_roots(p)


def _local_tolerance(potentials, lam, tol: float) -> float:
    # numeric residuals scale with |coefficients| * |lambda|^degree
    if not isinstance(lam, complex):
        return tol
    size = max(abs(lam), 1.0)
    bound = max(
        (float(abs(c)) * size ** i for p in potentials for i, c in enumerate(p.coeffs)),
        default=0.0,
    )
    return tol * (1.0 + bound)


def build_entry(
    d: DynkinDiagram,
    potentials: Potentials,
    rho: DimVector,
    lam,
    mode: Mode = Mode.EXACT,
    tol: float = NUMERIC_TOLERANCE,
) -> ClassificationEntry:
    """The simple representation of dimension rho at eigenvalue lam, verified."""
    word, base = reflection_word(d, rho)
    base_potentials = apply_word_to_potentials(d, tuple(reversed(word)), potentials)
    local_tol = _local_tolerance(potentials, lam, tol)

    seed_rep = concentrated_simple(d, base, lam, base_potentials, mode, local_tol)
    result = apply_word(seed_rep, word, base_potentials, local_tol)
    rep = result.rep

    if tuple(result.potentials) != tuple(potentials):
        raise VerificationError(f"potentials did not return along the word for {rho}")
    if rep.dims != rho:
        raise VerificationError(f"constructed dimensions {rep.dims} differ from root {rho}")
    report = check_relations(rep, potentials, local_tol)
    if not report.holds:
        raise VerificationError(f"relations fail for {rho} at {format_scalar(lam)}: {', '.join(report.failing())}")
    if not is_zero_scalar(trace_identity_residual(rep, potentials), local_tol):
        raise VerificationError(f"trace identity fails for {rho} at {format_scalar(lam)}")
    if not is_simple(rep, tol=local_tol):
        raise VerificationError(f"representation for {rho} at {format_scalar(lam)} is not simple")

    curve_class = tuple((v, m) for v, m in enumerate(rho, start=1) if m)
    return ClassificationEntry(rho, rep.lam, rep, word, base, curve_class, support_type(d, rho))


def _build_entry_task(args) -> ClassificationEntry:
    return build_entry(*args)


def enumerate_simples(
    d: DynkinDiagram,
    potentials,
    mode: Mode = Mode.EXACT,
    tol: float = NUMERIC_TOLERANCE,
    workers: int = 1,
) -> list[ClassificationEntry]:
    potentials = check_potentials(d, potentials)
    mode = Mode(mode)
    track("classify.start", diagram=d.label, mode=mode.value)

    star = check_star(d, potentials)
    if not star.holds:
        v = star.violations[0]
        track("classify.hypothesis_failed", check="star", pairs=len(star.violations))
        raise HypothesisError(
            f"condition (*) fails: roots {v.root} and {v.other} share a zero of {v.common}"
            f" ({len(star.violations)} pair(s) in total)"
        )
    simple = check_simple_roots(d, potentials)
    if not simple.holds:
        track("classify.hypothesis_failed", check="simple-roots", roots=len(simple.offenders))
        raise HypothesisError(f"multiple roots in the potential combinations of {list(simple.offenders)}")

    tasks = []
    for rho, p in b_gamma(d, potentials):
        for lam in _roots_of(p, mode, tol):
            tasks.append((d, potentials, rho, lam, mode, tol))
    logger.debug("%s: %d (root, lambda) pairs to build with %d worker(s)", d.label, len(tasks), workers)

    if workers > 1 and len(tasks) > 1:
        with Pool(workers) as pool:
            entries = pool.map(_build_entry_task, tasks)
    else:
        entries = [_build_entry_task(t) for t in tasks]

    entries.sort(key=lambda e: (e.root, _lambda_key(e.lam)))
    track("classify.finish", diagram=d.label, entries=len(entries))
    return entries


# ------------------------------
# Curves
# ------------------------------
@dataclass(frozen=True)
class FibrationSpec:
    diagram: DynkinDiagram
    t: TCoordinates

    def __post_init__(self):
        object.__setattr__(self, "t", check_t(self.diagram, self.t))

    @property
    def potentials(self) -> Potentials:
        return t_to_potentials(self.diagram, self.t)


@dataclass(frozen=True)
class CurveRecord:
    lam: Scalar
    root: DimVector
    config_type: str
    curve_class: tuple
    dims: DimVector
    condition: str

    @property
    def curve_label(self) -> str:
        return " + ".join(f"C{v}" if m == 1 else f"{m}*C{v}" for v, m in self.curve_class)


def _same(a, b, tol: float) -> bool:
    return is_zero_scalar(a - b, tol)


def coincidence_condition(f: FibrationSpec, lam, tol: float = NUMERIC_TOLERANCE) -> str:
    """Which t-coordinates meet at lam, e.g. "t1=t3!=t2"."""
    values = [poly_eval(t, lam) for t in f.t]
    labels = [f"t{i}" for i in range(1, len(values) + 1)]

    if f.diagram.family is Family.A:
        classes: list[list[int]] = []
        for i, v in enumerate(values):
            for cls in classes:
                if _same(values[cls[0]], v, tol):
                    cls.append(i)
                    break
            else:
                classes.append([i])
        if all(len(c) == 1 for c in classes):
            return "generic"
        merged = [c for c in classes if len(c) > 1]
        rest = [c for c in classes if len(c) == 1]
        return "!=".join("=".join(labels[i] for i in c) for c in merged + rest)

    relations = []
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            if _same(values[i], values[j], tol):
                relations.append(f"{labels[i]}={labels[j]}")
            if f.diagram.family is Family.D and _same(values[i], -values[j], tol):
                relations.append(f"{labels[i]}=-{labels[j]}")
    return ", ".join(relations) or "generic"


def classify_curves(
    f: FibrationSpec,
    mode: Mode = Mode.EXACT,
    tol: float = NUMERIC_TOLERANCE,
    workers: int = 1,
) -> list[CurveRecord]:
    potentials = f.potentials
    entries = enumerate_simples(f.diagram, potentials, mode, tol, workers)
    records = []
    for e in entries:
        value = poly_eval(root_potential(e.root, potentials), e.lam)
        local_tol = _local_tolerance(potentials, e.lam, tol)
        if not is_zero_scalar(value, local_tol):
            raise VerificationError(f"{format_scalar(e.lam)} is off the discriminant component of {e.root}")
        records.append(
            CurveRecord(
                lam=e.lam,
                root=e.root,
                config_type=e.config_type,
                curve_class=e.curve_class,
                dims=e.rep.dims,
                condition=coincidence_condition(f, e.lam, local_tol),
            )
        )
    return records


def group_by_root(records: list[CurveRecord]) -> list[tuple[DimVector, list]]:
    """Fibres of the record -> root map, ordered by root."""
    groups: dict[DimVector, list] = {}
    for r in records:
        groups.setdefault(r.root, []).append(r.lam)
    return [(root, sorted(lams, key=_lambda_key)) for root, lams in sorted(groups.items())]


# ------------------------------
# Threefold equations
# ------------------------------
THREEFOLD_VARIABLES = sp.symbols("x y z w")


def _poly(expr, gens=THREEFOLD_VARIABLES) -> sp.Poly:
    return sp.Poly(expr, *gens, domain=QQ)


def format_terms(poly: sp.Poly) -> list[str]:
    """One "c * v^a ..." string per term, highest total degree first."""
    names = [str(g) for g in poly.gens]
    out = []
    for exps, coeff in sorted(poly.terms(), key=lambda t: (-sum(t[0]), tuple(-a for a in t[0]))):
        if coeff == 0:
            continue
        mono = " ".join(f"{v}^{a}" for v, a in zip(names, exps) if a)
        out.append(f"{coeff} * {mono}" if mono else str(coeff))
    return out


def format_poly(poly: sp.Poly) -> str:
    return " + ".join(format_terms(poly)) or "0"


def linear_factors(f: FibrationSpec) -> list[sp.Expr]:
    """z + t_i(w) for each t-coordinate."""
    _, _, z, w = THREEFOLD_VARIABLES
    return [z + t.to_sympy().as_expr(w) for t in f.t]


def emit_threefold_equation(f: FibrationSpec) -> sp.Poly:
    d = f.diagram
    x, y, z, w = THREEFOLD_VARIABLES

    if d.family is Family.A:
        product = sp.expand(sp.Mul(*linear_factors(f)))
        if product.coeff(z, d.rank) != 0:
            raise VerificationError("z^n coefficient of the A-type equation does not vanish")
        return _poly(x * y - product)

    if d.family is Family.D:
        ts = [t.to_sympy().as_expr(w) for t in f.t]
        numerator = _poly(sp.Mul(*[z + t**2 for t in ts]) - sp.Mul(*[t**2 for t in ts]))
        quotient, remainder = numerator.div(_poly(z))
        if not remainder.is_zero:
            raise VerificationError("polynomial is not divisible by z")
        return _poly(x**2 + y**2 * z + 2 * sp.Mul(*ts) * y) + quotient

    raise UnsupportedError("unsupported: E-type epsilon coefficients not specified in source")


@dataclass(frozen=True)
class ChartRelation:
    lhs: sp.Poly
    rhs: sp.Poly

    def format(self) -> str:
        return f"{format_poly(self.lhs)} = {format_poly(self.rhs)}"


def chart_variables(n: int) -> tuple:
    return (
        THREEFOLD_VARIABLES
        + tuple(sp.Symbol(f"u{j}") for j in range(1, n + 1))
        + tuple(sp.Symbol(f"v{j}") for j in range(1, n + 1))
    )


def emit_resolution_charts(f: FibrationSpec) -> list[ChartRelation]:
    """x v_j = u_j prod_{i<=j}(z + t_i), then prod_{k<i<=j}(z + t_i) u_j v_k = u_k v_j for k < j."""
    d = f.diagram
    if d.family is not Family.A:
        raise UnsupportedError(f"unsupported: resolution charts are only available for A-type, got {d.label}")

    n = d.rank
    gens = chart_variables(n)
    x = gens[0]
    u = {j: sp.Symbol(f"u{j}") for j in range(1, n + 1)}
    v = {j: sp.Symbol(f"v{j}") for j in range(1, n + 1)}
    factors = linear_factors(f)

    relations = []
    for j in range(1, n + 1):
        relations.append(ChartRelation(_poly(x * v[j], gens), _poly(u[j] * sp.Mul(*factors[:j]), gens)))
    for k in range(1, n + 1):
        for j in range(k + 1, n + 1):
            relations.append(
                ChartRelation(_poly(sp.Mul(*factors[k:j]) * u[j] * v[k], gens), _poly(u[k] * v[j], gens))
            )
    return relations
