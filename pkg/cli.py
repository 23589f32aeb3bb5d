import functools
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import click

import db
import report
from classify import (
    FibrationSpec,
    check_star,
    classify_curves,
    count_irrational_roots,
    emit_resolution_charts,
    emit_threefold_equation,
    enumerate_simples,
    group_by_root,
)
from config import Settings, load_settings
from dynkin import DynkinDiagram, build_diagram, check_potentials, check_t, t_to_potentials
from errors import ConvergenceError, HypothesisError, InputError, UnsupportedError
from exactnum import Mode, Polynomial
from monitoring import configure_logging, init_sentry, report_exception, track
from reflection import check_double_reflection, reflect
from representation import are_isomorphic, check_relations, rep_from_json, rep_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


# --------------------
# Job specs
# --------------------
@dataclass(frozen=True)
class JobSpec:
    diagram: DynkinDiagram
    potentials: tuple | None = None
    t_functions: tuple | None = None
    mode: str | None = None
    tolerance: float | None = None
    seed: int | None = None

    def require_potentials(self):
        if self.potentials is not None:
            return self.potentials
        if self.t_functions is not None:
            return t_to_potentials(self.diagram, self.t_functions)
        raise InputError("job needs 'potentials' or 't_functions'")

    def require_fibration(self) -> FibrationSpec:
        if self.t_functions is None:
            raise InputError("this command needs 't_functions' in the job")
        return FibrationSpec(self.diagram, self.t_functions)


def _polynomials(raw, name: str) -> tuple:
    if not isinstance(raw, list) or any(not isinstance(p, list) for p in raw):
        raise InputError(f"'{name}' must be a list of coefficient lists")
    return tuple(Polynomial(tuple(p)) for p in raw)


def load_job_spec(data: dict, require_functions: bool = True) -> JobSpec:
    if not isinstance(data, dict):
        raise InputError("job spec must be a JSON object")
    try:
        diagram = build_diagram(data["diagram"]["family"], data["diagram"]["rank"])
    except (KeyError, TypeError):
        raise InputError("job spec needs diagram.family and diagram.rank")

    has_p, has_t = "potentials" in data, "t_functions" in data
    if has_p and has_t:
        raise InputError("give exactly one of 'potentials' and 't_functions'")
    if require_functions and not (has_p or has_t):
        raise InputError("give exactly one of 'potentials' and 't_functions'")

    potentials = check_potentials(diagram, _polynomials(data["potentials"], "potentials")) if has_p else None
    t_functions = check_t(diagram, _polynomials(data["t_functions"], "t_functions")) if has_t else None

    mode = data.get("mode")
    if mode is not None and mode not in ("exact", "numeric"):
        raise InputError(f"mode must be 'exact' or 'numeric', got {mode!r}")
    tolerance = data.get("tolerance")
    if tolerance is not None and (not isinstance(tolerance, (int, float)) or tolerance <= 0):
        raise InputError("tolerance must be a positive number")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise InputError("seed must be an integer")

    return JobSpec(diagram, potentials, t_functions, mode, tolerance, seed)


def _read_json(stream) -> dict:
    try:
        return json.load(stream)
    except json.JSONDecodeError as e:
        raise InputError(f"{getattr(stream, 'name', 'input')}: invalid JSON ({e.msg} at line {e.lineno})")


@dataclass(frozen=True)
class RunOptions:
    mode: Mode
    tolerance: float
    seed: int
    workers: int


def _resolve(settings: Settings, job: JobSpec, mode, tolerance, seed) -> RunOptions:
    # flags override the job file, which overrides the environment
    return RunOptions(
        mode=Mode(mode or job.mode or settings.mode),
        tolerance=tolerance or job.tolerance or settings.tolerance,
        seed=seed if seed is not None else job.seed if job.seed is not None else settings.seed,
        workers=settings.workers,
    )


# --------------------
# Error mapping
# --------------------
def _fail(ctx, message: str, code: int):
    click.echo(f"error: {message}", err=True)
    ctx.exit(code)


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return fn(*args, **kwargs)
        except click.exceptions.Exit:
            raise
        except UnsupportedError as e:
            _fail(ctx, str(e), EXIT_UNSUPPORTED)
        except InputError as e:
            _fail(ctx, str(e), EXIT_INPUT)
        except HypothesisError as e:
            track("hypothesis_failed", command=ctx.info_name, error=type(e).__name__)
            _fail(ctx, str(e), EXIT_HYPOTHESIS)
        except ConvergenceError as e:
            _fail(ctx, str(e), EXIT_HYPOTHESIS)
        except RuntimeError as e:
            # configuration errors from config.load_settings
            _fail(ctx, str(e), EXIT_INPUT)
    return wrapper


def _settings(ctx) -> Settings:
    if ctx.obj is None:
        ctx.obj = load_settings()
    return ctx.obj


def _emit(text: str, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _cached(settings: Settings, payload: dict, verb: str, compute):
    if settings.cache_db is None:
        return compute()

    conn = db.get_db(settings.cache_db)
    try:
        db.init_db(conn)
        db.evict_old_entries(conn, days=settings.cache_days)
        key = db.job_input_hash(payload)
        hit = db.get_cached_output(conn, key)
        if hit is not None:
            track("cache_hit", verb=verb)
            return hit
        track("cache_miss", verb=verb)
        text = compute()
        db.store_output(conn, key, text, verb)
        return text
    finally:
        conn.close()


# --------------------
# Options
# --------------------
def job_options(fn):
    fn = click.option("--input", "input_file", type=click.File("r"), required=True,
                      help="Job spec JSON ('-' for stdin).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(report.FORMATS), default="ascii", show_default=True)(fn)
    fn = click.option("--mode", type=click.Choice(["exact", "numeric"]), default=None)(fn)
    fn = click.option("--tolerance", type=float, default=None)(fn)
    fn = click.option("--seed", type=int, default=None)(fn)
    fn = click.option("--output", type=click.Path(dir_okay=False), default=None)(fn)
    return fn


@click.group()
def cli():
    """N=1 ADE quiver toolkit."""


@cli.command()
@job_options
@handle_errors
def roots(input_file, fmt, mode, tolerance, seed, output):
    """Positive roots, by height then lexicographically."""
    job = load_job_spec(_read_json(input_file), require_functions=False)
    _emit(report.roots_table(job.diagram, fmt), output)


@cli.command()
@job_options
@click.option("--rep", "rep_file", type=click.File("r"), required=True)
@handle_errors
def check(input_file, fmt, mode, tolerance, seed, output, rep_file):
    """Check the relations of a representation file."""
    ctx = click.get_current_context()
    job = load_job_spec(_read_json(input_file))
    opts = _resolve(_settings(ctx), job, mode, tolerance, seed)
    rep = rep_from_json(_read_json(rep_file), opts.mode)
    if rep.diagram != job.diagram:
        raise InputError(f"representation is on {rep.diagram.label}, job is on {job.diagram.label}")

    result = check_relations(rep, job.require_potentials(), opts.tolerance)
    _emit(report.relation_summary(result), output)
    if not result.holds:
        ctx.exit(EXIT_HYPOTHESIS)


def _potentials_json(potentials) -> list:
    return [p.to_strings() for p in potentials]


@cli.command(name="reflect")
@job_options
@click.option("--rep", "rep_file", type=click.File("r"), required=True)
@click.option("--vertex", type=int, required=True)
@handle_errors
def reflect_cmd(input_file, fmt, mode, tolerance, seed, output, rep_file, vertex):
    """Apply the reflection functor at --vertex."""
    ctx = click.get_current_context()
    job = load_job_spec(_read_json(input_file))
    opts = _resolve(_settings(ctx), job, mode, tolerance, seed)
    rep = rep_from_json(_read_json(rep_file), opts.mode)
    potentials = job.require_potentials()

    result = reflect(rep, vertex, potentials, opts.tolerance)
    try:
        back = reflect(result.rep, vertex, result.potentials, opts.tolerance)
        isomorphic = are_isomorphic(back.rep, rep, seed=opts.seed, tol=opts.tolerance)
        check_double_reflection(rep, vertex, potentials, opts.tolerance)
    except HypothesisError as e:
        logger.warning("double reflection at vertex %s failed: %s", vertex, e)
        isomorphic = False

    doc = {
        "rep": rep_to_json(result.rep),
        "potentials": _potentials_json(result.potentials),
        "double_reflection_isomorphic": isomorphic,
    }
    _emit(json.dumps(doc, indent=2) + "\n", output)


@cli.command()
@job_options
@handle_errors
def classify(input_file, fmt, mode, tolerance, seed, output):
    """All simple representations, one row per (root, lambda)."""
    ctx = click.get_current_context()
    raw = _read_json(input_file)
    job = load_job_spec(raw)
    settings = _settings(ctx)
    opts = _resolve(settings, job, mode, tolerance, seed)
    potentials = job.require_potentials()

    def irrational_note() -> str:
        if opts.mode is not Mode.EXACT:
            return ""
        return report.irrational_summary(count_irrational_roots(job.diagram, potentials))

    def compute():
        entries = enumerate_simples(job.diagram, potentials, opts.mode, opts.tolerance, opts.workers)
        text = report.entries_table(entries, fmt)
        note = irrational_note() if fmt == "ascii" else ""
        return text + note + "\n" if note else text

    payload = {"verb": "classify", "job": raw, "format": fmt, "mode": opts.mode.value,
               "tolerance": opts.tolerance}
    _emit(_cached(settings, payload, "classify", compute), output)
    # outside the cache: json and csv report it on stderr every run
    if fmt != "ascii":
        note = irrational_note()
        if note:
            click.echo(note, err=True)


@cli.command()
@job_options
@click.option("--by-root", is_flag=True, help="Group the curve records by root.")
@handle_errors
def curves(input_file, fmt, mode, tolerance, seed, output, by_root):
    """Curve configurations over the fibration: (lambda, root, type, class).

    The configuration type is the Dynkin type of the support of the root.
    """
    ctx = click.get_current_context()
    raw = _read_json(input_file)
    job = load_job_spec(raw)
    settings = _settings(ctx)
    opts = _resolve(settings, job, mode, tolerance, seed)
    fibration = job.require_fibration()

    def compute():
        records = classify_curves(fibration, opts.mode, opts.tolerance, opts.workers)
        if by_root:
            return report.groups_table(group_by_root(records), fmt)
        return report.curves_table(records, fmt)

    payload = {"verb": "curves", "job": raw, "format": fmt, "mode": opts.mode.value,
               "tolerance": opts.tolerance, "by_root": by_root}
    _emit(_cached(settings, payload, "curves", compute), output)


@cli.command()
@job_options
@handle_errors
def star(input_file, fmt, mode, tolerance, seed, output):
    """Condition (*) over pairs of positive roots."""
    ctx = click.get_current_context()
    job = load_job_spec(_read_json(input_file))
    result = check_star(job.diagram, job.require_potentials())
    _emit(report.star_table(result, fmt), output)
    if not result.holds:
        ctx.exit(EXIT_HYPOTHESIS)


@cli.command()
@job_options
@handle_errors
def equation(input_file, fmt, mode, tolerance, seed, output):
    """Threefold equation of the fibration (A and D families)."""
    job = load_job_spec(_read_json(input_file))
    _emit(report.equation_text(emit_threefold_equation(job.require_fibration())), output)


@cli.command()
@job_options
@handle_errors
def charts(input_file, fmt, mode, tolerance, seed, output):
    """Resolution chart relations (A family)."""
    job = load_job_spec(_read_json(input_file))
    _emit(report.charts_text(emit_resolution_charts(job.require_fibration())), output)


def main():
    try:
        settings = load_settings()
    except RuntimeError as e:
        click.echo(f"error: {e}", err=True)
        raise SystemExit(EXIT_INPUT)

    configure_logging(settings.log_level)
    init_sentry()
    try:
        cli.main(obj=settings, standalone_mode=True)
    except Exception as e:
        report_exception(e)
        raise


if __name__ == "__main__":
    main()
