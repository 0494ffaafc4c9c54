"""
Entry point for the command-line interface. Parses arguments, builds the
configured cache and emitter, and delegates the actual work to Command
objects.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import requests
import typer

from command import (
    Command,
    InitDbCommand,
    KsdbCheckReidCommand,
    KsdbIndexCommand,
    KsdbIngestCommand,
    MirrorBhkCommand,
    MirrorClarkeCommand,
    PolytopeIsoCommand,
    PolytopeQueryCommand,
    QuarticsEnumerateCommand,
    QuarticsMatchReidCommand,
    ReidClassifyCommand,
    ReidVerifyCommand,
    ResolveCommand,
    WitnessCommand,
    WpsDeltaCommand,
    WpsQuasismoothCommand,
)
from config import AppConfig, load_config
from emitter import Emitter, EmitterFactory
from errors import ReflexKitError
from repositories import AuditRepo, CacheRepo, CacheStoreFactory, FileKeyValueStore
from services.linalg_service import transpose
from services.palp_service import emit_fan, emit_palp, emit_polytope

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Reflexive polytope and toric mirror toolkit.")
polytope_app = typer.Typer(no_args_is_help=True, help="Lattice polytope queries.")
wps_app = typer.Typer(no_args_is_help=True, help="Weighted projective spaces.")
reid_app = typer.Typer(no_args_is_help=True, help="Reid's 95 weighted projective 3-spaces.")
quartics_app = typer.Typer(no_args_is_help=True, help="Sub-linear-systems of quartics in P^3.")
mirror_app = typer.Typer(no_args_is_help=True, help="Clarke and BHK mirrors.")
ksdb_app = typer.Typer(no_args_is_help=True, help="Optional classification database.")
app.add_typer(polytope_app, name="polytope")
app.add_typer(wps_app, name="wps")
app.add_typer(reid_app, name="reid")
app.add_typer(quartics_app, name="quartics")
app.add_typer(mirror_app, name="mirror")
app.add_typer(ksdb_app, name="ksdb")

_state = {"config": None, "emitter": None, "quiet": False}


def _config() -> AppConfig:
    if _state["config"] is None:
        _state["config"] = load_config()
    return _state["config"]


def _emitter() -> Emitter:
    if _state["emitter"] is None:
        _state["emitter"] = EmitterFactory.create(_config().output_format)
    return _state["emitter"]


def _progress() -> bool:
    return not _state["quiet"] and sys.stderr.isatty()


def _fail(message: str) -> None:
    typer.echo(f"error: {message}", err=True)
    raise typer.Exit(code=1)


def _run(cmd: Command) -> Command:
    try:
        cmd.execute()
    except (ReflexKitError, requests.RequestException) as ex:
        logger.debug("command %s failed", cmd.__class__.__name__, exc_info=True)
        _fail(str(ex))
    return cmd


def _cache_repo(path: Optional[Path] = None) -> CacheRepo:
    cfg = _config()
    if path is not None and cfg.cache.backend == "file":
        return CacheRepo(FileKeyValueStore(path))
    return CacheRepo(CacheStoreFactory.create(cfg))


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging."),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="No progress bars, errors only."),
    output_format: Optional[str] = typer.Option(None, "--format", help="text or json (default RK_OUTPUT_FORMAT)."),
) -> None:
    try:
        cfg = load_config()
        if output_format is not None:
            cfg.output_format = output_format.lower()
        emitter = EmitterFactory.create(cfg.output_format)
    except ReflexKitError as ex:
        _fail(str(ex))
    level = "DEBUG" if verbose else ("ERROR" if quiet else cfg.log_level)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)
    _state.update(config=cfg, emitter=emitter, quiet=quiet)
    if cfg.audit:
        try:
            AuditRepo.configure(CacheStoreFactory.create(cfg))
        except ReflexKitError as ex:
            _fail(str(ex))
    else:
        AuditRepo.configure(None)


# ---------------------------------------------------------------- polytope

def _polytope_query(path: Path, query: str) -> None:
    cmd = _run(PolytopeQueryCommand(path, query))
    out = _emitter()
    if query == "points":
        out.record("lattice_points", len(cmd.result))
        for p in cmd.result:
            out.record("point", p)
    elif query == "polar":
        out.block("polar", emit_polytope(cmd.result))
    elif query == "reflexive":
        out.record("reflexive", cmd.result)
    else:
        out.block("nf", emit_palp(transpose(cmd.result.canonical_matrix), comment="normal form"))
        out.record("digest", cmd.result.digest)


@polytope_app.command("points")
def polytope_points(path: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    """Lattice points of the hull of the points in a PALP file."""
    _polytope_query(path, "points")


@polytope_app.command("polar")
def polytope_polar(path: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    """Hull of the lattice points of the polar polytope."""
    _polytope_query(path, "polar")


@polytope_app.command("reflexive")
def polytope_reflexive(path: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    _polytope_query(path, "reflexive")


@polytope_app.command("nf")
def polytope_nf(path: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    """Canonical vertex matrix and its digest."""
    _polytope_query(path, "nf")


@polytope_app.command("iso")
def polytope_iso(
    path1: Path = typer.Argument(..., exists=True, dir_okay=False),
    path2: Path = typer.Argument(..., exists=True, dir_okay=False),
) -> None:
    cmd = _run(PolytopeIsoCommand(path1, path2))
    _emitter().record("isomorphic", cmd.result)


# ---------------------------------------------------------------- wps

@wps_app.command("delta")
def wps_delta(weights: str = typer.Argument(..., help="Comma-separated weights, e.g. 1,1,1,3")) -> None:
    """Anticanonical polytope of P(weights)."""
    try:
        cmd = WpsDeltaCommand(weights)
    except ReflexKitError as ex:
        _fail(str(ex))
    _run(cmd)
    out = _emitter()
    out.record("weights", cmd.weights.weights)
    out.block("delta", emit_polytope(cmd.result))


@wps_app.command("quasismooth")
def wps_quasismooth(
    weights: str = typer.Argument(...),
    xi: Optional[Path] = typer.Option(None, "--xi", exists=True, dir_okay=False, help="PALP file of monomial points."),
) -> None:
    try:
        cmd = WpsQuasismoothCommand(weights, xi)
    except ReflexKitError as ex:
        _fail(str(ex))
    _run(cmd)
    verdict = cmd.result
    _emitter().record(
        "quasismooth", verdict.quasismooth,
        violating=verdict.violating, subsets=verdict.subsets_checked,
    )


# ---------------------------------------------------------------- reid

@reid_app.command("verify")
def reid_verify(jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1)) -> None:
    """Reflexive, quasismooth and Gorenstein checks for every entry."""
    cfg = _config()
    cmd = _run(ReidVerifyCommand(cfg.data_dir, jobs or cfg.jobs, _progress()))
    out = _emitter()
    for c in cmd.result.checks:
        out.record(
            "entry", c.number,
            reflexive=c.reflexive, quasismooth=c.quasismooth, gorenstein=c.gorenstein,
            nabla_reflexive=c.nabla_reflexive, points=c.lattice_points, vertices=c.vertices,
        )
    checks = cmd.result.checks
    out.record(
        "reid",
        entries=len(checks),
        reflexive=sum(c.reflexive for c in checks),
        quasismooth=sum(c.quasismooth for c in checks),
        gorenstein=sum(c.gorenstein for c in checks),
    )
    if not cmd.result.ok:
        for msg in cmd.result.failures:
            typer.echo(f"error: {msg}", err=True)
        raise typer.Exit(code=1)


@reid_app.command("classify")
def reid_classify(jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1)) -> None:
    """Group the entries by the normal form of their anticanonical polytope."""
    cfg = _config()
    cmd = _run(ReidClassifyCommand(cfg.data_dir, jobs or cfg.jobs, _progress()))
    out = _emitter()
    out.record("classes", len(cmd.result.groups))
    for g in cmd.result.duplicate_groups:
        out.record("group", g)


# ---------------------------------------------------------------- quartics

@quartics_app.command("enumerate")
def quartics_enumerate(
    cache: Optional[Path] = typer.Option(None, "--cache", help="Cache directory (file backend)."),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1),
    records: bool = typer.Option(True, "--records/--no-records", help="Print every hull."),
) -> None:
    """Reflexive 3-dimensional hulls inside the quartic polytope."""
    cfg = _config()
    cmd = _run(QuarticsEnumerateCommand(_cache_repo(cache), jobs or cfg.jobs, _progress()))
    out = _emitter()
    out.record("hulls", len(cmd.result))
    out.record("classes", cmd.classes)
    if records:
        for rec in cmd.result:
            out.record("hull", rec.point_set, digest=rec.nf.digest)


@quartics_app.command("match-reid")
def quartics_match_reid(
    cache: Optional[Path] = typer.Option(None, "--cache"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1),
) -> None:
    """Hulls whose normal form is the polytope of a Reid entry."""
    cfg = _config()
    cmd = _run(QuarticsMatchReidCommand(_cache_repo(cache), cfg.data_dir, jobs or cfg.jobs, _progress()))
    report = cmd.result
    out = _emitter()
    out.record("matched_hulls", report.matched_hulls)
    out.record("families", len(report.families_covered))
    out.record("picard_labels", len(report.picard_labels))
    for cid, count in report.class_counts.items():
        out.record("class", cid, hulls=count, example=report.examples[cid])


# ---------------------------------------------------------------- mirrors

@mirror_app.command("clarke")
def mirror_clarke(
    fan_file: Path = typer.Argument(..., exists=True, dir_okay=False),
    xi_file: Path = typer.Argument(..., exists=True, dir_okay=False),
) -> None:
    cmd = _run(MirrorClarkeCommand(fan_file, xi_file))
    datum = cmd.result
    out = _emitter()
    out.record("mirror_rays", datum.mirror_rays)
    out.record("mirror_monomials", datum.mirror_monomials)
    out.record("primitivized", datum.primitivized)
    out.record("dropped_origin", datum.dropped_origin)
    out.block("mirror_fan", emit_fan(cmd.fan))


@mirror_app.command("bhk")
def mirror_bhk(matrix_file: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    """Weights, CY flag, transpose weights and dual group of an exponent matrix."""
    cmd = _run(MirrorBhkCommand(matrix_file))
    forward, dual, (free, torsion) = cmd.result
    out = _emitter()
    out.record("weights", forward.weights.weights, degree=forward.degree, calabi_yau=forward.calabi_yau)
    out.record("transpose_weights", dual.weights.weights, degree=dual.degree, calabi_yau=dual.calabi_yau)
    out.record("dual_group", torsion, free=free)


# ---------------------------------------------------------------- resolutions

@app.command("resolve")
def resolve(
    fan_file: Path = typer.Argument(..., exists=True, dir_okay=False),
    delta_file: Path = typer.Argument(..., exists=True, dir_okay=False),
) -> None:
    """Star-subdivide a fan until its rays span Conv(Delta° ∩ N)."""
    cmd = _run(ResolveCommand(fan_file, delta_file))
    out = _emitter()
    out.record("rays", len(cmd.result.rays), cones=len(cmd.result.max_cones))
    out.block("fan", emit_fan(cmd.result))


@app.command("witness")
def witness(
    fan1: Path = typer.Argument(..., exists=True, dir_okay=False),
    fan2: Path = typer.Argument(..., exists=True, dir_okay=False),
    xi_file: Path = typer.Argument(..., exists=True, dir_okay=False),
    materialize: bool = typer.Option(False, "--materialize", help="Also build both resolved fans."),
) -> None:
    cmd = _run(WitnessCommand(fan1, fan2, xi_file, materialize))
    w = cmd.result
    out = _emitter()
    out.record(
        "witness", True,
        common_vertices=len(w.common_polytope.vertices),
        certificates=len(w.containments),
        materialized=w.resolved_fans is not None,
    )
    out.block("common_polytope", emit_polytope(w.common_polytope))


# ---------------------------------------------------------------- ksdb

@ksdb_app.command("ingest")
def ksdb_ingest(
    source: str = typer.Argument(..., help="File path or http(s) URL of a PALP polytope list."),
    dimension: int = typer.Option(3, "--dim", min=1, max=4),
) -> None:
    cmd = _run(KsdbIngestCommand(source, _cache_repo(), dimension, _progress()))
    _emitter().record("ingested", cmd.result)


@ksdb_app.command("index")
def ksdb_index(path: Path = typer.Argument(..., exists=True, dir_okay=False)) -> None:
    """0-based position of the polytope's class in the ingested database."""
    cmd = _run(KsdbIndexCommand(path, _cache_repo()))
    _emitter().record("index", cmd.result)


@ksdb_app.command("check-reid")
def ksdb_check_reid() -> None:
    """Compare tabulated external indices with the ingested database."""
    cmd = _run(KsdbCheckReidCommand(_cache_repo(), _config().data_dir))
    agree, mismatch = cmd.result
    out = _emitter()
    out.record("agree", len(agree), mismatch=len(mismatch))
    for number, (want, got) in sorted(mismatch.items()):
        out.record("mismatch", number, tabulated=want, found=got)


@app.command("init-db")
def init_db() -> None:
    """Create the PostgreSQL cache and audit tables."""
    cfg = _config()
    if cfg.cache.backend != "postgres":
        logger.warning("RK_CACHE_BACKEND is %s; creating the schema anyway", cfg.cache.backend)
    _run(InitDbCommand(cfg.db.dsn))
    _emitter().record("schema", "ready")
