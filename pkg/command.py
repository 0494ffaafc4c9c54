"""
Command Pattern:
Each CLI subcommand is a Command with an execute() method. Commands read
their input files, call the services and keep the outcome on self.result;
the console layer only parses arguments and prints. Every command records an
audit event when it finishes.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, List, Optional, Tuple

from db import init_schema
from errors import ReflexKitError
from models import (
    BHKResult,
    EquivalenceWitness,
    Fan,
    LatticePolytope,
    MatchReport,
    MirrorDatum,
    QuasismoothVerdict,
    ReidClassification,
    ReidReport,
    SubpolytopeRecord,
)
from repositories import AuditRepo, CacheRepo
from services.enumeration_service import (
    class_count,
    enumerate_reflexive_subpolytopes,
    match_reid,
    quartic_polytope,
)
from services.fan_service import nabla, star_resolution
from services.ksdb_service import check_reid, external_index, ingest
from services.mirror_service import (
    bhk_dual_group,
    bhk_transpose,
    clarke_mirror,
    equivalence_witness,
    mirror_fan,
)
from services.palp_service import parse_matrix, read_fan, read_points
from services.polytope_service import (
    convex_hull,
    is_isomorphic,
    is_reflexive,
    lattice_points,
    normal_form,
    origin_interior,
    polar_lattice_hull,
)
from services.reid_service import classify_reid, reid_table, verify_reid
from services.toric_service import anticanonical_points, is_quasismooth, monomial_set, parse_weights, wps_fan

POLYTOPE_QUERIES = ("points", "polar", "reflexive", "nf")


class Command(ABC):
    result: Any = None

    @abstractmethod
    def execute(self) -> None:
        ...


class PolytopeQueryCommand(Command):
    def __init__(self, path: Path, query: str) -> None:
        if query not in POLYTOPE_QUERIES:
            raise ReflexKitError(f"unknown polytope query {query!r}")
        self.path = path
        self.query = query

    def execute(self) -> None:
        P = convex_hull(read_points(self.path))
        if self.query == "points":
            self.result = lattice_points(P)
        elif self.query == "polar":
            self.result = polar_lattice_hull(P)
        elif self.query == "reflexive":
            self.result = origin_interior(P) and is_reflexive(P)
        else:
            self.result = normal_form(P)
        AuditRepo.record_event("POLYTOPE_QUERY", f"query={self.query};path={self.path}")


class PolytopeIsoCommand(Command):
    def __init__(self, path1: Path, path2: Path) -> None:
        self.path1 = path1
        self.path2 = path2

    def execute(self) -> None:
        P = convex_hull(read_points(self.path1))
        Q = convex_hull(read_points(self.path2))
        self.result = is_isomorphic(P, Q)
        AuditRepo.record_event(
            "POLYTOPE_ISO", f"left={self.path1};right={self.path2};isomorphic={self.result}"
        )


class WpsDeltaCommand(Command):
    def __init__(self, weights: str) -> None:
        self.weights = parse_weights(weights)

    def execute(self) -> None:
        self.result: LatticePolytope = polar_lattice_hull(nabla(wps_fan(self.weights)))
        AuditRepo.record_event(
            "WPS_DELTA", f"weights={self.weights};vertices={len(self.result.vertices)}"
        )


class WpsQuasismoothCommand(Command):
    def __init__(self, weights: str, xi_path: Optional[Path] = None) -> None:
        self.weights = parse_weights(weights)
        self.xi_path = xi_path

    def execute(self) -> None:
        F = wps_fan(self.weights)
        if self.xi_path is None:
            xi = anticanonical_points(F)
        else:
            xi = monomial_set(read_points(self.xi_path), F)
        self.result: QuasismoothVerdict = is_quasismooth(xi)
        AuditRepo.record_event(
            "WPS_QUASISMOOTH",
            f"weights={self.weights};quasismooth={self.result.quasismooth}",
        )


class ReidVerifyCommand(Command):
    def __init__(self, data_dir: Optional[Path] = None, jobs: int = 1, progress: bool = False) -> None:
        self.data_dir = data_dir
        self.jobs = jobs
        self.progress = progress

    def execute(self) -> None:
        self.result: ReidReport = verify_reid(
            reid_table(self.data_dir), jobs=self.jobs, progress=self.progress
        )
        AuditRepo.record_event(
            "REID_VERIFY",
            f"entries={len(self.result.checks)};failures={len(self.result.failures)}",
        )


class ReidClassifyCommand(Command):
    def __init__(self, data_dir: Optional[Path] = None, jobs: int = 1, progress: bool = False) -> None:
        self.data_dir = data_dir
        self.jobs = jobs
        self.progress = progress

    def execute(self) -> None:
        self.result: ReidClassification = classify_reid(
            reid_table(self.data_dir), jobs=self.jobs, progress=self.progress
        )
        AuditRepo.record_event("REID_CLASSIFY", f"classes={len(self.result.groups)}")


class QuarticsEnumerateCommand(Command):
    """
    Sets self.result to the sorted subpolytope records and self.classes to
    the number of distinct normal forms among them.
    """

    def __init__(self, cache: Optional[CacheRepo], jobs: int = 1, progress: bool = False) -> None:
        self.cache = cache
        self.jobs = jobs
        self.progress = progress
        self.classes = 0

    def execute(self) -> None:
        self.result: List[SubpolytopeRecord] = enumerate_reflexive_subpolytopes(
            quartic_polytope(), jobs=self.jobs, cache=self.cache, progress=self.progress
        )
        self.classes = class_count(self.result)
        AuditRepo.record_event(
            "QUARTICS_ENUMERATE", f"hulls={len(self.result)};classes={self.classes}"
        )


class QuarticsMatchReidCommand(Command):
    def __init__(
        self, cache: Optional[CacheRepo], data_dir: Optional[Path] = None,
        jobs: int = 1, progress: bool = False,
    ) -> None:
        self.cache = cache
        self.data_dir = data_dir
        self.jobs = jobs
        self.progress = progress

    def execute(self) -> None:
        table = reid_table(self.data_dir)
        classification = classify_reid(table, jobs=self.jobs, progress=self.progress)
        records = enumerate_reflexive_subpolytopes(
            quartic_polytope(), jobs=self.jobs, cache=self.cache, progress=self.progress
        )
        self.result: MatchReport = match_reid(records, classification, table)
        AuditRepo.record_event(
            "QUARTICS_MATCH_REID",
            f"matched={self.result.matched_hulls};families={len(self.result.families_covered)};"
            f"picard={len(self.result.picard_labels)}",
        )


class MirrorClarkeCommand(Command):
    def __init__(self, fan_path: Path, xi_path: Path) -> None:
        self.fan_path = fan_path
        self.xi_path = xi_path
        self.fan: Optional[Fan] = None

    def execute(self) -> None:
        F = read_fan(self.fan_path)
        self.result: MirrorDatum = clarke_mirror(F, read_points(self.xi_path))
        self.fan = mirror_fan(self.result)
        AuditRepo.record_event(
            "MIRROR_CLARKE",
            f"fan={self.fan_path};rays={len(self.result.mirror_rays)};"
            f"primitivized={len(self.result.primitivized)}",
        )


class MirrorBhkCommand(Command):
    """self.result = (BHK report for A, report for A^T, dual group as (free rank, torsion))."""

    def __init__(self, matrix_path: Path) -> None:
        self.matrix_path = matrix_path

    def execute(self) -> None:
        A = parse_matrix(Path(self.matrix_path).read_text(encoding="utf-8"))
        forward, dual = bhk_transpose(A)
        self.result: Tuple[BHKResult, BHKResult, Tuple[int, Tuple[int, ...]]] = (
            forward, dual, bhk_dual_group(A)
        )
        AuditRepo.record_event(
            "MIRROR_BHK", f"matrix={self.matrix_path};calabi_yau={forward.calabi_yau}"
        )


class ResolveCommand(Command):
    def __init__(self, fan_path: Path, delta_path: Path) -> None:
        self.fan_path = fan_path
        self.delta_path = delta_path

    def execute(self) -> None:
        F = read_fan(self.fan_path)
        Delta = convex_hull(read_points(self.delta_path))
        self.result: Fan = star_resolution(F, Delta)
        AuditRepo.record_event(
            "RESOLVE", f"fan={self.fan_path};rays={len(self.result.rays)};cones={len(self.result.max_cones)}"
        )


class WitnessCommand(Command):
    def __init__(self, fan1: Path, fan2: Path, xi_path: Path, materialize: bool = False) -> None:
        self.fan1 = fan1
        self.fan2 = fan2
        self.xi_path = xi_path
        self.materialize = materialize

    def execute(self) -> None:
        self.result: EquivalenceWitness = equivalence_witness(
            read_fan(self.fan1), read_fan(self.fan2), read_points(self.xi_path),
            materialize=self.materialize,
        )
        AuditRepo.record_event(
            "WITNESS",
            f"fan1={self.fan1};fan2={self.fan2};certificates={len(self.result.containments)}",
        )


class KsdbIngestCommand(Command):
    def __init__(self, source: str, cache: CacheRepo, dimension: int = 3, progress: bool = False) -> None:
        self.source = source
        self.cache = cache
        self.dimension = dimension
        self.progress = progress

    def execute(self) -> None:
        self.result: int = ingest(self.source, self.cache, dimension=self.dimension, progress=self.progress)
        AuditRepo.record_event("KSDB_INGEST", f"source={self.source};count={self.result}")


class KsdbIndexCommand(Command):
    def __init__(self, path: Path, cache: CacheRepo) -> None:
        self.path = path
        self.cache = cache

    def execute(self) -> None:
        self.result: Optional[int] = external_index(convex_hull(read_points(self.path)), self.cache)
        AuditRepo.record_event("KSDB_INDEX", f"path={self.path};index={self.result}")


class KsdbCheckReidCommand(Command):
    def __init__(self, cache: CacheRepo, data_dir: Optional[Path] = None) -> None:
        self.cache = cache
        self.data_dir = data_dir

    def execute(self) -> None:
        self.result = check_reid(reid_table(self.data_dir), self.cache)
        agree, mismatch = self.result
        AuditRepo.record_event("KSDB_CHECK_REID", f"agree={len(agree)};mismatch={len(mismatch)}")


class InitDbCommand(Command):
    def __init__(self, dsn: Optional[str]) -> None:
        self.dsn = dsn

    def execute(self) -> None:
        init_schema(self.dsn)
        self.result = True
        AuditRepo.record_event("INIT_DB", "schema=kv_store,audit_log")
