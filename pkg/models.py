from dataclasses import dataclass, field
from datetime import datetime
from math import gcd
from typing import Dict, List, Optional, Tuple

from errors import ToricError

# Domain models shared by the services, commands and repositories. Geometric
# values are frozen so they can be hashed, cached and shipped to worker
# processes; reports are plain mutable dataclasses.

IntVector = Tuple[int, ...]
IntMatrix = Tuple[Tuple[int, ...], ...]
Cone = Tuple[int, ...]


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    invariant_factors: Tuple[int, ...]


@dataclass(frozen=True)
class FacetInequality:
    """The half-space {x : <normal, x> >= -offset}."""
    normal: IntVector
    offset: int

    def value(self, x: IntVector) -> int:
        return sum(a * b for a, b in zip(self.normal, x)) + self.offset


@dataclass(frozen=True)
class AffineChart:
    """Saturated lattice coordinates on the affine span of a point set.

    A point x of the span has chart coordinates ((x - base) . projector) and
    lifts back as base + y . basis.
    """
    base: IntVector
    basis: IntMatrix
    projector: IntMatrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, x: IntVector) -> IntVector:
        diff = [a - b for a, b in zip(x, self.base)]
        return tuple(
            sum(diff[i] * self.projector[i][j] for i in range(len(diff)))
            for j in range(self.dim)
        )

    def lift(self, y: IntVector) -> IntVector:
        return tuple(
            self.base[i] + sum(y[j] * self.basis[j][i] for j in range(self.dim))
            for i in range(len(self.base))
        )


@dataclass(frozen=True)
class LatticePolytope:
    vertices: Tuple[IntVector, ...]
    ambient_dim: int
    dim: int
    facets: Tuple[FacetInequality, ...] = ()
    chart: Optional[AffineChart] = None
    relative: Optional["LatticePolytope"] = None
    # Memoized derived data (lattice points, normal form). Filled idempotently.
    _cache: Dict[str, object] = field(
        default_factory=dict, compare=False, hash=False, repr=False
    )

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.ambient_dim

    def __getstate__(self):
        # Caches stay local to the process that computed them.
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)


@dataclass(frozen=True)
class NormalFormKey:
    canonical_matrix: IntMatrix
    digest: str


@dataclass(frozen=True)
class Fan:
    rank: int
    rays: Tuple[IntVector, ...]
    max_cones: Tuple[Cone, ...]


@dataclass(frozen=True)
class WeightSystem:
    weights: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.weights) < 2:
            raise ToricError("a weight system needs at least two weights")
        if any(a <= 0 for a in self.weights):
            raise ToricError(f"weights must be positive: {self.weights}")
        g = 0
        for a in self.weights:
            g = gcd(g, a)
        if g != 1:
            raise ToricError(f"weights {self.weights} have gcd {g}, expected 1")

    @property
    def degree(self) -> int:
        return sum(self.weights)

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.weights) + ")"


@dataclass(frozen=True)
class MonomialSet:
    points: Tuple[IntVector, ...]
    fan: Fan


@dataclass
class QuasismoothVerdict:
    quasismooth: bool
    violating: Optional[Tuple[int, ...]] = None
    subsets_checked: int = 0


@dataclass(frozen=True)
class PairingCertificate:
    role: str
    m: IntVector
    n: IntVector
    value: int


@dataclass
class EquivalenceWitness:
    common_polytope: LatticePolytope
    containments: List[PairingCertificate]
    resolved_fans: Optional[Tuple[Fan, Fan]] = None


@dataclass
class MirrorDatum:
    mirror_rays: Tuple[IntVector, ...]
    mirror_monomials: Tuple[IntVector, ...]
    primitivized: Tuple[IntVector, ...] = ()
    dropped_origin: bool = False


@dataclass(frozen=True)
class BHKResult:
    weights: WeightSystem
    degree: int
    calabi_yau: bool


@dataclass(frozen=True)
class ReidEntry:
    number: int
    weights: WeightSystem
    picard_label: str
    external_index: int


@dataclass
class ReidCheck:
    number: int
    reflexive: bool
    quasismooth: bool
    violating: Optional[Tuple[int, ...]]
    gorenstein: bool
    nabla_reflexive: bool
    common_variable: Optional[int]
    lattice_points: int
    vertices: int


@dataclass
class ReidReport:
    checks: List[ReidCheck]
    failures: List[str]

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class ReidClassification:
    groups: List[Tuple[int, ...]]
    # normal-form digest -> class id (smallest member)
    class_of_digest: Dict[str, int]

    @property
    def duplicate_groups(self) -> List[Tuple[int, ...]]:
        return [g for g in self.groups if len(g) > 1]


@dataclass
class SubpolytopeRecord:
    point_set: Tuple[IntVector, ...]
    nf: Optional[NormalFormKey] = None
    reid_class: Optional[int] = None


@dataclass
class MatchReport:
    matched_hulls: int
    families_covered: Tuple[int, ...]
    picard_labels: Tuple[str, ...]
    class_counts: Dict[int, int]
    examples: Dict[int, Tuple[IntVector, ...]]


@dataclass
class KSDatabase:
    dimension: int
    polytopes: List[LatticePolytope]


@dataclass
class AuditEvent:
    event_type: str
    payload: str
    created_at: Optional[datetime] = None
