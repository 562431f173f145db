import hashlib
import json
from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1"

# elements on the wire: integers for ℤ and finite groups, words like "aB" for free groups
JsonElement = Union[int, str]


class Verdict(str, Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNDECIDED = "undecided-at-scale"


EXIT_CODES = {Verdict.PROVED: 0, Verdict.REFUTED: 1, Verdict.UNDECIDED: 2}


def exit_code_for(verdict: Verdict) -> int:
    return EXIT_CODES[verdict]


class Scope(BaseModel):
    """Where a claim holds: everywhere, or on a finite window"""
    kind: Literal["exact", "window"] = "exact"
    radius: Optional[int] = None
    lo: Optional[int] = None
    hi: Optional[int] = None

    @staticmethod
    def exact() -> "Scope":
        return Scope(kind="exact")

    @staticmethod
    def ball(radius: int) -> "Scope":
        return Scope(kind="window", radius=radius)

    @staticmethod
    def interval(lo: int, hi: int) -> "Scope":
        return Scope(kind="window", lo=lo, hi=hi)

    def describe(self) -> str:
        if self.kind == "exact":
            return "exact"
        if self.radius is not None:
            return f"ball({self.radius})"
        return f"[{self.lo}, {self.hi}]"


class SyndeticWitness(BaseModel):
    """For every n-tuple K some f ∈ F has fK ⊆ A, at the stated scope"""
    kind: Literal["syndetic-witness"] = "syndetic-witness"
    n: int
    F: List[JsonElement]
    scope: Scope = Field(default_factory=Scope.exact)
    note: Optional[str] = None


class ThickRefutation(BaseModel):
    """Every f ∈ F sends some coordinate of ``tuple`` outside A; F = None stands for ball(radius)"""
    kind: Literal["thick-refutation"] = "thick-refutation"
    n: int
    radius: Optional[int] = None
    F: Optional[List[JsonElement]] = None
    tuple: List[JsonElement]
    scope: Scope = Field(default_factory=Scope.exact)


class ScsCertificate(BaseModel):
    """Partition certificate for strong complete syndeticity of a first-letter cylinder.

    ``cells[0]`` is the target cylinder; each cell is a union of cylinders, given as
    words. ``assignment[i]`` is the translate used when a multiset puts little weight
    on cell i: it must carry every other cell and every remainder word into the target.
    """
    kind: Literal["scs-certificate"] = "scs-certificate"
    epsilon: str
    n: int
    rank: int
    target: str
    cells: List[List[str]]
    remainder: List[str]
    F: List[str]
    assignment: List[str]

    @property
    def epsilon_fraction(self) -> Fraction:
        return Fraction(self.epsilon)


class MultisetEntry(BaseModel):
    element: JsonElement
    multiplicity: int = Field(..., ge=1)


class MultisetWitness(BaseModel):
    """A multiset K with |fK ∩ A| < (1 - ε)|K| for every f ∈ F"""
    kind: Literal["multiset-witness"] = "multiset-witness"
    epsilon: str
    F: List[JsonElement]
    multiset: List[MultisetEntry]
    counts: List[int]
    size: int


class TranslateTuple(BaseModel):
    """Right translates A·g_1, ..., A·g_n with an empty meet on the window, or a union covering it"""
    kind: Literal["translate-tuple"] = "translate-tuple"
    translates: List[JsonElement]
    window_radius: int


class PatternEntry(BaseModel):
    bits: str
    translate: JsonElement


class PatternSetModel(BaseModel):
    kind: Literal["pattern-set"] = "pattern-set"
    window: List[JsonElement]
    patterns: List[PatternEntry]


class ColoringEntry(BaseModel):
    subset: List[JsonElement]
    k: JsonElement


class ColoringModel(BaseModel):
    """Windowed (F, n)-coloring; ``window_radius`` bounds the tabulated n-subsets"""
    kind: Literal["coloring"] = "coloring"
    n: int
    F: List[JsonElement]
    K: List[JsonElement]
    window_radius: int
    table: List[ColoringEntry]


class SymmetricPair(BaseModel):
    """The meet of f₁⁻¹A over F1 and f₂⁻¹A^c over F2, with what was found about it"""
    kind: Literal["symmetric-pair"] = "symmetric-pair"
    variant: str
    F1: List[JsonElement]
    F2: List[JsonElement]
    meet: str
    evidence: str


class DenseOrbitWitness(BaseModel):
    kind: Literal["dense-orbit"] = "dense-orbit"
    method: Literal["subgroup-oracle", "symmetric-subset-oracle", "gap-sufficiency"]
    subgroup: Optional[List[int]] = None
    coset: Optional[int] = None
    subset: Optional[Dict[str, Any]] = None
    gaps: Optional[List[int]] = None


class CandidateOutcome(BaseModel):
    set: Dict[str, Any]
    outcome: str
    witness: Optional[Union[MultisetWitness, SyndeticWitness, ThickRefutation]] = None


class AmenabilityBundle(BaseModel):
    kind: Literal["amenability"] = "amenability"
    sets: List[Dict[str, Any]] = Field(default_factory=list)
    certificates: List[ScsCertificate] = Field(default_factory=list)
    candidates: List[CandidateOutcome] = Field(default_factory=list)


Certificate = Annotated[
    Union[SyndeticWitness, ThickRefutation, ScsCertificate, MultisetWitness, TranslateTuple,
          PatternSetModel, ColoringModel, SymmetricPair, DenseOrbitWitness, AmenabilityBundle],
    Field(discriminator="kind"),
]


class SymmetricReport(BaseModel):
    variant: Literal["plain", "completely", "strongly-completely"]
    verdict: Verdict
    scope: Scope = Field(default_factory=Scope.exact)
    pair: Optional[SymmetricPair] = None
    note: str = ""


class DenseOrbitReport(BaseModel):
    verdict: Verdict
    method: Literal["subgroup-oracle", "symmetric-subset-oracle", "gap-sufficiency"]
    scope: Scope = Field(default_factory=Scope.exact)
    witness: Optional[DenseOrbitWitness] = None
    note: str = ""


class DecisionReport(BaseModel):
    """Verdict with its certificate and the search scale that produced it"""
    schema_version: str = SCHEMA_VERSION
    command: List[str] = Field(default_factory=list)
    group: str
    set: Optional[Dict[str, Any]] = None
    question: str
    verdict: Verdict
    scope: Scope = Field(default_factory=Scope.exact)
    certificate: Optional[Certificate] = None
    evidence: Dict[str, Any] = Field(default_factory=dict)
    scale: Dict[str, Any] = Field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def exit_code(self) -> int:
        return exit_code_for(self.verdict)

    def canonical_json(self) -> str:
        """Stable serialization used for replay comparison; wall time left out"""
        data = self.model_dump(mode="json", exclude={"wall_time"})
        return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def canonical_json(model: BaseModel) -> str:
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def load_report_or_certificate(data: Dict[str, Any]) -> Union[DecisionReport, Certificate]:
    """Parse a report, or a bare certificate identified by its ``kind``"""
    if "verdict" in data:
        return DecisionReport.model_validate(data)
    kinds = {
        "syndetic-witness": SyndeticWitness,
        "thick-refutation": ThickRefutation,
        "scs-certificate": ScsCertificate,
        "multiset-witness": MultisetWitness,
        "translate-tuple": TranslateTuple,
        "pattern-set": PatternSetModel,
        "coloring": ColoringModel,
        "symmetric-pair": SymmetricPair,
        "dense-orbit": DenseOrbitWitness,
        "amenability": AmenabilityBundle,
    }
    kind = data.get("kind")
    if kind not in kinds:
        raise ValueError(f"Unknown certificate kind {kind!r}")
    return kinds[kind].model_validate(data)


SCHEMA_MODELS = {
    "decision-report": DecisionReport,
    "scs-certificate": ScsCertificate,
    "syndetic-witness": SyndeticWitness,
    "thick-refutation": ThickRefutation,
    "multiset-witness": MultisetWitness,
    "coloring": ColoringModel,
    "symmetric-report": SymmetricReport,
    "dense-orbit-report": DenseOrbitReport,
}
