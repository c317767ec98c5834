"""
Report structures produced by the fact battery.

Every per-stock analysis slot holds either its result model or a
``NotEvaluable`` marker carrying the reason, so a report is always complete.
"""

from typing import Dict, List, Literal, Optional, Tuple, TypeVar, Union

from pydantic import BaseModel, ConfigDict, field_validator

from analysis.core import MomentSummary, TestResult
from analysis.garch import ConditionalTailResult, GarchFit
from analysis.long_memory import HurstResult
from analysis.serial_dependence import AcfDecayFit, AsymmetryResult, PortmanteauResult
from analysis.tail_index import TailIndexResult
from analysis.taylor import KurtosisTestResult, TaylorResult

# Table order of the sixteen facts; verdict vectors follow it
FACTS: Tuple[str, ...] = (
    "gain_loss_asymmetry",
    "leverage_effect",
    "aggregational_gaussianity",
    "heavy_tails",
    "volume_power_law",
    "volume_volatility_correlation",
    "risk_return_tradeoff",
    "time_scale_asymmetry",
    "long_memory",
    "volume_long_memory",
    "slow_decay_of_absolute_acf",
    "absence_of_autocorrelation",
    "volatility_clustering",
    "conditional_heavy_tails",
    "intermittency",
    "taylor_effect",
)

FACT_TITLES: Dict[str, str] = {
    "gain_loss_asymmetry": "Gain Loss Asymmetry",
    "leverage_effect": "Leverage Effect",
    "aggregational_gaussianity": "Aggregational Gaussianity",
    "heavy_tails": "Heavy Tails",
    "volume_power_law": "Decay of Distribution of Volume as Power Law",
    "volume_volatility_correlation": "Volume Volatility Correlation",
    "risk_return_tradeoff": "Risk Return Tradeoff",
    "time_scale_asymmetry": "Asymmetry in Time Scales",
    "long_memory": "Long Memory",
    "volume_long_memory": "Long Memory in Volume Series",
    "slow_decay_of_absolute_acf": "Slow Decay of Autocorrelations in Absolute Returns",
    "absence_of_autocorrelation": "Absence of Autocorrelations",
    "volatility_clustering": "Volatility Clustering",
    "conditional_heavy_tails": "Conditional Heavy Tails",
    "intermittency": "Intermittency",
    "taylor_effect": "Taylor Effect",
}


class NotEvaluable(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    reason: str


T = TypeVar("T")
Maybe = Union[T, NotEvaluable]

NOT_COMPUTED = NotEvaluable(reason="not computed")


def is_evaluable(value: object) -> bool:
    return value is not None and not isinstance(value, NotEvaluable)


class ResidualDiagnostics(BaseModel):
    """Checks that the GARCH filter removed the clustering"""

    model_config = ConfigDict(frozen=True)

    variance: float
    ljung_box_squared: Maybe[PortmanteauResult]
    jarque_bera: Maybe[TestResult]


class StockFactReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    ticker: str
    status: Literal["analyzed", "skipped"] = "analyzed"
    skip_reason: Optional[str] = None
    n_obs: int
    dropped_rows: int = 0

    mean_return: Maybe[float] = NOT_COMPUTED
    sd_return: Maybe[float] = NOT_COMPUTED
    moments: Maybe[MomentSummary] = NOT_COMPUTED
    leverage_corr: Maybe[float] = NOT_COMPUTED
    # mode ("overlapping" / "non_overlapping") -> horizon -> test ("ks", "sw", "jb")
    normality: Dict[str, Dict[int, Dict[str, Maybe[TestResult]]]] = {}
    tail: Maybe[TailIndexResult] = NOT_COMPUTED
    tail_left: Maybe[TailIndexResult] = NOT_COMPUTED
    tail_right: Maybe[TailIndexResult] = NOT_COMPUTED
    volume_tail: Maybe[TailIndexResult] = NOT_COMPUTED
    volume_volatility_corr: Maybe[float] = NOT_COMPUTED
    volume_return_corr: Maybe[float] = NOT_COMPUTED
    asymmetry: Dict[int, Maybe[AsymmetryResult]] = {}
    hurst: Maybe[HurstResult] = NOT_COMPUTED
    volume_hurst: Maybe[HurstResult] = NOT_COMPUTED
    acf_decay: Maybe[AcfDecayFit] = NOT_COMPUTED
    # "ljung_box" / "box_pierce"
    absence: Dict[str, Maybe[PortmanteauResult]] = {}
    clustering: Dict[str, Maybe[PortmanteauResult]] = {}
    # lag -> ("normal" / "t") -> single-lag test on squared returns
    clustering_lags: Dict[int, Dict[str, Maybe[TestResult]]] = {}
    garch: Maybe[GarchFit] = NOT_COMPUTED
    conditional_tail: Maybe[ConditionalTailResult] = NOT_COMPUTED
    residual_diagnostics: Maybe[ResidualDiagnostics] = NOT_COMPUTED
    # "returns" / "residuals"
    intermittency: Dict[str, Maybe[KurtosisTestResult]] = {}
    taylor: Maybe[TaylorResult] = NOT_COMPUTED


class FactVerdict(BaseModel):
    """Aggregate statistic, the rule applied to it and the resulting verdict"""

    model_config = ConfigDict(frozen=True)

    fact: str
    verdict: Literal[-1, 0, 1]
    statistic: Optional[float] = None
    rule: str
    support: int = 0
    low_support: bool = False
    reason: Optional[str] = None
    details: Dict[str, Optional[float]] = {}


class MarketFactSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    market: str
    n_stocks: int
    n_evaluated: int
    skipped: Dict[str, str] = {}
    risk_return_corr: Maybe[float] = NOT_COMPUTED
    facts: Dict[str, FactVerdict]

    def verdict_vector(self) -> "MarketVerdictVector":
        return MarketVerdictVector(
            market=self.market, values=tuple(self.facts[f].verdict for f in FACTS)
        )


class MarketVerdictVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    market: str
    values: Tuple[int, ...]

    @field_validator("values")
    @classmethod
    def _ordinal_components(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(value) != len(FACTS):
            raise ValueError(f"verdict vector needs {len(FACTS)} components, got {len(value)}")
        if any(v not in (-1, 0, 1) for v in value):
            raise ValueError("verdict components must be -1, 0 or +1")
        return value

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(FACTS, self.values))


class DendrogramNode(BaseModel):
    """A market leaf (``market`` set) or a merge of two subtrees at ``height``"""

    model_config = ConfigDict(frozen=True)

    market: Optional[str] = None
    height: float = 0.0
    members: Tuple[str, ...]
    children: Tuple["DendrogramNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def subtrees(self) -> List["DendrogramNode"]:
        nodes = [self]
        for child in self.children:
            nodes.extend(child.subtrees())
        return nodes

    def find(self, members: List[str]) -> Optional["DendrogramNode"]:
        """The subtree whose leaves are exactly ``members``, if one exists"""
        wanted = tuple(sorted(members))
        for node in self.subtrees():
            if node.members == wanted:
                return node
        return None


class ClusterMerge(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: int
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    height: float
    size: int


DendrogramNode.model_rebuild()
