"""Hierarchical clustering of markets by their verdict vectors"""

import logging
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import pdist

from battery.models import FACTS, ClusterMerge, DendrogramNode, MarketVerdictVector
from errors import DomainError, InsufficientDataError

logger = logging.getLogger(__name__)

ALL_MARKETS = "all"

MarketList = Union[str, Iterable[str]]


def _check_names(vectors: Sequence[MarketVerdictVector]) -> List[MarketVerdictVector]:
    names = [v.market for v in vectors]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise DomainError(f"duplicate market names: {', '.join(duplicates)}")
    if len(vectors) < 2:
        raise InsufficientDataError(f"clustering needs at least 2 markets, got {len(vectors)}")
    # lexicographic order fixes every tie-break inside linkage
    return sorted(vectors, key=lambda v: v.market)


def cluster_markets_with_merges(
    vectors: Sequence[MarketVerdictVector],
) -> Tuple[DendrogramNode, List[ClusterMerge]]:
    """Average-linkage clustering on city-block distances; returns (root, merges)"""
    ordered = _check_names(vectors)
    data = np.array([v.values for v in ordered], dtype=float)
    tree = linkage(pdist(data, metric="cityblock"), method="average")

    nodes: Dict[int, DendrogramNode] = {
        i: DendrogramNode(market=v.market, members=(v.market,)) for i, v in enumerate(ordered)
    }
    merges: List[ClusterMerge] = []
    for step, (a, b, height, size) in enumerate(tree):
        left, right = nodes.pop(int(a)), nodes.pop(int(b))
        left, right = sorted((left, right), key=lambda node: node.members[0])
        merged = DendrogramNode(
            height=float(height),
            members=tuple(sorted(left.members + right.members)),
            children=(left, right),
        )
        nodes[len(ordered) + step] = merged
        merges.append(
            ClusterMerge(
                step=step + 1,
                left=left.members,
                right=right.members,
                height=float(height),
                size=int(size),
            )
        )
        logger.debug(f"🔍 merge {step + 1}: {left.members} + {right.members} at {height:g}")

    (root,) = nodes.values()
    return root, merges


def cluster_markets(vectors: Sequence[MarketVerdictVector]) -> DendrogramNode:
    root, _ = cluster_markets_with_merges(vectors)
    return root


def vectors_from_table(
    verified: Mapping[str, MarketList],
    contradicted: Mapping[str, MarketList],
    markets: Sequence[str],
) -> List[MarketVerdictVector]:
    """
    Verdict vectors from per-fact lists of verified and contradicted markets.

    A list may be the string "all"; facts missing from a mapping and markets
    named in neither list get 0.
    """
    unknown = (set(verified) | set(contradicted)) - set(FACTS)
    if unknown:
        raise DomainError(f"unknown facts: {', '.join(sorted(unknown))}")

    def expand(entry: MarketList) -> set:
        if isinstance(entry, str):
            if entry.lower() != ALL_MARKETS:
                raise DomainError(f"market list must be a sequence or '{ALL_MARKETS}', got '{entry}'")
            return set(markets)
        return set(entry)

    vectors = []
    for market in markets:
        values = []
        for fact in FACTS:
            is_verified = market in expand(verified.get(fact, ()))
            is_contradicted = market in expand(contradicted.get(fact, ()))
            if is_verified and is_contradicted:
                raise DomainError(f"{market} is both verified and contradicted for {fact}")
            values.append(1 if is_verified else -1 if is_contradicted else 0)
        vectors.append(MarketVerdictVector(market=market, values=tuple(values)))
    return vectors
