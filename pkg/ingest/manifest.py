import json
import logging
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from config import resolve_relative
from errors import ManifestError, StylizedFactsError
from ingest.prices import PriceSeries, clean, parse_price_csv

logger = logging.getLogger(__name__)


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    ticker: str
    path: str


class MarketManifest(BaseModel):
    """One market and the price files of its stocks (paths relative to the manifest)"""

    model_config = ConfigDict(frozen=True)

    market: str
    entries: Tuple[ManifestEntry, ...]

    @model_validator(mode="after")
    def _unique_tickers(self) -> "MarketManifest":
        seen = set()
        for entry in self.entries:
            if entry.ticker in seen:
                raise ValueError(f"duplicate ticker '{entry.ticker}' in market '{self.market}'")
            seen.add(entry.ticker)
        return self


def _entry(raw: Any) -> Dict[str, str]:
    if isinstance(raw, dict):
        return raw
    if isinstance(raw, (list, tuple)) and len(raw) == 2:
        return {"ticker": raw[0], "path": raw[1]}
    raise ManifestError(f"manifest entry {raw!r} is neither an object nor a [ticker, path] pair")


def load_manifests(path: str) -> List[MarketManifest]:
    """
    Read a manifest file.

    Format: {"markets": {"<market>": [{"ticker": "...", "path": "..."}, ...]}}.
    ``[ticker, path]`` pairs are accepted in place of objects. Markets keep
    file order.
    """
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except OSError as e:
        raise ManifestError(f"cannot read manifest {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ManifestError(f"manifest {path} is not valid JSON: {e}") from e

    markets = document.get("markets") if isinstance(document, dict) else None
    if not isinstance(markets, dict) or not markets:
        raise ManifestError(f"manifest {path} has no 'markets' mapping")

    manifests = []
    for market, raw_entries in markets.items():
        try:
            manifests.append(
                MarketManifest(market=market, entries=[_entry(e) for e in raw_entries])
            )
        except ValidationError as e:
            raise ManifestError(f"manifest {path}, market '{market}': {e}") from e
    return manifests


def read_series(
    manifest_path: str, entry: ManifestEntry, use_adjusted_close: bool = False
) -> PriceSeries:
    """Open, parse and clean the price file of one manifest entry"""
    file_path = resolve_relative(manifest_path, entry.path)
    try:
        with open(file_path, "rb") as f:
            parsed = parse_price_csv(f, ticker=entry.ticker, use_adjusted_close=use_adjusted_close)
    except OSError as e:
        raise ManifestError(f"cannot read price file {file_path}: {e}") from e
    except StylizedFactsError as e:
        # keep the error type, add the offending path
        e.args = (f"{file_path}: {e}",) + e.args[1:]
        raise
    return clean(parsed)


def write_manifest(path: str, manifests: List[MarketManifest]) -> None:
    """Write manifests in the format ``load_manifests`` reads (object entries)"""
    document = {
        "markets": {
            m.market: [{"ticker": e.ticker, "path": e.path} for e in m.entries] for m in manifests
        }
    }
    with open(path, "w") as f:
        json.dump(document, f, indent=2)
        f.write("\n")
