import json
import logging
import math
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def to_document(value: Any) -> Tuple[Any, Dict[str, str]]:
    """
    Convert models, numpy values and containers into JSON-ready data.

    Non-finite floats become None; their dotted paths and original values
    ("inf", "-inf", "nan") are returned so the caller can record them.
    """
    flags: Dict[str, str] = {}

    def convert(item: Any, path: str) -> Any:
        if isinstance(item, BaseModel):
            item = item.model_dump()
        if isinstance(item, dict):
            return {str(k): convert(v, f"{path}.{k}" if path else str(k)) for k, v in item.items()}
        if isinstance(item, (list, tuple, np.ndarray)):
            return [convert(v, f"{path}.{i}") for i, v in enumerate(item)]
        if isinstance(item, (bool, np.bool_)):
            return bool(item)
        if isinstance(item, (int, np.integer)):
            return int(item)
        if isinstance(item, (float, np.floating)):
            number = float(item)
            if math.isfinite(number):
                return number
            flags[path] = "nan" if math.isnan(number) else ("inf" if number > 0 else "-inf")
            return None
        return item

    return convert(value, ""), flags


class ResultWriter:
    """Writes every output file of a run under one directory, stamped with the config hash"""

    def __init__(self, output_dir: str, config_hash: str):
        self.output_dir = output_dir
        self.config_hash = config_hash
        self._ensure_dir(self.output_dir)

    def _ensure_dir(self, directory: str):
        if not os.path.exists(directory):
            os.makedirs(directory)

    def path(self, *parts: str) -> str:
        return os.path.join(self.output_dir, *parts)

    def write_json(self, relative_path: str, payload: Any) -> str:
        data, flags = to_document(payload)
        if not isinstance(data, dict):
            data = {"data": data}
        data["config_hash"] = self.config_hash
        if flags:
            data["non_finite"] = flags

        file_path = self.path(relative_path)
        self._ensure_dir(os.path.dirname(file_path))
        with open(file_path, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        logger.debug(f"📝 wrote {file_path}")
        return file_path

    def write_csv(self, relative_path: str, frame: pd.DataFrame) -> str:
        file_path = self.path(relative_path)
        self._ensure_dir(os.path.dirname(file_path))
        with open(file_path, "w", newline="") as f:
            f.write(f"# config_hash={self.config_hash}\n")
            frame.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"📝 wrote {file_path}")
        return file_path

    def write_text(self, relative_path: str, text: str) -> str:
        file_path = self.path(relative_path)
        self._ensure_dir(os.path.dirname(file_path))
        with open(file_path, "w") as f:
            f.write(text)
        return file_path

    def read_json(self, relative_path: str) -> Optional[Dict[str, Any]]:
        file_path = self.path(relative_path)
        if not os.path.exists(file_path):
            return None
        with open(file_path, "r") as f:
            return json.load(f)

    def list_markets(self) -> List[str]:
        """Markets with a summary.json under the output directory, sorted by name"""
        if not os.path.isdir(self.output_dir):
            return []
        return sorted(
            name
            for name in os.listdir(self.output_dir)
            if os.path.isfile(self.path(name, "summary.json"))
        )

    def list_stock_reports(self, market: str) -> List[str]:
        directory = self.path(market, "stocks")
        if not os.path.isdir(directory):
            return []
        return sorted(name[:-5] for name in os.listdir(directory) if name.endswith(".json"))
