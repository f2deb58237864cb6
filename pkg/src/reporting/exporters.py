"""
Exporters

CSV, JSON and JSON-lines writers for sweep results, plus run manifests that
record how every output file was produced.

Author: VGNCF Toolkit
Date: 2026-10-19
"""

import json
import logging
from dataclasses import asdict, dataclass, field, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """Convert numpy scalars, enums and dataclasses into JSON-ready values."""
    if is_dataclass(value) and not isinstance(value, type):
        return _plain(asdict(value))
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(_plain(k)): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def save_to_csv(df: pd.DataFrame, output_file: str) -> str:
    """
    Save a result table to CSV, header row included.

    Args:
        df: Result table
        output_file: Path to output CSV file

    Returns:
        The output path
    """
    Path(output_file).parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(output_file, index=False, lineterminator='\n')
    logger.info(f"Saved {len(df)} rows to {output_file}")
    return output_file


def save_to_json(data: Any, output_file: str) -> str:
    """
    Save records to a JSON file with sorted keys.

    Args:
        data: JSON-serializable data (dataclasses and numpy values are converted)
        output_file: Path to output JSON file

    Returns:
        The output path
    """
    Path(output_file).parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, 'w', encoding='utf-8') as f:
        json.dump(_plain(data), f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write('\n')
    logger.info(f"Saved JSON to {output_file}")
    return output_file


def save_to_jsonl(records: Iterable[Dict], output_file: str) -> str:
    """Save one JSON object per line."""
    Path(output_file).parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(output_file, 'w', encoding='utf-8') as f:
        for record in records:
            f.write(json.dumps(_plain(record), sort_keys=True) + '\n')
            count += 1
    logger.info(f"Saved {count} records to {output_file}")
    return output_file


@dataclass
class RunManifest:
    """
    How an output was produced: subcommand, parameters, seed, tool version and
    output files. No wall-clock fields, so reruns reproduce it byte for byte.
    """
    subcommand: str
    params: Dict[str, Any]
    seed: int
    version: str
    outputs: List[str] = field(default_factory=list)

    def write(self, output_file: str) -> str:
        return save_to_json({
            'subcommand': self.subcommand,
            'params': self.params,
            'seed': self.seed,
            'version': self.version,
            'outputs': sorted(self.outputs),
        }, output_file)

    @classmethod
    def load(cls, source: str) -> 'RunManifest':
        with open(source, 'r', encoding='utf-8') as f:
            data = json.load(f)
        missing = {'subcommand', 'params', 'seed', 'version'} - set(data)
        if missing:
            raise ValueError(f"Manifest {source} lacks {sorted(missing)}")
        return cls(subcommand=data['subcommand'], params=data['params'], seed=data['seed'],
                   version=data['version'], outputs=list(data.get('outputs', [])))


def manifest_path(output_file: str) -> str:
    """<dir>/<name>.manifest.json next to <dir>/<name>.<ext>."""
    path = Path(output_file)
    return str(path.with_name(f"{path.stem}.manifest.json"))
