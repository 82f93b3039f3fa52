import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional

from fasteners import InterProcessLock

from copresence import __version__
from copresence.errors import StorageError
from copresence.objectives.reports import read_json, write_json

RUN_RECORD_FILE = "run_record.json"
RUNS_LEDGER_FILE = "runs.jsonl"


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a resolved config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class RunRecord:
    config_hash: str
    config: Dict[str, Any]
    seed: int
    categories: List[str]
    dataset_digest: Optional[str] = None
    train_losses: List[float] = field(default_factory=list)
    val_losses: List[float] = field(default_factory=list)
    val_ssd: List[float] = field(default_factory=list)
    best_epoch: int = -1
    # overall SSD/KL/R2/CE of the retained checkpoint on the test split
    final_estimation: Dict[str, Optional[float]] = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        # ledger rows carry extra keys next to the record fields
        names = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in data.items() if key in names})

    def save(self, run_dir: str) -> str:
        path = os.path.join(run_dir, RUN_RECORD_FILE)
        write_json(self.to_dict(), path)
        return path

    @classmethod
    def load(cls, run_dir: str) -> "RunRecord":
        path = run_dir
        if os.path.isdir(run_dir):
            path = os.path.join(run_dir, RUN_RECORD_FILE)
        data = read_json(path)
        if not isinstance(data, dict):
            raise StorageError(f"{path} is not a run record")
        try:
            return cls.from_dict(data)
        except TypeError as e:
            raise StorageError(f"{path} is not a run record: {e}") from None


def append_run_record(ledger_dir: str, record: RunRecord, **extra: Any) -> str:
    """Adds one row to the shared runs ledger under an inter-process lock.

    A row with the same `run_dir` as an earlier one replaces it, so rerunning a
    sweep into the same directory does not grow the ledger.
    """
    os.makedirs(ledger_dir, exist_ok=True)
    path = os.path.join(ledger_dir, RUNS_LEDGER_FILE)
    row = {**record.to_dict(), **extra}
    try:
        with InterProcessLock(f"{path}.lock"):
            rows = read_run_ledger(ledger_dir)
            if row.get("run_dir") is not None:
                rows = [r for r in rows if r.get("run_dir") != row["run_dir"]]
            rows.append(row)
            with open(path, "w") as f:
                for r in rows:
                    f.write(json.dumps(r, sort_keys=True) + "\n")
    except OSError as e:
        raise StorageError(f"Cannot append to {path}: {e}") from None
    return path


def read_run_ledger(ledger_dir: str) -> List[Dict[str, Any]]:
    path = os.path.join(ledger_dir, RUNS_LEDGER_FILE)
    if not os.path.exists(path):
        return []
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]
