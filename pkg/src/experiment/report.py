"""Per-node evaluation records and their depth-wise aggregation into report rows."""
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from utils.logger import get_logger

logger = get_logger("report", log_level=logging.DEBUG)


@dataclass
class NodeEvaluation:
    """Outcome of one node in one seed."""
    seed: int
    node_id: int
    depth: int
    p_child: int
    rank: int
    q_samples: int
    validate_fraction: float
    matched: bool
    status: str
    max_error: Optional[float] = None


@dataclass
class DepthRow:
    depth: int
    m: int
    n: int
    p_child: int
    rank: float
    q_samples: int
    validate_fraction: float
    recovered: int
    total: int

    @property
    def recovered_tally(self) -> str:
        return f"{self.recovered}/{self.total}"

    def to_dict(self) -> Dict[str, Any]:
        row = asdict(self)
        row["recovered_tally"] = self.recovered_tally
        return row


@dataclass
class ExperimentReport:
    label: str
    variant: str
    seeds: List[int]
    rows: List[DepthRow] = field(default_factory=list)
    nodes: List[NodeEvaluation] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def partial(self) -> bool:
        return bool(self.failures)

    def body(self) -> Dict[str, Any]:
        """Everything except ``metadata``; this is what the fingerprint covers."""
        return {
            "label": self.label,
            "variant": self.variant,
            "seeds": list(self.seeds),
            "rows": [row.to_dict() for row in self.rows],
            "nodes": [asdict(node) for node in self.nodes],
            "failures": list(self.failures),
            "config": self.config,
        }

    def fingerprint(self) -> str:
        return report_fingerprint(self.body())

    def to_dict(self) -> Dict[str, Any]:
        data = self.body()
        data["fingerprint"] = self.fingerprint()
        data["metadata"] = dict(self.metadata)
        return data


def report_fingerprint(body: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON of a report body (sorted keys, no whitespace)."""
    payload = {key: value for key, value in body.items() if key not in ("metadata", "fingerprint")}
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def aggregate_by_depth(evaluations: Sequence[NodeEvaluation], m: int, n: int) -> List[DepthRow]:
    """
    Averages node evaluations over all seeds and all nodes of each depth.

    ``p_child`` and ``q_samples`` are taken from the first node of a depth (all
    nodes of one depth share them); rank and validate fraction are means; the
    tally counts matched nodes over all evaluated nodes.

    Returns:
        List[DepthRow]: Rows sorted by depth, root first.
    """
    rows = []
    for depth in sorted({e.depth for e in evaluations}):
        group = [e for e in evaluations if e.depth == depth]
        row = DepthRow(
            depth=depth,
            m=m,
            n=n,
            p_child=group[0].p_child,
            rank=round(float(np.mean([e.rank for e in group])), 2),
            q_samples=group[0].q_samples,
            validate_fraction=round(float(np.mean([e.validate_fraction for e in group])), 2),
            recovered=sum(1 for e in group if e.matched),
            total=len(group),
        )
        logger.info(
            f"Depth {depth}: rank {row.rank:.2f}, validate {row.validate_fraction:.2f}, recovered {row.recovered_tally}"
        )
        rows.append(row)
    return rows
