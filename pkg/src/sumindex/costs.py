"""Cost accounting: the benchmark currency.

A report captures measured advice bits, per-query probe and evaluation
counts (never averaged away), preprocessing evaluations, wall times, and an
echo of the configuration.  JSON serialisation uses a fixed key order;
wall times are the only non-deterministic fields and are excluded from the
deterministic CSV surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List


@dataclass
class Meter:
    """Per-run collector for query-level counters."""

    evals_per_query: List[int] = field(default_factory=list)
    probes_per_query: List[int] = field(default_factory=list)

    def record_query(self, evals: int, probes: int) -> None:
        self.evals_per_query.append(int(evals))
        self.probes_per_query.append(int(probes))

    def record_batch(self, evals, probes) -> None:
        self.evals_per_query.extend(int(v) for v in evals)
        self.probes_per_query.extend(int(v) for v in probes)


def _median(values: List[int]) -> float:
    if not values:
        return 0.0
    vs = sorted(values)
    n = len(vs)
    mid = n // 2
    return float(vs[mid]) if n % 2 else (vs[mid - 1] + vs[mid]) / 2.0


@dataclass
class CostReport:
    advice_bits: int
    serialized_bits: int
    preprocess_evals: int
    evals_per_query: List[int]
    probes_per_query: List[int]
    wall_times: Dict[str, float]
    config: Dict

    @property
    def median_evals(self) -> float:
        return _median(self.evals_per_query)

    @property
    def median_probes(self) -> float:
        return _median(self.probes_per_query)

    def to_json(self) -> str:
        payload = {
            "schema": "sumindex-cost-v1",
            "advice_bits": self.advice_bits,
            "serialized_bits": self.serialized_bits,
            "preprocess_evals": self.preprocess_evals,
            "median_evals_per_query": self.median_evals,
            "median_probes_per_query": self.median_probes,
            "evals_per_query": self.evals_per_query,
            "probes_per_query": self.probes_per_query,
            "config": {k: self.config[k] for k in sorted(self.config)},
            "wall_times": {k: self.wall_times[k] for k in sorted(self.wall_times)},
        }
        return json.dumps(payload, sort_keys=False, separators=(",", ":"))
