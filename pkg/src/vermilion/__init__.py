"""Traffic-aware periodic circuit schedules (Vermilion) with throughput oracles and a slot-level simulator."""

__version__ = "0.1.0"
