"""Race detection on recorded execution traces."""

from .engine import (
    Evidence,
    RacePair,
    VectorClock,
    detect_races_hb,
    detect_races_lockset,
    happens_before,
    vector_clocks,
)
from .events import Op, TraceError, TraceEvent, TraceInfo, dump_trace, load_trace, validate
from .oracle import HBRelation, hb_closure_oracle, hb_edges, oracle_races

__all__ = [
    "Evidence",
    "HBRelation",
    "Op",
    "RacePair",
    "TraceError",
    "TraceEvent",
    "TraceInfo",
    "VectorClock",
    "detect_races_hb",
    "detect_races_lockset",
    "dump_trace",
    "happens_before",
    "hb_closure_oracle",
    "hb_edges",
    "load_trace",
    "oracle_races",
    "validate",
    "vector_clocks",
]
