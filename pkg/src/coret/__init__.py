"""Time-range temporal k-core queries via k-core times."""
from .core_init import CoreTimeMap, core_init, core_times
from .core_update import CoreState, core_update
from .oracle import TemporalKCore, decomp, enumerate_naive
from .query import (CollectSink, CountSink, TTIRegistry, core_t_list, reconstruct,
                    run_query)
from .temporal_graph import (INFINITY, QueryInterval, TemporalGraph, parse_edge_list,
                             project, read_edge_list)

__all__ = [
    "INFINITY", "TemporalGraph", "QueryInterval", "parse_edge_list", "read_edge_list", "project",
    "TemporalKCore", "decomp", "enumerate_naive",
    "CoreTimeMap", "core_init", "core_times", "CoreState", "core_update",
    "TTIRegistry", "CollectSink", "CountSink", "reconstruct", "core_t_list", "run_query",
]
