"""Partition oracle for bounded-degree graphs with an excluded minor."""

from .config import RunConfig, coin
from .global_partition import global_run, run_global
from .graph import BoundedDegreeGraph, Component, Partition, cut_size, load_graph, validate_partition
from .oracle import PartitionOracle

__all__ = [
    "BoundedDegreeGraph",
    "Component",
    "Partition",
    "PartitionOracle",
    "RunConfig",
    "coin",
    "cut_size",
    "global_run",
    "load_graph",
    "run_global",
    "validate_partition",
]
