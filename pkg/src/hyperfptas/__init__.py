"""Deterministic partition function approximation on hypergraphs by correlation decay.

Two models are covered: the hypergraph hardcore model (weighted
independent sets) and anti-ferromagnetic two-state spin systems. Both come
with a brute-force rational oracle for validation.
"""

from .errors import (
    DeadInstance,
    DegenerateMarginal,
    GenerationError,
    HyperFptasError,
    InvalidArgument,
    OracleTooLarge,
    OutsideRegion,
    ParameterDomain,
    ParseError,
    ReductionError,
    ThresholdProximity,
)
from .estimate import PartitionEstimate
from .hardcore import HardcoreDecayPlan, HardcoreParams, lambda_critical
from .hypergraph import (
    Edge,
    LabeledHypergraph,
    PinnedValue,
    hardcore_child,
    pin,
    remove_edge,
    remove_vertex,
    spin_children,
    split_vertex,
)
from .instances import ModelSpec, edge_cover_reduction, gen_random, parse, serialize
from .oracle import exact_hardcore, exact_ratio, exact_spin
from .twospin import SpinDecayPlan, SpinParams, beta_critical

__version__ = "0.1.0"
