"""Exact decision engine for capacity-faithful flows modulo 5.

Subpackages
-----------
- :mod:`fiveflow.si5` — symmetric interval unions on the circle R/5Z.
- :mod:`fiveflow.graph` — multigraphs, graph surgery, snark checks, file formats.
- :mod:`fiveflow.flow` — the exact feasibility engine, oracle, and verifier.
- :mod:`fiveflow.capacity` — open 5-capacity of generalised edges and its algebra.
- :mod:`fiveflow.wheels` — wheel templates, classification predicate, flows, scan.
- :mod:`fiveflow.construct` — infeasible templates and the snark pipeline.
- :mod:`fiveflow.cli` — the ``fiveflow`` command-line interface.

The most common entry points are re-exported here.  Both
:mod:`fiveflow.capacity` and :mod:`fiveflow.construct` define a
``Realisation`` type (capacity-backed edge replacement versus template
substitution); neither is re-exported — import them from their module.
"""

from __future__ import annotations

from .capacity import compute_capacity
from .construct import build_appendix_snark
from .flow import decide_faithful, decide_integer_nz5, verify_flow
from .graph import (
    read_capacity_graph,
    read_graph6,
    write_capacity_graph,
    write_graph6,
)
from .si5 import AtomSet, canonical_string, enumerate_si5, parse
from .wheels import build_faithful_flow, predicate_cfn5, scan

__version__ = "0.1.0"

__all__ = [
    "AtomSet",
    "build_appendix_snark",
    "build_faithful_flow",
    "canonical_string",
    "compute_capacity",
    "decide_faithful",
    "decide_integer_nz5",
    "enumerate_si5",
    "parse",
    "predicate_cfn5",
    "read_capacity_graph",
    "read_graph6",
    "scan",
    "verify_flow",
    "write_capacity_graph",
    "write_graph6",
    "__version__",
]
