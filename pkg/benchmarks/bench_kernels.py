"""Compare the JIT-compiled kernels against the pure-numpy fallback.

Runs the same workload twice in child processes — once normally and once
with FIVEFLOW_DISABLE_NUMBA=1 — because the kernel backend is chosen at
import time.  Each measurement excludes interpreter startup and JIT
compilation (a warm-up decision runs first).

Usage:
    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

_WORKLOAD = r"""
import json
import time

from fiveflow.capacity import compute_capacity, petersen_minus_edge
from fiveflow.flow import decide_faithful
from fiveflow.graph import CapacityGraph, petersen_graph
from fiveflow.si5 import OPEN_14
from fiveflow.wheels import scan
from fiveflow._kernels import NUMBA_ENABLED

petersen = CapacityGraph.uniform(petersen_graph(), OPEN_14)
decide_faithful(petersen)  # warm-up: JIT compilation happens here


def best_of(runs, fn):
    times = []
    for _ in range(runs):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


results = {
    "backend": "numba" if NUMBA_ENABLED else "numpy",
    "petersen decide": best_of(5, lambda: decide_faithful(petersen)),
    "petersen-minus-edge capacity": best_of(
        3, lambda: compute_capacity(petersen_minus_edge())
    ),
    "wheel scan n<=6": best_of(1, lambda: scan(6)),
}
print(json.dumps(results))
"""


def _measure(disable_numba: bool) -> dict:
    env = dict(os.environ)
    env["FIVEFLOW_DISABLE_NUMBA"] = "1" if disable_numba else "0"
    out = subprocess.run(
        [sys.executable, "-c", _WORKLOAD],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> None:
    jit = _measure(disable_numba=False)
    plain = _measure(disable_numba=True)
    assert jit.pop("backend") == "numba"
    assert plain.pop("backend") == "numpy"

    width = max(map(len, jit))
    print(f"{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speed-up':>8}")
    for name, fast in jit.items():
        slow = plain[name]
        print(
            f"{name:<{width}}  {fast * 1000:>8.1f}ms  {slow * 1000:>8.1f}ms  "
            f"{slow / fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
