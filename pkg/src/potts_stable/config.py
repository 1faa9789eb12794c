"""Central numerical tolerances.

Every comparison against a threshold in the package reads from the single
:data:`TOL` record.  The environment variable ``POTTS_TOL`` overrides
individual fields at import time, e.g.::

    POTTS_TOL="margin=1e-5,feasibility=1e-8"
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-7     # primal / dual feasibility of LP solutions
    optimality: float = 1e-7      # reduced-cost threshold for simplex pricing
    zero_pivot: float = 1e-10     # smallest usable pivot element
    complementarity: float = 1e-6
    duality_gap: float = 1e-6     # relative, scaled by 1 + |obj|
    flow: float = 1e-9            # max-flow exactness / residual threshold
    margin: float = 1e-6          # stable / boundary / unstable split
    integrality: float = 1e-6     # LP entries this close to {0,1} count as integral
    changed: float = 1e-6         # absolute threshold for "entry was changed"


def parse_overrides(text: str, base: Tolerances | None = None) -> Tolerances:
    base = base or Tolerances()
    names = {f.name for f in fields(Tolerances)}
    updates = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"bad POTTS_TOL entry {item!r}; known keys: {sorted(names)}")
        updates[key] = float(value)
    return replace(base, **updates)


TOL = parse_overrides(os.environ.get("POTTS_TOL", ""))
