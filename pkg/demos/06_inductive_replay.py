"""
Replaying the inductive construction on a finite grid
=====================================================

The search walks indices sigma_1, sigma_2, ... with growing coordinate sets
and shrinking radii, then checks every recorded step.
"""

import json
import numpy as np
from spernerkit.labelings import Colouring, random_sperner_colouring
from spernerkit.lattice import GridSet
from spernerkit.covers import (
    EmulationConfig, emulate_inductive_search, audit_trace,
    choose_grid_scale, colouring_to_cover,
)

phi = random_sperner_colouring(5, 2, seed=0, palette_mode="canonical")
cover = [(c, GridSet(5, 2, phi.colours == c)) for c in phi.palette]
trace = emulate_inductive_search(cover, EmulationConfig())
print(trace.status, trace.reason)
for s in trace.steps:
    print(s.sigma, sorted(s.A.members), "radius", s.L, "member", s.U)
print(json.dumps(audit_trace(trace, cover), indent=1))

# an injective colouring, pushed through the box cover onto a finer grid
inj = Colouring(2, 3, np.arange(16).reshape(4, 4))
scale, image = choose_grid_scale(colouring_to_cover(inj))
print("grid scale", scale)
t2 = emulate_inductive_search(image, EmulationConfig(min_new_coords=1))
print(t2.status, len(t2.steps), all(audit_trace(t2, image).values()))
