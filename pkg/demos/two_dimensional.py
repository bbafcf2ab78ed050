"""Two-dimensional benchmarks at reduced grids.

A Mayer problem driven by a rotation and a Riccati-type problem with
a double integrator.  Both take under a minute on one core.
"""
import time

from maxplusfem import run_case

for name in ("lq2d", "rotation", "riccati2d"):
    t0 = time.perf_counter()
    rep = run_case(name, scale="desk")
    p = rep.parameters
    print(f"{name:<10} delta {p['delta']}  dx {p['dx']}  elements {p['element_count']}  "
          f"error {rep.linf_error:.3e}  ({time.perf_counter() - t0:.1f} s)")
