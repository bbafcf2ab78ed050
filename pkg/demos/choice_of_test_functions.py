"""Why the test functions matter: distance problem in one dimension.

With Lipschitz cones as test functions the scheme converges.  With
quadratic test functions it gets stuck at a fixed error whatever the
space step.
"""
from maxplusfem import run_case

print("good choice: quadratic elements, cone tests (a = 1.1)")
for dx in (0.02, 0.01):
    rep = run_case("dist1d", dx=dx)
    print(f"  dx {dx:<6} error {rep.linf_error:.4f}")

print("bad choice: quadratic elements, quadratic tests")
for dx in (0.02, 0.01, 0.005):
    rep = run_case("dist1d_bad", dx=dx)
    print(f"  dx {dx:<6} error {rep.linf_error:.4f}")
