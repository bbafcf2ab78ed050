"""Fleming-McEneaney against the finite element recursion.

Both methods share the same one-step element images, so the finite
element value lies above the Fleming-McEneaney value at every step.
"""
from maxplusfem import compare_methods, get_case

for name in ("falcone1", "lq1d"):
    s = get_case(name).setup(scale="desk", T=1.0)
    cmp = compare_methods(s.problem, s.W, s.cfg, s.grids, s.reference, tol=1e-14)
    print(f"{name}: {cmp.total_violations} ordering violations")
    stride = max(1, len(cmp.times) // 5)
    for row in list(cmp.rows())[::stride]:
        print(f"  t {row['t']:.2f}  fm {row['fm_linf_error']:.3e}  mfem {row['mfem_linf_error']:.3e}")
