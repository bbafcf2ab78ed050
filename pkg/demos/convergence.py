"""Error against time step with the space step tied to dx = delta^1.5."""
from maxplusfem import convergence_study

for name in ("lq1d", "falcone2"):
    table = convergence_study(name, [0.4, 0.2, 0.1, 0.05], T=0.8)
    print(name)
    for r in table.rows:
        print(f"  delta {r['delta']:<5} dx {r['dx']:.4f}  error {r['linf_error']:.4f}")
    print(f"  fitted slope {table.slope:.2f}")
