"""Compare the matrix product with path enumeration and Monte Carlo."""
import sys
import time

from reliamis import TrialConfig, abstract_model, evaluate_reliability, monte_carlo_reliability, path_enum_reliability
from reliamis.corpus import paper_systems

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000

print(f"{'system':22} {'analytic':>14} {'paths':>14} {'monte carlo':>24}")
for name, p in sorted(paper_systems().items()):
    m = abstract_model(p)
    exact = evaluate_reliability(m)
    paths = path_enum_reliability(m)
    assert paths.value == exact.value
    t = time.perf_counter()
    mc = monte_carlo_reliability(m, TrialConfig(trials, seed=1), workers=2)
    dt = time.perf_counter() - t
    print(f"{name:22} {float(exact.value):14.10f} {float(paths.value):14.10f} "
          f"{mc.value:.6f} +/- {mc.ci_halfwidth:.1e}  ({dt:.2f}s)")
