"""Flow lines of the Rabinowitz action and of the heat flow on S^2.

Run with ``python3 scripts/flows_tour.py``.
"""
import numpy as np

from symtate.flows import count_c1, convergence_order, heat_flow_check, heteroclinic

h = heteroclinic()
print(f"flow line from mode 0 to mode 1: action {h.action_start:.3e} -> {h.action_end:.9f}")
print(f"(pi = {np.pi:.9f}), ends {h.closest:.1e} from the target circle")

for x0 in (-0.5, 0.1, 0.9):
    r = heat_flow_check(x0)
    print(f"heat flow from x0={x0}: error {r['max_rel_error']:.1e}, limit {r['limit']}")
print("observed order of the PDE residual:", round(convergence_order(), 3))
print("flow lines from the great circle to the pole:", count_c1())
