"""Walk through the four limit groups for the C^n staircase and for T*S^2.

Run with ``python3 scripts/staircase_and_sphere.py``.
"""
from symtate.algebra import Ring
from symtate.limits import HorizonProbe, four_tate_groups
from symtate.models import cn_complex, t_star_s2
from symtate.towers import TowerColimit

# Over Z the staircase colimit in even degrees is Q: Z -2-> Z -3-> Z -4-> ...
b = cn_complex(1, 4)
probe = HorizonProbe(b.builder, (4, 6), rule=b.expected["jp_rule"])
dg = four_tate_groups(b.complex, Ring.INT, (0, 4), horizonProbe=probe)
print(dg.table())
jp = dg[2].jp.value
if isinstance(jp, TowerColimit):
    q = jp.q_criterion(31, 40)
    print("degree 2 colimit looks like Q:", q["holds"], "rank", q["rank"])

# Over Q the cotangent bundle of S^2 gives rank 2 on top and rank 1 below,
# whichever even weights are used.  The builder is a horizon truncation, so
# the probe tells the limits which level cuts to trust.
for c in (None, [2, 6, -2, 8]):
    b = t_star_s2(4, c)
    dg = four_tate_groups(b.complex, Ring.RAT, (0, 4), horizonProbe=HorizonProbe(b.builder, (4,)))
    print("weights", b.expected["weights"])
    print("  top   ", dg.ranks("top"))
    print("  bottom", dg.ranks("bottom"))
