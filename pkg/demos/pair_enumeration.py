"""Count certified pairs for N = 1024 under 1/4 puncturing and check the GA order against them."""

import time

from polar_po.construction import ga_reliabilities, order_violations, pw_sequence
from polar_po.po_core import enumerate_pairs

t = time.perf_counter()
for hook in ("default", "classic"):
    res = enumerate_pairs("punc:1/4", 1024, mother_po_hook=hook)
    s = res.summary()
    print(f"hook={hook:8s} candidates={s['candidates']} theorem={s['theorem_count']} "
          f"combined={s['combined_count']}")
print(f"enumeration took {time.perf_counter() - t:.1f}s")

pairs = res.ordered_pairs("theorem")
for order in (ga_reliabilities("punc:1/4", 1024, 2.2), pw_sequence(1024, "punc:1/4")):
    print(f"{order.provenance:10s} violates {len(order_violations(order, pairs))} of {len(pairs)} theorem pairs")
