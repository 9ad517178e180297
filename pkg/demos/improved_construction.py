"""PW information sets repaired with partial-order pairs, and a short paired FER run.

At K = 384 the PW set already respects every pair, so the repair is a
no-op; K = 376 is one of the sizes where it makes a swap.
"""

import sys

from polar_po.codec_sim import CodeConfig, compare_codes
from polar_po.construction import improve_with_pos, pw_sequence, set_violations
from polar_po.po_core import enumerate_pairs
from polar_po.ratematch import RateMatchSpec

spec = RateMatchSpec.parse("punc:1/4")
pairs = enumerate_pairs(spec, 1024).ordered_pairs("combined")
pw = pw_sequence(1024, spec)

for K in (369, 376, 384, 391):
    imp = improve_with_pos(pw, pairs, K, spec)
    print(f"K={K}: PW violations={len(set_violations(imp.base_set, pairs))} swaps={imp.swaps}")

K = 376
imp = improve_with_pos(pw, pairs, K, spec)
a = CodeConfig(1024, K, spec, imp.info_set, label="improved")
b = CodeConfig(1024, K, spec, imp.base_set, label="PW")
trials = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
for L in (1, 8):
    r = compare_codes(a, b, 1.75, L, max_trials=trials, target_errors=trials, seed=1)
    print(f"L={L}: improved {r.errors_a}/{r.trials}, PW {r.errors_b}/{r.trials}, p={r.p_value:.3f}")
