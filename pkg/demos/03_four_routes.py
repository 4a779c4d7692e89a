"""Four independent routes to the same number.

The Grassmann integral, the binomial expansion, the closed forms and the Wick
enumeration share no code beyond the pair kernel, so their agreement is a
strong check on each of them.
"""

from zcorr.correlators import CorrelationQuery, evaluate

for k, m, r in [(1, 1, 0.5), (2, 2, 1.0), (1, 3, 0.7), (3, 3, 2.0), (2, 4, 0.25)]:
    q = CorrelationQuery(2, k, m, r)
    methods = ["berezin", "expansion"]
    if k <= 3 or k == m:
        methods.append("closed")
    if k == m:
        methods.append("wick")
    vals = {meth: evaluate(q, meth) for meth in methods}
    spread = max(vals.values()) - min(vals.values())
    print(f"(k,m,r)=({k},{m},{r}): " + "  ".join(f"{a}={v:.14g}" for a, v in vals.items())
          + f"  spread {spread:.1e}")
