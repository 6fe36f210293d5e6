"""The slope-cap transform: how a flux limiter acts on a vertex trace.

cap_a[psi](t) = min { psi(r) + a (t - r) : r <= t } is the largest function
below psi whose time slope never exceeds a < 0.  On a grid the one-step
recursion is exact, and an O(n^2) scan of the definition is the oracle.
"""

import numpy as np

import hjnet as hj

print(__doc__)

dt = 0.125
t = dt * np.arange(25)
psi = np.where(t < 1.5, 0.25 * np.sin(4.0 * t), 0.25 * np.sin(6.0) - (t - 1.5))
series = hj.TimeSeries(0.0, dt, psi)
a = -0.75

capped = hj.apply_g(series, a)
brute = hj.apply_g_bruteforce(series, a)
contact = hj.contact_set(series, a)

print(f"cap slope a = {a}")
print(f"{'t':>6} {'psi':>9} {'capped':>9} {'contact':>8}")
for k in range(0, 25, 3):
    print(f"{t[k]:>6.3f} {psi[k]:>9.4f} {capped.values[k]:>9.4f} "
          f"{'*' if contact[k] else '':>8}")

print(f"\nrecursion vs O(n^2) oracle, max |diff| = "
      f"{np.max(np.abs(capped.values - brute.values)):.1e}")
print(f"all forward slopes <= a: "
      f"{np.max(np.diff(capped.values) / dt) <= a + 1e-12}")
print(f"idempotent: "
      f"{np.array_equal(hj.apply_g(capped, a).values, capped.values)}")

lifted = hj.apply_g(hj.TimeSeries(0.0, dt, psi + 1.0), a)
print(f"constant equivariance: max |cap(psi+1) - (cap(psi)+1)| = "
      f"{np.max(np.abs(lifted.values - capped.values - 1.0)):.1e}")

rough = hj.TimeSeries(0.0, dt, psi + 0.05 * np.cos(7.0 * t))
print(f"nonexpansive: |cap(psi~) - cap(psi)| = "
      f"{np.max(np.abs(hj.apply_g(rough, a).values - capped.values)):.4f}"
      f" <= |psi~ - psi| = {np.max(np.abs(rough.values - psi)):.4f}")
