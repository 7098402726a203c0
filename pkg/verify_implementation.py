"""
Smoke verification of the D-module engine.
Recomputes the hand-checked corpus values and prints PASS/FAIL per check.
"""

import sys

from src.checks.gaussmanin_suite import CORPUS_ORACLE
from src.checks.pullback_suite import squaring_instance
from src.dmodules.conn import Connection, is_integrable
from src.dmodules.exactalg import LocRing
from src.dmodules.gaussmanin import compare_routes, corpus_families, gm_h0, gm_route_c, picard_fuchs
from src.dmodules.homalg import leray_cone_chart, truncated_exactness
from src.dmodules.pullback import compare_pullbacks
from src.dmodules.transfer import TransferChart, lambda_map
from src.dmodules.weyl import WeylOp, commutator, transpose

failures = 0


def report(label: str, ok: bool) -> None:
    global failures
    print(f"{'PASS' if ok else 'FAIL'}: {label}")
    if not ok:
        failures += 1


print("=" * 80)
print("D-MODULE ENGINE - SMOKE VERIFICATION")
print("=" * 80)
print()

# Check 1: Weyl algebra
print("CHECK 1: Weyl Algebra")
print("-" * 80)
line = LocRing(('x',))
d = WeylOp.derivation(line, 'x')
x = WeylOp.scalar(line, 'x')
report("[d_x, x] = 1", commutator(d, x) == WeylOp.scalar(line, 1))
report("transpose(d_x) = -d_x", transpose(d) == -d)
print()

# Check 2: Curvature
print("CHECK 2: Curvature")
print("-" * 80)
plane = LocRing(('x', 'y'))
report("d + y dx + x dy is flat", is_integrable(Connection(plane, 1, {'x': [['y']], 'y': [['x']]})))
curved = Connection(plane, 2, {'x': [['0', '1'], ['0', '0']], 'y': [['0', '0'], ['1', '0']]})
report("non-commuting constant matrices are curved", not is_integrable(curved))
print()

# Check 3: Inverse image along x -> x^2
print("CHECK 3: Pullback Along the Squaring Map")
print("-" * 80)
f, C, _ = squaring_instance()
comparison = compare_pullbacks(f, C)
report("chain rule and D-module routes agree", comparison.equal)
report("matrix is 2/(3*x)", comparison.to_dict()['matrices'] == {'x': [['2/(3*x)']]})
print()

# Check 4: Transfer module
print("CHECK 4: Transfer Module")
print("-" * 80)
chart = TransferChart(plane, ('x',), ('y',))
d_y = WeylOp.derivation(plane, 'y')
report("lambda(d_y) = -d_y", lambda_map(chart, d_y).operator == -d_y)
report("lambda(d_x) = 0", not lambda_map(chart, WeylOp.derivation(plane, 'x')))
print()

# Check 5: Truncated exactness
print("CHECK 5: Truncated Exactness")
print("-" * 80)
for kind, n, bound in (('leftDR', 1, 4), ('rightSpencer', 1, 4), ('leftDR', 2, 3), ('rightSpencer', 2, 3)):
    report(f"{kind} n={n} D={bound}", truncated_exactness(kind, n, bound).passed)
report("Leray cone certificate D=3", leray_cone_chart(3).certificate()['passed'])
print()

# Check 6: Gauss-Manin corpus
print("CHECK 6: Gauss-Manin Corpus")
print("-" * 80)
families = corpus_families()
for name, expected in CORPUS_ORACLE.items():
    family = families[name]
    report(f"{name}: oracle {expected}", gm_route_c(family).strings() == expected)
    report(f"{name}: routes agree", compare_routes(family).routes_agree)
quadratic = families['quadratic']
report("Picard-Fuchs of x^2 - lam is d_lam + 1/(2*lam)",
       str(picard_fuchs(quadratic, gm_route_c(quadratic), 0)) == 'd_lam + 1/(2*lam)')
report("H0 of the twisted line is [[1]]", gm_h0(families['twisted_linear']).strings() == [['1']])
print()

# Final Summary
print("=" * 80)
print("VERIFICATION COMPLETE" if failures == 0 else f"VERIFICATION FAILED ({failures} checks)")
print("=" * 80)
sys.exit(1 if failures else 0)
