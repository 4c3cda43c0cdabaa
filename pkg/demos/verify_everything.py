"""Run every model's verification suite and a deliberate failure.

Each suite re-derives what its model claims: factorization identities,
vacuum annihilation, biorthogonality, eigen-residuals, intertwining, and
(where defined) deformation bounds and state-family identities.  The last
block perturbs one superpotential to show the checks actually bite.
"""

from susyq import suite_names, verify_model, verify_pair

for name in suite_names():
    suite = verify_model(name)
    total = sum(1 for _ in suite.checks())
    passed = sum(1 for c in suite.checks() if c.passed)
    print(f"{name}: {passed}/{total}")
    for section, checks in suite.sections.items():
        worst = max((c.residual for c in checks if c.residual is not None),
                    default=0.0)
        print(f"  {section:16s} {sum(c.passed for c in checks):3d}/{len(checks):<3d}"
              f" worst residual {worst:.2e}")

# user-supplied pairs get the generic core: factorization plus vacua
suite = verify_pair("x + 0.2*tanh(x)", "x")
print("user pair:", "all pass" if suite.all_pass() else "FAILURES")

# a perturbed second superpotential must break intertwining, not factorization
broken = verify_model("pseudo-bosonic", perturb_wb="0.05 * x")
print("perturbed pseudo-bosonic all_pass:", broken.all_pass())
for section, checks in broken.sections.items():
    bad = [c for c in checks if not c.passed]
    if bad:
        print(f"  {section}: {len(bad)} failing, e.g. {bad[0].check!r}")
