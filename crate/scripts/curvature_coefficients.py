"""Symbolic Laurent/grade split of F = d_-A_+ - d_+A_- + [A_+, A_-].

Fields are arbitrary functions of the light-cone coordinates (no equations
of motion are used), so every coefficient printed here is an algebraic
identity. Run: python3 scripts/curvature_coefficients.py
"""
import sympy as sp

xp, xm = sp.symbols("x_p x_m", real=True)
zeta = sp.symbols("zeta", nonzero=True)
lam, mu, beta, theta = sp.symbols("lambda mu beta theta", positive=True)
phi = sp.Function("phi", real=True)(xp, xm)
rho = sp.Function("rho", real=True)(xp, xm)
I = sp.I

P = sp.diff(phi, xp) + I * rho
M = sp.diff(phi, xm) + I * rho
A_plus = sp.Matrix([[P, lam * sp.exp(I * theta / 2)],
                    [mu * sp.exp(-I * theta / 2) * sp.exp(beta * phi) / zeta, -P]])
A_minus = sp.Matrix([[M, mu * sp.exp(I * theta / 2) * sp.exp(-beta * phi) * zeta],
                     [lam * sp.exp(-I * theta / 2), -M]])

F = sp.diff(A_plus, xm) - sp.diff(A_minus, xp) + A_plus * A_minus - A_minus * A_plus
F = F.applyfunc(lambda e: sp.expand(sp.simplify(e)))

expected = {
    "zeta^-1 E-": (F[1, 0], -1, mu * sp.exp(-I * theta / 2) * sp.exp(beta * phi) * (beta * sp.diff(phi, xm) + 2 * M)),
    "zeta^+1 E+": (F[0, 1], 1, mu * sp.exp(I * theta / 2) * sp.exp(-beta * phi) * (beta * sp.diff(phi, xp) + 2 * P)),
    "zeta^0 E+": (F[0, 1], 0, -2 * lam * sp.exp(I * theta / 2) * M),
    "zeta^0 E-": (F[1, 0], 0, -2 * lam * sp.exp(-I * theta / 2) * P),
    "zeta^0 H": (F[0, 0], 0, lam**2 - mu**2 + I * (sp.diff(rho, xm) - sp.diff(rho, xp))),
}

ok = True
for name, (entry, power, form) in expected.items():
    coeff = sp.expand(entry).coeff(zeta, power)
    residual = sp.simplify(coeff - form)
    print(f"{name}: {sp.simplify(coeff)}   matches closed form: {residual == 0}")
    ok &= residual == 0

# slots that must vanish identically
for name, entry, power in [("zeta^-1 H", F[0, 0], -1), ("zeta^-1 E+", F[0, 1], -1),
                           ("zeta^+1 H", F[0, 0], 1), ("zeta^+1 E-", F[1, 0], 1)]:
    coeff = sp.simplify(sp.expand(entry).coeff(zeta, power))
    print(f"{name}: {coeff}")
    ok &= coeff == 0

print("trace:", sp.simplify(F.trace()))
print("ALL IDENTITIES HOLD" if ok else "MISMATCH")
