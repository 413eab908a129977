"""Decides which number-growth relation follows from the Dirac equations.

psi_+_t = -i M psi_+ - d_x psi_-,  psi_-_t = i M psi_- - d_x psi_+,
M = m_f exp(i theta) exp(beta phi). Pointwise, only the values of the
components and their first x-derivatives enter, so both are independent
real symbols; time derivatives are replaced by the right-hand sides.
Run: python3 scripts/continuity_oracle.py
"""
import sympy as sp

mf, beta, theta = sp.symbols("m_f beta theta", positive=True)
phi = sp.symbols("phi", real=True)
a, b, c, d, ax, bx, cx, dx = sp.symbols("a b c d a_x b_x c_x d_x", real=True)
psi_p, psi_m = a + sp.I * b, c + sp.I * d
psi_p_x, psi_m_x = ax + sp.I * bx, cx + sp.I * dx
M = mf * sp.exp(sp.I * theta) * sp.exp(beta * phi)

dt_p = -sp.I * M * psi_p - psi_m_x
dt_m = sp.I * M * psi_m - psi_p_x


def re(z):
    return sp.re(sp.expand_complex(z))


n_dens = a**2 + b**2 + c**2 + d**2
rho_bar = a**2 + b**2 - c**2 - d**2
J_x = 2 * (ax * c + a * cx + bx * d + b * dx)  # d/dx of 2 Re(psi_+^* psi_-)
source = 2 * mf * sp.sin(theta) * sp.exp(beta * phi)
dt_abs_p = 2 * re(sp.conjugate(psi_p) * dt_p)
dt_abs_m = 2 * re(sp.conjugate(psi_m) * dt_m)

adjoint = sp.simplify(dt_abs_p + dt_abs_m + J_x - source * rho_bar)
bilinear = sp.simplify(dt_abs_p - dt_abs_m + J_x - source * n_dens)
transport = 4 * re(sp.conjugate(psi_m) * psi_p_x)

print("adjoint residual:", adjoint)
print("bilinear residual:", bilinear)
print("bilinear residual - 4 Re(psi_-^* d_x psi_+):", sp.simplify(bilinear - transport))
print("identity: adjoint" if adjoint == 0 and bilinear != 0 else "UNEXPECTED")
