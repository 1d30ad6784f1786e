"""Odd power series of phi^2 + phi'^2 + 2 phi phi'' = 1 with phi(0)=0, phi'(0)=1."""
import sympy as sp

r = sp.symbols("r")
cs = sp.symbols("c3 c5 c7 c9")
phi = r + sum(c * r ** (2 * k + 3) for k, c in enumerate(cs))
expr = sp.expand(phi**2 + sp.diff(phi, r) ** 2 + 2 * phi * sp.diff(phi, r, 2) - 1)
sol = {}
for k, c in enumerate(cs):
    coeff = expr.coeff(r, 2 * k + 2).subs(sol)
    sol[c] = sp.solve(coeff, c)[0]
print(sol)
