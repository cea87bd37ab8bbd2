# The Dubrovnik engine and the three-term adjoint projector: closed
# forms for the cabled unknot, the a = s collapse to 1, and the exact
# derivative identities that tie the Kauffman side to the additive
# torus-family invariant.

from fractions import Fraction

from skeinpoly.diagrams import (
    BraidWord,
    braid_closure,
    kauffman_projector_coefficients,
    parse_diagram,
)
from skeinpoly.dskein import Torus2, qtilde
from skeinpoly.kauffman import (
    KauffmanEngine,
    k_adjoint,
    kauf_alpha_eq_s_check,
    kauf_derivative_at_s,
    kauffman_lambda,
)
from skeinpoly.rings import LaurentPoly, RatFunc, specialize

engine = KauffmanEngine()
u0 = parse_diagram("O:1")
trefoil = braid_closure(BraidWord(2, (1, 1, 1)))

c_par, c_twist, c_turn = kauffman_projector_coefficients()
print("Projector weights (parallel, twist, turnback):")
for c in (c_par, c_twist, c_turn):
    print("  ", c.to_text())

print("\nD(circle) =", kauffman_lambda(u0, engine).to_text())
ku0 = k_adjoint(u0, engine)
print("K_ad(unknot) =", ku0.to_text())
print("  at (s,a) = (2,3):", ku0.subs_int("s", 2).subs_int("a", 3).to_text(),
      " (the convention pin: 176/81)")

print("\nAt a = s every adjoint value collapses to 1:")
for name, d in (("unknot", u0), ("hopf", braid_closure(BraidWord(2, (1, 1)))), ("trefoil", trefoil)):
    print(f"  {name}: {kauf_alpha_eq_s_check(d, engine) == RatFunc(1)}")

print("\nFirst-order behavior in (a - s):")
s = LaurentPoly.var("s")
der_u0 = kauf_derivative_at_s(u0, engine)
print("  unknot:", der_u0.to_text())
der_k3 = kauf_derivative_at_s(trefoil, engine)
phi = {"sp": RatFunc(2 * s ** -2 + s ** 4), "sm": RatFunc(2 * s ** 2 + s ** -4)}
reconstructed = RatFunc(2, s) * specialize(qtilde(Torus2(3)), phi) + der_u0
print("  trefoil equals (2/s)*phi(torus-family value) + unknot term:",
      der_k3 == reconstructed)
print("  numeric probe at s = 2:", der_k3.subs_int("s", 2).to_text(),
      "=", Fraction(-103427, 1280))
