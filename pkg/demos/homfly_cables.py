# The HOMFLY-PT engine end to end: plain values, the framed extension,
# adjoint antiparallel 2-cables, and the series expansion that exposes
# the writhe and the degree-2 Vassiliev coefficient.

from skeinpoly.diagrams import BraidWord, LinkDiagram, add_kinks, braid_closure
from skeinpoly.homfly import (
    HomflyEngine,
    conjecture_sides,
    framed_h,
    h_adjoint,
    homfly_p,
    unknot_diagram,
    v2,
)
from skeinpoly.rings import RatFunc, poly_to_text, series_exp_v

engine = HomflyEngine()

trefoil = braid_closure(BraidWord(2, (1, 1, 1)))
print("P(trefoil)      =", poly_to_text(homfly_p(trefoil, engine)))
print("P(hopf link)    =", poly_to_text(homfly_p(braid_closure(BraidWord(2, (1, 1))), engine)))
print("V2(trefoil)     =", v2(trefoil, engine))

kinked = add_kinks(LinkDiagram((), (), 1), 0, 1)
print("H(+1 unknot)    =", poly_to_text(framed_h(kinked, engine)))

print("\nAdjoint cabled values (framed; blackboard framing of the diagram):")
print("H_ad(unknot)    =", poly_to_text(h_adjoint(unknot_diagram(), engine)))
print("H_ad(trefoil)   =", poly_to_text(h_adjoint(trefoil, engine)))

ratio = RatFunc(h_adjoint(trefoil, engine)) / RatFunc(h_adjoint(unknot_diagram(), engine))
print("\nThe ratio's series under v = exp(-d/2), z formal:")
print(" ", series_exp_v(ratio, 3).to_text())
print("  (the d-coefficient is the writhe; the d^2 coefficient splits as")
print("   writhe^2/2 - 2*V2 plus a z-polynomial)")

print("\nThe 0-framed comparison against the torus-family invariant:")
zero_framed = add_kinks(trefoil, 0, -3)
from skeinpoly.dskein import FramingShift, Torus2, qtilde
lhs, rhs = conjecture_sides(zero_framed, qtilde(FramingShift(Torus2(3), -3)), engine)
print("  limit side:   ", lhs.to_text())
print("  stated side:  ", rhs.to_text())
print("  (these differ by design: the stated normalization divides by z^2")
print("   where the verified expansion law multiplies; see the tests)")
