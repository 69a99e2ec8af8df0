"""
Interval certificates versus corner sampling
============================================

The oval 0.98(x^2 - y^2) = (x^2 + y^2)^2 has two lobes that touch at the
origin.  On the unit square [0,1]^2 every corner value is <= 0, so corner
sampling calls the cell exterior, yet the right lobe passes through it.  An
interval enclosure of f over the cell cannot miss that.
"""

from implicitquad import Cell, ImplicitFunction, classify_by_corners, classify_by_interval
from implicitquad import integrate

f = ImplicitFunction.from_expression("0.98*(x^2 - y^2) - (x^2 + y^2)^2")
cell = Cell(0, 1, 0, 1)

print("corners :", classify_by_corners(f, cell).name)
print("interval:", classify_by_interval(f, cell).name)

bbox = (-1, 1, -1, 1)

# the exact area is 0.98; corner sampling never looks inside [0,1]^2 and
# its mirror images, so it loses the whole domain
for clf in ("interval", "corners"):
    rep = integrate(f, "1", bbox, tau=1e-6, classifier=clf)
    print(f"{clf:<9} value={rep.value:.10f} warnings={rep.warnings}")
