"""
Picture of a spline domain
==========================

A biquadratic B-spline surface from the bundled problems, integrated at
tau = 1e-4.  The SVG shows the accepted cells (interior and boundary in
different colors) over the zero curve, plus the Gauss points.
"""

import sys

from implicitquad.problem import load_problem
from implicitquad.report import emit_svg

prob = load_problem("spline")
rep = prob.integrate(tau=1e-4, trace=True)
print(f"area ~ {rep.value:.10f}  cells: {rep.n_interior} in, {rep.n_boundary} boundary")

out = sys.argv[1] if len(sys.argv) > 1 else "spline.svg"
emit_svg(rep.trace, prob.function, prob.cell, out)
print("wrote", out)
