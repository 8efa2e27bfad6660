"""Split points of a Minkowski sum and of a linear image into summands."""
import numpy as np

from uconvex import LinearSurjection, PBall, Polygon, split_kernel, split_sum, steiner_point
from uconvex.bodies import Ellipsoid

disc = PBall([3.0, 0.0], 1.0)
square = Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])

for c in ([3.5, 0.5], [4.0, 1.5], [2.2, 0.1]):
    s = split_sum(disc, square, c)
    print(f"c = {c}  ->  a = {np.round(s.a, 5)} in the disc, b = {np.round(s.b, 5)} in the square")

# Steiner points add under Minkowski sums, so they split c's body as well
print("Steiner point of the square:", np.round(steiner_point(square), 6))

# f(t) = 0 lies in F1(t) - F2(t); split it along the kernel of (y1, y2) -> y1 - y2
L = LinearSurjection.difference(2)
E = Ellipsoid.ellipse([2.0, 1.0], [1.0, 0.5], 0.3)
sel = split_kernel(lambda t: E, lambda t: E, L, lambda t: np.zeros(2), 0.0)
print("kernel split of 0 in E - E:", np.round(sel.a, 6), np.round(sel.b, 6))
