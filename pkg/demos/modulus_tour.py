"""Estimate moduli of convexity and run the inequality battery on a few bodies."""
import numpy as np

from uconvex import PBall, Polygon, PowerCap, estimate_modulus, verify_battery
from uconvex.bodies import diameter

bodies = {
    "unit disc": PBall([0.0, 0.0], 1.0),
    "l4 ball": PBall([0.0, 0.0], 1.0, p=4.0),
    "cubic cap": PowerCap(3.0),
    "unit square": Polygon([[0, 0], [1, 0], [1, 1], [0, 1]]),
}

for name, body in bodies.items():
    d = diameter(body)
    eps = np.linspace(d / 20, 0.95 * d, 20)
    table = estimate_modulus(body, eps, strict=False)
    report = verify_battery(body, table, expect_uniformly_convex=name != "unit square", trials=200)
    print(f"{name:12s} diam {d:.4f}  delta(d/2) = {table(d / 2):.5f}  battery: {report.status}")

# the disc is the equality case: delta(eps) = 1 - sqrt(1 - eps^2 / 4)
disc = estimate_modulus(bodies["unit disc"], [0.5, 1.0, 1.5])
print("disc estimate  ", np.round(disc.delta, 6))
print("disc closed form", np.round(1 - np.sqrt(1 - np.array([0.5, 1.0, 1.5]) ** 2 / 4), 6))
