"""Wigner-function maps of the forming Cherenkov photon field.

Evaluates the master integral over the formation time on an (X, Y) grid in
the plane transverse to the electron at several evolution windows t_out.
Negative regions mark non-classical interference; slightly above the
Cherenkov angle the central region turns negative as t_out grows.

    python3 demos/wigner_map.py
"""

import math
from pathlib import Path

import numpy as np

from cherenkov_wigner.kinematics import ElectronPacket, Momentum3, \
    momentum_magnitude
from cherenkov_wigner.medium import ConstantMedium
from cherenkov_wigner.svgplot import heatmap_svg
from cherenkov_wigner.wignerfield import (EmissionScenario, central_value,
                                          default_grid, evaluate_map)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

beta, n, omega, sigma = 0.99, 1.4, 1e-5, 1e-5
theta_ch = math.acos(1 / (beta * n))
mean = Momentum3(0, 0, momentum_magnitude(beta))
packet = ElectronPacket(mean, sigma)

for frac in (1.0, 1.1):
    for t_out in (1e6, 7e6):
        sc = EmissionScenario(packet=packet, medium=ConstantMedium(n),
                              omega=omega, theta_k=frac * theta_ch,
                              phi_k=math.pi / 2, t_out=t_out)
        grid = default_grid(sc, nx=48, ny=48)
        wmap = evaluate_map(sc, grid)
        tag = f"th{frac:.2f}_tout{t_out:.0e}".replace("+0", "")
        csv = OUT / f"wigner_{tag}.csv"
        svg = OUT / f"wigner_{tag}.svg"
        wmap.to_csv(csv)
        heatmap_svg(svg, wmap.values,
                    (grid.x_min, grid.x_max, grid.y_min, grid.y_max),
                    title=f"W, theta_k = {frac:.2f} theta_Ch, "
                          f"t_out = {t_out:.0e} t_c",
                    xlabel="X [lambda_c]", ylabel="Y [lambda_c]")
        neg = float(np.mean(wmap.values < 0))
        print(f"theta_k = {frac:.2f} theta_Ch, t_out = {t_out:.0e}: "
              f"center {central_value(wmap):+.3f}, "
              f"min {wmap.values.min():+.3f}, negative fraction {neg:.2f}")
print(f"wrote maps under {OUT}")
