"""Near-field snapshot: the photon energy density mirrors the emitting
packet's probability density, so the map is a direct image of the
spreading electron.

    python3 demos/packet_snapshot.py
"""

import math
from pathlib import Path

from cherenkov_wigner.kinematics import ElectronPacket, Momentum3, \
    momentum_magnitude
from cherenkov_wigner.medium import ConstantMedium
from cherenkov_wigner.svgplot import heatmap_svg
from cherenkov_wigner.wignerfield import (EmissionScenario, MapGrid,
                                          near_field_snapshot)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

beta, sigma = 0.5, 1e-2
mean = Momentum3(0.0, momentum_magnitude(beta), 0.0)  # drift in the map plane
packet = ElectronPacket(mean, sigma)
sc = EmissionScenario(packet=packet, medium=ConstantMedium(1.5), omega=1e-5,
                      theta_k=0.5, phi_k=math.pi / 2, t_out=1.0)

eps = math.sqrt(1 + mean.mag2)
t_diffraction = eps / sigma ** 2
print(f"electron diffraction time: {t_diffraction:.0f} t_c")

for t in (0.0, t_diffraction, 2 * t_diffraction):
    width = math.sqrt(1 + (t / t_diffraction) ** 2) / sigma
    cy = beta * t
    grid = MapGrid(-6 * width, 6 * width, 101, cy - 6 * width,
                   cy + 6 * width, 101)
    snap = near_field_snapshot(sc, grid, t)
    svg = OUT / f"snapshot_t{t:.0f}.svg"
    heatmap_svg(svg, snap.values,
                (grid.x_min, grid.x_max, grid.y_min, grid.y_max),
                title=f"packet snapshot, t = {t:.0f} t_c",
                xlabel="X [lambda_c]", ylabel="Y [lambda_c]", signed=False)
    print(f"t = {t:8.0f}: width {snap.meta['sigma_perp']:7.1f} lambda_c, "
          f"center Y = {snap.meta['center_y']:8.1f}, "
          f"mass on grid {snap.mass():.4f}")
print(f"wrote snapshots under {OUT}")
