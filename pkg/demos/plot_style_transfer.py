"""
Imposing a design onto a bridge
===============================

Resample each design cloud along the density of a bridge, then blend the
bridge towards that resampled design.
"""

import os
import sys

from pcblend.datagen import DESIGN_KINDS, gen_design, gen_fixture
from pcblend.io import write_ply
from pcblend.pipelines import style_transfer_sweep
from pcblend.svg import export_svg

out = sys.argv[1] if len(sys.argv) > 1 else "demo_out"
os.makedirs(out, exist_ok=True)

# 16384 points in clusters of 2048
bridge = gen_fixture("bridge", 16384, seed=0)
export_svg(bridge, "y", os.path.join(out, "bridge.svg"))

for kind in DESIGN_KINDS:
    design = gen_design(kind, 65536, seed=1)
    results = style_transfer_sweep(bridge, design, [0.5, 0.0], 8, seed=2, workers=4)
    export_svg(results[0].style_source, "y", os.path.join(out, f"bridge_{kind}_source.svg"))
    for res in results:
        name = f"bridge_{kind}_{res.lam:.2f}"
        write_ply(res.points, os.path.join(out, name + ".ply"))
        export_svg(res.points, "y", os.path.join(out, name + ".svg"))
    print(kind, "done")
