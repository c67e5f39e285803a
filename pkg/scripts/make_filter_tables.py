"""Regenerate the reflectance tables bundled under data/.

One CSV per reference grating, sampled on a wavelength grid wide enough
to cover the detuned source-B bands.  Run from anywhere; paths are
anchored to this file.
"""

from __future__ import annotations

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cwhom.presets import REFERENCE_FILTERS
from cwhom.spectral import FrequencyGrid, fbg_reflectivity_fwhm, fbg_response
from cwhom.units import angular_to_wavelength_pm

OUT_DIR = os.path.normpath(os.path.join(os.path.dirname(__file__), "..", "data"))
N_ROWS = 401
SPAN_FACTOR = 4.0


def main() -> None:
    os.makedirs(OUT_DIR, exist_ok=True)
    for name, model in REFERENCE_FILTERS.items():
        fwhm = fbg_reflectivity_fwhm(model)
        grid = FrequencyGrid(n_points=N_ROWS, span=SPAN_FACTOR * fwhm)
        refl = np.abs(fbg_response(model, grid).amp) ** 2
        path = os.path.join(OUT_DIR, f"filter_{name}.csv")
        with open(path, "w", newline="") as fh:
            fh.write("wavelength_pm,reflectance\n")
            for w, r in zip(grid.omega, refl):
                fh.write(f"{angular_to_wavelength_pm(w):.12g},{r:.12g}\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
