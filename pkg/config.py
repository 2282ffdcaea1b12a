"""
config.py — Central configuration for the optical binding array toolkit
"""

import math
import os
from pathlib import Path

TOOLKIT_VERSION = "0.4.0"

# ─── Paths ────────────────────────────────────────────────────────────────────
BASE_DIR      = Path(__file__).parent
SCENARIOS_DIR = BASE_DIR / "scenarios"
OUTPUT_DIR    = Path(os.getenv("OPTOBIND_OUTPUT_DIR", str(BASE_DIR / "runs")))   # one sub-dir per run

# ─── Reproducibility ──────────────────────────────────────────────────────────
DEFAULT_SEED = int(os.getenv("OPTOBIND_SEED", "7"))

# ─── Green tensor kernels ─────────────────────────────────────────────────────
GREEN_CROSSOVER = float(os.getenv("OPTOBIND_GREEN_CROSSOVER", "1e-3"))  # k·r below which the series is used
FD_STEP_KR      = float(os.getenv("OPTOBIND_FD_STEP_KR",      "1e-3"))  # Helmholtz residual stencil step, units 1/k
FORCE_STEP_KR   = float(os.getenv("OPTOBIND_FORCE_STEP_KR",   "1e-6"))  # classical force gradient step, units 1/k

# ─── Quadrature / extrapolation tolerances ────────────────────────────────────
RICHARDSON_RTOL  = float(os.getenv("OPTOBIND_RICHARDSON_RTOL", "1e-8"))
RICHARDSON_MAX_HALVINGS = int(os.getenv("OPTOBIND_RICHARDSON_MAX_HALVINGS", "12"))
DEPOL_ATOL       = 1e-12
QMC_LOG2_POINTS  = int(os.getenv("OPTOBIND_QMC_LOG2_POINTS", "16"))   # per replicate
QMC_REPLICATES   = int(os.getenv("OPTOBIND_QMC_REPLICATES",  "16"))   # 16 × 2^16 ≈ 10^6 points
RADIATION_RTOL   = float(os.getenv("OPTOBIND_RADIATION_RTOL", "1e-4"))
ANGULAR_RTOL     = float(os.getenv("OPTOBIND_ANGULAR_RTOL",   "1e-6"))
IDENTITY_RTOL    = float(os.getenv("OPTOBIND_IDENTITY_RTOL",  "1e-10"))
LARGE_PARTICLE_KL = 0.5   # warn when k·max(diameters) exceeds this

# ─── Validation gates (overridable with --force) ──────────────────────────────
MIN_SPACING_WAISTS = float(os.getenv("OPTOBIND_MIN_SPACING_WAISTS", "5"))
MIN_SPACING_KD     = float(os.getenv("OPTOBIND_MIN_SPACING_KD", str(2 * math.pi)))

# ─── Dynamics ─────────────────────────────────────────────────────────────────
DT_FRACTION     = float(os.getenv("OPTOBIND_DT_FRACTION",     "0.02"))  # default dt in trap periods
DT_MAX_FRACTION = float(os.getenv("OPTOBIND_DT_MAX_FRACTION", "0.05"))
SIM_CHUNK       = int(os.getenv("OPTOBIND_SIM_CHUNK", "256"))           # steps drawn per RNG call
MAX_RECORDED_SNAPSHOTS = int(os.getenv("OPTOBIND_MAX_SNAPSHOTS", "400"))
PSD_TOLERANCE   = 1e-12

# ─── Spectra ──────────────────────────────────────────────────────────────────
GRID_POINTS     = int(os.getenv("OPTOBIND_GRID_POINTS", "2001"))
GRID_HALF_WIDTH = 10.0   # in units of γ_g · max(1, N g/γ_g)
SPECTRUM_BLOCK  = 512    # grid points inverted per batch


# ─── Process exit codes ───────────────────────────────────────────────────────
class ExitCode:
    OK         = 0
    VALIDATION = 2
    NUMERIC    = 3
    IO         = 4


# ─── Run status values ────────────────────────────────────────────────────────
class Status:
    INIT    = "INIT"
    RUNNING = "RUNNING"
    DONE    = "DONE"
    FAILED  = "FAILED"
