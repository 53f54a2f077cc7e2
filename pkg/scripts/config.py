#!/usr/bin/env python3
"""
Runtime settings

Numeric knobs are read from the environment (a local .env file is honoured),
so the convergence schedule can be tuned without touching code.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv(override=True)


@dataclass(frozen=True)
class Settings:
    quad_nodes: int
    fd_step: float
    richardson_levels: int
    pole_samples: int
    pole_margin: float
    coeff_degree: int
    residual_tol: float


def load_settings() -> Settings:
    return Settings(
        quad_nodes=int(os.getenv('FEYNMAN_PDE_QUAD_NODES', '64')),
        fd_step=float(os.getenv('FEYNMAN_PDE_FD_STEP', '1e-3')),
        richardson_levels=int(os.getenv('FEYNMAN_PDE_RICHARDSON', '3')),
        pole_samples=int(os.getenv('FEYNMAN_PDE_POLE_SAMPLES', '8')),
        pole_margin=float(os.getenv('FEYNMAN_PDE_POLE_MARGIN', '1e-9')),
        coeff_degree=int(os.getenv('FEYNMAN_PDE_COEFF_DEGREE', '1')),
        residual_tol=float(os.getenv('FEYNMAN_PDE_RESIDUAL_TOL', '1e-4')),
    )


SETTINGS = load_settings()
