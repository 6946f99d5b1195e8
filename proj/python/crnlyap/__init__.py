"""Mass-action reaction network analysis, CBP transformations, and Lyapunov functions."""

from pathlib import Path

from ._core import (
    CbpResult,
    Compound,
    LyapunovFunction,
    Network,
    NetworkError,
    NumericalError,
    analyze,
    apply_scaling,
    build_compound,
    build_lyapunov,
    build_pseudo_helmholtz,
    enumerate_cbp,
    feasible_scalings,
    find_equilibrium,
    integrate,
    parse_compound,
    parse_network,
    pde_residual,
    stability_conditions,
    vector_field,
    verify_conjugacy,
)

__version__ = "0.1.0"


def load(path):
    """Read a ``.crn`` file as a Network or a ``.crnc`` file as a Compound."""
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".crnc":
        return parse_compound(text)
    return parse_network(text)


__all__ = [
    "CbpResult",
    "Compound",
    "LyapunovFunction",
    "Network",
    "NetworkError",
    "NumericalError",
    "analyze",
    "apply_scaling",
    "build_compound",
    "build_lyapunov",
    "build_pseudo_helmholtz",
    "enumerate_cbp",
    "feasible_scalings",
    "find_equilibrium",
    "integrate",
    "load",
    "parse_compound",
    "parse_network",
    "pde_residual",
    "stability_conditions",
    "vector_field",
    "verify_conjugacy",
]
