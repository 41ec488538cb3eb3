"""Affine torus bundle workbench.

Exact integer linear algebra, local-coefficient cohomology, Leray-Serre
spectral sequences, topological T-duality and twisted K-theory for torus
bundles with monodromy, computed by the C++ core.
"""

from _attb import (  # noqa: F401
    cohomology,
    cokernel,
    deviations,
    dualize_pair,
    hori_selftest,
    kernel_lattice,
    normal_form,
    run_cli,
    smith_normal_form,
    total_cohomology,
    twisted_k,
)

__all__ = [
    "cohomology",
    "cokernel",
    "deviations",
    "dualize_pair",
    "hori_selftest",
    "kernel_lattice",
    "normal_form",
    "run_cli",
    "smith_normal_form",
    "total_cohomology",
    "twisted_k",
]
