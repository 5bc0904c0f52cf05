"""Ambrosio-Tortorelli quasi-static fracture evolution (Python bindings)."""

from ._core import (
    ATParams,
    Field,
    Grid,
    InvalidArgument,
    QuadraticForm,
    SolverError,
    alternate_minimize,
    assemble_phase_form,
    assemble_weighted_stiffness,
    audit_run_directory,
    build_grid,
    elliptic_energy,
    mm_energy,
    run,
    select_levels,
    sharp_oracle_1d,
    sharp_oracle_strip,
    solve_box_qp,
    sweep,
    total_energy,
    work_increment,
)

__all__ = [
    "ATParams",
    "Field",
    "Grid",
    "InvalidArgument",
    "QuadraticForm",
    "SolverError",
    "alternate_minimize",
    "assemble_phase_form",
    "assemble_weighted_stiffness",
    "audit_run_directory",
    "build_grid",
    "elliptic_energy",
    "mm_energy",
    "run",
    "select_levels",
    "sharp_oracle_1d",
    "sharp_oracle_strip",
    "solve_box_qp",
    "sweep",
    "total_energy",
    "work_increment",
]
