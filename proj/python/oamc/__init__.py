"""Turbulent OAM channel simulation, compressive tomography and correction."""

from ._core import (
    GridSpec,
    OamcError,
    assemble_kraus,
    correct_state,
    decompose,
    extract_state_vector,
    fidelity,
    free_space_step,
    fried_parameter,
    ggm_element,
    input_state,
    lg_mode,
    measure_state,
    negativity,
    phase_screen,
    reconstruct,
    run_experiment,
    sample_measurement_set,
    solve_z_for_w,
    trace_distance,
)

__all__ = [
    "GridSpec",
    "OamcError",
    "assemble_kraus",
    "correct_state",
    "decompose",
    "extract_state_vector",
    "fidelity",
    "free_space_step",
    "fried_parameter",
    "ggm_element",
    "input_state",
    "lg_mode",
    "measure_state",
    "negativity",
    "phase_screen",
    "reconstruct",
    "run_experiment",
    "sample_measurement_set",
    "solve_z_for_w",
    "trace_distance",
]
