"""Python bindings for the qxtalk crosstalk simulator."""

from ._core import (
    Circuit,
    ScheduledCircuit,
    aggregate,
    build_grover,
    classical_fidelity,
    default_noise_json,
    emit_qasm,
    idle_windows,
    ideal_distribution,
    layout_preset,
    pad_dd,
    parse_qasm,
    records_to_csv,
    refocusing_check,
    render_svg,
    run_experiments,
    schedule,
    simulate,
    total_variation,
)

__all__ = [
    "Circuit",
    "ScheduledCircuit",
    "aggregate",
    "build_grover",
    "classical_fidelity",
    "default_noise_json",
    "emit_qasm",
    "idle_windows",
    "ideal_distribution",
    "layout_preset",
    "pad_dd",
    "parse_qasm",
    "records_to_csv",
    "refocusing_check",
    "render_svg",
    "run_experiments",
    "schedule",
    "simulate",
    "total_variation",
]
