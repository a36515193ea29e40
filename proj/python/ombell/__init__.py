"""Python bindings for the optomechanical Bell-state simulator."""

import json

from ._ombell import (  # noqa: F401
    CapacityError,
    DegenerateStateError,
    DomainError,
    FitError,
    IntegrityError,
    NoClickError,
    ParameterError,
    StiffnessError,
    analytic_concurrence,
    analytic_intensity,
    analytic_visibility,
    concurrence,
    concurrence_eigen_route,
    default_config,
    fringe_scan,
    from_MHz,
    normalize_config,
    run_write,
    to_MHz,
    two_qubit_restrict,
    visibility_fit,
    visibility_from_concurrence,
)


def config(**sections):
    """Default configuration with the given top-level sections merged in, as JSON text.

    config(truncation={"write_dims": [2, 2, 2, 2]}) overrides one field and keeps the rest.
    """
    base = json.loads(default_config())
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            base[key].update(value)
        else:
            base[key] = value
    return json.dumps(base)
