"""Market, traffic, and spectrum equilibrium solver.

Thin re-export of the compiled core.  Installed wheels carry the extension
inside this package; in a plain CMake build tree it sits next to it on
PYTHONPATH, so both layouts are tried.
"""

try:
    from ._core import (
        Instance,
        arc_flows,
        generate_network,
        generate_wireless,
        load_instance,
        objective,
        parse_instance,
        path_costs,
        run_experiment,
        save_instance,
        solve,
        solve_penalized,
        verify,
    )
except ImportError:
    from _core import (
        Instance,
        arc_flows,
        generate_network,
        generate_wireless,
        load_instance,
        objective,
        parse_instance,
        path_costs,
        run_experiment,
        save_instance,
        solve,
        solve_penalized,
        verify,
    )

__version__ = "0.1.0"

__all__ = [
    "Instance",
    "arc_flows",
    "generate_network",
    "generate_wireless",
    "load_instance",
    "objective",
    "parse_instance",
    "path_costs",
    "run_experiment",
    "save_instance",
    "solve",
    "solve_penalized",
    "verify",
]
