"""ZD defender strategies for repeated moving-target-defense games.

Games are dicts with keys ``k``, ``u_d_cov``, ``u_d_unc``, ``u_a_cov`` and
``u_a_unc``, the same schema the ``zdmtd`` CLI reads.
"""

from ._zdmtd import (
    ConstructionError,
    FormatError,
    best_response,
    compare,
    default_suites,
    emit_mip,
    long_run_utilities,
    oneshot_sse,
    simulate,
    solve,
    suite_game,
    verify,
)

__all__ = [
    "ConstructionError",
    "FormatError",
    "best_response",
    "compare",
    "default_suites",
    "emit_mip",
    "long_run_utilities",
    "oneshot_sse",
    "simulate",
    "solve",
    "suite_game",
    "verify",
]
