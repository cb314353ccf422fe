"""Backend dispatch for the hot loops.

With numba the scalar kernels in ``_loops`` are compiled and used
everywhere. Without it, bulk-synchronous steps go to the vectorized
``_vec`` versions; the seeded random schedule is inherently sequential
and runs ``_loops`` in the interpreter.
"""
import numpy as np

from . import _loops, _vec
from ._accel import HAS_NUMBA

INF = _loops.INF

# Tests flip this to exercise the numpy path while numba is importable.
ACCEL = HAS_NUMBA


def backend_name():
    return "numba" if ACCEL else "numpy"


def core_numbers(indptr, indices):
    if ACCEL:
        return _loops.core_numbers(indptr, indices)
    return _vec.core_numbers(indptr, indices)


def one_to_one_round(g, st, order, immediate, optimized):
    """Advance the array-form one-to-one state ``st`` by one round."""
    if ACCEL or immediate:
        return int(_loops.round_step(order, immediate, optimized, g.indptr, g.indices, g.rev,
                                     st.core, st.est, st.sent, st.dirty, st.changed,
                                     st.sent_count, st.outbox))
    return _vec.sync_round(optimized, g.indptr, g.indices, g.rev, g.owner, st.core, st.est,
                           st.sent, st.dirty, st.changed, st.sent_count)


def improve_passes(n_owned, indptr, indices, est, changed):
    """Run the host-local fixpoint; returns the mask of decreased owned nodes."""
    decreased = np.zeros(n_owned, bool)
    fn = _loops.improve_passes if ACCEL else _vec.improve_passes
    fn(n_owned, indptr, indices, est, changed, decreased)
    return decreased
