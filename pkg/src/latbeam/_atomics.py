"""Lock-free primitives shared by the parallel kernels.

Real atomic read-modify-write instructions are emitted through tiny LLVM
intrinsics so worker threads can update shared numpy arrays without locks:
an unsigned 64-bit min for token recombination and a 64-bit fetch-add for
work claiming and shard cursors.  Unsigned integer min is enough for cost
ordering because costs travel through a monotone bit encoding (see
``packing``), under which float comparison and unsigned comparison agree.

When the accelerated engine is unavailable or disabled through the
``LATBEAM_NUMBA`` environment variable (set it to ``0`` to force the pure
numpy fallback), the same single-op API is served by a lock; the decoder
then runs its vectorised fallback passes and never contends on it.
"""

from __future__ import annotations

import os
import threading

import numpy as np

from .errors import UsageError

_ENV = os.environ.get("LATBEAM_NUMBA", "").strip()

try:
    if _ENV == "0":
        raise ImportError("accelerated engine disabled by LATBEAM_NUMBA=0")
    import numba
    from numba import njit, types
    from numba.core import cgutils
    from numba.extending import intrinsic
    from llvmlite import ir as llvm_ir

    HAVE_NUMBA = True
except ImportError:
    if _ENV not in ("", "0"):
        raise
    HAVE_NUMBA = False

_active = HAVE_NUMBA


def numba_active() -> bool:
    """True when the accelerated kernels are the current engine."""
    return _active


def use_numba(enabled: bool) -> None:
    """Switch engines at runtime (used by benchmarks and tests).

    Enabling requires the accelerated engine to be importable and not
    vetoed by ``LATBEAM_NUMBA=0``.
    """
    global _active
    if enabled and not HAVE_NUMBA:
        raise UsageError("accelerated engine is not available in this process")
    _active = bool(enabled)


if HAVE_NUMBA:

    @intrinsic
    def _atomic_umin_u64(typingctx, arr_t, idx_t, val_t):
        if not (isinstance(arr_t, types.Array) and arr_t.dtype == types.uint64):
            return None
        sig = types.uint64(arr_t, types.intp, types.uint64)

        def codegen(context, builder, signature, args):
            arr, idx, val = args
            aryty = signature.args[0]
            ary = context.make_array(aryty)(context, builder, arr)
            ptr = cgutils.get_item_pointer(
                context, builder, aryty, ary, (idx,), wraparound=False
            )
            return builder.atomic_rmw("umin", ptr, val, ordering="monotonic")

        return sig, codegen

    @intrinsic
    def _atomic_add_i64(typingctx, arr_t, idx_t, val_t):
        if not (isinstance(arr_t, types.Array) and arr_t.dtype == types.int64):
            return None
        sig = types.int64(arr_t, types.intp, types.int64)

        def codegen(context, builder, signature, args):
            arr, idx, val = args
            aryty = signature.args[0]
            ary = context.make_array(aryty)(context, builder, arr)
            ptr = cgutils.get_item_pointer(
                context, builder, aryty, ary, (idx,), wraparound=False
            )
            return builder.atomic_rmw("add", ptr, val, ordering="monotonic")

        return sig, codegen

    @intrinsic
    def _bitcast_f32_u32(typingctx, v_t):
        if v_t != types.float32:
            return None
        sig = types.uint32(types.float32)

        def codegen(context, builder, signature, args):
            return builder.bitcast(args[0], llvm_ir.IntType(32))

        return sig, codegen

    @intrinsic
    def _bitcast_f64_u64(typingctx, v_t):
        if v_t != types.float64:
            return None
        sig = types.uint64(types.float64)

        def codegen(context, builder, signature, args):
            return builder.bitcast(args[0], llvm_ir.IntType(64))

        return sig, codegen

    @intrinsic
    def _bitcast_u64_f64(typingctx, v_t):
        if v_t != types.uint64:
            return None
        sig = types.float64(types.uint64)

        def codegen(context, builder, signature, args):
            return builder.bitcast(args[0], llvm_ir.DoubleType())

        return sig, codegen

    @njit(cache=True, nogil=True)
    def _umin_njit(arr, idx, val):
        return _atomic_umin_u64(arr, idx, np.uint64(val))

    @njit(cache=True, nogil=True)
    def _add_njit(arr, idx, val):
        return _atomic_add_i64(arr, idx, np.int64(val))

    def atomic_umin_u64(arr: np.ndarray, idx: int, val: int) -> int:
        """min(arr[idx], val) stored atomically; returns the prior value."""
        return int(_umin_njit(arr, idx, np.uint64(val)))

    def atomic_add_i64(arr: np.ndarray, idx: int, val: int) -> int:
        """arr[idx] += val atomically; returns the prior value."""
        return int(_add_njit(arr, idx, np.int64(val)))

else:
    _lock = threading.Lock()

    def atomic_umin_u64(arr: np.ndarray, idx: int, val: int) -> int:
        v = np.uint64(val)
        with _lock:
            old = arr[idx]
            if v < old:
                arr[idx] = v
        return int(old)

    def atomic_add_i64(arr: np.ndarray, idx: int, val: int) -> int:
        with _lock:
            old = arr[idx]
            arr[idx] = old + np.int64(val)
        return int(old)
