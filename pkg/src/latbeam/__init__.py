"""Parallel WFST Viterbi beam-search decoding with lattice generation.

The package decodes acoustic cost matrices against weighted finite-state
transducers on a pool of shared-memory workers, produces exact word
lattices, and prunes them with the extra-cost criterion while the next
frames decode. A pure-numpy engine and a compiled engine give bitwise
identical results; see `use_numba` and the LATBEAM_NUMBA environment
variable for switching.
"""

from ._atomics import HAVE_NUMBA, numba_active, use_numba
from .acoustics import CostMatrix, acoustic_cost, load_cost_matrix, write_cost_matrix
from .decoder import (
    DecodeConfig,
    DecodeResult,
    decode_batch,
    decode_utterance,
    expand_emitting,
    expand_nonemitting,
)
from .errors import (
    CapacityError,
    DecodeFailure,
    InternalInvariantError,
    LatbeamError,
    ParseError,
    UsageError,
    ValidationError,
)
from .lattice import (
    FinalLattice,
    FrameTokens,
    Lattice,
    LatticeArc,
    ShardedArcStore,
    StagedPass,
    finalize_lattice,
    prune_lattice,
    read_lattice_text,
    write_lattice_text,
)
from .packing import SENTINEL, pack, unpack
from .reference import brute_force_extra_costs, serial_decode
from .scheduler import Dispatcher, StaticPartition, claim_next, static_partition
from .scoring import (
    WerResult,
    lattice_density,
    oracle_wer,
    oracle_wer_percent,
    wer,
    wer_percent,
)
from .wfst import Arc, Wfst, load_symbols, load_wfst_text, out_arcs, write_wfst_text

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "CapacityError",
    "CostMatrix",
    "DecodeConfig",
    "DecodeFailure",
    "DecodeResult",
    "Dispatcher",
    "FinalLattice",
    "FrameTokens",
    "HAVE_NUMBA",
    "InternalInvariantError",
    "LatbeamError",
    "Lattice",
    "LatticeArc",
    "ParseError",
    "SENTINEL",
    "ShardedArcStore",
    "StagedPass",
    "StaticPartition",
    "UsageError",
    "ValidationError",
    "WerResult",
    "Wfst",
    "acoustic_cost",
    "brute_force_extra_costs",
    "claim_next",
    "decode_batch",
    "decode_utterance",
    "expand_emitting",
    "expand_nonemitting",
    "finalize_lattice",
    "lattice_density",
    "load_cost_matrix",
    "load_symbols",
    "load_wfst_text",
    "numba_active",
    "oracle_wer",
    "oracle_wer_percent",
    "out_arcs",
    "pack",
    "prune_lattice",
    "read_lattice_text",
    "serial_decode",
    "static_partition",
    "unpack",
    "use_numba",
    "wer",
    "wer_percent",
    "write_cost_matrix",
    "write_lattice_text",
    "write_wfst_text",
]
