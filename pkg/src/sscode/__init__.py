"""Bose-Chowla sensing subspace codes for sparse arrays, with fast DoA decoders."""

__version__ = "0.1.0"

from .channel import ChannelConfig, ReceivedSignal, SourceMode, manifold, transmit
from .codebook import Codebook, alpha_of_index, build_codebook, grid_angles
from .decoders import (
    DecodeOutcome,
    DecoderConfig,
    decode,
    decode_geo_reduced_map,
    decode_geometric,
    decode_map,
    decode_modified_geometric,
    decode_window,
    fast_candidate_enumeration,
    quantize_phase,
    scan_candidates,
)
from .distance import DistanceReport, general_subspace_distance, min_distance, pair_distance
from .numtheory import (
    ArrayGeometry,
    FieldElement,
    GeometryError,
    QuadraticField,
    bose_chowla_set,
    find_primitive_element,
    gcd_table,
    gf_mul,
    load_geometry,
    mod_inverse,
    verify_sidon,
)
from .sim import SweepPlan, SweepResult, run_sweep, runtime_scaling, wilson_interval
