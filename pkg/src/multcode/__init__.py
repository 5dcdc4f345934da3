"""Multiplicity codes over prime fields: encoding, unique decoding, local
correction and systematic encoding."""

from .channel import ChannelSpec
from .code import CodeParams, Codeword, encode, hamming_distance, rate_and_distance, rate_lower_bound
from .gf import ExtField, PrimeField, ext_field, prime_field
from .globaldec import global_unique_decode
from .localdec import (
    LocalConfig,
    Oracle,
    SchemePreset,
    correct_at,
    m_line_correct,
    recover_low_order_jet,
    scheme_encode,
    scheme_query,
)
from .poly import MVPoly, UVPoly, hasse_derivative, multiplicity, order_s_evaluation
from .sysenc import InterpolatingSet, build_interpolating_set, local_decode_message, systematic_encode
from .unidec import ReceivedWordUV, brute_force_list_decode, unique_decode_uv

__version__ = "0.1.0"
