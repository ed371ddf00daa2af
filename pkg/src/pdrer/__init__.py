"""Property directed reachability with extension-rule re-encoding."""

from .aiger import AigCircuit, Latch, ParseError, UnsupportedFeature, parse_aiger, write_aag, write_aig
from .aux import AuxCircuit, AuxDef, Op
from .certify import certify_safe, certify_unsafe, eliminate_to_plain
from .engine import Engine, EngineConfig, Status, VerificationResult, solve
from .reencode import ReencodeConfig, match_templates, re_encode
from .trace import GeneralizedTrace, Implication, imp_ev
from .tsys import TransitionSystem, encode_transition_system

__version__ = "0.1.0"

__all__ = [
    "AigCircuit", "Latch", "ParseError", "UnsupportedFeature", "parse_aiger", "write_aag", "write_aig",
    "AuxCircuit", "AuxDef", "Op", "certify_safe", "certify_unsafe", "eliminate_to_plain",
    "Engine", "EngineConfig", "Status", "VerificationResult", "solve",
    "ReencodeConfig", "match_templates", "re_encode", "GeneralizedTrace", "Implication", "imp_ev",
    "TransitionSystem", "encode_transition_system",
]
