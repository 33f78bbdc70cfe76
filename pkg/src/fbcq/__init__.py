"""Desk-scale quantum cryptanalysis lab for four-branch dual Feistel ciphers."""

from .cipher import (CipherParams, FeistelState, KeySchedule, ParameterError, RoundFunctions, State4,
                     Variant, decrypt, decrypt_partial, encrypt)
from .oracle import CipherOracle, ModeViolation, OracleMode, QueryCounter, RandomPermutationOracle

__all__ = [
    "CipherParams", "FeistelState", "KeySchedule", "ParameterError", "RoundFunctions", "State4",
    "Variant", "decrypt", "decrypt_partial", "encrypt",
    "CipherOracle", "ModeViolation", "OracleMode", "QueryCounter", "RandomPermutationOracle",
]
