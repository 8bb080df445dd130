"""Robust extractors and robust fuzzy extractors over GF(2^k), with exact oracles and attacks."""

from .extractor import (
    ExtractedKey,
    ExtractorParams,
    HelperString,
    Infeasible,
    Variant,
    derive_params,
    dkrs_gen,
    dkrs_rep,
    gen,
    rep,
)
from .fuzzy import FuzzyHelper, FuzzyParams, derive_fuzzy_params, fuzzy_gen, fuzzy_rep
from .gf2k import Basis, FieldElement, FieldSpec
from .linearcode import LinearSketchSpec, make_code

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "ExtractedKey",
    "ExtractorParams",
    "FieldElement",
    "FieldSpec",
    "FuzzyHelper",
    "FuzzyParams",
    "HelperString",
    "Infeasible",
    "LinearSketchSpec",
    "Variant",
    "derive_fuzzy_params",
    "derive_params",
    "dkrs_gen",
    "dkrs_rep",
    "fuzzy_gen",
    "fuzzy_rep",
    "gen",
    "make_code",
    "rep",
]
