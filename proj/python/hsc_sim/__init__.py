"""Python front end for the hardware security checker simulator."""

from ._core import (
    HAMMING_CONSTRUCTION,
    AlignmentError,
    Checker,
    CollisionError,
    DataError,
    FormatError,
    HscError,
    ModeError,
    ParameterError,
    ProgramImage,
    crc_checkbits,
    decode,
    gen_synthetic,
    hamming_parity,
    hamming_parity_width,
    install,
    load_image,
    make_chunks,
    predict_fn,
    run_experiment,
    storage_bits,
)

__all__ = [
    "HAMMING_CONSTRUCTION",
    "AlignmentError",
    "Checker",
    "CollisionError",
    "DataError",
    "FormatError",
    "HscError",
    "ModeError",
    "ParameterError",
    "ProgramImage",
    "crc_checkbits",
    "decode",
    "gen_synthetic",
    "hamming_parity",
    "hamming_parity_width",
    "install",
    "load_image",
    "make_chunks",
    "predict_fn",
    "run_experiment",
    "storage_bits",
]
