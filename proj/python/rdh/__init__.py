"""Reversible data hiding for 8-bit grayscale images."""

from ._rdh import (
    CapacityError,
    ChecksumError,
    FormatError,
    PgmError,
    RdhError,
    embed,
    entropy,
    estimate_capacity,
    extract,
    psnr,
    read_pgm,
    write_pgm,
)

__all__ = [
    "CapacityError",
    "ChecksumError",
    "FormatError",
    "PgmError",
    "RdhError",
    "embed",
    "entropy",
    "estimate_capacity",
    "extract",
    "psnr",
    "read_pgm",
    "write_pgm",
]
