"""Error-correcting codes for samplable additive-error sources.

Subpackages and modules:

* :mod:`~samplable_ecc.gf2` - bit-packed vectors and matrices over GF(2);
* :mod:`~samplable_ecc.codes` - linear codes, syndrome decoding, text format;
* :mod:`~samplable_ecc.sources` - samplable error distributions;
* :mod:`~samplable_ecc.decoders` - brute-force, subspace and hash decoders;
* :mod:`~samplable_ecc.reconstruction` - oracle tracing and short descriptions;
* :mod:`~samplable_ecc.lab` - bounds, Monte Carlo estimation and the CLI.
"""

from .codes import LinearCode, code_from_parity_check, random_code
from .gf2 import BitMatrix, BitVector, nullspace_basis, rank, right_inverse, rref
from .sources import ErrorSource, InjectiveMap

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "BitVector",
    "ErrorSource",
    "InjectiveMap",
    "LinearCode",
    "code_from_parity_check",
    "nullspace_basis",
    "random_code",
    "rank",
    "right_inverse",
    "rref",
]
