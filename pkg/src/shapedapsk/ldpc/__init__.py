from .degrees import (MAX_DEGREE, DegreeDistribution, enumerate_candidates,
                      solve_degree_fractions)
from .codes import (ConstructionError, ParityMatrix, build_eira_matrix, encode, read_alist,
                    write_alist)
from .decoder import BPDecoder, bp_decode

__all__ = [
    "MAX_DEGREE", "DegreeDistribution", "enumerate_candidates", "solve_degree_fractions",
    "ConstructionError", "ParityMatrix", "build_eira_matrix", "encode", "read_alist",
    "write_alist", "BPDecoder", "bp_decode",
]
