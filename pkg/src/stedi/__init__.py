"""Steiner triple systems, hypertrees and randomized tree embeddings."""
__version__ = "0.1.0"

from stedi.config import EmbedConfig, derive_constants
from stedi.constructors import bose, random_sts, skolem, steiner_system
from stedi.embedder import Embedding, embed, fast_path, verify_embedding
from stedi.errors import (ConstructionError, DomainError, EmbeddingFailure, InvalidSystemError,
                          ParseError, PartitionFailure)
from stedi.formats import load_sts, load_tree, save_sts, save_tree
from stedi.hypergraph import (CrossView, TripleSystem, ValidationReport, cross_view, pair_partner,
                              validate_simple, validate_sts)
from stedi.hypertree import (Hypertree, almost_perfect, d_sequence_tree, decompose_levels,
                             largest_perfect_at_most, perfect_d_ary, validate_hypertree)
from stedi.kernels import BACKEND
from stedi.matching import nibble_matching, random_greedy_matching, split_centers, star_packing
from stedi.oracle import oracle_embed
