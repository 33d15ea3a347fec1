"""Constant-query property testers for bounded-degree-free graphs and their
single-pass random-order streaming emulation."""

from .errors import *  # noqa: F401,F403
from .graph import Graph, Subgraph, build_graph, parse_edge_list, read_graph, union, union_all
from .oracle import QueryOracle, derive_seed
from .rbfs import RootedDisc, c_bound, random_bfs, random_bfs_batch
from .discs import ColoredDiscMultiset, canonical_code, decompose, is_isomorphic, stitch
from .patterns import ForbiddenFamily, Witness, contains_forbidden, find_embedding
from .stream import SpaceMeter, StreamOrder, c_prime, multi_collect, random_order, stream_collect
from .testers import TesterParams, Verdict, builtin_family, canonical_test, parse_property, stream_test

__version__ = "0.1.0"
