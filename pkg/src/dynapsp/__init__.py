"""Fully dynamic all-pairs shortest paths under vertex insertions and deletions."""
from .engine import MODES, DynamicAPSP, EngineConfig
from .graph import Graph, GraphError, GraphFormatError, GraphView, VertexSet, load_graph, parse_graph

__all__ = ["MODES", "DynamicAPSP", "EngineConfig", "Graph", "GraphError", "GraphFormatError",
           "GraphView", "VertexSet", "load_graph", "parse_graph"]
__version__ = "0.1.0"
