"""Static well-formedness checking for hierarchical component architectures
with componentized membranes, interceptor chains and collective interfaces."""

from .check import DiagnosticReport, Violation, check, wf
from .interceptors import Chain, Direction, find_chains, is_interc, is_interc_chain
from .io import LoadError, RefusedExport, export_adl, export_dot, load, load_adl
from .model import Architecture, Path, element_at
from .resolve import control_level, get_itf, parent, resolve_endpoint, sym

__version__ = "0.1.0"
