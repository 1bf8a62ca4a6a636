from .adl import RefusedExport, export_adl, load_adl
from .dot import export_dot
from .load import LoadError, dumps, load, to_document

__all__ = [
    "LoadError",
    "RefusedExport",
    "dumps",
    "export_adl",
    "export_dot",
    "load",
    "load_adl",
    "to_document",
]
