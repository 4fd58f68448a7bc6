"""Link invariants, index computations and local models behind mod-2
Seiberg-Witten counts on homology 4-tori."""
from .laurent import LaurentPoly, parse_poly, render_poly
from .linkrep import LinkDiagram, braid_closure, parse_braid, parse_pd

__version__ = "0.1.0"

__all__ = ["LaurentPoly", "LinkDiagram", "braid_closure", "parse_braid", "parse_pd", "parse_poly", "render_poly"]
