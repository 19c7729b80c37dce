"""Exact calculus of quasi-orderings on unital rings.

Quasi-orderings generalize both ring orderings and valuations.  This package
ships closed-form catalogs of quasi-orderings on the integers and on
univariate and bivariate rational polynomial rings, an exhaustive axiom
verifier over finite element universes, the coarsening relation with its
poset and tree structure, structure predicates, and a reporting CLI.
"""

from .rings import (INTEGERS, POLY_BI, POLY_UNI, RINGS, Ideal, Poly,
                    Universe, UniverseBounds, default_bounds,
                    default_universe, enumerate_universe, ring_by_id)
from .catalog import (EQUIVALENT, GREATER, LESS, ORDERING, VALUATION,
                      CatalogEntry, ClassifyError, QuasiOrder,
                      SupportMismatch, catalog, catalog_by_id, classify,
                      compare, resolve_entry, support_of)

__version__ = "0.1.0"
