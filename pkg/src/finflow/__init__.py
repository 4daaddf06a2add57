"""Finite analogs of structural Ramsey theory and topological dynamics.

Finite structures, embeddings and canonical forms; Fraïssé axiom checks;
Ramsey arrows with certificates; order expansions; finite flows and syndetic
bounds; the finite Samuel construction; extreme-amenability criteria; and a
JSON command-line front end with a content-addressed cache.
"""

__version__ = "0.1.0"
