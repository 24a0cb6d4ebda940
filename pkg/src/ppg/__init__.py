"""Exact arithmetic for countable abelian p-groups: pp-definable subgroups,
canonical pp-type triples, pure-injective hulls, universal pure embeddings,
and homogeneity classification with constructive automorphism witnesses."""

__version__ = "0.1.0"
