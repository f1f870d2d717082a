"""Exact workbench for preprojective K-theoretic Hall algebras of quivers."""
