"""Finite and computable models of matched pairs of Boolean algebras and monoids."""

__version__ = "0.1.0"
