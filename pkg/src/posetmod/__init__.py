"""Modules over finite posets and finitely determined Z^n-modules."""
