"""Dirichlet characters, pretentious distances and the exceptional-character taxonomy."""
