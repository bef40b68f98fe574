"""Geodesic automata, rational growth and translation polytopes for Cayley graphs."""
