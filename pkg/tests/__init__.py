"""
Geodesic Growth Test Suite

Tests for the toolkit modules:
- test_groups.py - Group arithmetic, balls and the Cayley oracle
- test_group_files.py - Group, triangulation and polytope file loading
- test_fellow_travel.py - Fellow-travel predicates and the FFT sweep
- test_geodesic_fsa.py - Automaton construction, minimization and export
- test_growth.py - Parent counts, growth series and closed forms
- test_exact_lp.py - Exact simplex
- test_polytopes.py - Translation polytopes, good sets and cone languages
- test_cannon.py - Non-regularity witnesses
- test_cli.py - End-to-end command runs and report reading
- test_run_acceptance.py - Acceptance sweep driver

golden/ holds recorded reference values for the bundled groups.
"""
